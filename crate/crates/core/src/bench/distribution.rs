use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;

use super::BenchError;

/// Priority increment distributions for the hold model. Each has mean 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PriorityDistribution {
    /// `-ln R`
    Exponential,
    /// `2R`
    Uniform,
    /// `0.9 + 0.2R`
    Biased,
}

impl PriorityDistribution {
    pub const ALL: [PriorityDistribution; 3] =
        [PriorityDistribution::Exponential, PriorityDistribution::Uniform, PriorityDistribution::Biased];

    pub fn name(self) -> &'static str {
        match self {
            PriorityDistribution::Exponential => "exponential",
            PriorityDistribution::Uniform => "uniform",
            PriorityDistribution::Biased => "biased",
        }
    }

    /// Map a uniform `r` in the open interval (0, 1) to an increment.
    pub fn sample(self, r: f64) -> Result<f64, BenchError> {
        if !(r > 0.0 && r < 1.0) {
            return Err(BenchError::UniformOutOfRange(r));
        }
        Ok(self.transform(r))
    }

    #[inline]
    fn transform(self, r: f64) -> f64 {
        match self {
            PriorityDistribution::Exponential => -r.ln(),
            PriorityDistribution::Uniform => 2.0 * r,
            PriorityDistribution::Biased => 0.9 + 0.2 * r,
        }
    }

    /// Draw one increment.
    #[inline]
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        self.transform(rng.sample(Open01))
    }

    /// Mean of `draws` increments.
    pub fn sample_mean<R: Rng + ?Sized>(self, rng: &mut R, draws: usize) -> f64 {
        // Kahan summation; 10^7 terms would otherwise lose digits.
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for _ in 0..draws {
            let y = self.draw(rng) - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        sum / draws as f64
    }
}

impl fmt::Display for PriorityDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorityDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PriorityDistribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown distribution `{s}` (expected exponential, uniform or biased)"))
    }
}
