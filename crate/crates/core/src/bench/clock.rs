use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::BenchError;

/// Which time source to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimerChoice {
    /// Cycle counter when the CPU has an invariant one, otherwise the
    /// monotonic clock.
    #[default]
    Auto,
    Cycles,
    Monotonic,
}

impl FromStr for TimerChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(TimerChoice::Auto),
            "cycles" => Ok(TimerChoice::Cycles),
            "monotonic" => Ok(TimerChoice::Monotonic),
            _ => Err(format!("unknown timer `{s}` (expected auto, cycles or monotonic)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Cycles,
    Monotonic,
}

/// Tick source read before and after each timed block.
#[derive(Debug, Clone, Copy)]
pub struct Clock {
    source: Source,
    origin: Instant,
}

/// Anything coarser than this is not a usable benchmark clock.
const MAX_RESOLUTION_NS: u64 = 1_000;

impl Clock {
    pub fn new(choice: TimerChoice) -> Result<Self, BenchError> {
        let source = match choice {
            TimerChoice::Cycles if invariant_tsc() => Source::Cycles,
            TimerChoice::Cycles => {
                return Err(BenchError::TimerUnavailable("no invariant cycle counter on this CPU".into()))
            }
            TimerChoice::Auto if invariant_tsc() => Source::Cycles,
            TimerChoice::Auto | TimerChoice::Monotonic => Source::Monotonic,
        };
        let clock = Clock { source, origin: Instant::now() };
        if source == Source::Monotonic {
            let resolution = clock.monotonic_resolution();
            if resolution > MAX_RESOLUTION_NS {
                return Err(BenchError::TimerUnavailable(format!("monotonic clock resolution is {resolution} ns")));
            }
        }
        Ok(clock)
    }

    /// Identity recorded in benchmark output.
    pub fn name(&self) -> &'static str {
        match self.source {
            Source::Cycles => "tsc-cycles",
            Source::Monotonic => "monotonic-ns",
        }
    }

    #[inline(always)]
    pub fn now(&self) -> u64 {
        match self.source {
            Source::Cycles => read_tsc(),
            Source::Monotonic => self.origin.elapsed().as_nanos() as u64,
        }
    }

    // Smallest non-zero step seen over a short burst of reads.
    fn monotonic_resolution(&self) -> u64 {
        let mut best = u64::MAX;
        let mut last = self.now();
        for _ in 0..10_000 {
            let t = self.now();
            if t > last {
                best = best.min(t - last);
            }
            last = t;
        }
        best
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(target_arch = "x86_64")]
#[inline(always)]
fn read_tsc() -> u64 {
    #[allow(unused_unsafe)]
    // SAFETY: RDTSC has no memory effects; availability is checked in `Clock::new`.
    unsafe {
        std::arch::x86_64::_rdtsc()
    }
}

#[cfg(not(target_arch = "x86_64"))]
#[inline(always)]
fn read_tsc() -> u64 {
    unreachable!("cycle source is only selected on x86_64")
}

#[cfg(target_arch = "x86_64")]
fn invariant_tsc() -> bool {
    use std::arch::x86_64::__cpuid;
    #[allow(unused_unsafe)]
    // SAFETY: CPUID is available on every x86_64 CPU.
    unsafe {
        let has_tsc = __cpuid(1).edx & (1 << 4) != 0;
        let max_extended = __cpuid(0x8000_0000).eax;
        has_tsc && max_extended >= 0x8000_0007 && __cpuid(0x8000_0007).edx & (1 << 8) != 0
    }
}

#[cfg(not(target_arch = "x86_64"))]
fn invariant_tsc() -> bool {
    false
}
