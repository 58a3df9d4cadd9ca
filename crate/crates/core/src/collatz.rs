//! The Collatz map `x -> x/2 | 3x+1`, single trajectories and range checks.
//!
//! Values are carried as `u128` with checked arithmetic; an excursion that
//! would leave 128 bits is reported as [`CollatzError::Overflow`] rather than
//! wrapping.

use std::thread;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollatzError {
    #[error("3x+1 overflows 128 bits at x = {value} (start {start})")]
    Overflow { start: u128, value: u128 },
    #[error("the Collatz map is defined on naturals >= 1")]
    Zero,
}

pub fn collatz_step(x: u128) -> Result<u128, CollatzError> {
    match x {
        0 => Err(CollatzError::Zero),
        _ if x.is_multiple_of(2) => Ok(x / 2),
        _ => x
            .checked_mul(3)
            .and_then(|y| y.checked_add(1))
            .ok_or(CollatzError::Overflow { start: x, value: x }),
    }
}

fn step_from(start: u128, x: u128) -> Result<u128, CollatzError> {
    collatz_step(x).map_err(|e| match e {
        CollatzError::Overflow { value, .. } => CollatzError::Overflow { start, value },
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollatzTrajectory {
    pub start: u128,
    /// Every visited value, `start` first.
    pub values: Vec<u128>,
    pub reached_one: bool,
    pub steps: u64,
}

/// Iterates until 1 is reached or `max_steps` maps have been applied.
pub fn collatz_trajectory(n: u128, max_steps: u64) -> Result<CollatzTrajectory, CollatzError> {
    if n == 0 {
        return Err(CollatzError::Zero);
    }
    let mut values = vec![n];
    let mut x = n;
    let mut steps = 0;
    while x != 1 && steps < max_steps {
        x = step_from(n, x)?;
        values.push(x);
        steps += 1;
    }
    Ok(CollatzTrajectory { start: n, values, reached_one: x == 1, steps })
}

/// Summary of a `1..=upper` sweep. Ties on the maxima go to the smallest start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollatzRangeReport {
    pub upper: u64,
    pub verified: u64,
    pub max_steps: u64,
    pub max_steps_start: u64,
    pub max_excursion: u128,
    pub max_excursion_start: u64,
}

impl CollatzRangeReport {
    fn empty(upper: u64) -> Self {
        Self {
            upper,
            verified: 0,
            max_steps: 0,
            max_steps_start: 1,
            max_excursion: 1,
            max_excursion_start: 1,
        }
    }

    fn record(&mut self, n: u64, steps: u64, peak: u128) {
        self.verified += 1;
        if steps > self.max_steps {
            self.max_steps = steps;
            self.max_steps_start = n;
        }
        if peak > self.max_excursion {
            self.max_excursion = peak;
            self.max_excursion_start = n;
        }
    }

    // `later` must cover starts strictly above those in `self`.
    fn merge(mut self, later: Self) -> Self {
        self.verified += later.verified;
        if later.max_steps > self.max_steps {
            self.max_steps = later.max_steps;
            self.max_steps_start = later.max_steps_start;
        }
        if later.max_excursion > self.max_excursion {
            self.max_excursion = later.max_excursion;
            self.max_excursion_start = later.max_excursion_start;
        }
        self
    }
}

// Starts below this get memo slots; larger sweeps fall back to plain iteration
// above it.
const MEMO_LIMIT: u64 = 1 << 24;

/// Sequential sweep with a "known to reach 1" memo: once a trajectory drops
/// below its start, the remaining steps and peak are looked up.
pub fn collatz_verify_range(upper: u64) -> Result<CollatzRangeReport, CollatzError> {
    let memo_len = upper.min(MEMO_LIMIT) as usize + 1;
    let mut steps_memo = vec![0u32; memo_len];
    let mut peak_memo = vec![0u128; memo_len];
    let mut report = CollatzRangeReport::empty(upper);
    for n in 1..=upper {
        let start = u128::from(n);
        let (mut x, mut k, mut peak) = (start, 0u64, start);
        let (steps, peak) = loop {
            if x < start && (x as usize) < memo_len {
                break (k + u64::from(steps_memo[x as usize]), peak.max(peak_memo[x as usize]));
            }
            if x == 1 {
                break (k, peak);
            }
            x = step_from(start, x)?;
            k += 1;
            peak = peak.max(x);
        };
        if (n as usize) < memo_len {
            steps_memo[n as usize] = steps as u32;
            peak_memo[n as usize] = peak;
        }
        report.record(n, steps, peak);
    }
    Ok(report)
}

fn sweep_plain(lo: u64, hi: u64, upper: u64) -> Result<CollatzRangeReport, CollatzError> {
    let mut report = CollatzRangeReport::empty(upper);
    for n in lo..=hi {
        let start = u128::from(n);
        let (mut x, mut steps, mut peak) = (start, 0u64, start);
        while x != 1 {
            x = step_from(start, x)?;
            steps += 1;
            peak = peak.max(x);
        }
        report.record(n, steps, peak);
    }
    Ok(report)
}

/// Partitions `1..=upper` into `workers` contiguous chunks, each iterated
/// without a memo, and merges the chunk reports in ascending order. The result
/// equals [`collatz_verify_range`] for any worker count.
pub fn collatz_verify_range_parallel(
    upper: u64,
    workers: usize,
) -> Result<CollatzRangeReport, CollatzError> {
    let workers = workers.max(1) as u64;
    if upper == 0 {
        return Ok(CollatzRangeReport::empty(0));
    }
    let chunk = upper.div_ceil(workers);
    let bounds: Vec<(u64, u64)> = (0..workers)
        .map(|i| (i * chunk + 1, ((i + 1) * chunk).min(upper)))
        .filter(|(lo, hi)| lo <= hi)
        .collect();
    let parts: Vec<Result<CollatzRangeReport, CollatzError>> = thread::scope(|s| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(lo, hi)| s.spawn(move || sweep_plain(lo, hi, upper)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("collatz worker panicked")).collect()
    });
    let mut merged = CollatzRangeReport::empty(upper);
    for part in parts {
        merged = merged.merge(part?);
    }
    Ok(merged)
}
