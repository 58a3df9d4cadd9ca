//! Generalized Kaprekar routine `K_{u,v}`.
//!
//! A value is written with exactly `length` base-b digits (leading zeros
//! kept). `α_u` is the u-th largest and `β_v` the v-th smallest *distinct*
//! value among the arrangements of those digits, and `K_{u,v}(n) = α_u − β_v`.
//! The classic routine converging to 6174 is `K_{1,1}` in base 10 at length 4.
//!
//! When fewer than `max(u, v)` distinct arrangements exist, or the difference
//! would be negative, the step is [`KaprekarStep::Degenerate`]. Classification
//! additionally treats the all-zero state as an absorbing "zero" outcome: it is
//! where repdigits collapse, and it is not a terminal of interest.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cycledetect::{self, Cycle, CycleError, DenseMemo, Move, Terminal, TerminalSearch};
use crate::digits::{Digits, DigitsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KaprekarError {
    #[error("invalid Kaprekar configuration: {0}")]
    InvalidConfig(String),
    #[error("rank {rank} exceeds the {available} distinct arrangements")]
    RankOutOfRange { rank: u64, available: u128 },
    #[error("{states} states exceed the exhaustive-scan cap of {cap}")]
    StateSpaceTooLarge { states: u64, cap: u64 },
    #[error("value {value} does not fit in {length} base-{base} digits")]
    ValueOutOfRange { value: u64, base: u32, length: u32 },
    #[error("conjecture parameter m must be at least 3, got {0}")]
    InvalidM(u32),
    #[error(transparent)]
    Digits(#[from] DigitsError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct KaprekarConfig {
    pub base: u32,
    pub length: u32,
    pub u: u64,
    pub v: u64,
}

impl KaprekarConfig {
    pub fn new(base: u32, length: u32, u: u64, v: u64) -> Result<Self, KaprekarError> {
        let invalid = |msg: String| Err(KaprekarError::InvalidConfig(msg));
        if base < 2 {
            return invalid(format!("base {base} < 2"));
        }
        if length < 2 {
            return invalid(format!("length {length} < 2"));
        }
        if u == 0 || v == 0 {
            return invalid("u and v must be at least 1".into());
        }
        let states = match u64::from(base).checked_pow(length) {
            Some(s) if s <= 1 << 63 => s,
            _ => return invalid(format!("{base}^{length} does not fit in 63 bits")),
        };
        if u > states || v > states {
            return invalid(format!("u = {u}, v = {v} exceed {base}^{length} arrangements"));
        }
        Ok(Self { base, length, u, v })
    }

    /// The classic 6174 routine.
    pub fn classic() -> Self {
        Self { base: 10, length: 4, u: 1, v: 1 }
    }

    /// `base^length`, the number of digit strings.
    pub fn state_count(&self) -> u64 {
        u64::from(self.base).pow(self.length)
    }

    /// Smallest value without a leading zero.
    pub fn first_canonical(&self) -> u64 {
        u64::from(self.base).pow(self.length - 1)
    }
}

/// `L! / Π c!` over digit multiplicities `c`.
pub fn distinct_perm_count(d: &Digits) -> u128 {
    multinomial(&d.counts())
}

fn multinomial(counts: &[usize]) -> u128 {
    let mut total = 0u64;
    let mut acc = 1u128;
    for &c in counts {
        for i in 1..=c as u64 {
            total += 1;
            // acc * total / i stays integral: acc * binom(total, i) / binom(total - 1, i - 1)
            acc = acc * u128::from(total) / u128::from(i);
        }
    }
    acc
}

/// Advances to the lexicographic successor; false (and unchanged) at the last arrangement.
pub(crate) fn next_arrangement(d: &mut [u32]) -> bool {
    let Some(i) = d.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = d.iter().rposition(|&x| x > d[i]).expect("pivot has a larger suffix element");
    d.swap(i, j);
    d[i + 1..].reverse();
    true
}

/// Steps to the lexicographic predecessor; false at the first arrangement.
pub(crate) fn prev_arrangement(d: &mut [u32]) -> bool {
    let Some(i) = d.windows(2).rposition(|w| w[0] > w[1]) else {
        return false;
    };
    let j = d.iter().rposition(|&x| x < d[i]).expect("pivot has a smaller suffix element");
    d.swap(i, j);
    d[i + 1..].reverse();
    true
}

fn check_rank(d: &Digits, rank: u64) -> Result<(), KaprekarError> {
    let available = distinct_perm_count(d);
    if rank == 0 || u128::from(rank) > available {
        return Err(KaprekarError::RankOutOfRange { rank, available });
    }
    Ok(())
}

fn value_of(buf: &[u32], base: u32) -> Result<u128, KaprekarError> {
    crate::digits::compose_slice(buf, base)
        .ok_or_else(|| KaprekarError::InvalidConfig("arrangement exceeds 128 bits".into()))
}

/// The `u`-th largest distinct arrangement value of `d`'s digits.
pub fn alpha(d: &Digits, u: u64) -> Result<u128, KaprekarError> {
    check_rank(d, u)?;
    let mut buf = d.as_slice().to_vec();
    buf.sort_unstable_by(|a, b| b.cmp(a));
    for _ in 1..u {
        prev_arrangement(&mut buf);
    }
    value_of(&buf, d.base())
}

/// The `v`-th smallest distinct arrangement value; arrangements with leading
/// zeros count at their numeric value.
pub fn beta(d: &Digits, v: u64) -> Result<u128, KaprekarError> {
    check_rank(d, v)?;
    let mut buf = d.as_slice().to_vec();
    buf.sort_unstable();
    for _ in 1..v {
        next_arrangement(&mut buf);
    }
    value_of(&buf, d.base())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KaprekarStep {
    Next(u64),
    Degenerate,
}

/// One application of `K_{u,v}`. Values at or above `base^length` are rejected.
pub fn kaprekar_step(n: u64, cfg: &KaprekarConfig) -> Result<KaprekarStep, KaprekarError> {
    if n >= cfg.state_count() {
        return Err(KaprekarError::ValueOutOfRange { value: n, base: cfg.base, length: cfg.length });
    }
    let mut scratch = Vec::with_capacity(cfg.length as usize);
    Ok(step_unchecked(n, cfg, &mut scratch))
}

// `n < base^length` is the caller's responsibility.
fn step_unchecked(n: u64, cfg: &KaprekarConfig, buf: &mut Vec<u32>) -> KaprekarStep {
    let base = u64::from(cfg.base);
    buf.clear();
    let mut rest = n;
    for _ in 0..cfg.length {
        buf.push((rest % base) as u32);
        rest /= base;
    }
    buf.sort_unstable();

    let mut counts = Vec::new();
    let mut run = 1usize;
    for w in buf.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            counts.push(run);
            run = 1;
        }
    }
    counts.push(run);
    if multinomial(&counts) < u128::from(cfg.u.max(cfg.v)) {
        return KaprekarStep::Degenerate;
    }

    let compose = |digits: &[u32]| digits.iter().fold(0u64, |acc, &d| acc * base + u64::from(d));
    for _ in 1..cfg.v {
        next_arrangement(buf);
    }
    let smaller = compose(buf);
    buf.sort_unstable_by(|a, b| b.cmp(a));
    for _ in 1..cfg.u {
        prev_arrangement(buf);
    }
    let larger = compose(buf);
    match larger.checked_sub(smaller) {
        Some(diff) => KaprekarStep::Next(diff),
        None => KaprekarStep::Degenerate,
    }
}

pub(crate) const SINK_DEGENERATE: u16 = 0;
pub(crate) const SINK_ZERO: u16 = 1;

/// How one start ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StartFate {
    /// Index into [`KaprekarClassification::terminals`].
    Terminal(usize),
    Degenerate,
    /// Reaches the all-zero state.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Basin {
    pub terminal: Cycle,
    pub size: u64,
    /// Starts without a leading zero.
    pub canonical_size: u64,
}

/// Exhaustive catalog of where every length-`L` digit string ends under `K_{u,v}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaprekarClassification {
    pub config: KaprekarConfig,
    /// Fixed points ascending, then longer cycles in canonical order.
    pub terminals: Vec<Basin>,
    pub degenerate_starts: Vec<u64>,
    pub zero_starts: Vec<u64>,
    fates: Vec<u32>,
}

const FATE_DEGENERATE: u32 = u32::MAX;
const FATE_ZERO: u32 = u32::MAX - 1;

impl KaprekarClassification {
    pub fn fixed_points(&self) -> Vec<u64> {
        self.terminals
            .iter()
            .filter(|b| b.terminal.is_fixed_point())
            .map(|b| b.terminal.smallest())
            .collect()
    }

    /// Terminal cycles of length at least two.
    pub fn cycles(&self) -> Vec<&Cycle> {
        self.terminals.iter().map(|b| &b.terminal).filter(|c| !c.is_fixed_point()).collect()
    }

    pub fn fate(&self, start: u64) -> Option<StartFate> {
        self.fates.get(start as usize).map(|&f| match f {
            FATE_DEGENERATE => StartFate::Degenerate,
            FATE_ZERO => StartFate::Zero,
            i => StartFate::Terminal(i as usize),
        })
    }

    /// Canonical starts (no leading zero) that do not end in `terminal_index`.
    pub fn canonical_outliers(&self, terminal_index: usize) -> Vec<u64> {
        (self.config.first_canonical()..self.config.state_count())
            .filter(|&n| self.fate(n) != Some(StartFate::Terminal(terminal_index)))
            .collect()
    }

    /// Every value lying on a terminal, ascending.
    pub fn terminal_values(&self) -> BTreeSet<u64> {
        self.terminals.iter().flat_map(|b| b.terminal.values().iter().copied()).collect()
    }

    /// Compares the discovered terminal values with a published list.
    pub fn compare_expected(&self, expected: &[u64]) -> ExpectationCheck {
        let expected: BTreeSet<u64> = expected.iter().copied().collect();
        let discovered = self.terminal_values();
        ExpectationCheck {
            missing: expected.difference(&discovered).copied().collect(),
            unexpected: discovered.difference(&expected).copied().collect(),
            expected: expected.into_iter().collect(),
            discovered: discovered.into_iter().collect(),
        }
    }

    pub fn assigned_count(&self) -> u64 {
        self.terminals.iter().map(|b| b.size).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectationCheck {
    pub expected: Vec<u64>,
    pub discovered: Vec<u64>,
    pub missing: Vec<u64>,
    pub unexpected: Vec<u64>,
}

impl ExpectationCheck {
    pub fn matches(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

pub fn classify_all(cfg: &KaprekarConfig) -> Result<KaprekarClassification, KaprekarError> {
    classify_all_capped(cfg, DEFAULT_STATE_CAP)
}

/// Follows `K_{u,v}` from every value in `[0, base^length)`.
pub fn classify_all_capped(
    cfg: &KaprekarConfig,
    cap: u64,
) -> Result<KaprekarClassification, KaprekarError> {
    let states = cfg.state_count();
    if states > cap {
        return Err(KaprekarError::StateSpaceTooLarge { states, cap });
    }
    let mut search = TerminalSearch::new(DenseMemo::new(states as usize), cycledetect::DEFAULT_STEP_CAP);
    let mut buf = Vec::with_capacity(cfg.length as usize);
    let mut raw = Vec::with_capacity(states as usize);
    for n in 0..states {
        let r = search.resolve(n, |x| {
            if x == 0 {
                return Move::Sink(SINK_ZERO);
            }
            match step_unchecked(x, cfg, &mut buf) {
                KaprekarStep::Next(y) => Move::Next(y),
                KaprekarStep::Degenerate => Move::Sink(SINK_DEGENERATE),
            }
        })?;
        raw.push(r.terminal);
    }

    let found = search.into_cycles();
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&a, &b| {
        (found[a].len() > 1, &found[a]).cmp(&(found[b].len() > 1, &found[b]))
    });
    let mut rank = vec![0u32; found.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos as u32;
    }

    let mut terminals: Vec<Basin> = order
        .iter()
        .map(|&i| Basin { terminal: found[i].clone(), size: 0, canonical_size: 0 })
        .collect();
    let mut degenerate_starts = Vec::new();
    let mut zero_starts = Vec::new();
    let first_canonical = cfg.first_canonical();
    let fates = raw
        .into_iter()
        .enumerate()
        .map(|(n, t)| {
            let n = n as u64;
            match t {
                Terminal::Cycle(i) => {
                    let r = rank[i];
                    let basin = &mut terminals[r as usize];
                    basin.size += 1;
                    if n >= first_canonical {
                        basin.canonical_size += 1;
                    }
                    r
                }
                Terminal::Sink(SINK_ZERO) => {
                    zero_starts.push(n);
                    FATE_ZERO
                }
                Terminal::Sink(_) => {
                    degenerate_starts.push(n);
                    FATE_DEGENERATE
                }
            }
        })
        .collect();

    Ok(KaprekarClassification { config: *cfg, terminals, degenerate_starts, zero_starts, fates })
}

/// Closed forms predicted for base 2, `u = v = 2`: a fixed point at length
/// `2m` and a 2-cycle at length `2m + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureOutcome {
    pub m: u32,
    pub predicted_fixed_point: u64,
    pub even_terminals: Vec<Cycle>,
    pub even_holds: bool,
    pub predicted_loop: [u64; 2],
    pub odd_terminals: Vec<Cycle>,
    pub odd_holds: bool,
}

impl ConjectureOutcome {
    pub fn holds(&self) -> bool {
        self.even_holds && self.odd_holds
    }
}

pub fn predicted_fixed_point(m: u32) -> u64 {
    (1u64 << (2 * m)) - 3 * (1u64 << m) + 1
}

pub fn predicted_loop(m: u32) -> [u64; 2] {
    let top = (1u64 << (2 * m + 1)) - 7 * (1u64 << m) + 1;
    let quarter = 1u64 << (m - 2);
    [top + quarter, top + 10 * quarter]
}

pub fn conjecture_check(m: u32) -> Result<ConjectureOutcome, KaprekarError> {
    conjecture_check_capped(m, DEFAULT_STATE_CAP)
}

pub fn conjecture_check_capped(m: u32, cap: u64) -> Result<ConjectureOutcome, KaprekarError> {
    if !(3..=31).contains(&m) {
        return Err(KaprekarError::InvalidM(m));
    }
    let even = classify_all_capped(&KaprekarConfig::new(2, 2 * m, 2, 2)?, cap)?;
    let odd = classify_all_capped(&KaprekarConfig::new(2, 2 * m + 1, 2, 2)?, cap)?;
    let even_terminals: Vec<Cycle> = even.terminals.into_iter().map(|b| b.terminal).collect();
    let odd_terminals: Vec<Cycle> = odd.terminals.into_iter().map(|b| b.terminal).collect();
    let fixed = predicted_fixed_point(m);
    let pair = predicted_loop(m);
    let even_holds = even_terminals.len() == 1 && even_terminals[0].values() == [fixed];
    let odd_holds = odd_terminals.len() == 1
        && odd_terminals[0].len() == 2
        && odd_terminals[0].values().iter().copied().collect::<BTreeSet<_>>()
            == pair.iter().copied().collect();
    Ok(ConjectureOutcome {
        m,
        predicted_fixed_point: fixed,
        even_terminals,
        even_holds,
        predicted_loop: pair,
        odd_terminals,
        odd_holds,
    })
}
