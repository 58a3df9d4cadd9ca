//! Terminal-cycle detection for iterated maps on naturals.
//!
//! [`find_terminal`] follows one trajectory with a visited map and splits it
//! into transient and cycle. [`TerminalSearch`] resolves many starts against a
//! shared memo and also handles partial maps, where a step may fall into an
//! absorbing sink instead of producing a value.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("cycle has repeated element {0}")]
    DuplicateElements(u64),
    #[error("cycle must be nonempty")]
    Empty,
    #[error("no repeat within {cap} steps from {start}")]
    StepCapExceeded { start: u64, cap: usize },
}

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// A cycle rotated so that its minimum comes first. Fixed points are cycles
/// of length one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Cycle(Vec<u64>);

impl Cycle {
    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn smallest(&self) -> u64 {
        self.0[0]
    }

    pub fn is_fixed_point(&self) -> bool {
        self.0.len() == 1
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.contains(&x)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Rotates `values` to start at its minimum. Does not check closure under any
/// map; see [`verify_cycle`].
pub fn canonical(values: &[u64]) -> Result<Cycle, CycleError> {
    let (min_pos, _) = values
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .ok_or(CycleError::Empty)?;
    let mut seen = values.to_vec();
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(CycleError::DuplicateElements(w[0]));
    }
    let mut rotated = values[min_pos..].to_vec();
    rotated.extend_from_slice(&values[..min_pos]);
    Ok(Cycle(rotated))
}

/// True iff `f` sends every element to its cyclic successor.
pub fn verify_cycle(mut f: impl FnMut(u64) -> u64, c: &Cycle) -> bool {
    let v = c.values();
    !v.is_empty() && (0..v.len()).all(|i| f(v[i]) == v[(i + 1) % v.len()])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryResult {
    pub start: u64,
    /// Values before the cycle is entered, `start` first; empty when `start`
    /// is itself on the cycle.
    pub transient: Vec<u64>,
    pub cycle: Cycle,
    pub transient_length: usize,
}

impl TrajectoryResult {
    /// The value at which the trajectory first touches the cycle.
    pub fn entry(&self, mut f: impl FnMut(u64) -> u64) -> u64 {
        match self.transient.last() {
            Some(&last) => f(last),
            None => self.start,
        }
    }
}

/// Iterates `f` from `start` until a value repeats. `step_cap` bounds the
/// number of applications of `f`.
pub fn find_terminal(
    mut f: impl FnMut(u64) -> u64,
    start: u64,
    step_cap: usize,
) -> Result<TrajectoryResult, CycleError> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut path = Vec::new();
    let mut x = start;
    loop {
        if let Some(&i) = index.get(&x) {
            let cycle = canonical(&path[i..])?;
            path.truncate(i);
            return Ok(TrajectoryResult { start, transient_length: path.len(), transient: path, cycle });
        }
        if path.len() > step_cap {
            return Err(CycleError::StepCapExceeded { start, cap: step_cap });
        }
        index.insert(x, path.len());
        path.push(x);
        x = f(x);
    }
}

/// Outcome of one step of a possibly partial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Next(u64),
    /// The trajectory stops in caller-defined sink `id`.
    Sink(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    /// Index into [`TerminalSearch::cycles`].
    Cycle(usize),
    Sink(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolved {
    pub terminal: Terminal,
    /// Map applications before the cycle is entered (or the sink is hit).
    pub distance: u32,
}

pub trait Memo {
    fn get(&self, x: u64) -> Option<Resolved>;
    fn set(&mut self, x: u64, r: Resolved);
}

impl Memo for HashMap<u64, Resolved> {
    fn get(&self, x: u64) -> Option<Resolved> {
        HashMap::get(self, &x).copied()
    }

    fn set(&mut self, x: u64, r: Resolved) {
        self.insert(x, r);
    }
}

/// Memo for a dense state space `0..len`, one packed `u64` per state.
#[derive(Debug, Clone)]
pub struct DenseMemo {
    slots: Vec<u64>,
}

const UNSET: u64 = u64::MAX;
const SINK_TAG: u64 = 1 << 31;

impl DenseMemo {
    pub fn new(len: usize) -> Self {
        Self { slots: vec![UNSET; len] }
    }

    fn pack(r: Resolved) -> u64 {
        let terminal = match r.terminal {
            Terminal::Cycle(i) => {
                assert!((i as u64) < SINK_TAG, "too many cycles for dense memo");
                i as u64
            }
            Terminal::Sink(s) => SINK_TAG | u64::from(s),
        };
        (terminal << 32) | u64::from(r.distance)
    }

    fn unpack(word: u64) -> Resolved {
        let terminal = word >> 32;
        let terminal = if terminal & SINK_TAG != 0 {
            Terminal::Sink((terminal & !SINK_TAG) as u16)
        } else {
            Terminal::Cycle(terminal as usize)
        };
        Resolved { terminal, distance: word as u32 }
    }
}

impl Memo for DenseMemo {
    fn get(&self, x: u64) -> Option<Resolved> {
        match self.slots.get(x as usize) {
            Some(&w) if w != UNSET => Some(Self::unpack(w)),
            _ => None,
        }
    }

    fn set(&mut self, x: u64, r: Resolved) {
        if let Some(slot) = self.slots.get_mut(x as usize) {
            *slot = Self::pack(r);
        }
    }
}

/// Resolves starts to terminals, remembering every value it has classified.
/// Cycles are numbered in discovery order.
#[derive(Debug, Clone)]
pub struct TerminalSearch<M: Memo> {
    memo: M,
    cycles: Vec<Cycle>,
    step_cap: usize,
}

impl<M: Memo> TerminalSearch<M> {
    pub fn new(memo: M, step_cap: usize) -> Self {
        Self { memo, cycles: Vec::new(), step_cap }
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn into_cycles(self) -> Vec<Cycle> {
        self.cycles
    }

    pub fn resolve(
        &mut self,
        start: u64,
        mut f: impl FnMut(u64) -> Move,
    ) -> Result<Resolved, CycleError> {
        let mut path: Vec<u64> = Vec::new();
        let mut on_path: HashMap<u64, usize> = HashMap::new();
        let mut x = start;
        let mut base = loop {
            if let Some(r) = self.memo.get(x) {
                break r;
            }
            if let Some(&i) = on_path.get(&x) {
                let cycle = canonical(&path[i..])?;
                let id = self.cycles.len();
                self.cycles.push(cycle);
                let r = Resolved { terminal: Terminal::Cycle(id), distance: 0 };
                for &y in &path[i..] {
                    self.memo.set(y, r);
                }
                path.truncate(i);
                break r;
            }
            if path.len() > self.step_cap {
                return Err(CycleError::StepCapExceeded { start, cap: self.step_cap });
            }
            match f(x) {
                Move::Sink(s) => {
                    let r = Resolved { terminal: Terminal::Sink(s), distance: 0 };
                    self.memo.set(x, r);
                    break r;
                }
                Move::Next(y) => {
                    on_path.insert(x, path.len());
                    path.push(x);
                    x = y;
                }
            }
        };
        for &y in path.iter().rev() {
            base.distance += 1;
            self.memo.set(y, base);
        }
        Ok(self.memo.get(start).expect("start resolved"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dfp(n: u64) -> u64 {
        const F: [u64; 10] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880];
        let mut s = 0;
        let mut r = n;
        loop {
            s += F[(r % 10) as usize];
            r /= 10;
            if r == 0 {
                return s;
            }
        }
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical(&[45361, 871]).unwrap().values(), &[871, 45361]);
        assert_eq!(canonical(&[363601, 1454, 169]).unwrap().values(), &[169, 363601, 1454]);
        assert_eq!(canonical(&[5]).unwrap().values(), &[5]);
        assert_eq!(canonical(&[3, 4, 3]), Err(CycleError::DuplicateElements(3)));
        assert_eq!(canonical(&[]), Err(CycleError::Empty));
    }

    #[test]
    fn canonical_is_idempotent() {
        let c = canonical(&[9, 2, 7, 4]).unwrap();
        assert_eq!(canonical(c.values()).unwrap(), c);
        assert_eq!(c.values(), &[2, 7, 4, 9]);
    }

    #[test]
    fn find_terminal_examples() {
        let r = find_terminal(dfp, 871, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(r.cycle.values(), &[871, 45361]);
        assert_eq!(r.transient_length, 0);

        let r = find_terminal(dfp, 169, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(r.cycle.values(), &[169, 363601, 1454]);

        let r = find_terminal(dfp, 2, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(r.cycle.values(), &[2]);
        assert!(r.transient.is_empty());

        let mut brute = vec![123u64];
        while !brute[..brute.len() - 1].contains(brute.last().unwrap()) {
            brute.push(dfp(*brute.last().unwrap()));
        }
        let repeat = *brute.last().unwrap();
        let first = brute.iter().position(|&v| v == repeat).unwrap();
        let r = find_terminal(dfp, 123, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(r.transient, brute[..first].to_vec());
        assert_eq!(r.cycle, canonical(&brute[first..brute.len() - 1]).unwrap());
        assert_eq!(r.cycle.values(), &[169, 363601, 1454]);
        assert_eq!(r.entry(dfp), 169);
    }

    #[test]
    fn step_cap_reports_divergence() {
        let err = find_terminal(|x| x + 1, 0, 100).unwrap_err();
        assert_eq!(err, CycleError::StepCapExceeded { start: 0, cap: 100 });
        let mut search = TerminalSearch::new(HashMap::new(), 50);
        assert!(search.resolve(0, |x| Move::Next(x + 1)).is_err());
    }

    #[test]
    fn verify_cycle_examples() {
        assert!(verify_cycle(dfp, &canonical(&[145]).unwrap()));
        assert!(!verify_cycle(dfp, &canonical(&[146]).unwrap()));
        assert!(verify_cycle(dfp, &canonical(&[1454, 169, 363601]).unwrap()));
        // wrong cyclic order
        assert!(!verify_cycle(dfp, &canonical(&[169, 1454, 363601]).unwrap()));
    }

    #[test]
    fn memoized_search_matches_direct_detection() {
        let mut search = TerminalSearch::new(HashMap::new(), DEFAULT_STEP_CAP);
        for start in (0..3000).rev() {
            let r = search.resolve(start, |x| Move::Next(dfp(x))).unwrap();
            let direct = find_terminal(dfp, start, DEFAULT_STEP_CAP).unwrap();
            let Terminal::Cycle(id) = r.terminal else { panic!("no sinks here") };
            assert_eq!(search.cycles()[id], direct.cycle);
            assert_eq!(r.distance as usize, direct.transient_length, "start {start}");
        }
    }

    #[test]
    fn sinks_absorb() {
        // x -> x - 2 until negative: odd values sink at 1, even values cycle at 0
        let f = |x: u64| if x == 1 { Move::Sink(7) } else if x == 0 { Move::Next(0) } else { Move::Next(x - 2) };
        let mut search = TerminalSearch::new(DenseMemo::new(20), 100);
        let r = search.resolve(9, f).unwrap();
        assert_eq!(r, Resolved { terminal: Terminal::Sink(7), distance: 4 });
        let r = search.resolve(8, f).unwrap();
        assert_eq!(r, Resolved { terminal: Terminal::Cycle(0), distance: 4 });
        assert_eq!(search.cycles()[0].values(), &[0]);
        assert_eq!(search.resolve(7, f).unwrap().distance, 3);
    }
}
