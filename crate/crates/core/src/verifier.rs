//! Exhaustive confirmation that every `dfp` / `dpp` trajectory ends in a known
//! cycle.
//!
//! Both maps shrink anything at or above their descent threshold, and numbers
//! below the threshold have at most `multiset_depth` digits. Since the image
//! depends only on the digit multiset (with 0 folded into 1), it suffices to
//! follow one representative per multiset of size `1..=multiset_depth`.

use std::collections::{BTreeMap, HashMap};
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::cycledetect::{self, canonical, Cycle, CycleError, Move, Resolved, Terminal, TerminalSearch};
use crate::digitproc::{self, DigitProcError, ProcessKind};
use crate::digits::{self, DigitMultiset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifierError {
    #[error("catalog entry {name} fails at {from}: maps to {actual}, listed successor {expected}")]
    CatalogInconsistent { name: &'static str, from: u64, expected: u64, actual: u64 },
    #[error("catalog entries {0} and {1} overlap")]
    CatalogOverlap(&'static str, &'static str),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    DigitProc(#[from] DigitProcError),
}

const DFP_FIXA: [u64; 1] = [1];
const DFP_FIXB: [u64; 1] = [2];
const DFP_FIXC: [u64; 1] = [145];
const DFP_FIXD: [u64; 1] = [40_585];
const DFP_LOOP2A: [u64; 2] = [871, 45_361];
const DFP_LOOP2B: [u64; 2] = [872, 45_362];
const DFP_LOOP3: [u64; 3] = [169, 363_601, 1_454];

const DPP_FIXA: [u64; 1] = [
    1,
];
const DPP_FIXB: [u64; 1] = [
    3_435,
];
const DPP_LOOP2: [u64; 2] = [
    421_845_123, 16_780_890,
];
const DPP_LOOP3: [u64; 3] = [
    16_777_500, 2_520_413, 3_418,
];
const DPP_LOOP8: [u64; 8] = [
    809_265_896, 808_491_852, 437_755_524, 1_657_004, 873_583, 34_381_154, 16_780_909,
    792_488_396,
];
const DPP_LOOP11: [u64; 11] = [
    791_621_579, 776_537_851, 19_300_779, 776_488_094, 422_669_176, 388_384_265, 50_381_743,
    17_604_196, 388_337_603, 34_424_740, 824_599,
];
const DPP_LOOP40: [u64; 40] = [
    793_312_220, 388_244_100, 33_554_978, 405_027_808, 34_381_363, 16_824_237, 17_647_707,
    3_341_086, 16_824_184, 33_601_606, 140_025, 3_388, 33_554_486, 16_830_688, 50_424_989,
    791_621_836, 405_114_593, 387_427_281, 35_201_810, 16_780_376, 18_517_643, 17_650_825,
    17_653_671, 1_743_552, 830_081, 33_554_462, 53_476, 873_607, 18_470_986, 421_845_378,
    34_381_644, 16_824_695, 404_294_403, 387_421_546, 17_651_084, 17_650_799, 776_537_847,
    20_121_452, 3_396, 387_467_199,
];
const DPP_LOOP97: [u64; 97] = [
    1_583_236_420, 16_827_317, 18_470_991, 792_441_996, 1_163_132_183, 16_823_961, 404_291_050,
    387_424_134, 17_601_586, 17_697_199, 1_163_955_211, 387_473_430, 18_424_896, 421_022_094,
    387_421_016, 17_647_705, 2_520_668, 16_873_662, 17_740_759, 389_894_501, 808_398_820,
    454_529_386, 404_251_154, 7_025, 826_673, 17_694_102, 388_290_951, 808_398_568,
    454_579_162, 388_297_455, 421_805_001, 16_780_606, 17_740_730, 2_470_915, 388_247_419,
    421_799_008, 792_442_000, 388_244_555, 33_564_350, 53_244, 3_668, 16_870_555, 17_656_792,
    389_164_017, 405_068_190, 404_247_746, 1_694_771, 389_114_489, 808_395_951, 808_401_689,
    437_799_052, 776_491_477, 390_761_830, 405_067_961, 388_340_728, 51_155_506, 59_159,
    774_847_229, 406_668_854, 33_698_038, 421_021_659, 387_470_537, 19_251_281, 404_200_841,
    16_777_992, 777_358_268, 36_074_873, 18_471_269, 405_068_166, 16_920_568, 404_294_148,
    404_198_735, 405_024_914, 387_424_389, 421_799_034, 775_665_066, 1_839_961, 791_664_879,
    793_358_849, 809_222_388, 437_752_177, 3_297_585, 405_027_529, 388_250_548, 50_338_186,
    33_604_269, 387_514_116, 17_650_826, 17_697_202, 389_114_241, 404_198_251, 404_201_349,
    387_421_291, 405_021_541, 6_770, 1_693_743, 388_290_999,
];

/// One named cycle, listed in map order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub listed: &'static [u64],
    pub cycle: Cycle,
}

/// One `f(x) == successor` check over a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessorCheck {
    pub name: &'static str,
    pub from: u64,
    pub expected: u64,
    pub actual: u64,
}

impl SuccessorCheck {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCatalog {
    pub kind: ProcessKind,
    pub entries: Vec<CatalogEntry>,
}

impl CycleCatalog {
    /// The embedded catalog for `kind`. Not yet validated; see [`Self::validate`].
    pub fn for_kind(kind: ProcessKind) -> Self {
        let listed: &[(&'static str, &'static [u64])] = match kind {
            ProcessKind::Dfp => &[
                ("fixA", &DFP_FIXA),
                ("fixB", &DFP_FIXB),
                ("fixC", &DFP_FIXC),
                ("fixD", &DFP_FIXD),
                ("loop2A", &DFP_LOOP2A),
                ("loop2B", &DFP_LOOP2B),
                ("loop3", &DFP_LOOP3),
            ],
            ProcessKind::Dpp => &[
                ("fixA", &DPP_FIXA),
                ("fixB", &DPP_FIXB),
                ("loop2", &DPP_LOOP2),
                ("loop3", &DPP_LOOP3),
                ("loop8", &DPP_LOOP8),
                ("loop11", &DPP_LOOP11),
                ("loop40", &DPP_LOOP40),
                ("loop97", &DPP_LOOP97),
            ],
        };
        let entries = listed
            .iter()
            .map(|&(name, values)| CatalogEntry {
                name,
                listed: values,
                cycle: canonical(values).expect("catalog entries have distinct elements"),
            })
            .collect();
        Self { kind, entries }
    }

    /// Every listed element against its listed successor.
    pub fn successor_checks(&self) -> Vec<SuccessorCheck> {
        self.entries
            .iter()
            .flat_map(|e| {
                let n = e.listed.len();
                (0..n).map(move |i| SuccessorCheck {
                    name: e.name,
                    from: e.listed[i],
                    expected: e.listed[(i + 1) % n],
                    actual: self.kind.apply_u64(e.listed[i]),
                })
            })
            .collect()
    }

    /// Checks closure of every entry and pairwise disjointness; returns the
    /// number of successor checks performed.
    pub fn validate(&self) -> Result<usize, VerifierError> {
        let checks = self.successor_checks();
        if let Some(bad) = checks.iter().find(|c| !c.passed()) {
            return Err(VerifierError::CatalogInconsistent {
                name: bad.name,
                from: bad.from,
                expected: bad.expected,
                actual: bad.actual,
            });
        }
        let mut owner: HashMap<u64, &'static str> = HashMap::new();
        for e in &self.entries {
            for &x in e.listed {
                if let Some(prev) = owner.insert(x, e.name) {
                    return Err(VerifierError::CatalogOverlap(prev, e.name));
                }
            }
        }
        Ok(checks.len())
    }

    pub fn lookup(&self, cycle: &Cycle) -> Option<usize> {
        self.entries.iter().position(|e| &e.cycle == cycle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerminalTally {
    pub name: String,
    pub cycle: Cycle,
    pub basin: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub kind: ProcessKind,
    pub cases_total: u64,
    /// Catalog entries reached by at least one case, in catalog order.
    pub terminals: Vec<TerminalTally>,
    /// Terminal cycles missing from the catalog, with the cases ending there.
    pub unknown: Vec<(Cycle, u64)>,
    /// Longest run of map applications from a representative to its cycle.
    pub max_transient: u32,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn confirmed(&self) -> bool {
        self.unknown.is_empty()
    }

    pub fn unknown_cases(&self) -> u64 {
        self.unknown.iter().map(|(_, n)| n).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub workers: usize,
    pub memoize: bool,
    /// Largest multiset size; defaults to the process's `multiset_depth`.
    pub max_size: Option<u32>,
    pub step_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { workers: 1, memoize: true, max_size: None, step_cap: cycledetect::DEFAULT_STEP_CAP }
    }
}

#[derive(Debug, Default)]
struct Tally {
    basins: Vec<u64>,
    unknown: BTreeMap<Cycle, u64>,
    max_transient: u32,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        for (a, b) in self.basins.iter_mut().zip(other.basins) {
            *a += b;
        }
        for (c, n) in other.unknown {
            *self.unknown.entry(c).or_default() += n;
        }
        self.max_transient = self.max_transient.max(other.max_transient);
    }
}

fn run_chunk(
    catalog: &CycleCatalog,
    cases: &[DigitMultiset],
    opts: &VerifyOptions,
) -> Result<Tally, VerifierError> {
    let kind = catalog.kind;
    let mut tally = Tally { basins: vec![0; catalog.entries.len()], ..Tally::default() };
    let mut shared = TerminalSearch::new(HashMap::<u64, Resolved>::new(), opts.step_cap);
    for m in cases {
        let first = digitproc::apply_to_multiset(kind, m)?;
        let rep = m.min_value().expect("multiset representatives fit in 64 bits") as u64;
        let step = |x: u64| Move::Next(if x == rep { first } else { kind.apply_u64(x) });
        let mut fresh;
        let search = if opts.memoize {
            &mut shared
        } else {
            fresh = TerminalSearch::new(HashMap::new(), opts.step_cap);
            &mut fresh
        };
        let resolved = search.resolve(rep, step)?;
        let Terminal::Cycle(id) = resolved.terminal else {
            unreachable!("total maps have no sinks")
        };
        let cycle = &search.cycles()[id];
        match catalog.lookup(cycle) {
            Some(i) => tally.basins[i] += 1,
            None => *tally.unknown.entry(cycle.clone()).or_default() += 1,
        }
        tally.max_transient = tally.max_transient.max(resolved.distance);
    }
    Ok(tally)
}

pub fn verify_theorem(kind: ProcessKind) -> Result<VerificationReport, VerifierError> {
    verify_theorem_with(kind, &VerifyOptions::default())
}

/// Follows one representative per multiset and matches each terminal cycle
/// against the catalog. Cases are split into contiguous chunks, one per
/// worker, and the tallies merged in chunk order.
pub fn verify_theorem_with(
    kind: ProcessKind,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifierError> {
    let started = Instant::now();
    let catalog = CycleCatalog::for_kind(kind);
    catalog.validate()?;
    let depth = opts.max_size.unwrap_or(kind.multiset_depth()) as usize;
    let cases: Vec<DigitMultiset> = digits::enumerate_multisets_upto(depth).collect();
    let workers = opts.workers.clamp(1, cases.len().max(1));
    let chunk = cases.len().div_ceil(workers).max(1);

    let parts: Vec<Result<Tally, VerifierError>> = if workers == 1 {
        vec![run_chunk(&catalog, &cases, opts)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = cases
                .chunks(chunk)
                .map(|part| {
                    let catalog = &catalog;
                    s.spawn(move || run_chunk(catalog, part, opts))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("verifier worker panicked")).collect()
        })
    };
    let mut total = Tally { basins: vec![0; catalog.entries.len()], ..Tally::default() };
    for part in parts {
        total.merge(part?);
    }

    let terminals = catalog
        .entries
        .iter()
        .zip(&total.basins)
        .filter(|(_, &basin)| basin > 0)
        .map(|(e, &basin)| TerminalTally { name: e.name.to_string(), cycle: e.cycle.clone(), basin })
        .collect();
    Ok(VerificationReport {
        kind,
        cases_total: cases.len() as u64,
        terminals,
        unknown: total.unknown.into_iter().collect(),
        max_transient: total.max_transient,
        elapsed: started.elapsed(),
    })
}

/// The two premises of the multiset reduction at `threshold`: nothing below it
/// maps to it or above, and every number below it has at most
/// `multiset_depth` digits.
pub fn coverage_argument_check_at(kind: ProcessKind, threshold: u64) -> bool {
    let digits_below = threshold.saturating_sub(1).max(1).to_string().len() as u32;
    digitproc::trap_holds(kind, threshold) && kind.multiset_depth() >= digits_below
}

pub fn coverage_argument_check(kind: ProcessKind) -> bool {
    coverage_argument_check_at(kind, kind.descent_threshold())
}
