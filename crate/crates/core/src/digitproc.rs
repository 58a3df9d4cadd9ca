//! Digit-factorial (`dfp`) and digit-power (`dpp`) sums over decimal digits,
//! and the bounds that trap their trajectories below a fixed threshold.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::digits::{self, DigitMultiset, DigitsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitProcError {
    #[error(transparent)]
    Digits(#[from] DigitsError),
    #[error("{kind} descent needs n >= {threshold}, got {value}")]
    PreconditionViolated { kind: ProcessKind, threshold: u64, value: String },
    #[error("multiset of size {size} exceeds the {kind} depth {depth}")]
    MultisetTooLarge { kind: ProcessKind, size: u32, depth: u32 },
    #[error("unknown process {0:?}; expected dfp or dpp")]
    UnknownProcess(String),
}

const FACTORIALS: [u64; 10] = [1, 1, 2, 6, 24, 120, 720, 5040, 40_320, 362_880];
// d^d with 0^0 = 1
const SELF_POWERS: [u64; 10] =
    [1, 1, 4, 27, 256, 3125, 46_656, 823_543, 16_777_216, 387_420_489];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Dfp,
    Dpp,
}

impl ProcessKind {
    pub fn digit_weights(self) -> &'static [u64; 10] {
        match self {
            ProcessKind::Dfp => &FACTORIALS,
            ProcessKind::Dpp => &SELF_POWERS,
        }
    }

    /// Every natural at or above this value is mapped strictly below itself.
    pub fn descent_threshold(self) -> u64 {
        match self {
            ProcessKind::Dfp => 10_000_000,
            ProcessKind::Dpp => 10_000_000_000,
        }
    }

    /// Largest digit count below the threshold; the exhaustive proof covers
    /// multisets of sizes `1..=multiset_depth`.
    pub fn multiset_depth(self) -> u32 {
        match self {
            ProcessKind::Dfp => 7,
            ProcessKind::Dpp => 10,
        }
    }

    /// Smallest digit count for which `(10^m - 1)/10 > m * w(9)`.
    pub fn descent_digits(self) -> u32 {
        match self {
            ProcessKind::Dfp => 8,
            ProcessKind::Dpp => 11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Dfp => "dfp",
            ProcessKind::Dpp => "dpp",
        }
    }

    /// Image of a value that fits a machine word.
    pub fn apply_u64(self, n: u64) -> u64 {
        let w = self.digit_weights();
        let mut sum = 0;
        let mut rest = n;
        loop {
            sum += w[(rest % 10) as usize];
            rest /= 10;
            if rest == 0 {
                return sum;
            }
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcessKind {
    type Err = DigitProcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfp" => Ok(ProcessKind::Dfp),
            "dpp" => Ok(ProcessKind::Dpp),
            other => Err(DigitProcError::UnknownProcess(other.to_string())),
        }
    }
}

/// Image of a decimal string of any length. Leading zeros contribute their
/// weight like any other digit (`0! = 0^0 = 1`).
pub fn apply(kind: ProcessKind, n: &str) -> Result<u64, DigitProcError> {
    let text = n.trim();
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DigitsError::Parse(n.to_string()).into());
    }
    let w = kind.digit_weights();
    Ok(text.bytes().map(|b| w[usize::from(b - b'0')]).sum())
}

pub fn apply_to_multiset(kind: ProcessKind, m: &DigitMultiset) -> Result<u64, DigitProcError> {
    if m.size() > kind.multiset_depth() {
        return Err(DigitProcError::MultisetTooLarge {
            kind,
            size: m.size(),
            depth: kind.multiset_depth(),
        });
    }
    let w = kind.digit_weights();
    Ok(m.iter().map(|(d, c)| u64::from(c) * w[d as usize]).sum())
}

/// Both sides of `(10^m - 1)/10 > m * w(9)`, scaled by 10 so they stay integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentBound {
    pub m: u32,
    /// `10^m - 1`
    pub lhs_scaled: BigUint,
    /// `10 * m * w(9)`
    pub rhs_scaled: BigUint,
}

impl DescentBound {
    pub fn holds(&self) -> bool {
        self.lhs_scaled > self.rhs_scaled
    }
}

pub fn descent_bound(kind: ProcessKind, m: u32) -> DescentBound {
    let lhs_scaled = BigUint::from(10u32).pow(m) - 1u32;
    let rhs_scaled = BigUint::from(kind.digit_weights()[9]) * m * 10u32;
    DescentBound { m, lhs_scaled, rhs_scaled }
}

/// Compares `(10^m - 1)/(m*c)` against `(10^(m+1) - 1)/((m+1)*c)` exactly; the
/// positive constant `c` cancels, leaving `(10^m - 1)(m+1)` vs `(10^(m+1) - 1)m`.
pub fn ratio_increases(m: u32) -> bool {
    let ten = BigUint::from(10u32);
    let a = (ten.pow(m) - 1u32) * (m + 1);
    let b = (ten.pow(m + 1) - 1u32) * m;
    a < b
}

fn compare_decimal(a: &str, b: &str) -> Ordering {
    let a = a.trim_start_matches('0');
    let b = b.trim_start_matches('0');
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// `apply(kind, n) < n` for `n` at or above the descent threshold; long
/// inputs are compared by length and then lexicographically.
pub fn check_descent(kind: ProcessKind, n: &str) -> Result<bool, DigitProcError> {
    let text = n.trim();
    digits::parse_decimal(text)?;
    let threshold = kind.descent_threshold().to_string();
    if compare_decimal(text, &threshold) == Ordering::Less {
        return Err(DigitProcError::PreconditionViolated {
            kind,
            threshold: kind.descent_threshold(),
            value: text.to_string(),
        });
    }
    let image = apply(kind, text)?.to_string();
    Ok(compare_decimal(&image, text) == Ordering::Less)
}

/// Largest image of any natural below `threshold`: every digit a nine, with as
/// many digits as `threshold - 1` has.
pub fn max_image_below(kind: ProcessKind, threshold: u64) -> u64 {
    let digits = (threshold.saturating_sub(1)).max(1).to_string().len() as u64;
    digits * kind.digit_weights()[9]
}

/// The trap property: naturals below `threshold` never map to `threshold` or above.
pub fn trap_holds(kind: ProcessKind, threshold: u64) -> bool {
    max_image_below(kind, threshold) < threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_tables() {
        for d in 0..10u64 {
            let fact: u64 = (1..=d).product();
            assert_eq!(FACTORIALS[d as usize], fact);
            let pow = if d == 0 { 1 } else { d.pow(d as u32) };
            assert_eq!(SELF_POWERS[d as usize], pow);
        }
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(ProcessKind::Dfp, "123").unwrap(), 9);
        assert_eq!(apply(ProcessKind::Dfp, "362880").unwrap(), 81369);
        assert_eq!(apply(ProcessKind::Dpp, "123").unwrap(), 32);
        assert_eq!(apply(ProcessKind::Dpp, "3435").unwrap(), 3435);
        assert_eq!(apply(ProcessKind::Dpp, "32").unwrap(), 31);
        assert_eq!(apply(ProcessKind::Dpp, "31").unwrap(), 28);
        assert!(apply(ProcessKind::Dfp, "12x").is_err());
        assert!(apply(ProcessKind::Dfp, "").is_err());
    }

    #[test]
    fn apply_accepts_huge_inputs() {
        let n = "9".repeat(1000);
        assert_eq!(apply(ProcessKind::Dfp, &n).unwrap(), 1000 * 362_880);
        assert_eq!(apply(ProcessKind::Dpp, &n).unwrap(), 1000 * 387_420_489);
    }

    #[test]
    fn multiset_examples() {
        let m = DigitMultiset::from_counts(&[(1, 1), (4, 1), (5, 1)]).unwrap();
        assert_eq!(apply_to_multiset(ProcessKind::Dfp, &m).unwrap(), 145);
        let m = DigitMultiset::from_counts(&[(1, 1)]).unwrap();
        assert_eq!(apply_to_multiset(ProcessKind::Dpp, &m).unwrap(), 1);
        let m = DigitMultiset::from_counts(&[(8, 1), (7, 1), (1, 1)]).unwrap();
        assert_eq!(apply_to_multiset(ProcessKind::Dfp, &m).unwrap(), 45361);
        let m = DigitMultiset::from_counts(&[(9, 8)]).unwrap();
        assert!(matches!(
            apply_to_multiset(ProcessKind::Dfp, &m),
            Err(DigitProcError::MultisetTooLarge { size: 8, depth: 7, .. })
        ));
    }

    #[test]
    fn descent_bound_examples() {
        assert!(descent_bound(ProcessKind::Dfp, 8).holds());
        assert!(descent_bound(ProcessKind::Dpp, 11).holds());
        assert!(!descent_bound(ProcessKind::Dfp, 7).holds());
        assert!(!descent_bound(ProcessKind::Dpp, 10).holds());
        for kind in [ProcessKind::Dfp, ProcessKind::Dpp] {
            let first = (1..60).find(|&m| descent_bound(kind, m).holds()).unwrap();
            assert_eq!(first, kind.descent_digits());
            assert!((first..80).all(|m| descent_bound(kind, m).holds()));
        }
    }

    #[test]
    fn check_descent_examples() {
        assert!(check_descent(ProcessKind::Dfp, "10000000").unwrap());
        assert!(check_descent(ProcessKind::Dfp, "99999999").unwrap());
        assert!(check_descent(ProcessKind::Dpp, "10000000000").unwrap());
        assert!(check_descent(ProcessKind::Dpp, &"9".repeat(40)).unwrap());
        assert!(matches!(
            check_descent(ProcessKind::Dfp, "9999999"),
            Err(DigitProcError::PreconditionViolated { .. })
        ));
        assert!(matches!(
            check_descent(ProcessKind::Dpp, "0009999999999"),
            Err(DigitProcError::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn trap_examples() {
        assert_eq!(max_image_below(ProcessKind::Dfp, 10_000_000), 7 * 362_880);
        assert_eq!(max_image_below(ProcessKind::Dpp, 10_000_000_000), 3_874_204_890);
        assert!(trap_holds(ProcessKind::Dfp, 10_000_000));
        assert!(trap_holds(ProcessKind::Dpp, 10_000_000_000));
        assert!(!trap_holds(ProcessKind::Dfp, 1_000));
    }

    #[test]
    fn ratio_monotone() {
        assert!((2..=40).all(ratio_increases));
    }

    #[test]
    fn kind_parses() {
        assert_eq!("dfp".parse::<ProcessKind>().unwrap(), ProcessKind::Dfp);
        assert!("dxp".parse::<ProcessKind>().is_err());
    }
}
