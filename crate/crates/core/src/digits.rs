//! Fixed-length base-b digit strings and the digit multisets used to shrink
//! exhaustive searches.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitsError {
    #[error("not a decimal natural number: {0:?}")]
    Parse(String),
    #[error("value {value} does not fit in {length} base-{base} digits")]
    ValueTooLarge { value: String, base: u32, length: usize },
    #[error("invalid base {0}; must be at least 2")]
    InvalidBase(u32),
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u32 },
    #[error("digit strings must have at least one digit")]
    Empty,
}

/// A base-b digit string, most-significant digit first. Leading zeros are
/// part of the value's identity: `0101` and `101` are different `Digits`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digits {
    base: u32,
    digits: Vec<u32>,
}

impl Digits {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self, DigitsError> {
        if base < 2 {
            return Err(DigitsError::InvalidBase(base));
        }
        if digits.is_empty() {
            return Err(DigitsError::Empty);
        }
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(DigitsError::DigitOutOfRange { digit, base });
        }
        Ok(Self { base, digits })
    }

    /// Digits of `value`, zero-padded to `length` when given, otherwise the
    /// minimal representation (one digit for zero).
    pub fn from_value(value: u64, base: u32, length: Option<usize>) -> Result<Self, DigitsError> {
        if base < 2 {
            return Err(DigitsError::InvalidBase(base));
        }
        let mut digits = Vec::new();
        let mut rest = value;
        let b = u64::from(base);
        while rest > 0 {
            digits.push((rest % b) as u32);
            rest /= b;
        }
        Self::finish(digits, base, length, || value.to_string())
    }

    // `little_endian` holds the significant digits least-significant first.
    fn finish(
        mut little_endian: Vec<u32>,
        base: u32,
        length: Option<usize>,
        describe: impl FnOnce() -> String,
    ) -> Result<Self, DigitsError> {
        let target = match length {
            Some(0) => return Err(DigitsError::Empty),
            Some(len) if little_endian.len() > len => {
                return Err(DigitsError::ValueTooLarge { value: describe(), base, length: len });
            }
            Some(len) => len,
            None => little_endian.len().max(1),
        };
        little_endian.resize(target, 0);
        little_endian.reverse();
        Ok(Self { base, digits: little_endian })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.digits
    }

    /// Place-value composition. `None` only when the value exceeds 128 bits.
    pub fn value(&self) -> Option<u128> {
        compose_slice(&self.digits, self.base)
    }

    /// Digit counts indexed by digit value (length `base`).
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.base as usize];
        for &d in &self.digits {
            counts[d as usize] += 1;
        }
        counts
    }
}

impl fmt::Display for Digits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            match char::from_digit(d, 36) {
                Some(c) if self.base <= 36 => write!(f, "{c}")?,
                _ => write!(f, "[{d}]")?,
            }
        }
        Ok(())
    }
}

/// Decomposes a decimal string into base `base`, optionally padding to
/// `pad_length`. The input may be arbitrarily long.
pub fn decompose(n: &str, base: u32, pad_length: Option<usize>) -> Result<Digits, DigitsError> {
    if base < 2 {
        return Err(DigitsError::InvalidBase(base));
    }
    let decimal = parse_decimal(n)?;
    let little_endian = if base == 10 {
        decimal.iter().rev().copied().collect()
    } else {
        convert_from_decimal(decimal, base)
    };
    Digits::finish(little_endian, base, pad_length, || n.trim().to_string())
}

/// Inverse of [`decompose`] for in-range values.
pub fn compose(d: &Digits) -> Option<u128> {
    d.value()
}

pub(crate) fn compose_slice(digits: &[u32], base: u32) -> Option<u128> {
    digits.iter().try_fold(0u128, |acc, &d| {
        acc.checked_mul(u128::from(base))?.checked_add(u128::from(d))
    })
}

/// Significant decimal digits of `n`, most-significant first; empty for zero.
pub(crate) fn parse_decimal(n: &str) -> Result<Vec<u32>, DigitsError> {
    let text = n.trim();
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DigitsError::Parse(n.to_string()));
    }
    Ok(text.trim_start_matches('0').bytes().map(|b| u32::from(b - b'0')).collect())
}

// Schoolbook repeated division of a decimal digit vector; returns remainders
// least-significant first.
fn convert_from_decimal(mut decimal: Vec<u32>, base: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while !decimal.is_empty() {
        let mut quotient = Vec::with_capacity(decimal.len());
        let mut rem = 0u64;
        for &d in &decimal {
            let cur = rem * 10 + u64::from(d);
            let q = cur / u64::from(base);
            rem = cur % u64::from(base);
            if !(quotient.is_empty() && q == 0) {
                quotient.push(q as u32);
            }
        }
        out.push(rem as u32);
        decimal = quotient;
    }
    out
}

/// Counts of decimal digit values with 0 folded into 1. Both `dfp` and `dpp`
/// give 0 and 1 the same weight, so the fold loses nothing for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitMultiset {
    // counts[i] is the multiplicity of digit value i + 1
    counts: [u32; 9],
}

impl DigitMultiset {
    /// Builds from `(digit, count)` pairs over `0..=9`; zeros are merged into ones.
    pub fn from_counts(pairs: &[(u32, u32)]) -> Result<Self, DigitsError> {
        let mut counts = [0u32; 9];
        for &(digit, count) in pairs {
            if digit > 9 {
                return Err(DigitsError::DigitOutOfRange { digit, base: 10 });
            }
            counts[digit.max(1) as usize - 1] += count;
        }
        let m = Self { counts };
        if m.size() == 0 {
            return Err(DigitsError::Empty);
        }
        Ok(m)
    }

    /// The normalized multiset of the decimal digits of `n` (as written,
    /// leading zeros included).
    pub fn from_decimal(n: &str) -> Result<Self, DigitsError> {
        let text = n.trim();
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(DigitsError::Parse(n.to_string()));
        }
        let mut counts = [0u32; 9];
        for b in text.bytes() {
            counts[usize::from(b - b'0').max(1) - 1] += 1;
        }
        Ok(Self { counts })
    }

    pub fn from_value(n: u64) -> Self {
        let mut counts = [0u32; 9];
        let mut rest = n;
        loop {
            counts[((rest % 10) as usize).max(1) - 1] += 1;
            rest /= 10;
            if rest == 0 {
                break;
            }
        }
        Self { counts }
    }

    fn from_sorted(seq: &[u8]) -> Self {
        let mut counts = [0u32; 9];
        for &d in seq {
            counts[usize::from(d) - 1] += 1;
        }
        Self { counts }
    }

    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Multiplicity of `digit` (0 reports the merged count of 1).
    pub fn count(&self, digit: u32) -> u32 {
        match digit {
            0..=9 => self.counts[digit.max(1) as usize - 1],
            _ => 0,
        }
    }

    /// `(digit, count)` pairs with nonzero count, ascending by digit.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32 + 1, c))
    }

    /// Digits in ascending order, as decimal text: the smallest natural with
    /// this normalized multiset.
    pub fn min_representative(&self) -> String {
        self.iter()
            .flat_map(|(d, c)| std::iter::repeat_n(char::from(b'0' + d as u8), c as usize))
            .collect()
    }

    /// Numeric form of [`Self::min_representative`]; `None` beyond 128 bits.
    pub fn min_value(&self) -> Option<u128> {
        self.iter()
            .flat_map(|(d, c)| std::iter::repeat_n(d, c as usize))
            .try_fold(0u128, |acc, d| acc.checked_mul(10)?.checked_add(u128::from(d)))
    }
}

impl fmt::Display for DigitMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}:{c}")?;
        }
        write!(f, "}}")
    }
}

/// Stream of every size-`r` multiset over `{1,…,9}`, in lexicographic order
/// of the nondecreasing digit sequence (`11…1`, `11…12`, …, `99…9`).
#[derive(Debug, Clone)]
pub struct Multisets {
    current: Option<Vec<u8>>,
}

impl Iterator for Multisets {
    type Item = DigitMultiset;

    fn next(&mut self) -> Option<DigitMultiset> {
        let seq = self.current.as_mut()?;
        let out = DigitMultiset::from_sorted(seq);
        match seq.iter().rposition(|&d| d < 9) {
            Some(pos) => {
                let bumped = seq[pos] + 1;
                seq[pos..].iter_mut().for_each(|d| *d = bumped);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

pub fn enumerate_multisets(r: usize) -> Multisets {
    Multisets { current: (r > 0).then(|| vec![1u8; r]) }
}

/// All multisets of sizes `1..=r_max`, size-major.
pub fn enumerate_multisets_upto(r_max: usize) -> impl Iterator<Item = DigitMultiset> {
    (1..=r_max).flat_map(enumerate_multisets)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Number of digit multisets of sizes `1..=r_max` over a nine-letter alphabet.
pub fn multiset_count(r_max: u64) -> u128 {
    (1..=r_max).map(|r| binomial(r + 8, r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose("6174", 10, Some(4)).unwrap().as_slice(), &[6, 1, 7, 4]);
        assert_eq!(decompose("5", 2, Some(4)).unwrap().as_slice(), &[0, 1, 0, 1]);
        assert_eq!(decompose("0", 10, Some(3)).unwrap().as_slice(), &[0, 0, 0]);
        assert_eq!(decompose("0", 10, None).unwrap().as_slice(), &[0]);
        assert_eq!(decompose("000255", 16, None).unwrap().as_slice(), &[15, 15]);
    }

    #[test]
    fn decompose_errors() {
        assert!(matches!(decompose("12a", 10, None), Err(DigitsError::Parse(_))));
        assert!(matches!(decompose("", 10, None), Err(DigitsError::Parse(_))));
        assert!(matches!(decompose("-3", 10, None), Err(DigitsError::Parse(_))));
        assert!(matches!(
            decompose("16", 2, Some(4)),
            Err(DigitsError::ValueTooLarge { length: 4, .. })
        ));
        assert!(matches!(decompose("16", 1, None), Err(DigitsError::InvalidBase(1))));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(Digits::new(2, vec![0, 1, 0, 1]).unwrap().value(), Some(5));
        assert_eq!(Digits::new(10, vec![4, 3, 2, 1]).unwrap().value(), Some(4321));
        assert_eq!(Digits::new(10, vec![0, 0, 0]).unwrap().value(), Some(0));
        assert!(Digits::new(10, vec![10]).is_err());
    }

    #[test]
    fn huge_decimal_input_converts() {
        let text = "1".repeat(60);
        let d = decompose(&text, 10, None).unwrap();
        assert_eq!(d.len(), 60);
        assert_eq!(d.value(), None);
        // 2^100
        let d = decompose("1267650600228229401496703205376", 2, None).unwrap();
        assert_eq!(d.len(), 101);
        assert_eq!(d.as_slice()[0], 1);
        assert!(d.as_slice()[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn multiset_counts_match_pascal() {
        // Pascal triangle, independent of the multiplicative binomial.
        let mut row = vec![1u128];
        let mut pascal = vec![row.clone()];
        for _ in 0..20 {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            pascal.push(next.clone());
            row = next;
        }
        for r in 1..=10usize {
            let n = enumerate_multisets(r).count() as u128;
            assert_eq!(n, pascal[r + 8][r], "r = {r}");
        }
        assert_eq!(enumerate_multisets(1).count(), 9);
        assert_eq!(enumerate_multisets(2).count(), 45);
        assert_eq!(enumerate_multisets(7).count(), 6435);
        assert_eq!(enumerate_multisets(0).count(), 0);
    }

    #[test]
    fn pairs_match_brute_force() {
        let mut brute = Vec::new();
        for a in 1..=9u32 {
            for b in a..=9u32 {
                brute.push(DigitMultiset::from_counts(&[(a, 1), (b, 1)]).unwrap());
            }
        }
        let listed: Vec<_> = enumerate_multisets(2).collect();
        assert_eq!(listed, brute);
    }

    #[test]
    fn multiset_count_examples() {
        assert_eq!(multiset_count(1), 9);
        assert_eq!(multiset_count(7), 11439);
        assert_eq!(multiset_count(10), 92377);
    }

    #[test]
    fn min_value_examples() {
        let m = DigitMultiset::from_counts(&[(1, 1), (2, 1), (3, 1)]).unwrap();
        assert_eq!(m.min_value(), Some(123));
        let m = DigitMultiset::from_counts(&[(9, 2), (1, 1)]).unwrap();
        assert_eq!(m.min_value(), Some(199));
        let m = DigitMultiset::from_counts(&[(4, 1), (5, 1), (1, 1)]).unwrap();
        assert_eq!(m.min_value(), Some(145));
        assert_eq!(m.min_representative(), "145");
        assert_eq!(m.to_string(), "{1:1, 4:1, 5:1}");
    }

    #[test]
    fn zero_merges_into_one() {
        let m = DigitMultiset::from_decimal("40585").unwrap();
        assert_eq!(m.count(0), 1);
        assert_eq!(m.count(1), 1);
        assert_eq!(m, DigitMultiset::from_value(40585));
        assert_eq!(m.min_value(), Some(14558));
        assert!(DigitMultiset::from_counts(&[(0, 0)]).is_err());
    }

    #[test]
    fn enumeration_is_strictly_increasing() {
        let seqs: Vec<String> = enumerate_multisets(4).map(|m| m.min_representative()).collect();
        assert!(seqs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(seqs.first().map(String::as_str), Some("1111"));
        assert_eq!(seqs.last().map(String::as_str), Some("9999"));
    }

    proptest! {
        #[test]
        fn round_trip(base in 2u32..=36, length in 1usize..=12, seed in any::<u64>()) {
            let cap = (base as u128).pow(length as u32);
            let n = (seed as u128 % cap) as u64;
            let d = decompose(&n.to_string(), base, Some(length)).unwrap();
            prop_assert_eq!(d.len(), length);
            prop_assert_eq!(d.value(), Some(n as u128));
            prop_assert_eq!(Digits::from_value(n, base, Some(length)).unwrap(), d);
        }
    }
}
