//! Binary sequences with 1-based positions, indicator vectors, deletions and
//! small-scale deletion/insertion balls.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest input the enumerative helpers accept without an explicit override.
pub const ENUMERATION_LIMIT: usize = 24;

/// Controls whether ball enumeration enforces [`ENUMERATION_LIMIT`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Enumeration {
    #[default]
    Guarded,
    Unbounded,
}

/// An ordered binary sequence. Positions in the public API are 1-based.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSeq {
    bits: Vec<u8>,
}

impl BitSeq {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("symbol {} at position {} is not binary", bits[pos], pos + 1)));
        }
        Ok(BitSeq { bits })
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitSeq { bits }
    }

    pub fn zeros(len: usize) -> Self {
        BitSeq { bits: vec![0; len] }
    }

    pub fn ones(len: usize) -> Self {
        BitSeq { bits: vec![1; len] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitSeq { bits: bits.iter().map(|&b| b as u8).collect() }
    }

    /// The sequence whose bits are the binary digits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let bits = (0..width).rev().map(|k| if k < 64 { ((value >> k) & 1) as u8 } else { 0 }).collect();
        BitSeq { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based position `pos`. Panics when out of range.
    pub fn bit(&self, pos: usize) -> u8 {
        assert!(pos >= 1 && pos <= self.bits.len(), "position {pos} out of range 1..={}", self.bits.len());
        self.bits[pos - 1]
    }

    pub fn get(&self, pos: usize) -> Option<u8> {
        if pos == 0 {
            None
        } else {
            self.bits.get(pos - 1).copied()
        }
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn complement(&self) -> Self {
        BitSeq { bits: self.bits.iter().map(|&b| 1 - b).collect() }
    }

    pub fn is_constant(&self) -> bool {
        self.bits.windows(2).all(|w| w[0] == w[1])
    }

    pub fn has_adjacent_ones(&self) -> bool {
        self.bits.windows(2).any(|w| w[0] == 1 && w[1] == 1)
    }

    /// Positions `from..=to` (1-based). An empty range (`to + 1 == from`) is allowed.
    pub fn window(&self, from: usize, to: usize) -> Result<Self> {
        if from == 0 || to > self.len() || from > to + 1 {
            return Err(Error::invalid(format!("window {from}..={to} outside 1..={}", self.len())));
        }
        Ok(BitSeq { bits: self.bits[from - 1..to].to_vec() })
    }

    pub fn concat(&self, other: &BitSeq) -> Self {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitSeq { bits }
    }

    /// Reads the sequence as an unsigned big-endian integer.
    pub fn to_uint(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::invalid(format!("{} bits do not fit in 64", self.len())));
        }
        Ok(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    /// Inserts `bit` so that it ends up at 1-based position `pos`.
    pub fn inserted(&self, pos: usize, bit: u8) -> Result<Self> {
        if pos == 0 || pos > self.len() + 1 || bit > 1 {
            return Err(Error::invalid(format!("cannot insert {bit} at position {pos} of {}", self.len())));
        }
        let mut bits = self.bits.clone();
        bits.insert(pos - 1, bit);
        Ok(BitSeq { bits })
    }

    /// All sequences of length `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitSeq> {
        assert!(len < 64);
        (0u64..(1u64 << len)).map(move |v| BitSeq::from_uint(v, len))
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({self})")
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = Vec::with_capacity(s.len());
        for (k, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::invalid(format!("character {other:?} at position {} is not 0 or 1", k + 1)))
                }
            }
        }
        Ok(BitSeq { bits })
    }
}

impl Serialize for BitSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<BitSeq> for Vec<u8> {
    fn from(value: BitSeq) -> Self {
        value.bits
    }
}

fn pair_indicator(c: &BitSeq, a: u8, b: u8) -> Result<BitSeq> {
    if c.len() < 2 {
        return Err(Error::invalid(format!("indicator needs length >= 2, got {}", c.len())));
    }
    Ok(BitSeq::from_raw(pair_indicator_raw(&c.bits, a, b)))
}

pub(crate) fn pair_indicator_raw(bits: &[u8], a: u8, b: u8) -> Vec<u8> {
    bits.windows(2).map(|w| (w[0] == a && w[1] == b) as u8).collect()
}

/// Marks each position `t` with `c_t = 1, c_{t+1} = 0`.
pub fn indicator10(c: &BitSeq) -> Result<BitSeq> {
    pair_indicator(c, 1, 0)
}

/// Marks each position `t` with `c_t = 0, c_{t+1} = 1`.
pub fn indicator01(c: &BitSeq) -> Result<BitSeq> {
    pair_indicator(c, 0, 1)
}

/// Removes the bits at the given distinct 1-based positions.
pub fn delete_at(c: &BitSeq, positions: &[usize]) -> Result<BitSeq> {
    let mut drop = vec![false; c.len()];
    for &p in positions {
        if p == 0 || p > c.len() {
            return Err(Error::invalid(format!("deletion position {p} outside 1..={}", c.len())));
        }
        if drop[p - 1] {
            return Err(Error::invalid(format!("deletion position {p} repeated")));
        }
        drop[p - 1] = true;
    }
    let bits = c.bits.iter().zip(&drop).filter(|(_, &d)| !d).map(|(&b, _)| b).collect();
    Ok(BitSeq::from_raw(bits))
}

/// Greedy left-to-right embedding test.
pub fn is_subsequence(d: &BitSeq, c: &BitSeq) -> bool {
    is_subsequence_raw(&d.bits, &c.bits)
}

pub(crate) fn is_subsequence_raw(d: &[u8], c: &[u8]) -> bool {
    let mut it = c.iter();
    d.iter().all(|b| it.any(|x| x == b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunDecomposition {
    pub first_symbol: u8,
    pub run_lengths: Vec<usize>,
}

impl RunDecomposition {
    pub fn reconstruct(&self) -> BitSeq {
        let mut bits = Vec::with_capacity(self.run_lengths.iter().sum());
        let mut sym = self.first_symbol;
        for &len in &self.run_lengths {
            bits.extend(std::iter::repeat_n(sym, len));
            sym = 1 - sym;
        }
        BitSeq::from_raw(bits)
    }
}

pub fn runs(c: &BitSeq) -> Result<RunDecomposition> {
    if c.is_empty() {
        return Err(Error::invalid("run decomposition of an empty sequence"));
    }
    let mut run_lengths = vec![1usize];
    for w in c.bits.windows(2) {
        if w[0] == w[1] {
            *run_lengths.last_mut().unwrap() += 1;
        } else {
            run_lengths.push(1);
        }
    }
    Ok(RunDecomposition { first_symbol: c.bits[0], run_lengths })
}

fn guard(len: usize, mode: Enumeration) -> Result<()> {
    if mode == Enumeration::Guarded && len > ENUMERATION_LIMIT {
        return Err(Error::invalid(format!(
            "enumeration over length {len} exceeds the limit of {ENUMERATION_LIMIT}; use Enumeration::Unbounded"
        )));
    }
    Ok(())
}

/// All distinct subsequences of `c` of length `len(c) - k`.
pub fn subsequence_ball(c: &BitSeq, k: usize) -> Result<BTreeSet<BitSeq>> {
    subsequence_ball_with(c, k, Enumeration::Guarded)
}

pub fn subsequence_ball_with(c: &BitSeq, k: usize, mode: Enumeration) -> Result<BTreeSet<BitSeq>> {
    if k > c.len() {
        return Err(Error::invalid(format!("cannot delete {k} bits from {}", c.len())));
    }
    guard(c.len(), mode)?;
    let mut level = BTreeSet::from([c.clone()]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for s in &level {
            // deleting any bit of a run gives the same result; use the run's first bit
            for t in 0..s.len() {
                if t > 0 && s.bits[t] == s.bits[t - 1] {
                    continue;
                }
                let mut bits = s.bits.clone();
                bits.remove(t);
                next.insert(BitSeq::from_raw(bits));
            }
        }
        level = next;
    }
    Ok(level)
}

/// Whether `c` and `c2` share a common subsequence of length `len - k`.
pub fn in_deletion_ball(c: &BitSeq, c2: &BitSeq, k: usize) -> Result<bool> {
    if c.len() != c2.len() {
        return Err(Error::invalid(format!("length mismatch {} vs {}", c.len(), c2.len())));
    }
    if c == c2 {
        return Ok(k <= c.len());
    }
    let a = subsequence_ball(c, k)?;
    let b = subsequence_ball(c2, k)?;
    Ok(a.iter().any(|s| b.contains(s)))
}

/// All distinct supersequences of `d` of length `len(d) + k`.
pub fn insertion_ball(d: &BitSeq, k: usize) -> Result<BTreeSet<BitSeq>> {
    insertion_ball_with(d, k, Enumeration::Guarded)
}

pub fn insertion_ball_with(d: &BitSeq, k: usize, mode: Enumeration) -> Result<BTreeSet<BitSeq>> {
    guard(d.len() + k, mode)?;
    let mut level = BTreeSet::from([d.clone()]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for s in &level {
            for gap in 0..=s.len() {
                for bit in 0..2u8 {
                    // inserting a copy of the left neighbour duplicates an earlier gap
                    if gap > 0 && s.bits[gap - 1] == bit {
                        continue;
                    }
                    let mut bits = s.bits.clone();
                    bits.insert(gap, bit);
                    next.insert(BitSeq::from_raw(bits));
                }
            }
        }
        level = next;
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<BitSeq> {
        items.iter().map(|s| b(s)).collect()
    }

    #[test]
    fn indicators() {
        assert_eq!(indicator10(&b("11001010")).unwrap(), b("0100101"));
        assert_eq!(indicator10(&b("0000")).unwrap(), b("000"));
        assert_eq!(indicator10(&b("1010")).unwrap(), b("101"));
        assert_eq!(indicator01(&b("11001010")).unwrap(), b("0001010"));
        assert_eq!(indicator01(&b("111")).unwrap(), b("00"));
        assert_eq!(indicator01(&b("0101")).unwrap(), b("101"));
        assert!(indicator10(&b("1")).is_err());
    }

    #[test]
    fn deletions() {
        assert_eq!(delete_at(&b("11001010"), &[1, 6]).unwrap(), b("100110"));
        assert_eq!(delete_at(&b("101"), &[]).unwrap(), b("101"));
        assert_eq!(delete_at(&b("0110"), &[2, 3]).unwrap(), b("00"));
        assert!(delete_at(&b("0110"), &[5]).is_err());
        assert!(delete_at(&b("0110"), &[2, 2]).is_err());
    }

    #[test]
    fn subsequences() {
        assert!(is_subsequence(&b("100110"), &b("11001010")));
        assert!(is_subsequence(&b(""), &b("0110")));
        assert!(!is_subsequence(&b("111"), &b("1010")));
    }

    #[test]
    fn run_decomposition() {
        let r = runs(&b("11001010")).unwrap();
        assert_eq!(r.first_symbol, 1);
        assert_eq!(r.run_lengths, vec![2, 2, 1, 1, 1, 1]);
        assert_eq!(runs(&b("000")).unwrap().run_lengths, vec![3]);
        assert_eq!(runs(&b("10")).unwrap().run_lengths, vec![1, 1]);
        assert!(runs(&b("")).is_err());
    }

    #[test]
    fn balls() {
        assert_eq!(subsequence_ball(&b("10"), 1).unwrap(), set(&["1", "0"]));
        assert_eq!(subsequence_ball(&b("000"), 1).unwrap(), set(&["00"]));
        assert_eq!(subsequence_ball(&b("101"), 2).unwrap(), set(&["1", "0"]));
        assert!(subsequence_ball(&b("10"), 3).is_err());
        assert_eq!(insertion_ball(&b("1"), 1).unwrap(), set(&["11", "01", "10"]));
        assert_eq!(insertion_ball(&b(""), 1).unwrap(), set(&["0", "1"]));
        assert_eq!(insertion_ball(&b("00"), 1).unwrap(), set(&["000", "100", "010", "001"]));
        assert!(!in_deletion_ball(&b("0000"), &b("1111"), 2).unwrap());
        assert!(in_deletion_ball(&b("11001010"), &b("10011010"), 2).unwrap());
        assert!(in_deletion_ball(&b("0110"), &b("0110"), 3).unwrap());
        assert!(in_deletion_ball(&b("01"), &b("011"), 1).is_err());
    }

    #[test]
    fn enumeration_guard() {
        let long = BitSeq::zeros(ENUMERATION_LIMIT + 1);
        assert!(subsequence_ball(&long, 1).is_err());
        assert_eq!(subsequence_ball_with(&long, 1, Enumeration::Unbounded).unwrap().len(), 1);
        assert!(insertion_ball(&BitSeq::zeros(ENUMERATION_LIMIT), 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(b("0110").to_string(), "0110");
        assert!("01a".parse::<BitSeq>().is_err());
        assert_eq!(BitSeq::from_uint(14, 6), b("001110"));
        assert_eq!(b("001110").to_uint().unwrap(), 14);
    }

    #[test]
    fn single_deletion_indicator_correspondence() {
        for n in 2..=14 {
            for c in BitSeq::all_of_length(n) {
                let i10 = indicator10(&c).unwrap();
                let i01 = indicator01(&c).unwrap();
                for pos in 1..=n {
                    let d = delete_at(&c, &[pos]).unwrap();
                    if d.len() < 2 {
                        continue;
                    }
                    let ball10 = subsequence_ball_with(&i10, 1, Enumeration::Unbounded).unwrap();
                    let ball01 = subsequence_ball_with(&i01, 1, Enumeration::Unbounded).unwrap();
                    assert!(ball10.contains(&indicator10(&d).unwrap()), "{c} minus {pos}");
                    assert!(ball01.contains(&indicator01(&d).unwrap()), "{c} minus {pos}");
                }
            }
        }
    }

    #[test]
    fn runs_reconstruct_exhaustive() {
        for n in 1..=14 {
            for c in BitSeq::all_of_length(n) {
                assert_eq!(runs(&c).unwrap().reconstruct(), c);
            }
        }
    }

    #[test]
    fn greedy_matches_ball_membership() {
        for n in 0..=10 {
            for c in BitSeq::all_of_length(n) {
                for k in 0..=n.min(3) {
                    let ball = subsequence_ball(&c, k).unwrap();
                    for d in BitSeq::all_of_length(n - k) {
                        assert_eq!(is_subsequence(&d, &c), ball.contains(&d));
                    }
                }
            }
        }
    }

    fn arb_bits(max: usize) -> impl Strategy<Value = BitSeq> {
        prop::collection::vec(0u8..2, 0..max).prop_map(BitSeq::from_raw)
    }

    proptest! {
        #[test]
        fn indicators_never_have_adjacent_ones(c in arb_bits(64)) {
            prop_assume!(c.len() >= 2);
            prop_assert!(!indicator10(&c).unwrap().has_adjacent_ones());
            prop_assert!(!indicator01(&c).unwrap().has_adjacent_ones());
        }

        #[test]
        fn insertion_ball_members_contain_source(d in arb_bits(8), k in 0usize..3) {
            for s in insertion_ball(&d, k).unwrap() {
                prop_assert_eq!(s.len(), d.len() + k);
                prop_assert!(is_subsequence(&d, &s));
            }
        }
    }
}
