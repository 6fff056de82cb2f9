//! Moment vectors, the boundary form `g`, the f/h syndromes and the VT code.

use serde::{Deserialize, Serialize};

use crate::bitseq::{pair_indicator_raw, BitSeq};
use crate::error::{Error, Result, Stage};

/// Longest sequence the syndromes accept; keeps `m^3` inside 64 bits.
pub const MAX_SYNDROME_LEN: usize = 1 << 21;

/// `k^e` for `e` in 0..=2.
#[inline]
pub(crate) fn power(k: usize, e: usize) -> i128 {
    let k = k as i128;
    match e {
        0 => 1,
        1 => k,
        _ => k * k,
    }
}

/// Entry `i` (1-based) of the order-`e` moment vector; entry 0 is 0.
#[inline]
pub(crate) fn moment_entry(e: usize, i: usize) -> i128 {
    let i = i as u64;
    match e {
        0 => i as i128,
        1 => {
            let (a, b) = if i.is_multiple_of(2) { (i / 2, i + 1) } else { (i, i.div_ceil(2)) };
            a as i128 * b as i128
        }
        _ => {
            let (mut a, mut b, mut c) = (i, i + 1, 2 * i + 1);
            if a % 2 == 0 {
                a /= 2;
            } else {
                b /= 2;
            }
            match i % 3 {
                0 => a /= 3,
                1 => c /= 3,
                _ => b /= 3,
            }
            a as i128 * b as i128 * c as i128
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentVector {
    order: usize,
    entries: Vec<u64>,
}

impl MomentVector {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn to_i128(&self) -> Vec<i128> {
        self.entries.iter().map(|&v| v as i128).collect()
    }
}

/// Prefix sums of `t^e`: `(1..=m)` for order 0, triangular numbers for 1, square pyramidal for 2.
pub fn moment(e: usize, m: usize) -> Result<MomentVector> {
    if e > 2 {
        return Err(Error::invalid(format!("moment order {e} not in 0..=2")));
    }
    if m == 0 || m > MAX_SYNDROME_LEN {
        return Err(Error::invalid(format!("moment length {m} out of range")));
    }
    let entries = (1..=m).map(|i| moment_entry(e, i) as u64).collect();
    Ok(MomentVector { order: e, entries })
}

/// `g_v(r, x) = x_1 v_r - x_s v_{r+s-2} + sum_{t=2}^{s-1} x_t (v_{t+r-1} - v_{t+r-2})`.
///
/// `v` is 1-based in the formula; a single-bit `x` gives 0.
pub fn g_eval(v: &[i128], r: usize, x: &BitSeq) -> Result<i128> {
    let s = x.len();
    if s == 0 || r == 0 || r + s - 2 > v.len() || (s >= 2 && r + s - 2 == 0) {
        return Err(Error::invalid(format!("g with r={r}, s={s} exceeds vector length {}", v.len())));
    }
    Ok(g_raw(v, r, x.as_slice()))
}

/// Unchecked form of [`g_eval`] over a raw bit slice.
pub(crate) fn g_raw(v: &[i128], r: usize, x: &[u8]) -> i128 {
    let s = x.len();
    if s < 2 {
        return 0;
    }
    let at = |idx: usize| v[idx - 1];
    let mut total = x[0] as i128 * at(r) - x[s - 1] as i128 * at(r + s - 2);
    for t in 2..s {
        if x[t - 1] == 1 {
            total += at(t + r - 1) - at(t + r - 2);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndromeF {
    pub m: usize,
    pub f: [u64; 3],
}

impl SyndromeF {
    pub fn new(m: usize, f: [u64; 3]) -> Result<Self> {
        let s = SyndromeF { m, f };
        check_len(m)?;
        for (e, (&r, q)) in f.iter().zip(s.moduli()).enumerate() {
            if r >= q {
                return Err(Error::invalid(format!("f_{e}={r} not below modulus {q}")));
            }
        }
        Ok(s)
    }

    /// `(2m, m^2, m^3)`.
    pub fn moduli(&self) -> [u64; 3] {
        f_moduli(self.m)
    }
}

pub fn f_moduli(m: usize) -> [u64; 3] {
    let m = m as u64;
    [2 * m, m * m, m * m * m]
}

pub fn h_moduli(m: usize) -> [u64; 2] {
    [3, 2 * m as u64]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndromeH {
    pub m: usize,
    pub h: [u64; 2],
}

impl SyndromeH {
    pub fn new(m: usize, h: [u64; 2]) -> Result<Self> {
        let s = SyndromeH { m, h };
        check_len(m)?;
        for (e, (&r, q)) in h.iter().zip(s.moduli()).enumerate() {
            if r >= q {
                return Err(Error::invalid(format!("h_{e}={r} not below modulus {q}")));
            }
        }
        Ok(s)
    }

    /// `(3, 2m)`.
    pub fn moduli(&self) -> [u64; 2] {
        h_moduli(self.m)
    }
}

/// JSON form `{"m": .., "f": [..], "h": [..]}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub m: usize,
    pub f: [u64; 3],
    pub h: [u64; 2],
}

impl SyndromeRecord {
    pub fn of(c: &BitSeq) -> Result<Self> {
        let f = f_syndrome(c)?;
        let h = h_syndrome(c)?;
        Ok(SyndromeRecord { m: c.len(), f: f.f, h: h.h })
    }
}

fn check_len(m: usize) -> Result<()> {
    if !(3..=MAX_SYNDROME_LEN).contains(&m) {
        return Err(Error::invalid(format!("syndrome length {m} outside 3..={MAX_SYNDROME_LEN}")));
    }
    Ok(())
}

/// Exact weighted sums `sum_t ind_t * moment_e(t)` for e = 0, 1, 2.
pub(crate) fn weighted_sums(ind: &[u8]) -> [i128; 3] {
    let mut acc = [0u128; 3];
    let (mut m1, mut m2) = (0u128, 0u128);
    for (k, &b) in ind.iter().enumerate() {
        let t = k as u128 + 1;
        m1 += t;
        m2 += t * t;
        if b == 1 {
            acc[0] += t;
            acc[1] += m1;
            acc[2] += m2;
        }
    }
    acc.map(|v| v as i128)
}

pub(crate) fn reduce(value: i128, modulus: u64) -> u64 {
    value.rem_euclid(modulus as i128) as u64
}

pub fn f_syndrome(c: &BitSeq) -> Result<SyndromeF> {
    check_len(c.len())?;
    let sums = weighted_sums(&pair_indicator_raw(c.as_slice(), 1, 0));
    let q = f_moduli(c.len());
    Ok(SyndromeF { m: c.len(), f: [reduce(sums[0], q[0]), reduce(sums[1], q[1]), reduce(sums[2], q[2])] })
}

pub fn h_syndrome(c: &BitSeq) -> Result<SyndromeH> {
    check_len(c.len())?;
    let ind = pair_indicator_raw(c.as_slice(), 0, 1);
    let count = ind.iter().filter(|&&b| b == 1).count() as i128;
    let sums = weighted_sums(&ind);
    let q = h_moduli(c.len());
    Ok(SyndromeH { m: c.len(), h: [reduce(count, q[0]), reduce(sums[1], q[1])] })
}

/// `sum_i i * c_i mod (n + 1)`.
pub fn vt_syndrome(c: &BitSeq) -> u64 {
    let n = c.len() as u64;
    let total: u128 = c.iter().enumerate().filter(|(_, b)| *b == 1).map(|(i, _)| i as u128 + 1).sum();
    (total % (n as u128 + 1)) as u64
}

/// Restores a single deleted bit from the VT syndrome of the original length-`n` sequence.
pub fn vt_decode(d: &BitSeq, syndrome: u64, n: usize) -> Result<BitSeq> {
    if d.len() + 1 != n {
        return Err(Error::invalid(format!("received length {} but n = {n}", d.len())));
    }
    let modulus = n as u64 + 1;
    if syndrome >= modulus {
        return Err(Error::invalid(format!("syndrome {syndrome} not below {modulus}")));
    }
    let weight = d.weight() as u64;
    let deficiency = (syndrome + modulus - vt_syndrome_mod(d, modulus)) % modulus;
    let bits = d.as_slice();
    let gap = if deficiency <= weight {
        // a 0 with `deficiency` ones to its right
        let mut ones_right = 0u64;
        let mut gap = bits.len();
        while ones_right < deficiency {
            gap -= 1;
            ones_right += bits[gap] as u64;
        }
        // move left past zeros is unnecessary: any gap with the same count works
        (gap, 0u8)
    } else {
        // a 1 with `deficiency - weight - 1` zeros to its left
        let want = deficiency - weight - 1;
        let mut zeros_left = 0u64;
        let mut gap = 0usize;
        while zeros_left < want {
            zeros_left += (bits[gap] == 0) as u64;
            gap += 1;
        }
        (gap, 1u8)
    };
    let c = d.inserted(gap.0 + 1, gap.1)?;
    if vt_syndrome(&c) != syndrome {
        return Err(Error::decode(Stage::Vt, "no single insertion matches the syndrome"));
    }
    Ok(c)
}

fn vt_syndrome_mod(d: &BitSeq, modulus: u64) -> u64 {
    let total: u128 = d.iter().enumerate().filter(|(_, b)| *b == 1).map(|(i, _)| i as u128 + 1).sum();
    (total % modulus as u128) as u64
}
