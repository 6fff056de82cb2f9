//! Brute-force decoders and exhaustive checks of the code's structural claims.
//!
//! Every verifier returns a [`VerificationReport`]. Sweeps are split into shards that run on the
//! current rayon pool and merge associatively.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitseq::{delete_at, indicator10, insertion_ball, pair_indicator_raw, BitSeq};
use crate::codec::{decode_with, encode, DecodeOptions};
use crate::error::{Error, Result};
use crate::recovery::{
    candidate, decode_two_deletions, delta_col, insertion_index, matrix_entry, matrix_entry_closed_form,
    CandidateIndicator, Triple,
};
use crate::syndrome::{f_moduli, f_syndrome, g_raw, h_syndrome, moment_entry, SyndromeF, SyndromeH};

pub const DEFAULT_SEED: u64 = 0x2de1_2024;

/// Counterexamples kept per report; the total is still counted in `failures`.
pub const COUNTEREXAMPLE_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub note: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scope: String,
    pub cases_checked: u64,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Named counters, e.g. which branch of a lemma's conclusion fired.
    pub tallies: BTreeMap<String, u64>,
    pub elapsed_ms: u64,
    pub seed: Option<u64>,
}

impl VerificationReport {
    pub fn new(scope: impl Into<String>) -> Self {
        VerificationReport { scope: scope.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn fail(&mut self, note: impl Into<String>, inputs: Vec<String>) {
        self.failures += 1;
        if self.counterexamples.len() < COUNTEREXAMPLE_CAP {
            self.counterexamples.push(Counterexample { note: note.into(), inputs });
        }
    }

    pub fn tally(&mut self, key: &str) {
        *self.tallies.entry(key.to_string()).or_default() += 1;
    }

    /// Associative merge of two shards of the same sweep.
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        if self.scope.is_empty() {
            self.scope = other.scope;
        }
        self.cases_checked += other.cases_checked;
        self.failures += other.failures;
        let room = COUNTEREXAMPLE_CAP.saturating_sub(self.counterexamples.len());
        self.counterexamples.extend(other.counterexamples.into_iter().take(room));
        for (k, v) in other.tallies {
            *self.tallies.entry(k).or_default() += v;
        }
        self.elapsed_ms = self.elapsed_ms.max(other.elapsed_ms);
        self.seed = self.seed.or(other.seed);
        self
    }

    fn finish(mut self, scope: String, started: Instant, seed: Option<u64>) -> Self {
        self.scope = scope;
        self.elapsed_ms = started.elapsed().as_millis() as u64;
        self.seed = seed;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} failures, {} ms",
            self.verdict(),
            self.scope,
            self.cases_checked,
            self.failures,
            self.elapsed_ms
        )?;
        for (k, v) in &self.tallies {
            write!(f, ", {k}={v}")?;
        }
        Ok(())
    }
}

fn sweep<T, F>(items: &[T], check: F) -> VerificationReport
where
    T: Sync,
    F: Fn(&T, &mut VerificationReport) + Sync + Send,
{
    items
        .par_iter()
        .fold(VerificationReport::default, |mut r, item| {
            check(item, &mut r);
            r
        })
        .reduce(VerificationReport::default, VerificationReport::merge)
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Longest common subsequence length.
pub fn lcs(a: &[u8], b: &[u8]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for &x in a {
        let mut diag = 0;
        for (j, &y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Equal-length sequences sharing a common subsequence after `k` deletions each.
pub fn confusable(a: &[u8], b: &[u8], k: usize) -> bool {
    a.len() == b.len() && lcs(a, b) + k >= a.len()
}

/// The unique length-`m` supersequence of `d` with syndromes `f` and `h`, by enumeration.
pub fn brute_decode(d: &BitSeq, f: &SyndromeF, h: &SyndromeH, m: usize) -> Result<BitSeq> {
    if d.len() + 2 != m {
        return Err(Error::invalid(format!("received length {} but m = {m}", d.len())));
    }
    if !(3..=22).contains(&m) {
        return Err(Error::invalid(format!("brute decoding supports 3 <= m <= 22, got {m}")));
    }
    let mut hits = Vec::new();
    for c in insertion_ball(d, 2)? {
        if f_syndrome(&c)? == *f && h_syndrome(&c)? == *h {
            hits.push(c);
        }
    }
    match hits.len() {
        1 => Ok(hits.pop().unwrap()),
        0 => Err(Error::Oracle(format!("no supersequence of {d} has the given syndromes"))),
        k => Err(Error::Oracle(format!("{k} supersequences of {d} share the syndromes: {}", hits[0]))),
    }
}

/// Fast decoder against brute force, all sequences of length 3..=`max_m` and all deletion pairs.
pub fn verify_brute_agreement(max_m: usize) -> Result<VerificationReport> {
    if max_m > 14 {
        return Err(Error::invalid("brute agreement is limited to m <= 14"));
    }
    let started = Instant::now();
    let seqs: Vec<BitSeq> = (3..=max_m).flat_map(BitSeq::all_of_length).collect();
    let r = sweep(&seqs, |c, r| {
        let m = c.len();
        let (f, h) = (f_syndrome(c).unwrap(), h_syndrome(c).unwrap());
        for p in 1..=m {
            for q in p + 1..=m {
                r.cases_checked += 1;
                let d = delete_at(c, &[p, q]).unwrap();
                let fast = decode_two_deletions(&d, &f, &h);
                let slow = brute_decode(&d, &f, &h, m);
                match (&fast, &slow) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => r.fail(format!("fast {fast:?} vs brute {slow:?}"), vec![c.to_string(), format!("{p},{q}")]),
                }
            }
        }
    });
    Ok(r.finish(format!("brute-agreement m<={max_m}"), started, None))
}

/// One of the five syndrome residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    F0,
    F1,
    F2,
    H0,
    H1,
}

impl Component {
    pub const ALL: [Component; 5] = [Component::F0, Component::F1, Component::F2, Component::H0, Component::H1];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["f0", "f1", "f2", "h0", "h1"][self.slot()])
    }
}

/// Which syndrome residues take part in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentSet(u8);

impl ComponentSet {
    pub const ALL: ComponentSet = ComponentSet(0b11111);

    pub fn without(self, c: Component) -> Self {
        ComponentSet(self.0 & !(1 << c.slot()))
    }

    pub fn contains(self, c: Component) -> bool {
        self.0 & (1 << c.slot()) != 0
    }

    fn key(self, f: &SyndromeF, h: &SyndromeH) -> [u64; 5] {
        let all = [f.f[0], f.f[1], f.f[2], h.h[0], h.h[1]];
        std::array::from_fn(|k| if self.0 & (1 << k) != 0 { all[k] } else { u64::MAX })
    }
}

impl fmt::Display for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = Component::ALL.iter().filter(|c| self.contains(**c)).map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// No two distinct length-`n` sequences with equal (f, h) share a common (n-2)-subsequence.
///
/// Exhaustive over all `2^n` sequences, bucketed by syndrome; `n` in 4..=16.
pub fn verify_theorem_main(n: usize) -> Result<VerificationReport> {
    verify_theorem_main_with(n, ComponentSet::ALL)
}

/// [`verify_theorem_main`] comparing only the residues in `components`.
pub fn verify_theorem_main_with(n: usize, components: ComponentSet) -> Result<VerificationReport> {
    if !(4..=16).contains(&n) {
        return Err(Error::invalid(format!("theorem sweep supports 4 <= n <= 16, got {n}")));
    }
    let started = Instant::now();
    let seqs: Vec<BitSeq> = BitSeq::all_of_length(n).collect();
    let keys: Vec<[u64; 5]> =
        seqs.par_iter().map(|c| components.key(&f_syndrome(c).unwrap(), &h_syndrome(c).unwrap())).collect();
    let mut buckets: HashMap<[u64; 5], Vec<usize>> = HashMap::new();
    for (idx, key) in keys.into_iter().enumerate() {
        buckets.entry(key).or_default().push(idx);
    }
    let groups: Vec<Vec<usize>> = buckets.into_values().filter(|g| g.len() > 1).collect();
    let mut r = sweep(&groups, |g, r| {
        for (a, &x) in g.iter().enumerate() {
            for &y in &g[a + 1..] {
                r.cases_checked += 1;
                if confusable(seqs[x].as_slice(), seqs[y].as_slice(), 2) {
                    r.fail("confusable pair with equal syndromes", vec![seqs[x].to_string(), seqs[y].to_string()]);
                }
            }
        }
    });
    r.tallies.insert("sequences".into(), seqs.len() as u64);
    let scope = if components == ComponentSet::ALL {
        format!("theorem-main n={n}")
    } else {
        format!("theorem-main n={n} components={components}")
    };
    Ok(r.finish(scope, started, None))
}

fn moments(e: usize, len: usize) -> Vec<i128> {
    (1..=len).map(|i| moment_entry(e, i)).collect()
}

fn patterns(s: usize) -> Vec<Vec<u8>> {
    (0..1u32 << s).map(|v| (0..s).map(|t| ((v >> (s - 1 - t)) & 1) as u8).collect()).collect()
}

fn constant(v: &[u8]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Bounds for the g-lemma sweeps: window lengths up to `max_s`, moment indices up to `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GBounds {
    pub max_s: usize,
    pub len: usize,
}

/// Two disjoint windows whose order-0 and order-1 g-values cancel (either sign) are constant.
pub fn verify_lemma_g(bounds: GBounds) -> Result<VerificationReport> {
    let GBounds { max_s, len } = bounds;
    if max_s == 0 || len > 20 || max_s > 8 {
        return Err(Error::invalid("lemma g sweep needs 1 <= max_s <= 8 and len <= 20"));
    }
    let started = Instant::now();
    let v = [moments(0, len), moments(1, len)];
    let mut shards = Vec::new();
    for s1 in 1..=max_s {
        for s2 in 1..=max_s {
            for r1 in 1..=len {
                if r1 + s1 >= 2 && r1 + s1 - 2 <= len {
                    shards.push((s1, s2, r1));
                }
            }
        }
    }
    let r = sweep(&shards, |&(s1, s2, r1), r| {
        let xs = patterns(s1);
        let ys = patterns(s2);
        let gx: Vec<[i128; 2]> = xs.iter().map(|x| [g_raw(&v[0], r1, x), g_raw(&v[1], r1, x)]).collect();
        let r2_min = (r1 + s1).saturating_sub(1).max(1);
        for r2 in r2_min..=(len + 2).saturating_sub(s2) {
            let gy: Vec<[i128; 2]> = ys.iter().map(|y| [g_raw(&v[0], r2, y), g_raw(&v[1], r2, y)]).collect();
            for (x, a) in xs.iter().zip(&gx) {
                for (y, b) in ys.iter().zip(&gy) {
                    for lambda in [1i128, -1] {
                        r.cases_checked += 1;
                        if a[0] + lambda * b[0] == 0 && a[1] + lambda * b[1] == 0 {
                            r.tally("solutions");
                            if !(constant(x) && constant(y)) {
                                r.fail(format!("r1={r1} r2={r2} lambda={lambda}"), vec![bits(x), bits(y)]);
                            }
                        }
                    }
                }
            }
        }
    });
    Ok(r.finish(format!("lemma-g s<={max_s} len={len}"), started, None))
}

/// Adjacent windows sharing a middle run without adjacent 1s, cancelling in all three orders,
/// are constant or follow the alternating pattern.
pub fn verify_lemma_gplus(bounds: GBounds) -> Result<VerificationReport> {
    let GBounds { max_s, len } = bounds;
    if max_s == 0 || len > 20 || max_s > 5 {
        return Err(Error::invalid("lemma g+ sweep needs 1 <= max_s <= 5 and len <= 20"));
    }
    let started = Instant::now();
    let v = [moments(0, len), moments(1, len), moments(2, len)];
    let mut shards = Vec::new();
    for s1 in 1..=max_s {
        for s2 in 1..=max_s {
            for s3 in 1..=max_s {
                for r1 in 1..=len {
                    if r1 + s1 + s2 + s3 <= len {
                        shards.push((s1, s2, s3, r1));
                    }
                }
            }
        }
    }
    let r = sweep(&shards, |&(s1, s2, s3, r1), r| {
        let r2 = r1 + s1;
        let g = |r: usize, x: &[u8]| -> [i128; 3] { std::array::from_fn(|e| g_raw(&v[e], r, x)) };
        for x in patterns(s1 + s2 + 1) {
            let shared = &x[s1..s1 + s2];
            if shared.windows(2).any(|w| w == [1, 1]) {
                continue;
            }
            let gx = g(r1, &x);
            for free in patterns(1 + s3) {
                let mut y = Vec::with_capacity(1 + s2 + s3);
                y.push(free[0]);
                y.extend_from_slice(shared);
                y.extend_from_slice(&free[1..]);
                r.cases_checked += 1;
                let gy = g(r2, &y);
                if (0..3).any(|e| gx[e] + gy[e] != 0) {
                    continue;
                }
                let all_equal = constant(&x) && constant(&y) && x[0] == y[0];
                if all_equal {
                    r.tally("constant");
                } else if alternating_branch(&x, &y, s1, s2, s3) {
                    r.tally("alternating");
                } else {
                    r.fail(format!("r1={r1} s=({s1},{s2},{s3})"), vec![bits(&x), bits(&y)]);
                }
            }
        }
    });
    Ok(r.finish(format!("lemma-g+ s<={max_s} len={len}"), started, None))
}

fn alternating_branch(x: &[u8], y: &[u8], s1: usize, s2: usize, s3: usize) -> bool {
    let xb = |t: usize| x[t - 1];
    let yb = |t: usize| y[t - 1];
    (1..=s1 + 1).all(|t| xb(t) == 1 - yb(1))
        && (s1 + 1..s1 + s2).all(|t| xb(t) + xb(t + 1) == 1)
        && xb(s1 + s2 + 1) + yb(s2 + 1) == 1
        && (s2 + 1..=s2 + s3 + 1).all(|t| yb(t) == yb(s2 + 1))
}

/// Checks the indicator lemmas over every confusable pair of length-`n` sequences.
///
/// One report per claim. The mod-3 weight claim is checked on both the 01- and 10-indicators.
pub fn verify_indicator_lemmas(n: usize) -> Result<Vec<VerificationReport>> {
    if !(3..=12).contains(&n) {
        return Err(Error::invalid(format!("indicator lemmas support 3 <= n <= 12, got {n}")));
    }
    struct Facts {
        c: BitSeq,
        ind10: Vec<u8>,
        ind01: Vec<u8>,
        f: SyndromeF,
        h: SyndromeH,
    }
    let started = Instant::now();
    let facts: Vec<Facts> = BitSeq::all_of_length(n)
        .map(|c| Facts {
            ind10: pair_indicator_raw(c.as_slice(), 1, 0),
            ind01: pair_indicator_raw(c.as_slice(), 0, 1),
            f: f_syndrome(&c).unwrap(),
            h: h_syndrome(&c).unwrap(),
            c,
        })
        .collect();
    const NAMES: [&str; 6] = ["two-deletions", "10-indicator", "01-indicator", "indicator", "mod3-01", "mod3-10"];
    let weight = |v: &[u8]| v.iter().filter(|&&b| b == 1).count();
    let idx: Vec<usize> = (0..facts.len()).collect();
    let reports: Vec<VerificationReport> = idx
        .par_iter()
        .fold(
            || vec![VerificationReport::default(); NAMES.len()],
            |mut rs, &a| {
                let x = &facts[a];
                for y in &facts[a + 1..] {
                    if !confusable(x.c.as_slice(), y.c.as_slice(), 2) {
                        continue;
                    }
                    let pair = || vec![x.c.to_string(), y.c.to_string()];
                    for r in rs.iter_mut() {
                        r.cases_checked += 1;
                    }
                    if !confusable(&x.ind10, &y.ind10, 2) || !confusable(&x.ind01, &y.ind01, 2) {
                        rs[0].fail("indicators not within two deletions", pair());
                    }
                    let same10 = x.ind10 == y.ind10;
                    let same01 = x.ind01 == y.ind01;
                    if x.f == y.f && !same10 {
                        rs[1].fail("equal f, different 10-indicators", pair());
                    }
                    if same10 && x.h == y.h && !same01 {
                        rs[2].fail("equal 10-indicator and h, different 01-indicators", pair());
                    }
                    if same10 && same01 {
                        rs[3].fail("equal indicators, different sequences", pair());
                    }
                    for (r, (u, w)) in rs[4..].iter_mut().zip([(&x.ind01, &y.ind01), (&x.ind10, &y.ind10)]) {
                        let (p, q) = (weight(u), weight(w));
                        if p % 3 == q % 3 {
                            r.tally("premise");
                            if p != q {
                                r.fail(format!("weights {p} and {q}"), pair());
                            }
                        }
                    }
                }
                rs
            },
        )
        .reduce(
            || vec![VerificationReport::default(); NAMES.len()],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        );
    Ok(reports
        .into_iter()
        .zip(NAMES)
        .map(|(r, name)| r.finish(format!("indicator-lemma {name} n={n}"), started, None))
        .collect())
}

/// Relative placement of the deletion indices in the two indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// `l1 <= l2 < k2 <= k1`
    A,
    /// `l1 <= l2 < k1 <= k2`
    B,
    /// `l1 < k1 <= l2 < k2`
    C,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::A, Case::B, Case::C];

    fn admits(self, [l1, l2, k1, k2]: [usize; 4], len: usize) -> bool {
        match self {
            Case::A => l1 <= l2 && l2 < k2 && k2 <= k1,
            Case::B => l1 <= l2 && l2 < k1 && k1 <= k2,
            Case::C => l1 < k1 && k1 <= l2 && l2 < k2 && l2 < len,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
        })
    }
}

/// An indicator pair sharing a common subsequence after the case's deletions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseInstance {
    pub case: Case,
    /// Indicator of `c`, 1-based as `u[t - 1]`.
    pub u: Vec<u8>,
    /// Indicator of `c'`.
    pub w: Vec<u8>,
    /// `[l1, l2, k1, k2]`.
    pub idx: [usize; 4],
}

impl CaseInstance {
    /// Builds `u` from `w` according to the case, drawing the unconstrained bits from `rng`.
    pub fn generate(case: Case, w: Vec<u8>, rng: &mut impl Rng) -> Self {
        let len = w.len();
        let idx = loop {
            let t: [usize; 4] = std::array::from_fn(|_| rng.gen_range(1..=len));
            if case.admits(t, len) {
                break t;
            }
        };
        let [l1, l2, k1, k2] = idx;
        let wb = |t: usize| w[t - 1];
        let mut u = vec![0u8; len];
        for t in 1..=len {
            u[t - 1] = match case {
                Case::A if t == l1 || t == k1 => rng.gen_range(0..2),
                Case::A if t > l1 && t <= l2 => wb(t - 1),
                Case::A if t >= k2 && t < k1 => wb(t + 1),
                Case::B if t == l1 || t == k1 => rng.gen_range(0..2),
                Case::B if (t > l1 && t <= l2) || (t > k1 && t <= k2) => wb(t - 1),
                Case::C if t == l1 || t == k1 => rng.gen_range(0..2),
                Case::C if (t > l1 && t < k1) || (t > l2 + 1 && t <= k2) => wb(t - 1),
                Case::C if t > k1 && t <= l2 + 1 => wb(t - 2),
                _ => wb(t),
            };
        }
        CaseInstance { case, u, w, idx }
    }

    /// `(u - w) . m^(e)`.
    pub fn difference(&self, e: usize) -> i128 {
        self.u
            .iter()
            .zip(&self.w)
            .enumerate()
            .map(|(t, (&a, &b))| (a as i128 - b as i128) * moment_entry(e, t + 1))
            .sum()
    }

    /// The g-form of the difference predicted for this case.
    pub fn predicted(&self, e: usize) -> i128 {
        let v = moments(e, self.u.len());
        let [l1, l2, k1, k2] = self.idx;
        let u = |a: usize, b: usize| self.u[a - 1..b].to_vec();
        let with = |mut x: Vec<u8>, last: u8| {
            x.push(last);
            x
        };
        let (ub, wb) = (|t: usize| self.u[t - 1], |t: usize| self.w[t - 1]);
        match self.case {
            Case::A => {
                let w_win = self.w[k2 - 1..k1].to_vec();
                g_raw(&v, l1, &with(u(l1, l2), wb(l2))) - g_raw(&v, k2, &with(w_win, ub(k1)))
            }
            Case::B => g_raw(&v, l1, &with(u(l1, l2), wb(l2))) + g_raw(&v, k1, &with(u(k1, k2), wb(k2))),
            Case::C => {
                let mut x = u(l1, k1 - 1);
                x.extend(u(k1 + 1, l2 + 1));
                g_raw(&v, l1, &with(x, wb(l2))) + g_raw(&v, k1, &with(u(k1, k2), wb(k2)))
            }
        }
    }

    /// Both indicators reduce to the same vector under their deletions.
    pub fn shares_subsequence(&self) -> bool {
        let [l1, l2, k1, k2] = self.idx;
        let drop = |v: &[u8], a: usize, b: usize| -> Vec<u8> {
            v.iter().enumerate().filter(|(t, _)| t + 1 != a && t + 1 != b).map(|(_, &x)| x).collect()
        };
        drop(&self.u, l1, k1) == drop(&self.w, l2, k2)
    }
}

/// Random instances of `case`: the weighted difference equals the g-form for e = 0, 1, 2.
pub fn verify_case_identity(case: Case, trials: usize, n: usize, seed: u64) -> Result<VerificationReport> {
    if !(6..=64).contains(&n) || trials == 0 {
        return Err(Error::invalid(format!("case identities need 6 <= n <= 64 and trials >= 1, got n={n}")));
    }
    let started = Instant::now();
    let shards: Vec<u64> = (0..trials.div_ceil(256) as u64).collect();
    let r = sweep(&shards, |&shard, r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard + 1 + 1024 * case as u64);
        let count = 256.min(trials - shard as usize * 256);
        for _ in 0..count {
            let c2 = BitSeq::new((0..n).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let w = indicator10(&c2).unwrap().into_vec();
            let inst = CaseInstance::generate(case, w, &mut rng);
            r.cases_checked += 1;
            if !inst.shares_subsequence() {
                r.fail(
                    "generator broke the deletion structure",
                    vec![bits(&inst.u), bits(&inst.w), format!("{:?}", inst.idx)],
                );
                continue;
            }
            if inst.idx[0] == inst.idx[1] {
                r.tally("aligned-first");
            }
            for e in 0..3 {
                if inst.difference(e) != inst.predicted(e) {
                    r.fail(
                        format!("order {e}: {} vs {}", inst.difference(e), inst.predicted(e)),
                        vec![bits(&inst.u), bits(&inst.w), format!("{:?}", inst.idx)],
                    );
                }
            }
        }
    });
    Ok(r.finish(format!("case-identity ({case}) n={n}"), started, Some(seed)))
}

/// [`verify_case_identity`] for all three cases.
pub fn verify_case_identities(trials: usize, n: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    Case::ALL.iter().map(|&c| verify_case_identity(c, trials, n, seed)).collect()
}

/// Which messages a round-trip sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageSet {
    All,
    Random { count: usize, seed: u64 },
}

/// Encode, delete every pattern of 0, 1 or 2 codeword bits, decode, compare.
pub fn verify_roundtrip(n: usize, messages: MessageSet, opts: DecodeOptions) -> Result<VerificationReport> {
    let started = Instant::now();
    let (msgs, seed): (Vec<BitSeq>, Option<u64>) = match messages {
        MessageSet::All => {
            if n > 14 {
                return Err(Error::invalid("exhaustive round trip is limited to n <= 14"));
            }
            (BitSeq::all_of_length(n).collect(), None)
        }
        MessageSet::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = (0..count).map(|_| BitSeq::new((0..n).map(|_| rng.gen_range(0..2)).collect()).unwrap()).collect();
            (v, Some(seed))
        }
    };
    crate::codec::layout(n)?;
    let r = sweep(&msgs, |msg, r| {
        let cw = encode(msg).unwrap();
        let total = cw.len();
        let check = |pos: &[usize], r: &mut VerificationReport| {
            r.cases_checked += 1;
            let d = delete_at(&cw, pos).unwrap();
            match decode_with(&d, n, opts) {
                Ok(rep) if rep.message == *msg => {}
                other => r.fail(
                    format!("deleted {pos:?}: {:?}", other.map(|x| x.message.to_string())),
                    vec![msg.to_string()],
                ),
            }
        };
        check(&[], r);
        for p in 1..=total {
            check(&[p], r);
            for q in p + 1..=total {
                check(&[p, q], r);
            }
        }
    });
    let path = if opts.force_general_path { "general" } else { "default" };
    Ok(r.finish(format!("roundtrip n={n} path={path}"), started, seed))
}

/// Sizes checked exhaustively and at random by [`verify_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixBounds {
    pub exhaustive_max_m: usize,
    pub trials: usize,
    pub random_max_m: usize,
    pub seed: u64,
}

/// Closed form against direct entries, monotonicity, ties, symmetry and entry bounds.
///
/// Exhaustive over every received indicator up to `exhaustive_max_m`; at random sizes the
/// columns are walked with the O(1) updates and tie candidates are sampled.
pub fn verify_matrix(bounds: MatrixBounds) -> Result<VerificationReport> {
    let started = Instant::now();
    let small: Vec<BitSeq> = (3..=bounds.exhaustive_max_m)
        .flat_map(|m| BitSeq::all_of_length(m - 3))
        .filter(|ind| !ind.has_adjacent_ones())
        .collect();
    let exhaustive = sweep(&small, |ind, r| check_matrix(ind, r, None));
    let shards: Vec<u64> = (0..bounds.trials as u64).collect();
    let random = sweep(&shards, |&t, r| {
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        rng.set_stream(t + 1);
        let m = rng.gen_range(4..=bounds.random_max_m.max(4));
        let d = BitSeq::new((0..m - 2).map(|_| rng.gen_range(0..2)).collect()).unwrap();
        let ind = indicator10(&d).unwrap();
        check_matrix(&ind, r, Some(&mut rng));
    });
    let scope = format!(
        "matrix exhaustive m<={} random {}x m<={}",
        bounds.exhaustive_max_m, bounds.trials, bounds.random_max_m
    );
    Ok(exhaustive.merge(random).finish(scope, started, Some(bounds.seed)))
}

fn check_matrix(ind: &BitSeq, r: &mut VerificationReport, mut rng: Option<&mut ChaCha8Rng>) {
    let m = ind.len() + 3;
    let last = 2 * m - 2;
    let q = f_moduli(m);
    let exhaustive = rng.is_none();
    let show = |i: usize, j: usize| vec![ind.to_string(), format!("({i},{j})")];
    let star = |i: usize, j: usize| insertion_index(i, m).unwrap().p == insertion_index(j, m).unwrap().p;
    let bits_of = |i: usize, j: usize| match candidate(ind, i, j).unwrap() {
        CandidateIndicator::Bits(b) => b,
        CandidateIndicator::Star => unreachable!("real cell"),
    };
    for j in 1..=last {
        let mut prev: Option<(usize, Triple)> = None;
        for i in (1..=last).filter(|&i| !star(i, j)) {
            let x = match prev {
                Some((pi, px)) if pi + 1 == i && !exhaustive => {
                    let dx = delta_col(ind, pi, j).unwrap();
                    [px[0] + dx[0], px[1] + dx[1], px[2] + dx[2]]
                }
                _ => {
                    let closed = matrix_entry_closed_form(ind, i, j).unwrap().expect("real cell");
                    if exhaustive && matrix_entry(ind, i, j).unwrap() != Some(closed) {
                        r.fail("closed form differs from direct entry", show(i, j));
                    }
                    closed
                }
            };
            r.cases_checked += 1;
            if (0..3).any(|e| x[e] < 0 || x[e] > q[e] as i128) {
                r.fail(format!("entry {x:?} outside moduli {q:?}"), show(i, j));
            }
            if exhaustive && matrix_entry_closed_form(ind, j, i).unwrap() != Some(x) {
                r.fail("not symmetric", show(i, j));
            }
            if let Some((pi, px)) = prev {
                if (0..3).any(|e| x[e] < px[e]) {
                    r.fail(format!("column decreases from ({pi},{j})"), show(i, j));
                }
                if x == px {
                    r.tally("ties");
                    let sample = match rng.as_deref_mut() {
                        None => true,
                        Some(g) => g.gen_ratio(1, 64),
                    };
                    if sample && bits_of(pi, j) != bits_of(i, j) {
                        r.fail(format!("tie with ({pi},{j}) but different candidates"), show(i, j));
                    }
                }
            }
            prev = Some((i, x));
        }
    }
    if let Some(g) = rng {
        for _ in 0..8 {
            let (i, j) = (g.gen_range(1..=last), g.gen_range(1..=last));
            if matrix_entry(ind, i, j).unwrap() != matrix_entry_closed_form(ind, i, j).unwrap() {
                r.fail("closed form differs from direct entry", show(i, j));
            }
            if matrix_entry_closed_form(ind, j, i).unwrap() != matrix_entry_closed_form(ind, i, j).unwrap() {
                r.fail("not symmetric", show(i, j));
            }
        }
    }
}
