//! The systematic two-layer code.
//!
//! A codeword is `c ‖ pack(f(c), h(c)) ‖ r3(pack(f(s), h(s)))` where `s` is the
//! packed first layer and `r3` repeats every bit three times. Fields are
//! packed big-endian at the bit width of their modulus.

use serde::Serialize;

use crate::bitseq::BitSeq;
use crate::error::{Error, Result, Stage};
use crate::recovery::{decode_two_deletions_report, TraceStep};
use crate::syndrome::{f_moduli, f_syndrome, h_moduli, h_syndrome, SyndromeF, SyndromeH};

pub const MIN_MESSAGE_LEN: usize = 8;
pub const MAX_MESSAGE_LEN: usize = 1 << 20;

fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as usize
    }
}

/// Bit widths of the five syndrome fields of a length-`m` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldWidths {
    pub m: usize,
    pub f: [usize; 3],
    pub h: [usize; 2],
}

impl FieldWidths {
    pub fn for_length(m: usize) -> Self {
        let fq = f_moduli(m);
        let hq = h_moduli(m);
        FieldWidths { m, f: fq.map(ceil_log2), h: hq.map(ceil_log2) }
    }

    pub fn total(&self) -> usize {
        self.f.iter().sum::<usize>() + self.h.iter().sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeLayout {
    pub n: usize,
    pub layer1: FieldWidths,
    /// Length of the packed first layer.
    pub n1: usize,
    pub layer2: FieldWidths,
    /// Length of the repeated second layer.
    pub n2: usize,
    /// Codeword length.
    pub total: usize,
}

impl CodeLayout {
    pub fn redundancy(&self) -> usize {
        self.total - self.n
    }
}

pub fn layout(n: usize) -> Result<CodeLayout> {
    if !(MIN_MESSAGE_LEN..=MAX_MESSAGE_LEN).contains(&n) {
        return Err(Error::invalid(format!("message length {n} outside {MIN_MESSAGE_LEN}..={MAX_MESSAGE_LEN}")));
    }
    let layer1 = FieldWidths::for_length(n);
    let n1 = layer1.total();
    let layer2 = FieldWidths::for_length(n1);
    let n2 = 3 * layer2.total();
    Ok(CodeLayout { n, layer1, n1, layer2, n2, total: n + n1 + n2 })
}

/// Packs `f` then `h`, each field big-endian at its width.
pub fn pack(f: &SyndromeF, h: &SyndromeH, widths: &FieldWidths) -> BitSeq {
    let mut bits = Vec::with_capacity(widths.total());
    let fields = f.f.iter().zip(widths.f).chain(h.h.iter().zip(widths.h));
    for (&value, w) in fields {
        bits.extend(BitSeq::from_uint(value, w).into_vec());
    }
    BitSeq::from_raw(bits)
}

/// Inverse of [`pack`]; rejects fields that are not valid residues.
pub fn unpack(bits: &BitSeq, widths: &FieldWidths) -> Result<(SyndromeF, SyndromeH)> {
    if bits.len() != widths.total() {
        return Err(Error::invalid(format!("packed length {} but layout needs {}", bits.len(), widths.total())));
    }
    let mut at = 1;
    let mut read = |w: usize| -> Result<u64> {
        let v = bits.window(at, at + w - 1)?.to_uint()?;
        at += w;
        Ok(v)
    };
    let f = [read(widths.f[0])?, read(widths.f[1])?, read(widths.f[2])?];
    let h = [read(widths.h[0])?, read(widths.h[1])?];
    Ok((SyndromeF::new(widths.m, f)?, SyndromeH::new(widths.m, h)?))
}

pub fn r3_encode(s: &BitSeq) -> BitSeq {
    BitSeq::from_raw(s.iter().flat_map(|b| [b, b, b]).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetitionDecode {
    pub s: BitSeq,
    /// Missing bits restored in each received run.
    pub imputed_runs: Vec<usize>,
}

/// Rounds every received run up to a multiple of three.
pub fn r3_decode(d1: &BitSeq, m: usize) -> Result<RepetitionDecode> {
    if d1.len() > 3 * m || d1.len() + 2 < 3 * m {
        return Err(Error::invalid(format!("received {} bits for {m} repeated symbols", d1.len())));
    }
    let mut s = Vec::with_capacity(m);
    let mut imputed_runs = Vec::new();
    let bits = d1.as_slice();
    let mut start = 0;
    while start < bits.len() {
        let sym = bits[start];
        let len = bits[start..].iter().take_while(|&&b| b == sym).count();
        let copies = len.div_ceil(3);
        imputed_runs.push(3 * copies - len);
        s.extend(std::iter::repeat_n(sym, copies));
        start += len;
    }
    let padding: usize = imputed_runs.iter().sum();
    if padding != 3 * m - d1.len() || s.len() != m {
        return Err(Error::Repetition(format!("restored {padding} bits but {} are missing", 3 * m - d1.len())));
    }
    Ok(RepetitionDecode { s: BitSeq::from_raw(s), imputed_runs })
}

pub fn encode(c: &BitSeq) -> Result<BitSeq> {
    let lay = layout(c.len())?;
    let first = pack(&f_syndrome(c)?, &h_syndrome(c)?, &lay.layer1);
    let second = pack(&f_syndrome(&first)?, &h_syndrome(&first)?, &lay.layer2);
    Ok(c.concat(&first).concat(&r3_encode(&second)))
}

/// Longest suffix of `d` that embeds into `tail`, by one reverse greedy pass.
pub fn longest_r3_suffix(d: &BitSeq, tail: &BitSeq) -> usize {
    let (d, tail) = (d.as_slice(), tail.as_slice());
    let mut t = tail.len();
    let mut matched = 0;
    for &bit in d.iter().rev() {
        while t > 0 && tail[t - 1] != bit {
            t -= 1;
        }
        if t == 0 {
            break;
        }
        t -= 1;
        matched += 1;
    }
    matched
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodePath {
    EarlyReturn,
    General,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DecodeDiagnostics {
    /// Trailing bits dropped to reach length `N - 2`.
    pub trimmed: usize,
    pub layer1_visited: usize,
    pub message_visited: usize,
    pub layer1_candidates: usize,
    pub message_candidates: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecodeReport {
    pub message: BitSeq,
    pub path: DecodePath,
    /// Suffix length matched against the repetition layer (general path only).
    pub suffix_len: Option<usize>,
    pub diagnostics: DecodeDiagnostics,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub message_trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Skip the shortcut taken when both deletions hit the repetition layer.
    pub force_general_path: bool,
    /// Record the message-stage search path.
    pub trace: bool,
}

pub fn decode(d: &BitSeq, n: usize) -> Result<DecodeReport> {
    decode_with(d, n, DecodeOptions::default())
}

pub fn decode_with(d: &BitSeq, n: usize, opts: DecodeOptions) -> Result<DecodeReport> {
    let lay = layout(n)?;
    let big_n = lay.total;
    if d.len() + 2 < big_n || d.len() > big_n {
        return Err(Error::invalid(format!(
            "received {} bits; a length-{n} message needs between {} and {big_n}",
            d.len(),
            big_n - 2
        )));
    }
    let mut diagnostics = DecodeDiagnostics { trimmed: d.len() + 2 - big_n, ..Default::default() };
    let d = d.window(1, big_n - 2)?;

    let window = d.window(big_n - lay.n2 + 1, big_n - 2)?;
    let rep = r3_decode(&window, lay.n2 / 3).map_err(|e| e.at(Stage::Repetition))?;
    if !opts.force_general_path && rep.imputed_runs.first() == Some(&0) {
        return Ok(DecodeReport {
            message: d.window(1, n)?,
            path: DecodePath::EarlyReturn,
            suffix_len: None,
            diagnostics,
            message_trace: Vec::new(),
        });
    }

    let (f2, h2) = unpack(&rep.s, &lay.layer2).map_err(|e| Error::decode(Stage::Repetition, e.to_string()))?;
    let suffix = longest_r3_suffix(&d, &r3_encode(&rep.s));
    let first = d.window(big_n - lay.n1 + 1 - suffix, big_n - 2 - suffix)?;
    let layer1 = decode_two_deletions_report(&first, &f2, &h2, false).map_err(|e| e.at(Stage::Layer1))?;
    diagnostics.layer1_visited = layer1.visited;
    diagnostics.layer1_candidates = layer1.candidates;
    let (f, h) = unpack(&layer1.sequence, &lay.layer1).map_err(|e| Error::decode(Stage::Layer1, e.to_string()))?;

    let body = d.window(1, n - 2)?;
    let message = decode_two_deletions_report(&body, &f, &h, opts.trace).map_err(|e| e.at(Stage::Message))?;
    diagnostics.message_visited = message.visited;
    diagnostics.message_candidates = message.candidates;
    Ok(DecodeReport {
        message: message.sequence,
        path: DecodePath::General,
        suffix_len: Some(suffix),
        diagnostics,
        message_trace: message.trace,
    })
}
