use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deldec::oracle::{self, GBounds, MatrixBounds, MessageSet, VerificationReport, DEFAULT_SEED};
use deldec::recovery::decode_two_deletions_report;
use deldec::syndrome::SyndromeRecord;
use deldec::{decode_with, encode, layout, BitSeq, CodeLayout, DecodeOptions, Error, SyndromeF, SyndromeH};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "deldec", version, about = "Encode, corrupt and decode with a binary two-deletion code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stderr.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the codeword for a message; the layout and syndromes go to the JSON report.
    Encode {
        /// Message bits; read from stdin when absent.
        bits: Option<String>,
    },
    /// Delete up to two bits.
    Corrupt {
        bits: Option<String>,
        /// Comma-separated 1-based positions.
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        positions: Option<Vec<usize>>,
        /// Number of positions to delete at random.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, env = "DELDEC_SEED")]
        seed: Option<u64>,
    },
    /// Recover the message from a received codeword.
    Decode {
        bits: Option<String>,
        /// Message length.
        #[arg(long)]
        n: usize,
        /// Print each visited cell of the message-stage search to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        force_general_path: bool,
        /// Decode a bare message with known f syndrome (comma-separated), skipping the codeword layers.
        #[arg(long, value_delimiter = ',', requires = "h", num_args = 1)]
        f: Option<Vec<u64>>,
        /// h syndrome for use with --f.
        #[arg(long, value_delimiter = ',', requires = "f", num_args = 1)]
        h: Option<Vec<u64>>,
    },
    /// Run verification sweeps.
    Selftest {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Sequence or message length where the suite takes one.
        #[arg(long)]
        n: Option<usize>,
        /// Random trials for the randomized suites.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "DELDEC_SEED")]
        seed: Option<u64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Show the codeword layout for a message length.
    Info {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    TheoremMain,
    Lemmas,
    CaseIdentities,
    Roundtrip,
    Matrix,
    Brute,
    All,
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json.clone();
    let out = match cli.command {
        Command::Encode { bits } => cmd_encode(bits, &json),
        Command::Corrupt { bits, positions, random, seed } => cmd_corrupt(bits, positions, random, seed),
        Command::Decode { bits, n, trace, force_general_path, f, h } => {
            cmd_decode(bits, n, trace, force_general_path, f.zip(h), &json)
        }
        Command::Selftest { suite, n, trials, seed, jobs } => cmd_selftest(suite, n, trials, seed, jobs, &json),
        Command::Info { n } => cmd_info(n, &json),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_bits(arg: Option<String>) -> Result<BitSeq, Failure> {
    let text = match arg {
        Some(s) => s,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    text.trim().parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn emit_json<T: Serialize>(value: &T, path: &Option<PathBuf>) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Run(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(io::stderr(), "{text}")?,
    }
    Ok(())
}

#[derive(Serialize)]
struct EncodeSidecar {
    n: usize,
    #[serde(rename = "N1")]
    n1: usize,
    #[serde(rename = "N2")]
    n2: usize,
    #[serde(rename = "N")]
    total: usize,
    f: [u64; 3],
    h: [u64; 2],
    layout: CodeLayout,
}

fn cmd_encode(bits: Option<String>, json: &Option<PathBuf>) -> Outcome {
    let msg = read_bits(bits)?;
    let lay = layout(msg.len())?;
    let cw = encode(&msg)?;
    let syn = SyndromeRecord::of(&msg)?;
    println!("{cw}");
    let sidecar = EncodeSidecar { n: lay.n, n1: lay.n1, n2: lay.n2, total: lay.total, f: syn.f, h: syn.h, layout: lay };
    emit_json(&sidecar, json)
}

fn cmd_corrupt(
    bits: Option<String>,
    positions: Option<Vec<usize>>,
    random: Option<usize>,
    seed: Option<u64>,
) -> Outcome {
    let cw = read_bits(bits)?;
    let mut pos = match (positions, random) {
        (Some(p), _) => p,
        (None, Some(k)) => {
            if k > 2 {
                return Err(Failure::Usage(format!("at most 2 deletions, asked for {k}")));
            }
            if k > cw.len() {
                return Err(Failure::Usage(format!("cannot delete {k} of {} bits", cw.len())));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(DEFAULT_SEED));
            rand::seq::index::sample(&mut rng, cw.len(), k).into_iter().map(|i| i + 1).collect()
        }
        (None, None) => return Err(Failure::Usage("give --positions or --random".into())),
    };
    if pos.len() > 2 {
        return Err(Failure::Usage(format!("at most 2 deletions, got {}", pos.len())));
    }
    pos.sort_unstable();
    let d = deldec::bitseq::delete_at(&cw, &pos)?;
    println!("{d}");
    let shown: Vec<String> = pos.iter().map(|p| p.to_string()).collect();
    eprintln!("deleted positions: {}", shown.join(","));
    Ok(())
}

fn cmd_decode(
    bits: Option<String>,
    n: usize,
    trace: bool,
    force_general_path: bool,
    direct: Option<(Vec<u64>, Vec<u64>)>,
    json: &Option<PathBuf>,
) -> Outcome {
    let d = read_bits(bits)?;
    if let Some((f, h)) = direct {
        let f: [u64; 3] = f.try_into().map_err(|_| Failure::Usage("--f takes three values".into()))?;
        let h: [u64; 2] = h.try_into().map_err(|_| Failure::Usage("--h takes two values".into()))?;
        let (f, h) = (SyndromeF::new(n, f)?, SyndromeH::new(n, h)?);
        let rep = decode_two_deletions_report(&d, &f, &h, trace)?;
        for step in &rep.trace {
            eprintln!("{step}");
        }
        println!("{}", rep.sequence);
        return emit_json(&rep, json);
    }
    let rep = decode_with(&d, n, DecodeOptions { force_general_path, trace })?;
    for step in &rep.message_trace {
        eprintln!("{step}");
    }
    println!("{}", rep.message);
    emit_json(&rep, json)
}

fn cmd_info(n: usize, json: &Option<PathBuf>) -> Outcome {
    let lay = layout(n)?;
    println!("n={} N1={} N2={} N={} redundancy={}", lay.n, lay.n1, lay.n2, lay.total, lay.redundancy());
    emit_json(&lay, json)
}

fn cmd_selftest(
    suite: Suite,
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    json: &Option<PathBuf>,
) -> Outcome {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| Failure::Run(e.to_string()))?;
    let reports = pool.install(|| run_suites(suite, n, trials, seed))?;
    for r in &reports {
        println!("{r}");
        for c in &r.counterexamples {
            eprintln!("  counterexample ({}): {}", c.note, c.inputs.join(" "));
        }
    }
    emit_json(&reports, json)?;
    if reports.iter().all(VerificationReport::passed) {
        Ok(())
    } else {
        Err(Failure::Run("verification failed".into()))
    }
}

fn run_suites(
    suite: Suite,
    n: Option<usize>,
    trials: Option<usize>,
    seed: u64,
) -> Result<Vec<VerificationReport>, Failure> {
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let mut out = Vec::new();
    if wants(Suite::TheoremMain) {
        out.push(oracle::verify_theorem_main(n.unwrap_or(8))?);
    }
    if wants(Suite::Lemmas) {
        out.push(oracle::verify_lemma_g(GBounds { max_s: 3, len: 10 })?);
        out.push(oracle::verify_lemma_gplus(GBounds { max_s: 2, len: 11 })?);
        out.extend(oracle::verify_indicator_lemmas(n.unwrap_or(8).min(12))?);
    }
    if wants(Suite::CaseIdentities) {
        let len = n.filter(|v| (6..=64).contains(v)).unwrap_or(32);
        out.extend(oracle::verify_case_identities(trials.unwrap_or(1000), len, seed)?);
    }
    if wants(Suite::Roundtrip) {
        let len = n.unwrap_or(8);
        let set = if len <= 12 && trials.is_none() {
            MessageSet::All
        } else {
            MessageSet::Random { count: trials.unwrap_or(4), seed }
        };
        for force_general_path in [false, true] {
            out.push(oracle::verify_roundtrip(len, set, DecodeOptions { force_general_path, trace: false })?);
        }
    }
    if wants(Suite::Matrix) {
        let bounds = MatrixBounds { exhaustive_max_m: 9, trials: trials.unwrap_or(1000), random_max_m: 64, seed };
        out.push(oracle::verify_matrix(bounds)?);
    }
    if wants(Suite::Brute) {
        out.push(oracle::verify_brute_agreement(n.unwrap_or(9).min(12))?);
    }
    Ok(out)
}
