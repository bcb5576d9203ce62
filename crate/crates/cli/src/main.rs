//! Command-line front end: byte ingestion and alphabet mapping, online
//! factorization with text or JSON output, plus verify and bench flows.

mod verify;

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use blz::{Code, Engine, Factor, FactorKind, FactorSink, Params, SliceSource, Stats};
use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Structure ids and text borders are 32-bit.
const CAPACITY: usize = u32::MAX as usize;

#[derive(Parser)]
#[command(
    name = "blz",
    version,
    about = "Online Lempel-Ziv factorization of a byte stream"
)]
struct Cli {
    /// Read input bytes from this file.
    #[arg(long, value_name = "PATH", conflicts_with = "stdin")]
    input: Option<PathBuf>,

    /// Read input bytes from standard input.
    #[arg(long)]
    stdin: bool,

    /// Alphabet size declared up front; the input may contain at most this
    /// many distinct bytes (codes are assigned in order of first appearance).
    #[arg(long, value_name = "INT", conflicts_with = "infer")]
    sigma: Option<u32>,

    /// Pre-scan the input to determine the alphabet size. The scan needs the
    /// whole input before the first factor, so the run is no longer a single
    /// online pass.
    #[arg(long)]
    infer: bool,

    /// Map A/C/G/T (either case) to codes 0-3; any other byte is rejected.
    #[arg(long, conflicts_with_all = ["sigma", "infer"])]
    dna: bool,

    /// Override the characters-per-block packing size (testing).
    #[arg(long, value_name = "INT")]
    block_size: Option<usize>,

    /// Output format for factors.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Check the produced factorization against an independent
    /// recomputation; exit 4 on divergence.
    #[arg(long)]
    verify: bool,

    /// Largest input --verify accepts. Inputs over 10000 characters are
    /// checked factor-by-factor instead of against the full quadratic
    /// recomputation.
    #[arg(long, value_name = "INT", default_value_t = 100_000)]
    verify_cap: usize,

    /// Append a summary line/object: sizes, block reads, structure growth.
    #[arg(long)]
    stats: bool,

    /// Benchmark the listed input sizes (comma separated, ascending) and
    /// print CSV with doubling ratios. Without --input/--stdin the inputs
    /// are generated from --seed over a 4-letter alphabet.
    #[arg(long, value_name = "N1,N2,...", value_delimiter = ',', num_args = 0..)]
    bench: Option<Vec<usize>>,

    /// Seed for generated benchmark inputs.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,

    /// Corrupt the factor at this 1-based index before verification: a
    /// negative control proving the verifier can fail.
    #[arg(long, hide = true, value_name = "INDEX")]
    inject_fault: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Config(String),
    LengthMismatch(String),
    VerifyFail(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::LengthMismatch(_) => 3,
            Failure::VerifyFail(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m)
            | Failure::Config(m)
            | Failure::LengthMismatch(m)
            | Failure::VerifyFail(m) => m,
        }
    }
}

pub(crate) fn kind_name(kind: FactorKind) -> &'static str {
    match kind {
        FactorKind::Literal => "literal",
        FactorKind::Copy => "copy",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("blz: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.bench {
        Some(sizes) => cmd_bench(cli, sizes),
        None => cmd_factorize(cli),
    }
}

fn read_input(cli: &Cli) -> Result<Vec<u8>, Failure> {
    match (&cli.input, cli.stdin) {
        (Some(path), false) => {
            fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        (None, true) => {
            let mut buf = Vec::new();
            io::stdin()
                .lock()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::Io(format!("standard input: {e}")))?;
            Ok(buf)
        }
        _ => Err(Failure::Config(
            "exactly one of --input and --stdin is required".into(),
        )),
    }
}

/// Maps bytes to dense codes in order of first appearance. The mapping is
/// fixed the moment a byte is first seen, so it works in the same single
/// pass as the factorizer.
fn map_dense(bytes: &[u8], sigma: u32) -> Result<Vec<Code>, Failure> {
    let mut table = [u32::MAX; 256];
    let mut next = 0u32;
    let mut out = Vec::with_capacity(bytes.len());
    for (i, &b) in bytes.iter().enumerate() {
        let slot = &mut table[b as usize];
        if *slot == u32::MAX {
            if next == sigma {
                return Err(Failure::Config(format!(
                    "byte 0x{b:02x} at offset {i} is distinct byte number {} but \
                     the declared alphabet size is {sigma}",
                    next + 1
                )));
            }
            *slot = next;
            next += 1;
        }
        out.push(*slot);
    }
    Ok(out)
}

fn map_dna(bytes: &[u8]) -> Result<Vec<Code>, Failure> {
    let mut out = Vec::with_capacity(bytes.len());
    for (i, &b) in bytes.iter().enumerate() {
        out.push(match b {
            b'A' | b'a' => 0,
            b'C' | b'c' => 1,
            b'G' | b'g' => 2,
            b'T' | b't' => 3,
            _ => {
                return Err(Failure::Config(format!(
                    "byte 0x{b:02x} at offset {i} is not an A/C/G/T letter"
                )))
            }
        });
    }
    Ok(out)
}

fn resolve_alphabet(cli: &Cli, bytes: &[u8]) -> Result<(Vec<Code>, u32), Failure> {
    if bytes.is_empty() {
        return Err(Failure::Config(
            "input is empty; at least one character is required".into(),
        ));
    }
    if bytes.len() > CAPACITY {
        return Err(Failure::Config(format!(
            "input of {} bytes exceeds the supported maximum {CAPACITY}",
            bytes.len()
        )));
    }
    if cli.dna {
        return Ok((map_dna(bytes)?, 4));
    }
    if let Some(sigma) = cli.sigma {
        if sigma == 0 {
            return Err(Failure::Config("--sigma must be at least 1".into()));
        }
        return Ok((map_dense(bytes, sigma)?, sigma));
    }
    if cli.infer {
        eprintln!(
            "blz: --infer pre-scans the input, so the factorization is not \
             produced in a single online pass"
        );
        let codes = map_dense(bytes, 256).expect("any byte fits an alphabet of 256");
        let sigma = codes.iter().copied().max().unwrap() + 1;
        return Ok((codes, sigma));
    }
    Err(Failure::Config(
        "one of --sigma, --infer, or --dna is required".into(),
    ))
}

fn make_params(cli: &Cli, n: usize, sigma: u32) -> Result<Params, Failure> {
    let res = match cli.block_size {
        Some(0) => return Err(Failure::Config("--block-size must be at least 1".into())),
        Some(r) => Params::with_block_size(n, sigma, r),
        None => Params::choose(n, sigma),
    };
    res.map_err(|e| Failure::Config(e.to_string()))
}

/// Collects all factors and, in text mode, streams each one to stdout the
/// moment the engine emits it.
struct Collector<W: Write> {
    factors: Vec<Factor>,
    text: Option<W>,
    err: Option<io::Error>,
}

impl<W: Write> FactorSink for Collector<W> {
    fn factor(&mut self, f: Factor) {
        if let (Some(w), None) = (self.text.as_mut(), self.err.as_ref()) {
            if let Err(e) =
                writeln!(w, "{}\t{}\t{}\t{}", f.index, f.start, f.len, kind_name(f.kind))
            {
                self.err = Some(e);
            }
        }
        self.factors.push(f);
    }
}

#[derive(Serialize)]
struct Row {
    i: usize,
    start: usize,
    len: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<usize>,
}

impl From<&Factor> for Row {
    fn from(f: &Factor) -> Row {
        Row {
            i: f.index,
            start: f.start,
            len: f.len,
            kind: kind_name(f.kind),
            witness: f.witness,
        }
    }
}

#[derive(Serialize)]
struct StatsOut {
    n: usize,
    z: usize,
    r: usize,
    blocks_read: usize,
    st_leaves: usize,
    st_vertices: usize,
    trie_nodes: usize,
    wavelet_bits: usize,
}

impl StatsOut {
    fn new(s: &Stats) -> StatsOut {
        StatsOut {
            n: s.n,
            z: s.factors,
            r: s.r,
            blocks_read: s.blocks_read,
            st_leaves: s.st_leaves,
            st_vertices: s.st_vertices,
            trie_nodes: s.trie_nodes,
            wavelet_bits: s.wavelet_bits,
        }
    }
}

#[derive(Serialize)]
struct Report {
    factors: Vec<Row>,
    stats: StatsOut,
}

fn check_tiling(factors: &[Factor], n: usize) -> Result<(), Failure> {
    let mut pos = 1usize;
    for f in factors {
        if f.start != pos {
            return Err(Failure::LengthMismatch(format!(
                "factor {} starts at {} but {} characters precede it",
                f.index,
                f.start,
                pos - 1
            )));
        }
        pos += f.len;
    }
    if pos != n + 1 {
        return Err(Failure::LengthMismatch(format!(
            "factors cover {} of {} characters",
            pos - 1,
            n
        )));
    }
    Ok(())
}

fn cmd_factorize(cli: &Cli) -> Result<(), Failure> {
    if cli.inject_fault.is_some() && !cli.verify {
        return Err(Failure::Config("--inject-fault requires --verify".into()));
    }
    let bytes = read_input(cli)?;
    let (codes, sigma) = resolve_alphabet(cli, &bytes)?;
    let params = make_params(cli, codes.len(), sigma)?;

    let mut sink = Collector {
        factors: Vec::new(),
        text: (cli.format == Format::Text).then(|| BufWriter::new(io::stdout().lock())),
        err: None,
    };
    let mut engine = Engine::new(params, SliceSource::new(&codes, sigma));
    let stats = engine
        .run(&mut sink)
        .map_err(|e| Failure::Io(e.to_string()))?;
    if let Some(e) = sink.err.take() {
        return Err(Failure::Io(format!("standard output: {e}")));
    }
    if let Some(mut w) = sink.text.take() {
        w.flush()
            .map_err(|e| Failure::Io(format!("standard output: {e}")))?;
    }
    let mut factors = sink.factors;

    match cli.format {
        Format::Text => {
            if cli.stats {
                println!(
                    "# stats n={} z={} r={} blocks_read={} st_leaves={} st_vertices={} \
                     trie_nodes={} wavelet_bits={}",
                    stats.n,
                    stats.factors,
                    stats.r,
                    stats.blocks_read,
                    stats.st_leaves,
                    stats.st_vertices,
                    stats.trie_nodes,
                    stats.wavelet_bits
                );
            }
        }
        Format::Json => {
            let rows: Vec<Row> = factors.iter().map(Row::from).collect();
            let mut out = BufWriter::new(io::stdout().lock());
            let res = if cli.stats {
                serde_json::to_writer(
                    &mut out,
                    &Report { factors: rows, stats: StatsOut::new(&stats) },
                )
            } else {
                serde_json::to_writer(&mut out, &rows)
            };
            res.map_err(|e| Failure::Io(format!("standard output: {e}")))?;
            writeln!(out).and_then(|()| out.flush())
                .map_err(|e| Failure::Io(format!("standard output: {e}")))?;
        }
    }

    check_tiling(&factors, codes.len())?;

    if cli.verify {
        if codes.len() > cli.verify_cap {
            return Err(Failure::Config(format!(
                "input of {} characters exceeds the verification cap {}; raise \
                 --verify-cap to opt into the longer check",
                codes.len(),
                cli.verify_cap
            )));
        }
        // The fault is injected into the verifier's copy only; stdout always
        // carries the engine's real output.
        if let Some(idx) = cli.inject_fault {
            inject_fault(&mut factors, idx)?;
        }
        match verify::check(&codes, sigma, &factors) {
            Ok(()) => eprintln!("verify: PASS"),
            Err((i, detail)) => {
                return Err(Failure::VerifyFail(format!(
                    "verify: FAIL at factor {i}: {detail}"
                )))
            }
        }
    }
    Ok(())
}

/// Flips one factor's claim (literal <-> copy) so the verifier must reject
/// it; the factor still tiles the text, exercising the content checks.
fn inject_fault(factors: &mut [Factor], idx: usize) -> Result<(), Failure> {
    if idx == 0 || idx > factors.len() {
        return Err(Failure::Config(format!(
            "--inject-fault index {idx} is outside 1..={}",
            factors.len()
        )));
    }
    let f = &mut factors[idx - 1];
    match f.kind {
        FactorKind::Literal => {
            f.kind = FactorKind::Copy;
            f.witness = Some((f.start - 1).max(1));
        }
        FactorKind::Copy => {
            f.kind = FactorKind::Literal;
            f.witness = None;
        }
    }
    eprintln!("blz: corrupted factor {idx} before verification (negative control)");
    Ok(())
}

struct Discard;

impl FactorSink for Discard {
    fn factor(&mut self, _f: Factor) {}
}

fn cmd_bench(cli: &Cli, sizes: &[usize]) -> Result<(), Failure> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Failure::Config("--bench sizes must be ascending".into()));
    }
    let base: Option<(Vec<Code>, u32)> = if cli.input.is_some() || cli.stdin {
        let bytes = read_input(cli)?;
        Some(resolve_alphabet(cli, &bytes)?)
    } else {
        None
    };
    for &n in sizes {
        if n == 0 || n > CAPACITY {
            return Err(Failure::Config(format!(
                "bench size {n} is outside 1..={CAPACITY}"
            )));
        }
        if let Some((data, _)) = &base {
            if n > data.len() {
                return Err(Failure::Config(format!(
                    "bench size {n} exceeds the input length {}",
                    data.len()
                )));
            }
        }
    }
    let mut out = BufWriter::new(io::stdout().lock());
    let io_err = |e: io::Error| Failure::Io(format!("standard output: {e}"));
    writeln!(out, "n,seconds,leaves,trie_nodes,wavelet_bits,ratio").map_err(io_err)?;
    let mut prev: Option<f64> = None;
    for &n in sizes {
        let owned: Vec<Code>;
        let (codes, sigma): (&[Code], u32) = match &base {
            Some((data, s)) => (&data[..n], *s),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.wrapping_add(n as u64));
                owned = (0..n).map(|_| rng.gen_range(0..4u32)).collect();
                (&owned, 4)
            }
        };
        let params = make_params(cli, n, sigma)?;
        let start = Instant::now();
        let mut engine = Engine::new(params, SliceSource::new(codes, sigma));
        let stats = engine
            .run(&mut Discard)
            .map_err(|e| Failure::Io(e.to_string()))?;
        let secs = start.elapsed().as_secs_f64();
        let ratio = prev.map(|p| format!("{:.2}", secs / p)).unwrap_or_default();
        writeln!(
            out,
            "{},{:.6},{},{},{},{}",
            n, secs, stats.st_leaves, stats.trie_nodes, stats.wavelet_bits, ratio
        )
        .map_err(io_err)?;
        prev = Some(secs);
    }
    out.flush().map_err(io_err)
}
