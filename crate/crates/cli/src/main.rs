//! `napoly`: compile weighted automata onto the STE+ overlay, simulate inputs,
//! align sequences and cross-check against the Viterbi oracle.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use napoly::align::{read_sequences, AlignError};
use napoly::bench::{self, BenchError, BenchReport};
use napoly::compiler::{CompileError, PlaceOptions};
use napoly::pipeline::PipelineError;
use napoly::sim::{run_streaming, SimError};
use napoly::wfa::WfaError;
use napoly::{
    build_alignment_wfa, compile, enumerate_paths_score, run, viterbi_score, Alphabet, Best,
    Compiled, OverlayParams, PlacedDesign, ScoreMode, ScoringScheme, SymbolClass,
    WeightedAutomaton,
};
use rayon::prelude::*;
use serde::Serialize;

mod error;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "napoly",
    version,
    about = "Weighted-NFA overlay compiler and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an automaton JSON file into a placed design file.
    Compile(CompileArgs),
    /// Score sequences against a pattern through a compiled alignment overlay.
    Align(AlignArgs),
    /// Simulate a design over an input file and stream match records.
    Run(RunArgs),
    /// Measure simulator throughput on seeded pseudo-random input.
    Bench(BenchArgs),
    /// Compare simulated scores with the Viterbi and enumeration oracles.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Local,
    Global,
}

impl From<Mode> for ScoreMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Local => ScoreMode::Local,
            Mode::Global => ScoreMode::Global,
        }
    }
}

#[derive(Args)]
struct OverlayArgs {
    /// Number of STE+ cells.
    #[arg(long, default_value_t = 64)]
    array_size: usize,
    /// Maximum fan-out per cell.
    #[arg(long, default_value_t = 16)]
    fanout: usize,
    #[arg(long, value_enum, default_value = "global")]
    mode: Mode,
    /// Placement repair iterations.
    #[arg(long, default_value_t = PlaceOptions::default().budget)]
    budget: usize,
    /// Seed for placement and generated inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OverlayArgs {
    fn params(&self) -> Result<OverlayParams, CliError> {
        Ok(OverlayParams::new(self.array_size, self.fanout)?)
    }

    fn options(&self) -> PlaceOptions {
        PlaceOptions {
            budget: self.budget,
            seed: self.seed,
        }
    }

    fn compile(&self, wfa: &WeightedAutomaton) -> Result<Compiled, CliError> {
        Ok(compile(
            wfa,
            &self.params()?,
            self.mode.into(),
            &self.options(),
        )?)
    }
}

#[derive(Args)]
struct CompileArgs {
    /// Automaton JSON file.
    automaton: PathBuf,
    #[command(flatten)]
    overlay: OverlayArgs,
    /// Design file to write (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long = "match", default_value_t = 2, allow_negative_numbers = true)]
    matched: i32,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    mismatch: i32,
    #[arg(long, default_value_t = -2, allow_negative_numbers = true)]
    gap: i32,
    /// Symbols of the alignment alphabet.
    #[arg(long, default_value = "ACGT")]
    alphabet: String,
}

#[derive(Args)]
struct AlignArgs {
    /// Pattern to align against.
    #[arg(long)]
    pattern: String,
    /// Sequences, one per line; blank lines and '>' headers are skipped.
    sequences: PathBuf,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[command(flatten)]
    overlay: OverlayArgs,
    /// Recompute every score with the Viterbi DP; a disagreement on an exact
    /// design is a hard failure.
    #[arg(long)]
    oracle: bool,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Design file from `napoly compile`.
    design: PathBuf,
    /// Input symbols; one trailing newline is ignored.
    input: PathBuf,
    /// Score mode (default: the mode the design was compiled for).
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Match record TSV file. The JSON summary then goes to stdout instead of stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Design file; without one, synthetic designs are swept over `--sizes`.
    design: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "1024,4096,16384")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    symbols: usize,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report file (default: a table on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Automaton JSON file.
    automaton: PathBuf,
    /// Inputs, one per line.
    inputs: PathBuf,
    #[command(flatten)]
    overlay: OverlayArgs,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Align(a) => cmd_align(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("napoly: {e}");
            if let Some(detail) = e.detail() {
                eprintln!("{detail}");
            }
            ExitCode::from(e.code())
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| CliError::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_compile(args: CompileArgs) -> Result<(), CliError> {
    let wfa = WeightedAutomaton::from_json(&read_text(&args.automaton)?)?;
    let compiled = args.overlay.compile(&wfa)?;
    let design = &compiled.design;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "{}", design.to_json())?;
    out.flush()?;
    eprintln!(
        "placed {} nodes on {} cells (f = {}), exact: {}",
        compiled.anml.len(),
        design.params.array_size(),
        design.params.fanout(),
        design.exact()
    );
    if !design.missing_restarts.is_empty() {
        eprintln!(
            "nodes without restart connection: {:?}",
            design.missing_restarts
        );
    }
    Ok(())
}

struct AlignLine {
    index: usize,
    score: Option<i32>,
    offset: Option<usize>,
    exact: bool,
    oracle: Option<Option<Best>>,
}

impl AlignLine {
    fn mismatch(&self) -> bool {
        let sim = self.score.zip(self.offset);
        match self.oracle {
            Some(want) => self.exact && sim != want.map(|b| (b.score, b.offset)),
            None => false,
        }
    }

    fn tsv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let mut line = format!(
            "{}\t{}\t{}\t{}",
            self.index,
            opt(self.score.map(|s| s.to_string())),
            opt(self.offset.map(|o| o.to_string())),
            self.exact
        );
        if let Some(want) = self.oracle {
            let status = if self.mismatch() {
                "MISMATCH"
            } else if self.exact {
                "ok"
            } else {
                "inexact"
            };
            line += &format!("\t{}\t{status}", opt(want.map(|b| b.score.to_string())));
        }
        line
    }
}

fn cmd_align(args: AlignArgs) -> Result<(), CliError> {
    let s = &args.scoring;
    let scheme = ScoringScheme::new(s.matched, s.mismatch, s.gap)?;
    let alphabet = Alphabet::new(SymbolClass::from_bytes(s.alphabet.as_bytes()))?;
    let wfa = build_alignment_wfa(args.pattern.as_bytes(), scheme, &alphabet)?;
    let compiled = args.overlay.compile(&wfa)?;
    let mode = args.overlay.mode.into();
    let sequences = read_sequences(&read_text(&args.sequences)?);

    let lines = sequences
        .par_iter()
        .enumerate()
        .map(|(index, seq)| -> Result<AlignLine, CliError> {
            let sim = run(&compiled.design, seq, mode)?;
            let oracle = if args.oracle {
                Some(viterbi_score(&compiled.wfa, seq, mode)?)
            } else {
                None
            };
            Ok(AlignLine {
                index,
                score: sim.best.map(|b| b.score),
                offset: sim.best.map(|b| b.offset),
                exact: sim.exact,
                oracle,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = output(args.out.as_deref())?;
    write!(out, "#index\tscore\toffset\texact")?;
    if args.oracle {
        write!(out, "\tviterbi\tstatus")?;
    }
    writeln!(out)?;
    for line in &lines {
        writeln!(out, "{}", line.tsv())?;
    }
    out.flush()?;
    let mismatches = lines.iter().filter(|l| l.mismatch()).count();
    if mismatches > 0 {
        return Err(CliError::OracleMismatch(mismatches));
    }
    Ok(())
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    let mut bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    Ok(bytes)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let design = PlacedDesign::from_json(&read_text(&args.design)?)?;
    let input = read_input(&args.input)?;
    let mode = args.mode.map_or(design.mode, ScoreMode::from);
    let mut out = output(args.out.as_deref())?;
    let mut write_err = None;
    let summary = run_streaming(&design, &input, mode, |r| {
        if write_err.is_none() {
            if let Err(e) = writeln!(out, "{}", r.to_tsv()) {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    out.flush()?;
    drop(out);
    let json = serde_json::to_string(&summary).expect("summary serializes");
    if args.out.is_some() {
        println!("{json}");
    } else {
        eprintln!("{json}");
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let reports: Vec<BenchReport> = match &args.design {
        Some(path) => {
            let design = PlacedDesign::from_json(&read_text(path)?)?;
            vec![bench::bench_design(
                &design,
                args.symbols,
                args.repetitions,
                args.seed,
            )?]
        }
        None => bench::sweep(&args.sizes, args.symbols, args.repetitions, args.seed)?,
    };
    let mut out = output(args.out.as_deref())?;
    if args.out.is_some() {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        )?;
    } else {
        writeln!(
            out,
            "cells\tsymbols\trepetitions\trecords\tcycles\tsymbols_per_sec"
        )?;
        for r in &reports {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:.0}",
                r.cells, r.symbols, r.repetitions, r.records, r.cycles, r.median_symbols_per_sec
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OracleLine {
    index: usize,
    simulation: Option<Best>,
    viterbi: Option<Best>,
    /// Present when the automaton and input are small enough to enumerate.
    enumerate: Option<Option<Best>>,
    exact: bool,
    agree: bool,
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let wfa = WeightedAutomaton::from_json(&read_text(&args.automaton)?)?;
    let compiled = args.overlay.compile(&wfa)?;
    let mode = args.overlay.mode.into();
    let inputs = read_sequences(&read_text(&args.inputs)?);
    let lines = inputs
        .par_iter()
        .enumerate()
        .map(|(index, input)| -> Result<OracleLine, CliError> {
            let sim = run(&compiled.design, input, mode)?;
            let viterbi = viterbi_score(&compiled.wfa, input, mode)?;
            let enumerate = match enumerate_paths_score(&wfa, input, mode) {
                Ok(best) => Some(best),
                Err(WfaError::TooLarge { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let agree = sim.best == viterbi && enumerate.is_none_or(|e| e == viterbi);
            Ok(OracleLine {
                index,
                simulation: sim.best,
                viterbi,
                enumerate,
                exact: sim.exact,
                agree,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = output(args.out.as_deref())?;
    for line in &lines {
        writeln!(
            out,
            "{}",
            serde_json::to_string(line).expect("line serializes")
        )?;
    }
    out.flush()?;
    let mismatches = lines.iter().filter(|l| l.exact && !l.agree).count();
    if mismatches > 0 {
        return Err(CliError::OracleMismatch(mismatches));
    }
    Ok(())
}

impl From<AlignError> for CliError {
    fn from(e: AlignError) -> Self {
        match e {
            AlignError::DegenerateScheme { .. } | AlignError::EmptyAlphabet => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<WfaError> for CliError {
    fn from(e: WfaError) -> Self {
        match e {
            WfaError::Parse(_) => CliError::Parse(e.to_string()),
            WfaError::ScoreOverflow => CliError::Overflow(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match &e {
            CompileError::Parse(_) => CliError::Parse(e.to_string()),
            CompileError::Infeasible { violations } => CliError::Infeasible {
                summary: e.to_string(),
                detail: violations
                    .iter()
                    .map(|v| format!("  {v}"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            },
            CompileError::TooManyNodes { .. } => CliError::Infeasible {
                summary: e.to_string(),
                detail: String::new(),
            },
            CompileError::InvalidParams(_) => CliError::Usage(e.to_string()),
            CompileError::IllegalPlacement(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Automaton(e) => e.into(),
            PipelineError::Compile(e) => e.into(),
            PipelineError::Invalid(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::ScoreOverflow { .. } => CliError::Overflow(e.to_string()),
            SimError::Malformed(_) => CliError::Parse(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Compile(e) => e.into(),
            BenchError::Sim(e) => e.into(),
            BenchError::Nondeterministic(..) => CliError::Other(e.to_string()),
        }
    }
}
