//! Command-line front end. Every report is JSON with exact rational strings
//! and deterministic key order; `--format csv` is offered on orbit dumps.
//!
//! Exit codes are uniform across subcommands: 0 success or verified, 1 a
//! bounded search came back negative (no certificate, "never", inconclusive,
//! not primitive, no decomposition), 2 invalid input or a failed check.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use horseforge::{
    asymptotic_resolve, build_blowup, conjugacy_self_test, cycle_verify, default_lengths,
    find_horseshoe_with_cap, interval_orbit_check, mixing_decomposition, obstruction_report,
    orbit_closure, pipeline_with_cap, power_block_encode, pullback, semiconjugacy_check,
    verify_horseshoe, BlowupModel, EPSeq, HorseshoeCert, Interval, IntervalOrbitReport,
    LabeledGraph, PLMap, Primitivity, Rat, Word, DEFAULT_BREAKPOINT_CAP,
};

#[derive(Parser)]
#[command(name = "horseforge", version, about = "Exact piecewise-linear interval dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Horseshoe certificates: search, verification, pullbacks, self-tests.
    Horseshoe {
        #[command(subcommand)]
        cmd: HorseshoeCmd,
    },
    /// Lap counting and entropy estimates.
    Entropy {
        #[command(subcommand)]
        cmd: EntropyCmd,
    },
    /// Blow-up models: construction, exactness checks, obstruction reports.
    Blowup {
        #[command(subcommand)]
        cmd: BlowupCmd,
    },
    /// Eventually periodic sequences and shift-space utilities.
    Shift {
        #[command(subcommand)]
        cmd: ShiftCmd,
    },
    /// Whole-map analysis: decomposition, certificate pipeline, cycles.
    Analyze {
        #[command(subcommand)]
        cmd: AnalyzeCmd,
    },
}

#[derive(Subcommand)]
enum HorseshoeCmd {
    /// Search for a certificate among powers 1..=max-power.
    Find {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "max-power")]
        max_power: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate against a map, exactly.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Print the endpoints of the pullback interval of a binary word.
    Pullback {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Itinerary round-trip over all (or sampled) words of a given depth.
    Selftest {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// Exact lap counts of f^n for n = 1..=max-power.
    Laps {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "max-power")]
        max_power: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BlowupCmd {
    /// Build a model from a map and an orbit spec, then verify it.
    Build {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        orbit: PathBuf,
        /// Collar half-width around inserted endpoints, as a rational.
        #[arg(long, default_value = "1/1000")]
        collar: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        /// Where to write the model JSON; the report always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the exactness checks on a stored model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gap trail from one insertion to its forward images.
    Obstruction {
        #[arg(long)]
        model: PathBuf,
        /// 1-based insertion index; defaults to the deepest insertion.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ShiftCmd {
    /// Least shift after which two sequences agree forever, or "never".
    Asymptotic {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Recode a sequence over blocks of the given size.
    Blockcode {
        #[arg(long)]
        p: String,
        #[arg(long)]
        block: usize,
    },
    /// Decide primitivity of a labeled graph's adjacency structure.
    Primitive {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Decomposition, horseshoe search, singleton rate, self-test, bound.
    Pipeline {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "max-power", default_value_t = 8)]
        max_power: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a fixed point whose two sides the map exchanges.
    Decompose {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify that intervals "lo,hi;lo,hi;..." form an exact cycle.
    Cycle {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        cycle: String,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Cmd::Horseshoe { cmd } => run_horseshoe(cmd),
        Cmd::Entropy { cmd } => run_entropy(cmd),
        Cmd::Blowup { cmd } => run_blowup(cmd),
        Cmd::Shift { cmd } => run_shift(cmd),
        Cmd::Analyze { cmd } => run_analyze(cmd),
    }
}

/// Composition cap, overridable through HF_BREAKPOINT_CAP.
fn breakpoint_cap() -> Result<usize> {
    match env::var("HF_BREAKPOINT_CAP") {
        Ok(text) => {
            let cap: usize = text
                .trim()
                .parse()
                .with_context(|| format!("HF_BREAKPOINT_CAP is not a count: {text:?}"))?;
            if cap == 0 {
                bail!("HF_BREAKPOINT_CAP must be positive");
            }
            Ok(cap)
        }
        Err(env::VarError::NotPresent) => Ok(DEFAULT_BREAKPOINT_CAP),
        Err(e) => Err(anyhow!("HF_BREAKPOINT_CAP: {e}")),
    }
}

fn load_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_word(text: &str) -> Result<Word> {
    let symbols = text
        .chars()
        .map(|c| {
            c.to_digit(10)
                .ok_or_else(|| anyhow!("word symbol {c:?} is not a digit"))
        })
        .collect::<Result<Vec<u32>>>()?;
    Word::new(symbols, 2).map_err(Into::into)
}

fn parse_rat(text: &str) -> Result<Rat> {
    text.parse::<Rat>()
        .map_err(|e| anyhow!("{e} in {text:?}"))
}

fn run_horseshoe(cmd: HorseshoeCmd) -> Result<u8> {
    match cmd {
        HorseshoeCmd::Find { map, max_power, out } => {
            let f: PLMap = load_json(&map)?;
            match find_horseshoe_with_cap(&f, max_power, breakpoint_cap()?)? {
                Some(cert) => {
                    emit(&out, &to_json(&cert)?)?;
                    Ok(0)
                }
                None => {
                    println!("no certificate up to power {max_power}");
                    Ok(1)
                }
            }
        }
        HorseshoeCmd::Verify { map, cert } => {
            let f: PLMap = load_json(&map)?;
            let cert: HorseshoeCert = load_json(&cert)?;
            if verify_horseshoe(&f, &cert)? {
                println!("verified");
                Ok(0)
            } else {
                bail!("certificate rejected: intervals overlap or images do not cover");
            }
        }
        HorseshoeCmd::Pullback { map, cert, word } => {
            let f: PLMap = load_json(&map)?;
            let cert: HorseshoeCert = load_json(&cert)?;
            let w = parse_word(&word)?;
            let j = pullback(&f, &cert, &w)?;
            println!("{} {}", j.lo(), j.hi());
            Ok(0)
        }
        HorseshoeCmd::Selftest { map, cert, depth, samples, out } => {
            let f: PLMap = load_json(&map)?;
            let cert: HorseshoeCert = load_json(&cert)?;
            let report = conjugacy_self_test(&f, &cert, depth, samples)?;
            emit(&out, &to_json(&report)?)?;
            if report.all_pass {
                Ok(0)
            } else {
                bail!("self-test failed for {} of {} words", report.failures, report.words_checked);
            }
        }
    }
}

fn run_entropy(cmd: EntropyCmd) -> Result<u8> {
    match cmd {
        EntropyCmd::Laps { map, max_power, out } => {
            if max_power == 0 {
                bail!("--max-power must be at least 1");
            }
            let f: PLMap = load_json(&map)?;
            let cap = breakpoint_cap()?;
            let table = (1..=max_power)
                .map(|n| f.lap_entropy_estimate_with_cap(n, cap))
                .collect::<horseforge::Result<Vec<_>>>()?;
            emit(&out, &to_json(&table)?)?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct BlowupReport {
    semiconjugacy: horseforge::SemiconjugacyReport,
    interval_orbits: Vec<IntervalOrbitReport>,
    all_exact: bool,
}

fn verify_model(model: &BlowupModel, samples: usize, horizon: usize) -> Result<BlowupReport> {
    let semiconjugacy = semiconjugacy_check(model, samples, horizon)?;
    let interval_orbits = (0..model.points().len())
        .map(|j| interval_orbit_check(model, j, horizon))
        .collect::<horseforge::Result<Vec<_>>>()?;
    let all_exact = semiconjugacy.off_collar_exact
        && semiconjugacy.within_bound
        && interval_orbits.iter().all(|r| r.exact);
    Ok(BlowupReport { semiconjugacy, interval_orbits, all_exact })
}

fn orbit_csv(reports: &[IntervalOrbitReport]) -> String {
    let mut text = String::from("insertion,step,visited,length\n");
    for report in reports {
        for (step, (visited, length)) in report.path.iter().zip(&report.lengths).enumerate() {
            text.push_str(&format!("{},{step},{visited},{length}\n", report.start));
        }
    }
    text
}

fn obstruction_csv(report: &horseforge::ObstructionReport) -> String {
    let mut text = String::from("step,insertion,gap\n");
    for (k, gap) in report.gaps.iter().enumerate() {
        text.push_str(&format!("{},{},{gap}\n", k + 1, report.path[k + 1]));
    }
    text
}

fn finish_blowup_report(report: &BlowupReport) -> Result<u8> {
    if report.all_exact {
        Ok(0)
    } else {
        bail!("exactness checks failed; see report");
    }
}

fn run_blowup(cmd: BlowupCmd) -> Result<u8> {
    match cmd {
        BlowupCmd::Build { map, orbit, collar, samples, horizon, out } => {
            let g: PLMap = load_json(&map)?;
            let spec: horseforge::OrbitSpec = load_json(&orbit)?;
            let closure = orbit_closure(&g, &spec.seeds, spec.preimage_depth)?;
            let lengths = default_lengths(closure.len());
            let width = parse_rat(&collar)?;
            let model = build_blowup(&g, &closure, &lengths, &width)?;
            if let Some(path) = &out {
                fs::write(path, to_json(&model)?)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            let report = verify_model(&model, samples, horizon)?;
            print!("{}", to_json(&report)?);
            finish_blowup_report(&report)
        }
        BlowupCmd::Check { model, samples, horizon, format, out } => {
            let model: BlowupModel = load_json(&model)?;
            let report = verify_model(&model, samples, horizon)?;
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => orbit_csv(&report.interval_orbits),
            };
            emit(&out, &text)?;
            finish_blowup_report(&report)
        }
        BlowupCmd::Obstruction { model, index, horizon, format, out } => {
            let model: BlowupModel = load_json(&model)?;
            let j = match index {
                Some(0) => bail!("--index is 1-based"),
                Some(i) => i - 1,
                None => model.deepest_insertion(),
            };
            let report = obstruction_report(&model, j, horizon)?;
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => obstruction_csv(&report),
            };
            emit(&out, &text)?;
            if report.min_gap_positive {
                Ok(0)
            } else {
                bail!("insertion {} touches one of its images", report.start);
            }
        }
    }
}

/// Parses both sequences in "u(v)" notation over a shared alphabet.
fn parse_pair(p: &str, q: &str) -> Result<(EPSeq, EPSeq)> {
    let first = EPSeq::parse(p, 2).with_context(|| format!("--p {p:?}"))?;
    let second = EPSeq::parse(q, 2).with_context(|| format!("--q {q:?}"))?;
    let alphabet = first.alphabet().max(second.alphabet());
    Ok((
        EPSeq::parse(p, alphabet).with_context(|| format!("--p {p:?}"))?,
        EPSeq::parse(q, alphabet).with_context(|| format!("--q {q:?}"))?,
    ))
}

fn run_shift(cmd: ShiftCmd) -> Result<u8> {
    match cmd {
        ShiftCmd::Asymptotic { p, q } => {
            let (p, q) = parse_pair(&p, &q)?;
            match asymptotic_resolve(&p, &q)? {
                Some(n) => {
                    println!("{n}");
                    Ok(0)
                }
                None => {
                    println!("never");
                    Ok(1)
                }
            }
        }
        ShiftCmd::Blockcode { p, block } => {
            let s = EPSeq::parse(&p, 2).with_context(|| format!("--p {p:?}"))?;
            println!("{}", power_block_encode(&s, block)?);
            Ok(0)
        }
        ShiftCmd::Primitive { graph } => {
            let graph: LabeledGraph = load_json(&graph)?;
            match graph.primitivity() {
                Primitivity::Primitive { exponent } => {
                    println!("k={exponent}");
                    Ok(0)
                }
                Primitivity::Imprimitive(reason) => {
                    let text = match reason {
                        horseforge::Imprimitivity::NotStronglyConnected => {
                            "not strongly connected".to_string()
                        }
                        horseforge::Imprimitivity::Period(p) => format!("period {p}"),
                    };
                    println!("not primitive: {text}");
                    Ok(1)
                }
            }
        }
    }
}

/// Intervals in "lo,hi;lo,hi;..." notation.
fn parse_cycle(text: &str) -> Result<Vec<Interval>> {
    text.split(';')
        .map(|part| {
            let (lo, hi) = part
                .split_once(',')
                .ok_or_else(|| anyhow!("interval {part:?} is not \"lo,hi\""))?;
            Interval::new(parse_rat(lo.trim())?, parse_rat(hi.trim())?).map_err(Into::into)
        })
        .collect()
}

fn run_analyze(cmd: AnalyzeCmd) -> Result<u8> {
    match cmd {
        AnalyzeCmd::Pipeline { map, max_power, out } => {
            let f: PLMap = load_json(&map)?;
            let report = pipeline_with_cap(&f, max_power, breakpoint_cap()?)?;
            let conclusive = report.certificate.is_some();
            emit(&out, &to_json(&report)?)?;
            Ok(if conclusive { 0 } else { 1 })
        }
        AnalyzeCmd::Decompose { map, out } => {
            let f: PLMap = load_json(&map)?;
            match mixing_decomposition(&f)? {
                Some(decomposition) => {
                    emit(&out, &to_json(&decomposition)?)?;
                    Ok(0)
                }
                None => {
                    println!("none");
                    Ok(1)
                }
            }
        }
        AnalyzeCmd::Cycle { map, cycle } => {
            let f: PLMap = load_json(&map)?;
            let intervals = parse_cycle(&cycle)?;
            if cycle_verify(&f, &intervals)? {
                println!("verified");
                Ok(0)
            } else {
                bail!("intervals do not form an exact cycle");
            }
        }
    }
}
