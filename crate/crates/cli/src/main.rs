//! `logbesov`: command-line front end for the Littlewood-Paley toolkit.
//!
//! Exit status is 0 when every configured assertion passes, 1 when some
//! assertion fails, and 2 on usage or evaluation errors.

mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use logbesov::criteria::{verdict, CriterionReport};
use logbesov::experiments::{
    run_charfun, run_exp_growth, run_sandwich, save_rows, write_rows, ExperimentConfig, TableFormat,
};
use logbesov::gallery::{make_modulated_packet, IndicatorShape, LowerBoundCase, PacketSpec};
use logbesov::norms::{besov_norm, diffspace_norm, dini_norm, tl_norm_inf, BesovParams, DiffParams, NormReport};
use logbesov::paraproduct::multiplier_lower_bound;
use logbesov::{check_partition, DyadicPartition, GridSpec, LpExponent, PartitionKind, SampledFunction};
use serde_json::json;

use spec::{build, parse_range, Spec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] logbesov::Error),
    #[error("spec: {0}")]
    Spec(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser)]
#[command(name = "logbesov", version, about = "Besov spaces with logarithmic smoothness: norms, multiplier criteria, experiments")]
struct Cli {
    /// Grid as `J=14`, `J=10,dim=2` or just `14`.
    #[arg(long, global = true, default_value = "J=14")]
    grid: String,
    /// Output file (single reports) or directory (experiment tables).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: TableFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Radial,
    Tensor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Besov,
    Tl,
    Dini,
    Diffspace,
}

#[derive(clap::Args)]
struct Input {
    /// Sampled function in `.sfn` format.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Gallery spec, e.g. `exp:m=8` or `indicator:cube`.
    #[arg(long = "f")]
    function: Option<String>,
}

#[derive(clap::Args)]
struct Sweep {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<LpExponent>>,
    /// Inclusive range of dyadic exponents, `3-10`.
    #[arg(long)]
    m_range: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check telescoping exactness and annulus support of the partition.
    PartitionCheck {
        #[arg(long, value_enum, default_value = "radial")]
        kind: Kind,
        /// Also write the partition in `.dpu` format.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Evaluate one norm.
    Norm {
        #[arg(long, value_enum, default_value = "besov")]
        space: Space,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value = "inf")]
        p: LpExponent,
        #[arg(long, default_value = "inf")]
        q: LpExponent,
        /// Difference order for `diffspace`.
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Multiplier criteria and verdict for `B^{0,b}_{p,∞}`.
    Criteria {
        #[arg(long)]
        p: LpExponent,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[command(flatten)]
        input: Input,
    },
    /// Lower bound for the multiplier norm from a test family.
    Lowerbound {
        #[arg(long = "f")]
        function: String,
        /// `packets:cases=1-5[,m=8]`.
        #[arg(long, default_value = "packets:cases=1-5")]
        family: String,
        #[arg(long)]
        p: LpExponent,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// Growth of criterion values and lower bounds for `e^{i 2^m x}`.
    ExpGrowth {
        #[command(flatten)]
        sweep: Sweep,
        /// Packet cases for lower-bound sweeps, `1,2,3,5`.
        #[arg(long, value_delimiter = ',')]
        cases: Option<Vec<u8>>,
    },
    /// Littlewood-Paley pieces of indicator functions.
    Charfun {
        #[arg(long, value_delimiter = ',', default_value = "cube")]
        shapes: Vec<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
    },
    /// Lower bounds against sufficiency functionals.
    Sandwich {
        #[command(flatten)]
        sweep: Sweep,
    },
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let mut j = None;
    let mut dim = 1usize;
    for part in text.split(',') {
        let (k, v) = part.split_once('=').unwrap_or(("J", part));
        let bad = || CliError::Spec(format!("bad grid '{text}'"));
        match k.trim() {
            "J" | "j" => j = Some(v.trim().parse::<u32>().map_err(|_| bad())?),
            "dim" => dim = v.trim().parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        }
    }
    Ok(GridSpec::new(dim, j.ok_or_else(|| CliError::Spec("grid needs J".into()))?)?)
}

fn load(input: &Input, grid: GridSpec) -> Result<SampledFunction, CliError> {
    match (&input.input, &input.function) {
        (Some(path), None) => Ok(logbesov::io::read_sfn(path)?),
        (None, Some(text)) => build(&Spec::parse(text)?, grid),
        _ => Err(CliError::Spec("give exactly one of --input and --f".into())),
    }
}

fn emit(out: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn norm_json(r: &NormReport) -> serde_json::Value {
    json!({ "value": r.value, "tail": r.tail, "per_level": r.per_level })
}

fn criteria_json(r: &CriterionReport) -> serde_json::Value {
    let opt = |f: &Option<logbesov::criteria::Functional>| f.as_ref().map(|f| f.value);
    json!({
        "p": r.p,
        "b": r.b,
        "terms": {
            "linf": r.term_linf,
            "term2": r.term2.value,
            "term3": r.term3.value,
            "combined": r.combined,
            "nece_term2": opt(&r.nece_term2),
            "nece_term3": opt(&r.nece_term3),
        },
        "per_level": { "term2": r.term2.per_level, "term3": r.term3.per_level },
        "tails": { "term2": r.term2.tail, "term3": r.term3.tail },
        "divergent": { "term2": r.term2.divergent, "term3": r.term3.divergent },
        "bracket": r.bracket,
        "verdict": r.verdict,
    })
}

fn config(name: &str, grid: GridSpec, sweep: &Sweep, out: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let mut c = ExperimentConfig::desk(name);
    if grid.dim() == 2 {
        c = ExperimentConfig::desk_2d(name);
    }
    c.grid = grid;
    c.m_range = (c.m_range.0, c.m_range.1.min(grid.k_max().saturating_sub(2)));
    if let Some(b) = &sweep.b_list {
        c.b_list.clone_from(b);
    }
    if let Some(p) = &sweep.p_list {
        c.p_list.clone_from(p);
    }
    if let Some(r) = &sweep.m_range {
        c.m_range = parse_range(r)?;
    }
    c.seed = sweep.seed;
    c.out = out.map(Path::to_path_buf);
    Ok(c)
}

/// Write each table to `--out` when given, and the summary rows to stdout.
fn tables<S: serde::Serialize>(
    out: Option<&Path>,
    format: TableFormat,
    name: &str,
    detail: &[impl serde::Serialize],
    summary: &[S],
) -> Result<(), CliError> {
    if let Some(dir) = out {
        save_rows(dir, &format!("{name}_rows"), detail, format)?;
        save_rows(dir, &format!("{name}_summary"), summary, format)?;
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    write_rows(summary, format, &mut lock)?;
    lock.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let grid = parse_grid(&cli.grid)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::PartitionCheck { kind, export } => {
            let kind = match kind {
                Kind::Radial => PartitionKind::Radial,
                Kind::Tensor => PartitionKind::Tensor,
            };
            let start = std::time::Instant::now();
            let partition = DyadicPartition::build(grid, kind);
            let check = check_partition(&partition);
            let seconds = start.elapsed().as_secs_f64();
            if let Some(path) = export {
                logbesov::io::write_dpu(path, &partition)?;
            }
            emit(out, &json!({ "check": check, "k_max": partition.k_max(), "seconds": seconds, "pass": check.passes() }))?;
            Ok(check.passes())
        }
        Command::Norm { space, s, b, p, q, order, input } => {
            let f = load(&input, grid)?;
            let partition = DyadicPartition::build(f.grid(), PartitionKind::Radial);
            let report = match space {
                Space::Besov => besov_norm(&f, &partition, BesovParams::new(s, b, p, q))?,
                Space::Tl => tl_norm_inf(&f, &partition, s, b, q)?,
                Space::Dini => dini_norm(&f)?,
                Space::Diffspace => diffspace_norm(&f, DiffParams { s, b, d: 0.0, p, q, m: order })?,
            };
            emit(out, &norm_json(&report))?;
            Ok(true)
        }
        Command::Criteria { p, b, input } => {
            let f = load(&input, grid)?;
            let partition = DyadicPartition::build(f.grid(), PartitionKind::Radial);
            emit(out, &criteria_json(&verdict(&f, &partition, p, b)?))?;
            Ok(true)
        }
        Command::Lowerbound { function, family, p, b } => {
            let fspec = Spec::parse(&function)?;
            let f = build(&fspec, grid)?;
            let fam = Spec::parse(&family)?;
            if fam.name != "packets" {
                return Err(CliError::Spec(format!("unknown family '{}'", fam.name)));
            }
            let m = match fam.get("m")? {
                Some(m) => m,
                None => fspec.dyadic_level().ok_or_else(|| CliError::Spec("family needs m=".into()))?,
            };
            let (lo, hi) = parse_range(fam.raw("cases").unwrap_or("1-5"))?;
            let ids: Vec<u8> = (lo..=hi).map(|c| c as u8).collect();
            let members = ids
                .iter()
                .map(|&c| Ok(make_modulated_packet(&PacketSpec::for_case(grid, m, LowerBoundCase::from_number(c)?, b))?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let partition = DyadicPartition::build(grid, PartitionKind::Radial);
            let lb = multiplier_lower_bound(&f, &partition, BesovParams::new(0.0, b, p, LpExponent::Inf), &members)?;
            emit(out, &json!({ "value": lb.value, "argmax_case": ids[lb.argmax], "ratios": lb.ratios, "m": m }))?;
            Ok(true)
        }
        Command::ExpGrowth { sweep, cases } => {
            let mut c = config("exp-growth", grid, &sweep, out)?;
            if sweep.p_list.is_none() {
                c.p_list = vec![LpExponent::ONE, LpExponent::Inf, LpExponent::Finite(4.0)];
            }
            if let Some(cases) = cases {
                c.cases = cases;
            }
            let t = run_exp_growth(&c)?;
            tables(out, cli.format, "exp_growth", &t.points, &t.fits)?;
            Ok(t.all_pass())
        }
        Command::Charfun { shapes, b } => {
            let mut c = config("charfun", grid, &Sweep { b_list: Some(vec![b]), p_list: None, m_range: None, seed: 0 }, out)?;
            c.shapes = shapes
                .iter()
                .map(|s| match s.as_str() {
                    "cube" => Ok(IndicatorShape::Cube),
                    "halfspace" => Ok(IndicatorShape::HalfSpace),
                    other => Err(CliError::Spec(format!("unknown shape '{other}'"))),
                })
                .collect::<Result<_, _>>()?;
            let t = run_charfun(&c)?;
            tables(out, cli.format, "charfun", &t.rows, &t.summaries)?;
            Ok(t.all_pass())
        }
        Command::Sandwich { sweep } => {
            let c = config("sandwich", grid, &sweep, out)?;
            let t = run_sandwich(&c)?;
            tables(out, cli.format, "sandwich", &t.rows, &t.fits)?;
            Ok(t.all_pass())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
