//! Command-line front end: evaluate coloring badness, sweep family
//! parameters, solve coloring games on finite graphs, and emit the bounds
//! report. All outputs are JSON-first; tables are rendered from the same
//! records.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chromatic_plane::badness::{expected_overlay_badness, grid_badness, mc_badness, optimize_parameter};
use chromatic_plane::bounds::{build_report, published_table_rows, RoundingMode, RowInput};
use chromatic_plane::colorings::{ColoringDescriptor, PeriodicColoring};
use chromatic_plane::game::{
    exact_game_value, lower_bound_from_graph, mwu_game_value, DEFAULT_ENUMERATION_CAP,
};
use chromatic_plane::graphs::{builtin_graph, GraphFile, UnitDistanceGraph};
use chromatic_plane::Error;

/// Fixed default seed so default runs are reproducible.
const DEFAULT_SEED: u64 = 1729;
const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

const EXIT_USAGE: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "chromatic-plane", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the badness of a coloring.
    Eval(EvalArgs),
    /// Sweep a one-parameter coloring family for minimal badness.
    Optimize(OptimizeArgs),
    /// Operations on finite unit-distance graphs.
    Graph(GraphArgs),
    /// Assemble the bounds report.
    Report(ReportArgs),
}

#[derive(Args)]
struct DescriptorArgs {
    /// Read the coloring descriptor from a JSON file.
    #[arg(long, conflicts_with_all = ["family", "width", "k", "diameter", "multiplier"])]
    descriptor: Option<PathBuf>,
    /// Coloring family: stripe, hex, isbell, overlay (file only).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    diameter: Option<f64>,
    #[arg(long)]
    multiplier: Option<u32>,
}

impl DescriptorArgs {
    fn resolve(&self) -> Result<ColoringDescriptor, CliError> {
        if let Some(path) = &self.descriptor {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            return serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("malformed descriptor: {e}")));
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::usage("--family or --descriptor required".into()))?;
        let mut fields = serde_json::Map::new();
        fields.insert("family".into(), family.into());
        if let Some(w) = self.width {
            fields.insert("width".into(), w.into());
        }
        if let Some(k) = self.k {
            fields.insert("k".into(), k.into());
        }
        if let Some(d) = self.diameter {
            fields.insert("diameter".into(), d.into());
        }
        if let Some(m) = self.multiplier {
            fields.insert("multiplier".into(), m.into());
        }
        serde_json::from_value(serde_json::Value::Object(fields)).map_err(|e| {
            CliError::usage(format!(
                "invalid descriptor: {e}; valid families: stripe, hex, isbell, overlay"
            ))
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMethod {
    Mc,
    Grid,
    OverlayExpectation,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    descriptor: DescriptorArgs,
    #[arg(long, value_enum, default_value = "mc")]
    method: EvalMethod,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    /// Offsets for the overlay-expectation method.
    #[arg(long, default_value_t = 64)]
    n_offsets: u64,
    #[arg(long, default_value_t = 256)]
    res_a: u32,
    #[arg(long, default_value_t = 256)]
    res_b: u32,
    #[arg(long, default_value_t = 512)]
    res_theta: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the JSON record here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Family to sweep: `hex` (diameter) or `stripe` (width).
    #[arg(long)]
    family: String,
    /// Colors for the hex family.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    multiplier: Option<u32>,
    #[arg(long)]
    lo: f64,
    #[arg(long)]
    hi: f64,
    /// Coarse grid size.
    #[arg(long, default_value_t = 31)]
    budget: u32,
    /// Samples per evaluation.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(subcommand)]
    command: GraphCommand,
}

#[derive(Args)]
struct GraphSource {
    /// Built-in graph name (triangle, moser, K5, path_n, cycle_n).
    #[arg(long, conflicts_with = "file")]
    builtin: Option<String>,
    /// Graph JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Unit-edge tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl GraphSource {
    fn load(&self) -> Result<UnitDistanceGraph, CliError> {
        if let Some(name) = &self.builtin {
            return builtin_graph(name).map_err(CliError::from);
        }
        let Some(path) = &self.file else {
            return Err(CliError::usage("--builtin or --file required".into()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let gf: GraphFile = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("malformed graph file: {e}")))?;
        gf.into_graph(self.tol).map_err(CliError::from)
    }
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Check that every edge of the embedding has unit length.
    Verify {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Exact chromatic number.
    Chroma {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 16)]
        k_max: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Game value: exact rational LP, or MWU with `--mwu <eps>`.
    Value {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        k: u32,
        /// Approximate with multiplicative weights at this accuracy.
        #[arg(long)]
        mwu: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Certified 1/|E| lower bound from a non-k-colorable graph.
    Bound {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

#[derive(Args)]
struct ReportArgs {
    /// Report config: JSON `{"default_rounding": "...", "rows": [...]}`.
    /// Defaults to the published-table preset with floor rounding.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json and report.md.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportConfig {
    default_rounding: RoundingMode,
    rows: Vec<RowInput>,
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: String) -> Self {
        CliError {
            message,
            code: EXIT_USAGE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Undecided | Error::CapExceeded { .. } => EXIT_UNDECIDED,
            Error::DegenerateBasis
            | Error::InvalidParameter(_)
            | Error::InvalidHexPattern { .. }
            | Error::UnknownGraph(_)
            | Error::MissingCoordinates
            | Error::NoBound(_)
            | Error::Malformed(_) => EXIT_USAGE,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

fn print_record<T: Serialize>(record: &T, output: Option<&Path>) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(record).map_err(|e| CliError {
        message: format!("serialization failed: {e}"),
        code: EXIT_INTERNAL,
    })?;
    println!("{json}");
    if let Some(path) = output {
        std::fs::write(path, &json).map_err(|e| CliError {
            message: format!("cannot write {}: {e}", path.display()),
            code: EXIT_USAGE,
        })?;
    }
    Ok(())
}

fn run_eval(args: &EvalArgs) -> Result<(), CliError> {
    let descriptor = args.descriptor.resolve()?;
    let coloring = PeriodicColoring::from_descriptor(&descriptor)?;
    let estimate = match args.method {
        EvalMethod::Mc => mc_badness(&coloring, args.n, args.seed),
        EvalMethod::Grid => grid_badness(&coloring, args.res_a, args.res_b, args.res_theta),
        EvalMethod::OverlayExpectation => {
            // average over patch offsets; the base is the descriptor itself,
            // or the overlay's base if an overlay was given
            let base = match &descriptor {
                ColoringDescriptor::Overlay { base, .. } => {
                    PeriodicColoring::from_descriptor(base)?
                }
                _ => coloring,
            };
            let per_offset = (args.n / args.n_offsets.max(1)).max(1);
            expected_overlay_badness(&base, args.n_offsets, per_offset, args.seed)
        }
    };
    eprintln!(
        "family={:<8} method={:?} p_hat={:.6} err={:.2e} n={}",
        match &descriptor {
            ColoringDescriptor::Stripe { .. } => "stripe",
            ColoringDescriptor::Hex { .. } => "hex",
            ColoringDescriptor::Isbell { .. } => "isbell",
            ColoringDescriptor::Overlay { .. } => "overlay",
        },
        estimate.method,
        estimate.p_hat,
        estimate.err,
        estimate.n
    );
    print_record(&estimate, args.output.as_deref())
}

fn run_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    if !(args.lo < args.hi) {
        return Err(CliError::usage(format!(
            "--lo must be below --hi, got [{}, {}]",
            args.lo, args.hi
        )));
    }
    let result = match args.family.as_str() {
        "hex" => {
            let k = args
                .k
                .ok_or_else(|| CliError::usage("hex sweep requires --k".into()))?;
            let m = args
                .multiplier
                .unwrap_or_else(|| chromatic_plane::colorings::default_multiplier(k));
            optimize_parameter(
                |d| PeriodicColoring::hex(k, d, m),
                args.lo,
                args.hi,
                args.budget,
                args.n,
                args.seed,
            )
        }
        "stripe" => optimize_parameter(
            PeriodicColoring::stripes,
            args.lo,
            args.hi,
            args.budget,
            args.n,
            args.seed,
        ),
        other => {
            return Err(CliError::usage(format!(
                "unknown sweep family `{other}`; valid: hex, stripe"
            )))
        }
    }?;
    eprintln!(
        "best_param={:.6} p_hat={:.6}",
        result.best_param, result.estimate.p_hat
    );
    print_record(&result, args.output.as_deref())
}

fn run_graph(args: &GraphArgs) -> Result<(), CliError> {
    match &args.command {
        GraphCommand::Verify { source } => {
            let g = source.load()?;
            let report = g.verify_unit_embedding(source.tol)?;
            print_record(&report, None)?;
            if !report.pass {
                return Err(CliError::usage("embedding verification failed".into()));
            }
            Ok(())
        }
        GraphCommand::Chroma {
            source,
            k_max,
            budget,
        } => {
            let g = source.load()?;
            let chi = g.chromatic_number(*k_max, *budget)?;
            print_record(&serde_json::json!({ "chromatic_number": chi }), None)
        }
        GraphCommand::Value {
            source,
            k,
            mwu,
            cap,
            seed,
        } => {
            let g = source.load()?;
            let solution = match mwu {
                Some(eps) => mwu_game_value(&g, *k, *eps, *seed)?,
                None => exact_game_value(&g, *k, *cap)?,
            };
            print_record(&solution, None)
        }
        GraphCommand::Bound { source, k, budget } => {
            let g = source.load()?;
            let bound = lower_bound_from_graph(&g, *k, *budget)?;
            print_record(
                &serde_json::json!({
                    "k": k,
                    "edges": g.edges().len(),
                    "lower_bound_pk": format!("{}/{}", bound.numer(), bound.denom()),
                }),
                None,
            )
        }
    }
}

fn run_report(args: &ReportArgs) -> Result<(), CliError> {
    let (rows, rounding) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            let config: ReportConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("malformed report config: {e}")))?;
            (config.rows, config.default_rounding)
        }
        None => (published_table_rows(), RoundingMode::Floor),
    };
    let report = build_report(&rows, rounding)?;
    for row in &report.rows {
        if row.incomplete {
            eprintln!("warning: k={} row incomplete", row.k);
        }
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError {
        message: format!("serialization failed: {e}"),
        code: EXIT_INTERNAL,
    })?;
    let md = report.to_markdown();
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::usage(format!("cannot create out dir: {e}")))?;
    let json_path = args.out_dir.join("report.json");
    let md_path = args.out_dir.join("report.md");
    std::fs::write(&json_path, &json)
        .map_err(|e| CliError::usage(format!("cannot write report.json: {e}")))?;
    std::fs::write(&md_path, &md)
        .map_err(|e| CliError::usage(format!("cannot write report.md: {e}")))?;
    println!("{md}");
    eprintln!("wrote {} and {}", json_path.display(), md_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Optimize(args) => run_optimize(args),
        Command::Graph(args) => run_graph(args),
        Command::Report(args) => run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
