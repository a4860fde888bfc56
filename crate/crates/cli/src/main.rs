//! Command-line pipeline: sample knot datasets, analyze embeddings, verify
//! topology, probe for shortcut features, and compute the shortcut index.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O
//! error, 4 budget exhausted with a partial result.

use clap::{Args, Parser, Subcommand};
use geoknot_core::io::{
    export_dataset, manifest_to_table, parse_bins, read_manifest, read_xyz, write_manifest,
    write_writhe_matrix, IoFormatError, ManifestRow, RunSpec,
};
use geoknot_core::probe::{
    shortcut_index, shortcut_probe, train_baseline, BaselineHyper, ProbeReport,
};
use geoknot_core::sampler::{merge_shards, run_chains, SamplerError};
use geoknot_core::topology::verify_curve_with_seed;
use geoknot_core::{classify_curve, functional_vector, writhe_matrix, KnotClass, Verdict};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "geoknot",
    about = "Sampling and shortcut-learning diagnostics for polygonal knots",
    version = concat!(env!("CARGO_PKG_VERSION"), " (geoknot-xyz/1)")
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a knot dataset with biased Monte Carlo chains.
    Sample(SampleArgs),
    /// Compute functional vectors (and verdicts) for stored embeddings.
    Analyze(AnalyzeArgs),
    /// Verify the knot class of one embedding.
    Verify(VerifyArgs),
    /// Score mutual information of each functional against labels.
    Probe(ProbeArgs),
    /// Shortcut index tau = m_a / m.
    Tau(TauArgs),
    /// Export the writhe matrix of one embedding as CSV.
    WritheMatrix(WritheMatrixArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Knot class: 0_1 or 3_1.
    #[arg(long)]
    knot: Option<String>,
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Total records to save across chains.
    #[arg(long)]
    count: Option<usize>,
    /// Bias functional: writhe|acn|entanglement|none.
    #[arg(long)]
    bias: Option<String>,
    /// Bin layout LO:HI:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    bins: Option<String>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Off-lattice displacement amplitude in [0, 0.5).
    #[arg(long)]
    jitter: Option<f64>,
    /// Output directory (env GEOKNOT_OUT as fallback).
    #[arg(long, env = "GEOKNOT_OUT")]
    out: Option<PathBuf>,
    /// Optional key=value configuration file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_moves: Option<u64>,
    #[arg(long)]
    pivot_batch: Option<usize>,
    #[arg(long)]
    bfacf_per_pivot: Option<usize>,
    /// Accepted moves between saves (0 = 25 * n_vertices).
    #[arg(long)]
    stride: Option<u64>,
    /// Length cap (0 = n_vertices).
    #[arg(long)]
    max_length: Option<usize>,
    /// Clamp out-of-range functional values into the edge bins.
    #[arg(long)]
    extend_range: bool,
    /// Suppress progress lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// XYZ file or a directory of XYZ files.
    #[arg(long, value_name = "DIR|FILE")]
    r#in: PathBuf,
    /// Manifest CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// XYZ embedding to verify.
    #[arg(long)]
    r#in: PathBuf,
    /// Expected class: 0_1 or 3_1.
    #[arg(long)]
    expect: String,
    /// Seed of the projection-direction schedule.
    #[arg(long, default_value_t = geoknot_core::topology::DEFAULT_SCHEDULE_SEED)]
    schedule_seed: u64,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Nearest-neighbor count of the MI estimator.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Probe report CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Probe only these functionals (comma separated).
    #[arg(long)]
    functionals: Option<String>,
}

#[derive(Args)]
struct TauArgs {
    /// Full-representation accuracy (direct mode).
    #[arg(long)]
    m: Option<f64>,
    /// Shortcut-features accuracy (direct mode).
    #[arg(long)]
    m_a: Option<f64>,
    /// Manifest to train baselines on (manifest mode).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// MI threshold above which a functional counts as a shortcut.
    #[arg(long, default_value_t = 0.25)]
    mi_threshold: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    /// Report CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WritheMatrixArgs {
    /// XYZ embedding to read.
    #[arg(long)]
    r#in: PathBuf,
    /// Matrix CSV to write.
    #[arg(long)]
    out: PathBuf,
}

/// Failures mapped onto process exit codes.
enum CliError {
    Usage(String),
    Io(String),
    Mismatch(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Mismatch(m) => m,
        }
    }
}

impl From<IoFormatError> for CliError {
    fn from(e: IoFormatError) -> Self {
        match e {
            IoFormatError::Config(m) => CliError::Usage(m),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<SamplerError> for CliError {
    fn from(e: SamplerError) -> Self {
        match e {
            SamplerError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<geoknot_core::probe::ProbeError> for CliError {
    fn from(e: geoknot_core::probe::ProbeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn parse_knot(label: &str) -> Result<KnotClass, CliError> {
    label
        .parse()
        .map_err(|e: geoknot_core::lattice::ParseLabelError| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Tau(args) => cmd_tau(args),
        Command::WritheMatrix(args) => cmd_writhe_matrix(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("geoknot: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn cmd_sample(args: SampleArgs) -> Result<u8, CliError> {
    let out = args
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out (or GEOKNOT_OUT) is required".into()))?;
    // Start from defaults, layer the config file, then explicit flags.
    let mut spec = RunSpec::new(KnotClass::Unknot, out);
    let mut knot_set = false;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        knot_set = text.lines().any(|l| {
            l.split('#')
                .next()
                .unwrap_or("")
                .trim_start()
                .starts_with("knot")
        });
        spec.apply_config_text(&text, &path.display().to_string())?;
    }
    if let Some(label) = &args.knot {
        spec.knot = parse_knot(label)?;
        knot_set = true;
    }
    if !knot_set {
        return Err(CliError::Usage(
            "--knot is required (or set knot= in --config)".into(),
        ));
    }
    if let Some(v) = args.n_vertices {
        spec.n_vertices = v;
    }
    if let Some(v) = args.count {
        spec.count = v;
    }
    if let Some(b) = &args.bias {
        spec.bias = b.parse().map_err(CliError::Usage)?;
    }
    if let Some(b) = &args.bins {
        spec.bins = parse_bins(b).map_err(CliError::Usage)?;
    }
    if let Some(v) = args.chains {
        spec.chains = v;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.jitter {
        spec.jitter = v;
    }
    if let Some(v) = args.max_moves {
        spec.max_moves = v;
    }
    if let Some(v) = args.pivot_batch {
        spec.pivot_batch = v;
    }
    if let Some(v) = args.bfacf_per_pivot {
        spec.bfacf_per_pivot = v;
    }
    if let Some(v) = args.stride {
        spec.decorrelation_stride = v;
    }
    if let Some(v) = args.max_length {
        spec.max_length = v;
    }
    spec.extend_range |= args.extend_range;
    if args.quiet {
        spec.progress = false;
    }

    let configs = spec.chain_configs()?;
    let shards = run_chains(&configs)?;
    let dataset = merge_shards(shards)?;
    std::fs::create_dir_all(&spec.out).map_err(|e| CliError::Io(e.to_string()))?;
    export_dataset(&dataset, &spec.out)?;
    eprintln!(
        "wrote {} records ({} unknots, {} trefoils) to {}",
        dataset.records.len(),
        dataset.unknot_count,
        dataset.trefoil_count,
        spec.out.display()
    );
    if dataset.complete {
        Ok(0)
    } else {
        eprintln!("warning: move budget exhausted before all bin quotas filled");
        Ok(EXIT_PARTIAL)
    }
}

fn xyz_inputs(input: &Path) -> Result<Vec<PathBuf>, CliError> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files = Vec::new();
    for dir in [input.to_path_buf(), input.join("xyz")] {
        if !dir.is_dir() {
            continue;
        }
        for entry in std::fs::read_dir(&dir).map_err(|e| CliError::Io(e.to_string()))? {
            let path = entry.map_err(|e| CliError::Io(e.to_string()))?.path();
            if path.extension().is_some_and(|e| e == "xyz") {
                files.push(path);
            }
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Io(format!(
            "no .xyz files under {}",
            input.display()
        )));
    }
    Ok(files)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, CliError> {
    let files = xyz_inputs(&args.r#in)?;
    let mut rows = Vec::with_capacity(files.len());
    for (id, path) in files.iter().enumerate() {
        let curve = read_xyz(path)?;
        let verdict =
            classify_curve(&curve).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let label = match verdict.verdict {
            Verdict::Unknot => "0_1".to_string(),
            Verdict::Trefoil => "3_1".to_string(),
            Verdict::Other => "other".to_string(),
        };
        rows.push(ManifestRow {
            id,
            label,
            path: path.display().to_string(),
            seed: 0,
            chain: 0,
            functionals: functional_vector(&curve, None),
        });
    }
    write_manifest(&args.out, &rows)?;
    eprintln!(
        "analyzed {} embeddings -> {}",
        rows.len(),
        args.out.display()
    );
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let expected = parse_knot(&args.expect)?;
    let curve = read_xyz(&args.r#in)?;
    let result = verify_curve_with_seed(&curve, expected, args.schedule_seed)
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "determinant={} v2={} v2_writhe={:.4} verdict={} checks_passed={}",
        result.determinant,
        result.v2_exact,
        result.v2_writhe,
        match result.verdict {
            Verdict::Unknot => "0_1",
            Verdict::Trefoil => "3_1",
            Verdict::Other => "other",
        },
        result.checks_passed.join("+")
    );
    if result.matches(expected) {
        Ok(0)
    } else {
        Err(CliError::Mismatch(format!(
            "expected {expected}, verdict differs"
        )))
    }
}

fn probe_csv(report: &ProbeReport) -> String {
    let mut out = String::from("functional,mi_nats,rank\n");
    for e in &report.entries {
        out.push_str(&format!("{},{:.6},{}\n", e.functional, e.mi_nats, e.rank));
    }
    out
}

fn cmd_probe(args: ProbeArgs) -> Result<u8, CliError> {
    let rows = read_manifest(&args.manifest)?;
    let table = manifest_to_table(&rows)?;
    let subset: Option<Vec<String>> = args
        .functionals
        .as_ref()
        .map(|s| s.split(',').map(|f| f.trim().to_string()).collect());
    let report = shortcut_probe(&table, subset.as_deref(), args.k)?;
    std::fs::write(&args.out, probe_csv(&report)).map_err(|e| CliError::Io(e.to_string()))?;
    eprintln!(
        "probed {} functionals over {} records -> {}",
        report.entries.len(),
        table.rows.len(),
        args.out.display()
    );
    Ok(0)
}

fn cmd_tau(args: TauArgs) -> Result<u8, CliError> {
    let mut lines = String::from("feature_set,m,m_a,tau,flag\n");
    match (args.m, args.m_a, &args.manifest) {
        (Some(m), Some(m_a), None) => {
            let report = shortcut_index(m_a, m)?;
            lines.push_str(&format!(
                "direct,{:.4},{:.4},{:.4},{}\n",
                report.m,
                report.m_a,
                report.tau,
                if report.informative {
                    "ok"
                } else {
                    "not-informative"
                }
            ));
        }
        (None, None, Some(manifest)) => {
            let rows = read_manifest(manifest)?;
            let table = manifest_to_table(&rows)?;
            let probe = shortcut_probe(&table, None, args.k)?;
            let flagged = probe.flagged(args.mi_threshold);
            if flagged.is_empty() {
                return Err(CliError::Usage(format!(
                    "no functional exceeds the MI threshold {}",
                    args.mi_threshold
                )));
            }
            let hyper = BaselineHyper {
                split_seed: args.split_seed,
                ..BaselineHyper::default()
            };
            let all: Vec<usize> = (0..table.feature_names.len()).collect();
            let m = train_baseline(&table, &all, &hyper)?.test_accuracy;
            let cols: Vec<usize> = flagged
                .iter()
                .map(|f| table.column_index(f))
                .collect::<Result<_, _>>()?;
            let m_a = train_baseline(&table, &cols, &hyper)?.test_accuracy;
            let report = shortcut_index(m_a, m)?;
            lines.push_str(&format!(
                "flagged:{},{:.4},{:.4},{:.4},{}\n",
                flagged.join("+"),
                report.m,
                report.m_a,
                report.tau,
                if report.informative {
                    "ok"
                } else {
                    "not-informative"
                }
            ));
        }
        _ => {
            return Err(CliError::Usage(
                "use either --m with --m-a, or --manifest".into(),
            ));
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, lines).map_err(|e| CliError::Io(e.to_string()))?,
        None => print!("{lines}"),
    }
    Ok(0)
}

fn cmd_writhe_matrix(args: WritheMatrixArgs) -> Result<u8, CliError> {
    let curve = read_xyz(&args.r#in)?;
    let w = writhe_matrix(&curve);
    write_writhe_matrix(&args.out, &w)?;
    eprintln!(
        "wrote {0}x{0} writhe matrix -> {1}",
        w.dim(),
        args.out.display()
    );
    Ok(0)
}
