//! `mfp`: generate fingerprint databases, match measurements, run benchmarks.
//!
//! Usage errors exit with status 2, pipeline errors with status 1 after
//! printing `error[Category]: message` to stderr.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mfp_core::benchmark::{self, BenchmarkCase, BenchmarkConfig};
use mfp_core::csvio::{self, Query};
use mfp_core::database::Protocol;
use mfp_core::fem::{self, LoadProgram};
use mfp_core::grid::{GridSpec, Spacing};
use mfp_core::noise::{add_noise, NoiseSpec};
use mfp_core::supervised::HomogeneousProtocol;
use mfp_core::unsupervised::PlateProtocol;
use mfp_core::{
    match_fingerprint, Database, Error, ExperimentKind, Family, MatchOptions, MatchResult,
    MaterialModel, Regime, Result,
};

#[derive(Parser)]
#[command(name = "mfp", version, about = "Hyperelastic model discovery by fingerprint lookup")]
struct Cli {
    /// Worker threads for generation, matching and benchmarks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate every grid point and write a database file.
    GenDb(GenDbArgs),
    /// Match query fingerprints from a CSV file against a database.
    Match(MatchArgs),
    /// Simulate known models, add noise, match and report errors.
    Benchmark(BenchmarkArgs),
    /// Run the plate-with-hole simulation for one compressible model.
    FemRun(FemRunArgs),
    /// Write a database as CSV.
    Export(ExportArgs),
    /// Write the raw fingerprint of one model as a query CSV.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Uniaxial tension and simple shear, incompressible models.
    Supervised,
    /// Plate with a hole, compressible models.
    Unsupervised,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(clap::Args)]
struct GenDbArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Points per parameter range, or a JSON grid file.
    #[arg(long, default_value = "100")]
    grid: String,
    #[arg(long, value_enum, default_value = "linear")]
    spacing: SpacingArg,
    /// Plate mesh refinement level (unsupervised mode).
    #[arg(long, default_value_t = 2)]
    mesh_level: u32,
    /// Load steps of the plate program (unsupervised mode).
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct MatchArgs {
    #[arg(long)]
    db: PathBuf,
    /// Query CSV with one fingerprint per row.
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value_t = 5)]
    top_k: usize,
    /// Weight of the nonzero-parameter penalty.
    #[arg(long, default_value_t = 0.0)]
    sparsity: f64,
    /// Specimen scale factor applied to forces before matching.
    #[arg(long, default_value_t = 1.0)]
    force_scale: f64,
    /// Specimen scale factor applied to displacements before matching.
    #[arg(long, default_value_t = 1.0)]
    length_scale: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseSet {
    /// Reference truths for the database's experiment kind.
    Auto,
    Supervised,
    /// Supervised truths moved onto the default grid.
    SupervisedOnGrid,
    Unsupervised,
    /// Unsupervised truths on the 10-point grid.
    UnsupervisedCoarse,
}

#[derive(clap::Args)]
struct BenchmarkArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    set: CaseSet,
    /// Noise levels as fractions of the largest absolute entry.
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.05")]
    noise: Vec<f64>,
    /// Number of seeds per noisy level.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 0.0)]
    sparsity: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Model family, e.g. neo-hooke, mooney-rivlin, blatz-ko.
    #[arg(long)]
    model: String,
    /// Homogeneity parameters; for compressible models the penalty comes first.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    params: Vec<f64>,
    /// Nonlinearity parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Vec<f64>,
}

impl ModelArgs {
    fn build(&self, regime: Regime) -> Result<MaterialModel> {
        let family: Family = self.model.parse()?;
        MaterialModel::new(family, regime, self.params.clone(), self.alpha.clone())
    }
}

#[derive(clap::Args)]
struct FemRunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    mesh_level: u32,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Final bottom-edge displacement.
    #[arg(long, default_value_t = 0.3)]
    delta_max: f64,
    /// Write nodes, elements and step displacements as CSV into this directory.
    #[arg(long)]
    dump_fields: Option<PathBuf>,
    /// Write the resulting fingerprint as a query CSV.
    #[arg(long)]
    out_query: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Csv,
}

#[derive(clap::Args)]
struct ExportArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: ExportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Database whose protocol is simulated.
    #[arg(long)]
    db: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "q0")]
    label: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match cli.command {
        Command::GenDb(a) => gen_db(a),
        Command::Match(a) => run_match(a),
        Command::Benchmark(a) => run_benchmark(a),
        Command::FemRun(a) => fem_run(a),
        Command::Export(a) => export(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // output closed early, e.g. piped into `head`
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(1)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn gen_db(a: GenDbArgs) -> Result<()> {
    let spacing = match a.spacing {
        SpacingArg::Linear => Spacing::Linear,
        SpacingArg::Log => Spacing::Log,
    };
    let points = a.grid.parse::<usize>().ok();
    let grid = match (points, a.mode) {
        (Some(n), Mode::Supervised) => GridSpec::supervised(n, spacing),
        (Some(n), Mode::Unsupervised) => GridSpec::unsupervised(n, spacing),
        (None, _) => serde_json::from_reader(File::open(&a.grid)?)?,
    };
    let protocol = match a.mode {
        Mode::Supervised => Protocol::Homogeneous(HomogeneousProtocol::default()),
        Mode::Unsupervised => Protocol::Plate(PlateProtocol {
            mesh_level: a.mesh_level,
            program: LoadProgram {
                steps: a.steps,
                ..LoadProgram::default()
            },
            ..PlateProtocol::default()
        }),
    };
    let db = Database::generate(protocol, &grid)?;
    db.save(&a.out)?;
    println!(
        "wrote {} records of length {} to {} (protocol {})",
        db.len(),
        db.n_f(),
        a.out.display(),
        db.protocol().hash()
    );
    Ok(())
}

#[derive(Serialize)]
struct LabeledMatch<'a> {
    label: &'a str,
    #[serde(flatten)]
    result: &'a MatchResult,
}

fn fmt_values(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn join_values(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn run_match(a: MatchArgs) -> Result<()> {
    let db = Database::load(&a.db)?;
    let queries = csvio::read_queries(File::open(&a.query)?, db.protocol())?;
    let options = MatchOptions {
        top_k: a.top_k,
        sparsity_weight: a.sparsity,
        force_scale: a.force_scale,
        length_scale: a.length_scale,
        ..MatchOptions::default()
    };
    let results: Vec<MatchResult> = queries
        .iter()
        .map(|q| match_fingerprint(&db, &q.values, &options))
        .collect::<Result<_>>()?;
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Table => {
            for (q, r) in queries.iter().zip(&results) {
                writeln!(w, "{}: {}  similarity {:.12}", q.label, r.model, r.best.similarity)?;
                if !r.ties.is_empty() {
                    writeln!(w, "  tied with records {:?}", r.ties)?;
                }
                for (rank, c) in r.top.iter().enumerate() {
                    writeln!(
                        w,
                        "  {:>3} #{:<6} {:<14} theta {} alpha {} sim {:.12} score {:.12}",
                        rank + 1,
                        c.index,
                        c.family.name(),
                        fmt_values(&c.theta),
                        fmt_values(&c.alpha),
                        c.similarity,
                        c.score
                    )?;
                }
            }
        }
        Format::Json => {
            for (q, r) in queries.iter().zip(&results) {
                let line = LabeledMatch {
                    label: &q.label,
                    result: r,
                };
                writeln!(w, "{}", serde_json::to_string(&line)?)?;
            }
        }
        Format::Csv => {
            writeln!(w, "label,rank,index,family,theta,alpha,similarity,score")?;
            for (q, r) in queries.iter().zip(&results) {
                for (rank, c) in r.top.iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        csv_cell(&q.label),
                        rank + 1,
                        c.index,
                        c.family.name(),
                        join_values(&c.theta),
                        join_values(&c.alpha),
                        c.similarity,
                        c.score
                    )?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_benchmark(a: BenchmarkArgs) -> Result<()> {
    let db = Database::load(&a.db)?;
    let kind = db.kind();
    let cases: Vec<BenchmarkCase> = match (a.set, kind) {
        (CaseSet::Auto, ExperimentKind::Homogeneous) | (CaseSet::Supervised, _) => {
            benchmark::homogeneous_cases()
        }
        (CaseSet::SupervisedOnGrid, _) => benchmark::homogeneous_on_grid_cases(),
        (CaseSet::Auto, ExperimentKind::Plate) | (CaseSet::Unsupervised, _) => {
            benchmark::plate_cases()
        }
        (CaseSet::UnsupervisedCoarse, _) => benchmark::plate_coarse_grid_cases(),
    };
    if let Some(c) = cases.iter().find(|c| c.truth.regime() != db.protocol().regime()) {
        return Err(Error::ProtocolMismatch(format!(
            "benchmark case {} needs a {:?} database",
            c.name,
            c.truth.regime()
        )));
    }
    if let Some(l) = a.noise.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameters(format!("noise level {l} must be >= 0")));
    }
    let config = BenchmarkConfig {
        levels: a.noise,
        seeds: (a.first_seed..a.first_seed + a.seeds.max(1)).collect(),
        matching: MatchOptions {
            sparsity_weight: a.sparsity,
            ..MatchOptions::default()
        },
        ..BenchmarkConfig::default()
    };
    let report = benchmark::run_benchmark(&db, &cases, &config);
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Table => write!(w, "{}", report.to_table())?,
        Format::Json => write!(w, "{}", report.to_json_lines()?)?,
        Format::Csv => write!(w, "{}", report.to_csv()?)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StepLine {
    step: usize,
    delta: f64,
    r1: f64,
    r2: f64,
    iterations: usize,
    substeps: usize,
    residual: f64,
}

fn fem_run(a: FemRunArgs) -> Result<()> {
    let model = a.model.build(Regime::CompressiblePenalty)?;
    let protocol = PlateProtocol {
        mesh_level: a.mesh_level,
        program: LoadProgram {
            steps: a.steps,
            delta_max: a.delta_max,
            ..LoadProgram::default()
        },
        ..PlateProtocol::default()
    };
    let plate = protocol.mesh()?;
    let solution = fem::solve(&model, &plate, &protocol.program, protocol.newton)?;
    if let Some(dir) = &a.dump_fields {
        fem::dump_fields(dir, &plate, &solution)?;
    }
    if let Some(path) = &a.out_query {
        let mut values = solution.r1.clone();
        values.extend_from_slice(&solution.r2);
        values.extend(solution.probe_displacements.concat());
        let query = Query {
            label: model.to_string(),
            values,
        };
        csvio::write_queries(
            BufWriter::new(File::create(path)?),
            &Protocol::Plate(protocol.clone()),
            &[query],
        )?;
    }
    let lines: Vec<StepLine> = (0..solution.deltas.len())
        .map(|t| StepLine {
            step: t + 1,
            delta: solution.deltas[t],
            r1: solution.r1[t],
            r2: solution.r2[t],
            iterations: solution.diagnostics[t].iterations,
            substeps: solution.diagnostics[t].substeps,
            residual: solution.diagnostics[t].residual,
        })
        .collect();
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Table => {
            writeln!(w, "{model}, mesh level {}", a.mesh_level)?;
            writeln!(
                w,
                "{:>4} {:>8} {:>14} {:>14} {:>5} {:>5} {:>10}",
                "step", "delta", "R1", "R2", "iter", "sub", "residual"
            )?;
            for l in &lines {
                writeln!(
                    w,
                    "{:>4} {:>8.4} {:>14.6e} {:>14.6e} {:>5} {:>5} {:>10.2e}",
                    l.step, l.delta, l.r1, l.r2, l.iterations, l.substeps, l.residual
                )?;
            }
        }
        Format::Json => {
            for l in &lines {
                writeln!(w, "{}", serde_json::to_string(l)?)?;
            }
        }
        Format::Csv => {
            writeln!(w, "step,delta,r1,r2,iterations,substeps,residual")?;
            for l in &lines {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    l.step, l.delta, l.r1, l.r2, l.iterations, l.substeps, l.residual
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn export(a: ExportArgs) -> Result<()> {
    let db = Database::load(&a.db)?;
    match a.format {
        ExportFormat::Csv => csvio::export_database(output(a.out.as_deref())?, &db),
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let db = Database::load(&a.db)?;
    let protocol = db.protocol();
    let model = a.model.build(protocol.regime())?;
    let raw = protocol.simulate(&model)?;
    if !(a.noise >= 0.0) || !a.noise.is_finite() {
        return Err(Error::InvalidParameters(format!("noise level {} must be >= 0", a.noise)));
    }
    let values = add_noise(
        &raw,
        NoiseSpec {
            level: a.noise,
            seed: a.seed,
        },
        protocol.force_len(),
    );
    let query = Query {
        label: a.label,
        values,
    };
    csvio::write_queries(output(a.out.as_deref())?, protocol, &[query])
}
