//! Discovery benchmarks: simulate a known model, add noise, match, compare.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::database::{Database, Protocol};
use crate::error::Result;
use crate::matcher::{match_fingerprint, MatchOptions};
use crate::metrics::{error_report, ErrorConfig};
use crate::model::{Family, MaterialModel};
use crate::noise::{add_noise, NoiseSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCase {
    pub name: String,
    pub truth: MaterialModel,
}

impl BenchmarkCase {
    fn new(name: &str, truth: Result<MaterialModel>) -> Self {
        Self {
            name: name.into(),
            truth: truth.expect("benchmark parameters are valid"),
        }
    }
}

/// Incompressible benchmark models with the reference benchmark truths.
pub fn homogeneous_cases() -> Vec<BenchmarkCase> {
    use Family::*;
    let m = MaterialModel::incompressible;
    vec![
        BenchmarkCase::new("blatz-ko", m(BlatzKo, &[50.0], &[])),
        BenchmarkCase::new("demiray", m(Demiray, &[10.0], &[8.0])),
        BenchmarkCase::new("mooney-rivlin", m(MooneyRivlin, &[10.0, 40.0], &[])),
        BenchmarkCase::new("neo-hooke", m(NeoHooke, &[10.0], &[])),
        BenchmarkCase::new("ogden", m(Ogden, &[5.0], &[8.0])),
    ]
}

/// As [`homogeneous_cases`], with Mooney-Rivlin moved to the ratio 0.3 that
/// the default 100-point grid contains exactly.
pub fn homogeneous_on_grid_cases() -> Vec<BenchmarkCase> {
    let mut cases = homogeneous_cases();
    cases[2] = BenchmarkCase::new(
        "mooney-rivlin",
        MaterialModel::incompressible(Family::MooneyRivlin, &[12.0, 40.0], &[]),
    );
    cases
}

/// Compressible plate benchmarks with the reference truths. All parameter
/// ratios lie on the default 100-point grid.
pub fn plate_cases() -> Vec<BenchmarkCase> {
    use Family::*;
    let m = MaterialModel::compressible;
    vec![
        BenchmarkCase::new("blatz-ko", m(BlatzKo, 5.0, &[50.0], &[])),
        BenchmarkCase::new("demiray", m(Demiray, 5.0, &[10.0], &[8.0])),
        BenchmarkCase::new("mooney-rivlin", m(MooneyRivlin, 20.0, &[10.0, 40.0], &[])),
        BenchmarkCase::new("neo-hooke", m(NeoHooke, 20.0, &[10.0], &[])),
    ]
}

/// Plate benchmarks snapped to the 10-point grid (axis step 1.1 from 0.1).
pub fn plate_coarse_grid_cases() -> Vec<BenchmarkCase> {
    use Family::*;
    let m = MaterialModel::compressible;
    vec![
        BenchmarkCase::new("blatz-ko", m(BlatzKo, 5.0, &[50.0], &[])),
        BenchmarkCase::new("demiray", m(Demiray, 12.0, &[10.0], &[7.8])),
        BenchmarkCase::new("mooney-rivlin", m(MooneyRivlin, 23.0, &[10.0, 45.0], &[])),
        BenchmarkCase::new("neo-hooke", m(NeoHooke, 23.0, &[10.0], &[])),
    ]
}

/// Same family, or Ogden and Neo-Hooke, which coincide at exponent 2.
pub fn family_equivalent(truth: Family, found: Family) -> bool {
    use Family::*;
    truth == found || matches!((truth, found), (NeoHooke, Ogden) | (Ogden, NeoHooke))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub levels: Vec<f64>,
    /// Seeds for noisy levels; a zero level runs once with the first seed.
    pub seeds: Vec<u64>,
    pub matching: MatchOptions,
    pub error: ErrorConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            levels: vec![0.0, 0.01, 0.05],
            seeds: (0..100).collect(),
            matching: MatchOptions::default(),
            error: ErrorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub case: String,
    pub level: f64,
    pub seed: u64,
    pub family: Option<Family>,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub similarity: Option<f64>,
    pub e_incompr: Option<f64>,
    pub e_compr: Option<f64>,
    pub family_ok: bool,
    /// Error category and message when the run failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub case: String,
    pub truth: String,
    pub level: f64,
    pub runs: usize,
    pub failures: usize,
    pub median_e_incompr: Option<f64>,
    pub median_e_compr: Option<f64>,
    pub family_hit_rate: f64,
    /// Discovered model of the first seed.
    pub example: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<RunRow>,
    pub summaries: Vec<Summary>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

fn describe(err: &crate::Error) -> String {
    format!("{}: {err}", err.category())
}

fn failed_row(case: &str, level: f64, seed: u64, error: String) -> RunRow {
    RunRow {
        case: case.into(),
        level,
        seed,
        family: None,
        theta: vec![],
        alpha: vec![],
        similarity: None,
        e_incompr: None,
        e_compr: None,
        family_ok: false,
        error: Some(error),
    }
}

fn run_one(
    db: &Database,
    case: &BenchmarkCase,
    raw: &[f64],
    level: f64,
    seed: u64,
    config: &BenchmarkConfig,
) -> Result<(RunRow, MaterialModel)> {
    let split = db.protocol().force_len();
    let noisy = add_noise(raw, NoiseSpec { level, seed }, split);
    let m = match_fingerprint(db, &noisy, &config.matching)?;
    let compressible = matches!(db.protocol(), Protocol::Plate(_));
    let err = error_report(&case.truth, &m.model, compressible, &config.error)?;
    Ok((
        RunRow {
            case: case.name.clone(),
            level,
            seed,
            family: Some(m.model.family()),
            theta: m.model.theta().to_vec(),
            alpha: m.model.alpha().to_vec(),
            similarity: Some(m.best.similarity),
            e_incompr: Some(err.e_incompr),
            e_compr: err.e_compr,
            family_ok: family_equivalent(case.truth.family(), m.model.family()),
            error: None,
        },
        m.model,
    ))
}

/// Runs every case at every level and seed. Failures are recorded per row.
pub fn run_benchmark(db: &Database, cases: &[BenchmarkCase], config: &BenchmarkConfig) -> BenchmarkReport {
    let truths: Vec<Result<Vec<f64>, String>> = cases
        .par_iter()
        .map(|c| db.protocol().simulate(&c.truth).map_err(|e| describe(&e)))
        .collect();

    let mut jobs = Vec::new();
    for (ci, _) in cases.iter().enumerate() {
        for &level in &config.levels {
            let seeds: &[u64] = if level == 0.0 {
                &config.seeds[..config.seeds.len().min(1)]
            } else {
                &config.seeds
            };
            for &seed in seeds {
                jobs.push((ci, level, seed));
            }
        }
    }
    let results: Vec<(RunRow, Option<String>)> = jobs
        .par_iter()
        .map(|&(ci, level, seed)| {
            let case = &cases[ci];
            let outcome = match &truths[ci] {
                Ok(raw) => run_one(db, case, raw, level, seed, config).map_err(|e| describe(&e)),
                Err(e) => Err(e.clone()),
            };
            match outcome {
                Ok((row, model)) => (row, Some(model.to_string())),
                Err(e) => (failed_row(&case.name, level, seed, e), None),
            }
        })
        .collect();

    let mut summaries = Vec::new();
    for (ci, case) in cases.iter().enumerate() {
        for &level in &config.levels {
            let group: Vec<&(RunRow, Option<String>)> = jobs
                .iter()
                .zip(&results)
                .filter(|((c, l, _), _)| *c == ci && *l == level)
                .map(|(_, r)| r)
                .collect();
            let ok: Vec<&RunRow> = group.iter().map(|g| &g.0).filter(|r| r.error.is_none()).collect();
            let e_inc: Vec<f64> = ok.iter().filter_map(|r| r.e_incompr).collect();
            let e_comp: Vec<f64> = ok.iter().filter_map(|r| r.e_compr).collect();
            summaries.push(Summary {
                case: case.name.clone(),
                truth: case.truth.to_string(),
                level,
                runs: group.len(),
                failures: group.len() - ok.len(),
                median_e_incompr: median(&e_inc),
                median_e_compr: median(&e_comp),
                family_hit_rate: if group.is_empty() {
                    0.0
                } else {
                    ok.iter().filter(|r| r.family_ok).count() as f64 / group.len() as f64
                },
                example: group.first().and_then(|g| g.1.clone()),
            });
        }
    }
    BenchmarkReport {
        rows: results.into_iter().map(|(r, _)| r).collect(),
        summaries,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3e}"))
}

impl BenchmarkReport {
    /// Human-readable summary table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>6} {:>5} {:>5} {:>10} {:>10} {:>6}  discovered (first seed)",
            "case", "noise", "runs", "fail", "med E_inc", "med E_cmp", "family"
        );
        for m in &self.summaries {
            let _ = writeln!(
                s,
                "{:<14} {:>5.1}% {:>5} {:>5} {:>10} {:>10} {:>5.0}%  {}",
                m.case,
                100.0 * m.level,
                m.runs,
                m.failures,
                fmt_opt(m.median_e_incompr),
                fmt_opt(m.median_e_compr),
                100.0 * m.family_hit_rate,
                m.example.as_deref().unwrap_or("-")
            );
        }
        s
    }

    /// One JSON object per row, then one per summary, tagged by `record`.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut s = String::new();
        for r in &self.rows {
            let mut v = serde_json::to_value(r)?;
            v["record"] = "run".into();
            s.push_str(&serde_json::to_string(&v)?);
            s.push('\n');
        }
        for m in &self.summaries {
            let mut v = serde_json::to_value(m)?;
            v["record"] = "summary".into();
            s.push_str(&serde_json::to_string(&v)?);
            s.push('\n');
        }
        Ok(s)
    }

    /// Per-run CSV.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "case", "level", "seed", "family", "theta", "alpha", "similarity", "e_incompr",
            "e_compr", "family_ok", "error",
        ])?;
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.case.clone(),
                r.level.to_string(),
                r.seed.to_string(),
                r.family.map(|f| f.name().to_string()).unwrap_or_default(),
                join(&r.theta),
                join(&r.alpha),
                opt(r.similarity),
                opt(r.e_incompr),
                opt(r.e_compr),
                r.family_ok.to_string(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::Error::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}
