//! Inner-product search over a fingerprint database.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::database::Database;
use crate::error::{Error, Result};
use crate::model::{Family, MaterialModel};

/// Rows per parallel work unit.
const BLOCK_ROWS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    pub top_k: usize,
    /// Weight `w` of the penalty `w * nnz(theta)` subtracted from the score.
    pub sparsity_weight: f64,
    pub parallel: bool,
    /// Scores within this distance of the maximum count as ties; the lowest
    /// index among them wins. Absorbs rounding between equivalent records.
    pub tie_tolerance: f64,
    /// Specimen scale applied to forces (or stresses) before matching.
    pub force_scale: f64,
    /// Specimen scale applied to displacements before matching.
    pub length_scale: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            top_k: 5,
            sparsity_weight: 0.0,
            parallel: true,
            tie_tolerance: 1e-12,
            force_scale: 1.0,
            length_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    pub similarity: f64,
    /// Similarity minus the sparsity penalty.
    pub score: f64,
    pub family: Family,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub best: Candidate,
    /// Other indices whose score ties with the best one.
    pub ties: Vec<usize>,
    pub model: MaterialModel,
    /// Norm used to rescale theta.
    pub query_norm: f64,
    /// Best `top_k` candidates, best first.
    pub top: Vec<Candidate>,
}

/// Inner products of every row of the row-major `matrix` with `query`.
pub fn scan_sequential(matrix: &[f64], n_f: usize, query: &[f64]) -> Vec<f64> {
    matrix.chunks_exact(n_f).map(|row| dot(row, query)).collect()
}

/// Same values as [`scan_sequential`], computed over row blocks in parallel.
pub fn scan_parallel(matrix: &[f64], n_f: usize, query: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; matrix.len() / n_f];
    out.par_chunks_mut(BLOCK_ROWS)
        .zip(matrix.par_chunks(BLOCK_ROWS * n_f))
        .for_each(|(dst, block)| {
            for (d, row) in dst.iter_mut().zip(block.chunks_exact(n_f)) {
                *d = dot(row, query);
            }
        });
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |s, (x, y)| s + x * y)
}

/// Index of the largest score; the lowest index wins exact ties.
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        match best {
            Some(b) if scores[b] >= s => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Applies the specimen scale factors to a raw query.
pub fn prescale(db: &Database, raw: &[f64], options: &MatchOptions) -> Vec<f64> {
    match db.protocol().force_len() {
        None => raw.iter().map(|v| v * options.force_scale).collect(),
        Some(k) => raw
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v * if j < k {
                    options.force_scale
                } else {
                    options.length_scale
                }
            })
            .collect(),
    }
}

/// Normalizes `raw`, scans the database and rescales the best record.
pub fn match_fingerprint(db: &Database, raw: &[f64], options: &MatchOptions) -> Result<MatchResult> {
    if db.is_empty() {
        return Err(Error::InvalidGrid("database is empty".into()));
    }
    let scaled = prescale(db, raw, options);
    let (query, norm) = db.protocol().normalize(&scaled)?;
    let similarity = if options.parallel {
        scan_parallel(db.matrix(), db.n_f(), &query)
    } else {
        scan_sequential(db.matrix(), db.n_f(), &query)
    };
    let scores: Vec<f64> = if options.sparsity_weight == 0.0 {
        similarity.clone()
    } else {
        similarity
            .iter()
            .zip(db.records())
            .map(|(s, r)| {
                let nnz = r.theta_bar.iter().filter(|t| **t != 0.0).count();
                s - options.sparsity_weight * nnz as f64
            })
            .collect()
    };
    let top_score = scores[argmax(&scores).ok_or(Error::ZeroFingerprint)?];
    let mut tied = (0..scores.len()).filter(|&i| scores[i] >= top_score - options.tie_tolerance);
    let best = tied.next().expect("maximum is among the ties");
    let ties = tied.collect();

    let candidate = |i: usize| -> Result<Candidate> {
        let model = db.rescale(i, norm)?;
        Ok(Candidate {
            index: i,
            similarity: similarity[i],
            score: scores[i],
            family: model.family(),
            theta: model.theta().to_vec(),
            alpha: model.alpha().to_vec(),
        })
    };
    // best first, then the others by score
    let mut order: Vec<usize> = (0..scores.len())
        .filter(|&i| i != best && !scores[i].is_nan())
        .collect();
    let k = options.top_k.saturating_sub(1).min(order.len());
    if k > 0 {
        order.select_nth_unstable_by(k - 1, |&a, &b| {
            scores[b].total_cmp(&scores[a]).then(a.cmp(&b))
        });
    }
    order.truncate(k);
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    if options.top_k > 0 {
        order.insert(0, best);
    }
    let top = order.into_iter().map(candidate).collect::<Result<_>>()?;

    Ok(MatchResult {
        best: candidate(best)?,
        ties,
        model: db.rescale(best, norm)?,
        query_norm: norm,
        top,
    })
}
