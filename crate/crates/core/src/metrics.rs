//! Relative strain-energy discrepancy between a true and a discovered model.
//!
//! Both measures integrate `|W_true - W_disc|` and `|W_true|` over a box of
//! principal stretches `[a, b]^d` and return the ratio. The incompressible
//! measure constrains `l3 = 1 / (l1 l2)` and integrates over `(l1, l2)`; the
//! compressible measure integrates over all three stretches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MaterialModel;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorConfig {
    pub lower: f64,
    pub upper: f64,
    /// Initial number of panels per axis.
    pub panels: usize,
    /// Gauss points per panel.
    pub points: usize,
    /// Accept once doubling the panels changes the value by less than this.
    pub convergence: f64,
    pub max_panels: usize,
}

impl Default for ErrorConfig {
    fn default() -> Self {
        Self {
            lower: 0.75,
            upper: 1.25,
            panels: 8,
            points: 4,
            convergence: 0.005,
            max_panels: 128,
        }
    }
}

/// A converged error value and the resolution it was obtained at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integrated {
    pub value: f64,
    pub panels: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e_incompr: f64,
    pub e_compr: Option<f64>,
    pub panels: usize,
    pub points: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Error over the incompressible manifold `l1 l2 l3 = 1`.
pub fn e_incompr(truth: &MaterialModel, disc: &MaterialModel, cfg: &ErrorConfig) -> Result<Integrated> {
    converge(cfg, |rule| {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(l1, w1) in rule {
            for &(l2, w2) in rule {
                let s = [l1, l2, 1.0 / (l1 * l2)];
                let wt = truth.strain_energy_principal(s)?;
                let wd = disc.strain_energy_principal(s)?;
                num += w1 * w2 * (wt - wd).abs();
                den += w1 * w2 * wt.abs();
            }
        }
        ratio(num, den)
    })
}

/// Error over the full stretch box, no volume constraint.
pub fn e_compr(truth: &MaterialModel, disc: &MaterialModel, cfg: &ErrorConfig) -> Result<Integrated> {
    converge(cfg, |rule| {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(l1, w1) in rule {
            for &(l2, w2) in rule {
                for &(l3, w3) in rule {
                    let s = [l1, l2, l3];
                    let wt = truth.strain_energy_principal(s)?;
                    let wd = disc.strain_energy_principal(s)?;
                    let w = w1 * w2 * w3;
                    num += w * (wt - wd).abs();
                    den += w * wt.abs();
                }
            }
        }
        ratio(num, den)
    })
}

/// Both measures; the compressible one only when `compressible` is set.
pub fn error_report(
    truth: &MaterialModel,
    disc: &MaterialModel,
    compressible: bool,
    cfg: &ErrorConfig,
) -> Result<ErrorReport> {
    let inc = e_incompr(truth, disc, cfg)?;
    let comp = if compressible {
        Some(e_compr(truth, disc, cfg)?)
    } else {
        None
    };
    Ok(ErrorReport {
        e_incompr: inc.value,
        e_compr: comp.map(|c| c.value),
        panels: comp.map_or(inc.panels, |c| c.panels.max(inc.panels)),
        points: cfg.points,
        lower: cfg.lower,
        upper: cfg.upper,
    })
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        Err(Error::DivisionByZero)
    } else {
        Ok(num / den)
    }
}

fn converge<F>(cfg: &ErrorConfig, eval: F) -> Result<Integrated>
where
    F: Fn(&[(f64, f64)]) -> Result<f64>,
{
    let rule = GaussLegendre::new(cfg.points);
    let mut panels = cfg.panels.max(1);
    let mut prev = eval(&rule.composite(cfg.lower, cfg.upper, panels))?;
    loop {
        let fine = panels * 2;
        let next = eval(&rule.composite(cfg.lower, cfg.upper, fine))?;
        let change = (next - prev).abs();
        if change <= cfg.convergence * next.abs() || change < 1e-15 || fine >= cfg.max_panels {
            return Ok(Integrated {
                value: next,
                panels: fine,
                points: cfg.points,
            });
        }
        prev = next;
        panels = fine;
    }
}
