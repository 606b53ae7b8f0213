//! Parameter grids for database generation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    /// Equidistant values including both endpoints.
    #[default]
    Linear,
    /// Geometric progression including both endpoints.
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamAxis {
    Fixed(f64),
    Range {
        lo: f64,
        hi: f64,
        count: usize,
        spacing: Spacing,
    },
}

impl ParamAxis {
    pub fn range(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Self {
        ParamAxis::Range {
            lo,
            hi,
            count,
            spacing,
        }
    }

    pub fn count(&self) -> usize {
        match self {
            ParamAxis::Fixed(_) => 1,
            ParamAxis::Range { count, .. } => *count,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            ParamAxis::Fixed(v) => Ok(vec![v]),
            ParamAxis::Range {
                lo,
                hi,
                count,
                spacing,
            } => {
                if count == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "bad range [{lo}, {hi}] with {count} points"
                    )));
                }
                if count == 1 {
                    return Ok(vec![lo]);
                }
                let n = (count - 1) as f64;
                Ok(match spacing {
                    Spacing::Linear => (0..count)
                        .map(|i| lo + (hi - lo) * (i as f64 / n))
                        .collect(),
                    Spacing::Log => {
                        if lo <= 0.0 {
                            return Err(Error::InvalidGrid(
                                "log spacing needs a positive lower bound".into(),
                            ));
                        }
                        let ratio = (hi / lo).ln();
                        (0..count)
                            .map(|i| lo * (ratio * i as f64 / n).exp())
                            .collect()
                    }
                })
            }
        }
    }
}

/// Grid for one family: the tensor product of its theta and alpha axes.
///
/// Points are enumerated lexicographically with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyGrid {
    pub family: Family,
    pub theta: Vec<ParamAxis>,
    pub alpha: Vec<ParamAxis>,
}

impl FamilyGrid {
    pub fn count(&self) -> usize {
        self.theta
            .iter()
            .chain(&self.alpha)
            .map(ParamAxis::count)
            .product()
    }

    /// All `(theta, alpha)` pairs in enumeration order.
    pub fn points(&self) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let axes: Vec<Vec<f64>> = self
            .theta
            .iter()
            .chain(&self.alpha)
            .map(ParamAxis::values)
            .collect::<Result<_>>()?;
        let n_theta = self.theta.len();
        let mut out = Vec::with_capacity(self.count());
        let mut idx = vec![0usize; axes.len()];
        loop {
            let vals: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
            out.push((vals[..n_theta].to_vec(), vals[n_theta..].to_vec()));
            // odometer increment, last axis fastest
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub families: Vec<FamilyGrid>,
}

impl GridSpec {
    pub fn count(&self) -> usize {
        self.families.iter().map(FamilyGrid::count).sum()
    }

    /// Homogeneous-experiment database: 100 points per range gives 502
    /// fingerprints. Single-parameter families keep one record.
    pub fn supervised(points: usize, spacing: Spacing) -> Self {
        let r = |lo, hi| ParamAxis::range(lo, hi, points, spacing);
        let one = ParamAxis::Fixed(1.0);
        let fam = |family, theta, alpha| FamilyGrid {
            family,
            theta,
            alpha,
        };
        Self {
            families: vec![
                fam(Family::BlatzKo, vec![one.clone()], vec![]),
                fam(Family::Demiray, vec![one.clone()], vec![r(0.1, 10.0)]),
                fam(Family::Gent, vec![one.clone()], vec![r(0.1, 1.0)]),
                fam(Family::Holzapfel, vec![one.clone()], vec![r(0.1, 10.0)]),
                // theta = [c_I1, c_I2]
                fam(Family::MooneyRivlin, vec![r(0.1, 10.0), one.clone()], vec![]),
                fam(Family::NeoHooke, vec![one.clone()], vec![]),
                fam(Family::Ogden, vec![one], vec![r(0.1, 10.0)]),
            ],
        }
    }

    pub fn supervised_default() -> Self {
        Self::supervised(100, Spacing::Linear)
    }

    /// Plate-with-hole database: theta = [theta0, ...] with the volumetric
    /// penalty swept alongside. 100 points per range gives 30,200 records.
    pub fn unsupervised(points: usize, spacing: Spacing) -> Self {
        let r = |lo, hi| ParamAxis::range(lo, hi, points, spacing);
        let one = ParamAxis::Fixed(1.0);
        let penalty = r(0.1, 10.0);
        let fam = |family, theta, alpha| FamilyGrid {
            family,
            theta,
            alpha,
        };
        Self {
            families: vec![
                fam(Family::BlatzKo, vec![penalty.clone(), one.clone()], vec![]),
                fam(
                    Family::Demiray,
                    vec![penalty.clone(), one.clone()],
                    vec![r(0.1, 10.0)],
                ),
                fam(
                    Family::Gent,
                    vec![penalty.clone(), one.clone()],
                    vec![r(0.1, 1.0)],
                ),
                // theta = [theta0, c_I1, c_I2]
                fam(
                    Family::MooneyRivlin,
                    vec![penalty.clone(), one.clone(), r(0.1, 10.0)],
                    vec![],
                ),
                fam(Family::NeoHooke, vec![penalty, one], vec![]),
            ],
        }
    }

    pub fn unsupervised_default() -> Self {
        Self::unsupervised(100, Spacing::Linear)
    }
}
