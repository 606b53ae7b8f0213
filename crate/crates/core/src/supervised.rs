//! Uniaxial-tension and simple-shear fingerprints.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::database::Record;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{MaterialModel, Regime};

/// Stretch and shear grids of the homogeneous experiments. Fingerprints hold
/// the uniaxial block first, then the shear block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousProtocol {
    pub ut_stretches: Vec<f64>,
    pub ss_shears: Vec<f64>,
}

impl Default for HomogeneousProtocol {
    fn default() -> Self {
        Self::equidistant(15, 1.5, 15, 0.5)
    }
}

impl HomogeneousProtocol {
    /// `n_ut` stretches on `[1, max_stretch]` and `n_ss` shears on
    /// `[0, max_shear]`, endpoints included.
    pub fn equidistant(n_ut: usize, max_stretch: f64, n_ss: usize, max_shear: f64) -> Self {
        let ramp = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
            match n {
                0 => vec![],
                1 => vec![hi],
                _ => (0..n)
                    .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                    .collect(),
            }
        };
        Self {
            ut_stretches: ramp(n_ut, 1.0, max_stretch),
            ss_shears: ramp(n_ss, 0.0, max_shear),
        }
    }

    pub fn len(&self) -> usize {
        self.ut_stretches.len() + self.ss_shears.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidGrid("protocol has no measurements".into()));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.ut_stretches) || !increasing(&self.ss_shears) {
            return Err(Error::InvalidGrid(
                "stretch and shear grids must be strictly increasing".into(),
            ));
        }
        if self.ut_stretches.iter().any(|l| !(*l >= 1.0) || !l.is_finite()) {
            return Err(Error::InvalidGrid("uniaxial stretches must be >= 1".into()));
        }
        if self.ss_shears.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidGrid("shear amounts must be >= 0".into()));
        }
        Ok(())
    }

    /// Column names in fingerprint order.
    pub fn column_names(&self) -> Vec<String> {
        (0..self.ut_stretches.len())
            .map(|k| format!("ut_{k}"))
            .chain((0..self.ss_shears.len()).map(|k| format!("ss_{k}")))
            .collect()
    }
}

/// Raw stress fingerprint of an incompressible model.
pub fn simulate_fingerprint(model: &MaterialModel, protocol: &HomogeneousProtocol) -> Result<Vec<f64>> {
    protocol.validate()?;
    let at = |location: String, err: Error| Error::AtGridPoint {
        family: model.family(),
        theta: model.theta().to_vec(),
        alpha: model.alpha().to_vec(),
        location,
        source: Box::new(err),
    };
    let mut out = Vec::with_capacity(protocol.len());
    for &l in &protocol.ut_stretches {
        out.push(
            model
                .ut_stress(l)
                .map_err(|e| at(format!("uniaxial stretch {l}"), e))?,
        );
    }
    for &g in &protocol.ss_shears {
        out.push(
            model
                .ss_stress(g)
                .map_err(|e| at(format!("shear amount {g}"), e))?,
        );
    }
    Ok(out)
}

/// Unit fingerprint, scaled parameters and the norm that was divided out.
pub fn normalize(fingerprint: &[f64], theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let norm = crate::norm(fingerprint);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroFingerprint);
    }
    Ok((
        fingerprint.iter().map(|v| v / norm).collect(),
        theta.iter().map(|t| t / norm).collect(),
        norm,
    ))
}

/// Normalized fingerprints and records for every grid point, in grid order.
pub fn generate_database(
    protocol: &HomogeneousProtocol,
    grid: &GridSpec,
) -> Result<(Vec<Vec<f64>>, Vec<Record>)> {
    protocol.validate()?;
    let mut points = Vec::with_capacity(grid.count());
    for fg in &grid.families {
        for (theta, alpha) in fg.points()? {
            points.push((fg.family, theta, alpha));
        }
    }
    let rows: Vec<(Vec<f64>, Record)> = points
        .into_par_iter()
        .map(|(family, theta, alpha)| {
            let model = MaterialModel::new(family, Regime::IncompressibleLagrange, theta, alpha)?;
            let raw = simulate_fingerprint(&model, protocol)?;
            let (fbar, theta_bar, norm) = normalize(&raw, model.theta()).map_err(|e| {
                Error::AtGridPoint {
                    family,
                    theta: model.theta().to_vec(),
                    alpha: model.alpha().to_vec(),
                    location: "normalization".into(),
                    source: Box::new(e),
                }
            })?;
            Ok((
                fbar,
                Record {
                    family,
                    theta_bar,
                    alpha: model.alpha().to_vec(),
                    source_norm: norm,
                },
            ))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;

    #[test]
    fn default_grids() {
        let p = HomogeneousProtocol::default();
        assert_eq!(p.len(), 30);
        assert_eq!(p.ut_stretches[0], 1.0);
        assert_eq!(p.ut_stretches[14], 1.5);
        assert_eq!(p.ss_shears[14], 0.5);
        p.validate().unwrap();
    }

    #[test]
    fn neo_hooke_starts_at_zero() {
        let m = MaterialModel::incompressible(Family::NeoHooke, &[1.0], &[]).unwrap();
        let f = simulate_fingerprint(&m, &HomogeneousProtocol::default()).unwrap();
        assert_eq!(f.len(), 30);
        assert_eq!(f[0], 0.0);
        assert_eq!(f[15], 0.0);
    }

    #[test]
    fn blatz_ko_shear_block() {
        let p = HomogeneousProtocol::default();
        let m = MaterialModel::incompressible(Family::BlatzKo, &[50.0], &[]).unwrap();
        let f = simulate_fingerprint(&m, &p).unwrap();
        for (k, g) in p.ss_shears.iter().enumerate() {
            assert!((f[15 + k] - 100.0 * g).abs() < 1e-12 * 50.0);
        }
    }

    #[test]
    fn normalize_arithmetic() {
        let (f, t, n) = normalize(&[3.0, 4.0, 0.0], &[1.0]).unwrap();
        assert_eq!(f, vec![0.6, 0.8, 0.0]);
        assert_eq!(t, vec![0.2]);
        assert_eq!(n, 5.0);
        assert!(matches!(normalize(&[0.0, 0.0], &[1.0]), Err(Error::ZeroFingerprint)));
    }

    #[test]
    fn gent_limit_reports_grid_point() {
        // 1 - 1.0 * (I1 - 3) < 0 well before lambda = 3
        let p = HomogeneousProtocol::equidistant(5, 3.0, 2, 0.5);
        let m = MaterialModel::incompressible(Family::Gent, &[1.0], &[1.0]).unwrap();
        match simulate_fingerprint(&m, &p) {
            Err(Error::AtGridPoint { location, source, .. }) => {
                assert!(location.contains("uniaxial"));
                assert!(matches!(*source, Error::GentDomain { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_protocol() {
        let p = HomogeneousProtocol {
            ut_stretches: vec![1.0, 0.9],
            ss_shears: vec![],
        };
        assert!(p.validate().is_err());
    }
}
