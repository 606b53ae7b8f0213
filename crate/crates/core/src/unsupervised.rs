//! Plate-with-hole fingerprints: reaction forces and hole displacements.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::database::Record;
use crate::error::{Error, Result};
use crate::fem::{self, LoadProgram, NewtonSettings, PlateGeometry, PlateMesh};
use crate::grid::GridSpec;
use crate::model::{MaterialModel, Regime};

/// Everything that fixes the layout and values of a plate fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateProtocol {
    pub geometry: PlateGeometry,
    pub mesh_level: u32,
    pub program: LoadProgram,
    pub newton: NewtonSettings,
}

impl Default for PlateProtocol {
    fn default() -> Self {
        Self {
            geometry: PlateGeometry::default(),
            mesh_level: 2,
            program: LoadProgram::default(),
            newton: NewtonSettings::default(),
        }
    }
}

impl PlateProtocol {
    pub fn mesh(&self) -> Result<PlateMesh> {
        PlateMesh::build(&self.geometry, self.mesh_level)
    }

    /// Length of the force part.
    pub fn force_len(&self) -> usize {
        2 * self.program.steps
    }

    pub fn displacement_len(&self) -> usize {
        2 * fem::PROBE_COUNT * self.program.steps
    }

    pub fn len(&self) -> usize {
        self.force_len() + self.displacement_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column names in fingerprint order; steps are numbered from one.
    pub fn column_names(&self) -> Vec<String> {
        let n_t = self.program.steps;
        let mut names = Vec::with_capacity(self.len());
        names.extend((1..=n_t).map(|t| format!("r1_t{t}")));
        names.extend((1..=n_t).map(|t| format!("r2_t{t}")));
        for t in 1..=n_t {
            for dim in 1..=2 {
                names.extend((0..fem::PROBE_COUNT).map(|p| format!("u{dim}_t{t}_p{p}")));
            }
        }
        names
    }
}

/// Raw plate fingerprint. `force` holds R1 for every step, then R2 for every
/// step; `displacement` holds, per step, u1 at all probes then u2.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateFingerprint {
    pub force: Vec<f64>,
    pub displacement: Vec<f64>,
}

impl PlateFingerprint {
    pub fn concat(&self) -> Vec<f64> {
        let mut v = self.force.clone();
        v.extend_from_slice(&self.displacement);
        v
    }

    pub fn split(values: &[f64], force_len: usize) -> Self {
        Self {
            force: values[..force_len].to_vec(),
            displacement: values[force_len..].to_vec(),
        }
    }
}

pub fn fem_fingerprint(
    model: &MaterialModel,
    mesh: &PlateMesh,
    protocol: &PlateProtocol,
) -> Result<PlateFingerprint> {
    let sol = fem::solve(model, mesh, &protocol.program, protocol.newton)?;
    let mut force = sol.r1.clone();
    force.extend_from_slice(&sol.r2);
    let displacement = sol.probe_displacements.concat();
    Ok(PlateFingerprint {
        force,
        displacement,
    })
}

/// Splits the norm: each part is scaled to unit length separately and theta
/// is divided by the force norm. Returns `(fbar, theta_bar, force_norm)`.
pub fn normalize(fingerprint: &PlateFingerprint, theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let nf = crate::norm(&fingerprint.force);
    let nu = crate::norm(&fingerprint.displacement);
    if !(nf > 0.0 && nu > 0.0) || !nf.is_finite() || !nu.is_finite() {
        return Err(Error::ZeroFingerprint);
    }
    let mut fbar: Vec<f64> = fingerprint.force.iter().map(|v| v / nf).collect();
    fbar.extend(fingerprint.displacement.iter().map(|v| v / nu));
    Ok((fbar, theta.iter().map(|t| t / nf).collect(), nf))
}

/// Normalized fingerprints and records for every grid point, in grid order.
/// The first theta entry of each grid point is the volumetric penalty.
pub fn generate_database(
    protocol: &PlateProtocol,
    grid: &GridSpec,
) -> Result<(Vec<Vec<f64>>, Vec<Record>)> {
    let mesh = protocol.mesh()?;
    let mut points = Vec::with_capacity(grid.count());
    for fg in &grid.families {
        for (theta, alpha) in fg.points()? {
            points.push((fg.family, theta, alpha));
        }
    }
    let rows: Vec<(Vec<f64>, Record)> = points
        .into_par_iter()
        .map(|(family, theta, alpha)| {
            let model = MaterialModel::new(family, Regime::CompressiblePenalty, theta, alpha)?;
            let at = |e: Error| Error::AtGridPoint {
                family,
                theta: model.theta().to_vec(),
                alpha: model.alpha().to_vec(),
                location: "plate solve".into(),
                source: Box::new(e),
            };
            let fp = fem_fingerprint(&model, &mesh, protocol).map_err(at)?;
            let (fbar, theta_bar, norm) = normalize(&fp, model.theta()).map_err(at)?;
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
