//! Total-Lagrangian plane-strain assembly for bilinear quadrilaterals.
//!
//! Displacements are stored node-major: `u[2 * node + dim]`. The out-of-plane
//! stretch is fixed to one and the body has unit thickness.

use crate::error::Result;
use crate::model::{DeformationGradient, MaterialModel};

use super::linalg::BandMatrix;
use super::mesh::{shape_derivatives, QuadMesh, GAUSS_2X2};

type Mat2 = [[f64; 2]; 2];
/// `dP_iJ / dF_kL` for the in-plane block.
type Tangent2 = [[[[f64; 2]; 2]; 2]; 2];

/// Relative step of the central-difference material tangent.
const TANGENT_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
struct QuadPoint {
    /// Reference gradients of the four shape functions.
    grad: [[f64; 2]; 4],
    /// Gauss weight times reference Jacobian.
    weight: f64,
}

/// Precomputed reference geometry of a mesh.
#[derive(Debug, Clone)]
pub struct Discretization<'m> {
    mesh: &'m QuadMesh,
    points: Vec<[QuadPoint; 4]>,
}

impl<'m> Discretization<'m> {
    pub fn new(mesh: &'m QuadMesh) -> Result<Self> {
        mesh.check()?;
        let points = mesh
            .elements
            .iter()
            .map(|conn| {
                let mut pts = [QuadPoint {
                    grad: [[0.0; 2]; 4],
                    weight: 0.0,
                }; 4];
                for (q, gp) in GAUSS_2X2.iter().enumerate() {
                    let dn = shape_derivatives(gp[0], gp[1]);
                    let mut j = [[0.0; 2]; 2];
                    for (a, &node) in conn.iter().enumerate() {
                        let x = mesh.nodes[node];
                        for r in 0..2 {
                            for c in 0..2 {
                                j[r][c] += x[r] * dn[a][c];
                            }
                        }
                    }
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
                    let mut grad = [[0.0; 2]; 4];
                    for a in 0..4 {
                        // dN/dX_c = dN/dxi_k * dxi_k/dX_c
                        for c in 0..2 {
                            grad[a][c] = dn[a][0] * inv[0][c] + dn[a][1] * inv[1][c];
                        }
                    }
                    pts[q] = QuadPoint { grad, weight: det };
                }
                pts
            })
            .collect();
        Ok(Self { mesh, points })
    }

    pub fn mesh(&self) -> &QuadMesh {
        self.mesh
    }

    fn gradient(&self, e: usize, q: usize, u: &[f64]) -> Mat2 {
        let conn = &self.mesh.elements[e];
        let qp = &self.points[e][q];
        let mut f = [[1.0, 0.0], [0.0, 1.0]];
        for (a, &node) in conn.iter().enumerate() {
            for i in 0..2 {
                let ui = u[2 * node + i];
                for jj in 0..2 {
                    f[i][jj] += ui * qp.grad[a][jj];
                }
            }
        }
        f
    }

    /// Plane-strain deformation gradient at a quadrature point.
    pub fn deformation(&self, e: usize, q: usize, u: &[f64]) -> DeformationGradient {
        let f = self.gradient(e, q, u);
        DeformationGradient::plane_strain(f[0][0], f[0][1], f[1][0], f[1][1])
    }

    /// Stored energy of the body.
    pub fn energy(&self, model: &MaterialModel, u: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for e in 0..self.mesh.elements.len() {
            for q in 0..4 {
                total += self.points[e][q].weight * model.strain_energy(&self.deformation(e, q, u))?;
            }
        }
        Ok(total)
    }

    /// Internal nodal forces `dEnergy/du` over all dofs.
    pub fn internal_forces(&self, model: &MaterialModel, u: &[f64]) -> Result<Vec<f64>> {
        let mut r = vec![0.0; u.len()];
        for e in 0..self.mesh.elements.len() {
            let conn = self.mesh.elements[e];
            for q in 0..4 {
                let p = stress(model, &self.gradient(e, q, u))?;
                let qp = &self.points[e][q];
                for (a, &node) in conn.iter().enumerate() {
                    for i in 0..2 {
                        r[2 * node + i] +=
                            qp.weight * (p[i][0] * qp.grad[a][0] + p[i][1] * qp.grad[a][1]);
                    }
                }
            }
        }
        Ok(r)
    }

    /// Internal forces over all dofs and the tangent restricted to the
    /// free dofs given by `free_index` (`usize::MAX` marks a fixed dof).
    ///
    /// With `fixed_increment` (indexed by dof) the coupling `K_fc * du_c` is
    /// accumulated into the third return value.
    pub fn linearize(
        &self,
        model: &MaterialModel,
        u: &[f64],
        free_index: &[usize],
        n_free: usize,
        half_bandwidth: usize,
        fixed_increment: Option<&[f64]>,
    ) -> Result<(Vec<f64>, BandMatrix, Vec<f64>)> {
        let mut r = vec![0.0; u.len()];
        let mut k = BandMatrix::zeros(n_free, half_bandwidth);
        let mut coupling = vec![0.0; if fixed_increment.is_some() { n_free } else { 0 }];
        for e in 0..self.mesh.elements.len() {
            let conn = self.mesh.elements[e];
            let mut ke = [[0.0; 8]; 8];
            for q in 0..4 {
                let (p, tangent) = stress_and_tangent(model, &self.gradient(e, q, u))?;
                let qp = &self.points[e][q];
                let g = &qp.grad;
                for a in 0..4 {
                    for i in 0..2 {
                        r[2 * conn[a] + i] += qp.weight * (p[i][0] * g[a][0] + p[i][1] * g[a][1]);
                        for b in 0..4 {
                            for kk in 0..2 {
                                let mut s = 0.0;
                                for jj in 0..2 {
                                    for l in 0..2 {
                                        s += tangent[i][jj][kk][l] * g[a][jj] * g[b][l];
                                    }
                                }
                                ke[2 * a + i][2 * b + kk] += qp.weight * s;
                            }
                        }
                    }
                }
            }
            for a in 0..8 {
                let ra = free_index[2 * conn[a / 2] + a % 2];
                if ra == usize::MAX {
                    continue;
                }
                for b in 0..8 {
                    let dof_b = 2 * conn[b / 2] + b % 2;
                    let cb = free_index[dof_b];
                    if cb != usize::MAX {
                        k.add(ra, cb, ke[a][b]);
                    } else if let Some(inc) = fixed_increment {
                        coupling[ra] += ke[a][b] * inc[dof_b];
                    }
                }
            }
        }
        Ok((r, k, coupling))
    }

    /// Half-bandwidth of the free-dof system for this connectivity.
    pub fn half_bandwidth(&self, free_index: &[usize]) -> usize {
        let mut hb = 0;
        for conn in &self.mesh.elements {
            let ids: Vec<usize> = conn
                .iter()
                .flat_map(|&n| [free_index[2 * n], free_index[2 * n + 1]])
                .filter(|&i| i != usize::MAX)
                .collect();
            if let (Some(lo), Some(hi)) = (ids.iter().min(), ids.iter().max()) {
                hb = hb.max(hi - lo);
            }
        }
        hb
    }
}

fn stress(model: &MaterialModel, f: &Mat2) -> Result<Mat2> {
    let p = model.piola_stress(&DeformationGradient::plane_strain(
        f[0][0], f[0][1], f[1][0], f[1][1],
    ))?;
    Ok([[p[(0, 0)], p[(0, 1)]], [p[(1, 0)], p[(1, 1)]]])
}

/// In-plane stress and its central-difference derivative.
fn stress_and_tangent(model: &MaterialModel, f: &Mat2) -> Result<(Mat2, Tangent2)> {
    let p = stress(model, f)?;
    let mut a = [[[[0.0; 2]; 2]; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let h = TANGENT_STEP * f[k][l].abs().max(1.0);
            let mut fp = *f;
            let mut fm = *f;
            fp[k][l] += h;
            fm[k][l] -= h;
            let pp = stress(model, &fp)?;
            let pm = stress(model, &fm)?;
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j][k][l] = (pp[i][j] - pm[i][j]) / (2.0 * h);
                }
            }
        }
    }
    Ok((p, a))
}
