//! Structured quadrilateral meshes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bilinear quadrilateral mesh; element nodes counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
}

/// 2x2 Gauss points on the reference square.
pub(crate) const GAUSS_2X2: [[f64; 2]; 4] = {
    const G: f64 = 0.577_350_269_189_625_8;
    [[-G, -G], [G, -G], [G, G], [-G, G]]
};

/// Shape function derivatives w.r.t. `(xi, eta)` at a reference point.
pub(crate) fn shape_derivatives(xi: f64, eta: f64) -> [[f64; 2]; 4] {
    [
        [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
        [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
        [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
        [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
    ]
}

impl QuadMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    /// Reference Jacobian determinants at the 2x2 Gauss points of an element.
    pub fn jacobians(&self, element: usize) -> [f64; 4] {
        let conn = self.elements[element];
        let mut out = [0.0; 4];
        for (q, gp) in GAUSS_2X2.iter().enumerate() {
            let dn = shape_derivatives(gp[0], gp[1]);
            let mut j = [[0.0; 2]; 2];
            for (a, &node) in conn.iter().enumerate() {
                let x = self.nodes[node];
                for r in 0..2 {
                    for c in 0..2 {
                        j[r][c] += x[r] * dn[a][c];
                    }
                }
            }
            out[q] = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        }
        out
    }

    /// Fails with [`Error::MeshDegenerate`] on any non-positive Jacobian.
    pub fn check(&self) -> Result<()> {
        for e in 0..self.elements.len() {
            if let Some(j) = self.jacobians(e).iter().find(|j| !(**j > 0.0)) {
                return Err(Error::MeshDegenerate(format!(
                    "element {e} has reference Jacobian {j}"
                )));
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| self.jacobians(e).iter().sum::<f64>())
            .sum()
    }

    /// Regular `nx` x `ny` grid on `[0, width] x [0, height]`.
    pub fn rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Self {
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self { nodes, elements }
    }
}

/// Quarter of a square plate with a central circular hole.
///
/// The quarter occupies `[0, w] x [0, w]` with `w` the plate half-width; the
/// hole quarter is centred on the top-right corner `(w, w)`. Top and right
/// edges are symmetry planes, bottom and left edges are loaded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateGeometry {
    pub half_width: f64,
    pub hole_radius: f64,
}

impl Default for PlateGeometry {
    fn default() -> Self {
        Self {
            half_width: 0.5,
            hole_radius: 0.25,
        }
    }
}

/// Number of angular probe positions on the hole arc, 0 to 90 degrees.
pub const PROBE_COUNT: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct PlateMesh {
    pub mesh: QuadMesh,
    pub bottom: Vec<usize>,
    pub left: Vec<usize>,
    pub top: Vec<usize>,
    pub right: Vec<usize>,
    pub hole: Vec<usize>,
    /// Probe node ids, ordered by angle.
    pub probes: Vec<usize>,
    /// Probe angles in degrees, measured at the hole centre from the top
    /// symmetry edge (0) to the right symmetry edge (90).
    pub probe_angles: Vec<f64>,
}

impl PlateMesh {
    /// Circumferential elements on each side of the diagonal at `level`.
    pub fn circumferential_divisions(level: u32) -> usize {
        5 << (level - 1)
    }

    pub fn radial_divisions(level: u32) -> usize {
        4 << (level - 1)
    }

    /// Structured mesh of the quarter plate. Node rows run from the hole arc
    /// (`r = 0`) out to the loaded edges; the columns sweep the arc angle.
    /// Each refinement level halves the element size in both directions.
    pub fn build(geometry: &PlateGeometry, level: u32) -> Result<Self> {
        let w = geometry.half_width;
        let rad = geometry.hole_radius;
        if !(0.0 < rad && rad < w) {
            return Err(Error::MeshDegenerate(format!(
                "hole radius {rad} must lie in (0, {w})"
            )));
        }
        if level == 0 || level > 8 {
            return Err(Error::MeshDegenerate(format!(
                "refinement level {level} outside 1..=8"
            )));
        }
        let n = Self::circumferential_divisions(level);
        let m = Self::radial_divisions(level);
        let cols = 2 * n;
        let id = |c: usize, r: usize| c * (m + 1) + r;

        let mut nodes = Vec::with_capacity((cols + 1) * (m + 1));
        for c in 0..=cols {
            let phi = std::f64::consts::FRAC_PI_2 * c as f64 / cols as f64;
            let arc = if c == 0 {
                [w - rad, w]
            } else if c == cols {
                [w, w - rad]
            } else {
                [w - rad * phi.cos(), w - rad * phi.sin()]
            };
            // outer polyline: left edge top->corner, then bottom edge corner->right
            let outer = if c <= n {
                [0.0, w - w * c as f64 / n as f64]
            } else {
                [w * (c - n) as f64 / n as f64, 0.0]
            };
            for r in 0..=m {
                let t = r as f64 / m as f64;
                let mut p = [
                    (1.0 - t) * arc[0] + t * outer[0],
                    (1.0 - t) * arc[1] + t * outer[1],
                ];
                if r == m {
                    p = outer;
                }
                nodes.push(p);
            }
        }

        let mut elements = Vec::with_capacity(cols * m);
        for c in 0..cols {
            for r in 0..m {
                elements.push([id(c, r), id(c, r + 1), id(c + 1, r + 1), id(c + 1, r)]);
            }
        }
        let mesh = QuadMesh { nodes, elements };
        mesh.check()?;

        let probes: Vec<usize> = (0..PROBE_COUNT)
            .map(|k| id(k * cols / (PROBE_COUNT - 1), 0))
            .collect();
        let probe_angles = (0..PROBE_COUNT)
            .map(|k| 90.0 * k as f64 / (PROBE_COUNT - 1) as f64)
            .collect();
        Ok(Self {
            bottom: (n..=cols).map(|c| id(c, m)).collect(),
            left: (0..=n).map(|c| id(c, m)).collect(),
            top: (0..=m).map(|r| id(0, r)).collect(),
            right: (0..=m).map(|r| id(cols, r)).collect(),
            hole: (0..=cols).map(|c| id(c, 0)).collect(),
            probes,
            probe_angles,
            mesh,
        })
    }
}
