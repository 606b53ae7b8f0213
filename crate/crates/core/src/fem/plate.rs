//! Displacement-controlled biaxial pull of the quarter plate with a hole.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MaterialModel, Regime};

use super::assembly::Discretization;
use super::mesh::PlateMesh;
use super::solver::{Dirichlet, EquilibriumSolver, NewtonSettings, StepDiagnostics};

/// Equidistant ramp of the bottom-edge displacement `delta`; the left edge
/// moves `left_ratio * delta`. Both edges are pulled outward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadProgram {
    pub steps: usize,
    pub delta_max: f64,
    pub left_ratio: f64,
}

impl Default for LoadProgram {
    fn default() -> Self {
        Self {
            steps: 10,
            delta_max: 0.3,
            left_ratio: 0.5,
        }
    }
}

impl LoadProgram {
    /// Bottom-edge displacement at each step, ending at `delta_max`.
    pub fn deltas(&self) -> Vec<f64> {
        (1..=self.steps)
            .map(|k| self.delta_max * k as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemSolution {
    pub deltas: Vec<f64>,
    /// Nodal displacements per step, `u[2 * node + dim]`.
    pub displacements: Vec<Vec<f64>>,
    /// Horizontal resultant on the left edge per step.
    pub r1: Vec<f64>,
    /// Vertical resultant on the bottom edge per step.
    pub r2: Vec<f64>,
    /// Per step, `[u1 at probes..., u2 at probes...]`.
    pub probe_displacements: Vec<Vec<f64>>,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl FemSolution {
    /// Reactions per step, positive when the edge is pulled outward.
    pub fn reactions(&self) -> (&[f64], &[f64]) {
        (&self.r1, &self.r2)
    }
}

/// Dirichlet data at unit load: symmetry on top and right, outward pull on
/// the bottom (`-y`) and left (`-x`) edges.
fn boundary_conditions(plate: &PlateMesh, program: &LoadProgram) -> Dirichlet {
    let mut prescribed: Vec<(usize, f64)> = Vec::new();
    for &n in &plate.top {
        prescribed.push((2 * n + 1, 0.0));
    }
    for &n in &plate.right {
        prescribed.push((2 * n, 0.0));
    }
    for &n in &plate.bottom {
        prescribed.push((2 * n + 1, -1.0));
    }
    for &n in &plate.left {
        prescribed.push((2 * n, -program.left_ratio));
    }
    prescribed.sort_by_key(|p| p.0);
    prescribed.dedup_by_key(|p| p.0);
    Dirichlet {
        dofs: prescribed.iter().map(|p| p.0).collect(),
        unit_values: prescribed.iter().map(|p| p.1).collect(),
    }
}

/// Runs the load program on `plate`.
pub fn solve(
    model: &MaterialModel,
    plate: &PlateMesh,
    program: &LoadProgram,
    settings: NewtonSettings,
) -> Result<FemSolution> {
    if model.regime() != Regime::CompressiblePenalty {
        return Err(Error::WrongRegime {
            expected: "compressible-penalty",
        });
    }
    if program.steps == 0 || !program.delta_max.is_finite() || !program.left_ratio.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "load program needs at least one step and finite displacements, got {program:?}"
        )));
    }
    let disc = Discretization::new(&plate.mesh)?;
    let bc = boundary_conditions(plate, program);
    let solver = EquilibriumSolver::new(&disc, model, &bc, settings);
    let deltas = program.deltas();
    let steps = solver.run(&deltas)?;

    let mut out = FemSolution {
        deltas,
        displacements: Vec::with_capacity(steps.len()),
        r1: Vec::with_capacity(steps.len()),
        r2: Vec::with_capacity(steps.len()),
        probe_displacements: Vec::with_capacity(steps.len()),
        diagnostics: Vec::with_capacity(steps.len()),
    };
    for step in steps {
        let f = &step.internal_forces;
        out.r1.push(-plate.left.iter().map(|&n| f[2 * n]).sum::<f64>());
        out.r2.push(-plate.bottom.iter().map(|&n| f[2 * n + 1]).sum::<f64>());
        let u = &step.displacement;
        let mut probes: Vec<f64> = plate.probes.iter().map(|&n| u[2 * n]).collect();
        probes.extend(plate.probes.iter().map(|&n| u[2 * n + 1]));
        out.probe_displacements.push(probes);
        out.diagnostics.push(step.diagnostics);
        out.displacements.push(step.displacement);
    }
    Ok(out)
}

/// Writes `nodes.csv`, `elements.csv` and `displacements.csv` into `dir`.
pub fn dump_fields(dir: &Path, plate: &PlateMesh, solution: &FemSolution) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join("nodes.csv"))?);
    writeln!(w, "node,x,y")?;
    for (i, p) in plate.mesh.nodes.iter().enumerate() {
        writeln!(w, "{i},{},{}", p[0], p[1])?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("elements.csv"))?);
    writeln!(w, "element,n0,n1,n2,n3")?;
    for (i, e) in plate.mesh.elements.iter().enumerate() {
        writeln!(w, "{i},{},{},{},{}", e[0], e[1], e[2], e[3])?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("displacements.csv"))?);
    writeln!(w, "step,delta,node,u1,u2")?;
    for (s, u) in solution.displacements.iter().enumerate() {
        for n in 0..plate.mesh.n_nodes() {
            writeln!(w, "{},{},{n},{},{}", s + 1, solution.deltas[s], u[2 * n], u[2 * n + 1])?;
        }
    }
    w.flush()?;
    Ok(())
}
