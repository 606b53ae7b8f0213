//! Quasi-static Newton solver with load-step bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MaterialModel;

use super::assembly::Discretization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    /// Relative residual tolerance on the free dofs.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Levels of recursive load-step halving after a failed step.
    pub max_bisections: u32,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 25,
            max_bisections: 4,
        }
    }
}

/// Prescribed displacements proportional to a load factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet {
    pub dofs: Vec<usize>,
    /// Values at load factor one.
    pub unit_values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub iterations: usize,
    pub substeps: usize,
    /// Residual norm over free dofs at acceptance.
    pub residual: f64,
    /// Reference force scale used for the relative criterion.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub load: f64,
    pub displacement: Vec<f64>,
    /// Internal forces at equilibrium; at fixed dofs these are the reactions.
    pub internal_forces: Vec<f64>,
    pub diagnostics: StepDiagnostics,
}

pub struct EquilibriumSolver<'a> {
    disc: &'a Discretization<'a>,
    model: &'a MaterialModel,
    bc: &'a Dirichlet,
    settings: NewtonSettings,
    free_index: Vec<usize>,
    n_free: usize,
    half_bandwidth: usize,
}

impl<'a> EquilibriumSolver<'a> {
    pub fn new(
        disc: &'a Discretization<'a>,
        model: &'a MaterialModel,
        bc: &'a Dirichlet,
        settings: NewtonSettings,
    ) -> Self {
        let n_dofs = disc.mesh().n_dofs();
        let mut fixed = vec![false; n_dofs];
        for &d in &bc.dofs {
            fixed[d] = true;
        }
        let mut free_index = vec![usize::MAX; n_dofs];
        let mut n_free = 0;
        for (d, slot) in free_index.iter_mut().enumerate() {
            if !fixed[d] {
                *slot = n_free;
                n_free += 1;
            }
        }
        let half_bandwidth = disc.half_bandwidth(&free_index);
        Self {
            disc,
            model,
            bc,
            settings,
            free_index,
            n_free,
            half_bandwidth,
        }
    }

    /// Solves the sequence of load factors, each step starting from the
    /// previous equilibrium.
    pub fn run(&self, loads: &[f64]) -> Result<Vec<StepResult>> {
        let mut u = vec![0.0; self.disc.mesh().n_dofs()];
        let mut prev_load = 0.0;
        let mut out = Vec::with_capacity(loads.len());
        for (step, &load) in loads.iter().enumerate() {
            let mut diag = StepDiagnostics::default();
            self.advance(&mut u, prev_load, load, 0, step, &mut diag)?;
            let internal_forces = self.disc.internal_forces(self.model, &u)?;
            out.push(StepResult {
                load,
                displacement: u.clone(),
                internal_forces,
                diagnostics: diag,
            });
            prev_load = load;
        }
        Ok(out)
    }

    fn advance(
        &self,
        u: &mut Vec<f64>,
        from: f64,
        to: f64,
        depth: u32,
        step: usize,
        diag: &mut StepDiagnostics,
    ) -> Result<()> {
        let start = u.clone();
        match self.newton(u, from, to, step) {
            Ok(d) => {
                diag.iterations += d.iterations;
                diag.substeps += 1;
                diag.residual = d.residual;
                diag.reference = d.reference;
                Ok(())
            }
            Err(err) if depth < self.settings.max_bisections && recoverable(&err) => {
                *u = start;
                let mid = 0.5 * (from + to);
                self.advance(u, from, mid, depth + 1, step, diag)?;
                self.advance(u, mid, to, depth + 1, step, diag)
            }
            Err(err) => Err(err),
        }
    }

    /// Newton iterations from the equilibrium at `from` to the one at `to`.
    /// The first update is a linearized predictor that moves the free dofs
    /// together with the prescribed increment.
    fn newton(&self, u: &mut [f64], from: f64, to: f64, step: usize) -> Result<StepDiagnostics> {
        let mut increment = vec![0.0; u.len()];
        for (&d, &v) in self.bc.dofs.iter().zip(&self.bc.unit_values) {
            increment[d] = (to - from) * v;
        }
        let (r, k, coupling) = self.disc.linearize(
            self.model,
            u,
            &self.free_index,
            self.n_free,
            self.half_bandwidth,
            Some(&increment),
        )?;
        let mut rhs = coupling;
        for (d, &fi) in self.free_index.iter().enumerate() {
            if fi != usize::MAX {
                rhs[fi] += r[d];
            }
        }
        let du = k.solve(&rhs).ok_or(Error::NewtonDivergence {
            step,
            residual: norm(&rhs),
        })?;
        for (d, &fi) in self.free_index.iter().enumerate() {
            if fi == usize::MAX {
                u[d] += increment[d];
            } else {
                u[d] -= du[fi];
            }
        }
        for (&d, &v) in self.bc.dofs.iter().zip(&self.bc.unit_values) {
            u[d] = to * v;
        }

        let mut reference = 0.0f64;
        let mut residual = f64::INFINITY;
        for it in 1..=self.settings.max_iterations + 1 {
            let (r, k, _) = self.disc.linearize(
                self.model,
                u,
                &self.free_index,
                self.n_free,
                self.half_bandwidth,
                None,
            )?;
            let mut rf = vec![0.0; self.n_free];
            let mut fixed_sq = 0.0;
            for (d, &fi) in self.free_index.iter().enumerate() {
                if fi == usize::MAX {
                    fixed_sq += r[d] * r[d];
                } else {
                    rf[fi] = r[d];
                }
            }
            residual = norm(&rf);
            if it == 1 {
                reference = residual;
            }
            reference = reference.max(fixed_sq.sqrt());
            if residual == 0.0 || residual <= self.settings.tolerance * reference {
                return Ok(StepDiagnostics {
                    iterations: it,
                    substeps: 1,
                    residual,
                    reference,
                });
            }
            if !residual.is_finite() || it > self.settings.max_iterations {
                break;
            }
            let du = k.solve(&rf).ok_or(Error::NewtonDivergence { step, residual })?;
            self.update_with_backtracking(u, &du)?;
        }
        Err(Error::NewtonDivergence { step, residual })
    }

    /// `u -= s * du`, halving `s` while the trial state leaves the material
    /// domain (inverted elements, Gent limit).
    fn update_with_backtracking(&self, u: &mut [f64], du: &[f64]) -> Result<()> {
        let mut s = 1.0;
        let mut last_err = None;
        for _ in 0..8 {
            let mut trial = u.to_vec();
            for (d, &fi) in self.free_index.iter().enumerate() {
                if fi != usize::MAX {
                    trial[d] -= s * du[fi];
                }
            }
            match self.disc.internal_forces(self.model, &trial) {
                Ok(_) => {
                    u.copy_from_slice(&trial);
                    return Ok(());
                }
                Err(e) if e.is_material_domain() => {
                    last_err = Some(e);
                    s *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("backtracking loop ran"))
    }
}

fn recoverable(err: &Error) -> bool {
    matches!(err, Error::NewtonDivergence { .. }) || err.is_material_domain()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
