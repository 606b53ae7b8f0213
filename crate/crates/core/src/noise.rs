//! Seeded Gaussian measurement noise.
//!
//! Draws come from `ChaCha8Rng::seed_from_u64(seed)`. Each pair of uniforms
//! `u1 = 1 - U`, `u2 = U'` (with `U` from `Rng::gen::<f64>()`, in `[0, 1)`)
//! yields two standard normals `sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)`,
//! consumed in that order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation as a fraction of the largest absolute entry.
    pub level: f64,
    pub seed: u64,
}

/// Stream of standard normal samples.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

fn perturb(values: &mut [f64], level: f64, normals: &mut NormalStream) {
    let std = level * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in values.iter_mut() {
        *v += std * normals.next_normal();
    }
}

/// Adds noise to a raw fingerprint. With `split = Some(k)` the first `k`
/// entries (forces) and the rest (displacements) get separate standard
/// deviations from their own maxima; one stream is shared, forces first.
pub fn add_noise(values: &[f64], spec: NoiseSpec, split: Option<usize>) -> Vec<f64> {
    let mut out = values.to_vec();
    if spec.level == 0.0 {
        return out;
    }
    let mut normals = NormalStream::new(spec.seed);
    match split {
        None => perturb(&mut out, spec.level, &mut normals),
        Some(k) => {
            let (force, disp) = out.split_at_mut(k.min(values.len()));
            perturb(force, spec.level, &mut normals);
            perturb(disp, spec.level, &mut normals);
        }
    }
    out
}
