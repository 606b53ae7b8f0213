//! Isotropic hyperelastic strain-energy families.
//!
//! Every family is linear in its homogeneity parameters `theta`, so
//! `W(F; a*theta, alpha) = a * W(F; theta, alpha)`. The fingerprint
//! normalization downstream relies on this.
//!
//! Parameter layout per family (incompressible regime):
//!
//! | family        | theta              | alpha   |
//! |---------------|--------------------|---------|
//! | Blatz-Ko      | `[c_I2]`           | `[]`    |
//! | Demiray       | `[c]`              | `[a]`   |
//! | Gent          | `[c]`              | `[a]`   |
//! | Holzapfel     | `[c]`              | `[a]`   |
//! | Mooney-Rivlin | `[c_I1, c_I2]`     | `[]`    |
//! | Neo-Hooke     | `[c_I1]`           | `[]`    |
//! | Ogden         | `[c]`              | `[a]`   |
//!
//! In the compressible-penalty regime the volumetric coefficient `theta0`
//! is prepended: `theta = [theta0, ...]`, the invariants are replaced by
//! their isochoric counterparts and `theta0 * (J - 1)^2` is added.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest exponential argument evaluated before raising [`Error::Overflow`].
pub const EXP_ARGUMENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BlatzKo,
    Demiray,
    Gent,
    Holzapfel,
    MooneyRivlin,
    NeoHooke,
    Ogden,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::BlatzKo,
        Family::Demiray,
        Family::Gent,
        Family::Holzapfel,
        Family::MooneyRivlin,
        Family::NeoHooke,
        Family::Ogden,
    ];

    /// Number of homogeneity parameters, excluding the volumetric penalty.
    pub fn n_theta(self) -> usize {
        match self {
            Family::MooneyRivlin => 2,
            _ => 1,
        }
    }

    pub fn n_alpha(self) -> usize {
        match self {
            Family::Demiray | Family::Gent | Family::Holzapfel | Family::Ogden => 1,
            _ => 0,
        }
    }

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Family> {
        Family::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::BlatzKo => "blatz-ko",
            Family::Demiray => "demiray",
            Family::Gent => "gent",
            Family::Holzapfel => "holzapfel",
            Family::MooneyRivlin => "mooney-rivlin",
            Family::NeoHooke => "neo-hooke",
            Family::Ogden => "ogden",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().replace('-', "") == key)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown model family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `W~(I1, I2) + p (J - 1)`; the pressure is eliminated per experiment.
    IncompressibleLagrange,
    /// `W~(I1bar, I2bar) + theta0 (J - 1)^2`.
    CompressiblePenalty,
}

/// Deformation gradient `F`, a thin wrapper over a 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationGradient(pub Matrix3<f64>);

impl DeformationGradient {
    pub fn new(f: Matrix3<f64>) -> Self {
        Self(f)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Incompressible uniaxial tension, `diag(l, l^-1/2, l^-1/2)`.
    pub fn uniaxial(stretch: f64) -> Self {
        let t = 1.0 / stretch.sqrt();
        Self(Matrix3::from_diagonal(&nalgebra::Vector3::new(stretch, t, t)))
    }

    /// Simple shear, `I + gamma e1 (x) e2`.
    pub fn simple_shear(gamma: f64) -> Self {
        let mut f = Matrix3::identity();
        f[(0, 1)] = gamma;
        Self(f)
    }

    /// Plane-strain gradient from the in-plane block; `F33 = 1`.
    pub fn plane_strain(f11: f64, f12: f64, f21: f64, f22: f64) -> Self {
        Self(Matrix3::new(f11, f12, 0.0, f21, f22, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn from_stretches(l1: f64, l2: f64, l3: f64) -> Self {
        Self(Matrix3::from_diagonal(&nalgebra::Vector3::new(l1, l2, l3)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

/// Kinematic invariants of a deformation gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub i1: f64,
    pub i2: f64,
    pub j: f64,
    pub iso_i1: f64,
    pub iso_i2: f64,
    /// Principal stretches in ascending order.
    pub principal_stretches: [f64; 3],
}

impl Invariants {
    pub fn of(f: &DeformationGradient) -> Result<Self> {
        let (i1, i2, j) = basic_invariants(f)?;
        let (iso_i1, iso_i2) = isochoric(i1, i2, j);
        Ok(Self {
            i1,
            i2,
            j,
            iso_i1,
            iso_i2,
            principal_stretches: principal_stretches(f.matrix()),
        })
    }
}

fn basic_invariants(f: &DeformationGradient) -> Result<(f64, f64, f64)> {
    let j = f.det();
    if !(j > 0.0) {
        return Err(Error::InvalidDeformation { det: j });
    }
    let c = f.0.transpose() * f.0;
    let i1 = c.trace();
    let i2 = 0.5 * (i1 * i1 - (c * c).trace());
    Ok((i1, i2, j))
}

fn isochoric(i1: f64, i2: f64, j: f64) -> (f64, f64) {
    let j23 = j.powf(-2.0 / 3.0);
    (j23 * i1, j23 * j23 * i2)
}

fn principal_stretches(f: &Matrix3<f64>) -> [f64; 3] {
    let (stretches, _) = spectral(f);
    stretches
}

/// Principal stretches (ascending) and the matching right eigenvectors of `C`.
fn spectral(f: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let c = f.transpose() * f;
    let eig = SymmetricEigen::new(c);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut stretches = [0.0; 3];
    let mut vectors = Matrix3::zeros();
    for (k, &src) in order.iter().enumerate() {
        stretches[k] = eig.eigenvalues[src].max(0.0).sqrt();
        vectors.set_column(k, &eig.eigenvectors.column(src));
    }
    (stretches, vectors)
}

/// Closed-form principal stretches of incompressible simple shear.
///
/// Returns `(l1, l2, l3)` with `l2 = 1`, `l1 * l3 = 1` and `l1 <= 1 <= l3`.
/// The inner radical `sqrt(c^2 - 1)` with `c = 1 + gamma^2/2` is evaluated
/// as `|gamma| sqrt(1 + gamma^2/4)` to avoid cancellation at small shear.
pub fn ogden_shear_stretches(gamma: f64) -> (f64, f64, f64) {
    let g = gamma.abs();
    let c = 1.0 + 0.5 * g * g;
    let root = g * (1.0 + 0.25 * g * g).sqrt();
    ((c - root).sqrt(), 1.0, (c + root).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    family: Family,
    regime: Regime,
    theta: Vec<f64>,
    alpha: Vec<f64>,
}

impl MaterialModel {
    pub fn new(family: Family, regime: Regime, theta: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let expected_theta = family.n_theta()
            + match regime {
                Regime::IncompressibleLagrange => 0,
                Regime::CompressiblePenalty => 1,
            };
        if theta.len() != expected_theta {
            return Err(Error::InvalidParameters(format!(
                "{family} ({regime:?}) expects {expected_theta} theta values, got {}",
                theta.len()
            )));
        }
        if alpha.len() != family.n_alpha() {
            return Err(Error::InvalidParameters(format!(
                "{family} expects {} alpha values, got {}",
                family.n_alpha(),
                alpha.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidParameters(format!(
                "theta must be finite and non-negative, got {t}"
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !a.is_finite() || **a <= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "{family} requires alpha > 0, got {a}"
            )));
        }
        Ok(Self {
            family,
            regime,
            theta,
            alpha,
        })
    }

    pub fn incompressible(family: Family, theta: &[f64], alpha: &[f64]) -> Result<Self> {
        Self::new(
            family,
            Regime::IncompressibleLagrange,
            theta.to_vec(),
            alpha.to_vec(),
        )
    }

    /// Compressible model; `theta0` is the volumetric penalty coefficient.
    pub fn compressible(family: Family, theta0: f64, theta: &[f64], alpha: &[f64]) -> Result<Self> {
        let mut all = Vec::with_capacity(theta.len() + 1);
        all.push(theta0);
        all.extend_from_slice(theta);
        Self::new(family, Regime::CompressiblePenalty, all, alpha.to_vec())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Copy with every homogeneity parameter multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.family,
            self.regime,
            self.theta.iter().map(|t| t * factor).collect(),
            self.alpha.clone(),
        )
    }

    /// Volumetric coefficient and the family's own homogeneity parameters.
    fn split_theta(&self) -> (f64, &[f64]) {
        match self.regime {
            Regime::IncompressibleLagrange => (0.0, &self.theta),
            Regime::CompressiblePenalty => (self.theta[0], &self.theta[1..]),
        }
    }

    fn require_incompressible(&self) -> Result<()> {
        match self.regime {
            Regime::IncompressibleLagrange => Ok(()),
            Regime::CompressiblePenalty => Err(Error::WrongRegime {
                expected: "incompressible",
            }),
        }
    }

    /// `(W~, dW~/dI1, dW~/dI2)` for invariant-based families.
    fn invariant_terms(&self, i1: f64, i2: f64) -> Result<(f64, f64, f64)> {
        let (_, th) = self.split_theta();
        let x = i1 - 3.0;
        Ok(match self.family {
            Family::BlatzKo => (th[0] * (i2 - 3.0), 0.0, th[0]),
            Family::Demiray => {
                let a = self.alpha[0];
                let arg = checked_exp_argument(a * x)?;
                (th[0] * arg.exp_m1(), th[0] * a * arg.exp(), 0.0)
            }
            Family::Gent => {
                let a = self.alpha[0];
                let s = 1.0 - a * x;
                if !(s > 0.0) {
                    return Err(Error::GentDomain { argument: s });
                }
                (-th[0] * (-a * x).ln_1p(), th[0] * a / s, 0.0)
            }
            Family::Holzapfel => {
                let a = self.alpha[0];
                let arg = checked_exp_argument(a * x * x)?;
                (
                    th[0] * arg.exp_m1(),
                    2.0 * th[0] * a * x * arg.exp(),
                    0.0,
                )
            }
            Family::MooneyRivlin => (th[0] * x + th[1] * (i2 - 3.0), th[0], th[1]),
            Family::NeoHooke => (th[0] * x, th[0], 0.0),
            Family::Ogden => unreachable!("Ogden is stretch-based"),
        })
    }

    /// Ogden energy `c * sum(l_i^a - 1)` for the given stretches.
    fn ogden_energy(&self, stretches: &[f64; 3]) -> Result<f64> {
        let (_, th) = self.split_theta();
        let a = self.alpha[0];
        let mut sum = 0.0;
        for &l in stretches {
            let arg = checked_exp_argument(a * l.ln())?;
            sum += arg.exp_m1();
        }
        Ok(th[0] * sum)
    }

    /// Strain energy density `W(F)`.
    ///
    /// In the incompressible regime the Lagrange term is omitted, i.e. the
    /// isochoric part `W~` is returned with the raw invariants.
    pub fn strain_energy(&self, f: &DeformationGradient) -> Result<f64> {
        let (i1, i2, j) = basic_invariants(f)?;
        let (theta0, _) = self.split_theta();
        match self.regime {
            Regime::IncompressibleLagrange => {
                if self.family == Family::Ogden {
                    self.ogden_energy(&principal_stretches(f.matrix()))
                } else {
                    Ok(self.invariant_terms(i1, i2)?.0)
                }
            }
            Regime::CompressiblePenalty => {
                let vol = theta0 * (j - 1.0) * (j - 1.0);
                if self.family == Family::Ogden {
                    let scale = j.powf(-1.0 / 3.0);
                    let l = principal_stretches(f.matrix()).map(|l| l * scale);
                    Ok(self.ogden_energy(&l)? + vol)
                } else {
                    let (b1, b2) = isochoric(i1, i2, j);
                    Ok(self.invariant_terms(b1, b2)?.0 + vol)
                }
            }
        }
    }

    /// Strain energy as a function of the principal stretches.
    pub fn strain_energy_principal(&self, stretches: [f64; 3]) -> Result<f64> {
        let [l1, l2, l3] = stretches;
        let j = l1 * l2 * l3;
        if !(j > 0.0) || stretches.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidDeformation { det: j });
        }
        let (a, b, c) = (l1 * l1, l2 * l2, l3 * l3);
        let i1 = a + b + c;
        let i2 = a * b + b * c + a * c;
        let (theta0, _) = self.split_theta();
        match self.regime {
            Regime::IncompressibleLagrange => {
                if self.family == Family::Ogden {
                    self.ogden_energy(&stretches)
                } else {
                    Ok(self.invariant_terms(i1, i2)?.0)
                }
            }
            Regime::CompressiblePenalty => {
                let vol = theta0 * (j - 1.0) * (j - 1.0);
                if self.family == Family::Ogden {
                    let s = j.powf(-1.0 / 3.0);
                    Ok(self.ogden_energy(&stretches.map(|l| l * s))? + vol)
                } else {
                    let (b1, b2) = isochoric(i1, i2, j);
                    Ok(self.invariant_terms(b1, b2)?.0 + vol)
                }
            }
        }
    }

    /// First Piola-Kirchhoff stress `P = dW/dF` (compressible regime only).
    pub fn piola_stress(&self, f: &DeformationGradient) -> Result<Matrix3<f64>> {
        if self.regime != Regime::CompressiblePenalty {
            return Err(Error::WrongRegime {
                expected: "compressible",
            });
        }
        let (i1, i2, j) = basic_invariants(f)?;
        let (theta0, th) = self.split_theta();
        let fm = f.0;
        let f_inv_t = fm
            .try_inverse()
            .ok_or(Error::InvalidDeformation { det: j })?
            .transpose();
        let d_vol = 2.0 * theta0 * (j - 1.0) * j;

        if self.family == Family::Ogden {
            let (stretches, n) = spectral(&fm);
            let a = self.alpha[0];
            let scale = j.powf(-1.0 / 3.0);
            let mut powers = [0.0; 3];
            for (p, &l) in powers.iter_mut().zip(&stretches) {
                *p = checked_exp_argument(a * (l * scale).ln())?.exp();
            }
            let mean = (powers[0] + powers[1] + powers[2]) / 3.0;
            // S = sum_i (1/l_i) dW/dl_i N_i N_i^T, P = F S
            let mut s = Matrix3::zeros();
            for i in 0..3 {
                let l = stretches[i];
                let dw = th[0] * a / l * (powers[i] - mean) + d_vol / l;
                let col = n.column(i);
                s += (dw / l) * col * col.transpose();
            }
            return Ok(fm * s);
        }

        let (b1, b2) = isochoric(i1, i2, j);
        let (_, w1, w2) = self.invariant_terms(b1, b2)?;
        let j23 = j.powf(-2.0 / 3.0);
        let c = fm.transpose() * fm;
        let d_iso1 = j23 * (2.0 * fm - (2.0 / 3.0) * i1 * f_inv_t);
        let d_i2 = 2.0 * (i1 * fm - fm * c);
        let d_iso2 = j23 * j23 * (d_i2 - (4.0 / 3.0) * i2 * f_inv_t);
        Ok(w1 * d_iso1 + w2 * d_iso2 + d_vol * f_inv_t)
    }

    /// Nominal stress `P11` in incompressible uniaxial tension with the
    /// lateral faces traction free (pressure eliminated in closed form).
    pub fn ut_stress(&self, stretch: f64) -> Result<f64> {
        self.require_incompressible()?;
        if !(stretch > 0.0) {
            return Err(Error::NonPositiveStretch(stretch));
        }
        let l = stretch;
        if self.family == Family::Ogden {
            let (_, th) = self.split_theta();
            let a = self.alpha[0];
            let up = checked_exp_argument((a - 1.0) * l.ln())?.exp();
            let down = checked_exp_argument((-0.5 * a - 1.0) * l.ln())?.exp();
            return Ok(th[0] * a * (up - down));
        }
        let i1 = l * l + 2.0 / l;
        let i2 = 2.0 * l + 1.0 / (l * l);
        let (_, w1, w2) = self.invariant_terms(i1, i2)?;
        Ok(2.0 * (l - 1.0 / (l * l)) * (w1 + w2 / l))
    }

    /// Shear stress `P12` in incompressible simple shear (pressure free).
    pub fn ss_stress(&self, gamma: f64) -> Result<f64> {
        self.require_incompressible()?;
        if self.family == Family::Ogden {
            let (_, th) = self.split_theta();
            let a = self.alpha[0];
            let g = gamma.abs();
            let c = 1.0 + 0.5 * g * g;
            let root = (1.0 + 0.25 * g * g).sqrt();
            // s = l3^2, W = c6 (s^(a/2) + s^(-a/2) - 2)
            let s = c + g * root;
            let ds = g + c / root;
            let up = checked_exp_argument((0.5 * a - 1.0) * s.ln())?.exp();
            let down = checked_exp_argument((-0.5 * a - 1.0) * s.ln())?.exp();
            return Ok(gamma.signum() * th[0] * 0.5 * a * (up - down) * ds);
        }
        let i = 3.0 + gamma * gamma;
        let (_, w1, w2) = self.invariant_terms(i, i)?;
        Ok(2.0 * gamma * (w1 + w2))
    }
}

fn checked_exp_argument(arg: f64) -> Result<f64> {
    if arg > EXP_ARGUMENT_CAP || arg.is_nan() {
        Err(Error::Overflow { argument: arg })
    } else {
        Ok(arg)
    }
}

impl fmt::Display for MaterialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (theta0, th) = self.split_theta();
        let (i1, i2) = match self.regime {
            Regime::IncompressibleLagrange => ("I1", "I2"),
            Regime::CompressiblePenalty => ("I1bar", "I2bar"),
        };
        match self.family {
            Family::BlatzKo => write!(f, "{:.2} [{i2} - 3]", th[0])?,
            Family::Demiray => write!(
                f,
                "{:.2} [exp({:.2} [{i1} - 3]) - 1]",
                th[0], self.alpha[0]
            )?,
            Family::Gent => write!(f, "-{:.2} ln(1 - {:.2} [{i1} - 3])", th[0], self.alpha[0])?,
            Family::Holzapfel => write!(
                f,
                "{:.2} [exp({:.2} [{i1} - 3]^2) - 1]",
                th[0], self.alpha[0]
            )?,
            Family::MooneyRivlin => write!(f, "{:.2} [{i1} - 3] + {:.2} [{i2} - 3]", th[0], th[1])?,
            Family::NeoHooke => write!(f, "{:.2} [{i1} - 3]", th[0])?,
            Family::Ogden => {
                let a = self.alpha[0];
                write!(f, "{:.2} [l1^{a:.2} + l2^{a:.2} + l3^{a:.2} - 3]", th[0])?
            }
        }
        match self.regime {
            Regime::IncompressibleLagrange => write!(f, " + p [J - 1]"),
            Regime::CompressiblePenalty => write!(f, " + {theta0:.2} [J - 1]^2"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nh(theta: f64) -> MaterialModel {
        MaterialModel::incompressible(Family::NeoHooke, &[theta], &[]).unwrap()
    }

    /// Every family with representative parameters, in one regime.
    fn zoo(regime: Regime) -> Vec<MaterialModel> {
        let base = [
            (Family::BlatzKo, vec![1.3], vec![]),
            (Family::Demiray, vec![0.7], vec![2.5]),
            (Family::Gent, vec![1.1], vec![0.6]),
            (Family::Holzapfel, vec![0.9], vec![3.0]),
            (Family::MooneyRivlin, vec![0.4, 1.2], vec![]),
            (Family::NeoHooke, vec![1.0], vec![]),
            (Family::Ogden, vec![0.8], vec![3.5]),
        ];
        base.into_iter()
            .map(|(fam, th, al)| match regime {
                Regime::IncompressibleLagrange => MaterialModel::incompressible(fam, &th, &al),
                Regime::CompressiblePenalty => MaterialModel::compressible(fam, 1.7, &th, &al),
            })
            .map(Result::unwrap)
            .collect()
    }

    fn sample_f(k: usize) -> DeformationGradient {
        // deterministic, mildly sheared, det > 0
        let s = k as f64;
        DeformationGradient::new(Matrix3::new(
            1.05 + 0.03 * (s * 0.7).sin(),
            0.08 * (s * 1.3).cos(),
            0.02 * (s * 0.4).sin(),
            -0.05 * (s * 0.9).sin(),
            0.95 + 0.04 * (s * 1.1).cos(),
            0.03 * (s * 2.1).cos(),
            0.01 * s.cos(),
            -0.02 * (s * 0.3).sin(),
            1.02 + 0.02 * (s * 0.5).sin(),
        ))
    }

    #[test]
    fn identity_invariants() {
        let inv = Invariants::of(&DeformationGradient::identity()).unwrap();
        assert_eq!(inv.i1, 3.0);
        assert_eq!(inv.i2, 3.0);
        assert_eq!(inv.j, 1.0);
        assert_eq!(inv.principal_stretches, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn stretches_consistent_with_invariants() {
        for k in 0..10 {
            let f = sample_f(k);
            let inv = Invariants::of(&f).unwrap();
            let [a, b, c] = inv.principal_stretches;
            assert!((a * b * c - inv.j).abs() < 1e-12);
            assert!((a * a + b * b + c * c - inv.i1).abs() < 1e-12);
        }
    }

    #[test]
    fn neo_hooke_energy_uniaxial() {
        assert_eq!(nh(10.0).strain_energy(&DeformationGradient::identity()).unwrap(), 0.0);
        let w = nh(10.0)
            .strain_energy(&DeformationGradient::uniaxial(1.5))
            .unwrap();
        assert!((w - 10.0 * (1.5f64.powi(2) + 2.0 / 1.5 - 3.0)).abs() < 1e-12);
        assert!((w - 5.833333333333333).abs() < 1e-12);
    }

    #[test]
    fn ut_stress_neo_hooke() {
        assert_eq!(nh(10.0).ut_stress(1.0).unwrap(), 0.0);
        let p = nh(10.0).ut_stress(1.5).unwrap();
        assert!((p - 21.111111111111111).abs() < 1e-12, "{p}");
    }

    #[test]
    fn ss_stress_examples() {
        assert!((nh(10.0).ss_stress(0.5).unwrap() - 10.0).abs() < 1e-12);
        let bk = MaterialModel::incompressible(Family::BlatzKo, &[50.0], &[]).unwrap();
        assert!((bk.ss_stress(0.5).unwrap() - 50.0).abs() < 1e-12);
        for m in zoo(Regime::IncompressibleLagrange) {
            assert_eq!(m.ss_stress(0.0).unwrap(), 0.0);
            assert_eq!(m.ut_stress(1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn ogden_alpha_two_is_neo_hooke() {
        let og = MaterialModel::incompressible(Family::Ogden, &[10.0], &[2.0]).unwrap();
        let a = og.ut_stress(1.5).unwrap();
        let b = nh(10.0).ut_stress(1.5).unwrap();
        assert!((a - b).abs() < 1e-12);
        for g in [0.1, 0.3, 0.5] {
            assert!((og.ss_stress(g).unwrap() - nh(10.0).ss_stress(g).unwrap()).abs() < 1e-12);
        }
        let unit = MaterialModel::incompressible(Family::Ogden, &[1.0], &[2.0]).unwrap();
        for k in 0..10 {
            let f = sample_f(k);
            let w1 = unit.strain_energy(&f).unwrap();
            let w2 = nh(1.0).strain_energy(&f).unwrap();
            assert!((w1 - w2).abs() <= 1e-12 * w2.abs().max(1e-3), "{w1} {w2}");
        }
    }

    #[test]
    fn shear_stretches() {
        assert_eq!(ogden_shear_stretches(0.0), (1.0, 1.0, 1.0));
        let (l1, l2, l3) = ogden_shear_stretches(0.5);
        assert_eq!(l2, 1.0);
        assert!((l1 * l3 - 1.0).abs() < 1e-12);
        assert!(l1 <= 1.0 && l3 >= 1.0);
        // eigen-decomposition oracle of C = F^T F
        let inv = Invariants::of(&DeformationGradient::simple_shear(0.5)).unwrap();
        let [a, b, c] = inv.principal_stretches;
        assert!((a - l1).abs() < 1e-12 && (b - l2).abs() < 1e-12 && (c - l3).abs() < 1e-12);
    }

    #[test]
    fn mooney_rivlin_without_i2_is_neo_hooke() {
        let mr = MaterialModel::incompressible(Family::MooneyRivlin, &[1.4, 0.0], &[]).unwrap();
        for k in 0..10 {
            let f = sample_f(k);
            assert_eq!(
                mr.strain_energy(&f).unwrap(),
                nh(1.4).strain_energy(&f).unwrap()
            );
        }
    }

    #[test]
    fn homogeneity_all_families() {
        for regime in [Regime::IncompressibleLagrange, Regime::CompressiblePenalty] {
            for m in zoo(regime) {
                for a in [0.5, 2.0, 100.0] {
                    let ms = m.scaled(a).unwrap();
                    for k in 0..5 {
                        let f = sample_f(k);
                        let w = m.strain_energy(&f).unwrap();
                        let ws = ms.strain_energy(&f).unwrap();
                        assert!((ws - a * w).abs() <= 1e-12 * (a * w).abs(), "{m} {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn piola_zero_at_identity() {
        for m in zoo(Regime::CompressiblePenalty) {
            let p = m.piola_stress(&DeformationGradient::identity()).unwrap();
            assert!(p.amax() < 1e-12, "{m}: {p}");
            assert_eq!(m.strain_energy(&DeformationGradient::identity()).unwrap(), 0.0);
        }
    }

    #[test]
    fn piola_requires_compressible() {
        assert!(matches!(
            nh(1.0).piola_stress(&DeformationGradient::identity()),
            Err(Error::WrongRegime { .. })
        ));
        let c = MaterialModel::compressible(Family::NeoHooke, 1.0, &[1.0], &[]).unwrap();
        assert!(matches!(c.ut_stress(1.2), Err(Error::WrongRegime { .. })));
    }

    #[test]
    fn errors() {
        let gent = MaterialModel::incompressible(Family::Gent, &[1.0], &[1.0]).unwrap();
        // I1 - 3 = 1.05 at this stretch
        assert!(matches!(gent.ut_stress(2.0), Err(Error::GentDomain { .. })));
        assert!(matches!(nh(1.0).ut_stress(0.0), Err(Error::NonPositiveStretch(_))));
        let flipped = DeformationGradient::from_stretches(-1.0, 1.0, 1.0);
        assert!(matches!(
            nh(1.0).strain_energy(&flipped),
            Err(Error::InvalidDeformation { .. })
        ));
        let dem = MaterialModel::incompressible(Family::Demiray, &[1.0], &[1000.0]).unwrap();
        assert!(matches!(dem.ut_stress(3.0), Err(Error::Overflow { .. })));
        assert!(MaterialModel::incompressible(Family::Ogden, &[1.0], &[0.0]).is_err());
        assert!(MaterialModel::incompressible(Family::NeoHooke, &[-1.0], &[]).is_err());
        assert!(MaterialModel::incompressible(Family::NeoHooke, &[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
            assert_eq!(Family::from_id(fam.id()), Some(fam));
        }
        assert_eq!("NeoHooke".parse::<Family>().unwrap(), Family::NeoHooke);
        assert!("rubber".parse::<Family>().is_err());
    }
}
