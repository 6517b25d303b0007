//! Pointwise nonlinearities of the three evolution laws, written for the
//! excitation `v = u - 1` (or directly for `w` in the energy-critical case).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;

/// Which evolution law a field obeys.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EquationSpec {
    /// Gross-Pitaevskii on the 4-torus, `i∂v + Δv = (|1+v|² - 1)(1+v)`.
    Gp4,
    /// Cubic-quintic on the 3-torus,
    /// `i∂v + Δv = (|1+v|² - 1)(|1+v|² - r₁²)(1+v)` with `γ = 1 - r₁²`.
    Cq3 { gamma: f64 },
    /// Defocusing energy-critical NLS `i∂w + Δw = |w|^{4/(n-2)} w`.
    EnergyCritical { dim: usize },
}

impl EquationSpec {
    pub fn cq3(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(EquationSpec::Cq3 { gamma })
    }

    pub fn energy_critical(dim: usize) -> Result<Self> {
        if !(3..=4).contains(&dim) {
            return Err(Error::param("dim", format!("must be 3 or 4, got {dim}")));
        }
        Ok(EquationSpec::EnergyCritical { dim })
    }

    pub fn dim(&self) -> usize {
        match *self {
            EquationSpec::Gp4 => 4,
            EquationSpec::Cq3 { .. } => 3,
            EquationSpec::EnergyCritical { dim } => dim,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            EquationSpec::Cq3 { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Smaller root `r₁² = 1 - γ` of the reduced cubic-quintic model.
    pub fn r1_sq(&self) -> Option<f64> {
        self.gamma().map(|g| 1.0 - g)
    }

    /// The energy-critical law this equation perturbs.
    pub fn critical_part(&self) -> EquationSpec {
        EquationSpec::EnergyCritical { dim: self.dim() }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EquationSpec::Gp4 => Ok(()),
            EquationSpec::Cq3 { gamma } => check_gamma(gamma),
            EquationSpec::EnergyCritical { dim } => Self::energy_critical(dim).map(|_| ()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EquationSpec::Gp4 => "GP4",
            EquationSpec::Cq3 { .. } => "CQ3",
            EquationSpec::EnergyCritical { .. } => "EC",
        }
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param("gamma", format!("must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

/// `|z|² + 2 Re z`, which equals `|1 + z|² - 1` without the cancellation.
#[inline]
pub fn gl_density(z: Complex64) -> f64 {
    z.norm_sqr() + 2.0 * z.re
}

/// Right-hand side `N(z)` of `i∂v + Δv = N(v)`.
pub fn nonlinearity(spec: &EquationSpec, z: Complex64) -> Complex64 {
    match *spec {
        EquationSpec::Gp4 => {
            let m = z.norm_sqr();
            let re = z.re;
            m * z + 2.0 * re * z + m + 2.0 * re
        }
        EquationSpec::Cq3 { gamma } => z.norm_sqr().powi(2) * z + remainder_r(z, gamma),
        EquationSpec::EnergyCritical { dim } => critical_power(dim, z.norm_sqr()) * z,
    }
}

/// `|w|^{4/(n-2)}` expressed through `s = |w|²`.
#[inline]
pub(crate) fn critical_power(dim: usize, s: f64) -> f64 {
    match dim {
        4 => s,
        3 => s * s,
        _ => s.powf(2.0 / (dim as f64 - 2.0)),
    }
}

/// The nine-term deviation of the cubic-quintic right-hand side from the
/// pure quintic, expanded term by term.
pub fn remainder_r(z: Complex64, gamma: f64) -> Complex64 {
    let m = z.norm_sqr();
    let re = z.re;
    let re2 = re * re;
    let terms = [
        Complex64::new(m * m, 0.0),
        4.0 * m * re * z,
        Complex64::new(4.0 * m * re, 0.0),
        gamma * m * z,
        4.0 * re2 * z,
        Complex64::new(gamma * m, 0.0),
        Complex64::new(4.0 * re2, 0.0),
        2.0 * gamma * re * z,
        Complex64::new(2.0 * gamma * re, 0.0),
    ];
    terms.iter().sum()
}

/// Perturbation `e = N(v) - |v|^{4/(n-2)} v` relative to the energy-critical
/// law: `2 Re(v) v + |v|² + 2 Re(v)` for GP, `R(v)` for cubic-quintic.
pub fn perturbation_term(spec: &EquationSpec, z: Complex64) -> Complex64 {
    match *spec {
        EquationSpec::Gp4 => {
            let re = z.re;
            2.0 * re * z + z.norm_sqr() + 2.0 * re
        }
        EquationSpec::Cq3 { gamma } => remainder_r(z, gamma),
        EquationSpec::EnergyCritical { .. } => Complex64::new(0.0, 0.0),
    }
}

/// Coefficients of `i∂u + Δu = α₁u - α₃|u|²u + α₅|u|⁴u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralCqParams {
    pub alpha1: f64,
    pub alpha3: f64,
    pub alpha5: f64,
}

impl GeneralCqParams {
    pub fn new(alpha1: f64, alpha3: f64, alpha5: f64) -> Result<Self> {
        for (name, a) in [("alpha1", alpha1), ("alpha3", alpha3), ("alpha5", alpha5)] {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {a}")));
            }
        }
        let p = Self {
            alpha1,
            alpha3,
            alpha5,
        };
        let discriminant = p.discriminant();
        if discriminant <= 0.0 {
            return Err(Error::NoRealRoots { discriminant });
        }
        Ok(p)
    }

    pub fn discriminant(&self) -> f64 {
        self.alpha3 * self.alpha3 - 4.0 * self.alpha1 * self.alpha5
    }

    /// Right-hand side of the unreduced equation at `z`.
    pub fn nonlinearity(&self, z: Complex64) -> Complex64 {
        let s = z.norm_sqr();
        (self.alpha1 - self.alpha3 * s + self.alpha5 * s * s) * z
    }
}

/// Output of [`reduce_general`].
///
/// With `u(t, x) = amplitude_scale · ũ(time_scale · t, space_scale · x)`,
/// `ũ` solves the reduced model with `r₁² = r1_sq_reduced`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedCq {
    pub r0_sq: f64,
    pub r1_sq: f64,
    pub r1_sq_reduced: f64,
    pub gamma: f64,
    pub amplitude_scale: f64,
    pub time_scale: f64,
    pub space_scale: f64,
}

impl ReducedCq {
    pub fn spec(&self) -> Result<EquationSpec> {
        EquationSpec::cq3(self.gamma)
    }
}

/// Rescale the general cubic-quintic model to `r₀² = 1`, `α₅ = 1`.
pub fn reduce_general(p: &GeneralCqParams) -> Result<ReducedCq> {
    let p = GeneralCqParams::new(p.alpha1, p.alpha3, p.alpha5)?;
    let sqrt_d = p.discriminant().sqrt();
    let r0_sq = (p.alpha3 + sqrt_d) / (2.0 * p.alpha5);
    // Vieta avoids cancellation in the smaller root.
    let r1_sq = p.alpha1 / (p.alpha5 * r0_sq);
    if !(r0_sq > 0.0 && r1_sq > 0.0) {
        return Err(Error::param(
            "alpha",
            format!("roots must be positive, got {r0_sq} and {r1_sq}"),
        ));
    }
    let r1_sq_reduced = r1_sq / r0_sq;
    let time_scale = p.alpha5 * r0_sq * r0_sq;
    Ok(ReducedCq {
        r0_sq,
        r1_sq,
        r1_sq_reduced,
        gamma: 1.0 - r1_sq_reduced,
        amplitude_scale: r0_sq.sqrt(),
        time_scale,
        space_scale: time_scale.sqrt(),
    })
}

/// Rotate the boundary phase `alpha` to 1 and return the excitation
/// `conj(alpha) u - 1`.
pub fn gauge_reduce(u: &ComplexField, alpha: Complex64) -> Result<ComplexField> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::param(
            "alpha",
            format!("must lie on the unit circle, |alpha| = {}", alpha.norm()),
        ));
    }
    let rot = alpha.conj();
    Ok(u.map(|z| rot * z - 1.0))
}
