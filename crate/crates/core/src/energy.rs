//! Hamiltonians in Ginzburg-Landau (`u`) and excitation (`v`) form, the
//! modified energy `M = E + C₀∫|Re v|²`, coercivity checks and the
//! time derivative of `∫|Re v|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equations::{check_gamma, gl_density, nonlinearity, EquationSpec};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::spectral::{h1dot_norm_sq, laplacian, lp_norm};

/// Overall constant of the integrated coercivity inequality.
pub const COERCIVITY_K: f64 = 48.0;

/// Relative allowance for rounding when comparing the two sides of a
/// pointwise inequality that can be tight.
const POINTWISE_ROUNDING: f64 = 1e-14;

/// Which Ginzburg-Landau functional to evaluate on `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GlForm {
    Gp,
    Cq { gamma: f64 },
}

impl GlForm {
    pub fn for_spec(spec: &EquationSpec) -> Option<Self> {
        match *spec {
            EquationSpec::Gp4 => Some(GlForm::Gp),
            EquationSpec::Cq3 { gamma } => Some(GlForm::Cq { gamma }),
            EquationSpec::EnergyCritical { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    /// `∫|Re v|²`
    pub re_l2_sq: f64,
    pub m_value: f64,
    pub c0: f64,
}

impl EnergyReport {
    fn new(energy: f64, re_l2_sq: f64, c0: f64) -> Self {
        Self {
            energy,
            re_l2_sq,
            m_value: energy + c0 * re_l2_sq,
            c0,
        }
    }
}

/// Ginzburg-Landau energy of the full field `u`.
pub fn energy_gl(u: &ComplexField, form: GlForm) -> f64 {
    let kinetic = 0.5 * h1dot_norm_sq(u);
    let potential = match form {
        GlForm::Gp => u.integrate(|z| {
            let d = z.norm_sqr() - 1.0;
            0.25 * d * d
        }),
        GlForm::Cq { gamma } => u.integrate(|z| {
            let d = z.norm_sqr() - 1.0;
            0.25 * gamma * d * d + d * d * d / 6.0
        }),
    };
    kinetic + potential
}

/// Hamiltonian in excitation form, written through `q = |v|² + 2 Re v`.
///
/// For the energy-critical law this is `½∫|∇w|² + (n-2)/(2n) ∫|w|^{2n/(n-2)}`.
pub fn energy_excitation(v: &ComplexField, spec: &EquationSpec) -> f64 {
    let kinetic = 0.5 * h1dot_norm_sq(v);
    let potential = match *spec {
        EquationSpec::Gp4 => v.integrate(|z| {
            let q = gl_density(z);
            0.25 * q * q
        }),
        EquationSpec::Cq3 { gamma } => v.integrate(|z| {
            let q = gl_density(z);
            0.25 * gamma * q * q + q * q * q / 6.0
        }),
        EquationSpec::EnergyCritical { dim: 4 } => v.integrate(|z| 0.25 * z.norm_sqr().powi(2)),
        EquationSpec::EnergyCritical { .. } => v.integrate(|z| z.norm_sqr().powi(3) / 6.0),
    };
    kinetic + potential
}

/// `C₀(γ) = 3 + γ/6`.
///
/// With `K = 48`, `48E = 24∫|∇v|² + 12γ∫q² + 8∫q³` and the pointwise bounds
/// `γ|v|⁴ ≤ 2γq² + 8γ|Re v|²`, `|v|⁶ ≤ 8q³ + 144|Re v|²` leave a
/// `|Re v|²` budget of `144 + 8γ = 48 C₀`.
pub fn coercivity_constant(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("gamma", format!("must lie in (0, 1], got {gamma}")));
    }
    Ok(3.0 + gamma / 6.0)
}

/// Rate `C₁(γ)` with `|∂ₜM| ≤ C₁ M` along the cubic-quintic flow.
///
/// `∂ₜM = C₀(I + II)` with `I = -2∫Re v Im Δv`, `|I| ≤ ∫|∇v|²`, and the
/// five pieces of `II` bounded pointwise (`x = Re v`, `ρ = |v|`) by
///
/// ```text
/// 2|x|ρ⁴|y|      ≤ ρ⁶
/// 8x²ρ²|y|       ≤ 2x² + 6ρ⁶            (Young, exponents 4 and 4/3)
/// 2γ|x|ρ²|y|     ≤ γx² + γρ⁶
/// 8|x|³|y|       ≤ 4x² + 4ρ⁶
/// 4γx²|y|        ≤ 2γx² + (γ/2)ρ⁴
/// ```
///
/// so `|I + II| ≤ (11+γ)(∫|∇v|² + ∫ρ⁶ + γ∫ρ⁴) + (6+3γ)∫x²`. The first
/// bracket is at most `48M` by the coercivity inequality. Dropping the
/// nonnegative `q²` term instead of using the `γ|v|⁴` bound gives
/// `48M ≥ 24∫|∇v|² + ∫ρ⁶ + 8γ∫x²`, hence `∫x² ≤ 6M/γ`. Altogether
/// `C₁ = C₀ (546 + 48γ + 36/γ)`.
pub fn gronwall_rate(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let c0 = coercivity_constant(gamma)?;
    Ok(c0 * (546.0 + 48.0 * gamma + 36.0 / gamma))
}

/// Upper bound for `sup_{t ≤ τ} ‖v(t)‖_{Ḣ¹}` from `∫|∇v|² ≤ 2M` and
/// `M(t) ≤ M(0) e^{C₁ t}`.
pub fn h1dot_growth_bound(m0: f64, gamma: f64, tau: f64) -> Result<f64> {
    let c1 = gronwall_rate(gamma)?;
    Ok((2.0 * m0.max(0.0) * (c1 * tau).exp()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCoercivity {
    /// `γ|v|⁴ ≤ 2γq² + 8γ|Re v|²`
    pub quartic_holds: bool,
    /// `|v|⁶ ≤ 8q³ + 144|Re v|²`
    pub sextic_holds: bool,
    pub quartic_slack: f64,
    pub sextic_slack: f64,
}

pub fn coercivity_pointwise(z: Complex64, gamma: f64) -> PointwiseCoercivity {
    let q = gl_density(z);
    let m = z.norm_sqr();
    let re2 = z.re * z.re;
    let lhs4 = gamma * m * m;
    let rhs4 = 2.0 * gamma * q * q + 8.0 * gamma * re2;
    let lhs6 = m * m * m;
    let rhs6 = 8.0 * q * q * q + 144.0 * re2;
    let holds = |lhs: f64, rhs: f64| {
        lhs <= rhs + POINTWISE_ROUNDING * lhs.abs().max(rhs.abs())
    };
    PointwiseCoercivity {
        quartic_holds: holds(lhs4, rhs4),
        sextic_holds: holds(lhs6, rhs6),
        quartic_slack: rhs4 - lhs4,
        sextic_slack: rhs6 - lhs6,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedCoercivity {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `∫|∇v|² + ∫|v|⁶ + γ∫|v|⁴ ≤ 48 (E(v) + C₀ ∫|Re v|²)`.
pub fn coercivity_integrated(v: &ComplexField, gamma: f64) -> Result<IntegratedCoercivity> {
    check_gamma(gamma)?;
    let l6 = lp_norm(v, 6.0)?;
    let l4 = lp_norm(v, 4.0)?;
    let lhs = h1dot_norm_sq(v) + l6.powi(6) + gamma * l4.powi(4);
    let report = m_functional(v, gamma)?;
    let rhs = COERCIVITY_K * report.m_value;
    Ok(IntegratedCoercivity {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * rhs.abs(),
    })
}

pub fn re_l2_sq(v: &ComplexField) -> f64 {
    v.integrate(|z| z.re * z.re)
}

/// Modified energy of the cubic-quintic excitation.
pub fn m_functional(v: &ComplexField, gamma: f64) -> Result<EnergyReport> {
    check_gamma(gamma)?;
    let c0 = coercivity_constant(gamma)?;
    let spec = EquationSpec::Cq3 { gamma };
    Ok(EnergyReport::new(energy_excitation(v, &spec), re_l2_sq(v), c0))
}

/// Energy report for any law. Only the cubic-quintic model carries a
/// nonzero `C₀`; elsewhere `M = E`.
pub fn energy_report(v: &ComplexField, spec: &EquationSpec) -> EnergyReport {
    match *spec {
        EquationSpec::Cq3 { gamma } => {
            m_functional(v, gamma).expect("validated cubic-quintic parameter")
        }
        _ => EnergyReport::new(energy_excitation(v, spec), re_l2_sq(v), 0.0),
    }
}

/// `∂ₜ∫|Re v|² = -2∫Re v Im Δv + 2∫Re v Im N(v)` along the flow of `spec`.
pub fn mass_identity_rhs(v: &ComplexField, spec: &EquationSpec) -> f64 {
    let lap = laplacian(v);
    let grid = v.grid();
    let dispersive = -2.0
        * grid.cell_volume()
        * crate::field::chunked_sum_indexed(grid.len(), |i| v.values()[i].re * lap.values()[i].im);
    let spec = *spec;
    let nonlinear = 2.0 * v.integrate(move |z| z.re * nonlinearity(&spec, z).im);
    dispersive + nonlinear
}

/// Energy-space norm `‖Re v‖_{H¹} + ‖Im v‖_{Ḣ¹}`, plus `‖v‖_{L⁴}` for the
/// cubic-quintic space.
pub fn energy_space_norm(v: &ComplexField, spec: &EquationSpec) -> Result<f64> {
    let re = v.map(|z| Complex64::new(z.re, 0.0));
    let im = v.map(|z| Complex64::new(z.im, 0.0));
    let re_h1 = (lp_norm(&re, 2.0)?.powi(2) + h1dot_norm_sq(&re)).sqrt();
    let im_h1dot = h1dot_norm_sq(&im).sqrt();
    let l4 = match spec {
        EquationSpec::Cq3 { .. } => lp_norm(v, 4.0)?,
        EquationSpec::Gp4 => 0.0,
        EquationSpec::EnergyCritical { .. } => {
            return Err(Error::param("spec", "energy-space norm is defined for GP4 and CQ3"))
        }
    };
    Ok(re_h1 + im_h1dot + l4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid3() -> Grid {
        Grid::new(3, 8, 2.0).unwrap()
    }

    #[test]
    fn ground_state_and_vacuum_energies() {
        let g = grid3();
        let v = g.volume();
        let one = ComplexField::constant(g, c(1.0, 0.0));
        assert_eq!(energy_gl(&one, GlForm::Gp), 0.0);
        let zero = ComplexField::zeros(g);
        assert!((energy_gl(&zero, GlForm::Gp) - v / 4.0).abs() < 1e-14 * v);
        let gamma = 0.4;
        let want = v * (gamma / 4.0 - 1.0 / 6.0);
        assert!((energy_gl(&zero, GlForm::Cq { gamma }) - want).abs() < 1e-14 * v);
    }

    #[test]
    fn imaginary_constant_gp_energy() {
        let g = Grid::new(4, 8, 2.0).unwrap();
        let s = 0.7;
        let f = ComplexField::constant(g, c(0.0, s));
        let want = g.volume() * s.powi(4) / 4.0;
        let got = energy_excitation(&f, &EquationSpec::Gp4);
        assert!((got - want).abs() < 1e-13 * want);
    }

    #[test]
    fn coercivity_constants() {
        assert!((coercivity_constant(0.5).unwrap() - (3.0 + 1.0 / 12.0)).abs() < 1e-15);
        assert!((coercivity_constant(1.0).unwrap() - 19.0 / 6.0).abs() < 1e-15);
        assert!((coercivity_constant(1e-12).unwrap() - 3.0).abs() < 1e-12);
        assert!(coercivity_constant(0.0).is_err());
        assert!(coercivity_constant(1.5).is_err());
    }

    #[test]
    fn pointwise_examples() {
        let y: f64 = 1.3;
        let p = coercivity_pointwise(c(0.0, y), 0.5);
        assert!(p.sextic_holds && p.quartic_holds);
        assert!((p.sextic_slack - 7.0 * y.powi(6)).abs() < 1e-12 * y.powi(6));

        let p = coercivity_pointwise(c(-2.0, 0.0), 0.5);
        assert!(p.sextic_holds);
        assert_eq!(p.sextic_slack, 512.0);
    }

    #[test]
    fn constant_imaginary_integrated_coercivity() {
        let g = grid3();
        let v = g.volume();
        let (y, gamma): (f64, f64) = (0.8, 0.3);
        let f = ComplexField::constant(g, c(0.0, y));
        let r = coercivity_integrated(&f, gamma).unwrap();
        let lhs = (y.powi(6) + gamma * y.powi(4)) * v;
        let rhs = 48.0 * (gamma / 4.0 * y.powi(4) + y.powi(6) / 6.0) * v;
        assert!((r.lhs - lhs).abs() < 1e-13 * lhs);
        assert!((r.rhs - rhs).abs() < 1e-13 * rhs);
        assert!(r.holds);

        let zero = coercivity_integrated(&ComplexField::zeros(g), gamma).unwrap();
        assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));
        assert!(zero.holds);
    }

    #[test]
    fn m_functional_on_real_constant() {
        let g = grid3();
        let v = g.volume();
        let (x, gamma): (f64, f64) = (-0.6, 0.45);
        let f = ComplexField::constant(g, c(x, 0.0));
        let r = m_functional(&f, gamma).unwrap();
        let q = x * x + 2.0 * x;
        let e = (gamma / 4.0 * q * q + q * q * q / 6.0) * v;
        assert!((r.energy - e).abs() < 1e-13 * e.abs());
        assert!((r.re_l2_sq - x * x * v).abs() < 1e-13 * x * x * v);
        assert_eq!(r.m_value, r.energy + r.c0 * r.re_l2_sq);

        let z = m_functional(&ComplexField::zeros(g), gamma).unwrap();
        assert_eq!((z.energy, z.re_l2_sq, z.m_value), (0.0, 0.0, 0.0));
        assert!(z.c0 > 0.0);
    }

    #[test]
    fn mass_rhs_vanishes_on_real_fields() {
        let g = grid3();
        let f = ComplexField::from_fn(g, |x| c((-(x[0] * x[0] + x[1] * x[1])).exp() - 0.3 * x[2].cos(), 0.0));
        for spec in [EquationSpec::Cq3 { gamma: 0.5 }, EquationSpec::Gp4] {
            // Only transform rounding survives in the dispersive term.
            assert!(mass_identity_rhs(&f, &spec).abs() < 1e-14 * g.volume());
        }
    }

    #[test]
    fn mass_rhs_on_constant_matches_closed_form() {
        let g = grid3();
        let gamma = 0.5;
        let z = c(1.0, 1.0);
        let f = ComplexField::constant(g, z);
        let spec = EquationSpec::Cq3 { gamma };
        let n = z.norm_sqr().powi(2) * z + crate::equations::remainder_r(z, gamma);
        let want = 2.0 * g.volume() * z.re * n.im;
        let got = mass_identity_rhs(&f, &spec);
        assert!((got - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn energy_space_norm_of_imaginary_constant() {
        let g = grid3();
        let s: f64 = -0.9;
        let f = ComplexField::constant(g, c(0.0, s));
        let cq = energy_space_norm(&f, &EquationSpec::Cq3 { gamma: 0.5 }).unwrap();
        let want = s.abs() * g.volume().powf(0.25);
        assert!((cq - want).abs() < 1e-13 * want);
        assert!(energy_space_norm(&f, &EquationSpec::Gp4).unwrap() < 1e-13);
        assert_eq!(energy_space_norm(&ComplexField::zeros(g), &EquationSpec::Gp4).unwrap(), 0.0);
    }

    #[test]
    fn gronwall_rate_is_positive_and_finite() {
        for &g in &[0.01, 0.5, 0.99] {
            let c1 = gronwall_rate(g).unwrap();
            assert!(c1.is_finite() && c1 > 0.0);
        }
        assert!(gronwall_rate(1.0).is_err());
    }
}
