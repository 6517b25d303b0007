//! Sampling suites behind `gpcq verify`.

use gpcq_core::energy::coercivity_pointwise;
use gpcq_core::equations::{gl_density, nonlinearity};
use gpcq_core::strichartz::{is_admissible, pairs_n3, pairs_n4, Exponent, Rational64};
use gpcq_core::{Complex64, EquationSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Relative tolerance of the pointwise identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Coercivity,
    Strichartz,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest normalized margin seen; negative means violated.
    pub worst_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub samples: u64,
    pub seed: u64,
    pub violations: u64,
    pub worst_slack: f64,
    pub checks: Vec<CheckResult>,
}

struct Tally {
    name: &'static str,
    samples: u64,
    violations: u64,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            violations: 0,
            worst: f64::INFINITY,
        }
    }

    fn record(&mut self, ok: bool, slack: f64) {
        self.samples += 1;
        if !ok {
            self.violations += 1;
        }
        self.worst = self.worst.min(slack);
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            samples: self.samples,
            violations: self.violations,
            worst_slack: if self.samples == 0 { 0.0 } else { self.worst },
        }
    }
}

pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        Suite::Identities => identities(&mut rng, samples),
        Suite::Coercivity => coercivity(&mut rng, samples),
        Suite::Strichartz => strichartz(&mut rng, samples),
    };
    VerifyReport {
        suite,
        samples,
        seed,
        violations: checks.iter().map(|c| c.violations).sum(),
        worst_slack: checks.iter().map(|c| c.worst_slack).fold(f64::INFINITY, f64::min),
        checks,
    }
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let g: f64 = rng.random();
        if g > 0.0 {
            return g;
        }
    }
}

/// Log-uniform radius in `[10^lo, 10^hi]`, uniform angle.
fn log_polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = 10f64.powf(rng.random_range(lo..=hi));
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Relative error of `lhs - rhs` against `scale`, the sum of the term
/// magnitudes of the expanded side: the size of its rounding error.
fn identity_margin(lhs: Complex64, rhs: Complex64, scale: f64) -> (bool, f64) {
    let err = (lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE);
    (err <= IDENTITY_TOL, (IDENTITY_TOL - err) / IDENTITY_TOL)
}

/// `|z|⁴z + R(z) = q (q + γ)(1 + z)` and `N_GP(z) = q (1 + z)`,
/// `q = |1 + z|² - 1`, for `|z| ≤ 100`.
fn identities(rng: &mut ChaCha8Rng, samples: u64) -> Vec<CheckResult> {
    let mut cq = Tally::new("cubic_quintic_remainder");
    let mut gp = Tally::new("gp_expansion");
    for _ in 0..samples {
        let z = log_polar(rng, -3.0, 2.0);
        let gamma = open_unit(rng);
        let m = z.norm_sqr();
        let a = z.norm();
        let r = z.re.abs();
        let q = gl_density(z);
        let u = 1.0 + z;

        let lhs = nonlinearity(&EquationSpec::Cq3 { gamma }, z);
        let rhs = q * (q + gamma) * u;
        let terms = m * m * a
            + m * m
            + 4.0 * m * r * a
            + 4.0 * m * r
            + gamma * m * a
            + 4.0 * r * r * a
            + gamma * m
            + 4.0 * r * r
            + 2.0 * gamma * r * a
            + 2.0 * gamma * r;
        let factored = (m + 2.0 * r) * (m + 2.0 * r + gamma) * (1.0 + a);
        let (ok, slack) = identity_margin(lhs, rhs, terms.max(factored));
        cq.record(ok, slack);

        let lhs = nonlinearity(&EquationSpec::Gp4, z);
        let rhs = q * u;
        let terms = m * a + 2.0 * r * a + m + 2.0 * r;
        let (ok, slack) = identity_margin(lhs, rhs, terms.max((m + 2.0 * r) * (1.0 + a)));
        gp.record(ok, slack);
    }
    vec![cq.finish(), gp.finish()]
}

/// Quartic and sextic pointwise bounds with `|z| ≤ 10³`, `γ ∈ (0, 1)`.
/// One sample in five lies on the circle `|z + 2| = 2` where the quartic
/// bound is an equality.
fn coercivity(rng: &mut ChaCha8Rng, samples: u64) -> Vec<CheckResult> {
    let mut quartic = Tally::new("quartic");
    let mut sextic = Tally::new("sextic");
    for i in 0..samples {
        let z = if i % 5 == 4 {
            Complex64::new(-2.0, 0.0) + Complex64::from_polar(2.0, rng.random_range(0.0..std::f64::consts::TAU))
        } else {
            log_polar(rng, -4.0, 3.0)
        };
        let gamma = loop {
            let g = open_unit(rng);
            if g < 1.0 {
                break g;
            }
        };
        let p = coercivity_pointwise(z, gamma);
        let m = z.norm_sqr();
        let norm4 = (gamma * m * m).max(f64::MIN_POSITIVE);
        let norm6 = (m * m * m).max(f64::MIN_POSITIVE);
        quartic.record(p.quartic_holds, p.quartic_slack / norm4);
        sextic.record(p.sextic_holds, p.sextic_slack / norm6);
    }
    vec![quartic.finish(), sextic.finish()]
}

fn strichartz(rng: &mut ChaCha8Rng, samples: u64) -> Vec<CheckResult> {
    let mut listed = Tally::new("listed_pairs");
    let mut perturbed = Tally::new("perturbed_listed_pairs");
    let bump = Rational64::new(1, 100);
    for (n, pairs) in [(4usize, pairs_n4()), (3, pairs_n3())] {
        for p in pairs {
            listed.record(is_admissible(p.q, p.r, n), 1.0);
            if let Exponent::Finite(q) = p.q {
                for shifted in [q + bump, q - bump] {
                    let fails = !is_admissible(Exponent::Finite(shifted), p.r, n);
                    perturbed.record(fails, if fails { 1.0 } else { -1.0 });
                }
            }
        }
    }
    let mut excluded = Tally::new("endpoint_excluded");
    let fails = !is_admissible(Exponent::int(2), Exponent::Infinite, 2);
    excluded.record(fails, if fails { 1.0 } else { -1.0 });

    // Random exact pairs on the admissible line and their perturbations.
    let mut random = Tally::new("random_pairs");
    for _ in 0..samples {
        let n: i64 = if rng.random::<bool>() { 4 } else { 3 };
        let b: i64 = rng.random_range(1..=60);
        let a: i64 = rng.random_range(0..=b / 2);
        let q = if a == 0 { Exponent::Infinite } else { Exponent::ratio(b, a) };
        let r = Exponent::ratio(2 * n * b, n * b - 4 * a);
        let mut ok = is_admissible(q, r, n as usize);
        if a != 0 {
            ok &= !is_admissible(Exponent::ratio(100 * b + a, 100 * a), r, n as usize);
            ok &= !is_admissible(Exponent::ratio(100 * b - a, 100 * a), r, n as usize);
        }
        random.record(ok, if ok { 1.0 } else { -1.0 });
    }
    vec![listed.finish(), perturbed.finish(), excluded.finish(), random.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_samples() {
        for suite in [Suite::Identities, Suite::Coercivity, Suite::Strichartz] {
            let r = run_suite(suite, 2000, 3);
            assert_eq!(r.violations, 0, "{r:?}");
        }
    }

    #[test]
    fn tight_curve_has_near_zero_quartic_slack() {
        let r = run_suite(Suite::Coercivity, 1000, 1);
        assert!(r.checks[0].worst_slack.abs() < 1e-12, "{r:?}");
    }
}
