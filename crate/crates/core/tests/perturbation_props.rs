use gpcq_core::energy::{energy_excitation, h1dot_growth_bound, m_functional};
use gpcq_core::perturbation::compare_runs_full;
use gpcq_core::strichartz::x1_norm;
use gpcq_core::{evolve, uniqueness_probe, Complex64, ComparisonSetup, ComplexField, EquationSpec, Grid, StepConfig};

fn gaussian(grid: Grid, amp: f64, sigma: f64) -> ComplexField {
    ComplexField::from_fn(grid, move |x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        Complex64::new(amp * (-r2 / (sigma * sigma)).exp(), 0.0)
    })
}

#[test]
fn critical_law_against_itself_is_bit_exact() {
    let g = Grid::new(3, 16, 8.0).unwrap();
    let v0 = gaussian(g, 0.5, 1.5);
    let spec = EquationSpec::energy_critical(3).unwrap();
    let cfg = StepConfig::new(0.005, 20, 2).unwrap();
    let a = evolve(&spec, &v0, &cfg).unwrap();
    let b = evolve(&spec, &v0, &cfg).unwrap();
    assert_eq!(a.snapshots(), b.snapshots());
}

#[test]
fn gp_report_invariants() {
    let g = Grid::new(4, 8, 8.0).unwrap();
    let v0 = gaussian(g, 1e-2, 1.0);
    let setup = ComparisonSetup {
        spec: EquationSpec::Gp4,
        v0: v0.clone(),
        w0: v0.clone(),
        config: StepConfig::new(0.005, 20, 2).unwrap(),
        interval: (0.0, 0.1),
    };
    let c = compare_runs_full(&setup).unwrap();
    let r = c.report;
    assert_eq!(r.eprime_value, 0.0);
    assert_eq!(r.eps_free, 0.0);
    assert!(r.e0_value.powi(2) <= 2.0 * energy_excitation(&v0, &EquationSpec::Gp4) * (1.0 + 1e-3));
    assert!(r.w_s1 >= x1_norm(&c.w, (0.0, 0.1)).unwrap());
    assert!(r.diff_s1 >= r.eprime_value);
}

#[test]
fn cq_sup_gradient_respects_gronwall_bound() {
    let g = Grid::new(3, 16, 8.0).unwrap();
    let gamma = 0.5;
    let v0 = gaussian(g, 0.3, 1.5);
    let setup = ComparisonSetup {
        spec: EquationSpec::Cq3 { gamma },
        v0: v0.clone(),
        w0: v0.clone(),
        config: StepConfig::new(0.005, 20, 2).unwrap(),
        interval: (0.0, 0.1),
    };
    let r = compare_runs_full(&setup).unwrap().report;
    let m0 = m_functional(&v0, gamma).unwrap().m_value;
    assert!(r.e0_value <= h1dot_growth_bound(m0, gamma, 0.1).unwrap());
}

#[test]
fn later_window_uses_left_endpoint() {
    let g = Grid::new(3, 8, 8.0).unwrap();
    let v0 = gaussian(g, 0.1, 1.5);
    let setup = ComparisonSetup {
        spec: EquationSpec::Cq3 { gamma: 0.5 },
        v0: v0.clone(),
        w0: v0,
        config: StepConfig::new(0.01, 20, 1).unwrap(),
        interval: (0.1, 0.2),
    };
    let r = compare_runs_full(&setup).unwrap().report;
    // The runs have separated by t0 = 0.1.
    assert!(r.eprime_value > 0.0);
    assert!(r.eps_free > 0.0);
}

#[test]
fn probe_converges_at_second_order() {
    let g = Grid::new(3, 16, 8.0).unwrap();
    let v0 = gaussian(g, 0.5, 1.5);
    let coarse = StepConfig::new(0.02, 10, 10).unwrap();
    let fine = StepConfig::new(0.005, 40, 40).unwrap();
    let r = uniqueness_probe(&EquationSpec::Cq3 { gamma: 0.5 }, &v0, &coarse, &fine).unwrap();
    let p = r.order.unwrap();
    assert!((1.8..=2.2).contains(&p), "{r:?}");
    assert!(r.gaps[1] < r.gaps[0]);
}
