use num_complex::Complex64;

use ermakov::oracle::{integrate_ermakov, integrate_mean, integrate_riccati, IntegratorConfig};
use ermakov::phase_space::{
    default_dt, fokker_planck_convergence, marginal_convergence, DriftConvention, Marginal, PhaseSpaceGrid,
};
use ermakov::{Branch, Error, InitialState, Representation, RiccatiValue, Scenario, SystemParams};

fn params(gamma: f64, omega0: f64) -> SystemParams {
    SystemParams::new(1.0, 1.0, gamma, omega0).unwrap()
}

/// Underdamped mean with η(0) = 1, η̇(0) = 0.
fn damped_exact(gamma: f64, omega0: f64, t: f64) -> f64 {
    let om = (omega0 * omega0 - 0.25 * gamma * gamma).sqrt();
    (-0.5 * gamma * t).exp() * ((om * t).cos() + 0.5 * gamma / om * (om * t).sin())
}

#[test]
fn adaptive_mean_matches_analytic_solution() {
    let cfg = IntegratorConfig::new(0.0, 20.0).unwrap();
    let times = cfg.uniform_times(100);
    let s = integrate_mean(&params(0.3, 2.0), 1.0, 0.0, &cfg, &times).unwrap();
    for (t, &(x, _)) in s.iter() {
        assert!((x - damped_exact(0.3, 2.0, t)).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn fixed_step_rk4_is_fourth_order() {
    let err = |h: f64| {
        let cfg = IntegratorConfig::new(0.0, 5.0).unwrap().fixed_step(h).unwrap();
        let s = integrate_mean(&params(0.5, 1.5), 1.0, 0.0, &cfg, &[5.0]).unwrap();
        (s.y[0].0 - damped_exact(0.5, 1.5, 5.0)).abs()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn free_width_spreads_hyperbolically() {
    // α̈ = 1/α³ with α(0) = 1, α̇(0) = 0 gives α = √(1 + t²)
    let cfg = IntegratorConfig::new(0.0, 10.0).unwrap();
    let times = cfg.uniform_times(50);
    let s = integrate_ermakov(&params(0.0, 0.0), 1.0, 0.0, &cfg, &times).unwrap();
    for (t, w) in s.iter() {
        assert!((w.alpha - (1.0 + t * t).sqrt()).abs() < 1e-8);
        assert!((w.alphadot - t / (1.0 + t * t).sqrt()).abs() < 1e-8);
    }
}

#[test]
fn free_riccati_matches_mobius_solution() {
    // Ċ = −C² gives C = C₀/(1 + C₀t)
    let c0 = Complex64::new(0.3, 1.0);
    let cfg = IntegratorConfig::new(0.0, 8.0).unwrap();
    let times = cfg.uniform_times(40);
    let s = integrate_riccati(&params(0.0, 0.0), RiccatiValue::nl(c0), Representation::NL, &cfg, &times).unwrap();
    for (t, c) in s.iter() {
        let want = c0 / (1.0 + c0 * t);
        assert!((c.value - want).norm() < 1e-9, "t = {t}");
    }
}

#[test]
fn real_riccati_blow_up_is_reported() {
    let cfg = IntegratorConfig::new(0.0, 3.0).unwrap();
    let r = integrate_riccati(&params(0.0, 0.0), RiccatiValue::new(-1.0, 0.0, Representation::NL), Representation::NL, &cfg, &[3.0]);
    assert!(matches!(r, Err(Error::BlowUp { t, .. }) | Err(Error::StepSizeUnderflow { t }) if t < 1.0 + 1e-3), "{r:?}");
}

#[test]
fn tolerances_out_of_range_are_rejected() {
    let cfg = IntegratorConfig::new(0.0, 1.0).unwrap();
    assert!(matches!(cfg.with_tolerances(1e-16, 1e-10), Err(Error::InvalidParameter { name: "rel_tol", .. })));
    assert!(matches!(cfg.with_tolerances(1e-10, 0.5), Err(Error::InvalidParameter { name: "abs_tol", .. })));
    assert!(IntegratorConfig::new(1.0, 1.0).is_err());
}

fn oscillator(gamma: f64, omega0: f64) -> Scenario {
    Scenario::new(params(gamma, omega0), InitialState::new(1.0, 0.5, 1.0, 0.3, Branch::Plus)).unwrap()
}

#[test]
fn local_force_drift_converges_and_mean_force_does_not() {
    let sc = oscillator(1.0, 1.0);
    let g = PhaseSpaceGrid::auto(&sc, 1.0, 65).unwrap();
    let local = fokker_planck_convergence(&sc, 1.0, &g, default_dt(&sc), 2, DriftConvention::LocalForce).unwrap();
    assert!(local.ratios.iter().all(|r| (r - 4.0).abs() < 0.4), "{local:?}");
    let mean = fokker_planck_convergence(&sc, 1.0, &g, default_dt(&sc), 2, DriftConvention::MeanForce);
    assert!(matches!(mean, Err(Error::NonConvergentResidual { .. })), "{mean:?}");
}

#[test]
fn drift_conventions_coincide_for_free_motion() {
    let sc = oscillator(1.0, 0.0);
    let g = PhaseSpaceGrid::auto(&sc, 1.0, 65).unwrap();
    let a = fokker_planck_convergence(&sc, 1.0, &g, default_dt(&sc), 1, DriftConvention::LocalForce).unwrap();
    let b = fokker_planck_convergence(&sc, 1.0, &g, default_dt(&sc), 1, DriftConvention::MeanForce).unwrap();
    assert_eq!(a.norms, b.norms);
}

#[test]
fn marginal_transport_residuals_converge() {
    for sc in [oscillator(1.0, 1.0), oscillator(1.0, 0.0), oscillator(4.0, 1.0)] {
        for which in [Marginal::Position, Marginal::Momentum] {
            let c = marginal_convergence(&sc, 0.7, which, 257, default_dt(&sc), 2).unwrap();
            assert!(c.ratios.iter().all(|r| (r - 4.0).abs() < 0.4), "{which:?}: {c:?}");
        }
    }
}
