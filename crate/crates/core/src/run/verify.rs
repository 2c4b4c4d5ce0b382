//! Cross-validation and invariant checks over every preset.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::{Branch, Representation, RiccatiValue, Scenario};
use crate::observables::{ermakov_invariant, moments, quantum_energy, energy_gap};
use crate::oracle::{
    integrate_ermakov, integrate_mean, integrate_moments, integrate_riccati, integrate_sigma_third_order, sigma_jet,
    IntegratorConfig,
};
use crate::phase_space::{
    default_dt, fill_wigner, fokker_planck_convergence, resolving_points, wigner_exponents, DriftConvention,
    PhaseSpaceGrid,
};
use crate::run::config::{preset_names, RunConfig};
use crate::run::scan::branch_energies;
use crate::trajectories::mean_position;
use crate::width::{
    complex_trajectory, ermakov_alpha, initial_riccati, riccati_bernoulli, riccati_closed_form, transform_representation,
};

pub const PRODUCT_GATE: f64 = 1e-10;
pub const INVARIANT_DRIFT_GATE: f64 = 1e-8;
pub const INVARIANT_FORMS_GATE: f64 = 1e-9;
pub const ORACLE_GATE: f64 = 1e-8;
/// Integrator tolerance used for the cross-checks.
pub const ORACLE_TOL: f64 = 1e-12;
pub const CONSERVATION_GATE: f64 = 1e-9;
pub const WIGNER_MASS_GATE: f64 = 1e-8;
pub const EXPONENT_GATE: f64 = 1e-10;
/// Allowed deviation of the refinement ratio from 4.
pub const REFINEMENT_GATE: f64 = 0.4;
pub const MAX_LISTED_FAILURES: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[default]
    All,
    Fast,
}

impl Suite {
    fn samples(self) -> usize {
        match self {
            Suite::All => 1000,
            Suite::Fast => 100,
        }
    }

    fn oracle_samples(self) -> usize {
        match self {
            Suite::All => 200,
            Suite::Fast => 20,
        }
    }
}

/// Deliberate defects used to show the suite catches them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Correlation taken from the opposite sign branch.
    FlipSigmaXp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub gate: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, gate: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            gate,
            passed: residual <= gate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub max_product_deviation: f64,
    pub max_invariant_drift: f64,
    pub max_oracle_mismatch: f64,
    pub checks: Vec<Check>,
    pub failures: Vec<Check>,
}

/// `|a − b| / max(|b|, 1)`, maximised over components.
pub fn mismatch(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
}

/// [`mismatch`] for a complex value, measured with the modulus so that a real
/// part crossing zero next to a large imaginary part is not over-weighted.
pub fn mismatch_complex(a: &RiccatiValue, b: &RiccatiValue) -> f64 {
    (a.value - b.value).norm() / b.value.norm().max(1.0)
}

fn tag(sc: &Scenario, preset: &str) -> String {
    format!("{preset}/{}/{}", sc.init().label.as_deref().unwrap_or("run"), sc.branch().as_str())
}

/// Both sign branches of every initial state in every preset, with the window.
pub fn preset_scenarios() -> Vec<(String, Scenario, f64, f64)> {
    let mut out = Vec::new();
    for name in preset_names() {
        let cfg = RunConfig::preset(name).expect("shipped presets are valid");
        for sc in cfg.scenarios().expect("shipped presets are valid") {
            let branches: &[Branch] = if sc.init().alphadot0_abs == 0.0 {
                &[Branch::Plus]
            } else {
                &[Branch::Plus, Branch::Minus]
            };
            for &b in branches {
                let s = sc.with_branch(b);
                // skip the duplicate produced when a preset already lists both branches
                let key = tag(&s, name);
                if !out.iter().any(|(k, _, _, _): &(String, Scenario, f64, f64)| *k == key) {
                    out.push((key, s, 0.0, cfg.time.t1 - cfg.time.t0));
                }
            }
        }
    }
    out
}

fn uniform(t1: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t1 * k as f64 / n as f64).collect()
}

pub fn product_deviation(sc: &Scenario, t1: f64, n: usize, mutation: Option<Mutation>) -> f64 {
    let flipped = sc.with_branch(sc.branch().flipped());
    let quarter = 0.25 * sc.params().hbar * sc.params().hbar;
    uniform(t1, n)
        .into_iter()
        .map(|t| {
            let mut m = moments(sc, t);
            if mutation == Some(Mutation::FlipSigmaXp) {
                m.sigma_xp = moments(&flipped, t).sigma_xp;
            }
            (m.determinant() - quarter).abs()
        })
        .fold(0.0, f64::max)
}

/// `(max relative drift, max relative disagreement of the two forms)`.
pub fn invariant_drift(sc: &Scenario, t1: f64, n: usize) -> (f64, f64) {
    let i0 = ermakov_invariant(sc, 0.0).i_expanding;
    let mut drift = 0.0f64;
    let mut forms = 0.0f64;
    for t in uniform(t1, n) {
        let r = ermakov_invariant(sc, t);
        if i0 > 0.0 {
            drift = drift.max((r.i_expanding - i0).abs() / i0).max((r.i_moment - i0).abs() / i0);
            forms = forms.max(r.relative_difference());
        } else {
            drift = drift.max(r.i_expanding.abs()).max(r.i_moment.abs());
        }
    }
    (drift, forms)
}

/// Largest closed-form vs oracle mismatch per integrated system.
pub fn oracle_mismatches(sc: &Scenario, t1: f64, n: usize) -> Result<Vec<(&'static str, f64)>> {
    let p = sc.params();
    let init = sc.init();
    let cfg = IntegratorConfig::new(0.0, t1)?.with_tolerances(ORACLE_TOL, ORACLE_TOL)?;
    let times = uniform(t1, n);
    let mut out = Vec::new();

    let mean = integrate_mean(p, init.eta0, init.etadot0, &cfg, &times)?;
    let worst = mean
        .iter()
        .map(|(t, &(x, v))| {
            let (a, b) = mean_position(sc, t);
            mismatch(&[a, b], &[x, v])
        })
        .fold(0.0, f64::max);
    out.push(("mean", worst));

    let width = integrate_ermakov(p, init.alpha0, init.alphadot0(), &cfg, &times)?;
    let worst = width
        .iter()
        .map(|(t, w)| {
            let c = ermakov_alpha(sc, t);
            mismatch(&[c.alpha, c.alphadot], &[w.alpha, w.alphadot])
        })
        .fold(0.0, f64::max);
    out.push(("ermakov", worst));

    let c0 = initial_riccati(sc);
    let nl = integrate_riccati(p, c0, Representation::NL, &cfg, &times)?;
    let worst = nl
        .iter()
        .map(|(t, c)| {
            mismatch_complex(&riccati_closed_form(sc, t), c)
        })
        .fold(0.0, f64::max);
    out.push(("riccati_nl", worst));

    let ck = integrate_riccati(p, c0, Representation::CK, &cfg, &times)?;
    let worst = ck
        .iter()
        .map(|(t, c)| {
            let d = transform_representation(&riccati_closed_form(sc, t), Representation::CK, t, p);
            mismatch_complex(&d, c)
        })
        .fold(0.0, f64::max);
    out.push(("riccati_ck", worst));

    let m0 = moments(sc, 0.0);
    let mo = integrate_moments(p, m0, &cfg, &times)?;
    let worst = mo
        .iter()
        .map(|(t, m)| {
            let c = moments(sc, t);
            mismatch(&[c.sigma_x2, c.sigma_p2, c.sigma_xp], &[m.sigma_x2, m.sigma_p2, m.sigma_xp])
        })
        .fold(0.0, f64::max);
    out.push(("moments", worst));

    let third = integrate_sigma_third_order(p, sigma_jet(p, &m0), &cfg, &times)?;
    let worst = third.iter().map(|(t, s)| mismatch(&[moments(sc, t).sigma_x2], &[*s])).fold(0.0, f64::max);
    out.push(("sigma_third_order", worst));

    let worst = times
        .iter()
        .flat_map(|&t| {
            [Branch::Plus, Branch::Minus].map(|which| {
                mismatch_complex(&riccati_bernoulli(sc, which, t), &riccati_closed_form(sc, t))
            })
        })
        .fold(0.0, f64::max);
    out.push(("bernoulli", worst));
    Ok(out)
}

/// `max |λ̇_Iλ_R − λ̇_Rλ_I − 1|`; `None` when the invariant vanishes.
pub fn conservation_deviation(sc: &Scenario, t1: f64, n: usize) -> Option<f64> {
    if ermakov_invariant(sc, 0.0).i_expanding <= 0.0 {
        return None;
    }
    let worst = uniform(t1, n)
        .into_iter()
        .map(|t| (complex_trajectory(sc, t).expect("nonzero invariant").conservation() - 1.0).abs())
        .fold(0.0, f64::max);
    Some(worst)
}

/// `(|mass − 1|, max exponent-form disagreement, |peak·πħ − 1|)` on an auto grid
/// with at least `n` points per axis.
pub fn wigner_checks(sc: &Scenario, t: f64, n: usize) -> Result<(f64, f64, f64)> {
    let mut g = PhaseSpaceGrid::auto(sc, t, resolving_points(sc, t, n))?;
    fill_wigner(sc, t, &mut g);
    let mass = (g.mass() - 1.0).abs();
    let mut forms = 0.0f64;
    for i in (0..g.nx).step_by(8) {
        for j in (0..g.np).step_by(8) {
            let e = wigner_exponents(sc, t, g.x(i), g.p(j));
            forms = forms.max((e.moment - e.invariant).abs() / e.moment.abs().max(1.0));
        }
    }
    let (eta, v) = mean_position(sc, t);
    let peak = crate::phase_space::wigner(sc, t, eta, sc.params().mass * v) * std::f64::consts::PI * sc.params().hbar;
    Ok((mass, forms, (peak - 1.0).abs()))
}

/// Worst deviation of the Fokker–Planck refinement ratios from 4.
pub fn fokker_planck_ratio_deviation(sc: &Scenario, t: f64) -> Result<f64> {
    let g = PhaseSpaceGrid::auto(sc, t, resolving_points(sc, t, 33))?;
    let c = fokker_planck_convergence(sc, t, &g, default_dt(sc), 2, DriftConvention::LocalForce)?;
    Ok(c.ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max))
}

fn scenario_checks(name: &str, sc: &Scenario, t1: f64, suite: Suite, mutation: Option<Mutation>) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(Check::new(format!("{name}: product"), product_deviation(sc, t1, suite.samples(), mutation), PRODUCT_GATE));
    let (drift, forms) = invariant_drift(sc, t1, suite.samples());
    checks.push(Check::new(format!("{name}: invariant drift"), drift, INVARIANT_DRIFT_GATE));
    checks.push(Check::new(format!("{name}: invariant forms"), forms, INVARIANT_FORMS_GATE));
    match oracle_mismatches(sc, t1, suite.oracle_samples()) {
        Ok(list) => {
            for (what, v) in list {
                checks.push(Check::new(format!("{name}: oracle {what}"), v, ORACLE_GATE));
            }
        }
        Err(e) => checks.push(Check {
            name: format!("{name}: oracle ({e})"),
            residual: f64::INFINITY,
            gate: ORACLE_GATE,
            passed: false,
        }),
    }
    if let Some(c) = conservation_deviation(sc, t1, suite.samples()) {
        checks.push(Check::new(format!("{name}: conservation law"), c, CONSERVATION_GATE));
    }
    if suite == Suite::All {
        let t = 0.5 * t1;
        match wigner_checks(sc, t, 129) {
            Ok((mass, forms, peak)) => {
                checks.push(Check::new(format!("{name}: wigner mass"), mass, WIGNER_MASS_GATE));
                checks.push(Check::new(format!("{name}: wigner exponent forms"), forms, EXPONENT_GATE));
                checks.push(Check::new(format!("{name}: wigner peak"), peak, 1e-12));
            }
            Err(e) => checks.push(Check {
                name: format!("{name}: wigner ({e})"),
                residual: f64::INFINITY,
                gate: WIGNER_MASS_GATE,
                passed: false,
            }),
        }
        let r = fokker_planck_ratio_deviation(sc, t).unwrap_or(f64::INFINITY);
        checks.push(Check::new(format!("{name}: fokker-planck refinement"), r, REFINEMENT_GATE));
    }
    checks
}

fn global_checks() -> Vec<Check> {
    let cfg = RunConfig::preset("fig1.0-bifurcation").expect("shipped preset");
    let base = cfg.scenarios().expect("shipped preset").remove(0);
    let mut checks = Vec::new();
    let b = branch_energies(&base, 1.0).expect("valid gamma");
    checks.push(Check::new(
        "bifurcation at gamma=1",
        mismatch(&[b.zero, b.plus, b.minus], &[0.5625, 0.5, 0.75]),
        1e-15,
    ));
    let b = branch_energies(&base, 0.0).expect("valid gamma");
    checks.push(Check::new("bifurcation at gamma=0", mismatch(&[b.zero, b.plus, b.minus], &[0.5, 0.5, 0.5]), 1e-15));

    let mut worst = 0.0f64;
    for (_, sc, _, _) in preset_scenarios() {
        let g = energy_gap(&sc);
        worst = worst.max((g.gap - g.closed_form).abs()).max((g.diffusion_form - g.closed_form).abs());
    }
    checks.push(Check::new("energy gap identities", worst, 1e-14));

    let fp = RunConfig::preset("ho-fixed-point").expect("shipped preset").scenarios().expect("valid").remove(0);
    let om = fp.params().omega_sq_shifted().sqrt();
    let want = 0.5 * fp.params().hbar / (fp.params().mass * om);
    let worst = uniform(10.0, 100)
        .into_iter()
        .map(|t| {
            let m = moments(&fp, t);
            mismatch(&[m.sigma_x2, quantum_energy(&fp, t)], &[want, fp.params().hbar * fp.params().omega0.powi(2) / (2.0 * om)])
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("fixed point constancy", worst, 1e-9));
    checks
}

pub fn verify(suite: Suite) -> VerifyReport {
    verify_with(suite, None)
}

pub fn verify_with(suite: Suite, mutation: Option<Mutation>) -> VerifyReport {
    let scenarios = preset_scenarios();
    let per: Vec<Vec<Check>> = scenarios
        .par_iter()
        .map(|(name, sc, _, t1)| scenario_checks(name, sc, *t1, suite, mutation))
        .collect();
    let mut checks: Vec<Check> = per.into_iter().flatten().collect();
    checks.extend(global_checks());

    let max_of = |pred: &dyn Fn(&str) -> bool| {
        checks.iter().filter(|c| pred(&c.name)).map(|c| c.residual).fold(0.0, f64::max)
    };
    let max_product_deviation = max_of(&|n| n.ends_with(": product"));
    let max_invariant_drift = max_of(&|n| n.ends_with(": invariant drift"));
    let max_oracle_mismatch = max_of(&|n| n.contains(": oracle"));
    let failures: Vec<Check> = checks.iter().filter(|c| !c.passed).take(MAX_LISTED_FAILURES).cloned().collect();
    VerifyReport {
        suite,
        passed: failures.is_empty(),
        max_product_deviation,
        max_invariant_drift,
        max_oracle_mismatch,
        checks,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let r = verify(Suite::Fast);
        assert!(r.passed, "{:#?}", r.failures);
        assert!(r.max_product_deviation <= PRODUCT_GATE);
    }

    #[test]
    fn flipped_correlation_is_caught() {
        let r = verify_with(Suite::Fast, Some(Mutation::FlipSigmaXp));
        assert!(!r.passed);
        assert!(r.failures.iter().any(|c| c.name.ends_with(": product")));
    }

    #[test]
    fn preset_scenarios_cover_both_branches() {
        let s = preset_scenarios();
        assert!(s.iter().any(|(n, _, _, _)| n == "ho-under/under/minus"));
        assert!(s.iter().any(|(n, _, _, _)| n == "ho-under/under/plus"));
        assert!(!s.iter().any(|(n, _, _, _)| n.starts_with("ho-aperiodic") && n.ends_with("minus")));
    }
}
