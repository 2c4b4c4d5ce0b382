//! Independent ODE integration of the equations the closed forms solve.
//!
//! Nothing here calls into `trajectories`, `width` or `observables`; the
//! integrators only see right-hand sides and initial data, so agreement with
//! the closed forms is a genuine cross-check.

mod solver;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Moments, Representation, RiccatiValue, SystemParams, WidthState};

pub use solver::MAX_STEPS;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical 4th-order Runge–Kutta with step `max_step`.
    Rk4,
    /// Dormand–Prince 5(4) with error control.
    #[default]
    DormandPrince,
}

pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl IntegratorConfig {
    /// Adaptive integration over `[t_start, t_end]` with `rel = abs = 10⁻¹⁰`.
    pub fn new(t_start: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            method: Method::DormandPrince,
            rel_tol: DEFAULT_TOL,
            abs_tol: DEFAULT_TOL,
            max_step: ((t_end - t_start) / 10.0).max(f64::MIN_POSITIVE),
            t_start,
            t_end,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn fixed_step(mut self, h: f64) -> Result<Self> {
        self.method = Method::Rk4;
        self.max_step = h;
        self.check()?;
        Ok(self)
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self.check()?;
        Ok(self)
    }

    pub fn with_max_step(mut self, max_step: f64) -> Result<Self> {
        self.max_step = max_step;
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(MIN_TOL..=MAX_TOL).contains(&v) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "tolerance must lie in [1e-14, 1e-2]",
                });
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "max_step",
                value: self.max_step,
                reason: "must be positive and finite",
            });
        }
        if !(self.t_start.is_finite() && self.t_end > self.t_start && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
                reason: "must be finite and exceed t_start",
            });
        }
        Ok(())
    }

    /// `n + 1` equally spaced times covering the span.
    pub fn uniform_times(&self, n: usize) -> Vec<f64> {
        let n = n.max(1);
        let span = self.t_end - self.t_start;
        (0..=n).map(|k| self.t_start + span * k as f64 / n as f64).collect()
    }
}

/// Values at the requested sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled<T> {
    pub t: Vec<f64>,
    pub y: Vec<T>,
}

impl<T> Sampled<T> {
    fn new(times: &[f64], y: Vec<T>) -> Self {
        Self { t: times.to_vec(), y }
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.t.iter().copied().zip(&self.y)
    }
}

fn ok<const N: usize>(_: f64, _: &[f64; N]) -> Result<()> {
    Ok(())
}

/// `η̈ + γη̇ + ω₀²η = 0`, sampled as `(η, η̇)`.
pub fn integrate_mean(
    params: &SystemParams,
    eta0: f64,
    etadot0: f64,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Sampled<(f64, f64)>> {
    let (g, w2) = (params.gamma, params.omega0 * params.omega0);
    let ys = solver::solve(cfg, [eta0, etadot0], times, |_, y| [y[1], -g * y[1] - w2 * y[0]], ok)?;
    Ok(Sampled::new(times, ys.into_iter().map(|y| (y[0], y[1])).collect()))
}

/// `α̈ + (ω₀² − γ²/4)α = 1/α³`.
pub fn integrate_ermakov(
    params: &SystemParams,
    alpha0: f64,
    alphadot0: f64,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Sampled<WidthState>> {
    if !(alpha0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha0",
            value: alpha0,
            reason: "must be positive",
        });
    }
    let w2 = params.omega_sq_shifted();
    let floor = cfg.abs_tol;
    let ys = solver::solve(
        cfg,
        [alpha0, alphadot0],
        times,
        |_, y| [y[1], -w2 * y[0] + 1.0 / y[0].powi(3)],
        |t, y| {
            if y[0] <= floor {
                Err(Error::WidthCollapse { t, alpha: y[0] })
            } else {
                Ok(())
            }
        },
    )?;
    Ok(Sampled::new(times, ys.into_iter().map(|y| WidthState::nl(y[0], y[1])).collect()))
}

/// `|C|` beyond which a Riccati trajectory is reported as blown up.
pub const BLOW_UP: f64 = 1e12;

/// Riccati equation in the requested representation:
///
/// ```text
/// NL:  Ċ + γC + C² + ω₀² = 0
/// CK:  Ċ + e^{−γt}C² + e^{γt}ω₀² = 0
/// E:   Ċ + C² + ω₀² − γ²/4 = 0
/// ```
///
/// `c0` is converted into `representation` at `t_start` if it carries a
/// different tag.
pub fn integrate_riccati(
    params: &SystemParams,
    c0: RiccatiValue,
    representation: Representation,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Sampled<RiccatiValue>> {
    let start = convert(params, c0, representation, cfg.t_start);
    let (g, w2) = (params.gamma, params.omega0 * params.omega0);
    let rhs = move |t: f64, y: &[f64; 2]| -> [f64; 2] {
        let c = Complex64::new(y[0], y[1]);
        let d = match representation {
            Representation::NL => -g * c - c * c - w2,
            Representation::CK => -(-g * t).exp() * c * c - (g * t).exp() * w2,
            Representation::E => -c * c - (w2 - 0.25 * g * g),
        };
        [d.re, d.im]
    };
    let ys = solver::solve(cfg, [start.re, start.im], times, rhs, |t, y| {
        let magnitude = y[0].hypot(y[1]);
        if magnitude > BLOW_UP || !magnitude.is_finite() {
            Err(Error::BlowUp { t, magnitude })
        } else {
            Ok(())
        }
    })?;
    Ok(Sampled::new(
        times,
        ys.into_iter().map(|y| RiccatiValue::new(y[0], y[1], representation)).collect(),
    ))
}

/// Tag conversion local to the oracle, so it does not lean on the closed-form module.
fn convert(params: &SystemParams, c: RiccatiValue, target: Representation, t: f64) -> Complex64 {
    let g = params.gamma;
    let nl = match c.representation {
        Representation::NL => c.value,
        Representation::CK => c.value * (-g * t).exp(),
        Representation::E => c.value - 0.5 * g,
    };
    match target {
        Representation::NL => nl,
        Representation::CK => nl * (g * t).exp(),
        Representation::E => nl + 0.5 * g,
    }
}

/// ```text
/// dσ_x²/dt = 2σ_xp/m + γσ_x²
/// dσ_p²/dt = −2mω₀²σ_xp − γσ_p²
/// dσ_xp/dt = σ_p²/m − mω₀²σ_x²
/// ```
///
/// The determinant `σ_x²σ_p² − σ_xp²` is monitored; a change larger than
/// `1000·rel_tol` relative to `σ_x²σ_p²` aborts with [`Error::InvariantDrift`].
pub fn integrate_moments(params: &SystemParams, m0: Moments, cfg: &IntegratorConfig, times: &[f64]) -> Result<Sampled<Moments>> {
    let (m, g, w2) = (params.mass, params.gamma, params.omega0 * params.omega0);
    let det0 = m0.determinant();
    let limit = 1e3 * cfg.rel_tol;
    let ys = solver::solve(
        cfg,
        [m0.sigma_x2, m0.sigma_p2, m0.sigma_xp],
        times,
        |_, y| {
            [
                2.0 * y[2] / m + g * y[0],
                -2.0 * m * w2 * y[2] - g * y[1],
                y[1] / m - m * w2 * y[0],
            ]
        },
        |t, y| {
            let mm = Moments::new(y[0], y[1], y[2]);
            let drift = (mm.determinant() - det0).abs() / (y[0] * y[1]).abs().max(det0.abs());
            if drift > limit {
                Err(Error::InvariantDrift { t, drift })
            } else {
                Ok(())
            }
        },
    )?;
    Ok(Sampled::new(times, ys.into_iter().map(|y| Moments::new(y[0], y[1], y[2])).collect()))
}

/// `(σ_x², dσ_x²/dt, d²σ_x²/dt²)` implied by the moment equations.
pub fn sigma_jet(params: &SystemParams, m0: &Moments) -> [f64; 3] {
    let (m, g, w2) = (params.mass, params.gamma, params.omega0 * params.omega0);
    let d1 = 2.0 * m0.sigma_xp / m + g * m0.sigma_x2;
    let d2 = 2.0 * (m0.sigma_p2 / m - m * w2 * m0.sigma_x2) / m + g * d1;
    [m0.sigma_x2, d1, d2]
}

/// `d³σ_x²/dt³ + 4Ω² dσ_x²/dt = 0` (constant frequency, so the `ΩΩ̇` term is absent).
pub fn integrate_sigma_third_order(
    params: &SystemParams,
    jet: [f64; 3],
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Sampled<f64>> {
    let w2 = params.omega_sq_shifted();
    let ys = solver::solve(cfg, jet, times, |_, y| [y[1], y[2], -4.0 * w2 * y[1]], ok)?;
    Ok(Sampled::new(times, ys.into_iter().map(|y| y[0]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn p(g: f64, w: f64) -> SystemParams {
        SystemParams::natural(g, w).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 0.0).is_err());
        assert!(IntegratorConfig::new(1.0, 0.0).is_err());
        let c = IntegratorConfig::new(0.0, 1.0).unwrap();
        assert!(c.with_tolerances(1e-15, 1e-10).is_err());
        assert!(c.with_tolerances(1e-10, 0.1).is_err());
        assert!(c.with_tolerances(1e-14, 1e-2).is_ok());
        assert!(c.with_max_step(0.0).is_err());
        assert!(c.fixed_step(-1.0).is_err());
        assert_eq!(c.uniform_times(4), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn mean_examples() {
        let cfg = IntegratorConfig::new(0.0, TAU).unwrap();
        let s = integrate_mean(&p(0.0, 1.0), 1.0, 0.0, &cfg, &[TAU]).unwrap();
        assert!((s.y[0].0 - 1.0).abs() < 1e-8);
        let cfg = IntegratorConfig::new(0.0, 1.0).unwrap();
        let s = integrate_mean(&p(1.0, 0.0), 1.0, 1.0, &cfg, &[1.0]).unwrap();
        assert!((s.y[0].0 - (2.0 - (-1.0f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn ermakov_examples() {
        let cfg = IntegratorConfig::new(0.0, 1.0).unwrap();
        let s = integrate_ermakov(&p(1.0, 0.0), 1.0, 0.0, &cfg, &[1.0]).unwrap();
        let want = (4.0 * 0.5f64.sinh().powi(2) + 0.5f64.cosh().powi(2)).sqrt();
        assert!((s.y[0].alpha - want).abs() < 1e-8);

        let cfg = IntegratorConfig::new(0.0, 20.0).unwrap();
        let times = cfg.uniform_times(40);
        let fixed = 0.75f64.powf(-0.25);
        let s = integrate_ermakov(&p(1.0, 1.0), fixed, 0.0, &cfg, &times).unwrap();
        assert!(s.y.iter().all(|w| (w.alpha - fixed).abs() < 1e-9));
        let s = integrate_ermakov(&p(0.0, 1.0), 1.0, 0.0, &cfg, &times).unwrap();
        assert!(s.y.iter().all(|w| (w.alpha - 1.0).abs() < 1e-12));
        assert!(integrate_ermakov(&p(0.0, 1.0), 0.0, 0.0, &cfg, &times).is_err());
    }

    #[test]
    fn riccati_examples() {
        let cfg = IntegratorConfig::new(0.0, 5.0).unwrap();
        let times = cfg.uniform_times(10);
        // C̃₊ = −1/2 + i√3/2 for γ = ω₀ = 1
        let fixed = RiccatiValue::new(-0.5, 0.75f64.sqrt(), Representation::NL);
        let s = integrate_riccati(&p(1.0, 1.0), fixed, Representation::NL, &cfg, &times).unwrap();
        assert!(s.y.iter().all(|c| (c.value - fixed.value).norm() < 1e-12));

        let c0 = RiccatiValue::new(-0.5, 1.0, Representation::NL);
        let nl = integrate_riccati(&p(1.0, 0.0), c0, Representation::NL, &cfg, &times).unwrap();
        let ck = integrate_riccati(&p(1.0, 0.0), c0, Representation::CK, &cfg, &times).unwrap();
        assert_eq!(ck.y[0].value, nl.y[0].value);
        assert_eq!(ck.y[0].representation, Representation::CK);
        // α² = 4 sinh²(t/2) + cosh²(t/2), C_I = 1/α²
        let (sh, ch) = (0.5f64.sinh(), 0.5f64.cosh());
        let nl1 = integrate_riccati(&p(1.0, 0.0), c0, Representation::NL, &cfg, &[1.0]).unwrap();
        assert!((nl1.y[0].im() - 1.0 / (4.0 * sh * sh + ch * ch)).abs() < 1e-9);
    }

    #[test]
    fn riccati_blow_up_is_reported() {
        // Real negative initial value with no imaginary part runs off to −∞ in finite time.
        let cfg = IntegratorConfig::new(0.0, 5.0).unwrap();
        let c0 = RiccatiValue::new(-2.0, 0.0, Representation::NL);
        let r = integrate_riccati(&p(0.0, 0.0), c0, Representation::NL, &cfg, &[5.0]);
        assert!(matches!(r, Err(Error::BlowUp { .. }) | Err(Error::StepSizeUnderflow { .. })));
    }

    #[test]
    fn moments_examples() {
        let cfg = IntegratorConfig::new(0.0, 10.0).unwrap();
        let times = cfg.uniform_times(50);
        let s = integrate_moments(&p(1.0, 0.0), Moments::new(0.5, 0.625, -0.25), &cfg, &times).unwrap();
        assert!(s.y.iter().all(|m| (m.determinant() - 0.25).abs() < 1e-9));
        let one = integrate_moments(&p(1.0, 0.0), Moments::new(0.5, 0.625, -0.25), &cfg, &[1.0]).unwrap();
        assert!((one.y[0].sigma_p2 - 0.625 * (-1.0f64).exp()).abs() < 1e-9);

        let om = 0.75f64.sqrt();
        let fixed = Moments::new(0.5 / om, 0.5 * om * (1.0 + 0.25 / 0.75), -0.25 / om);
        let s = integrate_moments(&p(1.0, 1.0), fixed, &cfg, &times).unwrap();
        assert!(s.y.iter().all(|m| (m.sigma_x2 - fixed.sigma_x2).abs() < 1e-10));
    }

    #[test]
    fn third_order_matches_moment_system() {
        for &(g, w) in &[(1.0, 0.0), (1.0, 1.0), (2.0, 1.0), (4.0, 1.0)] {
            let params = p(g, w);
            let m0 = Moments::new(0.5, 0.625, -0.25);
            let cfg = IntegratorConfig::new(0.0, 2.0).unwrap();
            let times = cfg.uniform_times(20);
            let a = integrate_moments(&params, m0, &cfg, &times).unwrap();
            let b = integrate_sigma_third_order(&params, sigma_jet(&params, &m0), &cfg, &times).unwrap();
            for (x, y) in a.y.iter().zip(&b.y) {
                assert!((x.sigma_x2 - y).abs() < 1e-8 * y.abs().max(1.0), "γ={g} ω₀={w}");
            }
        }
        let cfg = IntegratorConfig::new(0.0, 1.0).unwrap();
        let params = p(1.0, 0.0);
        let s = integrate_sigma_third_order(&params, sigma_jet(&params, &Moments::new(0.5, 0.625, -0.25)), &cfg, &[1.0]).unwrap();
        let want = 0.5 * (4.0 * 0.5f64.sinh().powi(2) + 0.5f64.cosh().powi(2));
        assert!((s.y[0] - want).abs() < 1e-8);
    }
}
