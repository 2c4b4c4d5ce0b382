//! Classical mean trajectories and the fundamental solutions `ξ₁, ξ₂` of
//! `ξ̈ + (ω₀² − γ²/4) ξ = 0`, for every damping regime.

use crate::model::{DampingRegime, Scenario, SystemParams};
use crate::numeric::{relax, sinhc};

/// Fundamental solutions with `ξ₁(0) = 0, ξ̇₁(0) = −1/m, ξ₂(0) = 1, ξ̇₂(0) = 0`,
/// their momenta `gᵢ = −m ξ̇ᵢ` and `χᵢ = −gᵢ − m (γ/2) ξᵢ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalPair {
    pub xi1: f64,
    pub xi2: f64,
    pub g1: f64,
    pub g2: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl FundamentalPair {
    /// `ξ₂ g₁ − ξ₁ g₂`, identically one.
    pub fn wronskian(&self) -> f64 {
        self.xi2 * self.g1 - self.xi1 * self.g2
    }
}

pub fn fundamental_solutions(params: &SystemParams, t: f64) -> FundamentalPair {
    let m = params.mass;
    let half_gamma = 0.5 * params.gamma;
    match params.regime() {
        DampingRegime::FreeMotion => {
            let x = half_gamma * t;
            let decay = (-x).exp();
            FundamentalPair {
                xi1: -(t / m) * sinhc(x),
                xi2: x.cosh(),
                g1: x.cosh(),
                g2: -m * half_gamma * x.sinh(),
                chi1: -decay,
                chi2: -m * half_gamma * decay,
            }
        }
        DampingRegime::UnderCritical => {
            let omega = params.omega_sq_shifted().sqrt();
            let (s, c) = (omega * t).sin_cos();
            FundamentalPair {
                xi1: -s / (m * omega),
                xi2: c,
                g1: c,
                g2: m * omega * s,
                chi1: -c + half_gamma * s / omega,
                chi2: -m * omega * s - m * half_gamma * c,
            }
        }
        DampingRegime::AperiodicLimit => FundamentalPair {
            xi1: -t / m,
            xi2: 1.0,
            g1: 1.0,
            g2: 0.0,
            chi1: -1.0 + half_gamma * t,
            chi2: -m * half_gamma,
        },
        DampingRegime::OverDamped => {
            let omega_t = (-params.omega_sq_shifted()).sqrt();
            let x = omega_t * t;
            let (grow, decay) = (x.exp(), (-x).exp());
            // γ/2 − Ω̃ = ω₀² / (γ/2 + Ω̃), free of cancellation.
            let gap = params.omega0 * params.omega0 / (half_gamma + omega_t);
            FundamentalPair {
                xi1: -x.sinh() / (m * omega_t),
                xi2: x.cosh(),
                g1: x.cosh(),
                g2: -m * omega_t * x.sinh(),
                chi1: 0.5 * (gap / omega_t * grow - (1.0 + half_gamma / omega_t) * decay),
                chi2: -0.5 * m * (gap * grow + (omega_t + half_gamma) * decay),
            }
        }
    }
}

/// Mean position `η(t)` and velocity `η̇(t)` obeying `η̈ + γη̇ + ω₀²η = 0`.
pub fn mean_position(sc: &Scenario, t: f64) -> (f64, f64) {
    let p = sc.params();
    let (eta0, v0) = (sc.init().eta0, sc.init().etadot0);
    let gamma = p.gamma;
    let half_gamma = 0.5 * gamma;
    let w2 = p.omega0 * p.omega0;
    match sc.regime() {
        DampingRegime::FreeMotion => (eta0 + v0 * relax(gamma, t), v0 * (-gamma * t).exp()),
        DampingRegime::UnderCritical => {
            let omega = p.omega_sq_shifted().sqrt();
            let (s, c) = (omega * t).sin_cos();
            let env = (-half_gamma * t).exp();
            let eta = (eta0 * c + (half_gamma * eta0 + v0) * s / omega) * env;
            let etadot = (v0 * c - (w2 * eta0 + half_gamma * v0) * s / omega) * env;
            (eta, etadot)
        }
        DampingRegime::AperiodicLimit => {
            let env = (-half_gamma * t).exp();
            let eta = ((1.0 + half_gamma * t) * eta0 + v0 * t) * env;
            let etadot = (v0 * (1.0 - half_gamma * t) - half_gamma * half_gamma * t * eta0) * env;
            (eta, etadot)
        }
        DampingRegime::OverDamped => {
            let omega_t = (-p.omega_sq_shifted()).sqrt();
            let x = omega_t * t;
            let (s, c) = (x.sinh(), x.cosh());
            let env = (-half_gamma * t).exp();
            let eta = (eta0 * c + (half_gamma * eta0 + v0) * s / omega_t) * env;
            let etadot = (v0 * c - (w2 * eta0 + half_gamma * v0) * s / omega_t) * env;
            (eta, etadot)
        }
    }
}

/// Mean in expanding coordinates, `ξ(t) = η(t) e^{γt/2}`, with its rate.
pub fn expanding_mean(sc: &Scenario, t: f64) -> (f64, f64) {
    let (eta, etadot) = mean_position(sc, t);
    let half_gamma = 0.5 * sc.params().gamma;
    let grow = (half_gamma * t).exp();
    (eta * grow, (etadot + half_gamma * eta) * grow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Branch, InitialState};

    fn params(g: f64, w: f64) -> SystemParams {
        SystemParams::natural(g, w).unwrap()
    }

    fn scenario(g: f64, w: f64, eta0: f64, v0: f64) -> Scenario {
        Scenario::new(params(g, w), InitialState::new(eta0, v0, 1.0, 0.0, Branch::Plus)).unwrap()
    }

    const REGIMES: [(f64, f64); 6] = [(1.0, 0.0), (0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (4.0, 1.0), (0.0, 2.0)];

    #[test]
    fn initial_values_in_every_regime() {
        for (g, w) in REGIMES {
            let f = fundamental_solutions(&params(g, w), 0.0);
            assert_eq!((f.xi1, f.xi2, f.g1, f.g2), (0.0, 1.0, 1.0, 0.0), "γ={g}, ω₀={w}");
        }
    }

    #[test]
    fn free_motion_values() {
        let f = fundamental_solutions(&params(1.0, 0.0), 1.0);
        assert!((f.xi1 - -1.042191).abs() < 5e-7);
        assert!((f.xi2 - 1.127626).abs() < 5e-7);
        assert!((f.chi1 - -0.606531).abs() < 5e-7);
        assert!((f.chi2 - -0.303265).abs() < 5e-7);
    }

    #[test]
    fn under_critical_quarter_period() {
        let p = params(1.0, 1.0);
        let omega = 3f64.sqrt() / 2.0;
        let f = fundamental_solutions(&p, std::f64::consts::PI / (2.0 * omega));
        assert!((f.xi1 - -1.154701).abs() < 5e-7);
        assert!(f.xi2.abs() < 1e-15);
    }

    #[test]
    fn wronskian_is_one() {
        for (g, w) in REGIMES {
            let p = params(g, w);
            for k in 0..=200 {
                let t = 0.05 * k as f64;
                let f = fundamental_solutions(&p, t);
                let scale = (f.xi2 * f.g1).abs().max(1.0);
                assert!((f.wronskian() - 1.0).abs() < 1e-10 * scale, "γ={g} ω₀={w} t={t}");
            }
        }
    }

    #[test]
    fn chi_matches_definition() {
        for (g, w) in REGIMES {
            let p = params(g, w);
            for k in 0..=40 {
                let t = 0.25 * k as f64;
                let f = fundamental_solutions(&p, t);
                let c1 = -f.g1 - 0.5 * g * f.xi1;
                let c2 = -f.g2 - 0.5 * g * f.xi2;
                let scale = f.g1.abs().max(f.g2.abs()).max(1.0);
                assert!((f.chi1 - c1).abs() < 1e-12 * scale, "γ={g} ω₀={w} t={t}");
                assert!((f.chi2 - c2).abs() < 1e-12 * scale, "γ={g} ω₀={w} t={t}");
            }
        }
    }

    #[test]
    fn xi_satisfies_shifted_oscillator() {
        let h = 1e-3;
        for (g, w) in REGIMES {
            let p = params(g, w);
            let w2 = p.omega_sq_shifted();
            for k in 1..20 {
                let t = 0.3 * k as f64;
                let (a, b, c) = (
                    fundamental_solutions(&p, t - h),
                    fundamental_solutions(&p, t),
                    fundamental_solutions(&p, t + h),
                );
                for (ym, y0, yp) in [(a.xi1, b.xi1, c.xi1), (a.xi2, b.xi2, c.xi2)] {
                    let res = (yp - 2.0 * y0 + ym) / (h * h) + w2 * y0;
                    assert!(res.abs() < 1e-5 * y0.abs().max(1.0), "γ={g} ω₀={w} t={t} res={res}");
                }
                // g = −m ξ̇
                let d1 = -(c.xi1 - a.xi1) / (2.0 * h);
                assert!((d1 - b.g1).abs() < 1e-5 * b.g1.abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_friction_free_motion_is_linear() {
        let p = params(0.0, 0.0);
        for &t in &[0.0, 0.5, 3.0, 10.0] {
            let f = fundamental_solutions(&p, t);
            assert_eq!(f.xi1, -t);
            let small = fundamental_solutions(&params(1e-9, 0.0), t);
            assert!((small.xi1 + t).abs() < 1e-12 * t.max(1.0));
        }
    }

    #[test]
    fn free_motion_mean() {
        let sc = scenario(1.0, 0.0, 1.0, 1.0);
        let (eta, _) = mean_position(&sc, 1.0);
        assert!((eta - 1.632121).abs() < 5e-7);
        let (eta, v) = mean_position(&sc, 60.0);
        assert!((eta - 2.0).abs() < 1e-15);
        assert!(v.abs() < 1e-25);
        let sc = scenario(1.0, 1.0, 1.0, 0.0);
        assert_eq!(mean_position(&sc, 0.0), (1.0, 0.0));
    }

    #[test]
    fn mean_satisfies_damped_newton() {
        let h = 1e-3;
        for (g, w) in REGIMES {
            let sc = scenario(g, w, 0.7, -0.4);
            for k in 1..20 {
                let t = 0.35 * k as f64;
                let (ym, _) = mean_position(&sc, t - h);
                let (y0, v0) = mean_position(&sc, t);
                let (yp, _) = mean_position(&sc, t + h);
                let acc = (yp - 2.0 * y0 + ym) / (h * h);
                let res = acc + g * v0 + w * w * y0;
                assert!(res.abs() < 1e-5, "γ={g} ω₀={w} t={t} res={res}");
                let vel = (yp - ym) / (2.0 * h);
                assert!((vel - v0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn expanding_mean_is_fundamental_combination() {
        for (g, w) in REGIMES {
            let sc = scenario(g, w, 0.7, -0.4);
            let a1 = -(-0.4 + 0.5 * g * 0.7);
            let a2 = 0.7;
            for k in 0..20 {
                let t = 0.4 * k as f64;
                let f = fundamental_solutions(sc.params(), t);
                let (xi, _) = expanding_mean(&sc, t);
                let want = a1 * f.xi1 + a2 * f.xi2;
                assert!((xi - want).abs() < 1e-12 * want.abs().max(1.0), "γ={g} ω₀={w} t={t}");
            }
        }
    }
}
