//! Second moments, energies, the Ermakov invariant and velocity fields.

use serde::Serialize;

use crate::model::{Branch, DampingRegime, InitialState, Moments, Scenario, SystemParams, WidthState};
use crate::trajectories::mean_position;
use crate::width::{WidthFactors, WidthProfile};

/// Moments from the fundamental solutions (the `ξ/g/χ` forms).
pub fn moments(sc: &Scenario, t: f64) -> Moments {
    moments_from_factors(sc.params(), &WidthFactors::at(sc, t))
}

pub(crate) fn moments_from_factors(p: &SystemParams, w: &WidthFactors) -> Moments {
    Moments::new(
        0.5 * p.hbar / p.mass * w.alpha_sq,
        0.5 * p.hbar * p.mass * w.momentum_bracket,
        0.5 * p.hbar * w.alpha_reduced,
    )
}

/// Moments from a width state:
/// `σ_x² = ħα²/2m`, `σ_p² = (mħ/2)[(α̇ − γα/2)² + 1/α²]`, `σ_xp = (ħ/2)α(α̇ − γα/2)`.
pub fn moments_from_width(params: &SystemParams, width: &WidthState) -> Moments {
    let a = width.alpha;
    let reduced = width.alphadot - 0.5 * params.gamma * a;
    Moments::new(
        0.5 * params.hbar / params.mass * a * a,
        0.5 * params.mass * params.hbar * (reduced * reduced + 1.0 / (a * a)),
        0.5 * params.hbar * a * reduced,
    )
}

/// `σ_x²σ_p² − σ_xp²`.
pub fn uncertainty_product(m: &Moments) -> f64 {
    m.determinant()
}

/// Long-time limit of `σ_x²σ_p²` for damped free motion,
/// `ħ²/4 + (σ_p₀²/mγ + σ_xp₀)²`. `None` outside free motion with `γ > 0`.
pub fn free_motion_product_limit(sc: &Scenario) -> Option<f64> {
    let p = sc.params();
    if sc.regime() != DampingRegime::FreeMotion || p.gamma <= 0.0 {
        return None;
    }
    let m0 = moments(sc, 0.0);
    let shift = m0.sigma_p2 / (p.mass * p.gamma) + m0.sigma_xp;
    Some(0.25 * p.hbar * p.hbar + shift * shift)
}

fn energy_of(p: &SystemParams, m: &Moments) -> f64 {
    0.5 * m.sigma_p2 / p.mass + 0.5 * p.mass * p.omega0 * p.omega0 * m.sigma_x2
}

/// `Ẽ = σ_p²/2m + mω₀²σ_x²/2`.
pub fn quantum_energy(sc: &Scenario, t: f64) -> f64 {
    energy_of(sc.params(), &moments(sc, t))
}

/// `Ẽ = (ħ/4)[(α̇ − γα/2)² + 1/α² + ω₀²α²]`.
pub fn quantum_energy_from_width(params: &SystemParams, width: &WidthState) -> f64 {
    let a = width.alpha;
    let reduced = width.alphadot - 0.5 * params.gamma * a;
    let w2 = params.omega0 * params.omega0;
    0.25 * params.hbar * (reduced * reduced + 1.0 / (a * a) + w2 * a * a)
}

/// Split of the initial quantum energy between the two sign branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyGap {
    /// `Ẽ_minus(t₀) − Ẽ_plus(t₀)`, evaluated from both branches.
    pub gap: f64,
    /// `(ħγ/2)|α̇₀|α₀`
    pub closed_form: f64,
    /// `D_x₀ = γσ_x₀²/2`
    pub diffusion_x0: f64,
    /// `2mD_x₀|α̇₀|/α₀`
    pub diffusion_form: f64,
}

pub fn energy_gap(sc: &Scenario) -> EnergyGap {
    let p = sc.params();
    let init = sc.init();
    let plus = quantum_energy(&sc.with_branch(Branch::Plus), 0.0);
    let minus = quantum_energy(&sc.with_branch(Branch::Minus), 0.0);
    let diffusion_x0 = 0.5 * p.gamma * moments(sc, 0.0).sigma_x2;
    EnergyGap {
        gap: minus - plus,
        closed_form: 0.5 * p.hbar * p.gamma * init.alphadot0_abs * init.alpha0,
        diffusion_x0,
        diffusion_form: 2.0 * p.mass * diffusion_x0 * init.alphadot0_abs / init.alpha0,
    }
}

/// Thermal reading of the initial energy gaps through the Einstein relation
/// `D_x₀ = kT/mγ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermalReport {
    pub boltzmann: f64,
    pub diffusion_x0: f64,
    /// `kT = mγD_x₀`
    pub kt: f64,
    pub temperature: f64,
    /// Gap for `|α̇₀| = γα₀/2`, equal to `kT`.
    pub gap_matched: f64,
    /// `Ẽ(|α̇₀| = 0) − Ẽ_plus(|α̇₀| = γα₀/2)`, equal to `kT/4`.
    pub zero_rate_excess: f64,
}

impl ThermalReport {
    /// Uses `α₀`, `η₀`, `η̇₀` of `sc`; `|α̇₀|` is set to `γα₀/2` and to zero
    /// for the two comparisons. `boltzmann` is 1 in natural units.
    pub fn new(sc: &Scenario, boltzmann: f64) -> Self {
        let p = *sc.params();
        let init = sc.init();
        let with_rate = |rate: f64| {
            let i = InitialState::new(init.eta0, init.etadot0, init.alpha0, rate, Branch::Plus);
            Scenario::new(p, i).expect("rescaled initial state stays valid")
        };
        let matched = with_rate(0.5 * p.gamma * init.alpha0);
        let zero = with_rate(0.0);
        let diffusion_x0 = 0.5 * p.gamma * moments(sc, 0.0).sigma_x2;
        let kt = p.mass * p.gamma * diffusion_x0;
        Self {
            boltzmann,
            diffusion_x0,
            kt,
            temperature: kt / boltzmann,
            gap_matched: energy_gap(&matched).gap,
            zero_rate_excess: quantum_energy(&zero, 0.0) - quantum_energy(&matched, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub e_total: f64,
    pub e_quantum: f64,
    pub e_classical: f64,
    pub gap0: f64,
}

/// `E = ⟨p⟩²/2m + mω₀²⟨x⟩²/2 + Ẽ`.
pub fn total_energy(sc: &Scenario, t: f64) -> EnergyReport {
    let p = sc.params();
    let (eta, etadot) = mean_position(sc, t);
    let e_classical = 0.5 * p.mass * etadot * etadot + 0.5 * p.mass * p.omega0 * p.omega0 * eta * eta;
    let e_quantum = quantum_energy(sc, t);
    EnergyReport {
        e_total: e_classical + e_quantum,
        e_quantum,
        e_classical,
        gap0: energy_gap(sc).gap,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub i_expanding: f64,
    pub i_moment: f64,
}

impl InvariantReport {
    pub fn relative_difference(&self) -> f64 {
        (self.i_expanding - self.i_moment).abs() / self.i_expanding.abs().max(f64::MIN_POSITIVE)
    }
}

/// `I = (m/2ħ) e^{γt}[(η̇α − (α̇ − γα/2)η)² + (η/α)²]` and
/// `I = e^{γt}[σ_p²⟨x⟩² − 2σ_xp⟨x⟩⟨p⟩ + σ_x²⟨p⟩²]/ħ²`.
pub fn ermakov_invariant(sc: &Scenario, t: f64) -> InvariantReport {
    let p = sc.params();
    let (eta, etadot) = mean_position(sc, t);
    let factors = WidthFactors::at(sc, t);
    let alpha = factors.alpha_sq.sqrt();
    let reduced = factors.alpha_reduced / alpha;
    let grow = (p.gamma * t).exp();

    let bracket = etadot * alpha - reduced * eta;
    let i_expanding = 0.5 * p.mass / p.hbar * grow * (bracket * bracket + (eta / alpha).powi(2));

    let m = moments_from_factors(p, &factors);
    let mom = p.mass * etadot;
    let quad = m.sigma_p2 * eta * eta - 2.0 * m.sigma_xp * eta * mom + m.sigma_x2 * mom * mom;
    let i_moment = grow * quad / (p.hbar * p.hbar);

    InvariantReport { i_expanding, i_moment }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VelocityFields {
    /// `(α̇/α − γ/2)x̃ + η̇`
    pub v_nl: f64,
    /// `(γ/2)x̃`
    pub v_diff: f64,
    /// `η̇ + (α̇/α)x̃`
    pub v_total: f64,
    /// `(α̇/α)x̃`
    pub v_tun: f64,
}

pub fn velocity_fields(sc: &Scenario, t: f64, x: f64) -> VelocityFields {
    let (eta, etadot) = mean_position(sc, t);
    let shifted = x - eta;
    let w = WidthProfile::at(sc, t);
    let v_diff = 0.5 * sc.params().gamma * shifted;
    let v_nl = w.reduced_rate / w.alpha * shifted + etadot;
    let v_tun = tunnelling_rate(sc, t) * shifted;
    VelocityFields {
        v_nl,
        v_diff,
        v_total: v_nl + v_diff,
        v_tun,
    }
}

/// `α̇/α` from the fundamental solutions:
/// `−[mβ₀ξ₁g₁ + u w] / [m²β₀ξ₁² + u²]` with `u = m|α̇₀|ξ₁ ∓ α₀ξ₂`, `w = |α̇₀|g₁ ∓ α₀g₂/m`.
pub fn tunnelling_rate(sc: &Scenario, t: f64) -> f64 {
    let w = WidthFactors::at(sc, t);
    w.alpha_rate / w.alpha_sq
}
