//! Closed-form width dynamics.
//!
//! The width variable `α(t)` follows from the quadratic-invariant construction
//! `α² = mħ [A ξ₁² + B ξ₂² ∓ 2C ξ₁ξ₂]`, which is rewritten here as a sum of
//! squares,
//!
//! ```text
//! α² = m²β₀ ξ₁² + u²,   u = m|α̇₀| ξ₁ − s α₀ ξ₂,
//! ```
//!
//! with `s = +1` for `α̇(0) = +|α̇₀|`. Rates are formed from the same factors
//! (`χᵢ` instead of `ξᵢ`), so `α̇ − γα/2` never has to be obtained by
//! subtracting two nearly equal numbers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Branch, DampingRegime, Moments, Representation, RiccatiValue, Scenario, SystemParams, WidthState};
use crate::numeric::relax_c;
use crate::trajectories::{expanding_mean, fundamental_solutions, mean_position, FundamentalPair};

/// `A = (m/ħ)(|α̇₀|² + 1/α₀²)`, `B = α₀²/(ħm)`, `C = |α̇₀|α₀/ħ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErmakovConstants {
    pub a_const: f64,
    pub b_const: f64,
    pub c_const: f64,
}

impl ErmakovConstants {
    pub fn new(sc: &Scenario) -> Self {
        let p = sc.params();
        let init = sc.init();
        let rate = init.alphadot0_abs;
        Self {
            a_const: p.mass / p.hbar * (rate * rate + init.beta0()),
            b_const: init.alpha0 * init.alpha0 / (p.hbar * p.mass),
            c_const: rate * init.alpha0 / p.hbar,
        }
    }

    /// `A·B − C²`, equal to `1/ħ²`.
    pub fn determinant(&self) -> f64 {
        self.a_const * self.b_const - self.c_const * self.c_const
    }
}

/// Products of the fundamental solutions with the initial data that every
/// width-derived quantity is built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct WidthFactors {
    /// `α²`
    pub alpha_sq: f64,
    /// `α α̇`
    pub alpha_rate: f64,
    /// `α (α̇ − γα/2)`
    pub alpha_reduced: f64,
    /// `(α̇ − γα/2)² + 1/α²`
    pub momentum_bracket: f64,
}

impl WidthFactors {
    pub fn new(sc: &Scenario, f: &FundamentalPair) -> Self {
        let m = sc.params().mass;
        let init = sc.init();
        let (a0, rate, s) = (init.alpha0, init.alphadot0_abs, init.branch.sign());
        let beta0 = init.beta0();

        let u = m * rate * f.xi1 - s * a0 * f.xi2;
        let v = rate * f.chi1 - s * a0 * f.chi2 / m;
        let w = rate * f.g1 - s * a0 * f.g2 / m;

        Self {
            alpha_sq: m * m * beta0 * f.xi1 * f.xi1 + u * u,
            alpha_rate: -(m * beta0 * f.xi1 * f.g1 + u * w),
            alpha_reduced: m * beta0 * f.xi1 * f.chi1 + u * v,
            momentum_bracket: beta0 * f.chi1 * f.chi1 + v * v,
        }
    }

    pub fn at(sc: &Scenario, t: f64) -> Self {
        Self::new(sc, &fundamental_solutions(sc.params(), t))
    }
}

/// `α`, `α̇` and the reduced rate `α̇ − γα/2` at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WidthProfile {
    pub alpha: f64,
    pub alphadot: f64,
    pub reduced_rate: f64,
}

impl WidthProfile {
    pub fn at(sc: &Scenario, t: f64) -> Self {
        let w = WidthFactors::at(sc, t);
        let alpha = w.alpha_sq.sqrt();
        Self {
            alpha,
            alphadot: w.alpha_rate / alpha,
            reduced_rate: w.alpha_reduced / alpha,
        }
    }

    pub fn state(&self) -> WidthState {
        WidthState::nl(self.alpha, self.alphadot)
    }
}

/// Solution of `α̈ + (ω₀² − γ²/4) α = 1/α³` with `α(0) = α₀`, `α̇(0) = ±|α̇₀|`.
pub fn ermakov_alpha(sc: &Scenario, t: f64) -> WidthState {
    WidthProfile::at(sc, t).state()
}

/// `C = α̇/α − γ/2 + i/α²` (NL representation).
pub fn riccati_from_width(params: &SystemParams, width: &WidthState) -> RiccatiValue {
    let a = width.alpha;
    RiccatiValue::new(width.alphadot / a - 0.5 * params.gamma, 1.0 / (a * a), Representation::NL)
}

/// Closed-form `C(t)` via the reduced rate; same value as
/// `riccati_from_width(ermakov_alpha(..))` without the cancellation in `C_R`.
pub fn riccati_closed_form(sc: &Scenario, t: f64) -> RiccatiValue {
    let w = WidthFactors::at(sc, t);
    RiccatiValue::new(w.alpha_reduced / w.alpha_sq, 1.0 / w.alpha_sq, Representation::NL)
}

/// `C₀ = ±|α̇₀|/α₀ − γ/2 + i/α₀²`, sign following the branch.
pub fn initial_riccati(sc: &Scenario) -> RiccatiValue {
    let init = sc.init();
    riccati_from_width(sc.params(), &WidthState::nl(init.alpha0, init.alphadot0()))
}

/// `C = (σ_xp + iħ/2) / (m σ_x²)`.
pub fn riccati_from_moments(params: &SystemParams, moments: &Moments) -> RiccatiValue {
    let c = Complex64::new(moments.sigma_xp, 0.5 * params.hbar) / (params.mass * moments.sigma_x2);
    RiccatiValue::nl(c)
}

/// `±√(γ²/4 − ω₀²)` for the selected branch, exactly zero in the aperiodic limit.
fn root(params: &SystemParams, which: Branch) -> Complex64 {
    let disc = -params.omega_sq_shifted();
    let r = match params.regime() {
        DampingRegime::AperiodicLimit => Complex64::new(0.0, 0.0),
        _ if disc >= 0.0 => Complex64::new(disc.sqrt(), 0.0),
        _ => Complex64::new(0.0, (-disc).sqrt()),
    };
    r * which.sign()
}

/// Constant particular solutions `C̃± = −γ/2 ± √(γ²/4 − ω₀²)`.
pub fn riccati_particular(params: &SystemParams) -> (RiccatiValue, RiccatiValue) {
    let shift = Complex64::new(-0.5 * params.gamma, 0.0);
    (
        RiccatiValue::nl(shift + root(params, Branch::Plus)),
        RiccatiValue::nl(shift + root(params, Branch::Minus)),
    )
}

/// Bernoulli solution `C(t) = C̃ + V(t)` around one of the constant particular
/// solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bernoulli {
    particular: Complex64,
    /// `C̃ + γ/2`
    rate: Complex64,
    v0: Complex64,
    stationary: bool,
}

/// `|V₀|` below this fraction of `|C̃|` counts as sitting on the particular solution.
pub const STATIONARY_REL_TOL: f64 = 1e-14;

impl Bernoulli {
    pub fn new(sc: &Scenario, which: Branch) -> Self {
        let rate = root(sc.params(), which);
        let particular = Complex64::new(-0.5 * sc.params().gamma, 0.0) + rate;
        let v0 = initial_riccati(sc).value - particular;
        let stationary = v0.norm() < STATIONARY_REL_TOL * particular.norm();
        Self {
            particular,
            rate,
            v0,
            stationary,
        }
    }

    pub fn particular(&self) -> RiccatiValue {
        RiccatiValue::nl(self.particular)
    }

    /// `V₀ = C₀ − C̃`.
    pub fn v0(&self) -> Complex64 {
        self.v0
    }

    /// True when `V₀` vanishes and `C(t) = C̃` for all t.
    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// `V(t) = e^{−2kt} / [κ₀ + (1 − e^{−2kt})/(2k)]`, `k = C̃ + γ/2`, written
    /// without `κ₀ = 1/V₀`; reduces to `1/(κ₀ + t)` for `k = 0`.
    pub fn v(&self, t: f64) -> Complex64 {
        if self.stationary {
            return Complex64::new(0.0, 0.0);
        }
        let k = self.rate;
        if k.re >= 0.0 {
            let decay = (k * (-2.0 * t)).exp();
            self.v0 * decay / (1.0 + self.v0 * relax_c(k, t))
        } else {
            // e^{−2kt} grows here; divide numerator and denominator by it.
            let shrink = (k * (2.0 * t)).exp();
            self.v0 / (shrink + self.v0 * relax_c(-k, t))
        }
    }

    pub fn at(&self, t: f64) -> RiccatiValue {
        RiccatiValue::nl(self.particular + self.v(t))
    }
}

pub fn riccati_bernoulli(sc: &Scenario, which: Branch, t: f64) -> RiccatiValue {
    Bernoulli::new(sc, which).at(t)
}

/// Values that carry a representation tag and can be mapped between the NL, CK
/// and E descriptions.
pub trait Represented: Sized {
    fn representation(&self) -> Representation;
    fn to_nl(&self, t: f64, params: &SystemParams) -> Self;
    fn from_nl(&self, target: Representation, t: f64, params: &SystemParams) -> Self;
}

impl Represented for RiccatiValue {
    fn representation(&self) -> Representation {
        self.representation
    }

    fn to_nl(&self, t: f64, params: &SystemParams) -> Self {
        let g = params.gamma;
        let value = match self.representation {
            Representation::NL => self.value,
            Representation::CK => self.value * (-g * t).exp(),
            Representation::E => self.value - 0.5 * g,
        };
        RiccatiValue::nl(value)
    }

    fn from_nl(&self, target: Representation, t: f64, params: &SystemParams) -> Self {
        debug_assert_eq!(self.representation, Representation::NL);
        let g = params.gamma;
        let value = match target {
            Representation::NL => self.value,
            Representation::CK => self.value * (g * t).exp(),
            Representation::E => self.value + 0.5 * g,
        };
        RiccatiValue {
            value,
            representation: target,
        }
    }
}

impl Represented for WidthState {
    fn representation(&self) -> Representation {
        self.representation
    }

    fn to_nl(&self, t: f64, params: &SystemParams) -> Self {
        let half = 0.5 * params.gamma;
        match self.representation {
            Representation::NL | Representation::E => WidthState::nl(self.alpha, self.alphadot),
            Representation::CK => {
                let grow = (half * t).exp();
                let alpha = self.alpha * grow;
                WidthState::nl(alpha, self.alphadot * grow + half * alpha)
            }
        }
    }

    fn from_nl(&self, target: Representation, t: f64, params: &SystemParams) -> Self {
        debug_assert_eq!(self.representation, Representation::NL);
        let half = 0.5 * params.gamma;
        let (alpha, alphadot) = match target {
            Representation::NL | Representation::E => (self.alpha, self.alphadot),
            Representation::CK => {
                let decay = (-half * t).exp();
                (self.alpha * decay, (self.alphadot - half * self.alpha) * decay)
            }
        };
        WidthState {
            alpha,
            alphadot,
            representation: target,
        }
    }
}

/// Maps `value` into the `target` representation at time `t`:
/// `Ĉ_CK = C_NL e^{γt}`, `Ĉ_E = C_NL + γ/2`, `α̂_CK = α_NL e^{−γt/2}`, `α̂_E = α_NL`.
pub fn transform_representation<T: Represented>(
    value: &T,
    target: Representation,
    t: f64,
    params: &SystemParams,
) -> T {
    value.to_nl(t, params).from_nl(target, t, params)
}

/// Linearised Riccati solution `λ̃` with `C = λ̃̇/λ̃`, and its expanding
/// counterpart `λ = λ̃ e^{γt/2} = α e^{iφ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexTrajectory {
    pub lambda_tilde_re: f64,
    pub lambda_tilde_im: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub lambda_dot_re: f64,
    pub lambda_dot_im: f64,
    pub phase: f64,
    pub c_norm: f64,
}

impl ComplexTrajectory {
    /// `λ̇_I λ_R − λ̇_R λ_I`, equal to one.
    pub fn conservation(&self) -> f64 {
        self.lambda_dot_im * self.lambda_re - self.lambda_dot_re * self.lambda_im
    }

    pub fn lambda_tilde(&self) -> Complex64 {
        Complex64::new(self.lambda_tilde_re, self.lambda_tilde_im)
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda_re, self.lambda_im)
    }

    /// `I = (m/2ħ) (e^{γt}/c²) |λ̃|²/α²`.
    pub fn invariant(&self, params: &SystemParams, alpha: f64, t: f64) -> f64 {
        let norm_sq = self.lambda_tilde_re.powi(2) + self.lambda_tilde_im.powi(2);
        params.mass / (2.0 * params.hbar) * (params.gamma * t).exp() / (self.c_norm * self.c_norm)
            * norm_sq
            / (alpha * alpha)
    }
}

/// Ermakov invariant `I = (m/2ħ)[(ξ̇α − ξα̇)² + (ξ/α)²]` of the mean and width,
/// evaluated at `t = 0` where it is exact.
pub(crate) fn invariant_at_origin(sc: &Scenario) -> f64 {
    let p = sc.params();
    let init = sc.init();
    let a = init.alpha0;
    let reduced = init.alphadot0() - 0.5 * p.gamma * a;
    let bracket = init.etadot0 * a - reduced * init.eta0;
    p.mass / (2.0 * p.hbar) * (bracket * bracket + (init.eta0 / a).powi(2))
}

/// `λ̃` from the mean `(⟨x⟩, ⟨p⟩)` via
///
/// ```text
/// λ̃_R = −c α α̇ ⟨x⟩ + (c/m) α² (⟨p⟩ + γm⟨x⟩/2),   λ̃_I = c ⟨x⟩,
/// ```
///
/// with `c = √(m / 2ħI)`.
pub fn complex_trajectory(sc: &Scenario, t: f64) -> Result<ComplexTrajectory> {
    let p = sc.params();
    let invariant = invariant_at_origin(sc);
    if invariant <= 0.0 {
        return Err(Error::VanishingInvariant);
    }
    let c = (p.mass / (2.0 * p.hbar * invariant)).sqrt();
    let width = WidthProfile::at(sc, t);
    let (x, v) = mean_position(sc, t);
    let (xi, _) = expanding_mean(sc, t);
    let alpha = width.alpha;

    // −αα̇x + (α²/m)(p + γmx/2) = α(αv − (α̇ − γα/2)x), with p = m v
    let bracket = alpha * v - width.reduced_rate * x;
    let lt_re = c * alpha * bracket;
    let lt_im = c * x;

    let grow = (0.5 * p.gamma * t).exp();
    let (l_re, l_im) = (lt_re * grow, lt_im * grow);
    // λ_R = c α W with W = ξ̇α − ξα̇ and Ẇ = −ξ/α³; λ_I = c ξ.
    let wronskian = bracket * grow;
    let lambda_dot_re = c * (width.alphadot * wronskian - xi / (alpha * alpha));
    let lambda_dot_im = c * (v + 0.5 * p.gamma * x) * grow;

    Ok(ComplexTrajectory {
        lambda_tilde_re: lt_re,
        lambda_tilde_im: lt_im,
        lambda_re: l_re,
        lambda_im: l_im,
        lambda_dot_re,
        lambda_dot_im,
        phase: l_im.atan2(l_re),
        c_norm: c,
    })
}
