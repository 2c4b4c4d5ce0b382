//! Domain types shared by every other module: physical constants, wave-packet
//! initial data, damping regimes and the tagged Riccati/width values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `|ω₀² − γ²/4|` below which the aperiodic limit is used.
pub const REGIME_REL_TOL: f64 = 1e-12;
/// Absolute floor for the aperiodic test, so that `γ = ω₀ = 0` is not a 0/0 question.
pub const REGIME_ABS_FLOOR: f64 = 1e-30;

fn one() -> f64 {
    1.0
}

/// Constants of the damped oscillator `m η̈ + m γ η̇ + m ω₀² η = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    pub gamma: f64,
    pub omega0: f64,
}

impl SystemParams {
    pub fn new(mass: f64, hbar: f64, gamma: f64, omega0: f64) -> Result<Self> {
        let params = Self {
            mass,
            hbar,
            gamma,
            omega0,
        };
        params.check()?;
        Ok(params)
    }

    /// `m = ħ = 1`.
    pub fn natural(gamma: f64, omega0: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma, omega0)
    }

    pub fn check(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        non_negative("gamma", self.gamma)?;
        non_negative("omega0", self.omega0)?;
        Ok(())
    }

    /// `Ω² = ω₀² − γ²/4`, evaluated in factored form to keep the sign exact near
    /// the aperiodic limit.
    pub fn omega_sq_shifted(&self) -> f64 {
        let half = 0.5 * self.gamma;
        (self.omega0 - half) * (self.omega0 + half)
    }

    pub fn regime(&self) -> DampingRegime {
        classify_regime(self)
    }

    /// Characteristic time `1 / max(γ, ω₀, 1)`.
    pub fn characteristic_time(&self) -> f64 {
        1.0 / self.gamma.max(self.omega0).max(1.0)
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        });
    }
    Ok(())
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(())
}

fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

/// Sign of the initial width rate: `Plus` means `α̇(0) = +|α̇₀|`.
///
/// `Plus` selects the lower sign of the `∓` in the closed-form width, i.e. the
/// coefficient of the `ξ₁ξ₂` cross term is `−2C`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Wave-packet initial data at `t₀ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    #[serde(default)]
    pub eta0: f64,
    #[serde(default)]
    pub etadot0: f64,
    pub alpha0: f64,
    #[serde(default)]
    pub alphadot0_abs: f64,
    #[serde(default)]
    pub branch: Branch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl InitialState {
    pub fn new(eta0: f64, etadot0: f64, alpha0: f64, alphadot0_abs: f64, branch: Branch) -> Self {
        Self {
            eta0,
            etadot0,
            alpha0,
            alphadot0_abs,
            branch,
            label: None,
        }
    }

    /// Width at the stationary point `α₀ = Ω^{-1/2}` of the Ermakov equation, at rest.
    /// Only meaningful for under-critical damping.
    pub fn fixed_point(params: &SystemParams, eta0: f64, etadot0: f64) -> Result<Self> {
        let omega_sq = params.omega_sq_shifted();
        if params.regime() != DampingRegime::UnderCritical {
            return Err(Error::Config(format!(
                "the width fixed point requires under-critical damping (Ω² = {omega_sq})"
            )));
        }
        Ok(Self::new(eta0, etadot0, omega_sq.powf(-0.25), 0.0, Branch::Plus))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// Signed `α̇(0)`.
    pub fn alphadot0(&self) -> f64 {
        self.branch.sign() * self.alphadot0_abs
    }

    /// `β₀ = 1/α₀²`.
    pub fn beta0(&self) -> f64 {
        1.0 / (self.alpha0 * self.alpha0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingRegime {
    /// `ω₀ = 0`.
    FreeMotion,
    /// `ω₀ > γ/2`.
    UnderCritical,
    /// `ω₀ = γ/2`.
    AperiodicLimit,
    /// `0 < ω₀ < γ/2`.
    OverDamped,
}

impl DampingRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            DampingRegime::FreeMotion => "free_motion",
            DampingRegime::UnderCritical => "under_critical",
            DampingRegime::AperiodicLimit => "aperiodic_limit",
            DampingRegime::OverDamped => "over_damped",
        }
    }
}

pub fn classify_regime(params: &SystemParams) -> DampingRegime {
    if params.omega0 == 0.0 {
        return DampingRegime::FreeMotion;
    }
    let w2 = params.omega0 * params.omega0;
    let g2 = 0.25 * params.gamma * params.gamma;
    let diff = params.omega_sq_shifted();
    if diff.abs() <= REGIME_REL_TOL * w2.max(g2).max(REGIME_ABS_FLOOR) {
        DampingRegime::AperiodicLimit
    } else if diff > 0.0 {
        DampingRegime::UnderCritical
    } else {
        DampingRegime::OverDamped
    }
}

/// The three equivalent descriptions of the width dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// Physical variables of the logarithmic nonlinear Schrödinger equation.
    NL,
    /// Caldirola–Kanai canonical variables.
    CK,
    /// Exponentially expanding canonical coordinates.
    E,
}

/// Complex Riccati variable `C = C_R + i C_I`, tagged with its representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiccatiValue {
    pub value: Complex64,
    pub representation: Representation,
}

impl RiccatiValue {
    pub fn new(re: f64, im: f64, representation: Representation) -> Self {
        Self {
            value: Complex64::new(re, im),
            representation,
        }
    }

    pub fn nl(value: Complex64) -> Self {
        Self {
            value,
            representation: Representation::NL,
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

/// Width variable and its signed rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WidthState {
    pub alpha: f64,
    pub alphadot: f64,
    pub representation: Representation,
}

impl WidthState {
    pub fn nl(alpha: f64, alphadot: f64) -> Self {
        Self {
            alpha,
            alphadot,
            representation: Representation::NL,
        }
    }
}

/// Second moments `(σ_x², σ_p², σ_xp)` of a Gaussian packet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub sigma_x2: f64,
    pub sigma_p2: f64,
    pub sigma_xp: f64,
}

impl Moments {
    pub fn new(sigma_x2: f64, sigma_p2: f64, sigma_xp: f64) -> Self {
        Self {
            sigma_x2,
            sigma_p2,
            sigma_xp,
        }
    }

    /// `σ_x²σ_p² − σ_xp²`, with the products formed through fused multiply-adds so
    /// that the only rounding is in the inputs themselves.
    pub fn determinant(&self) -> f64 {
        let cc = self.sigma_xp * self.sigma_xp;
        let cc_err = self.sigma_xp.mul_add(self.sigma_xp, -cc);
        let ab_minus_cc = self.sigma_x2.mul_add(self.sigma_p2, -cc);
        ab_minus_cc - cc_err
    }
}

/// A validated `(SystemParams, InitialState)` pair. Every closed-form routine
/// takes one of these, so the invariants are checked exactly once.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    params: SystemParams,
    init: InitialState,
    regime: DampingRegime,
}

/// Checks every type invariant and normalises the branch to `Plus` when
/// `|α̇₀| = 0`.
pub fn validate(params: SystemParams, mut init: InitialState) -> Result<Scenario> {
    params.check()?;
    finite("eta0", init.eta0)?;
    finite("etadot0", init.etadot0)?;
    positive("alpha0", init.alpha0)?;
    non_negative("alphadot0_abs", init.alphadot0_abs)?;
    if init.alphadot0_abs == 0.0 {
        init.branch = Branch::Plus;
    }
    let regime = classify_regime(&params);
    Ok(Scenario {
        params,
        init,
        regime,
    })
}

impl Scenario {
    pub fn new(params: SystemParams, init: InitialState) -> Result<Self> {
        validate(params, init)
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn init(&self) -> &InitialState {
        &self.init
    }

    pub fn regime(&self) -> DampingRegime {
        self.regime
    }

    pub fn branch(&self) -> Branch {
        self.init.branch
    }

    /// Same scenario on the other sign branch.
    pub fn with_branch(&self, branch: Branch) -> Self {
        let init = self.init.clone().with_branch(branch);
        validate(self.params, init).expect("branch change keeps a valid scenario valid")
    }

    /// Same initial data under a different friction coefficient.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let params = SystemParams {
            gamma,
            ..self.params
        };
        validate(params, self.init.clone())
    }

    /// Same parameters, different initial mean.
    pub fn with_mean(&self, eta0: f64, etadot0: f64) -> Result<Self> {
        let init = InitialState {
            eta0,
            etadot0,
            ..self.init.clone()
        };
        validate(self.params, init)
    }
}
