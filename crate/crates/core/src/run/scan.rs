//! Initial quantum energy of the three initial-condition families as a
//! function of the friction coefficient.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Branch, InitialState, Scenario};
use crate::observables::quantum_energy;
use crate::run::config::RunConfig;
use crate::run::simulate::write_row;

pub const SCAN_HEADER: &str = "gamma,e_tilde_zero,e_tilde_plus,e_tilde_minus";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchEnergies {
    pub gamma: f64,
    /// `|α̇₀| = 0`
    pub zero: f64,
    /// `α̇₀ = +γα₀/2`
    pub plus: f64,
    /// `α̇₀ = −γα₀/2`
    pub minus: f64,
}

/// `Ẽ(t₀)` for the three families built on `α₀` at friction `gamma`.
pub fn branch_energies(base: &Scenario, gamma: f64) -> Result<BranchEnergies> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "scan values must be finite and non-negative",
        });
    }
    let params = crate::model::SystemParams { gamma, ..*base.params() };
    let a0 = base.init().alpha0;
    let energy = |rate: f64, branch: Branch| -> Result<f64> {
        let sc = Scenario::new(params, InitialState::new(0.0, 0.0, a0, rate, branch))?;
        Ok(quantum_energy(&sc, 0.0))
    };
    Ok(BranchEnergies {
        gamma,
        zero: energy(0.0, Branch::Plus)?,
        plus: energy(0.5 * gamma * a0, Branch::Plus)?,
        minus: energy(0.5 * gamma * a0, Branch::Minus)?,
    })
}

/// Evaluates the scan of `cfg` (which must carry a `scan` block) on the first
/// initial state's `α₀`.
pub fn scan_gamma(cfg: &RunConfig) -> Result<Vec<BranchEnergies>> {
    cfg.validate()?;
    let scan = cfg.scan.as_ref().ok_or_else(|| Error::Config("config has no `scan` block".into()))?;
    let base = cfg.scenarios()?.remove(0);
    scan.values.par_iter().map(|&g| branch_energies(&base, g)).collect()
}

pub fn write_scan<W: Write>(out: &mut W, rows: &[BranchEnergies]) -> std::io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for r in rows {
        write_row(out, &[r.gamma, r.zero, r.plus, r.minus])?;
    }
    Ok(())
}
