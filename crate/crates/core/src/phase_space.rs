//! Wigner function of the Gaussian packet and the transport equations its
//! marginals obey.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Moments, Scenario};
use crate::observables::moments;
use crate::trajectories::mean_position;
use crate::width::{riccati_closed_form, WidthProfile};

pub const AUTO_HALF_WIDTH_SIGMAS: f64 = 6.0;
pub const AUTO_POINTS: usize = 257;
/// Minimum quadrature mass a grid has to capture.
pub const MIN_COVERAGE: f64 = 1.0 - 1e-6;
/// `Δt` for the time derivative in the residuals, in units of the characteristic time.
pub const DT_FRACTION: f64 = 1e-4;

/// Rectangular `(x, p)` lattice with values stored row-major, `x` outer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(x: (f64, f64), p: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        for (name, (lo, hi)) in [("x_max", x), ("p_max", p)] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidParameter {
                    name,
                    value: hi,
                    reason: "grid upper bound must exceed the lower bound",
                });
            }
        }
        for (name, n) in [("nx", nx), ("np", np)] {
            if n < 3 {
                return Err(Error::InvalidParameter {
                    name,
                    value: n as f64,
                    reason: "need at least 3 points per axis",
                });
            }
        }
        Ok(Self {
            x_min: x.0,
            x_max: x.1,
            p_min: p.0,
            p_max: p.1,
            nx,
            np,
            values: vec![0.0; nx * np],
        })
    }

    /// `±6σ` around the mean on each axis with `n` points per axis.
    pub fn auto(sc: &Scenario, t: f64, n: usize) -> Result<Self> {
        let (eta, etadot) = mean_position(sc, t);
        let mm = moments(sc, t);
        let pc = sc.params().mass * etadot;
        let (hx, hp) = (AUTO_HALF_WIDTH_SIGMAS * mm.sigma_x2.sqrt(), AUTO_HALF_WIDTH_SIGMAS * mm.sigma_p2.sqrt());
        Self::new((eta - hx, eta + hx), (pc - hp, pc + hp), n, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + self.dp() * j as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.np + j]
    }

    /// Same bounds with `2(n−1)+1` points per axis.
    pub fn refined(&self) -> Self {
        let mut g = self.clone();
        g.nx = 2 * (self.nx - 1) + 1;
        g.np = 2 * (self.np - 1) + 1;
        g.values = vec![0.0; g.nx * g.np];
        g
    }

    fn fill(&mut self, f: impl Fn(f64, f64) -> f64 + Sync) {
        let (x0, dx, p0, dp, np) = (self.x_min, self.dx(), self.p_min, self.dp(), self.np);
        self.values.par_chunks_mut(np).enumerate().for_each(|(i, row)| {
            let x = x0 + dx * i as f64;
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, p0 + dp * j as f64);
            }
        });
    }

    /// Trapezoidal `∬ f W dx dp`.
    fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.nx {
            let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
            let x = self.x(i);
            for j in 0..self.np {
                let wp = if j == 0 || j == self.np - 1 { 0.5 } else { 1.0 };
                sum += wx * wp * f(x, self.p(j)) * self.at(i, j);
            }
        }
        sum * self.dx() * self.dp()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_, _| 1.0)
    }

    /// Means and covariance recovered by quadrature.
    pub fn recovered_moments(&self) -> ((f64, f64), Moments) {
        let mass = self.mass();
        let mx = self.integrate(|x, _| x) / mass;
        let mp = self.integrate(|_, p| p) / mass;
        let sx = self.integrate(|x, _| (x - mx) * (x - mx)) / mass;
        let sp = self.integrate(|_, p| (p - mp) * (p - mp)) / mass;
        let sxp = self.integrate(|x, p| (x - mx) * (p - mp)) / mass;
        ((mx, mp), Moments::new(sx, sp, sxp))
    }

    /// CSV with header `x,p,w[,residual]`, rows with `x` outer, then a
    /// `# mass=` comment line.
    pub fn write_csv<W: Write>(&self, out: &mut W, residual: Option<&[f64]>) -> std::io::Result<()> {
        if residual.is_some() {
            writeln!(out, "x,p,w,residual")?;
        } else {
            writeln!(out, "x,p,w")?;
        }
        for i in 0..self.nx {
            for j in 0..self.np {
                let (x, p, w) = (self.x(i), self.p(j), self.at(i, j));
                match residual {
                    Some(r) => writeln!(out, "{x:.16e},{p:.16e},{w:.16e},{:.16e}", r[i * self.np + j])?,
                    None => writeln!(out, "{x:.16e},{p:.16e},{w:.16e}")?,
                }
            }
        }
        writeln!(out, "# mass={:.16e}", self.mass())
    }
}

/// Exponents of `W = (1/πħ) e^{−E}` in both printed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerExponents {
    /// `(2/ħ²)[σ_p²x̃² − 2σ_xp x̃p̃ + σ_x²p̃²]`
    pub moment: f64,
    /// `2e^{−γt} I_NL`, with `I_NL` in the width-variable form.
    pub invariant: f64,
}

/// Precomputed Gaussian at one instant.
#[derive(Clone, Copy, Debug)]
struct Packet {
    hbar: f64,
    mass: f64,
    eta: f64,
    mom: f64,
    m: Moments,
    alpha: f64,
    reduced_over_alpha: f64,
}

impl Packet {
    fn at(sc: &Scenario, t: f64) -> Self {
        let p = sc.params();
        let (eta, etadot) = mean_position(sc, t);
        let w = WidthProfile::at(sc, t);
        Self {
            hbar: p.hbar,
            mass: p.mass,
            eta,
            mom: p.mass * etadot,
            m: moments(sc, t),
            alpha: w.alpha,
            reduced_over_alpha: w.reduced_rate / w.alpha,
        }
    }

    fn exponents(&self, x: f64, p: f64) -> WignerExponents {
        let (xs, ps) = (x - self.eta, p - self.mom);
        let m = &self.m;
        let moment = 2.0 / (self.hbar * self.hbar)
            * (m.sigma_p2 * xs * xs - 2.0 * m.sigma_xp * xs * ps + m.sigma_x2 * ps * ps);
        // (m/ħ)[(αp̃/m − (α̇ − γα/2)x̃)² + (x̃/α)²]
        let a = self.alpha;
        let b = a * ps / self.mass - self.reduced_over_alpha * a * xs;
        let invariant = self.mass / self.hbar * (b * b + (xs / a).powi(2));
        WignerExponents { moment, invariant }
    }

    fn value(&self, x: f64, p: f64) -> f64 {
        (-self.exponents(x, p).moment).exp() / (std::f64::consts::PI * self.hbar)
    }
}

pub fn wigner(sc: &Scenario, t: f64, x: f64, p: f64) -> f64 {
    Packet::at(sc, t).value(x, p)
}

pub fn wigner_exponents(sc: &Scenario, t: f64, x: f64, p: f64) -> WignerExponents {
    Packet::at(sc, t).exponents(x, p)
}

/// Fills `grid.values` with `W(x, p, t)`.
pub fn fill_wigner(sc: &Scenario, t: f64, grid: &mut PhaseSpaceGrid) {
    let packet = Packet::at(sc, t);
    grid.fill(|x, p| packet.value(x, p));
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marginals {
    pub rho_x: Vec<f64>,
    pub rho_p: Vec<f64>,
    pub mass_x: f64,
    pub mass_p: f64,
    /// Largest pointwise deviation from the analytic Gaussians.
    pub max_deviation_x: f64,
    pub max_deviation_p: f64,
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

fn gaussian(mean: f64, var: f64, x: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (std::f64::consts::TAU * var).sqrt()
}

/// Position and momentum densities obtained by integrating `W` over the other
/// variable on `grid` (which is filled in the process).
pub fn marginals(sc: &Scenario, t: f64, grid: &mut PhaseSpaceGrid) -> Result<Marginals> {
    fill_wigner(sc, t, grid);
    let (dx, dp) = (grid.dx(), grid.dp());
    let rho_x: Vec<f64> = (0..grid.nx)
        .map(|i| trapezoid(&grid.values[i * grid.np..(i + 1) * grid.np], dp))
        .collect();
    let rho_p: Vec<f64> = (0..grid.np)
        .map(|j| {
            let col: Vec<f64> = (0..grid.nx).map(|i| grid.at(i, j)).collect();
            trapezoid(&col, dx)
        })
        .collect();
    let mass_x = trapezoid(&rho_x, dx);
    let mass_p = trapezoid(&rho_p, dp);
    let captured = mass_x.min(mass_p);
    if captured < MIN_COVERAGE {
        return Err(Error::InsufficientCoverage { captured });
    }

    let (eta, etadot) = mean_position(sc, t);
    let mm = moments(sc, t);
    let pc = sc.params().mass * etadot;
    let max_deviation_x =
        rho_x.iter().enumerate().map(|(i, r)| (r - gaussian(eta, mm.sigma_x2, grid.x(i))).abs()).fold(0.0, f64::max);
    let max_deviation_p =
        rho_p.iter().enumerate().map(|(j, r)| (r - gaussian(pc, mm.sigma_p2, grid.p(j))).abs()).fold(0.0, f64::max);

    Ok(Marginals {
        rho_x,
        rho_p,
        mass_x,
        mass_p,
        max_deviation_x,
        max_deviation_p,
    })
}

/// Coefficient of `∂W/∂p` in the Fokker–Planck equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftConvention {
    /// `−[mω₀²x + γ⟨p⟩]`: the oscillator force at the phase-space point.
    #[default]
    LocalForce,
    /// `−[mω₀²⟨x⟩ + γ⟨p⟩]`: force evaluated at the mean.
    MeanForce,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FokkerPlanckResidual {
    /// Residual per grid point, NaN on the boundary.
    #[serde(skip)]
    pub residual: Vec<f64>,
    pub max_norm: f64,
    /// `γσ_x²/2`
    pub d_x: f64,
    /// `−γσ_p²/2`
    pub d_p: f64,
    pub dt: f64,
}

/// Default `Δt` for the centered time derivative.
/// Points per axis of an auto grid fine enough for the narrow axis of the
/// covariance ellipse: at least `min`, and at least `24κ` rounded up to
/// `2^k + 1`, where `κ = √(σ_x²σ_p² / det)`.
pub fn resolving_points(sc: &Scenario, t: f64, min: usize) -> usize {
    let m = moments(sc, t);
    let kappa = (m.sigma_x2 * m.sigma_p2 / m.determinant()).sqrt();
    let want = (24.0 * kappa).ceil() as usize;
    let mut n = 3;
    while n < want.max(min) {
        n = 2 * (n - 1) + 1;
    }
    n
}

pub fn default_dt(sc: &Scenario) -> f64 {
    DT_FRACTION * sc.params().characteristic_time()
}

/// Residual of
///
/// ```text
/// ∂W/∂t + (p/m)∂W/∂x − F ∂W/∂p − D_x ∂²W/∂x² − D_p ∂²W/∂p²
/// ```
///
/// by centered second-order differences in `x`, `p` and `t`. `grid` is filled
/// with `W(t)`.
pub fn fokker_planck_residual(
    sc: &Scenario,
    t: f64,
    grid: &mut PhaseSpaceGrid,
    dt: f64,
    convention: DriftConvention,
) -> FokkerPlanckResidual {
    let prm = sc.params();
    let (m, g, w2) = (prm.mass, prm.gamma, prm.omega0 * prm.omega0);
    let now = Packet::at(sc, t);
    let before = Packet::at(sc, t - dt);
    let after = Packet::at(sc, t + dt);
    fill_wigner(sc, t, grid);

    let d_x = 0.5 * g * now.m.sigma_x2;
    let d_p = -0.5 * g * now.m.sigma_p2;
    let (dx, dp, nx, np) = (grid.dx(), grid.dp(), grid.nx, grid.np);
    let values = &grid.values;
    let (x0, p0) = (grid.x_min, grid.p_min);

    let mut residual = vec![f64::NAN; nx * np];
    residual.par_chunks_mut(np).enumerate().for_each(|(i, row)| {
        if i == 0 || i == nx - 1 {
            return;
        }
        let x = x0 + dx * i as f64;
        let force = match convention {
            DriftConvention::LocalForce => m * w2 * x + g * now.mom,
            DriftConvention::MeanForce => m * w2 * now.eta + g * now.mom,
        };
        for j in 1..np - 1 {
            let p = p0 + dp * j as f64;
            let w = |a: usize, b: usize| values[a * np + b];
            let w_t = (after.value(x, p) - before.value(x, p)) / (2.0 * dt);
            let w_x = (w(i + 1, j) - w(i - 1, j)) / (2.0 * dx);
            let w_p = (w(i, j + 1) - w(i, j - 1)) / (2.0 * dp);
            let w_xx = (w(i + 1, j) - 2.0 * w(i, j) + w(i - 1, j)) / (dx * dx);
            let w_pp = (w(i, j + 1) - 2.0 * w(i, j) + w(i, j - 1)) / (dp * dp);
            row[j] = w_t + p / m * w_x - force * w_p - d_x * w_xx - d_p * w_pp;
        }
    });
    let max_norm = residual.iter().filter(|r| r.is_finite()).fold(0.0f64, |a, r| a.max(r.abs()));
    FokkerPlanckResidual {
        residual,
        max_norm,
        d_x,
        d_p,
        dt,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergence {
    /// Residual max-norm at each refinement level.
    pub norms: Vec<f64>,
    /// `norms[k] / norms[k+1]`; 4 for second-order convergence.
    pub ratios: Vec<f64>,
}

impl Convergence {
    fn from_norms(norms: Vec<f64>) -> Result<Self> {
        let ratios: Vec<f64> = norms.windows(2).map(|w| w[0] / w[1]).collect();
        if let Some(&bad) = ratios.iter().find(|r| !(**r > 2.0)) {
            return Err(Error::NonConvergentResidual { ratio: bad });
        }
        Ok(Self { norms, ratios })
    }
}

/// Halves `Δx`, `Δp` and `Δt` together `levels` times starting from `grid`.
pub fn fokker_planck_convergence(
    sc: &Scenario,
    t: f64,
    grid: &PhaseSpaceGrid,
    dt: f64,
    levels: usize,
    convention: DriftConvention,
) -> Result<Convergence> {
    let mut g = grid.clone();
    let mut h = dt;
    let mut norms = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        if level > 0 {
            g = g.refined();
            h *= 0.5;
        }
        norms.push(fokker_planck_residual(sc, t, &mut g, h, convention).max_norm);
    }
    Convergence::from_norms(norms)
}

/// Which marginal a 1-D transport residual is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marginal {
    /// `∂ρ/∂t + ∂(vρ)/∂x − D_x ∂²ρ/∂x²` with `v = C_R x̃ + η̇`, `D_x = γσ_x²/2`.
    Position,
    /// `∂ρ/∂t + ∂(ṽρ)/∂p − D_p ∂²ρ/∂p²` with the momentum field `ṽ` and `D_p = −γσ_p²/2`.
    Momentum,
}

struct Gaussian1d {
    mean: f64,
    var: f64,
}

fn marginal_gaussian(sc: &Scenario, t: f64, which: Marginal) -> Gaussian1d {
    let (eta, etadot) = mean_position(sc, t);
    let m = moments(sc, t);
    match which {
        Marginal::Position => Gaussian1d { mean: eta, var: m.sigma_x2 },
        Marginal::Momentum => Gaussian1d {
            mean: sc.params().mass * etadot,
            var: m.sigma_p2,
        },
    }
}

/// Max-norm of the 1-D transport residual for the chosen marginal on `n`
/// points spanning `±6σ`, using centered differences with steps `Δ` and `dt`.
pub fn marginal_residual(sc: &Scenario, t: f64, which: Marginal, n: usize, dt: f64) -> f64 {
    let prm = sc.params();
    let g = prm.gamma;
    let now = marginal_gaussian(sc, t, which);
    let (before, after) = (marginal_gaussian(sc, t - dt, which), marginal_gaussian(sc, t + dt, which));
    let half = AUTO_HALF_WIDTH_SIGMAS * now.var.sqrt();
    let h = 2.0 * half / (n - 1) as f64;
    let q = |k: usize| now.mean - half + h * k as f64;
    let rho = |gs: &Gaussian1d, y: f64| gaussian(gs.mean, gs.var, y);

    let (velocity, diffusion): (Box<dyn Fn(f64) -> f64>, f64) = match which {
        Marginal::Position => {
            let c_re = riccati_closed_form(sc, t).re();
            let (eta, etadot) = mean_position(sc, t);
            (Box::new(move |x| c_re * (x - eta) + etadot), 0.5 * g * now.var)
        }
        Marginal::Momentum => {
            let field = MomentumField::at(sc, t);
            (Box::new(move |p| field.moment_form(p)), -0.5 * g * now.var)
        }
    };

    let mut worst = 0.0f64;
    for k in 1..n - 1 {
        let (ym, y0, yp) = (q(k - 1), q(k), q(k + 1));
        let r_t = (rho(&after, y0) - rho(&before, y0)) / (2.0 * dt);
        let flux = (velocity(yp) * rho(&now, yp) - velocity(ym) * rho(&now, ym)) / (2.0 * h);
        let curv = (rho(&now, yp) - 2.0 * rho(&now, y0) + rho(&now, ym)) / (h * h);
        worst = worst.max((r_t + flux - diffusion * curv).abs());
    }
    worst
}

/// Residual norms of [`marginal_residual`] under repeated halving of the steps.
pub fn marginal_convergence(sc: &Scenario, t: f64, which: Marginal, n: usize, dt: f64, levels: usize) -> Result<Convergence> {
    let mut norms = Vec::with_capacity(levels + 1);
    let (mut n, mut dt) = (n, dt);
    for _ in 0..=levels {
        norms.push(marginal_residual(sc, t, which, n, dt));
        n = 2 * (n - 1) + 1;
        dt *= 0.5;
    }
    Convergence::from_norms(norms)
}

/// Momentum-space velocity field `ṽ = −mω₀²(σ_xp/σ_p²)p̃ + d⟨p⟩/dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumField {
    mass: f64,
    omega_sq: f64,
    mom: f64,
    force: f64,
    moment_slope: f64,
    riccati_slope: f64,
}

impl MomentumField {
    pub fn at(sc: &Scenario, t: f64) -> Self {
        let p = sc.params();
        let (eta, etadot) = mean_position(sc, t);
        let w2 = p.omega0 * p.omega0;
        let m = moments(sc, t);
        let c = riccati_closed_form(sc, t).value;
        Self {
            mass: p.mass,
            omega_sq: w2,
            mom: p.mass * etadot,
            force: -p.mass * (p.gamma * etadot + w2 * eta),
            moment_slope: -p.mass * w2 * m.sigma_xp / m.sigma_p2,
            riccati_slope: -w2 * c.re / c.norm_sqr(),
        }
    }

    /// `d⟨p⟩/dt`
    pub fn mean_force(&self) -> f64 {
        self.force
    }

    /// `−mω₀² σ_xp/σ_p²`
    pub fn tilt(&self) -> f64 {
        self.moment_slope
    }

    pub fn moment_form(&self, p: f64) -> f64 {
        self.moment_slope * (p - self.mom) + self.force
    }

    /// `−ω₀²(C_R/|C|²)p̃ + d⟨p⟩/dt`, in units where the slope carries `m`.
    pub fn riccati_form(&self, p: f64) -> f64 {
        self.mass * self.riccati_slope * (p - self.mom) + self.force
    }

    pub fn omega_sq(&self) -> f64 {
        self.omega_sq
    }
}

pub fn momentum_velocity_field(sc: &Scenario, t: f64, p: f64) -> f64 {
    MomentumField::at(sc, t).moment_form(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolving_points_grow_with_correlation() {
        let sc = Scenario::new(
            crate::model::SystemParams::new(1.0, 1.0, 1.0, 1.0).unwrap(),
            crate::model::InitialState::new(0.0, 0.0, 1.0, 0.0, crate::model::Branch::Plus),
        )
        .unwrap();
        assert_eq!(resolving_points(&sc, 0.0, 10), 33);
        assert_eq!(resolving_points(&sc, 0.0, 65), 65);
        let over = sc.with_gamma(2.0).unwrap();
        assert!(resolving_points(&over, 5.0, 3) >= 257);
    }
    use crate::model::{Branch, InitialState, SystemParams};
    use std::f64::consts::PI;

    fn sc(g: f64, w: f64, eta0: f64, v0: f64, a0: f64, rate: f64, branch: Branch) -> Scenario {
        Scenario::new(SystemParams::natural(g, w).unwrap(), InitialState::new(eta0, v0, a0, rate, branch)).unwrap()
    }

    fn free() -> Scenario {
        sc(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, Branch::Plus)
    }

    #[test]
    fn peak_and_example_value() {
        let s = sc(1.0, 1.0, 0.4, -0.3, 1.0, 0.2, Branch::Minus);
        let (eta, v) = mean_position(&s, 1.7);
        assert!((wigner(&s, 1.7, eta, v) - 1.0 / PI).abs() < 1e-15);
        let w = wigner(&free(), 0.0, 1.0, 0.0);
        assert!((w - (-1.25f64).exp() / PI).abs() < 1e-15);
    }

    #[test]
    fn exponent_forms_agree() {
        for branch in [Branch::Plus, Branch::Minus] {
            let s = sc(0.7, 1.2, 0.5, 0.3, 0.9, 0.4, branch);
            for k in 0..10 {
                let t = 0.6 * k as f64;
                for &(x, p) in &[(0.1, -0.2), (1.5, 0.7), (-2.0, 3.0)] {
                    let e = wigner_exponents(&s, t, x, p);
                    assert!((e.moment - e.invariant).abs() <= 1e-10 * e.moment.abs().max(1e-300));
                }
            }
        }
    }

    #[test]
    fn grid_mass_and_covariance() {
        let s = sc(0.5, 1.0, 0.3, 0.2, 1.1, 0.3, Branch::Minus);
        let t = 1.3;
        let mut g = PhaseSpaceGrid::auto(&s, t, AUTO_POINTS).unwrap();
        fill_wigner(&s, t, &mut g);
        assert!(g.values.iter().all(|&w| w > 0.0));
        assert!((g.mass() - 1.0).abs() < 1e-8);
        let ((mx, mp), m) = g.recovered_moments();
        let (eta, v) = mean_position(&s, t);
        let want = moments(&s, t);
        assert!((mx - eta).abs() < 1e-8 && (mp - v).abs() < 1e-8);
        assert!((m.sigma_x2 - want.sigma_x2).abs() < 1e-6);
        assert!((m.sigma_p2 - want.sigma_p2).abs() < 1e-6);
        assert!((m.sigma_xp - want.sigma_xp).abs() < 1e-6);
    }

    #[test]
    fn marginal_properties() {
        let s = sc(1.0, 0.0, 1.0, 1.0, 1.0, 0.5, Branch::Plus);
        let t = 0.8;
        let mut g = PhaseSpaceGrid::auto(&s, t, AUTO_POINTS).unwrap();
        let m = marginals(&s, t, &mut g).unwrap();
        assert!((m.mass_x - 1.0).abs() < 1e-8 && (m.mass_p - 1.0).abs() < 1e-8);
        assert!(m.max_deviation_x < 1e-8 && m.max_deviation_p < 1e-8);
        let mean_p: f64 = trapezoid(&m.rho_p.iter().enumerate().map(|(j, r)| g.p(j) * r).collect::<Vec<_>>(), g.dp());
        assert!((mean_p - mean_position(&s, t).1).abs() < 1e-8);
        let (eta, _) = mean_position(&s, t);
        let var_x = trapezoid(
            &m.rho_x.iter().enumerate().map(|(i, r)| (g.x(i) - eta).powi(2) * r).collect::<Vec<_>>(),
            g.dx(),
        );
        assert!((var_x - moments(&s, t).sigma_x2).abs() < 1e-6);
    }

    #[test]
    fn narrow_grid_is_flagged() {
        let s = free();
        let mut g = PhaseSpaceGrid::new((-0.5, 0.5), (-0.5, 0.5), 33, 33).unwrap();
        assert!(matches!(marginals(&s, 0.0, &mut g), Err(Error::InsufficientCoverage { .. })));
    }

    #[test]
    fn fokker_planck_converges_at_second_order() {
        for s in [free(), sc(1.0, 1.0, 0.5, 0.2, 1.0, 0.3, Branch::Minus), sc(0.0, 1.0, 0.5, 0.0, 1.3, 0.0, Branch::Plus)] {
            let g = PhaseSpaceGrid::auto(&s, 0.7, 33).unwrap();
            let c = fokker_planck_convergence(&s, 0.7, &g, default_dt(&s), 2, DriftConvention::LocalForce).unwrap();
            for r in &c.ratios {
                assert!((r - 4.0).abs() < 0.4, "{c:?}");
            }
        }
    }

    #[test]
    fn mean_force_drift_does_not_converge_with_a_potential() {
        let s = sc(1.0, 1.0, 0.5, 0.2, 1.0, 0.3, Branch::Minus);
        let g = PhaseSpaceGrid::auto(&s, 0.7, 33).unwrap();
        let r = fokker_planck_convergence(&s, 0.7, &g, default_dt(&s), 2, DriftConvention::MeanForce);
        assert!(matches!(r, Err(Error::NonConvergentResidual { .. })));
        // Without a potential the two conventions coincide.
        let s = free();
        let mut a = PhaseSpaceGrid::auto(&s, 0.7, 33).unwrap();
        let mut b = a.clone();
        let ra = fokker_planck_residual(&s, 0.7, &mut a, 1e-4, DriftConvention::LocalForce);
        let rb = fokker_planck_residual(&s, 0.7, &mut b, 1e-4, DriftConvention::MeanForce);
        assert_eq!(ra.max_norm, rb.max_norm);
    }

    #[test]
    fn diffusion_coefficients() {
        let s = free();
        let mut g = PhaseSpaceGrid::auto(&s, 0.0, 17).unwrap();
        let r = fokker_planck_residual(&s, 0.0, &mut g, 1e-4, DriftConvention::LocalForce);
        assert_eq!(r.d_x, 0.25);
        assert_eq!(r.d_p, -0.3125);
        assert!(r.residual[0].is_nan());
        assert!(r.residual[g.np + 1].is_finite());
    }

    #[test]
    fn marginal_transport_equations() {
        for s in [free(), sc(1.0, 1.0, 0.5, 0.2, 1.0, 0.3, Branch::Minus), sc(4.0, 1.0, 0.3, 0.0, 1.0, 0.1, Branch::Plus)] {
            for which in [Marginal::Position, Marginal::Momentum] {
                let c = marginal_convergence(&s, 0.5, which, 33, default_dt(&s), 2).unwrap();
                for r in &c.ratios {
                    assert!((r - 4.0).abs() < 0.4, "{which:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn momentum_field_examples() {
        let s = sc(1.0, 1.0, 0.5, 0.2, 1.0, 0.3, Branch::Minus);
        let f = MomentumField::at(&s, 1.1);
        let (_, v) = mean_position(&s, 1.1);
        assert_eq!(f.moment_form(v), f.mean_force());
        for p in [-1.0, 0.3, 2.0] {
            assert!((f.moment_form(p) - f.riccati_form(p)).abs() < 1e-12);
        }
        let fr = MomentumField::at(&sc(1.0, 0.0, 0.5, 0.2, 1.0, 0.3, Branch::Minus), 0.4);
        assert_eq!(fr.tilt(), 0.0);

        let p = SystemParams::natural(1.0, 1.0).unwrap();
        let fp = Scenario::new(p, InitialState::fixed_point(&p, 0.0, 0.0).unwrap()).unwrap();
        for t in [0.0, 3.0, 9.0] {
            assert!((MomentumField::at(&fp, t).tilt() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let s = free();
        let mut g = PhaseSpaceGrid::new((-1.0, 1.0), (-2.0, 2.0), 3, 4).unwrap();
        fill_wigner(&s, 0.0, &mut g);
        let mut buf = Vec::new();
        g.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,p,w");
        assert_eq!(lines.len(), 1 + 12 + 1);
        assert!(lines[13].starts_with("# mass="));
        let second: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!((second[0], second[1]), (g.x(0), g.p(1)));

        let r = fokker_planck_residual(&s, 0.0, &mut g, 1e-4, DriftConvention::LocalForce);
        let mut buf = Vec::new();
        g.write_csv(&mut buf, Some(&r.residual)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,p,w,residual\n"));
        assert!(text.lines().nth(1).unwrap().ends_with("NaN"));
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseSpaceGrid::new((1.0, 0.0), (0.0, 1.0), 5, 5).is_err());
        assert!(PhaseSpaceGrid::new((0.0, 1.0), (0.0, 1.0), 2, 5).is_err());
        let g = PhaseSpaceGrid::new((0.0, 1.0), (0.0, 1.0), 5, 9).unwrap().refined();
        assert_eq!((g.nx, g.np), (9, 17));
    }
}
