//! Explicit Runge–Kutta stepping over fixed-size real state vectors.

use crate::error::{Error, Result};

use super::{IntegratorConfig, Method};

/// Hard cap on accepted plus rejected steps per run.
pub const MAX_STEPS: usize = 5_000_000;

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn rk4_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &[(1.0, &k1)]));
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &[(1.0, &k2)]));
    let k4 = rhs(t + h, &axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)])
}

/// One Dormand–Prince step; returns the 5th-order solution and the error estimate.
fn dp_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = rhs(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = rhs(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(t + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = rhs(t + h, &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err)
}

fn error_norm<const N: usize>(cfg: &IntegratorConfig, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        sum += (err[i] / scale).powi(2);
    }
    (sum / N as f64).sqrt()
}

fn check_times(cfg: &IntegratorConfig, times: &[f64]) -> Result<()> {
    let slack = 1e-12 * (cfg.t_end - cfg.t_start).abs().max(1.0);
    let mut prev = cfg.t_start;
    for &t in times {
        if !t.is_finite() || t < cfg.t_start - slack || t > cfg.t_end + slack {
            return Err(Error::InvalidParameter {
                name: "sample time",
                value: t,
                reason: "must lie inside the integration span",
            });
        }
        if t < prev {
            return Err(Error::InvalidParameter {
                name: "sample time",
                value: t,
                reason: "sample times must be non-decreasing",
            });
        }
        prev = t;
    }
    Ok(())
}

/// Integrates `y' = rhs(t, y)` from `cfg.t_start` and returns the state at
/// each of `times` (non-decreasing, inside the span). Steps are shortened to
/// land on sample times exactly. `check` sees every accepted state.
pub(crate) fn solve<const N: usize, F, C>(
    cfg: &IntegratorConfig,
    y0: [f64; N],
    times: &[f64],
    rhs: F,
    mut check: C,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(f64, &[f64; N]) -> Result<()>,
{
    cfg.check()?;
    check_times(cfg, times)?;

    let mut out = Vec::with_capacity(times.len());
    let mut t = cfg.t_start;
    let mut y = y0;
    let mut h = match cfg.method {
        Method::Rk4 => cfg.max_step,
        Method::DormandPrince => cfg.max_step.min(1e-3 * (cfg.t_end - cfg.t_start).abs().max(1e-3)),
    };
    let mut steps = 0usize;

    for &target in times {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::TooManySteps { t, max_steps: MAX_STEPS });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            match cfg.method {
                Method::Rk4 => {
                    y = rk4_step(&rhs, t, &y, step);
                    t = if last { target } else { t + step };
                }
                Method::DormandPrince => {
                    if step <= 16.0 * f64::EPSILON * t.abs().max(1.0) && !last {
                        return Err(Error::StepSizeUnderflow { t });
                    }
                    let (y_new, err) = dp_step(&rhs, t, &y, step);
                    let norm = error_norm(cfg, &y, &y_new, &err);
                    if !norm.is_finite() {
                        h = 0.25 * step;
                        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                            return Err(Error::StepSizeUnderflow { t });
                        }
                        continue;
                    }
                    let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                    if norm <= 1.0 {
                        y = y_new;
                        t = if last { target } else { t + step };
                        // A step shortened to hit a sample does not shrink the next one.
                        h = if last { h.max(step * factor) } else { step * factor };
                    } else {
                        h = step * factor.min(1.0);
                        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                            return Err(Error::StepSizeUnderflow { t });
                        }
                        continue;
                    }
                    h = h.min(cfg.max_step);
                }
            }
            check(t, &y)?;
        }
        out.push(y);
    }
    Ok(out)
}
