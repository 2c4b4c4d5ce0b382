//! Small special functions used by the closed forms.

use num_complex::Complex64;

/// `sinh(x)/x`, continuous through `x = 0`.
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `(1 − e^{−a t}) / a`, continuous through `a = 0` where it equals `t`.
pub(crate) fn relax(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        t
    } else {
        -(-a * t).exp_m1() / a
    }
}

/// `e^z − 1` without cancellation for small `|z|`.
pub(crate) fn expm1_c(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half_sin = (0.5 * b).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half_sin * half_sin;
    let im = a.exp() * b.sin();
    Complex64::new(re, im)
}

/// `(1 − e^{−2 k t}) / (2 k)`, continuous through `k = 0` where it equals `t`.
pub(crate) fn relax_c(k: Complex64, t: f64) -> Complex64 {
    if k == Complex64::new(0.0, 0.0) {
        return Complex64::new(t, 0.0);
    }
    let z = k * (-2.0 * t);
    -expm1_c(z) / (2.0 * k)
}
