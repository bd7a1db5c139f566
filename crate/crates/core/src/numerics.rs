//! Scalar root finding and adaptive Runge–Kutta integration.

use crate::error::{Error, Result};

/// Iteration cap shared by the bracketed solvers.
pub const MAX_ITER: usize = 200;

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
///
/// Terminates when the bracket is narrower than `xtol` (plus a relative
/// term) or the residual is exactly zero.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Root(format!("no sign change on [{a}, {b}]: f = ({fa}, {fb})")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Root(format!("no convergence after {MAX_ITER} iterations near {b}")))
}

/// Newton iteration safeguarded by bisection on a sign-changing bracket.
///
/// `fdf` returns the residual and its derivative. Converges to full
/// double precision for smooth monotone residuals.
pub fn safe_newton<F>(mut fdf: F, lo: f64, hi: f64, guess: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Root(format!("no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")));
    }
    // orient so that f(xl) < 0 < f(xh)
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = if guess > lo.min(hi) && guess < lo.max(hi) { guess } else { 0.5 * (lo + hi) };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = fdf(x);
    for _ in 0..MAX_ITER {
        let out_of_range = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        if out_of_range || (2.0 * f).abs() > (dx_old * df).abs() || !df.is_finite() {
            dx_old = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        } else {
            dx_old = dx;
            dx = f / df;
            x -= dx;
        }
        if dx.abs() <= 2.0 * f64::EPSILON * x.abs() || f == 0.0 {
            return Ok(x);
        }
        let (nf, ndf) = fdf(x);
        f = nf;
        df = ndf;
        if f < 0.0 {
            xl = x;
        } else if f > 0.0 {
            xh = x;
        } else {
            return Ok(x);
        }
        if (xh - xl).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeTol {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTol {
    fn default() -> Self {
        OdeTol { rtol: 1e-10, atol: 1e-12 }
    }
}

// Dormand–Prince 5(4) tableau
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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction) with
/// adaptive Dormand–Prince 5(4) steps.
///
/// Errors returned by `f` abort the integration. The caller receives the
/// last accepted time through [`Error::Truncated`] when `f` reports a
/// domain error, so trajectories that leave a branch can be reported with
/// their exit time.
pub fn integrate<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t1: f64, tol: OdeTol) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    if t1 == t0 {
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&k1, &y, span, tol);
    let mut steps = 0usize;
    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 4.0 * f64::EPSILON * t1.abs().max(1.0) {
            return Ok(y);
        }
        if h >= remaining {
            h = remaining;
        }
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Numerical("ODE step limit exceeded".into()));
        }
        let hs = dir * h;
        let attempt = (|| -> Result<([f64; N], [f64; N], f64)> {
            let k2 = f(t + C2 * hs, &axpy(&y, &[(A21, &k1)], hs))?;
            let k3 = f(t + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs))?;
            let k4 = f(t + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs))?;
            let k5 = f(t + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs))?;
            let k6 = f(t + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs))?;
            let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
            let k7 = f(t + hs, &y5)?;
            let mut err = 0.0f64;
            for i in 0..N {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
                err = err.max((e / sc).abs());
            }
            Ok((y5, k7, err))
        })();
        match attempt {
            Ok((y5, k7, err)) if err.is_finite() && err <= 1.0 => {
                t += hs;
                y = y5;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= fac;
            }
            Ok((_, _, err)) => {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.25)).clamp(0.1, 0.9) } else { 0.25 };
                h *= fac;
            }
            // a stage left the domain: shrink and retry unless the step is already tiny
            Err(Error::Domain { r, .. }) | Err(Error::Sonic { r, .. }) => {
                h *= 0.25;
                if h <= 1e-14 * span.max(t.abs()) {
                    return Err(Error::Truncated { exit_time: t, r });
                }
            }
            Err(e) => return Err(e),
        }
        if h <= 1e-15 * span.max(t.abs()) {
            return Err(Error::Numerical(format!("ODE step size underflow at t = {t}")));
        }
    }
}

fn initial_step<const N: usize>(k: &[f64; N], y: &[f64; N], span: f64, tol: OdeTol) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d0 = d0.max((y[i] / sc).abs());
        d1 = d1.max((k[i] / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span.max(1e-6) } else { 0.01 * d0 / d1 };
    h.min(span).max(1e-12 * span)
}
