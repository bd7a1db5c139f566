//! Isothermal relativistic Euler system `p = k²ρ` on Schwarzschild.

use crate::error::{Error, Result};
use crate::grid::lapse;
use crate::numerics::{brent, integrate, safe_newton, OdeTol};

/// Sound speed `k` and black-hole mass `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    k: f64,
    mass: f64,
}

impl EulerParams {
    pub fn new(k: f64, mass: f64) -> Result<Self> {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::config("sound_speed", format!("must lie in (0, 1], got {k}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("mass", format!("must be positive, got {mass}")));
        }
        Ok(EulerParams { k, mass })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `2k²/(1 − k²)`; infinite for `k = 1`.
    pub fn exponent(&self) -> f64 {
        let k2 = self.k * self.k;
        2.0 * k2 / ((1.0 - self.k) * (1.0 + self.k))
    }

    /// The only radius where a steady branch can cross `|v| = k`:
    /// `M(1 + 3k²)/(2k²)`, which degenerates to `2M` at `k = 1`.
    pub fn sonic_radius(&self) -> f64 {
        let k2 = self.k * self.k;
        self.mass * (1.0 + 3.0 * k2) / (2.0 * k2)
    }
}

/// Primitive variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub v: f64,
}

impl EulerState {
    pub fn new(rho: f64, v: f64) -> Result<Self> {
        let s = EulerState { rho, v };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Unphysical(format!("density {}", self.rho)));
        }
        if !(self.v.abs() < 1.0) {
            return Err(Error::Unphysical(format!("velocity {}", self.v)));
        }
        Ok(())
    }
}

/// Conserved variables `(U⁰, U¹)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConserved {
    pub u0: f64,
    pub u1: f64,
}

pub fn to_conserved(s: EulerState, p: &EulerParams) -> EulerConserved {
    let k2 = p.k * p.k;
    let g = s.rho / ((1.0 - s.v) * (1.0 + s.v));
    EulerConserved { u0: (1.0 + k2 * s.v * s.v) * g, u1: (1.0 + k2) * s.v * g }
}

/// Inverse of [`to_conserved`].
///
/// Uses `v = 2w/((1 + k²) + sqrt((1 + k²)² − 4k²w²))`, `w = U¹/U⁰`, which
/// is the quadratic's admissible root without the `0/0` at `w = 0`.
pub fn to_primitive(u: EulerConserved, p: &EulerParams) -> Result<EulerState> {
    if !(u.u0 > 0.0 && u.u0.is_finite() && u.u1.is_finite()) {
        return Err(Error::Unphysical(format!("U0 = {}, U1 = {}", u.u0, u.u1)));
    }
    let k2 = p.k * p.k;
    let w = u.u1 / u.u0;
    if !(w.abs() < 1.0) {
        return Err(Error::Unphysical(format!("|U1/U0| = {} implies |v| >= 1", w.abs())));
    }
    let disc = (1.0 + k2) * (1.0 + k2) - 4.0 * k2 * w * w;
    let v = 2.0 * w / ((1.0 + k2) + disc.max(0.0).sqrt());
    let rho = u.u0 * (1.0 - v) * (1.0 + v) / (1.0 + k2 * v * v);
    EulerState::new(rho, v)
}

/// Flat flux `F(U) = ((1 + k²)ρv/(1 − v²), (v² + k²)ρ/(1 − v²))`.
pub fn flat_flux(s: EulerState, p: &EulerParams) -> [f64; 2] {
    let k2 = p.k * p.k;
    let g = s.rho / ((1.0 - s.v) * (1.0 + s.v));
    [(1.0 + k2) * s.v * g, (s.v * s.v + k2) * g]
}

/// `(1 − 2M/r)·F(U)`.
pub fn euler_flux(s: EulerState, p: &EulerParams, r: f64) -> [f64; 2] {
    let a = lapse(p.mass, r);
    let f = flat_flux(s, p);
    [a * f[0], a * f[1]]
}

pub fn euler_source(s: EulerState, p: &EulerParams, r: f64) -> [f64; 2] {
    let m = p.mass;
    let k2 = p.k * p.k;
    let a = lapse(m, r);
    let g = s.rho / ((1.0 - s.v) * (1.0 + s.v));
    let r2 = r * r;
    let s0 = -(2.0 / r) * a * (1.0 + k2) * s.v * g;
    let s1 = (-2.0 * r + 5.0 * m) / r2 * (s.v * s.v + k2) * g - m / r2 * (1.0 + k2 * s.v * s.v) * g + 2.0 * k2 * s.rho * (r - 2.0 * m) / r2;
    [s0, s1]
}

/// `μ∓ = (1 − 2M/r)(v ∓ k)/(1 ∓ k²v)`.
pub fn eigenvalues(s: EulerState, p: &EulerParams, r: f64) -> (f64, f64) {
    let a = lapse(p.mass, r);
    let k = p.k;
    let k2 = k * k;
    (a * (s.v - k) / (1.0 - k2 * s.v), a * (s.v + k) / (1.0 + k2 * s.v))
}

/// `ln|I₁| = ln(1 − v²) + p·ln|v| + 2p·ln r − ln(1 − 2M/r)`.
pub fn ln_energy_invariant(s: EulerState, p: &EulerParams, r: f64) -> f64 {
    let e = p.exponent();
    ((1.0 - s.v) * (1.0 + s.v)).ln() + e * s.v.abs().ln() + 2.0 * e * r.ln() - lapse(p.mass, r).ln()
}

/// Mass flux `I₂ = r(r − 2M)ρv/(1 − v²)`.
pub fn mass_flux_invariant(s: EulerState, p: &EulerParams, r: f64) -> f64 {
    r * (r - 2.0 * p.mass) * s.rho * s.v / ((1.0 - s.v) * (1.0 + s.v))
}

/// `ln|I₁|` of the state minus its value on the critical branch through
/// `(r_c, |v| = k)`; zero exactly on that branch.
pub fn critical_invariant(s: EulerState, p: &EulerParams, r: f64) -> f64 {
    let k = p.k;
    let e = p.exponent();
    let rc = p.sonic_radius();
    // (1 − k²)/(1 − 2M/r_c) = 1 + 3k²
    let critical = (1.0 + 3.0 * k * k).ln() + e * k.ln() + 2.0 * e * rc.ln();
    ln_energy_invariant(s, p, r) - critical
}

/// Right state of a standing shock with left state `left` at `r0`.
pub fn shock_junction(left: EulerState, p: &EulerParams) -> Result<EulerState> {
    let k = p.k;
    let k2 = k * k;
    let vl = left.v;
    let admissible = (vl > k && vl < 1.0) || (vl > -k && vl < -k2);
    if !admissible {
        return Err(Error::InadmissibleShock(format!("v_L = {vl} outside (-k, -k^2) U (k, 1) for k = {k}")));
    }
    let vr = k2 / vl;
    let rho = (vl * vl - k2 * k2) / (k2 * (1.0 - vl) * (1.0 + vl)) * left.rho;
    EulerState::new(rho, vr)
}

/// Right-hand side of the steady ODE for `(ρ, v)` in `r`.
pub fn steady_derivatives(s: EulerState, p: &EulerParams, r: f64) -> Result<[f64; 2]> {
    let m = p.mass;
    let k2 = p.k * p.k;
    let one_m_k2 = (1.0 - p.k) * (1.0 + p.k);
    let den = r * (r - 2.0 * m) * (k2 - s.v * s.v);
    if den == 0.0 || r <= 2.0 * m {
        return Err(Error::Sonic { sonic_radius: r, r });
    }
    let w = (1.0 - s.v) * (1.0 + s.v);
    let dv = s.v * w * (one_m_k2 * m - 2.0 * k2 * (r - 2.0 * m)) / den;
    let drho = s.rho * (-1.0 / r - 1.0 / (r - 2.0 * m) - dv * (1.0 / s.v + 2.0 * s.v / w));
    let drho = if s.v == 0.0 {
        // static limit: dρ/dr = −(1 + k²)/(2k²)·ρ·2M/(r(r − 2M))
        -s.rho * (1.0 + k2) / (2.0 * k2) * 2.0 * m / (r * (r - 2.0 * m))
    } else {
        drho
    };
    Ok([drho, dv])
}

/// Steady state at `r` by adaptive integration of the steady ODE from the
/// anchor. An independent construction used for `k = 1` and as an oracle.
pub fn steady_extend_ode(p: &EulerParams, r0: f64, anchor: EulerState, r: f64) -> Result<EulerState> {
    let tol = OdeTol { rtol: 1e-12, atol: 1e-14 };
    let y = integrate(
        |x, y: &[f64; 2]| {
            let s = EulerState { rho: y[0], v: y[1] };
            if !(s.rho > 0.0 && s.v.abs() < 1.0) {
                return Err(Error::Sonic { sonic_radius: x, r: x });
            }
            if (s.v * s.v - p.k * p.k).abs() < 1e-12 && p.k < 1.0 {
                return Err(Error::Sonic { sonic_radius: x, r: x });
            }
            steady_derivatives(s, p, x)
        },
        r0,
        [anchor.rho, anchor.v],
        r,
        tol,
    )
    .map_err(|e| match e {
        Error::Truncated { exit_time, .. } => Error::Sonic { sonic_radius: exit_time, r },
        e => e,
    })?;
    EulerState::new(y[0], y[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    Static,
    Subsonic,
    Supersonic,
    /// Anchored exactly at `|v| = k`: defined only at the anchor.
    Sonic,
    /// `k = 1`: constructed by ODE integration.
    Ode,
}

/// A smooth steady branch through an anchor state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyEuler {
    params: EulerParams,
    r0: f64,
    anchor: EulerState,
    kind: BranchKind,
    ln_i1: f64,
}

impl SteadyEuler {
    pub fn new(params: EulerParams, r0: f64, anchor: EulerState) -> Result<Self> {
        anchor.check()?;
        let m = params.mass;
        if !(r0 > 2.0 * m) {
            return Err(Error::Domain { what: "steady Euler anchor", r: r0 });
        }
        let k = params.k;
        let x0 = anchor.v.abs();
        let base = SteadyEuler { params, r0, anchor, kind: BranchKind::Static, ln_i1: f64::NEG_INFINITY };
        if anchor.v == 0.0 {
            return Ok(base);
        }
        if k == 1.0 {
            return Ok(SteadyEuler { kind: BranchKind::Ode, ..base });
        }
        if x0 == k {
            return Ok(SteadyEuler { kind: BranchKind::Sonic, ..base });
        }
        let kind = if x0 < k { BranchKind::Subsonic } else { BranchKind::Supersonic };
        let ln_i1 = ln_energy_invariant(anchor, &params, r0);
        Ok(SteadyEuler { kind, ln_i1, ..base })
    }

    pub fn params(&self) -> &EulerParams {
        &self.params
    }
    pub fn anchor(&self) -> (f64, EulerState) {
        (self.r0, self.anchor)
    }
    pub fn kind(&self) -> BranchKind {
        self.kind
    }
    /// Lower and upper ends of the domain; finite ends are sonic points.
    /// `k = 1` branches report the whole exterior.
    pub fn domain(&self) -> Result<(f64, f64)> {
        let m = self.params.mass;
        match self.kind {
            BranchKind::Static | BranchKind::Ode => Ok((2.0 * m, f64::INFINITY)),
            BranchKind::Sonic => Ok((self.r0, self.r0)),
            BranchKind::Subsonic | BranchKind::Supersonic => self.compute_domain(),
        }
    }

    /// `ln C(r) = ln|I₁| − 2p·ln r + ln(1 − 2M/r)`; the branch solves
    /// `ln(1 − x²) + p·ln x = ln C(r)` for `x = |v|`.
    fn ln_c(&self, r: f64) -> f64 {
        self.ln_i1 - 2.0 * self.params.exponent() * r.ln() + lapse(self.params.mass, r).ln()
    }

    /// `max_x ln((1 − x²)x^p)`, attained at `x = k`.
    fn ln_g_max(&self) -> f64 {
        let k = self.params.k;
        ((1.0 - k) * (1.0 + k)).ln() + self.params.exponent() * k.ln()
    }

    fn compute_domain(&self) -> Result<(f64, f64)> {
        let m = self.params.mass;
        let rc = self.params.sonic_radius();
        let gmax = self.ln_g_max();
        if self.ln_c(rc) <= gmax {
            return Ok((2.0 * m, f64::INFINITY));
        }
        let f = |r: f64| Ok(self.ln_c(r) - gmax);
        if self.r0 < rc {
            let rs = brent(f, self.r0, rc, 1e-14 * rc)?;
            Ok((2.0 * m, rs))
        } else {
            let rs = brent(f, rc, self.r0, 1e-14 * self.r0)?;
            Ok((rs, f64::INFINITY))
        }
    }

    /// Whether `r` is reachable from the anchor without crossing a sonic point.
    pub fn contains(&self, r: f64) -> bool {
        if !(r > 2.0 * self.params.mass) {
            return false;
        }
        match self.kind {
            BranchKind::Static | BranchKind::Ode => true,
            BranchKind::Sonic => r == self.r0,
            BranchKind::Subsonic | BranchKind::Supersonic => {
                // ln C peaks at r_c, so it is monotone between r and r0 unless
                // they straddle r_c
                let rc = self.params.sonic_radius();
                let worst = if (r - rc) * (self.r0 - rc) > 0.0 { r } else { rc };
                self.ln_c(worst) <= self.ln_g_max()
            }
        }
    }

    /// The state of the branch at `r`.
    pub fn extend(&self, r: f64) -> Result<EulerState> {
        let m = self.params.mass;
        if r <= 2.0 * m {
            return Err(Error::Domain { what: "steady Euler branch", r });
        }
        if r == self.r0 {
            return Ok(self.anchor);
        }
        if !self.contains(r) {
            let (lo, hi) = self.domain()?;
            let sonic = if r < lo { lo } else { hi };
            return Err(Error::Sonic { sonic_radius: sonic, r });
        }
        let k = self.params.k;
        let k2 = k * k;
        match self.kind {
            BranchKind::Static => {
                let e = (1.0 + k2) / (2.0 * k2);
                let ratio = lapse(m, self.r0) / lapse(m, r);
                EulerState::new(self.anchor.rho * ratio.powf(e), 0.0)
            }
            BranchKind::Ode => steady_extend_ode(&self.params, self.r0, self.anchor, r),
            BranchKind::Sonic => Err(Error::Sonic { sonic_radius: self.r0, r }),
            BranchKind::Subsonic | BranchKind::Supersonic => {
                let e = self.params.exponent();
                let target = self.ln_c(r);
                let h = |x: f64| {
                    let w = (1.0 - x) * (1.0 + x);
                    (w.ln() + e * x.ln() - target, -2.0 * x / w + e / x)
                };
                let x = if self.kind == BranchKind::Subsonic {
                    // ln(1 − x²) ≤ 0 gives h(exp(lnC/p)) ≤ 0
                    let lo = (target / e).exp().min(k);
                    if lo == k || h(lo).0 >= 0.0 {
                        // h(lo) = ln(1 − lo²) is below round-off in ln C
                        lo
                    } else {
                        safe_newton(h, lo, k, self.anchor.v.abs().clamp(lo, k))?
                    }
                } else {
                    // p·ln x ≤ 0 gives h(sqrt(1 − C)) ≤ 0
                    let c = target.exp();
                    let hi = (1.0 - c).max(0.0).sqrt().max(k);
                    if hi == k || h(hi).0 >= 0.0 {
                        hi
                    } else {
                        safe_newton(h, k, hi, self.anchor.v.abs().clamp(k, hi))?
                    }
                };
                let v = x.copysign(self.anchor.v);
                let (r0, s0) = (self.r0, self.anchor);
                let rho = s0.rho * (r0 * (r0 - 2.0 * m)) / (r * (r - 2.0 * m)) * ((1.0 - x) * (1.0 + x)) / ((1.0 - s0.v) * (1.0 + s0.v))
                    * (s0.v.abs() / x);
                EulerState::new(rho, v)
            }
        }
    }
}

/// Two steady branches joined by a standing shock at `r0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyShockEuler {
    pub left: SteadyEuler,
    pub right: SteadyEuler,
    pub r0: f64,
}

impl SteadyShockEuler {
    /// Builds the shock from the left state at the junction.
    pub fn new(params: EulerParams, r0: f64, left_state: EulerState) -> Result<Self> {
        let right_state = shock_junction(left_state, &params)?;
        Ok(SteadyShockEuler { left: SteadyEuler::new(params, r0, left_state)?, right: SteadyEuler::new(params, r0, right_state)?, r0 })
    }

    pub fn extend(&self, r: f64) -> Result<EulerState> {
        if r < self.r0 {
            self.left.extend(r)
        } else {
            self.right.extend(r)
        }
    }
}
