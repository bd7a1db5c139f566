//! Relativistic Burgers equation `∂t v + ∂r((1−2M/r)(v²−1)/2) = (2M/r²)(v²−1)`.

use crate::error::{Error, Result};
use crate::grid::lapse;
use serde::{Deserialize, Serialize};

/// Tolerance for round-off excursions beyond the light-speed bound.
pub const LIGHT_SPEED_SLACK: f64 = 1e-12;

/// Direction of a steady branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    #[serde(alias = "+")]
    Plus,
    #[serde(alias = "-")]
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// `+` for non-negative input.
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// Clamps `v` into `[−1, 1]`, rejecting excursions beyond round-off.
pub fn clamp_velocity(v: f64) -> Result<f64> {
    if !v.is_finite() || v.abs() > 1.0 + LIGHT_SPEED_SLACK {
        return Err(Error::Unphysical(format!("|v| = {} exceeds the light speed", v.abs())));
    }
    Ok(v.clamp(-1.0, 1.0))
}

/// `(1 − 2M/r)(v² − 1)/2`.
#[inline]
pub fn physical_flux(v: f64, r: f64, mass: f64) -> f64 {
    lapse(mass, r) * (v * v - 1.0) * 0.5
}

/// `(2M/r²)(v² − 1)`.
#[inline]
pub fn geometric_source(v: f64, r: f64, mass: f64) -> f64 {
    2.0 * mass / (r * r) * (v * v - 1.0)
}

/// Characteristic speed `(1 − 2M/r)·v`.
#[inline]
pub fn characteristic_speed(v: f64, r: f64, mass: f64) -> f64 {
    lapse(mass, r) * v
}

/// Conserved density `v/(1 − 2M/r)²`.
#[inline]
pub fn conserved(v: f64, r: f64, mass: f64) -> f64 {
    let a = lapse(mass, r);
    v / (a * a)
}

/// Flux of the conserved form, `(v² − 1)/(2(1 − 2M/r))`.
#[inline]
pub fn conserved_flux(v: f64, r: f64, mass: f64) -> f64 {
    (v * v - 1.0) / (2.0 * lapse(mass, r))
}

/// Auxiliary variable `z = sgn(v)·sqrt((v² − 1)/(1 − 2M/r) + 1)`, constant
/// along steady branches with `K ≤ 1`.
pub fn z_of_v(v: f64, r: f64, mass: f64) -> Result<f64> {
    if r <= 2.0 * mass {
        return Err(Error::Domain { what: "z", r });
    }
    let rad = (v * v - 1.0) / lapse(mass, r) + 1.0;
    if rad < 0.0 {
        return Err(Error::Domain { what: "z", r });
    }
    Ok(Sign::of(v).value() * rad.sqrt())
}

/// `z` extended by `0` where the radicand is negative (branches with
/// `K > 1`), which keeps it a non-decreasing function of `v`. Radicands
/// within round-off of zero also map to `0`.
pub fn z_extended(v: f64, r: f64, mass: f64) -> Result<f64> {
    if r <= 2.0 * mass {
        return Err(Error::Domain { what: "z", r });
    }
    let s2 = 2.0 * mass / r;
    let a = lapse(mass, r);
    let rad = (v - s2.sqrt()) * (v + s2.sqrt()) / a;
    if rad <= 4.0 * f64::EPSILON * (v * v).max(s2) / a {
        return Ok(0.0);
    }
    Ok(Sign::of(v).value() * rad.sqrt())
}

/// Exact solution of the flat Burgers Riemann problem at `ξ = (r − r0)/t`.
pub fn flat_riemann(vl: f64, vr: f64, xi: f64) -> f64 {
    if vl > vr {
        let s = 0.5 * (vl + vr);
        if xi < s {
            vl
        } else {
            vr
        }
    } else if vl < vr {
        xi.clamp(vl, vr)
    } else {
        vl
    }
}

/// A steady solution `v(r) = sign·sqrt(1 − K²(1 − 2M/r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBurgers {
    sign: Sign,
    k: f64,
    mass: f64,
}

impl SteadyBurgers {
    pub fn new(sign: Sign, k: f64, mass: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::config("k", format!("must be non-negative, got {k}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("mass", format!("must be positive, got {mass}")));
        }
        Ok(SteadyBurgers { sign, k, mass })
    }

    /// The branch through `(r0, v0)`; `v0 = 0` selects the `+` branch.
    pub fn from_point(r0: f64, v0: f64, mass: f64) -> Result<Self> {
        if !(r0 > 2.0 * mass) {
            return Err(Error::Domain { what: "steady branch anchor", r: r0 });
        }
        let v0 = clamp_velocity(v0)?;
        let k = ((1.0 - v0) * (1.0 + v0) / lapse(mass, r0)).sqrt();
        SteadyBurgers::new(Sign::of(v0), k, mass)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `r♮ = 2MK²/(K² − 1)` for `K > 1`.
    pub fn vanishing_radius(&self) -> Option<f64> {
        (self.k > 1.0).then(|| 2.0 * self.mass * self.k * self.k / ((self.k - 1.0) * (self.k + 1.0)))
    }

    pub fn contains(&self, r: f64) -> bool {
        r > 2.0 * self.mass && self.vanishing_radius().is_none_or(|rn| r <= rn)
    }

    /// `v²` written to avoid cancellation: `(1 − K)(1 + K) + 2MK²/r`.
    #[inline]
    fn speed_squared(&self, r: f64) -> f64 {
        (1.0 - self.k) * (1.0 + self.k) + self.k * self.k * 2.0 * self.mass / r
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r <= 2.0 * self.mass {
            return Err(Error::Domain { what: "steady Burgers branch", r });
        }
        let w = self.speed_squared(r);
        if w < 0.0 {
            // allow round-off at r♮ itself
            if w > -4.0 * f64::EPSILON {
                return Ok(0.0);
            }
            return Err(Error::Domain { what: "steady Burgers branch", r });
        }
        Ok(self.sign.value() * w.sqrt().min(1.0))
    }

    /// Constant `z` of the branch, defined for `K ≤ 1`.
    pub fn z(&self) -> Option<f64> {
        (self.k <= 1.0).then(|| self.sign.value() * ((1.0 - self.k) * (1.0 + self.k)).sqrt())
    }

    /// Time potential along the branch: `dR/dr = 1/((1 − 2M/r)·v(r))`, so
    /// that `R(r(t)) − R(r(0)) = t` along a characteristic.
    pub fn characteristic_time(&self, r: f64) -> Result<f64> {
        let v = self.eval(r)?;
        if v == 0.0 {
            return Err(Error::Domain { what: "characteristic time (vanishing point)", r });
        }
        Ok(self.sign.value() * potential(self.k, self.mass, r))
    }
}

/// Antiderivative of `1/((1 − 2M/r)·|v|)` on the `K` family, up to a
/// constant depending only on `K`. Valid on the whole branch domain,
/// including `r♮` where it is finite.
pub(crate) fn potential(k: f64, mass: f64, r: f64) -> f64 {
    if k == 0.0 {
        return r + 2.0 * mass * (r - 2.0 * mass).ln();
    }
    let m = mass;
    let k2 = k * k;
    let b = (1.0 - k) * (1.0 + k);
    // gap = u² − b = 2MK²/r, kept exact for large r
    let gap = 2.0 * m * k2 / r;
    let u = (b + gap).max(0.0).sqrt();
    let a = lapse(m, r);
    let g = if k < 1.0 && b >= 1e-2 {
        let beta = b.sqrt();
        let l = r.ln() + 2.0 * (u + beta).ln();
        u.ln_1p() - 0.5 * a.ln() - l / (2.0 * beta) - u * r / (4.0 * m * b) + k2 / (4.0 * beta * beta * beta) * l
    } else {
        // J1 = ∫du/(u² − b) with the series-consistent constant and
        // H = (J1 + u/(u² − b))/b, regular as b → 0
        let c = b / (u * u);
        let (j1, h) = if u > 0.0 && c.abs() < 0.1 {
            let mut j1s = 0.0;
            let mut hs = 0.0;
            let mut cn = 1.0;
            for n in 0..40 {
                let nf = n as f64;
                j1s += cn / (2.0 * nf + 1.0);
                hs += cn * 2.0 * (nf + 1.0) / (2.0 * nf + 3.0);
                if cn.abs() < 1e-18 {
                    break;
                }
                cn *= c;
            }
            (-j1s / u, hs / (u * u * u))
        } else {
            let j1 = if b > 0.0 {
                let beta = b.sqrt();
                // atanh(β/u)/β with 1 − β/u computed from the exact gap
                let num = u + beta;
                let den = gap / (u + beta);
                -0.5 / beta * (num / den).ln()
            } else if b < 0.0 {
                let gamma = (-b).sqrt();
                -(gamma / u).atan() / gamma
            } else {
                -1.0 / u
            };
            (j1, (j1 + u / gap) / b)
        };
        u.ln_1p() - 0.5 * a.ln() + j1 - 0.5 * k2 * h
    };
    -4.0 * m * g
}

/// A standing shock joining `(+, K)` on the left to `(−, K)` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyShockBurgers {
    pub left: SteadyBurgers,
    pub right: SteadyBurgers,
    pub r0: f64,
}

impl SteadyShockBurgers {
    pub fn new(k: f64, r0: f64, mass: f64) -> Result<Self> {
        let left = SteadyBurgers::new(Sign::Plus, k, mass)?;
        let right = SteadyBurgers::new(Sign::Minus, k, mass)?;
        let vl = left.eval(r0)?;
        if vl <= 0.0 {
            return Err(Error::InadmissibleShock(format!("left state {vl} at r0 = {r0} is not above the right state")));
        }
        Ok(SteadyShockBurgers { left, right, r0 })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < self.r0 {
            self.left.eval(r)
        } else {
            self.right.eval(r)
        }
    }
}
