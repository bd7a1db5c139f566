//! Exact generalized Riemann problem: two steady branches separated by a
//! jump at `r0`.

use super::model::{potential, Sign, SteadyBurgers};
use crate::error::{Error, Result};
use crate::grid::lapse;
use crate::numerics::{brent, integrate, OdeTol};

/// Initial data of a generalized Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrpData {
    pub left: SteadyBurgers,
    pub right: SteadyBurgers,
    pub r0: f64,
    vl0: f64,
    vr0: f64,
}

impl GrpData {
    pub fn new(left: SteadyBurgers, right: SteadyBurgers, r0: f64) -> Result<Self> {
        if left.mass() != right.mass() {
            return Err(Error::Usage("branches have different masses".into()));
        }
        let vl0 = left.eval(r0)?;
        let vr0 = right.eval(r0)?;
        Ok(GrpData { left, right, r0, vl0, vr0 })
    }

    pub fn mass(&self) -> f64 {
        self.left.mass()
    }
    /// `v_L(r0)`.
    pub fn left_state(&self) -> f64 {
        self.vl0
    }
    /// `v_R(r0)`.
    pub fn right_state(&self) -> f64 {
        self.vr0
    }
    /// The initial condition.
    pub fn initial(&self, r: f64) -> Result<f64> {
        if r < self.r0 {
            self.left.eval(r)
        } else {
            self.right.eval(r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Trivial,
}

pub fn classify(data: &GrpData) -> WaveKind {
    if data.vl0 > data.vr0 {
        WaveKind::Shock
    } else if data.vl0 < data.vr0 {
        WaveKind::Rarefaction
    } else {
        WaveKind::Trivial
    }
}

/// Rankine–Hugoniot speed `(1 − 2M/r)(v_L(r) + v_R(r))/2` of a shock at `r`.
pub fn shock_speed(data: &GrpData, r: f64) -> Result<f64> {
    let vl = data.left.eval(r)?;
    let vr = data.right.eval(r)?;
    Ok(lapse(data.mass(), r) * 0.5 * (vl + vr))
}

/// Shock position at time `t`, from the Rankine–Hugoniot ODE.
pub fn shock_trajectory(data: &GrpData, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Usage(format!("negative time {t}")));
    }
    if t == 0.0 || is_standing(data) {
        return Ok(data.r0);
    }
    let tol = OdeTol { rtol: 1e-12, atol: 1e-13 };
    let m = data.mass();
    let y = integrate(
        |_, y: &[f64; 1]| {
            if y[0] <= 2.0 * m {
                return Err(Error::Domain { what: "shock trajectory", r: y[0] });
            }
            Ok([shock_speed(data, y[0])?])
        },
        0.0,
        [data.r0],
        t,
        tol,
    )?;
    Ok(y[0])
}

fn is_standing(data: &GrpData) -> bool {
    data.left.sign() != data.right.sign() && data.left.k() == data.right.k()
}

/// Shock position from the averaged potential
/// `½(R_L + R_R)(r_s) − ½(R_L + R_R)(r0) = t`.
///
/// Kept as a cross-check of [`shock_trajectory`]: the two agree to first
/// order in the jump size, not exactly.
pub fn shock_trajectory_averaged(data: &GrpData, t: f64) -> Result<f64> {
    if data.left.sign() != data.right.sign() {
        return Err(Error::Usage("averaged potential needs branches of one sign".into()));
    }
    if t == 0.0 {
        return Ok(data.r0);
    }
    let m = data.mass();
    let avg = |r: f64| -> Result<f64> {
        let l = data.left.sign().value() * potential(data.left.k(), m, r);
        let rr = data.right.sign().value() * potential(data.right.k(), m, r);
        Ok(0.5 * (l + rr))
    };
    let base = avg(data.r0)?;
    let dir = data.left.sign();
    let f = |r: f64| Ok(avg(r)? - base - t);
    let (lo, hi) = march_bracket(data, dir, &f, t)?;
    brent(f, lo, hi, 1e-13)
}

/// Finds a bracket for a characteristic leaving `r0` in direction `dir`.
fn march_bracket<F>(data: &GrpData, dir: Sign, f: &F, t: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = data.mass();
    let r0 = data.r0;
    match dir {
        Sign::Plus => {
            // speeds never exceed 1
            let mut hi = r0 + t;
            let limit = data.left.vanishing_radius().unwrap_or(f64::INFINITY).min(data.right.vanishing_radius().unwrap_or(f64::INFINITY));
            if hi > limit {
                hi = limit;
            }
            if f(hi)? < 0.0 {
                return Err(Error::Truncated { exit_time: f64::NAN, r: hi });
            }
            Ok((r0, hi))
        }
        Sign::Minus => {
            let mut gap = r0 - 2.0 * m;
            for _ in 0..2000 {
                gap *= 0.5;
                let lo = 2.0 * m + gap;
                if lo <= 2.0 * m {
                    break;
                }
                if f(lo)? >= 0.0 {
                    return Ok((lo, r0));
                }
            }
            Err(Error::Truncated { exit_time: f64::NAN, r: 2.0 * m })
        }
    }
}

/// Position at time `t` of the characteristic leaving `r0` along `branch`.
pub fn characteristic_position(branch: &SteadyBurgers, r0: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(r0);
    }
    let v0 = branch.eval(r0)?;
    if v0 == 0.0 {
        return Err(Error::Truncated { exit_time: 0.0, r: r0 });
    }
    let m = branch.mass();
    let k = branch.k();
    let s = branch.sign().value();
    let p0 = potential(k, m, r0);
    let f = |r: f64| Ok(s * (potential(k, m, r) - p0) - t);
    let data = GrpData::new(*branch, *branch, r0)?;
    let (lo, hi) = march_bracket(&data, branch.sign(), &f, t).map_err(|e| match e {
        Error::Truncated { r, .. } => Error::Truncated { exit_time: s * (potential(k, m, r) - p0), r },
        e => e,
    })?;
    brent(f, lo, hi, 1e-13 * r0)
}

/// Edges `(r_L(t), r_R(t))` of a rarefaction fan.
pub fn rarefaction_edges(data: &GrpData, t: f64) -> Result<(f64, f64)> {
    let rl = characteristic_position(&data.left, data.r0, t)?;
    let rr = characteristic_position(&data.right, data.r0, t)?;
    Ok((rl.min(rr), rr.max(rl)))
}

/// Value inside the fan, `sgn(r − r0)·sqrt(1 − K²(1 − 2M/r))` with `K`
/// selected by the travel time from `r0`.
///
/// In a transonic fan the points next to `r0` that no characteristic from
/// `r0` reaches directly (characteristics with `v ≈ 0` stall and turn) get
/// the stalled value `0`.
pub fn rarefaction_interior(data: &GrpData, t: f64, r: f64) -> Result<f64> {
    let m = data.mass();
    let r0 = data.r0;
    if t <= 0.0 {
        return data.initial(r);
    }
    let transonic = data.vl0 < 0.0 && data.vr0 > 0.0;
    if r == r0 {
        return if transonic { Ok(0.0) } else { Err(Error::Root(format!("r = r0 = {r0} lies outside a non-transonic fan"))) };
    }
    let sf = if r > r0 { 1.0 } else { -1.0 };
    let kmax = 1.0 / lapse(m, r.max(r0)).sqrt();
    let travel = |k: f64| -> Result<f64> { Ok(sf * (potential(k, m, r) - potential(k, m, r0)) - t) };

    let (kl, kr) = (data.left.k(), data.right.k());
    let mut lo = kl.min(kr).min(kmax);
    let mut hi = kl.max(kr).min(kmax);
    let mut flo = travel(lo)?;
    let mut fhi = travel(hi)?;
    let mut widen = 0;
    while flo > 0.0 && lo > 0.0 {
        lo = if lo < 1e-8 { 0.0 } else { lo * 0.5 };
        flo = travel(lo)?;
        widen += 1;
        if widen > 200 {
            break;
        }
    }
    while fhi < 0.0 && hi < kmax {
        hi = (hi * 1.5 + 1e-3).min(kmax);
        fhi = travel(hi)?;
    }
    if fhi < 0.0 {
        if transonic {
            return Ok(0.0);
        }
        return Err(Error::Root(format!("no fan characteristic reaches (t = {t}, r = {r})")));
    }
    if flo > 0.0 {
        return Err(Error::Root(format!("fan bracket failed at (t = {t}, r = {r})")));
    }
    let k = brent(travel, lo, hi, 1e-14)?;
    let branch = SteadyBurgers::new(if sf > 0.0 { Sign::Plus } else { Sign::Minus }, k, m)?;
    branch.eval(r)
}

/// Closed-form solution of one generalized Riemann problem.
#[derive(Debug, Clone, Copy)]
pub struct GrpSolution {
    pub data: GrpData,
    pub kind: WaveKind,
}

impl GrpSolution {
    pub fn new(data: GrpData) -> Self {
        GrpSolution { data, kind: classify(&data) }
    }

    /// Edges of the wave region at time `t` (equal for a shock).
    pub fn edges(&self, t: f64) -> Result<(f64, f64)> {
        match self.kind {
            WaveKind::Trivial => Ok((self.data.r0, self.data.r0)),
            WaveKind::Shock => {
                let r = shock_trajectory(&self.data, t)?;
                Ok((r, r))
            }
            WaveKind::Rarefaction => rarefaction_edges(&self.data, t),
        }
    }

    /// Which part of the solution covers `(t, r)`.
    pub fn locate(&self, t: f64, r: f64) -> Result<Region> {
        let d = &self.data;
        let side = |left: bool| Ok(if left { Region::Left } else { Region::Right });
        if t == 0.0 {
            return side(r < d.r0);
        }
        match self.kind {
            WaveKind::Trivial => side(r < d.r0),
            WaveKind::Shock => {
                if is_standing(d) {
                    return side(r < d.r0);
                }
                // the shock is monotone, so the side it leaves behind needs no trajectory
                let s0 = shock_speed(d, d.r0)?;
                if s0 > 0.0 && r <= d.r0 {
                    return side(true);
                }
                if s0 < 0.0 && r >= d.r0 {
                    return side(false);
                }
                side(r < shock_trajectory(d, t)?)
            }
            WaveKind::Rarefaction => {
                let (rl, rr) = rarefaction_edges(d, t)?;
                if r <= rl {
                    side(true)
                } else if r >= rr {
                    side(false)
                } else {
                    Ok(Region::Fan(rarefaction_interior(d, t, r)?))
                }
            }
        }
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        match self.locate(t, r)? {
            Region::Left => self.data.left.eval(r),
            Region::Right => self.data.right.eval(r),
            Region::Fan(v) => Ok(v),
        }
    }
}

/// Part of a generalized Riemann solution: one of the two steady branches
/// or a value inside the rarefaction fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Left,
    Right,
    Fan(f64),
}
