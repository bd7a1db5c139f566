//! Initial data and reference profiles for scenarios.

use super::config::{InitialData, Model, Scenario};
use crate::burgers::grp::GrpData;
use crate::burgers::{Sign, SteadyBurgers, SteadyShockBurgers};
use crate::error::{Error, Result};
use crate::euler::fv::conserved_snapshot;
use crate::euler::{EulerState, SteadyEuler, SteadyShockEuler};
use crate::grid::{lapse, FieldSnapshot};

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let g = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    let (a, b) = (g(x), g(1.0 - x));
    a / (a + b)
}

/// Inverse of `z = sgn(v)·sqrt((v² − 1)/(1 − 2M/r) + 1)`.
pub fn v_of_z(z: f64, r: f64, mass: f64) -> Result<f64> {
    if !(z.abs() <= 1.0) {
        return Err(Error::Domain { what: "z in [-1, 1]", r });
    }
    let a = lapse(mass, r);
    Ok(z.signum() * (1.0 - a * (1.0 - z * z)).sqrt())
}

/// Unperturbed profile as a function of `r`.
fn burgers_profile(init: &InitialData, mass: f64, r_min: f64, r_max: f64) -> Result<Box<dyn Fn(f64) -> Result<f64>>> {
    Ok(match init {
        InitialData::BurgersSteady { branch } => {
            let b = branch.build(mass)?;
            Box::new(move |r| b.eval(r))
        }
        InitialData::BurgersSteadyShock { k, shock_radius } => {
            let s = SteadyShockBurgers::new(*k, *shock_radius, mass)?;
            Box::new(move |r| s.eval(r))
        }
        InitialData::BurgersGrp { left, right, r0 } => {
            let d = GrpData::new(left.build(mass)?, right.build(mass)?, *r0)?;
            Box::new(move |r| d.initial(r))
        }
        &InitialData::BurgersGeneral { v_horizon, v_infinity, center, width } => {
            for (field, v) in [("initial.v_horizon", v_horizon), ("initial.v_infinity", v_infinity)] {
                if !(v.abs() <= 1.0) {
                    return Err(Error::config(field, format!("must lie in [-1, 1], got {v}")));
                }
            }
            if !(width > 0.0) {
                return Err(Error::config("initial.width", "must be positive"));
            }
            // far field on the steady branch whose limit at infinity is v_infinity
            let sign = if v_infinity > 0.0 { Sign::Plus } else { Sign::Minus };
            let far = SteadyBurgers::new(sign, (1.0 - v_infinity * v_infinity).sqrt(), mass)?;
            Box::new(move |r| {
                let s = smooth_step((r - (center - width)) / (2.0 * width));
                Ok(far.eval(r)? * s + v_horizon * (1.0 - s))
            })
        }
        InitialData::BurgersPiecewiseZ { z } => {
            if z.is_empty() {
                return Err(Error::config("initial.z", "needs at least one piece"));
            }
            let z = z.clone();
            let width = (r_max - r_min) / z.len() as f64;
            Box::new(move |r| {
                let i = (((r - r_min) / width) as usize).min(z.len() - 1);
                v_of_z(z[i], r, mass)
            })
        }
        _ => return Err(Error::config("initial.kind", "not a Burgers recipe")),
    })
}

fn euler_profile(s: &Scenario) -> Result<Box<dyn Fn(f64) -> Result<EulerState>>> {
    let p = s.euler_params()?;
    Ok(match &s.initial {
        InitialData::EulerSteady { r0, anchor } => {
            let b = SteadyEuler::new(p, *r0, anchor.state()?)?;
            Box::new(move |r| b.extend(r))
        }
        InitialData::EulerSteadyShock { r0, left } => {
            let sh = SteadyShockEuler::new(p, *r0, left.state()?)?;
            Box::new(move |r| sh.extend(r))
        }
        InitialData::EulerGrp { r0, left, right } => {
            let l = SteadyEuler::new(p, *r0, left.state()?)?;
            let rt = SteadyEuler::new(p, *r0, right.state()?)?;
            let r0 = *r0;
            Box::new(move |r| if r < r0 { l.extend(r) } else { rt.extend(r) })
        }
        _ => return Err(Error::config("initial.kind", "not an Euler recipe")),
    })
}

fn sample(s: &Scenario, perturbed: bool) -> Result<FieldSnapshot> {
    let grid = s.grid()?;
    let pert = if perturbed { s.perturbation } else { None };
    let bad = |r: f64, e: Error| Error::config("initial", format!("no admissible value at r = {r}: {e}"));
    match s.model {
        Model::Burgers => {
            let f = burgers_profile(&s.initial, grid.mass(), grid.r_min(), grid.r_max())?;
            FieldSnapshot::from_fn(grid, 0.0, |r| {
                let mut v = f(r).map_err(|e| bad(r, e))?;
                if let Some(p) = &pert {
                    v += p.amplitude * p.profile(r);
                }
                if !(v.abs() <= 1.0) {
                    return Err(Error::config("perturbation.amplitude", format!("v = {v} at r = {r} leaves [-1, 1]")));
                }
                Ok(v)
            })
        }
        Model::Euler => {
            let p = s.euler_params()?;
            let f = euler_profile(s)?;
            conserved_snapshot(grid, &p, 0.0, |r| {
                let mut st = f(r).map_err(|e| bad(r, e))?;
                if let Some(q) = &pert {
                    let phi = q.profile(r);
                    st = EulerState { rho: st.rho + q.density_amplitude * phi, v: st.v + q.amplitude * phi };
                }
                st.check().map_err(|e| Error::config("perturbation", format!("inadmissible state at r = {r}: {e}")))?;
                Ok(st)
            })
        }
    }
}

/// Cell averages at `t = 0`, sampled at the cell centres.
pub fn build_initial(s: &Scenario) -> Result<FieldSnapshot> {
    s.validate()?;
    sample(s, true)
}

/// The unperturbed steady profile, for recipes that have one.
pub fn reference(s: &Scenario) -> Result<Option<FieldSnapshot>> {
    match s.initial {
        InitialData::BurgersSteady { .. }
        | InitialData::BurgersSteadyShock { .. }
        | InitialData::EulerSteady { .. }
        | InitialData::EulerSteadyShock { .. } => sample(s, false).map(Some),
        _ => Ok(None),
    }
}
