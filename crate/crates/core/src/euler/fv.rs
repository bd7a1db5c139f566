//! Well-balanced Lax–Friedrichs scheme with steady interface reconstruction.
//!
//! Snapshots hold conserved pairs `(U⁰, U¹)` per cell.

use super::model::{eigenvalues, flat_flux, to_conserved, to_primitive, EulerConserved, EulerParams, EulerState, SteadyEuler};
use crate::error::{Error, Result};
use crate::grid::{lapse, FieldSnapshot, Flow, Grid, Observer, Scheme};
use crate::par::Exec;

/// Samples a primitive profile at the cell centres into a conserved snapshot.
pub fn conserved_snapshot(grid: Grid, params: &EulerParams, t: f64, mut f: impl FnMut(f64) -> Result<EulerState>) -> Result<FieldSnapshot> {
    let mut values = Vec::with_capacity(2 * grid.cells());
    for r in grid.centers() {
        let s = f(r)?;
        s.check()?;
        let u = to_conserved(s, params);
        values.extend([u.u0, u.u1]);
    }
    FieldSnapshot::new(grid, t, 2, values)
}

#[inline]
fn conserved_at(state: &FieldSnapshot, j: usize) -> EulerConserved {
    let c = state.cell(j);
    EulerConserved { u0: c[0], u1: c[1] }
}

/// Primitive states of every cell.
pub fn primitives(state: &FieldSnapshot, params: &EulerParams) -> Result<Vec<EulerState>> {
    (0..state.grid.cells())
        .map(|j| to_primitive(conserved_at(state, j), params).map_err(|e| Error::Scheme { cell: j, reason: e.to_string() }))
        .collect()
}

/// Steady extension of one cell state to `r`, or the cell state itself
/// when the branch does not reach `r`.
pub fn extend_or_keep(params: &EulerParams, r_cell: f64, cell: EulerState, r: f64) -> EulerState {
    SteadyEuler::new(*params, r_cell, cell).and_then(|b| b.extend(r)).unwrap_or(cell)
}

/// States just left and right of the face at `r_face`.
pub fn reconstruct_interface(
    cell_l: EulerState,
    r_l: f64,
    cell_r: EulerState,
    r_r: f64,
    params: &EulerParams,
    r_face: f64,
) -> (EulerState, EulerState) {
    (extend_or_keep(params, r_l, cell_l, r_face), extend_or_keep(params, r_r, cell_r, r_face))
}

/// `(1 − 2M/r)·[(F(U_L) + F(U_R))/2 − (U_R − U_L)/(2λ)]`, `λ = Δr/Δt`.
pub fn lf_flux(ul: EulerState, ur: EulerState, params: &EulerParams, lambda: f64, r: f64) -> [f64; 2] {
    let a = lapse(params.mass(), r);
    let (fl, fr) = (flat_flux(ul, params), flat_flux(ur, params));
    let (cl, cr) = (to_conserved(ul, params), to_conserved(ur, params));
    let diss = [(cr.u0 - cl.u0) / (2.0 * lambda), (cr.u1 - cl.u1) / (2.0 * lambda)];
    [a * (0.5 * (fl[0] + fr[0]) - diss[0]), a * (0.5 * (fl[1] + fr[1]) - diss[1])]
}

/// Reconstructed states on both sides of every face, `J + 1` of each.
/// The outer faces see the boundary cell's own extension on both sides.
#[derive(Debug, Clone)]
pub struct Interfaces {
    pub minus: Vec<EulerState>,
    pub plus: Vec<EulerState>,
}

pub fn reconstruct(state: &FieldSnapshot, params: &EulerParams, exec: Exec) -> Result<Interfaces> {
    let prims = primitives(state, params)?;
    let grid = state.grid;
    let n = grid.cells();
    let ext = exec.map(n, |j| {
        let rj = grid.center(j);
        (extend_or_keep(params, rj, prims[j], grid.face(j)), extend_or_keep(params, rj, prims[j], grid.face(j + 1)))
    });
    let minus = (0..=n).map(|f| if f == 0 { ext[0].0 } else { ext[f - 1].1 }).collect();
    let plus = (0..=n).map(|f| if f == n { ext[n - 1].1 } else { ext[f].0 }).collect();
    Ok(Interfaces { minus, plus })
}

/// `D_f = (1 − 2M/r_f)(F(U_{f+}) − F(U_{f−}))` for every face.
fn flux_jumps(grid: &Grid, params: &EulerParams, ifc: &Interfaces) -> Vec<[f64; 2]> {
    (0..=grid.cells())
        .map(|f| {
            let a = lapse(params.mass(), grid.face(f));
            let (fm, fp) = (flat_flux(ifc.minus[f], params), flat_flux(ifc.plus[f], params));
            [a * (fp[0] - fm[0]), a * (fp[1] - fm[1])]
        })
        .collect()
}

/// `Eⁿ = Σ_j Σ_i |D_{j+1/2} − D_{j−1/2}|`; zero exactly on steady data.
pub fn steadiness_functional(state: &FieldSnapshot, params: &EulerParams, exec: Exec) -> Result<f64> {
    let ifc = reconstruct(state, params, exec)?;
    let d = flux_jumps(&state.grid, params, &ifc);
    Ok(d.windows(2).map(|w| (w[1][0] - w[0][0]).abs() + (w[1][1] - w[0][1]).abs()).sum())
}

/// `Σ_f Σ_i |(1 − 2M/r_f)F^i(U_{f−})|`: the magnitude round-off in `Eⁿ`
/// is measured against.
pub fn flux_scale(state: &FieldSnapshot, params: &EulerParams, exec: Exec) -> Result<f64> {
    let ifc = reconstruct(state, params, exec)?;
    Ok((0..=state.grid.cells())
        .map(|f| {
            let a = lapse(params.mass(), state.grid.face(f));
            let fm = flat_flux(ifc.minus[f], params);
            a * (fm[0].abs() + fm[1].abs())
        })
        .sum())
}

pub fn max_wavespeed_euler(state: &FieldSnapshot, params: &EulerParams) -> Result<f64> {
    let prims = primitives(state, params)?;
    Ok(prims
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let (lm, lp) = eigenvalues(*s, params, state.grid.center(j));
            lm.abs().max(lp.abs())
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy)]
pub struct EulerFv {
    pub params: EulerParams,
    pub exec: Exec,
}

impl EulerFv {
    pub fn new(params: EulerParams) -> Self {
        EulerFv { params, exec: Exec::default() }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

/// Speed bound for step control. The dissipation `(U_R − U_L)Δt/(2Δr)` is
/// stable only while `(Δt/Δr)²·(1 − 2M/r) ≤ 1`, so slow flows are bounded
/// by `sqrt(max lapse)` instead of their characteristic speeds.
pub fn stable_speed_bound(state: &FieldSnapshot, params: &EulerParams) -> Result<f64> {
    let a_max = lapse(params.mass(), state.grid.r_max());
    Ok(max_wavespeed_euler(state, params)?.max(a_max.sqrt()))
}

impl Scheme for EulerFv {
    fn max_wavespeed(&self, state: &FieldSnapshot) -> Result<f64> {
        stable_speed_bound(state, &self.params)
    }

    fn step(&mut self, state: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        if state.components != 2 {
            return Err(Error::Usage(format!("Euler snapshots carry 2 components, got {}", state.components)));
        }
        let grid = state.grid;
        let n = grid.cells();
        let p = &self.params;
        let dr = grid.dr();
        let lambda = dr / dt;
        let ifc = reconstruct(state, p, self.exec)?;
        // (numerical flux, aF(U_{f−}), aF(U_{f+})) per face
        let faces: Vec<[[f64; 2]; 3]> = self.exec.map(n + 1, |f| {
            let r = grid.face(f);
            let a = lapse(p.mass(), r);
            let num = if a > 0.0 { lf_flux(ifc.minus[f], ifc.plus[f], p, lambda, r) } else { [0.0, 0.0] };
            let fm = flat_flux(ifc.minus[f], p);
            let fp = flat_flux(ifc.plus[f], p);
            [num, [a * fm[0], a * fm[1]], [a * fp[0], a * fp[1]]]
        });
        let values = self.exec.try_map(n, |j| {
            let u = conserved_at(state, j);
            let (fl, fr) = (faces[j][0], faces[j + 1][0]);
            // S_j = [aF(U_{j+1/2−}) − aF(U_{j−1/2+})]/Δr
            let src = [(faces[j + 1][1][0] - faces[j][2][0]) / dr, (faces[j + 1][1][1] - faces[j][2][1]) / dr];
            let next =
                EulerConserved { u0: u.u0 - dt / dr * (fr[0] - fl[0]) + dt * src[0], u1: u.u1 - dt / dr * (fr[1] - fl[1]) + dt * src[1] };
            to_primitive(next, p).map_err(|e| Error::Scheme { cell: j, reason: e.to_string() })?;
            Ok::<_, Error>([next.u0, next.u1])
        })?;
        FieldSnapshot::new(grid, state.t + dt, 2, values.into_iter().flatten().collect())
    }
}

/// Records `Eⁿ` each step and flags the first time it has stayed below
/// `factor·(E⁰ + floor)` for `sustain` consecutive steps.
///
/// The floor is fixed at step 0 so that `factor·floor` equals
/// `ulps·ε·flux_scale`, a round-off level for `Eⁿ`.
#[derive(Debug, Clone)]
pub struct SteadinessMonitor {
    pub params: EulerParams,
    pub exec: Exec,
    pub factor: f64,
    pub ulps: f64,
    pub sustain: usize,
    /// Stop the run once steady.
    pub halt_when_steady: bool,
    pub series: Vec<(f64, f64)>,
    pub steady_since: Option<f64>,
    threshold: f64,
    run: usize,
    candidate: f64,
}

impl SteadinessMonitor {
    pub fn new(params: EulerParams) -> Self {
        SteadinessMonitor {
            params,
            exec: Exec::default(),
            factor: 1e-8,
            ulps: 1e3,
            sustain: 100,
            halt_when_steady: false,
            series: Vec::new(),
            steady_since: None,
            threshold: f64::NAN,
            run: 0,
            candidate: f64::NAN,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Observer for SteadinessMonitor {
    fn observe(&mut self, step: usize, _dt: f64, state: &FieldSnapshot) -> Result<Flow> {
        let e = steadiness_functional(state, &self.params, self.exec)?;
        if step == 0 {
            let floor = self.ulps * f64::EPSILON * flux_scale(state, &self.params, self.exec)? / self.factor;
            self.threshold = self.factor * (e + floor);
        }
        self.series.push((state.t, e));
        if e < self.threshold {
            if self.run == 0 {
                self.candidate = state.t;
            }
            self.run += 1;
            if self.run >= self.sustain {
                self.steady_since = Some(self.candidate);
                if self.halt_when_steady {
                    return Ok(Flow::Halt);
                }
            }
        } else {
            self.run = 0;
            self.steady_since = None;
        }
        Ok(Flow::Continue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::model::{euler_source, SteadyShockEuler};

    fn p(k: f64) -> EulerParams {
        EulerParams::new(k, 1.0).unwrap()
    }

    #[test]
    fn lf_examples() {
        let pr = p(0.5);
        let s = EulerState { rho: 1.0, v: 0.5 };
        let f = lf_flux(s, s, &pr, 0.3, 4.0);
        let e = crate::euler::model::euler_flux(s, &pr, 4.0);
        assert_eq!(f, e);
        let z = EulerState { rho: 1.0, v: 0.0 };
        let f = lf_flux(s, z, &pr, 1e300, 4.0);
        assert!((f[0] - 0.5 * 0.833333 / 2.0).abs() < 1e-6);
        let lambda = 0.25;
        let f = lf_flux(s, z, &pr, lambda, 4.0);
        let (ul, ur) = (to_conserved(s, &pr), to_conserved(z, &pr));
        let want0 = 0.5 * ((5.0 / 6.0) / 2.0 - (ur.u0 - ul.u0) / (2.0 * lambda));
        let want1 = 0.5 * ((2.0 / 3.0 + 0.25) / 2.0 - (ur.u1 - ul.u1) / (2.0 * lambda));
        assert!((f[0] - want0).abs() < 1e-15 && (f[1] - want1).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_on_one_branch_agrees() {
        let pr = p(0.2);
        let b = SteadyEuler::new(pr, 10.0, EulerState { rho: 1.0, v: 0.6 }).unwrap();
        let (sl, sr) = (b.extend(5.0).unwrap(), b.extend(5.02).unwrap());
        let (l, r) = reconstruct_interface(sl, 5.0, sr, 5.02, &pr, 5.01);
        assert!((l.rho - r.rho).abs() < 1e-10 && (l.v - r.v).abs() < 1e-10);
        // a sonic anchor has no extension
        let c = EulerState { rho: 1.0, v: 0.2 };
        let (l, _) = reconstruct_interface(c, 5.0, sr, 5.02, &pr, 5.01);
        assert_eq!(l, c);
    }

    fn max_rel_change(a: &FieldSnapshot, b: &FieldSnapshot) -> f64 {
        a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs() / x.abs().max(1e-300)).fold(0.0, f64::max)
    }

    #[test]
    fn steady_branches_are_fixed_points() {
        for (k, v10) in [(0.2, 0.6), (0.2, -0.8), (0.5, 0.1), (0.5, -0.05)] {
            let pr = p(k);
            let grid = Grid::new(1.0, 2.0, 10.0, 200).unwrap();
            let b = SteadyEuler::new(pr, 10.0, EulerState { rho: 1.0, v: v10 }).unwrap();
            let s = conserved_snapshot(grid, &pr, 0.0, |r| b.extend(r)).unwrap();
            let mut fv = EulerFv::new(pr);
            let dt = 0.5 * grid.dr() / fv.max_wavespeed(&s).unwrap();
            let next = fv.step(&s, dt).unwrap();
            assert!(max_rel_change(&s, &next) < 1e-12, "k={k} v={v10}: {}", max_rel_change(&s, &next));
            let e = steadiness_functional(&s, &pr, Exec::Sequential).unwrap();
            let scale = flux_scale(&s, &pr, Exec::Sequential).unwrap();
            assert!(e < 1e-14 * scale.max(100.0), "k={k} v={v10}: E = {e}, scale = {scale}");
        }
    }

    #[test]
    fn steady_shock_has_zero_functional() {
        let pr = p(0.25);
        let grid = Grid::new(1.0, 2.0, 10.0, 200).unwrap();
        let sh = SteadyShockEuler::new(pr, 6.0, EulerState { rho: 1.0, v: 0.8 }).unwrap();
        let s = conserved_snapshot(grid, &pr, 0.0, |r| sh.extend(r)).unwrap();
        assert!(steadiness_functional(&s, &pr, Exec::Sequential).unwrap() < 1e-12);
    }

    #[test]
    fn generic_data_has_positive_functional() {
        let pr = p(0.5);
        let grid = Grid::new(1.0, 2.0, 10.0, 50).unwrap();
        let s = conserved_snapshot(grid, &pr, 0.0, |r| Ok(EulerState { rho: if r < 6.0 { 2.0 } else { 1.0 }, v: 0.05 })).unwrap();
        assert!(steadiness_functional(&s, &pr, Exec::Sequential).unwrap() > 1e-3);
    }

    #[test]
    fn wavespeed_examples() {
        let pr = p(0.5);
        let grid = Grid::new(1.0, 2.0, 10.0, 40).unwrap();
        let s = conserved_snapshot(grid, &pr, 0.0, |_| Ok(EulerState { rho: 1.0, v: 0.0 })).unwrap();
        let want = grid.centers().iter().map(|&r| 0.5 * lapse(1.0, r)).fold(0.0, f64::max);
        assert!((max_wavespeed_euler(&s, &pr).unwrap() - want).abs() < 1e-15);
        let s = conserved_snapshot(grid, &pr, 0.0, |_| Ok(EulerState { rho: 1.0, v: 0.99 })).unwrap();
        assert!(max_wavespeed_euler(&s, &pr).unwrap() < 1.0);
    }

    /// Plain Lax–Friedrichs on cell averages with a pointwise source.
    fn naive_step(s: &FieldSnapshot, pr: &EulerParams, dt: f64) -> Vec<f64> {
        let g = s.grid;
        let n = g.cells();
        let prims = primitives(s, pr).unwrap();
        let lambda = g.dr() / dt;
        let flux = |f: usize| {
            let l = prims[f.saturating_sub(1)];
            let r = prims[f.min(n - 1)];
            lf_flux(l, r, pr, lambda, g.face(f))
        };
        let mut out = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let (fl, fr) = (flux(j), flux(j + 1));
            let src = euler_source(prims[j], pr, g.center(j));
            for i in 0..2 {
                out.push(s.cell(j)[i] - dt / g.dr() * (fr[i] - fl[i]) + dt * src[i]);
            }
        }
        out
    }

    #[test]
    fn close_to_plain_lax_friedrichs_in_the_interior() {
        // the two updates differ by O(Δt·Δr) per step away from the boundary
        let pr = EulerParams::new(0.5, 1e-9).unwrap();
        let mut errs = Vec::new();
        for cells in [40, 80, 160] {
            let grid = Grid::new(1e-9, 1.0, 3.0, cells).unwrap();
            let s = conserved_snapshot(grid, &pr, 0.0, |r| Ok(EulerState { rho: 1.0 + 0.1 * r, v: 0.1 })).unwrap();
            let dt = 0.2 * grid.dr();
            let a = EulerFv::new(pr).with_exec(Exec::Sequential).step(&s, dt).unwrap();
            let b = naive_step(&s, &pr, dt);
            let e = (2..2 * cells - 2).map(|i| (a.values[i] - b[i]).abs()).fold(0.0, f64::max) / dt;
            errs.push(e);
        }
        assert!(errs[1] < 0.6 * errs[0] && errs[2] < 0.6 * errs[1], "{errs:?}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let pr = p(0.5);
        let grid = Grid::new(1.0, 2.0, 10.0, 300).unwrap();
        let s =
            conserved_snapshot(grid, &pr, 0.0, |r| Ok(EulerState { rho: 1.0 + 0.5 * (r - 6.0).tanh(), v: 0.1 * (r - 4.0).sin() })).unwrap();
        let a = EulerFv::new(pr).with_exec(Exec::Sequential).step(&s, 0.005).unwrap();
        let b = EulerFv::new(pr).with_exec(Exec::Parallel).step(&s, 0.005).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slow_subsonic_branch_is_stable() {
        // slow enough that the eigenvalue bound alone would allow (Δt/Δr)² > 1
        let pr = p(0.5);
        let grid = Grid::new(1.0, 2.0, 10.0, 100).unwrap();
        let b = SteadyEuler::new(pr, 10.0, EulerState { rho: 1.0, v: -0.05 }).unwrap();
        let s0 = conserved_snapshot(grid, &pr, 0.0, |r| b.extend(r)).unwrap();
        let mut fv = EulerFv::new(pr);
        let mut s = s0.clone();
        for _ in 0..200 {
            let dt = 0.5 * grid.dr() / fv.max_wavespeed(&s).unwrap();
            s = fv.step(&s, dt).unwrap();
        }
        assert!(max_rel_change(&s0, &s) < 1e-12);
    }

    #[test]
    fn monitor_detects_steady() {
        let pr = p(0.2);
        let grid = Grid::new(1.0, 2.0, 10.0, 50).unwrap();
        let b = SteadyEuler::new(pr, 10.0, EulerState { rho: 1.0, v: 0.6 }).unwrap();
        let s = conserved_snapshot(grid, &pr, 0.0, |r| b.extend(r)).unwrap();
        let mut m = SteadinessMonitor::new(pr);
        m.sustain = 3;
        for step in 0..3 {
            m.observe(step, 0.1, &s).unwrap();
        }
        assert_eq!(m.steady_since, Some(0.0));
    }
}
