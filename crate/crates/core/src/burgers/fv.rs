//! First- and second-order well-balanced finite volume schemes.

use super::model::{clamp_velocity, flat_riemann, geometric_source, Sign, SteadyBurgers};
use crate::error::{Error, Result};
use crate::grid::{lapse, FieldSnapshot, Scheme};
use crate::par::Exec;
use serde::{Deserialize, Serialize};

/// Ghost-cell treatment at one end of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Riemann problem against `+1` (left) or `−1` (right).
    LightSpeed,
    /// Continue the boundary cell's steady branch into the ghost cell.
    SteadyExtension,
    /// Copy the boundary cell.
    ZeroGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersFvConfig {
    pub order: Order,
    pub safety: f64,
    pub left: BoundaryKind,
    pub right: BoundaryKind,
}

impl BurgersFvConfig {
    pub fn new(order: Order) -> Self {
        BurgersFvConfig { order, safety: 0.5, left: BoundaryKind::LightSpeed, right: BoundaryKind::SteadyExtension }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.safety > 0.0 && self.safety <= 0.5) {
            return Err(Error::config("cfl", format!("safety must lie in (0, 1/2], got {}", self.safety)));
        }
        Ok(())
    }
}

/// Godunov flux `(1 − 2M/r)(q² − 1)/2`, `q` the flat Riemann state at `ξ = 0`.
#[inline]
pub fn interface_flux(r: f64, vl: f64, vr: f64, mass: f64) -> f64 {
    let q = flat_riemann(vl, vr, 0.0);
    lapse(mass, r) * (q * q - 1.0) * 0.5
}

/// Monotonized-central limited slope.
#[inline]
pub fn limited_slope(vm: f64, v: f64, vp: f64) -> f64 {
    let dl = v - vm;
    let dr = vp - v;
    let dc = 0.5 * (vp - vm);
    if dl * dr <= 0.0 {
        return 0.0;
    }
    let mag = (2.0 * dl.abs()).min(2.0 * dr.abs()).min(dc.abs());
    mag.copysign(dc)
}

/// `max_j (1 − 2M/r_j)|V_j|`.
pub fn max_wavespeed_burgers(state: &FieldSnapshot) -> f64 {
    let g = &state.grid;
    state.values.iter().enumerate().map(|(j, v)| g.lapse(g.center(j)) * v.abs()).fold(0.0, f64::max)
}

/// Value of the boundary cell's steady branch at radius `r`; the horizon
/// limit `±1` below `2M`, the cell value where the branch does not reach.
fn extend_branch(r_cell: f64, v_cell: f64, r: f64, mass: f64) -> f64 {
    if r <= 2.0 * mass {
        return Sign::of(v_cell).value();
    }
    SteadyBurgers::from_point(r_cell, v_cell, mass).and_then(|b| b.eval(r)).unwrap_or(v_cell)
}

#[derive(Debug, Clone)]
pub struct BurgersFv {
    pub config: BurgersFvConfig,
    pub exec: Exec,
}

impl BurgersFv {
    pub fn new(config: BurgersFvConfig) -> Result<Self> {
        config.validate()?;
        Ok(BurgersFv { config, exec: Exec::default() })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Ghost values at the cell centres just outside the grid.
    fn ghost_centres(&self, s: &FieldSnapshot) -> (f64, f64) {
        let g = &s.grid;
        let m = g.mass();
        let n = g.cells();
        let (v0, vn) = (s.values[0], s.values[n - 1]);
        let left = match self.config.left {
            BoundaryKind::LightSpeed => 1.0,
            BoundaryKind::ZeroGradient => v0,
            BoundaryKind::SteadyExtension => extend_branch(g.center(0), v0, g.r_min() - 0.5 * g.dr(), m),
        };
        let right = match self.config.right {
            BoundaryKind::LightSpeed => -1.0,
            BoundaryKind::ZeroGradient => vn,
            BoundaryKind::SteadyExtension => extend_branch(g.center(n - 1), vn, g.r_max() + 0.5 * g.dr(), m),
        };
        (left, right)
    }

    pub fn step_order1(&self, s: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        let g = s.grid;
        let n = g.cells();
        let m = g.mass();
        let (gl, gr) = self.ghost_centres(s);
        let v = &s.values;
        let at = |i: usize| -> f64 {
            // i indexes the ghost-padded array
            if i == 0 {
                gl
            } else if i == n + 1 {
                gr
            } else {
                v[i - 1]
            }
        };
        let fluxes = self.exec.map(n + 1, |f| interface_flux(g.face(f), at(f), at(f + 1), m));
        self.finish(s, dt, &fluxes)
    }

    pub fn step_order2(&self, s: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        let g = s.grid;
        let n = g.cells();
        let m = g.mass();
        let dr = g.dr();
        let (gl, gr) = self.ghost_centres(s);
        let v = &s.values;
        let at = |i: usize| -> f64 {
            if i == 0 {
                gl
            } else if i == n + 1 {
                gr
            } else {
                v[i - 1]
            }
        };
        let predict = |vj: f64, rj: f64, slope: f64| {
            // ∂r of the flux includes the lapse derivative, which cancels half the source
            0.5 * dt * (lapse(m, rj) * vj * slope / dr - 0.5 * geometric_source(vj, rj, m))
        };
        // predicted edge states (left edge, right edge) per cell
        let edges: Vec<(f64, f64)> = self.exec.map(n, |j| {
            let slope = limited_slope(at(j), v[j], at(j + 2));
            let pred = predict(v[j], g.center(j), slope);
            let l = (v[j] - 0.5 * slope - pred).clamp(-1.0, 1.0);
            let r = (v[j] + 0.5 * slope - pred).clamp(-1.0, 1.0);
            (l, r)
        });
        // an extended ghost cell is reconstructed like an interior cell, with
        // a second ghost value for its slope
        let ghost_edge = |inner: f64, ghost: f64, r_ghost: f64, outer: f64, sign: f64| {
            let slope = limited_slope(inner, ghost, outer);
            (ghost + sign * 0.5 * slope - predict(ghost, r_ghost, slope)).clamp(-1.0, 1.0)
        };
        let left_face = match self.config.left {
            BoundaryKind::LightSpeed => 1.0,
            BoundaryKind::ZeroGradient => edges[0].0,
            BoundaryKind::SteadyExtension => {
                let rg = g.r_min() - 0.5 * dr;
                let outer = extend_branch(g.center(0), v[0], rg - dr, m);
                ghost_edge(outer, gl, rg, v[0], 1.0)
            }
        };
        let right_face = match self.config.right {
            BoundaryKind::LightSpeed => -1.0,
            BoundaryKind::ZeroGradient => edges[n - 1].1,
            BoundaryKind::SteadyExtension => {
                let rg = g.r_max() + 0.5 * dr;
                let outer = extend_branch(g.center(n - 1), v[n - 1], rg + dr, m);
                ghost_edge(v[n - 1], gr, rg, outer, -1.0)
            }
        };
        let fluxes = self.exec.map(n + 1, |f| {
            let vl = if f == 0 { left_face } else { edges[f - 1].1 };
            let vr = if f == n { right_face } else { edges[f].0 };
            interface_flux(g.face(f), vl, vr, m)
        });
        self.finish(s, dt, &fluxes)
    }

    /// Conservative update with the midpoint source.
    fn finish(&self, s: &FieldSnapshot, dt: f64, fluxes: &[f64]) -> Result<FieldSnapshot> {
        let g = s.grid;
        let m = g.mass();
        let nu = dt / g.dr();
        let v = &s.values;
        let out = self.exec.try_map(g.cells(), |j| {
            let rj = g.center(j);
            let raw = v[j] - nu * (fluxes[j + 1] - fluxes[j]) + dt * geometric_source(v[j], rj, m);
            clamp_velocity(raw).map_err(|e| Error::Scheme { cell: j, reason: e.to_string() })
        })?;
        Ok(FieldSnapshot { grid: g, t: s.t + dt, components: 1, values: out })
    }
}

impl Scheme for BurgersFv {
    fn max_wavespeed(&self, state: &FieldSnapshot) -> Result<f64> {
        Ok(max_wavespeed_burgers(state))
    }

    fn step(&mut self, state: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        match self.config.order {
            Order::First => self.step_order1(state, dt),
            Order::Second => self.step_order2(state, dt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burgers::model::physical_flux;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interface_flux_examples() {
        for v in [-0.7, 0.0, 0.4, 1.0] {
            assert_eq!(interface_flux(3.3, v, v, 1.0), physical_flux(v, 3.3, 1.0));
        }
        assert_eq!(interface_flux(3.0, 1.0, -1.0, 1.0), 0.0);
        let f = interface_flux(2.5, 0.94868, 0.89443, 1.0);
        assert!((f - 0.2 * (0.94868f64.powi(2) - 1.0) / 2.0).abs() < 1e-15);
        assert!((f + 0.0100005).abs() < 1e-6);
    }

    #[test]
    fn limiter_examples() {
        assert_eq!(limited_slope(0.0, 1.0, 3.0), 1.5);
        assert_eq!(limited_slope(0.0, 1.0, 0.0), 0.0);
        assert_eq!(limited_slope(0.7 - 0.1, 0.7, 0.7 + 0.1), 0.09999999999999998);
        assert_eq!(limited_slope(3.0, 1.0, 0.0), -1.5);
    }

    #[test]
    fn wavespeed_examples() {
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        let s = FieldSnapshot::new(g, 0.0, 1, vec![1.0; 64]).unwrap();
        assert!((max_wavespeed_burgers(&s) - (1.0 - 2.0 / g.center(63))).abs() < 1e-15);
        assert!(max_wavespeed_burgers(&s) < 0.5);
        let z = FieldSnapshot::new(g, 0.0, 1, vec![0.0; 64]).unwrap();
        assert_eq!(max_wavespeed_burgers(&z), 0.0);
    }

    #[test]
    fn light_speed_states_are_fixed_points() {
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        for c in [1.0, -1.0] {
            for order in [Order::First, Order::Second] {
                let mut cfg = BurgersFvConfig::new(order);
                cfg.right = BoundaryKind::ZeroGradient;
                cfg.left = BoundaryKind::ZeroGradient;
                let mut fv = BurgersFv::new(cfg).unwrap();
                let s = FieldSnapshot::new(g, 0.0, 1, vec![c; 64]).unwrap();
                let out = fv.step(&s, 0.01).unwrap();
                assert_eq!(out.values, s.values);
            }
        }
    }

    #[test]
    fn constant_state_predictor() {
        // one interior cell of a constant profile evolves by the source ODE
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        let c = 0.3;
        let mut cfg = BurgersFvConfig::new(Order::Second);
        cfg.left = BoundaryKind::ZeroGradient;
        cfg.right = BoundaryKind::ZeroGradient;
        let fv = BurgersFv::new(cfg).unwrap();
        let s = FieldSnapshot::new(g, 0.0, 1, vec![c; 64]).unwrap();
        let dt = 1e-3;
        let out = fv.step_order2(&s, dt).unwrap();
        let j = 30;
        let m = 1.0;
        // predicted edges sit at c + Δt/4·S(r_j); positive states take the left edge at each face
        let edge = |i: usize| c + 0.25 * dt * geometric_source(c, g.center(i), m);
        let face_flux = |i: usize| lapse(m, g.face(i + 1)) * (edge(i).powi(2) - 1.0) * 0.5;
        let want = c - dt / g.dr() * (face_flux(j) - face_flux(j - 1)) + dt * geometric_source(c, g.center(j), m);
        assert!((out.values[j] - want).abs() < 1e-15, "{} {}", out.values[j], want);
    }

    #[test]
    fn update_is_flux_difference_plus_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(1.0, 2.0, 4.0, 40).unwrap();
        for order in [Order::First, Order::Second] {
            for _ in 0..20 {
                let vals: Vec<f64> = (0..40).map(|_| rng.gen_range(-0.95..0.95)).collect();
                let s = FieldSnapshot::new(g, 0.0, 1, vals).unwrap();
                let mut cfg = BurgersFvConfig::new(order);
                cfg.right = BoundaryKind::LightSpeed;
                let mut fv = BurgersFv::new(cfg).unwrap();
                let dt = 0.2 * g.dr();
                let out = fv.step(&s, dt).unwrap();
                let total_change: f64 = out.values.iter().zip(&s.values).map(|(a, b)| a - b).sum::<f64>() * g.dr();
                // boundary fluxes: left face at the horizon carries none; right face against −1 carries none
                let source: f64 = (0..40).map(|j| geometric_source(s.values[j], g.center(j), 1.0)).sum::<f64>() * g.dr() * dt;
                assert!((total_change - source).abs() < 1e-13, "{order:?}");
            }
        }
    }

    /// Textbook Godunov flux for the convex flux `(v² − 1)/2`.
    fn godunov_textbook(vl: f64, vr: f64) -> f64 {
        let f = |v: f64| 0.5 * (v * v - 1.0);
        if vl <= vr {
            if vl <= 0.0 && 0.0 <= vr {
                f(0.0)
            } else {
                f(vl).min(f(vr))
            }
        } else {
            f(vl).max(f(vr))
        }
    }

    #[test]
    fn flat_periodic_reduces_to_godunov() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 32;
        let dx = 0.1;
        let dt = 0.04;
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let at = |i: isize| v[i.rem_euclid(n as isize) as usize];
        for j in 0..n as isize {
            // mass 0: lapse 1, no source
            let ours = at(j) - dt / dx * (interface_flux_flat(at(j), at(j + 1)) - interface_flux_flat(at(j - 1), at(j)));
            let want = at(j) - dt / dx * (godunov_textbook(at(j), at(j + 1)) - godunov_textbook(at(j - 1), at(j)));
            assert!((ours - want).abs() < 1e-15);
        }
    }

    fn interface_flux_flat(vl: f64, vr: f64) -> f64 {
        interface_flux(1.0, vl, vr, 0.0)
    }
}
