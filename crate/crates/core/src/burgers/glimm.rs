//! Random choice scheme on exact generalized Riemann problems.

use super::fv::max_wavespeed_burgers;
use super::grp::{GrpData, GrpSolution, Region};
use super::model::{clamp_velocity, flat_riemann, z_extended, Sign, SteadyBurgers};
use crate::error::{Error, Result};
use crate::grid::{lapse, total_variation, FieldSnapshot, Flow, Observer, Scheme};
use crate::par::Exec;
use serde::{Deserialize, Serialize};

/// Parameters of the Chorin sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChorinSeed {
    pub p1: u64,
    pub p2: u64,
    pub q0: u64,
}

impl Default for ChorinSeed {
    fn default() -> Self {
        ChorinSeed { p1: 937, p2: 997, q0: 800 }
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Equidistributed samples `w' = (q_n + 1/2)/p2 − 1/2` with
/// `q_n = (p1 + q_{n−1}) mod p2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChorinSequence {
    p1: u64,
    p2: u64,
    q: u64,
}

impl ChorinSequence {
    pub fn new(seed: ChorinSeed) -> Result<Self> {
        let ChorinSeed { p1, p2, q0 } = seed;
        if !is_prime(p1) || !is_prime(p2) || p1 >= p2 {
            return Err(Error::config("glimm.p1", format!("need primes p1 < p2, got ({p1}, {p2})")));
        }
        if q0 >= p2 {
            return Err(Error::config("glimm.q0", format!("seed must be below p2 = {p2}, got {q0}")));
        }
        Ok(ChorinSequence { p1, p2, q: q0 })
    }

    /// The state `q_n` after the latest draw.
    pub fn state(&self) -> u64 {
        self.q
    }

    pub fn next_sample(&mut self) -> f64 {
        self.q = (self.p1 + self.q) % self.p2;
        (self.q as f64 + 0.5) / self.p2 as f64 - 0.5
    }
}

/// Steady branch through `(r_a, v_a)`, re-anchored at `face` when it does
/// not reach it.
fn anchored_branch(r_a: f64, v_a: f64, face: f64, mass: f64) -> Result<SteadyBurgers> {
    let b = SteadyBurgers::from_point(r_a, v_a, mass)?;
    if b.contains(face) || face <= 2.0 * mass {
        Ok(b)
    } else {
        SteadyBurgers::from_point(face, v_a, mass)
    }
}

/// Outcome of sampling one cell.
struct Sample {
    value: f64,
    fallback: bool,
}

fn sample_cell(s: &FieldSnapshot, j: usize, dt: f64, w: f64) -> Result<Sample> {
    let g = &s.grid;
    let rj = g.center(j);
    let reach = if j + 1 < g.cells() { g.center(j + 1) } else { g.r_max() };
    if SteadyBurgers::from_point(rj, s.values[j], g.mass())?.contains(reach) {
        return sample_waves(s, j, dt, w);
    }
    // no steady branch joins the cell to its neighbour: sample the
    // frozen-coefficient problem and let the source act on its own
    let v = &s.values;
    let rs = rj + w * g.dr();
    let (face, vl, vr) = if w >= 0.0 {
        (g.face(j + 1), v[j], v.get(j + 1).copied().unwrap_or(v[j]))
    } else if j == 0 {
        (g.face(0), v[0], v[0])
    } else {
        (g.face(j), v[j - 1], v[j])
    };
    let value = flat_riemann(vl, vr, (rs - face) / (lapse(g.mass(), face) * dt));
    Ok(Sample { value: source_step(value, rj, g.mass(), dt), fallback: false })
}

/// Exact solution of `v' = (M/r²)(v² − 1)` after `dt`.
fn source_step(v: f64, r: f64, mass: f64, dt: f64) -> f64 {
    (v.atanh() - mass / (r * r) * dt).tanh()
}

fn sample_waves(s: &FieldSnapshot, j: usize, dt: f64, w: f64) -> Result<Sample> {
    let g = &s.grid;
    let m = g.mass();
    let n = g.cells();
    let v = &s.values;
    let rj = g.center(j);
    let rs = rj + w * g.dr();

    // the cell's own branch keeps its stored value when sampled, which
    // avoids round-off drift of z along unchanged branches
    let own = SteadyBurgers::from_point(rj, v[j], m)?;
    let (left, right, face, own_left) = if w >= 0.0 {
        let face = g.face(j + 1);
        let left = anchored_branch(rj, v[j], face, m)?;
        let right = if j + 1 < n { anchored_branch(g.center(j + 1), v[j + 1], face, m)? } else { left };
        (left, right, face, true)
    } else {
        let face = g.face(j);
        let right = anchored_branch(rj, v[j], face, m)?;
        if face <= 2.0 * m {
            // nothing enters through the horizon
            return Ok(Sample { value: v[j], fallback: false });
        }
        let left = if j > 0 { anchored_branch(g.center(j - 1), v[j - 1], face, m)? } else { SteadyBurgers::new(Sign::Plus, 0.0, m)? };
        (left, right, face, false)
    };
    let pick = |b: &SteadyBurgers, is_own: bool| -> Result<Sample> {
        let value = if is_own && *b == own {
            v[j]
        } else {
            match b.eval(rj) {
                Ok(x) => clamp_velocity(x)?,
                Err(_) => reproject(b, rs, rj, m)?,
            }
        };
        Ok(Sample { value, fallback: false })
    };

    let data = GrpData::new(left, right, face)?;
    let (vl0, vr0) = (data.left_state(), data.right_state());
    if (vl0 - vr0).abs() <= 1e-14 {
        return if rs < face { pick(&left, own_left) } else { pick(&right, !own_left) };
    }
    match GrpSolution::new(data).locate(dt, rs) {
        Ok(Region::Left) => pick(&left, own_left),
        Ok(Region::Right) => pick(&right, !own_left),
        Ok(Region::Fan(val)) => Ok(Sample { value: reproject_value(rs, val, rj, m)?, fallback: false }),
        // a branch ends inside the cell pair: sample the frozen-coefficient problem
        Err(Error::Truncated { .. }) | Err(Error::Domain { .. }) | Err(Error::Root(_)) => {
            let xi = (rs - face) / (lapse(m, face) * dt);
            let val = flat_riemann(vl0, vr0, xi);
            Ok(Sample { value: reproject_value(rs, val, rj, m)?, fallback: true })
        }
        Err(e) => Err(e),
    }
}

fn reproject(branch: &SteadyBurgers, rs: f64, rj: f64, m: f64) -> Result<f64> {
    let val = branch.eval(rs)?;
    reproject_value(rs, val, rj, m)
}

/// Carries a sample taken at `rs` back to the cell centre along its own
/// steady branch; keeps the raw sample where that branch does not reach.
fn reproject_value(rs: f64, val: f64, rj: f64, m: f64) -> Result<f64> {
    let val = clamp_velocity(val)?;
    if rs == rj {
        return Ok(val);
    }
    Ok(SteadyBurgers::from_point(rs, val, m).and_then(|b| b.eval(rj)).unwrap_or(val))
}

/// One random choice step with sample `w ∈ (−1/2, 1/2)`. Returns the new
/// state and the number of cells that needed the frozen-coefficient
/// fallback.
pub fn glimm_step(state: &FieldSnapshot, dt: f64, w: f64, exec: Exec) -> Result<(FieldSnapshot, usize)> {
    if !(w > -0.5 && w < 0.5) {
        return Err(Error::Usage(format!("sample {w} outside (-1/2, 1/2)")));
    }
    let samples =
        exec.try_map(state.grid.cells(), |j| sample_cell(state, j, dt, w).map_err(|e| Error::Scheme { cell: j, reason: e.to_string() }))?;
    let fallbacks = samples.iter().filter(|s| s.fallback).count();
    let values = samples.into_iter().map(|s| s.value).collect();
    Ok((FieldSnapshot { grid: state.grid, t: state.t + dt, components: 1, values }, fallbacks))
}

/// Random choice scheme driven by a Chorin sequence.
#[derive(Debug, Clone)]
pub struct Glimm {
    pub sequence: ChorinSequence,
    pub exec: Exec,
    /// Total number of fallback samples so far.
    pub fallbacks: usize,
}

impl Glimm {
    pub fn new(seed: ChorinSeed) -> Result<Self> {
        Ok(Glimm { sequence: ChorinSequence::new(seed)?, exec: Exec::default(), fallbacks: 0 })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

impl Scheme for Glimm {
    fn max_wavespeed(&self, state: &FieldSnapshot) -> Result<f64> {
        Ok(max_wavespeed_burgers(state))
    }

    fn step(&mut self, state: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        let w = self.sequence.next_sample();
        let (out, fb) = glimm_step(state, dt, w, self.exec)?;
        self.fallbacks += fb;
        Ok(out)
    }
}

/// `TV(z)` with `z` extended by zero where it is undefined.
pub fn tv_z(state: &FieldSnapshot) -> f64 {
    let g = &state.grid;
    let zs: Vec<f64> = state.values.iter().enumerate().filter_map(|(j, &v)| z_extended(v, g.center(j), g.mass()).ok()).collect();
    total_variation(&zs).unwrap_or(0.0)
}

/// Records `(t, TV(z))` after every step.
#[derive(Debug, Default, Clone)]
pub struct TvzObserver {
    pub series: Vec<(f64, f64)>,
}

impl Observer for TvzObserver {
    fn observe(&mut self, _step: usize, _dt: f64, state: &FieldSnapshot) -> Result<Flow> {
        self.series.push((state.t, tv_z(state)));
        Ok(Flow::Continue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn chorin_examples() {
        let mut s = ChorinSequence::new(ChorinSeed::default()).unwrap();
        let w = s.next_sample();
        assert_eq!(s.state(), 740);
        assert!((w - 0.242728).abs() < 1e-6);
        assert_eq!(w, 740.5 / 997.0 - 0.5);

        let mut s = ChorinSequence::new(ChorinSeed { p1: 996, p2: 997, q0: 0 });
        // 996 is not prime
        assert!(s.is_err());
        s = ChorinSequence::new(ChorinSeed { p1: 7, p2: 11, q0: 4 });
        let mut s = s.unwrap();
        let w = s.next_sample();
        assert_eq!(s.state(), 0);
        assert!(w > -0.5 && w < 0.5);
        assert!(ChorinSequence::new(ChorinSeed { p1: 7, p2: 11, q0: 11 }).is_err());
    }

    #[test]
    fn samples_stay_in_range() {
        let mut s = ChorinSequence::new(ChorinSeed { p1: 2, p2: 3, q0: 0 }).unwrap();
        for _ in 0..20 {
            let w = s.next_sample();
            assert!(w > -0.5 && w < 0.5);
        }
    }

    #[test]
    fn steady_data_is_reproduced() {
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        for (sign, k) in [(Sign::Plus, 0.5), (Sign::Minus, 0.5), (Sign::Minus, 1.0)] {
            let b = SteadyBurgers::new(sign, k, 1.0).unwrap();
            let s = FieldSnapshot::from_fn(g, 0.0, |r| b.eval(r)).unwrap();
            for w in [-0.4, -0.1, 0.0, 0.3, 0.49] {
                let (out, fb) = glimm_step(&s, 0.004, w, Exec::Sequential).unwrap();
                assert_eq!(fb, 0);
                for (a, b) in out.values.iter().zip(&s.values) {
                    assert!((a - b).abs() < 1e-14, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn flat_limit_is_classical_glimm() {
        // tiny mass: branches are constants and the step samples flat Riemann solutions
        let m = 1e-9;
        let g = Grid::new(m, 3.0, 4.0, 20).unwrap();
        let vals: Vec<f64> = (0..20).map(|j| if j < 10 { 0.6 } else { -0.2 }).collect();
        let s = FieldSnapshot::new(g, 0.0, 1, vals.clone()).unwrap();
        let dt = 0.4 * g.dr();
        for w in [-0.3, 0.2] {
            let (out, _) = glimm_step(&s, dt, w, Exec::Sequential).unwrap();
            for j in 1..19 {
                let (vl, vr, x) =
                    if w >= 0.0 { (vals[j], vals[j + 1], (w - 0.5) * g.dr()) } else { (vals[j - 1], vals[j], (w + 0.5) * g.dr()) };
                let want = flat_riemann(vl, vr, x / dt);
                assert!((out.values[j] - want).abs() < 1e-6, "j={j} w={w}");
            }
        }
    }

    #[test]
    fn standing_shock_stays() {
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        let l = SteadyBurgers::new(Sign::Plus, 0.5, 1.0).unwrap();
        let r = SteadyBurgers::new(Sign::Minus, 0.5, 1.0).unwrap();
        let rs = g.face(32);
        let s = FieldSnapshot::from_fn(g, 0.0, |x| if x < rs { l.eval(x) } else { r.eval(x) }).unwrap();
        let (out, _) = glimm_step(&s, 0.004, 0.3, Exec::Sequential).unwrap();
        for (a, b) in out.values.iter().zip(&s.values) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tv_extends_z_by_zero() {
        use crate::burgers::model::z_of_v;
        let g = Grid::new(1.0, 2.0, 4.0, 4).unwrap();
        // 0.0 has z undefined at every r here (K > 1)
        let s = FieldSnapshot::new(g, 0.0, 1, vec![0.99, 0.0, 0.97, 0.95]).unwrap();
        let z = |j: usize| z_of_v(s.values[j], g.center(j), 1.0).unwrap();
        let want = z(0) + z(2) + (z(2) - z(3)).abs();
        assert!((tv_z(&s) - want).abs() < 1e-15);
        // on the critical branch the radicand is round-off
        let crit = FieldSnapshot::from_fn(g, 0.0, |x| Ok(-(2.0 / x).sqrt())).unwrap();
        assert_eq!(tv_z(&crit), 0.0);
    }

    #[test]
    fn source_step_solves_the_riccati_equation() {
        let (v0, r, dt) = (0.3, 5.0, 0.7);
        let c = 1.0 / (r * r);
        // v' = c(v² − 1) from a fine RK4 march
        let f = |v: f64| c * (v * v - 1.0);
        let (mut v, n) = (v0, 1000);
        let h = dt / n as f64;
        for _ in 0..n {
            let k1 = f(v);
            let k2 = f(v + 0.5 * h * k1);
            let k3 = f(v + 0.5 * h * k2);
            let k4 = f(v + h * k3);
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((source_step(v0, r, 1.0, dt) - v).abs() < 1e-12);
        assert_eq!(source_step(1.0, r, 1.0, dt), 1.0);
        assert_eq!(source_step(-1.0, r, 1.0, dt), -1.0);
    }

    #[test]
    fn subcritical_horizon_cell_turns_inward() {
        // v = 1/2 next to the horizon lies on no branch that crosses the cell
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        let mut s = FieldSnapshot::new(g, 0.0, 1, vec![0.5; 64]).unwrap();
        for _ in 0..2000 {
            s = glimm_step(&s, 0.01, -0.25, Exec::Sequential).unwrap().0;
        }
        assert!(s.values[0] < -0.5, "{}", s.values[0]);
    }
}
