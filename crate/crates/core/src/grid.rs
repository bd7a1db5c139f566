//! Uniform radial grids, CFL step control and the generic time loop.

use crate::error::{Error, Result};

/// Metric factor `1 − 2M/r`.
#[inline]
pub fn lapse(mass: f64, r: f64) -> f64 {
    1.0 - 2.0 * mass / r
}

/// Cell-centred uniform grid on `(r_min, r_max)` outside the horizon `2M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    mass: f64,
    r_min: f64,
    r_max: f64,
    cells: usize,
    dr: f64,
}

impl Grid {
    pub fn new(mass: f64, r_min: f64, r_max: f64, cells: usize) -> Result<Grid> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::config("mass", format!("must be positive, got {mass}")));
        }
        if !(r_min.is_finite() && r_min >= 2.0 * mass) {
            return Err(Error::config("r_min", format!("must satisfy r_min >= 2M = {}, got {r_min}", 2.0 * mass)));
        }
        if !(r_max.is_finite() && r_max > r_min) {
            return Err(Error::config("r_max", format!("must exceed r_min = {r_min}, got {r_max}")));
        }
        if cells < 2 {
            return Err(Error::config("cells", format!("need at least 2 cells, got {cells}")));
        }
        Ok(Grid { mass, r_min, r_max, cells, dr: (r_max - r_min) / cells as f64 })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn cells(&self) -> usize {
        self.cells
    }
    pub fn dr(&self) -> f64 {
        self.dr
    }

    /// Centre `r_j` of cell `j`.
    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.r_min + (j as f64 + 0.5) * self.dr
    }

    /// Interface `r_{j−1/2}`; `face(0) = r_min`, `face(J) = r_max`.
    #[inline]
    pub fn face(&self, j: usize) -> f64 {
        if j == self.cells {
            self.r_max
        } else {
            self.r_min + j as f64 * self.dr
        }
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|j| self.center(j)).collect()
    }

    #[inline]
    pub fn lapse(&self, r: f64) -> f64 {
        lapse(self.mass, r)
    }
}

/// Cell averages on a grid at one time. Multi-component values are stored
/// cell-major: `values[j * components + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub grid: Grid,
    pub t: f64,
    pub components: usize,
    pub values: Vec<f64>,
}

impl FieldSnapshot {
    pub fn new(grid: Grid, t: f64, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != grid.cells() * components {
            return Err(Error::Usage(format!(
                "snapshot needs {} values ({} cells x {components} components), got {}",
                grid.cells() * components,
                grid.cells(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: 0, cell: i / components });
        }
        Ok(FieldSnapshot { grid, t, components, values })
    }

    /// Builds a scalar snapshot by sampling `f` at the cell centres.
    pub fn from_fn(grid: Grid, t: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let values = grid.centers().into_iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        FieldSnapshot::new(grid, t, 1, values)
    }

    #[inline]
    pub fn cell(&self, j: usize) -> &[f64] {
        &self.values[j * self.components..(j + 1) * self.components]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.components).copied().collect()
    }

    fn check_same_grid(&self, other: &FieldSnapshot) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Usage("snapshots live on different grids".into()));
        }
        Ok(())
    }
}

/// `Σ_j |a_j − b_j|·Δr`, summed over components.
pub fn l1_distance(a: &FieldSnapshot, b: &FieldSnapshot) -> Result<f64> {
    a.check_same_grid(b)?;
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum();
    Ok(s * a.grid.dr())
}

/// Largest per-entry deviation between two snapshots.
pub fn max_difference(a: &FieldSnapshot, b: &FieldSnapshot) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `Σ_j |x_{j+1} − x_j|`.
pub fn total_variation(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Usage(format!("total variation needs at least 2 values, got {}", values.len())));
    }
    Ok(values.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// CFL step control: `Δt = safety·Δr / max_speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflPolicy {
    pub safety: f64,
    /// Used when every wave speed vanishes.
    pub fallback_dt: f64,
}

impl CflPolicy {
    pub fn new(safety: f64) -> Self {
        CflPolicy { safety, fallback_dt: f64::INFINITY }
    }
}

pub fn next_dt(policy: &CflPolicy, max_speed: f64, dr: f64) -> Result<f64> {
    if !max_speed.is_finite() || max_speed < 0.0 {
        return Err(Error::Numerical(format!("wave speed bound is {max_speed}")));
    }
    if max_speed == 0.0 {
        return Ok(policy.fallback_dt);
    }
    Ok(policy.safety * dr / max_speed)
}

/// How each time step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    Cfl(CflPolicy),
    /// Constant `Δt`; the loop still rejects steps whose Courant number
    /// exceeds `max_courant`.
    Fixed {
        dt: f64,
        max_courant: f64,
    },
}

/// A one-step update operator.
pub trait Scheme {
    /// Upper bound on `|characteristic speed|` over the snapshot.
    fn max_wavespeed(&self, state: &FieldSnapshot) -> Result<f64>;
    fn step(&mut self, state: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot>;
}

/// Observer verdict after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Halt,
}

/// Diagnostic callback. Called once for the initial state (`step = 0`,
/// `dt = 0`) and after every step.
pub trait Observer {
    fn observe(&mut self, step: usize, dt: f64, state: &FieldSnapshot) -> Result<Flow>;
}

impl<F> Observer for F
where
    F: FnMut(usize, f64, &FieldSnapshot) -> Result<Flow>,
{
    fn observe(&mut self, step: usize, dt: f64, state: &FieldSnapshot) -> Result<Flow> {
        self(step, dt, state)
    }
}

/// When the loop ends. Both limits may be combined; the first reached wins.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StopRule {
    pub t_final: Option<f64>,
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub policy: StepPolicy,
    pub stop: StopRule,
    /// Snapshot times; steps are shortened to land on them exactly.
    pub output_times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    FinalTime,
    StepLimit,
    Observer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: FieldSnapshot,
    pub steps: usize,
    pub snapshots: Vec<FieldSnapshot>,
    pub log: Vec<StepRecord>,
    pub halted: HaltReason,
}

/// Runs `scheme` from `initial` until the stop rule or an observer halts.
pub fn run(scheme: &mut dyn Scheme, initial: FieldSnapshot, config: &RunConfig, observers: &mut [&mut dyn Observer]) -> Result<RunOutcome> {
    let mut outputs: Vec<f64> = config.output_times.iter().copied().filter(|t| t.is_finite()).collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    let mut next_out = 0usize;
    let mut snapshots = Vec::new();
    let mut log = Vec::new();
    let mut state = initial;

    while next_out < outputs.len() && outputs[next_out] <= state.t {
        snapshots.push(state.clone());
        next_out += 1;
    }
    let mut halt_by_observer = false;
    for obs in observers.iter_mut() {
        if obs.observe(0, 0.0, &state)? == Flow::Halt {
            halt_by_observer = true;
        }
    }

    let mut steps = 0usize;
    let halted = loop {
        if halt_by_observer {
            break HaltReason::Observer;
        }
        if let Some(tf) = config.stop.t_final {
            if state.t >= tf {
                break HaltReason::FinalTime;
            }
        }
        if config.stop.max_steps.is_some_and(|n| steps >= n) {
            break HaltReason::StepLimit;
        }
        if config.stop.t_final.is_none() && config.stop.max_steps.is_none() {
            return Err(Error::Usage("stop rule needs a final time or a step limit".into()));
        }

        let dr = state.grid.dr();
        let speed = scheme.max_wavespeed(&state)?;
        let (mut dt, limit) = match config.policy {
            StepPolicy::Cfl(p) => (next_dt(&p, speed, dr)?, p.safety),
            StepPolicy::Fixed { dt, max_courant } => (dt, max_courant),
        };
        if let Some(tf) = config.stop.t_final {
            dt = dt.min(tf - state.t);
        }
        if next_out < outputs.len() {
            dt = dt.min(outputs[next_out] - state.t);
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Numerical(format!("time step {dt} at t = {}", state.t)));
        }
        if dt * speed > limit * dr * (1.0 + 1e-12) {
            return Err(Error::Numerical(format!("Courant number {} exceeds {limit}", dt * speed / dr)));
        }

        steps += 1;
        let mut new_state = scheme.step(&state, dt)?;
        if let Some(i) = new_state.values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: steps, cell: i / new_state.components });
        }
        // land exactly on the target times despite round-off in the sum
        let mut t = state.t + dt;
        if let Some(tf) = config.stop.t_final {
            if (t - tf).abs() <= 1e-12 * tf.abs().max(1.0) {
                t = tf;
            }
        }
        if next_out < outputs.len() && (t - outputs[next_out]).abs() <= 1e-12 * t.abs().max(1.0) {
            t = outputs[next_out];
        }
        new_state.t = t;
        state = new_state;
        log.push(StepRecord { step: steps, t, dt });

        while next_out < outputs.len() && outputs[next_out] <= state.t {
            snapshots.push(state.clone());
            next_out += 1;
        }
        for obs in observers.iter_mut() {
            if obs.observe(steps, dt, &state)? == Flow::Halt {
                halt_by_observer = true;
            }
        }
    };

    Ok(RunOutcome { final_state: state, steps, snapshots, log, halted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_grids() {
        let g = Grid::new(1.0, 2.0, 4.0, 256).unwrap();
        assert_eq!(g.dr(), 0.0078125);
        assert_eq!(g.center(0), 2.00390625);
        let g = Grid::new(1.0, 2.0, 10.0, 500).unwrap();
        assert_eq!(g.dr(), 0.016);
        assert!(matches!(Grid::new(1.0, 2.0, 4.0, 1), Err(Error::Config { ref field, .. }) if field == "cells"));
        assert!(matches!(Grid::new(1.0, 1.5, 4.0, 8), Err(Error::Config { ref field, .. }) if field == "r_min"));
        assert!(matches!(Grid::new(0.0, 2.0, 4.0, 8), Err(Error::Config { ref field, .. }) if field == "mass"));
    }

    #[test]
    fn faces_bracket_centres() {
        let g = Grid::new(1.0, 2.0, 4.0, 7).unwrap();
        for j in 0..7 {
            assert!(g.face(j) < g.center(j) && g.center(j) < g.face(j + 1));
        }
        assert_eq!(g.face(7), 4.0);
    }

    #[test]
    fn cfl_examples() {
        let p = CflPolicy { safety: 0.5, fallback_dt: 0.1 };
        assert_eq!(next_dt(&p, 1.0, 0.0078125).unwrap(), 0.00390625);
        assert_eq!(next_dt(&p, 0.5, 0.016).unwrap(), 0.016);
        assert_eq!(next_dt(&p, 0.0, 0.016).unwrap(), 0.1);
        assert!(next_dt(&p, f64::NAN, 0.016).is_err());
    }

    #[test]
    fn norms() {
        let g = Grid::new(1.0, 2.0, 4.0, 256).unwrap();
        let a = FieldSnapshot::new(g, 0.0, 1, vec![0.0; 256]).unwrap();
        let mut b = a.clone();
        assert_eq!(l1_distance(&a, &b).unwrap(), 0.0);
        b.values[17] = 1.0;
        assert_eq!(l1_distance(&a, &b).unwrap(), 0.0078125);

        let g = Grid::new(1.0, 2.0, 10.0, 500).unwrap();
        let a = FieldSnapshot::new(g, 0.0, 2, vec![0.0; 1000]).unwrap();
        let mut b = a.clone();
        b.values[6] = 1.0;
        b.values[7] = 2.0;
        assert!((l1_distance(&a, &b).unwrap() - 0.048).abs() < 1e-15);

        assert_eq!(total_variation(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(total_variation(&[0.0, 1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(total_variation(&[0.0, 0.5, 1.0]).unwrap(), 1.0);
        assert!(total_variation(&[1.0]).is_err());
    }

    struct Decay {
        nan_at: Option<usize>,
        calls: usize,
    }

    impl Scheme for Decay {
        fn max_wavespeed(&self, _: &FieldSnapshot) -> Result<f64> {
            Ok(1.0)
        }
        fn step(&mut self, s: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
            self.calls += 1;
            let mut out = s.clone();
            for v in &mut out.values {
                *v *= 1.0 - dt;
            }
            if self.nan_at == Some(self.calls) {
                out.values[5] = f64::NAN;
            }
            Ok(out)
        }
    }

    fn config(t: Option<f64>, n: Option<usize>) -> RunConfig {
        RunConfig {
            policy: StepPolicy::Cfl(CflPolicy::new(0.5)),
            stop: StopRule { t_final: t, max_steps: n },
            output_times: vec![0.0, 0.25, 1.0],
        }
    }

    #[test]
    fn run_lands_on_final_and_output_times() {
        let g = Grid::new(1.0, 2.0, 4.0, 16).unwrap();
        let init = FieldSnapshot::new(g, 0.0, 1, vec![1.0; 16]).unwrap();
        let mut s = Decay { nan_at: None, calls: 0 };
        let out = run(&mut s, init, &config(Some(1.0), None), &mut []).unwrap();
        assert_eq!(out.final_state.t, 1.0);
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.0, 0.25, 1.0]);
        assert_eq!(out.halted, HaltReason::FinalTime);
    }

    #[test]
    fn zero_steps_is_identity() {
        let g = Grid::new(1.0, 2.0, 4.0, 16).unwrap();
        let init = FieldSnapshot::new(g, 0.0, 1, vec![0.3; 16]).unwrap();
        let mut s = Decay { nan_at: None, calls: 0 };
        let out = run(&mut s, init.clone(), &config(None, Some(0)), &mut []).unwrap();
        assert_eq!(out.final_state, init);
        assert_eq!(s.calls, 0);
    }

    #[test]
    fn nan_aborts_with_step_and_cell() {
        let g = Grid::new(1.0, 2.0, 4.0, 16).unwrap();
        let init = FieldSnapshot::new(g, 0.0, 1, vec![1.0; 16]).unwrap();
        let mut s = Decay { nan_at: Some(3), calls: 0 };
        let err = run(&mut s, init, &config(Some(1.0), None), &mut []).unwrap_err();
        assert!(matches!(err, Error::NonFinite { step: 3, cell: 5 }), "{err:?}");
    }

    #[test]
    fn observer_can_halt() {
        let g = Grid::new(1.0, 2.0, 4.0, 16).unwrap();
        let init = FieldSnapshot::new(g, 0.0, 1, vec![1.0; 16]).unwrap();
        let mut s = Decay { nan_at: None, calls: 0 };
        let mut obs = |step: usize, _: f64, _: &FieldSnapshot| Ok(if step == 4 { Flow::Halt } else { Flow::Continue });
        let out = run(&mut s, init, &config(Some(10.0), None), &mut [&mut obs]).unwrap();
        assert_eq!(out.steps, 4);
        assert_eq!(out.halted, HaltReason::Observer);
    }

    #[test]
    fn fixed_step_rejects_courant_violation() {
        let g = Grid::new(1.0, 2.0, 4.0, 16).unwrap();
        let init = FieldSnapshot::new(g, 0.0, 1, vec![1.0; 16]).unwrap();
        let mut s = Decay { nan_at: None, calls: 0 };
        let cfg = RunConfig {
            policy: StepPolicy::Fixed { dt: 0.2, max_courant: 0.5 },
            stop: StopRule { t_final: Some(1.0), max_steps: None },
            output_times: vec![],
        };
        assert!(run(&mut s, init, &cfg, &mut []).is_err());
    }
}
