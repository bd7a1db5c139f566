//! Runs a scenario end to end and persists its output.

use super::config::{Model, Scenario, SchemeKind};
use super::initial::{build_initial, reference};
use super::output::{write_csv, write_diagnostics, DiagnosticRow};
use crate::burgers::fv::{BurgersFv, BurgersFvConfig, Order};
use crate::burgers::glimm::{tv_z, Glimm};
use crate::error::Result;
use crate::euler::fv::{steadiness_functional, EulerFv, SteadinessMonitor};
use crate::grid::{l1_distance, run, CflPolicy, FieldSnapshot, Flow, Observer, RunConfig, RunOutcome, Scheme, StepPolicy, StopRule};
use crate::par::Exec;
use std::path::{Path, PathBuf};

/// Any of the solvers a scenario can select.
#[derive(Debug, Clone)]
pub enum AnyScheme {
    Fv(BurgersFv),
    Glimm(Glimm),
    Euler(EulerFv),
}

impl AnyScheme {
    pub fn for_scenario(s: &Scenario, exec: Exec) -> Result<AnyScheme> {
        Ok(match s.scheme {
            SchemeKind::Fv1 | SchemeKind::Fv2 => {
                let order = if s.scheme == SchemeKind::Fv1 { Order::First } else { Order::Second };
                let mut cfg = BurgersFvConfig::new(order);
                cfg.safety = s.cfl;
                AnyScheme::Fv(BurgersFv::new(cfg)?.with_exec(exec))
            }
            SchemeKind::Glimm => AnyScheme::Glimm(Glimm::new(s.seed)?.with_exec(exec)),
            SchemeKind::EulerFv => AnyScheme::Euler(EulerFv::new(s.euler_params()?).with_exec(exec)),
        })
    }

    fn inner(&mut self) -> &mut dyn Scheme {
        match self {
            AnyScheme::Fv(s) => s,
            AnyScheme::Glimm(s) => s,
            AnyScheme::Euler(s) => s,
        }
    }
}

impl Scheme for AnyScheme {
    fn max_wavespeed(&self, state: &FieldSnapshot) -> Result<f64> {
        match self {
            AnyScheme::Fv(s) => s.max_wavespeed(state),
            AnyScheme::Glimm(s) => s.max_wavespeed(state),
            AnyScheme::Euler(s) => s.max_wavespeed(state),
        }
    }

    fn step(&mut self, state: &FieldSnapshot, dt: f64) -> Result<FieldSnapshot> {
        self.inner().step(state, dt)
    }
}

/// Per-step `TV(z)` or `Eⁿ` plus the `L¹` distance to the reference.
struct Diagnostics<'a> {
    scenario: &'a Scenario,
    reference: Option<FieldSnapshot>,
    exec: Exec,
    rows: Vec<DiagnosticRow>,
}

impl Observer for Diagnostics<'_> {
    fn observe(&mut self, _step: usize, dt: f64, state: &FieldSnapshot) -> Result<Flow> {
        let measure = match self.scenario.model {
            Model::Burgers => tv_z(state),
            Model::Euler => steadiness_functional(state, &self.scenario.euler_params()?, self.exec)?,
        };
        let l1 = match &self.reference {
            Some(r) => l1_distance(state, r)?,
            None => f64::NAN,
        };
        self.rows.push(DiagnosticRow { t: state.t, dt, measure, l1_vs_reference: l1 });
        Ok(Flow::Continue)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub exec: Exec,
    /// Write CSV files here when set.
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: Scenario,
    pub initial: FieldSnapshot,
    pub reference: Option<FieldSnapshot>,
    pub outcome: RunOutcome,
    pub diagnostics: Vec<DiagnosticRow>,
    /// First time `Eⁿ` settled below the steadiness threshold (Euler only).
    pub steady_since: Option<f64>,
    pub steady_threshold: Option<f64>,
    pub glimm_fallbacks: usize,
    pub files: Vec<PathBuf>,
}

/// `burgers/steady_pos_glimm` → `burgers__steady_pos_glimm`.
pub fn file_stem(name: &str) -> String {
    name.replace('/', "__")
}

/// Snapshot times `0, every, 2·every, …` and `t_final`.
pub fn output_times(s: &Scenario) -> Vec<f64> {
    let mut times = Vec::new();
    let mut i = 0u32;
    loop {
        let t = f64::from(i) * s.output.every;
        if t >= s.stop.t_final * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        i += 1;
    }
    times.push(s.stop.t_final);
    times
}

pub fn execute(s: &Scenario, opts: &RunOptions) -> Result<RunReport> {
    let initial = build_initial(s)?;
    let reference = reference(s)?;
    let mut scheme = AnyScheme::for_scenario(s, opts.exec)?;
    let config = RunConfig {
        policy: StepPolicy::Cfl(CflPolicy::new(s.cfl)),
        stop: StopRule { t_final: Some(s.stop.t_final), max_steps: s.stop.max_steps },
        output_times: output_times(s),
    };
    let mut diag = Diagnostics { scenario: s, reference: reference.clone(), exec: opts.exec, rows: Vec::new() };
    let mut monitor = match s.model {
        Model::Euler => {
            let mut m = SteadinessMonitor::new(s.euler_params()?);
            m.exec = opts.exec;
            Some(m)
        }
        Model::Burgers => None,
    };
    let outcome = {
        let mut observers: Vec<&mut dyn Observer> = vec![&mut diag];
        if let Some(m) = monitor.as_mut() {
            observers.push(m);
        }
        run(&mut scheme, initial.clone(), &config, &mut observers)?
    };
    let glimm_fallbacks = match &scheme {
        AnyScheme::Glimm(g) => g.fallbacks,
        _ => 0,
    };
    let mut report = RunReport {
        scenario: s.clone(),
        initial,
        reference,
        outcome,
        diagnostics: diag.rows,
        steady_since: monitor.as_ref().and_then(|m| m.steady_since),
        steady_threshold: monitor.as_ref().map(|m| m.threshold()),
        glimm_fallbacks,
        files: Vec::new(),
    };
    if let Some(dir) = &opts.out_dir {
        report.files = write_outputs(&report, dir)?;
    }
    Ok(report)
}

/// Writes `<stem>.csv` and `<stem>_diagnostics.csv` into `dir`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let s = &report.scenario;
    let stem = file_stem(&s.name);
    let fields = dir.join(format!("{stem}.csv"));
    let params = match s.model {
        Model::Euler => Some(s.euler_params()?),
        Model::Burgers => None,
    };
    write_csv(&report.outcome.snapshots, s.model, params.as_ref(), &fields)?;
    let diag = dir.join(format!("{stem}_diagnostics.csv"));
    write_diagnostics(&report.diagnostics, s.model, &diag)?;
    Ok(vec![fields, diag])
}
