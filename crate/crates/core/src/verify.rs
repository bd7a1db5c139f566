//! Acceptance checks shared by `horizon-flow verify` and the acceptance
//! test target. Each check runs its scenarios and reports measured values.

use crate::burgers::grp::{rarefaction_edges, rarefaction_interior, shock_trajectory, GrpData, GrpSolution};
use crate::burgers::model::{conserved, conserved_flux, flat_riemann, geometric_source, physical_flux};
use crate::burgers::SteadyBurgers;
use crate::error::Result;
use crate::euler::fv::{conserved_snapshot, EulerFv};
use crate::euler::model::{euler_flux, euler_source};
use crate::euler::{EulerParams, EulerState, SteadyEuler};
use crate::grid::{max_difference, run, FieldSnapshot, RunConfig, StepPolicy, StopRule};
use crate::scenarios::config::{InitialData, Model, Scenario, SchemeKind};
use crate::scenarios::detect::{
    classify_euler, detect_asymptote, euler_invariants, log_log_slope, plateaus, Invariants, Regime, Tolerances,
};
use crate::scenarios::runner::{execute, RunOptions, RunReport};
use crate::scenarios::{build_initial, find};
use crate::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::time::Instant;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub check: fn() -> Outcome,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self, c: &Criterion) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {tag}  {}: {}", c.id, c.title, self.detail)
    }
}

/// Turns a fallible check body into an outcome; errors fail the check.
fn outcome(f: impl FnOnce(&mut String) -> Result<bool>) -> Outcome {
    let mut detail = String::new();
    match f(&mut detail) {
        Ok(passed) => Outcome { passed, detail },
        Err(e) => Outcome { passed: false, detail: format!("{detail} error: {e}") },
    }
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, title: "steady preservation, Glimm", check: steady_glimm },
    Criterion { id: 2, title: "steady preservation, Burgers FV", check: steady_fv },
    Criterion { id: 3, title: "well-balancing, Euler FV", check: euler_well_balanced },
    Criterion { id: 4, title: "shock direction dichotomy", check: shock_directions },
    Criterion { id: 5, title: "GRP solver consistency", check: grp_consistency },
    Criterion { id: 6, title: "TV(z) monotone under Glimm", check: tv_monotone },
    Criterion { id: 7, title: "perturbed steady state decay", check: perturbed_decay },
    Criterion { id: 8, title: "perturbed steady shock", check: perturbed_shock },
    Criterion { id: 9, title: "general data trichotomy", check: general_data },
    Criterion { id: 10, title: "Euler GRP plateaus", check: euler_grp },
    Criterion { id: 11, title: "perturbed Euler steady states", check: euler_perturbed },
    Criterion { id: 12, title: "consistency and convergence orders", check: orders },
];

fn scenario(name: &str) -> Result<Scenario> {
    find(name).ok_or_else(|| crate::Error::Usage(format!("missing catalog entry {name}")))
}

fn run_quiet(s: &Scenario) -> Result<RunReport> {
    execute(s, &RunOptions::default())
}

/// Least-squares slope of `ln y` against `ln x`.
fn fitted_order(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(&x, &y)| (x, y)).collect();
    log_log_slope(&pts).unwrap_or(f64::NAN)
}

fn steady_glimm() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        for name in ["burgers/steady_pos_glimm", "burgers/steady_neg_glimm", "burgers/steady_shock_glimm"] {
            let s = scenario(name)?;
            let t0 = Instant::now();
            let rep = run_quiet(&s)?;
            let secs = t0.elapsed().as_secs_f64();
            let dev = max_difference(&rep.outcome.final_state, &rep.initial)?;
            ok &= dev <= 1e-10 && secs < 10.0;
            write!(d, "{name} dev {dev:.2e} in {secs:.2}s; ").ok();
        }
        Ok(ok)
    })
}

fn steady_fv() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        for name in ["burgers/steady_preserve", "burgers/steady_neg_preserve", "burgers/steady_shock_preserve"] {
            for (scheme, need) in [(SchemeKind::Fv1, 0.9), (SchemeKind::Fv2, 1.8)] {
                let mut devs = Vec::new();
                let cells = [128usize, 256, 512];
                for j in cells {
                    let mut s = scenario(name)?;
                    s.scheme = scheme;
                    s.grid.cells = j;
                    let rep = run_quiet(&s)?;
                    devs.push(max_difference(&rep.outcome.final_state, &rep.initial)?);
                }
                let xs: Vec<f64> = cells.iter().map(|&j| j as f64).collect();
                let order = -fitted_order(&xs, &devs);
                let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
                let finite = devs.iter().all(|x| x.is_finite());
                ok &= finite && decreasing && order >= need;
                write!(d, "{name} {scheme:?} devs {:.1e}/{:.1e}/{:.1e} order {order:.2}; ", devs[0], devs[1], devs[2]).ok();
            }
        }
        Ok(ok)
    })
}

fn max_relative_drift(a: &FieldSnapshot, b: &FieldSnapshot) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs() / x.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

fn euler_well_balanced() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        for name in ["euler/steady_sub_super", "euler/steady_sub_super_neg", "euler/steady_shock"] {
            let s = scenario(name)?;
            let t0 = Instant::now();
            let rep = run_quiet(&s)?;
            let secs = t0.elapsed().as_secs_f64();
            let drift = max_relative_drift(&rep.initial, &rep.outcome.final_state);
            let e_max = rep.diagnostics.iter().map(|r| r.measure).fold(0.0, f64::max);
            let pass = drift <= 1e-10 && e_max <= 1e-12 && secs < 60.0;
            ok &= pass;
            write!(d, "{name} drift {drift:.1e} max E {e_max:.1e} in {secs:.1}s; ").ok();
        }
        Ok(ok)
    })
}

/// Position where the profile crosses halfway between the two branches,
/// nearest to `guess`.
fn shock_position(snap: &FieldSnapshot, data: &GrpData, guess: f64) -> Option<f64> {
    let g = &snap.grid;
    let phi = |j: usize| -> Option<f64> {
        let r = g.center(j);
        let (l, rt) = (data.left.eval(r).ok()?, data.right.eval(r).ok()?);
        if (l - rt).abs() < 1e-12 {
            return None;
        }
        Some((snap.values[j] - rt) / (l - rt) - 0.5)
    };
    let mut best: Option<f64> = None;
    for j in 0..g.cells() - 1 {
        let (Some(a), Some(b)) = (phi(j), phi(j + 1)) else { continue };
        if a >= 0.0 && b < 0.0 {
            let (r0, r1) = (g.center(j), g.center(j + 1));
            let r = r0 + (r1 - r0) * a / (a - b);
            if best.is_none_or(|x| (r - guess).abs() < (x - guess).abs()) {
                best = Some(r);
            }
        }
    }
    best
}

fn grp_data(s: &Scenario) -> Result<GrpData> {
    match &s.initial {
        InitialData::BurgersGrp { left, right, r0 } => GrpData::new(left.build(s.params.mass)?, right.build(s.params.mass)?, *r0),
        _ => Err(crate::Error::Usage(format!("{} is not a GRP scenario", s.name))),
    }
}

fn shock_directions() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        for (name, dir, speed) in [("burgers/shock_right", 1.0, 0.184311), ("burgers/shock_left", -1.0, -0.181638)] {
            for scheme in [SchemeKind::Fv1, SchemeKind::Fv2, SchemeKind::Glimm] {
                let mut s = scenario(name)?;
                s.scheme = scheme;
                s.grid.cells = 512;
                s.output.every = 0.02;
                let data = grp_data(&s)?;
                let rep = run_quiet(&s)?;
                let mut traj = vec![(0.0, data.r0)];
                for snap in rep.outcome.snapshots.iter().filter(|x| x.t > 0.0) {
                    let prev = traj.last().expect("seeded").1;
                    match shock_position(snap, &data, prev) {
                        Some(r) => traj.push((snap.t, r)),
                        None => break,
                    }
                }
                // Glimm moves the front a whole cell at a time, so raw positions
                // may repeat; the fitted cubic must be strictly monotone
                let t_end = traj.last().map(|p| p.0).unwrap_or(0.0);
                let c: [f64; 4] = poly_fit(&traj);
                let speed_at = |t: f64| c[1] + 2.0 * c[2] * t + 3.0 * c[3] * t * t;
                let raw = traj.windows(2).all(|w| dir * (w[1].1 - w[0].1) >= -1e-12);
                let monotone = raw && (0..=100).all(|i| dir * speed_at(t_end * i as f64 / 100.0) > 0.0);
                let slope = speed_at(0.0);
                let rel = (slope - speed).abs() / speed.abs();
                let long_enough = traj.len() == rep.outcome.snapshots.len();
                ok &= monotone && rel <= 0.05 && long_enough;
                write!(d, "{name} {scheme:?} monotone {monotone} ({} pts) slope {slope:.4} ({:.1}%); ", traj.len(), 100.0 * rel).ok();
            }
        }
        Ok(ok)
    })
}

/// Least-squares polynomial `Σ c_i·t^i` of degree `N − 1` through the points.
fn poly_fit<const N: usize>(pts: &[(f64, f64)]) -> [f64; N] {
    // scale t to [0, 1] for conditioning
    let scale = pts.iter().map(|p| p.0.abs()).fold(f64::MIN_POSITIVE, f64::max);
    let mut m = [[0.0; N]; N];
    let mut rhs = [0.0; N];
    for &(t, y) in pts {
        let basis: [f64; N] = std::array::from_fn(|i| (t / scale).powi(i as i32));
        for i in 0..N {
            rhs[i] += basis[i] * y;
            for j in 0..N {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..N {
        let piv = (col..N).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap_or(col);
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            #[allow(clippy::needless_range_loop)]
            for k in col..N {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut c = [0.0; N];
    for i in (0..N).rev() {
        let tail: f64 = (i + 1..N).map(|k| m[i][k] * c[k]).sum();
        c[i] = (rhs[i] - tail) / m[i][i];
    }
    std::array::from_fn(|i| c[i] / scale.powi(i as i32))
}

/// Fourth-order central difference of the shock trajectory.
fn trajectory_speed(data: &GrpData, t: f64, h: f64) -> Result<f64> {
    let x = |s: f64| shock_trajectory(data, s);
    Ok((x(t - 2.0 * h)? - 8.0 * x(t - h)? + 8.0 * x(t + h)? - x(t + 2.0 * h)?) / (12.0 * h))
}

fn grp_consistency() -> Outcome {
    outcome(|d| {
        let m = 1.0;
        // Rankine–Hugoniot along both catalog shocks
        let mut rh: f64 = 0.0;
        for name in ["burgers/shock_right", "burgers/shock_left"] {
            let data = grp_data(&scenario(name)?)?;
            for i in 1..=20 {
                let t = 0.05 * i as f64;
                let rs = shock_trajectory(&data, t)?;
                let speed = trajectory_speed(&data, t, 1e-3)?;
                let (vl, vr) = (data.left.eval(rs)?, data.right.eval(rs)?);
                let ju = conserved(vr, rs, m) - conserved(vl, rs, m);
                let jf = conserved_flux(vr, rs, m) - conserved_flux(vl, rs, m);
                rh = rh.max((speed * ju - jf).abs());
            }
        }
        // fan edges for rarefactions with and without a sonic point
        let mut edge: f64 = 0.0;
        for (vl, vr) in [(-0.4, 0.5), (0.2, 0.6), (-0.7, -0.3)] {
            let l = SteadyBurgers::from_point(3.0, vl, m)?;
            let r = SteadyBurgers::from_point(3.0, vr, m)?;
            let data = GrpData::new(l, r, 3.0)?;
            for t in [0.1, 0.3, 0.6] {
                let (rl, rr) = rarefaction_edges(&data, t)?;
                edge = edge.max((rarefaction_interior(&data, t, rl)? - l.eval(rl)?).abs());
                edge = edge.max((rarefaction_interior(&data, t, rr)? - r.eval(rr)?).abs());
            }
        }
        // flat limit
        let mut flat: f64 = 0.0;
        let mass = 1e-6;
        for (vl, vr) in [(-0.5, 0.6), (0.2, 0.7), (-0.8, -0.1), (0.7, -0.2), (0.9, 0.3)] {
            let l = SteadyBurgers::from_point(3.0, vl, mass)?;
            let r = SteadyBurgers::from_point(3.0, vr, mass)?;
            let sol = GrpSolution::new(GrpData::new(l, r, 3.0)?);
            let t = 0.5;
            let (el, er) = sol.edges(t)?;
            for i in 0..=60 {
                let x = 2.4 + 1.2 * i as f64 / 60.0;
                if (x - el).abs() < 1e-2 || (x - er).abs() < 1e-2 {
                    continue;
                }
                flat = flat.max((sol.eval(t, x)? - flat_riemann(vl, vr, (x - 3.0) / t)).abs());
            }
        }
        write!(d, "RH residual {rh:.1e}, fan edge jump {edge:.1e}, flat-limit error {flat:.1e}").ok();
        Ok(rh <= 1e-8 && edge <= 1e-8 && flat <= 1e-3)
    })
}

fn tv_monotone() -> Outcome {
    outcome(|d| {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
        let mut worst = f64::NEG_INFINITY;
        let mut failures = 0;
        let mut fallbacks = 0;
        for _ in 0..50 {
            let pieces = rng.gen_range(2..=12);
            let z: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-0.9..=0.9)).collect();
            let mut s = scenario("burgers/random_bv_glimm")?;
            s.initial = InitialData::BurgersPiecewiseZ { z };
            s.grid.cells = 128;
            s.stop.t_final = 2.0;
            s.seed.q0 = rng.gen_range(0..s.seed.p2);
            let rep = run_quiet(&s)?;
            fallbacks += rep.glimm_fallbacks;
            let tv: Vec<f64> = rep.diagnostics.iter().map(|r| r.measure).collect();
            let rise = tv.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(rise);
            if rise > 1e-12 {
                failures += 1;
            }
        }
        write!(d, "largest per-step increase {worst:.1e}; {failures}/50 runs increased; {fallbacks} fallback samples").ok();
        Ok(failures == 0)
    })
}

fn perturbed_decay() -> Outcome {
    outcome(|d| {
        let s = scenario("burgers/perturbed_steady")?;
        let rep = run_quiet(&s)?;
        let series: Vec<(f64, f64)> = rep.diagnostics.iter().map(|r| (r.t, r.l1_vs_reference)).collect();
        let peak = series.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|x| x.0).unwrap_or(0);
        // decaying window: from the peak until the distance reaches round-off
        let floor = 1e-12 * series[peak].1;
        let window: Vec<(f64, f64)> = series[peak..].iter().copied().take_while(|p| p.1 > floor).filter(|p| p.0 > 0.0).collect();
        let slope = log_log_slope(&window).unwrap_or(f64::NAN);
        let (first, last) = (series[0].1, series.last().map(|p| p.1).unwrap_or(f64::NAN));
        let span = (window.first().map(|p| p.0).unwrap_or(0.0), window.last().map(|p| p.0).unwrap_or(0.0));
        write!(
            d,
            "L1 {first:.2e} -> {last:.2e}, peak {:.2e}, fitted exponent {slope:.3} over t in [{:.2}, {:.2}]",
            series[peak].1, span.0, span.1
        )
        .ok();
        Ok(last < first && (-0.8..=-0.3).contains(&slope))
    })
}

fn perturbed_shock() -> Outcome {
    outcome(|d| {
        let s = scenario("burgers/perturbed_steady_shock")?;
        let k0 = match s.initial {
            InitialData::BurgersSteadyShock { k, .. } => k,
            _ => f64::NAN,
        };
        let mut s = s;
        s.output.every = 1.0;
        let rep = run_quiet(&s)?;
        let fit = detect_asymptote(&rep.outcome.snapshots, Model::Burgers, None, &Tolerances::default())?;
        let dk = fit.k.map(|k| (k - k0).abs()).unwrap_or(f64::NAN);
        let dkr = fit.k_right.map(|k| (k - k0).abs()).unwrap_or(f64::NAN);
        write!(
            d,
            "regime {:?}, |dK| {dk:.1e}/{dkr:.1e}, r1 {:?}, residual {:.1e}, since t = {:?}",
            fit.regime, fit.shock_radius, fit.residual, fit.detected_at
        )
        .ok();
        Ok(fit.regime == Regime::SteadyShock
            && dk <= 1e-4
            && dkr <= 1e-4
            && fit.residual <= 1e-6
            && fit.detected_at.is_some_and(|t| t <= 100.0))
    })
}

/// Captured shocks and the sonic point at `r_max` leave an `O(Δr)` misfit.
const GENERAL_TOLERANCES: Tolerances =
    Tolerances { residual: 1e-3, k_match: 1e-6, critical: 1e-2, plateau: 1e-4, plateau_len: 10, shock_band: 3 };

fn general_data() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        for name in ["burgers/general_lightspeed", "burgers/general_critical", "burgers/general_negative"] {
            for scheme in [SchemeKind::Fv2, SchemeKind::Glimm] {
                let mut s = scenario(name)?;
                s.scheme = scheme;
                let v_inf = match s.initial {
                    InitialData::BurgersGeneral { v_infinity, .. } => v_infinity,
                    _ => f64::NAN,
                };
                let rep = run_quiet(&s)?;
                let fit = detect_asymptote(&rep.outcome.snapshots, Model::Burgers, None, &GENERAL_TOLERANCES)?;
                let pass = match name {
                    "burgers/general_lightspeed" => fit.regime == Regime::LightspeedShock,
                    "burgers/general_critical" => fit.regime == Regime::Critical,
                    _ => {
                        let want = (1.0 - v_inf * v_inf).sqrt();
                        fit.regime == Regime::Steady && fit.k.is_some_and(|k| (k - want).abs() <= 1e-3)
                    }
                };
                ok &= pass;
                write!(d, "{name} {scheme:?}: {:?} K {:.4} res {:.1e}; ", fit.regime, fit.k.unwrap_or(f64::NAN), fit.residual).ok();
            }
        }
        Ok(ok)
    })
}

fn euler_grp() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        let tol = Tolerances::default();
        for name in ["euler/grp_rs", "euler/grp_rr"] {
            let s = scenario(name)?;
            let p = s.euler_params()?;
            let rep = run_quiet(&s)?;
            let inv = euler_invariants(&rep.outcome.final_state, &p)?;
            let runs = plateaus(&inv, tol.plateau, tol.plateau_len);
            let n = inv.len();
            // gaps between consecutive plateaus are the wave regions
            let mut waves = 0;
            let mut edges_covered = true;
            for w in runs.windows(2) {
                if w[1].start > w[0].end {
                    waves += 1;
                }
            }
            if let (Some(f), Some(l)) = (runs.first(), runs.last()) {
                edges_covered = f.start == 0 && l.end == n;
            }
            let pass = (1..=3).contains(&runs.len()) && waves <= 2 && edges_covered;
            ok &= pass;
            write!(d, "{name}: {} plateaus {:?}, {waves} wave regions; ", runs.len(), runs).ok();
        }
        Ok(ok)
    })
}

/// Eⁿ is non-increasing on a tail of at least 10 steps that ends where it
/// first drops below the threshold.
fn eventually_monotone(series: &[f64], threshold: f64) -> bool {
    let end = series.iter().position(|&e| e < threshold).unwrap_or(series.len());
    if end < 2 {
        return false;
    }
    let head = &series[..end];
    let last_rise = head.windows(2).rposition(|w| w[1] > w[0]).map(|i| i + 1).unwrap_or(0);
    end - last_rise >= 10
}

fn euler_perturbed() -> Outcome {
    outcome(|d| {
        let mut ok = true;
        let tol = Tolerances::default();
        for (name, want, same_anchor) in [
            ("euler/perturbed_steady", Regime::Steady, true),
            ("euler/perturbed_steady_mass", Regime::Steady, false),
            ("euler/perturbed_steady_shock", Regime::SteadyShock, true),
        ] {
            let s = scenario(name)?;
            let p = s.euler_params()?;
            let rep = run_quiet(&s)?;
            let fit = classify_euler(&rep.outcome.final_state, &p, &tol)?;
            let base = match &rep.reference {
                Some(r) => classify_euler(r, &p, &tol)?.plateaus,
                None => Vec::new(),
            };
            let anchors_match = fit.plateaus.len() == base.len()
                && fit.plateaus.iter().zip(&base).all(|(a, b): (&Invariants, &Invariants)| a.close_to(b, 1e-3));
            let e: Vec<f64> = rep.diagnostics.iter().map(|r| r.measure).collect();
            let threshold = rep.steady_threshold.unwrap_or(f64::NAN);
            let monotone = eventually_monotone(&e, threshold);
            let steady = rep.steady_since.is_some_and(|t| t <= 200.0);
            let pass = steady && fit.regime == want && anchors_match == same_anchor && monotone;
            ok &= pass;
            let label = match (fit.regime, anchors_match) {
                (Regime::Steady, true) => "steady",
                (Regime::Steady, false) => "steady (different anchor)",
                (Regime::SteadyShock, _) => "steady_shock",
                _ => "none",
            };
            write!(d, "{name}: {label}, steady since {:?}, E tail monotone {monotone}; ", rep.steady_since).ok();
        }
        Ok(ok)
    })
}

fn burgers_truncation(rng: &mut ChaCha8Rng) -> Result<f64> {
    let m = 1.0;
    let r = rng.gen_range(2.3..6.0);
    let mut v: f64 = rng.gen_range(0.1..0.95);
    if rng.gen_bool(0.5) {
        v = -v;
    }
    let b = SteadyBurgers::from_point(r, v, m)?;
    let mut taus = Vec::new();
    let hs = [0.04, 0.02, 0.01];
    for h in hs {
        let (rl, rr) = (r - h / 2.0, r + h / 2.0);
        let df = physical_flux(b.eval(rr)?, rr, m) - physical_flux(b.eval(rl)?, rl, m);
        taus.push((df / h - geometric_source(v, r, m)).abs());
    }
    Ok(-fitted_order(&hs.map(|h| 1.0 / h), &taus))
}

fn euler_truncation(rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = rng.gen_range(0.2..0.6);
    let p = EulerParams::new(k, 1.0)?;
    loop {
        let r = rng.gen_range(2.5..9.0);
        let v = rng.gen_range(-0.9..0.9);
        let rho = rng.gen_range(0.5..2.0);
        let anchor = EulerState::new(rho, v)?;
        let hs = [0.04, 0.02, 0.01];
        let b = SteadyEuler::new(p, r, anchor)?;
        if (v.abs() - k).abs() < 0.05 || !b.contains(r - hs[0]) || !b.contains(r + hs[0]) {
            continue;
        }
        let mut taus = Vec::new();
        for h in hs {
            let (rl, rr) = (r - h / 2.0, r + h / 2.0);
            let (fl, fr) = (euler_flux(b.extend(rl)?, &p, rl), euler_flux(b.extend(rr)?, &p, rr));
            let s = euler_source(anchor, &p, r);
            taus.push(((fr[0] - fl[0]) / h - s[0]).abs() + ((fr[1] - fl[1]) / h - s[1]).abs());
        }
        return Ok(-fitted_order(&hs.map(|h| 1.0 / h), &taus));
    }
}

/// Smooth non-steady Euler data: a supersonic branch plus a small bump.
fn smooth_euler(cells: usize) -> Result<(EulerParams, FieldSnapshot)> {
    let p = EulerParams::new(0.2, 1.0)?;
    let b = SteadyEuler::new(p, 10.0, EulerState::new(1.0, 0.6)?)?;
    let grid = Grid::new(1.0, 3.0, 9.0, cells)?;
    let bump = |r: f64| {
        let x = (r - 6.0) / 1.5;
        if x.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    let snap = conserved_snapshot(grid, &p, 0.0, |r| {
        let s = b.extend(r)?;
        EulerState::new(s.rho + 0.05 * bump(r), s.v + 0.02 * bump(r))
    })?;
    Ok((p, snap))
}

fn euler_solution(cells: usize, dt: f64, t_final: f64) -> Result<FieldSnapshot> {
    let (p, s0) = smooth_euler(cells)?;
    let mut fv = EulerFv::new(p);
    let cfg = RunConfig {
        policy: StepPolicy::Fixed { dt, max_courant: 0.5 },
        stop: StopRule { t_final: Some(t_final), max_steps: None },
        output_times: Vec::new(),
    };
    Ok(run(&mut fv, s0, &cfg, &mut [])?.final_state)
}

/// `L¹` distance between a coarse solution and a fine one averaged onto it.
fn restricted_l1(coarse: &FieldSnapshot, fine: &FieldSnapshot) -> f64 {
    let ratio = fine.grid.cells() / coarse.grid.cells();
    let mut sum = 0.0;
    for j in 0..coarse.grid.cells() {
        for c in 0..2 {
            let avg = (0..ratio).map(|i| fine.cell(j * ratio + i)[c]).sum::<f64>() / ratio as f64;
            sum += (coarse.cell(j)[c] - avg).abs();
        }
    }
    sum * coarse.grid.dr()
}

fn orders() -> Outcome {
    outcome(|d| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let burgers_min =
            (0..20).map(|_| burgers_truncation(&mut rng)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
        let euler_min = (0..20).map(|_| euler_truncation(&mut rng)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
        // space: fixed dt small enough for the finest grid
        let t_final = 0.5;
        let cells = [60usize, 120, 240, 480];
        let dt = 0.25 * (6.0 / 480.0);
        let sols = cells.iter().map(|&j| euler_solution(j, dt, t_final)).collect::<Result<Vec<_>>>()?;
        let space_err: Vec<f64> = sols.windows(2).map(|w| restricted_l1(&w[0], &w[1])).collect();
        let space = (space_err[1] / space_err[2]).log2();
        // time: fixed grid
        let dts = [0.02, 0.01, 0.005, 0.0025];
        let sols = dts.iter().map(|&dt| euler_solution(120, dt, t_final)).collect::<Result<Vec<_>>>()?;
        let time_err: Vec<f64> = sols.windows(2).map(|w| restricted_l1(&w[0], &w[1])).collect();
        let time = (time_err[1] / time_err[2]).log2();
        write!(
            d,
            "Burgers truncation order min {burgers_min:.2}, Euler truncation order min {euler_min:.2}, Euler space {space:.2} (diffs {:.1e}/{:.1e}/{:.1e}), time {time:.2} (diffs {:.1e}/{:.1e}/{:.1e})",
            space_err[0], space_err[1], space_err[2], time_err[0], time_err[1], time_err[2]
        )
        .ok();
        Ok(burgers_min >= 1.8 && euler_min >= 1.8 && space >= 1.8 && (time - 1.0).abs() <= 0.15)
    })
}

/// Builds the initial snapshot of a catalog scenario.
pub fn initial_of(name: &str) -> Result<FieldSnapshot> {
    build_initial(&scenario(name)?)
}
