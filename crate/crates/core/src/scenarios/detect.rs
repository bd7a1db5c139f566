//! Fits terminal snapshots against the steady families.

use super::config::Model;
use crate::burgers::Sign;
use crate::error::Result;
use crate::euler::fv::primitives;
use crate::euler::model::{ln_energy_invariant, mass_flux_invariant};
use crate::euler::EulerParams;
use crate::grid::FieldSnapshot;
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Steady,
    SteadyShock,
    /// The `K = 1` branch.
    Critical,
    /// `v ≡ 1` left of a shock, `−sqrt(2M/r)` right of it.
    LightspeedShock,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest accepted `L¹` fit residual.
    pub residual: f64,
    /// `|K_left − K_right|` for a steady shock.
    pub k_match: f64,
    /// `|K − 1|` for the critical branch, `K_left` for light speed. On a
    /// bounded grid the branch that is sonic at `r_max` also counts.
    pub critical: f64,
    /// Cells on each side of a captured shock left out of the shock fit.
    pub shock_band: usize,
    /// Relative plateau tolerance on the Euler invariants.
    pub plateau: f64,
    pub plateau_len: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-6, k_match: 1e-6, critical: 1e-2, shock_band: 0, plateau: 1e-4, plateau_len: 10 }
    }
}

/// `(ln|I₁|, I₂)` of one Euler steady branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub ln_i1: f64,
    pub i2: f64,
}

impl Invariants {
    pub fn close_to(&self, other: &Invariants, rel: f64) -> bool {
        (self.ln_i1 - other.ln_i1).abs() <= rel * self.ln_i1.abs().max(1.0)
            && (self.i2 - other.i2).abs() <= rel * self.i2.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub regime: Regime,
    /// Fitted `K`; the left one for shocks.
    pub k: Option<f64>,
    pub sign: Option<Sign>,
    pub k_right: Option<f64>,
    pub shock_radius: Option<f64>,
    /// Earliest snapshot time from which every later snapshot fits.
    pub detected_at: Option<f64>,
    pub residual: f64,
    pub decay_exponent: Option<f64>,
    /// Euler only: invariants per plateau, left to right.
    pub plateaus: Vec<Invariants>,
}

impl AsymptoticReport {
    fn none(residual: f64) -> Self {
        AsymptoticReport {
            regime: Regime::None,
            k: None,
            sign: None,
            k_right: None,
            shock_radius: None,
            detected_at: None,
            residual,
            decay_exponent: None,
            plateaus: Vec::new(),
        }
    }
}

/// Least-squares `K` for one signed branch over `(r, v, a)` samples, with its
/// `L¹` residual (`Δr` weighted).
pub fn fit_branch(samples: &[(f64, f64, f64)], sign: Sign, dr: f64) -> (f64, f64) {
    if samples.is_empty() {
        return (f64::NAN, 0.0);
    }
    let s = sign.value();
    let model = |k: f64, a: f64| s * (1.0 - k * k * a).max(0.0).sqrt();
    let mut ks: Vec<f64> = samples.iter().map(|&(_, v, a)| ((1.0 - v * v) / a).max(0.0).sqrt()).collect();
    ks.sort_by(f64::total_cmp);
    let mut k = ks[ks.len() / 2];
    // Gauss–Newton on Σ (v − s·sqrt(1 − K²a))²
    for _ in 0..50 {
        let (mut num, mut den) = (0.0, 0.0);
        for &(_, v, a) in samples {
            let root = (1.0 - k * k * a).max(0.0).sqrt();
            if root <= 1e-12 {
                continue;
            }
            let e = v - s * root;
            let j = s * k * a / root;
            num += j * e;
            den += j * j;
        }
        if den == 0.0 {
            break;
        }
        let step = num / den;
        k = (k - step).max(0.0);
        if step.abs() <= 1e-15 * k.max(1.0) {
            break;
        }
    }
    let res = samples.iter().map(|&(_, v, a)| (v - model(k, a)).abs()).sum::<f64>() * dr;
    (k, res)
}

fn burgers_samples(snap: &FieldSnapshot) -> Vec<(f64, f64, f64)> {
    let g = &snap.grid;
    (0..g.cells())
        .map(|j| {
            let r = g.center(j);
            (r, snap.values[j], g.lapse(r))
        })
        .collect()
}

/// Classifies one Burgers snapshot.
pub fn classify_burgers(snap: &FieldSnapshot, tol: &Tolerances) -> AsymptoticReport {
    let samples = burgers_samples(snap);
    let dr = snap.grid.dr();
    let n = samples.len();
    // single branch of either sign
    let mut best: Option<(f64, Sign, f64)> = None;
    for sign in [Sign::Plus, Sign::Minus] {
        let (k, res) = fit_branch(&samples, sign, dr);
        if best.is_none_or(|b| res < b.2) {
            best = Some((k, sign, res));
        }
    }
    let (k, sign, res) = best.expect("two candidates");
    // critical branch, or its truncation that turns sonic at the outer edge
    let k_sonic = 1.0 / snap.grid.lapse(snap.grid.r_max()).sqrt();
    let critical = |k: f64| (k - 1.0).abs() <= tol.critical || (k - k_sonic).abs() <= tol.critical;
    if res <= tol.residual {
        let regime = if critical(k) { Regime::Critical } else { Regime::Steady };
        return AsymptoticReport { regime, k: Some(k), sign: Some(sign), ..AsymptoticReport::none(res) };
    }
    // + branch left of face i, − branch right of it
    let mut shock: Option<(usize, f64, f64, f64)> = None;
    for i in 1..n {
        let band = tol.shock_band;
        let (kl, rl) = fit_branch(&samples[..i.saturating_sub(band)], Sign::Plus, dr);
        let (kr, rr) = fit_branch(&samples[(i + band).min(n)..], Sign::Minus, dr);
        if shock.is_none_or(|s| rl + rr < s.3) {
            shock = Some((i, kl, kr, rl + rr));
        }
    }
    let Some((i, kl, kr, sres)) = shock else {
        return AsymptoticReport::none(res);
    };
    if sres > tol.residual {
        return AsymptoticReport::none(res.min(sres));
    }
    let regime = if kl <= tol.critical && critical(kr) {
        Regime::LightspeedShock
    } else if (kl - kr).abs() <= tol.k_match {
        Regime::SteadyShock
    } else {
        Regime::None
    };
    AsymptoticReport {
        regime,
        k: Some(kl),
        sign: Some(Sign::Plus),
        k_right: Some(kr),
        shock_radius: Some(snap.grid.face(i)),
        ..AsymptoticReport::none(sres)
    }
}

/// `(ln|I₁|, I₂)` at every cell.
pub fn euler_invariants(snap: &FieldSnapshot, params: &EulerParams) -> Result<Vec<Invariants>> {
    let prims = primitives(snap, params)?;
    Ok(prims
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let r = snap.grid.center(j);
            Invariants { ln_i1: ln_energy_invariant(*s, params, r), i2: mass_flux_invariant(*s, params, r) }
        })
        .collect())
}

/// Maximal runs of at least `min_len` cells whose invariants stay within
/// `rel` of the run's first cell.
pub fn plateaus(inv: &[Invariants], rel: f64, min_len: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < inv.len() {
        let mut end = start + 1;
        while end < inv.len() && inv[end].close_to(&inv[start], rel) {
            end += 1;
        }
        if end - start >= min_len {
            out.push(start..end);
            start = end;
        } else {
            start += 1;
        }
    }
    out
}

fn median_invariants(inv: &[Invariants]) -> Invariants {
    let mut a: Vec<f64> = inv.iter().map(|x| x.ln_i1).collect();
    let mut b: Vec<f64> = inv.iter().map(|x| x.i2).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Invariants { ln_i1: a[a.len() / 2], i2: b[b.len() / 2] }
}

/// Classifies one Euler snapshot by the plateau structure of its invariants.
pub fn classify_euler(snap: &FieldSnapshot, params: &EulerParams, tol: &Tolerances) -> Result<AsymptoticReport> {
    let inv = euler_invariants(snap, params)?;
    let runs = plateaus(&inv, tol.plateau, tol.plateau_len);
    let plateau_inv: Vec<Invariants> = runs.iter().map(|r| median_invariants(&inv[r.clone()])).collect();
    let n = inv.len();
    let covered: usize = runs.iter().map(|r| r.len()).sum();
    let regime = match runs.len() {
        1 if covered == n => Regime::Steady,
        // a standing shock leaves at most one smeared cell between two branches
        2 if covered + 1 >= n && runs[0].start == 0 && runs[1].end == n => Regime::SteadyShock,
        _ => Regime::None,
    };
    let shock_radius = (regime == Regime::SteadyShock).then(|| snap.grid.face(runs[1].start));
    Ok(AsymptoticReport { regime, shock_radius, plateaus: plateau_inv, ..AsymptoticReport::none(f64::NAN) })
}

/// Slope of `ln y` against `ln t` by least squares.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(t, y)| *t > 0.0 && *y > 0.0).map(|(t, y)| (t.ln(), y.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fits the last snapshot and dates the regime by scanning backwards.
pub fn detect_asymptote(
    history: &[FieldSnapshot],
    model: Model,
    params: Option<&EulerParams>,
    tol: &Tolerances,
) -> Result<AsymptoticReport> {
    let classify = |s: &FieldSnapshot| -> Result<AsymptoticReport> {
        match model {
            Model::Burgers => Ok(classify_burgers(s, tol)),
            Model::Euler => {
                classify_euler(s, params.ok_or_else(|| crate::error::Error::Usage("Euler detection needs parameters".into()))?, tol)
            }
        }
    };
    let last = history.last().ok_or_else(|| crate::error::Error::Usage("detection needs at least one snapshot".into()))?;
    let mut report = classify(last)?;
    if report.regime != Regime::None {
        let mut since = last.t;
        for s in history.iter().rev().skip(1) {
            if classify(s)?.regime != report.regime {
                break;
            }
            since = s.t;
        }
        report.detected_at = Some(since);
    }
    Ok(report)
}
