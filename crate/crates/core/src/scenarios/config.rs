//! Scenario description, validation and file I/O.

use crate::burgers::glimm::ChorinSeed;
use crate::burgers::{Sign, SteadyBurgers};
use crate::error::{Error, Result};
use crate::euler::{EulerParams, EulerState};
use crate::grid::Grid;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Burgers,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Fv1,
    Fv2,
    Glimm,
    EulerFv,
}

impl SchemeKind {
    pub fn model(self) -> Model {
        match self {
            SchemeKind::EulerFv => Model::Euler,
            _ => Model::Burgers,
        }
    }

    /// Name accepted by [`SchemeKind::parse`].
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Fv1 => "fv1",
            SchemeKind::Fv2 => "fv2",
            SchemeKind::Glimm => "glimm",
            SchemeKind::EulerFv => "euler_fv",
        }
    }

    pub fn parse(s: &str) -> Result<SchemeKind> {
        match s {
            "fv1" => Ok(SchemeKind::Fv1),
            "fv2" => Ok(SchemeKind::Fv2),
            "glimm" => Ok(SchemeKind::Glimm),
            "euler_fv" => Ok(SchemeKind::EulerFv),
            _ => Err(Error::Usage(format!("unknown scheme {s:?}; expected fv1, fv2, glimm or euler_fv"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sound_speed: Option<f64>,
}

/// A Burgers steady branch, either by family parameters or through a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum BranchSpec {
    Family { sign: Sign, k: f64 },
    Point { r: f64, v: f64 },
}

impl BranchSpec {
    pub fn build(&self, mass: f64) -> Result<SteadyBurgers> {
        match *self {
            BranchSpec::Family { sign, k } => SteadyBurgers::new(sign, k, mass),
            BranchSpec::Point { r, v } => SteadyBurgers::from_point(r, v, mass),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerAnchor {
    pub rho: f64,
    pub v: f64,
}

impl EulerAnchor {
    pub fn state(&self) -> Result<EulerState> {
        EulerState::new(self.rho, self.v)
    }
}

/// How the initial data are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    BurgersSteady {
        branch: BranchSpec,
    },
    /// `+K` branch left of `shock_radius`, `−K` branch right of it.
    BurgersSteadyShock {
        k: f64,
        shock_radius: f64,
    },
    BurgersGrp {
        left: BranchSpec,
        right: BranchSpec,
        r0: f64,
    },
    /// Smooth blend from `v_horizon` at `2M` to the steady branch tending to
    /// `v_infinity` at infinity (negative for `v_infinity ≤ 0`), switching
    /// over `[center − width, center + width]`.
    BurgersGeneral {
        v_horizon: f64,
        v_infinity: f64,
        center: f64,
        width: f64,
    },
    /// Piecewise constant in `z` on equal-width pieces.
    BurgersPiecewiseZ {
        z: Vec<f64>,
    },
    EulerSteady {
        r0: f64,
        anchor: EulerAnchor,
    },
    EulerSteadyShock {
        r0: f64,
        left: EulerAnchor,
    },
    /// Two steady branches anchored on either side of `r0`.
    EulerGrp {
        r0: f64,
        left: EulerAnchor,
        right: EulerAnchor,
    },
}

impl InitialData {
    pub fn model(&self) -> Model {
        match self {
            InitialData::BurgersSteady { .. }
            | InitialData::BurgersSteadyShock { .. }
            | InitialData::BurgersGrp { .. }
            | InitialData::BurgersGeneral { .. }
            | InitialData::BurgersPiecewiseZ { .. } => Model::Burgers,
            _ => Model::Euler,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `exp(1 − 1/(1 − x²))` on `|x| < 1`, peak 1.
    #[default]
    Bump,
    /// `x`-derivative of the bump scaled to peak 1; integrates to zero.
    Dipole,
}

/// Compactly supported perturbation added to `v`, and to `ρ` for Euler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub center: f64,
    pub half_width: f64,
    /// Velocity amplitude.
    pub amplitude: f64,
    #[serde(default)]
    pub density_amplitude: f64,
    #[serde(default)]
    pub shape: Shape,
}

/// Peak of `|d/dx exp(1 − 1/(1 − x²))|`, at `x ≈ 0.7598`.
const DIPOLE_PEAK: f64 = 2.170_357_085_710_339;

impl Perturbation {
    pub fn profile(&self, r: f64) -> f64 {
        let x = (r - self.center) / self.half_width;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - x * x;
        let bump = (1.0 - 1.0 / q).exp();
        match self.shape {
            Shape::Bump => bump,
            Shape::Dipole => -2.0 * x / (q * q) * bump / DIPOLE_PEAK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Snapshot cadence in time; the final time is always written.
    pub every: f64,
}

fn default_cfl() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub model: Model,
    pub scheme: SchemeKind,
    pub grid: GridSpec,
    pub params: Params,
    pub initial: InitialData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    pub stop: StopSpec,
    pub output: OutputSpec,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub seed: ChorinSeed,
}

impl Scenario {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.params.mass, self.grid.r_min, self.grid.r_max, self.grid.cells)
    }

    pub fn euler_params(&self) -> Result<EulerParams> {
        let k = self.params.sound_speed.ok_or_else(|| Error::config("params.sound_speed", "required for the euler model"))?;
        EulerParams::new(k, self.params.mass)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        let grid = self.grid()?;
        if self.scheme.model() != self.model {
            return Err(Error::config("scheme", format!("{:?} does not apply to the {:?} model", self.scheme, self.model)));
        }
        if self.initial.model() != self.model {
            return Err(Error::config("initial.kind", format!("recipe is not a {:?} recipe", self.model)));
        }
        match self.model {
            Model::Euler => {
                self.euler_params()?;
            }
            Model::Burgers => {
                if self.params.sound_speed.is_some() {
                    return Err(Error::config("params.sound_speed", "only meaningful for the euler model"));
                }
            }
        }
        if !(self.stop.t_final.is_finite() && self.stop.t_final > 0.0) {
            return Err(Error::config("stop.t_final", format!("must be positive, got {}", self.stop.t_final)));
        }
        if !(self.output.every.is_finite() && self.output.every > 0.0) {
            return Err(Error::config("output.every", format!("must be positive, got {}", self.output.every)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::config("cfl", format!("must lie in (0, 1/2], got {}", self.cfl)));
        }
        if let Some(p) = &self.perturbation {
            if !(p.half_width > 0.0) {
                return Err(Error::config("perturbation.half_width", "must be positive"));
            }
            if p.center - p.half_width < grid.r_min() || p.center + p.half_width > grid.r_max() {
                return Err(Error::config("perturbation.center", "support must lie inside the grid"));
            }
            if self.model == Model::Burgers && p.density_amplitude != 0.0 {
                return Err(Error::config("perturbation.density_amplitude", "Burgers has no density"));
            }
        }
        crate::burgers::glimm::ChorinSequence::new(self.seed)?;
        Ok(())
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Scenario> {
        let s: Scenario = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(format!("toml: {e}")))?
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Scenario::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("toml: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(format!("json: {e}")))
    }

    /// Writes JSON for a `.json` path and TOML otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = if path.extension().is_some_and(|e| e == "json") { self.to_json()? } else { self.to_toml()? };
        std::fs::write(path, text)?;
        Ok(())
    }
}
