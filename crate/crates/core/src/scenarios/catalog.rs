//! Built-in scenarios.

use super::config::*;
use crate::burgers::glimm::ChorinSeed;
use crate::burgers::Sign;

fn burgers(name: &str, description: &str, scheme: SchemeKind, grid: (f64, f64, usize), initial: InitialData, t_final: f64) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        model: Model::Burgers,
        scheme,
        grid: GridSpec { r_min: grid.0, r_max: grid.1, cells: grid.2 },
        params: Params { mass: 1.0, sound_speed: None },
        initial,
        perturbation: None,
        stop: StopSpec { t_final, max_steps: None },
        output: OutputSpec { every: t_final / 4.0 },
        cfl: 0.5,
        seed: ChorinSeed::default(),
    }
}

fn euler(name: &str, description: &str, k: f64, initial: InitialData, t_final: f64) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        model: Model::Euler,
        scheme: SchemeKind::EulerFv,
        grid: GridSpec { r_min: 2.0, r_max: 10.0, cells: 500 },
        params: Params { mass: 1.0, sound_speed: Some(k) },
        initial,
        perturbation: None,
        stop: StopSpec { t_final, max_steps: None },
        output: OutputSpec { every: t_final / 4.0 },
        cfl: 0.5,
        seed: ChorinSeed::default(),
    }
}

fn perturbed(mut s: Scenario, p: Perturbation) -> Scenario {
    s.perturbation = Some(p);
    s
}

const STEADY_POS: BranchSpec = BranchSpec::Family { sign: Sign::Plus, k: std::f64::consts::FRAC_1_SQRT_2 };
const STEADY_HALF: BranchSpec = BranchSpec::Family { sign: Sign::Plus, k: 0.5 };
const STEADY_NEG: BranchSpec = BranchSpec::Family { sign: Sign::Minus, k: 0.5 };
const SHOCK: InitialData = InitialData::BurgersSteadyShock { k: 0.5, shock_radius: 3.0 };

fn euler_anchor(rho: f64, v: f64) -> EulerAnchor {
    EulerAnchor { rho, v }
}

/// Euler perturbation with the default amplitudes `(0.2, 0.05)` for `(ρ, v)`.
fn euler_perturbation(shape: Shape) -> Perturbation {
    Perturbation { center: 6.0, half_width: 1.0, amplitude: 0.05, density_amplitude: 0.2, shape }
}

pub fn catalog() -> Vec<Scenario> {
    use SchemeKind::*;
    let small = (2.0, 4.0, 256);
    let pos = InitialData::BurgersSteady { branch: STEADY_HALF };
    let neg = InitialData::BurgersSteady { branch: STEADY_NEG };
    let shock_right = InitialData::BurgersGrp { left: STEADY_POS, right: BranchSpec::Family { sign: Sign::Plus, k: 1.0 }, r0: 2.5 };
    let shock_left = InitialData::BurgersGrp {
        left: BranchSpec::Family { sign: Sign::Minus, k: 1.0 },
        right: BranchSpec::Point { r: 2.5, v: -(0.85f64.sqrt()) },
        r0: 2.5,
    };
    let general = |v_horizon: f64, v_infinity: f64| InitialData::BurgersGeneral { v_horizon, v_infinity, center: 6.0, width: 2.0 };
    let e_pos = InitialData::EulerSteady { r0: 10.0, anchor: euler_anchor(1.0, 0.6) };
    let e_neg = InitialData::EulerSteady { r0: 10.0, anchor: euler_anchor(1.0, -0.8) };
    let e_shock = InitialData::EulerSteadyShock { r0: 6.0, left: euler_anchor(1.0, 0.8) };
    vec![
        burgers("burgers/steady_pos_glimm", "positive steady branch under Glimm", Glimm, small, pos.clone(), 20.0),
        burgers("burgers/steady_neg_glimm", "negative steady branch under Glimm", Glimm, small, neg.clone(), 20.0),
        burgers("burgers/steady_shock_glimm", "steady shock at r = 3 under Glimm", Glimm, small, SHOCK, 20.0),
        burgers("burgers/steady_preserve", "positive steady branch, second-order FV", Fv2, small, pos, 20.0),
        burgers("burgers/steady_neg_preserve", "negative steady branch, second-order FV", Fv2, small, neg, 20.0),
        burgers("burgers/steady_shock_preserve", "steady shock at r = 3, second-order FV", Fv2, small, SHOCK, 20.0),
        burgers("burgers/shock_right", "generalized Riemann problem, shock moving outward", Fv2, (2.0, 4.0, 512), shock_right, 4.0),
        burgers("burgers/shock_left", "generalized Riemann problem, shock moving inward", Fv2, (2.0, 4.0, 512), shock_left, 2.0),
        perturbed(
            burgers(
                "burgers/perturbed_steady",
                "bump on the positive steady branch",
                Glimm,
                (2.0, 4.0, 512),
                InitialData::BurgersSteady { branch: STEADY_POS },
                20.0,
            ),
            Perturbation { center: 3.0, half_width: 0.5, amplitude: -0.1, density_amplitude: 0.0, shape: Shape::Bump },
        ),
        perturbed(
            burgers("burgers/perturbed_steady_shock", "bump right of a steady shock", Glimm, small, SHOCK, 100.0),
            Perturbation { center: 3.5, half_width: 0.3, amplitude: 0.05, density_amplitude: 0.0, shape: Shape::Bump },
        ),
        burgers(
            "burgers/general_lightspeed",
            "v = 1 near the horizon, vanishing at infinity",
            Fv2,
            (2.0, 20.0, 400),
            general(1.0, 0.0),
            30.0,
        ),
        burgers("burgers/general_critical", "v < 1 at the horizon, positive at infinity", Fv2, (2.0, 20.0, 400), general(0.5, 0.5), 400.0),
        burgers("burgers/general_negative", "v < 1 at the horizon, negative at infinity", Fv2, (2.0, 20.0, 400), general(0.5, -0.5), 100.0),
        burgers(
            "burgers/random_bv_glimm",
            "piecewise constant z data under Glimm",
            Glimm,
            small,
            InitialData::BurgersPiecewiseZ { z: vec![0.8, -0.3, 0.5, -0.9, 0.1, 0.6, -0.6, 0.2] },
            5.0,
        ),
        euler("euler/steady_sub_super", "steady branch with v(10) = 0.6", 0.2, e_pos, 50.0),
        euler("euler/steady_sub_super_neg", "steady branch with v(10) = -0.8", 0.2, e_neg.clone(), 50.0),
        euler("euler/steady_shock", "standing shock joined at r = 6", 0.25, e_shock.clone(), 50.0),
        euler(
            "euler/grp_rs",
            "density jump on subsonic outflow",
            0.5,
            InitialData::EulerGrp { r0: 6.0, left: euler_anchor(2.0, 0.05), right: euler_anchor(1.0, 0.05) },
            2.0,
        ),
        euler(
            "euler/grp_rr",
            "diverging velocity jump",
            0.5,
            InitialData::EulerGrp { r0: 6.0, left: euler_anchor(1.0, -0.1), right: euler_anchor(1.0, 0.1) },
            2.0,
        ),
        perturbed(
            euler("euler/perturbed_steady", "zero-mean perturbation of the infall branch", 0.2, e_neg.clone(), 200.0),
            euler_perturbation(Shape::Dipole),
        ),
        perturbed(
            euler("euler/perturbed_steady_mass", "positive-mean perturbation of the infall branch", 0.2, e_neg, 200.0),
            euler_perturbation(Shape::Bump),
        ),
        perturbed(euler("euler/perturbed_steady_shock", "perturbation left of a standing shock", 0.25, e_shock, 200.0), {
            let mut p = euler_perturbation(Shape::Bump);
            p.center = 4.0;
            p
        }),
    ]
}

pub fn find(name: &str) -> Option<Scenario> {
    catalog().into_iter().find(|s| s.name == name)
}
