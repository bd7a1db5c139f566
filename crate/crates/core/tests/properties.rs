use horizon_flow::burgers::fv::{BurgersFv, BurgersFvConfig, Order};
use horizon_flow::burgers::glimm::{glimm_step, ChorinSeed, ChorinSequence};
use horizon_flow::burgers::grp::{GrpData, GrpSolution};
use horizon_flow::burgers::model::{flat_riemann, z_extended, z_of_v};
use horizon_flow::burgers::{Sign, SteadyBurgers};
use horizon_flow::euler::fv::{conserved_snapshot, EulerFv};
use horizon_flow::euler::model::{ln_energy_invariant, mass_flux_invariant, to_conserved, to_primitive};
use horizon_flow::euler::{EulerParams, EulerState, SteadyEuler};
use horizon_flow::grid::{l1_distance, total_variation, FieldSnapshot, Scheme};
use horizon_flow::scenarios::config::Model;
use horizon_flow::scenarios::detect::{classify_burgers, Regime, Tolerances};
use horizon_flow::scenarios::output::fmt_g17;
use horizon_flow::scenarios::{build_initial, catalog, Scenario};
use horizon_flow::{Exec, Grid};
use proptest::prelude::*;

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn snapshot(values: Vec<f64>) -> FieldSnapshot {
    let g = Grid::new(1.0, 2.0, 4.0, values.len()).unwrap();
    FieldSnapshot::new(g, 0.0, 1, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn l1_is_a_metric(
        a in prop::collection::vec(-1.0f64..1.0, 16),
        b in prop::collection::vec(-1.0f64..1.0, 16),
        c in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let (a, b, c) = (snapshot(a), snapshot(b), snapshot(c));
        let ab = l1_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, l1_distance(&b, &a).unwrap());
        prop_assert!(ab <= l1_distance(&a, &c).unwrap() + l1_distance(&c, &b).unwrap() + 1e-15);
        prop_assert_eq!(l1_distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab == 0.0, a.values == b.values);
    }

    #[test]
    fn total_variation_ignores_a_repeated_end(v in prop::collection::vec(-1.0f64..1.0, 2..40)) {
        let mut w = v.clone();
        w.push(*v.last().unwrap());
        prop_assert_eq!(total_variation(&v).unwrap(), total_variation(&w).unwrap());
    }

    #[test]
    fn steady_point_round_trip(r0 in 2.001f64..100.0, v0 in -0.999f64..0.999) {
        prop_assume!(v0.abs() > 1e-6);
        let b = SteadyBurgers::from_point(r0, v0, 1.0).unwrap();
        let back = b.eval(r0).unwrap();
        prop_assert!((back - v0).abs() <= 1e-13 * v0.abs().max(1.0), "{} vs {}", back, v0);
    }

    #[test]
    fn z_is_constant_on_subcritical_branches(s in sign(), k in 0.0f64..1.0, r1 in 2.01f64..100.0, r2 in 2.01f64..100.0) {
        let b = SteadyBurgers::new(s, k, 1.0).unwrap();
        let z1 = z_of_v(b.eval(r1).unwrap(), r1, 1.0).unwrap();
        let z2 = z_of_v(b.eval(r2).unwrap(), r2, 1.0).unwrap();
        prop_assert!((z1 - z2).abs() <= 1e-12, "{} {}", z1, z2);
    }

    #[test]
    fn z_extended_is_monotone_in_v(r in 2.01f64..50.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(z_extended(lo, r, 1.0).unwrap() <= z_extended(hi, r, 1.0).unwrap());
    }

    #[test]
    fn flat_riemann_stays_between_states(vl in -1.0f64..1.0, vr in -1.0f64..1.0, xi in -2.0f64..2.0) {
        let q = flat_riemann(vl, vr, xi);
        prop_assert!(q >= vl.min(vr) && q <= vl.max(vr));
    }

    #[test]
    fn grp_values_are_velocities(
        sl in sign(), kl in 0.0f64..1.0, sr in sign(), kr in 0.0f64..1.0,
        r0 in 2.2f64..6.0, t in 0.0f64..2.0, dr in -0.5f64..0.5,
    ) {
        let data = GrpData::new(SteadyBurgers::new(sl, kl, 1.0).unwrap(), SteadyBurgers::new(sr, kr, 1.0).unwrap(), r0).unwrap();
        let sol = GrpSolution::new(data);
        if let Ok(v) = sol.eval(t, r0 + dr) {
            prop_assert!(v.abs() <= 1.0);
        }
    }

    #[test]
    fn burgers_fv_keeps_velocities_bounded(v in prop::collection::vec(-1.0f64..1.0, 32), second in any::<bool>()) {
        let s = snapshot(v);
        let order = if second { Order::Second } else { Order::First };
        let mut fv = BurgersFv::new(BurgersFvConfig::new(order)).unwrap();
        let dt = 0.5 * s.grid.dr();
        let next = fv.step(&s, dt).unwrap();
        prop_assert!(next.values.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn glimm_keeps_velocities_bounded(v in prop::collection::vec(-1.0f64..1.0, 32), w in -0.499f64..0.499) {
        let s = snapshot(v);
        let (next, _) = glimm_step(&s, 0.5 * s.grid.dr(), w, Exec::Sequential).unwrap();
        prop_assert!(next.values.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn glimm_reproduces_steady_branches(s in sign(), k in 0.0f64..1.0, w in -0.499f64..0.499) {
        let g = Grid::new(1.0, 2.0, 4.0, 64).unwrap();
        let b = SteadyBurgers::new(s, k, 1.0).unwrap();
        let snap = FieldSnapshot::from_fn(g, 0.0, |r| b.eval(r)).unwrap();
        let (next, _) = glimm_step(&snap, 0.004, w, Exec::Sequential).unwrap();
        for (x, y) in next.values.iter().zip(&snap.values) {
            prop_assert!((x - y).abs() <= 1e-13, "{} {}", x, y);
        }
    }

    #[test]
    fn exec_modes_agree_bitwise(v in prop::collection::vec(-0.99f64..0.99, 128), w in -0.499f64..0.499) {
        let s = snapshot(v);
        let dt = 0.4 * s.grid.dr();
        let a = glimm_step(&s, dt, w, Exec::Sequential).unwrap().0;
        let b = glimm_step(&s, dt, w, Exec::Parallel).unwrap().0;
        prop_assert_eq!(a.values, b.values);
        let mut seq = BurgersFv::new(BurgersFvConfig::new(Order::Second)).unwrap().with_exec(Exec::Sequential);
        let mut par = BurgersFv::new(BurgersFvConfig::new(Order::Second)).unwrap().with_exec(Exec::Parallel);
        prop_assert_eq!(seq.step(&s, dt).unwrap().values, par.step(&s, dt).unwrap().values);
    }

    #[test]
    fn chorin_samples_stay_centred(q0 in 0u64..997, n in 1usize..3000) {
        let mut c = ChorinSequence::new(ChorinSeed { p1: 937, p2: 997, q0 }).unwrap();
        for _ in 0..n {
            let w = c.next_sample();
            prop_assert!(w > -0.5 && w < 0.5);
        }
    }

    #[test]
    fn euler_conversion_round_trip(rho in 1e-3f64..1e3, v in -0.99f64..0.99, k in prop_oneof![Just(0.1), Just(0.5), Just(1.0)]) {
        let p = EulerParams::new(k, 1.0).unwrap();
        let s = to_primitive(to_conserved(EulerState { rho, v }, &p), &p).unwrap();
        prop_assert!((s.rho - rho).abs() <= 1e-12 * rho);
        prop_assert!((s.v - v).abs() <= 1e-12);
    }

    #[test]
    fn euler_invariants_are_constant_on_branches(v10 in prop_oneof![0.5f64..0.9, -0.9f64..-0.5], r in 2.5f64..9.5) {
        let p = EulerParams::new(0.2, 1.0).unwrap();
        let anchor = EulerState { rho: 1.0, v: v10 };
        let b = SteadyEuler::new(p, 10.0, anchor).unwrap();
        prop_assume!(b.contains(r));
        let s = b.extend(r).unwrap();
        prop_assert!((ln_energy_invariant(s, &p, r) - ln_energy_invariant(anchor, &p, 10.0)).abs() <= 1e-10);
        let (m1, m0) = (mass_flux_invariant(s, &p, r), mass_flux_invariant(anchor, &p, 10.0));
        prop_assert!((m1 - m0).abs() <= 1e-10 * m0.abs());
    }

    #[test]
    fn euler_steps_fix_steady_branches(v10 in prop_oneof![0.5f64..0.9, -0.9f64..-0.5], cfl in 0.1f64..0.5) {
        let p = EulerParams::new(0.2, 1.0).unwrap();
        let b = SteadyEuler::new(p, 10.0, EulerState { rho: 1.0, v: v10 }).unwrap();
        let g = Grid::new(1.0, 2.0, 10.0, 100).unwrap();
        prop_assume!(b.contains(g.center(0)));
        let s = conserved_snapshot(g, &p, 0.0, |r| b.extend(r)).unwrap();
        let mut fv = EulerFv::new(p);
        let next = fv.step(&s, cfl * g.dr()).unwrap();
        for (x, y) in next.values.iter().zip(&s.values) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs(), "{} {}", x, y);
        }
    }

    #[test]
    fn g17_round_trips(x in any::<f64>()) {
        let s = fmt_g17(x);
        let back: f64 = s.parse().unwrap();
        if x.is_nan() {
            prop_assert!(back.is_nan());
        } else {
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn scenario_text_round_trip(i in 0usize..14, cells in 8usize..600, t in 0.1f64..50.0) {
        let mut s: Scenario = catalog()[i].clone();
        s.grid.cells = cells;
        s.stop.t_final = t;
        prop_assert_eq!(&Scenario::parse(&s.to_toml().unwrap()).unwrap(), &s);
        prop_assert_eq!(&Scenario::parse(&s.to_json().unwrap()).unwrap(), &s);
    }

    #[test]
    fn detector_recovers_steady_recipes(s in sign(), k in 0.05f64..0.95) {
        let g = Grid::new(1.0, 2.0, 4.0, 200).unwrap();
        let b = SteadyBurgers::new(s, k, 1.0).unwrap();
        let snap = FieldSnapshot::from_fn(g, 0.0, |r| b.eval(r)).unwrap();
        let rep = classify_burgers(&snap, &Tolerances::default());
        prop_assert_eq!(rep.regime, Regime::Steady);
        prop_assert!((rep.k.unwrap() - k).abs() <= 1e-10);
        prop_assert_eq!(rep.sign, Some(s));
    }
}

#[test]
fn unperturbed_catalog_data_fits_its_recipe() {
    for s in catalog() {
        if s.model != Model::Burgers || s.perturbation.is_some() {
            continue;
        }
        if let horizon_flow::scenarios::config::InitialData::BurgersSteady { branch } = &s.initial {
            let b = branch.build(s.params.mass).unwrap();
            let snap = build_initial(&s).unwrap();
            let rep = classify_burgers(&snap, &Tolerances::default());
            assert!((rep.k.unwrap() - b.k()).abs() <= 1e-10, "{}", s.name);
        }
    }
}
