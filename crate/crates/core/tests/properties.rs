use proptest::prelude::*;

use hdg_core::cases::free_stream;
use hdg_core::mesh::generate::unit_square_level;
use hdg_core::mesh::reference::ReferenceElement;
use hdg_core::physics::{
    conservative_from_primitive, eigendecompose, inviscid_normal_flux, normal_jacobian, primitives, GasModel, NVAR,
};
use hdg_core::riemann::{dg_reference_flux, stabilization_tau, trace_flux, RiemannScheme};
use hdg_core::shock::{c0_smooth, persson_sensor, SensorConfig};
use hdg_core::solver::{ArtificialViscosity, Discretization, State};
use hdg_core::verification::{convergence_rate, ConvergenceTable};

fn gas() -> GasModel {
    GasModel::inviscid(0.5)
}

prop_compose! {
    fn state()(rho in 0.1..5.0f64, p in 0.05..10.0f64, mach in 0.0..4.0f64, a in 0.0..std::f64::consts::TAU)
        -> [f64; NVAR] {
        let s = mach * (1.4 * p / rho).sqrt();
        conservative_from_primitive(rho, [s * a.cos(), s * a.sin()], p, 1.4)
    }
}

prop_compose! {
    fn normal()(a in 0.0..std::f64::consts::TAU) -> [f64; 2] {
        [a.cos(), a.sin()]
    }
}

fn scheme() -> impl Strategy<Value = RiemannScheme> {
    prop_oneof![
        Just(RiemannScheme::LaxFriedrichs),
        (0.0..0.5f64).prop_map(|delta| RiemannScheme::Roe { delta }),
        Just(RiemannScheme::Hll),
        Just(RiemannScheme::Hlle),
        (1e-8..0.9f64).prop_map(|theta0| RiemannScheme::Hllem { theta0 }),
    ]
}

/// Eigenvalues of `a - b` for matrices diagonal in the characteristic basis.
fn spectrum_gap(u: &[f64; NVAR], n: [f64; 2], a: RiemannScheme, b: RiemannScheme) -> f64 {
    let g = gas();
    let (r, lambda, l) = eigendecompose(u, n, &g).unwrap();
    let d = stabilization_tau(a, u, n, &g).unwrap().tau - stabilization_tau(b, u, n, &g).unwrap().tau;
    let m = l * d * r;
    (0..NVAR).map(|i| m[(i, i)]).fold(f64::INFINITY, f64::min) / lambda.amax().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fluxes_are_consistent(u in state(), n in normal(), s in scheme()) {
        let f = inviscid_normal_flux(&u, n, 1.4);
        let scale = f.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for fh in [trace_flux(&u, &u, n, s, &gas()).unwrap(), dg_reference_flux(&u, &u, n, s, &gas())] {
            for i in 0..NVAR {
                prop_assert!((fh[i] - f[i]).abs() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn dg_flux_is_conservative(a in state(), b in state(), n in normal(), s in scheme()) {
        let f = dg_reference_flux(&a, &b, n, s, &gas());
        let back = dg_reference_flux(&b, &a, [-n[0], -n[1]], s, &gas());
        let scale = f.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..NVAR {
            prop_assert!((f[i] + back[i]).abs() <= 1e-12 * scale, "{i}: {} {}", f[i], back[i]);
        }
    }

    #[test]
    fn dissipation_is_ordered(u in state(), n in normal()) {
        let roe = RiemannScheme::Roe { delta: 0.0 };
        let fixed = RiemannScheme::Roe { delta: 0.3 };
        let hllem = RiemannScheme::Hllem { theta0: 1e-8 };
        prop_assert!(spectrum_gap(&u, n, RiemannScheme::LaxFriedrichs, roe) >= -1e-12);
        prop_assert!(spectrum_gap(&u, n, RiemannScheme::Hll, hllem) >= -1e-12);
        prop_assert!(spectrum_gap(&u, n, fixed, roe) >= -1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs_jacobian(u in state(), n in normal()) {
        let g = gas();
        let (r, lambda, l) = eigendecompose(&u, n, &g).unwrap();
        let a = normal_jacobian(&u, n, &g).unwrap();
        let rl = r * nalgebra::Matrix4::from_diagonal(&lambda) * l;
        prop_assert!((a - rl).norm() <= 1e-12 * a.norm().max(1.0));
        prop_assert!((l * r - nalgebra::Matrix4::identity()).norm() < 1e-10);
    }

    #[test]
    fn primitive_round_trip(rho in 0.01..10.0f64, vx in -5.0..5.0f64, vy in -5.0..5.0f64, p in 0.01..10.0f64) {
        let u = conservative_from_primitive(rho, [vx, vy], p, 1.4);
        let w = primitives(&u, &gas()).unwrap();
        prop_assert!((w.rho - rho).abs() < 1e-12 * rho);
        prop_assert!((w.p - p).abs() < 1e-10 * (1.0 + p));
        prop_assert!((w.v[0] - vx).abs() < 1e-12 && (w.v[1] - vy).abs() < 1e-12);
    }

    #[test]
    fn rates_are_scale_invariant(e0 in 1e-6..1.0f64, r in 0.5..5.0f64, scale in 1e-3..1e3f64) {
        let mut a = ConvergenceTable::default();
        let mut b = ConvergenceTable::default();
        for i in 0..3 {
            let h = 0.5f64.powi(i);
            let e = e0 * h.powf(r) * (1.0 + 0.1 * i as f64);
            a.push(h, 1, vec![e]);
            b.push(h, 1, vec![e * scale]);
        }
        let (ra, rb) = (convergence_rate(&a).unwrap()[0], convergence_rate(&b).unwrap()[0]);
        prop_assert!((ra.last - rb.last).abs() < 1e-10 && (ra.fit - rb.fit).abs() < 1e-10);
    }

    #[test]
    fn sensor_is_scale_invariant(k in 2usize..6, seed in proptest::collection::vec(-1.0..1.0f64, 28), c in 0.1..100.0f64) {
        let re = ReferenceElement::new(k);
        let p = re.top_mode_projection();
        let rho: Vec<f64> = seed.iter().take(re.n_nodes()).map(|x| 2.0 + x).collect();
        let scaled: Vec<f64> = rho.iter().map(|x| c * x).collect();
        let a = persson_sensor(&rho, &re.inv_vandermonde, &p).unwrap();
        let b = persson_sensor(&scaled, &re.inv_vandermonde, &p).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn smoothing_stays_within_elemental_bounds(vals in proptest::collection::vec(0.0..1.0f64, 32)) {
        let mesh = unit_square_level(2, 2).unwrap();
        let re = ReferenceElement::new(2);
        let smooth = c0_smooth(&mesh, &vals, &re.nodes);
        let hi = vals.iter().cloned().fold(0.0, f64::max);
        let lo = vals.iter().cloned().fold(1.0, f64::min);
        for v in smooth.iter().flatten() {
            prop_assert!(*v >= lo - 1e-15 && *v <= hi + 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn free_stream_is_a_steady_state(mach in 0.1..3.0f64, alpha in -1.5..1.5f64, k in 1usize..4, s in scheme()) {
        let g = GasModel::inviscid(mach);
        let mesh = unit_square_level(1, k).unwrap();
        let disc = Discretization::new(free_stream(mesh, g, s, alpha, SensorConfig::default())).unwrap();
        let state = State::uniform(&disc, g.free_stream(alpha));
        let (c, t) = disc.steady_residual(&state, &ArtificialViscosity::default());
        prop_assert!(c < 1e-11 && t < 1e-11, "{c:e} {t:e}");
    }
}
