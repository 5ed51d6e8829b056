use hdg_core::cases::{couette_setup, free_stream, ringleb_setup, ringleb_state};
use hdg_core::mesh::generate::{from_linear, unit_square};
use hdg_core::physics::GasModel;
use hdg_core::riemann::RiemannScheme;
use hdg_core::shock::SensorConfig;
use hdg_core::solver::{
    newton_march, ArtificialViscosity, Discretization, LinearSolve, MarchConfig, State, TimeTerm,
};
use hdg_core::verification::l2_error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perturb(state: &mut State, amp: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for z in &mut state.z {
        for v in z.iter_mut() {
            *v *= 1.0 + amp * rng.gen_range(-1.0..1.0);
        }
    }
    for v in &mut state.u_hat {
        *v *= 1.0 + amp * rng.gen_range(-1.0..1.0);
    }
}

/// Checks every element Jacobian block against central differences.
fn check_jacobians(disc: &Discretization, state: &State, av: &ArtificialViscosity, inv_dt: f64) {
    let h = 1e-6;
    let ne = disc.mesh().n_elements();
    for e in ne - 3..ne {
        let lam = disc.gather_trace(e, &state.u_hat);
        let z = state.z[e].clone();
        let zp: Vec<f64> = z.iter().map(|v| v * 0.99).collect();
        let time = TimeTerm {
            inv_dt,
            z_prev: Some(&zp),
        };
        let b = disc.element_blocks(e, &z, &lam, time, av);
        let scale = b.a_zz.amax().max(b.a_ll.amax()).max(1.0);
        for j in 0..z.len() {
            let mut zp1 = z.clone();
            let mut zm1 = z.clone();
            zp1[j] += h;
            zm1[j] -= h;
            let bp = disc.element_blocks(e, &zp1, &lam, time, av);
            let bm = disc.element_blocks(e, &zm1, &lam, time, av);
            for i in 0..z.len() {
                let fd = (bp.r_z[i] - bm.r_z[i]) / (2.0 * h);
                assert!((fd - b.a_zz[(i, j)]).abs() < 1e-6 * scale, "A_zz[{i},{j}] {fd} vs {}", b.a_zz[(i, j)]);
            }
            for i in 0..lam.len() {
                let fd = (bp.r_hat[i] - bm.r_hat[i]) / (2.0 * h);
                assert!((fd - b.a_lz[(i, j)]).abs() < 1e-6 * scale, "A_lz[{i},{j}] {fd} vs {}", b.a_lz[(i, j)]);
            }
        }
        for j in 0..lam.len() {
            let mut lp = lam.clone();
            let mut lm = lam.clone();
            lp[j] += h;
            lm[j] -= h;
            let bp = disc.element_blocks(e, &z, &lp, time, av);
            let bm = disc.element_blocks(e, &z, &lm, time, av);
            for i in 0..z.len() {
                let fd = (bp.r_z[i] - bm.r_z[i]) / (2.0 * h);
                assert!((fd - b.a_zl[(i, j)]).abs() < 1e-6 * scale, "A_zl[{i},{j}] {fd} vs {}", b.a_zl[(i, j)]);
            }
            for i in 0..lam.len() {
                let fd = (bp.r_hat[i] - bm.r_hat[i]) / (2.0 * h);
                assert!((fd - b.a_ll[(i, j)]).abs() < 1e-6 * scale, "A_ll[{i},{j}] {fd} vs {}", b.a_ll[(i, j)]);
            }
        }
    }
}

#[test]
fn euler_jacobians_match_finite_differences() {
    for scheme in [RiemannScheme::LaxFriedrichs, RiemannScheme::Hllem { theta0: 0.5 }] {
        let (disc, mut state) = ringleb_setup(1, 2, scheme).unwrap();
        perturb(&mut state, 0.02, 1);
        let av = ArtificialViscosity {
            laplacian: vec![vec![0.01; disc.n]; disc.mesh().n_elements()],
            ..Default::default()
        };
        check_jacobians(&disc, &state, &av, 3.0);
    }
}

#[test]
fn navier_stokes_jacobians_match_finite_differences() {
    let (disc, mut state) = couette_setup(1, 2, 10.0, RiemannScheme::Roe { delta: 0.1 }).unwrap();
    perturb(&mut state, 0.02, 2);
    let av = ArtificialViscosity {
        bulk: vec![vec![0.05; disc.n]; disc.mesh().n_elements()],
        ..Default::default()
    };
    check_jacobians(&disc, &state, &av, 0.0);
}

#[test]
fn condensed_and_monolithic_updates_agree() {
    let (v, t, b) = hdg_core::mesh::generate::unit_square_linear(1);
    let (disc, mut state) = {
        let mesh = from_linear(2, v, t, &b).unwrap();
        let gas = GasModel::inviscid(0.5);
        let disc = Discretization::new(free_stream(mesh, gas, RiemannScheme::Hll, 0.1, SensorConfig::default())).unwrap();
        let state = State::uniform(&disc, gas.free_stream(0.1));
        (disc, state)
    };
    perturb(&mut state, 0.05, 3);
    let av = ArtificialViscosity::default();
    let zp = state.z.clone();
    let a = disc.linearized_update(&state, Some(&zp), 2.0, &av, LinearSolve::Condensed).unwrap();
    let b = disc.linearized_update(&state, Some(&zp), 2.0, &av, LinearSolve::Monolithic).unwrap();
    let diff = a
        .dz
        .iter()
        .flatten()
        .zip(b.dz.iter().flatten())
        .chain(a.du_hat.iter().zip(&b.du_hat))
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-9, "max difference {diff}");
}

#[test]
fn free_stream_is_preserved() {
    for k in 1..=3 {
        let mesh = unit_square(2, k).unwrap();
        let gas = GasModel::inviscid(0.8);
        for scheme in RiemannScheme::STUDY {
            let disc = Discretization::new(free_stream(mesh.clone(), gas, scheme, 0.3, SensorConfig::default())).unwrap();
            let state = State::uniform(&disc, gas.free_stream(0.3));
            let (c, t) = disc.steady_residual(&state, &ArtificialViscosity::default());
            assert!(c < 1e-11 && t < 1e-11, "k={k} {scheme:?}: {c:e} {t:e}");
        }
    }
}

#[test]
fn ringleb_converges_from_perturbed_exact_state() {
    let (disc, mut state) = ringleb_setup(2, 2, RiemannScheme::Hll).unwrap();
    perturb(&mut state, 0.01, 4);
    let cfg = MarchConfig {
        dt: f64::INFINITY,
        tol_continuity: 1e-10,
        max_steps: 20,
        ..Default::default()
    };
    let out = newton_march(&disc, &mut state, &cfg);
    assert!(out.converged, "{:?} {:?}", out.failure, out.history);
    let err = l2_error(disc.mesh(), &state.all_u(&disc), |x| ringleb_state(x));
    assert!(err[0] < 1e-3, "{err:?}");
}

#[test]
fn couette_converges_with_pseudo_time() {
    let (disc, mut state) = couette_setup(2, 2, 1.0, RiemannScheme::Hllem { theta0: 0.5 }).unwrap();
    perturb(&mut state, 0.01, 5);
    let cfg = MarchConfig {
        dt: 1.0,
        growth: 10.0,
        tol_continuity: 1e-10,
        max_steps: 30,
        ..Default::default()
    };
    let out = newton_march(&disc, &mut state, &cfg);
    assert!(out.converged, "{:?}", out.history);
}
