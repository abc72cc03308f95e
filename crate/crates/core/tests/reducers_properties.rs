mod common;

use common::*;
use morh2w_core::matdense::{eigenvalues, norm2, Mat, C64};
use morh2w_core::optimality::deviation_report;
use morh2w_core::reducers::{
    biorthogonalize, default_initial_rom, fwbt, fwhmor, fwitia, FwhmorOptions, FwitiaConfig, ReductionResult,
};
use morh2w_core::statespace::{eval_tf, StateSpace, WeightedProblem};
use morh2w_core::Error;
use nalgebra::DVector;
use proptest::prelude::*;

fn log_frequencies(k: usize) -> Vec<f64> {
    (0..k).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (k - 1) as f64)).collect()
}

fn tf_rel_gap(a: &StateSpace, b: &StateSpace) -> f64 {
    log_frequencies(20)
        .into_iter()
        .map(|w| {
            let s = C64::new(0.0, w);
            let ga = eval_tf(a, s).unwrap();
            let gb = eval_tf(b, s).unwrap();
            (&ga - gb).norm() / ga.norm().max(1e-300)
        })
        .fold(0.0, f64::max)
}

fn both_iterations(prob: &WeightedProblem, init: &StateSpace) -> (ReductionResult, ReductionResult) {
    let opts = FwhmorOptions::default();
    let a = fwhmor(prob, init, &opts).unwrap();
    let cfg = FwitiaConfig::from_rom(init).unwrap();
    let b = fwitia(prob, &cfg, &opts).unwrap();
    (a, b)
}

#[test]
fn interpolation_and_fixed_point_iterations_coincide() {
    let mut cases = vec![(illus_problem(2), illus_init())];
    let mut g = rng(41);
    for _ in 0..5 {
        let prob = random_siso_problem(&mut g, 6, 2, true);
        let init = default_initial_rom(&prob).unwrap();
        cases.push((prob, init));
    }
    for (prob, init) in &cases {
        let (a, b) = both_iterations(prob, init);
        assert_eq!(a.iterations, b.iterations);
        let gap = tf_rel_gap(&a.rom, &b.rom);
        assert!(gap <= 1e-4, "transfer functions differ by {gap}");
        let angle = subspace_angle(&a.v, &b.v).max(subspace_angle(&a.w, &b.w));
        assert!(angle <= 1e-5, "subspace angle {angle}");
    }
}

#[test]
fn identity_weights_give_classical_interpolation() {
    let mut g = rng(7);
    let opts = FwhmorOptions { pole_tol: 1e-10, max_iters: 500, ..Default::default() };
    for _ in 0..10 {
        let prob = random_siso_problem(&mut g, 6, 2, false);
        let init = default_initial_rom(&prob).unwrap();
        let res = fwhmor(&prob, &init, &opts).unwrap();
        assert!(res.converged);
        for lam in eigenvalues(res.rom.a()).unwrap() {
            let s = -lam;
            let h = eval_tf(prob.plant(), s).unwrap();
            let hr = eval_tf(&res.rom, s).unwrap();
            let rel = (&h - hr).norm() / h.norm();
            assert!(rel <= 1e-6, "interpolation mismatch {rel} at {s}");
        }
        let rep = deviation_report(&prob, &res.rom, &res.v, &res.w).unwrap();
        assert!(norm2(&rep.ybar) <= 1e-6, "{}", norm2(&rep.ybar));
        assert!(norm2(&rep.zbar) <= 1e-6, "{}", norm2(&rep.zbar));
        assert!(norm2(&(&rep.xbar + &rep.x)) <= 1e-6);
    }
}

#[test]
fn history_matches_iterations() {
    let prob = illus_problem(2);
    let res = fwhmor(&prob, &illus_init(), &FwhmorOptions::default()).unwrap();
    assert_eq!(res.history.len(), res.iterations);
    let changes = res.history.pole_changes();
    assert!(changes[0].is_infinite());
    assert!(changes[1..].iter().all(|c| c.is_finite()));
    assert!(res.history.records.iter().all(|r| r.poles.len() == 2 && r.e1.is_finite()));
    assert!(res.p_hat.is_some() && res.q_hat.is_some());
}

#[test]
fn persistent_instability_is_reported() {
    let prob = illus_problem(3);
    let init = default_initial_rom(&prob).unwrap();
    let err = fwhmor(&prob, &init, &FwhmorOptions::default()).unwrap_err();
    assert!(matches!(err, Error::UnstableIterate { consecutive: 5, .. }), "{err}");
}

#[test]
fn balanced_truncation_with_identity_weights_uses_hankel_values() {
    let mut g = rng(3);
    for _ in 0..5 {
        let prob = random_siso_problem(&mut g, 5, 2, false);
        let h = prob.plant();
        let p = kron_sylvester(h.a(), &h.a().transpose(), &(h.b() * h.b().transpose()));
        let q = kron_sylvester(&h.a().transpose(), h.a(), &(h.c().transpose() * h.c()));
        let l = q.cholesky().expect("observability gramian is positive definite").l();
        let mut hsv: Vec<f64> =
            jacobi_eigenvalues(&(l.transpose() * p * &l)).iter().map(|e| e.max(0.0).sqrt()).collect();
        hsv.sort_by(|a, b| b.total_cmp(a));
        let res = fwbt(&prob).unwrap();
        let got = &res.diagnostics.singular_values;
        for (x, y) in got.iter().zip(&hsv) {
            assert!((x - y).abs() <= 1e-8 * hsv[0], "{x} vs {y}");
        }
    }
}

#[test]
fn balanced_truncation_needs_enough_rank() {
    let a = Mat::from_diagonal(&DVector::from_column_slice(&[-1.0, -2.0, -3.0, -4.0]));
    let b = Mat::from_column_slice(4, 1, &[1.0, 0.0, 0.0, 0.0]);
    let c = Mat::from_element(1, 4, 1.0);
    let plant = StateSpace::new(a, b, c, Mat::zeros(1, 1)).unwrap();
    let prob = WeightedProblem::unweighted(plant, 2).unwrap();
    assert!(matches!(fwbt(&prob), Err(Error::RankTooLow { rank: 1, order: 2 })));
}

#[test]
fn interpolation_data_is_validated() {
    let one = || DVector::from_element(1, C64::new(1.0, 0.0));
    let pts = vec![C64::new(1.0, 2.0), C64::new(1.0, -1.0)];
    assert!(matches!(FwitiaConfig::new(pts, vec![one(), one()], vec![one(), one()]), Err(Error::InvalidOption(_))));
    let pts = vec![C64::new(-1.0, 0.0), C64::new(2.0, 0.0)];
    assert!(matches!(FwitiaConfig::new(pts, vec![one(), one()], vec![one(), one()]), Err(Error::InvalidOption(_))));
    let pts = vec![C64::new(1.0, -2.0), C64::new(1.0, 2.0)];
    let cfg = FwitiaConfig::new(pts, vec![one(), one()], vec![one(), one()]).unwrap();
    assert!(cfg.points[0].im > 0.0);
}

#[test]
fn reduced_model_gramians_are_consistent() {
    // P̂ = V P̃ Vᵀ must satisfy rank ≤ r and stay positive semidefinite.
    let prob = illus_problem(2);
    let res = fwhmor(&prob, &illus_init(), &FwhmorOptions::default()).unwrap();
    let ph = res.p_hat.unwrap();
    let ev = jacobi_eigenvalues(&ph);
    let big = ev.iter().cloned().fold(0.0, f64::max);
    assert!(ev.iter().all(|&e| e >= -1e-12 * big));
    assert_eq!(ev.iter().filter(|&&e| e > 1e-10 * big).count(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn biorthogonalization_properties(seed in any::<u64>(), n in 3usize..9, r in 1usize..3) {
        let mut g = rng(seed);
        let x = random_mat(&mut g, n, r);
        let y = random_mat(&mut g, n, r);
        match biorthogonalize(&x, &y) {
            Ok((v, w)) => {
                let err = (w.transpose() * &v - Mat::identity(r, r)).norm();
                prop_assert!(err <= 1e-10 * r as f64 * (1.0 + v.norm() * w.norm()));
                prop_assert!(subspace_angle(&x, &v) <= 1e-8);
                prop_assert!(subspace_angle(&y, &w) <= 1e-8);
            }
            Err(e) => {
                let expected = matches!(e, Error::PivotBreakdown { .. } | Error::RankDeficient { .. });
                prop_assert!(expected);
            }
        }
    }
}
