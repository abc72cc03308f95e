mod common;

use common::*;
use morh2w_core::matdense::{Mat, C64};
use morh2w_core::norms::h2_norm;
use morh2w_core::optimality::{
    fd_gradient, fd_gradient_of, interpolation_residuals, report_from_partition, trace_splits, weighted_gramians,
    weighted_gramians_blockwise, Objective, RomParameter,
};
use morh2w_core::statespace::{eval_tf, weighted_error_realization};
use proptest::prelude::*;

fn within(fd: &Mat, exact: &Mat) -> bool {
    (fd - exact).amax() <= 1e-5f64.max(1e-4 * exact.amax())
}

#[test]
fn gradients_match_central_differences() {
    let mut g = rng(2024);
    for case in 0..20 {
        let n = 4 + case % 3;
        let r = 1 + case % 2;
        let (prob, rom) = random_weighted_case(&mut g, n, r, 1, 1);
        let gp = weighted_gramians(&prob, &rom).unwrap();
        let rep = report_from_partition(&prob, &rom, &gp, None).unwrap();
        let (wi, wo) = (prob.input_weight(), prob.output_weight());
        let grad_a = (&rep.xbar + &rep.x) * 2.0;
        let grad_b = (&rep.ybar * wi.d() * wi.d().transpose() + &rep.y) * 2.0;
        let grad_c = (wo.d().transpose() * wo.d() * &rep.zbar + &rep.z) * 2.0;
        let fa = fd_gradient(&prob, &rom, RomParameter::A, None).unwrap();
        let fb = fd_gradient(&prob, &rom, RomParameter::B, None).unwrap();
        let fc = fd_gradient(&prob, &rom, RomParameter::C, None).unwrap();
        assert!(within(&fa, &grad_a), "case {case}: A\n{fa}\n{grad_a}");
        assert!(within(&fb, &grad_b), "case {case}: B\n{fb}\n{grad_b}");
        assert!(within(&fc, &grad_c), "case {case}: C\n{fc}\n{grad_c}");
    }
}

#[test]
fn split_gradients_reduce_to_the_unweighted_terms() {
    let mut g = rng(77);
    for _ in 0..5 {
        let (prob, rom) = random_weighted_case(&mut g, 5, 2, 2, 2);
        let gp = weighted_gramians(&prob, &rom).unwrap();
        let rep = report_from_partition(&prob, &rom, &gp, None).unwrap();
        let (wi, wo) = (prob.input_weight(), prob.output_weight());
        let j1_c = fd_gradient_of(&prob, &rom, RomParameter::C, Objective::J1, None).unwrap();
        let expect_c = wo.d().transpose() * wo.d() * &rep.zbar * 2.0;
        assert!(within(&j1_c, &expect_c), "{j1_c}\n{expect_c}");
        let j3_b = fd_gradient_of(&prob, &rom, RomParameter::B, Objective::J3, None).unwrap();
        let expect_b = &rep.ybar * wi.d() * wi.d().transpose() * 2.0;
        assert!(within(&j3_b, &expect_b), "{j3_b}\n{expect_b}");
    }
}

#[test]
fn multi_io_gradients() {
    let mut g = rng(9);
    let (prob, rom) = random_weighted_case(&mut g, 5, 2, 2, 3);
    let gp = weighted_gramians(&prob, &rom).unwrap();
    let rep = report_from_partition(&prob, &rom, &gp, None).unwrap();
    let grad_a = (&rep.xbar + &rep.x) * 2.0;
    let fa = fd_gradient(&prob, &rom, RomParameter::A, None).unwrap();
    assert!(within(&fa, &grad_a));
}

#[test]
fn illustrative_partition_traces() {
    let prob = illus_problem(2);
    let rom = illus_init();
    let gp = weighted_gramians(&prob, &rom).unwrap();
    let (j1, j2, j3, j4) = trace_splits(&prob, &rom, &gp);
    let h2 = h2_norm(&weighted_error_realization(&prob, &rom).unwrap()).unwrap();
    assert!(((j1 + j2) - h2 * h2).abs() <= 1e-10 * h2 * h2);
    assert!(((j3 + j4) - h2 * h2).abs() <= 1e-10 * h2 * h2);
}

#[test]
fn interpolation_residuals_vanish_without_weights_at_exact_poles() {
    // a reduced model equal to a modal part of the plant interpolates nothing in
    // general; here we only check that the residual computation runs and is finite
    let prob = illus_problem(2);
    let rom = illus_init();
    let gp = weighted_gramians(&prob, &rom).unwrap();
    let res = interpolation_residuals(&prob, &rom, &gp).unwrap();
    assert_eq!(res.right.len(), 2);
    assert!(res.max_right().is_finite() && res.max_left().is_finite());
    let _ = eval_tf(prob.plant(), C64::new(0.0, 1.0)).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blockwise_partition_matches_full(seed in any::<u64>(), n in 3usize..7, r in 1usize..3) {
        let mut g = rng(seed);
        let (prob, rom) = random_weighted_case(&mut g, n, r, 1, 1);
        let full = weighted_gramians(&prob, &rom).unwrap();
        let blocks = weighted_gramians_blockwise(&prob, &rom).unwrap();
        let pf = full.full_p();
        let qf = full.full_q();
        prop_assert!(rel_err(&blocks.full_p(), &pf) <= 1e-8);
        prop_assert!(rel_err(&blocks.full_q(), &qf) <= 1e-8);
        let sym = |m: &Mat| (m - m.transpose()).norm() <= 1e-12 * m.norm().max(1e-300);
        prop_assert!(sym(&pf) && sym(&qf));
        let ev = jacobi_eigenvalues(&pf);
        let big = ev.iter().cloned().fold(0.0, f64::max);
        prop_assert!(ev.iter().all(|&e| e >= -1e-10 * big));
    }

    #[test]
    fn trace_identity(seed in any::<u64>(), n in 3usize..7, r in 1usize..3) {
        let mut g = rng(seed);
        let (prob, rom) = random_weighted_case(&mut g, n, r, 2, 1);
        let gp = weighted_gramians(&prob, &rom).unwrap();
        let (j1, j2, j3, j4) = trace_splits(&prob, &rom, &gp);
        let scale = (j1 + j2).abs().max(1e-300);
        prop_assert!(((j1 + j2) - (j3 + j4)).abs() <= 1e-9 * scale);
    }
}
