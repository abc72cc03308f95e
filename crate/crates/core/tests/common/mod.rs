#![allow(dead_code)]

use morh2w_core::matdense::{Mat, C64};
use morh2w_core::statespace::{StateSpace, WeightedProblem};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

/// Random matrix shifted so that its eigenvalues have real part at most `-margin`.
/// The shift uses a Gershgorin bound, so no eigensolver is involved.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> Mat {
    let m = random_mat(rng, n, n);
    let radius = (0..n)
        .map(|i| m[(i, i)] + (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = radius + margin * (1.0 + rng.random_range(0.0..1.0));
    m - Mat::identity(n, n) * shift
}

/// Solve AX + XB + C = 0 through the dense vec/Kronecker linear system.
pub fn kron_sylvester(a: &Mat, b: &Mat, c: &Mat) -> Mat {
    let (n, k) = c.shape();
    let op = Mat::identity(k, k).kronecker(a) + b.transpose().kronecker(&Mat::identity(n, n));
    let rhs = -DVector::from_column_slice(c.as_slice());
    let x = op.full_piv_lu().solve(&rhs).expect("Kronecker system singular");
    Mat::from_column_slice(n, k, x.as_slice())
}

pub fn rel_err(x: &Mat, y: &Mat) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}

/// Characteristic polynomial coefficients (monic, highest degree first) by
/// the Faddeev–LeVerrier recursion.
pub fn charpoly(a: &Mat) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = Mat::zeros(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        m = a * &m + Mat::identity(n, n) * c_prev;
        let am = a * &m;
        let ck = -am.trace() / k as f64;
        coeffs.push(ck);
        c_prev = ck;
    }
    coeffs
}

/// Roots of a monic polynomial by Aberth–Ehrlich iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64::new(coeffs[0], 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in &coeffs[1..] {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(bound * 0.7, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            let ratio = p / dp;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += C64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Greedy multiset distance between two complex lists.
pub fn multiset_distance(x: &[C64], y: &[C64]) -> f64 {
    let mut used = vec![false; y.len()];
    let mut worst = 0.0f64;
    for a in x {
        let (mut best, mut bi) = (f64::INFINITY, 0);
        for (j, b) in y.iter().enumerate() {
            if !used[j] && (a - b).norm() < best {
                best = (a - b).norm();
                bi = j;
            }
        }
        used[bi] = true;
        worst = worst.max(best);
    }
    worst
}

/// The illustrative sixth-order plant and its second-order weights.
pub fn illus_plant() -> (Mat, Mat, Mat) {
    let a = DMatrix::from_row_slice(
        6,
        6,
        &[
            0.0, 0.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 1.0, //
            -5.4545, 4.5455, 0.0, -0.0545, 0.0455, 0.0, //
            10.0, -21.0, 11.0, 0.1, -0.21, 0.11, //
            0.0, 5.5, -6.5, 0.0, 0.055, -0.065,
        ],
    );
    let b = DMatrix::from_column_slice(6, 1, &[0.0, 0.0, 0.0, 0.0909, 0.4, -0.5]);
    let c = DMatrix::from_row_slice(1, 6, &[2.0, -2.0, 3.0, 0.0, 0.0, 0.0]);
    (a, b, c)
}

pub fn input_weight() -> (Mat, Mat, Mat) {
    (
        DMatrix::from_row_slice(2, 2, &[-2.0, -4.375, 8.0, 0.0]),
        DMatrix::from_column_slice(2, 1, &[2.0, 0.0]),
        DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
    )
}

pub fn output_weight() -> (Mat, Mat, Mat) {
    (
        DMatrix::from_row_slice(2, 2, &[-5.0, -9.375, 16.0, 0.0]),
        DMatrix::from_column_slice(2, 1, &[2.0, 0.0]),
        DMatrix::from_row_slice(1, 2, &[2.5, 0.0]),
    )
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(s: &Mat) -> Vec<f64> {
    let n = s.nrows();
    let mut a = (s + s.transpose()) * 0.5;
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].powi(2)).sum();
        if off.sqrt() <= 1e-15 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

pub fn illus_problem(order: usize) -> WeightedProblem {
    let ss = |(a, b, c): (Mat, Mat, Mat)| {
        let (p, m) = (c.nrows(), b.ncols());
        StateSpace::new(a, b, c, Mat::zeros(p, m)).unwrap()
    };
    WeightedProblem::new(ss(illus_plant()), ss(input_weight()), ss(output_weight()), order).unwrap()
}

/// Second-order starting model for the illustrative plant.
pub fn illus_init() -> StateSpace {
    StateSpace::new(
        DMatrix::from_row_slice(2, 2, &[0.0332, 5.4109, -4.8283, -0.2998]),
        DMatrix::from_column_slice(2, 1, &[-0.0747, -0.2958]),
        DMatrix::from_row_slice(1, 2, &[1.0117, -0.2599]),
        Mat::zeros(1, 1),
    )
    .unwrap()
}

/// Random stable SISO problem; the weights are random stable second-order
/// filters, or static identities when `weighted` is false.
pub fn random_siso_problem(rng: &mut ChaCha8Rng, n: usize, r: usize, weighted: bool) -> WeightedProblem {
    let plant = StateSpace::new(
        random_stable(rng, n, 0.3),
        random_mat(rng, n, 1),
        random_mat(rng, 1, n),
        Mat::zeros(1, 1),
    )
    .unwrap();
    if !weighted {
        return WeightedProblem::unweighted(plant, r).unwrap();
    }
    let weight = |rng: &mut ChaCha8Rng| {
        StateSpace::new(random_stable(rng, 2, 0.3), random_mat(rng, 2, 1), random_mat(rng, 1, 2), Mat::zeros(1, 1))
            .unwrap()
    };
    let wi = weight(rng);
    let wo = weight(rng);
    WeightedProblem::new(plant, wi, wo, r).unwrap()
}

/// Largest principal angle between two column spans.
pub fn subspace_angle(x: &Mat, y: &Mat) -> f64 {
    let qx = x.clone().qr().q();
    let qy = y.clone().qr().q();
    let resid = &qy - &qx * (qx.transpose() * &qy);
    let s = resid.singular_values().max();
    s.min(1.0).asin()
}

/// Random problem with `m` inputs, `p` outputs and second-order weights with
/// nonzero feedthrough, plus a random stable reduced model of order `r`.
pub fn random_weighted_case(rng: &mut ChaCha8Rng, n: usize, r: usize, m: usize, p: usize) -> (WeightedProblem, StateSpace) {
    let plant =
        StateSpace::new(random_stable(rng, n, 0.3), random_mat(rng, n, m), random_mat(rng, p, n), random_mat(rng, p, m))
            .unwrap();
    let wi = StateSpace::new(random_stable(rng, 2, 0.3), random_mat(rng, 2, m), random_mat(rng, m, 2), random_mat(rng, m, m))
        .unwrap();
    let wo = StateSpace::new(random_stable(rng, 2, 0.3), random_mat(rng, 2, p), random_mat(rng, p, 2), random_mat(rng, p, p))
        .unwrap();
    let rom = StateSpace::new(random_stable(rng, r, 0.3), random_mat(rng, r, m), random_mat(rng, p, r), plant.d().clone())
        .unwrap();
    (WeightedProblem::new(plant, wi, wo, r).unwrap(), rom)
}
