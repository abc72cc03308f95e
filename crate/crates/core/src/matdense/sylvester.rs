//! Bartels–Stewart solvers for `AX + XB + C = 0` and `AX + XAᵀ + Q = 0`.

use nalgebra::DVector;

use super::{real_schur, symmetrize, Mat, SchurForm};
use crate::error::{Error, Result};

/// Solution of a matrix equation with its residual recomputed from the inputs.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Mat,
    pub residual_norm: f64,
    pub relative_residual: f64,
}

/// Frobenius residual `‖AX + XB + C‖` and its relative form
/// `‖R‖ / (‖A‖‖X‖ + ‖B‖‖X‖ + ‖C‖)`.
pub fn sylvester_residual(a: &Mat, b: &Mat, c: &Mat, x: &Mat) -> (f64, f64) {
    let r = a * x + x * b + c;
    let res = r.norm();
    let denom = (a.norm() + b.norm()) * x.norm() + c.norm();
    let rel = if denom > 0.0 { res / denom } else { res };
    (res, rel)
}

fn report(a: &Mat, b: &Mat, c: &Mat, x: Mat) -> SolveReport {
    let (residual_norm, relative_residual) = sylvester_residual(a, b, c, &x);
    SolveReport { solution: x, residual_norm, relative_residual }
}

fn check_shapes(a: &Mat, b: &Mat, c: &Mat) -> Result<()> {
    if !a.is_square() || !b.is_square() || c.nrows() != a.nrows() || c.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester A {}x{}, B {}x{}, C {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    Ok(())
}

/// Minimum distance between spectrum(A) and spectrum(-B), checked against
/// `1e-12·(‖A‖ + ‖B‖)`.
fn check_separation(sa: &SchurForm, sb: &SchurForm, a: &Mat, b: &Mat) -> Result<()> {
    let la = sa.eigenvalues();
    let lb = sb.eigenvalues();
    let mut sep = f64::INFINITY;
    for x in &la {
        for y in &lb {
            sep = sep.min((x + y).norm());
        }
    }
    if sep <= 1e-12 * (a.norm() + b.norm()) {
        return Err(Error::SpectrumOverlap { context: String::new(), separation: sep });
    }
    Ok(())
}

/// Solve `AX + XB + C = 0`.
pub fn solve_sylvester(a: &Mat, b: &Mat, c: &Mat) -> Result<SolveReport> {
    check_shapes(a, b, c)?;
    if a.nrows() == 0 || b.nrows() == 0 {
        return Ok(report(a, b, c, Mat::zeros(a.nrows(), b.nrows())));
    }
    let sa = real_schur(a)?;
    let sb = real_schur(b)?;
    solve_sylvester_schur(&sa, &sb, a, b, c)
}

/// Solve `AX + XB + C = 0` given precomputed Schur forms of `A` and `B`.
pub fn solve_sylvester_schur(
    sa: &SchurForm,
    sb: &SchurForm,
    a: &Mat,
    b: &Mat,
    c: &Mat,
) -> Result<SolveReport> {
    check_shapes(a, b, c)?;
    if a.nrows() == 0 || b.nrows() == 0 {
        return Ok(report(a, b, c, Mat::zeros(a.nrows(), b.nrows())));
    }
    check_separation(sa, sb, a, b)?;
    let mut f = -(sa.q.transpose() * c * &sb.q);
    quasi_triangular_solve(&sa.t, &sb.t, &mut f)?;
    let x = &sa.q * f * sb.q.transpose();
    Ok(report(a, b, c, x))
}

/// Solve `AX + XAᵀ + Q = 0` for Hurwitz `A`; the solution is symmetrized.
pub fn solve_lyapunov(a: &Mat, q: &Mat) -> Result<SolveReport> {
    check_shapes(a, a, q)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(report(a, a, q, Mat::zeros(0, 0)));
    }
    let sa = real_schur(a)?;
    let abscissa = sa.spectral_abscissa();
    if abscissa >= 0.0 {
        return Err(Error::NotHurwitz(format!("spectral abscissa {abscissa:.6e}")));
    }
    let sb = sa.transposed();
    check_separation(&sa, &sb, a, a)?;
    let mut f = -(sa.q.transpose() * q * &sb.q);
    quasi_triangular_solve(&sa.t, &sb.t, &mut f)?;
    let x = symmetrize(&(&sa.q * f * sb.q.transpose()));
    let at = a.transpose();
    let (residual_norm, relative_residual) = sylvester_residual(a, &at, q, &x);
    Ok(SolveReport { solution: x, residual_norm, relative_residual })
}

/// Overwrite `f` with `Y` solving `Ta Y + Y Tb = F`, both upper quasi-triangular.
fn quasi_triangular_solve(ta: &Mat, tb: &Mat, f: &mut Mat) -> Result<()> {
    let ba = super::diagonal_blocks(ta);
    let bb = super::diagonal_blocks(tb);
    let n = ta.nrows();
    for &(j0, sj) in &bb {
        if j0 > 0 {
            let coupling = f.columns(0, j0) * tb.view((0, j0), (j0, sj));
            let mut cols = f.columns_mut(j0, sj);
            cols -= coupling;
        }
        let tjj = tb.view((j0, j0), (sj, sj)).into_owned();
        for &(i0, si) in ba.iter().rev() {
            let mut rhs = f.view((i0, j0), (si, sj)).into_owned();
            let below = i0 + si;
            if below < n {
                rhs -= ta.view((i0, below), (si, n - below)) * f.view((below, j0), (n - below, sj));
            }
            let tii = ta.view((i0, i0), (si, si)).into_owned();
            let y = small_sylvester(&tii, &tjj, &rhs)?;
            f.view_mut((i0, j0), (si, sj)).copy_from(&y);
        }
    }
    Ok(())
}

/// Solve `P Y + Y S = R` for blocks of size at most 2 through the Kronecker form.
fn small_sylvester(p: &Mat, s: &Mat, r: &Mat) -> Result<Mat> {
    let (m, k) = r.shape();
    if m == 1 && k == 1 {
        let d = p[(0, 0)] + s[(0, 0)];
        if d == 0.0 {
            return Err(Error::SpectrumOverlap { context: String::new(), separation: 0.0 });
        }
        return Ok(Mat::from_element(1, 1, r[(0, 0)] / d));
    }
    let kron = Mat::identity(k, k).kronecker(p) + s.transpose().kronecker(&Mat::identity(m, m));
    let rhs = DVector::from_column_slice(r.as_slice());
    let sol = kron
        .full_piv_lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or(Error::SpectrumOverlap { context: String::new(), separation: 0.0 })?;
    Ok(Mat::from_column_slice(m, k, sol.as_slice()))
}

/// Sylvester path for a large `A` and a small `B`: only `B` is Schur-factored,
/// and each quasi-triangular block of `B` becomes one shifted solve with `A`
/// (a real 2n×2n solve for a complex-conjugate block).
pub fn solve_sylvester_shifted(a: &Mat, b: &Mat, c: &Mat) -> Result<SolveReport> {
    check_shapes(a, b, c)?;
    let n = a.nrows();
    if n == 0 || b.nrows() == 0 {
        return Ok(report(a, b, c, Mat::zeros(n, b.nrows())));
    }
    let sb = real_schur(b)?;
    let t = &sb.t;
    let mut y = -(c * &sb.q);
    for (j0, sj) in sb.blocks() {
        if j0 > 0 {
            let coupling = y.columns(0, j0) * t.view((0, j0), (j0, sj));
            let mut cols = y.columns_mut(j0, sj);
            cols -= coupling;
        }
        let overlap = || Error::SpectrumOverlap { context: String::new(), separation: 0.0 };
        if sj == 1 {
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[(i, i)] += t[(j0, j0)];
            }
            let rhs = y.column(j0).into_owned();
            let sol = shifted.lu().solve(&rhs).filter(|x| x.iter().all(|v| v.is_finite())).ok_or_else(overlap)?;
            y.set_column(j0, &sol);
        } else {
            let mut big = Mat::zeros(2 * n, 2 * n);
            big.view_mut((0, 0), (n, n)).copy_from(a);
            big.view_mut((n, n), (n, n)).copy_from(a);
            for i in 0..n {
                big[(i, i)] += t[(j0, j0)];
                big[(i, n + i)] += t[(j0 + 1, j0)];
                big[(n + i, i)] += t[(j0, j0 + 1)];
                big[(n + i, n + i)] += t[(j0 + 1, j0 + 1)];
            }
            let mut rhs = DVector::zeros(2 * n);
            rhs.rows_mut(0, n).copy_from(&y.column(j0));
            rhs.rows_mut(n, n).copy_from(&y.column(j0 + 1));
            let sol = big.lu().solve(&rhs).filter(|x| x.iter().all(|v| v.is_finite())).ok_or_else(overlap)?;
            y.set_column(j0, &sol.rows(0, n).into_owned());
            y.set_column(j0 + 1, &sol.rows(n, n).into_owned());
        }
    }
    let x = y * sb.q.transpose();
    Ok(report(a, b, c, x))
}
