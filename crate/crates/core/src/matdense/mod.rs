//! Dense kernels: real Schur form, eigendecomposition, SVD, PSD factors and
//! the Schur-based Sylvester/Lyapunov solvers in [`sylvester`].

mod sylvester;

use nalgebra::{Complex, DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub use sylvester::{
    solve_lyapunov, solve_sylvester, solve_sylvester_schur, solve_sylvester_shifted,
    sylvester_residual, SolveReport,
};

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex<f64>>;
pub type C64 = Complex<f64>;

/// Orthogonal reduction `A = Q T Qᵀ` with `T` upper quasi-triangular.
///
/// Every 2×2 diagonal block of `T` holds a complex-conjugate eigenvalue pair;
/// blocks with real eigenvalues are split during standardization.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: Mat,
    pub t: Mat,
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal blocks of `T` as `(start, size)` pairs, top to bottom.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        diagonal_blocks(&self.t)
    }

    /// Eigenvalues read off the diagonal blocks, in block order. For a 2×2
    /// block the positive-imaginary member comes first.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dim());
        for (k, s) in self.blocks() {
            if s == 1 {
                out.push(C64::new(self.t[(k, k)], 0.0));
            } else {
                let (l1, l2) = block_eigenvalues(&self.t, k);
                out.push(l1);
                out.push(l2);
            }
        }
        out
    }

    /// Schur form of `Aᵀ`, obtained by reversing the index order of `Tᵀ`.
    pub fn transposed(&self) -> SchurForm {
        let n = self.dim();
        let t = Mat::from_fn(n, n, |i, j| self.t[(n - 1 - j, n - 1 - i)]);
        let q = Mat::from_fn(n, n, |i, j| self.q[(i, n - 1 - j)]);
        SchurForm { q, t }
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn diagonal_blocks(t: &Mat) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < n {
        if k + 1 < n && t[(k + 1, k)] != 0.0 {
            blocks.push((k, 2));
            k += 2;
        } else {
            blocks.push((k, 1));
            k += 1;
        }
    }
    blocks
}

fn block_eigenvalues(t: &Mat, k: usize) -> (C64, C64) {
    let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
    let mean = 0.5 * (a + d);
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        (C64::new(mean - r, 0.0), C64::new(mean + r, 0.0))
    } else {
        let w = (-disc).sqrt();
        (C64::new(mean, w), C64::new(mean, -w))
    }
}

fn check_finite(m: &Mat, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Real Schur decomposition with standardized 2×2 blocks.
pub fn real_schur(a: &Mat) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "real_schur needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite(a, "real_schur input")?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SchurForm { q: Mat::zeros(0, 0), t: Mat::zeros(0, 0) });
    }
    let schur = nalgebra::Schur::try_new(a.clone(), f64::EPSILON, 30 * n.max(1))
        .ok_or_else(|| Error::NoConvergence("real Schur QR iteration".into()))?;
    let (mut q, mut t) = schur.unpack();
    standardize(&mut q, &mut t)?;
    Ok(SchurForm { q, t })
}

/// Zero negligible subdiagonals, split 2×2 blocks with real eigenvalues and
/// clear everything below the first subdiagonal.
fn standardize(q: &mut Mat, t: &mut Mat) -> Result<()> {
    let n = t.nrows();
    for j in 0..n {
        for i in (j + 2)..n {
            t[(i, j)] = 0.0;
        }
    }
    for k in 0..n.saturating_sub(1) {
        let scale = t[(k, k)].abs() + t[(k + 1, k + 1)].abs();
        if t[(k + 1, k)].abs() <= f64::EPSILON * scale {
            t[(k + 1, k)] = 0.0;
        }
    }
    for k in 0..n.saturating_sub(2) {
        if t[(k + 1, k)] != 0.0 && t[(k + 2, k + 1)] != 0.0 {
            return Err(Error::NoConvergence("real Schur deflation".into()));
        }
    }
    let mut k = 0;
    while k + 1 < n {
        if t[(k + 1, k)] == 0.0 {
            k += 1;
            continue;
        }
        let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        if disc >= 0.0 {
            // real pair: rotate the block's eigenvector onto e1
            let r = disc.sqrt();
            let mean = 0.5 * (a + d);
            let lam = if mean >= 0.0 { mean + r } else { mean - r };
            let (x1, y1) = (b, lam - a);
            let (x2, y2) = (lam - d, c);
            let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) { (x1, y1) } else { (x2, y2) };
            let h = x.hypot(y);
            let (cs, sn) = (x / h, y / h);
            for j in 0..n {
                let (u, v) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = cs * u + sn * v;
                t[(k + 1, j)] = -sn * u + cs * v;
            }
            for i in 0..n {
                let (u, v) = (t[(i, k)], t[(i, k + 1)]);
                t[(i, k)] = cs * u + sn * v;
                t[(i, k + 1)] = -sn * u + cs * v;
                let (u, v) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = cs * u + sn * v;
                q[(i, k + 1)] = -sn * u + cs * v;
            }
            t[(k + 1, k)] = 0.0;
            k += 1;
        } else {
            k += 2;
        }
    }
    Ok(())
}

/// Eigenvalues with unit-norm right eigenvectors (as matrix columns).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

/// Total order used for every eigenvalue list: real part, then |imag|, with
/// the positive-imaginary member of a conjugate pair first.
pub fn eig_order(x: &C64, y: &C64) -> std::cmp::Ordering {
    x.re.total_cmp(&y.re)
        .then(x.im.abs().total_cmp(&y.im.abs()))
        .then(y.im.total_cmp(&x.im))
}

/// Sorted eigenvalues of a real matrix.
pub fn eigenvalues(a: &Mat) -> Result<Vec<C64>> {
    let mut vals = real_schur(a)?.eigenvalues();
    vals.sort_by(eig_order);
    Ok(vals)
}

/// Eigendecomposition `A R = R Λ` via Schur form and triangular back-substitution.
pub fn eig(a: &Mat) -> Result<Eigen> {
    let schur = real_schur(a)?;
    let n = schur.dim();
    let t = &schur.t;
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let smin = f64::EPSILON * tnorm;
    let blocks = schur.blocks();
    let tc: CMat = t.map(|x| C64::new(x, 0.0));
    let qc: CMat = schur.q.map(|x| C64::new(x, 0.0));

    let mut pairs: Vec<(C64, nalgebra::DVector<C64>)> = Vec::with_capacity(n);
    for (bi, &(k, s)) in blocks.iter().enumerate() {
        let lams: Vec<C64> = if s == 1 {
            vec![C64::new(t[(k, k)], 0.0)]
        } else {
            let (l1, _) = block_eigenvalues(t, k);
            vec![l1]
        };
        for lam in lams {
            let mut y = nalgebra::DVector::<C64>::zeros(n);
            if s == 1 {
                y[k] = C64::new(1.0, 0.0);
            } else {
                let (ta, tb, tcc, td) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
                let z1 = (C64::new(tb, 0.0), lam - ta);
                let z2 = (lam - td, C64::new(tcc, 0.0));
                let pick = if z1.0.norm() + z1.1.norm() >= z2.0.norm() + z2.1.norm() { z1 } else { z2 };
                y[k] = pick.0;
                y[k + 1] = pick.1;
            }
            let top = k + s;
            for &(i, si) in blocks[..bi].iter().rev() {
                let mut rhs = nalgebra::DVector::<C64>::zeros(si);
                for r in 0..si {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in (i + si)..top {
                        acc += tc[(i + r, j)] * y[j];
                    }
                    rhs[r] = -acc;
                }
                let mut m = CMat::from_fn(si, si, |r, c| tc[(i + r, i + c)]);
                for r in 0..si {
                    m[(r, r)] -= lam;
                }
                let sol = small_complex_solve(&m, &rhs, smin);
                for r in 0..si {
                    y[i + r] = sol[r];
                }
            }
            let mut x = &qc * y;
            normalize_phase(&mut x);
            pairs.push((lam, x.clone()));
            if lam.im != 0.0 {
                pairs.push((lam.conj(), x.map(|v| v.conj())));
            }
        }
    }
    pairs.sort_by(|p, q| eig_order(&p.0, &q.0));
    let values: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = CMat::zeros(n, n);
    for (j, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(j, v);
    }
    Ok(Eigen { values, vectors })
}

/// Solve a 1×1 or 2×2 complex system, nudging tiny pivots to `smin` so
/// eigenvector back-substitution never divides by zero.
fn small_complex_solve(m: &CMat, rhs: &nalgebra::DVector<C64>, smin: f64) -> nalgebra::DVector<C64> {
    let guard = |p: C64| if p.norm() < smin { C64::new(smin, 0.0) } else { p };
    if m.nrows() == 1 {
        return nalgebra::DVector::from_element(1, rhs[0] / guard(m[(0, 0)]));
    }
    let lu = m.clone().full_piv_lu();
    if let Some(x) = lu.solve(rhs) {
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return x;
        }
    }
    let mut mm = m.clone();
    mm[(0, 0)] += C64::new(smin, 0.0);
    mm[(1, 1)] += C64::new(smin, 0.0);
    mm.full_piv_lu().solve(rhs).unwrap_or_else(|| rhs.clone())
}

/// Unit 2-norm with the largest-modulus entry made real and positive.
fn normalize_phase(x: &mut nalgebra::DVector<C64>) {
    let nrm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if nrm == 0.0 {
        return;
    }
    let mut best = 0;
    for i in 0..x.len() {
        if x[i].norm() > x[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let phase = x[best].conj() / x[best].norm();
    for v in x.iter_mut() {
        *v = *v * phase / nrm;
    }
}

/// Thin singular value decomposition `M = U diag(s) Vᵀ`, `s` nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

pub fn svd(m: &Mat) -> Result<Svd> {
    check_finite(m, "svd input")?;
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok(Svd { u: Mat::zeros(r, 0), s: vec![], v: Mat::zeros(c, 0) });
    }
    let dec = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("SVD".into()))?;
    let u = dec.u.ok_or_else(|| Error::NoConvergence("SVD left vectors".into()))?;
    let vt = dec.v_t.ok_or_else(|| Error::NoConvergence("SVD right vectors".into()))?;
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]).then(i.cmp(&j)));
    let s = idx.iter().map(|&i| dec.singular_values[i].max(0.0)).collect();
    let u = Mat::from_fn(r, k, |i, j| u[(i, idx[j])]);
    let v = Mat::from_fn(c, k, |i, j| vt[(idx[j], i)]);
    Ok(Svd { u, s, v })
}

/// Largest singular value (spectral norm); zero for empty matrices.
pub fn norm2(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    match svd(m) {
        Ok(d) => d.s[0],
        Err(_) => f64::NAN,
    }
}

/// Factor a symmetric PSD matrix as `S ≈ U Uᵀ`, keeping eigenvalues above
/// `tol·λ_max`. Columns are ordered by decreasing eigenvalue.
pub fn psd_factor(s: &Mat, tol: f64) -> Result<Mat> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch("psd_factor needs a square matrix".into()));
    }
    check_finite(s, "psd_factor input")?;
    let n = s.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let sym = symmetrize(s);
    let dec = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::NoConvergence("symmetric eigensolver".into()))?;
    let vals = &dec.eigenvalues;
    let snorm = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if lmin < -tol * snorm {
        return Err(Error::NotPsd { eigenvalue: lmin });
    }
    let lmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut idx: Vec<usize> = (0..n).filter(|&i| lmax > 0.0 && vals[i] > tol * lmax).collect();
    idx.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    let mut u = Mat::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        let mut col = dec.eigenvectors.column(i).into_owned() * vals[i].sqrt();
        let big = col.iamax();
        if col[big] < 0.0 {
            col = -col;
        }
        u.set_column(c, &col);
    }
    Ok(u)
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Largest real part of the spectrum; `-inf` for an empty matrix.
pub fn spectral_abscissa(a: &Mat) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(real_schur(a)?.spectral_abscissa())
}

/// Orthonormal basis of the column span via thin QR.
pub fn orthonormalize(m: &Mat) -> Mat {
    if m.ncols() == 0 {
        return m.clone();
    }
    m.clone().qr().q()
}

pub(crate) fn to_complex(m: &Mat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn illus_a() -> Mat {
        Mat::from_row_slice(
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
        )
    }

    fn check_schur(a: &Mat) {
        let s = real_schur(a).unwrap();
        let n = a.nrows();
        let qtq = s.q.transpose() * &s.q - Mat::identity(n, n);
        assert!(qtq.norm() <= 1e-12 * n as f64, "orthogonality {}", qtq.norm());
        let rec = &s.q * &s.t * s.q.transpose() - a;
        assert!(rec.norm() <= 1e-10 * a.norm().max(1.0), "reconstruction {}", rec.norm());
        for (k, sz) in s.blocks() {
            if sz == 2 {
                let (l1, _) = block_eigenvalues(&s.t, k);
                assert!(l1.im != 0.0);
            }
        }
        for i in 2..n {
            for j in 0..i - 1 {
                assert_eq!(s.t[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn schur_of_triangular_keeps_diagonal() {
        let a = Mat::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, -4.0, 5.0, 0.0, 0.0, 6.0]);
        let s = real_schur(&a).unwrap();
        let mut d: Vec<f64> = (0..3).map(|i| s.t[(i, i)]).collect();
        d.sort_by(f64::total_cmp);
        assert_eq!(d, vec![-4.0, 1.0, 6.0]);
        check_schur(&a);
    }

    #[test]
    fn rotation_has_one_block() {
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let s = real_schur(&a).unwrap();
        assert_eq!(s.blocks(), vec![(0, 2)]);
        let ev = s.eigenvalues();
        assert_relative_eq!(ev[0].im.abs(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(ev[0].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn real_pair_block_is_split() {
        let a = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        check_schur(&a);
        let s = real_schur(&a).unwrap();
        assert_eq!(s.blocks().len(), 2);
    }

    #[test]
    fn schur_of_plant_is_valid() {
        check_schur(&illus_a());
    }

    #[test]
    fn transposed_form_is_schur_of_transpose() {
        let a = illus_a();
        let s = real_schur(&a).unwrap().transposed();
        let rec = &s.q * &s.t * s.q.transpose() - a.transpose();
        assert!(rec.norm() < 1e-10 * a.norm());
        for i in 2..6 {
            for j in 0..i - 1 {
                assert_eq!(s.t[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn eig_examples() {
        let e = eig(&Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -5.0]))).unwrap();
        assert_eq!(e.values, vec![C64::new(-5.0, 0.0), C64::new(-1.0, 0.0)]);
        let e = eig(&Mat::from_row_slice(2, 2, &[0.0, 1.0, -4.0, 0.0])).unwrap();
        assert_relative_eq!(e.values[0].im, 2.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1].im, -2.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_residual_on_plant() {
        let a = illus_a();
        let e = eig(&a).unwrap();
        let ac = to_complex(&a);
        for j in 0..6 {
            let v = e.vectors.column(j);
            let r = &ac * v - v * e.values[j];
            assert!(r.norm() <= 1e-9 * a.norm());
        }
    }

    #[test]
    fn svd_examples() {
        let d = svd(&Mat::identity(3, 3)).unwrap();
        assert_eq!(d.s, vec![1.0, 1.0, 1.0]);
        let d = svd(&Mat::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(d.s[0], 3.0);
        assert_relative_eq!(d.s[1], 0.0);
    }

    #[test]
    fn psd_factor_examples() {
        let u = psd_factor(&Mat::identity(2, 2), 1e-12).unwrap();
        assert_eq!(u.ncols(), 2);
        assert!((u.transpose() * &u - Mat::identity(2, 2)).norm() < 1e-14);
        let u = psd_factor(&Mat::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.0]), 1e-12).unwrap();
        assert_eq!(u.shape(), (2, 1));
        assert_relative_eq!(u[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(u[(1, 0)], 0.0, epsilon = 1e-14);
        let bad = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(psd_factor(&bad, 1e-12), Err(Error::NotPsd { .. })));
    }
}
