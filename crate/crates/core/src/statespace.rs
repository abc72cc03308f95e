//! Realizations and the realization algebra: error systems, the weighted
//! error system, the augmented interpolation systems and pole–residue form.

use nalgebra::{DVector, Hessenberg};

use crate::error::{Error, Result};
use crate::matdense::{eig, to_complex, CMat, Mat, C64};

/// Spectral abscissa threshold below which a system counts as stable.
pub const STABILITY_MARGIN: f64 = 1e-10;

/// Real realization `(A, B, C, D)` of `C(sI − A)⁻¹B + D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
}

impl StateSpace {
    pub fn new(a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        let n = a.nrows();
        let (p, m) = d.shape();
        if a.ncols() != n || b.shape() != (n, m) || c.shape() != (p, n) {
            return Err(Error::DimensionMismatch(format!(
                "A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                p,
                m
            )));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if !mat.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite(name.to_string()));
            }
        }
        Ok(StateSpace { a, b, c, d })
    }

    /// Static gain with no states.
    pub fn static_gain(d: Mat) -> Self {
        let (p, m) = d.shape();
        StateSpace { a: Mat::zeros(0, 0), b: Mat::zeros(0, m), c: Mat::zeros(p, 0), d }
    }

    /// The identity weight: no states, `D = I`.
    pub fn identity(k: usize) -> Self {
        Self::static_gain(Mat::identity(k, k))
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }
    pub fn b(&self) -> &Mat {
        &self.b
    }
    pub fn c(&self) -> &Mat {
        &self.c
    }
    pub fn d(&self) -> &Mat {
        &self.d
    }
    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    /// Input dimension.
    pub fn m(&self) -> usize {
        self.d.ncols()
    }
    /// Output dimension.
    pub fn p(&self) -> usize {
        self.d.nrows()
    }

    pub fn spectral_abscissa(&self) -> Result<f64> {
        crate::matdense::spectral_abscissa(&self.a)
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectral_abscissa()? < -STABILITY_MARGIN)
    }

    /// Error unless the spectral abscissa is below `-STABILITY_MARGIN`.
    pub fn require_stable(&self, what: &str) -> Result<()> {
        let alpha = self.spectral_abscissa()?;
        if alpha < -STABILITY_MARGIN {
            Ok(())
        } else {
            Err(Error::UnstableSystem(format!("{what} has spectral abscissa {alpha:.6e}")))
        }
    }

    /// Petrov–Galerkin projection `(WᵀAV, WᵀB, CV, D)`.
    pub fn project(&self, v: &Mat, w: &Mat) -> Result<Self> {
        if v.nrows() != self.n() || w.shape() != v.shape() {
            return Err(Error::DimensionMismatch(format!(
                "projection bases {}x{} and {}x{} for order {}",
                v.nrows(),
                v.ncols(),
                w.nrows(),
                w.ncols(),
                self.n()
            )));
        }
        let wt = w.transpose();
        StateSpace::new(&wt * &self.a * v, &wt * &self.b, &self.c * v, self.d.clone())
    }

    /// Similarity transform `(TAT⁻¹, TB, CT⁻¹, D)`.
    pub fn transform(&self, t: &Mat) -> Result<Self> {
        let tinv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DimensionMismatch("singular state transformation".into()))?;
        StateSpace::new(t * &self.a * &tinv, t * &self.b, &self.c * &tinv, self.d.clone())
    }

    /// Series connection: `self` feeds `next`, giving `next(s)·self(s)`.
    pub fn series(&self, next: &StateSpace) -> Result<Self> {
        if next.m() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "series connection of a {}-output system into a {}-input system",
                self.p(),
                next.m()
            )));
        }
        let (n1, n2) = (self.n(), next.n());
        let mut a = Mat::zeros(n1 + n2, n1 + n2);
        place(&mut a, 0, 0, &self.a);
        place(&mut a, n1, 0, &(&next.b * &self.c));
        place(&mut a, n1, n1, &next.a);
        let mut b = Mat::zeros(n1 + n2, self.m());
        place(&mut b, 0, 0, &self.b);
        place(&mut b, n1, 0, &(&next.b * &self.d));
        let mut c = Mat::zeros(next.p(), n1 + n2);
        place(&mut c, 0, 0, &(&next.d * &self.c));
        place(&mut c, 0, n1, &next.c);
        StateSpace::new(a, b, c, &next.d * &self.d)
    }
}

pub(crate) fn place(target: &mut Mat, i0: usize, j0: usize, block: &Mat) {
    if block.nrows() > 0 && block.ncols() > 0 {
        target.view_mut((i0, j0), block.shape()).copy_from(block);
    }
}

/// `C(sI − A)⁻¹B + D` by one dense complex LU solve.
pub fn eval_tf(sys: &StateSpace, s: C64) -> Result<CMat> {
    let n = sys.n();
    let dc = to_complex(sys.d());
    if n == 0 {
        return Ok(dc);
    }
    let mut m = -to_complex(sys.a());
    for i in 0..n {
        m[(i, i)] += s;
    }
    let norm1 = one_norm(&m);
    let lu = m.clone().lu();
    let singular = || Error::SingularShift { re: s.re, im: s.im, cond: f64::INFINITY };
    let x = lu.solve(&to_complex(sys.b())).ok_or_else(singular)?;
    let cond = norm1 * inverse_one_norm_estimate(&m, &lu).ok_or_else(singular)?;
    if !(cond <= 1e14) {
        return Err(Error::SingularShift { re: s.re, im: s.im, cond });
    }
    Ok(to_complex(sys.c()) * x + dc)
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Hager–Higham lower bound on ‖M⁻¹‖₁ using the LU of `M` and one of `Mᴴ`.
fn inverse_one_norm_estimate(m: &CMat, lu: &nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>) -> Option<f64> {
    let n = m.nrows();
    let lu_h = m.adjoint().lu();
    let mut x = DVector::from_element(n, C64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    let mut last = usize::MAX;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        est = y.iter().map(|v| v.norm()).sum::<f64>();
        if !est.is_finite() {
            return Some(f64::INFINITY);
        }
        let xi = y.map(|v| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) });
        let z = lu_h.solve(&xi)?;
        let j = (0..n).max_by(|&i, &k| z[i].norm().total_cmp(&z[k].norm())).unwrap_or(0);
        if j == last {
            break;
        }
        last = j;
        x = DVector::zeros(n);
        x[j] = C64::new(1.0, 0.0);
    }
    // alternating-sign probe guards against the classic underestimate
    let probe = DVector::from_fn(n, |i, _| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(sign * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
    });
    let yp = lu.solve(&probe)?;
    let alt = 2.0 * yp.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
    Some(est.max(alt))
}

/// Repeated transfer-function evaluation through a Hessenberg reduction of
/// `A`: each point costs O(n²) per input instead of a dense factorization.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    h: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
    scale: f64,
}

impl FrequencyResponse {
    pub fn new(sys: &StateSpace) -> Self {
        let n = sys.n();
        if n == 0 {
            return FrequencyResponse {
                h: CMat::zeros(0, 0),
                b: to_complex(sys.b()),
                c: to_complex(sys.c()),
                d: to_complex(sys.d()),
                scale: 0.0,
            };
        }
        let (q, h) = Hessenberg::new(sys.a().clone()).unpack();
        let scale = h.norm();
        FrequencyResponse {
            h: to_complex(&h),
            b: to_complex(&(q.transpose() * sys.b())),
            c: to_complex(&(sys.c() * &q)),
            d: to_complex(sys.d()),
            scale,
        }
    }

    pub fn eval(&self, s: C64) -> Result<CMat> {
        let n = self.h.nrows();
        if n == 0 {
            return Ok(self.d.clone());
        }
        let mut m = -self.h.clone();
        for i in 0..n {
            m[(i, i)] += s;
        }
        let mut x = self.b.clone();
        let tiny = f64::EPSILON * (self.scale + s.norm()) * 1e-2;
        // Gaussian elimination with partial pivoting restricted to the subdiagonal
        for k in 0..n {
            if k + 1 < n && m[(k + 1, k)].norm() > m[(k, k)].norm() {
                m.swap_rows(k, k + 1);
                x.swap_rows(k, k + 1);
            }
            let piv = m[(k, k)];
            if piv.norm() <= tiny {
                return Err(Error::SingularShift { re: s.re, im: s.im, cond: f64::INFINITY });
            }
            if k + 1 < n {
                let l = m[(k + 1, k)] / piv;
                if l != C64::new(0.0, 0.0) {
                    for j in k..n {
                        let v = m[(k, j)];
                        m[(k + 1, j)] -= l * v;
                    }
                    for j in 0..x.ncols() {
                        let v = x[(k, j)];
                        x[(k + 1, j)] -= l * v;
                    }
                }
            }
        }
        for j in 0..x.ncols() {
            for i in (0..n).rev() {
                let mut acc = x[(i, j)];
                for k in (i + 1)..n {
                    acc -= m[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc / m[(i, i)];
            }
        }
        Ok(&self.c * x + &self.d)
    }
}

/// Realization of `H(s) − Hr(s)`: block-diagonal state matrix, `C_e = [C, −C̃]`, `D_e = 0`.
pub fn error_system(h: &StateSpace, hr: &StateSpace) -> Result<StateSpace> {
    if h.m() != hr.m() || h.p() != hr.p() {
        return Err(Error::DimensionMismatch(format!(
            "error system of {}x{} and {}x{} transfer functions",
            h.p(),
            h.m(),
            hr.p(),
            hr.m()
        )));
    }
    let dd = (h.d() - hr.d()).norm();
    if dd > 1e-12 * (1.0 + h.d().norm()) {
        return Err(Error::DimensionMismatch(format!("feedthrough terms differ by {dd:.3e}")));
    }
    let (n, r) = (h.n(), hr.n());
    let mut a = Mat::zeros(n + r, n + r);
    place(&mut a, 0, 0, h.a());
    place(&mut a, n, n, hr.a());
    let mut b = Mat::zeros(n + r, h.m());
    place(&mut b, 0, 0, h.b());
    place(&mut b, n, 0, hr.b());
    let mut c = Mat::zeros(h.p(), n + r);
    place(&mut c, 0, 0, h.c());
    place(&mut c, 0, n, &-hr.c());
    StateSpace::new(a, b, c, Mat::zeros(h.p(), h.m()))
}

/// Plant, weights and target order of one weighted reduction task.
#[derive(Debug, Clone)]
pub struct WeightedProblem {
    plant: StateSpace,
    input_weight: StateSpace,
    output_weight: StateSpace,
    order: usize,
}

impl WeightedProblem {
    pub fn new(plant: StateSpace, input_weight: StateSpace, output_weight: StateSpace, order: usize) -> Result<Self> {
        let (m, p) = (plant.m(), plant.p());
        if input_weight.m() != m || input_weight.p() != m {
            return Err(Error::DimensionMismatch(format!(
                "input weight must be {m}x{m}, got {}x{}",
                input_weight.p(),
                input_weight.m()
            )));
        }
        if output_weight.m() != p || output_weight.p() != p {
            return Err(Error::DimensionMismatch(format!(
                "output weight must be {p}x{p}, got {}x{}",
                output_weight.p(),
                output_weight.m()
            )));
        }
        if order == 0 || order >= plant.n() {
            return Err(Error::DimensionMismatch(format!(
                "target order {order} must satisfy 1 <= r < n = {}",
                plant.n()
            )));
        }
        plant.require_stable("plant")?;
        input_weight.require_stable("input weight")?;
        output_weight.require_stable("output weight")?;
        Ok(WeightedProblem { plant, input_weight, output_weight, order })
    }

    /// Identity weights on both sides.
    pub fn unweighted(plant: StateSpace, order: usize) -> Result<Self> {
        let (m, p) = (plant.m(), plant.p());
        Self::new(plant, StateSpace::identity(m), StateSpace::identity(p), order)
    }

    pub fn plant(&self) -> &StateSpace {
        &self.plant
    }
    pub fn input_weight(&self) -> &StateSpace {
        &self.input_weight
    }
    pub fn output_weight(&self) -> &StateSpace {
        &self.output_weight
    }
    pub fn order(&self) -> usize {
        self.order
    }

    /// Same plant and weights with a different target order.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Self::new(self.plant.clone(), self.input_weight.clone(), self.output_weight.clone(), order)
    }

    /// Check that `hr` can serve as a reduced model of this problem's plant.
    pub fn check_rom(&self, hr: &StateSpace) -> Result<()> {
        if hr.m() != self.plant.m() || hr.p() != self.plant.p() {
            return Err(Error::DimensionMismatch(format!(
                "reduced model is {}x{}, plant is {}x{}",
                hr.p(),
                hr.m(),
                self.plant.p(),
                self.plant.m()
            )));
        }
        Ok(())
    }
}

/// Realization of `W_o(s)(H(s) − Hr(s))W_i(s)` with state order
/// (plant, reduced model, input weight, output weight).
pub fn weighted_error_realization(prob: &WeightedProblem, hr: &StateSpace) -> Result<StateSpace> {
    prob.check_rom(hr)?;
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (n, r, ni, no) = (h.n(), hr.n(), wi.n(), wo.n());
    let (i1, i2, i3, i4) = (0, n, n + r, n + r + ni);
    let nw = n + r + ni + no;
    let mut a = Mat::zeros(nw, nw);
    place(&mut a, i1, i1, h.a());
    place(&mut a, i1, i3, &(h.b() * wi.c()));
    place(&mut a, i2, i2, hr.a());
    place(&mut a, i2, i3, &(hr.b() * wi.c()));
    place(&mut a, i3, i3, wi.a());
    place(&mut a, i4, i1, &(wo.b() * h.c()));
    place(&mut a, i4, i2, &-(wo.b() * hr.c()));
    place(&mut a, i4, i4, wo.a());
    let mut b = Mat::zeros(nw, h.m());
    place(&mut b, i1, 0, &(h.b() * wi.d()));
    place(&mut b, i2, 0, &(hr.b() * wi.d()));
    place(&mut b, i3, 0, wi.b());
    let mut c = Mat::zeros(h.p(), nw);
    place(&mut c, 0, i1, &(wo.d() * h.c()));
    place(&mut c, 0, i2, &-(wo.d() * hr.c()));
    place(&mut c, 0, i4, wo.c());
    StateSpace::new(a, b, c, Mat::zeros(h.p(), h.m()))
}

/// Augmented systems whose tangential interpolation characterizes the
/// weighted optimum. `F` has state matrix `[[A, BC_i], [0, A_i]]`, `G` has
/// `[[A, 0], [B_oC, A_o]]`.
pub fn augmented_f_g(
    prob: &WeightedProblem,
    pi: &Mat,
    qo: &Mat,
    p13: &Mat,
    q14: &Mat,
) -> Result<(StateSpace, StateSpace)> {
    augmented_f_g_parts(prob.plant(), prob.input_weight(), prob.output_weight(), pi, qo, p13, q14)
}

/// [`augmented_f_g`] for an arbitrary system in the plant's place; with a
/// reduced model, pass the ROM cross-gramians (`P23`, `−Q24`) for `p13`, `q14`.
pub fn augmented_f_g_parts(
    h: &StateSpace,
    wi: &StateSpace,
    wo: &StateSpace,
    pi: &Mat,
    qo: &Mat,
    p13: &Mat,
    q14: &Mat,
) -> Result<(StateSpace, StateSpace)> {
    let (n, ni, no) = (h.n(), wi.n(), wo.n());
    if pi.shape() != (ni, ni) || qo.shape() != (no, no) || p13.shape() != (n, ni) || q14.shape() != (n, no) {
        return Err(Error::DimensionMismatch(format!(
            "augmented systems: P_i {:?}, Q_o {:?}, P13 {:?}, Q14 {:?} for n={n}, n_i={ni}, n_o={no}",
            pi.shape(),
            qo.shape(),
            p13.shape(),
            q14.shape()
        )));
    }
    if wi.m() != h.m() || wo.p() != h.p() {
        return Err(Error::DimensionMismatch("weights do not match the system's inputs/outputs".into()));
    }
    let (m, p) = (h.m(), h.p());
    let ddi = wi.d() * wi.d().transpose();

    let mut af = Mat::zeros(n + ni, n + ni);
    place(&mut af, 0, 0, h.a());
    place(&mut af, 0, n, &(h.b() * wi.c()));
    place(&mut af, n, n, wi.a());
    let mut bf = Mat::zeros(n + ni, m);
    place(&mut bf, 0, 0, &(p13 * wi.c().transpose() + h.b() * &ddi));
    place(&mut bf, n, 0, &(pi * wi.c().transpose() + wi.b() * wi.d().transpose()));
    let mut cf = Mat::zeros(p, n + ni);
    place(&mut cf, 0, 0, h.c());
    place(&mut cf, 0, n, &(h.d() * wi.c()));
    let f = StateSpace::new(af, bf, cf, Mat::zeros(p, m))?;

    let dod = wo.d().transpose() * wo.d();
    let mut ag = Mat::zeros(n + no, n + no);
    place(&mut ag, 0, 0, h.a());
    place(&mut ag, n, 0, &(wo.b() * h.c()));
    place(&mut ag, n, n, wo.a());
    let mut bg = Mat::zeros(n + no, m);
    place(&mut bg, 0, 0, h.b());
    place(&mut bg, n, 0, &(wo.b() * h.d()));
    let mut cgt = Mat::zeros(n + no, p);
    place(&mut cgt, 0, 0, &(q14 * wo.b() + h.c().transpose() * &dod));
    place(&mut cgt, n, 0, &(qo * wo.b() + wo.c().transpose() * wo.d()));
    let g = StateSpace::new(ag, bg, cgt.transpose(), Mat::zeros(p, m))?;
    Ok((f, g))
}

/// Pole–residue form `Σ lᵢ rᵢᵀ / (s − λᵢ) + D`.
#[derive(Debug, Clone)]
pub struct PoleResidue {
    pub poles: Vec<C64>,
    pub right_residues: Vec<DVector<C64>>,
    pub left_residues: Vec<DVector<C64>>,
    /// Eigenvector matrix `R` with `A = R diag(λ) R⁻¹`.
    pub spectral_factor: CMat,
}

impl PoleResidue {
    pub fn eval(&self, s: C64, d: &Mat) -> CMat {
        let mut out = to_complex(d);
        for ((lam, l), r) in self.poles.iter().zip(&self.left_residues).zip(&self.right_residues) {
            out += (l * r.transpose()) / (s - lam);
        }
        out
    }
}

/// Diagonalize `A` and read off left/right residues. Requires simple poles.
pub fn pole_residue(sys: &StateSpace) -> Result<PoleResidue> {
    let n = sys.n();
    let e = eig(sys.a())?;
    let anorm = sys.a().norm();
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            gap = gap.min((e.values[i] - e.values[j]).norm());
        }
    }
    if n > 1 && gap <= 1e-10 * anorm {
        return Err(Error::DefectiveMatrix { gap });
    }
    let r = e.vectors;
    let rb = r
        .clone()
        .lu()
        .solve(&to_complex(sys.b()))
        .filter(|x| x.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        .ok_or(Error::DefectiveMatrix { gap })?;
    let cr = to_complex(sys.c()) * &r;
    let right_residues = (0..n).map(|i| rb.row(i).transpose()).collect();
    let left_residues = (0..n).map(|i| cr.column(i).into_owned()).collect();
    Ok(PoleResidue { poles: e.values, right_residues, left_residues, spectral_factor: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(a: f64, b: f64, c: f64, d: f64) -> StateSpace {
        StateSpace::new(
            Mat::from_element(1, 1, a),
            Mat::from_element(1, 1, b),
            Mat::from_element(1, 1, c),
            Mat::from_element(1, 1, d),
        )
        .unwrap()
    }

    #[test]
    fn eval_scalar_and_zero_input() {
        let g = eval_tf(&scalar(-1.0, 1.0, 1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(g[(0, 0)].re, 1.0, epsilon = 1e-15);
        let z = eval_tf(&scalar(-1.0, 0.0, 1.0, 0.7), C64::new(0.3, 2.0)).unwrap();
        assert_eq!(z[(0, 0)], C64::new(0.7, 0.0));
    }

    #[test]
    fn singular_shift_detected() {
        let err = eval_tf(&scalar(-1.0, 1.0, 1.0, 0.0), C64::new(-1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularShift { .. }));
    }

    #[test]
    fn dimension_checks() {
        let bad = StateSpace::new(Mat::zeros(2, 2), Mat::zeros(3, 1), Mat::zeros(1, 2), Mat::zeros(1, 1));
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
        let nan = StateSpace::new(
            Mat::from_element(1, 1, f64::NAN),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
        );
        assert!(matches!(nan, Err(Error::NonFinite(_))));
    }

    #[test]
    fn scalar_residue() {
        let pr = pole_residue(&scalar(-2.0, 3.0, 4.0, 0.0)).unwrap();
        assert_relative_eq!(pr.poles[0].re, -2.0);
        let lr = pr.left_residues[0][0] * pr.right_residues[0][0];
        assert_relative_eq!(lr.re, 12.0, epsilon = 1e-14);
    }

    #[test]
    fn error_system_of_identical_models_vanishes() {
        let h = scalar(-3.0, 2.0, 1.5, 0.0);
        let e = error_system(&h, &h).unwrap();
        assert_eq!(e.n(), 2);
        let v = eval_tf(&e, C64::new(0.1, 1.3)).unwrap();
        assert!(v[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn identity_weights_give_error_system() {
        let h = StateSpace::new(
            Mat::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -2.0]),
            Mat::from_column_slice(2, 1, &[1.0, 1.0]),
            Mat::from_row_slice(1, 2, &[1.0, 0.5]),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let hr = scalar(-1.5, 1.0, 1.0, 0.0);
        let prob = WeightedProblem::unweighted(h.clone(), 1).unwrap();
        let ew = weighted_error_realization(&prob, &hr).unwrap();
        assert_eq!(ew, error_system(&h, &hr).unwrap());
    }

    #[test]
    fn problem_validation() {
        let h = scalar(-1.0, 1.0, 1.0, 0.0);
        assert!(WeightedProblem::unweighted(h.clone(), 1).is_err());
        let unstable = StateSpace::new(
            Mat::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -1.0]),
            Mat::from_element(2, 1, 1.0),
            Mat::from_element(1, 2, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        assert!(matches!(WeightedProblem::unweighted(unstable, 1), Err(Error::UnstableSystem(_))));
    }

    #[test]
    fn series_composes_transfer_functions() {
        let g1 = scalar(-1.0, 1.0, 2.0, 0.5);
        let g2 = scalar(-3.0, 1.0, 1.0, 1.0);
        let s = C64::new(0.2, 0.9);
        let prod = eval_tf(&g1.series(&g2).unwrap(), s).unwrap();
        let want = eval_tf(&g2, s).unwrap() * eval_tf(&g1, s).unwrap();
        assert!((prod - want).norm() < 1e-14);
    }
}
