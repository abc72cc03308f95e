use super::{biorthogonality_error, Diagnostics, ConvergenceHistory, Method, Precomputed, ReductionResult, SylvesterPath};
use crate::error::{Error, Result};
use crate::matdense::{psd_factor, solve_lyapunov, svd, symmetrize, Mat};
use crate::statespace::WeightedProblem;

const FACTOR_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-10;

/// Frequency-weighted controllability and observability gramians of the plant
/// (the plant blocks of the augmented plant–weight cascades).
pub fn weighted_bt_gramians(prob: &WeightedProblem) -> Result<(Mat, Mat)> {
    let pre = Precomputed::new(prob, SylvesterPath::Schur)?;
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (a, b, c) = (h.a(), h.b(), h.c());
    let t = b * wi.c() * pre.p13.transpose();
    let kp = &t + t.transpose() + b * wi.d() * wi.d().transpose() * b.transpose();
    let p = solve_lyapunov(a, &symmetrize(&kp)).map_err(|e| e.in_equation("weighted controllability gramian"))?;
    let u = c.transpose() * wo.b().transpose() * pre.q14.transpose();
    let kq = &u + u.transpose() + c.transpose() * wo.d().transpose() * wo.d() * c;
    let q = solve_lyapunov(&a.transpose(), &symmetrize(&kq)).map_err(|e| e.in_equation("weighted observability gramian"))?;
    Ok((p.solution, q.solution))
}

/// Square-root balancing and truncation to order `r` (`1 ≤ r ≤ n`; `r = n`
/// returns a balanced realization of the plant) with the given gramian pair.
pub fn balanced_from_gramians(prob: &WeightedProblem, p: &Mat, q: &Mat, r: usize, method: Method) -> Result<ReductionResult> {
    let h = prob.plant();
    let n = h.n();
    if r == 0 || r > n {
        return Err(Error::DimensionMismatch(format!("truncation order {r} for a system of order {n}")));
    }
    if p.shape() != (n, n) || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("gramians {:?}, {:?} for order {n}", p.shape(), q.shape())));
    }
    let u = psd_factor(p, FACTOR_TOL)?;
    let l = psd_factor(q, FACTOR_TOL)?;
    let dec = svd(&(l.transpose() * &u))?;
    let smax = dec.s.first().copied().unwrap_or(0.0);
    let rank = dec.s.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < r {
        return Err(Error::RankTooLow { rank, order: r });
    }
    let mut diagnostics = Diagnostics { singular_values: dec.s.clone(), ..Default::default() };
    if r < dec.s.len() && (dec.s[r - 1] - dec.s[r]).abs() <= TIE_TOL * dec.s[r - 1] {
        diagnostics.warnings.push(format!(
            "singular values {} and {} tie at the truncation index; the reduced model is not unique",
            r,
            r + 1
        ));
    }
    let scale = Mat::from_diagonal(&nalgebra::DVector::from_iterator(r, dec.s[..r].iter().map(|s| 1.0 / s.sqrt())));
    let v = &u * dec.v.columns(0, r) * &scale;
    let w = &l * dec.u.columns(0, r) * &scale;
    let rom = h.project(&v, &w)?;
    diagnostics.rom_stable = rom.is_stable()?;
    if !diagnostics.rom_stable {
        diagnostics.warnings.push("reduced model is unstable".into());
    }
    diagnostics.biorth_error = biorthogonality_error(&v, &w);
    Ok(ReductionResult {
        method,
        rom,
        v,
        w,
        history: ConvergenceHistory::default(),
        converged: true,
        iterations: 0,
        p_hat: Some(p.clone()),
        q_hat: Some(q.clone()),
        diagnostics,
    })
}

/// Frequency-weighted balanced truncation.
pub fn fwbt(prob: &WeightedProblem) -> Result<ReductionResult> {
    fwbt_to_order(prob, prob.order())
}

/// [`fwbt`] with an explicit truncation order, which may equal the plant order.
pub fn fwbt_to_order(prob: &WeightedProblem, r: usize) -> Result<ReductionResult> {
    let (p, q) = weighted_bt_gramians(prob)?;
    balanced_from_gramians(prob, &p, &q, r, Method::Fwbt)
}

/// Balanced truncation on the gramian approximations `P̂`, `Q̂` left by a
/// converged fixed-point iteration.
pub fn afwbt(prob: &WeightedProblem, p_hat: &Mat, q_hat: &Mat) -> Result<ReductionResult> {
    balanced_from_gramians(prob, p_hat, q_hat, prob.order(), Method::Afwbt)
}
