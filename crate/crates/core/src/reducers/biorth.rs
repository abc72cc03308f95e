use crate::error::{Error, Result};
use crate::matdense::Mat;

const DEPENDENCE_TOL: f64 = 1e-13;

/// Biorthogonal Gram–Schmidt: bases `V`, `W` with `WᵀV = I`,
/// `span V = span X` and `span W = span Y`. Each column is swept against the
/// previous ones twice.
pub fn biorthogonalize(x: &Mat, y: &Mat) -> Result<(Mat, Mat)> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch(format!(
            "biorthogonalization of {:?} against {:?}",
            x.shape(),
            y.shape()
        )));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("biorthogonalization input".into()));
    }
    let (n, r) = x.shape();
    let mut v_out = Mat::zeros(n, r);
    let mut w_out = Mat::zeros(n, r);
    for i in 0..r {
        let mut v = x.column(i).into_owned();
        let mut w = y.column(i).into_owned();
        let (v0, w0) = (v.norm(), w.norm());
        for _ in 0..2 {
            for k in 0..i {
                let vk = v_out.column(k);
                let wk = w_out.column(k);
                let cv = wk.dot(&v);
                v.axpy(-cv, &vk, 1.0);
                let cw = vk.dot(&w);
                w.axpy(-cw, &wk, 1.0);
            }
        }
        let (vn, wn) = (v.norm(), w.norm());
        if vn <= DEPENDENCE_TOL * v0 || wn <= DEPENDENCE_TOL * w0 || vn == 0.0 || wn == 0.0 {
            return Err(Error::RankDeficient { column: i });
        }
        v /= vn;
        w /= wn;
        let pivot = w.dot(&v);
        if pivot.abs() <= DEPENDENCE_TOL {
            return Err(Error::PivotBreakdown { column: i, pivot: pivot.abs() });
        }
        v /= pivot;
        v_out.set_column(i, &v);
        w_out.set_column(i, &w);
    }
    Ok((v_out, w_out))
}

/// Projection bases from the cross gramians: `V` spans `P12`, `W` spans `−Q12`.
pub fn biorth_gs(p12: &Mat, q12: &Mat) -> Result<(Mat, Mat)> {
    biorthogonalize(p12, &-q12)
}

/// `‖WᵀV − I‖_F`.
pub fn biorthogonality_error(v: &Mat, w: &Mat) -> f64 {
    (w.transpose() * v - Mat::identity(v.ncols(), v.ncols())).norm()
}
