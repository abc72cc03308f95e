//! Weighted gramian partitions, the optimality-condition deviations, the
//! trace splits of the weighted H2 error, and finite-difference gradients.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matdense::{norm2, solve_lyapunov, solve_sylvester, symmetrize, Mat, C64};
use crate::statespace::{
    augmented_f_g_parts, eval_tf, place, pole_residue, weighted_error_realization, StateSpace, WeightedProblem,
};

/// Blocks of the weighted error gramians in state order
/// (plant, reduced model, input weight, output weight).
#[derive(Debug, Clone)]
pub struct GramianPartition {
    pub n: usize,
    pub r: usize,
    pub ni: usize,
    pub no: usize,
    pub p: Mat,
    pub p12: Mat,
    pub p13: Mat,
    pub p14: Mat,
    pub pt: Mat,
    pub p23: Mat,
    pub p24: Mat,
    pub pi: Mat,
    pub p34: Mat,
    pub po: Mat,
    pub q: Mat,
    pub q12: Mat,
    pub q13: Mat,
    pub q14: Mat,
    pub qt: Mat,
    pub q23: Mat,
    pub q24: Mat,
    pub qi: Mat,
    pub q34: Mat,
    pub qo: Mat,
}

fn offsets(n: usize, r: usize, ni: usize, no: usize) -> [(usize, usize); 4] {
    [(0, n), (n, r), (n + r, ni), (n + r + ni, no)]
}

fn block(m: &Mat, rows: (usize, usize), cols: (usize, usize)) -> Mat {
    m.view((rows.0, cols.0), (rows.1, cols.1)).into_owned()
}

impl GramianPartition {
    fn from_full(pw: &Mat, qw: &Mat, n: usize, r: usize, ni: usize, no: usize) -> Self {
        let [b1, b2, b3, b4] = offsets(n, r, ni, no);
        GramianPartition {
            n,
            r,
            ni,
            no,
            p: block(pw, b1, b1),
            p12: block(pw, b1, b2),
            p13: block(pw, b1, b3),
            p14: block(pw, b1, b4),
            pt: block(pw, b2, b2),
            p23: block(pw, b2, b3),
            p24: block(pw, b2, b4),
            pi: block(pw, b3, b3),
            p34: block(pw, b3, b4),
            po: block(pw, b4, b4),
            q: block(qw, b1, b1),
            q12: block(qw, b1, b2),
            q13: block(qw, b1, b3),
            q14: block(qw, b1, b4),
            qt: block(qw, b2, b2),
            q23: block(qw, b2, b3),
            q24: block(qw, b2, b4),
            qi: block(qw, b3, b3),
            q34: block(qw, b3, b4),
            qo: block(qw, b4, b4),
        }
    }

    fn assemble(&self, upper: [[&Mat; 4]; 4]) -> Mat {
        let offs = offsets(self.n, self.r, self.ni, self.no);
        let total = self.n + self.r + self.ni + self.no;
        let mut m = Mat::zeros(total, total);
        for i in 0..4 {
            for j in i..4 {
                place(&mut m, offs[i].0, offs[j].0, upper[i][j]);
                if i != j {
                    place(&mut m, offs[j].0, offs[i].0, &upper[i][j].transpose());
                }
            }
        }
        m
    }

    /// Reassembled controllability gramian `P_w`.
    pub fn full_p(&self) -> Mat {
        let z = Mat::zeros(0, 0);
        self.assemble([
            [&self.p, &self.p12, &self.p13, &self.p14],
            [&z, &self.pt, &self.p23, &self.p24],
            [&z, &z, &self.pi, &self.p34],
            [&z, &z, &z, &self.po],
        ])
    }

    /// Reassembled observability gramian `Q_w`.
    pub fn full_q(&self) -> Mat {
        let z = Mat::zeros(0, 0);
        self.assemble([
            [&self.q, &self.q12, &self.q13, &self.q14],
            [&z, &self.qt, &self.q23, &self.q24],
            [&z, &z, &self.qi, &self.q34],
            [&z, &z, &z, &self.qo],
        ])
    }
}

fn require_stable_rom(hr: &StateSpace) -> Result<()> {
    match hr.require_stable("reduced model") {
        Ok(()) => Ok(()),
        Err(Error::UnstableSystem(msg)) => Err(Error::NotHurwitz(msg)),
        Err(e) => Err(e),
    }
}

/// Solve the two full Lyapunov equations of the weighted error realization
/// and slice the solutions into blocks.
pub fn weighted_gramians(prob: &WeightedProblem, hr: &StateSpace) -> Result<GramianPartition> {
    require_stable_rom(hr)?;
    let ew = weighted_error_realization(prob, hr)?;
    let (a, b, c) = (ew.a(), ew.b(), ew.c());
    let pw = solve_lyapunov(a, &(b * b.transpose()))?.solution;
    let qw = solve_lyapunov(&a.transpose(), &(c.transpose() * c))?.solution;
    Ok(GramianPartition::from_full(
        &pw,
        &qw,
        prob.plant().n(),
        hr.n(),
        prob.input_weight().n(),
        prob.output_weight().n(),
    ))
}

fn syl(a: &Mat, b: &Mat, c: &Mat, name: &str) -> Result<Mat> {
    solve_sylvester(a, b, c).map(|r| r.solution).map_err(|e| e.in_equation(name))
}

fn lyap(a: &Mat, q: &Mat, name: &str) -> Result<Mat> {
    solve_lyapunov(a, &symmetrize(q)).map(|r| r.solution).map_err(|e| e.in_equation(name))
}

/// The same partition assembled block by block from the Sylvester and
/// Lyapunov equations each block satisfies.
pub fn weighted_gramians_blockwise(prob: &WeightedProblem, hr: &StateSpace) -> Result<GramianPartition> {
    require_stable_rom(hr)?;
    prob.check_rom(hr)?;
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (a, b, c) = (h.a(), h.b(), h.c());
    let (ar, br, cr) = (hr.a(), hr.b(), hr.c());
    let (ai, bi, ci, di) = (wi.a(), wi.b(), wi.c(), wi.d());
    let (ao, bo, co, dod) = (wo.a(), wo.b(), wo.c(), wo.d());
    let (at, art, ait, aot) = (a.transpose(), ar.transpose(), ai.transpose(), ao.transpose());
    let ddi = di * di.transpose();
    let ddo = dod.transpose() * dod;

    let pi = lyap(ai, &(bi * bi.transpose()), "P_i")?;
    let inj = ci * &pi + di * bi.transpose();
    let p13 = syl(a, &ait, &(b * &inj), "P13")?;
    let p23 = syl(ar, &ait, &(br * &inj), "P23")?;
    let p = lyap(
        a,
        &(b * ci * p13.transpose() + &p13 * ci.transpose() * b.transpose() + b * &ddi * b.transpose()),
        "P",
    )?;
    let pt = lyap(
        ar,
        &(br * ci * p23.transpose() + &p23 * ci.transpose() * br.transpose() + br * &ddi * br.transpose()),
        "P~",
    )?;
    let p12 = syl(
        a,
        &art,
        &(b * ci * p23.transpose() + &p13 * ci.transpose() * br.transpose() + b * &ddi * br.transpose()),
        "P12",
    )?;
    let p34 = syl(ai, &aot, &((p13.transpose() * c.transpose() - p23.transpose() * cr.transpose()) * bo.transpose()), "P34")?;
    let p14 = syl(a, &aot, &(b * ci * &p34 + (&p * c.transpose() - &p12 * cr.transpose()) * bo.transpose()), "P14")?;
    let p24 = syl(
        ar,
        &aot,
        &(br * ci * &p34 + (p12.transpose() * c.transpose() - &pt * cr.transpose()) * bo.transpose()),
        "P24",
    )?;
    let mix = c * &p14 - cr * &p24;
    let po = lyap(ao, &(bo * &mix + mix.transpose() * bo.transpose()), "P_o")?;

    let qo = lyap(&aot, &(co.transpose() * co), "Q_o")?;
    let obs = bo.transpose() * &qo + dod.transpose() * co;
    let q14 = syl(&at, ao, &(c.transpose() * &obs), "Q14")?;
    let q24 = syl(&art, ao, &(-(cr.transpose() * &obs)), "Q24")?;
    let q = lyap(
        &at,
        &(c.transpose() * bo.transpose() * q14.transpose() + &q14 * bo * c + c.transpose() * &ddo * c),
        "Q",
    )?;
    let qt = lyap(
        &art,
        &(-(cr.transpose() * bo.transpose() * q24.transpose()) - &q24 * bo * cr + cr.transpose() * &ddo * cr),
        "Q~",
    )?;
    let q12 = syl(
        &at,
        ar,
        &(c.transpose() * bo.transpose() * q24.transpose() - &q14 * bo * cr - c.transpose() * &ddo * cr),
        "Q12",
    )?;
    let q34 = syl(&ait, ao, &(ci.transpose() * (b.transpose() * &q14 + br.transpose() * &q24)), "Q34")?;
    let q13 = syl(&at, ai, &(c.transpose() * bo.transpose() * q34.transpose() + (&q * b + &q12 * br) * ci), "Q13")?;
    let q23 = syl(
        &art,
        ai,
        &(-(cr.transpose() * bo.transpose() * q34.transpose()) + (q12.transpose() * b + &qt * br) * ci),
        "Q23",
    )?;
    let cross = b.transpose() * &q13 + br.transpose() * &q23;
    let qi = lyap(&ait, &(ci.transpose() * &cross + cross.transpose() * ci), "Q_i")?;

    Ok(GramianPartition {
        n: h.n(),
        r: hr.n(),
        ni: wi.n(),
        no: wo.n(),
        p,
        p12,
        p13,
        p14,
        pt,
        p23,
        p24,
        pi,
        p34,
        po,
        q,
        q12,
        q13,
        q14,
        qt,
        q23,
        q24,
        qi,
        q34,
        qo,
    })
}

/// Deviation quantities and diagnostics of the weighted optimality conditions.
///
/// Basis-dependent fields (`gal_*`, `fit_*`, `r*_norm`) are NaN when the
/// report is built without projection matrices.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub xbar: Mat,
    pub x: Mat,
    pub ybar: Mat,
    pub y: Mat,
    /// `C̃P̃ − CP12`; with `Z` it is signed so that the gradient with respect
    /// to `C̃` is `2(D_oᵀD_o Z̄ + Z)`.
    pub zbar: Mat,
    pub z: Mat,
    pub dev_a: f64,
    pub dev_b: f64,
    pub dev_c: f64,
    pub dev_a_fro: f64,
    pub dev_b_fro: f64,
    pub dev_c_fro: f64,
    pub gal_p: f64,
    pub gal_q: f64,
    pub fit_p: f64,
    pub fit_q: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
    pub r1_norm: f64,
    pub r2_norm: f64,
}

impl OptimalityReport {
    pub const CSV_FIELDS: [&'static str; 16] = [
        "dev_A", "dev_B", "dev_C", "gal_P", "gal_Q", "fit_P", "fit_Q", "J1", "J2", "J3", "J4", "R1_norm", "R2_norm",
        "dev_A_fro", "dev_B_fro", "dev_C_fro",
    ];

    /// Scalar fields in `CSV_FIELDS` order.
    pub fn csv_values(&self) -> [f64; 16] {
        [
            self.dev_a,
            self.dev_b,
            self.dev_c,
            self.gal_p,
            self.gal_q,
            self.fit_p,
            self.fit_q,
            self.j1,
            self.j2,
            self.j3,
            self.j4,
            self.r1_norm,
            self.r2_norm,
            self.dev_a_fro,
            self.dev_b_fro,
            self.dev_c_fro,
        ]
    }
}

/// Weighted H2 error split into the two pairs of trace terms, `(J1, J2, J3, J4)`.
pub fn trace_splits(prob: &WeightedProblem, hr: &StateSpace, g: &GramianPartition) -> (f64, f64, f64, f64) {
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (b, c, br, cr) = (h.b(), h.c(), hr.b(), hr.c());
    let (bi, di, co, dod) = (wi.b(), wi.d(), wo.c(), wo.d());
    let doc = dod * c;
    let docr = dod * cr;
    let j1 = (&doc * &g.p * doc.transpose() + &docr * &g.pt * docr.transpose() - &doc * &g.p12 * docr.transpose() * 2.0)
        .trace();
    let j2 = (co * &g.po * co.transpose() + (&doc * &g.p14 * co.transpose()) * 2.0 - (&docr * &g.p24 * co.transpose()) * 2.0)
        .trace();
    let bdi = b * di;
    let brdi = br * di;
    let j3 = (bdi.transpose() * &g.q * &bdi + brdi.transpose() * &g.qt * &brdi + bdi.transpose() * &g.q12 * &brdi * 2.0)
        .trace();
    let j4 = (bi.transpose() * &g.qi * bi
        + bdi.transpose() * &g.q13 * bi * 2.0
        + brdi.transpose() * &g.q23 * bi * 2.0)
        .trace();
    (j1, j2, j3, j4)
}

/// Report from a solved partition; `basis` supplies `(V, W)` for the
/// projection-dependent fields.
pub fn report_from_partition(
    prob: &WeightedProblem,
    hr: &StateSpace,
    g: &GramianPartition,
    basis: Option<(&Mat, &Mat)>,
) -> Result<OptimalityReport> {
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (a, b, c) = (h.a(), h.b(), h.c());
    let (br, cr) = (hr.b(), hr.c());
    let (bi, ci, di) = (wi.b(), wi.c(), wi.d());
    let (bo, co, dod) = (wo.b(), wo.c(), wo.d());

    let xbar = g.q12.transpose() * &g.p12 + &g.qt * &g.pt;
    let ybar = g.q12.transpose() * b + &g.qt * br;
    let zbar = cr * &g.pt - c * &g.p12;
    let x = &g.q23 * g.p23.transpose() + &g.q24 * g.p24.transpose();
    let y = (g.q12.transpose() * &g.p13 + &g.qt * &g.p23 + &g.q23 * &g.pi + &g.q24 * g.p34.transpose()) * ci.transpose()
        + &g.q23 * bi * di.transpose();
    let z = -(bo.transpose()
        * (g.q14.transpose() * &g.p12 + g.q24.transpose() * &g.pt + g.q34.transpose() * g.p23.transpose() + &g.qo * g.p24.transpose()))
        - dod.transpose() * co * g.p24.transpose();

    let ga = &xbar + &x;
    let gb = &ybar * di * di.transpose() + &y;
    let gc = dod.transpose() * dod * &zbar + &z;
    let (j1, j2, j3, j4) = trace_splits(prob, hr, g);

    let (mut gal_p, mut gal_q, mut fit_p, mut fit_q, mut r1_norm, mut r2_norm) =
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    if let Some((v, w)) = basis {
        if v.shape() != (h.n(), hr.n()) || w.shape() != v.shape() {
            return Err(Error::DimensionMismatch(format!(
                "projection bases {:?}, {:?} for n={}, r={}",
                v.shape(),
                w.shape(),
                h.n(),
                hr.n()
            )));
        }
        let (ph, qh) = hat_gramians(g, v, w);
        gal_p = norm2(&(&g.p13 - v * &g.p23));
        gal_q = norm2(&(&g.q14 + w * &g.q24));
        fit_p = norm2(&(&g.p - &ph));
        fit_q = norm2(&(&g.q - &qh));
        let r1 = a * &ph + &ph * a.transpose() + b * ci * g.p13.transpose() + &g.p13 * ci.transpose() * b.transpose()
            + b * di * di.transpose() * b.transpose();
        let r2 = a.transpose() * &qh + &qh * a + c.transpose() * bo.transpose() * g.q14.transpose() + &g.q14 * bo * c
            + c.transpose() * dod.transpose() * dod * c;
        r1_norm = norm2(&r1);
        r2_norm = norm2(&r2);
    }

    Ok(OptimalityReport {
        dev_a: norm2(&ga),
        dev_b: norm2(&gb),
        dev_c: norm2(&gc),
        dev_a_fro: ga.norm(),
        dev_b_fro: gb.norm(),
        dev_c_fro: gc.norm(),
        xbar,
        x,
        ybar,
        y,
        zbar,
        z,
        gal_p,
        gal_q,
        fit_p,
        fit_q,
        j1,
        j2,
        j3,
        j4,
        r1_norm,
        r2_norm,
    })
}

/// Full report for a reduced model obtained with projection matrices `(V, W)`.
pub fn deviation_report(prob: &WeightedProblem, hr: &StateSpace, v: &Mat, w: &Mat) -> Result<OptimalityReport> {
    let g = weighted_gramians(prob, hr)?;
    report_from_partition(prob, hr, &g, Some((v, w)))
}

/// `P̂ = V P̃ Vᵀ` and `Q̂ = W Q̃ Wᵀ`, symmetrized.
pub fn hat_gramians(g: &GramianPartition, v: &Mat, w: &Mat) -> (Mat, Mat) {
    (symmetrize(&(v * &g.pt * v.transpose())), symmetrize(&(w * &g.qt * w.transpose())))
}

/// Which reduced-model matrix a gradient refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RomParameter {
    A,
    B,
    C,
}

/// Scalar whose gradient [`fd_gradient_of`] approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Squared weighted H2 error.
    Total,
    J1,
    J2,
    J3,
    J4,
}

fn objective_value(prob: &WeightedProblem, hr: &StateSpace, objective: Objective) -> Result<f64> {
    let g = weighted_gramians(prob, hr)?;
    let (j1, j2, j3, j4) = trace_splits(prob, hr, &g);
    Ok(match objective {
        Objective::Total => j1 + j2,
        Objective::J1 => j1,
        Objective::J2 => j2,
        Objective::J3 => j3,
        Objective::J4 => j4,
    })
}

/// Central-difference gradient of the squared weighted H2 error.
pub fn fd_gradient(prob: &WeightedProblem, hr: &StateSpace, which: RomParameter, h: Option<f64>) -> Result<Mat> {
    fd_gradient_of(prob, hr, which, Objective::Total, h)
}

/// Central-difference gradient of `objective`; the default step is
/// `1e-5·(1 + ‖parameter‖_F)`.
pub fn fd_gradient_of(
    prob: &WeightedProblem,
    hr: &StateSpace,
    which: RomParameter,
    objective: Objective,
    h: Option<f64>,
) -> Result<Mat> {
    let param = match which {
        RomParameter::A => hr.a(),
        RomParameter::B => hr.b(),
        RomParameter::C => hr.c(),
    };
    let step = h.unwrap_or(1e-5 * (1.0 + param.norm()));
    let label = match which {
        RomParameter::A => "A~",
        RomParameter::B => "B~",
        RomParameter::C => "C~",
    };
    let mut grad = Mat::zeros(param.nrows(), param.ncols());
    for i in 0..param.nrows() {
        for j in 0..param.ncols() {
            let mut vals = [0.0; 2];
            for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                let (mut a, mut b, mut c) = (hr.a().clone(), hr.b().clone(), hr.c().clone());
                match which {
                    RomParameter::A => a[(i, j)] += sign * step,
                    RomParameter::B => b[(i, j)] += sign * step,
                    RomParameter::C => c[(i, j)] += sign * step,
                }
                let pert = StateSpace::new(a, b, c, hr.d().clone())?;
                vals[k] = match objective_value(prob, &pert, objective) {
                    Err(Error::NotHurwitz(_)) => return Err(Error::PerturbationUnstable(label.into())),
                    other => other?,
                };
            }
            grad[(i, j)] = (vals[0] - vals[1]) / (2.0 * step);
        }
    }
    Ok(grad)
}

/// Mismatch of the tangential interpolation conditions at the mirrored
/// reduced-model poles.
#[derive(Debug, Clone)]
pub struct InterpolationResiduals {
    /// `‖(F(−λ̃ᵢ) − F̃(−λ̃ᵢ)) r̃ᵢ‖₂` per pole.
    pub right: Vec<f64>,
    /// `‖l̃ᵢᵀ (G(−λ̃ᵢ) − G̃(−λ̃ᵢ))‖₂` per pole.
    pub left: Vec<f64>,
}

impl InterpolationResiduals {
    pub fn max_right(&self) -> f64 {
        self.right.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max_left(&self) -> f64 {
        self.left.iter().cloned().fold(0.0, f64::max)
    }
}

/// Residues use unit-norm eigenvectors of Ã, so the magnitudes depend on
/// that normalization.
pub fn interpolation_residuals(
    prob: &WeightedProblem,
    hr: &StateSpace,
    g: &GramianPartition,
) -> Result<InterpolationResiduals> {
    interpolation_residuals_from(prob, hr, [&g.pi, &g.qo, &g.p13, &g.q14, &g.p23, &g.q24])
}

/// [`interpolation_residuals`] from the blocks `[P_i, Q_o, P13, Q14, P23, Q24]`.
pub fn interpolation_residuals_from(
    prob: &WeightedProblem,
    hr: &StateSpace,
    blocks: [&Mat; 6],
) -> Result<InterpolationResiduals> {
    let [pi, qo, p13, q14, p23, q24] = blocks;
    let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
    let (f, gg) = augmented_f_g_parts(h, wi, wo, pi, qo, p13, q14)?;
    let (fr, gr) = augmented_f_g_parts(hr, wi, wo, pi, qo, p23, &-q24)?;
    let pr = pole_residue(hr)?;
    let mut right = Vec::with_capacity(hr.n());
    let mut left = Vec::with_capacity(hr.n());
    for (i, lam) in pr.poles.iter().enumerate() {
        let s: C64 = -lam;
        let df = eval_tf(&f, s)? - eval_tf(&fr, s)?;
        let dg = eval_tf(&gg, s)? - eval_tf(&gr, s)?;
        let rv: &DVector<C64> = &pr.right_residues[i];
        let lv: &DVector<C64> = &pr.left_residues[i];
        right.push((df * rv).norm());
        left.push((lv.transpose() * dg).norm());
    }
    Ok(InterpolationResiduals { right, left })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys2() -> StateSpace {
        StateSpace::new(
            Mat::from_row_slice(2, 2, &[-1.0, 0.5, -0.3, -2.0]),
            Mat::from_column_slice(2, 1, &[1.0, 0.4]),
            Mat::from_row_slice(1, 2, &[0.7, -1.0]),
            Mat::zeros(1, 1),
        )
        .unwrap()
    }

    fn plant3() -> StateSpace {
        StateSpace::new(
            Mat::from_row_slice(3, 3, &[-1.0, 0.5, 0.0, -0.3, -2.0, 1.0, 0.0, -1.0, -0.5]),
            Mat::from_column_slice(3, 1, &[1.0, 0.4, -0.2]),
            Mat::from_row_slice(1, 3, &[0.7, -1.0, 0.3]),
            Mat::zeros(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn exact_model_has_zero_deviation() {
        // r = n is outside WeightedProblem's range, so build the partition by hand
        let h = plant3();
        let prob = WeightedProblem::unweighted(h.clone(), 2).unwrap();
        let ew = weighted_error_realization(&prob, &h).unwrap();
        let pw = solve_lyapunov(ew.a(), &(ew.b() * ew.b().transpose())).unwrap().solution;
        let qw = solve_lyapunov(&ew.a().transpose(), &(ew.c().transpose() * ew.c())).unwrap().solution;
        let g = GramianPartition::from_full(&pw, &qw, 3, 3, 0, 0);
        assert!((&g.p12 - &g.p).norm() < 1e-12);
        assert!((&g.pt - &g.p).norm() < 1e-12);
        let id = Mat::identity(3, 3);
        let rep = report_from_partition(&prob, &h, &g, Some((&id, &id))).unwrap();
        assert!(rep.dev_a < 1e-10 && rep.dev_b < 1e-10 && rep.dev_c < 1e-10);
        assert!(rep.zbar.norm() < 1e-12);
        let (ph, _) = hat_gramians(&g, &id, &id);
        assert!((ph - &g.p).norm() < 1e-14);
    }

    #[test]
    fn identity_weight_cross_block_is_direct_sylvester() {
        let h = plant3();
        let hr = sys2();
        let prob = WeightedProblem::unweighted(h.clone(), 2).unwrap();
        let g = weighted_gramians(&prob, &hr).unwrap();
        let direct =
            solve_sylvester(h.a(), &hr.a().transpose(), &(h.b() * hr.b().transpose())).unwrap().solution;
        assert!((&g.p12 - direct).norm() < 1e-9);
    }

    #[test]
    fn unstable_rom_is_named() {
        let prob = WeightedProblem::unweighted(plant3(), 1).unwrap();
        let hr = StateSpace::new(
            Mat::from_element(1, 1, 0.5),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )
        .unwrap();
        match weighted_gramians(&prob, &hr) {
            Err(Error::NotHurwitz(msg)) => assert!(msg.contains("reduced model")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
