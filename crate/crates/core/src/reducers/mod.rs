//! Reduction algorithms: the fixed-point iteration on the weighted optimality
//! conditions, its tangential-interpolation counterpart, and frequency-weighted
//! balanced truncation with exact or approximated gramians.

mod balanced;
mod biorth;
mod fwhmor;
mod fwitia;

use std::fmt;
use std::str::FromStr;

pub use balanced::{afwbt, balanced_from_gramians, fwbt, fwbt_to_order, weighted_bt_gramians};
pub use biorth::{biorth_gs, biorthogonalize, biorthogonality_error};
pub use fwhmor::fwhmor;
pub use fwitia::{fwitia, FwitiaConfig};

use crate::error::{Error, Result};
use crate::matdense::{
    eig, orthonormalize, real_schur, solve_lyapunov, solve_sylvester, solve_sylvester_schur,
    solve_sylvester_shifted, symmetrize, Mat, SchurForm, C64,
};
use crate::optimality::InterpolationResiduals;
use crate::statespace::{StateSpace, WeightedProblem, STABILITY_MARGIN};

/// Reduction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fwhmor,
    Fwitia,
    Fwbt,
    Afwbt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fwhmor, Method::Fwitia, Method::Fwbt, Method::Afwbt];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Fwhmor => "FWHMOR",
            Method::Fwitia => "FWITIA",
            Method::Fwbt => "FWBT",
            Method::Afwbt => "A-FWBT",
        }
    }

    /// Lowercase name without punctuation, used for directory names.
    pub fn slug(&self) -> &'static str {
        match self {
            Method::Fwhmor => "fwhmor",
            Method::Fwitia => "fwitia",
            Method::Fwbt => "fwbt",
            Method::Afwbt => "afwbt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "fwhmor" => Ok(Method::Fwhmor),
            "fwitia" => Ok(Method::Fwitia),
            "fwbt" => Ok(Method::Fwbt),
            "afwbt" => Ok(Method::Afwbt),
            _ => Err(Error::InvalidOption(format!("unknown method '{s}'"))),
        }
    }
}

/// How the plant-sized Sylvester equations are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SylvesterPath {
    /// Bartels–Stewart with the Schur form of `A` computed once.
    #[default]
    Schur,
    /// One shifted solve with `A` per Schur block of the small coefficient.
    ShiftedSolves,
}

/// How the interpolation iteration makes its two bases biorthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FwitiaMode {
    /// Biorthogonal Gram–Schmidt on the orthonormalized bases.
    #[default]
    Robust,
    /// `W ← W (VᵀW)⁻¹`.
    Correction,
}

#[derive(Debug, Clone)]
pub struct FwhmorOptions {
    pub max_iters: usize,
    /// Relative pole-change tolerance.
    pub pole_tol: f64,
    /// Consecutive iterations a stopping criterion must hold.
    pub stall_window: usize,
    /// Also stop when the relative change of `‖X̄‖` stagnates.
    pub use_xbar_criterion: bool,
    /// Also stop when the relative changes of `e1` and `e2` stagnate.
    pub use_e_criterion: bool,
    /// Compute `e1`, `e2`, `‖X̄‖` and timings for every iterate.
    pub record_history: bool,
    pub sylvester: SylvesterPath,
    pub fwitia_mode: FwitiaMode,
}

impl Default for FwhmorOptions {
    fn default() -> Self {
        FwhmorOptions {
            max_iters: 200,
            pole_tol: 1e-2,
            stall_window: 3,
            use_xbar_criterion: false,
            use_e_criterion: false,
            record_history: true,
            sylvester: SylvesterPath::Schur,
            fwitia_mode: FwitiaMode::Robust,
        }
    }
}

impl FwhmorOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidOption("max_iters must be positive".into()));
        }
        if !(self.pole_tol > 0.0 && self.pole_tol.is_finite()) {
            return Err(Error::InvalidOption(format!("pole_tol must be positive, got {}", self.pole_tol)));
        }
        if self.stall_window == 0 {
            return Err(Error::InvalidOption("stall_window must be at least 1".into()));
        }
        Ok(())
    }

    fn needs_traces(&self) -> bool {
        self.record_history || self.use_e_criterion || self.use_xbar_criterion
    }
}

/// One iterate of FWHMOR or FWITIA.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub poles: Vec<C64>,
    /// Largest relative pole movement against the previous iterate
    /// (infinite for the first one).
    pub pole_change: f64,
    pub e1: f64,
    pub e2: f64,
    pub xbar_norm: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceHistory {
    pub records: Vec<IterationRecord>,
}

impl ConvergenceHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, rec: IterationRecord) {
        self.records.push(rec);
    }

    pub fn pole_changes(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.pole_change).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub rom_stable: bool,
    /// `‖WᵀV − I‖_F`.
    pub biorth_error: f64,
    /// Weighted Hankel-type singular values (balanced methods).
    pub singular_values: Vec<f64>,
    pub interpolation: Option<InterpolationResiduals>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub method: Method,
    pub rom: StateSpace,
    pub v: Mat,
    pub w: Mat,
    pub history: ConvergenceHistory,
    pub converged: bool,
    pub iterations: usize,
    /// `V P̃ Vᵀ`, absent when the final reduced model is unstable.
    pub p_hat: Option<Mat>,
    pub q_hat: Option<Mat>,
    pub diagnostics: Diagnostics,
}

/// Greedy nearest matching: each old pole in order claims the closest unused
/// new pole. Returns the largest relative displacement.
pub fn pole_change(old: &[C64], new: &[C64]) -> f64 {
    if old.len() != new.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; new.len()];
    let mut worst: f64 = 0.0;
    for p in old {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (j, q) in new.iter().enumerate() {
            let d = (p - q).norm();
            if !used[j] && d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        match best {
            Some(j) => used[j] = true,
            None => return f64::INFINITY,
        }
        let scale = p.norm();
        let rel = if scale > 0.0 { best_d / scale } else { best_d };
        if rel.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(rel);
    }
    worst
}

fn rel_change(old: f64, new: f64) -> f64 {
    let d = (new - old).abs();
    let s = old.abs().max(new.abs());
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// True when one of the enabled criteria has held over the last
/// `stall_window` iterates.
pub fn check_convergence(history: &ConvergenceHistory, opts: &FwhmorOptions) -> bool {
    let recs = &history.records;
    let w = opts.stall_window.max(1);
    if recs.len() < 2 || recs.len() < w {
        return false;
    }
    let tail = &recs[recs.len() - w..];
    if tail.iter().all(|r| r.pole_change <= opts.pole_tol) {
        return true;
    }
    if recs.len() <= w {
        return false;
    }
    let pairs = &recs[recs.len() - w - 1..];
    let stalled = |f: &dyn Fn(&IterationRecord) -> f64| {
        pairs.windows(2).all(|p| rel_change(f(&p[0]), f(&p[1])) <= opts.pole_tol)
    };
    if opts.use_e_criterion && stalled(&|r| r.e1) && stalled(&|r| r.e2) {
        return true;
    }
    opts.use_xbar_criterion && stalled(&|r| r.xbar_norm)
}

/// Weight-dependent quantities that stay fixed while the reduced model changes.
pub(crate) struct Precomputed {
    pub pi: Mat,
    pub qo: Mat,
    pub p13: Mat,
    pub q14: Mat,
    /// `C_i P_i + D_i B_iᵀ`.
    inj_p: Mat,
    /// `B_oᵀ Q_o + D_oᵀ C_o`.
    inj_q: Mat,
    schur_a: Option<(SchurForm, SchurForm)>,
    path: SylvesterPath,
}

/// Sylvester solves tied to one reduced model.
pub(crate) struct RomSolves {
    pub p23: Mat,
    pub q24: Mat,
    pub p12: Mat,
    pub q12: Mat,
}

impl Precomputed {
    pub fn new(prob: &WeightedProblem, path: SylvesterPath) -> Result<Self> {
        let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
        let pi = solve_lyapunov(wi.a(), &(wi.b() * wi.b().transpose()))
            .map_err(|e| e.in_equation("input-weight gramian"))?
            .solution;
        let qo = solve_lyapunov(&wo.a().transpose(), &(wo.c().transpose() * wo.c()))
            .map_err(|e| e.in_equation("output-weight gramian"))?
            .solution;
        let inj_p = wi.c() * &pi + wi.d() * wi.b().transpose();
        let inj_q = wo.b().transpose() * &qo + wo.d().transpose() * wo.c();
        let schur_a = match path {
            SylvesterPath::Schur if h.n() > 0 => {
                let s = real_schur(h.a())?;
                let st = s.transposed();
                Some((s, st))
            }
            _ => None,
        };
        let mut pre = Precomputed { pi, qo, p13: Mat::zeros(0, 0), q14: Mat::zeros(0, 0), inj_p, inj_q, schur_a, path };
        pre.p13 = pre
            .solve_plant(h.a(), false, wi.a().transpose(), &(h.b() * &pre.inj_p))
            .map_err(|e| e.in_equation("plant/input-weight cross gramian"))?;
        pre.q14 = pre
            .solve_plant(h.a(), true, wo.a().clone(), &(h.c().transpose() * &pre.inj_q))
            .map_err(|e| e.in_equation("plant/output-weight cross gramian"))?;
        Ok(pre)
    }

    /// Solve `op(A) X + X M + K = 0` with `op(A)` the plant matrix or its transpose.
    fn solve_plant(&self, a: &Mat, transposed: bool, m: Mat, k: &Mat) -> Result<Mat> {
        let at;
        let lhs = if transposed {
            at = a.transpose();
            &at
        } else {
            a
        };
        let sol = match (self.path, &self.schur_a) {
            (SylvesterPath::Schur, Some((s, st))) if m.nrows() > 0 => {
                let sm = real_schur(&m)?;
                solve_sylvester_schur(if transposed { st } else { s }, &sm, lhs, &m, k)?
            }
            (SylvesterPath::ShiftedSolves, _) => solve_sylvester_shifted(lhs, &m, k)?,
            _ => solve_sylvester(lhs, &m, k)?,
        };
        Ok(sol.solution)
    }

    pub fn rom_solves(&self, prob: &WeightedProblem, rom: &StateSpace) -> Result<RomSolves> {
        let (h, wi, wo) = (prob.plant(), prob.input_weight(), prob.output_weight());
        let (ar, br, cr) = (rom.a(), rom.b(), rom.c());
        let p23 = solve_sylvester(ar, &wi.a().transpose(), &(br * &self.inj_p))
            .map_err(|e| e.in_equation("reduced/input-weight cross gramian"))?
            .solution;
        let q24 = solve_sylvester(&ar.transpose(), wo.a(), &-(cr.transpose() * &self.inj_q))
            .map_err(|e| e.in_equation("reduced/output-weight cross gramian"))?
            .solution;
        let ddi = wi.d() * wi.d().transpose();
        let dod = wo.d().transpose() * wo.d();
        let kp = h.b() * wi.c() * p23.transpose()
            + &self.p13 * wi.c().transpose() * br.transpose()
            + h.b() * &ddi * br.transpose();
        let p12 = self
            .solve_plant(h.a(), false, ar.transpose(), &kp)
            .map_err(|e| e.in_equation("plant/reduced controllability cross gramian"))?;
        let kq = h.c().transpose() * wo.b().transpose() * q24.transpose()
            - &self.q14 * wo.b() * cr
            - h.c().transpose() * &dod * cr;
        let q12 = self
            .solve_plant(h.a(), true, ar.clone(), &kq)
            .map_err(|e| e.in_equation("plant/reduced observability cross gramian"))?;
        Ok(RomSolves { p23, q24, p12, q12 })
    }

    /// Reduced-model gramians `(P̃, Q̃)` of the weighted error realization.
    pub fn rom_gramians(&self, prob: &WeightedProblem, rom: &StateSpace, s: &RomSolves) -> Result<(Mat, Mat)> {
        let (wi, wo) = (prob.input_weight(), prob.output_weight());
        let (ar, br, cr) = (rom.a(), rom.b(), rom.c());
        let t = br * wi.c() * s.p23.transpose();
        let kp = &t + t.transpose() + br * wi.d() * wi.d().transpose() * br.transpose();
        let pt = solve_lyapunov(ar, &symmetrize(&kp))?.solution;
        let u = cr.transpose() * wo.b().transpose() * s.q24.transpose();
        let kq = -(&u + u.transpose()) + cr.transpose() * wo.d().transpose() * wo.d() * cr;
        let qt = solve_lyapunov(&ar.transpose(), &symmetrize(&kq))?.solution;
        Ok((pt, qt))
    }
}

/// `(e1, e2, ‖X̄‖₂)` for a stable reduced model.
pub(crate) fn trace_quantities(
    prob: &WeightedProblem,
    rom: &StateSpace,
    s: &RomSolves,
    pt: &Mat,
    qt: &Mat,
) -> (f64, f64, f64) {
    let h = prob.plant();
    let (br, cr) = (rom.b(), rom.c());
    let e1 = (2.0 * h.c() * &s.p12 * cr.transpose() - cr * pt * cr.transpose()).trace();
    let e2 = (-2.0 * h.b().transpose() * &s.q12 * br - br.transpose() * qt * br).trace();
    let xbar = s.q12.transpose() * &s.p12 + qt * pt;
    (e1, e2, crate::matdense::norm2(&xbar))
}

pub(crate) fn is_stable_poles(poles: &[C64]) -> bool {
    poles.iter().all(|p| p.re < -STABILITY_MARGIN)
}

/// Galerkin projection onto the invariant subspace of the `r` slowest modes.
/// When `r` would split a conjugate pair, the last basis vector is the
/// direction inside that pair's plane whose Rayleigh quotient equals the real
/// part of the pair, so the result stays stable.
pub fn modal_initial_rom(plant: &StateSpace, r: usize) -> Result<StateSpace> {
    let n = plant.n();
    if r == 0 || r > n {
        return Err(Error::InvalidOption(format!("modal order {r} for a system of order {n}")));
    }
    let a = plant.a();
    let e = eig(a)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        let (x, y) = (e.values[i], e.values[j]);
        y.re.total_cmp(&x.re).then(x.im.abs().total_cmp(&y.im.abs())).then(y.im.total_cmp(&x.im))
    });

    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(r);
    let mut split: Option<usize> = None;
    let mut k = 0;
    while cols.len() < r && k < n {
        let i = idx[k];
        let lam = e.values[i];
        let v = e.vectors.column(i);
        if lam.im.abs() <= 1e-12 * lam.norm().max(1.0) {
            cols.push(v.map(|z| z.re));
            k += 1;
        } else {
            if lam.im < 0.0 {
                k += 1;
                continue;
            }
            if cols.len() + 2 <= r {
                cols.push(v.map(|z| z.re));
                cols.push(v.map(|z| z.im));
            } else {
                split = Some(i);
            }
            k += 1;
            if split.is_some() {
                break;
            }
        }
    }

    let base = if cols.is_empty() { Mat::zeros(n, 0) } else { orthonormalize(&Mat::from_columns(&cols)) };
    let basis = match split {
        None => base,
        Some(i) => {
            let v = e.vectors.column(i);
            let mut pair = Mat::from_columns(&[v.map(|z| z.re), v.map(|z| z.im)]);
            for _ in 0..2 {
                let proj = &base * (base.transpose() * &pair);
                pair -= proj;
            }
            let q2 = orthonormalize(&pair);
            let t = q2.transpose() * a * &q2;
            let theta = 0.5 * (-(t[(0, 0)] - t[(1, 1)])).atan2(t[(0, 1)] + t[(1, 0)]);
            let q = &q2 * nalgebra::DVector::from_column_slice(&[theta.cos(), theta.sin()]);
            let mut out = Mat::zeros(n, base.ncols() + 1);
            out.columns_mut(0, base.ncols()).copy_from(&base);
            out.set_column(base.ncols(), &q);
            out
        }
    };
    if basis.ncols() != r {
        return Err(Error::RankDeficient { column: basis.ncols() });
    }
    plant.project(&basis, &basis)
}

/// Default starting point for the iterative methods: [`modal_initial_rom`]
/// with the plant's feedthrough.
pub fn default_initial_rom(prob: &WeightedProblem) -> Result<StateSpace> {
    modal_initial_rom(prob.plant(), prob.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matdense::eig_order;

    fn rec(poles: Vec<C64>, change: f64) -> IterationRecord {
        IterationRecord { poles, pole_change: change, e1: 1.0, e2: 1.0, xbar_norm: 1.0, seconds: 0.0 }
    }

    #[test]
    fn convergence_edge_cases() {
        let opts = FwhmorOptions::default();
        let mut h = ConvergenceHistory::default();
        assert!(!check_convergence(&h, &opts));
        let p = vec![C64::new(-1.0, 2.0), C64::new(-1.0, -2.0)];
        h.push(rec(p.clone(), f64::INFINITY));
        assert!(!check_convergence(&h, &opts));
        for _ in 0..3 {
            let c = pole_change(&h.records.last().unwrap().poles, &p);
            assert_eq!(c, 0.0);
            h.push(rec(p.clone(), c));
        }
        assert!(check_convergence(&h, &opts));
    }

    #[test]
    fn pole_matching_is_order_free() {
        let a = vec![C64::new(-1.0, 0.0), C64::new(-3.0, 0.0)];
        let b = vec![C64::new(-3.0, 0.0), C64::new(-1.1, 0.0)];
        assert!((pole_change(&a, &b) - 0.1).abs() < 1e-12);
        assert_eq!(pole_change(&a, &b[..1]), f64::INFINITY);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(m.slug().parse::<Method>().unwrap(), m);
        }
        assert!("bt".parse::<Method>().is_err());
    }

    #[test]
    fn options_are_validated() {
        let mut o = FwhmorOptions::default();
        assert!(o.validate().is_ok());
        o.pole_tol = 0.0;
        assert!(matches!(o.validate(), Err(Error::InvalidOption(_))));
    }

    #[test]
    fn modal_init_keeps_slowest_poles_and_stability() {
        let a = Mat::from_row_slice(
            4,
            4,
            &[-0.1, 3.0, 0.0, 0.0, -3.0, -0.1, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0, -5.0],
        );
        let plant = StateSpace::new(a, Mat::from_element(4, 1, 1.0), Mat::from_element(1, 4, 1.0), Mat::zeros(1, 1))
            .unwrap();
        let rom = modal_initial_rom(&plant, 2).unwrap();
        let mut got = crate::matdense::eigenvalues(rom.a()).unwrap();
        got.sort_by(eig_order);
        assert!((got[0] - C64::new(-0.1, -3.0)).norm() < 1e-10 || (got[0] - C64::new(-0.1, 3.0)).norm() < 1e-10);
        // r = 1 splits the slow pair
        let rom1 = modal_initial_rom(&plant, 1).unwrap();
        assert!((rom1.a()[(0, 0)] + 0.1).abs() < 1e-10);
        let rom3 = modal_initial_rom(&plant, 3).unwrap();
        assert!(rom3.is_stable().unwrap());
    }
}
