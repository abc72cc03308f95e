use std::time::Instant;

use nalgebra::DVector;

use super::fwhmor::{finish, Tracker};
use super::{biorthogonalize, FwhmorOptions, FwitiaMode, Method, Precomputed, ReductionResult};
use crate::error::{Error, Result};
use crate::matdense::{eig_order, orthonormalize, CMat, Mat, C64};
use crate::statespace::{augmented_f_g, pole_residue, StateSpace, WeightedProblem};

const CONJ_TOL: f64 = 1e-8;

/// Interpolation points with right and left tangential directions.
#[derive(Debug, Clone)]
pub struct FwitiaConfig {
    pub points: Vec<C64>,
    pub right_directions: Vec<DVector<C64>>,
    pub left_directions: Vec<DVector<C64>>,
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= 1e-12 * z.norm().max(1.0)
}

impl FwitiaConfig {
    /// Checked constructor; reorders so each conjugate pair is adjacent with
    /// the positive-imaginary member first.
    pub fn new(points: Vec<C64>, right: Vec<DVector<C64>>, left: Vec<DVector<C64>>) -> Result<Self> {
        let mut cfg = FwitiaConfig { points, right_directions: right, left_directions: left };
        cfg.sort();
        cfg.check_structure()?;
        if let Some(p) = cfg.points.iter().find(|p| !(p.re > 0.0)) {
            return Err(Error::InvalidOption(format!("interpolation point {p} is not in the open right half-plane")));
        }
        Ok(cfg)
    }

    /// Mirror images of the reduced model's poles, with its residue directions.
    pub fn from_rom(rom: &StateSpace) -> Result<Self> {
        let pr = pole_residue(rom)?;
        let mut cfg = FwitiaConfig {
            points: pr.poles.iter().map(|l| -l).collect(),
            right_directions: pr.right_residues,
            left_directions: pr.left_residues,
        };
        cfg.sort();
        cfg.check_structure()?;
        Ok(cfg)
    }

    /// Starting data from an initial reduced model: mirrored poles, with
    /// residue directions for MIMO models and unit directions for SISO ones.
    pub fn mirrored(rom: &StateSpace) -> Result<Self> {
        let mut cfg = Self::from_rom(rom)?;
        if rom.m() == 1 && rom.p() == 1 {
            let one = DVector::from_element(1, C64::new(1.0, 0.0));
            cfg.right_directions = vec![one.clone(); cfg.len()];
            cfg.left_directions = vec![one; cfg.len()];
        }
        Ok(cfg)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimensions against a problem of order `r` with `m` inputs and `p` outputs.
    pub fn check_dims(&self, r: usize, m: usize, p: usize) -> Result<()> {
        if self.points.len() != r
            || self.right_directions.iter().any(|b| b.len() != m)
            || self.left_directions.iter().any(|c| c.len() != p)
        {
            return Err(Error::DimensionMismatch(format!(
                "{} interpolation points for order {r}, directions must have lengths {m} and {p}",
                self.points.len()
            )));
        }
        Ok(())
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&i, &j| eig_order(&self.points[i], &self.points[j]));
        self.points = idx.iter().map(|&i| self.points[i]).collect();
        if self.right_directions.len() == idx.len() {
            self.right_directions = idx.iter().map(|&i| self.right_directions[i].clone()).collect();
        }
        if self.left_directions.len() == idx.len() {
            self.left_directions = idx.iter().map(|&i| self.left_directions[i].clone()).collect();
        }
    }

    fn check_structure(&self) -> Result<()> {
        let k = self.points.len();
        if self.right_directions.len() != k || self.left_directions.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} interpolation points with {} right and {} left directions",
                self.right_directions.len(),
                self.left_directions.len()
            )));
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !self.points.iter().all(finite)
            || self.right_directions.iter().chain(&self.left_directions).any(|d| !d.iter().all(finite))
        {
            return Err(Error::NonFinite("interpolation data".into()));
        }
        let mut i = 0;
        while i < k {
            let s = self.points[i];
            if is_real(s) {
                i += 1;
                continue;
            }
            let ok = i + 1 < k && {
                let t = self.points[i + 1];
                let close = |a: &DVector<C64>, b: &DVector<C64>| (a.conjugate() - b).norm() <= CONJ_TOL * a.norm().max(1.0);
                (s.conj() - t).norm() <= CONJ_TOL * s.norm()
                    && close(&self.right_directions[i], &self.right_directions[i + 1])
                    && close(&self.left_directions[i], &self.left_directions[i + 1])
            };
            if !ok {
                return Err(Error::InvalidOption(format!(
                    "interpolation data is not closed under conjugation at point {s}"
                )));
            }
            i += 2;
        }
        Ok(())
    }
}

/// `(σI − A)⁻¹ b` for a real `A`.
fn shifted_solve(a: &Mat, s: C64, rhs: DVector<C64>) -> Result<DVector<C64>> {
    let n = a.nrows();
    let mut m: CMat = a.map(|x| C64::new(-x, 0.0));
    for i in 0..n {
        m[(i, i)] += s;
    }
    m.lu()
        .solve(&rhs)
        .filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
        .ok_or(Error::SingularShift { re: s.re, im: s.im, cond: f64::INFINITY })
}

/// Real bases from the tangential solves; a conjugate pair contributes its
/// real and imaginary parts.
fn tangential_bases(f: &StateSpace, g: &StateSpace, n: usize, cfg: &FwitiaConfig) -> Result<(Mat, Mat)> {
    let r = cfg.len();
    let bf = f.b().map(|x| C64::new(x, 0.0));
    let cgt = g.c().transpose().map(|x| C64::new(x, 0.0));
    let agt = g.a().transpose();
    let mut va = Mat::zeros(n, r);
    let mut wa = Mat::zeros(n, r);
    let mut i = 0;
    while i < r {
        let s = cfg.points[i];
        let x = shifted_solve(f.a(), s, &bf * &cfg.right_directions[i])?;
        let y = shifted_solve(&agt, s, &cgt * &cfg.left_directions[i])?;
        let (x, y) = (x.rows(0, n), y.rows(0, n));
        va.set_column(i, &x.map(|z| z.re));
        wa.set_column(i, &y.map(|z| z.re));
        if is_real(s) {
            i += 1;
        } else {
            va.set_column(i + 1, &x.map(|z| z.im));
            wa.set_column(i + 1, &y.map(|z| z.im));
            i += 2;
        }
    }
    Ok((va, wa))
}

/// Tangential interpolation iteration on the augmented systems: interpolate
/// at the mirrored reduced poles until they settle.
pub fn fwitia(prob: &WeightedProblem, cfg0: &FwitiaConfig, opts: &FwhmorOptions) -> Result<ReductionResult> {
    opts.validate()?;
    let h = prob.plant();
    let (n, r) = (h.n(), prob.order());
    cfg0.check_dims(r, h.m(), h.p())?;
    let pre = Precomputed::new(prob, opts.sylvester)?;
    let (f, g) = augmented_f_g(prob, &pre.pi, &pre.qo, &pre.p13, &pre.q14)?;
    let mut tracker = Tracker::new(prob, &pre, opts);

    let mut cfg = cfg0.clone();
    let mut current: Option<(StateSpace, Mat, Mat)> = None;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let started = Instant::now();
        let (va, wa) = tangential_bases(&f, &g, n, &cfg)?;
        let (vt, wt) = (orthonormalize(&va), orthonormalize(&wa));
        let (v, w) = match opts.fwitia_mode {
            FwitiaMode::Robust => biorthogonalize(&vt, &wt)?,
            FwitiaMode::Correction => {
                let m = vt.transpose() * &wt;
                let inv = m.try_inverse().filter(|x| x.iter().all(|v| v.is_finite())).ok_or(Error::SingularCorrection)?;
                let w = &wt * inv;
                (vt, w)
            }
        };
        let rom = h.project(&v, &w)?;
        tracker.record(&rom, None, started)?;
        cfg = FwitiaConfig::mirrored(&rom)?;
        current = Some((rom, v, w));
        if tracker.converged() {
            converged = true;
            break;
        }
    }
    let (rom, v, w) = current.expect("at least one iteration");
    finish(Method::Fwitia, prob, &pre, rom, v, w, tracker.history, converged)
}
