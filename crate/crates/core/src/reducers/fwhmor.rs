use std::time::Instant;

use super::{
    biorth_gs, biorthogonality_error, check_convergence, is_stable_poles, pole_change, trace_quantities,
    ConvergenceHistory, Diagnostics, FwhmorOptions, IterationRecord, Method, Precomputed, ReductionResult, RomSolves,
};
use crate::error::{Error, Result};
use crate::matdense::{eigenvalues, symmetrize, Mat};
use crate::optimality::interpolation_residuals_from;
use crate::statespace::{StateSpace, WeightedProblem};

pub(crate) const MAX_UNSTABLE_STREAK: usize = 5;

/// Per-iterate bookkeeping shared with the interpolation iteration.
pub(crate) struct Tracker<'a> {
    prob: &'a WeightedProblem,
    pre: &'a Precomputed,
    opts: &'a FwhmorOptions,
    pub history: ConvergenceHistory,
    unstable_streak: usize,
}

impl<'a> Tracker<'a> {
    pub fn new(prob: &'a WeightedProblem, pre: &'a Precomputed, opts: &'a FwhmorOptions) -> Self {
        Tracker { prob, pre, opts, history: ConvergenceHistory::default(), unstable_streak: 0 }
    }

    /// Record the new iterate; returns whether it is stable.
    pub fn record(&mut self, rom: &StateSpace, solves: Option<&RomSolves>, started: Instant) -> Result<bool> {
        let poles = eigenvalues(rom.a())?;
        let stable = is_stable_poles(&poles);
        let iteration = self.history.len() + 1;
        if stable {
            self.unstable_streak = 0;
        } else {
            self.unstable_streak += 1;
            if self.unstable_streak >= MAX_UNSTABLE_STREAK {
                return Err(Error::UnstableIterate { iteration, consecutive: self.unstable_streak });
            }
        }
        let (mut e1, mut e2, mut xbar) = (f64::NAN, f64::NAN, f64::NAN);
        if stable && self.opts.needs_traces() {
            let owned;
            let s = match solves {
                Some(s) => s,
                None => {
                    owned = self.pre.rom_solves(self.prob, rom)?;
                    &owned
                }
            };
            let (pt, qt) = self.pre.rom_gramians(self.prob, rom, s)?;
            (e1, e2, xbar) = trace_quantities(self.prob, rom, s, &pt, &qt);
        }
        let change = match self.history.records.last() {
            Some(prev) => pole_change(&prev.poles, &poles),
            None => f64::INFINITY,
        };
        let seconds = if self.opts.record_history { started.elapsed().as_secs_f64() } else { 0.0 };
        self.history.push(IterationRecord { poles, pole_change: change, e1, e2, xbar_norm: xbar, seconds });
        Ok(stable)
    }

    pub fn converged(&self) -> bool {
        check_convergence(&self.history, self.opts)
    }
}

/// Assemble the result for the final iterate, with `P̂`, `Q̂` when it is stable.
pub(crate) fn finish(
    method: Method,
    prob: &WeightedProblem,
    pre: &Precomputed,
    rom: StateSpace,
    v: Mat,
    w: Mat,
    history: ConvergenceHistory,
    converged: bool,
) -> Result<ReductionResult> {
    let stable = rom.is_stable()?;
    let mut diagnostics = Diagnostics { rom_stable: stable, biorth_error: biorthogonality_error(&v, &w), ..Default::default() };
    let (mut p_hat, mut q_hat) = (None, None);
    if stable {
        let s = pre.rom_solves(prob, &rom)?;
        let (pt, qt) = pre.rom_gramians(prob, &rom, &s)?;
        p_hat = Some(symmetrize(&(&v * pt * v.transpose())));
        q_hat = Some(symmetrize(&(&w * qt * w.transpose())));
        let blocks = [&pre.pi, &pre.qo, &pre.p13, &pre.q14, &s.p23, &s.q24];
        match interpolation_residuals_from(prob, &rom, blocks) {
            Ok(r) => diagnostics.interpolation = Some(r),
            Err(e) => diagnostics.warnings.push(format!("interpolation residuals unavailable: {e}")),
        }
    } else {
        diagnostics.warnings.push("final reduced model is unstable".into());
    }
    if !converged {
        diagnostics.warnings.push(format!("no convergence after {} iterations", history.len()));
    }
    let iterations = history.len();
    Ok(ReductionResult { method, rom, v, w, history, converged, iterations, p_hat, q_hat, diagnostics })
}

/// Fixed-point iteration on the weighted optimality conditions: project the
/// plant onto the spans of `P12` and `−Q12` of the current reduced model.
pub fn fwhmor(prob: &WeightedProblem, init: &StateSpace, opts: &FwhmorOptions) -> Result<ReductionResult> {
    opts.validate()?;
    prob.check_rom(init)?;
    init.require_stable("initial reduced model")?;
    let h = prob.plant();
    let pre = Precomputed::new(prob, opts.sylvester)?;
    let mut tracker = Tracker::new(prob, &pre, opts);

    let mut solves = pre.rom_solves(prob, init)?;
    let mut current: Option<(StateSpace, Mat, Mat)> = None;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let started = Instant::now();
        let (v, w) = biorth_gs(&solves.p12, &solves.q12)?;
        let rom = h.project(&v, &w)?;
        solves = pre.rom_solves(prob, &rom)?;
        tracker.record(&rom, Some(&solves), started)?;
        current = Some((rom, v, w));
        if tracker.converged() {
            converged = true;
            break;
        }
    }
    let (rom, v, w) = current.expect("at least one iteration");
    finish(Method::Fwhmor, prob, &pre, rom, v, w, tracker.history, converged)
}
