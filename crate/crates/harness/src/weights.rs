//! Weighting filters: analog Butterworth band-pass and closed-loop
//! sensitivity functions.

use std::f64::consts::PI;

use morh2w_core::matdense::Mat;
use morh2w_core::statespace::StateSpace;

use crate::error::{HarnessError, Result};

/// Unit-cutoff Butterworth low-pass of the given order as a cascade of
/// second-order sections (plus one first-order section for odd orders).
pub fn butterworth_lowpass(order: usize) -> Result<StateSpace> {
    if order == 0 {
        return Err(HarnessError::Config("Butterworth order must be at least 1".into()));
    }
    let mut sys: Option<StateSpace> = None;
    let mut push = |sec: StateSpace| -> Result<()> {
        sys = Some(match sys.take() {
            Some(s) => s.series(&sec)?,
            None => sec,
        });
        Ok(())
    };
    for k in 0..order / 2 {
        let zeta = (PI * (2 * k + 1) as f64 / (2 * order) as f64).sin();
        push(StateSpace::new(
            Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -2.0 * zeta]),
            Mat::from_column_slice(2, 1, &[0.0, 1.0]),
            Mat::from_row_slice(1, 2, &[1.0, 0.0]),
            Mat::zeros(1, 1),
        )?)?;
    }
    if order % 2 == 1 {
        push(StateSpace::new(
            Mat::from_element(1, 1, -1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 1.0),
            Mat::zeros(1, 1),
        )?)?;
    }
    Ok(sys.expect("order >= 1"))
}

/// Low-pass to band-pass substitution `s → (s² + ω₁ω₂) / (s(ω₂ − ω₁))`,
/// doubling the state dimension.
pub fn lowpass_to_bandpass(lp: &StateSpace, lo: f64, hi: f64) -> Result<StateSpace> {
    check_band(lo, hi)?;
    let (n, m, p) = (lp.n(), lp.m(), lp.p());
    let w0 = (lo * hi).sqrt();
    let bw = hi - lo;
    let mut a = Mat::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(&(lp.a() * bw));
    a.view_mut((0, n), (n, n)).fill_with_identity();
    a.view_mut((n, 0), (n, n)).fill_with_identity();
    a.view_mut((0, n), (n, n)).scale_mut(w0);
    a.view_mut((n, 0), (n, n)).scale_mut(-w0);
    let mut b = Mat::zeros(2 * n, m);
    b.view_mut((0, 0), (n, m)).copy_from(&(lp.b() * bw));
    let mut c = Mat::zeros(p, 2 * n);
    c.view_mut((0, 0), (p, n)).copy_from(lp.c());
    Ok(StateSpace::new(a, b, c, lp.d().clone())?)
}

/// Butterworth band-pass with passband `[lo, hi]` rad/s, of order `2·half_order`.
pub fn butterworth_bandpass(half_order: usize, lo: f64, hi: f64) -> Result<StateSpace> {
    check_band(lo, hi)?;
    lowpass_to_bandpass(&butterworth_lowpass(half_order)?, lo, hi)
}

pub fn check_band(lo: f64, hi: f64) -> Result<()> {
    if lo > 0.0 && lo < hi && hi.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::InvalidBand { lo, hi })
    }
}

/// `(I + L)⁻¹` for a square system `L`.
pub fn return_difference_inverse(l: &StateSpace) -> Result<StateSpace> {
    let k = l.m();
    if l.p() != k {
        return Err(morh2w_core::Error::DimensionMismatch(format!("loop transfer is {}x{k}, must be square", l.p())).into());
    }
    let e = (Mat::identity(k, k) + l.d())
        .try_inverse()
        .filter(|m| m.iter().all(|x| x.is_finite()))
        .ok_or_else(|| HarnessError::Config("I + D of the loop transfer is singular; the loop is ill-posed".into()))?;
    let a = l.a() - l.b() * &e * l.c();
    let b = l.b() * &e;
    let c = -(&e * l.c());
    Ok(StateSpace::new(a, b, c, e)?)
}

/// Closed-loop weights of plant `P` under controller `K`:
/// `W_i = (I + PK)⁻¹` and `W_o = (I + PK)⁻¹P`, built exactly.
pub fn sensitivity_weights(plant: &StateSpace, controller: &StateSpace) -> Result<(StateSpace, StateSpace)> {
    let loop_tf = controller.series(plant)?;
    let s = return_difference_inverse(&loop_tf)?;
    let wo = plant.series(&s)?;
    Ok((s, wo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use morh2w_core::matdense::C64;
    use morh2w_core::statespace::eval_tf;

    fn gain(sys: &StateSpace, w: f64) -> f64 {
        eval_tf(sys, C64::new(0.0, w)).unwrap()[(0, 0)].norm()
    }

    #[test]
    fn lowpass_half_power_at_unit_frequency() {
        for order in 1..=7 {
            let lp = butterworth_lowpass(order).unwrap();
            assert_eq!(lp.n(), order);
            assert!((gain(&lp, 0.0) - 1.0).abs() < 1e-12);
            assert!((gain(&lp, 1.0) - 0.5f64.sqrt()).abs() < 1e-12);
            // Maximally flat magnitude 1/sqrt(1 + ω^(2k)).
            let w: f64 = 2.7;
            assert!((gain(&lp, w) - 1.0 / (1.0 + w.powi(2 * order as i32)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn bandpass_gains() {
        let g = butterworth_bandpass(2, 5.0, 10.0).unwrap();
        assert_eq!(g.n(), 4);
        assert!(g.is_stable().unwrap());
        assert!((gain(&g, 50f64.sqrt()) - 1.0).abs() < 1e-9);
        assert!((gain(&g, 5.0) - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((gain(&g, 10.0) - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(gain(&g, 0.01) < 1e-3);
        assert!(gain(&g, 1e4) < 1e-3);
    }

    #[test]
    fn bad_bands_are_rejected() {
        for (lo, hi) in [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (-1.0, 2.0), (1.0, f64::INFINITY), (f64::NAN, 1.0)] {
            assert!(matches!(butterworth_bandpass(2, lo, hi), Err(HarnessError::InvalidBand { .. })));
        }
        assert!(matches!(butterworth_bandpass(0, 1.0, 2.0), Err(HarnessError::Config(_))));
    }

    #[test]
    fn sensitivity_matches_pointwise_formula() {
        let p = StateSpace::new(
            Mat::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -3.0]),
            Mat::from_column_slice(2, 1, &[0.0, 1.0]),
            Mat::from_row_slice(1, 2, &[1.0, 0.5]),
            Mat::zeros(1, 1),
        )
        .unwrap();
        let k = StateSpace::new(
            Mat::from_element(1, 1, -2.0),
            Mat::from_element(1, 1, 1.0),
            Mat::from_element(1, 1, 3.0),
            Mat::from_element(1, 1, 0.5),
        )
        .unwrap();
        let (wi, wo) = sensitivity_weights(&p, &k).unwrap();
        assert_eq!(wi.n(), 3);
        for w in [0.0, 0.3, 1.0, 7.0] {
            let s = C64::new(0.0, w);
            let pv = eval_tf(&p, s).unwrap()[(0, 0)];
            let kv = eval_tf(&k, s).unwrap()[(0, 0)];
            let sv = 1.0 / (1.0 + pv * kv);
            assert!((eval_tf(&wi, s).unwrap()[(0, 0)] - sv).norm() < 1e-12);
            assert!((eval_tf(&wo, s).unwrap()[(0, 0)] - sv * pv).norm() < 1e-12);
        }
    }
}
