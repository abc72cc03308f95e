//! H2 and H∞ norms and singular-value sweeps.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matdense::{eigenvalues, solve_lyapunov, CMat, C64};
use crate::statespace::{FrequencyResponse, StateSpace};

/// Feedthrough below this Frobenius norm is treated as zero for H2.
pub const FEEDTHROUGH_DUST: f64 = 1e-14;

/// H2 norm together with both gramian trace values it was derived from.
#[derive(Debug, Clone, Copy)]
pub struct H2Report {
    pub norm: f64,
    /// `tr(C P Cᵀ)` with the controllability gramian.
    pub trace_controllability: f64,
    /// `tr(Bᵀ Q B)` with the observability gramian.
    pub trace_observability: f64,
}

impl H2Report {
    pub fn trace_mismatch(&self) -> f64 {
        let scale = self.trace_controllability.abs().max(self.trace_observability.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.trace_controllability - self.trace_observability).abs() / scale
        }
    }
}

pub fn h2_report(sys: &StateSpace) -> Result<H2Report> {
    sys.require_stable("system")?;
    let dn = sys.d().norm();
    if dn > FEEDTHROUGH_DUST {
        return Err(Error::NonzeroFeedthrough(dn));
    }
    if sys.n() == 0 {
        return Ok(H2Report { norm: 0.0, trace_controllability: 0.0, trace_observability: 0.0 });
    }
    let (a, b, c) = (sys.a(), sys.b(), sys.c());
    let p = solve_lyapunov(a, &(b * b.transpose()))?.solution;
    let q = solve_lyapunov(&a.transpose(), &(c.transpose() * c))?.solution;
    let tc = (c * p * c.transpose()).trace();
    let to = (b.transpose() * q * b).trace();
    Ok(H2Report { norm: tc.max(0.0).sqrt(), trace_controllability: tc, trace_observability: to })
}

pub fn h2_norm(sys: &StateSpace) -> Result<f64> {
    Ok(h2_report(sys)?.norm)
}

pub(crate) fn sigma_max(g: &CMat) -> f64 {
    if g.nrows() == 0 || g.ncols() == 0 {
        return 0.0;
    }
    if g.nrows() == 1 && g.ncols() == 1 {
        return g[(0, 0)].norm();
    }
    g.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

fn singular_values_desc(g: &CMat) -> Vec<f64> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = g.clone().singular_values().iter().cloned().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Peak gain over `ω ∈ [0, ∞]` and the frequency attaining it.
///
/// A logarithmic grid over the spectral-radius band, augmented with the
/// pole frequencies, brackets the candidate peaks; each bracket is refined
/// by golden-section search. A peak attained only as ω → ∞ is reported at
/// `f64::INFINITY`.
pub fn hinf_norm(sys: &StateSpace, rel_tol: f64) -> Result<(f64, f64)> {
    sys.require_stable("system")?;
    let d_gain = sigma_max(&crate::matdense::to_complex(sys.d()));
    if sys.n() == 0 {
        return Ok((d_gain, 0.0));
    }
    let fr = FrequencyResponse::new(sys);
    let gain = |w: f64| -> Result<f64> { Ok(sigma_max(&fr.eval(C64::new(0.0, w))?)) };

    let poles = eigenvalues(sys.a())?;
    let rho = poles.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let rho = if rho > 0.0 { rho } else { 1.0 };
    let (lo, hi) = (1e-4 * rho, 1e4 * rho);
    let mut grid: Vec<f64> = (0..256).map(|k| lo * (hi / lo).powf(k as f64 / 255.0)).collect();
    grid.push(0.0);
    for l in &poles {
        if l.im.abs() > 0.0 {
            grid.push(l.im.abs());
        }
        grid.push(l.norm());
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * y.abs());

    let values: Vec<f64> = grid.iter().map(|&w| gain(w)).collect::<Result<_>>()?;
    let mut peaks: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == grid.len() || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    peaks.truncate(12);

    let (mut best, mut best_w) = (d_gain, f64::INFINITY);
    for &i in &peaks {
        if values[i] > best {
            best = values[i];
            best_w = grid[i];
        }
        let a = if i == 0 { grid[0] } else { grid[i - 1] };
        let b = if i + 1 == grid.len() { grid[i] } else { grid[i + 1] };
        let (v, w) = golden_max(&gain, a, b, rel_tol)?;
        if v > best {
            best = v;
            best_w = w;
        }
    }
    Ok((best, best_w))
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let resolution = 1e-4 * rel_tol.max(1e-16).sqrt();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..300 {
        if (b - a) <= resolution * 0.5 * (a + b) || b - a <= f64::MIN_POSITIVE {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (fc, c) } else { (fd, d) })
}

/// Singular values of `G(jω)` on a logarithmic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaData {
    pub frequencies: Vec<f64>,
    pub singular_values: Vec<Vec<f64>>,
}

pub fn sigma_sweep(sys: &StateSpace, w_lo: f64, w_hi: f64, n_points: usize) -> Result<SigmaData> {
    if !(w_lo > 0.0 && w_lo < w_hi && w_hi.is_finite()) || n_points < 2 {
        return Err(Error::InvalidOption(format!(
            "sigma sweep needs 0 < lo < hi and at least 2 points (got [{w_lo}, {w_hi}], {n_points})"
        )));
    }
    let fr = FrequencyResponse::new(sys);
    let mut frequencies = Vec::with_capacity(n_points);
    let mut singular_values = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let w = if k + 1 == n_points { w_hi } else { w_lo * (w_hi / w_lo).powf(k as f64 / (n_points - 1) as f64) };
        frequencies.push(w);
        singular_values.push(singular_values_desc(&fr.eval(C64::new(0.0, w))?));
    }
    Ok(SigmaData { frequencies, singular_values })
}

impl SigmaData {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidOption(format!("sigma data: {msg}")));
        if self.frequencies.len() != self.singular_values.len() {
            return bad("frequency and singular value counts differ");
        }
        if self.frequencies.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return bad("frequencies must be positive and finite");
        }
        if self.frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return bad("frequencies must be strictly ascending");
        }
        let width = self.singular_values.first().map_or(0, |s| s.len());
        for s in &self.singular_values {
            if s.len() != width {
                return bad("ragged singular value rows");
            }
            if s.windows(2).any(|w| w[0] < w[1]) || s.iter().any(|x| !(*x >= 0.0)) {
                return bad("singular values must be nonnegative and nonincreasing");
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidOption(format!("writing sigma CSV: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let width = self.singular_values.first().map_or(0, |s| s.len());
        let mut header = vec!["omega".to_string()];
        header.extend((1..=width).map(|i| format!("sigma_{i}")));
        w.write_record(&header).map_err(io)?;
        for (freq, s) in self.frequencies.iter().zip(&self.singular_values) {
            let mut row = vec![format_significant(*freq, 12)];
            row.extend(s.iter().map(|x| format_significant(*x, 12)));
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidOption(format!("writing sigma CSV: {e}")))?;
        Ok(())
    }

    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let bad = |msg: String| Error::InvalidOption(format!("sigma CSV: {msg}"));
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.get(0) != Some("omega") {
            return Err(bad("first column must be omega".into()));
        }
        for (i, h) in header.iter().enumerate().skip(1) {
            if h != format!("sigma_{i}") {
                return Err(bad(format!("unexpected column {h}")));
            }
        }
        let mut data = SigmaData { frequencies: vec![], singular_values: vec![] };
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| bad(format!("{f}: {e}"))))
                .collect::<Result<_>>()?;
            data.frequencies.push(nums[0]);
            data.singular_values.push(nums[1..].to_vec());
        }
        data.validate()?;
        Ok(data)
    }
}

/// Decimal rendering with `digits` significant digits, switching to
/// exponent notation for very small or large magnitudes.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
