//! Homothety volumes and the geodesic dimension.
//!
//! For the box `A = (0,R]×[−Θ,Θ]×[−W,W]` of covectors the contracted set has
//! volume `m(Ω_t) = t⁴R⁴/4 · I(Wt)` with
//!
//! ```text
//! I(X) = ∫_{−Θ}^{Θ} ∫_{−X}^{X} J_R(θ, u)/u⁴ du dθ.
//! ```
//!
//! Since `J_R(−θ, −u) = J_R(θ, u)`, only `θ ≥ 0` is integrated and doubled.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jac::{small_angle_radius, Jacobian};
use crate::par;
use crate::ptrig::Exponent;
use crate::quad::{integrate_breaks, QuadOptions};

const INNER_REL: f64 = 1e-11;
const OUTER_REL: f64 = 1e-9;
const TAIL_REL: f64 = 1e-9;
const MAX_TAIL_PANELS: usize = 600;
/// Below `|u| < EXTENDED_CUTOFF·θ` the quotient `J_R/u⁴` is replaced by its limit.
pub const EXTENDED_CUTOFF: f64 = 1e-6;

/// The covector box `(0,R]×[−Θ,Θ]×[−W,W]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomothetyBox {
    pub r: f64,
    pub theta: f64,
    pub w: f64,
}

impl HomothetyBox {
    pub fn new(e: &Exponent, r: f64, theta: f64, w: f64) -> Result<Self> {
        e.require_strict()?;
        let pq = crate::ptrig::pi_p(&e.conjugate());
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("R = {r} must be positive")));
        }
        if !(theta > 0.0 && theta < 0.5 * pq) {
            return Err(Error::Domain(format!("Θ = {theta} must lie in (0, π_q/2)")));
        }
        if !(w > 0.0 && w <= 2.0 * pq) {
            return Err(Error::Domain(format!("W = {w} must lie in (0, 2π_q]")));
        }
        Ok(Self { r, theta, w })
    }

    /// `R = 1`, `Θ = π_q/4`, `W = 10^{-4}`.
    ///
    /// A narrow `W` pushes the sweep `Wt` deeper into the asymptotic regime:
    /// the leading correction to the volume exponent decays only like
    /// `(Wt)^{|2q−3|}`.
    pub fn standard(e: &Exponent) -> Result<Self> {
        let pq = crate::ptrig::pi_p(&e.conjugate());
        Self::new(e, 1.0, 0.25 * pq, 1e-4)
    }
}

/// Least-squares fit of `log m(Ω_t)` against `log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub log_correction: bool,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub t_range: (f64, f64),
    pub n_points: usize,
    /// `R²` of the affine fit of `m(Ω_t)/t⁵` against `−log t`.
    pub log_fit_r2: f64,
}

/// One point of a volume sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t: f64,
    pub volume: f64,
}

/// Splitting constants of the decomposition: `δ` and `ε_q = (q+2)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub delta: f64,
    pub eps: f64,
}

impl Split {
    /// `δ = min(r_s, Θ/2)` with `r_s` the small-angle radius of `jac`.
    pub fn for_box(e: &Exponent, b: &HomothetyBox) -> Result<Self> {
        Ok(Self { delta: small_angle_radius(e)?.min(0.5 * b.theta), eps: 0.5 * (e.q + 2.0) })
    }
}

/// Records the first error raised inside a quadrature closure.
struct Trap(RefCell<Option<Error>>);

impl Trap {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn keep(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn check<T>(&self, r: Result<T>) -> Result<T> {
        match self.0.borrow_mut().take() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

struct Integrand<'a> {
    jac: &'a Jacobian,
    q: f64,
    cutoff: f64,
}

impl Integrand<'_> {
    /// `J_R(θ, u)/u⁴` for `0 < θ < π_q/2`.
    fn g(&self, theta: f64, u: f64) -> f64 {
        if u.abs() < self.cutoff * theta {
            let (c, s) = self.jac.qtrig().pair(theta);
            return (self.q - 1.0).powi(2) / 12.0 * (c * s).abs().powf(2.0 * self.q - 4.0);
        }
        self.jac.jr(theta, u) / u.powi(4)
    }

    /// `∫ J_R(θ, u)/u⁴` over `lo ≤ |u| ≤ hi`.
    fn inner(&self, theta: f64, lo: f64, hi: f64, eps: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let mut marks = vec![lo, hi, theta / eps, theta];
        let half = self.jac.qtrig().half_pi();
        marks.push(half - theta);
        let mut m = 4.0 * theta;
        while m < hi {
            marks.push(m);
            m *= 4.0;
        }
        marks.retain(|&x| x >= lo && x <= hi);
        marks.sort_by(f64::total_cmp);
        marks.dedup();
        let opts = QuadOptions::new(0.0, INNER_REL);
        let pos = integrate_breaks(|u| self.g(theta, u), &marks, opts)?;
        let neg_marks: Vec<f64> = marks.iter().rev().map(|&x| -x).collect();
        let neg = integrate_breaks(|u| self.g(theta, u), &neg_marks, opts)?;
        Ok(pos.value + neg.value)
    }
}

/// `∫_0^b f` for an integrand with a power-law endpoint singularity at `0`.
///
/// Panels halve toward `0`; the remainder is estimated from the ratio of the
/// last two panels as a geometric tail and the loop stops once it is below
/// `TAIL_REL` of the running total.
fn integrate_to_zero<F: Fn(f64) -> f64>(f: F, b: f64) -> Result<f64> {
    let opts = QuadOptions::new(0.0, OUTER_REL);
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    let mut hi = b;
    for _ in 0..MAX_TAIL_PANELS {
        let lo = 0.5 * hi;
        let v = integrate_breaks(&f, &[lo, hi], opts)?.value;
        total += v;
        if let Some(pv) = prev {
            let rho = v / pv;
            if rho < 1.0 {
                let tail = v * rho / (1.0 - rho);
                if tail.abs() <= TAIL_REL * total.abs() {
                    return Ok(total + tail);
                }
            }
        }
        if lo < f64::MIN_POSITIVE {
            break;
        }
        prev = Some(v);
        hi = lo;
    }
    Err(Error::Integration {
        message: "endpoint tail at θ = 0 did not converge".into(),
        achieved: prev.map_or(f64::INFINITY, |p| p / total),
    })
}

fn outer<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, marks: &[f64]) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut pts: Vec<f64> = marks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let head = if a == 0.0 { integrate_to_zero(f, pts[1])? } else { 0.0 };
    let start = if a == 0.0 { 1 } else { 0 };
    let rest = if pts.len() - start > 1 {
        integrate_breaks(f, &pts[start..], QuadOptions::new(0.0, OUTER_REL))?.value
    } else {
        0.0
    };
    Ok(head + rest)
}

/// `I(X)` over the full box, both signs of `θ`.
fn full_integral(jac: &Jacobian, q: f64, b: &HomothetyBox, x: f64, cutoff: f64) -> Result<f64> {
    let ig = Integrand { jac, q, cutoff };
    let eps = 0.5 * (q + 2.0);
    let trap = Trap::new();
    let f = |th: f64| trap.keep(ig.inner(th, 0.0, x, eps));
    let head = x.min(b.theta);
    let r = outer(&f, 0.0, b.theta, &[head, eps * x]);
    Ok(2.0 * trap.check(r)?)
}

/// `m(Ω_t)` for the box, to relative accuracy about `1e-7`.
pub fn homothety_volume(e: &Exponent, b: &HomothetyBox, t: f64) -> Result<f64> {
    homothety_volume_with_cutoff(e, b, t, EXTENDED_CUTOFF)
}

/// [`homothety_volume`] with the relative cutoff `|u| < cutoff·θ` below which
/// `J_R/u⁴` is replaced by its limit `(q−1)²/12·|cos_qθ sin_qθ|^{2q−4}`.
pub fn homothety_volume_with_cutoff(e: &Exponent, b: &HomothetyBox, t: f64, cutoff: f64) -> Result<f64> {
    e.require_strict()?;
    if !(0.0..1e-2).contains(&cutoff) {
        return Err(Error::Domain(format!("cutoff {cutoff} must lie in [0, 1e-2)")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("t = {t} must lie in (0, 1]")));
    }
    let jac = Jacobian::new(e)?;
    volume_with(&jac, e.q, b, t, cutoff)
}

fn volume_with(jac: &Jacobian, q: f64, b: &HomothetyBox, t: f64, cutoff: f64) -> Result<f64> {
    // J_R/u⁴ itself underflows once u⁴ leaves the double range.
    if b.w * t < 1e-60 {
        return Err(Error::Range(format!("Wt = {} is below the representable scale", b.w * t)));
    }
    let i = full_integral(jac, q, b, b.w * t, cutoff)?;
    let v = t.powi(4) * b.r.powi(4) / 4.0 * i;
    if !(v > f64::MIN_POSITIVE) {
        return Err(Error::Range(format!("volume {v} at t = {t} underflows")));
    }
    Ok(v)
}

/// Volumes at `n` log-spaced `t` in `[t_min, t_max]`.
pub fn volume_sweep(e: &Exponent, b: &HomothetyBox, t_min: f64, t_max: f64, n: usize) -> Result<Vec<SweepPoint>> {
    e.require_strict()?;
    if !(t_min > 0.0 && t_min < t_max && t_max <= 1.0) || n < 2 {
        return Err(Error::Domain(format!("need 0 < t_min < t_max ≤ 1 and n ≥ 2, got {t_min}, {t_max}, {n}")));
    }
    let jac = Jacobian::new(e)?;
    let ts = log_grid(t_min, t_max, n);
    par::map_range(n, |i| volume_with(&jac, e.q, b, ts[i], EXTENDED_CUTOFF).map(|volume| SweepPoint { t: ts[i], volume }))
        .into_iter()
        .collect()
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| if i + 1 == n { b } else { (la + (lb - la) * i as f64 / (n - 1) as f64).exp() })
        .collect()
}

/// `(intercept, slope, rms residual, R²)` of the least-squares line.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss / syy } else { 1.0 };
    (icpt, slope, (ss / n).sqrt(), r2)
}

/// Fits the scaling exponent of `m(Ω_t)` on `n` log-spaced `t`.
///
/// The log correction is declared when `m/t⁵` is affine in `−log t` with a
/// relative variation above 5% across the sweep, and that affine fit leaves
/// less than a tenth of the residual of a pure power fit `m/t⁵ = C·t^γ`.
pub fn dimension_fit(e: &Exponent, b: &HomothetyBox, t_min: f64, t_max: f64, n: usize) -> Result<DimensionFit> {
    if !(t_min > 0.0 && t_min < t_max && t_max <= 0.2) || n < 8 {
        return Err(Error::Domain(format!("need 0 < t_min < t_max ≤ 0.2 and n ≥ 8, got {t_min}, {t_max}, {n}")));
    }
    let sweep = volume_sweep(e, b, t_min, t_max, n)?;
    Ok(fit_sweep(&sweep))
}

/// The fit of [`dimension_fit`] applied to an existing sweep.
pub fn fit_sweep(sweep: &[SweepPoint]) -> DimensionFit {
    let lt: Vec<f64> = sweep.iter().map(|s| s.t.ln()).collect();
    let lv: Vec<f64> = sweep.iter().map(|s| s.volume.ln()).collect();
    let (_, slope, residual, _) = line_fit(&lt, &lv);

    let neg: Vec<f64> = lt.iter().map(|l| -l).collect();
    let m5: Vec<f64> = sweep.iter().map(|s| s.volume / s.t.powi(5)).collect();
    let (a, bslope, lin_rms, r2) = line_fit(&neg, &m5);
    let mean = m5.iter().sum::<f64>() / m5.len() as f64;
    let lin_rel = lin_rms / mean;
    let lm5: Vec<f64> = m5.iter().map(|v| v.ln()).collect();
    let (_, _, pow_rms, _) = line_fit(&lt, &lm5);
    let span = neg.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - neg.iter().cloned().fold(f64::INFINITY, f64::min);
    let variation = (bslope * span / (a + bslope * neg.iter().sum::<f64>() / neg.len() as f64)).abs();
    let log_correction = bslope > 0.0 && variation > 0.05 && lin_rel < 0.1 * pow_rms;
    DimensionFit {
        slope,
        log_correction,
        residual,
        t_range: (sweep.first().map_or(0.0, |s| s.t), sweep.last().map_or(0.0, |s| s.t)),
        n_points: sweep.len(),
        log_fit_r2: r2,
    }
}

/// The four sub-integrals of `I(Wt)` over `θ ≥ 0`, in the order
/// `θ ∈ [δ, Θ]`, `ε_q|u| ≤ θ ≤ δ`, `|u| ≤ θ ≤ ε_q|u|` and `θ ≤ |u|`.
///
/// Each is the `θ ≥ 0` half of a mirrored pair, so `I(Wt)` is twice their sum.
pub fn domain_decomposition_volumes(e: &Exponent, b: &HomothetyBox, t: f64) -> Result<[f64; 4]> {
    e.require_strict()?;
    let jac = Jacobian::new(e)?;
    let split = Split::for_box(e, b)?;
    decomposition_with(&jac, e.q, b, &split, b.w * t)
}

fn decomposition_with(jac: &Jacobian, q: f64, b: &HomothetyBox, split: &Split, x: f64) -> Result<[f64; 4]> {
    let Split { delta, eps } = *split;
    if eps * x > delta {
        return Err(Error::Domain(format!("ε_q·Wt = {} exceeds δ = {delta}", eps * x)));
    }
    let ig = Integrand { jac, q, cutoff: EXTENDED_CUTOFF };
    let trap = Trap::new();
    let a0 = {
        let f = |th: f64| trap.keep(ig.inner(th, 0.0, x, eps));
        trap.check(outer(&f, delta, b.theta, &[]))?
    };
    let a1 = {
        let f = |th: f64| trap.keep(ig.inner(th, 0.0, (th / eps).min(x), eps));
        trap.check(outer(&f, 0.0, delta, &[eps * x]))?
    };
    let a2 = {
        let f = |th: f64| trap.keep(ig.inner(th, th / eps, th.min(x), eps));
        trap.check(outer(&f, 0.0, eps * x, &[x]))?
    };
    let a3 = {
        let f = |th: f64| trap.keep(ig.inner(th, th, x, eps));
        trap.check(outer(&f, 0.0, x, &[]))?
    };
    Ok([a0, a1, a2, a3])
}

/// Local exponents `d log A_i / d log t` of the four sub-integrals.
pub fn decomposition_exponents(e: &Exponent, b: &HomothetyBox, t_min: f64, t_max: f64, n: usize) -> Result<[f64; 4]> {
    e.require_strict()?;
    let jac = Jacobian::new(e)?;
    let split = Split::for_box(e, b)?;
    let ts = log_grid(t_min, t_max, n);
    let rows: Vec<[f64; 4]> = par::map_range(n, |i| decomposition_with(&jac, e.q, b, &split, b.w * ts[i]))
        .into_iter()
        .collect::<Result<_>>()?;
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    Ok(std::array::from_fn(|k| {
        let ly: Vec<f64> = rows.iter().map(|r| r[k].ln()).collect();
        line_fit(&lt, &ly).1
    }))
}
