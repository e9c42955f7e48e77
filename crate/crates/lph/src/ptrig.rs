//! Shelupsky p-trigonometric functions.
//!
//! `cos_p θ` and `sin_p θ` are the coordinates of the point on the unit
//! p-circle `|x|^p + |y|^p = 1` that cuts, together with the positive x-axis,
//! a sector of area `θ/2`. They are `2π_p`-periodic where `π_p` is the area of
//! the unit p-ball.
//!
//! Evaluation inverts the incomplete-beta form of the arc parameter,
//! `θ(s) = ∫₀ˢ (1 - u^p)^{1/p - 1} du`, on the octant `0 ≤ θ ≤ π_p/4`, and
//! extends by the quarter-turn and reflection symmetries. The literal sector
//! area route is kept in [`trig_pair_by_area`] as an independent check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::series::{horner, pow_next};

/// Whether an exponent lies in the open range or at a polygonal end point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Strict,
    Polygonal,
}

/// A Hölder-conjugate pair `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent {
    pub p: f64,
    pub q: f64,
    pub regime: Regime,
}

impl Exponent {
    /// Builds the pair from `p ∈ [1, ∞]` (use `f64::INFINITY` for ∞).
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("exponent p = {p} must lie in [1, inf]")));
        }
        let (q, regime) = if p == 1.0 {
            (f64::INFINITY, Regime::Polygonal)
        } else if p.is_infinite() {
            (1.0, Regime::Polygonal)
        } else {
            (p / (p - 1.0), Regime::Strict)
        };
        Ok(Self { p, q, regime })
    }

    /// The pair with the roles of `p` and `q` swapped.
    pub fn conjugate(&self) -> Self {
        Self { p: self.q, q: self.p, regime: self.regime }
    }

    pub fn is_strict(&self) -> bool {
        self.regime == Regime::Strict
    }

    pub fn require_strict(&self) -> Result<()> {
        match self.regime {
            Regime::Strict => Ok(()),
            Regime::Polygonal => Err(Error::Regime(format!("p = {} is polygonal; a strict exponent is required", self.p))),
        }
    }

    pub fn require_polygonal(&self) -> Result<()> {
        match self.regime {
            Regime::Polygonal => Ok(()),
            Regime::Strict => Err(Error::Regime(format!("p = {} is strict; p must be 1 or inf", self.p))),
        }
    }
}

/// Signed power `sgn(x)|x|^a`, with `0 ↦ 0` for `a > 0`.
#[inline]
pub fn spow(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if a == 1.0 {
        x
    } else {
        x.signum() * (a * x.abs().ln()).exp()
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7, nine terms).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Area of the unit p-ball, `4Γ(1+1/p)²/Γ(1+2/p)`.
pub fn pi_p(e: &Exponent) -> f64 {
    pi_of(e.p)
}

pub(crate) fn pi_of(p: f64) -> f64 {
    if p.is_infinite() {
        4.0
    } else {
        let g = gamma(1.0 + 1.0 / p);
        4.0 * g * g / gamma(1.0 + 2.0 / p)
    }
}

/// A point `(cos, sin)` on the unit p-circle at parameter `angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigPair {
    pub cos: f64,
    pub sin: f64,
    pub base: Exponent,
    pub angle: f64,
}

const INVERSE_TERMS: usize = 72;
const FRACTIONAL_TERMS: usize = 48;

/// Precomputed evaluator for one exponent.
///
/// Construction is cheap but not free; hot loops should build one evaluator
/// and reuse it.
#[derive(Debug, Clone)]
pub struct PTrig {
    p: f64,
    pi: f64,
    inv_coef: Vec<f64>,
}

impl PTrig {
    pub fn new(e: &Exponent) -> Result<Self> {
        e.require_strict()?;
        Ok(Self::with_p(e.p))
    }

    pub(crate) fn with_p(p: f64) -> Self {
        let a = 1.0 - 1.0 / p;
        let mut inv_coef = Vec::with_capacity(INVERSE_TERMS);
        let mut rising = 1.0;
        for n in 0..INVERSE_TERMS {
            if n > 0 {
                rising *= (a + n as f64 - 1.0) / n as f64;
            }
            inv_coef.push(rising / (p * n as f64 + 1.0));
        }
        Self { p, pi: pi_of(p), inv_coef }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `π_p`.
    pub fn pi(&self) -> f64 {
        self.pi
    }

    /// `π_p/2`, the spacing of the lattice of non-smooth points.
    pub fn half_pi(&self) -> f64 {
        0.5 * self.pi
    }

    /// Arc parameter of the point with sine `s ∈ [0, 2^{-1/p}]`.
    fn arc(&self, s: f64) -> f64 {
        let x = s.powf(self.p);
        let n = if x < 1e-300 {
            1
        } else {
            let need = (39.0 / -x.ln()).ceil() as usize + 2;
            need.clamp(1, INVERSE_TERMS)
        };
        s * horner(&self.inv_coef[..n], x)
    }

    /// Solves `arc(s) = phi` for `phi ∈ [0, π_p/4]`.
    ///
    /// `arc` is convex with `arc(s) ≥ s`, so Newton from the right converges
    /// monotonically.
    fn invert(&self, phi: f64) -> f64 {
        if phi <= 0.0 {
            return 0.0;
        }
        let s_max = (0.5f64).powf(1.0 / self.p);
        let mut s = phi.min(s_max);
        for _ in 0..60 {
            let f = self.arc(s) - phi;
            if f <= 0.0 {
                break;
            }
            let x = s.powf(self.p);
            let deriv = (-(1.0 - 1.0 / self.p) * (-x).ln_1p()).exp();
            let step = f / deriv;
            s -= step;
            if step <= 4.0 * f64::EPSILON * s {
                break;
            }
        }
        s
    }

    /// `(cos, sin)` at `k·π_p/2 + off` with `|off| ≤ π_p/4`.
    ///
    /// Accepting the lattice index and offset separately keeps full relative
    /// accuracy close to the lattice.
    pub fn pair_at(&self, k: i64, off: f64) -> (f64, f64) {
        let a = off.abs();
        let (c0, s0) = if a <= 0.25 * self.pi {
            let s = self.invert(a);
            let c = ((-s.powf(self.p)).ln_1p() / self.p).exp();
            (c, s)
        } else {
            let c = self.invert((0.5 * self.pi - a).max(0.0));
            let s = ((-c.powf(self.p)).ln_1p() / self.p).exp();
            (c, s)
        };
        let s0 = if off < 0.0 { -s0 } else { s0 };
        rotate(k, c0, s0)
    }

    /// Splits `theta` into its nearest lattice index and the offset from it.
    pub fn lattice_split(&self, theta: f64) -> (i64, f64) {
        let h = 0.5 * self.pi;
        let k = (theta / h).round();
        (k as i64, theta - k * h)
    }

    /// `(cos_p θ, sin_p θ)`.
    pub fn pair(&self, theta: f64) -> (f64, f64) {
        let (k, off) = self.lattice_split(theta);
        self.pair_at(k, off)
    }

    /// `(cos_q θ°, sin_q θ°)`, the signed `(p-1)`-powers of [`PTrig::pair`].
    pub fn dual(&self, theta: f64) -> (f64, f64) {
        let (c, s) = self.pair(theta);
        (spow(c, self.p - 1.0), spow(s, self.p - 1.0))
    }

    /// Taylor jets of `sin_p`, `cos_p` about a point `(c0, s0)` off the lattice.
    pub(crate) fn jets(&self, c0: f64, s0: f64) -> Jets {
        Jets::new(self.p, c0, s0)
    }
}

#[inline]
fn rotate(k: i64, c: f64, s: f64) -> (f64, f64) {
    match k.rem_euclid(4) {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// Coefficients `(a_k, b_k)` of the fractional expansions about zero.
///
/// Derived from the system `sin' = spow(cos, p-1)`, `cos' = -spow(sin, p-1)`
/// with `A = Σ a_k x^k`, `B = Σ b_k x^k` and `x = |θ|^p`:
/// `b_k = -[x^{k-1}]A^{p-1}/(kp)` and `a_k = [x^k]B^{p-1}/(kp+1)`.
pub(crate) fn fractional_coefficients(p: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let alpha = p - 1.0;
    let mut a = vec![1.0];
    let mut b = vec![1.0];
    let mut pa = vec![1.0];
    let mut pb = vec![1.0];
    for k in 1..n {
        if k >= 2 {
            let v = pow_next(&a, &pa, alpha, k - 1);
            pa.push(v);
        }
        let bk = -pa[k - 1] / (k as f64 * p);
        b.push(bk);
        let v = pow_next(&b, &pb, alpha, k);
        pb.push(v);
        a.push(pb[k] / (k as f64 * p + 1.0));
    }
    (a, b)
}

/// Incrementally built Taylor jets of `sin`, `cos` and their signed powers.
///
/// `ds[n] = [h^n] spow(cos, p-1)` and `dc[n] = [h^n] spow(sin, p-1)`, so that
/// `s[n+1] = ds[n]/(n+1)` and `c[n+1] = -dc[n]/(n+1)`.
#[derive(Debug, Clone)]
pub(crate) struct Jets {
    alpha: f64,
    pub s: Vec<f64>,
    pub c: Vec<f64>,
    pub ds: Vec<f64>,
    pub dc: Vec<f64>,
}

impl Jets {
    fn new(p: f64, c0: f64, s0: f64) -> Self {
        let alpha = p - 1.0;
        Self {
            alpha,
            s: vec![s0],
            c: vec![c0],
            ds: vec![spow(c0, alpha)],
            dc: vec![spow(s0, alpha)],
        }
    }

    /// Extends every jet by one order.
    pub fn grow(&mut self) {
        let n = self.s.len() - 1;
        self.s.push(self.ds[n] / (n + 1) as f64);
        self.c.push(-self.dc[n] / (n + 1) as f64);
        let m = n + 1;
        let v = pow_next(&self.c, &self.ds, self.alpha, m);
        self.ds.push(v);
        let v = pow_next(&self.s, &self.dc, self.alpha, m);
        self.dc.push(v);
    }

    pub fn order(&self) -> usize {
        self.s.len() - 1
    }
}

/// `(cos_p θ, sin_p θ)` for a strict exponent.
pub fn trig_pair(e: &Exponent, theta: f64) -> Result<TrigPair> {
    e.require_strict()?;
    finite(theta)?;
    let (cos, sin) = PTrig::new(e)?.pair(theta);
    Ok(TrigPair { cos, sin, base: *e, angle: theta })
}

/// `(cos_q θ°, sin_q θ°)`; the returned pair lives on the unit q-circle.
pub fn dual_pair(e: &Exponent, theta: f64) -> Result<TrigPair> {
    e.require_strict()?;
    finite(theta)?;
    let (cos, sin) = PTrig::new(e)?.dual(theta);
    Ok(TrigPair { cos, sin, base: e.conjugate(), angle: theta })
}

fn finite(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("angle {theta} is not finite")))
    }
}

/// A truncated series value with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: f64,
    pub order: usize,
    pub remainder_bound: f64,
}

/// The four small-angle expansions at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigSeries {
    pub sin: SeriesEval,
    pub cos: SeriesEval,
    pub dual_sin: SeriesEval,
    pub dual_cos: SeriesEval,
}

/// Largest `|θ|` accepted by [`trig_series`].
pub fn series_validity(e: &Exponent) -> f64 {
    0.25 * pi_p(e)
}

/// Printed coefficient of `|θ|^{kp}θ` in the sine expansion (k ≤ 2).
pub fn printed_sin_coefficient(p: f64, k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => -(p - 1.0) / (p * (p + 1.0)),
        2 => (p - 1.0) * (2.0 * p * p - 3.0 * p - 1.0) / (2.0 * p * p * (p + 1.0) * (2.0 * p + 1.0)),
        _ => f64::NAN,
    }
}

/// Printed coefficient of `|θ|^{kp}` in the cosine expansion (k ≤ 2).
pub fn printed_cos_coefficient(p: f64, k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => -1.0 / p,
        2 => (p - 1.0) * (p - 1.0) / (2.0 * p * p * (p + 1.0)),
        _ => f64::NAN,
    }
}

/// Truncated small-angle expansions keeping the terms `k = 0..=order`.
///
/// Only the coefficients printed for `k ≤ 2` enter the value. The remainder
/// bound is twice the absolute tail computed from the recursively generated
/// higher coefficients, plus a rounding allowance.
pub fn trig_series(e: &Exponent, theta: f64, order: usize) -> Result<TrigSeries> {
    e.require_strict()?;
    finite(theta)?;
    if order > 2 {
        return Err(Error::Domain(format!("series order {order} exceeds the printed order 2")));
    }
    let limit = series_validity(e);
    if theta.abs() >= limit {
        return Err(Error::Validity(format!("|theta| = {} must be below {limit}", theta.abs())));
    }
    let p = e.p;
    let (a, b) = fractional_coefficients(p, FRACTIONAL_TERMS);
    let t = theta.abs();
    let x = t.powf(p);
    let mut sin = 0.0;
    let mut cos = 0.0;
    let mut dsin = 0.0;
    let mut dcos = 0.0;
    // The dual sine carries |θ|^{p-1} in front, so its k-th term uses x^{k-1}.
    let mut xk = 1.0;
    let mut xprev = 0.0;
    for k in 0..=order {
        let kp = k as f64 * p;
        let sa = printed_sin_coefficient(p, k);
        let cb = printed_cos_coefficient(p, k);
        sin += sa * xk;
        cos += cb * xk;
        dcos += (kp + 1.0) * sa * xk;
        dsin -= kp * cb * xprev;
        xprev = xk;
        xk *= x;
    }
    let mut tail_s = 0.0;
    let mut tail_c = 0.0;
    let mut tail_ds = 0.0;
    let mut tail_dc = 0.0;
    for k in order + 1..FRACTIONAL_TERMS {
        let kp = k as f64 * p;
        tail_s += a[k].abs() * xk;
        tail_c += b[k].abs() * xk;
        tail_ds += kp * b[k].abs() * xprev;
        tail_dc += (kp + 1.0) * a[k].abs() * xk;
        xprev = xk;
        xk *= x;
    }
    let round = 8.0 * f64::EPSILON;
    let sgn_t = if theta < 0.0 { -1.0 } else { 1.0 };
    // |θ|^{p-2}θ written as sgn·|θ|^{p-1} to stay finite at θ = 0.
    let dual_scale = if t == 0.0 { 0.0 } else { t.powf(p - 1.0) };
    let make = |value: f64, tail: f64, scale: f64| SeriesEval {
        value,
        order,
        remainder_bound: 2.0 * tail * scale + round * value.abs(),
    };
    Ok(TrigSeries {
        sin: make(theta * sin, tail_s, t),
        cos: make(cos, tail_c, 1.0),
        dual_sin: make(sgn_t * dual_scale * dsin, tail_ds, dual_scale),
        dual_cos: make(dcos, tail_dc, 1.0),
    })
}

/// Lower bound `|θ₀|/(p+1)` for the radius of convergence of `sin_p` at θ₀.
pub fn radius_bound(e: &Exponent, theta0: f64) -> Result<f64> {
    e.require_strict()?;
    let quarter = 0.25 * pi_p(e);
    if !(theta0.is_finite() && theta0 != 0.0 && theta0.abs() < quarter) {
        return Err(Error::Domain(format!("theta0 = {theta0} must lie in (-{quarter}, {quarter}) without 0")));
    }
    Ok(theta0.abs() / (e.p + 1.0))
}

/// Taylor polynomials of `sin_p` and `cos_p` about an off-lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTaylor {
    pub theta0: f64,
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
}

impl LocalTaylor {
    /// `(cos_p θ, sin_p θ)` from the truncated polynomials.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        let h = theta - self.theta0;
        (horner(&self.cos, h), horner(&self.sin, h))
    }
}

/// Degree-`degree` Taylor polynomials about θ₀, generated from the ODE system.
pub fn local_taylor(e: &Exponent, theta0: f64, degree: usize) -> Result<LocalTaylor> {
    e.require_strict()?;
    finite(theta0)?;
    let tr = PTrig::new(e)?;
    let (_, off) = tr.lattice_split(theta0);
    if off.abs() < 1e-9 {
        return Err(Error::SingularPoint(format!("theta0 = {theta0} lies on the lattice of non-analytic points")));
    }
    let (c0, s0) = tr.pair(theta0);
    let mut j = tr.jets(c0, s0);
    while j.order() < degree {
        j.grow();
    }
    Ok(LocalTaylor { theta0, sin: j.s, cos: j.c })
}

/// Sector area `½∫₀^φ r(u)² du` swept up to Euclidean angle `φ ∈ [0, π/2]`,
/// with `r(u) = (|cos u|^p + |sin u|^p)^{-1/p}`.
pub fn sector_area(e: &Exponent, phi: f64) -> Result<f64> {
    e.require_strict()?;
    let p = e.p;
    let r2 = |u: f64| (u.cos().abs().powf(p) + u.sin().abs().powf(p)).powf(-2.0 / p);
    Ok(0.5 * quad::integrate(r2, 0.0, phi, QuadOptions::new(1e-15, 1e-14))?.value)
}

/// `(cos_p θ, sin_p θ)` by solving `2A(φ) = θ` on the Euclidean angle with
/// safeguarded Newton, then reading off the point of the p-circle.
pub fn trig_pair_by_area(e: &Exponent, theta: f64) -> Result<TrigPair> {
    e.require_strict()?;
    finite(theta)?;
    let p = e.p;
    let half = 0.5 * pi_p(e);
    let k = (theta / half).floor();
    let phi_t = (theta - k * half).clamp(0.0, half);
    let radius = |u: f64| (u.cos().abs().powf(p) + u.sin().abs().powf(p)).powf(-1.0 / p);
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    let mut u = std::f64::consts::FRAC_PI_2 * phi_t / half;
    for _ in 0..100 {
        let f = 2.0 * sector_area(e, u)? - phi_t;
        if f.abs() < 1e-14 {
            break;
        }
        if f > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let r = radius(u);
        let mut next = u - f / (r * r);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - u).abs() < 1e-16 {
            u = next;
            break;
        }
        u = next;
    }
    let r = radius(u);
    let (cos, sin) = rotate(k as i64, r * u.cos(), r * u.sin());
    Ok(TrigPair { cos, sin, base: *e, angle: theta })
}
