//! Jacobian of the exponential map.
//!
//! Everything is expressed through the reduced Jacobian
//!
//! ```text
//! J_R(θ, w) = 2 − ⟨C(θ+w), D(θ)⟩ − ⟨D(θ+w), C(θ)⟩ − w·D(θ)×D(θ+w)
//! ```
//!
//! with `C = (cos_q, sin_q)`, `D` its dual pair and `a×b = a_x b_y − a_y b_x`.
//! The full Jacobian is `J^t(r, θ, w) = r³t/w⁴·J_R(θ, wt)`.
//!
//! `J_R` vanishes to fourth order in `w` and to order `2q` at the lattice
//! points, so the closed form above loses all accuracy exactly where the
//! exponent functional `N = 1 + w∂_wJ_R/J_R` is most interesting. [`Jacobian`]
//! therefore switches between four evaluations that agree on their overlaps:
//!
//! * a Taylor series in `w` built from the trigonometric jets at `θ`;
//! * near a lattice point and for `|w| ≪ |θ|`, the same series with every
//!   coefficient expanded in fractional powers of `|θ|`;
//! * when both `θ` and `θ+w` are near one lattice point, a double series in
//!   `|θ|^q` and `|θ+w|^q`;
//! * the closed form elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heis::{Covector, LATTICE_BAND};
use crate::par;
use crate::ptrig::{fractional_coefficients, spow, Exponent, PTrig};

const JET_MAX_ORDER: usize = 96;
const LATTICE_ORDERS: usize = 72;
const FRACTIONAL_ORDERS: usize = 48;

/// One evaluation of the reduced Jacobian and the exponent functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacSample {
    pub theta: f64,
    pub w: f64,
    pub jr: f64,
    pub djr_dw: f64,
    /// `+∞` when the derivative diverges.
    pub n_exp: f64,
}

/// The ray function `P(s)` governing `J_R` along rays `w = sθ` near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayFunction {
    pub q: f64,
    pub s: f64,
    pub p_val: f64,
    pub dp_val: f64,
    /// `1 + s·P'(s)/P(s)`, the limit of `N` along the ray.
    pub ratio: f64,
}

/// Precomputed evaluator of `J_R` and `∂_wJ_R` for one exponent.
#[derive(Debug, Clone)]
pub struct Jacobian {
    q: f64,
    tq: PTrig,
    a: Vec<f64>,
    b: Vec<f64>,
    /// `lattice[k][l]`: coefficient of `(w/θ)^k·|θ|^{lq}` near a lattice point.
    lattice: Vec<Vec<f64>>,
    radius: f64,
}

impl Jacobian {
    /// Builds the evaluator for the exponent `p`; the geometry lives in `q`.
    pub fn new(e: &Exponent) -> Result<Self> {
        e.require_strict()?;
        let q = e.q;
        let tq = PTrig::new(&e.conjugate())?;
        let (a, b) = fractional_coefficients(q, FRACTIONAL_ORDERS);
        let lattice = lattice_table(q, &a, &b);
        let radius = fractional_radius(q, &a, &b).min(0.45 * tq.half_pi());
        Ok(Self { q, tq, a, b, lattice, radius })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `π_q`.
    pub fn pi_q(&self) -> f64 {
        self.tq.pi()
    }

    pub fn qtrig(&self) -> &PTrig {
        &self.tq
    }

    /// Distance to the lattice below which the fractional expansions are used.
    pub fn series_radius(&self) -> f64 {
        self.radius
    }

    /// `J_R(θ, w)`.
    pub fn jr(&self, theta: f64, w: f64) -> f64 {
        self.eval(theta, w).0
    }

    /// `(J_R, ∂_wJ_R)`; the derivative may be infinite on the lattice.
    pub fn eval(&self, theta: f64, w: f64) -> (f64, f64) {
        if w == 0.0 {
            return (0.0, 0.0);
        }
        let (_, phi0) = self.tq.lattice_split(theta);
        let g = 2.0 * (self.q + 1.0);
        let near0 = phi0.abs() < self.radius;
        if w.abs() <= phi0.abs() / g {
            return if near0 { self.near_lattice_taylor(phi0, w) } else { self.regular_taylor(phi0, w) };
        }
        let phi1 = phi0 + w;
        if phi0.abs() <= 1.25 * self.radius && phi1.abs() <= 1.25 * self.radius && phi1 != 0.0 {
            return self.double_series(phi0, w);
        }
        self.closed_form(phi0, w)
    }

    /// `N(θ, w) = 1 + w∂_wJ_R/J_R` without domain checks; `+∞` on divergence.
    pub fn n_raw(&self, theta: f64, w: f64) -> f64 {
        let (j, dj) = self.eval(theta, w);
        n_from(j, dj, w)
    }

    pub fn sample(&self, theta: f64, w: f64) -> JacSample {
        let (jr, djr_dw) = self.eval(theta, w);
        JacSample { theta, w, jr, djr_dw, n_exp: n_from(jr, djr_dw, w) }
    }

    /// Closed form, with the quarter-turn already removed from `θ`.
    fn closed_form(&self, phi0: f64, w: f64) -> (f64, f64) {
        let q1 = self.q - 1.0;
        let (c0, s0) = self.tq.pair_at(0, phi0);
        // Splitting w on its own keeps θ + w on the same offset as θ when w is
        // a lattice multiple; for q < 2 the derivative in w is unbounded there.
        let (kw, rw) = self.tq.lattice_split(w);
        let (k1, off1) = self.tq.lattice_split(phi0 + rw);
        let (c1, s1) = self.tq.pair_at(k1 + kw, off1);
        let (dx0, dy0) = (spow(c0, q1), spow(s0, q1));
        let (dx1, dy1) = (spow(c1, q1), spow(s1, q1));
        let j = 2.0 - (c1 * dx0 + s1 * dy0) - (dx1 * c0 + dy1 * s0) - w * (dx0 * dy1 - dy0 * dx1);
        let bracket = s1 * c0 - c1 * s0 - w * (s1 * dy0 + c1 * dx0);
        let prod = (c1 * s1).abs();
        let dj = if bracket == 0.0 {
            0.0
        } else {
            q1 * prod.powf(self.q - 2.0) * bracket
        };
        (j, dj)
    }

    /// Taylor series in `w` about an angle away from the lattice.
    fn regular_taylor(&self, phi0: f64, w: f64) -> (f64, f64) {
        let (c0, s0) = self.tq.pair_at(0, phi0);
        let mut jet = self.tq.jets(c0, s0);
        for _ in 0..4 {
            jet.grow();
        }
        let (dx0, dy0) = (jet.ds[0], jet.dc[0]);
        let mut j = 0.0;
        let mut dj = 0.0;
        let mut wn = w * w * w;
        let mut quiet = 0;
        for n in 4..JET_MAX_ORDER {
            let jn = -(jet.c[n] * dx0 + jet.s[n] * dy0)
                - (jet.ds[n] * c0 + jet.dc[n] * s0)
                - (dx0 * jet.dc[n - 1] - dy0 * jet.ds[n - 1]);
            dj += n as f64 * jn * wn;
            wn *= w;
            let term = jn * wn;
            j += term;
            if converged(term, j, &mut quiet) {
                break;
            }
            jet.grow();
        }
        (j, dj)
    }

    /// `Σ_{k≥4, l≥2} C_{kl}(w/φ)^k|φ|^{lq}` for `|w| ≤ |φ|/(2q+2)`.
    fn near_lattice_taylor(&self, phi0: f64, w: f64) -> (f64, f64) {
        let x0 = phi0.abs().powf(self.q);
        let s = w / phi0;
        let mut j = 0.0;
        let mut ks = 0.0;
        let mut sk = s * s * s;
        let mut quiet = 0;
        for (k, row) in self.lattice.iter().enumerate().skip(4) {
            sk *= s;
            let g = x0 * x0 * row.iter().skip(2).rev().fold(0.0, |acc, &c| acc * x0 + c);
            let term = g * sk;
            j += term;
            ks += k as f64 * term;
            if converged(term, j, &mut quiet) {
                break;
            }
        }
        (j, ks / w)
    }

    /// Double series in `X0 = |φ0|^q`, `X1 = |φ1|^q` about a common lattice point.
    fn double_series(&self, phi0: f64, w: f64) -> (f64, f64) {
        let q = self.q;
        let phi1 = phi0 + w;
        let m = FRACTIONAL_ORDERS;
        let x0 = phi0.abs().powf(q);
        let x1 = phi1.abs().powf(q);
        let mut p0 = vec![1.0; m];
        let mut p1 = vec![1.0; m];
        for i in 1..m {
            p0[i] = p0[i - 1] * x0;
            p1[i] = p1[i - 1] * x1;
        }
        // spow(φ, iq − 1) = X^{i−1}·spow(φ, q − 1) and |φ1|^{iq−2} = X1^{i−1}|φ1|^{q−2}.
        let sp0 = spow(phi0, q - 1.0);
        let sp1 = spow(phi1, q - 1.0);
        let ab1 = phi1.abs().powf(q - 2.0);
        let (a, b) = (&self.a, &self.b);
        let q2 = q * q;
        let mut j = 0.0;
        let mut dj = 0.0;
        let mut quiet = 0;
        for deg in 2..m {
            let mut diag = 0.0;
            for i in 0..=deg {
                let jj = deg - i;
                let (fi, fj) = (i as f64 * q, jj as f64 * q);
                let k1 = b[i] * a[jj] * (fj + 1.0) * (fi - 1.0) + a[i] * b[jj] * (fi + 1.0) * (fj - 1.0);
                let mut t = k1 * p1[i] * p0[jj];
                let mut d = 0.0;
                if i > 0 {
                    d += k1 * fi * p1[i - 1] * sp1 * p0[jj];
                }
                if i > 0 && jj > 0 {
                    let ij = (i * jj) as f64 * q2;
                    let pj = p0[jj - 1] * sp0;
                    let pi = p1[i - 1] * sp1;
                    t -= ij * (a[i] * b[jj] * p1[i] * pj * phi1 + a[jj] * b[i] * p0[jj] * pi * phi0);
                    d -= ij * (a[i] * b[jj] * (fi + 1.0) * p1[i] * pj + a[jj] * b[i] * (fi - 1.0) * p0[jj] * p1[i - 1] * ab1 * phi0);
                }
                diag += t;
                dj += d;
            }
            j += diag;
            if converged(diag, j, &mut quiet) {
                break;
            }
        }
        (j, dj)
    }
}

fn converged(term: f64, sum: f64, quiet: &mut usize) -> bool {
    if term.abs() <= 1e-18 * sum.abs() {
        *quiet += 1;
    } else {
        *quiet = 0;
    }
    *quiet >= 3
}

fn n_from(j: f64, dj: f64, w: f64) -> f64 {
    if dj.is_infinite() {
        return if dj * w > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    1.0 + w * dj / j
}

/// Generalised binomials `C(α, k)` for `k < n`.
fn binomials(alpha: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0;
    for k in 0..n {
        out.push(c);
        c *= (alpha - k as f64) / (k as f64 + 1.0);
    }
    out
}

/// Taylor coefficients `∂_w^kJ_R(θ, 0)/k!` expanded in `|θ|^{lq−k}`.
///
/// With `sin_q θ = Σ a_n θ^{nq+1}` and `cos_q θ = Σ b_m θ^{mq}` for `θ > 0`,
/// the `k`-th derivative `(k−1)(cos^{(k)} sin' − sin^{(k)} cos') + cos^{(k+1)} sin
/// − sin^{(k+1)} cos` collects into these coefficients with no cancellation
/// left for the caller.
fn lattice_table(q: f64, a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let kmax = LATTICE_ORDERS;
    let cos_b: Vec<Vec<f64>> = (0..n).map(|m| binomials(m as f64 * q, kmax + 2)).collect();
    let sin_b: Vec<Vec<f64>> = (0..n).map(|m| binomials(m as f64 * q + 1.0, kmax + 2)).collect();
    let mut table = vec![vec![0.0; n]; kmax];
    for (k, row) in table.iter_mut().enumerate().skip(4) {
        let kf = k as f64;
        for (l, slot) in row.iter_mut().enumerate().skip(2) {
            let mut acc = 0.0;
            for nn in 0..=l {
                let m = l - nn;
                let (mq, nq1) = (m as f64 * q, nn as f64 * q + 1.0);
                let bracket = (kf - 1.0) * cos_b[m][k] * nq1 - (kf - 1.0) * sin_b[nn][k] * mq
                    + (kf + 1.0) * cos_b[m][k + 1]
                    - (kf + 1.0) * sin_b[nn][k + 1];
                acc += a[nn] * b[m] * bracket;
            }
            *slot = acc;
        }
    }
    table
}

/// Radius in `|θ|` where the fractional series converge geometrically fast.
///
/// The coefficient growth estimates the radius `R` in `X = |θ|^q`; the series
/// are used for `X ≤ R/8`.
fn fractional_radius(q: f64, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut r = f64::INFINITY;
    for k in n / 2..n {
        for c in [a[k], b[k]] {
            if c != 0.0 {
                r = r.min(c.abs().powf(-1.0 / k as f64));
            }
        }
    }
    (r / 8.0).powf(1.0 / q)
}

fn lattice_distance(x: f64, half: f64) -> f64 {
    (x - (x / half).round() * half).abs()
}

/// `J_R(θ, w)`.
pub fn reduced_jacobian(e: &Exponent, theta: f64, w: f64) -> Result<f64> {
    finite(&[theta, w])?;
    Ok(Jacobian::new(e)?.jr(theta, w))
}

/// `∂_wJ_R(θ, w)`.
///
/// On the lattice `θ + w ∈ (π_q/2)ℤ` the derivative is `0` for `p < 2` and
/// diverges for `p > 2`, which is reported as an error.
pub fn d_reduced_jacobian(e: &Exponent, theta: f64, w: f64) -> Result<f64> {
    finite(&[theta, w])?;
    let jac = Jacobian::new(e)?;
    let half = jac.tq.half_pi();
    if lattice_distance(theta + w, half) <= LATTICE_BAND {
        if e.p > 2.0 {
            return Err(Error::SingularDerivative(format!("θ + w = {} lies on the lattice and p > 2", theta + w)));
        }
        if e.p < 2.0 {
            return Ok(0.0);
        }
    }
    Ok(jac.eval(theta, w).1)
}

/// `N(θ, w) = 1 + w∂_wJ_R(θ, w)/J_R(θ, w)`, `+∞` where the derivative diverges.
///
/// At `w = 0` the continuous extension `5` is returned for `θ` off the lattice.
pub fn n_exponent(e: &Exponent, theta: f64, w: f64) -> Result<f64> {
    finite(&[theta, w])?;
    let jac = Jacobian::new(e)?;
    let half = jac.tq.half_pi();
    if w == 0.0 {
        if lattice_distance(theta, half) <= LATTICE_BAND {
            return Err(Error::SingularPoint(format!("θ = {theta} lies on the lattice with w = 0")));
        }
        return Ok(5.0);
    }
    let (j, dj) = jac.eval(theta, w);
    if j <= 0.0 {
        if lattice_distance(w, 2.0 * jac.pi_q()) <= 1e-9 {
            return Err(Error::Domain(format!("w = {w} lies on the cut locus 2π_qℤ")));
        }
        return Err(Error::Inconsistency(format!("J_R({theta}, {w}) = {j} is not positive")));
    }
    Ok(n_from(j, dj, w))
}

/// Determinant of the differential of `exp^t` at the covector `c`.
pub fn jac_det(e: &Exponent, c: &Covector, t: f64) -> Result<f64> {
    finite(&[c.r, c.theta, c.w, t])?;
    let jac = Jacobian::new(e)?;
    let q = e.q;
    if c.w == 0.0 {
        let (cs, sn) = jac.tq.pair(c.theta);
        let prod = (cs * sn).abs();
        let k = (q - 1.0).powi(2) * c.r.powi(3) * t.powi(5) / 12.0;
        if lattice_distance(c.theta, jac.tq.half_pi()) <= LATTICE_BAND {
            return match e.p.partial_cmp(&2.0) {
                Some(std::cmp::Ordering::Less) => Ok(0.0),
                Some(std::cmp::Ordering::Equal) => Ok(k),
                _ => Err(Error::SingularPoint(format!("Jacobian limit at θ = {} diverges for p > 2", c.theta))),
            };
        }
        return Ok(k * prod.powf(2.0 * q - 4.0));
    }
    let h = c.w * t;
    Ok(c.r.powi(3) * t.powi(5) * (jac.jr(c.theta, h) / h.powi(4)))
}

/// The five principal terms of `J_R` near the origin, without the remainder.
pub fn small_angle_jr(e: &Exponent, theta: f64, w: f64) -> Result<f64> {
    finite(&[theta, w])?;
    e.require_strict()?;
    let radius = small_angle_radius(e)?;
    if theta.abs() >= radius || (theta + w).abs() >= radius {
        return Err(Error::Validity(format!(
            "|θ| and |θ+w| must stay below {radius}, got θ = {theta}, w = {w}"
        )));
    }
    Ok(principal_terms(e.q, theta, w))
}

pub(crate) fn principal_terms(q: f64, theta: f64, w: f64) -> f64 {
    let u = theta + w;
    let (au, at) = (u.abs(), theta.abs());
    let k = (q - 1.0) / (q * q * (q + 1.0));
    k * (au.powf(2.0 * q) + at.powf(2.0 * q)) + 2.0 * (q - 1.0).powi(2) / (q * q) * au.powf(q) * at.powf(q)
        - (q - 1.0) / (q + 1.0) * (au.powf(q) * u * spow(theta, q - 1.0) + at.powf(q) * theta * spow(u, q - 1.0))
}

/// Largest dyadic radius on which [`small_angle_jr`] tracks `J_R` to its order.
///
/// On a polar grid of `(θ, θ+w)` inside the radius the relative error must
/// stay below `10·(|θ|+|w|)^q`; radii start at `π_q/8` and halve.
pub fn small_angle_radius(e: &Exponent) -> Result<f64> {
    let jac = Jacobian::new(e)?;
    let q = e.q;
    let mut radius = jac.tq.pi() / 8.0;
    for _ in 0..30 {
        let ok = (1..=6).all(|ri| {
            let rho = radius * ri as f64 / 6.0 * 0.999;
            (0..24).all(|ai| {
                let ang = (ai as f64 + 0.5) * std::f64::consts::TAU / 24.0;
                let (theta, u) = (rho * ang.cos(), rho * ang.sin());
                let w = u - theta;
                let exact = jac.jr(theta, w);
                let approx = principal_terms(q, theta, w);
                let tol = 10.0 * (theta.abs() + w.abs()).powf(q);
                exact > 0.0 && ((approx - exact) / exact).abs() < tol
            })
        });
        if ok {
            return Ok(radius);
        }
        radius *= 0.5;
    }
    Err(Error::Validity("no radius satisfied the small-angle calibration".into()))
}

/// `P(s)`, `P'(s)` and the ray ratio `1 + sP'(s)/P(s)`.
///
/// Within `|s| ≤ ½` the binomial series is used, which keeps the ratio exact
/// near `s = 0` where `P` vanishes to fourth order.
pub fn ray_function(q: f64, s: f64) -> RayFunction {
    if s.abs() <= 0.5 {
        let c = ray_coefficients(q);
        let (mut p, mut dp_s, mut sk) = (0.0, 0.0, 1.0);
        // Σ p_k s^{k−4} and Σ k p_k s^{k−4}.
        for (k, &pk) in c.iter().enumerate().skip(4) {
            p += pk * sk;
            dp_s += k as f64 * pk * sk;
            sk *= s;
        }
        let s4 = s.powi(4);
        let ratio = if p == 0.0 { 5.0 } else { 1.0 + dp_s / p };
        let dp_val = if s == 0.0 { 0.0 } else { dp_s * s4 / s };
        return RayFunction { q, s, p_val: p * s4, dp_val, ratio };
    }
    let v = 1.0 + s;
    let a = v.abs();
    let p = a.powf(2.0 * q) - q * q * a.powf(q) * v + 2.0 * (q * q - 1.0) * a.powf(q)
        - q * q * spow(v, q - 1.0)
        + 1.0;
    let dp = 2.0 * q * spow(v, 2.0 * q - 1.0) - q * q * (q + 1.0) * a.powf(q)
        + 2.0 * (q * q - 1.0) * q * spow(v, q - 1.0)
        - q * q * (q - 1.0) * a.powf(q - 2.0);
    RayFunction { q, s, p_val: p, dp_val: dp, ratio: 1.0 + s * dp / p }
}

/// Coefficients of `P(s) = Σ p_k s^k` for `|s| < 1`.
fn ray_coefficients(q: f64) -> Vec<f64> {
    const N: usize = 90;
    let b2q = binomials(2.0 * q, N);
    let bq1 = binomials(q + 1.0, N);
    let bq = binomials(q, N);
    let bqm = binomials(q - 1.0, N);
    (0..N)
        .map(|k| {
            let one = if k == 0 { 1.0 } else { 0.0 };
            b2q[k] - q * q * bq1[k] + 2.0 * (q * q - 1.0) * bq[k] - q * q * bqm[k] + one
        })
        .collect()
}

/// Samples `J_R`, `∂_wJ_R` and `N` on the open grid `(0, π_q/2)×(0, 2π_q)`.
pub fn surface(e: &Exponent, n_theta: usize, n_w: usize) -> Result<Vec<JacSample>> {
    let jac = Jacobian::new(e)?;
    let (half, full) = (jac.tq.half_pi(), 2.0 * jac.pi_q());
    Ok(par::map_range(n_theta * n_w, |idx| {
        let (i, k) = (idx / n_w, idx % n_w);
        let theta = half * (i as f64 + 0.5) / n_theta as f64;
        let w = full * (k as f64 + 0.5) / n_w as f64;
        jac.sample(theta, w)
    }))
}

/// CSV with columns `theta,w,jr,djr_dw,n_exp`.
pub fn samples_to_csv(samples: &[JacSample]) -> String {
    let mut out = String::from("theta,w,jr,djr_dw,n_exp\n");
    for s in samples {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.theta, s.w, s.jr, s.djr_dw, s.n_exp
        ));
    }
    out
}

fn finite(xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("arguments must be finite".into()))
    }
}
