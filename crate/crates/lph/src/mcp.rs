//! Measure contraction scans and the curvature exponent.
//!
//! With the reduced Jacobian `J_R`, the condition MCP(0, N) reads
//! `J_R(θ, wt) ≥ t^{N−1}·J_R(θ, w)` for `t ∈ (0, 1]`. Its differential form is
//! `N(θ, w) = 1 + w∂_wJ_R/J_R ≤ N`, so the curvature exponent is `sup N`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jac::{ray_function, Jacobian};
use crate::par;
use crate::ptrig::Exponent;

/// Relative slack below which a deficit in the integral form is not counted.
pub const VIOLATION_SLACK: f64 = 1e-10;

const GOLDEN_ITERS: usize = 60;
const MAX_WITNESSES: usize = 16;

/// Resolution of the `(θ, w, t)` grid and the lattice exclusion band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_w: usize,
    pub n_t: usize,
    pub band: f64,
    pub rounds: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_theta: 400, n_w: 400, n_t: 50, band: 1e-3, rounds: 4 }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.n_theta == 0 || self.n_w == 0 || self.n_t == 0 {
            return Err(Error::Domain("grid sizes must be positive".into()));
        }
        if !(self.band >= 0.0 && self.band.is_finite()) {
            return Err(Error::Domain(format!("band {} must be finite and non-negative", self.band)));
        }
        Ok(())
    }

    /// `θ_i = (i+½)/n_θ · π_q/2`.
    pub fn theta(&self, half: f64, i: usize) -> f64 {
        half * (i as f64 + 0.5) / self.n_theta as f64
    }

    /// `w_k = (k+½)/n_w · 2π_q`.
    pub fn w(&self, full: f64, k: usize) -> f64 {
        full * (k as f64 + 0.5) / self.n_w as f64
    }

    /// `t_j = 10^{-3(1 − j/n_t)²}`: log-scale from `1e-3`, graded toward `1`.
    ///
    /// Near its maximum `N` varies on short `w`-scales, and the integral form
    /// only sees that through ratios `t` close to `1`.
    pub fn t(&self, j: usize) -> f64 {
        let u = 1.0 - j as f64 / self.n_t as f64;
        10f64.powf(-3.0 * u * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub theta: f64,
    pub w: f64,
}

/// A grid point where the integral inequality fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub theta: f64,
    pub w: f64,
    pub t: f64,
    /// `J_R(θ, wt)`.
    pub lhs: f64,
    /// `t^{N−1}·J_R(θ, w)`.
    pub rhs: f64,
}

/// One step of the approach to the lattice in [`divergence_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub eta: f64,
    pub theta: f64,
    pub w: f64,
    #[serde(with = "extended")]
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    Satisfied,
    ViolatedAt { theta: f64, w: f64, t: f64 },
    DivergenceEvidence { path: Vec<ProbePoint> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpReport {
    pub p: f64,
    #[serde(with = "extended")]
    pub n_tested: f64,
    pub grid: GridSpec,
    pub verdict: Verdict,
    /// Supremum of `N` found; `+∞` is written as `"inf"`.
    #[serde(with = "extended")]
    pub sup_estimate: f64,
    pub argmax: Option<Argmax>,
    pub witnesses: Vec<Witness>,
}

/// One row of [`ray_limit_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayRow {
    pub s: f64,
    pub ratio: f64,
    pub thetas: [f64; 3],
    pub n_values: [f64; 3],
    pub converged: bool,
}

/// Writes non-finite reals as `"inf"`, `"-inf"` or `"nan"`.
mod extended {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

fn lattice_distance(x: f64, half: f64) -> f64 {
    (x - (x / half).round() * half).abs()
}

/// Largest `N` on the `(θ, w)` grid, ignoring points within the band.
fn grid_sup(jac: &Jacobian, grid: &GridSpec) -> Result<(f64, Option<Argmax>)> {
    let half = jac.qtrig().half_pi();
    let full = 2.0 * jac.pi_q();
    let rows = par::map_range(grid.n_theta, |i| {
        let theta = grid.theta(half, i);
        let mut best: Option<(f64, f64)> = None;
        for k in 0..grid.n_w {
            let w = grid.w(full, k);
            if lattice_distance(theta + w, half) < grid.band {
                continue;
            }
            let n = jac.n_raw(theta, w);
            if !n.is_finite() {
                return Err(Error::Inconsistency(format!("N({theta}, {w}) = {n} off the lattice band")));
            }
            if best.is_none_or(|(b, _)| n > b) {
                best = Some((n, w));
            }
        }
        Ok(best.map(|(n, w)| (n, theta, w)))
    });
    let mut sup = f64::NEG_INFINITY;
    let mut arg = None;
    for row in rows {
        if let Some((n, theta, w)) = row? {
            if n > sup {
                sup = n;
                arg = Some(Argmax { theta, w });
            }
        }
    }
    Ok((sup, arg))
}

/// Checks `J_R(θ, wt) ≥ t^{N−1}·J_R(θ, w)` on the grid.
///
/// Points with `θ+w` or `θ+wt` within `band` of the lattice are skipped.
/// A point counts as a violation when the deficit exceeds
/// [`VIOLATION_SLACK`] relative to the right-hand side; the verdict carries
/// the worst one. `sup_estimate` is the grid supremum of the differential
/// form, so both characterizations come from one call.
pub fn mcp_inequality_scan(e: &Exponent, n: f64, grid: &GridSpec) -> Result<McpReport> {
    e.require_strict()?;
    grid.validate()?;
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Domain(format!("N = {n} must be finite and at least 1")));
    }
    let jac = Jacobian::new(e)?;
    let half = jac.qtrig().half_pi();
    let full = 2.0 * jac.pi_q();
    let ts: Vec<(f64, f64)> = (0..grid.n_t).map(|j| (grid.t(j), grid.t(j).powf(n - 1.0))).collect();

    // Per (θ, w) cell: the violations, as (relative deficit, witness).
    let cells = par::map_range(grid.n_theta * grid.n_w, |idx| {
        let (i, k) = (idx / grid.n_w, idx % grid.n_w);
        let theta = grid.theta(half, i);
        let w = grid.w(full, k);
        let mut found = Vec::new();
        if lattice_distance(theta + w, half) < grid.band {
            return found;
        }
        let jw = jac.jr(theta, w);
        for &(t, tn) in &ts {
            if lattice_distance(theta + w * t, half) < grid.band {
                continue;
            }
            let lhs = jac.jr(theta, w * t);
            let rhs = tn * jw;
            if rhs - lhs > VIOLATION_SLACK * rhs {
                found.push(((rhs - lhs) / rhs, Witness { theta, w, t, lhs, rhs }));
            }
        }
        found
    });
    let mut all: Vec<(f64, Witness)> = cells.into_iter().flatten().collect();
    // Stable sort keeps index order among equal deficits.
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    all.truncate(MAX_WITNESSES);
    let witnesses: Vec<Witness> = all.into_iter().map(|(_, w)| w).collect();
    let verdict = match witnesses.first() {
        Some(w) => Verdict::ViolatedAt { theta: w.theta, w: w.w, t: w.t },
        None => Verdict::Satisfied,
    };
    let (sup, argmax) = grid_sup(&jac, grid)?;
    Ok(McpReport { p: e.p, n_tested: n, grid: *grid, verdict, sup_estimate: sup, argmax, witnesses })
}

/// Maximises `f` on `[a, b]` by golden-section search.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Supremum of `N(θ, w)` over `(0, π_q/2)×(0, 2π_q)` for `p ≤ 2`.
///
/// The grid supremum is polished by `refine_rounds` rounds of golden-section
/// search, alternating `w` and `θ` around the running argmax on brackets that
/// halve every round. Only improvements are kept, so the estimate never
/// decreases. The verdict is `Satisfied` at `n_tested = sup_estimate`.
pub fn curvature_exponent_estimate(e: &Exponent, grid: &GridSpec, refine_rounds: usize) -> Result<McpReport> {
    e.require_strict()?;
    grid.validate()?;
    if e.p > 2.0 {
        return Err(Error::Domain(format!("p = {} > 2 has no finite exponent; use divergence_probe", e.p)));
    }
    let jac = Jacobian::new(e)?;
    let half = jac.qtrig().half_pi();
    let full = 2.0 * jac.pi_q();
    let (mut sup, argmax) = grid_sup(&jac, grid)?;
    let Some(Argmax { mut theta, mut w }) = argmax else {
        return Err(Error::Domain("the band excludes every grid point".into()));
    };
    let floor = 1e-12 * full;
    let value = |th: f64, ww: f64| {
        if !(th > 0.0 && th < half && ww > 0.0 && ww < full) {
            return f64::NEG_INFINITY;
        }
        let n = jac.n_raw(th, ww);
        if n.is_finite() {
            n
        } else {
            f64::NEG_INFINITY
        }
    };
    let (mut ht, mut hw) = (half / grid.n_theta as f64, full / grid.n_w as f64);
    for _ in 0..refine_rounds {
        let (wb, nb) = golden_max(|x| value(theta, x), (w - hw).max(floor), (w + hw).min(full - floor));
        if nb > sup {
            sup = nb;
            w = wb;
        }
        let (tb, nb) = golden_max(|x| value(x, w), (theta - ht).max(floor), (theta + ht).min(half - floor));
        if nb > sup {
            sup = nb;
            theta = tb;
        }
        ht *= 0.5;
        hw *= 0.5;
    }
    Ok(McpReport {
        p: e.p,
        n_tested: sup,
        grid: GridSpec { rounds: refine_rounds, ..*grid },
        verdict: Verdict::Satisfied,
        sup_estimate: sup,
        argmax: Some(Argmax { theta, w }),
        witnesses: Vec::new(),
    })
}

/// Approaches the lattice `θ + w = π_q/2` at `θ = π_q/4` until `N > target`.
///
/// Offsets `η = 10^{-1}, 10^{-1.5}, …, 10^{-12}` are tried from both sides;
/// the side whose `N` grows is reported as the evidence path.
pub fn divergence_probe(e: &Exponent, target: f64) -> Result<McpReport> {
    e.require_strict()?;
    if e.p <= 2.0 {
        return Err(Error::Domain(format!("p = {} ≤ 2 has a finite exponent; the probe needs p > 2", e.p)));
    }
    let jac = Jacobian::new(e)?;
    let half = jac.qtrig().half_pi();
    let theta = 0.5 * half;
    let mut best: Option<Vec<ProbePoint>> = None;
    let mut sup = f64::NEG_INFINITY;
    for side in [1.0, -1.0] {
        let mut path = Vec::new();
        for k in 2..=24 {
            let eta = 10f64.powf(-0.5 * k as f64);
            let w = half - theta - side * eta;
            let n = jac.n_raw(theta, w);
            path.push(ProbePoint { eta: side * eta, theta, w, n });
            sup = sup.max(n);
            if n > target {
                return Ok(McpReport {
                    p: e.p,
                    n_tested: target,
                    grid: GridSpec { n_theta: 1, n_w: path.len(), n_t: 0, band: 0.0, rounds: 0 },
                    verdict: Verdict::DivergenceEvidence { path },
                    sup_estimate: f64::INFINITY,
                    argmax: Some(Argmax { theta, w }),
                    witnesses: Vec::new(),
                });
            }
        }
        best = Some(path);
    }
    let last = best.and_then(|p| p.last().copied());
    Err(Error::ProbeFailure(format!(
        "N stayed below {target} down to η = 1e-12 (largest value {sup}, last point {last:?})"
    )))
}

/// Limits of `N` along rays `w = sθ`, compared with `1 + sP'(s)/P(s)`.
///
/// `s` runs over `±10^{-3}, ±10^{-2.5}, …, ±10^6`, skipping `s = −1` where
/// the ray hits the lattice. Each ray is sampled at `θ = c, c/10, c/100`
/// with `c = 10^{-2}/max(1, |s|)`; a row converges when consecutive values
/// and the last value against the ratio all agree within `1e-2`.
pub fn ray_limit_check(e: &Exponent) -> Result<Vec<RayRow>> {
    e.require_strict()?;
    if e.p > 2.0 {
        return Err(Error::Domain(format!("ray limits are finite only for p ≤ 2, got p = {}", e.p)));
    }
    let jac = Jacobian::new(e)?;
    let q = e.q;
    let mut ss = Vec::new();
    for k in 0..=18 {
        let m = 10f64.powf(-3.0 + 0.5 * k as f64);
        ss.push(m);
        if k != 6 {
            ss.push(-m);
        }
    }
    ss.sort_by(f64::total_cmp);
    Ok(ss
        .into_iter()
        .map(|s| {
            let ratio = ray_function(q, s).ratio;
            let c = 1e-2 / s.abs().max(1.0);
            let thetas = [c, c / 10.0, c / 100.0];
            let n_values = thetas.map(|th| jac.n_raw(th, s * th));
            let converged = (n_values[0] - n_values[1]).abs() < 1e-2
                && (n_values[1] - n_values[2]).abs() < 1e-2
                && (n_values[2] - ratio).abs() < 1e-2;
            RayRow { s, ratio, thetas, n_values, converged }
        })
        .collect())
}
