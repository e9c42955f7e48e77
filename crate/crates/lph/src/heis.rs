//! Heisenberg group law and the exponential map of the l^p structure.
//!
//! Geodesics from the identity are parametrised by a covector `(r, θ, w)`.
//! Their planar projection runs along a dilated dual circle: the phase
//! `wt + θ` is a q-angle and the velocity is `r·(cos_p, sin_p)` of the dual
//! angle. Along the geodesic, `z` is the signed area swept by `(x, y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptrig::{spow, Exponent, PTrig};
use crate::quad::{self, QuadOptions};

/// A point of the Heisenberg group in exponential coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const IDENTITY: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Largest coordinate difference, a convenient distance for tests.
    pub fn max_abs_diff(&self, o: &Point) -> f64 {
        (self.x - o.x).abs().max((self.y - o.y).abs()).max((self.z - o.z).abs())
    }
}

/// `a·b = (x+x', y+y', z+z'+½(xy'−x'y))`.
pub fn group_mul(a: &Point, b: &Point) -> Point {
    Point {
        x: a.x + b.x,
        y: a.y + b.y,
        z: a.z + b.z + 0.5 * (a.x * b.y - b.x * a.y),
    }
}

pub fn group_inv(a: &Point) -> Point {
    Point { x: -a.x, y: -a.y, z: -a.z }
}

/// Anisotropic dilation `(εx, εy, ε²z)`.
pub fn dilate(eps: f64, a: &Point) -> Result<Point> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("dilation factor {eps} must be positive")));
    }
    Ok(Point { x: eps * a.x, y: eps * a.y, z: eps * eps * a.z })
}

/// Initial covector at the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub r: f64,
    pub theta: f64,
    pub w: f64,
}

impl Covector {
    /// Builds a covector with `θ` reduced to `[0, 2π_q)`.
    pub fn new(e: &Exponent, r: f64, theta: f64, w: f64) -> Result<Self> {
        e.require_strict()?;
        if !(r >= 0.0 && r.is_finite() && theta.is_finite() && w.is_finite()) {
            return Err(Error::Domain(format!("covector ({r}, {theta}, {w}) must be finite with r >= 0")));
        }
        let period = 2.0 * crate::ptrig::pi_of(e.q);
        let mut th = theta.rem_euclid(period);
        if th >= period {
            th = 0.0;
        }
        Ok(Self { r, theta: th, w })
    }
}

/// Sampled geodesic `t ↦ exp^t(covector)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<(f64, Point)>,
    pub covector: Covector,
    pub exponent: Exponent,
}

impl GeodesicPath {
    /// CSV with header `t,x,y,z` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,y,z\n");
        for (t, p) in &self.samples {
            s.push_str(&format!("{t:.16e},{:.16e},{:.16e},{:.16e}\n", p.x, p.y, p.z));
        }
        s
    }
}

/// Position of a covector relative to the singular sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CovectorClass {
    Regular,
    S0,
    S1,
    OutsideInjectivity,
}

/// Band used for lattice membership tests.
pub const LATTICE_BAND: f64 = 1e-9;

/// Reusable evaluator of geodesics for one exponent.
#[derive(Debug, Clone)]
pub struct Geodesics {
    q: f64,
    tq: PTrig,
}

const JET_MAX_ORDER: usize = 80;
const SMALL_PHASE: f64 = 0.1;

impl Geodesics {
    pub fn new(e: &Exponent) -> Result<Self> {
        e.require_strict()?;
        Ok(Self { q: e.q, tq: PTrig::new(&e.conjugate())? })
    }

    /// The q-trigonometric evaluator that drives the phase.
    pub fn qtrig(&self) -> &PTrig {
        &self.tq
    }

    /// Dual vector `(cos_p φ°, sin_p φ°)` at the q-angle `φ`.
    fn dual_at(&self, phi: f64) -> (f64, f64) {
        self.tq.dual(phi)
    }

    /// Endpoint of `exp^t(r, θ, w)`.
    pub fn endpoint(&self, r: f64, theta: f64, w: f64, t: f64) -> Point {
        if t == 0.0 || r == 0.0 {
            return Point::IDENTITY;
        }
        if w == 0.0 {
            let (dx, dy) = self.dual_at(theta);
            return Point { x: r * t * dx, y: r * t * dy, z: 0.0 };
        }
        let h = w * t;
        let (k, off) = self.tq.lattice_split(theta);
        let d = off.abs();
        if h.abs() <= d / (2.0 * (self.q + 1.0)) {
            let (c0, s0) = self.tq.pair_at(k, off);
            return self.endpoint_jets(r, t, h, c0, s0);
        }
        if h.abs() < SMALL_PHASE {
            if let Some(p) = self.endpoint_quadrature(r, theta, t, h) {
                return p;
            }
        }
        let (c0, s0) = self.tq.pair_at(k, off);
        let (c1, s1) = self.tq.pair(theta + h);
        Point {
            x: r / w * (s1 - s0),
            y: -r / w * (c1 - c0),
            z: r * r / (2.0 * w * w) * (h + c1 * s0 - s1 * c0),
        }
    }

    /// Taylor expansion in the phase increment `h = wt` about an off-lattice θ.
    fn endpoint_jets(&self, r: f64, t: f64, h: f64, c0: f64, s0: f64) -> Point {
        let mut j = self.tq.jets(c0, s0);
        j.grow();
        let mut sx = j.s[1];
        let mut sy = j.c[1];
        let mut sz = 0.0;
        let mut hp = 1.0;
        let mut quiet = 0;
        for n in 2..JET_MAX_ORDER {
            j.grow();
            hp *= h;
            let tx = j.s[n] * hp;
            let ty = j.c[n] * hp;
            sx += tx;
            sy += ty;
            // The h^2 term of the area series vanishes identically.
            if n >= 3 {
                sz += (j.c[n] * s0 - j.s[n] * c0) * hp / h;
            }
            let small = tx.abs() <= 1e-17 * sx.abs().max(sy.abs()) && ty.abs() <= 1e-17 * sx.abs().max(sy.abs());
            if n >= 5 && small {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Point { x: r * t * sx, y: -r * t * sy, z: 0.5 * r * r * t * t * sz }
    }

    /// Averages of the velocity and the area integrand for short phases that
    /// start near the lattice.
    fn endpoint_quadrature(&self, r: f64, theta: f64, t: f64, h: f64) -> Option<Point> {
        let (lo, hi) = if h > 0.0 { (0.0, h) } else { (h, 0.0) };
        let mut breaks = vec![lo];
        let half = self.tq.half_pi();
        let kk = ((theta + lo) / half).ceil();
        let cross = kk * half - theta;
        if cross > lo && cross < hi {
            breaks.push(cross);
        }
        breaks.push(hi);
        // Signed powers of a small cosine amplify its rounding to about 1e-14.
        let opts = QuadOptions::new(1e-14 * h.abs(), 1e-12);
        let (c0, s0) = self.tq.pair(theta);
        let ix = quad::integrate_breaks(|u| self.dual_at(theta + u).0, &breaks, opts).ok()?;
        let iy = quad::integrate_breaks(|u| self.dual_at(theta + u).1, &breaks, opts).ok()?;
        let iz = quad::integrate_breaks(
            |u| {
                let (dx, dy) = self.dual_at(theta + u);
                1.0 - (dx * c0 + dy * s0)
            },
            &breaks,
            QuadOptions::new(1e-15 * h.abs(), 1e-12),
        )
        .ok()?;
        let sign = h.signum();
        Some(Point {
            x: r * t * sign * ix.value / h,
            y: r * t * sign * iy.value / h,
            z: r * r * t * t / (2.0 * h * h) * sign * iz.value,
        })
    }

    /// Geodesic samples at `n + 1` equally spaced times in `[0, t_end]`.
    pub fn trace(&self, r: f64, theta: f64, w: f64, t_end: f64, n: usize) -> Vec<(f64, Point)> {
        (0..=n)
            .map(|i| {
                let t = t_end * i as f64 / n.max(1) as f64;
                (t, self.endpoint(r, theta, w, t))
            })
            .collect()
    }
}

/// Closed-form endpoint `exp^t(c)`.
pub fn exp_map(e: &Exponent, c: &Covector, t: f64) -> Result<Point> {
    let g = Geodesics::new(e)?;
    Ok(g.endpoint(c.r, c.theta, c.w, t))
}

/// Samples the geodesic of `c` on `[0, t_end]`.
pub fn geodesic_path(e: &Exponent, c: &Covector, t_end: f64, n: usize) -> Result<GeodesicPath> {
    let g = Geodesics::new(e)?;
    Ok(GeodesicPath { samples: g.trace(c.r, c.theta, c.w, t_end, n), covector: *c, exponent: *e })
}

/// `2π_q/|w|`, or `+∞` when `w = 0`.
pub fn cut_time(e: &Exponent, c: &Covector) -> Result<f64> {
    e.require_strict()?;
    if c.w == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(2.0 * crate::ptrig::pi_of(e.q) / c.w.abs())
    }
}

fn lattice_distance(x: f64, half: f64) -> f64 {
    (x - (x / half).round() * half).abs()
}

/// Membership of `c` in the singular sets for the time-`t` exponential map.
pub fn classify_covector(e: &Exponent, c: &Covector, t: f64) -> Result<CovectorClass> {
    e.require_strict()?;
    let pq = crate::ptrig::pi_of(e.q);
    let half = 0.5 * pq;
    if c.r == 0.0 || c.w.abs() * t >= 2.0 * pq {
        return Ok(CovectorClass::OutsideInjectivity);
    }
    if c.w.abs() <= LATTICE_BAND {
        if lattice_distance(c.theta, half) < LATTICE_BAND {
            return Ok(CovectorClass::S0);
        }
        return Ok(CovectorClass::Regular);
    }
    if lattice_distance(c.w * t + c.theta, half) < LATTICE_BAND {
        return Ok(CovectorClass::S1);
    }
    Ok(CovectorClass::Regular)
}

// Dormand–Prince 5(4) tableau; the flow is autonomous so the nodes are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 5];

/// Hamiltonian flow for the state `(x, y, z, h_X, h_Y)`.
struct Flow {
    r: f64,
    w: f64,
    alpha: f64,
}

impl Flow {
    fn rhs(&self, y: &State) -> State {
        let u1 = self.r * spow(y[3] / self.r, self.alpha);
        let u2 = self.r * spow(y[4] / self.r, self.alpha);
        [u1, u2, 0.5 * (y[0] * u2 - y[1] * u1), -self.w * u2, self.w * u1]
    }

    /// One DOPRI5 step; returns the new state and the embedded error vector.
    fn step(&self, y: &State, k1: &State, h: f64) -> (State, State) {
        let add = |coef: &[(f64, &State)]| -> State {
            let mut out = *y;
            for i in 0..5 {
                let mut acc = 0.0;
                for (c, k) in coef {
                    acc += c * k[i];
                }
                out[i] += h * acc;
            }
            out
        };
        let k2 = self.rhs(&add(&[(A21, k1)]));
        let k3 = self.rhs(&add(&[(A31, k1), (A32, &k2)]));
        let k4 = self.rhs(&add(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = self.rhs(&add(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = self.rhs(&add(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let ynew = add(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = self.rhs(&ynew);
        let mut err = [0.0; 5];
        for i in 0..5 {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (ynew, err)
    }
}

const ODE_TOL: f64 = 1e-11;

fn error_norm(y0: &State, y1: &State, err: &State) -> f64 {
    let mut acc: f64 = 0.0;
    for i in 0..5 {
        let sc = ODE_TOL + ODE_TOL * y0[i].abs().max(y1[i].abs());
        acc = acc.max((err[i] / sc).abs());
    }
    acc
}

/// Index of a momentum component whose sign flips strictly between states.
fn crossing(y0: &State, y1: &State) -> Option<usize> {
    (3..5).find(|&i| y0[i] * y1[i] < 0.0)
}

/// Endpoint by integrating the Hamiltonian system numerically.
///
/// The controls `u = r·spow(h/r, q-1)` are only Hölder continuous where a
/// momentum component vanishes, so steps are landed exactly on those times.
pub fn exp_ode(e: &Exponent, c: &Covector, t: f64) -> Result<Point> {
    e.require_strict()?;
    if c.r == 0.0 || t == 0.0 {
        return Ok(Point::IDENTITY);
    }
    let tq = PTrig::new(&e.conjugate())?;
    let (cq, sq) = tq.pair(c.theta);
    let flow = Flow { r: c.r, w: c.w, alpha: e.q - 1.0 };
    let mut y: State = [0.0, 0.0, 0.0, c.r * cq, c.r * sq];
    let h_cap = if c.w == 0.0 { t } else { (0.25 * tq.pi() / c.w.abs()).min(t) };
    let mut s = 0.0;
    let mut h = (1e-3 * t).min(h_cap);
    let mut steps = 0usize;
    while s < t {
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::Integration { message: "step budget exhausted".into(), achieved: f64::NAN });
        }
        let last = s + h >= t;
        let hh = if last { t - s } else { h };
        let k1 = flow.rhs(&y);
        let (y1, err) = flow.step(&y, &k1, hh);
        let en = error_norm(&y, &y1, &err);
        if en > 1.0 {
            h = hh * (0.9 * en.powf(-0.2)).max(0.2);
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::Integration { message: "step size underflow".into(), achieved: en * ODE_TOL });
            }
            continue;
        }
        if let Some(i) = crossing(&y, &y1) {
            // Illinois regula falsi on the step length that lands on the zero.
            let (mut a, mut fa) = (0.0, y[i]);
            let (mut b, mut fb) = (hh, y1[i]);
            for _ in 0..200 {
                let c = (a * fb - b * fa) / (fb - fa);
                let fc = flow.step(&y, &k1, c).0[i];
                if fc * fb < 0.0 {
                    a = b;
                    fa = fb;
                } else {
                    fa *= 0.5;
                }
                b = c;
                fb = fc;
                if fc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * hh {
                    break;
                }
            }
            let tau = b;
            let (yt, errt) = flow.step(&y, &k1, tau);
            let ent = error_norm(&y, &yt, &errt);
            if ent > 1.0 {
                h = tau * (0.9 * ent.powf(-0.2)).max(0.2);
                continue;
            }
            y = yt;
            y[i] = 0.0;
            s += tau;
            continue;
        }
        y = y1;
        s = if last { t } else { s + hh };
        h = (hh * (0.9 * en.max(1e-10).powf(-0.2)).min(5.0)).min(h_cap);
    }
    Ok(Point { x: y[0], y: y[1], z: y[2] })
}
