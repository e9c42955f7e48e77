//! The l^1 Heisenberg group, where geodesics are axis-parallel polygons.
//!
//! Points use the same exponential coordinates as [`crate::heis`], so the
//! swept area of a planar path is `½∫(x dy − y dx)`. The l^inf group is
//! reached through the linear isometry `Φ(x, y) = (x + y, x − y)`, which
//! turns l^1 lengths into l^inf lengths and multiplies areas by `det Φ = −2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heis::{group_inv, group_mul, Point};
use crate::par;

/// Absolute tolerance on the regime inequalities, scaled by `max(1, x², y², |z|)`.
pub const REGIME_TOL: f64 = 1e-12;
/// Endpoint and swept-area agreement required of every returned path.
pub const ENDPOINT_TOL: f64 = 1e-10;
/// Largest time for which the branching neighbourhood stays on the x-axis.
pub const BRANCHING_T_MAX: f64 = 0.125;
/// Half-width of the first neighbourhood tried around the branching point.
pub const BRANCHING_HALF_WIDTH: f64 = 0.05;
/// Samples per Monte-Carlo batch; each batch owns one generator stream.
pub const BATCH: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    H1,
    H2,
    H3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryFlags {
    pub on_h1_h2: bool,
    pub on_h2_h3: bool,
    pub axis: bool,
}

/// Which of the three geodesic regimes a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: Tag,
    pub flags: BoundaryFlags,
}

fn scale_tol(h: &Point) -> f64 {
    REGIME_TOL * 1f64.max(h.x * h.x).max(h.y * h.y).max(h.z.abs())
}

/// Tags `h` by `|z|` against `½|xy|` and `max(|x|,|y|)² − ½|xy|`.
pub fn region_classify(h: &Point) -> Regime {
    let tol = scale_tol(h);
    let half_xy = 0.5 * (h.x * h.y).abs();
    let m = h.x.abs().max(h.y.abs());
    let upper = m * m - half_xy;
    let az = h.z.abs();
    let tag = if az <= half_xy + tol {
        Tag::H1
    } else if az <= upper + tol {
        Tag::H2
    } else {
        Tag::H3
    };
    let flags = BoundaryFlags {
        on_h1_h2: (az - half_xy).abs() <= tol,
        on_h2_h3: (az - upper).abs() <= tol,
        axis: h.x * h.y == 0.0,
    };
    Regime { tag, flags }
}

/// Membership in the cut locus of the identity.
///
/// Points with `|z| = ½|xy| ≠ 0` satisfy the formula yet have a unique
/// geodesic; [`region_classify`] marks them with `on_h1_h2`.
pub fn cut_locus_member(h: &Point) -> bool {
    let half_xy = 0.5 * (h.x * h.y).abs();
    h.z.abs() <= half_xy || (h.x * h.y == 0.0 && h.z.abs() > 0.0)
}

/// Axis direction of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-y")]
    NegY,
}

impl Dir {
    pub fn vector(self) -> [f64; 2] {
        match self {
            Dir::PosX => [1.0, 0.0],
            Dir::NegX => [-1.0, 0.0],
            Dir::PosY => [0.0, 1.0],
            Dir::NegY => [0.0, -1.0],
        }
    }

    fn from_vector(v: [f64; 2]) -> Dir {
        match (v[0] as i8, v[1] as i8) {
            (1, 0) => Dir::PosX,
            (-1, 0) => Dir::NegX,
            (0, 1) => Dir::PosY,
            _ => Dir::NegY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub dir: Dir,
    pub len: f64,
}

/// An axis-parallel horizontal path starting at the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Geodesic {
    pub target: Point,
    pub edges: Vec<Edge>,
    pub endpoint: Point,
    pub regime: Regime,
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Planar vertices of a path and the area it sweeps.
fn trace(edges: &[Edge]) -> (Vec<[f64; 2]>, f64) {
    let mut pts = vec![[0.0, 0.0]];
    let mut z = 0.0;
    for e in edges {
        let p = *pts.last().unwrap();
        let v = e.dir.vector();
        let q = [p[0] + e.len * v[0], p[1] + e.len * v[1]];
        z += 0.5 * (p[0] * q[1] - p[1] * q[0]);
        pts.push(q);
    }
    (pts, z)
}

impl L1Geodesic {
    fn assemble(target: Point, edges: Vec<Edge>, regime: Regime, warning: Option<String>) -> Result<Self> {
        let (pts, z) = trace(&edges);
        let end = pts.last().unwrap();
        let endpoint = Point::new(end[0], end[1], z);
        let scale = 1f64.max(target.x.abs()).max(target.y.abs()).max(target.z.abs());
        if endpoint.max_abs_diff(&target) > ENDPOINT_TOL * scale {
            return Err(Error::Inconsistency(format!("path ends at {endpoint:?}, target {target:?}")));
        }
        let length = edges.iter().map(|e| e.len).sum();
        Ok(Self { target, edges, endpoint, regime, length, warning })
    }

    /// Planar vertices, starting at the origin.
    pub fn vertices(&self) -> Vec<[f64; 2]> {
        trace(&self.edges).0
    }

    /// Point reached after the fraction `s ∈ [0, 1]` of the length.
    pub fn point_at(&self, s: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("path parameter {s} outside [0, 1]")));
        }
        let mut left = s * self.length;
        let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
        for e in &self.edges {
            let d = e.len.min(left);
            let v = e.dir.vector();
            let (nx, ny) = (x + d * v[0], y + d * v[1]);
            z += 0.5 * (x * ny - y * nx);
            x = nx;
            y = ny;
            left -= d;
            if left <= 0.0 {
                break;
            }
        }
        Ok(Point::new(x, y, z))
    }
}

/// Which member of the non-unique family to return inside `H1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Selector {
    /// `y, x, y` edges in the first quadrant, the `y` edges split to fix the area.
    Canonical,
    /// `steps` equal `x` edges; `lambda ∈ [0, 1]` moves from the canonical
    /// levels towards the most spread staircase with the same area.
    Staircase { steps: usize, lambda: f64 },
}

/// A signed permutation `T`; canonical coordinates are `T·(x, y)` and `det T · z`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    m: [[f64; 2]; 2],
}

impl Frame {
    fn all() -> impl Iterator<Item = Frame> {
        let perms = [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]];
        let signs = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];
        perms.into_iter().flat_map(move |p| {
            signs.into_iter().map(move |(a, b)| Frame { m: [[a * p[0][0], a * p[0][1]], [b * p[1][0], b * p[1][1]]] })
        })
    }

    fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    fn apply(&self, h: &Point) -> Point {
        Point::new(
            self.m[0][0] * h.x + self.m[0][1] * h.y,
            self.m[1][0] * h.x + self.m[1][1] * h.y,
            self.det() * h.z,
        )
    }

    /// Maps a canonical direction back with `Tᵀ = T⁻¹`.
    fn back(&self, d: Dir) -> Dir {
        let v = d.vector();
        Dir::from_vector([self.m[0][0] * v[0] + self.m[1][0] * v[1], self.m[0][1] * v[0] + self.m[1][1] * v[1]])
    }

    fn find(h: &Point, ok: impl Fn(&Frame, &Point) -> bool) -> (Frame, Point) {
        Frame::all()
            .map(|f| (f, f.apply(h)))
            .find(|(f, c)| ok(f, c))
            .expect("some signed permutation reaches the canonical chamber")
    }
}

fn edge(dir: Dir, len: f64) -> Edge {
    Edge { dir, len: len.max(0.0) }
}

/// Mean height of the `x` edges of a first-quadrant staircase with area `z`.
fn mean_level(x: f64, y: f64, z: f64) -> f64 {
    if x == 0.0 {
        0.5 * y
    } else {
        (0.5 * y - z / x).clamp(0.0, y)
    }
}

fn staircase_edges(x: f64, y: f64, z: f64, steps: usize, lambda: f64) -> Vec<Edge> {
    let mean = mean_level(x, y, z);
    let k = steps as f64;
    let total = k * mean;
    let n_top = if y > 0.0 { ((total / y).floor() as usize).min(steps) } else { 0 };
    let rem = total - n_top as f64 * y;
    let spread: Vec<f64> = (0..steps)
        .map(|i| {
            let from_top = steps - 1 - i;
            if from_top < n_top {
                y
            } else if from_top == n_top {
                rem.clamp(0.0, y)
            } else {
                0.0
            }
        })
        .collect();
    let mut edges = Vec::with_capacity(2 * steps + 1);
    let mut level = 0.0;
    for s in spread {
        let target = (1.0 - lambda) * mean + lambda * s;
        edges.push(edge(Dir::PosY, target - level));
        edges.push(edge(Dir::PosX, x / k));
        level = target;
    }
    edges.push(edge(Dir::PosY, y - level));
    edges
}

/// The three-edge arc `+x, +y, −x` for `y ≥ |x|`, `z ≥ 0`.
fn h2_edges(c: &Point) -> Vec<Edge> {
    let a = c.z / c.y;
    vec![edge(Dir::PosX, a + 0.5 * c.x), edge(Dir::PosY, c.y), edge(Dir::NegX, a - 0.5 * c.x)]
}

/// The four-edge arc of a square of side `s` for `y ≥ |x|`, `z ≥ 0`.
fn h3_edges(c: &Point) -> Vec<Edge> {
    let s = (c.z + 0.5 * c.x.abs() * c.y).sqrt();
    if c.x <= 0.0 {
        vec![edge(Dir::PosX, s + c.x), edge(Dir::PosY, s), edge(Dir::NegX, s), edge(Dir::NegY, s - c.y)]
    } else {
        vec![edge(Dir::NegY, s - c.y), edge(Dir::PosX, s), edge(Dir::PosY, s), edge(Dir::NegX, s - c.x)]
    }
}

/// A length minimizer from the identity to `h`.
pub fn l1_geodesic(h: &Point, selector: Selector) -> Result<L1Geodesic> {
    if ![h.x, h.y, h.z].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!("non-finite target {h:?}")));
    }
    if *h == Point::IDENTITY {
        return Err(Error::Domain("the identity has no nontrivial geodesic".into()));
    }
    let regime = region_classify(h);
    let (frame, edges) = match regime.tag {
        Tag::H1 => {
            // Rotations only, so the area keeps its sign.
            let (f, c) = Frame::find(h, |f, c| f.det() > 0.0 && c.x >= 0.0 && c.y >= 0.0);
            let edges = match selector {
                Selector::Canonical => staircase_edges(c.x, c.y, c.z, 1, 0.0),
                Selector::Staircase { steps, lambda } => {
                    if !(1..=64).contains(&steps) || !(0.0..=1.0).contains(&lambda) {
                        return Err(Error::Domain(format!("staircase ({steps}, {lambda}) out of range")));
                    }
                    staircase_edges(c.x, c.y, c.z, steps, lambda)
                }
            };
            (f, edges)
        }
        Tag::H2 | Tag::H3 => {
            let (f, c) = Frame::find(h, |_, c| c.y >= c.x.abs() && c.z >= 0.0);
            let edges = if regime.tag == Tag::H2 { h2_edges(&c) } else { h3_edges(&c) };
            (f, edges)
        }
    };
    let edges = edges.into_iter().map(|e| Edge { dir: frame.back(e.dir), len: e.len }).collect();
    let warning = (regime.flags.axis && h.z != 0.0)
        .then(|| "target on a coordinate axis with z ≠ 0: geodesics are not unique; one representative returned".to_string());
    L1Geodesic::assemble(*h, edges, regime, warning)
}

/// The l^1 distance from the identity.
pub fn l1_distance(h: &Point) -> f64 {
    let (ax, ay, az) = (h.x.abs(), h.y.abs(), h.z.abs());
    let (lo, hi) = (ax.min(ay), ax.max(ay));
    match region_classify(h).tag {
        Tag::H1 => ax + ay,
        Tag::H2 => hi + 2.0 * az / hi,
        Tag::H3 => 4.0 * (az + 0.5 * lo * hi).sqrt() - lo - hi,
    }
}

/// A minimizer to `h` in the first quadrant passing through `g`.
///
/// Concatenates canonical paths `e → g` and `g → h`. It is a minimizer
/// exactly when both legs stay monotone, i.e. `g` and `g⁻¹h` lie in `H1`
/// with non-negative planar coordinates.
pub fn minimizer_through(h: &Point, g: &Point) -> Result<L1Geodesic> {
    let rest = group_mul(&group_inv(g), h);
    for (name, p) in [("g", g), ("g⁻¹h", &rest)] {
        let r = region_classify(p);
        if p.x < 0.0 || p.y < 0.0 || r.tag != Tag::H1 {
            return Err(Error::Domain(format!("{name} = {p:?} is not a first-quadrant H1 point")));
        }
    }
    let mut edges = staircase_edges(g.x, g.y, g.z, 1, 0.0);
    edges.extend(staircase_edges(rest.x, rest.y, rest.z, 1, 0.0));
    L1Geodesic::assemble(*h, edges, region_classify(h), None)
}

/// `T(h)`, the largest time for which the midpoint sets are the full `F_{t,α}`.
pub fn t_threshold(h: &Point) -> Result<f64> {
    if !(h.x > 0.0 && h.y > 0.0 && h.z.abs() < 0.5 * h.x * h.y) {
        return Err(Error::Domain(format!("{h:?} is not in the first-quadrant interior of H1")));
    }
    let a = h.x + h.y;
    let half = 0.5 * h.x * h.y;
    Ok((h.x.min(h.y) / a).min((half - h.z) / (h.x * a)).min((half + h.z) / (h.y * a)))
}

/// Whether `g` lies in `F_{t,α} = {(ut, (α−u)t, v) : 0 ≤ u ≤ α, |v| ≤ u(α−u)t²/2}`.
pub fn in_midpoint_set(t: f64, alpha: f64, g: &Point, tol: f64) -> bool {
    let u = g.x / t;
    u >= -tol
        && u <= alpha + tol
        && (g.y - (alpha - u) * t).abs() <= tol * t
        && g.z.abs() <= u * (alpha - u) * t * t / 2.0 + tol * t * t
}

/// Volume of `⋃_{α ∈ [m, M]} F_{t,α}`.
pub fn midpoint_set_volume(m: f64, big_m: f64, t: f64) -> Result<f64> {
    if !(0.0 < m && m < big_m && big_m.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need 0 < m < M and t > 0, got m={m} M={big_m} t={t}")));
    }
    Ok(t.powi(4) * (big_m.powi(4) - m.powi(4)) / 24.0)
}

/// An axis-aligned box in the first-quadrant interior of `H1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Box {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl H1Box {
    pub fn new(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> Result<Self> {
        let ok = [x, y, z].iter().all(|r| r[0] < r[1] && r[0].is_finite() && r[1].is_finite());
        let zmax = z[0].abs().max(z[1].abs());
        if !ok || x[0] <= 0.0 || y[0] <= 0.0 || zmax >= 0.5 * x[0] * y[0] {
            return Err(Error::Domain(format!("box {x:?}×{y:?}×{z:?} is not inside the interior of H1")));
        }
        Ok(Self { x, y, z })
    }

    /// Extremes of `α = x + y` over the box.
    pub fn alpha_range(&self) -> (f64, f64) {
        (self.x[0] + self.y[0], self.x[1] + self.y[1])
    }

    /// `min T(h)` over the box.
    ///
    /// The second term of `T` decreases in `z` and the third increases, so
    /// `z` is pinned to an end and the planar minimum is taken on a fine grid.
    pub fn threshold(&self) -> f64 {
        const N: usize = 256;
        let mut best = f64::INFINITY;
        for i in 0..=N {
            let x = self.x[0] + (self.x[1] - self.x[0]) * i as f64 / N as f64;
            for j in 0..=N {
                let y = self.y[0] + (self.y[1] - self.y[0]) * j as f64 / N as f64;
                let a = x + y;
                let half = 0.5 * x * y;
                let t = (x.min(y) / a).min((half - self.z[1]) / (x * a)).min((half + self.z[0]) / (y * a));
                best = best.min(t);
            }
        }
        best
    }
}

/// A Monte-Carlo volume of the homothety `Ω_t` with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloVolume {
    pub t: f64,
    pub n: usize,
    pub seed: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub threshold: f64,
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Hit-or-miss estimate of `m(Ω_t)` over `(u, α, v) ∈ [0, M] × [m, M] × [−M²t²/8, M²t²/8]`.
pub fn monte_carlo_homothety(omega: &H1Box, t: f64, n: usize, seed: u64) -> Result<MonteCarloVolume> {
    let threshold = omega.threshold();
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    if t > threshold {
        return Err(Error::Validity(format!("t = {t} exceeds T(Ω) = {threshold}")));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let (m, big_m) = omega.alpha_range();
    let vmax = big_m * big_m * t * t / 8.0;
    let batches = n.div_ceil(BATCH);
    let hits: Vec<u64> = par::map_range(batches, |b| {
        let mut rng = batch_rng(seed, b);
        let count = BATCH.min(n - b * BATCH);
        let mut hits = 0u64;
        for _ in 0..count {
            let u = rng.gen::<f64>() * big_m;
            let alpha = m + rng.gen::<f64>() * (big_m - m);
            let v = (2.0 * rng.gen::<f64>() - 1.0) * vmax;
            if u <= alpha && v.abs() <= u * (alpha - u) * t * t / 2.0 {
                hits += 1;
            }
        }
        hits
    });
    let hits: u64 = hits.iter().sum();
    let frac = hits as f64 / n as f64;
    // dX dY = t² du dα.
    let cell = t * t * big_m * (big_m - m) * 2.0 * vmax;
    Ok(MonteCarloVolume {
        t,
        n,
        seed,
        estimate: cell * frac,
        std_error: cell * (frac * (1.0 - frac) / n as f64).sqrt(),
        analytic: midpoint_set_volume(m, big_m, t)?,
        threshold,
    })
}

/// Certification that a neighbourhood of the branching point collapses onto the x-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingRecord {
    pub t: f64,
    pub n: usize,
    pub max_offaxis: f64,
    pub seed: u64,
    pub center: Point,
    pub half_width: f64,
}

/// The point reached by `+x ½, +y 1, −x ½`.
pub fn branching_center() -> Point {
    let edges = [edge(Dir::PosX, 0.5), edge(Dir::PosY, 1.0), edge(Dir::NegX, 0.5)];
    let (pts, z) = trace(&edges);
    let end = pts.last().unwrap();
    Point::new(end[0], end[1], z)
}

/// Edge ratios `l₁/l₂`, `l₃/l₂` of the unique geodesic, or `None` off `H2`.
fn ratios(g: &L1Geodesic) -> Option<(f64, f64)> {
    let dirs: Vec<Dir> = g.edges.iter().map(|e| e.dir).collect();
    (g.regime.tag == Tag::H2 && dirs == [Dir::PosX, Dir::PosY, Dir::NegX])
        .then(|| (g.edges[0].len / g.edges[1].len, g.edges[2].len / g.edges[1].len))
}

/// Samples `n` targets near the branching point and checks `γ_h(t)` stays on the x-axis.
pub fn branching_witness(t: f64, n: usize, seed: u64) -> Result<BranchingRecord> {
    if !(t > 0.0 && t <= BRANCHING_T_MAX) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1/8]")));
    }
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let c = branching_center();
    let in_range = |r: f64| r > 0.25 && r < 0.75;
    let mut hw = BRANCHING_HALF_WIDTH;
    'shrink: for _ in 0..20 {
        let batches = n.div_ceil(BATCH);
        let out: Vec<Result<Option<f64>>> = par::map_range(batches, |b| {
            let mut rng = batch_rng(seed, b);
            let mut worst = 0.0f64;
            for _ in 0..BATCH.min(n - b * BATCH) {
                let mut s = || c_offset(&mut rng, hw);
                let h = Point::new(c.x + s(), c.y + s(), c.z + s());
                let g = l1_geodesic(&h, Selector::Canonical)?;
                match ratios(&g) {
                    Some((r1, r3)) if in_range(r1) && in_range(r3) => {}
                    _ => return Ok(None),
                }
                let p = g.point_at(t)?;
                worst = worst.max(p.y.abs()).max(p.z.abs());
            }
            Ok(Some(worst))
        });
        let mut max_offaxis = 0.0f64;
        for r in out {
            match r? {
                Some(w) => max_offaxis = max_offaxis.max(w),
                None => {
                    hw *= 0.5;
                    continue 'shrink;
                }
            }
        }
        if max_offaxis >= 1e-12 {
            return Err(Error::CounterexampleFailure(format!("γ_h({t}) leaves the x-axis by {max_offaxis:e}")));
        }
        return Ok(BranchingRecord { t, n, max_offaxis, seed, center: c, half_width: hw });
    }
    Err(Error::CounterexampleFailure("no neighbourhood keeps the edge ratios in (1/4, 3/4)".into()))
}

/// A uniform offset in the open interval `(−hw, hw)`.
fn c_offset(rng: &mut ChaCha8Rng, hw: f64) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return (2.0 * u - 1.0) * hw;
        }
    }
}

/// `Φ`: l^1 coordinates to l^inf coordinates.
pub fn l1_to_linf(h: &Point) -> Point {
    Point::new(h.x + h.y, h.x - h.y, -2.0 * h.z)
}

/// `Φ⁻¹`: l^inf coordinates to l^1 coordinates.
pub fn linf_to_l1(h: &Point) -> Point {
    Point::new(0.5 * (h.x + h.y), 0.5 * (h.x - h.y), -0.5 * h.z)
}

/// A geodesic of the l^inf group, with diagonal edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinfGeodesic {
    pub target: Point,
    pub vertices: Vec<[f64; 2]>,
    pub endpoint: Point,
    pub length: f64,
    pub regime: Regime,
}

/// Swept area of a planar polygonal path from the origin.
pub fn swept_area(vertices: &[[f64; 2]]) -> f64 {
    vertices.windows(2).map(|w| 0.5 * (w[0][0] * w[1][1] - w[0][1] * w[1][0])).sum()
}

/// Planar l^inf length of a polygonal path.
pub fn linf_length(vertices: &[[f64; 2]]) -> f64 {
    vertices.windows(2).map(|w| (w[1][0] - w[0][0]).abs().max((w[1][1] - w[0][1]).abs())).sum()
}

/// The image under `Φ` of the l^1 geodesic to `Φ⁻¹(h)`.
pub fn linf_geodesic(h: &Point, selector: Selector) -> Result<LinfGeodesic> {
    let g = l1_geodesic(&linf_to_l1(h), selector)?;
    let vertices: Vec<[f64; 2]> = g.vertices().iter().map(|v| [v[0] + v[1], v[0] - v[1]]).collect();
    let end = *vertices.last().unwrap();
    let endpoint = Point::new(end[0], end[1], swept_area(&vertices));
    let length = linf_length(&vertices);
    Ok(LinfGeodesic { target: *h, vertices, endpoint, length, regime: g.regime })
}
