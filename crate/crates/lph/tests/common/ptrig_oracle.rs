//! Brute-force reference for p-trigonometric values.
//!
//! Integrates `sin' = |cos|^{p-1}`, `cos' = -|sin|^{p-1}` (first quadrant)
//! with classical RK4 starting from the diagonal point `θ = π_p/4`, where
//! `cos = sin = 2^{-1/p}`, and Richardson-extrapolates two step sizes.
//! `π_p` is recomputed by quadrature of the ball area, independently of the
//! library's gamma function.

/// `π_p` as the ball area `4∫₀¹ (1 - x^p)^{1/p} dx`, by tanh-sinh quadrature.
pub fn oracle_pi(p: f64) -> f64 {
    let h = 1.0 / 64.0;
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut sum = 0.0;
    for k in -320i32..=320 {
        let t = k as f64 * h;
        let u = half_pi * t.sinh();
        // x = (1 + tanh u)/2 and 1 - x = 1/(1 + e^{2u}), both without cancellation.
        let one_minus_x = 1.0 / (1.0 + (2.0 * u).exp());
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let weight = half_pi * t.cosh() / (2.0 * u.cosh() * u.cosh());
        if weight == 0.0 || x == 0.0 {
            continue;
        }
        // 1 - x^p computed from 1 - x for x near 1.
        let one_minus_xp = if x > 0.5 { -(p * (-one_minus_x).ln_1p()).exp_m1() } else { 1.0 - x.powf(p) };
        sum += weight * one_minus_xp.powf(1.0 / p);
    }
    4.0 * h * sum
}

fn rhs(p: f64, y: [f64; 2]) -> [f64; 2] {
    // y = (cos, sin), both positive inside the first quadrant.
    [-y[1].powf(p - 1.0), y[0].powf(p - 1.0)]
}

fn rk4_march(p: f64, y0: [f64; 2], h: f64, steps: usize) -> [f64; 2] {
    let mut y = y0;
    let mut comp = [0.0f64; 2];
    for _ in 0..steps {
        let k1 = rhs(p, y);
        let k2 = rhs(p, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(p, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(p, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - comp[i];
            let next = y[i] + inc;
            comp[i] = (next - y[i]) - inc;
            y[i] = next;
        }
    }
    y
}

/// `(cos_p φ, sin_p φ)` for `φ = π_p/4 + m·π_p/64`, `|m| ≤ 15`, with
/// `substeps` RK4 steps per `π_p/64` on the coarse grid.
pub fn first_quadrant(p: f64, m: i32, substeps: usize) -> (f64, f64) {
    let pi = oracle_pi(p);
    let d = (0.5f64).powf(1.0 / p);
    let span = pi / 64.0 * m.unsigned_abs() as f64;
    let dir = if m < 0 { -1.0 } else { 1.0 };
    let coarse_steps = substeps * m.unsigned_abs() as usize;
    if coarse_steps == 0 {
        return (d, d);
    }
    let h = dir * span / coarse_steps as f64;
    let a = rk4_march(p, [d, d], h, coarse_steps);
    let b = rk4_march(p, [d, d], 0.5 * h, 2 * coarse_steps);
    ((16.0 * b[0] - a[0]) / 15.0, (16.0 * b[1] - a[1]) / 15.0)
}

/// Reference value at an arbitrary first-quadrant angle `φ ∈ (0, π_p/2)`.
pub fn at_angle(p: f64, phi: f64, h_max: f64) -> (f64, f64) {
    let pi = oracle_pi(p);
    let d = (0.5f64).powf(1.0 / p);
    let span = phi - 0.25 * pi;
    let n = ((span.abs() / h_max).ceil() as usize).max(1);
    let h = span / n as f64;
    let a = rk4_march(p, [d, d], h, n);
    let b = rk4_march(p, [d, d], 0.5 * h, 2 * n);
    ((16.0 * b[0] - a[0]) / 15.0, (16.0 * b[1] - a[1]) / 15.0)
}

/// Maps a full-period angle index `j` (angle `(j + ½)·2π_p/64`) to its value
/// using the quarter-turn symmetry.
pub fn reference_row(p: f64, j: usize, substeps: usize) -> (f64, f64, f64) {
    let pi = oracle_pi(p);
    let theta = (j as f64 + 0.5) * 2.0 * pi / 64.0;
    let quadrant = j / 16;
    let m = (j % 16) as i32;
    let (c, s) = first_quadrant(p, 2 * m - 15, substeps);
    let (c, s) = match quadrant {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    (theta, s, c)
}

pub const REFERENCE_P: [f64; 7] = [1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 8.0];
