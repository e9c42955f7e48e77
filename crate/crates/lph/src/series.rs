//! Power-series helpers shared by the trigonometric and Jacobian engines.

/// Next coefficient `f[n]` of `f = sgn(g0)|g|^alpha` as a power series.
///
/// `g` must hold at least `n + 1` coefficients with `g[0] != 0`, and `f` the
/// first `n` coefficients of the result. Uses the J.C.P. Miller recurrence
/// obtained from `g f' = alpha g' f`.
pub(crate) fn pow_next(g: &[f64], f: &[f64], alpha: f64, n: usize) -> f64 {
    debug_assert!(n >= 1 && g.len() > n && f.len() >= n);
    let nf = n as f64;
    let mut acc = 0.0;
    for k in 1..=n {
        acc += ((alpha + 1.0) * k as f64 - nf) * g[k] * f[n - k];
    }
    acc / (nf * g[0])
}

/// Horner evaluation of `sum c[k] x^k`.
pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}
