use lph::geodim::{
    decomposition_exponents, dimension_fit, domain_decomposition_volumes, homothety_volume,
    homothety_volume_with_cutoff, volume_sweep, HomothetyBox,
};
use lph::ptrig::{pi_p, trig_pair};
use lph::{Error, Exponent};

fn ex(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn pq(e: &Exponent) -> f64 {
    pi_p(&e.conjugate())
}

/// `∫_{−X}^{X} (2 − 2cos u − u sin u)/u⁴ du` from the termwise series.
fn classical_inner(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 24.0; // (2n)! at n = 2
    for n in 2..40i32 {
        let k = 2 * n;
        if n > 2 {
            fact *= ((k - 1) * k) as f64;
        }
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        let c = sign * (2.0 - 2.0 * n as f64) / fact;
        sum += 2.0 * c * x.powi(k - 3) / (k as f64 - 3.0);
    }
    sum
}

/// `∫_0^Θ (q−1)²/12·|cos_qθ sin_qθ|^{2q−4} dθ` by composite Simpson.
fn axis_density(e: &Exponent, theta: f64) -> f64 {
    let qe = e.conjugate();
    let q = e.q;
    let n = 4000;
    let h = theta / n as f64;
    let f = |x: f64| {
        let t = trig_pair(&qe, x).unwrap();
        (q - 1.0).powi(2) / 12.0 * (t.cos * t.sin).abs().powf(2.0 * q - 4.0)
    };
    let mut s = f(0.0) + f(theta);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn classical_volume_matches_series() {
    let e = ex(2.0);
    for &(r, th, w) in &[(1.0, 0.7, 1.0), (2.0, 1.2, 3.0), (0.5, 0.1, 6.0)] {
        let b = HomothetyBox::new(&e, r, th, w).unwrap();
        for &t in &[1.0, 0.3, 1e-2, 1e-3] {
            let v = homothety_volume(&e, &b, t).unwrap();
            let oracle = t.powi(4) * r.powi(4) / 4.0 * 2.0 * th * classical_inner(w * t);
            assert!((v / oracle - 1.0).abs() < 1e-7, "t={t}: {v} vs {oracle}");
        }
    }
}

#[test]
fn classical_ratio_stabilizes() {
    let e = ex(2.0);
    let b = HomothetyBox::new(&e, 1.0, 0.5, 1.0).unwrap();
    let ratios: Vec<f64> = [1e-3, 3e-3, 1e-2].iter().map(|&t| homothety_volume(&e, &b, t).unwrap() / t.powi(5)).collect();
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).abs() < 1e-2);
    }
}

#[test]
fn leading_constant_below_three() {
    // Simpson needs a bounded density, so 2q − 4 ≥ 0.
    for &p in &[1.5, 2.0] {
        let e = ex(p);
        let b = HomothetyBox::standard(&e).unwrap();
        let t = 1e-2;
        let v = homothety_volume(&e, &b, t).unwrap() / t.powi(5);
        // m(Ω_t)/t⁵ → R⁴/4 · 2W · 2∫_0^Θ (q−1)²/12 |cs|^{2q−4}.
        let lead = b.r.powi(4) / 4.0 * 2.0 * b.w * 2.0 * axis_density(&e, b.theta);
        assert!((v / lead - 1.0).abs() < 1e-6, "p={p}: {v} vs {lead}");
    }
}

#[test]
fn positive_and_monotone() {
    for &p in &[1.5, 4.0] {
        let e = ex(p);
        let h = 0.5 * pq(&e);
        let base = HomothetyBox::new(&e, 1.0, 0.5 * h, 0.5).unwrap();
        let v = |b: &HomothetyBox, t: f64| homothety_volume(&e, b, t).unwrap();
        let v0 = v(&base, 0.1);
        assert!(v0 > 0.0 && v(&base, 1.0) > 0.0);
        assert!(v(&base, 0.2) > v0);
        assert!(v(&HomothetyBox { r: 1.1, ..base }, 0.1) > v0);
        assert!(v(&HomothetyBox { theta: 0.6 * h, ..base }, 0.1) > v0);
        assert!(v(&HomothetyBox { w: 0.6, ..base }, 0.1) > v0);
        // R enters only through the prefactor.
        let scaled = v(&HomothetyBox { r: 3.0, ..base }, 0.1);
        assert!((scaled / v0 - 81.0).abs() < 1e-12 * 81.0);
    }
}

#[test]
fn axis_singularity_is_integrable() {
    for &p in &[1.5, 2.5, 4.0] {
        let e = ex(p);
        let b = HomothetyBox::new(&e, 1.0, 0.3, 0.5).unwrap();
        let a = homothety_volume_with_cutoff(&e, &b, 0.05, 1e-6).unwrap();
        let c = homothety_volume_with_cutoff(&e, &b, 0.05, 5e-7).unwrap();
        assert!((a / c - 1.0).abs() < 1e-6, "p={p}");
    }
}

#[test]
fn decomposition_adds_up() {
    for &p in &[1.5, 3.0, 4.0] {
        let e = ex(p);
        let b = HomothetyBox::new(&e, 1.0, 0.25 * pq(&e), 1e-2).unwrap();
        for &t in &[1e-3, 1e-1] {
            let parts = domain_decomposition_volumes(&e, &b, t).unwrap();
            assert!(parts.iter().all(|&x| x > 0.0));
            let full = homothety_volume(&e, &b, t).unwrap() / (t.powi(4) * b.r.powi(4) / 4.0);
            let sum = 2.0 * parts.iter().sum::<f64>();
            assert!((sum / full - 1.0).abs() < 1e-6, "p={p} t={t}: {sum} vs {full}");
        }
    }
}

#[test]
fn decomposition_exponents_match_the_lemmas() {
    let e = ex(4.0);
    let b = HomothetyBox::standard(&e).unwrap();
    let k = decomposition_exponents(&e, &b, 1e-3, 1e-1, 6).unwrap();
    assert!((k[0] - 1.0).abs() < 1e-3, "{k:?}");
    assert!((k[2] - (2.0 * e.q - 2.0)).abs() < 1e-2, "{k:?}");
    let e = ex(1.5);
    let b = HomothetyBox::standard(&e).unwrap();
    let k = decomposition_exponents(&e, &b, 1e-3, 1e-1, 6).unwrap();
    assert!((k[0] - 1.0).abs() < 1e-3, "{k:?}");
    assert!((k[1] - 1.0).abs() < 1e-2, "{k:?}");
}

#[test]
fn slopes_and_the_log_correction() {
    let e = ex(1.5);
    let f = dimension_fit(&e, &HomothetyBox::standard(&e).unwrap(), 1e-3, 1e-1, 16).unwrap();
    assert!((f.slope - 5.0).abs() < 0.05 && !f.log_correction, "{f:?}");
    let e = ex(4.0);
    let f = dimension_fit(&e, &HomothetyBox::standard(&e).unwrap(), 1e-3, 1e-1, 10).unwrap();
    assert!((f.slope - 14.0 / 3.0).abs() < 0.05 && !f.log_correction, "{f:?}");
    let e = ex(3.0);
    let f = dimension_fit(&e, &HomothetyBox::standard(&e).unwrap(), 1e-3, 1e-1, 10).unwrap();
    assert!(f.log_correction && f.log_fit_r2 > 0.999 && (f.slope - 5.0).abs() < 0.1, "{f:?}");
}

#[test]
fn exponent_crossover_at_three() {
    for &p in &[2.5, 2.9, 3.1, 3.5] {
        let e = ex(p);
        let f = dimension_fit(&e, &HomothetyBox::standard(&e).unwrap(), 1e-3, 1e-1, 8).unwrap();
        let expect = (2.0 * e.q + 2.0).min(5.0);
        assert!((f.slope - expect).abs() < 0.05, "p={p}: {} vs {expect}", f.slope);
    }
}

#[test]
fn sweep_is_log_spaced() {
    let e = ex(2.0);
    let s = volume_sweep(&e, &HomothetyBox::standard(&e).unwrap(), 1e-3, 1e-1, 5).unwrap();
    assert_eq!(s.len(), 5);
    assert_eq!(s[4].t, 1e-1);
    assert!((s[2].t - 1e-2).abs() < 1e-15);
    assert!(s.windows(2).all(|w| w[1].volume > w[0].volume));
}

#[test]
fn rejects_bad_input() {
    let e = ex(2.0);
    let h = 0.5 * pq(&e);
    assert!(HomothetyBox::new(&e, 1.0, h, 1.0).is_err());
    assert!(HomothetyBox::new(&e, 1.0, 0.5, 0.0).is_err());
    assert!(HomothetyBox::new(&e, 1.0, 0.5, 4.0 * h + 1e-9).is_err());
    assert!(HomothetyBox::new(&e, -1.0, 0.5, 1.0).is_err());
    assert!(HomothetyBox::new(&ex(1.0), 1.0, 0.5, 1.0).is_err());
    let b = HomothetyBox::standard(&e).unwrap();
    assert!(matches!(dimension_fit(&e, &b, 1e-3, 0.3, 8), Err(Error::Domain(_))));
    assert!(matches!(dimension_fit(&e, &b, 1e-3, 0.1, 7), Err(Error::Domain(_))));
    assert!(homothety_volume(&e, &b, 0.0).is_err());
    assert!(matches!(homothety_volume(&e, &b, 1e-300), Err(Error::Range(_))));
}
