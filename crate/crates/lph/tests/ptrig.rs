mod common;

use approx::assert_abs_diff_eq;
use lph::ptrig::{
    dual_pair, local_taylor, pi_p, radius_bound, sector_area, trig_pair, trig_pair_by_area, trig_series, PTrig,
};
use lph::quad::{integrate, QuadOptions};
use lph::{Error, Exponent};
use proptest::prelude::*;

use common::ptrig_oracle;

fn ex(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

fn load_reference() -> Vec<[f64; 4]> {
    let text = include_str!("data/ptrig_reference.csv");
    text.lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn matches_frozen_reference_table() {
    let rows = load_reference();
    assert_eq!(rows.len(), 7 * 64);
    let mut worst: f64 = 0.0;
    for [p, theta, s, c] in rows {
        let tp = trig_pair(&ex(p), theta).unwrap();
        worst = worst.max((tp.sin - s).abs()).max((tp.cos - c).abs());
    }
    assert!(worst < 1e-13, "worst deviation {worst:e}");
}

#[test]
fn oracle_is_converged() {
    // Halving the oracle step leaves the reference unchanged far below the
    // tolerance used against the library.
    for &p in &[1.25, 3.0, 8.0] {
        for m in [-15, -7, 3, 15] {
            let a = ptrig_oracle::first_quadrant(p, m, 256);
            let b = ptrig_oracle::first_quadrant(p, m, 1024);
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14, "p={p} m={m}");
        }
    }
}

#[test]
fn pi_p_values() {
    assert_abs_diff_eq!(pi_p(&ex(2.0)), std::f64::consts::PI, epsilon = 1e-14);
    assert_abs_diff_eq!(pi_p(&ex(1.0)), 2.0, epsilon = 1e-14);
    assert_eq!(pi_p(&ex(f64::INFINITY)), 4.0);
    // Ball area by quadrature: 4∫₀¹ (1 - x⁴)^{1/4} dx, with x = 1 - u² to
    // soften the endpoint.
    let f = |u: f64| {
        let x: f64 = 1.0 - u * u;
        (1.0 - x.powi(4)).max(0.0).powf(0.25) * 2.0 * u
    };
    let area = 4.0 * integrate(f, 0.0, 1.0, QuadOptions::new(1e-15, 1e-15)).unwrap().value;
    assert_abs_diff_eq!(pi_p(&ex(4.0)), area, epsilon = 1e-12);
    assert_abs_diff_eq!(pi_p(&ex(4.0)), 3.708_149_354_602_744, epsilon = 1e-13);
}

#[test]
fn anchor_values() {
    for &p in &[1.1, 1.5, 2.0, 3.0, 7.0] {
        let e = ex(p);
        let z = trig_pair(&e, 0.0).unwrap();
        assert_eq!((z.cos, z.sin), (1.0, 0.0));
        let q = trig_pair(&e, 0.5 * pi_p(&e)).unwrap();
        assert_abs_diff_eq!(q.cos, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.sin, 1.0, epsilon = 1e-15);
        let d = dual_pair(&e, 0.0).unwrap();
        assert_eq!((d.cos, d.sin), (1.0, 0.0));
    }
}

#[test]
fn classical_case() {
    let e = ex(2.0);
    for i in 0..500 {
        let th = -20.0 + 40.0 * i as f64 / 499.0;
        let t = trig_pair(&e, th).unwrap();
        assert_abs_diff_eq!(t.cos, th.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(t.sin, th.sin(), epsilon = 1e-13);
        let d = dual_pair(&e, th).unwrap();
        assert_abs_diff_eq!(d.cos, th.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(d.sin, th.sin(), epsilon = 1e-13);
    }
}

#[test]
fn p4_at_one_half_against_oracle() {
    // Frozen from ptrig_oracle::at_angle(4.0, 0.5, 1e-4).
    let (c_ref, s_ref) = (0.984_591_005_455_247_2, 0.495_388_460_063_417_25);
    let (c, s) = ptrig_oracle::at_angle(4.0, 0.5, 1e-4);
    assert_abs_diff_eq!(c, c_ref, epsilon = 1e-15);
    assert_abs_diff_eq!(s, s_ref, epsilon = 1e-15);
    let t = trig_pair(&ex(4.0), 0.5).unwrap();
    assert_abs_diff_eq!(t.cos, c_ref, epsilon = 1e-13);
    assert_abs_diff_eq!(t.sin, s_ref, epsilon = 1e-13);
}

#[test]
fn non_finite_and_polygonal_inputs_rejected() {
    assert!(matches!(trig_pair(&ex(3.0), f64::NAN), Err(Error::Domain(_))));
    assert!(matches!(trig_pair(&ex(1.0), 0.1), Err(Error::Regime(_))));
    assert!(Exponent::new(0.5).is_err());
}

#[test]
fn duality_grid() {
    for &p in &[1.5, 3.0] {
        let e = ex(p);
        let tp = PTrig::new(&e).unwrap();
        let tq = PTrig::new(&e.conjugate()).unwrap();
        let n = 200;
        let (pp, pq) = (tp.pi(), tq.pi());
        let phis: Vec<(f64, f64, f64)> = (0..n)
            .map(|j| {
                let phi = 2.0 * pq * j as f64 / n as f64;
                let (c, s) = tq.pair(phi);
                (phi, c, s)
            })
            .collect();
        let mut global: f64 = f64::NEG_INFINITY;
        for i in 0..n {
            let th = 2.0 * pp * (i as f64 + 0.37) / n as f64;
            let (c, s) = tp.pair(th);
            let (best, bc, bs) = phis
                .iter()
                .map(|&(_, cq, sq)| (c * cq + s * sq, cq, sq))
                .fold((f64::NEG_INFINITY, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
            global = global.max(best);
            let (dc, ds) = tp.dual(th);
            assert!((bc - dc).abs() + (bs - ds).abs() < 0.15, "argmax off the dual angle at θ={th}");
            assert_abs_diff_eq!(c * dc + s * ds, 1.0, epsilon = 1e-13);
        }
        assert!(global <= 1.0 + 1e-10);
    }
}

#[test]
fn series_printed_terms() {
    for &p in &[1.3, 2.0, 3.5] {
        let s = trig_series(&ex(p), 0.0, 2).unwrap();
        assert_eq!((s.sin.value, s.cos.value, s.dual_sin.value, s.dual_cos.value), (0.0, 1.0, 0.0, 1.0));
    }
    let th: f64 = 0.3;
    let s = trig_series(&ex(2.0), th, 2).unwrap();
    let maclaurin = th - th.powi(3) / 6.0 + th.powi(5) / 120.0;
    assert_abs_diff_eq!(s.sin.value, maclaurin, epsilon = 1e-16);
}

#[test]
fn series_within_remainder_bound() {
    for &p in &[1.25, 1.5, 2.0, 3.0, 5.0] {
        let e = ex(p);
        let lim = lph::ptrig::series_validity(&e);
        for order in 0..=2 {
            for i in 1..40 {
                let th = lim * (i as f64 / 40.0) * if i % 2 == 0 { 1.0 } else { -1.0 };
                let s = trig_series(&e, th, order).unwrap();
                let t = trig_pair(&e, th).unwrap();
                let d = dual_pair(&e, th).unwrap();
                for (ser, exact) in [(s.sin, t.sin), (s.cos, t.cos), (s.dual_sin, d.sin), (s.dual_cos, d.cos)] {
                    assert!(
                        (ser.value - exact).abs() <= ser.remainder_bound + 1e-15,
                        "p={p} order={order} θ={th}: {} vs {exact} bound {}",
                        ser.value,
                        ser.remainder_bound
                    );
                }
            }
        }
    }
    let e = ex(1.5);
    let s = trig_series(&e, 0.05, 2).unwrap();
    let (c_ref, s_ref) = ptrig_oracle::at_angle(1.5, 0.05, 1e-4);
    assert!((s.sin.value - s_ref).abs() <= s.sin.remainder_bound);
    assert!((s.cos.value - c_ref).abs() <= s.cos.remainder_bound);
    assert!(matches!(trig_series(&e, 1.0, 2), Err(Error::Validity(_))));
}

#[test]
fn radius_bound_examples() {
    assert_abs_diff_eq!(radius_bound(&ex(3.0), 0.4).unwrap(), 0.1, epsilon = 1e-15);
    assert_abs_diff_eq!(radius_bound(&ex(2.0), 0.3).unwrap(), 0.1, epsilon = 1e-15);
    assert!(radius_bound(&ex(2.0), 0.0).is_err());
    assert!(radius_bound(&ex(2.0), 1.0).is_err());
}

#[test]
fn local_taylor_inside_half_radius() {
    for &p in &[1.5, 2.5, 4.0] {
        let e = ex(p);
        for &th0 in &[0.2, -0.35, 0.6] {
            let r = radius_bound(&e, th0).unwrap();
            let lt = local_taylor(&e, th0, 12).unwrap();
            for i in -10..=10 {
                let th = th0 + 0.5 * r * i as f64 / 10.0;
                let (c, s) = lt.eval(th);
                let t = trig_pair(&e, th).unwrap();
                assert!((s - t.sin).abs() < 1e-8 && (c - t.cos).abs() < 1e-8, "p={p} θ0={th0} θ={th}");
            }
        }
    }
}

#[test]
fn sector_area_route_agrees_and_is_monotone() {
    for &p in &[1.3, 2.0, 3.0, 6.0] {
        let e = ex(p);
        let mut prev = -1.0;
        for i in 0..=40 {
            let a = sector_area(&e, std::f64::consts::FRAC_PI_2 * i as f64 / 40.0).unwrap();
            assert!(a > prev);
            prev = a;
        }
        assert_abs_diff_eq!(prev, 0.25 * pi_p(&e), epsilon = 1e-12);
        for i in 0..25 {
            let th = -3.0 + 0.31 * i as f64;
            let a = trig_pair_by_area(&e, th).unwrap();
            let b = trig_pair(&e, th).unwrap();
            assert!((a.cos - b.cos).abs() < 1e-12 && (a.sin - b.sin).abs() < 1e-12, "p={p} θ={th}");
        }
    }
}

fn exponent_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![1.05f64..2.0, 2.0f64..10.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn identity_holds(p in exponent_strategy(), th in -50.0f64..50.0) {
        let t = trig_pair(&ex(p), th).unwrap();
        prop_assert!((t.cos.abs().powf(p) + t.sin.abs().powf(p) - 1.0).abs() < 1e-10);
        let d = dual_pair(&ex(p), th).unwrap();
        let q = ex(p).q;
        prop_assert!((d.cos.abs().powf(q) + d.sin.abs().powf(q) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quarter_and_half_turns(p in exponent_strategy(), th in -20.0f64..20.0) {
        let e = ex(p);
        let pi = pi_p(&e);
        let t = trig_pair(&e, th).unwrap();
        let h = trig_pair(&e, th + 0.5 * pi).unwrap();
        let f = trig_pair(&e, th + pi).unwrap();
        let w = trig_pair(&e, th + 2.0 * pi).unwrap();
        prop_assert!((h.sin - t.cos).abs() < 1e-12 && (h.cos + t.sin).abs() < 1e-12);
        prop_assert!((f.sin + t.sin).abs() < 1e-12 && (f.cos + t.cos).abs() < 1e-12);
        prop_assert!((w.sin - t.sin).abs() < 1e-12 && (w.cos - t.cos).abs() < 1e-12);
    }

    #[test]
    fn derivative_system(p in exponent_strategy(), th in -10.0f64..10.0) {
        let e = ex(p);
        let tr = PTrig::new(&e).unwrap();
        let (_, off) = tr.lattice_split(th);
        prop_assume!(off.abs() > 0.05);
        let h = 1e-6;
        let (cp, sp) = tr.pair(th + h);
        let (cm, sm) = tr.pair(th - h);
        let (dc, ds) = tr.dual(th);
        prop_assert!(((sp - sm) / (2.0 * h) - dc).abs() < 1e-5);
        prop_assert!(((cp - cm) / (2.0 * h) + ds).abs() < 1e-5);
    }

    #[test]
    fn duality_inequality(p in exponent_strategy(), th in -10.0f64..10.0, phi in -10.0f64..10.0) {
        let e = ex(p);
        let t = trig_pair(&e, th).unwrap();
        let u = trig_pair(&e.conjugate(), phi).unwrap();
        prop_assert!(t.cos * u.cos + t.sin * u.sin <= 1.0 + 1e-12);
        let d = dual_pair(&e, th).unwrap();
        prop_assert!((t.cos * d.cos + t.sin * d.sin - 1.0).abs() < 1e-12);
    }
}
