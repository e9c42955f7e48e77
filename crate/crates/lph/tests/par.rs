use lph::geodim::{volume_sweep, HomothetyBox};
use lph::jac::surface;
use lph::mcp::{curvature_exponent_estimate, mcp_inequality_scan, GridSpec};
use lph::polygonal::{branching_witness, monte_carlo_homothety, H1Box};
use lph::Exponent;

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

/// Runs `f` on one thread and on four, and demands bit-identical results.
fn same<T: PartialEq + std::fmt::Debug + Send>(f: impl Fn() -> T + Sync) {
    let a = pool(1).install(&f);
    let b = pool(4).install(&f);
    assert_eq!(a, b);
}

#[test]
fn scans_do_not_depend_on_the_thread_count() {
    let e = Exponent::new(1.5).unwrap();
    let g = GridSpec { n_theta: 30, n_w: 30, n_t: 8, ..GridSpec::default() };
    same(|| surface(&e, 20, 20).unwrap());
    same(|| mcp_inequality_scan(&e, 7.0, &g).unwrap());
    same(|| curvature_exponent_estimate(&e, &g, 2).unwrap());
    let b = HomothetyBox::standard(&e).unwrap();
    same(|| volume_sweep(&e, &b, 1e-2, 1e-1, 4).unwrap());
    let omega = H1Box::new([1.0, 2.0], [1.0, 2.0], [-0.1, 0.1]).unwrap();
    same(|| monte_carlo_homothety(&omega, 0.05, 300_000, 5).unwrap());
    same(|| branching_witness(0.1, 200_000, 5).unwrap());
}
