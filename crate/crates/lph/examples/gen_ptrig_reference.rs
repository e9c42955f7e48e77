//! Regenerates `tests/data/ptrig_reference.csv` from the RK4 oracle.
//!
//! Run with `cargo run --release -p lph --example gen_ptrig_reference`.

#[path = "../tests/common/ptrig_oracle.rs"]
#[allow(dead_code)]
mod ptrig_oracle;

use std::fmt::Write as _;

fn main() {
    let mut out = String::from("p,theta,sin_p,cos_p\n");
    for &p in &ptrig_oracle::REFERENCE_P {
        for j in 0..64 {
            let (theta, s, c) = ptrig_oracle::reference_row(p, j, 1024);
            writeln!(out, "{p:.16e},{theta:.16e},{s:.16e},{c:.16e}").unwrap();
        }
    }
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/ptrig_reference.csv");
    std::fs::write(path, out).expect("write reference table");
    eprintln!("wrote {path}");
}
