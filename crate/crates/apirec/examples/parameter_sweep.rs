//! A small (z, p) parameter sweep, printed as CSV.
//!
//! More samples (z) buy precision; bigger samples (p) cost time and narrow
//! diversity. The full grid the evaluation uses runs through the same
//! `run_sweep` entry point.
//!
//! Run: `cargo run --release --example parameter_sweep`

use apirec::eval::{generate_corpus, run_sweep, SweepSpec, SyntheticSpec};

fn main() {
    let eco = generate_corpus(&SyntheticSpec::default()).expect("synthetic corpus");

    let spec = SweepSpec {
        z_values: vec![10, 50, 100],
        p_values: vec![50, 100],
        r_values: vec![4],
        repetitions: 1,
        apps_per_cell: 15,
        ..SweepSpec::default()
    };
    eprintln!(
        "sweeping z={:?} x p={:?} x r={:?} over up to {} apps per cell...",
        spec.z_values, spec.p_values, spec.r_values, spec.apps_per_cell
    );

    let table = run_sweep(&eco, &spec).expect("sweep runs");
    print!("{}", table.to_csv());

    // The headline trend: precision at the largest z should not be worse
    // than at the smallest, at fixed p.
    let mp_at = |z: u32, p: u32| {
        table
            .rows
            .iter()
            .find(|r| r.z == z && r.p == p)
            .and_then(|r| r.mp)
            .unwrap_or(0.0)
    };
    for &p in &spec.p_values {
        eprintln!(
            "p={p}: mp went {:.4} (z=10) -> {:.4} (z=100)",
            mp_at(10, p),
            mp_at(100, p)
        );
    }
}
