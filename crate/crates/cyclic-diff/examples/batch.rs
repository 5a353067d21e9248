//! Twenty seeded runs per parity, printing the convergence diagnostics:
//! even n collapses onto two antipodal clusters, odd n onto an ellipse.
//!
//! ```sh
//! cargo run --release --example batch
//! ```

use cyclic_diff::{run, RunConfig, SplitMix64};

fn main() {
    let mut master = SplitMix64::new(2);
    let seeds: Vec<u64> = (0..20).map(|_| master.next_u64()).collect();

    println!("n=50 (even): sign structure splits the labels into two clusters");
    println!(
        "{:>20}  {:>12}  {:>12}  {:>8}",
        "seed", "diam(300)", "diam(1500)", "gap"
    );
    for &seed in &seeds {
        let mut config = RunConfig::new(50, 2, 1500, seed);
        config.snapshot_stride = 300;
        let record = run(&config).expect("run");
        let at = |t: u64| {
            record
                .diagnostics
                .iter()
                .find(|d| d.t == t)
                .and_then(|d| d.parity)
                .expect("parity diagnostics")
        };
        let (early, late) = (at(300), at(1500));
        println!(
            "{seed:>20}  {:>12.3e}  {:>12.3e}  {:>8.4}",
            early.even_diameter.max(early.odd_diameter),
            late.even_diameter.max(late.odd_diameter),
            late.gap
        );
    }

    println!();
    println!("n=51 (odd): every point approaches the predicted ellipse");
    println!(
        "{:>20}  {:>12}  {:>12}  {:>12}",
        "seed", "res(300)", "res(1500)", "res(3000)"
    );
    for &seed in &seeds {
        let mut config = RunConfig::new(51, 2, 3000, seed);
        config.snapshot_stride = 300;
        let record = run(&config).expect("run");
        let at = |t: u64| {
            record
                .diagnostics
                .iter()
                .find(|d| d.t == t)
                .and_then(|d| d.ellipse_residual)
                .expect("ellipse diagnostics")
        };
        println!(
            "{seed:>20}  {:>12.3e}  {:>12.3e}  {:>12.3e}",
            at(300),
            at(1500),
            at(3000)
        );
    }
}
