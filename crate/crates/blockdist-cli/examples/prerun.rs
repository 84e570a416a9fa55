//! One-off exploration of the acceptance-scale numbers (slopes, energies,
//! timings) before pinning thresholds in the test suite.

use std::time::Instant;

use blockdist::adaptability::discrete_energy;
use blockdist::bset::{b_set, BsetOptions};
use blockdist::generators::{grid, random_cube, GeneratorSpec};
use blockdist::geometry::Partition;
use blockdist_cli::scaling::{run_scaling, DiagonalConvention, ScanOptions};

fn main() {
    let p22 = Partition::new(vec![2, 2]).unwrap();
    let p23 = Partition::new(vec![2, 3]).unwrap();

    for conv in [DiagonalConvention::Included, DiagonalConvention::Excluded] {
        let run = run_scaling(
            &GeneratorSpec::Grid { dim: 4, side: 3 },
            &p22,
            &[3, 4, 5, 6, 7, 8, 9, 10],
            &ScanOptions { diagonal: conv, ..Default::default() },
        )
        .unwrap();
        println!(
            "grid d=4 p=(2,2) {:?}: slope {:.4} r2 {:.5} counts {:?}",
            conv,
            run.fit.slope,
            run.fit.r_squared,
            run.measurements.iter().map(|m| m.b_count).collect::<Vec<_>>()
        );
    }

    for conv in [DiagonalConvention::Included, DiagonalConvention::Excluded] {
        let run = run_scaling(
            &GeneratorSpec::Grid { dim: 5, side: 2 },
            &p23,
            &[2, 3, 4, 5, 6],
            &ScanOptions { diagonal: conv, ..Default::default() },
        )
        .unwrap();
        println!(
            "grid d=5 p=(2,3) {:?}: slope {:.4} r2 {:.5} counts {:?}",
            conv,
            run.fit.slope,
            run.fit.r_squared,
            run.measurements.iter().map(|m| m.b_count).collect::<Vec<_>>()
        );
    }

    // subspace embed slope, included convention
    let run = run_scaling(
        &GeneratorSpec::SubspaceEmbed { parts: vec![2, 3], side: 3, fixed: None },
        &p23,
        &[3, 4, 5, 6, 7, 8],
        &ScanOptions { diagonal: DiagonalConvention::Included, ..Default::default() },
    )
    .unwrap();
    println!("subspace p=(2,3) included: slope {:.4}", run.fit.slope);

    // energies of the d=4 grid family at s=3
    let mut e4 = 0.0;
    for m in 2..=10u64 {
        let g = grid(4, m).unwrap();
        let t = Instant::now();
        let r = discrete_energy(&g, 3.0).unwrap();
        if m == 4 {
            e4 = r.energy;
        }
        println!(
            "grid d=4 m={m}: n={} energy(s=3) = {:.6}  ({:.2}s)",
            g.len(),
            r.energy,
            t.elapsed().as_secs_f64()
        );
    }
    println!("2x energy(m=4) = {:.6}", 2.0 * e4);

    // criterion-9 style timing: 1e8 pairs single worker
    let e = random_cube(4, 10_000, 30, 1).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let stats = pool.install(|| b_set(&e, &e, &p22, &BsetOptions::default()).unwrap());
    println!(
        "random 10^4 pts d=4 (range 30): |B| = {}, positive {}, single-worker {:.2}s",
        stats.count(),
        stats.strictly_positive_count(),
        t.elapsed().as_secs_f64()
    );

    // grid m=10 brute-force timing (criterion 2 runtime budget)
    let g10 = grid(4, 10).unwrap();
    let t = Instant::now();
    let stats = pool.install(|| b_set(&g10, &g10, &p22, &BsetOptions::default()).unwrap());
    println!(
        "grid d=4 m=10 brute force: |B| = {} in {:.2}s single-worker",
        stats.count(),
        t.elapsed().as_secs_f64()
    );
}
