//! Energy and separation checks: the floating evaluation against the exact
//! rational one, monotonicity in s, scale invariance, and the thinning
//! contract.

use blockdist::adaptability::{
    discrete_energy, discrete_energy_exact, min_separation, separate_thin,
};
use blockdist::generators::random_cube;
use blockdist::geometry::{sq_dist, PointSet};
use num_traits::ToPrimitive;

#[test]
fn float_energy_matches_exact_rational() {
    for seed in 0..10u64 {
        let n = 16 + (seed as usize % 4) * 16; // up to 64 points
        let e = random_cube(3, n, 40, seed).unwrap();
        for s in [2u32, 4, 6] {
            let exact = discrete_energy_exact(&e, s).unwrap();
            let exact_f = exact.to_f64().unwrap();
            let float = discrete_energy(&e, s as f64).unwrap().energy;
            let rel = (float - exact_f).abs() / exact_f;
            assert!(rel <= 1e-9, "seed {seed} s {s}: rel error {rel}");
        }
    }
}

#[test]
fn energy_is_monotone_in_s() {
    for seed in 0..50u64 {
        let d = 2 + (seed as usize % 3);
        let e = random_cube(d, 20, 30, seed).unwrap();
        let e1 = discrete_energy(&e, 1.0).unwrap().energy;
        let e2 = discrete_energy(&e, 2.0).unwrap().energy;
        let e3 = discrete_energy(&e, 3.0).unwrap().energy;
        assert!(e1 <= e2 + 1e-12 && e2 <= e3 + 1e-12, "seed {seed}");
    }
}

#[test]
fn energy_is_scale_invariant() {
    for seed in 0..10u64 {
        let e = random_cube(3, 30, 50, seed).unwrap();
        let scaled = PointSet::new(
            3,
            e.iter().map(|p| p.iter().map(|&c| c * 97).collect()).collect(),
        )
        .unwrap();
        for s in [1.0, 2.5, 3.0] {
            let a = discrete_energy(&e, s).unwrap().energy;
            let b = discrete_energy(&scaled, s).unwrap().energy;
            assert!(((a - b) / a).abs() <= 1e-12, "seed {seed} s {s}: {a} vs {b}");
        }
    }
}

#[test]
fn energy_deterministic_across_worker_counts() {
    let e = random_cube(4, 400, 100, 3).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| discrete_energy(&e, 2.7).unwrap().energy)
    };
    let a = run(1);
    let b = run(8);
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn thinned_set_satisfies_the_separation_floor() {
    for seed in 0..10u64 {
        let e = random_cube(2, 60, 25, seed).unwrap();
        let n = e.len() as f64;
        for s in [1.5, 2.0, 4.0] {
            let thin = separate_thin(&e, s).unwrap();
            let diam = e
                .iter()
                .flat_map(|x| e.iter().map(move |y| sq_dist(x, y).unwrap()))
                .max()
                .unwrap() as f64;
            let floor = n.powf(-2.0 / s);
            for i in 0..thin.kept.len() {
                for j in (i + 1)..thin.kept.len() {
                    let d = sq_dist(thin.kept.point(i), thin.kept.point(j)).unwrap() as f64;
                    assert!(d / diam >= floor, "seed {seed} s {s}");
                }
            }
        }
    }
}

#[test]
fn separated_families_keep_at_least_half() {
    // Grids are the canonical energy-bounded family: thinning at s below
    // the ambient dimension must keep at least half the points.
    for m in [3u64, 4, 5, 6] {
        let e = blockdist::generators::grid(3, m).unwrap();
        let thin = separate_thin(&e, 2.5).unwrap();
        assert!(
            thin.kept.len() * 2 >= e.len(),
            "grid side {m}: kept {}",
            thin.kept.len()
        );
    }
}

#[test]
fn min_separation_of_grid_family() {
    for (d, m) in [(2usize, 5u64), (3, 4), (4, 3)] {
        let e = blockdist::generators::grid(d, m).unwrap();
        let sep = min_separation(&e).unwrap();
        let expected = num_rational::Ratio::new(1i128, ((m - 1) * (m - 1)) as i128 * d as i128);
        assert_eq!(sep, expected);
    }
}
