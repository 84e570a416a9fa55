//! Brute-force oracles for the tuple-set engine: direct enumeration with
//! BTreeMaps, four-nested-loop quadruple counting, and materialized products.
//! The oracles only use `dist_tuple` / `sq_dist`; the engine's chunking,
//! packing, and merging are exercised against them.

use std::collections::BTreeMap;

use blockdist::bset::{
    b_set, b_set_product, cs_lower_bound, distance_classes, materialize_product,
    projection_bounds, quadruple_count, BsetOptions,
};
use blockdist::generators::{grid, random_cube};
use blockdist::geometry::{dist_tuple, sq_dist, Partition, PointSet};

fn brute_b_set(
    e: &PointSet,
    f: &PointSet,
    p: &Partition,
    include_diagonal: bool,
) -> BTreeMap<Vec<u128>, u64> {
    let mut out = BTreeMap::new();
    for x in e.iter() {
        for y in f.iter() {
            if !include_diagonal && x == y {
                continue;
            }
            let t = dist_tuple(x, y, p).unwrap();
            *out.entry(t.values().to_vec()).or_insert(0) += 1;
        }
    }
    out
}

fn stats_as_map(stats: &blockdist::bset::DistanceTupleStats) -> BTreeMap<Vec<u128>, u64> {
    stats
        .entries()
        .iter()
        .map(|(t, nu)| (t.values().to_vec(), *nu))
        .collect()
}

fn brute_quadruples(e: &PointSet, f: &PointSet) -> u128 {
    let mut q = 0u128;
    for x in e.iter() {
        for y in f.iter() {
            for xp in e.iter() {
                for yp in f.iter() {
                    if sq_dist(x, y).unwrap() == sq_dist(xp, yp).unwrap() {
                        q += 1;
                    }
                }
            }
        }
    }
    q
}

#[test]
fn engine_matches_brute_force_on_random_sets() {
    for (i, (d, n, parts)) in [
        (4usize, 40usize, vec![2usize, 2]),
        (5, 35, vec![2, 3]),
        (6, 30, vec![2, 2, 2]),
        (6, 25, vec![2, 4]),
        (7, 20, vec![3, 4]),
    ]
    .into_iter()
    .enumerate()
    {
        let p = Partition::new(parts).unwrap();
        let e = random_cube(d, n, 7, 100 + i as u64).unwrap();
        let f = random_cube(d, n / 2 + 1, 7, 200 + i as u64).unwrap();
        for include_diagonal in [true, false] {
            let opts = BsetOptions::with_diagonal(include_diagonal);
            let stats = b_set(&e, &f, &p, &opts).unwrap();
            assert_eq!(
                stats_as_map(&stats),
                brute_b_set(&e, &f, &p, include_diagonal),
                "case {i} diagonal={include_diagonal}"
            );
        }
    }
}

#[test]
fn sum_nu_identities() {
    for seed in 0..6u64 {
        let e = random_cube(4, 30, 5, seed).unwrap();
        let f = random_cube(4, 20, 5, seed + 50).unwrap();
        let p = Partition::new(vec![2, 2]).unwrap();
        let incl = b_set(&e, &f, &p, &BsetOptions::default()).unwrap();
        assert_eq!(incl.sum_nu(), incl.total_pairs());
        let excl = b_set(&e, &f, &p, &BsetOptions::with_diagonal(false)).unwrap();
        let shared = e.intersection_count(&f) as u128;
        assert_eq!(excl.sum_nu(), excl.total_pairs() - shared);

        let self_excl = b_set(&e, &e, &p, &BsetOptions::with_diagonal(false)).unwrap();
        let n = e.len() as u128;
        assert_eq!(self_excl.sum_nu(), n * n - n);
    }
}

#[test]
fn quadruple_count_matches_nested_loops() {
    for seed in 0..8u64 {
        let e = random_cube(3, 10, 4, seed).unwrap();
        let f = random_cube(3, 12, 4, seed + 30).unwrap();
        let q = quadruple_count(&e, &f).unwrap();
        assert_eq!(q.q_value, brute_quadruples(&e, &f));
        assert_eq!(
            q.q_value,
            q.class_sizes.iter().map(|&m| m as u128 * m as u128).sum::<u128>()
        );
    }
}

#[test]
fn cauchy_schwarz_holds_exactly() {
    for seed in 0..20u64 {
        let d = 2 + (seed as usize % 4);
        let e = random_cube(d, 60, 9, seed).unwrap();
        let f = random_cube(d, 45, 9, seed + 1000).unwrap();
        let q = quadruple_count(&e, &f).unwrap();
        let classes = distance_classes(&e, &f).unwrap().len() as u128;
        let pairs = e.len() as u128 * f.len() as u128;
        assert!(classes * q.q_value >= pairs * pairs, "seed {seed}");
        // the rational bound never exceeds the distinct count: numer/denom <= classes
        let bound = cs_lower_bound(&e, &f).unwrap();
        assert!(
            *bound.numer() as u128 <= classes * *bound.denom() as u128,
            "bound exceeds distinct count at seed {seed}"
        );
    }
}

#[test]
fn product_fast_path_equals_materialized_brute_force() {
    let cases: Vec<Vec<PointSet>> = vec![
        vec![
            random_cube(2, 8, 4, 7).unwrap(),
            random_cube(2, 9, 4, 8).unwrap(),
        ],
        vec![
            random_cube(2, 5, 3, 9).unwrap(),
            random_cube(3, 6, 3, 10).unwrap(),
        ],
        vec![
            random_cube(2, 4, 3, 11).unwrap(),
            random_cube(2, 4, 3, 12).unwrap(),
            random_cube(2, 4, 3, 13).unwrap(),
        ],
        vec![grid(2, 3).unwrap(), grid(2, 3).unwrap()],
    ];
    for (i, blocks) in cases.into_iter().enumerate() {
        for include_diagonal in [true, false] {
            let opts = BsetOptions::with_diagonal(include_diagonal);
            let fast = b_set_product(&blocks, &opts).unwrap();
            let materialized = materialize_product(&blocks).unwrap();
            let p = Partition::new(blocks.iter().map(|b| b.dim()).collect()).unwrap();
            let slow = b_set(&materialized, &materialized, &p, &opts).unwrap();
            assert_eq!(
                fast.entries(),
                slow.entries(),
                "case {i} diagonal={include_diagonal}"
            );
            assert_eq!(fast.total_pairs(), slow.total_pairs());
        }
    }
}

#[test]
fn grid_product_law() {
    // d=4 grids split as (2,2): tuple set is the square of the planar one.
    for m in [2u64, 3, 4] {
        let e = grid(4, m).unwrap();
        let p = Partition::new(vec![2, 2]).unwrap();
        let direct = b_set(&e, &e, &p, &BsetOptions::default()).unwrap();
        let block = grid(2, m).unwrap();
        let fast = b_set_product(&[block.clone(), block], &BsetOptions::default()).unwrap();
        assert_eq!(direct.entries(), fast.entries());
        let planar = distance_classes(&grid(2, m).unwrap(), &grid(2, m).unwrap()).unwrap();
        assert_eq!(direct.count(), planar.len() * planar.len());
    }
}

#[test]
fn monotone_under_inclusion() {
    let p = Partition::new(vec![2, 2]).unwrap();
    let big = random_cube(4, 50, 6, 42).unwrap();
    let small = PointSet::new(
        4,
        big.iter().take(20).map(|r| r.to_vec()).collect::<Vec<_>>(),
    )
    .unwrap();
    let sm = b_set(&small, &small, &p, &BsetOptions::default()).unwrap();
    let lg = b_set(&big, &big, &p, &BsetOptions::default()).unwrap();
    for (t, _) in sm.entries() {
        assert!(lg.nu(t).is_some(), "tuple {t} lost under inclusion");
    }
}

#[test]
fn projection_bound_holds() {
    for seed in 0..10u64 {
        let e = random_cube(5, 40, 6, seed).unwrap();
        let p = Partition::new(vec![2, 3]).unwrap();
        let pb = projection_bounds(&e, &p).unwrap();
        let stats = b_set(&e, &e, &p, &BsetOptions::default()).unwrap();
        assert!(stats.count() as u64 >= pb.bound, "seed {seed}");
        // componentwise: the set of block-i values equals the projected
        // distance set
        for (i, &ds) in pb.delta_sizes.iter().enumerate() {
            let mut vals: Vec<u128> = stats
                .entries()
                .iter()
                .map(|(t, _)| t.values()[i])
                .collect();
            vals.sort_unstable();
            vals.dedup();
            assert_eq!(vals.len() as u64, ds);
        }
    }
}

#[test]
fn identical_results_for_any_worker_count() {
    let e = random_cube(4, 300, 12, 5).unwrap();
    let p = Partition::new(vec![2, 2]).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| b_set(&e, &e, &p, &BsetOptions::default()).unwrap())
    };
    let one = run(1);
    let eight = run(8);
    assert_eq!(one.entries(), eight.entries());
    assert_eq!(
        serde_json::to_string(&one.to_json(10)).unwrap(),
        serde_json::to_string(&eight.to_json(10)).unwrap()
    );
}
