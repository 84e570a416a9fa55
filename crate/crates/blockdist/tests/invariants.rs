//! Property tests for the structural invariants: tuple symmetries, fiber
//! identities, pigeonhole guarantees, and the density-count inequality.

use proptest::prelude::*;

use blockdist::bset::{b_set, BsetOptions};
use blockdist::geometry::{dist_tuple, Partition, PointSet};
use blockdist::regularize::{dyadic_classes, extract_regular, rich_points, richness};
use num_rational::Ratio;

fn arb_partition() -> impl Strategy<Value = Partition> {
    prop_oneof![
        Just(Partition::new(vec![2, 2]).unwrap()),
        Just(Partition::new(vec![2, 3]).unwrap()),
        Just(Partition::new(vec![2, 2, 2]).unwrap()),
        Just(Partition::new(vec![3, 3]).unwrap()),
        Just(Partition::new(vec![2, 4]).unwrap()),
    ]
}

fn arb_points(dim: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::hash_set(prop::collection::vec(-8i64..=8, dim), 1..=max_n)
        .prop_map(|s| s.into_iter().collect())
}

fn arb_instance() -> impl Strategy<Value = (Partition, PointSet)> {
    arb_partition().prop_flat_map(|p| {
        let dim = p.dim();
        arb_points(dim, 28).prop_map(move |pts| {
            let set = PointSet::new(dim, pts).unwrap();
            (p.clone(), set)
        })
    })
}

proptest! {
    #[test]
    fn tuple_symmetry_translation_and_block_permutation(
        (p, e) in arb_instance(),
        shift in prop::collection::vec(-50i64..=50, 8),
    ) {
        let dim = p.dim();
        let v = &shift[..dim];
        for x in e.iter().take(6) {
            for y in e.iter().take(6) {
                let t = dist_tuple(x, y, &p).unwrap();
                // symmetry
                prop_assert_eq!(&t, &dist_tuple(y, x, &p).unwrap());
                // translation invariance
                let xs: Vec<i64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
                let ys: Vec<i64> = y.iter().zip(v).map(|(a, b)| a + b).collect();
                prop_assert_eq!(&t, &dist_tuple(&xs, &ys, &p).unwrap());
                // permuting coordinates inside block 0 leaves the tuple alone
                let r = p.block_range(0).unwrap();
                let mut xp = x.to_vec();
                let mut yp = y.to_vec();
                xp[r.clone()].reverse();
                yp[r].reverse();
                prop_assert_eq!(&t, &dist_tuple(&xp, &yp, &p).unwrap());
            }
        }
    }

    #[test]
    fn nu_partitions_all_pairs((p, e) in arb_instance()) {
        let stats = b_set(&e, &e, &p, &BsetOptions::default()).unwrap();
        prop_assert_eq!(stats.sum_nu(), (e.len() as u128) * (e.len() as u128));
        let excl = b_set(&e, &e, &p, &BsetOptions::with_diagonal(false)).unwrap();
        let n = e.len() as u128;
        prop_assert_eq!(excl.sum_nu(), n * n - n);
    }

    #[test]
    fn fiber_size_equals_complementary_image((p, e) in arb_instance()) {
        for block in 0..p.num_blocks() {
            let prof = richness(&e, &p, block).unwrap();
            let r = p.block_range(block).unwrap();
            for (i, x) in e.iter().enumerate() {
                // complementary-coordinate image of the fiber through x
                let mut images: Vec<Vec<i64>> = e
                    .iter()
                    .filter(|y| y[r.clone()] == x[r.clone()])
                    .map(|y| {
                        y.iter()
                            .enumerate()
                            .filter(|(j, _)| !r.contains(j))
                            .map(|(_, &c)| c)
                            .collect()
                    })
                    .collect();
                images.sort_unstable();
                images.dedup();
                prop_assert_eq!(prof.values[i], images.len() as u64);
            }
        }
    }

    #[test]
    fn pigeonhole_guarantee_and_closure((p, e) in arb_instance()) {
        for block in 0..p.num_blocks() {
            let reg = extract_regular(&e, &p, block).unwrap();
            let n = e.len() as u64;
            let log_classes = 64 - n.leading_zeros() as u64; // ⌊log₂ n⌋ + 1
            prop_assert!(reg.points.len() as u64 * log_classes >= n);

            // richness inside the class stays within a factor two
            let prof = richness(&reg.points, &p, block).unwrap();
            let max = prof.values.iter().max().unwrap();
            let min = prof.values.iter().min().unwrap();
            prop_assert!(max < &(2 * min));

            // fibers are never split: richness computed inside the subset
            // agrees with richness inherited from E
            let orig = richness(&e, &p, block).unwrap();
            let kept: std::collections::HashSet<&[i64]> = reg.points.iter().collect();
            for (i, x) in e.iter().enumerate() {
                if kept.contains(x) {
                    let j = reg.points.iter().position(|y| y == x).unwrap();
                    prop_assert_eq!(orig.values[i], prof.values[j]);
                }
            }

            // two-sided reconstruction: |π(E')|·c ≤ |E'| ≤ |π(E')|·2c
            let proj = blockdist::bset::project_set(&reg.points, &p, block).unwrap();
            let c = reg.class_bounds.0;
            prop_assert!(proj.len() as u64 * c <= reg.points.len() as u64);
            prop_assert!(reg.points.len() as u64 <= proj.len() as u64 * 2 * c);
        }
    }

    #[test]
    fn rich_point_density_inequality((p, e) in arb_instance(), num in 1i64..=12) {
        let q = p.num_blocks() as i64;
        // alpha in [1/q, 1] on a rational grid
        let alpha = Ratio::new(1, q) + Ratio::new(num, 12) * (Ratio::from_integer(1) - Ratio::new(1, q));
        for block in 0..p.num_blocks() {
            let rp = rich_points(&e, &p, block, alpha).unwrap();
            let proj = blockdist::bset::project_set(&e, &p, block).unwrap();
            // points lying over non-rich projected values are fewer than
            // |π(E)| · threshold
            let prof = richness(&e, &p, block).unwrap();
            let over_nonrich: u64 = {
                let rich: std::collections::HashSet<&[i64]> =
                    rp.projected.iter().map(|v| v.as_slice()).collect();
                let r = p.block_range(block).unwrap();
                e.iter()
                    .filter(|x| !rich.contains(&x[r.clone()]))
                    .count() as u64
            };
            let _ = &prof;
            prop_assert!(over_nonrich <= proj.len() as u64 * rp.threshold);
        }
    }

    #[test]
    fn dyadic_classes_partition_indices(values in prop::collection::vec(1u64..=1_000_000, 1..200)) {
        let classes = dyadic_classes(&values).unwrap();
        let mut seen = vec![false; values.len()];
        for c in &classes {
            prop_assert_eq!(c.high, c.low * 2);
            for &i in &c.indices {
                prop_assert!(!seen[i]);
                seen[i] = true;
                prop_assert!(values[i] >= c.low && values[i] < c.high);
            }
        }
        prop_assert!(seen.into_iter().all(|b| b));
        let max = *values.iter().max().unwrap();
        let bound = (64 - max.leading_zeros()) as usize; // ⌊log₂ max⌋ + 1
        prop_assert!(classes.len() <= bound);
        let largest = classes.iter().map(|c| c.indices.len()).max().unwrap();
        prop_assert!(largest * bound >= values.len());
    }

    #[test]
    fn point_file_round_trip(pts in arb_points(3, 24)) {
        let set = PointSet::new(3, pts).unwrap();
        let mut buf = Vec::new();
        set.write_to(&mut buf).unwrap();
        let back = PointSet::read_from(&mut std::io::Cursor::new(&buf)).unwrap();
        prop_assert_eq!(&back, &set);
        let mut buf2 = Vec::new();
        back.write_to(&mut buf2).unwrap();
        prop_assert_eq!(buf, buf2);
    }
}
