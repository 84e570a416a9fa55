//! Seeded invariant suite behind the `check` subcommand: every assertable
//! property from the library modules, run over reproducible corpora. A fixed
//! seed produces an identical report; failures set a nonzero exit.

use serde_json::json;

use blockdist::adaptability::{discrete_energy, min_separation, separate_thin};
use blockdist::bset::{
    b_set, b_set_product, cs_lower_bound, distance_classes, materialize_product, project_set,
    quadruple_count, BsetOptions,
};
use blockdist::exponents::{
    partitions_with_min_part_two, rat, tau, theta, theta_display, trivial_exponent_sv, zeta,
};
use blockdist::generators::{grid, lattice_sphere, random_cube, sphere_pair, GeneratorSpec};
use blockdist::geometry::{sq_dist, Partition, PointSet};
use blockdist::regularize::{extract_regular, rich_points, richness};

use crate::scaling::{fit_exponent, run_scaling, DiagonalConvention, ScanOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Report-only observation; never fails the suite.
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    pub details: String,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Fail)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            s.push_str(&format!("{:<4} {:<42} {}\n", o.status.as_str(), o.name, o.details));
        }
        let failed = self.outcomes.iter().filter(|o| o.status == Status::Fail).count();
        s.push_str(&format!(
            "{} checks, {} failed (seed {}, sizes {:?})\n",
            self.outcomes.len(),
            failed,
            self.seed,
            self.sizes
        ));
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "sizes": self.sizes,
            "all_passed": self.all_passed(),
            "checks": self.outcomes.iter().map(|o| json!({
                "name": o.name,
                "status": o.status.as_str(),
                "details": o.details,
            })).collect::<Vec<_>>(),
        })
    }
}

struct Suite {
    outcomes: Vec<CheckOutcome>,
}

impl Suite {
    fn record<F: FnOnce() -> Result<String, String>>(&mut self, name: &str, f: F) {
        let outcome = match f() {
            Ok(details) => CheckOutcome {
                name: name.to_string(),
                status: Status::Pass,
                details,
            },
            Err(details) => CheckOutcome {
                name: name.to_string(),
                status: Status::Fail,
                details,
            },
        };
        self.outcomes.push(outcome);
    }

    fn info(&mut self, name: &str, details: String) {
        self.outcomes.push(CheckOutcome {
            name: name.to_string(),
            status: Status::Info,
            details,
        });
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Runs the full invariant suite over corpora derived from `seed` at the
/// given instance sizes.
pub fn check_suite(seed: u64, sizes: &[usize]) -> CheckReport {
    let mut suite = Suite {
        outcomes: Vec::new(),
    };
    let sizes: Vec<usize> = if sizes.is_empty() {
        vec![40, 80, 160]
    } else {
        sizes.to_vec()
    };
    let partitions = [
        Partition::new(vec![2, 2]).unwrap(),
        Partition::new(vec![2, 3]).unwrap(),
        Partition::new(vec![2, 2, 2]).unwrap(),
    ];

    suite.record("pair-sum identity", || {
        let mut tested = 0;
        for (k, p) in partitions.iter().enumerate() {
            for (si, &n) in sizes.iter().enumerate() {
                let e = random_cube(p.dim(), n, 9, seed + (k * 31 + si) as u64)
                    .map_err(|e| e.to_string())?;
                let stats =
                    b_set(&e, &e, p, &BsetOptions::default()).map_err(|e| e.to_string())?;
                let n128 = e.len() as u128;
                require(stats.sum_nu() == n128 * n128, format!("{p} n={n}"))?;
                let excl = b_set(&e, &e, p, &BsetOptions::with_diagonal(false))
                    .map_err(|e| e.to_string())?;
                require(excl.sum_nu() == n128 * n128 - n128, format!("{p} n={n} excl"))?;
                tested += 1;
            }
        }
        Ok(format!("{tested} instances"))
    });

    suite.record("second-moment inequality (exact)", || {
        let mut tested = 0;
        for i in 0..30u64 {
            let d = 2 + (i as usize % 4);
            let n = sizes[i as usize % sizes.len()];
            let e = random_cube(d, n, 11, seed ^ (0x51ed + i)).map_err(|e| e.to_string())?;
            let f = random_cube(d, n / 2 + 1, 11, seed ^ (0xf00d + i)).map_err(|e| e.to_string())?;
            let q = quadruple_count(&e, &f).map_err(|e| e.to_string())?;
            let classes = distance_classes(&e, &f).map_err(|e| e.to_string())?.len() as u128;
            let pairs = e.len() as u128 * f.len() as u128;
            require(
                classes * q.q_value >= pairs * pairs,
                format!("instance {i}: {classes}·{} < {pairs}²", q.q_value),
            )?;
            let _ = cs_lower_bound(&e, &f).map_err(|e| e.to_string())?;
            tested += 1;
        }
        Ok(format!("{tested} instances"))
    });

    suite.record("quadruple count vs nested loops", || {
        for i in 0..10u64 {
            let e = random_cube(3, 11, 4, seed + 77 + i).map_err(|e| e.to_string())?;
            let f = random_cube(3, 9, 4, seed + 99 + i).map_err(|e| e.to_string())?;
            let q = quadruple_count(&e, &f).map_err(|e| e.to_string())?;
            let mut brute = 0u128;
            for x in e.iter() {
                for y in f.iter() {
                    for xp in e.iter() {
                        for yp in f.iter() {
                            if sq_dist(x, y).unwrap() == sq_dist(xp, yp).unwrap() {
                                brute += 1;
                            }
                        }
                    }
                }
            }
            require(q.q_value == brute, format!("instance {i}"))?;
        }
        Ok("10 instances, n <= 12".into())
    });

    suite.record("product evaluation vs direct enumeration", || {
        for i in 0..6u64 {
            let a = random_cube(2, 6, 4, seed + 1 + i).map_err(|e| e.to_string())?;
            let b = random_cube(2, 7, 4, seed + 2 + i).map_err(|e| e.to_string())?;
            let blocks = [a, b];
            for diag in [true, false] {
                let opts = BsetOptions::with_diagonal(diag);
                let fast = b_set_product(&blocks, &opts).map_err(|e| e.to_string())?;
                let m = materialize_product(&blocks).map_err(|e| e.to_string())?;
                let p = Partition::new(vec![2, 2]).unwrap();
                let slow = b_set(&m, &m, &p, &opts).map_err(|e| e.to_string())?;
                require(fast.entries() == slow.entries(), format!("instance {i}"))?;
            }
        }
        Ok("6 products, both conventions".into())
    });

    suite.record("monotone under inclusion", || {
        let p = &partitions[0];
        let big = random_cube(4, sizes[sizes.len() - 1], 8, seed + 1234).map_err(|e| e.to_string())?;
        let small = PointSet::new(
            4,
            big.iter().take(big.len() / 2).map(|r| r.to_vec()).collect(),
        )
        .map_err(|e| e.to_string())?;
        let sm = b_set(&small, &small, p, &BsetOptions::default()).map_err(|e| e.to_string())?;
        let lg = b_set(&big, &big, p, &BsetOptions::default()).map_err(|e| e.to_string())?;
        for (t, _) in sm.entries() {
            require(lg.nu(t).is_some(), format!("tuple {t} lost"))?;
        }
        Ok(format!("{} tuples preserved", sm.count()))
    });

    suite.record("projection lower bound", || {
        for (k, p) in partitions.iter().enumerate() {
            let e = random_cube(p.dim(), sizes[0], 7, seed + 555 + k as u64)
                .map_err(|e| e.to_string())?;
            let pb = blockdist::bset::projection_bounds(&e, p).map_err(|e| e.to_string())?;
            let stats = b_set(&e, &e, p, &BsetOptions::default()).map_err(|e| e.to_string())?;
            require(
                stats.count() as u64 >= pb.bound,
                format!("{p}: |B| {} < bound {}", stats.count(), pb.bound),
            )?;
        }
        Ok(format!("{} partitions", partitions.len()))
    });

    suite.record("worker-count determinism", || {
        let e = random_cube(4, sizes[sizes.len() - 1].min(300), 10, seed + 31)
            .map_err(|e| e.to_string())?;
        let p = &partitions[0];
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let stats = pool.install(|| b_set(&e, &e, p, &BsetOptions::default()));
            stats
                .map(|s| serde_json::to_string(&s.to_json(10)).unwrap())
                .map_err(|e| e.to_string())
        };
        let one = run(1)?;
        let eight = run(8)?;
        require(one == eight, "JSON differs between 1 and 8 workers")?;
        Ok("byte-identical JSON for 1 vs 8 workers".into())
    });

    suite.record("pigeonhole guarantee", || {
        let mut tested = 0;
        for (k, p) in partitions.iter().enumerate() {
            for (si, &n) in sizes.iter().enumerate() {
                let e = random_cube(p.dim(), n, 3, seed + (k * 7 + si) as u64)
                    .map_err(|e| e.to_string())?;
                for block in 0..p.num_blocks() {
                    let reg = extract_regular(&e, p, block).map_err(|e| e.to_string())?;
                    let n64 = e.len() as u64;
                    let classes = 64 - n64.leading_zeros() as u64;
                    require(
                        reg.points.len() as u64 * classes >= n64,
                        format!("{p} block {block}: |E'| {} too small", reg.points.len()),
                    )?;
                    let prof = richness(&reg.points, p, block).map_err(|e| e.to_string())?;
                    let mx = *prof.values.iter().max().unwrap();
                    let mn = *prof.values.iter().min().unwrap();
                    require(mx < 2 * mn, format!("{p} block {block}: ratio >= 2"))?;
                    let proj = project_set(&reg.points, p, block).map_err(|e| e.to_string())?;
                    let c = reg.class_bounds.0;
                    require(
                        proj.len() as u64 * c <= reg.points.len() as u64
                            && reg.points.len() as u64 <= proj.len() as u64 * 2 * c,
                        format!("{p} block {block}: reconstruction bound"),
                    )?;
                    tested += 1;
                }
            }
        }
        Ok(format!("{tested} extractions"))
    });

    suite.record("rich-point density inequality", || {
        let p = &partitions[2];
        let mut tested = 0;
        for &n in &sizes {
            let e = random_cube(p.dim(), n, 3, seed + n as u64).map_err(|e| e.to_string())?;
            for block in 0..p.num_blocks() {
                for alpha in [rat(1, 3), rat(1, 2), rat(2, 3), rat(1, 1)] {
                    let rp = rich_points(&e, p, block, alpha).map_err(|e| e.to_string())?;
                    let proj = project_set(&e, p, block).map_err(|e| e.to_string())?;
                    let rich: std::collections::HashSet<&[i64]> =
                        rp.projected.iter().map(|v| v.as_slice()).collect();
                    let r = p.block_range(block).unwrap();
                    let over_nonrich = e
                        .iter()
                        .filter(|x| !rich.contains(&x[r.clone()]))
                        .count() as u64;
                    require(
                        over_nonrich <= proj.len() as u64 * rp.threshold,
                        format!("block {block} alpha {alpha}"),
                    )?;
                    tested += 1;
                }
            }
        }
        Ok(format!("{tested} thresholds"))
    });

    suite.record("energy monotone and scale invariant", || {
        for i in 0..10u64 {
            let e = random_cube(3, sizes[0], 25, seed + 404 + i).map_err(|e| e.to_string())?;
            let e1 = discrete_energy(&e, 1.0).map_err(|e| e.to_string())?.energy;
            let e2 = discrete_energy(&e, 2.0).map_err(|e| e.to_string())?.energy;
            let e3 = discrete_energy(&e, 3.0).map_err(|e| e.to_string())?.energy;
            require(e1 <= e2 + 1e-12 && e2 <= e3 + 1e-12, format!("instance {i} not monotone"))?;
            let scaled = PointSet::new(
                3,
                e.iter().map(|p| p.iter().map(|&c| c * 13).collect()).collect(),
            )
            .map_err(|e| e.to_string())?;
            let b2 = discrete_energy(&scaled, 2.0).map_err(|e| e.to_string())?.energy;
            require(
                ((e2 - b2) / e2).abs() <= 1e-12,
                format!("instance {i} not scale invariant"),
            )?;
        }
        Ok("10 instances, s in {1,2,3}".into())
    });

    suite.record("thinning separation floor", || {
        for i in 0..5u64 {
            let e = random_cube(2, sizes[0], 20, seed + 606 + i).map_err(|e| e.to_string())?;
            let s = 2.0;
            let thin = separate_thin(&e, s).map_err(|e| e.to_string())?;
            let diam = blockdist::adaptability::diameter_sq(&e) as f64;
            let floor = (e.len() as f64).powf(-2.0 / s);
            for a in 0..thin.kept.len() {
                for b in (a + 1)..thin.kept.len() {
                    let d = sq_dist(thin.kept.point(a), thin.kept.point(b)).unwrap() as f64;
                    require(d / diam >= floor, format!("instance {i}: pair under floor"))?;
                }
            }
            let _ = min_separation(&e).map_err(|e| e.to_string())?;
        }
        Ok("5 instances".into())
    });

    suite.record("sphere-pair degeneracy", || {
        for (parts, r) in [(vec![2usize, 2], 25u64), (vec![2, 3], 25), (vec![3, 3], 9)] {
            let p = Partition::new(parts).unwrap();
            let (e, f) = sphere_pair(&p, r).map_err(|e| e.to_string())?;
            let stats = b_set(&e, &f, &p, &BsetOptions::default()).map_err(|e| e.to_string())?;
            require(stats.count() == 1, format!("{p} r={r}: |B| = {}", stats.count()))?;
            require(
                stats.entries()[0].0.values() == [r as u128, r as u128],
                format!("{p} r={r}: wrong tuple"),
            )?;
        }
        Ok("3 configurations".into())
    });

    suite.record("lattice spheres vs representation formulas", || {
        // r2(n) = 4(d1(n) − d3(n)) spot-checked over a seeded sample.
        let mut rng = blockdist::generators::SplitMix64::new(seed ^ 0xabcd);
        for _ in 0..40 {
            let r = 1 + rng.below(5000);
            let got = lattice_sphere(2, r).map_err(|e| e.to_string())?.len() as i64;
            let mut d1 = 0i64;
            let mut d3 = 0i64;
            for d in 1..=r {
                if r.is_multiple_of(d) {
                    match d % 4 {
                        1 => d1 += 1,
                        3 => d3 += 1,
                        _ => {}
                    }
                }
            }
            require(got == 4 * (d1 - d3), format!("r2({r}) = {got}"))?;
        }
        Ok("40 sampled radii".into())
    });

    suite.record("grid product law", || {
        for m in [2u64, 3, 4] {
            let e = grid(4, m).map_err(|e| e.to_string())?;
            let p = &partitions[0];
            let direct = b_set(&e, &e, p, &BsetOptions::default()).map_err(|e| e.to_string())?;
            let block = grid(2, m).map_err(|e| e.to_string())?;
            let fast = b_set_product(&[block.clone(), block], &BsetOptions::default())
                .map_err(|e| e.to_string())?;
            require(direct.entries() == fast.entries(), format!("side {m}"))?;
        }
        Ok("sides 2..4".into())
    });

    suite.record("exponent structure", || {
        for d in 4..=40 {
            for p in partitions_with_min_part_two(d) {
                let t = tau(&p).map_err(|e| e.to_string())?;
                let baseline = trivial_exponent_sv(&p).map_err(|e| e.to_string())?;
                require(t.tau > baseline, format!("{p}: tau <= baseline"))?;
            }
        }
        let t = theta(3, rat(1, 4)).map_err(|e| e.to_string())?;
        let disp = theta_display(3).map_err(|e| e.to_string())?;
        require(
            t.theta == rat(5, 14) && disp == rat(14, 39) && t.theta != disp,
            "all-twos discrepancy flag did not fire at q = 3",
        )?;
        for k in 3..100 {
            require(zeta(k).map_err(|e| e.to_string())? >= rat(13, 14), format!("zeta({k})"))?;
        }
        Ok("partitions d <= 40, discrepancy flag, zeta floor".into())
    });

    suite.record("fit recovers exact power laws", || {
        let fit = fit_exponent(&[(10.0, 100.0), (100.0, 1e4), (1000.0, 1e6)])
            .map_err(|e| e.to_string())?;
        require((fit.slope - 2.0).abs() < 1e-12, format!("slope {}", fit.slope))?;
        let run = run_scaling(
            &GeneratorSpec::Grid { dim: 4, side: 3 },
            &partitions[0],
            &[3, 4, 5],
            &ScanOptions {
                diagonal: DiagonalConvention::Included,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        require(run.cross_validated, "fast path not cross-validated")?;
        Ok("exact slope and cross-validated pipeline".into())
    });

    // Report-only: multiplicity ceiling from the unit-distance bound. The
    // hidden constant is unknown, so this can only be informative.
    {
        let p = Partition::new(vec![2, 2]).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..10u64 {
            let e = match random_cube(4, sizes[0], 6, seed + 900 + i) {
                Ok(e) => e,
                Err(_) => continue,
            };
            if let (Ok(stats), Ok(pb)) = (
                b_set(&e, &e, &p, &BsetOptions::default()),
                blockdist::bset::projection_bounds(&e, &p),
            ) {
                let cap =
                    (pb.projected_sizes[0] as f64 * pb.projected_sizes[1] as f64).powf(4.0 / 3.0);
                worst = worst.max(stats.max_nu() as f64 / cap);
            }
        }
        suite.info(
            "multiplicity vs unit-distance ceiling",
            format!(
                "max nu / (|pi1||pi2|)^(4/3) = {worst:.4} over 10 instances (<= 10 expected; report-only)"
            ),
        );
    }

    CheckReport {
        seed,
        sizes,
        outcomes: suite.outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_and_is_reproducible() {
        let a = check_suite(1, &[30, 60]);
        assert!(a.all_passed(), "\n{}", a.render());
        let b = check_suite(1, &[30, 60]);
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
        assert!(a.outcomes.iter().any(|o| o.status == Status::Info));
    }
}
