//! Scaling-family experiments: generate a ladder of instances, count tuple
//! sets, fit a log-log slope, and compare against the predicted exponents.
//!
//! Primary output (the JSON consumed downstream) is byte-identical across
//! runs and worker counts; wall-clock timings go to stderr only.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use blockdist::bset::{b_set, b_set_product, materialize_product, BsetOptions};
use blockdist::error::{Error, Result};
use blockdist::generators::GeneratorSpec;
use blockdist::geometry::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalConvention {
    /// Count every realized tuple (the raw set definition).
    Included,
    /// Count only tuples with all components nonzero: pairs that differ in
    /// every block, the distinct-distances convention taken blockwise.
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares on (ln n, ln count). Needs at least three strictly
/// positive measurements. A constant count gives slope 0 and r² = 1 by
/// convention (the fit is exact).
pub fn fit_exponent(measurements: &[(f64, f64)]) -> Result<FitResult> {
    if measurements.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 measurements to fit, got {}",
            measurements.len()
        )));
    }
    if measurements.iter().any(|&(n, b)| n <= 0.0 || b <= 0.0) {
        return Err(Error::InvalidInput(
            "log-log fit needs strictly positive measurements".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = measurements
        .iter()
        .map(|&(n, b)| (n.ln(), b.ln()))
        .collect();
    let k = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "all measurement sizes are equal; cannot fit a slope".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone)]
pub struct Measurement {
    /// Ladder value fed to the generator (side, count, or squared radius).
    pub size: u64,
    /// |E| of the generated instance.
    pub n: u64,
    pub b_count: u64,
    /// Side-channel timing; excluded from primary output.
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingRun {
    pub generator: GeneratorSpec,
    pub partition: Partition,
    pub diagonal: DiagonalConvention,
    pub two_set: bool,
    pub fast_path: bool,
    pub cross_validated: bool,
    pub measurements: Vec<Measurement>,
    pub truncated_sizes: Vec<u64>,
    pub fit: FitResult,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub diagonal: DiagonalConvention,
    pub pair_budget: u128,
    /// Print per-size progress to stderr.
    pub progress: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            diagonal: DiagonalConvention::Excluded,
            pair_budget: blockdist::bset::DEFAULT_PAIR_BUDGET,
            progress: false,
        }
    }
}

fn count_for(stats: &blockdist::bset::DistanceTupleStats, diagonal: DiagonalConvention) -> u64 {
    match diagonal {
        DiagonalConvention::Included => stats.count() as u64,
        DiagonalConvention::Excluded => stats.strictly_positive_count() as u64,
    }
}

/// Runs the ladder: builds each instance, counts its tuple set (product
/// evaluation for product-structured generators, cross-validated against
/// direct enumeration at the smallest size), and fits the log-log slope.
/// Over-budget sizes are skipped with a warning; fewer than three surviving
/// sizes is an error.
pub fn run_scaling(
    spec: &GeneratorSpec,
    partition: &Partition,
    ladder: &[u64],
    opts: &ScanOptions,
) -> Result<ScalingRun> {
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "ladder sizes must be strictly increasing".into(),
        ));
    }
    let bopts = BsetOptions {
        include_diagonal: true,
        pair_budget: opts.pair_budget,
    };
    let mut measurements = Vec::new();
    let mut truncated = Vec::new();
    let mut two_set = false;
    let mut fast_path = false;
    let mut cross_validated = false;
    for &size in ladder {
        let sized = spec.with_size(size);
        let built = sized.build()?;
        let n_e = built.e.len() as u128;
        let n_f = built.f.as_ref().map(|f| f.len() as u128).unwrap_or(n_e);
        let pairs = n_e * n_f;
        if pairs > opts.pair_budget {
            eprintln!(
                "warning: size {size} needs {pairs} pairs, over the budget {}; skipped",
                opts.pair_budget
            );
            truncated.push(size);
            continue;
        }
        let start = Instant::now();
        let stats = match &built.f {
            Some(f) => {
                two_set = true;
                b_set(&built.e, f, partition, &bopts)?
            }
            None => match sized.product_blocks(partition)? {
                Some(blocks) => {
                    fast_path = true;
                    let fast = b_set_product(&blocks, &bopts)?;
                    if measurements.is_empty() && built.e.len() <= 4096 {
                        let materialized = materialize_product(&blocks)?;
                        let direct = b_set(&materialized, &materialized, partition, &bopts)?;
                        if fast.entries() != direct.entries() {
                            return Err(Error::InvariantViolation(format!(
                                "product evaluation disagrees with direct enumeration at size {size}"
                            )));
                        }
                        cross_validated = true;
                    }
                    fast
                }
                None => b_set(&built.e, &built.e, partition, &bopts)?,
            },
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let b_count = count_for(&stats, opts.diagonal);
        if b_count == 0 {
            return Err(Error::InvalidInput(format!(
                "size {size}: zero tuples under the excluded-diagonal convention \
                 (every tuple has a zero component); rerun with the diagonal included"
            )));
        }
        if opts.progress {
            eprintln!(
                "size {size}: n={} pairs={pairs} b={b_count} ({:.1} ms)",
                built.e.len(),
                wall_ms
            );
        }
        measurements.push(Measurement {
            size,
            n: built.e.len() as u64,
            b_count,
            wall_ms,
        });
    }
    if measurements.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "only {} ladder sizes survived the pair budget; need at least 3",
            measurements.len()
        )));
    }
    if measurements.windows(2).any(|w| w[0].n >= w[1].n) {
        return Err(Error::InvalidInput(
            "instance sizes |E| are not strictly increasing along the ladder".into(),
        ));
    }
    let fit = fit_exponent(
        &measurements
            .iter()
            .map(|m| (m.n as f64, m.b_count as f64))
            .collect::<Vec<_>>(),
    )?;
    Ok(ScalingRun {
        generator: spec.clone(),
        partition: partition.clone(),
        diagonal: opts.diagonal,
        two_set,
        fast_path,
        cross_validated,
        measurements,
        truncated_sizes: truncated,
        fit,
    })
}

impl ScalingRun {
    /// Primary JSON output. Deliberately excludes wall-clock times so the
    /// bytes are reproducible.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "generator": self.generator,
            "partition": self.partition.parts(),
            "diagonal": self.diagonal,
            "two_set": self.two_set,
            "fast_path": self.fast_path,
            "cross_validated": self.cross_validated,
            "measurements": self.measurements.iter().map(|m| json!({
                "size": m.size,
                "n": m.n,
                "b_count": m.b_count,
            })).collect::<Vec<_>>(),
            "truncated_sizes": self.truncated_sizes,
            "fit": {
                "slope": self.fit.slope,
                "intercept": self.fit.intercept,
                "r_squared": self.fit.r_squared,
            },
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("size,n,b_count\n");
        for m in &self.measurements {
            s.push_str(&format!("{},{},{}\n", m.size, m.n, m.b_count));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_power_laws() {
        let fit = fit_exponent(&[(10.0, 100.0), (100.0, 1e4), (1000.0, 1e6)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let konst = fit_exponent(&[(10.0, 5.0), (100.0, 5.0), (1000.0, 5.0)]).unwrap();
        assert!(konst.slope.abs() < 1e-12);
        assert!((konst.r_squared - 1.0).abs() < 1e-12);

        assert!(fit_exponent(&[(10.0, 1.0), (20.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 0.0), (20.0, 2.0), (30.0, 3.0)]).is_err());
    }

    #[test]
    fn fit_slope_cube_law() {
        let pts: Vec<(f64, f64)> = (2..10).map(|k| {
            let n = (k * k) as f64;
            (n, 7.0 * n.powf(0.5))
        }).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_ladder_counts_match_product_squares() {
        let spec = GeneratorSpec::Grid { dim: 4, side: 3 };
        let p = Partition::new(vec![2, 2]).unwrap();
        let run = run_scaling(
            &spec,
            &p,
            &[3, 4, 5],
            &ScanOptions {
                diagonal: DiagonalConvention::Excluded,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(run.fast_path && run.cross_validated && !run.two_set);
        let counts: Vec<u64> = run.measurements.iter().map(|m| m.b_count).collect();
        assert_eq!(counts, vec![25, 81, 196]);

        let incl = run_scaling(
            &spec,
            &p,
            &[3, 4, 5],
            &ScanOptions {
                diagonal: DiagonalConvention::Included,
                ..Default::default()
            },
        )
        .unwrap();
        let counts_incl: Vec<u64> = incl.measurements.iter().map(|m| m.b_count).collect();
        assert_eq!(counts_incl, vec![36, 100, 225]);
    }

    #[test]
    fn sphere_ladder_is_flat() {
        let spec = GeneratorSpec::SpherePair {
            parts: vec![2, 2],
            radius_sq: 1,
        };
        let p = Partition::new(vec![2, 2]).unwrap();
        let run = run_scaling(
            &spec,
            &p,
            &[1, 25, 625],
            &ScanOptions {
                diagonal: DiagonalConvention::Included,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(run.two_set);
        assert!(run.measurements.iter().all(|m| m.b_count == 1));
        assert!(run.fit.slope.abs() < 1e-12);
    }

    #[test]
    fn budget_truncation_warns_then_errors_below_three() {
        let spec = GeneratorSpec::Grid { dim: 4, side: 3 };
        let p = Partition::new(vec![2, 2]).unwrap();
        let opts = ScanOptions {
            pair_budget: 90_000, // 3^8 = 6561, 4^8 = 65536, 5^8 too big
            ..Default::default()
        };
        let err = run_scaling(&spec, &p, &[3, 4, 5], &opts).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn subspace_excluded_convention_is_rejected_with_guidance() {
        let spec = GeneratorSpec::SubspaceEmbed {
            parts: vec![2, 3],
            side: 3,
            fixed: None,
        };
        let p = Partition::new(vec![2, 3]).unwrap();
        let err = run_scaling(&spec, &p, &[3, 4, 5], &ScanOptions::default()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("diagonal"), "unexpected message: {text}");
    }
}
