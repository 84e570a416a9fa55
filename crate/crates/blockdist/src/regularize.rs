//! Richness profiles, dyadic pigeonholing, and the extraction of
//! richness-regular subsets and rich projected points.
//!
//! The richness of a point is the size of the fiber of its block projection:
//! how many set points share its block-i coordinates. Because points are
//! distinct, a fiber maps injectively to the complementary coordinates, so
//! fiber size equals the cardinality of the complementary-projection image.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::{Partition, PointSet};

/// Per-point fiber sizes for one block projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RichnessProfile {
    pub block: usize,
    /// values[i] = size of the fiber containing point i.
    pub values: Vec<u64>,
    pub max_value: u64,
}

impl RichnessProfile {
    /// Histogram rows (class_low, class_high, fiber_count, point_count) over
    /// the dyadic classes [2^j, 2^{j+1}).
    pub fn histogram(&self, e: &PointSet, p: &Partition) -> Result<Vec<HistogramRow>> {
        let fibers = fiber_map(e, p, self.block)?;
        let mut rows: FxHashMap<u32, (u64, u64)> = FxHashMap::default();
        for members in fibers.values() {
            let size = members.len() as u64;
            let class = 63 - size.leading_zeros();
            let row = rows.entry(class).or_insert((0, 0));
            row.0 += 1;
            row.1 += size;
        }
        let mut out: Vec<HistogramRow> = rows
            .into_iter()
            .map(|(j, (fiber_count, point_count))| HistogramRow {
                class_low: 1u64 << j,
                class_high: 1u64 << (j + 1),
                fiber_count,
                point_count,
            })
            .collect();
        out.sort_unstable_by_key(|r| r.class_low);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramRow {
    pub class_low: u64,
    /// Exclusive upper end of the class.
    pub class_high: u64,
    pub fiber_count: u64,
    pub point_count: u64,
}

/// A fiber-closed subset whose richness values all lie in [c, 2c).
#[derive(Debug, Clone)]
pub struct RegularSubset {
    pub points: PointSet,
    /// Class representative c.
    pub richness_level: u64,
    /// Half-open richness bounds [c, 2c).
    pub class_bounds: (u64, u64),
}

/// One dyadic class: indices whose values lie in [2^j, 2^{j+1}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicClass {
    pub low: u64,
    /// Exclusive upper end (2 · low).
    pub high: u64,
    pub indices: Vec<usize>,
}

fn fiber_map<'a>(
    e: &'a PointSet,
    p: &Partition,
    block: usize,
) -> Result<FxHashMap<&'a [i64], Vec<usize>>> {
    p.check_dim(e)?;
    let r = p.block_range(block)?;
    let mut fibers: FxHashMap<&[i64], Vec<usize>> = FxHashMap::default();
    for (i, pt) in e.iter().enumerate() {
        fibers.entry(&pt[r.clone()]).or_default().push(i);
    }
    Ok(fibers)
}

/// Fiber size of every point under the block-`block` projection.
pub fn richness(e: &PointSet, p: &Partition, block: usize) -> Result<RichnessProfile> {
    let fibers = fiber_map(e, p, block)?;
    let mut values = vec![0u64; e.len()];
    for members in fibers.values() {
        for &i in members {
            values[i] = members.len() as u64;
        }
    }
    let max_value = values.iter().copied().max().unwrap_or(0);
    Ok(RichnessProfile {
        block,
        values,
        max_value,
    })
}

/// Bins positive values into dyadic classes [2^j, 2^{j+1}). The classes are
/// disjoint, cover all indices, and there are at most ⌊log₂ max⌋ + 1 of
/// them, so the largest holds at least N / (⌊log₂ max⌋ + 1) indices.
pub fn dyadic_classes(values: &[u64]) -> Result<Vec<DyadicClass>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("dyadic classes of an empty list".into()));
    }
    if values.contains(&0) {
        return Err(Error::InvalidInput(
            "dyadic classes need strictly positive values".into(),
        ));
    }
    let mut classes: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
    for (i, &v) in values.iter().enumerate() {
        classes.entry(63 - v.leading_zeros()).or_default().push(i);
    }
    let mut out: Vec<DyadicClass> = classes
        .into_iter()
        .map(|(j, indices)| DyadicClass {
            low: 1u64 << j,
            high: 1u64 << (j + 1),
            indices,
        })
        .collect();
    out.sort_unstable_by_key(|c| c.low);
    Ok(out)
}

/// Pigeonholes E by block richness and keeps the most populous dyadic class
/// (ties: lowest richness). The result is fiber-closed, its richness ratio is
/// below 2, and it retains at least |E| / (⌊log₂|E|⌋ + 1) points.
pub fn extract_regular(e: &PointSet, p: &Partition, block: usize) -> Result<RegularSubset> {
    if e.is_empty() {
        return Err(Error::InvalidInput(
            "cannot extract a regular subset of an empty set".into(),
        ));
    }
    let profile = richness(e, p, block)?;
    let classes = dyadic_classes(&profile.values)?;
    let best = classes
        .iter()
        .max_by(|a, b| {
            a.indices
                .len()
                .cmp(&b.indices.len())
                .then(b.low.cmp(&a.low))
        })
        .expect("at least one class");
    let mut idx = best.indices.clone();
    idx.sort_unstable();
    let dim = e.dim();
    let mut coords = Vec::with_capacity(idx.len() * dim);
    for &i in &idx {
        coords.extend_from_slice(e.point(i));
    }
    Ok(RegularSubset {
        points: PointSet::from_flat(dim, coords)?,
        richness_level: best.low,
        class_bounds: (best.low, best.high),
    })
}

/// Projected points whose fiber size reaches the density threshold
/// ⌊n^(1−(q−1)α)⌋ (floored, at least 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RichPoints {
    pub block: usize,
    pub threshold: u64,
    /// The rich projected points, sorted.
    pub projected: Vec<Vec<i64>>,
}

impl RichPoints {
    pub fn count(&self) -> usize {
        self.projected.len()
    }
}

/// Exact integer threshold ⌊n^(num/den)⌋ via big-integer powers and roots.
fn floor_pow(n: u64, num: i64, den: i64) -> u64 {
    debug_assert!(den > 0);
    if n == 0 {
        return 0;
    }
    if num <= 0 {
        return 1; // n^0 = 1; negative exponents floor below 1
    }
    let v = BigUint::from(n).pow(num as u32).nth_root(den as u32);
    v.to_u64().unwrap_or(u64::MAX)
}

/// Rich projected points of block `block` at density parameter α ∈ [1/q, 1].
pub fn rich_points(
    e: &PointSet,
    p: &Partition,
    block: usize,
    alpha: Ratio<i64>,
) -> Result<RichPoints> {
    let q = p.num_blocks() as i64;
    if alpha < Ratio::new(1, q) || alpha > Ratio::from_integer(1) {
        return Err(Error::InvalidInput(format!(
            "alpha {alpha} outside [1/{q}, 1]"
        )));
    }
    let fibers = fiber_map(e, p, block)?;
    // exponent 1 − (q−1)α as a reduced fraction
    let exp = Ratio::from_integer(1) - Ratio::from_integer(q - 1) * alpha;
    let threshold = floor_pow(e.len() as u64, *exp.numer(), *exp.denom()).max(1);
    let mut projected: Vec<Vec<i64>> = fibers
        .iter()
        .filter(|(_, members)| members.len() as u64 >= threshold)
        .map(|(key, _)| key.to_vec())
        .collect();
    projected.sort_unstable();
    Ok(RichPoints {
        block,
        threshold,
        projected,
    })
}
