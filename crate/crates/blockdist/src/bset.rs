//! Enumeration of block-distance tuple sets over pairs of point sets:
//! the tuple set itself, ordered-pair multiplicities, quadruple counts,
//! the exact second-moment lower bound, and per-block projection bounds.
//!
//! Pairs are enumerated in fixed row chunks; each chunk produces a local
//! multiplicity map and maps are merged by integer addition, so the result
//! is identical for any worker count. Final output is always sorted.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{sq_dist_unchecked, DistanceTuple, Partition, PointSet};

/// Default ceiling on |E|·|F|; instances above it are refused instead of
/// thrashing.
pub const DEFAULT_PAIR_BUDGET: u128 = 2_000_000_000;

const TARGET_CHUNK_PAIRS: usize = 1 << 21;

#[derive(Debug, Clone)]
pub struct BsetOptions {
    /// Keep pairs with x = y. The set definition ranges over all ordered
    /// pairs, so this defaults to true; turning it off drops exactly the
    /// pairs x = y (equivalently the all-zero tuple's diagonal mass).
    pub include_diagonal: bool,
    pub pair_budget: u128,
}

impl Default for BsetOptions {
    fn default() -> Self {
        BsetOptions {
            include_diagonal: true,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

impl BsetOptions {
    pub fn with_diagonal(include_diagonal: bool) -> Self {
        BsetOptions {
            include_diagonal,
            ..Default::default()
        }
    }
}

/// The distance-tuple set of a pair of point sets, with ordered-pair
/// multiplicities. Entries are sorted lexicographically by tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTupleStats {
    partition: Partition,
    entries: Vec<(DistanceTuple, u64)>,
    total_pairs: u128,
    includes_diagonal: bool,
}

impl DistanceTupleStats {
    /// Number of distinct tuples.
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    /// Number of tuples with every component nonzero, i.e. realized by pairs
    /// that differ in every block. This is the distinct-distances counting
    /// convention generalized blockwise; for q = 1 it is |Δ| minus the zero
    /// distance.
    pub fn strictly_positive_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|(t, _)| t.is_strictly_positive())
            .count()
    }

    pub fn entries(&self) -> &[(DistanceTuple, u64)] {
        &self.entries
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn total_pairs(&self) -> u128 {
        self.total_pairs
    }

    pub fn includes_diagonal(&self) -> bool {
        self.includes_diagonal
    }

    pub fn nu(&self, t: &DistanceTuple) -> Option<u64> {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(t))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn sum_nu(&self) -> u128 {
        self.entries.iter().map(|&(_, nu)| nu as u128).sum()
    }

    pub fn max_nu(&self) -> u64 {
        self.entries.iter().map(|&(_, nu)| nu).max().unwrap_or(0)
    }

    /// JSON summary: tuple count, total pairs, and the `top` largest
    /// multiplicities (ties broken by tuple order, so output is stable).
    pub fn to_json(&self, top: usize) -> serde_json::Value {
        let mut by_nu: Vec<&(DistanceTuple, u64)> = self.entries.iter().collect();
        by_nu.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let top_multiplicities: Vec<serde_json::Value> = by_nu
            .iter()
            .take(top)
            .map(|(t, nu)| json!([t.values(), nu]))
            .collect();
        json!({
            "partition": self.partition.parts(),
            "count": self.count(),
            "total_pairs": self.total_pairs,
            "includes_diagonal": self.includes_diagonal,
            "top_multiplicities": top_multiplicities,
        })
    }

    /// Full dump, one tuple per row, multiplicity in the last column.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        for i in 0..self.partition.num_blocks() {
            if i > 0 {
                write!(w, ",")?;
            }
            write!(w, "d{}", i + 1)?;
        }
        writeln!(w, ",nu")?;
        let mut line = String::new();
        for (t, nu) in &self.entries {
            line.clear();
            for v in t.values() {
                line.push_str(&v.to_string());
                line.push(',');
            }
            line.push_str(&nu.to_string());
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Block layout used by the packed enumerator: coordinate range plus the
/// key width in bits for that block's squared distances.
struct BlockSpec {
    range: std::ops::Range<usize>,
    width: u32,
}

/// Per-block upper bound on the squared distance between any x ∈ E, y ∈ F,
/// from coordinate-wise ranges over E ∪ F. The construction bound keeps the
/// sum inside u128.
fn block_value_bounds(e: &PointSet, f: &PointSet, ranges: &[std::ops::Range<usize>]) -> Vec<u128> {
    let dim = e.dim();
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for set in [e, f] {
        for p in set.iter() {
            for j in 0..dim {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
    }
    ranges
        .iter()
        .map(|r| {
            r.clone()
                .map(|j| {
                    if hi[j] < lo[j] {
                        0u128
                    } else {
                        let d = (hi[j] as i128 - lo[j] as i128) as u128;
                        d * d
                    }
                })
                .sum()
        })
        .collect()
}

fn bits_for(bound: u128) -> u32 {
    128 - bound.leading_zeros()
}

fn merge_maps<K: std::hash::Hash + Eq>(
    mut a: FxHashMap<K, u64>,
    mut b: FxHashMap<K, u64>,
) -> FxHashMap<K, u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn row_chunks(n_e: usize, n_f: usize) -> Vec<std::ops::Range<usize>> {
    let rows = (TARGET_CHUNK_PAIRS / n_f.max(1)).max(1);
    (0..n_e)
        .step_by(rows)
        .map(|start| start..(start + rows).min(n_e))
        .collect()
}

/// Packed path: all q squared distances fit in one u128 key. Key order
/// equals lexicographic tuple order because blocks pack high-to-low.
fn enumerate_packed(
    e: &PointSet,
    f: &PointSet,
    specs: &[BlockSpec],
    include_diagonal: bool,
) -> Vec<(u128, u64)> {
    let map = row_chunks(e.len(), f.len())
        .into_par_iter()
        .map(|rows| {
            let mut local: FxHashMap<u128, u64> = FxHashMap::default();
            for xi in rows {
                let x = e.point(xi);
                for yi in 0..f.len() {
                    let y = f.point(yi);
                    let mut key: u128 = 0;
                    for spec in specs {
                        let d = sq_dist_unchecked(&x[spec.range.clone()], &y[spec.range.clone()]);
                        key = (key << spec.width) | d;
                    }
                    if !include_diagonal && key == 0 {
                        continue;
                    }
                    *local.entry(key).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(FxHashMap::default, merge_maps);
    let mut entries: Vec<(u128, u64)> = map.into_iter().collect();
    entries.par_sort_unstable_by_key(|&(k, _)| k);
    entries
}

/// Fallback for coordinate ranges too wide to pack q block distances into
/// 128 bits.
fn enumerate_wide(
    e: &PointSet,
    f: &PointSet,
    ranges: &[std::ops::Range<usize>],
    include_diagonal: bool,
) -> Vec<(Vec<u128>, u64)> {
    let map = row_chunks(e.len(), f.len())
        .into_par_iter()
        .map(|rows| {
            let mut local: FxHashMap<Vec<u128>, u64> = FxHashMap::default();
            for xi in rows {
                let x = e.point(xi);
                for yi in 0..f.len() {
                    let y = f.point(yi);
                    let tuple: Vec<u128> = ranges
                        .iter()
                        .map(|r| sq_dist_unchecked(&x[r.clone()], &y[r.clone()]))
                        .collect();
                    if !include_diagonal && tuple.iter().all(|&v| v == 0) {
                        continue;
                    }
                    *local.entry(tuple).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(FxHashMap::default, merge_maps);
    let mut entries: Vec<(Vec<u128>, u64)> = map.into_iter().collect();
    entries.par_sort_unstable();
    entries
}

fn enumerate_tuples(
    e: &PointSet,
    f: &PointSet,
    ranges: &[std::ops::Range<usize>],
    include_diagonal: bool,
) -> Vec<(DistanceTuple, u64)> {
    let bounds = block_value_bounds(e, f, ranges);
    let widths: Vec<u32> = bounds.iter().map(|&b| bits_for(b)).collect();
    let total_width: u32 = widths.iter().sum();
    if total_width <= 128 {
        let specs: Vec<BlockSpec> = ranges
            .iter()
            .zip(&widths)
            .map(|(r, &w)| BlockSpec {
                range: r.clone(),
                width: w,
            })
            .collect();
        enumerate_packed(e, f, &specs, include_diagonal)
            .into_iter()
            .map(|(key, nu)| (unpack(key, &widths), nu))
            .collect()
    } else {
        enumerate_wide(e, f, ranges, include_diagonal)
            .into_iter()
            .map(|(t, nu)| (DistanceTuple(t), nu))
            .collect()
    }
}

fn unpack(key: u128, widths: &[u32]) -> DistanceTuple {
    let mut values = vec![0u128; widths.len()];
    let mut k = key;
    for (i, &w) in widths.iter().enumerate().rev() {
        if w == 0 {
            values[i] = 0;
        } else if w >= 128 {
            values[i] = k;
            k = 0;
        } else {
            values[i] = k & ((1u128 << w) - 1);
            k >>= w;
        }
    }
    DistanceTuple(values)
}

fn check_budget(e: &PointSet, f: &PointSet, budget: u128) -> Result<u128> {
    let pairs = e.len() as u128 * f.len() as u128;
    if pairs > budget {
        return Err(Error::PairBudgetExceeded { pairs, budget });
    }
    Ok(pairs)
}

/// Distance-tuple set of E × F under partition `p`, with ordered-pair
/// multiplicities. Content is deterministic for any worker count.
pub fn b_set(
    e: &PointSet,
    f: &PointSet,
    p: &Partition,
    opts: &BsetOptions,
) -> Result<DistanceTupleStats> {
    p.check_dim(e)?;
    p.check_dim(f)?;
    let total_pairs = check_budget(e, f, opts.pair_budget)?;
    let ranges: Vec<_> = (0..p.num_blocks())
        .map(|i| p.block_range(i).expect("block index in range"))
        .collect();
    let entries = enumerate_tuples(e, f, &ranges, opts.include_diagonal);
    Ok(DistanceTupleStats {
        partition: p.clone(),
        entries,
        total_pairs,
        includes_diagonal: opts.include_diagonal,
    })
}

/// Plain squared-distance classes of E × F (diagonal pairs included),
/// sorted by distance.
pub fn distance_classes(e: &PointSet, f: &PointSet) -> Result<Vec<(u128, u64)>> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            got: f.dim(),
        });
    }
    check_budget(e, f, DEFAULT_PAIR_BUDGET)?;
    let full_block = 0..e.dim();
    let entries = enumerate_tuples(e, f, std::slice::from_ref(&full_block), true);
    Ok(entries.into_iter().map(|(t, nu)| (t.0[0], nu)).collect())
}

/// Blockwise product evaluation for E = A₁ × … × A_q: the tuple set is the
/// product of the per-block distance sets and multiplicities multiply, so
/// nothing is materialized.
pub fn b_set_product(blocks: &[PointSet], opts: &BsetOptions) -> Result<DistanceTupleStats> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("product of zero blocks".into()));
    }
    if blocks.iter().any(|b| b.is_empty()) {
        return Err(Error::InvalidInput("empty product block".into()));
    }
    let partition = Partition::new(blocks.iter().map(|b| b.dim()).collect())?;
    let n: u128 = blocks.iter().map(|b| b.len() as u128).product();
    let total_pairs = n * n;
    if total_pairs > opts.pair_budget {
        return Err(Error::PairBudgetExceeded {
            pairs: total_pairs,
            budget: opts.pair_budget,
        });
    }
    let per_block: Vec<Vec<(u128, u64)>> = blocks
        .iter()
        .map(|b| distance_classes(b, b))
        .collect::<Result<_>>()?;

    let mut entries = Vec::new();
    let mut tuple = vec![0u128; per_block.len()];
    product_rec(&per_block, 0, &mut tuple, 1, &mut entries);
    if !opts.include_diagonal {
        // The all-zero tuple's multiplicity is exactly the diagonal mass
        // Π|Aᵢ| = n, so dropping the diagonal drops the tuple entirely.
        if let Some(pos) = entries.iter().position(|(t, _)| t.is_all_zero()) {
            debug_assert_eq!(entries[pos].1 as u128, n);
            entries.remove(pos);
        }
    }
    Ok(DistanceTupleStats {
        partition,
        entries,
        total_pairs,
        includes_diagonal: opts.include_diagonal,
    })
}

fn product_rec(
    per_block: &[Vec<(u128, u64)>],
    depth: usize,
    tuple: &mut Vec<u128>,
    nu: u64,
    out: &mut Vec<(DistanceTuple, u64)>,
) {
    if depth == per_block.len() {
        out.push((DistanceTuple(tuple.clone()), nu));
        return;
    }
    for &(d, m) in &per_block[depth] {
        tuple[depth] = d;
        product_rec(per_block, depth + 1, tuple, nu * m, out);
    }
}

/// Materializes A₁ × … × A_q as an explicit point set (cross-validation
/// helper; callers keep the size small).
pub fn materialize_product(blocks: &[PointSet]) -> Result<PointSet> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("product of zero blocks".into()));
    }
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    let n: u128 = blocks.iter().map(|b| b.len() as u128).product();
    if n > 1_000_000 {
        return Err(Error::PointBudgetExceeded {
            requested: n,
            budget: 1_000_000,
        });
    }
    let mut coords: Vec<i64> = Vec::with_capacity(n as usize * dim);
    let mut point = vec![0i64; dim];
    materialize_rec(blocks, 0, 0, &mut point, &mut coords);
    PointSet::from_flat(dim, coords)
}

fn materialize_rec(
    blocks: &[PointSet],
    depth: usize,
    offset: usize,
    point: &mut Vec<i64>,
    out: &mut Vec<i64>,
) {
    if depth == blocks.len() {
        out.extend_from_slice(point);
        return;
    }
    let b = &blocks[depth];
    for p in b.iter() {
        point[offset..offset + b.dim()].copy_from_slice(p);
        materialize_rec(blocks, depth + 1, offset + b.dim(), point, out);
    }
}

/// Count of quadruples (x, y, x', y') ∈ E×F×E×F with equal squared
/// distances, via the distance-class sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrupleCount {
    /// Σ mᵢ² over ordered-pair class sizes mᵢ.
    pub q_value: u128,
    /// Ordered-pair multiplicity of each distinct squared distance,
    /// descending.
    pub class_sizes: Vec<u64>,
    pub total_pairs: u128,
}

impl QuadrupleCount {
    /// Σ 2·C(mᵢ, 2): quadruples whose two pairs are distinct. Equals
    /// q_value − |E|·|F|.
    pub fn strict_quadruples(&self) -> u128 {
        self.q_value - self.total_pairs
    }
}

pub fn quadruple_count(e: &PointSet, f: &PointSet) -> Result<QuadrupleCount> {
    let classes = distance_classes(e, f)?;
    let mut class_sizes: Vec<u64> = classes.iter().map(|&(_, m)| m).collect();
    class_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let q_value = class_sizes.iter().map(|&m| m as u128 * m as u128).sum();
    Ok(QuadrupleCount {
        q_value,
        class_sizes,
        total_pairs: e.len() as u128 * f.len() as u128,
    })
}

/// Exact second-moment lower bound (|E|·|F|)² / Q on the number of distinct
/// squared distances of E × F.
pub fn cs_lower_bound(e: &PointSet, f: &PointSet) -> Result<num_rational::Ratio<i128>> {
    if e.is_empty() || f.is_empty() {
        return Err(Error::InvalidInput(
            "second-moment bound needs non-empty sets".into(),
        ));
    }
    let q = quadruple_count(e, f)?;
    let pairs = q.total_pairs as i128;
    Ok(num_rational::Ratio::new(
        pairs * pairs,
        q.q_value as i128,
    ))
}

/// Per-block projection data: distance-set sizes of the deduplicated
/// projections and the resulting lower bound max_i |Δ(π_i(E))| on the tuple
/// count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionBounds {
    pub delta_sizes: Vec<u64>,
    pub projected_sizes: Vec<u64>,
    pub bound: u64,
}

pub fn projection_bounds(e: &PointSet, p: &Partition) -> Result<ProjectionBounds> {
    p.check_dim(e)?;
    let mut delta_sizes = Vec::with_capacity(p.num_blocks());
    let mut projected_sizes = Vec::with_capacity(p.num_blocks());
    for i in 0..p.num_blocks() {
        let proj = project_set(e, p, i)?;
        projected_sizes.push(proj.len() as u64);
        let classes = distance_classes(&proj, &proj)?;
        delta_sizes.push(classes.len() as u64);
    }
    let bound = delta_sizes.iter().copied().max().unwrap_or(0);
    Ok(ProjectionBounds {
        delta_sizes,
        projected_sizes,
        bound,
    })
}

/// Deduplicated projection of E onto block `i` as a point set in dimension
/// pᵢ.
pub fn project_set(e: &PointSet, p: &Partition, i: usize) -> Result<PointSet> {
    p.check_dim(e)?;
    let r = p.block_range(i)?;
    let mut rows: Vec<&[i64]> = e.iter().map(|pt| &pt[r.clone()]).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut coords = Vec::with_capacity(rows.len() * (r.end - r.start));
    for row in rows {
        coords.extend_from_slice(row);
    }
    PointSet::from_flat(r.end - r.start, coords)
}
