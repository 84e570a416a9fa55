//! Deterministic constructions of the named point-set families: integer
//! grids, lattice spheres of fixed squared norm, degenerate sphere pairs,
//! lower-dimensional embeddings, jittered grids, and seeded random sets.
//!
//! Every generator is a pure function of its parameters (and seed): the same
//! inputs reproduce the identical point set byte for byte on any platform.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Partition, PointSet};

/// Default ceiling on generated point counts.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

/// splitmix64; the whole reproducibility story rests on this being plain
/// integer arithmetic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Unbiased uniform draw from 0..m (Lemire rejection).
    pub fn below(&mut self, m: u64) -> u64 {
        debug_assert!(m >= 1);
        if m == 1 {
            return 0;
        }
        let threshold = m.wrapping_neg() % m;
        loop {
            let x = self.next_u64();
            let wide = (x as u128) * (m as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }
}

fn checked_pow_u128(base: u64, exp: usize) -> Option<u128> {
    let mut out: u128 = 1;
    for _ in 0..exp {
        out = out.checked_mul(base as u128)?;
    }
    Some(out)
}

fn check_point_budget(requested: u128, budget: u64) -> Result<()> {
    if requested > budget as u128 {
        return Err(Error::PointBudgetExceeded { requested, budget });
    }
    Ok(())
}

/// The integer grid {0, …, m−1}^d in lexicographic order.
pub fn grid(dim: usize, side: u64) -> Result<PointSet> {
    if dim < 2 || side < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs dim >= 2 and side >= 2, got dim={dim} side={side}"
        )));
    }
    let n = checked_pow_u128(side, dim).ok_or(Error::PointBudgetExceeded {
        requested: u128::MAX,
        budget: DEFAULT_POINT_BUDGET,
    })?;
    check_point_budget(n, DEFAULT_POINT_BUDGET)?;
    let n = n as usize;
    let mut coords = Vec::with_capacity(n * dim);
    let mut point = vec![0i64; dim];
    loop {
        coords.extend_from_slice(&point);
        // odometer, last coordinate fastest
        let mut k = dim;
        loop {
            if k == 0 {
                return PointSet::from_flat(dim, coords);
            }
            k -= 1;
            point[k] += 1;
            if point[k] < side as i64 {
                break;
            }
            point[k] = 0;
        }
    }
}

/// All integer vectors in dimension k with squared norm exactly `radius_sq`,
/// in lexicographic order. The empty set is a valid outcome.
pub fn lattice_sphere(dim: usize, radius_sq: u64) -> Result<PointSet> {
    if dim < 2 || radius_sq < 1 {
        return Err(Error::InvalidInput(format!(
            "lattice sphere needs dim >= 2 and radius_sq >= 1, got dim={dim} radius_sq={radius_sq}"
        )));
    }
    let mut coords: Vec<i64> = Vec::new();
    let mut point = vec![0i64; dim];
    sphere_rec(dim, radius_sq, 0, &mut point, &mut coords);
    PointSet::from_flat(dim, coords)
}

fn sphere_rec(dim: usize, remaining: u64, depth: usize, point: &mut [i64], out: &mut Vec<i64>) {
    if depth == dim - 1 {
        let r = remaining.sqrt();
        if r * r == remaining {
            if r == 0 {
                point[depth] = 0;
                out.extend_from_slice(point);
            } else {
                point[depth] = -(r as i64);
                out.extend_from_slice(point);
                point[depth] = r as i64;
                out.extend_from_slice(point);
            }
        }
        return;
    }
    let r = remaining.sqrt() as i64;
    for v in -r..=r {
        point[depth] = v;
        sphere_rec(dim, remaining - (v * v) as u64, depth + 1, point, out);
    }
}

/// E on the block-1 sphere padded with zeros, F zeros padded with the
/// block-2 sphere. Every cross pair realizes the single tuple (R, R).
pub fn sphere_pair(p: &Partition, radius_sq: u64) -> Result<(PointSet, PointSet)> {
    if p.num_blocks() != 2 {
        return Err(Error::InvalidInput(format!(
            "sphere pair needs a two-block partition, got {p}"
        )));
    }
    let parts = p.parts();
    let (k, l) = (parts[0], parts[1]);
    let dim = p.dim();
    let sphere_k = lattice_sphere(k, radius_sq)?;
    if sphere_k.is_empty() {
        return Err(Error::EmptySphere {
            dim: k,
            radius_sq,
        });
    }
    let sphere_l = lattice_sphere(l, radius_sq)?;
    if sphere_l.is_empty() {
        return Err(Error::EmptySphere {
            dim: l,
            radius_sq,
        });
    }
    let mut e_coords = Vec::with_capacity(sphere_k.len() * dim);
    for pt in sphere_k.iter() {
        e_coords.extend_from_slice(pt);
        e_coords.extend(std::iter::repeat_n(0i64, l));
    }
    let mut f_coords = Vec::with_capacity(sphere_l.len() * dim);
    for pt in sphere_l.iter() {
        f_coords.extend(std::iter::repeat_n(0i64, k));
        f_coords.extend_from_slice(pt);
    }
    Ok((
        PointSet::from_flat(dim, e_coords)?,
        PointSet::from_flat(dim, f_coords)?,
    ))
}

/// Embeds a pq-dimensional set into dimension d by fixing the coordinates of
/// blocks 1..q−1; the tuple set of the result is {0}^(q−1) × Δ(E_low).
pub fn subspace_embed(e_low: &PointSet, p: &Partition, fixed: &[i64]) -> Result<PointSet> {
    let pq = *p.parts().last().unwrap();
    if e_low.dim() != pq {
        return Err(Error::DimensionMismatch {
            expected: pq,
            got: e_low.dim(),
        });
    }
    let prefix_len = p.dim() - pq;
    if fixed.len() != prefix_len {
        return Err(Error::DimensionMismatch {
            expected: prefix_len,
            got: fixed.len(),
        });
    }
    let mut coords = Vec::with_capacity(e_low.len() * p.dim());
    for pt in e_low.iter() {
        coords.extend_from_slice(fixed);
        coords.extend_from_slice(pt);
    }
    PointSet::from_flat(p.dim(), coords)
}

/// n distinct uniform points of {0, …, range−1}^d; duplicates are redrawn,
/// so the output is a pure function of the seed. n = range^d returns the
/// full grid directly.
pub fn random_cube(dim: usize, count: usize, range: u64, seed: u64) -> Result<PointSet> {
    if dim < 1 || range < 1 {
        return Err(Error::InvalidInput(format!(
            "random cube needs dim >= 1 and range >= 1, got dim={dim} range={range}"
        )));
    }
    let cells = checked_pow_u128(range, dim);
    if let Some(cells) = cells {
        if (count as u128) > cells {
            return Err(Error::InvalidInput(format!(
                "cannot draw {count} distinct points from a cube of {cells} cells"
            )));
        }
        if count as u128 == cells && dim >= 2 && range >= 2 {
            return grid(dim, range);
        }
    }
    check_point_budget(count as u128, DEFAULT_POINT_BUDGET)?;
    let mut rng = SplitMix64::new(seed);
    let mut seen: rustc_hash::FxHashSet<Vec<i64>> = rustc_hash::FxHashSet::default();
    let mut coords = Vec::with_capacity(count * dim);
    while seen.len() < count {
        let p: Vec<i64> = (0..dim).map(|_| rng.below(range) as i64).collect();
        if seen.insert(p.clone()) {
            coords.extend_from_slice(&p);
        }
    }
    PointSet::from_flat(dim, coords)
}

/// The grid scaled by 2J+1 with every coordinate offset by a seeded value in
/// [−J, J]. Cells stay disjoint, so distinctness and a minimum separation of
/// 1 are structural.
pub fn jittered_grid(dim: usize, side: u64, jitter: u64, seed: u64) -> Result<PointSet> {
    if dim < 2 || side < 2 {
        return Err(Error::InvalidInput(format!(
            "jittered grid needs dim >= 2 and side >= 2, got dim={dim} side={side}"
        )));
    }
    let n = checked_pow_u128(side, dim).ok_or(Error::PointBudgetExceeded {
        requested: u128::MAX,
        budget: DEFAULT_POINT_BUDGET,
    })?;
    check_point_budget(n, DEFAULT_POINT_BUDGET)?;
    let scale = (2 * jitter + 1) as i64;
    let base = grid(dim, side)?;
    let mut rng = SplitMix64::new(seed);
    let mut coords = Vec::with_capacity(base.len() * dim);
    for pt in base.iter() {
        for &g in pt {
            let offset = rng.below(2 * jitter + 1) as i64 - jitter as i64;
            coords.push(g * scale + jitter as i64 + offset);
        }
    }
    PointSet::from_flat(dim, coords)
}

/// Declarative generator description; serialized inside experiment configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Grid {
        dim: usize,
        side: u64,
    },
    LatticeSphere {
        dim: usize,
        radius_sq: u64,
    },
    SpherePair {
        parts: Vec<usize>,
        radius_sq: u64,
    },
    SubspaceEmbed {
        parts: Vec<usize>,
        side: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixed: Option<Vec<i64>>,
    },
    RandomCube {
        dim: usize,
        count: usize,
        range: u64,
        seed: u64,
    },
    JitteredGrid {
        dim: usize,
        side: u64,
        jitter: u64,
        seed: u64,
    },
}

/// A generated instance: one set, or a pair for two-set constructions.
#[derive(Debug, Clone)]
pub struct Generated {
    pub e: PointSet,
    pub f: Option<PointSet>,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generated> {
        match self {
            GeneratorSpec::Grid { dim, side } => Ok(Generated {
                e: grid(*dim, *side)?,
                f: None,
            }),
            GeneratorSpec::LatticeSphere { dim, radius_sq } => Ok(Generated {
                e: lattice_sphere(*dim, *radius_sq)?,
                f: None,
            }),
            GeneratorSpec::SpherePair { parts, radius_sq } => {
                let p = Partition::new(parts.clone())?;
                let (e, f) = sphere_pair(&p, *radius_sq)?;
                Ok(Generated { e, f: Some(f) })
            }
            GeneratorSpec::SubspaceEmbed { parts, side, fixed } => {
                let p = Partition::new(parts.clone())?;
                let pq = *p.parts().last().unwrap();
                let low = grid(pq, *side)?;
                let prefix = match fixed {
                    Some(v) => v.clone(),
                    None => vec![0i64; p.dim() - pq],
                };
                Ok(Generated {
                    e: subspace_embed(&low, &p, &prefix)?,
                    f: None,
                })
            }
            GeneratorSpec::RandomCube {
                dim,
                count,
                range,
                seed,
            } => Ok(Generated {
                e: random_cube(*dim, *count, *range, *seed)?,
                f: None,
            }),
            GeneratorSpec::JitteredGrid {
                dim,
                side,
                jitter,
                seed,
            } => Ok(Generated {
                e: jittered_grid(*dim, *side, *jitter, *seed)?,
                f: None,
            }),
        }
    }

    /// The same spec with its size knob (side, count, or squared radius)
    /// replaced by a ladder value.
    pub fn with_size(&self, size: u64) -> GeneratorSpec {
        let mut out = self.clone();
        match &mut out {
            GeneratorSpec::Grid { side, .. } => *side = size,
            GeneratorSpec::LatticeSphere { radius_sq, .. } => *radius_sq = size,
            GeneratorSpec::SpherePair { radius_sq, .. } => *radius_sq = size,
            GeneratorSpec::SubspaceEmbed { side, .. } => *side = size,
            GeneratorSpec::RandomCube { count, .. } => *count = size as usize,
            GeneratorSpec::JitteredGrid { side, .. } => *side = size,
        }
        out
    }

    /// True when the construction is a blockwise cartesian product under the
    /// given partition, making the product evaluation exact.
    pub fn is_product_under(&self, p: &Partition) -> bool {
        match self {
            GeneratorSpec::Grid { dim, .. } => *dim == p.dim(),
            GeneratorSpec::SubspaceEmbed { parts, .. } => parts == p.parts(),
            _ => false,
        }
    }

    /// The per-block factors for product-structured specs.
    pub fn product_blocks(&self, p: &Partition) -> Result<Option<Vec<PointSet>>> {
        match self {
            GeneratorSpec::Grid { dim, side } if *dim == p.dim() => {
                let blocks = p
                    .parts()
                    .iter()
                    .map(|&pi| grid(pi, *side))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some(blocks))
            }
            GeneratorSpec::SubspaceEmbed { parts, side, fixed } if parts == p.parts() => {
                let pq = *p.parts().last().unwrap();
                let prefix = match fixed {
                    Some(v) => v.clone(),
                    None => vec![0i64; p.dim() - pq],
                };
                let mut blocks = Vec::with_capacity(p.num_blocks());
                let mut off = 0usize;
                for &pi in &p.parts()[..p.num_blocks() - 1] {
                    blocks.push(PointSet::new(pi, vec![prefix[off..off + pi].to_vec()])?);
                    off += pi;
                }
                blocks.push(grid(pq, *side)?);
                Ok(Some(blocks))
            }
            _ => Ok(None),
        }
    }
}
