//! Discrete energy of a point set at exponent s, normalized minimum
//! separation, and greedy separation thinning.
//!
//! The energy is n⁻² Σ over ordered pairs e ≠ e' of (|e−e'| / diam)⁻ˢ.
//! Normalizing by the diameter inside the formula plays the role of
//! rescaling the set into the unit cube while keeping coordinates integral:
//! each term is (diam² / |e−e'|²)^(s/2) over exact integer squared distances.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{sq_dist_unchecked, PointSet};

/// Pairs per summation block. The block tree is fixed by index, so the
/// compensated reduction gives identical results for any worker count.
const ENERGY_BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub s: f64,
    pub energy: f64,
    pub n: usize,
    pub diameter_sq: u128,
    /// Threshold the energy was compared against.
    pub threshold: f64,
    pub adaptable: bool,
}

impl EnergyReport {
    pub fn to_json(&self, min_sep: Option<Ratio<i128>>, thin: Option<&ThinResult>) -> serde_json::Value {
        json!({
            "s": self.s,
            "energy": self.energy,
            "diam_sq": self.diameter_sq,
            "min_sep_sq_ratio": min_sep.map(|r| format!("{}/{}", r.numer(), r.denom())),
            "adaptable": self.adaptable,
            "kept": thin.map(|t| t.kept.len()),
            "removed": thin.map(|t| t.removed),
        })
    }
}

/// Default constant behind the "energy bounded" adaptability test.
pub const DEFAULT_ENERGY_THRESHOLD: f64 = 10.0;

fn neumaier_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Maximum squared distance over all pairs. O(n²); exact.
pub fn diameter_sq(e: &PointSet) -> u128 {
    let n = e.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = e.point(i);
            let mut best = 0u128;
            for j in (i + 1)..n {
                best = best.max(sq_dist_unchecked(x, e.point(j)));
            }
            best
        })
        .max()
        .unwrap_or(0)
}

/// Discrete energy at exponent s with the default adaptability threshold.
pub fn discrete_energy(e: &PointSet, s: f64) -> Result<EnergyReport> {
    energy_with_threshold(e, s, DEFAULT_ENERGY_THRESHOLD)
}

pub fn energy_with_threshold(e: &PointSet, s: f64, threshold: f64) -> Result<EnergyReport> {
    if e.len() < 2 {
        return Err(Error::InvalidInput(
            "discrete energy needs at least two points".into(),
        ));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "energy exponent must be positive, got {s}"
        )));
    }
    let n = e.len();
    let diam = diameter_sq(e);
    debug_assert!(diam > 0, "points are distinct");
    let half_s = s * 0.5;
    // Unordered pairs (i, j), i < j, indexed linearly and split into fixed
    // blocks; each block is summed with compensated addition, block sums are
    // combined in block order.
    let pair_count = (n as u64) * (n as u64 - 1) / 2;
    let blocks = pair_count.div_ceil(ENERGY_BLOCK).max(1);
    let mut block_sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * ENERGY_BLOCK;
            let end = ((b + 1) * ENERGY_BLOCK).min(pair_count);
            let mut sum = 0.0f64;
            let mut comp = 0.0f64;
            for k in start..end {
                let (i, j) = unrank_pair(k, n as u64);
                let d = sq_dist_unchecked(e.point(i as usize), e.point(j as usize));
                let term = (diam as f64 / d as f64).powf(half_s);
                neumaier_add(&mut sum, &mut comp, term);
            }
            (sum, comp)
        })
        .collect();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (bs, bc) in block_sums.drain(..) {
        neumaier_add(&mut sum, &mut comp, bs);
        neumaier_add(&mut sum, &mut comp, bc);
    }
    // Ordered pairs double the unordered sum.
    let energy = 2.0 * (sum + comp) / (n as f64 * n as f64);
    Ok(EnergyReport {
        s,
        energy,
        n,
        diameter_sq: diam,
        threshold,
        adaptable: energy <= threshold,
    })
}

/// Maps a linear index k < n(n−1)/2 to the pair (i, j), i < j, in row-major
/// order of the strict upper triangle.
fn unrank_pair(k: u64, n: u64) -> (u64, u64) {
    // Row i starts at offset i·n − i(i+1)/2 − i... solved directly:
    // find largest i with S(i) = i·(2n − i − 1)/2 ≤ k.
    let mut lo = 0u64;
    let mut hi = n - 1;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let start = mid * (2 * n - mid - 1) / 2;
        if start <= k {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let i = lo;
    let start = i * (2 * n - i - 1) / 2;
    let j = i + 1 + (k - start);
    (i, j)
}

/// True when the energy at s stays under `threshold`; optionally thins the
/// set first (the separation theorem allows discarding up to half the
/// points before the energy condition is read).
pub fn is_adaptable(
    e: &PointSet,
    s: f64,
    threshold: f64,
    thin_first: bool,
) -> Result<(bool, EnergyReport)> {
    if thin_first {
        let thin = separate_thin(e, s)?;
        let report = energy_with_threshold(&thin.kept, s, threshold)?;
        let ok = report.adaptable;
        Ok((ok, report))
    } else {
        let report = energy_with_threshold(e, s, threshold)?;
        let ok = report.adaptable;
        Ok((ok, report))
    }
}

/// Exact rational energy for even integer exponents: every term
/// (diam²/d²)^(s/2) is rational. Reference evaluation for the floating path.
pub fn discrete_energy_exact(e: &PointSet, s: u32) -> Result<BigRational> {
    if e.len() < 2 {
        return Err(Error::InvalidInput(
            "discrete energy needs at least two points".into(),
        ));
    }
    if s == 0 || !s.is_multiple_of(2) {
        return Err(Error::InvalidInput(
            "exact energy evaluation needs a positive even exponent".into(),
        ));
    }
    let n = e.len();
    let diam = BigInt::from(diameter_sq(e));
    let mut sum = BigRational::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = BigInt::from(sq_dist_unchecked(e.point(i), e.point(j)));
            let ratio = BigRational::new(diam.clone(), d);
            sum += pow_rational(&ratio, s / 2);
        }
    }
    let nn = BigRational::from_integer(BigInt::from(n as u64 * n as u64));
    Ok(sum * BigRational::from_integer(BigInt::from(2)) / nn)
}

fn pow_rational(r: &BigRational, e: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= r;
    }
    out
}

/// Exact min squared distance over diameter squared.
pub fn min_separation(e: &PointSet) -> Result<Ratio<i128>> {
    let n = e.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "minimum separation needs at least two points".into(),
        ));
    }
    let (min_sq, max_sq) = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = e.point(i);
            let mut mn = u128::MAX;
            let mut mx = 0u128;
            for j in (i + 1)..n {
                let d = sq_dist_unchecked(x, e.point(j));
                mn = mn.min(d);
                mx = mx.max(d);
            }
            (mn, mx)
        })
        .reduce(
            || (u128::MAX, 0),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    Ok(Ratio::new(min_sq as i128, max_sq as i128))
}

#[derive(Debug, Clone)]
pub struct ThinResult {
    pub kept: PointSet,
    pub removed: usize,
    /// Squared normalized separation floor n^(−2/s) the kept set satisfies.
    pub min_sep_sq: f64,
}

/// Greedy thinning in input order: a point is kept iff its normalized
/// distance to every already-kept point is at least n^(−1/s), with n the
/// original count. The separation property is guaranteed unconditionally;
/// the "keep at least half" conclusion holds on sets satisfying the energy
/// condition and is asserted only in tests on such families.
pub fn separate_thin(e: &PointSet, s: f64) -> Result<ThinResult> {
    if e.len() < 2 {
        return Err(Error::InvalidInput(
            "separation thinning needs at least two points".into(),
        ));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "separation exponent must be positive, got {s}"
        )));
    }
    let n = e.len();
    let diam = diameter_sq(e) as f64;
    let min_sep_sq = (n as f64).powf(-2.0 / s);
    let mut kept_idx: Vec<usize> = Vec::new();
    for i in 0..n {
        let x = e.point(i);
        let ok = kept_idx.iter().all(|&j| {
            let d = sq_dist_unchecked(x, e.point(j)) as f64;
            d / diam >= min_sep_sq
        });
        if ok {
            kept_idx.push(i);
        }
    }
    let dim = e.dim();
    let mut coords = Vec::with_capacity(kept_idx.len() * dim);
    for &i in &kept_idx {
        coords.extend_from_slice(e.point(i));
    }
    Ok(ThinResult {
        kept: PointSet::from_flat(dim, coords)?,
        removed: n - kept_idx.len(),
        min_sep_sq,
    })
}
