//! Integer point sets, coordinate-block partitions, and squared block distances.
//!
//! Everything downstream counts *distinct* distance tuples, and t ↦ t² is a
//! bijection on non-negative reals, so squared distances are the canonical
//! representation: all counting results agree with the real-distance versions
//! while staying in exact integer arithmetic.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coordinate magnitude accepted for a given ambient dimension.
///
/// With |c| ≤ 2⁶²/d, any coordinate difference fits an `i64` and any squared
/// distance fits well inside a `u128`, so no arithmetic downstream can
/// overflow. Checked once at construction; unreachable at runtime.
pub fn coord_bound(dim: usize) -> i64 {
    (1i64 << 62) / (dim.max(2) as i64)
}

/// A finite set of distinct integer points, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<i64>,
}

impl PointSet {
    /// Builds a point set, validating dimension, distinctness, and the
    /// coordinate magnitude bound. Duplicates are rejected, not deduplicated:
    /// multiplicity statistics would be ambiguous otherwise.
    pub fn new(dim: usize, points: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let bound = coord_bound(dim);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            for &c in p {
                if c.abs() > bound {
                    return Err(Error::CoordinateOverflow {
                        value: c,
                        bound,
                        dim,
                    });
                }
            }
            coords.extend_from_slice(p);
        }
        let set = PointSet { dim, coords };
        set.check_distinct()?;
        Ok(set)
    }

    /// Like [`PointSet::new`] but from flat row-major storage.
    pub fn from_flat(dim: usize, coords: Vec<i64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "flat coordinate buffer of length {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        let bound = coord_bound(dim);
        if let Some(&c) = coords.iter().find(|c| c.abs() > bound) {
            return Err(Error::CoordinateOverflow {
                value: c,
                bound,
                dim,
            });
        }
        let set = PointSet { dim, coords };
        set.check_distinct()?;
        Ok(set)
    }

    fn check_distinct(&self) -> Result<()> {
        let n = self.len();
        if n < 2 {
            return Ok(());
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| self.point(a).cmp(self.point(b)));
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint {
                    first: a,
                    second: b,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `i` as a slice of length `dim`.
    pub fn point(&self, i: usize) -> &[i64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[i64] {
        &self.coords
    }

    /// Number of points shared with `other` (as coordinate vectors).
    pub fn intersection_count(&self, other: &PointSet) -> usize {
        if self.dim != other.dim {
            return 0;
        }
        let set: rustc_hash::FxHashSet<&[i64]> = other.iter().collect();
        self.iter().filter(|p| set.contains(p)).count()
    }

    /// FNV-1a hash of the full content (dim, count, coordinates).
    /// Stable across platforms; used to pin generator determinism.
    pub fn content_hash(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&(self.dim as u64).to_le_bytes());
        eat(&(self.len() as u64).to_le_bytes());
        for &c in &self.coords {
            eat(&c.to_le_bytes());
        }
        h
    }

    /// Writes the point-set file format: header `dim=<d> n=<count>`, then one
    /// point per line as whitespace-separated decimal integers.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "dim={} n={}", self.dim, self.len())?;
        let mut line = String::new();
        for p in self.iter() {
            line.clear();
            for (j, c) in p.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&c.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    /// Parses the point-set file format. Lines starting with `#` and blank
    /// lines are ignored; the first remaining line must be the header.
    pub fn read_from<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut expected: usize = 0;
        let mut points: Vec<Vec<i64>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            match dim {
                None => {
                    let (d, n) = parse_header(line).ok_or_else(|| Error::MalformedFile {
                        line: lineno,
                        message: format!("expected header `dim=<d> n=<count>`, got `{line}`"),
                    })?;
                    dim = Some(d);
                    expected = n;
                    points.reserve(n);
                }
                Some(d) => {
                    let mut p = Vec::with_capacity(d);
                    for tok in line.split_whitespace() {
                        let c: i64 = tok.parse().map_err(|_| Error::MalformedFile {
                            line: lineno,
                            message: format!("bad coordinate `{tok}`"),
                        })?;
                        p.push(c);
                    }
                    if p.len() != d {
                        return Err(Error::MalformedFile {
                            line: lineno,
                            message: format!("expected {d} coordinates, got {}", p.len()),
                        });
                    }
                    points.push(p);
                }
            }
        }
        let dim = dim.ok_or_else(|| Error::MalformedFile {
            line: 0,
            message: "missing header".into(),
        })?;
        if points.len() != expected {
            return Err(Error::MalformedFile {
                line: 0,
                message: format!("header declared n={expected}, found {} points", points.len()),
            });
        }
        PointSet::new(dim, points)
    }

    pub fn read_from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut dim = None;
    let mut n = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("dim", v)) => dim = v.parse().ok(),
            Some(("n", v)) => n = v.parse().ok(),
            _ => return None,
        }
    }
    match (dim, n) {
        (Some(d), Some(n)) if d >= 1 => Some((d, n)),
        _ => None,
    }
}

/// An increasing composition p₁ ≤ … ≤ p_q of the ambient dimension into
/// coordinate blocks, every part at least 2. Parts of size 1 are excluded:
/// a one-dimensional block difference carries no distance-set structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if let Some(&p) = parts.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidPartition(format!(
                "part {p} is smaller than 2"
            )));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts {parts:?} are not non-decreasing"
            )));
        }
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        offsets.push(0usize);
        for &p in &parts {
            offsets.push(offsets.last().unwrap() + p);
        }
        Ok(Partition { parts, offsets })
    }

    /// The single-block partition of `dim` (plain distance sets).
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of blocks q.
    pub fn num_blocks(&self) -> usize {
        self.parts.len()
    }

    /// Ambient dimension Σ pᵢ.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Coordinate range of block `i` (0-based).
    pub fn block_range(&self, i: usize) -> Result<std::ops::Range<usize>> {
        if i >= self.num_blocks() {
            return Err(Error::BlockOutOfRange {
                index: i,
                blocks: self.num_blocks(),
            });
        }
        Ok(self.offsets[i]..self.offsets[i + 1])
    }

    pub fn check_dim(&self, set: &PointSet) -> Result<()> {
        if set.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: set.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A q-tuple of squared block distances.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DistanceTuple(pub Vec<u128>);

impl DistanceTuple {
    pub fn values(&self) -> &[u128] {
        &self.0
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }

    /// True when every component is nonzero, i.e. the pair differs in every
    /// block.
    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|&v| v > 0)
    }
}

impl fmt::Display for DistanceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Coordinates of `x` in block `i` of `p` (0-based).
pub fn project<'a>(x: &'a [i64], p: &Partition, i: usize) -> Result<&'a [i64]> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    let r = p.block_range(i)?;
    Ok(&x[r])
}

/// Exact squared Euclidean distance Σ (xⱼ − yⱼ)².
pub fn sq_dist(x: &[i64], y: &[i64]) -> Result<u128> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(sq_dist_unchecked(x, y))
}

/// Hot-path variant; callers guarantee equal lengths and the construction
/// bound, which makes every step overflow-free.
#[inline]
pub(crate) fn sq_dist_unchecked(x: &[i64], y: &[i64]) -> u128 {
    let mut acc: u128 = 0;
    for (&a, &b) in x.iter().zip(y.iter()) {
        let d = a - b;
        acc += (d as i128 * d as i128) as u128;
    }
    acc
}

/// Blockwise squared distances of a pair under `p`.
pub fn dist_tuple(x: &[i64], y: &[i64], p: &Partition) -> Result<DistanceTuple> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    if y.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: y.len(),
        });
    }
    let mut values = Vec::with_capacity(p.num_blocks());
    for i in 0..p.num_blocks() {
        let r = p.block_range(i)?;
        values.push(sq_dist_unchecked(&x[r.clone()], &y[r]));
    }
    Ok(DistanceTuple(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_slices_blocks() {
        let p = Partition::new(vec![2, 2]).unwrap();
        assert_eq!(project(&[0, 0, 0, 0], &p, 0).unwrap(), &[0, 0]);
        assert_eq!(project(&[1, 2, 3, 4], &p, 1).unwrap(), &[3, 4]);
        let p23 = Partition::new(vec![2, 3]).unwrap();
        assert_eq!(project(&[1, 2, 3, 4, 5], &p23, 1).unwrap(), &[3, 4, 5]);
        assert!(matches!(
            project(&[1, 2, 3, 4], &p, 2),
            Err(Error::BlockOutOfRange { .. })
        ));
    }

    #[test]
    fn sq_dist_examples() {
        assert_eq!(sq_dist(&[0, 0], &[3, 4]).unwrap(), 25);
        assert_eq!(sq_dist(&[1, 1], &[1, 1]).unwrap(), 0);
        assert_eq!(sq_dist(&[0, 0, 0], &[1, 2, 2]).unwrap(), 9);
        assert!(matches!(
            sq_dist(&[0, 0], &[1, 2, 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dist_tuple_examples() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let t = dist_tuple(&[0, 0, 0, 0], &[1, 2, 3, 4], &p).unwrap();
        assert_eq!(t.values(), &[5, 25]);
        let t0 = dist_tuple(&[7, 8, 9, 10], &[7, 8, 9, 10], &p).unwrap();
        assert!(t0.is_all_zero());
        let p23 = Partition::new(vec![2, 3]).unwrap();
        let t2 = dist_tuple(&[0, 0, 0, 0, 0], &[0, 1, 1, 1, 1], &p23).unwrap();
        assert_eq!(t2.values(), &[1, 3]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![2, 3]).is_ok());
        assert!(Partition::new(vec![3, 2]).is_err());
        assert!(Partition::new(vec![1, 3]).is_err());
        assert!(Partition::new(vec![]).is_err());
        let p = Partition::new(vec![2, 2, 4]).unwrap();
        assert_eq!(p.dim(), 8);
        assert_eq!(p.num_blocks(), 3);
        assert_eq!(p.block_range(2).unwrap(), 4..8);
    }

    #[test]
    fn point_set_rejects_duplicates_and_overflow() {
        let dup = PointSet::new(2, vec![vec![0, 1], vec![2, 3], vec![0, 1]]);
        assert!(matches!(
            dup,
            Err(Error::DuplicatePoint {
                first: 0,
                second: 2
            })
        ));
        let big = coord_bound(4) + 1;
        assert!(matches!(
            PointSet::new(4, vec![vec![big, 0, 0, 0]]),
            Err(Error::CoordinateOverflow { .. })
        ));
        assert!(PointSet::new(2, vec![]).unwrap().is_empty());
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let set = PointSet::new(
            3,
            vec![vec![0, -1, 2], vec![5, 5, 5], vec![-100, 0, 100]],
        )
        .unwrap();
        let mut buf = Vec::new();
        set.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "dim=3 n=3\n0 -1 2\n5 5 5\n-100 0 100\n");
        let back = PointSet::read_from(&mut std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back, set);
        let mut buf2 = Vec::new();
        back.write_to(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn file_parser_accepts_comments_rejects_garbage() {
        let good = "# comment\n\ndim=2 n=2\n# another\n0 0\n1 1\n";
        let set = PointSet::read_from(&mut std::io::Cursor::new(good)).unwrap();
        assert_eq!(set.len(), 2);
        let bad = "dim=2 n=3\n0 0\n1 1\n";
        assert!(matches!(
            PointSet::read_from(&mut std::io::Cursor::new(bad)),
            Err(Error::MalformedFile { .. })
        ));
        let bad2 = "dim=2 n=1\n0 0 0\n";
        assert!(PointSet::read_from(&mut std::io::Cursor::new(bad2)).is_err());
    }

    #[test]
    fn intersection_count_counts_shared_vectors() {
        let a = PointSet::new(2, vec![vec![0, 0], vec![1, 0], vec![2, 0]]).unwrap();
        let b = PointSet::new(2, vec![vec![1, 0], vec![3, 3]]).unwrap();
        assert_eq!(a.intersection_count(&b), 1);
        assert_eq!(b.intersection_count(&a), 1);
    }
}
