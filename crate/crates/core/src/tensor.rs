//! Fully symmetric cubic forms `h_{ABC}` stored on sorted index triples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::partition::{MAX_DIM, MIN_DIM};

/// A fully symmetric real 3-tensor on `R^n`, e.g. the cubic form
/// `<h(e_A, e_B), J e_C>` of a Lagrangian immersion in an orthonormal frame.
///
/// Only entries with `A <= B <= C` are stored; lookups sort their indices,
/// so symmetry holds by construction. Indices are 0-based in the Rust API
/// and 1-based in JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicForm {
    n: usize,
    entries: Vec<f64>,
}

fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let (mut x, mut y, mut z) = (a, b, c);
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    if y > z {
        std::mem::swap(&mut y, &mut z);
    }
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    (x, y, z)
}

/// Number of sorted triples over `n` symbols.
pub fn canonical_len(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

fn canonical_offset(n: usize, a: usize, b: usize, c: usize) -> usize {
    debug_assert!(a <= b && b <= c && c < n);
    let mut off = 0;
    for x in 0..a {
        let m = n - x;
        off += m * (m + 1) / 2;
    }
    for y in a..b {
        off += n - y;
    }
    off + (c - b)
}

impl CubicForm {
    pub fn zeros(n: usize) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(Self {
            n,
            entries: vec![0.0; canonical_len(n)],
        })
    }

    /// Builds a form from 1-based triples in any order. Unlisted triples are
    /// zero; repeating a triple (up to permutation) is allowed only with the
    /// same value.
    pub fn symmetrize<I>(n: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = ([usize; 3], f64)>,
    {
        let mut out = Self::zeros(n)?;
        let mut seen = vec![false; out.entries.len()];
        for (idx, value) in raw {
            if !value.is_finite() {
                return Err(Error::NonFinite(value));
            }
            let [a, b, c] = out.zero_based(idx)?;
            let (x, y, z) = sort3(a, b, c);
            let off = canonical_offset(n, x, y, z);
            if seen[off] && out.entries[off] != value {
                return Err(Error::ConflictingEntry {
                    triple: [x + 1, y + 1, z + 1],
                    first: out.entries[off],
                    second: value,
                });
            }
            seen[off] = true;
            out.entries[off] = value;
        }
        Ok(out)
    }

    fn zero_based(&self, idx: [usize; 3]) -> Result<[usize; 3]> {
        let mut out = [0; 3];
        for (o, &i) in out.iter_mut().zip(idx.iter()) {
            if i == 0 || i > self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
            *o = i - 1;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 0-based indices, in any order.
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        let (x, y, z) = sort3(a, b, c);
        self.entries[canonical_offset(self.n, x, y, z)]
    }

    /// Entry at 1-based indices.
    pub fn lookup(&self, a: usize, b: usize, c: usize) -> Result<f64> {
        let [a, b, c] = self.zero_based([a, b, c])?;
        Ok(self.get(a, b, c))
    }

    /// Sets the entry at 0-based indices (and hence all its permutations).
    pub fn set(&mut self, a: usize, b: usize, c: usize, value: f64) {
        let (x, y, z) = sort3(a, b, c);
        let off = canonical_offset(self.n, x, y, z);
        self.entries[off] = value;
    }

    /// Sorted 0-based triples with their values, in lexicographic order.
    pub fn iter_canonical(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |a| (a..n).flat_map(move |b| (b..n).map(move |c| [a, b, c])))
            .zip(self.entries.iter().copied())
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * t).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.n)?;
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: n,
            });
        }
        Ok(())
    }

    /// Sum of squares over all ordered triples.
    pub fn frobenius_sq(&self) -> f64 {
        self.iter_canonical()
            .map(|([a, b, c], v)| multiplicity(a, b, c) as f64 * v * v)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_dense(&self) -> DenseCubic {
        let n = self.n;
        let mut data = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data[(a * n + b) * n + c] = self.get(a, b, c);
                }
            }
        }
        DenseCubic { n, data }
    }

    /// Expresses the form in the frame whose rows are the new basis vectors:
    /// `h'_{ABC} = sum R_{Aa} R_{Bb} R_{Cc} h_{abc}`.
    pub fn rotate(&self, frame: &Frame) -> Result<Self> {
        self.check_dim(frame.n())?;
        Ok(self.to_dense().rotated(frame.matrix()).to_canonical())
    }

    /// JSON document `{"n": .., "entries": [{"idx": [A,B,C], "value": v}]}`
    /// listing nonzero entries on sorted 1-based triples.
    pub fn to_json(&self) -> CubicFormJson {
        CubicFormJson {
            n: self.n,
            entries: self
                .iter_canonical()
                .filter(|(_, v)| *v != 0.0)
                .map(|([a, b, c], value)| EntryJson {
                    idx: [a + 1, b + 1, c + 1],
                    value,
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &CubicFormJson) -> Result<Self> {
        let mut out = Self::zeros(doc.n)?;
        let mut seen = vec![false; out.entries.len()];
        for e in &doc.entries {
            if !e.value.is_finite() {
                return Err(Error::NonFinite(e.value));
            }
            let [a, b, c] = out.zero_based(e.idx)?;
            let (x, y, z) = sort3(a, b, c);
            let off = canonical_offset(doc.n, x, y, z);
            if seen[off] {
                if out.entries[off] != e.value {
                    return Err(Error::ConflictingEntry {
                        triple: [x + 1, y + 1, z + 1],
                        first: out.entries[off],
                        second: e.value,
                    });
                }
                return Err(Error::DuplicateEntry {
                    triple: [x + 1, y + 1, z + 1],
                });
            }
            seen[off] = true;
            out.entries[off] = e.value;
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: CubicFormJson =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json(&doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("cubic form serializes")
    }
}

/// Number of distinct orderings of a triple.
pub fn multiplicity(a: usize, b: usize, c: usize) -> usize {
    if a == b && b == c {
        1
    } else if a == b || b == c || a == c {
        3
    } else {
        6
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub idx: [usize; 3],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicFormJson {
    pub n: usize,
    pub entries: Vec<EntryJson>,
}

/// Dense `n x n x n` copy used in inner loops.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCubic {
    pub(crate) n: usize,
    pub(crate) data: Vec<f64>,
}

impl DenseCubic {
    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Contracts each slot with the rows of `r` (row-major `n x n`).
    pub(crate) fn rotated(&self, r: &nalgebra::DMatrix<f64>) -> DenseCubic {
        let n = self.n;
        let mut t1 = vec![0.0; n * n * n];
        // slot 3
        for a in 0..n {
            for b in 0..n {
                let base = (a * n + b) * n;
                for cc in 0..n {
                    let mut s = 0.0;
                    for c in 0..n {
                        s += r[(cc, c)] * self.data[base + c];
                    }
                    t1[base + cc] = s;
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        // slot 2
        for a in 0..n {
            for bb in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for b in 0..n {
                        s += r[(bb, b)] * t1[(a * n + b) * n + c];
                    }
                    t2[(a * n + bb) * n + c] = s;
                }
            }
        }
        // slot 1
        let mut t3 = vec![0.0; n * n * n];
        for aa in 0..n {
            for a in 0..n {
                let w = r[(aa, a)];
                if w == 0.0 {
                    continue;
                }
                let src = &t2[a * n * n..(a + 1) * n * n];
                let dst = &mut t3[aa * n * n..(aa + 1) * n * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        DenseCubic { n, data: t3 }
    }

    /// Canonical form, averaging over permutations to remove rounding asymmetry.
    pub(crate) fn to_canonical(&self) -> CubicForm {
        let n = self.n;
        let mut entries = Vec::with_capacity(canonical_len(n));
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let v = (self.at(a, b, c)
                        + self.at(a, c, b)
                        + self.at(b, a, c)
                        + self.at(b, c, a)
                        + self.at(c, a, b)
                        + self.at(c, b, a))
                        / 6.0;
                    entries.push(v);
                }
            }
        }
        CubicForm { n, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_default() {
        let h = CubicForm::symmetrize(2, [([1, 1, 1], 2.0)]).unwrap();
        assert_eq!(h.lookup(1, 1, 1).unwrap(), 2.0);
        assert_eq!(h.lookup(1, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn permutation_lookup() {
        let h = CubicForm::symmetrize(3, [([1, 2, 3], 5.0)]).unwrap();
        for p in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
            assert_eq!(h.lookup(p[0], p[1], p[2]).unwrap(), 5.0);
        }
    }

    #[test]
    fn conflicting_entry() {
        let err = CubicForm::symmetrize(3, [([1, 2, 3], 5.0), ([3, 2, 1], 6.0)]).unwrap_err();
        assert!(matches!(err, Error::ConflictingEntry { .. }));
        // the same value twice is fine
        assert!(CubicForm::symmetrize(3, [([1, 2, 3], 5.0), ([3, 2, 1], 5.0)]).is_ok());
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            CubicForm::symmetrize(3, [([1, 2, 4], 1.0)]),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
        assert!(matches!(
            CubicForm::symmetrize(3, [([0, 1, 1], 1.0)]),
            Err(Error::IndexOutOfRange { index: 0, .. })
        ));
        assert!(CubicForm::zeros(13).is_err());
    }

    #[test]
    fn offsets_are_dense() {
        for n in 2..=12 {
            let mut expect = 0;
            for a in 0..n {
                for b in a..n {
                    for c in b..n {
                        assert_eq!(canonical_offset(n, a, b, c), expect);
                        expect += 1;
                    }
                }
            }
            assert_eq!(expect, canonical_len(n));
        }
    }

    #[test]
    fn permutation_frame() {
        let h = CubicForm::symmetrize(2, [([1, 1, 1], 1.0)]).unwrap();
        let swap = Frame::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let r = h.rotate(&swap).unwrap();
        assert_eq!(r.lookup(2, 2, 2).unwrap(), 1.0);
        assert_eq!(r.lookup(1, 1, 1).unwrap(), 0.0);
        assert_eq!(r.lookup(1, 1, 2).unwrap(), 0.0);
        assert_eq!(r.lookup(1, 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn json_rejects_duplicates() {
        let s = r#"{"n": 3, "entries": [{"idx": [1,2,3], "value": 1.0}, {"idx": [3,2,1], "value": 1.0}]}"#;
        assert!(matches!(
            CubicForm::from_json_str(s),
            Err(Error::DuplicateEntry { .. })
        ));
        let s = r#"{"n": 3, "entries": [{"idx": [1,2,3], "value": 1.0}, {"idx": [3,2,1], "value": 2.0}]}"#;
        assert!(matches!(
            CubicForm::from_json_str(s),
            Err(Error::ConflictingEntry { .. })
        ));
    }
}
