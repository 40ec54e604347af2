use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{frac, int, Rational};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 12;

/// Block sizes `(n_1, ..., n_k)` of a delta-invariant together with the
/// ambient dimension. Blocks occupy contiguous index ranges in order; the
/// residual block holds whatever is left over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionSpec {
    n: usize,
    blocks: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(n: usize, blocks: Vec<usize>) -> Result<Self> {
        let bad = |reason: &str| Error::InadmissiblePartition {
            n,
            blocks: blocks.clone(),
            reason: reason.to_string(),
        };
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if blocks.is_empty() {
            return Err(bad("at least one block is required"));
        }
        if blocks.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("block sizes must be nondecreasing"));
        }
        if blocks[0] < 2 {
            return Err(bad("block sizes must be at least 2"));
        }
        if *blocks.last().unwrap() > n - 1 {
            return Err(bad("block sizes must be at most n - 1"));
        }
        if blocks.iter().sum::<usize>() > n {
            return Err(bad("block sizes must sum to at most n"));
        }
        Ok(Self { n, blocks })
    }

    /// Parses `"2,2"` (or `"2;2"`, `"(2,2)"`) against dimension `n`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let blocks = trimmed
            .split([',', ';', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Format(format!("bad block size {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_sum(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Size of the residual block `n - sum(n_i)`; may be zero.
    pub fn residual(&self) -> usize {
        self.n - self.block_sum()
    }

    pub fn is_full(&self) -> bool {
        self.residual() == 0
    }

    /// 0-based index ranges of the k blocks followed by the residual block
    /// (always present, possibly empty).
    pub fn ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::with_capacity(self.k() + 1);
        let mut start = 0;
        for &b in &self.blocks {
            out.push(start..start + b);
            start += b;
        }
        out.push(start..self.n);
        out
    }

    /// Block membership of each 0-based index; the residual block is `k`.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![self.k(); self.n];
        for (i, r) in self.ranges().into_iter().enumerate().take(self.k()) {
            for a in r {
                out[a] = i;
            }
        }
        out
    }

    /// `n(n-1)/2 - sum n_i(n_i-1)/2`, the shared multiplier of `c`.
    pub fn b_coefficient(&self) -> Rational {
        let n = self.n as i64;
        let inner: i64 = self.blocks.iter().map(|&b| (b * (b - 1)) as i64).sum();
        frac(n * (n - 1) - inner, 2)
    }

    /// `sum_i 1/(n_i + 2)` over all blocks.
    pub fn inverse_sum(&self) -> Rational {
        self.blocks.iter().map(|&b| frac(1, b as i64 + 2)).sum()
    }

    /// `sum_{i != skip} 1/(n_i + 2)` with `skip` 0-based.
    pub fn inverse_sum_except(&self, skip: usize) -> Rational {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, &b)| frac(1, b as i64 + 2))
            .fold(int(0), |acc, x| acc + x)
    }

    pub fn min_block(&self) -> usize {
        self.blocks[0]
    }

    pub fn label(&self) -> String {
        let inner: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        format!("({})", inner.join(","))
    }

    /// Every admissible partition for dimension `n`, in lexicographic order.
    pub fn enumerate_all(n: usize) -> Vec<PartitionSpec> {
        fn rec(n: usize, min: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            for b in min..=(n - 1).min(left) {
                cur.push(b);
                rec(n, b, left - b, cur, out);
                cur.pop();
            }
        }
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Vec::new();
        }
        let mut raw = Vec::new();
        rec(n, 2, n, &mut Vec::new(), &mut raw);
        raw.sort();
        raw.into_iter()
            .map(|blocks| PartitionSpec { n, blocks })
            .collect()
    }
}

impl std::fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={} {}", self.n, self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(PartitionSpec::new(3, vec![2]).is_ok());
        assert!(PartitionSpec::new(4, vec![2, 2]).is_ok());
        assert!(PartitionSpec::new(3, vec![3]).is_err());
        assert!(PartitionSpec::new(4, vec![1, 2]).is_err());
        assert!(PartitionSpec::new(4, vec![3, 2]).is_err());
        assert!(PartitionSpec::new(5, vec![2, 2, 2]).is_err());
        assert!(PartitionSpec::new(5, vec![]).is_err());
        assert!(PartitionSpec::new(13, vec![2]).is_err());
    }

    #[test]
    fn derived_blocks() {
        let p = PartitionSpec::new(7, vec![2, 3]).unwrap();
        assert_eq!(p.residual(), 2);
        assert_eq!(p.ranges(), vec![0..2, 2..5, 5..7]);
        assert_eq!(p.block_of(), vec![0, 0, 1, 1, 1, 2, 2]);
        let full = PartitionSpec::new(4, vec![2, 2]).unwrap();
        assert!(full.is_full());
        assert_eq!(full.ranges().last().unwrap().len(), 0);
    }

    #[test]
    fn enumeration_counts() {
        assert!(PartitionSpec::enumerate_all(2).is_empty());
        let three: Vec<_> = PartitionSpec::enumerate_all(3).iter().map(|p| p.blocks().to_vec()).collect();
        assert_eq!(three, vec![vec![2]]);
        let four: Vec<_> = PartitionSpec::enumerate_all(4).iter().map(|p| p.blocks().to_vec()).collect();
        assert_eq!(four, vec![vec![2], vec![2, 2], vec![3]]);
        for n in 3..=12 {
            for p in PartitionSpec::enumerate_all(n) {
                assert!(PartitionSpec::new(n, p.blocks().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(PartitionSpec::parse(4, "(2,2)").unwrap().blocks(), &[2, 2]);
        assert_eq!(PartitionSpec::parse(5, "2;3").unwrap().blocks(), &[2, 3]);
        assert!(PartitionSpec::parse(5, "x").is_err());
    }

    #[test]
    fn b_values() {
        assert_eq!(PartitionSpec::new(3, vec![2]).unwrap().b_coefficient(), int(2));
        assert_eq!(PartitionSpec::new(4, vec![2, 2]).unwrap().b_coefficient(), int(4));
    }
}
