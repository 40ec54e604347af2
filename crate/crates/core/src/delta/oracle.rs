use crate::curvature::{pair_table, pairs, table_tau, AmbientConstant};
use crate::error::Result;
use crate::frame::Frame;
use crate::partition::PartitionSpec;
use crate::tensor::CubicForm;

use super::{check_dims, DeltaResult};

/// Relative slack below which two oracle minima count as tied.
const TIE_EPS: f64 = 1e-12;

/// Exact minimum of `sum_i tau(L_i)` over tuples of coordinate subspaces.
///
/// Blocks of equal size are unordered, so each set of equal-size blocks is
/// enumerated once (smallest leading index first). On ties the
/// lexicographically smallest assignment wins. The frame of the result is
/// the identity; `assignment` holds the chosen coordinate indices.
pub fn delta_coordinate_oracle(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
) -> Result<DeltaResult> {
    check_dims(h, p)?;
    let (assignment, _) = best_coordinate_assignment(h, p);
    DeltaResult::assemble(h, c, Frame::identity(h.n()), assignment, None, true)
}

/// Minimizing assignment and its `sum_i tau(L_i)` with `c = 0`.
pub(crate) fn best_coordinate_assignment(h: &CubicForm, p: &PartitionSpec) -> (Vec<Vec<usize>>, f64) {
    search(h, p)
        .best
        .expect("admissible partitions have at least one assignment")
}

fn search(h: &CubicForm, p: &PartitionSpec) -> Search {
    let n = h.n();
    let mut s = Search {
        n,
        sizes: p.blocks().to_vec(),
        table: pair_table(&h.to_dense()),
        used: vec![false; n],
        current: Vec::with_capacity(p.k()),
        best: None,
        leaves: 0,
    };
    s.block(0, 0.0);
    s
}

struct Search {
    n: usize,
    sizes: Vec<usize>,
    table: Vec<f64>,
    used: Vec<bool>,
    current: Vec<Vec<usize>>,
    best: Option<(Vec<Vec<usize>>, f64)>,
    leaves: usize,
}

impl Search {
    fn block(&mut self, i: usize, acc: f64) {
        if i == self.sizes.len() {
            self.leaves += 1;
            let better = match &self.best {
                None => true,
                Some((_, b)) => acc < b - TIE_EPS * (1.0 + b.abs()),
            };
            if better {
                self.best = Some((self.current.clone(), acc));
            }
            return;
        }
        // equal-size neighbours are ordered by their first index
        let min_first = if i > 0 && self.sizes[i] == self.sizes[i - 1] {
            self.current[i - 1][0] + 1
        } else {
            0
        };
        let mut set = Vec::with_capacity(self.sizes[i]);
        self.choose(i, min_first, &mut set, acc);
    }

    fn choose(&mut self, i: usize, from: usize, set: &mut Vec<usize>, acc: f64) {
        if set.len() == self.sizes[i] {
            let tau = table_tau(&self.table, self.n, set);
            self.current.push(set.clone());
            self.block(i + 1, acc + tau);
            self.current.pop();
            return;
        }
        for a in from..self.n {
            if self.used[a] {
                continue;
            }
            self.used[a] = true;
            set.push(a);
            self.choose(i, a + 1, set, acc);
            set.pop();
            self.used[a] = false;
        }
    }
}

/// Closed form for constant curvature (`h = 0`).
pub fn constant_curvature_delta(p: &PartitionSpec, c: AmbientConstant) -> f64 {
    let inner: f64 = p.blocks().iter().map(|&b| pairs(b)).sum();
    (pairs(p.n()) - inner) * c.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equality_n3() -> CubicForm {
        CubicForm::symmetrize(3, [([3, 3, 3], 2.0), ([1, 1, 3], 0.5), ([2, 2, 3], 0.5)]).unwrap()
    }

    #[test]
    fn zero_tensor() {
        for n in 3..=6 {
            for p in PartitionSpec::enumerate_all(n) {
                let h = CubicForm::zeros(n).unwrap();
                let r = delta_coordinate_oracle(&h, AmbientConstant::FLAT, &p).unwrap();
                assert_eq!(r.value, 0.0);
                let c = AmbientConstant::new(1.0).unwrap();
                let r = delta_coordinate_oracle(&h, c, &p).unwrap();
                assert!((r.value - constant_curvature_delta(&p, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_curvature_n3() {
        let p = PartitionSpec::new(3, vec![2]).unwrap();
        let h = CubicForm::zeros(3).unwrap();
        let r = delta_coordinate_oracle(&h, AmbientConstant::new(1.0).unwrap(), &p).unwrap();
        assert_eq!(r.value, 2.0);
    }

    #[test]
    fn equality_tensor_picks_first_plane() {
        let p = PartitionSpec::new(3, vec![2]).unwrap();
        let r = delta_coordinate_oracle(&equality_n3(), AmbientConstant::FLAT, &p).unwrap();
        assert!((r.value - 1.5).abs() < 1e-15);
        assert_eq!(r.assignment, vec![vec![0, 1]]);
    }

    #[test]
    fn tie_break_is_lexicographic() {
        let p = PartitionSpec::new(4, vec![2]).unwrap();
        let h = CubicForm::zeros(4).unwrap();
        let r = delta_coordinate_oracle(&h, AmbientConstant::FLAT, &p).unwrap();
        assert_eq!(r.assignment, vec![vec![0, 1]]);
        let p = PartitionSpec::new(5, vec![2, 2]).unwrap();
        let r = delta_coordinate_oracle(&h_zero(5), AmbientConstant::FLAT, &p).unwrap();
        assert_eq!(r.assignment, vec![vec![0, 1], vec![2, 3]]);
    }

    fn h_zero(n: usize) -> CubicForm {
        CubicForm::zeros(n).unwrap()
    }

    #[test]
    fn enumeration_count_matches_multinomial() {
        fn fact(m: usize) -> usize {
            (1..=m).product()
        }
        for n in 3..=8 {
            for p in PartitionSpec::enumerate_all(n) {
                let mut denom = fact(p.residual());
                for &b in p.blocks() {
                    denom *= fact(b);
                }
                // equal-size blocks are unordered
                let mut i = 0;
                while i < p.k() {
                    let run = p.blocks()[i..].iter().take_while(|&&b| b == p.blocks()[i]).count();
                    denom *= fact(run);
                    i += run;
                }
                let h = CubicForm::zeros(n).unwrap();
                assert_eq!(search(&h, &p).leaves, fact(n) / denom, "{p}");
            }
        }
    }
}
