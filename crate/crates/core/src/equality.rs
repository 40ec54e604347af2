//! Pointwise configurations attaining equality in the optimal inequalities,
//! and checks of an arbitrary cubic form against the equality conditions.
//!
//! Both builders start from a user-supplied in-block part (entries whose
//! three indices lie in a single block) and add the entries forced by the
//! equality conditions. Index conventions: `alpha_i` ranges over block
//! `i`, `r, s` over the residual block, all 0-based in this API.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::AmbientConstant;
use crate::delta::{evaluate_tuple, standard_assignment, OptimizerOptions};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::inequality::{evaluate, InequalityReport};
use crate::partition::PartitionSpec;
use crate::tensor::{CubicForm, EntryJson};

/// Absolute tolerance for the equality conditions.
pub const CONDITION_TOL: f64 = 1e-10;
/// Witness is flagged when the optimizer beats the coordinate tuple by more.
pub const FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityParamsT1 {
    pub partition: PartitionSpec,
    /// `h_{rrr}` for each residual index, in order.
    pub lambda: Vec<f64>,
    /// In-block part with `sum_beta h_{beta beta alpha} = 0` for every `alpha`.
    pub inblock: CubicForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityParamsT2 {
    pub partition: PartitionSpec,
    /// `t_beta = sum_{alpha in own block} h_{alpha alpha beta}`, one per index;
    /// must vanish outside the smallest blocks.
    pub traces: Vec<f64>,
    pub inblock: CubicForm,
}

fn check_partition(p: &PartitionSpec, h: &CubicForm) -> Result<()> {
    if p.n() != h.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: h.n(),
        });
    }
    Ok(())
}

/// Partial trace `sum_{beta in block} h_{beta beta alpha}`.
fn block_trace(h: &CubicForm, block: std::ops::Range<usize>, alpha: usize) -> f64 {
    block.map(|b| h.get(b, b, alpha)).sum()
}

fn check_inblock_support(p: &PartitionSpec, inblock: &CubicForm, allow_residual: bool) -> Result<()> {
    let blk = p.block_of();
    for ([a, b, c], v) in inblock.iter_canonical() {
        if v == 0.0 {
            continue;
        }
        let same = blk[a] == blk[b] && blk[b] == blk[c];
        if !same || (blk[a] == p.k() && !allow_residual) {
            return Err(Error::InvariantViolation(format!(
                "in-block entry ({}, {}, {}) crosses blocks",
                a + 1,
                b + 1,
                c + 1
            )));
        }
    }
    Ok(())
}

pub fn build_t1(params: &EqualityParamsT1) -> Result<CubicForm> {
    let p = &params.partition;
    check_partition(p, &params.inblock)?;
    if p.is_full() {
        return Err(Error::CaseMismatch("equality case needs a residual block".into()));
    }
    if params.lambda.len() != p.residual() {
        return Err(Error::DimensionMismatch {
            expected: p.residual(),
            found: params.lambda.len(),
        });
    }
    if let Some(v) = params.lambda.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(*v));
    }
    check_inblock_support(p, &params.inblock, false)?;
    let ranges = p.ranges();
    for (i, r) in ranges.iter().take(p.k()).enumerate() {
        for alpha in r.clone() {
            let t = block_trace(&params.inblock, r.clone(), alpha);
            if t.abs() > CONDITION_TOL {
                return Err(Error::InvariantViolation(format!(
                    "in-block trace at index {} of block {} is {t:e}, must be 0",
                    alpha + 1,
                    i + 1
                )));
            }
        }
    }

    let mut h = params.inblock.clone();
    let residual = ranges[p.k()].clone();
    for (r, &lambda) in residual.clone().zip(&params.lambda) {
        h.set(r, r, r, lambda);
        for s in residual.clone().filter(|&s| s != r) {
            h.set(s, s, r, lambda / 3.0);
        }
        for (i, block) in ranges.iter().take(p.k()).enumerate() {
            let ni = p.blocks()[i] as f64;
            for alpha in block.clone() {
                h.set(alpha, alpha, r, lambda / (ni + 2.0));
            }
        }
    }
    Ok(h)
}

pub fn build_t2(params: &EqualityParamsT2) -> Result<CubicForm> {
    let p = &params.partition;
    check_partition(p, &params.inblock)?;
    if !p.is_full() {
        return Err(Error::CaseMismatch(
            "equality case needs block sizes summing to n".into(),
        ));
    }
    if params.traces.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: params.traces.len(),
        });
    }
    check_inblock_support(p, &params.inblock, false)?;
    let ranges = p.ranges();
    let nmin = p.min_block();
    for (j, r) in ranges.iter().take(p.k()).enumerate() {
        let minimal = p.blocks()[j] == nmin;
        for beta in r.clone() {
            let t = params.traces[beta];
            if !t.is_finite() {
                return Err(Error::NonFinite(t));
            }
            if !minimal && t != 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "trace at index {} must be 0: block {} is not a smallest block",
                    beta + 1,
                    j + 1
                )));
            }
            let actual = block_trace(&params.inblock, r.clone(), beta);
            if (actual - t).abs() > CONDITION_TOL {
                return Err(Error::InvariantViolation(format!(
                    "in-block trace at index {} is {actual}, expected {t}",
                    beta + 1
                )));
            }
        }
    }

    let mut h = params.inblock.clone();
    for (j, r) in ranges.iter().take(p.k()).enumerate() {
        if p.blocks()[j] != nmin {
            continue;
        }
        for beta in r.clone() {
            let t = params.traces[beta];
            for (i, block) in ranges.iter().take(p.k()).enumerate() {
                if i == j {
                    continue;
                }
                let ni = p.blocks()[i] as f64;
                for alpha in block.clone() {
                    h.set(alpha, alpha, beta, t / (ni + 2.0));
                }
            }
        }
    }
    Ok(h)
}

/// A failed equality condition. `bullet` numbers the condition group (1-3)
/// in the order the conditions are listed for each theorem; `indices` are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub bullet: u8,
    pub indices: Vec<usize>,
    pub residual: f64,
    pub description: String,
}

struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, bullet: u8, indices: &[usize], residual: f64, what: &str) {
        if residual.abs() > CONDITION_TOL {
            self.0.push(Violation {
                bullet,
                indices: indices.iter().map(|i| i + 1).collect(),
                residual,
                description: what.to_string(),
            });
        }
    }
}

/// Entries with three distinct indices not all inside one of the first `k` blocks.
fn mixed_distinct(h: &CubicForm, p: &PartitionSpec, out: &mut Collector) {
    let blk = p.block_of();
    let n = p.n();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let inside = blk[a] == blk[b] && blk[b] == blk[c] && blk[a] < p.k();
                if !inside {
                    out.check(1, &[a, b, c], h.get(a, b, c), "distinct indices across blocks");
                }
            }
        }
    }
}

/// Violations of the equality conditions for `sum n_i < n`.
pub fn check_t1(h: &CubicForm, p: &PartitionSpec) -> Result<Vec<Violation>> {
    check_partition(p, h)?;
    if p.is_full() {
        return Err(Error::CaseMismatch("equality case needs a residual block".into()));
    }
    let mut out = Collector(Vec::new());
    mixed_distinct(h, p, &mut out);

    let ranges = p.ranges();
    let residual = ranges[p.k()].clone();
    for (i, bi) in ranges.iter().take(p.k()).enumerate() {
        for alpha in bi.clone() {
            for (j, bj) in ranges.iter().take(p.k()).enumerate() {
                if i == j {
                    continue;
                }
                for beta in bj.clone() {
                    out.check(2, &[alpha, beta, beta], h.get(beta, beta, alpha), "h^alpha_i_(alpha_j alpha_j)");
                }
            }
            for r in residual.clone() {
                out.check(2, &[alpha, r, r], h.get(r, r, alpha), "h^alpha_i_(rr)");
            }
            out.check(2, &[alpha], block_trace(h, bi.clone(), alpha), "in-block trace of h^alpha_i");
        }
    }

    for r in residual.clone() {
        let hr = h.get(r, r, r);
        for s in residual.clone().filter(|&s| s != r) {
            out.check(3, &[r, s], hr - 3.0 * h.get(s, s, r), "h^r_rr = 3 h^r_ss");
        }
        for (i, bi) in ranges.iter().take(p.k()).enumerate() {
            let ni = p.blocks()[i] as f64;
            for alpha in bi.clone() {
                out.check(3, &[r, alpha], hr - (ni + 2.0) * h.get(alpha, alpha, r), "h^r_rr = (n_i+2) h^r_(alpha alpha)");
            }
        }
    }
    Ok(out.0)
}

/// Violations of the equality conditions for `sum n_i = n`.
pub fn check_t2(h: &CubicForm, p: &PartitionSpec) -> Result<Vec<Violation>> {
    check_partition(p, h)?;
    if !p.is_full() {
        return Err(Error::CaseMismatch(
            "equality case needs block sizes summing to n".into(),
        ));
    }
    let mut out = Collector(Vec::new());
    mixed_distinct(h, p, &mut out);

    let ranges = p.ranges();
    let nmin = p.min_block();
    for (j, bj) in ranges.iter().take(p.k()).enumerate() {
        let minimal = p.blocks()[j] == nmin;
        for beta in bj.clone() {
            let trace = block_trace(h, bj.clone(), beta);
            if !minimal {
                out.check(2, &[beta], trace, "in-block trace of h^beta_j");
            }
            for (i, bi) in ranges.iter().take(p.k()).enumerate() {
                if i == j {
                    continue;
                }
                let ni = p.blocks()[i] as f64;
                for alpha in bi.clone() {
                    let v = h.get(alpha, alpha, beta);
                    if minimal {
                        out.check(3, &[beta, alpha], trace - (ni + 2.0) * v, "trace of h^beta_j = (n_i+2) h^beta_j_(alpha alpha)");
                    } else {
                        out.check(2, &[beta, alpha], v, "h^beta_j_(alpha_i alpha_i)");
                    }
                }
            }
        }
    }
    Ok(out.0)
}

/// Random symmetric in-block part; the partial traces of block `i` are set
/// to `traces` (or zero where `None`).
fn random_inblock<R: Rng + ?Sized>(
    p: &PartitionSpec,
    scale: f64,
    traces: impl Fn(usize) -> f64,
    rng: &mut R,
) -> CubicForm {
    let mut h = CubicForm::zeros(p.n()).expect("supported dimension");
    for block in p.ranges().into_iter().take(p.k()) {
        let m = block.len() as f64;
        let idx: Vec<usize> = block.collect();
        let mut raw = CubicForm::zeros(p.n()).expect("supported dimension");
        for (x, &a) in idx.iter().enumerate() {
            for (y, &b) in idx.iter().enumerate().skip(x) {
                for &c in &idx[y..] {
                    raw.set(a, b, c, rng.random_range(-scale..=scale));
                }
            }
        }
        // subtract (d_ab t_c + d_ac t_b + d_bc t_a)/(m+2) with the current
        // traces and add it back with the wanted ones
        let shift: Vec<f64> = idx
            .iter()
            .map(|&a| traces(a) - idx.iter().map(|&b| raw.get(b, b, a)).sum::<f64>())
            .collect();
        for (x, &a) in idx.iter().enumerate() {
            for (y, &b) in idx.iter().enumerate().skip(x) {
                for (z, &c) in idx.iter().enumerate().skip(y) {
                    let mut corr = 0.0;
                    if a == b {
                        corr += shift[z];
                    }
                    if a == c {
                        corr += shift[y];
                    }
                    if b == c {
                        corr += shift[x];
                    }
                    h.set(a, b, c, raw.get(a, b, c) + corr / (m + 2.0));
                }
            }
        }
    }
    h
}

pub fn random_params_t1<R: Rng + ?Sized>(p: &PartitionSpec, scale: f64, rng: &mut R) -> EqualityParamsT1 {
    let lambda = (0..p.residual())
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    EqualityParamsT1 {
        partition: p.clone(),
        lambda,
        inblock: random_inblock(p, scale, |_| 0.0, rng),
    }
}

pub fn random_params_t2<R: Rng + ?Sized>(p: &PartitionSpec, scale: f64, rng: &mut R) -> EqualityParamsT2 {
    let blk = p.block_of();
    let nmin = p.min_block();
    let traces: Vec<f64> = (0..p.n())
        .map(|b| {
            if p.blocks()[blk[b]] == nmin {
                rng.random_range(-scale..=scale)
            } else {
                0.0
            }
        })
        .collect();
    let inblock = random_inblock(p, scale, |a| traces[a], rng);
    EqualityParamsT2 {
        partition: p.clone(),
        traces,
        inblock,
    }
}

/// Seeded witness for whichever equality case applies to `p`.
pub fn random_witness(p: &PartitionSpec, scale: f64, seed: u64) -> CubicForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if p.is_full() {
        build_t2(&random_params_t2(p, scale, &mut rng)).expect("generated params are valid")
    } else {
        build_t1(&random_params_t1(p, scale, &mut rng)).expect("generated params are valid")
    }
}

#[derive(Debug, Clone)]
pub struct WitnessCheck {
    pub report: InequalityReport,
    /// `tau - sum tau(Delta_i)` in the given coordinates.
    pub coordinate_value: f64,
    /// The optimizer found a tuple with smaller `sum tau(L_i)` than the
    /// coordinate blocks (beyond [`FLAG_TOL`]).
    pub flagged: bool,
}

/// Runs the optimizer (the coordinate blocks are its first start) and
/// compares the result against the coordinate tuple.
pub fn verify_witness(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
    opts: &OptimizerOptions,
) -> Result<WitnessCheck> {
    let (total, blocks) = evaluate_tuple(h, c, &Frame::identity(h.n()), &standard_assignment(p))?;
    let coordinate_value = total - blocks.iter().sum::<f64>();
    let report = evaluate(h, c, p, opts)?;
    let flagged = report.delta.value > coordinate_value + FLAG_TOL;
    Ok(WitnessCheck {
        report,
        coordinate_value,
        flagged,
    })
}

/// JSON parameters for the builders. `inblock` entries use 1-based indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualityParamsJson {
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// `[[beta, t_beta], ...]`, unlisted indices have trace 0.
    #[serde(default)]
    pub traces: Vec<(usize, f64)>,
    #[serde(default)]
    pub inblock: Vec<EntryJson>,
}

impl EqualityParamsJson {
    fn inblock(&self, n: usize) -> Result<CubicForm> {
        CubicForm::symmetrize(n, self.inblock.iter().map(|e| (e.idx, e.value)))
    }

    pub fn to_t1(&self, p: &PartitionSpec) -> Result<EqualityParamsT1> {
        if !self.traces.is_empty() {
            return Err(Error::Format("`traces` belongs to the second equality case".into()));
        }
        Ok(EqualityParamsT1 {
            partition: p.clone(),
            lambda: self.lambda.clone(),
            inblock: self.inblock(p.n())?,
        })
    }

    pub fn to_t2(&self, p: &PartitionSpec) -> Result<EqualityParamsT2> {
        if !self.lambda.is_empty() {
            return Err(Error::Format("`lambda` belongs to the first equality case".into()));
        }
        let mut traces = vec![0.0; p.n()];
        for &(beta, t) in &self.traces {
            if beta == 0 || beta > p.n() {
                return Err(Error::IndexOutOfRange { index: beta, n: p.n() });
            }
            traces[beta - 1] = t;
        }
        Ok(EqualityParamsT2 {
            partition: p.clone(),
            traces,
            inblock: self.inblock(p.n())?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::mean_curvature_sq;

    fn p(n: usize, b: &[usize]) -> PartitionSpec {
        PartitionSpec::new(n, b.to_vec()).unwrap()
    }

    #[test]
    fn t1_n3_entries() {
        let part = p(3, &[2]);
        let h = build_t1(&EqualityParamsT1 {
            partition: part.clone(),
            lambda: vec![2.0],
            inblock: CubicForm::zeros(3).unwrap(),
        })
        .unwrap();
        let want = CubicForm::symmetrize(3, [([3, 3, 3], 2.0), ([1, 1, 3], 0.5), ([2, 2, 3], 0.5)]).unwrap();
        assert_eq!(h, want);
        assert!(check_t1(&h, &part).unwrap().is_empty());
    }

    #[test]
    fn t1_zero_params() {
        let part = p(6, &[2, 2]);
        let h = build_t1(&EqualityParamsT1 {
            partition: part,
            lambda: vec![0.0, 0.0],
            inblock: CubicForm::zeros(6).unwrap(),
        })
        .unwrap();
        assert_eq!(h, CubicForm::zeros(6).unwrap());
    }

    #[test]
    fn t1_non_minimal() {
        let part = p(5, &[2, 2]);
        let h = build_t1(&EqualityParamsT1 {
            partition: part.clone(),
            lambda: vec![5.0],
            inblock: CubicForm::zeros(5).unwrap(),
        })
        .unwrap();
        assert_eq!(h.get(4, 4, 4), 5.0);
        for a in 0..4 {
            assert_eq!(h.get(a, a, 4), 1.25);
        }
        let trace: f64 = (0..5).map(|a| h.get(a, a, 4)).sum();
        assert_eq!(trace, 10.0);
        assert!(mean_curvature_sq(&h) > 0.0);
    }

    #[test]
    fn t1_rejects_traced_inblock() {
        let part = p(3, &[2]);
        let inblock = CubicForm::symmetrize(3, [([1, 1, 1], 1.0)]).unwrap();
        let err = build_t1(&EqualityParamsT1 {
            partition: part,
            lambda: vec![1.0],
            inblock,
        })
        .unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
    }

    #[test]
    fn t2_minimal_rule() {
        let part = p(4, &[2, 2]);
        let params = EqualityParamsT2 {
            partition: part.clone(),
            traces: vec![4.0, 0.0, 0.0, 0.0],
            inblock: CubicForm::symmetrize(4, [([1, 1, 1], 4.0)]).unwrap(),
        };
        let h = build_t2(&params).unwrap();
        assert_eq!(h.get(2, 2, 0), 1.0);
        assert_eq!(h.get(3, 3, 0), 1.0);
        assert!(check_t2(&h, &part).unwrap().is_empty());
    }

    #[test]
    fn t2_zero_and_rejections() {
        let part = p(5, &[2, 3]);
        let zero = EqualityParamsT2 {
            partition: part.clone(),
            traces: vec![0.0; 5],
            inblock: CubicForm::zeros(5).unwrap(),
        };
        assert_eq!(build_t2(&zero).unwrap(), CubicForm::zeros(5).unwrap());
        let mut bad = zero.clone();
        bad.traces[3] = 1.0;
        bad.inblock = CubicForm::symmetrize(5, [([4, 4, 4], 1.0)]).unwrap();
        assert!(matches!(build_t2(&bad), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn perturbation_gives_one_violation() {
        let part = p(3, &[2]);
        let mut h = random_witness(&part, 1.0, 9);
        assert!(check_t1(&h, &part).unwrap().is_empty());
        h.set(0, 1, 2, h.get(0, 1, 2) + 1e-3);
        let v = check_t1(&h, &part).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].bullet, 1);
        assert_eq!(v[0].indices, vec![1, 2, 3]);
    }

    #[test]
    fn random_witnesses_pass_checks() {
        for n in 3..=7 {
            for part in PartitionSpec::enumerate_all(n) {
                let h = random_witness(&part, 2.0, n as u64);
                let v = if part.is_full() {
                    check_t2(&h, &part).unwrap()
                } else {
                    check_t1(&h, &part).unwrap()
                };
                assert!(v.is_empty(), "{part}: {v:?}");
            }
        }
    }
}
