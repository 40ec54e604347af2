//! Multi-start descent on the orthogonal group.
//!
//! The search variable is an orthogonal `R` whose rows are the basis; the
//! objective is `f(R) = sum_i tau(span of rows Delta_i of R)`, a quartic
//! polynomial in the entries of `R`. Steps move along Cayley retractions
//! `R <- cay(-t W) R` of the skew-symmetric Riemannian gradient `W`, with
//! Barzilai-Borwein step guesses and Armijo step halving.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curvature::AmbientConstant;
use crate::error::Result;
use crate::frame::Frame;
use crate::partition::PartitionSpec;
use crate::tensor::{CubicForm, DenseCubic};

use super::oracle::best_coordinate_assignment;
use super::{check_dims, standard_assignment, DeltaResult, OptimizerOptions};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e3;

/// Continuous estimate of `delta(n_1, ..., n_k)`.
///
/// Starts: the identity, the coordinate-oracle tuple, then `opts.restarts`
/// Haar-random frames drawn from stream `j` of a ChaCha generator seeded
/// with `opts.seed`, so adding restarts never changes earlier ones.
pub fn delta_invariant(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
    opts: &OptimizerOptions,
) -> Result<DeltaResult> {
    check_dims(h, p)?;
    let n = h.n();
    let (oracle_sets, _) = best_coordinate_assignment(h, p);
    let oracle = DeltaResult::assemble(h, c, Frame::identity(n), oracle_sets.clone(), None, true)?;

    let mut starts = vec![Frame::identity(n), Frame::permutation(&order_from(&oracle_sets, n))?];
    for j in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(j as u64);
        starts.push(Frame::random(n, &mut rng));
    }

    let objective = Objective::new(h, p);
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|start| objective.descend(start, opts))
        .collect::<Result<_>>()?;
    let converged = runs.iter().all(|r| r.converged);
    // first minimal run wins, so ties resolve to the lowest start index
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least two starts");

    DeltaResult::assemble(
        h,
        c,
        best.frame,
        standard_assignment(p),
        Some(oracle.value),
        converged,
    )
}

/// Permutation placing `sets` in contiguous leading blocks.
fn order_from(sets: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = sets.iter().flatten().copied().collect();
    let mut rest: Vec<usize> = (0..n).filter(|i| !order.contains(i)).collect();
    order.append(&mut rest);
    order
}

struct Run {
    frame: Frame,
    value: f64,
    converged: bool,
}

/// `f` without the constant `c` contribution.
pub(crate) struct Objective {
    h: DenseCubic,
    blocks: Vec<std::ops::Range<usize>>,
}

impl Objective {
    pub(crate) fn new(h: &CubicForm, p: &PartitionSpec) -> Self {
        Self {
            h: h.to_dense(),
            blocks: p.ranges().into_iter().take(p.k()).collect(),
        }
    }

    pub(crate) fn value(&self, t: &DenseCubic) -> f64 {
        let n = t.n();
        let mut s = 0.0;
        for r in &self.blocks {
            for a in r.clone() {
                for b in a + 1..r.end {
                    for c in 0..n {
                        s += t.at(a, a, c) * t.at(b, b, c) - t.at(a, b, c).powi(2);
                    }
                }
            }
        }
        s
    }

    /// Skew matrix `W` with `d/de f((I + e Omega) R) = <Omega, W>_F` for skew `Omega`,
    /// given `t = rotate(h, R)`.
    pub(crate) fn gradient(&self, t: &DenseCubic) -> DMatrix<f64> {
        let n = t.n();
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        // partial derivatives of the objective in the entries of t
        let mut g = vec![0.0; n * n * n];
        for r in &self.blocks {
            for a in r.clone() {
                for b in a + 1..r.end {
                    for c in 0..n {
                        g[idx(a, a, c)] += t.at(b, b, c);
                        g[idx(b, b, c)] += t.at(a, a, c);
                        g[idx(a, b, c)] -= 2.0 * t.at(a, b, c);
                    }
                }
            }
        }
        // E_xd = sum_yz (g_xyz + g_yxz + g_yzx) t_dyz
        let mut e = DMatrix::<f64>::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let gs = g[idx(x, y, z)] + g[idx(y, x, z)] + g[idx(y, z, x)];
                    if gs == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        e[(x, d)] += gs * t.at(d, y, z);
                    }
                }
            }
        }
        (&e - e.transpose()) * 0.5
    }

    fn descend(&self, start: Frame, opts: &OptimizerOptions) -> Result<Run> {
        let n = start.n();
        let eye = DMatrix::<f64>::identity(n, n);
        let mut frame = start;
        let t0 = self.h.rotated(frame.matrix());
        let mut value = self.value(&t0);
        let mut grad = self.gradient(&t0);
        let mut step = None;
        let mut converged = false;

        for _ in 0..opts.max_iters {
            let gnorm_sq = grad.norm_squared();
            if gnorm_sq.sqrt() < opts.tol {
                converged = true;
                break;
            }
            let mut s = step.unwrap_or(1.0 / gnorm_sq.sqrt()).clamp(STEP_MIN, STEP_MAX);
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let q = cayley(&eye, &(&grad * -s));
                let candidate = frame.left_mul(&q)?;
                let tc = self.h.rotated(candidate.matrix());
                let vc = self.value(&tc);
                if vc <= value - ARMIJO * s * gnorm_sq {
                    accepted = Some((candidate, tc, vc));
                    break;
                }
                s *= 0.5;
            }
            let Some((candidate, tc, vc)) = accepted else {
                // no decrease at any step size: stationary to working precision
                break;
            };
            let new_grad = self.gradient(&tc);
            let y = &new_grad - &grad;
            let sy = -s * grad.dot(&y);
            let ss = s * s * gnorm_sq;
            step = if sy.abs() > 0.0 { Some(ss / sy.abs()) } else { None };
            frame = candidate;
            value = vc;
            grad = new_grad;
        }
        if !converged && grad.norm() < opts.tol {
            converged = true;
        }
        Ok(Run {
            frame,
            value,
            converged,
        })
    }
}

/// `(I - A/2)^{-1} (I + A/2)`, orthogonal for skew `A`.
fn cayley(eye: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let half = a * 0.5;
    let lhs = eye - &half;
    let rhs = eye + &half;
    lhs.lu().solve(&rhs).expect("I - A/2 is invertible for skew A")
}
