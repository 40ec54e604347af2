//! The delta-invariant `delta(n_1, ..., n_k) = tau - min sum_i tau(L_i)`,
//! minimized over mutually orthogonal subspaces `L_i` with `dim L_i = n_i`.
//!
//! Two routes are provided. [`delta_coordinate_oracle`] enumerates
//! coordinate-spanned tuples exactly, which yields a certified lower bound
//! on `delta`. [`delta_invariant`] runs a multi-start descent over the
//! orthogonal group seeded with that oracle solution.

mod optimizer;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::curvature::{scalar_curvature, tau_subspace, AmbientConstant};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::inequality;
use crate::partition::PartitionSpec;
use crate::tensor::CubicForm;

pub use optimizer::delta_invariant;
pub use oracle::{constant_curvature_delta, delta_coordinate_oracle};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerOptions {
    /// Random starts in addition to the identity and oracle frames.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the Riemannian gradient norm drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

/// Outcome of a delta computation.
///
/// `assignment[i]` lists the 0-based rows of `frame` spanning `L_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub value: f64,
    pub frame: Frame,
    pub assignment: Vec<Vec<usize>>,
    pub tau_total: f64,
    pub tau_blocks: Vec<f64>,
    /// Value of the coordinate oracle, a lower bound on the true invariant.
    pub certified_lower: f64,
    /// False when some start hit `max_iters` before reaching `tol`.
    pub converged: bool,
}

impl DeltaResult {
    pub(crate) fn assemble(
        h: &CubicForm,
        c: AmbientConstant,
        frame: Frame,
        assignment: Vec<Vec<usize>>,
        certified_lower: Option<f64>,
        converged: bool,
    ) -> Result<Self> {
        let (tau_total, tau_blocks) = evaluate_tuple(h, c, &frame, &assignment)?;
        let value = tau_total - tau_blocks.iter().sum::<f64>();
        Ok(Self {
            value,
            frame,
            assignment,
            tau_total,
            tau_blocks,
            certified_lower: certified_lower.unwrap_or(value),
            converged,
        })
    }

    /// `tau - sum tau(L_i)` recomputed from the stored frame and assignment.
    pub fn reevaluate(&self, h: &CubicForm, c: AmbientConstant) -> Result<f64> {
        let (t, blocks) = evaluate_tuple(h, c, &self.frame, &self.assignment)?;
        Ok(t - blocks.iter().sum::<f64>())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "tau_total": self.tau_total,
            "tau_blocks": self.tau_blocks,
            "certified_lower": self.certified_lower,
            "converged": self.converged,
            "assignment": self
                .assignment
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "frame": self.frame.to_rows(),
        })
    }
}

/// `(tau, [tau(L_1), ..., tau(L_k)])` where `L_i` is spanned by the rows of
/// `frame` listed in `assignment[i]`.
pub fn evaluate_tuple(
    h: &CubicForm,
    c: AmbientConstant,
    frame: &Frame,
    assignment: &[Vec<usize>],
) -> Result<(f64, Vec<f64>)> {
    let rotated = h.rotate(frame)?;
    let total = scalar_curvature(&rotated, c);
    let blocks = assignment
        .iter()
        .map(|set| tau_subspace(&rotated, c, set))
        .collect::<Result<Vec<_>>>()?;
    Ok((total, blocks))
}

pub(crate) fn check_dims(h: &CubicForm, p: &PartitionSpec) -> Result<()> {
    if h.n() != p.n() {
        return Err(Error::InadmissiblePartition {
            n: h.n(),
            blocks: p.blocks().to_vec(),
            reason: format!("partition was built for n = {}", p.n()),
        });
    }
    Ok(())
}

/// Contiguous 0-based blocks `Delta_1, ..., Delta_k`.
pub fn standard_assignment(p: &PartitionSpec) -> Vec<Vec<usize>> {
    p.ranges()
        .into_iter()
        .take(p.k())
        .map(|r| r.collect())
        .collect()
}

/// `gap(R) = RHS - (tau - sum_i tau(rows Delta_i of R))` for the optimal bound
/// applying to `p`. Nonnegative for every frame if the inequality holds.
pub fn universal_check(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
    frame: &Frame,
) -> Result<f64> {
    check_dims(h, p)?;
    let (total, blocks) = evaluate_tuple(h, c, frame, &standard_assignment(p))?;
    let rhs = inequality::optimal_rhs(p, crate::curvature::mean_curvature_sq(h), c)?;
    Ok(rhs - (total - blocks.iter().sum::<f64>()))
}
