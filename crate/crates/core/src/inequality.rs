//! Right-hand sides `a |H|^2 + b c` of the pointwise delta-inequalities.
//!
//! Four coefficient sets are compared: the optimal coefficient for
//! `sum n_i < n`, the improved one for `sum n_i = n`, the original
//! coefficient `n^2 (n+k+1-sum n_i) / (2(n+k-sum n_i))` (labelled CDVV) and
//! the earlier improvement (labelled CD), whose published argument only
//! covers `sum 1/(2+n_i) <= 1/3`. All four share the same `b`.
//! Coefficients are exact rationals; floating point enters only when a
//! right-hand side is evaluated.

use serde::{Deserialize, Serialize};

use crate::curvature::{mean_curvature_sq, AmbientConstant};
use crate::delta::{delta_invariant, DeltaResult, OptimizerOptions};
use crate::error::{Error, Result};
use crate::partition::PartitionSpec;
use crate::rational::{frac, int, to_f64, Rational};
use crate::tensor::CubicForm;

/// `|gap|` at or below this counts as equality.
pub const SHARP_TOL: f64 = 1e-6;
/// A gap below `-VIOLATION_TOL` is a verification failure.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundSource {
    Theorem1,
    Theorem2,
    LegacyCdvv,
    LegacyCd,
}

impl BoundSource {
    pub fn label(self) -> &'static str {
        match self {
            BoundSource::Theorem1 => "THEOREM1",
            BoundSource::Theorem2 => "THEOREM2",
            BoundSource::LegacyCdvv => "LEGACY_CDVV",
            BoundSource::LegacyCd => "LEGACY_CD",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCoefficients {
    pub a: Rational,
    pub b: Rational,
    pub source: BoundSource,
    pub applicable: bool,
    pub reason: Option<String>,
}

impl BoundCoefficients {
    pub fn rhs(&self, hsq: f64, c: AmbientConstant) -> f64 {
        to_f64(&self.a) * hsq + to_f64(&self.b) * c.value()
    }
}

/// `n^2 N / (2 (N + 3))` with `N = n - sum n_i + 3k - 1 - 6 sum 1/(2+n_i)`,
/// evaluated for any admissible partition. Reports only use it through
/// [`coeff_theorem1`] (`sum n_i < n`) and [`coeff_legacy_cd`].
pub fn theorem1_formula_extended(p: &PartitionSpec) -> Rational {
    let n = p.n() as i64;
    let num = int(p.residual() as i64) + int(3 * p.k() as i64 - 1) - int(6) * p.inverse_sum();
    let den = num + int(3);
    int(n * n) * num / (int(2) * den)
}

pub fn coeff_theorem1(p: &PartitionSpec) -> Result<BoundCoefficients> {
    if p.is_full() {
        return Err(Error::NotApplicable {
            bound: "THEOREM1",
            reason: "block sizes sum to n".into(),
        });
    }
    Ok(BoundCoefficients {
        a: theorem1_formula_extended(p),
        b: p.b_coefficient(),
        source: BoundSource::Theorem1,
        applicable: true,
        reason: None,
    })
}

/// `n^2 (k-1-2S) / (2 (k-2S))` with `S = sum_{i>=2} 1/(n_i+2)`; the smallest
/// block is left out of `S`.
pub fn coeff_theorem2(p: &PartitionSpec) -> Result<BoundCoefficients> {
    if !p.is_full() {
        return Err(Error::NotApplicable {
            bound: "THEOREM2",
            reason: "block sizes sum to less than n".into(),
        });
    }
    let n = p.n() as i64;
    let k = int(p.k() as i64);
    let s = p.inverse_sum_except(0);
    let a = int(n * n) * (k - int(1) - int(2) * s) / (int(2) * (k - int(2) * s));
    Ok(BoundCoefficients {
        a,
        b: p.b_coefficient(),
        source: BoundSource::Theorem2,
        applicable: true,
        reason: None,
    })
}

pub fn coeff_legacy_cdvv(p: &PartitionSpec) -> BoundCoefficients {
    let n = p.n() as i64;
    let k = p.k() as i64;
    let sum = p.block_sum() as i64;
    BoundCoefficients {
        a: frac(n * n * (n + k + 1 - sum), 2 * (n + k - sum)),
        b: p.b_coefficient(),
        source: BoundSource::LegacyCdvv,
        applicable: true,
        reason: None,
    }
}

/// Same closed form as the `sum n_i < n` bound, for every partition, flagged
/// when `sum 1/(2+n_i) > 1/3`.
pub fn coeff_legacy_cd(p: &PartitionSpec) -> BoundCoefficients {
    let caveat = p.inverse_sum() > frac(1, 3);
    BoundCoefficients {
        a: theorem1_formula_extended(p),
        b: p.b_coefficient(),
        source: BoundSource::LegacyCd,
        applicable: !caveat,
        reason: caveat.then(|| "proof incorrect when sum 1/(2+n_i) > 1/3".to_string()),
    }
}

/// The optimal bound for `p`: the `sum n_i = n` coefficient when the blocks
/// fill the space, the `sum n_i < n` one otherwise.
pub fn optimal_bound(p: &PartitionSpec) -> BoundCoefficients {
    if p.is_full() {
        coeff_theorem2(p).expect("full partition")
    } else {
        coeff_theorem1(p).expect("partition with residual block")
    }
}

pub fn optimal_rhs(p: &PartitionSpec, hsq: f64, c: AmbientConstant) -> Result<f64> {
    Ok(optimal_bound(p).rhs(hsq, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sharp,
    Holds,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Sharp => "sharp",
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not_applicable",
        }
    }

    fn from_gap(gap: f64) -> Self {
        if gap.abs() <= SHARP_TOL {
            Verdict::Sharp
        } else if gap >= -VIOLATION_TOL {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub source: BoundSource,
    /// `None` when the bound does not cover this partition at all.
    pub coefficients: Option<BoundCoefficients>,
    pub rhs: Option<f64>,
    pub gap: Option<f64>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub partition: PartitionSpec,
    pub delta: DeltaResult,
    pub hsq: f64,
    pub c: f64,
    pub rows: Vec<BoundRow>,
    /// Equality (within [`SHARP_TOL`]) in the optimal bound.
    pub sharp: bool,
}

/// One CSV record per bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub bound: &'static str,
    pub partition: String,
    pub a_num: Option<i128>,
    pub a_den: Option<i128>,
    pub b_num: Option<i128>,
    pub b_den: Option<i128>,
    pub rhs: Option<f64>,
    pub delta: f64,
    pub gap: Option<f64>,
    pub verdict: &'static str,
}

impl InequalityReport {
    pub fn row(&self, source: BoundSource) -> &BoundRow {
        self.rows
            .iter()
            .find(|r| r.source == source)
            .expect("every source has a row")
    }

    /// The row of the optimal bound.
    pub fn optimal_row(&self) -> &BoundRow {
        self.row(if self.partition.is_full() {
            BoundSource::Theorem2
        } else {
            BoundSource::Theorem1
        })
    }

    /// Any applicable row with a gap below `-VIOLATION_TOL`.
    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(|r| {
            r.coefficients.as_ref().is_some_and(|c| c.applicable) && r.verdict == Verdict::Violated
        })
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| {
                let co = r.coefficients.as_ref();
                CsvRow {
                    bound: r.source.label(),
                    partition: self.partition.label(),
                    a_num: co.map(|c| *c.a.numer()),
                    a_den: co.map(|c| *c.a.denom()),
                    b_num: co.map(|c| *c.b.numer()),
                    b_den: co.map(|c| *c.b.denom()),
                    rhs: r.rhs,
                    delta: self.delta.value,
                    gap: r.gap,
                    verdict: r.verdict.label(),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                let co = r.coefficients.as_ref();
                serde_json::json!({
                    "source": r.source.label(),
                    "applicable": co.is_some_and(|c| c.applicable),
                    "a": co.map(|c| [*c.a.numer(), *c.a.denom()]),
                    "b": co.map(|c| [*c.b.numer(), *c.b.denom()]),
                    "a_value": co.map(|c| to_f64(&c.a)),
                    "b_value": co.map(|c| to_f64(&c.b)),
                    "rhs": r.rhs,
                    "gap": r.gap,
                    "verdict": r.verdict.label(),
                    "note": r.note,
                })
            })
            .collect();
        serde_json::json!({
            "n": self.partition.n(),
            "partition": self.partition.blocks(),
            "c": self.c,
            "hsq": self.hsq,
            "delta": self.delta.to_json(),
            "bounds": rows,
            "sharp": self.sharp,
        })
    }
}

fn row_for(
    source: BoundSource,
    coeffs: Result<BoundCoefficients>,
    hsq: f64,
    c: AmbientConstant,
    delta: f64,
) -> BoundRow {
    match coeffs {
        Ok(co) => {
            let rhs = co.rhs(hsq, c);
            let gap = rhs - delta;
            BoundRow {
                source,
                note: co.reason.clone(),
                rhs: Some(rhs),
                gap: Some(gap),
                verdict: Verdict::from_gap(gap),
                coefficients: Some(co),
            }
        }
        Err(e) => BoundRow {
            source,
            coefficients: None,
            rhs: None,
            gap: None,
            verdict: Verdict::NotApplicable,
            note: Some(e.to_string()),
        },
    }
}

/// Computes `delta` with the optimizer and compares it with all four bounds.
pub fn evaluate(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
    opts: &OptimizerOptions,
) -> Result<InequalityReport> {
    let delta = delta_invariant(h, c, p, opts)?;
    Ok(report_for(h, c, p, delta))
}

/// Assembles a report around an already computed delta.
pub fn report_for(
    h: &CubicForm,
    c: AmbientConstant,
    p: &PartitionSpec,
    delta: DeltaResult,
) -> InequalityReport {
    let hsq = mean_curvature_sq(h);
    let d = delta.value;
    let rows = vec![
        row_for(BoundSource::Theorem1, coeff_theorem1(p), hsq, c, d),
        row_for(BoundSource::Theorem2, coeff_theorem2(p), hsq, c, d),
        row_for(BoundSource::LegacyCdvv, Ok(coeff_legacy_cdvv(p)), hsq, c, d),
        row_for(BoundSource::LegacyCd, Ok(coeff_legacy_cd(p)), hsq, c, d),
    ];
    let mut report = InequalityReport {
        partition: p.clone(),
        delta,
        hsq,
        c: c.value(),
        rows,
        sharp: false,
    };
    report.sharp = report
        .optimal_row()
        .gap
        .is_some_and(|g| g.abs() <= SHARP_TOL);
    report
}
