use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::json;

use lagdelta::campaign::{run_campaign, CampaignConfig, PartitionChoice};
use lagdelta::equality::{build_t1, build_t2, check_t1, check_t2, random_witness, EqualityParamsJson};
use lagdelta::immersion::immersion_report;
use lagdelta::inequality::evaluate;
use lagdelta::quadratic::{
    build_m_exact, critical_c_exact, kernel_solution_theorem2, optimal_c, psd_verdict,
    sign_conditions, ThresholdCase,
};
use lagdelta::rational::{self, Rational};
use lagdelta::{delta_coordinate_oracle, delta_invariant, AmbientConstant, Error, OptimizerOptions, PartitionSpec};

use crate::io::{load_json, load_tensor, print_csv, print_json, Outcome};
use crate::{Format, OptimizerArgs};

/// Tolerances for `immersion-check`: recovered components and Lagrangian defect.
const ROUNDTRIP_TOL: f64 = 1e-6;
const LAGRANGIAN_TOL: f64 = 1e-12;

fn optimizer_options(args: &OptimizerArgs) -> anyhow::Result<OptimizerOptions> {
    let mut o: OptimizerOptions = match &args.options {
        Some(p) => load_json(p)?,
        None => OptimizerOptions::default(),
    };
    if let Some(r) = args.restarts {
        o.restarts = r;
    }
    if let Some(m) = args.max_iters {
        o.max_iters = m;
    }
    if let Some(t) = args.tol {
        o.tol = t;
    }
    if let Some(s) = args.seed {
        o.seed = s;
    }
    if !(o.tol.is_finite() && o.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {}", o.tol)).into());
    }
    Ok(o)
}

fn ratio_json(r: &Rational) -> serde_json::Value {
    json!([*r.numer(), *r.denom()])
}

fn matrix_rows(m: &lagdelta::nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct DeltaCsv {
    partition: String,
    value: f64,
    tau_total: f64,
    certified_lower: f64,
    converged: bool,
    assignment: String,
}

pub fn delta(
    fmt: Format,
    tensor: &Path,
    partition: &str,
    c: f64,
    oracle_only: bool,
    opt: &OptimizerArgs,
) -> anyhow::Result<Outcome> {
    let h = load_tensor(tensor)?;
    let p = PartitionSpec::parse(h.n(), partition)?;
    let c = AmbientConstant::new(c)?;
    let opts = optimizer_options(opt)?;
    let d = if oracle_only {
        delta_coordinate_oracle(&h, c, &p)?
    } else {
        delta_invariant(&h, c, &p, &opts)?
    };
    match fmt {
        Format::Json => {
            let mut v = d.to_json();
            v["partition"] = json!(p.blocks());
            v["n"] = json!(p.n());
            v["c"] = json!(c.value());
            print_json(&v)?;
        }
        Format::Csv => print_csv(&[DeltaCsv {
            partition: p.label(),
            value: d.value,
            tau_total: d.tau_total,
            certified_lower: d.certified_lower,
            converged: d.converged,
            assignment: d
                .assignment
                .iter()
                .map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(";"),
        }])?,
    }
    Ok(Outcome::Success)
}

pub fn verify(fmt: Format, tensor: &Path, partition: &str, c: f64, opt: &OptimizerArgs) -> anyhow::Result<Outcome> {
    let h = load_tensor(tensor)?;
    let p = PartitionSpec::parse(h.n(), partition)?;
    let report = evaluate(&h, AmbientConstant::new(c)?, &p, &optimizer_options(opt)?)?;
    match fmt {
        Format::Json => print_json(&report.to_json())?,
        Format::Csv => print_csv(&report.csv_rows())?,
    }
    Ok(Outcome::from_ok(!report.has_violation()))
}

fn own_case(p: &PartitionSpec) -> ThresholdCase {
    if p.is_full() {
        ThresholdCase::Theorem2
    } else {
        ThresholdCase::StatementI
    }
}

pub fn matrix(fmt: Format, n: usize, partition: &str, ell: usize, coef: &str) -> anyhow::Result<Outcome> {
    let p = PartitionSpec::parse(n, partition)?;
    if ell == 0 || ell > p.k() {
        return Err(Error::BadBlockIndex { ell, k: p.k() }.into());
    }
    let l = ell - 1;
    let c = if coef.trim().eq_ignore_ascii_case("critical") {
        critical_c_exact(&p, l, own_case(&p))?
    } else {
        rational::parse(coef).ok_or_else(|| Error::Format(format!("bad coefficient {coef:?}")))?
    };
    let bundle = build_m_exact(&p, l, c)?;
    if fmt == Format::Csv {
        print_csv(&matrix_rows(&bundle.m))?;
        return Ok(Outcome::Success);
    }
    let verdict = psd_verdict(&bundle);
    let threshold = |case| critical_c_exact(&p, l, case).ok().map(|r| ratio_json(&r));
    let kernel = if p.is_full() {
        kernel_solution_theorem2(&p, l)?.map(|v| v.iter().map(ratio_json).collect::<Vec<_>>())
    } else {
        None
    };
    let v = json!({
        "n": p.n(),
        "partition": p.blocks(),
        "ell": ell,
        "c": ratio_json(&c),
        "c_value": bundle.c,
        "m": matrix_rows(&bundle.m),
        "m_reduced": matrix_rows(&bundle.m_reduced),
        "minors": bundle.minors,
        "sign_conditions": sign_conditions(&p, l, c)?.iter().map(ratio_json).collect::<Vec<_>>(),
        "thresholds": {
            "statement_i": threshold(ThresholdCase::StatementI),
            "statement_ii": threshold(ThresholdCase::StatementII),
            "theorem2": threshold(ThresholdCase::Theorem2),
        },
        "critical_c": bundle.critical_c,
        "optimal_c": ratio_json(&optimal_c(&p)),
        "min_eigenvalue": verdict.min_eigenvalue,
        "psd": verdict.psd,
        "sylvester_psd": verdict.sylvester_psd,
        "kernel": kernel,
    });
    print_json(&v)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct EntryCsv {
    a: usize,
    b: usize,
    c: usize,
    value: f64,
}

pub fn construct_equality(
    fmt: Format,
    theorem: u8,
    n: usize,
    partition: &str,
    params: Option<&Path>,
    seed: u64,
    scale: f64,
) -> anyhow::Result<Outcome> {
    let p = PartitionSpec::parse(n, partition)?;
    match (theorem, p.is_full()) {
        (1, true) => bail!(Error::CaseMismatch("theorem 1 needs block sizes summing to less than n".into())),
        (2, false) => bail!(Error::CaseMismatch("theorem 2 needs block sizes summing to n".into())),
        _ => {}
    }
    let h = match params {
        Some(path) => {
            let raw: EqualityParamsJson = load_json(path)?;
            if theorem == 1 {
                build_t1(&raw.to_t1(&p)?)?
            } else {
                build_t2(&raw.to_t2(&p)?)?
            }
        }
        None => {
            if !(scale.is_finite() && scale >= 0.0) {
                bail!(Error::InvalidConfig(format!("scale must be finite and nonnegative, got {scale}")));
            }
            random_witness(&p, scale, seed)
        }
    };
    let violations = if theorem == 1 { check_t1(&h, &p)? } else { check_t2(&h, &p)? };
    match fmt {
        Format::Json => print_json(&serde_json::to_value(h.to_json())?)?,
        Format::Csv => {
            let rows: Vec<EntryCsv> = h
                .to_json()
                .entries
                .into_iter()
                .map(|e| EntryCsv {
                    a: e.idx[0],
                    b: e.idx[1],
                    c: e.idx[2],
                    value: e.value,
                })
                .collect();
            print_csv(&rows)?;
        }
    }
    if !violations.is_empty() {
        eprintln!("{}", json!({ "violations": violations }));
    }
    Ok(Outcome::from_ok(violations.is_empty()))
}

pub fn immersion_check(fmt: Format, tensor: &Path, at: Option<&Path>, fd: bool) -> anyhow::Result<Outcome> {
    let a = load_tensor(tensor)?;
    let x: Vec<f64> = match at {
        Some(p) => load_json(p)?,
        None => vec![0.0; a.n()],
    };
    let report = immersion_report(&a, &x, fd)?;
    match fmt {
        Format::Json => print_json(&serde_json::to_value(&report)?)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                x: String,
                roundtrip_error: f64,
                tensor_error: f64,
                lagrangian_defect: f64,
                metric_condition: f64,
                fd_crosscheck: Option<f64>,
            }
            print_csv(&[Row {
                n: report.n,
                x: report.x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                roundtrip_error: report.roundtrip_error,
                tensor_error: report.tensor_error,
                lagrangian_defect: report.lagrangian_defect,
                metric_condition: report.metric_condition,
                fd_crosscheck: report.fd_crosscheck,
            }])?;
        }
    }
    Ok(Outcome::from_ok(
        report.roundtrip_error <= ROUNDTRIP_TOL && report.lagrangian_defect <= LAGRANGIAN_TOL,
    ))
}

pub struct SampleOverrides {
    pub config: Option<PathBuf>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub partitions: Vec<String>,
    pub c_values: Option<String>,
    pub scale: Option<f64>,
}

fn parse_blocks(s: &str) -> anyhow::Result<Vec<usize>> {
    s.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split([',', ';', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad block size {t:?}")).into())
        })
        .collect()
}

fn campaign_config(o: SampleOverrides) -> anyhow::Result<CampaignConfig> {
    let mut cfg: CampaignConfig = match &o.config {
        Some(p) => load_json(p)?,
        None => CampaignConfig::default(),
    };
    if let Some(s) = o.samples {
        cfg.samples = s;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(lo) = o.n_min {
        cfg.n_range.0 = lo;
    }
    if let Some(hi) = o.n_max {
        cfg.n_range.1 = hi;
    }
    if !o.partitions.is_empty() {
        if o.partitions.len() == 1 && o.partitions[0].trim().eq_ignore_ascii_case("all") {
            cfg.partitions = PartitionChoice::All;
        } else {
            cfg.partitions = PartitionChoice::List(
                o.partitions.iter().map(|s| parse_blocks(s)).collect::<anyhow::Result<_>>()?,
            );
        }
    }
    if let Some(cs) = &o.c_values {
        cfg.c_values = cs
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad c value {t:?}"))
            })
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(s) = o.scale {
        cfg.tensor_scale = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn sample(fmt: Format, o: SampleOverrides, summary_path: Option<&Path>) -> anyhow::Result<Outcome> {
    let cfg = campaign_config(o)?;
    let outcome = run_campaign(&cfg)?;
    let summary = serde_json::to_value(&outcome.summary)?;
    match fmt {
        Format::Json => print_json(&json!({
            "config": cfg,
            "summary": summary,
            "rows": outcome.rows,
        }))?,
        Format::Csv => {
            print_csv(&outcome.rows)?;
            let s = &outcome.summary;
            eprintln!(
                "samples={} min_gap={:e} argmin_index={} argmin_seed={} violations={}",
                s.samples, s.min_gap, s.argmin_index, s.argmin_seed, s.violations
            );
        }
    }
    if let Some(path) = summary_path {
        std::fs::write(path, serde_json::to_string_pretty(&summary)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome::from_ok(outcome.summary.violations == 0))
}
