//! Randomized verification campaigns: each sample draws a dimension,
//! partition, ambient constant, tensor and frame, and records the gap of
//! the optimal inequality for the tuple spanned by that frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::AmbientConstant;
use crate::delta::universal_check;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::partition::{PartitionSpec, MAX_DIM, MIN_DIM};
use crate::sampling::{mix_seed, random_tensor};

/// Gaps below `-GAP_TOL` count as violations.
pub const GAP_TOL: f64 = 1e-9;

/// Serialized as the string `"ALL"` or a list of block lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChoiceRepr", into = "ChoiceRepr")]
pub enum PartitionChoice {
    /// Every admissible partition of each sampled `n`.
    All,
    /// Explicit block lists; each is used for those `n` where it is admissible.
    List(Vec<Vec<usize>>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ChoiceRepr {
    Word(String),
    List(Vec<Vec<usize>>),
}

impl TryFrom<ChoiceRepr> for PartitionChoice {
    type Error = String;

    fn try_from(r: ChoiceRepr) -> std::result::Result<Self, String> {
        match r {
            ChoiceRepr::Word(w) if w.eq_ignore_ascii_case("all") => Ok(PartitionChoice::All),
            ChoiceRepr::Word(w) => Err(format!("expected \"ALL\" or a list of block lists, got {w:?}")),
            ChoiceRepr::List(l) => Ok(PartitionChoice::List(l)),
        }
    }
}

impl From<PartitionChoice> for ChoiceRepr {
    fn from(c: PartitionChoice) -> Self {
        match c {
            PartitionChoice::All => ChoiceRepr::Word("ALL".into()),
            PartitionChoice::List(l) => ChoiceRepr::List(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub samples: usize,
    pub n_range: (usize, usize),
    pub partitions: PartitionChoice,
    pub c_values: Vec<f64>,
    pub tensor_scale: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            n_range: (3, 6),
            partitions: PartitionChoice::All,
            c_values: vec![-1.0, 0.0, 1.0],
            tensor_scale: 1.0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        let (lo, hi) = self.n_range;
        if lo > hi || lo < MIN_DIM || hi > MAX_DIM {
            return Err(Error::InvalidConfig(format!(
                "n_range ({lo}, {hi}) must satisfy {MIN_DIM} <= lo <= hi <= {MAX_DIM}"
            )));
        }
        if self.c_values.is_empty() {
            return Err(Error::InvalidConfig("c_values is empty".into()));
        }
        for &c in &self.c_values {
            AmbientConstant::new(c)?;
        }
        if !(self.tensor_scale.is_finite() && self.tensor_scale >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tensor_scale {} must be finite and nonnegative",
                self.tensor_scale
            )));
        }
        Ok(())
    }

    /// Partitions available for each usable `n`, skipping `n` with none.
    pub fn pool(&self) -> Result<Vec<(usize, Vec<PartitionSpec>)>> {
        self.validate()?;
        let mut pool = Vec::new();
        for n in self.n_range.0..=self.n_range.1 {
            let parts: Vec<PartitionSpec> = match &self.partitions {
                PartitionChoice::All => PartitionSpec::enumerate_all(n),
                PartitionChoice::List(list) => list
                    .iter()
                    .filter_map(|b| PartitionSpec::new(n, b.clone()).ok())
                    .collect(),
            };
            if !parts.is_empty() {
                pool.push((n, parts));
            }
        }
        if pool.is_empty() {
            return Err(Error::InvalidConfig(
                "no admissible partition for any n in range".into(),
            ));
        }
        Ok(pool)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub partition: String,
    pub c: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub samples: usize,
    pub min_gap: f64,
    pub argmin_index: usize,
    pub argmin_seed: u64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub rows: Vec<SampleRow>,
    pub summary: CampaignSummary,
}

pub fn run_sample(
    cfg: &CampaignConfig,
    pool: &[(usize, Vec<PartitionSpec>)],
    index: usize,
) -> Result<SampleRow> {
    let seed = mix_seed(cfg.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, parts) = &pool[rng.random_range(0..pool.len())];
    let p = &parts[rng.random_range(0..parts.len())];
    let c = cfg.c_values[rng.random_range(0..cfg.c_values.len())];
    let h = random_tensor(*n, cfg.tensor_scale, &mut rng);
    let frame = Frame::random(*n, &mut rng);
    let gap = universal_check(&h, AmbientConstant::new(c)?, p, &frame)?;
    Ok(SampleRow {
        index,
        seed,
        n: *n,
        partition: p.label(),
        c,
        gap,
    })
}

/// Runs all samples in parallel; rows come back ordered by index, so the
/// output depends only on the configuration.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutcome> {
    let pool = cfg.pool()?;
    let rows: Vec<SampleRow> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_sample(cfg, &pool, i))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.gap < rows[best].gap {
            best = i;
        }
    }
    let summary = CampaignSummary {
        samples: rows.len(),
        min_gap: rows[best].gap,
        argmin_index: best,
        argmin_seed: rows[best].seed,
        violations: rows.iter().filter(|r| r.gap < -GAP_TOL).count(),
    };
    Ok(CampaignOutcome { rows, summary })
}
