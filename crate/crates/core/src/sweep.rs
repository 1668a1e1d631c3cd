//! Grid runs of the classifier against the statevector oracle.
//!
//! Each row classifies one subset arithmetically, then checks the verdict,
//! the maximally-mixed flag and the closed-form state (where one exists)
//! against oracle reduced states of seeded random inputs.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{aligned_reduced_for_subset, uninformative_reduced, LeakTermRecord};
use crate::classify::{
    classify_subset, distance_from_maximally_mixed, max_pairwise_distance, trace_distance,
    Classification, Verdict, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, WITNESS_TOL,
};
use crate::error::{Error, Result};
use crate::modnum::Dim;
use crate::pauli::{random_states, PureState};
use crate::protocol::{encode, reduced_dim, ReducedState, RegisterState, RegisterSubset};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetFamily {
    /// `{S1..Sp, N(p+1)..Nn}` for `p = 0..=n`.
    Aligned,
    /// Every nonempty subset of the storage register.
    All,
    /// Explicit label lists such as `S1,S2,N3`.
    Named(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dims: Vec<u32>,
    pub pairs: Vec<usize>,
    pub family: SubsetFamily,
    pub samples: usize,
    pub seed: u64,
    /// Independence / agreement threshold.
    pub tol: f64,
    /// Minimum distance accepted as evidence of input dependence.
    pub witness: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dims: (2..=6).collect(),
            pairs: (1..=3).collect(),
            family: SubsetFamily::Aligned,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            witness: WITNESS_TOL,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidConfig(
                "need at least 2 samples to test independence".into(),
            ));
        }
        if !(self.tol > 0.0 && self.witness > self.tol) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < tol < witness (tol={}, witness={})",
                self.tol, self.witness
            )));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidConfig(format!("dimension {d} is below 2")));
        }
        if self.pairs.contains(&0) {
            return Err(Error::InvalidConfig("pair count must be at least 1".into()));
        }
        if let SubsetFamily::Named(names) = &self.family {
            if names.is_empty() {
                return Err(Error::InvalidConfig("named family without subsets".into()));
            }
        }
        Ok(())
    }

    fn subsets(&self, n: usize) -> Vec<std::result::Result<RegisterSubset, (String, Error)>> {
        match &self.family {
            SubsetFamily::Aligned => (0..=n)
                .map(|p| Ok(RegisterSubset::aligned(n, p).unwrap()))
                .collect(),
            SubsetFamily::All => RegisterSubset::all(n).into_iter().map(Ok).collect(),
            SubsetFamily::Named(names) => names
                .iter()
                .map(|s| RegisterSubset::parse(n, s).map_err(|e| (s.clone(), e)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Agree,
    Mismatch,
    /// Not evaluated (capacity or a bad subset); does not fail the sweep.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: u32,
    pub n: usize,
    pub subset: String,
    pub p: Option<u32>,
    pub q: Option<u32>,
    pub g: Option<u32>,
    pub verdict: Option<Verdict>,
    pub authorized: Option<bool>,
    pub maximally_mixed: Option<bool>,
    pub leak_terms: Vec<LeakTermRecord>,
    pub oracle_max_distance: Option<f64>,
    pub analytic_oracle_distance: Option<f64>,
    pub mixed_distance: Option<f64>,
    pub status: RowStatus,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub witness: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn mismatches(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Mismatch)
            .count()
    }

    pub fn all_agree(&self) -> bool {
        self.mismatches() == 0
    }
}

/// Closed-form state for `subset` when one exists: aligned subsets and
/// subsets missing a pair. Authorized subsets have none.
pub fn analytic_state(psi: &PureState, subset: &RegisterSubset) -> Option<Result<ReducedState>> {
    if subset.is_aligned() {
        Some(aligned_reduced_for_subset(psi, subset))
    } else if !subset.touches_all_pairs() {
        Some(uninformative_reduced(psi.dim(), subset))
    } else {
        None
    }
}

fn skipped_row(d: u32, n: usize, subset: String, note: String) -> SweepRow {
    SweepRow {
        d,
        n,
        subset,
        p: None,
        q: None,
        g: None,
        verdict: None,
        authorized: None,
        maximally_mixed: None,
        leak_terms: Vec::new(),
        oracle_max_distance: None,
        analytic_oracle_distance: None,
        mixed_distance: None,
        status: RowStatus::Skipped,
        notes: vec![note],
    }
}

fn evaluate_row(
    cfg: &SweepConfig,
    d: Dim,
    inputs: &[PureState],
    encoded: &[RegisterState],
    subset: &RegisterSubset,
) -> SweepRow {
    let n = subset.n();
    let class: Classification = classify_subset(d, subset);
    let mut row = skipped_row(d.get(), n, subset.to_string(), String::new());
    row.notes.clear();
    row.verdict = Some(class.verdict);
    row.authorized = Some(class.authorized);
    row.maximally_mixed =
        (class.verdict == Verdict::CompletelyUninformative).then_some(class.maximally_mixed);
    row.g = class.g;
    row.p = class.aligned.map(|a| a.p);
    row.q = class.aligned.map(|a| a.q);
    row.leak_terms = class.leak.iter().map(|t| t.record()).collect();

    if let Err(e) = reduced_dim(d, subset.len()) {
        row.notes.push(e.to_string());
        return row;
    }
    let oracle: Result<Vec<ReducedState>> = encoded.iter().map(|s| s.reduce(subset)).collect();
    let oracle = match oracle {
        Ok(o) => o,
        Err(e) => {
            row.notes.push(e.to_string());
            return row;
        }
    };

    let mut agree = true;
    let spread = max_pairwise_distance(&oracle).expect("same subset");
    row.oracle_max_distance = Some(spread);
    let dependent = spread > cfg.witness;
    let independent = spread <= cfg.tol;
    match class.verdict {
        Verdict::CompletelyUninformative if !independent => {
            agree = false;
            row.notes
                .push(format!("oracle varies with input (spread {spread:.3e})"));
        }
        Verdict::FullyInformative | Verdict::PartiallyInformative if !dependent => {
            agree = false;
            row.notes.push(format!(
                "no input dependence witnessed (spread {spread:.3e})"
            ));
        }
        _ => {}
    }

    if class.verdict == Verdict::CompletelyUninformative {
        let mixed = oracle
            .iter()
            .map(distance_from_maximally_mixed)
            .fold(0.0, f64::max);
        row.mixed_distance = Some(mixed);
        let ok = if class.maximally_mixed {
            mixed <= cfg.tol
        } else {
            mixed > cfg.witness
        };
        if !ok {
            agree = false;
            row.notes.push(format!(
                "maximally-mixed flag contradicted (distance {mixed:.3e})"
            ));
        }
    }

    let mut analytic_worst: Option<f64> = None;
    for (psi, o) in inputs.iter().zip(&oracle) {
        match analytic_state(psi, subset) {
            None => break,
            Some(Ok(a)) => {
                let dist = trace_distance(&a, o).expect("same subset");
                analytic_worst = Some(analytic_worst.map_or(dist, |w: f64| w.max(dist)));
            }
            Some(Err(e)) => {
                row.notes.push(format!("closed form unavailable: {e}"));
                break;
            }
        }
    }
    row.analytic_oracle_distance = analytic_worst;
    if let Some(dist) = analytic_worst {
        if dist > cfg.tol {
            agree = false;
            row.notes
                .push(format!("closed form differs from oracle by {dist:.3e}"));
        }
    }

    row.status = if agree {
        RowStatus::Agree
    } else {
        RowStatus::Mismatch
    };
    row
}

fn sweep_register(cfg: &SweepConfig, d_raw: u32, n: usize) -> Vec<SweepRow> {
    let d = Dim::new(d_raw).expect("validated");
    let subsets = cfg.subsets(n);
    let inputs = random_states(d, cfg.samples, cfg.seed);
    let encoded: Result<Vec<RegisterState>> = inputs.par_iter().map(|psi| encode(psi, n)).collect();
    let encoded = match encoded {
        Ok(e) => e,
        Err(e) => {
            return subsets
                .into_iter()
                .map(|s| {
                    let label = match s {
                        Ok(s) => s.to_string(),
                        Err((label, _)) => label,
                    };
                    skipped_row(d_raw, n, label, e.to_string())
                })
                .collect();
        }
    };
    subsets
        .par_iter()
        .map(|s| match s {
            Ok(subset) => evaluate_row(cfg, d, &inputs, &encoded, subset),
            Err((label, e)) => skipped_row(d_raw, n, label.clone(), e.to_string()),
        })
        .collect()
}

/// Runs every `(d, n, subset)` configuration. Rows come back in grid order
/// (d, then n, then family order) regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let grid: Vec<(u32, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| cfg.pairs.iter().map(move |&n| (d, n)))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(d, n)| sweep_register(cfg, d, n))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(SweepReport {
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
        witness: cfg.witness,
        rows,
    })
}
