//! Access-structure rules and the leakage classifier.
//!
//! The classifier is purely arithmetic:
//!
//! 1. a subset holding one complete pair and touching every other pair is
//!    authorized, hence fully informative;
//! 2. a subset that misses some pair entirely is completely uninformative;
//! 3. what remains touches every pair without a complete pair, i.e. is aligned,
//!    and leaks iff `g = gcd(d, p(q+1) - 1) > 1`.
//!
//! [`numeric_independence_test`] is the statevector witness used to check it.

use serde::Serialize;

use crate::analytic::{leaked_words, AlignedDescriptor, LeakTerm};
use crate::error::{Error, Result};
use crate::linalg::trace_norm;
use crate::modnum::Dim;
use crate::pauli::random_states;
use crate::protocol::{encode, reduced_dim, ReducedState, RegisterSubset};

/// Largest trace distance treated as "identical" when testing independence.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Smallest trace distance accepted as a witness of input dependence.
pub const WITNESS_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 10;
pub const DEFAULT_SEED: u64 = 20_260_101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FullyInformative,
    PartiallyInformative,
    CompletelyUninformative,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::FullyInformative => "fully_informative",
            Verdict::PartiallyInformative => "partially_informative",
            Verdict::CompletelyUninformative => "completely_uninformative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub authorized: bool,
    /// Only meaningful for completely uninformative subsets.
    pub maximally_mixed: bool,
    /// Nonempty iff partially informative.
    pub leak: Vec<LeakTerm>,
    /// Aligned subsets only.
    pub aligned: Option<AlignedDescriptor>,
    pub g: Option<u32>,
}

/// One complete pair plus at least one qudit of every other pair.
pub fn authorization(subset: &RegisterSubset) -> bool {
    subset.has_complete_pair() && subset.touches_all_pairs()
}

pub fn classify_subset(d: Dim, subset: &RegisterSubset) -> Classification {
    if authorization(subset) {
        return Classification {
            verdict: Verdict::FullyInformative,
            authorized: true,
            maximally_mixed: false,
            leak: Vec::new(),
            aligned: None,
            g: None,
        };
    }
    if !subset.touches_all_pairs() {
        // Input-independent Bell mixture over the touched pairs: each retained
        // full pair contributes the same (k, l) branch, so two or more of them
        // are classically correlated. A single full pair averages to I/d^2.
        return Classification {
            verdict: Verdict::CompletelyUninformative,
            authorized: false,
            maximally_mixed: subset.complete_pairs() <= 1,
            leak: Vec::new(),
            aligned: None,
            g: None,
        };
    }
    let desc =
        AlignedDescriptor::of_subset(d, subset).expect("touches every pair with no complete pair");
    let leak = leaked_words(&desc);
    let g = desc.g();
    let verdict = if leak.is_empty() {
        Verdict::CompletelyUninformative
    } else {
        Verdict::PartiallyInformative
    };
    Classification {
        verdict,
        authorized: false,
        maximally_mixed: leak.is_empty(),
        leak,
        aligned: Some(desc),
        g: Some(g),
    }
}

/// `(1/2) sum |eig(r1 - r2)|`.
pub fn trace_distance(r1: &ReducedState, r2: &ReducedState) -> Result<f64> {
    if r1.matrix.shape() != r2.matrix.shape() {
        return Err(Error::DimensionMismatch {
            expected: r1.dim(),
            got: r2.dim(),
        });
    }
    let diff = &r1.matrix - &r2.matrix;
    let total = trace_norm(&diff);
    if !total.is_finite() {
        return Err(Error::Domain("trace norm did not converge".into()));
    }
    Ok((0.5 * total).min(1.0))
}

/// Distance of `r` from `I / dim`.
pub fn distance_from_maximally_mixed(r: &ReducedState) -> f64 {
    let mixed = ReducedState {
        d: r.d,
        labels: r.labels.clone(),
        matrix: r.maximally_mixed_like(),
    };
    trace_distance(r, &mixed).expect("same shape")
}

pub fn max_pairwise_distance(states: &[ReducedState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            worst = worst.max(trace_distance(a, b)?);
        }
    }
    Ok(worst)
}

/// Oracle reduced states of `subset` for `samples` seeded random inputs.
pub fn oracle_samples(
    d: Dim,
    n: usize,
    subset: &RegisterSubset,
    samples: usize,
    seed: u64,
) -> Result<Vec<ReducedState>> {
    if subset.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: subset.n(),
        });
    }
    reduced_dim(d, subset.len())?;
    random_states(d, samples, seed)
        .iter()
        .map(|psi| encode(psi, n)?.reduce(subset))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndependenceOutcome {
    pub independent: bool,
    pub max_distance: f64,
}

pub fn numeric_independence_test(
    d: Dim,
    n: usize,
    subset: &RegisterSubset,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<IndependenceOutcome> {
    let states = oracle_samples(d, n, subset, samples, seed)?;
    let max_distance = max_pairwise_distance(&states)?;
    Ok(IndependenceOutcome {
        independent: max_distance <= tol,
        max_distance,
    })
}
