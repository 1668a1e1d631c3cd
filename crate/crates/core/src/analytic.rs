//! Closed-form reduced states of the storage register.
//!
//! For an aligned subset with `p` signals and `q` noises the reduced state is
//!
//! ```text
//! rho = d^-n * sum_{(a,b) in sol(d,p,q)} e^{-i pi (a^2 + b^2 + 2qab + delta(a+b))/d}
//!              <psi|X^a Z^b|psi> (X^a Z^b)^{(x)p} (x) (X^-a Z^b)^{(x)q}
//! ```
//!
//! where `sol(d,p,q)` is the solution set of the congruence system in
//! [`crate::modnum`]. Only `(0,0)` survives when `gcd(d, p(q+1)-1) = 1`, which
//! leaves the maximally mixed state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, checked_pow, ComplexMatrix, ZERO};
use crate::modnum::{self, Dim};
use crate::pauli::{expectation, word_matrix, PauliWord, PhaseExponent, PureState};
use crate::protocol::{reduced_dim, Qudit, ReducedState, RegisterSubset};

/// Aligned subset `{S1..Sp, N(p+1)..Nn}` up to relabeling of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignedDescriptor {
    pub d: Dim,
    pub n: u32,
    pub p: u32,
    pub q: u32,
}

impl AlignedDescriptor {
    pub fn new(d: Dim, n: u32, p: u32) -> Result<Self> {
        if n == 0 || p > n {
            return Err(Error::Domain(format!(
                "aligned descriptor needs n >= 1 and p <= n (n={n}, p={p})"
            )));
        }
        Ok(AlignedDescriptor { d, n, p, q: n - p })
    }

    /// Descriptor of an aligned subset, or `None` if the subset is not aligned.
    pub fn of_subset(d: Dim, subset: &RegisterSubset) -> Option<Self> {
        subset.is_aligned().then(|| {
            AlignedDescriptor::new(d, subset.n() as u32, subset.signal_count() as u32).unwrap()
        })
    }

    pub fn g(&self) -> u32 {
        modnum::aligned_gcd(self.d, self.p, self.q)
    }

    pub fn labels(&self) -> Vec<Qudit> {
        let n = self.n as usize;
        let p = self.p as usize;
        (1..=p)
            .map(Qudit::Signal)
            .chain((p + 1..=n).map(Qudit::Noise))
            .collect()
    }
}

/// One `(a, b)` branch of the aligned reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeakTerm {
    pub a: u32,
    pub b: u32,
    pub coefficient: PhaseExponent,
    pub signal_word: PauliWord,
    pub noise_word: PauliWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeakTermRecord {
    pub a: u32,
    pub b: u32,
    pub phase_exponent: u32,
}

impl LeakTerm {
    pub fn record(&self) -> LeakTermRecord {
        LeakTermRecord {
            a: self.a,
            b: self.b,
            phase_exponent: self.coefficient.exponent(),
        }
    }
}

/// `e^{-i pi (a^2 + b^2 + 2qab + delta(a+b))/d}` as an exact exponent. Well
/// defined on residues: shifting `a` or `b` by `d` changes the exponent by a
/// multiple of `2d`.
pub fn aligned_phase(desc: &AlignedDescriptor, a: u32, b: u32) -> PhaseExponent {
    let (a, b, q) = (a as i64, b as i64, desc.q as i64);
    let delta = desc.d.delta();
    PhaseExponent::new(desc.d, -(a * a + b * b + 2 * q * a * b + delta * (a + b)))
}

/// Coefficient of the `(a, b)` branch; zero off the congruence solution set.
pub fn aligned_coefficient(desc: &AlignedDescriptor, a: u32, b: u32) -> Complex64 {
    if modnum::satisfies_system(desc.d, desc.p, desc.q, a as i64, b as i64) {
        aligned_phase(desc, a, b).to_complex()
    } else {
        ZERO
    }
}

/// Every surviving branch, including the identity term `(0, 0)`.
pub fn aligned_terms(desc: &AlignedDescriptor) -> Vec<LeakTerm> {
    let d = desc.d;
    let sol = modnum::solve_aligned_system(d, desc.p, desc.q).expect("descriptor has n >= 1");
    sol.solutions
        .iter()
        .map(|&(a, b)| LeakTerm {
            a,
            b,
            coefficient: aligned_phase(desc, a, b),
            signal_word: PauliWord::new(d, a as i64, b as i64),
            noise_word: PauliWord::new(d, -(a as i64), b as i64),
        })
        .collect()
}

/// Branches with `(a, b) != (0, 0)`; empty exactly when `g = 1`.
pub fn leaked_words(desc: &AlignedDescriptor) -> Vec<LeakTerm> {
    aligned_terms(desc)
        .into_iter()
        .filter(|t| (t.a, t.b) != (0, 0))
        .collect()
}

/// Dense tensor product of single-qudit words (all unit phase).
fn tensor_words(d: Dim, words: &[PauliWord]) -> Result<ComplexMatrix> {
    let m = d.as_usize();
    let dim = reduced_dim(d, words.len())?;
    let sites = words.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; sites];
    for col in 0..dim {
        linalg::index_digits(col, m, sites, &mut digits);
        let mut row = 0;
        let mut r = PhaseExponent::one(d);
        for (w, &c) in words.iter().zip(&digits) {
            row = row * m + (c + w.a as usize) % m;
            r = r * w.phase * PhaseExponent::omega_pow(d, w.b as i64 * c as i64);
        }
        out[(row, col)] = r.to_complex();
    }
    Ok(out)
}

/// Closed-form reduced state of `{S1..Sp, N(p+1)..Nn}`.
pub fn aligned_reduced(psi: &PureState, desc: &AlignedDescriptor) -> Result<ReducedState> {
    if psi.dim() != desc.d {
        return Err(Error::DimensionMismatch {
            expected: desc.d.as_usize(),
            got: psi.dim().as_usize(),
        });
    }
    let n = desc.n as usize;
    let dim = reduced_dim(desc.d, n)?;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for term in aligned_terms(desc) {
        let weight = term.coefficient.to_complex() * expectation(psi, &term.signal_word)?;
        let words: Vec<PauliWord> = std::iter::repeat_n(term.signal_word, desc.p as usize)
            .chain(std::iter::repeat_n(term.noise_word, desc.q as usize))
            .collect();
        rho += tensor_words(desc.d, &words)? * weight;
    }
    rho /= Complex64::new(dim as f64, 0.0);
    Ok(ReducedState {
        d: desc.d,
        labels: desc.labels(),
        matrix: rho,
    })
}

/// Closed form for any aligned subset, labelled with its actual qudits in
/// canonical order. Pairs are interchangeable, so this is the canonical
/// `B_{n,p}` state with relabeled qudits.
pub fn aligned_reduced_for_subset(
    psi: &PureState,
    subset: &RegisterSubset,
) -> Result<ReducedState> {
    let desc = AlignedDescriptor::of_subset(psi.dim(), subset)
        .ok_or_else(|| Error::InvalidSubset(format!("{subset} is not aligned")))?;
    let mut state = aligned_reduced(psi, &desc)?;
    state.labels = subset.qudits();
    Ok(state)
}

/// `{S1}` at `n = 1`: `(1/d) sum_a w^{-a^2} <psi|X^a Z^-a|psi> X^a Z^-a`.
#[allow(non_snake_case)]
pub fn n1_reduced_S(psi: &PureState) -> ReducedState {
    let d = psi.dim();
    let m = d.as_usize();
    let mut rho = ComplexMatrix::zeros(m, m);
    for a in 0..m as i64 {
        let w = PauliWord::new(d, a, -a);
        let coeff = PhaseExponent::omega_pow(d, -a * a).to_complex();
        let ev = expectation(psi, &w).expect("same dimension");
        rho += word_matrix(&w) * (coeff * ev);
    }
    rho /= Complex64::new(m as f64, 0.0);
    ReducedState {
        d,
        labels: vec![Qudit::Signal(1)],
        matrix: rho,
    }
}

/// The three representative aligned subsets at `n = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreePairSubset {
    /// `{S1, S2, N3}`
    TwoSignals,
    /// `{S1, N2, N3}`
    OneSignal,
    /// `{S1, S2, S3}`
    ThreeSignals,
}

impl ThreePairSubset {
    pub fn signal_count(self) -> u32 {
        match self {
            ThreePairSubset::TwoSignals => 2,
            ThreePairSubset::OneSignal => 1,
            ThreePairSubset::ThreeSignals => 3,
        }
    }
}

/// `x1 = e^{-i pi (4d/9 + 2 delta/3)} <psi|X^{d/3} Z^{d/3}|psi>`, for `3 | d`.
pub fn three_pair_x1(psi: &PureState) -> Complex64 {
    let d = psi.dim();
    let t = d.as_i64() / 3;
    let delta = d.delta() as f64;
    let df = d.get() as f64;
    let phase = Complex64::from_polar(1.0, -PI * (4.0 * df / 9.0 + 2.0 * delta / 3.0));
    phase * expectation(psi, &PauliWord::new(d, t, t)).unwrap()
}

/// `y1 = e^{-i pi (16d/9 + 4 delta/3)} <psi|X^{2d/3} Z^{2d/3}|psi>`, for `3 | d`.
pub fn three_pair_y1(psi: &PureState) -> Complex64 {
    let d = psi.dim();
    let t = d.as_i64() / 3;
    let delta = d.delta() as f64;
    let df = d.get() as f64;
    let phase = Complex64::from_polar(1.0, -PI * (16.0 * df / 9.0 + 4.0 * delta / 3.0));
    phase * expectation(psi, &PauliWord::new(d, 2 * t, 2 * t)).unwrap()
}

/// The explicit `n = 3` states, assembled from their leading coefficients
/// (`x1`, `y1`, `i^d`) rather than from the general congruence sum.
///
/// In the `3 | d` branch of `{S1,S2,N3}` the `x1` operator carries
/// `X^{2d/3} Z^{d/3}` on the noise qudit, i.e. `X^-a Z^b` at `a = b = d/3`.
pub fn three_pair_reduced(psi: &PureState, which: ThreePairSubset) -> Result<ReducedState> {
    let d = psi.dim();
    let m = d.as_usize();
    let dim = reduced_dim(d, 3)?;
    let mut rho = linalg::identity(dim);
    let word = |a: i64, b: i64| PauliWord::new(d, a, b);
    match which {
        ThreePairSubset::TwoSignals => {
            if m.is_multiple_of(3) {
                let t = d.as_i64() / 3;
                let x_op = tensor_words(d, &[word(t, t), word(t, t), word(2 * t, t)])?;
                let y_op =
                    tensor_words(d, &[word(2 * t, 2 * t), word(2 * t, 2 * t), word(t, 2 * t)])?;
                rho += x_op * three_pair_x1(psi) + y_op * three_pair_y1(psi);
            }
        }
        ThreePairSubset::OneSignal | ThreePairSubset::ThreeSignals => {
            if m.is_multiple_of(2) {
                let h = d.as_i64() / 2;
                let w = word(h, h);
                let i_pow_d = Complex64::new(0.0, 1.0).powu(d.get());
                let leak = i_pow_d * expectation(psi, &w)?;
                rho += tensor_words(d, &[w, w, w])? * leak;
            }
        }
    }
    rho /= Complex64::new(dim as f64, 0.0);
    let p = which.signal_count() as usize;
    let labels = (1..=p)
        .map(Qudit::Signal)
        .chain((p + 1..=3).map(Qudit::Noise))
        .collect();
    Ok(ReducedState {
        d,
        labels,
        matrix: rho,
    })
}

/// `(1/d^2) sum_{k,l} (x)_{i in pairs} (X^k Z^l (x) I)|Phi><Phi|(...)^dagger`
/// on the listed full pairs, laid out canonically as `[S_i..., N_i...]`.
fn bell_mixture(d: Dim, pairs: &[usize]) -> Result<ReducedState> {
    let m = d.as_usize();
    let r = pairs.len();
    let labels: Vec<Qudit> = pairs
        .iter()
        .map(|&i| Qudit::Signal(i))
        .chain(pairs.iter().map(|&i| Qudit::Noise(i)))
        .collect();
    let dim = reduced_dim(d, 2 * r)?;
    let free = checked_pow(m, r).unwrap();
    let amp = (m as f64).powf(-(r as f64) / 2.0);
    let mut rho = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; r];
    let mut vec = vec![ZERO; dim];
    for k in 0..m {
        for l in 0..m {
            vec.iter_mut().for_each(|z| *z = ZERO);
            // (X^k Z^l (x) I)|Phi> = d^-1/2 sum_j w^{lj} |j+k>|j>
            for noise in 0..free {
                linalg::index_digits(noise, m, r, &mut digits);
                let signal = digits.iter().fold(0, |acc, &j| acc * m + (j + k) % m);
                let sum: usize = digits.iter().sum();
                vec[signal * free + noise] =
                    PhaseExponent::omega_pow(d, (l * sum) as i64).to_complex() * amp;
            }
            rho += linalg::projector(&vec);
        }
    }
    rho /= Complex64::new((m * m) as f64, 0.0);
    Ok(ReducedState {
        d,
        labels,
        matrix: rho,
    })
}

/// Input-independent state of the `n - 1` full pairs left after removing pair
/// `missing` (1-based). At `n = 1` this is the trivial 1x1 state.
pub fn missing_pair_reduced(d: Dim, n: usize, missing: usize) -> Result<ReducedState> {
    if missing == 0 || missing > n {
        return Err(Error::InvalidSubset(format!(
            "pair {missing} is outside a register of {n} pairs"
        )));
    }
    let pairs: Vec<usize> = (1..=n).filter(|&i| i != missing).collect();
    bell_mixture(d, &pairs)
}

/// Reduced state of any subset that misses at least one full pair: the Bell
/// mixture over the touched pairs, traced down to the selected qudits.
pub fn uninformative_reduced(d: Dim, subset: &RegisterSubset) -> Result<ReducedState> {
    if subset.touches_all_pairs() {
        return Err(Error::InvalidSubset(format!(
            "{subset} does not miss a complete pair"
        )));
    }
    let touched: Vec<usize> = (1..=subset.n())
        .filter(|i| !subset.missing_pairs().contains(i))
        .collect();
    let mixture = bell_mixture(d, &touched)?;
    mixture.partial_trace(&subset.qudits())
}
