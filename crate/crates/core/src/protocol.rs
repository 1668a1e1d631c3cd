//! The encrypted-cloning register and the brute-force reduced-state oracle.
//!
//! Subsystem layout of the full register is fixed as
//! `[A, S1, N1, S2, N2, ..., Sn, Nn]`, composed row-major (A is the most
//! significant digit). Reduced states list their kept qudits in canonical
//! order: signals by ascending pair index, then noises by ascending pair index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, checked_pow, ComplexMatrix, ZERO};
use crate::modnum::Dim;
use crate::pauli::{enc_coefficient, PhaseExponent, PureState};

/// Largest encoder matrix dimension `d^(n+1)` we build densely.
pub const ENCODER_DIM_LIMIT: usize = 4096;
/// Largest register statevector `d^(2n+1)`.
pub const STATE_AMPLITUDE_LIMIT: usize = 10_000_000;
/// Largest reduced density matrix dimension `d^m`.
pub const REDUCED_DIM_LIMIT: usize = 729;

/// One qudit of the storage register; pair indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qudit {
    Signal(usize),
    Noise(usize),
}

impl Qudit {
    pub fn pair(self) -> usize {
        match self {
            Qudit::Signal(i) | Qudit::Noise(i) => i,
        }
    }

    /// Position in the full register layout.
    pub fn site(self) -> usize {
        match self {
            Qudit::Signal(i) => 2 * i - 1,
            Qudit::Noise(i) => 2 * i,
        }
    }
}

impl fmt::Display for Qudit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qudit::Signal(i) => write!(f, "S{i}"),
            Qudit::Noise(i) => write!(f, "N{i}"),
        }
    }
}

impl FromStr for Qudit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSubset(format!("cannot parse qudit label {s:?}"));
        let (kind, idx) = s.split_at_checked(1).ok_or_else(bad)?;
        let i: usize = idx.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match kind {
            "S" | "s" => Ok(Qudit::Signal(i)),
            "N" | "n" => Ok(Qudit::Noise(i)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    None,
    Signal,
    Noise,
    Both,
}

impl Membership {
    fn has_signal(self) -> bool {
        matches!(self, Membership::Signal | Membership::Both)
    }

    fn has_noise(self) -> bool {
        matches!(self, Membership::Noise | Membership::Both)
    }
}

/// Which qudits of each of the `n` pairs are selected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterSubset {
    pairs: Vec<Membership>,
}

impl RegisterSubset {
    pub fn new(pairs: Vec<Membership>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidSubset("register has no pairs".into()));
        }
        if pairs.iter().all(|&m| m == Membership::None) {
            return Err(Error::InvalidSubset("subset selects no qudits".into()));
        }
        Ok(RegisterSubset { pairs })
    }

    pub fn from_qudits(n: usize, qudits: &[Qudit]) -> Result<Self> {
        let mut pairs = vec![Membership::None; n];
        for &q in qudits {
            let i = q.pair();
            if i == 0 || i > n {
                return Err(Error::InvalidSubset(format!(
                    "{q} is outside a register of {n} pairs"
                )));
            }
            let slot = &mut pairs[i - 1];
            *slot = match (q, *slot) {
                (Qudit::Signal(_), Membership::None) => Membership::Signal,
                (Qudit::Noise(_), Membership::None) => Membership::Noise,
                (Qudit::Signal(_), Membership::Noise) | (Qudit::Noise(_), Membership::Signal) => {
                    Membership::Both
                }
                _ => return Err(Error::InvalidSubset(format!("{q} listed twice"))),
            };
        }
        RegisterSubset::new(pairs)
    }

    /// Parses comma-separated labels such as `S1,S2,N3`.
    pub fn parse(n: usize, labels: &str) -> Result<Self> {
        let qudits = parse_labels(labels)?;
        RegisterSubset::from_qudits(n, &qudits)
    }

    /// `{S1..Sp, N(p+1)..Nn}`.
    pub fn aligned(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p > n {
            return Err(Error::InvalidSubset(format!(
                "aligned subset needs 0 <= p <= n, n >= 1 (n={n}, p={p})"
            )));
        }
        Ok(RegisterSubset {
            pairs: (0..n)
                .map(|i| {
                    if i < p {
                        Membership::Signal
                    } else {
                        Membership::Noise
                    }
                })
                .collect(),
        })
    }

    /// Every nonempty subset of a register with `n` pairs (`4^n - 1` of them).
    pub fn all(n: usize) -> Vec<RegisterSubset> {
        const CHOICES: [Membership; 4] = [
            Membership::None,
            Membership::Signal,
            Membership::Noise,
            Membership::Both,
        ];
        let total = 4usize.pow(n as u32);
        (1..total)
            .map(|mut code| {
                let pairs = (0..n)
                    .map(|_| {
                        let m = CHOICES[code % 4];
                        code /= 4;
                        m
                    })
                    .collect();
                RegisterSubset { pairs }
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[Membership] {
        &self.pairs
    }

    pub fn touches_all_pairs(&self) -> bool {
        self.pairs.iter().all(|&m| m != Membership::None)
    }

    pub fn complete_pairs(&self) -> usize {
        self.pairs
            .iter()
            .filter(|&&m| m == Membership::Both)
            .count()
    }

    pub fn has_complete_pair(&self) -> bool {
        self.complete_pairs() > 0
    }

    /// Exactly one qudit from every pair.
    pub fn is_aligned(&self) -> bool {
        self.pairs
            .iter()
            .all(|&m| matches!(m, Membership::Signal | Membership::Noise))
    }

    pub fn missing_pairs(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|&i| self.pairs[i - 1] == Membership::None)
            .collect()
    }

    /// Signal count `p` when aligned.
    pub fn signal_count(&self) -> usize {
        self.pairs.iter().filter(|m| m.has_signal()).count()
    }

    pub fn noise_count(&self) -> usize {
        self.pairs.iter().filter(|m| m.has_noise()).count()
    }

    /// Selected qudits in canonical order.
    pub fn qudits(&self) -> Vec<Qudit> {
        let signals = (1..=self.n())
            .filter(|&i| self.pairs[i - 1].has_signal())
            .map(Qudit::Signal);
        let noises = (1..=self.n())
            .filter(|&i| self.pairs[i - 1].has_noise())
            .map(Qudit::Noise);
        signals.chain(noises).collect()
    }

    pub fn len(&self) -> usize {
        self.signal_count() + self.noise_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same selection with extra qudits added.
    pub fn with(&self, extra: Qudit) -> Result<Self> {
        let mut qs = self.qudits();
        if !qs.contains(&extra) {
            qs.push(extra);
        }
        RegisterSubset::from_qudits(self.n(), &qs)
    }
}

impl fmt::Display for RegisterSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.qudits().iter().map(Qudit::to_string).collect();
        f.write_str(&labels.join(","))
    }
}

pub fn parse_labels(labels: &str) -> Result<Vec<Qudit>> {
    labels
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Shape of the full register `[A, S1, N1, ..., Sn, Nn]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Register {
    pub d: Dim,
    pub n: usize,
}

impl Register {
    pub fn new(d: Dim, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("register needs at least one pair".into()));
        }
        Ok(Register { d, n })
    }

    pub fn qudit_count(&self) -> usize {
        2 * self.n + 1
    }

    pub fn total_dim(&self) -> Result<usize> {
        let needed = checked_pow(self.d.as_usize(), self.qudit_count());
        match needed {
            Some(v) if v <= STATE_AMPLITUDE_LIMIT => Ok(v),
            _ => Err(Error::Capacity {
                what: "register statevector",
                needed: (self.d.get() as u128).saturating_pow(self.qudit_count() as u32),
                limit: STATE_AMPLITUDE_LIMIT as u128,
            }),
        }
    }
}

/// Encoded statevector of the full register.
#[derive(Debug, Clone)]
pub struct RegisterState {
    pub register: Register,
    pub amplitudes: Vec<Complex64>,
}

impl RegisterState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Density matrix over the given layout sites, in that order, contracted
    /// directly from the statevector.
    pub fn reduce_sites(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let d = self.register.d.as_usize();
        let m = self.register.qudit_count();
        let keep_dim = reduced_dim(self.register.d, keep.len())?;
        let rest: Vec<usize> = (0..m).filter(|s| !keep.contains(s)).collect();
        if rest.len() + keep.len() != m {
            return Err(Error::InvalidSubset(format!("bad site list {keep:?}")));
        }
        let rest_dim = checked_pow(d, rest.len()).unwrap();

        let mut strides = vec![0usize; m];
        let mut s = 1;
        for k in (0..m).rev() {
            strides[k] = s;
            s *= d;
        }
        let offsets = |sites: &[usize], count: usize| -> Vec<usize> {
            let mut digits = vec![0usize; sites.len()];
            (0..count)
                .map(|i| {
                    linalg::index_digits(i, d, sites.len(), &mut digits);
                    sites
                        .iter()
                        .zip(&digits)
                        .map(|(&site, &v)| v * strides[site])
                        .sum()
                })
                .collect()
        };
        let keep_off = offsets(keep, keep_dim);
        let rest_off = offsets(&rest, rest_dim);

        // M[i, j] = psi[keep_i + rest_j], rho = M M^dagger
        let mut mat = ComplexMatrix::zeros(keep_dim, rest_dim);
        for (i, &ko) in keep_off.iter().enumerate() {
            for (j, &ro) in rest_off.iter().enumerate() {
                mat[(i, j)] = self.amplitudes[ko + ro];
            }
        }
        Ok(&mat * mat.adjoint())
    }

    pub fn reduce(&self, subset: &RegisterSubset) -> Result<ReducedState> {
        if subset.n() != self.register.n {
            return Err(Error::DimensionMismatch {
                expected: self.register.n,
                got: subset.n(),
            });
        }
        let labels = subset.qudits();
        let sites: Vec<usize> = labels.iter().map(|q| q.site()).collect();
        let matrix = self.reduce_sites(&sites)?;
        Ok(ReducedState {
            d: self.register.d,
            labels,
            matrix,
        })
    }
}

pub(crate) fn reduced_dim(d: Dim, m: usize) -> Result<usize> {
    match checked_pow(d.as_usize(), m) {
        Some(v) if v <= REDUCED_DIM_LIMIT => Ok(v),
        _ => Err(Error::Capacity {
            what: "reduced density matrix",
            needed: (d.get() as u128).saturating_pow(m as u32),
            limit: REDUCED_DIM_LIMIT as u128,
        }),
    }
}

/// Density matrix on a list of register qudits.
#[derive(Debug, Clone)]
pub struct ReducedState {
    pub d: Dim,
    pub labels: Vec<Qudit>,
    pub matrix: ComplexMatrix,
}

/// Deviations of a matrix from being a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_error <= tol && self.trace_error <= tol && self.min_eigenvalue >= -tol
    }
}

pub const STATE_TOL: f64 = 1e-10;

impl ReducedState {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let eig = linalg::hermitian_eigenvalues(&self.matrix);
        StateDiagnostics {
            hermiticity_error: linalg::hermiticity_error(&self.matrix),
            trace_error: (self.matrix.trace() - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: eig.first().copied().unwrap_or(0.0),
        }
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    fn positions(&self, qudits: &[Qudit]) -> Result<Vec<usize>> {
        qudits
            .iter()
            .map(|q| {
                self.labels
                    .iter()
                    .position(|l| l == q)
                    .ok_or_else(|| Error::InvalidSubset(format!("{q} is not part of this state")))
            })
            .collect()
    }

    /// Traces out everything except `keep`, returned in the order given.
    pub fn partial_trace(&self, keep: &[Qudit]) -> Result<ReducedState> {
        let pos = self.positions(keep)?;
        let matrix =
            linalg::partial_trace(&self.matrix, self.d.as_usize(), self.labels.len(), &pos)?;
        Ok(ReducedState {
            d: self.d,
            labels: keep.to_vec(),
            matrix,
        })
    }

    /// Same state with its qudits listed in `order`.
    pub fn permuted(&self, order: &[Qudit]) -> Result<ReducedState> {
        if order.len() != self.labels.len() {
            return Err(Error::InvalidSubset(
                "permutation must list every qudit once".into(),
            ));
        }
        let pos = self.positions(order)?;
        let matrix =
            linalg::permute_subsystems(&self.matrix, self.d.as_usize(), self.labels.len(), &pos)?;
        Ok(ReducedState {
            d: self.d,
            labels: order.to_vec(),
            matrix,
        })
    }

    pub fn maximally_mixed_like(&self) -> ComplexMatrix {
        linalg::maximally_mixed(self.dim())
    }

    /// Flat row-major `[re, im]` pairs.
    pub fn flat_entries(&self) -> Vec<[f64; 2]> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let z = self.matrix[(i, j)];
                [z.re, z.im]
            })
            .collect()
    }
}

/// `(1/sqrt d) sum_k |k>|k>` as a `d^2` amplitude vector.
pub fn bell_state(d: Dim) -> Vec<Complex64> {
    let m = d.as_usize();
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; m * m];
    for k in 0..m {
        v[k * m + k] = amp;
    }
    v
}

fn encoder_dim(d: Dim, n: usize) -> Result<usize> {
    match checked_pow(d.as_usize(), n + 1) {
        Some(v) if v <= ENCODER_DIM_LIMIT => Ok(v),
        _ => Err(Error::Capacity {
            what: "encoder matrix",
            needed: (d.get() as u128).saturating_pow(n as u32 + 1),
            limit: ENCODER_DIM_LIMIT as u128,
        }),
    }
}

/// Dense `(1/d) sum_{k,l} c_kl (X^k Z^l)^{(n+1)}` on `[A, S1, ..., Sn]`.
pub fn build_encoder(d: Dim, n: usize) -> Result<ComplexMatrix> {
    let dim = encoder_dim(d, n)?;
    let m = d.as_usize();
    let sites = n + 1;
    let scale = 1.0 / m as f64;
    let mut u = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; sites];
    for col in 0..dim {
        linalg::index_digits(col, m, sites, &mut digits);
        let digit_sum: usize = digits.iter().sum();
        for k in 0..m {
            let row = digits.iter().fold(0, |acc, &v| acc * m + (v + k) % m);
            for l in 0..m {
                let ph = enc_coefficient(d, k as u32, l as u32)
                    * PhaseExponent::omega_pow(d, (l * digit_sum) as i64);
                u[(row, col)] += ph.to_complex() * scale;
            }
        }
    }
    Ok(u)
}

/// `|psi>_A (x) |Phi>^{(x) n}` in the register layout.
pub fn initial_state(psi: &PureState, n: usize) -> Result<RegisterState> {
    let d = psi.dim();
    let register = Register::new(d, n)?;
    let total = register.total_dim()?;
    let m = d.as_usize();
    let bell_amp = (m as f64).powf(-(n as f64) / 2.0);
    let mut amplitudes = vec![ZERO; total];
    let pairs = checked_pow(m, n).unwrap();
    let mut digits = vec![0usize; n];
    for (x, &a) in psi.amplitudes().iter().enumerate() {
        for shared in 0..pairs {
            linalg::index_digits(shared, m, n, &mut digits);
            let idx = digits.iter().fold(x, |acc, &v| (acc * m + v) * m + v);
            amplitudes[idx] = a * bell_amp;
        }
    }
    Ok(RegisterState {
        register,
        amplitudes,
    })
}

/// Applies the encoder to the `[A, S1..Sn]` sites of an arbitrary register
/// state, identity on the noise qudits.
pub fn apply_encoder(state: &RegisterState) -> RegisterState {
    let Register { d, n } = state.register;
    let m = d.as_usize();
    let sites = 2 * n + 1;
    let mut strides = vec![0usize; sites];
    let mut s = 1;
    for k in (0..sites).rev() {
        strides[k] = s;
        s *= m;
    }
    let acted: Vec<usize> = std::iter::once(0)
        .chain((1..=n).map(|i| 2 * i - 1))
        .collect();
    // weight[k][t] = (1/d) sum_l c_kl w^{l t}, t = sum of acted digits mod d
    let scale = 1.0 / m as f64;
    let weight: Vec<Complex64> = (0..m * m)
        .map(|idx| {
            let (k, t) = (idx / m, idx % m);
            (0..m)
                .map(|l| {
                    (enc_coefficient(d, k as u32, l as u32)
                        * PhaseExponent::omega_pow(d, (l * t) as i64))
                    .to_complex()
                })
                .sum::<Complex64>()
                * scale
        })
        .collect();

    let mut out = vec![ZERO; state.amplitudes.len()];
    let mut digits = vec![0usize; sites];
    for (idx, &amp) in state.amplitudes.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        linalg::index_digits(idx, m, sites, &mut digits);
        let t = acted.iter().map(|&site| digits[site]).sum::<usize>() % m;
        for k in 0..m {
            // shift every acted digit by k
            let target = acted.iter().fold(idx, |acc, &site| {
                let old = digits[site];
                acc + ((old + k) % m) * strides[site] - old * strides[site]
            });
            out[target] += weight[k * m + t] * amp;
        }
    }
    RegisterState {
        register: state.register,
        amplitudes: out,
    }
}

/// Encoded register state `(U_enc (x) I) |psi>|Phi>^n`.
pub fn encode(psi: &PureState, n: usize) -> Result<RegisterState> {
    let init = initial_state(psi, n)?;
    Ok(apply_encoder(&init))
}

/// Reduced state of `subset` computed from the encoded statevector (A traced out).
pub fn oracle_reduced(psi: &PureState, n: usize, subset: &RegisterSubset) -> Result<ReducedState> {
    if subset.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: subset.n(),
        });
    }
    reduced_dim(psi.dim(), subset.len())?;
    encode(psi, n)?.reduce(subset)
}
