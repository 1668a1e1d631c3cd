//! Generalized Pauli (Weyl-Heisenberg) words `e^{i pi r/d} X^a Z^b` with exact phases.
//!
//! `X|k> = |k+1>` and `Z|k> = w^k |k>` with `w = e^{2 pi i/d}`. Words are kept
//! normal-ordered (X-power left of Z-power); moving `Z^b` past `X^a` costs
//! `Z^b X^a = w^{ab} X^a Z^b`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::modnum::Dim;

/// The unit `e^{i pi r / d}`, stored as `r mod 2d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseExponent {
    d: Dim,
    r: u32,
}

impl PhaseExponent {
    pub fn new(d: Dim, r: i64) -> Self {
        let r = r.rem_euclid(2 * d.as_i64()) as u32;
        PhaseExponent { d, r }
    }

    pub fn one(d: Dim) -> Self {
        PhaseExponent { d, r: 0 }
    }

    /// `w^k = e^{2 pi i k/d}`.
    pub fn omega_pow(d: Dim, k: i64) -> Self {
        PhaseExponent::new(d, 2 * k)
    }

    pub fn exponent(self) -> u32 {
        self.r
    }

    pub fn dim(self) -> Dim {
        self.d
    }

    pub fn conj(self) -> Self {
        PhaseExponent::new(self.d, -(self.r as i64))
    }

    pub fn to_complex(self) -> Complex64 {
        let m = 2 * self.d.get();
        // exact values at the quarter turns
        if self.r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if 2 * self.r == m {
            return Complex64::new(-1.0, 0.0);
        }
        if 4 * self.r == m {
            return Complex64::new(0.0, 1.0);
        }
        if 4 * self.r == 3 * m {
            return Complex64::new(0.0, -1.0);
        }
        Complex64::from_polar(1.0, PI * self.r as f64 / self.d.get() as f64)
    }
}

impl std::ops::Mul for PhaseExponent {
    type Output = PhaseExponent;
    fn mul(self, rhs: PhaseExponent) -> PhaseExponent {
        assert_eq!(self.d, rhs.d, "phase exponents from different dimensions");
        PhaseExponent::new(self.d, self.r as i64 + rhs.r as i64)
    }
}

/// Exponent of `c_kl = e^{-i pi k(k+delta)/d} e^{-i pi l(l+delta)/d}`.
pub fn enc_coefficient(d: Dim, k: u32, l: u32) -> PhaseExponent {
    let delta = d.delta();
    let (k, l) = (k as i64, l as i64);
    PhaseExponent::new(d, -(k * (k + delta) + l * (l + delta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    pub d: Dim,
    pub a: u32,
    pub b: u32,
    pub phase: PhaseExponent,
}

/// Flat serialized form `{d, a, b, r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PauliWordRecord {
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub r: u32,
}

impl PauliWord {
    /// `X^a Z^b` with unit phase; exponents are taken mod `d`.
    pub fn new(d: Dim, a: i64, b: i64) -> Self {
        PauliWord {
            d,
            a: d.reduce(a),
            b: d.reduce(b),
            phase: PhaseExponent::one(d),
        }
    }

    pub fn with_phase(d: Dim, a: i64, b: i64, r: i64) -> Self {
        PauliWord {
            phase: PhaseExponent::new(d, r),
            ..PauliWord::new(d, a, b)
        }
    }

    pub fn identity(d: Dim) -> Self {
        PauliWord::new(d, 0, 0)
    }

    pub fn x(d: Dim) -> Self {
        PauliWord::new(d, 1, 0)
    }

    pub fn z(d: Dim) -> Self {
        PauliWord::new(d, 0, 1)
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0 && self.phase.r == 0
    }

    pub fn record(&self) -> PauliWordRecord {
        PauliWordRecord {
            d: self.d.get(),
            a: self.a,
            b: self.b,
            r: self.phase.r,
        }
    }

    /// Word with the same powers and unit phase.
    pub fn unphased(&self) -> Self {
        PauliWord::new(self.d, self.a as i64, self.b as i64)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase.r != 0 {
            write!(f, "e^(i*pi*{}/{})*", self.phase.r, self.d)?;
        }
        write!(f, "X^{} Z^{}", self.a, self.b)
    }
}

/// Dense `d x d` realization: column `k` holds `phase * w^{bk}` in row `k + a`.
pub fn word_matrix(w: &PauliWord) -> ComplexMatrix {
    let d = w.d.as_usize();
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let ph = w.phase * PhaseExponent::omega_pow(w.d, w.b as i64 * k as i64);
        m[((k + w.a as usize) % d, k)] = ph.to_complex();
    }
    m
}

pub fn word_product(w1: &PauliWord, w2: &PauliWord) -> Result<PauliWord> {
    if w1.d != w2.d {
        return Err(Error::DimensionMismatch {
            expected: w1.d.as_usize(),
            got: w2.d.as_usize(),
        });
    }
    let d = w1.d;
    let swap = PhaseExponent::omega_pow(d, w1.b as i64 * w2.a as i64);
    Ok(PauliWord {
        d,
        a: d.reduce(w1.a as i64 + w2.a as i64),
        b: d.reduce(w1.b as i64 + w2.b as i64),
        phase: w1.phase * w2.phase * swap,
    })
}

/// `(c X^a Z^b)^dagger = c* Z^{-b} X^{-a} = c* w^{ab} X^{-a} Z^{-b}`.
pub fn word_dagger(w: &PauliWord) -> PauliWord {
    let d = w.d;
    PauliWord {
        d,
        a: d.reduce(-(w.a as i64)),
        b: d.reduce(-(w.b as i64)),
        phase: w.phase.conj() * PhaseExponent::omega_pow(d, w.a as i64 * w.b as i64),
    }
}

/// Single-qudit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    d: Dim,
    amplitudes: Vec<Complex64>,
}

pub const NORM_TOL: f64 = 1e-12;

impl PureState {
    pub fn new(d: Dim, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != d.as_usize() {
            return Err(Error::DimensionMismatch {
                expected: d.as_usize(),
                got: amplitudes.len(),
            });
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(n2));
        }
        Ok(PureState { d, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(d: Dim, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Unnormalized(n * n));
        }
        PureState::new(d, amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn basis(d: Dim, k: usize) -> Result<Self> {
        if k >= d.as_usize() {
            return Err(Error::Domain(format!(
                "basis index {k} out of range for d = {d}"
            )));
        }
        let mut v = vec![ZERO; d.as_usize()];
        v[k] = Complex64::new(1.0, 0.0);
        PureState::new(d, v)
    }

    /// Haar-random state: complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> Self {
        loop {
            let v: Vec<Complex64> = (0..d.as_usize())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = PureState::normalized(d, v) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// `count` reproducible random states drawn from one ChaCha8 stream.
pub fn random_states(d: Dim, count: usize, seed: u64) -> Vec<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| PureState::random(d, &mut rng)).collect()
}

/// `<psi| w |psi>`.
pub fn expectation(psi: &PureState, w: &PauliWord) -> Result<Complex64> {
    if psi.d != w.d {
        return Err(Error::DimensionMismatch {
            expected: w.d.as_usize(),
            got: psi.d.as_usize(),
        });
    }
    let d = w.d.as_usize();
    let amps = &psi.amplitudes;
    let mut acc = ZERO;
    for k in 0..d {
        let ph = PhaseExponent::omega_pow(w.d, w.b as i64 * k as i64).to_complex();
        acc += amps[(k + w.a as usize) % d].conj() * ph * amps[k];
    }
    Ok(acc * w.phase.to_complex())
}
