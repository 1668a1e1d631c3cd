//! Modular arithmetic for the aligned-subset congruence system
//!
//! ```text
//! a + p*b     = 0 (mod d)
//! a*(1+q) + b = 0 (mod d)
//! ```
//!
//! Eliminating `a = -p*b` leaves `b*(p(q+1) - 1) = 0 (mod d)`, so the solutions
//! are indexed by `v = 0..g` with `g = gcd(d, p(q+1) - 1)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Local dimension of every qudit in the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dim(u32);

impl Dim {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Dim(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }

    /// `d mod 2`, the parity offset in the encoder phases.
    #[inline]
    pub fn delta(self) -> i64 {
        (self.0 % 2) as i64
    }

    /// Canonical representative of `x` in `0..d`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.as_i64()) as u32
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u32> for Dim {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dim::new(d)
    }
}

/// Greatest common divisor of `|u|` and `|v|`; `gcd(u, 0) = |u|`.
pub fn gcd(u: i64, v: i64) -> Result<u64> {
    if u == 0 && v == 0 {
        return Err(Error::Domain("gcd(0, 0) is undefined".into()));
    }
    let (mut a, mut b) = (u.unsigned_abs(), v.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceSolutionSet {
    pub d: Dim,
    pub p: u32,
    pub q: u32,
    /// Number of solutions; equals `gcd(d, p(q+1) - 1)` for the closed form.
    pub g: u32,
    pub solutions: Vec<(u32, u32)>,
}

impl CongruenceSolutionSet {
    pub fn as_set(&self) -> BTreeSet<(u32, u32)> {
        self.solutions.iter().copied().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.g == 1
    }

    /// Solutions other than `(0, 0)`.
    pub fn nontrivial(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.solutions.iter().copied().filter(|&s| s != (0, 0))
    }
}

/// True when `(a, b)` solves both congruences.
pub fn satisfies_system(d: Dim, p: u32, q: u32, a: i64, b: i64) -> bool {
    let m = d.as_i64();
    let (p, q) = (p as i64, q as i64);
    (a + p * b).rem_euclid(m) == 0 && (a * (1 + q) + b).rem_euclid(m) == 0
}

/// `gcd(d, p(q+1) - 1)`.
pub fn aligned_gcd(d: Dim, p: u32, q: u32) -> u32 {
    let key = p as i64 * (q as i64 + 1) - 1;
    // d >= 2 so the gcd is always defined
    gcd(d.as_i64(), key).expect("d is nonzero") as u32
}

fn check_counts(p: u32, q: u32) -> Result<()> {
    if p + q == 0 {
        return Err(Error::Domain("aligned subset needs p + q >= 1".into()));
    }
    Ok(())
}

/// Closed-form solution set, ordered by the index `v`.
pub fn solve_aligned_system(d: Dim, p: u32, q: u32) -> Result<CongruenceSolutionSet> {
    check_counts(p, q)?;
    let g = aligned_gcd(d, p, q);
    let step = d.as_i64() / g as i64;
    let solutions = (0..g as i64)
        .map(|v| (d.reduce(-(p as i64) * v * step), d.reduce(v * step)))
        .collect();
    Ok(CongruenceSolutionSet {
        d,
        p,
        q,
        g,
        solutions,
    })
}

/// Brute-force scan of `Z_d x Z_d`; independent check on [`solve_aligned_system`].
pub fn enumerate_system(d: Dim, p: u32, q: u32) -> Result<CongruenceSolutionSet> {
    check_counts(p, q)?;
    let m = d.get();
    let solutions: Vec<(u32, u32)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|&(a, b)| satisfies_system(d, p, q, a as i64, b as i64))
        .collect();
    Ok(CongruenceSolutionSet {
        d,
        p,
        q,
        g: solutions.len() as u32,
        solutions,
    })
}
