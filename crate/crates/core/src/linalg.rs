//! Dense complex matrix helpers: Kronecker products, partial traces over
//! qudit subsystems and Hermitian spectra.
//!
//! Multi-qudit indices are composed row-major: for subsystems `s_0, s_1, ...`
//! of dimension `d` the basis index is `s_0 * d^(m-1) + s_1 * d^(m-2) + ...`,
//! so the first subsystem is the most significant digit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// `I / dim`.
pub fn maximally_mixed(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a sequence of factors; the empty product is the 1x1 identity.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Outer product `|v><v|`.
pub fn projector(v: &[Complex64]) -> ComplexMatrix {
    let n = v.len();
    ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// `d^m` as usize, or `None` on overflow.
pub fn checked_pow(d: usize, m: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..m {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

/// Splits a row-major index over `m` subsystems of dimension `d` into digits.
pub fn index_digits(mut index: usize, d: usize, m: usize, out: &mut [usize]) {
    for slot in out[..m].iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Reduced density matrix of `rho` (on `m` qudits of dimension `d`) over the
/// subsystems listed in `keep`, in the order given.
pub fn partial_trace(
    rho: &ComplexMatrix,
    d: usize,
    m: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total = checked_pow(d, m).ok_or(Error::Capacity {
        what: "density matrix",
        needed: u128::MAX,
        limit: usize::MAX as u128,
    })?;
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: rho.nrows(),
        });
    }
    validate_keep(keep, m)?;
    let traced: Vec<usize> = (0..m).filter(|s| !keep.contains(s)).collect();
    let keep_dim = checked_pow(d, keep.len()).unwrap();
    let traced_dim = checked_pow(d, traced.len()).unwrap();

    let mut strides = vec![0usize; m];
    let mut s = 1;
    for k in (0..m).rev() {
        strides[k] = s;
        s *= d;
    }
    let offset = |sites: &[usize], idx: usize| -> usize {
        let mut digits = vec![0usize; sites.len()];
        index_digits(idx, d, sites.len(), &mut digits);
        sites
            .iter()
            .zip(&digits)
            .map(|(&site, &v)| v * strides[site])
            .sum()
    };
    let keep_offsets: Vec<usize> = (0..keep_dim).map(|i| offset(keep, i)).collect();
    let traced_offsets: Vec<usize> = (0..traced_dim).map(|i| offset(&traced, i)).collect();

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for (i, &ri) in keep_offsets.iter().enumerate() {
        for (j, &cj) in keep_offsets.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_offsets {
                acc += rho[(ri + t, cj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reorders the subsystems of a `d^m` matrix: output subsystem `k` is input
/// subsystem `order[k]`.
pub fn permute_subsystems(
    rho: &ComplexMatrix,
    d: usize,
    m: usize,
    order: &[usize],
) -> Result<ComplexMatrix> {
    let total = checked_pow(d, m).unwrap_or(0);
    if rho.nrows() != total || order.len() != m {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: rho.nrows(),
        });
    }
    validate_keep(order, m)?;
    let mut digits = vec![0usize; m];
    let map: Vec<usize> = (0..total)
        .map(|out_idx| {
            index_digits(out_idx, d, m, &mut digits);
            let mut in_digits = vec![0usize; m];
            for (k, &src) in order.iter().enumerate() {
                in_digits[src] = digits[k];
            }
            in_digits.iter().fold(0, |acc, &v| acc * d + v)
        })
        .collect();
    Ok(ComplexMatrix::from_fn(total, total, |i, j| {
        rho[(map[i], map[j])]
    }))
}

fn validate_keep(keep: &[usize], m: usize) -> Result<()> {
    for (i, &k) in keep.iter().enumerate() {
        if k >= m || keep[..i].contains(&k) {
            return Err(Error::InvalidSubset(format!(
                "subsystem list {keep:?} is not a set of indices below {m}"
            )));
        }
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
///
/// The matrix is rescaled to unit max-norm first: the solver can return NaN
/// when every entry sits near the rounding floor.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let (h, scale) = normalized_hermitian_part(m);
    if scale == 0.0 {
        return vec![0.0; m.nrows()];
    }
    let mut eig: Vec<f64> = h
        .symmetric_eigenvalues()
        .iter()
        .map(|e| e * scale)
        .collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Trace norm of the Hermitian part of `m`. Falls back to singular values if
/// the eigensolver does not converge.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    let (h, scale) = normalized_hermitian_part(m);
    if scale == 0.0 {
        return 0.0;
    }
    let eig = h.clone().symmetric_eigenvalues();
    let total = if eig.iter().all(|e| e.is_finite()) {
        eig.iter().map(|e| e.abs()).sum()
    } else {
        h.singular_values().sum()
    };
    total * scale
}

fn normalized_hermitian_part(m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let h = (m + m.adjoint()).scale(0.5);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        (h, 0.0)
    } else {
        (h.unscale(scale), scale)
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u * u.adjoint()), &identity(u.nrows())) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectra_of_rounding_noise_stay_finite() {
        let tiny = ComplexMatrix::from_fn(81, 81, |i, j| {
            let x = ((i * 31 + j * 17) % 13) as f64 - 6.0;
            let y = ((i * 7 + j * 3) % 5) as f64 - 2.0;
            c(x * 1e-18, y * 1e-18)
        });
        let h = (&tiny + tiny.adjoint()).scale(0.5);
        assert!(hermitian_eigenvalues(&h)
            .iter()
            .all(|e| e.is_finite() && e.abs() < 1e-15));
        assert!(trace_norm(&h) < 1e-14);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(4, 4)), 0.0);
        let m = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(-0.25, 0.),
            c(0.5, 0.),
            c(2., 0.),
        ]));
        assert!((trace_norm(&m) - 2.75).abs() < 1e-14);
    }

    #[test]
    fn kron_all_of_nothing_is_scalar_one() {
        let m = kron_all(std::iter::empty());
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], ONE);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)],
        );
        let b = maximally_mixed(3);
        // all subsystems share one dimension, so embed the qubit block in d = 3
        let a3 = ComplexMatrix::from_fn(3, 3, |i, j| if i < 2 && j < 2 { a[(i, j)] } else { ZERO });
        let ab = kron(&a3, &b);
        assert!(max_abs_diff(&partial_trace(&ab, 3, 2, &[0]).unwrap(), &a3) < 1e-14);
        assert!(max_abs_diff(&partial_trace(&ab, 3, 2, &[1]).unwrap(), &b) < 1e-14);
    }

    #[test]
    fn permute_swaps_kron_factors() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c(0.5, (i + 3 * j) as f64));
        let ab = kron(&a, &b);
        let ba = permute_subsystems(&ab, 2, 2, &[1, 0]).unwrap();
        assert!(max_abs_diff(&ba, &kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn keep_list_must_be_distinct() {
        let rho = maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, 2, 2, &[0, 0]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            partial_trace(&rho, 2, 2, &[2]),
            Err(Error::InvalidSubset(_))
        ));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.5, 0.0),
            c(-0.25, 0.0),
            c(2.0, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-0.25, 0.5, 2.0]);
    }
}
