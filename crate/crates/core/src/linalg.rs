//! Dense complex-matrix kernels that every other module builds on.
//!
//! Provides the Hermitian eigendecomposition, positive-semidefinite matrix
//! functions (square root, pseudo-inverse), the Kronecker product,
//! column-stacking vectorisation, and the real-symmetric embedding used by
//! the semidefinite-program solver.
//!
//! Conventions fixed repo-wide:
//! - vectorisation is **column-stacking**: `vec(A)` concatenates the columns
//!   of `A` top to bottom, so that `vec(A X B) = (Bᵀ ⊗ A) vec(X)`;
//! - all numerical tolerances are expressed **relative to the
//!   largest-magnitude entry** of the input, since operators encountered in
//!   parameter sweeps span several orders of magnitude.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Dense dynamically-sized complex matrix.
pub type CMatrix = DMatrix<C64>;
/// Dense dynamically-sized real matrix.
pub type RMatrix = DMatrix<f64>;
/// Dense dynamically-sized complex column vector.
pub type CVector = DVector<C64>;
/// Dense dynamically-sized real column vector.
pub type RVector = DVector<f64>;

/// Relative tolerance for the Hermiticity invariant.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Largest entry magnitude of a complex matrix (`0` for empty input).
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude of a real matrix (`0` for empty input).
pub fn max_abs_real(a: &RMatrix) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Hermitian part `(A + A†)/2`, used to remove rounding-level asymmetry from
/// quantities that are Hermitian by construction.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Complex identity matrix of dimension `d`.
pub fn identity_c(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Maximum deviation from Hermiticity, `max |A - A†|`.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// Checks the Hermiticity invariant: `max |A - A†| ≤ tol_rel · (1 + max |A|)`.
pub fn check_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = hermiticity_deviation(a);
    let tol = HERMITICITY_TOL * (1.0 + max_abs(a));
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    Ok(())
}

/// Checks that `S` is skew-Hermitian: `max |S + S†| ≤ tol_rel · (1 + max |S|)`.
pub fn check_skew_hermitian(s: &CMatrix) -> Result<()> {
    let deviation = max_abs(&(s + s.adjoint()));
    if deviation > 1e-10 * (1.0 + max_abs(s)) {
        return Err(Error::NotSkew(deviation));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns the eigenvalues in ascending order together with the matrix whose
/// columns are the corresponding orthonormal eigenvectors, so that
/// `A = V diag(λ) V†`.
///
/// The decomposition is computed through the real-symmetric embedding
/// `((Re A, -Im A), (Im A, Re A))`, whose spectrum is that of `A` with every
/// eigenvalue doubled; each doubled pair contributes exactly one complex
/// eigenvector direction, recovered by a complex Gram-Schmidt pass. The
/// phase of each eigenvector is fixed by making its largest-magnitude
/// component real and positive, which keeps results deterministic.
///
/// # Errors
/// Returns [`Error::NotHermitian`] when the input violates the Hermiticity
/// invariant and [`Error::Eigen`] if the expected number of independent
/// eigenvectors cannot be recovered.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_hermitian(a)?;
    let d = a.nrows();
    if d == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let embedded = real_embed(a);
    let (eig_values, eig_vectors) = jacobi_eigen(&embedded);

    // Sort the 2d real eigenpairs by ascending eigenvalue.
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&i, &j| {
        eig_values[i]
            .partial_cmp(&eig_values[j])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });

    let mut eigenvalues = Vec::with_capacity(d);
    let mut vectors: Vec<CVector> = Vec::with_capacity(d);
    for &idx in &order {
        if vectors.len() == d {
            break;
        }
        let w = eig_vectors.column(idx);
        // Candidate complex vector v = x + i y from the embedding split.
        let mut v = CVector::from_fn(d, |r, _| C64::new(w[r], w[d + r]));
        // Remove the components along already-accepted eigenvectors. For
        // non-degenerate eigenvalues this only strips the i·v duplicate that
        // the doubled embedding spectrum produces; inside degenerate
        // clusters it enforces orthonormality.
        for u in &vectors {
            let overlap: C64 = u.dotc(&v);
            v -= u * overlap;
        }
        let norm = v.norm();
        if norm < 0.5 {
            // Dependent duplicate of an accepted direction; skip it.
            continue;
        }
        v /= C64::new(norm, 0.0);
        fix_phase(&mut v);
        eigenvalues.push(eig_values[idx]);
        vectors.push(v);
    }
    if vectors.len() != d {
        return Err(Error::Eigen(format!(
            "recovered {} of {} eigenvectors from the real embedding",
            vectors.len(),
            d
        )));
    }
    let v = CMatrix::from_columns(&vectors);
    Ok((eigenvalues, v))
}

/// Eigenvalues only, ascending, of a Hermitian matrix.
pub fn hermitian_eigvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let d = a.nrows();
    let embedded = real_embed(a);
    let (values, _) = jacobi_eigen(&embedded);
    let mut all: Vec<f64> = values.iter().copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    // The embedding doubles every multiplicity; take every other value.
    Ok((0..d).map(|i| all[2 * i]).collect())
}

/// Eigendecomposition of a real symmetric matrix by the cyclic Jacobi
/// rotation method.
///
/// Chosen over a tridiagonal-QR route because Jacobi keeps full accuracy on
/// clustered and exactly degenerate spectra (which tensor-product operators
/// produce routinely) and is entirely deterministic. Returns unsorted
/// eigenvalues with matching eigenvector columns (`A = V diag(λ) Vᵀ`).
pub fn jacobi_eigen(a: &RMatrix) -> (RVector, RMatrix) {
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = RMatrix::identity(n, n);
    let scale = max_abs_real(&m).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                // Classic Jacobi rotation annihilating m[(p, q)].
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let mrp = m[(r, p)];
                    let mrq = m[(r, q)];
                    m[(r, p)] = c * mrp - s * mrq;
                    m[(r, q)] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[(p, r)];
                    let mqr = m[(q, r)];
                    m[(p, r)] = c * mpr - s * mqr;
                    m[(q, r)] = s * mpr + c * mqr;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    (RVector::from_fn(n, |i, _| m[(i, i)]), v)
}

/// Smallest eigenvalue of a real symmetric matrix (Jacobi-based).
pub fn min_symmetric_eigenvalue(a: &RMatrix) -> f64 {
    let (values, _) = jacobi_eigen(a);
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rotates the global phase of `v` so its largest-magnitude component is
/// real and positive.
fn fix_phase(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_norm {
            best_norm = z.norm();
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / C64::new(best_norm, 0.0);
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

/// Applies a real function to the spectrum of a Hermitian matrix:
/// `f(A) = V diag(f(λ)) V†`.
pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (eigenvalues, v) = hermitian_eig(a)?;
    let d = a.nrows();
    let mut scaled = v.clone();
    for (j, &lambda) in eigenvalues.iter().enumerate().take(d) {
        let factor = C64::new(f(lambda), 0.0);
        for i in 0..d {
            scaled[(i, j)] *= factor;
        }
    }
    Ok(&scaled * v.adjoint())
}

/// Unique positive-semidefinite square root of a PSD Hermitian matrix.
///
/// Eigenvalues in `[-tol, 0)` with `tol = 1e-10 · (1 + max |λ|)` are clamped
/// to zero; anything more negative is reported as a non-PSD input.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eigenvalues = hermitian_eigvalues(a)?;
    let scale = eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let clamp_tol = 1e-10 * (1.0 + scale);
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -clamp_tol {
        return Err(Error::NotPsd {
            min_eigenvalue,
        });
    }
    hermitian_function(a, |l| if l > 0.0 { l.sqrt() } else { 0.0 })
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix by spectral inversion.
///
/// Eigenvalues with `|λ| ≤ rank_tol` are mapped to zero, the rest to `1/λ`.
/// When `rank_tol` is `None` the default `1e-10 · max |λ|` is used.
pub fn psd_pinv(a: &CMatrix, rank_tol: Option<f64>) -> Result<CMatrix> {
    let eigenvalues = hermitian_eigvalues(a)?;
    let scale = eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let tol = rank_tol.unwrap_or(1e-10 * scale);
    if let Some(t) = rank_tol {
        if t <= 0.0 {
            return Err(Error::Config(format!("rank_tol must be positive, got {t}")));
        }
    }
    hermitian_function(a, |l| if l.abs() > tol { 1.0 / l } else { 0.0 })
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorisation: `vec(((a,b),(c,d))) = (a, c, b, d)ᵀ`.
pub fn vec_mat(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vec_mat`]: reshapes a length `rows·cols` vector into a
/// matrix, filling column by column.
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape a vector of length {} into a {}x{} matrix",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(CMatrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Real-symmetric embedding `((Re A, -Im A), (Im A, Re A))` of a Hermitian
/// matrix.
///
/// The embedding is symmetric and carries the spectrum of `A` with every
/// eigenvalue doubled in multiplicity, which makes it the bridge between
/// complex Hermitian constraints and the real cone used by the SDP solver.
pub fn real_embed(a: &CMatrix) -> RMatrix {
    let d = a.nrows();
    RMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, r) = (i / d, i % d);
        let (bj, c) = (j / d, j % d);
        match (bi, bj) {
            (0, 0) | (1, 1) => a[(r, c)].re,
            (0, 1) => -a[(r, c)].im,
            (1, 0) => a[(r, c)].im,
            _ => unreachable!(),
        }
    })
}

/// Real part of the trace of a complex matrix.
pub fn trace_re(a: &CMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// True when every entry of `a` outside the main diagonal is below
/// `tol · (1 + max |A|)`.
pub fn is_diagonal(a: &CMatrix, tol: f64) -> bool {
    let bound = tol * (1.0 + max_abs(a));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j && a[(i, j)].norm() > bound {
                return false;
            }
        }
    }
    true
}
