//! Collective (n-copy) probing: direct assembly of the n-copy Q operator
//! and the additivity/sandwich checks that separate phase-insensitive
//! detectors (no advantage from entangled probes) from families with
//! quadratic scaling.

use crate::error::{Error, Result};
use crate::linalg::{
    dagger, hermitian_eigvalues, hermitian_part, identity_c, kron, trace_re, CMatrix,
};
use crate::models::Povm;
use crate::sld::{a_operator, q_operator};

/// Maximum joint dimension `dⁿ` handled by the dense eigensolves.
pub const DIMENSION_CAP: usize = 64;

/// Embeds `op` at one tensor factor (most significant site first, matching
/// the tensor-power model convention) with identities elsewhere.
fn site_operator(op: &CMatrix, site: usize, n: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for s in 0..n {
        out = if s == site {
            kron(&out, op)
        } else {
            kron(&out, &identity_c(d))
        };
    }
    out
}

/// n-copy Q operator assembled from the single-copy `Q = Σ LπL` and
/// `A = Σ Lπ`:
/// `Q⁽ⁿ⁾ = Σ_i Q_i + Σ_{i≠j} A_i A†_j`
/// (subscripts denote the tensor factor the operator acts on).
///
/// Equals the direct construction through the tensor-power model, but
/// avoids the `mⁿ` outcome blow-up.
///
/// # Errors
/// [`Error::DimensionCap`] when `dⁿ > 64`.
pub fn q_ncopy(slds: &[CMatrix], povm: &Povm, n: usize) -> Result<CMatrix> {
    let d = povm.dim();
    if n == 0 {
        return Err(Error::Dimension("copy count must be at least 1".into()));
    }
    if d.pow(n as u32) > DIMENSION_CAP {
        return Err(Error::DimensionCap(format!(
            "joint dimension {}^{} exceeds the cap of {}",
            d, n, DIMENSION_CAP
        )));
    }
    let q = q_operator(slds, povm)?;
    let a = a_operator(slds, povm)?;
    let a_dag = dagger(&a);
    let dim = d.pow(n as u32);
    let mut total = CMatrix::zeros(dim, dim);
    for i in 0..n {
        total += site_operator(&q, i, n, d);
        for j in 0..n {
            if i != j {
                total += site_operator(&a, i, n, d) * site_operator(&a_dag, j, n, d);
            }
        }
    }
    Ok(hermitian_part(&total))
}

/// Spectral and trace informations of an n-copy Q operator.
///
/// The trace always equals `n·dⁿ⁻¹·J_Tr` (the cross terms are traceless),
/// exposing the non-additivity of the trace form.
pub fn dqfi_ncopy(q_n: &CMatrix, _d: usize, _n: usize) -> Result<(f64, f64)> {
    let eigenvalues = hermitian_eigvalues(q_n)?;
    let spectral = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((spectral, trace_re(q_n)))
}

/// Largest eigenvalue of `A†A` from the single-copy `A = Σ Lπ`; the
/// coefficient of the quadratic term in the n-copy sandwich.
pub fn a_gram_norm(slds: &[CMatrix], povm: &Povm) -> Result<f64> {
    let a = a_operator(slds, povm)?;
    let gram = hermitian_part(&(dagger(&a) * &a));
    let eigenvalues = hermitian_eigvalues(&gram)?;
    Ok(eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Asserts the n-copy sandwich
/// `n·J ≤ J⁽ⁿ⁾ ≤ n·J + n(n−1)·‖A†A‖` within `1e-8` relative.
///
/// # Errors
/// [`Error::Ordering`] with the violated margin.
pub fn sandwich_check(j1: f64, jn: f64, n: usize, a_norm: f64) -> Result<()> {
    let nf = n as f64;
    let lower = nf * j1;
    let upper = nf * j1 + nf * (nf - 1.0) * a_norm;
    let tol = 1e-8 * (1.0 + upper.abs());
    if jn < lower - tol {
        return Err(Error::Ordering(format!(
            "n-copy information {jn} below the additive floor {lower} (n = {n})"
        )));
    }
    if jn > upper + tol {
        return Err(Error::Ordering(format!(
            "n-copy information {jn} above the sandwich ceiling {upper} (n = {n})"
        )));
    }
    Ok(())
}
