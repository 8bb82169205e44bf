//! Per-outcome symmetric-logarithmic-derivative (SLD) solvers and the
//! information operator `Q`.
//!
//! For every POVM element `π` and its parameter derivative `∂π` the SLD is
//! the Hermitian solution `L` of the Lyapunov equation `L π + π L = 2 ∂π`.
//! Two independent solvers are provided — an eigenspectrum construction and
//! a vectorised pseudo-inverse solve — which must agree; their cross-check
//! is part of the property suite. The per-outcome SLDs assemble into
//! `Q = Σ_j L_j π_j L_j`, whose spectrum and trace produce the detector
//! information bounds, and into `A = Σ_j L_j π_j`, which controls multi-copy
//! behaviour.

use crate::error::{Error, Result};
use crate::linalg::{
    check_hermitian, check_skew_hermitian, hermitian_eig, hermitian_part, kron, max_abs, psd_pinv,
    unvec, vec_mat, C64, CMatrix,
};
use crate::models::{DerivativeSet, Povm};

/// Spectral cutoff: Lyapunov denominators `λ_a + λ_b` at or below this value
/// are treated as zero (kernel of the Lyapunov map). Matches the
/// pseudo-inverse rank tolerance so both solvers agree.
pub const KERNEL_CUTOFF: f64 = 1e-10;

/// Maximum admissible weight of `∂π` inside the kernel of `π`; above this
/// the Lyapunov equation has no solution and the local model is invalid.
pub const KERNEL_BLOCK_TOL: f64 = 1e-8;

/// Solves `L π + π L = 2 ∂π` through the eigenspectrum of `π`:
/// `L = 2 Σ_{λ_a+λ_b > cutoff} |a⟩⟨a| ∂π |b⟩⟨b| / (λ_a + λ_b)`.
///
/// # Errors
/// Rejects non-Hermitian inputs, non-PSD `π`, and derivatives with
/// significant weight in the kernel-kernel block of `π` (the equation is
/// unsolvable there).
pub fn sld_eig(pi: &CMatrix, dpi: &CMatrix) -> Result<CMatrix> {
    check_hermitian(pi)?;
    check_hermitian(dpi)?;
    let d = pi.nrows();
    let (eigenvalues, v) = hermitian_eig(pi)?;
    if eigenvalues[0] < -1e-9 * (1.0 + max_abs(pi)) {
        return Err(Error::NotPsd {
            min_eigenvalue: eigenvalues[0],
        });
    }
    // ∂π in the eigenbasis of π.
    let dpi_eig = v.adjoint() * dpi * &v;
    check_kernel_block(&eigenvalues, &dpi_eig)?;
    let mut l_eig = CMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let denominator = eigenvalues[a] + eigenvalues[b];
            if denominator > KERNEL_CUTOFF {
                l_eig[(a, b)] = dpi_eig[(a, b)] * C64::new(2.0 / denominator, 0.0);
            }
        }
    }
    Ok(hermitian_part(&(&v * l_eig * v.adjoint())))
}

/// Solves the same Lyapunov equation through vectorisation:
/// `vec(L) = 2 (πᵀ ⊗ I + I ⊗ π)⁺ vec(∂π)` (column-stacking convention;
/// for Hermitian `π` the transpose equals the conjugate).
///
/// # Errors
/// As [`sld_eig`]; the two solvers agree to `1e-9` by construction.
pub fn sld_vec(pi: &CMatrix, dpi: &CMatrix) -> Result<CMatrix> {
    check_hermitian(pi)?;
    check_hermitian(dpi)?;
    let d = pi.nrows();
    let (eigenvalues, v) = hermitian_eig(pi)?;
    if eigenvalues[0] < -1e-9 * (1.0 + max_abs(pi)) {
        return Err(Error::NotPsd {
            min_eigenvalue: eigenvalues[0],
        });
    }
    let dpi_eig = v.adjoint() * dpi * &v;
    check_kernel_block(&eigenvalues, &dpi_eig)?;
    let identity = crate::linalg::identity_c(d);
    let lyapunov = kron(&pi.transpose(), &identity) + kron(&identity, pi);
    let pinv = psd_pinv(&lyapunov, Some(KERNEL_CUTOFF))?;
    let l_vec = pinv * vec_mat(dpi) * C64::new(2.0, 0.0);
    Ok(hermitian_part(&unvec(&l_vec, d, d)?))
}

/// Rejects derivatives whose kernel-kernel block (in the eigenbasis of `π`)
/// carries weight above [`KERNEL_BLOCK_TOL`].
fn check_kernel_block(eigenvalues: &[f64], dpi_eig: &CMatrix) -> Result<()> {
    let mut worst = 0.0f64;
    for (a, &la) in eigenvalues.iter().enumerate() {
        for (b, &lb) in eigenvalues.iter().enumerate() {
            if la + lb <= KERNEL_CUTOFF {
                worst = worst.max(dpi_eig[(a, b)].norm());
            }
        }
    }
    if worst > KERNEL_BLOCK_TOL {
        return Err(Error::KernelBlock(worst));
    }
    Ok(())
}

/// Residual of the Lyapunov equation projected onto the support of `π`:
/// `max |L π + π L - 2 ∂π|` with the kernel-kernel block (which the equation
/// does not constrain) removed.
pub fn sld_residual(l: &CMatrix, pi: &CMatrix, dpi: &CMatrix) -> Result<f64> {
    let (eigenvalues, v) = hermitian_eig(pi)?;
    let residual = l * pi + pi * l - dpi * C64::new(2.0, 0.0);
    let residual_eig = v.adjoint() * residual * &v;
    let mut worst = 0.0f64;
    for (a, &la) in eigenvalues.iter().enumerate() {
        for (b, &lb) in eigenvalues.iter().enumerate() {
            if la + lb > KERNEL_CUTOFF {
                worst = worst.max(residual_eig[(a, b)].norm());
            }
        }
    }
    Ok(worst)
}

/// Solves the SLDs of every outcome for one parameter.
pub fn sld_outcomes(povm: &Povm, derivatives: &[CMatrix]) -> Result<Vec<CMatrix>> {
    if derivatives.len() != povm.outcomes() {
        return Err(Error::Dimension(format!(
            "{} derivative(s) for {} outcomes",
            derivatives.len(),
            povm.outcomes()
        )));
    }
    povm.elements()
        .iter()
        .zip(derivatives)
        .map(|(pi, dpi)| sld_eig(pi, dpi))
        .collect()
}

/// Solves the full SLD set of a multi-parameter model, indexed
/// `[parameter][outcome]`.
pub fn sld_set(povm: &Povm, derivatives: &DerivativeSet) -> Result<Vec<Vec<CMatrix>>> {
    (0..derivatives.param_count())
        .map(|k| sld_outcomes(povm, derivatives.param(k)))
        .collect()
}

/// Information operator `Q = Σ_j L_j π_j L_j` for one parameter.
///
/// `Q` is Hermitian and PSD; its largest eigenvalue and trace are the
/// spectral and trace detector information.
pub fn q_operator(slds: &[CMatrix], povm: &Povm) -> Result<CMatrix> {
    if slds.len() != povm.outcomes() {
        return Err(Error::Dimension(format!(
            "{} SLD(s) for {} outcomes",
            slds.len(),
            povm.outcomes()
        )));
    }
    let d = povm.dim();
    let mut q = CMatrix::zeros(d, d);
    for (l, pi) in slds.iter().zip(povm.elements()) {
        q += l * pi * l;
    }
    Ok(hermitian_part(&q))
}

/// Cross operator `G_{ab} = ½ Σ_j (L_j^a π_j L_j^b + L_j^b π_j L_j^a)` of two
/// parameters; `G_{aa}` reduces to [`q_operator`].
pub fn cross_q_operator(
    slds_a: &[CMatrix],
    slds_b: &[CMatrix],
    povm: &Povm,
) -> Result<CMatrix> {
    if slds_a.len() != povm.outcomes() || slds_b.len() != povm.outcomes() {
        return Err(Error::Dimension("SLD/outcome count mismatch".into()));
    }
    let d = povm.dim();
    let mut g = CMatrix::zeros(d, d);
    for ((la, lb), pi) in slds_a.iter().zip(slds_b).zip(povm.elements()) {
        g += la * pi * lb + lb * pi * la;
    }
    Ok(hermitian_part(&(g * C64::new(0.5, 0.0))))
}

/// Transfer operator `A = Σ_j L_j π_j`, which vanishes exactly for diagonal
/// (phase-insensitive) detectors and controls multi-copy non-additivity.
pub fn a_operator(slds: &[CMatrix], povm: &Povm) -> Result<CMatrix> {
    if slds.len() != povm.outcomes() {
        return Err(Error::Dimension("SLD/outcome count mismatch".into()));
    }
    let d = povm.dim();
    let mut a = CMatrix::zeros(d, d);
    for (l, pi) in slds.iter().zip(povm.elements()) {
        a += l * pi;
    }
    Ok(a)
}

/// Non-Hermitian logarithmic derivative `L' = L + π⁺ S` from a
/// skew-Hermitian offset `S`; it satisfies the weak constraint
/// `L'† π + π L' = 2 ∂π` whenever `S` lives on the support of `π`.
///
/// # Errors
/// Rejects offsets violating `S† = -S` (to `1e-10`).
pub fn nsld_from_skew(l: &CMatrix, pi: &CMatrix, s: &CMatrix) -> Result<CMatrix> {
    check_skew_hermitian(s)?;
    let pinv = psd_pinv(pi, Some(KERNEL_CUTOFF))?;
    Ok(l + pinv * s)
}

/// Skew-Hermitian candidate offset built from a pure probe `|ψ⟩`:
/// `S = (⟨ψ|∂π|ψ⟩ / ⟨ψ|π|ψ⟩)[π, ρ] - [∂π, ρ]` with `ρ = |ψ⟩⟨ψ|`.
///
/// When the probe is optimal this offset turns the SLD into a
/// non-Hermitian logarithmic derivative with `|ψ⟩` as an eigenvector.
pub fn skew_candidate(pi: &CMatrix, dpi: &CMatrix, psi: &crate::linalg::CVector) -> CMatrix {
    let rho = CMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj());
    let expectation_dpi: C64 = (psi.adjoint() * dpi * psi)[(0, 0)];
    let expectation_pi: C64 = (psi.adjoint() * pi * psi)[(0, 0)];
    let ratio = expectation_dpi / expectation_pi;
    let commutator_pi = pi * &rho - &rho * pi;
    let commutator_dpi = dpi * &rho - &rho * dpi;
    commutator_pi * ratio - commutator_dpi
}

/// Weak-constraint residual `max |L'† π + π L' - 2 ∂π|` of a (possibly
/// non-Hermitian) logarithmic derivative.
pub fn nsld_residual(l_prime: &CMatrix, pi: &CMatrix, dpi: &CMatrix) -> f64 {
    max_abs(&(l_prime.adjoint() * pi + pi * l_prime - dpi * C64::new(2.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity_c, max_abs};
    use crate::models::build_named_model;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn bitflip_at(p: f64) -> (Povm, DerivativeSet) {
        let model = build_named_model("bitflip_z", &BTreeMap::new()).unwrap();
        (
            model.povm(&[p]).unwrap(),
            model.derivatives(&[p]).unwrap(),
        )
    }

    #[test]
    fn sld_eig_bitflip() {
        let (povm, deriv) = bitflip_at(0.2);
        let l = sld_eig(povm.element(0), &deriv.param(0)[0]).unwrap();
        assert_abs_diff_eq!(l[(0, 0)].re, -1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(l[(1, 1)].re, 5.0, epsilon = 1e-12);
        assert!(l[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn sld_zero_derivative() {
        let l = sld_eig(&identity_c(2), &CMatrix::zeros(2, 2)).unwrap();
        assert!(max_abs(&l) < 1e-15);
    }

    #[test]
    fn sld_residual_random() {
        use crate::models::random_model;
        let model = random_model(2, 2, 7);
        let povm = model.povm(&[0.0]).unwrap();
        let deriv = model.derivatives(&[0.0]).unwrap();
        for j in 0..2 {
            let l = sld_eig(povm.element(j), &deriv.param(0)[j]).unwrap();
            let r = sld_residual(&l, povm.element(j), &deriv.param(0)[j]).unwrap();
            assert!(r < 1e-10, "residual {r}");
        }
    }

    #[test]
    fn solvers_agree() {
        use crate::models::random_model;
        // Named case with off-diagonal SLDs.
        let mut fixed = BTreeMap::new();
        fixed.insert("theta".to_string(), std::f64::consts::FRAC_PI_8);
        let dephased = build_named_model("dephased_pvm", &fixed).unwrap();
        let povm = dephased.povm(&[0.2]).unwrap();
        let deriv = dephased.derivatives(&[0.2]).unwrap();
        for j in 0..2 {
            let a = sld_eig(povm.element(j), &deriv.param(0)[j]).unwrap();
            let b = sld_vec(povm.element(j), &deriv.param(0)[j]).unwrap();
            assert!(max_abs(&(&a - &b)) < 1e-10);
        }
        // Random sweep.
        for seed in 0..100 {
            let model = random_model(2, 2, 1000 + seed);
            let povm = model.povm(&[0.1]).unwrap();
            let deriv = model.derivatives(&[0.1]).unwrap();
            for j in 0..2 {
                let a = sld_eig(povm.element(j), &deriv.param(0)[j]).unwrap();
                let b = sld_vec(povm.element(j), &deriv.param(0)[j]).unwrap();
                assert!(max_abs(&(&a - &b)) < 1e-9, "seed {seed} outcome {j}");
            }
        }
    }

    #[test]
    fn kernel_block_rejected() {
        // π = |0⟩⟨0| has |1⟩ in its kernel; a derivative with weight there
        // is unsolvable.
        let pi = CMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let dpi = CMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(matches!(sld_eig(&pi, &dpi), Err(Error::KernelBlock(_))));
        assert!(matches!(sld_vec(&pi, &dpi), Err(Error::KernelBlock(_))));
    }

    #[test]
    fn q_operator_bitflip_is_isotropic() {
        let (povm, deriv) = bitflip_at(0.2);
        let slds = sld_outcomes(&povm, deriv.param(0)).unwrap();
        let q = q_operator(&slds, &povm).unwrap();
        // Q = I / (p(1-p)) = 6.25·I at p = 0.2.
        assert_abs_diff_eq!(q[(0, 0)].re, 6.25, epsilon = 1e-10);
        assert_abs_diff_eq!(q[(1, 1)].re, 6.25, epsilon = 1e-10);
        assert!(q[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn q_operator_dephased_is_isotropic() {
        let mut fixed = BTreeMap::new();
        fixed.insert("theta".to_string(), std::f64::consts::FRAC_PI_8);
        let model = build_named_model("dephased_pvm", &fixed).unwrap();
        let povm = model.povm(&[0.2]).unwrap();
        let deriv = model.derivatives(&[0.2]).unwrap();
        let slds = sld_outcomes(&povm, deriv.param(0)).unwrap();
        let q = q_operator(&slds, &povm).unwrap();
        let expected = (std::f64::consts::FRAC_PI_8).sin().powi(2) / (0.2 * 0.8);
        assert_abs_diff_eq!(q[(0, 0)].re, expected, epsilon = 1e-10);
        assert_abs_diff_eq!(q[(1, 1)].re, expected, epsilon = 1e-10);
        assert!(q[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn q_operator_zero_derivatives() {
        let (povm, _) = bitflip_at(0.2);
        let zeros = vec![CMatrix::zeros(2, 2); 2];
        let q = q_operator(&zeros, &povm).unwrap();
        assert!(max_abs(&q) < 1e-15);
    }

    #[test]
    fn diagonal_slds_commute() {
        let mut fixed = BTreeMap::new();
        fixed.insert("d_tr".to_string(), 3.0);
        let model = build_named_model("onoff_diagonal", &fixed).unwrap();
        let theta = [0.1, 0.4, 0.25];
        let povm = model.povm(&theta).unwrap();
        let deriv = model.derivatives(&theta).unwrap();
        let all = sld_set(&povm, &deriv).unwrap();
        let flat: Vec<&CMatrix> = all.iter().flatten().collect();
        for a in &flat {
            for b in &flat {
                let commutator = *a * *b - *b * *a;
                assert!(max_abs(&commutator) < 1e-10);
            }
        }
    }

    #[test]
    fn nsld_examples() {
        let (povm, deriv) = bitflip_at(0.2);
        let l = sld_eig(povm.element(0), &deriv.param(0)[0]).unwrap();

        // S = 0 returns L unchanged.
        let same = nsld_from_skew(&l, povm.element(0), &CMatrix::zeros(2, 2)).unwrap();
        assert!(max_abs(&(&same - &l)) < 1e-15);

        // Imaginary-diagonal skew offset keeps the weak constraint exact.
        let s = CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![
            C64::new(0.0, 0.1),
            C64::new(0.0, -0.1),
        ]));
        let l_prime = nsld_from_skew(&l, povm.element(0), &s).unwrap();
        assert!(nsld_residual(&l_prime, povm.element(0), &deriv.param(0)[0]) < 1e-10);

        // Non-skew offsets are rejected.
        let bad = identity_c(2);
        assert!(matches!(
            nsld_from_skew(&l, povm.element(0), &bad),
            Err(Error::NotSkew(_))
        ));
    }

    #[test]
    fn skew_candidate_is_skew_and_consistent() {
        let mut fixed = BTreeMap::new();
        fixed.insert("theta".to_string(), std::f64::consts::FRAC_PI_8);
        let model = build_named_model("dephased_pvm", &fixed).unwrap();
        let povm = model.povm(&[0.2]).unwrap();
        let deriv = model.derivatives(&[0.2]).unwrap();
        let psi = crate::linalg::CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        for j in 0..2 {
            let s = skew_candidate(povm.element(j), &deriv.param(0)[j], &psi);
            assert!(check_skew_hermitian(&s).is_ok());
            let l = sld_eig(povm.element(j), &deriv.param(0)[j]).unwrap();
            let l_prime = nsld_from_skew(&l, povm.element(j), &s).unwrap();
            assert!(
                nsld_residual(&l_prime, povm.element(j), &deriv.param(0)[j]) < 1e-8,
                "outcome {j}"
            );
        }
    }
}
