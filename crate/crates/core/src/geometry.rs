//! Geometry of detector space: operator fidelity, the total Bures distance
//! between POVMs, its second-order link to the trace information, and the
//! convexity harness.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, psd_sqrt, trace_re, C64, CMatrix};
use crate::models::{DetectorModel, Povm};

/// Operator fidelity `F(A, B) = Tr √(√A B √A)` between PSD operators.
///
/// Symmetric in its arguments; equals `Tr A` when `A = B`.
pub fn operator_fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let sqrt_a = psd_sqrt(a)?;
    let inner = &sqrt_a * b * &sqrt_a;
    let root = psd_sqrt(&inner)?;
    Ok(trace_re(&root))
}

/// Total Bures distance `2d − 2 Σ_j F(π_j, π_j′)` between two POVMs with
/// matched outcomes.
///
/// Vanishes exactly when the POVMs coincide; along a parametrized family
/// it expands as `¼ J_Tr δθ²` to second order.
pub fn bures_total_distance(p1: &Povm, p2: &Povm) -> Result<f64> {
    if p1.dim() != p2.dim() || p1.outcomes() != p2.outcomes() {
        return Err(Error::Dimension(format!(
            "POVM shapes differ: {}x{} outcomes={} vs {}x{} outcomes={}",
            p1.dim(),
            p1.dim(),
            p1.outcomes(),
            p2.dim(),
            p2.dim(),
            p2.outcomes()
        )));
    }
    let mut fidelity_sum = 0.0;
    for (a, b) in p1.elements().iter().zip(p2.elements()) {
        fidelity_sum += operator_fidelity(a, b)?;
    }
    Ok(2.0 * p1.dim() as f64 - 2.0 * fidelity_sum)
}

/// Convergence report of the second-order Bures identity.
#[derive(Debug, Clone)]
pub struct BuresReport {
    /// Step sizes used.
    pub deltas: Vec<f64>,
    /// `4 D_total / δ²` per step.
    pub ratios: Vec<f64>,
    /// `|ratio − J_Tr|` per step.
    pub errors: Vec<f64>,
    /// Reference trace information at the base point.
    pub j_trace: f64,
    /// Errors shrink at least linearly in δ (up to a factor-2 margin).
    pub converged: bool,
}

/// Verifies `D_total = ¼ J_Tr δθ² + O(δθ³)` numerically for the first
/// parameter of a model: computes the ratio `4 D_total/δ²` for each
/// (decreasing) step and checks at-least-linear error decay.
pub fn bures_qfi_check(model: &DetectorModel, theta: &[f64], deltas: &[f64]) -> Result<BuresReport> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(
            "step sizes must be a decreasing non-empty sequence".into(),
        ));
    }
    let povm = model.povm(theta)?;
    let deriv = model.derivatives(theta)?;
    let slds = crate::sld::sld_outcomes(&povm, deriv.param(0))?;
    let j_trace = crate::fisher::trace_dqfi(&slds, &povm)?;

    let mut ratios = Vec::with_capacity(deltas.len());
    let mut errors = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let mut shifted = theta.to_vec();
        shifted[0] += delta;
        let povm_shifted = model.povm(&shifted)?;
        let distance = bures_total_distance(&povm, &povm_shifted)?;
        let ratio = 4.0 * distance / (delta * delta);
        errors.push((ratio - j_trace).abs());
        ratios.push(ratio);
    }
    let converged = errors.windows(2).zip(deltas.windows(2)).all(|(e, d)| {
        e[1] <= e[0] * (d[1] / d[0]) * 2.0 + 1e-12 * (1.0 + j_trace)
    });
    Ok(BuresReport {
        deltas: deltas.to_vec(),
        ratios,
        errors,
        j_trace,
        converged,
    })
}

/// Asserts convexity of the trace information under POVM mixing for one
/// parameter: `J_Tr(λΠ + (1−λ)Π′) ≤ λ J_Tr(Π) + (1−λ) J_Tr(Π′)` across the
/// given mixing grid (derivatives mixed with the same λ).
///
/// # Errors
/// [`Error::Ordering`] with the violating λ and margin.
pub fn convexity_check(
    p1: &Povm,
    d1: &[CMatrix],
    p2: &Povm,
    d2: &[CMatrix],
    lambdas: &[f64],
) -> Result<()> {
    if p1.dim() != p2.dim() || p1.outcomes() != p2.outcomes() {
        return Err(Error::Dimension("POVM shapes differ".into()));
    }
    let slds1 = crate::sld::sld_outcomes(p1, d1)?;
    let slds2 = crate::sld::sld_outcomes(p2, d2)?;
    let j1 = crate::fisher::trace_dqfi(&slds1, p1)?;
    let j2 = crate::fisher::trace_dqfi(&slds2, p2)?;
    for &lambda in lambdas {
        let mixed_elements: Vec<CMatrix> = p1
            .elements()
            .iter()
            .zip(p2.elements())
            .map(|(a, b)| a * C64::new(lambda, 0.0) + b * C64::new(1.0 - lambda, 0.0))
            .collect();
        let mixed_povm = Povm::new(mixed_elements)?;
        let mixed_derivatives: Vec<CMatrix> = d1
            .iter()
            .zip(d2)
            .map(|(a, b)| a * C64::new(lambda, 0.0) + b * C64::new(1.0 - lambda, 0.0))
            .collect();
        let mixed_slds = crate::sld::sld_outcomes(&mixed_povm, &mixed_derivatives)?;
        let j_mixed = crate::fisher::trace_dqfi(&mixed_slds, &mixed_povm)?;
        let bound = lambda * j1 + (1.0 - lambda) * j2;
        if j_mixed > bound + 1e-8 * (1.0 + bound.abs()) {
            return Err(Error::Ordering(format!(
                "convexity violated at λ = {lambda}: mixed {j_mixed} > bound {bound}"
            )));
        }
    }
    Ok(())
}

/// True when the two POVMs coincide entrywise to `1e-10`.
pub fn povms_equal(p1: &Povm, p2: &Povm) -> bool {
    p1.dim() == p2.dim()
        && p1.outcomes() == p2.outcomes()
        && p1
            .elements()
            .iter()
            .zip(p2.elements())
            .all(|(a, b)| max_abs(&(a - b)) <= 1e-10)
}
