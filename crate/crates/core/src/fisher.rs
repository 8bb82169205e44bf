//! Classical and quantum Fisher quantities.
//!
//! Covers the classical Fisher information (CFI) of a probe/detector pair,
//! the CFI matrix of probe ensembles, brute-force CFI maximization over
//! probes, the trace and spectral detector information, attainability and
//! ordering checks, the multi-parameter trace bound with its weighted and
//! Gill-Massar-type scalarizations, the sequential splitting bound, and the
//! state QFI used by the process-equivalence checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_hermitian, hermitian_eig, max_abs, trace_re, C64, CMatrix, CVector, RMatrix,
};
use crate::models::{bloch_vector, DerivativeSet, Povm, ProbeState};
use crate::sld::{cross_q_operator, q_operator, sld_eig, sld_set};

/// Probability threshold below which an outcome is considered unobservable.
pub const PROB_FLOOR: f64 = 1e-12;
/// Derivative threshold above which an unobservable outcome makes the CFI
/// genuinely divergent.
pub const DERIV_FLOOR: f64 = 1e-9;

/// Outcome probabilities `p_j = Tr(ρ π_j)`.
pub fn probabilities(rho: &ProbeState, povm: &Povm) -> Vec<f64> {
    povm.elements()
        .iter()
        .map(|pi| trace_re(&(rho.matrix() * pi)))
        .collect()
}

/// Probability derivatives `∂p_j = Tr(ρ ∂π_j)` for one parameter.
pub fn probability_derivatives(rho: &ProbeState, deriv: &DerivativeSet, k: usize) -> Vec<f64> {
    deriv
        .param(k)
        .iter()
        .map(|dpi| trace_re(&(rho.matrix() * dpi)))
        .collect()
}

fn cfi_from_distribution(p: &[f64], dp: &[f64]) -> Result<f64> {
    let mut fisher = 0.0;
    for (j, (&pj, &dpj)) in p.iter().zip(dp).enumerate() {
        if pj <= PROB_FLOOR {
            if dpj.abs() > DERIV_FLOOR {
                return Err(Error::DivergentCfi {
                    outcome: j,
                    probability: pj,
                    derivative: dpj,
                });
            }
            continue;
        }
        fisher += dpj * dpj / pj;
    }
    Ok(fisher)
}

/// Classical Fisher information `Σ_j (∂p_j)²/p_j` of one parameter.
///
/// Outcomes with `p_j ≤ 1e-12` contribute nothing when their derivative
/// also vanishes; otherwise the information genuinely diverges and a
/// distinct [`Error::DivergentCfi`] is raised instead of a large float.
pub fn cfi(rho: &ProbeState, povm: &Povm, deriv: &DerivativeSet, k: usize) -> Result<f64> {
    let p = probabilities(rho, povm);
    let dp = probability_derivatives(rho, deriv, k);
    cfi_from_distribution(&p, &dp)
}

/// CFI of a pure probe given as a state vector (fast path for optimizers).
pub fn cfi_pure(psi: &CVector, povm: &Povm, derivatives: &[CMatrix]) -> Result<f64> {
    let expectation = |op: &CMatrix| -> f64 { (psi.adjoint() * op * psi)[(0, 0)].re };
    let p: Vec<f64> = povm.elements().iter().map(&expectation).collect();
    let dp: Vec<f64> = derivatives.iter().map(&expectation).collect();
    cfi_from_distribution(&p, &dp)
}

/// CFI matrix of a weighted probe ensemble:
/// `F = Σ_k q_k F(ρ_k)` with `F(ρ)_{ab} = Σ_j (∂_a p_j)(∂_b p_j)/p_j`.
///
/// Weights must sum to one (within `1e-9`). A single probe is the ensemble
/// of size one.
pub fn cfi_matrix(
    ensemble: &[(f64, ProbeState)],
    povm: &Povm,
    deriv: &DerivativeSet,
) -> Result<RMatrix> {
    let n = deriv.param_count();
    let weight_sum: f64 = ensemble.iter().map(|(q, _)| q).sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "ensemble weights sum to {weight_sum}, expected 1"
        )));
    }
    let mut fisher = RMatrix::zeros(n, n);
    for (q, rho) in ensemble {
        if *q < 0.0 {
            return Err(Error::Config("negative ensemble weight".into()));
        }
        let p = probabilities(rho, povm);
        let gradients: Vec<Vec<f64>> = (0..n)
            .map(|k| probability_derivatives(rho, deriv, k))
            .collect();
        for (j, &pj) in p.iter().enumerate() {
            if pj <= PROB_FLOOR {
                for grad in &gradients {
                    if grad[j].abs() > DERIV_FLOOR {
                        return Err(Error::DivergentCfi {
                            outcome: j,
                            probability: pj,
                            derivative: grad[j],
                        });
                    }
                }
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    fisher[(a, b)] += q * gradients[a][j] * gradients[b][j] / pj;
                }
            }
        }
    }
    Ok(fisher)
}

/// Result of a brute-force CFI maximization over pure probes.
#[derive(Debug, Clone)]
pub struct CfiMax {
    /// Best CFI found — a certified lower bound on the true maximum.
    pub value: f64,
    /// The maximizing probe.
    pub probe: ProbeState,
    /// False when the iteration budget ran out before the gradient
    /// tolerance was met (the value is still a valid lower bound).
    pub converged: bool,
}

/// Maximum CFI over pure probe states for one parameter.
///
/// Strategy: for qubits, a 181×181 Bloch-sphere grid followed by damped
/// Newton refinements started from the best (up to `budget`) well-separated
/// grid cells; for `d > 2`, `budget` random pure starts followed by
/// projected gradient ascent on the state sphere with backtracking line
/// search until the Riemannian gradient norm is ≤ 1e-8. Diagonal
/// (phase-insensitive) models additionally evaluate every basis state,
/// which is provably where their maximum lies.
///
/// The returned value is a certified lower bound on the true maximum.
pub fn cfi_max_probe(
    povm: &Povm,
    deriv: &DerivativeSet,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<CfiMax> {
    let d = povm.dim();
    let derivatives = deriv.param(k);
    let diagonal = povm.is_diagonal()
        && derivatives
            .iter()
            .all(|m| crate::linalg::is_diagonal(m, 1e-12));

    let mut best_value = f64::NEG_INFINITY;
    let mut best_probe: Option<ProbeState> = None;
    let mut update = |value: f64, probe: ProbeState, best_value: &mut f64| {
        if value > *best_value {
            *best_value = value;
            best_probe = Some(probe);
        }
    };

    if diagonal {
        for basis in 0..d {
            let mut psi = CVector::zeros(d);
            psi[basis] = C64::new(1.0, 0.0);
            match cfi_pure(&psi, povm, derivatives) {
                Ok(value) => update(value, ProbeState::pure(&psi)?, &mut best_value),
                Err(Error::DivergentCfi { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    let mut converged = true;
    if d == 2 {
        let evaluate = |t: f64, phi: f64| -> f64 {
            let psi = bloch_vector(t.clamp(0.0, std::f64::consts::PI), phi);
            cfi_pure(&psi, povm, derivatives).unwrap_or(f64::NEG_INFINITY)
        };
        // Coarse grid.
        let grid = 181usize;
        let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(grid * grid);
        for i in 0..grid {
            let t = std::f64::consts::PI * i as f64 / (grid - 1) as f64;
            for j in 0..grid {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
                cells.push((evaluate(t, phi), t, phi));
            }
        }
        cells.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite CFI"));
        // Newton-refine the best well-separated cells.
        let separation = 3.0 * std::f64::consts::PI / grid as f64;
        let mut starts: Vec<(f64, f64)> = Vec::new();
        for &(_, t, phi) in &cells {
            if starts.len() >= budget.clamp(1, 16) {
                break;
            }
            if starts
                .iter()
                .all(|&(ts, ps)| (t - ts).abs() > separation || (phi - ps).abs() > separation)
            {
                starts.push((t, phi));
            }
        }
        for (t0, phi0) in starts {
            let (t, phi, value) = newton_refine_2d(&evaluate, t0, phi0);
            if value.is_finite() {
                update(value, probe_from_angles(t, phi), &mut best_value);
            }
        }
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget.max(1) {
            let mut psi = CVector::from_fn(d, |_, _| {
                C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            psi /= C64::new(psi.norm(), 0.0);
            match gradient_ascent_sphere(&psi, povm, derivatives) {
                Ok((refined, value, ok)) => {
                    converged &= ok;
                    update(value, ProbeState::pure(&refined)?, &mut best_value);
                }
                Err(Error::DivergentCfi { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    let probe = best_probe.ok_or_else(|| {
        Error::Estimator("no probe with finite information was found".into())
    })?;
    Ok(CfiMax {
        value: best_value,
        probe,
        converged,
    })
}

fn probe_from_angles(t: f64, phi: f64) -> ProbeState {
    crate::models::probe_from_bloch(
        t.clamp(0.0, std::f64::consts::PI),
        phi.rem_euclid(2.0 * std::f64::consts::PI),
    )
}

/// Damped Newton maximization of a smooth function of two angles, with a
/// spectrally-clamped Hessian and backtracking. Returns the refined angles
/// and value.
fn newton_refine_2d(f: &impl Fn(f64, f64) -> f64, mut t: f64, mut phi: f64) -> (f64, f64, f64) {
    let h = 1e-5;
    let mut value = f(t, phi);
    for _ in 0..60 {
        let fp = |dt: f64, dp: f64| f(t + dt, phi + dp);
        let g_t = (fp(h, 0.0) - fp(-h, 0.0)) / (2.0 * h);
        let g_p = (fp(0.0, h) - fp(0.0, -h)) / (2.0 * h);
        let h_tt = (fp(h, 0.0) - 2.0 * value + fp(-h, 0.0)) / (h * h);
        let h_pp = (fp(0.0, h) - 2.0 * value + fp(0.0, -h)) / (h * h);
        let h_tp = (fp(h, h) - fp(h, -h) - fp(-h, h) + fp(-h, -h)) / (4.0 * h * h);
        let gradient_norm = (g_t * g_t + g_p * g_p).sqrt();
        if gradient_norm < 1e-10 * (1.0 + value.abs()) {
            break;
        }
        // Clamp the Hessian to be safely negative definite before solving.
        let trace = h_tt + h_pp;
        let det = h_tt * h_pp - h_tp * h_tp;
        let disc = (trace * trace / 4.0 - det).max(0.0).sqrt();
        let (l1, l2) = (trace / 2.0 - disc, trace / 2.0 + disc);
        let floor = -(1.0 + l1.abs().max(l2.abs())) * 1e-6;
        let clamp = |l: f64| l.min(floor);
        let (c1, c2) = (clamp(l1), clamp(l2));
        // Eigenvectors of the symmetric 2×2 Hessian.
        let (v1, v2) = if h_tp.abs() > 1e-300 {
            let e1 = (l1 - h_pp, h_tp);
            let n1 = (e1.0 * e1.0 + e1.1 * e1.1).sqrt();
            ((e1.0 / n1, e1.1 / n1), (-e1.1 / n1, e1.0 / n1))
        } else if h_tt <= h_pp {
            ((1.0, 0.0), (0.0, 1.0))
        } else {
            ((0.0, 1.0), (1.0, 0.0))
        };
        let project = |v: (f64, f64)| g_t * v.0 + g_p * v.1;
        let (a1, a2) = (project(v1) / c1, project(v2) / c2);
        let (mut s_t, mut s_p) = (-(a1 * v1.0 + a2 * v2.0), -(a1 * v1.1 + a2 * v2.1));
        // Backtrack until the step improves the objective.
        let mut improved = false;
        for _ in 0..25 {
            let trial = f(t + s_t, phi + s_p);
            if trial > value {
                t += s_t;
                phi += s_p;
                value = trial;
                improved = true;
                break;
            }
            s_t *= 0.5;
            s_p *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (t, phi, value)
}

/// Projected gradient ascent of the pure-state CFI on the unit sphere.
fn gradient_ascent_sphere(
    start: &CVector,
    povm: &Povm,
    derivatives: &[CMatrix],
) -> Result<(CVector, f64, bool)> {
    let mut psi = start.clone();
    let mut value = cfi_pure(&psi, povm, derivatives)?;
    let mut converged = false;
    for _ in 0..500 {
        // Euclidean gradient with respect to ψ̄ of Σ (∂p)²/p with
        // p = ψ†πψ, ∂p = ψ†(∂π)ψ.
        let d = psi.len();
        let mut gradient = CVector::zeros(d);
        for (pi, dpi) in povm.elements().iter().zip(derivatives) {
            let p = (psi.adjoint() * pi * &psi)[(0, 0)].re;
            let dp = (psi.adjoint() * dpi * &psi)[(0, 0)].re;
            if p <= PROB_FLOOR {
                if dp.abs() > DERIV_FLOOR {
                    return Err(Error::DivergentCfi {
                        outcome: 0,
                        probability: p,
                        derivative: dp,
                    });
                }
                continue;
            }
            let ratio = dp / p;
            gradient += dpi * &psi * C64::new(2.0 * ratio, 0.0)
                - pi * &psi * C64::new(ratio * ratio, 0.0);
        }
        // Riemannian projection onto the tangent space of the sphere.
        let overlap = psi.dotc(&gradient);
        let tangent = &gradient - &psi * overlap;
        let tangent_norm = tangent.norm();
        if tangent_norm <= 1e-8 * (1.0 + value.abs()) {
            converged = true;
            break;
        }
        // Backtracking line search along the projected gradient.
        let mut step = 1.0 / (1.0 + tangent_norm);
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = &psi + &tangent * C64::new(step, 0.0);
            trial /= C64::new(trial.norm(), 0.0);
            if let Ok(trial_value) = cfi_pure(&trial, povm, derivatives) {
                if trial_value > value {
                    psi = trial;
                    value = trial_value;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            converged = true;
            break;
        }
    }
    Ok((psi, value, converged))
}

/// Trace detector information `J_Tr = Σ_j Tr(L_j π_j L_j)` for one
/// parameter.
pub fn trace_dqfi(slds: &[CMatrix], povm: &Povm) -> Result<f64> {
    Ok(trace_re(&q_operator(slds, povm)?))
}

/// Spectral detector information: the largest eigenvalue of `Q` together
/// with a candidate optimal probe.
#[derive(Debug, Clone)]
pub struct SpectralDqfi {
    /// Largest eigenvalue of `Q`.
    pub value: f64,
    /// Candidate probe: the top eigenvector, refined through the common-SLD
    /// eigenvector search when the top eigenvalue is degenerate.
    pub probe: ProbeState,
    /// True when the top eigenvalue is degenerate (gap below `1e-8`
    /// relative), in which case the eigenvector alone does not single out
    /// the optimal probe.
    pub degenerate: bool,
}

/// Computes the spectral detector information from the per-outcome SLDs.
pub fn spectral_dqfi(slds: &[CMatrix], povm: &Povm) -> Result<SpectralDqfi> {
    let q = q_operator(slds, povm)?;
    let (eigenvalues, vectors) = hermitian_eig(&q)?;
    let d = q.nrows();
    let top = eigenvalues[d - 1];
    let degenerate = d >= 2 && (top - eigenvalues[d - 2]).abs() < 1e-8 * (1.0 + top.abs());
    let mut probe = ProbeState::pure(&vectors.column(d - 1).into_owned())?;
    if degenerate {
        // The degenerate top subspace is resolved by the common-SLD
        // eigenvector search: any common eigenvector reaching the top
        // eigenvalue is an optimal probe.
        let report = attainability_check(slds, povm, &q)?;
        if report.attainable {
            if let Some(candidate) = report.candidate {
                probe = candidate;
            }
        }
    }
    Ok(SpectralDqfi {
        value: top,
        probe,
        degenerate,
    })
}

/// Outcome of the three attainability criteria for one parameter.
#[derive(Debug, Clone)]
pub struct AttainabilityReport {
    /// All three criteria hold: the spectral bound is attained by `candidate`.
    pub attainable: bool,
    /// A simultaneous eigenvector of every SLD exists.
    pub common_eigvec_found: bool,
    /// Best candidate probe (common SLD eigenvector with the largest
    /// `⟨ψ|Q|ψ⟩`, or the top-Q eigenvector when no common eigenvector
    /// exists).
    pub candidate: Option<ProbeState>,
    /// Criterion: `Tr(π_j ρ L_j)` real for every outcome.
    pub real_traces: bool,
    /// Largest imaginary part over outcomes for the candidate.
    pub real_trace_residual: f64,
    /// Largest eigen-equation residual `‖L_j ψ - ⟨L_j⟩ ψ‖` over outcomes.
    pub common_residual: f64,
    /// Criterion: the candidate reaches the top eigenvalue of `Q`.
    pub top_q: bool,
    /// Gap `λ_max - ⟨ψ|Q|ψ⟩` for the candidate.
    pub top_q_residual: f64,
}

/// Checks whether the spectral detector information is attainable: searches
/// for a simultaneous eigenvector of all SLDs that is also a top-eigenvalue
/// eigenvector of `Q` (each residual at most `1e-7` relative).
///
/// Absence of a common eigenvector is a valid negative result, not an
/// error.
pub fn attainability_check(
    slds: &[CMatrix],
    povm: &Povm,
    q: &CMatrix,
) -> Result<AttainabilityReport> {
    let d = povm.dim();
    let (q_eigenvalues, q_vectors) = hermitian_eig(q)?;
    let q_top = q_eigenvalues[d - 1];
    let sld_scale = slds
        .iter()
        .map(max_abs)
        .fold(0.0f64, f64::max);
    let tol = 1e-7 * (1.0 + sld_scale);

    // Candidate directions: eigenvectors of two deterministic linear
    // combinations of the SLDs (simultaneous eigenvectors survive any
    // combination), plus the eigenvectors of Q itself.
    let mut candidates: Vec<CVector> = Vec::new();
    for weights in [
        |j: usize| 1.0 / (j as f64 + 2.0),
        |j: usize| (j as f64 + 1.0).cos(),
    ] {
        let mut mix = CMatrix::zeros(d, d);
        for (j, l) in slds.iter().enumerate() {
            mix += l * C64::new(weights(j), 0.0);
        }
        let (_, vectors) = hermitian_eig(&mix)?;
        for c in 0..d {
            candidates.push(vectors.column(c).into_owned());
        }
    }
    for c in 0..d {
        candidates.push(q_vectors.column(c).into_owned());
    }

    let eigen_residual = |psi: &CVector| -> f64 {
        slds.iter()
            .map(|l| {
                let image = l * psi;
                let expectation = psi.dotc(&image);
                (&image - psi * expectation).norm()
            })
            .fold(0.0f64, f64::max)
    };

    let mut best_common: Option<(CVector, f64, f64)> = None;
    for psi in &candidates {
        let residual = eigen_residual(psi);
        if residual <= tol {
            let q_value = psi.dotc(&(q * psi)).re;
            match &best_common {
                Some((_, _, best_q)) if q_value <= *best_q => {}
                _ => best_common = Some((psi.clone(), residual, q_value)),
            }
        }
    }

    let (candidate_vector, common_residual, q_value, common_found) = match best_common {
        Some((psi, residual, q_value)) => (psi, residual, q_value, true),
        None => {
            let psi = q_vectors.column(d - 1).into_owned();
            let residual = eigen_residual(&psi);
            let q_value = psi.dotc(&(q * &psi)).re;
            (psi, residual, q_value, false)
        }
    };

    let real_trace_residual = slds
        .iter()
        .zip(povm.elements())
        .map(|(l, pi)| {
            (candidate_vector.adjoint() * l * pi * &candidate_vector)[(0, 0)]
                .im
                .abs()
        })
        .fold(0.0f64, f64::max);
    let real_traces = real_trace_residual <= tol;

    let top_q_residual = q_top - q_value;
    let top_q = top_q_residual <= 1e-7 * (1.0 + q_top.abs());

    let attainable = common_found && top_q && real_traces;
    Ok(AttainabilityReport {
        attainable,
        common_eigvec_found: common_found,
        candidate: Some(ProbeState::pure(&candidate_vector)?),
        real_traces,
        real_trace_residual,
        common_residual,
        top_q,
        top_q_residual,
    })
}

/// Asserts the dimensional ordering
/// `(1/d) J_Tr ≤ J_∥ ≤ J_Tr ≤ d J_∥` within `1e-8` relative.
///
/// # Errors
/// [`Error::Ordering`] with the violated margin.
pub fn ordering_check(j_trace: f64, j_spectral: f64, d: usize) -> Result<()> {
    let tol = 1e-8 * (1.0 + j_trace.abs());
    let dd = d as f64;
    let checks = [
        (j_trace / dd, j_spectral, "J_Tr/d ≤ J_spectral"),
        (j_spectral, j_trace, "J_spectral ≤ J_Tr"),
        (j_trace, dd * j_spectral, "J_Tr ≤ d·J_spectral"),
    ];
    for (lo, hi, label) in checks {
        if lo > hi + tol {
            return Err(Error::Ordering(format!(
                "{label} violated by {:.3e} (J_spectral = {j_spectral}, J_Tr = {j_trace}, d = {d})",
                lo - hi
            )));
        }
    }
    Ok(())
}

/// Multi-parameter trace-information matrix
/// `(J_Tr)_{ab} = ½ Tr Σ_j (L_j^a π_j L_j^b + L_j^b π_j L_j^a)`.
pub fn dqfi_matrix_trace(slds: &[Vec<CMatrix>], povm: &Povm) -> Result<RMatrix> {
    let n = slds.len();
    let mut jt = RMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let g = cross_q_operator(&slds[a], &slds[b], povm)?;
            let value = trace_re(&g);
            jt[(a, b)] = value;
            jt[(b, a)] = value;
        }
    }
    Ok(jt)
}

fn symmetric_inverse(jt: &RMatrix) -> Result<RMatrix> {
    let (eigenvalues, eigenvectors) = crate::linalg::jacobi_eigen(jt);
    let max_eigenvalue = eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue <= 1e-12 * (1.0 + max_eigenvalue) {
        return Err(Error::SingularFisher(min_eigenvalue));
    }
    let n = jt.nrows();
    let mut inv = RMatrix::zeros(n, n);
    for k in 0..n {
        let v = eigenvectors.column(k);
        let scale = 1.0 / eigenvalues[k];
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] += scale * v[i] * v[j];
            }
        }
    }
    Ok(inv)
}

/// Weighted trace bound `Tr(W J_Tr⁻¹)`; `W` defaults to the identity.
pub fn trace_qcrb(jt: &RMatrix, w: Option<&RMatrix>) -> Result<f64> {
    let inv = symmetric_inverse(jt)?;
    Ok(match w {
        Some(weight) => (weight * inv).trace(),
        None => inv.trace(),
    })
}

/// Gill-Massar-type scalar bound `(Tr √(J_Tr⁻¹))²`.
pub fn gill_massar_qcrb(jt: &RMatrix) -> Result<f64> {
    let (eigenvalues, _) = crate::linalg::jacobi_eigen(jt);
    let max_eigenvalue = eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let mut total = 0.0;
    for &l in eigenvalues.iter() {
        if l <= 1e-12 * (1.0 + max_eigenvalue) {
            return Err(Error::SingularFisher(l));
        }
        total += 1.0 / l.sqrt();
    }
    Ok(total * total)
}

/// Optimal sequential splitting of samples across `n` single-parameter
/// problems with informations `J_j`.
#[derive(Debug, Clone)]
pub struct SequentialBound {
    /// `min_p Σ 1/(p_j J_j) = (Σ 1/√J_j)²`.
    pub value: f64,
    /// Optimal sample fractions `p_j ∝ 1/√J_j`.
    pub weights: Vec<f64>,
    /// Scalar total-information bound `n²/Σ_j J_j`.
    pub total_qfi_bound: f64,
}

/// Computes the sequential (one parameter at a time) estimation bound.
///
/// # Errors
/// Any non-positive single-parameter information.
pub fn sequential_bound(single_dqfis: &[f64]) -> Result<SequentialBound> {
    if single_dqfis.iter().any(|&j| j <= 0.0) {
        return Err(Error::Config(
            "sequential bound requires strictly positive informations".into(),
        ));
    }
    let inv_sqrt: Vec<f64> = single_dqfis.iter().map(|&j| 1.0 / j.sqrt()).collect();
    let total: f64 = inv_sqrt.iter().sum();
    let weights: Vec<f64> = inv_sqrt.iter().map(|w| w / total).collect();
    let n = single_dqfis.len() as f64;
    Ok(SequentialBound {
        value: total * total,
        weights,
        total_qfi_bound: n * n / single_dqfis.iter().sum::<f64>(),
    })
}

/// Quantum Fisher information `Tr(ρ L²)` of a parametrized state, with the
/// logarithmic derivative from the same Lyapunov solver. Used by the
/// process-equivalence checks.
pub fn state_qfi(rho_theta: &ProbeState, drho: &CMatrix) -> Result<f64> {
    check_hermitian(drho)?;
    let trace: f64 = drho.diagonal().iter().map(|z| z.re).sum();
    if trace.abs() > 1e-8 * (1.0 + max_abs(drho)) {
        return Err(Error::Config(format!(
            "state derivative must be traceless, got trace {trace}"
        )));
    }
    let l = sld_eig(rho_theta.matrix(), drho)?;
    Ok(trace_re(&(rho_theta.matrix() * &l * &l)))
}

/// All computed bounds for one model instance, as reported by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Model identifier.
    pub model: String,
    /// Parameter point.
    pub theta: Vec<f64>,
    /// Brute-force maximum CFI over probes (certified lower bound).
    pub cfi_max: f64,
    /// Polar Bloch angle of the best probe (qubit models).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_polar: Option<f64>,
    /// Azimuthal Bloch angle of the best probe (qubit models).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_azimuth: Option<f64>,
    /// Trace detector information.
    pub j_trace: f64,
    /// Spectral detector information.
    pub j_spectral: f64,
    /// Extended (tight) detector information, when the SDP was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_ext: Option<f64>,
    /// All three attainability criteria hold.
    pub attainable: bool,
    /// Dimensional ordering of the bounds holds.
    pub ordering_ok: bool,
}

impl BoundReport {
    /// Checks `cfi_max ≤ j_ext ≤ j_spectral ≤ j_trace` within `1e-6`.
    pub fn chain_ok(&self) -> bool {
        let tol = 1e-6;
        let ext = self.j_ext.unwrap_or(self.j_spectral);
        self.cfi_max <= ext + tol
            && ext <= self.j_spectral + tol
            && self.j_spectral <= self.j_trace + tol
    }
}

/// Convenience wrapper computing SLDs, both detector informations, and the
/// ordering check for one parameter of a model.
pub fn single_parameter_bounds(
    povm: &Povm,
    deriv: &DerivativeSet,
    k: usize,
) -> Result<(Vec<CMatrix>, f64, SpectralDqfi)> {
    let slds = crate::sld::sld_outcomes(povm, deriv.param(k))?;
    let j_trace = trace_dqfi(&slds, povm)?;
    let spectral = spectral_dqfi(&slds, povm)?;
    Ok((slds, j_trace, spectral))
}

/// Per-parameter SLD sets of a model instance.
pub fn model_slds(povm: &Povm, deriv: &DerivativeSet) -> Result<Vec<Vec<CMatrix>>> {
    sld_set(povm, deriv)
}
