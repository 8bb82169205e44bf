//! A small dense semidefinite-program solver and the SDP-based bounds.
//!
//! The engine is a deterministic infeasible-start primal-dual
//! predictor-corrector interior-point method (HKM direction) over one or
//! more real symmetric PSD blocks. Complex Hermitian constraints are
//! converted at the interface through [`real_embed`], which doubles block
//! sizes but lets one real cone implementation serve every problem here;
//! the eigenvalue duplication does not move optima.
//!
//! On top of the engine sit the three bounds: the extended (tight)
//! single-parameter detector information, the multi-parameter spectral
//! bound, and a heuristic ensemble optimizer for the best achievable
//! classical bound.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::fisher::{cfi_matrix, cfi_max_probe, model_slds};
use crate::linalg::{real_embed, C64, CMatrix, CVector, RMatrix};
use crate::models::{DetectorModel, ProbeState};
use crate::optim::nelder_mead;
use crate::sld::cross_q_operator;

/// One affine PSD constraint `F0 + Σ x_i F_i ⪰ 0` (real symmetric data).
#[derive(Debug, Clone)]
pub struct SdpBlock {
    /// Constant term.
    pub f0: RMatrix,
    /// Coefficient matrix of each variable (same length as the variable
    /// vector).
    pub fs: Vec<RMatrix>,
}

/// Linear SDP `min c·x` subject to every block being PSD.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Objective coefficients.
    pub c: Vec<f64>,
    /// Constraint blocks.
    pub blocks: Vec<SdpBlock>,
}

/// Termination status of the interior-point solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// Relative duality gap and both infeasibilities are below tolerance.
    Optimal,
    /// Iteration budget exhausted; the best iterate is returned.
    MaxIter,
    /// Iterates diverged — the problem is numerically infeasible or
    /// unbounded.
    Infeasible,
}

/// Solution returned by [`solve_sdp`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal variables.
    pub x: Vec<f64>,
    /// Objective value `c·x`.
    pub objective: f64,
    /// Absolute duality gap `Σ Tr(S X)` at termination.
    pub gap: f64,
    /// Termination status.
    pub status: SdpStatus,
    /// Iterations consumed.
    pub iterations: usize,
}

fn sym(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

/// Largest step `α ∈ (0, 1]` keeping `M + α dM` safely inside the PSD cone
/// (`τ = 0.95` of the distance to the boundary).
fn max_step(m: &RMatrix, dm: &RMatrix) -> f64 {
    const TAU: f64 = 0.95;
    let chol = match Cholesky::new(m.clone()) {
        Some(c) => c,
        None => return 1e-3,
    };
    let l = chol.l();
    let b = l
        .solve_lower_triangular(dm)
        .expect("Cholesky factor is nonsingular");
    let w = l
        .solve_lower_triangular(&b.transpose())
        .expect("Cholesky factor is nonsingular");
    let min_eig = crate::linalg::min_symmetric_eigenvalue(&sym(&w));
    if min_eig >= -1e-14 {
        1.0
    } else {
        (TAU / -min_eig).min(1.0)
    }
}

/// Solves a dense linear SDP with a deterministic infeasible-start
/// primal-dual predictor-corrector interior-point iteration.
///
/// Terminates when the relative duality gap and the primal and dual
/// infeasibilities all fall below `tol` (default callers use `1e-8`);
/// identical inputs produce bitwise-identical output.
pub fn solve_sdp(problem: &SdpProblem, max_iter: usize, tol: f64) -> Result<SdpSolution> {
    let k = problem.c.len();
    if problem.blocks.is_empty() {
        return Err(Error::Sdp("problem has no constraint blocks".into()));
    }
    for block in &problem.blocks {
        if block.fs.len() != k {
            return Err(Error::Sdp(
                "block coefficient count does not match the variable count".into(),
            ));
        }
    }

    // Initial point: x = 0 and well-scaled multiples of the identity for
    // every slack and dual block.
    let mut scale = 1.0f64;
    for block in &problem.blocks {
        scale = scale.max(crate::linalg::max_abs_real(&block.f0));
        for f in &block.fs {
            scale = scale.max(crate::linalg::max_abs_real(f));
        }
    }
    for &ci in &problem.c {
        scale = scale.max(ci.abs());
    }
    let xi = 1.0 + scale;

    let mut x = vec![0.0f64; k];
    let mut slacks: Vec<RMatrix> = problem
        .blocks
        .iter()
        .map(|b| RMatrix::identity(b.f0.nrows(), b.f0.nrows()) * xi)
        .collect();
    let mut duals: Vec<RMatrix> = problem
        .blocks
        .iter()
        .map(|b| RMatrix::identity(b.f0.nrows(), b.f0.nrows()) * xi)
        .collect();
    let total_dim: usize = problem.blocks.iter().map(|b| b.f0.nrows()).sum();

    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    for iter in 0..max_iter {
        iterations = iter + 1;

        // Residuals.
        let primal_residuals: Vec<RMatrix> = problem
            .blocks
            .iter()
            .zip(&slacks)
            .map(|(block, s)| {
                let mut r = block.f0.clone() - s;
                for (i, f) in block.fs.iter().enumerate() {
                    r += f * x[i];
                }
                r
            })
            .collect();
        let dual_residuals: Vec<f64> = (0..k)
            .map(|i| {
                problem.c[i]
                    - problem
                        .blocks
                        .iter()
                        .zip(&duals)
                        .map(|(b, xm)| b.fs[i].dot(xm))
                        .sum::<f64>()
            })
            .collect();

        let gap: f64 = slacks.iter().zip(&duals).map(|(s, xm)| s.dot(xm)).sum();
        let mu = gap / total_dim as f64;
        let objective: f64 = problem.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        let dual_objective: f64 = -problem
            .blocks
            .iter()
            .zip(&duals)
            .map(|(b, xm)| b.f0.dot(xm))
            .sum::<f64>();
        let denom = 1.0 + objective.abs() + dual_objective.abs();
        let primal_err = primal_residuals
            .iter()
            .map(crate::linalg::max_abs_real)
            .fold(0.0f64, f64::max)
            / (1.0 + scale);
        let dual_err = dual_residuals
            .iter()
            .map(|r| r.abs())
            .fold(0.0f64, f64::max)
            / (1.0 + scale);
        if gap.abs() / denom <= tol && primal_err <= tol && dual_err <= tol {
            status = SdpStatus::Optimal;
            return Ok(SdpSolution {
                x,
                objective,
                gap,
                status,
                iterations,
            });
        }
        if x.iter().any(|v| v.abs() > 1e14) || gap > 1e16 {
            status = SdpStatus::Infeasible;
            break;
        }

        // Per-block factorizations and the Schur complement
        // M_ij = Σ_b ½ Tr(F_i (S⁻¹ F_j X + X F_j S⁻¹)).
        let mut s_inverses: Vec<RMatrix> = Vec::with_capacity(problem.blocks.len());
        for s in &slacks {
            let chol = Cholesky::new(s.clone())
                .ok_or_else(|| Error::Sdp("slack block lost positive definiteness".into()))?;
            s_inverses.push(chol.inverse());
        }
        let mut schur = RMatrix::zeros(k, k);
        // g[b][i] = S⁻¹ F_i X for block b.
        let mut g: Vec<Vec<RMatrix>> = Vec::with_capacity(problem.blocks.len());
        for ((block, s_inv), xm) in problem.blocks.iter().zip(&s_inverses).zip(&duals) {
            let gb: Vec<RMatrix> = block.fs.iter().map(|f| s_inv * f * xm).collect();
            for i in 0..k {
                for j in i..k {
                    let value = 0.5 * (block.fs[i].dot(&gb[j].transpose())
                        + gb[i].transpose().dot(&block.fs[j]));
                    schur[(i, j)] += value;
                    if i != j {
                        schur[(j, i)] += value;
                    }
                }
            }
            g.push(gb);
        }
        let schur_chol = {
            let mut ridge = 0.0;
            loop {
                let candidate = &schur + RMatrix::identity(k, k) * ridge;
                if let Some(c) = Cholesky::new(candidate) {
                    break c;
                }
                ridge = if ridge == 0.0 {
                    1e-14 * (1.0 + schur.trace().abs() / k as f64)
                } else {
                    ridge * 10.0
                };
                if ridge > 1e6 {
                    return Err(Error::Sdp("Schur complement is numerically singular".into()));
                }
            }
        };

        // Direction for a given target μ̂: solve M dx = rhs(μ̂), then
        // dS = R_p + Σ dx F and dX = sym(μ̂S⁻¹ − X − X dS S⁻¹).
        let directions = |mu_hat: f64| -> (Vec<f64>, Vec<RMatrix>, Vec<RMatrix>) {
            let mut rhs = nalgebra::DVector::<f64>::zeros(k);
            for i in 0..k {
                let mut value = -problem.c[i];
                for (((block, s_inv), xm), rp) in problem
                    .blocks
                    .iter()
                    .zip(&s_inverses)
                    .zip(&duals)
                    .zip(&primal_residuals)
                {
                    value += mu_hat * block.fs[i].dot(s_inv);
                    let cross = s_inv * rp * xm;
                    value -= 0.5 * block.fs[i].dot(&(&cross + cross.transpose()));
                }
                rhs[i] = value;
            }
            let dx = schur_chol.solve(&rhs);
            let mut ds_all = Vec::with_capacity(problem.blocks.len());
            let mut dxm_all = Vec::with_capacity(problem.blocks.len());
            for (((block, s_inv), xm), rp) in problem
                .blocks
                .iter()
                .zip(&s_inverses)
                .zip(&duals)
                .zip(&primal_residuals)
            {
                let mut ds = rp.clone();
                for (i, f) in block.fs.iter().enumerate() {
                    ds += f * dx[i];
                }
                let dxm = sym(&(s_inv * mu_hat - xm - xm * &ds * s_inv));
                ds_all.push(ds);
                dxm_all.push(dxm);
            }
            (dx.iter().copied().collect(), ds_all, dxm_all)
        };

        // Predictor (affine-scaling) step fixes the centering parameter.
        let (_, ds_aff, dx_aff) = directions(0.0);
        let alpha_p_aff = slacks
            .iter()
            .zip(&ds_aff)
            .map(|(s, ds)| max_step(s, ds))
            .fold(1.0f64, f64::min);
        let alpha_d_aff = duals
            .iter()
            .zip(&dx_aff)
            .map(|(xm, dxm)| max_step(xm, dxm))
            .fold(1.0f64, f64::min);
        let mut gap_aff = 0.0;
        for ((s, ds), (xm, dxm)) in slacks.iter().zip(&ds_aff).zip(duals.iter().zip(&dx_aff)) {
            gap_aff += (s + ds * alpha_p_aff).dot(&(xm + dxm * alpha_d_aff));
        }
        let mu_aff = gap_aff.max(0.0) / total_dim as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(1e-6, 1.0);

        // Corrector step towards σμ on the central path.
        let (dx_vec, ds_all, dxm_all) = directions(sigma * mu);
        let alpha_p = slacks
            .iter()
            .zip(&ds_all)
            .map(|(s, ds)| max_step(s, ds))
            .fold(1.0f64, f64::min);
        let alpha_d = duals
            .iter()
            .zip(&dxm_all)
            .map(|(xm, dxm)| max_step(xm, dxm))
            .fold(1.0f64, f64::min);
        for i in 0..k {
            x[i] += alpha_p * dx_vec[i];
        }
        for (s, ds) in slacks.iter_mut().zip(&ds_all) {
            *s = sym(&(&*s + ds * alpha_p));
        }
        for (xm, dxm) in duals.iter_mut().zip(&dxm_all) {
            *xm = sym(&(&*xm + dxm * alpha_d));
        }
    }

    let objective: f64 = problem.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    let gap: f64 = slacks.iter().zip(&duals).map(|(s, xm)| s.dot(xm)).sum();
    if status == SdpStatus::Infeasible {
        return Err(Error::Sdp(
            "iterates diverged; the problem is numerically infeasible or unbounded".into(),
        ));
    }
    Ok(SdpSolution {
        x,
        objective,
        gap,
        status,
        iterations,
    })
}

/// Basis of skew-Hermitian `d × d` matrices (`d²` elements): imaginary
/// diagonal units, real antisymmetric pairs, imaginary symmetric pairs.
fn skew_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for a in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(a, a)] = C64::new(0.0, 1.0);
        basis.push(m);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let mut real = CMatrix::zeros(d, d);
            real[(a, b)] = C64::new(1.0, 0.0);
            real[(b, a)] = C64::new(-1.0, 0.0);
            basis.push(real);
            let mut imag = CMatrix::zeros(d, d);
            imag[(a, b)] = C64::new(0.0, 1.0);
            imag[(b, a)] = C64::new(0.0, 1.0);
            basis.push(imag);
        }
    }
    basis
}

/// Extended (tight) detector information for one parameter.
///
/// Minimizes `t` subject to the `(m+1)`-block Hermitian Schur LMI over `t`
/// and one skew-Hermitian matrix per outcome; the value `J_Ext` satisfies
/// `cfi_max ≤ J_Ext ≤ J_spectral` and equals the maximum CFI over probes.
/// POVM elements are regularised by `+1e-10·I` on the LMI diagonal so that
/// rank-deficient elements do not stall the barrier.
///
/// Returns the optimum and the optimizing skew-Hermitian matrices.
pub fn extended_dqfi(
    povm: &crate::models::Povm,
    derivatives: &[CMatrix],
    _slds: &[CMatrix],
) -> Result<(f64, Vec<CMatrix>)> {
    let d = povm.dim();
    let m = povm.outcomes();
    let total = d * (m + 1);
    let basis = skew_basis(d);
    let k = 1 + m * basis.len();

    let embed_at = |target: &mut CMatrix, block_row: usize, block_col: usize, entry: &CMatrix| {
        for r in 0..d {
            for c in 0..d {
                target[(block_row * d + r, block_col * d + c)] += entry[(r, c)];
            }
        }
    };

    // Constant term: derivatives off the first block row/column, regularised
    // POVM elements on the diagonal.
    let mut f0_c = CMatrix::zeros(total, total);
    for (j, (pi, dpi)) in povm.elements().iter().zip(derivatives).enumerate() {
        embed_at(&mut f0_c, 0, j + 1, dpi);
        embed_at(&mut f0_c, j + 1, 0, dpi);
        let regularised = pi + crate::linalg::identity_c(d) * C64::new(1e-10, 0.0);
        embed_at(&mut f0_c, j + 1, j + 1, &regularised);
    }

    let mut fs_c: Vec<CMatrix> = Vec::with_capacity(k);
    // Variable 0: t on the top-left block.
    let mut f_t = CMatrix::zeros(total, total);
    embed_at(&mut f_t, 0, 0, &crate::linalg::identity_c(d));
    fs_c.push(f_t);
    // Skew variables: −K on block (0, j+1), +K on block (j+1, 0).
    for j in 0..m {
        for kmat in &basis {
            let mut f = CMatrix::zeros(total, total);
            let minus = kmat * C64::new(-1.0, 0.0);
            embed_at(&mut f, 0, j + 1, &minus);
            embed_at(&mut f, j + 1, 0, kmat);
            fs_c.push(f);
        }
    }

    let mut c = vec![0.0; k];
    c[0] = 1.0;
    let problem = SdpProblem {
        c,
        blocks: vec![SdpBlock {
            f0: real_embed(&f0_c),
            fs: fs_c.iter().map(real_embed).collect(),
        }],
    };
    let solution = solve_sdp(&problem, 200, 1e-8)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!(
            "extended-information SDP did not converge (status {:?}, gap {:.3e})",
            solution.status, solution.gap
        )));
    }
    let mut skews = Vec::with_capacity(m);
    for j in 0..m {
        let mut s = CMatrix::zeros(d, d);
        for (b, kmat) in basis.iter().enumerate() {
            s += kmat * C64::new(solution.x[1 + j * basis.len() + b], 0.0);
        }
        skews.push(s);
    }
    Ok((solution.objective, skews))
}

/// Basis of traceless Hermitian `d × d` matrices (`d² − 1` elements).
fn traceless_hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d - 1);
    for a in 0..(d - 1) {
        let mut m = CMatrix::zeros(d, d);
        m[(a, a)] = C64::new(1.0, 0.0);
        m[(a + 1, a + 1)] = C64::new(-1.0, 0.0);
        basis.push(m);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let mut real = CMatrix::zeros(d, d);
            real[(a, b)] = C64::new(1.0, 0.0);
            real[(b, a)] = C64::new(1.0, 0.0);
            basis.push(real);
            let mut imag = CMatrix::zeros(d, d);
            imag[(a, b)] = C64::new(0.0, -1.0);
            imag[(b, a)] = C64::new(0.0, 1.0);
            basis.push(imag);
        }
    }
    basis
}

/// Multi-parameter spectral bound as an SDP.
///
/// Minimizes `Tr(W V)` over a symmetric matrix `V` and a density matrix
/// `ρ`, subject to the Schur block `((V, I), (I, Q̃(ρ))) ⪰ 0` with
/// `Q̃(ρ)_jk = Re Tr(G_jk ρ)` affine in `ρ`, and `ρ ⪰ 0`. Returns the
/// bound and the optimizing state. The result never exceeds the weighted
/// trace bound and lower-bounds every achievable ensemble value.
pub fn spectral_qcrb_sdp(
    model: &DetectorModel,
    theta: &[f64],
    w: Option<&RMatrix>,
) -> Result<(f64, ProbeState)> {
    let povm = model.povm(theta)?;
    let deriv = model.derivatives(theta)?;
    let slds = model_slds(&povm, &deriv)?;
    let d = povm.dim();
    let n = slds.len();
    let weight = match w {
        Some(weight) => weight.clone(),
        None => RMatrix::identity(n, n),
    };

    // Cross operators G_jk with Q̃_jk = Re Tr(G_jk ρ).
    let mut cross = vec![vec![CMatrix::zeros(d, d); n]; n];
    for j in 0..n {
        for l in j..n {
            let g = cross_q_operator(&slds[j], &slds[l], &povm)?;
            cross[j][l] = g.clone();
            cross[l][j] = g;
        }
    }

    let state_basis = traceless_hermitian_basis(d);
    // Variables: a (state coefficients) then the upper triangle of V.
    let k_state = state_basis.len();
    let mut v_index = Vec::new();
    for i in 0..n {
        for j in i..n {
            v_index.push((i, j));
        }
    }
    let k = k_state + v_index.len();

    let qt_entry = |rho: &CMatrix, j: usize, l: usize| -> f64 {
        crate::linalg::trace_re(&(&cross[j][l] * rho))
    };

    // Block 1: ((V, I), (I, Q̃(ρ))), real symmetric of size 2n.
    let two_n = 2 * n;
    let mut f0_schur = RMatrix::zeros(two_n, two_n);
    let rho0 = crate::linalg::identity_c(d) * C64::new(1.0 / d as f64, 0.0);
    for i in 0..n {
        f0_schur[(i, n + i)] = 1.0;
        f0_schur[(n + i, i)] = 1.0;
        for j in 0..n {
            f0_schur[(n + i, n + j)] = qt_entry(&rho0, i, j);
        }
    }
    let mut fs_schur: Vec<RMatrix> = Vec::with_capacity(k);
    for t in &state_basis {
        let mut f = RMatrix::zeros(two_n, two_n);
        let t_c = t.map(|z| z); // already complex
        for i in 0..n {
            for j in 0..n {
                f[(n + i, n + j)] = crate::linalg::trace_re(&(&cross[i][j] * &t_c));
            }
        }
        fs_schur.push(f);
    }
    for &(i, j) in &v_index {
        let mut f = RMatrix::zeros(two_n, two_n);
        f[(i, j)] = 1.0;
        f[(j, i)] = 1.0;
        fs_schur.push(f);
    }

    // Block 2: ρ(a) ⪰ 0 through the real embedding.
    let f0_state = real_embed(&rho0);
    let mut fs_state: Vec<RMatrix> = Vec::with_capacity(k);
    for t in &state_basis {
        fs_state.push(real_embed(t));
    }
    for _ in &v_index {
        fs_state.push(RMatrix::zeros(2 * d, 2 * d));
    }

    // Objective Tr(W V).
    let mut c = vec![0.0; k];
    for (idx, &(i, j)) in v_index.iter().enumerate() {
        c[k_state + idx] = if i == j {
            weight[(i, i)]
        } else {
            weight[(i, j)] + weight[(j, i)]
        };
    }

    let problem = SdpProblem {
        c,
        blocks: vec![
            SdpBlock {
                f0: f0_schur,
                fs: fs_schur,
            },
            SdpBlock {
                f0: f0_state,
                fs: fs_state,
            },
        ],
    };
    let solution = solve_sdp(&problem, 200, 1e-8)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::Sdp(format!(
            "spectral-bound SDP did not converge (status {:?}, gap {:.3e})",
            solution.status, solution.gap
        )));
    }
    let mut rho = rho0;
    for (i, t) in state_basis.iter().enumerate() {
        rho += t * C64::new(solution.x[i], 0.0);
    }
    // The optimizer keeps ρ marginally inside the cone; clip tiny negative
    // eigenvalues before handing the state back.
    let rho = crate::linalg::hermitian_function(&rho, |l| l.max(0.0))?;
    let rho = &rho * C64::new(1.0 / crate::linalg::trace_re(&rho), 0.0);
    Ok((solution.objective, ProbeState::new(rho)?))
}

/// Detects the diagonal two-outcome structure with one parameter per
/// diagonal entry of the first element, for which the minimum ensemble
/// bound has the closed form `(Σ_k √(θ_k(1−θ_k)))²`.
fn diagonal_two_outcome_thetas(
    povm: &crate::models::Povm,
    deriv: &crate::models::DerivativeSet,
) -> Option<Vec<(usize, f64)>> {
    if povm.outcomes() != 2 || !povm.is_diagonal() || !deriv.is_diagonal() {
        return None;
    }
    let d = povm.dim();
    let first = povm.element(0);
    let mut thetas = Vec::with_capacity(deriv.param_count());
    for k in 0..deriv.param_count() {
        let dpi = &deriv.param(k)[0];
        let mut hit: Option<usize> = None;
        for a in 0..d {
            let value = dpi[(a, a)].re;
            if (value - 1.0).abs() <= 1e-12 {
                if hit.is_some() {
                    return None;
                }
                hit = Some(a);
            } else if value.abs() > 1e-12 {
                return None;
            }
        }
        let a = hit?;
        thetas.push((a, first[(a, a)].re));
    }
    Some(thetas)
}

/// Heuristic minimum of `Tr(W F⁻¹)` over probe ensembles (the best
/// achievable classical bound for a fixed detector).
///
/// Diagonal two-outcome models use the closed form
/// `(Σ √(θ_k(1−θ_k)))²` with weights proportional to `√(θ_k(1−θ_k))`;
/// a single parameter reduces to `1/cfi_max`. Otherwise a multi-restart
/// Nelder-Mead search over pure states and weight logits is run,
/// initialized from the per-parameter optimal probes; the result is an
/// upper bound on the true minimum and never falls below the spectral SDP
/// bound.
pub fn ccrb_star(
    model: &DetectorModel,
    theta: &[f64],
    ensemble_size: usize,
    w: Option<&RMatrix>,
    budget: usize,
    seed: u64,
) -> Result<(f64, Vec<(f64, ProbeState)>)> {
    let povm = model.povm(theta)?;
    let deriv = model.derivatives(theta)?;
    let d = povm.dim();
    let n = deriv.param_count();
    let m = povm.outcomes();
    let min_size = n.div_ceil(m - 1);
    if ensemble_size < min_size {
        return Err(Error::Config(format!(
            "ensemble of {ensemble_size} states cannot identify {n} parameters with {m} outcomes (need at least {min_size})"
        )));
    }
    let identity_weight = match w {
        None => true,
        Some(weight) => {
            weight.nrows() == n && (weight - RMatrix::identity(n, n)).abs().max() <= 1e-12
        }
    };

    // Closed form for the diagonal two-outcome structure.
    if identity_weight {
        if let Some(thetas) = diagonal_two_outcome_thetas(&povm, &deriv) {
            let roots: Vec<f64> = thetas
                .iter()
                .map(|&(_, t)| (t * (1.0 - t)).max(0.0).sqrt())
                .collect();
            let total: f64 = roots.iter().sum();
            let value = total * total;
            let mut ensemble = Vec::with_capacity(n);
            for (&(a, _), root) in thetas.iter().zip(&roots) {
                let mut psi = CVector::zeros(d);
                psi[a] = C64::new(1.0, 0.0);
                ensemble.push((root / total, ProbeState::pure(&psi)?));
            }
            return Ok((value, ensemble));
        }
    }

    // Single parameter: one optimal probe suffices.
    if n == 1 {
        let best = cfi_max_probe(&povm, &deriv, 0, budget.max(8), seed)?;
        return Ok((1.0 / best.value, vec![(1.0, best.probe)]));
    }

    let weight = match w {
        Some(weight) => weight.clone(),
        None => RMatrix::identity(n, n),
    };
    let p = ensemble_size;
    let vars = p * 2 * d + (p - 1);

    let decode = |x: &[f64]| -> Result<Vec<(f64, ProbeState)>> {
        let mut states = Vec::with_capacity(p);
        let mut logits = Vec::with_capacity(p);
        logits.push(0.0);
        for i in 0..p {
            let offset = i * 2 * d;
            let mut psi = CVector::from_fn(d, |r, _| C64::new(x[offset + r], x[offset + d + r]));
            let norm = psi.norm();
            if norm < 1e-9 {
                return Err(Error::Estimator("degenerate state parameters".into()));
            }
            psi /= C64::new(norm, 0.0);
            states.push(ProbeState::pure(&psi)?);
        }
        for i in 0..(p - 1) {
            logits.push(x[p * 2 * d + i]);
        }
        let max_logit = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max_logit).exp()).collect();
        let total: f64 = exps.iter().sum();
        Ok(states
            .into_iter()
            .zip(exps)
            .map(|(s, e)| (e / total, s))
            .collect())
    };

    let objective = |x: &[f64]| -> f64 {
        let ensemble = match decode(x) {
            Ok(e) => e,
            Err(_) => return 1e12,
        };
        let fisher = match cfi_matrix(&ensemble, &povm, &deriv) {
            Ok(f) => f,
            Err(_) => return 1e12,
        };
        let (eigenvalues, eigenvectors) = crate::linalg::jacobi_eigen(&fisher);
        let max_eig = eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let min_eig = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig <= 1e-10 * (1.0 + max_eig) {
            return 1e12;
        }
        let mut inv = RMatrix::zeros(n, n);
        for kk in 0..n {
            let v = eigenvectors.column(kk);
            let scale = 1.0 / eigenvalues[kk];
            for a in 0..n {
                for b in 0..n {
                    inv[(a, b)] += scale * v[a] * v[b];
                }
            }
        }
        (&weight * inv).trace()
    };

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    // Warm start: per-parameter optimal probes, padded with random states.
    let mut warm = vec![0.0; vars];
    for i in 0..p {
        let offset = i * 2 * d;
        let psi: CVector = if i < n {
            match cfi_max_probe(&povm, &deriv, i, 8, seed.wrapping_add(i as u64)) {
                Ok(best) => best.probe.principal_vector()?,
                Err(_) => CVector::from_fn(d, |_, _| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }),
            }
        } else {
            CVector::from_fn(d, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        };
        for r in 0..d {
            warm[offset + r] = psi[r].re;
            warm[offset + d + r] = psi[r].im;
        }
    }

    let mut best_value = f64::INFINITY;
    let mut best_x = warm.clone();
    for restart in 0..budget.max(1) {
        let start: Vec<f64> = if restart == 0 {
            warm.clone()
        } else {
            (0..vars).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()
        };
        let result = nelder_mead(objective, &start, 0.25, 4000, 1e-13);
        if result.value < best_value {
            best_value = result.value;
            best_x = result.x;
        }
    }
    if best_value >= 1e11 {
        return Err(Error::SingularFisher(0.0));
    }
    let ensemble = decode(&best_x)?;
    Ok((best_value, ensemble))
}
