//! End-to-end acceptance suite: twelve numbered criteria covering closed-form
//! bound reproduction, attainability, tightness of the extended bound,
//! ordering, gap statistics, multi-parameter and multi-copy behaviour, the
//! Bures-metric identity, the simulated experiment replica, process-vs-
//! detector equivalence, and cross-cutting property checks.
//!
//! Each test prints one `criterion N: pass` line on success (run with
//! `--nocapture` to see them); a failure panics with the offending values.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use approx::assert_abs_diff_eq;
use detbound::fisher::{
    attainability_check, cfi, cfi_max_probe, cfi_pure, dqfi_matrix_trace, gill_massar_qcrb,
    model_slds, ordering_check, single_parameter_bounds, trace_qcrb,
};
use detbound::geometry::{bures_qfi_check, convexity_check};
use detbound::linalg::{dagger, hermitian_eig, max_abs, trace_re, CMatrix, CVector, C64};
use detbound::models::{
    apply_channel, build_named_model, probe_from_bloch, random_model, DetectorModel, ProbeState,
};
use detbound::montecarlo::{simulate_sweep, ExperimentConfig};
use detbound::multicopy::{a_gram_norm, dqfi_ncopy, q_ncopy, sandwich_check};
use detbound::sdp::{ccrb_star, extended_dqfi, spectral_qcrb_sdp};
use detbound::sld::{q_operator, sld_eig, sld_vec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn named(name: &str, fixed: &[(&str, f64)]) -> DetectorModel {
    let map: BTreeMap<String, f64> = fixed.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    build_named_model(name, &map).expect("known model")
}

fn bounds_at(model: &DetectorModel, theta: &[f64], k: usize) -> (f64, f64) {
    let povm = model.povm(theta).unwrap();
    let deriv = model.derivatives(theta).unwrap();
    let (_, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, k).unwrap();
    (spectral.value, j_trace)
}

/// Amplitude-damping detector: closed-form spectral information (valid for
/// measurement angles with `cos θ ≥ 0`).
fn ad_j_spectral(theta: f64, p: f64) -> f64 {
    let c = theta.cos();
    let s = theta.sin();
    1.0 / (4.0 * p * (1.0 - p))
        + (1.0 + p) * c * c / (4.0 * p * (1.0 - p * p * c * c))
        + c * (1.0 - p * c * c).sqrt() * ((1.0 - p * p) * (1.0 + p) * c * c + s * s)
            / (2.0 * p * (1.0 - p).sqrt() * ((1.0 - p * p) * c * c + s * s).powi(2))
}

/// Amplitude-damping detector: closed-form trace information.
fn ad_j_trace(theta: f64, p: f64) -> f64 {
    let c = theta.cos();
    (1.0 + (1.0 - 2.0 * p * p) * c * c) / (2.0 * p * (1.0 - p) * (1.0 - p * p * c * c))
}

#[test]
fn criterion_01_closed_form_bounds() {
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();

    let (js, jt) = bounds_at(&named("bitflip_z", &[]), &[0.2], 0);
    assert!(rel(js, 6.25) < 1e-9 && rel(jt, 12.5) < 1e-9, "bitflip {js} {jt}");

    let (js, jt) = bounds_at(&named("dephased_pvm", &[("theta", FRAC_PI_8)]), &[0.2], 0);
    let expected = FRAC_PI_8.sin().powi(2) / (0.2 * 0.8);
    assert!(rel(js, expected) < 1e-9 && rel(jt, 2.0 * expected) < 1e-9);
    assert_eq!(format!("{:.3}", 1.0 / js), "1.093");

    let (js, jt) = bounds_at(&named("depolarized_pvm", &[("theta", FRAC_PI_8)]), &[0.2], 0);
    let expected = 1.0 / (0.2 * 1.8);
    assert!(rel(js, expected) < 1e-9 && rel(jt, 2.0 * expected) < 1e-9);

    // Amplitude damping at five parameter points (cos θ ≥ 0 branch).
    let points = [
        (FRAC_PI_8, 0.1),
        (PI / 6.0, 0.2),
        (PI / 4.0, 0.3),
        (PI / 3.0, 0.25),
        (FRAC_PI_2, 0.4),
    ];
    for (theta, p) in points {
        let model = named("amplitude_damped_pvm", &[("theta", theta)]);
        let (js, jt) = bounds_at(&model, &[p], 0);
        assert!(
            rel(js, ad_j_spectral(theta, p)) < 1e-9,
            "AD spectral at ({theta}, {p}): {js} vs {}",
            ad_j_spectral(theta, p)
        );
        assert!(rel(jt, ad_j_trace(theta, p)) < 1e-9);
    }
    println!("criterion 1: pass — closed-form bounds reproduced to 1e-9 relative");
}

#[test]
fn criterion_02_optimal_probe_angle() {
    let model = named("dephased_pvm", &[("theta", FRAC_PI_8)]);
    let povm = model.povm(&[0.2]).unwrap();
    let deriv = model.derivatives(&[0.2]).unwrap();
    let best = cfi_max_probe(&povm, &deriv, 0, 32, 7).unwrap();
    let (polar, _) = best.probe.bloch_angles().unwrap();
    let expected = (FRAC_PI_8.tan() / (1.0 - 2.0 * 0.2)).atan();
    // The orthogonal probe attains the same CFI for a two-outcome qubit
    // detector, so the maximizer may come back on the antipodal branch.
    let folded = polar.min(PI - polar);
    assert!(
        (folded - expected).abs() < 1e-3,
        "optimal polar angle {polar} vs {expected}"
    );
    assert!((expected - 0.6042).abs() < 1e-3);
    println!("criterion 2: pass — optimal probe angle {polar:.4} matches arctan(tanθ/(1−2p))");
}

#[test]
fn criterion_03_diagonal_attainability() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for d in 2..=4usize {
        let model = named("onoff_diagonal", &[("d_tr", d as f64)]);
        for _ in 0..10 {
            let theta: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..0.95)).collect();
            let povm = model.povm(&theta).unwrap();
            let deriv = model.derivatives(&theta).unwrap();
            for k in 0..d {
                let (_, _, spectral) = single_parameter_bounds(&povm, &deriv, k).unwrap();
                let mut best = f64::NEG_INFINITY;
                for b in 0..d {
                    let mut psi = CVector::zeros(d);
                    psi[b] = C64::new(1.0, 0.0);
                    best = best.max(cfi_pure(&psi, &povm, deriv.param(k)).unwrap());
                }
                assert!(
                    (best - spectral.value).abs() <= 1e-8 * (1.0 + spectral.value),
                    "d={d} k={k}: basis CFI {best} vs J_spectral {}",
                    spectral.value
                );
            }
        }
    }
    println!("criterion 3: pass — basis-state CFI attains J_spectral on diagonal detectors");
}

#[test]
fn criterion_04_extended_dqfi_tightness() {
    // 100 random qubit models: the extended bound coincides with the true
    // maximum CFI found by the probe search.
    let worst = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let model = random_model(2, 2, 4_000 + seed);
            let povm = model.povm(&[0.0]).unwrap();
            let deriv = model.derivatives(&[0.0]).unwrap();
            let slds = model_slds(&povm, &deriv).unwrap();
            let (j_ext, _) = extended_dqfi(&povm, deriv.param(0), &slds[0]).unwrap();
            let best = cfi_max_probe(&povm, &deriv, 0, 256, seed).unwrap();
            (j_ext - best.value).abs() / j_ext
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst <= 1e-4, "worst relative tightness gap {worst}");

    // Diagonal models: the extended bound collapses onto the spectral one.
    let mut diagonal: Vec<(DetectorModel, Vec<f64>)> = vec![
        (named("bitflip_z", &[]), vec![0.2]),
        (named("bitflip_z", &[]), vec![0.4]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for d in 2..=4usize {
        let theta: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..0.9)).collect();
        diagonal.push((named("onoff_diagonal", &[("d_tr", d as f64)]), theta));
    }
    for (model, theta) in &diagonal {
        let povm = model.povm(theta).unwrap();
        let deriv = model.derivatives(theta).unwrap();
        let slds = model_slds(&povm, &deriv).unwrap();
        for (k, sld_k) in slds.iter().enumerate() {
            let (_, _, spectral) = single_parameter_bounds(&povm, &deriv, k).unwrap();
            let (j_ext, _) = extended_dqfi(&povm, deriv.param(k), sld_k).unwrap();
            assert!(
                (j_ext - spectral.value).abs() <= 1e-7 * (1.0 + spectral.value),
                "{}: J_ext {} vs J_spectral {}",
                model.name(),
                j_ext,
                spectral.value
            );
        }
    }
    println!("criterion 4: pass — extended bound tight (max gap {worst:.2e}) and equals J_spectral on diagonal models");
}

#[test]
fn criterion_05_ordering_and_chain() {
    let max_ratio = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let model = random_model(2, 2, 5_000 + seed);
            let povm = model.povm(&[0.0]).unwrap();
            let deriv = model.derivatives(&[0.0]).unwrap();
            let (slds, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, 0).unwrap();
            ordering_check(j_trace, spectral.value, 2).unwrap();

            // Chain: F(ρ) ≤ Tr(Qρ) ≤ J_spectral ≤ J_trace on random probes.
            let q = q_operator(&slds, &povm).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..3 {
                let polar: f64 = rng.gen_range(0.0..PI);
                let azimuth: f64 = rng.gen_range(0.0..2.0 * PI);
                let probe = probe_from_bloch(polar, azimuth);
                let f = cfi(&probe, &povm, &deriv, 0).unwrap();
                let q_mean = trace_re(&(&q * probe.matrix()));
                let tol = 1e-8 * (1.0 + j_trace);
                assert!(f <= q_mean + tol, "F {f} > Tr(Qρ) {q_mean}");
                assert!(q_mean <= spectral.value + tol);
                assert!(spectral.value <= j_trace + tol);
            }

            let (j_ext, _) = extended_dqfi(&povm, deriv.param(0), &slds).unwrap();
            j_trace / j_ext
        })
        .reduce(|| 0.0, f64::max);
    assert!(
        max_ratio <= 2.0 + 1e-6,
        "J_trace/J_ext exceeded two: {max_ratio}"
    );
    println!(
        "criterion 5: pass — 1,000 models ordered, chain holds, max J_trace/J_ext = {max_ratio:.6}"
    );
}

#[test]
fn criterion_06_gap_statistic() {
    let (_, summary) = detbound::cli::run_bench(1000, 2, 2, 606, 0);
    assert_eq!(summary.failures, 0);
    assert!(
        (0.005..=0.06).contains(&summary.mean_gap),
        "mean relative gap {} outside [0.5%, 6%]",
        summary.mean_gap
    );
    println!(
        "criterion 6: pass — mean relative gap {:.4} over 1,000 random models in [0.005, 0.06]",
        summary.mean_gap
    );
}

/// Full-scale variant of criterion 6 (opt-in: `cargo test -- --ignored`).
#[test]
#[ignore]
fn criterion_06_gap_statistic_full() {
    let (_, summary) = detbound::cli::run_bench(10_000, 2, 2, 606, 0);
    assert_eq!(summary.failures, 0);
    assert!((0.005..=0.06).contains(&summary.mean_gap));
    println!(
        "criterion 6 (full): pass — mean relative gap {:.4} over 10,000 models",
        summary.mean_gap
    );
}

#[test]
fn criterion_07_multiparameter_bounds() {
    // On-off detector, θ = (0.1, 0.4).
    let onoff = named("onoff_diagonal", &[("d_tr", 2.0)]);
    let theta = [0.1, 0.4];
    let povm = onoff.povm(&theta).unwrap();
    let deriv = onoff.derivatives(&theta).unwrap();
    let slds = model_slds(&povm, &deriv).unwrap();
    let jt = dqfi_matrix_trace(&slds, &povm).unwrap();
    assert_abs_diff_eq!(trace_qcrb(&jt, None).unwrap(), 0.33, epsilon = 1e-9);

    let closed = (0.3f64 + 0.24f64.sqrt()).powi(2);
    let (spectral_qcrb, _) = spectral_qcrb_sdp(&onoff, &theta, None).unwrap();
    assert_abs_diff_eq!(spectral_qcrb, 0.6239388, epsilon = 1e-6);
    assert_abs_diff_eq!(spectral_qcrb, closed, epsilon = 1e-6);

    let (ccrb, ensemble) = ccrb_star(&onoff, &theta, 2, None, 16, 7).unwrap();
    assert!((ccrb - closed).abs() < 1e-6, "ccrb* {ccrb}");
    let ratio = ensemble[0].0 / ensemble[1].0;
    assert_abs_diff_eq!(ratio, 0.3 / 0.489898, epsilon = 1e-4);

    // Bit-phase-flip detector, θ = (0.1, 0.2).
    let bpf = named("bitflip_phaseflip_2param", &[]);
    let theta = [0.1, 0.2];
    let povm = bpf.povm(&theta).unwrap();
    let deriv = bpf.derivatives(&theta).unwrap();
    let slds = model_slds(&povm, &deriv).unwrap();
    let jt = dqfi_matrix_trace(&slds, &povm).unwrap();
    let trace_bound = trace_qcrb(&jt, None).unwrap();
    assert_abs_diff_eq!(trace_bound, 0.375, epsilon = 1e-9);
    let (spectral_qcrb, _) = spectral_qcrb_sdp(&bpf, &theta, None).unwrap();
    assert_abs_diff_eq!(spectral_qcrb, 2.0 * trace_bound, epsilon = 1e-6);

    let gm = gill_massar_qcrb(&jt).unwrap();
    let (ccrb, _) = ccrb_star(&bpf, &theta, 2, None, 24, 11).unwrap();
    assert!(
        (ccrb - 2.0 * gm).abs() / (2.0 * gm) < 0.01,
        "ccrb* {ccrb} vs 2·GM {}",
        2.0 * gm
    );
    println!("criterion 7: pass — multi-parameter trace/spectral/ensemble bounds reproduced");
}

#[test]
fn criterion_08_multicopy_scaling() {
    // Correlated detector: quadratic (Heisenberg) scaling of the spectral
    // information.
    let model = named("heisenberg_k", &[("k", 2.0)]);
    let povm = model.povm(&[0.2]).unwrap();
    let deriv = model.derivatives(&[0.2]).unwrap();
    let slds = detbound::sld::sld_outcomes(&povm, deriv.param(0)).unwrap();
    for n in 2..=4usize {
        let q_n = q_ncopy(&slds, &povm, n).unwrap();
        let (spectral, _) = dqfi_ncopy(&q_n, 2, n).unwrap();
        let expected = n as f64 * (17.0 / 3.0) + (n * n) as f64;
        assert!(
            (spectral - expected).abs() < 1e-6,
            "n={n}: {spectral} vs {expected}"
        );
    }

    // Diagonal detector: strictly additive.
    let model = named("bitflip_z", &[]);
    let povm = model.povm(&[0.2]).unwrap();
    let deriv = model.derivatives(&[0.2]).unwrap();
    let slds = detbound::sld::sld_outcomes(&povm, deriv.param(0)).unwrap();
    for n in 1..=4usize {
        let q_n = q_ncopy(&slds, &povm, n).unwrap();
        let (spectral, _) = dqfi_ncopy(&q_n, 2, n).unwrap();
        assert_abs_diff_eq!(spectral, 6.25 * n as f64, epsilon = 1e-9 * n as f64);
    }

    // Two-copy trace scaling plus the sandwich bounds on random models.
    (0..100u64).into_par_iter().for_each(|seed| {
        let model = random_model(2, 2, 8_000 + seed);
        let povm = model.povm(&[0.0]).unwrap();
        let deriv = model.derivatives(&[0.0]).unwrap();
        let (slds, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, 0).unwrap();
        let q_2 = q_ncopy(&slds, &povm, 2).unwrap();
        let (spectral_2, trace_2) = dqfi_ncopy(&q_2, 2, 2).unwrap();
        assert!(
            (trace_2 - 4.0 * j_trace).abs() <= 1e-8 * (1.0 + 4.0 * j_trace),
            "two-copy trace {trace_2} vs {}",
            4.0 * j_trace
        );
        let a_norm = a_gram_norm(&slds, &povm).unwrap();
        sandwich_check(spectral.value, spectral_2, 2, a_norm).unwrap();
    });
    println!("criterion 8: pass — multi-copy Heisenberg scaling, additivity, and sandwich bounds");
}

#[test]
fn criterion_09_bures_identity() {
    let cases: Vec<(DetectorModel, Vec<f64>)> = vec![
        (named("bitflip_z", &[]), vec![0.3]),
        (named("phaseflip_xz", &[]), vec![0.18]),
        (named("dephased_pvm", &[("theta", FRAC_PI_8)]), vec![0.2]),
        (named("depolarized_pvm", &[("theta", 1.1), ("phi", 0.7)]), vec![0.4]),
        (named("amplitude_damped_pvm", &[("theta", PI / 3.0)]), vec![0.3]),
    ];
    for (model, theta) in &cases {
        let report = bures_qfi_check(model, theta, &[1e-2, 1e-3]).unwrap();
        assert!(
            report.errors[1] <= 0.02 * report.j_trace,
            "{}: error {} vs 2% of {}",
            model.name(),
            report.errors[1],
            report.j_trace
        );
        assert!(
            report.errors[1] <= report.errors[0] / 5.0,
            "{}: errors {:?} shrink by less than 5x",
            model.name(),
            report.errors
        );
    }
    println!("criterion 9: pass — Bures distance recovers J_trace for 5 named models");
}

#[test]
fn criterion_10_experiment_replica() {
    let start = std::time::Instant::now();
    let model = named("dephased_pvm", &[("theta", FRAC_PI_8)]);
    let mut probes: Vec<ProbeState> = (0..33)
        .map(|i| probe_from_bloch(0.2 + 0.8 * i as f64 / 32.0, 0.0))
        .collect();
    let optimal = (FRAC_PI_8.tan() / 0.6).atan();
    probes.push(probe_from_bloch(optimal, 0.0));
    let cfg = ExperimentConfig {
        model,
        theta_true: vec![0.2],
        param: 0,
        probes,
        shots: 100_000,
        resamples: 50,
        seed: 20_260_823,
    };
    let sweep = simulate_sweep(&cfg).unwrap();

    let floor = sweep.rows[0].qcrb_spectral;
    assert_abs_diff_eq!(floor, 1.09254834, epsilon = 1e-6);
    let mut argmin = 0usize;
    for (i, row) in sweep.rows.iter().take(33).enumerate() {
        assert!(
            row.mse_scaled >= floor - 5.0 * row.mse_std,
            "probe {i}: scaled MSE {} dips below the spectral bound",
            row.mse_scaled
        );
        if row.mse_scaled < sweep.rows[argmin].mse_scaled {
            argmin = i;
        }
    }
    let at_optimal = sweep.rows[33].mse_scaled;
    assert!(
        (1.03..=1.16).contains(&at_optimal),
        "scaled MSE at the optimal probe: {at_optimal}"
    );
    let best_angle = sweep.rows[argmin].probe_theta;
    assert!(
        (0.55 - 1e-9..=0.66 + 1e-9).contains(&best_angle),
        "argmin probe angle {best_angle}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 30, "replica took {elapsed:?}");
    println!(
        "criterion 10: pass — replica MSE floor {at_optimal:.4}, argmin angle {best_angle:.4}, {elapsed:?}"
    );
}

#[test]
fn criterion_11_process_vs_detector_equivalence() {
    use detbound::fisher::state_qfi;
    use detbound::models::{amplitude_damping_kraus, dephasing_kraus, depolarizing_kraus};

    type KrausFn = fn(f64) -> Vec<CMatrix>;
    type ClosedForm = fn(f64) -> f64;
    let channels: [(&str, KrausFn, ClosedForm); 3] = [
        ("dephased_pvm", dephasing_kraus, |p| 1.0 / (p * (1.0 - p))),
        ("depolarized_pvm", depolarizing_kraus, |p| {
            1.0 / (p * (2.0 - p))
        }),
        ("amplitude_damped_pvm", amplitude_damping_kraus, |p| {
            1.0 / (p * (1.0 - p))
        }),
    ];

    for (name, kraus, closed) in channels {
        for p in [0.1, 0.3] {
            let expected = closed(p);

            // Detector side: maximize J_spectral over the measurement angle.
            let mut detector_max = f64::NEG_INFINITY;
            for i in 0..=180 {
                let angle = PI * i as f64 / 180.0;
                let model = named(name, &[("theta", angle)]);
                let (js, _) = bounds_at(&model, &[p], 0);
                detector_max = detector_max.max(js);
            }
            assert!(
                (detector_max - expected).abs() <= 1e-6 * expected,
                "{name} p={p}: detector max {detector_max} vs {expected}"
            );

            // State side: maximize the output-state QFI over pure probes.
            let h = 1e-6;
            let mut state_max = f64::NEG_INFINITY;
            for i in 0..=60 {
                let angle = PI * i as f64 / 60.0;
                let probe = probe_from_bloch(angle, 0.0);
                let out = apply_channel(&kraus(p), probe.matrix());
                let plus = apply_channel(&kraus(p + h), probe.matrix());
                let minus = apply_channel(&kraus(p - h), probe.matrix());
                let drho = (plus - minus) / C64::new(2.0 * h, 0.0);
                let qfi = state_qfi(&ProbeState::new(out).unwrap(), &drho).unwrap();
                state_max = state_max.max(qfi);
            }
            assert!(
                (state_max - expected).abs() <= 1e-4 * expected,
                "{name} p={p}: state max {state_max} vs {expected}"
            );
        }
    }
    println!("criterion 11: pass — max-over-angle J_spectral equals max-over-probe state QFI");
}

#[test]
fn criterion_12_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);

    // SLD cross-solver agreement.
    for seed in 0..25u64 {
        let model = random_model(2, 3, 12_000 + seed);
        let povm = model.povm(&[0.0]).unwrap();
        let deriv = model.derivatives(&[0.0]).unwrap();
        for (pi, dpi) in povm.elements().iter().zip(deriv.param(0)) {
            let a = sld_eig(pi, dpi).unwrap();
            let b = sld_vec(pi, dpi).unwrap();
            assert!(max_abs(&(&a - &b)) <= 1e-9 * (1.0 + max_abs(&a)));
        }
    }

    // CFI ensemble convexity: mixing probes never increases the CFI beyond
    // the mixture of CFIs.
    let model = named("dephased_pvm", &[("theta", FRAC_PI_8)]);
    let povm = model.povm(&[0.2]).unwrap();
    let deriv = model.derivatives(&[0.2]).unwrap();
    for _ in 0..50 {
        let p1 = probe_from_bloch(rng.gen_range(0.1..3.0), rng.gen_range(0.0..6.0));
        let p2 = probe_from_bloch(rng.gen_range(0.1..3.0), rng.gen_range(0.0..6.0));
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let mixed = ProbeState::new(
            p1.matrix() * C64::new(lambda, 0.0) + p2.matrix() * C64::new(1.0 - lambda, 0.0),
        )
        .unwrap();
        let f_mixed = cfi(&mixed, &povm, &deriv, 0).unwrap();
        let f_split = lambda * cfi(&p1, &povm, &deriv, 0).unwrap()
            + (1.0 - lambda) * cfi(&p2, &povm, &deriv, 0).unwrap();
        assert!(f_mixed <= f_split + 1e-9, "CFI convexity: {f_mixed} > {f_split}");
    }

    // J_trace convexity on 100 random same-shape mixtures.
    for seed in 0..100u64 {
        let a = random_model(2, 2, 13_000 + seed);
        let b = random_model(2, 2, 14_000 + seed);
        let pa = a.povm(&[0.0]).unwrap();
        let da = a.derivatives(&[0.0]).unwrap();
        let pb = b.povm(&[0.0]).unwrap();
        let db = b.derivatives(&[0.0]).unwrap();
        convexity_check(&pa, da.param(0), &pb, db.param(0), &[0.25, 0.5, 0.75]).unwrap();
    }

    // Basis-change invariance of both informations.
    for seed in 0..25u64 {
        let model = random_model(2, 2, 15_000 + seed);
        let povm = model.povm(&[0.0]).unwrap();
        let deriv = model.derivatives(&[0.0]).unwrap();
        let (_, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, 0).unwrap();

        let g = CMatrix::from_fn(2, 2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let herm = detbound::linalg::hermitian_part(&g);
        let (_, u) = hermitian_eig(&herm).unwrap();
        let rotate = |m: &CMatrix| dagger(&u) * m * &u;
        let rotated_povm =
            detbound::models::Povm::new(povm.elements().iter().map(&rotate).collect()).unwrap();
        let rotated_derivs: Vec<CMatrix> = deriv.param(0).iter().map(&rotate).collect();
        let slds = detbound::sld::sld_outcomes(&rotated_povm, &rotated_derivs).unwrap();
        let jt = detbound::fisher::trace_dqfi(&slds, &rotated_povm).unwrap();
        let js = detbound::fisher::spectral_dqfi(&slds, &rotated_povm).unwrap();
        assert!((jt - j_trace).abs() <= 1e-9 * (1.0 + j_trace));
        assert!((js.value - spectral.value).abs() <= 1e-9 * (1.0 + spectral.value));
    }

    // Bitwise determinism of bench and simulate under fixed seeds.
    let (rows_a, summary_a) = detbound::cli::run_bench(50, 2, 2, 99, 0);
    let (rows_b, summary_b) = detbound::cli::run_bench(50, 2, 2, 99, 0);
    assert_eq!(rows_a.len(), rows_b.len());
    for (x, y) in rows_a.iter().zip(&rows_b) {
        assert_eq!(x.j_trace.to_bits(), y.j_trace.to_bits());
        assert_eq!(x.j_spectral.to_bits(), y.j_spectral.to_bits());
        assert_eq!(x.j_ext.to_bits(), y.j_ext.to_bits());
    }
    assert_eq!(summary_a.mean_gap.to_bits(), summary_b.mean_gap.to_bits());

    let cfg = ExperimentConfig {
        model: named("dephased_pvm", &[("theta", FRAC_PI_8)]),
        theta_true: vec![0.2],
        param: 0,
        probes: (0..9).map(|i| probe_from_bloch(0.2 + 0.1 * i as f64, 0.0)).collect(),
        shots: 10_000,
        resamples: 25,
        seed: 555,
    };
    let s1 = simulate_sweep(&cfg).unwrap();
    let s2 = simulate_sweep(&cfg).unwrap();
    for (x, y) in s1.rows.iter().zip(&s2.rows) {
        assert_eq!(x.mse_scaled.to_bits(), y.mse_scaled.to_bits());
        assert_eq!(x.mse_std.to_bits(), y.mse_std.to_bits());
    }

    // Attainability smoke checks (diagonal attainable, damped not).
    let model = named("bitflip_z", &[]);
    let povm = model.povm(&[0.2]).unwrap();
    let deriv = model.derivatives(&[0.2]).unwrap();
    let slds = detbound::sld::sld_outcomes(&povm, deriv.param(0)).unwrap();
    let q = q_operator(&slds, &povm).unwrap();
    assert!(attainability_check(&slds, &povm, &q).unwrap().attainable);
    let model = named("amplitude_damped_pvm", &[("theta", PI / 3.0)]);
    let povm = model.povm(&[0.3]).unwrap();
    let deriv = model.derivatives(&[0.3]).unwrap();
    let slds = detbound::sld::sld_outcomes(&povm, deriv.param(0)).unwrap();
    let q = q_operator(&slds, &povm).unwrap();
    assert!(!attainability_check(&slds, &povm, &q).unwrap().attainable);

    println!("criterion 12: pass — property suites (SLD agreement, convexity, invariance, determinism)");
}
