// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ecs_core::coherent::{
    apply_beamsplitter, apply_displacement, apply_phase_shifter, build_qubit_ecs, build_qutrit_ecs,
    generate_superposition, qed_reference_state, run_cavity_protocol, ProtocolConfig, TwoModeEcs,
};
use ecs_core::entanglement::{
    concurrence_closed_qubit, concurrence_closed_qutrit, concurrence_pure_2x2, concurrence_vector_norm,
    concurrence_wootters, recast_qubit, recast_qutrit, SeparationParams,
};
use ecs_core::fock::{
    adequate_cutoff, beamsplitter_matrix, coherent_fock, displacement_matrix, exp_i_hermitian, oracle_amplitude_bound,
    parity_matrix, reduced_density_mode1, two_mode_from_terms, DisplacedParity, FockVector, TwoModeFockVector,
};
use ecs_core::noise::{
    apply_noise, concurrence_noisy_closed, noisy_reduced_kernel, noisy_two_mode_density, NoiseParam,
};
use ecs_core::phase_space::{
    find_kernel_peaks, integrate_grid, peak_separation, reduce_to_kernel, wigner_closed_qed, wigner_closed_qubit,
    wigner_closed_qutrit, wigner_grid, GridSpec,
};
use ecs_core::{Result, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

/// Qubit closed-form concurrence against the recast pipeline.
fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let grid: Vec<f64> = (0..=8).map(|k| 0.5 * k as f64).collect();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for &a in &grid {
        for &b in &grid {
            if a == b {
                continue;
            }
            let state = build_qubit_ecs(r(a), r(b), r(1.0))?;
            let pipeline = concurrence_pure_2x2(&recast_qubit(&state)?)?;
            worst = worst.max((pipeline - concurrence_closed_qubit((a - b).abs())?).abs());
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        worst < 1e-10 && within(elapsed, Duration::from_secs(1)),
        format!("{pairs} pairs, max deviation {worst:.2e}, {elapsed:.2?}"),
    ))
}

/// Qutrit maximum and pipeline equivalence on random triples.
fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let c_max = concurrence_closed_qutrit(SeparationParams::new(10.0, 10.0, 10.0)?);
    let mut rng = StdRng::seed_from_u64(20241016);
    let mut worst: f64 = 0.0;
    let mut triples = 0;
    while triples < 20 {
        let (a, b, g): (f64, f64, f64) = (
            rng.random_range(0.0..8.0),
            rng.random_range(0.0..8.0),
            rng.random_range(0.0..8.0),
        );
        // distinct: pairwise separation at least 0.3
        if (a - b).abs() < 0.3 || (a - g).abs() < 0.3 || (b - g).abs() < 0.3 {
            continue;
        }
        let state = build_qutrit_ecs(r(a), r(b), r(g), r(1.0), r(1.0))?;
        let pipeline = concurrence_vector_norm(&recast_qutrit(&state)?)?;
        let closed = concurrence_closed_qutrit(SeparationParams::from_amplitudes(a, b, g)?);
        worst = worst.max((pipeline - closed).abs());
        triples += 1;
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        (c_max - 1.154).abs() <= 1e-3 && worst < 1e-10 && within(elapsed, Duration::from_secs(5)),
        format!("C_max {c_max:.7}, {triples} triples max deviation {worst:.2e}, {elapsed:.2?}"),
    ))
}

/// Max |closed form - displaced-parity oracle| on a 21x21 grid around the state.
fn oracle_deviation<F>(state: &TwoModeEcs, closed: F) -> Result<(f64, usize)>
where
    F: Fn(C64) -> f64,
{
    let amps: Vec<C64> = state.mode1_amplitudes();
    let x_lo = amps.iter().map(|a| a.re).fold(f64::INFINITY, f64::min) - 2.0;
    let x_hi = amps.iter().map(|a| a.re).fold(f64::NEG_INFINITY, f64::max) + 2.0;
    let points: Vec<C64> = (0..21)
        .flat_map(|i| (0..21).map(move |j| (i, j)))
        .map(|(i, j)| C64::new(x_lo + (x_hi - x_lo) * j as f64 / 20.0, -2.0 + 4.0 * i as f64 / 20.0))
        .collect();
    let n = adequate_cutoff(oracle_amplitude_bound(&amps, &points).max(state.max_amplitude()));
    let rho = reduced_density_mode1(&two_mode_from_terms(state, n)?.vector);
    let oracle = DisplacedParity::new(n)?.wigner_many(&rho, &points)?;
    let deviations: Vec<f64> = points.iter().zip(oracle).map(|(&g, w)| (closed(g) - w).abs()).collect();
    Ok((deviations.into_iter().fold(0.0, f64::max), n))
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let qubit = build_qubit_ecs(r(2.0), r(4.0), r(1.0))?;
    let (d1, n1) = oracle_deviation(&qubit, |g| wigner_closed_qubit(g, 2.0, 4.0, 1.0))?;
    let qutrit = build_qutrit_ecs(r(0.0), r(3.0), r(8.0), r(1.0), r(1.0))?;
    let (d2, n2) = oracle_deviation(&qutrit, |g| wigner_closed_qutrit(g, 0.0, 3.0, 8.0, 1.0, 1.0))?;
    let qed = qed_reference_state(r(2.0), r(7.0))?;
    let (d3, n3) = oracle_deviation(&qed, |g| wigner_closed_qed(g, 2.0, 7.0))?;
    let elapsed = start.elapsed();
    Ok(outcome(
        d1.max(d2).max(d3) < 1e-8 && within(elapsed, Duration::from_secs(120)),
        format!(
            "qubit {d1:.2e} (n_cut {n1}), qutrit {d2:.2e} (n_cut {n2}), cavity qutrit {d3:.2e} (n_cut {n3}), {elapsed:.2?}"
        ),
    ))
}

fn qubit_peaks(beta: f64) -> Result<(usize, f64)> {
    let kernel = reduce_to_kernel(&build_qubit_ecs(r(2.0), r(beta), r(1.0))?)?;
    let peaks = find_kernel_peaks(&kernel, 0.0)?;
    Ok((peaks.len(), peak_separation(&peaks)?))
}

fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let (count_2, _) = qubit_peaks(2.0)?;
    let (count_45, _) = qubit_peaks(4.5)?;
    let mut separations = Vec::new();
    for k in 0..=8 {
        separations.push(qubit_peaks(2.0 + 0.5 * k as f64)?.1);
    }
    let monotone = separations.windows(2).all(|w| w[1] >= w[0]);
    let elapsed = start.elapsed();
    let listed: Vec<String> = separations.iter().map(|s| format!("{s:.3}")).collect();
    Ok(outcome(
        count_2 == 1 && count_45 == 2 && monotone && within(elapsed, Duration::from_secs(10)),
        format!(
            "peaks(beta=2) {count_2}, peaks(beta=4.5) {count_45}, separations [{}], {elapsed:.2?}",
            listed.join(", ")
        ),
    ))
}

fn criterion_5() -> Result<Outcome> {
    let out = run_cavity_protocol(&ProtocolConfig::optimal_qutrit(r(1.0))?)?;
    let field = apply_phase_shifter(&out.field, FRAC_PI_2)?;
    let coeff_at = |x: f64| {
        field
            .terms()
            .iter()
            .find(|t| (t.amp - r(x)).norm() < 1e-9)
            .map(|t| t.coeff)
    };
    let (Some(top), Some(mid), Some(low)) = (coeff_at(2.0), coeff_at(0.0), coeff_at(-2.0)) else {
        return Ok(outcome(false, format!("unexpected amplitudes {:?}", field.terms())));
    };
    let mid_ratio = mid / top;
    let low_ratio = low / top;
    let pass = (mid_ratio - r(1.350)).norm() <= 1e-3 && (low_ratio - r(1.0)).norm() <= 2e-4;
    Ok(outcome(
        pass,
        format!(
            "weights (1, {:.7}, {:.7}) on amplitudes (2a, 0, -2a), success probability {:.4}",
            mid_ratio.re, low_ratio.re, out.success_probability
        ),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut worst_noiseless: f64 = 0.0;
    let mut zero_exact = true;
    for a in 1..=4 {
        for b in 1..=4 {
            if a == b {
                continue;
            }
            let (a, b) = (a as f64, b as f64);
            let p = (-(a - b) * (a - b) / 2.0f64).exp();
            for k in 1..=9 {
                let eta = NoiseParam::new(k as f64 / 10.0)?;
                let w = concurrence_wootters(&noisy_two_mode_density(a, b, eta)?)?;
                worst = worst.max((w - concurrence_noisy_closed(p, eta)?).abs());
            }
            let one = NoiseParam::new(1.0)?;
            let noiseless = concurrence_closed_qubit((a - b).abs())?;
            let w1 = concurrence_wootters(&noisy_two_mode_density(a, b, one)?)?;
            worst_noiseless = worst_noiseless
                .max((w1 - noiseless).abs())
                .max((concurrence_noisy_closed(p, one)? - noiseless).abs());
            let zero = NoiseParam::new(0.0)?;
            zero_exact &= concurrence_noisy_closed(p, zero)? == 0.0;
            zero_exact &= concurrence_wootters(&noisy_two_mode_density(a, b, zero)?)? == 0.0;
        }
    }
    Ok(outcome(
        worst < 1e-6 && worst_noiseless < 1e-9 && zero_exact,
        format!(
            "max |Wootters - closed| {worst:.2e}, eta=1 deviation {worst_noiseless:.2e}, eta=0 exactly zero: {zero_exact}"
        ),
    ))
}

fn criterion_7() -> Result<Outcome> {
    let (a, b) = (4.0, 6.0);
    let p = (-(a - b) * (a - b) / 2.0f64).exp();
    let mut rows = Vec::new();
    for k in 0..=4 {
        let eta = NoiseParam::new(0.25 * k as f64)?;
        let closed = concurrence_noisy_closed(p, eta)?;
        let wootters = concurrence_wootters(&noisy_two_mode_density(a, b, eta)?)?;
        let kernel = noisy_reduced_kernel(&apply_noise(a, b, 1.0, eta)?)?;
        let separation = peak_separation(&find_kernel_peaks(&kernel, 0.0)?)?;
        rows.push((eta.value(), closed, wootters, separation));
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 && w[1].2 >= w[0].2 - 1e-12 && w[1].3 >= w[0].3);
    let listed: Vec<String> = rows
        .iter()
        .map(|(e, c, _, s)| format!("eta {e}: C {c:.4} sep {s:.3}"))
        .collect();
    Ok(outcome(monotone && rows[0].3 == 0.0, listed.join("; ")))
}

fn criterion_8() -> Result<Outcome> {
    let mut states = vec![
        ("qubit (2,4)".to_string(), build_qubit_ecs(r(2.0), r(4.0), r(1.0))?),
        (
            "qutrit (0,3,8)".to_string(),
            build_qutrit_ecs(r(0.0), r(3.0), r(8.0), r(1.0), r(1.0))?,
        ),
        ("cavity qutrit (2,7)".to_string(), qed_reference_state(r(2.0), r(7.0))?),
    ];
    for k in 0..=8 {
        let b = 2.0 + 0.5 * k as f64;
        states.push((format!("qubit (2,{b})"), build_qubit_ecs(r(2.0), r(b), r(1.0))?));
    }
    let mut worst_integral: f64 = 0.0;
    let mut min_value = f64::INFINITY;
    for (_, state) in &states {
        let kernel = reduce_to_kernel(state)?;
        let grid = wigner_grid(&kernel, &GridSpec::covering(kernel.support()))?;
        worst_integral = worst_integral.max((integrate_grid(&grid)? - 1.0).abs());
        min_value = min_value.min(grid.min_value());
    }
    Ok(outcome(
        worst_integral <= 1e-5 && min_value >= -1e-9,
        format!(
            "{} states, max |integral - 1| {worst_integral:.2e}, min value {min_value:.2e}",
            states.len()
        ),
    ))
}

/// Generation by displaced parity, displacement and beam splitter, compared with
/// the same sequence of unitaries applied in the number basis.
fn criterion_9() -> Result<Outcome> {
    let (lambda, alpha, beta) = (FRAC_PI_4, r(2.0), r(4.0));
    let shift = C64::new(-1.0, 0.5);

    let prepared = generate_superposition(lambda, alpha, beta)?;
    let shifted = apply_displacement(&prepared, shift)?;
    let split = apply_beamsplitter(&TwoModeEcs::with_vacuum(&shifted), FRAC_PI_4)?;

    let n = adequate_cutoff(6.0);
    let rotation = displacement_matrix(beta - alpha, n)?.compose(&parity_matrix(n)?);
    let hermitian =
        ecs_core::fock::FockOperator::new((rotation.entries() + rotation.entries().adjoint()) * C64::new(0.5, 0.0));
    let u = exp_i_hermitian(&hermitian, lambda)?;
    let mut mode = u.apply(&FockVector::basis(0, n));
    mode = displacement_matrix(alpha, n)?.apply(&mode);
    mode = displacement_matrix(shift, n)?.apply(&mode);
    let two = TwoModeFockVector::product(&mode, &coherent_fock(r(0.0), n)?);
    let oracle = beamsplitter_matrix(FRAC_PI_4, n)?.apply(&two)?;

    let embedded = two_mode_from_terms(&split, n)?.vector;
    let fidelity = embedded.fidelity(&oracle) / oracle.norm_sqr();
    Ok(outcome(
        fidelity >= 1.0 - 1e-8,
        format!("fidelity {fidelity:.12} (1 - F = {:.2e}, n_cut {n})", 1.0 - fidelity),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("qubit concurrence closed form vs recast pipeline", criterion_1),
        ("qutrit concurrence maximum and pipeline equivalence", criterion_2),
        ("Wigner closed forms vs displaced-parity oracle", criterion_3),
        ("qubit Wigner peak count and separation", criterion_4),
        ("cavity protocol weights", criterion_5),
        ("noisy Wootters vs closed-form concurrence", criterion_6),
        ("concurrence and peak separation under loss", criterion_7),
        ("Wigner normalisation and non-negativity", criterion_8),
        ("generation pipeline vs number-basis unitaries", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name}: {}", k + 1, result.detail);
        if !result.pass {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
