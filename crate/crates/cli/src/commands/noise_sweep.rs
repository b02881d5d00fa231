// SPDX-License-Identifier: Apache-2.0

use ecs_core::entanglement::concurrence_wootters;
use ecs_core::noise::{
    apply_noise, concurrence_noisy_closed, noisy_reduced_kernel, noisy_two_mode_density,
    noisy_two_mode_density_general, NoiseParam,
};
use ecs_core::phase_space::{find_kernel_peaks, format_float, peak_separation};
use serde::Serialize;

use crate::args::NoiseSweepArgs;
use crate::error::{CliError, CliResult};
use crate::output::{emit_json, emit_text};

#[derive(Debug, Clone, Copy, Serialize)]
struct Row {
    eta: f64,
    /// Only for unit weight.
    concurrence_closed: Option<f64>,
    concurrence_wootters: f64,
    peak_separation: f64,
    peak_count: usize,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    alpha: f64,
    beta: f64,
    mu: f64,
    rows: Vec<Row>,
    concurrence_non_decreasing: bool,
    separation_non_decreasing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_closed_wootters_deviation: Option<f64>,
}

/// `[0, 1]` in steps of `step`, always ending at 1.
fn eta_values(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round();
    if n >= 1.0 && (n * step - 1.0).abs() < 1e-9 {
        let n = n as usize;
        return (0..=n).map(|k| k as f64 / n as f64).collect();
    }
    let mut v: Vec<f64> = (0..).map(|k| k as f64 * step).take_while(|&e| e < 1.0).collect();
    v.push(1.0);
    v
}

fn row(args: &NoiseSweepArgs, eta: f64) -> CliResult<Row> {
    let eta = NoiseParam::new(eta)?;
    let state = apply_noise(args.alpha, args.beta, args.mu, eta)?;
    let unit = args.mu == 1.0;
    let rho = if unit {
        noisy_two_mode_density(args.alpha, args.beta, eta)?
    } else {
        noisy_two_mode_density_general(&state)?
    };
    let peaks = find_kernel_peaks(&noisy_reduced_kernel(&state)?, 0.0)?;
    Ok(Row {
        eta: eta.value(),
        concurrence_closed: if unit {
            Some(concurrence_noisy_closed(state.p, eta)?)
        } else {
            None
        },
        concurrence_wootters: concurrence_wootters(&rho)?,
        peak_separation: peak_separation(&peaks)?,
        peak_count: peaks.len(),
    })
}

pub fn run(args: &NoiseSweepArgs) -> CliResult<()> {
    if args.alpha == args.beta {
        return Err(CliError::Usage("noise-sweep needs two distinct amplitudes".into()));
    }
    let etas = match args.eta {
        Some(e) => vec![e],
        None => eta_values(args.eta_step),
    };
    let rows = etas.iter().map(|&e| row(args, e)).collect::<CliResult<Vec<_>>>()?;

    emit_text(args.out.as_deref(), |w| {
        writeln!(
            w,
            "eta,concurrence_closed,concurrence_wootters,peak_separation,peak_count"
        )?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                format_float(r.eta),
                r.concurrence_closed.map(format_float).unwrap_or_default(),
                format_float(r.concurrence_wootters),
                format_float(r.peak_separation),
                r.peak_count
            )?;
        }
        Ok(())
    })?;

    let monotone = |f: &dyn Fn(&Row) -> f64, slack: f64| rows.windows(2).all(|w| f(&w[1]) >= f(&w[0]) - slack);
    let concurrence_non_decreasing = if args.mu == 1.0 {
        monotone(&|r| r.concurrence_closed.unwrap_or(0.0), 0.0)
    } else {
        monotone(&|r| r.concurrence_wootters, 1e-12)
    };
    let summary = SweepSummary {
        alpha: args.alpha,
        beta: args.beta,
        mu: args.mu,
        concurrence_non_decreasing,
        separation_non_decreasing: monotone(&|r| r.peak_separation, 0.0),
        max_closed_wootters_deviation: (args.mu == 1.0).then(|| {
            rows.iter()
                .map(|r| (r.concurrence_closed.unwrap_or(0.0) - r.concurrence_wootters).abs())
                .fold(0.0, f64::max)
        }),
        rows,
    };
    if args.json.is_some() || args.out.is_some() {
        emit_json("noise-sweep", &summary, args.json.as_deref())?;
    }
    Ok(())
}
