// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use ecs_core::coherent::TwoModeEcs;
use ecs_core::entanglement::{
    concurrence_closed_qubit, concurrence_closed_qutrit, concurrence_pure_2x2, concurrence_vector_norm,
    concurrence_wootters, pure_two_qubit_density, recast, recast_qubit, SeparationParams,
};
use ecs_core::fock::{adequate_cutoff, reduced_density_mode1, two_mode_from_terms};
use ecs_core::{Error, C64};
use serde::Serialize;

use crate::args::ConcurrenceArgs;
use crate::error::{CliError, CliResult};
use crate::output::emit_json;
use crate::state::StateSpec;

#[derive(Debug, Default, Serialize)]
struct ConcurrenceReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deltas: Option<[f64; 3]>,
    closed_form: Option<f64>,
    recast_pipeline: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wootters: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_n_cut: Option<usize>,
    /// Absolute differences between every pair of available values.
    deviations: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl ConcurrenceReport {
    fn fill_deviations(&mut self) {
        let named = [
            ("closed_form", self.closed_form),
            ("recast_pipeline", self.recast_pipeline),
            ("wootters", self.wootters),
            ("oracle", self.oracle),
        ];
        let present: Vec<(&str, f64)> = named.iter().filter_map(|(n, v)| v.map(|v| (*n, v))).collect();
        for (i, (na, a)) in present.iter().enumerate() {
            for (nb, b) in &present[i + 1..] {
                self.deviations.insert(format!("{na}/{nb}"), (a - b).abs());
            }
        }
    }
}

fn real_parts(values: &[C64]) -> Option<Vec<f64>> {
    values.iter().map(|z| (z.im == 0.0).then_some(z.re)).collect()
}

/// Closed forms cover real amplitudes with unit weights.
fn closed_form(spec: &StateSpec) -> CliResult<Option<f64>> {
    let (Some(a), Some(w)) = (real_parts(&spec.amplitudes), real_parts(&spec.weights)) else {
        return Ok(None);
    };
    if w.iter().any(|&x| x != 1.0) {
        return Ok(None);
    }
    Ok(match spec.kind {
        "qubit" => Some(concurrence_closed_qubit((a[0] - a[1]).abs())?),
        "qutrit" => Some(concurrence_closed_qutrit(SeparationParams::from_amplitudes(
            a[0], a[1], a[2],
        )?)),
        _ => None,
    })
}

/// `sqrt(2 (1 - Tr rho_1^2))` of the embedded pure state.
fn oracle_concurrence(state: &TwoModeEcs, n_cut: Option<usize>) -> CliResult<(f64, usize)> {
    let n = n_cut.unwrap_or_else(|| adequate_cutoff(state.max_amplitude()));
    let rho = reduced_density_mode1(&two_mode_from_terms(state, n)?.vector);
    Ok(((2.0 * (1.0 - rho.purity())).max(0.0).sqrt(), n))
}

pub fn run(args: &ConcurrenceArgs) -> CliResult<()> {
    let mut report = ConcurrenceReport::default();
    if let Some(d) = &args.deltas {
        if d.len() != 3 {
            return Err(CliError::Usage(format!("--deltas takes three values, got {}", d.len())));
        }
        let sep = SeparationParams::new(d[0], d[1], d[2])?;
        report.deltas = Some([d[0], d[1], d[2]]);
        report.closed_form = Some(concurrence_closed_qutrit(sep));
        if !sep.satisfies_triangle(1e-12) {
            report
                .notes
                .push("separations violate the triangle inequality; no amplitudes realise them".into());
        }
        return emit_json("concurrence", &report, args.json.as_deref());
    }

    let spec = StateSpec::from_args(&args.state);
    let state = spec.build()?;
    report.closed_form = closed_form(&spec)?;
    let amplitudes = if state.is_product() {
        None
    } else {
        match recast(&state) {
            Ok(m) => Some(m),
            Err(Error::LinearlyDependent { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    };
    match amplitudes {
        None => {
            report.recast_pipeline = Some(0.0);
            report
                .notes
                .push("amplitudes coincide or are numerically dependent; reported as separable".into());
        }
        Some(m) if m.dims() == (2, 2) => {
            let m = recast_qubit(&state)?;
            report.recast_pipeline = Some(concurrence_pure_2x2(&m)?);
            report.wootters = Some(concurrence_wootters(&pure_two_qubit_density(&m)?)?);
        }
        Some(m) => report.recast_pipeline = Some(concurrence_vector_norm(&m)?),
    }
    if args.oracle.oracle {
        let (c, n) = oracle_concurrence(&state, args.oracle.ncut)?;
        report.oracle = Some(c);
        report.oracle_n_cut = Some(n);
    } else if args.oracle.ncut.is_some() {
        return Err(CliError::Usage("--ncut only applies together with --oracle".into()));
    }
    report.fill_deviations();
    report.state = Some(spec);
    emit_json("concurrence", &report, args.json.as_deref())
}
