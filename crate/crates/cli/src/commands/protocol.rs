// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_2;

use ecs_core::coherent::{
    apply_phase_shifter, ecs_from_protocol_field, run_cavity_protocol, CoherentTerm, ProtocolConfig, ProtocolStep,
    TwoModeTerm,
};
use ecs_core::C64;
use serde::Serialize;

use crate::args::ProtocolArgs;
use crate::error::CliResult;
use crate::output::emit_json;

#[derive(Debug, Serialize)]
struct ProtocolReport {
    epsilons: Vec<C64>,
    alpha: C64,
    beta: C64,
    steps: Vec<ProtocolStep>,
    success_probability: f64,
    field: Vec<CoherentTerm>,
    /// Field after the pi/2 phase shifter, sorted by decreasing real amplitude.
    phase_corrected_field: Vec<CoherentTerm>,
    /// Coefficients of `phase_corrected_field` divided by the first one.
    weight_ratios: Vec<C64>,
    final_ecs: Vec<TwoModeTerm>,
}

pub fn run(args: &ProtocolArgs) -> CliResult<()> {
    let config = match &args.eps {
        Some(eps) => ProtocolConfig::new(eps.clone(), args.alpha)?,
        None => ProtocolConfig::optimal_qutrit(args.alpha)?,
    };
    let outcome = run_cavity_protocol(&config)?;
    let mut corrected = apply_phase_shifter(&outcome.field, FRAC_PI_2)?.terms().to_vec();
    corrected.sort_by(|a, b| b.amp.re.total_cmp(&a.amp.re).then(b.amp.im.total_cmp(&a.amp.im)));
    let first = corrected[0].coeff;
    let report = ProtocolReport {
        epsilons: config.epsilons.clone(),
        alpha: args.alpha,
        beta: args.beta,
        weight_ratios: corrected.iter().map(|t| t.coeff / first).collect(),
        final_ecs: ecs_from_protocol_field(&outcome.field, args.beta)?.terms().to_vec(),
        phase_corrected_field: corrected,
        field: outcome.field.terms().to_vec(),
        success_probability: outcome.success_probability,
        steps: outcome.steps,
    };
    emit_json("protocol", &report, args.json.as_deref())
}
