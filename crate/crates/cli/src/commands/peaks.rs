// SPDX-License-Identifier: Apache-2.0

use ecs_core::phase_space::{reduce_to_kernel, transcendental_intersections};
use serde::Serialize;

use crate::args::PeaksArgs;
use crate::commands::wigner::PeakReport;
use crate::error::CliResult;
use crate::output::emit_json;
use crate::state::StateSpec;

#[derive(Debug, Serialize)]
struct PeaksSummary {
    state: StateSpec,
    #[serde(flatten)]
    peaks: PeakReport,
    /// Stationary points of the equal-weight qubit profile on the real axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    transcendental_roots: Option<Vec<f64>>,
}

pub fn run(args: &PeaksArgs) -> CliResult<()> {
    let spec = StateSpec::from_args(&args.state);
    let kernel = reduce_to_kernel(&spec.build()?)?;
    let roots = match spec.equal_weight_qubit() {
        Some((a, b)) if a != b && args.y == 0.0 => Some(transcendental_intersections(a, b)?),
        _ => None,
    };
    let summary = PeaksSummary {
        peaks: PeakReport::of(&kernel, args.y)?,
        transcendental_roots: roots,
        state: spec,
    };
    emit_json("peaks", &summary, args.json.as_deref())
}
