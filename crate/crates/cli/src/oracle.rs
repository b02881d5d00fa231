// SPDX-License-Identifier: Apache-2.0

use ecs_core::coherent::TwoModeEcs;
use ecs_core::fock::{
    adequate_cutoff, oracle_amplitude_bound, reduced_density_mode1, two_mode_from_terms, DisplacedParity,
};
use ecs_core::phase_space::CoherentKernel;
use ecs_core::C64;
use serde::Serialize;

use crate::error::CliResult;
use crate::state::ClosedForm;

/// Points per axis of the oracle comparison lattice.
pub const ORACLE_SIDE: usize = 21;

#[derive(Debug, Clone, Serialize)]
pub struct WignerOracleReport {
    pub n_cut: usize,
    pub points: usize,
    pub max_deviation_kernel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation_closed_form: Option<f64>,
}

impl WignerOracleReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation_kernel
            .max(self.max_deviation_closed_form.unwrap_or(0.0))
    }
}

/// `ORACLE_SIDE^2` points spanning the box, x fastest.
pub fn lattice(x: (f64, f64), y: (f64, f64)) -> Vec<C64> {
    let last = (ORACLE_SIDE - 1) as f64;
    (0..ORACLE_SIDE)
        .flat_map(|i| (0..ORACLE_SIDE).map(move |j| (i, j)))
        .map(|(i, j)| C64::new(x.0 + (x.1 - x.0) * j as f64 / last, y.0 + (y.1 - y.0) * i as f64 / last))
        .collect()
}

/// Cutoff adequate for the state's amplitudes and for displacing to `points`.
pub fn adequate_for(state: &TwoModeEcs, points: &[C64]) -> usize {
    adequate_cutoff(oracle_amplitude_bound(&state.mode1_amplitudes(), points).max(state.max_amplitude()))
}

/// Kernel (and closed form) against displaced-parity values of the embedded state.
pub fn compare_wigner(
    state: &TwoModeEcs,
    kernel: &CoherentKernel,
    closed: Option<&ClosedForm>,
    points: &[C64],
    n_cut: Option<usize>,
) -> CliResult<WignerOracleReport> {
    let n = n_cut.unwrap_or_else(|| adequate_for(state, points));
    let rho = reduced_density_mode1(&two_mode_from_terms(state, n)?.vector);
    let reference = DisplacedParity::new(n)?.wigner_many(&rho, points)?;
    let max_dev = |f: &dyn Fn(C64) -> f64| {
        points
            .iter()
            .zip(&reference)
            .map(|(&g, w)| (f(g) - w).abs())
            .fold(0.0, f64::max)
    };
    Ok(WignerOracleReport {
        n_cut: n,
        points: points.len(),
        max_deviation_kernel: max_dev(&|g| kernel.wigner(g)),
        max_deviation_closed_form: closed.map(|f| max_dev(f.as_ref())),
    })
}
