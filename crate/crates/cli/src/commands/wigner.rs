// SPDX-License-Identifier: Apache-2.0

use ecs_core::phase_space::{
    find_kernel_peaks, integrate_grid, peak_separation, reduce_to_kernel, wigner_grid, wigner_grid_fn, CoherentKernel,
    GridSpec, Peak,
};
use ecs_core::Error;
use serde::Serialize;

use crate::args::{GridArgs, WignerArgs};
use crate::error::{CliError, CliResult};
use crate::oracle::{compare_wigner, lattice, WignerOracleReport};
use crate::output::{emit_json, emit_text};
use crate::state::StateSpec;

#[derive(Debug, Serialize)]
pub struct PeakReport {
    pub y: f64,
    pub count: usize,
    pub separation: f64,
    pub peaks: Vec<Peak>,
}

impl PeakReport {
    pub fn of(kernel: &CoherentKernel, y: f64) -> CliResult<Self> {
        let set = find_kernel_peaks(kernel, y)?;
        Ok(Self {
            y,
            count: set.len(),
            separation: peak_separation(&set)?,
            peaks: set.peaks().to_vec(),
        })
    }
}

#[derive(Debug, Serialize)]
struct GridSummary {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    step: f64,
    nx: usize,
    ny: usize,
}

#[derive(Debug, Serialize)]
struct WignerSummary {
    state: StateSpec,
    evaluation: &'static str,
    grid: GridSummary,
    /// Absent when the grid leaves less than the required margin around the state.
    integral: Option<f64>,
    min_value: f64,
    max_value: f64,
    peaks: PeakReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<WignerOracleReport>,
}

/// Covering grid for the kernel, with any explicit bounds or step taking precedence.
pub fn grid_spec(kernel: &CoherentKernel, args: &GridArgs) -> GridSpec {
    let base = GridSpec::covering(kernel.support());
    GridSpec::new(
        args.xmin.unwrap_or(base.x_min),
        args.xmax.unwrap_or(base.x_max),
        args.ymin.unwrap_or(base.y_min),
        args.ymax.unwrap_or(base.y_max),
        args.step.unwrap_or(base.step),
    )
}

pub fn run(args: &WignerArgs) -> CliResult<()> {
    let spec = StateSpec::from_args(&args.state);
    let state = spec.build()?;
    let kernel = reduce_to_kernel(&state)?;
    let gspec = grid_spec(&kernel, &args.grid);
    let closed = spec.closed_form();

    let grid = if args.closed_form {
        let f = closed.as_ref().ok_or_else(|| {
            CliError::Usage(
                "--closed-form needs real amplitudes and weights and the reference qutrit-qed weights".into(),
            )
        })?;
        wigner_grid_fn(&gspec, Some(kernel.support()), f)?
    } else {
        wigner_grid(&kernel, &gspec)?
    };
    emit_text(args.out.as_deref(), |w| grid.write_csv(w))?;

    let integral = match integrate_grid(&grid) {
        Ok(v) => Some(v),
        Err(Error::MarginViolation { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let (x_last, y_last) = (grid.x(grid.nx - 1), grid.y(grid.ny - 1));
    let oracle = if args.oracle.oracle {
        let points = lattice((gspec.x_min, x_last), (gspec.y_min, y_last));
        Some(compare_wigner(
            &state,
            &kernel,
            closed.as_ref(),
            &points,
            args.oracle.ncut,
        )?)
    } else {
        None
    };
    let summary = WignerSummary {
        evaluation: if args.closed_form { "closed-form" } else { "kernel" },
        grid: GridSummary {
            x_min: gspec.x_min,
            x_max: x_last,
            y_min: gspec.y_min,
            y_max: y_last,
            step: gspec.step,
            nx: grid.nx,
            ny: grid.ny,
        },
        integral,
        min_value: grid.min_value(),
        max_value: grid.max_value(),
        peaks: PeakReport::of(&kernel, args.y)?,
        oracle,
        state: spec,
    };
    if args.json.is_some() || args.out.is_some() {
        emit_json("wigner", &summary, args.json.as_deref())?;
    }
    Ok(())
}
