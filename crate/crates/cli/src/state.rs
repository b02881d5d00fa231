// SPDX-License-Identifier: Apache-2.0

use ecs_core::coherent::{build_qubit_ecs, build_qutrit_ecs, build_qutrit_qed, qed_reference_state, TwoModeEcs};
use ecs_core::phase_space::{wigner_closed_qed, wigner_closed_qubit, wigner_closed_qutrit};
use ecs_core::C64;
use serde::Serialize;

use crate::args::{Kind, StateArgs};
use crate::error::CliResult;

/// Closed-form Wigner function of mode 1, available for real parameters.
pub type ClosedForm = Box<dyn Fn(C64) -> f64 + Sync>;

/// Fully resolved state parameters.
#[derive(Debug, Clone, Serialize)]
pub struct StateSpec {
    pub kind: &'static str,
    pub amplitudes: Vec<C64>,
    pub weights: Vec<C64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub protocol_weights: bool,
}

fn real(z: C64) -> Option<f64> {
    (z.im == 0.0).then_some(z.re)
}

impl StateSpec {
    pub fn from_args(args: &StateArgs) -> Self {
        let one = C64::new(1.0, 0.0);
        let or = |z: Option<C64>, d: f64| z.unwrap_or(C64::new(d, 0.0));
        match args.kind {
            Kind::Qubit => Self {
                kind: "qubit",
                amplitudes: vec![or(args.alpha, 2.0), or(args.beta, 4.0)],
                weights: vec![one, args.mu],
                protocol_weights: false,
            },
            Kind::Qutrit => Self {
                kind: "qutrit",
                amplitudes: vec![or(args.alpha, 0.0), or(args.beta, 3.0), or(args.gamma, 8.0)],
                weights: vec![one, args.mu1, args.mu2],
                protocol_weights: false,
            },
            Kind::QutritQed => Self {
                kind: "qutrit-qed",
                amplitudes: vec![or(args.alpha, 2.0), or(args.beta, 7.0)],
                weights: Vec::new(),
                protocol_weights: args.protocol_weights,
            },
        }
    }

    pub fn build(&self) -> CliResult<TwoModeEcs> {
        let a = &self.amplitudes;
        let w = &self.weights;
        Ok(match self.kind {
            "qubit" => build_qubit_ecs(a[0], a[1], w[1])?,
            "qutrit" => build_qutrit_ecs(a[0], a[1], a[2], w[1], w[2])?,
            _ if self.protocol_weights => build_qutrit_qed(a[0], a[1])?,
            _ => qed_reference_state(a[0], a[1])?,
        })
    }

    /// Literal closed form when every parameter is real.
    pub fn closed_form(&self) -> Option<ClosedForm> {
        let a: Option<Vec<f64>> = self.amplitudes.iter().copied().map(real).collect();
        let w: Option<Vec<f64>> = self.weights.iter().copied().map(real).collect();
        let (a, w) = (a?, w?);
        match self.kind {
            "qubit" => Some(Box::new(move |g| wigner_closed_qubit(g, a[0], a[1], w[1]))),
            "qutrit" => Some(Box::new(move |g| wigner_closed_qutrit(g, a[0], a[1], a[2], w[1], w[2]))),
            _ if self.protocol_weights => None,
            _ => Some(Box::new(move |g| wigner_closed_qed(g, a[0], a[1]))),
        }
    }

    /// `(alpha, beta)` of a real, equal-weight qubit state.
    pub fn equal_weight_qubit(&self) -> Option<(f64, f64)> {
        if self.kind != "qubit" || self.weights[1] != C64::new(1.0, 0.0) {
            return None;
        }
        Some((real(self.amplitudes[0])?, real(self.amplitudes[1])?))
    }
}
