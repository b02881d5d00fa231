// SPDX-License-Identifier: Apache-2.0

//! Two-mode entangled coherent states (ECS) of qubit and qutrit type.
//!
//! The crate builds the states from coherent-state algebra, evaluates the
//! one-mode Wigner function of the reduced state, computes concurrence in
//! both closed form and through an explicit orthonormal recast, and models
//! photon loss. Every closed-form result has an independent check in the
//! truncated Fock-space [`fock`] module.

pub mod coherent;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod noise;
pub mod phase_space;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub(crate) fn ensure_finite(z: C64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_finite_real(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}
