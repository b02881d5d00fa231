// SPDX-License-Identifier: Apache-2.0

pub mod concurrence;
pub mod noise_sweep;
pub mod peaks;
pub mod protocol;
pub mod verify;
pub mod wigner;
