// SPDX-License-Identifier: Apache-2.0

//! Photon loss on the two-component balanced state
//! `(|a>|a> + mu |b>|b>) / sqrt(M)` with real amplitudes.
//!
//! Each mode passes through `|a>|0>_E -> |sqrt(eta) a>|sqrt(1 - eta) a>_E`,
//! with its own environment mode. Quantities that contain powers of the
//! overlap `p = exp(-(a - b)^2 / 2)` are evaluated from `ln p` so that
//! widely separated amplitudes neither overflow nor lose precision.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::coherent::overlap;
use crate::entanglement::{coherent_coordinates, concurrence_wootters};
use crate::phase_space::{find_kernel_peaks, peak_separation, CoherentKernel, Dyad};
use crate::{ensure_finite_real, Error, Result, C64};

/// Fraction of photons that survive the loss channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct NoiseParam(f64);

impl NoiseParam {
    pub fn new(eta: f64) -> Result<Self> {
        ensure_finite_real(eta, "eta")?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self(eta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The two-component state after loss on both modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyQubitEcs {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub eta: f64,
    /// `<alpha|beta>` of the lossless amplitudes.
    pub p: f64,
}

impl NoisyQubitEcs {
    /// `ln p = -(alpha - beta)^2 / 2`
    pub fn ln_p(&self) -> f64 {
        -0.5 * (self.alpha - self.beta).powi(2)
    }

    /// `(sqrt(eta) alpha, sqrt(eta) beta)`, identical in both system modes.
    pub fn system_amplitudes(&self) -> (f64, f64) {
        let s = self.eta.sqrt();
        (s * self.alpha, s * self.beta)
    }

    /// `(sqrt(1 - eta) alpha, sqrt(1 - eta) beta)`, identical in both environment modes.
    pub fn environment_amplitudes(&self) -> (f64, f64) {
        let s = (1.0 - self.eta).sqrt();
        (s * self.alpha, s * self.beta)
    }

    /// `1 + mu^2 + 2 mu p^2`, unchanged by the channel.
    pub fn normalization(&self) -> f64 {
        1.0 + self.mu * self.mu + 2.0 * self.mu * (2.0 * self.ln_p()).exp()
    }
}

pub fn apply_noise(alpha: f64, beta: f64, mu: f64, eta: NoiseParam) -> Result<NoisyQubitEcs> {
    ensure_finite_real(alpha, "alpha")?;
    ensure_finite_real(beta, "beta")?;
    ensure_finite_real(mu, "mu")?;
    let p = overlap(C64::new(alpha, 0.0), C64::new(beta, 0.0)).re;
    let state = NoisyQubitEcs {
        alpha,
        beta,
        mu,
        eta: eta.value(),
        p,
    };
    let norm = state.normalization();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::DegenerateNorm { norm });
    }
    Ok(state)
}

/// Reduced state of one system mode: the cross dyads carry `mu p^(2 - eta)`,
/// `p^eta` from the other system mode and `p^(1 - eta)` from each environment mode.
pub fn noisy_reduced_kernel(state: &NoisyQubitEcs) -> Result<CoherentKernel> {
    let (a, b) = state.system_amplitudes();
    let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
    let m = state.normalization();
    let cross = C64::new(state.mu * ((2.0 - state.eta) * state.ln_p()).exp() / m, 0.0);
    CoherentKernel::new(vec![
        Dyad {
            weight: C64::new(1.0 / m, 0.0),
            ket: a,
            bra: a,
        },
        Dyad {
            weight: C64::new(state.mu * state.mu / m, 0.0),
            ket: b,
            bra: b,
        },
        Dyad {
            weight: cross,
            ket: a,
            bra: b,
        },
        Dyad {
            weight: cross,
            ket: b,
            bra: a,
        },
    ])
}

/// Literal closed form of the Wigner function after loss.
pub fn wigner_noisy_closed(gamma: C64, state: &NoisyQubitEcs) -> f64 {
    let NoisyQubitEcs {
        alpha, beta, mu, eta, ..
    } = *state;
    let se = eta.sqrt();
    let m = state.normalization();
    let g = gamma;
    let gc = gamma.conj();
    let ga = (-2.0 * (g - se * alpha).norm_sqr()).exp();
    let gb = (-2.0 * (g - se * beta).norm_sqr()).exp();
    let base = (2.0 - eta) * state.ln_p() - 0.5 * eta * (alpha + beta).powi(2) - 2.0 * g.norm_sqr();
    let cross = (base + 2.0 * se * (gc * alpha + beta * g)).exp() + (base + 2.0 * se * (gc * beta + alpha * g)).exp();
    2.0 / (std::f64::consts::PI * m) * (ga + mu * mu * gb + mu * cross.re)
}

fn check_pair(alpha: f64, beta: f64) -> Result<()> {
    ensure_finite_real(alpha, "alpha")?;
    ensure_finite_real(beta, "beta")?;
    if alpha == beta {
        return Err(Error::LinearlyDependent {
            which: "alpha, beta".into(),
        });
    }
    Ok(())
}

/// Two-qubit density matrix of the equal-weight state after loss, in the
/// basis built from the surviving amplitudes, as explicit entries.
pub fn noisy_two_mode_density(alpha: f64, beta: f64, eta: NoiseParam) -> Result<Matrix4<C64>> {
    check_pair(alpha, beta)?;
    let eta = eta.value();
    let lp = -0.5 * (alpha - beta).powi(2);
    let pow = |k: f64| (k * lp).exp();
    let p2 = pow(2.0);
    // 1 - p^{2 eta}
    let loss = -(2.0 * eta * lp).exp_m1();
    let a11 = 1.0 + 2.0 * p2 + pow(4.0 * eta);
    let a12 = loss.sqrt() * (pow(2.0 - eta) + pow(3.0 * eta));
    let a14 = loss * (pow(2.0 * eta) + pow(2.0 - 2.0 * eta));
    let a22 = pow(2.0 * eta) * loss;
    let a24 = pow(eta) * loss.powf(1.5);
    let a44 = loss * loss;
    let s = 1.0 / (2.0 + 2.0 * p2);
    #[rustfmt::skip]
    let entries = [
        a11, a12, a12, a14,
        a12, a22, a22, a24,
        a12, a22, a22, a24,
        a14, a24, a24, a44,
    ];
    Ok(Matrix4::from_row_slice(&entries.map(|v| C64::new(v * s, 0.0))))
}

/// Same matrix for any weight, built from the term overlaps: the environment
/// contributes `<e_j|e_i>^2` and each system mode the Gram-Schmidt
/// coordinates of the surviving amplitudes.
pub fn noisy_two_mode_density_general(state: &NoisyQubitEcs) -> Result<Matrix4<C64>> {
    check_pair(state.alpha, state.beta)?;
    let (a, b) = state.system_amplitudes();
    let (ea, eb) = state.environment_amplitudes();
    let coords = coherent_coordinates(&[C64::new(a, 0.0), C64::new(b, 0.0)])?;
    let env = [C64::new(ea, 0.0), C64::new(eb, 0.0)];
    let coeff = [C64::new(1.0, 0.0), C64::new(state.mu, 0.0)];
    let m = state.normalization();
    let vec_of = |i: usize| {
        let c = coords.column(i);
        nalgebra::Vector4::from_fn(|k, _| c[k / 2] * c[k % 2])
    };
    let mut rho = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let e = overlap(env[j], env[i]);
            rho += vec_of(i) * vec_of(j).adjoint() * (coeff[i] * coeff[j] * e * e / m);
        }
    }
    Ok(rho)
}

/// `p^2 (p^(-2 eta) - 1) / (1 + p^2)`, evaluated as `p^(2 - 2 eta) (1 - p^(2 eta)) / (1 + p^2)`.
pub fn concurrence_noisy_closed(p: f64, eta: NoiseParam) -> Result<f64> {
    ensure_finite_real(p, "p")?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "overlap must lie in (0, 1)",
        });
    }
    let eta = eta.value();
    let lp = p.ln();
    let value = ((2.0 - 2.0 * eta) * lp).exp() * -(2.0 * eta * lp).exp_m1() / (1.0 + p * p);
    Ok(value)
}

/// One line of a loss sweep for the equal-weight state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSweepRow {
    pub eta: f64,
    pub concurrence_closed: f64,
    pub concurrence_wootters: f64,
    pub peak_separation: f64,
    pub peak_count: usize,
}

pub fn noise_sweep_row(alpha: f64, beta: f64, eta: NoiseParam) -> Result<NoiseSweepRow> {
    check_pair(alpha, beta)?;
    let state = apply_noise(alpha, beta, 1.0, eta)?;
    let kernel = noisy_reduced_kernel(&state)?;
    let peaks = find_kernel_peaks(&kernel, 0.0)?;
    Ok(NoiseSweepRow {
        eta: eta.value(),
        concurrence_closed: concurrence_noisy_closed(state.p, eta)?,
        concurrence_wootters: concurrence_wootters(&noisy_two_mode_density(alpha, beta, eta)?)?,
        peak_separation: peak_separation(&peaks)?,
        peak_count: peaks.len(),
    })
}
