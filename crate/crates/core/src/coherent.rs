// SPDX-License-Identifier: Apache-2.0

//! Coherent-state algebra at the level of (coefficient, amplitude) terms.
//!
//! States are finite sums of coherent states, so every generation step
//! used here (displacement, phase shifter, beam splitter, dispersive
//! atom-cavity evolution) acts term by term on the amplitudes. Norms are
//! evaluated from pairwise overlaps `<a|b> = exp(-|a|^2/2 - |b|^2/2 + a^* b)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::{ensure_finite, ensure_finite_real, Error, Result, C64};

/// Amplitudes closer than this are treated as the same coherent state.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Coefficients smaller than this fraction of the largest one are dropped.
const NEGLIGIBLE_COEFF: f64 = 1e-14;

/// Classical-field amplitudes that give weights close to (1, 1.35, 1) after
/// two protocol cycles.
pub const OPTIMAL_QUTRIT_EPSILONS: [f64; 3] = [-0.8200, 2.1184, -0.4720];

/// Rounded relative weight of the central component of the qutrit QED state.
pub const QED_CENTRAL_WEIGHT: f64 = 1.35;

const I: C64 = C64::new(0.0, 1.0);

/// `<alpha|beta>` for coherent states.
pub fn overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentTerm {
    pub coeff: C64,
    pub amp: C64,
}

impl CoherentTerm {
    pub fn new(coeff: C64, amp: C64) -> Self {
        Self { coeff, amp }
    }
}

fn drop_negligible<T>(terms: &mut Vec<T>, coeff: impl Fn(&T) -> C64) {
    let max = terms.iter().map(|t| coeff(t).norm()).fold(0.0, f64::max);
    terms.retain(|t| {
        let c = coeff(t).norm();
        c > 0.0 && c > NEGLIGIBLE_COEFF * max
    });
}

/// Merge terms whose amplitudes coincide; returns true when anything merged.
fn merge_one_mode(terms: Vec<CoherentTerm>) -> (Vec<CoherentTerm>, bool) {
    let mut out: Vec<CoherentTerm> = Vec::with_capacity(terms.len());
    let mut merged = false;
    for t in terms {
        match out.iter_mut().find(|o| (o.amp - t.amp).norm() < MERGE_TOLERANCE) {
            Some(o) => {
                o.coeff += t.coeff;
                merged = true;
            }
            None => out.push(t),
        }
    }
    drop_negligible(&mut out, |t| t.coeff);
    (out, merged)
}

fn one_mode_norm_sqr(terms: &[CoherentTerm]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in terms {
        for b in terms {
            acc += a.coeff.conj() * b.coeff * overlap(a.amp, b.amp);
        }
    }
    acc.re
}

/// Linear combination `sum_i c_i |alpha_i>` in a single mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSuperposition {
    terms: Vec<CoherentTerm>,
    normalized: bool,
}

impl ModeSuperposition {
    pub fn new(terms: Vec<CoherentTerm>) -> Result<Self> {
        for t in &terms {
            ensure_finite(t.coeff, "coefficient")?;
            ensure_finite(t.amp, "coherent amplitude")?;
        }
        let (terms, _) = merge_one_mode(terms);
        if terms.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(Self {
            terms,
            normalized: false,
        })
    }

    pub fn coherent(amp: C64) -> Result<Self> {
        let mut s = Self::new(vec![CoherentTerm::new(C64::new(1.0, 0.0), amp)])?;
        s.normalized = true;
        Ok(s)
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        one_mode_norm_sqr(&self.terms)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::DegenerateNorm { norm: n });
        }
        let s = C64::new(1.0 / n.sqrt(), 0.0);
        for t in &mut self.terms {
            t.coeff *= s;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.terms.iter().map(|t| t.amp.norm()).fold(0.0, f64::max)
    }

    fn map_terms(&self, f: impl Fn(CoherentTerm) -> CoherentTerm) -> Self {
        let (terms, _) = merge_one_mode(self.terms.iter().copied().map(f).collect());
        Self {
            terms,
            normalized: self.normalized,
        }
    }
}

/// `cos(lambda)|alpha> + i sin(lambda) exp(i Im(alpha beta^*)) |beta>`, normalised.
///
/// This is the state prepared from the vacuum by a displaced-parity
/// rotation followed by a displacement.
pub fn generate_superposition(lambda: f64, alpha: C64, beta: C64) -> Result<ModeSuperposition> {
    ensure_finite_real(lambda, "lambda")?;
    ensure_finite(alpha, "alpha")?;
    ensure_finite(beta, "beta")?;
    let phase = C64::from_polar(1.0, (alpha * beta.conj()).im);
    ModeSuperposition::new(vec![
        CoherentTerm::new(C64::new(lambda.cos(), 0.0), alpha),
        CoherentTerm::new(I * lambda.sin() * phase, beta),
    ])?
    .normalized()
}

/// `D(beta)`: shifts every amplitude and keeps the exact `exp(i Im(beta a^*))` phase.
pub fn apply_displacement(state: &ModeSuperposition, beta: C64) -> Result<ModeSuperposition> {
    ensure_finite(beta, "displacement")?;
    Ok(state.map_terms(|t| CoherentTerm {
        coeff: t.coeff * C64::from_polar(1.0, (beta * t.amp.conj()).im),
        amp: t.amp + beta,
    }))
}

/// `exp(-i phi a^dag a)`: rotates every amplitude by `exp(-i phi)`.
pub fn apply_phase_shifter(state: &ModeSuperposition, phi: f64) -> Result<ModeSuperposition> {
    ensure_finite_real(phi, "phase")?;
    let rot = C64::from_polar(1.0, -phi);
    Ok(state.map_terms(|t| CoherentTerm {
        coeff: t.coeff,
        amp: t.amp * rot,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeTerm {
    pub coeff: C64,
    pub amp1: C64,
    pub amp2: C64,
}

impl TwoModeTerm {
    pub fn new(coeff: C64, amp1: C64, amp2: C64) -> Self {
        Self { coeff, amp1, amp2 }
    }

    pub fn balanced(coeff: C64, amp: C64) -> Self {
        Self::new(coeff, amp, amp)
    }
}

/// `sum_i c_i |a_i>|b_i>` over two modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoModeEcs {
    terms: Vec<TwoModeTerm>,
    normalized: bool,
    /// Set when coincident amplitude pairs were merged during construction.
    degenerate: bool,
}

impl TwoModeEcs {
    pub fn new(terms: Vec<TwoModeTerm>) -> Result<Self> {
        for t in &terms {
            ensure_finite(t.coeff, "coefficient")?;
            ensure_finite(t.amp1, "mode-1 amplitude")?;
            ensure_finite(t.amp2, "mode-2 amplitude")?;
        }
        let mut out: Vec<TwoModeTerm> = Vec::with_capacity(terms.len());
        let mut degenerate = false;
        for t in terms {
            match out
                .iter_mut()
                .find(|o| (o.amp1 - t.amp1).norm() < MERGE_TOLERANCE && (o.amp2 - t.amp2).norm() < MERGE_TOLERANCE)
            {
                Some(o) => {
                    o.coeff += t.coeff;
                    degenerate = true;
                }
                None => out.push(t),
            }
        }
        drop_negligible(&mut out, |t| t.coeff);
        if out.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(Self {
            terms: out,
            normalized: false,
            degenerate,
        })
    }

    /// `|psi> ⊗ |0>`
    pub fn with_vacuum(state: &ModeSuperposition) -> Self {
        Self {
            terms: state
                .terms()
                .iter()
                .map(|t| TwoModeTerm::new(t.coeff, t.amp, C64::new(0.0, 0.0)))
                .collect(),
            normalized: state.is_normalized(),
            degenerate: false,
        }
    }

    pub fn terms(&self) -> &[TwoModeTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// True when coincident amplitudes were merged, e.g. `alpha == beta`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// A single product term; no entanglement.
    pub fn is_product(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_balanced(&self) -> bool {
        self.terms.iter().all(|t| (t.amp1 - t.amp2).norm() < MERGE_TOLERANCE)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amp1.norm().max(t.amp2.norm()))
            .fold(0.0, f64::max)
    }

    /// Distinct mode-1 amplitudes, in order of first appearance.
    pub fn mode1_amplitudes(&self) -> Vec<C64> {
        distinct(self.terms.iter().map(|t| t.amp1))
    }

    pub fn mode2_amplitudes(&self) -> Vec<C64> {
        distinct(self.terms.iter().map(|t| t.amp2))
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = normalization(&self)?;
        let s = C64::new(1.0 / n.sqrt(), 0.0);
        for t in &mut self.terms {
            t.coeff *= s;
        }
        self.normalized = true;
        Ok(self)
    }
}

fn distinct(amps: impl Iterator<Item = C64>) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for a in amps {
        if !out.iter().any(|o| (o - a).norm() < MERGE_TOLERANCE) {
            out.push(a);
        }
    }
    out
}

/// `sum_ij c_i^* c_j <a_i|a_j><b_i|b_j>`.
pub fn normalization(state: &TwoModeEcs) -> Result<f64> {
    if state.terms.is_empty() {
        return Err(Error::EmptyState);
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for a in &state.terms {
        scale += a.coeff.norm();
        for b in &state.terms {
            acc += a.coeff.conj() * b.coeff * overlap(a.amp1, b.amp1) * overlap(a.amp2, b.amp2);
        }
    }
    let n = acc.re;
    if !n.is_finite() || n <= 1e-14 * scale * scale {
        return Err(Error::DegenerateNorm { norm: n });
    }
    Ok(n)
}

/// Two-mode beam splitter: `(a, b) -> (a cos(theta) - b sin(theta), a sin(theta) + b cos(theta))`.
pub fn apply_beamsplitter(state: &TwoModeEcs, theta: f64) -> Result<TwoModeEcs> {
    ensure_finite_real(theta, "beam-splitter angle")?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut out = TwoModeEcs::new(
        state
            .terms
            .iter()
            .map(|t| TwoModeTerm::new(t.coeff, t.amp1 * c - t.amp2 * s, t.amp1 * s + t.amp2 * c))
            .collect(),
    )?;
    out.normalized = state.normalized;
    out.degenerate |= state.degenerate;
    Ok(out)
}

/// `(|alpha>|alpha> + mu |beta>|beta>) / sqrt(M)`.
pub fn build_qubit_ecs(alpha: C64, beta: C64, mu: C64) -> Result<TwoModeEcs> {
    TwoModeEcs::new(vec![
        TwoModeTerm::balanced(C64::new(1.0, 0.0), alpha),
        TwoModeTerm::balanced(mu, beta),
    ])?
    .normalized()
}

/// `(|alpha>|alpha> + mu1 |beta>|beta> + mu2 |gamma>|gamma>) / sqrt(M')`.
pub fn build_qutrit_ecs(alpha: C64, beta: C64, gamma: C64, mu1: C64, mu2: C64) -> Result<TwoModeEcs> {
    TwoModeEcs::new(vec![
        TwoModeTerm::balanced(C64::new(1.0, 0.0), alpha),
        TwoModeTerm::balanced(mu1, beta),
        TwoModeTerm::balanced(mu2, gamma),
    ])?
    .normalized()
}

/// Classical-field amplitudes and initial cavity amplitude for the
/// atom-cavity protocol. `steps = epsilons.len() - 1` dispersive interactions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub epsilons: Vec<C64>,
    pub alpha: C64,
}

impl ProtocolConfig {
    pub fn new(epsilons: Vec<C64>, alpha: C64) -> Result<Self> {
        if epsilons.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "epsilons",
                value: epsilons.len() as f64,
                reason: "need at least two classical-field pulses",
            });
        }
        for e in &epsilons {
            ensure_finite(*e, "epsilon")?;
        }
        ensure_finite(alpha, "alpha")?;
        Ok(Self { epsilons, alpha })
    }

    pub fn optimal_qutrit(alpha: C64) -> Result<Self> {
        Self::new(
            OPTIMAL_QUTRIT_EPSILONS.iter().map(|&e| C64::new(e, 0.0)).collect(),
            alpha,
        )
    }

    pub fn steps(&self) -> usize {
        self.epsilons.len() - 1
    }
}

/// Joint atom-field state `|g> ⊗ G + |e> ⊗ E`; the branches are unnormalised term lists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomFieldState {
    pub g_branch: Vec<CoherentTerm>,
    pub e_branch: Vec<CoherentTerm>,
}

impl AtomFieldState {
    fn ground(field: Vec<CoherentTerm>) -> Self {
        Self {
            g_branch: field,
            e_branch: Vec::new(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        one_mode_norm_sqr(&self.g_branch) + one_mode_norm_sqr(&self.e_branch)
    }

    /// Resonant classical pulse:
    /// `|g> -> (|g> + eps|e>)/s`, `|e> -> (-eps^*|g> + |e>)/s`, `s = sqrt(1 + |eps|^2)`.
    fn rotate(&self, eps: C64) -> Self {
        let s = 1.0 / (1.0 + eps.norm_sqr()).sqrt();
        let scale = |terms: &[CoherentTerm], c: C64| -> Vec<CoherentTerm> {
            terms
                .iter()
                .map(|t| CoherentTerm::new(t.coeff * c * s, t.amp))
                .collect()
        };
        let mut g = scale(&self.g_branch, C64::new(1.0, 0.0));
        g.extend(scale(&self.e_branch, -eps.conj()));
        let mut e = scale(&self.g_branch, eps);
        e.extend(scale(&self.e_branch, C64::new(1.0, 0.0)));
        Self {
            g_branch: merge_one_mode(g).0,
            e_branch: merge_one_mode(e).0,
        }
    }

    /// Dispersive coupling for a quarter period: `alpha -> i alpha` on `|g>`, `-i alpha` on `|e>`.
    fn disperse(&self) -> Self {
        let rot = |terms: &[CoherentTerm], r: C64| -> Vec<CoherentTerm> {
            terms.iter().map(|t| CoherentTerm::new(t.coeff, t.amp * r)).collect()
        };
        Self {
            g_branch: rot(&self.g_branch, I),
            e_branch: rot(&self.e_branch, -I),
        }
    }

    fn map_field(&self, f: impl Fn(&ModeSuperposition) -> Result<ModeSuperposition>) -> Result<Self> {
        let apply = |terms: &[CoherentTerm]| -> Result<Vec<CoherentTerm>> {
            if terms.is_empty() {
                return Ok(Vec::new());
            }
            Ok(f(&ModeSuperposition::new(terms.to_vec())?)?.terms)
        };
        Ok(Self {
            g_branch: apply(&self.g_branch)?,
            e_branch: apply(&self.e_branch)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolStep {
    pub label: String,
    pub state: AtomFieldState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    pub steps: Vec<ProtocolStep>,
    /// Probability of finding the atom in `|g>` at the end.
    pub success_probability: f64,
    /// Normalised field state conditioned on `|g>`.
    pub field: ModeSuperposition,
}

/// Runs the alternating classical-pulse / dispersive-cavity sequence.
///
/// The atom starts in `|g>`, the cavity in `|alpha>`. The sequence is
/// `R(eps_0) Disp`, then for each further cycle
/// `R(eps_k) P(pi/2) D(alpha) Disp`, and finally `R(eps_N)` followed by a
/// projection onto `|g>`. The phase shifter and re-displacement between
/// cycles move the two branch amplitudes `±alpha` to `2 alpha` and `0`, so
/// the next dispersive interaction spreads them onto a line of coherent
/// amplitudes. For `N = 1` the output is `|i alpha> - eps_0 eps_1^* |-i alpha>`.
pub fn run_cavity_protocol(config: &ProtocolConfig) -> Result<ProtocolOutcome> {
    let alpha = config.alpha;
    let eps = &config.epsilons;
    let mut steps = Vec::new();
    let mut state = AtomFieldState::ground(vec![CoherentTerm::new(C64::new(1.0, 0.0), alpha)]);
    let mut record = |label: String, s: &AtomFieldState| {
        steps.push(ProtocolStep {
            label,
            state: s.clone(),
        })
    };
    record("initial".into(), &state);

    state = state.rotate(eps[0]);
    record("rotate eps_0".into(), &state);
    state = state.disperse();
    record("disperse".into(), &state);

    for (k, &e) in eps.iter().enumerate().take(config.steps()).skip(1) {
        state = state.rotate(e);
        record(format!("rotate eps_{k}"), &state);
        state = state.map_field(|f| apply_phase_shifter(f, FRAC_PI_2))?;
        record("phase shift".into(), &state);
        state = state.map_field(|f| apply_displacement(f, alpha))?;
        record("displace".into(), &state);
        state = state.disperse();
        record("disperse".into(), &state);
    }

    let n = config.steps();
    state = state.rotate(eps[n]);
    record(format!("rotate eps_{n}"), &state);

    let projected = AtomFieldState::ground(state.g_branch.clone());
    record("measure g".into(), &projected);

    let success_probability = one_mode_norm_sqr(&projected.g_branch);
    if projected.g_branch.is_empty() || success_probability.is_nan() || success_probability <= 1e-300 {
        return Err(Error::ZeroProbability);
    }
    let field = ModeSuperposition::new(projected.g_branch)?.normalized()?;
    Ok(ProtocolOutcome {
        steps,
        success_probability,
        field,
    })
}

/// Qutrit-like ECS from the cavity protocol: two cycles with the optimal
/// pulses, phase shifter, displacement by `beta`, then a 50-50 beam splitter
/// against vacuum.
pub fn build_qutrit_qed(alpha: C64, beta: C64) -> Result<TwoModeEcs> {
    let outcome = run_cavity_protocol(&ProtocolConfig::optimal_qutrit(alpha)?)?;
    ecs_from_protocol_field(&outcome.field, beta)
}

/// Phase shifter by pi/2, displacement by `beta`, then a 50-50 beam splitter
/// against vacuum, applied to a protocol output field.
pub fn ecs_from_protocol_field(field: &ModeSuperposition, beta: C64) -> Result<TwoModeEcs> {
    ensure_finite(beta, "beta")?;
    let corrected = apply_phase_shifter(field, FRAC_PI_2)?;
    let shifted = apply_displacement(&corrected, beta)?;
    apply_beamsplitter(&TwoModeEcs::with_vacuum(&shifted), FRAC_PI_4)?.normalized()
}

/// The qutrit QED state with the rounded weights `(1, 1.35, 1)` on the
/// amplitudes `((2a+b), b, (-2a+b)) / sqrt(2)`.
pub fn qed_reference_state(alpha: C64, beta: C64) -> Result<TwoModeEcs> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    build_qutrit_ecs(
        (2.0 * alpha + beta) * r,
        beta * r,
        (-2.0 * alpha + beta) * r,
        C64::new(QED_CENTRAL_WEIGHT, 0.0),
        C64::new(1.0, 0.0),
    )
}
