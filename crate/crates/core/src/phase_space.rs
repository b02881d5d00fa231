// SPDX-License-Identifier: Apache-2.0

//! One-mode Wigner functions of coherent-dyad kernels, phase-space grids
//! and peak analysis.
//!
//! A single dyad `w |a><b|` has the Gaussian Wigner function
//! `w (2/pi) <b|a> exp(-2 (g - a)(g^* - b^*))`, so every reduced state in
//! this crate is evaluated through one formula. The literal closed forms
//! (`wigner_closed_*`) are kept separately as cross-checks.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{self, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{normalization, overlap, TwoModeEcs, MERGE_TOLERANCE};
use crate::fock::{adequate_cutoff, coherent_fock_unchecked, FockOperator};
use crate::{ensure_finite, ensure_finite_real, Error, Result, C64};

const TWO_OVER_PI: f64 = 2.0 / PI;

/// Maxima closer than this along x are reported once.
pub const PEAK_MERGE_DISTANCE: f64 = 1e-4;

/// Minimum distance between the kernel amplitudes and the grid border for
/// [`integrate_grid`].
pub const INTEGRATION_MARGIN: f64 = 4.0;

/// `w |ket><bra|`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dyad {
    pub weight: C64,
    pub ket: C64,
    pub bra: C64,
}

/// Complex Wigner contribution of `weight |ket><bra|` at `gamma`.
pub fn wigner_dyad(weight: C64, ket: C64, bra: C64, gamma: C64) -> C64 {
    // <bra|ket> folded into the same exponential to avoid under/overflow
    let exponent = -0.5 * ket.norm_sqr() - 0.5 * bra.norm_sqr() + bra.conj() * ket
        - 2.0 * (gamma - ket) * (gamma.conj() - bra.conj());
    weight * TWO_OVER_PI * exponent.exp()
}

impl Dyad {
    fn shift(&self, gamma: C64) -> C64 {
        (gamma - self.ket) + (gamma.conj() - self.bra.conj())
    }

    fn value(&self, gamma: C64) -> C64 {
        wigner_dyad(self.weight, self.ket, self.bra, gamma)
    }

    /// Derivative along Re(gamma).
    fn dx(&self, gamma: C64) -> C64 {
        -2.0 * self.shift(gamma) * self.value(gamma)
    }

    fn dxx(&self, gamma: C64) -> C64 {
        let s = self.shift(gamma);
        (4.0 * s * s - 4.0) * self.value(gamma)
    }
}

/// One-mode density operator `sum_k w_k |a_k><b_k|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentKernel {
    dyads: Vec<Dyad>,
}

impl CoherentKernel {
    /// Validates Hermiticity and unit trace.
    pub fn new(dyads: Vec<Dyad>) -> Result<Self> {
        if dyads.is_empty() {
            return Err(Error::EmptyState);
        }
        for d in &dyads {
            ensure_finite(d.weight, "dyad weight")?;
            ensure_finite(d.ket, "dyad ket amplitude")?;
            ensure_finite(d.bra, "dyad bra amplitude")?;
        }
        let kernel = Self {
            dyads: merge_dyads(dyads),
        };
        if !kernel.is_hermitian(1e-10) {
            return Err(Error::NotPhysical("kernel is not Hermitian".into()));
        }
        let tr = kernel.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::TraceDeviation { trace: tr.re });
        }
        Ok(kernel)
    }

    pub fn coherent(amp: C64) -> Result<Self> {
        Self::new(vec![Dyad {
            weight: C64::new(1.0, 0.0),
            ket: amp,
            bra: amp,
        }])
    }

    pub fn dyads(&self) -> &[Dyad] {
        &self.dyads
    }

    /// `sum_k w_k <b_k|a_k>`
    pub fn trace(&self) -> C64 {
        self.dyads.iter().map(|d| d.weight * overlap(d.bra, d.ket)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.dyads.iter().all(|d| {
            self.dyads.iter().any(|e| {
                (e.ket - d.bra).norm() < MERGE_TOLERANCE
                    && (e.bra - d.ket).norm() < MERGE_TOLERANCE
                    && (e.weight - d.weight.conj()).norm() <= tol
            })
        })
    }

    /// Distinct coherent amplitudes appearing in the dyads.
    pub fn amplitudes(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for d in &self.dyads {
            for a in [d.ket, d.bra] {
                if !out.iter().any(|o| (o - a).norm() < MERGE_TOLERANCE) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn support(&self) -> Support {
        Support::of(&self.amplitudes())
    }

    pub fn wigner(&self, gamma: C64) -> f64 {
        self.dyads.iter().map(|d| d.value(gamma)).sum::<C64>().re
    }

    /// `dW/dx` at `gamma = x + iy`.
    pub fn wigner_dx(&self, gamma: C64) -> f64 {
        self.dyads.iter().map(|d| d.dx(gamma)).sum::<C64>().re
    }

    pub fn wigner_dxx(&self, gamma: C64) -> f64 {
        self.dyads.iter().map(|d| d.dxx(gamma)).sum::<C64>().re
    }

    /// Number-basis matrix of the kernel.
    pub fn to_fock(&self, n_cut: usize) -> Result<FockOperator> {
        let required = adequate_cutoff(self.max_amplitude());
        if n_cut < required {
            return Err(Error::InadequateCutoff {
                n_cut,
                required,
                max_amplitude: self.max_amplitude(),
            });
        }
        let mut m = DMatrix::from_element(n_cut, n_cut, C64::new(0.0, 0.0));
        for d in &self.dyads {
            let ket = coherent_fock_unchecked(d.ket, n_cut);
            let bra = coherent_fock_unchecked(d.bra, n_cut);
            m += ket.entries() * bra.entries().adjoint() * d.weight;
        }
        Ok(FockOperator::new(m))
    }
}

fn merge_dyads(dyads: Vec<Dyad>) -> Vec<Dyad> {
    let mut out: Vec<Dyad> = Vec::with_capacity(dyads.len());
    for d in dyads {
        match out
            .iter_mut()
            .find(|o| (o.ket - d.ket).norm() < MERGE_TOLERANCE && (o.bra - d.bra).norm() < MERGE_TOLERANCE)
        {
            Some(o) => o.weight += d.weight,
            None => out.push(d),
        }
    }
    out
}

/// Reduced state of mode 1: dyads `c_i c_j^* <b_j|b_i> |a_i><a_j|`.
pub fn reduce_to_kernel(state: &TwoModeEcs) -> Result<CoherentKernel> {
    let norm = normalization(state)?;
    let terms = state.terms();
    let mut dyads = Vec::with_capacity(terms.len() * terms.len());
    for ti in terms {
        for tj in terms {
            dyads.push(Dyad {
                weight: ti.coeff * tj.coeff.conj() * overlap(tj.amp2, ti.amp2) / norm,
                ket: ti.amp1,
                bra: tj.amp1,
            });
        }
    }
    CoherentKernel::new(dyads)
}

/// Literal two-component closed form for real `alpha`, `beta`, `mu`.
pub fn wigner_closed_qubit(gamma: C64, alpha: f64, beta: f64, mu: f64) -> f64 {
    let p = (-(alpha - beta).powi(2) / 2.0).exp();
    let m = 1.0 + mu * mu + 2.0 * mu * p * p;
    let (a, b) = (C64::new(alpha, 0.0), C64::new(beta, 0.0));
    let g = gamma;
    let gc = gamma.conj();
    let base = -(alpha * alpha + beta * beta) - 2.0 * g.norm_sqr();
    let cross = (base + 2.0 * (g * b + gc * a)).exp() + (base + 2.0 * (g * a + gc * b)).exp();
    TWO_OVER_PI / m * ((-2.0 * (g - a).norm_sqr()).exp() + mu * mu * (-2.0 * (g - b).norm_sqr()).exp() + mu * cross.re)
}

/// Literal three-component closed form for real amplitudes and weights.
pub fn wigner_closed_qutrit(delta: C64, alpha: f64, beta: f64, gamma: f64, mu1: f64, mu2: f64) -> f64 {
    let p1 = (-(alpha - beta).powi(2) / 2.0).exp();
    let p2 = (-(gamma - beta).powi(2) / 2.0).exp();
    let p3 = (-(gamma - alpha).powi(2) / 2.0).exp();
    let m = 1.0 + mu1 * mu1 + mu2 * mu2 + 2.0 * mu1 * p1 * p1 + 2.0 * mu1 * mu2 * p2 * p2 + 2.0 * mu2 * p3 * p3;
    let d = delta;
    let dc = delta.conj();
    let gauss = |c: f64| (-2.0 * (d - c).norm_sqr()).exp();
    // prefactor p e^{-(u+v)^2/2} e^{-2|d|^2} (e^{2(d v + d^* u)} + e^{2(d^* v + d u)})
    let cross = |p: f64, u: f64, v: f64| {
        let base = -0.5 * (u + v).powi(2) - 2.0 * d.norm_sqr();
        p * ((base + 2.0 * (d * v + dc * u)).exp() + (base + 2.0 * (dc * v + d * u)).exp()).re
    };
    TWO_OVER_PI / m
        * (gauss(alpha)
            + mu1 * mu1 * gauss(beta)
            + mu2 * mu2 * gauss(gamma)
            + mu1 * cross(p1, alpha, beta)
            + mu1 * mu2 * cross(p2, beta, gamma)
            + mu2 * cross(p3, alpha, gamma))
}

/// Literal closed form for the cavity-generated qutrit state with weights (1, 1.35, 1).
pub fn wigner_closed_qed(delta: C64, alpha: f64, beta: f64) -> f64 {
    let s2 = 2f64.sqrt();
    let m = 3.8225 + 5.4 * (-2.0 * alpha * alpha).exp() + 2.0 * (-8.0 * alpha * alpha).exp();
    let d = delta;
    let dc = delta.conj();
    let (up, mid, down) = (
        (2.0 * alpha + beta) * FRAC_1_SQRT_2,
        beta * FRAC_1_SQRT_2,
        (-2.0 * alpha + beta) * FRAC_1_SQRT_2,
    );
    let gauss = |c: f64| (-2.0 * (d - c).norm_sqr()).exp();
    let dd = 2.0 * d.norm_sqr();
    let (a2, ab, b2) = (alpha * alpha, alpha * beta, beta * beta);
    let pair = |base: f64, u: f64, v: f64| {
        // e^{base}(e^{sqrt2 (d u + d^* v)} + e^{sqrt2 (d^* u + d v)})
        ((base + s2 * (d * u + dc * v)).exp() + (base + s2 * (dc * u + d * v)).exp()).re
    };
    let upper = pair(-2.0 * a2 - 2.0 * ab - b2 - dd, beta, 2.0 * alpha + beta);
    let lower = pair(-2.0 * a2 + 2.0 * ab - b2 - dd, -2.0 * alpha + beta, beta);
    let outer = pair(-4.0 * a2 - b2 - dd, -2.0 * alpha + beta, 2.0 * alpha + beta);
    TWO_OVER_PI / m * (gauss(up) + 1.8225 * gauss(mid) + gauss(down) + 1.35 * upper + 1.35 * lower + outer)
}

/// Bounding box of a set of phase-space points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Support {
    pub fn of(points: &[C64]) -> Self {
        let mut s = Support {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for p in points {
            s.x_min = s.x_min.min(p.re);
            s.x_max = s.x_max.max(p.re);
            s.y_min = s.y_min.min(p.im);
            s.y_max = s.y_max.max(p.im);
        }
        s
    }
}

/// Rectangular sampling of phase space, `x = x_min + j step`, `y = y_min + i step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
    pub cell_cap: usize,
}

impl GridSpec {
    pub const DEFAULT_STEP: f64 = 0.05;
    pub const DEFAULT_CELL_CAP: usize = 4_000_000;
    pub const DEFAULT_MARGIN: f64 = 4.0;

    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, step: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
            step,
            cell_cap: Self::DEFAULT_CELL_CAP,
        }
    }

    /// Amplitude box widened by 4 on every side, step 0.05.
    pub fn covering(support: Support) -> Self {
        let m = Self::DEFAULT_MARGIN;
        let h = Self::DEFAULT_STEP;
        // round the upper edges out so the last node keeps the full margin
        let upper = |lo: f64, hi: f64| lo + ((hi - lo) / h - 1e-9).ceil() * h;
        let (x_min, y_min) = (support.x_min - m, support.y_min - m);
        Self::new(
            x_min,
            upper(x_min, support.x_max + m),
            y_min,
            upper(y_min, support.y_max + m),
            h,
        )
    }

    fn count(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    pub fn nx(&self) -> usize {
        Self::count(self.x_min, self.x_max, self.step)
    }

    pub fn ny(&self) -> usize {
        Self::count(self.y_min, self.y_max, self.step)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x_min", self.x_min),
            ("x_max", self.x_max),
            ("y_min", self.y_min),
            ("y_max", self.y_max),
            ("step", self.step),
        ] {
            ensure_finite_real(v, name)?;
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step",
                value: self.step,
                reason: "grid step must be positive",
            });
        }
        if self.x_max < self.x_min {
            return Err(Error::InvalidParameter {
                name: "x_max",
                value: self.x_max,
                reason: "x_max must not be below x_min",
            });
        }
        if self.y_max < self.y_min {
            return Err(Error::InvalidParameter {
                name: "y_max",
                value: self.y_max,
                reason: "y_max must not be below y_min",
            });
        }
        let cells = ((self.x_max - self.x_min) / self.step + 1.0) * ((self.y_max - self.y_min) / self.step + 1.0);
        if cells > self.cell_cap as f64 {
            return Err(Error::GridTooLarge {
                cells: cells as usize,
                cap: self.cell_cap,
            });
        }
        Ok(())
    }
}

/// Sampled Wigner function, row-major with rows along y.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub nx: usize,
    pub ny: usize,
    values: Vec<f64>,
    /// Amplitude box of the sampled state, when known.
    pub support: Option<Support>,
}

impl WignerGrid {
    pub fn x(&self, j: usize) -> f64 {
        self.spec.x_min + j as f64 * self.spec.step
    }

    pub fn y(&self, i: usize) -> f64 {
        self.spec.y_min + i as f64 * self.spec.step
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nx + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `x,y,w`, y in the outer loop.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,w")?;
        for i in 0..self.ny {
            let y = format_float(self.y(i));
            for j in 0..self.nx {
                writeln!(
                    out,
                    "{},{},{}",
                    format_float(self.x(j)),
                    y,
                    format_float(self.value(i, j))
                )?;
            }
        }
        out.flush()
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Samples `f` on the grid; rows are evaluated in parallel and each cell independently.
pub fn wigner_grid_fn<F>(spec: &GridSpec, support: Option<Support>, f: F) -> Result<WignerGrid>
where
    F: Fn(C64) -> f64 + Sync,
{
    spec.validate()?;
    let (nx, ny) = (spec.nx(), spec.ny());
    let rows: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|i| {
            let y = spec.y_min + i as f64 * spec.step;
            (0..nx)
                .map(|j| f(C64::new(spec.x_min + j as f64 * spec.step, y)))
                .collect()
        })
        .collect();
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "Wigner value" });
    }
    Ok(WignerGrid {
        spec: *spec,
        nx,
        ny,
        values,
        support,
    })
}

pub fn wigner_grid(kernel: &CoherentKernel, spec: &GridSpec) -> Result<WignerGrid> {
    wigner_grid_fn(spec, Some(kernel.support()), |g| kernel.wigner(g))
}

/// Riemann sum `sum W step^2`; requires a margin of at least 4 around the amplitudes.
pub fn integrate_grid(grid: &WignerGrid) -> Result<f64> {
    if let Some(s) = grid.support {
        let margin = (s.x_min - grid.spec.x_min)
            .min(grid.x(grid.nx - 1) - s.x_max)
            .min(s.y_min - grid.spec.y_min)
            .min(grid.y(grid.ny - 1) - s.y_max);
        if margin < INTEGRATION_MARGIN - 1e-9 {
            return Err(Error::MarginViolation {
                required: INTEGRATION_MARGIN,
                found: margin,
            });
        }
    }
    let h = grid.spec.step;
    Ok(grid.values.iter().sum::<f64>() * h * h)
}

/// A real function of x whose maxima are sought.
pub trait Profile {
    fn value(&self, x: f64) -> f64;

    /// Centered finite difference unless overridden.
    fn slope(&self, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        (self.value(x + h) - self.value(x - h)) / (2.0 * h)
    }
}

/// Cut of a kernel's Wigner function at fixed `y`, with analytic slope.
pub struct KernelProfile<'a> {
    pub kernel: &'a CoherentKernel,
    pub y: f64,
}

impl Profile for KernelProfile<'_> {
    fn value(&self, x: f64) -> f64 {
        self.kernel.wigner(C64::new(x, self.y))
    }

    fn slope(&self, x: f64) -> f64 {
        self.kernel.wigner_dx(C64::new(x, self.y))
    }
}

/// Profile given only by its values.
pub struct FnProfile<F>(pub F);

impl<F: Fn(f64) -> f64> Profile for FnProfile<F> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    pub height: f64,
}

/// Local maxima sorted by x.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSet {
    peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn with_y(mut self, y: f64) -> Self {
        for p in &mut self.peaks {
            p.y = y;
        }
        self
    }
}

fn bisect_slope<P: Profile + ?Sized>(profile: &P, mut lo: f64, mut hi: f64) -> f64 {
    // slope(lo) > 0 > slope(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = profile.slope(mid);
        if s == 0.0 {
            return mid;
        }
        if s > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maxima of `profile` on `[x_min, x_max]` found by a sign-change scan of
/// the slope over `samples` intervals followed by bisection.
pub fn find_peaks_profile<P: Profile + ?Sized>(profile: &P, x_min: f64, x_max: f64, samples: usize) -> Result<PeakSet> {
    ensure_finite_real(x_min, "x_min")?;
    ensure_finite_real(x_max, "x_max")?;
    if samples < 100 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "at least 100 samples are needed",
        });
    }
    if x_max <= x_min {
        return Err(Error::InvalidParameter {
            name: "x_max",
            value: x_max,
            reason: "range must be non-empty",
        });
    }
    let h = (x_max - x_min) / samples as f64;
    let xs: Vec<f64> = (0..=samples).map(|k| x_min + k as f64 * h).collect();
    let slopes: Vec<f64> = xs.iter().map(|&x| profile.slope(x)).collect();
    let mut candidates = Vec::new();
    let mut k = 0;
    while k < samples {
        if slopes[k] > 0.0 {
            if slopes[k + 1] < 0.0 {
                candidates.push(bisect_slope(profile, xs[k], xs[k + 1]));
            } else if slopes[k + 1] == 0.0 && k + 2 <= samples && slopes[k + 2] < 0.0 {
                candidates.push(xs[k + 1]);
                k += 1;
            }
        }
        k += 1;
    }
    let top = xs.iter().map(|&x| profile.value(x)).fold(0.0, f64::max);
    let eps = 1e-4 * h.max(1e-3);
    let mut peaks: Vec<Peak> = candidates
        .into_iter()
        .filter_map(|x| {
            let v = profile.value(x);
            let second = profile.value(x - eps) + profile.value(x + eps) - 2.0 * v;
            (second <= 0.0 && v > 1e-10 * top && v > 0.0).then_some(Peak { x, y: 0.0, height: v })
        })
        .collect();
    peaks.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<Peak> = Vec::with_capacity(peaks.len());
    for p in peaks {
        match merged.last_mut() {
            Some(last) if p.x - last.x < PEAK_MERGE_DISTANCE => {
                if p.height > last.height {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    if merged.is_empty() {
        return Err(Error::NoPeaks);
    }
    Ok(PeakSet { peaks: merged })
}

/// Maxima of a kernel's Wigner function along the line `Im(gamma) = y`,
/// scanning `[min Re(amp) - 4, max Re(amp) + 4]` with 4000 intervals.
pub fn find_kernel_peaks(kernel: &CoherentKernel, y: f64) -> Result<PeakSet> {
    let s = kernel.support();
    let profile = KernelProfile { kernel, y };
    Ok(find_peaks_profile(&profile, s.x_min - 4.0, s.x_max + 4.0, 4000)?.with_y(y))
}

/// Largest pairwise x-distance between peaks; 0 for a single peak.
pub fn peak_separation(peaks: &PeakSet) -> Result<f64> {
    match (peaks.peaks.first(), peaks.peaks.last()) {
        (Some(first), Some(last)) => Ok(last.x - first.x),
        _ => Err(Error::EmptyPeakSet),
    }
}

/// Stationary points of the equal-weight two-component profile on the real
/// axis, i.e. the solutions of `exp((x-b)^2 - (x-a)^2) = (x-b)/(a-x)`.
///
/// Both sides only meet strictly between `a` and `b`. Writing
/// `x = lo + L s(t)` with `L = |a - b|` and the logistic `s`, the equation
/// becomes `t = L^2 tanh(t/2)`, which has the root `t = 0` (the midpoint)
/// and, for `L^2 > 2`, one more root of each sign.
pub fn transcendental_intersections(alpha: f64, beta: f64) -> Result<Vec<f64>> {
    ensure_finite_real(alpha, "alpha")?;
    ensure_finite_real(beta, "beta")?;
    if alpha == beta {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "the two amplitudes must differ",
        });
    }
    let (lo, hi) = (alpha.min(beta), alpha.max(beta));
    let l = hi - lo;
    let l2 = l * l;
    let mid = lo + 0.5 * l;
    if l2 <= 2.0 {
        return Ok(vec![mid]);
    }
    let f = |t: f64| t - l2 * (0.5 * t).tanh();
    // f < 0 just above 0, f(l2) > 0
    let (mut a, mut b) = (0.0f64, l2);
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    let logistic = |t: f64| 1.0 / (1.0 + (-t).exp());
    // lo + L s(-t) and hi - L s(-t), the latter written from the upper end for precision
    let near_lo = lo + l * logistic(-t);
    let near_hi = hi - l * logistic(-t);
    Ok(vec![near_lo, mid, near_hi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{build_qubit_ecs, build_qutrit_ecs, TwoModeTerm};
    use crate::fock::{reduced_density_mode1, two_mode_from_terms, wigner_displaced_parity};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn qubit_kernel(a: f64, b: f64, mu: f64) -> CoherentKernel {
        reduce_to_kernel(&build_qubit_ecs(r(a), r(b), r(mu)).unwrap()).unwrap()
    }

    #[test]
    fn dyad_values() {
        let a = C64::new(1.3, -0.4);
        assert_abs_diff_eq!(wigner_dyad(r(1.0), a, a, a).re, 2.0 / PI, epsilon = 1e-15);
        // cross pair at gamma = 3 for (2, 4): 2 (2/pi) e^{-2} e^{-2 (1)(-1)} = (4/pi)
        let pair = wigner_dyad(r(1.0), r(2.0), r(4.0), r(3.0)) + wigner_dyad(r(1.0), r(4.0), r(2.0), r(3.0));
        assert_abs_diff_eq!(pair.re, 4.0 / PI, epsilon = 1e-14);
        assert!(pair.im.abs() < 1e-15);
        // with the kernel's cross weight p = e^{-2}, the closed-form cross term: e^{-20} e^{-18} 2 e^{36}
        let closed = (2.0 / PI) * 2.0 * (-(4.0f64 + 16.0) - 18.0 + 2.0 * (12.0 + 6.0)).exp();
        assert_abs_diff_eq!((-2.0f64).exp() * pair.re, closed, epsilon = 1e-13);
    }

    #[test]
    fn qubit_kernel_structure() {
        let k = qubit_kernel(2.0, 4.0, 1.0);
        let p = (-2.0f64).exp();
        let m = 2.0 + 2.0 * p * p;
        assert_eq!(k.dyads().len(), 4);
        for d in k.dyads() {
            let expected = if d.ket == d.bra { 1.0 / m } else { p / m };
            assert_abs_diff_eq!(d.weight.re, expected, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(k.trace().re, 1.0, epsilon = 1e-12);
        let product =
            reduce_to_kernel(&TwoModeEcs::new(vec![TwoModeTerm::new(r(1.0), r(1.0), r(-2.0))]).unwrap()).unwrap();
        assert_eq!(product.dyads().len(), 1);
        assert!(CoherentKernel::new(vec![Dyad {
            weight: r(0.5),
            ket: r(0.0),
            bra: r(1.0)
        }])
        .is_err());
    }

    #[test]
    fn kernel_matches_partial_trace_oracle() {
        for state in [
            build_qubit_ecs(r(2.0), r(4.0), r(1.0)).unwrap(),
            build_qutrit_ecs(
                C64::new(0.5, 1.0),
                r(-1.0),
                C64::new(1.5, -0.5),
                C64::new(0.3, 0.8),
                r(1.2),
            )
            .unwrap(),
            TwoModeEcs::new(vec![
                TwoModeTerm::new(r(1.0), r(1.0), C64::new(0.0, 2.0)),
                TwoModeTerm::new(C64::new(0.0, 0.7), r(-1.5), r(0.5)),
            ])
            .unwrap()
            .normalized()
            .unwrap(),
        ] {
            let n = adequate_cutoff(state.max_amplitude());
            let psi = two_mode_from_terms(&state, n).unwrap().vector;
            let oracle = reduced_density_mode1(&psi);
            let kernel = reduce_to_kernel(&state).unwrap().to_fock(n).unwrap();
            assert!(kernel.max_abs_diff(&oracle) < 1e-9);
        }
    }

    #[test]
    fn closed_qubit_matches_kernel() {
        for &(a, b, mu) in &[(2.0, 4.0, 1.0), (0.0, 1.0, 0.4), (-1.0, 2.5, 2.0), (2.0, 2.0, 1.0)] {
            let k = qubit_kernel(a, b, mu);
            for i in -10..=10 {
                for j in -10..=10 {
                    let g = C64::new(1.0 + 0.4 * i as f64, 0.3 * j as f64);
                    assert_abs_diff_eq!(wigner_closed_qubit(g, a, b, mu), k.wigner(g), epsilon = 1e-12);
                }
            }
        }
        assert_abs_diff_eq!(wigner_closed_qubit(r(2.0), 2.0, 2.0, 1.0), 2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn closed_qutrit_matches_kernel() {
        for &(a, b, g, m1, m2) in &[
            (0.0, 3.0, 8.0, 1.0, 1.0),
            (0.0, 1.0, -1.5, 0.5, 2.0),
            (5.0, 5.0, 5.0, 1.0, 1.0),
        ] {
            let k = reduce_to_kernel(&build_qutrit_ecs(r(a), r(b), r(g), r(m1), r(m2)).unwrap()).unwrap();
            for i in -10..=10 {
                for j in -10..=10 {
                    let d = C64::new(2.0 + 0.5 * i as f64, 0.25 * j as f64);
                    assert_abs_diff_eq!(wigner_closed_qutrit(d, a, b, g, m1, m2), k.wigner(d), epsilon = 1e-12);
                }
            }
        }
        assert_abs_diff_eq!(
            wigner_closed_qutrit(r(5.0), 5.0, 5.0, 5.0, 1.0, 1.0),
            2.0 / PI,
            epsilon = 1e-14
        );
    }

    #[test]
    fn closed_qed_matches_reference_kernel() {
        for &(a, b) in &[(1.0, 0.0), (2.0, 7.0), (0.5, -1.0)] {
            let k = reduce_to_kernel(&crate::coherent::qed_reference_state(r(a), r(b)).unwrap()).unwrap();
            for i in -10..=10 {
                for j in -10..=10 {
                    let d = C64::new(b / 2f64.sqrt() + 0.5 * i as f64, 0.3 * j as f64);
                    assert_abs_diff_eq!(wigner_closed_qed(d, a, b), k.wigner(d), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_wigner_matches_displaced_parity_oracle() {
        let state = build_qubit_ecs(C64::new(0.5, 0.5), r(-1.0), C64::new(0.6, -0.2)).unwrap();
        let kernel = reduce_to_kernel(&state).unwrap();
        let n = 40;
        let psi = two_mode_from_terms(&state, n).unwrap().vector;
        let rho = reduced_density_mode1(&psi);
        for i in -3..=3 {
            for j in -3..=3 {
                let g = C64::new(0.4 * i as f64, 0.4 * j as f64);
                assert_abs_diff_eq!(
                    kernel.wigner(g),
                    wigner_displaced_parity(&rho, g).unwrap(),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn analytic_slope_matches_finite_difference() {
        let k = reduce_to_kernel(
            &build_qutrit_ecs(r(0.0), C64::new(1.0, 0.5), r(2.5), r(1.1), C64::new(0.0, 0.9)).unwrap(),
        )
        .unwrap();
        for i in -20..=20 {
            let g = C64::new(0.2 * i as f64, 0.3);
            let h = 1e-5;
            let fd = (k.wigner(g + h) - k.wigner(g - h)) / (2.0 * h);
            assert_abs_diff_eq!(k.wigner_dx(g), fd, epsilon = 1e-8);
            let fd2 = (k.wigner_dx(g + h) - k.wigner_dx(g - h)) / (2.0 * h);
            assert_abs_diff_eq!(k.wigner_dxx(g), fd2, epsilon = 1e-7);
        }
    }

    #[test]
    fn vacuum_grid_integrates_to_one() {
        let k = CoherentKernel::coherent(r(0.0)).unwrap();
        let spec = GridSpec::new(-4.0, 4.0, -4.0, 4.0, 0.05);
        let grid = wigner_grid(&k, &spec).unwrap();
        assert_eq!((grid.nx, grid.ny), (161, 161));
        assert_abs_diff_eq!(integrate_grid(&grid).unwrap(), 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(grid.max_value(), 2.0 / PI, epsilon = 1e-12);

        let narrow = wigner_grid(&k, &GridSpec::new(-3.0, 3.0, -4.0, 4.0, 0.05)).unwrap();
        assert!(matches!(integrate_grid(&narrow), Err(Error::MarginViolation { .. })));
    }

    #[test]
    fn qubit_grid_normalisation_and_bounds() {
        let k = qubit_kernel(2.0, 4.0, 1.0);
        let grid = wigner_grid(&k, &GridSpec::covering(k.support())).unwrap();
        assert_abs_diff_eq!(integrate_grid(&grid).unwrap(), 1.0, epsilon = 1e-5);
        assert!(grid.min_value() >= -1e-9);
        assert!(grid.max_value() <= 2.0 / PI + 1e-9);
    }

    #[test]
    fn grid_errors() {
        let k = CoherentKernel::coherent(r(0.0)).unwrap();
        assert!(matches!(
            wigner_grid(&k, &GridSpec::new(-100.0, 100.0, -100.0, 100.0, 0.01)),
            Err(Error::GridTooLarge { .. })
        ));
        assert!(wigner_grid(&k, &GridSpec::new(-1.0, 1.0, -1.0, 1.0, 0.0)).is_err());
        assert!(wigner_grid(&k, &GridSpec::new(1.0, -1.0, -1.0, 1.0, 0.1)).is_err());
        assert!(wigner_grid(&k, &GridSpec::new(f64::NAN, 1.0, -1.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn grid_is_independent_of_partitioning() {
        let k = qubit_kernel(2.0, 4.5, 1.0);
        let spec = GridSpec::new(-2.0, 8.0, -3.0, 3.0, 0.1);
        let parallel = wigner_grid(&k, &spec).unwrap();
        let serial: Vec<f64> = (0..spec.ny())
            .flat_map(|i| (0..spec.nx()).map(move |j| (i, j)))
            .map(|(i, j)| {
                k.wigner(C64::new(
                    spec.x_min + j as f64 * spec.step,
                    spec.y_min + i as f64 * spec.step,
                ))
            })
            .collect();
        assert_eq!(parallel.values(), serial.as_slice());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let again = pool.install(|| wigner_grid(&k, &spec).unwrap());
        assert_eq!(again.values(), parallel.values());
    }

    #[test]
    fn csv_layout() {
        let k = CoherentKernel::coherent(r(0.0)).unwrap();
        let grid = wigner_grid(&k, &GridSpec::new(0.0, 0.1, -0.05, 0.0, 0.05)).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,w");
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("0,-0.05,"));
        assert!(lines[2].starts_with("0.05,-0.05,"));
        assert!(lines[4].starts_with("0,0,"));
        let w: f64 = lines[4].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(w, grid.value(1, 0));
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, 1.0, -2.5, 0.1 + 0.2, 1e-5, 3.3e-200, 6.02e23, 2.0 / PI, -1e-4] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(1e-20), "1e-20");
    }

    #[test]
    fn peaks_for_coincident_amplitudes() {
        let k = qubit_kernel(2.0, 2.0, 1.0);
        let peaks = find_kernel_peaks(&k, 0.0).unwrap();
        assert_eq!(peaks.len(), 1);
        assert_abs_diff_eq!(peaks.peaks()[0].x, 2.0, epsilon = 1e-9);
        assert_eq!(peak_separation(&peaks).unwrap(), 0.0);
    }

    #[test]
    fn peaks_two_regimes() {
        let two = find_kernel_peaks(&qubit_kernel(2.0, 4.5, 1.0), 0.0).unwrap();
        assert_eq!(two.len(), 2);
        assert!((two.peaks()[0].x - 2.0).abs() < 0.05 && (two.peaks()[1].x - 4.5).abs() < 0.05);
        let one = find_kernel_peaks(&qubit_kernel(2.0, 2.3, 1.0), 0.0).unwrap();
        assert_eq!(one.len(), 1);
        let far = find_kernel_peaks(&qubit_kernel(2.0, 6.0, 1.0), 0.0).unwrap();
        assert_abs_diff_eq!(peak_separation(&far).unwrap(), 4.0, epsilon = 0.05);
    }

    #[test]
    fn finite_difference_profile_agrees_with_analytic() {
        let k = qubit_kernel(2.0, 4.5, 1.0);
        let fd = find_peaks_profile(&FnProfile(|x: f64| k.wigner(r(x))), -2.0, 8.5, 2000).unwrap();
        let an = find_kernel_peaks(&k, 0.0).unwrap();
        assert_eq!(fd.len(), an.len());
        for (a, b) in fd.peaks().iter().zip(an.peaks()) {
            assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-6);
        }
    }

    #[test]
    fn peak_errors() {
        let flat = FnProfile(|x: f64| x);
        assert!(matches!(find_peaks_profile(&flat, 0.0, 1.0, 200), Err(Error::NoPeaks)));
        assert!(find_peaks_profile(&flat, 0.0, 1.0, 10).is_err());
        assert!(matches!(
            peak_separation(&PeakSet { peaks: vec![] }),
            Err(Error::EmptyPeakSet)
        ));
    }

    #[test]
    fn bifurcation_threshold_between_one_and_two_peaks() {
        let mut counts = Vec::new();
        let mut b = 2.0;
        while b <= 4.5 + 1e-9 {
            counts.push((b, find_kernel_peaks(&qubit_kernel(2.0, b, 1.0), 0.0).unwrap().len()));
            b += 0.1;
        }
        let first_two = counts.iter().position(|&(_, c)| c == 2).unwrap();
        assert!(counts[..first_two].iter().all(|&(_, c)| c == 1));
        assert!(counts[first_two..].iter().all(|&(_, c)| c == 2));
        let threshold = counts[first_two].0;
        assert!(threshold > 2.0 && threshold < 4.5);
        // equal weights: the profile is a square of a sum of two Gaussians
        assert!((threshold - (2.0 + 2f64.sqrt())).abs() <= 0.1 + 1e-9);
    }

    #[test]
    fn transcendental_roots_are_profile_stationary_points() {
        assert_eq!(transcendental_intersections(2.0, 3.0).unwrap(), vec![2.5]);
        for &(a, b) in &[(2.0, 4.5), (2.0, 4.0), (5.0, 1.0), (-1.0, 2.0)] {
            let roots = transcendental_intersections(a, b).unwrap();
            assert_eq!(roots.len(), 3);
            let k = qubit_kernel(a, b, 1.0);
            for &x in &roots {
                assert!(x > a.min(b) && x < a.max(b));
                // each root satisfies the original equation
                let lhs = ((x - b).powi(2) - (x - a).powi(2)).exp();
                let rhs = (x - b) / (a - x);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9 * lhs.max(1.0));
                assert!(k.wigner_dx(r(x)).abs() < 1e-9);
            }
            let peaks = find_kernel_peaks(&k, 0.0).unwrap();
            assert_abs_diff_eq!(peaks.peaks()[0].x, roots[0], epsilon = 1e-8);
            assert_abs_diff_eq!(peaks.peaks()[1].x, roots[2], epsilon = 1e-8);
        }
        assert!(transcendental_intersections(1.0, 1.0).is_err());
    }

    #[test]
    fn transcendental_roots_approach_amplitudes() {
        let roots = transcendental_intersections(0.0, 5.0).unwrap();
        assert!(roots[0] > 0.0 && roots[0] < 1e-9);
        assert!(roots[2] < 5.0 && 5.0 - roots[2] < 1e-9);
    }

    #[test]
    fn separation_grows_with_beta() {
        let mut last = -1.0;
        for k in 0..=8 {
            let b = 2.0 + 0.5 * k as f64;
            let s = peak_separation(&find_kernel_peaks(&qubit_kernel(2.0, b, 1.0), 0.0).unwrap()).unwrap();
            assert!(s >= last - 1e-12, "{b}: {s} < {last}");
            last = s;
        }
    }

    #[test]
    fn separation_is_translation_invariant_for_wide_pairs() {
        for &(a, delta) in &[(0.0, 3.0), (1.0, 4.0), (-2.0, 3.5)] {
            let base = peak_separation(&find_kernel_peaks(&qubit_kernel(a, a + delta, 1.0), 0.0).unwrap()).unwrap();
            for c in [-1.5, 0.7, 2.0] {
                let moved = peak_separation(&find_kernel_peaks(&qubit_kernel(a + c, a + c + delta, 1.0), 0.0).unwrap())
                    .unwrap();
                assert_abs_diff_eq!(base, moved, epsilon = 1e-6);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn positive_weight_real_states_are_bounded_and_symmetric(
            a in -3.0f64..3.0, b in -3.0f64..3.0, g in -3.0f64..3.0,
            m1 in 0.05f64..3.0, m2 in 0.05f64..3.0,
            x in -6.0f64..6.0, y in -4.0f64..4.0,
        ) {
            let k = reduce_to_kernel(&build_qutrit_ecs(r(a), r(b), r(g), r(m1), r(m2)).unwrap()).unwrap();
            let w = k.wigner(C64::new(x, y));
            prop_assert!(w >= -1e-9);
            prop_assert!(w <= 2.0 / PI + 1e-9);
            prop_assert_eq!(w, k.wigner(C64::new(x, -y)));
        }

        #[test]
        fn kernels_are_hermitian_with_unit_trace(
            re in prop::collection::vec(-2.0f64..2.0, 6),
            im in prop::collection::vec(-2.0f64..2.0, 6),
        ) {
            let terms = (0..3).map(|i| TwoModeTerm::new(C64::new(1.0 + re[i].abs(), im[i]), C64::new(re[i], im[i]), C64::new(re[i + 3], im[i + 3]))).collect();
            let Ok(state) = TwoModeEcs::new(terms).and_then(|s| s.normalized()) else { return Ok(()); };
            let k = reduce_to_kernel(&state).unwrap();
            prop_assert!(k.is_hermitian(1e-12));
            prop_assert!((k.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
            let g = C64::new(re[0], im[1]);
            prop_assert!(k.wigner(g).abs() <= 2.0 / PI + 1e-9);
        }
    }
}
