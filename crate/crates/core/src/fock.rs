// SPDX-License-Identifier: Apache-2.0

//! Truncated number-basis numerics.
//!
//! Everything here works on explicit matrices and vectors in the photon
//! number basis `|0>, ..., |n_cut - 1>` and never uses the coherent-state
//! closed forms of the other modules, so it serves as their ground truth.
//! Two-mode objects use the composite index `n1 * n_cut + n2` (mode 1 major).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::coherent::TwoModeEcs;
use crate::{ensure_finite, ensure_finite_real, Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Smallest cutoff that keeps the Poisson tail of `|alpha|` below ~1e-12.
pub fn adequate_cutoff(max_amplitude: f64) -> usize {
    let a = max_amplitude.abs();
    ((a * a + 6.0 * a + 12.0).ceil() as usize).max(1)
}

fn check_adequate(n_cut: usize, max_amplitude: f64) -> Result<()> {
    let required = adequate_cutoff(max_amplitude);
    if n_cut < required {
        return Err(Error::InadequateCutoff {
            n_cut,
            required,
            max_amplitude,
        });
    }
    Ok(())
}

fn check_min_cutoff(n_cut: usize, min: usize) -> Result<()> {
    if n_cut < min {
        Err(Error::CutoffTooSmall { n_cut, min })
    } else {
        Ok(())
    }
}

/// One-mode state vector in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    entries: DVector<C64>,
}

impl FockVector {
    pub fn new(entries: DVector<C64>) -> Self {
        Self { entries }
    }

    pub fn basis(n: usize, n_cut: usize) -> Self {
        let mut entries = DVector::from_element(n_cut, ZERO);
        entries[n] = ONE;
        Self { entries }
    }

    pub fn n_cut(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.entries.dotc(&other.entries)
    }

    pub fn scaled(&self, c: C64) -> FockVector {
        FockVector::new(&self.entries * c)
    }

    pub fn projector(&self) -> FockOperator {
        FockOperator::new(&self.entries * self.entries.adjoint())
    }
}

/// Square matrix acting on a truncated (one- or two-mode) number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: DMatrix<C64>,
}

impl FockOperator {
    pub fn new(entries: DMatrix<C64>) -> Self {
        assert!(entries.is_square(), "operator matrix must be square");
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dagger(&self) -> FockOperator {
        FockOperator::new(self.entries.adjoint())
    }

    pub fn compose(&self, rhs: &FockOperator) -> FockOperator {
        FockOperator::new(&self.entries * &rhs.entries)
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector::new(&self.entries * &v.entries)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `Tr(rho^2)`, real part.
    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    pub fn max_abs_diff(&self, other: &FockOperator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues of the Hermitian part, ascending, with values in
    /// `(-1e-12, 0)` clamped to zero.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .map(|&x| if x < 0.0 && x > -1e-12 { 0.0 } else { x })
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// `exp(G)` for an anti-Hermitian generator, via the eigendecomposition of
/// the Hermitian matrix `iG`.
pub(crate) fn exp_anti_hermitian(generator: &DMatrix<C64>) -> DMatrix<C64> {
    let i = C64::new(0.0, 1.0);
    let h = generator * i;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l)),
    );
    let mut scaled = v.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *ph;
    }
    scaled * v.adjoint()
}

/// `exp(i t H)` for a Hermitian operator; the Hermitian part of `h` is used.
pub fn exp_i_hermitian(h: &FockOperator, t: f64) -> Result<FockOperator> {
    ensure_finite_real(t, "evolution parameter")?;
    let generator = h.entries() * C64::new(0.0, t);
    Ok(FockOperator::new(exp_anti_hermitian(&generator)))
}

/// Glauber coherent state `|alpha>` expanded to `n_cut` number states.
///
/// Entry `n` is `exp(-|alpha|^2/2) alpha^n / sqrt(n!)`. The vector is not
/// renormalised, so any truncation loss stays visible in its norm.
pub fn coherent_fock(alpha: C64, n_cut: usize) -> Result<FockVector> {
    ensure_finite(alpha, "coherent amplitude")?;
    check_min_cutoff(n_cut, 1)?;
    check_adequate(n_cut, alpha.norm())?;
    Ok(coherent_fock_unchecked(alpha, n_cut))
}

/// Same expansion without the adequacy rule; the caller owns the truncation error.
pub fn coherent_fock_unchecked(alpha: C64, n_cut: usize) -> FockVector {
    let mut entries = DVector::from_element(n_cut, ZERO);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..n_cut {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        entries[n] = c;
    }
    FockVector::new(entries)
}

/// Annihilation operator `a` on the truncated space.
pub fn annihilation_matrix(n_cut: usize) -> FockOperator {
    let mut m = DMatrix::from_element(n_cut, n_cut, ZERO);
    for n in 1..n_cut {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    FockOperator::new(m)
}

/// `D(beta) = exp(beta a^dag - beta^* a)` on the truncated space.
pub fn displacement_matrix(beta: C64, n_cut: usize) -> Result<FockOperator> {
    ensure_finite(beta, "displacement amplitude")?;
    check_min_cutoff(n_cut, 2)?;
    let mut g = DMatrix::from_element(n_cut, n_cut, ZERO);
    for n in 0..n_cut - 1 {
        let s = ((n + 1) as f64).sqrt();
        g[(n + 1, n)] = beta * s;
        g[(n, n + 1)] = -beta.conj() * s;
    }
    Ok(FockOperator::new(exp_anti_hermitian(&g)))
}

/// Parity `(-1)^{a^dag a}`.
pub fn parity_matrix(n_cut: usize) -> Result<FockOperator> {
    check_min_cutoff(n_cut, 1)?;
    let diag = DVector::from_fn(n_cut, |n, _| if n % 2 == 0 { ONE } else { -ONE });
    Ok(FockOperator::new(DMatrix::from_diagonal(&diag)))
}

/// Phase shifter `exp(-i phi a^dag a)`.
pub fn phase_shift_matrix(phi: f64, n_cut: usize) -> Result<FockOperator> {
    ensure_finite_real(phi, "phase")?;
    check_min_cutoff(n_cut, 1)?;
    let diag = DVector::from_fn(n_cut, |n, _| C64::from_polar(1.0, -phi * n as f64));
    Ok(FockOperator::new(DMatrix::from_diagonal(&diag)))
}

/// Two-mode state vector, composite index `n1 * n_cut + n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockVector {
    entries: DVector<C64>,
    n_cut: usize,
}

impl TwoModeFockVector {
    pub fn new(entries: DVector<C64>, n_cut: usize) -> Result<Self> {
        if entries.len() != n_cut * n_cut {
            return Err(Error::DimensionMismatch {
                expected: n_cut * n_cut,
                found: entries.len(),
            });
        }
        Ok(Self { entries, n_cut })
    }

    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        assert_eq!(a.n_cut(), b.n_cut(), "modes must share a cutoff");
        let n = a.n_cut();
        let entries = DVector::from_fn(n * n, |k, _| a.entries[k / n] * b.entries[k % n]);
        Self { entries, n_cut: n }
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &TwoModeFockVector) -> C64 {
        self.entries.dotc(&other.entries)
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &TwoModeFockVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Coefficient matrix `psi[(n1, n2)]`.
    pub fn coefficient_matrix(&self) -> DMatrix<C64> {
        let n = self.n_cut;
        DMatrix::from_fn(n, n, |i, j| self.entries[i * n + j])
    }

    /// Apply a one-mode operator to mode 1 or mode 2.
    pub fn apply_local(&self, op: &FockOperator, mode: usize) -> TwoModeFockVector {
        let psi = self.coefficient_matrix();
        let out = match mode {
            1 => op.entries() * psi,
            2 => psi * op.entries().transpose(),
            _ => panic!("mode index must be 1 or 2"),
        };
        let n = self.n_cut;
        Self {
            entries: DVector::from_fn(n * n, |k, _| out[(k / n, k % n)]),
            n_cut: n,
        }
    }

    pub fn projector(&self) -> FockOperator {
        FockOperator::new(&self.entries * self.entries.adjoint())
    }
}

/// `Tr_2 |psi><psi|` computed from the coefficient matrix as `Psi Psi^dag`.
pub fn reduced_density_mode1(psi: &TwoModeFockVector) -> FockOperator {
    let m = psi.coefficient_matrix();
    FockOperator::new(&m * m.adjoint())
}

/// Partial trace over mode 2 of a dense two-mode operator of dimension `n_cut^2`.
pub fn partial_trace_mode2(rho12: &FockOperator) -> Result<FockOperator> {
    let dim = rho12.dim();
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: dim,
        });
    }
    let e = rho12.entries();
    let out = DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| e[(i * n + k, j * n + k)]).sum());
    Ok(FockOperator::new(out))
}

/// Beam splitter `exp(theta (a b^dag - a^dag b))` on the truncated two-mode
/// space, with `a` acting on mode 1 and `b` on mode 2.
///
/// The generator conserves `n1 + n2`, so the exponential is stored as one
/// dense block per total photon number instead of an `n_cut^2` square matrix.
/// With this sign, `|alpha>|0>` maps to `|alpha cos(theta)>|alpha sin(theta)>`.
#[derive(Debug, Clone)]
pub struct BeamSplitter {
    n_cut: usize,
    /// `(lowest n1 in the block, block unitary)` for total photon number N = index.
    blocks: Vec<(usize, DMatrix<C64>)>,
}

pub fn beamsplitter_matrix(theta: f64, n_cut: usize) -> Result<BeamSplitter> {
    ensure_finite_real(theta, "beam-splitter angle")?;
    check_min_cutoff(n_cut, 2)?;
    let n = n_cut;
    let blocks = (0..=2 * (n - 1))
        .map(|total| {
            let lo = total.saturating_sub(n - 1);
            let hi = total.min(n - 1);
            let size = hi - lo + 1;
            let mut g = DMatrix::from_element(size, size, ZERO);
            for j in 0..size {
                let n1 = (lo + j) as f64;
                let n2 = (total - lo - j) as f64;
                // a b^dag: n1 -> n1 - 1
                if j > 0 {
                    g[(j - 1, j)] += C64::new(theta * n1.sqrt() * (n2 + 1.0).sqrt(), 0.0);
                }
                // -a^dag b: n1 -> n1 + 1
                if j + 1 < size {
                    g[(j + 1, j)] -= C64::new(theta * (n1 + 1.0).sqrt() * n2.sqrt(), 0.0);
                }
            }
            (lo, exp_anti_hermitian(&g))
        })
        .collect();
    Ok(BeamSplitter { n_cut, blocks })
}

impl BeamSplitter {
    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn apply(&self, psi: &TwoModeFockVector) -> Result<TwoModeFockVector> {
        let n = self.n_cut;
        if psi.n_cut() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.n_cut(),
            });
        }
        let mut out = DVector::from_element(n * n, ZERO);
        for (total, (lo, u)) in self.blocks.iter().enumerate() {
            let size = u.nrows();
            let idx = |j: usize| (lo + j) * n + (total - lo - j);
            let v = DVector::from_fn(size, |j, _| psi.entries()[idx(j)]);
            let w = u * v;
            for j in 0..size {
                out[idx(j)] = w[j];
            }
        }
        TwoModeFockVector::new(out, n)
    }

    /// Dense `n_cut^2 x n_cut^2` matrix; intended for small cutoffs.
    pub fn to_dense(&self) -> FockOperator {
        let n = self.n_cut;
        let mut m = DMatrix::from_element(n * n, n * n, ZERO);
        for (total, (lo, u)) in self.blocks.iter().enumerate() {
            let idx = |j: usize| (lo + j) * n + (total - lo - j);
            for r in 0..u.nrows() {
                for c in 0..u.ncols() {
                    m[(idx(r), idx(c))] = u[(r, c)];
                }
            }
        }
        FockOperator::new(m)
    }
}

/// Fock embedding of a coherent-term two-mode state.
#[derive(Debug, Clone)]
pub struct EmbeddedState {
    /// Normalised two-mode vector.
    pub vector: TwoModeFockVector,
    /// Squared norm of `sum_i c_i |a_i>|b_i>` before normalisation.
    pub raw_norm_sqr: f64,
}

pub fn two_mode_from_terms(state: &TwoModeEcs, n_cut: usize) -> Result<EmbeddedState> {
    if state.terms().is_empty() {
        return Err(Error::EmptyState);
    }
    check_min_cutoff(n_cut, 1)?;
    check_adequate(n_cut, state.max_amplitude())?;
    let mut acc = DVector::from_element(n_cut * n_cut, ZERO);
    for t in state.terms() {
        let a = coherent_fock_unchecked(t.amp1, n_cut);
        let b = coherent_fock_unchecked(t.amp2, n_cut);
        acc += TwoModeFockVector::product(&a, &b).entries * t.coeff;
    }
    let raw_norm_sqr: f64 = acc.iter().map(|z| z.norm_sqr()).sum();
    if raw_norm_sqr.is_nan() || raw_norm_sqr <= 0.0 {
        return Err(Error::DegenerateNorm { norm: raw_norm_sqr });
    }
    acc /= C64::new(raw_norm_sqr.sqrt(), 0.0);
    Ok(EmbeddedState {
        vector: TwoModeFockVector::new(acc, n_cut)?,
        raw_norm_sqr,
    })
}

/// `Tr[rho D(gamma) Pi D(gamma)^dag]` without discarding the imaginary part.
pub fn displaced_parity_trace(rho: &FockOperator, gamma: C64) -> Result<C64> {
    DisplacedParity::new(rho.dim())?.trace(rho, gamma)
}

/// Wigner function `(2/pi) Tr[rho D(gamma) Pi D(gamma)^dag]`.
pub fn wigner_displaced_parity(rho: &FockOperator, gamma: C64) -> Result<f64> {
    DisplacedParity::new(rho.dim())?.wigner(rho, gamma)
}

/// Displaced-parity evaluator for many phase-space points at one cutoff.
///
/// `D(r e^{i theta}) = R(theta) D(r) R(theta)^dag` with `R(theta) = exp(i theta n)`,
/// and `D(r) = V exp(-i r Lambda) V^dag` for the eigensystem of `i(a^dag - a)`.
/// One eigendecomposition therefore serves every point.
#[derive(Debug, Clone)]
pub struct DisplacedParity {
    eigenvectors: DMatrix<C64>,
    eigenvalues: DVector<f64>,
    parity_in_eigenbasis: DMatrix<C64>,
}

impl DisplacedParity {
    pub fn new(n_cut: usize) -> Result<Self> {
        check_min_cutoff(n_cut, 2)?;
        let mut h = DMatrix::from_element(n_cut, n_cut, ZERO);
        for n in 0..n_cut - 1 {
            let s = ((n + 1) as f64).sqrt();
            h[(n + 1, n)] = C64::new(0.0, s);
            h[(n, n + 1)] = C64::new(0.0, -s);
        }
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors;
        let mut pv = v.clone();
        for (k, mut row) in pv.row_iter_mut().enumerate() {
            if k % 2 == 1 {
                row.neg_mut();
            }
        }
        Ok(Self {
            parity_in_eigenbasis: v.adjoint() * pv,
            eigenvectors: v,
            eigenvalues: eig.eigenvalues,
        })
    }

    pub fn n_cut(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Tr[rho D(gamma) Pi D(gamma)^dag]`.
    pub fn trace(&self, rho: &FockOperator, gamma: C64) -> Result<C64> {
        ensure_finite(gamma, "phase-space point")?;
        let n = self.n_cut();
        if rho.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.dim(),
            });
        }
        let trace = rho.trace();
        if (trace - ONE).norm() > 1e-6 {
            return Err(Error::TraceDeviation { trace: trace.re });
        }
        let (r, theta) = gamma.to_polar();
        // R^dag rho R, elementwise
        let rotated = DMatrix::from_fn(n, n, |i, j| {
            rho.entries()[(i, j)] * C64::from_polar(1.0, theta * (j as f64 - i as f64))
        });
        let mut x = self.eigenvectors.adjoint() * rotated * &self.eigenvectors;
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] *= C64::from_polar(1.0, r * (self.eigenvalues[i] - self.eigenvalues[j]));
            }
        }
        // Tr[X P'] with P' = V^dag Pi V
        Ok(x.iter()
            .zip(self.parity_in_eigenbasis.transpose().iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn wigner(&self, rho: &FockOperator, gamma: C64) -> Result<f64> {
        Ok(2.0 / PI * self.trace(rho, gamma)?.re)
    }

    /// Wigner values at many points. `rho` is diagonalised once and each point
    /// costs two matrix-vector products per retained eigenvector. Eigenvalues
    /// below 1e-14 of the largest are rounding noise and are dropped.
    pub fn wigner_many(&self, rho: &FockOperator, points: &[C64]) -> Result<Vec<f64>> {
        let n = self.n_cut();
        if rho.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.dim(),
            });
        }
        let trace = rho.trace();
        if (trace - ONE).norm() > 1e-6 {
            return Err(Error::TraceDeviation { trace: trace.re });
        }
        if !rho.is_hermitian(1e-10) {
            return Err(Error::NotPhysical("density matrix is not Hermitian".into()));
        }
        let eig = SymmetricEigen::new(rho.entries().clone());
        let top = eig.eigenvalues.amax();
        let components: Vec<(f64, DVector<C64>)> = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors.column_iter())
            .filter(|(w, _)| w.abs() > 1e-14 * top)
            .map(|(&w, u)| (w, u.into_owned()))
            .collect();
        let v_adj = self.eigenvectors.adjoint();
        points
            .iter()
            .map(|&gamma| {
                ensure_finite(gamma, "phase-space point")?;
                let (r, theta) = gamma.to_polar();
                let mut acc = 0.0;
                for (w, u) in &components {
                    // D^dag u up to a final diagonal phase, which parity ignores
                    let rotated = DVector::from_fn(n, |m, _| u[m] * C64::from_polar(1.0, -theta * m as f64));
                    let mut b = &v_adj * rotated;
                    for (k, bk) in b.iter_mut().enumerate() {
                        *bk *= C64::from_polar(1.0, r * self.eigenvalues[k]);
                    }
                    let d = &self.eigenvectors * b;
                    let parity: f64 = d
                        .iter()
                        .enumerate()
                        .map(|(m, x)| if m % 2 == 0 { x.norm_sqr() } else { -x.norm_sqr() })
                        .sum();
                    acc += w * parity;
                }
                Ok(2.0 / PI * acc)
            })
            .collect()
    }
}

/// Largest coherent amplitude needed to evaluate displaced-parity values
/// of a state with the given amplitudes at the given phase-space points.
pub fn oracle_amplitude_bound(amplitudes: &[C64], points: &[C64]) -> f64 {
    let mut m = amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
    for g in points {
        m = m.max(g.norm());
        for a in amplitudes {
            m = m.max((a - g).norm());
        }
    }
    m
}
