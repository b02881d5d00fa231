// SPDX-License-Identifier: Apache-2.0

//! Orthonormal recasting of entangled coherent states and concurrence.
//!
//! Linearly independent coherent states `|a_1>, ..., |a_d>` are
//! Gram-Schmidt orthonormalised in order, so `|a_1>` is the first basis
//! vector. Coordinates come from the Cholesky factor of the Gram matrix:
//! with `G = R^dag R` (`R` upper triangular) the k-th coherent state is
//! `sum_i R[i,k] |e_i>`.

use nalgebra::{Cholesky, DMatrix, Matrix4, SymmetricEigen};
use serde::Serialize;

use crate::coherent::{overlap, TwoModeEcs};
use crate::{ensure_finite_real, Error, Result, C64};

/// Gram determinant below which a set of coherent states is treated as dependent.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-14;

/// `1 - |<a|b>|^2` below this marks a nearly degenerate pair.
pub const NEAR_DEGENERATE: f64 = 1e-3;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitBasisData {
    /// `<alpha|beta>`
    pub p1: C64,
    /// `sqrt(1 - |p1|^2)`
    pub n1: f64,
    pub near_degenerate: bool,
}

/// Basis `|0> = |alpha>`, `|1> = (|beta> - p1 |alpha>) / n1`.
pub fn qubit_basis(alpha: C64, beta: C64) -> Result<QubitBasisData> {
    let p1 = overlap(alpha, beta);
    let gap = 1.0 - p1.norm_sqr();
    if gap.is_nan() || gap <= INDEPENDENCE_THRESHOLD {
        return Err(Error::LinearlyDependent {
            which: "alpha, beta".into(),
        });
    }
    Ok(QubitBasisData {
        p1,
        n1: gap.sqrt(),
        near_degenerate: gap < NEAR_DEGENERATE,
    })
}

impl QubitBasisData {
    /// Columns are the coordinates of `|alpha>` and `|beta>`.
    pub fn coordinates(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), self.p1, ZERO, C64::new(self.n1, 0.0)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QutritBasisData {
    /// `<alpha|beta>`
    pub p1: C64,
    /// `<gamma|beta>`
    pub p2: C64,
    /// `<gamma|alpha>`
    pub p3: C64,
    /// `<1|gamma> = -x n1`; equals `(p1 p3 - p2) / (1 - p1^2)` for real amplitudes.
    pub x: C64,
    pub n1: f64,
    pub n2: f64,
    pub near_degenerate: bool,
}

/// Three-vector basis: `|0> = |alpha>`, `|1>` from `|beta>`, `|2>` from `|gamma>`.
pub fn qutrit_basis(alpha: C64, beta: C64, gamma: C64) -> Result<QutritBasisData> {
    let pairs = [
        ("alpha, beta", alpha, beta),
        ("alpha, gamma", alpha, gamma),
        ("beta, gamma", beta, gamma),
    ];
    let mut near_degenerate = false;
    for (name, a, b) in pairs {
        let gap = 1.0 - overlap(a, b).norm_sqr();
        if gap.is_nan() || gap <= INDEPENDENCE_THRESHOLD {
            return Err(Error::LinearlyDependent { which: name.into() });
        }
        near_degenerate |= gap < NEAR_DEGENERATE;
    }
    let amps = [alpha, beta, gamma];
    if gram_matrix(&amps).determinant().re <= INDEPENDENCE_THRESHOLD {
        return Err(Error::LinearlyDependent {
            which: "alpha, beta, gamma".into(),
        });
    }
    let p1 = overlap(alpha, beta);
    let p2 = overlap(gamma, beta);
    let p3 = overlap(gamma, alpha);
    let n1 = (1.0 - p1.norm_sqr()).sqrt();
    // <1|gamma> = (<beta|gamma> - p1^* <alpha|gamma>) / n1
    let one_gamma = (p2.conj() - p1.conj() * p3.conj()) / n1;
    let r2 = 1.0 - p3.norm_sqr() - one_gamma.norm_sqr();
    Ok(QutritBasisData {
        p1,
        p2,
        p3,
        x: -one_gamma / n1,
        n1,
        n2: r2.max(0.0).sqrt(),
        near_degenerate,
    })
}

impl QutritBasisData {
    /// Columns are the coordinates of `|alpha>`, `|beta>`, `|gamma>`.
    pub fn coordinates(&self) -> DMatrix<C64> {
        let c = |x: f64| C64::new(x, 0.0);
        DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0),
                self.p1,
                self.p3.conj(),
                ZERO,
                c(self.n1),
                -self.x * self.n1,
                ZERO,
                ZERO,
                c(self.n2),
            ],
        )
    }
}

/// `G[i,j] = <a_i|a_j>`
pub fn gram_matrix(amps: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(amps.len(), amps.len(), |i, j| overlap(amps[i], amps[j]))
}

/// Coordinates (columns) of the coherent states in their Gram-Schmidt basis.
pub fn coherent_coordinates(amps: &[C64]) -> Result<DMatrix<C64>> {
    let g = gram_matrix(amps);
    if amps.len() > 1 && g.determinant().re <= INDEPENDENCE_THRESHOLD {
        return Err(Error::LinearlyDependent {
            which: format!("{} coherent amplitudes", amps.len()),
        });
    }
    let chol = Cholesky::new(g).ok_or_else(|| Error::LinearlyDependent {
        which: format!("{} coherent amplitudes", amps.len()),
    })?;
    Ok(chol.l().adjoint())
}

/// `a[i,j]` in `|psi> = sum_ij a[i,j] |e_i>|f_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix(DMatrix<C64>);

impl AmplitudeMatrix {
    pub fn new(entries: DMatrix<C64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let (r, c) = self.dims();
        r == c && (0..r).all(|i| (0..c).all(|j| (self.0[(i, j)] - self.0[(j, i)]).norm() <= tol))
    }

    /// Density matrix of the pure state, composite index `i * d2 + j`.
    pub fn pure_density(&self) -> DMatrix<C64> {
        let v = DMatrix::from_iterator(self.0.len(), 1, self.0.transpose().iter().copied());
        &v * v.adjoint()
    }
}

fn state_amplitudes(state: &TwoModeEcs) -> (Vec<C64>, Vec<C64>) {
    (state.mode1_amplitudes(), state.mode2_amplitudes())
}

fn index_of(amps: &[C64], a: C64) -> usize {
    amps.iter()
        .position(|&x| (x - a).norm() < crate::coherent::MERGE_TOLERANCE)
        .expect("amplitude taken from the same state")
}

/// Amplitude matrix of any two-mode coherent-term state, using the distinct
/// amplitudes of each mode (in order of first appearance) as Gram-Schmidt inputs.
pub fn recast(state: &TwoModeEcs) -> Result<AmplitudeMatrix> {
    let (a1, a2) = state_amplitudes(state);
    let r1 = coherent_coordinates(&a1)?;
    let r2 = coherent_coordinates(&a2)?;
    let mut m = DMatrix::from_element(a1.len(), a2.len(), ZERO);
    for t in state.terms() {
        let i = index_of(&a1, t.amp1);
        let j = index_of(&a2, t.amp2);
        for k in 0..a1.len() {
            for l in 0..a2.len() {
                m[(k, l)] += t.coeff * r1[(k, i)] * r2[(l, j)];
            }
        }
    }
    Ok(AmplitudeMatrix(m))
}

fn recast_with_dim(state: &TwoModeEcs, dim: usize) -> Result<AmplitudeMatrix> {
    let (a1, a2) = state_amplitudes(state);
    for found in [a1.len(), a2.len()] {
        if found != dim {
            return Err(Error::WrongSubspaceDimension { expected: dim, found });
        }
    }
    recast(state)
}

/// Two-qubit form of a state over two distinct coherent amplitudes per mode.
pub fn recast_qubit(state: &TwoModeEcs) -> Result<AmplitudeMatrix> {
    let (a1, a2) = state_amplitudes(state);
    if a1.len() == 2 {
        qubit_basis(a1[0], a1[1])?;
    }
    if a2.len() == 2 {
        qubit_basis(a2[0], a2[1])?;
    }
    recast_with_dim(state, 2)
}

/// Two-qutrit form of a state over three distinct coherent amplitudes per mode.
pub fn recast_qutrit(state: &TwoModeEcs) -> Result<AmplitudeMatrix> {
    let (a1, a2) = state_amplitudes(state);
    if a1.len() == 3 {
        qutrit_basis(a1[0], a1[1], a1[2])?;
    }
    if a2.len() == 3 {
        qutrit_basis(a2[0], a2[1], a2[2])?;
    }
    recast_with_dim(state, 3)
}

fn check_unit(a: &AmplitudeMatrix) -> Result<()> {
    let n = a.frobenius_norm();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::NotPhysical(format!("amplitude matrix has Frobenius norm {n}")));
    }
    Ok(())
}

/// `2 |a00 a11 - a01 a10|`
pub fn concurrence_pure_2x2(a: &AmplitudeMatrix) -> Result<f64> {
    if a.dims() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: a.0.len(),
        });
    }
    check_unit(a)?;
    let m = &a.0;
    Ok(2.0 * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm())
}

/// `2 sqrt(sum over all 2x2 minors |a_ik a_jl - a_il a_jk|^2)`
pub fn concurrence_vector_norm(a: &AmplitudeMatrix) -> Result<f64> {
    check_unit(a)?;
    let m = &a.0;
    let (d1, d2) = a.dims();
    let mut acc = 0.0;
    for i in 0..d1 {
        for j in i + 1..d1 {
            for k in 0..d2 {
                for l in k + 1..d2 {
                    acc += (m[(i, k)] * m[(j, l)] - m[(i, l)] * m[(j, k)]).norm_sqr();
                }
            }
        }
    }
    Ok(2.0 * acc.sqrt())
}

/// Concurrence of the balanced, equal-weight qubit ECS with separation `delta`.
pub fn concurrence_closed_qubit(delta: f64) -> Result<f64> {
    ensure_finite_real(delta, "delta")?;
    if delta < 0.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "separation must be non-negative",
        });
    }
    // (1 - e^{-d^2}) / (1 + e^{-d^2})
    Ok((0.5 * delta * delta).tanh())
}

/// Pairwise separations of three real amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationParams {
    /// `|alpha - beta|`
    pub d1: f64,
    /// `|alpha - gamma|`
    pub d2: f64,
    /// `|beta - gamma|`
    pub d3: f64,
}

impl SeparationParams {
    pub fn new(d1: f64, d2: f64, d3: f64) -> Result<Self> {
        for (name, v) in [("d1", d1), ("d2", d2), ("d3", d3)] {
            ensure_finite_real(v, name)?;
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "separation",
                    value: v,
                    reason: "separations must be non-negative",
                });
            }
        }
        Ok(Self { d1, d2, d3 })
    }

    pub fn from_amplitudes(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new((alpha - beta).abs(), (alpha - gamma).abs(), (beta - gamma).abs())
    }

    pub fn satisfies_triangle(&self, tol: f64) -> bool {
        let [a, b, c] = [self.d1, self.d2, self.d3];
        a <= b + c + tol && b <= a + c + tol && c <= a + b + tol
    }
}

/// Concurrence-vector norm of the balanced, equal-weight qutrit ECS.
pub fn concurrence_closed_qutrit(sep: SeparationParams) -> f64 {
    let (s1, s2, s3) = (sep.d1 * sep.d1, sep.d2 * sep.d2, sep.d3 * sep.d3);
    let e = |x: f64| (-x).exp();
    let radicand = 3.0 + e(2.0 * s1) + e(2.0 * s2) + e(2.0 * s3) + 2.0 * e(s2 + s3) - 12.0 * e((s1 + s2 + s3) / 2.0)
        + 2.0 * e(s1) * (e(s2) + e(s3));
    let denominator = (3.0 + 2.0 * e(s1) + 2.0 * e(s2) + 2.0 * e(s3)) / 2.0;
    radicand.max(0.0).sqrt() / denominator
}

/// `sigma_y ⊗ sigma_y` in the basis `|00>, |01>, |10>, |11>`.
fn spin_flip() -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    let one = C64::new(1.0, 0.0);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// With `rho = W W^dag` from the eigendecomposition, the values `lambda_i`
/// are the singular values of `tau = W^T (sigma_y ⊗ sigma_y) W`; their
/// squares are the eigenvalues of `rho rho~`. Working with `tau` avoids
/// square roots of eigenvalues that vanish only up to rounding.
pub fn concurrence_wootters(rho: &Matrix4<C64>) -> Result<f64> {
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { what: "density matrix" });
    }
    if (rho - rho.adjoint()).iter().any(|z| z.norm() > 1e-9) {
        return Err(Error::NotPhysical("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::TraceDeviation { trace: tr.re });
    }
    let hermitian = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(hermitian);
    let min_ev = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_ev < -1e-9 {
        return Err(Error::NotPhysical(format!("negative eigenvalue {min_ev}")));
    }
    let mut factor = eig.eigenvectors;
    for (mut col, &ev) in factor.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= C64::new(ev.max(0.0).sqrt(), 0.0);
    }
    let tau = factor.transpose() * spin_flip() * factor;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Pure-state projector of a 2x2 amplitude matrix as a 4x4 density matrix.
pub fn pure_two_qubit_density(a: &AmplitudeMatrix) -> Result<Matrix4<C64>> {
    if a.dims() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: a.0.len(),
        });
    }
    Ok(Matrix4::from_fn(|i, j| a.pure_density()[(i, j)]))
}
