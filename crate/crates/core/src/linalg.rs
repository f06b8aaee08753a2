// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense kernels for 2×2 and 4×4 complex matrices.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{QmapError, Result};
use crate::tol;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const MAX_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_gap<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Kronecker product of two 2×2 matrices; the first factor is the high index.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, k| a[(r / 2, k / 2)] * b[(r % 2, k % 2)])
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<const N: usize> {
    /// Sorted in descending order.
    pub values: SVector<f64, N>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: SMatrix<C64, N, N>,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    /// Rebuilds `Σ f(λᵢ) vᵢvᵢ†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SMatrix<C64, N, N> {
        let mut out = SMatrix::<C64, N, N>::zeros();
        for i in 0..N {
            let w = f(self.values[i]);
            if w != 0.0 {
                let v = self.vectors.column(i);
                out += v * v.adjoint() * C64::from(w);
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `h[p][q]`, then applies
/// the real symmetric Jacobi rotation that zeroes it. Pivots are visited in
/// row-major order so the result is bit-reproducible.
pub fn hermitian_eig<const N: usize>(h: &SMatrix<C64, N, N>) -> Result<HermitianEigen<N>> {
    let gap = hermiticity_gap(h);
    if !(gap <= tol::ALGEBRAIC) {
        return Err(QmapError::invalid(format!(
            "matrix is not Hermitian (‖h − h†‖ = {gap:.3e})"
        )));
    }
    let mut a = (h + h.adjoint()) * C64::from(0.5);
    let mut v = SMatrix::<C64, N, N>::identity();
    let scale = a.norm().max(1.0);

    let off_norm = |a: &SMatrix<C64, N, N>| {
        let mut s = 0.0;
        for p in 0..N {
            for q in 0..N {
                if p != q {
                    s += a[(p, q)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= tol::JACOBI * scale {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;

                let mut g = SMatrix::<C64, N, N>::identity();
                g[(p, p)] = C64::from(cs);
                g[(p, q)] = C64::from(sn);
                g[(q, p)] = -phase.conj() * sn;
                g[(q, q)] = phase.conj() * cs;

                a = g.adjoint() * a * g;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..N {
                    a[(k, k)].im = 0.0;
                }
                v *= g;
            }
        }
    }
    if !converged && off_norm(&a) > tol::JACOBI * scale {
        return Err(QmapError::Numerical(
            "Jacobi eigensolver did not converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])].re);
    let vectors = SMatrix::<C64, N, N>::from_fn(|r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Principal square root of a positive semidefinite 2×2 matrix; small negative
/// eigenvalues from round-off are clipped to zero.
pub fn psd_sqrt(h: &Mat2) -> Result<Mat2> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_values(|l| l.max(0.0).sqrt()))
}

/// Moore–Penrose pseudo-inverse of `√h` for positive semidefinite `h`.
/// Eigenvalues at or below `cutoff` are treated as zero.
pub fn psd_pinv_sqrt(h: &Mat2, cutoff: f64) -> Result<Mat2> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_values(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 }))
}
