//! Eigendecomposition, heat kernels and diffusion distances.
//!
//! Heat kernels of symmetric Laplacians go through the eigendecomposition,
//! which is computed once and reused across time samples. The general
//! exponential in [`expm`] is kept for the non-symmetric block matrices.

pub mod expm;

use nalgebra::{DMatrix, DVector};

use crate::error::{HkcError, Result};
use crate::graph::{max_abs, max_asymmetry, LaplacianMatrix};

pub use expm::{frechet_block, matrix_exponential};

/// Orthonormal eigenvectors (columns) and ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl SpectralDecomposition {
    /// Decomposes a symmetric matrix. Asymmetry above `1e-10 * max|entry|` is
    /// an error.
    pub fn of_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(HkcError::DimensionMismatch(format!(
                "eigendecomposition of a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = max_asymmetry(m);
        if asym > 1e-10 * max_abs(m) {
            return Err(HkcError::NotSymmetric { asymmetry: asym });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(HkcError::NonFiniteMatrix);
        }
        let sym = (m + m.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();

        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let eigenvectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        Ok(SpectralDecomposition {
            eigenvectors,
            eigenvalues,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `Φ diag(λ) Φᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply_spectral(|l| l)
    }

    fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        &scaled * self.eigenvectors.transpose()
    }
}

/// Eigendecomposition of a Laplacian with eigenvalues in ascending order.
pub fn eigendecompose(l: &LaplacianMatrix) -> Result<SpectralDecomposition> {
    SpectralDecomposition::of_symmetric(l.as_matrix())
}

/// Heat operator `e^{-tL}` at a fixed time.
#[derive(Debug, Clone)]
pub struct HeatKernelMatrix {
    matrix: DMatrix<f64>,
    time: f64,
}

impl HeatKernelMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Heat equation solution `f(t) = H^t f0`.
    pub fn apply(&self, f0: &DVector<f64>) -> Result<DVector<f64>> {
        if f0.len() != self.matrix.nrows() {
            return Err(HkcError::DimensionMismatch(format!(
                "initial condition of length {} for {} vertices",
                f0.len(),
                self.matrix.nrows()
            )));
        }
        Ok(&self.matrix * f0)
    }
}

fn check_time(t: f64, strictly_positive: bool) -> Result<()> {
    if !t.is_finite() || t < 0.0 || (strictly_positive && t == 0.0) {
        return Err(HkcError::InvalidTime(t));
    }
    Ok(())
}

/// `Φ e^{-tΛ} Φᵀ`, symmetrized.
pub fn heat_kernel(dec: &SpectralDecomposition, t: f64) -> Result<HeatKernelMatrix> {
    check_time(t, false)?;
    let h = dec.apply_spectral(|l| (-t * l).exp());
    let matrix = (&h + h.transpose()) * 0.5;
    Ok(HeatKernelMatrix { matrix, time: t })
}

/// All-pairs diffusion distances from the spectral embedding
/// `x_p -> (e^{-tλ_i} φ_{pi})_i`.
pub fn diffusion_distance_matrix(dec: &SpectralDecomposition, t: f64) -> Result<DMatrix<f64>> {
    check_time(t, true)?;
    let n = dec.n();
    let decay: Vec<f64> = dec.eigenvalues.iter().map(|&l| (-t * l).exp()).collect();
    // row p of `emb` is the embedding of vertex p
    let mut emb = dec.eigenvectors.clone();
    for (k, mut col) in emb.column_iter_mut().enumerate() {
        col *= decay[k];
    }
    Ok(pairwise_row_distances(&emb, n))
}

/// All-pairs diffusion distances as Euclidean distances between rows of a
/// heat kernel.
pub fn diffusion_distance_from_kernel(h: &HeatKernelMatrix) -> DMatrix<f64> {
    pairwise_row_distances(&h.matrix, h.matrix.nrows())
}

fn pairwise_row_distances(rows: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let cols = rows.ncols();
    let mut d = DMatrix::zeros(n, n);
    for p in 0..n {
        for q in (p + 1)..n {
            let mut s = 0.0;
            for i in 0..cols {
                let diff = rows[(p, i)] - rows[(q, i)];
                s += diff * diff;
            }
            let v = s.sqrt();
            d[(p, q)] = v;
            d[(q, p)] = v;
        }
    }
    d
}

/// Divided differences of `λ -> e^{-tλ}` over all eigenvalue pairs.
///
/// Entry `(a, b)` is `(e^{-tλ_a} - e^{-tλ_b}) / (λ_a - λ_b)`, with the
/// derivative `-t e^{-tλ_a}` on (near-)coincident pairs. `expm1` keeps the
/// quotient accurate for close eigenvalues.
pub fn heat_divided_differences(dec: &SpectralDecomposition, t: f64) -> DMatrix<f64> {
    let lam = &dec.eigenvalues;
    let n = lam.len();
    DMatrix::from_fn(n, n, |a, b| {
        let (lo, hi) = if lam[a] <= lam[b] {
            (lam[a], lam[b])
        } else {
            (lam[b], lam[a])
        };
        let delta = hi - lo;
        let base = (-t * lo).exp();
        if delta * t < 1e-300 {
            -t * base
        } else {
            base * (-t * delta).exp_m1() / delta
        }
    })
}

/// Fréchet derivative of `X -> e^{-tX}` at the decomposed matrix along a
/// symmetric direction, via `Φ (Γ ∘ ΦᵀEΦ) Φᵀ` with `Γ` the divided
/// differences. Independent of the block-exponential route.
pub fn heat_kernel_derivative(
    dec: &SpectralDecomposition,
    direction: &DMatrix<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    let n = dec.n();
    if direction.shape() != (n, n) {
        return Err(HkcError::DimensionMismatch(format!(
            "direction {}x{} for n = {n}",
            direction.nrows(),
            direction.ncols()
        )));
    }
    check_time(t, false)?;
    let gamma = heat_divided_differences(dec, t);
    Ok(sandwich_hadamard(dec, direction, &gamma))
}

/// `Φ (Γ ∘ (Φᵀ M Φ)) Φᵀ`.
pub(crate) fn sandwich_hadamard(
    dec: &SpectralDecomposition,
    m: &DMatrix<f64>,
    gamma: &DMatrix<f64>,
) -> DMatrix<f64> {
    let phi = &dec.eigenvectors;
    let inner = phi.transpose() * m * phi;
    let weighted = inner.component_mul(gamma);
    phi * weighted * phi.transpose()
}
