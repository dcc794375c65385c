//! Dense matrix exponential and its Fréchet derivative.
//!
//! `matrix_exponential` uses scaling and squaring with the [13/13] diagonal
//! Padé approximant. The matrix is scaled so that its 1-norm is at most 0.5,
//! which keeps the rational approximant far inside its accuracy region.

use nalgebra::DMatrix;

use crate::error::{HkcError, Result};

/// 1-norm bound after scaling.
const SCALED_NORM_BOUND: f64 = 0.5;

/// Numerator coefficients of the [13/13] Padé approximant of `exp`.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` for a square matrix with finite entries.
pub fn matrix_exponential(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(HkcError::DimensionMismatch(format!(
            "exponential of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(HkcError::NonFiniteMatrix);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }

    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM_BOUND {
        (norm / SCALED_NORM_BOUND).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-squarings);

    let mut result = pade13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

fn pade13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let b = &PADE13;
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).ok_or(HkcError::SingularMatrix)
}

/// Directional derivative of `X -> e^{-tX}` at `L` along `direction`.
///
/// Exponentiates the block matrix `[[-tL, -tE], [0, -tL]]` and returns its
/// upper-right `n x n` block.
pub fn frechet_block(l: &DMatrix<f64>, direction: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let n = l.nrows();
    if !l.is_square() || direction.shape() != (n, n) {
        return Err(HkcError::DimensionMismatch(format!(
            "Laplacian {}x{} with direction {}x{}",
            l.nrows(),
            l.ncols(),
            direction.nrows(),
            direction.ncols()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(HkcError::InvalidTime(t));
    }
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(l * -t));
    block.view_mut((n, n), (n, n)).copy_from(&(l * -t));
    block.view_mut((0, n), (n, n)).copy_from(&(direction * -t));
    let e = matrix_exponential(&block)?;
    Ok(e.view((0, n), (n, n)).into_owned())
}
