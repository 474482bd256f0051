//! Objective values and analytic gradients.
//!
//! The data-fit term `½‖XYᵀ − A‖²_F` is evaluated through the expansion
//! `Tr((XᵀX)(YᵀY)) − 2⟨X, AY⟩ + ‖A‖²_F`, which never materializes the dense
//! `n×n` product and costs `O(nK² + |E|K)`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::SparseAdjacency;

fn check_shape(
    context: &'static str,
    a: &SparseAdjacency,
    m: &Array2<f64>,
    k: usize,
) -> Result<()> {
    if m.nrows() != a.n() || m.ncols() != k {
        return Err(Error::DimensionMismatch {
            context,
            expected: (a.n(), k),
            got: (m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

pub(super) fn check_pair(
    context: &'static str,
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
) -> Result<()> {
    check_shape(context, a, x, x.ncols())?;
    check_shape(context, a, y, x.ncols())
}

/// `‖XYᵀ − A‖²_F` without the ½ factor, via the trace expansion.
pub(crate) fn residual_sq(a: &SparseAdjacency, x: &Array2<f64>, y: &Array2<f64>) -> Result<f64> {
    check_pair("residual", a, x, y)?;
    let gram_x = x.t().dot(x);
    let gram_y = y.t().dot(y);
    let tr_gram = gram_x
        .iter()
        .zip(gram_y.iter())
        .map(|(p, q)| p * q)
        .sum::<f64>();
    let ay = a.spmm(y)?;
    let cross: f64 = x.iter().zip(ay.iter()).map(|(p, q)| p * q).sum();
    Ok(tr_gram - 2.0 * cross + a.frobenius_sq())
}

/// Full objective: `½‖XYᵀ−A‖²_F + (α/2)‖X−Y‖²_F + (λ/2)Tr(YᵀLY)`.
pub fn objective_sgnmf(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
    lambda: f64,
) -> Result<f64> {
    let fit = 0.5 * residual_sq(a, x, y)?;
    let sym = if alpha != 0.0 {
        let diff_sq: f64 = x.iter().zip(y.iter()).map(|(p, q)| (p - q) * (p - q)).sum();
        0.5 * alpha * diff_sq
    } else {
        0.0
    };
    let graph = if lambda != 0.0 {
        0.5 * lambda * a.laplacian_quadratic(y)?
    } else {
        0.0
    };
    Ok(fit + sym + graph)
}

/// Gradient in X: `XYᵀY − AY + αX − αY`.
pub fn grad_x(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
) -> Result<Array2<f64>> {
    check_pair("grad_x", a, x, y)?;
    let gram_y = y.t().dot(y);
    let mut g = x.dot(&gram_y) - a.spmm(y)?;
    if alpha != 0.0 {
        g.scaled_add(alpha, x);
        g.scaled_add(-alpha, y);
    }
    Ok(g)
}

/// Gradient in Y: `YXᵀX − AᵀX − αX + αY + λLY`, with `LY = DY − SY`.
pub fn grad_y(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
    lambda: f64,
) -> Result<Array2<f64>> {
    check_pair("grad_y", a, x, y)?;
    let gram_x = x.t().dot(x);
    let mut g = y.dot(&gram_x) - a.spmm(x)?;
    if alpha != 0.0 {
        g.scaled_add(-alpha, x);
        g.scaled_add(alpha, y);
    }
    if lambda != 0.0 {
        let ly = a.scale_rows_by_degree(y)? - a.spmm(y)?;
        g.scaled_add(lambda, &ly);
    }
    Ok(g)
}

/// Complementarity residual `max(|min(x, ∇_X)|, |min(y, ∇_Y)|)` over entries.
///
/// Zero exactly at a first-order stationary point of the nonnegativity-
/// constrained problem: wherever a factor entry is positive its gradient
/// component must vanish, and wherever the gradient is positive the entry
/// must sit on the boundary.
pub fn kkt_residual(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
    lambda: f64,
) -> Result<f64> {
    let gx = grad_x(a, x, y, alpha)?;
    let gy = grad_y(a, x, y, alpha, lambda)?;
    let worst = |m: &Array2<f64>, g: &Array2<f64>| {
        m.iter()
            .zip(g.iter())
            .map(|(&v, &d)| v.min(d).abs())
            .fold(0.0f64, f64::max)
    };
    Ok(worst(x, &gx).max(worst(y, &gy)))
}
