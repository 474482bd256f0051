//! Nonnegative multiplicative update rules for each model variant.
//!
//! All rules scale factor entries by a ratio of nonnegative terms, so
//! nonnegativity is preserved by construction. Every denominator carries an
//! additive `eps` guard. The Y rule of the full model splits the Laplacian
//! as `L = D − S`: `λSY` joins the numerator and `λDY` the denominator,
//! which keeps both sides nonnegative; the unsplit form that carries `λLY`
//! on both sides is available for comparison via [`YUpdateRule::Unsplit`].

use ndarray::{Array2, Zip};

use crate::error::Result;
use crate::graph::SparseAdjacency;

use super::factor::FactorPair;
use super::objective::check_pair;
use super::solve::YUpdateRule;

/// Entrywise `base ∘ num / (den + eps)`.
fn multiplicative(
    base: &Array2<f64>,
    num: &Array2<f64>,
    den: &Array2<f64>,
    eps: f64,
) -> Array2<f64> {
    let mut out = base.clone();
    Zip::from(&mut out)
        .and(num)
        .and(den)
        .for_each(|o, &n, &d| {
            *o *= n / (d + eps);
        });
    out
}

/// One alternating step of the plain two-factor rule:
/// `x ← x (AY)/(XYᵀY)`, then `y ← y (AᵀX)/(YXᵀX)` with the fresh X.
pub fn update_nmf(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    eps: f64,
) -> Result<FactorPair> {
    check_pair("update_nmf", a, x, y)?;
    let num = a.spmm(y)?;
    let den = x.dot(&y.t().dot(y));
    let x_new = multiplicative(x, &num, &den, eps);
    let num = a.spmm(&x_new)?;
    let den = y.dot(&x_new.t().dot(&x_new));
    let y_new = multiplicative(y, &num, &den, eps);
    Ok(FactorPair { x: x_new, y: y_new })
}

/// Single-factor rule `x ← x (AX)/(XXᵀX)`.
pub fn update_snmf_naive(a: &SparseAdjacency, x: &Array2<f64>, eps: f64) -> Result<Array2<f64>> {
    check_pair("update_snmf_naive", a, x, x)?;
    let num = a.spmm(x)?;
    let den = x.dot(&x.t().dot(x));
    Ok(multiplicative(x, &num, &den, eps))
}

/// Damped single-factor rule `x ← x (0.5 + (AX)/(2XXᵀX))`.
///
/// The multiplier never drops below 0.5, so entries cannot collapse to zero
/// in one step from a positive start.
pub fn update_snmf_adjusted(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    eps: f64,
) -> Result<Array2<f64>> {
    check_pair("update_snmf_adjusted", a, x, x)?;
    let num = a.spmm(x)?;
    let den = x.dot(&x.t().dot(x));
    let mut out = x.clone();
    Zip::from(&mut out)
        .and(&num)
        .and(&den)
        .for_each(|o, &n, &d| {
            *o *= 0.5 + n / (2.0 * d + eps);
        });
    Ok(out)
}

/// One alternating step of the coupled two-factor rule with symmetry and
/// graph terms:
///
/// `x ← x (AY + αY)/(XYᵀY + αX)`, then with the fresh X either
/// `y ← y (AᵀX + αX + λSY)/(YXᵀX + αY + λDY)` (split, the default) or
/// `y ← y (AᵀX + αX + λLY)/(YXᵀX + αY + λLY)` (unsplit).
///
/// With `alpha = 0` this is the graph-regularized rule; with
/// `alpha = lambda = 0` it reduces to [`update_nmf`] exactly (the zero
/// coefficients skip their terms, leaving identical arithmetic).
pub fn update_sgnmf(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
    lambda: f64,
    eps: f64,
    rule: YUpdateRule,
) -> Result<FactorPair> {
    check_pair("update_sgnmf", a, x, y)?;
    let mut num = a.spmm(y)?;
    let mut den = x.dot(&y.t().dot(y));
    if alpha != 0.0 {
        num.scaled_add(alpha, y);
        den.scaled_add(alpha, x);
    }
    let x_new = multiplicative(x, &num, &den, eps);

    let mut num = a.spmm(&x_new)?;
    let mut den = y.dot(&x_new.t().dot(&x_new));
    if alpha != 0.0 {
        num.scaled_add(alpha, &x_new);
        den.scaled_add(alpha, y);
    }
    if lambda != 0.0 {
        match rule {
            YUpdateRule::Split => {
                num.scaled_add(lambda, &a.spmm(y)?);
                den.scaled_add(lambda, &a.scale_rows_by_degree(y)?);
            }
            YUpdateRule::Unsplit => {
                let ly = a.scale_rows_by_degree(y)? - a.spmm(y)?;
                num.scaled_add(lambda, &ly);
                den.scaled_add(lambda, &ly);
            }
        }
    }
    let y_new = multiplicative(y, &num, &den, eps);
    Ok(FactorPair { x: x_new, y: y_new })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    const EPS: f64 = 1e-12;

    fn two_cycle() -> SparseAdjacency {
        SparseAdjacency::from_undirected_edges(2, &[(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn nmf_two_cycle_x_step_halves() {
        let a = two_cycle();
        let x = array![[1.0], [1.0]];
        let pair = update_nmf(&a, &x, &x, EPS).unwrap();
        for &v in pair.x.iter() {
            assert!((v - 0.5).abs() < 1e-12, "got {v}");
        }
    }

    #[test]
    fn snmf_naive_two_cycle_halves() {
        let a = two_cycle();
        let x = array![[1.0], [1.0]];
        let out = update_snmf_naive(&a, &x, EPS).unwrap();
        for &v in out.iter() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn snmf_adjusted_two_cycle_gives_three_quarters() {
        let a = two_cycle();
        let x = array![[1.0], [1.0]];
        let out = update_snmf_adjusted(&a, &x, EPS).unwrap();
        for &v in out.iter() {
            assert!((v - 0.75).abs() < 1e-12, "got {v}");
        }
    }

    #[test]
    fn sgnmf_two_cycle_x_step_hand_value() {
        let a = two_cycle();
        let alpha = 2f64.powi(-8);
        let x = array![[1.0], [1.0]];
        let pair = update_sgnmf(&a, &x, &x, alpha, 0.0, EPS, YUpdateRule::Split).unwrap();
        let expected = (1.0 + alpha) / (2.0 + alpha); // = 257/513 ≈ 0.500975
        for &v in pair.x.iter() {
            assert!((v - expected).abs() < 1e-9, "got {v}, want {expected}");
        }
    }

    #[test]
    fn stationary_point_is_a_fixed_point() {
        // x = y = 2^(-1/2)·[1,1] satisfies the first-order conditions on the
        // 2-cycle for every alpha and lambda (LY = 0 on a constant column).
        let a = two_cycle();
        let c = 0.5f64.sqrt();
        let x = array![[c], [c]];
        let pair = update_sgnmf(&a, &x, &x, 0.25, 2.0, EPS, YUpdateRule::Split).unwrap();
        for &v in pair.x.iter().chain(pair.y.iter()) {
            assert!((v - c).abs() < 1e-11, "moved from {c} to {v}");
        }
        let pair = update_nmf(&a, &x, &x, EPS).unwrap();
        for &v in pair.x.iter().chain(pair.y.iter()) {
            assert!((v - c).abs() < 1e-11);
        }
        let naive = update_snmf_naive(&a, &x, EPS).unwrap();
        let adjusted = update_snmf_adjusted(&a, &x, EPS).unwrap();
        for &v in naive.iter().chain(adjusted.iter()) {
            assert!((v - c).abs() < 1e-11);
        }
    }

    #[test]
    fn adjusted_multiplier_never_collapses_an_entry() {
        // the 0.5 + r/2 form keeps the multiplier at least one half
        let a = SparseAdjacency::from_undirected_edges(3, &[(0, 1, 1.0)]).unwrap();
        let x = array![[0.4], [0.3], [0.9]]; // node 2 is isolated: (AX) row is 0
        let out = update_snmf_adjusted(&a, &x, EPS).unwrap();
        for (o, i) in out.iter().zip(x.iter()) {
            assert!(*o >= 0.5 * i, "{o} < half of {i}");
        }
    }

    #[test]
    fn nonnegativity_preserved_from_positive_input() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 10;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.4 {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let a = SparseAdjacency::from_undirected_edges(n, &edges).unwrap();
        let x = Array2::from_shape_fn((n, 3), |_| rng.random::<f64>() + 1e-3);
        let y = Array2::from_shape_fn((n, 3), |_| rng.random::<f64>() + 1e-3);
        let pair = update_sgnmf(&a, &x, &y, 0.1, 5.0, EPS, YUpdateRule::Split).unwrap();
        for &v in pair.x.iter().chain(pair.y.iter()) {
            assert!(v >= 0.0);
        }
        let pair = update_nmf(&a, &x, &y, EPS).unwrap();
        for &v in pair.x.iter().chain(pair.y.iter()) {
            assert!(v >= 0.0);
        }
    }
}
