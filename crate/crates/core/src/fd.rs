//! Central finite-difference stencils.

use nalgebra::{DMatrix, DVector};

use crate::linalg::VecN;

/// Weights `c_k`, `k = -p..=p`, of the central stencil for the `order`-th
/// derivative with truncation error `O(h^accuracy)`:
/// `f^(m)(x) ≈ sum_k c_k f(x + k h) / h^m`. `accuracy` must be even.
pub fn central_weights(order: usize, accuracy: usize) -> Vec<f64> {
    assert!(order >= 1, "derivative order must be positive");
    assert!(accuracy >= 2 && accuracy.is_multiple_of(2), "accuracy must be even");
    let p = order.div_ceil(2) + accuracy / 2 - 1;
    let n = 2 * p + 1;
    let mut vander = DMatrix::zeros(n, n);
    for row in 0..n {
        for (col, k) in (-(p as i64)..=p as i64).enumerate() {
            vander[(row, col)] = (k as f64).powi(row as i32);
        }
    }
    let mut rhs = DVector::zeros(n);
    rhs[order] = (1..=order).map(|i| i as f64).product::<f64>();
    let sol = vander.lu().solve(&rhs).expect("Vandermonde system is nonsingular");
    sol.iter().copied().collect()
}

/// `order`-th derivative of a scalar function at `x`.
pub fn derivative(f: &dyn Fn(f64) -> f64, x: f64, order: usize, accuracy: usize, h: f64) -> f64 {
    let w = central_weights(order, accuracy);
    let p = (w.len() / 2) as i64;
    let sum: f64 = w
        .iter()
        .zip(-p..=p)
        .filter(|(c, _)| **c != 0.0)
        .map(|(c, k)| c * f(x + k as f64 * h))
        .sum();
    sum / h.powi(order as i32)
}

/// First partial derivative of a vector-valued map of several parameters.
pub fn partial(f: &dyn Fn(&[f64]) -> VecN, u: &[f64], axis: usize, h: f64) -> VecN {
    let mut up = u.to_vec();
    let mut dn = u.to_vec();
    up[axis] += h;
    dn[axis] -= h;
    (f(&up) - f(&dn)) / (2.0 * h)
}

/// Second partial derivative `∂_i ∂_j f`.
pub fn second_partial(f: &dyn Fn(&[f64]) -> VecN, u: &[f64], i: usize, j: usize, h: f64) -> VecN {
    if i == j {
        let mut up = u.to_vec();
        let mut dn = u.to_vec();
        up[i] += h;
        dn[i] -= h;
        return (f(&up) - f(u) * 2.0 + f(&dn)) / (h * h);
    }
    let shifted = |si: f64, sj: f64| {
        let mut v = u.to_vec();
        v[i] += si * h;
        v[j] += sj * h;
        f(&v)
    };
    (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0) + shifted(-1.0, -1.0)) / (4.0 * h * h)
}
