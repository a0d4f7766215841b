//! Jacobi polynomials by the explicit binomial sum
//!
//! `P_d^{(α,β)}(x) = 2^{-d} Σ_i C(α+d, i) C(β+d, d-i) (x+1)^i (x-1)^{d-i}`.

use crate::error::{Error, Result};

/// Binomial coefficient as a float; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub fn jacobi_poly(d: i32, alpha: i32, beta: i32, x: f64) -> Result<f64> {
    if d < 0 || alpha < 0 || beta < 0 {
        return Err(Error::InvalidArgument(format!(
            "Jacobi polynomial needs d, alpha, beta >= 0 (got {d}, {alpha}, {beta})"
        )));
    }
    Ok(jacobi_sum(d as u32, alpha as u32, beta as u32, x))
}

pub(crate) fn jacobi_sum(d: u32, alpha: u32, beta: u32, x: f64) -> f64 {
    let xp = x + 1.0;
    let xm = x - 1.0;
    let mut acc = 0.0;
    for i in 0..=d {
        acc += binomial(alpha + d, i)
            * binomial(beta + d, d - i)
            * xp.powi(i as i32)
            * xm.powi((d - i) as i32);
    }
    acc / 2f64.powi(d as i32)
}

/// `d/dx P_d^{(α,β)} = ((d+α+β+1)/2) P_{d-1}^{(α+1,β+1)}`.
pub fn jacobi_poly_derivative(d: i32, alpha: i32, beta: i32, x: f64) -> Result<f64> {
    jacobi_poly(d, alpha, beta, x)?;
    Ok(jacobi_sum_derivative(
        d as u32,
        alpha as u32,
        beta as u32,
        x,
    ))
}

pub(crate) fn jacobi_sum_derivative(d: u32, alpha: u32, beta: u32, x: f64) -> f64 {
    if d == 0 {
        return 0.0;
    }
    0.5 * (d + alpha + beta + 1) as f64 * jacobi_sum(d - 1, alpha + 1, beta + 1, x)
}
