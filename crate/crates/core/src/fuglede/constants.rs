//! Closed-form constants of the coercivity estimate in `C^2`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `ω_2 = 2π²`.
pub const OMEGA_2: f64 = 2.0 * PI * PI;

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "r must be positive and finite (got {r})"
        )))
    }
}

fn csch_sq(x: f64) -> f64 {
    1.0 / x.sinh().powi(2)
}

/// `c(r) = r(1 + 2cosh r)/(2 sinh r)`, the linear coefficient of the
/// perimeter ratio (n = 2). Equals half the linear coefficient of `M(u)`.
pub fn c0_linear(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(r * (1.0 + 2.0 * r.cosh()) / (2.0 * r.sinh()))
}

/// General-`n` form `r(n - 1 + n cosh r)/(2 sinh r)`.
pub fn c0_linear_n(n: usize, r: f64) -> Result<f64> {
    check_r(r)?;
    let n = n as f64;
    Ok(r * (n - 1.0 + n * r.cosh()) / (2.0 * r.sinh()))
}

/// `c_0(r) = (1/2) r² (2 + cosh r) csch² r`, the weight of the low modes.
pub fn c0_quadratic(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(0.5 * r * r * (2.0 + r.cosh()) * csch_sq(r))
}

/// `K(k; r) = k r² (2k + 7 + 2k cosh r + cosh 2r) csch² r / (4(1 + cosh r)) - c_0(r)`.
///
/// Defined for real `k` so that `H` can be scanned; integer `k >= 2` are the
/// meaningful values.
pub fn k_coefficient(k: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    if !(k >= 2.0) {
        return Err(Error::InvalidArgument(format!("K needs k >= 2 (got {k})")));
    }
    let c = r.cosh();
    let lead = k * r * r * (2.0 * k + 7.0 + 2.0 * k * c + (2.0 * r).cosh()) * csch_sq(r)
        / (4.0 * (1.0 + c));
    Ok(lead - c0_quadratic(r)?)
}

/// The printed closed form `r² csch² r ((1+k)(k-2) + (k-1)cosh r + 4k/(1+cosh r))`.
/// It is exactly `2 K(k; r)`.
pub fn k_coefficient_printed(k: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let c = r.cosh();
    Ok(r * r * csch_sq(r) * ((1.0 + k) * (k - 2.0) + (k - 1.0) * c + 4.0 * k / (1.0 + c)))
}

fn dk_coefficient(k: f64, r: f64) -> f64 {
    let c = r.cosh();
    r * r * (4.0 * k + 7.0 + 4.0 * k * c + (2.0 * r).cosh()) * csch_sq(r) / (4.0 * (1.0 + c))
}

/// `H(k; r) = K(k; r)/(k(k+2) + 1)`.
pub fn h_ratio(k: f64, r: f64) -> Result<f64> {
    Ok(k_coefficient(k, r)? / ((k + 1.0) * (k + 1.0)))
}

/// `H'(k; r) = (K'(k)(k+1) - 2K(k))/(k+1)³`.
pub fn h_ratio_derivative(k: f64, r: f64) -> Result<f64> {
    let kk = k_coefficient(k, r)?;
    Ok((dk_coefficient(k, r) * (k + 1.0) - 2.0 * kk) / (k + 1.0).powi(3))
}

/// Stationary point of `H`: `(1/8)(17 + 12cosh r + 3cosh 2r) csch⁴(r/2)`.
pub fn k_circ(r: f64) -> Result<f64> {
    check_r(r)?;
    let c = r.cosh();
    Ok((7.0 + 6.0 * c + 3.0 * c * c) / ((c - 1.0) * (c - 1.0)))
}

/// `A_0(r) = H(2; r) = (1/288) r² (17 + 2cosh r + cosh 2r) csch²(r/2) sech⁴(r/2)`.
pub fn a0(r: f64) -> Result<f64> {
    check_r(r)?;
    let h = 0.5 * r;
    Ok(r * r * (17.0 + 2.0 * r.cosh() + (2.0 * r).cosh()) * csch_sq(h) / h.cosh().powi(4) / 288.0)
}

/// `A_1(r) = lim_{k→∞} H(k; r) = (1/2) r² csch² r`.
pub fn a1(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(0.5 * r * r * csch_sq(r))
}

/// `A(r0) = min(A_0(r0), A_1(r0))`.
pub fn a_min(r0: f64) -> Result<f64> {
    Ok(a0(r0)?.min(a1(r0)?))
}

/// `B_2 = artanh(2 sqrt(2(√17 - 4)))`, where `A_0 = A_1`.
pub fn b2() -> f64 {
    (2.0 * (2.0 * (17f64.sqrt() - 4.0)).sqrt()).atanh()
}

/// `C(r0) = A(r0)/(2 ω_2)`.
pub fn c_bound(r0: f64) -> Result<f64> {
    Ok(a_min(r0)? / (2.0 * OMEGA_2))
}

/// `c_1(r0) = r0²/(2π² sinh² r0)`.
pub fn c1_bound(r0: f64) -> Result<f64> {
    check_r(r0)?;
    Ok(r0 * r0 / (OMEGA_2 * r0.sinh().powi(2)))
}

/// `g_1(r) = (1/2) r² csch² r`.
pub fn g1(r: f64) -> Result<f64> {
    a1(r)
}

/// `g_2(r) = (1/8) r² tanh²(r/2)(1 - tanh²(r/2))`.
pub fn g2(r: f64) -> Result<f64> {
    check_r(r)?;
    let t = (0.5 * r).tanh();
    Ok(0.125 * r * r * t * t * (1.0 - t * t))
}

/// `M(u) = (sinh((r/2)(1+u))/sinh(r/2))² sinh(r(1+u))/sinh r - 1`.
pub fn m_ratio(r: f64, u: f64) -> Result<f64> {
    check_r(r)?;
    let a = (0.5 * r * (1.0 + u)).sinh() / (0.5 * r).sinh();
    Ok(a * a * (r * (1.0 + u)).sinh() / r.sinh() - 1.0)
}

/// Taylor coefficients of `M` at `u = 0`:
/// `(r(1 + 2cosh r) csch r, (1/4) r² (4cosh r - 1) csch²(r/2))`.
pub fn m_taylor(r: f64) -> Result<(f64, f64)> {
    check_r(r)?;
    Ok((
        r * (1.0 + 2.0 * r.cosh()) / r.sinh(),
        0.25 * r * r * (4.0 * r.cosh() - 1.0) * csch_sq(0.5 * r),
    ))
}

/// The constants evaluated at one `r0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub r0: f64,
    pub c0_linear: f64,
    pub c0_quadratic: f64,
    pub a0: f64,
    pub a1: f64,
    pub a: f64,
    pub b2: f64,
    pub k_circ: f64,
    pub c_bound: f64,
    pub c1_bound: f64,
    pub g1: f64,
    pub g2: f64,
}

impl ConstantsTable {
    pub fn new(r0: f64) -> Result<Self> {
        Ok(Self {
            r0,
            c0_linear: c0_linear(r0)?,
            c0_quadratic: c0_quadratic(r0)?,
            a0: a0(r0)?,
            a1: a1(r0)?,
            a: a_min(r0)?,
            b2: b2(),
            k_circ: k_circ(r0)?,
            c_bound: c_bound(r0)?,
            c1_bound: c1_bound(r0)?,
            g1: g1(r0)?,
            g2: g2(r0)?,
        })
    }

    pub fn k(&self, k: f64) -> Result<f64> {
        k_coefficient(k, self.r0)
    }

    pub fn h(&self, k: f64) -> Result<f64> {
        h_ratio(k, self.r0)
    }
}
