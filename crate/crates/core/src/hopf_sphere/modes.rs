//! Eigenmodes `Ψ_{kℓm}` of the Laplacian on `S^3`.
//!
//! `Ψ̃_{kℓm} = cos^{|ℓ|}s · sin^{|m|}s · P_d^{(|m|,|ℓ|)}(cos 2s) · T_ℓ(t) · T_m(φ)`
//! with `d = (k - |ℓ| - |m|)/2`, `T_j(x) = cos(|j| x)` for `j >= 0` and
//! `sin(|j| x)` for `j < 0`. Modes are divided by their exact L² norm, so
//! `{Ψ_{kℓm}}` is orthonormal with `-Δ Ψ = k(k+2) Ψ`.

use std::f64::consts::PI;

use super::jacobi::{jacobi_sum, jacobi_sum_derivative};
use super::quadrature::gauss_legendre;
use super::HopfCoord;
use crate::error::{Error, Result};

/// Index `(k, ℓ, m)` with `|ℓ| + |m| <= k` and `ℓ + m ≡ k (mod 2)`.
///
/// The derived ordering (by `k`, then `ℓ`, then `m`) is the flat ordering
/// used by [`super::SpectralField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    pub k: u32,
    pub ell: i32,
    pub m: i32,
}

impl ModeIndex {
    pub fn new(k: i64, ell: i64, m: i64) -> Result<Self> {
        let bad = || Error::InvalidMode { k, ell, m };
        if k < 0 || ell.abs() + m.abs() > k || (ell + m - k).rem_euclid(2) != 0 {
            return Err(bad());
        }
        let k = u32::try_from(k).map_err(|_| bad())?;
        Ok(Self {
            k,
            ell: ell as i32,
            m: m as i32,
        })
    }

    pub fn constant() -> Self {
        Self { k: 0, ell: 0, m: 0 }
    }

    /// Jacobi degree `d = (k - |ℓ| - |m|)/2`.
    pub fn jacobi_degree(&self) -> u32 {
        (self.k - self.ell.unsigned_abs() - self.m.unsigned_abs()) / 2
    }

    /// All indices of degree `k`, lexicographic in `(ℓ, m)`.
    pub fn of_degree(k: u32) -> Vec<ModeIndex> {
        let ki = k as i32;
        let mut out = Vec::with_capacity(mode_count(k));
        for ell in -ki..=ki {
            let rest = ki - ell.abs();
            let mut m = -rest;
            while m <= rest {
                out.push(ModeIndex { k, ell, m });
                m += 2;
            }
        }
        out
    }

    /// All indices with degree `<= kmax` in flat order.
    pub fn up_to(kmax: u32) -> Vec<ModeIndex> {
        (0..=kmax).flat_map(ModeIndex::of_degree).collect()
    }

    /// Number of modes with degree `< k`.
    pub fn degree_offset(k: u32) -> usize {
        let k = k as usize;
        k * (k + 1) * (2 * k + 1) / 6
    }

    /// Position of this index in the flat ordering.
    pub fn flat_position(&self) -> usize {
        let k = self.k as i32;
        let mut pos = 0i32;
        for l in -k..self.ell {
            pos += k - l.abs() + 1;
        }
        pos += (self.m + (k - self.ell.abs())) / 2;
        Self::degree_offset(self.k) + pos as usize
    }

    /// Eigenvalue `k(k+2)` of `-Δ`.
    pub fn eigenvalue(&self) -> f64 {
        let k = self.k as f64;
        k * (k + 2.0)
    }
}

/// Dimension of the degree-`k` eigenspace, `(1 + k)^2`.
pub fn mode_count(k: u32) -> usize {
    ((k + 1) * (k + 1)) as usize
}

/// `S(s) = cos^L s · sin^M s · P_d^{(M,L)}(cos 2s)` and `S'(s)`.
pub(crate) fn radial_factor(idx: &ModeIndex, s: f64) -> (f64, f64) {
    let l = idx.ell.unsigned_abs();
    let m = idx.m.unsigned_abs();
    let d = idx.jacobi_degree();
    let (sn, cs) = s.sin_cos();
    let zeta = (2.0 * s).cos();
    let p = jacobi_sum(d, m, l, zeta);
    let dp = jacobi_sum_derivative(d, m, l, zeta);
    let cl = cs.powi(l as i32);
    let sm = sn.powi(m as i32);
    let value = cl * sm * p;
    let mut deriv = cl * sm * dp * (-2.0 * (2.0 * s).sin());
    if l > 0 {
        deriv -= l as f64 * cs.powi(l as i32 - 1) * sn * sm * p;
    }
    if m > 0 {
        deriv += m as f64 * cl * sn.powi(m as i32 - 1) * cs * p;
    }
    (value, deriv)
}

/// `T_j(x)` and its derivative.
pub(crate) fn trig_factor(j: i32, x: f64) -> (f64, f64) {
    let a = j.unsigned_abs() as f64;
    let (s, c) = (a * x).sin_cos();
    if j >= 0 {
        (c, -a * s)
    } else {
        (s, a * c)
    }
}

/// `‖Ψ̃_{kℓm}‖²` by quadrature rules that are exact for the integrand.
pub(crate) fn raw_norm_sq(idx: &ModeIndex) -> f64 {
    // s-part is a polynomial of degree k in ζ = cos 2s
    let n = idx.k as usize / 2 + 2;
    let (zeta, w) = gauss_legendre(n);
    let s_part: f64 = zeta
        .iter()
        .zip(&w)
        .map(|(z, w)| {
            let (v, _) = radial_factor(idx, 0.5 * z.acos());
            0.25 * w * v * v
        })
        .sum();
    let trig_part = |j: i32| {
        let n = 2 * j.unsigned_abs() as usize + 2;
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|q| trig_factor(j, q as f64 * h).0.powi(2))
            .sum::<f64>()
            * h
    };
    s_part * trig_part(idx.ell) * trig_part(idx.m)
}

/// Normalized eigenmode `Ψ_{kℓm}` at `p`.
pub fn eigenmode(idx: ModeIndex, p: HopfCoord) -> f64 {
    let norm = raw_norm_sq(&idx).sqrt();
    raw_value(&idx, &p) / norm
}

pub(crate) fn raw_value(idx: &ModeIndex, p: &HopfCoord) -> f64 {
    radial_factor(idx, p.s).0 * trig_factor(idx.ell, p.t).0 * trig_factor(idx.m, p.phi).0
}

/// Analytic `(∂_s, ∂_t, ∂_φ)` of the normalized mode. Fails at the chart
/// poles `s ∈ {0, π/2}`.
pub fn eigenmode_partials(idx: ModeIndex, p: HopfCoord) -> Result<[f64; 3]> {
    p.check_interior()?;
    let inv = 1.0 / raw_norm_sq(&idx).sqrt();
    Ok(raw_partials(&idx, &p).map(|v| v * inv))
}

pub(crate) fn raw_partials(idx: &ModeIndex, p: &HopfCoord) -> [f64; 3] {
    let (sv, sd) = radial_factor(idx, p.s);
    let (tv, td) = trig_factor(idx.ell, p.t);
    let (fv, fd) = trig_factor(idx.m, p.phi);
    [sd * tv * fv, sv * td * fv, sv * tv * fd]
}

/// One row of the normalization cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationRow {
    pub index: ModeIndex,
    /// Exact-quadrature `‖Ψ̃‖²` (used for normalization).
    pub quadrature: f64,
    /// `2^{ℓ̂+m̂} π² (d+|ℓ|)! (d+|m|)! / (2(k+1) d! (d+|ℓ|+|m|)!)`.
    pub closed_form: f64,
    /// The printed constant `2^{ℓ̂+m̂} π² (|ℓ|+d)! d! (|ℓ|+|m|+d)! / (2(k+1))`,
    /// kept for comparison only.
    pub printed: f64,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Compares the quadrature norms with the Jacobi closed form and with the
/// printed normalization constant for every mode of degree `<= kmax`.
pub fn normalization_table(kmax: u32) -> Vec<NormalizationRow> {
    ModeIndex::up_to(kmax)
        .into_iter()
        .map(|idx| {
            let l = idx.ell.unsigned_abs();
            let m = idx.m.unsigned_abs();
            let d = idx.jacobi_degree();
            let hat = u32::from(l == 0) + u32::from(m == 0);
            let pre = 2f64.powi(hat as i32) * PI * PI / (2.0 * (idx.k + 1) as f64);
            NormalizationRow {
                index: idx,
                quadrature: raw_norm_sq(&idx),
                closed_form: pre * factorial(d + l) * factorial(d + m)
                    / (factorial(d) * factorial(d + l + m)),
                printed: pre * factorial(l + d) * factorial(d) * factorial(l + m + d),
            }
        })
        .collect()
}
