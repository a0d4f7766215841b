//! Spectral gap `‖∇_τ U‖² - ‖U_t + U_φ‖² ≥ 2 Σ k ã²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::hopf_sphere::{ModeIndex, ModeTables, SpectralField, SphereQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaGap {
    /// `Σ k(k+2) ã² - ‖U_t + U_φ‖²`, both spectral.
    pub gap: f64,
    /// `2 Σ k ã²`.
    pub bound: f64,
    /// `Σ k² ã² - ‖U_t + U_φ‖²`, assembled from nonnegative terms.
    pub slack: f64,
    /// `‖U_t + U_φ‖²` by Parseval, including the coupling of sign variants.
    pub rotation_spectral: f64,
    /// `Σ (ℓ² + m²) ã²`, the diagonal part alone.
    pub rotation_diagonal: f64,
    /// `∫ (U_t + U_φ)² dH` by quadrature.
    pub rotation_quadrature: f64,
    /// `Σ k² ã²`.
    pub rotation_bound: f64,
    /// Every mode satisfies the integer condition `|ℓ| + |m| ≤ k`, which
    /// makes every term of `slack` nonnegative.
    pub holds_exactly: bool,
}

/// The rotation derivative maps the four modes with `(k, ±L, ±M)` into each
/// other:
///
/// ```text
/// D cc = -L sc - M cs    D cs = -L ss + M cc
/// D sc =  L cc - M ss    D ss =  L cs + M sc
/// ```
///
/// so `‖D U‖² = (L² + M²) Σ a² + 4LM (a_cs a_sc - a_cc a_ss)` on each block
/// and `(L+M)² Σ a² - ‖D U‖² = 2LM ((a_cc + a_ss)² + (a_cs - a_sc)²)`.
pub fn lemma_gap(field: &SpectralField, quad: &SphereQuadrature) -> LemmaGap {
    let mut out = LemmaGap {
        gap: 0.0,
        bound: 0.0,
        slack: 0.0,
        rotation_spectral: 0.0,
        rotation_diagonal: 0.0,
        rotation_quadrature: 0.0,
        rotation_bound: 0.0,
        holds_exactly: true,
    };
    let mut eigen = 0.0;
    for (idx, a) in field.iter() {
        let (k, l, m) = (idx.k as i64, idx.ell as i64, idx.m as i64);
        let a2 = a * a;
        out.holds_exactly &= l.abs() + m.abs() <= k;
        eigen += (k * (k + 2)) as f64 * a2;
        out.bound += (2 * k) as f64 * a2;
        out.rotation_bound += (k * k) as f64 * a2;
    }
    out.rotation_diagonal = field.rotation_diagonal_sq();
    out.rotation_spectral = field.rotation_sq();
    for b in field.rotation_blocks() {
        let (l, m) = (b.l as f64, b.m as f64);
        let [cc, cs, sc, ss] = b.coeffs;
        let spare = (b.k * b.k) as f64 - (l + m) * (l + m);
        out.slack += spare * (cc * cc + cs * cs + sc * sc + ss * ss)
            + 2.0 * l * m * ((cc + ss).powi(2) + (cs - sc).powi(2));
    }
    out.gap = eigen - out.rotation_spectral;
    let tables = ModeTables::new(field.kmax(), quad.grid());
    let rot: Vec<f64> = tables
        .synthesize(field)
        .rotation_derivative()
        .iter()
        .map(|v| v * v)
        .collect();
    out.rotation_quadrature = quad.integrate_values(&rot);
    out
}

/// Relative tolerance of the quadrature-vs-Parseval rotation check.
pub const ROTATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSuite {
    pub kmax: u32,
    pub seed: u64,
    pub rows: Vec<LemmaGap>,
    /// Largest `|quadrature - spectral| / max(1, spectral)`.
    pub max_rotation_error: f64,
    /// Largest `|quadrature - diagonal| / max(1, diagonal)`.
    pub max_diagonal_error: f64,
    pub pass: bool,
}

/// Runs [`lemma_gap`] on `samples` fields with standard normal coefficients
/// on all modes `k ≤ kmax`; field `i` is drawn from seed `seed + i`.
pub fn lemma_suite(samples: usize, kmax: u32, seed: u64, quad: &SphereQuadrature) -> LemmaSuite {
    let rows: Vec<LemmaGap> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let coeffs = (0..ModeIndex::degree_offset(kmax + 1))
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let f = SpectralField::from_coeffs(kmax, coeffs).expect("length matches kmax");
            lemma_gap(&f, quad)
        })
        .collect();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let max_rotation_error = rows
        .iter()
        .map(|g| rel(g.rotation_quadrature, g.rotation_spectral))
        .fold(0.0, f64::max);
    let max_diagonal_error = rows
        .iter()
        .map(|g| rel(g.rotation_quadrature, g.rotation_diagonal))
        .fold(0.0, f64::max);
    let pass = rows
        .iter()
        .all(|g| g.holds_exactly && g.gap >= g.bound && g.slack >= 0.0)
        && max_rotation_error <= ROTATION_TOLERANCE;
    LemmaSuite {
        kmax,
        seed,
        rows,
        max_rotation_error,
        max_diagonal_error,
        pass,
    }
}
