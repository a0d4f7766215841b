//! End-to-end check of `D(E) ≥ C(r0) ‖u‖²_{W^{1,2}}` on random admissible
//! perturbations, and the `ε → 0` limit of the ratio for a fixed direction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::constants::{c1_bound, c_bound};
use crate::barycenter::project_constraints;
use crate::domain::{deficit, NearlySphericalDomain};
use crate::error::{Error, Result};
use crate::hopf_sphere::{sobolev_norms, ModeIndex, SpectralField, SphereQuadrature};

/// Amplitudes `‖u‖_{W^{1,∞}}` cycled through by the sweep.
pub const DEFAULT_EPS: [f64; 2] = [1e-2, 1e-3];

/// `c_1(r0)` is compared from this radius on.
pub const C1_THRESHOLD: f64 = 2.5;

/// Tolerated drift of `q(2ε)/q(ε)` from 1.
pub const QUADRATIC_TOLERANCE: f64 = 0.02;

/// Radii are drawn uniformly from `[R_FRACTION·r0, r0]`.
pub const R_FRACTION: f64 = 0.25;

/// Ratio `D/‖u‖²_{W^{1,2}}` for the projected `ε·u_dir`.
pub fn deficit_ratio(
    r: f64,
    u_dir: &SpectralField,
    eps: f64,
    quad: &SphereQuadrature,
) -> Result<(SpectralField, f64, f64)> {
    let u = project_constraints(&u_dir.scaled(eps), r, quad)?;
    let w12 = u.w12_sq();
    if !(w12 > 1e-16 * eps * eps * u_dir.w12_sq()) {
        return Err(Error::InvalidArgument(
            "perturbation vanishes after projection onto the constraints".into(),
        ));
    }
    let metrics = deficit(&NearlySphericalDomain::new(r, u.clone())?, quad)?;
    Ok((u, metrics.deficit, metrics.deficit / w12))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondVariation {
    pub r: f64,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Extrapolated `lim_{ε→0} q(ε)` from `q = L + aε + bε²`.
    pub limit: f64,
    pub linear: f64,
    pub quadratic: f64,
    /// Root-mean-square misfit of the model (zero for three points).
    pub fit_residual: f64,
    /// `q(2ε)/q(ε)` for the smallest `ε` that has a partner at `2ε`.
    pub scaling_ratio: Option<f64>,
    /// False when the ratio drifts from 1 by more than 2%.
    pub quadratic_regime: bool,
}

pub fn second_variation(
    r: f64,
    u_dir: &SpectralField,
    eps_list: &[f64],
    quad: &SphereQuadrature,
) -> Result<SecondVariation> {
    if eps_list.len() < 3 {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least three amplitudes".into(),
        ));
    }
    let ratios = eps_list
        .par_iter()
        .map(|&e| deficit_ratio(r, u_dir, e, quad).map(|v| v.2))
        .collect::<Result<Vec<_>>>()?;
    let n = eps_list.len();
    let a = DMatrix::from_fn(n, 3, |i, j| eps_list[i].powi(j as i32));
    let b = DVector::from_column_slice(&ratios);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-300)
        .map_err(|e| Error::InvalidArgument(format!("extrapolation failed: {e}")))?;
    let misfit = &a * &coef - &b;
    let fit_residual = (misfit.norm_squared() / n as f64).sqrt();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eps_list[i].total_cmp(&eps_list[j]));
    let scaling_ratio = order.iter().find_map(|&i| {
        eps_list
            .iter()
            .position(|&e| ((e / eps_list[i]) - 2.0).abs() < 1e-9)
            .map(|j| ratios[j] / ratios[i])
    });
    let quadratic_regime = scaling_ratio.is_some_and(|s| (s - 1.0).abs() <= QUADRATIC_TOLERANCE);
    Ok(SecondVariation {
        r,
        eps: eps_list.to_vec(),
        ratios,
        limit: coef[0],
        linear: coef[1],
        quadratic: coef[2],
        fit_residual,
        scaling_ratio,
        quadratic_regime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub r: f64,
    pub eps: f64,
    pub kmax: u32,
    pub seed: u64,
    pub w12sq: f64,
    pub deficit: f64,
    pub ratio: f64,
    pub c_r0: f64,
    pub c1_r0: f64,
    pub pass: bool,
    /// Present when `r0 ≥ 2.5`.
    pub pass_c1: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSample {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub r0: f64,
    pub kmax: u32,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub c_r0: f64,
    pub c1_r0: f64,
    pub rows: Vec<SampleRow>,
    pub skipped: Vec<SkippedSample>,
    pub min_ratio: Option<f64>,
    pub all_pass: bool,
    pub c1_violations: Option<usize>,
}

/// Seed of sample `index`.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Standard normal coefficients on `2 ≤ k ≤ kmax`, scaled to `‖u‖_{W^{1,∞}} = eps`.
pub fn random_perturbation(kmax: u32, eps: f64, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    if kmax < 2 {
        return Err(Error::InvalidArgument(format!(
            "perturbations need kmax >= 2 (got {kmax})"
        )));
    }
    let start = ModeIndex::degree_offset(2);
    let coeffs: Vec<f64> = (0..ModeIndex::degree_offset(kmax + 1))
        .map(|i| {
            if i < start {
                0.0
            } else {
                StandardNormal.sample(rng)
            }
        })
        .collect();
    let raw = SpectralField::from_coeffs(kmax, coeffs)?;
    let w1inf = sobolev_norms(&raw).w1inf;
    Ok(raw.scaled(eps / w1inf))
}

fn run_sample(
    index: usize,
    r0: f64,
    kmax: u32,
    seed: u64,
    eps: f64,
    quad: &SphereQuadrature,
    bounds: (f64, f64),
) -> std::result::Result<SampleRow, SkippedSample> {
    let s = sample_seed(seed, index);
    let skip = |e: Error| SkippedSample {
        index,
        seed: s,
        reason: e.to_string(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let r = rng.random_range(R_FRACTION * r0..=r0);
    let u_dir = random_perturbation(kmax, 1.0, &mut rng).map_err(skip)?;
    let (_, d, ratio) = deficit_ratio(r, &u_dir, eps, quad).map_err(skip)?;
    let (c, c1) = bounds;
    let u = project_constraints(&u_dir.scaled(eps), r, quad).map_err(skip)?;
    Ok(SampleRow {
        index,
        r,
        eps,
        kmax,
        seed: s,
        w12sq: u.w12_sq(),
        deficit: d,
        ratio,
        c_r0: c,
        c1_r0: c1,
        pass: ratio >= c,
        pass_c1: (r0 >= C1_THRESHOLD).then_some(ratio >= c1),
    })
}

/// Sample `i` uses amplitude `eps[i % eps.len()]` and seed `seed + i`.
pub fn verify_theorem_with(
    r0: f64,
    samples: usize,
    kmax: u32,
    seed: u64,
    eps: &[f64],
    quad: &SphereQuadrature,
) -> Result<VerificationReport> {
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
        return Err(Error::InvalidArgument(
            "amplitudes must lie in (0, 1/2]".into(),
        ));
    }
    if kmax < 2 {
        return Err(Error::InvalidArgument(format!(
            "perturbations need kmax >= 2 (got {kmax})"
        )));
    }
    let bounds = (c_bound(r0)?, c1_bound(r0)?);
    let results: Vec<_> = (0..samples)
        .into_par_iter()
        .map(|i| run_sample(i, r0, kmax, seed, eps[i % eps.len()], quad, bounds))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for res in results {
        match res {
            Ok(row) => rows.push(row),
            Err(s) => skipped.push(s),
        }
    }
    let min_ratio = rows.iter().map(|r| r.ratio).reduce(f64::min);
    let all_pass = skipped.is_empty() && rows.iter().all(|r| r.pass);
    let c1_violations =
        (r0 >= C1_THRESHOLD).then(|| rows.iter().filter(|r| r.pass_c1 == Some(false)).count());
    Ok(VerificationReport {
        r0,
        kmax,
        seed,
        eps: eps.to_vec(),
        c_r0: bounds.0,
        c1_r0: bounds.1,
        rows,
        skipped,
        min_ratio,
        all_pass,
        c1_violations,
    })
}

pub fn verify_theorem(
    r0: f64,
    samples: usize,
    kmax: u32,
    seed: u64,
    quad: &SphereQuadrature,
) -> Result<VerificationReport> {
    verify_theorem_with(r0, samples, kmax, seed, &DEFAULT_EPS, quad)
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl VerificationReport {
    pub fn has_c1_column(&self) -> bool {
        self.r0 >= C1_THRESHOLD
    }

    /// One row per sample: `r, eps, kmax, seed, w12sq, D, ratio, C_r0, c1_r0,
    /// pass`, plus `pass_c1` when `r0 ≥ 2.5`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "r", "eps", "kmax", "seed", "w12sq", "D", "ratio", "C_r0", "c1_r0", "pass",
        ];
        if self.has_c1_column() {
            header.push("pass_c1");
        }
        let csv_err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![
                fmt_float(row.r),
                fmt_float(row.eps),
                row.kmax.to_string(),
                row.seed.to_string(),
                fmt_float(row.w12sq),
                fmt_float(row.deficit),
                fmt_float(row.ratio),
                fmt_float(row.c_r0),
                fmt_float(row.c1_r0),
                row.pass.to_string(),
            ];
            if let Some(p) = row.pass_c1 {
                rec.push(p.to_string());
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))
    }
}
