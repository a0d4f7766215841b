//! Real fields on `S^3` held as coefficients over the eigenmode basis, plus
//! the tensor-grid engine used for synthesis and analysis.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::{radial_factor, raw_norm_sq, raw_partials, raw_value, trig_factor, ModeIndex};
use super::quadrature::{SphereQuadrature, TensorGrid};
use super::{HopfCoord, SPHERE_AREA};
use crate::error::{Error, Result};

/// Coefficients `ã_{kℓm}` for all modes of degree `<= kmax`, flat order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralFieldRecord", into = "SpectralFieldRecord")]
pub struct SpectralField {
    kmax: u32,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(kmax: u32) -> Self {
        Self {
            kmax,
            coeffs: vec![0.0; ModeIndex::degree_offset(kmax + 1)],
        }
    }

    pub fn from_coeffs(kmax: u32, coeffs: Vec<f64>) -> Result<Self> {
        let expected = ModeIndex::degree_offset(kmax + 1);
        if coeffs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "kmax = {kmax} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { kmax, coeffs })
    }

    /// `c · Ψ_idx`.
    pub fn single_mode(idx: ModeIndex, c: f64) -> Self {
        let mut f = Self::zeros(idx.k);
        f.coeffs[idx.flat_position()] = c;
        f
    }

    /// The constant function with value `c`.
    pub fn constant(c: f64) -> Self {
        Self::single_mode(ModeIndex::constant(), c * SPHERE_AREA.sqrt())
    }

    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, idx: ModeIndex) -> f64 {
        if idx.k > self.kmax {
            0.0
        } else {
            self.coeffs[idx.flat_position()]
        }
    }

    pub fn set(&mut self, idx: ModeIndex, value: f64) -> Result<()> {
        if idx.k > self.kmax {
            return Err(Error::InvalidArgument(format!(
                "mode degree {} exceeds kmax {}",
                idx.k, self.kmax
            )));
        }
        self.coeffs[idx.flat_position()] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, f64)> + '_ {
        ModeIndex::up_to(self.kmax)
            .into_iter()
            .zip(self.coeffs.iter().copied())
    }

    /// Copy padded or truncated to `kmax`.
    pub fn with_kmax(&self, kmax: u32) -> Self {
        let mut out = Self::zeros(kmax);
        let n = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kmax: self.kmax,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        let kmax = self.kmax.max(other.kmax);
        let mut out = self.with_kmax(kmax);
        for (o, v) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += v;
        }
        out
    }

    /// Mean value of the function over the sphere.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / SPHERE_AREA.sqrt()
    }

    fn weighted_sum(&self, weight: impl Fn(&ModeIndex) -> f64) -> f64 {
        self.iter().map(|(idx, a)| weight(&idx) * a * a).sum()
    }

    /// `‖u‖²_{L²} = Σ ã²`.
    pub fn l2_sq(&self) -> f64 {
        self.weighted_sum(|_| 1.0)
    }

    /// `‖∇u‖²_{L²} = Σ k(k+2) ã²`.
    pub fn grad_sq(&self) -> f64 {
        self.weighted_sum(ModeIndex::eigenvalue)
    }

    /// `‖u‖²_{W^{1,2}} = Σ (k(k+2) + 1) ã²`.
    pub fn w12_sq(&self) -> f64 {
        self.weighted_sum(|i| i.eigenvalue() + 1.0)
    }

    /// `Σ (ℓ² + m²) ã²`, the diagonal part of [`Self::rotation_sq`].
    pub fn rotation_diagonal_sq(&self) -> f64 {
        self.weighted_sum(|i| (i.ell * i.ell + i.m * i.m) as f64)
    }

    /// `‖u_t + u_φ‖²_{L²}`. The derivative couples the modes `(k, ±L, ±M)`,
    /// so this is `Σ (ℓ² + m²) ã²` plus `4LM (a_cs a_sc - a_cc a_ss)` per block.
    pub fn rotation_sq(&self) -> f64 {
        self.rotation_blocks()
            .map(|b| {
                let (l, m) = (b.l as f64, b.m as f64);
                let [cc, cs, sc, ss] = b.coeffs;
                (l * l + m * m) * (cc * cc + cs * cs + sc * sc + ss * ss)
                    + 4.0 * l * m * (cs * sc - cc * ss)
            })
            .sum()
    }

    /// Groups the coefficients into blocks `(k, L, M)` with `L, M ≥ 0`,
    /// ordered `[cos·cos, cos·sin, sin·cos, sin·sin]` (absent variants are 0).
    pub fn rotation_blocks(&self) -> impl Iterator<Item = RotationBlock> + '_ {
        self.iter()
            .filter(|(i, _)| i.ell >= 0 && i.m >= 0)
            .map(|(i, cc)| {
                let get = |l: i32, m: i32| self.get(ModeIndex { k: i.k, ell: l, m });
                let (l, m) = (i.ell, i.m);
                let cs = if m > 0 { get(l, -m) } else { 0.0 };
                let sc = if l > 0 { get(-l, m) } else { 0.0 };
                let ss = if l > 0 && m > 0 { get(-l, -m) } else { 0.0 };
                RotationBlock {
                    k: i.k,
                    l: l as u32,
                    m: m as u32,
                    coeffs: [cc, cs, sc, ss],
                }
            })
    }

    pub fn to_record(&self) -> SpectralFieldRecord {
        SpectralFieldRecord::from(self.clone())
    }
}

/// Serialized form: `{kmax, entries: [{k, ell, m, coeff}]}`. Omitted entries
/// are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFieldRecord {
    pub kmax: u32,
    pub entries: Vec<SpectralEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralEntry {
    pub k: i64,
    pub ell: i64,
    pub m: i64,
    pub coeff: f64,
}

impl From<SpectralField> for SpectralFieldRecord {
    fn from(f: SpectralField) -> Self {
        let entries = f
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(i, coeff)| SpectralEntry {
                k: i.k as i64,
                ell: i.ell as i64,
                m: i.m as i64,
                coeff,
            })
            .collect();
        Self {
            kmax: f.kmax,
            entries,
        }
    }
}

impl TryFrom<SpectralFieldRecord> for SpectralField {
    type Error = Error;

    fn try_from(rec: SpectralFieldRecord) -> Result<Self> {
        let mut out = SpectralField::zeros(rec.kmax);
        let mut seen = BTreeMap::new();
        for e in rec.entries {
            let idx = ModeIndex::new(e.k, e.ell, e.m)?;
            if !e.coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient at {idx:?}"
                )));
            }
            if seen.insert(idx, ()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate entry {idx:?}")));
            }
            out.set(idx, e.coeff)?;
        }
        Ok(out)
    }
}

/// Field values and Hopf partials at every node of a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub u: Vec<f64>,
    pub u_s: Vec<f64>,
    pub u_t: Vec<f64>,
    pub u_phi: Vec<f64>,
}

impl GridSamples {
    /// `|∇_τ u|² = u_s² + u_t²/cos²s + u_φ²/sin²s` at every node.
    pub fn tangential_gradient_sq(&self, grid: &TensorGrid) -> Vec<f64> {
        let row = grid.row_len();
        (0..self.u.len())
            .map(|q| {
                let s = grid.s[q / row];
                let (sn, cs) = s.sin_cos();
                self.u_s[q].powi(2) + (self.u_t[q] / cs).powi(2) + (self.u_phi[q] / sn).powi(2)
            })
            .collect()
    }

    /// `u_t + u_φ`, the derivative along `z ↦ iz`.
    pub fn rotation_derivative(&self) -> Vec<f64> {
        self.u_t
            .iter()
            .zip(&self.u_phi)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// Mode and trigonometric tables on a fixed tensor grid.
#[derive(Debug, Clone)]
pub struct ModeTables {
    kmax: u32,
    grid: TensorGrid,
    // per flat mode: normalized S(s_i) and S'(s_i)
    radial: Vec<Vec<f64>>,
    radial_d: Vec<Vec<f64>>,
    // indexed by j + kmax
    trig_t: Vec<Vec<(f64, f64)>>,
    trig_phi: Vec<Vec<(f64, f64)>>,
    // distinct (ℓ, m) with the flat positions of their modes
    pairs: Vec<((i32, i32), Vec<usize>)>,
}

impl ModeTables {
    pub fn new(kmax: u32, grid: &TensorGrid) -> Self {
        let modes = ModeIndex::up_to(kmax);
        let (radial, radial_d): (Vec<_>, Vec<_>) = modes
            .par_iter()
            .map(|idx| {
                let inv = 1.0 / raw_norm_sq(idx).sqrt();
                grid.s
                    .iter()
                    .map(|&s| {
                        let (v, d) = radial_factor(idx, s);
                        (v * inv, d * inv)
                    })
                    .unzip()
            })
            .unzip();
        let k = kmax as i32;
        let table = |xs: &[f64]| -> Vec<Vec<(f64, f64)>> {
            (-k..=k)
                .map(|j| xs.iter().map(|&x| trig_factor(j, x)).collect())
                .collect()
        };
        let mut by_pair: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for (pos, idx) in modes.iter().enumerate() {
            by_pair.entry((idx.ell, idx.m)).or_default().push(pos);
        }
        Self {
            kmax,
            grid: grid.clone(),
            radial,
            radial_d,
            trig_t: table(&grid.t),
            trig_phi: table(&grid.phi),
            pairs: by_pair.into_iter().collect(),
        }
    }

    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    /// Values of the single normalized mode at `flat_pos` on the grid.
    pub fn mode_values(&self, flat_pos: usize) -> Vec<f64> {
        let mut f = SpectralField::zeros(self.kmax);
        f.coeffs[flat_pos] = 1.0;
        self.synthesize(&f).u
    }

    /// Evaluates the field and its partials on the grid.
    pub fn synthesize(&self, field: &SpectralField) -> GridSamples {
        let g = &self.grid;
        let (nt, np) = (g.t.len(), g.phi.len());
        let k = self.kmax as i32;
        let coeffs = field.with_kmax(self.kmax).coeffs;
        let rows: Vec<[Vec<f64>; 4]> = (0..g.s.len())
            .into_par_iter()
            .map(|i| {
                let mut out = [
                    vec![0.0; nt * np],
                    vec![0.0; nt * np],
                    vec![0.0; nt * np],
                    vec![0.0; nt * np],
                ];
                for ((ell, m), positions) in &self.pairs {
                    let mut gv = 0.0;
                    let mut gd = 0.0;
                    for &pos in positions {
                        gv += coeffs[pos] * self.radial[pos][i];
                        gd += coeffs[pos] * self.radial_d[pos][i];
                    }
                    if gv == 0.0 && gd == 0.0 {
                        continue;
                    }
                    let tt = &self.trig_t[(ell + k) as usize];
                    let tp = &self.trig_phi[(m + k) as usize];
                    for (j, &(tv, td)) in tt.iter().enumerate() {
                        let base = j * np;
                        for (q, &(pv, pd)) in tp.iter().enumerate() {
                            out[0][base + q] += gv * tv * pv;
                            out[1][base + q] += gd * tv * pv;
                            out[2][base + q] += gv * td * pv;
                            out[3][base + q] += gv * tv * pd;
                        }
                    }
                }
                out
            })
            .collect();
        let mut samples = GridSamples {
            u: Vec::with_capacity(g.len()),
            u_s: Vec::with_capacity(g.len()),
            u_t: Vec::with_capacity(g.len()),
            u_phi: Vec::with_capacity(g.len()),
        };
        for [a, b, c, d] in rows {
            samples.u.extend(a);
            samples.u_s.extend(b);
            samples.u_t.extend(c);
            samples.u_phi.extend(d);
        }
        samples
    }

    /// Projects node values onto the modes with the quadrature weights.
    /// The quadrature must live on this table's grid.
    pub fn project(&self, values: &[f64], quad: &SphereQuadrature) -> SpectralField {
        let g = &self.grid;
        assert_eq!(quad.grid(), g, "quadrature grid differs from table grid");
        assert_eq!(values.len(), g.len());
        let np = g.phi.len();
        let row = g.row_len();
        let k = self.kmax as i32;
        let tp_w = quad.t_weight() * quad.phi_weight();
        let contributions: Vec<Vec<(usize, f64)>> = self
            .pairs
            .par_iter()
            .map(|((ell, m), positions)| {
                let tt = &self.trig_t[(ell + k) as usize];
                let tp = &self.trig_phi[(m + k) as usize];
                let fourier: Vec<f64> = (0..g.s.len())
                    .map(|i| {
                        let chunk = &values[i * row..(i + 1) * row];
                        let mut acc = 0.0;
                        for (j, &(tv, _)) in tt.iter().enumerate() {
                            let mut inner = 0.0;
                            for (q, &(pv, _)) in tp.iter().enumerate() {
                                inner += chunk[j * np + q] * pv;
                            }
                            acc += tv * inner;
                        }
                        acc * tp_w
                    })
                    .collect();
                positions
                    .iter()
                    .map(|&pos| {
                        let a = fourier
                            .iter()
                            .zip(quad.s_weights())
                            .zip(&self.radial[pos])
                            .map(|((f, w), s)| f * w * s)
                            .sum();
                        (pos, a)
                    })
                    .collect()
            })
            .collect();
        let mut out = SpectralField::zeros(self.kmax);
        for (pos, a) in contributions.into_iter().flatten() {
            out.coeffs[pos] = a;
        }
        out
    }
}

/// Result of [`analyze`]: the projected field and whether the rule resolves
/// products of degree-`kmax` modes exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub field: SpectralField,
    pub resolved: bool,
}

/// Projects `f` onto all modes of degree `<= kmax` by quadrature.
pub fn analyze<F>(f: F, kmax: u32, quad: &SphereQuadrature) -> Projection
where
    F: Fn(HopfCoord) -> f64 + Sync,
{
    let values = quad.grid().evaluate(f);
    let tables = ModeTables::new(kmax, quad.grid());
    Projection {
        field: tables.project(&values, quad),
        resolved: quad.resolves_degree(kmax as usize),
    }
}

/// Evaluates the truncated expansion at one point.
pub fn synthesize(field: &SpectralField, p: HopfCoord) -> f64 {
    field
        .iter()
        .filter(|(_, a)| *a != 0.0)
        .map(|(idx, a)| a * raw_value(&idx, &p) / raw_norm_sq(&idx).sqrt())
        .sum()
}

fn partials_at(field: &SpectralField, p: &HopfCoord) -> Result<[f64; 3]> {
    p.check_interior()?;
    let mut acc = [0.0; 3];
    for (idx, a) in field.iter().filter(|(_, a)| *a != 0.0) {
        let d = raw_partials(&idx, p);
        let c = a / raw_norm_sq(&idx).sqrt();
        for (o, v) in acc.iter_mut().zip(d) {
            *o += c * v;
        }
    }
    Ok(acc)
}

/// `|∇_τ U|² = U_s² + U_t²/cos²s + U_φ²/sin²s` at an interior point.
pub fn tangential_gradient_sq(field: &SpectralField, p: HopfCoord) -> Result<f64> {
    let [us, ut, uf] = partials_at(field, &p)?;
    let (sn, cs) = p.s.sin_cos();
    Ok(us * us + (ut / cs).powi(2) + (uf / sn).powi(2))
}

/// `<∇U, iz> = U_t + U_φ` at an interior point.
pub fn rotation_derivative(field: &SpectralField, p: HopfCoord) -> Result<f64> {
    let [_, ut, uf] = partials_at(field, &p)?;
    Ok(ut + uf)
}

/// Spectral Sobolev quantities plus a grid estimate of `‖u‖_{W^{1,∞}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevNorms {
    pub l2_sq: f64,
    pub grad_sq: f64,
    pub w12_sq: f64,
    /// `max(sup|u|, sup|∇_τ u|)` over a grid three times finer (per axis)
    /// than the default quadrature for the field's degree.
    pub w1inf: f64,
}

pub fn sobolev_norms(field: &SpectralField) -> SobolevNorms {
    let grid = SphereQuadrature::for_degree(field.kmax as usize).refined(3);
    let tables = ModeTables::new(field.kmax, grid.grid());
    SobolevNorms {
        l2_sq: field.l2_sq(),
        grad_sq: field.grad_sq(),
        w12_sq: field.w12_sq(),
        w1inf: w1inf_on(field, &tables),
    }
}

/// `max(sup|u|, sup|∇_τ u|)` over the table grid.
pub fn w1inf_on(field: &SpectralField, tables: &ModeTables) -> f64 {
    let samples = tables.synthesize(field);
    let sup_u = samples.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_g = samples
        .tangential_gradient_sq(tables.grid())
        .iter()
        .fold(0.0f64, |m, v| m.max(*v))
        .sqrt();
    sup_u.max(sup_g)
}

/// Coefficients of the modes `(k, ±L, ±M)` mixed by `∂_t + ∂_φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationBlock {
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub coeffs: [f64; 4],
}
