//! Holomorphic barycenter: the zero of `c ↦ ∫_E p_c(z) dμ(z)`, and the
//! projection of a boundary profile onto the constraint set
//! `{μ(E) = μ(B_r), barycenter at 0}`.
//!
//! Integrals over `E` use `z = ω tanh((ρ/2)(1+u(ω)))` with `ρ ∈ [0, r]`,
//! for which `dμ = (1+u)/2 · sinh³A cosh A dρ dH` with `A = (ρ/2)(1+u)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::ball_geometry::{mobius_into, norm_sq, BallPoint};
use crate::domain::{ball_volume, volume_density, NearlySphericalDomain, DIM};
use crate::error::{Error, Result};
use crate::hopf_sphere::{gauss_legendre, ModeIndex, ModeTables, SpectralField, SphereQuadrature};

pub const DEFAULT_RADIAL_NODES: usize = 24;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Tolerance of both constraints after [`project_constraints`].
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

const MAX_NEWTON_STEPS: usize = 60;
const MAX_HALVINGS: usize = 30;
const CHUNK: usize = 4096;

/// Weighted points `(z_i, w_i)` discretizing `μ` restricted to `E`.
#[derive(Debug, Clone)]
pub struct MassCloud {
    points: Vec<f64>,
    weights: Vec<f64>,
    mass: f64,
}

impl MassCloud {
    /// Cloud for the profile with values `u[q]` at the nodes of `quad`.
    pub fn from_profile(
        r: f64,
        u: &[f64],
        quad: &SphereQuadrature,
        radial_nodes: usize,
    ) -> Result<Self> {
        if u.len() != quad.len() {
            return Err(Error::DimensionMismatch {
                expected: quad.len(),
                found: u.len(),
            });
        }
        if radial_nodes == 0 {
            return Err(Error::InvalidArgument(
                "radial node count must be positive".into(),
            ));
        }
        let (x, w) = gauss_legendre(radial_nodes);
        let grid = quad.grid();
        let dim = 2 * DIM;
        let mut points = Vec::with_capacity(dim * u.len() * radial_nodes);
        let mut weights = Vec::with_capacity(u.len() * radial_nodes);
        for (q, &uq) in u.iter().enumerate() {
            let omega = grid.point(q).to_cartesian();
            let wq = quad.weight(q);
            for (xj, wj) in x.iter().zip(&w) {
                let rho = 0.5 * r * (xj + 1.0);
                let arg = 0.5 * rho * (1.0 + uq);
                let t = arg.tanh();
                let weight = wq * 0.5 * r * wj * 0.5 * (1.0 + uq) * arg.sinh().powi(3) * arg.cosh();
                if !weight.is_finite() || t >= 1.0 {
                    return Err(Error::Divergence(format!(
                        "mass weight overflow at node {q} (u = {uq})"
                    )));
                }
                points.extend(omega.iter().map(|o| o * t));
                weights.push(weight);
            }
        }
        let mass = chunked_sum(&weights);
        Ok(Self {
            points,
            weights,
            mass,
        })
    }

    pub fn new(
        domain: &NearlySphericalDomain,
        quad: &SphereQuadrature,
        radial_nodes: usize,
    ) -> Result<Self> {
        let u = domain.samples(quad).u;
        Self::from_profile(domain.r(), &u, quad, radial_nodes)
    }

    /// Total mass, i.e. the quadrature value of `μ(E)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i f(z_i)` for a vector-valued `f`, reduced in a fixed order.
    fn reduce<F>(&self, f: F) -> [f64; 4]
    where
        F: Fn(&[f64], &mut [f64; 4]) + Sync,
    {
        let partial: Vec<[f64; 4]> = self
            .points
            .par_chunks(4 * CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(pts, ws)| {
                let mut acc = [0.0; 4];
                let mut v = [0.0; 4];
                for (z, w) in pts.chunks_exact(4).zip(ws) {
                    f(z, &mut v);
                    for i in 0..4 {
                        acc[i] += w * v[i];
                    }
                }
                acc
            })
            .collect();
        partial.iter().fold([0.0; 4], |mut a, p| {
            for i in 0..4 {
                a[i] += p[i];
            }
            a
        })
    }

    /// `∫_E p_c(z) dμ(z)`.
    pub fn moment(&self, c: &BallPoint) -> Result<[f64; 4]> {
        check_point(c)?;
        let c = c.coords();
        Ok(self.reduce(|z, out| mobius_into(c, z, out)))
    }

    /// `∫_E p_c(p_a(w)) dμ(w)`, which equals the moment of `p_a(E)` at `c`.
    pub fn pullback_moment(&self, a: &BallPoint, c: &BallPoint) -> Result<[f64; 4]> {
        check_point(a)?;
        check_point(c)?;
        let (a, c) = (a.coords(), c.coords());
        Ok(self.reduce(|z, out| {
            let mut w = [0.0; 4];
            mobius_into(a, z, &mut w);
            mobius_into(c, &w, out);
        }))
    }

    /// `K(a) = ∫_E log cosh²(d_b(z, a)) dμ(z) = -∫_E log(1 - |p_a(z)|²) dμ(z)`.
    pub fn k_functional(&self, a: &BallPoint) -> Result<f64> {
        check_point(a)?;
        let a = a.coords();
        let v = self.reduce(|z, out| {
            let mut p = [0.0; 4];
            mobius_into(a, z, &mut p);
            out[0] = -(1.0 - norm_sq(&p)).ln();
        });
        Ok(v[0])
    }

    /// `∫_E z dμ`, i.e. `-moment(0)`.
    pub fn first_moment(&self) -> [f64; 4] {
        self.reduce(|z, out| out.copy_from_slice(z))
    }
}

fn chunked_sum(v: &[f64]) -> f64 {
    let partial: Vec<f64> = v.par_chunks(CHUNK).map(|c| c.iter().sum()).collect();
    partial.iter().sum()
}

fn check_point(c: &BallPoint) -> Result<()> {
    if c.dim() != DIM {
        return Err(Error::DimensionMismatch {
            expected: DIM,
            found: c.dim(),
        });
    }
    Ok(())
}

fn norm4(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `∫_E p_c(z) dμ(z)` with `radial_nodes` Gauss points along each ray.
pub fn moment(
    domain: &NearlySphericalDomain,
    c: &BallPoint,
    quad: &SphereQuadrature,
    radial_nodes: usize,
) -> Result<[f64; 4]> {
    MassCloud::new(domain, quad, radial_nodes)?.moment(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycenterResult {
    pub c: [f64; 4],
    /// `|∫_E p_c dμ| / μ(E)`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BarycenterResult {
    pub fn point(&self) -> BallPoint {
        BallPoint::new(self.c.to_vec()).expect("solver iterates stay inside the ball")
    }
}

/// Damped Newton on the normalized moment `c ↦ moment(c)/μ(E)` from `start`.
pub fn solve_barycenter_from(
    cloud: &MassCloud,
    start: &BallPoint,
    tol: f64,
) -> Result<BarycenterResult> {
    check_point(start)?;
    let mass = cloud.mass();
    let eval = |c: &[f64; 4]| -> Result<[f64; 4]> {
        let m = cloud.moment(&BallPoint::new(c.to_vec())?)?;
        Ok(m.map(|x| x / mass))
    };
    let mut c: [f64; 4] = start.coords().try_into().expect("dimension checked");
    let mut f = eval(&c)?;
    let mut res = norm4(&f);
    let mut iterations = 0;
    while res > tol && iterations < MAX_NEWTON_STEPS {
        iterations += 1;
        let h = 1e-6;
        let mut jac = DMatrix::<f64>::zeros(4, 4);
        for j in 0..4 {
            let (mut cp, mut cm) = (c, c);
            cp[j] += h;
            cm[j] -= h;
            let (fp, fm) = (eval(&cp)?, eval(&cm)?);
            for i in 0..4 {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(4, f.iter().map(|x| -x));
        let Some(step) = jac.lu().solve(&rhs) else {
            return Ok(BarycenterResult {
                c,
                residual: res,
                iterations,
                converged: false,
            });
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: [f64; 4] = std::array::from_fn(|i| c[i] + lambda * step[i]);
            if norm_sq(&trial) < 1.0 {
                let ft = eval(&trial)?;
                let rt = norm4(&ft);
                if rt < res {
                    c = trial;
                    f = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(BarycenterResult {
        c,
        residual: res,
        iterations,
        converged: res <= tol,
    })
}

/// Barycenter of `domain`, starting from the origin.
pub fn solve_barycenter(
    domain: &NearlySphericalDomain,
    quad: &SphereQuadrature,
    tol: f64,
) -> Result<BarycenterResult> {
    let cloud = MassCloud::new(domain, quad, DEFAULT_RADIAL_NODES)?;
    solve_barycenter_from(&cloud, &BallPoint::origin(DIM), tol)
}

/// Positions of the constant mode and the four degree-one modes.
fn low_mode_positions() -> [usize; 5] {
    let mut out = [0; 5];
    out[0] = ModeIndex::constant().flat_position();
    for (slot, idx) in out[1..].iter_mut().zip(ModeIndex::of_degree(1)) {
        *slot = idx.flat_position();
    }
    out
}

/// Residuals `(relative volume error, ∫_E z dμ / μ(E))` of the two constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintResiduals {
    pub volume: f64,
    pub moment: [f64; 4],
}

impl ConstraintResiduals {
    pub fn max_abs(&self) -> f64 {
        self.moment
            .iter()
            .fold(self.volume.abs(), |a, x| a.max(x.abs()))
    }
}

struct ConstraintSystem<'a> {
    r: f64,
    quad: &'a SphereQuadrature,
    radial_nodes: usize,
    base: Vec<f64>,
    low: Vec<Vec<f64>>,
    target: f64,
}

impl ConstraintSystem<'_> {
    fn profile(&self, x: &[f64; 5]) -> Vec<f64> {
        let mut u = self.base.clone();
        for (coef, vals) in x.iter().zip(&self.low) {
            for (uq, v) in u.iter_mut().zip(vals) {
                *uq += coef * v;
            }
        }
        u
    }

    fn residuals(&self, x: &[f64; 5]) -> Result<ConstraintResiduals> {
        let u = self.profile(x);
        if u.iter().any(|v| *v <= -1.0) {
            return Err(Error::Inadmissible("1 + u must stay positive".into()));
        }
        let vols: Vec<f64> = u.iter().map(|v| volume_density(DIM, self.r, *v)).collect();
        let vol = self.quad.integrate_values(&vols);
        let cloud = MassCloud::from_profile(self.r, &u, self.quad, self.radial_nodes)?;
        let m = cloud.first_moment();
        Ok(ConstraintResiduals {
            volume: (vol - self.target) / self.target,
            moment: m.map(|v| v / cloud.mass()),
        })
    }
}

fn as_vec(c: &ConstraintResiduals) -> [f64; 5] {
    [c.volume, c.moment[0], c.moment[1], c.moment[2], c.moment[3]]
}

/// Constraint residuals of the profile `u` at radius `r`.
pub fn constraint_residuals(
    u: &SpectralField,
    r: f64,
    quad: &SphereQuadrature,
) -> Result<ConstraintResiduals> {
    let sys = constraint_system(u, r, quad)?;
    let x = low_coefficients(u);
    sys.residuals(&x)
}

fn low_coefficients(u: &SpectralField) -> [f64; 5] {
    let c = u.coeffs();
    low_mode_positions().map(|p| c.get(p).copied().unwrap_or(0.0))
}

fn constraint_system<'a>(
    u0: &SpectralField,
    r: f64,
    quad: &'a SphereQuadrature,
) -> Result<ConstraintSystem<'a>> {
    let target = ball_volume(r)?;
    let kmax = u0.kmax().max(1);
    let u0 = u0.with_kmax(kmax);
    let positions = low_mode_positions();
    let mut high = u0.coeffs().to_vec();
    for p in positions {
        high[p] = 0.0;
    }
    let high = SpectralField::from_coeffs(kmax, high)?;
    let tables = ModeTables::new(kmax, quad.grid());
    let base = tables.synthesize(&high).u;
    let low = positions.iter().map(|p| tables.mode_values(*p)).collect();
    Ok(ConstraintSystem {
        r,
        quad,
        radial_nodes: DEFAULT_RADIAL_NODES,
        base,
        low,
        target,
    })
}

/// Adjusts the constant and degree-one coefficients of `u0` so that
/// `μ(E) = μ(B_r)` and the barycenter of `E` is the origin. All other
/// coefficients are left untouched.
pub fn project_constraints(
    u0: &SpectralField,
    r: f64,
    quad: &SphereQuadrature,
) -> Result<SpectralField> {
    let sys = constraint_system(u0, r, quad)?;
    let mut x = low_coefficients(u0);
    let mut f = as_vec(&sys.residuals(&x)?);
    let norm = |v: &[f64; 5]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut res = norm(&f);
    let goal = 1e-13;
    let mut iterations = 0;
    while res > goal && iterations < MAX_NEWTON_STEPS {
        iterations += 1;
        let h = 1e-7;
        let mut jac = DMatrix::<f64>::zeros(5, 5);
        for j in 0..5 {
            let (mut xp, mut xm) = (x, x);
            xp[j] += h;
            xm[j] -= h;
            let fp = as_vec(&sys.residuals(&xp)?);
            let fm = as_vec(&sys.residuals(&xm)?);
            for i in 0..5 {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(5, f.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: [f64; 5] = std::array::from_fn(|i| x[i] + lambda * step[i]);
            if let Ok(ft) = sys.residuals(&trial) {
                let ft = as_vec(&ft);
                let rt = norm(&ft);
                if rt < res {
                    x = trial;
                    f = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res > CONSTRAINT_TOLERANCE {
        return Err(Error::SolverFailure {
            iterations,
            residual: res,
            reason: format!("constraint projection stalled (residuals {f:?})"),
        });
    }
    let mut coeffs = u0.with_kmax(u0.kmax().max(1)).coeffs().to_vec();
    for (p, v) in low_mode_positions().iter().zip(x) {
        coeffs[*p] = v;
    }
    SpectralField::from_coeffs(u0.kmax().max(1), coeffs)
}
