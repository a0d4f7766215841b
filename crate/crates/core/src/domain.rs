//! Nearly spherical domains `∂E = {ω · tanh((r/2)(1 + u(ω)))}` in the Bergman
//! ball of `C^2`: volume, perimeter, deficit and the volume constraint.
//!
//! Both integrals reduce to integrals over the unit sphere. With
//! `t = tanh((r/2)(1+u))` the Bergman volume is `∫ sinh^{2n}((r/2)(1+u))/(2n) dH`
//! and the perimeter integrand is
//!
//! ```text
//! t^{2n-1} (1-t²)^{-n-1/2} · sqrt(1 - |<∇U, z>|² / |∇U|²) · sqrt(1 + ((1-t²)/(2t))² r² |∇_τ u|²)
//! ```
//!
//! where `U(z) = 2 artanh|z| / (1 + u(z/|z|))` has `E` as its sublevel set.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hopf_sphere::{
    sobolev_norms, HopfCoord, ModeTables, SobolevNorms, SpectralField, SphereQuadrature,
};

/// Complex dimension wired to the spectral engine.
pub const DIM: usize = 2;

/// Upper bound on `‖u‖_{W^{1,∞}}` for admissible domains.
pub const MAX_W1INF: f64 = 0.5;

/// Relative tolerance on `μ(E) = μ(B_r)` accepted by [`deficit`].
pub const VOLUME_TOLERANCE: f64 = 1e-9;

/// Measure `Ω_n = 2π^n/(n-1)!` of the unit sphere in `C^n`.
pub fn sphere_area_n(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "radius must be positive and finite (got {r})"
        )))
    }
}

/// `μ(B_r) = Ω_n sinh^{2n}(r/2)/(2n)`.
pub fn ball_volume_n(n: usize, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(sphere_area_n(n) * (r / 2.0).sinh().powi(2 * n as i32) / (2 * n) as f64)
}

/// `P(B_r) = Ω_n t^{2n-1} (1-t²)^{-n}` with `t = tanh(r/2)`.
pub fn ball_perimeter_n(n: usize, r: f64) -> Result<f64> {
    check_radius(r)?;
    let t = (r / 2.0).tanh();
    let c = (r / 2.0).cosh();
    Ok(sphere_area_n(n) * t.powi(2 * n as i32 - 1) * c.powi(2 * n as i32))
}

/// `μ(B_r) = (π²/2) sinh⁴(r/2)`.
pub fn ball_volume(r: f64) -> Result<f64> {
    ball_volume_n(DIM, r)
}

/// `P(B_r) = 2π² t³/(1-t²)²`.
pub fn ball_perimeter(r: f64) -> Result<f64> {
    ball_perimeter_n(DIM, r)
}

/// Radius of the metric ball with Bergman volume `mu` (n = 2).
pub fn ball_radius_for_volume(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "volume must be positive (got {mu})"
        )));
    }
    Ok(2.0 * (2.0 * mu / (PI * PI)).powf(0.25).asinh())
}

/// Radial volume integrand `sinh^{2n}((r/2)(1+u))/(2n)`.
pub fn volume_density(n: usize, r: f64, u: f64) -> f64 {
    (0.5 * r * (1.0 + u)).sinh().powi(2 * n as i32) / (2 * n) as f64
}

/// Perimeter integrand over the unit sphere.
///
/// `grad_sq = |∇_τ u|²`, `rot_sq = (u_t + u_φ)²` (the squared derivative
/// along `iω`). The tangential derivative of `U` at `z = tω` is
/// `-2 artanh(t) ∇_τ u / (t (1+u)²)`; the `1/t` comes from differentiating
/// `u(z/|z|)` at radius `t`.
pub fn perimeter_density(n: usize, r: f64, u: f64, grad_sq: f64, rot_sq: f64) -> f64 {
    let arg = 0.5 * r * (1.0 + u);
    let t = arg.tanh();
    let sech_sq = 1.0 / arg.cosh().powi(2);
    let normal = 2.0 / (sech_sq * (1.0 + u));
    let tangential = 2.0 * arg / (t * (1.0 + u).powi(2));
    let b_sq = tangential * tangential * grad_sq;
    let b3_sq = tangential * tangential * rot_sq;
    // 1 - t²(a² + b3²)/(a² + |b|²), arranged without cancellation
    let normal_sq = normal * normal;
    let cos_factor = ((normal_sq * sech_sq + b_sq - t * t * b3_sq) / (normal_sq + b_sq)).sqrt();
    let stretch = (1.0 + (sech_sq / (2.0 * t)).powi(2) * r * r * grad_sq).sqrt();
    t.powi(2 * n as i32 - 1) * sech_sq.powf(-(n as f64) - 0.5) * cos_factor * stretch
}

/// Boundary data at the nodes of a quadrature rule: `u`, `|∇_τ u|²` and
/// `(u_t + u_φ)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySamples {
    pub r: f64,
    pub u: Vec<f64>,
    pub grad_sq: Vec<f64>,
    pub rot_sq: Vec<f64>,
}

impl BoundarySamples {
    pub fn from_field(r: f64, u: &SpectralField, quad: &SphereQuadrature) -> Self {
        let tables = ModeTables::new(u.kmax(), quad.grid());
        Self::from_tables(r, u, &tables)
    }

    pub fn from_tables(r: f64, u: &SpectralField, tables: &ModeTables) -> Self {
        let s = tables.synthesize(u);
        let grad_sq = s.tangential_gradient_sq(tables.grid());
        let rot_sq = s.rotation_derivative().iter().map(|v| v * v).collect();
        Self {
            r,
            u: s.u,
            grad_sq,
            rot_sq,
        }
    }

    /// Samples an arbitrary profile given as `p ↦ (u, [u_s, u_t, u_φ])`.
    pub fn from_fn<F>(r: f64, quad: &SphereQuadrature, f: F) -> Self
    where
        F: Fn(HopfCoord) -> (f64, [f64; 3]) + Sync,
    {
        let grid = quad.grid();
        let vals: Vec<(f64, f64, f64)> = (0..grid.len())
            .into_par_iter()
            .map(|q| {
                let p = grid.point(q);
                let (u, [us, ut, uf]) = f(p);
                let (sn, cs) = p.s.sin_cos();
                let g = us * us + (ut / cs).powi(2) + (uf / sn).powi(2);
                (u, g, (ut + uf).powi(2))
            })
            .collect();
        let mut out = Self {
            r,
            u: Vec::with_capacity(vals.len()),
            grad_sq: Vec::with_capacity(vals.len()),
            rot_sq: Vec::with_capacity(vals.len()),
        };
        for (u, g, s) in vals {
            out.u.push(u);
            out.grad_sq.push(g);
            out.rot_sq.push(s);
        }
        out
    }

    pub fn volume(&self, quad: &SphereQuadrature) -> f64 {
        let v: Vec<f64> = self
            .u
            .iter()
            .map(|u| volume_density(DIM, self.r, *u))
            .collect();
        quad.integrate_values(&v)
    }

    pub fn perimeter(&self, quad: &SphereQuadrature) -> f64 {
        let v: Vec<f64> = (0..self.u.len())
            .map(|q| perimeter_density(DIM, self.r, self.u[q], self.grad_sq[q], self.rot_sq[q]))
            .collect();
        quad.integrate_values(&v)
    }

    pub fn min_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The pair `(r, u)` describing `∂E = {ω tanh((r/2)(1+u(ω)))}` in `C^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearlySphericalDomain {
    r: f64,
    u: SpectralField,
    w1inf: f64,
}

impl NearlySphericalDomain {
    /// Validates `r > 0` and `‖u‖_{W^{1,∞}} <= 1/2` (grid estimate), which
    /// also keeps `1 + u > 0`.
    pub fn new(r: f64, u: SpectralField) -> Result<Self> {
        check_radius(r)?;
        let w1inf = sobolev_norms(&u).w1inf;
        if !(w1inf <= MAX_W1INF) {
            return Err(Error::Inadmissible(format!(
                "‖u‖_W1inf ≈ {w1inf} exceeds {MAX_W1INF}"
            )));
        }
        Ok(Self { r, u, w1inf })
    }

    /// The metric ball `B_r`.
    pub fn ball(r: f64) -> Result<Self> {
        check_radius(r)?;
        Ok(Self {
            r,
            u: SpectralField::zeros(0),
            w1inf: 0.0,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn u(&self) -> &SpectralField {
        &self.u
    }

    /// Grid estimate of `‖u‖_{W^{1,∞}}` computed at construction.
    pub fn w1inf(&self) -> f64 {
        self.w1inf
    }

    pub fn samples(&self, quad: &SphereQuadrature) -> BoundarySamples {
        BoundarySamples::from_field(self.r, &self.u, quad)
    }
}

/// Bergman volume `μ(E)`.
pub fn volume(domain: &NearlySphericalDomain, quad: &SphereQuadrature) -> f64 {
    domain.samples(quad).volume(quad)
}

/// Bergman perimeter `P(E)`.
pub fn perimeter(domain: &NearlySphericalDomain, quad: &SphereQuadrature) -> f64 {
    domain.samples(quad).perimeter(quad)
}

/// Everything reported for one domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainMetrics {
    pub r: f64,
    pub volume: f64,
    pub perimeter: f64,
    pub ball_volume: f64,
    pub ball_perimeter: f64,
    /// `(P(E) - P(B_r)) / P(B_r)`.
    pub deficit: f64,
    pub norms: SobolevNorms,
    /// Whether the rule integrates degree-`kmax` products exactly.
    pub resolved: bool,
}

/// Computes the metrics record. The caller must have enforced the volume
/// constraint (see [`fit_volume_constraint`]).
pub fn deficit(domain: &NearlySphericalDomain, quad: &SphereQuadrature) -> Result<DomainMetrics> {
    let samples = domain.samples(quad);
    let vol = samples.volume(quad);
    let ball_vol = ball_volume(domain.r)?;
    let residual = (vol - ball_vol) / ball_vol;
    if !(residual.abs() <= VOLUME_TOLERANCE) {
        return Err(Error::VolumeConstraint { residual });
    }
    let per = samples.perimeter(quad);
    let ball_per = ball_perimeter(domain.r)?;
    Ok(DomainMetrics {
        r: domain.r,
        volume: vol,
        perimeter: per,
        ball_volume: ball_vol,
        ball_perimeter: ball_per,
        deficit: (per - ball_per) / ball_per,
        norms: sobolev_norms(&domain.u),
        resolved: quad.resolves_degree(domain.u.kmax() as usize),
    })
}

/// Constant `c` such that `u + c` satisfies `μ(E_{u+c}) = μ(B_r)` on `quad`.
///
/// The volume is strictly increasing in `c`, so bisection on the bracket
/// `[-max u, -min u]` finds the unique root.
pub fn volume_shift(u0: &SpectralField, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    check_radius(r)?;
    let target = ball_volume(r)?;
    let tables = ModeTables::new(u0.kmax(), quad.grid());
    let u = tables.synthesize(u0).u;
    let (lo_u, hi_u) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    if hi_u - lo_u >= 1.0 {
        return Err(Error::SolverFailure {
            iterations: 0,
            residual: hi_u - lo_u,
            reason: "oscillation of u0 is too large to bracket the volume shift".into(),
        });
    }
    let vol = |c: f64| {
        let v: Vec<f64> = u.iter().map(|x| volume_density(DIM, r, x + c)).collect();
        quad.integrate_values(&v) - target
    };
    let (mut lo, mut hi) = (-hi_u, -lo_u);
    if lo == hi {
        return Ok(lo);
    }
    let mut iterations = 0;
    while hi - lo > 1e-16 * lo.abs().max(hi.abs()).max(1.0) && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if vol(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (flo, fhi) = (vol(lo), vol(hi));
    let c = if flo.abs() <= fhi.abs() { lo } else { hi };
    let residual = vol(c) / target;
    if residual.abs() > 1e-12 {
        return Err(Error::SolverFailure {
            iterations,
            residual,
            reason: "volume bisection did not reach 1e-12".into(),
        });
    }
    Ok(c)
}

/// Returns `u0 + c` (a shift of the constant mode) satisfying the volume
/// constraint.
pub fn fit_volume_constraint(
    u0: &SpectralField,
    r: f64,
    quad: &SphereQuadrature,
) -> Result<SpectralField> {
    let c = volume_shift(u0, r, quad)?;
    Ok(u0.add(&SpectralField::constant(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf_sphere::{ModeIndex, SPHERE_AREA};
    use approx::assert_abs_diff_eq;

    fn mode(k: i64, l: i64, m: i64, c: f64) -> SpectralField {
        SpectralField::single_mode(ModeIndex::new(k, l, m).unwrap(), c)
    }

    #[test]
    fn ball_closed_forms() {
        assert_abs_diff_eq!(
            ball_volume(1.0).unwrap(),
            0.363_863_415_957_083_8,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ball_perimeter(1.0).unwrap(),
            3.149_533_924_379_755,
            epsilon = 1e-14
        );
        assert!(ball_volume(0.0).is_err());
        assert!(ball_perimeter(-1.0).is_err());
        assert_abs_diff_eq!(sphere_area_n(2), SPHERE_AREA, epsilon = 1e-14);
        let r = 2.3;
        let mu = ball_volume(r).unwrap();
        assert_abs_diff_eq!(ball_radius_for_volume(mu).unwrap(), r, epsilon = 1e-13);
    }

    #[test]
    fn euclidean_limit() {
        for &r in &[1e-2, 1e-3, 1e-4] {
            let ratio = ball_volume(r).unwrap() / (PI * PI * r.powi(4) / 32.0);
            assert_abs_diff_eq!(ratio, 1.0, epsilon = r);
        }
    }

    #[test]
    fn general_n_reduces_to_disc() {
        // n = 1: hyperbolic disc with curvature -4 in these units
        let r = 1.2;
        let t = (r / 2.0f64).tanh();
        assert_abs_diff_eq!(
            ball_perimeter_n(1, r).unwrap(),
            2.0 * PI * t / (1.0 - t * t),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            perimeter_density(1, r, 0.0, 0.0, 0.0) * 2.0 * PI,
            ball_perimeter_n(1, r).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn zero_and_constant_profiles() {
        let quad = SphereQuadrature::new(16, 16, 16).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            let ball = NearlySphericalDomain::ball(r).unwrap();
            let bv = ball_volume(r).unwrap();
            let bp = ball_perimeter(r).unwrap();
            assert_abs_diff_eq!(volume(&ball, &quad), bv, epsilon = 1e-10 * bv);
            assert_abs_diff_eq!(perimeter(&ball, &quad), bp, epsilon = 1e-10 * bp);
            let c = 0.2;
            let e = NearlySphericalDomain::new(r, SpectralField::constant(c)).unwrap();
            let v2 = ball_volume(r * (1.0 + c)).unwrap();
            let p2 = ball_perimeter(r * (1.0 + c)).unwrap();
            assert_abs_diff_eq!(volume(&e, &quad), v2, epsilon = 1e-10 * v2);
            assert_abs_diff_eq!(perimeter(&e, &quad), p2, epsilon = 1e-10 * p2);
        }
    }

    #[test]
    fn inadmissible_profiles_are_rejected() {
        assert!(NearlySphericalDomain::new(1.0, SpectralField::constant(0.6)).is_err());
        assert!(NearlySphericalDomain::new(1.0, mode(3, 1, 2, 2.0)).is_err());
        assert!(NearlySphericalDomain::new(0.0, SpectralField::zeros(0)).is_err());
    }

    #[test]
    fn volume_fit_examples() {
        let quad = SphereQuadrature::for_degree(4);
        let zero = SpectralField::zeros(2);
        assert_eq!(volume_shift(&zero, 1.0, &quad).unwrap(), 0.0);
        let c = volume_shift(&SpectralField::constant(0.1), 1.0, &quad).unwrap();
        assert_abs_diff_eq!(c, -0.1, epsilon = 1e-14);
        let fitted = fit_volume_constraint(&mode(2, 1, 1, 0.01), 1.0, &quad).unwrap();
        let e = NearlySphericalDomain::new(1.0, fitted).unwrap();
        let bv = ball_volume(1.0).unwrap();
        assert_abs_diff_eq!(volume(&e, &quad), bv, epsilon = 1e-12 * bv);
    }

    #[test]
    fn volume_shift_is_second_order() {
        let quad = SphereQuadrature::for_degree(4);
        let shift = |eps: f64| volume_shift(&mode(2, 1, 1, eps), 1.0, &quad).unwrap();
        let (a, b) = (shift(1e-2), shift(5e-3));
        assert!(a < 0.0);
        assert_abs_diff_eq!(a / b, 4.0, epsilon = 0.05);
    }

    #[test]
    fn deficit_requires_volume_constraint() {
        let quad = SphereQuadrature::for_degree(4);
        let e = NearlySphericalDomain::new(1.0, mode(2, 1, 1, 0.01)).unwrap();
        assert!(matches!(
            deficit(&e, &quad),
            Err(Error::VolumeConstraint { .. })
        ));
        let ball = NearlySphericalDomain::ball(1.0).unwrap();
        let m = deficit(&ball, &quad).unwrap();
        assert_abs_diff_eq!(m.deficit, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn perturbed_domain_beats_equal_volume_ball() {
        let quad = SphereQuadrature::for_degree(4);
        let e = NearlySphericalDomain::new(1.0, mode(2, 1, 1, 1e-2)).unwrap();
        let r_eq = ball_radius_for_volume(volume(&e, &quad)).unwrap();
        assert!(perimeter(&e, &quad) > ball_perimeter(r_eq).unwrap());
    }
}
