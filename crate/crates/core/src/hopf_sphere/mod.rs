//! Analysis on the unit sphere `S^3 ⊂ C^2` in Hopf coordinates.
//!
//! The chart is `z_1 = cos s · e^{it}`, `z_2 = sin s · e^{iφ}` with
//! `s ∈ [0, π/2]`, `t, φ ∈ [0, 2π)`. The surface element is
//! `cos s · sin s ds dt dφ`, so the sphere has total measure `2π²`.

mod field;
mod jacobi;
mod modes;
mod quadrature;

pub use field::{
    analyze, rotation_derivative, sobolev_norms, synthesize, tangential_gradient_sq, GridSamples,
    ModeTables, Projection, RotationBlock, SobolevNorms, SpectralEntry, SpectralField,
    SpectralFieldRecord,
};
pub use jacobi::{binomial, jacobi_poly, jacobi_poly_derivative};
pub use modes::{
    eigenmode, eigenmode_partials, mode_count, normalization_table, ModeIndex, NormalizationRow,
};
pub use quadrature::{build_quadrature, gauss_legendre, SphereQuadrature, TensorGrid};

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Total measure of the unit sphere in `C^2`.
pub const SPHERE_AREA: f64 = 2.0 * PI * PI;

/// A point of `S^3` in Hopf coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfCoord {
    pub s: f64,
    pub t: f64,
    pub phi: f64,
}

impl HopfCoord {
    pub fn new(s: f64, t: f64, phi: f64) -> Result<Self> {
        let tau = 2.0 * PI;
        if !(0.0..=FRAC_PI_2).contains(&s) || !(0.0..tau).contains(&t) || !(0.0..tau).contains(&phi)
        {
            return Err(Error::InvalidArgument(format!(
                "Hopf coordinates out of range: s={s}, t={t}, phi={phi}"
            )));
        }
        Ok(Self { s, t, phi })
    }

    /// `(cos s cos t, cos s sin t, sin s cos φ, sin s sin φ)`.
    pub fn to_cartesian(&self) -> [f64; 4] {
        let (ss, cs) = self.s.sin_cos();
        let (st, ct) = self.t.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cs * ct, cs * st, ss * cp, ss * sp]
    }

    /// Inverse chart for a unit vector. Angles are wrapped into `[0, 2π)`.
    pub fn from_cartesian(x: [f64; 4]) -> Result<Self> {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "point is not on the unit sphere (|x| = {n})"
            )));
        }
        let r1 = x[0].hypot(x[1]);
        let r2 = x[2].hypot(x[3]);
        let wrap = |a: f64| {
            let w = a.rem_euclid(2.0 * PI);
            if w >= 2.0 * PI {
                0.0
            } else {
                w
            }
        };
        Ok(Self {
            s: r2.atan2(r1),
            t: wrap(x[1].atan2(x[0])),
            phi: wrap(x[3].atan2(x[2])),
        })
    }

    pub(crate) fn check_interior(&self) -> Result<()> {
        if self.s > 0.0 && self.s < FRAC_PI_2 {
            Ok(())
        } else {
            Err(Error::ChartPole { s: self.s })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chart_corners() {
        let a = HopfCoord::new(0.0, 0.0, 0.0).unwrap().to_cartesian();
        assert_eq!(a, [1.0, 0.0, 0.0, 0.0]);
        let b = HopfCoord::new(FRAC_PI_2, 0.0, FRAC_PI_2)
            .unwrap()
            .to_cartesian();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for (x, y) in b.iter().zip(expected) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn chart_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = HopfCoord::new(
                rng.random_range(0.01..FRAC_PI_2 - 0.01),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..2.0 * PI),
            )
            .unwrap();
            let x = p.to_cartesian();
            assert_abs_diff_eq!(x.iter().map(|v| v * v).sum::<f64>(), 1.0, epsilon = 1e-15);
            let q = HopfCoord::from_cartesian(x).unwrap();
            assert_abs_diff_eq!(p.s, q.s, epsilon = 1e-12);
            // compare angles on the circle
            assert_abs_diff_eq!((p.t - q.t).sin(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((p.t - q.t).cos(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!((p.phi - q.phi).sin(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((p.phi - q.phi).cos(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(HopfCoord::new(-0.1, 0.0, 0.0).is_err());
        assert!(HopfCoord::new(0.1, 2.0 * PI, 0.0).is_err());
        assert!(HopfCoord::from_cartesian([2.0, 0.0, 0.0, 0.0]).is_err());
    }
}
