//! Bergman-ball primitives: metric tensor, automorphisms, geodesic distance
//! and the volume density.
//!
//! A point of the ball in `C^n` is stored as `2n` reals laid out as
//! `(x_1, y_1, ..., x_n, y_n)` with `z_j = x_j + i y_j`. All complex
//! arithmetic happens in that real presentation.

use crate::error::{Error, Result};

/// A point of the open unit ball in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
}

impl BallPoint {
    /// Builds a point from `2n` real coordinates, rejecting `|z| >= 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "a ball point needs an even, nonzero number of real coordinates (got {})",
                coords.len()
            )));
        }
        let norm = norm(&coords);
        if !(norm < 1.0) {
            return Err(Error::OutsideBall { norm });
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![0.0; 2 * n],
        }
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.coords)
    }
}

/// Hermitian `n x n` matrix with entries `(re, im)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    n: usize,
    entries: Vec<(f64, f64)>,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `g_{i jbar}`.
    pub fn entry(&self, i: usize, j: usize) -> (f64, f64) {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &MetricTensor) -> MetricTensor {
        let n = self.n;
        let mut entries = vec![(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = (0.0, 0.0);
                for k in 0..n {
                    acc = cadd(acc, cmul(self.entry(i, k), other.entry(k, j)));
                }
                entries[i * n + j] = acc;
            }
        }
        MetricTensor { n, entries }
    }

    /// `Re <B v, v>` for a tangent vector given in the real layout.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let mut bv = (0.0, 0.0);
            for j in 0..n {
                bv = cadd(bv, cmul(self.entry(i, j), (v[2 * j], v[2 * j + 1])));
            }
            // <Bv, v> = sum_i (Bv)_i conj(v_i)
            acc += bv.0 * v[2 * i] + bv.1 * v[2 * i + 1];
        }
        acc
    }
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

/// Hermitian product `<z, w> = sum z_j conj(w_j)` as `(re, im)`.
pub(crate) fn hermitian(z: &[f64], w: &[f64]) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for (zc, wc) in z.chunks_exact(2).zip(w.chunks_exact(2)) {
        re += zc[0] * wc[0] + zc[1] * wc[1];
        im += zc[1] * wc[0] - zc[0] * wc[1];
    }
    (re, im)
}

fn check_inside(z: &BallPoint) -> Result<f64> {
    let rho = z.norm_sq();
    if rho < 1.0 {
        Ok(rho)
    } else {
        Err(Error::OutsideBall { norm: rho.sqrt() })
    }
}

fn check_same_dim(a: &BallPoint, b: &BallPoint) -> Result<()> {
    if a.coords.len() == b.coords.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a.coords.len(),
            found: b.coords.len(),
        })
    }
}

/// `g_{i jbar}(z) = ((1 - |z|^2) delta_ij + conj(z_i) z_j) / (1 - |z|^2)^2`.
pub fn metric_tensor(z: &BallPoint) -> Result<MetricTensor> {
    let rho = check_inside(z)?;
    let n = z.dim();
    let c = z.coords();
    let scale = 1.0 / ((1.0 - rho) * (1.0 - rho));
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi) = (c[2 * i], c[2 * i + 1]);
            let (xj, yj) = (c[2 * j], c[2 * j + 1]);
            let diag = if i == j { 1.0 - rho } else { 0.0 };
            let re = diag + xi * xj + yi * yj;
            let im = xi * yj - yi * xj;
            entries.push((re * scale, im * scale));
        }
    }
    Ok(MetricTensor { n, entries })
}

/// `g^{i jbar}(z) = (1 - |z|^2)(delta_ij - conj(z_i) z_j)`.
pub fn inverse_metric_tensor(z: &BallPoint) -> Result<MetricTensor> {
    let rho = check_inside(z)?;
    let n = z.dim();
    let c = z.coords();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi) = (c[2 * i], c[2 * i + 1]);
            let (xj, yj) = (c[2 * j], c[2 * j + 1]);
            let diag = if i == j { 1.0 } else { 0.0 };
            let re = diag - (xi * xj + yi * yj);
            let im = -(xi * yj - yi * xj);
            entries.push(((1.0 - rho) * re, (1.0 - rho) * im));
        }
    }
    Ok(MetricTensor { n, entries })
}

/// Slice kernel for `p_a(z)`; writes into `out`. `a` must satisfy `|a| < 1`.
///
/// `p_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)` with `P_0 = 0`.
pub(crate) fn mobius_into(a: &[f64], z: &[f64], out: &mut [f64]) {
    let aa = norm_sq(a);
    let s_a = (1.0 - aa).sqrt();
    let za = hermitian(z, a);
    // P_a z = (<z,a>/<a,a>) a; numerator = a - (1 - s_a) P_a z - s_a z
    let proj = if aa > 0.0 {
        (za.0 / aa, za.1 / aa)
    } else {
        (0.0, 0.0)
    };
    let k = 1.0 - s_a;
    let den = (1.0 - za.0, -za.1);
    let den_abs2 = den.0 * den.0 + den.1 * den.1;
    let inv = (den.0 / den_abs2, -den.1 / den_abs2);
    for j in 0..a.len() / 2 {
        let (ax, ay) = (a[2 * j], a[2 * j + 1]);
        let (zx, zy) = (z[2 * j], z[2 * j + 1]);
        let pz = cmul(proj, (ax, ay));
        let num = (ax - k * pz.0 - s_a * zx, ay - k * pz.1 - s_a * zy);
        let q = cmul(num, inv);
        out[2 * j] = q.0;
        out[2 * j + 1] = q.1;
    }
}

/// The involutive automorphism `p_a` swapping `0` and `a`.
pub fn mobius(a: &BallPoint, z: &BallPoint) -> Result<BallPoint> {
    check_same_dim(a, z)?;
    check_inside(a)?;
    let za = hermitian(z.coords(), a.coords());
    if za.0 == 1.0 && za.1 == 0.0 {
        return Err(Error::InvalidArgument(
            "<z, a> = 1: p_a has a pole at z".into(),
        ));
    }
    let mut out = vec![0.0; z.coords.len()];
    mobius_into(a.coords(), z.coords(), &mut out);
    Ok(BallPoint { coords: out })
}

/// Bergman geodesic distance `(1/2) log((1 + |p_w(z)|)/(1 - |p_w(z)|))`.
pub fn geodesic_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    check_same_dim(z, w)?;
    check_inside(z)?;
    check_inside(w)?;
    let mut out = vec![0.0; z.coords.len()];
    mobius_into(w.coords(), z.coords(), &mut out);
    Ok(norm(&out).atanh())
}

/// Bergman volume density `(1 - |z|^2)^{-n-1}` relative to Lebesgue measure.
pub fn bergman_density(z: &BallPoint) -> Result<f64> {
    let rho = check_inside(z)?;
    Ok((1.0 - rho).powi(-(z.dim() as i32) - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut impl Rng, n: usize, max_norm: f64) -> BallPoint {
        loop {
            let c: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if norm(&c) < max_norm {
                return BallPoint::new(c).unwrap();
            }
        }
    }

    fn p(c: &[f64]) -> BallPoint {
        BallPoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn metric_at_origin_is_identity() {
        let g = metric_tensor(&BallPoint::origin(2)).unwrap();
        let h = inverse_metric_tensor(&BallPoint::origin(2)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_eq!(g.entry(i, j), (e, 0.0));
                assert_eq!(h.entry(i, j), (e, 0.0));
            }
        }
    }

    #[test]
    fn metric_at_half_real_axis() {
        let z = p(&[0.5, 0.0, 0.0, 0.0]);
        let g = metric_tensor(&z).unwrap();
        assert_abs_diff_eq!(g.entry(0, 0).0, 16.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.entry(1, 1).0, 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(g.entry(0, 1), (0.0, 0.0));
        let h = inverse_metric_tensor(&z).unwrap();
        assert_abs_diff_eq!(h.entry(0, 0).0, 9.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.entry(1, 1).0, 3.0 / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn metric_times_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z = random_point(&mut rng, 2, 0.99);
            let prod = metric_tensor(&z)
                .unwrap()
                .mul(&inverse_metric_tensor(&z).unwrap());
            for i in 0..2 {
                for j in 0..2 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(prod.entry(i, j).0, e, epsilon = 1e-12);
                    assert_abs_diff_eq!(prod.entry(i, j).1, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn metric_is_hermitian_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let z = random_point(&mut rng, 2, 0.999);
            let g = metric_tensor(&z).unwrap();
            let (a, b) = (g.entry(0, 1), g.entry(1, 0));
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-9 * a.0.abs().max(1.0));
            assert_abs_diff_eq!(a.1, -b.1, epsilon = 1e-9 * a.1.abs().max(1.0));
            let mut v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            assert!(g.quadratic_form(&v) > 0.0);
        }
    }

    #[test]
    fn outside_ball_is_an_error() {
        assert!(matches!(
            BallPoint::new(vec![1.0, 0.0]),
            Err(Error::OutsideBall { .. })
        ));
        assert!(BallPoint::new(vec![0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn mobius_swaps_zero_and_a() {
        let a = p(&[0.3, -0.2, 0.1, 0.4]);
        let at_zero = mobius(&a, &BallPoint::origin(2)).unwrap();
        for (x, y) in at_zero.coords().iter().zip(a.coords()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
        let at_a = mobius(&a, &a).unwrap();
        assert!(at_a.norm() < 1e-15);
    }

    #[test]
    fn mobius_with_zero_center_is_negation() {
        let z = p(&[0.3, -0.2, 0.1, 0.4]);
        let w = mobius(&BallPoint::origin(2), &z).unwrap();
        for (x, y) in w.coords().iter().zip(z.coords()) {
            assert_eq!(*x, -y);
        }
    }

    #[test]
    fn mobius_scalar_case_matches_disc_automorphism() {
        // n = 1: P_a = identity, so p_a(z) = (a - z)/(1 - z conj(a)).
        let a = p(&[0.5, 0.0]);
        let z = p(&[0.0, 0.25]);
        let w = mobius(&a, &z).unwrap();
        let num = (0.5, -0.25);
        let den = (1.0, -0.125);
        let d2 = den.0 * den.0 + den.1 * den.1;
        let expected = (
            (num.0 * den.0 + num.1 * den.1) / d2,
            (num.1 * den.0 - num.0 * den.1) / d2,
        );
        assert_abs_diff_eq!(w.coords()[0], expected.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.coords()[1], expected.1, epsilon = 1e-15);
    }

    #[test]
    fn mobius_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_point(&mut rng, 2, 0.95);
            let z = random_point(&mut rng, 2, 0.95);
            let back = mobius(&a, &mobius(&a, &z).unwrap()).unwrap();
            for (x, y) in back.coords().iter().zip(z.coords()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mobius_rejects_center_outside_ball() {
        let a = BallPoint {
            coords: vec![1.0, 0.0],
        };
        assert!(mobius(&a, &p(&[0.1, 0.0])).is_err());
    }

    #[test]
    fn distance_closed_forms() {
        let o = BallPoint::origin(2);
        let d = geodesic_distance(&o, &p(&[0.3, 0.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(d, 0.3f64.atanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(d, 0.309_519_604_203_111_7, epsilon = 1e-15);
        let r: f64 = 1.7;
        let d = geodesic_distance(&o, &p(&[0.0, 0.0, (r / 2.0).tanh(), 0.0])).unwrap();
        assert_abs_diff_eq!(d, r / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn distance_symmetric_triangle_and_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let a = random_point(&mut rng, 2, 0.9);
            let x = random_point(&mut rng, 2, 0.9);
            let y = random_point(&mut rng, 2, 0.9);
            let z = random_point(&mut rng, 2, 0.9);
            let dxy = geodesic_distance(&x, &y).unwrap();
            assert_abs_diff_eq!(dxy, geodesic_distance(&y, &x).unwrap(), epsilon = 1e-12);
            let dxz = geodesic_distance(&x, &z).unwrap();
            let dzy = geodesic_distance(&z, &y).unwrap();
            assert!(dxy <= dxz + dzy + 1e-10);
            let img =
                geodesic_distance(&mobius(&a, &x).unwrap(), &mobius(&a, &y).unwrap()).unwrap();
            assert_abs_diff_eq!(img, dxy, epsilon = 1e-10);
        }
        assert_eq!(
            geodesic_distance(&p(&[0.2, 0.1]), &p(&[0.2, 0.1])).unwrap(),
            0.0
        );
    }

    #[test]
    fn density_values_and_monotonicity() {
        assert_eq!(bergman_density(&BallPoint::origin(2)).unwrap(), 1.0);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            bergman_density(&p(&[h, 0.0, 0.0, 0.0])).unwrap(),
            8.0,
            epsilon = 1e-12
        );
        let mut last = 0.0;
        for i in 0..100 {
            let rr = i as f64 / 100.0;
            let d = bergman_density(&p(&[0.0, rr * 0.6, 0.0, rr * 0.8])).unwrap();
            assert!(d > last);
            last = d;
        }
    }
}
