//! Product quadrature on `S^3`: Gauss–Legendre in `ζ = cos 2s`, trapezoid in
//! `t` and `φ`.
//!
//! Since `cos s sin s ds = -dζ/4`, a Gauss rule on `ζ ∈ [-1, 1]` scaled by
//! `1/4` integrates the `s`-part of the surface element exactly for
//! polynomials in `ζ` of degree up to `2 N_s - 1`.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::HopfCoord;
use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term recurrence from Chebyshev initial
/// guesses; converges to machine precision for all practical orders.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product point set in Hopf coordinates, `s` outermost and `φ`
/// innermost in the flat ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
}

impl TensorGrid {
    pub fn len(&self) -> usize {
        self.s.len() * self.t.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of nodes sharing one `s` value.
    pub fn row_len(&self) -> usize {
        self.t.len() * self.phi.len()
    }

    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.t.len() + j) * self.phi.len() + k
    }

    pub fn point(&self, flat: usize) -> HopfCoord {
        let k = flat % self.phi.len();
        let j = (flat / self.phi.len()) % self.t.len();
        let i = flat / self.row_len();
        HopfCoord {
            s: self.s[i],
            t: self.t[j],
            phi: self.phi[k],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = HopfCoord> + '_ {
        (0..self.len()).map(|q| self.point(q))
    }

    /// Evaluates `f` at every node in flat order.
    pub fn evaluate<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(HopfCoord) -> f64 + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|q| f(self.point(q)))
            .collect()
    }
}

/// Product quadrature rule on `S^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereQuadrature {
    grid: TensorGrid,
    s_weights: Vec<f64>,
    t_weight: f64,
    phi_weight: f64,
}

/// Builds the `(N_s, N_t, N_φ)` product rule.
pub fn build_quadrature(n_s: usize, n_t: usize, n_phi: usize) -> Result<SphereQuadrature> {
    SphereQuadrature::new(n_s, n_t, n_phi)
}

impl SphereQuadrature {
    pub fn new(n_s: usize, n_t: usize, n_phi: usize) -> Result<Self> {
        if n_s < 1 || n_t < 2 || n_phi < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature sizes must satisfy N_s >= 1, N_t >= 2, N_phi >= 2 (got {n_s}, {n_t}, {n_phi})"
            )));
        }
        let (zeta, w) = gauss_legendre(n_s);
        // ascending zeta means descending s; reverse so s ascends
        let s: Vec<f64> = zeta.iter().rev().map(|z| 0.5 * z.acos()).collect();
        let s_weights: Vec<f64> = w.iter().rev().map(|w| 0.25 * w).collect();
        let t: Vec<f64> = (0..n_t).map(|j| 2.0 * PI * j as f64 / n_t as f64).collect();
        let phi: Vec<f64> = (0..n_phi)
            .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
            .collect();
        Ok(Self {
            grid: TensorGrid { s, t, phi },
            s_weights,
            t_weight: 2.0 * PI / n_t as f64,
            phi_weight: 2.0 * PI / n_phi as f64,
        })
    }

    /// Default resolution for fields of degree `kmax`:
    /// `(2 kmax + 8, 4 kmax + 8, 4 kmax + 8)`.
    pub fn for_degree(kmax: usize) -> Self {
        Self::new(2 * kmax + 8, 4 * kmax + 8, 4 * kmax + 8).expect("sizes are positive")
    }

    /// Same rule with every axis multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let (a, b, c) = self.sizes();
        Self::new(a * factor, b * factor, c * factor).expect("sizes are positive")
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.grid.s.len(), self.grid.t.len(), self.grid.phi.len())
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Weight of the `s`-row `i`, already including the `t`/`φ` spacing.
    pub fn row_weight(&self, i: usize) -> f64 {
        self.s_weights[i] * self.t_weight * self.phi_weight
    }

    pub fn s_weights(&self) -> &[f64] {
        &self.s_weights
    }

    pub fn t_weight(&self) -> f64 {
        self.t_weight
    }

    pub fn phi_weight(&self) -> f64 {
        self.phi_weight
    }

    pub fn weight(&self, flat: usize) -> f64 {
        self.row_weight(flat / self.grid.row_len())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (HopfCoord, f64)> + '_ {
        (0..self.len()).map(|q| (self.grid.point(q), self.weight(q)))
    }

    /// Whether products of two degree-`kmax` fields are integrated exactly.
    pub fn resolves_degree(&self, kmax: usize) -> bool {
        let (n_s, n_t, n_phi) = self.sizes();
        2 * n_s > kmax && n_t > 2 * kmax && n_phi > 2 * kmax
    }

    /// `Σ w_q f_q` over node values in flat order.
    ///
    /// Rows are reduced in parallel, then summed in row order, so the result
    /// does not depend on the thread count.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let row = self.grid.row_len();
        let partial: Vec<f64> = values
            .par_chunks(row)
            .enumerate()
            .map(|(i, chunk)| self.row_weight(i) * chunk.iter().sum::<f64>())
            .collect();
        partial.iter().sum()
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(HopfCoord) -> f64 + Sync,
    {
        self.integrate_values(&self.grid.evaluate(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf_sphere::SPHERE_AREA;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_is_exact_for_low_degree() {
        for n in 1..40 {
            let (x, w) = gauss_legendre(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..(2 * n).min(30) {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert_abs_diff_eq!(q, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn total_mass_is_sphere_area() {
        for &(a, b, c) in &[(1, 2, 2), (8, 16, 16), (32, 24, 24), (61, 7, 9)] {
            let q = build_quadrature(a, b, c).unwrap();
            assert_abs_diff_eq!(q.integrate(|_| 1.0), SPHERE_AREA, epsilon = 1e-12);
            assert!(q.s_weights().iter().all(|w| *w > 0.0));
            assert!(q
                .grid()
                .s
                .iter()
                .all(|s| *s > 0.0 && *s < std::f64::consts::FRAC_PI_2));
        }
    }

    #[test]
    fn coordinate_second_moment() {
        let q = build_quadrature(8, 8, 8).unwrap();
        let v = q.integrate(|p| p.to_cartesian()[0].powi(2));
        assert_abs_diff_eq!(v, SPHERE_AREA / 4.0, epsilon = 1e-12);
        let v = q.integrate(|p| p.to_cartesian()[3].powi(2));
        assert_abs_diff_eq!(v, SPHERE_AREA / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn fourier_modes_integrate_to_zero() {
        let q = build_quadrature(8, 8, 8).unwrap();
        let v = q.integrate(|p| (3.0 * p.t).cos() * (2.0 * p.phi).cos());
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_sizes_are_rejected() {
        assert!(build_quadrature(0, 4, 4).is_err());
        assert!(build_quadrature(4, 1, 4).is_err());
        assert!(build_quadrature(4, 4, 1).is_err());
    }

    #[test]
    fn flat_index_matches_point() {
        let q = build_quadrature(3, 4, 5).unwrap();
        let g = q.grid();
        let f = g.flat_index(2, 1, 3);
        let p = g.point(f);
        assert_eq!((p.s, p.t, p.phi), (g.s[2], g.t[1], g.phi[3]));
    }
}
