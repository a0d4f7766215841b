//! Numerical checks of the closed-form claims about `H`, `A_0`, `A_1`, `c`.

use serde::Serialize;

use super::constants::{a0, a1, b2, c0_linear, h_ratio, h_ratio_derivative, k_circ};
use crate::error::{Error, Result};

/// Radii at which the maximizer of `H` is located.
pub const H_SCAN_RADII: [f64; 3] = [0.5, 1.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HScan {
    pub r: f64,
    pub k_circ: f64,
    /// Zero of `H'` found by bisection.
    pub k_found: f64,
    pub k_max: f64,
    /// `H(k_∘) >= H(k)` at every scanned `k`.
    pub is_max: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossoverScan {
    pub sign_changes: usize,
    pub root: f64,
    pub b2: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub r0: f64,
    pub points: usize,
    pub min_increment: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub h_max: Vec<HScan>,
    pub crossover: CrossoverScan,
    pub monotonicity: MonotonicityScan,
}

impl ScanReport {
    pub fn pass(&self) -> bool {
        self.h_max.iter().all(|h| h.pass) && self.crossover.pass && self.monotonicity.pass
    }
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    if flo * f(hi)? > 0.0 {
        return Err(Error::SolverFailure {
            iterations: 0,
            residual: flo,
            reason: format!("no sign change on [{lo}, {hi}]"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the maximizer of `H(·; r)` on `[2, k_max]`, where `k_max` is 200
/// or, if `k_∘` lies beyond, `2 k_∘`.
pub fn scan_h(r: f64) -> Result<HScan> {
    let kc = k_circ(r)?;
    let k_max = 200f64.max(2.0 * kc);
    let k_found = bisect(|k| h_ratio_derivative(k, r), 2.0, k_max)?;
    let h_circ = h_ratio(kc, r)?;
    let n = 4000;
    let mut is_max = true;
    for i in 0..=n {
        let k = 2.0 + (k_max - 2.0) * i as f64 / n as f64;
        is_max &= h_ratio(k, r)? <= h_circ * (1.0 + 1e-14);
    }
    let pass = is_max && (k_found - kc).abs() <= 1e-6 * kc.max(1.0);
    Ok(HScan {
        r,
        k_circ: kc,
        k_found,
        k_max,
        is_max,
        pass,
    })
}

/// Sign changes of `A_0 - A_1` on `(0, 10]` and the bisected root.
pub fn scan_crossover() -> Result<CrossoverScan> {
    let d = |r: f64| Ok(a0(r)? - a1(r)?);
    let n = 10_000;
    let grid: Vec<f64> = (1..=n).map(|i| 10.0 * i as f64 / n as f64).collect();
    let mut sign_changes = 0;
    let mut bracket = None;
    for w in grid.windows(2) {
        if d(w[0])?.signum() != d(w[1])?.signum() {
            sign_changes += 1;
            bracket.get_or_insert((w[0], w[1]));
        }
    }
    let (lo, hi) = bracket.ok_or_else(|| Error::SolverFailure {
        iterations: 0,
        residual: f64::NAN,
        reason: "A0 - A1 has no sign change on (0, 10]".into(),
    })?;
    let root = bisect(d, lo, hi)?;
    let b = b2();
    Ok(CrossoverScan {
        sign_changes,
        root,
        b2: b,
        pass: sign_changes == 1 && (root - b).abs() <= 1e-9,
    })
}

/// `c(r)` on the grid `r0·i/1000`, `i = 1..=1000`.
pub fn scan_monotonicity(r0: f64) -> Result<MonotonicityScan> {
    let n = 1000;
    let vals = (1..=n)
        .map(|i| c0_linear(r0 * i as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    let min_increment = vals
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(MonotonicityScan {
        r0,
        points: n,
        min_increment,
        pass: min_increment > 0.0,
    })
}

/// All three scans; the `H` maximizer is located at [`H_SCAN_RADII`] and `r0`.
pub fn constant_scans(r0: f64) -> Result<ScanReport> {
    let mut radii = H_SCAN_RADII.to_vec();
    if !radii.contains(&r0) {
        radii.push(r0);
    }
    Ok(ScanReport {
        h_max: radii.into_iter().map(scan_h).collect::<Result<_>>()?,
        crossover: scan_crossover()?,
        monotonicity: scan_monotonicity(r0)?,
    })
}
