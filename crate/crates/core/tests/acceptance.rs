//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iso_bergman::ball_geometry::{geodesic_distance, mobius, BallPoint};
use iso_bergman::barycenter::{
    project_constraints, solve_barycenter, solve_barycenter_from, MassCloud, DEFAULT_RADIAL_NODES,
    DEFAULT_TOLERANCE,
};
use iso_bergman::cli::pure_mode_checks;
use iso_bergman::domain::NearlySphericalDomain;
use iso_bergman::fuglede::constants::c_bound;
use iso_bergman::fuglede::lemma::lemma_suite;
use iso_bergman::fuglede::{constant_scans, verify_theorem};
use iso_bergman::hopf_sphere::{ModeIndex, ModeTables, SpectralField, SphereQuadrature};

const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> iso_bergman::Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn ball_formulas() -> iso_bergman::Result<Outcome> {
    let quad = SphereQuadrature::new(32, 24, 24)?;
    let mut worst = 0.0f64;
    for r in [0.5, 1.0, 2.0, 3.0] {
        let t = (r / 2.0f64).tanh();
        let volume = PI * PI / 2.0 * (r / 2.0f64).sinh().powi(4);
        let perimeter = 2.0 * PI * PI * t.powi(3) / (1.0 - t * t).powi(2);
        let samples = NearlySphericalDomain::ball(r)?.samples(&quad);
        worst = worst
            .max(rel(samples.volume(&quad), volume))
            .max(rel(samples.perimeter(&quad), perimeter));
    }
    outcome(
        worst <= 1e-10,
        format!("max relative error {worst:.2e} (tol 1e-10)"),
    )
}

fn basis() -> iso_bergman::Result<Outcome> {
    let kmax = 6;
    let quad = SphereQuadrature::for_degree(kmax as usize);
    let tables = ModeTables::new(kmax, quad.grid());
    let modes = ModeIndex::up_to(kmax);
    let weights: Vec<f64> = (0..quad.len()).map(|q| quad.weight(q)).collect();
    let values: Vec<Vec<f64>> = modes
        .iter()
        .map(|m| tables.mode_values(m.flat_position()))
        .collect();
    let mut gram = 0.0f64;
    for i in 0..modes.len() {
        for j in i..modes.len() {
            let g: f64 = (0..quad.len())
                .map(|q| weights[q] * values[i][q] * values[j][q])
                .sum();
            gram = gram.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let (mut eigen, mut rotation) = (0.0f64, 0.0f64);
    for m in &modes {
        let s = tables.synthesize(&SpectralField::single_mode(*m, 1.0));
        let grad = quad.integrate_values(&s.tangential_gradient_sq(quad.grid()));
        let rot: Vec<f64> = s.rotation_derivative().iter().map(|x| x * x).collect();
        let rot = quad.integrate_values(&rot);
        let (k, l, mm) = (m.k as f64, m.ell as f64, m.m as f64);
        eigen = eigen.max((grad - k * (k + 2.0)).abs());
        rotation = rotation.max((rot - (l * l + mm * mm)).abs());
    }
    outcome(
        modes.len() == 140 && gram <= 1e-8 && eigen <= 1e-8 && rotation <= 1e-8,
        format!(
            "{} modes; Gram {gram:.2e}, eigenvalue {eigen:.2e}, rotation {rotation:.2e} (tol 1e-8)",
            modes.len()
        ),
    )
}

fn spectral_gap() -> iso_bergman::Result<Outcome> {
    let kmax = 6;
    let suite = lemma_suite(
        200,
        kmax,
        SEED,
        &SphereQuadrature::for_degree(kmax as usize),
    );
    let exact = suite
        .rows
        .iter()
        .all(|g| g.holds_exactly && g.gap >= g.bound && g.slack >= 0.0);
    let min_margin = suite
        .rows
        .iter()
        .map(|g| g.gap - g.bound)
        .fold(f64::INFINITY, f64::min);
    outcome(
        suite.rows.len() == 200 && exact && suite.max_rotation_error <= 1e-8,
        format!(
            "200 fields, min gap - bound {min_margin:.3}; rotation norm error {:.2e} (tol 1e-8); \
             diagonal-only formula off by {:.2e}",
            suite.max_rotation_error, suite.max_diagonal_error
        ),
    )
}

fn random_point(rng: &mut ChaCha8Rng, max_norm: f64) -> BallPoint {
    loop {
        let c: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        if norm(&c) < max_norm {
            return BallPoint::new(c).expect("inside the ball");
        }
    }
}

fn mobius_suite() -> iso_bergman::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut involution, mut invariance) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let a = random_point(&mut rng, 0.9);
        let z = random_point(&mut rng, 0.9);
        let w = random_point(&mut rng, 0.9);
        let back = mobius(&a, &mobius(&a, &z)?)?;
        let diff: Vec<f64> = back
            .coords()
            .iter()
            .zip(z.coords())
            .map(|(x, y)| x - y)
            .collect();
        involution = involution.max(norm(&diff));
        let d = geodesic_distance(&z, &w)?;
        let d_image = geodesic_distance(&mobius(&a, &z)?, &mobius(&a, &w)?)?;
        invariance = invariance.max((d - d_image).abs());
    }
    outcome(
        involution <= 1e-12 && invariance <= 1e-10,
        format!(
            "500 pairs; involution {involution:.2e} (tol 1e-12), distance {invariance:.2e} (tol 1e-10)"
        ),
    )
}

fn barycenter() -> iso_bergman::Result<Outcome> {
    let quad = SphereQuadrature::for_degree(3);
    let mut ball_c = 0.0f64;
    for r in [0.5, 1.0, 2.0] {
        let ball = NearlySphericalDomain::ball(r)?;
        let res = solve_barycenter(&ball, &quad, DEFAULT_TOLERANCE)?;
        ball_c = ball_c.max(norm(&res.c));
        let cloud = MassCloud::new(&ball, &quad, DEFAULT_RADIAL_NODES)?;
        let start = BallPoint::new(vec![0.2, -0.1, 0.05, 0.1])?;
        let res = solve_barycenter_from(&cloud, &start, DEFAULT_TOLERANCE)?;
        ball_c = ball_c.max(norm(&res.c));
    }

    // The barycenter of p_a(E) is p_a(c_E).
    let u = SpectralField::single_mode(ModeIndex::new(1, 1, 0)?, 0.03)
        .add(&SpectralField::single_mode(ModeIndex::new(2, -1, 1)?, 0.02));
    let cloud = MassCloud::new(
        &NearlySphericalDomain::new(1.0, u.clone())?,
        &quad,
        DEFAULT_RADIAL_NODES,
    )?;
    let c = solve_barycenter_from(&cloud, &BallPoint::origin(2), 1e-12)?.point();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pullback = 0.0f64;
    for _ in 0..20 {
        let a = random_point(&mut rng, 0.3);
        let m = cloud.pullback_moment(&a, &mobius(&a, &c)?)?;
        pullback = pullback.max(norm(&m) / cloud.mass());
    }

    let u0 = u.add(&SpectralField::single_mode(ModeIndex::new(3, 2, 1)?, 0.01));
    let once = project_constraints(&u0, 1.0, &quad)?;
    let twice = project_constraints(&once, 1.0, &quad)?;
    let idempotence = once
        .coeffs()
        .iter()
        .zip(twice.coeffs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(
        ball_c <= 1e-9 && pullback <= 1e-8 && idempotence <= 1e-10,
        format!(
            "ball |c| {ball_c:.2e} (tol 1e-9), pullback {pullback:.2e} (tol 1e-8), \
             projection idempotence {idempotence:.2e} (tol 1e-10)"
        ),
    )
}

fn sweep_csv(threads: usize) -> iso_bergman::Result<Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(|| verify_theorem(1.0, 20, 4, SEED, &SphereQuadrature::for_degree(4))?.to_csv())
}

fn main_sweep() -> iso_bergman::Result<Outcome> {
    let start = Instant::now();
    let report = verify_theorem(1.0, 20, 4, SEED, &SphereQuadrature::for_degree(4))?;
    let pure =
        pure_mode_checks(1.0).map_err(|e| iso_bergman::Error::InvalidArgument(e.to_string()))?;
    let elapsed = start.elapsed().as_secs_f64();
    let bound = c_bound(1.0)?;
    let rows_ok = report.skipped.is_empty()
        && report.rows.len() == 20
        && report.rows.iter().all(|r| r.ratio >= bound);
    let pure_ok = pure.iter().all(|p| p.limit > bound);
    let limits: Vec<String> = pure
        .iter()
        .map(|p| format!("k={} {:.5}", p.k, p.limit))
        .collect();
    outcome(
        rows_ok && pure_ok && elapsed <= 60.0,
        format!(
            "C(1) = {bound:.7}; min ratio {:.5} over {} rows, {} skipped; pure-mode limits {}; {elapsed:.1} s (target 60 s)",
            report.min_ratio.unwrap_or(f64::NAN),
            report.rows.len(),
            report.skipped.len(),
            limits.join(", ")
        ),
    )
}

fn scans() -> iso_bergman::Result<Outcome> {
    let rep = constant_scans(5.0)?;
    let h = rep
        .h_max
        .iter()
        .map(|s| (s.k_found - s.k_circ).abs())
        .fold(0.0, f64::max);
    outcome(
        rep.pass(),
        format!(
            "k_circ deviation {h:.2e}; crossover {} sign change(s), |root - B2| {:.2e}; \
             c(r) min increment {:.2e} on (0, 5]",
            rep.crossover.sign_changes,
            (rep.crossover.root - rep.crossover.b2).abs(),
            rep.monotonicity.min_increment
        ),
    )
}

fn determinism() -> iso_bergman::Result<Outcome> {
    let a = sweep_csv(1)?;
    let b = sweep_csv(3)?;
    let c = sweep_csv(1)?;
    outcome(
        a == b && a == c,
        format!(
            "{} bytes, identical across reruns and thread counts: {}",
            a.len(),
            a == b && a == c
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = fn() -> iso_bergman::Result<Outcome>;
    let criteria: [(&str, Criterion); 8] = [
        ("ball formulas", ball_formulas),
        ("eigenmode basis", basis),
        ("spectral gap", spectral_gap),
        ("Mobius suite", mobius_suite),
        ("barycenter", barycenter),
        ("deficit sweep", main_sweep),
        ("constant scans", scans),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "[{}] {} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
