//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 config parse, 4 constraint violation,
//! 5 solver failure, 6 verification failure, 7 I/O.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::ball_geometry::BallPoint;
use crate::barycenter::{
    constraint_residuals, project_constraints, solve_barycenter_from, MassCloud,
};
use crate::domain::{ball_perimeter, ball_volume, deficit, NearlySphericalDomain};
use crate::error::Error;
use crate::fuglede::constants::{c_bound, ConstantsTable};
use crate::fuglede::lemma::{lemma_suite, LemmaSuite};
use crate::fuglede::scans::{constant_scans, ScanReport};
use crate::fuglede::verify::{fmt_float, second_variation, verify_theorem, VerificationReport};
use crate::hopf_sphere::{ModeIndex, SpectralField, SphereQuadrature};
pub use config::{ProfileSpec, RunConfig};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ISO_BERGMAN_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("constraint violation: {0}")]
    Constraint(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Constraint(_) => 4,
            CliError::Solver(_) => 5,
            CliError::Failed(_) => 6,
            CliError::Io(_) => 7,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Inadmissible(_) | Error::VolumeConstraint { .. } => CliError::Constraint(msg),
            Error::SolverFailure { .. } | Error::Divergence(_) => CliError::Solver(msg),
            _ => CliError::Usage(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "iso-bergman",
    version,
    about = "Isoperimetric deficit of nearly spherical domains in the Bergman ball of C^2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    /// Output file (written atomically); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to csv, except json for scans.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume and perimeter of B_r: closed form against quadrature.
    BallStats {
        /// Geodesic radius.
        #[arg(long)]
        r: f64,
        /// Quadrature sizes N_s,N_t,N_phi.
        #[arg(long, value_parser = parse_quad, default_value = "32,24,24")]
        quad: [usize; 3],
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Volume, perimeter, deficit, norms and barycenter of a configured domain.
    Metrics {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured radius.
        #[arg(long)]
        r: Option<f64>,
        /// Quadrature sizes; defaults to the rule for the field degree.
        #[arg(long, value_parser = parse_quad)]
        quad: Option<[usize; 3]>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random sweep of D(E)/|u|^2_{W12} against C(r0), with the scans and the
    /// spectral-gap suite.
    Verify {
        /// Largest radius; sample radii are drawn from [r0/4, r0].
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Highest degree of the random perturbations.
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        /// Sample i uses seed + i.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Quadrature sizes; defaults to the rule for the field degree.
        #[arg(long, value_parser = parse_quad)]
        quad: Option<[usize; 3]>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spectral gap on random fields.
    Lemma {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        /// Sample i uses seed + i.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Quadrature sizes; defaults to the rule for the field degree.
        #[arg(long, value_parser = parse_quad)]
        quad: Option<[usize; 3]>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximizer of H, the A0/A1 crossover and monotonicity of c(r).
    Scans {
        /// Upper end of the monotonicity scan.
        #[arg(long, default_value_t = 5.0)]
        r0: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_quad(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected Ns,Nt,Nphi (got {s:?})"));
    }
    let mut out = [0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| format!("quadrature sizes must be positive integers (got {p:?})"))?;
    }
    Ok(out)
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive and finite (got {v})"
        )))
    }
}

fn quadrature(sizes: Option<[usize; 3]>, kmax: u32) -> Result<SphereQuadrature, CliError> {
    match sizes {
        Some([a, b, c]) => Ok(SphereQuadrature::new(a, b, c)?),
        None => Ok(SphereQuadrature::for_degree(kmax as usize)),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let err = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    b.push(b'\n');
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallStat {
    pub r: f64,
    pub quantity: &'static str,
    pub closed_form: f64,
    pub quadrature: f64,
    pub difference: f64,
}

pub fn cmd_ball_stats(r: f64, quad: &SphereQuadrature) -> Result<Vec<BallStat>, CliError> {
    check_positive("r", r)?;
    let ball = NearlySphericalDomain::ball(r)?;
    let samples = ball.samples(quad);
    let stat = |quantity, closed_form: f64, quadrature: f64| BallStat {
        r,
        quantity,
        closed_form,
        quadrature,
        difference: (quadrature - closed_form) / closed_form,
    };
    Ok(vec![
        stat("volume", ball_volume(r)?, samples.volume(quad)),
        stat("perimeter", ball_perimeter(r)?, samples.perimeter(quad)),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub r: f64,
    pub volume: f64,
    pub perimeter: f64,
    pub ball_volume: f64,
    pub ball_perimeter: f64,
    pub deficit: f64,
    pub l2_sq: f64,
    pub grad_sq: f64,
    pub w12_sq: f64,
    pub w1inf: f64,
    pub barycenter: [f64; 4],
    pub barycenter_residual: f64,
    pub volume_residual: f64,
    pub moment_residual: f64,
    pub resolved: bool,
    pub u: crate::hopf_sphere::SpectralFieldRecord,
}

impl MetricsRecord {
    const HEADER: [&'static str; 18] = [
        "r",
        "volume",
        "perimeter",
        "ball_volume",
        "ball_perimeter",
        "D",
        "l2_sq",
        "grad_sq",
        "w12_sq",
        "w1inf",
        "c1",
        "c2",
        "c3",
        "c4",
        "barycenter_residual",
        "volume_residual",
        "moment_residual",
        "resolved",
    ];

    fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> = [
            self.r,
            self.volume,
            self.perimeter,
            self.ball_volume,
            self.ball_perimeter,
            self.deficit,
            self.l2_sq,
            self.grad_sq,
            self.w12_sq,
            self.w1inf,
        ]
        .iter()
        .chain(&self.barycenter)
        .chain(&[
            self.barycenter_residual,
            self.volume_residual,
            self.moment_residual,
        ])
        .map(|v| fmt_float(*v))
        .collect();
        row.push(self.resolved.to_string());
        row
    }
}

pub fn cmd_metrics(cfg: &RunConfig) -> Result<MetricsRecord, CliError> {
    let u0 = cfg.profile()?;
    let quad = quadrature(cfg.quad, u0.kmax().max(1))?;
    let u = if cfg.project {
        project_constraints(&u0, cfg.r, &quad)?
    } else {
        u0
    };
    let domain = NearlySphericalDomain::new(cfg.r, u.clone())?;
    let metrics = deficit(&domain, &quad)?;
    let residuals = constraint_residuals(&u, cfg.r, &quad)?;
    let cloud = MassCloud::new(&domain, &quad, cfg.radial_nodes)?;
    let bary = solve_barycenter_from(&cloud, &BallPoint::origin(2), cfg.tolerance)?;
    if !bary.converged {
        return Err(CliError::Solver(format!(
            "barycenter did not converge (residual {:e} after {} steps)",
            bary.residual, bary.iterations
        )));
    }
    Ok(MetricsRecord {
        r: cfg.r,
        volume: metrics.volume,
        perimeter: metrics.perimeter,
        ball_volume: metrics.ball_volume,
        ball_perimeter: metrics.ball_perimeter,
        deficit: metrics.deficit,
        l2_sq: metrics.norms.l2_sq,
        grad_sq: metrics.norms.grad_sq,
        w12_sq: metrics.norms.w12_sq,
        w1inf: metrics.norms.w1inf,
        barycenter: bary.c,
        barycenter_residual: bary.residual,
        volume_residual: residuals.volume,
        moment_residual: residuals.moment.iter().map(|v| v * v).sum::<f64>().sqrt(),
        resolved: metrics.resolved,
        u: u.to_record(),
    })
}

/// Extrapolated ratio for one pure mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureModeCheck {
    pub k: u32,
    pub ell: i32,
    pub m: i32,
    pub limit: f64,
    pub quadratic_regime: bool,
    pub pass: bool,
}

/// Amplitudes for the pure-mode extrapolation.
pub const PURE_MODE_EPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `lim q(ε)` for `Ψ_{2,1,1}` and `Ψ_{3,2,1}` at radius `r0`.
pub fn pure_mode_checks(r0: f64) -> Result<Vec<PureModeCheck>, CliError> {
    let bound = c_bound(r0)?;
    [(2, 1, 1), (3, 2, 1)]
        .into_iter()
        .map(|(k, l, m)| {
            let idx = ModeIndex::new(k, l, m)?;
            let quad = SphereQuadrature::for_degree(k as usize);
            let sv = second_variation(
                r0,
                &SpectralField::single_mode(idx, 1.0),
                &PURE_MODE_EPS,
                &quad,
            )?;
            Ok(PureModeCheck {
                k: idx.k,
                ell: idx.ell,
                m: idx.m,
                limit: sv.limit,
                quadratic_regime: sv.quadratic_regime,
                pass: sv.limit >= bound,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub r0: f64,
    pub samples: usize,
    pub kmax: u32,
    pub seed: u64,
    pub eps: Vec<f64>,
    pub constants: ConstantsTable,
    pub rows: usize,
    pub skipped: usize,
    pub failed_rows: usize,
    pub min_ratio: Option<f64>,
    pub c_r0: f64,
    pub c1_r0: f64,
    pub c1_violations: Option<usize>,
    pub sweep_pass: bool,
    pub pure_modes: Vec<PureModeCheck>,
    pub scans_pass: bool,
    pub lemma_pass: bool,
    pub lemma_max_rotation_error: f64,
    pub pass: bool,
}

pub struct VerifyOutcome {
    pub report: VerificationReport,
    pub summary: VerifySummary,
    pub scans: ScanReport,
    pub lemma: LemmaSuite,
}

/// Fields and seed of the spectral-gap suite run by `verify`.
pub const VERIFY_LEMMA_FIELDS: usize = 200;
pub const VERIFY_LEMMA_KMAX: u32 = 6;

pub fn cmd_verify(
    r0: f64,
    samples: usize,
    kmax: u32,
    seed: u64,
    quad: &SphereQuadrature,
) -> Result<VerifyOutcome, CliError> {
    check_positive("r0", r0)?;
    if kmax < 2 {
        return Err(CliError::Usage(format!("--kmax must be >= 2 (got {kmax})")));
    }
    let report = verify_theorem(r0, samples, kmax, seed, quad)?;
    let pure_modes = pure_mode_checks(r0)?;
    let scans = constant_scans(r0)?;
    let lemma = lemma_suite(
        VERIFY_LEMMA_FIELDS,
        VERIFY_LEMMA_KMAX,
        seed,
        &SphereQuadrature::for_degree(VERIFY_LEMMA_KMAX as usize),
    );
    let sweep_pass = report.all_pass;
    let pure_pass = pure_modes.iter().all(|p| p.pass);
    let summary = VerifySummary {
        r0,
        samples,
        kmax,
        seed,
        eps: report.eps.clone(),
        constants: ConstantsTable::new(r0)?,
        rows: report.rows.len(),
        skipped: report.skipped.len(),
        failed_rows: report.rows.iter().filter(|r| !r.pass).count(),
        min_ratio: report.min_ratio,
        c_r0: report.c_r0,
        c1_r0: report.c1_r0,
        c1_violations: report.c1_violations,
        sweep_pass,
        pure_modes,
        scans_pass: scans.pass(),
        lemma_pass: lemma.pass,
        lemma_max_rotation_error: lemma.max_rotation_error,
        pass: sweep_pass && pure_pass && scans.pass() && lemma.pass,
    };
    Ok(VerifyOutcome {
        report,
        summary,
        scans,
        lemma,
    })
}

/// `<out>.summary.json` next to the CSV.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".summary.json");
    out.with_file_name(name)
}

fn lemma_csv(suite: &LemmaSuite) -> Result<Vec<u8>, CliError> {
    let rows: Vec<Vec<String>> = suite
        .rows
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut row = vec![i.to_string()];
            row.extend(
                [
                    g.gap,
                    g.bound,
                    g.slack,
                    g.rotation_spectral,
                    g.rotation_diagonal,
                    g.rotation_quadrature,
                ]
                .map(fmt_float),
            );
            row.push(g.holds_exactly.to_string());
            row
        })
        .collect();
    csv_bytes(
        &[
            "index",
            "gap",
            "bound",
            "slack",
            "rotation_spectral",
            "rotation_diagonal",
            "rotation_quadrature",
            "holds_exactly",
        ],
        &rows,
    )
}

fn scans_csv(rep: &ScanReport) -> Result<Vec<u8>, CliError> {
    let mut rows: Vec<Vec<String>> = rep
        .h_max
        .iter()
        .map(|h| {
            vec![
                "h_max".into(),
                fmt_float(h.r),
                fmt_float(h.k_circ),
                fmt_float(h.k_found),
                h.pass.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "crossover".into(),
        String::new(),
        fmt_float(rep.crossover.b2),
        fmt_float(rep.crossover.root),
        rep.crossover.pass.to_string(),
    ]);
    rows.push(vec![
        "monotonicity".into(),
        fmt_float(rep.monotonicity.r0),
        fmt_float(0.0),
        fmt_float(rep.monotonicity.min_increment),
        rep.monotonicity.pass.to_string(),
    ]);
    csv_bytes(&["check", "r", "expected", "found", "pass"], &rows)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BallStats { r, quad, output } => {
            check_positive("r", r)?;
            let q = quadrature(Some(quad), 0)?;
            let stats = cmd_ball_stats(r, &q)?;
            let bytes = match output.format.unwrap_or_default() {
                OutputFormat::Json => json_bytes(&stats)?,
                OutputFormat::Csv => {
                    let rows: Vec<Vec<String>> = stats
                        .iter()
                        .map(|s| {
                            vec![
                                fmt_float(s.r),
                                s.quantity.to_string(),
                                fmt_float(s.closed_form),
                                fmt_float(s.quadrature),
                                fmt_float(s.difference),
                            ]
                        })
                        .collect();
                    csv_bytes(
                        &["r", "quantity", "closed_form", "quadrature", "difference"],
                        &rows,
                    )?
                }
            };
            emit(output.out.as_deref(), &bytes)
        }
        Command::Metrics {
            config,
            r,
            quad,
            output,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            let mut cfg = RunConfig::parse(&text)?;
            if let Some(r) = r {
                check_positive("r", r)?;
                cfg.r = r;
            }
            if quad.is_some() {
                cfg.quad = quad;
            }
            let rec = cmd_metrics(&cfg)?;
            let format = output.format.or(cfg.format).unwrap_or_default();
            let bytes = match format {
                OutputFormat::Json => json_bytes(&rec)?,
                OutputFormat::Csv => csv_bytes(&MetricsRecord::HEADER, &[rec.csv_row()])?,
            };
            emit(output.out.as_deref().or(cfg.out.as_deref()), &bytes)
        }
        Command::Verify {
            r0,
            samples,
            kmax,
            seed,
            quad,
            output,
        } => {
            check_positive("r0", r0)?;
            let q = quadrature(quad, kmax)?;
            let outcome = cmd_verify(r0, samples, kmax, seed, &q)?;
            let main = match output.format.unwrap_or_default() {
                OutputFormat::Csv => outcome.report.to_csv()?,
                OutputFormat::Json => json_bytes(&outcome.report)?,
            };
            let summary = json_bytes(&outcome.summary)?;
            match output.out {
                Some(p) => {
                    write_atomic(&p, &main)?;
                    write_atomic(&summary_path(&p), &summary)?;
                }
                None => {
                    emit(None, &main)?;
                    std::io::stderr()
                        .write_all(&summary)
                        .map_err(|e| CliError::Io(e.to_string()))?;
                }
            }
            if outcome.summary.pass {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "sweep {} ({} failing rows, {} skipped), pure modes {}, scans {}, lemma {}",
                    outcome.summary.sweep_pass,
                    outcome.summary.failed_rows,
                    outcome.summary.skipped,
                    outcome.summary.pure_modes.iter().all(|p| p.pass),
                    outcome.summary.scans_pass,
                    outcome.summary.lemma_pass
                )))
            }
        }
        Command::Lemma {
            samples,
            kmax,
            seed,
            quad,
            output,
        } => {
            let q = quadrature(quad, kmax)?;
            let suite = lemma_suite(samples, kmax, seed, &q);
            let bytes = match output.format.unwrap_or_default() {
                OutputFormat::Csv => lemma_csv(&suite)?,
                OutputFormat::Json => json_bytes(&suite)?,
            };
            emit(output.out.as_deref(), &bytes)?;
            if suite.pass {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "spectral gap suite (max rotation error {:e})",
                    suite.max_rotation_error
                )))
            }
        }
        Command::Scans { r0, output } => {
            check_positive("r0", r0)?;
            let rep = constant_scans(r0)?;
            let bytes = match output.format.unwrap_or(OutputFormat::Json) {
                OutputFormat::Csv => scans_csv(&rep)?,
                OutputFormat::Json => json_bytes(&rep)?,
            };
            emit(output.out.as_deref(), &bytes)?;
            if rep.pass() {
                Ok(())
            } else {
                Err(CliError::Failed("constant scans".into()))
            }
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("iso-bergman: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_flag() {
        assert_eq!(parse_quad("8, 12,12").unwrap(), [8, 12, 12]);
        assert!(parse_quad("8,12").is_err() && parse_quad("0,1,1").is_err());
    }

    #[test]
    fn ball_stats_match() {
        let q = SphereQuadrature::new(32, 24, 24).unwrap();
        for s in cmd_ball_stats(1.0, &q).unwrap() {
            assert!(s.difference.abs() < 1e-10);
        }
        assert_eq!(cmd_ball_stats(0.0, &q).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn error_mapping() {
        let e: CliError = Error::VolumeConstraint { residual: 1.0 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = Error::SolverFailure {
            iterations: 1,
            residual: 1.0,
            reason: String::new(),
        }
        .into();
        assert_eq!(e.exit_code(), 5);
    }

    #[test]
    fn summary_next_to_csv() {
        assert_eq!(
            summary_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.csv.summary.json")
        );
    }

    #[test]
    fn unprojected_profile_is_a_constraint_violation() {
        let cfg = RunConfig::parse(
            r#"{"r": 1, "project": false,
                "u": {"family": "mode", "k": 2, "ell": 1, "m": 1, "amplitude": 0.01}}"#,
        )
        .unwrap();
        assert_eq!(cmd_metrics(&cfg).unwrap_err().exit_code(), 4);
    }
}
