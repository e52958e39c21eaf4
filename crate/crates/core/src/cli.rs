//! `rcm` command line: `mean`, `compare` and `oracle` over a JSON problem file.
//!
//! Exit codes: 0 converged, 1 input error, 2 ball violation, 3 cut locus,
//! 4 iteration limit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::closed_form::{cos_center_sphere, embed_project_center_hyperbolic, embed_project_center_sphere};
use crate::error::Error;
use crate::manifold::{frechet_value, AmbientPoint, WeightedSample};
use crate::solver::{solve_center, BallCheck, ConvergenceReport, SolverConfig, Status};
use crate::spaces::{ModelSpace, NormFlavor, SpaceKind};
use crate::verification::{grid_oracle_center, OracleGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BALL_VIOLATION: i32 = 2;
pub const EXIT_CUT_LOCUS: i32 = 3;
pub const EXIT_MAX_ITERATIONS: i32 = 4;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => EXIT_OK,
        Status::BallViolation => EXIT_BALL_VIOLATION,
        Status::CutLocus => EXIT_CUT_LOCUS,
        Status::MaxIterationsReached => EXIT_MAX_ITERATIONS,
    }
}

// ---- problem file -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KindSpec {
    Euclidean,
    Sphere,
    Hyperboloid,
    #[serde(alias = "so")]
    SpecialOrthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlavorSpec {
    #[default]
    Frobenius,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BallCheckSpec {
    Enforce,
    Warn,
    Skip,
}

impl From<BallCheckSpec> for BallCheck {
    fn from(b: BallCheckSpec) -> Self {
        match b {
            BallCheckSpec::Enforce => BallCheck::Enforce,
            BallCheckSpec::Warn => BallCheck::Warn,
            BallCheckSpec::Skip => BallCheck::Skip,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub kind: KindSpec,
    /// Intrinsic dimension; `n(n−1)/2` for SO(n).
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_flavor: Option<FlavorSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub step_scale: Option<f64>,
    pub ball_check: Option<BallCheckSpec>,
    pub radius_override: Option<f64>,
}

/// The JSON problem file. SO(n) points are flat row-major `n·n` arrays.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub manifold: ManifoldSpec,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub masses: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: Option<SolverSpec>,
}

pub struct Problem {
    pub space: ModelSpace,
    pub sample: WeightedSample,
    pub config: SolverConfig,
}

fn rotation_size(dim: usize) -> Option<usize> {
    (2..=crate::spaces::MAX_ROTATION_SIZE).find(|n| n * (n - 1) / 2 == dim)
}

impl ManifoldSpec {
    pub fn space(&self) -> Result<ModelSpace, String> {
        let flavor = match self.norm_flavor.unwrap_or_default() {
            FlavorSpec::Frobenius => NormFlavor::Frobenius,
            FlavorSpec::Operator => NormFlavor::Operator,
        };
        let (kind, n) = match self.kind {
            KindSpec::Euclidean => (SpaceKind::Euclidean, self.dim),
            KindSpec::Sphere => (SpaceKind::Sphere, self.dim),
            KindSpec::Hyperboloid => (SpaceKind::Hyperboloid, self.dim),
            KindSpec::SpecialOrthogonal => {
                let n = rotation_size(self.dim).ok_or_else(|| {
                    format!(
                        "manifold.dim = {} is not n(n-1)/2 for any supported SO(n), 2 <= n <= {}",
                        self.dim,
                        crate::spaces::MAX_ROTATION_SIZE
                    )
                })?;
                (SpaceKind::SpecialOrthogonal, n)
            }
        };
        ModelSpace::new(kind, n, flavor).map_err(|e| format!("manifold: {e}"))
    }
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed problem spec: {e}"))
    }

    pub fn into_problem(self) -> Result<Problem, String> {
        let space = self.manifold.space()?;
        let mut points = Vec::with_capacity(self.points.len());
        for (i, coords) in self.points.into_iter().enumerate() {
            let p = space.point(coords).map_err(|e| match e {
                Error::InvalidPoint { reason, .. } => format!("points[{i}]: {reason}"),
                other => format!("points[{i}]: {other}"),
            })?;
            points.push(p);
        }
        let sample = WeightedSample::new(&space, points, self.masses).map_err(|e| match e {
            Error::InvalidPoint { index: Some(i), reason } => format!("points[{i}]: {reason}"),
            Error::InvalidMass { index, value } => format!("masses[{index}]: {value} is not a positive finite mass"),
            other => other.to_string(),
        })?;
        let s = self.solver.unwrap_or_default();
        let d = SolverConfig::default();
        let config = SolverConfig {
            tolerance: s.tolerance.unwrap_or(d.tolerance),
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            step_scale: s.step_scale.unwrap_or(d.step_scale),
            ball_check: s.ball_check.map(Into::into).unwrap_or(d.ball_check),
            radius_override: s.radius_override,
        };
        Ok(Problem { space, sample, config })
    }
}

// ---- output -----------------------------------------------------------------

/// A real printed with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

#[derive(Serialize)]
struct BallOut {
    radius_used: Real,
    max_point_distance: Real,
    ok: bool,
}

#[derive(Serialize)]
struct MeanOut {
    manifold: ManifoldSpec,
    center: Vec<Real>,
    status: &'static str,
    iterations: usize,
    gradient_norm: Real,
    frechet_value: Real,
    step_halvings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball: Option<BallOut>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl MeanOut {
    fn new(manifold: ManifoldSpec, r: &ConvergenceReport) -> Self {
        let last = r.final_entry();
        Self {
            manifold,
            center: reals(r.center.coords()),
            status: r.status.name(),
            iterations: r.iterations,
            gradient_norm: Real(last.gradient_norm),
            frechet_value: Real(last.frechet_value),
            step_halvings: r.step_halvings,
            ball: r.ball.map(|b| BallOut {
                radius_used: Real(b.radius_used),
                max_point_distance: Real(b.max_point_distance),
                ok: b.ok,
            }),
            warnings: r.warnings.clone(),
            detail: r.detail.clone(),
        }
    }
}

#[derive(Serialize)]
struct CenterOut {
    name: &'static str,
    center: Vec<Real>,
    frechet_value: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
}

#[derive(Serialize)]
struct DistanceOut {
    a: &'static str,
    b: &'static str,
    distance: Real,
}

#[derive(Serialize)]
struct CompareOut {
    manifold: ManifoldSpec,
    centers: Vec<CenterOut>,
    distances: Vec<DistanceOut>,
}

#[derive(Serialize)]
struct OracleOut {
    manifold: ManifoldSpec,
    oracle: Vec<Real>,
    oracle_frechet_value: Real,
    resolution: usize,
    resolution_bound: Real,
    solver_center: Vec<Real>,
    solver_status: &'static str,
    solver_frechet_value: Real,
    distance: Real,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output structs serialize");
    s.push('\n');
    s
}

pub fn trace_csv(r: &ConvergenceReport) -> String {
    let mut out = String::from("iteration,gradient_norm,frechet_value\n");
    for t in &r.trace {
        writeln!(out, "{},{:.16e},{:.16e}", t.iteration, t.gradient_norm, t.frechet_value)
            .expect("writing to a String");
    }
    out
}

// ---- commands ---------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(name = "rcm", about = "Riemannian center of mass on model spaces", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SolverFlags {
    /// Euler step scale in (0, 1]
    #[arg(long)]
    pub step_scale: Option<f64>,
    /// Stop when the field norm drops to this
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub ball_check: Option<BallCheckSpec>,
}

impl SolverFlags {
    fn apply(&self, config: &mut SolverConfig) {
        if let Some(s) = self.step_scale {
            config.step_scale = s;
        }
        if let Some(t) = self.tolerance {
            config.tolerance = t;
        }
        if let Some(b) = self.ball_check {
            config.ball_check = b.into();
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the center of mass and print it with a convergence summary
    Mean {
        spec: PathBuf,
        /// Write the per-iteration trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Compare the Karcher, embed-project and cos-adapted centers (Sⁿ, Hⁿ)
    Compare {
        spec: PathBuf,
        #[command(flatten)]
        flags: SolverFlags,
    },
    /// Brute-force grid minimization of the Fréchet function
    Oracle {
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[command(flatten)]
        flags: SolverFlags,
    },
}

struct Failure(i32, String);

fn input_error(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

fn load(path: &Path, flags: &SolverFlags) -> Result<(ManifoldSpec, Problem), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let spec = ProblemSpec::parse(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let manifold = spec.manifold.clone();
    let mut problem = spec
        .into_problem()
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    flags.apply(&mut problem.config);
    problem
        .config
        .validate()
        .map_err(|e| input_error(e.to_string()))?;
    Ok((manifold, problem))
}

fn cmd_mean(spec: &Path, trace: Option<&Path>, flags: &SolverFlags) -> Result<(i32, String), Failure> {
    let (manifold, p) = load(spec, flags)?;
    let report = solve_center(&p.space, &p.sample, &p.config, None).map_err(|e| input_error(e.to_string()))?;
    if let Some(path) = trace {
        std::fs::write(path, trace_csv(&report))
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    Ok((exit_code(report.status), to_json(&MeanOut::new(manifold, &report))))
}

fn cmd_compare(spec: &Path, flags: &SolverFlags) -> Result<(i32, String), Failure> {
    let (manifold, p) = load(spec, flags)?;
    let (space, sample) = (&p.space, &p.sample);
    if !matches!(space.kind(), SpaceKind::Sphere | SpaceKind::Hyperboloid) {
        return Err(input_error(format!(
            "compare needs a sphere or hyperboloid, got {}",
            space.kind().name()
        )));
    }
    let karcher = solve_center(space, sample, &p.config, None).map_err(|e| input_error(e.to_string()))?;
    let mut named: Vec<(&'static str, AmbientPoint)> = vec![("karcher", karcher.center.clone())];
    let mut centers = vec![CenterOut {
        name: "karcher",
        center: reals(karcher.center.coords()),
        frechet_value: Real(frechet_value(space, sample, &karcher.center)),
        status: Some(karcher.status.name()),
        iterations: Some(karcher.iterations),
    }];
    let projected = if space.kind() == SpaceKind::Sphere {
        embed_project_center_sphere(sample)
    } else {
        embed_project_center_hyperbolic(sample)
    }
    .map_err(|e| input_error(e.to_string()))?;
    centers.push(CenterOut {
        name: "embed_project",
        center: reals(projected.coords()),
        frechet_value: Real(frechet_value(space, sample, &projected)),
        status: None,
        iterations: None,
    });
    named.push(("embed_project", projected));
    if space.kind() == SpaceKind::Sphere {
        let cos = cos_center_sphere(sample, &p.config).map_err(|e| input_error(e.to_string()))?;
        centers.push(CenterOut {
            name: "cos_adapted",
            center: reals(cos.center.coords()),
            frechet_value: Real(frechet_value(space, sample, &cos.center)),
            status: Some(cos.status.name()),
            iterations: Some(cos.iterations),
        });
        named.push(("cos_adapted", cos.center));
    }
    let mut distances = Vec::new();
    for i in 0..named.len() {
        for j in i + 1..named.len() {
            distances.push(DistanceOut {
                a: named[i].0,
                b: named[j].0,
                distance: Real(space.dist(&named[i].1, &named[j].1)),
            });
        }
    }
    Ok((EXIT_OK, to_json(&CompareOut { manifold, centers, distances })))
}

fn cmd_oracle(spec: &Path, resolution: usize, flags: &SolverFlags) -> Result<(i32, String), Failure> {
    let (manifold, p) = load(spec, flags)?;
    let grid = OracleGrid::around_sample(&p.space, &p.sample, resolution).map_err(|e| input_error(e.to_string()))?;
    let oracle = grid_oracle_center(&p.space, &p.sample, &grid).map_err(|e| input_error(e.to_string()))?;
    let solved = solve_center(&p.space, &p.sample, &p.config, None).map_err(|e| input_error(e.to_string()))?;
    let out = OracleOut {
        manifold,
        oracle: reals(oracle.point.coords()),
        oracle_frechet_value: Real(oracle.f_value),
        resolution,
        resolution_bound: Real(oracle.resolution_bound),
        solver_center: reals(solved.center.coords()),
        solver_status: solved.status.name(),
        solver_frechet_value: Real(frechet_value(&p.space, &p.sample, &solved.center)),
        distance: Real(p.space.dist(&oracle.point, &solved.center)),
    };
    Ok((EXIT_OK, to_json(&out)))
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Mean { spec, trace, flags } => cmd_mean(spec, trace.as_deref(), flags),
        Command::Compare { spec, flags } => cmd_compare(spec, flags),
        Command::Oracle { spec, resolution, flags } => cmd_oracle(spec, *resolution, flags),
    };
    match result {
        Ok((code, json)) => {
            let _ = out.write_all(json.as_bytes());
            code
        }
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
