//! Geodesic Euler iteration `x ← expₓ(s·V(x))` towards the zero of a
//! center field, with admissible-ball checks and a descent guard.

use crate::error::{Error, Result};
use crate::manifold::{
    frechet_value, mass_vector_field, max_point_distance, AmbientPoint, TangentVector,
    WeightedSample,
};
use crate::spaces::ModelSpace;

/// Steps are halved at most down to this scale before giving up.
pub const MIN_STEP_SCALE: f64 = 1.0 / (1u64 << 20) as f64;

/// Energy increases up to `DESCENT_SLACK · max(1, |f|)` count as rounding noise.
pub const DESCENT_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BallCheck {
    #[default]
    Enforce,
    Warn,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once the field norm is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Euler step length factor in (0, 1]; 1 is the plain Euler step.
    pub step_scale: f64,
    pub ball_check: BallCheck,
    /// Replaces the admissible radius of the space.
    pub radius_override: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 1000,
            step_scale: 1.0,
            ball_check: BallCheck::Enforce,
            radius_override: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "step_scale must be in (0, 1], got {}",
                self.step_scale
            )));
        }
        if let Some(r) = self.radius_override {
            if r.is_nan() || r <= 0.0 {
                return Err(Error::InvalidParameter(format!("radius override {r} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterationsReached,
    BallViolation,
    CutLocus,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterationsReached => "max_iterations_reached",
            Status::BallViolation => "ball_violation",
            Status::CutLocus => "cut_locus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub gradient_norm: f64,
    pub frechet_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallReport {
    pub radius_used: f64,
    pub max_point_distance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub status: Status,
    /// Number of Euler steps taken.
    pub iterations: usize,
    /// One entry per visited iterate, starting with `x₀`.
    pub trace: Vec<TraceEntry>,
    /// The visited iterates `x₀, x₁, …`; the last one is `center`.
    pub iterates: Vec<AmbientPoint>,
    pub center: AmbientPoint,
    pub ball: Option<BallReport>,
    /// Times the descent guard halved a step.
    pub step_halvings: usize,
    pub warnings: Vec<String>,
    pub detail: Option<String>,
}

impl ConvergenceReport {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_entry(&self) -> &TraceEntry {
        self.trace.last().expect("trace holds at least x0")
    }
}

/// A vector field whose zero is sought, paired with the energy it descends.
pub trait CenterField {
    fn field(&self, x: &AmbientPoint) -> Result<TangentVector>;
    fn energy(&self, x: &AmbientPoint) -> f64;
}

/// `V = Σ mᵢ·logₓ(pᵢ)` with the Fréchet function as energy.
pub struct FrechetField<'a> {
    pub space: &'a ModelSpace,
    pub sample: &'a WeightedSample,
}

impl CenterField for FrechetField<'_> {
    fn field(&self, x: &AmbientPoint) -> Result<TangentVector> {
        mass_vector_field(self.space, self.sample, x)
    }

    fn energy(&self, x: &AmbientPoint) -> f64 {
        frechet_value(self.space, self.sample, x)
    }
}

/// The sample point with the smallest Fréchet value, ties to the lowest
/// index in canonical order.
pub fn initial_guess(space: &ModelSpace, sample: &WeightedSample) -> AmbientPoint {
    let mut best: Option<(&AmbientPoint, f64)> = None;
    for (_, p, _) in sample.canonical() {
        let f = frechet_value(space, sample, p);
        if best.is_none_or(|(_, fb)| f < fb) {
            best = Some((p, f));
        }
    }
    best.expect("samples are never empty").0.clone()
}

/// Whether every mass point lies within the admissible radius of `guess`.
pub fn check_admissible_ball(
    space: &ModelSpace,
    sample: &WeightedSample,
    guess: &AmbientPoint,
    radius_override: Option<f64>,
) -> BallReport {
    let radius_used = radius_override.unwrap_or_else(|| space.admissible_radius());
    let max_point_distance = max_point_distance(space, sample, guess);
    BallReport {
        radius_used,
        max_point_distance,
        ok: max_point_distance <= radius_used,
    }
}

/// `expₓ(step_scale · V(x))`.
pub fn euler_step(
    space: &ModelSpace,
    sample: &WeightedSample,
    x: &AmbientPoint,
    step_scale: f64,
) -> Result<AmbientPoint> {
    let v = mass_vector_field(space, sample, x)?;
    Ok(space.exp(&v.scale(step_scale)))
}

/// Iterates Euler steps from `x0` (default: [`initial_guess`]) until
/// `‖V‖ ≤ tolerance`.
///
/// Failures of the iteration are reported through [`ConvergenceReport::status`];
/// only an invalid `config` is an error.
pub fn solve_center(
    space: &ModelSpace,
    sample: &WeightedSample,
    config: &SolverConfig,
    x0: Option<&AmbientPoint>,
) -> Result<ConvergenceReport> {
    config.validate()?;
    let guess = initial_guess(space, sample);
    let ball = check_admissible_ball(space, sample, &guess, config.radius_override);
    let start = x0.cloned().unwrap_or_else(|| guess.clone());
    let field = FrechetField { space, sample };
    let mut warnings = Vec::new();

    if !ball.ok {
        let msg = format!(
            "mass point at distance {} exceeds admissible radius {}",
            ball.max_point_distance, ball.radius_used
        );
        match config.ball_check {
            BallCheck::Enforce => {
                let g = field.field(&start).map(|v| space.norm(&v)).unwrap_or(f64::NAN);
                return Ok(ConvergenceReport {
                    status: Status::BallViolation,
                    iterations: 0,
                    trace: vec![TraceEntry {
                        iteration: 0,
                        gradient_norm: g,
                        frechet_value: field.energy(&start),
                    }],
                    iterates: vec![start.clone()],
                    center: start,
                    ball: Some(ball),
                    step_halvings: 0,
                    warnings,
                    detail: Some(msg),
                });
            }
            BallCheck::Warn => warnings.push(msg),
            BallCheck::Skip => {}
        }
    }

    let containment = (config.ball_check == BallCheck::Enforce).then_some((&guess, ball.radius_used));
    let mut report = iterate_field(space, &field, &start, config, containment);
    report.ball = Some(ball);
    report.warnings.splice(0..0, warnings);
    Ok(report)
}

/// The Euler loop shared by every center field.
///
/// With `containment = Some((c, r))` an iterate farther than `r` from `c`
/// ends the run with [`Status::BallViolation`]. When the energy rises by
/// more than the rounding slack, the step is halved for that iteration; if
/// it still rises at [`MIN_STEP_SCALE`] the run stops as
/// [`Status::MaxIterationsReached`].
pub fn iterate_field(
    space: &ModelSpace,
    field: &dyn CenterField,
    x0: &AmbientPoint,
    config: &SolverConfig,
    containment: Option<(&AmbientPoint, f64)>,
) -> ConvergenceReport {
    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut iterates = vec![x.clone()];
    let mut step_halvings = 0;
    let mut detail = None;

    let status = 'outer: loop {
        let k = iterates.len() - 1;
        let v = match field.field(&x) {
            Ok(v) => v,
            Err(e) => {
                detail = Some(e.to_string());
                trace.push(TraceEntry {
                    iteration: k,
                    gradient_norm: f64::NAN,
                    frechet_value: field.energy(&x),
                });
                break Status::CutLocus;
            }
        };
        let g = space.norm(&v);
        let f = field.energy(&x);
        trace.push(TraceEntry {
            iteration: k,
            gradient_norm: g,
            frechet_value: f,
        });
        if g <= config.tolerance {
            break Status::Converged;
        }
        if k >= config.max_iterations {
            break Status::MaxIterationsReached;
        }

        let mut scale = config.step_scale;
        let next = loop {
            let y = space.exp(&v.scale(scale));
            if field.energy(&y) <= f + DESCENT_SLACK * f.abs().max(1.0) {
                break y;
            }
            step_halvings += 1;
            scale *= 0.5;
            if scale < MIN_STEP_SCALE {
                detail = Some(format!("energy increased at step scale {MIN_STEP_SCALE:e}"));
                break 'outer Status::MaxIterationsReached;
            }
        };
        if let Some((c, r)) = containment {
            let d = space.dist(c, &next);
            if d > r {
                detail = Some(format!("iterate {} left the admissible ball: {d} > {r}", k + 1));
                trace.push(TraceEntry {
                    iteration: k + 1,
                    gradient_norm: field.field(&next).map(|v| space.norm(&v)).unwrap_or(f64::NAN),
                    frechet_value: field.energy(&next),
                });
                iterates.push(next.clone());
                x = next;
                break Status::BallViolation;
            }
        }
        iterates.push(next.clone());
        x = next;
    };

    ConvergenceReport {
        status,
        iterations: iterates.len() - 1,
        trace,
        center: x,
        iterates,
        ball: None,
        step_halvings,
        warnings: Vec::new(),
        detail,
    }
}
