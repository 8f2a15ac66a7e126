//! Behavior and fitness extraction from pose trajectories.
//!
//! The behavior descriptor has two coordinates: average turn rate and
//! adjusted forward speed. Turn rate is the wrapped heading change per unit
//! time. Forward speed is reconstructed from circular-arc geometry: the
//! perpendiculars to the average headings of the first and last sampled
//! periods intersect at a center of curvature, which yields a turn radius,
//! its spread (a sideways-motion measure) and a swept angle. Arc length per
//! unit time, aligned with the robot's direction of travel along its own
//! heading, is the forward speed. Fitness inverts a weighted penalty built
//! from the radius spread, body pitch and body height.

use thiserror::Error;

use crate::map_elites::Genome;

/// Fitness assigned when the penalty sum is exactly zero, where the
/// log-inversion would diverge.
pub const DEFAULT_F_MAX: f64 = 50.0;

/// Determinant threshold below which the two period perpendiculars are
/// treated as parallel and the trajectory as straight.
pub const PARALLEL_EPS: f64 = 1e-9;

/// 2-D point in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, other: Point) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }

    fn dist(self, other: Point) -> f64 {
        let (dx, dy) = self.sub(other);
        dx.hypot(dy)
    }
}

/// One timestamped pose measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseSample {
    /// Seconds since gait start.
    pub time: f64,
    pub position: Point,
    /// Heading angle in radians.
    pub heading: f64,
    /// Body pitch in radians.
    pub pitch: f64,
    /// Body reference height in meters.
    pub height: f64,
}

/// A uniformly sampled pose trajectory covering whole control periods.
#[derive(Clone, Debug)]
pub struct Trajectory {
    samples: Vec<PoseSample>,
    period: f64,
    samples_per_period: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("trajectory needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("sample times must be strictly increasing and uniformly spaced")]
    IrregularSampling,
    #[error("period and samples_per_period must be positive")]
    BadTiming,
    #[error("trajectory must span at least two periods for curvature estimation")]
    TooShortForCurvature,
    #[error("a sample coincides with the curvature center")]
    SampleAtCenter,
}

impl Trajectory {
    pub fn new(
        samples: Vec<PoseSample>,
        period: f64,
        samples_per_period: usize,
    ) -> Result<Self, TrajectoryError> {
        if period.is_nan() || period <= 0.0 || samples_per_period == 0 {
            return Err(TrajectoryError::BadTiming);
        }
        if samples.len() < 3 {
            return Err(TrajectoryError::TooFewSamples(samples.len()));
        }
        for (index, s) in samples.iter().enumerate() {
            let finite = s.time.is_finite()
                && s.position.x.is_finite()
                && s.position.y.is_finite()
                && s.heading.is_finite()
                && s.pitch.is_finite()
                && s.height.is_finite();
            if !finite {
                return Err(TrajectoryError::NonFiniteSample { index });
            }
        }
        let spacing = period / samples_per_period as f64;
        for pair in samples.windows(2) {
            let dt = pair[1].time - pair[0].time;
            if dt.is_nan() || dt <= 0.0 || (dt - spacing).abs() > 1e-9 * spacing.max(1.0) {
                return Err(TrajectoryError::IrregularSampling);
            }
        }
        Ok(Self {
            samples,
            period,
            samples_per_period,
        })
    }

    pub fn samples(&self) -> &[PoseSample] {
        &self.samples
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    /// Number of sample intervals (samples are indexed `0..=N`).
    pub fn interval_count(&self) -> usize {
        self.samples.len() - 1
    }

    /// Total elapsed time between the first and last sample.
    pub fn elapsed(&self) -> f64 {
        self.samples.last().unwrap().time - self.samples[0].time
    }

    /// Writes the trajectory as CSV with columns `time,x,y,psi,theta,h`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,x,y,psi,theta,h")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.time, s.position.x, s.position.y, s.heading, s.pitch, s.height
            )?;
        }
        Ok(())
    }
}

/// The two behavior coordinates used to place a solution in the map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BehaviorDescriptor {
    /// Average turn rate, rad/s.
    pub turn_rate: f64,
    /// Adjusted forward speed, m/s.
    pub forward_speed: f64,
}

/// Geometry byproducts of the feature pipeline, kept for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalDiagnostics {
    /// Estimated turn radius, meters (infinite on the straight-line branch).
    pub turn_radius: f64,
    /// Spread of sample distances around the turn radius, meters.
    pub radius_se: f64,
    /// Total signed swept angle around the curvature center, radians.
    pub swept_angle: f64,
    pub mean_abs_pitch: f64,
    pub mean_height: f64,
}

/// Behavior, fitness and diagnostics for one evaluated genome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub behavior: BehaviorDescriptor,
    pub fitness: f64,
    pub diagnostics: EvalDiagnostics,
}

/// Outcome of one evaluation: a result, or a task-signaled abort that ends
/// the surrounding run early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalOutcome {
    Completed(EvalResult),
    Aborted,
}

/// A deterministic evaluation task.
pub trait Evaluator {
    /// Genome length the task expects.
    fn genome_len(&self) -> usize;
    fn evaluate(&self, genome: &Genome) -> EvalOutcome;
}

/// Result of the curvature-center construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurvatureCenter {
    Point(Point),
    /// The period perpendiculars are parallel: the path is straight.
    StraightLine,
}

/// Wraps an angle difference onto `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(std::f64::consts::TAU);
    if w > std::f64::consts::PI {
        w - std::f64::consts::TAU
    } else {
        w
    }
}

/// Average turn rate: wrapped heading deltas summed over elapsed time.
pub fn turn_rate(traj: &Trajectory) -> f64 {
    let samples = traj.samples();
    let total: f64 = samples
        .windows(2)
        .map(|p| wrap_angle(p[1].heading - p[0].heading))
        .sum();
    total / traj.elapsed()
}

fn heading_unit(psi: f64) -> (f64, f64) {
    (psi.cos(), psi.sin())
}

/// Mean position and circular-mean heading over a sample window.
fn window_mean(samples: &[PoseSample]) -> (Point, f64) {
    let n = samples.len() as f64;
    let mut x = 0.0;
    let mut y = 0.0;
    let mut sin_sum = 0.0;
    let mut cos_sum = 0.0;
    for s in samples {
        x += s.position.x;
        y += s.position.y;
        sin_sum += s.heading.sin();
        cos_sum += s.heading.cos();
    }
    (Point::new(x / n, y / n), sin_sum.atan2(cos_sum))
}

/// Curvature center: intersection of the perpendiculars to the average
/// headings at the average positions of the first and last sampled periods.
pub fn center_of_curvature(traj: &Trajectory) -> Result<CurvatureCenter, TrajectoryError> {
    let spp = traj.samples_per_period();
    let samples = traj.samples();
    if samples.len() < 2 * spp + 1 {
        return Err(TrajectoryError::TooShortForCurvature);
    }
    let (pa, ha) = window_mean(&samples[..=spp]);
    let (pb, hb) = window_mean(&samples[samples.len() - 1 - spp..]);
    // Line directions perpendicular to the mean headings.
    let na = (-ha.sin(), ha.cos());
    let nb = (-hb.sin(), hb.cos());
    // pa + s*na = pb + t*nb
    let det = na.0 * (-nb.1) - (-nb.0) * na.1;
    if det.abs() <= PARALLEL_EPS {
        return Ok(CurvatureCenter::StraightLine);
    }
    let (dx, dy) = pb.sub(pa);
    let s = (dx * (-nb.1) + nb.0 * dy) / det;
    Ok(CurvatureCenter::Point(Point::new(
        pa.x + s * na.0,
        pa.y + s * na.1,
    )))
}

/// Turn radius and its spread around the curvature center.
///
/// `radius` is the mean sample distance to `center` over all `N + 1`
/// samples; `radius_se` is `sqrt(sum((|x_i - C| - R)^2) / N)`.
pub fn radius_stats(traj: &Trajectory, center: Point) -> (f64, f64) {
    let samples = traj.samples();
    let n_intervals = traj.interval_count() as f64;
    let distances: Vec<f64> = samples.iter().map(|s| s.position.dist(center)).collect();
    let radius = distances.iter().sum::<f64>() / distances.len() as f64;
    let ss: f64 = distances.iter().map(|d| (d - radius).powi(2)).sum();
    (radius, (ss / n_intervals).sqrt())
}

/// Total signed angle swept around `center`, counter-clockwise positive.
pub fn swept_angle(traj: &Trajectory, center: Point) -> Result<f64, TrajectoryError> {
    let samples = traj.samples();
    let mut total = 0.0;
    let mut prev = samples[0].position.sub(center);
    if prev == (0.0, 0.0) {
        return Err(TrajectoryError::SampleAtCenter);
    }
    for s in &samples[1..] {
        let cur = s.position.sub(center);
        if cur == (0.0, 0.0) {
            return Err(TrajectoryError::SampleAtCenter);
        }
        let cross = prev.0 * cur.1 - prev.1 * cur.0;
        let dot = prev.0 * cur.0 + prev.1 * cur.1;
        total += cross.atan2(dot);
        prev = cur;
    }
    Ok(total)
}

/// Arc length per unit time: `radius * swept / elapsed`.
pub fn forward_speed(radius: f64, swept: f64, elapsed: f64) -> f64 {
    debug_assert!(elapsed > 0.0);
    radius * swept / elapsed
}

/// Inverts the weighted penalty sum into a quality score.
///
/// `penalty = 10*se_r + mean_abs_pitch + 10^(-mean_height/0.05)` and
/// `f = max(0, -5*log10(penalty))`, clamped to `f_max` when the penalty
/// is exactly zero.
pub fn fitness_with_cap(se_r: f64, mean_abs_pitch: f64, mean_height: f64, f_max: f64) -> f64 {
    let penalty = 10.0 * se_r + mean_abs_pitch + 10f64.powf(-mean_height / 0.05);
    if penalty == 0.0 {
        return f_max;
    }
    (-5.0 * penalty.log10()).clamp(0.0, f_max)
}

/// [`fitness_with_cap`] at the default cap.
pub fn fitness(se_r: f64, mean_abs_pitch: f64, mean_height: f64) -> f64 {
    fitness_with_cap(se_r, mean_abs_pitch, mean_height, DEFAULT_F_MAX)
}

/// Net motion along the body heading, used to align the forward-speed sign
/// with the robot's own direction of travel (negative when walking
/// backwards). Zero net motion counts as forward.
fn travel_sign(samples: &[PoseSample]) -> f64 {
    let mut along = 0.0;
    for pair in samples.windows(2) {
        let (dx, dy) = pair[1].position.sub(pair[0].position);
        let (ux0, uy0) = heading_unit(pair[0].heading);
        let (ux1, uy1) = heading_unit(pair[1].heading);
        along += dx * (ux0 + ux1) + dy * (uy0 + uy1);
    }
    if along < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn straight_line_features(traj: &Trajectory) -> (f64, f64) {
    let samples = traj.samples();
    let (mean_pos, mean_heading) = window_mean(samples);
    let (ux, uy) = heading_unit(mean_heading);
    let (dx, dy) = samples.last().unwrap().position.sub(samples[0].position);
    let b_f = (dx * ux + dy * uy) / traj.elapsed();
    // RMS perpendicular deviation from the mean-heading line.
    let mut ss = 0.0;
    for s in samples {
        let (px, py) = s.position.sub(mean_pos);
        let d = -px * uy + py * ux;
        ss += d * d;
    }
    let se_r = (ss / samples.len() as f64).sqrt();
    (b_f, se_r)
}

/// Runs the full feature and fitness pipeline on a trajectory.
pub fn evaluate_trajectory(traj: &Trajectory, f_max: f64) -> Result<EvalResult, TrajectoryError> {
    let samples = traj.samples();
    let b_t = turn_rate(traj);
    let mean_abs_pitch = samples.iter().map(|s| s.pitch.abs()).sum::<f64>() / samples.len() as f64;
    let mean_height = samples.iter().map(|s| s.height).sum::<f64>() / samples.len() as f64;

    let center = center_of_curvature(traj)?;
    let arc = match center {
        CurvatureCenter::StraightLine => None,
        CurvatureCenter::Point(c) => {
            // A spin in place puts samples on top of the center; treat it as
            // the straight-line limit instead of failing the evaluation.
            if samples.iter().any(|s| s.position.sub(c) == (0.0, 0.0)) {
                None
            } else {
                Some(c)
            }
        }
    };

    let (b_f, radius, se_r, swept) = match arc {
        Some(c) => {
            let (radius, se_r) = radius_stats(traj, c);
            let swept = swept_angle(traj, c)?;
            let geometric = forward_speed(radius, swept, traj.elapsed());
            (geometric.abs() * travel_sign(samples), radius, se_r, swept)
        }
        None => {
            let (b_f, se_r) = straight_line_features(traj);
            (b_f, f64::INFINITY, se_r, 0.0)
        }
    };

    Ok(EvalResult {
        behavior: BehaviorDescriptor {
            turn_rate: b_t,
            forward_speed: b_f,
        },
        fitness: fitness_with_cap(se_r, mean_abs_pitch, mean_height, f_max),
        diagnostics: EvalDiagnostics {
            turn_radius: radius,
            radius_se: se_r,
            swept_angle: swept,
            mean_abs_pitch,
            mean_height,
        },
    })
}
