//! Deterministic evaluation tasks.
//!
//! Two surrogate tasks feed the search with trajectories through the same
//! sampling interface a physics simulation would use: one pre-evaluation
//! period is run without sampling, then poses are recorded at a fixed rate
//! over the evaluation periods and handed to the feature pipeline.
//!
//! [`ArcTask`] emits exact circular arcs, so behavior and fitness have
//! closed forms against which the pipeline can be checked. [`CrawlerTask`]
//! integrates a planar differential-drive body driven by decoded joint
//! oscillators, giving the search an actual gait-shaping problem.

use crate::gait::{self, JointController, MorphologySpec, Side};
use crate::map_elites::Genome;
use crate::trajectory::{
    evaluate_trajectory, EvalOutcome, Evaluator, Point, PoseSample, Trajectory, DEFAULT_F_MAX,
};

/// Shared sampling timetable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingPlan {
    /// Control period in seconds.
    pub period: f64,
    /// Warm-up periods excluded from sampling.
    pub pre_periods: usize,
    /// Sampled periods.
    pub eval_periods: usize,
    pub samples_per_period: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            period: 1.0,
            pre_periods: 1,
            eval_periods: 4,
            samples_per_period: 4,
        }
    }
}

impl SamplingPlan {
    fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        let start = self.pre_periods as f64 * self.period;
        let dt = self.period / self.samples_per_period as f64;
        (0..=self.eval_periods * self.samples_per_period).map(move |i| start + i as f64 * dt)
    }
}

/// Closed-form task: genome `(omega, v, pitch, height)` drives an exact
/// circular arc (straight when `omega` is zero) with constant pitch and
/// height, so the expected behavior is simply `(omega, v)`.
#[derive(Clone, Debug)]
pub struct ArcTask {
    pub plan: SamplingPlan,
    pub f_max: f64,
}

impl Default for ArcTask {
    fn default() -> Self {
        Self {
            plan: SamplingPlan::default(),
            f_max: DEFAULT_F_MAX,
        }
    }
}

impl Evaluator for ArcTask {
    fn genome_len(&self) -> usize {
        4
    }

    fn evaluate(&self, genome: &Genome) -> EvalOutcome {
        let [omega, v, pitch, height]: [f64; 4] =
            genome.params().try_into().expect("arc genome has 4 genes");
        let samples: Vec<PoseSample> = self
            .plan
            .sample_times()
            .map(|t| {
                let position = if omega == 0.0 {
                    Point::new(v * t, 0.0)
                } else {
                    Point::new(
                        v / omega * (omega * t).sin(),
                        v / omega * (1.0 - (omega * t).cos()),
                    )
                };
                PoseSample {
                    time: t,
                    position,
                    heading: omega * t,
                    pitch,
                    height,
                }
            })
            .collect();
        let Ok(traj) = Trajectory::new(samples, self.plan.period, self.plan.samples_per_period)
        else {
            return EvalOutcome::Aborted;
        };
        match evaluate_trajectory(&traj, self.f_max) {
            Ok(result) => EvalOutcome::Completed(result),
            Err(_) => EvalOutcome::Aborted,
        }
    }
}

/// Speed gain from the mean of both drive sides, m/s per set-point unit.
pub const CRAWLER_SPEED_GAIN: f64 = 1.0;
/// Turn gain from the left/right drive difference, rad/s per set-point unit.
pub const CRAWLER_TURN_GAIN: f64 = 4.0;
/// Pitch coupling: pitch = 0.3 * var / (1 + var) radians.
pub const CRAWLER_PITCH_COUPLING: f64 = 0.3;
/// Body clearance at zero set-point variance, meters.
pub const CRAWLER_BODY_CLEARANCE: f64 = 0.25;
/// Integration steps per control period.
pub const CRAWLER_STEPS_PER_PERIOD: usize = 128;

/// Kinematic differential-drive surrogate.
///
/// At each integration step the left and right drive levels are the
/// strongest set points on the corresponding sides (centerline joints count
/// on both sides). Taking the side maximum instead of the side mean matters:
/// mirrored joints share their waveform and differ only in phase, so side
/// means are equal when averaged over a period and the net turn would vanish
/// for every genome. The maximum couples joints within a side, which makes
/// per-group differential phases produce sustained turning. The body moves
/// forward with the side average and turns with the side difference. Pitch
/// and height are smooth functions of the instantaneous set-point variance
/// across joints, so uneven drive patterns cost fitness. A non-finite pose
/// aborts the evaluation.
#[derive(Clone, Debug)]
pub struct CrawlerTask {
    morphology: MorphologySpec,
    pub plan: SamplingPlan,
    pub f_max: f64,
}

impl CrawlerTask {
    pub fn new(morphology: MorphologySpec) -> Result<Self, gait::DecodeError> {
        morphology.validate()?;
        let plan = SamplingPlan {
            period: morphology.control_period,
            ..SamplingPlan::default()
        };
        Ok(Self {
            morphology,
            plan,
            f_max: DEFAULT_F_MAX,
        })
    }

    pub fn morphology(&self) -> &MorphologySpec {
        &self.morphology
    }

    fn drives(&self, joints: &[JointController], t: f64) -> (f64, f64, f64) {
        let period = self.plan.period;
        let mut left = f64::NEG_INFINITY;
        let mut right = f64::NEG_INFINITY;
        let mut all = Vec::with_capacity(joints.len());
        for j in joints {
            let sp = gait::setpoint(&j.params, t, period);
            all.push(sp);
            match j.side {
                Side::Left => left = left.max(sp),
                Side::Right => right = right.max(sp),
                Side::Center => {
                    left = left.max(sp);
                    right = right.max(sp);
                }
            }
        }
        // A side without joints idles.
        if left == f64::NEG_INFINITY {
            left = 0.0;
        }
        if right == f64::NEG_INFINITY {
            right = 0.0;
        }
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / all.len() as f64;
        (left, right, var)
    }
}

impl Evaluator for CrawlerTask {
    fn genome_len(&self) -> usize {
        self.morphology.genome_len()
    }

    fn evaluate(&self, genome: &Genome) -> EvalOutcome {
        let joints = gait::decode(genome, &self.morphology)
            .expect("genome length matches the task morphology");
        let period = self.morphology.control_period;
        let dt = period / CRAWLER_STEPS_PER_PERIOD as f64;
        let steps_per_sample = CRAWLER_STEPS_PER_PERIOD / self.plan.samples_per_period;
        let total_periods = self.plan.pre_periods + self.plan.eval_periods;
        let first_sample_step = self.plan.pre_periods * CRAWLER_STEPS_PER_PERIOD;

        let (mut x, mut y, mut psi) = (0.0f64, 0.0f64, 0.0f64);
        let mut samples = Vec::with_capacity(self.plan.eval_periods * self.plan.samples_per_period + 1);

        let mut record = |x: f64, y: f64, psi: f64, var: f64, t: f64| {
            let pitch = CRAWLER_PITCH_COUPLING * var / (1.0 + var);
            let height = CRAWLER_BODY_CLEARANCE / (1.0 + var);
            samples.push(PoseSample {
                time: t,
                position: Point::new(x, y),
                heading: psi,
                pitch,
                height,
            });
        };

        for step in 0..=total_periods * CRAWLER_STEPS_PER_PERIOD {
            let t = step as f64 * dt;
            let (left, right, var) = self.drives(&joints, t);
            if step >= first_sample_step && (step - first_sample_step).is_multiple_of(steps_per_sample) {
                record(x, y, psi, var, t);
            }
            let speed = CRAWLER_SPEED_GAIN * 0.5 * (left + right);
            let turn = CRAWLER_TURN_GAIN * (right - left);
            psi += turn * dt;
            x += speed * psi.cos() * dt;
            y += speed * psi.sin() * dt;
            if !(x.is_finite() && y.is_finite() && psi.is_finite()) {
                return EvalOutcome::Aborted;
            }
        }

        let Ok(traj) = Trajectory::new(samples, period, self.plan.samples_per_period) else {
            return EvalOutcome::Aborted;
        };
        match evaluate_trajectory(&traj, self.f_max) {
            Ok(result) => EvalOutcome::Completed(result),
            Err(_) => EvalOutcome::Aborted,
        }
    }
}
