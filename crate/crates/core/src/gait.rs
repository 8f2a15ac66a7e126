//! Open-loop joint controllers.
//!
//! Each joint runs a four-parameter oscillator: phase offset, duty cycle and
//! two extreme set points. The duty cycle is stored as an unbounded real and
//! folded onto `[0, 1]` by a period-2 triangle wave, so mutation can move it
//! freely without discontinuities or sticky endpoints. Parameters are encoded
//! symmetrically: a mirrored joint pair shares duty and extremes, while the
//! right side adds a differential phase offset.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map_elites::Genome;

/// Controller parameters for one joint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointControlParams {
    /// Phase offset as a fraction of the control period.
    pub phase: f64,
    /// Raw (unwrapped) duty-cycle parameter.
    pub duty_raw: f64,
    /// Set point at the start of the rising segment.
    pub v0: f64,
    /// Set point at the end of the rising segment.
    pub v1: f64,
}

/// Which side of the body a decoded joint sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Center,
}

/// One entry of a morphology's joint-group list.
///
/// A `Single` group consumes four genome entries `(phase, duty, v0, v1)`;
/// a `MirrorPair` consumes five `(phase, delta_phase, duty, v0, v1)` and
/// expands into two joints sharing everything but the phase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JointGroup {
    Single { joint: usize },
    MirrorPair { left: usize, right: usize },
}

impl JointGroup {
    /// Number of genome entries this group consumes.
    pub fn param_count(&self) -> usize {
        match self {
            JointGroup::Single { .. } => 4,
            JointGroup::MirrorPair { .. } => 5,
        }
    }
}

/// Joint layout and timing of one body plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphologySpec {
    pub groups: Vec<JointGroup>,
    /// Control system period in seconds.
    pub control_period: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("genome has {got} parameters, morphology expects {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("joint id {0} appears in more than one group")]
    DuplicateJoint(usize),
    #[error("control period must be positive, got {0}")]
    NonPositivePeriod(f64),
    #[error("morphology has no joint groups")]
    Empty,
}

impl MorphologySpec {
    pub fn new(groups: Vec<JointGroup>, control_period: f64) -> Result<Self, DecodeError> {
        let spec = Self {
            groups,
            control_period,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.groups.is_empty() {
            return Err(DecodeError::Empty);
        }
        if !self.control_period.is_finite() || self.control_period <= 0.0 {
            return Err(DecodeError::NonPositivePeriod(self.control_period));
        }
        let mut seen = std::collections::BTreeSet::new();
        for group in &self.groups {
            let ids: [Option<usize>; 2] = match group {
                JointGroup::Single { joint } => [Some(*joint), None],
                JointGroup::MirrorPair { left, right } => [Some(*left), Some(*right)],
            };
            for id in ids.into_iter().flatten() {
                if !seen.insert(id) {
                    return Err(DecodeError::DuplicateJoint(id));
                }
            }
        }
        Ok(())
    }

    /// Genome length implied by the group list.
    pub fn genome_len(&self) -> usize {
        self.groups.iter().map(JointGroup::param_count).sum()
    }

    pub fn joint_count(&self) -> usize {
        self.groups
            .iter()
            .map(|g| match g {
                JointGroup::Single { .. } => 1,
                JointGroup::MirrorPair { .. } => 2,
            })
            .sum()
    }
}

/// A decoded joint: id, body side and oscillator parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointController {
    pub joint: usize,
    pub side: Side,
    pub params: JointControlParams,
}

/// Folds the unbounded duty parameter onto `[0, 1]`.
///
/// Piecewise: `d - floor(d)` when `floor(d)` is even, `ceil(d) - d` otherwise,
/// with odd integers mapped to 1 (the continuous extension of the triangle
/// wave). Equivalent to `1 - |(d mod 2) - 1|`.
pub fn wrap_duty(d: f64) -> f64 {
    // Above 2^53 every representable f64 is an even integer.
    if d.abs() >= 9_007_199_254_740_992.0 {
        return 0.0;
    }
    let fl = d.floor();
    let even = (fl as i64) % 2 == 0;
    if d == fl {
        if even {
            0.0
        } else {
            1.0
        }
    } else if even {
        d - fl
    } else {
        fl + 1.0 - d
    }
}

/// Joint set point at time `t`.
///
/// Over one period the output ramps linearly `v0 -> v1` during the duty
/// fraction of the cycle, then back `v1 -> v0` during the remainder. The
/// phase offset shifts the cycle start. Degenerate duty values 0 and 1
/// collapse one ramp, leaving a sawtooth.
pub fn setpoint(p: &JointControlParams, t: f64, period: f64) -> f64 {
    debug_assert!(period > 0.0);
    let u = (t / period - p.phase).rem_euclid(1.0);
    let duty = wrap_duty(p.duty_raw);
    if u < duty {
        p.v0 + (p.v1 - p.v0) * (u / duty)
    } else if duty >= 1.0 {
        // duty == 1: pure rising sawtooth, u < duty always; unreachable fall.
        p.v1
    } else {
        p.v1 + (p.v0 - p.v1) * ((u - duty) / (1.0 - duty))
    }
}

/// Expands a genome into per-joint controllers under a morphology.
///
/// Mirror pairs share duty and extreme values; the right joint's phase is
/// `phase + delta_phase`. Pure function of its inputs.
pub fn decode(genome: &Genome, spec: &MorphologySpec) -> Result<Vec<JointController>, DecodeError> {
    spec.validate()?;
    let expected = spec.genome_len();
    let params = genome.params();
    if params.len() != expected {
        return Err(DecodeError::LengthMismatch {
            got: params.len(),
            expected,
        });
    }
    let mut joints = Vec::with_capacity(spec.joint_count());
    let mut offset = 0;
    for group in &spec.groups {
        match *group {
            JointGroup::Single { joint } => {
                let [phase, duty_raw, v0, v1] = params[offset..offset + 4].try_into().unwrap();
                joints.push(JointController {
                    joint,
                    side: Side::Center,
                    params: JointControlParams {
                        phase,
                        duty_raw,
                        v0,
                        v1,
                    },
                });
            }
            JointGroup::MirrorPair { left, right } => {
                let [phase, delta_phase, duty_raw, v0, v1] =
                    params[offset..offset + 5].try_into().unwrap();
                let shared = JointControlParams {
                    phase,
                    duty_raw,
                    v0,
                    v1,
                };
                joints.push(JointController {
                    joint: left,
                    side: Side::Left,
                    params: shared,
                });
                joints.push(JointController {
                    joint: right,
                    side: Side::Right,
                    params: JointControlParams {
                        phase: phase + delta_phase,
                        ..shared
                    },
                });
            }
        }
        offset += group.param_count();
    }
    Ok(joints)
}
