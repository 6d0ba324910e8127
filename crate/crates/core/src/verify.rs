//! One-call verification: run the profile, normalize, decide, and
//! re-check the answer.

use crate::affine::{q, Param, Q};
use crate::crossing::{run_profile, CrossingError, Profile, ProfileReport};
use crate::feasibility::{eliminate, verify_certificate, verify_sample, ConstraintSystem, FeasibilityResult, Rule};

/// How the homogeneous system is pinned before solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalize {
    Off,
    Pin(Param, Q),
}

impl Default for Normalize {
    fn default() -> Self {
        Normalize::Pin(Param::Gap(0), q(1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub profile: Profile,
    pub report: ProfileReport,
    /// The run's constraints plus the normalization, if one was applied.
    pub system: ConstraintSystem,
    pub normalization: Option<(Param, Q)>,
    pub result: FeasibilityResult,
    /// The sample or certificate passed its independent check.
    pub checked: bool,
}

impl Verification {
    pub fn is_feasible(&self) -> bool {
        self.result.is_feasible()
    }
}

/// Runs and decides a profile. A profile with fixed values is never
/// normalized: the fixed values already choose the scale.
pub fn verify(profile: &Profile, normalize: &Normalize) -> Result<Verification, CrossingError> {
    let report = run_profile(profile)?;
    let normalization = match normalize {
        Normalize::Pin(p, v) if profile.fixed.is_empty() => Some((*p, v.clone())),
        _ => None,
    };
    let system = match &normalization {
        Some((p, v)) => report.constraints.with_fixed(*p, v.clone(), Rule::Normalization),
        None => report.constraints.clone(),
    };
    let result = eliminate(&system);
    let checked = match &result {
        FeasibilityResult::Feasible { sample } => verify_sample(&system, &sample.values).unwrap_or(false),
        FeasibilityResult::Infeasible { certificate } => verify_certificate(&system, certificate),
    };
    Ok(Verification {
        profile: profile.clone(),
        report,
        system,
        normalization,
        result,
        checked,
    })
}
