//! The wall-crossing state machine.
//!
//! A profile lists the minimum, the interior critical sets from the bottom
//! up, and the maximum. [`run_profile`] walks it from the bottom: each
//! regular interval carries a reduced space, the Euler class of the circle
//! bundle over it, and the reduced symplectic class as an affine function
//! of the running level. Crossing a wall updates the Euler class and
//! possibly the space; closing at the maximum and the cone and
//! representability checks along the way produce a [`ConstraintSystem`].
//!
//! [`ConstraintSystem`]: crate::feasibility::ConstraintSystem

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::affine::{Param, Q};
use crate::lattice::{IntClass, LatticeError, SpaceKind};

mod flip;
mod run;
mod solve;
mod transition;

pub use flip::{flip_profile, flip_renaming};
pub use run::{run_profile, EndKind, IntervalReport, MaxShape, ProfileReport, WallReport};
pub use solve::solve_dual_classes;
pub use transition::{
    cross_index2_point, cross_index2_surface, cross_index4_point, cross_index4_surface, init_min, IntervalState,
};

/// Diffeomorphism type of a fixed component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    Point,
    Surface { genus: u32 },
}

impl ComponentKind {
    pub fn is_point(self) -> bool {
        matches!(self, ComponentKind::Point)
    }

    pub fn genus(self) -> Option<u32> {
        match self {
            ComponentKind::Point => None,
            ComponentKind::Surface { genus } => Some(genus),
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::Point => f.write_str("point"),
            ComponentKind::Surface { genus: 0 } => f.write_str("sphere"),
            ComponentKind::Surface { genus } => write!(f, "genus-{genus} surface"),
        }
    }
}

/// The minimum or the maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremum {
    pub kind: ComponentKind,
    /// Self-intersection number of the extremal surface's normal bundle
    /// (`b_min` / `b_max`). Required for a surface minimum; optional
    /// (checked against the derived value) for a surface maximum.
    pub normal_chern: Option<i64>,
}

impl Extremum {
    pub fn point() -> Self {
        Extremum {
            kind: ComponentKind::Point,
            normal_chern: None,
        }
    }

    pub fn surface(genus: u32, normal_chern: Option<i64>) -> Self {
        Extremum {
            kind: ComponentKind::Surface { genus },
            normal_chern,
        }
    }
}

/// An interior critical set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wall {
    /// Morse–Bott index, 2 or 4.
    pub index: u8,
    pub kind: ComponentKind,
    /// Dual class of the surface's image in the reduced space. Solved from
    /// the rest of the data when absent.
    pub dual_class: Option<IntClass>,
    /// Lies on the same level as the previous wall.
    pub same_level: bool,
}

impl Wall {
    pub fn point(index: u8) -> Self {
        Wall {
            index,
            kind: ComponentKind::Point,
            dual_class: None,
            same_level: false,
        }
    }

    pub fn surface(genus: u32, dual_class: Option<IntClass>) -> Self {
        Wall {
            index: 2,
            kind: ComponentKind::Surface { genus },
            dual_class,
            same_level: false,
        }
    }

    pub fn on_same_level(mut self) -> Self {
        self.same_level = true;
        self
    }

    pub fn describe(&self, i: usize) -> String {
        format!("wall {i} (index-{} {})", self.index, self.kind)
    }
}

/// Whether the fiber classes just above the minimum and just below the
/// maximum agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Twist {
    Twisted,
    Untwisted,
    /// Some reduced space is the projective plane, which has no ruling.
    NotApplicable,
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::Twisted => "twisted",
            Twist::Untwisted => "untwisted",
            Twist::NotApplicable => "not_applicable",
        })
    }
}

impl FromStr for Twist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "twisted" => Ok(Twist::Twisted),
            "untwisted" => Ok(Twist::Untwisted),
            "not_applicable" => Ok(Twist::NotApplicable),
            other => Err(format!(
                "unknown twist `{other}` (expected twisted, untwisted or not_applicable)"
            )),
        }
    }
}

/// Fixed point data of one action, plus optional parameter values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub min: Extremum,
    pub walls: Vec<Wall>,
    pub max: Extremum,
    pub twist: Option<Twist>,
    pub fixed: BTreeMap<Param, Q>,
}

impl Profile {
    pub fn new(min: Extremum, walls: Vec<Wall>, max: Extremum) -> Self {
        Profile {
            min,
            walls,
            max,
            twist: None,
            fixed: BTreeMap::new(),
        }
    }

    pub fn with_twist(mut self, twist: Twist) -> Self {
        self.twist = Some(twist);
        self
    }

    /// Gap below wall `i`; `gap(walls.len())` is the gap below the maximum.
    pub fn gap(&self, i: usize) -> Param {
        Param::Gap(i as u32)
    }

    pub fn top_gap(&self) -> Param {
        self.gap(self.walls.len())
    }

    pub fn has_isolated_point(&self) -> bool {
        self.min.kind.is_point() || self.max.kind.is_point() || self.walls.iter().any(|w| w.kind.is_point())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossingError {
    #[error("a surface minimum needs its normal Chern number")]
    MissingNormalChern,
    #[error("the {0} is a point; normal_chern applies only to surfaces")]
    NormalChernOnPoint(&'static str),
    #[error("{site}: {reason}")]
    BadWall { site: String, reason: String },
    #[error("{site}: an index-{index} point cannot occur over {space}")]
    PointOnWrongSpace { site: String, index: u8, space: SpaceKind },
    #[error("profile inconsistent at index-4 point ({site}): Euler class {euler} + y is not pulled back from CP2")]
    InconsistentAtIndex4 { site: String, euler: String },
    #[error("an isolated maximum needs CP2 just below it, found {0}")]
    IsolatedMaxOverRuled(SpaceKind),
    #[error("a surface maximum needs a ruled space just below it, found {0}")]
    SurfaceMaxOverPlane(SpaceKind),
    #[error("maximum has genus {genus} but the ruled space below it is {space}")]
    MaxGenusMismatch { genus: u32, space: SpaceKind },
    #[error("asserted twist {asserted} but the data gives {derived}")]
    TwistMismatch { asserted: Twist, derived: Twist },
    #[error("asserted twist {0} is impossible for this profile")]
    TwistUnavailable(Twist),
    #[error("declared normal Chern number {declared} of the maximum differs from the derived value {derived}")]
    NormalChernMismatch { declared: i64, derived: i64 },
    #[error("wall 0 cannot be on the same level as the minimum")]
    SameLevelAsMinimum,
    #[error("dual classes have no integer solution")]
    NoIntegerSolution,
    #[error("dual classes are underdetermined ({0}); supply dual_class for the surface walls")]
    Underdetermined(String),
    #[error("{site}: {source}")]
    Lattice {
        site: String,
        #[source]
        source: LatticeError,
    },
}

impl CrossingError {
    pub(crate) fn lattice(site: impl Into<String>) -> impl FnOnce(LatticeError) -> CrossingError {
        let site = site.into();
        move |source| CrossingError::Lattice { site, source }
    }
}

/// Space of the first regular interval.
pub fn min_space(min: &Extremum) -> Result<SpaceKind, CrossingError> {
    match min.kind {
        ComponentKind::Point => Ok(SpaceKind::ProjectivePlane),
        ComponentKind::Surface { genus } => {
            let b = min.normal_chern.ok_or(CrossingError::MissingNormalChern)?;
            Ok(if b.rem_euclid(2) == 0 {
                SpaceKind::TrivialRuled { genus }
            } else {
                SpaceKind::NontrivialRuled { genus }
            })
        }
    }
}

/// Structural checks and the reduced space of every interval.
pub(crate) fn validate(p: &Profile) -> Result<Vec<SpaceKind>, CrossingError> {
    if p.min.kind.is_point() && p.min.normal_chern.is_some() {
        return Err(CrossingError::NormalChernOnPoint("minimum"));
    }
    if p.max.kind.is_point() && p.max.normal_chern.is_some() {
        return Err(CrossingError::NormalChernOnPoint("maximum"));
    }
    if p.walls.first().is_some_and(|w| w.same_level) {
        return Err(CrossingError::SameLevelAsMinimum);
    }
    let mut space = min_space(&p.min)?;
    let mut spaces = vec![space];
    for (i, w) in p.walls.iter().enumerate() {
        let site = w.describe(i);
        let bad = |reason: &str| CrossingError::BadWall {
            site: site.clone(),
            reason: reason.to_string(),
        };
        match (w.index, w.kind) {
            (2, ComponentKind::Surface { .. }) => {
                if let Some(eta) = &w.dual_class {
                    if eta.0.len() != space.rank() {
                        return Err(CrossingError::Lattice {
                            site,
                            source: LatticeError::RankMismatch {
                                space,
                                expected: space.rank(),
                                found: eta.0.len(),
                            },
                        });
                    }
                }
            }
            (4, ComponentKind::Surface { .. }) => {
                return Err(bad(
                    "a fixed surface with two negative weights is a local maximum, so interior surfaces have index 2",
                ))
            }
            (2, ComponentKind::Point) => {
                if space != SpaceKind::ProjectivePlane {
                    return Err(CrossingError::PointOnWrongSpace { site, index: 2, space });
                }
                space = SpaceKind::BLOWN_UP_PLANE;
            }
            (4, ComponentKind::Point) => {
                if space != SpaceKind::BLOWN_UP_PLANE {
                    return Err(CrossingError::PointOnWrongSpace { site, index: 4, space });
                }
                space = SpaceKind::ProjectivePlane;
            }
            (other, _) => return Err(bad(&format!("interior index must be 2 or 4, got {other}"))),
        }
        if w.kind.is_point() && w.dual_class.is_some() {
            return Err(bad("dual_class applies only to surfaces"));
        }
        spaces.push(space);
    }
    Ok(spaces)
}
