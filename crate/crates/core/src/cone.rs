//! Symplectic cone membership and representability of classes by connected
//! symplectic surfaces on the reduced spaces.

use std::fmt;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::affine::{Affine, Param, Q};
use crate::lattice::{gram_row, IntClass, LatticeError, SpaceKind};

/// A cohomology class whose coefficients are affine in the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FormClass(pub Vec<Affine>);

impl FormClass {
    pub fn zero(space: SpaceKind) -> Self {
        FormClass(vec![Affine::zero(); space.rank()])
    }

    pub fn from_int(c: &IntClass) -> Self {
        FormClass(c.0.iter().map(|&v| Affine::int(v)).collect())
    }

    pub fn coeffs(&self) -> &[Affine] {
        &self.0
    }

    pub fn add(&self, other: &FormClass) -> FormClass {
        FormClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &FormClass) -> FormClass {
        FormClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + scale * c` for an integral class `c`.
    pub fn add_scaled(&self, c: &IntClass, scale: &Affine) -> FormClass {
        FormClass(
            self.0
                .iter()
                .zip(&c.0)
                .map(|(a, &k)| a + &(scale * k))
                .collect(),
        )
    }

    pub fn substitute(&self, p: Param, value: &Affine) -> FormClass {
        FormClass(self.0.iter().map(|a| a.substitute(p, value)).collect())
    }

    /// The class at running level `level` inside its interval.
    pub fn at_level(&self, level: &Affine) -> FormClass {
        self.substitute(Param::Level, level)
    }

    /// Coefficientwise derivative in the running level.
    pub fn level_slope(&self) -> Vec<Q> {
        self.0.iter().map(|a| a.coeff(Param::Level)).collect()
    }

    pub fn rename(&self, map: &BTreeMap<Param, Param>) -> FormClass {
        FormClass(self.0.iter().map(|a| a.rename(map)).collect())
    }

    /// Pairing with an integral class; affine in the parameters.
    pub fn pair_int(&self, space: SpaceKind, c: &IntClass) -> Result<Affine, LatticeError> {
        check_rank(space, self.0.len())?;
        check_rank(space, c.0.len())?;
        let mut acc = Affine::zero();
        for (i, a) in self.0.iter().enumerate() {
            let row = gram_row(space, i);
            let weight: i64 = row.iter().zip(&c.0).map(|(g, k)| g * k).sum();
            if weight != 0 {
                acc += &(a * weight);
            }
        }
        Ok(acc)
    }

    /// Values of constant coefficients; `None` if any coefficient still
    /// depends on a parameter.
    pub fn constant_values(&self) -> Option<Vec<Q>> {
        self.0
            .iter()
            .map(|a| a.is_constant().then(|| a.constant_term().clone()))
            .collect()
    }

    pub fn render(&self, space: SpaceKind) -> String {
        let names = space.basis_names();
        self.0
            .iter()
            .zip(names)
            .map(|(a, n)| {
                if a.is_constant() || a.terms().count() == 1 && a.constant_term().is_zero() {
                    format!("{a}*{n}")
                } else {
                    format!("({a})*{n}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn check_rank(space: SpaceKind, len: usize) -> Result<(), LatticeError> {
    if space.rank() == len {
        Ok(())
    } else {
        Err(LatticeError::RankMismatch {
            space,
            expected: space.rank(),
            found: len,
        })
    }
}

/// Which geometric quantity a linear cone condition measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeRole {
    /// Area of a line in the projective plane.
    Line,
    /// Area of a fiber of the ruling.
    Fiber,
    /// Area of the distinguished section (the base in the trivial case, the
    /// (−1)-section in the nontrivial case).
    Section,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeCondition {
    pub role: ConeRole,
    /// Required to be strictly positive.
    pub form: Affine,
}

/// Linear conditions equivalent to the class carrying a symplectic form
/// (compatible with the ruling, with positive fiber area).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeVerdict {
    pub conditions: Vec<ConeCondition>,
}

impl ConeVerdict {
    /// `Some(true/false)` once every condition is a constant.
    pub fn satisfied(&self) -> Option<bool> {
        let mut all = true;
        for c in &self.conditions {
            if !c.form.is_constant() {
                return None;
            }
            all &= c.form.constant_term().is_positive();
        }
        Some(all)
    }
}

/// Symplectic-cone conditions for `a` on `space`.
///
/// With `a = c x + d y` on a ruled surface the conditions are
/// `a·x = d > 0` and `a·y > 0`, i.e. `c > 0` (trivial) or `c - d > 0`
/// (nontrivial). Given positive fiber area these are equivalent to
/// `a² > 0` and, in the nontrivial case, `a² > (a·x)²`, since
/// `a² = 2cd` resp. `a² - d² = 2d(c - d)`. On the projective plane the
/// condition is `a·u > 0`.
pub fn symplectic_conditions(space: SpaceKind, a: &FormClass) -> Result<ConeVerdict, LatticeError> {
    let conditions = match space {
        SpaceKind::ProjectivePlane => vec![ConeCondition {
            role: ConeRole::Line,
            form: a.pair_int(space, &IntClass::u(1))?,
        }],
        _ => vec![
            ConeCondition {
                role: ConeRole::Fiber,
                form: a.pair_int(space, &IntClass::xy(1, 0))?,
            },
            ConeCondition {
                role: ConeRole::Section,
                form: a.pair_int(space, &IntClass::xy(0, 1))?,
            },
        ],
    };
    Ok(ConeVerdict { conditions })
}

/// Why a class is not certified to carry a connected symplectic
/// representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Obstruction {
    /// The class is represented only by disjoint unions (e.g. `2y`).
    Disconnected,
    /// A degree-two branched projection onto the base would need
    /// `1 + genus - 2 * base_genus >= 0`.
    Hurwitz { excess: i64 },
    /// Outside every representability rule the engine knows.
    NoRule,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Disconnected => f.write_str("only disconnected representatives"),
            Obstruction::Hurwitz { excess } => {
                write!(f, "degree-2 projection violates Hurwitz bound (1 + g1 - 2g = {excess})")
            }
            Obstruction::NoRule => f.write_str("no representability rule applies"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Representability {
    Yes,
    /// Representable whenever every form is strictly positive.
    Conditional { inequalities: Vec<Affine> },
    No { obstruction: Obstruction, value: i64 },
}

/// Whether `c` is represented by a connected symplectic surface of the
/// given genus, for a symplectic form in the class `ambient`.
///
/// Conservative: answers `No` with [`Obstruction::NoRule`] outside the
/// known families. For `No` the `value` field is a constant that must be
/// positive for representability (the excess `1 + g1 - 2g` for
/// fiber-degree-two classes, zero otherwise), so callers can record the
/// obstruction as an unsatisfiable linear constraint.
pub fn connected_representable(
    space: SpaceKind,
    c: &IntClass,
    genus: u32,
    ambient: &FormClass,
) -> Result<Representability, LatticeError> {
    check_rank(space, c.0.len())?;
    check_rank(space, ambient.0.len())?;
    let no = |obstruction, value| Representability::No { obstruction, value };
    let area_gap = |major: IntClass, minor: IntClass, n: i64| -> Result<Representability, LatticeError> {
        let lhs = ambient.pair_int(space, &major)?;
        let rhs = ambient.pair_int(space, &minor)?;
        Ok(Representability::Conditional {
            inequalities: vec![lhs - rhs * n],
        })
    };
    let x = IntClass::xy(1, 0);
    let y = IntClass::xy(0, 1);
    let out = match space {
        SpaceKind::ProjectivePlane => {
            if c.0[0] >= 1 {
                Representability::Yes
            } else {
                no(Obstruction::NoRule, 0)
            }
        }
        SpaceKind::TrivialRuled { genus: base } => {
            let (a, b) = (c.0[0], c.0[1]);
            match (a, b) {
                (1, 0) | (0, 1) => Representability::Yes,
                _ if a >= 1 && b >= 1 => Representability::Yes,
                _ if b == 1 && a <= -1 => area_gap(y, x, -a)?,
                // both rulings of S2 x S2 play the same role
                _ if base == 0 && a == 1 && b <= -1 => area_gap(x, y, -b)?,
                (0, 2) => no(Obstruction::Disconnected, 0),
                (2, 0) if base == 0 => no(Obstruction::Disconnected, 0),
                _ if b == 2 && a < 0 => fiber_degree_two(a, genus, base),
                _ => no(Obstruction::NoRule, 0),
            }
        }
        SpaceKind::NontrivialRuled { genus: base } => {
            let (a, b) = (c.0[0], c.0[1]);
            match (a, b) {
                (1, 0) | (0, 1) | (1, 1) => Representability::Yes,
                _ if a > 1 && b > 0 => Representability::Yes,
                _ if b == 1 && a <= -1 => area_gap(y, x, -a)?,
                (1, 2) => no(Obstruction::Disconnected, 0),
                _ if b == 2 && a < 1 => fiber_degree_two(a - 1, genus, base),
                _ => no(Obstruction::NoRule, 0),
            }
        }
    };
    Ok(out)
}

/// `shifted` is the x-coefficient measured from the disconnected class
/// (`2y` resp. `x + 2y`); it is negative here.
fn fiber_degree_two(shifted: i64, genus: u32, base: u32) -> Representability {
    let excess = 1 + genus as i64 - 2 * base as i64;
    if excess < 0 {
        Representability::No {
            obstruction: Obstruction::Hurwitz { excess },
            value: excess,
        }
    } else {
        Representability::No {
            obstruction: Obstruction::NoRule,
            value: shifted,
        }
    }
}

/// Evaluates a constant verdict; `None` when conditions remain symbolic.
pub fn is_representable_now(r: &Representability) -> Option<bool> {
    match r {
        Representability::Yes => Some(true),
        Representability::No { .. } => Some(false),
        Representability::Conditional { inequalities } => {
            let mut all = true;
            for f in inequalities {
                if !f.is_constant() {
                    return None;
                }
                all &= f.constant_term() > &Q::zero();
            }
            Some(all)
        }
    }
}
