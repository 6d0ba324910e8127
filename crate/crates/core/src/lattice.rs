//! Second cohomology lattices of the reduced spaces.
//!
//! A regular reduced space is either the projective plane or an
//! S²-bundle over a closed surface. Bases are fixed once:
//!
//! * projective plane: `u`, the hyperplane class;
//! * ruled surfaces: `x`, dual to the fiber, and `y`, dual to the base
//!   section (trivial bundle) or to the section of self-intersection −1
//!   (nontrivial bundle).
//!
//! The nontrivial bundle over the sphere is the projective plane blown up
//! at one point; its `y` is the exceptional class and `x + y` pulls back
//! the line class.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("class has {found} coefficients but {space} has rank {expected}")]
    RankMismatch {
        space: SpaceKind,
        expected: usize,
        found: usize,
    },
    #[error("expected a class on the projective plane, got one on {0}")]
    NotProjectivePlane(SpaceKind),
    #[error("{0} has no exceptional sphere")]
    NoExceptionalSphere(SpaceKind),
    #[error("class {0} is not pulled back from the projective plane")]
    NotInPullbackImage(IntClass),
}

/// Diffeomorphism type of a regular reduced space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    ProjectivePlane,
    TrivialRuled { genus: u32 },
    NontrivialRuled { genus: u32 },
}

impl SpaceKind {
    /// The projective plane blown up at a point.
    pub const BLOWN_UP_PLANE: SpaceKind = SpaceKind::NontrivialRuled { genus: 0 };

    pub fn rank(self) -> usize {
        match self {
            SpaceKind::ProjectivePlane => 1,
            _ => 2,
        }
    }

    pub fn is_ruled(self) -> bool {
        !matches!(self, SpaceKind::ProjectivePlane)
    }

    /// Genus of the base of the ruling.
    pub fn base_genus(self) -> Option<u32> {
        match self {
            SpaceKind::ProjectivePlane => None,
            SpaceKind::TrivialRuled { genus } | SpaceKind::NontrivialRuled { genus } => Some(genus),
        }
    }

    fn gram(self) -> &'static [&'static [i64]] {
        match self {
            SpaceKind::ProjectivePlane => &[&[1]],
            SpaceKind::TrivialRuled { .. } => &[&[0, 1], &[1, 0]],
            SpaceKind::NontrivialRuled { .. } => &[&[0, 1], &[1, -1]],
        }
    }

    /// Names of the basis classes.
    pub fn basis_names(self) -> &'static [&'static str] {
        match self {
            SpaceKind::ProjectivePlane => &["u"],
            _ => &["x", "y"],
        }
    }

    fn check(self, len: usize) -> Result<(), LatticeError> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(LatticeError::RankMismatch {
                space: self,
                expected: self.rank(),
                found: len,
            })
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::ProjectivePlane => f.write_str("CP2"),
            SpaceKind::TrivialRuled { genus } => write!(f, "S2 x Sigma_{genus}"),
            SpaceKind::NontrivialRuled { genus: 0 } => f.write_str("CP2 # -CP2"),
            SpaceKind::NontrivialRuled { genus } => write!(f, "E(Sigma_{genus})"),
        }
    }
}

/// An integral class, in the basis of whatever space it is paired on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntClass(pub Vec<i64>);

impl IntClass {
    /// `l * u` on the projective plane.
    pub fn u(l: i64) -> Self {
        IntClass(vec![l])
    }

    /// `a * x + b * y` on a ruled surface.
    pub fn xy(a: i64, b: i64) -> Self {
        IntClass(vec![a, b])
    }

    pub fn zero(space: SpaceKind) -> Self {
        IntClass(vec![0; space.rank()])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &IntClass) -> IntClass {
        IntClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntClass) -> IntClass {
        IntClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntClass {
        IntClass(self.0.iter().map(|a| -a).collect())
    }

    /// Renders with basis names, e.g. `3x - y` or `2u`.
    pub fn render(&self, space: SpaceKind) -> String {
        render_combination(&self.0, space.basis_names())
    }
}

impl fmt::Display for IntClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = if self.0.len() == 1 { &["u"] } else { &["x", "y"] };
        f.write_str(&render_combination(&self.0, names))
    }
}

fn render_combination(coeffs: &[i64], names: &[&str]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if *c == 0 {
            continue;
        }
        if out.is_empty() {
            if *c < 0 {
                out.push('-');
            }
        } else if *c < 0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if c.abs() != 1 {
            out.push_str(&c.abs().to_string());
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Intersection number of two integral classes.
pub fn pair(space: SpaceKind, a: &IntClass, b: &IntClass) -> Result<i64, LatticeError> {
    space.check(a.0.len())?;
    space.check(b.0.len())?;
    let g = space.gram();
    let mut acc = 0;
    for (i, ai) in a.0.iter().enumerate() {
        for (j, bj) in b.0.iter().enumerate() {
            acc += ai * g[i][j] * bj;
        }
    }
    Ok(acc)
}

/// Intersection pairing extended to rational coefficient vectors.
pub fn pair_rational(space: SpaceKind, a: &[Q], b: &[Q]) -> Result<Q, LatticeError> {
    space.check(a.len())?;
    space.check(b.len())?;
    let g = space.gram();
    let mut acc = Q::default();
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if g[i][j] != 0 {
                acc += ai * bj * Q::from_integer(g[i][j].into());
            }
        }
    }
    Ok(acc)
}

/// Row `i` of the Gram matrix: the pairing of basis class `i` with each
/// basis class.
pub(crate) fn gram_row(space: SpaceKind, i: usize) -> &'static [i64] {
    space.gram()[i]
}

/// Pullback along the blow-down map `CP2 # -CP2 -> CP2`: `l u ↦ l (x + y)`.
pub fn blowdown_pullback(c: &IntClass) -> Result<IntClass, LatticeError> {
    match c.0.as_slice() {
        [l] => Ok(IntClass::xy(*l, *l)),
        other => Err(LatticeError::NotProjectivePlane(if other.len() == 2 {
            SpaceKind::BLOWN_UP_PLANE
        } else {
            SpaceKind::ProjectivePlane
        })),
    }
}

/// Inverse of [`blowdown_pullback`] on its image.
pub fn blowdown_preimage(c: &IntClass) -> Result<IntClass, LatticeError> {
    match c.0.as_slice() {
        [a, b] if a == b => Ok(IntClass::u(*a)),
        [_, _] => Err(LatticeError::NotInPullbackImage(c.clone())),
        _ => Err(LatticeError::RankMismatch {
            space: SpaceKind::BLOWN_UP_PLANE,
            expected: 2,
            found: c.0.len(),
        }),
    }
}

/// Dual class of the exceptional sphere of the blown-up plane.
pub fn exceptional_class(space: SpaceKind) -> Result<IntClass, LatticeError> {
    if space == SpaceKind::BLOWN_UP_PLANE {
        Ok(IntClass::xy(0, 1))
    } else {
        Err(LatticeError::NoExceptionalSphere(space))
    }
}

/// Canonical class of the standard complex structure.
///
/// Projective plane `-3u`; trivial bundle `(2g - 2) x - 2y`; nontrivial
/// bundle `(2g - 3) x - 2y`. Fixed by `K · F = -2` on the fiber and the
/// adjunction equality on the distinguished section.
pub fn canonical_class(space: SpaceKind) -> IntClass {
    match space {
        SpaceKind::ProjectivePlane => IntClass::u(-3),
        SpaceKind::TrivialRuled { genus } => IntClass::xy(2 * genus as i64 - 2, -2),
        SpaceKind::NontrivialRuled { genus } => IntClass::xy(2 * genus as i64 - 3, -2),
    }
}

/// `c · c + K · c`, which equals `2 g - 2` for an embedded symplectic
/// surface of genus `g` representing `c`.
pub fn adjunction_value(space: SpaceKind, c: &IntClass) -> Result<i64, LatticeError> {
    Ok(pair(space, c, c)? + pair(space, &canonical_class(space), c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: SpaceKind = SpaceKind::TrivialRuled { genus: 3 };
    const N: SpaceKind = SpaceKind::NontrivialRuled { genus: 2 };
    const P: SpaceKind = SpaceKind::ProjectivePlane;

    #[test]
    fn basis_pairings() {
        let x = IntClass::xy(1, 0);
        let y = IntClass::xy(0, 1);
        assert_eq!(pair(T, &x, &x), Ok(0));
        assert_eq!(pair(T, &y, &y), Ok(0));
        assert_eq!(pair(T, &x, &y), Ok(1));
        assert_eq!(pair(N, &x, &x), Ok(0));
        assert_eq!(pair(N, &y, &y), Ok(-1));
        assert_eq!(pair(N, &x, &y), Ok(1));
        assert_eq!(pair(P, &IntClass::u(1), &IntClass::u(1)), Ok(1));
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let err = pair(P, &IntClass::xy(1, 0), &IntClass::u(1)).unwrap_err();
        assert!(matches!(err, LatticeError::RankMismatch { expected: 1, found: 2, .. }));
    }

    #[test]
    fn pullback_examples() {
        assert_eq!(blowdown_pullback(&IntClass::u(1)), Ok(IntClass::xy(1, 1)));
        assert_eq!(blowdown_pullback(&IntClass::u(0)), Ok(IntClass::xy(0, 0)));
        let two = blowdown_pullback(&IntClass::u(2)).unwrap();
        assert_eq!(two, IntClass::xy(2, 2));
        // 2*2*2 - 4 = 4 = (2u)^2
        assert_eq!(pair(SpaceKind::BLOWN_UP_PLANE, &two, &two), Ok(4));
        assert!(blowdown_pullback(&IntClass::xy(1, 0)).is_err());
    }

    #[test]
    fn preimage_requires_equal_coefficients() {
        assert_eq!(blowdown_preimage(&IntClass::xy(1, 1)), Ok(IntClass::u(1)));
        assert_eq!(blowdown_preimage(&IntClass::xy(0, 0)), Ok(IntClass::u(0)));
        assert!(matches!(
            blowdown_preimage(&IntClass::xy(0, 2)),
            Err(LatticeError::NotInPullbackImage(_))
        ));
    }

    #[test]
    fn exceptional_class_only_on_blown_up_plane() {
        let e = exceptional_class(SpaceKind::BLOWN_UP_PLANE).unwrap();
        assert_eq!(e, IntClass::xy(0, 1));
        assert_eq!(pair(SpaceKind::BLOWN_UP_PLANE, &e, &e), Ok(-1));
        assert_eq!(pair(SpaceKind::BLOWN_UP_PLANE, &e, &IntClass::xy(1, 0)), Ok(1));
        assert!(exceptional_class(SpaceKind::TrivialRuled { genus: 0 }).is_err());
        assert!(exceptional_class(P).is_err());
        assert!(exceptional_class(SpaceKind::NontrivialRuled { genus: 1 }).is_err());
    }

    #[test]
    fn adjunction_on_known_curves() {
        // lines and conics are spheres, cubics are tori
        assert_eq!(adjunction_value(P, &IntClass::u(1)), Ok(-2));
        assert_eq!(adjunction_value(P, &IntClass::u(2)), Ok(-2));
        assert_eq!(adjunction_value(P, &IntClass::u(3)), Ok(0));
        // fiber is a sphere, base section has the base genus
        assert_eq!(adjunction_value(T, &IntClass::xy(1, 0)), Ok(-2));
        assert_eq!(adjunction_value(T, &IntClass::xy(0, 1)), Ok(4));
        assert_eq!(adjunction_value(N, &IntClass::xy(0, 1)), Ok(2));
        assert_eq!(adjunction_value(N, &IntClass::xy(1, 0)), Ok(-2));
    }

    #[test]
    fn display_uses_basis_names() {
        assert_eq!(IntClass::xy(3, -1).to_string(), "3x - y");
        assert_eq!(IntClass::xy(0, 0).to_string(), "0");
        assert_eq!(IntClass::u(-1).to_string(), "-u");
        assert_eq!(IntClass::xy(-1, 2).to_string(), "-x + 2y");
    }

    fn ruled() -> impl Strategy<Value = SpaceKind> {
        prop_oneof![
            (0u32..5).prop_map(|genus| SpaceKind::TrivialRuled { genus }),
            (0u32..5).prop_map(|genus| SpaceKind::NontrivialRuled { genus }),
        ]
    }

    fn class2() -> impl Strategy<Value = IntClass> {
        (-20i64..20, -20i64..20).prop_map(|(a, b)| IntClass::xy(a, b))
    }

    proptest! {
        #[test]
        fn pairing_is_symmetric_and_bilinear(s in ruled(), a in class2(), b in class2(), c in class2(), k in -5i64..5) {
            prop_assert_eq!(pair(s, &a, &b), pair(s, &b, &a));
            let lhs = pair(s, &a.add(&b), &c).unwrap();
            prop_assert_eq!(lhs, pair(s, &a, &c).unwrap() + pair(s, &b, &c).unwrap());
            let ka = IntClass(a.0.iter().map(|v| k * v).collect());
            prop_assert_eq!(pair(s, &ka, &c).unwrap(), k * pair(s, &a, &c).unwrap());
        }

        #[test]
        fn pullback_is_isometric(l in -50i64..50, m in -50i64..50) {
            let (a, b) = (IntClass::u(l), IntClass::u(m));
            let pa = blowdown_pullback(&a).unwrap();
            let pb = blowdown_pullback(&b).unwrap();
            prop_assert_eq!(pair(SpaceKind::BLOWN_UP_PLANE, &pa, &pb).unwrap(), pair(P, &a, &b).unwrap());
            prop_assert_eq!(blowdown_preimage(&pa).unwrap(), a);
        }

        #[test]
        fn self_intersection_parity(g in 0u32..5, a in class2()) {
            let t = pair(SpaceKind::TrivialRuled { genus: g }, &a, &a).unwrap();
            prop_assert_eq!(t.rem_euclid(2), 0);
            let n = pair(SpaceKind::NontrivialRuled { genus: g }, &a, &a).unwrap();
            prop_assert_eq!(n.rem_euclid(2), a.0[1].rem_euclid(2));
        }
    }
}
