//! Initial state and single-wall transitions.

use serde::Serialize;

use crate::affine::{Affine, Param};
use crate::cone::FormClass;
use crate::lattice::{blowdown_preimage, blowdown_pullback, exceptional_class, IntClass, SpaceKind};

use super::{min_space, ComponentKind, CrossingError, Extremum};

/// Data on one regular interval. `omega` is affine in [`Param::Level`],
/// the height above the interval's lower end, with slope `-euler`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalState {
    pub space: SpaceKind,
    pub euler: IntClass,
    pub omega: FormClass,
}

impl IntervalState {
    fn starting_at(space: SpaceKind, euler: IntClass, start: FormClass) -> Self {
        let omega = start.add_scaled(&euler, &-Affine::var(Param::Level));
        IntervalState { space, euler, omega }
    }

    /// The class at height `level` above the lower end.
    pub fn at(&self, level: &Affine) -> FormClass {
        self.omega.at_level(level)
    }

    pub fn start(&self) -> FormClass {
        self.at(&Affine::zero())
    }
}

/// State just above the minimum.
///
/// Isolated point: `CP2`, `e = -u`, `omega = t u`. Surface with
/// `b_min = 2k` or `2k + 1`: the trivial resp. nontrivial bundle over the
/// surface, `e = k x - y`, `omega = alpha0 x + t (y - k x)`.
pub fn init_min(min: &Extremum) -> Result<IntervalState, CrossingError> {
    let space = min_space(min)?;
    Ok(match min.kind {
        ComponentKind::Point => IntervalState::starting_at(space, IntClass::u(-1), FormClass::zero(space)),
        ComponentKind::Surface { .. } => {
            let b = min.normal_chern.ok_or(CrossingError::MissingNormalChern)?;
            let k = b.div_euclid(2);
            let start = FormClass(vec![Affine::var(Param::MinSize), Affine::zero()]);
            IntervalState::starting_at(space, IntClass::xy(k, -1), start)
        }
    })
}

/// Crossing an index-2 fixed surface with dual class `eta`, leaving `s`
/// after `length`: `e += eta`, the class is continuous.
pub fn cross_index2_surface(s: &IntervalState, eta: &IntClass, length: &Affine) -> Result<IntervalState, CrossingError> {
    check_class(s.space, eta, "index-2 surface")?;
    Ok(IntervalState::starting_at(s.space, s.euler.add(eta), s.at(length)))
}

/// Walking downward across an index-2 surface seen from above, i.e. an
/// index-4 surface of the reversed action: `e -= eta`. `s` is the state
/// above the wall and `length` the height of the wall above the lower end
/// of the returned interval's successor; the returned state's class is
/// continuous at the wall.
pub fn cross_index4_surface(s: &IntervalState, eta: &IntClass, length: &Affine) -> Result<IntervalState, CrossingError> {
    check_class(s.space, eta, "index-4 surface")?;
    let euler = s.euler.sub(eta);
    // the lower interval ends at the wall where `s` starts
    let at_wall = s.start();
    let start = at_wall.add_scaled(&euler, length);
    Ok(IntervalState::starting_at(s.space, euler, start))
}

/// Crossing an index-2 point on `CP2`: the space is blown up,
/// `e = beta^* e + y`, and the class is pulled back.
pub fn cross_index2_point(s: &IntervalState, length: &Affine) -> Result<IntervalState, CrossingError> {
    if s.space != SpaceKind::ProjectivePlane {
        return Err(CrossingError::PointOnWrongSpace {
            site: "index-2 point".into(),
            index: 2,
            space: s.space,
        });
    }
    let y = exceptional_class(SpaceKind::BLOWN_UP_PLANE).expect("blown-up plane has y");
    let euler = blowdown_pullback(&s.euler)
        .map_err(CrossingError::lattice("index-2 point"))?
        .add(&y);
    let l = s.at(length).0[0].clone();
    let start = FormClass(vec![l.clone(), l]);
    Ok(IntervalState::starting_at(SpaceKind::BLOWN_UP_PLANE, euler, start))
}

/// Crossing an index-4 point on the blown-up plane: the exceptional sphere
/// is collapsed and `beta^* e_+ = e_- + y`.
///
/// Returns the new state and the form that must vanish at the wall (the
/// area of the exceptional sphere, `c - d` for `omega = c x + d y`). The
/// new class is `d u`.
pub fn cross_index4_point(s: &IntervalState, length: &Affine) -> Result<(IntervalState, Affine), CrossingError> {
    if s.space != SpaceKind::BLOWN_UP_PLANE {
        return Err(CrossingError::PointOnWrongSpace {
            site: "index-4 point".into(),
            index: 4,
            space: s.space,
        });
    }
    let y = exceptional_class(s.space).expect("blown-up plane has y");
    let shifted = s.euler.add(&y);
    let euler = blowdown_preimage(&shifted).map_err(|_| CrossingError::InconsistentAtIndex4 {
        site: "index-4 point".into(),
        euler: s.euler.render(s.space),
    })?;
    let at_wall = s.at(length);
    let vanish = at_wall
        .pair_int(s.space, &y)
        .map_err(CrossingError::lattice("index-4 point"))?;
    let start = FormClass(vec![at_wall.0[1].clone()]);
    Ok((IntervalState::starting_at(SpaceKind::ProjectivePlane, euler, start), vanish))
}

fn check_class(space: SpaceKind, eta: &IntClass, site: &str) -> Result<(), CrossingError> {
    if eta.0.len() == space.rank() {
        Ok(())
    } else {
        Err(CrossingError::Lattice {
            site: site.to_string(),
            source: crate::lattice::LatticeError::RankMismatch {
                space,
                expected: space.rank(),
                found: eta.0.len(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap(i: u32) -> Affine {
        Affine::var(Param::Gap(i))
    }

    #[test]
    fn point_minimum() {
        let s = init_min(&Extremum::point()).unwrap();
        assert_eq!(s.space, SpaceKind::ProjectivePlane);
        assert_eq!(s.euler, IntClass::u(-1));
        assert_eq!(s.omega.render(s.space), "t*u");
    }

    #[test]
    fn even_surface_minimum() {
        let s = init_min(&Extremum::surface(2, Some(6))).unwrap();
        assert_eq!(s.space, SpaceKind::TrivialRuled { genus: 2 });
        assert_eq!(s.euler, IntClass::xy(3, -1));
        assert_eq!(s.omega.render(s.space), "(alpha0 - 3*t)*x + t*y");
        let s0 = init_min(&Extremum::surface(0, Some(0))).unwrap();
        assert_eq!(s0.euler, IntClass::xy(0, -1));
    }

    #[test]
    fn odd_surface_minimum_uses_floor() {
        let s = init_min(&Extremum::surface(0, Some(-3))).unwrap();
        assert_eq!(s.space, SpaceKind::BLOWN_UP_PLANE);
        assert_eq!(s.euler, IntClass::xy(-2, -1));
    }

    #[test]
    fn missing_normal_chern() {
        assert_eq!(
            init_min(&Extremum::surface(1, None)),
            Err(CrossingError::MissingNormalChern)
        );
    }

    #[test]
    fn conic_on_plane() {
        let s = init_min(&Extremum::point()).unwrap();
        let n = cross_index2_surface(&s, &IntClass::u(2), &gap(0)).unwrap();
        assert_eq!(n.euler, IntClass::u(1));
        assert_eq!(n.omega.render(n.space), "(t0 - t)*u");
        let same = cross_index2_surface(&s, &IntClass::u(0), &gap(0)).unwrap();
        assert_eq!(same.euler, s.euler);
    }

    #[test]
    fn index2_point_from_minimum() {
        let s = init_min(&Extremum::point()).unwrap();
        let n = cross_index2_point(&s, &gap(0)).unwrap();
        assert_eq!(n.euler, IntClass::xy(-1, 0));
        assert_eq!(n.start().render(n.space), "t0*x + t0*y");
        let r = cross_index2_point(&n, &gap(1));
        assert!(matches!(r, Err(CrossingError::PointOnWrongSpace { index: 2, .. })));
    }

    #[test]
    fn index4_point_cases() {
        let base = IntervalState {
            space: SpaceKind::BLOWN_UP_PLANE,
            euler: IntClass::xy(1, 0),
            omega: FormClass(vec![Affine::var(Param::MinSize), Affine::var(Param::Level)]),
        };
        let (n, vanish) = cross_index4_point(&base, &gap(1)).unwrap();
        assert_eq!(n.euler, IntClass::u(1));
        assert_eq!(vanish.to_string(), "alpha0 - t1");
        let zero = IntervalState {
            euler: IntClass::xy(0, -1),
            ..base.clone()
        };
        assert_eq!(cross_index4_point(&zero, &gap(1)).unwrap().0.euler, IntClass::u(0));
        let bad = IntervalState {
            euler: IntClass::xy(0, 1),
            ..base
        };
        assert!(matches!(
            cross_index4_point(&bad, &gap(1)),
            Err(CrossingError::InconsistentAtIndex4 { .. })
        ));
    }

    #[test]
    fn downward_surface_crossing() {
        // above the conic of the first example, e = u; below it e = -u
        let above = IntervalState {
            space: SpaceKind::ProjectivePlane,
            euler: IntClass::u(1),
            omega: FormClass(vec![gap(0) - Affine::var(Param::Level)]),
        };
        let below = cross_index4_surface(&above, &IntClass::u(2), &gap(0)).unwrap();
        assert_eq!(below.euler, IntClass::u(-1));
        assert_eq!(below.omega.render(below.space), "t*u");
    }
}
