//! Random profiles and walks shared by the integration tests.
#![allow(dead_code)]

use hamsix_core::affine::{Affine, Param};
use hamsix_core::crossing::{
    cross_index2_point, cross_index2_surface, cross_index4_point, init_min, Extremum, IntervalState, Profile, Twist,
    Wall,
};
use hamsix_core::lattice::{adjunction_value, blowdown_preimage, exceptional_class, IntClass, SpaceKind};
use rand::rngs::StdRng;
use rand::Rng;

pub fn gap(i: usize) -> Affine {
    Affine::var(Param::Gap(i as u32))
}

/// Genus of an embedded surface in class `c`, if the adjunction formula
/// gives a nonnegative integer.
pub fn adjunction_genus(space: SpaceKind, c: &IntClass) -> Option<u32> {
    let v = adjunction_value(space, c).ok()?;
    (v >= -2 && v % 2 == 0).then(|| ((v + 2) / 2) as u32)
}

#[derive(Clone, Debug)]
pub enum Step {
    Surface(IntClass),
    Index2Point,
    Index4Point,
}

/// One crossing of a random walk: state below, the step, state above and
/// the form that must vanish at an index-4 point.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub below: IntervalState,
    pub step: Step,
    pub length: Affine,
    pub above: IntervalState,
    pub vanish: Option<Affine>,
}

pub fn random_minimum(rng: &mut StdRng) -> Extremum {
    if rng.gen_bool(0.4) {
        Extremum::point()
    } else {
        Extremum::surface(rng.gen_range(0..=3), Some(rng.gen_range(-4..=4)))
    }
}

fn random_class(rng: &mut StdRng, space: SpaceKind) -> IntClass {
    match space.rank() {
        1 => IntClass::u(rng.gen_range(-3..=3)),
        _ => IntClass::xy(rng.gen_range(-3..=3), rng.gen_range(-3..=3)),
    }
}

/// A random walk of up to `max_steps` crossings, with no closing condition.
pub fn random_walk(rng: &mut StdRng, max_steps: usize) -> (IntervalState, Vec<Crossing>) {
    let start = init_min(&random_minimum(rng)).expect("random minima are valid");
    let mut s = start.clone();
    let mut out = Vec::new();
    for i in 0..rng.gen_range(1..=max_steps) {
        let length = gap(i);
        let y = exceptional_class(s.space).ok();
        let can_blow_down = y.as_ref().is_some_and(|y| blowdown_preimage(&s.euler.add(y)).is_ok());
        let choice = rng.gen_range(0..3);
        let (step, above, vanish) = if s.space == SpaceKind::ProjectivePlane && choice == 0 {
            (Step::Index2Point, cross_index2_point(&s, &length).unwrap(), None)
        } else if can_blow_down && choice == 0 {
            let (n, v) = cross_index4_point(&s, &length).unwrap();
            (Step::Index4Point, n, Some(v))
        } else {
            let eta = random_class(rng, s.space);
            let n = cross_index2_surface(&s, &eta, &length).unwrap();
            (Step::Surface(eta), n, None)
        };
        out.push(Crossing {
            below: s.clone(),
            step,
            length,
            above: above.clone(),
            vanish,
        });
        s = above;
    }
    (start, out)
}

fn plane_segment(rng: &mut StdRng, euler_u: &mut i64, count: usize, close_to: Option<i64>) -> Option<Vec<Wall>> {
    let mut walls = Vec::new();
    for j in 0..count {
        let a = match close_to {
            Some(target) if j + 1 == count => target - *euler_u,
            _ => rng.gen_range(-2..=4),
        };
        let eta = IntClass::u(a);
        let genus = adjunction_genus(SpaceKind::ProjectivePlane, &eta)?;
        *euler_u += a;
        walls.push(Wall::surface(genus, Some(eta)));
    }
    Some(walls)
}

/// Point minimum, surfaces on the plane, point maximum.
fn plane_profile(rng: &mut StdRng) -> Option<Profile> {
    let mut e = -1;
    let n = rng.gen_range(1..=3);
    let walls = plane_segment(rng, &mut e, n, Some(1))?;
    Some(Profile::new(Extremum::point(), walls, Extremum::point()))
}

/// Plane, a blow-up, surfaces on the blown-up plane, a blow-down, plane.
fn blown_up_profile(rng: &mut StdRng) -> Option<Profile> {
    let mut e = -1;
    let before = rng.gen_range(0..=2);
    let mut walls = plane_segment(rng, &mut e, before, None)?;
    walls.push(Wall::point(2));
    let space = SpaceKind::BLOWN_UP_PLANE;
    // e = beta^* e + y
    let (mut ex, mut ey) = (e, e + 1);
    let middle = rng.gen_range(1..=2);
    for j in 0..middle {
        let a = rng.gen_range(-2..=2);
        let b = if j + 1 == middle {
            // make e + y a pullback
            ex + a - ey - 1
        } else {
            rng.gen_range(-2..=2)
        };
        let eta = IntClass::xy(a, b);
        let genus = adjunction_genus(space, &eta)?;
        ex += a;
        ey += b;
        walls.push(Wall::surface(genus, Some(eta)));
    }
    walls.push(Wall::point(4));
    let mut e = ex;
    let after = rng.gen_range(1..=2);
    walls.extend(plane_segment(rng, &mut e, after, Some(1))?);
    Some(Profile::new(Extremum::point(), walls, Extremum::point()))
}

/// Surface minimum, surfaces on a ruled space, surface maximum closing
/// along the fiber class (untwisted).
fn ruled_profile(rng: &mut StdRng) -> Option<Profile> {
    let genus = rng.gen_range(0..=2);
    let b: i64 = rng.gen_range(-3..=3);
    let space = if b.rem_euclid(2) == 0 {
        SpaceKind::TrivialRuled { genus }
    } else {
        SpaceKind::NontrivialRuled { genus }
    };
    let mut ey = -1;
    let n = rng.gen_range(1..=3);
    let mut walls = Vec::new();
    for j in 0..n {
        let a = rng.gen_range(-3..=3);
        let y = if j + 1 == n { 1 - ey } else { rng.gen_range(-1..=3) };
        let eta = IntClass::xy(a, y);
        let g = adjunction_genus(space, &eta)?;
        ey += y;
        walls.push(Wall::surface(g, Some(eta)));
    }
    Some(
        Profile::new(Extremum::surface(genus, Some(b)), walls, Extremum::surface(genus, None))
            .with_twist(Twist::Untwisted),
    )
}

/// A random profile whose Euler class closes, with every dual class given.
pub fn random_closed_profile(rng: &mut StdRng, case: usize) -> Profile {
    loop {
        let p = match case % 3 {
            0 => plane_profile(rng),
            1 => blown_up_profile(rng),
            _ => ruled_profile(rng),
        };
        if let Some(p) = p {
            return p;
        }
    }
}
