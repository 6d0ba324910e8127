//! The same action with the circle reversed: the moment map becomes its
//! negative, so the profile is read from the top down.

use std::collections::BTreeMap;

use crate::affine::Param;
use crate::lattice::IntClass;

use super::run::MaxShape;
use super::{run_profile, ComponentKind, CrossingError, Extremum, Profile, Wall};

/// Parameter renaming taking a profile with `walls` interior walls to its
/// flip: sizes of minimum and maximum swap, gap `i` becomes gap
/// `walls - i`.
pub fn flip_renaming(walls: usize) -> BTreeMap<Param, Param> {
    let mut map = BTreeMap::from([(Param::MinSize, Param::MaxSize), (Param::MaxSize, Param::MinSize)]);
    for i in 0..=walls {
        map.insert(Param::Gap(i as u32), Param::Gap((walls - i) as u32));
    }
    map
}

/// The reversed profile.
///
/// Isolated points change index `j -> 6 - j`. A fixed surface has one
/// negative weight from either side, so it stays at index 2 with the same
/// dual class: reversing the circle negates every Euler class, and the
/// jump `e_above - e_below` read downward is again `eta`. When the
/// original degenerates along `y` at the top (twisted), the flipped basis
/// swaps `x` and `y`. The new minimum's normal Chern number is the derived
/// `b_max`; solved dual classes and the derived twist are written in.
pub fn flip_profile(p: &Profile) -> Result<Profile, CrossingError> {
    let report = run_profile(p)?;
    let swap = report.max_shape == MaxShape::Y;
    let min = match p.max.kind {
        ComponentKind::Point => Extremum::point(),
        ComponentKind::Surface { genus } => {
            let b = report.b_max.ok_or_else(|| CrossingError::BadWall {
                site: "maximum".into(),
                reason: "the Euler class does not close, so b_max and the flip are undefined".into(),
            })?;
            Extremum::surface(genus, Some(b))
        }
    };
    let max = Extremum {
        kind: p.min.kind,
        normal_chern: p.min.normal_chern,
    };
    let m = p.walls.len();
    let walls = (0..m)
        .map(|j| {
            let old = m - 1 - j;
            let w = &p.walls[old];
            let dual_class = report.walls[old].dual_class.as_ref().map(|eta| {
                if swap {
                    IntClass(eta.0.iter().rev().copied().collect())
                } else {
                    eta.clone()
                }
            });
            Wall {
                index: if w.kind.is_point() { 6 - w.index } else { 2 },
                kind: w.kind,
                dual_class,
                same_level: j > 0 && p.walls[m - j].same_level,
            }
        })
        .collect();
    let rename = flip_renaming(m);
    let fixed = p
        .fixed
        .iter()
        .map(|(k, v)| (*rename.get(k).unwrap_or(k), v.clone()))
        .collect();
    Ok(Profile {
        min,
        walls,
        max,
        twist: Some(report.twist),
        fixed,
    })
}
