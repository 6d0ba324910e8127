//! Composition of the transitions into a full profile run.

use num_traits::Zero;
use serde::Serialize;

use crate::affine::{q, Affine, Param};
use crate::cone::{connected_representable, symplectic_conditions, ConeRole, FormClass, Representability};
use crate::feasibility::{eliminate, ConstraintSystem, Provenance, Relation, Rule};
use crate::lattice::{blowdown_pullback, pair, IntClass, SpaceKind};

use super::solve::candidate_shapes;
use super::transition::{cross_index2_point, cross_index2_surface, cross_index4_point, init_min, IntervalState};
use super::{solve_dual_classes, validate, ComponentKind, CrossingError, Profile, Twist};

/// How the reduced form degenerates at the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxShape {
    /// The class shrinks to zero on `CP2`.
    Isolated,
    /// The class tends to a multiple of `x`; the fiber `x` collapses.
    X,
    /// The class tends to a multiple of `y` on `S2 x S2`; the other ruling
    /// collapses.
    Y,
}

/// What sits at one end of a regular interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    PointMin,
    SurfaceMin,
    /// A level holding only fixed surfaces.
    SurfaceWall,
    /// A level holding at least one isolated point.
    PointWall,
    PointMax,
    SurfaceMaxX,
    SurfaceMaxY,
}

impl EndKind {
    /// Whether a cone condition of the given role is imposed strictly at
    /// this end. Otherwise only its closure (`>= 0`) holds there: the
    /// quantity degenerates at the extremum or on the collapsing sphere.
    fn strict_for(self, role: ConeRole) -> bool {
        match self {
            EndKind::SurfaceWall => true,
            EndKind::PointWall => role != ConeRole::Section,
            EndKind::PointMin | EndKind::PointMax => false,
            EndKind::SurfaceMin | EndKind::SurfaceMaxX => role == ConeRole::Section,
            EndKind::SurfaceMaxY => role == ConeRole::Fiber,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalReport {
    pub index: usize,
    pub gap: Param,
    /// Both ends lie on one level.
    pub zero_length: bool,
    pub space: SpaceKind,
    pub euler: IntClass,
    /// Affine in the running level `t`.
    pub omega: FormClass,
    pub lower: EndKind,
    pub upper: EndKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallReport {
    pub index: usize,
    pub morse_index: u8,
    pub kind: ComponentKind,
    pub space_below: SpaceKind,
    pub space_above: SpaceKind,
    pub dual_class: Option<IntClass>,
    /// The dual class was solved rather than given.
    pub solved: bool,
    /// Degrees of the normal line bundles of the fixed surface on which the
    /// circle acts with positive resp. negative weight.
    pub normal_cherns: Option<(i64, i64)>,
    /// The class at the wall's level.
    pub omega_at_wall: FormClass,
    pub representability: Option<Representability>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileReport {
    pub intervals: Vec<IntervalReport>,
    pub walls: Vec<WallReport>,
    pub b_min: Option<i64>,
    pub b_max: Option<i64>,
    pub twist: Twist,
    pub max_shape: MaxShape,
    /// The Euler class below the maximum matches the local model there.
    pub euler_closes: bool,
    pub constraints: ConstraintSystem,
}

struct Walk {
    states: Vec<IntervalState>,
    walls: Vec<WallReport>,
    extra: Vec<(Relation, Affine, Provenance)>,
    ends: Vec<EndKind>,
}

fn length(p: &Profile, i: usize) -> Affine {
    if zero_length(p, i) {
        Affine::zero()
    } else {
        Affine::var(p.gap(i))
    }
}

fn zero_length(p: &Profile, i: usize) -> bool {
    i > 0 && i < p.walls.len() && p.walls[i].same_level
}

/// Kinds of the wall levels, one entry per wall (the level it lies on).
fn level_kinds(p: &Profile) -> Vec<EndKind> {
    let mut out = vec![EndKind::SurfaceWall; p.walls.len()];
    let mut start = 0;
    while start < p.walls.len() {
        let mut end = start + 1;
        while end < p.walls.len() && p.walls[end].same_level {
            end += 1;
        }
        let kind = if p.walls[start..end].iter().any(|w| w.kind.is_point()) {
            EndKind::PointWall
        } else {
            EndKind::SurfaceWall
        };
        out[start..end].fill(kind);
        start = end;
    }
    out
}

fn walk(p: &Profile, etas: &[Option<IntClass>]) -> Result<Walk, CrossingError> {
    let mut state = init_min(&p.min)?;
    let mut states = Vec::new();
    let mut walls = Vec::new();
    let mut extra = Vec::new();
    for (i, w) in p.walls.iter().enumerate() {
        let site = w.describe(i);
        let len = length(p, i);
        let at_wall = state.at(&len);
        let below = state.space;
        let (next, report_eta, cherns, repr) = match w.kind {
            ComponentKind::Surface { genus } => {
                let eta = etas[i].clone().expect("solved");
                let next = cross_index2_surface(&state, &eta, &len).map_err(|e| relabel(e, &site))?;
                let c_plus = pair(below, &next.euler, &eta).map_err(CrossingError::lattice(&site))?;
                let c_minus = -pair(below, &state.euler, &eta).map_err(CrossingError::lattice(&site))?;
                let repr =
                    connected_representable(below, &eta, genus, &at_wall).map_err(CrossingError::lattice(&site))?;
                let tag = Provenance::new(Rule::Representability, format!("{site}, class {}", eta.render(below)));
                match &repr {
                    Representability::Yes => {}
                    Representability::Conditional { inequalities } => {
                        for f in inequalities {
                            extra.push((Relation::Strict, f.clone(), tag.clone()));
                        }
                    }
                    Representability::No { obstruction, value } => {
                        let t = Provenance::new(Rule::Representability, format!("{}: {obstruction}", tag.site));
                        extra.push((Relation::Strict, Affine::int(*value), t));
                    }
                }
                (next, Some(eta), Some((c_plus, c_minus)), Some(repr))
            }
            ComponentKind::Point if w.index == 2 => {
                let next = cross_index2_point(&state, &len).map_err(|e| relabel(e, &site))?;
                (next, None, None, None)
            }
            ComponentKind::Point => {
                let (next, vanish) = cross_index4_point(&state, &len).map_err(|e| relabel(e, &site))?;
                extra.push((
                    Relation::Equal,
                    vanish,
                    Provenance::new(Rule::BlowDownImage, format!("{site}: exceptional sphere has zero area")),
                ));
                (next, None, None, None)
            }
        };
        walls.push(WallReport {
            index: i,
            morse_index: w.index,
            kind: w.kind,
            space_below: below,
            space_above: next.space,
            dual_class: report_eta,
            solved: w.dual_class.is_none() && w.kind.genus().is_some(),
            normal_cherns: cherns,
            omega_at_wall: at_wall,
            representability: repr,
        });
        states.push(std::mem::replace(&mut state, next));
    }
    states.push(state);
    Ok(Walk {
        states,
        walls,
        extra,
        ends: level_kinds(p),
    })
}

fn relabel(e: CrossingError, site: &str) -> CrossingError {
    match e {
        CrossingError::InconsistentAtIndex4 { euler, .. } => CrossingError::InconsistentAtIndex4 {
            site: site.to_string(),
            euler,
        },
        CrossingError::PointOnWrongSpace { index, space, .. } => CrossingError::PointOnWrongSpace {
            site: site.to_string(),
            index,
            space,
        },
        CrossingError::Lattice { source, .. } => CrossingError::Lattice {
            site: site.to_string(),
            source,
        },
        other => other,
    }
}

struct Closing {
    vanish: Affine,
    constraints: Vec<(Relation, Affine, Provenance)>,
    euler_ok: bool,
    b_max: Option<i64>,
}

/// Conditions at the maximum for the given degeneration shape.
fn close_max(p: &Profile, top: &IntervalState, shape: MaxShape) -> Result<Closing, CrossingError> {
    let end = top.at(&Affine::var(p.top_gap()));
    let e = &top.euler.0;
    let mut constraints = Vec::new();
    match shape {
        MaxShape::Isolated => {
            if top.space != SpaceKind::ProjectivePlane {
                return Err(CrossingError::IsolatedMaxOverRuled(top.space));
            }
            let vanish = end.0[0].clone();
            constraints.push((
                Relation::Equal,
                vanish.clone(),
                Provenance::new(Rule::ClosingIsolatedMax, "maximum: class vanishes"),
            ));
            let euler_ok = e[0] == 1;
            if !euler_ok {
                constraints.push((
                    Relation::Equal,
                    Affine::int(e[0] - 1),
                    Provenance::new(
                        Rule::EulerClosing,
                        format!("maximum: Euler class below it is {} but must be u", top.euler.render(top.space)),
                    ),
                ));
            }
            Ok(Closing {
                vanish,
                constraints,
                euler_ok,
                b_max: None,
            })
        }
        MaxShape::X | MaxShape::Y => {
            let genus = p.max.kind.genus().expect("surface maximum");
            match top.space.base_genus() {
                None => return Err(CrossingError::SurfaceMaxOverPlane(top.space)),
                Some(g) if g != genus => return Err(CrossingError::MaxGenusMismatch { genus, space: top.space }),
                Some(_) => {}
            }
            let (collapse, survive, name) = if shape == MaxShape::X { (1, 0, "x") } else { (0, 1, "y") };
            let vanish = end.0[collapse].clone();
            constraints.push((
                Relation::Equal,
                vanish.clone(),
                Provenance::new(Rule::ClosingSurfaceMax, format!("maximum: class tends to a multiple of {name}")),
            ));
            constraints.push((
                Relation::Equal,
                &Affine::var(Param::MaxSize) - &end.0[survive],
                Provenance::new(Rule::ClosingSurfaceMax, "maximum: area of the maximal surface"),
            ));
            constraints.push((
                Relation::Strict,
                Affine::var(Param::MaxSize),
                Provenance::new(Rule::SizePositive, "maximum"),
            ));
            let euler_ok = e[collapse] == 1;
            let odd = matches!(top.space, SpaceKind::NontrivialRuled { .. }) as i64;
            let b_max = euler_ok.then(|| -2 * e[survive] + odd);
            if !euler_ok {
                constraints.push((
                    Relation::Equal,
                    Affine::int(e[collapse] - 1),
                    Provenance::new(
                        Rule::EulerClosing,
                        format!(
                            "maximum: Euler class below it is {}, whose {name}-coefficient must be 1",
                            top.euler.render(top.space)
                        ),
                    ),
                ));
            }
            Ok(Closing {
                vanish,
                constraints,
                euler_ok,
                b_max,
            })
        }
    }
}

fn cone_rule(space: SpaceKind) -> Rule {
    match space {
        SpaceKind::ProjectivePlane => Rule::ConeProjectivePlane,
        SpaceKind::TrivialRuled { .. } => Rule::ConeTrivialRuled,
        SpaceKind::NontrivialRuled { .. } => Rule::ConeNontrivialRuled,
    }
}

fn role_name(role: ConeRole) -> &'static str {
    match role {
        ConeRole::Line => "line area",
        ConeRole::Fiber => "fiber area",
        ConeRole::Section => "section area",
    }
}

fn assemble(
    p: &Profile,
    walk: &Walk,
    shape: MaxShape,
    closing: &Closing,
) -> Result<(ConstraintSystem, Vec<IntervalReport>), CrossingError> {
    let m = p.walls.len();
    let mut sys = ConstraintSystem::new();
    let mut raw: Vec<(Relation, Affine, Provenance)> = Vec::new();

    for i in 0..=m {
        let site = if i < m { format!("gap below wall {i}") } else { "gap below the maximum".to_string() };
        if zero_length(p, i) {
            raw.push((Relation::Equal, Affine::var(p.gap(i)), Provenance::new(Rule::SameLevel, site)));
        } else {
            raw.push((Relation::Strict, Affine::var(p.gap(i)), Provenance::new(Rule::GapPositive, site)));
        }
    }
    if !p.min.kind.is_point() {
        raw.push((
            Relation::Strict,
            Affine::var(Param::MinSize),
            Provenance::new(Rule::SizePositive, "minimum"),
        ));
    }

    let min_end = if p.min.kind.is_point() { EndKind::PointMin } else { EndKind::SurfaceMin };
    let max_end = match shape {
        MaxShape::Isolated => EndKind::PointMax,
        MaxShape::X => EndKind::SurfaceMaxX,
        MaxShape::Y => EndKind::SurfaceMaxY,
    };
    let mut intervals = Vec::new();
    for (i, st) in walk.states.iter().enumerate() {
        let lower = if i == 0 { min_end } else { walk.ends[i - 1] };
        let upper = if i == m { max_end } else { walk.ends[i] };
        let zl = zero_length(p, i);
        intervals.push(IntervalReport {
            index: i,
            gap: p.gap(i),
            zero_length: zl,
            space: st.space,
            euler: st.euler.clone(),
            omega: st.omega.clone(),
            lower,
            upper,
        });
        if zl {
            continue;
        }
        let rule = cone_rule(st.space);
        let gap = Affine::var(p.gap(i));
        let verdict = symplectic_conditions(st.space, &st.omega).map_err(CrossingError::lattice(format!("interval {i}")))?;
        for cond in &verdict.conditions {
            let name = role_name(cond.role);
            let lo_strict = lower.strict_for(cond.role);
            let hi_strict = upper.strict_for(cond.role);
            let at = |level: &Affine| cond.form.substitute(Param::Level, level);
            let rel = |s: bool| if s { Relation::Strict } else { Relation::Weak };
            raw.push((
                rel(lo_strict),
                at(&Affine::zero()),
                Provenance::new(rule, format!("interval {i}, lower end: {name}")),
            ));
            raw.push((
                rel(hi_strict),
                at(&gap),
                Provenance::new(rule, format!("interval {i}, upper end: {name}")),
            ));
            if !lo_strict && !hi_strict {
                raw.push((
                    Relation::Strict,
                    at(&gap.scale(&(q(1) / q(2)))),
                    Provenance::new(rule, format!("interval {i}, interior: {name}")),
                ));
            }
        }
    }

    raw.extend(walk.extra.iter().cloned());
    raw.extend(disjointness(p, walk)?);
    raw.extend(closing.constraints.iter().cloned());
    for (param, value) in &p.fixed {
        raw.push((
            Relation::Equal,
            Affine::var(*param) - Affine::constant(value.clone()),
            Provenance::new(Rule::FixedValue, format!("{param} fixed by the document")),
        ));
    }

    // solve the closing equation for the top gap and use it everywhere else
    let top = p.top_gap();
    let pivot = closing.vanish.coeff(top);
    let substitution = (!pivot.is_zero()).then(|| {
        let mut rest = closing.vanish.clone();
        rest.add_term(top, -pivot.clone());
        rest.scale(&(-pivot.recip()))
    });
    let mut pivot_kept = false;
    for (rel, form, tag) in raw {
        let is_pivot = !pivot_kept && rel == Relation::Equal && form == closing.vanish;
        if is_pivot {
            pivot_kept = true;
            sys.add(rel, form, tag);
            continue;
        }
        let form = match &substitution {
            Some(v) => form.substitute(top, v),
            None => form,
        };
        if form.is_constant() {
            let c = form.constant_term();
            let holds = match rel {
                Relation::Equal => c == &q(0),
                Relation::Strict => c > &q(0),
                Relation::Weak => c >= &q(0),
            };
            if holds {
                continue;
            }
        }
        sys.add(rel, form, tag);
    }
    for param in p.fixed.keys() {
        sys.declare(*param);
    }
    sys.dedup();
    Ok((sys, intervals))
}

/// Fixed sets on one level must have disjoint images in the reduced space.
fn disjointness(p: &Profile, walk: &Walk) -> Result<Vec<(Relation, Affine, Provenance)>, CrossingError> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < p.walls.len() {
        let mut end = start + 1;
        while end < p.walls.len() && p.walls[end].same_level {
            end += 1;
        }
        let group = &walk.walls[start..end];
        let has_point = group.iter().any(|w| w.kind.is_point());
        let mut surfaces: Vec<(usize, SpaceKind, IntClass)> = Vec::new();
        for w in group {
            let Some(eta) = &w.dual_class else { continue };
            let site = format!("wall {}", w.index);
            let (space, eta) = if has_point && w.space_below == SpaceKind::ProjectivePlane {
                (SpaceKind::BLOWN_UP_PLANE, blowdown_pullback(eta).map_err(CrossingError::lattice(&site))?)
            } else {
                (w.space_below, eta.clone())
            };
            if has_point && space == SpaceKind::BLOWN_UP_PLANE {
                let meet = pair(space, &eta, &IntClass::xy(0, 1)).map_err(CrossingError::lattice(&site))?;
                if meet != 0 {
                    out.push((
                        Relation::Equal,
                        Affine::int(meet),
                        Provenance::new(
                            Rule::Disjointness,
                            format!("{site} meets the exceptional sphere of a point on its level ({meet})"),
                        ),
                    ));
                }
            }
            surfaces.push((w.index, space, eta));
        }
        for (a, (ia, sa, ea)) in surfaces.iter().enumerate() {
            for (ib, _, eb) in &surfaces[a + 1..] {
                let meet = pair(*sa, ea, eb).map_err(CrossingError::lattice(format!("wall {ia}")))?;
                if meet != 0 {
                    out.push((
                        Relation::Equal,
                        Affine::int(meet),
                        Provenance::new(
                            Rule::Disjointness,
                            format!("walls {ia} and {ib} lie on one level but their classes meet ({meet})"),
                        ),
                    ));
                }
            }
        }
        start = end;
    }
    Ok(out)
}

/// Runs the whole profile.
pub fn run_profile(p: &Profile) -> Result<ProfileReport, CrossingError> {
    validate(p)?;
    let etas = solve_dual_classes(p)?;
    let walk = walk(p, &etas)?;
    let top = walk.states.last().expect("at least one interval");

    let shapes = candidate_shapes(p, top.space);
    if shapes.is_empty() {
        return Err(CrossingError::TwistUnavailable(p.twist.unwrap_or(Twist::Twisted)));
    }
    let mut options = Vec::new();
    for shape in &shapes {
        let closing = close_max(p, top, *shape)?;
        let (sys, intervals) = assemble(p, &walk, *shape, &closing)?;
        options.push((*shape, closing, sys, intervals));
    }
    let passing: Vec<usize> = (0..options.len()).filter(|&i| options[i].1.euler_ok).collect();
    let chosen = match passing.as_slice() {
        [] => 0,
        [only] => *only,
        several => several
            .iter()
            .copied()
            .find(|&i| eliminate(&options[i].2).is_feasible())
            .unwrap_or(several[0]),
    };
    let (shape, closing, constraints, intervals) = options.swap_remove(chosen);

    let derived = if p.has_isolated_point() {
        Twist::NotApplicable
    } else if shape == MaxShape::Y {
        Twist::Twisted
    } else {
        Twist::Untwisted
    };
    if let Some(asserted) = p.twist {
        if asserted != derived {
            return Err(CrossingError::TwistMismatch { asserted, derived });
        }
    }
    if let (Some(declared), Some(derived)) = (p.max.normal_chern, closing.b_max) {
        if declared != derived {
            return Err(CrossingError::NormalChernMismatch { declared, derived });
        }
    }

    Ok(ProfileReport {
        intervals,
        walls: walk.walls,
        b_min: p.min.normal_chern,
        b_max: closing.b_max,
        twist: derived,
        max_shape: shape,
        euler_closes: closing.euler_ok,
        constraints,
    })
}
