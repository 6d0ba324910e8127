//! Templates for the known types of fixed point data, with the outcomes a
//! run should reproduce.
//!
//! Type ids: `1`, `2`, `3`, `3alt` (type 3 with the index-4 point crossed
//! first, which needs `b_min = 1`), `4`, `5`, `6a`, `6b`. Each expected
//! field records whether it is stated for the type in the literature
//! ([`Source::Stated`]) or computed by hand from the same wall-crossing
//! rules ([`Source::Derived`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::affine::{Affine, Param};
use crate::crossing::{flip_profile, CrossingError, Extremum, Profile, ProfileReport, Twist, Wall};
use crate::feasibility::{implies, ConstraintSystem, FeasibilityResult, Provenance, Rule};
use crate::lattice::IntClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TypeId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "3alt")]
    ThreeAlt,
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "5")]
    Five,
    #[serde(rename = "6a")]
    SixA,
    #[serde(rename = "6b")]
    SixB,
}

impl TypeId {
    pub const ALL: [TypeId; 8] = [
        TypeId::One,
        TypeId::Two,
        TypeId::Three,
        TypeId::ThreeAlt,
        TypeId::Four,
        TypeId::Five,
        TypeId::SixA,
        TypeId::SixB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TypeId::One => "1",
            TypeId::Two => "2",
            TypeId::Three => "3",
            TypeId::ThreeAlt => "3alt",
            TypeId::Four => "4",
            TypeId::Five => "5",
            TypeId::SixA => "6a",
            TypeId::SixB => "6b",
        }
    }

    fn walls(self) -> usize {
        match self {
            TypeId::One | TypeId::SixA | TypeId::SixB => 1,
            TypeId::Four => 0,
            _ => 2,
        }
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TypeId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TypeId::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| CatalogError::UnknownType(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown type id `{0}` (expected one of 1, 2, 3, 3alt, 4, 5, 6a, 6b)")]
    UnknownType(String),
    #[error("parameter {name} = {value} outside the range [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: i64, lo: i64, hi: i64 },
    #[error("type {id} does not take parameter {name}")]
    UnusedParameter { id: TypeId, name: &'static str },
    #[error("give either k or n for type 6a, not both")]
    ConflictingParameters,
    #[error("type {0} has no two walls to put on one level")]
    NoSameLevelVariant(TypeId),
    #[error(transparent)]
    Crossing(#[from] CrossingError),
}

/// Integer parameters of a template. `n` is `b_min` and is accepted only
/// by `6a`, where `k` means `n = 2k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub k: Option<i64>,
    pub n: Option<i64>,
    pub g: Option<u32>,
    pub g1: Option<u32>,
}

impl Params {
    pub fn k(k: i64) -> Self {
        Params {
            k: Some(k),
            ..Params::default()
        }
    }

    pub fn six_a(k: i64, g: u32, g1: u32) -> Self {
        Params {
            k: Some(k),
            n: None,
            g: Some(g),
            g1: Some(g1),
        }
    }
}

/// Declared parameter ranges; `k` also bounds `n / 2` for `6a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ranges {
    pub k: (i64, i64),
    pub g: (u32, u32),
    pub g1: (u32, u32),
}

impl Default for Ranges {
    fn default() -> Self {
        Ranges {
            k: (-3, 3),
            g: (0, 4),
            g1: (0, 4),
        }
    }
}

fn in_range(name: &'static str, value: i64, (lo, hi): (i64, i64)) -> Result<(), CatalogError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(CatalogError::OutOfRange { name, value, lo, hi })
    }
}

/// Concrete values used by a template after defaults (`0`) are applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Resolved {
    k: i64,
    n: i64,
    g: u32,
    g1: u32,
}

fn resolve(id: TypeId, p: &Params, r: &Ranges) -> Result<Resolved, CatalogError> {
    let takes_k = matches!(id, TypeId::Three | TypeId::SixA | TypeId::SixB);
    let takes_genus = id == TypeId::SixA;
    if !takes_k && p.k.is_some() {
        return Err(CatalogError::UnusedParameter { id, name: "k" });
    }
    if id != TypeId::SixA && p.n.is_some() {
        return Err(CatalogError::UnusedParameter { id, name: "n" });
    }
    if !takes_genus && p.g.is_some() {
        return Err(CatalogError::UnusedParameter { id, name: "g" });
    }
    if !takes_genus && p.g1.is_some() {
        return Err(CatalogError::UnusedParameter { id, name: "g1" });
    }
    let n = match (p.k, p.n) {
        (Some(_), Some(_)) => return Err(CatalogError::ConflictingParameters),
        (_, Some(n)) => {
            in_range("n", n, (2 * r.k.0, 2 * r.k.1 + 1))?;
            n
        }
        (k, None) => {
            let k = k.unwrap_or(0);
            in_range("k", k, r.k)?;
            2 * k
        }
    };
    let g = p.g.unwrap_or(0);
    let g1 = p.g1.unwrap_or(0);
    in_range("g", g as i64, (r.g.0 as i64, r.g.1 as i64))?;
    in_range("g1", g1 as i64, (r.g1.0 as i64, r.g1.1 as i64))?;
    Ok(Resolved {
        k: n.div_euclid(2),
        n,
        g,
        g1,
    })
}

/// Optional modifications of a template.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Variant {
    /// Read the action upside down.
    pub flip: bool,
    /// Put the two interior walls on one level.
    pub same_level: bool,
}

/// The profile of a type.
pub fn instantiate(id: TypeId, params: &Params, ranges: &Ranges) -> Result<Profile, CatalogError> {
    let r = resolve(id, params, ranges)?;
    let sphere = |eta: Option<IntClass>| Wall::surface(0, eta);
    let p = match id {
        TypeId::One => Profile::new(Extremum::point(), vec![sphere(None)], Extremum::point()),
        TypeId::Two => Profile::new(Extremum::point(), vec![sphere(None), sphere(None)], Extremum::point()),
        TypeId::Three => Profile::new(
            Extremum::surface(0, Some(2 * r.k + 1)),
            vec![sphere(None), Wall::point(4)],
            Extremum::point(),
        ),
        TypeId::ThreeAlt => Profile::new(
            Extremum::surface(0, Some(1)),
            vec![Wall::point(4), sphere(None)],
            Extremum::point(),
        ),
        TypeId::Four => Profile::new(Extremum::surface(0, Some(2)), vec![], Extremum::surface(0, None)),
        TypeId::Five => Profile::new(
            Extremum::surface(0, Some(1)),
            vec![Wall::point(4), Wall::point(2)],
            Extremum::surface(0, None),
        ),
        TypeId::SixA => {
            let h = 1 + r.g1 as i64 - 2 * r.g as i64;
            let odd = r.n.rem_euclid(2);
            Profile::new(
                Extremum::surface(r.g, Some(r.n)),
                vec![Wall::surface(r.g1, Some(IntClass::xy(h + odd, 2)))],
                Extremum::surface(r.g, None),
            )
            .with_twist(Twist::Untwisted)
        }
        TypeId::SixB => Profile::new(
            Extremum::surface(0, Some(r.n)),
            vec![sphere(Some(IntClass::xy(1 - r.k, 1)))],
            Extremum::surface(0, None),
        )
        .with_twist(Twist::Twisted),
    };
    Ok(p)
}

/// The profile of a type with a variant applied.
pub fn instantiate_variant(
    id: TypeId,
    params: &Params,
    ranges: &Ranges,
    variant: Variant,
) -> Result<Profile, CatalogError> {
    let mut p = instantiate(id, params, ranges)?;
    if variant.same_level {
        if id.walls() != 2 {
            return Err(CatalogError::NoSameLevelVariant(id));
        }
        p.walls[1].same_level = true;
    }
    if variant.flip {
        p = flip_profile(&p)?;
    }
    Ok(p)
}

/// Every instance of every type over the given ranges.
pub fn instances(ranges: &Ranges) -> Vec<(TypeId, Params)> {
    let mut out = Vec::new();
    for id in TypeId::ALL {
        match id {
            TypeId::Three | TypeId::SixB => {
                for k in ranges.k.0..=ranges.k.1 {
                    out.push((id, Params::k(k)));
                }
            }
            TypeId::SixA => {
                for k in ranges.k.0..=ranges.k.1 {
                    for g in ranges.g.0..=ranges.g.1 {
                        for g1 in ranges.g1.0..=ranges.g1.1 {
                            out.push((id, Params::six_a(k, g, g1)));
                        }
                    }
                }
            }
            _ => out.push((id, Params::default())),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Stated,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum Expectation {
    /// Dual class of every wall (`None` for points).
    DualClasses { classes: Vec<Option<IntClass>> },
    /// `(positive, negative)` normal Chern numbers per wall.
    NormalCherns { values: Vec<Option<(i64, i64)>> },
    /// The equalities are exactly these, up to scaling.
    EqualitiesExactly { forms: Vec<Affine> },
    /// Each form vanishes on the solution set of the equalities.
    EqualitiesImply { forms: Vec<Affine> },
    /// Each form appears, up to positive scaling, as a strict inequality.
    StrictPresent { forms: Vec<Affine> },
    Feasible { feasible: bool },
    Twist { twist: Twist },
    BMax { b_max: Option<i64> },
    IntervalEuler { interval: usize, class: IntClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    #[serde(flatten)]
    pub expectation: Expectation,
    pub source: Source,
}

fn stated(e: Expectation) -> Expected {
    Expected {
        expectation: e,
        source: Source::Stated,
    }
}

fn derived(e: Expectation) -> Expected {
    Expected {
        expectation: e,
        source: Source::Derived,
    }
}

fn v(p: Param) -> Affine {
    Affine::var(p)
}

const A0: Param = Param::MinSize;
const AB: Param = Param::MaxSize;
const T0: Param = Param::Gap(0);
const T1: Param = Param::Gap(1);
const T2: Param = Param::Gap(2);

/// What a run of the plain template should report.
pub fn expected_outcome(id: TypeId, params: &Params, ranges: &Ranges) -> Result<Vec<Expected>, CatalogError> {
    let r = resolve(id, params, ranges)?;
    let k = r.k;
    let out = match id {
        TypeId::One => vec![
            stated(Expectation::DualClasses {
                classes: vec![Some(IntClass::u(2))],
            }),
            stated(Expectation::NormalCherns { values: vec![Some((2, 2))] }),
            stated(Expectation::EqualitiesExactly { forms: vec![v(T0) - v(T1)] }),
            stated(Expectation::Feasible { feasible: true }),
            derived(Expectation::Twist {
                twist: Twist::NotApplicable,
            }),
        ],
        TypeId::Two => vec![
            derived(Expectation::DualClasses {
                classes: vec![Some(IntClass::u(1)), Some(IntClass::u(1))],
            }),
            stated(Expectation::NormalCherns {
                values: vec![Some((0, 1)), Some((1, 0))],
            }),
            stated(Expectation::Feasible { feasible: true }),
        ],
        TypeId::Three => {
            let mut e = vec![
                derived(Expectation::DualClasses {
                    classes: vec![Some(IntClass::xy(1 - k, 1)), None],
                }),
                stated(Expectation::EqualitiesExactly {
                    forms: vec![v(T0) - v(T2), v(A0) - v(T1) - v(T0) * (k + 1)],
                }),
                stated(Expectation::Feasible { feasible: true }),
                stated(Expectation::IntervalEuler {
                    interval: 2,
                    class: IntClass::u(1),
                }),
            ];
            if k > 1 {
                e.push(stated(Expectation::StrictPresent {
                    forms: vec![v(A0) - v(T0) * (2 * k)],
                }));
            }
            e
        }
        TypeId::ThreeAlt => vec![
            derived(Expectation::DualClasses {
                classes: vec![None, Some(IntClass::u(1))],
            }),
            derived(Expectation::EqualitiesImply {
                forms: vec![v(A0) - v(T0), v(T0) - v(T2)],
            }),
            derived(Expectation::Feasible { feasible: true }),
        ],
        TypeId::Four => vec![
            derived(Expectation::EqualitiesImply {
                forms: vec![v(A0) - v(T0), v(AB) - v(T0)],
            }),
            derived(Expectation::Twist { twist: Twist::Twisted }),
            stated(Expectation::BMax { b_max: Some(2) }),
            stated(Expectation::Feasible { feasible: true }),
        ],
        TypeId::Five => vec![
            stated(Expectation::EqualitiesImply {
                forms: vec![v(A0) - v(T0), v(AB) - v(T2), v(T0) - v(T2)],
            }),
            stated(Expectation::IntervalEuler {
                interval: 1,
                class: IntClass::u(0),
            }),
            derived(Expectation::BMax { b_max: Some(1) }),
            stated(Expectation::Feasible { feasible: true }),
        ],
        TypeId::SixA => {
            let h = 1 + r.g1 as i64 - 2 * r.g as i64;
            let mut e = vec![
                stated(Expectation::Feasible { feasible: h > 0 }),
                derived(Expectation::Twist { twist: Twist::Untwisted }),
            ];
            if h > 0 && r.n % 2 == 0 {
                // alpha0 - k t0 - k t - h t > 0 at t = 0 and t = t0
                e.push(stated(Expectation::StrictPresent {
                    forms: vec![v(A0) - v(T0) * k, v(A0) - v(T0) * (2 * k + h)],
                }));
                e.push(stated(Expectation::EqualitiesImply { forms: vec![v(T0) - v(T1)] }));
                e.push(derived(Expectation::BMax {
                    b_max: Some(-2 * (k + h)),
                }));
            }
            e
        }
        TypeId::SixB => {
            let mut e = vec![
                stated(Expectation::EqualitiesImply {
                    forms: vec![v(T1) - v(A0) + v(T0) * k],
                }),
                stated(Expectation::Twist { twist: Twist::Twisted }),
                stated(Expectation::BMax { b_max: Some(0) }),
                stated(Expectation::Feasible { feasible: true }),
            ];
            if k > 1 {
                e.push(stated(Expectation::StrictPresent {
                    forms: vec![v(A0) - v(T0) * (2 * k - 1)],
                }));
            }
            e
        }
    };
    Ok(out)
}

/// Expectations for a variant: the plain ones, or for flips and shared
/// levels only the feasibility verdict.
pub fn expected_variant_outcome(
    id: TypeId,
    params: &Params,
    ranges: &Ranges,
    variant: Variant,
) -> Result<Vec<Expected>, CatalogError> {
    let base = expected_outcome(id, params, ranges)?;
    if !variant.same_level && !variant.flip {
        return Ok(base);
    }
    let base_feasible = base.iter().find_map(|e| match e.expectation {
        Expectation::Feasible { feasible } => Some((feasible, e.source)),
        _ => None,
    });
    let mut out = Vec::new();
    if variant.same_level {
        let k = resolve(id, params, ranges)?.k;
        out.push(match id {
            TypeId::Two => stated(Expectation::Feasible { feasible: false }),
            TypeId::Three => derived(Expectation::Feasible { feasible: k == 0 }),
            _ => derived(Expectation::Feasible { feasible: true }),
        });
    } else if let Some((feasible, source)) = base_feasible {
        out.push(Expected {
            expectation: Expectation::Feasible { feasible },
            source,
        });
    }
    Ok(out)
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Stated => "stated",
            Source::Derived => "derived",
        })
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ")
}

fn join_opt<T: fmt::Debug>(items: &[Option<T>]) -> String {
    items
        .iter()
        .map(|i| i.as_ref().map_or("-".to_string(), |v| format!("{v:?}")))
        .collect::<Vec<_>>()
        .join("; ")
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::DualClasses { classes } => {
                let c: Vec<String> = classes.iter().map(|c| c.as_ref().map_or("-".into(), |c| c.to_string())).collect();
                write!(f, "dual classes [{}]", c.join("; "))
            }
            Expectation::NormalCherns { values } => write!(f, "normal Chern numbers [{}]", join_opt(values)),
            Expectation::EqualitiesExactly { forms } => write!(f, "equalities exactly [{}]", join(forms)),
            Expectation::EqualitiesImply { forms } => write!(f, "equalities imply [{}]", join(forms)),
            Expectation::StrictPresent { forms } => write!(f, "strict inequalities include [{}]", join(forms)),
            Expectation::Feasible { feasible } => write!(f, "feasible = {feasible}"),
            Expectation::Twist { twist } => write!(f, "twist {twist}"),
            Expectation::BMax { b_max } => match b_max {
                Some(b) => write!(f, "b_max = {b}"),
                None => f.write_str("b_max undefined"),
            },
            Expectation::IntervalEuler { interval, class } => write!(f, "Euler class {class} on interval {interval}"),
        }
    }
}

/// Result of comparing one expectation with a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub expected: Expected,
    pub passed: bool,
    pub detail: String,
}

fn equality_only(sys: &ConstraintSystem) -> ConstraintSystem {
    let mut out = ConstraintSystem::new();
    for c in &sys.equalities {
        out.add_eq(c.form.clone(), c.tag.clone());
    }
    out
}

/// Compares a run against expectations.
pub fn check(report: &ProfileReport, result: &FeasibilityResult, expected: &[Expected]) -> Vec<CheckOutcome> {
    let sys = &report.constraints;
    expected
        .iter()
        .map(|e| {
            let (passed, detail) = match &e.expectation {
                Expectation::DualClasses { classes } => {
                    let got: Vec<Option<IntClass>> = report.walls.iter().map(|w| w.dual_class.clone()).collect();
                    (got == *classes, format!(
                        "dual classes [{}]",
                        got.iter().map(|c| c.as_ref().map_or("-".into(), |c| c.to_string())).collect::<Vec<_>>().join("; ")
                    ))
                }
                Expectation::NormalCherns { values } => {
                    let got: Vec<Option<(i64, i64)>> = report.walls.iter().map(|w| w.normal_cherns).collect();
                    (got == *values, format!("normal Chern numbers [{}]", join_opt(&got)))
                }
                Expectation::EqualitiesExactly { forms } => {
                    let mut want: Vec<String> = forms.iter().map(|f| f.monic().to_string()).collect();
                    let mut got: Vec<String> = sys.equalities.iter().map(|c| c.form.monic().to_string()).collect();
                    want.sort();
                    got.sort();
                    (want == got, format!("equalities {}", got.join("; ")))
                }
                Expectation::EqualitiesImply { forms } => {
                    let eqs = equality_only(sys);
                    let mut target = ConstraintSystem::new();
                    for f in forms {
                        target.add_eq(f.clone(), Provenance::new(Rule::Query, "expected equality"));
                    }
                    (implies(&eqs, &target), format!("equalities {}", eqs.equality_texts().join("; ")))
                }
                Expectation::StrictPresent { forms } => {
                    let have: Vec<String> = sys.strict.iter().map(|c| c.form.normalized().to_string()).collect();
                    let missing: Vec<String> = forms
                        .iter()
                        .filter(|f| !have.contains(&f.normalized().to_string()))
                        .map(|f| f.to_string())
                        .collect();
                    (missing.is_empty(), format!("missing strict inequalities: [{}]", missing.join("; ")))
                }
                Expectation::Feasible { feasible } => (
                    result.is_feasible() == *feasible,
                    format!("feasible = {}", result.is_feasible()),
                ),
                Expectation::Twist { twist } => (report.twist == *twist, format!("twist {}", report.twist)),
                Expectation::BMax { b_max } => (report.b_max == *b_max, format!("b_max {:?}", report.b_max)),
                Expectation::IntervalEuler { interval, class } => {
                    let got = report.intervals.get(*interval).map(|i| i.euler.clone());
                    (got.as_ref() == Some(class), format!("Euler class {}", got.map_or("-".into(), |c| c.to_string())))
                }
            };
            CheckOutcome {
                expected: e.clone(),
                passed,
                detail,
            }
        })
        .collect()
}

/// Human-readable form of the parameters that apply to a type.
pub fn describe_params(id: TypeId, p: &Params) -> String {
    let mut parts = BTreeMap::new();
    if let Some(k) = p.k {
        parts.insert("k", k.to_string());
    }
    if let Some(n) = p.n {
        parts.insert("n", n.to_string());
    }
    if let Some(g) = p.g {
        parts.insert("g", g.to_string());
    }
    if let Some(g1) = p.g1 {
        parts.insert("g1", g1.to_string());
    }
    let body: Vec<String> = parts.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    if body.is_empty() {
        format!("type {id}")
    } else {
        format!("type {id} ({})", body.join(", "))
    }
}
