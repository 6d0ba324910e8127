//! Unknown dual classes from telescoping and adjunction.
//!
//! The Euler class is walked from the bottom with the coefficients of
//! every unknown dual class as integer unknowns. The index-4 points and
//! the closing condition at the maximum give linear equations; each
//! solved class must also satisfy the adjunction equality
//! `eta² + K·eta = 2 g - 2` for the genus of its surface, which is used to
//! branch when the linear equations leave freedom.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::affine::{q, Q};
use crate::lattice::{canonical_class, gram_row, IntClass, SpaceKind};

use super::run::MaxShape;
use super::{init_min, validate, ComponentKind, CrossingError, Profile, Twist};

/// `sum(coeffs[i] * unknown_i) + constant`.
#[derive(Clone, Debug, PartialEq)]
struct Lin {
    coeffs: Vec<Q>,
    constant: Q,
}

impl Lin {
    fn constant(n: usize, c: i64) -> Self {
        Lin {
            coeffs: vec![Q::zero(); n],
            constant: q(c),
        }
    }

    fn unknown(n: usize, i: usize) -> Self {
        let mut l = Lin::constant(n, 0);
        l.coeffs[i] = Q::one();
        l
    }

    fn add(&self, o: &Lin) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &o.constant,
        }
    }

    fn sub(&self, o: &Lin) -> Lin {
        self.add(&o.scale(&-Q::one()))
    }

    fn scale(&self, s: &Q) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
            constant: &self.constant * s,
        }
    }

    fn plus(&self, c: i64) -> Lin {
        let mut l = self.clone();
        l.constant += q(c);
        l
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

struct Unknown {
    wall: usize,
    space: SpaceKind,
    genus: u32,
    first: usize,
}

/// Closing shapes compatible with the profile and its asserted twist.
pub(crate) fn candidate_shapes(p: &Profile, top: SpaceKind) -> Vec<MaxShape> {
    match p.max.kind {
        ComponentKind::Point => vec![MaxShape::Isolated],
        ComponentKind::Surface { .. } => {
            let y_possible = top == (SpaceKind::TrivialRuled { genus: 0 }) && !p.has_isolated_point();
            let mut out = Vec::new();
            if p.twist != Some(Twist::Twisted) {
                out.push(MaxShape::X);
            }
            if y_possible && p.twist != Some(Twist::Untwisted) && p.twist != Some(Twist::NotApplicable) {
                out.push(MaxShape::Y);
            }
            out
        }
    }
}

/// Fills in every missing dual class.
///
/// Errors with [`CrossingError::NoIntegerSolution`] if the data admit no
/// integral classes and [`CrossingError::Underdetermined`] if they admit
/// several (for instance when the twist is not asserted and both closing
/// shapes are possible).
pub fn solve_dual_classes(p: &Profile) -> Result<Vec<Option<IntClass>>, CrossingError> {
    let spaces = validate(p)?;
    let given: Vec<Option<IntClass>> = p.walls.iter().map(|w| w.dual_class.clone()).collect();
    let mut unknowns = Vec::new();
    let mut n = 0;
    for (i, w) in p.walls.iter().enumerate() {
        if let (ComponentKind::Surface { genus }, None) = (w.kind, &w.dual_class) {
            unknowns.push(Unknown {
                wall: i,
                space: spaces[i],
                genus,
                first: n,
            });
            n += spaces[i].rank();
        }
    }
    if unknowns.is_empty() {
        return Ok(given);
    }

    let start = init_min(&p.min)?;
    let mut euler: Vec<Lin> = start.euler.0.iter().map(|&c| Lin::constant(n, c)).collect();
    let mut equations = Vec::new();
    for (i, w) in p.walls.iter().enumerate() {
        match (w.index, w.kind) {
            (2, ComponentKind::Surface { .. }) => match &w.dual_class {
                Some(eta) => {
                    euler = euler.iter().zip(&eta.0).map(|(e, &c)| e.plus(c)).collect();
                }
                None => {
                    let u = unknowns.iter().find(|u| u.wall == i).expect("registered");
                    euler = euler
                        .iter()
                        .enumerate()
                        .map(|(j, e)| e.add(&Lin::unknown(n, u.first + j)))
                        .collect();
                }
            },
            (2, ComponentKind::Point) => {
                let l = euler[0].clone();
                euler = vec![l.clone(), l.plus(1)];
            }
            (4, ComponentKind::Point) => {
                let eq = euler[0].sub(&euler[1].plus(1));
                if eq.is_constant() && !eq.constant.is_zero() {
                    return Err(CrossingError::InconsistentAtIndex4 {
                        site: w.describe(i),
                        euler: format!("{}*x + {}*y (before solving)", euler[0].constant, euler[1].constant),
                    });
                }
                equations.push(eq);
                euler = vec![euler[0].clone()];
            }
            _ => unreachable!("validated"),
        }
    }

    let top = *spaces.last().expect("at least the first interval");
    let mut solutions: BTreeSet<Vec<i64>> = BTreeSet::new();
    let shapes = candidate_shapes(p, top);
    for shape in shapes {
        let mut eqs = equations.clone();
        match shape {
            MaxShape::Isolated => {
                if top != SpaceKind::ProjectivePlane {
                    return Err(CrossingError::IsolatedMaxOverRuled(top));
                }
                eqs.push(euler[0].plus(-1));
            }
            MaxShape::X | MaxShape::Y => {
                if !top.is_ruled() {
                    return Err(CrossingError::SurfaceMaxOverPlane(top));
                }
                let (closing, other) = if shape == MaxShape::X { (1, 0) } else { (0, 1) };
                eqs.push(euler[closing].plus(-1));
                if let Some(b) = p.max.normal_chern {
                    // b = -2 * e_other (+1 on the nontrivial bundle)
                    let odd = matches!(top, SpaceKind::NontrivialRuled { .. }) as i64;
                    eqs.push(euler[other].scale(&q(-2)).plus(odd - b));
                }
            }
        }
        for s in solve_system(eqs, n, &unknowns)? {
            solutions.insert(s);
        }
    }
    match solutions.len() {
        0 => Err(CrossingError::NoIntegerSolution),
        1 => {
            let sol = solutions.into_iter().next().expect("one");
            let mut out = given;
            for u in &unknowns {
                out[u.wall] = Some(IntClass(sol[u.first..u.first + u.space.rank()].to_vec()));
            }
            Ok(out)
        }
        k => Err(CrossingError::Underdetermined(format!("{k} integral solutions"))),
    }
}

/// Reduced row echelon form; `None` if inconsistent. Returns the rows and
/// the pivot column of each.
fn rref(mut rows: Vec<Lin>, n: usize) -> Option<(Vec<Lin>, Vec<usize>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..rows.len()).find(|&i| !rows[i].coeffs[col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r].coeffs[col].recip();
        rows[r] = rows[r].scale(&inv);
        for i in 0..rows.len() {
            if i != r && !rows[i].coeffs[col].is_zero() {
                let f = rows[i].coeffs[col].clone();
                rows[i] = rows[i].sub(&rows[r].scale(&f));
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row.constant.is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some((rows, pivots))
}

/// Every unknown as `constant + sum(coeff * free_j)`, over the free columns.
fn parametrize(rows: &[Lin], pivots: &[usize], n: usize) -> (Vec<usize>, Vec<(Q, Vec<Q>)>) {
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut exprs = Vec::with_capacity(n);
    for c in 0..n {
        if let Some(k) = pivots.iter().position(|&p| p == c) {
            let row = &rows[k];
            exprs.push((-row.constant.clone(), free.iter().map(|&f| -row.coeffs[f].clone()).collect()));
        } else {
            exprs.push((Q::zero(), free.iter().map(|&f| if f == c { Q::one() } else { Q::zero() }).collect()));
        }
    }
    (free, exprs)
}

fn solve_system(eqs: Vec<Lin>, n: usize, unknowns: &[Unknown]) -> Result<Vec<Vec<i64>>, CrossingError> {
    let Some((rows, pivots)) = rref(eqs.clone(), n) else {
        return Ok(Vec::new());
    };
    let (free, exprs) = parametrize(&rows, &pivots, n);
    if free.is_empty() {
        let mut values = Vec::with_capacity(n);
        for (c, _) in &exprs {
            if !c.is_integer() {
                return Ok(Vec::new());
            }
            match c.to_integer().to_i64() {
                Some(v) => values.push(v),
                None => return Ok(Vec::new()),
            }
        }
        let ok = unknowns.iter().all(|u| {
            let eta = IntClass(values[u.first..u.first + u.space.rank()].to_vec());
            crate::lattice::adjunction_value(u.space, &eta) == Ok(2 * u.genus as i64 - 2)
        });
        return Ok(if ok { vec![values] } else { Vec::new() });
    }
    for u in unknowns {
        let rank = u.space.rank();
        let coords = &exprs[u.first..u.first + rank];
        let depends: Vec<usize> = (0..free.len())
            .filter(|&j| coords.iter().any(|(_, v)| !v[j].is_zero()))
            .collect();
        if depends.len() != 1 {
            continue;
        }
        let j = depends[0];
        let p: Vec<Q> = coords.iter().map(|(c, _)| c.clone()).collect();
        let d: Vec<Q> = coords.iter().map(|(_, v)| v[j].clone()).collect();
        // adjunction along the line p + s d
        let k = canonical_class(u.space);
        let mut a2 = Q::zero();
        let mut a1 = Q::zero();
        let mut a0 = q(2 - 2 * u.genus as i64);
        for (i, (pi, di)) in p.iter().zip(&d).enumerate() {
            let row = gram_row(u.space, i);
            for (jj, g) in row.iter().enumerate() {
                let g = q(*g);
                a2 += di * &d[jj] * &g;
                a1 += (pi * &d[jj] + di * &p[jj]) * &g;
                a0 += pi * &p[jj] * &g;
                a1 += q(k.0[i]) * &d[jj] * &g;
                a0 += q(k.0[i]) * &p[jj] * &g;
            }
        }
        let Some(roots) = rational_roots(&a2, &a1, &a0) else {
            continue;
        };
        let mut out = Vec::new();
        for r in roots {
            let mut extra = eqs.clone();
            let mut pin = Lin::unknown(n, free[j]);
            pin.constant = -r;
            extra.push(pin);
            out.extend(solve_system(extra, n, unknowns)?);
        }
        return Ok(out);
    }
    Err(CrossingError::Underdetermined(format!(
        "{} free coefficient(s) after telescoping and adjunction",
        free.len()
    )))
}

/// Rational roots of `a s² + b s + c`; `None` if the polynomial vanishes
/// identically.
fn rational_roots(a: &Q, b: &Q, c: &Q) -> Option<Vec<Q>> {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() { None } else { Some(Vec::new()) };
        }
        return Some(vec![-c / b]);
    }
    let disc = b * b - q(4) * a * c;
    if disc.is_negative() {
        return Some(Vec::new());
    }
    let Some(root) = rational_sqrt(&disc) else {
        return Some(Vec::new());
    };
    let two_a = q(2) * a;
    let mut out = vec![(-b + &root) / &two_a, (-b - &root) / &two_a];
    out.dedup();
    Some(out)
}

fn rational_sqrt(v: &Q) -> Option<Q> {
    let square = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    match (square(v.numer()), square(v.denom())) {
        (Some(n), Some(d)) => Some(Q::new(n, d)),
        _ => None,
    }
}
