//! Exact rational feasibility of linear systems with equalities, strict
//! and non-strict inequalities.
//!
//! [`eliminate`] runs Gaussian elimination on the equalities followed by
//! Fourier–Motzkin elimination on the inequalities, carrying for every
//! derived row its multipliers over the original constraints. A feasible
//! system yields a rational sample by back-substitution; an infeasible one
//! yields the multipliers of the contradictory row as a certificate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::affine::{fmt_q, q, Affine, Param, Q};

/// The kind of reasoning that produced a constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    GapPositive,
    SameLevel,
    SizePositive,
    ConeProjectivePlane,
    ConeTrivialRuled,
    ConeNontrivialRuled,
    Representability,
    BlowDownImage,
    ClosingIsolatedMax,
    ClosingSurfaceMax,
    EulerClosing,
    Disjointness,
    Normalization,
    FixedValue,
    Query,
}

impl Rule {
    pub fn key(self) -> &'static str {
        match self {
            Rule::GapPositive => "gap-positive",
            Rule::SameLevel => "same-level",
            Rule::SizePositive => "size-positive",
            Rule::ConeProjectivePlane => "cone-cp2",
            Rule::ConeTrivialRuled => "cone-trivial-ruled",
            Rule::ConeNontrivialRuled => "cone-nontrivial-ruled",
            Rule::Representability => "representability",
            Rule::BlowDownImage => "blow-down-image",
            Rule::ClosingIsolatedMax => "closing-isolated-max",
            Rule::ClosingSurfaceMax => "closing-surface-max",
            Rule::EulerClosing => "euler-closing",
            Rule::Disjointness => "disjointness",
            Rule::Normalization => "normalization",
            Rule::FixedValue => "fixed-value",
            Rule::Query => "query",
        }
    }

    /// One-line statement of the fact the rule encodes.
    pub fn explanation(self) -> &'static str {
        match self {
            Rule::GapPositive => "distinct critical levels are separated by a positive gap",
            Rule::SameLevel => "fixed sets declared on the same level have zero gap",
            Rule::SizePositive => "an extremal fixed surface has positive area",
            Rule::ConeProjectivePlane => "a class l*u on CP2 is symplectic (for the standard orientation) iff l > 0",
            Rule::ConeTrivialRuled => {
                "a class c*x + d*y on S2 x Sigma is symplectic and ruling-compatible iff d > 0 and c > 0"
            }
            Rule::ConeNontrivialRuled => {
                "a class c*x + d*y on the nontrivial bundle is symplectic and ruling-compatible iff d > 0 and c > d"
            }
            Rule::Representability => {
                "the dual class of a fixed surface must carry a connected symplectic representative of its genus"
            }
            Rule::BlowDownImage => "at an index-4 point the exceptional sphere collapses, so the form must vanish on it",
            Rule::ClosingIsolatedMax => "the reduced form shrinks to zero at an isolated maximum",
            Rule::ClosingSurfaceMax => "the reduced form collapses onto the maximal surface",
            Rule::EulerClosing => "the Euler class just below the maximum is fixed by the local model",
            Rule::Disjointness => "fixed sets on one level have disjoint images in the reduced space",
            Rule::Normalization => "the constraints are homogeneous, so one gap may be scaled to 1",
            Rule::FixedValue => "value fixed by the input document",
            Rule::Query => "auxiliary constraint of an implication check",
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.key())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Where a constraint came from: its rule and a human-readable site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Provenance {
    pub rule: Rule,
    pub site: String,
}

impl Provenance {
    pub fn new(rule: Rule, site: impl Into<String>) -> Self {
        Provenance {
            rule,
            site: site.into(),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.rule, self.site)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `form = 0`
    Equal,
    /// `form > 0`
    Strict,
    /// `form >= 0`
    Weak,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::Strict => ">",
            Relation::Weak => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub form: Affine,
    pub tag: Provenance,
}

impl Constraint {
    pub fn new(form: Affine, tag: Provenance) -> Self {
        Constraint { form, tag }
    }
}

/// A conjunction of `= 0`, `> 0` and `>= 0` conditions on affine forms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstraintSystem {
    pub variables: Vec<Param>,
    pub equalities: Vec<Constraint>,
    pub strict: Vec<Constraint>,
    pub weak: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("sample has {found} values but the system has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
}

impl ConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    fn note_vars(&mut self, form: &Affine) {
        for p in form.params() {
            if let Err(pos) = self.variables.binary_search(&p) {
                self.variables.insert(pos, p);
            }
        }
    }

    /// Declares a variable even if no constraint mentions it.
    pub fn declare(&mut self, p: Param) {
        self.note_vars(&Affine::var(p));
    }

    pub fn add(&mut self, rel: Relation, form: Affine, tag: Provenance) {
        self.note_vars(&form);
        let c = Constraint::new(form, tag);
        match rel {
            Relation::Equal => self.equalities.push(c),
            Relation::Strict => self.strict.push(c),
            Relation::Weak => self.weak.push(c),
        }
    }

    pub fn add_eq(&mut self, form: Affine, tag: Provenance) {
        self.add(Relation::Equal, form, tag);
    }

    pub fn add_strict(&mut self, form: Affine, tag: Provenance) {
        self.add(Relation::Strict, form, tag);
    }

    pub fn add_weak(&mut self, form: Affine, tag: Provenance) {
        self.add(Relation::Weak, form, tag);
    }

    pub fn len(&self) -> usize {
        self.equalities.len() + self.strict.len() + self.weak.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All constraints with their relation, equalities first.
    pub fn iter(&self) -> impl Iterator<Item = (Relation, &Constraint)> + '_ {
        self.equalities
            .iter()
            .map(|c| (Relation::Equal, c))
            .chain(self.strict.iter().map(|c| (Relation::Strict, c)))
            .chain(self.weak.iter().map(|c| (Relation::Weak, c)))
    }

    /// Drops repeated constraints (up to positive scaling, or any nonzero
    /// scaling for equalities) and weak inequalities implied by a strict one
    /// or by an equality. The first tag of each survivor is kept.
    pub fn dedup(&mut self) {
        let mut seen_eq = BTreeSet::new();
        self.equalities.retain(|c| seen_eq.insert(c.form.monic()));
        let mut seen_strict = BTreeSet::new();
        self.strict.retain(|c| seen_strict.insert(c.form.normalized()));
        let mut seen_weak = BTreeSet::new();
        self.weak.retain(|c| {
            let n = c.form.normalized();
            !seen_strict.contains(&n) && !seen_eq.contains(&c.form.monic()) && seen_weak.insert(n)
        });
    }

    /// Substitutes `p := value` in every constraint, removing `p` from the
    /// variable list when it no longer occurs.
    pub fn substitute(&mut self, p: Param, value: &Affine) {
        for list in [&mut self.equalities, &mut self.strict, &mut self.weak] {
            for c in list.iter_mut() {
                c.form = c.form.substitute(p, value);
            }
        }
        self.recompute_variables();
    }

    pub fn recompute_variables(&mut self) {
        let mut vars = BTreeSet::new();
        for (_, c) in self.iter() {
            vars.extend(c.form.params());
        }
        self.variables = vars.into_iter().collect();
    }

    /// Renames parameters everywhere.
    pub fn rename(&self, map: &BTreeMap<Param, Param>) -> ConstraintSystem {
        let mut out = ConstraintSystem::new();
        for (rel, c) in self.iter() {
            out.add(rel, c.form.rename(map), c.tag.clone());
        }
        for v in &self.variables {
            out.declare(*map.get(v).unwrap_or(v));
        }
        out
    }

    /// Conjunction of two systems.
    pub fn and(&self, other: &ConstraintSystem) -> ConstraintSystem {
        let mut out = self.clone();
        for (rel, c) in other.iter() {
            out.add(rel, c.form.clone(), c.tag.clone());
        }
        for v in &other.variables {
            out.declare(*v);
        }
        out
    }

    /// Copy with the equality `p = value` appended.
    pub fn with_fixed(&self, p: Param, value: Q, rule: Rule) -> ConstraintSystem {
        let mut out = self.clone();
        out.add_eq(
            Affine::var(p) - Affine::constant(value.clone()),
            Provenance::new(rule, format!("{p} = {}", fmt_q(&value))),
        );
        out
    }

    /// The equalities' forms, rendered.
    pub fn equality_texts(&self) -> Vec<String> {
        self.equalities.iter().map(|c| c.form.to_string()).collect()
    }

    pub fn strict_texts(&self) -> Vec<String> {
        self.strict.iter().map(|c| c.form.to_string()).collect()
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (rel, c) in self.iter() {
            writeln!(f, "{} {} 0    {}", c.form, rel.symbol(), c.tag)?;
        }
        Ok(())
    }
}

/// A rational point, one value per system variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub variables: Vec<Param>,
    pub values: Vec<Q>,
}

impl Sample {
    pub fn as_map(&self) -> BTreeMap<Param, Q> {
        self.variables.iter().copied().zip(self.values.iter().cloned()).collect()
    }

    pub fn get(&self, p: Param) -> Option<&Q> {
        self.variables.iter().position(|v| *v == p).map(|i| &self.values[i])
    }
}

impl Serialize for Sample {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(Some(self.values.len()))?;
        for (p, v) in self.variables.iter().zip(&self.values) {
            m.serialize_entry(&p.to_string(), &fmt_q(v))?;
        }
        m.end()
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .variables
            .iter()
            .zip(&self.values)
            .map(|(p, v)| format!("{p} = {}", fmt_q(v)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Multipliers proving infeasibility: equalities take any sign, strict and
/// weak inequalities nonnegative ones. The combination is a constant `c`
/// with `c < 0`, or `c <= 0` while some strict multiplier is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub equalities: Vec<Q>,
    pub strict: Vec<Q>,
    pub weak: Vec<Q>,
}

impl Certificate {
    fn from_sparse(sys: &ConstraintSystem, mult: &BTreeMap<usize, Q>) -> Self {
        let ne = sys.equalities.len();
        let ns = sys.strict.len();
        let mut cert = Certificate {
            equalities: vec![Q::zero(); ne],
            strict: vec![Q::zero(); ns],
            weak: vec![Q::zero(); sys.weak.len()],
        };
        for (&i, v) in mult {
            if i < ne {
                cert.equalities[i] = v.clone();
            } else if i < ne + ns {
                cert.strict[i - ne] = v.clone();
            } else {
                cert.weak[i - ne - ns] = v.clone();
            }
        }
        cert
    }

    /// The combined affine form `sum(multiplier * form)`.
    pub fn combination(&self, sys: &ConstraintSystem) -> Affine {
        let mut acc = Affine::zero();
        for (m, c) in self.equalities.iter().zip(&sys.equalities) {
            acc += &c.form.scale(m);
        }
        for (m, c) in self.strict.iter().zip(&sys.strict) {
            acc += &c.form.scale(m);
        }
        for (m, c) in self.weak.iter().zip(&sys.weak) {
            acc += &c.form.scale(m);
        }
        acc
    }

    /// Constraints with a nonzero multiplier.
    pub fn support<'a>(&'a self, sys: &'a ConstraintSystem) -> Vec<(Relation, &'a Constraint, &'a Q)> {
        let mut out = Vec::new();
        for (m, c) in self.equalities.iter().zip(&sys.equalities) {
            if !m.is_zero() {
                out.push((Relation::Equal, c, m));
            }
        }
        for (m, c) in self.strict.iter().zip(&sys.strict) {
            if !m.is_zero() {
                out.push((Relation::Strict, c, m));
            }
        }
        for (m, c) in self.weak.iter().zip(&sys.weak) {
            if !m.is_zero() {
                out.push((Relation::Weak, c, m));
            }
        }
        out
    }

    /// Distinct rules among the supporting constraints.
    pub fn rules(&self, sys: &ConstraintSystem) -> Vec<Rule> {
        let set: BTreeSet<Rule> = self.support(sys).into_iter().map(|(_, c, _)| c.tag.rule).collect();
        set.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible { sample: Sample },
    Infeasible { certificate: Certificate },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }

    pub fn sample(&self) -> Option<&Sample> {
        match self {
            FeasibilityResult::Feasible { sample } => Some(sample),
            FeasibilityResult::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            FeasibilityResult::Infeasible { certificate } => Some(certificate),
            FeasibilityResult::Feasible { .. } => None,
        }
    }
}

/// Checks every constraint at `point` (ordered like `sys.variables`).
pub fn verify_sample(sys: &ConstraintSystem, point: &[Q]) -> Result<bool, FeasibilityError> {
    if point.len() != sys.variables.len() {
        return Err(FeasibilityError::DimensionMismatch {
            expected: sys.variables.len(),
            found: point.len(),
        });
    }
    let map: BTreeMap<Param, Q> = sys.variables.iter().copied().zip(point.iter().cloned()).collect();
    Ok(sys.iter().all(|(rel, c)| {
        let v = c
            .form
            .eval(&map)
            .expect("every mentioned parameter is a system variable");
        match rel {
            Relation::Equal => v.is_zero(),
            Relation::Strict => v.is_positive(),
            Relation::Weak => !v.is_negative(),
        }
    }))
}

/// Re-checks a certificate by exact arithmetic.
pub fn verify_certificate(sys: &ConstraintSystem, cert: &Certificate) -> bool {
    if cert.equalities.len() != sys.equalities.len()
        || cert.strict.len() != sys.strict.len()
        || cert.weak.len() != sys.weak.len()
    {
        return false;
    }
    if cert.strict.iter().chain(&cert.weak).any(|m| m.is_negative()) {
        return false;
    }
    let comb = cert.combination(sys);
    if !comb.is_constant() {
        return false;
    }
    let c = comb.constant_term();
    c.is_negative() || (!c.is_positive() && cert.strict.iter().any(|m| m.is_positive()))
}

#[derive(Clone, Debug)]
struct Row {
    form: Affine,
    strict: bool,
    mult: BTreeMap<usize, Q>,
}

impl Row {
    fn combine(&self, a: &Q, other: &Row, b: &Q) -> Row {
        let form = self.form.scale(a) + other.form.scale(b);
        let mut mult = BTreeMap::new();
        for (src, s) in [(&self.mult, a), (&other.mult, b)] {
            for (i, v) in src {
                let slot = mult.entry(*i).or_insert_with(Q::zero);
                *slot += v * s;
            }
        }
        mult.retain(|_, v: &mut Q| !v.is_zero());
        Row {
            form,
            strict: self.strict || other.strict,
            mult,
        }
    }

    /// `Some(true)` if the constant row holds, `Some(false)` if it is a
    /// contradiction, `None` if the row still has variables.
    fn constant_status(&self) -> Option<bool> {
        if !self.form.is_constant() {
            return None;
        }
        let c = self.form.constant_term();
        Some(if self.strict { c.is_positive() } else { !c.is_negative() })
    }
}

enum Step {
    /// `var` solved from `form = 0`.
    Pivot { var: Param, form: Affine },
    /// Bounds on `var` from the rows that mention it.
    Bounds { var: Param, rows: Vec<(Affine, bool)> },
}

/// Decides `sys`; see the module documentation.
pub fn eliminate(sys: &ConstraintSystem) -> FeasibilityResult {
    let mut steps = Vec::new();
    let ne = sys.equalities.len();
    let unit = |i: usize| BTreeMap::from([(i, Q::one())]);

    let mut eqs: Vec<Row> = sys
        .equalities
        .iter()
        .enumerate()
        .map(|(i, c)| Row {
            form: c.form.clone(),
            strict: false,
            mult: unit(i),
        })
        .collect();
    let mut ineqs: Vec<Row> = sys
        .strict
        .iter()
        .enumerate()
        .map(|(i, c)| Row {
            form: c.form.clone(),
            strict: true,
            mult: unit(ne + i),
        })
        .chain(sys.weak.iter().enumerate().map(|(i, c)| Row {
            form: c.form.clone(),
            strict: false,
            mult: unit(ne + sys.strict.len() + i),
        }))
        .collect();

    while let Some(row) = eqs.pop() {
        if row.form.is_constant() {
            if row.form.constant_term().is_zero() {
                continue;
            }
            // c = 0 with c != 0: scale to a negative constant
            let s = if row.form.constant_term().is_positive() { -Q::one() } else { Q::one() };
            let mult = row.mult.iter().map(|(i, v)| (*i, v * &s)).collect();
            return infeasible(sys, &mult);
        }
        let (var, coef) = row
            .form
            .terms()
            .last()
            .map(|(p, c)| (p, c.clone()))
            .expect("nonconstant row has a term");
        for other in eqs.iter_mut().chain(ineqs.iter_mut()) {
            let c = other.form.coeff(var);
            if !c.is_zero() {
                let strict = other.strict;
                *other = other.combine(&Q::one(), &row, &(-c / &coef));
                other.strict = strict;
            }
        }
        steps.push(Step::Pivot { var, form: row.form });
    }

    loop {
        ineqs = match prune(ineqs) {
            Ok(rows) => rows,
            Err(mult) => return infeasible(sys, &mult),
        };
        let Some(var) = choose_variable(&ineqs) else {
            break;
        };
        let (with, without): (Vec<Row>, Vec<Row>) = ineqs.into_iter().partition(|r| r.form.mentions(var));
        let (pos, neg): (Vec<&Row>, Vec<&Row>) = with.iter().partition(|r| r.form.coeff(var).is_positive());
        let mut next = without;
        for p in &pos {
            let a = p.form.coeff(var);
            for n in &neg {
                let b = -n.form.coeff(var);
                next.push(p.combine(&b, n, &a));
            }
        }
        steps.push(Step::Bounds {
            var,
            rows: with.iter().map(|r| (r.form.clone(), r.strict)).collect(),
        });
        ineqs = next;
    }

    let mut values: BTreeMap<Param, Q> = BTreeMap::new();
    for step in steps.iter().rev() {
        match step {
            Step::Bounds { var, rows } => {
                let v = pick_value(*var, rows, &values);
                values.insert(*var, v);
            }
            Step::Pivot { var, form } => {
                let coef = form.coeff(*var);
                let mut rest = form.clone();
                rest.add_term(*var, -coef.clone());
                let r = eval_partial(&rest, &values);
                values.insert(*var, -r / coef);
            }
        }
    }
    let sample = Sample {
        variables: sys.variables.clone(),
        values: sys
            .variables
            .iter()
            .map(|p| values.get(p).cloned().unwrap_or_else(Q::zero))
            .collect(),
    };
    debug_assert_eq!(verify_sample(sys, &sample.values), Ok(true));
    FeasibilityResult::Feasible { sample }
}

fn infeasible(sys: &ConstraintSystem, mult: &BTreeMap<usize, Q>) -> FeasibilityResult {
    let certificate = Certificate::from_sparse(sys, mult);
    debug_assert!(verify_certificate(sys, &certificate));
    FeasibilityResult::Infeasible { certificate }
}

/// Removes satisfied constant rows and duplicates; returns the multipliers
/// of a contradictory row if there is one.
fn prune(rows: Vec<Row>) -> Result<Vec<Row>, BTreeMap<usize, Q>> {
    let mut index: HashMap<Affine, usize> = HashMap::new();
    let mut out: Vec<Row> = Vec::new();
    for r in rows {
        match r.constant_status() {
            Some(true) => continue,
            Some(false) => return Err(r.mult),
            None => {}
        }
        let key = r.form.normalized();
        match index.get(&key) {
            Some(&i) => {
                if r.strict && !out[i].strict {
                    out[i] = r;
                }
            }
            None => {
                index.insert(key, out.len());
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// The variable whose elimination creates the fewest new rows; ties go to
/// the largest parameter.
fn choose_variable(rows: &[Row]) -> Option<Param> {
    let mut counts: BTreeMap<Param, (usize, usize)> = BTreeMap::new();
    for r in rows {
        for (p, c) in r.form.terms() {
            let e = counts.entry(p).or_default();
            if c.is_positive() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    counts
        .into_iter()
        .min_by_key(|(p, (a, b))| ((a * b) as i64 - (a + b) as i64, std::cmp::Reverse(*p)))
        .map(|(p, _)| p)
}

fn eval_partial(form: &Affine, values: &BTreeMap<Param, Q>) -> Q {
    let mut acc = form.constant_term().clone();
    for (p, c) in form.terms() {
        acc += c * values.get(&p).cloned().unwrap_or_else(Q::zero);
    }
    acc
}

/// Midpoint of the feasible interval for `var`, or one unit inside a
/// one-sided strict bound.
fn pick_value(var: Param, rows: &[(Affine, bool)], values: &BTreeMap<Param, Q>) -> Q {
    let mut lower: Option<(Q, bool)> = None;
    let mut upper: Option<(Q, bool)> = None;
    for (form, strict) in rows {
        let a = form.coeff(var);
        let mut rest = form.clone();
        rest.add_term(var, -a.clone());
        let bound = -eval_partial(&rest, values) / &a;
        if a.is_positive() {
            let tighter = match &lower {
                None => true,
                Some((b, s)) => bound > *b || (bound == *b && *strict && !s),
            };
            if tighter {
                lower = Some((bound, *strict));
            }
        } else {
            let tighter = match &upper {
                None => true,
                Some((b, s)) => bound < *b || (bound == *b && *strict && !s),
            };
            if tighter {
                upper = Some((bound, *strict));
            }
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / q(2),
        (Some((l, true)), None) => l + Q::one(),
        (Some((l, false)), None) => l,
        (None, Some((u, true))) => u - Q::one(),
        (None, Some((u, false))) => u,
        (None, None) => Q::zero(),
    }
}

/// Whether every point of `a` satisfies every constraint of `b`.
pub fn implies(a: &ConstraintSystem, b: &ConstraintSystem) -> bool {
    if !eliminate(a).is_feasible() {
        return true;
    }
    let query = |rel: Relation, form: Affine| {
        let mut s = a.clone();
        s.add(rel, form, Provenance::new(Rule::Query, "negated consequence"));
        !eliminate(&s).is_feasible()
    };
    // constraints copied verbatim from `a` need no elimination
    let eqs: BTreeSet<Affine> = a.equalities.iter().map(|c| c.form.monic()).collect();
    let strict: BTreeSet<Affine> = a.strict.iter().map(|c| c.form.normalized()).collect();
    let weak: BTreeSet<Affine> = a.weak.iter().map(|c| c.form.normalized()).collect();
    let verbatim = |rel: Relation, f: &Affine| match rel {
        Relation::Equal => eqs.contains(&f.monic()),
        Relation::Strict => strict.contains(&f.normalized()),
        Relation::Weak => {
            let n = f.normalized();
            strict.contains(&n) || weak.contains(&n) || eqs.contains(&f.monic())
        }
    };
    b.iter().all(|(rel, c)| verbatim(rel, &c.form) || match rel {
        Relation::Equal => query(Relation::Strict, c.form.clone()) && query(Relation::Strict, -&c.form),
        Relation::Strict => query(Relation::Weak, -&c.form),
        Relation::Weak => query(Relation::Strict, -&c.form),
    })
}

/// Equalities solved for their highest variables and substituted into the
/// inequalities; `None` if the equalities are inconsistent.
type Reduced = (BTreeMap<Param, Affine>, BTreeSet<Affine>, BTreeSet<Affine>);

fn reduced(sys: &ConstraintSystem) -> Option<Reduced> {
    let mut pivots: BTreeMap<Param, Affine> = BTreeMap::new();
    for c in &sys.equalities {
        let mut f = c.form.clone();
        for (p, e) in &pivots {
            f = f.substitute(*p, e);
        }
        let Some(p) = f.params().last() else {
            if f.is_zero() {
                continue;
            }
            return None;
        };
        let a = f.coeff(p);
        let mut expr = f.clone();
        expr.add_term(p, -a.clone());
        let expr = expr.scale(&(-Q::one() / a));
        for e in pivots.values_mut() {
            *e = e.substitute(p, &expr);
        }
        pivots.insert(p, expr);
    }
    let reduce = |cs: &[Constraint]| -> BTreeSet<Affine> {
        cs.iter()
            .map(|c| {
                let mut f = c.form.clone();
                for (p, e) in &pivots {
                    f = f.substitute(*p, e);
                }
                f.normalized()
            })
            .collect()
    };
    let strict = reduce(&sys.strict);
    let weak = reduce(&sys.weak);
    Some((pivots.into_iter().collect(), strict, weak))
}

/// Same feasible set.
pub fn equivalent(a: &ConstraintSystem, b: &ConstraintSystem) -> bool {
    if let (Some(ra), Some(rb)) = (reduced(a), reduced(b)) {
        if ra == rb {
            return true;
        }
    }
    implies(a, b) && implies(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag() -> Provenance {
        Provenance::new(Rule::FixedValue, "test")
    }

    fn v(p: Param) -> Affine {
        Affine::var(p)
    }

    const A0: Param = Param::MinSize;
    const T0: Param = Param::Gap(0);
    const T1: Param = Param::Gap(1);

    #[test]
    fn opposite_strict_is_infeasible_with_unit_certificate() {
        let mut s = ConstraintSystem::new();
        s.add_strict(v(T0), tag());
        s.add_strict(-v(T0), tag());
        let r = eliminate(&s);
        let cert = r.certificate().expect("infeasible");
        assert_eq!(cert.strict, vec![q(1), q(1)]);
        assert!(verify_certificate(&s, cert));
    }

    #[test]
    fn type_three_like_system_is_feasible() {
        // alpha0 - 4 t0 > 0, alpha0 = t1 + 3 t0, t0 > 0, t1 > 0
        let mut s = ConstraintSystem::new();
        s.add_strict(v(A0) - v(T0) * 4, tag());
        s.add_eq(v(A0) - v(T1) - v(T0) * 3, tag());
        s.add_strict(v(T0), tag());
        s.add_strict(v(T1), tag());
        assert!(verify_sample(&s, &[q(5), q(1), q(2)]).unwrap());
        let r = eliminate(&s);
        let sample = r.sample().expect("feasible");
        assert!(verify_sample(&s, &sample.values).unwrap());
    }

    #[test]
    fn inconsistent_equalities() {
        let mut s = ConstraintSystem::new();
        s.add_eq(v(T0) - v(T1), tag());
        s.add_eq(v(T0) - v(T1) - Affine::int(1), tag());
        let r = eliminate(&s);
        assert!(verify_certificate(&s, r.certificate().unwrap()));
    }

    #[test]
    fn weak_bounds_meet() {
        let mut s = ConstraintSystem::new();
        s.add_weak(v(T0) - Affine::int(2), tag());
        s.add_weak(Affine::int(2) - v(T0), tag());
        let r = eliminate(&s);
        assert_eq!(r.sample().unwrap().values, vec![q(2)]);
        s.add_strict(v(T0) - Affine::int(2), tag());
        let r = eliminate(&s);
        assert!(verify_certificate(&s, r.certificate().unwrap()));
    }

    #[test]
    fn zero_vector_fails_strict_positivity() {
        let mut s = ConstraintSystem::new();
        s.add_strict(v(T0), tag());
        s.add_weak(v(T1), tag());
        assert_eq!(verify_sample(&s, &[q(0), q(0)]), Ok(false));
        assert_eq!(
            verify_sample(&s, &[q(0)]),
            Err(FeasibilityError::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn implication_and_equivalence() {
        let mut a = ConstraintSystem::new();
        a.add_strict(v(T0) - v(T1), tag());
        a.add_strict(v(T1), tag());
        let mut b = ConstraintSystem::new();
        b.add_strict(v(T0), tag());
        assert!(implies(&a, &b));
        assert!(!implies(&b, &a));
        let mut c = ConstraintSystem::new();
        c.add_strict(v(T1) * 2, tag());
        c.add_strict((v(T0) - v(T1)) * 3, tag());
        assert!(equivalent(&a, &c));
    }

    #[test]
    fn dedup_collapses_scaled_copies() {
        let mut s = ConstraintSystem::new();
        s.add_eq(v(T0) - v(T1), tag());
        s.add_eq(v(T1) * 2 - v(T0) * 2, tag());
        s.add_strict(v(T0), tag());
        s.add_strict(v(T0) * 3, tag());
        s.add_weak(v(T0) * 2, tag());
        s.add_weak(v(T0) - v(T1), tag());
        s.dedup();
        assert_eq!(s.len(), 2);
    }
}
