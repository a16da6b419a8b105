//! Consistency of conjunctions of linear rational literals.
//!
//! The decision procedure is Fourier-Motzkin elimination over `<=` and `<`
//! constraints. A negated equality `t != b` is split into `t < b` and
//! `t > b`, and the conjunction is consistent iff some branch is.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::formula::{AtomMap, LinearAtom, Rational, Relation, TFormula};

/// A theory atom together with a phase; phase `false` denotes its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TheoryLiteral {
    pub atom: LinearAtom,
    pub phase: bool,
}

impl TheoryLiteral {
    pub fn new(atom: LinearAtom, phase: bool) -> Self {
        TheoryLiteral { atom, phase }
    }

    pub fn negate(&self) -> TheoryLiteral {
        TheoryLiteral {
            atom: self.atom.clone(),
            phase: !self.phase,
        }
    }

    pub fn eval(&self, valuation: &BTreeMap<String, Rational>) -> bool {
        self.atom.eval(valuation) == self.phase
    }

    pub fn to_formula(&self) -> TFormula {
        let a = TFormula::Theory(self.atom.clone());
        if self.phase {
            a
        } else {
            TFormula::not(a)
        }
    }
}

impl fmt::Display for TheoryLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase {
            write!(f, "({})", self.atom)
        } else {
            write!(f, "!({})", self.atom)
        }
    }
}

pub type Witness = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    Consistent(Witness),
    Inconsistent(Vec<TheoryLiteral>),
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("literal set is consistent; no core exists")]
    Consistent,
}

/// `sum(coeffs) <= rhs`, or `< rhs` when strict.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Bound {
    coeffs: BTreeMap<String, Rational>,
    rhs: Rational,
    strict: bool,
}

impl Bound {
    fn new(coeffs: BTreeMap<String, Rational>, rhs: Rational, strict: bool) -> Self {
        let mut b = Bound {
            coeffs,
            rhs,
            strict,
        };
        b.coeffs.retain(|_, c| !c.is_zero());
        // scale so the first coefficient has magnitude 1, which makes
        // duplicate detection structural
        if let Some(lead) = b.coeffs.values().next().map(|c| c.abs()) {
            for c in b.coeffs.values_mut() {
                *c /= &lead;
            }
            b.rhs /= lead;
        }
        b
    }

    fn upper(atom: &LinearAtom, strict: bool) -> Self {
        Bound::new(atom.coeffs().clone(), atom.constant().clone(), strict)
    }

    fn lower(atom: &LinearAtom, strict: bool) -> Self {
        Bound::new(
            atom.coeffs().iter().map(|(v, c)| (v.clone(), -c)).collect(),
            -atom.constant(),
            strict,
        )
    }
}

/// Keeps the tightest bound per coefficient vector and checks ground and
/// opposing pairs; `None` when that already shows infeasibility.
fn tighten(bounds: BTreeSet<Bound>) -> Option<Vec<Bound>> {
    let mut best: BTreeMap<BTreeMap<String, Rational>, (Rational, bool)> = BTreeMap::new();
    for b in bounds {
        if b.coeffs.is_empty() {
            let zero = Rational::zero();
            let ok = if b.strict {
                zero < b.rhs
            } else {
                zero <= b.rhs
            };
            if !ok {
                return None;
            }
            continue;
        }
        match best.get_mut(&b.coeffs) {
            Some((rhs, strict)) => {
                if b.rhs < *rhs || (b.rhs == *rhs && b.strict) {
                    *rhs = b.rhs;
                    *strict = b.strict;
                }
            }
            None => {
                best.insert(b.coeffs, (b.rhs, b.strict));
            }
        }
    }
    for (coeffs, (rhs, strict)) in &best {
        let opposite: BTreeMap<String, Rational> =
            coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect();
        if let Some((orhs, ostrict)) = best.get(&opposite) {
            // -orhs <= coeffs.x <= rhs
            let gap = rhs + orhs;
            if gap.is_negative() || (gap.is_zero() && (*strict || *ostrict)) {
                return None;
            }
        }
    }
    Some(
        best.into_iter()
            .map(|(coeffs, (rhs, strict))| Bound {
                coeffs,
                rhs,
                strict,
            })
            .collect(),
    )
}

/// Decides a conjunction of bounds; returns a witness when feasible.
fn fourier_motzkin(bounds: BTreeSet<Bound>) -> Option<Witness> {
    let open = tighten(bounds)?;
    // pick the variable with the fewest generated combinations
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for b in &open {
        for (v, c) in &b.coeffs {
            let e = counts.entry(v.as_str()).or_default();
            if c.is_positive() {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    let Some(var) = counts
        .iter()
        .min_by_key(|(_, (up, lo))| up * lo)
        .map(|(v, _)| v.to_string())
    else {
        return Some(Witness::new());
    };

    let (mut uppers, mut lowers, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
    for b in open {
        match b.coeffs.get(&var) {
            Some(c) if c.is_positive() => uppers.push(b),
            Some(_) => lowers.push(b),
            None => {
                rest.insert(b);
            }
        }
    }
    for u in &uppers {
        for l in &lowers {
            let cu = &u.coeffs[&var];
            let cl = -&l.coeffs[&var];
            // cl * u + cu * l cancels var
            let mut coeffs = BTreeMap::new();
            for (v, c) in &u.coeffs {
                *coeffs.entry(v.clone()).or_insert_with(Rational::zero) += c * &cl;
            }
            for (v, c) in &l.coeffs {
                *coeffs.entry(v.clone()).or_insert_with(Rational::zero) += c * cu;
            }
            coeffs.remove(&var);
            rest.insert(Bound::new(
                coeffs,
                &u.rhs * &cl + &l.rhs * cu,
                u.strict || l.strict,
            ));
        }
    }
    let mut witness = fourier_motzkin(rest)?;

    // back-substitute: var lies between the tightest lower and upper bound
    let residual = |b: &Bound| -> Rational {
        let others = b
            .coeffs
            .iter()
            .filter(|(v, _)| **v != var)
            .fold(Rational::zero(), |acc, (v, c)| {
                acc + witness.get(v).map_or_else(Rational::zero, |x| c * x)
            });
        (&b.rhs - others) / &b.coeffs[&var]
    };
    let mut hi: Option<(Rational, bool)> = None;
    for u in &uppers {
        let val = residual(u);
        hi = Some(match hi {
            Some((h, s)) if h < val || (h == val && s) => (h, s),
            _ => (val, u.strict),
        });
    }
    let mut lo: Option<(Rational, bool)> = None;
    for l in &lowers {
        let val = residual(l);
        lo = Some(match lo {
            Some((h, s)) if h > val || (h == val && s) => (h, s),
            _ => (val, l.strict),
        });
    }
    let value = match (lo, hi) {
        (None, None) => Rational::zero(),
        (Some((l, strict)), None) => {
            if strict {
                l + Rational::one()
            } else {
                l
            }
        }
        (None, Some((h, strict))) => {
            if strict {
                h - Rational::one()
            } else {
                h
            }
        }
        (Some((l, ls)), Some((h, hs))) => {
            if !ls {
                l
            } else if !hs {
                h
            } else {
                (l + h) / Rational::from_integer(2.into())
            }
        }
    };
    witness.insert(var, value);
    Some(witness)
}

/// Searches for a point satisfying `lits`; `None` when there is none.
fn solve(lits: &[TheoryLiteral]) -> Option<Witness> {
    let mut bounds = BTreeSet::new();
    let mut disequalities = Vec::new();
    for lit in lits {
        let a = &lit.atom;
        match (a.relation(), lit.phase) {
            (Relation::Le, true) => {
                bounds.insert(Bound::upper(a, false));
            }
            (Relation::Le, false) => {
                bounds.insert(Bound::lower(a, true));
            }
            (Relation::Lt, true) => {
                bounds.insert(Bound::upper(a, true));
            }
            (Relation::Lt, false) => {
                bounds.insert(Bound::lower(a, false));
            }
            (Relation::Eq, true) => {
                bounds.insert(Bound::upper(a, false));
                bounds.insert(Bound::lower(a, false));
            }
            (Relation::Eq, false) => disequalities.push(a),
        }
    }
    let mut witness = split_disequalities(&bounds, &disequalities)?;
    for v in lits.iter().flat_map(|l| l.atom.variables()) {
        witness.entry(v.to_string()).or_insert_with(Rational::zero);
    }
    debug_assert!(lits.iter().all(|l| l.eval(&witness)));
    Some(witness)
}

fn split_disequalities(bounds: &BTreeSet<Bound>, diseqs: &[&LinearAtom]) -> Option<Witness> {
    let Some((first, rest)) = diseqs.split_first() else {
        return fourier_motzkin(bounds.clone());
    };
    for branch in [Bound::upper(first, true), Bound::lower(first, true)] {
        let mut b = bounds.clone();
        b.insert(branch);
        if let Some(w) = split_disequalities(&b, rest) {
            return Some(w);
        }
    }
    None
}

/// Decides the conjunction of `lits`. Inconsistent verdicts carry a core
/// minimized by [`minimize_core`].
pub fn check_conjunction(lits: &[TheoryLiteral]) -> ConsistencyVerdict {
    match solve(lits) {
        Some(w) => ConsistencyVerdict::Consistent(w),
        None => ConsistencyVerdict::Inconsistent(
            minimize_core(lits).expect("inconsistent input has a core"),
        ),
    }
}

pub fn is_consistent(lits: &[TheoryLiteral]) -> bool {
    solve(lits).is_some()
}

/// Deletion-based core minimization.
///
/// Literals are tried for removal from the back of the slice to the front,
/// so among several cores the one built from earlier literals is kept. The
/// result preserves input order and every single-literal deletion from it
/// is consistent.
pub fn minimize_core(lits: &[TheoryLiteral]) -> Result<Vec<TheoryLiteral>, TheoryError> {
    let mut core: Vec<TheoryLiteral> = Vec::with_capacity(lits.len());
    for l in lits {
        if !core.contains(l) {
            core.push(l.clone());
        }
    }
    if solve(&core).is_some() {
        return Err(TheoryError::Consistent);
    }
    let mut i = core.len();
    while i > 0 {
        i -= 1;
        let removed = core.remove(i);
        if solve(&core).is_some() {
            core.insert(i, removed);
        }
    }
    Ok(core)
}

/// A T-valid clause over theory literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TLemma {
    literals: Vec<TheoryLiteral>,
}

impl TLemma {
    /// Builds a clause from its literals (sorted and deduplicated).
    pub fn new(literals: impl IntoIterator<Item = TheoryLiteral>) -> Self {
        let set: BTreeSet<_> = literals.into_iter().collect();
        TLemma {
            literals: set.into_iter().collect(),
        }
    }

    /// The clause ruling out a conjunction: the disjunction of the negated
    /// core literals.
    pub fn from_core(core: &[TheoryLiteral]) -> Self {
        TLemma::new(core.iter().map(TheoryLiteral::negate))
    }

    pub fn literals(&self) -> &[TheoryLiteral] {
        &self.literals
    }

    /// T-validity: the conjunction of the negated literals is inconsistent.
    pub fn is_valid(&self) -> bool {
        let negated: Vec<_> = self.literals.iter().map(TheoryLiteral::negate).collect();
        !is_consistent(&negated)
    }

    pub fn to_formula(&self) -> TFormula {
        TFormula::or(self.literals.iter().map(TheoryLiteral::to_formula))
    }
}

impl fmt::Display for TLemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Registers `t <= b` and `t >= b` (as the negation of `t < b`) as extra
/// atoms for every equality atom `t = b` in the alpha set, and returns the
/// new extra atoms with the clauses of `(t = b) <=> (t <= b) & (t >= b)`.
///
/// Calling it again registers nothing new and returns the same clauses.
pub fn eliminate_equalities(map: &mut AtomMap) -> (Vec<LinearAtom>, Vec<TLemma>) {
    let equalities: Vec<LinearAtom> = map
        .alpha()
        .filter_map(|(_, a)| a.as_theory())
        .filter(|a| a.relation() == Relation::Eq)
        .cloned()
        .collect();
    let mut added = Vec::new();
    let mut lemmas = Vec::new();
    for eq in equalities {
        let le = eq.with_relation(Relation::Le);
        let lt = eq.with_relation(Relation::Lt);
        for extra in [&le, &lt] {
            let known = map
                .var_of(&crate::formula::Atom::Theory(extra.clone()))
                .is_some();
            if !known {
                map.intern_extra(extra.clone());
                added.push(extra.clone());
            }
        }
        let eq_lit = TheoryLiteral::new(eq.clone(), true);
        let le_lit = TheoryLiteral::new(le, true);
        let ge_lit = TheoryLiteral::new(lt, false);
        lemmas.push(TLemma::new([eq_lit.negate(), le_lit.clone()]));
        lemmas.push(TLemma::new([eq_lit.negate(), ge_lit.clone()]));
        lemmas.push(TLemma::new([eq_lit, le_lit.negate(), ge_lit.negate()]));
    }
    (added, lemmas)
}
