//! Theory formulas over linear rational arithmetic, their Boolean
//! abstraction, and the atom map that relates the two.
//!
//! Every arithmetic atom is stored in a normalized form so that
//! syntactically different spellings of one constraint intern to a single
//! Boolean variable:
//!
//! * variables are sorted by name and zero coefficients are dropped,
//! * coefficients are scaled to coprime integers,
//! * the leading coefficient is positive,
//! * `>=` and `>` are folded into negated `<` and `<=` atoms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("atom `{0}` is not registered in the atom map")]
    MissingAtom(String),
    #[error("variable index {0} is not registered in the atom map")]
    UnknownVar(VarId),
    #[error("atom `{0}` is already registered as an extra atom")]
    ExtraAtomConflict(String),
}

/// Boolean variable index. Indices are dense and assigned in registration
/// order by an [`AtomMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        }
    }
}

/// Comparison operator of a raw, not yet normalized constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

/// A linear expression `sum(c_i * x_i) + k`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearExpr {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl LinearExpr {
    pub fn constant(value: Rational) -> Self {
        LinearExpr {
            coeffs: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rational::one());
        LinearExpr {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    pub fn plus(mut self, other: &LinearExpr) -> Self {
        for (name, c) in &other.coeffs {
            let entry = self
                .coeffs
                .entry(name.clone())
                .or_insert_with(Rational::zero);
            *entry += c;
        }
        self.coeffs.retain(|_, c| !c.is_zero());
        self.constant += &other.constant;
        self
    }

    pub fn scale(mut self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return LinearExpr::default();
        }
        for c in self.coeffs.values_mut() {
            *c *= factor;
        }
        self.constant *= factor;
        self
    }

    pub fn negated(self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn minus(self, other: &LinearExpr) -> Self {
        self.plus(&other.clone().negated())
    }
}

/// A normalized linear constraint `sum(coeffs) <rel> constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearAtom {
    coeffs: BTreeMap<String, Rational>,
    constant: Rational,
    relation: Relation,
}

/// Result of normalizing a raw constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizedAtom {
    /// The constraint mentions no variable and folds to a constant.
    Constant(bool),
    /// `raw <=> atom` when `polarity` holds, `raw <=> !atom` otherwise.
    Atom { atom: LinearAtom, polarity: bool },
}

impl NormalizedAtom {
    pub fn into_formula(self) -> TFormula {
        match self {
            NormalizedAtom::Constant(true) => TFormula::True,
            NormalizedAtom::Constant(false) => TFormula::False,
            NormalizedAtom::Atom { atom, polarity } => {
                let f = TFormula::Theory(atom);
                if polarity {
                    f
                } else {
                    TFormula::not(f)
                }
            }
        }
    }
}

/// Normalizes `lhs <cmp> rhs` into a canonical atom and a polarity.
pub fn normalize_atom(lhs: &LinearExpr, cmp: Comparison, rhs: &LinearExpr) -> NormalizedAtom {
    // move everything to the left: diff <cmp> 0, i.e. terms <cmp> -constant
    let diff = lhs.clone().minus(rhs);
    let mut coeffs: BTreeMap<String, Rational> = diff
        .coeffs
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut bound = -diff.constant;

    if coeffs.is_empty() {
        let zero = Rational::zero();
        let holds = match cmp {
            Comparison::Le => zero <= bound,
            Comparison::Lt => zero < bound,
            Comparison::Eq => zero == bound,
            Comparison::Ge => zero >= bound,
            Comparison::Gt => zero > bound,
        };
        return NormalizedAtom::Constant(holds);
    }

    let relation = match cmp {
        Comparison::Le => Relation::Le,
        Comparison::Lt => Relation::Lt,
        Comparison::Eq => Relation::Eq,
        Comparison::Ge | Comparison::Gt => {
            for c in coeffs.values_mut() {
                *c = -c.clone();
            }
            bound = -bound;
            if cmp == Comparison::Ge {
                Relation::Le
            } else {
                Relation::Lt
            }
        }
    };

    // scale to coprime integers with a positive factor
    let lcm_den = coeffs
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd_num = coeffs.values().fold(BigInt::zero(), |acc, c| {
        acc.gcd(&(c.numer() * (&lcm_den / c.denom())))
    });
    let factor = Rational::new(lcm_den, gcd_num);
    for c in coeffs.values_mut() {
        *c *= &factor;
    }
    bound *= &factor;

    let leading_negative = coeffs.values().next().is_some_and(|c| c.is_negative());
    if !leading_negative {
        return NormalizedAtom::Atom {
            atom: LinearAtom {
                coeffs,
                constant: bound,
                relation,
            },
            polarity: true,
        };
    }
    for c in coeffs.values_mut() {
        *c = -c.clone();
    }
    bound = -bound;
    // -t <= c  <=>  t >= -c  <=>  !(t < -c), and dually for <
    let (relation, polarity) = match relation {
        Relation::Eq => (Relation::Eq, true),
        Relation::Le => (Relation::Lt, false),
        Relation::Lt => (Relation::Le, false),
    };
    NormalizedAtom::Atom {
        atom: LinearAtom {
            coeffs,
            constant: bound,
            relation,
        },
        polarity,
    }
}

impl LinearAtom {
    /// Builds an atom from already normalized parts. Returns `None` when the
    /// parts are not in normal form.
    pub fn from_normalized(
        coeffs: BTreeMap<String, Rational>,
        constant: Rational,
        relation: Relation,
    ) -> Option<LinearAtom> {
        let expr = LinearExpr {
            coeffs: coeffs.clone(),
            constant: Rational::zero(),
        };
        let cmp = match relation {
            Relation::Le => Comparison::Le,
            Relation::Lt => Comparison::Lt,
            Relation::Eq => Comparison::Eq,
        };
        let candidate = LinearAtom {
            coeffs,
            constant: constant.clone(),
            relation,
        };
        match normalize_atom(&expr, cmp, &LinearExpr::constant(constant)) {
            NormalizedAtom::Atom {
                atom,
                polarity: true,
            } if atom == candidate => Some(atom),
            _ => None,
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Rational> {
        &self.coeffs
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.coeffs.keys().map(String::as_str)
    }

    /// The same linear term and bound with a different relation.
    pub fn with_relation(&self, relation: Relation) -> LinearAtom {
        LinearAtom {
            coeffs: self.coeffs.clone(),
            constant: self.constant.clone(),
            relation,
        }
    }

    /// Value of the linear term under `valuation`; missing variables are 0.
    pub fn term_value(&self, valuation: &BTreeMap<String, Rational>) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (v, c)| {
            acc + valuation.get(v).map_or_else(Rational::zero, |x| c * x)
        })
    }

    pub fn eval(&self, valuation: &BTreeMap<String, Rational>) -> bool {
        let lhs = self.term_value(valuation);
        match self.relation {
            Relation::Le => lhs <= self.constant,
            Relation::Lt => lhs < self.constant,
            Relation::Eq => lhs == self.constant,
        }
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, c)) in self.coeffs.iter().enumerate() {
            let abs = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if abs.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}*{name}", fmt_rational(&abs))?;
            }
        }
        write!(
            f,
            " {} {}",
            self.relation.symbol(),
            fmt_rational(&self.constant)
        )
    }
}

/// An atom of a theory formula: either a linear constraint or a Boolean
/// proposition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Theory(LinearAtom),
    Bool(String),
}

impl Atom {
    pub fn as_theory(&self) -> Option<&LinearAtom> {
        match self {
            Atom::Theory(a) => Some(a),
            Atom::Bool(_) => None,
        }
    }

    pub fn to_formula(&self) -> TFormula {
        match self {
            Atom::Theory(a) => TFormula::Theory(a.clone()),
            Atom::Bool(p) => TFormula::Bool(p.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Theory(a) => write!(f, "{a}"),
            Atom::Bool(p) => write!(f, "{p}"),
        }
    }
}

/// Quantifier-free formula over linear rational atoms and Boolean atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TFormula {
    True,
    False,
    Theory(LinearAtom),
    Bool(String),
    Not(Box<TFormula>),
    And(Vec<TFormula>),
    Or(Vec<TFormula>),
    Iff(Box<TFormula>, Box<TFormula>),
    Xor(Box<TFormula>, Box<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
}

impl TFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: TFormula) -> TFormula {
        TFormula::Not(Box::new(f))
    }

    /// Conjunction; collapses to `True` or the single child for fewer than
    /// two children.
    pub fn and(children: impl IntoIterator<Item = TFormula>) -> TFormula {
        let mut children: Vec<_> = children.into_iter().collect();
        match children.len() {
            0 => TFormula::True,
            1 => children.pop().unwrap(),
            _ => TFormula::And(children),
        }
    }

    pub fn or(children: impl IntoIterator<Item = TFormula>) -> TFormula {
        let mut children: Vec<_> = children.into_iter().collect();
        match children.len() {
            0 => TFormula::False,
            1 => children.pop().unwrap(),
            _ => TFormula::Or(children),
        }
    }

    pub fn iff(a: TFormula, b: TFormula) -> TFormula {
        TFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: TFormula, b: TFormula) -> TFormula {
        TFormula::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: TFormula, b: TFormula) -> TFormula {
        TFormula::Implies(Box::new(a), Box::new(b))
    }

    /// Atoms in first-occurrence order (depth-first, left to right).
    pub fn atoms(&self) -> Vec<Atom> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_atoms(&mut seen, &mut out);
        out
    }

    fn collect_atoms(&self, seen: &mut BTreeSet<Atom>, out: &mut Vec<Atom>) {
        let mut push = |a: Atom| {
            if seen.insert(a.clone()) {
                out.push(a);
            }
        };
        match self {
            TFormula::True | TFormula::False => {}
            TFormula::Theory(a) => push(Atom::Theory(a.clone())),
            TFormula::Bool(p) => push(Atom::Bool(p.clone())),
            TFormula::Not(f) => f.collect_atoms(seen, out),
            TFormula::And(fs) | TFormula::Or(fs) => {
                for f in fs {
                    f.collect_atoms(seen, out);
                }
            }
            TFormula::Iff(a, b) | TFormula::Xor(a, b) | TFormula::Implies(a, b) => {
                a.collect_atoms(seen, out);
                b.collect_atoms(seen, out);
            }
        }
    }

    /// Evaluates the formula under a valuation of its atoms.
    pub fn eval_with(&self, atom_value: &mut impl FnMut(&Atom) -> bool) -> bool {
        match self {
            TFormula::True => true,
            TFormula::False => false,
            TFormula::Theory(a) => atom_value(&Atom::Theory(a.clone())),
            TFormula::Bool(p) => atom_value(&Atom::Bool(p.clone())),
            TFormula::Not(f) => !f.eval_with(atom_value),
            TFormula::And(fs) => fs.iter().all(|f| f.eval_with(atom_value)),
            TFormula::Or(fs) => fs.iter().any(|f| f.eval_with(atom_value)),
            TFormula::Iff(a, b) => a.eval_with(atom_value) == b.eval_with(atom_value),
            TFormula::Xor(a, b) => a.eval_with(atom_value) != b.eval_with(atom_value),
            TFormula::Implies(a, b) => !a.eval_with(atom_value) || b.eval_with(atom_value),
        }
    }

    /// Names of the rational variables mentioned by theory atoms.
    pub fn real_vars(&self) -> BTreeSet<String> {
        self.atoms()
            .iter()
            .filter_map(Atom::as_theory)
            .flat_map(|a| a.variables().map(str::to_string))
            .collect()
    }

    pub fn bool_vars(&self) -> BTreeSet<String> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Bool(p) => Some(p),
                Atom::Theory(_) => None,
            })
            .collect()
    }
}

/// Propositional formula over Boolean variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolFormula {
    Const(bool),
    Var(VarId),
    Not(Box<BoolFormula>),
    And(Vec<BoolFormula>),
    Or(Vec<BoolFormula>),
    Iff(Box<BoolFormula>, Box<BoolFormula>),
    Xor(Box<BoolFormula>, Box<BoolFormula>),
    Implies(Box<BoolFormula>, Box<BoolFormula>),
}

impl BoolFormula {
    pub fn var(v: u32) -> BoolFormula {
        BoolFormula::Var(VarId(v))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: BoolFormula) -> BoolFormula {
        BoolFormula::Not(Box::new(f))
    }

    pub fn lit(v: VarId, positive: bool) -> BoolFormula {
        if positive {
            BoolFormula::Var(v)
        } else {
            BoolFormula::not(BoolFormula::Var(v))
        }
    }

    pub fn iff(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn xor(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: BoolFormula, b: BoolFormula) -> BoolFormula {
        BoolFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, value: &impl Fn(VarId) -> bool) -> bool {
        match self {
            BoolFormula::Const(b) => *b,
            BoolFormula::Var(v) => value(*v),
            BoolFormula::Not(f) => !f.eval(value),
            BoolFormula::And(fs) => fs.iter().all(|f| f.eval(value)),
            BoolFormula::Or(fs) => fs.iter().any(|f| f.eval(value)),
            BoolFormula::Iff(a, b) => a.eval(value) == b.eval(value),
            BoolFormula::Xor(a, b) => a.eval(value) != b.eval(value),
            BoolFormula::Implies(a, b) => !a.eval(value) || b.eval(value),
        }
    }

    /// Three-valued evaluation under a partial assignment; `None` means
    /// undetermined.
    pub fn eval_partial(&self, value: &impl Fn(VarId) -> Option<bool>) -> Option<bool> {
        match self {
            BoolFormula::Const(b) => Some(*b),
            BoolFormula::Var(v) => value(*v),
            BoolFormula::Not(f) => f.eval_partial(value).map(|b| !b),
            BoolFormula::And(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.eval_partial(value) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            BoolFormula::Or(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.eval_partial(value) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            BoolFormula::Iff(a, b) => Some(a.eval_partial(value)? == b.eval_partial(value)?),
            BoolFormula::Xor(a, b) => Some(a.eval_partial(value)? != b.eval_partial(value)?),
            BoolFormula::Implies(a, b) => match (a.eval_partial(value), b.eval_partial(value)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            BoolFormula::Const(_) => {}
            BoolFormula::Var(v) => {
                out.insert(*v);
            }
            BoolFormula::Not(f) => f.collect_vars(out),
            BoolFormula::And(fs) | BoolFormula::Or(fs) => {
                for f in fs {
                    f.collect_vars(out);
                }
            }
            BoolFormula::Iff(a, b) | BoolFormula::Xor(a, b) | BoolFormula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[BoolFormula], op: &str| {
            write!(f, "(")?;
            for (i, c) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            BoolFormula::Const(true) => write!(f, "T"),
            BoolFormula::Const(false) => write!(f, "F"),
            BoolFormula::Var(v) => write!(f, "{v}"),
            BoolFormula::Not(a) => write!(f, "!{a}"),
            BoolFormula::And(fs) => join(f, fs, "&"),
            BoolFormula::Or(fs) => join(f, fs, "|"),
            BoolFormula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            BoolFormula::Xor(a, b) => write!(f, "({a} ^ {b})"),
            BoolFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

/// A (total or partial) truth assignment to Boolean variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub literals: BTreeMap<VarId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Self {
        Assignment {
            literals: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.literals.get(&v).copied()
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.literals.insert(v, value);
    }

    pub fn is_total_over(&self, vars: &[VarId]) -> bool {
        vars.iter().all(|v| self.literals.contains_key(v))
    }

    /// The assignment as a conjunction of literals.
    pub fn to_formula(&self) -> BoolFormula {
        BoolFormula::And(
            self.literals
                .iter()
                .map(|(v, b)| BoolFormula::lit(*v, *b))
                .collect(),
        )
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .literals
            .iter()
            .map(|(v, b)| if *b { format!("{v}") } else { format!("!{v}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AtomEntry {
    atom: Atom,
    extra: bool,
}

/// Bijection between atoms and Boolean variables.
///
/// Atoms of the input formulas (the `alpha` set) and atoms introduced by
/// preprocessing (the `beta` set) share one index space. Indices are dense
/// and handed out in registration order.
#[derive(Debug, Clone, Default)]
pub struct AtomMap {
    entries: Vec<AtomEntry>,
    index: HashMap<Atom, VarId>,
}

impl AtomMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Map over the atoms of `phi` in first-occurrence order.
    pub fn from_formula(phi: &TFormula) -> Self {
        let mut map = AtomMap::new();
        for atom in phi.atoms() {
            map.intern(atom).expect("fresh map has no extra atoms");
        }
        map
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut map = AtomMap::new();
        for atom in atoms {
            map.intern(atom).expect("fresh map has no extra atoms");
        }
        map
    }

    /// Registers `atom` in alpha, returning its (possibly existing) index.
    pub fn intern(&mut self, atom: Atom) -> Result<VarId, FormulaError> {
        if let Some(&v) = self.index.get(&atom) {
            if self.entries[v.index()].extra {
                return Err(FormulaError::ExtraAtomConflict(atom.to_string()));
            }
            return Ok(v);
        }
        Ok(self.push(atom, false))
    }

    /// Registers an extra theory atom in beta. Atoms already present (in
    /// either set) keep their index.
    pub fn intern_extra(&mut self, atom: LinearAtom) -> VarId {
        let atom = Atom::Theory(atom);
        if let Some(&v) = self.index.get(&atom) {
            return v;
        }
        self.push(atom, true)
    }

    fn push(&mut self, atom: Atom, extra: bool) -> VarId {
        let v = VarId(self.entries.len() as u32);
        self.index.insert(atom.clone(), v);
        self.entries.push(AtomEntry { atom, extra });
        v
    }

    pub fn var_of(&self, atom: &Atom) -> Option<VarId> {
        self.index.get(atom).copied()
    }

    pub fn atom_of(&self, v: VarId) -> Option<&Atom> {
        self.entries.get(v.index()).map(|e| &e.atom)
    }

    pub fn is_extra(&self, v: VarId) -> bool {
        self.entries.get(v.index()).is_some_and(|e| e.extra)
    }

    pub fn alpha(&self) -> impl Iterator<Item = (VarId, &Atom)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.extra)
            .map(|(i, e)| (VarId(i as u32), &e.atom))
    }

    pub fn beta(&self) -> impl Iterator<Item = (VarId, &LinearAtom)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.extra)
            .filter_map(|(i, e)| e.atom.as_theory().map(|a| (VarId(i as u32), a)))
    }

    pub fn alpha_vars(&self) -> Vec<VarId> {
        self.alpha().map(|(v, _)| v).collect()
    }

    pub fn beta_vars(&self) -> Vec<VarId> {
        self.beta().map(|(v, _)| v).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Boolean abstraction: replaces every atom by its variable.
    pub fn abstract_formula(&self, phi: &TFormula) -> Result<BoolFormula, FormulaError> {
        let lookup = |atom: Atom| {
            self.var_of(&atom)
                .map(BoolFormula::Var)
                .ok_or_else(|| FormulaError::MissingAtom(atom.to_string()))
        };
        let bin = |a: &TFormula, b: &TFormula| -> Result<_, FormulaError> {
            Ok((
                Box::new(self.abstract_formula(a)?),
                Box::new(self.abstract_formula(b)?),
            ))
        };
        Ok(match phi {
            TFormula::True => BoolFormula::Const(true),
            TFormula::False => BoolFormula::Const(false),
            TFormula::Theory(a) => lookup(Atom::Theory(a.clone()))?,
            TFormula::Bool(p) => lookup(Atom::Bool(p.clone()))?,
            TFormula::Not(f) => BoolFormula::not(self.abstract_formula(f)?),
            TFormula::And(fs) => BoolFormula::And(
                fs.iter()
                    .map(|f| self.abstract_formula(f))
                    .collect::<Result<_, _>>()?,
            ),
            TFormula::Or(fs) => BoolFormula::Or(
                fs.iter()
                    .map(|f| self.abstract_formula(f))
                    .collect::<Result<_, _>>()?,
            ),
            TFormula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                BoolFormula::Iff(a, b)
            }
            TFormula::Xor(a, b) => {
                let (a, b) = bin(a, b)?;
                BoolFormula::Xor(a, b)
            }
            TFormula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                BoolFormula::Implies(a, b)
            }
        })
    }

    /// Refinement: the inverse of [`AtomMap::abstract_formula`].
    pub fn refine(&self, psi: &BoolFormula) -> Result<TFormula, FormulaError> {
        let bin = |a: &BoolFormula, b: &BoolFormula| -> Result<_, FormulaError> {
            Ok((Box::new(self.refine(a)?), Box::new(self.refine(b)?)))
        };
        Ok(match psi {
            BoolFormula::Const(true) => TFormula::True,
            BoolFormula::Const(false) => TFormula::False,
            BoolFormula::Var(v) => self
                .atom_of(*v)
                .ok_or(FormulaError::UnknownVar(*v))?
                .to_formula(),
            BoolFormula::Not(f) => TFormula::not(self.refine(f)?),
            BoolFormula::And(fs) => TFormula::And(
                fs.iter()
                    .map(|f| self.refine(f))
                    .collect::<Result<_, _>>()?,
            ),
            BoolFormula::Or(fs) => TFormula::Or(
                fs.iter()
                    .map(|f| self.refine(f))
                    .collect::<Result<_, _>>()?,
            ),
            BoolFormula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                TFormula::Iff(a, b)
            }
            BoolFormula::Xor(a, b) => {
                let (a, b) = bin(a, b)?;
                TFormula::Xor(a, b)
            }
            BoolFormula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                TFormula::Implies(a, b)
            }
        })
    }
}
