//! Brute-force ground truth for small formulas, and random formula
//! generators for differential testing.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::compiler::{Compiler, Tdd};
use crate::formula::{
    normalize_atom, Assignment, Atom, AtomMap, BoolFormula, Comparison, FormulaError, LinearExpr,
    Rational, TFormula, VarId,
};
use crate::lra::{is_consistent, TLemma, TheoryLiteral};

pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} atoms exceed the oracle cap of {1}")]
    TooManyAtoms(usize, usize),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Total assignments over alpha, classified by whether they satisfy the
/// formula and whether they are theory-consistent. Every list is in
/// lexicographic order with false before true, first variable most
/// significant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssignmentSets {
    pub alpha: Vec<VarId>,
    pub ctta: Vec<Assignment>,
    pub itta: Vec<Assignment>,
    pub ctta_neg: Vec<Assignment>,
    pub itta_neg: Vec<Assignment>,
}

impl AssignmentSets {
    pub fn total(&self) -> usize {
        self.ctta.len() + self.itta.len() + self.ctta_neg.len() + self.itta_neg.len()
    }
}

fn nth_assignment(vars: &[VarId], bits: u64) -> Assignment {
    let n = vars.len();
    Assignment::from_pairs(
        vars.iter()
            .enumerate()
            .map(|(i, v)| (*v, (bits >> (n - 1 - i)) & 1 == 1)),
    )
}

fn theory_literals(map: &AtomMap, mu: &Assignment) -> Vec<TheoryLiteral> {
    mu.literals
        .iter()
        .filter_map(|(v, phase)| match map.atom_of(*v)? {
            Atom::Theory(a) => Some(TheoryLiteral::new(a.clone(), *phase)),
            Atom::Bool(_) => None,
        })
        .collect()
}

/// Whether the literals of `mu` are jointly satisfiable in the theory.
pub fn assignment_consistent(map: &AtomMap, mu: &Assignment) -> bool {
    is_consistent(&theory_literals(map, mu))
}

/// Classifies all `2^|alpha|` total assignments over `alpha`, which must
/// cover the atoms of `phi`. Variables are numbered by position in `alpha`.
pub fn brute_ctta(phi: &TFormula, alpha: &[Atom]) -> Result<AssignmentSets, OracleError> {
    brute_ctta_capped(phi, alpha, DEFAULT_ORACLE_CAP)
}

pub fn brute_ctta_capped(
    phi: &TFormula,
    alpha: &[Atom],
    cap: usize,
) -> Result<AssignmentSets, OracleError> {
    let map = AtomMap::from_atoms(alpha.iter().cloned());
    let vars = map.alpha_vars();
    if vars.len() > cap {
        return Err(OracleError::TooManyAtoms(vars.len(), cap));
    }
    let abstraction = map.abstract_formula(phi)?;
    let mut sets = AssignmentSets {
        alpha: vars.clone(),
        ..AssignmentSets::default()
    };
    for bits in 0..(1u64 << vars.len()) {
        let mu = nth_assignment(&vars, bits);
        let consistent = assignment_consistent(&map, &mu);
        let satisfies = abstraction.eval(&|v| mu.get(v).unwrap_or(false));
        match (satisfies, consistent) {
            (true, true) => sets.ctta.push(mu),
            (true, false) => sets.itta.push(mu),
            (false, true) => sets.ctta_neg.push(mu),
            (false, false) => sets.itta_neg.push(mu),
        }
    }
    Ok(sets)
}

/// Union of the atoms of both formulas, in first-occurrence order.
pub fn union_atoms(phi: &TFormula, psi: &TFormula) -> Vec<Atom> {
    let mut atoms = phi.atoms();
    for a in psi.atoms() {
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    atoms
}

/// Brute-force theory equivalence: same consistent models over the union
/// of the atoms.
pub fn brute_t_equiv(phi: &TFormula, psi: &TFormula) -> Result<bool, OracleError> {
    let alpha = union_atoms(phi, psi);
    Ok(brute_ctta(phi, &alpha)?.ctta == brute_ctta(psi, &alpha)?.ctta)
}

/// Brute-force propositional equivalence of the abstractions over the
/// union of the atoms.
pub fn brute_b_equiv(phi: &TFormula, psi: &TFormula) -> Result<bool, OracleError> {
    let map = AtomMap::from_atoms(union_atoms(phi, psi));
    let vars = map.alpha_vars();
    if vars.len() > DEFAULT_ORACLE_CAP {
        return Err(OracleError::TooManyAtoms(vars.len(), DEFAULT_ORACLE_CAP));
    }
    let a = map.abstract_formula(phi)?;
    let b = map.abstract_formula(psi)?;
    Ok((0..(1u64 << vars.len())).all(|bits| {
        let mu = nth_assignment(&vars, bits);
        let value = |v: VarId| mu.get(v).unwrap_or(false);
        a.eval(&value) == b.eval(&value)
    }))
}

/// Checks that `lemmas` rule out `sets.itta`: each inconsistent satisfying
/// assignment, conjoined with the abstractions of all lemmas, must be
/// propositionally unsatisfiable over alpha and the extra atoms of `map`.
/// Without extra atoms this is the requirement that each such assignment
/// falsifies some lemma.
pub fn verify_ruleout(
    lemmas: &[TLemma],
    sets: &AssignmentSets,
    map: &AtomMap,
) -> Result<bool, OracleError> {
    let beta = map.beta_vars();
    if beta.len() > DEFAULT_ORACLE_CAP {
        return Err(OracleError::TooManyAtoms(beta.len(), DEFAULT_ORACLE_CAP));
    }
    let clauses = lemmas
        .iter()
        .map(|l| map.abstract_formula(&l.to_formula()))
        .collect::<Result<Vec<BoolFormula>, _>>()?;
    Ok(sets.itta.iter().all(|rho| {
        (0..(1u64 << beta.len())).all(|ebits| {
            let ext = nth_assignment(&beta, ebits);
            let value = |v: VarId| rho.get(v).or_else(|| ext.get(v)).unwrap_or(false);
            !clauses.iter().all(|c| c.eval(&value))
        })
    }))
}

/// Whether the models of the compiled root are exactly `sets.ctta`.
pub fn verify_compiled(compiler: &Compiler, t: &Tdd, sets: &AssignmentSets) -> bool {
    let mut got = compiler.sat_assignments(t);
    let mut want = sets.ctta.clone();
    got.sort();
    want.sort();
    got == want
}

/// Every lemma must be theory-valid.
pub fn lemmas_valid(lemmas: &[TLemma]) -> bool {
    lemmas.iter().all(TLemma::is_valid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomFormulaConfig {
    pub n_vars: usize,
    pub n_atoms: usize,
    pub depth: usize,
    /// Probability that a generated atom is an equality.
    pub eq_prob: f64,
}

impl Default for RandomFormulaConfig {
    fn default() -> Self {
        RandomFormulaConfig {
            n_vars: 3,
            n_atoms: 4,
            depth: 3,
            eq_prob: 0.3,
        }
    }
}

const VAR_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn random_atom(rng: &mut ChaCha8Rng, cfg: &RandomFormulaConfig) -> Option<TFormula> {
    let n_vars = cfg.n_vars.clamp(1, VAR_NAMES.len());
    let mut lhs = LinearExpr::default();
    for name in VAR_NAMES.iter().take(n_vars) {
        if rng.gen_bool(0.6) {
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                lhs.coeffs
                    .insert(name.to_string(), Rational::from_integer(c.into()));
            }
        }
    }
    if lhs.coeffs.values().all(Zero::is_zero) {
        return None;
    }
    let rhs = LinearExpr::constant(Rational::from_integer(rng.gen_range(-3i64..=3).into()));
    let cmp = if rng.gen_bool(cfg.eq_prob) {
        Comparison::Eq
    } else if rng.gen_bool(0.5) {
        Comparison::Le
    } else {
        Comparison::Lt
    };
    Some(normalize_atom(&lhs, cmp, &rhs).into_formula())
}

/// A seeded random formula over at most `n_atoms` distinct atoms in
/// `n_vars` real variables.
pub fn random_formula(seed: u64, cfg: &RandomFormulaConfig) -> TFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Vec::new();
    let mut seen = BTreeSet::new();
    let mut attempts = 0;
    while pool.len() < cfg.n_atoms.max(1) && attempts < 64 {
        attempts += 1;
        if let Some(f) = random_atom(&mut rng, cfg) {
            let key = f.atoms();
            if !key.is_empty() && seen.insert(key) {
                pool.push(f);
            }
        }
    }
    if pool.is_empty() {
        pool.push(TFormula::True);
    }
    random_tree(&mut rng, &pool, cfg.depth)
}

fn random_tree(rng: &mut ChaCha8Rng, pool: &[TFormula], depth: usize) -> TFormula {
    if depth == 0 || rng.gen_bool(0.25) {
        let leaf = pool[rng.gen_range(0..pool.len())].clone();
        return if rng.gen_bool(0.3) {
            TFormula::not(leaf)
        } else {
            leaf
        };
    }
    let a = random_tree(rng, pool, depth - 1);
    let b = random_tree(rng, pool, depth - 1);
    match rng.gen_range(0..5) {
        0 | 1 => TFormula::and([a, b]),
        2 => TFormula::or([a, b]),
        3 => TFormula::iff(a, b),
        _ => TFormula::not(TFormula::or([a, b])),
    }
}

/// A seeded random Boolean formula over variables `A0..A{n_vars-1}`.
pub fn random_bool_formula(seed: u64, n_vars: u32, depth: usize) -> BoolFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bool_tree(&mut rng, n_vars.max(1), depth)
}

fn random_bool_tree(rng: &mut ChaCha8Rng, n_vars: u32, depth: usize) -> BoolFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        return BoolFormula::lit(VarId(rng.gen_range(0..n_vars)), rng.gen_bool(0.5));
    }
    let a = random_bool_tree(rng, n_vars, depth - 1);
    let b = random_bool_tree(rng, n_vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => BoolFormula::And(vec![a, b]),
        1 => BoolFormula::Or(vec![a, b]),
        2 => BoolFormula::xor(a, b),
        3 => BoolFormula::iff(a, b),
        _ => BoolFormula::implies(a, b),
    }
}
