//! Enumeration of total truth assignments with on-demand theory lemmas.
//!
//! The search is a chronological-backtracking DPLL over the Boolean
//! abstraction. Whenever a total assignment satisfies the working formula,
//! its theory literals are checked: an inconsistent assignment yields the
//! negation of a minimized core as a new lemma, a consistent one is
//! recorded and blocked. On return, every theory-inconsistent total
//! assignment over alpha falsifies some emitted lemma.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{
    Assignment, Atom, AtomMap, BoolFormula, FormulaError, Relation, TFormula, VarId,
};
use crate::lra::{
    check_conjunction, eliminate_equalities, ConsistencyVerdict, TLemma, TheoryLiteral,
};

pub const DEFAULT_MAX_ASSIGNMENTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("explored more than {0} total assignments")]
    ResourceLimit(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Lemmas over the atoms of the formula only.
    #[default]
    Direct,
    /// Equalities are split into two inequalities registered as extra
    /// atoms, related to the equality by three defining clauses.
    EqElim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    pub max_assignments: u64,
    /// Stop at the first consistent assignment.
    pub stop_at_first: bool,
    /// Keep the consistent assignments in the result.
    pub keep_models: bool,
    /// Record one trace line per theory conflict.
    pub trace: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
            stop_at_first: false,
            keep_models: false,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct EnumStats {
    /// Total assignments that reached the theory check.
    pub assignments_explored: u64,
    pub theory_checks: u64,
    /// Lemmas learned from theory conflicts.
    pub theory_lemmas: u64,
    /// Defining clauses of extra atoms.
    pub defining_lemmas: u64,
    pub consistent_assignments: u64,
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub status: SatStatus,
    /// Defining clauses first (if any), then theory lemmas in emission
    /// order.
    pub lemmas: Vec<TLemma>,
    /// Consistent assignments restricted to alpha, when requested.
    pub models: Vec<Assignment>,
    pub trace: Vec<String>,
    pub stats: EnumStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit {
    pos: usize,
    value: bool,
}

struct Search<'a> {
    vars: Vec<VarId>,
    pos_of: HashMap<VarId, usize>,
    alpha_len: usize,
    theory: Vec<Option<&'a crate::formula::LinearAtom>>,
    values: Vec<Option<bool>>,
    // (position, decision?)
    trail: Vec<(usize, bool)>,
    clauses: Vec<Vec<Lit>>,
    constraints: Vec<BoolFormula>,
}

enum Step {
    Ok,
    Conflict,
}

impl<'a> Search<'a> {
    fn assign(&mut self, pos: usize, value: bool, decision: bool) {
        self.values[pos] = Some(value);
        self.trail.push((pos, decision));
    }

    fn propagate(&mut self) -> Step {
        loop {
            let mut changed = false;
            for ci in 0..self.clauses.len() {
                let mut unassigned = None;
                let mut n_unassigned = 0;
                let mut satisfied = false;
                for lit in &self.clauses[ci] {
                    match self.values[lit.pos] {
                        Some(v) if v == lit.value => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            n_unassigned += 1;
                            unassigned = Some(*lit);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (n_unassigned, unassigned) {
                    (0, _) => return Step::Conflict,
                    (1, Some(l)) => {
                        self.assign(l.pos, l.value, false);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let values = &self.values;
        let pos_of = &self.pos_of;
        let lookup = |v: VarId| values[pos_of[&v]];
        if self
            .constraints
            .iter()
            .any(|c| c.eval_partial(&lookup) == Some(false))
        {
            return Step::Conflict;
        }
        Step::Ok
    }

    /// Undoes the trail up to the most recent decision and flips it.
    /// Returns false when no decision is left.
    fn backtrack(&mut self) -> bool {
        while let Some((pos, decision)) = self.trail.pop() {
            let value = self.values[pos].take().expect("trail entries are assigned");
            if decision {
                self.assign(pos, !value, false);
                return true;
            }
        }
        false
    }

    fn theory_literals(&self, upto: usize) -> Vec<TheoryLiteral> {
        (0..upto)
            .filter_map(|p| {
                self.theory[p].map(|a| TheoryLiteral::new(a.clone(), self.values[p].unwrap()))
            })
            .collect()
    }

    fn clause_of(&self, lemma: &TLemma, map: &AtomMap) -> Vec<Lit> {
        lemma
            .literals()
            .iter()
            .map(|l| {
                let v = map
                    .var_of(&Atom::Theory(l.atom.clone()))
                    .expect("lemma atoms are registered");
                Lit {
                    pos: self.pos_of[&v],
                    value: l.phase,
                }
            })
            .collect()
    }
}

/// Enumerates the total assignments over alpha (plus the extra atoms in
/// [`Mode::EqElim`]) that propositionally satisfy `phi`, emitting theory
/// lemmas that rule out the inconsistent ones.
///
/// All atoms of `phi` must already be registered in `map`. In `EqElim`
/// mode the extra atoms and their defining clauses are added to `map` and
/// to the working clause set before the search starts.
pub fn enumerate(
    phi: &TFormula,
    map: &mut AtomMap,
    mode: Mode,
    config: &EnumConfig,
) -> Result<EnumerationResult, EnumError> {
    let abstraction = map.abstract_formula(phi)?;
    let defining = match mode {
        Mode::Direct => Vec::new(),
        Mode::EqElim => eliminate_equalities(map).1,
    };
    let map: &AtomMap = map;

    let mut vars = map.alpha_vars();
    let alpha_len = vars.len();
    if mode == Mode::EqElim {
        vars.extend(map.beta_vars());
    }
    let pos_of: HashMap<VarId, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // with equalities eliminated, their extra atoms stand in for them in
    // theory checks
    let theory = vars
        .iter()
        .map(|v| map.atom_of(*v).and_then(Atom::as_theory))
        .map(|a| a.filter(|a| mode == Mode::Direct || a.relation() != Relation::Eq))
        .collect();

    let mut search = Search {
        values: vec![None; vars.len()],
        vars,
        pos_of,
        alpha_len,
        theory,
        trail: Vec::new(),
        clauses: Vec::new(),
        constraints: Vec::new(),
    };
    split_conjuncts(abstraction, &mut search);
    for lemma in &defining {
        let clause = search.clause_of(lemma, map);
        search.clauses.push(clause);
    }

    let mut stats = EnumStats {
        defining_lemmas: defining.len() as u64,
        ..EnumStats::default()
    };
    let mut emitted: BTreeSet<TLemma> = defining.iter().cloned().collect();
    let mut lemmas = defining;
    let mut models = Vec::new();
    let mut trace = Vec::new();
    let n = search.vars.len();

    loop {
        if let Step::Conflict = search.propagate() {
            if !search.backtrack() {
                break;
            }
            continue;
        }
        if let Some(next) = search.values.iter().position(Option::is_none) {
            // decisions in ascending index order, false first
            search.assign(next, false, true);
            continue;
        }

        stats.assignments_explored += 1;
        if stats.assignments_explored > config.max_assignments {
            return Err(EnumError::ResourceLimit(config.max_assignments));
        }
        let checked = if mode == Mode::EqElim {
            n
        } else {
            search.alpha_len
        };
        let lits = search.theory_literals(checked);
        stats.theory_checks += 1;
        match check_conjunction(&lits) {
            ConsistencyVerdict::Inconsistent(core) => {
                let lemma = TLemma::from_core(&core);
                if config.trace {
                    let core_text: Vec<String> = core.iter().map(|l| l.to_string()).collect();
                    trace.push(format!(
                        "conflict core: {} ; lemma: {lemma}",
                        core_text.join(" & ")
                    ));
                }
                let clause = search.clause_of(&lemma, map);
                search.clauses.push(clause);
                if emitted.insert(lemma.clone()) {
                    stats.theory_lemmas += 1;
                    lemmas.push(lemma);
                }
            }
            ConsistencyVerdict::Consistent(_) => {
                stats.consistent_assignments += 1;
                let alpha: Vec<Lit> = (0..search.alpha_len)
                    .map(|p| Lit {
                        pos: p,
                        value: search.values[p].unwrap(),
                    })
                    .collect();
                if config.keep_models {
                    models.push(Assignment::from_pairs(
                        alpha.iter().map(|l| (search.vars[l.pos], l.value)),
                    ));
                }
                if config.stop_at_first {
                    break;
                }
                search.clauses.push(
                    alpha
                        .into_iter()
                        .map(|l| Lit {
                            pos: l.pos,
                            value: !l.value,
                        })
                        .collect(),
                );
            }
        }
        if !search.backtrack() {
            break;
        }
    }

    Ok(EnumerationResult {
        status: if stats.consistent_assignments > 0 {
            SatStatus::Sat
        } else {
            SatStatus::Unsat
        },
        lemmas,
        models,
        trace,
        stats,
    })
}

/// Top-level conjuncts that are clauses go to the clause set (and take part
/// in unit propagation); the rest are checked by partial evaluation.
fn split_conjuncts(f: BoolFormula, search: &mut Search<'_>) {
    fn as_literal(f: &BoolFormula) -> Option<(VarId, bool)> {
        match f {
            BoolFormula::Var(v) => Some((*v, true)),
            BoolFormula::Not(inner) => match inner.as_ref() {
                BoolFormula::Var(v) => Some((*v, false)),
                _ => None,
            },
            _ => None,
        }
    }
    match f {
        BoolFormula::And(fs) => {
            for g in fs {
                split_conjuncts(g, search);
            }
        }
        BoolFormula::Const(true) => {}
        other => {
            let lits: Option<Vec<(VarId, bool)>> = match &other {
                BoolFormula::Or(fs) => fs.iter().map(as_literal).collect(),
                single => as_literal(single).map(|l| vec![l]),
            };
            match lits {
                Some(lits) => {
                    let clause = lits
                        .into_iter()
                        .map(|(v, value)| Lit {
                            pos: search.pos_of[&v],
                            value,
                        })
                        .collect();
                    search.clauses.push(clause);
                }
                None => search.constraints.push(other),
            }
        }
    }
}

/// Satisfiability of `phi` modulo linear rational arithmetic.
pub fn check_sat(phi: &TFormula) -> Result<SatStatus, EnumError> {
    let mut map = AtomMap::from_formula(phi);
    let config = EnumConfig {
        stop_at_first: true,
        ..EnumConfig::default()
    };
    Ok(enumerate(phi, &mut map, Mode::Direct, &config)?.status)
}
