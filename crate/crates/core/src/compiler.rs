//! End-to-end compilation of theory formulas into theory-canonical OBDDs.
//!
//! Compiling `phi` enumerates lemmas that rule out its theory-inconsistent
//! total assignments, conjoins their abstractions with the abstraction of
//! `phi`, and quantifies away the extra atoms. Under a fixed atom order the
//! resulting diagram depends only on the set of consistent total
//! assignments, so theory-equivalent formulas compile to the same node.

use std::time::Instant;

use num_bigint::BigUint;
use thiserror::Error;

use crate::allsmt::{
    enumerate, EnumConfig, EnumError, EnumStats, Mode, SatStatus, DEFAULT_MAX_ASSIGNMENTS,
};
use crate::bdd::{DdError, DdManager, DdNode};
use crate::formula::{Assignment, Atom, AtomMap, FormulaError, TFormula, VarId};
use crate::lra::TLemma;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("atom `{0}` of the formula is missing from the declared order")]
    OrderIncomplete(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Dd(#[from] DdError),
}

impl CompileError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, CompileError::Enumeration(EnumError::ResourceLimit(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AtomOrder {
    /// Atoms in the order they first occur in the formula.
    #[default]
    FirstOccurrence,
    /// An explicit order; it must cover every atom of the formula.
    Declared(Vec<Atom>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    pub order: AtomOrder,
    pub mode: Mode,
    /// Atoms added to alpha beyond those occurring in the formula.
    pub extra_alpha: Vec<Atom>,
    pub max_assignments: u64,
    pub trace: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            order: AtomOrder::FirstOccurrence,
            mode: Mode::Direct,
            extra_alpha: Vec::new(),
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
            trace: false,
        }
    }
}

impl CompileOptions {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// The alpha atoms these options induce for `phi`, in order.
    pub fn alpha_for(&self, phi: &TFormula) -> Result<Vec<Atom>, CompileError> {
        let mut alpha = Vec::new();
        let push = |a: &Atom, alpha: &mut Vec<Atom>| {
            if !alpha.contains(a) {
                alpha.push(a.clone());
            }
        };
        match &self.order {
            AtomOrder::FirstOccurrence => {
                for a in phi.atoms() {
                    push(&a, &mut alpha);
                }
                for a in &self.extra_alpha {
                    push(a, &mut alpha);
                }
            }
            AtomOrder::Declared(order) => {
                for a in order.iter().chain(&self.extra_alpha) {
                    push(a, &mut alpha);
                }
                if let Some(missing) = phi.atoms().into_iter().find(|a| !alpha.contains(a)) {
                    return Err(CompileError::OrderIncomplete(missing.to_string()));
                }
            }
        }
        Ok(alpha)
    }
}

pub const STATS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct CompileStats {
    pub schema_version: u32,
    pub alpha_atoms: usize,
    pub beta_atoms: usize,
    pub theory_lemmas: u64,
    pub defining_lemmas: u64,
    pub assignments_explored: u64,
    pub theory_checks: u64,
    pub bdd_nodes: usize,
    /// Decimal string; counts may exceed 64 bits.
    pub model_count: String,
}

/// A compiled theory decision diagram.
#[derive(Debug, Clone)]
pub struct Tdd {
    /// Root over the alpha variables only.
    pub root: DdNode,
    /// Conjunction of the formula and all lemmas before the extra atoms are
    /// quantified away; equals `root` in direct mode.
    pub unquantified: DdNode,
    /// Alpha variables in manager order.
    pub alpha: Vec<VarId>,
    pub source: TFormula,
    pub lemmas: Vec<TLemma>,
    pub status: SatStatus,
    pub stats: CompileStats,
    pub trace: Vec<String>,
}

impl Tdd {
    pub fn is_false(&self) -> bool {
        self.root.is_false()
    }

    pub fn is_true(&self) -> bool {
        self.root.is_true()
    }
}

/// One compilation pipeline: an atom map and the manager its diagrams
/// live in. Diagrams compiled by one `Compiler` under the same alpha order
/// can be compared by handle.
#[derive(Debug, Default)]
pub struct Compiler {
    map: AtomMap,
    manager: DdManager,
}

impl Compiler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn map(&self) -> &AtomMap {
        &self.map
    }

    pub fn manager(&self) -> &DdManager {
        &self.manager
    }

    pub fn manager_mut(&mut self) -> &mut DdManager {
        &mut self.manager
    }

    /// Registers `atoms` as alpha atoms. New alpha variables are placed
    /// after the existing alpha variables and before every extra variable.
    pub fn register_alpha(&mut self, atoms: &[Atom]) -> Result<Vec<VarId>, CompileError> {
        let mut vars = Vec::with_capacity(atoms.len());
        for a in atoms {
            let v = self.map.intern(a.clone())?;
            if !self.manager.has_var(v) {
                let pos = self
                    .manager
                    .order()
                    .iter()
                    .position(|w| self.map.is_extra(*w))
                    .unwrap_or(self.manager.order().len());
                self.manager.insert_var(v, pos)?;
            }
            vars.push(v);
        }
        Ok(vars)
    }

    fn sync_extra_vars(&mut self) -> Result<(), DdError> {
        for v in self.map.beta_vars() {
            if !self.manager.has_var(v) {
                self.manager.add_var(v)?;
            }
        }
        Ok(())
    }

    /// Alpha variables of the map, in manager order.
    pub fn alpha_vars(&self) -> Vec<VarId> {
        self.manager
            .order()
            .iter()
            .copied()
            .filter(|v| !self.map.is_extra(*v))
            .collect()
    }

    pub fn compile(&mut self, phi: &TFormula, opts: &CompileOptions) -> Result<Tdd, CompileError> {
        let alpha_atoms = opts.alpha_for(phi)?;
        self.register_alpha(&alpha_atoms)?;
        let config = EnumConfig {
            max_assignments: opts.max_assignments,
            trace: opts.trace,
            ..EnumConfig::default()
        };
        let result = enumerate(phi, &mut self.map, opts.mode, &config)?;
        self.sync_extra_vars()?;
        let alpha = self.alpha_vars();

        let (root, unquantified) = if result.status == SatStatus::Unsat {
            let f = self.manager.mk_false();
            (f, f)
        } else {
            let abstraction = self.map.abstract_formula(phi)?;
            let mut acc = self.manager.build(&abstraction)?;
            for lemma in &result.lemmas {
                let clause = self.map.abstract_formula(&lemma.to_formula())?;
                let c = self.manager.build(&clause)?;
                acc = self.manager.and(acc, c)?;
            }
            let root = match opts.mode {
                Mode::Direct => acc,
                Mode::EqElim => self.manager.exists(acc, &self.map.beta_vars())?,
            };
            (root, acc)
        };

        let model_count = self.manager.model_count(root, &alpha)?;
        let stats = compile_stats(
            &self.map,
            &result.stats,
            self.manager.node_count(root),
            &model_count,
        );
        Ok(Tdd {
            root,
            unquantified,
            alpha,
            source: phi.clone(),
            lemmas: result.lemmas,
            status: result.status,
            stats,
            trace: result.trace,
        })
    }

    /// Number of consistent total assignments over alpha satisfying the
    /// source formula.
    pub fn count_models(&self, t: &Tdd) -> BigUint {
        self.manager
            .model_count(t.root, &t.alpha)
            .expect("compiled roots only mention alpha variables")
    }

    pub fn sat_assignments(&self, t: &Tdd) -> Vec<Assignment> {
        self.manager
            .sat_assignments(t.root, &t.alpha)
            .expect("compiled roots only mention alpha variables")
            .collect()
    }

    /// Refines the diagram back into a theory formula, one if-then-else per
    /// node.
    pub fn refine(&self, t: &Tdd) -> TFormula {
        let mut memo = std::collections::HashMap::new();
        self.refine_node(t.root, &mut memo)
    }

    fn refine_node(
        &self,
        f: DdNode,
        memo: &mut std::collections::HashMap<DdNode, TFormula>,
    ) -> TFormula {
        if f.is_true() {
            return TFormula::True;
        }
        if f.is_false() {
            return TFormula::False;
        }
        if let Some(r) = memo.get(&f) {
            return r.clone();
        }
        let v = self.manager.var(f).expect("internal node");
        let atom = self
            .map
            .atom_of(v)
            .expect("registered variable")
            .to_formula();
        let high = self.refine_node(self.manager.high(f).unwrap(), memo);
        let low = self.refine_node(self.manager.low(f).unwrap(), memo);
        let r = TFormula::or([
            TFormula::and([atom.clone(), high]),
            TFormula::and([TFormula::not(atom), low]),
        ]);
        memo.insert(f, r.clone());
        r
    }

    /// DOT text with nodes labeled by their refined atoms.
    pub fn to_dot(&self, t: &Tdd) -> String {
        self.manager.to_dot(t.root, |v| match self.map.atom_of(v) {
            Some(a) => a.to_string(),
            None => v.to_string(),
        })
    }
}

fn compile_stats(map: &AtomMap, e: &EnumStats, nodes: usize, count: &BigUint) -> CompileStats {
    CompileStats {
        schema_version: STATS_SCHEMA_VERSION,
        alpha_atoms: map.alpha_vars().len(),
        beta_atoms: map.beta_vars().len(),
        theory_lemmas: e.theory_lemmas,
        defining_lemmas: e.defining_lemmas,
        assignments_explored: e.assignments_explored,
        theory_checks: e.theory_checks,
        bdd_nodes: nodes,
        model_count: count.to_string(),
    }
}

/// Options whose alpha is the union of the atoms of both formulas, in
/// first-occurrence order (`phi` first).
pub fn align_atoms(phi: &TFormula, other: &TFormula) -> CompileOptions {
    let mut atoms = phi.atoms();
    for a in other.atoms() {
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    CompileOptions {
        order: AtomOrder::Declared(atoms),
        ..CompileOptions::default()
    }
}

/// Decides theory equivalence by compiling both formulas over the union of
/// their atoms and comparing handles.
pub fn equiv_check(phi: &TFormula, other: &TFormula, mode: Mode) -> Result<bool, CompileError> {
    let opts = align_atoms(phi, other).with_mode(mode);
    let mut c = Compiler::new();
    let a = c.compile(phi, &opts)?;
    let b = c.compile(other, &opts)?;
    Ok(a.root == b.root)
}

/// `phi` is T-valid iff its negation compiles to false.
pub fn validity_check(phi: &TFormula) -> Result<bool, CompileError> {
    let neg = TFormula::not(phi.clone());
    let opts = align_atoms(phi, phi);
    Ok(Compiler::new().compile(&neg, &opts)?.is_false())
}

/// `phi` is T-inconsistent iff it compiles to false.
pub fn inconsistency_check(phi: &TFormula) -> Result<bool, CompileError> {
    Ok(Compiler::new()
        .compile(phi, &CompileOptions::default())?
        .is_false())
}

/// Wall-clock helper for callers that report compile time.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::BoolFormula;
    use crate::smtlib::parse_smtlib;

    fn term(text: &str) -> TFormula {
        parse_smtlib(&format!(
            "(declare-const x Real)(declare-const y Real)(declare-const z Real)(assert {text})"
        ))
        .unwrap()
    }

    fn atoms(texts: &[&str]) -> Vec<Atom> {
        texts.iter().flat_map(|t| term(t).atoms()).collect()
    }

    #[test]
    fn xor_pair_compiles_to_xor() {
        let opts = CompileOptions {
            order: AtomOrder::Declared(atoms(&["(<= x 0)", "(= x 1)"])),
            ..CompileOptions::default()
        };
        let mut c = Compiler::new();
        let t1 = c.compile(&term("(or (<= x 0) (= x 1))"), &opts).unwrap();
        let t2 = c
            .compile(&term("(= (not (<= x 0)) (= x 1))"), &opts)
            .unwrap();
        assert_eq!(t1.root, t2.root);
        assert_eq!(c.count_models(&t1), BigUint::from(2u32));
        let xor = c
            .manager_mut()
            .build(&BoolFormula::xor(BoolFormula::var(0), BoolFormula::var(1)))
            .unwrap();
        assert_eq!(t1.root, xor);
    }

    #[test]
    fn unsat_short_circuits_to_false() {
        let mut c = Compiler::new();
        let t = c
            .compile(&term("(and (<= x 0) (>= x 1))"), &CompileOptions::default())
            .unwrap();
        assert!(t.is_false());
        assert_eq!(t.status, SatStatus::Unsat);
        assert_eq!(c.count_models(&t), BigUint::from(0u32));
        assert_eq!(t.alpha.len(), 2);
    }

    #[test]
    fn declared_order_must_cover_formula() {
        let opts = CompileOptions {
            order: AtomOrder::Declared(atoms(&["(<= x 0)"])),
            ..CompileOptions::default()
        };
        let err = Compiler::new()
            .compile(&term("(or (<= x 0) (= x 1))"), &opts)
            .unwrap_err();
        assert_eq!(err, CompileError::OrderIncomplete("x = 1".into()));
    }

    #[test]
    fn align_atoms_union() {
        let psi1 = term("(and (= x 0) (= y 1))");
        let psi2 = term("(and (= x 0) (= y (+ x 1)))");
        let opts = align_atoms(&psi1, &psi2);
        assert_eq!(
            opts.order,
            AtomOrder::Declared(atoms(&["(= x 0)", "(= y 1)", "(= y (+ x 1))"]))
        );
        assert_eq!(
            align_atoms(&psi1, &psi1).order,
            AtomOrder::Declared(psi1.atoms())
        );
        let other = term("(<= z 4)");
        let AtomOrder::Declared(all) = align_atoms(&psi1, &other).order else {
            panic!()
        };
        assert_eq!(all, [psi1.atoms(), other.atoms()].concat());
    }

    #[test]
    fn equivalence_of_negation_fails() {
        let phi = term("(or (<= x 0) (<= y 0))");
        assert!(!equiv_check(&phi, &TFormula::not(phi.clone()), Mode::Direct).unwrap());
        assert!(equiv_check(&phi, &phi, Mode::Direct).unwrap());
    }

    #[test]
    fn validity_and_inconsistency() {
        assert!(validity_check(&TFormula::True).unwrap());
        assert!(validity_check(&term("(or (not (<= x 0)) (not (= x 1)))")).unwrap());
        assert!(!validity_check(&term("(<= x 0)")).unwrap());
        assert!(inconsistency_check(&term("(and (<= x 0) (= x 1))")).unwrap());
        assert!(!inconsistency_check(&term("(<= x 0)")).unwrap());
    }

    #[test]
    fn refinement_is_theory_equivalent() {
        let phi = term("(and (<= x 0) (or (>= x 1) (<= x 2)))");
        let mut c = Compiler::new();
        let t = c.compile(&phi, &CompileOptions::default()).unwrap();
        let back = c.refine(&t);
        assert!(equiv_check(&phi, &back, Mode::Direct).unwrap());
    }

    #[test]
    fn dot_labels_refined_atoms() {
        let mut c = Compiler::new();
        let t = c
            .compile(&term("(<= (- x y) 3)"), &CompileOptions::default())
            .unwrap();
        let dot = c.to_dot(&t);
        assert!(dot.contains("label=\"x - y <= 3\""), "{dot}");
    }
}
