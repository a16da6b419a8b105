//! Knowledge compiler from quantifier-free linear rational arithmetic
//! formulas to theory-canonical ordered binary decision diagrams.
//!
//! The pipeline: parse ([`smtlib`]), intern atoms ([`formula`]), enumerate
//! theory lemmas with an AllSMT search ([`allsmt`], backed by [`lra`]),
//! conjoin and quantify in a reduced ordered BDD package ([`bdd`]), and
//! expose the result through [`compiler`]. [`oracle`] holds brute-force
//! ground truth for testing.

pub mod allsmt;
pub mod bdd;
pub mod compiler;
pub mod formula;
pub mod lra;
pub mod oracle;
pub mod smtlib;

pub use allsmt::{check_sat, enumerate, EnumConfig, EnumError, EnumerationResult, Mode, SatStatus};
pub use bdd::{BinOp, DdError, DdManager, DdNode};
pub use compiler::{
    align_atoms, equiv_check, inconsistency_check, validity_check, AtomOrder, CompileError,
    CompileOptions, CompileStats, Compiler, Tdd,
};
pub use formula::{
    normalize_atom, Assignment, Atom, AtomMap, BoolFormula, Comparison, FormulaError, LinearAtom,
    LinearExpr, NormalizedAtom, Rational, Relation, TFormula, VarId,
};
pub use lra::{
    check_conjunction, eliminate_equalities, minimize_core, ConsistencyVerdict, TLemma,
    TheoryLiteral,
};
pub use smtlib::{parse_script, parse_smtlib, ParseError};
