//! Reduced ordered binary decision diagrams.
//!
//! Nodes live in a [`DdManager`] and are hash-consed through its unique
//! table, so two handles from the same manager are equal exactly when they
//! denote the same Boolean function. The variable order is fixed per
//! manager; new variables may be inserted but existing ones never move.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::formula::{Assignment, BoolFormula, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdError {
    #[error("variable {0} is not registered in the manager")]
    UnknownVar(VarId),
    #[error("variable {0} is already registered")]
    DuplicateVar(VarId),
    #[error("node belongs to a different manager")]
    ForeignNode,
    #[error("node variable {0} does not precede its children in the order")]
    OrderViolation(VarId),
    #[error("function depends on variable {0} outside the counting set")]
    SupportExceeds(VarId),
}

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(0);

const FALSE_ID: u32 = 0;
const TRUE_ID: u32 = 1;

/// Handle to a node of a [`DdManager`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DdNode {
    manager: u32,
    id: u32,
}

impl DdNode {
    pub fn is_false(self) -> bool {
        self.id == FALSE_ID
    }

    pub fn is_true(self) -> bool {
        self.id == TRUE_ID
    }

    pub fn is_terminal(self) -> bool {
        self.id <= TRUE_ID
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Iff,
}

impl BinOp {
    /// Result when at least one side is terminal, if it is determined.
    fn terminal_case(self, f: u32, g: u32) -> Option<Result<u32, (u32, bool)>> {
        // Ok(id) is a direct result, Err((id, negate)) asks for id or its negation
        use BinOp::*;
        let t = |x: u32| x == TRUE_ID;
        let fl = |x: u32| x == FALSE_ID;
        match self {
            And if fl(f) || fl(g) => Some(Ok(FALSE_ID)),
            And if t(f) => Some(Ok(g)),
            And if t(g) || f == g => Some(Ok(f)),
            Or if t(f) || t(g) => Some(Ok(TRUE_ID)),
            Or if fl(f) => Some(Ok(g)),
            Or if fl(g) || f == g => Some(Ok(f)),
            Xor if f == g => Some(Ok(FALSE_ID)),
            Xor if fl(f) => Some(Ok(g)),
            Xor if fl(g) => Some(Ok(f)),
            Xor if t(f) => Some(Err((g, true))),
            Xor if t(g) => Some(Err((f, true))),
            Iff if f == g => Some(Ok(TRUE_ID)),
            Iff if t(f) => Some(Ok(g)),
            Iff if t(g) => Some(Ok(f)),
            Iff if fl(f) => Some(Err((g, true))),
            Iff if fl(g) => Some(Err((f, true))),
            _ => None,
        }
    }

    fn commutative_key(self, f: u32, g: u32) -> (BinOp, u32, u32) {
        (self, f.min(g), f.max(g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct NodeData {
    var: VarId,
    low: u32,
    high: u32,
}

/// Owner of all nodes, the unique table and the operation caches.
#[derive(Debug)]
pub struct DdManager {
    id: u32,
    nodes: Vec<NodeData>,
    unique: HashMap<NodeData, u32>,
    apply_cache: HashMap<(BinOp, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
    order: Vec<VarId>,
    level: HashMap<VarId, usize>,
}

impl Default for DdManager {
    fn default() -> Self {
        Self::new()
    }
}

impl DdManager {
    pub fn new() -> Self {
        let sentinel = NodeData {
            var: VarId(u32::MAX),
            low: FALSE_ID,
            high: FALSE_ID,
        };
        DdManager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            nodes: vec![sentinel, sentinel],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
            order: Vec::new(),
            level: HashMap::new(),
        }
    }

    /// Manager whose order is `vars`, first element at the top.
    pub fn with_order(vars: impl IntoIterator<Item = VarId>) -> Result<Self, DdError> {
        let mut m = DdManager::new();
        for v in vars {
            m.add_var(v)?;
        }
        Ok(m)
    }

    /// Appends `v` at the bottom of the order.
    pub fn add_var(&mut self, v: VarId) -> Result<(), DdError> {
        self.insert_var(v, self.order.len())
    }

    /// Inserts `v` at position `pos` of the order. Existing variables keep
    /// their relative order, so all existing nodes stay valid.
    pub fn insert_var(&mut self, v: VarId, pos: usize) -> Result<(), DdError> {
        if self.level.contains_key(&v) {
            return Err(DdError::DuplicateVar(v));
        }
        let pos = pos.min(self.order.len());
        self.order.insert(pos, v);
        for (i, w) in self.order.iter().enumerate().skip(pos) {
            self.level.insert(*w, i);
        }
        Ok(())
    }

    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    pub fn has_var(&self, v: VarId) -> bool {
        self.level.contains_key(&v)
    }

    fn handle(&self, id: u32) -> DdNode {
        DdNode {
            manager: self.id,
            id,
        }
    }

    fn own(&self, f: DdNode) -> Result<u32, DdError> {
        if f.manager == self.id {
            Ok(f.id)
        } else {
            Err(DdError::ForeignNode)
        }
    }

    fn level_of(&self, id: u32) -> usize {
        if id <= TRUE_ID {
            usize::MAX
        } else {
            self.level[&self.nodes[id as usize].var]
        }
    }

    pub fn mk_true(&self) -> DdNode {
        self.handle(TRUE_ID)
    }

    pub fn mk_false(&self) -> DdNode {
        self.handle(FALSE_ID)
    }

    pub fn mk_const(&self, value: bool) -> DdNode {
        if value {
            self.mk_true()
        } else {
            self.mk_false()
        }
    }

    pub fn mk_var(&mut self, v: VarId) -> Result<DdNode, DdError> {
        self.mk_node(v, self.mk_false(), self.mk_true())
    }

    pub fn mk_literal(&mut self, v: VarId, positive: bool) -> Result<DdNode, DdError> {
        if positive {
            self.mk_node(v, self.mk_false(), self.mk_true())
        } else {
            self.mk_node(v, self.mk_true(), self.mk_false())
        }
    }

    /// Hash-consed `if v then high else low`. Fails when `v` does not
    /// precede the children's variables.
    pub fn mk_node(&mut self, v: VarId, low: DdNode, high: DdNode) -> Result<DdNode, DdError> {
        let (low, high) = (self.own(low)?, self.own(high)?);
        let lvl = *self.level.get(&v).ok_or(DdError::UnknownVar(v))?;
        if self.level_of(low) <= lvl || self.level_of(high) <= lvl {
            return Err(DdError::OrderViolation(v));
        }
        {
            let id = self.node(v, low, high);
            Ok(self.handle(id))
        }
    }

    fn node(&mut self, var: VarId, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        let data = NodeData { var, low, high };
        if let Some(&id) = self.unique.get(&data) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(data);
        self.unique.insert(data, id);
        id
    }

    /// Decision variable of an internal node.
    pub fn var(&self, f: DdNode) -> Option<VarId> {
        (f.manager == self.id && !f.is_terminal()).then(|| self.nodes[f.id as usize].var)
    }

    pub fn low(&self, f: DdNode) -> Option<DdNode> {
        (f.manager == self.id && !f.is_terminal())
            .then(|| self.handle(self.nodes[f.id as usize].low))
    }

    pub fn high(&self, f: DdNode) -> Option<DdNode> {
        (f.manager == self.id && !f.is_terminal())
            .then(|| self.handle(self.nodes[f.id as usize].high))
    }

    pub fn apply(&mut self, op: BinOp, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        let (f, g) = (self.own(f)?, self.own(g)?);
        {
            let id = self.apply_rec(op, f, g);
            Ok(self.handle(id))
        }
    }

    pub fn and(&mut self, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        self.apply(BinOp::And, f, g)
    }

    pub fn or(&mut self, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        self.apply(BinOp::Or, f, g)
    }

    pub fn xor(&mut self, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        self.apply(BinOp::Xor, f, g)
    }

    pub fn iff(&mut self, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        self.apply(BinOp::Iff, f, g)
    }

    pub fn implies(&mut self, f: DdNode, g: DdNode) -> Result<DdNode, DdError> {
        let nf = self.negate(f)?;
        self.apply(BinOp::Or, nf, g)
    }

    pub fn negate(&mut self, f: DdNode) -> Result<DdNode, DdError> {
        let f = self.own(f)?;
        {
            let id = self.not_rec(f);
            Ok(self.handle(id))
        }
    }

    fn not_rec(&mut self, f: u32) -> u32 {
        match f {
            FALSE_ID => return TRUE_ID,
            TRUE_ID => return FALSE_ID,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let NodeData { var, low, high } = self.nodes[f as usize];
        let (l, h) = (self.not_rec(low), self.not_rec(high));
        let r = self.node(var, l, h);
        self.not_cache.insert(f, r);
        self.not_cache.insert(r, f);
        r
    }

    fn apply_rec(&mut self, op: BinOp, f: u32, g: u32) -> u32 {
        match op.terminal_case(f, g) {
            Some(Ok(r)) => return r,
            Some(Err((r, _))) => return self.not_rec(r),
            None => {}
        }
        let key = op.commutative_key(f, g);
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let (lf, lg) = (self.level_of(f), self.level_of(g));
        let top = lf.min(lg);
        let var = self.order[top];
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let low = self.apply_rec(op, f0, g0);
        let high = self.apply_rec(op, f1, g1);
        let r = self.node(var, low, high);
        self.apply_cache.insert(key, r);
        r
    }

    fn cofactors(&self, f: u32, level: usize) -> (u32, u32) {
        if self.level_of(f) == level {
            let n = self.nodes[f as usize];
            (n.low, n.high)
        } else {
            (f, f)
        }
    }

    /// Cofactor of `f` with `v` fixed to `value`.
    pub fn restrict(&mut self, f: DdNode, v: VarId, value: bool) -> Result<DdNode, DdError> {
        let f = self.own(f)?;
        let lvl = *self.level.get(&v).ok_or(DdError::UnknownVar(v))?;
        let mut cache = HashMap::new();
        {
            let id = self.restrict_rec(f, lvl, value, &mut cache);
            Ok(self.handle(id))
        }
    }

    fn restrict_rec(
        &mut self,
        f: u32,
        lvl: usize,
        value: bool,
        cache: &mut HashMap<u32, u32>,
    ) -> u32 {
        let fl = self.level_of(f);
        if fl > lvl {
            return f;
        }
        let n = self.nodes[f as usize];
        if fl == lvl {
            return if value { n.high } else { n.low };
        }
        if let Some(&r) = cache.get(&f) {
            return r;
        }
        let low = self.restrict_rec(n.low, lvl, value, cache);
        let high = self.restrict_rec(n.high, lvl, value, cache);
        let r = self.node(n.var, low, high);
        cache.insert(f, r);
        r
    }

    /// Existential quantification of `vars`, computed in one recursive
    /// descent with its own cache.
    pub fn exists(&mut self, f: DdNode, vars: &[VarId]) -> Result<DdNode, DdError> {
        let f = self.own(f)?;
        let mut levels = HashSet::new();
        for v in vars {
            levels.insert(*self.level.get(v).ok_or(DdError::UnknownVar(*v))?);
        }
        let Some(&deepest) = levels.iter().max() else {
            return Ok(self.handle(f));
        };
        let mut cache = HashMap::new();
        {
            let id = self.exists_rec(f, &levels, deepest, &mut cache);
            Ok(self.handle(id))
        }
    }

    fn exists_rec(
        &mut self,
        f: u32,
        levels: &HashSet<usize>,
        deepest: usize,
        cache: &mut HashMap<u32, u32>,
    ) -> u32 {
        let fl = self.level_of(f);
        if fl > deepest {
            return f;
        }
        if let Some(&r) = cache.get(&f) {
            return r;
        }
        let n = self.nodes[f as usize];
        let low = self.exists_rec(n.low, levels, deepest, cache);
        let r = if levels.contains(&fl) {
            if low == TRUE_ID {
                TRUE_ID
            } else {
                let high = self.exists_rec(n.high, levels, deepest, cache);
                self.apply_rec(BinOp::Or, low, high)
            }
        } else {
            let high = self.exists_rec(n.high, levels, deepest, cache);
            self.node(n.var, low, high)
        };
        cache.insert(f, r);
        r
    }

    /// Compiles a Boolean formula bottom-up with `apply`.
    pub fn build(&mut self, psi: &BoolFormula) -> Result<DdNode, DdError> {
        let id = self.build_rec(psi)?;
        Ok(self.handle(id))
    }

    fn build_rec(&mut self, psi: &BoolFormula) -> Result<u32, DdError> {
        Ok(match psi {
            BoolFormula::Const(b) => {
                if *b {
                    TRUE_ID
                } else {
                    FALSE_ID
                }
            }
            BoolFormula::Var(v) => self.mk_var(*v)?.id,
            BoolFormula::Not(f) => {
                let f = self.build_rec(f)?;
                self.not_rec(f)
            }
            BoolFormula::And(fs) => {
                let mut acc = TRUE_ID;
                for f in fs {
                    let g = self.build_rec(f)?;
                    acc = self.apply_rec(BinOp::And, acc, g);
                    if acc == FALSE_ID {
                        break;
                    }
                }
                acc
            }
            BoolFormula::Or(fs) => {
                let mut acc = FALSE_ID;
                for f in fs {
                    let g = self.build_rec(f)?;
                    acc = self.apply_rec(BinOp::Or, acc, g);
                    if acc == TRUE_ID {
                        break;
                    }
                }
                acc
            }
            BoolFormula::Iff(a, b) => {
                let (a, b) = (self.build_rec(a)?, self.build_rec(b)?);
                self.apply_rec(BinOp::Iff, a, b)
            }
            BoolFormula::Xor(a, b) => {
                let (a, b) = (self.build_rec(a)?, self.build_rec(b)?);
                self.apply_rec(BinOp::Xor, a, b)
            }
            BoolFormula::Implies(a, b) => {
                let (a, b) = (self.build_rec(a)?, self.build_rec(b)?);
                let na = self.not_rec(a);
                self.apply_rec(BinOp::Or, na, b)
            }
        })
    }

    fn reachable(&self, f: u32) -> Vec<u32> {
        let mut seen = HashSet::new();
        let mut stack = vec![f];
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if n <= TRUE_ID || !seen.insert(n) {
                continue;
            }
            out.push(n);
            let d = self.nodes[n as usize];
            stack.push(d.high);
            stack.push(d.low);
        }
        out
    }

    /// Number of distinct internal nodes reachable from `f`.
    pub fn node_count(&self, f: DdNode) -> usize {
        if f.manager != self.id {
            return 0;
        }
        self.reachable(f.id).len()
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: DdNode) -> Vec<VarId> {
        if f.manager != self.id {
            return Vec::new();
        }
        let vars: BTreeSet<(usize, VarId)> = self
            .reachable(f.id)
            .into_iter()
            .map(|n| {
                let v = self.nodes[n as usize].var;
                (self.level[&v], v)
            })
            .collect();
        vars.into_iter().map(|(_, v)| v).collect()
    }

    /// `over` sorted by level; fails if `f` depends on anything else.
    fn counting_positions(&self, f: u32, over: &[VarId]) -> Result<Vec<VarId>, DdError> {
        let mut sorted: Vec<(usize, VarId)> = Vec::with_capacity(over.len());
        for v in over {
            let lvl = *self.level.get(v).ok_or(DdError::UnknownVar(*v))?;
            sorted.push((lvl, *v));
        }
        sorted.sort();
        sorted.dedup();
        let set: HashSet<VarId> = over.iter().copied().collect();
        for n in self.reachable(f) {
            let v = self.nodes[n as usize].var;
            if !set.contains(&v) {
                return Err(DdError::SupportExceeds(v));
            }
        }
        Ok(sorted.into_iter().map(|(_, v)| v).collect())
    }

    /// Number of assignments to `over` satisfying `f`.
    pub fn model_count(&self, f: DdNode, over: &[VarId]) -> Result<BigUint, DdError> {
        let f = self.own(f)?;
        let vars = self.counting_positions(f, over)?;
        let pos: HashMap<VarId, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let n = vars.len();
        let position = |id: u32| -> usize {
            if id <= TRUE_ID {
                n
            } else {
                pos[&self.nodes[id as usize].var]
            }
        };
        // count(node) covers the variables from the node's position downwards
        let mut memo: HashMap<u32, BigUint> = HashMap::new();
        memo.insert(FALSE_ID, BigUint::zero());
        memo.insert(TRUE_ID, BigUint::one());
        let mut order = self.reachable(f);
        order.sort_by_key(|&id| std::cmp::Reverse(position(id)));
        for id in order {
            let d = self.nodes[id as usize];
            let p = position(id);
            let part = |child: u32| -> BigUint { &memo[&child] << (position(child) - p - 1) };
            let c = part(d.low) + part(d.high);
            memo.insert(id, c);
        }
        Ok(&memo[&f] << position(f))
    }

    /// Lazily enumerates the total assignments to `over` satisfying `f`, in
    /// lexicographic order (false before true, top of the order first).
    pub fn sat_assignments(
        &self,
        f: DdNode,
        over: &[VarId],
    ) -> Result<SatAssignments<'_>, DdError> {
        let id = self.own(f)?;
        let vars = self.counting_positions(id, over)?;
        Ok(SatAssignments {
            manager: self,
            stack: vec![(id, 0, Vec::new())],
            vars,
        })
    }

    /// Evaluates `f` under a total assignment of its support.
    pub fn eval(&self, f: DdNode, value: impl Fn(VarId) -> bool) -> bool {
        let mut id = f.id;
        while id > TRUE_ID {
            let d = self.nodes[id as usize];
            id = if value(d.var) { d.high } else { d.low };
        }
        id == TRUE_ID
    }

    /// Graphviz rendering: high edges solid, low edges dashed.
    pub fn to_dot(&self, f: DdNode, label: impl Fn(VarId) -> String) -> String {
        let mut out = String::from("digraph bdd {\n");
        let reach = if f.manager == self.id {
            self.reachable(f.id)
        } else {
            Vec::new()
        };
        let mut terminals = BTreeSet::new();
        if f.is_terminal() {
            terminals.insert(f.id);
        }
        for &n in &reach {
            let d = self.nodes[n as usize];
            let text = label(d.var).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  n{n} [shape=box, label=\"{text}\"];");
            for child in [d.low, d.high] {
                if child <= TRUE_ID {
                    terminals.insert(child);
                }
            }
        }
        for t in terminals {
            let text = if t == TRUE_ID { "⊤" } else { "⊥" };
            let _ = writeln!(out, "  n{t} [shape=circle, label=\"{text}\"];");
        }
        for &n in &reach {
            let d = self.nodes[n as usize];
            let _ = writeln!(out, "  n{n} -> n{} [style=solid];", d.high);
            let _ = writeln!(out, "  n{n} -> n{} [style=dashed];", d.low);
        }
        out.push_str("}\n");
        out
    }

    /// Structural audit of the whole node store: every node is reduced,
    /// ordered and unique.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen = HashSet::new();
        for (id, d) in self.nodes.iter().enumerate().skip(2) {
            if d.low == d.high {
                return Err(format!("node {id} is redundant"));
            }
            let lvl = *self
                .level
                .get(&d.var)
                .ok_or_else(|| format!("node {id} uses unknown variable {}", d.var))?;
            if self.level_of(d.low) <= lvl || self.level_of(d.high) <= lvl {
                return Err(format!("node {id} violates the order"));
            }
            if !seen.insert(*d) {
                return Err(format!("node {id} duplicates another node"));
            }
            if self.unique.get(d) != Some(&(id as u32)) {
                return Err(format!("node {id} is missing from the unique table"));
            }
        }
        Ok(())
    }

    /// Total number of internal nodes ever created.
    pub fn allocated(&self) -> usize {
        self.nodes.len() - 2
    }
}

/// Iterator returned by [`DdManager::sat_assignments`].
pub struct SatAssignments<'a> {
    manager: &'a DdManager,
    vars: Vec<VarId>,
    stack: Vec<(u32, usize, Vec<bool>)>,
}

impl Iterator for SatAssignments<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        while let Some((id, pos, values)) = self.stack.pop() {
            if id == FALSE_ID {
                continue;
            }
            if pos == self.vars.len() {
                debug_assert_eq!(id, TRUE_ID);
                return Some(Assignment::from_pairs(
                    self.vars.iter().copied().zip(values),
                ));
            }
            let v = self.vars[pos];
            let (low, high) = if id > TRUE_ID && self.manager.nodes[id as usize].var == v {
                let d = self.manager.nodes[id as usize];
                (d.low, d.high)
            } else {
                (id, id)
            };
            let mut hv = values.clone();
            hv.push(true);
            self.stack.push((high, pos + 1, hv));
            let mut lv = values;
            lv.push(false);
            self.stack.push((low, pos + 1, lv));
        }
        None
    }
}
