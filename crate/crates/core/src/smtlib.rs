//! Reader and writer for the QF_LRA subset of SMT-LIB v2.
//!
//! Supported: `set-logic QF_LRA`, `declare-const` and nullary `declare-fun`
//! of sort `Real` or `Bool`, `assert`, and the no-op commands
//! `check-sat`, `exit`, `set-info`, `set-option`, `get-model`. Terms may use
//! `and or not => xor = distinct`, the comparisons `<= < >= > =`, and linear
//! arithmetic built from `+ - *` and `/` by constants over integer, decimal
//! and rational numerals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::formula::{normalize_atom, Comparison, LinearAtom, LinearExpr, Rational, TFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: unsupported construct `{name}`")]
    Unsupported {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: {msg}")]
    Semantic {
        line: usize,
        col: usize,
        msg: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Real,
    Bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

fn unsupported(pos: Pos, name: impl Into<String>) -> ParseError {
    ParseError::Unsupported {
        line: pos.line,
        col: pos.col,
        name: name.into(),
    }
}

fn semantic(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<Sexp>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.chars.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read()?);
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(syntax(start, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(syntax(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(syntax(start, "unexpected `)`")),
            Some('|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated quoted symbol")),
                        Some('|') => return Ok(Sexp::Atom(s, start)),
                        Some(c) => s.push(c),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::from("\"");
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated string literal")),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                s.push('"');
                                return Ok(Sexp::Atom(s, start));
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '|' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

fn parse_numeral(s: &str) -> Option<Rational> {
    if s.is_empty() || !s.chars().next()?.is_ascii_digit() {
        return None;
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let int = BigInt::from_str(int).ok()?;
        let frac_val = BigInt::from_str(frac).ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        Some(Rational::new(int * &scale + frac_val, scale))
    } else if s.chars().all(|c| c.is_ascii_digit()) {
        BigInt::from_str(s).ok().map(Rational::from_integer)
    } else {
        None
    }
}

enum Term {
    Bool(TFormula),
    Real(LinearExpr),
}

/// Declarations collected while reading a script.
#[derive(Debug, Clone, Default)]
pub struct Declarations {
    sorts: BTreeMap<String, Sort>,
    order: Vec<String>,
}

impl Declarations {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, sort: Sort) {
        if self.sorts.insert(name.to_string(), sort).is_none() {
            self.order.push(name.to_string());
        }
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.sorts.get(name).copied()
    }

    /// Declared symbols in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.order.iter().map(move |n| (n.as_str(), self.sorts[n]))
    }

    /// Parses a single Boolean term against these declarations.
    pub fn parse_term(&self, text: &str) -> Result<TFormula, ParseError> {
        let mut lexer = Lexer::new(text);
        let items = lexer.read_all()?;
        match items.as_slice() {
            [single] => self.bool_term(single),
            [] => Err(syntax(Pos { line: 1, col: 1 }, "empty term")),
            [_, second, ..] => Err(syntax(second.pos(), "expected a single term")),
        }
    }

    fn bool_term(&self, s: &Sexp) -> Result<TFormula, ParseError> {
        match self.term(s)? {
            Term::Bool(f) => Ok(f),
            Term::Real(_) => Err(semantic(s.pos(), "expected a Bool term, found Real")),
        }
    }

    fn real_term(&self, s: &Sexp) -> Result<LinearExpr, ParseError> {
        match self.term(s)? {
            Term::Real(e) => Ok(e),
            Term::Bool(_) => Err(semantic(s.pos(), "expected a Real term, found Bool")),
        }
    }

    fn term(&self, s: &Sexp) -> Result<Term, ParseError> {
        match s {
            Sexp::Atom(a, pos) => {
                if a == "true" {
                    return Ok(Term::Bool(TFormula::True));
                }
                if a == "false" {
                    return Ok(Term::Bool(TFormula::False));
                }
                if let Some(r) = parse_numeral(a) {
                    return Ok(Term::Real(LinearExpr::constant(r)));
                }
                if a.starts_with('"') {
                    return Err(unsupported(*pos, "string literal"));
                }
                if a.starts_with("#b") || a.starts_with("#x") {
                    return Err(unsupported(*pos, a.clone()));
                }
                match self.sort_of(a) {
                    Some(Sort::Bool) => Ok(Term::Bool(TFormula::Bool(a.clone()))),
                    Some(Sort::Real) => Ok(Term::Real(LinearExpr::var(a))),
                    None => Err(semantic(*pos, format!("undeclared symbol `{a}`"))),
                }
            }
            Sexp::List(items, pos) => {
                let (head, args) = match items.split_first() {
                    Some((Sexp::Atom(h, _), rest)) => (h.as_str(), rest),
                    Some((other, _)) => return Err(unsupported(other.pos(), "non-symbol head")),
                    None => return Err(syntax(*pos, "empty application")),
                };
                self.application(head, args, *pos)
            }
        }
    }

    fn application(&self, head: &str, args: &[Sexp], pos: Pos) -> Result<Term, ParseError> {
        let need = |n: usize| -> Result<(), ParseError> {
            if args.len() < n {
                Err(syntax(
                    pos,
                    format!("`{head}` expects at least {n} argument(s)"),
                ))
            } else {
                Ok(())
            }
        };
        let bools = || -> Result<Vec<TFormula>, ParseError> {
            args.iter().map(|a| self.bool_term(a)).collect()
        };
        match head {
            "not" => {
                if args.len() != 1 {
                    return Err(syntax(pos, "`not` expects exactly 1 argument"));
                }
                Ok(Term::Bool(TFormula::not(self.bool_term(&args[0])?)))
            }
            "and" => Ok(Term::Bool(TFormula::and(bools()?))),
            "or" => Ok(Term::Bool(TFormula::or(bools()?))),
            "=>" => {
                need(2)?;
                let mut fs = bools()?;
                let mut acc = fs.pop().unwrap();
                while let Some(f) = fs.pop() {
                    acc = TFormula::implies(f, acc);
                }
                Ok(Term::Bool(acc))
            }
            "xor" => {
                need(2)?;
                let mut fs = bools()?.into_iter();
                let first = fs.next().unwrap();
                Ok(Term::Bool(fs.fold(first, TFormula::xor)))
            }
            "=" | "distinct" => {
                need(2)?;
                let terms: Vec<Term> = args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<_, _>>()?;
                let pairs = if head == "=" {
                    (0..terms.len() - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()
                } else {
                    let n = terms.len();
                    (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .collect()
                };
                let mut conj = Vec::new();
                for (i, j) in pairs {
                    let f = match (&terms[i], &terms[j]) {
                        (Term::Bool(a), Term::Bool(b)) => TFormula::iff(a.clone(), b.clone()),
                        (Term::Real(a), Term::Real(b)) => {
                            normalize_atom(a, Comparison::Eq, b).into_formula()
                        }
                        _ => return Err(semantic(args[j].pos(), "sort mismatch in equality")),
                    };
                    conj.push(if head == "=" { f } else { TFormula::not(f) });
                }
                Ok(Term::Bool(TFormula::and(conj)))
            }
            "<=" | "<" | ">=" | ">" => {
                need(2)?;
                let cmp = match head {
                    "<=" => Comparison::Le,
                    "<" => Comparison::Lt,
                    ">=" => Comparison::Ge,
                    _ => Comparison::Gt,
                };
                let exprs: Vec<LinearExpr> = args
                    .iter()
                    .map(|a| self.real_term(a))
                    .collect::<Result<_, _>>()?;
                let conj = exprs
                    .windows(2)
                    .map(|w| normalize_atom(&w[0], cmp, &w[1]).into_formula());
                Ok(Term::Bool(TFormula::and(conj)))
            }
            "+" => {
                need(1)?;
                let mut acc = LinearExpr::default();
                for a in args {
                    acc = acc.plus(&self.real_term(a)?);
                }
                Ok(Term::Real(acc))
            }
            "-" => {
                need(1)?;
                let first = self.real_term(&args[0])?;
                if args.len() == 1 {
                    return Ok(Term::Real(first.negated()));
                }
                let mut acc = first;
                for a in &args[1..] {
                    acc = acc.minus(&self.real_term(a)?);
                }
                Ok(Term::Real(acc))
            }
            "*" => {
                need(2)?;
                let mut factor = Rational::one();
                let mut var_part: Option<LinearExpr> = None;
                for a in args {
                    let e = self.real_term(a)?;
                    if e.is_constant() {
                        factor *= &e.constant;
                    } else if var_part.is_none() {
                        var_part = Some(e);
                    } else {
                        return Err(unsupported(pos, "nonlinear multiplication"));
                    }
                }
                let base = var_part.unwrap_or_else(|| LinearExpr::constant(Rational::one()));
                Ok(Term::Real(base.scale(&factor)))
            }
            "/" => {
                need(2)?;
                let mut acc = self.real_term(&args[0])?;
                for a in &args[1..] {
                    let d = self.real_term(a)?;
                    if !d.is_constant() {
                        return Err(unsupported(a.pos(), "division by a non-constant"));
                    }
                    if d.constant.is_zero() {
                        return Err(semantic(a.pos(), "division by zero"));
                    }
                    acc = acc.scale(&(Rational::one() / d.constant));
                }
                Ok(Term::Real(acc))
            }
            "forall" | "exists" | "let" | "ite" | "!" | "to_real" | "to_int" | "div" | "mod"
            | "abs" | "select" | "store" => Err(unsupported(pos, head)),
            other => match self.sort_of(other) {
                Some(_) => Err(unsupported(pos, format!("application of `{other}`"))),
                None => Err(unsupported(pos, other)),
            },
        }
    }
}

/// A parsed script: the declarations and the conjunction of all asserts.
#[derive(Debug, Clone)]
pub struct Script {
    pub declarations: Declarations,
    pub formula: TFormula,
}

/// Parses an SMT-LIB script into the conjunction of its assertions.
pub fn parse_smtlib(text: &str) -> Result<TFormula, ParseError> {
    parse_script(text).map(|s| s.formula)
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let mut lexer = Lexer::new(text);
    let commands = lexer.read_all()?;
    let mut decls = Declarations::new();
    let mut asserted = Vec::new();
    for cmd in &commands {
        let (items, pos) = match cmd {
            Sexp::List(items, pos) => (items, *pos),
            Sexp::Atom(a, pos) => {
                return Err(syntax(*pos, format!("expected a command, found `{a}`")))
            }
        };
        let name = match items.first() {
            Some(Sexp::Atom(n, _)) => n.as_str(),
            _ => return Err(syntax(pos, "expected a command name")),
        };
        match name {
            "set-logic" => match items.get(1) {
                Some(Sexp::Atom(logic, _)) if logic == "QF_LRA" => {}
                Some(Sexp::Atom(logic, p)) => {
                    return Err(unsupported(*p, format!("logic {logic}")))
                }
                _ => return Err(syntax(pos, "`set-logic` expects a logic name")),
            },
            "declare-const" | "declare-fun" => {
                let (sym, sort_sexp) = match (name, &items[1..]) {
                    ("declare-const", [Sexp::Atom(s, _), sort]) => (s, sort),
                    ("declare-fun", [Sexp::Atom(s, _), Sexp::List(params, ppos), sort]) => {
                        if !params.is_empty() {
                            return Err(unsupported(*ppos, "function symbol with arguments"));
                        }
                        (s, sort)
                    }
                    _ => return Err(syntax(pos, format!("malformed `{name}`"))),
                };
                let sort = match sort_sexp {
                    Sexp::Atom(s, _) if s == "Real" => Sort::Real,
                    Sexp::Atom(s, _) if s == "Bool" => Sort::Bool,
                    Sexp::Atom(s, p) => return Err(unsupported(*p, format!("sort {s}"))),
                    Sexp::List(_, p) => return Err(unsupported(*p, "parametric sort")),
                };
                if decls.sort_of(sym).is_some() {
                    return Err(semantic(pos, format!("symbol `{sym}` declared twice")));
                }
                decls.declare(sym, sort);
            }
            "assert" => {
                if items.len() != 2 {
                    return Err(syntax(pos, "`assert` expects exactly 1 term"));
                }
                asserted.push(decls.bool_term(&items[1])?);
            }
            "check-sat" | "exit" | "set-info" | "set-option" | "get-model" | "get-info" => {}
            other => return Err(unsupported(pos, other)),
        }
    }
    let formula = match asserted.len() {
        0 => TFormula::True,
        1 => asserted.pop().unwrap(),
        _ => TFormula::And(asserted),
    };
    Ok(Script {
        declarations: decls,
        formula,
    })
}

fn rational_to_smt(r: &Rational) -> String {
    let mag = if r.is_integer() {
        r.numer().abs().to_string()
    } else {
        format!("(/ {} {})", r.numer().abs(), r.denom())
    };
    if r.is_negative() {
        format!("(- {mag})")
    } else {
        mag
    }
}

/// SMT-LIB rendering of a normalized atom, e.g. `(<= (+ x (* (- 1) y)) 3)`.
pub fn atom_to_smtlib(atom: &LinearAtom) -> String {
    let terms: Vec<String> = atom
        .coeffs()
        .iter()
        .map(|(v, c)| {
            if c.is_one() {
                v.clone()
            } else {
                format!("(* {} {v})", rational_to_smt(c))
            }
        })
        .collect();
    let lhs = if terms.len() == 1 {
        terms[0].clone()
    } else {
        format!("(+ {})", terms.join(" "))
    };
    format!(
        "({} {lhs} {})",
        atom.relation().symbol(),
        rational_to_smt(atom.constant())
    )
}

/// SMT-LIB rendering of a formula as a single term.
pub struct SmtLib<'a>(pub &'a TFormula);

impl fmt::Display for SmtLib<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nary = |f: &mut fmt::Formatter<'_>, op: &str, fs: &[TFormula]| {
            write!(f, "({op}")?;
            for c in fs {
                write!(f, " {}", SmtLib(c))?;
            }
            write!(f, ")")
        };
        match self.0 {
            TFormula::True => write!(f, "true"),
            TFormula::False => write!(f, "false"),
            TFormula::Theory(a) => write!(f, "{}", atom_to_smtlib(a)),
            TFormula::Bool(p) => write!(f, "{}", quote_symbol(p)),
            TFormula::Not(a) => write!(f, "(not {})", SmtLib(a)),
            TFormula::And(fs) => nary(f, "and", fs),
            TFormula::Or(fs) => nary(f, "or", fs),
            TFormula::Iff(a, b) => write!(f, "(= {} {})", SmtLib(a), SmtLib(b)),
            TFormula::Xor(a, b) => write!(f, "(xor {} {})", SmtLib(a), SmtLib(b)),
            TFormula::Implies(a, b) => write!(f, "(=> {} {})", SmtLib(a), SmtLib(b)),
        }
    }
}

fn quote_symbol(s: &str) -> String {
    let simple = !s.is_empty()
        && !s.chars().next().unwrap().is_ascii_digit()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

/// A complete script declaring every symbol of `phi` and asserting it.
pub fn to_script(phi: &TFormula) -> String {
    let mut out = String::from("(set-logic QF_LRA)\n");
    for v in phi.real_vars() {
        out.push_str(&format!("(declare-const {} Real)\n", quote_symbol(&v)));
    }
    for p in phi.bool_vars() {
        out.push_str(&format!("(declare-const {} Bool)\n", quote_symbol(&p)));
    }
    out.push_str(&format!("(assert {})\n(check-sat)\n", SmtLib(phi)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{NormalizedAtom, Relation};

    const HEADER: &str =
        "(set-logic QF_LRA)(declare-const x Real)(declare-const y Real)(declare-const p Bool)";

    fn parse(body: &str) -> Result<TFormula, ParseError> {
        parse_smtlib(&format!("{HEADER}\n{body}"))
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn le(var: &str, k: i64) -> TFormula {
        normalize_atom(
            &LinearExpr::var(var),
            Comparison::Le,
            &LinearExpr::constant(int(k)),
        )
        .into_formula()
    }

    #[test]
    fn xor_pair_disjunction() {
        let f = parse("(assert (or (<= x 0) (= x 1)))").unwrap();
        let eq = normalize_atom(
            &LinearExpr::var("x"),
            Comparison::Eq,
            &LinearExpr::constant(int(1)),
        )
        .into_formula();
        assert_eq!(f, TFormula::Or(vec![le("x", 0), eq]));
    }

    #[test]
    fn assert_true() {
        assert_eq!(parse("(assert true)").unwrap(), TFormula::True);
        assert_eq!(parse("").unwrap(), TFormula::True);
    }

    #[test]
    fn ge_difference_normalizes() {
        let f = parse("(assert (>= (- y x) 1))").unwrap();
        match f {
            TFormula::Theory(a) => {
                assert_eq!(a.relation(), Relation::Le);
                assert_eq!(a.to_string(), "x - y <= -1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntactic_variants_intern_to_one_atom() {
        let a = parse("(assert (<= x 0))").unwrap();
        let b = parse("(assert (>= 0 x))").unwrap();
        let c = parse("(assert (<= (* 3 x) 0.0))").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn decimals_and_division() {
        let f = parse("(assert (< (* 0.5 x) (/ 3 4)))").unwrap();
        // x/2 < 3/4  <=>  2x < 3
        assert_eq!(f.atoms()[0].to_string(), "x < 3/2");
    }

    #[test]
    fn nonlinear_is_rejected_by_name() {
        let err = parse("(assert (<= (* x y) 0))").unwrap_err();
        assert!(
            matches!(err, ParseError::Unsupported { ref name, .. } if name == "nonlinear multiplication")
        );
    }

    #[test]
    fn quantifier_and_sort_rejected() {
        let err = parse("(assert (forall ((z Real)) (<= z 0)))").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { ref name, .. } if name == "forall"));
        let err = parse_smtlib("(declare-const n Int)").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { ref name, .. } if name == "sort Int"));
        let err = parse_smtlib("(set-logic QF_LIA)").unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_smtlib("(set-logic QF_LRA)\n(assert (<= x 0)").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 2,
                col: 1,
                msg: "unclosed `(`".into()
            }
        );
    }

    #[test]
    fn bool_equality_is_iff() {
        let f = parse("(assert (= p (<= x 0)))").unwrap();
        assert_eq!(f, TFormula::iff(TFormula::Bool("p".into()), le("x", 0)));
    }

    #[test]
    fn constant_comparison_folds() {
        assert_eq!(parse("(assert (<= 3 2))").unwrap(), TFormula::False);
    }

    #[test]
    fn multiple_asserts_conjoin() {
        let f = parse("(assert p)(assert (<= x 0))(check-sat)").unwrap();
        assert_eq!(
            f,
            TFormula::And(vec![TFormula::Bool("p".into()), le("x", 0)])
        );
    }

    #[test]
    fn printed_atom_reparses() {
        let f = parse("(assert (<= (+ (* 2 x) (* (- 1) y)) (- (/ 1 3))))").unwrap();
        let text = to_script(&f);
        assert_eq!(parse_smtlib(&text).unwrap(), f);
        if let NormalizedAtom::Atom { atom, .. } = normalize_atom(
            &LinearExpr::var("x"),
            Comparison::Ge,
            &LinearExpr::constant(int(1)),
        ) {
            assert_eq!(atom_to_smtlib(&atom), "(< x 1)");
        }
    }
}
