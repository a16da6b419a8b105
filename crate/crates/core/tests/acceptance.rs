//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tddc_core::oracle::{
    brute_b_equiv, brute_ctta, random_bool_formula, random_formula, verify_compiled,
    verify_ruleout, RandomFormulaConfig,
};
use tddc_core::{
    align_atoms, equiv_check, parse_smtlib, AtomMap, AtomOrder, BoolFormula, CompileOptions,
    Compiler, DdManager, Mode, TFormula, TLemma, TheoryLiteral, VarId,
};

const RANDOM_INSTANCES: u64 = 500;
const BOOL_PAIRS: u64 = 500;
const EXISTS_PAIRS: u64 = 200;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn term(text: &str) -> TFormula {
    parse_smtlib(&format!(
        "(declare-const x Real)(declare-const y Real)(declare-const z Real)(assert {text})"
    ))
    .unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn atoms(texts: &[&str]) -> Vec<tddc_core::Atom> {
    texts.iter().flat_map(|t| term(t).atoms()).collect()
}

fn declared(texts: &[&str], mode: Mode) -> CompileOptions {
    CompileOptions {
        order: AtomOrder::Declared(atoms(texts)),
        mode,
        ..CompileOptions::default()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig2_shape(dot: &str) -> Outcome {
    let mut boxes = BTreeMap::new();
    let mut circles = BTreeMap::new();
    let mut edges: BTreeMap<(String, &str), String> = BTreeMap::new();
    for line in dot.lines().map(str::trim) {
        let Some((head, attrs)) = line.split_once(" [") else {
            continue;
        };
        let label = attrs
            .split("label=\"")
            .nth(1)
            .and_then(|s| s.split('"').next())
            .map(str::to_string);
        if let Some((from, to)) = head.split_once(" -> ") {
            let style = if attrs.contains("solid") {
                "high"
            } else {
                "low"
            };
            edges.insert((from.to_string(), style), to.to_string());
        } else if attrs.contains("shape=box") {
            boxes.insert(head.to_string(), label.unwrap_or_default());
        } else if attrs.contains("shape=circle") {
            circles.insert(head.to_string(), label.unwrap_or_default());
        }
    }
    ensure(boxes.len() == 3, || format!("{} boxes", boxes.len()))?;
    let root = boxes
        .iter()
        .find(|(_, l)| l.as_str() == "x <= 0")
        .map(|(n, _)| n.clone())
        .ok_or("no x <= 0 node")?;
    let hi = &edges[&(root.clone(), "high")];
    let lo = &edges[&(root.clone(), "low")];
    ensure(hi != lo, || "root children coincide".into())?;
    for (child, high_to) in [(hi, "⊥"), (lo, "⊤")] {
        ensure(
            boxes.get(child).map(String::as_str) == Some("x = 1"),
            || format!("{child} is not an x = 1 node"),
        )?;
        let h = &circles[&edges[&(child.clone(), "high")]];
        let l = &circles[&edges[&(child.clone(), "low")]];
        ensure(h == high_to && l != high_to, || {
            format!("{child}: high -> {h}, low -> {l}")
        })?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let phi1 = term("(or (<= x 0) (= x 1))");
    let phi2 = term("(= (not (<= x 0)) (= x 1))");
    let order = ["(<= x 0)", "(= x 1)"];
    let mut c = Compiler::new();
    let mut roots = Vec::new();
    for mode in [Mode::Direct, Mode::EqElim] {
        for phi in [&phi1, &phi2] {
            roots.push(
                c.compile(phi, &declared(&order, mode))
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    let first = &roots[0];
    ensure(roots.iter().all(|t| t.root == first.root), || {
        "handles differ across formulas or modes".into()
    })?;
    ensure(c.count_models(first) == BigUint::from(2u32), || {
        format!("model count {}", c.count_models(first))
    })?;
    ensure(c.manager().node_count(first.root) == 3, || {
        format!("{} internal nodes", c.manager().node_count(first.root))
    })?;
    fig2_shape(&c.to_dot(first))
}

fn criterion_2() -> Outcome {
    let phi1 = term("(or (<= x 0) (= x 1))");
    let mut c = Compiler::new();
    let t = c
        .compile(&phi1, &declared(&["(<= x 0)", "(= x 1)"], Mode::EqElim))
        .map_err(|e| e.to_string())?;
    let order = c.manager().order().to_vec();
    ensure(order == [VarId(0), VarId(1), VarId(2), VarId(3)], || {
        format!("order {order:?}")
    })?;
    let (a1, a2) = (BoolFormula::var(0), BoolFormula::var(1));
    let xor = BoolFormula::Or(vec![
        BoolFormula::And(vec![a1.clone(), BoolFormula::not(a2.clone())]),
        BoolFormula::And(vec![BoolFormula::not(a1), a2]),
    ]);
    let target = c.manager_mut().build(&xor).map_err(|e| e.to_string())?;
    ensure(t.unquantified != target, || {
        "pre-quantification equals target".into()
    })?;
    let beta = c.map().beta_vars();
    ensure(beta == [VarId(2), VarId(3)], || format!("beta {beta:?}"))?;
    let q = c
        .manager_mut()
        .exists(t.unquantified, &beta)
        .map_err(|e| e.to_string())?;
    ensure(q == target && t.root == target, || {
        "quantified result differs".into()
    })?;
    let n = c.manager().node_count(t.unquantified);
    ensure(n == 7, || format!("{n} pre-quantification nodes"))
}

fn criterion_3() -> Outcome {
    let phi = term("(and (<= x 0) (or (>= x 1) (<= x 2)))");
    let order = ["(<= x 0)", "(>= x 1)", "(<= x 2)"];
    let mut c = Compiler::new();
    let t = c
        .compile(&phi, &declared(&order, Mode::Direct))
        .map_err(|e| e.to_string())?;
    // A1 & !A2 & A3 with A2 standing for (x >= 1)
    let expected = term("(and (<= x 0) (not (>= x 1)) (<= x 2))");
    let abs = c
        .map()
        .abstract_formula(&expected)
        .map_err(|e| e.to_string())?;
    let target = c.manager_mut().build(&abs).map_err(|e| e.to_string())?;
    ensure(t.root == target, || {
        "root differs from A1 & !A2 & A3".into()
    })?;
    let n = c.manager().node_count(t.root);
    ensure(n == 3, || format!("{n} internal nodes"))?;
    ensure(t.lemmas.len() == 1, || format!("{} lemmas", t.lemmas.len()))?;
    let core: Vec<TheoryLiteral> = atoms(&["(<= x 0)", "(>= x 1)"])
        .into_iter()
        .zip([true, false])
        .map(|(a, phase)| TheoryLiteral::new(a.as_theory().unwrap().clone(), phase))
        .collect();
    let core_negation = TLemma::from_core(&core);
    // (x >= 1) normalizes to !(x < 1), so the core {(x <= 0), (x >= 1)} is
    // {(x <= 0) true, (x < 1) false} and its lemma negates both
    ensure(t.lemmas[0] == core_negation, || {
        format!("lemma {}", t.lemmas[0])
    })
}

fn criterion_4() -> Outcome {
    let phi_a = term("(= (<= x y) (<= y z))");
    let phi_b = term("(and (= (<= x y) (<= y z)) (or (not (<= x y)) (<= x z) (not (<= y z))))");
    let alpha = atoms(&["(<= x y)", "(<= x z)", "(<= y z)"]);
    let opts = CompileOptions {
        order: AtomOrder::Declared(alpha),
        ..CompileOptions::default()
    };
    let mut c = Compiler::new();
    let a = c.compile(&phi_a, &opts).map_err(|e| e.to_string())?;
    let b = c.compile(&phi_b, &opts).map_err(|e| e.to_string())?;
    ensure(a.root == b.root, || "handles differ".into())?;
    ensure(
        equiv_check(&phi_a, &phi_b, Mode::Direct).map_err(|e| e.to_string())?,
        || "equiv_check returned false".into(),
    )
}

fn criterion_5() -> Outcome {
    let phi = term("(and (<= (- x z) (- 3)) (<= (- y x) 2) (<= (- z y) (- 1)))");
    for mode in [Mode::Direct, Mode::EqElim] {
        let t = Compiler::new()
            .compile(&phi, &CompileOptions::default().with_mode(mode))
            .map_err(|e| e.to_string())?;
        ensure(t.is_false(), || format!("{mode:?}: not the false node"))?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let phi3 = term("(and (or (<= x 0) (not (<= x 0))) (or (= x 1) (not (= x 1))))");
    let phi4 = term("(or (not (<= x 0)) (not (= x 1)))");
    let order = ["(<= x 0)", "(= x 1)"];
    let mut failures = Vec::new();
    for mode in [Mode::Direct, Mode::EqElim] {
        let opts = declared(&order, mode);
        let mut c = Compiler::new();
        for (name, phi) in [("phi3", &phi3), ("phi4", &phi4)] {
            let t = c.compile(phi, &opts).map_err(|e| e.to_string())?;
            if !t.is_true() {
                failures.push(format!(
                    "{name} {mode:?}: {} models, not the true node",
                    c.count_models(&t)
                ));
            }
            let n = c
                .compile(&TFormula::not(phi.clone()), &opts)
                .map_err(|e| e.to_string())?;
            if !n.is_false() {
                failures.push(format!("!{name} {mode:?}: not the false node"));
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))
}

fn random_cfg() -> RandomFormulaConfig {
    RandomFormulaConfig {
        n_vars: 4,
        n_atoms: 6,
        depth: 4,
        eq_prob: 0.3,
    }
}

fn property_instance(seed: u64) -> Outcome {
    let phi = random_formula(seed, &random_cfg());
    let alpha = phi.atoms();
    let sets = brute_ctta(&phi, &alpha).map_err(|e| e.to_string())?;
    let opts_for = |mode| CompileOptions {
        order: AtomOrder::Declared(alpha.clone()),
        mode,
        ..CompileOptions::default()
    };

    let mut c = Compiler::new();
    let direct = c
        .compile(&phi, &opts_for(Mode::Direct))
        .map_err(|e| e.to_string())?;
    let eq = c
        .compile(&phi, &opts_for(Mode::EqElim))
        .map_err(|e| e.to_string())?;

    ensure(verify_compiled(&c, &direct, &sets), || {
        "(a) models differ from CTTA".into()
    })?;
    ensure(
        c.count_models(&direct) == BigUint::from(sets.ctta.len()),
        || "(c) model count differs from |CTTA|".into(),
    )?;
    ensure(direct.root == eq.root, || {
        "(d) direct and eq-elim differ".into()
    })?;

    let direct_map = AtomMap::from_atoms(alpha.clone());
    ensure(
        verify_ruleout(&direct.lemmas, &sets, &direct_map).map_err(|e| e.to_string())?,
        || "(b) direct lemmas do not rule out ITTA".into(),
    )?;
    ensure(
        verify_ruleout(&eq.lemmas, &sets, c.map()).map_err(|e| e.to_string())?,
        || "(b) eq-elim lemmas do not rule out ITTA".into(),
    )?;

    let pool: Vec<&TLemma> = direct.lemmas.iter().chain(&eq.lemmas).collect();
    if !pool.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let lemma = pool[rng.gen_range(0..pool.len())];
        ensure(lemma.is_valid(), || format!("(e) lemma {lemma} not valid"))?;
        let with = TFormula::and([phi.clone(), lemma.to_formula()]);
        let opts = align_atoms(&phi, &with);
        let mut c2 = Compiler::new();
        let a = c2.compile(&phi, &opts).map_err(|e| e.to_string())?;
        let b = c2.compile(&with, &opts).map_err(|e| e.to_string())?;
        ensure(a.root == b.root, || {
            format!("(e) conjoining {lemma} changes the result")
        })?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    for seed in 0..RANDOM_INSTANCES {
        property_instance(seed).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}

fn proposition_pair(phi: &TFormula, psi: &TFormula) -> Outcome {
    let alpha = tddc_core::oracle::union_atoms(phi, psi);
    let a = brute_ctta(phi, &alpha).map_err(|e| e.to_string())?;
    let b = brute_ctta(psi, &alpha).map_err(|e| e.to_string())?;
    let t_equiv = equiv_check(phi, psi, Mode::Direct).map_err(|e| e.to_string())?;
    ensure(t_equiv == (a.ctta == b.ctta), || {
        "T-equivalence disagrees with CTTA".into()
    })?;
    let b_equiv = brute_b_equiv(phi, psi).map_err(|e| e.to_string())?;
    ensure(b_equiv == (a.ctta == b.ctta && a.itta == b.itta), || {
        "B-equivalence disagrees with CTTA and ITTA".into()
    })
}

fn criterion_8() -> Outcome {
    for seed in 0..RANDOM_INSTANCES {
        let phi = random_formula(seed, &random_cfg());
        let sets = brute_ctta(&phi, &phi.atoms()).map_err(|e| e.to_string())?;
        let mut all: Vec<_> = [&sets.ctta, &sets.itta, &sets.ctta_neg, &sets.itta_neg]
            .into_iter()
            .flatten()
            .collect();
        let n = all.len();
        all.sort();
        all.dedup();
        ensure(n == all.len() && n == 1usize << sets.alpha.len(), || {
            format!("seed {seed}: sets do not partition the assignments")
        })?;

        // another formula over the same atom pool, a theory-equivalent
        // rewrite, and a refinement of the compiled diagram
        let other = random_formula(
            seed,
            &RandomFormulaConfig {
                depth: 3,
                ..random_cfg()
            },
        );
        let mut c = Compiler::new();
        let t = c
            .compile(&phi, &CompileOptions::default())
            .map_err(|e| e.to_string())?;
        let refined = c.refine(&t);
        let rewrite = TFormula::not(TFormula::not(phi.clone()));
        for psi in [&other, &refined, &rewrite] {
            proposition_pair(&phi, psi).map_err(|e| format!("seed {seed}: {e}"))?;
        }
    }
    Ok(())
}

fn truth_table(f: &BoolFormula, n: u32) -> Vec<bool> {
    (0..1u32 << n)
        .map(|bits| f.eval(&|v: VarId| bits >> v.0 & 1 == 1))
        .collect()
}

fn equivalent_rewrite(f: &BoolFormula, rng: &mut ChaCha8Rng, n: u32) -> BoolFormula {
    let v = BoolFormula::var(rng.gen_range(0..n));
    match rng.gen_range(0..3) {
        0 => BoolFormula::not(BoolFormula::not(f.clone())),
        1 => BoolFormula::Or(vec![
            BoolFormula::And(vec![v.clone(), f.clone()]),
            BoolFormula::And(vec![BoolFormula::not(v), f.clone()]),
        ]),
        _ => BoolFormula::xor(BoolFormula::xor(f.clone(), v.clone()), v),
    }
}

fn criterion_9() -> Outcome {
    let mut m = DdManager::new();
    for v in 0..6 {
        m.add_var(VarId(v)).map_err(|e| e.to_string())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..BOOL_PAIRS {
        let n = rng.gen_range(2..=6);
        let f = random_bool_formula(2 * i, n, 4);
        let g = if i % 2 == 0 {
            equivalent_rewrite(&f, &mut rng, n)
        } else {
            random_bool_formula(2 * i + 1, n, rng.gen_range(1..=4))
        };
        let same_table = truth_table(&f, 6) == truth_table(&g, 6);
        let a = m.build(&f).map_err(|e| e.to_string())?;
        let b = m.build(&g).map_err(|e| e.to_string())?;
        ensure((a == b) == same_table, || {
            format!("pair {i}: handle/table mismatch")
        })?;
    }
    for i in 0..EXISTS_PAIRS {
        let f = random_bool_formula(10_000 + i, 6, 5);
        let v = VarId(rng.gen_range(0..6));
        let a = m.build(&f).map_err(|e| e.to_string())?;
        let q = m.exists(a, &[v]).map_err(|e| e.to_string())?;
        let lo = m.restrict(a, v, false).map_err(|e| e.to_string())?;
        let hi = m.restrict(a, v, true).map_err(|e| e.to_string())?;
        let cof = m.or(lo, hi).map_err(|e| e.to_string())?;
        ensure(q == cof, || {
            format!("exists pair {i}: differs from cofactor disjunction")
        })?;
        for bits in 0..1u32 << 6 {
            let at = |b: u32| move |w: VarId| if w == v { b == 1 } else { bits >> w.0 & 1 == 1 };
            let want = f.eval(&at(0)) || f.eval(&at(1));
            ensure(m.eval(q, |w| bits >> w.0 & 1 == 1) == want, || {
                format!("exists pair {i}: wrong value at {bits:06b}")
            })?;
        }
    }
    m.audit()
}

fn criterion_10() -> Outcome {
    let psi1 = term("(and (= x 0) (= y 1))");
    let psi2 = term("(and (= x 0) (= y (+ x 1)))");
    let both = term("(and (= x 0) (= y 1) (= y (+ x 1)))");
    ensure(
        equiv_check(&psi1, &psi2, Mode::Direct).map_err(|e| e.to_string())?,
        || "equiv_check returned false".into(),
    )?;
    let opts = align_atoms(&psi1, &psi2);
    for mode in [Mode::Direct, Mode::EqElim] {
        let opts = opts.clone().with_mode(mode);
        let mut c = Compiler::new();
        let a = c.compile(&psi1, &opts).map_err(|e| e.to_string())?;
        let b = c.compile(&psi2, &opts).map_err(|e| e.to_string())?;
        let j = c.compile(&both, &opts).map_err(|e| e.to_string())?;
        ensure(a.root == b.root && b.root == j.root, || {
            format!("{mode:?}: handles differ")
        })?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 xor-pair golden", criterion_1, Duration::from_secs(1)),
        (
            "2 quantified extra atoms golden",
            criterion_2,
            Duration::from_secs(1),
        ),
        ("3 single-lemma golden", criterion_3, Duration::from_secs(1)),
        (
            "4 difference-logic equivalence",
            criterion_4,
            Duration::from_secs(1),
        ),
        ("5 inconsistent cycle", criterion_5, Duration::from_secs(1)),
        ("6 semicanonicity", criterion_6, Duration::from_secs(1)),
        (
            "7 canonicity properties",
            criterion_7,
            Duration::from_secs(300),
        ),
        (
            "8 assignment-set properties",
            criterion_8,
            Duration::from_secs(120),
        ),
        ("9 bdd canonicity", criterion_9, Duration::from_secs(60)),
        ("10 union-atom golden", criterion_10, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= limit, || {
                format!("took {elapsed:.2?}, limit {limit:?}")
            })
        });
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({elapsed:.2?})"),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
