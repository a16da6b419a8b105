use proptest::prelude::*;
use tddc_core::lra::check_conjunction;
use tddc_core::oracle::{
    brute_b_equiv, brute_ctta, random_bool_formula, random_formula, verify_ruleout,
    RandomFormulaConfig,
};
use tddc_core::{
    align_atoms, check_sat, enumerate, AtomMap, AtomOrder, BoolFormula, CompileOptions, Compiler,
    ConsistencyVerdict, DdManager, EnumConfig, Mode, SatStatus, TFormula, TheoryLiteral, VarId,
};

fn cfg() -> RandomFormulaConfig {
    RandomFormulaConfig {
        n_vars: 4,
        n_atoms: 5,
        depth: 4,
        eq_prob: 0.3,
    }
}

fn declared(phi: &TFormula, mode: Mode) -> CompileOptions {
    CompileOptions {
        order: AtomOrder::Declared(phi.atoms()),
        mode,
        ..CompileOptions::default()
    }
}

fn disjunction(models: &[tddc_core::Assignment]) -> BoolFormula {
    BoolFormula::Or(models.iter().map(|m| m.to_formula()).collect())
}

/// De Morgan and double-negation rewrites that keep the abstraction's
/// truth table.
fn massage(phi: &TFormula) -> TFormula {
    match phi {
        TFormula::And(cs) => {
            TFormula::not(TFormula::or(cs.iter().map(|c| TFormula::not(massage(c)))))
        }
        TFormula::Or(cs) => {
            TFormula::not(TFormula::and(cs.iter().map(|c| TFormula::not(massage(c)))))
        }
        TFormula::Not(c) => TFormula::not(massage(c)),
        TFormula::Iff(a, b) => TFormula::not(TFormula::xor(massage(a), massage(b))),
        other => TFormula::not(TFormula::not(other.clone())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_lemmas_rule_out_and_are_valid(seed in any::<u64>()) {
        let phi = random_formula(seed, &cfg());
        let mut map = AtomMap::from_formula(&phi);
        let r = enumerate(&phi, &mut map, Mode::Direct, &EnumConfig::default()).unwrap();
        let sets = brute_ctta(&phi, &phi.atoms()).unwrap();
        prop_assert!(verify_ruleout(&r.lemmas, &sets, &map).unwrap());
        prop_assert!(r.lemmas.iter().all(|l| l.is_valid()));
        let status = if sets.ctta.is_empty() { SatStatus::Unsat } else { SatStatus::Sat };
        prop_assert_eq!(r.status, status);
    }

    #[test]
    fn eq_elim_lemmas_keep_consistent_models(seed in any::<u64>()) {
        let phi = random_formula(seed, &cfg());
        let mut map = AtomMap::from_formula(&phi);
        let r = enumerate(&phi, &mut map, Mode::EqElim, &EnumConfig::default()).unwrap();
        let sets = brute_ctta(&phi, &phi.atoms()).unwrap();
        prop_assert!(verify_ruleout(&r.lemmas, &sets, &map).unwrap());
        prop_assert!(r.lemmas.iter().all(|l| l.is_valid()));
        for eta in &sets.ctta {
            let lits: Vec<TheoryLiteral> = eta
                .literals
                .iter()
                .filter_map(|(v, p)| {
                    map.atom_of(*v)?.as_theory().map(|a| TheoryLiteral::new(a.clone(), *p))
                })
                .collect();
            let ConsistencyVerdict::Consistent(point) = check_conjunction(&lits) else {
                panic!("ctta member is inconsistent");
            };
            // extend eta to the extra atoms by their value at a witness
            let value = |v: VarId| match eta.get(v) {
                Some(b) => b,
                None => map.atom_of(v).unwrap().as_theory().unwrap().eval(&point),
            };
            for lemma in &r.lemmas {
                let clause = map.abstract_formula(&lemma.to_formula()).unwrap();
                prop_assert!(clause.eval(&value), "{} falsified", lemma);
            }
        }
    }

    #[test]
    fn modes_agree_on_status(seed in any::<u64>()) {
        let phi = random_formula(seed, &cfg());
        let mut m1 = AtomMap::from_formula(&phi);
        let mut m2 = AtomMap::from_formula(&phi);
        let config = EnumConfig::default();
        let a = enumerate(&phi, &mut m1, Mode::Direct, &config).unwrap().status;
        let b = enumerate(&phi, &mut m2, Mode::EqElim, &config).unwrap().status;
        prop_assert_eq!(a, b);
        prop_assert_eq!(check_sat(&phi).unwrap(), a);
    }

    #[test]
    fn compiled_diagram_is_consistent_model_disjunction(seed in any::<u64>()) {
        let phi = random_formula(seed, &cfg());
        let sets = brute_ctta(&phi, &phi.atoms()).unwrap();
        let target_formula = disjunction(&sets.ctta);
        for mode in [Mode::Direct, Mode::EqElim] {
            let mut c = Compiler::new();
            let t = c.compile(&phi, &declared(&phi, mode)).unwrap();
            let target = c.manager_mut().build(&target_formula).unwrap();
            prop_assert_eq!(t.root, target);
            if mode == Mode::Direct {
                prop_assert_eq!(t.unquantified, target);
            }
            c.manager().audit().unwrap();
        }
    }

    #[test]
    fn equivalent_rewrites_compile_identically(seed in any::<u64>()) {
        let phi = random_formula(seed, &cfg());
        let psi = massage(&phi);
        prop_assert!(brute_b_equiv(&phi, &psi).unwrap());
        let opts = align_atoms(&phi, &psi);
        let mut c = Compiler::new();
        let a = c.compile(&phi, &opts).unwrap();
        let b = c.compile(&psi, &opts).unwrap();
        prop_assert_eq!(a.root, b.root);
    }

    #[test]
    fn handles_differ_iff_consistent_models_differ(s1 in any::<u64>(), depth in 1usize..4) {
        let phi = random_formula(s1, &cfg());
        let psi = random_formula(s1, &RandomFormulaConfig { depth, ..cfg() });
        let opts = align_atoms(&phi, &psi);
        let AtomOrder::Declared(alpha) = &opts.order else { unreachable!() };
        let same = brute_ctta(&phi, alpha).unwrap().ctta == brute_ctta(&psi, alpha).unwrap().ctta;
        let mut c = Compiler::new();
        let a = c.compile(&phi, &opts).unwrap();
        let b = c.compile(&psi, &opts).unwrap();
        prop_assert_eq!(a.root == b.root, same);
    }

    #[test]
    fn exists_composes(seed in any::<u64>(), split in 1usize..5) {
        let f = random_bool_formula(seed, 6, 5);
        let mut m = DdManager::with_order((0..6).map(VarId)).unwrap();
        let a = m.build(&f).unwrap();
        let vars: Vec<VarId> = (0..6).filter(|i| (seed >> i) & 1 == 1).map(VarId).collect();
        let (s, t) = vars.split_at(split.min(vars.len()));
        let all = m.exists(a, &vars).unwrap();
        let inner = m.exists(a, s).unwrap();
        let staged = m.exists(inner, t).unwrap();
        prop_assert_eq!(all, staged);
        m.audit().unwrap();
    }
}
