use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::boolfn::Bdd;
use crate::gen::agent_names;
use crate::kripke::build_kripke;
use crate::lang::{parse_formula, parse_model, Fragment};
use crate::testutil::*;

fn pf(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

/// Satisfiability of DIMACS text through an external solver; returns a
/// model as signed literals when satisfiable.
pub(crate) fn solve_dimacs(text: &str) -> Option<Vec<i32>> {
    let mut solver = varisat::Solver::new();
    solver.add_dimacs_cnf(text.as_bytes()).unwrap();
    if solver.solve().unwrap() {
        Some(solver.model().unwrap().iter().map(|l| l.to_dimacs() as i32).collect())
    } else {
        None
    }
}

#[test]
fn f0_truth_sets() {
    let ks = f0();
    let e = ks.engine();
    let p = e.var(ks.var("p").unwrap()).unwrap();
    let ts = truth_set(&ks, &pf("K[1] q")).unwrap();
    assert!(e.equiv_under(ks.theta(), ts.set, p));
    assert!(!realized(&ks, &pf("K[1] q")).unwrap());
    assert!(realized(&ks, &pf("q -> K[2] q")).unwrap());
    assert!(realized(&ks, &pf("p -> q")).unwrap());
    let pq = ks.state_from_names(&["p", "q"]).unwrap();
    assert!(scenario_check(&ks, &pq, &pf("K[1] q")).unwrap());
    assert!(scenario_check(&ks, &pq, &Formula::True).unwrap());
    let cex = counterexample(&ks, &pf("K[1] q")).unwrap().unwrap();
    assert_eq!(ks.state_names(&cex), ["q"]);
    assert!(counterexample(&ks, &pf("q -> K[2] q")).unwrap().is_none());
}

#[test]
fn unknown_names_are_reported() {
    let ks = f0();
    assert!(matches!(truth_set_fn(&ks, &pf("K[9] p")), Err(Error::UnknownAgent(_))));
    assert!(matches!(truth_set_fn(&ks, &pf("zz")), Err(Error::UnboundVariable(_))));
    assert!(matches!(truth_set_fn(&ks, &pf("C[1,9] p")), Err(Error::UnknownAgent(_))));
}

#[test]
fn communication_scenario() {
    let ks = comm();
    let e = ks.engine();
    let ack = e.var(ks.var("Alice_recv_ack").unwrap()).unwrap();
    let ts = truth_set_fn(&ks, &pf("K[A] Bob_recv_msg")).unwrap();
    assert!(e.equiv_under(ks.theta(), ts, ack));
    let s = ks.state_from_names(&["Alice_send_msg", "Alice_recv_ack", "Bob_recv_msg", "Bob_send_ack"]).unwrap();
    for f in ["K[A] Bob_recv_msg", "K[A] Alice_send_msg", "K[A] Alice_recv_ack"] {
        assert!(scenario_check(&ks, &s, &pf(f)).unwrap(), "{f}");
    }
}

#[test]
fn announcement_of_unknown_truth_refutes_itself() {
    for model in [F0, COMM] {
        let ks = parse_model(model).unwrap();
        let agents = ks.agents().join(",");
        let atom = &ks.var_names()[0];
        let phi = format!("{atom} & ~C[{agents}] {atom}");
        assert!(realized(&ks, &pf(&format!("[{phi}] ~({phi})"))).unwrap());
    }
}

#[test]
fn surface_quantifiers() {
    let ks = parse_model("vars p, q, r\nagent a obs p").unwrap();
    let e = ks.engine();
    let ts = truth_set_fn(&ks, &pf("E{p} ((p|q) & (~p|r))")).unwrap();
    let qr = compile_propositional(e, &pf("q | r"), &|n| ks.var(n)).unwrap();
    assert_eq!(ts, qr);
    let ts = truth_set_fn(&ks, &pf("A{p} (p | q)")).unwrap();
    assert_eq!(ts, e.var(ks.var("q").unwrap()).unwrap());
}

/// Lemma-10 style schemas and the S5 axioms, on random structures.
#[test]
fn schemas_are_realized() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let ks = random_structure(&mut rng, Rc::new(Bdd::new()), 5, 3);
        let names = ks.var_names();
        let agents = ks.agents().to_vec();
        let a1 = random_prop_formula(&mut rng, &names, 3);
        let a2 = random_prop_formula(&mut rng, &names, 3);
        let i = agents[rng.gen_range(0..agents.len())].clone();
        let g = crate::gen::random_agent_group(&mut rng, &agents).join(",");
        let e = ks.engine();
        // objective formulas are their own truth sets
        let direct = compile_propositional(e, &a1, &|n| ks.var(n)).unwrap();
        assert_eq!(truth_set_fn(&ks, &a1).unwrap(), direct);
        for ax in ks.axioms() {
            assert!(realized(&ks, ax).unwrap());
        }
        let schemas = [
            format!("K[{i}] ({a1}) -> ({a1})"),
            format!("K[{i}] ({a1}) -> K[{i}] K[{i}] ({a1})"),
            format!("~K[{i}] ({a1}) -> K[{i}] ~K[{i}] ({a1})"),
            format!("K[{i}] (({a1}) -> ({a2})) -> (K[{i}] ({a1}) -> K[{i}] ({a2}))"),
            format!("C[{g}] (({a1}) -> ({a2})) -> (C[{g}] ({a1}) -> C[{g}] ({a2}))"),
            format!("C[{g}] ({a1}) -> ({a1})"),
        ];
        for s in &schemas {
            assert!(realized(&ks, &pf(s)).unwrap(), "{s}");
        }
        for j in g.split(',') {
            let s = format!("C[{g}] ({a1}) -> K[{j}] C[{g}] ({a1})");
            assert!(realized(&ks, &pf(&s)).unwrap(), "{s}");
        }
        // K of an i-local formula is the formula itself
        let id = ks.agent(&i).unwrap();
        let first = ks.obs(id).iter().next();
        if let Some(v) = first {
            let beta = e.var_name(v);
            assert!(realized(&ks, &pf(&format!("K[{i}] ~{beta} <-> ~{beta}"))).unwrap());
        }
    }
}

#[test]
fn nested_route_agrees_with_truth_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..300 {
        let ks = random_structure(&mut rng, Rc::new(Bdd::new()), 6, 3);
        let names = ks.var_names();
        let psi = random_prop_formula(&mut rng, &names, 3);
        let alpha = random_prop_formula(&mut rng, &names, 3);
        let len = rng.gen_range(1..=3);
        let chain: Vec<crate::kstruct::AgentId> =
            (0..len).map(|_| crate::kstruct::AgentId(rng.gen_range(0..3))).collect();
        let mut f = alpha.clone();
        for i in chain.iter().rev() {
            f = Formula::knows(ks.agent_name(*i), f);
        }
        let psi_fn = truth_set_fn(&ks, &psi).unwrap();
        let alpha_fn = truth_set_fn(&ks, &alpha).unwrap();
        let via_truth_set = realized(&ks, &Formula::implies(psi.clone(), f)).unwrap();
        assert_eq!(ks.nested_holds(psi_fn, &chain, alpha_fn).unwrap(), via_truth_set);
    }
}

#[test]
fn symbolic_and_explicit_semantics_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..150 {
        let nv = rng.gen_range(1..=6);
        let na = rng.gen_range(1..=3);
        let ks = random_structure(&mut rng, Rc::new(Bdd::new()), nv, na);
        let (m, states) = build_kripke(&ks, 1 << 12).unwrap();
        let f = random_formula(&mut rng, &ks.var_names(), &agent_names(na), 4, true);
        let worlds = m.truth_worlds(&f).unwrap();
        let ts = truth_set_fn(&ks, &f).unwrap();
        for (w, s) in states.iter().enumerate() {
            assert_eq!(ks.satisfies(s, ts), worlds[w], "{f} at {:?}", ks.state_names(s));
        }
    }
}

#[test]
fn positive_translation_of_f0() {
    let ks = f0();
    let e = ks.engine();
    let t = positive_translate(&ks, &pf("K[1] q"), false).unwrap();
    assert_eq!(t.fresh.len(), 1);
    let (orig, fresh) = t.fresh[0].vars[0];
    assert_eq!(e.var_name(orig), "q");
    assert!(e.var_name(fresh).starts_with("@q_"));
    // ((p -> q') -> q')
    let p = e.var(ks.var("p").unwrap()).unwrap();
    let qf = e.var(fresh).unwrap();
    assert_eq!(t.translated, e.implies(e.implies(p, qf), qf));
    assert!(!positive_realized(&ks, &pf("K[1] q")).unwrap());
    let syn = t.formula.unwrap();
    assert_eq!(syn.to_string(), format!("(p -> {0}) -> {0}", e.var_name(fresh)));
}

#[test]
fn propositional_formulas_translate_to_themselves() {
    let ks = f0();
    let f = pf("p | ~q");
    let t = positive_translate(&ks, &f, false).unwrap();
    assert!(t.fresh.is_empty());
    assert_eq!(t.formula.unwrap(), f);
    assert!(matches!(
        positive_translate(&ks, &pf("~K[1] q"), false),
        Err(Error::NotPositive(Fragment::FullEpistemic))
    ));
}

#[test]
fn fresh_variables_are_shared_and_deterministic() {
    let ks = parse_model("vars a, b, c\nagent x obs a\nagent y obs b, c").unwrap();
    let f = pf("K[x] b | (K[x] b & K[y] K[x] c)");
    let shared = positive_translate(&ks, &f, false).unwrap();
    // two distinct K[x] subformulas plus one K[y]: 2 + 2 + 1 fresh variables
    let total: usize = shared.fresh.iter().map(|s| s.vars.len()).sum();
    assert_eq!(total, 5);
    let strict = positive_translate(&ks, &f, true).unwrap();
    assert_eq!(strict.fresh.len(), 4);
    let other = parse_model("vars a, b, c\nagent x obs a\nagent y obs b, c").unwrap();
    let again = positive_translate(&other, &f, false).unwrap();
    let names = |t: &PositiveTranslation, e: &Bdd| -> Vec<String> {
        t.fresh.iter().flat_map(|s| s.vars.iter().map(|&(_, v)| e.var_name(v))).collect()
    };
    assert_eq!(names(&shared, ks.engine()), names(&again, other.engine()));
    let e = ks.engine();
    assert_eq!(
        e.is_sat(e.and(ks.theta(), e.not(shared.translated))),
        e.is_sat(e.and(ks.theta(), e.not(strict.translated)))
    );
}

#[test]
fn positive_route_agrees_with_truth_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for round in 0..200 {
        let ks = random_structure(&mut rng, Rc::new(Bdd::new()), 5, 2);
        let f = random_positive_formula(&mut rng, &ks.var_names(), ks.agents(), 4);
        let expected = realized(&ks, &f).unwrap();
        assert_eq!(positive_realized(&ks, &f).unwrap(), expected, "{f}");
        if round % 4 == 0 {
            let t = positive_translate(&ks, &f, round % 8 == 0).unwrap();
            let e = ks.engine();
            let query = e.and(ks.theta(), e.not(t.translated));
            let cnf = cnf_from_func(e, query).unwrap();
            assert_eq!(solve_dimacs(&cnf.to_dimacs()).is_none(), expected, "{f}");
            // the syntactic translation gives the same verdict
            let th = t.theta_formula.unwrap();
            let syn = Formula::and(th, Formula::not(t.formula.unwrap()));
            let cnf = cnf_from_formula(&syn).unwrap();
            assert_eq!(solve_dimacs(&cnf.to_dimacs()).is_none(), expected, "{f}");
        }
    }
}

#[test]
fn dimacs_shapes() {
    let e = Bdd::new();
    let cnf = cnf_from_func(&e, e.ff()).unwrap();
    assert_eq!(cnf.to_dimacs(), "p cnf 1 2\n1 0\n-1 0\n");
    assert!(solve_dimacs(&cnf.to_dimacs()).is_none());
    let p = e.declare("p").unwrap();
    let q = e.declare("q").unwrap();
    let f = e.or(e.var(p).unwrap(), e.var(q).unwrap());
    let cnf = cnf_from_func(&e, f).unwrap();
    let text = cnf.to_dimacs();
    assert!(text.starts_with("c var 1 p\nc var 2 q\np cnf "));
    let model = solve_dimacs(&text).unwrap();
    assert!(model.contains(&1) || model.contains(&2));
    let mut sink = Vec::new();
    cnf.write_to(&mut sink).unwrap();
    assert_eq!(String::from_utf8(sink).unwrap(), text);
    assert!(cnf_from_formula(&pf("K[a] p")).is_err());
    assert!(solve_dimacs(&cnf_from_formula(&pf("p & ~p")).unwrap().to_dimacs()).is_none());
    assert!(solve_dimacs(&cnf_from_formula(&pf("false")).unwrap().to_dimacs()).is_none());
}

#[test]
fn dimacs_is_equisatisfiable() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let names: Vec<String> = (0..5).map(|i| format!("v{i}")).collect();
    for _ in 0..300 {
        let e = Bdd::new();
        for n in &names {
            e.declare(n).unwrap();
        }
        let f = random_prop_formula(&mut rng, &names, 4);
        let func = compile_propositional(&e, &f, &|n| Ok(e.lookup(n)?)).unwrap();
        let sat = e.is_sat(func);
        let via_func = cnf_from_func(&e, func).unwrap();
        let via_formula = cnf_from_formula(&f).unwrap();
        assert_eq!(solve_dimacs(&via_func.to_dimacs()).is_some(), sat, "{f}");
        assert_eq!(solve_dimacs(&via_formula.to_dimacs()).is_some(), sat, "{f}");
        // models of the function encoding project onto models of f
        if let Some(model) = solve_dimacs(&via_func.to_dimacs()) {
            let truth = |v: crate::boolfn::Var| {
                let idx = via_func.index_of(&e.var_name(v));
                idx.is_some_and(|i| model.contains(&(i as i32)))
            };
            assert!(e.eval(func, &truth));
        }
    }
}

#[test]
fn rendered_functions_compile_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for _ in 0..100 {
        let ks = random_structure(&mut rng, Rc::new(Bdd::new()), 5, 2);
        let f = random_formula(&mut rng, &ks.var_names(), ks.agents(), 3, true);
        let ts = truth_set_fn(&ks, &f).unwrap();
        let shown = func_to_formula(ks.engine(), ts).unwrap();
        assert!(shown.is_propositional());
        assert_eq!(truth_set_fn(&ks, &shown).unwrap(), ts, "{f} rendered as {shown}");
    }
    let e = Bdd::new();
    assert_eq!(func_to_formula(&e, e.tt()).unwrap(), Formula::True);
    assert_eq!(func_to_formula(&e, e.ff()).unwrap(), Formula::False);
}
