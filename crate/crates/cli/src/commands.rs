//! Subcommand handlers. Model-based commands are generic over the function
//! store and instantiated once per engine kind.

use std::fmt::Write as _;
use std::path::Path;
use std::rc::Rc;

use serde_json::{json, Value};

use ksmc::boolfn::{enumerate_models, Bdd, Engine, TruthTable, MAX_TABLE_VARS};
use ksmc::eval::{
    cnf_from_formula, cnf_from_func, counterexample, func_to_formula, positive_translate, realized, scenario_check,
    truth_set_fn,
};
use ksmc::group::GroupContext;
use ksmc::kripke::{build_kripke, check_claims, from_kripke, KripkeModel};
use ksmc::lang::{parse_formula, ModelSpec};
use ksmc::pal::restrict;
use ksmc::suite::{
    muddy_build, muddy_run, muddy_time, ns_build, ns_strict_verify, ns_verify, qbf_brute_force, qbf_check,
    qbf_generate, NsVariant, TimingRow,
};
use ksmc::{Error, Formula, KnowledgeStructure, State};

use crate::output::{read_file, state_text, to_json, write_atomic, CliError, Outcome};
use crate::{Command, EngineKind, Mode, ModelArgs};

/// Binds `$e` to a fresh store of the requested kind and evaluates `$body`.
macro_rules! with_engine {
    ($kind:expr, $cap:expr, |$e:ident| $body:expr) => {
        match $kind {
            EngineKind::Bdd => {
                let $e = Rc::new(Bdd::new());
                $body
            }
            EngineKind::Enum => {
                let $e = Rc::new(TruthTable::with_capacity($cap).map_err(Error::from)?);
                $body
            }
        }
    };
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Check(a) => {
            let spec = load_spec(&a.model)?;
            let f = formula_arg(&a.formula)?;
            let mode = resolve_mode(a.mode, a.state.as_deref())?;
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                check(&ks, &f, a.state.as_deref(), mode, a.dimacs.as_deref(), a.out.json)
            })
        }
        Command::Truthset(a) => {
            let spec = load_spec(&a.model)?;
            let f = formula_arg(&a.formula)?;
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                truthset(&ks, &f, a.limit, a.dimacs.as_deref(), a.out.json)
            })
        }
        Command::Wsc(a) | Command::Snc(a) => {
            let weakest = matches!(command, Command::Wsc(_));
            let spec = load_spec(&a.model)?;
            let f = formula_arg(&a.formula)?;
            let group = match (&a.agent, &a.group) {
                (Some(i), None) => Err(i.clone()),
                (None, Some(g)) => Ok(split_list(g)),
                _ => return Err(CliError::Usage("give exactly one of --agent and --group".into())),
            };
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                condition(&ks, &f, &group, weakest, a.out.json)
            })
        }
        Command::Common(a) => {
            let spec = load_spec(&a.model)?;
            let group = split_list(&a.group);
            if group.is_empty() {
                return Err(Error::EmptyGroup.into());
            }
            let f = Formula::common(group, formula_arg(&a.formula)?);
            let mode = resolve_mode(a.mode, a.state.as_deref())?;
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                check(&ks, &f, a.state.as_deref(), mode, None, a.out.json)
            })
        }
        Command::Announce(a) => {
            let spec = load_spec(&a.model)?;
            let phis = a.formulas.iter().map(|s| formula_arg(s)).collect::<Result<Vec<_>, _>>()?;
            let then = a.then.as_deref().map(formula_arg).transpose()?;
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                announce(&ks, &spec, &phis, then.as_ref(), a.out.json)
            })
        }
        Command::Translate(a) => {
            let spec = load_spec(&a.model)?;
            let f = formula_arg(&a.formula)?;
            let mut knows = 0;
            f.walk(&mut |g| knows += matches!(g, Formula::Knows(..)) as usize);
            let cap = spec.vars.len() * (1 + knows);
            with_engine!(a.model.engine, cap, |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                translate(&ks, &f, a.fresh_per_occurrence, a.dimacs.as_deref(), a.out.json)
            })
        }
        Command::KripkeExport(a) => {
            let spec = load_spec(&a.model)?;
            with_engine!(a.model.engine, spec.vars.len(), |e| {
                let ks = KnowledgeStructure::from_spec(e, &spec)?;
                let (m, _) = build_kripke(&ks, a.cap_worlds)?;
                let text = m.to_text();
                Ok(Outcome::success(if a.out.json {
                    to_json(&json!({ "worlds": m.num_worlds(), "model": text }))
                } else {
                    text
                }))
            })
        }
        Command::KripkeImport(a) => {
            let m = KripkeModel::parse(&read_file(&a.kripke)?)?;
            let bits = |n: usize| (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize;
            let cap = m.vars().len()
                + (0..m.agents().len()).map(|i| bits(m.partition(i).len())).sum::<usize>()
                + bits(m.num_worlds());
            with_engine!(a.engine, cap.min(MAX_TABLE_VARS), |e| kripke_import(e, &m, a.out.json))
        }
        Command::BenchMuddy(a) => bench_muddy(a),
        Command::VerifyNs(a) => verify_ns(&a.variant, a.strict),
        Command::GenQbf(a) => gen_qbf(a),
    }
}

fn formula_arg(s: &str) -> Result<Formula, CliError> {
    let text = match s.strip_prefix('@') {
        Some(path) => read_file(Path::new(path))?,
        None => s.to_string(),
    };
    Ok(parse_formula(&text)?)
}

fn split_list(s: &str) -> Vec<String> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(String::from).collect()
}

fn load_spec(m: &ModelArgs) -> Result<ModelSpec, CliError> {
    let spec = ModelSpec::parse(&read_file(&m.model)?)?;
    match m.var_order.as_str() {
        "decl" => Ok(spec),
        other => {
            let path = other
                .strip_prefix('@')
                .ok_or_else(|| CliError::Usage(format!("--var-order must be `decl` or `@file`, got `{other}`")))?;
            Ok(spec.with_order(&split_list(&read_file(Path::new(path))?))?)
        }
    }
}

fn resolve_mode(mode: Option<Mode>, state: Option<&str>) -> Result<Mode, CliError> {
    match (mode, state) {
        (Some(Mode::State), None) => Err(CliError::Usage("--mode state needs --state".into())),
        (Some(Mode::Realized), Some(_)) => Err(CliError::Usage("--state is only used with --mode state".into())),
        (Some(m), _) => Ok(m),
        (None, Some(_)) => Ok(Mode::State),
        (None, None) => Ok(Mode::Realized),
    }
}

fn parse_state<E: Engine>(ks: &KnowledgeStructure<E>, s: &str) -> Result<State, CliError> {
    Ok(ks.state_from_names(&split_list(s))?)
}

fn write_cnf(path: &Path, cnf: &ksmc::eval::Cnf) -> Result<(), CliError> {
    write_atomic(path, cnf.to_dimacs().as_bytes())
}

fn check<E: Engine>(
    ks: &KnowledgeStructure<E>,
    f: &Formula,
    state: Option<&str>,
    mode: Mode,
    dimacs: Option<&Path>,
    json: bool,
) -> Result<Outcome, CliError> {
    let e = ks.engine();
    if let Some(path) = dimacs {
        let ts = truth_set_fn(ks, f)?;
        write_cnf(path, &cnf_from_func(e, e.and(ks.theta(), e.not(ts)))?)?;
    }
    match mode {
        Mode::Realized => {
            let holds = realized(ks, f)?;
            let cex = if holds { None } else { counterexample(ks, f)?.map(|s| ks.state_names(&s)) };
            let text = if json {
                to_json(&json!({
                    "formula": f.to_string(),
                    "mode": "realized",
                    "result": holds,
                    "counterexample": cex,
                }))
            } else {
                let mut t = format!("realized: {holds}\n");
                if let Some(names) = &cex {
                    t.push_str(&format!("state: {}\n", state_text(names)));
                }
                t
            };
            Ok(Outcome::verdict(holds, text))
        }
        Mode::State => {
            let s = parse_state(ks, state.expect("mode resolved with a state"))?;
            let holds = scenario_check(ks, &s, f)?;
            let text = if json {
                to_json(&json!({
                    "formula": f.to_string(),
                    "mode": "state",
                    "state": ks.state_names(&s),
                    "result": holds,
                }))
            } else {
                format!("holds: {holds}\n")
            };
            Ok(Outcome::verdict(holds, text))
        }
    }
}

fn truthset<E: Engine>(
    ks: &KnowledgeStructure<E>,
    f: &Formula,
    limit: usize,
    dimacs: Option<&Path>,
    json: bool,
) -> Result<Outcome, CliError> {
    let e = ks.engine();
    let ts = truth_set_fn(ks, f)?;
    let members_fn = e.and(ks.theta(), ts);
    if let Some(path) = dimacs {
        write_cnf(path, &cnf_from_func(e, members_fn)?)?;
    }
    let count = e.sat_count(members_fn, ks.vars());
    let members: Vec<Vec<String>> = enumerate_models(e, members_fn, ks.vars(), usize::MAX)
        .map_err(Error::from)?
        .take(limit)
        .map(|vs| vs.iter().map(|v| e.var_name(v)).collect())
        .collect();
    let set = func_to_formula(e, ts)?.to_string();
    let text = if json {
        to_json(&json!({ "formula": f.to_string(), "states": count_value(count), "set": set, "members": members }))
    } else {
        let mut t = format!("states: {count}\nset: {set}\n");
        for m in &members {
            t.push_str(&format!("  {{{}}}\n", state_text(m)));
        }
        t
    };
    Ok(Outcome::success(text))
}

fn count_value(n: u128) -> Value {
    u64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::from(n.to_string()))
}

/// `group` is `Err(agent)` for a single agent, `Ok(names)` for a group.
fn condition<E: Engine>(
    ks: &KnowledgeStructure<E>,
    f: &Formula,
    group: &Result<Vec<String>, String>,
    weakest: bool,
    json: bool,
) -> Result<Outcome, CliError> {
    let e = ks.engine();
    let alpha = truth_set_fn(ks, f)?;
    let (value, iterations) = match group {
        Err(agent) => {
            let i = ks.agent(agent)?;
            (if weakest { ks.wsc(i, alpha) } else { ks.snc(i, alpha) }, None)
        }
        Ok(names) => {
            let ctx = GroupContext::from_names(ks, names)?;
            let fp = if weakest { ctx.wsc_group_iter(alpha) } else { ctx.snc_group_iter(alpha) };
            (fp.value, Some(fp.iterations))
        }
    };
    let kind = if weakest { "wsc" } else { "snc" };
    let shown = func_to_formula(e, value)?.to_string();
    let text = if json {
        to_json(&json!({ "kind": kind, "formula": f.to_string(), "result": shown, "iterations": iterations }))
    } else {
        let mut t = format!("{kind}: {shown}\n");
        if let Some(n) = iterations {
            t.push_str(&format!("iterations: {n}\n"));
        }
        t
    };
    Ok(Outcome::success(text))
}

fn announce<E: Engine>(
    ks: &KnowledgeStructure<E>,
    spec: &ModelSpec,
    phis: &[Formula],
    then: Option<&Formula>,
    json: bool,
) -> Result<Outcome, CliError> {
    let e = ks.engine();
    let mut current = ks.clone();
    let mut result = spec.clone();
    let mut counts = Vec::new();
    for (index, phi) in phis.iter().enumerate() {
        let r = restrict(&current, phi)?;
        if r.vacuous {
            return Err(Error::VacuousAnnouncement { index }.into());
        }
        result.axioms.push(func_to_formula(e, r.announced)?);
        current = r.result;
        counts.push(current.count_states());
    }
    let model = result.to_text();
    let verdict = match then {
        Some(psi) => {
            let holds = realized(&current, psi)?;
            let cex = if holds { None } else { counterexample(&current, psi)?.map(|s| current.state_names(&s)) };
            Some((psi, holds, cex))
        }
        None => None,
    };
    let code_holds = verdict.as_ref().is_none_or(|v| v.1);
    let text = if json {
        to_json(&json!({
            "announcements": phis.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "states": counts.into_iter().map(count_value).collect::<Vec<_>>(),
            "model": model,
            "then": verdict.as_ref().map(|(psi, holds, cex)| json!({
                "formula": psi.to_string(),
                "realized": holds,
                "counterexample": cex,
            })),
        }))
    } else {
        let mut t = model;
        if let Some((psi, holds, cex)) = &verdict {
            t.push_str(&format!("# then {psi}\n# realized: {holds}\n"));
            if let Some(names) = cex {
                t.push_str(&format!("# state: {}\n", state_text(names)));
            }
        }
        t
    };
    Ok(Outcome::verdict(code_holds, text))
}

fn translate<E: Engine>(
    ks: &KnowledgeStructure<E>,
    f: &Formula,
    per_occurrence: bool,
    dimacs: Option<&Path>,
    json: bool,
) -> Result<Outcome, CliError> {
    let e = ks.engine();
    let t = positive_translate(ks, f, per_occurrence)?;
    let holds = !e.is_sat(e.and(ks.theta(), e.not(t.translated)));
    if let Some(path) = dimacs {
        let cnf = match (&t.theta_formula, &t.formula) {
            (Some(th), Some(g)) => cnf_from_formula(&Formula::and(th.clone(), Formula::not(g.clone())))?,
            _ => cnf_from_func(e, e.and(ks.theta(), e.not(t.translated)))?,
        };
        write_cnf(path, &cnf)?;
    }
    let shown = match &t.formula {
        Some(g) => g.clone(),
        None => func_to_formula(e, t.translated)?,
    };
    let fresh: Vec<Value> = t
        .fresh
        .iter()
        .map(|s| {
            json!({
                "agent": s.agent,
                "subformula": s.subformula.to_string(),
                "vars": s.vars.iter().map(|&(o, n)| json!([e.var_name(o), e.var_name(n)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let text = if json {
        to_json(&json!({ "formula": f.to_string(), "translated": shown.to_string(), "fresh": fresh, "realized": holds }))
    } else {
        let mut out = format!("translated: {shown}\n");
        for s in &t.fresh {
            let names: Vec<String> = s.vars.iter().map(|&(o, n)| format!("{}={}", e.var_name(n), e.var_name(o))).collect();
            let _ = writeln!(out, "fresh K[{}] {}: {}", s.agent, s.subformula, names.join(" "));
        }
        let _ = writeln!(out, "realized: {holds}");
        out
    };
    Ok(Outcome::success(text))
}

fn kripke_import<E: Engine>(engine: Rc<E>, m: &KripkeModel, json: bool) -> Result<Outcome, CliError> {
    let conv = from_kripke(engine, m)?;
    check_claims(m, &conv).map_err(Error::Kripke)?;
    let model = conv.spec.to_text();
    let text = if json {
        let worlds: Vec<Value> = conv
            .g
            .iter()
            .enumerate()
            .map(|(w, s)| json!({ "world": w, "state": conv.ks.state_names(s) }))
            .collect();
        to_json(&json!({
            "model": model,
            "worlds": worlds,
            "obs_bits": conv.obs_bits,
            "tag_bits": conv.tag_bits,
        }))
    } else {
        model
    };
    Ok(Outcome::success(text))
}

fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad child count `{t}`")));
    match s.split_once("..") {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => num(s).map(|n| (n, n)),
    }
}

fn bench_muddy(a: &crate::MuddyArgs) -> Result<Outcome, CliError> {
    let (lo, hi) = parse_range(&a.n)?;
    let mut reports = Vec::new();
    let mut rows: Vec<TimingRow> = Vec::new();
    let mut all_ok = true;
    for n in lo..=hi {
        let ks: Vec<usize> = match a.k {
            Some(k) => vec![k],
            None => (1..=n).collect(),
        };
        for k in ks {
            let inst = muddy_build(n, k)?;
            let report = muddy_run(&inst);
            let t1 = muddy_time(n, k, 1)?;
            let t2 = muddy_time(n, k, 2)?;
            // round j, child i is the i-th row of the j-th block in both tables
            let agree = t1.iter().zip(&t2).all(|(x, y)| x.verdict == y.verdict)
                && t1.iter().all(|r| (report.rounds[r.round - 1].answers[r.child] == "Yes") == r.verdict);
            all_ok &= report.ok() && agree;
            reports.push((report, agree));
            rows.extend(t1);
            rows.extend(t2);
        }
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
        write_atomic(path, &bytes)?;
    }
    let text = if a.out.json {
        let items: Vec<Value> = reports
            .iter()
            .map(|(r, agree)| {
                json!({
                    "n": r.n,
                    "k": r.k,
                    "ok": r.ok(),
                    "alg_agree": agree,
                    "rounds": r.rounds.iter().map(|x| json!({
                        "round": x.round,
                        "answers": x.answers,
                        "yes": x.yes,
                        "states": count_value(x.states),
                    })).collect::<Vec<_>>(),
                    "failures": r.failures,
                })
            })
            .collect();
        to_json(&Value::Array(items))
    } else {
        let mut t = String::new();
        for (r, agree) in &reports {
            let status = if r.ok() && *agree { "ok" } else { "FAILED" };
            let _ = writeln!(t, "n={} k={} rounds={} {status}", r.n, r.k, r.rounds.len());
            for f in &r.failures {
                let _ = writeln!(t, "  {f}");
            }
            if !agree {
                let _ = writeln!(t, "  algorithms disagree");
            }
        }
        t
    };
    Ok(Outcome::verdict(all_ok, text))
}

fn verify_ns(variant: &str, strict: bool) -> Result<Outcome, CliError> {
    let variant: NsVariant = variant.parse()?;
    let report = if strict { ns_strict_verify(variant)? } else { ns_verify(&ns_build(variant))? };
    let failed: Vec<&str> = report.specs.iter().filter(|s| !s.holds).map(|s| s.name).collect();
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["failed"] = json!(failed);
    Ok(Outcome::verdict(report.all_hold(), to_json(&value)))
}

fn gen_qbf(a: &crate::QbfArgs) -> Result<Outcome, CliError> {
    let inst = qbf_generate(a.m, a.seed)?;
    let model = inst.model.to_text();
    if let Some(path) = &a.model_out {
        write_atomic(path, model.as_bytes())?;
    }
    let verdicts = if a.check {
        Some((qbf_brute_force(a.m, &inst.matrix), qbf_check(&inst)?))
    } else {
        None
    };
    let agree = verdicts.is_none_or(|(v, r)| v == r);
    let text = if a.out.json {
        to_json(&json!({
            "m": a.m,
            "seed": a.seed,
            "matrix": inst.matrix.to_string(),
            "target": inst.target.to_string(),
            "model": model,
            "valid": verdicts.map(|v| v.0),
            "realized": verdicts.map(|v| v.1),
        }))
    } else {
        let mut t = format!("matrix: {}\ntarget: {}\n", inst.matrix, inst.target);
        if let Some((valid, real)) = verdicts {
            let _ = writeln!(t, "valid: {valid}\nrealized: {real}");
        }
        t
    };
    Ok(Outcome::verdict(agree, text))
}
