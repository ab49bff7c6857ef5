//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use mck::arena::{arena_of_formula, Label};
use mck::corpus::{
    check_characterization, check_confluence, check_eta_pattern, check_eta_weight, check_kappa_decrease,
    check_local_confluence, check_subject_reduction, check_termination, enumerate_formulas, enumerate_terms,
    generate_terms, Check, CorpusTerm, GenConfig, Vocabulary,
};
use mck::correspond::{roundtrip_strategy, roundtrip_term, strategy_of_term};
use mck::fck::fck_derive;
use mck::games::{ck_report, is_wis, search_ck_wis, Move, SearchOutcome, Strategy, View, DEFAULT_MAX_VIEWS};
use mck::rewrite::{find_redexes, in_lambda_hat, is_normal, normalize, step, NormStrategy};
use mck::sck::{prove, ProveOutcome, Sequent, DEFAULT_DEPTH};
use mck::surface::{print_assignment, print_term, strategy_to_json};
use mck::syntax::{size, Term};

const SEED: u64 = 2024;
const CORPUS: usize = 1000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn view(ms: &[(&str, Option<usize>)]) -> View {
    View { moves: ms.iter().map(|(t, p)| Move::new(t, *p)).collect() }
}

/// Runs `check` over `terms`; returns (failures, first few messages).
fn sweep(terms: &[CorpusTerm], check: Check) -> (usize, Vec<String>) {
    let mut bad = Vec::new();
    for ct in terms {
        if let Err(e) = check(ct) {
            bad.push(format!("{}: {e}", ct.render()));
        }
    }
    let n = bad.len();
    bad.truncate(3);
    (n, bad)
}

fn nf(ct: &CorpusTerm) -> Option<Term> {
    normalize(&ct.context, &ct.term, NormStrategy::Leftmost, 500).ok().map(|(t, _)| t)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (ctx, t1, ty) = assignment("z:#a, w:#b |- let x,y = z,w in x : #a");
    let (_, t2, _) = assignment("z:#a, w:#b |- let x = z in x : #a");
    let expected = Strategy::from_views([view(&[]), view(&[("111", None)]), view(&[("111", None), ("10", Some(0))])]);
    let arena_formula = mck::syntax::Formula::curried(&ctx.types(), ty.clone());
    let want = strategy_to_json(&arena_formula, &expected);
    for t in [&t1, &t2] {
        let n = normalize(&ctx, t, NormStrategy::Leftmost, 500).unwrap().0;
        if print_term(&n) != "let x = z in x" {
            return outcome(false, format!("{} normalizes to {}", print_term(t), print_term(&n)));
        }
        let got = strategy_to_json(&arena_formula, &strategy_of_term(&ctx, &n).unwrap());
        if got != want {
            return outcome(false, format!("strategy of {} differs:\n{got}", print_term(t)));
        }
    }
    let el = start.elapsed();
    outcome(el < Duration::from_secs(1), format!("both normalize to `let x = z in x`, strategy {{ε, a, a·a}}, {el:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f1 = f("#a -> a");
    let f2 = f("(#a -> #b) -> #(a -> b)");
    let s1 = Strategy::from_views([view(&[]), view(&[("1", None)]), view(&[("1", None), ("10", Some(0))])]);
    let s2 = Strategy::from_views([
        view(&[]),
        view(&[("111", None)]),
        view(&[("111", None), ("110", Some(0))]),
        view(&[("111", None), ("110", Some(0)), ("100", Some(1))]),
        view(&[("111", None), ("110", Some(0)), ("100", Some(1)), ("011", Some(0))]),
    ]);
    let a1 = arena_of_formula(&f1);
    let a2 = arena_of_formula(&f2);
    let r1 = ck_report(&a1, &s1);
    let r2 = ck_report(&a2, &s2);
    let mut problems = Vec::new();
    if !(is_wis(&a1, &s1) == Ok(true) && r1.wis && !r1.well_batched) {
        problems.push(format!("S1 report {r1:?}"));
    }
    if !(is_wis(&a2, &s2) == Ok(true) && r2.wis && r2.well_batched && !r2.linked) {
        problems.push(format!("S2 report {r2:?}"));
    }
    for g in [&f1, &f2] {
        let p = prove(&Sequent::new(vec![], g.clone()), DEFAULT_DEPTH);
        if p != ProveOutcome::Exhausted {
            problems.push(format!("prove on {} gave {p:?}", mck::surface::print_formula(g)));
        }
        let s = search_ck_wis(&arena_of_formula(g), DEFAULT_MAX_VIEWS);
        if s != SearchOutcome::Exhausted {
            problems.push(format!("search on {} gave {s:?}", mck::surface::print_formula(g)));
        }
    }
    let el = start.elapsed();
    if el >= Duration::from_secs(5) {
        problems.push(format!("took {el:.2?}"));
    }
    if problems.is_empty() {
        outcome(true, format!("S1 not well-batched, S2 not linked, prove and search exhaust on both, {el:.2?}"))
    } else {
        outcome(false, problems.join("; "))
    }
}

fn criterion_3() -> Outcome {
    let a = arena_of_formula(&f("(a -> #(b -> (c -> #d))) -> #(e -> f)"));
    // outer left box, inner left box, right box
    let (lo, li, r) = ("010", "011110", "01");
    let want: BTreeMap<&str, (&str, Vec<&str>)> = [
        ("00", ("a", vec![])),
        (lo, ("□", vec![])),
        ("0110", ("b", vec![lo])),
        ("01110", ("c", vec![lo])),
        (li, ("□", vec![lo])),
        ("111110", ("d", vec![lo, li])),
        (r, ("□", vec![])),
        ("011", ("e", vec![r])),
        ("111", ("f", vec![r])),
    ]
    .into();
    let got: BTreeMap<&str, (String, Vec<&str>)> = a
        .vertices
        .iter()
        .map(|(v, d)| (v.0.as_str(), (d.label.to_string(), d.address.iter().map(|x| x.0.as_str()).collect())))
        .collect();
    let same = got.len() == 9
        && want.iter().all(|(k, (l, ad))| got.get(k).map(|(gl, gad)| gl == l && gad == ad).unwrap_or(false));
    let d_height = a.height(&mck::arena::VertexId::new("111110"));
    let boxes = a.vertices.values().filter(|d| d.label == Label::Box).count();
    outcome(same && d_height == Some(2) && boxes == 3, format!("9 vertices, 3 boxes, |add(d)| = {d_height:?}"))
}

fn criterion_4(terms: &[CorpusTerm]) -> Outcome {
    let (bad, msgs) = sweep(terms, check_subject_reduction);
    // independent typing oracle on every one-step reduct and every trace step
    let mut oracle_bad = 0;
    let mut steps = 0;
    for ct in terms {
        let mut todo: Vec<Term> = find_redexes(&ct.context, &ct.term)
            .unwrap()
            .iter()
            .map(|r| step(&ct.context, &ct.term, r).unwrap())
            .collect();
        if let Ok((_, tr)) = normalize(&ct.context, &ct.term, NormStrategy::Leftmost, 500) {
            todo.extend(tr.steps.into_iter().map(|(_, t)| t));
        }
        steps += todo.len();
        oracle_bad += todo.iter().filter(|t| oracle_type(&ct.context, t).as_ref() != Some(&ct.ty)).count();
    }
    outcome(
        terms.len() >= CORPUS && bad == 0 && oracle_bad == 0,
        format!("{} terms, {steps} reducts, {bad} + {oracle_bad} failures {msgs:?}", terms.len()),
    )
}

fn criterion_5(terms: &[CorpusTerm]) -> Outcome {
    let (t, tm) = sweep(terms, check_termination);
    let (k, km) = sweep(terms, check_kappa_decrease);
    let (e, em) = sweep(terms, check_eta_pattern);
    let (w, _) = sweep(terms, check_eta_weight);
    println!("    supplementary: eta_weight strictly decreases on every η step: {} failures", w);
    for m in &em {
        println!("    eta pattern counterexample: {m}");
    }
    outcome(
        t + k + e == 0,
        format!("termination {t} {tm:?}, kappa {k} {km:?}, eta pattern {e} failures"),
    )
}

fn criterion_6(terms: &[CorpusTerm]) -> Outcome {
    let (c, cm) = sweep(terms, check_confluence);
    let small: Vec<CorpusTerm> = terms.iter().filter(|ct| size(&ct.term) <= 8).cloned().collect();
    let (l, lm) = sweep(&small, check_local_confluence);
    outcome(
        c + l == 0,
        format!("{} terms confluent ({c} failures {cm:?}), local confluence on {} terms of size <= 8 ({l} failures {lm:?})", terms.len(), small.len()),
    )
}

fn criterion_7(terms: &[CorpusTerm]) -> Outcome {
    let (c, cm) = sweep(terms, check_characterization);
    let all = enumerate_terms(&Vocabulary::small(), 5);
    let mut bad = Vec::new();
    let mut normal = 0;
    for ct in terms.iter().chain(&all) {
        let n = is_normal(&ct.context, &ct.term).unwrap();
        let h = in_lambda_hat(&ct.context, &ct.term).unwrap();
        let o = oracle_normal(&ct.context, &ct.term, &ct.ty);
        normal += usize::from(o);
        if n != h || n != o {
            bad.push(format!("{}: is_normal {n}, in_lambda_hat {h}, grammar {o}", ct.render()));
        }
    }
    outcome(
        c == 0 && bad.is_empty(),
        format!(
            "{} corpus + {} enumerated terms, {normal} normal, {} failures {:?} {cm:?}",
            terms.len(),
            all.len(),
            c + bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn criterion_8(terms: &[CorpusTerm]) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for ct in terms {
        let Some(t) = nf(ct) else { continue };
        if size(&t) > 10 {
            continue;
        }
        checked += 1;
        let d = fck_derive(&ct.context, &t).unwrap();
        let all = fck_derivations(&ct.context, &t, &ct.ty);
        if all.len() != 1 || sorted(&all[0]) != sorted(&d) {
            bad.push(format!("{}: {} derivations", print_assignment(&ct.context, &t, &ct.ty), all.len()));
        }
    }
    outcome(bad.is_empty() && checked > 0, format!("{checked} normal forms of size <= 10, {} failures {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()))
}

struct FormulaPass {
    formulas: usize,
    found: usize,
    proved: usize,
    disagreements: Vec<String>,
    bound_exceeded: Vec<String>,
    roundtrip_failures: Vec<String>,
    elapsed: Duration,
}

fn formula_pass() -> FormulaPass {
    let start = Instant::now();
    let formulas = enumerate_formulas(&["a", "b"], 7);
    let mut p = FormulaPass {
        formulas: formulas.len(),
        found: 0,
        proved: 0,
        disagreements: vec![],
        bound_exceeded: vec![],
        roundtrip_failures: vec![],
        elapsed: Duration::ZERO,
    };
    for g in &formulas {
        let name = mck::surface::print_formula(g);
        let s = search_ck_wis(&arena_of_formula(g), DEFAULT_MAX_VIEWS);
        let d = prove(&Sequent::new(vec![], g.clone()), DEFAULT_DEPTH);
        if s == SearchOutcome::BoundExceeded || d == ProveOutcome::BoundExceeded {
            p.bound_exceeded.push(name.clone());
        }
        if s.strategy().is_some() != d.is_proved() {
            p.disagreements.push(name.clone());
        }
        p.proved += usize::from(d.is_proved());
        if let SearchOutcome::Found(st) = &s {
            p.found += 1;
            match roundtrip_strategy(&[], g, st) {
                Ok(r) if r.roundtrip_ok => {}
                Ok(r) => p.roundtrip_failures.push(format!("{name}: {}", r.diff.unwrap_or_default())),
                Err(e) => p.roundtrip_failures.push(format!("{name}: {e}")),
            }
        }
    }
    p.elapsed = start.elapsed();
    p
}

fn criterion_9(terms: &[CorpusTerm], p: &FormulaPass) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for ct in terms {
        let Some(t) = nf(ct) else { continue };
        checked += 1;
        match roundtrip_term(&ct.context, &t) {
            Ok(r) if r.roundtrip_ok => {}
            other => bad.push(format!("{}: {:?}", print_assignment(&ct.context, &t, &ct.ty), other.map(|r| r.diff))),
        }
    }
    outcome(
        bad.is_empty() && p.roundtrip_failures.is_empty(),
        format!(
            "{checked} term round trips ({} failures {:?}), {} strategy round trips ({} failures {:?})",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>(),
            p.found,
            p.roundtrip_failures.len(),
            p.roundtrip_failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn criterion_10(p: &FormulaPass) -> Outcome {
    outcome(
        p.disagreements.is_empty() && p.bound_exceeded.is_empty(),
        format!(
            "{} formulas, {} with a CK-WIS, {} provable, {} disagreements {:?}, {} bound exceeded {:?}, {:.1?}",
            p.formulas,
            p.found,
            p.proved,
            p.disagreements.len(),
            p.disagreements.iter().take(3).collect::<Vec<_>>(),
            p.bound_exceeded.len(),
            p.bound_exceeded.iter().take(3).collect::<Vec<_>>(),
            p.elapsed
        ),
    )
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |n: usize, name: &str, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {status} {name}: {} [{:.1?}]", o.detail, start.elapsed());
        all_ok &= o.ok;
    };
    let terms = generate_terms(SEED, CORPUS, &GenConfig::default());
    report(1, "intro canonicity", &criterion_1);
    report(2, "non-CK strategies", &criterion_2);
    report(3, "arena address table", &criterion_3);
    report(4, "subject reduction", &|| criterion_4(&terms));
    report(5, "termination and measures", &|| criterion_5(&terms));
    report(6, "confluence", &|| criterion_6(&terms));
    report(7, "normal form characterization", &|| criterion_7(&terms));
    report(8, "focused derivation uniqueness", &|| criterion_8(&terms));
    let pass = formula_pass();
    report(9, "round trip", &|| criterion_9(&terms, &pass));
    report(10, "search agrees with proof search", &|| criterion_10(&pass));
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
