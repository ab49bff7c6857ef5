//! Term and formula corpora, and the property suites run over them.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspond::{roundtrip_term, strategy_of_term};
use crate::arena::arena_of_sequent;
use crate::fck::{fck_check, fck_derive};
use crate::games::is_ck_wis;
use crate::rewrite::{
    eta_measure, eta_weight, find_redexes, in_lambda_hat, is_normal, kappa_measure, normalize, step, NormStrategy,
    ReductionKind, Trace, DEFAULT_MAX_STEPS,
};
use crate::surface::{print_assignment, print_term};
use crate::syntax::{alpha_eq_in_context, alpha_key, canonicalize_avoiding, size, Formula, Term, TypeAssignment, TypingContext};
use crate::typing::type_of;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusTerm {
    pub context: TypingContext,
    pub term: Term,
    pub ty: Formula,
}

impl CorpusTerm {
    pub fn render(&self) -> String {
        print_assignment(&self.context, &self.term, &self.ty)
    }

    pub fn assignment(&self) -> TypeAssignment {
        TypeAssignment { context: self.context.clone(), subject: self.term.clone(), ty: self.ty.clone() }
    }
}

/// All formulas over `atoms` with at most `max_connectives` connectives,
/// ordered by connective count.
pub fn enumerate_formulas(atoms: &[&str], max_connectives: usize) -> Vec<Formula> {
    let mut by: Vec<Vec<Formula>> = vec![atoms.iter().map(|a| Formula::atom(a)).collect()];
    for n in 1..=max_connectives {
        let mut level: Vec<Formula> = by[n - 1].iter().map(|f| Formula::boxed(f.clone())).collect();
        for i in 0..n {
            for l in &by[i] {
                for r in &by[n - 1 - i] {
                    level.push(Formula::arrow(l.clone(), r.clone()));
                }
            }
        }
        by.push(level);
    }
    by.into_iter().flatten().collect()
}

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_size: usize,
    /// Upper bound on constructor nodes per term.
    pub max_nodes: usize,
    pub atoms: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_size: 12, max_nodes: 24, atoms: vec!["a".into(), "b".into(), "c".into()] }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
    nodes: usize,
    next: usize,
    /// Variables are a last resort above this depth.
    min_depth: usize,
}

impl Gen<'_> {
    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.45) {
            let a = self.cfg.atoms.choose(&mut self.rng).unwrap();
            return Formula::atom(a);
        }
        if self.rng.gen_bool(0.55) {
            Formula::arrow(self.formula(depth - 1), self.formula(depth - 1))
        } else {
            Formula::boxed(self.formula(depth - 1))
        }
    }

    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("x{}", self.next)
    }

    fn spend(&mut self) -> bool {
        if self.nodes == 0 {
            return false;
        }
        self.nodes -= 1;
        true
    }

    fn term(&mut self, ctx: &TypingContext, ty: &Formula, h: usize) -> Option<Term> {
        let vars: Vec<&String> = ctx.decls().iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        // 0 var, 1 intro, 2 app
        let mut order: Vec<u8> = Vec::new();
        if !vars.is_empty() {
            order.push(0);
        }
        if h > 0 && self.nodes > 0 {
            if !ty.is_atom() {
                order.push(1);
            }
            order.push(2);
        }
        order.shuffle(&mut self.rng);
        // variables get priority most of the time so terms stay small
        let depth = self.cfg.max_size - h;
        if !vars.is_empty() && depth >= self.min_depth && self.rng.gen_bool(0.4) {
            order.retain(|c| *c != 0);
            order.insert(0, 0);
        } else if depth < self.min_depth && order.first() == Some(&0) {
            order.rotate_left(1);
        }
        for c in order {
            let t = match c {
                0 => Some(Term::var(vars.choose(&mut self.rng).unwrap())),
                1 => self.intro(ctx, ty, h),
                _ => self.app(ctx, ty, h),
            };
            if t.is_some() {
                return t;
            }
        }
        None
    }

    fn intro(&mut self, ctx: &TypingContext, ty: &Formula, h: usize) -> Option<Term> {
        if !self.spend() {
            return None;
        }
        match ty {
            Formula::Arrow(a, b) => {
                let x = self.fresh();
                let inner = ctx.with(&x, (**a).clone()).ok()?;
                let body = self.term(&inner, b, h - 1)?;
                Some(Term::abs(&x, (**a).clone(), body))
            }
            Formula::Box(b) => {
                for _ in 0..3 {
                    if let Some(t) = self.let_term(ctx, b, h) {
                        return Some(t);
                    }
                }
                None
            }
            Formula::Atom(_) => None,
        }
    }

    fn let_term(&mut self, ctx: &TypingContext, b: &Formula, h: usize) -> Option<Term> {
        let k = [0usize, 1, 1, 2, 2, 3].choose(&mut self.rng).copied().unwrap();
        let boxed: Vec<Formula> = ctx
            .decls()
            .iter()
            .filter_map(|(_, t)| match t {
                Formula::Box(c) => Some((**c).clone()),
                _ => None,
            })
            .collect();
        let mut bindings: Vec<(String, Term)> = Vec::new();
        let mut inner = TypingContext::new();
        for i in 0..k {
            let c = match self.rng.gen_range(0..4) {
                0 | 1 if !boxed.is_empty() => boxed.choose(&mut self.rng).unwrap().clone(),
                0 if i == 0 => b.clone(),
                2 => Formula::arrow(self.formula(0), b.clone()),
                _ => self.formula(1),
            };
            let bc = Formula::boxed(c.clone());
            // a let in bound position is a β2 redex
            let nested = if h >= 2 && self.rng.gen_bool(0.25) { self.intro(ctx, &bc, h - 1) } else { None };
            let Some(n) = nested.or_else(|| self.term(ctx, &bc, h - 1)) else { continue };
            let x = self.fresh();
            inner.push(&x, c.clone()).ok()?;
            bindings.push((x, n.clone()));
            if self.rng.gen_bool(0.3) {
                let y = self.fresh();
                inner.push(&y, c).ok()?;
                bindings.push((y, n));
            }
        }
        let body = self.term(&inner, b, h - 1)?;
        Some(Term::boxsubst(body, bindings))
    }

    fn app(&mut self, ctx: &TypingContext, ty: &Formula, h: usize) -> Option<Term> {
        if !self.spend() {
            return None;
        }
        let doms: Vec<Formula> = ctx
            .decls()
            .iter()
            .filter_map(|(_, t)| match t {
                Formula::Arrow(a, b) if **b == *ty => Some((**a).clone()),
                _ => None,
            })
            .collect();
        let a = match doms.choose(&mut self.rng) {
            Some(a) if self.rng.gen_bool(0.7) => a.clone(),
            _ => self.formula(1),
        };
        let f = self.term(ctx, &Formula::arrow(a.clone(), ty.clone()), h - 1)?;
        let x = self.term(ctx, &a, h - 1)?;
        Some(Term::app(f, x))
    }
}

/// `count` typable terms from a seeded generator. Terms contain every kind of
/// redex; duplicates up to renaming are dropped.
pub fn generate_terms(seed: u64, count: usize, cfg: &GenConfig) -> Vec<CorpusTerm> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), cfg, nodes: 0, next: 0, min_depth: 0 };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < count * 1000 {
        attempts += 1;
        let n = g.rng.gen_range(0..=3usize);
        let hyps: Vec<Formula> = (0..n).map(|_| g.formula(2)).collect();
        let ctx = TypingContext::auto_named(&hyps);
        let goal = match hyps.iter().find_map(|h| h.flatten().1.is_atom().then(|| h.flatten().1.clone())) {
            Some(c) if g.rng.gen_bool(0.3) => c,
            _ if g.rng.gen_bool(0.35) => Formula::boxed(g.formula(1)),
            _ => g.formula(2),
        };
        g.nodes = g.rng.gen_range(cfg.max_nodes / 4..=cfg.max_nodes);
        g.next = 0;
        g.min_depth = g.rng.gen_range(0..=6);
        let Some(t) = g.term(&ctx, &goal, cfg.max_size) else { continue };
        let t = canonicalize_avoiding(&t, &ctx.names());
        // mostly skip the near-trivial terms the generator likes to produce
        if size(&t) > cfg.max_size || (size(&t) < 2 && g.rng.gen_bool(0.97)) || type_of(&ctx, &t).as_ref() != Ok(&goal) {
            continue;
        }
        let key = format!("{:?}|{}|{:?}", ctx.types(), alpha_key(&t), goal);
        if seen.insert(key) {
            out.push(CorpusTerm { context: ctx, term: t, ty: goal });
        }
    }
    out
}

/// The finite universe an exhaustive term enumeration ranges over.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub context: TypingContext,
    pub goals: Vec<Formula>,
    /// Argument types of applications.
    pub cuts: Vec<Formula>,
    /// Types `C` of let bindings `x : C`.
    pub binding_types: Vec<Formula>,
    pub max_bindings: usize,
}

impl Vocabulary {
    /// `x:a, y:#a |- a, #a, a -> a, #a -> a`, cuts and bindings at `a`, at most
    /// one binding per let. Counts grow doubly exponentially in the size, so
    /// anything richer is out of reach at size 5.
    pub fn small() -> Vocabulary {
        let a = Formula::atom("a");
        let ba = Formula::boxed(a.clone());
        Vocabulary {
            context: TypingContext::from_decls(vec![("x".into(), a.clone()), ("y".into(), ba.clone())]).unwrap(),
            goals: vec![a.clone(), ba.clone(), Formula::arrow(a.clone(), a.clone()), Formula::arrow(ba, a.clone())],
            cuts: vec![a.clone()],
            binding_types: vec![a],
            max_bindings: 1,
        }
    }
}

/// Every typable term of size at most `max_size` over `vocab`, canonicalized,
/// without repetitions up to renaming.
pub fn enumerate_terms(vocab: &Vocabulary, max_size: usize) -> Vec<CorpusTerm> {
    let ctx = &vocab.context;
    let mut out = Vec::new();
    for g in &vocab.goals {
        let mut seen = BTreeSet::new();
        for t in vocab.all(ctx, g, max_size, 0) {
            let t = canonicalize_avoiding(&t, &ctx.names());
            if seen.insert(alpha_key(&t)) {
                out.push(CorpusTerm { context: ctx.clone(), term: t, ty: g.clone() });
            }
        }
    }
    out
}

impl Vocabulary {
    fn all(&self, ctx: &TypingContext, ty: &Formula, h: usize, depth: usize) -> Vec<Term> {
        let mut out: Vec<Term> =
            ctx.decls().iter().filter(|(_, t)| t == ty).map(|(x, _)| Term::var(x)).collect();
        if h == 0 {
            return out;
        }
        match ty {
            Formula::Arrow(a, b) => {
                let x = format!("z{depth}");
                let inner = ctx.with(&x, (**a).clone()).unwrap();
                for m in self.all(&inner, b, h - 1, depth + 1) {
                    out.push(Term::abs(&x, (**a).clone(), m));
                }
            }
            Formula::Box(b) => {
                // binding type lists up to the length bound
                let mut shapes: Vec<Vec<&Formula>> = vec![vec![]];
                let mut last = vec![vec![]];
                for _ in 0..self.max_bindings {
                    last = last
                        .iter()
                        .flat_map(|pre: &Vec<&Formula>| {
                            self.binding_types.iter().map(move |c| {
                                let mut v = pre.clone();
                                v.push(c);
                                v
                            })
                        })
                        .collect();
                    shapes.extend(last.iter().cloned());
                }
                for shape in shapes {
                    let names: Vec<String> = (0..shape.len()).map(|i| format!("w{depth}_{i}")).collect();
                    let inner = TypingContext::from_decls(
                        names.iter().cloned().zip(shape.iter().map(|c| (*c).clone())).collect(),
                    )
                    .unwrap();
                    let bodies = self.all(&inner, b, h - 1, depth + 1);
                    if bodies.is_empty() {
                        continue;
                    }
                    let mut bounds: Vec<Vec<Term>> = vec![vec![]];
                    for c in &shape {
                        let opts = self.all(ctx, &Formula::boxed((*c).clone()), h - 1, depth + 1);
                        bounds = bounds
                            .into_iter()
                            .flat_map(|pre| {
                                opts.iter().map(move |o| {
                                    let mut v = pre.clone();
                                    v.push(o.clone());
                                    v
                                })
                            })
                            .collect();
                    }
                    for ns in &bounds {
                        for m in &bodies {
                            out.push(Term::boxsubst(m.clone(), names.iter().cloned().zip(ns.iter().cloned()).collect()));
                        }
                    }
                }
            }
            Formula::Atom(_) => {}
        }
        for c in &self.cuts {
            let funs = self.all(ctx, &Formula::arrow(c.clone(), ty.clone()), h - 1, depth + 1);
            if funs.is_empty() {
                continue;
            }
            let args = self.all(ctx, c, h - 1, depth + 1);
            for f in &funs {
                for x in &args {
                    out.push(Term::app(f.clone(), x.clone()));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> SuiteResult {
        SuiteResult { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, ct: &CorpusTerm, r: Result<(), String>) {
        self.checked += 1;
        if let Err(e) = r {
            self.failures.push(format!("{}: {e}", ct.render()));
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn trace_of(ct: &CorpusTerm, s: NormStrategy) -> Result<Trace, String> {
    normalize(&ct.context, &ct.term, s, DEFAULT_MAX_STEPS).map(|(_, t)| t).map_err(|e| e.to_string())
}

fn nf_of(tr: &Trace) -> &Term {
    tr.steps.last().map(|(_, t)| t).unwrap_or(&tr.start)
}

fn pairs(tr: &Trace) -> impl Iterator<Item = (&Term, ReductionKind, &Term)> {
    let mut prev = &tr.start;
    tr.steps.iter().map(move |(r, t)| {
        let p = prev;
        prev = t;
        (p, r.kind, t)
    })
}

/// Every one-step reduct of the term and every step of the leftmost
/// normalization keeps the type.
pub fn check_subject_reduction(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let ty = type_of(ctx, &ct.term).map_err(|e| e.to_string())?;
    for r in find_redexes(ctx, &ct.term).map_err(|e| e.to_string())? {
        let n = step(ctx, &ct.term, &r).map_err(|e| e.to_string())?;
        match type_of(ctx, &n) {
            Ok(t) if t == ty => {}
            other => return Err(format!("{} gives {} : {other:?}", r.describe(), print_term(&n))),
        }
    }
    let tr = trace_of(ct, NormStrategy::Leftmost)?;
    for (_, k, n) in pairs(&tr) {
        if type_of(ctx, n).as_ref() != Ok(&ty) {
            return Err(format!("{} step to {} changes the type", k.name(), print_term(n)));
        }
    }
    Ok(())
}

/// Leftmost and rightmost normalization finish within the step budget.
pub fn check_termination(ct: &CorpusTerm) -> Result<(), String> {
    trace_of(ct, NormStrategy::Leftmost)?;
    trace_of(ct, NormStrategy::Rightmost)?;
    Ok(())
}

/// Every κ step along both traces lowers the κ measure.
pub fn check_kappa_decrease(ct: &CorpusTerm) -> Result<(), String> {
    for s in [NormStrategy::Leftmost, NormStrategy::Rightmost] {
        for (m, k, n) in pairs(&trace_of(ct, s)?) {
            if k.is_kappa() && kappa_measure(n) >= kappa_measure(m) {
                return Err(format!("{} step {} -> {} keeps κ", k.name(), print_term(m), print_term(n)));
            }
        }
    }
    Ok(())
}

/// The η step pattern on the sum of the two η measures: each η step either
/// lowers the sum or some further η step does.
pub fn check_eta_pattern(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let sum = |t: &Term| eta_measure(ctx, t).map(|(a, b)| a + b).map_err(|e| e.to_string());
    for s in [NormStrategy::Leftmost, NormStrategy::Rightmost] {
        for (m, k, n) in pairs(&trace_of(ct, s)?) {
            if !k.is_eta() {
                continue;
            }
            let before = sum(m)?;
            if sum(n)? < before {
                continue;
            }
            let mut rescued = false;
            for r in find_redexes(ctx, n).map_err(|e| e.to_string())? {
                if r.kind.is_eta() && sum(&step(ctx, n, &r).map_err(|e| e.to_string())?)? < before {
                    rescued = true;
                    break;
                }
            }
            if !rescued {
                return Err(format!(
                    "{} step {} -> {} leaves the η measure at {} and no further η step lowers it",
                    k.name(),
                    print_term(m),
                    print_term(n),
                    before
                ));
            }
        }
    }
    Ok(())
}

/// Every η step lowers [`eta_weight`].
pub fn check_eta_weight(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    for s in [NormStrategy::Leftmost, NormStrategy::Rightmost] {
        for (m, k, n) in pairs(&trace_of(ct, s)?) {
            if k.is_eta() {
                let (a, b) = (eta_weight(ctx, m).map_err(|e| e.to_string())?, eta_weight(ctx, n).map_err(|e| e.to_string())?);
                if b >= a {
                    return Err(format!("{} step {} -> {}: weight {a} -> {b}", k.name(), print_term(m), print_term(n)));
                }
            }
        }
    }
    Ok(())
}

pub const RANDOM_SEEDS: [u64; 3] = [1, 2, 3];

/// Leftmost, rightmost and three seeded random normal forms coincide.
pub fn check_confluence(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let left = nf_of(&trace_of(ct, NormStrategy::Leftmost)?).clone();
    let mut others = vec![NormStrategy::Rightmost];
    others.extend(RANDOM_SEEDS.map(NormStrategy::Random));
    let a = TypeAssignment { context: ctx.clone(), subject: left.clone(), ty: ct.ty.clone() };
    for s in others {
        let tr = trace_of(ct, s)?;
        let b = TypeAssignment { context: ctx.clone(), subject: nf_of(&tr).clone(), ty: ct.ty.clone() };
        if !alpha_eq_in_context(&a, &b).unwrap_or(false) {
            return Err(format!("{s:?} reaches {} but leftmost reaches {}", print_term(&b.subject), print_term(&left)));
        }
    }
    Ok(())
}

pub const REJOIN_STEPS: usize = 8;
const REJOIN_CAP: usize = 20_000;

/// Every pair of distinct one-step reducts has a common reduct within
/// [`REJOIN_STEPS`] steps on each side.
pub fn check_local_confluence(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let rs = find_redexes(ctx, &ct.term).map_err(|e| e.to_string())?;
    let reducts: Vec<Term> = rs.iter().map(|r| step(ctx, &ct.term, r)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            if !rejoin(ctx, &reducts[i], &reducts[j])? {
                return Err(format!("{} and {} do not rejoin within {REJOIN_STEPS} steps", rs[i].describe(), rs[j].describe()));
            }
        }
    }
    Ok(())
}

fn rejoin(ctx: &TypingContext, a: &Term, b: &Term) -> Result<bool, String> {
    let mut seen = [BTreeMap::new(), BTreeMap::new()];
    let mut frontier = [vec![a.clone()], vec![b.clone()]];
    for (side, t) in [a, b].into_iter().enumerate() {
        seen[side].insert(alpha_key(t), ());
    }
    if seen[0].keys().any(|k| seen[1].contains_key(k)) {
        return Ok(true);
    }
    for _ in 0..REJOIN_STEPS {
        for side in 0..2 {
            let mut next = Vec::new();
            for t in &frontier[side] {
                for r in find_redexes(ctx, t).map_err(|e| e.to_string())? {
                    let n = step(ctx, t, &r).map_err(|e| e.to_string())?;
                    let k = alpha_key(&n);
                    if seen[1 - side].contains_key(&k) {
                        return Ok(true);
                    }
                    if seen[side].insert(k, ()).is_none() {
                        next.push(n);
                    }
                }
            }
            if seen[side].len() > REJOIN_CAP {
                return Err(format!("more than {REJOIN_CAP} reducts explored"));
            }
            frontier[side] = next;
        }
    }
    Ok(false)
}

/// `is_normal` and `in_lambda_hat` agree on the term and its normal form.
pub fn check_characterization(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let mut terms = vec![ct.term.clone()];
    if let Ok(tr) = trace_of(ct, NormStrategy::Leftmost) {
        terms.extend(tr.steps.into_iter().map(|(_, t)| t));
    }
    for t in &terms {
        let n = is_normal(ctx, t).map_err(|e| e.to_string())?;
        let h = in_lambda_hat(ctx, t).map_err(|e| e.to_string())?;
        if n != h {
            return Err(format!("{}: is_normal = {n}, in_lambda_hat = {h}", print_term(t)));
        }
    }
    Ok(())
}

/// The canonical derivation of the normal form checks.
pub fn check_fck(ct: &CorpusTerm) -> Result<(), String> {
    let tr = trace_of(ct, NormStrategy::Leftmost)?;
    let d = fck_derive(&ct.context, nf_of(&tr)).map_err(|e| e.to_string())?;
    fck_check(&d).map_err(|v| format!("{v:?}"))
}

/// The normal form's strategy is a CK-WIS, leftmost and rightmost normal forms
/// give the same strategy, and the term survives the round trip.
pub fn check_correspondence(ct: &CorpusTerm) -> Result<(), String> {
    let ctx = &ct.context;
    let left = nf_of(&trace_of(ct, NormStrategy::Leftmost)?).clone();
    let right = nf_of(&trace_of(ct, NormStrategy::Rightmost)?).clone();
    let sl = strategy_of_term(ctx, &left).map_err(|e| e.to_string())?;
    let sr = strategy_of_term(ctx, &right).map_err(|e| e.to_string())?;
    if sl != sr {
        return Err("leftmost and rightmost normal forms have different strategies".into());
    }
    if !is_ck_wis(&arena_of_sequent(&ctx.types(), &ct.ty), &sl) {
        return Err(format!("strategy of {} is not a CK-WIS", print_term(&left)));
    }
    let r = roundtrip_term(ctx, &left).map_err(|e| e.to_string())?;
    if !r.roundtrip_ok {
        return Err(format!("round trip differs: {}", r.diff.unwrap_or_default()));
    }
    Ok(())
}

pub type Check = fn(&CorpusTerm) -> Result<(), String>;

pub fn suites() -> Vec<(&'static str, Check)> {
    vec![
        ("subject reduction", check_subject_reduction as Check),
        ("termination", check_termination),
        ("kappa decrease", check_kappa_decrease),
        ("eta pattern (sum of measures)", check_eta_pattern),
        ("eta weight decrease", check_eta_weight),
        ("confluence", check_confluence),
        ("characterization", check_characterization),
        ("fck check", check_fck),
        ("correspondence", check_correspondence),
    ]
}

/// Runs every suite; local confluence only on terms of size at most 8.
pub fn run_suites(terms: &[CorpusTerm]) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for (name, check) in suites() {
        let mut r = SuiteResult::new(name);
        for ct in terms {
            r.record(ct, check(ct));
        }
        out.push(r);
    }
    let mut r = SuiteResult::new("local confluence (size <= 8)");
    for ct in terms.iter().filter(|ct| size(&ct.term) <= 8) {
        r.record(ct, check_local_confluence(ct));
    }
    out.push(r);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| enumerate_formulas(&["a", "b"], n).len()).collect();
        assert_eq!(counts, [2, 8, 38, 224, 1514]);
    }

    #[test]
    fn generator_is_seeded_and_typed() {
        let cfg = GenConfig::default();
        let a = generate_terms(7, 50, &cfg);
        assert_eq!(a.len(), 50);
        assert_eq!(a, generate_terms(7, 50, &cfg));
        for ct in &a {
            assert_eq!(type_of(&ct.context, &ct.term).unwrap(), ct.ty);
            assert!(size(&ct.term) <= cfg.max_size);
        }
    }

    #[test]
    fn generator_covers_all_kinds() {
        let terms = generate_terms(1, 300, &GenConfig::default());
        let mut kinds = BTreeSet::new();
        for ct in &terms {
            for r in find_redexes(&ct.context, &ct.term).unwrap() {
                kinds.insert(r.kind);
            }
        }
        assert_eq!(kinds.len(), ReductionKind::ALL.len(), "{kinds:?}");
    }
}
