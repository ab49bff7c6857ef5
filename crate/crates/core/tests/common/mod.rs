//! Test-only oracles, written from the rule definitions without going
//! through the library's own checkers.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use mck::fck::{FckDerivation, FckRule};
use mck::surface::{parse_formula, parse_sequent};
use mck::syntax::{alpha_eq, next_free_name, Binding, Formula, Term, TypeAssignment, TypingContext};

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

/// `ctx |- M : A` parsed into its parts.
pub fn assignment(s: &str) -> (TypingContext, Term, Formula) {
    let p = parse_sequent(s).unwrap();
    (p.context, p.term.expect("term"), p.goal)
}

type Env = BTreeMap<String, Formula>;

fn env(ctx: &TypingContext) -> Env {
    ctx.decls().iter().cloned().collect()
}

// ---------------------------------------------------------------- typing

/// Plain recursive type inference.
pub fn oracle_type(ctx: &TypingContext, t: &Term) -> Option<Formula> {
    infer(&env(ctx), t)
}

fn infer(g: &Env, t: &Term) -> Option<Formula> {
    match t {
        Term::Var(x) => g.get(x).cloned(),
        Term::Abs(x, a, body) => {
            let mut g2 = g.clone();
            g2.insert(x.clone(), a.clone());
            Some(Formula::arrow(a.clone(), infer(&g2, body)?))
        }
        Term::App(m, n) => match infer(g, m)? {
            Formula::Arrow(a, b) if infer(g, n)? == *a => Some(*b),
            _ => None,
        },
        Term::BoxSubst(m, bs) => {
            let mut inner = Env::new();
            for b in bs {
                let Formula::Box(a) = infer(g, &b.bound)? else { return None };
                if inner.insert(b.binder.clone(), *a).is_some() {
                    return None;
                }
            }
            Some(Formula::boxed(infer(&inner, m)?))
        }
    }
}

fn free(t: &Term) -> BTreeSet<String> {
    match t {
        Term::Var(x) => [x.clone()].into(),
        Term::Abs(x, _, b) => {
            let mut s = free(b);
            s.remove(x);
            s
        }
        Term::App(m, n) => &free(m) | &free(n),
        Term::BoxSubst(_, bs) => bs.iter().flat_map(|b| free(&b.bound)).collect(),
    }
}

fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut h = t;
    while let Term::App(m, n) = h {
        args.push(&**n);
        h = m;
    }
    args.reverse();
    (h, args)
}

fn uncurry(f: &Formula) -> (Vec<Formula>, Formula) {
    let mut doms = Vec::new();
    let mut c = f;
    while let Formula::Arrow(a, b) = c {
        doms.push((**a).clone());
        c = b;
    }
    (doms, c.clone())
}

/// `f T1 .. Tk` with `f` a variable and `k >= 1`.
fn applied(t: &Term) -> bool {
    matches!(t, Term::App(..)) && matches!(spine(t).0, Term::Var(_))
}

// ------------------------------------------------------------ normal forms

/// Membership in the set of η-long βκ-normal terms, read off the grammar:
/// atomic type: a variable applied to normal arguments; arrow type: an
/// abstraction of a normal body; box type: a let over pairwise distinct
/// variable or head-applied bound terms whose body uses exactly its binders.
pub fn oracle_normal(ctx: &TypingContext, t: &Term, ty: &Formula) -> bool {
    nf(&env(ctx), t, ty)
}

fn nf(g: &Env, t: &Term, ty: &Formula) -> bool {
    match ty {
        Formula::Arrow(a, b) => match t {
            Term::Abs(x, ann, body) if ann == &**a => {
                let mut g2 = g.clone();
                g2.insert(x.clone(), ann.clone());
                nf(&g2, body, b)
            }
            _ => false,
        },
        Formula::Atom(_) => head_normal(g, t, ty),
        Formula::Box(c) => {
            let Term::BoxSubst(m, bs) = t else { return false };
            let mut inner = Env::new();
            for (i, b) in bs.iter().enumerate() {
                let Some(Formula::Box(a)) = infer(g, &b.bound) else { return false };
                let shape_ok = match &b.bound {
                    Term::Var(_) => true,
                    n if applied(n) => head_normal(g, n, &Formula::boxed((*a).clone())),
                    _ => false,
                };
                if !shape_ok || bs[..i].iter().any(|o| alpha_eq(&o.bound, &b.bound)) {
                    return false;
                }
                if inner.insert(b.binder.clone(), *a).is_some() {
                    return false;
                }
            }
            let binders: BTreeSet<String> = inner.keys().cloned().collect();
            free(m) == binders && nf(&inner, m, c)
        }
    }
}

fn head_normal(g: &Env, t: &Term, ty: &Formula) -> bool {
    let (h, args) = spine(t);
    let Term::Var(y) = h else { return false };
    let Some(yt) = g.get(y) else { return false };
    let (doms, cod) = uncurry(yt);
    doms.len() == args.len() && cod == *ty && args.iter().zip(&doms).all(|(a, d)| nf(g, a, d))
}

// ------------------------------------------------------- FCK enumeration

fn node(rule: FckRule, ctx: &TypingContext, t: &Term, ty: &Formula, premises: Vec<FckDerivation>) -> FckDerivation {
    FckDerivation {
        rule,
        conclusion: TypeAssignment { context: ctx.clone(), subject: t.clone(), ty: ty.clone() },
        premises,
    }
}

fn product(choices: Vec<Vec<FckDerivation>>) -> Vec<Vec<FckDerivation>> {
    let mut out = vec![vec![]];
    for c in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for d in &c {
                let mut p = prefix.clone();
                p.push(d.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Every derivation of `ctx |- t : ty` in the focused system, found by
/// trying every rule instance whose conclusion matches, including partial
/// abstraction blocks and every subset of applied bindings for the left box
/// rule. Contexts are kept up to exchange.
pub fn fck_derivations(ctx: &TypingContext, t: &Term, ty: &Formula) -> Vec<FckDerivation> {
    let mut out = Vec::new();
    let g = env(ctx);

    // ax
    if let Term::Var(x) = t {
        if ty.is_atom() && g.get(x) == Some(ty) {
            out.push(node(FckRule::Ax, ctx, t, ty, vec![]));
        }
    }

    // ->R*, any nonempty prefix of the abstraction block, ending at a non-arrow type
    let mut inner = ctx.clone();
    let mut body = t;
    let mut rest = ty;
    while let (Term::Abs(x, a, b), Formula::Arrow(dom, cod)) = (body, rest) {
        if a != &**dom || inner.push(x, a.clone()).is_err() {
            break;
        }
        body = b;
        rest = cod;
        if !rest.is_arrow() {
            for p in fck_derivations(&inner, body, rest) {
                out.push(node(FckRule::ArrowRStar, ctx, t, ty, vec![p]));
            }
        }
    }

    // ->L^ax
    let (h, args) = spine(t);
    if let (Term::Var(y), false) = (h, args.is_empty()) {
        if let Some(yt) = g.get(y) {
            let (doms, cod) = uncurry(yt);
            if doms.len() == args.len() && cod.is_atom() && cod == *ty {
                let choices = args.iter().zip(&doms).map(|(a, d)| fck_derivations(ctx, a, d)).collect();
                for ps in product(choices) {
                    out.push(node(FckRule::ArrowLAx, ctx, t, ty, ps));
                }
            }
        }
    }

    if let (Term::BoxSubst(m, bs), Formula::Box(c)) = (t, ty) {
        out.extend(kbox(ctx, &g, t, m, bs, c, ty));
        out.extend(left_k(ctx, &g, t, m, bs, ty));
    }
    out
}

fn kbox(ctx: &TypingContext, g: &Env, t: &Term, m: &Term, bs: &[Binding], c: &Formula, ty: &Formula) -> Vec<FckDerivation> {
    let mut inner = TypingContext::new();
    for b in bs {
        let Term::Var(y) = &b.bound else { return vec![] };
        let Some(Formula::Box(a)) = g.get(y) else { return vec![] };
        if g.contains_key(&b.binder) || inner.push(&b.binder, (**a).clone()).is_err() {
            return vec![];
        }
    }
    if free(m) != inner.names() {
        return vec![];
    }
    fck_derivations(&inner, m, c).into_iter().map(|p| node(FckRule::KBox, ctx, t, ty, vec![p])).collect()
}

fn left_k(ctx: &TypingContext, g: &Env, t: &Term, m: &Term, bs: &[Binding], ty: &Formula) -> Vec<FckDerivation> {
    let idx: Vec<usize> = (0..bs.len()).filter(|&i| applied(&bs[i].bound)).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << idx.len()) {
        let split: Vec<usize> = idx.iter().enumerate().filter(|(j, _)| mask & (1 << j) != 0).map(|(_, &i)| i).collect();
        let mut avoid = ctx.names();
        avoid.extend(bs.iter().map(|b| b.binder.clone()));
        let mut rctx = ctx.clone();
        let mut rbs = bs.to_vec();
        let mut choices = Vec::new();
        let mut ok = true;
        for &i in &split {
            let (h, args) = spine(&bs[i].bound);
            let Term::Var(fname) = h else { unreachable!() };
            let Some(ft) = g.get(fname) else {
                ok = false;
                break;
            };
            let (doms, cod) = uncurry(ft);
            if doms.len() != args.len() || !cod.is_box() {
                ok = false;
                break;
            }
            for (a, d) in args.iter().zip(&doms) {
                choices.push(fck_derivations(ctx, a, d));
            }
            let x = next_free_name("x", &avoid);
            avoid.insert(x.clone());
            rctx.push(&x, cod).unwrap();
            rbs[i].bound = Term::Var(x);
        }
        // side condition: no applied bound term survives in the residue
        if !ok || rbs.iter().any(|b| applied(&b.bound)) {
            continue;
        }
        let rt = Term::BoxSubst(Box::new(m.clone()), rbs);
        choices.push(fck_derivations(&rctx, &rt, ty));
        for ps in product(choices) {
            out.push(node(FckRule::ArrowLK, ctx, t, ty, ps));
        }
    }
    out
}

/// Derivation with every context sorted by name, for comparison up to exchange.
pub fn sorted(d: &FckDerivation) -> FckDerivation {
    let mut decls = d.conclusion.context.decls().to_vec();
    decls.sort();
    FckDerivation {
        rule: d.rule,
        conclusion: TypeAssignment {
            context: TypingContext::from_decls(decls).unwrap(),
            subject: d.conclusion.subject.clone(),
            ty: d.conclusion.ty.clone(),
        },
        premises: d.premises.iter().map(sorted).collect(),
    }
}

// ---------------------------------------------------------------- prover

/// Provability of `hyps |- goal` by backward search over sets of
/// hypotheses with a loop check on the current branch.
pub fn oracle_provable(hyps: &[Formula], goal: &Formula) -> bool {
    let g: BTreeSet<Formula> = hyps.iter().cloned().collect();
    Prover::default().prove(&g, goal)
}

#[derive(Default)]
struct Prover {
    branch: HashSet<(BTreeSet<Formula>, Formula)>,
}

impl Prover {
    fn prove(&mut self, g: &BTreeSet<Formula>, goal: &Formula) -> bool {
        if g.contains(goal) && goal.is_atom() {
            return true;
        }
        if let Formula::Arrow(a, b) = goal {
            let mut g2 = g.clone();
            g2.insert((**a).clone());
            return self.prove(&g2, b);
        }
        let key = (g.clone(), goal.clone());
        if !self.branch.insert(key.clone()) {
            return false;
        }
        let mut found = false;
        if let Formula::Box(a) = goal {
            let unboxed: BTreeSet<Formula> = g
                .iter()
                .filter_map(|h| match h {
                    Formula::Box(b) => Some((**b).clone()),
                    _ => None,
                })
                .collect();
            found = self.prove(&unboxed, a);
        }
        if !found {
            for h in g {
                let Formula::Arrow(a, b) = h else { continue };
                if g.contains(b) {
                    continue;
                }
                let mut g2 = g.clone();
                g2.insert((**b).clone());
                if self.prove(g, a) && self.prove(&g2, goal) {
                    found = true;
                    break;
                }
            }
        }
        self.branch.remove(&key);
        found
    }
}

// ---------------------------------------------------------------- arenas

/// Every path from `v` to a root along arrow edges, by plain recursion.
pub fn all_root_paths(arrow_edges: &BTreeSet<(String, String)>, v: &str) -> Vec<Vec<String>> {
    let succ: Vec<&String> = arrow_edges.iter().filter(|(a, _)| a == v).map(|(_, b)| b).collect();
    if succ.is_empty() {
        return vec![vec![v.to_string()]];
    }
    let mut out = Vec::new();
    for w in succ {
        for mut p in all_root_paths(arrow_edges, w) {
            p.insert(0, v.to_string());
            out.push(p);
        }
    }
    out
}

// ------------------------------------------------------ ND enumeration

fn subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if out.insert(f.clone()) {
        match f {
            Formula::Atom(_) => {}
            Formula::Box(a) => subformulas(a, out),
            Formula::Arrow(a, b) => {
                subformulas(a, out);
                subformulas(b, out);
            }
        }
    }
}

/// Subformulas of the oracle-inferred type of every subterm.
fn subterm_types(g: &Env, t: &Term, out: &mut BTreeSet<Formula>) {
    if let Some(ty) = infer(g, t) {
        subformulas(&ty, out);
    }
    match t {
        Term::Var(_) => {}
        Term::Abs(x, a, b) => {
            let mut g2 = g.clone();
            g2.insert(x.clone(), a.clone());
            subterm_types(&g2, b, out);
        }
        Term::App(m, n) => {
            subterm_types(g, m, out);
            subterm_types(g, n, out);
        }
        Term::BoxSubst(m, bs) => {
            let mut inner = Env::new();
            for b in bs {
                subterm_types(g, &b.bound, out);
                if let Some(Formula::Box(a)) = infer(g, &b.bound) {
                    inner.insert(b.binder.clone(), *a);
                }
            }
            subterm_types(&inner, m, out);
        }
    }
}

/// Number of natural-deduction derivations of `ctx |- t : ty`, trying every
/// cut formula of a finite pool (subformulas of the context, the goal and
/// the subterm types) at each application and let.
pub fn nd_derivation_count(ctx: &TypingContext, t: &Term, ty: &Formula) -> usize {
    let mut pool = BTreeSet::new();
    ctx.types().iter().for_each(|f| subformulas(f, &mut pool));
    subformulas(ty, &mut pool);
    subterm_types(&env(ctx), t, &mut pool);
    let pool: Vec<Formula> = pool.into_iter().collect();
    nd_count(&env(ctx), t, ty, &pool)
}

fn nd_count(g: &Env, t: &Term, ty: &Formula, pool: &[Formula]) -> usize {
    match t {
        Term::Var(x) => usize::from(g.get(x) == Some(ty)),
        Term::Abs(x, a, body) => match ty {
            Formula::Arrow(d, c) if **d == *a => {
                let mut g2 = g.clone();
                g2.insert(x.clone(), a.clone());
                nd_count(&g2, body, c, pool)
            }
            _ => 0,
        },
        Term::App(m, n) => pool
            .iter()
            .map(|a| {
                let k = nd_count(g, n, a, pool);
                if k == 0 { 0 } else { k * nd_count(g, m, &Formula::arrow(a.clone(), ty.clone()), pool) }
            })
            .sum(),
        Term::BoxSubst(m, bs) => {
            let Formula::Box(c) = ty else { return 0 };
            // every assignment of binder types from the pool
            let mut partial: Vec<(Env, usize)> = vec![(Env::new(), 1)];
            for b in bs {
                let mut next = Vec::new();
                for (inner, k) in &partial {
                    for a in pool {
                        let kb = nd_count(g, &b.bound, &Formula::boxed(a.clone()), pool);
                        if kb > 0 && !inner.contains_key(&b.binder) {
                            let mut i2 = inner.clone();
                            i2.insert(b.binder.clone(), a.clone());
                            next.push((i2, k * kb));
                        }
                    }
                }
                partial = next;
            }
            partial.iter().map(|(inner, k)| k * nd_count(inner, m, c, pool)).sum()
        }
    }
}
