//! βηκ reduction: redexes, steps, strategies, measures and normal forms.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::surface::print_term;
use crate::syntax::{
    alpha_key, canonicalize_avoiding, fresh_avoiding, free_vars, occurrences, rename_free, replace_at,
    subst_raw, subterm_at, Binding, Formula, Path, Step, Term, TypingContext,
};
use crate::typing::{type_of, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ReductionKind {
    Beta1,
    Beta2,
    Kappa1,
    Kappa2,
    Eta1,
    Eta2,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::Beta1,
        ReductionKind::Beta2,
        ReductionKind::Kappa1,
        ReductionKind::Kappa2,
        ReductionKind::Eta1,
        ReductionKind::Eta2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Beta1 => "beta1",
            ReductionKind::Beta2 => "beta2",
            ReductionKind::Kappa1 => "kappa1",
            ReductionKind::Kappa2 => "kappa2",
            ReductionKind::Eta1 => "eta1",
            ReductionKind::Eta2 => "eta2",
        }
    }

    pub fn is_beta(self) -> bool {
        matches!(self, ReductionKind::Beta1 | ReductionKind::Beta2)
    }

    pub fn is_kappa(self) -> bool {
        matches!(self, ReductionKind::Kappa1 | ReductionKind::Kappa2)
    }

    pub fn is_eta(self) -> bool {
        matches!(self, ReductionKind::Eta1 | ReductionKind::Eta2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Detail {
    None,
    Binding(usize),
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Redex {
    pub path: Path,
    pub kind: ReductionKind,
    pub detail: Detail,
}

impl Redex {
    pub fn describe(&self) -> String {
        let path: Vec<String> = self
            .path
            .iter()
            .map(|s| match s {
                Step::Fun => "fun".to_string(),
                Step::Arg => "arg".to_string(),
                Step::Body => "body".to_string(),
                Step::Bound(i) => format!("bound{i}"),
            })
            .collect();
        let at = if path.is_empty() { "ε".to_string() } else { path.join(".") };
        match self.detail {
            Detail::None => format!("{} at {at}", self.kind.name()),
            Detail::Binding(i) => format!("{} at {at} on binding {i}", self.kind.name()),
            Detail::Pair(i, j) => format!("{} at {at} on bindings {i},{j}", self.kind.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<(Redex, Term)>,
}

impl Trace {
    pub fn render(&self) -> String {
        let mut s = format!("0  {}\n", print_term(&self.start));
        for (i, (r, t)) in self.steps.iter().enumerate() {
            s.push_str(&format!("{}  {}  [{}]\n", i + 1, print_term(t), r.describe()));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("illegal redex: {0}")]
    IllegalRedex(String),
    #[error("no normal form within {0} steps")]
    StepBudgetExceeded(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Position {
    Root,
    Fun,
    Arg,
    AbsBody,
    LetBody,
    Bound(usize),
}

/// A typed subterm occurrence.
#[derive(Clone, Debug)]
pub struct Site<'a> {
    pub path: Path,
    pub term: &'a Term,
    pub ty: Formula,
    pub position: Position,
}

/// Types every occurrence, carrying local contexts down the tree.
pub fn annotate<'a>(ctx: &TypingContext, t: &'a Term) -> Result<Vec<Site<'a>>, TypeError> {
    let mut out = Vec::new();
    go(ctx, t, &mut Vec::new(), Position::Root, &mut out)?;
    return Ok(out);

    fn go<'a>(
        ctx: &TypingContext,
        t: &'a Term,
        path: &mut Path,
        position: Position,
        out: &mut Vec<Site<'a>>,
    ) -> Result<Formula, TypeError> {
        let ty = match t {
            Term::Var(_) => type_of(ctx, t)?,
            Term::Abs(x, a, b) => {
                let inner = ctx.with(x, a.clone()).map_err(|_| TypeError::ShadowedContext(x.clone()))?;
                path.push(Step::Body);
                let bt = go(&inner, b, path, Position::AbsBody, out)?;
                path.pop();
                Formula::arrow(a.clone(), bt)
            }
            Term::App(f, a) => {
                path.push(Step::Fun);
                let ft = go(ctx, f, path, Position::Fun, out)?;
                path.pop();
                path.push(Step::Arg);
                let at = go(ctx, a, path, Position::Arg, out)?;
                path.pop();
                match ft {
                    Formula::Arrow(d, c) if *d == at => *c,
                    Formula::Arrow(d, _) => {
                        return Err(TypeError::ArgumentMismatch {
                            term: a.to_string(),
                            expected: d.to_string(),
                            found: at.to_string(),
                        })
                    }
                    other => return Err(TypeError::NotAFunction { term: f.to_string(), ty: other.to_string() }),
                }
            }
            Term::BoxSubst(m, bs) => {
                let mut inner = TypingContext::new();
                for (i, b) in bs.iter().enumerate() {
                    path.push(Step::Bound(i));
                    let bt = go(ctx, &b.bound, path, Position::Bound(i), out)?;
                    path.pop();
                    if ctx.contains(&b.binder) {
                        return Err(TypeError::ShadowedContext(b.binder.clone()));
                    }
                    match bt {
                        Formula::Box(a) => inner
                            .push(&b.binder, *a)
                            .map_err(|_| TypeError::ShadowedContext(b.binder.clone()))?,
                        other => {
                            return Err(TypeError::NotBoxed { term: b.bound.to_string(), ty: other.to_string() })
                        }
                    }
                }
                path.push(Step::Body);
                let mt = go(&inner, m, path, Position::LetBody, out)?;
                path.pop();
                Formula::boxed(mt)
            }
        };
        out.push(Site { path: path.clone(), term: t, ty: ty.clone(), position });
        Ok(ty)
    }
}

fn is_eta1_site(s: &Site) -> bool {
    s.ty.is_arrow() && !s.term.is_abs() && s.position != Position::Fun
}

fn is_eta2_site(s: &Site) -> bool {
    s.ty.is_box() && !s.term.is_boxsubst() && !matches!(s.position, Position::Bound(_))
}

pub fn find_redexes(ctx: &TypingContext, t: &Term) -> Result<Vec<Redex>, TypeError> {
    let sites = annotate(ctx, t)?;
    let mut out = Vec::new();
    for s in &sites {
        let at = |kind, detail| Redex { path: s.path.clone(), kind, detail };
        if let Term::App(f, _) = s.term {
            if f.is_abs() {
                out.push(at(ReductionKind::Beta1, Detail::None));
            }
        }
        if let Term::BoxSubst(m, bs) = s.term {
            for (i, b) in bs.iter().enumerate() {
                if b.bound.is_boxsubst() {
                    out.push(at(ReductionKind::Beta2, Detail::Binding(i)));
                }
                if occurrences(m, &b.binder) == 0 {
                    out.push(at(ReductionKind::Kappa1, Detail::Binding(i)));
                }
            }
            let keys: Vec<String> = bs.iter().map(|b| alpha_key(&b.bound)).collect();
            for i in 0..bs.len() {
                for j in i + 1..bs.len() {
                    if keys[i] == keys[j] {
                        out.push(at(ReductionKind::Kappa2, Detail::Pair(i, j)));
                    }
                }
            }
        }
        if is_eta1_site(s) {
            out.push(at(ReductionKind::Eta1, Detail::None));
        }
        if is_eta2_site(s) {
            out.push(at(ReductionKind::Eta2, Detail::None));
        }
    }
    out.sort();
    Ok(out)
}

pub fn step(ctx: &TypingContext, t: &Term, r: &Redex) -> Result<Term, RewriteError> {
    let redexes = find_redexes(ctx, t)?;
    if !redexes.contains(r) {
        return Err(RewriteError::IllegalRedex(r.describe()));
    }
    apply(ctx, t, r)
}

/// Performs a redex already known to be legal.
fn apply(ctx: &TypingContext, t: &Term, r: &Redex) -> Result<Term, RewriteError> {
    let illegal = || RewriteError::IllegalRedex(r.describe());
    let sub = subterm_at(t, &r.path).ok_or_else(illegal)?;
    let new = match (r.kind, sub, r.detail) {
        (ReductionKind::Beta1, Term::App(f, n), _) => match &**f {
            Term::Abs(x, _, m) => subst_raw(m, &[(x.clone(), (**n).clone())].into()),
            _ => return Err(illegal()),
        },
        (ReductionKind::Beta2, Term::BoxSubst(m, bs), Detail::Binding(i)) => {
            let Term::BoxSubst(r_body, inner) = &bs[i].bound else { return Err(illegal()) };
            let mut taken: BTreeSet<String> =
                bs.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, b)| b.binder.clone()).collect();
            taken.extend(free_vars(m));
            let mut r_body = (**r_body).clone();
            let mut spliced = Vec::new();
            for b in inner {
                let mut w = b.binder.clone();
                if taken.contains(&w) {
                    let mut av = taken.clone();
                    av.extend(free_vars(&r_body));
                    av.extend(inner.iter().map(|b| b.binder.clone()));
                    let w2 = fresh_avoiding(&w, &av);
                    r_body = rename_free(&r_body, &w, &w2);
                    w = w2;
                }
                taken.insert(w.clone());
                spliced.push(Binding { binder: w, bound: b.bound.clone() });
            }
            let body = subst_raw(m, &[(bs[i].binder.clone(), r_body)].into());
            let mut bindings: Vec<Binding> = bs[..i].to_vec();
            bindings.extend(spliced);
            bindings.extend(bs[i + 1..].iter().cloned());
            Term::BoxSubst(Box::new(body), bindings)
        }
        (ReductionKind::Kappa1, Term::BoxSubst(m, bs), Detail::Binding(i)) => {
            let mut bs = bs.clone();
            bs.remove(i);
            Term::BoxSubst(m.clone(), bs)
        }
        (ReductionKind::Kappa2, Term::BoxSubst(m, bs), Detail::Pair(i, j)) => {
            let mut avoid: BTreeSet<String> = bs.iter().map(|b| b.binder.clone()).collect();
            avoid.extend(free_vars(m));
            let v = fresh_avoiding("v", &avoid);
            let reps: BTreeMap<String, Term> = [
                (bs[i].binder.clone(), Term::Var(v.clone())),
                (bs[j].binder.clone(), Term::Var(v.clone())),
            ]
            .into();
            let body = subst_raw(m, &reps);
            let mut bs = bs.clone();
            bs[i].binder = v;
            bs.remove(j);
            Term::BoxSubst(Box::new(body), bs)
        }
        (ReductionKind::Eta1, p, _) => {
            let sites = annotate(ctx, t)?;
            let site = sites.iter().find(|s| s.path == r.path).ok_or_else(illegal)?;
            let Formula::Arrow(a, _) = &site.ty else { return Err(illegal()) };
            let x = fresh_avoiding("x", &free_vars(p));
            Term::abs(&x, (**a).clone(), Term::app(p.clone(), Term::Var(x.clone())))
        }
        (ReductionKind::Eta2, p, _) => {
            let x = fresh_avoiding("x", &free_vars(p));
            Term::boxsubst(Term::Var(x.clone()), vec![(x, p.clone())])
        }
        _ => return Err(illegal()),
    };
    let whole = replace_at(t, &r.path, new).ok_or_else(illegal)?;
    Ok(canonicalize_avoiding(&whole, &ctx.names()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormStrategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

impl std::str::FromStr for NormStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<NormStrategy, String> {
        match s {
            "leftmost" => Ok(NormStrategy::Leftmost),
            "rightmost" => Ok(NormStrategy::Rightmost),
            _ => match s.strip_prefix("random=") {
                Some(n) => n.parse().map(NormStrategy::Random).map_err(|e| format!("bad seed: {e}")),
                None => Err(format!("unknown strategy `{s}` (leftmost, rightmost, random=SEED)")),
            },
        }
    }
}

pub const DEFAULT_MAX_STEPS: usize = 500;

pub fn normalize(
    ctx: &TypingContext,
    t: &Term,
    strategy: NormStrategy,
    max_steps: usize,
) -> Result<(Term, Trace), RewriteError> {
    normalize_with(ctx, t, strategy, max_steps, |_| true)
}

/// Normalizes with respect to the reductions whose kind passes `allowed`.
pub fn normalize_with(
    ctx: &TypingContext,
    t: &Term,
    strategy: NormStrategy,
    max_steps: usize,
    allowed: impl Fn(ReductionKind) -> bool,
) -> Result<(Term, Trace), RewriteError> {
    let mut rng = match strategy {
        NormStrategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = canonicalize_avoiding(t, &ctx.names());
    let mut trace = Trace { start: cur.clone(), steps: Vec::new() };
    loop {
        let rs: Vec<Redex> = find_redexes(ctx, &cur)?.into_iter().filter(|r| allowed(r.kind)).collect();
        if rs.is_empty() {
            return Ok((cur, trace));
        }
        if trace.steps.len() >= max_steps {
            return Err(RewriteError::StepBudgetExceeded(max_steps));
        }
        let r = match strategy {
            NormStrategy::Leftmost => rs[0].clone(),
            NormStrategy::Rightmost => rs[rs.len() - 1].clone(),
            NormStrategy::Random(_) => {
                let i = rng.as_mut().unwrap().gen_range(0..rs.len());
                rs[i].clone()
            }
        };
        cur = apply(ctx, &cur, &r)?;
        trace.steps.push((r, cur.clone()));
    }
}

/// β-normal form (β1 and β2 only).
pub fn nf_beta(ctx: &TypingContext, t: &Term, max_steps: usize) -> Result<Term, RewriteError> {
    normalize_with(ctx, t, NormStrategy::Leftmost, max_steps, ReductionKind::is_beta).map(|(n, _)| n)
}

pub fn eta_measure(ctx: &TypingContext, t: &Term) -> Result<(usize, usize), TypeError> {
    let sites = annotate(ctx, t)?;
    let e1 = sites.iter().filter(|s| is_eta1_site(s)).map(|s| s.ty.arrow_weight()).sum();
    let e2 = sites.iter().filter(|s| is_eta2_site(s)).map(|s| s.ty.box_weight()).sum();
    Ok((e1, e2))
}

/// Every η site weighted by both of its type weights. Unlike the sum of the
/// two η components, this drops on every single η step.
pub fn eta_weight(ctx: &TypingContext, t: &Term) -> Result<usize, TypeError> {
    let sites = annotate(ctx, t)?;
    Ok(sites
        .iter()
        .filter(|s| is_eta1_site(s) || is_eta2_site(s))
        .map(|s| s.ty.arrow_weight() + s.ty.box_weight())
        .sum())
}

pub fn kappa_measure(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Abs(_, _, b) => kappa_measure(b),
        Term::App(f, a) => kappa_measure(f) + kappa_measure(a),
        Term::BoxSubst(m, bs) => {
            bs.len() + kappa_measure(m) + bs.iter().map(|b| kappa_measure(&b.bound)).sum::<usize>()
        }
    }
}

pub fn is_normal(ctx: &TypingContext, t: &Term) -> Result<bool, TypeError> {
    Ok(find_redexes(ctx, t)?.is_empty())
}

/// Direct check of the inductive clauses of the normal-form set.
pub fn in_lambda_hat(ctx: &TypingContext, t: &Term) -> Result<bool, TypeError> {
    type_of(ctx, t)?;
    Ok(hat(ctx, t))
}

fn hat(ctx: &TypingContext, t: &Term) -> bool {
    match t {
        Term::Abs(x, a, b) => match ctx.with(x, a.clone()) {
            Ok(inner) => hat(&inner, b),
            Err(_) => false,
        },
        Term::BoxSubst(m, bs) => {
            let mut inner = TypingContext::new();
            let mut keys = BTreeSet::new();
            for b in bs {
                let Ok(Formula::Box(ty)) = type_of(ctx, &b.bound) else { return false };
                if !head_application(ctx, &b.bound) || !keys.insert(alpha_key(&b.bound)) {
                    return false;
                }
                if inner.push(&b.binder, *ty).is_err() {
                    return false;
                }
            }
            free_vars(m) == inner.names() && hat(&inner, m)
        }
        _ => {
            let Ok(ty) = type_of(ctx, t) else { return false };
            ty.is_atom() && head_application(ctx, t)
        }
    }
}

/// `y U1 ... Uk` with every `Ui` in normal form.
fn head_application(ctx: &TypingContext, t: &Term) -> bool {
    let (head, args) = t.spine();
    matches!(head, Term::Var(_)) && args.iter().all(|u| hat(ctx, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_sequent, print_term};

    fn parse(s: &str) -> (TypingContext, Term) {
        let p = parse_sequent(s).unwrap();
        (p.context, p.term.unwrap())
    }

    #[test]
    fn redex_examples() {
        let (c, t) = parse("y:a |- (\\x:a. x) y : a");
        let rs = find_redexes(&c, &t).unwrap();
        assert_eq!(rs, vec![Redex { path: vec![], kind: ReductionKind::Beta1, detail: Detail::None }]);
        let (c, t) = parse("z:#a, w:#b |- let x,y = z,w in x : #a");
        let rs = find_redexes(&c, &t).unwrap();
        assert_eq!(rs, vec![Redex { path: vec![], kind: ReductionKind::Kappa1, detail: Detail::Binding(1) }]);
        let (c, t) = parse("z:#a |- z : #a");
        let rs = find_redexes(&c, &t).unwrap();
        assert_eq!(rs, vec![Redex { path: vec![], kind: ReductionKind::Eta2, detail: Detail::None }]);
    }

    #[test]
    fn step_examples() {
        let (c, t) = parse("z:#a, w:#b |- let x,y = z,w in x : #a");
        let r = find_redexes(&c, &t).unwrap().remove(0);
        assert_eq!(print_term(&step(&c, &t, &r).unwrap()), "let x = z in x");
        let (c, t) = parse("u:#a |- let y = (let z = u in z) in y : #a");
        let r = Redex { path: vec![], kind: ReductionKind::Beta2, detail: Detail::Binding(0) };
        assert_eq!(print_term(&step(&c, &t, &r).unwrap()), "let z = u in z");
        let (c, t) = parse("u:#a, f:#(a->a->b) |- let g,y1,y2 = f,u,u in g y1 y2 : #b");
        let r = Redex { path: vec![], kind: ReductionKind::Kappa2, detail: Detail::Pair(1, 2) };
        let n = step(&c, &t, &r).unwrap();
        let Term::BoxSubst(m, bs) = &n else { panic!() };
        assert_eq!(bs.len(), 2);
        let v = &bs[1].binder;
        assert_eq!(**m, Term::apps(Term::var("g"), [Term::var(v), Term::var(v)]));
        let bad = Redex { path: vec![Step::Fun], kind: ReductionKind::Beta1, detail: Detail::None };
        assert!(matches!(step(&c, &t, &bad), Err(RewriteError::IllegalRedex(_))));
    }

    #[test]
    fn normalize_examples() {
        let (c, t) = parse("z:#a, w:#b |- let x,y = z,w in x : #a");
        let (n, _) = normalize(&c, &t, NormStrategy::Leftmost, 100).unwrap();
        assert_eq!(print_term(&n), "let x = z in x");
        let (c, t) = parse("z:#a |- z : #a");
        let (n, tr) = normalize(&c, &t, NormStrategy::Leftmost, 100).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert!(in_lambda_hat(&c, &n).unwrap());
        let (c, t) = parse("|- (\\x:(a->a). x)(\\y:a. y) : a -> a");
        let (n, _) = normalize(&c, &t, NormStrategy::Rightmost, 100).unwrap();
        assert!(crate::syntax::alpha_eq(&n, &crate::surface::parse_term("\\y:a. y").unwrap()));
    }

    #[test]
    fn measures() {
        let (c, t) = parse("x:a->b |- x : a -> b");
        assert_eq!(eta_measure(&c, &t).unwrap(), (1, 0));
        let (c, t) = parse("x:a->b |- \\y:a. x y : a -> b");
        assert_eq!(eta_measure(&c, &t).unwrap(), (0, 0));
        let t = crate::surface::parse_term("let x,y = z,w in x").unwrap();
        assert_eq!(kappa_measure(&t), 2);
        let t = crate::surface::parse_term("let x = (let y = u in y) in x").unwrap();
        assert_eq!(kappa_measure(&t), 2);
    }

    #[test]
    fn lambda_hat_examples() {
        let (c, t) = parse("z:#a |- let x = z in x : #a");
        assert!(in_lambda_hat(&c, &t).unwrap() && is_normal(&c, &t).unwrap());
        let (c, t) = parse("z:#a |- z : #a");
        assert!(!in_lambda_hat(&c, &t).unwrap() && !is_normal(&c, &t).unwrap());
        let (c, t) = parse("|- \\x:a. x : a -> a");
        assert!(in_lambda_hat(&c, &t).unwrap() && is_normal(&c, &t).unwrap());
    }
}
