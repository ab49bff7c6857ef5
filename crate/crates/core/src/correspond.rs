//! Normal terms and CK strategies: the translation of FCK derivations into
//! strategies and its inverse.
//!
//! Both directions work on *located* views, where a move names the context
//! variable (or the goal) it lives in together with its tag inside that formula.
//! Identifying premise moves with conclusion moves is then a renaming of
//! locations plus a pointer shift.
//!
//! Two points need care when a premise view is grafted after a prefix `q`:
//! a move at the root of a hypothesis is justified by the goal root, so its
//! pointer goes to position 0 and not to the start of the graft; and in the
//! left box rule the argument views of a binding `x = f T..` are grafted after
//! every residue view that ends with a play of `x`'s root, not only after the
//! two-move prefix.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arena::{arena_of_sequent, box_body_tag, cod_tag, dom_tag, split_box_body, split_slot, Slot};
use crate::fck::{fck_check, fck_derive, is_applied, FckDerivation, FckError, FckRule, FckViolation};
use crate::games::{ck_report, Move, Strategy, View};
use crate::surface::{print_context, print_formula, print_term, strategy_to_json};
use crate::syntax::{
    alpha_eq_in_context, alpha_key, canonicalize_avoiding, subst_raw, Binding, Formula, SyntaxError, Term, TypeAssignment,
    TypingContext,
};
use crate::typing::TypeError;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorrespondError {
    #[error("invalid FCK derivation at premise path {:?}: {}", .0.path, .0.message)]
    InvalidDerivation(FckViolation),
    #[error(transparent)]
    Fck(#[from] FckError),
    #[error("not a CK-WIS: {0}")]
    NotCkWis(String),
    #[error("the trivial strategy denotes no term")]
    TrivialStrategy,
    #[error("cannot decompose the strategy at view {view}: {reason}")]
    DecompositionFailure { view: String, reason: String },
}

impl From<SyntaxError> for CorrespondError {
    fn from(e: SyntaxError) -> Self {
        CorrespondError::DecompositionFailure { view: String::new(), reason: e.to_string() }
    }
}

impl From<TypeError> for CorrespondError {
    fn from(e: TypeError) -> Self {
        CorrespondError::Fck(FckError::Type(e))
    }
}

/// Tag of the unique non-modal root.
pub fn root_tag(f: &Formula) -> String {
    match f {
        Formula::Atom(_) => String::new(),
        Formula::Box(a) => box_body_tag(&root_tag(a)),
        Formula::Arrow(..) => {
            let (doms, cod) = f.flatten();
            cod_tag(&root_tag(cod), doms.len())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Loc {
    /// `None` is the goal.
    hyp: Option<String>,
    tag: String,
}

impl Loc {
    fn goal(tag: impl Into<String>) -> Loc {
        Loc { hyp: None, tag: tag.into() }
    }

    fn hyp(x: &str, tag: impl Into<String>) -> Loc {
        Loc { hyp: Some(x.to_string()), tag: tag.into() }
    }
}

type LView = Vec<(Loc, Option<usize>)>;
type LStrat = BTreeSet<LView>;

fn render_lview(v: &LView) -> String {
    if v.is_empty() {
        return "ε".into();
    }
    v.iter()
        .map(|(l, p)| {
            let at = match &l.hyp {
                Some(x) => format!("{x}.{}", l.tag),
                None => format!("goal.{}", l.tag),
            };
            match p {
                Some(j) => format!("{at}^{j}"),
                None => at,
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_hyp_root(ctx: &TypingContext, l: &Loc) -> bool {
    match &l.hyp {
        Some(z) => ctx.get(z).is_some_and(|t| root_tag(t) == l.tag),
        None => false,
    }
}

fn relocate(s: &LStrat, mut f: impl FnMut(&Loc) -> Loc) -> LStrat {
    s.iter().map(|v| v.iter().map(|(l, p)| (f(l), *p)).collect()).collect()
}

fn base(goal: Loc, head: Loc) -> LStrat {
    let m0 = (goal, None);
    [vec![], vec![m0.clone()], vec![m0, (head, Some(0))]].into_iter().collect()
}

/// Grafts a premise view after `prefix`, sending its goal moves through `goal_to`.
fn graft(prefix: &LView, p: &LView, ctx: &TypingContext, goal_to: &dyn Fn(&str) -> Loc) -> LView {
    let k = prefix.len();
    let mut out = prefix.clone();
    for (l, ptr) in p {
        let ptr = match ptr {
            None => Some(k - 1),
            Some(0) if is_hyp_root(ctx, l) => Some(0),
            Some(j) => Some(j + k),
        };
        let l = match &l.hyp {
            None => goal_to(&l.tag),
            Some(_) => l.clone(),
        };
        out.push((l, ptr));
    }
    out
}

fn den(d: &FckDerivation) -> LStrat {
    let c = &d.conclusion;
    let ctx = &c.context;
    match d.rule {
        FckRule::Ax => {
            let Term::Var(x) = &c.subject else { unreachable!("checked derivation") };
            base(Loc::goal(""), Loc::hyp(x, ""))
        }
        FckRule::ArrowLAx => {
            let y = c.subject.head_var().expect("checked derivation");
            let yt = ctx.get(y).expect("checked derivation");
            let mut out = base(Loc::goal(""), Loc::hyp(y, root_tag(yt)));
            let prefix = out.iter().find(|v| v.len() == 2).cloned().unwrap();
            for (i, p) in d.premises.iter().enumerate() {
                let to = |t: &str| Loc::hyp(y, dom_tag(t, i));
                for v in den(p).iter().filter(|v| !v.is_empty()) {
                    out.insert(graft(&prefix, v, ctx, &to));
                }
            }
            out
        }
        FckRule::ArrowRStar => {
            let p = &d.premises[0];
            let (doms, _) = c.ty.flatten();
            let n = doms.len();
            let binders: BTreeMap<String, usize> = p
                .conclusion
                .context
                .decls()
                .iter()
                .filter(|(x, _)| !ctx.contains(x))
                .enumerate()
                .map(|(j, (x, _))| (x.clone(), j))
                .collect();
            relocate(&den(p), |l| match &l.hyp {
                None => Loc::goal(cod_tag(&l.tag, n)),
                Some(x) => match binders.get(x) {
                    Some(&j) => Loc::goal(dom_tag(&l.tag, j)),
                    None => l.clone(),
                },
            })
        }
        FckRule::KBox => {
            let Term::BoxSubst(_, bs) = &c.subject else { unreachable!("checked derivation") };
            let of: BTreeMap<&str, &str> = bs
                .iter()
                .map(|b| match &b.bound {
                    Term::Var(y) => (b.binder.as_str(), y.as_str()),
                    _ => unreachable!("checked derivation"),
                })
                .collect();
            relocate(&den(&d.premises[0]), |l| match &l.hyp {
                None => Loc::goal(box_body_tag(&l.tag)),
                Some(x) => Loc::hyp(of[x.as_str()], box_body_tag(&l.tag)),
            })
        }
        FckRule::ArrowLK => {
            let Term::BoxSubst(_, bs) = &c.subject else { unreachable!("checked derivation") };
            let residue = d.premises.last().unwrap();
            let Term::BoxSubst(_, rbs) = &residue.conclusion.subject else { unreachable!("checked derivation") };
            let rctx = &residue.conclusion.context;
            // residue variable -> (head, arity, index of its first argument premise)
            let mut heads: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
            let mut first = 0;
            for (b, rb) in bs.iter().zip(rbs) {
                if is_applied(&b.bound) {
                    let Term::Var(x) = &rb.bound else { unreachable!("checked derivation") };
                    let k = b.bound.spine().1.len();
                    heads.insert(x.clone(), (b.bound.head_var().unwrap().to_string(), k, first));
                    first += k;
                }
            }
            let d0 = den(residue);
            let mut out = d0.clone();
            for q in &d0 {
                let Some((last, _)) = q.last() else { continue };
                let Some(x) = &last.hyp else { continue };
                let Some((f, k, first)) = heads.get(x) else { continue };
                if q.len() % 2 != 0 || last.tag != root_tag(rctx.get(x).unwrap()) {
                    continue;
                }
                for j in 0..*k {
                    let to = |t: &str| Loc::hyp(f, dom_tag(t, j));
                    for v in den(&d.premises[first + j]).iter().filter(|v| !v.is_empty()) {
                        out.insert(graft(q, v, ctx, &to));
                    }
                }
            }
            relocate(&out, |l| match l.hyp.as_ref().and_then(|x| heads.get(x)) {
                Some((f, k, _)) => Loc::hyp(f, cod_tag(&l.tag, *k)),
                None => l.clone(),
            })
        }
    }
}

fn to_strategy(ctx: &TypingContext, s: &LStrat) -> Strategy {
    let n = ctx.len();
    let pos: BTreeMap<&str, usize> = ctx.decls().iter().enumerate().map(|(i, (x, _))| (x.as_str(), i)).collect();
    Strategy::from_views(s.iter().map(|v| View {
        moves: v
            .iter()
            .map(|(l, p)| {
                let tag = match &l.hyp {
                    Some(x) => dom_tag(&l.tag, pos[x.as_str()]),
                    None => cod_tag(&l.tag, n),
                };
                Move::new(&tag, *p)
            })
            .collect(),
    }))
}

fn located(ctx: &TypingContext, s: &Strategy) -> Option<LStrat> {
    let n = ctx.len();
    let mut out = LStrat::new();
    for v in &s.views {
        let mut lv = LView::new();
        for m in &v.moves {
            let l = match split_slot(&m.vertex.0, n)? {
                (Slot::Dom(i), t) => Loc::hyp(&ctx.decls()[i].0, t),
                (Slot::Cod, t) => Loc::goal(t),
            };
            lv.push((l, m.pointer));
        }
        out.insert(lv);
    }
    Some(out)
}

/// The strategy of a checked FCK derivation, on the arena of its conclusion.
pub fn strategy_of_derivation(d: &FckDerivation) -> Result<Strategy, CorrespondError> {
    fck_check(d).map_err(CorrespondError::InvalidDerivation)?;
    Ok(to_strategy(&d.conclusion.context, &den(d)))
}

pub fn strategy_of_term(ctx: &TypingContext, t: &Term) -> Result<Strategy, CorrespondError> {
    strategy_of_derivation(&fck_derive(ctx, t)?)
}

fn failure(v: &LView, reason: impl Into<String>) -> CorrespondError {
    CorrespondError::DecompositionFailure { view: render_lview(v), reason: reason.into() }
}

struct Rebuild {
    next: usize,
}

enum Zone {
    Inside,
    /// In the boxed codomain of an applied head with this many arguments.
    HeadCod(usize),
    Outside,
}

fn zone(ctx: &TypingContext, l: &Loc) -> Zone {
    let Some(y) = &l.hyp else { return Zone::Inside };
    let ty = ctx.get(y).expect("located in context");
    if ty.is_box() {
        return Zone::Inside;
    }
    let (doms, cod) = ty.flatten();
    match split_slot(&l.tag, doms.len()) {
        Some((Slot::Cod, _)) if cod.is_box() => Zone::HeadCod(doms.len()),
        _ => Zone::Outside,
    }
}

impl Rebuild {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("v{}", self.next)
    }

    /// Views continuing `prefix` into argument `j` of `head`, as a strategy
    /// for that argument.
    fn extract(&self, s: &LStrat, prefix: &LView, head: &str, nargs: usize, j: usize) -> Result<LStrat, CorrespondError> {
        let k = prefix.len();
        let mut out: LStrat = [vec![]].into_iter().collect();
        for v in s {
            if v.len() <= k || v[..k] != prefix[..] {
                continue;
            }
            let (l0, _) = &v[k];
            if l0.hyp.as_deref() != Some(head) || !matches!(split_slot(&l0.tag, nargs), Some((Slot::Dom(i), _)) if i == j) {
                continue;
            }
            let mut owned = Vec::new();
            let mut lv = LView::new();
            for (l, ptr) in &v[k..] {
                let (goal, ptr) = match *ptr {
                    Some(p) if p + 1 == k && owned.is_empty() => (true, None),
                    Some(0) => (false, Some(0)),
                    Some(p) if p >= k => (owned[p - k], Some(p - k)),
                    _ => return Err(failure(v, "pointer leaves the argument")),
                };
                owned.push(goal);
                let l = if goal {
                    match (l.hyp.as_deref(), split_slot(&l.tag, nargs)) {
                        (Some(h), Some((Slot::Dom(i), t))) if h == head && i == j => Loc::goal(t),
                        _ => return Err(failure(v, "argument move outside the argument")),
                    }
                } else {
                    l.clone()
                };
                lv.push((l, ptr));
            }
            out.insert(lv);
        }
        Ok(out)
    }

    fn term(&mut self, ctx: &TypingContext, goal: &Formula, s: &LStrat) -> Result<Term, CorrespondError> {
        let opening = s.iter().find(|v| v.len() == 1).ok_or(CorrespondError::TrivialStrategy)?;
        match goal {
            Formula::Arrow(..) => {
                let (doms, cod) = goal.flatten();
                let n = doms.len();
                let mut inner = ctx.clone();
                let mut xs = Vec::new();
                for a in &doms {
                    let x = self.fresh();
                    inner.push(&x, (*a).clone())?;
                    xs.push(x);
                }
                let mut bad = None;
                let moved = relocate(s, |l| match (&l.hyp, split_slot(&l.tag, n)) {
                    (Some(_), _) => l.clone(),
                    (None, Some((Slot::Dom(j), t))) => Loc::hyp(&xs[j], t),
                    (None, Some((Slot::Cod, t))) => Loc::goal(t),
                    (None, None) => {
                        bad = Some(l.tag.clone());
                        l.clone()
                    }
                });
                if let Some(t) = bad {
                    return Err(failure(opening, format!("no goal vertex with tag {t}")));
                }
                let body = self.term(&inner, cod, &moved)?;
                Ok(xs.iter().zip(&doms).rev().fold(body, |b, (x, a)| Term::abs(x, (*a).clone(), b)))
            }
            Formula::Atom(_) => {
                let v = s.iter().find(|v| v.len() == 2).ok_or_else(|| failure(opening, "no answer to the opening"))?;
                let (l, _) = &v[1];
                let y = l.hyp.as_deref().ok_or_else(|| failure(v, "answer in the goal"))?;
                let yt = ctx.get(y).ok_or_else(|| failure(v, "unknown head"))?;
                let (doms, cod) = yt.flatten();
                if l.tag != root_tag(yt) || cod != goal {
                    return Err(failure(v, format!("`{y}` cannot head a term of type {}", print_formula(goal))));
                }
                if doms.is_empty() {
                    if s.iter().any(|w| w.len() > 2) {
                        return Err(failure(v, "moves after an axiom"));
                    }
                    return Ok(Term::var(y));
                }
                let mut args = Vec::new();
                for (j, a) in doms.iter().enumerate() {
                    let sub = self.extract(s, v, y, doms.len(), j)?;
                    args.push(self.term(ctx, a, &sub)?);
                }
                Ok(Term::apps(Term::var(y), args))
            }
            Formula::Box(cbody) => {
                let applied = s.iter().flatten().any(|(l, _)| !matches!(zone(ctx, l), Zone::Inside));
                if applied {
                    self.left_box(ctx, goal, s)
                } else {
                    self.kbox(ctx, cbody, s)
                }
            }
        }
    }

    fn kbox(&mut self, ctx: &TypingContext, cbody: &Formula, s: &LStrat) -> Result<Term, CorrespondError> {
        let mut binder: BTreeMap<String, String> = BTreeMap::new();
        let mut inner = TypingContext::new();
        for v in s {
            for (l, _) in v {
                let Some(y) = &l.hyp else { continue };
                if binder.contains_key(y) {
                    continue;
                }
                let Some(Formula::Box(a)) = ctx.get(y) else { return Err(failure(v, "unboxed hypothesis under a box")) };
                let x = self.fresh();
                inner.push(&x, (**a).clone())?;
                binder.insert(y.clone(), x);
            }
        }
        let mut bad = None;
        let moved = relocate(s, |l| {
            let Some(t) = split_box_body(&l.tag) else {
                bad = Some(l.clone());
                return l.clone();
            };
            match &l.hyp {
                None => Loc::goal(t),
                Some(y) => Loc::hyp(&binder[y], t),
            }
        });
        if let Some(l) = bad {
            return Err(failure(&vec![(l, None)], "move outside a box body"));
        }
        let body = self.term(&inner, cbody, &moved)?;
        let bindings = binder.into_iter().map(|(y, x)| (x, Term::Var(y))).collect();
        Ok(Term::boxsubst(body, bindings))
    }

    fn left_box(&mut self, ctx: &TypingContext, goal: &Formula, s: &LStrat) -> Result<Term, CorrespondError> {
        // bindings found so far, keyed by head and argument terms up to renaming
        let mut keys: BTreeMap<(String, Vec<String>), usize> = BTreeMap::new();
        let mut bound: Vec<(String, Term, Formula)> = Vec::new();
        let mut at: BTreeMap<LView, usize> = BTreeMap::new();
        let mut residue = LStrat::new();
        for v in s {
            let mut owner: Vec<Option<usize>> = Vec::new();
            let mut inside = true;
            for (i, (l, ptr)) in v.iter().enumerate() {
                let z = zone(ctx, l);
                if matches!(z, Zone::Outside) {
                    inside = false;
                    break;
                }
                let mut o = None;
                if let Zone::HeadCod(k) = z {
                    let f = l.hyp.as_ref().unwrap();
                    let ft = ctx.get(f).unwrap();
                    if i % 2 == 1 && *ptr == Some(0) && l.tag == root_tag(ft) {
                        let q = v[..=i].to_vec();
                        let b = match at.get(&q) {
                            Some(&b) => b,
                            None => {
                                let (doms, cod) = ft.flatten();
                                let mut args = Vec::new();
                                for (j, a) in doms.iter().enumerate() {
                                    let sub = self.extract(s, &q, f, k, j)?;
                                    args.push(self.term(ctx, a, &sub)?);
                                }
                                let key = (f.clone(), args.iter().map(alpha_key).collect());
                                let b = match keys.get(&key) {
                                    Some(&b) => b,
                                    None => {
                                        bound.push((self.fresh(), Term::apps(Term::var(f), args), cod.clone()));
                                        keys.insert(key, bound.len() - 1);
                                        bound.len() - 1
                                    }
                                };
                                at.insert(q, b);
                                b
                            }
                        };
                        o = Some(b);
                    } else {
                        o = ptr.and_then(|p| owner.get(p).copied().flatten());
                        if o.is_none() {
                            return Err(failure(v, "head codomain move without a binding"));
                        }
                    }
                }
                owner.push(o);
            }
            if !inside {
                continue;
            }
            let lv = v
                .iter()
                .zip(&owner)
                .map(|((l, p), o)| match o {
                    Some(b) => {
                        let k = ctx.get(l.hyp.as_ref().unwrap()).unwrap().flatten().0.len();
                        let (_, t) = split_slot(&l.tag, k).unwrap();
                        (Loc::hyp(&bound[*b].0, t), *p)
                    }
                    None => (l.clone(), *p),
                })
                .collect();
            residue.insert(lv);
        }
        if bound.is_empty() {
            return Err(failure(&vec![], "no applied head is played"));
        }
        let mut rctx = ctx.clone();
        for (x, _, ty) in &bound {
            rctx.push(x, ty.clone())?;
        }
        let Term::BoxSubst(m, bs) = self.term(&rctx, goal, &residue)? else {
            return Err(failure(&vec![], "residue is not a let"));
        };
        let by_name: BTreeMap<&str, &Term> = bound.iter().map(|(x, t, _)| (x.as_str(), t)).collect();
        let bs = bs
            .into_iter()
            .map(|b| match &b.bound {
                Term::Var(x) if by_name.contains_key(x.as_str()) => {
                    Binding { binder: b.binder, bound: by_name[x.as_str()].clone() }
                }
                _ => b,
            })
            .collect();
        Ok(Term::BoxSubst(m, bs))
    }
}

/// The canonical term of a non-trivial CK-WIS on the arena of `hyps |- goal`,
/// with context variables `v1, v2, ...`, and its FCK derivation.
pub fn term_of_strategy(hyps: &[Formula], goal: &Formula, s: &Strategy) -> Result<(Term, FckDerivation), CorrespondError> {
    let arena = arena_of_sequent(hyps, goal);
    let report = ck_report(&arena, s);
    if !report.ok() {
        return Err(CorrespondError::NotCkWis(report.problems.join("; ")));
    }
    if s.is_trivial() {
        return Err(CorrespondError::TrivialStrategy);
    }
    let ctx = TypingContext::auto_named(hyps);
    let ls = located(&ctx, s).ok_or_else(|| CorrespondError::NotCkWis("vertex outside the arena".into()))?;
    let mut rb = Rebuild { next: hyps.len() };
    let t = rb.term(&ctx, goal, &ls)?;
    let t = canonicalize_avoiding(&t, &ctx.names());
    let d = fck_derive(&ctx, &t)?;
    Ok((t, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub context: TypingContext,
    pub term: Term,
    pub ty: Formula,
    pub derivation: FckDerivation,
    pub strategy: Strategy,
    pub roundtrip_ok: bool,
    /// First difference when the round trip fails.
    pub diff: Option<String>,
}

impl CorrespondenceReport {
    pub fn to_json(&self) -> Value {
        let arena_formula = Formula::curried(&self.context.types(), self.ty.clone());
        let strategy: Value = serde_json::from_str(&strategy_to_json(&arena_formula, &self.strategy)).unwrap();
        json!({
            "context": print_context(&self.context),
            "term": print_term(&self.term),
            "type": print_formula(&self.ty),
            "derivation": self.derivation.to_json(),
            "strategy": strategy,
            "roundtrip_ok": self.roundtrip_ok,
            "diff": self.diff,
        })
    }
}

/// First position where two terms disagree, descending while the shapes agree.
fn first_difference(a: &Term, b: &Term) -> Option<String> {
    if alpha_key(a) == alpha_key(b) {
        return None;
    }
    let kids: Option<Vec<(&Term, &Term)>> = match (a, b) {
        (Term::App(f1, x1), Term::App(f2, x2)) => Some(vec![(f1, f2), (x1, x2)]),
        (Term::Abs(_, t1, m1), Term::Abs(_, t2, m2)) if t1 == t2 => Some(vec![(m1, m2)]),
        (Term::BoxSubst(m1, b1), Term::BoxSubst(m2, b2)) if b1.len() == b2.len() => {
            let mut v: Vec<(&Term, &Term)> = b1.iter().zip(b2).map(|(x, y)| (&x.bound, &y.bound)).collect();
            v.push((m1, m2));
            Some(v)
        }
        _ => None,
    };
    let found = kids.and_then(|ks| ks.into_iter().find(|(x, y)| alpha_key(x) != alpha_key(y)));
    match found {
        // binders differ only by name below a matching node; the keys tell them apart
        Some((x, y)) if !matches!((a, b), (Term::Abs(..), _) | (Term::BoxSubst(..), _)) => first_difference(x, y),
        _ => Some(format!("{} vs {}", print_term(a), print_term(b))),
    }
}

pub fn roundtrip_term(ctx: &TypingContext, t: &Term) -> Result<CorrespondenceReport, CorrespondError> {
    let d = fck_derive(ctx, t)?;
    let strategy = strategy_of_derivation(&d)?;
    let ty = d.conclusion.ty.clone();
    let (back, bd) = term_of_strategy(&ctx.types(), &ty, &strategy)?;
    let original = TypeAssignment { context: ctx.clone(), subject: t.clone(), ty: ty.clone() };
    let rebuilt = TypeAssignment { context: bd.conclusion.context.clone(), subject: back.clone(), ty: ty.clone() };
    let roundtrip_ok = alpha_eq_in_context(&original, &rebuilt).unwrap_or(false);
    let diff = (!roundtrip_ok).then(|| {
        let names: BTreeMap<String, Term> = bd
            .conclusion
            .context
            .decls()
            .iter()
            .zip(ctx.decls())
            .map(|((v, _), (x, _))| (v.clone(), Term::var(x)))
            .collect();
        let renamed = subst_raw(&back, &names);
        first_difference(t, &renamed).unwrap_or_else(|| format!("{} vs {}", print_term(t), print_term(&back)))
    });
    Ok(CorrespondenceReport { context: ctx.clone(), term: t.clone(), ty, derivation: d, strategy, roundtrip_ok, diff })
}

pub fn roundtrip_strategy(hyps: &[Formula], goal: &Formula, s: &Strategy) -> Result<CorrespondenceReport, CorrespondError> {
    let (term, derivation) = term_of_strategy(hyps, goal, s)?;
    let back = strategy_of_derivation(&derivation)?;
    let roundtrip_ok = back == *s;
    let diff = (!roundtrip_ok).then(|| {
        let v = s.views.symmetric_difference(&back.views).next().unwrap();
        let side = if s.views.contains(v) { "missing after the round trip" } else { "extra after the round trip" };
        format!("view {} {side}", v.render())
    });
    Ok(CorrespondenceReport {
        context: derivation.conclusion.context.clone(),
        term,
        ty: goal.clone(),
        derivation,
        strategy: s.clone(),
        roundtrip_ok,
        diff,
    })
}
