//! Formulas, terms, contexts and the structural operations on them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Atom(String),
    Arrow(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn arrow(dom: Formula, cod: Formula) -> Formula {
        Formula::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn boxed(body: Formula) -> Formula {
        Formula::Box(Box::new(body))
    }

    /// Builds `(A1,...,An) -> C`.
    pub fn curried(args: &[Formula], cod: Formula) -> Formula {
        args.iter()
            .rev()
            .fold(cod, |acc, a| Formula::arrow(a.clone(), acc))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Formula::Arrow(..))
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Formula::Box(_))
    }

    /// Splits `A1 -> ... -> An -> C` with `C` not an arrow.
    pub fn flatten(&self) -> (Vec<&Formula>, &Formula) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Formula::Arrow(d, c) = cur {
            args.push(&**d);
            cur = c;
        }
        (args, cur)
    }

    /// Number of arrows, boxes are transparent.
    pub fn arrow_weight(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Arrow(d, c) => d.arrow_weight() + c.arrow_weight() + 1,
            Formula::Box(b) => b.arrow_weight(),
        }
    }

    /// Number of boxes, arrows are transparent.
    pub fn box_weight(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Arrow(d, c) => d.box_weight() + c.box_weight(),
            Formula::Box(b) => b.box_weight() + 1,
        }
    }

    pub fn connectives(&self) -> usize {
        self.arrow_weight() + self.box_weight()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(a) => {
                    out.insert(a.clone());
                }
                Formula::Arrow(d, c) => {
                    go(d, out);
                    go(c, out);
                }
                Formula::Box(b) => go(b, out),
            }
        }
        go(self, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binding {
    pub binder: String,
    pub bound: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Abs(String, Formula, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `let x1,...,xn = N1,...,Nn in M`; the binders scope over `M` only.
    BoxSubst(Box<Term>, Vec<Binding>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn abs(x: &str, ann: Formula, body: Term) -> Term {
        Term::Abs(x.to_string(), ann, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn boxsubst(body: Term, bindings: Vec<(String, Term)>) -> Term {
        Term::BoxSubst(
            Box::new(body),
            bindings
                .into_iter()
                .map(|(binder, bound)| Binding { binder, bound })
                .collect(),
        )
    }

    pub fn is_abs(&self) -> bool {
        matches!(self, Term::Abs(..))
    }

    pub fn is_boxsubst(&self) -> bool {
        matches!(self, Term::BoxSubst(..))
    }

    /// Splits `h U1 ... Uk` into the head and its arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    /// The head variable of an application spine, if the head is a variable.
    pub fn head_var(&self) -> Option<&str> {
        match self.spine().0 {
            Term::Var(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    Fun,
    Arg,
    Body,
    Bound(usize),
}

pub type Path = Vec<Step>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("variable `{0}` declared twice in context")]
    DuplicateVariable(String),
    #[error("contexts or result types differ: {0}")]
    ContextMismatch(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypingContext {
    decls: Vec<(String, Formula)>,
}

impl TypingContext {
    pub fn new() -> TypingContext {
        TypingContext::default()
    }

    pub fn from_decls(decls: Vec<(String, Formula)>) -> Result<TypingContext, SyntaxError> {
        let mut seen = BTreeSet::new();
        for (x, _) in &decls {
            if !seen.insert(x.clone()) {
                return Err(SyntaxError::DuplicateVariable(x.clone()));
            }
        }
        Ok(TypingContext { decls })
    }

    /// Context `v1:A1, ..., vn:An`.
    pub fn auto_named(types: &[Formula]) -> TypingContext {
        TypingContext {
            decls: types
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("v{}", i + 1), t.clone()))
                .collect(),
        }
    }

    pub fn push(&mut self, x: &str, ty: Formula) -> Result<(), SyntaxError> {
        if self.contains(x) {
            return Err(SyntaxError::DuplicateVariable(x.to_string()));
        }
        self.decls.push((x.to_string(), ty));
        Ok(())
    }

    pub fn with(&self, x: &str, ty: Formula) -> Result<TypingContext, SyntaxError> {
        let mut c = self.clone();
        c.push(x, ty)?;
        Ok(c)
    }

    pub fn get(&self, x: &str) -> Option<&Formula> {
        self.decls.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.get(x).is_some()
    }

    pub fn decls(&self) -> &[(String, Formula)] {
        &self.decls
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.decls.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn types(&self) -> Vec<Formula> {
        self.decls.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn retain(&self, keep: impl Fn(&str, &Formula) -> bool) -> TypingContext {
        TypingContext {
            decls: self
                .decls
                .iter()
                .filter(|(x, t)| keep(x, t))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeAssignment {
    pub context: TypingContext,
    pub subject: Term,
    pub ty: Formula,
}

static FRESH: AtomicUsize = AtomicUsize::new(0);

fn base_name(name: &str) -> &str {
    match name.rfind("__") {
        Some(i) if i > 0 && name[i + 2..].chars().all(|c| c.is_ascii_digit()) => &name[..i],
        _ => name,
    }
}

/// A name never handed out before, derived from `base`.
pub fn fresh(base: &str) -> String {
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    format!("{}__{}", base_name(base), n)
}

pub fn fresh_avoiding(base: &str, avoid: &BTreeSet<String>) -> String {
    loop {
        let x = fresh(base);
        if !avoid.contains(&x) {
            return x;
        }
    }
}

/// Smallest `base__k` (k = 1, 2, ...) not in `avoid`. Deterministic.
pub fn next_free_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let b = base_name(base);
    (1..)
        .map(|k| format!("{b}__{k}"))
        .find(|x| !avoid.contains(x))
        .unwrap()
}

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_fv(t, &mut Vec::new(), &mut out);
    out
}

fn collect_fv(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Abs(x, _, b) => {
            bound.push(x.clone());
            collect_fv(b, bound, out);
            bound.pop();
        }
        Term::App(f, a) => {
            collect_fv(f, bound, out);
            collect_fv(a, bound, out);
        }
        Term::BoxSubst(_, bs) => {
            for b in bs {
                collect_fv(&b.bound, bound, out);
            }
        }
    }
}

pub fn occurrences(t: &Term, x: &str) -> usize {
    match t {
        Term::Var(y) => usize::from(y == x),
        Term::Abs(y, _, b) => {
            if y == x {
                0
            } else {
                occurrences(b, x)
            }
        }
        Term::App(f, a) => occurrences(f, x) + occurrences(a, x),
        Term::BoxSubst(_, bs) => bs.iter().map(|b| occurrences(&b.bound, x)).sum(),
    }
}

pub fn size(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Abs(_, _, b) => 1 + size(b),
        Term::App(f, a) => 1 + size(f).max(size(a)),
        Term::BoxSubst(m, bs) => {
            1 + bs
                .iter()
                .map(|b| size(&b.bound))
                .fold(size(m), usize::max)
        }
    }
}

/// Every subterm occurrence with its path, in path order.
pub fn subterms(t: &Term) -> Vec<(Path, Term)> {
    let mut out = Vec::new();
    fn go(t: &Term, path: &mut Path, out: &mut Vec<(Path, Term)>) {
        out.push((path.clone(), t.clone()));
        match t {
            Term::Var(_) => {}
            Term::Abs(_, _, b) => {
                path.push(Step::Body);
                go(b, path, out);
                path.pop();
            }
            Term::App(f, a) => {
                path.push(Step::Fun);
                go(f, path, out);
                path.pop();
                path.push(Step::Arg);
                go(a, path, out);
                path.pop();
            }
            Term::BoxSubst(m, bs) => {
                path.push(Step::Body);
                go(m, path, out);
                path.pop();
                for (i, b) in bs.iter().enumerate() {
                    path.push(Step::Bound(i));
                    go(&b.bound, path, out);
                    path.pop();
                }
            }
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn subterm_at<'a>(t: &'a Term, path: &[Step]) -> Option<&'a Term> {
    let mut cur = t;
    for s in path {
        cur = match (cur, s) {
            (Term::Abs(_, _, b), Step::Body) => b,
            (Term::App(f, _), Step::Fun) => f,
            (Term::App(_, a), Step::Arg) => a,
            (Term::BoxSubst(m, _), Step::Body) => m,
            (Term::BoxSubst(_, bs), Step::Bound(i)) => &bs.get(*i)?.bound,
            _ => return None,
        };
    }
    Some(cur)
}

/// Replaces the occurrence at `path` (no capture checks; callers keep scoping sound).
pub fn replace_at(t: &Term, path: &[Step], new: Term) -> Option<Term> {
    let Some((s, rest)) = path.split_first() else {
        return Some(new);
    };
    Some(match (t, s) {
        (Term::Abs(x, a, b), Step::Body) => {
            Term::Abs(x.clone(), a.clone(), Box::new(replace_at(b, rest, new)?))
        }
        (Term::App(f, a), Step::Fun) => Term::App(Box::new(replace_at(f, rest, new)?), a.clone()),
        (Term::App(f, a), Step::Arg) => Term::App(f.clone(), Box::new(replace_at(a, rest, new)?)),
        (Term::BoxSubst(m, bs), Step::Body) => {
            Term::BoxSubst(Box::new(replace_at(m, rest, new)?), bs.clone())
        }
        (Term::BoxSubst(m, bs), Step::Bound(i)) => {
            let mut bs = bs.clone();
            let b = bs.get_mut(*i)?;
            b.bound = replace_at(&b.bound, rest, new)?;
            Term::BoxSubst(m.clone(), bs)
        }
        _ => return None,
    })
}

/// Simultaneous capture-avoiding substitution, without re-canonicalizing.
pub(crate) fn subst_raw(t: &Term, reps: &BTreeMap<String, Term>) -> Term {
    if reps.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(x) => reps.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, a) => Term::App(Box::new(subst_raw(f, reps)), Box::new(subst_raw(a, reps))),
        Term::BoxSubst(m, bs) => Term::BoxSubst(
            m.clone(),
            bs.iter()
                .map(|b| Binding {
                    binder: b.binder.clone(),
                    bound: subst_raw(&b.bound, reps),
                })
                .collect(),
        ),
        Term::Abs(x, ann, body) => {
            let body_fv = free_vars(body);
            let live: BTreeMap<String, Term> = reps
                .iter()
                .filter(|(y, _)| *y != x && body_fv.contains(*y))
                .map(|(y, n)| (y.clone(), n.clone()))
                .collect();
            if live.is_empty() {
                return t.clone();
            }
            let captured = live.values().any(|n| free_vars(n).contains(x));
            if captured {
                let mut avoid = body_fv;
                for n in live.values() {
                    avoid.extend(free_vars(n));
                }
                let x2 = fresh_avoiding(x, &avoid);
                let mut live = live;
                live.insert(x.clone(), Term::Var(x2.clone()));
                Term::Abs(x2, ann.clone(), Box::new(subst_raw(body, &live)))
            } else {
                Term::Abs(x.clone(), ann.clone(), Box::new(subst_raw(body, &live)))
            }
        }
    }
}

/// Simultaneous capture-avoiding substitution `t[N1/x1, ..., Nn/xn]`, re-canonicalized.
pub fn substitute(t: &Term, replacements: &[(String, Term)]) -> Term {
    let reps: BTreeMap<String, Term> = replacements.iter().cloned().collect();
    canonicalize(&subst_raw(t, &reps))
}

pub(crate) fn rename_free(t: &Term, from: &str, to: &str) -> Term {
    let mut reps = BTreeMap::new();
    reps.insert(from.to_string(), Term::var(to));
    subst_raw(t, &reps)
}

fn all_names(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Abs(x, _, b) => {
            out.insert(x.clone());
            all_names(b, out);
        }
        Term::App(m, n) => {
            all_names(m, out);
            all_names(n, out);
        }
        Term::BoxSubst(m, bs) => {
            all_names(m, out);
            for b in bs {
                out.insert(b.binder.clone());
                all_names(&b.bound, out);
            }
        }
    }
}

/// Gives generated binders (`x__12`) back a short name: the first of `x`,
/// `x1`, `x2`, ... that occurs nowhere in the term or in `reserved`.
pub fn tidy_names(t: &Term, reserved: &BTreeSet<String>) -> Term {
    let mut used = reserved.clone();
    all_names(t, &mut used);
    tidy(t, &mut used)
}

fn tidy_binder(x: &str, used: &mut BTreeSet<String>) -> Option<String> {
    let b = base_name(x);
    if b == x {
        return None;
    }
    let y = std::iter::once(b.to_string())
        .chain((1..).map(|k| format!("{b}{k}")))
        .find(|y| !used.contains(y))
        .unwrap();
    used.insert(y.clone());
    Some(y)
}

fn tidy(t: &Term, used: &mut BTreeSet<String>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(m, n) => Term::app(tidy(m, used), tidy(n, used)),
        Term::Abs(x, a, body) => match tidy_binder(x, used) {
            Some(y) => Term::abs(&y, a.clone(), tidy(&rename_free(body, x, &y), used)),
            None => Term::abs(x, a.clone(), tidy(body, used)),
        },
        Term::BoxSubst(m, bs) => {
            let mut m = (**m).clone();
            let mut out = Vec::new();
            for b in bs {
                let binder = match tidy_binder(&b.binder, used) {
                    Some(y) => {
                        m = rename_free(&m, &b.binder, &y);
                        y
                    }
                    None => b.binder.clone(),
                };
                out.push(Binding { binder, bound: tidy(&b.bound, used) });
            }
            Term::BoxSubst(Box::new(tidy(&m, used)), out)
        }
    }
}

pub fn canonicalize(t: &Term) -> Term {
    canonicalize_avoiding(t, &BTreeSet::new())
}

/// Renames binders clashing with `extra`, with free names of `t`, or with an
/// enclosing binder, then sorts every binding list.
pub fn canonicalize_avoiding(t: &Term, extra: &BTreeSet<String>) -> Term {
    let mut avoid = free_vars(t);
    avoid.extend(extra.iter().cloned());
    canon(t, &mut Vec::new(), &avoid)
}

fn canon(t: &Term, scope: &mut Vec<String>, avoid: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, a) => Term::App(Box::new(canon(f, scope, avoid)), Box::new(canon(a, scope, avoid))),
        Term::Abs(x, ann, body) => {
            let (x, body) = if avoid.contains(x) || scope.contains(x) {
                let mut av: BTreeSet<String> = avoid.clone();
                av.extend(scope.iter().cloned());
                av.extend(free_vars(body));
                let x2 = fresh_avoiding(x, &av);
                let b = rename_free(body, x, &x2);
                (x2, b)
            } else {
                (x.clone(), (**body).clone())
            };
            scope.push(x.clone());
            let body = canon(&body, scope, avoid);
            scope.pop();
            Term::Abs(x, ann.clone(), Box::new(body))
        }
        Term::BoxSubst(m, bs) => {
            let mut body = (**m).clone();
            let mut binders: Vec<String> = bs.iter().map(|b| b.binder.clone()).collect();
            for i in 0..binders.len() {
                let y = binders[i].clone();
                if avoid.contains(&y) || scope.contains(&y) {
                    let mut av: BTreeSet<String> = avoid.clone();
                    av.extend(scope.iter().cloned());
                    av.extend(binders.iter().cloned());
                    av.extend(free_vars(&body));
                    let y2 = fresh_avoiding(&y, &av);
                    body = rename_free(&body, &y, &y2);
                    binders[i] = y2;
                }
            }
            let mut inner = binders.clone();
            let body = canon(&body, &mut inner, avoid);
            let bindings: Vec<Binding> = bs
                .iter()
                .zip(binders)
                .map(|(b, binder)| Binding {
                    binder,
                    bound: canon(&b.bound, scope, avoid),
                })
                .collect();
            Term::BoxSubst(Box::new(body.clone()), sort_bindings(&body, bindings))
        }
    }
}

/// Free-variable occurrences of `t` in path order (nested let bodies are opaque).
pub(crate) fn occurrence_order(t: &Term) -> Vec<String> {
    let mut out = Vec::new();
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Abs(x, _, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
            Term::BoxSubst(_, bs) => {
                for b in bs {
                    go(&b.bound, bound, out);
                }
            }
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

fn sort_bindings(body: &Term, bindings: Vec<Binding>) -> Vec<Binding> {
    let order = occurrence_order(body);
    let pos = |b: &Binding| order.iter().position(|x| *x == b.binder);
    let (mut used, vacuous): (Vec<Binding>, Vec<Binding>) =
        bindings.into_iter().partition(|b| pos(b).is_some());
    used.sort_by_key(|b| pos(b).unwrap());
    used.extend(vacuous);
    used
}

/// A string equal for two terms iff they are alpha-equivalent up to binding permutation.
pub fn alpha_key(t: &Term) -> String {
    let t = canonicalize(t);
    let mut out = String::new();
    key(&t, &mut Vec::new(), &mut out);
    out
}

fn key(t: &Term, scope: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Var(x) => match scope.iter().rposition(|y| y == x) {
            Some(i) => out.push_str(&format!("#{i}")),
            None => out.push_str(x),
        },
        Term::Abs(x, a, b) => {
            out.push_str(&format!("(\\:{}.", crate::surface::print_formula(a)));
            scope.push(x.clone());
            key(b, scope, out);
            scope.pop();
            out.push(')');
        }
        Term::App(f, a) => {
            out.push('(');
            key(f, scope, out);
            out.push(' ');
            key(a, scope, out);
            out.push(')');
        }
        Term::BoxSubst(m, bs) => {
            let order = occurrence_order(m);
            let mut used = Vec::new();
            let mut vac = Vec::new();
            for b in bs {
                let mut s = String::new();
                key(&b.bound, scope, &mut s);
                if order.contains(&b.binder) {
                    used.push((b.binder.clone(), s));
                } else {
                    vac.push(s);
                }
            }
            vac.sort();
            out.push_str("(let[");
            for (_, s) in &used {
                out.push_str(s);
                out.push(';');
            }
            out.push('|');
            for s in &vac {
                out.push_str(s);
                out.push(';');
            }
            out.push_str("] ");
            let mut inner: Vec<String> = used.into_iter().map(|(y, _)| y).collect();
            key(m, &mut inner, out);
            out.push(')');
        }
    }
}

pub fn alpha_eq(t1: &Term, t2: &Term) -> bool {
    t1 == t2 || alpha_key(t1) == alpha_key(t2)
}

/// Alpha-equivalence that also identifies terms up to a positional renaming of
/// the context variables.
pub fn alpha_eq_in_context(a1: &TypeAssignment, a2: &TypeAssignment) -> Result<bool, SyntaxError> {
    if a1.context.types() != a2.context.types() {
        return Err(SyntaxError::ContextMismatch("context types differ".into()));
    }
    if a1.ty != a2.ty {
        return Err(SyntaxError::ContextMismatch("result types differ".into()));
    }
    let norm = |a: &TypeAssignment| {
        let reps: BTreeMap<String, Term> = a
            .context
            .decls()
            .iter()
            .enumerate()
            .map(|(i, (x, _))| (x.clone(), Term::Var(format!("%{i}"))))
            .collect();
        alpha_key(&subst_raw(&a.subject, &reps))
    };
    Ok(norm(a1) == norm(a2))
}
