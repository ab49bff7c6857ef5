//! The focused typing system: canonical derivations of normal terms and a
//! rule-by-rule checker.
//!
//! Contexts are compared as name-indexed maps, so exchange never appears.
//! The left box rule splits off every applied binding at once: its residue
//! premise binds variables only.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::rewrite::in_lambda_hat;
use crate::surface::{print_assignment, print_context, print_formula, print_term};
use crate::syntax::{free_vars, next_free_name, Binding, Formula, Term, TypeAssignment, TypingContext};
use crate::typing::{type_of, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FckRule {
    Ax,
    ArrowRStar,
    ArrowLAx,
    KBox,
    ArrowLK,
}

impl FckRule {
    pub fn name(self) -> &'static str {
        match self {
            FckRule::Ax => "ax",
            FckRule::ArrowRStar => "->R*",
            FckRule::ArrowLAx => "->L^ax",
            FckRule::KBox => "K#",
            FckRule::ArrowLK => "->L^K",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FckDerivation {
    pub rule: FckRule,
    pub conclusion: TypeAssignment,
    pub premises: Vec<FckDerivation>,
}

impl FckDerivation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let c = &self.conclusion;
        out.push_str(&format!(
            "{}[{}] {}\n",
            "  ".repeat(depth),
            self.rule.name(),
            print_assignment(&c.context, &c.subject, &c.ty)
        ));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    /// `{rule, conclusion: {context, term, type}, premises}`
    pub fn to_json(&self) -> Value {
        let c = &self.conclusion;
        json!({
            "rule": self.rule.name(),
            "conclusion": {
                "context": print_context(&c.context),
                "term": print_term(&c.subject),
                "type": print_formula(&c.ty),
            },
            "premises": self.premises.iter().map(FckDerivation::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(FckDerivation::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FckError {
    #[error("term is not in normal form: {0}")]
    NotNormal(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

fn node(rule: FckRule, ctx: &TypingContext, t: &Term, ty: Formula, premises: Vec<FckDerivation>) -> FckDerivation {
    FckDerivation {
        rule,
        conclusion: TypeAssignment { context: ctx.clone(), subject: t.clone(), ty },
        premises,
    }
}

/// Peels a maximal block of abstractions.
pub fn lambda_block(t: &Term) -> (Vec<(&str, &Formula)>, &Term) {
    let mut binders = Vec::new();
    let mut cur = t;
    while let Term::Abs(x, a, b) = cur {
        binders.push((x.as_str(), a));
        cur = b;
    }
    (binders, cur)
}

/// A bound term `f T1 ... Tk` with `k >= 1`.
pub fn is_applied(t: &Term) -> bool {
    matches!(t, Term::App(..)) && t.head_var().is_some()
}

/// Fresh residue variables for the applied bindings of a let, deterministic.
pub fn residue_names(ctx: &TypingContext, bindings: &[Binding]) -> Vec<String> {
    let mut avoid = ctx.names();
    avoid.extend(bindings.iter().map(|b| b.binder.clone()));
    let mut out = Vec::new();
    for _ in bindings.iter().filter(|b| is_applied(&b.bound)) {
        let x = next_free_name("x", &avoid);
        avoid.insert(x.clone());
        out.push(x);
    }
    out
}

/// The residue premise of the left box rule: applied bound terms replaced by
/// fresh boxed variables.
pub fn residue(ctx: &TypingContext, t: &Term) -> Result<(TypingContext, Term), TypeError> {
    let Term::BoxSubst(m, bs) = t else { unreachable!("residue of a let") };
    let names = residue_names(ctx, bs);
    let mut names = names.into_iter();
    let mut rctx = ctx.clone();
    let mut rbs = Vec::new();
    for b in bs {
        if is_applied(&b.bound) {
            let x = names.next().unwrap();
            let ty = type_of(ctx, &b.bound)?;
            rctx.push(&x, ty).expect("fresh residue name");
            rbs.push(Binding { binder: b.binder.clone(), bound: Term::Var(x) });
        } else {
            rbs.push(b.clone());
        }
    }
    Ok((rctx, Term::BoxSubst(m.clone(), rbs)))
}

pub fn fck_derive(ctx: &TypingContext, t: &Term) -> Result<FckDerivation, FckError> {
    if !in_lambda_hat(ctx, t)? {
        return Err(FckError::NotNormal(print_term(t)));
    }
    derive(ctx, t)
}

fn derive(ctx: &TypingContext, t: &Term) -> Result<FckDerivation, FckError> {
    let ty = type_of(ctx, t)?;
    match t {
        Term::Var(_) => Ok(node(FckRule::Ax, ctx, t, ty, vec![])),
        Term::App(..) => {
            let (_, args) = t.spine();
            let ps = args.iter().map(|a| derive(ctx, a)).collect::<Result<_, _>>()?;
            Ok(node(FckRule::ArrowLAx, ctx, t, ty, ps))
        }
        Term::Abs(..) => {
            let (binders, body) = lambda_block(t);
            let mut inner = ctx.clone();
            for (x, a) in binders {
                inner.push(x, a.clone()).map_err(|_| TypeError::ShadowedContext(x.to_string()))?;
            }
            let p = derive(&inner, body)?;
            Ok(node(FckRule::ArrowRStar, ctx, t, ty, vec![p]))
        }
        Term::BoxSubst(m, bs) => {
            if bs.iter().all(|b| matches!(b.bound, Term::Var(_))) {
                let mut inner = TypingContext::new();
                for b in bs {
                    let Formula::Box(a) = type_of(ctx, &b.bound)? else {
                        return Err(FckError::NotNormal(print_term(t)));
                    };
                    inner.push(&b.binder, *a).map_err(|_| TypeError::ShadowedContext(b.binder.clone()))?;
                }
                let p = derive(&inner, m)?;
                return Ok(node(FckRule::KBox, ctx, t, ty, vec![p]));
            }
            let mut ps = Vec::new();
            for b in bs.iter().filter(|b| is_applied(&b.bound)) {
                for a in b.bound.spine().1 {
                    ps.push(derive(ctx, a)?);
                }
            }
            let (rctx, rt) = residue(ctx, t)?;
            ps.push(derive(&rctx, &rt)?);
            Ok(node(FckRule::ArrowLK, ctx, t, ty, ps))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FckViolation {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub message: String,
}

fn as_map(c: &TypingContext) -> BTreeMap<&str, &Formula> {
    c.decls().iter().map(|(x, f)| (x.as_str(), f)).collect()
}

fn same_context(a: &TypingContext, b: &TypingContext) -> bool {
    as_map(a) == as_map(b)
}

/// Checks one node against its rule and side conditions.
pub fn check_node(d: &FckDerivation) -> Result<(), String> {
    let c = &d.conclusion;
    let ctx = &c.context;
    let prem = |i: usize| &d.premises[i].conclusion;
    let arity = |n: usize| {
        if d.premises.len() == n {
            Ok(())
        } else {
            Err(format!("{} expects {n} premises, found {}", d.rule.name(), d.premises.len()))
        }
    };
    match d.rule {
        FckRule::Ax => {
            arity(0)?;
            let Term::Var(x) = &c.subject else { return Err("axiom subject must be a variable".into()) };
            if !c.ty.is_atom() {
                return Err(format!("axiom at non-atomic type {}", print_formula(&c.ty)));
            }
            if ctx.get(x) != Some(&c.ty) {
                return Err(format!("`{x}` is not declared with type {}", print_formula(&c.ty)));
            }
        }
        FckRule::ArrowRStar => {
            arity(1)?;
            let (binders, body) = lambda_block(&c.subject);
            if binders.is_empty() {
                return Err("->R* needs at least one abstraction".into());
            }
            let mut inner = ctx.clone();
            for (x, a) in &binders {
                inner.push(x, (*a).clone()).map_err(|_| format!("binder `{x}` clashes with the context"))?;
            }
            let args: Vec<Formula> = binders.iter().map(|(_, a)| (*a).clone()).collect();
            let p = prem(0);
            if p.subject != *body || !same_context(&p.context, &inner) {
                return Err("->R* premise must type the body under the extended context".into());
            }
            if c.ty != Formula::curried(&args, p.ty.clone()) {
                return Err("->R* conclusion type mismatch".into());
            }
        }
        FckRule::ArrowLAx => {
            let (head, args) = c.subject.spine();
            let Term::Var(y) = head else { return Err("->L^ax needs a variable head".into()) };
            if args.is_empty() {
                return Err("->L^ax needs at least one argument".into());
            }
            arity(args.len())?;
            let Some(yt) = ctx.get(y) else { return Err(format!("head `{y}` is not declared")) };
            let (doms, cod) = yt.flatten();
            if doms.len() != args.len() || !cod.is_atom() || *cod != c.ty {
                return Err(format!("head `{y}` : {} does not end in {}", print_formula(yt), print_formula(&c.ty)));
            }
            for (i, (a, dom)) in args.iter().zip(doms).enumerate() {
                let p = prem(i);
                if p.subject != **a || p.ty != *dom || !same_context(&p.context, ctx) {
                    return Err(format!("->L^ax premise {i} mismatch"));
                }
            }
        }
        FckRule::KBox => {
            arity(1)?;
            let Term::BoxSubst(m, bs) = &c.subject else { return Err("K# subject must be a let".into()) };
            let Formula::Box(cty) = &c.ty else { return Err("K# concludes a boxed type".into()) };
            let mut inner = TypingContext::new();
            for b in bs {
                let Term::Var(y) = &b.bound else { return Err("K# bound terms must be variables".into()) };
                let Some(Formula::Box(a)) = ctx.get(y) else {
                    return Err(format!("`{y}` is not declared with a boxed type"));
                };
                if ctx.contains(&b.binder) {
                    return Err(format!("binder `{}` is not fresh", b.binder));
                }
                inner.push(&b.binder, (**a).clone()).map_err(|_| "repeated binder".to_string())?;
            }
            let p = prem(0);
            if p.subject != **m || p.ty != **cty || !same_context(&p.context, &inner) {
                return Err("K# premise must type the body under the binders".into());
            }
            if free_vars(m) != inner.names() {
                return Err("K# body must use exactly its binders".into());
            }
        }
        FckRule::ArrowLK => {
            let Term::BoxSubst(m, bs) = &c.subject else { return Err("->L^K subject must be a let".into()) };
            if !c.ty.is_box() {
                return Err("->L^K concludes a boxed type".into());
            }
            let applied: Vec<&Binding> = bs.iter().filter(|b| is_applied(&b.bound)).collect();
            if applied.is_empty() {
                return Err("->L^K needs an applied bound term".into());
            }
            let args: Vec<&Term> = applied.iter().flat_map(|b| b.bound.spine().1).collect();
            arity(args.len() + 1)?;
            let mut k = 0;
            let mut boxes = Vec::new();
            for b in &applied {
                let (head, bargs) = b.bound.spine();
                let Term::Var(f) = head else { unreachable!() };
                let Some(ft) = ctx.get(f) else { return Err(format!("head `{f}` is not declared")) };
                let (doms, cod) = ft.flatten();
                if doms.len() != bargs.len() || !cod.is_box() {
                    return Err(format!("head `{f}` : {} is not fully applied into a box", print_formula(ft)));
                }
                boxes.push(cod.clone());
                for (a, dom) in bargs.iter().zip(doms) {
                    let p = prem(k);
                    if p.subject != **a || p.ty != *dom || !same_context(&p.context, ctx) {
                        return Err(format!("->L^K argument premise {k} mismatch"));
                    }
                    k += 1;
                }
            }
            let r = prem(k);
            let Term::BoxSubst(rm, rbs) = &r.subject else { return Err("->L^K residue must be a let".into()) };
            if rm != m || rbs.len() != bs.len() || r.ty != c.ty {
                return Err("->L^K residue must keep body and type".into());
            }
            let mut fresh = Vec::new();
            for (b, rb) in bs.iter().zip(rbs) {
                if rb.binder != b.binder {
                    return Err("->L^K residue must keep binders".into());
                }
                if is_applied(&b.bound) {
                    let Term::Var(x) = &rb.bound else { return Err("->L^K residue must bind a variable".into()) };
                    fresh.push(x.clone());
                } else if rb.bound != b.bound {
                    return Err("->L^K residue changed a variable binding".into());
                }
            }
            if rbs.iter().any(|b| is_applied(&b.bound)) {
                return Err("->L^K residue still contains an applied bound term".into());
            }
            let mut want = ctx.clone();
            for (x, bty) in fresh.iter().zip(boxes) {
                want.push(x, bty).map_err(|_| format!("residue variable `{x}` is not fresh"))?;
            }
            if !same_context(&r.context, &want) {
                return Err("->L^K residue context must add exactly the fresh boxed variables".into());
            }
        }
    }
    Ok(())
}

pub fn fck_check(d: &FckDerivation) -> Result<(), FckViolation> {
    fn go(d: &FckDerivation, path: &mut Vec<usize>) -> Result<(), FckViolation> {
        check_node(d).map_err(|message| FckViolation { path: path.clone(), message })?;
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path)?;
            path.pop();
        }
        Ok(())
    }
    go(d, &mut Vec::new())
}

pub fn is_valid(d: &FckDerivation) -> bool {
    fck_check(d).is_ok()
}
