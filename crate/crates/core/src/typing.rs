//! Natural-deduction typing: inference, checking, strengthening.

use serde::Serialize;
use thiserror::Error;

use crate::surface::{print_assignment, print_formula};
use crate::syntax::{free_vars, Formula, Term, TypeAssignment, TypingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NdRule {
    Id,
    Abs,
    App,
    BoxSubstRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NdDerivation {
    pub rule: NdRule,
    pub conclusion: TypeAssignment,
    pub premises: Vec<NdDerivation>,
}

impl NdDerivation {
    /// One rule per line, premises indented under their conclusion.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let c = &self.conclusion;
        out.push_str(&format!(
            "{}[{:?}] {}\n",
            "  ".repeat(depth),
            self.rule,
            print_assignment(&c.context, &c.subject, &c.ty)
        ));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{term}` has type {ty}, which is not a function type")]
    NotAFunction { term: String, ty: String },
    #[error("argument `{term}` has type {found}, expected {expected}")]
    ArgumentMismatch { term: String, expected: String, found: String },
    #[error("bound term `{term}` has type {ty}, which is not boxed")]
    NotBoxed { term: String, ty: String },
    #[error("binder `{0}` shadows a context variable")]
    ShadowedContext(String),
    #[error("term has type {found}, expected {expected}")]
    TypeMismatch { expected: String, found: String },
}

pub fn infer_type(ctx: &TypingContext, t: &Term) -> Result<(Formula, NdDerivation), TypeError> {
    let d = derive(ctx, t)?;
    Ok((d.conclusion.ty.clone(), d))
}

/// Type only, without building the derivation.
pub fn type_of(ctx: &TypingContext, t: &Term) -> Result<Formula, TypeError> {
    match t {
        Term::Var(x) => ctx.get(x).cloned().ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        Term::Abs(x, a, b) => {
            let inner = ctx.with(x, a.clone()).map_err(|_| TypeError::ShadowedContext(x.clone()))?;
            Ok(Formula::arrow(a.clone(), type_of(&inner, b)?))
        }
        Term::App(f, a) => {
            let ft = type_of(ctx, f)?;
            let at = type_of(ctx, a)?;
            apply_type(f, &ft, a, &at)
        }
        Term::BoxSubst(m, bs) => {
            let inner = binder_context(ctx, bs.iter().map(|b| (&b.binder, &b.bound)), |n| {
                type_of(ctx, n)
            })?;
            Ok(Formula::boxed(type_of(&inner, m)?))
        }
    }
}

fn apply_type(f: &Term, ft: &Formula, a: &Term, at: &Formula) -> Result<Formula, TypeError> {
    match ft {
        Formula::Arrow(d, c) => {
            if **d == *at {
                Ok((**c).clone())
            } else {
                Err(TypeError::ArgumentMismatch {
                    term: a.to_string(),
                    expected: print_formula(d),
                    found: print_formula(at),
                })
            }
        }
        _ => Err(TypeError::NotAFunction { term: f.to_string(), ty: print_formula(ft) }),
    }
}

fn binder_context<'a>(
    ctx: &TypingContext,
    bindings: impl Iterator<Item = (&'a String, &'a Term)>,
    mut ty: impl FnMut(&Term) -> Result<Formula, TypeError>,
) -> Result<TypingContext, TypeError> {
    let mut inner = TypingContext::new();
    for (x, n) in bindings {
        if ctx.contains(x) {
            return Err(TypeError::ShadowedContext(x.clone()));
        }
        match ty(n)? {
            Formula::Box(a) => inner.push(x, *a).map_err(|_| TypeError::ShadowedContext(x.clone()))?,
            other => {
                return Err(TypeError::NotBoxed { term: n.to_string(), ty: print_formula(&other) })
            }
        }
    }
    Ok(inner)
}

fn derive(ctx: &TypingContext, t: &Term) -> Result<NdDerivation, TypeError> {
    let node = |rule, ty, premises| NdDerivation {
        rule,
        conclusion: TypeAssignment { context: ctx.clone(), subject: t.clone(), ty },
        premises,
    };
    match t {
        Term::Var(x) => {
            let ty = ctx.get(x).cloned().ok_or_else(|| TypeError::UnboundVariable(x.clone()))?;
            Ok(node(NdRule::Id, ty, vec![]))
        }
        Term::Abs(x, a, b) => {
            let inner = ctx.with(x, a.clone()).map_err(|_| TypeError::ShadowedContext(x.clone()))?;
            let db = derive(&inner, b)?;
            let ty = Formula::arrow(a.clone(), db.conclusion.ty.clone());
            Ok(node(NdRule::Abs, ty, vec![db]))
        }
        Term::App(f, a) => {
            let df = derive(ctx, f)?;
            let da = derive(ctx, a)?;
            let ty = apply_type(f, &df.conclusion.ty, a, &da.conclusion.ty)?;
            Ok(node(NdRule::App, ty, vec![da, df]))
        }
        Term::BoxSubst(m, bs) => {
            let mut premises = Vec::new();
            let inner = binder_context(ctx, bs.iter().map(|b| (&b.binder, &b.bound)), |n| {
                let d = derive(ctx, n)?;
                let ty = d.conclusion.ty.clone();
                premises.push(d);
                Ok(ty)
            })?;
            let dm = derive(&inner, m)?;
            let ty = Formula::boxed(dm.conclusion.ty.clone());
            premises.push(dm);
            Ok(node(NdRule::BoxSubstRule, ty, premises))
        }
    }
}

pub fn check_type(a: &TypeAssignment) -> Result<NdDerivation, TypeError> {
    let (ty, d) = infer_type(&a.context, &a.subject)?;
    if ty != a.ty {
        return Err(TypeError::TypeMismatch {
            expected: print_formula(&a.ty),
            found: print_formula(&ty),
        });
    }
    Ok(d)
}

/// Drops the declarations whose variable is not free in `t`.
pub fn strengthen(ctx: &TypingContext, t: &Term) -> Result<TypingContext, TypeError> {
    type_of(ctx, t)?;
    let fv = free_vars(t);
    Ok(ctx.retain(|x, _| fv.contains(x)))
}

/// Local check of one ND node against its rule.
pub fn nd_node_ok(d: &NdDerivation) -> bool {
    let c = &d.conclusion;
    let prem = |i: usize| &d.premises[i].conclusion;
    match (d.rule, &c.subject) {
        (NdRule::Id, Term::Var(x)) => d.premises.is_empty() && c.context.get(x) == Some(&c.ty),
        (NdRule::Abs, Term::Abs(x, a, b)) => {
            d.premises.len() == 1
                && c.ty == Formula::arrow(a.clone(), prem(0).ty.clone())
                && prem(0).subject == **b
                && c.context.with(x, a.clone()).ok().as_ref() == Some(&prem(0).context)
        }
        (NdRule::App, Term::App(f, a)) => {
            d.premises.len() == 2
                && prem(0).subject == **a
                && prem(1).subject == **f
                && prem(0).context == c.context
                && prem(1).context == c.context
                && prem(1).ty == Formula::arrow(prem(0).ty.clone(), c.ty.clone())
        }
        (NdRule::BoxSubstRule, Term::BoxSubst(m, bs)) => {
            if d.premises.len() != bs.len() + 1 {
                return false;
            }
            let body = &d.premises[bs.len()].conclusion;
            let mut inner = Vec::new();
            for (i, b) in bs.iter().enumerate() {
                let p = prem(i);
                let Formula::Box(a) = &p.ty else { return false };
                if p.subject != b.bound || p.context != c.context || c.context.contains(&b.binder) {
                    return false;
                }
                inner.push((b.binder.clone(), (**a).clone()));
            }
            body.subject == **m
                && TypingContext::from_decls(inner).ok().as_ref() == Some(&body.context)
                && c.ty == Formula::boxed(body.ty.clone())
        }
        _ => false,
    }
}
