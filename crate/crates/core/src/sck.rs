//! Bounded cut-free proof search for CK, emitting sequent derivations with
//! explicit weakening and contraction.
//!
//! Search runs on sequents whose hypotheses form a set; the left implication
//! rule keeps its principal formula, the box rule keeps only boxed hypotheses,
//! and a sequent repeated on a branch is pruned. Found proofs are then
//! replayed as multiset derivations.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::surface::print_formula;
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Sequent {
    /// Multiset, kept sorted.
    pub hypotheses: Vec<Formula>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(mut hypotheses: Vec<Formula>, goal: Formula) -> Sequent {
        hypotheses.sort();
        Sequent { hypotheses, goal }
    }

    pub fn render(&self) -> String {
        let hs: Vec<String> = self.hypotheses.iter().map(print_formula).collect();
        format!("{} |- {}", hs.join(", "), print_formula(&self.goal))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SckRule {
    Ax,
    ImpR,
    ImpL,
    KBox,
    W,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SckDerivation {
    pub rule: SckRule,
    pub conclusion: Sequent,
    pub premises: Vec<SckDerivation>,
}

impl SckDerivation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&format!("{}[{:?}] {}\n", "  ".repeat(depth), self.rule, self.conclusion.render()));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(SckDerivation::height).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved(SckDerivation),
    Exhausted,
    BoundExceeded,
}

impl ProveOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }
}

pub const DEFAULT_DEPTH: usize = 12;

type SetSeq = (BTreeSet<Formula>, Formula);

#[derive(Clone, Debug)]
enum G3 {
    Ax,
    ImpR(Box<G3>),
    KBox(Box<G3>),
    ImpL(Formula, Box<G3>, Box<G3>),
}

enum Fail {
    /// Failure that did not depend on the branch (safe to cache).
    Final,
    Contextual,
}

struct Prover {
    proved: HashMap<SetSeq, G3>,
    refuted: std::collections::HashSet<SetSeq>,
    stack: Vec<SetSeq>,
    hit_bound: bool,
}

impl Prover {
    fn search(&mut self, ctx: BTreeSet<Formula>, goal: Formula, depth: usize) -> Result<G3, Fail> {
        let key = (ctx, goal);
        if let Some(p) = self.proved.get(&key) {
            return Ok(p.clone());
        }
        if self.refuted.contains(&key) {
            return Err(Fail::Final);
        }
        if self.stack.contains(&key) {
            return Err(Fail::Contextual);
        }
        if depth == 0 {
            self.hit_bound = true;
            return Err(Fail::Contextual);
        }
        self.stack.push(key.clone());
        let r = self.attempt(&key.0, &key.1, depth);
        self.stack.pop();
        match &r {
            Ok(p) => {
                self.proved.insert(key, p.clone());
            }
            Err(Fail::Final) => {
                self.refuted.insert(key);
            }
            Err(Fail::Contextual) => {}
        }
        r
    }

    fn attempt(&mut self, ctx: &BTreeSet<Formula>, goal: &Formula, depth: usize) -> Result<G3, Fail> {
        let mut contextual = false;
        let mut note = |f: Fail| {
            if let Fail::Contextual = f {
                contextual = true;
            }
        };
        if goal.is_atom() && ctx.contains(goal) {
            return Ok(G3::Ax);
        }
        if let Formula::Arrow(a, b) = goal {
            let mut c2 = ctx.clone();
            c2.insert((**a).clone());
            // invertible
            return self.search(c2, (**b).clone(), depth - 1).map(|p| G3::ImpR(Box::new(p)));
        }
        if let Formula::Box(a) = goal {
            let unboxed: BTreeSet<Formula> = ctx
                .iter()
                .filter_map(|f| match f {
                    Formula::Box(b) => Some((**b).clone()),
                    _ => None,
                })
                .collect();
            match self.search(unboxed, (**a).clone(), depth - 1) {
                Ok(p) => return Ok(G3::KBox(Box::new(p))),
                Err(f) => note(f),
            }
        }
        for f in ctx {
            let Formula::Arrow(a, b) = f else { continue };
            let left = match self.search(ctx.clone(), (**a).clone(), depth - 1) {
                Ok(p) => p,
                Err(e) => {
                    note(e);
                    continue;
                }
            };
            let mut c2 = ctx.clone();
            c2.insert((**b).clone());
            match self.search(c2, goal.clone(), depth - 1) {
                Ok(right) => return Ok(G3::ImpL(f.clone(), Box::new(left), Box::new(right))),
                Err(e) => note(e),
            }
        }
        if contextual {
            Err(Fail::Contextual)
        } else {
            Err(Fail::Final)
        }
    }
}

/// Depth-bounded backward search. `depth` bounds the number of logical rules
/// on any branch.
pub fn prove(sequent: &Sequent, depth: usize) -> ProveOutcome {
    let mut p = Prover {
        proved: HashMap::new(),
        refuted: Default::default(),
        stack: Vec::new(),
        hit_bound: false,
    };
    let ctx: BTreeSet<Formula> = sequent.hypotheses.iter().cloned().collect();
    match p.search(ctx.clone(), sequent.goal.clone(), depth) {
        Ok(g3) => {
            let set_proof = replay(&ctx, &sequent.goal, &g3);
            // restore duplicated hypotheses of the input multiset
            let mut d = set_proof;
            let mut have: Vec<Formula> = ctx.iter().cloned().collect();
            for h in &sequent.hypotheses {
                if let Some(i) = have.iter().position(|x| x == h) {
                    have.remove(i);
                } else {
                    d = contract_back(d, h.clone());
                }
            }
            ProveOutcome::Proved(d)
        }
        Err(_) if p.hit_bound => ProveOutcome::BoundExceeded,
        Err(_) => ProveOutcome::Exhausted,
    }
}

fn contract_back(d: SckDerivation, extra: Formula) -> SckDerivation {
    let mut hyps = d.conclusion.hypotheses.clone();
    hyps.push(extra);
    let goal = d.conclusion.goal.clone();
    node(SckRule::W, hyps, goal, vec![d])
}

fn node(rule: SckRule, hyps: Vec<Formula>, goal: Formula, premises: Vec<SckDerivation>) -> SckDerivation {
    SckDerivation { rule, conclusion: Sequent::new(hyps, goal), premises }
}

/// Weakens `d` until its hypotheses are `target` (a superset as multisets).
fn weaken_to(mut d: SckDerivation, target: &[Formula]) -> SckDerivation {
    let mut missing = target.to_vec();
    for h in &d.conclusion.hypotheses {
        let i = missing.iter().position(|x| x == h).expect("weakening target contains premise");
        missing.remove(i);
    }
    for m in missing {
        let mut hyps = d.conclusion.hypotheses.clone();
        hyps.push(m);
        let goal = d.conclusion.goal.clone();
        d = node(SckRule::W, hyps, goal, vec![d]);
    }
    d
}

/// Multiset derivation of `ctx |- goal` (each hypothesis once).
fn replay(ctx: &BTreeSet<Formula>, goal: &Formula, p: &G3) -> SckDerivation {
    let all: Vec<Formula> = ctx.iter().cloned().collect();
    match p {
        G3::Ax => {
            let ax = node(SckRule::Ax, vec![goal.clone()], goal.clone(), vec![]);
            weaken_to(ax, &all)
        }
        G3::ImpR(sub) => {
            let Formula::Arrow(a, b) = goal else { unreachable!() };
            let mut c2 = ctx.clone();
            let fresh = c2.insert((**a).clone());
            let mut prem = replay(&c2, b, sub);
            if !fresh {
                let mut target = prem.conclusion.hypotheses.clone();
                target.push((**a).clone());
                prem = weaken_to(prem, &target);
            }
            node(SckRule::ImpR, all, goal.clone(), vec![prem])
        }
        G3::KBox(sub) => {
            let Formula::Box(a) = goal else { unreachable!() };
            let boxed: Vec<Formula> = all.iter().filter(|f| f.is_box()).cloned().collect();
            let unboxed: BTreeSet<Formula> = boxed
                .iter()
                .map(|f| match f {
                    Formula::Box(b) => (**b).clone(),
                    _ => unreachable!(),
                })
                .collect();
            let prem = replay(&unboxed, a, sub);
            let k = node(SckRule::KBox, boxed, goal.clone(), vec![prem]);
            weaken_to(k, &all)
        }
        G3::ImpL(principal, left, right) => {
            let Formula::Arrow(a, b) = principal else { unreachable!() };
            let lp = replay(ctx, a, left);
            let mut c2 = ctx.clone();
            let fresh = c2.insert((**b).clone());
            let mut rp = replay(&c2, goal, right);
            if !fresh {
                let mut target = rp.conclusion.hypotheses.clone();
                target.push((**b).clone());
                rp = weaken_to(rp, &target);
            }
            // Γ = Δ = ctx; conclusion ctx, ctx, principal
            let mut hyps = all.clone();
            hyps.extend(all.iter().cloned());
            hyps.push(principal.clone());
            let mut d = node(SckRule::ImpL, hyps.clone(), goal.clone(), vec![lp, rp]);
            let mut extra = all.clone();
            extra.push(principal.clone());
            for f in extra {
                let i = hyps.iter().position(|x| *x == f).unwrap();
                hyps.remove(i);
                d = node(SckRule::C, hyps.clone(), goal.clone(), vec![d]);
            }
            d
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub message: String,
}

fn multiset_minus(big: &[Formula], small: &[Formula]) -> Option<Vec<Formula>> {
    let mut rest = big.to_vec();
    for s in small {
        let i = rest.iter().position(|x| x == s)?;
        rest.remove(i);
    }
    Some(rest)
}

fn same_multiset(a: &[Formula], b: &[Formula]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

fn check_node(d: &SckDerivation) -> Result<(), String> {
    let c = &d.conclusion;
    let arity = match d.rule {
        SckRule::Ax => 0,
        SckRule::ImpL => 2,
        _ => 1,
    };
    if d.premises.len() != arity {
        return Err(format!("{:?} expects {arity} premises", d.rule));
    }
    let p = |i: usize| &d.premises[i].conclusion;
    match d.rule {
        SckRule::Ax => {
            if !c.goal.is_atom() || c.hypotheses != [c.goal.clone()] {
                return Err(format!("axiom must be a |- a, found {}", c.render()));
            }
        }
        SckRule::ImpR => {
            let Formula::Arrow(a, b) = &c.goal else { return Err("right implication needs an arrow goal".into()) };
            let mut want = c.hypotheses.clone();
            want.push((**a).clone());
            if p(0).goal != **b || !same_multiset(&p(0).hypotheses, &want) {
                return Err("right implication premise mismatch".into());
            }
        }
        SckRule::ImpL => {
            let (l, r) = (p(0), p(1));
            let ok = c.hypotheses.iter().any(|f| {
                let Formula::Arrow(a, b) = f else { return false };
                if **a != l.goal || r.goal != c.goal {
                    return false;
                }
                let Some(delta) = multiset_minus(&r.hypotheses, &[(**b).clone()]) else { return false };
                let mut want = l.hypotheses.clone();
                want.extend(delta);
                want.push(f.clone());
                same_multiset(&want, &c.hypotheses)
            });
            if !ok {
                return Err("left implication does not split its context".into());
            }
        }
        SckRule::KBox => {
            let Formula::Box(a) = &c.goal else { return Err("box rule needs a boxed goal".into()) };
            let mut inner = Vec::new();
            for h in &c.hypotheses {
                match h {
                    Formula::Box(b) => inner.push((**b).clone()),
                    _ => return Err(format!("box rule with unboxed hypothesis {}", print_formula(h))),
                }
            }
            if p(0).goal != **a || !same_multiset(&p(0).hypotheses, &inner) {
                return Err("box rule premise mismatch".into());
            }
        }
        SckRule::W => {
            if p(0).goal != c.goal
                || multiset_minus(&c.hypotheses, &p(0).hypotheses).map(|r| r.len()) != Some(1)
            {
                return Err("weakening must add exactly one hypothesis".into());
            }
        }
        SckRule::C => {
            let ok = p(0).goal == c.goal
                && multiset_minus(&p(0).hypotheses, &c.hypotheses)
                    .is_some_and(|r| r.len() == 1 && c.hypotheses.contains(&r[0]));
            if !ok {
                return Err("contraction must merge two copies of one hypothesis".into());
            }
        }
    }
    Ok(())
}

pub fn check_sck(d: &SckDerivation) -> Result<(), Violation> {
    fn go(d: &SckDerivation, path: &mut Vec<usize>) -> Result<(), Violation> {
        check_node(d).map_err(|message| Violation { path: path.clone(), message })?;
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path)?;
            path.pop();
        }
        Ok(())
    }
    go(d, &mut Vec::new())
}

pub fn is_valid_sck(d: &SckDerivation) -> bool {
    check_sck(d).is_ok()
}
