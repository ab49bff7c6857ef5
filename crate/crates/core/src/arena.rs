//! Arenas: two-colored DAGs built from formulas.
//!
//! Vertex tags record the injection path of the construction. In `A ⊶ B` the
//! vertices of `A` get suffix `0` and those of `B` suffix `1`; in `□ ∼ A` the box
//! is `0` and the vertices of `A` get suffix `1`. A lone atom has the empty tag.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::print_formula;
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(tag: impl Into<String>) -> VertexId {
        VertexId(tag.into())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&self.0)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Atom(String),
    Box,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(a) => f.write_str(a),
            Label::Box => f.write_str("□"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Polarity {
    /// even depth
    Opponent,
    /// odd depth
    Player,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexData {
    pub label: Label,
    /// Enclosing box vertices, outermost first.
    pub address: Vec<VertexId>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arena {
    pub formula: Formula,
    pub vertices: BTreeMap<VertexId, VertexData>,
    pub arrow_edges: BTreeSet<(VertexId, VertexId)>,
    pub modal_edges: BTreeSet<(VertexId, VertexId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("vertex {0} is not in the arena")]
    UnknownVertex(VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexInfo {
    pub label: Label,
    pub address: Vec<VertexId>,
    pub height: usize,
    pub depth: usize,
    pub polarity: Polarity,
}

/// Intermediate arena: tags are relative to the subformula.
struct Part {
    labels: BTreeMap<String, Label>,
    addr: BTreeMap<String, Vec<String>>,
    arrows: BTreeSet<(String, String)>,
    modals: BTreeSet<(String, String)>,
    roots: Vec<String>,
}

impl Part {
    fn suffixed(self, s: &str) -> Part {
        let f = |t: String| t + s;
        Part {
            labels: self.labels.into_iter().map(|(k, v)| (f(k), v)).collect(),
            addr: self
                .addr
                .into_iter()
                .map(|(k, v)| (f(k), v.into_iter().map(f).collect()))
                .collect(),
            arrows: self.arrows.into_iter().map(|(a, b)| (f(a), f(b))).collect(),
            modals: self.modals.into_iter().map(|(a, b)| (f(a), f(b))).collect(),
            roots: self.roots.into_iter().map(f).collect(),
        }
    }

    fn union(mut self, other: Part) -> Part {
        self.labels.extend(other.labels);
        self.addr.extend(other.addr);
        self.arrows.extend(other.arrows);
        self.modals.extend(other.modals);
        self
    }
}

fn build(f: &Formula) -> Part {
    match f {
        Formula::Atom(a) => Part {
            labels: [(String::new(), Label::Atom(a.clone()))].into(),
            addr: [(String::new(), vec![])].into(),
            arrows: BTreeSet::new(),
            modals: BTreeSet::new(),
            roots: vec![String::new()],
        },
        Formula::Arrow(d, c) => {
            let l = build(d).suffixed("0");
            let r = build(c).suffixed("1");
            let mut edges = BTreeSet::new();
            for x in &l.roots {
                for y in &r.roots {
                    edges.insert((x.clone(), y.clone()));
                }
            }
            let roots = r.roots.clone();
            let mut p = l.union(r);
            p.arrows.extend(edges);
            p.roots = roots;
            p
        }
        Formula::Box(b) => {
            let mut inner = build(b).suffixed("1");
            let bx = "0".to_string();
            for v in inner.addr.values_mut() {
                v.insert(0, bx.clone());
            }
            for r in &inner.roots {
                inner.modals.insert((bx.clone(), r.clone()));
            }
            inner.labels.insert(bx.clone(), Label::Box);
            inner.addr.insert(bx.clone(), vec![]);
            inner.roots.insert(0, bx);
            inner
        }
    }
}

pub fn arena_of_formula(f: &Formula) -> Arena {
    let p = build(f);
    let id = |s: &String| VertexId(s.clone());
    let arrow_edges: BTreeSet<(VertexId, VertexId)> =
        p.arrows.iter().map(|(a, b)| (id(a), id(b))).collect();
    let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (a, b) in &arrow_edges {
        out.entry(a.clone()).or_default().push(b.clone());
    }
    // depth along any outgoing arrow path; stratification makes the choice irrelevant
    fn depth_of(
        v: &VertexId,
        out: &BTreeMap<VertexId, Vec<VertexId>>,
        memo: &mut BTreeMap<VertexId, usize>,
    ) -> usize {
        if let Some(d) = memo.get(v) {
            return *d;
        }
        let d = match out.get(v).and_then(|ws| ws.first()) {
            Some(w) => 1 + depth_of(w, out, memo),
            None => 0,
        };
        memo.insert(v.clone(), d);
        d
    }
    let mut memo = BTreeMap::new();
    let vertices = p
        .labels
        .iter()
        .map(|(t, l)| {
            let v = id(t);
            let depth = depth_of(&v, &out, &mut memo);
            let address = p.addr[t].iter().map(id).collect();
            (v, VertexData { label: l.clone(), address, depth })
        })
        .collect();
    Arena {
        formula: f.clone(),
        vertices,
        arrow_edges,
        modal_edges: p.modals.iter().map(|(a, b)| (id(a), id(b))).collect(),
    }
}

/// Arena of `(A1,...,An) -> C`.
pub fn arena_of_sequent(context: &[Formula], goal: &Formula) -> Arena {
    arena_of_formula(&Formula::curried(context, goal.clone()))
}

/// Tag of the vertex with tag `inner` inside the `j`-th (0-based) argument of a
/// curried formula.
pub fn dom_tag(inner: &str, j: usize) -> String {
    format!("{inner}0{}", "1".repeat(j))
}

/// Tag of the vertex with tag `inner` inside the codomain after `k` arguments.
pub fn cod_tag(inner: &str, k: usize) -> String {
    format!("{inner}{}", "1".repeat(k))
}

pub fn box_body_tag(inner: &str) -> String {
    format!("{inner}1")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Dom(usize),
    Cod,
}

/// Inverse of [`dom_tag`] / [`cod_tag`] for a formula with `n` arguments.
pub fn split_slot(tag: &str, n: usize) -> Option<(Slot, String)> {
    let b = tag.as_bytes();
    for i in 0..n {
        let pos = b.len().checked_sub(i + 1)?;
        match b[pos] {
            b'0' => return Some((Slot::Dom(i), tag[..pos].to_string())),
            b'1' => continue,
            _ => return None,
        }
    }
    Some((Slot::Cod, tag[..tag.len().checked_sub(n)?].to_string()))
}

/// Inverse of [`box_body_tag`].
pub fn split_box_body(tag: &str) -> Option<String> {
    tag.strip_suffix('1').map(str::to_string)
}

impl Arena {
    pub fn contains(&self, v: &VertexId) -> bool {
        self.vertices.contains_key(v)
    }

    pub fn label(&self, v: &VertexId) -> Option<&Label> {
        self.vertices.get(v).map(|d| &d.label)
    }

    pub fn depth(&self, v: &VertexId) -> Option<usize> {
        self.vertices.get(v).map(|d| d.depth)
    }

    pub fn height(&self, v: &VertexId) -> Option<usize> {
        self.vertices.get(v).map(|d| d.address.len())
    }

    pub fn address(&self, v: &VertexId) -> Option<&[VertexId]> {
        self.vertices.get(v).map(|d| d.address.as_slice())
    }

    /// `v ⊶ w`
    pub fn justifies(&self, v: &VertexId, w: &VertexId) -> bool {
        self.arrow_edges.contains(&(v.clone(), w.clone()))
    }

    pub fn roots(&self) -> Vec<&VertexId> {
        self.vertices
            .keys()
            .filter(|v| !self.arrow_edges.iter().any(|(a, _)| a == *v))
            .collect()
    }

    /// The unique root with an atom label.
    pub fn main_root(&self) -> &VertexId {
        self.roots()
            .into_iter()
            .find(|v| self.vertices[*v].label != Label::Box)
            .expect("every arena has an atomic root")
    }

    /// Vertices `w` with `w ⊶ v`.
    pub fn justified_by<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a VertexId> + 'a {
        self.arrow_edges.iter().filter(move |(_, b)| b == v).map(|(a, _)| a)
    }

    pub fn vertex_info(&self, v: &VertexId) -> Result<VertexInfo, ArenaError> {
        let d = self.vertices.get(v).ok_or_else(|| ArenaError::UnknownVertex(v.clone()))?;
        Ok(VertexInfo {
            label: d.label.clone(),
            address: d.address.clone(),
            height: d.address.len(),
            depth: d.depth,
            polarity: if d.depth % 2 == 0 { Polarity::Opponent } else { Polarity::Player },
        })
    }

    /// All maximal arrow paths from `v` to a root, as vertex lists.
    pub fn paths_to_roots(&self, v: &VertexId) -> Vec<Vec<VertexId>> {
        let outs: Vec<&VertexId> =
            self.arrow_edges.iter().filter(|(a, _)| a == v).map(|(_, b)| b).collect();
        if outs.is_empty() {
            return vec![vec![v.clone()]];
        }
        outs.into_iter()
            .flat_map(|w| self.paths_to_roots(w))
            .map(|mut p| {
                p.insert(0, v.clone());
                p
            })
            .collect()
    }

    pub fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Dot => self.render_dot(),
            RenderFormat::Json => self.render_json(),
            RenderFormat::Text => self.render_text(),
        }
    }

    fn node_name(v: &VertexId) -> String {
        format!("v_{}", v.0)
    }

    fn render_dot(&self) -> String {
        let mut s = String::from("digraph arena {\n");
        for (v, d) in &self.vertices {
            let pol = if d.depth % 2 == 0 { "○" } else { "●" };
            s.push_str(&format!(
                "  {} [label=\"{}{} ({})\"];\n",
                Self::node_name(v),
                d.label,
                pol,
                v
            ));
        }
        for (a, b) in &self.arrow_edges {
            s.push_str(&format!("  {} -> {} [style=solid];\n", Self::node_name(a), Self::node_name(b)));
        }
        for (a, b) in &self.modal_edges {
            s.push_str(&format!("  {} -> {} [style=dashed];\n", Self::node_name(a), Self::node_name(b)));
        }
        s.push_str("}\n");
        s
    }

    fn render_json(&self) -> String {
        #[derive(Serialize)]
        struct V<'a> {
            id: &'a str,
            label: String,
            address: Vec<&'a str>,
            depth: usize,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            version: u32,
            formula: String,
            vertices: Vec<V<'a>>,
            arrow_edges: Vec<(&'a str, &'a str)>,
            modal_edges: Vec<(&'a str, &'a str)>,
        }
        let doc = Doc {
            version: crate::surface::JSON_VERSION,
            formula: print_formula(&self.formula),
            vertices: self
                .vertices
                .iter()
                .map(|(v, d)| V {
                    id: &v.0,
                    label: d.label.to_string(),
                    address: d.address.iter().map(|a| a.0.as_str()).collect(),
                    depth: d.depth,
                })
                .collect(),
            arrow_edges: self.arrow_edges.iter().map(|(a, b)| (a.0.as_str(), b.0.as_str())).collect(),
            modal_edges: self.modal_edges.iter().map(|(a, b)| (a.0.as_str(), b.0.as_str())).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("arena serializes")
    }

    fn render_text(&self) -> String {
        let mut s = format!("arena of {}\n", print_formula(&self.formula));
        for (v, d) in &self.vertices {
            let addr: Vec<String> = d.address.iter().map(|a| format!("□_{a}")).collect();
            s.push_str(&format!(
                "{:>8}  {}  depth {}  add [{}]\n",
                v.to_string(),
                d.label,
                d.depth,
                addr.join(" ")
            ));
        }
        for (a, b) in &self.arrow_edges {
            s.push_str(&format!("{a} ⊶ {b}\n"));
        }
        for (a, b) in &self.modal_edges {
            s.push_str(&format!("{a} ∼ {b}\n"));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Json,
    Text,
}

/// Vertex bijection from the arena of `(A1,...,An) -> C` to the arena of the
/// arguments permuted by `perm` (`perm[i]` is the old index of new argument i),
/// checked to preserve labels and both edge relations.
pub fn currying_isomorphism(
    args: &[Formula],
    cod: &Formula,
    perm: &[usize],
) -> Option<BTreeMap<VertexId, VertexId>> {
    let n = args.len();
    if perm.len() != n || (0..n).any(|i| !perm.contains(&i)) {
        return None;
    }
    let permuted: Vec<Formula> = perm.iter().map(|&i| args[i].clone()).collect();
    let src = arena_of_sequent(args, cod);
    let dst = arena_of_sequent(&permuted, cod);
    let mut map = BTreeMap::new();
    for v in src.vertices.keys() {
        let (slot, inner) = split_slot(&v.0, n)?;
        let tag = match slot {
            Slot::Cod => cod_tag(&inner, n),
            Slot::Dom(j) => dom_tag(&inner, perm.iter().position(|&i| i == j)?),
        };
        map.insert(v.clone(), VertexId(tag));
    }
    let m = |v: &VertexId| map[v].clone();
    let ok = src.vertices.len() == dst.vertices.len()
        && src.vertices.iter().all(|(v, d)| dst.label(&m(v)) == Some(&d.label))
        && src.arrow_edges.iter().map(|(a, b)| (m(a), m(b))).collect::<BTreeSet<_>>() == dst.arrow_edges
        && src.modal_edges.iter().map(|(a, b)| (m(a), m(b))).collect::<BTreeSet<_>>() == dst.modal_edges;
    ok.then_some(map)
}
