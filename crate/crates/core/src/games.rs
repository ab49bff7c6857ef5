//! Views, innocent strategies, the CK conditions and strategy search.
//!
//! Linkedness is computed on address cells rather than on box vertices: cell
//! `(i, r)` is the `r`-th address entry of move `i`. Cells of a move and its
//! justifier that sit under the same enclosing boxes (the common prefix of their
//! addresses) are one occurrence; pairing columns `2k` and `2k+1` at equal index
//! then groups occurrences into classes. A view is linked when every class holds
//! exactly one occurrence of an even-depth box.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{Arena, ArenaError, Label, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub vertex: VertexId,
    /// Index of the justifying move; `None` only at position 0.
    pub pointer: Option<usize>,
}

impl Move {
    pub fn new(tag: &str, pointer: Option<usize>) -> Move {
        Move { vertex: VertexId::new(tag), pointer }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct View {
    pub moves: Vec<Move>,
}

impl View {
    pub fn empty() -> View {
        View::default()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn prefix(&self, n: usize) -> View {
        View { moves: self.moves[..n].to_vec() }
    }

    pub fn extended(&self, m: Move) -> View {
        let mut moves = self.moves.clone();
        moves.push(m);
        View { moves }
    }

    /// Compact rendering: `tag^ptr` per move.
    pub fn render(&self) -> String {
        if self.moves.is_empty() {
            return "ε".into();
        }
        self.moves
            .iter()
            .map(|m| match m.pointer {
                Some(j) => format!("{}^{j}", m.vertex),
                None => m.vertex.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub views: BTreeSet<View>,
}

impl Strategy {
    pub fn from_views(views: impl IntoIterator<Item = View>) -> Strategy {
        Strategy { views: views.into_iter().collect() }
    }

    /// Adds all prefixes of every view.
    pub fn prefix_closure(&self) -> Strategy {
        let mut views = BTreeSet::new();
        for v in &self.views {
            for n in 0..=v.len() {
                views.insert(v.prefix(n));
            }
        }
        Strategy { views }
    }

    /// Views with labels only, e.g. `["", "a", "a a"]`, for quick inspection.
    pub fn label_words(&self, arena: &Arena) -> BTreeSet<String> {
        self.views
            .iter()
            .map(|v| {
                v.moves
                    .iter()
                    .map(|m| arena.label(&m.vertex).map(|l| l.to_string()).unwrap_or_else(|| "?".into()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.views.iter().all(View::is_empty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("strategy is not prefix closed: missing the prefix of {0}")]
    NotPrefixClosed(String),
    #[error("view {0} is not well batched")]
    NotWellBatched(String),
}

fn check_known(arena: &Arena, p: &View) -> Result<(), ArenaError> {
    for m in &p.moves {
        if !arena.contains(&m.vertex) {
            return Err(ArenaError::UnknownVertex(m.vertex.clone()));
        }
    }
    Ok(())
}

pub fn is_view(arena: &Arena, p: &View) -> Result<bool, GameError> {
    check_known(arena, p)?;
    for (i, m) in p.moves.iter().enumerate() {
        let d = &arena.vertices[&m.vertex];
        if d.label == Label::Box || d.depth % 2 != i % 2 {
            return Ok(false);
        }
        if i == 0 {
            if m.pointer.is_some() || d.depth != 0 {
                return Ok(false);
            }
            continue;
        }
        let Some(j) = m.pointer else { return Ok(false) };
        if j >= i || !arena.justifies(&m.vertex, &p.moves[j].vertex) {
            return Ok(false);
        }
        if i % 2 == 0 && j != i - 1 {
            return Ok(false);
        }
        if i % 2 == 1 && arena.label(&m.vertex) != arena.label(&p.moves[i - 1].vertex) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One-move extensions of a view that are views.
pub fn view_successors(arena: &Arena, p: &View) -> Vec<View> {
    if p.is_empty() {
        return vec![p.extended(Move { vertex: arena.main_root().clone(), pointer: None })];
    }
    let n = p.len();
    let last = &p.moves[n - 1].vertex;
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        for w in arena.justified_by(last) {
            if arena.vertices[w].label != Label::Box {
                out.push(p.extended(Move { vertex: w.clone(), pointer: Some(n - 1) }));
            }
        }
    } else {
        let label = arena.label(last);
        for (w, d) in &arena.vertices {
            if Some(&d.label) != label {
                continue;
            }
            for j in (0..n).step_by(2) {
                if arena.justifies(w, &p.moves[j].vertex) {
                    out.push(p.extended(Move { vertex: w.clone(), pointer: Some(j) }));
                }
            }
        }
    }
    out
}

pub fn is_wis(arena: &Arena, s: &Strategy) -> Result<bool, GameError> {
    if !s.views.contains(&View::empty()) {
        return Err(GameError::NotPrefixClosed("ε (the empty view is absent)".into()));
    }
    for p in &s.views {
        check_known(arena, p)?;
        if !p.is_empty() && !s.views.contains(&p.prefix(p.len() - 1)) {
            return Err(GameError::NotPrefixClosed(p.render()));
        }
    }
    for p in &s.views {
        if !is_view(arena, p)? {
            return Ok(false);
        }
        let succ = view_successors(arena, p);
        let present = succ.iter().filter(|q| s.views.contains(*q)).count();
        let ok = if p.len() % 2 == 0 { present == succ.len() } else { present == 1 };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatchedView {
    pub height: usize,
    /// Column i: the address of move i, then the move, then blanks.
    pub columns: Vec<Vec<Option<VertexId>>>,
}

impl BatchedView {
    pub fn render(&self) -> String {
        let mut rows = Vec::new();
        for r in 0..self.height {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| match &c[r] {
                    Some(v) => format!("{:>6}", v.to_string()),
                    None => format!("{:>6}", "."),
                })
                .collect();
            rows.push(cells.join(" "));
        }
        rows.join("\n")
    }
}

pub fn batched_view(arena: &Arena, p: &View) -> Result<BatchedView, GameError> {
    check_known(arena, p)?;
    let height = 1 + p
        .moves
        .iter()
        .map(|m| arena.height(&m.vertex).unwrap())
        .max()
        .unwrap_or(0);
    let columns = p
        .moves
        .iter()
        .map(|m| {
            let mut col: Vec<Option<VertexId>> =
                arena.address(&m.vertex).unwrap().iter().cloned().map(Some).collect();
            col.push(Some(m.vertex.clone()));
            col.resize(height, None);
            col
        })
        .collect();
    Ok(BatchedView { height, columns })
}

pub fn is_well_batched(arena: &Arena, p: &View) -> Result<bool, GameError> {
    check_known(arena, p)?;
    Ok(p.moves
        .chunks(2)
        .filter(|c| c.len() == 2)
        .all(|c| arena.height(&c[0].vertex) == arena.height(&c[1].vertex)))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

fn lcp(a: &[VertexId], b: &[VertexId]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkClass {
    /// Occurrences, each a set of `(column, address index)` cells.
    pub occurrences: Vec<Vec<(usize, usize)>>,
    pub boxes: BTreeSet<VertexId>,
    /// Number of occurrences whose box has even depth.
    pub opponent_occurrences: usize,
}

pub fn link_classes(arena: &Arena, p: &View) -> Result<Vec<LinkClass>, GameError> {
    if !is_well_batched(arena, p)? {
        return Err(GameError::NotWellBatched(p.render()));
    }
    let addr: Vec<&[VertexId]> = p.moves.iter().map(|m| arena.address(&m.vertex).unwrap()).collect();
    let mut cells = Vec::new();
    let mut index = BTreeMap::new();
    for (i, a) in addr.iter().enumerate() {
        for r in 0..a.len() {
            index.insert((i, r), cells.len());
            cells.push((i, r));
        }
    }
    let mut occ = UnionFind::new(cells.len());
    for (i, m) in p.moves.iter().enumerate() {
        if let Some(j) = m.pointer {
            for r in 0..lcp(addr[i], addr[j]) {
                occ.union(index[&(i, r)], index[&(j, r)]);
            }
        }
    }
    let mut class = UnionFind::new(cells.len());
    for c in 0..cells.len() {
        let root = occ.find(c);
        class.union(c, root);
    }
    for k in (0..p.len().saturating_sub(1)).step_by(2) {
        for r in 0..addr[k].len() {
            class.union(index[&(k, r)], index[&(k + 1, r)]);
        }
    }
    let mut groups: BTreeMap<usize, BTreeMap<usize, Vec<(usize, usize)>>> = BTreeMap::new();
    for (c, &cell) in cells.iter().enumerate() {
        let cl = class.find(c);
        let oc = occ.find(c);
        groups.entry(cl).or_default().entry(oc).or_default().push(cell);
    }
    Ok(groups
        .into_values()
        .map(|occs| {
            let occurrences: Vec<Vec<(usize, usize)>> = occs.into_values().collect();
            let box_of = |&(i, r): &(usize, usize)| addr[i][r].clone();
            let boxes = occurrences.iter().flatten().map(box_of).collect();
            let opponent_occurrences = occurrences
                .iter()
                .filter(|o| arena.depth(&box_of(&o[0])).unwrap().is_multiple_of(2))
                .count();
            LinkClass { occurrences, boxes, opponent_occurrences }
        })
        .collect())
}

pub fn is_linked_view(arena: &Arena, p: &View) -> Result<bool, GameError> {
    Ok(link_classes(arena, p)?.iter().all(|c| c.opponent_occurrences == 1))
}

pub fn is_linked(arena: &Arena, s: &Strategy) -> Result<bool, GameError> {
    for p in &s.views {
        if !is_linked_view(arena, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classes read literally on box vertices: the equivalence closure of pairing
/// entries at equal height, merging cells that carry the same vertex.
pub fn vertex_link_classes(arena: &Arena, p: &View) -> Result<Vec<BTreeSet<VertexId>>, GameError> {
    let b = batched_view(arena, p)?;
    if !is_well_batched(arena, p)? {
        return Err(GameError::NotWellBatched(p.render()));
    }
    let boxes: Vec<VertexId> = arena
        .vertices
        .iter()
        .filter(|(_, d)| d.label == Label::Box)
        .map(|(v, _)| v.clone())
        .collect();
    let idx = |v: &VertexId| boxes.iter().position(|w| w == v).unwrap();
    let mut uf = UnionFind::new(boxes.len());
    let mut seen = BTreeSet::new();
    for k in (0..p.len().saturating_sub(1)).step_by(2) {
        for r in 0..b.height {
            if let (Some(x), Some(y)) = (&b.columns[k][r], &b.columns[k + 1][r]) {
                if arena.label(x) == Some(&Label::Box) && arena.label(y) == Some(&Label::Box) {
                    uf.union(idx(x), idx(y));
                    seen.insert(x.clone());
                    seen.insert(y.clone());
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    for v in seen {
        groups.entry(uf.find(idx(&v))).or_default().insert(v);
    }
    Ok(groups.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CkReport {
    pub wis: bool,
    pub well_batched: bool,
    pub linked: bool,
    pub problems: Vec<String>,
}

impl CkReport {
    pub fn ok(&self) -> bool {
        self.wis && self.well_batched && self.linked
    }
}

pub fn ck_report(arena: &Arena, s: &Strategy) -> CkReport {
    let mut problems = Vec::new();
    let wis = match is_wis(arena, s) {
        Ok(b) => {
            if !b {
                problems.push("not a winning innocent strategy".into());
            }
            b
        }
        Err(e) => {
            problems.push(e.to_string());
            false
        }
    };
    let mut well_batched = true;
    let mut linked = true;
    for p in &s.views {
        match is_well_batched(arena, p) {
            Ok(true) => match is_linked_view(arena, p) {
                Ok(true) => {}
                Ok(false) => {
                    linked = false;
                    problems.push(format!("view {} is not linked", p.render()));
                }
                Err(e) => problems.push(e.to_string()),
            },
            Ok(false) => {
                well_batched = false;
                problems.push(format!("view {} is not well batched", p.render()));
            }
            Err(e) => {
                well_batched = false;
                problems.push(e.to_string());
            }
        }
    }
    CkReport { wis, well_batched, linked: linked && well_batched, problems }
}

pub fn is_ck_wis(arena: &Arena, s: &Strategy) -> bool {
    ck_report(arena, s).ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Strategy),
    Exhausted,
    BoundExceeded,
}

impl SearchOutcome {
    pub fn strategy(&self) -> Option<&Strategy> {
        match self {
            SearchOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

/// Loop-check key at an O move: its vertex and, for every even position, the
/// justifier vertex with the cells whose class agrees with the O move's.
type StateKey = (VertexId, BTreeSet<(VertexId, Vec<bool>)>);

struct Search<'a> {
    arena: &'a Arena,
    max_views: usize,
    views: usize,
    hit_bound: bool,
    next_class: u32,
    moves: Vec<Move>,
    classes: Vec<Vec<u32>>,
    stack: Vec<StateKey>,
}

impl Search<'_> {
    fn fresh(&mut self) -> u32 {
        self.next_class += 1;
        self.next_class
    }

    fn addr(&self, v: &VertexId) -> &[VertexId] {
        self.arena.address(v).unwrap()
    }

    /// Class vector of an O move `v` pointing to `ptr`.
    fn o_classes(&mut self, v: &VertexId, ptr: Option<usize>) -> Vec<u32> {
        let h = self.addr(v).len();
        let shared = match ptr {
            Some(j) => lcp(self.addr(v), self.addr(&self.moves[j].vertex)),
            None => 0,
        };
        (0..h)
            .map(|r| if r < shared { self.classes[ptr.unwrap()][r] } else { self.fresh() })
            .collect()
    }

    fn key(&self) -> StateKey {
        let n = self.moves.len();
        let m = &self.classes[n - 1];
        let opts = (0..n)
            .step_by(2)
            .map(|j| {
                let cj = &self.classes[j];
                let agree = (0..cj.len().min(m.len())).map(|r| cj[r] == m[r]).collect();
                (self.moves[j].vertex.clone(), agree)
            })
            .collect();
        (self.moves[n - 1].vertex.clone(), opts)
    }

    fn candidates(&self) -> Vec<(VertexId, usize)> {
        let n = self.moves.len();
        let m = &self.moves[n - 1].vertex;
        let label = self.arena.label(m);
        let h = self.addr(m).len();
        let mut out = Vec::new();
        for (w, d) in &self.arena.vertices {
            if Some(&d.label) != label || d.address.len() != h {
                continue;
            }
            for j in (0..n).step_by(2) {
                let target = &self.moves[j].vertex;
                if !self.arena.justifies(w, target) {
                    continue;
                }
                let shared = lcp(&d.address, self.addr(target));
                if (0..shared).all(|r| self.classes[j][r] == self.classes[n - 1][r]) {
                    out.push((w.clone(), j));
                }
            }
        }
        out
    }

    fn push(&mut self, m: Move, classes: Vec<u32>) {
        self.moves.push(m);
        self.classes.push(classes);
    }

    fn pop(&mut self) {
        self.moves.pop();
        self.classes.pop();
    }

    fn current(&self) -> View {
        View { moves: self.moves.clone() }
    }

    /// Even-length position: every O extension must be answered.
    fn solve_even(&mut self) -> Option<Vec<View>> {
        let p = self.current();
        let mut out = vec![p.clone()];
        for q in view_successors(self.arena, &p) {
            let m = q.moves.last().unwrap().clone();
            let cls = self.o_classes(&m.vertex, m.pointer);
            self.push(m, cls);
            let r = self.solve_odd();
            self.pop();
            out.extend(r?);
        }
        Some(out)
    }

    /// Odd-length position: pick one P answer.
    fn solve_odd(&mut self) -> Option<Vec<View>> {
        let key = self.key();
        if self.stack.contains(&key) {
            return None;
        }
        // this O view and its P answer
        if self.views + 2 > self.max_views {
            self.hit_bound = true;
            return None;
        }
        self.views += 1;
        let p = self.current();
        self.stack.push(key);
        let mut result = None;
        for (w, j) in self.candidates() {
            let n = self.moves.len();
            let cls = self.classes[n - 1].clone();
            let saved = self.views;
            self.push(Move { vertex: w, pointer: Some(j) }, cls);
            self.views += 1;
            let r = self.solve_even();
            self.pop();
            if let Some(mut vs) = r {
                vs.push(p.clone());
                result = Some(vs);
                break;
            }
            self.views = saved;
        }
        self.stack.pop();
        result
    }
}

/// Backtracking search for a CK-WIS. O extensions are forced; P answers are
/// tried in vertex then pointer order. A repeated loop-check state on a branch
/// is pruned, so the search always terminates; `max_views` caps the size of
/// the partial strategy.
pub fn search_ck_wis(arena: &Arena, max_views: usize) -> SearchOutcome {
    let mut s = Search {
        arena,
        max_views,
        views: 0,
        hit_bound: false,
        next_class: 0,
        moves: Vec::new(),
        classes: Vec::new(),
        stack: Vec::new(),
    };
    match s.solve_even() {
        Some(vs) => SearchOutcome::Found(Strategy::from_views(vs)),
        None if s.hit_bound => SearchOutcome::BoundExceeded,
        None => SearchOutcome::Exhausted,
    }
}

pub const DEFAULT_MAX_VIEWS: usize = 100_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{arena_of_formula, arena_of_sequent};
    use crate::surface::parse_formula;

    fn f(s: &str) -> crate::syntax::Formula {
        parse_formula(s).unwrap()
    }

    fn view(ms: &[(&str, Option<usize>)]) -> View {
        View { moves: ms.iter().map(|(t, p)| Move::new(t, *p)).collect() }
    }

    fn s1() -> Strategy {
        Strategy::from_views([view(&[]), view(&[("1", None)]), view(&[("1", None), ("10", Some(0))])])
    }

    fn s2() -> Strategy {
        Strategy::from_views([
            view(&[]),
            view(&[("111", None)]),
            view(&[("111", None), ("110", Some(0))]),
            view(&[("111", None), ("110", Some(0)), ("100", Some(1))]),
            view(&[("111", None), ("110", Some(0)), ("100", Some(1)), ("011", Some(0))]),
        ])
    }

    #[test]
    fn f1_strategy() {
        let a = arena_of_formula(&f("#a -> a"));
        assert!(is_wis(&a, &s1()).unwrap());
        assert!(!is_well_batched(&a, &view(&[("1", None), ("10", Some(0))])).unwrap());
        assert!(!is_ck_wis(&a, &s1()));
        assert!(!is_wis(&a, &Strategy::from_views([view(&[])])).unwrap());
        assert_eq!(search_ck_wis(&a, 1000), SearchOutcome::Exhausted);
    }

    #[test]
    fn f2_strategy() {
        let a = arena_of_formula(&f("(#a -> #b) -> #(a -> b)"));
        assert!(!is_view(&a, &view(&[("111", None), ("100", Some(0))])).unwrap());
        assert!(is_wis(&a, &s2()).unwrap());
        let full = view(&[("111", None), ("110", Some(0)), ("100", Some(1)), ("011", Some(0))]);
        assert!(is_well_batched(&a, &full).unwrap());
        let cls = link_classes(&a, &full).unwrap();
        assert_eq!(cls.len(), 1);
        assert_eq!(cls[0].opponent_occurrences, 2);
        assert!(!is_ck_wis(&a, &s2()));
        let vc = vertex_link_classes(&a, &full).unwrap();
        assert_eq!(vc.len(), 1);
        assert_eq!(search_ck_wis(&a, 1000), SearchOutcome::Exhausted);
    }

    #[test]
    fn intro_arena() {
        let a = arena_of_sequent(&[f("#a"), f("#b")], &f("#a"));
        let s = Strategy::from_views([view(&[]), view(&[("111", None)]), view(&[("111", None), ("00", Some(0))])]);
        let s = Strategy::from_views(s.views.into_iter().map(|mut v| {
            if v.len() == 2 {
                v.moves[1].vertex = VertexId::new("10");
            }
            v
        }));
        assert!(is_ck_wis(&a, &s), "{:?}", ck_report(&a, &s));
        assert_eq!(search_ck_wis(&a, 1000), SearchOutcome::Found(s));
        let p = view(&[("111", None), ("10", Some(0))]);
        assert!(view_successors(&a, &p).is_empty());
    }

    #[test]
    fn identity_search() {
        let a = arena_of_formula(&f("a -> a"));
        let found = search_ck_wis(&a, 1000);
        let s = found.strategy().unwrap();
        assert_eq!(s.views.len(), 3);
        assert!(is_ck_wis(&a, s));
    }

    #[test]
    fn not_prefix_closed() {
        let a = arena_of_formula(&f("a -> a"));
        let s = Strategy::from_views([view(&[]), view(&[("1", None), ("0", Some(0))])]);
        assert!(matches!(is_wis(&a, &s), Err(GameError::NotPrefixClosed(_))));
    }
}
