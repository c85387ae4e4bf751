//! Equality of paths modulo elementary deformations.
//!
//! The engine never guesses: `Equal` carries a replayable move trace,
//! `Distinct` carries an endpoint or homology certificate, and anything else
//! is `Unknown`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{h1_data, ClassVector, HomologyData};
use crate::path::{Path, Simplex1, Step};
use crate::poset::{Elem, Poset};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Merge,
    Split,
    SupportMove,
    /// Replace a segment by another with the same normal form.
    Rewrite,
}

/// One deformation applied to a simplex word at `position`. For merges and
/// splits `support` is an upper bound of all three supports involved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub position: usize,
    pub operands: Vec<Simplex1>,
    pub result: Vec<Simplex1>,
    pub support: Option<Elem>,
}

impl Move {
    pub fn inverse(&self) -> Move {
        let kind = match self.kind {
            MoveKind::Merge => MoveKind::Split,
            MoveKind::Split => MoveKind::Merge,
            k => k,
        };
        let support = match kind {
            MoveKind::SupportMove => self.operands.first().map(|s| s.x),
            _ => self.support,
        };
        Move {
            kind,
            position: self.position,
            operands: self.result.clone(),
            result: self.operands.clone(),
            support,
        }
    }

    /// Checks that `result` legitimately replaces `operands`.
    pub fn validate(&self, p: &Poset) -> Result<()> {
        let bad = |why: &str| Err(Error::Replay(format!("{:?} at {}: {why}", self.kind, self.position)));
        if self.operands.iter().chain(&self.result).any(|s| !s.is_valid(p)) {
            return bad("invalid simplex");
        }
        match (self.kind, self.operands.as_slice(), self.result.as_slice()) {
            (MoveKind::Merge, [l, r], [s]) | (MoveKind::Split, [s], [l, r]) => {
                let Some(w) = self.support else {
                    return bad("missing common upper bound");
                };
                if !(p.le(l.x, w) && p.le(r.x, w) && p.le(s.x, w)) {
                    return bad("support is not a common upper bound");
                }
                match s.split(p, l.b, l.x, r.x) {
                    Ok((gl, gr)) if gl == *l && gr == *r => Ok(()),
                    _ => bad("endpoints do not match"),
                }
            }
            (MoveKind::SupportMove, [s], [t]) => match s.support_move(p, t.x) {
                Ok(got) if got == *t => Ok(()),
                _ => bad("illegal support move"),
            },
            (MoveKind::Rewrite, ops, res) if !ops.is_empty() && !res.is_empty() => {
                let lhs = Path::from_simplices(p, ops)?;
                let rhs = Path::from_simplices(p, res)?;
                if lhs == rhs {
                    Ok(())
                } else {
                    bad("normal forms differ")
                }
            }
            _ => bad("wrong operand shape"),
        }
    }

    pub fn to_record(&self, p: &Poset) -> MoveRecord {
        let names = |w: &[Simplex1]| {
            w.iter()
                .map(|s| [p.name(s.a).to_string(), p.name(s.x).to_string(), p.name(s.b).to_string()])
                .collect()
        };
        MoveRecord {
            kind: self.kind,
            position: self.position,
            operands: names(&self.operands),
            result: names(&self.result),
            support: self.support.map(|z| p.name(z).to_string()),
        }
    }

    pub fn from_record(p: &Poset, r: &MoveRecord) -> Result<Move> {
        let word = |w: &[[String; 3]]| -> Result<Vec<Simplex1>> {
            w.iter()
                .map(|[a, x, b]| Ok(Simplex1 { a: p.elem(a)?, x: p.elem(x)?, b: p.elem(b)? }))
                .collect()
        };
        Ok(Move {
            kind: r.kind,
            position: r.position,
            operands: word(&r.operands)?,
            result: word(&r.result)?,
            support: r.support.as_deref().map(|z| p.elem(z)).transpose()?,
        })
    }
}

/// Serialized move: simplices as `[end, support, start]` name triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub position: usize,
    pub operands: Vec<[String; 3]>,
    pub result: Vec<[String; 3]>,
    pub support: Option<String>,
}

pub fn trace_to_json(p: &Poset, trace: &[Move]) -> String {
    let records: Vec<MoveRecord> = trace.iter().map(|m| m.to_record(p)).collect();
    serde_json::to_string_pretty(&records).expect("plain data serializes")
}

pub fn trace_from_json(p: &Poset, text: &str) -> Result<Vec<Move>> {
    let records: Vec<MoveRecord> = serde_json::from_str(text)?;
    records.iter().map(|r| Move::from_record(p, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    EndpointMismatch,
    Homology { left: ClassVector, right: ClassVector },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal { trace: Vec<Move> },
    Distinct(Certificate),
    Unknown { explored: usize },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }

    pub fn is_distinct(&self) -> bool {
        matches!(self, Verdict::Distinct(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }
}

/// Replays `trace` from the simplex word of `p` and checks it ends at the
/// simplex word of `q`.
pub fn replay(p: &Poset, from: &Path, to: &Path, trace: &[Move]) -> Result<()> {
    if from.is_zero() || to.is_zero() {
        return if from.is_zero() && to.is_zero() && trace.is_empty() {
            Ok(())
        } else {
            Err(Error::Replay("zero paths only equal each other".into()))
        };
    }
    let mut word = from.to_simplices(p)?;
    for m in trace {
        m.validate(p)?;
        let end = m.position + m.operands.len();
        if end > word.len() || word[m.position..end] != m.operands[..] {
            return Err(Error::Replay(format!("operands not found at position {}", m.position)));
        }
        word.splice(m.position..end, m.result.iter().copied());
    }
    if word != to.to_simplices(p)? {
        return Err(Error::Replay("trace ends at a different word".into()));
    }
    Ok(())
}

/// Shared per-poset state for equality queries.
#[derive(Clone, Debug)]
pub struct Engine {
    directed: bool,
    homology: Option<HomologyData>,
    pub budget: usize,
}

impl Engine {
    pub fn new(p: &Poset) -> Self {
        Engine {
            directed: !p.is_empty() && p.is_upward_directed(),
            homology: h1_data(p).ok(),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn homology(&self) -> Option<&HomologyData> {
        self.homology.as_ref()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn equal(&self, p: &Poset, lhs: &Path, rhs: &Path, depth: usize) -> Verdict {
        match (lhs.endpoints(), rhs.endpoints()) {
            (None, None) => return Verdict::Equal { trace: Vec::new() },
            (Some(a), Some(b)) if a == b => {}
            _ => return Verdict::Distinct(Certificate::EndpointMismatch),
        }
        if lhs == rhs {
            return Verdict::Equal { trace: Vec::new() };
        }
        if self.directed {
            return Verdict::Equal { trace: directed_trace(p, lhs, rhs) };
        }
        if let Some(h) = &self.homology {
            let left = h.relative_class(p, lhs).expect("nonzero");
            let right = h.relative_class(p, rhs).expect("nonzero");
            if left != right {
                return Verdict::Distinct(Certificate::Homology { left, right });
            }
        }
        let a = lhs.to_simplices(p).expect("nonzero");
        let b = rhs.to_simplices(p).expect("nonzero");
        match bidirectional_search(p, a, b, depth, self.budget) {
            Ok(trace) => Verdict::Equal { trace },
            Err(explored) => Verdict::Unknown { explored },
        }
    }
}

pub fn equal_paths(p: &Poset, lhs: &Path, rhs: &Path, depth: usize) -> Verdict {
    Engine::new(p).equal(p, lhs, rhs, depth)
}

// Upward-directed posets: merge every simplex word into one simplex, then
// move supports through a common upper bound.
fn directed_trace(p: &Poset, lhs: &Path, rhs: &Path) -> Vec<Move> {
    let (mut trace, left) = collapse(p, lhs.to_simplices(p).expect("nonzero"));
    let (back, right) = collapse(p, rhs.to_simplices(p).expect("nonzero"));
    if left.x != right.x {
        let w = p.first_upper_bound(left.x, right.x).expect("directed");
        let mut cur = left;
        for y in [w, right.x] {
            if cur.x != y {
                let next = Simplex1 { x: y, ..cur };
                trace.push(Move {
                    kind: MoveKind::SupportMove,
                    position: 0,
                    operands: vec![cur],
                    result: vec![next],
                    support: Some(y),
                });
                cur = next;
            }
        }
    }
    trace.extend(back.iter().rev().map(Move::inverse));
    trace
}

fn collapse(p: &Poset, mut word: Vec<Simplex1>) -> (Vec<Move>, Simplex1) {
    let mut moves = Vec::new();
    while word.len() > 1 {
        let (l, r) = (word[0], word[1]);
        let z = p.first_upper_bound(l.x, r.x).expect("directed");
        let m = l.merge(p, &r, z).expect("adjacent with bound");
        moves.push(Move {
            kind: MoveKind::Merge,
            position: 0,
            operands: vec![l, r],
            result: vec![m],
            support: Some(z),
        });
        word.splice(0..2, [m]);
    }
    (moves, word[0])
}

type Word = Vec<Simplex1>;

struct Side {
    nodes: Vec<(Word, Option<(usize, Move)>)>,
    index: HashMap<Word, usize>,
    frontier: Vec<usize>,
    depth: usize,
}

impl Side {
    fn new(root: Word) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Side { nodes: vec![(root, None)], index, frontier: vec![0], depth: 0 }
    }

    fn moves_to(&self, mut node: usize) -> Vec<Move> {
        let mut out = Vec::new();
        while let Some((parent, m)) = &self.nodes[node].1 {
            out.push(m.clone());
            node = *parent;
        }
        out.reverse();
        out
    }
}

/// Returns a trace from `a` to `b`, or the number of states explored.
fn bidirectional_search(p: &Poset, a: Word, b: Word, depth: usize, budget: usize) -> Result<Vec<Move>, usize> {
    if a == b {
        return Ok(Vec::new());
    }
    let mut sides = [Side::new(a), Side::new(b)];
    let mut explored = 2;
    loop {
        let pick = match (sides[0].depth < depth, sides[1].depth < depth) {
            (false, false) => return Err(explored),
            (true, false) => 0,
            (false, true) => 1,
            (true, true) => usize::from(sides[1].frontier.len() < sides[0].frontier.len()),
        };
        if sides[pick].frontier.is_empty() {
            return Err(explored);
        }
        let frontier = std::mem::take(&mut sides[pick].frontier);
        let mut next = Vec::new();
        for node in frontier {
            let word = sides[pick].nodes[node].0.clone();
            for (m, w) in neighbours(p, &word) {
                if let Some(&hit) = sides[1 - pick].index.get(&w) {
                    let mut here = sides[pick].moves_to(node);
                    here.push(m);
                    let there = sides[1 - pick].moves_to(hit);
                    let (fwd, bwd) = if pick == 0 { (here, there) } else { (there, here) };
                    let mut trace = fwd;
                    trace.extend(bwd.iter().rev().map(Move::inverse));
                    return Ok(trace);
                }
                if sides[pick].index.contains_key(&w) {
                    continue;
                }
                if explored >= budget {
                    return Err(explored);
                }
                explored += 1;
                let id = sides[pick].nodes.len();
                sides[pick].index.insert(w.clone(), id);
                sides[pick].nodes.push((w, Some((node, m))));
                next.push(id);
            }
        }
        sides[pick].frontier = next;
        sides[pick].depth += 1;
    }
}

fn splice(word: &[Simplex1], at: usize, len: usize, with: &[Simplex1]) -> Word {
    let mut out = Vec::with_capacity(word.len() + with.len());
    out.extend_from_slice(&word[..at]);
    out.extend_from_slice(with);
    out.extend_from_slice(&word[at + len..]);
    out
}

fn neighbours(p: &Poset, word: &[Simplex1]) -> Vec<(Move, Word)> {
    let mut out = Vec::new();
    if let Ok(path) = Path::from_simplices(p, word) {
        let canon = path.to_simplices(p).expect("nonzero");
        if canon != word {
            let m = Move {
                kind: MoveKind::Rewrite,
                position: 0,
                operands: word.to_vec(),
                result: canon.clone(),
                support: None,
            };
            out.push((m, canon));
        }
    }
    for k in 0..word.len() {
        let s = word[k];
        if let Some(&r) = word.get(k + 1) {
            for z in p.upper_bounds(s.x, r.x) {
                let m = s.merge(p, &r, z).expect("bound checked");
                let w = splice(word, k, 2, &[m]);
                out.push((
                    Move { kind: MoveKind::Merge, position: k, operands: vec![s, r], result: vec![m], support: Some(z) },
                    w,
                ));
            }
        }
        for y in p.upper_bounds(s.a, s.b) {
            if y != s.x && p.comparable(y, s.x) {
                let t = Simplex1 { x: y, ..s };
                out.push((
                    Move { kind: MoveKind::SupportMove, position: k, operands: vec![s], result: vec![t], support: Some(y) },
                    splice(word, k, 1, &[t]),
                ));
            }
        }
        for mid in p.elements() {
            for x in p.upper_bounds(s.a, mid) {
                for y in p.upper_bounds(mid, s.b) {
                    let Some(&w) = p.common_upper_bounds(&[x, y, s.x]).first() else {
                        continue;
                    };
                    let l = Simplex1 { a: s.a, x, b: mid };
                    let r = Simplex1 { a: mid, x: y, b: s.b };
                    out.push((
                        Move { kind: MoveKind::Split, position: k, operands: vec![s], result: vec![l, r], support: Some(w) },
                        splice(word, k, 1, &[l, r]),
                    ));
                }
            }
        }
    }
    out
}

/// Path through the vertex sequence `route`, consecutive entries comparable.
fn route_path(p: &Poset, route: &[Elem]) -> Path {
    let raw: Vec<Step> = route
        .windows(2)
        .rev()
        .map(|w| Step::new(p, w[0], w[1]).expect("tree edges are comparable"))
        .collect();
    if raw.is_empty() {
        return Path::identity(route[0]);
    }
    crate::path::normalize(p, &raw)
}

#[derive(Clone, Debug)]
pub struct Generator {
    /// Chord `(lower, upper)` this generator runs through.
    pub chord: (Elem, Elem),
    pub path: Path,
    /// Whether `equal_paths` proved the generator equal to the unit.
    pub reduces_to_unit: bool,
}

/// Spanning-tree presentation of the loop group at `base`.
#[derive(Clone, Debug)]
pub struct LoopGroupPresentation {
    pub base: Elem,
    pub tree_edges: Vec<(Elem, Elem)>,
    pub generators: Vec<Generator>,
    /// One word per 3-chain, letters `(generator, ±1)`; tree edges omitted.
    pub relators: Vec<Vec<(usize, i32)>>,
}

impl LoopGroupPresentation {
    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(|g| g.reduces_to_unit)
    }
}

pub fn loop_group(p: &Poset, base: Elem, depth: usize) -> Result<LoopGroupPresentation> {
    if !p.is_connected() {
        return Err(Error::DisconnectedPoset);
    }
    let engine = Engine::new(p);
    let graph = p.comparability_graph();
    let tree = graph.spanning_tree(base);
    let mut letter = HashMap::new();
    let mut generators = Vec::new();
    for &(u, v) in &graph.edges {
        if tree.contains_edge(u, v) {
            continue;
        }
        let mut route = tree.route(base, u);
        route.extend(tree.route(v, base));
        let path = route_path(p, &route);
        let unit = Path::identity(base);
        let reduces_to_unit = engine.equal(p, &path, &unit, depth).is_equal();
        letter.insert((u, v), generators.len());
        generators.push(Generator { chord: (u, v), path, reduces_to_unit });
    }
    let relators = p
        .triangles()
        .into_iter()
        .map(|(x, y, z)| {
            [((x, y), 1), ((y, z), 1), ((x, z), -1)]
                .into_iter()
                .filter_map(|(e, sign)| letter.get(&e).map(|&g| (g, sign)))
                .collect()
        })
        .collect();
    Ok(LoopGroupPresentation { base, tree_edges: tree.tree_edges.clone(), generators, relators })
}

/// Conjugation `g ↦ p⁻¹ g p` from loops at `∂₀p` to loops at `∂₁p`.
pub fn transport_iso(p: &Poset, along: &Path, g: &Path) -> Result<Path> {
    match (along.end(), g.endpoints()) {
        (Some(end), Some((ge, gs))) if ge == end && gs == end => {
            Ok(Path::product(p, [&along.inverse(), g, along]))
        }
        _ => Err(Error::NotComposable(format!(
            "{} is not a loop at the end of {}",
            g.render(p),
            along.render(p)
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct Factorization {
    /// `p * q⁻¹`, a loop at `∂₀p`.
    pub left: Path,
    /// `q⁻¹ * p`, a loop at `∂₁p`.
    pub right: Path,
    pub left_check: Verdict,
    pub right_check: Verdict,
}

/// Writes `p = g1 * q = q * g2`.
pub fn factor_through(p: &Poset, lhs: &Path, rhs: &Path, depth: usize) -> Result<Factorization> {
    if lhs.is_zero() || rhs.is_zero() || lhs.endpoints() != rhs.endpoints() {
        return Err(Error::EndpointMismatch(format!("{} vs {}", lhs.render(p), rhs.render(p))));
    }
    let engine = Engine::new(p);
    let left = lhs.compose(p, &rhs.inverse());
    let right = rhs.inverse().compose(p, lhs);
    let left_check = engine.equal(p, &left.compose(p, rhs), lhs, depth);
    let right_check = engine.equal(p, &rhs.compose(p, &right), lhs, depth);
    Ok(Factorization { left, right, left_check, right_check })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ClassKey {
    Directed(Elem, Elem),
    Homology(Elem, Elem, ClassVector),
    Endpoints(Elem, Elem),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Found(usize),
    Absent,
    Unresolved,
}

/// Interning table of path classes: each class gets a dense id, decided
/// through the engine.
#[derive(Clone, Debug)]
pub struct Classifier {
    engine: Engine,
    depth: usize,
    reps: Vec<Path>,
    by_form: HashMap<Path, usize>,
    buckets: HashMap<ClassKey, Vec<usize>>,
}

impl Classifier {
    pub fn new(p: &Poset, depth: usize) -> Self {
        Classifier {
            engine: Engine::new(p),
            depth,
            reps: Vec::new(),
            by_form: HashMap::new(),
            buckets: HashMap::new(),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn representatives(&self) -> &[Path] {
        &self.reps
    }

    fn key(&self, p: &Poset, path: &Path) -> ClassKey {
        let (end, start) = path.endpoints().expect("nonzero");
        if self.engine.directed {
            return ClassKey::Directed(end, start);
        }
        match &self.engine.homology {
            Some(h) => ClassKey::Homology(end, start, h.relative_class(p, path).expect("nonzero")),
            None => ClassKey::Endpoints(end, start),
        }
    }

    fn search(&self, p: &Poset, path: &Path, key: &ClassKey) -> Lookup {
        if let Some(&i) = self.by_form.get(path) {
            return Lookup::Found(i);
        }
        let Some(bucket) = self.buckets.get(key) else {
            return Lookup::Absent;
        };
        let mut unresolved = false;
        for &i in bucket {
            match self.engine.equal(p, path, &self.reps[i], self.depth) {
                Verdict::Equal { .. } => return Lookup::Found(i),
                Verdict::Unknown { .. } => unresolved = true,
                Verdict::Distinct(_) => {}
            }
        }
        if unresolved {
            Lookup::Unresolved
        } else {
            Lookup::Absent
        }
    }

    pub fn lookup(&self, p: &Poset, path: &Path) -> Lookup {
        if path.is_zero() {
            return Lookup::Absent;
        }
        let key = self.key(p, path);
        self.search(p, path, &key)
    }

    /// Class id of `path`, registering a new class when necessary. `None`
    /// for the zero path.
    pub fn classify(&mut self, p: &Poset, path: &Path) -> Result<Option<usize>> {
        if path.is_zero() {
            return Ok(None);
        }
        let key = self.key(p, path);
        match self.search(p, path, &key) {
            Lookup::Found(i) => {
                self.by_form.entry(path.clone()).or_insert(i);
                Ok(Some(i))
            }
            Lookup::Unresolved => {
                let other = self.buckets[&key].first().map(|&i| self.reps[i].render(p)).unwrap_or_default();
                Err(Error::UnresolvedPair(path.render(p), other))
            }
            Lookup::Absent => {
                let id = self.reps.len();
                self.reps.push(path.clone());
                self.by_form.insert(path.clone(), id);
                self.buckets.entry(key).or_default().push(id);
                Ok(Some(id))
            }
        }
    }
}
