//! Based generator-labelled graphs and the operations on them: folding,
//! tracing, x-paths, cuts, canonical forms and I/O.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::words::{Alphabet, Letter, Word, WordError};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("generator {0} out of range")]
    BadGenerator(u32),
    #[error("cannot attach an empty path")]
    EmptyPath,
    #[error("graph is not folded")]
    NotFolded,
    #[error("graph is not connected")]
    NotConnected,
    #[error("x-loop through vertex {0}")]
    XLoop(usize),
    #[error("cannot cut at the base vertex")]
    CutAtBase,
    #[error("edge {0} is not incident to cut vertex {1}")]
    BadCutEdge(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub gen: u32,
}

/// Which end of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Tail,
    Head,
}

/// Deterministic transition table of a folded graph.
#[derive(Clone, Debug)]
pub struct FoldedIndex {
    k: usize,
    out: Vec<u32>,
    inn: Vec<u32>,
}

impl FoldedIndex {
    #[inline]
    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        let t = if l.inv { self.inn[v * self.k + l.gen as usize] } else { self.out[v * self.k + l.gen as usize] };
        (t != NONE).then_some(t as usize)
    }

    pub fn trace(&self, w: &Word, start: usize) -> Option<usize> {
        let mut v = start;
        for &l in w.letters() {
            v = self.step(v, l)?;
        }
        Some(v)
    }
}

#[derive(Debug)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    vertex_count: usize,
    base: usize,
    edges: Vec<Edge>,
    index: OnceLock<Option<FoldedIndex>>,
}

impl Clone for LabeledGraph {
    fn clone(&self) -> Self {
        LabeledGraph {
            alphabet: self.alphabet.clone(),
            vertex_count: self.vertex_count,
            base: self.base,
            edges: self.edges.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for LabeledGraph {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.vertex_count == other.vertex_count
            && self.base == other.base
            && self.edges == other.edges
    }
}

impl Eq for LabeledGraph {}

/// Mutable construction helper; `LabeledGraph` itself is a value type.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    alphabet: Alphabet,
    vertex_count: usize,
    base: usize,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        GraphBuilder { alphabet, vertex_count: 1, base: 0, edges: Vec::new() }
    }

    pub fn from_graph(g: &LabeledGraph) -> Self {
        GraphBuilder { alphabet: g.alphabet.clone(), vertex_count: g.vertex_count, base: g.base, edges: g.edges.clone() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, gen: u32) {
        debug_assert!(from < self.vertex_count && to < self.vertex_count);
        self.edges.push(Edge { from, to, gen });
    }

    /// Edge realising `l` from `from` to `to`.
    pub fn add_letter(&mut self, from: usize, to: usize, l: Letter) {
        if l.inv {
            self.add_edge(to, from, l.gen)
        } else {
            self.add_edge(from, to, l.gen)
        }
    }

    /// Fresh path spelling `w` from `start` to `end` (or to a new vertex when
    /// `end` is `None`). Returns the vertices along the path.
    pub fn add_word_path(&mut self, start: usize, w: &Word, end: Option<usize>) -> Vec<usize> {
        let mut verts = vec![start];
        let n = w.len();
        for (i, &l) in w.letters().iter().enumerate() {
            let cur = *verts.last().unwrap();
            let next = match end {
                Some(e) if i + 1 == n => e,
                _ => self.add_vertex(),
            };
            self.add_letter(cur, next, l);
            verts.push(next);
        }
        verts
    }

    pub fn build(self) -> LabeledGraph {
        LabeledGraph {
            alphabet: self.alphabet,
            vertex_count: self.vertex_count,
            base: self.base,
            edges: self.edges,
            index: OnceLock::new(),
        }
    }
}

/// A maximal path reading a power of `word` through a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPath {
    pub word: Word,
    /// From the initial vertex to the terminal vertex.
    pub vertices: Vec<usize>,
    /// Index of the starting vertex inside `vertices`.
    pub through: usize,
    /// Position in `word` of the first letter read from the initial vertex.
    pub initial_phase: usize,
    /// Letter that could not be read backwards into the initial vertex.
    pub initial_missing: Letter,
    /// Letter that could not be read out of the terminal vertex.
    pub terminal_missing: Letter,
}

impl XPath {
    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn initial(&self) -> usize {
        self.vertices[0]
    }

    pub fn terminal(&self) -> usize {
        *self.vertices.last().unwrap()
    }
}

/// Where a cut vertex is split: the listed edge ends go to `u+`, every other
/// end at the vertex goes to `u-`.
#[derive(Clone, Debug)]
pub struct CutSite {
    pub vertex: usize,
    pub plus: Vec<(usize, End)>,
}

impl CutSite {
    /// Incoming edges to `u+`, outgoing to `u-`.
    pub fn directed(g: &LabeledGraph, v: usize) -> Self {
        let plus = g.edges.iter().enumerate().filter(|(_, e)| e.to == v).map(|(i, _)| (i, End::Head)).collect();
        CutSite { vertex: v, plus }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldOrder {
    /// Lowest-indexed pending identification first.
    LowestFirst,
    /// Pending identifications processed in a seeded random order.
    Random(u64),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

enum Pending {
    Heap(BinaryHeap<Reverse<(usize, usize)>>),
    Bag(Vec<(usize, usize)>, ChaCha8Rng),
}

impl Pending {
    fn push(&mut self, a: usize, b: usize) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        match self {
            Pending::Heap(h) => h.push(Reverse((a, b))),
            Pending::Bag(v, _) => v.push((a, b)),
        }
    }

    fn pop(&mut self) -> Option<(usize, usize)> {
        match self {
            Pending::Heap(h) => h.pop().map(|r| r.0),
            Pending::Bag(v, rng) => {
                if v.is_empty() {
                    None
                } else {
                    let i = rng.gen_range(0..v.len());
                    Some(v.swap_remove(i))
                }
            }
        }
    }
}

fn compact(uf: &mut UnionFind, n: usize) -> (Vec<usize>, usize) {
    let mut new_id = vec![usize::MAX; n];
    let mut map = vec![0; n];
    let mut count = 0;
    for v in 0..n {
        let r = uf.find(v);
        if new_id[r] == usize::MAX {
            new_id[r] = count;
            count += 1;
        }
        map[v] = new_id[r];
    }
    (map, count)
}

impl LabeledGraph {
    /// One vertex (the base), no edges.
    pub fn new(alphabet: Alphabet) -> Self {
        GraphBuilder::new(alphabet).build()
    }

    pub fn from_parts(alphabet: Alphabet, vertex_count: usize, base: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if vertex_count == 0 || base >= vertex_count {
            return Err(GraphError::BadVertex(base));
        }
        for e in &edges {
            if e.from >= vertex_count {
                return Err(GraphError::BadVertex(e.from));
            }
            if e.to >= vertex_count {
                return Err(GraphError::BadVertex(e.to));
            }
            if e.gen as usize >= alphabet.size() {
                return Err(GraphError::BadGenerator(e.gen));
            }
        }
        Ok(LabeledGraph { alphabet, vertex_count, base, edges, index: OnceLock::new() })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.size()
    }

    /// Transition table, or `None` when two edges share an end and a label.
    pub fn folded_index(&self) -> Option<&FoldedIndex> {
        self.index
            .get_or_init(|| {
                let k = self.alphabet.size();
                let mut out = vec![NONE; self.vertex_count * k];
                let mut inn = vec![NONE; self.vertex_count * k];
                for e in &self.edges {
                    let o = &mut out[e.from * k + e.gen as usize];
                    if *o != NONE {
                        return None;
                    }
                    *o = e.to as u32;
                    let i = &mut inn[e.to * k + e.gen as usize];
                    if *i != NONE {
                        return None;
                    }
                    *i = e.from as u32;
                }
                Some(FoldedIndex { k, out, inn })
            })
            .as_ref()
    }

    pub fn is_folded(&self) -> bool {
        self.folded_index().is_some()
    }

    fn idx(&self) -> &FoldedIndex {
        self.folded_index().expect("operation requires a folded graph")
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        self.idx().step(v, l)
    }

    /// Endpoint of the path spelling `w` from `start`. Panics on unfolded
    /// graphs.
    pub fn trace(&self, w: &Word, start: usize) -> Option<usize> {
        self.idx().trace(w, start)
    }

    pub fn is_member(&self, w: &Word) -> bool {
        self.trace(w, self.base) == Some(self.base)
    }

    /// `v -> trace(w, v)` for every vertex.
    pub fn partial_map(&self, w: &Word) -> Vec<Option<usize>> {
        let idx = self.idx();
        (0..self.vertex_count).map(|v| idx.trace(w, v)).collect()
    }

    /// A vertex carrying an `x^d` loop with `d <= dmax` minimal over all
    /// vertices (lowest vertex among ties).
    pub fn has_power_loop(&self, x: &Word, dmax: usize) -> Option<(usize, usize)> {
        if x.is_empty() {
            return Some((self.base, 1)).filter(|_| dmax >= 1);
        }
        let f = self.partial_map(x);
        let mut best: Option<(usize, usize)> = None;
        let mut done = vec![false; self.vertex_count];
        for v in 0..self.vertex_count {
            if done[v] {
                continue;
            }
            let mut cur = v;
            let mut len = 0;
            let mut cycle = false;
            loop {
                match f[cur] {
                    None => break,
                    Some(n) => {
                        len += 1;
                        if n == v {
                            cycle = true;
                            break;
                        }
                        if len > self.vertex_count {
                            break;
                        }
                        cur = n;
                    }
                }
            }
            if cycle {
                let mut c = v;
                loop {
                    done[c] = true;
                    c = f[c].unwrap();
                    if c == v {
                        break;
                    }
                }
                if len <= dmax && best.map_or(true, |(_, d)| len < d) {
                    best = Some((v, len));
                }
            }
        }
        best
    }

    /// Unique maximal path through `v` reading a power of `x`, with `v` at
    /// phase 0 (a copy of `x` starts at `v`).
    pub fn maximal_x_path(&self, x: &Word, v: usize) -> Result<XPath, GraphError> {
        if v >= self.vertex_count {
            return Err(GraphError::BadVertex(v));
        }
        let idx = self.folded_index().ok_or(GraphError::NotFolded)?;
        let xs = x.letters();
        let n = xs.len();
        assert!(n > 0, "x must be nonempty");
        let mut fwd = vec![v];
        let mut phase = 0;
        let terminal_missing;
        loop {
            let l = xs[phase];
            match idx.step(*fwd.last().unwrap(), l) {
                Some(t) => {
                    phase = (phase + 1) % n;
                    if t == v && phase == 0 {
                        return Err(GraphError::XLoop(v));
                    }
                    fwd.push(t);
                }
                None => {
                    terminal_missing = l;
                    break;
                }
            }
        }
        let mut back = Vec::new();
        let mut bphase = 0;
        let mut cur = v;
        let initial_missing;
        loop {
            let prev_phase = (bphase + n - 1) % n;
            let l = xs[prev_phase];
            match idx.step(cur, l.inverse()) {
                Some(t) => {
                    back.push(t);
                    cur = t;
                    bphase = prev_phase;
                }
                None => {
                    initial_missing = l;
                    break;
                }
            }
        }
        let through = back.len();
        let mut vertices: Vec<usize> = back.into_iter().rev().collect();
        vertices.extend(fwd);
        Ok(XPath { word: x.clone(), vertices, through, initial_phase: bphase, initial_missing, terminal_missing })
    }

    pub fn is_regular(&self) -> bool {
        let k = self.alphabet.size();
        let mut out = vec![0u32; self.vertex_count * k];
        let mut inn = vec![0u32; self.vertex_count * k];
        for e in &self.edges {
            out[e.from * k + e.gen as usize] += 1;
            inn[e.to * k + e.gen as usize] += 1;
        }
        out.iter().all(|&c| c == 1) && inn.iter().all(|&c| c == 1)
    }

    /// Undirected adjacency lists in (generator, out-then-in, edge order).
    fn neighbour_lists(&self) -> Vec<Vec<(u32, u8, usize)>> {
        let mut adj: Vec<Vec<(u32, u8, usize)>> = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.from].push((e.gen, 0, e.to));
            adj[e.to].push((e.gen, 1, e.from));
        }
        for a in &mut adj {
            a.sort_by_key(|&(g, d, _)| (g, d));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbour_lists();
        let mut seen = vec![false; self.vertex_count];
        let mut q = VecDeque::from([self.base]);
        seen[self.base] = true;
        let mut count = 1;
        while let Some(v) = q.pop_front() {
            for &(_, _, u) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    q.push_back(u);
                }
            }
        }
        count == self.vertex_count
    }

    /// BFS numbering from the base with neighbours in (generator, direction)
    /// order; unreached vertices follow in index order.
    pub fn bfs_order(&self) -> Vec<usize> {
        let adj = self.neighbour_lists();
        let mut order = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        let mut q = VecDeque::new();
        order[self.base] = 0;
        next += 1;
        q.push_back(self.base);
        loop {
            while let Some(v) = q.pop_front() {
                for &(_, _, u) in &adj[v] {
                    if order[u] == usize::MAX {
                        order[u] = next;
                        next += 1;
                        q.push_back(u);
                    }
                }
            }
            match order.iter().position(|&o| o == usize::MAX) {
                Some(v) => {
                    order[v] = next;
                    next += 1;
                    q.push_back(v);
                }
                None => break,
            }
        }
        order
    }

    /// Byte encoding invariant under based isomorphism (for folded connected
    /// graphs).
    pub fn canonical_form(&self) -> Vec<u8> {
        let order = self.bfs_order();
        let mut edges: Vec<(usize, usize, u32)> = self.edges.iter().map(|e| (order[e.from], order[e.to], e.gen)).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut out = Vec::with_capacity(16 + edges.len() * 12);
        out.extend_from_slice(&(self.alphabet.size() as u32).to_le_bytes());
        out.extend_from_slice(&(self.vertex_count as u32).to_le_bytes());
        for (a, b, g) in edges {
            out.extend_from_slice(&(a as u32).to_le_bytes());
            out.extend_from_slice(&(b as u32).to_le_bytes());
            out.extend_from_slice(&g.to_le_bytes());
        }
        out
    }

    /// Graph relabelled by BFS order from the base (base becomes 0).
    pub fn canonical_relabel(&self) -> (LabeledGraph, Vec<usize>) {
        let order = self.bfs_order();
        let mut edges: Vec<Edge> =
            self.edges.iter().map(|e| Edge { from: order[e.from], to: order[e.to], gen: e.gen }).collect();
        edges.sort_unstable_by_key(|e| (e.from, e.gen, e.to));
        edges.dedup();
        let g = LabeledGraph::from_parts(self.alphabet.clone(), self.vertex_count, 0, edges).unwrap();
        (g, order)
    }

    /// Largest undirected distance between two vertices.
    pub fn diameter(&self) -> usize {
        let adj = self.neighbour_lists();
        let mut best = 0;
        let mut dist = vec![usize::MAX; self.vertex_count];
        for s in 0..self.vertex_count {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &(_, _, u) in &adj[v] {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        best = best.max(dist[u]);
                        q.push_back(u);
                    }
                }
            }
        }
        best
    }

    /// Fresh loop spelling `w` at the base.
    pub fn add_loop(&self, w: &Word) -> LabeledGraph {
        let mut b = GraphBuilder::from_graph(self);
        if !w.is_empty() {
            let base = self.base;
            b.add_word_path(base, w, Some(base));
        }
        b.build()
    }

    /// Fresh path spelling `w` from the base; returns its far end.
    pub fn add_path(&self, w: &Word) -> Result<(LabeledGraph, usize), GraphError> {
        if w.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        let mut b = GraphBuilder::from_graph(self);
        let verts = b.add_word_path(self.base, w, None);
        Ok((b.build(), *verts.last().unwrap()))
    }

    /// Disjoint union; vertices of `other` are shifted by the returned offset.
    pub fn disjoint_union(&self, other: &LabeledGraph) -> (LabeledGraph, usize) {
        let off = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge { from: e.from + off, to: e.to + off, gen: e.gen }));
        let g = LabeledGraph {
            alphabet: self.alphabet.clone(),
            vertex_count: off + other.vertex_count,
            base: self.base,
            edges,
            index: OnceLock::new(),
        };
        (g, off)
    }

    /// Quotient by the given identifications, without folding. Classes are
    /// numbered by their lowest member.
    pub fn identify(&self, pairs: &[(usize, usize)]) -> (LabeledGraph, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertex_count);
        for &(a, b) in pairs {
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                uf.parent[hi] = lo;
            }
        }
        let (map, count) = compact(&mut uf, self.vertex_count);
        let edges = self.edges.iter().map(|e| Edge { from: map[e.from], to: map[e.to], gen: e.gen }).collect();
        let g = LabeledGraph {
            alphabet: self.alphabet.clone(),
            vertex_count: count,
            base: map[self.base],
            edges,
            index: OnceLock::new(),
        };
        (g, map)
    }

    /// Split each site's vertex in two. `u+` keeps the old index, `u-` is
    /// appended; returns the `(u+, u-)` pairs in site order.
    pub fn cut_at(&self, sites: &[CutSite]) -> Result<(LabeledGraph, Vec<(usize, usize)>), GraphError> {
        let mut edges = self.edges.clone();
        let mut count = self.vertex_count;
        let mut pairs = Vec::with_capacity(sites.len());
        let mut moved_tail = vec![false; edges.len()];
        let mut moved_head = vec![false; edges.len()];
        for site in sites {
            let u = site.vertex;
            if u >= self.vertex_count {
                return Err(GraphError::BadVertex(u));
            }
            if u == self.base {
                return Err(GraphError::CutAtBase);
            }
            let minus = count;
            count += 1;
            let mut keep_tail = vec![false; edges.len()];
            let mut keep_head = vec![false; edges.len()];
            for &(ei, end) in &site.plus {
                let e = self.edges.get(ei).ok_or(GraphError::BadCutEdge(ei, u))?;
                match end {
                    End::Tail if e.from == u => keep_tail[ei] = true,
                    End::Head if e.to == u => keep_head[ei] = true,
                    _ => return Err(GraphError::BadCutEdge(ei, u)),
                }
            }
            for (ei, e) in self.edges.iter().enumerate() {
                if e.from == u && !keep_tail[ei] && !moved_tail[ei] {
                    edges[ei].from = minus;
                    moved_tail[ei] = true;
                }
                if e.to == u && !keep_head[ei] && !moved_head[ei] {
                    edges[ei].to = minus;
                    moved_head[ei] = true;
                }
            }
            pairs.push((u, minus));
        }
        let g = LabeledGraph { alphabet: self.alphabet.clone(), vertex_count: count, base: self.base, edges, index: OnceLock::new() };
        Ok((g, pairs))
    }

    /// Index of the edge `from -gen-> to`, if present.
    pub fn find_edge(&self, from: usize, to: usize, gen: u32) -> Option<usize> {
        self.edges.iter().position(|e| e.from == from && e.to == to && e.gen == gen)
    }

    pub fn fold(&self) -> (LabeledGraph, Vec<usize>) {
        self.fold_with(FoldOrder::LowestFirst)
    }

    /// Stallings folding. Each equivalence class keeps its lowest member as
    /// representative; output vertices are numbered by that member.
    pub fn fold_with(&self, order: FoldOrder) -> (LabeledGraph, Vec<usize>) {
        let n = self.vertex_count;
        let mut uf = UnionFind::new(n);
        let mut out: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
        let mut inn: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
        let mut pending = match order {
            FoldOrder::LowestFirst => Pending::Heap(BinaryHeap::new()),
            FoldOrder::Random(seed) => Pending::Bag(Vec::new(), ChaCha8Rng::seed_from_u64(seed)),
        };

        fn insert(list: &mut Vec<(u32, usize)>, gen: u32, t: usize, uf: &mut UnionFind, pending: &mut Pending) {
            for &(g, o) in list.iter() {
                if g == gen {
                    let (ro, rt) = (uf.find(o), uf.find(t));
                    if ro != rt {
                        pending.push(ro, rt);
                    }
                    return;
                }
            }
            list.push((gen, t));
        }

        for e in &self.edges {
            let mut o = std::mem::take(&mut out[e.from]);
            insert(&mut o, e.gen, e.to, &mut uf, &mut pending);
            out[e.from] = o;
            let mut i = std::mem::take(&mut inn[e.to]);
            insert(&mut i, e.gen, e.from, &mut uf, &mut pending);
            inn[e.to] = i;
        }

        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra == rb {
                continue;
            }
            let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
            uf.parent[gone] = keep;
            let moved_out = std::mem::take(&mut out[gone]);
            let mut o = std::mem::take(&mut out[keep]);
            for (g, t) in moved_out {
                insert(&mut o, g, t, &mut uf, &mut pending);
            }
            out[keep] = o;
            let moved_in = std::mem::take(&mut inn[gone]);
            let mut i = std::mem::take(&mut inn[keep]);
            for (g, t) in moved_in {
                insert(&mut i, g, t, &mut uf, &mut pending);
            }
            inn[keep] = i;
        }

        let (map, count) = compact(&mut uf, n);
        let mut edges = Vec::new();
        for v in 0..n {
            if uf.find(v) != v {
                continue;
            }
            for &(g, t) in &out[v] {
                edges.push(Edge { from: map[v], to: map[uf.find(t)], gen: g });
            }
        }
        edges.sort_unstable_by_key(|e| (e.from, e.gen, e.to));
        edges.dedup();
        let g = LabeledGraph {
            alphabet: self.alphabet.clone(),
            vertex_count: count,
            base: map[self.base],
            edges,
            index: OnceLock::new(),
        };
        (g, map)
    }

    /// Whether some closed path at the base has a label that freely reduces
    /// to `w`. Works on unfolded graphs: computes the relation "joined by a
    /// path whose label reduces to the identity" by naive fixpoint and runs a
    /// set simulation through it. Cubic; intended for small graphs.
    pub fn accepts_unfolded(&self, w: &Word) -> bool {
        let rel = self.null_relation();
        let n = self.vertex_count;
        let close = |set: &[bool]| -> Vec<bool> {
            let mut c = vec![false; n];
            for u in 0..n {
                if set[u] {
                    for v in 0..n {
                        if rel[u * n + v] {
                            c[v] = true;
                        }
                    }
                }
            }
            c
        };
        let mut cur = vec![false; n];
        cur[self.base] = true;
        cur = close(&cur);
        for &l in w.letters() {
            let mut next = vec![false; n];
            for e in &self.edges {
                if e.gen != l.gen {
                    continue;
                }
                if !l.inv && cur[e.from] {
                    next[e.to] = true;
                }
                if l.inv && cur[e.to] {
                    next[e.from] = true;
                }
            }
            cur = close(&next);
            if !cur.iter().any(|&b| b) {
                return false;
            }
        }
        cur[self.base]
    }

    fn null_relation(&self) -> Vec<bool> {
        let n = self.vertex_count;
        let mut rel = vec![false; n * n];
        for v in 0..n {
            rel[v * n + v] = true;
        }
        loop {
            let mut changed = false;
            for e1 in &self.edges {
                for e2 in &self.edges {
                    if e1.gen != e2.gen {
                        continue;
                    }
                    if rel[e1.to * n + e2.to] && !rel[e1.from * n + e2.from] {
                        rel[e1.from * n + e2.from] = true;
                        changed = true;
                    }
                    if rel[e1.from * n + e2.from] && !rel[e1.to * n + e2.to] {
                        rel[e1.to * n + e2.to] = true;
                        changed = true;
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    if !rel[i * n + k] {
                        continue;
                    }
                    for j in 0..n {
                        if rel[k * n + j] && !rel[i * n + j] {
                            rel[i * n + j] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return rel;
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "graph m={} base={}", self.vertex_count, self.base).unwrap();
        if self.alphabet.is_surface() {
            writeln!(s, "alphabet g={} nb={}", self.alphabet.genus(), self.alphabet.boundary_count()).unwrap();
        } else {
            writeln!(s, "alphabet names={}", self.alphabet.names().join(",")).unwrap();
        }
        for e in &self.edges {
            writeln!(s, "edge {} {} {}", e.from, e.to, self.alphabet.name(e.gen)).unwrap();
        }
        s
    }

    /// Parses the text format. Lines starting with `cert` are ignored so a
    /// certified file reads back as its graph.
    pub fn parse_text(text: &str) -> Result<LabeledGraph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut alphabet: Option<Alphabet> = None;
        let mut raw_edges: Vec<(usize, usize, usize, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| GraphError::Parse { line, msg };
            let toks: Vec<&str> = content.split_whitespace().collect();
            let field = |tok: &str, key: &str| -> Result<String, GraphError> {
                tok.strip_prefix(key)
                    .and_then(|r| r.strip_prefix('='))
                    .map(str::to_string)
                    .ok_or_else(|| err(format!("expected `{key}=...`, got `{tok}`")))
            };
            let num = |s: String| -> Result<usize, GraphError> { s.parse().map_err(|_| err(format!("bad integer `{s}`"))) };
            match toks[0] {
                "graph" => {
                    if toks.len() != 3 {
                        return Err(err("expected `graph m=<int> base=<int>`".into()));
                    }
                    header = Some((num(field(toks[1], "m")?)?, num(field(toks[2], "base")?)?));
                }
                "alphabet" => {
                    if toks.len() == 2 && toks[1].starts_with("names=") {
                        let names = field(toks[1], "names")?;
                        alphabet = Some(Alphabet::free(names.split(',').map(str::to_string))?);
                    } else if toks.len() == 3 {
                        let g = num(field(toks[1], "g")?)?;
                        let nb = num(field(toks[2], "nb")?)?;
                        alphabet = Some(Alphabet::surface(g, nb)?);
                    } else {
                        return Err(err("expected `alphabet g=<int> nb=<int>`".into()));
                    }
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(err("expected `edge <from> <to> <gen>`".into()));
                    }
                    raw_edges.push((line, num(toks[1].to_string())?, num(toks[2].to_string())?, toks[3].to_string()));
                }
                "cert" => {}
                other => return Err(err(format!("unknown record `{other}`"))),
            }
        }
        let (m, base) = header.ok_or(GraphError::Parse { line: 0, msg: "missing `graph` line".into() })?;
        let alphabet = alphabet.ok_or(GraphError::Parse { line: 0, msg: "missing `alphabet` line".into() })?;
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (line, from, to, name) in raw_edges {
            let gen = alphabet
                .index(&name)
                .ok_or_else(|| GraphError::Parse { line, msg: format!("unknown generator `{name}`") })?;
            edges.push(Edge { from, to, gen });
        }
        LabeledGraph::from_parts(alphabet, m, base, edges)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 0..self.vertex_count {
            let shape = if v == self.base { "doublecircle" } else { "circle" };
            writeln!(s, "  {v} [shape={shape}];").unwrap();
        }
        for e in &self.edges {
            writeln!(s, "  {} -> {} [label=\"{}\"];", e.from, e.to, self.alphabet.name(e.gen)).unwrap();
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Alphabet {
        Alphabet::surface(1, 2).unwrap()
    }

    #[test]
    fn loops_and_paths() {
        let a = alpha();
        let g = LabeledGraph::new(a.clone()).add_loop(&a.parse_word("a1").unwrap());
        assert_eq!((g.vertex_count(), g.edges().len()), (1, 1));
        let (g, end) = LabeledGraph::new(a.clone()).add_path(&a.parse_word("a1 b1").unwrap()).unwrap();
        assert_eq!((g.vertex_count(), g.edges().len(), end), (3, 2, 2));
        let g = LabeledGraph::new(a.clone())
            .add_loop(&a.parse_word("a1 b1").unwrap())
            .add_loop(&a.parse_word("a1 b1^-1").unwrap());
        assert_eq!(g.vertex_count(), 3);
        let (f, _) = g.fold();
        // Both loops have length 2, so each adds one interior vertex; the
        // a1-edges merge them.
        assert_eq!(f.vertex_count(), 2);
        assert!(f.is_folded());
    }

    #[test]
    fn fold_two_edges() {
        let a = alpha();
        let g = LabeledGraph::from_parts(
            a,
            3,
            0,
            vec![Edge { from: 0, to: 1, gen: 0 }, Edge { from: 0, to: 2, gen: 0 }],
        )
        .unwrap();
        let (f, map) = g.fold();
        assert_eq!(f.vertex_count(), 2);
        assert_eq!(f.edges().len(), 1);
        assert_eq!(map, vec![0, 1, 1]);
    }

    #[test]
    fn trace_examples() {
        let a = alpha();
        let g = LabeledGraph::new(a.clone()).add_loop(&a.parse_word("a1").unwrap());
        assert_eq!(g.trace(&Word::empty(), 0), Some(0));
        assert_eq!(g.trace(&a.parse_word("a1^5").unwrap(), 0), Some(0));
        assert_eq!(g.trace(&a.parse_word("b1").unwrap(), 0), None);
        assert!(g.is_member(&a.parse_word("a1^3").unwrap()));
        assert!(!g.is_member(&a.parse_word("b1").unwrap()));
    }

    #[test]
    fn x_path_examples() {
        let a = alpha();
        let x = a.parse_word("a1").unwrap();
        let g = LabeledGraph::new(a.clone());
        let p = g.maximal_x_path(&x, 0).unwrap();
        assert_eq!(p.length(), 0);
        let (g, _) = LabeledGraph::new(a.clone()).add_path(&a.parse_word("a1 a1 a1").unwrap()).unwrap();
        let p = g.maximal_x_path(&x, 1).unwrap();
        assert_eq!((p.length(), p.through), (3, 1));
        let g = LabeledGraph::new(a.clone()).add_loop(&a.parse_word("a1 a1").unwrap());
        assert_eq!(g.maximal_x_path(&x, 0), Err(GraphError::XLoop(0)));
    }

    #[test]
    fn cut_splits_path() {
        let a = alpha();
        let (g, _) = LabeledGraph::new(a.clone()).add_path(&a.parse_word("a1 a1").unwrap()).unwrap();
        let (c, pairs) = g.cut_at(&[CutSite::directed(&g, 1)]).unwrap();
        assert_eq!(c.vertex_count(), 4);
        assert!(!c.is_connected());
        let (back, _) = c.identify(&pairs);
        assert_eq!(back.canonical_form(), g.canonical_form());
        assert_eq!(g.cut_at(&[CutSite::directed(&g, 0)]).unwrap_err(), GraphError::CutAtBase);
    }

    #[test]
    fn regular_and_diameter() {
        let a = alpha();
        let mut g = LabeledGraph::new(a.clone());
        for gen in 0..3 {
            g = g.add_loop(&Word::gen(gen));
        }
        assert!(g.is_regular());
        assert_eq!(g.diameter(), 0);
    }

    #[test]
    fn power_loops() {
        let a = alpha();
        let x = a.parse_word("a1").unwrap();
        let g = LabeledGraph::new(a.clone()).add_loop(&a.parse_word("a1 a1 a1").unwrap());
        assert_eq!(g.has_power_loop(&x, 2), None);
        assert_eq!(g.has_power_loop(&x, 3).map(|p| p.1), Some(3));
    }

    #[test]
    fn text_round_trip() {
        let a = alpha();
        let g = LabeledGraph::new(a.clone()).add_loop(&a.parse_word("a1 b1 x1").unwrap());
        let t = g.to_text();
        let back = LabeledGraph::parse_text(&t).unwrap();
        assert_eq!(back, g);
        assert!(g.to_dot().contains("doublecircle"));
    }

    #[test]
    fn unfolded_acceptance_sees_cancellation() {
        // v0 -a-> v1 <-a- v2 -b-> v0 : the loop a a^-1 b reduces to b.
        let a = Alphabet::free(["a", "b"]).unwrap();
        let g = LabeledGraph::from_parts(
            a.clone(),
            3,
            0,
            vec![Edge { from: 0, to: 1, gen: 0 }, Edge { from: 2, to: 1, gen: 0 }, Edge { from: 2, to: 0, gen: 1 }],
        )
        .unwrap();
        assert!(g.accepts_unfolded(&a.parse_word("b").unwrap()));
        assert!(!g.accepts_unfolded(&a.parse_word("a").unwrap()));
        let (f, _) = g.fold();
        assert!(f.is_member(&a.parse_word("b").unwrap()));
    }
}
