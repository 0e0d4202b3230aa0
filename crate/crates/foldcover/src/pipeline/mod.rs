//! The cover construction: from the spec's words to a regular graph with
//! prescribed wrapping along every boundary, for each admissible `N*`.
//!
//! Stages, each returning a new graph and the vertex maps into it:
//! `build_g2` (loops, excluded paths, marked-point paths, folded),
//! `build_g3` (long peripheral paths between marked points, folded, gadget
//! sites chosen), `insert_omegas` (cut, glue gadgets, fold),
//! `finish_family` (tail, regular completion, threshold), then
//! `instantiate` resizes the gadgets for a given `N*`.

mod spec;

use std::collections::BTreeMap;

use thiserror::Error;

pub use spec::{Case, CoverSpec, SpecError};

use crate::completion::{add_missing_label_tail, regular_complete, CompletionError, CompletionOptions};
use crate::stallings::{CutSite, Edge, End, GraphBuilder, LabeledGraph};
use crate::words::{Letter, SurfacePresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("SUBGROUP_NOT_PERIPHERAL_FREE: {stage} has an x{boundary}-power loop (power {power}) at vertex {vertex}")]
    SubgroupNotPeripheralFree { stage: &'static str, boundary: usize, vertex: usize, power: usize },
    #[error("Y_NOT_SEPARATED: y[{index}] is closed at the base in {stage}")]
    YNotSeparated { stage: &'static str, index: usize },
    #[error("no clean gadget sites at n = {n}")]
    SitesUnavailable { n: u64 },
    #[error("gadget contract violated: {0}")]
    GadgetContract(String),
    #[error(transparent)]
    Completion(#[from] CompletionError),
    #[error("N* = {nstar}: {reason}")]
    BadNStar { nstar: u64, reason: String },
    #[error("families disagree on d_i ({0} vs {1})")]
    MismatchedD(u64, u64),
}

/// Folded graph of the contained loops, excluded paths and marked-point
/// paths.
#[derive(Clone, Debug)]
pub struct G2Stage {
    pub graph: LabeledGraph,
    /// `(k, p, q)` for `1 <= q <= d_k` -> endpoint of the marked path.
    pub marked: BTreeMap<(usize, usize, usize), usize>,
    /// Length of the maximal peripheral path through each marked vertex.
    pub x_path_lengths: BTreeMap<(usize, usize, usize), usize>,
}

impl G2Stage {
    pub fn max_x_path(&self) -> usize {
        self.x_path_lengths.values().copied().max().unwrap_or(0)
    }
}

/// The concatenated peripheral path of one boundary, mapped into the folded
/// stage-3 graph position by position.
#[derive(Clone, Debug)]
pub struct BoundaryTrack {
    pub k: usize,
    pub p: usize,
    pub b: usize,
    pub word: Word,
    pub positions: Vec<usize>,
}

impl BoundaryTrack {
    /// Letter read between positions `pos` and `pos + 1`.
    pub fn letter(&self, pos: usize) -> Letter {
        self.word.letters()[pos % self.word.len()]
    }
}

/// How a cut vertex is glued to a gadget spine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attach {
    /// Incoming path side to the first spine vertex, outgoing to the last.
    PlusFirst,
    /// Incoming path side to the last spine vertex, outgoing to the first.
    PlusLast,
}

#[derive(Clone, Debug)]
pub struct SiteCut {
    pub b: usize,
    pub pos: usize,
    pub vertex: usize,
    /// Edge joining positions `pos - 1` and `pos`.
    pub before_edge: usize,
    pub attach: Attach,
}

#[derive(Clone, Debug)]
pub struct GadgetPlan {
    pub a: usize,
    pub cuts: Vec<SiteCut>,
}

#[derive(Clone, Debug)]
pub struct G3Stage {
    pub n: u64,
    pub graph: LabeledGraph,
    /// Stage-2 vertex -> stage-3 vertex.
    pub from_g2: Vec<usize>,
    pub tracks: Vec<BoundaryTrack>,
    pub plans: Vec<GadgetPlan>,
}

#[derive(Clone, Debug)]
pub struct G4Stage {
    pub n: u64,
    pub graph: LabeledGraph,
    pub from_g2: Vec<usize>,
    /// Spine vertices of gadget `a` (index `a - 1`), first to last.
    pub spines: Vec<Vec<usize>>,
}

/// Everything needed to produce the cover graph for any admissible `N*`.
#[derive(Clone, Debug)]
pub struct CoverFamily {
    pub spec: CoverSpec,
    pub case: Case,
    pub n: u64,
    pub d_i: u64,
    pub m_star: u64,
    pub n_min: u64,
    /// Completed graph at base gadget size.
    pub graph: LabeledGraph,
    pub spines: Vec<Vec<usize>>,
    /// Stage-2 vertex -> vertex of `graph`.
    pub from_g2: Vec<usize>,
    /// Vertex count before the tail and completion.
    pub g4_vertices: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub completion: CompletionOptions,
}

fn check_peripheral(stage: &'static str, pres: &SurfacePresentation, g: &LabeledGraph) -> Result<(), PipelineError> {
    for b in 1..=pres.boundary_count() {
        let x = pres.peripheral_word(b).unwrap();
        if let Some((vertex, power)) = g.has_power_loop(&x, usize::MAX) {
            return Err(PipelineError::SubgroupNotPeripheralFree { stage, boundary: b, vertex, power });
        }
    }
    Ok(())
}

fn check_y(stage: &'static str, spec: &CoverSpec, g: &LabeledGraph) -> Result<(), PipelineError> {
    for (i, y) in spec.y.iter().enumerate() {
        if g.trace(y, g.base()) == Some(g.base()) {
            return Err(PipelineError::YNotSeparated { stage, index: i });
        }
    }
    Ok(())
}

fn check_injective(stage: &str, map: &[usize]) -> Result<(), PipelineError> {
    let mut seen = map.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(PipelineError::GadgetContract(format!("stage-2 graph no longer embedded in {stage}")));
    }
    Ok(())
}

pub fn build_g2(spec: &CoverSpec) -> Result<G2Stage, PipelineError> {
    let alphabet = spec.pres.alphabet().clone();
    let mut b = GraphBuilder::new(alphabet);
    for w in &spec.w {
        if !w.is_empty() {
            b.add_word_path(0, w, Some(0));
        }
    }
    for y in &spec.y {
        b.add_word_path(0, y, None);
    }
    let mut ends = BTreeMap::new();
    for (k, p, _) in spec.boundaries() {
        for q in 1..=spec.d_ik(k) as usize {
            let word = spec.marked_prefix(k, p, q);
            let end = *b.add_word_path(0, &word, None).last().unwrap();
            ends.insert((k, p, q), end);
        }
    }
    let (graph, map) = b.build().fold();
    check_peripheral("G2", &spec.pres, &graph)?;
    check_y("G2", spec, &graph)?;
    let marked: BTreeMap<_, _> = ends.into_iter().map(|(key, v)| (key, map[v])).collect();
    let mut x_path_lengths = BTreeMap::new();
    for (&(k, p, q), &v) in &marked {
        let b = spec.pres.boundary_index(k, p).unwrap();
        let x = spec.pres.peripheral_word(b).unwrap();
        let path = graph.maximal_x_path(&x, v).expect("no peripheral loops after the check");
        x_path_lengths.insert((k, p, q), path.length());
    }
    Ok(G2Stage { graph, marked, x_path_lengths })
}

/// Smallest even integer above `40 |L| + 2 max_len`.
pub fn n_lower_bound(alphabet_size: usize, max_x_path: usize) -> u64 {
    let bound = 40 * alphabet_size as u64 + 2 * max_x_path as u64;
    if bound % 2 == 0 {
        bound + 2
    } else {
        bound + 1
    }
}

pub fn choose_n(spec: &CoverSpec, g2: &G2Stage) -> u64 {
    n_lower_bound(spec.pres.alphabet().size(), g2.max_x_path())
}

/// Vertices hit once by the tracks, outside the stage-2 image, of degree 2.
fn clean_map(g: &LabeledGraph, from_g2: &[usize], tracks: &[BoundaryTrack]) -> Vec<bool> {
    let m = g.vertex_count();
    let mut in_g2 = vec![false; m];
    for &v in from_g2 {
        in_g2[v] = true;
    }
    let mut hits = vec![0u32; m];
    for t in tracks {
        for &v in &t.positions {
            hits[v] += 1;
        }
    }
    let mut degree = vec![0u32; m];
    for e in g.edges() {
        degree[e.from] += 1;
        degree[e.to] += 1;
    }
    (0..m).map(|v| !in_g2[v] && hits[v] == 1 && degree[v] == 2).collect()
}

fn path_edge(g: &LabeledGraph, t: &BoundaryTrack, pos: usize) -> Option<usize> {
    let l = t.letter(pos - 1);
    let (u, v) = (t.positions[pos - 1], t.positions[pos]);
    if l.inv {
        g.find_edge(v, u, l.gen)
    } else {
        g.find_edge(u, v, l.gen)
    }
}

fn plan_sites(spec: &CoverSpec, n: u64, g: &LabeledGraph, from_g2: &[usize], tracks: &[BoundaryTrack]) -> Option<Vec<GadgetPlan>> {
    let clean = clean_map(g, from_g2, tracks);
    let case = spec.case();
    let nb = spec.pres.boundary_count();
    let d_i = spec.d_i() as usize;
    let n = n as usize;
    let mut plans = Vec::with_capacity(d_i);
    for a in 1..=d_i {
        let mut cuts = Vec::new();
        for t in tracks {
            let len = t.word.len();
            let middle = (a - 1) * n * len + (n / 2) * len;
            let mut wanted: Vec<(usize, Attach)> = Vec::new();
            match case {
                Case::OneEven | Case::OneOdd if t.b < nb => {
                    let forward = match case {
                        Case::OneEven => t.b % 2 == 1,
                        _ => t.b == 1 || t.b % 2 == 0,
                    };
                    wanted.push((middle, if forward { Attach::PlusFirst } else { Attach::PlusLast }));
                }
                Case::OneEven | Case::OneOdd => {
                    // Start of an x1 letter in the last boundary word.
                    let phase = 4 * spec.pres.genus();
                    let u = (middle..).find(|p| p % len == phase).unwrap();
                    wanted.push((u, Attach::PlusFirst));
                    if case == Case::OneOdd {
                        // Start of x2 after five x1 letters.
                        wanted.push((u + 4 * len + 1, Attach::PlusFirst));
                    }
                }
                Case::Two => {
                    // Between a1 and b1; partner between a1^-1 and b1^-1 two
                    // copies on, five b1 letters later.
                    let u = (middle..).find(|p| p % len == 1).unwrap();
                    wanted.push((u, Attach::PlusFirst));
                    wanted.push((u + 2 * len + 2, Attach::PlusLast));
                }
            }
            let lo = wanted.first().unwrap().0.checked_sub(2 * len)?;
            let hi = wanted.last().unwrap().0 + 2 * len;
            if hi >= t.positions.len() || a * n * len < hi - 2 * len {
                return None;
            }
            if !(lo..=hi).all(|p| clean[t.positions[p]]) {
                return None;
            }
            for (pos, attach) in wanted {
                let before_edge = path_edge(g, t, pos)?;
                cuts.push(SiteCut { b: t.b, pos, vertex: t.positions[pos], before_edge, attach });
            }
        }
        plans.push(GadgetPlan { a, cuts });
    }
    Some(plans)
}

pub fn build_g3(spec: &CoverSpec, g2: &G2Stage, n: u64) -> Result<G3Stage, PipelineError> {
    let d_i = spec.d_i();
    let mut b = GraphBuilder::from_graph(&g2.graph);
    let mut raw_tracks = Vec::new();
    for (k, p, bi) in spec.boundaries() {
        let x = spec.pres.peripheral_word(bi).unwrap();
        let dk = spec.d_ik(k) as usize;
        let seg = x.pow((n * d_i / dk as u64) as i64);
        let mut positions = vec![g2.marked[&(k, p, 1)]];
        for q in 1..=dk {
            let start = g2.marked[&(k, p, q)];
            let end = if q < dk { Some(g2.marked[&(k, p, q + 1)]) } else { None };
            let verts = b.add_word_path(start, &seg, end);
            positions.extend_from_slice(&verts[1..]);
        }
        raw_tracks.push((k, p, bi, x, positions));
    }
    let (graph, map) = b.build().fold();
    let from_g2: Vec<usize> = (0..g2.graph.vertex_count()).map(|v| map[v]).collect();
    check_peripheral("G3", &spec.pres, &graph)?;
    check_y("G3", spec, &graph)?;
    check_injective("G3", &from_g2)?;
    let tracks: Vec<BoundaryTrack> = raw_tracks
        .into_iter()
        .map(|(k, p, b, word, pos)| BoundaryTrack { k, p, b, word, positions: pos.into_iter().map(|v| map[v]).collect() })
        .collect();
    for (k, p, _) in spec.boundaries() {
        for q in 1..spec.d_ik(k) as usize {
            if !graph.is_member(&spec.z_word(n, k, p, q)?) {
                return Err(PipelineError::GadgetContract(format!("z({k},{p},{q}) missing at parameter {n}")));
            }
        }
    }
    let plans = plan_sites(spec, n, &graph, &from_g2, &tracks).ok_or(PipelineError::SitesUnavailable { n })?;
    Ok(G3Stage { n, graph, from_g2, tracks, plans })
}

/// Internal edges of a gadget spine.
pub fn gadget_edges(case: Case, pres: &SurfacePresentation, spine: &[usize]) -> Vec<Edge> {
    let a = pres.alphabet();
    let g = pres.genus();
    let nb = pres.boundary_count();
    let k = spine.len();
    let mut edges = Vec::new();
    match case {
        Case::OneEven | Case::OneOdd => {
            for &v in spine {
                for j in 1..=g {
                    edges.push(Edge { from: v, to: v, gen: a.a(j) });
                    edges.push(Edge { from: v, to: v, gen: a.b(j) });
                }
            }
            for b in 1..nb {
                let forward = match case {
                    Case::OneEven => b % 2 == 1,
                    _ => b == 1 || b % 2 == 0,
                };
                for i in 0..k - 1 {
                    let (s, t) = if forward { (spine[i], spine[i + 1]) } else { (spine[i + 1], spine[i]) };
                    edges.push(Edge { from: s, to: t, gen: a.x(b) });
                }
            }
        }
        Case::Two => {
            for &v in spine {
                for j in 2..=g {
                    edges.push(Edge { from: v, to: v, gen: a.a(j) });
                    edges.push(Edge { from: v, to: v, gen: a.b(j) });
                }
            }
            for i in 0..k - 1 {
                edges.push(Edge { from: spine[i], to: spine[i + 1], gen: a.a(1) });
            }
            for i in 0..k {
                if i % 2 == 1 {
                    edges.push(Edge { from: spine[i], to: spine[i], gen: a.b(1) });
                } else if i + 2 < k {
                    edges.push(Edge { from: spine[i], to: spine[i + 2], gen: a.b(1) });
                }
            }
        }
    }
    edges
}

pub fn insert_omegas(spec: &CoverSpec, g3: &G3Stage) -> Result<G4Stage, PipelineError> {
    let case = spec.case();
    let base = case.base_size() as usize;
    let sites: Vec<CutSite> = g3
        .plans
        .iter()
        .flat_map(|plan| plan.cuts.iter())
        .map(|c| CutSite { vertex: c.vertex, plus: vec![(c.before_edge, End::Head), (c.before_edge, End::Tail)] })
        .map(|mut s| {
            // Keep only the end of the before-edge that touches the vertex.
            let e = g3.graph.edges()[s.plus[0].0];
            s.plus = vec![(s.plus[0].0, if e.to == s.vertex { End::Head } else { End::Tail })];
            s
        })
        .collect();
    let (cut, pairs) = g3.graph.cut_at(&sites).map_err(|e| PipelineError::GadgetContract(e.to_string()))?;
    let mut b = GraphBuilder::from_graph(&cut);
    let mut spines = Vec::new();
    let mut ident = Vec::new();
    let mut pair_iter = pairs.into_iter();
    for plan in &g3.plans {
        let spine: Vec<usize> = (0..base).map(|_| b.add_vertex()).collect();
        for e in gadget_edges(case, &spec.pres, &spine) {
            b.add_edge(e.from, e.to, e.gen);
        }
        let (first, last) = (spine[0], spine[base - 1]);
        for c in &plan.cuts {
            let (plus, minus) = pair_iter.next().unwrap();
            match c.attach {
                Attach::PlusFirst => {
                    ident.push((plus, first));
                    ident.push((minus, last));
                }
                Attach::PlusLast => {
                    ident.push((plus, last));
                    ident.push((minus, first));
                }
            }
        }
        spines.push(spine);
    }
    let (glued, imap) = b.build().identify(&ident);
    let (graph, fmap) = glued.fold();
    let through = |v: usize| fmap[imap[v]];
    let from_g2: Vec<usize> = g3.from_g2.iter().map(|&v| through(v)).collect();
    let spines: Vec<Vec<usize>> = spines.into_iter().map(|s| s.into_iter().map(through).collect()).collect();

    check_peripheral("G4", &spec.pres, &graph)?;
    check_y("G4", spec, &graph)?;
    check_injective("G4", &from_g2)?;
    let mut all: Vec<usize> = spines.iter().flatten().copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(PipelineError::GadgetContract("gadget spines collapsed while folding".into()));
    }
    let idx = graph.folded_index().expect("fold output is folded");
    for &v in &all {
        for gen in 0..graph.generator_count() as u32 {
            if idx.step(v, Letter::pos(gen)).is_none() || idx.step(v, Letter::neg(gen)).is_none() {
                return Err(PipelineError::GadgetContract(format!("spine vertex {v} is not locally complete")));
            }
        }
    }
    for w in &spec.w {
        if !graph.is_member(w) {
            return Err(PipelineError::GadgetContract("a contained word was lost".into()));
        }
    }
    let n_next = g3.n + case.delta();
    for (k, p, _) in spec.boundaries() {
        for q in 1..spec.d_ik(k) as usize {
            if !graph.is_member(&spec.z_word(n_next, k, p, q)?) {
                return Err(PipelineError::GadgetContract(format!(
                    "{}: z({k},{p},{q}) at parameter {n_next} not a loop after gadget insertion",
                    case.tag()
                )));
            }
        }
    }
    Ok(G4Stage { n: g3.n, graph, from_g2, spines })
}

pub fn finish_family(spec: &CoverSpec, g4: G4Stage, opts: &BuildOptions) -> Result<CoverFamily, PipelineError> {
    let case = spec.case();
    let d_i = spec.d_i();
    let n = g4.n;
    let delta = case.delta();
    let floor = ((n + delta) * d_i + 1) as usize;
    let mut g5 = g4.graph.clone();
    if g5.vertex_count() <= floor {
        g5 = add_missing_label_tail(&g5, floor + 1 - g5.vertex_count())?.0;
    }
    let peripheral = spec.pres.peripheral_words();
    let mut copts = opts.completion.clone();
    copts.odd_vertex_count = Some(case != Case::OneEven);
    let done = regular_complete(&g5, &peripheral, &copts)?;
    let m_star = done.graph.vertex_count() as u64;
    let n_min = m_star - (d_i - 1) * (n + delta) - 1;
    if n_min % 2 != 0 || n_min <= n + delta {
        return Err(PipelineError::GadgetContract(format!("threshold {n_min} from {m_star} vertices is not admissible")));
    }
    let emb = |v: usize| done.embedding[v];
    Ok(CoverFamily {
        spec: spec.clone(),
        case,
        n,
        d_i,
        m_star,
        n_min,
        from_g2: g4.from_g2.iter().map(|&v| emb(v)).collect(),
        spines: g4.spines.iter().map(|s| s.iter().map(|&v| emb(v)).collect()).collect(),
        g4_vertices: g4.graph.vertex_count(),
        graph: done.graph,
    })
}

/// All stages in order, growing the internal parameter until gadget sites
/// are available.
pub fn build_family(spec: &CoverSpec, opts: &BuildOptions) -> Result<CoverFamily, PipelineError> {
    let g2 = build_g2(spec)?;
    let mut n = choose_n(spec, &g2);
    let g3 = loop {
        match build_g3(spec, &g2, n) {
            Err(PipelineError::SitesUnavailable { .. }) if n < 1 << 16 => n += 2,
            other => break other?,
        }
    };
    let g4 = insert_omegas(spec, &g3)?;
    finish_family(spec, g4, opts)
}

/// A cover graph with the vertices of each resized gadget spine.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: LabeledGraph,
    pub spines: Vec<Vec<usize>>,
}

impl CoverFamily {
    pub fn gadget_sizes(&self, nstar: u64) -> Vec<u64> {
        let base = self.case.base_size();
        (1..=self.d_i)
            .map(|a| if a < self.d_i { nstar - self.n + 1 } else { nstar - self.n_min + base })
            .collect()
    }

    pub fn check_nstar(&self, nstar: u64) -> Result<(), PipelineError> {
        if nstar % 2 != 0 {
            return Err(PipelineError::BadNStar { nstar, reason: "must be even".into() });
        }
        if nstar < self.n_min {
            return Err(PipelineError::BadNStar { nstar, reason: format!("below the threshold {}", self.n_min) });
        }
        Ok(())
    }

    pub fn instantiate_with_sites(&self, nstar: u64) -> Result<Instance, PipelineError> {
        self.check_nstar(nstar)?;
        let g = &self.graph;
        let m = g.vertex_count();
        let mut in_spine = vec![false; m];
        let mut interior = vec![false; m];
        for s in &self.spines {
            for (i, &v) in s.iter().enumerate() {
                in_spine[v] = true;
                if i > 0 && i + 1 < s.len() {
                    interior[v] = true;
                }
            }
        }
        let mut new_id = vec![usize::MAX; m];
        let mut count = 0;
        for v in 0..m {
            if !interior[v] {
                new_id[v] = count;
                count += 1;
            }
        }
        let mut edges: Vec<Edge> = g
            .edges()
            .iter()
            .filter(|e| !(in_spine[e.from] && in_spine[e.to]))
            .map(|e| Edge { from: new_id[e.from], to: new_id[e.to], gen: e.gen })
            .collect();
        let mut spines = Vec::with_capacity(self.spines.len());
        for (s, size) in self.spines.iter().zip(self.gadget_sizes(nstar)) {
            let size = size as usize;
            let mut spine = Vec::with_capacity(size);
            spine.push(new_id[s[0]]);
            for _ in 1..size - 1 {
                spine.push(count);
                count += 1;
            }
            spine.push(new_id[*s.last().unwrap()]);
            edges.extend(gadget_edges(self.case, &self.spec.pres, &spine));
            spines.push(spine);
        }
        let graph = LabeledGraph::from_parts(g.alphabet().clone(), count, new_id[g.base()], edges)
            .expect("resized graph is well formed");
        Ok(Instance { graph, spines })
    }

    pub fn instantiate(&self, nstar: u64) -> Result<LabeledGraph, PipelineError> {
        Ok(self.instantiate_with_sites(nstar)?.graph)
    }
}

/// The graph with gadget interiors and internal gadget edges removed.
pub fn gadget_complement(inst: &Instance) -> LabeledGraph {
    let g = &inst.graph;
    let m = g.vertex_count();
    let mut in_spine = vec![false; m];
    let mut interior = vec![false; m];
    for s in &inst.spines {
        for (i, &v) in s.iter().enumerate() {
            in_spine[v] = true;
            interior[v] = i > 0 && i + 1 < s.len();
        }
    }
    let mut new_id = vec![usize::MAX; m];
    let mut count = 0;
    for v in 0..m {
        if !interior[v] {
            new_id[v] = count;
            count += 1;
        }
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| !(in_spine[e.from] && in_spine[e.to]))
        .map(|e| Edge { from: new_id[e.from], to: new_id[e.to], gen: e.gen })
        .collect();
    LabeledGraph::from_parts(g.alphabet().clone(), count, new_id[g.base()], edges).unwrap()
}

/// One cover per family, all of degree `N* d_i + 1`.
pub fn uniform_degree(families: &[CoverFamily], nstar: u64) -> Result<Vec<LabeledGraph>, PipelineError> {
    let Some(first) = families.first() else { return Ok(Vec::new()) };
    for f in families {
        if f.d_i != first.d_i {
            return Err(PipelineError::MismatchedD(first.d_i, f.d_i));
        }
    }
    let n0 = families.iter().map(|f| f.n_min).max().unwrap();
    if nstar < n0 {
        return Err(PipelineError::BadNStar { nstar, reason: format!("below the common threshold {n0}") });
    }
    families.iter().map(|f| f.instantiate(nstar)).collect()
}

/// Largest threshold among the families.
pub fn common_threshold(families: &[CoverFamily]) -> Option<u64> {
    families.iter().map(|f| f.n_min).max()
}
