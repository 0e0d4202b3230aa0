//! Completing a folded graph to a regular one in which every peripheral word
//! acts as a single cycle.
//!
//! Each generator's edges form a partial injection. The missing links join
//! its chains into one cycle; a local search then swaps free links of one
//! generator until every peripheral word's permutation has one cycle. When
//! the search stalls the graph is grown by a tail and the search restarts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::stallings::{Edge, LabeledGraph};
use crate::words::Word;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("input graph is not folded")]
    NotFolded,
    #[error("input graph is not connected")]
    NotConnected,
    #[error("peripheral word {word} has a power loop (power {d}) at vertex {vertex}")]
    PeripheralLoop { word: usize, vertex: usize, d: usize },
    #[error("graph is already regular")]
    AlreadyRegular,
    #[error("search gave up after {rounds} rounds")]
    Exhausted { rounds: usize },
}

#[derive(Clone, Debug)]
pub struct CompletionOptions {
    pub seed: u64,
    /// Required parity of the final vertex count (`Some(true)` for odd).
    pub odd_vertex_count: Option<bool>,
    /// Swap proposals per round; `None` means `10 m^2` capped at
    /// `max_trials`.
    pub trials: Option<usize>,
    pub max_trials: usize,
    pub max_rounds: usize,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions { seed: 0, odd_vertex_count: None, trials: None, max_trials: 200_000, max_rounds: 24 }
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub graph: LabeledGraph,
    /// Input vertex -> output vertex.
    pub embedding: Vec<usize>,
    /// Vertices added by tails.
    pub tail_vertices: usize,
    pub rounds: usize,
}

/// A tail of `vertices.len()` edges labelled `gen` leaving `attach`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tail {
    pub attach: usize,
    pub gen: u32,
    pub vertices: Vec<usize>,
}

/// Attaches `length` edges labelled by the first generator missing as an
/// outgoing edge at the lowest such vertex.
pub fn add_missing_label_tail(g: &LabeledGraph, length: usize) -> Result<(LabeledGraph, Tail), CompletionError> {
    let idx = g.folded_index().ok_or(CompletionError::NotFolded)?;
    let k = g.generator_count() as u32;
    let mut found = None;
    'outer: for v in 0..g.vertex_count() {
        for gen in 0..k {
            if idx.step(v, crate::words::Letter::pos(gen)).is_none() {
                found = Some((v, gen));
                break 'outer;
            }
        }
    }
    let (attach, gen) = found.ok_or(CompletionError::AlreadyRegular)?;
    let mut edges = g.edges().to_vec();
    let mut verts = Vec::with_capacity(length);
    let mut prev = attach;
    for i in 0..length {
        let v = g.vertex_count() + i;
        edges.push(Edge { from: prev, to: v, gen });
        verts.push(v);
        prev = v;
    }
    let out = LabeledGraph::from_parts(g.alphabet().clone(), g.vertex_count() + length, g.base(), edges).unwrap();
    Ok((out, Tail { attach, gen, vertices: verts }))
}

fn check_input(g: &LabeledGraph, peripheral: &[Word]) -> Result<(), CompletionError> {
    if !g.is_folded() {
        return Err(CompletionError::NotFolded);
    }
    if !g.is_connected() {
        return Err(CompletionError::NotConnected);
    }
    for (i, x) in peripheral.iter().enumerate() {
        if let Some((vertex, d)) = g.has_power_loop(x, usize::MAX) {
            return Err(CompletionError::PeripheralLoop { word: i, vertex, d });
        }
    }
    Ok(())
}

/// Regular completion with every peripheral word a single full cycle.
pub fn regular_complete(
    g: &LabeledGraph,
    peripheral: &[Word],
    opts: &CompletionOptions,
) -> Result<Completion, CompletionError> {
    let m0 = g.vertex_count();
    let embedding: Vec<usize> = (0..m0).collect();
    if g.is_folded() && g.is_regular() {
        // Nothing to add; accept only if the contract already holds.
        let full = peripheral.iter().all(|x| {
            let mut v = 0;
            for step in 1..=m0 {
                v = g.trace(x, v).unwrap();
                if v == 0 {
                    return step == m0;
                }
            }
            false
        });
        if !full {
            return Err(CompletionError::AlreadyRegular);
        }
        return Ok(Completion { graph: g.clone(), embedding, tail_vertices: 0, rounds: 0 });
    }
    check_input(g, peripheral)?;
    let mut work = g.clone();
    if let Some(odd) = opts.odd_vertex_count {
        if (work.vertex_count() % 2 == 1) != odd {
            work = add_missing_label_tail(&work, 1)?.0;
        }
    }
    for round in 0..opts.max_rounds {
        let m = work.vertex_count();
        let trials = opts.trials.unwrap_or_else(|| (10 * m * m).min(opts.max_trials));
        let mut search = Search::new(&work, peripheral, opts.seed.wrapping_add(round as u64));
        if search.run(trials) {
            let graph = search.into_graph(&work);
            return Ok(Completion { graph, embedding, tail_vertices: work.vertex_count() - m0, rounds: round + 1 });
        }
        let grow = if opts.odd_vertex_count.is_some() { 2 } else { 1 };
        work = add_missing_label_tail(&work, grow)?.0;
    }
    Err(CompletionError::Exhausted { rounds: opts.max_rounds })
}

struct WordState {
    /// Which generators occur in the word.
    uses: Vec<bool>,
    cycle_of: Vec<u32>,
    cycle_size: Vec<u32>,
}

struct Search<'a> {
    m: usize,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    free: Vec<Vec<bool>>,
    words: &'a [Word],
    states: Vec<WordState>,
    rng: ChaCha8Rng,
    scratch: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(g: &LabeledGraph, words: &'a [Word], seed: u64) -> Self {
        let m = g.vertex_count();
        let k = g.generator_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut succ = vec![vec![NONE; m]; k];
        let mut pred = vec![vec![NONE; m]; k];
        for e in g.edges() {
            succ[e.gen as usize][e.from] = e.to as u32;
            pred[e.gen as usize][e.to] = e.from as u32;
        }
        let free: Vec<Vec<bool>> = succ.iter().map(|s| s.iter().map(|&t| t == NONE).collect()).collect();
        for gen in 0..k {
            // Chains run head -> tail; close them into one cycle in random order.
            let mut chains: Vec<(u32, u32)> = Vec::new();
            for v in 0..m {
                if pred[gen][v] == NONE {
                    let mut t = v;
                    while succ[gen][t] != NONE {
                        t = succ[gen][t] as usize;
                    }
                    chains.push((v as u32, t as u32));
                }
            }
            chains.shuffle(&mut rng);
            let c = chains.len();
            for i in 0..c {
                let (_, tail) = chains[i];
                let (head, _) = chains[(i + 1) % c];
                succ[gen][tail as usize] = head;
                pred[gen][head as usize] = tail;
            }
        }
        let states = words
            .iter()
            .map(|w| {
                let mut uses = vec![false; k];
                for l in w.letters() {
                    uses[l.gen as usize] = true;
                }
                WordState { uses, cycle_of: vec![0; m], cycle_size: Vec::new() }
            })
            .collect();
        let mut s = Search { m, succ, pred, free, words, states, rng, scratch: vec![0; m] };
        for i in 0..words.len() {
            s.recompute(i);
        }
        s
    }

    fn image(&self, w: &Word, mut v: u32) -> u32 {
        for l in w.letters() {
            v = if l.inv { self.pred[l.gen as usize][v as usize] } else { self.succ[l.gen as usize][v as usize] };
        }
        v
    }

    fn recompute(&mut self, i: usize) {
        let w = &self.words[i];
        for v in 0..self.m {
            self.scratch[v] = self.image(w, v as u32);
        }
        let st = &mut self.states[i];
        st.cycle_of.iter_mut().for_each(|c| *c = NONE);
        st.cycle_size.clear();
        for s in 0..self.m {
            if st.cycle_of[s] != NONE {
                continue;
            }
            let id = st.cycle_size.len() as u32;
            let mut len = 0;
            let mut c = s;
            while st.cycle_of[c] == NONE {
                st.cycle_of[c] = id;
                len += 1;
                c = self.scratch[c] as usize;
            }
            st.cycle_size.push(len);
        }
    }

    fn score(&self) -> usize {
        self.states.iter().map(|s| s.cycle_size.len() - 1).sum()
    }

    fn swap(&mut self, gen: usize, s1: u32, s2: u32) {
        let t1 = self.succ[gen][s1 as usize];
        let t2 = self.succ[gen][s2 as usize];
        self.succ[gen][s1 as usize] = t2;
        self.succ[gen][s2 as usize] = t1;
        self.pred[gen][t2 as usize] = s1;
        self.pred[gen][t1 as usize] = s2;
    }

    fn refresh(&mut self, gen: usize) {
        for i in 0..self.words.len() {
            if self.states[i].uses[gen] {
                self.recompute(i);
            }
        }
    }

    fn snapshot(&self, gen: usize) -> Vec<(usize, Vec<u32>, Vec<u32>)> {
        (0..self.words.len())
            .filter(|&i| self.states[i].uses[gen])
            .map(|i| (i, self.states[i].cycle_of.clone(), self.states[i].cycle_size.clone()))
            .collect()
    }

    fn restore(&mut self, snap: Vec<(usize, Vec<u32>, Vec<u32>)>) {
        for (i, c, s) in snap {
            self.states[i].cycle_of = c;
            self.states[i].cycle_size = s;
        }
    }

    /// Source of the link used when reading letter `pos` of word `wi` from
    /// start `v`, if that link is free.
    fn free_link_at(&self, wi: usize, v: u32, pos: usize) -> Option<(usize, u32)> {
        let letters = self.words[wi].letters();
        let mut cur = v;
        for l in &letters[..pos] {
            cur = if l.inv { self.pred[l.gen as usize][cur as usize] } else { self.succ[l.gen as usize][cur as usize] };
        }
        let l = letters[pos];
        let gen = l.gen as usize;
        let src = if l.inv { self.pred[gen][cur as usize] } else { cur };
        self.free[gen][src as usize].then_some((gen, src))
    }

    /// A swap of two free links lying on different cycles of word `wi`, one of
    /// them on a cycle other than the largest.
    fn propose(&mut self, wi: usize) -> Option<(usize, u32, u32)> {
        let st = &self.states[wi];
        let ncyc = st.cycle_size.len();
        if ncyc < 2 {
            return None;
        }
        let largest = (0..ncyc).max_by_key(|&c| st.cycle_size[c]).unwrap() as u32;
        let target = loop {
            let c = self.rng.gen_range(0..ncyc) as u32;
            if c != largest || ncyc == 1 {
                break c;
            }
        };
        let members: Vec<u32> = (0..self.m as u32).filter(|&v| st.cycle_of[v as usize] == target).collect();
        let len = self.words[wi].len();
        let mut cands = Vec::new();
        for &v in &members {
            for pos in 0..len {
                if let Some((gen, src)) = self.free_link_at(wi, v, pos) {
                    cands.push((pos, gen, src));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        let (pos, gen, s1) = cands[self.rng.gen_range(0..cands.len())];
        for _ in 0..64 {
            let v2 = self.rng.gen_range(0..self.m) as u32;
            if self.states[wi].cycle_of[v2 as usize] == target {
                continue;
            }
            if let Some((g2, s2)) = self.free_link_at(wi, v2, pos) {
                if g2 == gen && s2 != s1 {
                    return Some((gen, s1, s2));
                }
            }
        }
        None
    }

    fn pick_word(&mut self) -> Option<usize> {
        let bad: Vec<usize> = (0..self.words.len()).filter(|&i| self.states[i].cycle_size.len() > 1).collect();
        bad.choose(&mut self.rng).copied()
    }

    fn run(&mut self, trials: usize) -> bool {
        let mut score = self.score();
        for _ in 0..trials {
            if score == 0 {
                return true;
            }
            let Some(wi) = self.pick_word() else { return true };
            let Some((gen, s1, s2)) = self.propose(wi) else { continue };
            let snap = self.snapshot(gen);
            self.swap(gen, s1, s2);
            self.refresh(gen);
            let after = self.score();
            if after < score {
                score = after;
                continue;
            }
            let mut improved = false;
            for _ in 0..4 {
                let Some(wj) = self.pick_word() else { break };
                let Some((g2, t1, t2)) = self.propose(wj) else { continue };
                let snap2 = self.snapshot(g2);
                self.swap(g2, t1, t2);
                self.refresh(g2);
                let after2 = self.score();
                if after2 < score {
                    score = after2;
                    improved = true;
                    break;
                }
                self.swap(g2, t1, t2);
                self.restore(snap2);
            }
            if improved {
                continue;
            }
            if after == score && self.rng.gen_bool(0.2) {
                continue;
            }
            self.swap(gen, s1, s2);
            self.restore(snap);
        }
        score == 0
    }

    fn into_graph(self, g: &LabeledGraph) -> LabeledGraph {
        let mut edges = g.edges().to_vec();
        for (gen, row) in self.free.iter().enumerate() {
            for (v, &is_free) in row.iter().enumerate() {
                if is_free {
                    edges.push(Edge { from: v, to: self.succ[gen][v] as usize, gen: gen as u32 });
                }
            }
        }
        LabeledGraph::from_parts(g.alphabet().clone(), g.vertex_count(), g.base(), edges).unwrap()
    }
}
