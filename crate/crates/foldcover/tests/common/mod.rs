#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use foldcover::stallings::{Edge, GraphBuilder};
use foldcover::{Alphabet, LabeledGraph, Letter, Word};

pub const CASE1_EVEN: &str = r#"{"genus":1,"boundary":[1,1],"d":[2,2],"w":["a1 b1"],"y":["a1"],"sigma":{"1,1,1":"b1","2,1,1":"a1^-1"}}"#;
pub const CASE1_EVEN_TRIVIAL: &str = r#"{"genus":1,"boundary":[1,1],"d":[2,2],"w":["a1 b1"],"y":["a1"]}"#;
pub const CASE1_EVEN_B: &str = r#"{"genus":1,"boundary":[1,1],"d":[2,2],"w":["a1 b1^2","b1 a1^-1 b1"],"y":["b1"],"tau":["a1"],"sigma":{"1,1,1":"b1 a1","2,1,1":"a1^-2"}}"#;
pub const CASE2: &str = r#"{"genus":2,"boundary":[1],"d":[4],"w":["a1 b2"],"y":["b1"],"sigma":{"1,1,1":"a2","1,1,2":"b2","1,1,3":"a2^-1"}}"#;
pub const CASE1_ODD: &str = r#"{"genus":1,"boundary":[1,1,1],"d":[2,2,2],"w":["a1 b1"],"y":["a1"],"sigma":{"1,1,1":"b1","2,1,1":"a1^-1","3,1,1":"b1^-1"}}"#;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut ChaCha8Rng, k: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    Word::new((0..len).map(|_| Letter { gen: rng.gen_range(0..k as u32), inv: rng.gen_bool(0.5) }))
}

pub fn free_alphabet(k: usize) -> Alphabet {
    Alphabet::free((1..=k).map(|i| format!("g{i}"))).unwrap()
}

/// Connected unfolded graph: random loops and dangling paths at the base
/// plus a few extra edges between existing vertices. Returns the graph and
/// the loop words.
pub fn random_unfolded(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_vertices: usize) -> (LabeledGraph, Vec<Word>) {
    let k = alphabet.size();
    let mut b = GraphBuilder::new(alphabet.clone());
    let mut loops = Vec::new();
    let pieces = rng.gen_range(1..=4);
    for _ in 0..pieces {
        let w = random_word(rng, k, 8);
        let start = rng.gen_range(0..b.vertex_count());
        if start == 0 && rng.gen_bool(0.6) {
            b.add_word_path(0, &w, Some(0));
            loops.push(w);
        } else {
            b.add_word_path(start, &w, None);
        }
        if b.vertex_count() >= max_vertices {
            break;
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        let m = b.vertex_count();
        b.add_edge(rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..k as u32));
    }
    (b.build(), loops)
}

pub fn random_folded(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_vertices: usize) -> LabeledGraph {
    loop {
        let (g, _) = random_unfolded(rng, alphabet, max_vertices);
        let (f, _) = g.fold();
        if f.vertex_count() <= max_vertices {
            return f;
        }
    }
}

/// Graph with the given edges replaced.
pub fn with_edges(g: &LabeledGraph, edges: Vec<Edge>) -> LabeledGraph {
    LabeledGraph::from_parts(g.alphabet().clone(), g.vertex_count(), g.base(), edges).unwrap()
}
