mod common;

use proptest::prelude::*;

use foldcover::completion::{regular_complete, CompletionOptions};
use foldcover::cover_model::{oracle_power_free, to_perm_rep};
use foldcover::slopes::{slope_intersection, Slope};
use foldcover::stallings::{CutSite, FoldOrder};
use foldcover::{Alphabet, LabeledGraph, Letter, SurfacePresentation, Word};

use common::*;

fn letters(k: u32) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..k, any::<bool>()).prop_map(|(gen, inv)| Letter { gen, inv }), 0..24)
}

fn reduced(ls: &[Letter]) -> bool {
    ls.windows(2).all(|w| w[0] != w[1].inverse())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_idempotent_and_reduced(ls in letters(4)) {
        let w = Word::new(ls);
        prop_assert!(reduced(w.letters()));
        prop_assert_eq!(Word::new(w.letters().to_vec()), w.clone());
        prop_assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn render_parse_round_trip(ls in letters(5)) {
        let a = Alphabet::surface(1, 4).unwrap();
        let w = Word::new(ls);
        prop_assert_eq!(a.parse_word(&a.render(&w)).unwrap(), w);
    }

    #[test]
    fn fold_orders_agree(seed in any::<u64>(), order in any::<u64>()) {
        let mut r = rng(seed);
        let a = free_alphabet(3);
        let (g, _) = random_unfolded(&mut r, &a, 40);
        let (f1, _) = g.fold();
        let (f2, _) = g.fold_with(FoldOrder::Random(order));
        prop_assert!(f1.is_folded());
        prop_assert_eq!(f1.canonical_form(), f2.canonical_form());
    }

    #[test]
    fn folding_preserves_language(seed in any::<u64>(), ls in letters(3)) {
        let mut r = rng(seed);
        let a = free_alphabet(3);
        let (g, loops) = random_unfolded(&mut r, &a, 40);
        let (f, _) = g.fold();
        let w = Word::new(ls);
        prop_assert_eq!(f.is_member(&w), g.accepts_unfolded(&w));
        for l in &loops {
            prop_assert!(f.is_member(l));
        }
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_folded(&mut r, &Alphabet::surface(1, 2).unwrap(), 30);
        let back = LabeledGraph::parse_text(&g.to_text()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn cut_then_identify_restores(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_folded(&mut r, &free_alphabet(3), 30);
        prop_assume!(g.vertex_count() > 1);
        let v = 1 + (seed as usize) % (g.vertex_count() - 1);
        let (cut, pairs) = g.cut_at(&[CutSite::directed(&g, v)]).unwrap();
        prop_assert_eq!(cut.vertex_count(), g.vertex_count() + 1);
        let (back, _) = cut.identify(&pairs);
        prop_assert_eq!(back.canonical_form(), g.canonical_form());
    }

    #[test]
    fn completion_contract(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pres = SurfacePresentation::new(1, vec![1, 1]).unwrap();
        let peripheral = pres.peripheral_words();
        let g = random_folded(&mut r, pres.alphabet(), 25);
        prop_assume!(!g.is_regular());
        prop_assume!(peripheral.iter().all(|x| g.has_power_loop(x, usize::MAX).is_none()));
        let c = regular_complete(&g, &peripheral, &CompletionOptions { seed, ..Default::default() }).unwrap();
        prop_assert!(c.graph.is_regular());
        for e in g.edges() {
            prop_assert!(c.graph.find_edge(c.embedding[e.from], c.embedding[e.to], e.gen).is_some());
        }
        let rep = to_perm_rep(&c.graph).unwrap();
        for x in &peripheral {
            prop_assert!(oracle_power_free(&rep, x));
        }
    }

    #[test]
    fn slope_intersection_symmetric(p1 in -30i64..30, q1 in -30i64..30, p2 in -30i64..30, q2 in -30i64..30) {
        prop_assume!((p1, q1) != (0, 0) && (p2, q2) != (0, 0));
        let (Ok(a), Ok(b)) = (Slope::new(p1, q1), Slope::new(p2, q2)) else { return Ok(()) };
        prop_assert_eq!(slope_intersection(a, b), slope_intersection(b, a));
        prop_assert_eq!(slope_intersection(a, b) == 0, a == b);
    }
}
