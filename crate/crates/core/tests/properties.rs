use proptest::prelude::*;

use ergm::counts::{delta_hom, hom_count, restricted_hom_density, restricted_surrogate};
use ergm::diagnostics::{cut_distance_const, restricted_cut_distance, CutMode};
use ergm::dynamics::{conditional_prob, CachePolicy, ChainCore};
use ergm::graph::num_pairs;
use ergm::{EdgeId, Graph, ModelParams, TemplateGraph};

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut g = Graph::new_empty(n).unwrap();
    for (i, &b) in bits.iter().take(num_pairs(n)).enumerate() {
        g.set_edge(EdgeId::from_index(i), b);
    }
    g
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(any::<bool>(), num_pairs(n)).prop_map(move |b| graph_from_bits(n, &b)))
}

/// `(Y, X, Z)` with `Y ⪯ X ⪯ Z`.
fn ordered_triple(max_n: usize) -> impl Strategy<Value = (Graph, Graph, Graph)> {
    (2..=max_n).prop_flat_map(|n| {
        let m = num_pairs(n);
        (
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(any::<bool>(), m),
        )
            .prop_map(move |(x, drop, add)| {
                let x_bits: Vec<bool> = x.clone();
                let y: Vec<bool> = x_bits.iter().zip(&drop).map(|(&a, &d)| a && !d).collect();
                let z: Vec<bool> = x_bits.iter().zip(&add).map(|(&a, &d)| a || d).collect();
                (graph_from_bits(n, &y), graph_from_bits(n, &x_bits), graph_from_bits(n, &z))
            })
    })
}

fn template() -> impl Strategy<Value = TemplateGraph> {
    prop::sample::select(vec!["edge", "two_star", "triangle", "k_star:3", "cycle:4", "0-1,1-2,2-3", "0-1,1-2,2-0,0-3"])
        .prop_map(|s| TemplateGraph::parse(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flip_is_an_involution(g in graph(20), i in any::<prop::sample::Index>()) {
        let e = EdgeId::from_index(i.index(g.num_pairs()));
        let mut h = g.clone();
        h.flip_edge(e);
        prop_assert_eq!(h.hamming(&g).unwrap(), 1);
        h.flip_edge(e);
        prop_assert_eq!(h, g);
    }

    #[test]
    fn snapshot_round_trips(g in graph(40)) {
        let bytes = g.to_snapshot();
        prop_assert_eq!(bytes.len(), 9 + num_pairs(g.n()).div_ceil(8));
        prop_assert_eq!(Graph::from_snapshot(&bytes).unwrap(), g);
    }

    #[test]
    fn delta_ignores_the_flipped_bit(g in graph(14), h in template(), i in any::<prop::sample::Index>()) {
        let e = EdgeId::from_index(i.index(g.num_pairs()));
        let d = delta_hom(&h, &g, e);
        prop_assert_eq!(d, delta_hom(&h, &g.with_edge_toggled(e), e));
        let plus = hom_count(&h, &g.with_edge(e));
        let minus = hom_count(&h, &g.without_edge(e));
        prop_assert!(plus >= minus);
    }

    #[test]
    fn conditional_ignores_the_flipped_bit(
        g in graph(12),
        b0 in -2.0f64..2.0,
        b1 in 0.0f64..3.0,
        i in any::<prop::sample::Index>(),
    ) {
        let m = ModelParams::edge_triangle(g.n(), b0, b1).unwrap();
        let e = EdgeId::from_index(i.index(g.num_pairs()));
        let a = conditional_prob(&m, &g, e);
        let b = conditional_prob(&m, &g.with_edge_toggled(e), e);
        prop_assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn conditionals_are_monotone((y, x, _z) in ordered_triple(10), b0 in -2.0f64..2.0, b1 in 0.0f64..3.0, b2 in 0.0f64..1.0) {
        let m = ModelParams::with_templates(x.n(), vec![b0, b1, b2], vec![TemplateGraph::triangle(), TemplateGraph::two_star()]).unwrap();
        for i in 0..x.num_pairs() {
            let e = EdgeId::from_index(i);
            prop_assert!(conditional_prob(&m, &y, e) <= conditional_prob(&m, &x, e) + 1e-15);
        }
    }

    #[test]
    fn cached_chain_matches_direct_conditionals(g in graph(16), b1 in 0.0f64..2.0, steps in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..40)) {
        let m = ModelParams::edge_triangle(g.n(), -0.5, b1).unwrap();
        let mut core = ChainCore::new(m.clone(), g.clone(), CachePolicy::Always).unwrap();
        for (i, present) in steps {
            let e = EdgeId::from_index(i.index(g.num_pairs()));
            core.set(e, present);
        }
        prop_assert!(core.caches_consistent());
        for i in 0..g.num_pairs() {
            let e = EdgeId::from_index(i);
            prop_assert!((core.prob(e) - conditional_prob(&m, core.graph(), e)).abs() <= 1e-12);
        }
    }

    #[test]
    fn cut_distance_domination((y, x, z) in ordered_triple(9), p in 0.0f64..=1.0) {
        let d = |g: &Graph| cut_distance_const(g, p, CutMode::Exact).unwrap().upper();
        prop_assert!(d(&x) <= d(&y).max(d(&z)));
    }

    #[test]
    fn restricted_cut_sandwich(g in graph(10), p in 0.0f64..=1.0, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let n = g.n();
        let u = a.index(n);
        let v = b.index(n);
        let s: Vec<usize> = if u == v { vec![u] } else { vec![u, v] };
        let full = cut_distance_const(&g, p, CutMode::Exact).unwrap().upper();
        let restricted = restricted_cut_distance(&g, &s, p, CutMode::Exact).unwrap().upper();
        let k = s.len();
        let slack = (k * (2 * n - k)) as f64 / (n * n) as f64;
        prop_assert!(restricted <= full + 1e-15);
        prop_assert!(full - slack <= restricted + 1e-15);
    }

    // Summing the single-vertex surrogate over u counts every map k times.
    #[test]
    fn single_vertex_decomposition(g in graph(9), h in template()) {
        let n = g.n();
        let k = h.k() as f64;
        let total: f64 = (0..n).map(|u| restricted_surrogate(&h, &g, u)).sum();
        let density = hom_count(&h, &g) as f64 / (n as f64).powi(h.k() as i32);
        prop_assert!((total - k * density).abs() <= 1e-12 * (1.0 + total));
        for u in 0..n {
            let r = restricted_hom_density(&h, &g, u);
            prop_assert!(r <= restricted_surrogate(&h, &g, u) + 1e-15);
            prop_assert!(r <= density + 1e-15);
        }
    }
}
