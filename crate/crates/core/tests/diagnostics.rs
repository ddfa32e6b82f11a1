use ergm::counts::r_value;
use ergm::diagnostics::cut::cut_distance_naive;
use ergm::diagnostics::{
    cavity_statistics, cut_distance_const, degree_exception_set, g_max_abs, r_extrema, CutMode,
};
use ergm::experiments::metastable::initial_state;
use ergm::landscape::solve_example_tergm;
use ergm::rng::stream;
use ergm::{EdgeId, Graph, ModelParams, TemplateGraph};

#[test]
fn degrees_concentrate_at_n400() {
    let trials = 20;
    let good = (0..trials)
        .filter(|&t| {
            let g = Graph::sample_gnp(400, 0.3, &mut stream(301, t)).unwrap();
            (0..400).all(|u| (g.degree(u) as f64 / 400.0 - 0.3).abs() <= 0.1)
        })
        .count();
    assert!(good as f64 >= 0.99 * trials as f64, "{good}/{trials}");
}

// At n = 300 the per-edge sd of r is ~0.025, so a 0.05 band is two sd wide
// and the extremes over ~45k pairs sit ~4 sd out.
#[test]
fn r_extrema_concentrate_at_n300() {
    let g = Graph::sample_gnp(300, 0.5, &mut stream(302, 0)).unwrap();
    let family = [TemplateGraph::triangle(), TemplateGraph::two_star()];
    let (lo, hi) = r_extrema(&g, &family).unwrap();
    assert!(0.35 <= lo && hi <= 0.65, "[{lo}, {hi}]");
    for h in &family {
        let inside = (0..g.num_pairs())
            .filter(|&i| (r_value(h, &g, EdgeId::from_index(i)).unwrap() - 0.5).abs() <= 0.05)
            .count();
        let frac = inside as f64 / g.num_pairs() as f64;
        assert!(frac >= 0.9, "{h:?}: {frac}");
    }
}

fn complete_bipartite(half: usize) -> Graph {
    let edges: Vec<_> = (0..half).flat_map(|a| (half..2 * half).map(move |b| (a, b))).collect();
    Graph::from_edges(2 * half, &edges).unwrap()
}

#[test]
fn complete_bipartite_cut_distance() {
    let small = complete_bipartite(3);
    assert_eq!(cut_distance_const(&small, 0.5, CutMode::Exact).unwrap().upper(), cut_distance_naive(&small, 0.5).unwrap());
    let g = complete_bipartite(6);
    let exact = cut_distance_const(&g, 0.5, CutMode::Exact).unwrap();
    assert!((exact.upper() - 0.125).abs() <= 1e-15, "{exact:?}");
    let b = cut_distance_const(&g, 0.5, CutMode::Bounds { starts: 8, seed: 1 }).unwrap();
    assert!(b.lower() <= exact.upper() && exact.upper() <= b.upper());
}

#[test]
fn exception_set_empty_for_random_graphs() {
    let g = Graph::sample_gnp(200, 0.5, &mut stream(303, 0)).unwrap();
    let d = cut_distance_const(&g, 0.5, CutMode::Bounds { starts: 4, seed: 0 }).unwrap().upper();
    assert!(degree_exception_set(&g, 0.5, 0.5, d).unwrap().is_empty());
}

#[test]
fn cavity_construction_statistics() {
    let s = solve_example_tergm(-1.8, 2.0).unwrap();
    let n = 400;
    let family = [TemplateGraph::triangle()];
    let trials = 5;
    for t in 0..trials {
        let x = initial_state(n, s.q, s.p1, &mut stream(304, t)).unwrap();
        let c = cavity_statistics(&x, &family, s.p1).unwrap();
        assert!((c.r_bar_min - s.p1).abs() <= 0.05 && (c.r_bar_max - s.p1).abs() <= 0.05, "{c:?}");
        assert!((c.p1_min - s.q).abs() <= 0.05 && (c.p1_max - s.q).abs() <= 0.05, "{c:?}");
        // the distinguished vertex is the only degree exception
        let d = cut_distance_const(&x, s.p1, CutMode::Bounds { starts: 2, seed: 0 }).unwrap().upper();
        assert_eq!(degree_exception_set(&x, s.p1, 0.5, d).unwrap(), vec![0]);
    }
}

#[test]
fn g_statistic_small_for_random_graphs() {
    let n = 150;
    let m = ModelParams::edge_triangle(n, 1.5, 0.1).unwrap();
    let g = Graph::sample_gnp(n, 0.97, &mut stream(305, 0)).unwrap();
    assert!(g_max_abs(&m, &g).unwrap() <= 0.05);
}
