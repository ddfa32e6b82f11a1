use ergm::landscape::{
    analyze, classify_regime, find_local_maxima, phi_beta, phi_prime, solve_example_tergm, LandscapeOptions,
    Regime,
};
use ergm::{ModelParams, TemplateGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Independent high-precision bisection of x = σ(-3.6 + 12x²) and of
// x = σ(-3.6 + 12 p1 x), computed offline to 20 digits.
const P1: f64 = 0.999_773_960_712_445_2;
const P2: f64 = 0.026_821_405_176_543_803;
const P_MID: f64 = 0.568_230_965_575_685;
const Q: f64 = 0.044_554_300_947_563_99;
const G_PRIME_Q: f64 = 0.510_715_114_794_708;
const L_P1: f64 = 0.200_112_725_902_782_11;
const L_P2: f64 = 0.013_516_651_509_639_14;

#[test]
fn example_values_pinned() {
    let s = solve_example_tergm(-1.8, 2.0).unwrap();
    assert!((s.p1 - P1).abs() < 1e-9, "p1 = {}", s.p1);
    assert!((s.p2 - P2).abs() < 1e-9, "p2 = {}", s.p2);
    assert!((s.q - Q).abs() < 1e-9, "q = {}", s.q);
    assert!((s.g_prime_q - G_PRIME_Q).abs() < 1e-8);
    assert_eq!(s.f_fixed_points.len(), 3);
    assert!((s.f_fixed_points[1].p - P_MID).abs() < 1e-9);
    assert!(!s.f_fixed_points[1].stable);
    assert!(s.f_prime_p1 < 1.0 && s.g_prime_q < 1.0);
    // g' at q re-derived from the closed form
    let d = 12.0 * s.q * (1.0 - s.q) * s.p1;
    assert!((d - s.g_prime_q).abs() < 1e-12);

    let m = ModelParams::edge_triangle(1, -1.8, 2.0).unwrap();
    let r = analyze(&m, &LandscapeOptions::default());
    let vals: Vec<f64> = r.maxima.iter().map(|x| x.value).collect();
    assert!((vals[0] - L_P2).abs() < 1e-12 && (vals[1] - L_P1).abs() < 1e-12);
}

#[test]
fn dense_grid_agrees_with_default() {
    let m = ModelParams::edge_triangle(1, -1.8, 2.0).unwrap();
    let coarse = find_local_maxima(&m, &LandscapeOptions::default()).0;
    let fine = find_local_maxima(&m, &LandscapeOptions { grid_size: 1 << 20, ..Default::default() }).0;
    assert_eq!(coarse.len(), fine.len());
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a.p - b.p).abs() < 1e-10);
    }
    assert_eq!(
        classify_regime(&coarse, 1e-6),
        classify_regime(&fine, 1e-6)
    );
}

fn random_model(rng: &mut ChaCha8Rng) -> ModelParams {
    let pool = [TemplateGraph::two_star(), TemplateGraph::triangle()];
    let k = rng.random_range(0..=2usize);
    let mut beta = vec![rng.random_range(-3.0..1.0)];
    let mut extra = Vec::new();
    for t in pool.iter().take(k) {
        beta.push(rng.random_range(0.0..3.0));
        extra.push(t.clone());
    }
    ModelParams::with_templates(1, beta, extra).unwrap()
}

#[test]
fn maxima_are_stable_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = LandscapeOptions::default();
    for _ in 0..200 {
        let m = random_model(&mut rng);
        let r = analyze(&m, &opts);
        r.check_consistency(&m, 1e-8).unwrap();
        for x in r.maxima.iter().filter(|x| !x.is_degenerate) {
            assert!((phi_beta(&m, x.p) - x.p).abs() <= 1e-8);
            assert!(phi_prime(&m, x.p) <= 1.0 + 1e-8);
        }
    }
}

#[test]
fn phi_is_monotone_in_beta() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let m = random_model(&mut rng);
        if m.beta().len() < 2 {
            continue;
        }
        let p = rng.random_range(0.0..1.0);
        let mut beta = m.beta().to_vec();
        beta[1] += 0.25;
        let bigger = ModelParams::new(1, beta, m.templates().to_vec()).unwrap();
        assert!(phi_beta(&bigger, p) >= phi_beta(&m, p));
        let v = phi_beta(&m, p);
        assert!(v > 0.0 && v < 1.0 || m.beta()[0].abs() > 300.0);
    }
}

#[test]
fn regime_flips_once_along_triangle_sweep() {
    let opts = LandscapeOptions::default();
    let regimes: Vec<Regime> = (0..=60)
        .map(|i| {
            let b1 = 3.0 * i as f64 / 60.0;
            let m = ModelParams::edge_triangle(1, -1.8, b1).unwrap();
            analyze(&m, &opts).regime
        })
        .collect();
    assert_eq!(regimes[0], Regime::High);
    assert_eq!(*regimes.last().unwrap(), Regime::Low);
    let flips = regimes.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(flips <= 2, "{regimes:?}");
}
