mod common;

use common::oracle;
use cutsparse::sparsify::draw_counts;
use cutsparse::{
    communication_cost, compile_qubo, cut_weight, effective_resistances, generate_instance,
    resolve_q, solve_exact, solve_tabu, sparsify, CutAssignment, GeneratorKind, QRule,
    SparsifyConfig, TabuParams, WeightedGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tuples(g: &WeightedGraph) -> Vec<(usize, usize, f64)> {
    g.edges().iter().map(|e| (e.u, e.v, e.w)).collect()
}

fn random_cut(n: usize, rng: &mut ChaCha8Rng) -> CutAssignment {
    CutAssignment::new((0..n).map(|_| rng.gen()).collect())
}

#[test]
fn cut_weight_matches_edge_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for seed in 0..50 {
        let g = generate_instance(GeneratorKind::Weighted, 12, 0.5, 9, seed).unwrap();
        let s = random_cut(12, &mut rng);
        assert_eq!(cut_weight(&g, &s).unwrap(), oracle::brute_cut(&tuples(&g), s.bits()));
    }
}

#[test]
fn foster_on_connected_random_graph() {
    let g = (0..)
        .map(|s| generate_instance(GeneratorKind::G05, 30, 0.3, 1, s).unwrap())
        .find(|g| g.component_count() == 1)
        .unwrap();
    let p = effective_resistances(&g).unwrap();
    let sum: f64 = p.resistances().iter().sum();
    assert!((sum - 29.0).abs() <= 1e-9 * 29.0, "sum = {sum}");
    let expect = oracle::grounded_resistances(30, &tuples(&g));
    for (r, e) in p.resistances().iter().zip(&expect) {
        assert!((r - e).abs() <= 1e-10);
    }
}

#[test]
fn exact_solver_matches_plain_enumerator() {
    for seed in 0..8 {
        let g = generate_instance(GeneratorKind::Weighted, 16, 0.5, 20, seed).unwrap();
        let r = solve_exact(&compile_qubo(&g)).unwrap();
        assert_eq!(r.objective, oracle::brute_max_cut(16, &tuples(&g)));
        assert_eq!(r.objective, cut_weight(&g, &r.assignment).unwrap());
    }
}

#[test]
fn tabu_finds_exact_optimum_on_small_instances() {
    let mut hits = 0;
    for seed in 0..100u64 {
        let kind = if seed % 2 == 0 { GeneratorKind::G05 } else { GeneratorKind::Weighted };
        let n = 10 + (seed % 11) as usize;
        let g = generate_instance(kind, n, 0.5, 50, 1000 + seed).unwrap();
        let q = compile_qubo(&g);
        let exact = solve_exact(&q).unwrap();
        let tabu = solve_tabu(&q, &TabuParams::iterations(100_000), seed).unwrap();
        assert!(exact.objective >= tabu.objective);
        assert_eq!(tabu.objective, cutsparse::qubo_objective(&q, &tabu.assignment).unwrap());
        if tabu.objective == exact.objective {
            hits += 1;
        }
    }
    assert!(hits >= 95, "tabu matched the optimum on {hits}/100");
}

#[test]
fn sparsified_cut_is_unbiased() {
    let g = generate_instance(GeneratorKind::G05, 50, 0.3, 1, 21).unwrap();
    let p = effective_resistances(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = random_cut(50, &mut rng);
    let truth = cut_weight(&g, &s).unwrap();
    let total = g.total_weight();

    let seeds = 2000;
    let (mut cut_sum, mut cut_sq, mut total_sum, mut total_sq) = (0.0, 0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let h = sparsify(&g, &p, &SparsifyConfig::explicit(250, seed)).unwrap();
        let c = cut_weight(&h, &s).unwrap();
        let t = h.total_weight();
        cut_sum += c;
        cut_sq += c * c;
        total_sum += t;
        total_sq += t * t;
    }
    let k = seeds as f64;
    let check = |sum: f64, sq: f64, want: f64| {
        let mean = sum / k;
        let se = ((sq / k - mean * mean) / k).sqrt();
        assert!((mean - want).abs() <= 4.0 * se, "mean {mean} vs {want} (se {se})");
    };
    check(cut_sum, cut_sq, truth);
    check(total_sum, total_sq, total);
}

#[test]
fn draw_counts_follow_probabilities() {
    let p = [0.5, 0.25, 0.125, 0.125];
    let counts = draw_counts(&p, 80_000, 3);
    assert_eq!(counts.iter().sum::<u64>(), 80_000);
    for (c, pi) in counts.iter().zip(p) {
        let expect = 80_000.0 * pi;
        let sd = (80_000.0 * pi * (1.0 - pi)).sqrt();
        assert!((*c as f64 - expect).abs() <= 4.0 * sd);
    }
}

#[test]
fn theorem_scale_q_values() {
    for (n, want) in [(121, 522261), (251, 1248200), (487, 2712316)] {
        let q = resolve_q(QRule::Theorem1, n, 0.1).unwrap() as i64;
        assert!((q - want).abs() <= 1, "|V| = {n}: {q}");
    }
    assert_eq!(resolve_q(QRule::FiveN, 100, 0.1).unwrap(), 500);
}

#[test]
fn sparsified_payload_is_small() {
    let g = generate_instance(GeneratorKind::G05, 100, 0.5, 1, 7).unwrap();
    let p = effective_resistances(&g).unwrap();
    let h = sparsify(&g, &p, &SparsifyConfig::explicit(500, 3)).unwrap();
    assert!(communication_cost(&compile_qubo(&h)) <= 600);
}

#[test]
fn resistances_on_many_components_match_oracle() {
    // Dense blocks, sparse blocks and isolated nodes in one Laplacian.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 160;
    let bounds = [0, 60, 100, 130, 150];
    let mut edges = Vec::new();
    for (b, w) in bounds.windows(2).enumerate() {
        let density = [0.8, 0.1, 0.4, 0.9][b];
        for u in w[0]..w[1] {
            for v in (u + 1)..w[1] {
                if rng.gen_bool(density) {
                    edges.push((u, v, rng.gen_range(0.1..10.0)));
                }
            }
        }
    }
    let g = WeightedGraph::new(n, edges).unwrap();
    let p = effective_resistances(&g).unwrap();
    let expect = oracle::grounded_resistances(n, &tuples(&g));
    for (r, e) in p.resistances().iter().zip(&expect) {
        assert!((r - e).abs() <= 1e-9 * e.max(1.0), "{r} vs {e}");
    }
    let foster: f64 = g.edges().iter().zip(p.resistances()).map(|(e, r)| e.w * r).sum();
    let c = oracle::component_count(n, &tuples(&g));
    assert!((foster - (n - c) as f64).abs() <= 1e-6 * (n - c) as f64);
}
