mod common;

use common::*;
use egocircles::ego::EgoNetwork;
use egocircles::model::{Circle, SimilarityCache};
use egocircles::optimizer::{CircleOptimizer, OptimizerConfig};
use egocircles::synth::{best_match_f1, PlantedEgoSpec};

#[test]
fn two_alters_one_edge_terminates() {
    let net = EgoNetwork::new("e", vec!["a".into(), "b".into()], &[(0, 1)]).unwrap();
    let sims = SimilarityCache::from_distance_fn(2, |_, _| 0.5);
    for seed in 0..20 {
        let opt = CircleOptimizer::new(&net, &sims, OptimizerConfig { seed, ..Default::default() }).unwrap();
        let r = opt.detect().unwrap();
        assert!(r.log_likelihood >= r.initial_log_likelihood);
        assert!(r.iterations <= 400);
    }
}

#[test]
fn engine_likelihood_matches_oracle_on_random_circles() {
    for seed in 0..10 {
        let inst = random_instance(seed, 5, 12);
        let n = inst.n();
        let opt = CircleOptimizer::new(&inst.ego.network, &inst.sims, OptimizerConfig::default()).unwrap();
        let mut masks = vec![0b11u32, (1 << n) - 1, 0b10110, 0b1];
        masks.push(seed as u32 * 37 % (1 << n));
        let circles: Vec<Circle> = masks
            .iter()
            .filter(|&&m| m != 0)
            .map(|&m| {
                let members: Vec<usize> = (0..n).filter(|&i| m & (1 << i) != 0).collect();
                let tau = threshold(&members, &inst.sims);
                Circle::new(n, members, tau)
            })
            .collect();
        let engine = opt.evaluate(circles.clone()).log_likelihood;
        let oracle = oracle_likelihood(&inst.ego.network, &inst.sims, &to_pairs(&circles));
        assert!((engine - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{engine} vs {oracle}");
    }
}

#[test]
fn small_nets_reach_top_decile() {
    let inst = random_instance(7, 4, 6);
    let n = inst.n();
    let configs = enumerate_configurations(n, &inst.sims, 3);
    let mut values: Vec<f64> = configs
        .iter()
        .map(|c| oracle_likelihood(&inst.ego.network, &inst.sims, c))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let opt = CircleOptimizer::new(&inst.ego.network, &inst.sims, OptimizerConfig { seed: 7, ..Default::default() }).unwrap();
    let best = opt.detect().unwrap().log_likelihood;
    let above = values.iter().filter(|&&v| v > best + 1e-9 * best.abs()).count();
    assert!(above as f64 <= 0.1 * values.len() as f64, "{above} of {} configurations beat {best}", values.len());
}

#[test]
fn two_planted_cliques_are_recovered() {
    let mut f1 = Vec::new();
    for seed in 0..10 {
        let inst = instance(&PlantedEgoSpec {
            circle_sizes: vec![4, 4],
            p_in: 1.0,
            p_out: 0.0,
            sigma_within: 0.0,
            sigma_between: 0.3,
            seed,
            ..Default::default()
        });
        let opt = CircleOptimizer::new(&inst.ego.network, &inst.sims, OptimizerConfig { seed, ..Default::default() }).unwrap();
        let found: Vec<Vec<usize>> = opt.detect().unwrap().circles.iter().map(|c| c.member_vec()).collect();
        f1.push(best_match_f1(&found, &inst.ego.truth.circles));
    }
    let mean = f1.iter().sum::<f64>() / f1.len() as f64;
    assert!(mean >= 0.9, "mean best-match F1 {mean:.3} over seeds: {f1:.3?}");
}
