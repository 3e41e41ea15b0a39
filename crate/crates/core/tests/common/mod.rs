#![allow(dead_code)]

use egocircles::ego::EgoNetwork;
use egocircles::model::{Circle, SimilarityCache};
use egocircles::synth::{generate_ego, PlantedEgo, PlantedEgoSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TAU_L: f64 = 0.2;
pub const CAP: f64 = 1e6;

/// Similarity written out from the definition: reciprocal distance, with
/// distances below 1e-6 read as 1e-6.
pub fn sim(d: f64) -> f64 {
    1.0 / d.max(1e-6)
}

/// Similarity of `y` to the rest of `members`.
pub fn sim_to_rest(members: &[usize], y: usize, sims: &SimilarityCache) -> f64 {
    let others: Vec<usize> = members.iter().copied().filter(|&z| z != y).collect();
    if others.is_empty() {
        return CAP;
    }
    let mean = others.iter().map(|&z| sims.distance(y, z)).sum::<f64>() / others.len() as f64;
    sim(mean)
}

/// Minimum member similarity, as a circle's threshold.
pub fn threshold(members: &[usize], sims: &SimilarityCache) -> f64 {
    members.iter().map(|&y| sim_to_rest(members, y, sims)).fold(f64::INFINITY, f64::min)
}

/// Direct evaluation of the log-likelihood over `(members, tau)` circles.
pub fn oracle_likelihood(net: &EgoNetwork, sims: &SimilarityCache, circles: &[(Vec<usize>, f64)]) -> f64 {
    let lambda = circles.iter().map(|c| c.1).fold(0.0, f64::max);
    let n = net.len();
    let mut total = 0.0;
    for x in 0..n {
        for y in x + 1..n {
            let s = sim(sims.distance(x, y));
            let (mut b1, mut b2) = (0.0, 0.0);
            for (m, tau) in circles {
                let t = 1.0 / (s + lambda - tau);
                if m.contains(&x) && m.contains(&y) {
                    b1 += t;
                } else {
                    b2 += t;
                }
            }
            let phi = b1 * b1 - b2 * b2;
            let log1p_exp = phi.max(0.0) + (-phi.abs()).exp().ln_1p();
            if net.has_edge(x, y) {
                total += phi;
            }
            total -= log1p_exp;
        }
    }
    total
}

pub fn to_pairs(circles: &[Circle]) -> Vec<(Vec<usize>, f64)> {
    circles.iter().map(|c| (c.member_vec(), c.tau)).collect()
}

/// First violated constraint of a circle set, checked from the definitions.
pub fn constraint_violation(circles: &[Circle], lambda: f64, sims: &SimilarityCache, n: usize) -> Option<String> {
    let mut max_tau: f64 = 0.0;
    for (j, c) in circles.iter().enumerate() {
        let m = c.member_vec();
        if m.is_empty() || m.len() > n || m.iter().any(|&y| y >= n) {
            return Some(format!("circle {j}: bad member set {m:?}"));
        }
        if c.tau < TAU_L {
            return Some(format!("circle {j}: tau {} < {TAU_L}", c.tau));
        }
        for &y in &m {
            let s = sim_to_rest(&m, y, sims);
            if s < c.tau {
                return Some(format!("circle {j}: member {y} similarity {s} < tau {}", c.tau));
            }
        }
        max_tau = max_tau.max(c.tau);
    }
    if lambda != max_tau {
        return Some(format!("lambda {lambda} != max tau {max_tau}"));
    }
    None
}

pub struct Instance {
    pub ego: PlantedEgo,
    pub sims: SimilarityCache,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.ego.network.len()
    }
}

pub fn instance(spec: &PlantedEgoSpec) -> Instance {
    let ego = generate_ego(spec).unwrap();
    let sims = SimilarityCache::from_profiles(&ego.profiles).unwrap();
    Instance { ego, sims }
}

/// A planted ego network whose alter count lies in `[lo, hi]`, with
/// circle parameters drawn from `seed`.
pub fn random_instance(seed: u64, lo: usize, hi: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let k = rng.random_range(1..=4);
        let max_size = (hi / k).max(2);
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(2..=max_size)).collect();
        let spec = PlantedEgoSpec {
            circle_sizes: sizes,
            overlap: rng.random_range(0.0..0.4),
            p_in: rng.random_range(0.5..0.95),
            p_out: rng.random_range(0.0..0.15),
            sigma_within: rng.random_range(0.0..0.1),
            sigma_between: rng.random_range(0.1..0.5),
            seed: rng.random(),
        };
        if spec.validate().is_err() {
            continue;
        }
        let inst = instance(&spec);
        if (lo..=hi).contains(&inst.n()) {
            return inst;
        }
    }
}

/// Every circle set of at most `max_circles` distinct nonempty circles,
/// with thresholds set to the minimum member similarity and infeasible
/// sets (some threshold below the lower bound) dropped.
pub fn enumerate_configurations(n: usize, sims: &SimilarityCache, max_circles: usize) -> Vec<Vec<(Vec<usize>, f64)>> {
    let circles: Vec<(Vec<usize>, f64)> = (1u32..1 << n)
        .map(|mask| {
            let m: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let tau = threshold(&m, sims);
            (m, tau)
        })
        .filter(|c| c.1 >= TAU_L)
        .collect();
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    for _ in 0..max_circles {
        let mut next = Vec::new();
        for (start, chosen) in &frontier {
            for i in *start..circles.len() {
                let mut c = chosen.clone();
                c.push(i);
                out.push(c.iter().map(|&j| circles[j].clone()).collect());
                next.push((i + 1, c));
            }
        }
        frontier = next;
    }
    out
}
