//! The generative circle model.
//!
//! Every circle `C_j` carries a threshold `tau_j`; with `lambda = max tau`,
//! a pair `(x, y)` accumulates
//!
//! ```text
//! beta1 = sum over circles holding both x and y of 1 / (Sim(x,y) - tau_j + lambda)
//! beta2 = sum over all other circles            of 1 / (Sim(x,y) - tau_j + lambda)
//! phi   = beta1^2 - beta2^2
//! ```
//!
//! and forms an edge with probability `logistic(phi)`. The objective is the
//! log-likelihood of the observed alter graph,
//! `sum_{edges} phi - sum_{pairs} log(1 + exp(phi))`, taken over unordered
//! pairs of distinct alters.

use fixedbitset::FixedBitSet;

use crate::ego::EgoNetwork;
use crate::error::{Error, Result};
use crate::profiles::{euclidean, similarity_from_distance, ProfileVector, SIM_CAP};

/// Pairwise profile distances and similarities of one ego network.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityCache {
    n: usize,
    dist: Vec<f64>,
    sim: Vec<f64>,
}

impl SimilarityCache {
    pub fn from_profiles(profiles: &[ProfileVector]) -> Result<Self> {
        if let Some(first) = profiles.first() {
            for p in profiles {
                if p.len() != first.len() {
                    return Err(Error::LengthMismatch {
                        left: first.len(),
                        right: p.len(),
                    });
                }
            }
        }
        let n = profiles.len();
        Ok(Self::from_distance_fn(n, |x, y| {
            euclidean(profiles[x].values(), profiles[y].values())
        }))
    }

    /// Build from an explicit distance function; only `x < y` is queried.
    pub fn from_distance_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut dist = vec![0.0; n * n];
        for x in 0..n {
            for y in x + 1..n {
                let d = f(x, y);
                dist[x * n + y] = d;
                dist[y * n + x] = d;
            }
        }
        let sim = dist.iter().map(|&d| similarity_from_distance(d)).collect();
        Self { n, dist, sim }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }

    #[inline]
    pub fn similarity(&self, x: usize, y: usize) -> f64 {
        self.sim[x * self.n + y]
    }
}

/// A set of alters (local indices) with its similarity threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Circle {
    members: FixedBitSet,
    pub tau: f64,
}

impl Circle {
    pub fn new(universe: usize, members: impl IntoIterator<Item = usize>, tau: f64) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        for m in members {
            bits.insert(m);
        }
        Self { members: bits, tau }
    }

    #[inline]
    pub fn contains(&self, y: usize) -> bool {
        self.members.contains(y)
    }

    pub fn size(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn member_vec(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn insert(&mut self, y: usize) {
        self.members.insert(y);
    }

    pub fn remove(&mut self, y: usize) {
        self.members.set(y, false);
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }
}

/// Circles of one ego network with `lambda` and the cached log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleState {
    pub circles: Vec<Circle>,
    pub lambda: f64,
    pub log_likelihood: f64,
}

impl CircleState {
    pub fn k(&self) -> usize {
        self.circles.len()
    }
}

/// Maximum threshold, or 0 without circles.
pub fn lambda_of(circles: &[Circle]) -> f64 {
    circles.iter().map(|c| c.tau).fold(0.0, f64::max)
}

/// Similarity of `y` to `circle`: reciprocal of the mean distance from `y`
/// to the other members. A circle with no member besides `y` yields
/// [`SIM_CAP`].
pub fn sim_to_circle(circle: &Circle, y: usize, sims: &SimilarityCache) -> Result<f64> {
    if circle.is_empty() {
        return Err(Error::InvalidParameter("similarity to an empty circle".into()));
    }
    let (mut total, mut count) = (0.0, 0usize);
    for z in circle.members() {
        if z != y {
            total += sims.distance(y, z);
            count += 1;
        }
    }
    if count == 0 {
        return Ok(SIM_CAP);
    }
    Ok(similarity_from_distance(total / count as f64))
}

/// `(beta1, beta2)` for the pair `(x, y)` under `circles`.
pub fn beta_components(x: usize, y: usize, circles: &[Circle], lambda: f64, sims: &SimilarityCache) -> (f64, f64) {
    let sim = sims.similarity(x, y);
    let (mut shared, mut other) = (0.0, 0.0);
    for c in circles {
        let denom = sim + (lambda - c.tau);
        debug_assert!(denom > 0.0, "non-positive closeness denominator {denom}");
        let term = 1.0 / denom;
        if c.contains(x) && c.contains(y) {
            shared += term;
        } else {
            other += term;
        }
    }
    (shared, other)
}

#[inline]
pub fn phi_from_betas(beta1: f64, beta2: f64) -> f64 {
    beta1 * beta1 - beta2 * beta2
}

pub fn phi(x: usize, y: usize, circles: &[Circle], lambda: f64, sims: &SimilarityCache) -> f64 {
    let (b1, b2) = beta_components(x, y, circles, lambda, sims);
    phi_from_betas(b1, b2)
}

/// `log(1 + exp(v))` without overflow.
#[inline]
pub fn softplus(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

/// Largest double below one.
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// `exp(phi) / (1 + exp(phi))`, kept strictly inside `(0, 1)`.
pub fn edge_probability(phi: f64) -> f64 {
    let p = if phi >= 0.0 {
        1.0 / (1.0 + (-phi).exp())
    } else {
        let e = phi.exp();
        e / (1.0 + e)
    };
    p.clamp(f64::MIN_POSITIVE, P_MAX)
}

/// Complement of [`edge_probability`].
pub fn non_edge_probability(phi: f64) -> f64 {
    1.0 - edge_probability(phi)
}

/// Log-likelihood of `net` under `circles`, with `lambda` recomputed.
pub fn log_likelihood(net: &EgoNetwork, sims: &SimilarityCache, circles: &[Circle]) -> f64 {
    let lambda = lambda_of(circles);
    let n = net.len();
    let mut total = 0.0;
    for x in 0..n {
        for y in x + 1..n {
            let phi = phi(x, y, circles, lambda, sims);
            if net.has_edge(x, y) {
                total += phi;
            }
            total -= softplus(phi);
        }
    }
    total
}

/// Set each threshold to the smallest member-to-circle similarity and
/// refresh `lambda`. Singleton circles get [`SIM_CAP`].
pub fn update_thresholds(circles: &mut [Circle], sims: &SimilarityCache) -> Result<f64> {
    for c in circles.iter_mut() {
        let mut tau = f64::INFINITY;
        for y in c.member_vec() {
            tau = tau.min(sim_to_circle(c, y, sims)?);
        }
        c.tau = tau;
    }
    Ok(lambda_of(circles))
}

/// Drop every circle whose threshold is below `tau_lower`; returns the
/// refreshed `lambda`.
pub fn prune(circles: &mut Vec<Circle>, tau_lower: f64) -> f64 {
    circles.retain(|c| c.tau >= tau_lower);
    lambda_of(circles)
}

/// Assemble a state, computing `lambda` and the likelihood fresh.
pub fn evaluate(net: &EgoNetwork, sims: &SimilarityCache, circles: Vec<Circle>) -> CircleState {
    let lambda = lambda_of(&circles);
    let log_likelihood = log_likelihood(net, sims, &circles);
    CircleState {
        circles,
        lambda,
        log_likelihood,
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn edge_probabilities_complement(phi in -1e6f64..1e6) {
            let p = edge_probability(phi);
            prop_assert!(p > 0.0 && p < 1.0);
            prop_assert!((p + non_edge_probability(phi) - 1.0).abs() <= f64::EPSILON);
            prop_assert!(softplus(phi).is_finite());
        }

        #[test]
        fn joining_a_new_circle_never_lowers_phi(
            taus in proptest::collection::vec(0.01f64..3.0, 0..5),
            members in proptest::collection::vec(proptest::collection::vec(0usize..4, 1..4), 0..5),
            sim_d in 0.1f64..5.0,
            new_tau_frac in 0.0f64..1.0,
        ) {
            let sims = SimilarityCache::from_distance_fn(4, |x, y| if (x, y) == (0, 1) { sim_d } else { 1.0 });
            let circles: Vec<Circle> = taus.iter().zip(&members).map(|(&t, m)| Circle::new(4, m.iter().copied(), t)).collect();
            let lambda = lambda_of(&circles).max(1.0);
            let (b1, b2) = beta_components(0, 1, &circles, lambda, &sims);
            let mut grown = circles.clone();
            grown.push(Circle::new(4, [0, 1], new_tau_frac * lambda));
            let (g1, g2) = beta_components(0, 1, &grown, lambda, &sims);
            prop_assert!(g1 >= b1);
            prop_assert!(g2 <= b2);
            prop_assert!(phi_from_betas(g1, g2) >= phi_from_betas(b1, b2));
        }
    }
}
