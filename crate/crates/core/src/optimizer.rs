//! Randomized circle search.
//!
//! Starting from one singleton circle per alter, each iteration moves every
//! alter into and out of randomly chosen circles, recomputes thresholds,
//! discards circles whose threshold drops below `tau_lower`, and keeps the
//! result only if the log-likelihood strictly increases. The search stops
//! after `patience` consecutive rejections or `max_iterations` steps.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.9) seeded with
//! `seed_from_u64`, so runs reproduce bit-for-bit across platforms.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ego::EgoNetwork;
use crate::error::{Error, Result};
use crate::model::{self, sim_to_circle, Circle, CircleState, SimilarityCache};
use crate::profiles::SIM_CAP;

pub type DetectorRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub tau_lower: f64,
    pub tau_init: f64,
    /// Consecutive rejections before stopping; `None` means `|V|`.
    pub patience: Option<usize>,
    /// Hard cap on iterations; `None` means `200 * |V|`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tau_lower: 0.2,
            tau_init: SIM_CAP,
            patience: None,
            max_iterations: None,
            seed: 0,
            record_trace: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_lower > 0.0) {
            return Err(Error::InvalidParameter("tau_lower must be positive".into()));
        }
        if !(self.tau_init > 0.0) {
            return Err(Error::InvalidParameter("tau_init must be positive".into()));
        }
        if self.patience == Some(0) {
            return Err(Error::InvalidParameter("patience must be at least 1".into()));
        }
        Ok(())
    }

    pub fn patience_for(&self, n: usize) -> usize {
        self.patience.unwrap_or(n).max(1)
    }

    pub fn max_iterations_for(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(200 * n)
    }
}

/// Final circles of one ego network, members as local alter indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub circles: Vec<Circle>,
    pub log_likelihood: f64,
    pub initial_log_likelihood: f64,
    pub iterations: usize,
    pub accepted: usize,
    /// Likelihood after the initial state and after every accepted step.
    pub trace: Vec<f64>,
}

/// How many circles to join and leave, given `|S1|` circles containing the
/// alter and `|S2|` circles not containing it.
///
/// Join count is `ceil((k1 + s1) / s1)` with `k1` uniform in `[1, s2)`;
/// leave count is `ceil((k2 + s1) / s1)` with `k2` uniform in `[1, s1)`.
/// Empty ranges give zero, except `s2 == 1` which joins the one circle
/// available. `s1 == 0` is treated as `s1 = 1` in the join formula.
pub fn membership_deltas<R: Rng + ?Sized>(s1: usize, s2: usize, rng: &mut R) -> (usize, usize) {
    let add = match s2 {
        0 => 0,
        1 => 1,
        _ => {
            let k1 = rng.random_range(1..s2);
            add_count(k1, s1).min(s2)
        }
    };
    let remove = if s1 >= 2 {
        let k2 = rng.random_range(1..s1);
        remove_count(k2, s1).min(s1)
    } else {
        0
    };
    (add, remove)
}

/// `ceil((k1 + s1) / s1)`, with `s1 = 0` read as 1.
pub fn add_count(k1: usize, s1: usize) -> usize {
    let s1 = s1.max(1);
    (k1 + s1).div_ceil(s1)
}

/// `ceil((k2 + s1) / s1)`.
pub fn remove_count(k2: usize, s1: usize) -> usize {
    let s1 = s1.max(1);
    (k2 + s1).div_ceil(s1)
}

/// One step's outcome, handed to observers of [`CircleOptimizer::run_with`].
#[derive(Debug)]
pub struct StepRecord<'s> {
    pub iteration: usize,
    pub accepted: bool,
    pub before: &'s CircleState,
    pub candidate: &'s CircleState,
}

/// Join and leave circles for alter `y`, reading memberships from `current`
/// and writing them into `next`.
fn move_alter<R: Rng + ?Sized>(current: &[Circle], next: &mut [Circle], y: usize, rng: &mut R) {
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for (j, c) in current.iter().enumerate() {
        if c.contains(y) {
            s1.push(j);
        } else {
            s2.push(j);
        }
    }
    let (add, remove) = membership_deltas(s1.len(), s2.len(), rng);
    if add > 0 {
        for i in sample(rng, s2.len(), add) {
            next[s2[i]].insert(y);
        }
    }
    if remove > 0 {
        for i in sample(rng, s1.len(), remove) {
            next[s1[i]].remove(y);
        }
    }
}

pub struct CircleOptimizer<'a> {
    net: &'a EgoNetwork,
    sims: &'a SimilarityCache,
    config: OptimizerConfig,
}

impl<'a> CircleOptimizer<'a> {
    pub fn new(net: &'a EgoNetwork, sims: &'a SimilarityCache, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        if sims.len() != net.len() {
            return Err(Error::LengthMismatch {
                left: sims.len(),
                right: net.len(),
            });
        }
        Ok(Self { net, sims, config })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn rng(&self) -> DetectorRng {
        DetectorRng::seed_from_u64(self.config.seed)
    }

    pub fn evaluate(&self, circles: Vec<Circle>) -> CircleState {
        model::evaluate(self.net, self.sims, circles)
    }

    /// One singleton circle per alter, each at `tau_init`.
    pub fn init_state(&self) -> Result<CircleState> {
        let n = self.net.len();
        if n == 0 {
            return Err(Error::EmptyEgoNetwork(self.net.ego().to_string()));
        }
        let circles = (0..n)
            .map(|y| Circle::new(n, [y], self.config.tau_init))
            .collect();
        Ok(self.evaluate(circles))
    }

    /// Move every alter in and out of randomly chosen circles. Memberships
    /// are read from `state`; circles left empty are dropped. Thresholds of
    /// the returned circles are stale.
    pub fn perturb<R: Rng + ?Sized>(&self, state: &CircleState, rng: &mut R) -> Vec<Circle> {
        let mut next = state.circles.clone();
        for y in 0..self.net.len() {
            move_alter(&state.circles, &mut next, y, rng);
        }
        next.retain(|c| !c.is_empty());
        next
    }

    /// Refresh thresholds, prune and evaluate a perturbed circle set.
    pub fn settle(&self, mut circles: Vec<Circle>) -> CircleState {
        model::update_thresholds(&mut circles, self.sims).expect("perturbation leaves no empty circle");
        model::prune(&mut circles, self.config.tau_lower);
        self.evaluate(circles)
    }

    /// Perturb, refresh thresholds, prune, and accept on strict improvement.
    pub fn step<R: Rng + ?Sized>(&self, state: CircleState, rng: &mut R) -> (CircleState, CircleState, bool) {
        let candidate = self.settle(self.perturb(&state, rng));
        if candidate.log_likelihood > state.log_likelihood {
            (candidate.clone(), candidate, true)
        } else {
            (state, candidate, false)
        }
    }

    pub fn detect(&self) -> Result<DetectionResult> {
        self.run_with(|_| {})
    }

    /// Run to convergence, calling `observer` after every step.
    pub fn run_with(&self, mut observer: impl FnMut(&StepRecord<'_>)) -> Result<DetectionResult> {
        let n = self.net.len();
        let mut state = self.init_state()?;
        let initial = state.log_likelihood;
        let mut trace = vec![initial];
        let (mut iterations, mut accepted, mut idle) = (0, 0, 0);
        if n >= 2 {
            let mut rng = self.rng();
            let patience = self.config.patience_for(n);
            let max_iterations = self.config.max_iterations_for(n);
            while iterations < max_iterations && idle < patience {
                let before = state.clone();
                let (next, candidate, ok) = self.step(state, &mut rng);
                iterations += 1;
                observer(&StepRecord {
                    iteration: iterations,
                    accepted: ok,
                    before: &before,
                    candidate: &candidate,
                });
                state = next;
                if ok {
                    accepted += 1;
                    idle = 0;
                    if self.config.record_trace {
                        trace.push(state.log_likelihood);
                    }
                } else {
                    idle += 1;
                }
            }
        }
        if !self.config.record_trace {
            trace.truncate(1);
            trace.push(state.log_likelihood);
            trace.dedup();
        }
        Ok(DetectionResult {
            circles: state.circles,
            log_likelihood: state.log_likelihood,
            initial_log_likelihood: initial,
            iterations,
            accepted,
            trace,
        })
    }
}

/// Check that every member clears its circle's threshold and every
/// threshold clears `tau_lower`. Returns the first violation found.
pub fn check_constraints(state: &CircleState, sims: &SimilarityCache, tau_lower: f64) -> Option<String> {
    for (j, c) in state.circles.iter().enumerate() {
        if c.tau < tau_lower {
            return Some(format!("circle {j}: tau {} below {tau_lower}", c.tau));
        }
        for y in c.members() {
            let s = match sim_to_circle(c, y, sims) {
                Ok(s) => s,
                Err(e) => return Some(format!("circle {j}: {e}")),
            };
            if s < c.tau {
                return Some(format!("circle {j}: member {y} at {s} below tau {}", c.tau));
            }
        }
    }
    let lambda = model::lambda_of(&state.circles);
    if lambda != state.lambda {
        return Some(format!("lambda {} != max tau {lambda}", state.lambda));
    }
    None
}

/// Stable 64-bit FNV-1a, used to derive per-ego seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn ego_seed(seed: u64, ego: &str) -> u64 {
    seed ^ fnv1a(ego.as_bytes())
}
