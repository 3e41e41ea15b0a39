//! Corpus-level drivers: detection over every ego of a snapshot, and the
//! glue that turns stored detections back into metric inputs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CoauthorGraph, PaperCorpus};
use crate::ego::{ego_network, enumerate_egos, EgoNetwork, DEFAULT_MIN_ALTERS};
use crate::error::{Error, Result};
use crate::metrics::EgoDetection;
use crate::model::SimilarityCache;
use crate::optimizer::{ego_seed, CircleOptimizer, OptimizerConfig};
use crate::profiles::CorpusStats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub cutoff_year: i32,
    pub tau_lower: f64,
    pub min_alters: usize,
    pub seed: u64,
    pub patience: Option<usize>,
    pub max_iterations: Option<usize>,
}

impl DetectConfig {
    pub fn new(cutoff_year: i32, seed: u64) -> Self {
        let defaults = OptimizerConfig::default();
        Self {
            cutoff_year,
            tau_lower: defaults.tau_lower,
            min_alters: DEFAULT_MIN_ALTERS,
            seed,
            patience: None,
            max_iterations: None,
        }
    }

    pub fn optimizer_config(&self, ego: &str) -> OptimizerConfig {
        OptimizerConfig {
            tau_lower: self.tau_lower,
            patience: self.patience,
            max_iterations: self.max_iterations,
            seed: ego_seed(self.seed, ego),
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedCircle {
    pub members: Vec<String>,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoCircles {
    pub ego: String,
    pub alters: usize,
    pub circles: Vec<DetectedCircle>,
    pub log_likelihood: f64,
    pub initial_log_likelihood: f64,
    pub iterations: usize,
    pub accepted: usize,
}

fn detect_one(stats: &CorpusStats<'_>, net: &EgoNetwork, config: &DetectConfig) -> Result<EgoCircles> {
    let profiles = stats.ego_profiles(net)?;
    let sims = SimilarityCache::from_profiles(&profiles)?;
    let opt = CircleOptimizer::new(net, &sims, config.optimizer_config(net.ego()))?;
    let result = opt.detect()?;
    let circles = result
        .circles
        .iter()
        .map(|c| DetectedCircle {
            members: c.members().map(|i| net.alters()[i].clone()).collect(),
            tau: c.tau,
        })
        .collect();
    Ok(EgoCircles {
        ego: net.ego().to_string(),
        alters: net.len(),
        circles,
        log_likelihood: result.log_likelihood,
        initial_log_likelihood: result.initial_log_likelihood,
        iterations: result.iterations,
        accepted: result.accepted,
    })
}

/// Detect circles for every ego with at least `min_alters` alters in the
/// snapshot ending at `cutoff_year`. Results are ordered by ego id and do
/// not depend on the number of worker threads.
pub fn detect_corpus(corpus: &PaperCorpus, config: &DetectConfig) -> Result<Vec<EgoCircles>> {
    if config.min_alters == 0 {
        return Err(Error::InvalidParameter("min_alters must be at least 1".into()));
    }
    config.optimizer_config("").validate()?;
    let snapshot = corpus.snapshot(config.cutoff_year)?;
    let stats = CorpusStats::new(&snapshot);
    let egos: Vec<EgoNetwork> = enumerate_egos(stats.graph(), config.min_alters).collect();
    egos.par_iter()
        .map(|net| detect_one(&stats, net, config))
        .collect()
}

/// Same as [`detect_corpus`] on a dedicated pool of `threads` workers.
pub fn detect_corpus_with_threads(corpus: &PaperCorpus, config: &DetectConfig, threads: usize) -> Result<Vec<EgoCircles>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| detect_corpus(corpus, config))
}

/// Rebuild metric inputs for stored detections against the same snapshot.
pub fn detections_for_metrics(stats: &CorpusStats<'_>, detections: &[EgoCircles]) -> Result<Vec<EgoDetection>> {
    detections
        .iter()
        .map(|d| {
            let network = ego_network(stats.graph(), &d.ego)?;
            let circles = d
                .circles
                .iter()
                .map(|c| {
                    c.members
                        .iter()
                        .map(|m| {
                            network.alter_index(m).ok_or_else(|| {
                                Error::MissingCircles(format!("`{m}` is not an alter of `{}`", d.ego))
                            })
                        })
                        .collect::<Result<Vec<usize>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let alter_fields = network
                .alters()
                .iter()
                .map(|a| stats.author_by_id(a).map(|s| s.major_field()))
                .collect::<Result<Vec<_>>>()?;
            Ok(EgoDetection {
                ego_citations: stats.author_by_id(&d.ego)?.citations,
                network,
                circles,
                alter_fields,
            })
        })
        .collect()
}

/// Circle memberships of the union of all egos' circles, keyed by graph
/// node index.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleIndex {
    memberships: Vec<Vec<u32>>,
    max_common: u32,
}

impl CircleIndex {
    pub fn new(graph: &CoauthorGraph, detections: &[EgoCircles]) -> Result<Self> {
        let mut memberships: Vec<Vec<u32>> = vec![Vec::new(); graph.node_count()];
        let mut pair_counts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut id = 0u32;
        for d in detections {
            for c in &d.circles {
                let nodes = c
                    .members
                    .iter()
                    .map(|m| {
                        graph
                            .index_of(m)
                            .ok_or_else(|| Error::MissingCircles(format!("circle member `{m}` not in the graph")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                for (i, &x) in nodes.iter().enumerate() {
                    memberships[x].push(id);
                    for &y in &nodes[i + 1..] {
                        *pair_counts.entry((x.min(y), x.max(y))).or_default() += 1;
                    }
                }
                id += 1;
            }
        }
        Ok(Self {
            memberships,
            max_common: pair_counts.values().copied().max().unwrap_or(0),
        })
    }

    /// Number of circles containing both `x` and `y`.
    pub fn common(&self, x: usize, y: usize) -> u32 {
        let (a, b) = (&self.memberships[x], &self.memberships[y]);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn max_common(&self) -> u32 {
        self.max_common
    }
}
