//! Temporal collaboration prediction.
//!
//! A corpus is cut at `train_end`; pairs that first coauthor inside the test
//! window are positives. Candidates are the distance-2 pairs of the training
//! graph, and negatives are sampled from candidates that stay apart. Pairs
//! are described by node features (N), edge features (E), their
//! concatenation (NE), and optionally a shared-circle flag (B) and a
//! normalized shared-circle count (C).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CoauthorGraph, PaperCorpus, NUM_DECADES, NUM_FIELDS};
use crate::error::{Error, Result};
use crate::pipeline::{CircleIndex, EgoCircles};
use crate::profiles::{scaled, CorpusStats};

/// Per-author entries: citations, h-index, coauthors, field fractions,
/// paper count, decade counts.
pub const NODE_FEATURES: usize = 3 + NUM_FIELDS + 1 + NUM_DECADES;
/// Per-pair entries: shared-paper decade fractions, common coauthors, and
/// each author's share of papers in the other's major field.
pub const EDGE_FEATURES: usize = NUM_DECADES + 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureMode {
    N,
    E,
    NE,
    NEB,
    NEBC,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 5] = [Self::N, Self::E, Self::NE, Self::NEB, Self::NEBC];

    /// Feature vector length.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            Self::N => 2 * NODE_FEATURES,
            Self::E => EDGE_FEATURES,
            Self::NE => 2 * NODE_FEATURES + EDGE_FEATURES,
            Self::NEB => 2 * NODE_FEATURES + EDGE_FEATURES + 1,
            Self::NEBC => 2 * NODE_FEATURES + EDGE_FEATURES + 2,
        }
    }

    pub fn uses_circles(self) -> bool {
        matches!(self, Self::NEB | Self::NEBC)
    }

    fn has_nodes(self) -> bool {
        !matches!(self, Self::E)
    }

    fn has_edges(self) -> bool {
        !matches!(self, Self::N)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::N => "N",
            Self::E => "E",
            Self::NE => "NE",
            Self::NEB => "NEB",
            Self::NEBC => "NEBC",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown feature mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: i32,
    /// Inclusive test window.
    pub window: (i32, i32),
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.window.0 <= self.train_end {
            return Err(Error::InvalidParameter(format!(
                "test window {}:{} must start after {}",
                self.window.0, self.window.1, self.train_end
            )));
        }
        if self.window.1 < self.window.0 {
            return Err(Error::InvalidParameter("test window is reversed".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TemporalSplit {
    pub train: PaperCorpus,
    pub graph: CoauthorGraph,
    /// Pairs of training authors that first coauthor inside the window.
    pub new_edges: BTreeSet<(usize, usize)>,
    /// New edges that are also candidates.
    pub positives: BTreeSet<(usize, usize)>,
    /// Distance-2 targets of every node, ascending.
    pub candidates: Vec<Vec<usize>>,
}

impl TemporalSplit {
    pub fn is_candidate(&self, u: usize, v: usize) -> bool {
        self.candidates[u].binary_search(&v).is_ok()
    }

    /// Unordered candidate pairs `(lo, hi)` in ascending order.
    pub fn candidate_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.candidates
            .iter()
            .enumerate()
            .flat_map(|(u, c)| c.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}

fn distance_two(graph: &CoauthorGraph, u: usize) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for v in graph.neighbors(u) {
        for w in graph.neighbors(v) {
            if w != u && !graph.has_edge(u, w) {
                out.insert(w);
            }
        }
    }
    out.into_iter().collect()
}

pub fn temporal_split(corpus: &PaperCorpus, spec: &SplitSpec) -> Result<TemporalSplit> {
    spec.validate()?;
    let train = corpus.snapshot(spec.train_end)?;
    let graph = CoauthorGraph::from_corpus(&train);
    if graph.edge_count() == 0 {
        return Err(Error::Degenerate(format!("no coauthorships up to {}", spec.train_end)));
    }
    let candidates: Vec<Vec<usize>> = (0..graph.node_count()).map(|u| distance_two(&graph, u)).collect();
    let mut new_edges = BTreeSet::new();
    for p in corpus.papers() {
        if p.year < spec.window.0 || p.year > spec.window.1 {
            continue;
        }
        let ids: Vec<usize> = p.author_ids.iter().filter_map(|a| graph.index_of(a)).collect();
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                if !graph.has_edge(x, y) {
                    new_edges.insert((x.min(y), x.max(y)));
                }
            }
        }
    }
    let positives = new_edges
        .iter()
        .copied()
        .filter(|&(u, v)| candidates[u].binary_search(&v).is_ok())
        .collect();
    Ok(TemporalSplit {
        train,
        graph,
        new_edges,
        positives,
        candidates,
    })
}

/// Builds feature vectors for author pairs of one snapshot.
pub struct PairFeaturizer<'s, 'c> {
    stats: &'s CorpusStats<'c>,
    circles: Option<&'s CircleIndex>,
    mode: FeatureMode,
}

impl<'s, 'c> PairFeaturizer<'s, 'c> {
    pub fn new(stats: &'s CorpusStats<'c>, mode: FeatureMode, circles: Option<&'s CircleIndex>) -> Result<Self> {
        if mode.uses_circles() && circles.is_none() {
            return Err(Error::MissingCircles(format!("mode {mode} needs detected circles")));
        }
        Ok(Self { stats, circles, mode })
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    fn node(&self, i: usize, out: &mut Vec<f64>) {
        let s = self.stats.author(i);
        let n = self.stats.norms();
        out.push(scaled(s.citations as f64, n.max_citations));
        out.push(scaled(s.h_index as f64, n.max_h_index));
        out.push(scaled(s.coauthors as f64, n.max_coauthors));
        out.extend_from_slice(&s.versatility().0);
        out.push(scaled(s.paper_count() as f64, n.max_papers));
        out.extend_from_slice(&self.stats.persistence(i).0);
    }

    fn edge(&self, lo: usize, hi: usize, out: &mut Vec<f64>) {
        let (decades, _) = self.stats.shared_fractions(lo, hi);
        out.extend_from_slice(&decades);
        let common = self.stats.graph().common_neighbors(lo, hi) as f64;
        out.push(scaled(common, self.stats.norms().max_common_coauthors).min(1.0));
        let (a, b) = (self.stats.author(lo), self.stats.author(hi));
        out.push(a.fraction_in_field(b.major_field()));
        out.push(b.fraction_in_field(a.major_field()));
    }

    /// Features of the unordered pair `{x, y}`; endpoints are taken in
    /// ascending id order.
    pub fn features(&self, x: usize, y: usize) -> Vec<f64> {
        let (lo, hi) = (x.min(y), x.max(y));
        let mut out = Vec::with_capacity(self.mode.len());
        if self.mode.has_nodes() {
            self.node(lo, &mut out);
            self.node(hi, &mut out);
        }
        if self.mode.has_edges() {
            self.edge(lo, hi, &mut out);
        }
        if self.mode.uses_circles() {
            let idx = self.circles.expect("checked in new");
            let common = idx.common(lo, hi);
            out.push(if common > 0 { 1.0 } else { 0.0 });
            if self.mode == FeatureMode::NEBC {
                out.push(scaled(common as f64, idx.max_common() as f64));
            }
        }
        debug_assert_eq!(out.len(), self.mode.len());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSample {
    pub source: usize,
    pub target: usize,
    pub features: Vec<f64>,
    pub label: bool,
}

/// Labeled pairs `(lo, hi, label)` split into training and held-out halves.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSplit {
    pub train: Vec<(usize, usize, bool)>,
    pub test: Vec<(usize, usize, bool)>,
}

/// Draw `negatives_per_positive` negatives per positive from the
/// candidates, then hold out `test_fraction` of each class.
pub fn sample_pairs(split: &TemporalSplit, negatives_per_positive: usize, test_fraction: f64, rng: &mut ChaCha8Rng) -> Result<SampleSplit> {
    if split.positives.is_empty() {
        return Err(Error::Degenerate("no new collaborations among candidates".into()));
    }
    if !(0.0 < test_fraction && test_fraction < 1.0) {
        return Err(Error::InvalidParameter("test_fraction must lie in (0, 1)".into()));
    }
    let pool: Vec<(usize, usize)> = split
        .candidate_pairs()
        .filter(|p| !split.positives.contains(p))
        .collect();
    let want = (negatives_per_positive * split.positives.len()).min(pool.len());
    if want == 0 {
        return Err(Error::Degenerate("no negative candidates".into()));
    }
    let mut negatives: Vec<(usize, usize)> = sample(rng, pool.len(), want).into_iter().map(|i| pool[i]).collect();
    negatives.sort_unstable();
    let mut positives: Vec<(usize, usize)> = split.positives.iter().copied().collect();

    let mut out = SampleSplit {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (pairs, label) in [(&mut positives, true), (&mut negatives, false)] {
        pairs.shuffle(rng);
        if pairs.len() < 2 {
            return Err(Error::Degenerate("each class needs a training and a held-out pair".into()));
        }
        let held = ((pairs.len() as f64 * test_fraction).round() as usize).clamp(1, pairs.len() - 1);
        for (i, &(u, v)) in pairs.iter().enumerate() {
            let bucket = if i < held { &mut out.test } else { &mut out.train };
            bucket.push((u, v, label));
        }
    }
    out.train.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

pub fn featurize(f: &PairFeaturizer<'_, '_>, pairs: &[(usize, usize, bool)]) -> Vec<PairSample> {
    pairs
        .par_iter()
        .map(|&(u, v, label)| PairSample {
            source: u,
            target: v,
            features: f.features(u, v),
            label,
        })
        .collect()
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 2000,
            l2: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        logistic(self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
    }
}

/// L2-regularized logistic regression by full-batch gradient descent from
/// zero weights. The bias is not regularized.
pub fn train_lr(samples: &[PairSample], config: &LrConfig) -> Result<LogisticModel> {
    let pos = samples.iter().filter(|s| s.label).count();
    if pos == 0 || pos == samples.len() {
        return Err(Error::Degenerate("training samples need both classes".into()));
    }
    let d = samples[0].features.len();
    if let Some(s) = samples.iter().find(|s| s.features.len() != d) {
        return Err(Error::LengthMismatch {
            left: s.features.len(),
            right: d,
        });
    }
    let n = samples.len() as f64;
    let mut model = LogisticModel {
        weights: vec![0.0; d],
        bias: 0.0,
    };
    let mut grad = vec![0.0; d];
    for _ in 0..config.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for s in samples {
            let err = model.score(&s.features) - if s.label { 1.0 } else { 0.0 };
            gb += err;
            for (g, v) in grad.iter_mut().zip(&s.features) {
                *g += err * v;
            }
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w -= config.learning_rate * (g / n + config.l2 * *w);
        }
        model.bias -= config.learning_rate * gb / n;
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrwConfig {
    /// Restart probability.
    pub alpha: f64,
    pub tolerance: f64,
    pub max_walk_iterations: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Margin of the squared hinge on normalized score differences.
    pub margin: f64,
    /// Finite-difference step.
    pub step: f64,
    /// Training sources kept per run.
    pub max_sources: usize,
}

impl Default for SrwConfig {
    fn default() -> Self {
        Self {
            alpha: 0.15,
            tolerance: 1e-9,
            max_walk_iterations: 500,
            learning_rate: 0.5,
            epochs: 25,
            l2: 1e-3,
            margin: 0.1,
            step: 1e-4,
            max_sources: 40,
        }
    }
}

/// Adjacency with a feature vector per undirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkGraph {
    adj: Vec<Vec<(usize, usize)>>,
    psi: Vec<Vec<f64>>,
}

impl WalkGraph {
    pub fn new(graph: &CoauthorGraph, edge_features: impl Fn(usize, usize) -> Vec<f64> + Sync) -> Self {
        let edges: Vec<(usize, usize)> = graph.edges().map(|(u, v, _)| (u, v)).collect();
        let psi: Vec<Vec<f64>> = edges.par_iter().map(|&(u, v)| edge_features(u, v)).collect();
        Self::from_edges(graph.node_count(), &edges, psi)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)], psi: Vec<Vec<f64>>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        Self { adj, psi }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn dim(&self) -> usize {
        self.psi.first().map_or(0, Vec::len)
    }
}

/// Stationary distribution of a walk from `source` that restarts with
/// probability `alpha` and otherwise follows edges in proportion to
/// `logistic(w . psi)`. Nodes without edges send their mass back to the
/// source.
pub fn srw_score(g: &WalkGraph, w: &[f64], source: usize, config: &SrwConfig) -> Vec<f64> {
    let n = g.node_count();
    let strength: Vec<f64> = g
        .psi
        .iter()
        .map(|x| logistic(w.iter().zip(x).map(|(a, b)| a * b).sum()))
        .collect();
    let totals: Vec<f64> = g
        .adj
        .iter()
        .map(|nb| nb.iter().map(|&(_, e)| strength[e]).sum())
        .collect();
    let mut p = vec![0.0; n];
    p[source] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..config.max_walk_iterations {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut back = config.alpha;
        for u in 0..n {
            let mass = (1.0 - config.alpha) * p[u];
            if mass == 0.0 {
                continue;
            }
            if totals[u] > 0.0 {
                for &(v, e) in &g.adj[u] {
                    next[v] += mass * strength[e] / totals[u];
                }
            } else {
                back += mass;
            }
        }
        next[source] += back;
        let delta = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut p, &mut next);
        if delta < config.tolerance {
            break;
        }
    }
    p
}

/// Positive and negative targets of one training source.
#[derive(Debug, Clone, PartialEq)]
pub struct SrwTarget {
    pub source: usize,
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrwModel {
    pub weights: Vec<f64>,
    pub loss_trace: Vec<f64>,
}

/// Regularized squared hinge over every (negative, positive) pair of each
/// source, on score differences normalized by their sum.
pub fn srw_loss(g: &WalkGraph, w: &[f64], targets: &[SrwTarget], config: &SrwConfig) -> f64 {
    let per_source: Vec<f64> = targets
        .par_iter()
        .map(|t| {
            let p = srw_score(g, w, t.source, config);
            let mut loss = 0.0;
            for &d in &t.negatives {
                for &l in &t.positives {
                    let sum = p[d] + p[l];
                    let x = if sum > 0.0 { (p[d] - p[l]) / sum } else { 0.0 };
                    let h = (x + config.margin).max(0.0);
                    loss += h * h;
                }
            }
            loss
        })
        .collect();
    per_source.iter().sum::<f64>() + config.l2 * w.iter().map(|x| x * x).sum::<f64>()
}

/// Gradient descent on [`srw_loss`] with forward-difference gradients.
pub fn srw_train(g: &WalkGraph, targets: &[SrwTarget], config: &SrwConfig, initial: Vec<f64>) -> Result<SrwModel> {
    if targets.is_empty() || targets.iter().any(|t| t.positives.is_empty() || t.negatives.is_empty()) {
        return Err(Error::Degenerate("every training source needs positive and negative targets".into()));
    }
    if initial.len() != g.dim() {
        return Err(Error::LengthMismatch {
            left: initial.len(),
            right: g.dim(),
        });
    }
    let pairs: usize = targets.iter().map(|t| t.positives.len() * t.negatives.len()).sum();
    let norm = pairs as f64;
    let mut w = initial;
    let mut loss = srw_loss(g, &w, targets, config) / norm;
    let mut trace = vec![loss];
    for _ in 0..config.epochs {
        let grad: Vec<f64> = (0..w.len())
            .into_par_iter()
            .map(|j| {
                let mut probe = w.clone();
                probe[j] += config.step;
                (srw_loss(g, &probe, targets, config) / norm - loss) / config.step
            })
            .collect();
        for (wj, gj) in w.iter_mut().zip(&grad) {
            *wj -= config.learning_rate * gj;
        }
        loss = srw_loss(g, &w, targets, config) / norm;
        trace.push(loss);
    }
    Ok(SrwModel {
        weights: w,
        loss_trace: trace,
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half, from the rank-sum statistic.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Degenerate("AUC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]].total_cmp(&scores[order[i]]).is_eq() {
            j += 1;
        }
        // 1-based ranks i+1..=j+1 share their average.
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum += avg * order[i..=j].iter().filter(|&&k| labels[k]).count() as f64;
        i = j + 1;
    }
    let (p, q) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// Mean over sources of the fraction of the top `k` that are relevant. Each
/// ranking lists relevance flags in rank order; a source with fewer than
/// `k` candidates is scored over all of them.
pub fn prec_at_k(rankings: &[Vec<bool>], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if rankings.is_empty() {
        return Err(Error::Degenerate("no sources to rank".into()));
    }
    let mut total = 0.0;
    for r in rankings {
        if r.is_empty() {
            return Err(Error::Degenerate("source with no candidates".into()));
        }
        let top = k.min(r.len());
        total += r[..top].iter().filter(|&&x| x).count() as f64 / top as f64;
    }
    Ok(total / rankings.len() as f64)
}

/// Rank `candidates` by descending score, lower index first on ties, and
/// flag the relevant ones.
pub fn rank_candidates(candidates: &[usize], scores: &[f64], relevant: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(candidates[a].cmp(&candidates[b])));
    order.into_iter().map(|i| relevant(candidates[i])).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lr,
    Srw,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lr => "lr",
            Self::Srw => "srw",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(Self::Lr),
            "srw" => Ok(Self::Srw),
            _ => Err(Error::InvalidParameter(format!("unknown model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictConfig {
    pub split: SplitSpec,
    pub mode: FeatureMode,
    pub model: ModelKind,
    pub seed: u64,
    pub negatives_per_positive: usize,
    pub test_fraction: f64,
    pub k: usize,
    pub lr: LrConfig,
    pub srw: SrwConfig,
}

impl PredictConfig {
    pub fn new(split: SplitSpec, mode: FeatureMode, model: ModelKind, seed: u64) -> Self {
        Self {
            split,
            mode,
            model,
            seed,
            negatives_per_positive: 5,
            test_fraction: 0.5,
            k: 20,
            lr: LrConfig::default(),
            srw: SrwConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub mode: FeatureMode,
    pub model: ModelKind,
    pub auc: f64,
    pub prec_at_k: f64,
    pub k: usize,
    pub new_edges: usize,
    pub positives: usize,
    pub candidate_pairs: usize,
    pub train_positives: usize,
    pub train_negatives: usize,
    pub test_positives: usize,
    pub test_negatives: usize,
    pub sources_ranked: usize,
    pub weights: Vec<f64>,
    pub bias: Option<f64>,
    pub final_loss: Option<f64>,
}

fn count(pairs: &[(usize, usize, bool)], label: bool) -> usize {
    pairs.iter().filter(|p| p.2 == label).count()
}

enum Scorer {
    Lr(LogisticModel),
    Srw { graph: WalkGraph, weights: Vec<f64> },
}

/// Split, sample, train on one half of the labeled pairs and evaluate on
/// the other. Prec@k ranks, for every source with a held-out positive, all
/// of its candidates that were not used for training.
pub fn run_prediction(corpus: &PaperCorpus, config: &PredictConfig, circles: Option<&[EgoCircles]>) -> Result<PredictionReport> {
    let split = temporal_split(corpus, &config.split)?;
    let stats = CorpusStats::new(&split.train);
    let index = match circles {
        Some(c) if config.mode.uses_circles() => Some(CircleIndex::new(stats.graph(), c)?),
        _ => None,
    };
    let featurizer = PairFeaturizer::new(&stats, config.mode, index.as_ref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples = sample_pairs(&split, config.negatives_per_positive, config.test_fraction, &mut rng)?;

    let (scorer, bias, final_loss) = match config.model {
        ModelKind::Lr => {
            let model = train_lr(&featurize(&featurizer, &samples.train), &config.lr)?;
            let bias = model.bias;
            (Scorer::Lr(model), Some(bias), None)
        }
        ModelKind::Srw => {
            let graph = WalkGraph::new(&split.graph, |u, v| featurizer.features(u, v));
            let mut by_source: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
            for &(u, v, label) in &samples.train {
                for (s, t) in [(u, v), (v, u)] {
                    let e = by_source.entry(s).or_default();
                    if label { e.0.push(t) } else { e.1.push(t) }
                }
            }
            let mut targets: Vec<SrwTarget> = by_source
                .into_iter()
                .filter(|(_, (p, n))| !p.is_empty() && !n.is_empty())
                .map(|(source, (positives, negatives))| SrwTarget {
                    source,
                    positives,
                    negatives,
                })
                .collect();
            if targets.len() > config.srw.max_sources {
                let mut keep: Vec<usize> = sample(&mut rng, targets.len(), config.srw.max_sources).into_vec();
                keep.sort_unstable();
                targets = keep.into_iter().map(|i| targets[i].clone()).collect();
            }
            let model = srw_train(&graph, &targets, &config.srw, vec![0.0; config.mode.len()])?;
            let loss = model.loss_trace.last().copied();
            (
                Scorer::Srw {
                    graph,
                    weights: model.weights,
                },
                None,
                loss,
            )
        }
    };

    let mut sources: BTreeSet<usize> = BTreeSet::new();
    for &(u, v, label) in &samples.test {
        if label {
            sources.insert(u);
            sources.insert(v);
        }
    }
    let walks: BTreeMap<usize, Vec<f64>> = match &scorer {
        Scorer::Srw { graph, weights } => {
            let mut starts: BTreeSet<usize> = sources.clone();
            starts.extend(samples.test.iter().map(|p| p.0));
            let starts: Vec<usize> = starts.into_iter().collect();
            starts
                .par_iter()
                .map(|&s| (s, srw_score(graph, weights, s, &config.srw)))
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        }
        Scorer::Lr(_) => BTreeMap::new(),
    };
    let score = |s: usize, t: usize| -> f64 {
        match &scorer {
            Scorer::Lr(m) => m.score(&featurizer.features(s, t)),
            Scorer::Srw { .. } => walks[&s][t],
        }
    };

    let test_scores: Vec<f64> = samples.test.par_iter().map(|&(u, v, _)| score(u, v)).collect();
    let labels: Vec<bool> = samples.test.iter().map(|p| p.2).collect();
    let auc_value = auc(&test_scores, &labels)?;

    let trained: BTreeSet<(usize, usize)> = samples.train.iter().map(|&(u, v, _)| (u, v)).collect();
    let sources: Vec<usize> = sources.into_iter().collect();
    let rankings: Vec<Vec<bool>> = sources
        .par_iter()
        .map(|&s| {
            let cands: Vec<usize> = split.candidates[s]
                .iter()
                .copied()
                .filter(|&t| !trained.contains(&(s.min(t), s.max(t))))
                .collect();
            let scores: Vec<f64> = cands.iter().map(|&t| score(s, t)).collect();
            rank_candidates(&cands, &scores, |t| split.positives.contains(&(s.min(t), s.max(t))))
        })
        .collect();
    let prec = prec_at_k(&rankings, config.k)?;

    let weights = match &scorer {
        Scorer::Lr(m) => m.weights.clone(),
        Scorer::Srw { weights, .. } => weights.clone(),
    };
    Ok(PredictionReport {
        mode: config.mode,
        model: config.model,
        auc: auc_value,
        prec_at_k: prec,
        k: config.k,
        new_edges: split.new_edges.len(),
        positives: split.positives.len(),
        candidate_pairs: split.candidate_pairs().count(),
        train_positives: count(&samples.train, true),
        train_negatives: count(&samples.train, false),
        test_positives: count(&samples.test, true),
        test_negatives: count(&samples.test, false),
        sources_ranked: rankings.len(),
        weights,
        bias,
        final_loss,
    })
}
