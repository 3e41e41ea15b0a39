//! Synthetic ego networks and corpora with planted circles.
//!
//! Ego-level fixtures are generated directly in profile space: each planted
//! circle gets a centroid in the unit cube and its members scatter around
//! it. Corpus-level fixtures (for link prediction) are generated as papers
//! so the whole feature pipeline runs on them.

use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusConfig, PaperCorpus, PaperRecord, NUM_FIELDS};
use crate::ego::EgoNetwork;
use crate::error::{Error, Result};
use crate::profiles::{ProfileVector, PROFILE_DIM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedEgoSpec {
    pub circle_sizes: Vec<usize>,
    /// Fraction of each circle (after the first) shared with its predecessor.
    pub overlap: f64,
    pub p_in: f64,
    pub p_out: f64,
    pub sigma_within: f64,
    pub sigma_between: f64,
    pub seed: u64,
}

impl Default for PlantedEgoSpec {
    fn default() -> Self {
        Self {
            circle_sizes: vec![10, 10, 10],
            overlap: 0.0,
            p_in: 0.8,
            p_out: 0.05,
            sigma_within: 0.02,
            sigma_between: 0.3,
            seed: 0,
        }
    }
}

impl PlantedEgoSpec {
    pub fn validate(&self) -> Result<()> {
        if self.circle_sizes.is_empty() {
            return Err(Error::InvalidParameter("no planted circles".into()));
        }
        if self.circle_sizes.iter().any(|&s| s < 2) {
            return Err(Error::InvalidParameter("planted circle sizes must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::InvalidParameter("overlap must lie in [0, 1)".into()));
        }
        if !(0.0 <= self.p_out && self.p_out < self.p_in && self.p_in <= 1.0) {
            return Err(Error::InvalidParameter("need 0 <= p_out < p_in <= 1".into()));
        }
        if self.sigma_within < 0.0 || self.sigma_between < 0.0 {
            return Err(Error::InvalidParameter("negative spread".into()));
        }
        Ok(())
    }

    /// Members shared between circle `i` and circle `i - 1`.
    pub fn shared_count(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        let smaller = self.circle_sizes[i].min(self.circle_sizes[i - 1]);
        (self.overlap * smaller as f64).floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedTruth {
    /// Member lists (local alter indices, ascending).
    pub circles: Vec<Vec<usize>>,
    pub spec: PlantedEgoSpec,
}

/// A planted ego network with per-alter profiles.
#[derive(Debug, Clone)]
pub struct PlantedEgo {
    pub network: EgoNetwork,
    pub profiles: Vec<ProfileVector>,
    pub truth: PlantedTruth,
}

fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

fn gauss<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        let z: f64 = StandardNormal.sample(rng);
        sigma * z
    } else {
        0.0
    }
}

pub fn generate_ego(spec: &PlantedEgoSpec) -> Result<PlantedEgo> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut circles: Vec<Vec<usize>> = Vec::with_capacity(spec.circle_sizes.len());
    let mut next_node = 0usize;
    for (i, &size) in spec.circle_sizes.iter().enumerate() {
        let shared = spec.shared_count(i);
        if shared >= size {
            return Err(Error::InvalidParameter(format!(
                "circle {i} would have no members of its own"
            )));
        }
        let mut members: Vec<usize> = match circles.last() {
            Some(prev) => prev[prev.len() - shared..].to_vec(),
            None => Vec::new(),
        };
        members.extend(next_node..next_node + size - shared);
        next_node += size - shared;
        circles.push(members);
    }
    let n = next_node;

    let centroids: Vec<Vec<f64>> = circles
        .iter()
        .map(|_| {
            (0..PROFILE_DIM)
                .map(|_| clip01(0.5 + gauss(&mut rng, spec.sigma_between)))
                .collect()
        })
        .collect();

    let mut homes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, members) in circles.iter().enumerate() {
        for &m in members {
            homes[m].push(c);
        }
    }
    let profiles: Vec<ProfileVector> = homes
        .iter()
        .map(|home| {
            let centre: Vec<f64> = (0..PROFILE_DIM)
                .map(|d| home.iter().map(|&c| centroids[c][d]).sum::<f64>() / home.len() as f64)
                .collect();
            ProfileVector(
                centre
                    .iter()
                    .map(|&c| clip01(c + gauss(&mut rng, spec.sigma_within)))
                    .collect(),
            )
        })
        .collect();

    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let together = homes[x].iter().any(|c| homes[y].contains(c));
            let p = if together { spec.p_in } else { spec.p_out };
            if rng.random_bool(p) {
                edges.push((x, y));
            }
        }
    }
    let alters = (0..n).map(|i| format!("v{i:04}")).collect();
    let network = EgoNetwork::new("ego", alters, &edges)?;
    Ok(PlantedEgo {
        network,
        profiles,
        truth: PlantedTruth {
            circles,
            spec: spec.clone(),
        },
    })
}

/// Parameters of a synthetic paper corpus whose authors belong to planted
/// communities. Each community publishes in one field during one half of
/// the training period; communities `2f` and `2f + 1` share field `f` and
/// differ only in era. Papers in the test window each introduce one new
/// pair, drawn from inside a community with probability `signal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalCorpusSpec {
    pub authors: usize,
    pub communities: usize,
    /// Fraction of authors that also join a second community.
    pub second_community: f64,
    pub train_papers: usize,
    pub test_papers: usize,
    pub max_authors_per_paper: usize,
    /// Probability that a training paper adds one author from outside the
    /// community.
    pub outsider_rate: f64,
    /// Probability that a paper is filed under its community's field.
    pub field_fidelity: f64,
    pub train_start: i32,
    pub train_end: i32,
    pub window: (i32, i32),
    pub signal: f64,
    pub mean_citations: f64,
    pub seed: u64,
}

impl Default for TemporalCorpusSpec {
    fn default() -> Self {
        Self {
            authors: 200,
            communities: 10,
            second_community: 0.6,
            train_papers: 800,
            test_papers: 250,
            max_authors_per_paper: 4,
            outsider_rate: 0.1,
            field_fidelity: 0.2,
            train_start: 1981,
            train_end: 1995,
            window: (1996, 1999),
            signal: 0.9,
            mean_citations: 6.0,
            seed: 0,
        }
    }
}

impl TemporalCorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let config = CorpusConfig::default();
        if self.communities == 0 || self.authors < 2 * self.communities {
            return Err(Error::InvalidParameter("need at least two authors per community".into()));
        }
        if self.max_authors_per_paper < 2 {
            return Err(Error::InvalidParameter("papers need room for two authors".into()));
        }
        for (name, p) in [
            ("second_community", self.second_community),
            ("outsider_rate", self.outsider_rate),
            ("field_fidelity", self.field_fidelity),
            ("signal", self.signal),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(config.year_min <= self.train_start
            && self.train_start < self.train_end
            && self.train_end < self.window.0
            && self.window.0 <= self.window.1
            && self.window.1 <= config.year_max)
        {
            return Err(Error::InvalidParameter("years must satisfy start < train_end < window within the corpus range".into()));
        }
        if self.mean_citations <= 0.0 {
            return Err(Error::InvalidParameter("mean_citations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalCorpus {
    pub corpus: PaperCorpus,
    /// Author ids per planted community, ascending.
    pub communities: Vec<Vec<String>>,
}

fn author_id(i: usize) -> String {
    format!("a{i:04}")
}

pub fn generate_temporal_corpus(spec: &TemporalCorpusSpec) -> Result<TemporalCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.communities;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut home: Vec<Vec<usize>> = vec![Vec::new(); spec.authors];
    for a in 0..spec.authors {
        let c = a % k;
        members[c].push(a);
        home[a].push(c);
        if k > 1 && rng.random_bool(spec.second_community) {
            let other = (c + rng.random_range(1..k)) % k;
            members[other].push(a);
            home[a].push(other);
        }
    }
    for m in &mut members {
        m.sort_unstable();
    }

    let mid = spec.train_start + (spec.train_end - spec.train_start) / 2;
    let era = |c: usize| if c.is_multiple_of(2) { (spec.train_start, mid) } else { (mid + 1, spec.train_end) };
    let field_of = |c: usize| (c / 2) % NUM_FIELDS;
    let citations = Poisson::new(spec.mean_citations).map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let mut papers = Vec::with_capacity(spec.train_papers + spec.test_papers);
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let push = |rng: &mut ChaCha8Rng, papers: &mut Vec<PaperRecord>, year: i32, field: usize, authors: &[usize]| {
        let cites: f64 = citations.sample(rng);
        papers.push(PaperRecord {
            paper_id: format!("p{:05}", papers.len()),
            year,
            field_id: field,
            citation_count: cites as u64,
            author_ids: authors.iter().map(|&a| author_id(a)).collect(),
        });
    };
    let pick_field = |rng: &mut ChaCha8Rng, c: usize| {
        if rng.random_bool(spec.field_fidelity) {
            field_of(c)
        } else {
            rng.random_range(0..NUM_FIELDS)
        }
    };

    for _ in 0..spec.train_papers {
        let c = rng.random_range(0..k);
        let (lo, hi) = era(c);
        let year = rng.random_range(lo..=hi);
        let size = rng.random_range(2..=spec.max_authors_per_paper).min(members[c].len());
        let mut authors: Vec<usize> = members[c].choose_multiple(&mut rng, size).copied().collect();
        if rng.random_bool(spec.outsider_rate) {
            let outsider = rng.random_range(0..spec.authors);
            if !authors.contains(&outsider) {
                authors.push(outsider);
            }
        }
        for (i, &x) in authors.iter().enumerate() {
            for &y in &authors[i + 1..] {
                edges.insert((x.min(y), x.max(y)));
            }
        }
        let field = pick_field(&mut rng, c);
        push(&mut rng, &mut papers, year, field, &authors);
    }

    const ATTEMPTS: usize = 64;
    for _ in 0..spec.test_papers {
        let year = rng.random_range(spec.window.0..=spec.window.1);
        let (pair, field) = if rng.random_bool(spec.signal) {
            let c = rng.random_range(0..k);
            let mut pair = (0, 0);
            for _ in 0..ATTEMPTS {
                let two: Vec<usize> = members[c].choose_multiple(&mut rng, 2).copied().collect();
                pair = (two[0].min(two[1]), two[0].max(two[1]));
                if !edges.contains(&pair) {
                    break;
                }
            }
            (pair, pick_field(&mut rng, c))
        } else {
            let mut pair = (0, 0);
            for _ in 0..ATTEMPTS {
                let x = rng.random_range(0..spec.authors);
                let y = rng.random_range(0..spec.authors);
                if x != y {
                    pair = (x.min(y), x.max(y));
                    if !edges.contains(&pair) {
                        break;
                    }
                }
            }
            (pair, rng.random_range(0..NUM_FIELDS))
        };
        if pair.0 == pair.1 {
            continue;
        }
        edges.insert(pair);
        push(&mut rng, &mut papers, year, field, &[pair.0, pair.1]);
    }

    let corpus = PaperCorpus::new(papers, CorpusConfig::default())?;
    Ok(TemporalCorpus {
        corpus,
        communities: members
            .iter()
            .map(|m| m.iter().map(|&a| author_id(a)).collect())
            .collect(),
    })
}

fn f1(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let inter = a.iter().filter(|x| b.contains(x)).count() as f64;
    2.0 * inter / (a.len() + b.len()) as f64
}

fn one_sided_f1(from: &[Vec<usize>], to: &[Vec<usize>]) -> f64 {
    from.iter()
        .map(|c| to.iter().map(|d| f1(c, d)).fold(0.0, f64::max))
        .sum::<f64>()
        / from.len() as f64
}

/// Symmetrized best-match F1 between two covers.
pub fn best_match_f1(detected: &[Vec<usize>], truth: &[Vec<usize>]) -> f64 {
    if detected.is_empty() || truth.is_empty() {
        return 0.0;
    }
    0.5 * (one_sided_f1(truth, detected) + one_sided_f1(detected, truth))
}

/// Omega index: chance-adjusted agreement on how many circles each pair of
/// the `n` nodes shares.
pub fn omega_index(a: &[Vec<usize>], b: &[Vec<usize>], n: usize) -> f64 {
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs == 0 {
        return 1.0;
    }
    let counts = |cover: &[Vec<usize>]| {
        let mut m = vec![0u32; n * n];
        for c in cover {
            for (i, &x) in c.iter().enumerate() {
                for &y in &c[i + 1..] {
                    let (lo, hi) = (x.min(y), x.max(y));
                    m[lo * n + hi] += 1;
                }
            }
        }
        m
    };
    let (ca, cb) = (counts(a), counts(b));
    let mut agree = 0usize;
    let mut hist_a: BTreeMap<u32, usize> = BTreeMap::new();
    let mut hist_b: BTreeMap<u32, usize> = BTreeMap::new();
    for x in 0..n {
        for y in x + 1..n {
            let (ta, tb) = (ca[x * n + y], cb[x * n + y]);
            if ta == tb {
                agree += 1;
            }
            *hist_a.entry(ta).or_default() += 1;
            *hist_b.entry(tb).or_default() += 1;
        }
    }
    let m = pairs as f64;
    let observed = agree as f64 / m;
    let expected: f64 = hist_a
        .iter()
        .map(|(t, &na)| na as f64 * hist_b.get(t).copied().unwrap_or(0) as f64)
        .sum::<f64>()
        / (m * m);
    if (1.0 - expected).abs() < 1e-15 {
        return if observed == 1.0 { 1.0 } else { 0.0 };
    }
    (observed - expected) / (1.0 - expected)
}

/// `(best-match F1, omega index)` of `detected` against `truth` over `n` alters.
pub fn recovery_score(detected: &[Vec<usize>], truth: &PlantedTruth, n: usize) -> Result<(f64, f64)> {
    if detected.is_empty() || truth.circles.is_empty() {
        return Err(Error::InvalidParameter("recovery needs nonempty covers".into()));
    }
    Ok((
        best_match_f1(detected, &truth.circles),
        omega_index(detected, &truth.circles, n),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(sizes: &[usize]) -> PlantedEgoSpec {
        PlantedEgoSpec {
            circle_sizes: sizes.to_vec(),
            ..Default::default()
        }
    }

    #[test]
    fn disjoint_cliques_at_limits() {
        let s = PlantedEgoSpec {
            p_in: 1.0,
            p_out: 0.0,
            ..spec(&[4, 5])
        };
        let g = generate_ego(&s).unwrap();
        assert_eq!(g.network.len(), 9);
        assert_eq!(g.network.edge_count(), 6 + 10);
        assert!(!g.network.has_edge(0, 4));
    }

    #[test]
    fn zero_spread_gives_identical_profiles() {
        let s = PlantedEgoSpec {
            sigma_within: 0.0,
            ..spec(&[3, 3])
        };
        let g = generate_ego(&s).unwrap();
        assert_eq!(g.profiles[0], g.profiles[1]);
        let sim = crate::profiles::similarity(&g.profiles[0], &g.profiles[2]).unwrap();
        assert_eq!(sim, crate::profiles::SIM_CAP);
        assert_ne!(g.profiles[0], g.profiles[3]);
    }

    #[test]
    fn overlap_rounds_down() {
        let s = PlantedEgoSpec {
            overlap: 0.2,
            ..spec(&[10, 10])
        };
        let g = generate_ego(&s).unwrap();
        assert_eq!(g.network.len(), 18);
        let shared = g.truth.circles[0]
            .iter()
            .filter(|x| g.truth.circles[1].contains(x))
            .count();
        assert_eq!(shared, 2);
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_ego(&spec(&[5, 6])).unwrap();
        let b = generate_ego(&spec(&[5, 6])).unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.profiles, b.profiles);
        let c = generate_ego(&PlantedEgoSpec { seed: 1, ..spec(&[5, 6]) }).unwrap();
        assert_ne!(a.profiles, c.profiles);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_ego(&spec(&[1, 4])).is_err());
        assert!(generate_ego(&PlantedEgoSpec { p_in: 0.1, p_out: 0.2, ..spec(&[3]) }).is_err());
        assert!(generate_ego(&PlantedEgoSpec { overlap: 1.0, ..spec(&[3, 3]) }).is_err());
    }

    #[test]
    fn recovery_identity() {
        let truth = PlantedTruth {
            circles: vec![vec![0, 1, 2], vec![2, 3, 4, 5]],
            spec: spec(&[3, 4]),
        };
        let (f1, omega) = recovery_score(&truth.circles, &truth, 6).unwrap();
        assert_eq!(f1, 1.0);
        assert_eq!(omega, 1.0);
    }

    #[test]
    fn recovery_of_singletons_against_one_circle() {
        for s in [2usize, 5, 9] {
            let truth = PlantedTruth {
                circles: vec![(0..s).collect()],
                spec: spec(&[s]),
            };
            let singletons: Vec<Vec<usize>> = (0..s).map(|i| vec![i]).collect();
            let (f1, _) = recovery_score(&singletons, &truth, s).unwrap();
            // each singleton vs the s-set: 2 * 1 / (1 + s)
            assert_abs_diff_eq!(f1, 2.0 / (1.0 + s as f64), epsilon = 1e-12);
        }
    }

    #[test]
    fn recovery_disjoint_is_zero() {
        let truth = PlantedTruth {
            circles: vec![vec![0, 1]],
            spec: spec(&[2]),
        };
        let (f1, _) = recovery_score(&[vec![2, 3]], &truth, 4).unwrap();
        assert_eq!(f1, 0.0);
    }

    fn window_pairs(t: &TemporalCorpus, spec: &TemporalCorpusSpec) -> Vec<(String, String)> {
        t.corpus
            .papers()
            .iter()
            .filter(|p| p.year >= spec.window.0)
            .map(|p| (p.author_ids[0].clone(), p.author_ids[1].clone()))
            .collect()
    }

    fn same_community(t: &TemporalCorpus, x: &str, y: &str) -> bool {
        t.communities
            .iter()
            .any(|c| c.iter().any(|a| a == x) && c.iter().any(|a| a == y))
    }

    #[test]
    fn full_signal_keeps_test_edges_inside_communities() {
        let spec = TemporalCorpusSpec {
            signal: 1.0,
            ..Default::default()
        };
        let t = generate_temporal_corpus(&spec).unwrap();
        let pairs = window_pairs(&t, &spec);
        assert_eq!(pairs.len(), spec.test_papers);
        assert!(pairs.iter().all(|(x, y)| same_community(&t, x, y)));
    }

    #[test]
    fn zero_signal_ignores_communities() {
        let spec = TemporalCorpusSpec {
            signal: 0.0,
            test_papers: 400,
            ..Default::default()
        };
        let t = generate_temporal_corpus(&spec).unwrap();
        let pairs = window_pairs(&t, &spec);
        let intra = pairs.iter().filter(|(x, y)| same_community(&t, x, y)).count() as f64;
        // Null model: uniform over pairs that had not coauthored before.
        let mut before: HashSet<(&str, &str)> = HashSet::new();
        for p in t.corpus.papers().iter().filter(|p| p.year <= spec.train_end) {
            for x in &p.author_ids {
                for y in &p.author_ids {
                    before.insert((x, y));
                }
            }
        }
        let ids: Vec<String> = (0..spec.authors).map(author_id).collect();
        let (mut shared, mut total) = (0usize, 0usize);
        for (i, x) in ids.iter().enumerate() {
            for y in &ids[i + 1..] {
                if before.contains(&(x.as_str(), y.as_str())) {
                    continue;
                }
                total += 1;
                shared += same_community(&t, x, y) as usize;
            }
        }
        let base = shared as f64 / total as f64;
        let n = pairs.len() as f64;
        let sd = (base * (1.0 - base) / n).sqrt();
        assert!((intra / n - base).abs() < 4.0 * sd, "intra {} vs base {base}", intra / n);
    }

    #[test]
    fn temporal_corpus_is_seeded() {
        let spec = TemporalCorpusSpec::default();
        let bytes = |t: &TemporalCorpus| {
            let mut buf = Vec::new();
            t.corpus.write_to(&mut buf, crate::corpus::CorpusFormat::Csv).unwrap();
            buf
        };
        let a = generate_temporal_corpus(&spec).unwrap();
        let b = generate_temporal_corpus(&spec).unwrap();
        assert_eq!(bytes(&a), bytes(&b));
        let c = generate_temporal_corpus(&TemporalCorpusSpec { seed: 9, ..spec }).unwrap();
        assert_ne!(bytes(&a), bytes(&c));
    }

    #[test]
    fn temporal_spec_validation() {
        let bad = TemporalCorpusSpec {
            window: (1994, 1999),
            ..Default::default()
        };
        assert!(generate_temporal_corpus(&bad).is_err());
        let bad = TemporalCorpusSpec {
            signal: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn edge_density_within_binomial_bounds() {
        let s = PlantedEgoSpec {
            p_in: 0.6,
            p_out: 0.1,
            seed: 11,
            ..spec(&[20, 20, 20])
        };
        let g = generate_ego(&s).unwrap();
        let intra: f64 = 3.0 * 190.0;
        let cross: f64 = 1770.0 - intra;
        let mean = 0.6 * intra + 0.1 * cross;
        let sd = (0.6 * 0.4 * intra + 0.1 * 0.9 * cross).sqrt();
        let got = g.network.edge_count() as f64;
        assert!((got - mean).abs() <= 3.0 * sd, "{got} vs {mean} ± {}", 3.0 * sd);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_cover() -> impl Strategy<Value = Vec<Vec<usize>>> {
        proptest::collection::vec(proptest::sample::subsequence((0..10).collect::<Vec<_>>(), 1..6), 1..5)
    }

    proptest! {
        #[test]
        fn self_recovery_is_perfect(cover in arb_cover()) {
            prop_assert!((best_match_f1(&cover, &cover) - 1.0).abs() < 1e-12);
            prop_assert!((omega_index(&cover, &cover, 10) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn f1_is_symmetric(a in arb_cover(), b in arb_cover()) {
            prop_assert!((best_match_f1(&a, &b) - best_match_f1(&b, &a)).abs() < 1e-12);
        }
    }
}
