//! Author profile vectors and the distance/similarity primitives.
//!
//! A profile has 67 entries: 35 general features describing the alter on
//! its own, followed by 32 ego-centric features describing its relation to
//! the ego. Counts are divided by the maximum of the same quantity over
//! every author (or coauthoring pair) of the snapshot, so entries lie in
//! `[0, 1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CoauthorGraph, PaperCorpus, NUM_DECADES, NUM_FIELDS};
use crate::ego::EgoNetwork;
use crate::error::{Error, Result};

pub const PROFILE_DIM: usize = 67;
/// Distances below this are treated as this when taking reciprocals.
pub const SIM_EPS: f64 = 1e-6;
/// Similarity of identical profiles, `1 / SIM_EPS`.
pub const SIM_CAP: f64 = 1e6;

/// Offsets into the frozen profile layout.
pub mod layout {
    use super::{NUM_DECADES, NUM_FIELDS};

    pub const CITATIONS: usize = 0;
    pub const CITATIONS_PER_PAPER: usize = 1;
    pub const H_INDEX: usize = 2;
    pub const COAUTHOR_COUNT: usize = 3;
    pub const VERSATILITY: usize = 4;
    pub const PAPER_COUNT: usize = VERSATILITY + NUM_FIELDS;
    pub const PERSISTENCE: usize = PAPER_COUNT + 1;
    pub const MAJOR_FIELD: usize = PERSISTENCE + NUM_DECADES;
    pub const CO_DECADE: usize = MAJOR_FIELD + 1;
    pub const CO_FIELD: usize = CO_DECADE + NUM_DECADES;
    pub const COMMON_COAUTHORS: usize = CO_FIELD + NUM_FIELDS;
    pub const ALTER_IN_EGO_MAJOR: usize = COMMON_COAUTHORS + 1;
    pub const EGO_IN_ALTER_MAJOR: usize = ALTER_IN_EGO_MAJOR + 1;
    pub const GENERAL_LEN: usize = CO_DECADE;
    pub const LEN: usize = EGO_IN_ALTER_MAJOR + 1;
}

const _: () = assert!(layout::LEN == PROFILE_DIM);
const _: () = assert!(layout::GENERAL_LEN == 35);

/// Column names of the profile dump, in layout order.
pub fn column_names() -> Vec<String> {
    let mut cols = vec![
        "citations".to_string(),
        "citations_per_paper".into(),
        "h_index".into(),
        "coauthor_count".into(),
    ];
    cols.extend((0..NUM_FIELDS).map(|i| format!("versatility_{i}")));
    cols.push("paper_count".into());
    cols.extend((0..NUM_DECADES).map(|i| format!("persistence_{i}")));
    cols.push("major_field".into());
    cols.extend((0..NUM_DECADES).map(|i| format!("co_decade_{i}")));
    cols.extend((0..NUM_FIELDS).map(|i| format!("co_field_{i}")));
    cols.push("common_coauthors".into());
    cols.push("alter_in_ego_major".into());
    cols.push("ego_in_alter_major".into());
    cols
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileVector(pub Vec<f64>);

impl ProfileVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ProfileVector {
    fn from(v: Vec<f64>) -> Self {
        ProfileVector(v)
    }
}

/// Fraction of an author's papers in each field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VersatilityVector(pub [f64; NUM_FIELDS]);

/// Papers per decade bin divided by the snapshot-wide maximum for that bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceVector(pub [f64; NUM_DECADES]);

/// Largest `h` such that at least `h` papers have at least `h` citations.
pub fn h_index(citation_counts: &[u64]) -> u64 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &c)| c > i as u64)
        .count() as u64
}

pub fn distance(a: &ProfileVector, b: &ProfileVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(euclidean(a.values(), b.values()))
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Reciprocal distance, clamped so identical profiles map to [`SIM_CAP`].
#[inline]
pub fn similarity_from_distance(d: f64) -> f64 {
    if d <= SIM_EPS {
        SIM_CAP
    } else {
        1.0 / d
    }
}

pub fn similarity(a: &ProfileVector, b: &ProfileVector) -> Result<f64> {
    distance(a, b).map(similarity_from_distance)
}

fn argmax_lowest(counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

fn field_counts(corpus: &PaperCorpus, author: &str) -> Result<[u32; NUM_FIELDS]> {
    let mut counts = [0u32; NUM_FIELDS];
    let mut any = false;
    for p in corpus.papers() {
        if p.author_ids.iter().any(|a| a == author) {
            counts[p.field_id] += 1;
            any = true;
        }
    }
    if !any {
        return Err(Error::NoPapers(author.to_string()));
    }
    Ok(counts)
}

fn fractions<const N: usize>(counts: &[u32; N]) -> [f64; N] {
    let total: u32 = counts.iter().sum();
    let mut out = [0.0; N];
    if total > 0 {
        for (o, &c) in out.iter_mut().zip(counts) {
            *o = c as f64 / total as f64;
        }
    }
    out
}

pub fn versatility(corpus: &PaperCorpus, author: &str) -> Result<VersatilityVector> {
    field_counts(corpus, author).map(|c| VersatilityVector(fractions(&c)))
}

/// Field with the most papers; ties go to the lowest index.
pub fn major_field(corpus: &PaperCorpus, author: &str) -> Result<usize> {
    field_counts(corpus, author).map(|c| argmax_lowest(&c))
}

/// Per-author aggregates over a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorStats {
    /// Indices into the snapshot's paper list, ascending.
    pub papers: Vec<usize>,
    pub citations: u64,
    pub h_index: u64,
    pub coauthors: usize,
    pub field_counts: [u32; NUM_FIELDS],
    pub decade_counts: [u32; NUM_DECADES],
}

impl AuthorStats {
    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn citations_per_paper(&self) -> f64 {
        if self.papers.is_empty() {
            0.0
        } else {
            self.citations as f64 / self.papers.len() as f64
        }
    }

    pub fn major_field(&self) -> usize {
        argmax_lowest(&self.field_counts)
    }

    pub fn versatility(&self) -> VersatilityVector {
        VersatilityVector(fractions(&self.field_counts))
    }

    pub fn decade_fractions(&self) -> [f64; NUM_DECADES] {
        let mut out = [0.0; NUM_DECADES];
        let n = self.papers.len();
        if n > 0 {
            for (o, &c) in out.iter_mut().zip(&self.decade_counts) {
                *o = c as f64 / n as f64;
            }
        }
        out
    }

    /// Fraction of this author's papers published in `field`.
    pub fn fraction_in_field(&self, field: usize) -> f64 {
        if self.papers.is_empty() {
            0.0
        } else {
            self.field_counts[field] as f64 / self.papers.len() as f64
        }
    }
}

/// Snapshot-wide maxima used to scale every count-valued feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationTable {
    pub max_citations: f64,
    pub max_citations_per_paper: f64,
    pub max_h_index: f64,
    pub max_coauthors: f64,
    pub max_papers: f64,
    pub max_decade_papers: [f64; NUM_DECADES],
    pub max_common_coauthors: f64,
}

#[inline]
pub(crate) fn scaled(value: f64, max: f64) -> f64 {
    if max > 0.0 {
        value / max
    } else {
        0.0
    }
}

/// A snapshot together with its co-authorship graph, per-author statistics
/// and normalization maxima.
#[derive(Debug, Clone)]
pub struct CorpusStats<'a> {
    corpus: &'a PaperCorpus,
    graph: CoauthorGraph,
    authors: Vec<AuthorStats>,
    norms: NormalizationTable,
}

impl<'a> CorpusStats<'a> {
    pub fn new(corpus: &'a PaperCorpus) -> Self {
        let graph = CoauthorGraph::from_corpus(corpus);
        let config = corpus.config();
        let mut authors: Vec<AuthorStats> = (0..graph.node_count())
            .map(|i| AuthorStats {
                papers: Vec::new(),
                citations: 0,
                h_index: 0,
                coauthors: graph.degree(i),
                field_counts: [0; NUM_FIELDS],
                decade_counts: [0; NUM_DECADES],
            })
            .collect();
        for (pi, p) in corpus.papers().iter().enumerate() {
            let decade = config.decade_of(p.year);
            for a in &p.author_ids {
                let s = &mut authors[graph.index_of(a).expect("author in graph")];
                s.papers.push(pi);
                s.citations += p.citation_count;
                s.field_counts[p.field_id] += 1;
                if let Some(d) = decade {
                    s.decade_counts[d] += 1;
                }
            }
        }
        for s in &mut authors {
            let cites: Vec<u64> = s
                .papers
                .iter()
                .map(|&i| corpus.papers()[i].citation_count)
                .collect();
            s.h_index = h_index(&cites);
        }

        let max_of = |f: &dyn Fn(&AuthorStats) -> f64| authors.iter().map(f).fold(0.0, f64::max);
        let mut max_decade_papers = [0.0; NUM_DECADES];
        for (d, m) in max_decade_papers.iter_mut().enumerate() {
            *m = max_of(&|s| s.decade_counts[d] as f64);
        }
        let max_common_coauthors = graph
            .edges()
            .map(|(u, v, _)| graph.common_neighbors(u, v) as f64)
            .fold(0.0, f64::max);
        let norms = NormalizationTable {
            max_citations: max_of(&|s| s.citations as f64),
            max_citations_per_paper: max_of(&|s| s.citations_per_paper()),
            max_h_index: max_of(&|s| s.h_index as f64),
            max_coauthors: max_of(&|s| s.coauthors as f64),
            max_papers: max_of(&|s| s.paper_count() as f64),
            max_decade_papers,
            max_common_coauthors,
        };
        Self {
            corpus,
            graph,
            authors,
            norms,
        }
    }

    pub fn corpus(&self) -> &PaperCorpus {
        self.corpus
    }

    pub fn graph(&self) -> &CoauthorGraph {
        &self.graph
    }

    pub fn norms(&self) -> &NormalizationTable {
        &self.norms
    }

    pub fn author(&self, idx: usize) -> &AuthorStats {
        &self.authors[idx]
    }

    pub fn author_by_id(&self, id: &str) -> Result<&AuthorStats> {
        self.graph
            .index_of(id)
            .map(|i| &self.authors[i])
            .ok_or_else(|| Error::UnknownAuthor(id.to_string()))
    }

    pub fn persistence(&self, idx: usize) -> PersistenceVector {
        let s = &self.authors[idx];
        let mut out = [0.0; NUM_DECADES];
        for (d, o) in out.iter_mut().enumerate() {
            *o = scaled(s.decade_counts[d] as f64, self.norms.max_decade_papers[d]);
        }
        PersistenceVector(out)
    }

    /// Major field of every author, keyed by id.
    pub fn major_fields(&self) -> BTreeMap<String, usize> {
        self.graph
            .nodes()
            .iter()
            .zip(&self.authors)
            .map(|(n, s)| (n.clone(), s.major_field()))
            .collect()
    }

    /// Papers coauthored by `u` and `v` (indices into the snapshot).
    pub fn shared_papers(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = (&self.authors[u].papers, &self.authors[v].papers);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Fractions of the pair's shared papers per decade bin and per field.
    pub fn shared_fractions(&self, u: usize, v: usize) -> ([f64; NUM_DECADES], [f64; NUM_FIELDS]) {
        let shared = self.shared_papers(u, v);
        let config = self.corpus.config();
        let mut decades = [0u32; NUM_DECADES];
        let mut fields = [0u32; NUM_FIELDS];
        for &pi in &shared {
            let p = &self.corpus.papers()[pi];
            fields[p.field_id] += 1;
            if let Some(d) = config.decade_of(p.year) {
                decades[d] += 1;
            }
        }
        let total = shared.len() as f64;
        let mut dec = [0.0; NUM_DECADES];
        let mut fld = [0.0; NUM_FIELDS];
        if total > 0.0 {
            for (o, &c) in dec.iter_mut().zip(&decades) {
                *o = c as f64 / total;
            }
            for (o, &c) in fld.iter_mut().zip(&fields) {
                *o = c as f64 / total;
            }
        }
        (dec, fld)
    }

    /// The 35 general entries for author `idx`.
    pub fn general_features(&self, idx: usize, out: &mut Vec<f64>) {
        let s = &self.authors[idx];
        let n = &self.norms;
        out.push(scaled(s.citations as f64, n.max_citations));
        out.push(scaled(s.citations_per_paper(), n.max_citations_per_paper));
        out.push(scaled(s.h_index as f64, n.max_h_index));
        out.push(scaled(s.coauthors as f64, n.max_coauthors));
        out.extend_from_slice(&s.versatility().0);
        out.push(scaled(s.paper_count() as f64, n.max_papers));
        out.extend_from_slice(&self.persistence(idx).0);
        out.push(s.major_field() as f64 / (NUM_FIELDS - 1) as f64);
    }

    pub fn profile(&self, ego: &str, alter: &str) -> Result<ProfileVector> {
        let e = self
            .graph
            .index_of(ego)
            .ok_or_else(|| Error::UnknownAuthor(ego.to_string()))?;
        let a = self
            .graph
            .index_of(alter)
            .ok_or_else(|| Error::UnknownAuthor(alter.to_string()))?;
        if !self.graph.has_edge(e, a) {
            return Err(Error::InvalidParameter(format!(
                "`{alter}` is not a coauthor of `{ego}`"
            )));
        }
        Ok(self.profile_at(e, a))
    }

    pub(crate) fn profile_at(&self, e: usize, a: usize) -> ProfileVector {
        let mut v = Vec::with_capacity(PROFILE_DIM);
        self.general_features(a, &mut v);
        let (dec, fld) = self.shared_fractions(e, a);
        v.extend_from_slice(&dec);
        v.extend_from_slice(&fld);
        v.push(scaled(
            self.graph.common_neighbors(e, a) as f64,
            self.norms.max_common_coauthors,
        ));
        let (se, sa) = (&self.authors[e], &self.authors[a]);
        v.push(sa.fraction_in_field(se.major_field()));
        v.push(se.fraction_in_field(sa.major_field()));
        debug_assert_eq!(v.len(), PROFILE_DIM);
        ProfileVector(v)
    }

    /// Profiles of every alter of `net`, in alter order.
    pub fn ego_profiles(&self, net: &EgoNetwork) -> Result<Vec<ProfileVector>> {
        net.alters()
            .iter()
            .map(|alter| self.profile(net.ego(), alter))
            .collect()
    }
}

/// Edge-existence rate among alter pairs, bucketed by profile similarity.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimilarityEdgeRow {
    pub bin_start: f64,
    pub bin_end: f64,
    pub pairs: u64,
    pub edges: u64,
    pub edge_probability: f64,
}

/// Accumulates the similarity/edge table over any number of ego networks.
#[derive(Debug, Clone)]
pub struct SimilarityEdgeStats {
    bin_width: f64,
    bins: BTreeMap<u64, (u64, u64)>,
}

impl SimilarityEdgeStats {
    pub fn new(bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidParameter("bin width must be positive".into()));
        }
        Ok(Self {
            bin_width,
            bins: BTreeMap::new(),
        })
    }

    pub fn add_ego(&mut self, net: &EgoNetwork, profiles: &[ProfileVector]) -> Result<()> {
        if profiles.len() != net.len() {
            return Err(Error::LengthMismatch {
                left: profiles.len(),
                right: net.len(),
            });
        }
        for x in 0..net.len() {
            for y in x + 1..net.len() {
                let sim = similarity(&profiles[x], &profiles[y])?;
                let bin = (sim / self.bin_width).floor() as u64;
                let entry = self.bins.entry(bin).or_insert((0, 0));
                entry.0 += 1;
                if net.has_edge(x, y) {
                    entry.1 += 1;
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> Vec<SimilarityEdgeRow> {
        self.bins
            .iter()
            .map(|(&bin, &(pairs, edges))| SimilarityEdgeRow {
                bin_start: bin as f64 * self.bin_width,
                bin_end: (bin + 1) as f64 * self.bin_width,
                pairs,
                edges,
                edge_probability: edges as f64 / pairs as f64,
            })
            .collect()
    }
}

/// One-shot form of [`SimilarityEdgeStats`] over a single ego network.
pub fn similarity_edge_stats(
    net: &EgoNetwork,
    profiles: &[ProfileVector],
    bin_width: f64,
) -> Result<Vec<SimilarityEdgeRow>> {
    let mut stats = SimilarityEdgeStats::new(bin_width)?;
    stats.add_ego(net, profiles)?;
    Ok(stats.rows())
}
