//! Ego networks: the induced subgraph over an author's coauthors, ego excluded.

use crate::corpus::CoauthorGraph;
use crate::error::{Error, Result};

/// Alters below this count make circle detection degenerate.
pub const DEFAULT_MIN_ALTERS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct EgoNetwork {
    ego: String,
    alters: Vec<String>,
    adjacency: Vec<bool>,
    edges: Vec<(usize, usize)>,
}

impl EgoNetwork {
    /// Build from local alter indices. Edges are normalized to `(lo, hi)`
    /// and deduplicated; self-loops and out-of-range endpoints are rejected.
    pub fn new(ego: impl Into<String>, alters: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let ego = ego.into();
        if alters.contains(&ego) {
            return Err(Error::InvalidParameter(format!("ego `{ego}` listed among its alters")));
        }
        let n = alters.len();
        let mut adjacency = vec![false; n * n];
        let mut list = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidParameter(format!("bad ego edge ({u}, {v})")));
            }
            let (a, b) = (u.min(v), u.max(v));
            if !adjacency[a * n + b] {
                adjacency[a * n + b] = true;
                adjacency[b * n + a] = true;
                list.push((a, b));
            }
        }
        list.sort_unstable();
        Ok(Self {
            ego,
            alters,
            adjacency,
            edges: list,
        })
    }

    pub fn ego(&self) -> &str {
        &self.ego
    }

    pub fn alters(&self) -> &[String] {
        &self.alters
    }

    pub fn len(&self) -> usize {
        self.alters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alters.is_empty()
    }

    /// Edges as `(lo, hi)` local index pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u * self.len() + v]
    }

    pub fn degree(&self, u: usize) -> usize {
        let n = self.len();
        self.adjacency[u * n..(u + 1) * n].iter().filter(|&&b| b).count()
    }

    pub fn alter_index(&self, id: &str) -> Option<usize> {
        self.alters.iter().position(|a| a == id)
    }
}

pub fn ego_network(graph: &CoauthorGraph, ego: &str) -> Result<EgoNetwork> {
    let idx = graph
        .index_of(ego)
        .ok_or_else(|| Error::UnknownAuthor(ego.to_string()))?;
    Ok(ego_network_at(graph, idx))
}

pub(crate) fn ego_network_at(graph: &CoauthorGraph, idx: usize) -> EgoNetwork {
    let neighbors: Vec<usize> = graph.neighbors(idx).collect();
    let mut edges = Vec::new();
    for (i, &u) in neighbors.iter().enumerate() {
        for (j, &v) in neighbors.iter().enumerate().skip(i + 1) {
            if graph.has_edge(u, v) {
                edges.push((i, j));
            }
        }
    }
    let alters = neighbors.iter().map(|&u| graph.name(u).to_string()).collect();
    EgoNetwork::new(graph.name(idx), alters, &edges).expect("induced subgraph is well formed")
}

/// Ego networks of every author with at least `min_alters` coauthors, in
/// author-id order.
pub fn enumerate_egos(graph: &CoauthorGraph, min_alters: usize) -> impl Iterator<Item = EgoNetwork> + '_ {
    (0..graph.node_count())
        .filter(move |&i| graph.degree(i) >= min_alters)
        .map(move |i| ego_network_at(graph, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_graph, CorpusConfig, PaperCorpus, PaperRecord};

    fn graph(pairs: &[(&str, &str)], isolated: &[&str]) -> CoauthorGraph {
        let mut papers: Vec<PaperRecord> = pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| PaperRecord {
                paper_id: format!("p{i}"),
                year: 2000,
                field_id: 0,
                citation_count: 0,
                author_ids: vec![a.to_string(), b.to_string()],
            })
            .collect();
        for (i, a) in isolated.iter().enumerate() {
            papers.push(PaperRecord {
                paper_id: format!("s{i}"),
                year: 2000,
                field_id: 0,
                citation_count: 0,
                author_ids: vec![a.to_string()],
            });
        }
        build_graph(&PaperCorpus::new(papers, CorpusConfig::default()).unwrap())
    }

    #[test]
    fn star_has_no_alter_edges() {
        let g = graph(&[("e", "a"), ("e", "b"), ("e", "c")], &[]);
        let net = ego_network(&g, "e").unwrap();
        assert_eq!(net.alters(), ["a", "b", "c"]);
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn triangle_keeps_alter_edge() {
        let g = graph(&[("e", "a"), ("e", "b"), ("a", "b")], &[]);
        let net = ego_network(&g, "e").unwrap();
        assert_eq!(net.alters(), ["a", "b"]);
        assert_eq!(net.edges(), [(0, 1)]);
    }

    #[test]
    fn isolated_ego_is_empty() {
        let g = graph(&[("a", "b")], &["e"]);
        let net = ego_network(&g, "e").unwrap();
        assert!(net.is_empty());
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn unknown_ego() {
        let g = graph(&[("a", "b")], &[]);
        assert!(matches!(ego_network(&g, "zz"), Err(Error::UnknownAuthor(_))));
    }

    #[test]
    fn enumerate_filters_by_alters() {
        let g = graph(&[("a", "b"), ("b", "c")], &["z"]);
        assert_eq!(enumerate_egos(&g, 0).count(), 4);
        assert_eq!(enumerate_egos(&g, 1).count(), 3);
        let b = enumerate_egos(&g, 2).next().unwrap();
        assert_eq!(b.ego(), "b");
        assert_eq!(b.alters(), ["a", "c"]);
        assert_eq!(b.edge_count(), 0);
    }

    #[test]
    fn alters_equal_degree_and_edges_counted_per_common_neighbor() {
        let g = graph(
            &[("a", "b"), ("a", "c"), ("b", "c"), ("c", "d"), ("b", "d"), ("d", "e")],
            &[],
        );
        let mut seen = std::collections::HashMap::new();
        for net in enumerate_egos(&g, 0) {
            let idx = g.index_of(net.ego()).unwrap();
            assert_eq!(net.len(), g.degree(idx));
            assert!(!net.alters().iter().any(|a| a == net.ego()));
            for &(u, v) in net.edges() {
                *seen.entry((net.alters()[u].clone(), net.alters()[v].clone())).or_insert(0) += 1;
            }
        }
        for (u, v, _) in g.edges() {
            let key = (g.name(u).to_string(), g.name(v).to_string());
            assert_eq!(seen.get(&key).copied().unwrap_or(0), g.common_neighbors(u, v));
        }
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(EgoNetwork::new("e", vec!["a".into()], &[(0, 0)]).is_err());
        assert!(EgoNetwork::new("e", vec!["a".into()], &[(0, 1)]).is_err());
        assert!(EgoNetwork::new("e", vec!["e".into()], &[]).is_err());
    }
}
