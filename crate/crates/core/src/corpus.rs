//! Bibliographic records, temporal snapshots and the co-authorship graph.
//!
//! Corpus files are either CSV with the header
//! `paper_id,year,field_id,citation_count,author_ids` (authors separated by
//! `;`) or JSON lines carrying the same keys, `author_ids` being an array.
//! The `field_id` column accepts a numeric index or one of the configured
//! field labels.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of research fields in the profile layout.
pub const NUM_FIELDS: usize = 24;
/// Number of decade bins in the profile layout.
pub const NUM_DECADES: usize = 5;

const DEFAULT_FIELDS: [&str; NUM_FIELDS] = [
    "Algorithms and Theory",
    "Artificial Intelligence",
    "Bioinformatics",
    "Computer Education",
    "Computer Vision",
    "Data Mining",
    "Databases",
    "Distributed and Parallel Computing",
    "Graphics",
    "Hardware and Architecture",
    "Human-Computer Interaction",
    "Information Retrieval",
    "Machine Learning",
    "Multimedia",
    "Natural Language and Speech",
    "Networks and Communications",
    "Operating Systems",
    "Programming Languages",
    "Real-Time and Embedded Systems",
    "Scientific Computing",
    "Security and Privacy",
    "Simulation",
    "Software Engineering",
    "World Wide Web",
];

const DEFAULT_DECADES: [(i32, i32); NUM_DECADES] = [
    (1960, 1970),
    (1971, 1980),
    (1981, 1990),
    (1991, 2000),
    (2001, 2009),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Guess the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Csv,
        }
    }
}

/// Field labels, decade bins and the admissible year range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub fields: Vec<String>,
    /// Inclusive `[start, end]` year intervals.
    pub decades: Vec<(i32, i32)>,
    pub year_min: i32,
    pub year_max: i32,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            fields: DEFAULT_FIELDS.iter().map(|s| s.to_string()).collect(),
            decades: DEFAULT_DECADES.to_vec(),
            year_min: 1960,
            year_max: 2009,
        }
    }
}

impl CorpusConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: CorpusConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fields.len() != NUM_FIELDS {
            return Err(Error::Config(format!(
                "expected {NUM_FIELDS} field labels, got {}",
                self.fields.len()
            )));
        }
        let unique: HashSet<&String> = self.fields.iter().collect();
        if unique.len() != self.fields.len() {
            return Err(Error::Config("duplicate field label".into()));
        }
        if self.decades.len() != NUM_DECADES {
            return Err(Error::Config(format!(
                "expected {NUM_DECADES} decade bins, got {}",
                self.decades.len()
            )));
        }
        for (i, &(start, end)) in self.decades.iter().enumerate() {
            if start > end {
                return Err(Error::Config(format!("decade bin {i} is reversed")));
            }
            if i > 0 && start <= self.decades[i - 1].1 {
                return Err(Error::Config(format!(
                    "decade bin {i} overlaps or precedes bin {}",
                    i - 1
                )));
            }
        }
        if self.year_min > self.year_max {
            return Err(Error::Config("year_min exceeds year_max".into()));
        }
        Ok(())
    }

    pub fn field_index(&self, label: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == label)
    }

    /// Decade bin holding `year`, if any.
    pub fn decade_of(&self, year: i32) -> Option<usize> {
        self.decades
            .iter()
            .position(|&(start, end)| start <= year && year <= end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub year: i32,
    pub field_id: usize,
    pub citation_count: u64,
    pub author_ids: Vec<String>,
}

impl PaperRecord {
    pub fn validate(&self, config: &CorpusConfig) -> Result<()> {
        let fail = |message: String| {
            Err(Error::InvalidRecord {
                paper_id: self.paper_id.clone(),
                message,
            })
        };
        if self.author_ids.is_empty() {
            return fail("no authors".into());
        }
        let mut seen = HashSet::new();
        for a in &self.author_ids {
            if a.is_empty() {
                return fail("empty author id".into());
            }
            if !seen.insert(a.as_str()) {
                return fail(format!("duplicate author `{a}`"));
            }
        }
        if self.year < config.year_min || self.year > config.year_max {
            return fail(format!(
                "year {} outside [{}, {}]",
                self.year, config.year_min, config.year_max
            ));
        }
        if self.field_id >= config.fields.len() {
            return fail(format!("field_id {} out of range", self.field_id));
        }
        Ok(())
    }
}

/// An immutable collection of papers plus the field/decade configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperCorpus {
    papers: Vec<PaperRecord>,
    config: CorpusConfig,
}

impl PaperCorpus {
    pub fn new(papers: Vec<PaperRecord>, config: CorpusConfig) -> Result<Self> {
        config.validate()?;
        for p in &papers {
            p.validate(&config)?;
        }
        Ok(Self { papers, config })
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn config(&self) -> &CorpusConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    /// Paper indices per author, authors in lexicographic order.
    pub fn papers_by_author(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.papers.iter().enumerate() {
            for a in &p.author_ids {
                map.entry(a.as_str()).or_default().push(i);
            }
        }
        map
    }

    pub fn publication_count(&self, author: &str) -> usize {
        self.papers
            .iter()
            .filter(|p| p.author_ids.iter().any(|a| a == author))
            .count()
    }

    pub fn year_span(&self) -> Option<(i32, i32)> {
        let min = self.papers.iter().map(|p| p.year).min()?;
        let max = self.papers.iter().map(|p| p.year).max()?;
        Some((min, max))
    }

    /// Papers published in or before `cutoff_year`, in original order.
    pub fn snapshot(&self, cutoff_year: i32) -> Result<PaperCorpus> {
        if cutoff_year < self.config.year_min || cutoff_year > self.config.year_max {
            return Err(Error::InvalidParameter(format!(
                "cutoff year {cutoff_year} outside [{}, {}]",
                self.config.year_min, self.config.year_max
            )));
        }
        Ok(PaperCorpus {
            papers: self
                .papers
                .iter()
                .filter(|p| p.year <= cutoff_year)
                .cloned()
                .collect(),
            config: self.config.clone(),
        })
    }

    pub fn write(&self, path: &Path, format: CorpusFormat) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf, format)?;
        crate::io::write_atomic(path, &buf)
    }

    pub fn write_to<W: Write>(&self, out: W, format: CorpusFormat) -> Result<()> {
        match format {
            CorpusFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io_err = |e: csv::Error| Error::Config(format!("csv write: {e}"));
                w.write_record(CSV_HEADER).map_err(io_err)?;
                for p in &self.papers {
                    w.write_record([
                        p.paper_id.as_str(),
                        &p.year.to_string(),
                        &p.field_id.to_string(),
                        &p.citation_count.to_string(),
                        &p.author_ids.join(";"),
                    ])
                    .map_err(io_err)?;
                }
                w.flush().map_err(|e| Error::io("<corpus>", e))?;
            }
            CorpusFormat::Jsonl => {
                let mut out = out;
                for p in &self.papers {
                    serde_json::to_writer(&mut out, p)?;
                    out.write_all(b"\n").map_err(|e| Error::io("<corpus>", e))?;
                }
            }
        }
        Ok(())
    }
}

const CSV_HEADER: [&str; 5] = [
    "paper_id",
    "year",
    "field_id",
    "citation_count",
    "author_ids",
];

pub fn load_corpus(path: &Path, format: CorpusFormat, config: CorpusConfig) -> Result<PaperCorpus> {
    config.validate()?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let papers = match format {
        CorpusFormat::Csv => read_csv(path, file, &config)?,
        CorpusFormat::Jsonl => read_jsonl(path, file, &config)?,
    };
    PaperCorpus::new(papers, config)
}

fn parse_field(raw: &str, config: &CorpusConfig) -> Result<usize> {
    let raw = raw.trim();
    if let Ok(idx) = raw.parse::<usize>() {
        return Ok(idx);
    }
    config
        .field_index(raw)
        .ok_or_else(|| Error::UnknownField(raw.to_string()))
}

fn read_csv(path: &Path, file: File, config: &CorpusConfig) -> Result<Vec<PaperRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(1, format!("missing column `{name}`")))
    };
    let (c_id, c_year, c_field, c_cites, c_authors) = (
        col("paper_id")?,
        col("year")?,
        col("field_id")?,
        col("citation_count")?,
        col("author_ids")?,
    );

    let mut papers = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let get = |i: usize| row.get(i).unwrap_or("");
        let year = get(c_year)
            .parse::<i32>()
            .map_err(|e| parse_err(line, format!("year: {e}")))?;
        let citation_count = get(c_cites)
            .parse::<u64>()
            .map_err(|e| parse_err(line, format!("citation_count: {e}")))?;
        let field_id = parse_field(get(c_field), config)?;
        let author_ids = get(c_authors)
            .split(';')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(String::from)
            .collect();
        papers.push(PaperRecord {
            paper_id: get(c_id).to_string(),
            year,
            field_id,
            citation_count,
            author_ids,
        });
    }
    Ok(papers)
}

#[derive(Deserialize)]
struct JsonRecord {
    paper_id: String,
    year: i32,
    field_id: serde_json::Value,
    citation_count: u64,
    author_ids: Vec<String>,
}

fn read_jsonl(path: &Path, file: File, config: &CorpusConfig) -> Result<Vec<PaperRecord>> {
    let mut papers = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        let field_id = match &rec.field_id {
            serde_json::Value::Number(n) => n.as_u64().ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("field_id: not an index: {n}"),
            })? as usize,
            serde_json::Value::String(s) => parse_field(s, config)?,
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: format!("field_id: unexpected value {other}"),
                })
            }
        };
        papers.push(PaperRecord {
            paper_id: rec.paper_id,
            year: rec.year,
            field_id,
            citation_count: rec.citation_count,
            author_ids: rec.author_ids,
        });
    }
    Ok(papers)
}

/// Per-edge collaboration summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeInfo {
    pub first_year: i32,
    pub papers: u32,
}

/// Simple undirected co-authorship graph; nodes sorted by author id.
#[derive(Debug, Clone)]
pub struct CoauthorGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<BTreeMap<usize, EdgeInfo>>,
    edge_count: usize,
}

impl CoauthorGraph {
    pub fn from_corpus(corpus: &PaperCorpus) -> Self {
        let mut names: Vec<&str> = corpus
            .papers()
            .iter()
            .flat_map(|p| p.author_ids.iter().map(String::as_str))
            .collect();
        names.sort_unstable();
        names.dedup();
        let nodes: Vec<String> = names.into_iter().map(String::from).collect();
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut adj: Vec<BTreeMap<usize, EdgeInfo>> = vec![BTreeMap::new(); nodes.len()];
        let mut edge_count = 0;
        for p in corpus.papers() {
            let ids: Vec<usize> = p.author_ids.iter().map(|a| index[a]).collect();
            for (i, &u) in ids.iter().enumerate() {
                for &v in &ids[i + 1..] {
                    let mut fresh = false;
                    for (a, b) in [(u, v), (v, u)] {
                        adj[a]
                            .entry(b)
                            .and_modify(|e| {
                                e.papers += 1;
                                e.first_year = e.first_year.min(p.year);
                            })
                            .or_insert_with(|| {
                                fresh = true;
                                EdgeInfo {
                                    first_year: p.year,
                                    papers: 1,
                                }
                            });
                    }
                    if fresh {
                        edge_count += 1;
                    }
                }
            }
        }
        Self {
            nodes,
            index,
            adj,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn index_of(&self, author: &str) -> Option<usize> {
        self.index.get(author).copied()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    /// Neighbors of `idx` in ascending index (= lexicographic id) order.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[idx].keys().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains_key(&v)
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<EdgeInfo> {
        self.adj[u].get(&v).copied()
    }

    /// Every edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeInfo)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.range(u + 1..).map(move |(&v, &info)| (u, v, info))
        })
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        let (small, large) = if self.adj[u].len() <= self.adj[v].len() {
            (&self.adj[u], &self.adj[v])
        } else {
            (&self.adj[v], &self.adj[u])
        };
        small.keys().filter(|k| large.contains_key(k)).count()
    }
}

pub fn build_graph(corpus: &PaperCorpus) -> CoauthorGraph {
    CoauthorGraph::from_corpus(corpus)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::PaperRecord;

    pub(crate) fn paper(id: &str, year: i32, field: usize, cites: u64, authors: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            year,
            field_id: field,
            citation_count: cites,
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::paper;
    use super::*;

    fn corpus(papers: Vec<PaperRecord>) -> PaperCorpus {
        PaperCorpus::new(papers, CorpusConfig::default()).unwrap()
    }

    fn write_tmp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_csv_gives_empty_corpus() {
        let f = write_tmp("paper_id,year,field_id,citation_count,author_ids\n", ".csv");
        let c = load_corpus(f.path(), CorpusFormat::Csv, CorpusConfig::default()).unwrap();
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn csv_counts_publications() {
        let f = write_tmp(
            "paper_id,year,field_id,citation_count,author_ids\n\
             p1,1990,0,5,a1;a2\n\
             p2,1991,Databases,0,a1\n\
             p3,1995,3,2,a3;a1\n",
            ".csv",
        );
        let c = load_corpus(f.path(), CorpusFormat::Csv, CorpusConfig::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.publication_count("a1"), 3);
        assert_eq!(c.papers()[1].field_id, 6);
        assert_eq!(c.papers()[2].author_ids, vec!["a3", "a1"]);
    }

    #[test]
    fn duplicate_author_names_paper() {
        let f = write_tmp(
            "paper_id,year,field_id,citation_count,author_ids\np9,1990,0,5,a1;a1\n",
            ".csv",
        );
        let err = load_corpus(f.path(), CorpusFormat::Csv, CorpusConfig::default()).unwrap_err();
        match err {
            Error::InvalidRecord { paper_id, .. } => assert_eq!(paper_id, "p9"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_error_reports_line() {
        let f = write_tmp(
            "paper_id,year,field_id,citation_count,author_ids\np1,1990,0,5,a\np2,xx,0,5,b\n",
            ".csv",
        );
        let err = load_corpus(f.path(), CorpusFormat::Csv, CorpusConfig::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_field_label() {
        let f = write_tmp(
            "paper_id,year,field_id,citation_count,author_ids\np1,1990,Astrology,5,a\n",
            ".csv",
        );
        let err = load_corpus(f.path(), CorpusFormat::Csv, CorpusConfig::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownField(ref l) if l == "Astrology"));
    }

    #[test]
    fn jsonl_roundtrip() {
        let c = corpus(vec![
            paper("p1", 1990, 2, 7, &["x", "y"]),
            paper("p2", 2001, 23, 0, &["y"]),
        ]);
        let mut buf = Vec::new();
        c.write_to(&mut buf, CorpusFormat::Jsonl).unwrap();
        let f = write_tmp(std::str::from_utf8(&buf).unwrap(), ".jsonl");
        let back = load_corpus(f.path(), CorpusFormat::Jsonl, CorpusConfig::default()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn out_of_range_year_rejected() {
        let err = PaperCorpus::new(vec![paper("old", 1901, 0, 0, &["a"])], CorpusConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::InvalidRecord { .. }));
    }

    #[test]
    fn snapshot_cases() {
        let c = corpus(vec![
            paper("p1", 1994, 0, 0, &["a", "b"]),
            paper("p2", 1996, 0, 0, &["a", "c"]),
        ]);
        assert_eq!(c.snapshot(1995).unwrap().len(), 1);
        assert_eq!(c.snapshot(2009).unwrap(), c);
        assert!(c.snapshot(1980).unwrap().is_empty());
        assert!(c.snapshot(1900).is_err());
    }

    #[test]
    fn graph_from_triangle_paper() {
        let g = build_graph(&corpus(vec![paper("p", 2000, 0, 0, &["a", "b", "c"])]));
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && g.has_edge(0, 2));
    }

    #[test]
    fn graph_dedups_repeated_pairs() {
        let g = build_graph(&corpus(vec![
            paper("p1", 2000, 0, 0, &["a", "b"]),
            paper("p2", 1998, 0, 0, &["b", "a"]),
        ]));
        assert_eq!(g.edge_count(), 1);
        let e = g.edge(0, 1).unwrap();
        assert_eq!(e.papers, 2);
        assert_eq!(e.first_year, 1998);
        assert_eq!(g.edge(1, 0), Some(e));
    }

    #[test]
    fn single_author_is_isolated() {
        let g = build_graph(&corpus(vec![paper("p", 2000, 0, 0, &["solo"])]));
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.degree(0), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn config_toml_validation() {
        let mut text = String::from("year_min = 1960\nyear_max = 2009\nfields = [");
        for i in 0..24 {
            text.push_str(&format!("\"f{i}\","));
        }
        text.push_str("]\ndecades = [[1960,1970],[1971,1980],[1981,1990],[1991,2000],[2001,2009]]\n");
        let cfg = CorpusConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.field_index("f3"), Some(3));
        assert_eq!(cfg.decade_of(1975), Some(1));

        let bad = text.replace("[1971,1980]", "[1965,1980]");
        assert!(CorpusConfig::from_toml_str(&bad).is_err());
    }
}
