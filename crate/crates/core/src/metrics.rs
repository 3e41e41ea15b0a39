//! Circle quality measures and the descriptive tables built from a batch of
//! detections.
//!
//! Overlapping modularity uses belonging coefficients `1/O_i`, where `O_i`
//! is the number of circles that contain node `i`:
//!
//! ```text
//! Q_ov = 1/(2m) * sum_c sum_{i,j in c} (A_ij - k_i k_j / 2m) / (O_i O_j)
//! ```
//!
//! The inner sum runs over all ordered member pairs, the diagonal included,
//! so a disjoint cover reduces to Newman modularity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::NUM_FIELDS;
use crate::ego::EgoNetwork;
use crate::error::{Error, Result};

pub fn overlapping_modularity(net: &EgoNetwork, circles: &[Vec<usize>]) -> f64 {
    let m = net.edge_count();
    if m == 0 || circles.is_empty() {
        return 0.0;
    }
    let two_m = 2.0 * m as f64;
    let mut belong = vec![0u32; net.len()];
    for c in circles {
        for &i in c {
            belong[i] += 1;
        }
    }
    let mut q = 0.0;
    for c in circles {
        for &i in c {
            let ki = net.degree(i) as f64;
            for &j in c {
                let a = if i != j && net.has_edge(i, j) { 1.0 } else { 0.0 };
                let kj = net.degree(j) as f64;
                q += (a - ki * kj / two_m) / (belong[i] as f64 * belong[j] as f64);
            }
        }
    }
    q / two_m
}

/// Edge density inside `circle`. `None` for circles with fewer than two
/// members.
pub fn cliquishness(net: &EgoNetwork, circle: &[usize]) -> Option<f64> {
    let s = circle.len();
    if s < 2 {
        return None;
    }
    let mut edges = 0usize;
    for (a, &i) in circle.iter().enumerate() {
        for &j in &circle[a + 1..] {
            if net.has_edge(i, j) {
                edges += 1;
            }
        }
    }
    Some(edges as f64 / (s * (s - 1) / 2) as f64)
}

fn field_histogram(fields: &[usize]) -> Result<[usize; NUM_FIELDS]> {
    if fields.is_empty() {
        return Err(Error::InvalidParameter("empty circle".into()));
    }
    let mut counts = [0usize; NUM_FIELDS];
    for &f in fields {
        if f >= NUM_FIELDS {
            return Err(Error::InvalidParameter(format!("field index {f} out of range")));
        }
        counts[f] += 1;
    }
    Ok(counts)
}

/// Inverse-entropy concentration of the members' major fields (natural log).
/// `fields` holds one major-field index per member.
pub fn homogeneity(fields: &[usize]) -> Result<f64> {
    let counts = field_histogram(fields)?;
    let n = fields.len() as f64;
    let entropy: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / n;
            -f * f.ln()
        })
        .sum();
    Ok(1.0 / (1.0 + entropy))
}

/// Most common major field among the members, lowest index on ties.
pub fn field_label(fields: &[usize]) -> Result<usize> {
    let counts = field_histogram(fields)?;
    let mut best = 0;
    for (f, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = f;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CitationBand {
    HighlyCited,
    MediumCited,
    LowCited,
}

impl CitationBand {
    pub const ALL: [CitationBand; 3] = [Self::HighlyCited, Self::MediumCited, Self::LowCited];

    /// More than 100 is high, 30 through 100 is medium.
    pub fn of(citations: u64) -> Self {
        if citations > 100 {
            Self::HighlyCited
        } else if citations >= 30 {
            Self::MediumCited
        } else {
            Self::LowCited
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::HighlyCited => "highly-cited",
            Self::MediumCited => "medium-cited",
            Self::LowCited => "low-cited",
        }
    }
}

/// Finer citation ranges used for the homogeneity table.
pub fn homogeneity_range(citations: u64) -> &'static str {
    match citations {
        c if c > 200 => ">200",
        c if c > 100 => "101-200",
        c if c > 30 => "31-100",
        _ => "<=30",
    }
}

const HOMOGENEITY_RANGES: [&str; 4] = [">200", "101-200", "31-100", "<=30"];

/// One ego's detection together with what the summary needs to know about
/// the ego and its alters.
#[derive(Debug, Clone)]
pub struct EgoDetection {
    pub network: EgoNetwork,
    /// Member lists as local alter indices.
    pub circles: Vec<Vec<usize>>,
    pub ego_citations: u64,
    /// Major field of every alter, in alter order.
    pub alter_fields: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleRecord {
    pub ego: String,
    pub size: usize,
    pub cliquishness: Option<f64>,
    pub field: usize,
    pub homogeneity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EgoRecord {
    pub ego: String,
    pub citations: u64,
    pub band: CitationBand,
    pub alters: usize,
    pub circle_count: usize,
    pub mean_size: Option<f64>,
    pub mean_cliquishness: Option<f64>,
    /// Circles in other egos' networks that contain this ego.
    pub memberships: usize,
    pub q_ov: Option<f64>,
    pub mean_homogeneity: Option<f64>,
    /// Mean cliquishness of circles formed by grouping alters on major field.
    pub field_circle_cliquishness: Option<f64>,
    /// Fraction of this ego's circles labeled with each field.
    pub field_fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandAggregate {
    pub band: CitationBand,
    pub egos: usize,
    pub mean_circles: Option<f64>,
    pub mean_size: Option<f64>,
    pub mean_memberships: Option<f64>,
    pub mean_cliquishness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub egos: usize,
    pub egos_with_circles: usize,
    pub egos_without_circles: usize,
    pub circles: usize,
    /// Averaged over egos with at least one circle.
    pub mean_q_ov: Option<f64>,
    pub mean_circle_size: Option<f64>,
    pub mean_cliquishness: Option<f64>,
    pub mean_homogeneity: Option<f64>,
    pub bands: Vec<BandAggregate>,
    pub per_ego: Vec<EgoRecord>,
    pub per_circle: Vec<CircleRecord>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

pub fn summarize(detections: &[EgoDetection]) -> Result<Summary> {
    if detections.is_empty() {
        return Err(Error::InvalidParameter("no detections to summarize".into()));
    }
    let mut memberships: BTreeMap<&str, usize> = BTreeMap::new();
    for d in detections {
        for c in &d.circles {
            for &i in c {
                *memberships.entry(d.network.alters()[i].as_str()).or_default() += 1;
            }
        }
    }

    let mut per_ego = Vec::with_capacity(detections.len());
    let mut per_circle = Vec::new();
    for d in detections {
        let net = &d.network;
        if d.alter_fields.len() != net.len() {
            return Err(Error::LengthMismatch {
                left: d.alter_fields.len(),
                right: net.len(),
            });
        }
        let mut labels = [0usize; NUM_FIELDS];
        let mut cliq = Vec::new();
        let mut homog = Vec::new();
        for c in &d.circles {
            let fields: Vec<usize> = c.iter().map(|&i| d.alter_fields[i]).collect();
            let rec = CircleRecord {
                ego: net.ego().to_string(),
                size: c.len(),
                cliquishness: cliquishness(net, c),
                field: field_label(&fields)?,
                homogeneity: homogeneity(&fields)?,
            };
            labels[rec.field] += 1;
            cliq.extend(rec.cliquishness);
            homog.push(rec.homogeneity);
            per_circle.push(rec);
        }
        let mut by_field: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &f) in d.alter_fields.iter().enumerate() {
            by_field.entry(f).or_default().push(i);
        }
        let k = d.circles.len();
        per_ego.push(EgoRecord {
            ego: net.ego().to_string(),
            citations: d.ego_citations,
            band: CitationBand::of(d.ego_citations),
            alters: net.len(),
            circle_count: k,
            mean_size: mean(d.circles.iter().map(|c| c.len() as f64)),
            mean_cliquishness: mean(cliq),
            memberships: memberships.get(net.ego()).copied().unwrap_or(0),
            q_ov: (k > 0).then(|| overlapping_modularity(net, &d.circles)),
            mean_homogeneity: mean(homog),
            field_circle_cliquishness: mean(by_field.values().filter_map(|g| cliquishness(net, g))),
            field_fractions: labels
                .iter()
                .map(|&c| if k > 0 { c as f64 / k as f64 } else { 0.0 })
                .collect(),
        });
    }

    let bands = CitationBand::ALL
        .iter()
        .map(|&band| {
            let egos: Vec<&EgoRecord> = per_ego.iter().filter(|e| e.band == band).collect();
            BandAggregate {
                band,
                egos: egos.len(),
                mean_circles: mean(egos.iter().map(|e| e.circle_count as f64)),
                mean_size: mean(egos.iter().filter_map(|e| e.mean_size)),
                mean_memberships: mean(egos.iter().map(|e| e.memberships as f64)),
                mean_cliquishness: mean(egos.iter().filter_map(|e| e.mean_cliquishness)),
            }
        })
        .collect();

    let with = per_ego.iter().filter(|e| e.circle_count > 0).count();
    Ok(Summary {
        egos: per_ego.len(),
        egos_with_circles: with,
        egos_without_circles: per_ego.len() - with,
        circles: per_circle.len(),
        mean_q_ov: mean(per_ego.iter().filter_map(|e| e.q_ov)),
        mean_circle_size: mean(per_circle.iter().map(|c| c.size as f64)),
        mean_cliquishness: mean(per_circle.iter().filter_map(|c| c.cliquishness)),
        mean_homogeneity: mean(per_circle.iter().map(|c| c.homogeneity)),
        bands,
        per_ego,
        per_circle,
    })
}

/// A tab-separated table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.tsv", self.name)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn percent(part: usize, whole: usize) -> String {
    if whole == 0 {
        "0".into()
    } else {
        (100.0 * part as f64 / whole as f64).to_string()
    }
}

const CLIQUISHNESS_BINS: usize = 10;

/// Figure tables: author-level by citation band (`fig3*`), circle-level
/// distributions (`fig4*`), field-based comparison and homogeneity
/// (`fig5*`), and per-ego field fractions (`fig6`).
pub fn figure_tables(summary: &Summary) -> Vec<Table> {
    let mut fig3a = Table::new("fig3a", &["band", "egos", "mean_circles"]);
    let mut fig3b = Table::new("fig3b", &["band", "egos", "mean_circle_size"]);
    let mut fig3c = Table::new("fig3c", &["band", "egos", "mean_memberships"]);
    let mut fig3d = Table::new("fig3d", &["band", "egos", "mean_cliquishness"]);
    for b in &summary.bands {
        let label = b.band.label().to_string();
        let egos = b.egos.to_string();
        fig3a.rows.push(vec![label.clone(), egos.clone(), cell(b.mean_circles)]);
        fig3b.rows.push(vec![label.clone(), egos.clone(), cell(b.mean_size)]);
        fig3c.rows.push(vec![label.clone(), egos.clone(), cell(b.mean_memberships)]);
        fig3d.rows.push(vec![label, egos, cell(b.mean_cliquishness)]);
    }

    let total = summary.per_circle.len();
    let mut sizes: BTreeMap<usize, (usize, Vec<f64>)> = BTreeMap::new();
    for c in &summary.per_circle {
        let e = sizes.entry(c.size).or_default();
        e.0 += 1;
        e.1.extend(c.cliquishness);
    }
    let mut fig4a = Table::new("fig4a", &["size", "circles", "percent"]);
    let mut fig4c = Table::new("fig4c", &["size", "circles", "mean_cliquishness"]);
    for (size, (count, cl)) in &sizes {
        fig4a.rows.push(vec![size.to_string(), count.to_string(), percent(*count, total)]);
        if !cl.is_empty() {
            fig4c.rows.push(vec![size.to_string(), cl.len().to_string(), cell(mean(cl.iter().copied()))]);
        }
    }

    let mut bins = [0usize; CLIQUISHNESS_BINS];
    let mut scored = 0;
    for c in summary.per_circle.iter().filter_map(|c| c.cliquishness) {
        bins[((c * CLIQUISHNESS_BINS as f64) as usize).min(CLIQUISHNESS_BINS - 1)] += 1;
        scored += 1;
    }
    let mut fig4b = Table::new("fig4b", &["bin_start", "bin_end", "circles", "percent"]);
    for (i, &count) in bins.iter().enumerate() {
        let w = 1.0 / CLIQUISHNESS_BINS as f64;
        fig4b.rows.push(vec![
            (i as f64 * w).to_string(),
            ((i + 1) as f64 * w).to_string(),
            count.to_string(),
            percent(count, scored),
        ]);
    }

    let mut per_count: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &summary.per_ego {
        *per_count.entry(e.circle_count).or_default() += 1;
    }
    let mut fig4d = Table::new("fig4d", &["circles", "egos", "percent"]);
    for (k, n) in per_count {
        fig4d.rows.push(vec![k.to_string(), n.to_string(), percent(n, summary.egos)]);
    }

    let mut fig5a = Table::new("fig5a", &["ego", "detected_cliquishness", "field_cliquishness"]);
    for e in &summary.per_ego {
        fig5a.rows.push(vec![
            e.ego.clone(),
            cell(e.mean_cliquishness),
            cell(e.field_circle_cliquishness),
        ]);
    }
    let mut fig5b = Table::new("fig5b", &["citations", "egos", "mean_homogeneity"]);
    for range in HOMOGENEITY_RANGES {
        let egos: Vec<&EgoRecord> = summary
            .per_ego
            .iter()
            .filter(|e| homogeneity_range(e.citations) == range)
            .collect();
        fig5b.rows.push(vec![
            range.to_string(),
            egos.len().to_string(),
            cell(mean(egos.iter().filter_map(|e| e.mean_homogeneity))),
        ]);
    }

    let mut header = vec!["band", "ego"];
    header.extend(FIELD_RANK_COLUMNS);
    let mut fig6 = Table::new("fig6", &header);
    for band in CitationBand::ALL {
        for e in summary.per_ego.iter().filter(|e| e.band == band && e.circle_count > 0) {
            let mut sorted = e.field_fractions.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let mut row = vec![band.label().to_string(), e.ego.clone()];
            row.extend(sorted.iter().map(|f| f.to_string()));
            fig6.rows.push(row);
        }
    }

    vec![fig3a, fig3b, fig3c, fig3d, fig4a, fig4b, fig4c, fig4d, fig5a, fig5b, fig6]
}

const FIELD_RANK_COLUMNS: [&str; NUM_FIELDS] = [
    "r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8", "r9", "r10", "r11", "r12", "r13", "r14", "r15", "r16",
    "r17", "r18", "r19", "r20", "r21", "r22", "r23", "r24",
];

/// Per-ego rows in one table, for ad hoc inspection.
pub fn ego_table(summary: &Summary) -> String {
    let mut out = String::from("ego\tcitations\tband\talters\tcircles\tmean_size\tmean_cliquishness\tmemberships\tq_ov\n");
    for e in &summary.per_ego {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.ego,
            e.citations,
            e.band.label(),
            e.alters,
            e.circle_count,
            cell(e.mean_size),
            cell(e.mean_cliquishness),
            e.memberships,
            cell(e.q_ov)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn net(n: usize, edges: &[(usize, usize)]) -> EgoNetwork {
        EgoNetwork::new("e", (0..n).map(|i| format!("a{i}")).collect(), edges).unwrap()
    }

    fn two_triangles() -> EgoNetwork {
        net(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    /// Newman modularity of a partition, from edge and degree totals.
    fn newman(net: &EgoNetwork, parts: &[Vec<usize>]) -> f64 {
        let m = net.edge_count() as f64;
        parts
            .iter()
            .map(|p| {
                let inside = net
                    .edges()
                    .iter()
                    .filter(|(a, b)| p.contains(a) && p.contains(b))
                    .count() as f64;
                let deg: f64 = p.iter().map(|&i| net.degree(i) as f64).sum();
                inside / m - (deg / (2.0 * m)).powi(2)
            })
            .sum()
    }

    #[test]
    fn q_ov_two_triangles() {
        let q = overlapping_modularity(&two_triangles(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert_relative_eq!(q, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn q_ov_clique_single_circle_is_zero() {
        let k4 = net(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_relative_eq!(overlapping_modularity(&k4, &[vec![0, 1, 2, 3]]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn q_ov_empty_cover_and_edgeless() {
        assert_eq!(overlapping_modularity(&two_triangles(), &[]), 0.0);
        assert_eq!(overlapping_modularity(&net(3, &[]), &[vec![0, 1, 2]]), 0.0);
    }

    #[test]
    fn q_ov_overlap_weights() {
        // Path 0-1-2 with node 1 shared by both circles.
        let p = net(3, &[(0, 1), (1, 2)]);
        let q = overlapping_modularity(&p, &[vec![0, 1], vec![1, 2]]);
        let two_m = 4.0;
        let k = [1.0, 2.0, 1.0];
        let o = [1.0, 2.0, 1.0];
        let mut want = 0.0;
        for c in [[0usize, 1], [1, 2]] {
            for &i in &c {
                for &j in &c {
                    let a = if i != j { 1.0 } else { 0.0 };
                    want += (a - k[i] * k[j] / two_m) / (o[i] * o[j]);
                }
            }
        }
        assert_relative_eq!(q, want / two_m, epsilon = 1e-12);
    }

    #[test]
    fn cliquishness_examples() {
        let tri = net(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(cliquishness(&tri, &[0, 1, 2]), Some(1.0));
        let star = net(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(cliquishness(&star, &[0, 1, 2, 3]), Some(0.5));
        assert_eq!(cliquishness(&net(2, &[]), &[0, 1]), Some(0.0));
        assert_eq!(cliquishness(&tri, &[1]), None);
    }

    #[test]
    fn homogeneity_examples() {
        assert_eq!(homogeneity(&[4, 4, 4]).unwrap(), 1.0);
        assert_relative_eq!(homogeneity(&[0, 1]).unwrap(), 1.0 / (1.0 + 2f64.ln()), epsilon = 1e-12);
        let uniform: Vec<usize> = (0..NUM_FIELDS).collect();
        assert_relative_eq!(
            homogeneity(&uniform).unwrap(),
            1.0 / (1.0 + (NUM_FIELDS as f64).ln()),
            epsilon = 1e-12
        );
        assert!(homogeneity(&[]).is_err());
    }

    #[test]
    fn field_label_examples() {
        assert_eq!(field_label(&[3, 3, 7]).unwrap(), 3);
        assert_eq!(field_label(&[7, 3]).unwrap(), 3);
        assert_eq!(field_label(&[5]).unwrap(), 5);
    }

    #[test]
    fn citation_bands() {
        assert_eq!(CitationBand::of(150), CitationBand::HighlyCited);
        assert_eq!(CitationBand::of(101), CitationBand::HighlyCited);
        assert_eq!(CitationBand::of(100), CitationBand::MediumCited);
        assert_eq!(CitationBand::of(30), CitationBand::MediumCited);
        assert_eq!(CitationBand::of(29), CitationBand::LowCited);
    }

    fn detection(ego: &str, alters: &[&str], edges: &[(usize, usize)], circles: Vec<Vec<usize>>, cites: u64) -> EgoDetection {
        EgoDetection {
            network: EgoNetwork::new(ego, alters.iter().map(|s| s.to_string()).collect(), edges).unwrap(),
            circles,
            ego_citations: cites,
            alter_fields: vec![0; alters.len()],
        }
    }

    #[test]
    fn summary_means_and_memberships() {
        let a = detection(
            "a",
            &["b", "c", "d", "e", "f", "g"],
            &[(0, 1), (1, 2)],
            vec![vec![0, 1, 2], vec![0, 2, 3, 4, 5]],
            150,
        );
        let b = detection("b", &["a", "c", "x"], &[(1, 2)], vec![], 10);
        let s = summarize(&[a, b]).unwrap();
        assert_eq!(s.per_ego[0].mean_size, Some(4.0));
        // "b" sits in two of a's circles; "a" is in none of b's.
        assert_eq!(s.per_ego[0].memberships, 0);
        assert_eq!(s.per_ego[1].memberships, 2);
        assert_eq!(s.egos_with_circles, 1);
        assert_eq!(s.egos_without_circles, 1);
        assert_eq!(s.bands.iter().map(|b| b.egos).sum::<usize>(), 2);
        assert_eq!(s.mean_q_ov, s.per_ego[0].q_ov);
        let tables = figure_tables(&s);
        assert_eq!(tables.len(), 11);
        assert!(tables.iter().all(|t| t.rows.iter().all(|r| r.len() == t.header.len())));
    }

    #[test]
    fn summarize_rejects_empty_input() {
        assert!(summarize(&[]).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (3usize..9).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let k = pairs.len();
            (Just(n), proptest::sample::subsequence(pairs, 1..=k))
        })
    }

    proptest! {
        #[test]
        fn disjoint_cover_matches_newman((n, edges) in arb_graph(), labels in proptest::collection::vec(0usize..3, 9)) {
            let g = net(n, &edges);
            let mut parts = vec![Vec::new(); 3];
            for i in 0..n {
                parts[labels[i]].push(i);
            }
            parts.retain(|p| !p.is_empty());
            prop_assert!((overlapping_modularity(&g, &parts) - newman(&g, &parts)).abs() < 1e-12);
        }

        #[test]
        fn q_ov_invariant_under_reordering((n, edges) in arb_graph(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let g = net(n, &edges);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut circles: Vec<Vec<usize>> = (0..3)
                .map(|_| (0..n).filter(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect::<Vec<_>>())
                .filter(|c: &Vec<usize>| !c.is_empty())
                .collect();
            let q = overlapping_modularity(&g, &circles);
            circles.shuffle(&mut rng);
            for c in &mut circles {
                c.shuffle(&mut rng);
            }
            prop_assert!((overlapping_modularity(&g, &circles) - q).abs() < 1e-12);
        }

        #[test]
        fn homogeneity_bounds(fields in proptest::collection::vec(0usize..NUM_FIELDS, 1..40)) {
            let h = homogeneity(&fields).unwrap();
            prop_assert!(h > 0.0 && h <= 1.0);
            let single = fields.iter().all(|&f| f == fields[0]);
            prop_assert_eq!(h == 1.0, single);
        }

        #[test]
        fn cliquishness_in_unit_interval((n, edges) in arb_graph()) {
            let g = net(n, &edges);
            let all: Vec<usize> = (0..n).collect();
            let c = cliquishness(&g, &all).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }
    }
}
