//! Hierarchical clustering of terms by their document-occurrence rows.

mod newick;
mod render;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::TermDocumentMatrix;

pub use newick::to_newick;
pub use render::render_dendrogram_svg;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("need at least 2 terms to cluster, got {0}")]
    TooFewTerms(usize),
    #[error("k must be in 1..={leaves}, got {k}")]
    InvalidK { k: usize, leaves: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidDistances(String),
}

/// Symmetric, zero-diagonal, finite, non-negative distances between labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// `values` is row-major, `labels.len()²` long.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self, ClusterError> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(ClusterError::InvalidDistances(format!(
                "{} values for {n} labels",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(ClusterError::InvalidDistances(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(ClusterError::InvalidDistances(format!("d({i},{j}) = {v}")));
                }
                if v != values[j * n + i] {
                    return Err(ClusterError::InvalidDistances(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    /// Builds from the strict upper triangle, row by row.
    pub fn from_condensed(labels: Vec<String>, condensed: &[f64]) -> Result<Self, ClusterError> {
        let n = labels.len();
        if condensed.len() != n * n.saturating_sub(1) / 2 {
            return Err(ClusterError::InvalidDistances(format!(
                "{} condensed values for {n} labels",
                condensed.len()
            )));
        }
        let mut values = vec![0.0; n * n];
        let mut it = condensed.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().expect("length checked");
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DistanceMatrix::new(labels, values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }
}

/// Euclidean distance between term count rows.
///
/// Squared distances are accumulated in integers, so identical rows are
/// exactly 0 apart.
pub fn term_distances(tdm: &TermDocumentMatrix) -> Result<DistanceMatrix, ClusterError> {
    let n = tdm.n_terms();
    if n < 2 {
        return Err(ClusterError::TooFewTerms(n));
    }
    let norms: Vec<u64> = (0..n)
        .map(|t| tdm.row(t).iter().map(|p| u64::from(p.count).pow(2)).sum())
        .collect();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dot = dot(tdm, i, j);
            let sq = norms[i] + norms[j] - 2 * dot;
            let d = (sq as f64).sqrt();
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix::new(tdm.terms().to_vec(), values)
}

fn dot(tdm: &TermDocumentMatrix, a: usize, b: usize) -> u64 {
    let (ra, rb) = (tdm.row(a), tdm.row(b));
    let (mut i, mut j, mut sum) = (0, 0, 0u64);
    while i < ra.len() && j < rb.len() {
        match ra[i].doc.cmp(&rb[j].doc) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += u64::from(ra[i].count) * u64::from(rb[j].count);
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    Average,
    #[default]
    Ward,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward];

    /// Lance–Williams recurrence: distance from cluster `k` to the union of
    /// `i` and `j`, given the pre-merge distances and cluster sizes.
    fn update(self, d_ki: f64, d_kj: f64, d_ij: f64, n_i: usize, n_j: usize, n_k: usize) -> f64 {
        match self {
            Linkage::Single => d_ki.min(d_kj),
            Linkage::Complete => d_ki.max(d_kj),
            Linkage::Average => (n_i as f64 * d_ki + n_j as f64 * d_kj) / (n_i + n_j) as f64,
            Linkage::Ward => {
                // Applied to squared Euclidean distances.
                let (ni, nj, nk) = (n_i as f64, n_j as f64, n_k as f64);
                let sq = ((ni + nk) * d_ki * d_ki + (nj + nk) * d_kj * d_kj - nk * d_ij * d_ij) / (ni + nj + nk);
                sq.max(0.0).sqrt()
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Ward => "ward",
        })
    }
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Linkage::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| format!("unknown linkage {s:?} (expected single, complete, average or ward)"))
    }
}

/// A leaf or an earlier merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRef {
    Leaf(usize),
    Merge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: NodeRef,
    pub right: NodeRef,
    pub height: f64,
    /// Number of leaves under this merge.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    /// `leaves.len() - 1` merges; merge `m` may only reference merges `< m`.
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn root(&self) -> NodeRef {
        match self.merges.len() {
            0 => NodeRef::Leaf(0),
            m => NodeRef::Merge(m - 1),
        }
    }

    pub fn height(&self, node: NodeRef) -> f64 {
        match node {
            NodeRef::Leaf(_) => 0.0,
            NodeRef::Merge(m) => self.merges[m].height,
        }
    }

    /// Leaf indices in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.leaves.len());
        let mut stack = vec![self.root()];
        while let Some(node) = stack.pop() {
            match node {
                NodeRef::Leaf(i) => order.push(i),
                NodeRef::Merge(m) => {
                    stack.push(self.merges[m].right);
                    stack.push(self.merges[m].left);
                }
            }
        }
        order
    }
}

/// Agglomerative clustering with Lance–Williams updates.
///
/// Each step merges the closest pair of active clusters; ties go to the
/// smallest `(i, j)` slot pair. The merged cluster takes slot `i`. Updated
/// distances are floored at the merge height: all four linkages are
/// reducible, so this only absorbs floating-point rounding and keeps heights
/// monotone.
pub fn agglomerate(dist: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = dist.len();
    if n < 2 {
        return Err(ClusterError::TooFewTerms(n));
    }
    let mut d = dist.values.clone();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<NodeRef> = (0..n).map(NodeRef::Leaf).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in (i + 1..n).filter(|&j| active[j]) {
                let v = d[i * n + j];
                if best.map_or(true, |(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        let (i, j, height) = best.expect("at least two active clusters");

        merges.push(Merge {
            left: node[i],
            right: node[j],
            height,
            size: size[i] + size[j],
        });
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let updated = linkage
                .update(d[k * n + i], d[k * n + j], height, size[i], size[j], size[k])
                .max(height);
            d[k * n + i] = updated;
            d[i * n + k] = updated;
        }
        active[j] = false;
        size[i] += size[j];
        node[i] = NodeRef::Merge(step);
    }

    Ok(Dendrogram {
        leaves: dist.labels.clone(),
        merges,
    })
}

/// Flat clustering obtained by cutting a dendrogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clusters {
    pub labels: Vec<String>,
    /// Cluster id per label, in `0..k`.
    pub assignment: Vec<usize>,
    pub k: usize,
}

impl Clusters {
    pub fn cluster_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| self.assignment[i])
    }

    /// Members of each cluster, in label order.
    pub fn groups(&self) -> Vec<Vec<&str>> {
        let mut groups = vec![Vec::new(); self.k];
        for (label, &c) in self.labels.iter().zip(&self.assignment) {
            groups[c].push(label.as_str());
        }
        groups
    }
}

/// Undoes the last `k - 1` merges. Cluster ids follow the order in which
/// each cluster's first leaf appears in `dendro.leaves`.
pub fn cut_tree(dendro: &Dendrogram, k: usize) -> Result<Clusters, ClusterError> {
    let n = dendro.leaves.len();
    if k == 0 || k > n {
        return Err(ClusterError::InvalidK { k, leaves: n });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // Any leaf under each merge serves as its representative.
    let mut rep = Vec::with_capacity(dendro.merges.len());
    let leaf_of = |node: NodeRef, rep: &[usize]| match node {
        NodeRef::Leaf(i) => i,
        NodeRef::Merge(m) => rep[m],
    };
    for merge in &dendro.merges {
        rep.push(leaf_of(merge.left, &rep));
    }
    for merge in &dendro.merges[..n - k] {
        let a = find(&mut parent, leaf_of(merge.left, &rep));
        let b = find(&mut parent, leaf_of(merge.right, &rep));
        parent[b] = a;
    }

    let mut ids: Vec<Option<usize>> = vec![None; n];
    let mut next = 0;
    let mut assignment = Vec::with_capacity(n);
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let id = *ids[root].get_or_insert_with(|| {
            next += 1;
            next - 1
        });
        assignment.push(id);
    }
    Ok(Clusters {
        labels: dendro.leaves.clone(),
        assignment,
        k,
    })
}
