//! Agglomerative clustering of classes by call-profile similarity.
//!
//! Each class gets a profile row: the summed call count (both directions,
//! both edge kinds, self-edges ignored) to every other class, plus a weight
//! of 1 on itself. Class distance is `1 - cosine(row_a, row_b)`. Clusters are
//! merged closest-first under the chosen linkage (Lance-Williams updates),
//! the tree is cut by a distance threshold or a target cluster count, and
//! clusters below `min_cluster_size` are folded into their nearest neighbour.

use serde::{Deserialize, Serialize};

use super::{labels_to_decomposition, require_classes, DecomposeError};
use crate::model::{Decomposition, MonolithGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutCriterion {
    /// Keep merging while the closest pair is strictly nearer than the threshold.
    DistanceThreshold(f64),
    /// Keep merging until this many clusters remain.
    TargetClusters(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalParams {
    pub linkage: Linkage,
    pub cut: CutCriterion,
    pub min_cluster_size: usize,
}

impl Default for HierarchicalParams {
    fn default() -> Self {
        Self {
            linkage: Linkage::Average,
            cut: CutCriterion::DistanceThreshold(0.5),
            min_cluster_size: 1,
        }
    }
}

fn profile_distances(graph: &MonolithGraph) -> Vec<f64> {
    let n = graph.class_count();
    let mut rows = vec![0.0f64; n * n];
    for i in 0..n {
        rows[i * n + i] = 1.0;
    }
    for e in graph.indexed_edges() {
        if !e.is_self_edge() {
            rows[e.src * n + e.dst] += e.count as f64;
            rows[e.dst * n + e.src] += e.count as f64;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|i| rows[i * n..(i + 1) * n].iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (&rows[i * n..(i + 1) * n], &rows[j * n..(j + 1) * n]);
            let dot: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
            let d = (1.0 - dot / (norms[i] * norms[j])).clamp(0.0, 1.0);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    dist
}

struct Agglomeration {
    n: usize,
    linkage: Linkage,
    dist: Vec<f64>,
    members: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Agglomeration {
    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&c| self.alive[c])
    }

    fn count(&self) -> usize {
        self.live().count()
    }

    /// Closest live pair `(a, b)` with `a < b`; first pair in index order wins ties.
    fn closest(&self) -> Option<(usize, usize, f64)> {
        let live: Vec<usize> = self.live().collect();
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, &a) in live.iter().enumerate() {
            for &b in &live[i + 1..] {
                let d = self.d(a, b);
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((a, b, d));
                }
            }
        }
        best
    }

    /// Merges cluster `b` into `a`.
    fn merge(&mut self, a: usize, b: usize) {
        let (na, nb) = (self.members[a].len() as f64, self.members[b].len() as f64);
        for x in 0..self.n {
            if !self.alive[x] || x == a || x == b {
                continue;
            }
            let (dax, dbx) = (self.d(a, x), self.d(b, x));
            let updated = match self.linkage {
                Linkage::Average => (na * dax + nb * dbx) / (na + nb),
                Linkage::Single => dax.min(dbx),
                Linkage::Complete => dax.max(dbx),
            };
            self.dist[a * self.n + x] = updated;
            self.dist[x * self.n + a] = updated;
        }
        let moved = std::mem::take(&mut self.members[b]);
        self.members[a].extend(moved);
        self.alive[b] = false;
    }

    /// Folds clusters smaller than `min_size` into their nearest cluster,
    /// smallest first.
    fn absorb_small(&mut self, min_size: usize) {
        while self.count() > 1 {
            let Some(small) = self
                .live()
                .filter(|&c| self.members[c].len() < min_size)
                .min_by_key(|&c| (self.members[c].len(), c))
            else {
                return;
            };
            let nearest = self
                .live()
                .filter(|&c| c != small)
                .min_by(|&x, &y| self.d(small, x).total_cmp(&self.d(small, y)).then(x.cmp(&y)))
                .expect("at least two clusters");
            let (keep, drop) = (small.min(nearest), small.max(nearest));
            self.merge(keep, drop);
        }
    }
}

pub fn decompose_hierarchical(
    graph: &MonolithGraph,
    params: &HierarchicalParams,
) -> Result<Decomposition, DecomposeError> {
    require_classes(graph)?;
    let n = graph.class_count();
    match params.cut {
        CutCriterion::DistanceThreshold(t) if !(t > 0.0 && t <= 1.0) => {
            return Err(DecomposeError::BadThreshold(t));
        }
        CutCriterion::TargetClusters(k) if k == 0 || k > n => {
            return Err(DecomposeError::BadK { k, classes: n });
        }
        _ => {}
    }
    if params.min_cluster_size == 0 {
        return Err(DecomposeError::InvalidParams("min_cluster_size must be >= 1".into()));
    }

    let mut agg = Agglomeration {
        n,
        linkage: params.linkage,
        dist: profile_distances(graph),
        members: (0..n).map(|c| vec![c]).collect(),
        alive: vec![true; n],
    };

    while let Some((a, b, d)) = agg.closest() {
        let stop = match params.cut {
            CutCriterion::DistanceThreshold(t) => d >= t,
            CutCriterion::TargetClusters(k) => agg.count() <= k,
        };
        if stop {
            break;
        }
        agg.merge(a, b);
    }
    agg.absorb_small(params.min_cluster_size);

    let mut labels = vec![0; n];
    for c in agg.live().collect::<Vec<_>>() {
        for &m in &agg.members[c] {
            labels[m] = c;
        }
    }
    Ok(labels_to_decomposition("hierarchical", graph, &labels))
}
