//! Decomposition quality metrics: structural modularity (SM), interface
//! number (IFN), inter-partition communication (ICP) and non-extreme
//! distribution (NED).
//!
//! Every metric returns a breakdown holding its intermediates so a reported
//! value can be audited by hand. Which edges feed which metric is controlled
//! by an [`EdgePolicy`] that is recorded in every [`MetricReport`].
//!
//! Conventions:
//!
//! - SM averages per-service cohesion `mu_i / m_i^2` and subtracts the mean
//!   pairwise coupling `gamma_ij / (2 m_i m_j)` over the `M(M-1)/2` unordered
//!   service pairs. `gamma_ij` counts calls in both directions. With a single
//!   service the coupling term is 0.
//! - A class is an interface of its service when at least one call from a
//!   different service targets it.
//! - ICP is the share of all calls that cross a service boundary. The
//!   per-pair shares of the inter-service calls are reported alongside.
//! - A service is non-extreme when its size lies in `[lo, hi]`, default `[5, 20]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_decomposition, Decomposition, EdgeKind, IndexedEdge, MonolithGraph, PartitionError, ValidatedPartition,
};

/// Edge weighting used for SM and IFN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmSource {
    /// Each static edge counts once regardless of its count.
    #[default]
    StaticDistinct,
    /// Static edges weighted by their count.
    StaticWeighted,
    /// Runtime edges weighted by their count.
    RuntimeWeighted,
}

/// Edge selection used for ICP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcpSource {
    /// Runtime counts when the graph has any runtime edge, static counts otherwise.
    #[default]
    RuntimeElseStatic,
    RuntimeOnly,
    StaticOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePolicy {
    pub sm_source: SmSource,
    pub icp_source: IcpSource,
    pub include_self_edges_in_cohesion: bool,
}

impl Default for EdgePolicy {
    fn default() -> Self {
        Self {
            sm_source: SmSource::default(),
            icp_source: IcpSource::default(),
            include_self_edges_in_cohesion: true,
        }
    }
}

impl EdgePolicy {
    /// Weight of `edge` in the SM/IFN call counts, or `None` if the edge is
    /// not considered under this policy.
    pub fn structural_weight(&self, edge: &IndexedEdge) -> Option<u64> {
        if edge.is_self_edge() && !self.include_self_edges_in_cohesion {
            return None;
        }
        match (self.sm_source, edge.kind) {
            (SmSource::StaticDistinct, EdgeKind::Static) => Some(1),
            (SmSource::StaticWeighted, EdgeKind::Static) => Some(edge.count),
            (SmSource::RuntimeWeighted, EdgeKind::Runtime) => Some(edge.count),
            _ => None,
        }
    }

    /// Edge kind whose counts feed ICP on `graph`.
    pub fn icp_kind(&self, graph: &MonolithGraph) -> Result<EdgeKind, MetricError> {
        match self.icp_source {
            IcpSource::StaticOnly => Ok(EdgeKind::Static),
            IcpSource::RuntimeOnly if graph.has_runtime_edges() => Ok(EdgeKind::Runtime),
            IcpSource::RuntimeOnly => Err(MetricError::NoRuntimeData),
            IcpSource::RuntimeElseStatic if graph.has_runtime_edges() => Ok(EdgeKind::Runtime),
            IcpSource::RuntimeElseStatic => Ok(EdgeKind::Static),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("runtime-only ICP requested but the graph has no runtime edges")]
    NoRuntimeData,
    #[error("invalid size window [{lo}, {hi}]: bounds must be positive and lo <= hi")]
    InvalidBounds { lo: usize, hi: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Calls between one unordered pair of services.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPair {
    pub a: usize,
    pub b: usize,
    /// Calls in both directions between services `a` and `b`.
    pub gamma: u64,
    pub scop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmBreakdown {
    pub sizes: Vec<usize>,
    /// Intra-service calls per service.
    pub mu: Vec<u64>,
    pub scoh: Vec<f64>,
    /// Unordered pairs `a < b` with at least one call between them. Absent
    /// pairs have `gamma = 0` and `scop = 0`.
    pub coupling_pairs: Vec<CouplingPair>,
    /// `(1/M) * sum(scoh)`.
    pub cohesion_term: f64,
    /// `sum(scop) / (M(M-1)/2)`, or 0 when `M = 1`.
    pub coupling_term: f64,
    pub sm: f64,
}

impl SmBreakdown {
    pub fn scop(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.coupling_pairs
            .iter()
            .find(|p| p.a == a && p.b == b)
            .map_or(0.0, |p| p.scop)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfnBreakdown {
    /// Interface class ids per service, in member order.
    pub interfaces: Vec<Vec<String>>,
    pub ifn_per_service: Vec<usize>,
    pub ifn: f64,
}

/// Calls from service `from` to service `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFraction {
    pub from: usize,
    pub to: usize,
    pub calls: u64,
    /// Share of all inter-service calls.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcpBreakdown {
    /// Edge kind whose counts were used.
    pub edge_kind: EdgeKind,
    /// Ordered pairs with at least one call, sorted by `(from, to)`.
    pub pair_fractions: Vec<PairFraction>,
    pub inter_calls: u64,
    pub total_calls: u64,
    pub aggregate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NedBounds {
    pub lo: usize,
    pub hi: usize,
}

impl Default for NedBounds {
    fn default() -> Self {
        Self { lo: 5, hi: 20 }
    }
}

impl NedBounds {
    pub fn new(lo: usize, hi: usize) -> Result<Self, MetricError> {
        if lo == 0 || hi == 0 || lo > hi {
            return Err(MetricError::InvalidBounds { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, size: usize) -> bool {
        (self.lo..=self.hi).contains(&size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NedBreakdown {
    pub sizes: Vec<usize>,
    pub non_extreme_count: usize,
    pub bounds: NedBounds,
    pub ned: f64,
}

/// All four metrics for one decomposition of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub system: String,
    pub tool: String,
    pub policy: EdgePolicy,
    pub micro: usize,
    pub services: Vec<String>,
    pub sm: SmBreakdown,
    pub ifn: IfnBreakdown,
    pub icp: IcpBreakdown,
    pub ned: NedBreakdown,
}

impl MetricReport {
    /// `[SM, IFN, ICP, NED]`.
    pub fn values(&self) -> [f64; 4] {
        [self.sm.sm, self.ifn.ifn, self.icp.aggregate, self.ned.ned]
    }
}

fn check_partition(graph: &MonolithGraph, partition: &ValidatedPartition) {
    assert_eq!(
        graph.class_count(),
        partition.class_count(),
        "partition was validated against a different graph"
    );
}

pub fn compute_sm(graph: &MonolithGraph, partition: &ValidatedPartition, policy: &EdgePolicy) -> SmBreakdown {
    check_partition(graph, partition);
    let m = partition.service_count();
    let sizes = partition.sizes();
    let mut mu = vec![0u64; m];
    // Upper triangle of the service-pair call matrix, row-major.
    let mut gamma = vec![0u64; m * m];

    for edge in graph.indexed_edges() {
        let Some(w) = policy.structural_weight(edge) else {
            continue;
        };
        let (a, b) = (partition.service_of(edge.src), partition.service_of(edge.dst));
        if a == b {
            mu[a] += w;
        } else {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            gamma[lo * m + hi] += w;
        }
    }

    let scoh: Vec<f64> = mu
        .iter()
        .zip(&sizes)
        .map(|(&mu, &size)| mu as f64 / (size * size) as f64)
        .collect();

    let mut coupling_pairs = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let g = gamma[a * m + b];
            if g > 0 {
                coupling_pairs.push(CouplingPair {
                    a,
                    b,
                    gamma: g,
                    scop: g as f64 / (2 * sizes[a] * sizes[b]) as f64,
                });
            }
        }
    }

    let cohesion_term = scoh.iter().sum::<f64>() / m as f64;
    let coupling_term = if m > 1 {
        let pairs = (m * (m - 1)) as f64 / 2.0;
        coupling_pairs.iter().map(|p| p.scop).sum::<f64>() / pairs
    } else {
        0.0
    };

    SmBreakdown {
        sizes,
        mu,
        scoh,
        coupling_pairs,
        cohesion_term,
        coupling_term,
        sm: cohesion_term - coupling_term,
    }
}

pub fn compute_ifn(graph: &MonolithGraph, partition: &ValidatedPartition, policy: &EdgePolicy) -> IfnBreakdown {
    check_partition(graph, partition);
    let mut exposed = vec![false; graph.class_count()];
    for edge in graph.indexed_edges() {
        if policy.structural_weight(edge).is_some() && partition.service_of(edge.src) != partition.service_of(edge.dst)
        {
            exposed[edge.dst] = true;
        }
    }

    let interfaces: Vec<Vec<String>> = (0..partition.service_count())
        .map(|s| {
            partition
                .members(s)
                .iter()
                .filter(|&&c| exposed[c])
                .map(|&c| graph.class_id(c).to_owned())
                .collect()
        })
        .collect();
    let ifn_per_service: Vec<usize> = interfaces.iter().map(Vec::len).collect();
    let ifn = ifn_per_service.iter().sum::<usize>() as f64 / partition.service_count() as f64;

    IfnBreakdown {
        interfaces,
        ifn_per_service,
        ifn,
    }
}

pub fn compute_icp(
    graph: &MonolithGraph,
    partition: &ValidatedPartition,
    policy: &EdgePolicy,
) -> Result<IcpBreakdown, MetricError> {
    check_partition(graph, partition);
    let kind = policy.icp_kind(graph)?;
    let m = partition.service_count();
    let mut calls = vec![0u64; m * m];
    let mut total_calls = 0u64;
    let mut inter_calls = 0u64;

    for edge in graph.indexed_edges().iter().filter(|e| e.kind == kind) {
        total_calls += edge.count;
        let (a, b) = (partition.service_of(edge.src), partition.service_of(edge.dst));
        if a != b {
            inter_calls += edge.count;
            calls[a * m + b] += edge.count;
        }
    }

    let mut pair_fractions = Vec::new();
    if inter_calls > 0 {
        for from in 0..m {
            for to in 0..m {
                let c = calls[from * m + to];
                if c > 0 {
                    pair_fractions.push(PairFraction {
                        from,
                        to,
                        calls: c,
                        fraction: c as f64 / inter_calls as f64,
                    });
                }
            }
        }
    }

    let aggregate = if total_calls == 0 {
        0.0
    } else {
        inter_calls as f64 / total_calls as f64
    };

    Ok(IcpBreakdown {
        edge_kind: kind,
        pair_fractions,
        inter_calls,
        total_calls,
        aggregate,
    })
}

pub fn compute_ned(partition: &ValidatedPartition, bounds: NedBounds) -> Result<NedBreakdown, MetricError> {
    // Re-check in case the bounds were built with a struct literal.
    let bounds = NedBounds::new(bounds.lo, bounds.hi)?;
    let sizes = partition.sizes();
    let non_extreme_count = sizes.iter().filter(|&&s| bounds.contains(s)).count();
    let ned = 1.0 - non_extreme_count as f64 / sizes.len() as f64;
    Ok(NedBreakdown {
        sizes,
        non_extreme_count,
        bounds,
        ned,
    })
}

/// Computes all four metrics on an already validated partition.
pub fn evaluate_partition(
    graph: &MonolithGraph,
    partition: &ValidatedPartition,
    policy: &EdgePolicy,
) -> Result<MetricReport, MetricError> {
    Ok(MetricReport {
        system: partition.system().to_owned(),
        tool: partition.tool().to_owned(),
        policy: *policy,
        micro: partition.service_count(),
        services: partition.service_names().to_vec(),
        sm: compute_sm(graph, partition, policy),
        ifn: compute_ifn(graph, partition, policy),
        icp: compute_icp(graph, partition, policy)?,
        ned: compute_ned(partition, NedBounds::default())?,
    })
}

/// Validates `decomposition` against `graph`, then computes every metric.
pub fn evaluate_all(
    graph: &MonolithGraph,
    decomposition: &Decomposition,
    policy: &EdgePolicy,
) -> Result<MetricReport, MetricError> {
    let partition = validate_decomposition(graph, decomposition)?;
    evaluate_partition(graph, &partition, policy)
}
