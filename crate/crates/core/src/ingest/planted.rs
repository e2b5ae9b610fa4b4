use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{CallEdge, ClassNode, Decomposition, EdgeKind, MonolithGraph, Service};

/// Parameters of a planted-partition monolith: `services` blocks with sizes
/// drawn from `size_range`, directed edges within a block with probability
/// `p_intra` and across blocks with probability `p_inter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub services: usize,
    pub size_range: (usize, usize),
    pub p_intra: f64,
    pub p_inter: f64,
    /// When set, every sampled edge also gets a runtime edge with a count
    /// drawn uniformly from this inclusive range.
    pub runtime_count_range: Option<(u64, u64)>,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(services: usize, size_range: (usize, usize), p_intra: f64, p_inter: f64, seed: u64) -> Self {
        Self {
            services,
            size_range,
            p_intra,
            p_inter,
            runtime_count_range: None,
            seed,
        }
    }

    fn check(&self) -> Result<(), IngestError> {
        let bad = |m: &str| Err(IngestError::BadSpec(m.into()));
        if self.services == 0 {
            return bad("services must be >= 1");
        }
        let (lo, hi) = self.size_range;
        if lo == 0 || lo > hi {
            return bad("size range must satisfy 1 <= min <= max");
        }
        if !(0.0..=1.0).contains(&self.p_inter) || !(0.0..=1.0).contains(&self.p_intra) {
            return bad("probabilities must lie in [0, 1]");
        }
        if self.p_inter > self.p_intra {
            return bad("p_inter must not exceed p_intra");
        }
        if let Some((lo, hi)) = self.runtime_count_range {
            if lo == 0 || lo > hi {
                return bad("runtime count range must satisfy 1 <= min <= max");
            }
        }
        Ok(())
    }
}

/// Samples a graph and its ground-truth decomposition. Output is fully
/// determined by `spec`.
pub fn generate_planted(spec: &PlantedSpec) -> Result<(MonolithGraph, Decomposition), IngestError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.size_range;
    let sizes: Vec<usize> = (0..spec.services).map(|_| rng.random_range(lo..=hi)).collect();

    let mut ids = Vec::new();
    let mut block_of = Vec::new();
    let mut services = Vec::with_capacity(sizes.len());
    for (b, &size) in sizes.iter().enumerate() {
        let members: Vec<String> = (0..size).map(|i| format!("b{b}_c{i}")).collect();
        block_of.extend(std::iter::repeat_n(b, size));
        ids.extend(members.iter().cloned());
        services.push(Service::new(format!("block-{b}"), members));
    }

    let mut edges = Vec::new();
    for u in 0..ids.len() {
        for v in 0..ids.len() {
            if u == v {
                continue;
            }
            let p = if block_of[u] == block_of[v] {
                spec.p_intra
            } else {
                spec.p_inter
            };
            if rng.random::<f64>() < p {
                edges.push(CallEdge::static_dep(&ids[u], &ids[v]));
                if let Some((clo, chi)) = spec.runtime_count_range {
                    let count = rng.random_range(clo..=chi);
                    edges.push(CallEdge::new(&ids[u], &ids[v], EdgeKind::Runtime, count));
                }
            }
        }
    }

    let name = format!("planted-{}", spec.seed);
    let classes = ids.into_iter().map(ClassNode::new).collect();
    let graph = MonolithGraph::new(name.clone(), classes, edges)?;
    Ok((graph, Decomposition::new("planted", name, services)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::save_graph;
    use crate::metrics::{evaluate_all, EdgePolicy};

    #[test]
    fn seeded_generation_is_reproducible() {
        let mut spec = PlantedSpec::new(4, (3, 7), 0.6, 0.1, 11);
        spec.runtime_count_range = Some((1, 50));
        let (g1, t1) = generate_planted(&spec).unwrap();
        let (g2, t2) = generate_planted(&spec).unwrap();
        assert_eq!(save_graph(&g1), save_graph(&g2));
        assert_eq!(t1, t2);
        assert!(g1.has_runtime_edges());
        spec.seed = 12;
        assert_ne!(save_graph(&generate_planted(&spec).unwrap().0), save_graph(&g1));
    }

    #[test]
    fn no_cross_edges_means_zero_icp() {
        let (g, truth) = generate_planted(&PlantedSpec::new(4, (2, 6), 0.7, 0.0, 3)).unwrap();
        let r = evaluate_all(&g, &truth, &EdgePolicy::default()).unwrap();
        assert_eq!(r.icp.aggregate, 0.0);
    }

    #[test]
    fn fixed_sizes_inside_window() {
        let (g, truth) = generate_planted(&PlantedSpec::new(3, (5, 5), 0.5, 0.1, 9)).unwrap();
        assert_eq!(g.class_count(), 15);
        assert!(truth.services.iter().all(|s| s.classes.len() == 5));
        let r = evaluate_all(&g, &truth, &EdgePolicy::default()).unwrap();
        assert_eq!(r.ned.ned, 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in [
            PlantedSpec::new(0, (1, 2), 0.5, 0.1, 0),
            PlantedSpec::new(2, (0, 2), 0.5, 0.1, 0),
            PlantedSpec::new(2, (3, 2), 0.5, 0.1, 0),
            PlantedSpec::new(2, (1, 2), 0.1, 0.5, 0),
            PlantedSpec::new(2, (1, 2), 1.5, 0.1, 0),
            PlantedSpec {
                runtime_count_range: Some((0, 3)),
                ..PlantedSpec::new(2, (1, 2), 0.5, 0.1, 0)
            },
        ] {
            assert!(
                matches!(generate_planted(&spec), Err(IngestError::BadSpec(_))),
                "{spec:?}"
            );
        }
    }
}
