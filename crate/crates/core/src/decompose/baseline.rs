use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{labels_to_decomposition, require_classes, DecomposeError};
use crate::model::{Decomposition, MonolithGraph};

/// Everything in one service.
pub fn decompose_monolith(graph: &MonolithGraph) -> Result<Decomposition, DecomposeError> {
    require_classes(graph)?;
    Ok(labels_to_decomposition(
        "monolith",
        graph,
        &vec![0; graph.class_count()],
    ))
}

/// One service per class.
pub fn decompose_singletons(graph: &MonolithGraph) -> Result<Decomposition, DecomposeError> {
    require_classes(graph)?;
    let labels: Vec<usize> = (0..graph.class_count()).collect();
    Ok(labels_to_decomposition("singletons", graph, &labels))
}

/// Uniform random assignment of `n` classes to `k` buckets. Buckets left
/// empty are filled by taking the most recently assigned class of the
/// currently largest bucket, so exactly `k` buckets are non-empty.
pub fn random_labels(n: usize, k: usize, seed: u64) -> Result<Vec<usize>, DecomposeError> {
    if k == 0 || k > n {
        return Err(DecomposeError::BadK { k, classes: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class in 0..n {
        buckets[rng.random_range(0..k)].push(class);
    }
    for empty in 0..k {
        if !buckets[empty].is_empty() {
            continue;
        }
        let largest = (0..k)
            .max_by(|&a, &b| buckets[a].len().cmp(&buckets[b].len()).then(b.cmp(&a)))
            .expect("k >= 1");
        let moved = buckets[largest].pop().expect("largest bucket has >= 2 members");
        buckets[empty].push(moved);
    }
    let mut labels = vec![0; n];
    for (b, members) in buckets.iter().enumerate() {
        for &c in members {
            labels[c] = b;
        }
    }
    Ok(labels)
}

/// Seeded random decomposition into exactly `k` services.
pub fn decompose_random(graph: &MonolithGraph, k: usize, seed: u64) -> Result<Decomposition, DecomposeError> {
    let labels = random_labels(graph.class_count(), k, seed)?;
    Ok(labels_to_decomposition("random", graph, &labels))
}
