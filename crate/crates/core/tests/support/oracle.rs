//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works from a raw edge list and a per-class block label,
//! evaluating each metric straight from its defining formula. Nothing from
//! the library's metric or search code is used.

#![allow(dead_code)]

use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawEdge {
    pub src: usize,
    pub dst: usize,
    pub runtime: bool,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMetrics {
    pub sm: f64,
    pub ifn: f64,
    pub icp: f64,
    pub ned: f64,
}

fn blocks(labels: &[usize]) -> Vec<usize> {
    labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn size_of(labels: &[usize], b: usize) -> usize {
    labels.iter().filter(|&&l| l == b).count()
}

/// Structural modularity with distinct static edges: every static edge counts
/// once, self-edges count toward the cohesion of their block.
pub fn sm(edges: &[RawEdge], labels: &[usize]) -> f64 {
    let bs = blocks(labels);
    let m = bs.len() as f64;
    let statics: Vec<&RawEdge> = edges.iter().filter(|e| !e.runtime).collect();

    let mut cohesion = 0.0;
    for &b in &bs {
        let mut calls_within = 0u64;
        for e in &statics {
            if labels[e.src] == b && labels[e.dst] == b {
                calls_within += 1;
            }
        }
        let size = size_of(labels, b) as f64;
        cohesion += calls_within as f64 / (size * size);
    }

    let mut coupling = 0.0;
    for (x, &bi) in bs.iter().enumerate() {
        for &bj in &bs[x + 1..] {
            let mut calls_between = 0u64;
            for e in &statics {
                let (ls, ld) = (labels[e.src], labels[e.dst]);
                if (ls == bi && ld == bj) || (ls == bj && ld == bi) {
                    calls_between += 1;
                }
            }
            let (si, sj) = (size_of(labels, bi) as f64, size_of(labels, bj) as f64);
            coupling += calls_between as f64 / (2.0 * si * sj);
        }
    }

    let coupling_term = if bs.len() > 1 {
        coupling / (m * (m - 1.0) / 2.0)
    } else {
        0.0
    };
    cohesion / m - coupling_term
}

/// Mean number of classes per block that receive a static call from another block.
pub fn ifn(n: usize, edges: &[RawEdge], labels: &[usize]) -> f64 {
    let bs = blocks(labels);
    let mut total = 0usize;
    for &b in &bs {
        for class in 0..n {
            if labels[class] != b {
                continue;
            }
            let exposed = edges.iter().any(|e| !e.runtime && e.dst == class && labels[e.src] != b);
            if exposed {
                total += 1;
            }
        }
    }
    total as f64 / bs.len() as f64
}

/// Fraction of calls crossing block boundaries, using runtime counts when any
/// runtime edge exists and static counts otherwise.
pub fn icp(edges: &[RawEdge], labels: &[usize]) -> f64 {
    let use_runtime = edges.iter().any(|e| e.runtime);
    let mut inter = 0u64;
    let mut total = 0u64;
    for e in edges.iter().filter(|e| e.runtime == use_runtime) {
        total += e.count;
        if labels[e.src] != labels[e.dst] {
            inter += e.count;
        }
    }
    if total == 0 {
        0.0
    } else {
        inter as f64 / total as f64
    }
}

/// Ordered pairwise inter-block call shares, same edge selection as [`icp`].
pub fn icp_pairs(edges: &[RawEdge], labels: &[usize]) -> Vec<((usize, usize), f64)> {
    let use_runtime = edges.iter().any(|e| e.runtime);
    let bs = blocks(labels);
    let mut counts = Vec::new();
    let mut denom = 0u64;
    for &bi in &bs {
        for &bj in &bs {
            if bi == bj {
                continue;
            }
            let c: u64 = edges
                .iter()
                .filter(|e| e.runtime == use_runtime && labels[e.src] == bi && labels[e.dst] == bj)
                .map(|e| e.count)
                .sum();
            denom += c;
            counts.push(((bi, bj), c));
        }
    }
    counts
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|(k, c)| (k, c as f64 / denom as f64))
        .collect()
}

pub fn ned(labels: &[usize], lo: usize, hi: usize) -> f64 {
    let bs = blocks(labels);
    let non_extreme = bs
        .iter()
        .filter(|&&b| {
            let s = size_of(labels, b);
            lo <= s && s <= hi
        })
        .count();
    1.0 - non_extreme as f64 / bs.len() as f64
}

pub fn all(n: usize, edges: &[RawEdge], labels: &[usize]) -> OracleMetrics {
    OracleMetrics {
        sm: sm(edges, labels),
        ifn: ifn(n, edges, labels),
        icp: icp(edges, labels),
        ned: ned(labels, 5, 20),
    }
}

/// All set partitions of `n` elements as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for label in 0..=max + 1 {
            if pos == 0 && label > 0 {
                break;
            }
            cur.push(label);
            let next_max = if pos == 0 { 0 } else { max.max(label) };
            rec(pos + 1, n, next_max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(0, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Canonical form of a labelling: the set of member sets.
pub fn canonical(labels: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    blocks(labels)
        .into_iter()
        .map(|b| (0..labels.len()).filter(|&c| labels[c] == b).collect())
        .collect()
}

/// Connected components of the undirected version of the edge list.
pub fn components(n: usize, edges: &[RawEdge]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for e in edges {
            let m = label[e.src].min(label[e.dst]);
            if label[e.src] != m || label[e.dst] != m {
                label[e.src] = m;
                label[e.dst] = m;
                changed = true;
            }
        }
        if !changed {
            return label;
        }
    }
}

#[test]
fn bell_numbers() {
    let counts: Vec<usize> = (0..=8).map(|n| set_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 15, 52, 203, 877, 4140]);
}
