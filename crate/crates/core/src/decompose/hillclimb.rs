//! Steepest-ascent relocation search on structural modularity.
//!
//! Even restarts start from a seeded random partition; odd restarts start
//! from a seeded label-propagation partition, which lands near dense
//! communities that pure relocation rarely assembles from noise. Every
//! restart then repeatedly applies the single-class relocation (to another existing service or to a fresh
//! one) that raises SM the most, until no move improves SM or the iteration
//! cap is reached. The best final partition over all restarts wins, ties
//! going to the earliest restart.
//!
//! Candidate moves are scored incrementally: moving class `c` from service
//! `a` to `b` only changes cohesion of `a` and `b` and the coupling terms of
//! pairs that involve `a` or `b`. With the per-service sums
//! `G_s = sum_x gamma_sx / m_x` cached, and `c`'s links to every service
//! folded into one weighted total, each candidate costs O(1).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::baseline::random_labels;
use super::{labels_to_decomposition, require_classes, DecomposeError};
use crate::metrics::{compute_sm, EdgePolicy};
use crate::model::{Decomposition, MonolithGraph, ValidatedPartition};

const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbParams {
    pub restarts: usize,
    /// Improving moves per restart; `None` means `10 * |classes|`.
    pub max_iterations: Option<usize>,
    pub min_services: Option<usize>,
    pub max_services: Option<usize>,
    pub seed: u64,
    /// Only `sm_source` and `include_self_edges_in_cohesion` matter here.
    pub policy: EdgePolicy,
}

impl Default for HillClimbParams {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: None,
            min_services: None,
            max_services: None,
            seed: 0,
            policy: EdgePolicy::default(),
        }
    }
}

impl HillClimbParams {
    /// Effective `(min, max)` service counts for a graph of `n` classes.
    fn bounds(&self, n: usize) -> Result<(usize, usize), DecomposeError> {
        let infeasible = || DecomposeError::InfeasibleBounds {
            min: self.min_services,
            max: self.max_services,
            classes: n,
        };
        let lo = self.min_services.unwrap_or(1);
        let hi = self.max_services.unwrap_or(n).min(n);
        if lo == 0 || self.max_services == Some(0) || lo > hi {
            return Err(infeasible());
        }
        Ok((lo, hi))
    }
}

/// Seed and service count of the starting partition for each restart.
///
/// Restart 0 uses `params.seed` itself, so with `min_services == max_services == k`
/// its starting point is exactly `decompose_random(graph, k, params.seed)`.
fn restart_plan(params: &HillClimbParams, lo: usize, hi: usize) -> Vec<(u64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5DEE_CE66_D1CE_4E5B);
    (0..params.restarts)
        .map(|r| {
            let k = rng.random_range(lo..=hi);
            let seed = if r == 0 { params.seed } else { rng.random() };
            (seed, k)
        })
        .collect()
}

/// Asynchronous label propagation over the affinity graph: classes are
/// visited in a seeded random order and adopt the label carrying the most
/// neighbour weight, keeping their own label when it is among the best and
/// otherwise breaking ties at random. Labels are compacted to `0..k`.
fn propagated_labels(aff: &Affinity, seed: u64) -> Vec<usize> {
    const SWEEPS: usize = 30;
    let n = aff.self_weight.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut weight = vec![0u64; n];
    let mut seen = Vec::new();
    for _ in 0..SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &c in &order {
            for &(other, w) in &aff.neighbours[c] {
                let l = labels[other];
                if weight[l] == 0 {
                    seen.push(l);
                }
                weight[l] += w;
            }
            let top = seen.iter().map(|&l| weight[l]).max().unwrap_or(0);
            if top > 0 && weight[labels[c]] < top {
                let best: Vec<usize> = seen.iter().copied().filter(|&l| weight[l] == top).collect();
                labels[c] = best[rng.random_range(0..best.len())];
                changed = true;
            }
            for l in seen.drain(..) {
                weight[l] = 0;
            }
        }
        if !changed {
            break;
        }
    }
    let mut remap = vec![usize::MAX; n];
    let mut next = 0;
    for l in &mut labels {
        if remap[*l] == usize::MAX {
            remap[*l] = next;
            next += 1;
        }
        *l = remap[*l];
    }
    labels
}

/// Undirected, weighted view of the graph under the SM edge policy.
struct Affinity {
    /// Neighbour weights excluding self-edges, both directions merged.
    neighbours: Vec<Vec<(usize, u64)>>,
    self_weight: Vec<u64>,
}

impl Affinity {
    fn new(graph: &MonolithGraph, policy: &EdgePolicy) -> Self {
        let n = graph.class_count();
        let mut merged: Vec<std::collections::BTreeMap<usize, u64>> = vec![Default::default(); n];
        let mut self_weight = vec![0; n];
        for edge in graph.indexed_edges() {
            let Some(w) = policy.structural_weight(edge) else {
                continue;
            };
            if edge.is_self_edge() {
                self_weight[edge.src] += w;
            } else {
                *merged[edge.src].entry(edge.dst).or_default() += w;
                *merged[edge.dst].entry(edge.src).or_default() += w;
            }
        }
        Self {
            neighbours: merged.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_weight,
        }
    }
}

fn coh(mu: u64, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        mu as f64 / (m * m) as f64
    }
}

fn pair_term(gamma: u64, ma: usize, mb: usize) -> f64 {
    if ma == 0 || mb == 0 {
        0.0
    } else {
        gamma as f64 / (ma * mb) as f64
    }
}

fn sm_value(cohesion_sum: f64, pair_sum: f64, m: usize) -> f64 {
    let mf = m as f64;
    let coupling = if m > 1 { pair_sum / (mf * (mf - 1.0)) } else { 0.0 };
    cohesion_sum / mf - coupling
}

/// Search state. Services live in fixed slots; empty slots are inactive.
struct Climber<'a> {
    aff: &'a Affinity,
    slots: usize,
    assign: Vec<usize>,
    size: Vec<usize>,
    mu: Vec<u64>,
    /// Symmetric slot-by-slot inter-service call counts.
    gamma: Vec<u64>,
    active: Vec<usize>,
    /// `sum over other active x of gamma[s][x] / size[x]`, per slot.
    reach: Vec<f64>,
    /// Scratch: weight from the class being moved to each slot.
    link: Vec<u64>,
    touched: Vec<usize>,
}

impl<'a> Climber<'a> {
    fn new(aff: &'a Affinity, labels: &[usize], slots: usize) -> Self {
        let mut c = Self {
            aff,
            slots,
            assign: labels.to_vec(),
            size: vec![0; slots],
            mu: vec![0; slots],
            gamma: vec![0; slots * slots],
            active: Vec::new(),
            reach: vec![0.0; slots],
            link: vec![0; slots],
            touched: Vec::new(),
        };
        for (class, &s) in labels.iter().enumerate() {
            c.size[s] += 1;
            c.mu[s] += aff.self_weight[class];
            for &(other, w) in &aff.neighbours[class] {
                // Each undirected pair is visited twice.
                if other > class {
                    let t = labels[other];
                    if t == s {
                        c.mu[s] += w;
                    } else {
                        c.gamma[s * slots + t] += w;
                        c.gamma[t * slots + s] += w;
                    }
                }
            }
        }
        c.refresh();
        c
    }

    fn refresh(&mut self) {
        self.active = (0..self.slots).filter(|&s| self.size[s] > 0).collect();
        for &s in &self.active {
            self.reach[s] = self
                .active
                .iter()
                .filter(|&&x| x != s)
                .map(|&x| self.g(s, x) as f64 / self.size[x] as f64)
                .sum();
        }
    }

    fn g(&self, a: usize, b: usize) -> u64 {
        self.gamma[a * self.slots + b]
    }

    fn sums(&self) -> (f64, f64) {
        let cohesion: f64 = self.active.iter().map(|&s| coh(self.mu[s], self.size[s])).sum();
        let mut pairs = 0.0;
        for (i, &a) in self.active.iter().enumerate() {
            for &b in &self.active[i + 1..] {
                pairs += pair_term(self.g(a, b), self.size[a], self.size[b]);
            }
        }
        (cohesion, pairs)
    }

    fn load_links(&mut self, class: usize) {
        for &s in &self.touched {
            self.link[s] = 0;
        }
        self.touched.clear();
        for &(other, w) in &self.aff.neighbours[class] {
            let s = self.assign[other];
            if self.link[s] == 0 {
                self.touched.push(s);
            }
            self.link[s] += w;
        }
    }

    /// `sum over touched x of link[x] / size[x]` for the loaded class.
    fn weighted_links(&self) -> f64 {
        self.touched
            .iter()
            .map(|&x| self.link[x] as f64 / self.size[x] as f64)
            .sum()
    }

    /// `(cohesion_sum delta, pair_sum delta)` for moving `class` (links
    /// loaded, `weighted` from [`Self::weighted_links`]) to slot `b`.
    fn move_delta(&self, class: usize, b: usize, weighted: f64) -> (f64, f64) {
        let a = self.assign[class];
        let (ma, mb) = (self.size[a], self.size[b]);
        let (ka, kb) = (self.link[a], self.link[b]);
        let sw = self.aff.self_weight[class];

        let mu_a = self.mu[a] - ka - sw;
        let mu_b = self.mu[b] + kb + sw;
        let d_coh = coh(mu_a, ma - 1) - coh(self.mu[a], ma) + coh(mu_b, mb + 1) - coh(self.mu[b], mb);

        let (maf, mbf) = (ma as f64, mb as f64);
        let gab = self.g(a, b);
        // Sums over third services x (neither a nor b).
        let (a_rest, b_rest, links_rest) = if mb == 0 {
            (self.reach[a], 0.0, weighted - ka as f64 / maf)
        } else {
            (
                self.reach[a] - gab as f64 / mbf,
                self.reach[b] - gab as f64 / maf,
                weighted - ka as f64 / maf - kb as f64 / mbf,
            )
        };
        let before = a_rest / maf + if mb == 0 { 0.0 } else { b_rest / mbf } + pair_term(gab, ma, mb);
        let after_a = if ma > 1 {
            (a_rest - links_rest) / (maf - 1.0)
        } else {
            0.0
        };
        let after = after_a + (b_rest + links_rest) / (mbf + 1.0) + pair_term(gab - kb + ka, ma - 1, mb + 1);
        (d_coh, after - before)
    }

    /// Reference O(M) version of [`Self::move_delta`].
    #[cfg(test)]
    fn move_delta_slow(&self, class: usize, b: usize) -> (f64, f64) {
        let a = self.assign[class];
        let (ma, mb) = (self.size[a], self.size[b]);
        let (ka, kb) = (self.link[a], self.link[b]);
        let sw = self.aff.self_weight[class];

        let mu_a = self.mu[a] - ka - sw;
        let mu_b = self.mu[b] + kb + sw;
        let d_coh = coh(mu_a, ma - 1) - coh(self.mu[a], ma) + coh(mu_b, mb + 1) - coh(self.mu[b], mb);

        let mut d_pair = 0.0;
        for &x in &self.active {
            if x == a || x == b {
                continue;
            }
            let mx = self.size[x];
            let kx = self.link[x];
            let (gax, gbx) = (self.g(a, x), self.g(b, x));
            d_pair += pair_term(gax - kx, ma - 1, mx) - pair_term(gax, ma, mx) + pair_term(gbx + kx, mb + 1, mx)
                - pair_term(gbx, mb, mx);
        }
        let gab = self.g(a, b);
        d_pair += pair_term(gab - kb + ka, ma - 1, mb + 1) - pair_term(gab, ma, mb);
        (d_coh, d_pair)
    }

    fn apply(&mut self, class: usize, b: usize) {
        self.load_links(class);
        let a = self.assign[class];
        let sw = self.aff.self_weight[class];
        let (ka, kb) = (self.link[a], self.link[b]);
        self.mu[a] -= ka + sw;
        self.mu[b] += kb + sw;
        for &x in &self.touched {
            let kx = self.link[x];
            if x != a && x != b {
                self.gamma[a * self.slots + x] -= kx;
                self.gamma[x * self.slots + a] -= kx;
                self.gamma[b * self.slots + x] += kx;
                self.gamma[x * self.slots + b] += kx;
            }
        }
        let gab = self.g(a, b) - kb + ka;
        self.gamma[a * self.slots + b] = gab;
        self.gamma[b * self.slots + a] = gab;
        self.size[a] -= 1;
        self.size[b] += 1;
        self.assign[class] = b;
        self.refresh();
    }

    fn climb(&mut self, lo: usize, hi: usize, max_iterations: usize) {
        let n = self.assign.len();
        for _ in 0..max_iterations {
            let (cohesion, pairs) = self.sums();
            let m = self.active.len();
            let current = sm_value(cohesion, pairs, m);
            let fresh = (0..self.slots).find(|&s| self.size[s] == 0);

            let mut best: Option<(f64, usize, usize)> = None;
            for class in 0..n {
                let a = self.assign[class];
                self.load_links(class);
                let weighted = self.weighted_links();
                let empties_a = self.size[a] == 1;
                let candidates = self.active.iter().copied().filter(|&b| b != a).chain(fresh);
                for b in candidates {
                    let to_fresh = self.size[b] == 0;
                    if to_fresh && empties_a {
                        continue;
                    }
                    let m_new = m - usize::from(empties_a) + usize::from(to_fresh);
                    if m_new < lo || m_new > hi {
                        continue;
                    }
                    let (dc, dp) = self.move_delta(class, b, weighted);
                    let value = sm_value(cohesion + dc, pairs + dp, m_new);
                    if value > current + IMPROVEMENT_EPS && best.is_none_or(|(v, _, _)| value > v) {
                        best = Some((value, class, b));
                    }
                }
            }
            match best {
                Some((_, class, b)) => self.apply(class, b),
                None => return,
            }
        }
    }
}

/// Best SM decomposition found by restarted steepest-ascent relocation.
pub fn decompose_hillclimb(graph: &MonolithGraph, params: &HillClimbParams) -> Result<Decomposition, DecomposeError> {
    require_classes(graph)?;
    if params.restarts == 0 {
        return Err(DecomposeError::InvalidParams("restarts must be >= 1".into()));
    }
    let n = graph.class_count();
    let (lo, hi) = params.bounds(n)?;
    let max_iterations = params.max_iterations.unwrap_or(10 * n);
    let aff = Affinity::new(graph, &params.policy);
    // One spare slot so a fresh service is available even at `hi` services.
    let slots = (hi + 1).min(n);

    let results: Vec<(f64, Vec<usize>)> = restart_plan(params, lo, hi)
        .into_par_iter()
        .enumerate()
        .map(|(restart, (seed, k))| {
            let labels = (restart % 2 == 1)
                .then(|| propagated_labels(&aff, seed))
                .filter(|lp| (lo..=hi).contains(&(lp.iter().max().map_or(0, |m| m + 1))))
                .unwrap_or_else(|| random_labels(n, k, seed).expect("k within 1..=n"));
            let mut climber = Climber::new(&aff, &labels, slots);
            climber.climb(lo, hi, max_iterations);
            let partition = ValidatedPartition::from_assignment("hillclimb", graph, &climber.assign);
            (compute_sm(graph, &partition, &params.policy).sm, climber.assign)
        })
        .collect();

    let mut best = 0;
    for (i, (sm, _)) in results.iter().enumerate() {
        if *sm > results[best].0 {
            best = i;
        }
    }
    Ok(labels_to_decomposition("hillclimb", graph, &results[best].1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_decomposition;

    fn sm_of(graph: &MonolithGraph, d: &Decomposition) -> f64 {
        let p = validate_decomposition(graph, d).unwrap();
        compute_sm(graph, &p, &EdgePolicy::default()).sm
    }

    fn cliques(sizes: &[usize]) -> MonolithGraph {
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        for (b, &s) in sizes.iter().enumerate() {
            let block: Vec<String> = (0..s).map(|i| format!("b{b}c{i}")).collect();
            for x in &block {
                for y in &block {
                    if x != y {
                        edges.push((x.clone(), y.clone()));
                    }
                }
            }
            ids.extend(block);
        }
        MonolithGraph::from_static_edges("cliques", &ids, &edges).unwrap()
    }

    #[test]
    fn incremental_delta_matches_recomputation() {
        let g = MonolithGraph::from_static_edges(
            "g",
            &["A", "B", "C", "D", "E"],
            &[
                ("A", "B"),
                ("B", "A"),
                ("B", "C"),
                ("C", "D"),
                ("D", "E"),
                ("E", "E"),
                ("A", "E"),
            ],
        )
        .unwrap();
        let policy = EdgePolicy::default();
        let aff = Affinity::new(&g, &policy);
        let labels = [0, 0, 1, 1, 2];
        let mut climber = Climber::new(&aff, &labels, 5);
        let (c0, p0) = climber.sums();
        for class in 0..5 {
            for b in 0..5 {
                if b == labels[class] || (climber.size[b] == 0 && climber.size[labels[class]] == 1) {
                    continue;
                }
                climber.load_links(class);
                let (dc, dp) = climber.move_delta(class, b, climber.weighted_links());
                let (sc, sp) = climber.move_delta_slow(class, b);
                assert!((dc - sc).abs() < 1e-12 && (dp - sp).abs() < 1e-12);
                let mut moved = labels.to_vec();
                moved[class] = b;
                let m_new = moved.iter().collect::<std::collections::BTreeSet<_>>().len();
                let p = ValidatedPartition::from_assignment("t", &g, &moved);
                let expect = compute_sm(&g, &p, &policy).sm;
                assert!((sm_value(c0 + dc, p0 + dp, m_new) - expect).abs() < 1e-12);
            }
        }
        climber.apply(4, 3);
        let p = ValidatedPartition::from_assignment("t", &g, &climber.assign);
        let (c, pr) = climber.sums();
        assert!((sm_value(c, pr, climber.active.len()) - compute_sm(&g, &p, &policy).sm).abs() < 1e-12);
    }

    #[test]
    fn fast_delta_agrees_with_reference_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let n = rng.random_range(2..14);
            let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            let mut edges = Vec::new();
            for x in &ids {
                for y in &ids {
                    if rng.random::<f64>() < 0.3 {
                        edges.push((x.clone(), y.clone()));
                    }
                }
            }
            let g = MonolithGraph::from_static_edges("r", &ids, &edges).unwrap();
            let aff = Affinity::new(&g, &EdgePolicy::default());
            let slots = rng.random_range(1..=n);
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..slots)).collect();
            let mut climber = Climber::new(&aff, &labels, slots);
            for class in 0..n {
                climber.load_links(class);
                let weighted = climber.weighted_links();
                for b in 0..slots {
                    let a = climber.assign[class];
                    if b == a || (climber.size[b] == 0 && climber.size[a] == 1) {
                        continue;
                    }
                    let (dc, dp) = climber.move_delta(class, b, weighted);
                    let (sc, sp) = climber.move_delta_slow(class, b);
                    assert!((dc - sc).abs() < 1e-12 && (dp - sp).abs() < 1e-12);
                }
            }
            climber.climb(1, slots, 50);
            let p = ValidatedPartition::from_assignment("t", &g, &climber.assign);
            let (c, pr) = climber.sums();
            let expect = compute_sm(&g, &p, &EdgePolicy::default()).sm;
            assert!((sm_value(c, pr, climber.active.len()) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn two_cliques_are_recovered() {
        let g = cliques(&[5, 5]);
        let d = decompose_hillclimb(&g, &HillClimbParams::default()).unwrap();
        assert_eq!(d.micro(), 2);
        for s in &d.services {
            let block = &s.classes[0][..2];
            assert!(s.classes.iter().all(|c| c.starts_with(block)));
        }
    }

    #[test]
    fn single_class_is_a_monolith() {
        let g = MonolithGraph::from_static_edges::<&str>("g", &["A"], &[]).unwrap();
        let d = decompose_hillclimb(&g, &HillClimbParams::default()).unwrap();
        assert_eq!(d.micro(), 1);
    }

    #[test]
    fn respects_service_bounds() {
        let g = cliques(&[3, 3, 3, 3]);
        for (lo, hi) in [(1, 2), (2, 2), (3, 3), (5, 6)] {
            let params = HillClimbParams {
                min_services: Some(lo),
                max_services: Some(hi),
                restarts: 5,
                ..Default::default()
            };
            let d = decompose_hillclimb(&g, &params).unwrap();
            assert!((lo..=hi).contains(&d.micro()), "{lo}..={hi} got {}", d.micro());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = cliques(&[3]);
        let bad = |min, max| HillClimbParams {
            min_services: min,
            max_services: max,
            ..Default::default()
        };
        assert!(matches!(
            decompose_hillclimb(&g, &bad(Some(3), Some(2))),
            Err(DecomposeError::InfeasibleBounds { .. })
        ));
        assert!(matches!(
            decompose_hillclimb(&g, &bad(Some(4), None)),
            Err(DecomposeError::InfeasibleBounds { .. })
        ));
        assert!(matches!(
            decompose_hillclimb(&g, &bad(None, Some(0))),
            Err(DecomposeError::InfeasibleBounds { .. })
        ));
        let zero = HillClimbParams {
            restarts: 0,
            ..Default::default()
        };
        assert!(matches!(
            decompose_hillclimb(&g, &zero),
            Err(DecomposeError::InvalidParams(_))
        ));
        let empty = MonolithGraph::from_static_edges::<&str>("e", &[], &[]).unwrap();
        assert_eq!(
            decompose_hillclimb(&empty, &HillClimbParams::default()),
            Err(DecomposeError::EmptyGraph)
        );
    }

    #[test]
    fn never_worse_than_its_starting_point() {
        let g = MonolithGraph::from_static_edges(
            "g",
            &["A", "B", "C", "D", "E", "F", "G"],
            &[("A", "B"), ("C", "D"), ("E", "F"), ("G", "A"), ("B", "C"), ("F", "G")],
        )
        .unwrap();
        for k in 1..=7 {
            for seed in 0..5 {
                let params = HillClimbParams {
                    restarts: 1,
                    min_services: Some(k),
                    max_services: Some(k),
                    seed,
                    ..Default::default()
                };
                let climbed = decompose_hillclimb(&g, &params).unwrap();
                let start = crate::decompose::decompose_random(&g, k, seed).unwrap();
                assert!(sm_of(&g, &climbed) >= sm_of(&g, &start) - 1e-12);
            }
        }
    }

    #[test]
    fn deterministic() {
        let g = cliques(&[4, 3, 5]);
        let p = HillClimbParams {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(
            decompose_hillclimb(&g, &p).unwrap(),
            decompose_hillclimb(&g, &p).unwrap()
        );
    }
}
