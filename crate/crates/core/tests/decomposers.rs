mod support;

use msdecomp_core::{
    compute_sm, decompose_hierarchical, decompose_hillclimb, decompose_monolith, decompose_random,
    decompose_singletons, generate_planted, validate_decomposition, CutCriterion, Decomposition, EdgePolicy,
    HierarchicalParams, HillClimbParams, Linkage, MonolithGraph, PlantedSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

fn sm(graph: &MonolithGraph, d: &Decomposition) -> f64 {
    let p = validate_decomposition(graph, d).expect("decomposer output validates");
    compute_sm(graph, &p, &EdgePolicy::default()).sm
}

fn all_outputs(g: &MonolithGraph, seed: u64) -> Vec<Decomposition> {
    let n = g.class_count();
    let mut out = vec![
        decompose_monolith(g).unwrap(),
        decompose_singletons(g).unwrap(),
        decompose_random(g, 1 + seed as usize % n, seed).unwrap(),
        decompose_hillclimb(
            g,
            &HillClimbParams {
                restarts: 6,
                seed,
                ..Default::default()
            },
        )
        .unwrap(),
    ];
    for linkage in [Linkage::Average, Linkage::Single, Linkage::Complete] {
        out.push(
            decompose_hierarchical(
                g,
                &HierarchicalParams {
                    linkage,
                    ..Default::default()
                },
            )
            .unwrap(),
        );
        out.push(
            decompose_hierarchical(
                g,
                &HierarchicalParams {
                    linkage,
                    cut: CutCriterion::TargetClusters(1 + n / 2),
                    min_cluster_size: 2,
                },
            )
            .unwrap(),
        );
    }
    out
}

#[test]
fn every_output_validates_and_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..25u64 {
        let n = rng.random_range(1..=25);
        let density = rng.random_range(0.02..0.4);
        let g = support::random_graph(&mut rng, n, density, seed % 2 == 0);
        let first = all_outputs(&g, seed);
        for d in &first {
            validate_decomposition(&g, d).unwrap();
        }
        assert_eq!(first, all_outputs(&g, seed));
    }
}

#[test]
fn g4_bounded_climb_matches_enumeration() {
    let g = support::g4();
    let raw = support::raw_edges(&g);
    let best = oracle::set_partitions(4)
        .into_iter()
        .filter(|l| *l.iter().max().unwrap() < 2)
        .map(|l| oracle::sm(&raw, &l))
        .fold(f64::NEG_INFINITY, f64::max);
    let params = HillClimbParams {
        max_services: Some(2),
        ..Default::default()
    };
    let d = decompose_hillclimb(&g, &params).unwrap();
    assert!(d.micro() <= 2);
    assert!((sm(&g, &d) - best).abs() < 1e-12);
}

#[test]
fn climb_dominates_random_baseline() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..30u64 {
        let n = rng.random_range(2..=20);
        let g = support::random_graph(&mut rng, n, 0.2, false);
        let k = rng.random_range(1..=n);
        let params = HillClimbParams {
            restarts: 4,
            min_services: Some(k),
            max_services: Some(k),
            seed,
            ..Default::default()
        };
        let climbed = decompose_hillclimb(&g, &params).unwrap();
        let random = decompose_random(&g, k, seed).unwrap();
        assert_eq!(climbed.micro(), k);
        assert!(sm(&g, &climbed) >= sm(&g, &random) - 1e-12, "seed {seed}");
    }
}

#[test]
fn hierarchical_splits_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..40u64 {
        let blocks = rng.random_range(1..=5);
        let (g, _) = generate_planted(&PlantedSpec::new(blocks, (2, 8), 0.6, 0.0, seed)).unwrap();
        let want = oracle::canonical(&oracle::components(g.class_count(), &support::raw_edges(&g)));
        for theta in [0.3, 0.5, 0.9] {
            let d = decompose_hierarchical(
                &g,
                &HierarchicalParams {
                    linkage: Linkage::Single,
                    cut: CutCriterion::DistanceThreshold(theta),
                    min_cluster_size: 1,
                },
            )
            .unwrap();
            let got = oracle::canonical(&support::labels_of(&g, &d));
            // Never merges across components; single linkage at a generous
            // cut reassembles each component whole.
            for service in &got {
                assert!(want.iter().any(|c| service.is_subset(c)));
            }
            if theta == 0.9 {
                assert_eq!(got, want, "seed {seed}");
            }
        }
    }
}

#[test]
fn planted_cliques_are_recovered_by_both_searches() {
    for seed in 0..8u64 {
        let (g, truth) = generate_planted(&PlantedSpec::new(3 + seed as usize % 4, (3, 8), 1.0, 0.0, seed)).unwrap();
        let want = oracle::canonical(&support::labels_of(&g, &truth));
        let climbed = decompose_hillclimb(
            &g,
            &HillClimbParams {
                seed,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(oracle::canonical(&support::labels_of(&g, &climbed)), want);
        let clustered = decompose_hierarchical(&g, &HierarchicalParams::default()).unwrap();
        assert_eq!(oracle::canonical(&support::labels_of(&g, &clustered)), want);
    }
}
