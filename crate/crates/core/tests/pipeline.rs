use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svnkit::benchmark::{generate, rewire, BenchmarkSpec, RewirePlan};
use svnkit::community::{
    adjusted_rand, adjusted_wallace, community_cores, cores_of, louvain_projection, EdgeWeights,
};
use svnkit::corrections::Method;
use svnkit::graph::{project, Side};
use svnkit::svn::{over_expression_tests, validate_one_tail};

fn spec(intra: f64, inter: f64, seed: u64) -> BenchmarkSpec {
    BenchmarkSpec {
        n_blocks: 4,
        a_nodes_per_block: 25,
        b_nodes_per_block: 50,
        intra_link_prob: intra,
        inter_link_prob: inter,
        seed,
    }
}

#[test]
fn noiseless_blocks_are_recovered() {
    let (bn, planted) = generate(&spec(0.4, 0.0, 1)).unwrap();
    let full = louvain_projection(&project(&bn, Side::A), 2).unwrap();
    assert_eq!(adjusted_rand(&full, &planted).unwrap(), 1.0);
    let cores = community_cores(&bn, Side::A, 0.01, Method::Fdr, 3, EdgeWeights::Binary).unwrap();
    assert_eq!(adjusted_wallace(&cores, &planted).unwrap(), 1.0);
}

#[test]
fn bonferroni_cores_cover_fewer_nodes() {
    for seed in 0..10 {
        let (bn, _) = generate(&spec(0.25, 0.05, seed)).unwrap();
        let fdr = validate_one_tail(&bn, Side::A, 0.01, Method::Fdr).unwrap();
        let bon = validate_one_tail(&bn, Side::A, 0.01, Method::Bonferroni).unwrap();
        let fdr_cover = cores_of(&fdr, seed, EdgeWeights::Binary).unwrap().coverage();
        let bon_cover = cores_of(&bon, seed, EdgeWeights::Binary).unwrap().coverage();
        assert!(bon_cover.iter().all(|n| fdr_cover.binary_search(n).is_ok()));
        assert!(bon.edges.len() <= fdr.edges.len());
    }
}

#[test]
fn uncorrected_null_rate_is_at_most_alpha() {
    for alpha in [0.01, 0.05] {
        let (mut rejected, mut tests) = (0usize, 0usize);
        for seed in 0..100 {
            let (bn, _) = generate(&spec(0.3, 0.3, seed)).unwrap();
            let n = bn.size(Side::A);
            tests += n * (n - 1) / 2;
            rejected += over_expression_tests(&bn, Side::A)
                .iter()
                .filter(|r| r.p < alpha)
                .count();
        }
        let rate = rejected as f64 / tests as f64;
        // The exact test is discrete, hence conservative.
        assert!(rate <= alpha && rate >= 0.5 * alpha, "alpha {alpha}: rate {rate}");
    }
}

#[test]
fn heavy_rewiring_degrades_full_network_recovery() {
    let (bn, _) = generate(&BenchmarkSpec::default()).unwrap();
    let reference = louvain_projection(&project(&bn, Side::A), 0).unwrap();
    let mean_rand = |p_r: f64| {
        let total: f64 = (0..5)
            .map(|s| {
                let (noisy, stats) = rewire(&bn, &RewirePlan::new(p_r, 50 + s)).unwrap();
                assert_eq!(stats.performed_swaps, stats.requested_swaps);
                let part = louvain_projection(&project(&noisy, Side::A), s).unwrap();
                adjusted_rand(&part, &reference).unwrap()
            })
            .sum();
        total / 5.0
    };
    let (light, heavy) = (mean_rand(0.1), mean_rand(1.0));
    assert!(heavy < light, "R_adj {heavy} at p_r=1 vs {light} at 0.1");
    assert!(heavy < 0.9);
}

#[test]
fn rewiring_preserves_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let (bn, _) = generate(&spec(0.3, 0.05, rng.gen())).unwrap();
        let (noisy, _) = rewire(&bn, &RewirePlan::new(0.5, rng.gen())).unwrap();
        assert_eq!(noisy.degrees(Side::A), bn.degrees(Side::A));
        assert_eq!(noisy.degrees(Side::B), bn.degrees(Side::B));
        assert_eq!(noisy.link_count(), bn.link_count());
        assert_ne!(noisy.links().collect::<Vec<_>>(), bn.links().collect::<Vec<_>>());
    }
}

#[test]
fn projection_of_disjoint_blocks_is_block_diagonal() {
    let (bn, planted) = generate(&spec(1.0, 0.0, 4)).unwrap();
    let pn = project(&bn, Side::A);
    assert!(pn.edges.iter().all(|e| planted.label(e.i) == planted.label(e.j)));
    assert!(pn.edges.iter().all(|e| e.count == 50));
    assert_eq!(pn.edges.len(), 4 * 25 * 24 / 2);
}
