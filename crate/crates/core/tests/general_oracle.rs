use hhin_core::oracle::{oracle_general_topk, DEFAULT_TUPLE_CAP};
use hhin_core::synthetic::{generate_synthetic, random_general_query, SyntheticConfig};
use hhin_core::{gqh, GeneralOptions, Ks, ScoringParams};
use hhin_core::general::EdgeBound;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn general_matches_oracle_without_truncation() {
    let p = ScoringParams::default();
    let mut checked = 0;
    for seed in 0..40u64 {
        let config = SyntheticConfig {
            nodes: 60 + 5 * seed as usize,
            avg_degree: 3.0,
            seed,
            ..SyntheticConfig::default()
        };
        let (g, schema) = generate_synthetic(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(2..=3);
        let s = rng.gen_range(1..=3);
        let Some(q) = random_general_query(&g, s, m, &mut rng) else { continue };
        let k = rng.gen_range(1..=5);
        let expect = oracle_general_topk(&g, &schema, &q, k, &p, DEFAULT_TUPLE_CAP).unwrap();
        for bound in [EdgeBound::Tight, EdgeBound::Unit] {
            let opts = GeneralOptions { ks: Some(Ks::All), prune: true, bound };
            let got = gqh(&g, &schema, &q, k, &p, &opts).unwrap();
            assert_eq!(got.matches.len(), expect.top.len(), "seed {seed}");
            for (a, b) in got.matches.iter().zip(&expect.top) {
                assert!((a.score - b.score).abs() < 1e-9, "seed {seed}: {:?} vs {:?}", got.matches, expect.top);
            }
        }
        checked += 1;
    }
    assert!(checked > 30);
}
