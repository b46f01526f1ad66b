use expertnet::bounds::path_cap;
use expertnet::harness::gen_query;
use expertnet::models::build;
use expertnet::routing::{route, ErrorModel};
use expertnet::seed::stream;
use expertnet::{ExpertId, ModelConfig};
use proptest::prelude::*;

fn config_strategy() -> impl Strategy<Value = ModelConfig> {
    prop_oneof![
        (prop::sample::select(vec![(24usize, 2usize), (60, 4), (40, 8)]), 1usize..4, 0.0f64..4.0, any::<u64>())
            .prop_map(|((n, h), k, r, seed)| ModelConfig::unified(n, h, k, r, seed)),
        (prop::sample::select(vec![(1usize, 30u32), (2, 7), (3, 4)]), 1usize..4, 0.0f64..4.0, any::<u64>())
            .prop_map(|((m, lambda), k, r, seed)| ModelConfig::diversified(m, lambda, k, r, seed)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn paths_progress_and_respect_caps(config in config_strategy(), c in prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]), trial_seed in any::<u64>()) {
        let net = build(&config).unwrap();
        let error = ErrorModel::new(c).unwrap();
        let mut rng = stream(&[trial_seed]);
        let cap = path_cap(&config);
        for _ in 0..40 {
            let query = gen_query(&config, &mut rng);
            let start = ExpertId(rand::Rng::random_range(&mut rng, 0..net.len()));
            let res = route(&query, start, &net, error, &mut rng).unwrap();
            prop_assert!(res.is_resolved());
            prop_assert!(query.solved_by(net.expertise(*res.path.last().unwrap())));
            prop_assert!(res.hops() < cap);

            let area = query.area_index();
            let mut seen = std::collections::HashSet::new();
            for &u in &res.path {
                prop_assert!(seen.insert(u), "expert {} repeats", u);
            }
            for (u, w) in res.forwards() {
                prop_assert!(net.contacts(u).any(|x| x == w));
                prop_assert!(net.expertise(w).level(area) > net.expertise(u).level(area));
            }
        }
    }

    #[test]
    fn zero_error_matches_exact(config in config_strategy(), trial_seed in any::<u64>()) {
        let net = build(&config).unwrap();
        let mut q_rng = stream(&[trial_seed]);
        for _ in 0..20 {
            let query = gen_query(&config, &mut q_rng);
            let start = ExpertId(rand::Rng::random_range(&mut q_rng, 0..net.len()));
            let a = route(&query, start, &net, ErrorModel::EXACT, &mut stream(&[1])).unwrap();
            let b = route(&query, start, &net, ErrorModel::new(0.0).unwrap(), &mut stream(&[2])).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn error_mode_resolves_the_same_queries(config in config_strategy(), trial_seed in any::<u64>()) {
        let net = build(&config).unwrap();
        let mut rng = stream(&[trial_seed]);
        for _ in 0..20 {
            let query = gen_query(&config, &mut rng);
            let start = ExpertId(rand::Rng::random_range(&mut rng, 0..net.len()));
            let exact = route(&query, start, &net, ErrorModel::EXACT, &mut rng).unwrap();
            let noisy = route(&query, start, &net, ErrorModel::new(1.5).unwrap(), &mut rng).unwrap();
            prop_assert_eq!(exact.is_resolved(), noisy.is_resolved());
            prop_assert!(noisy.is_resolved());
        }
    }
}

#[test]
fn network_json_round_trip_preserves_routes() {
    let config = ModelConfig::diversified(2, 12, 3, 1.2, 77);
    let net = build(&config).unwrap();
    let loaded = expertnet::ExpertNetwork::from_json(&net.to_json().unwrap()).unwrap();
    let mut rng = stream(&[5]);
    for _ in 0..200 {
        let query = gen_query(&config, &mut rng);
        let start = ExpertId(rand::Rng::random_range(&mut rng, 0..net.len()));
        let a = route(&query, start, &net, ErrorModel::EXACT, &mut rng).unwrap();
        let b = route(&query, start, &loaded, ErrorModel::EXACT, &mut rng).unwrap();
        assert_eq!(a, b);
    }
}
