use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use erelax::csp::{
    parse_dimacs, parse_instance_json, parse_template_json, solve_csp, to_dimacs,
    verify_assignment, CspStatus, Encoder, ThresholdScheme,
};
use erelax::oracle::generate::{planted_ksat, random_assignment, random_ksat};
use erelax::walk::WalkConfig;

fn config(restarts: u64) -> WalkConfig {
    WalkConfig {
        seed: 11,
        restarts,
        ..WalkConfig::default()
    }
}

#[test]
fn planted_three_sat_is_solved_and_verified() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scheme = ThresholdScheme::ksat(3).unwrap();
    for _ in 0..3 {
        let planted = random_assignment(&mut rng, 10);
        let inst = planted_ksat(&mut rng, &planted, 40, 3);
        let out = solve_csp(&inst, &scheme, &Encoder::Direct { k: 3 }, &config(50)).unwrap();
        match out.status {
            CspStatus::Solved(a) => assert!(verify_assignment(&inst, &a)),
            CspStatus::Exhausted => panic!("planted instance exhausted"),
        }
    }
}

#[test]
fn planted_four_sat_through_dimacs() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let planted = random_assignment(&mut rng, 8);
    let inst = planted_ksat(&mut rng, &planted, 30, 4);
    let text = to_dimacs(&inst).unwrap();
    let parsed = parse_dimacs(&text).unwrap();
    let scheme = ThresholdScheme::ksat(4).unwrap();
    let out = solve_csp(&parsed, &scheme, &Encoder::Direct { k: 4 }, &config(50)).unwrap();
    let CspStatus::Solved(a) = out.status else {
        panic!("planted instance exhausted")
    };
    assert!(verify_assignment(&inst, &a));
}

#[test]
fn one_in_three_via_basic_lp_with_custom_scheme() {
    // column fractions sum to 1, so exactly one of them reaches 3/4
    let template = parse_template_json(r#"{"relations": {"one_in_three": ["100", "010", "001"]}}"#)
        .unwrap();
    let inst = parse_instance_json(
        r#"{"n": 5, "constraints": [
            {"relation": "one_in_three", "vars": [1, 2, 3]},
            {"relation": "one_in_three", "vars": [3, 4, 5]},
            {"relation": "one_in_three", "vars": [1, 4, 5], "negated": "100"}
        ]}"#,
        &template,
    )
    .unwrap();
    let scheme = erelax::csp::parse_scheme("0,1/4;3/4,1\n01").unwrap();
    let out = solve_csp(&inst, &scheme, &Encoder::Basic(template), &config(200)).unwrap();
    let CspStatus::Solved(a) = out.status else {
        panic!("satisfiable instance exhausted")
    };
    assert!(verify_assignment(&inst, &a));
}

proptest! {
    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 3usize..=12, m in 0usize..=30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_ksat(&mut rng, n, m, 3);
        let back = parse_dimacs(&to_dimacs(&inst).unwrap()).unwrap();
        prop_assert_eq!(back.n(), inst.n());
        for bits in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|j| bits >> j & 1 == 1).collect();
            prop_assert_eq!(verify_assignment(&back, &a), verify_assignment(&inst, &a));
        }
    }
}
