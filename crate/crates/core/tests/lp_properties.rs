use num_rational::BigRational;
use proptest::prelude::*;

use erelax::domain::{BoxRegion, LinearProgram, Rational};
use erelax::lp::{self, LpOutcome};
use erelax::oracle::vertices;

fn int(v: i64) -> Rational {
    BigRational::from_integer(v.into())
}

fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    (1usize..=3).prop_flat_map(|n| {
        let row = (prop::collection::vec(-4i64..=4, n), -3i64..=5);
        prop::collection::vec(row, 1..=4).prop_map(move |rows| {
            let mut lp = LinearProgram::new(n);
            for (coeffs, rhs) in rows {
                lp.push(
                    coeffs.into_iter().enumerate().map(|(j, a)| (j, int(a))).collect::<Vec<_>>(),
                    int(rhs),
                )
                .unwrap();
            }
            lp
        })
    })
}

fn dot(c: &[Rational], x: &[Rational]) -> Rational {
    c.iter().zip(x).map(|(a, b)| a * b).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn minimum_matches_vertex_enumeration(
        lp in arb_lp(),
        c in prop::collection::vec(-5i64..=5, 3),
    ) {
        let n = lp.n();
        let c: Vec<Rational> = c[..n].iter().map(|&v| int(v)).collect();
        let region = BoxRegion::unit(n);
        let verts = vertices(&lp).unwrap();
        match lp::minimize(&lp, &c, &region).unwrap() {
            LpOutcome::Optimal { value, primal, dual } => {
                prop_assert!(lp.is_satisfied_by(&primal));
                prop_assert_eq!(&dot(&c, &primal), &value);
                let best = verts.iter().map(|v| dot(&c, v)).min().unwrap();
                prop_assert_eq!(&best, &value);
                prop_assert_eq!(lp::dual_bound(&lp, Some(&c), &region, &dual), Some(value));
            }
            LpOutcome::Infeasible { farkas } => {
                prop_assert!(verts.is_empty());
                prop_assert!(lp::verify_farkas(&lp, &region, &farkas));
            }
            other => prop_assert!(false, "unexpected outcome {:?}", other),
        }
    }

    #[test]
    fn feasibility_agrees_with_vertices(lp in arb_lp()) {
        let region = BoxRegion::unit(lp.n());
        let verts = vertices(&lp).unwrap();
        match lp::check_feasible(&lp, &region).unwrap() {
            LpOutcome::Feasible { witness } => {
                prop_assert!(!verts.is_empty());
                prop_assert!(lp.is_satisfied_by(&witness));
            }
            LpOutcome::Infeasible { farkas } => {
                prop_assert!(verts.is_empty());
                prop_assert!(lp::verify_farkas(&lp, &region, &farkas));
            }
            other => prop_assert!(false, "unexpected outcome {:?}", other),
        }
    }

    #[test]
    fn text_format_round_trips(lp in arb_lp()) {
        let back = LinearProgram::parse(&lp.to_string()).unwrap();
        prop_assert_eq!(back.rows(), lp.rows());
    }
}
