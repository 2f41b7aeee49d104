use std::sync::Arc;

use preproj_core::algebra::{pi_table, Grading};
use preproj_core::fill::{fill, lambda_feasibility, sign_bridge, verify_lambda_relations};
use preproj_core::knit::{knit, verify_meshes};
use preproj_core::mesh::{MeshEngine, ZVertex};
use preproj_core::{parse_quiver, Field, Matrix, Quiver, Scalar};
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rationals),
        Just(Field::prime(2).unwrap()),
        Just(Field::prime(3).unwrap()),
        Just(Field::prime(7).unwrap()),
    ]
}

fn scalar(field: Field) -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..9).prop_filter_map("denominator vanishes", move |(n, d)| field.from_ratio(n, d))
}

/// A tree on `n` vertices: vertex `v` hangs off an earlier vertex, arrow direction chosen per edge.
fn tree(max: usize) -> impl Strategy<Value = Quiver> {
    (1..=max)
        .prop_flat_map(|n| {
            let edges: Vec<_> = (2..=n).map(|v| (0..v - 1, any::<bool>())).collect();
            (Just(n), edges)
        })
        .prop_map(|(n, edges)| {
            let mut text: Vec<String> = (1..=n).map(|v| v.to_string()).collect();
            for (k, (parent, down)) in edges.into_iter().enumerate() {
                let (v, u) = (k + 2, parent + 1);
                let (s, t) = if down { (v, u) } else { (u, v) };
                text.push(format!("e{v}:{s}->{t}"));
            }
            parse_quiver(&text.join(";")).unwrap()
        })
}

fn matrix(field: Field, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-3i64..4, rows * cols).prop_map(move |e| Matrix::from_i64(field, rows, cols, &e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms((f, a, b, c) in field_strategy().prop_flat_map(|f| (Just(f), scalar(f), scalar(f), scalar(f)))) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a - &a, f.zero());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, f.one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn rank_nullity(m in field_strategy().prop_flat_map(|f| (1usize..6, 1usize..6).prop_flat_map(move |(r, c)| matrix(f, r, c)))) {
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.cols(), m.cols());
        prop_assert!((&m * &kernel).is_zero());
    }

    #[test]
    fn solutions_solve((m, x) in field_strategy().prop_flat_map(|f| (matrix(f, 4, 3), proptest::collection::vec(scalar(f), 3)))) {
        let b = m.mul_vec(&x);
        let y = m.solve_vec(&b).expect("b lies in the column space");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn quiver_text_round_trips(q in tree(8)) {
        prop_assert_eq!(parse_quiver(&q.to_text()).unwrap(), q);
    }

    #[test]
    fn fillings_on_trees((q, f, l, pick) in (tree(6), field_strategy())
        .prop_flat_map(|(q, f)| (Just(q), Just(f), scalar(f), any::<prop::sample::Index>()))) {
        prop_assume!(!l.is_zero());
        let q = Arc::new(q);
        let sinks = q.sinks();
        let base = sinks[pick.index(sinks.len())];
        let st = knit(&q, f, Some(1)).unwrap();
        prop_assert!(verify_meshes(&st).all_ok());
        let res = fill(&st, &l, base).unwrap();
        prop_assert!(verify_lambda_relations(&res, 3).unwrap().all_zero());
        let plus = fill(&st, &f.one(), base).unwrap();
        let minus = fill(&st, &(-f.one()), base).unwrap();
        prop_assert!(sign_bridge(&plus, &minus).unwrap().iter().all(|c| c.holds));
        prop_assert!(!lambda_feasibility(&st, &l).unwrap().is_infeasible());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn preprojective_algebras_are_associative(q in tree(5)) {
        let q = Arc::new(q);
        let t = pi_table(&q, &Field::Rationals.one(), Grading::Length, Some(4)).unwrap();
        prop_assert!(t.associativity_failures().unwrap().is_empty());
        // every idempotent is concentrated in bidegree (0, 0)
        for &e in t.idempotents() {
            prop_assert_eq!(t.element(e).bidegree, (0, 0));
        }
    }

    #[test]
    fn twisting_keeps_dimensions((q, pick) in (tree(5), any::<prop::sample::Index>())) {
        let q = Arc::new(q);
        let sinks = q.sinks();
        let base = sinks[pick.index(sinks.len())];
        let plain = MeshEngine::new(q.clone(), Field::Rationals).unwrap();
        let twisted = MeshEngine::commutativity(q.clone(), Field::Rationals, base).unwrap();
        for i in 0..q.num_vertices() {
            for j in 0..q.num_vertices() {
                for t in 0..3 {
                    let (x, y) = (ZVertex::new(0, i), ZVertex::new(t, j));
                    prop_assert_eq!(plain.dim(x, y), twisted.dim(x, y));
                }
            }
        }
    }
}
