use std::sync::Arc;

use preproj_core::algebra::{omega_tensor_dims, pi_table, sigma_table, Grading};
use preproj_core::fill::{default_base_sink, fill, lambda_feasibility};
use preproj_core::iso::{build_eta, verify_graded_iso};
use preproj_core::knit::knit;
use preproj_core::mesh::MeshEngine;
use preproj_core::quiver::samples;
use preproj_core::rep::{cartan_matrix, coxeter_oracle};
use preproj_core::{parse_quiver, Field};

fn path_quiver(n: usize) -> String {
    let mut parts: Vec<String> = (1..=n).map(|v| v.to_string()).collect();
    parts.extend((2..=n).map(|v| format!("a{v}:{v}->{}", v - 1)));
    parts.join(";")
}

// (quiver, number of vertices, Coxeter number)
fn dynkin_corpus() -> Vec<(String, usize, usize)> {
    let mut out: Vec<_> = (1..=6).map(|n| (path_quiver(n), n, n + 1)).collect();
    out.push(("1;2;3;4;5; a:2->1; b:3->2; c:4->3; d:5->3".into(), 5, 8));
    out.push(("1;2;3;4;5;6; a:1->2; b:2->3; c:3->4; d:4->5; e:6->3".into(), 6, 12));
    out.push(("1;2;3;4;5;6;7; a:2->1; b:2->3; c:4->3; d:4->5; e:6->5; f:7->3".into(), 7, 18));
    out
}

#[test]
fn preprojective_dimension_follows_the_coxeter_number() {
    for (text, n, h) in dynkin_corpus() {
        let q = Arc::new(parse_quiver(&text).unwrap());
        assert!(q.dynkin_type().is_some(), "{text}");
        let t = pi_table(&q, &Field::Rationals.one(), Grading::Length, None).unwrap();
        assert_eq!(t.dim(), n * h * (h + 1) / 6, "{text}");
    }
}

#[test]
fn eight_vertex_tree_has_e8_size() {
    let q = Arc::new(samples::eight());
    let t = pi_table(&q, &Field::Rationals.one(), Grading::Starred, None).unwrap();
    assert_eq!(t.dim(), 8 * 30 * 31 / 6);
}

#[test]
fn omega_powers_follow_the_coxeter_transformation() {
    for q in [samples::a3(), samples::d4(), samples::triangle()] {
        let q = Arc::new(q);
        let n = q.num_vertices();
        let cartan = cartan_matrix(&q);
        let dims = omega_tensor_dims(&q, Field::Rationals, 3).unwrap();
        for (t, &d) in dims.iter().enumerate() {
            let mut total = 0;
            for b in 0..n {
                // dimension vector of P_b is a column of the Cartan matrix
                let mut v: Vec<i64> = (0..n).map(|i| cartan[i][b]).collect();
                for _ in 0..t {
                    v = coxeter_oracle(&q, &v);
                    if v.iter().any(|&x| x < 0) {
                        v = vec![0; n];
                    }
                }
                total += v.iter().sum::<i64>();
            }
            assert_eq!(d as i64, total, "{} at t = {t}", q.to_text());
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let q = Arc::new(samples::d4());
        let f = Field::prime(5).unwrap();
        let st = knit(&q, f, None).unwrap();
        let res = fill(&st, &f.from_i64(2), default_base_sink(&q).unwrap()).unwrap();
        let engine = Arc::new(MeshEngine::commutativity(q.clone(), f, 0).unwrap());
        let sigma = sigma_table(&engine, None).unwrap();
        (
            st.to_json().to_string(),
            st.to_dot(),
            res.to_json().to_string(),
            sigma.to_json(true).unwrap().to_string(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn cyclic_and_non_tree_inputs_are_rejected() {
    let cyclic = Arc::new(parse_quiver("1;2; a:1->2; b:2->1").unwrap());
    assert!(knit(&cyclic, Field::Rationals, Some(1)).is_err());
    let tri = Arc::new(samples::triangle());
    let st = knit(&tri, Field::Rationals, Some(2)).unwrap();
    assert!(fill(&st, &Field::Rationals.one(), 0).is_err());
    assert!(MeshEngine::commutativity(tri.clone(), Field::Rationals, 0).is_err());
    let kronecker = Arc::new(samples::kronecker());
    assert!(MeshEngine::new(kronecker, Field::Rationals).is_err());
}

#[test]
fn zero_lambda_is_rejected() {
    let q = Arc::new(samples::a3());
    let st = knit(&q, Field::Rationals, None).unwrap();
    assert!(fill(&st, &Field::Rationals.zero(), 0).is_err());
    assert!(lambda_feasibility(&st, &Field::Rationals.zero()).is_err());
    assert!(pi_table(&q, &Field::Rationals.zero(), Grading::Length, None).is_err());
}

#[test]
fn unbounded_tables_need_dynkin_type() {
    let q = Arc::new(parse_quiver("1;2;3;4;5; a:2->1; b:3->1; c:4->1; d:5->1").unwrap());
    assert!(pi_table(&q, &Field::Rationals.one(), Grading::Length, None).is_err());
    let t = pi_table(&q, &Field::Rationals.one(), Grading::Length, Some(3)).unwrap();
    assert!(t.dim() > 0);
}

#[test]
fn eta_on_extended_d4_within_a_window() {
    let q = Arc::new(parse_quiver("1;2;3;4;5; a:2->1; b:3->1; c:4->1; d:5->1").unwrap());
    let f = Field::Rationals;
    let engine = Arc::new(MeshEngine::commutativity(q.clone(), f, 0).unwrap());
    let sigma = Arc::new(sigma_table(&engine, Some(2)).unwrap());
    let pi = Arc::new(pi_table(&q, &f.one(), Grading::Starred, Some(2)).unwrap());
    let report = verify_graded_iso(&build_eta(&sigma, &pi).unwrap()).unwrap();
    assert!(report.passed());
}
