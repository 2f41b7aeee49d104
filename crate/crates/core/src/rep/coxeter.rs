//! Dimension-vector shadow of the AR translations.

use std::sync::{Arc, OnceLock};

use num_traits::ToPrimitive;

use super::paths::paths_from;
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::Field;

/// `C[v][i]` = number of paths `i → v`, so column `i` is `dim P_i`.
pub fn cartan_matrix(q: &Quiver) -> Vec<Vec<i64>> {
    let n = q.num_vertices();
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        for (v, paths) in paths_from(q, i).into_iter().enumerate() {
            c[v][i] = paths.len() as i64;
        }
    }
    c
}

fn to_matrix(m: &[Vec<i64>]) -> Matrix {
    let n = m.len();
    Matrix::from_fn(Field::Rationals, n, n, |r, c| Field::Rationals.from_i64(m[r][c]))
}

fn to_ints(m: &Matrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|x| {
                    let q = x.as_rational().expect("rational entry");
                    assert!(q.is_integer(), "Coxeter matrix entries are integers");
                    q.to_integer().to_i64().expect("small entry")
                })
                .collect()
        })
        .collect()
}

/// `Φ = −Cᵀ C⁻¹`, sending `dim P_i` to `−dim I_i`.
pub fn coxeter_matrix(q: &Quiver) -> Vec<Vec<i64>> {
    let c = to_matrix(&cartan_matrix(q));
    let inv = c.inverse().expect("Cartan matrix of an acyclic quiver is unitriangular");
    to_ints(&(&c.transpose() * &inv).scale(&Field::Rationals.from_i64(-1)))
}

/// `Φ⁻¹ = −C C⁻ᵀ`.
pub fn coxeter_inverse(q: &Quiver) -> Vec<Vec<i64>> {
    convention_checked();
    let c = to_matrix(&cartan_matrix(q));
    let inv_t = c.transpose().inverse().expect("unitriangular");
    to_ints(&(&c * &inv_t).scale(&Field::Rationals.from_i64(-1)))
}

/// `Φ⁻¹ d`; a negative coordinate means `d` has no τ⁻ inside the module category.
pub fn coxeter_oracle(q: &Quiver, d: &[i64]) -> Vec<i64> {
    coxeter_inverse(q)
        .iter()
        .map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum())
        .collect()
}

/// Compares the matrix formula with an actual `τ⁻P_1` on `1 ← 2` once per
/// process, so a convention slip cannot go unnoticed.
fn convention_checked() {
    static CHECK: OnceLock<()> = OnceLock::new();
    CHECK.get_or_init(|| {
        let q = Arc::new(crate::parse_quiver("1;2; a:2->1").unwrap());
        let c = to_matrix(&cartan_matrix(&q));
        let inv_t = c.transpose().inverse().unwrap();
        let phi_inv = to_ints(&(&c * &inv_t).scale(&Field::Rationals.from_i64(-1)));
        let p1 = super::projective_rep(&q, Field::Rationals, 0).unwrap();
        let t = super::tau_minus(&p1).unwrap();
        let d: Vec<i64> = p1.dims().iter().map(|&x| x as i64).collect();
        let predicted: Vec<i64> = phi_inv.iter().map(|r| r.iter().zip(&d).map(|(a, b)| a * b).sum()).collect();
        let actual: Vec<i64> = t.dims().iter().map(|&x| x as i64).collect();
        assert_eq!(predicted, actual, "Coxeter convention disagrees with τ⁻ on A2");
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    #[test]
    fn a2_projective() {
        assert_eq!(coxeter_oracle(&samples::a2(), &[1, 0]), vec![0, 1]);
    }

    #[test]
    fn injectives_go_negative() {
        let q = samples::a3();
        let c = cartan_matrix(&q);
        for i in 0..3 {
            let dim_i: Vec<i64> = c[i].clone();
            assert!(coxeter_oracle(&q, &dim_i).iter().any(|&x| x < 0));
        }
    }

    #[test]
    fn inverse_pair() {
        let q = samples::eight();
        let phi = coxeter_matrix(&q);
        let d = [3i64, -1, 4, 1, -5, 9, 2, 6];
        let back = coxeter_oracle(&q, &d);
        let again: Vec<i64> = phi.iter().map(|r| r.iter().zip(&back).map(|(a, b)| a * b).sum()).collect();
        assert_eq!(again, d);
    }
}
