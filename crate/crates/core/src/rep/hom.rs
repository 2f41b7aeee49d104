use super::resolution::Resolution;
use super::{Rep, RepMorphism};
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::{Error, Result};

fn same_setting(m: &Rep, n: &Rep) -> Result<()> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch);
    }
    if **m.quiver() != **n.quiver() {
        return Err(Error::Rep("representations of different quivers".into()));
    }
    Ok(())
}

/// Basis of `Hom(M, N)`, read off the kernel of the naturality equations
/// `N_a X_s − X_t M_a = 0` in the unknown blocks `X_v` (row-major).
pub fn hom_space(m: &Rep, n: &Rep) -> Result<Vec<RepMorphism>> {
    same_setting(m, n)?;
    let q = m.quiver();
    let field = m.field();
    let nv = q.num_vertices();
    let mut offset = vec![0usize; nv + 1];
    for v in 0..nv {
        offset[v + 1] = offset[v] + n.dim(v) * m.dim(v);
    }
    let unknowns = offset[nv];
    let var = |v: usize, r: usize, c: usize| offset[v] + r * m.dim(v) + c;
    let rows: usize = q.arrows().iter().map(|a| n.dim(a.tgt) * m.dim(a.src)).sum();
    let mut eqs = Matrix::zeros(field, rows, unknowns);
    let mut row = 0;
    for (a, arr) in q.arrows().iter().enumerate() {
        let (s, t) = (arr.src, arr.tgt);
        let (na, ma) = (n.map(a), m.map(a));
        for p in 0..n.dim(t) {
            for c in 0..m.dim(s) {
                for r in 0..n.dim(s) {
                    let x = na.get(p, r);
                    if !x.is_zero() {
                        let k = var(s, r, c);
                        let y = eqs.get(row, k) + x;
                        eqs.set(row, k, y);
                    }
                }
                for r in 0..m.dim(t) {
                    let x = ma.get(r, c);
                    if !x.is_zero() {
                        let k = var(t, p, r);
                        let y = eqs.get(row, k) - x;
                        eqs.set(row, k, y);
                    }
                }
                row += 1;
            }
        }
    }
    let kernel = eqs.kernel();
    Ok((0..kernel.cols())
        .map(|k| {
            let blocks = (0..nv)
                .map(|v| {
                    Matrix::from_fn(field, n.dim(v), m.dim(v), |r, c| kernel.get(var(v, r, c), k).clone())
                })
                .collect();
            RepMorphism::new_unchecked(m.clone(), n.clone(), blocks)
        })
        .collect())
}

/// `Ext¹(M, N)` as the cokernel of `Hom(P0, N) → Hom(P1, N)`.
#[derive(Clone, Debug)]
pub struct Ext1 {
    pub dim: usize,
    /// `Hom(P0, N) → Hom(P1, N)` in generator-image coordinates.
    pub presentation: Matrix,
    pub hom_dim: usize,
}

pub fn ext1(m: &Rep, n: &Rep) -> Result<Ext1> {
    same_setting(m, n)?;
    let field = m.field();
    let res = Resolution::new(m)?;
    let g0 = res.p0.gens();
    let g1 = res.p1.gens();
    let off = |gens: &[usize]| {
        let mut o = vec![0usize];
        for &g in gens {
            o.push(o.last().unwrap() + n.dim(g));
        }
        o
    };
    let (o0, o1) = (off(g0), off(g1));
    let mut pres = Matrix::zeros(field, o1[g1.len()], o0[g0.len()]);
    // generator r1 of P1 maps to Σ coeff (r0, path); φ sends that to Σ coeff N_path φ(r0)
    for (r1, image) in res.d_images.iter().enumerate() {
        let v = g1[r1];
        for (k, coeff) in image.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let (r0, path) = &res.p0.basis(v)[k];
            let mut np = Matrix::identity(field, n.dim(g0[*r0]));
            for &a in path {
                np = n.map(a) * &np;
            }
            for i in 0..np.rows() {
                for j in 0..np.cols() {
                    let x = np.get(i, j);
                    if !x.is_zero() {
                        let (rr, cc) = (o1[r1] + i, o0[*r0] + j);
                        let y = pres.get(rr, cc) + &(coeff * x);
                        pres.set(rr, cc, y);
                    }
                }
            }
        }
    }
    let rank = pres.rank();
    Ok(Ext1 {
        dim: pres.rows() - rank,
        hom_dim: pres.cols() - rank,
        presentation: pres,
    })
}

/// `⟨d, e⟩ = Σ d_i e_i − Σ_{a: i→j} d_i e_j`.
pub fn euler_form(q: &Quiver, d: &[usize], e: &[usize]) -> i64 {
    let diag: i64 = d.iter().zip(e).map(|(x, y)| (x * y) as i64).sum();
    let off: i64 = q.arrows().iter().map(|a| (d[a.src] * e[a.tgt]) as i64).sum();
    diag - off
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quiver::samples;
    use crate::rep::projective_rep;
    use crate::Field;

    #[test]
    fn yoneda_counts() {
        let q = Arc::new(samples::a3());
        let f = Field::Rationals;
        let p: Vec<Rep> = (0..3).map(|i| projective_rep(&q, f, i).unwrap()).collect();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(hom_space(&p[i], &p[j]).unwrap().len(), p[j].dim(i));
            }
        }
        assert_eq!(hom_space(&p[0], &p[2]).unwrap().len(), 1);
        assert!(hom_space(&p[2], &p[2]).unwrap()[0].is_iso());
    }

    #[test]
    fn ext_of_simple() {
        let q = Arc::new(samples::a3());
        let f = Field::Rationals;
        let s2 = Rep::simple(q.clone(), f, 1);
        let p1 = projective_rep(&q, f, 0).unwrap();
        assert_eq!(ext1(&s2, &p1).unwrap().dim, 1);
        assert_eq!(ext1(&p1, &s2).unwrap().dim, 0);
    }
}
