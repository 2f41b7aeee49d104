//! Minimal projective resolutions `0 → P1 → P0 → M → 0` (the path algebra is
//! hereditary, so two terms suffice).

use super::paths::FreeModule;
use super::{Rep, RepMorphism};
use crate::matrix::{cokernel, Matrix};
use crate::{Error, Result, Scalar};

/// Elements of `M` whose classes form a basis of `M / rad M`, vertex by vertex.
pub fn top(m: &Rep) -> Vec<(usize, Vec<Scalar>)> {
    let q = m.quiver();
    let field = m.field();
    let mut out = Vec::new();
    for v in 0..q.num_vertices() {
        let mut rad = Matrix::zeros(field, m.dim(v), 0);
        for a in q.arrows_into(v) {
            rad = rad.hstack(m.map(a));
        }
        for c in cokernel(&rad).complement {
            out.push((v, crate::matrix::unit_vector(field, m.dim(v), c)));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub p0: FreeModule,
    pub p1: FreeModule,
    /// Images of the generators of `P0` in `M`.
    pub pi_images: Vec<Vec<Scalar>>,
    /// Images of the generators of `P1` in `P0`.
    pub d_images: Vec<Vec<Scalar>>,
    pub pi: RepMorphism,
    pub d: RepMorphism,
}

impl Resolution {
    pub fn new(m: &Rep) -> Result<Resolution> {
        let q = m.quiver();
        let field = m.field();
        let gens0 = top(m);
        let p0 = FreeModule::new(q, field, gens0.iter().map(|g| g.0).collect())?;
        let pi_images: Vec<Vec<Scalar>> = gens0.into_iter().map(|g| g.1).collect();
        let pi = p0.hom_to(m, &pi_images);
        if !pi.is_surjective() {
            return Err(Error::Internal("top does not generate".into()));
        }
        let incl = pi.kernel();
        let k = incl.source().clone();
        let gens1 = top(&k);
        let p1 = FreeModule::new(q, field, gens1.iter().map(|g| g.0).collect())?;
        let d_images: Vec<Vec<Scalar>> = gens1
            .into_iter()
            .map(|(v, x)| incl.block(v).mul_vec(&x))
            .collect();
        let d = p1.hom_to(p0.rep(), &d_images);
        if !d.is_injective() {
            return Err(Error::Internal("syzygy is not projective".into()));
        }
        Ok(Resolution {
            p0,
            p1,
            pi_images,
            d_images,
            pi,
            d,
        })
    }
}

/// Lifts `f : M → N` to generator images of `f0 : P0(M) → P0(N)` and
/// `f1 : P1(M) → P1(N)`, chosen by the deterministic solver.
pub fn lift_to_resolutions(
    f: &RepMorphism,
    rm: &Resolution,
    rn: &Resolution,
) -> Result<(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>)> {
    let solve = |a: &Matrix, b: &[Scalar]| {
        a.solve_vec(b)
            .ok_or_else(|| Error::Internal("lift through a surjection failed".into()))
    };
    let mut f0 = Vec::new();
    for (r, m) in rm.pi_images.iter().enumerate() {
        let v = rm.p0.gens()[r];
        f0.push(solve(rn.pi.block(v), &f.block(v).mul_vec(m))?);
    }
    let f0_mor = rm.p0.hom_to(rn.p0.rep(), &f0);
    let mut f1 = Vec::new();
    for (r, x) in rm.d_images.iter().enumerate() {
        let v = rm.p1.gens()[r];
        f1.push(solve(rn.d.block(v), &f0_mor.block(v).mul_vec(x))?);
    }
    Ok((f0, f1))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quiver::samples;
    use crate::rep::{injective_rep, projective_rep};
    use crate::Field;

    #[test]
    fn resolution_of_simple() {
        let q = Arc::new(samples::a3());
        let s2 = Rep::simple(q.clone(), Field::Rationals, 1);
        let r = Resolution::new(&s2).unwrap();
        assert_eq!(r.p0.gens(), &[1]);
        assert_eq!(r.p1.gens(), &[0]);
    }

    #[test]
    fn projectives_resolve_trivially() {
        let q = Arc::new(samples::triangle());
        for i in 0..3 {
            let p = projective_rep(&q, Field::Rationals, i).unwrap();
            let r = Resolution::new(&p).unwrap();
            assert_eq!(r.p0.gens(), &[i]);
            assert!(r.p1.gens().is_empty());
        }
        let i1 = injective_rep(&q, Field::Rationals, 0).unwrap();
        let r = Resolution::new(&i1).unwrap();
        assert_eq!(r.p0.gens(), &[2, 2]);
        assert_eq!(r.p1.rep().total_dim() + i1.total_dim(), r.p0.rep().total_dim());
    }
}
