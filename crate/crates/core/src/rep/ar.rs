//! The Auslander-Reiten translations on objects and morphisms.
//!
//! `τM = ker(ν d)` for a minimal projective resolution `d : P1 → P0` of `M`,
//! with `ν` the Nakayama functor; `τ⁻ = D τ D` computed over the opposite
//! quiver. On morphisms the lifts are chosen by the solver; two lifts of the
//! same map differ by a homotopy `h` with `f1 − f1' = h d`, and `ν(h d)`
//! vanishes on `ker ν d`, so the induced map does not depend on the choice.

use super::resolution::{lift_to_resolutions, Resolution};
use super::{Rep, RepMorphism};
use crate::matrix::Solution;
use crate::{Error, Result};

fn tau_parts(m: &Rep) -> Result<(Resolution, RepMorphism)> {
    let res = Resolution::new(m)?;
    let nu_d = res.p1.nu_hom(&res.p0, &res.d_images);
    let incl = nu_d.kernel();
    Ok((res, incl))
}

pub fn tau(m: &Rep) -> Result<Rep> {
    Ok(tau_parts(m)?.1.source().clone())
}

pub fn tau_mor(f: &RepMorphism) -> Result<RepMorphism> {
    let (rm, im) = tau_parts(f.source())?;
    let (rn, inn) = tau_parts(f.target())?;
    let (_, f1) = lift_to_resolutions(f, &rm, &rn)?;
    let nu_f1 = rm.p1.nu_hom(&rn.p1, &f1);
    let mut blocks = Vec::new();
    for v in 0..f.source().dims().len() {
        let image = nu_f1.block(v) * im.block(v);
        match inn.block(v).solve(&image)? {
            Solution::Consistent { particular, .. } => blocks.push(particular),
            Solution::Inconsistent => {
                return Err(Error::Internal("translated map leaves the kernel".into()))
            }
        }
    }
    Ok(RepMorphism::new_unchecked(im.source().clone(), inn.source().clone(), blocks))
}

pub fn tau_minus(m: &Rep) -> Result<Rep> {
    Ok(tau(&m.dual())?.dual().rebase(m.quiver()))
}

pub fn tau_minus_mor(f: &RepMorphism) -> Result<RepMorphism> {
    let g = tau_mor(&f.dual())?.dual();
    let q = f.source().quiver();
    let (s, t) = (g.source().rebase(q), g.target().rebase(q));
    Ok(RepMorphism::new_unchecked(s, t, g.blocks().to_vec()))
}

/// `ν M = D Hom(M, kQ)`, only needed on projectives: `ν P_i = I_i`.
pub fn nakayama(p: &super::FreeModule) -> Rep {
    p.nu_rep().clone()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quiver::samples;
    use crate::rep::{hom_space, injective_rep, projective_rep};
    use crate::Field;

    const Q: Field = Field::Rationals;

    #[test]
    fn a3_translates() {
        let q = Arc::new(samples::a3());
        let p1 = projective_rep(&q, Q, 0).unwrap();
        assert_eq!(tau_minus(&p1).unwrap().dims(), &[0, 1, 0]);
        let s2 = Rep::simple(q.clone(), Q, 1);
        assert_eq!(tau(&s2).unwrap().dims(), &[1, 0, 0]);
        for i in 0..3 {
            assert!(tau_minus(&injective_rep(&q, Q, i).unwrap()).unwrap().is_zero());
            assert!(tau(&projective_rep(&q, Q, i).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn triangle_translate() {
        let q = Arc::new(samples::triangle());
        let p1 = projective_rep(&q, Q, 0).unwrap();
        assert_eq!(tau_minus(&p1).unwrap().dims(), &[2, 2, 1]);
    }

    #[test]
    fn tau_inverts_tau_minus() {
        let q = Arc::new(samples::eight());
        let mut m = projective_rep(&q, Q, 3).unwrap();
        for _ in 0..3 {
            let next = tau_minus(&m).unwrap();
            let back = tau(&next).unwrap();
            assert_eq!(back.dims(), m.dims());
            let isos = hom_space(&back, &m).unwrap();
            assert_eq!(isos.len(), 1);
            assert!(isos[0].is_iso());
            m = next;
        }
    }

    #[test]
    fn morphisms_translate_functorially() {
        let q = Arc::new(samples::a3());
        let p: Vec<Rep> = (0..3).map(|i| projective_rep(&q, Q, i).unwrap()).collect();
        let f = hom_space(&p[0], &p[1]).unwrap().remove(0);
        let g = hom_space(&p[1], &p[2]).unwrap().remove(0);
        let lhs = tau_minus_mor(&g.after(&f)).unwrap();
        let rhs = tau_minus_mor(&g).unwrap().after(&tau_minus_mor(&f).unwrap());
        assert_eq!(lhs, rhs);
        let id = RepMorphism::identity(&p[0]);
        assert_eq!(tau_minus_mor(&id).unwrap(), RepMorphism::identity(&tau_minus(&p[0]).unwrap()));
    }
}
