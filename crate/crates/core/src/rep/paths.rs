//! Path bases, projective and injective representations, and free modules
//! (finite direct sums of indecomposable projectives) with explicit bases.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Rep, RepMorphism};
use crate::matrix::Matrix;
use crate::quiver::Quiver;
use crate::{Field, Result, Scalar};

/// Arrow indices in traversal order; the empty path is the trivial path at
/// whatever vertex the context supplies.
pub type Path = Vec<usize>;

/// Paths starting at `i`, bucketed by end vertex, each bucket ordered by
/// length and then lexicographically by arrow index.
pub fn paths_from(q: &Quiver, i: usize) -> Vec<Vec<Path>> {
    let mut out = vec![Vec::new(); q.num_vertices()];
    let mut frontier: Vec<(usize, Path)> = vec![(i, Vec::new())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (end, p) in frontier {
            for a in q.arrows_from(end) {
                let mut ext = p.clone();
                ext.push(a);
                next.push((q.arrow(a).tgt, ext));
            }
            out[end].push(p);
        }
        assert!(next.iter().all(|(_, p)| p.len() <= q.num_arrows()), "oriented cycle");
        frontier = next;
    }
    for bucket in &mut out {
        bucket.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    }
    out
}

pub fn paths_between(q: &Quiver, i: usize, j: usize) -> Vec<Path> {
    paths_from(q, i).swap_remove(j)
}

/// `P_i`: basis at `v` is the paths `i → v`; an arrow appends itself.
pub fn projective_rep(q: &Arc<Quiver>, field: Field, i: usize) -> Result<Rep> {
    Ok(FreeModule::new(q, field, vec![i])?.rep().clone())
}

/// `I_i`: basis at `v` is the duals of the paths `v → i`; an arrow `a` sends
/// `p*` to `(p with its leading a removed)*`, or to zero if `p` does not start with `a`.
pub fn injective_rep(q: &Arc<Quiver>, field: Field, i: usize) -> Result<Rep> {
    Ok(FreeModule::new(q, field, vec![i])?.nu_rep().clone())
}

/// `⊕_r P_{gens[r]}` with basis `(r, path)` at each vertex, and its Nakayama
/// image `⊕_r I_{gens[r]}` with basis `(r, path)*` for paths ending at `gens[r]`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    gens: Vec<usize>,
    basis: Vec<Vec<(usize, Path)>>,
    index: HashMap<(usize, Path), usize>,
    nu_basis: Vec<Vec<(usize, Path)>>,
    nu_index: HashMap<(usize, Path), usize>,
    rep: Rep,
    nu_rep: Rep,
}

impl FreeModule {
    pub fn new(q: &Arc<Quiver>, field: Field, gens: Vec<usize>) -> Result<FreeModule> {
        q.require_acyclic()?;
        let n = q.num_vertices();
        let from: Vec<Vec<Vec<Path>>> = (0..n).map(|i| paths_from(q, i)).collect();
        let mut basis = vec![Vec::new(); n];
        let mut nu_basis = vec![Vec::new(); n];
        for (r, &g) in gens.iter().enumerate() {
            for w in 0..n {
                basis[w].extend(from[g][w].iter().map(|p| (r, p.clone())));
                nu_basis[w].extend(from[w][g].iter().map(|p| (r, p.clone())));
            }
        }
        let index: HashMap<(usize, Path), usize> = basis
            .iter()
            .flat_map(|b| b.iter().enumerate().map(|(k, e)| (e.clone(), k)))
            .collect();
        let nu_index: HashMap<(usize, Path), usize> = nu_basis
            .iter()
            .flat_map(|b| b.iter().enumerate().map(|(k, e)| (e.clone(), k)))
            .collect();
        let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
        let nu_dims: Vec<usize> = nu_basis.iter().map(Vec::len).collect();
        let mut maps = Vec::new();
        let mut nu_maps = Vec::new();
        for (a, arr) in q.arrows().iter().enumerate() {
            let mut m = Matrix::zeros(field, dims[arr.tgt], dims[arr.src]);
            for (c, (r, p)) in basis[arr.src].iter().enumerate() {
                let mut ext = p.clone();
                ext.push(a);
                m.set(index[&(*r, ext)], c, field.one());
            }
            maps.push(m);
            let mut m = Matrix::zeros(field, nu_dims[arr.tgt], nu_dims[arr.src]);
            for (c, (r, p)) in nu_basis[arr.src].iter().enumerate() {
                if p.first() == Some(&a) {
                    m.set(nu_index[&(*r, p[1..].to_vec())], c, field.one());
                }
            }
            nu_maps.push(m);
        }
        let rep = Rep::new_unchecked(q.clone(), field, dims, maps);
        let nu_rep = Rep::new_unchecked(q.clone(), field, nu_dims, nu_maps);
        Ok(FreeModule {
            gens,
            basis,
            index,
            nu_basis,
            nu_index,
            rep,
            nu_rep,
        })
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn nu_rep(&self) -> &Rep {
        &self.nu_rep
    }

    pub fn basis(&self, w: usize) -> &[(usize, Path)] {
        &self.basis[w]
    }

    pub fn index_of(&self, r: usize, path: &[usize]) -> usize {
        self.index[&(r, path.to_vec())]
    }

    /// Coordinate vector of generator `r` at its own vertex.
    pub fn generator(&self, r: usize) -> Vec<Scalar> {
        let field = self.rep.field();
        let mut v = vec![field.zero(); self.rep.dim(self.gens[r])];
        v[self.index_of(r, &[])] = field.one();
        v
    }

    /// The morphism to `target` sending generator `r` to `images[r]`
    /// (a vector at vertex `gens[r]`).
    pub fn hom_to(&self, target: &Rep, images: &[Vec<Scalar>]) -> RepMorphism {
        assert_eq!(images.len(), self.gens.len());
        let field = self.rep.field();
        let blocks = (0..self.basis.len())
            .map(|w| {
                let cols: Vec<Vec<Scalar>> = self.basis[w]
                    .iter()
                    .map(|(r, p)| target.apply_path(p, &images[*r]))
                    .collect();
                Matrix::from_columns(field, target.dim(w), &cols)
            })
            .collect();
        RepMorphism::new_unchecked(self.rep.clone(), target.clone(), blocks)
    }

    /// `ν h : ν(self) → ν(target)` for the morphism `h : self → target`
    /// sending generator `r` to `images[r]`.
    ///
    /// A component `P_a → P_b` given by a path `γ: b → a` becomes
    /// `I_a → I_b`, `(q γ)* ↦ q*`.
    pub fn nu_hom(&self, target: &FreeModule, images: &[Vec<Scalar>]) -> RepMorphism {
        let field = self.rep.field();
        let n = self.basis.len();
        let mut blocks: Vec<Matrix> = (0..n)
            .map(|w| Matrix::zeros(field, target.nu_rep.dim(w), self.nu_rep.dim(w)))
            .collect();
        for (r, image) in images.iter().enumerate() {
            let a = self.gens[r];
            for (k, coeff) in image.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let (r2, gamma) = &target.basis[a][k];
                for (w, block) in blocks.iter_mut().enumerate() {
                    for (c, (rr, qq)) in self.nu_basis[w].iter().enumerate() {
                        if *rr != r || qq.len() < gamma.len() || !qq.ends_with(gamma) {
                            continue;
                        }
                        let prefix = qq[..qq.len() - gamma.len()].to_vec();
                        let row = target.nu_index[&(*r2, prefix)];
                        let x = block.get(row, c) + coeff;
                        block.set(row, c, x);
                    }
                }
            }
        }
        RepMorphism::new_unchecked(self.nu_rep.clone(), target.nu_rep.clone(), blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    #[test]
    fn projective_dimensions() {
        let q = Arc::new(samples::a3());
        let f = Field::Rationals;
        assert_eq!(projective_rep(&q, f, 2).unwrap().dims(), &[1, 1, 1]);
        assert_eq!(projective_rep(&q, f, 0).unwrap().dims(), &[1, 0, 0]);
        assert_eq!(injective_rep(&q, f, 0).unwrap().dims(), &[1, 1, 1]);
        let t = Arc::new(samples::triangle());
        assert_eq!(projective_rep(&t, f, 2).unwrap().dims(), &[2, 1, 1]);
    }

    #[test]
    fn path_order() {
        let t = samples::triangle();
        let p = paths_between(&t, 2, 0);
        assert_eq!(p, vec![vec![2], vec![0, 1]]);
    }

    #[test]
    fn free_modules_are_natural() {
        let q = Arc::new(samples::eight());
        let m = FreeModule::new(&q, Field::Rationals, vec![0, 2, 6]).unwrap();
        for r in [m.rep(), m.nu_rep()] {
            let check = Rep::new(q.clone(), r.field(), r.dims().to_vec(), r.maps().to_vec());
            assert!(check.is_ok());
        }
        let t = Arc::new(samples::triangle());
        assert!(FreeModule::new(&t, Field::Rationals, vec![0]).is_ok());
        let cyc = Arc::new(crate::parse_quiver("1;2; a:1->2; b:2->1").unwrap());
        assert!(FreeModule::new(&cyc, Field::Rationals, vec![0]).is_err());
    }

    #[test]
    fn nakayama_of_arrow_map() {
        let q = Arc::new(samples::triangle());
        let f = Field::Rationals;
        // P_1 → P_3 along the paths 3 → 1, sum of both
        let p1 = FreeModule::new(&q, f, vec![0]).unwrap();
        let p3 = FreeModule::new(&q, f, vec![2]).unwrap();
        let img = vec![vec![f.one(), f.from_i64(2)]];
        let h = p1.hom_to(p3.rep(), &img);
        assert!(RepMorphism::new(h.source().clone(), h.target().clone(), h.blocks().to_vec()).is_ok());
        let nh = p1.nu_hom(&p3, &img);
        assert!(RepMorphism::new(nh.source().clone(), nh.target().clone(), nh.blocks().to_vec()).is_ok());
        assert!(!nh.is_zero());
    }
}
