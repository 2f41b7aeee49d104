//! `Ω = Ext¹(D kQ, kQ) ≅ τ⁻kQ` as a kQ-bimodule and its tensor powers over kQ.
//!
//! A basis element carries a left vertex `v` and a right vertex `b`: it lives
//! in `(τ⁻ᵗP_b)_v`. An arrow `α: s → t` acts on the left by the map of the
//! representation; an arrow `α: j → i` acts on the right by `τ⁻ᵗf_ij`, moving
//! the right vertex from `i` to `j`.

use std::sync::Arc;

use crate::matrix::{cokernel, Matrix};
use crate::quiver::Quiver;
use crate::rep::{tau_minus_mor, FreeModule, RepMorphism};
use crate::{Error, Field, Result};

#[derive(Clone, Debug)]
pub struct Bimodule {
    quiver: Arc<Quiver>,
    field: Field,
    /// `(left vertex, right vertex)` per basis element.
    tags: Vec<(usize, usize)>,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

impl Bimodule {
    pub fn dim(&self) -> usize {
        self.tags.len()
    }

    pub fn tags(&self) -> &[(usize, usize)] {
        &self.tags
    }

    pub fn left(&self, a: usize) -> &Matrix {
        &self.left[a]
    }

    pub fn right(&self, a: usize) -> &Matrix {
        &self.right[a]
    }

    /// Left and right actions commute and respect the vertex tags.
    pub fn check(&self) -> Result<()> {
        let q = &self.quiver;
        for (a, arr) in q.arrows().iter().enumerate() {
            for (m, &(v, b)) in self.tags.iter().enumerate() {
                for (k, &(v2, b2)) in self.tags.iter().enumerate() {
                    if !self.left[a].get(k, m).is_zero() && (v != arr.src || v2 != arr.tgt || b2 != b) {
                        return Err(Error::Internal("left action breaks the tags".into()));
                    }
                    if !self.right[a].get(k, m).is_zero() && (b != arr.tgt || b2 != arr.src || v2 != v) {
                        return Err(Error::Internal("right action breaks the tags".into()));
                    }
                }
            }
        }
        for l in &self.left {
            for r in &self.right {
                if &(l * r) != &(r * l) {
                    return Err(Error::Internal("left and right actions do not commute".into()));
                }
            }
        }
        Ok(())
    }

    /// `self ⊗_{kQ} other`: pairs with matching middle vertex, modulo
    /// `mα ⊗ n − m ⊗ αn`.
    pub fn tensor(&self, other: &Bimodule) -> Bimodule {
        let q = &self.quiver;
        let field = self.field;
        let mut pairs = Vec::new();
        let mut index = std::collections::HashMap::new();
        for (m, &(_, b)) in self.tags.iter().enumerate() {
            for (n, &(v, _)) in other.tags.iter().enumerate() {
                if b == v {
                    index.insert((m, n), pairs.len());
                    pairs.push((m, n));
                }
            }
        }
        let mut rels: Vec<Vec<crate::Scalar>> = Vec::new();
        for (a, arr) in q.arrows().iter().enumerate() {
            for (m, &(_, b)) in self.tags.iter().enumerate() {
                if b != arr.tgt {
                    continue;
                }
                for (n, &(v, _)) in other.tags.iter().enumerate() {
                    if v != arr.src {
                        continue;
                    }
                    let mut col = vec![field.zero(); pairs.len()];
                    for m2 in 0..self.dim() {
                        let c = self.right[a].get(m2, m);
                        if !c.is_zero() {
                            let k = index[&(m2, n)];
                            col[k] = &col[k] + c;
                        }
                    }
                    for n2 in 0..other.dim() {
                        let c = other.left[a].get(n2, n);
                        if !c.is_zero() {
                            let k = index[&(m, n2)];
                            col[k] = &col[k] - c;
                        }
                    }
                    if col.iter().any(|c| !c.is_zero()) {
                        rels.push(col);
                    }
                }
            }
        }
        let ck = cokernel(&Matrix::from_columns(field, pairs.len(), &rels));
        let basis: Vec<(usize, usize)> = ck.complement.iter().map(|&k| pairs[k]).collect();
        let tags = basis
            .iter()
            .map(|&(m, n)| (self.tags[m].0, other.tags[n].1))
            .collect();
        let act = |on_left: bool, a: usize| -> Matrix {
            let cols: Vec<Vec<crate::Scalar>> = basis
                .iter()
                .map(|&(m, n)| {
                    let mut v = vec![field.zero(); pairs.len()];
                    if on_left {
                        for m2 in 0..self.dim() {
                            let c = self.left[a].get(m2, m);
                            if !c.is_zero() {
                                v[index[&(m2, n)]] = c.clone();
                            }
                        }
                    } else {
                        for n2 in 0..other.dim() {
                            let c = other.right[a].get(n2, n);
                            if !c.is_zero() {
                                v[index[&(m, n2)]] = c.clone();
                            }
                        }
                    }
                    ck.projection.mul_vec(&v)
                })
                .collect();
            Matrix::from_columns(field, basis.len(), &cols)
        };
        let left = (0..q.num_arrows()).map(|a| act(true, a)).collect();
        let right = (0..q.num_arrows()).map(|a| act(false, a)).collect();
        Bimodule {
            quiver: q.clone(),
            field,
            tags,
            left,
            right,
        }
    }
}

/// `τ⁻ᵗkQ` with the right action `τ⁻ᵗ` of right multiplication.
pub fn preprojective_bimodule(q: &Arc<Quiver>, field: Field, t: usize) -> Result<Bimodule> {
    q.require_acyclic()?;
    let n = q.num_vertices();
    let frees = (0..n)
        .map(|b| FreeModule::new(q, field, vec![b]))
        .collect::<Result<Vec<_>>>()?;
    // f_ij: P_i → P_j for every arrow α: j → i, pushed t times through τ⁻.
    let mut rights: Vec<RepMorphism> = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, arr)| {
            let mut v = vec![field.zero(); frees[arr.src].rep().dim(arr.tgt)];
            v[frees[arr.src].index_of(0, &[a])] = field.one();
            frees[arr.tgt].hom_to(frees[arr.src].rep(), &[v])
        })
        .collect();
    let mut modules: Vec<crate::rep::Rep> = frees.iter().map(|f| f.rep().clone()).collect();
    for _ in 0..t {
        modules = modules.iter().map(crate::rep::tau_minus).collect::<Result<Vec<_>>>()?;
        rights = rights.iter().map(tau_minus_mor).collect::<Result<Vec<_>>>()?;
    }
    let mut tags = Vec::new();
    let mut offset = vec![vec![0; n]; n];
    for (b, m) in modules.iter().enumerate() {
        for v in 0..n {
            offset[b][v] = tags.len();
            tags.extend(std::iter::repeat((v, b)).take(m.dim(v)));
        }
    }
    let dim = tags.len();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (a, arr) in q.arrows().iter().enumerate() {
        let mut l = Matrix::zeros(field, dim, dim);
        for (b, m) in modules.iter().enumerate() {
            l.put_block(offset[b][arr.tgt], offset[b][arr.src], m.map(a));
        }
        left.push(l);
        let mut r = Matrix::zeros(field, dim, dim);
        for v in 0..n {
            r.put_block(offset[arr.src][v], offset[arr.tgt][v], rights[a].block(v));
        }
        right.push(r);
    }
    Ok(Bimodule {
        quiver: q.clone(),
        field,
        tags,
        left,
        right,
    })
}

pub fn omega(q: &Arc<Quiver>, field: Field) -> Result<Bimodule> {
    preprojective_bimodule(q, field, 1)
}

/// `dim Ω^{⊗t}` for `t = 0..=max_t`, with `Ω^{⊗0} = kQ`.
pub fn omega_tensor_dims(q: &Arc<Quiver>, field: Field, max_t: usize) -> Result<Vec<usize>> {
    let om = omega(q, field)?;
    let mut power = preprojective_bimodule(q, field, 0)?;
    let mut dims = vec![power.dim()];
    for _ in 0..max_t {
        power = power.tensor(&om);
        dims.push(power.dim());
    }
    Ok(dims)
}
