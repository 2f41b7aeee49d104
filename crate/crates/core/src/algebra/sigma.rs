//! `Σ = ⊕_s Hom(τˢkQ, kQ)` in the mesh category, with `u × v = v∘τᵗu`, and
//! `Σ′ = ⊕_t Hom(kQ, τ⁻ᵗkQ)` in mod kQ, with `u * v = (τ⁻ᵗu)∘v`.
//!
//! In both tables a basis element from `P_a`-side vertex `i` to vertex `j`
//! corresponds to words from `j` to `i` (Σ) or from `a` to `b` (Σ′), so the
//! products line up with the product of the double quiver.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{
    derive_words, BasisElement, GradedAlgebraTable, Grading, Multiplication, Relation, Sparse,
    TableParts, Window, Word, WordStyle,
};
use crate::fill::FillingResult;
use crate::mesh::{MeshEngine, ZArrow, ZKind, ZPath, ZVertex};
use crate::quiver::Quiver;
use crate::rep::{projective_rep, tau_minus, tau_minus_mor, FreeModule, Rep, RepMorphism};
use crate::{Error, Field, Result, Scalar};

fn letter_of(q: &Quiver, a: ZArrow) -> usize {
    match a.kind {
        ZKind::Level => a.arrow,
        ZKind::Raise => q.num_arrows() + a.arrow,
    }
}

fn sigma_label(q: &Quiver, p: &ZPath) -> String {
    if p.arrows.is_empty() {
        return format!("id_P{}", q.vertex_id(p.start.vertex));
    }
    let names: Vec<String> = p
        .arrows
        .iter()
        .map(|a| {
            let id = &q.arrow(a.arrow).id;
            match a.kind {
                ZKind::Level => format!("f_{id}"),
                ZKind::Raise => format!("g_{id}"),
            }
        })
        .collect();
    names.join("×")
}

struct SigmaMult {
    engine: Arc<MeshEngine>,
    /// Flat index to `(s, i, j, k)`: `k`-th basis element of `Hom((−s, i), (0, j))`.
    place: Vec<(usize, usize, usize, usize)>,
    offsets: HashMap<(usize, usize, usize), usize>,
}

impl SigmaMult {
    fn element(&self, x: usize) -> crate::mesh::MeshElement {
        let (s, i, j, k) = self.place[x];
        self.engine
            .basis_element(ZVertex::new(-(s as i64), i), ZVertex::new(0, j), k)
    }
}

impl Multiplication for SigmaMult {
    fn product(&self, x: usize, y: usize) -> Result<Sparse> {
        let t = self.place[y].0;
        let u = self.element(x);
        let v = self.element(y);
        let p = self.engine.compose(&v, &self.engine.translate(&u, t as i64))?;
        let (s, i, _, _) = self.place[x];
        let k = self.place[y].2;
        let Some(&off) = self.offsets.get(&(s + t, i, k)) else {
            return Ok(Vec::new());
        };
        Ok(super::sparse(&p.coords).into_iter().map(|(c, v)| (off + c, v)).collect())
    }
}

/// `Σ` on the given engine, degrees `0..=max_degree` (until the first empty
/// degree when `None`, which needs Dynkin type).
pub fn sigma_table(engine: &Arc<MeshEngine>, max_degree: Option<usize>) -> Result<GradedAlgebraTable> {
    let q = engine.quiver().clone();
    q.require_tree()?;
    if max_degree.is_none() && q.dynkin_type().is_none() {
        return Err(Error::Unsupported("a degree bound is needed outside Dynkin type".into()));
    }
    let field = engine.field();
    let n = q.num_vertices();
    let mut elements = Vec::new();
    let mut place = Vec::new();
    let mut offsets = HashMap::new();
    let mut s = 0usize;
    loop {
        if max_degree.is_some_and(|m| s > m) {
            break;
        }
        let before = elements.len();
        for i in 0..n {
            for j in 0..n {
                let hom = engine.hom(ZVertex::new(-(s as i64), i), ZVertex::new(0, j));
                offsets.insert((s, i, j), elements.len());
                for (k, p) in hom.basis.iter().enumerate() {
                    let u = p.arrows.iter().filter(|a| a.kind == ZKind::Level).count();
                    elements.push(BasisElement {
                        label: sigma_label(&q, p),
                        start: j,
                        end: i,
                        bidegree: (u, s),
                    });
                    place.push((s, i, j, k));
                }
            }
        }
        if elements.len() == before && max_degree.is_none() {
            break;
        }
        s += 1;
    }
    let dim = elements.len();
    let coords = |s: usize, i: usize, j: usize, path: &ZPath| -> Result<Vec<Scalar>> {
        let mut v = vec![field.zero(); dim];
        if let Some(&off) = offsets.get(&(s, i, j)) {
            let e = engine.path_class(path)?;
            for (k, c) in e.coords.into_iter().enumerate() {
                v[off + k] = c;
            }
        }
        Ok(v)
    };
    let mut generators = vec![Vec::new(); 2 * q.num_arrows()];
    for (a, arr) in q.arrows().iter().enumerate() {
        let f = ZPath {
            start: ZVertex::new(0, arr.tgt),
            arrows: vec![ZArrow::level(a)],
        };
        generators[a] = coords(0, arr.tgt, arr.src, &f)?;
        let g = ZPath {
            start: ZVertex::new(-1, arr.src),
            arrows: vec![ZArrow::raise(a)],
        };
        generators[q.num_arrows() + a] = coords(1, arr.src, arr.tgt, &g)?;
    }
    let idempotents = (0..n).map(|v| offsets[&(0, v, v)]).collect();
    let relations = (0..n)
        .map(|j| Relation {
            vertex: j,
            terms: engine
                .mesh_relation(ZVertex::new(0, j))
                .into_iter()
                .map(|(w, p)| {
                    let letters = p.arrows.iter().rev().map(|&a| letter_of(&q, a)).collect();
                    (w, Word { start: j, letters })
                })
                .collect(),
        })
        .collect();
    let window = Window::graded(Grading::Starred, max_degree);
    Ok(GradedAlgebraTable::new(TableParts {
        name: "Sigma".into(),
        style: WordStyle::Sigma,
        convention: "degree s: Hom((-s,i),(0,j)) in the mesh category; u×v = v∘τ^t u".into(),
        quiver: q,
        field,
        grading: Grading::Starred,
        window,
        elements,
        generators,
        idempotents,
        relations,
        mult: Arc::new(SigmaMult { engine: engine.clone(), place, offsets }),
    }))
}

/// `τ⁻ᵗP_b` for `t = 0, 1, …`.
pub fn preprojective_tower(q: &Arc<Quiver>, field: Field, max_degree: Option<usize>) -> Result<Vec<Vec<Rep>>> {
    if max_degree.is_none() && q.dynkin_type().is_none() {
        return Err(Error::Unsupported("a degree bound is needed outside Dynkin type".into()));
    }
    let mut tower = vec![(0..q.num_vertices())
        .map(|b| projective_rep(q, field, b))
        .collect::<Result<Vec<_>>>()?];
    loop {
        let t = tower.len();
        if max_degree.is_some_and(|m| t > m) {
            break;
        }
        let last = tower.last().unwrap();
        if last.iter().all(Rep::is_zero) {
            tower.pop();
            break;
        }
        let next = last.iter().map(tau_minus).collect::<Result<Vec<_>>>()?;
        tower.push(next);
    }
    Ok(tower)
}

struct SigmaPrimeMult {
    field: Field,
    tower: Vec<Vec<Rep>>,
    frees: Vec<FreeModule>,
    /// Flat index to `(t, a, b, k)`: `k`-th basis vector of `(τ⁻ᵗP_b)_a`.
    place: Vec<(usize, usize, usize, usize)>,
    offsets: HashMap<(usize, usize, usize), usize>,
    shifted: RwLock<HashMap<(usize, usize), Arc<RepMorphism>>>,
}

impl SigmaPrimeMult {
    fn morphism(&self, x: usize) -> RepMorphism {
        let (t, a, b, k) = self.place[x];
        let m = &self.tower[t][b];
        let mut v = vec![self.field.zero(); m.dim(a)];
        v[k] = self.field.one();
        self.frees[a].hom_to(m, &[v])
    }

    /// `τ⁻ᵘ` of the morphism of basis element `x`.
    fn shifted(&self, x: usize, u: usize) -> Result<Arc<RepMorphism>> {
        if let Some(f) = self.shifted.read().unwrap().get(&(x, u)) {
            return Ok(f.clone());
        }
        let f = if u == 0 {
            self.morphism(x)
        } else {
            tau_minus_mor(&*self.shifted(x, u - 1)?)?
        };
        let f = Arc::new(f);
        self.shifted.write().unwrap().insert((x, u), f.clone());
        Ok(f)
    }
}

impl Multiplication for SigmaPrimeMult {
    fn product(&self, x: usize, y: usize) -> Result<Sparse> {
        let (s, _, c, _) = self.place[x];
        let (t, a, _, ky) = self.place[y];
        let f = self.shifted(x, t)?;
        let col = f.block(a).column(ky);
        let Some(&off) = self.offsets.get(&(s + t, a, c)) else {
            return Ok(Vec::new());
        };
        Ok(super::sparse(&col).into_iter().map(|(k, v)| (off + k, v)).collect())
    }
}

/// `Σ′` with generators `f_ij` and `τ⁻g = G_ij` from the filling, degrees
/// `0..=max_degree` (until `τ⁻ᵗkQ = 0` when `None`).
pub fn sigma_prime_table(fill: &FillingResult, max_degree: Option<usize>) -> Result<GradedAlgebraTable> {
    let q = fill.quiver.clone();
    let field = fill.lambda.field();
    let heights = q.heights()?;
    let tower = preprojective_tower(&q, field, max_degree)?;
    let n = q.num_vertices();
    let mut elements = Vec::new();
    let mut place = Vec::new();
    let mut offsets = HashMap::new();
    for (t, level) in tower.iter().enumerate() {
        for (b, m) in level.iter().enumerate() {
            for a in 0..n {
                offsets.insert((t, a, b), elements.len());
                let s = t as i64 + heights[a] - heights[b];
                if m.dim(a) > 0 && s < 0 {
                    return Err(Error::Internal("negative starred degree".into()));
                }
                for k in 0..m.dim(a) {
                    elements.push(BasisElement {
                        label: format!("[{t}:{}→{}#{k}]", q.vertex_id(a), q.vertex_id(b)),
                        start: a,
                        end: b,
                        bidegree: (t, s as usize),
                    });
                    place.push((t, a, b, k));
                }
            }
        }
    }
    let frees = (0..n)
        .map(|a| FreeModule::new(&q, field, vec![a]))
        .collect::<Result<Vec<_>>>()?;
    let dim = elements.len();
    let m = q.num_arrows();
    let mut generators = vec![vec![field.zero(); dim]; 2 * m];
    for (a, arr) in q.arrows().iter().enumerate() {
        // f: P_i → P_j is the path α in (P_j)_i.
        let off = offsets[&(0, arr.tgt, arr.src)];
        generators[m + a][off + frees[arr.src].index_of(0, &[a])] = field.one();
        // τ⁻g = G: P_j → τ⁻P_i, evaluated at the generator of P_j.
        if let Some(&off) = offsets.get(&(1, arr.src, arr.tgt)) {
            let col = fill.g[a].block(arr.src).column(frees[arr.src].index_of(0, &[]));
            for (k, c) in col.into_iter().enumerate() {
                generators[a][off + k] = c;
            }
        }
    }
    let idempotents = (0..n)
        .map(|v| offsets[&(0, v, v)] + frees[v].index_of(0, &[]))
        .collect();
    let relations = (0..n)
        .map(|j| {
            let mut terms = Vec::new();
            for a in q.arrows_into(j) {
                terms.push((field.one(), Word { start: j, letters: vec![m + a, a] }));
            }
            for a in q.arrows_from(j) {
                terms.push((fill.lambda.clone(), Word { start: j, letters: vec![a, m + a] }));
            }
            Relation { vertex: j, terms }
        })
        .collect();
    let table = GradedAlgebraTable::new(TableParts {
        name: "Sigma'".into(),
        style: WordStyle::SigmaPrime,
        convention: "degree t: Hom(P_a, τ^-t P_b); u*v = (τ^-t u)∘v".into(),
        quiver: q.clone(),
        field,
        grading: Grading::Unstarred,
        window: Window::graded(Grading::Unstarred, max_degree),
        elements,
        generators,
        idempotents,
        relations,
        mult: Arc::new(SigmaPrimeMult {
            field,
            tower,
            frees,
            place,
            offsets,
            shifted: RwLock::new(HashMap::new()),
        }),
    });
    let words = derive_words(&table)?;
    let labels = words
        .expansions
        .iter()
        .map(|terms| WordStyle::SigmaPrime.format_combination(&q, terms))
        .collect();
    Ok(table.with_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fill::fill;
    use crate::knit::knit;
    use crate::quiver::samples;

    fn a3_fill(lambda: i64) -> FillingResult {
        let q = Arc::new(samples::a3());
        let st = knit(&q, Field::Rationals, None).unwrap();
        fill(&st, &Field::Rationals.from_i64(lambda), 0).unwrap()
    }

    #[test]
    fn sigma_a3() {
        let q = Arc::new(samples::a3());
        let e = Arc::new(MeshEngine::commutativity(q, Field::Rationals, 0).unwrap());
        let t = sigma_table(&e, None).unwrap();
        assert_eq!(t.degree_dims(), vec![6, 3, 1]);
        let top: Vec<&str> = (0..t.dim()).filter(|&k| t.degree(k) == 2).map(|k| t.element(k).label.as_str()).collect();
        assert_eq!(top, vec!["g_b×g_a"]);
        assert!(t.associativity_failures().unwrap().is_empty());
    }

    #[test]
    fn sigma_prime_a3() {
        let t = sigma_prime_table(&a3_fill(-1), None).unwrap();
        assert_eq!(t.degree_dims(), vec![6, 3, 1]);
        assert!(t.associativity_failures().unwrap().is_empty());
        for r in t.relations() {
            assert!(t.combination_value(&r.terms).unwrap().unwrap().iter().all(Scalar::is_zero));
        }
    }
}
