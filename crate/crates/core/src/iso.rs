//! The maps `η: Σ → Π`, `η′: Σ′ → Π`, `δ: Σ → Σ′`, each sending every letter
//! of the double quiver to the corresponding generator, and their
//! verification as graded algebra isomorphisms on a common window.
//!
//! With the letter conventions of the tables, `η` sends `f ↦ α`, `g ↦ α*`,
//! `η′` sends `τ⁻g ↦ α`, `f ↦ α*`, and `δ` sends `f ↦ τ⁻g`, `g ↦ f`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{derive_words, DerivedWords, GradedAlgebraTable, Piece, Window, Word};
use crate::matrix::Matrix;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug)]
pub struct GeneratorMap {
    pub name: String,
    pub source: Arc<GradedAlgebraTable>,
    pub target: Arc<GradedAlgebraTable>,
    /// Image of every letter, in target coordinates.
    pub letters: Vec<Vec<Scalar>>,
}

fn letter_map(name: &str, source: &Arc<GradedAlgebraTable>, target: &Arc<GradedAlgebraTable>) -> Result<GeneratorMap> {
    if source.quiver() != target.quiver() {
        return Err(Error::Unsupported("tables over different quivers".into()));
    }
    if source.field() != target.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(GeneratorMap {
        name: name.into(),
        source: source.clone(),
        target: target.clone(),
        letters: target.generators().to_vec(),
    })
}

/// `f_ij ↦ α`, `g_ij ↦ α*`.
pub fn build_eta(sigma: &Arc<GradedAlgebraTable>, pi: &Arc<GradedAlgebraTable>) -> Result<GeneratorMap> {
    letter_map("eta", sigma, pi)
}

/// `τ⁻g_ij ↦ α`, `f_ij ↦ α*`.
pub fn build_eta_prime(sigma_prime: &Arc<GradedAlgebraTable>, pi: &Arc<GradedAlgebraTable>) -> Result<GeneratorMap> {
    letter_map("eta'", sigma_prime, pi)
}

/// `f_ij ↦ τ⁻g_ij`, `g_ij ↦ f_ij`.
pub fn build_delta(sigma: &Arc<GradedAlgebraTable>, sigma_prime: &Arc<GradedAlgebraTable>) -> Result<GeneratorMap> {
    letter_map("delta", sigma, sigma_prime)
}

impl GeneratorMap {
    /// The same map with the image of one letter negated.
    pub fn with_sign_flip(&self, letter: usize) -> GeneratorMap {
        let mut m = self.clone();
        m.name = format!("{} (letter {letter} negated)", self.name);
        for c in m.letters[letter].iter_mut() {
            *c = -c.clone();
        }
        m
    }

    pub fn window(&self) -> Window {
        self.source.window().intersect(&self.target.window())
    }

    /// Image of a word; `None` outside the target window.
    pub fn word_image(&self, w: &Word) -> Result<Option<Vec<Scalar>>> {
        let t = &self.target;
        let mut acc = t.unit(t.idempotents()[w.start]);
        for &l in &w.letters {
            match t.mul_vec(&self.letters[l], &acc)? {
                Some(v) => acc = v,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    fn combination_image(&self, terms: &[(Scalar, Word)]) -> Result<Option<Vec<Scalar>>> {
        let mut out = self.target.zero();
        for (c, w) in terms {
            let Some(v) = self.word_image(w)? else {
                return Ok(None);
            };
            crate::matrix::axpy(&mut out, c, &v);
        }
        Ok(Some(out))
    }

    /// Images of the source basis elements inside the common window.
    pub fn basis_images(&self) -> Result<Vec<Option<Vec<Scalar>>>> {
        let words = derive_words(&self.source)?;
        let window = self.window();
        (0..self.source.dim())
            .map(|x| {
                if !window.contains(self.source.element(x).bidegree) {
                    return Ok(None);
                }
                self.combination_image(&words.expansions[x])
            })
            .collect()
    }

    /// Image of a source vector (all of whose support lies in the window).
    pub fn apply(&self, images: &[Option<Vec<Scalar>>], v: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut out = self.target.zero();
        for (x, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            crate::matrix::axpy(&mut out, c, images[x].as_ref()?);
        }
        Some(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceCheck {
    pub bidegree: (usize, usize),
    pub start: String,
    pub end: String,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub graded: bool,
}

impl PieceCheck {
    pub fn ok(&self) -> bool {
        self.source_dim == self.target_dim && self.rank == self.source_dim && self.graded
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationImage {
    pub vertex: String,
    pub holds_in_source: bool,
    pub image_vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductMismatch {
    pub left: String,
    pub right: String,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub map: String,
    pub window: Window,
    pub source_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    pub pieces: Vec<PieceCheck>,
    pub relations: Vec<RelationImage>,
    pub idempotents: bool,
    pub products_checked: usize,
    pub product_mismatches: Vec<ProductMismatch>,
}

impl IsoReport {
    pub fn dims_ok(&self) -> bool {
        self.pieces.iter().all(|p| p.source_dim == p.target_dim)
    }

    pub fn bijective(&self) -> bool {
        self.pieces.iter().all(PieceCheck::ok)
    }

    pub fn relations_ok(&self) -> bool {
        self.relations.iter().all(|r| r.holds_in_source && r.image_vanishes)
    }

    pub fn multiplicative(&self) -> bool {
        self.product_mismatches.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.dims_ok() && self.bijective() && self.relations_ok() && self.multiplicative() && self.idempotents
    }
}

fn dims_in(t: &GradedAlgebraTable, w: &Window, grading: crate::algebra::Grading) -> Vec<usize> {
    let mut dims = Vec::new();
    for e in t.elements() {
        if w.contains(e.bidegree) {
            let d = grading.degree(e.bidegree);
            if dims.len() <= d {
                dims.resize(d + 1, 0);
            }
            dims[d] += 1;
        }
    }
    dims
}

pub fn verify_graded_iso(map: &GeneratorMap) -> Result<IsoReport> {
    let (s, t) = (&map.source, &map.target);
    let q = s.quiver().clone();
    let window = map.window();
    let images = map.basis_images()?;

    let keys: BTreeSet<Piece> = s
        .pieces()
        .keys()
        .chain(t.pieces().keys())
        .filter(|p| window.contains(p.bidegree))
        .copied()
        .collect();
    let mut pieces = Vec::new();
    for p in keys {
        let src = s.piece(&p);
        let tgt = t.piece(&p);
        let mut graded = true;
        let cols: Vec<Vec<Scalar>> = src
            .iter()
            .map(|&x| {
                let img = images[x].as_ref().expect("inside the window");
                for (k, c) in img.iter().enumerate() {
                    if !c.is_zero() && !tgt.contains(&k) {
                        graded = false;
                    }
                }
                tgt.iter().map(|&k| img[k].clone()).collect()
            })
            .collect();
        let rank = Matrix::from_columns(s.field(), tgt.len(), &cols).rank();
        pieces.push(PieceCheck {
            bidegree: p.bidegree,
            start: q.vertex_id(p.start).to_string(),
            end: q.vertex_id(p.end).to_string(),
            source_dim: src.len(),
            target_dim: tgt.len(),
            rank,
            graded,
        });
    }

    let mut relations = Vec::new();
    for r in s.relations() {
        let inside = r.terms.iter().all(|(_, w)| window.contains(w.bidegree(&q)));
        if !inside {
            continue;
        }
        let holds = s
            .combination_value(&r.terms)?
            .map_or(true, |v| v.iter().all(Scalar::is_zero));
        let vanishes = map
            .combination_image(&r.terms)?
            .map_or(true, |v| v.iter().all(Scalar::is_zero));
        relations.push(RelationImage {
            vertex: q.vertex_id(r.vertex).to_string(),
            holds_in_source: holds,
            image_vanishes: vanishes,
        });
    }

    let idempotents = (0..q.num_vertices()).all(|v| {
        images[s.idempotents()[v]].as_ref() == Some(&t.unit(t.idempotents()[v]))
    });

    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (x, y) in s.product_pairs() {
        let (a, b) = (s.element(x).bidegree, s.element(y).bidegree);
        if !window.contains((a.0 + b.0, a.1 + b.1)) {
            continue;
        }
        checked += 1;
        let xy = crate::algebra::dense(s, &s.mul(x, y)?.unwrap());
        let expected = map.apply(&images, &xy).expect("inside the window");
        let found = t
            .mul_vec(images[x].as_ref().unwrap(), images[y].as_ref().unwrap())?
            .ok_or_else(|| Error::Internal("product leaves the target window".into()))?;
        if expected != found {
            mismatches.push(ProductMismatch {
                left: s.element(x).label.clone(),
                right: s.element(y).label.clone(),
                expected: t.format_vec(&expected),
                found: t.format_vec(&found),
            });
        }
    }

    Ok(IsoReport {
        map: map.name.clone(),
        window,
        source_dims: dims_in(s, &window, s.grading()),
        target_dims: dims_in(t, &window, s.grading()),
        pieces,
        relations,
        idempotents,
        products_checked: checked,
        product_mismatches: mismatches,
    })
}

/// One row of the correspondence table: a basis element of `Π` and its
/// preimages under `η` and `η′`.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceRow {
    pub vertex: String,
    pub pi: String,
    pub sigma: String,
    pub sigma_prime: String,
}

fn preimage(
    map: &GeneratorMap,
    images: &[Option<Vec<Scalar>>],
    words: &DerivedWords,
    p: &Piece,
    target: usize,
) -> Result<String> {
    let s = &map.source;
    let t = &map.target;
    let src = s.piece(p);
    let tgt = t.piece(p);
    let cols: Vec<Vec<Scalar>> = src
        .iter()
        .map(|&x| tgt.iter().map(|&k| images[x].as_ref().unwrap()[k].clone()).collect())
        .collect();
    let m = Matrix::from_columns(s.field(), tgt.len(), &cols);
    let mut e = vec![s.field().zero(); tgt.len()];
    e[tgt.iter().position(|&k| k == target).unwrap()] = s.field().one();
    let c = m
        .solve_vec(&e)
        .ok_or_else(|| Error::Internal("target element has no preimage".into()))?;
    let mut terms: BTreeMap<Word, Scalar> = BTreeMap::new();
    for (&x, c) in src.iter().zip(c) {
        for (d, w) in &words.expansions[x] {
            let e = terms.entry(w.clone()).or_insert_with(|| s.field().zero());
            *e = &*e + &(&c * d);
        }
    }
    let terms: Vec<(Scalar, Word)> = terms.into_iter().map(|(w, c)| (c, w)).collect();
    Ok(s.style.format_combination(s.quiver(), &terms))
}

/// For every basis element of `Π` in the common window, its preimages in
/// `Σ` and `Σ′`, grouped by starting vertex (the columns `Πe_i`).
pub fn correspondence(eta: &GeneratorMap, eta_prime: &GeneratorMap) -> Result<Vec<CorrespondenceRow>> {
    if !Arc::ptr_eq(&eta.target, &eta_prime.target) && eta.target.dim() != eta_prime.target.dim() {
        return Err(Error::Unsupported("η and η′ must land in the same Π".into()));
    }
    let pi = &eta.target;
    let q = pi.quiver().clone();
    let window = eta.window().intersect(&eta_prime.window());
    let (ie, iep) = (eta.basis_images()?, eta_prime.basis_images()?);
    let (we, wep) = (derive_words(&eta.source)?, derive_words(&eta_prime.source)?);
    let mut rows = Vec::new();
    for v in 0..q.num_vertices() {
        for (p, idx) in pi.pieces() {
            if p.start != v || !window.contains(p.bidegree) {
                continue;
            }
            for &k in idx {
                rows.push(CorrespondenceRow {
                    vertex: q.vertex_id(v).to_string(),
                    pi: pi.element(k).label.clone(),
                    sigma: preimage(eta, &ie, &we, p, k)?,
                    sigma_prime: preimage(eta_prime, &iep, &wep, p, k)?,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{pi_table, sigma_prime_table, sigma_table, Grading};
    use crate::fill::fill;
    use crate::knit::knit;
    use crate::mesh::MeshEngine;
    use crate::quiver::{samples, Quiver};
    use crate::Field;

    struct Tables {
        sigma: Arc<GradedAlgebraTable>,
        sigma_prime: Arc<GradedAlgebraTable>,
        pi_s: Arc<GradedAlgebraTable>,
        pi_u: Arc<GradedAlgebraTable>,
    }

    fn tables(q: Quiver, field: Field, max: Option<usize>) -> Tables {
        let q = Arc::new(q);
        let base = crate::fill::default_base_sink(&q).unwrap();
        let st = knit(&q, field, Some(2)).unwrap();
        let res = fill(&st, &field.from_i64(-1), base).unwrap();
        let engine = Arc::new(MeshEngine::commutativity(q.clone(), field, base).unwrap());
        Tables {
            sigma: Arc::new(sigma_table(&engine, max).unwrap()),
            sigma_prime: Arc::new(sigma_prime_table(&res, max).unwrap()),
            pi_s: Arc::new(pi_table(&q, &field.one(), Grading::Starred, max).unwrap()),
            pi_u: Arc::new(pi_table(&q, &field.one(), Grading::Unstarred, max).unwrap()),
        }
    }

    #[test]
    fn a3_isomorphisms() {
        let t = tables(samples::a3(), Field::Rationals, None);
        let eta = build_eta(&t.sigma, &t.pi_s).unwrap();
        let r = verify_graded_iso(&eta).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert_eq!(r.source_dims, vec![6, 3, 1]);
        let ep = build_eta_prime(&t.sigma_prime, &t.pi_u).unwrap();
        assert!(verify_graded_iso(&ep).unwrap().passed());
        let delta = build_delta(&t.sigma, &t.sigma_prime).unwrap();
        assert!(verify_graded_iso(&delta).unwrap().passed());
    }

    #[test]
    fn sign_flip_is_detected() {
        let t = tables(samples::a3(), Field::Rationals, None);
        let eta = build_eta(&t.sigma, &t.pi_s).unwrap();
        for l in 0..4 {
            let r = verify_graded_iso(&eta.with_sign_flip(l)).unwrap();
            assert!(!r.relations_ok(), "letter {l}");
            assert!(!r.passed());
        }
    }

    #[test]
    fn untwisted_mesh_relations_do_not_map_to_pi() {
        let q = Arc::new(samples::a3());
        let e = Arc::new(MeshEngine::new(q.clone(), Field::Rationals).unwrap());
        let sigma = Arc::new(sigma_table(&e, None).unwrap());
        let pi = Arc::new(pi_table(&q, &Field::Rationals.one(), Grading::Starred, None).unwrap());
        assert!(!verify_graded_iso(&build_eta(&sigma, &pi).unwrap()).unwrap().passed());
    }

    #[test]
    fn d4_over_f5() {
        let t = tables(samples::d4(), Field::Prime(5), None);
        assert!(verify_graded_iso(&build_eta(&t.sigma, &t.pi_s).unwrap()).unwrap().passed());
        assert!(verify_graded_iso(&build_eta_prime(&t.sigma_prime, &t.pi_u).unwrap()).unwrap().passed());
        assert!(verify_graded_iso(&build_delta(&t.sigma, &t.sigma_prime).unwrap()).unwrap().passed());
    }

    #[test]
    fn corrupted_structure_constant_is_detected() {
        let t = tables(samples::a3(), Field::Rationals, None);
        let eta = build_eta(&t.sigma, &t.pi_s).unwrap();
        let (x, y) = t
            .pi_s
            .product_pairs()
            .into_iter()
            .find(|&(x, y)| t.pi_s.degree(x) + t.pi_s.degree(y) == 1 && !t.pi_s.mul(x, y).unwrap().unwrap().is_empty())
            .unwrap();
        let p = t.pi_s.mul(x, y).unwrap().unwrap();
        let bad: Vec<(usize, Scalar)> = p.iter().map(|(k, c)| (*k, c + &Field::Rationals.one())).collect();
        t.pi_s.override_product(x, y, bad);
        assert!(!verify_graded_iso(&eta).unwrap().passed());
    }
}
