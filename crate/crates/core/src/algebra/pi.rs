//! `Π_λ = kQ̄ / (Σ α*α − λ αα*)`, one path length at a time.
//!
//! Length `d` is spanned by `y·l` for basis words `y` of length `d − 1` and
//! letters `l`; the relations of length `d` are `x·r_v` for basis words `x`
//! of length `d − 2`, expanded with the append maps of the previous step.
//! Candidates are in lexicographic order of their words, and the basis is the
//! set of candidates that are not pivots of the reduced relations.

use std::sync::Arc;

use super::{
    is_starred, letter_src, num_letters, BasisElement, GradedAlgebraTable, Grading, Multiplication, Relation,
    Sparse, TableParts, Window, Word,
};
use crate::matrix::{cokernel, Matrix};
use crate::quiver::Quiver;
use crate::{Error, Field, Result, Scalar};

#[derive(Clone, Debug)]
pub struct PreprojectiveAlgebra {
    quiver: Arc<Quiver>,
    field: Field,
    lambda: Scalar,
    window: Window,
    words: Vec<Vec<Word>>,
    /// `append[d][l][y]`: the normal form of `y·l` in length `d + 1`.
    append: Vec<Vec<Vec<Sparse>>>,
}

/// `r_v = Σ_{α: v → ·} α*α − λ Σ_{α: · → v} αα*`, as traversal words.
pub fn vertex_relation(q: &Quiver, field: Field, lambda: &Scalar, v: usize) -> Relation {
    let m = q.num_arrows();
    let mut terms = Vec::new();
    for a in q.arrows_from(v) {
        terms.push((field.one(), Word { start: v, letters: vec![a, m + a] }));
    }
    for a in q.arrows_into(v) {
        terms.push((-lambda.clone(), Word { start: v, letters: vec![m + a, a] }));
    }
    Relation { vertex: v, terms }
}

impl PreprojectiveAlgebra {
    pub fn new(quiver: Arc<Quiver>, lambda: &Scalar, window: Window) -> Result<PreprojectiveAlgebra> {
        quiver.require_acyclic()?;
        if lambda.is_zero() {
            return Err(Error::Unsupported("λ must be nonzero".into()));
        }
        let field = lambda.field();
        let bounded = window.max_length.is_some() || window.max_starred.is_some() || window.max_unstarred.is_some();
        if !bounded && quiver.dynkin_type().is_none() && quiver.num_arrows() > 0 {
            return Err(Error::Unsupported("a degree bound is needed outside Dynkin type".into()));
        }
        let span = if quiver.is_tree() { Some(super::height_span(&quiver)?) } else { None };
        let longest = quiver.num_vertices().saturating_sub(1);
        let keep = |(u, s): (usize, usize)| -> bool {
            if !window.contains((u, s)) {
                return false;
            }
            match span {
                Some(h) => u <= s + h && s <= u + h,
                None => u <= (s + 1) * longest && s <= (u + 1) * longest,
            }
        };
        let letters = num_letters(&quiver);
        let relations: Vec<Relation> = (0..quiver.num_vertices())
            .map(|v| vertex_relation(&quiver, field, lambda, v))
            .collect();
        let mut words: Vec<Vec<Word>> = vec![(0..quiver.num_vertices()).map(Word::empty).collect()];
        let mut append: Vec<Vec<Vec<Sparse>>> = Vec::new();
        loop {
            let d = words.len();
            let prev = &words[d - 1];
            let mut cands: Vec<(usize, usize)> = Vec::new();
            let mut cand_index = std::collections::HashMap::new();
            for (y, w) in prev.iter().enumerate() {
                let end = w.end(&quiver);
                let (u, s) = w.bidegree(&quiver);
                for l in 0..letters {
                    if letter_src(&quiver, l) != end {
                        continue;
                    }
                    let bd = if is_starred(&quiver, l) { (u, s + 1) } else { (u + 1, s) };
                    if keep(bd) {
                        cand_index.insert((y, l), cands.len());
                        cands.push((y, l));
                    }
                }
            }
            let mut rel_cols: Vec<Vec<Scalar>> = Vec::new();
            if d >= 2 {
                for (x, w) in words[d - 2].iter().enumerate() {
                    let r = &relations[w.end(&quiver)];
                    let mut col = vec![field.zero(); cands.len()];
                    let mut inside = true;
                    for (c, t) in &r.terms {
                        let (l1, l2) = (t.letters[0], t.letters[1]);
                        for (y, a) in &append[d - 2][l1][x] {
                            match cand_index.get(&(*y, l2)) {
                                Some(&k) => col[k] = &col[k] + &(c * a),
                                None => inside = false,
                            }
                        }
                    }
                    if inside && col.iter().any(|c| !c.is_zero()) {
                        rel_cols.push(col);
                    }
                }
            }
            let rel = Matrix::from_columns(field, cands.len(), &rel_cols);
            let ck = cokernel(&rel);
            let mut step: Vec<Vec<Sparse>> = vec![vec![Vec::new(); prev.len()]; letters];
            for (k, &(y, l)) in cands.iter().enumerate() {
                step[l][y] = ck
                    .projection
                    .column(k)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
            }
            append.push(step);
            let next: Vec<Word> = ck
                .complement
                .iter()
                .map(|&k| {
                    let (y, l) = cands[k];
                    let mut w = prev[y].clone();
                    w.letters.push(l);
                    w
                })
                .collect();
            if next.is_empty() {
                break;
            }
            words.push(next);
        }
        Ok(PreprojectiveAlgebra {
            quiver,
            field,
            lambda: lambda.clone(),
            window,
            words,
            append,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Basis words of length `d`.
    pub fn words(&self, d: usize) -> &[Word] {
        self.words.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn max_length(&self) -> usize {
        self.words.len() - 1
    }

    pub fn dims_by_length(&self) -> Vec<usize> {
        self.words.iter().map(Vec::len).collect()
    }

    fn extend(&self, mut d: usize, mut v: Sparse, letters: &[usize]) -> Option<Sparse> {
        for &l in letters {
            let step = self.append.get(d)?;
            let mut out: std::collections::BTreeMap<usize, Scalar> = Default::default();
            for (y, c) in &v {
                for (k, a) in &step[l][*y] {
                    let e = out.entry(*k).or_insert_with(|| self.field.zero());
                    *e = &*e + &(c * a);
                }
            }
            v = out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            d += 1;
            if v.is_empty() {
                return Some(v);
            }
        }
        Some(v)
    }

    /// Normal form of a word as a combination of basis words of its length,
    /// or `None` when the word lies outside the computed range.
    pub fn normal_form(&self, w: &Word) -> Option<Sparse> {
        if !w.is_path(&self.quiver) {
            return Some(Vec::new());
        }
        let bd = w.bidegree(&self.quiver);
        if !self.window.contains(bd) {
            return None;
        }
        self.extend(0, vec![(w.start, self.field.one())], &w.letters)
    }
}

struct PiMult {
    algebra: Arc<PreprojectiveAlgebra>,
    /// Flat index to (length, index within length).
    place: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl Multiplication for PiMult {
    fn product(&self, x: usize, y: usize) -> Result<Sparse> {
        let (dx, kx) = self.place[x];
        let (dy, ky) = self.place[y];
        if dx + dy >= self.offsets.len() {
            return Ok(Vec::new());
        }
        let letters = &self.algebra.words[dx][kx].letters;
        let v = self
            .algebra
            .extend(dy, vec![(ky, self.algebra.field.one())], letters)
            .ok_or_else(|| Error::Internal("product outside the computed range".into()))?;
        let off = self.offsets[dx + dy];
        Ok(v.into_iter().map(|(k, c)| (off + k, c)).collect())
    }
}

/// `Π_λ` graded by `grading`, truncated at `max_degree` (required outside
/// Dynkin type).
pub fn pi_table(
    q: &Arc<Quiver>,
    lambda: &Scalar,
    grading: Grading,
    max_degree: Option<usize>,
) -> Result<GradedAlgebraTable> {
    let window = Window::graded(grading, max_degree);
    let algebra = Arc::new(PreprojectiveAlgebra::new(q.clone(), lambda, window)?);
    let field = algebra.field;
    let mut elements = Vec::new();
    let mut place = Vec::new();
    let mut offsets = Vec::new();
    let mut flat_words = Vec::new();
    for (d, ws) in algebra.words.iter().enumerate() {
        offsets.push(elements.len());
        for (k, w) in ws.iter().enumerate() {
            elements.push(BasisElement {
                label: w.display(q),
                start: w.start,
                end: w.end(q),
                bidegree: w.bidegree(q),
            });
            place.push((d, k));
            flat_words.push(w.clone());
        }
    }
    let n = elements.len();
    let unit = |k: usize| {
        let mut v = vec![field.zero(); n];
        v[k] = field.one();
        v
    };
    let generators = (0..num_letters(q))
        .map(|l| {
            match algebra.words(1).iter().position(|w| w.letters == [l]) {
                Some(k) => unit(offsets[1] + k),
                None => vec![field.zero(); n],
            }
        })
        .collect();
    let idempotents = (0..q.num_vertices()).collect();
    let relations = (0..q.num_vertices())
        .map(|v| vertex_relation(q, field, lambda, v))
        .collect();
    let name = if lambda.is_one() { "Pi".to_string() } else { format!("Pi_{lambda}") };
    Ok(GradedAlgebraTable::new(TableParts {
        name,
        style: super::WordStyle::Pi,
        convention: "basis: normal words of the double quiver; x·y = y then x".into(),
        quiver: q.clone(),
        field,
        grading,
        window,
        elements,
        generators,
        idempotents,
        relations,
        mult: Arc::new(PiMult { algebra, place, offsets }),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    fn pi(q: Quiver, grading: Grading, max: Option<usize>) -> GradedAlgebraTable {
        pi_table(&Arc::new(q), &Field::Rationals.one(), grading, max).unwrap()
    }

    #[test]
    fn a3_dimensions_and_relations() {
        let t = pi(samples::a3(), Grading::Starred, None);
        assert_eq!(t.dim(), 10);
        assert_eq!(t.degree_dims(), vec![6, 3, 1]);
        let alg = PreprojectiveAlgebra::new(t.quiver().clone(), &Field::Rationals.one(), Window::default()).unwrap();
        // α = 0, β = 1, α* = 2, β* = 3
        assert_eq!(alg.normal_form(&Word { start: 1, letters: vec![2, 0] }), Some(vec![]));
        assert_eq!(alg.normal_form(&Word { start: 2, letters: vec![1, 3] }), Some(vec![]));
        let lhs = alg.normal_form(&Word { start: 1, letters: vec![0, 2] }).unwrap();
        let rhs = alg.normal_form(&Word { start: 1, letters: vec![3, 1] }).unwrap();
        assert!(!lhs.is_empty());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn type_a_totals() {
        for n in 1..6usize {
            let mut text: String = (1..=n).map(|i| format!("{i};")).collect();
            for i in 1..n {
                text.push_str(&format!(" a{i}:{}->{i};", i + 1));
            }
            let t = pi(crate::parse_quiver(&text).unwrap(), Grading::Length, None);
            assert_eq!(t.dim(), n * (n + 1) * (n + 2) / 6, "A{n}");
        }
    }

    #[test]
    fn dynkin_totals_and_lambda_independence() {
        let d4 = pi(samples::d4(), Grading::Length, None);
        assert_eq!(d4.dim(), 28);
        let two = Field::Rationals.from_i64(2);
        let t = pi_table(&Arc::new(samples::d4()), &two, Grading::Length, None).unwrap();
        assert_eq!(t.degree_dims(), d4.degree_dims());
        let e8 = pi(samples::eight(), Grading::Length, None);
        assert_eq!(e8.dim(), 1240);
    }

    #[test]
    fn a3_associative() {
        let t = pi(samples::a3(), Grading::Length, None);
        assert!(t.associativity_failures().unwrap().is_empty());
    }

    #[test]
    fn idempotent_bigrading() {
        let t = pi(samples::a3(), Grading::Length, None);
        for (x, y) in (0..t.dim()).flat_map(|x| (0..t.dim()).map(move |y| (x, y))) {
            if t.element(x).start != t.element(y).end {
                assert!(t.mul(x, y).unwrap().unwrap().is_empty());
            }
        }
    }
}
