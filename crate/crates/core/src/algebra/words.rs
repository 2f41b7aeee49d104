//! Writing every basis element of a table as a combination of generator words.
//!
//! Words are explored by length in lexicographic order, and a word is kept when
//! its value is independent of the kept words of its piece. If a word depends
//! on smaller words, so does every extension of it, so only kept words need
//! to be extended.

use std::collections::BTreeMap;

use super::{letter_src, num_letters, GradedAlgebraTable, Piece, Word};
use crate::matrix::Matrix;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug)]
pub struct DerivedWords {
    /// Kept words, grouped by piece, in discovery order.
    pub words: BTreeMap<Piece, Vec<Word>>,
    /// For every basis element, its expansion in the kept words of its piece.
    pub expansions: Vec<Vec<(Scalar, Word)>>,
}

impl DerivedWords {
    pub fn num_words(&self) -> usize {
        self.words.values().map(Vec::len).sum()
    }
}

fn restrict(v: &[Scalar], idx: &[usize]) -> Vec<Scalar> {
    idx.iter().map(|&k| v[k].clone()).collect()
}

pub fn derive_words(t: &GradedAlgebraTable) -> Result<DerivedWords> {
    let q = t.quiver().clone();
    let field = t.field();
    let mut kept: BTreeMap<Piece, Vec<(Word, Vec<Scalar>)>> = BTreeMap::new();
    let mut frontier: Vec<(Word, Vec<Scalar>)> = Vec::new();
    for v in 0..q.num_vertices() {
        let w = Word::empty(v);
        let value = t.unit(t.idempotents()[v]);
        let piece = Piece { bidegree: (0, 0), start: v, end: v };
        kept.entry(piece).or_default().push((w.clone(), value.clone()));
        frontier.push((w, value));
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, value) in &frontier {
            let end = w.end(&q);
            for l in 0..num_letters(&q) {
                if letter_src(&q, l) != end {
                    continue;
                }
                let Some(v) = t.mul_vec(&t.generators()[l], value)? else {
                    continue;
                };
                if v.iter().all(Scalar::is_zero) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.letters.push(l);
                let piece = Piece {
                    bidegree: w2.bidegree(&q),
                    start: w2.start,
                    end: w2.end(&q),
                };
                let idx = t.piece(&piece);
                let entry = kept.entry(piece).or_default();
                let mut cols: Vec<Vec<Scalar>> = entry.iter().map(|(_, x)| restrict(x, idx)).collect();
                cols.push(restrict(&v, idx));
                if Matrix::from_columns(field, idx.len(), &cols).rank() == cols.len() {
                    entry.push((w2.clone(), v.clone()));
                    next.push((w2, v));
                }
            }
        }
        frontier = next;
    }
    let mut expansions = vec![Vec::new(); t.dim()];
    for (piece, idx) in t.pieces() {
        let ws = kept.get(piece).map_or(&[][..], |v| v.as_slice());
        if ws.len() != idx.len() {
            return Err(Error::Internal(format!(
                "generators span {} of {} dimensions in a piece",
                ws.len(),
                idx.len()
            )));
        }
        let m = Matrix::from_columns(field, idx.len(), &ws.iter().map(|(_, v)| restrict(v, idx)).collect::<Vec<_>>());
        for (r, &k) in idx.iter().enumerate() {
            let mut e = vec![field.zero(); idx.len()];
            e[r] = field.one();
            let particular = m
                .solve_vec(&e)
                .ok_or_else(|| Error::Internal("word matrix is singular".into()))?;
            expansions[k] = particular
                .into_iter()
                .zip(ws)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, (w, _))| (c, w.clone()))
                .collect();
        }
    }
    let words = kept
        .into_iter()
        .map(|(p, v)| (p, v.into_iter().map(|(w, _)| w).collect()))
        .collect();
    Ok(DerivedWords { words, expansions })
}
