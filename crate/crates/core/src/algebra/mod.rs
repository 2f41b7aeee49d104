//! Graded algebras presented by basis and structure constants.
//!
//! All three algebras are generated by the letters of the double quiver:
//! letter `a < m` is the arrow `α` itself and letter `m + a` is `α*`. A word
//! lists letters in traversal order, and the product `x·y` of two basis
//! elements means "first `y`, then `x`", so `x·y` can be nonzero only when `y`
//! ends where `x` starts. Every basis element sits in a single bidegree
//! `(u, s)`: `u` unstarred and `s` starred letters.

pub mod omega;
pub mod pi;
pub mod sigma;
pub mod words;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::quiver::Quiver;
use crate::{Field, Result, Scalar};

pub use omega::{omega, omega_tensor_dims, Bimodule};
pub use pi::{pi_table, PreprojectiveAlgebra};
pub use sigma::{sigma_prime_table, sigma_table};
pub use words::{derive_words, DerivedWords};

pub type Sparse = Vec<(usize, Scalar)>;

pub fn num_letters(q: &Quiver) -> usize {
    2 * q.num_arrows()
}

pub fn is_starred(q: &Quiver, l: usize) -> bool {
    l >= q.num_arrows()
}

pub fn letter_arrow(q: &Quiver, l: usize) -> usize {
    l % q.num_arrows().max(1)
}

pub fn letter_src(q: &Quiver, l: usize) -> usize {
    let a = q.arrow(letter_arrow(q, l));
    if is_starred(q, l) {
        a.tgt
    } else {
        a.src
    }
}

pub fn letter_tgt(q: &Quiver, l: usize) -> usize {
    let a = q.arrow(letter_arrow(q, l));
    if is_starred(q, l) {
        a.src
    } else {
        a.tgt
    }
}

pub fn letter_name(q: &Quiver, l: usize) -> String {
    let id = &q.arrow(letter_arrow(q, l)).id;
    if is_starred(q, l) {
        format!("{id}*")
    } else {
        id.clone()
    }
}

/// Letters in traversal order, starting at `start` (needed for the empty word).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word {
    pub start: usize,
    pub letters: Vec<usize>,
}

impl Word {
    pub fn empty(v: usize) -> Word {
        Word { start: v, letters: Vec::new() }
    }

    pub fn end(&self, q: &Quiver) -> usize {
        self.letters.last().map_or(self.start, |&l| letter_tgt(q, l))
    }

    pub fn bidegree(&self, q: &Quiver) -> (usize, usize) {
        let s = self.letters.iter().filter(|&&l| is_starred(q, l)).count();
        (self.letters.len() - s, s)
    }

    pub fn is_path(&self, q: &Quiver) -> bool {
        let mut at = self.start;
        for &l in &self.letters {
            if letter_src(q, l) != at {
                return false;
            }
            at = letter_tgt(q, l);
        }
        true
    }

    /// Written as an algebra product: the last letter traversed comes first.
    pub fn display(&self, q: &Quiver) -> String {
        if self.letters.is_empty() {
            return format!("e{}", q.vertex_id(self.start));
        }
        let names: Vec<String> = self.letters.iter().rev().map(|&l| letter_name(q, l)).collect();
        names.join("·")
    }
}

/// How words are printed: as double-quiver paths, or through the generators
/// `f`, `g` of Σ (product `×`) or `f`, `τ⁻g` of Σ′ (product `*`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordStyle {
    Pi,
    Sigma,
    SigmaPrime,
}

impl WordStyle {
    pub fn format(self, q: &Quiver, w: &Word) -> String {
        let (unstarred, starred, sep, empty) = match self {
            WordStyle::Pi => return w.display(q),
            WordStyle::Sigma => ("f_", "g_", "×", "id_P"),
            WordStyle::SigmaPrime => ("τ⁻g_", "f_", "*", "id_P"),
        };
        if w.letters.is_empty() {
            return format!("{empty}{}", q.vertex_id(w.start));
        }
        let names: Vec<String> = w
            .letters
            .iter()
            .rev()
            .map(|&l| {
                let id = &q.arrow(letter_arrow(q, l)).id;
                let prefix = if is_starred(q, l) { starred } else { unstarred };
                format!("{prefix}{id}")
            })
            .collect();
        names.join(sep)
    }

    pub fn format_combination(self, q: &Quiver, terms: &[(Scalar, Word)]) -> String {
        let parts: Vec<String> = terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, w)| {
                let s = self.format(q, w);
                if c.is_one() {
                    s
                } else if (-c.clone()).is_one() {
                    format!("-{s}")
                } else {
                    format!("{c}·{s}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    Length,
    Starred,
    Unstarred,
}

impl Grading {
    pub fn degree(self, (u, s): (usize, usize)) -> usize {
        match self {
            Grading::Length => u + s,
            Grading::Starred => s,
            Grading::Unstarred => u,
        }
    }
}

/// A down-closed set of bidegrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Window {
    pub max_unstarred: Option<usize>,
    pub max_starred: Option<usize>,
    pub max_length: Option<usize>,
}

impl Window {
    pub fn graded(grading: Grading, max: Option<usize>) -> Window {
        let mut w = Window::default();
        match grading {
            Grading::Length => w.max_length = max,
            Grading::Starred => w.max_starred = max,
            Grading::Unstarred => w.max_unstarred = max,
        }
        w
    }

    pub fn contains(&self, (u, s): (usize, usize)) -> bool {
        self.max_unstarred.map_or(true, |m| u <= m)
            && self.max_starred.map_or(true, |m| s <= m)
            && self.max_length.map_or(true, |m| u + s <= m)
    }

    pub fn intersect(&self, other: &Window) -> Window {
        fn min(a: Option<usize>, b: Option<usize>) -> Option<usize> {
            match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            }
        }
        Window {
            max_unstarred: min(self.max_unstarred, other.max_unstarred),
            max_starred: min(self.max_starred, other.max_starred),
            max_length: min(self.max_length, other.max_length),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub bidegree: (usize, usize),
}

/// Vertex pair and bidegree: the blocks every map of these algebras preserves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Piece {
    pub bidegree: (usize, usize),
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub vertex: usize,
    pub terms: Vec<(Scalar, Word)>,
}

/// Product of two basis elements, called only for composable pairs whose
/// product lies in the window.
pub trait Multiplication: Send + Sync {
    fn product(&self, x: usize, y: usize) -> Result<Sparse>;
}

pub struct GradedAlgebraTable {
    pub name: String,
    pub convention: String,
    pub style: WordStyle,
    quiver: Arc<Quiver>,
    field: Field,
    grading: Grading,
    window: Window,
    elements: Vec<BasisElement>,
    pieces: BTreeMap<Piece, Vec<usize>>,
    generators: Vec<Vec<Scalar>>,
    idempotents: Vec<usize>,
    relations: Vec<Relation>,
    mult: Arc<dyn Multiplication>,
    cache: RwLock<HashMap<(usize, usize), Arc<Sparse>>>,
}

impl std::fmt::Debug for GradedAlgebraTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedAlgebraTable")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("window", &self.window)
            .finish()
    }
}

pub struct TableParts {
    pub name: String,
    pub convention: String,
    pub style: WordStyle,
    pub quiver: Arc<Quiver>,
    pub field: Field,
    pub grading: Grading,
    pub window: Window,
    pub elements: Vec<BasisElement>,
    pub generators: Vec<Vec<Scalar>>,
    pub idempotents: Vec<usize>,
    pub relations: Vec<Relation>,
    pub mult: Arc<dyn Multiplication>,
}

impl GradedAlgebraTable {
    pub fn new(parts: TableParts) -> GradedAlgebraTable {
        let mut pieces: BTreeMap<Piece, Vec<usize>> = BTreeMap::new();
        for (k, e) in parts.elements.iter().enumerate() {
            pieces
                .entry(Piece {
                    bidegree: e.bidegree,
                    start: e.start,
                    end: e.end,
                })
                .or_default()
                .push(k);
        }
        GradedAlgebraTable {
            name: parts.name,
            convention: parts.convention,
            style: parts.style,
            quiver: parts.quiver,
            field: parts.field,
            grading: parts.grading,
            window: parts.window,
            elements: parts.elements,
            pieces,
            generators: parts.generators,
            idempotents: parts.idempotents,
            relations: parts.relations,
            mult: parts.mult,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> GradedAlgebraTable {
        for (e, l) in self.elements.iter_mut().zip(labels) {
            e.label = l;
        }
        self
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &BasisElement {
        &self.elements[k]
    }

    pub fn degree(&self, k: usize) -> usize {
        self.grading.degree(self.elements[k].bidegree)
    }

    pub fn pieces(&self) -> &BTreeMap<Piece, Vec<usize>> {
        &self.pieces
    }

    pub fn piece(&self, p: &Piece) -> &[usize] {
        self.pieces.get(p).map_or(&[], |v| v.as_slice())
    }

    pub fn generators(&self) -> &[Vec<Scalar>] {
        &self.generators
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Dimensions by native degree, up to the highest nonempty degree.
    pub fn degree_dims(&self) -> Vec<usize> {
        let mut dims = Vec::new();
        for k in 0..self.dim() {
            let d = self.degree(k);
            if dims.len() <= d {
                dims.resize(d + 1, 0);
            }
            dims[d] += 1;
        }
        dims
    }

    pub fn zero(&self) -> Vec<Scalar> {
        vec![self.field.zero(); self.dim()]
    }

    pub fn unit(&self, k: usize) -> Vec<Scalar> {
        let mut v = self.zero();
        v[k] = self.field.one();
        v
    }

    fn product_bidegree(&self, x: usize, y: usize) -> (usize, usize) {
        let (a, b) = (self.elements[x].bidegree, self.elements[y].bidegree);
        (a.0 + b.0, a.1 + b.1)
    }

    /// `x·y` of basis elements; `None` when the product leaves the window.
    pub fn mul(&self, x: usize, y: usize) -> Result<Option<Arc<Sparse>>> {
        if self.elements[x].start != self.elements[y].end {
            return Ok(Some(Arc::new(Vec::new())));
        }
        if !self.window.contains(self.product_bidegree(x, y)) {
            return Ok(None);
        }
        if let Some(p) = self.cache.read().unwrap().get(&(x, y)) {
            return Ok(Some(p.clone()));
        }
        let p = Arc::new(self.mult.product(x, y)?);
        self.cache.write().unwrap().insert((x, y), p.clone());
        Ok(Some(p))
    }

    /// Replaces the structure constant of `x·y`, for fault injection.
    pub fn override_product(&self, x: usize, y: usize, value: Sparse) {
        self.cache.write().unwrap().insert((x, y), Arc::new(value));
    }

    /// Bilinear extension of [`Self::mul`].
    pub fn mul_vec(&self, a: &[Scalar], b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        let mut out = self.zero();
        for (x, ax) in a.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (y, by) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let Some(p) = self.mul(x, y)? else {
                    return Ok(None);
                };
                let c = ax * by;
                for (k, v) in p.iter() {
                    out[*k] = &out[*k] + &(&c * v);
                }
            }
        }
        Ok(Some(out))
    }

    /// Value of a word: the generator of its last letter times ... times the
    /// generator of its first letter.
    pub fn word_value(&self, w: &Word) -> Result<Option<Vec<Scalar>>> {
        let mut acc = self.unit(self.idempotents[w.start]);
        for &l in &w.letters {
            match self.mul_vec(&self.generators[l], &acc)? {
                Some(v) => acc = v,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    /// Combination of words; `None` if some word leaves the window.
    pub fn combination_value(&self, terms: &[(Scalar, Word)]) -> Result<Option<Vec<Scalar>>> {
        let mut out = self.zero();
        for (c, w) in terms {
            let Some(v) = self.word_value(w)? else {
                return Ok(None);
            };
            crate::matrix::axpy(&mut out, c, &v);
        }
        Ok(Some(out))
    }

    /// Composable basis pairs whose product stays in the window.
    pub fn product_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.dim() {
            for y in 0..self.dim() {
                if self.elements[x].start == self.elements[y].end
                    && self.window.contains(self.product_bidegree(x, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Triples `(x, y, z)` with `(x·y)·z ≠ x·(y·z)`.
    pub fn associativity_failures(&self) -> Result<Vec<(usize, usize, usize)>> {
        let mut bad = Vec::new();
        for (x, y) in self.product_pairs() {
            let xy = self.mul(x, y)?.unwrap();
            for z in 0..self.dim() {
                if self.elements[y].start != self.elements[z].end {
                    continue;
                }
                let (a, b) = (self.product_bidegree(x, y), self.elements[z].bidegree);
                if !self.window.contains((a.0 + b.0, a.1 + b.1)) {
                    continue;
                }
                let yz = self.mul(y, z)?.unwrap();
                let left = self.mul_vec(&dense(self, &xy), &self.unit(z))?.unwrap();
                let right = self.mul_vec(&self.unit(x), &dense(self, &yz))?.unwrap();
                if left != right {
                    bad.push((x, y, z));
                }
            }
        }
        Ok(bad)
    }

    /// Elements of a vector written through the basis labels.
    pub fn format_vec(&self, v: &[Scalar]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let l = &self.elements[k].label;
                if c.is_one() {
                    l.clone()
                } else if (-c.clone()).is_one() {
                    format!("-{l}")
                } else {
                    format!("{c}·{l}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn to_json(&self, with_products: bool) -> Result<serde_json::Value> {
        let q = &self.quiver;
        let dims = self.degree_dims();
        let degrees: Vec<serde_json::Value> = dims
            .iter()
            .enumerate()
            .map(|(d, _)| {
                let basis: Vec<serde_json::Value> = (0..self.dim())
                    .filter(|&k| self.degree(k) == d)
                    .map(|k| {
                        let e = &self.elements[k];
                        serde_json::json!({
                            "index": k,
                            "label": e.label,
                            "start": q.vertex_id(e.start),
                            "end": q.vertex_id(e.end),
                            "bidegree": [e.bidegree.0, e.bidegree.1],
                        })
                    })
                    .collect();
                serde_json::json!({"degree": d, "dim": basis.len(), "basis": basis})
            })
            .collect();
        let mut out = serde_json::json!({
            "schema": "graded-algebra/1",
            "name": self.name,
            "convention": self.convention,
            "field": self.field,
            "grading": self.grading,
            "window": self.window,
            "quiver": q.to_text(),
            "dims": dims,
            "total": self.dim(),
            "degrees": degrees,
        });
        if with_products {
            let mut triples = Vec::new();
            for (x, y) in self.product_pairs() {
                let p = self.mul(x, y)?.unwrap();
                for (k, c) in p.iter() {
                    triples.push(serde_json::json!([x, y, k, c]));
                }
            }
            out["products"] = serde_json::Value::Array(triples);
        }
        Ok(out)
    }
}

pub fn dense(t: &GradedAlgebraTable, s: &Sparse) -> Vec<Scalar> {
    let mut v = t.zero();
    for (k, c) in s {
        v[*k] = c.clone();
    }
    v
}

pub fn sparse(v: &[Scalar]) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

/// Bound on `|u − s|` over words of a tree: the height range.
pub(crate) fn height_span(q: &Quiver) -> Result<usize> {
    q.require_tree()?;
    let h = q.heights()?;
    let (lo, hi) = (h.iter().min().copied().unwrap_or(0), h.iter().max().copied().unwrap_or(0));
    Ok((hi - lo) as usize)
}
