//! The mesh category of ℤQ: paths in the translation quiver modulo the mesh
//! relations, computed one Hom space at a time.
//!
//! Vertex `(n, i)` stands for `τ⁻ⁿP_i`. An arrow `α: j → i` of `Q` gives the
//! level arrow `(n, i) → (n, j)` (the map `τ⁻ⁿf_ij`) and the raising arrow
//! `(n, j) → (n+1, i)` (the map `τ⁻ⁿg`). The mesh ending at `z = (n+1, j)`
//! starts at `τz = (n, j)`; for every arrow `β: w → z` the polarization
//! `σβ: τz → w` is the arrow of the other kind with the same `α`.
//!
//! Every nontrivial path into `y` ends in exactly one arrow, and the mesh
//! ideal at `(x, y)` is generated by the ideal at the predecessors together
//! with `m_y` precomposed with paths into `τy`. Hence for `y ≠ x`
//!
//! ```text
//! Hom(x, y) = coker( Hom(x, τy) → ⊕_{β: w → y} Hom(x, w),  q ↦ (ω_β · σβ∘q)_β )
//! ```
//!
//! which is what the engine computes, level by level. Everything is invariant
//! under translation, so Hom spaces are stored for sources at level 0.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::matrix::{cokernel, Matrix};
use crate::quiver::Quiver;
use crate::{Error, Field, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ZVertex {
    pub level: i64,
    pub vertex: usize,
}

impl ZVertex {
    pub fn new(level: i64, vertex: usize) -> ZVertex {
        ZVertex { level, vertex }
    }

    pub fn tau(self) -> ZVertex {
        ZVertex::new(self.level - 1, self.vertex)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZKind {
    Level,
    Raise,
}

/// An arrow of ℤQ, determined by its kind, the arrow of `Q`, and its level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ZArrow {
    pub kind: ZKind,
    pub arrow: usize,
}

impl ZArrow {
    pub fn level(arrow: usize) -> ZArrow {
        ZArrow { kind: ZKind::Level, arrow }
    }

    pub fn raise(arrow: usize) -> ZArrow {
        ZArrow { kind: ZKind::Raise, arrow }
    }

    /// The other arrow of the mesh this arrow ends.
    pub fn sigma(self) -> ZArrow {
        match self.kind {
            ZKind::Level => ZArrow::raise(self.arrow),
            ZKind::Raise => ZArrow::level(self.arrow),
        }
    }

    /// Target of the arrow leaving `from`, if it leaves `from`.
    pub fn step(self, q: &Quiver, from: ZVertex) -> Option<ZVertex> {
        let a = q.arrow(self.arrow);
        match self.kind {
            ZKind::Level if from.vertex == a.tgt => Some(ZVertex::new(from.level, a.src)),
            ZKind::Raise if from.vertex == a.src => Some(ZVertex::new(from.level + 1, a.tgt)),
            _ => None,
        }
    }

    /// Source of the arrow when it ends at `to`.
    pub fn source_for(self, q: &Quiver, to: ZVertex) -> Option<ZVertex> {
        let a = q.arrow(self.arrow);
        match self.kind {
            ZKind::Level if to.vertex == a.src => Some(ZVertex::new(to.level, a.tgt)),
            ZKind::Raise if to.vertex == a.tgt => Some(ZVertex::new(to.level - 1, a.src)),
            _ => None,
        }
    }

    /// `α` for level arrows, `α*` for raising arrows.
    pub fn label(self, q: &Quiver) -> String {
        let id = &q.arrow(self.arrow).id;
        match self.kind {
            ZKind::Level => id.clone(),
            ZKind::Raise => format!("{id}*"),
        }
    }
}

/// Arrows ending at a vertex of `Q`'s copy in ℤQ: level arrows first, then
/// raising arrows, each in arrow order.
fn incoming(q: &Quiver, j: usize) -> Vec<ZArrow> {
    let mut out: Vec<ZArrow> = q.arrows_from(j).into_iter().map(ZArrow::level).collect();
    out.extend(q.arrows_into(j).into_iter().map(ZArrow::raise));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ZPath {
    pub start: ZVertex,
    pub arrows: Vec<ZArrow>,
}

impl ZPath {
    pub fn end(&self, q: &Quiver) -> ZVertex {
        self.arrows
            .iter()
            .fold(self.start, |v, a| a.step(q, v).expect("composable path"))
    }

    pub fn labels(&self, q: &Quiver) -> Vec<String> {
        self.arrows.iter().map(|a| a.label(q)).collect()
    }
}

#[derive(Clone, Debug)]
struct HomData {
    /// Paths from the level-0 source, one per basis element.
    reps: Vec<Vec<ZArrow>>,
    /// For each incoming arrow `β: w → y`, the matrix of `p ↦ β∘p` from
    /// `Hom(x, w)` to `Hom(x, y)`.
    post: Vec<(ZArrow, Matrix)>,
}

impl HomData {
    fn dim(&self) -> usize {
        self.reps.len()
    }

    fn post(&self, beta: ZArrow) -> &Matrix {
        &self.post.iter().find(|(b, _)| *b == beta).expect("incoming arrow").1
    }
}

/// `levels[d][j]` is `Hom((0, i), (d, j))` for a fixed `i`.
#[derive(Clone, Debug, Default)]
struct SourceTable {
    levels: Vec<Vec<HomData>>,
}

/// Per-arrow weights of the mesh relations, multiplying `β∘σβ` for both
/// arrows `β` built from `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signs {
    pub level: Vec<Scalar>,
    pub raise: Vec<Scalar>,
}

pub struct MeshEngine {
    quiver: Arc<Quiver>,
    field: Field,
    order: Vec<usize>,
    weights: Vec<Scalar>,
    cache: RwLock<HashMap<usize, Arc<SourceTable>>>,
}

impl std::fmt::Debug for MeshEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeshEngine")
            .field("quiver", &self.quiver.to_text())
            .field("field", &self.field)
            .field("weights", &self.weights)
            .finish()
    }
}

/// An element of `Hom(source, target)` in the engine's basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeshElement {
    pub source: ZVertex,
    pub target: ZVertex,
    pub coords: Vec<Scalar>,
}

impl MeshElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshHom {
    pub source: ZVertex,
    pub target: ZVertex,
    pub basis: Vec<ZPath>,
}

impl MeshHom {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl MeshEngine {
    /// The mesh category with all-plus mesh relations.
    pub fn new(quiver: Arc<Quiver>, field: Field) -> Result<MeshEngine> {
        let order = quiver.require_acyclic()?;
        if quiver.has_multiple_arrows() {
            return Err(Error::Unsupported("polarization needs a quiver without multiple arrows".into()));
        }
        let weights = vec![field.one(); quiver.num_arrows()];
        Ok(MeshEngine {
            quiver,
            field,
            order,
            weights,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Rescales the arrows of ℤQ by `signs`, which multiplies the term `β∘σβ`
    /// of each mesh relation by `s(β)s(σβ)`.
    pub fn twist(&self, signs: &Signs) -> Result<MeshEngine> {
        self.quiver.require_tree()?;
        let n = self.quiver.num_arrows();
        if signs.level.len() != n || signs.raise.len() != n {
            return Err(Error::Shape("one sign per arrow and kind".into()));
        }
        let weights = (0..n)
            .map(|a| &(&self.weights[a] * &signs.level[a]) * &signs.raise[a])
            .collect();
        Ok(MeshEngine {
            quiver: self.quiver.clone(),
            field: self.field,
            order: self.order.clone(),
            weights,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Signs `(−1)^{|w(j, base)|}` on the raising arrows out of `(n, j)`.
    pub fn walk_signs(q: &Quiver, field: Field, base: usize) -> Result<Signs> {
        let mut raise = Vec::new();
        for a in q.arrows() {
            raise.push(Scalar::sign_power(field, q.unique_walk(a.src, base)?.len()));
        }
        Ok(Signs {
            level: vec![field.one(); q.num_arrows()],
            raise,
        })
    }

    /// The engine whose mesh relations are the commutativity relations
    /// `Σ g∘τf − Σ f∘g` (up to an overall sign per mesh).
    pub fn commutativity(quiver: Arc<Quiver>, field: Field, base: usize) -> Result<MeshEngine> {
        let signs = MeshEngine::walk_signs(&quiver, field, base)?;
        MeshEngine::new(quiver, field)?.twist(&signs)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    fn table(&self, i: usize, depth: usize) -> Arc<SourceTable> {
        if let Some(t) = self.cache.read().unwrap().get(&i) {
            if t.levels.len() > depth {
                return t.clone();
            }
        }
        let mut cache = self.cache.write().unwrap();
        let mut table = cache.get(&i).map(|t| (**t).clone()).unwrap_or_default();
        while table.levels.len() <= depth {
            self.extend(i, &mut table);
        }
        let table = Arc::new(table);
        cache.insert(i, table.clone());
        table
    }

    fn extend(&self, i: usize, table: &mut SourceTable) {
        let q = &self.quiver;
        let d = table.levels.len();
        let mut level: Vec<Option<HomData>> = vec![None; q.num_vertices()];
        for &j in &self.order {
            let y = ZVertex::new(d as i64, j);
            let inc = incoming(q, j);
            let lookup = |w: ZVertex, level: &Vec<Option<HomData>>| -> Option<HomData> {
                if w.level < 0 {
                    None
                } else if w.level as usize == d {
                    level[w.vertex].clone()
                } else {
                    Some(table.levels[w.level as usize][w.vertex].clone())
                }
            };
            let preds: Vec<(ZArrow, Option<HomData>)> = inc
                .iter()
                .map(|&b| (b, lookup(b.source_for(q, y).unwrap(), &level)))
                .collect();
            let dims: Vec<usize> = preds.iter().map(|(_, h)| h.as_ref().map_or(0, HomData::dim)).collect();
            let total: usize = dims.iter().sum();
            let data = if d == 0 && j == i {
                HomData {
                    reps: vec![Vec::new()],
                    post: preds
                        .iter()
                        .zip(&dims)
                        .map(|((b, _), &dw)| (*b, Matrix::zeros(self.field, 1, dw)))
                        .collect(),
                }
            } else {
                let tau_y = lookup(y.tau(), &level);
                let tdim = tau_y.as_ref().map_or(0, HomData::dim);
                let mut rel = Matrix::zeros(self.field, total, tdim);
                let mut offset = 0;
                for ((b, h), &dw) in preds.iter().zip(&dims) {
                    if dw > 0 && tdim > 0 {
                        let h = h.as_ref().unwrap();
                        let block = h.post(b.sigma()).scale(&self.weights[b.arrow]);
                        rel.put_block(offset, 0, &block);
                    }
                    offset += dw;
                }
                let ck = cokernel(&rel);
                let mut reps = Vec::new();
                for &c in &ck.complement {
                    let mut offset = 0;
                    for ((b, h), &dw) in preds.iter().zip(&dims) {
                        if c < offset + dw {
                            let mut p = h.as_ref().unwrap().reps[c - offset].clone();
                            p.push(*b);
                            reps.push(p);
                            break;
                        }
                        offset += dw;
                    }
                }
                let mut post = Vec::new();
                let mut offset = 0;
                let rows: Vec<usize> = (0..ck.projection.rows()).collect();
                for ((b, _), &dw) in preds.iter().zip(&dims) {
                    let cols: Vec<usize> = (offset..offset + dw).collect();
                    post.push((*b, ck.projection.select(&rows, &cols)));
                    offset += dw;
                }
                HomData { reps, post }
            };
            level[j] = Some(data);
        }
        table.levels.push(level.into_iter().map(Option::unwrap).collect());
    }

    fn data(&self, x: ZVertex, y: ZVertex) -> Option<HomData> {
        let d = y.level - x.level;
        if d < 0 {
            return None;
        }
        let t = self.table(x.vertex, d as usize);
        Some(t.levels[d as usize][y.vertex].clone())
    }

    pub fn dim(&self, x: ZVertex, y: ZVertex) -> usize {
        self.data(x, y).map_or(0, |h| h.dim())
    }

    /// Basis of `Hom(x, y)` as representative paths.
    pub fn hom(&self, x: ZVertex, y: ZVertex) -> MeshHom {
        let basis = self
            .data(x, y)
            .map(|h| {
                h.reps
                    .into_iter()
                    .map(|arrows| ZPath { start: x, arrows })
                    .collect()
            })
            .unwrap_or_default();
        MeshHom { source: x, target: y, basis }
    }

    pub fn zero(&self, x: ZVertex, y: ZVertex) -> MeshElement {
        MeshElement {
            source: x,
            target: y,
            coords: vec![self.field.zero(); self.dim(x, y)],
        }
    }

    pub fn identity(&self, x: ZVertex) -> MeshElement {
        MeshElement {
            source: x,
            target: x,
            coords: vec![self.field.one()],
        }
    }

    pub fn basis_element(&self, x: ZVertex, y: ZVertex, k: usize) -> MeshElement {
        let mut e = self.zero(x, y);
        e.coords[k] = self.field.one();
        e
    }

    /// `β ∘ f`.
    pub fn post_compose(&self, f: &MeshElement, beta: ZArrow) -> Result<MeshElement> {
        let y = beta
            .step(&self.quiver, f.target)
            .ok_or_else(|| Error::Shape("arrow does not leave the target".into()))?;
        let h = self.data(f.source, y).expect("target is above the source");
        let coords = h.post(beta).mul_vec(&f.coords);
        Ok(MeshElement {
            source: f.source,
            target: y,
            coords,
        })
    }

    /// Class of a path.
    pub fn path_class(&self, p: &ZPath) -> Result<MeshElement> {
        let mut e = self.identity(p.start);
        for &a in &p.arrows {
            e = self.post_compose(&e, a)?;
        }
        Ok(e)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &MeshElement, f: &MeshElement) -> Result<MeshElement> {
        if g.source != f.target {
            return Err(Error::Shape("endpoints do not match".into()));
        }
        let basis = self.hom(g.source, g.target).basis;
        let mut out = self.zero(f.source, g.target);
        for (k, c) in g.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = f.clone();
            for &a in &basis[k].arrows {
                e = self.post_compose(&e, a)?;
            }
            crate::matrix::axpy(&mut out.coords, c, &e.coords);
        }
        Ok(out)
    }

    /// `τᵗ f`: every level shifts down by `t`; coordinates are unchanged.
    pub fn translate(&self, f: &MeshElement, t: i64) -> MeshElement {
        MeshElement {
            source: ZVertex::new(f.source.level - t, f.source.vertex),
            target: ZVertex::new(f.target.level - t, f.target.vertex),
            coords: f.coords.clone(),
        }
    }

    /// The mesh relation ending at `z`, as weighted paths from `τz`.
    pub fn mesh_relation(&self, z: ZVertex) -> Vec<(Scalar, ZPath)> {
        let q = &self.quiver;
        incoming(q, z.vertex)
            .into_iter()
            .map(|b| {
                (
                    self.weights[b.arrow].clone(),
                    ZPath {
                        start: z.tau(),
                        arrows: vec![b.sigma(), b],
                    },
                )
            })
            .collect()
    }

    /// DOT drawing of the levels `lo..=hi`.
    pub fn to_dot(&self, lo: i64, hi: i64) -> String {
        let q = &self.quiver;
        let name = |v: ZVertex| format!("\"({},{})\"", v.level, q.vertex_id(v.vertex));
        let mut s = String::from("digraph zq {\n  rankdir=LR;\n");
        for n in lo..=hi {
            for j in 0..q.num_vertices() {
                let v = ZVertex::new(n, j);
                let _ = writeln!(s, "  {};", name(v));
            }
        }
        for n in lo..=hi {
            for arr in q.arrows() {
                let _ = writeln!(
                    s,
                    "  {} -> {} [label=\"{}\"];",
                    name(ZVertex::new(n, arr.tgt)),
                    name(ZVertex::new(n, arr.src)),
                    arr.id
                );
                if n < hi {
                    let _ = writeln!(
                        s,
                        "  {} -> {} [label=\"{}*\"];",
                        name(ZVertex::new(n, arr.src)),
                        name(ZVertex::new(n + 1, arr.tgt)),
                        arr.id
                    );
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    fn engine(q: Quiver) -> MeshEngine {
        MeshEngine::new(Arc::new(q), Field::Rationals).unwrap()
    }

    #[test]
    fn level_zero_counts_paths() {
        let e = engine(samples::a3());
        for i in 0..3 {
            for j in 0..3 {
                let paths = crate::rep::paths_between(e.quiver(), j, i).len();
                assert_eq!(e.dim(ZVertex::new(0, i), ZVertex::new(0, j)), paths);
            }
        }
    }

    #[test]
    fn a3_graded_dimensions() {
        let e = engine(samples::a3());
        let dims: Vec<usize> = (0..4)
            .map(|s| {
                (0..3)
                    .flat_map(|i| (0..3).map(move |j| (i, j)))
                    .map(|(i, j)| e.dim(ZVertex::new(-s, i), ZVertex::new(0, j)))
                    .sum()
            })
            .collect();
        assert_eq!(dims, vec![6, 3, 1, 0]);
    }

    #[test]
    fn mesh_composites_vanish() {
        let e = engine(samples::a3());
        for n in -2..3 {
            for j in 0..3 {
                let z = ZVertex::new(n, j);
                let mut sum = e.zero(z.tau(), z);
                for (w, p) in e.mesh_relation(z) {
                    let c = e.path_class(&p).unwrap();
                    crate::matrix::axpy(&mut sum.coords, &w, &c.coords);
                }
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn twisting_twice_is_the_identity() {
        let q = Arc::new(samples::eight());
        let e = MeshEngine::new(q.clone(), Field::Rationals).unwrap();
        let s = MeshEngine::walk_signs(&q, Field::Rationals, 0).unwrap();
        let tt = e.twist(&s).unwrap().twist(&s).unwrap();
        assert_eq!(tt.weights(), e.weights());
        let t = e.twist(&s).unwrap();
        for sdeg in 0..3 {
            for i in 0..8 {
                for j in 0..8 {
                    let (x, y) = (ZVertex::new(-sdeg, i), ZVertex::new(0, j));
                    assert_eq!(e.dim(x, y), t.dim(x, y));
                }
            }
        }
    }

    #[test]
    fn translation_and_identity() {
        let e = engine(samples::a3());
        let x = ZVertex::new(-1, 1);
        let y = ZVertex::new(0, 0);
        assert_eq!(e.dim(x, y), 1);
        assert_eq!(e.dim(ZVertex::new(-2, 1), ZVertex::new(-1, 0)), 1);
        let f = e.basis_element(x, y, 0);
        assert_eq!(e.translate(&e.translate(&f, 1), -1), f);
        assert_eq!(e.compose(&e.identity(y), &f).unwrap(), f);
        assert_eq!(e.compose(&f, &e.identity(x)).unwrap(), f);
    }

    fn standard_against_modules(q: Quiver, window: usize) {
        let q = Arc::new(q);
        let e = MeshEngine::new(q.clone(), Field::Rationals).unwrap();
        let st = crate::knit::knit(&q, Field::Rationals, Some(window)).unwrap();
        for t in 0..=window {
            for i in 0..q.num_vertices() {
                for j in 0..q.num_vertices() {
                    let module = st.rep(t, j).map_or(0, |m| m.dim(i));
                    let mesh = e.dim(ZVertex::new(0, i), ZVertex::new(t as i64, j));
                    assert_eq!(mesh, module, "t={t} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn mesh_category_matches_preprojectives() {
        standard_against_modules(samples::a2(), 3);
        standard_against_modules(samples::a3(), 4);
        standard_against_modules(samples::d4(), 4);
        standard_against_modules(samples::eight(), 4);
        standard_against_modules(samples::triangle(), 4);
        standard_against_modules(crate::parse_quiver("1;2;3;4;5; a:2->1; b:3->1; c:4->1; d:5->1").unwrap(), 4);
    }
}
