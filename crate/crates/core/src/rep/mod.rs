//! Finite-dimensional representations of acyclic quivers and their morphisms.

mod ar;
mod coxeter;
mod hom;
mod paths;
mod resolution;

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use ar::{nakayama, tau, tau_minus, tau_minus_mor, tau_mor};
pub use coxeter::{cartan_matrix, coxeter_inverse, coxeter_oracle, coxeter_matrix};
pub use hom::{euler_form, ext1, hom_space, Ext1};
pub use paths::{injective_rep, paths_between, paths_from, projective_rep, FreeModule, Path};
pub use resolution::{lift_to_resolutions, Resolution};

use crate::matrix::{cokernel, Matrix};
use crate::quiver::Quiver;
use crate::{Error, Field, Result, Scalar};

#[derive(Debug, PartialEq, Eq)]
struct RepData {
    quiver: Arc<Quiver>,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

/// A representation: a vector space per vertex and a matrix per arrow
/// (`dims[tgt] × dims[src]`). Cheap to clone.
#[derive(Clone, Debug)]
pub struct Rep(Arc<RepData>);

impl PartialEq for Rep {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Rep {}

impl Rep {
    pub fn new(quiver: Arc<Quiver>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Rep> {
        if dims.len() != quiver.num_vertices() {
            return Err(Error::Rep(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if maps.len() != quiver.num_arrows() {
            return Err(Error::Rep(format!("{} matrices for {} arrows", maps.len(), quiver.num_arrows())));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            if m.field() != field {
                return Err(Error::FieldMismatch);
            }
            if m.shape() != (dims[a.tgt], dims[a.src]) {
                return Err(Error::Rep(format!(
                    "matrix for `{}` is {}x{}, expected {}x{}",
                    a.id,
                    m.rows(),
                    m.cols(),
                    dims[a.tgt],
                    dims[a.src]
                )));
            }
        }
        Ok(Rep(Arc::new(RepData { quiver, field, dims, maps })))
    }

    pub(crate) fn new_unchecked(quiver: Arc<Quiver>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Rep {
        debug_assert!(Rep::new(quiver.clone(), field, dims.clone(), maps.clone()).is_ok());
        Rep(Arc::new(RepData { quiver, field, dims, maps }))
    }

    pub fn zero(quiver: Arc<Quiver>, field: Field) -> Rep {
        let dims = vec![0; quiver.num_vertices()];
        let maps = quiver.arrows().iter().map(|_| Matrix::zeros(field, 0, 0)).collect();
        Rep::new_unchecked(quiver, field, dims, maps)
    }

    /// Simple representation at `v`.
    pub fn simple(quiver: Arc<Quiver>, field: Field, v: usize) -> Rep {
        let dims: Vec<usize> = (0..quiver.num_vertices()).map(|w| usize::from(w == v)).collect();
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(field, dims[a.tgt], dims[a.src]))
            .collect();
        Rep::new_unchecked(quiver, field, dims, maps)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.0.quiver
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn dim(&self, v: usize) -> usize {
        self.0.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.0.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn map(&self, a: usize) -> &Matrix {
        &self.0.maps[a]
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.0.maps
    }

    /// Applies the arrows of `path` (in traversal order) to `v`.
    pub fn apply_path(&self, path: &[usize], v: &[Scalar]) -> Vec<Scalar> {
        let mut x = v.to_vec();
        for &a in path {
            x = self.map(a).mul_vec(&x);
        }
        x
    }

    /// Direct sum with its canonical inclusions and projections.
    pub fn direct_sum(quiver: Arc<Quiver>, field: Field, parts: &[Rep]) -> (Rep, Vec<RepMorphism>, Vec<RepMorphism>) {
        let n = quiver.num_vertices();
        let dims: Vec<usize> = (0..n).map(|v| parts.iter().map(|p| p.dim(v)).sum()).collect();
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arr)| {
                let mut m = Matrix::zeros(field, dims[arr.tgt], dims[arr.src]);
                let (mut r0, mut c0) = (0, 0);
                for p in parts {
                    m.put_block(r0, c0, p.map(a));
                    r0 += p.dim(arr.tgt);
                    c0 += p.dim(arr.src);
                }
                m
            })
            .collect();
        let sum = Rep::new_unchecked(quiver, field, dims.clone(), maps);
        let mut offsets = vec![0usize; n];
        let mut incl = Vec::new();
        let mut proj = Vec::new();
        for p in parts {
            let mut ib = Vec::new();
            let mut pb = Vec::new();
            for v in 0..n {
                let mut i = Matrix::zeros(field, dims[v], p.dim(v));
                i.put_block(offsets[v], 0, &Matrix::identity(field, p.dim(v)));
                pb.push(i.transpose());
                ib.push(i);
                offsets[v] += p.dim(v);
            }
            incl.push(RepMorphism::new_unchecked(p.clone(), sum.clone(), ib));
            proj.push(RepMorphism::new_unchecked(sum.clone(), p.clone(), pb));
        }
        (sum, incl, proj)
    }

    /// Representation of the opposite quiver on the dual spaces.
    pub fn dual(&self) -> Rep {
        let q = Arc::new(self.quiver().opposite());
        let maps = self.maps().iter().map(Matrix::transpose).collect();
        Rep::new_unchecked(q, self.field(), self.dims().to_vec(), maps)
    }

    /// Same spaces and maps viewed over an equal quiver (used after dualizing twice).
    pub fn rebase(&self, quiver: &Arc<Quiver>) -> Rep {
        assert_eq!(**quiver, **self.quiver(), "rebase onto a different quiver");
        Rep::new_unchecked(quiver.clone(), self.field(), self.dims().to_vec(), self.maps().to_vec())
    }

    /// Subrepresentation spanned at each vertex by the columns of `bases[v]`
    /// (assumed independent and closed under the arrows), with its inclusion.
    pub fn subrep(&self, bases: Vec<Matrix>) -> Result<RepMorphism> {
        let q = self.quiver().clone();
        let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
        let mut maps = Vec::with_capacity(q.num_arrows());
        for (a, arr) in q.arrows().iter().enumerate() {
            let image = self.map(a) * &bases[arr.src];
            let x = match bases[arr.tgt].solve(&image)? {
                crate::matrix::Solution::Consistent { particular, .. } => particular,
                crate::matrix::Solution::Inconsistent => {
                    return Err(Error::Rep(format!("subspace not closed under `{}`", arr.id)))
                }
            };
            maps.push(x);
        }
        let sub = Rep::new(q, self.field(), dims, maps)?;
        Ok(RepMorphism::new_unchecked(sub, self.clone(), bases))
    }

    /// Cokernel of a morphism into `self`, with the projection onto it.
    pub fn quotient_by(&self, f: &RepMorphism) -> RepMorphism {
        assert_eq!(f.target(), self);
        let q = self.quiver().clone();
        let cks: Vec<_> = f.blocks().iter().map(cokernel).collect();
        let dims: Vec<usize> = cks.iter().map(|c| c.complement.len()).collect();
        let maps = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arr)| {
                let lift = self.map(a).select(
                    &(0..self.dim(arr.tgt)).collect::<Vec<_>>(),
                    &cks[arr.src].complement,
                );
                &cks[arr.tgt].projection * &lift
            })
            .collect();
        let quot = Rep::new_unchecked(q, self.field(), dims, maps);
        RepMorphism::new_unchecked(self.clone(), quot, cks.into_iter().map(|c| c.projection).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = self.quiver();
        let maps: serde_json::Map<String, serde_json::Value> = q
            .arrows()
            .iter()
            .zip(self.maps())
            .map(|(a, m)| (a.id.clone(), serde_json::json!(m.to_strings())))
            .collect();
        serde_json::json!({
            "field": self.field().to_string(),
            "dims": self.dims(),
            "maps": maps,
        })
    }
}

impl Serialize for Rep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        write!(f, "({})", d.join(","))
    }
}

/// A natural transformation between representations of the same quiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMorphism {
    source: Rep,
    target: Rep,
    blocks: Vec<Matrix>,
}

impl RepMorphism {
    /// Checks block shapes and naturality exactly.
    pub fn new(source: Rep, target: Rep, blocks: Vec<Matrix>) -> Result<RepMorphism> {
        if **source.quiver() != **target.quiver() {
            return Err(Error::Morphism("source and target live over different quivers".into()));
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch);
        }
        let q = source.quiver().clone();
        if blocks.len() != q.num_vertices() {
            return Err(Error::Morphism(format!("{} blocks for {} vertices", blocks.len(), q.num_vertices())));
        }
        for (v, b) in blocks.iter().enumerate() {
            if b.field() != source.field() {
                return Err(Error::FieldMismatch);
            }
            if b.shape() != (target.dim(v), source.dim(v)) {
                return Err(Error::Morphism(format!("block at `{}` has the wrong shape", q.vertex_id(v))));
            }
        }
        for (a, arr) in q.arrows().iter().enumerate() {
            if &(target.map(a) * &blocks[arr.src]) != &(&blocks[arr.tgt] * source.map(a)) {
                return Err(Error::Morphism(format!("not natural along `{}`", arr.id)));
            }
        }
        Ok(RepMorphism { source, target, blocks })
    }

    pub(crate) fn new_unchecked(source: Rep, target: Rep, blocks: Vec<Matrix>) -> RepMorphism {
        debug_assert!(
            RepMorphism::new(source.clone(), target.clone(), blocks.clone()).is_ok(),
            "unchecked morphism is not natural"
        );
        RepMorphism { source, target, blocks }
    }

    pub fn zero(source: Rep, target: Rep) -> RepMorphism {
        let field = source.field();
        let blocks = (0..source.dims().len())
            .map(|v| Matrix::zeros(field, target.dim(v), source.dim(v)))
            .collect();
        RepMorphism::new_unchecked(source, target, blocks)
    }

    pub fn identity(m: &Rep) -> RepMorphism {
        let blocks = m.dims().iter().map(|&d| Matrix::identity(m.field(), d)).collect();
        RepMorphism::new_unchecked(m.clone(), m.clone(), blocks)
    }

    pub fn source(&self) -> &Rep {
        &self.source
    }

    pub fn target(&self) -> &Rep {
        &self.target
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, v: usize) -> &Matrix {
        &self.blocks[v]
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &RepMorphism) -> Result<RepMorphism> {
        if f.target() != self.source() {
            return Err(Error::Morphism("composition of non-composable morphisms".into()));
        }
        let blocks = self.blocks.iter().zip(&f.blocks).map(|(g, f)| g * f).collect();
        Ok(RepMorphism::new_unchecked(f.source.clone(), self.target.clone(), blocks))
    }

    /// `self ∘ f`, panicking when the morphisms are not composable.
    pub fn after(&self, f: &RepMorphism) -> RepMorphism {
        self.compose(f).expect("composable morphisms")
    }

    fn zip(&self, other: &RepMorphism, op: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<RepMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Morphism("morphisms between different representations".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| op(a, b)).collect();
        Ok(RepMorphism::new_unchecked(self.source.clone(), self.target.clone(), blocks))
    }

    pub fn add(&self, other: &RepMorphism) -> Result<RepMorphism> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RepMorphism) -> Result<RepMorphism> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> RepMorphism {
        let blocks = self.blocks.iter().map(|b| b.scale(s)).collect();
        RepMorphism::new_unchecked(self.source.clone(), self.target.clone(), blocks)
    }

    pub fn neg(&self) -> RepMorphism {
        self.scale(&-self.field().one())
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    pub fn is_iso(&self) -> bool {
        self.blocks.iter().all(|b| b.rows() == b.cols() && b.rank() == b.cols())
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<RepMorphism> {
        let blocks: Option<Vec<Matrix>> = self.blocks.iter().map(Matrix::inverse).collect();
        Some(RepMorphism::new_unchecked(self.target.clone(), self.source.clone(), blocks?))
    }

    /// Same blocks with the source and target replaced by equal representations.
    pub fn retarget(&self, source: &Rep, target: &Rep) -> RepMorphism {
        assert_eq!(source, &self.source);
        assert_eq!(target, &self.target);
        RepMorphism::new_unchecked(source.clone(), target.clone(), self.blocks.clone())
    }

    /// `D f : D target → D source` over the opposite quiver.
    pub fn dual(&self) -> RepMorphism {
        let blocks = self.blocks.iter().map(Matrix::transpose).collect();
        RepMorphism::new_unchecked(self.target.dual(), self.source.dual(), blocks)
    }

    /// Kernel as a subrepresentation of the source, with its inclusion.
    pub fn kernel(&self) -> RepMorphism {
        self.source
            .subrep(self.blocks.iter().map(Matrix::kernel).collect())
            .expect("kernels are subrepresentations")
    }

    /// Cokernel projection out of the target.
    pub fn cokernel(&self) -> RepMorphism {
        self.target.quotient_by(self)
    }

    /// Flattened blocks in vertex order, row-major; the coordinates used for
    /// comparing and normalizing morphisms.
    pub fn entries(&self) -> Vec<Scalar> {
        self.blocks.iter().flat_map(|b| b.entries().iter().cloned()).collect()
    }

    /// First nonzero coordinate in [`RepMorphism::entries`] order.
    pub fn first_nonzero(&self) -> Option<Scalar> {
        self.blocks.iter().find_map(|b| b.first_nonzero().map(|(_, x)| x.clone()))
    }

    /// `Some(s)` when `self = s · other`.
    pub fn ratio_to(&self, other: &RepMorphism) -> Option<Scalar> {
        let a = self.entries();
        let b = other.entries();
        let k = b.iter().position(|x| !x.is_zero())?;
        let s = &a[k] * &b[k].inv().unwrap();
        a.iter().zip(&b).all(|(x, y)| x == &(&s * y)).then_some(s)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = self.source.quiver();
        let blocks: serde_json::Map<String, serde_json::Value> = (0..q.num_vertices())
            .map(|v| (q.vertex_id(v).to_string(), serde_json::json!(self.blocks[v].to_strings())))
            .collect();
        serde_json::json!({
            "field": self.field().to_string(),
            "source_dims": self.source.dims(),
            "target_dims": self.target.dims(),
            "blocks": blocks,
        })
    }
}

impl Serialize for RepMorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// `0 → A → B → C → 0`, verified exact on construction.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub left: RepMorphism,
    pub right: RepMorphism,
}

impl ShortExactSequence {
    pub fn new(left: RepMorphism, right: RepMorphism) -> Result<Self> {
        check_exact(&left, &right)?;
        Ok(ShortExactSequence { left, right })
    }

    pub fn start(&self) -> &Rep {
        self.left.source()
    }

    pub fn middle(&self) -> &Rep {
        self.left.target()
    }

    pub fn end(&self) -> &Rep {
        self.right.target()
    }
}

/// Exactness of `0 → A → B → C → 0` by rank counting.
pub fn check_exact(left: &RepMorphism, right: &RepMorphism) -> Result<()> {
    if left.target() != right.source() {
        return Err(Error::Morphism("sequence maps do not share a middle term".into()));
    }
    if !left.is_injective() {
        return Err(Error::Morphism("left map is not injective".into()));
    }
    if !right.is_surjective() {
        return Err(Error::Morphism("right map is not surjective".into()));
    }
    if !right.after(left).is_zero() {
        return Err(Error::Morphism("composite is not zero".into()));
    }
    for v in 0..left.source().dims().len() {
        if left.source().dim(v) + right.target().dim(v) != left.target().dim(v) {
            return Err(Error::Morphism("dimensions do not add up".into()));
        }
    }
    Ok(())
}
