//! Knitting the preprojective component one mesh at a time.
//!
//! For every arrow `α: j → i` two kinds of irreducible maps are stored:
//! the level-preserving `τ⁻ⁿP_i → τ⁻ⁿP_j` (at level 0 the map `f_ij` given by
//! `α` itself) and the raising `τ⁻ⁿP_j → τ⁻ⁿ⁺¹P_i`. The mesh ending at
//! `τ⁻ⁿ⁺¹P_j` is
//!
//! ```text
//! 0 → τ⁻ⁿP_j → ⊕_{α: k→j} τ⁻ⁿP_k ⊕ ⊕_{α: j→i} τ⁻ⁿ⁺¹P_i → τ⁻ⁿ⁺¹P_j → 0
//! ```
//!
//! whose left components are already known when vertices are visited sinks
//! first; its right components become the maps used by later meshes.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::quiver::Quiver;
use crate::rep::{
    check_exact, coxeter_oracle, hom_space, projective_rep, tau_minus, FreeModule, Rep, RepMorphism,
    ShortExactSequence,
};
use crate::{Error, Field, Result};

/// Position of a middle term inside a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// `τ⁻ⁿP_k` for an arrow `k → j` into the mesh vertex.
    Level { arrow: usize },
    /// `τ⁻ⁿ⁺¹P_i` for an arrow `j → i` out of the mesh vertex.
    Raised { arrow: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshInfo {
    pub level: usize,
    pub vertex: usize,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug)]
pub struct KnitState {
    quiver: Arc<Quiver>,
    field: Field,
    /// `reps[n][i]` is `τ⁻ⁿP_i`, `None` once the orbit has stopped.
    reps: Vec<Vec<Option<Rep>>>,
    /// `level_maps[n][α]` for `α: j → i` is `τ⁻ⁿP_i → τ⁻ⁿP_j`.
    level_maps: Vec<Vec<Option<RepMorphism>>>,
    /// `raising[n][α]` for `α: j → i` is `τ⁻ⁿP_j → τ⁻ⁿ⁺¹P_i`.
    raising: Vec<Vec<Option<RepMorphism>>>,
    meshes: Vec<MeshInfo>,
    complete: bool,
}

/// The arrow map `f_ij : P_i → P_j` for `α: j → i`, generator to `α`.
pub fn arrow_map(q: &Arc<Quiver>, field: Field, alpha: usize) -> Result<RepMorphism> {
    let arr = q.arrow(alpha);
    let pi = FreeModule::new(q, field, vec![arr.tgt])?;
    let pj = FreeModule::new(q, field, vec![arr.src])?;
    let mut image = vec![field.zero(); pj.rep().dim(arr.tgt)];
    image[pj.index_of(0, &[alpha])] = field.one();
    Ok(pi.hom_to(pj.rep(), &[image]))
}

impl KnitState {
    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of stored levels (level indices `0..levels()`).
    pub fn levels(&self) -> usize {
        self.reps.len()
    }

    /// Every τ⁻-orbit reached an injective.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn rep(&self, n: usize, i: usize) -> Option<&Rep> {
        self.reps.get(n)?.get(i)?.as_ref()
    }

    pub fn level_map(&self, n: usize, alpha: usize) -> Option<&RepMorphism> {
        self.level_maps.get(n)?.get(alpha)?.as_ref()
    }

    pub fn raising_map(&self, n: usize, alpha: usize) -> Option<&RepMorphism> {
        self.raising.get(n)?.get(alpha)?.as_ref()
    }

    pub fn meshes(&self) -> &[MeshInfo] {
        &self.meshes
    }

    pub fn mesh(&self, n: usize, j: usize) -> Option<&MeshInfo> {
        self.meshes.iter().find(|m| m.level == n && m.vertex == j)
    }

    pub fn num_representatives(&self) -> usize {
        self.reps.iter().flatten().filter(|r| r.is_some()).count()
    }

    /// Representatives in knitting order: `(level, vertex, rep)`.
    pub fn representatives(&self) -> Vec<(usize, usize, &Rep)> {
        let order = self.quiver.sinks_first_order().expect("acyclic");
        let mut out = Vec::new();
        for (n, row) in self.reps.iter().enumerate() {
            for &i in &order {
                if let Some(r) = &row[i] {
                    out.push((n, i, r));
                }
            }
        }
        out
    }

    /// Replaces one stored map; used to inject faults in tests.
    pub fn set_level_map(&mut self, n: usize, alpha: usize, f: RepMorphism) {
        self.level_maps[n][alpha] = Some(f);
    }

    pub fn set_raising_map(&mut self, n: usize, alpha: usize, f: RepMorphism) {
        self.raising[n][alpha] = Some(f);
    }

    fn term_rep(&self, n: usize, t: Term) -> &Rep {
        match t {
            Term::Level { arrow } => self.rep(n, self.quiver.arrow(arrow).src).unwrap(),
            Term::Raised { arrow } => self.rep(n + 1, self.quiver.arrow(arrow).tgt).unwrap(),
        }
    }

    /// Left and right maps of a stored mesh, assembled from the stored slots.
    pub fn mesh_maps(&self, mesh: &MeshInfo) -> Result<(RepMorphism, RepMorphism)> {
        let (n, j) = (mesh.level, mesh.vertex);
        let x = self.rep(n, j).ok_or_else(|| Error::Internal("mesh without start".into()))?;
        let y = self.rep(n + 1, j).ok_or_else(|| Error::Internal("mesh without end".into()))?;
        let parts: Vec<Rep> = mesh.terms.iter().map(|&t| self.term_rep(n, t).clone()).collect();
        let (mid, incl, proj) = Rep::direct_sum(self.quiver.clone(), self.field, &parts);
        let mut left = RepMorphism::zero(x.clone(), mid.clone());
        let mut right = RepMorphism::zero(mid.clone(), y.clone());
        for (k, &t) in mesh.terms.iter().enumerate() {
            let (l, r) = match t {
                Term::Level { arrow } => (self.level_map(n, arrow), self.raising_map(n, arrow)),
                Term::Raised { arrow } => (self.raising_map(n, arrow), self.level_map(n + 1, arrow)),
            };
            let (l, r) = (
                l.ok_or_else(|| Error::Internal("missing left component".into()))?,
                r.ok_or_else(|| Error::Internal("missing right component".into()))?,
            );
            left = left.add(&incl[k].after(l))?;
            right = right.add(&r.after(&proj[k]))?;
        }
        Ok((left, right))
    }

    /// The mesh as a short exact sequence, checked.
    pub fn mesh_sequence(&self, mesh: &MeshInfo) -> Result<ShortExactSequence> {
        let (l, r) = self.mesh_maps(mesh)?;
        ShortExactSequence::new(l, r)
    }

    pub fn to_dot(&self) -> String {
        let q = &self.quiver;
        let name = |n: usize, i: usize| format!("\"{n}_{}\"", q.vertex_id(i));
        let mut s = String::from("digraph ar_quiver {\n  rankdir=LR;\n");
        for (n, i, r) in self.representatives() {
            let label = if n == 0 {
                format!("P{}", q.vertex_id(i))
            } else {
                format!("t^-{n} P{}", q.vertex_id(i))
            };
            let _ = writeln!(s, "  {} [label=\"{label}\\n{r}\"];", name(n, i));
        }
        for n in 0..self.levels() {
            for (a, arr) in q.arrows().iter().enumerate() {
                if self.level_map(n, a).is_some() {
                    let _ = writeln!(s, "  {} -> {};", name(n, arr.tgt), name(n, arr.src));
                }
                if self.raising_map(n, a).is_some() {
                    let _ = writeln!(s, "  {} -> {};", name(n, arr.src), name(n + 1, arr.tgt));
                }
            }
        }
        for m in &self.meshes {
            if self.rep(m.level + 1, m.vertex).is_some() {
                let _ = writeln!(
                    s,
                    "  {} -> {} [style=dashed, arrowhead=none];",
                    name(m.level + 1, m.vertex),
                    name(m.level, m.vertex)
                );
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = &self.quiver;
        let reps: Vec<_> = self
            .representatives()
            .into_iter()
            .map(|(n, i, r)| {
                serde_json::json!({"level": n, "vertex": q.vertex_id(i), "rep": r.to_json()})
            })
            .collect();
        let mut level = Vec::new();
        let mut raising = Vec::new();
        for n in 0..self.levels() {
            for a in 0..q.num_arrows() {
                if let Some(f) = self.level_map(n, a) {
                    level.push(serde_json::json!({"level": n, "arrow": q.arrow(a).id, "map": f.to_json()}));
                }
                if let Some(f) = self.raising_map(n, a) {
                    raising.push(serde_json::json!({"level": n, "arrow": q.arrow(a).id, "map": f.to_json()}));
                }
            }
        }
        let meshes: Vec<_> = self
            .meshes
            .iter()
            .map(|m| {
                let terms: Vec<_> = m
                    .terms
                    .iter()
                    .map(|t| match *t {
                        Term::Level { arrow } => serde_json::json!({"kind": "level", "arrow": q.arrow(arrow).id}),
                        Term::Raised { arrow } => serde_json::json!({"kind": "raised", "arrow": q.arrow(arrow).id}),
                    })
                    .collect();
                serde_json::json!({"level": m.level, "vertex": q.vertex_id(m.vertex), "terms": terms})
            })
            .collect();
        serde_json::json!({
            "quiver": q.to_json(),
            "field": self.field.to_string(),
            "complete": self.complete,
            "representatives": reps,
            "level_maps": level,
            "raising_maps": raising,
            "meshes": meshes,
        })
    }
}

/// Knits levels `0..=max_level`. Without a bound the quiver must be Dynkin,
/// and knitting runs until every orbit reaches an injective.
pub fn knit(q: &Arc<Quiver>, field: Field, max_level: Option<usize>) -> Result<KnitState> {
    let order = q.require_acyclic()?;
    if q.num_vertices() == 0 {
        return Err(Error::Quiver("empty quiver".into()));
    }
    if !q.is_connected() {
        return Err(Error::Quiver("knitting needs a connected quiver".into()));
    }
    if max_level.is_none() && q.dynkin_type().is_none() {
        return Err(Error::Unsupported(
            "the preprojective component is infinite; give a maximal level".into(),
        ));
    }
    let (nv, na) = (q.num_vertices(), q.num_arrows());
    let mut st = KnitState {
        quiver: q.clone(),
        field,
        reps: vec![(0..nv).map(|i| projective_rep(q, field, i).map(Some)).collect::<Result<_>>()?],
        level_maps: vec![(0..na).map(|a| arrow_map(q, field, a).map(Some)).collect::<Result<_>>()?],
        raising: Vec::new(),
        meshes: Vec::new(),
        complete: false,
    };
    let mut n = 0;
    loop {
        if st.reps[n].iter().all(Option::is_none) {
            st.reps.pop();
            st.level_maps.pop();
            st.complete = true;
            break;
        }
        if max_level.is_some_and(|m| n >= m) {
            break;
        }
        st.reps.push(vec![None; nv]);
        st.level_maps.push(vec![None; na]);
        st.raising.push(vec![None; na]);
        for &j in &order {
            knit_vertex(&mut st, n, j)?;
        }
        n += 1;
    }
    while st.raising.len() < st.reps.len() {
        st.raising.push(vec![None; na]);
    }
    Ok(st)
}

fn knit_vertex(st: &mut KnitState, n: usize, j: usize) -> Result<()> {
    let q = st.quiver.clone();
    let Some(x) = st.rep(n, j).cloned() else {
        return Ok(());
    };
    let y = tau_minus(&x)?;
    let d: Vec<i64> = x.dims().iter().map(|&v| v as i64).collect();
    let predicted = coxeter_oracle(&q, &d);
    if y.is_zero() {
        if predicted.iter().all(|&c| c >= 0) {
            return Err(Error::Internal(format!(
                "τ⁻ vanishes at level {n}, vertex {} but the Coxeter transform is {predicted:?}",
                q.vertex_id(j)
            )));
        }
        return Ok(());
    }
    let ydims: Vec<i64> = y.dims().iter().map(|&v| v as i64).collect();
    if predicted != ydims {
        return Err(Error::Internal(format!(
            "dim τ⁻ = {ydims:?} but the Coxeter transform gives {predicted:?}"
        )));
    }
    let mut terms = Vec::new();
    for a in q.arrows_into(j) {
        if st.rep(n, q.arrow(a).src).is_some() {
            terms.push(Term::Level { arrow: a });
        }
    }
    for a in q.arrows_from(j) {
        if st.rep(n + 1, q.arrow(a).tgt).is_some() {
            terms.push(Term::Raised { arrow: a });
        }
    }
    let parts: Vec<Rep> = terms.iter().map(|&t| st.term_rep(n, t).clone()).collect();
    let (mid, incl, proj) = Rep::direct_sum(q.clone(), st.field, &parts);
    let mut left = RepMorphism::zero(x.clone(), mid.clone());
    for (k, &t) in terms.iter().enumerate() {
        let l = match t {
            Term::Level { arrow } => st.level_map(n, arrow),
            Term::Raised { arrow } => st.raising_map(n, arrow),
        }
        .ok_or_else(|| Error::Internal("left component not yet knitted".into()))?;
        left = left.add(&incl[k].after(l))?;
    }
    if !left.is_injective() {
        return Err(Error::Internal(format!(
            "left map of the mesh at level {n}, vertex {} is not injective",
            q.vertex_id(j)
        )));
    }
    let pi = left.cokernel();
    let homs = hom_space(pi.target(), &y)?;
    if homs.len() != 1 || !homs[0].is_iso() {
        return Err(Error::Internal(format!(
            "cokernel at level {n}, vertex {} is not τ⁻ of the start",
            q.vertex_id(j)
        )));
    }
    let lead = homs[0].first_nonzero().expect("isomorphism is nonzero");
    let phi = homs[0].scale(&lead.inv().unwrap());
    let right = phi.after(&pi);
    for (k, &t) in terms.iter().enumerate() {
        let r = right.after(&incl[k]);
        debug_assert_eq!(proj[k].after(&incl[k]), RepMorphism::identity(&parts[k]));
        match t {
            Term::Level { arrow } => st.raising[n][arrow] = Some(r),
            Term::Raised { arrow } => st.level_maps[n + 1][arrow] = Some(r),
        }
    }
    st.reps[n + 1][j] = Some(y);
    let mesh = MeshInfo { level: n, vertex: j, terms };
    check_exact(&left, &st.mesh_maps(&mesh)?.1)?;
    st.meshes.push(mesh);
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshCheck {
    pub level: usize,
    pub vertex: String,
    pub middle_terms: usize,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshReport {
    pub checks: Vec<MeshCheck>,
}

impl MeshReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&MeshCheck> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

/// Re-checks every stored mesh from the stored maps: the composite vanishes,
/// the left map is injective, the right map surjective, and dimensions add up.
pub fn verify_meshes(st: &KnitState) -> MeshReport {
    let checks = st
        .meshes
        .iter()
        .map(|m| {
            let failure = match st.mesh_maps(m) {
                Ok((l, r)) => check_exact(&l, &r).err().map(|e| e.to_string()),
                Err(e) => Some(e.to_string()),
            };
            MeshCheck {
                level: m.level,
                vertex: st.quiver.vertex_id(m.vertex).to_string(),
                middle_terms: m.terms.len(),
                ok: failure.is_none(),
                failure,
            }
        })
        .collect();
    MeshReport { checks }
}

/// `0 → P_j → ⊕_{k→j} P_k ⊕ ⊕_{j→i} τ⁻P_i → τ⁻P_j → 0`.
pub fn almost_split_from_projective(q: &Arc<Quiver>, field: Field, j: usize) -> Result<ShortExactSequence> {
    let st = knit(q, field, Some(1))?;
    let mesh = st
        .mesh(0, j)
        .ok_or_else(|| Error::Unsupported(format!("P_{} is injective", q.vertex_id(j))))?;
    st.mesh_sequence(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    const Q: Field = Field::Rationals;

    #[test]
    fn a2_and_a3_counts() {
        let st = knit(&Arc::new(samples::a2()), Q, None).unwrap();
        assert_eq!(st.num_representatives(), 3);
        let st = knit(&Arc::new(samples::a3()), Q, None).unwrap();
        assert_eq!(st.num_representatives(), 6);
        assert!(st.is_complete());
        let dims: Vec<Vec<usize>> = st.representatives().iter().map(|r| r.2.dims().to_vec()).collect();
        for d in [[1, 0, 0], [1, 1, 0], [1, 1, 1], [0, 1, 0], [0, 1, 1], [0, 0, 1]] {
            assert!(dims.contains(&d.to_vec()));
        }
        assert!(verify_meshes(&st).all_ok());
    }

    #[test]
    fn a3_almost_split() {
        let q = Arc::new(samples::a3());
        let s = almost_split_from_projective(&q, Q, 0).unwrap();
        assert_eq!(s.middle().dims(), &[1, 1, 0]);
        assert_eq!(s.end().dims(), &[0, 1, 0]);
        let s = almost_split_from_projective(&q, Q, 1).unwrap();
        assert_eq!(s.middle().dims(), &[1, 2, 1]);
        assert_eq!(s.end().dims(), &[0, 1, 1]);
        assert!(almost_split_from_projective(&q, Q, 2).is_err());
    }

    #[test]
    fn triangle_almost_split() {
        let q = Arc::new(samples::triangle());
        let s = almost_split_from_projective(&q, Q, 0).unwrap();
        assert_eq!(s.middle().dims(), &[3, 2, 1]);
        assert_eq!(s.end().dims(), &[2, 2, 1]);
    }

    #[test]
    fn non_dynkin_needs_a_bound() {
        let q = Arc::new(samples::kronecker());
        assert!(knit(&q, Q, None).is_err());
        let st = knit(&q, Q, Some(3)).unwrap();
        assert!(verify_meshes(&st).all_ok());
        assert_eq!(st.rep(3, 0).unwrap().dims(), &[7, 6]);
    }

    #[test]
    fn dynkin_counts_match_positive_roots() {
        for q in [samples::d4(), samples::eight()] {
            let roots = q.dynkin_type().unwrap().positive_roots();
            let st = knit(&Arc::new(q), Q, None).unwrap();
            assert!(st.is_complete());
            assert_eq!(st.num_representatives(), roots);
            assert!(verify_meshes(&st).all_ok());
        }
    }
}
