//! Rescaling knitted irreducible maps so that they satisfy the λ-relations.
//!
//! Everything happens one step up the component: the relation at `j`, a map
//! `τP_j → P_j`, is transported by `τ⁻` to
//!
//! ```text
//! Σ_{α: k→j} G_jk ∘ f_jk + λ Σ_{α: j→i} τ⁻f_ij ∘ G_ij = 0     (P_j → τ⁻P_j)
//! ```
//!
//! with `G_ij : P_j → τ⁻P_i` in the slot of the knitted raising map `r_ij`.
//! Knitting fixes `f` at level 0 and produces `u'_ij = c'_ij · τ⁻f_ij` at
//! level 1, so the mesh reads `Σ r_jk f_jk + Σ c'_ij τ⁻f_ij r_ij = 0`. With
//! `c_ij = 1/c'_ij` and `v_ij = c'_ij r_ij` this is `Σ c_jk v_jk f_jk + Σ τ⁻f_ij v_ij = 0`,
//! and `G_ij = φ_λ(w(j, 1)) v_ij` satisfies the λ-relation at every vertex.

use std::sync::Arc;

use serde::Serialize;

use crate::knit::{arrow_map, KnitState};
use crate::matrix::{unit_vector, Matrix, Solution};
use crate::quiver::{Quiver, Walk};
use crate::rep::{projective_rep, tau_minus, tau_minus_mor, Rep, RepMorphism};
use crate::{Error, Field, Result, Scalar};

/// `φ_λ` of a walk: `λc_α` per forward step along `α`, its inverse per reverse step.
pub fn phi(walk: &Walk, lambda: &Scalar, c: &[Scalar]) -> Result<Scalar> {
    if lambda.is_zero() {
        return Err(Error::Unsupported("λ must be nonzero".into()));
    }
    let mut out = lambda.field().one();
    for s in walk.steps() {
        let x = lambda * &c[s.arrow];
        let x = if s.forward {
            x
        } else {
            x.inv().ok_or_else(|| Error::Unsupported("zero scalar on a reversed step".into()))?
        };
        out = &out * &x;
    }
    Ok(out)
}

/// Lexicographically smallest sink id.
pub fn default_base_sink(q: &Quiver) -> Option<usize> {
    q.sinks().into_iter().min_by(|&a, &b| q.vertex_id(a).cmp(q.vertex_id(b)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CScalar {
    pub arrow: String,
    pub value: Scalar,
    /// `false` when both slots vanish at module level (an end of the arrow is
    /// injective) and the scalar is set to 1.
    pub determined: bool,
}

/// `c_ij` per arrow, read off by comparing the knitted level-1 map with `τ⁻f_ij`.
pub fn extract_c(st: &KnitState) -> Result<Vec<CScalar>> {
    let q = st.quiver();
    if st.levels() < 2 && !st.is_complete() {
        return Err(Error::Unsupported("knit at least one level before extracting c".into()));
    }
    let field = st.field();
    let mut out = Vec::new();
    for a in 0..q.num_arrows() {
        let f = arrow_map(q, field, a)?;
        let tf = tau_minus_mor(&f)?;
        let entry = match st.level_map(1, a) {
            Some(u) => {
                let ratio = u
                    .ratio_to(&tf)
                    .ok_or_else(|| Error::Internal(format!("knitted map for `{}` is not a multiple of τ⁻f", q.arrow(a).id)))?;
                if ratio.is_zero() {
                    return Err(Error::Internal("zero ratio in a nonzero slot".into()));
                }
                CScalar {
                    arrow: q.arrow(a).id.clone(),
                    value: ratio.inv().unwrap(),
                    determined: true,
                }
            }
            None => {
                if !tf.is_zero() {
                    return Err(Error::Internal("τ⁻f is nonzero but the slot was not knitted".into()));
                }
                CScalar {
                    arrow: q.arrow(a).id.clone(),
                    value: field.one(),
                    determined: false,
                }
            }
        };
        out.push(entry);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FillingResult {
    pub quiver: Arc<Quiver>,
    pub lambda: Scalar,
    pub base_sink: usize,
    pub c: Vec<CScalar>,
    /// `φ_λ(w(j, base_sink))` per vertex.
    pub phi_at_vertex: Vec<Scalar>,
    /// `v_ij = r_ij / c_ij : P_j → τ⁻P_i` per arrow `j → i`.
    pub v: Vec<RepMorphism>,
    /// `G_ij = φ_λ(w(j, base_sink)) · v_ij`.
    pub g: Vec<RepMorphism>,
}

impl FillingResult {
    pub fn c_values(&self) -> Vec<Scalar> {
        self.c.iter().map(|c| c.value.clone()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = &self.quiver;
        serde_json::json!({
            "lambda": self.lambda,
            "base_sink": q.vertex_id(self.base_sink),
            "c": self.c,
            "phi": (0..q.num_vertices())
                .map(|j| serde_json::json!({"vertex": q.vertex_id(j), "value": self.phi_at_vertex[j]}))
                .collect::<Vec<_>>(),
            "g": q.arrows().iter().zip(&self.g)
                .map(|(a, g)| serde_json::json!({"arrow": a.id, "map": g.to_json()}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Level-0 raising map `P_j → τ⁻P_i` for `α: j → i`, or the zero map when `τ⁻P_i = 0`.
fn raising_or_zero(st: &KnitState, a: usize) -> Result<RepMorphism> {
    if let Some(r) = st.raising_map(0, a) {
        return Ok(r.clone());
    }
    let q = st.quiver();
    let arr = q.arrow(a);
    let src = projective_rep(q, st.field(), arr.src)?;
    let tgt = tau_minus(&projective_rep(q, st.field(), arr.tgt)?)?;
    if !tgt.is_zero() {
        return Err(Error::Internal("raising slot missing".into()));
    }
    Ok(RepMorphism::zero(src, tgt))
}

pub fn fill(st: &KnitState, lambda: &Scalar, base_sink: usize) -> Result<FillingResult> {
    let q = st.quiver().clone();
    q.require_tree()?;
    if q.has_multiple_arrows() {
        return Err(Error::Unsupported("multiple arrows".into()));
    }
    if base_sink >= q.num_vertices() || !q.arrows_from(base_sink).is_empty() {
        return Err(Error::Unsupported("the base vertex must be a sink".into()));
    }
    if lambda.is_zero() {
        return Err(Error::Unsupported("λ must be nonzero".into()));
    }
    if lambda.field() != st.field() {
        return Err(Error::FieldMismatch);
    }
    let c = extract_c(st)?;
    let cv: Vec<Scalar> = c.iter().map(|c| c.value.clone()).collect();
    let phi_at_vertex = (0..q.num_vertices())
        .map(|j| phi(&q.unique_walk(j, base_sink)?, lambda, &cv))
        .collect::<Result<Vec<_>>>()?;
    let mut v = Vec::new();
    let mut g = Vec::new();
    for (a, arr) in q.arrows().iter().enumerate() {
        let r = raising_or_zero(st, a)?;
        let vij = r.scale(&cv[a].inv().unwrap());
        g.push(vij.scale(&phi_at_vertex[arr.src]));
        v.push(vij);
    }
    Ok(FillingResult {
        quiver: q,
        lambda: lambda.clone(),
        base_sink,
        c,
        phi_at_vertex,
        v,
        g,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub level: usize,
    pub vertex: String,
    pub zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaReport {
    pub lambda: Scalar,
    pub checks: Vec<RelationCheck>,
}

impl LambdaReport {
    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(|c| c.zero)
    }
}

/// The λ-relation at `(n, j)`: `Σ τ⁻ⁿG_jk ∘ τ⁻ⁿf_jk + λ Σ τ⁻ⁿ⁺¹f_ij ∘ τ⁻ⁿG_ij`,
/// a map `τ⁻ⁿP_j → τ⁻ⁿ⁺¹P_j`, for `n = 0..levels`.
pub fn lambda_relations(
    q: &Arc<Quiver>,
    field: Field,
    lambda: &Scalar,
    g: &[RepMorphism],
    levels: usize,
) -> Result<Vec<(usize, usize, RepMorphism)>> {
    let mut fs: Vec<RepMorphism> = (0..q.num_arrows())
        .map(|a| arrow_map(q, field, a))
        .collect::<Result<_>>()?;
    let mut gs: Vec<RepMorphism> = g.to_vec();
    let mut xs: Vec<Rep> = (0..q.num_vertices())
        .map(|j| projective_rep(q, field, j))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for n in 0..levels {
        let next_fs: Vec<RepMorphism> = fs.iter().map(tau_minus_mor).collect::<Result<_>>()?;
        let ys: Vec<Rep> = xs.iter().map(tau_minus).collect::<Result<_>>()?;
        for j in 0..q.num_vertices() {
            let mut rel = RepMorphism::zero(xs[j].clone(), ys[j].clone());
            for a in q.arrows_into(j) {
                rel = rel.add(&gs[a].after(&fs[a]))?;
            }
            for a in q.arrows_from(j) {
                rel = rel.add(&next_fs[a].after(&gs[a]).scale(lambda))?;
            }
            out.push((n, j, rel));
        }
        if n + 1 < levels {
            gs = gs.iter().map(tau_minus_mor).collect::<Result<_>>()?;
        }
        fs = next_fs;
        xs = ys;
    }
    Ok(out)
}

/// Checks every λ-relation on levels `0..levels` by explicit matrix arithmetic.
pub fn verify_lambda_relations(res: &FillingResult, levels: usize) -> Result<LambdaReport> {
    let q = &res.quiver;
    let field = res.lambda.field();
    let checks = lambda_relations(q, field, &res.lambda, &res.g, levels)?
        .into_iter()
        .map(|(n, j, rel)| RelationCheck {
            level: n,
            vertex: q.vertex_id(j).to_string(),
            zero: rel.is_zero(),
        })
        .collect();
    Ok(LambdaReport {
        lambda: res.lambda.clone(),
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignCheck {
    pub arrow: String,
    pub walk_length: usize,
    pub holds: bool,
}

/// `G⁺_ij = (−1)^{|w(j, base)|} G⁻_ij` for every arrow.
pub fn sign_bridge(plus: &FillingResult, minus: &FillingResult) -> Result<Vec<SignCheck>> {
    let field = plus.lambda.field();
    if !plus.lambda.is_one() || minus.lambda != -field.one() {
        return Err(Error::Unsupported("sign bridge compares λ = 1 with λ = −1".into()));
    }
    if plus.quiver != minus.quiver || plus.base_sink != minus.base_sink || plus.c_values() != minus.c_values() {
        return Err(Error::Unsupported("fillings come from different knittings".into()));
    }
    let q = &plus.quiver;
    let mut out = Vec::new();
    for (a, arr) in q.arrows().iter().enumerate() {
        let len = q.unique_walk(arr.src, plus.base_sink)?.len();
        let sign = Scalar::sign_power(field, len);
        out.push(SignCheck {
            arrow: arr.id.clone(),
            walk_length: len,
            holds: plus.g[a] == minus.g[a].scale(&sign),
        });
    }
    Ok(out)
}

/// One scalar equation of the feasibility system.
#[derive(Clone, Debug, Serialize)]
pub struct Equation {
    pub vertex: String,
    /// Quiver vertex at which the matrix entry sits.
    pub at: String,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Arrow whose coefficient is forced to vanish.
    pub arrow: String,
    /// Combination of equations (by index) equal to that coefficient.
    pub combination: Vec<(usize, Scalar)>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Feasibility {
    /// All-nonzero coefficients, one per arrow, satisfying every relation.
    Feasible { witness: Vec<Scalar> },
    /// Some coefficient must vanish; either a linear certificate or an
    /// exhaustive search over a finite solution space.
    Infeasible {
        certificates: Vec<Certificate>,
        exhaustive: bool,
    },
    /// Randomized search over a large finite field found nothing.
    Undetermined { tries: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub lambda: Scalar,
    pub arrows: Vec<String>,
    pub equations: Vec<Equation>,
    /// `equations × arrows` coefficient matrix.
    pub system: Matrix,
    pub solution_space_dim: usize,
    pub result: Feasibility,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        matches!(self.result, Feasibility::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.result, Feasibility::Infeasible { .. })
    }
}

/// Bound on `p^dim` for exhaustive search over a finite field.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;
/// Random points tried when exhaustive search is out of reach.
pub const RANDOM_TRIES: usize = 4096;

/// Existence of nonzero `x_α` with `G_α = x_α r_α` satisfying all λ-relations.
pub fn lambda_feasibility(st: &KnitState, lambda: &Scalar) -> Result<FeasibilityReport> {
    let q = st.quiver().clone();
    let field = st.field();
    if lambda.is_zero() {
        return Err(Error::Unsupported("λ must be nonzero".into()));
    }
    if q.has_multiple_arrows() {
        return Err(Error::Unsupported("multiple arrows".into()));
    }
    let na = q.num_arrows();
    let rs: Vec<RepMorphism> = (0..na).map(|a| raising_or_zero(st, a)).collect::<Result<_>>()?;
    // Column α of the system is the relation family evaluated at x = e_α.
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut equations = Vec::new();
    for a in 0..na {
        let rel = lambda_relations(&q, field, lambda, &unit_family(&rs, a), 1)?;
        let mut col = Vec::new();
        for (_, j, m) in rel {
            for (v, b) in m.blocks().iter().enumerate() {
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        col.push(b.get(r, c).clone());
                        if a == 0 {
                            equations.push(Equation {
                                vertex: q.vertex_id(j).to_string(),
                                at: q.vertex_id(v).to_string(),
                                row: r,
                                col: c,
                            });
                        }
                    }
                }
            }
        }
        columns.push(col);
    }
    let system = Matrix::from_columns(field, equations.len(), &columns);
    let kernel = system.kernel();
    let mut certificates = Vec::new();
    let at = system.transpose();
    for a in 0..na {
        if let Solution::Consistent { particular, .. } =
            at.solve(&Matrix::column_vector(field, &unit_vector(field, na, a)))?
        {
            certificates.push(Certificate {
                arrow: q.arrow(a).id.clone(),
                combination: particular
                    .column(0)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            });
        }
    }
    let result = if !certificates.is_empty() {
        Feasibility::Infeasible {
            certificates,
            exhaustive: false,
        }
    } else {
        search_nonvanishing(&kernel, field)
    };
    if let Feasibility::Feasible { witness } = &result {
        debug_assert!(system.mul_vec(witness).iter().all(Scalar::is_zero));
    }
    Ok(FeasibilityReport {
        lambda: lambda.clone(),
        arrows: q.arrows().iter().map(|a| a.id.clone()).collect(),
        equations,
        solution_space_dim: kernel.cols(),
        system,
        result,
    })
}

fn unit_family(rs: &[RepMorphism], a: usize) -> Vec<RepMorphism> {
    rs.iter()
        .enumerate()
        .map(|(b, r)| if a == b { r.clone() } else { RepMorphism::zero(r.source().clone(), r.target().clone()) })
        .collect()
}

fn combine(kernel: &Matrix, coeffs: &[Scalar]) -> Vec<Scalar> {
    kernel.mul_vec(coeffs)
}

fn all_nonzero(v: &[Scalar]) -> bool {
    v.iter().all(|x| !x.is_zero())
}

/// A point of the column span of `kernel` with every coordinate nonzero.
///
/// No coordinate vanishes identically on the span (checked by the caller), so
/// along the curve `t ↦ Σ t^k K_k` each coordinate is a nonzero polynomial of
/// degree below `dim`; over ℚ one of the first `rows·dim + 1` integers works.
fn search_nonvanishing(kernel: &Matrix, field: Field) -> Feasibility {
    let (n, d) = kernel.shape();
    let curve = |t: &Scalar| -> Vec<Scalar> {
        let coeffs: Vec<Scalar> = (0..d).map(|k| t.pow(k as i64)).collect();
        combine(kernel, &coeffs)
    };
    let budget = (n * d.max(1) + 1) as u64;
    let p = field.characteristic();
    if p == 0 || p > budget {
        for t in 1..=budget {
            let x = curve(&field.from_i64(t as i64));
            if all_nonzero(&x) {
                return Feasibility::Feasible { witness: x };
            }
        }
        unreachable!("a nonvanishing point exists by degree counting");
    }
    if (p as f64).powi(d as i32) <= EXHAUSTIVE_LIMIT as f64 {
        let mut digits = vec![0u64; d];
        loop {
            let coeffs: Vec<Scalar> = digits.iter().map(|&x| field.from_i64(x as i64)).collect();
            let x = combine(kernel, &coeffs);
            if all_nonzero(&x) {
                return Feasibility::Feasible { witness: x };
            }
            let mut k = 0;
            while k < d {
                digits[k] += 1;
                if digits[k] < p {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == d {
                return Feasibility::Infeasible {
                    certificates: Vec::new(),
                    exhaustive: true,
                };
            }
        }
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_TRIES {
        let coeffs: Vec<Scalar> = (0..d).map(|_| field.from_i64(rng.gen_range(0..p) as i64)).collect();
        let x = combine(kernel, &coeffs);
        if all_nonzero(&x) {
            return Feasibility::Feasible { witness: x };
        }
    }
    Feasibility::Undetermined { tries: RANDOM_TRIES }
}

/// The fill coefficients `x_α = φ_λ(w(src α, base)) / c_α` as a feasibility witness.
pub fn fill_witness(res: &FillingResult) -> Vec<Scalar> {
    res.quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, arr)| &res.phi_at_vertex[arr.src] * &res.c[a].value.inv().unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knit::knit;
    use crate::quiver::samples;

    const Q: Field = Field::Rationals;

    #[test]
    fn phi_of_empty_walk() {
        let w = Walk::trivial(0);
        assert!(phi(&w, &Q.from_i64(3), &[]).unwrap().is_one());
        assert!(phi(&w, &Q.zero(), &[]).is_err());
    }

    #[test]
    fn a3_fill_relations() {
        let q = Arc::new(samples::a3());
        let st = knit(&q, Q, None).unwrap();
        for lambda in [-1, 1, 2] {
            let res = fill(&st, &Q.from_i64(lambda), 0).unwrap();
            assert!(verify_lambda_relations(&res, st.levels()).unwrap().all_zero());
        }
        assert!(fill(&st, &Q.one(), 1).is_err());
    }

    #[test]
    fn a2_c_is_undetermined() {
        let st = knit(&Arc::new(samples::a2()), Q, None).unwrap();
        let c = extract_c(&st).unwrap();
        assert_eq!(c.len(), 1);
        assert!(!c[0].determined);
    }

    #[test]
    fn triangle_is_infeasible_over_q() {
        let q = Arc::new(samples::triangle());
        let st = knit(&q, Q, Some(2)).unwrap();
        let rep = lambda_feasibility(&st, &Q.one()).unwrap();
        match rep.result {
            Feasibility::Infeasible { certificates, .. } => assert_eq!(certificates.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn triangle_is_feasible_in_characteristic_two() {
        let f2 = Field::prime(2).unwrap();
        let q = Arc::new(samples::triangle());
        let st = knit(&q, f2, Some(2)).unwrap();
        assert!(lambda_feasibility(&st, &f2.one()).unwrap().is_feasible());
    }

    #[test]
    fn eight_vertex_tree() {
        let q = Arc::new(samples::eight());
        let st = knit(&q, Q, Some(4)).unwrap();
        let c = extract_c(&st).unwrap();
        assert!(c.iter().all(|c| c.determined && !c.value.is_zero()));
        let minus = fill(&st, &Q.from_i64(-1), 0).unwrap();
        let plus = fill(&st, &Q.one(), 0).unwrap();
        let report = verify_lambda_relations(&minus, 4).unwrap();
        assert_eq!(report.checks.len(), 32);
        assert!(report.all_zero());
        assert!(sign_bridge(&plus, &minus).unwrap().iter().all(|s| s.holds));
        let feas = lambda_feasibility(&st, &Q.from_i64(-1)).unwrap();
        assert!(feas.is_feasible());
        let w = fill_witness(&minus);
        assert!(feas.system.mul_vec(&w).iter().all(Scalar::is_zero));
    }
}
