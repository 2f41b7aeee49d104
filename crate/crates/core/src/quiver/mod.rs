//! Finite quivers, their combinatorics, and the text format.

mod parse;
mod walk;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

pub use parse::parse_quiver;
pub use walk::{Step, Walk, WalkDisplay};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// Vertices and arrows in declaration order; everything downstream refers to
/// them by index.
#[derive(Clone, Debug, Default)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

/// Type of a connected Dynkin diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dynkin {
    A(usize),
    D(usize),
    E(usize),
}

impl Dynkin {
    pub fn positive_roots(self) -> usize {
        match self {
            Dynkin::A(n) => n * (n + 1) / 2,
            Dynkin::D(n) => n * (n - 1),
            Dynkin::E(6) => 36,
            Dynkin::E(7) => 63,
            Dynkin::E(8) => 120,
            Dynkin::E(_) => unreachable!(),
        }
    }
}

impl fmt::Display for Dynkin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynkin::A(n) => write!(f, "A{n}"),
            Dynkin::D(n) => write!(f, "D{n}"),
            Dynkin::E(n) => write!(f, "E{n}"),
        }
    }
}

impl Quiver {
    pub fn empty() -> Quiver {
        Quiver::default()
    }

    /// Builds a quiver from vertex ids and `(id, src, tgt)` arrow triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S, S)]) -> Result<Quiver> {
        let mut q = Quiver::empty();
        for v in vertices {
            q.add_vertex(v.as_ref())?;
        }
        for (id, s, t) in arrows {
            q.add_arrow(id.as_ref(), s.as_ref(), t.as_ref())?;
        }
        Ok(q)
    }

    pub fn add_vertex(&mut self, id: &str) -> Result<usize> {
        parse::check_id("vertex", id)?;
        if self.vertex_index.contains_key(id) {
            return Err(Error::Quiver(format!("duplicate vertex `{id}`")));
        }
        let k = self.vertices.len();
        self.vertices.push(id.to_string());
        self.vertex_index.insert(id.to_string(), k);
        Ok(k)
    }

    pub fn add_arrow(&mut self, id: &str, src: &str, tgt: &str) -> Result<usize> {
        self.add_arrow_unchecked_id(id, src, tgt, true)
    }

    fn add_arrow_unchecked_id(&mut self, id: &str, src: &str, tgt: &str, check: bool) -> Result<usize> {
        if check {
            parse::check_id("arrow", id)?;
        }
        if self.arrow_index.contains_key(id) {
            return Err(Error::Quiver(format!("duplicate arrow `{id}`")));
        }
        let lookup = |v: &str| {
            self.vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| Error::Quiver(format!("arrow `{id}` refers to undeclared vertex `{v}`")))
        };
        let (s, t) = (lookup(src)?, lookup(tgt)?);
        let k = self.arrows.len();
        self.arrows.push(Arrow {
            id: id.to_string(),
            src: s,
            tgt: t,
        });
        self.arrow_index.insert(id.to_string(), k);
        Ok(k)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_by_id(&self, id: &str) -> Option<usize> {
        self.arrow_index.get(id).copied()
    }

    /// Arrows with source `v`, in declaration order.
    pub fn arrows_from(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].src == v).collect()
    }

    /// Arrows with target `v`, in declaration order.
    pub fn arrows_into(&self, v: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].tgt == v).collect()
    }

    pub fn has_multiple_arrows(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.arrows.iter().any(|a| {
            let key = (a.src.min(a.tgt), a.src.max(a.tgt));
            !seen.insert(key)
        })
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.iter().any(|a| a.src == a.tgt)
    }

    /// Vertices ordered so that the target of every arrow comes before its
    /// source, smallest index first among the available ones. `None` when
    /// there is an oriented cycle.
    pub fn sinks_first_order(&self) -> Option<Vec<usize>> {
        let n = self.num_vertices();
        let mut out_deg = vec![0usize; n];
        for a in &self.arrows {
            out_deg[a.src] += 1;
        }
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let v = (0..n).find(|&v| !done[v] && out_deg[v] == 0)?;
            done[v] = true;
            order.push(v);
            for a in &self.arrows {
                if a.tgt == v {
                    out_deg[a.src] -= 1;
                }
            }
        }
        Some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.sinks_first_order().is_some()
    }

    pub fn require_acyclic(&self) -> Result<Vec<usize>> {
        self.sinks_first_order().ok_or_else(|| {
            let stuck = (0..self.num_vertices())
                .find(|&v| self.arrows_from(v).iter().any(|&a| self.arrows[a].tgt == v))
                .map(|v| self.vertices[v].clone())
                .unwrap_or_else(|| "some vertex".into());
            Error::Cyclic(stuck)
        })
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.arrows_from(v).is_empty()).collect()
    }

    /// Neighbouring steps out of `v`: outgoing arrows forward, then incoming
    /// arrows reversed, each in declaration order.
    pub fn steps_from(&self, v: usize) -> Vec<Step> {
        let mut out: Vec<Step> = self
            .arrows_from(v)
            .into_iter()
            .map(|arrow| Step { arrow, forward: true })
            .collect();
        out.extend(
            self.arrows_into(v)
                .into_iter()
                .filter(|&a| self.arrows[a].src != v)
                .map(|arrow| Step { arrow, forward: false }),
        );
        out
    }

    /// Breadth-first spanning tree from vertex 0: parent step into each vertex.
    fn spanning_tree(&self) -> (Vec<Option<Step>>, Vec<bool>) {
        let n = self.num_vertices();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        if n == 0 {
            return (parent, seen);
        }
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for s in self.steps_from(v) {
                let w = s.to_vertex(self);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(s);
                    queue.push_back(w);
                }
            }
        }
        (parent, seen)
    }

    pub fn is_connected(&self) -> bool {
        self.spanning_tree().1.iter().all(|&s| s)
    }

    /// Underlying undirected graph connected and without cycles (so no loops
    /// and no parallel edges).
    pub fn is_tree(&self) -> bool {
        self.num_vertices() > 0 && self.is_connected() && self.num_arrows() + 1 == self.num_vertices()
    }

    pub fn require_tree(&self) -> Result<()> {
        if self.is_tree() {
            Ok(())
        } else if !self.is_connected() {
            Err(Error::NotTree("underlying graph is disconnected".into()))
        } else {
            Err(Error::NotTree(format!(
                "{} edges on {} vertices",
                self.num_arrows(),
                self.num_vertices()
            )))
        }
    }

    /// Walk from 0 to `v` along the spanning tree.
    fn tree_walk_from_root(&self, parent: &[Option<Step>], v: usize) -> Vec<Step> {
        let mut steps = Vec::new();
        let mut at = v;
        while let Some(s) = parent[at] {
            steps.push(s);
            at = s.from_vertex(self);
        }
        steps.reverse();
        steps
    }

    fn reduced_tree_walk(&self, parent: &[Option<Step>], a: usize, b: usize) -> Walk {
        let to_a = self.tree_walk_from_root(parent, a);
        let to_b = self.tree_walk_from_root(parent, b);
        let common = to_a.iter().zip(&to_b).take_while(|(x, y)| x == y).count();
        let mut steps: Vec<Step> = to_a[common..].iter().rev().map(|s| s.inverse()).collect();
        steps.extend_from_slice(&to_b[common..]);
        Walk::new(self, a, steps).expect("tree walks are reduced")
    }

    /// The unique reduced walk from `a` to `b` in a tree.
    pub fn unique_walk(&self, a: usize, b: usize) -> Result<Walk> {
        self.require_tree()?;
        if a >= self.num_vertices() || b >= self.num_vertices() {
            return Err(Error::Quiver("vertex index out of range".into()));
        }
        let (parent, _) = self.spanning_tree();
        Ok(self.reduced_tree_walk(&parent, a, b))
    }

    /// One closed walk per arrow outside a breadth-first spanning tree,
    /// starting with that arrow and returning through the tree.
    pub fn fundamental_cycles(&self) -> Result<Vec<Walk>> {
        if !self.is_connected() {
            return Err(Error::Quiver("underlying graph is disconnected".into()));
        }
        let (parent, _) = self.spanning_tree();
        let tree_arrows: Vec<usize> = parent.iter().flatten().map(|s| s.arrow).collect();
        let mut out = Vec::new();
        for (k, a) in self.arrows.iter().enumerate() {
            if tree_arrows.contains(&k) {
                continue;
            }
            let mut steps = vec![Step { arrow: k, forward: true }];
            if a.src != a.tgt {
                let back = self.reduced_tree_walk(&parent, a.tgt, a.src);
                steps.extend_from_slice(back.steps());
            }
            out.push(Walk::new(self, a.src, steps)?);
        }
        Ok(out)
    }

    /// Adds `α*: j → i` for every `α: i → j`, after the original arrows.
    pub fn double_quiver(&self) -> Quiver {
        let mut q = self.clone();
        for a in &self.arrows {
            q.add_arrow_unchecked_id(
                &starred(&a.id),
                &self.vertices[a.tgt],
                &self.vertices[a.src],
                false,
            )
            .expect("starred ids cannot clash with plain ids");
        }
        q
    }

    /// Same vertices and arrow ids, every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        let mut q = self.clone();
        for a in &mut q.arrows {
            std::mem::swap(&mut a.src, &mut a.tgt);
        }
        q
    }

    /// Height function on a tree: `ℓ(i) = ℓ(j) + 1` for every arrow `j → i`,
    /// normalized to minimum 0.
    pub fn heights(&self) -> Result<Vec<i64>> {
        self.require_tree()?;
        let n = self.num_vertices();
        let mut h = vec![None; n];
        h[0] = Some(0i64);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for s in self.steps_from(v) {
                let w = s.to_vertex(self);
                if h[w].is_none() {
                    h[w] = Some(h[v].unwrap() + if s.forward { 1 } else { -1 });
                    queue.push_back(w);
                }
            }
        }
        let h: Vec<i64> = h.into_iter().map(Option::unwrap).collect();
        let m = *h.iter().min().unwrap();
        Ok(h.into_iter().map(|x| x - m).collect())
    }

    /// Dynkin type of the underlying graph, if it is a connected simply-laced
    /// Dynkin diagram.
    pub fn dynkin_type(&self) -> Option<Dynkin> {
        if !self.is_tree() {
            return None;
        }
        let n = self.num_vertices();
        let mut deg = vec![0usize; n];
        for a in &self.arrows {
            deg[a.src] += 1;
            deg[a.tgt] += 1;
        }
        let branch: Vec<usize> = (0..n).filter(|&v| deg[v] >= 3).collect();
        match branch.as_slice() {
            [] => Some(Dynkin::A(n)),
            [c] if deg[*c] == 3 => {
                let mut arms: Vec<usize> = self
                    .steps_from(*c)
                    .into_iter()
                    .map(|s| {
                        let (mut prev, mut at, mut len) = (*c, s.to_vertex(self), 1);
                        while deg[at] == 2 {
                            let next = self
                                .steps_from(at)
                                .into_iter()
                                .map(|t| t.to_vertex(self))
                                .find(|&w| w != prev)
                                .unwrap();
                            prev = at;
                            at = next;
                            len += 1;
                        }
                        len
                    })
                    .collect();
                arms.sort_unstable();
                match arms.as_slice() {
                    [1, 1, _] => Some(Dynkin::D(n)),
                    [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Some(Dynkin::E(n)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Canonical text form; parses back to an identical quiver.
    pub fn to_text(&self) -> String {
        let mut items: Vec<String> = self.vertices.clone();
        items.extend(
            self.arrows
                .iter()
                .map(|a| format!("{}:{}->{}", a.id, self.vertices[a.src], self.vertices[a.tgt])),
        );
        items.join("; ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertices,
            "arrows": self.arrows.iter().map(|a| serde_json::json!({
                "id": a.id,
                "src": self.vertices[a.src],
                "tgt": self.vertices[a.tgt],
            })).collect::<Vec<_>>(),
        })
    }
}

impl Serialize for Quiver {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn starred(id: &str) -> String {
    format!("{id}*")
}

/// Sample quivers used throughout the tests and the command line.
pub mod samples {
    use super::{parse_quiver, Quiver};

    pub fn a2() -> Quiver {
        parse_quiver("1;2; a:2->1").unwrap()
    }

    pub fn a3() -> Quiver {
        parse_quiver("1;2;3; a:2->1; b:3->2").unwrap()
    }

    pub fn triangle() -> Quiver {
        parse_quiver("1;2;3; a:3->2; b:2->1; c:3->1").unwrap()
    }

    /// Tree on eight vertices with arrows 2→1, 3→2, 3→4, 5→3, 6→4, 7→6, 7→8.
    pub fn eight() -> Quiver {
        parse_quiver("1;2;3;4;5;6;7;8; a:2->1; b:3->2; c:3->4; d:5->3; e:6->4; f:7->6; g:7->8").unwrap()
    }

    pub fn d4() -> Quiver {
        parse_quiver("1;2;3;4; a:2->1; b:3->1; c:4->1").unwrap()
    }

    pub fn kronecker() -> Quiver {
        parse_quiver("1;2; a:2->1; b:2->1").unwrap()
    }
}
