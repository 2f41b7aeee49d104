use std::fmt;

use super::Quiver;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub arrow: usize,
    /// `true` when the arrow is traversed from its source to its target.
    pub forward: bool,
}

impl Step {
    pub fn inverse(self) -> Step {
        Step {
            arrow: self.arrow,
            forward: !self.forward,
        }
    }

    pub fn from_vertex(self, q: &Quiver) -> usize {
        let a = q.arrow(self.arrow);
        if self.forward {
            a.src
        } else {
            a.tgt
        }
    }

    pub fn to_vertex(self, q: &Quiver) -> usize {
        let a = q.arrow(self.arrow);
        if self.forward {
            a.tgt
        } else {
            a.src
        }
    }
}

/// A reduced walk, stored in traversal order (first step first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    start: usize,
    end: usize,
    steps: Vec<Step>,
}

impl Walk {
    pub fn trivial(v: usize) -> Walk {
        Walk {
            start: v,
            end: v,
            steps: Vec::new(),
        }
    }

    /// Checks composability and rejects immediate backtracking.
    pub fn new(q: &Quiver, start: usize, steps: Vec<Step>) -> Result<Walk> {
        if start >= q.num_vertices() {
            return Err(Error::Quiver(format!("no vertex with index {start}")));
        }
        let mut at = start;
        for (k, s) in steps.iter().enumerate() {
            if s.arrow >= q.num_arrows() {
                return Err(Error::Quiver(format!("no arrow with index {}", s.arrow)));
            }
            if s.from_vertex(q) != at {
                return Err(Error::Quiver(format!(
                    "step {k} along `{}` does not start at `{}`",
                    q.arrow(s.arrow).id,
                    q.vertex_id(at)
                )));
            }
            if k > 0 && steps[k - 1] == s.inverse() {
                return Err(Error::Quiver(format!(
                    "step {k} immediately undoes `{}`",
                    q.arrow(s.arrow).id
                )));
            }
            at = s.to_vertex(q);
        }
        Ok(Walk { start, end: at, steps })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    pub fn reversed(&self) -> Walk {
        Walk {
            start: self.end,
            end: self.start,
            steps: self.steps.iter().rev().map(|s| s.inverse()).collect(),
        }
    }

    pub fn forward_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.forward).count()
    }

    /// Vertices visited, including both endpoints.
    pub fn vertices(&self, q: &Quiver) -> Vec<usize> {
        let mut out = vec![self.start];
        out.extend(self.steps.iter().map(|s| s.to_vertex(q)));
        out
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> WalkDisplay<'a> {
        WalkDisplay { walk: self, quiver: q }
    }
}

pub struct WalkDisplay<'a> {
    walk: &'a Walk,
    quiver: &'a Quiver,
}

impl fmt::Display for WalkDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.quiver;
        write!(f, "{}", q.vertex_id(self.walk.start))?;
        for s in &self.walk.steps {
            let id = &q.arrow(s.arrow).id;
            if s.forward {
                write!(f, " -{id}-> ")?;
            } else {
                write!(f, " <-{id}- ")?;
            }
            write!(f, "{}", q.vertex_id(s.to_vertex(q)))?;
        }
        Ok(())
    }
}
