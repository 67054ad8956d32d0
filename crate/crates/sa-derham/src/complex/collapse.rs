use std::collections::BTreeSet;
use std::sync::Arc;

use super::{GeoComplex, Simplex};
use crate::error::{Error, Result};

pub const DEFAULT_COLLAPSE_BUDGET: usize = 10_000;

/// Removal of a free face together with its unique coface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseStep {
    pub free: Simplex,
    pub coface: Simplex,
}

impl CollapseStep {
    /// Vertex of the coface opposite the free face.
    pub fn apex(&self) -> usize {
        *self.coface.iter().find(|v| !self.free.contains(v)).expect("coface has one extra vertex")
    }
}

#[derive(Clone, Debug)]
pub struct CollapseSequence {
    pub complex: Arc<GeoComplex>,
    pub target: Arc<GeoComplex>,
    pub steps: Vec<CollapseStep>,
}

impl CollapseSequence {
    /// Replays every step, checking the free-face condition and the final state.
    pub fn replay(&self) -> Result<()> {
        let mut remaining: BTreeSet<Simplex> = self.complex.simplices().cloned().collect();
        for (n, step) in self.steps.iter().enumerate() {
            if step.coface.len() != step.free.len() + 1 || !step.free.is_face_of(&step.coface) {
                return Err(Error::InvalidCollapse(format!("step {n}: not a codimension-one pair")));
            }
            let cofaces: Vec<&Simplex> =
                remaining.iter().filter(|t| t.len() > step.free.len() && step.free.is_face_of(t)).collect();
            if cofaces != [&step.coface] {
                return Err(Error::InvalidCollapse(format!("step {n}: {:?} is not free", step.free)));
            }
            remaining.remove(&step.free);
            remaining.remove(&step.coface);
        }
        let target: BTreeSet<Simplex> = self.target.simplices().cloned().collect();
        if remaining != target {
            return Err(Error::InvalidCollapse("sequence does not end on the target".into()));
        }
        Ok(())
    }
}

struct Search<'a> {
    target: &'a BTreeSet<Simplex>,
    remaining: BTreeSet<(std::cmp::Reverse<usize>, Simplex)>,
    steps: Vec<CollapseStep>,
    expansions: usize,
    budget: usize,
}

impl Search<'_> {
    fn free_pairs(&self) -> Vec<CollapseStep> {
        let mut out = Vec::new();
        for (_, s) in &self.remaining {
            if self.target.contains(s) {
                continue;
            }
            let mut cofaces = self.remaining.iter().map(|(_, t)| t).filter(|t| t.len() > s.len() && s.is_face_of(t));
            if let (Some(t), None) = (cofaces.next(), cofaces.next()) {
                if t.len() == s.len() + 1 && !self.target.contains(t) {
                    out.push(CollapseStep { free: s.clone(), coface: t.clone() });
                }
            }
        }
        out
    }

    fn run(&mut self) -> bool {
        if self.remaining.len() == self.target.len() {
            return true;
        }
        for step in self.free_pairs() {
            if self.expansions >= self.budget {
                return false;
            }
            self.expansions += 1;
            let a = (std::cmp::Reverse(step.free.dim()), step.free.clone());
            let b = (std::cmp::Reverse(step.coface.dim()), step.coface.clone());
            self.remaining.remove(&a);
            self.remaining.remove(&b);
            self.steps.push(step);
            if self.run() {
                return true;
            }
            self.steps.pop();
            self.remaining.insert(a);
            self.remaining.insert(b);
        }
        false
    }
}

/// Greedy depth-first search for a simplicial collapse of `k` onto `target`.
///
/// Candidates are tried in (dimension descending, vertex tuple) order of the
/// free face. Failure only means the budget of node expansions ran out or
/// every branch got stuck; it does not prove non-collapsibility.
pub fn find_collapse(k: &Arc<GeoComplex>, target: &Arc<GeoComplex>, budget: usize) -> Result<CollapseSequence> {
    if !target.is_subcomplex_of(k) {
        return Err(Error::InvalidCollapse("target is not a subcomplex".into()));
    }
    let target_set: BTreeSet<Simplex> = target.simplices().cloned().collect();
    let mut search = Search {
        target: &target_set,
        remaining: k.simplices().map(|s| (std::cmp::Reverse(s.dim()), s.clone())).collect(),
        steps: Vec::new(),
        expansions: 0,
        budget,
    };
    if search.run() {
        Ok(CollapseSequence { complex: k.clone(), target: target.clone(), steps: search.steps })
    } else {
        Err(Error::CollapseBudgetExhausted(search.expansions))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{square_boundary, standard_simplex};

    #[test]
    fn tetrahedron_collapses_to_a_vertex() {
        let k = standard_simplex(3);
        let v = k.subcomplex(&[Simplex::new(vec![0])]).unwrap();
        let seq = find_collapse(&k, &v, DEFAULT_COLLAPSE_BUDGET).unwrap();
        assert_eq!(seq.steps.len(), 7);
        seq.replay().unwrap();
    }

    #[test]
    fn hollow_triangle_does_not_collapse() {
        let p = |x: i64, y: i64| vec![crate::rational::q(x), crate::rational::q(y)];
        let k = GeoComplex::new(2, vec![p(0, 0), p(1, 0), p(0, 1)], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let v = k.subcomplex(&[Simplex::new(vec![0])]).unwrap();
        assert!(matches!(find_collapse(&k, &v, DEFAULT_COLLAPSE_BUDGET), Err(Error::CollapseBudgetExhausted(_))));
        let sq = square_boundary();
        let w = sq.subcomplex(&[Simplex::new(vec![0])]).unwrap();
        assert!(find_collapse(&sq, &w, DEFAULT_COLLAPSE_BUDGET).is_err());
    }

    #[test]
    fn tampered_sequence_fails_replay() {
        let k = standard_simplex(2);
        let v = k.subcomplex(&[Simplex::new(vec![0])]).unwrap();
        let mut seq = find_collapse(&k, &v, DEFAULT_COLLAPSE_BUDGET).unwrap();
        seq.steps.swap(0, 1);
        assert!(seq.replay().is_err());
    }
}
