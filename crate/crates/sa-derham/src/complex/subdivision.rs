use std::collections::BTreeMap;
use std::sync::Arc;

use super::{GeoComplex, Simplex};
use crate::geometry::{Point, SimplexFrame};
use crate::rational::{det, sign};

/// Barycentric subdivision together with its ancestry.
///
/// Vertex `i` of the subdivision is the barycenter of `origin[i]`; vertices are
/// numbered in the (dimension, tuple) order of the parent's simplices, so the
/// parent's vertices keep their indices.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub parent: Arc<GeoComplex>,
    pub complex: Arc<GeoComplex>,
    origin: Vec<Simplex>,
}

impl Subdivision {
    /// Parent simplex whose barycenter is vertex `v`.
    pub fn origin(&self, v: usize) -> &Simplex {
        &self.origin[v]
    }

    /// Smallest parent simplex containing the given subdivision simplex.
    pub fn carrier(&self, s: &Simplex) -> Simplex {
        let mut out: Vec<usize> = s.iter().flat_map(|&v| self.origin[v].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        Simplex(out)
    }

    /// Orientation of a top-dimensional subdivision simplex relative to the
    /// increasing-index orientation of its carrier.
    pub fn relative_sign(&self, s: &Simplex) -> i32 {
        let parent = self.carrier(s);
        relative_orientation(&self.parent.points(&parent), &self.complex.points(s))
    }
}

/// Sign of an equal-dimensional simplex `child` lying in the affine hull of
/// `parent`, measured against `parent`'s vertex order.
pub(crate) fn relative_orientation(parent: &[Point], child: &[Point]) -> i32 {
    let frame = SimplexFrame::new(parent).expect("parent simplex is nondegenerate");
    let m: Vec<Vec<_>> = child
        .iter()
        .map(|p| frame.coords(p).expect("child lies in the parent's hull"))
        .collect();
    sign(&det(m))
}

pub fn barycentric_subdivision(k: &Arc<GeoComplex>) -> Subdivision {
    let origin: Vec<Simplex> = k.simplices().cloned().collect();
    let index: BTreeMap<&Simplex, usize> = origin.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let vertices: Vec<Point> = origin.iter().map(|s| k.barycenter(s)).collect();
    let mut generators = Vec::new();
    for top in k.top_simplices() {
        // Every maximal flag of faces of `top`, i.e. every vertex ordering.
        for perm in permutations(top.len()) {
            let mut flag = Vec::with_capacity(top.len());
            let mut current: Vec<usize> = Vec::new();
            for &p in &perm {
                current.push(top[p]);
                let face = Simplex::new(current.clone());
                flag.push(index[&face]);
            }
            generators.push(Simplex::new(flag));
        }
    }
    let complex = GeoComplex::new_trusted(k.ambient_dim(), vertices, generators);
    Subdivision { parent: k.clone(), complex, origin }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard_simplex;

    #[test]
    fn edge_splits_in_two() {
        let s = barycentric_subdivision(&standard_simplex(1));
        assert_eq!(s.complex.top_simplices().len(), 2);
        assert_eq!(s.complex.num_vertices(), 3);
    }

    #[test]
    fn triangle_counts() {
        let once = barycentric_subdivision(&standard_simplex(2));
        assert_eq!(once.complex.top_simplices().len(), 6);
        let twice = barycentric_subdivision(&once.complex);
        assert_eq!(twice.complex.top_simplices().len(), 36);
        // Ancestry through both levels lands on the original triangle.
        for t in twice.complex.top_simplices() {
            assert_eq!(once.carrier(&twice.carrier(t)), Simplex::new(vec![0, 1, 2]));
        }
    }

    #[test]
    fn original_vertices_keep_indices() {
        let k = standard_simplex(3);
        let s = barycentric_subdivision(&k);
        for i in 0..4 {
            assert_eq!(s.complex.vertex(i), k.vertex(i));
            assert_eq!(s.origin(i), &Simplex::new(vec![i]));
        }
    }

    #[test]
    fn signs_alternate_over_flags() {
        let s = barycentric_subdivision(&standard_simplex(2));
        let total: i32 = s.complex.top_simplices().iter().map(|t| s.relative_sign(t)).sum();
        assert_eq!(total, 0);
        assert!(s.complex.top_simplices().iter().all(|t| s.relative_sign(t).abs() == 1));
    }
}
