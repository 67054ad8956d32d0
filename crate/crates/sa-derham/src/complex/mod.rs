//! Geometric simplicial complexes with rational vertices.
//!
//! A complex stores its vertex coordinates and the full face-closed set of
//! simplices, each a strictly increasing tuple of vertex indices. Subcomplexes
//! keep the parent's vertex list, so simplex tuples agree between the two.

mod collapse;
mod neighborhood;
mod product;
mod subdivision;

pub use collapse::{find_collapse, CollapseSequence, CollapseStep, DEFAULT_COLLAPSE_BUDGET};
pub use neighborhood::{second_derived_neighborhood, SecondDerived};
pub use product::{shuffle_paths, staircase_product, ProductComplex};
pub use subdivision::{barycentric_subdivision, Subdivision};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Deref;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{clip_all, signed_volume, Point, SimplexFrame};
use crate::rational::Q;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Strictly increasing vertex-index tuple.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    /// Sorts the tuple and returns the sign of the sorting permutation, or
    /// `None` for repeated vertices.
    pub fn with_sign(v: Vec<usize>) -> Option<(Self, i32)> {
        let mut sign = 1;
        let mut w = v.clone();
        for i in 0..w.len() {
            for j in 0..w.len() - 1 - i {
                if w[j] > w[j + 1] {
                    w.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if w.windows(2).any(|p| p[0] == p[1]) {
            return None;
        }
        Some((Simplex(w), sign))
    }

    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Codimension-one face omitting position `i`.
    pub fn facet(&self, i: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }

    pub fn intersection(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|v| other.0.binary_search(v).is_ok()).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Deref for Simplex {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for Simplex {
    fn from(v: Vec<usize>) -> Self {
        Simplex::new(v)
    }
}

/// Simplex with an orientation sign relative to its increasing vertex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedSimplex {
    pub simplex: Simplex,
    pub sign: i32,
}

impl OrientedSimplex {
    pub fn new(simplex: Simplex, sign: i32) -> Self {
        assert!(sign == 1 || sign == -1, "orientation sign must be ±1");
        OrientedSimplex { simplex, sign }
    }

    pub fn positive(simplex: Simplex) -> Self {
        OrientedSimplex { simplex, sign: 1 }
    }

    /// Codimension-one faces with signs `(−1)^i` relative to this orientation.
    pub fn boundary_faces(&self) -> Vec<OrientedSimplex> {
        if self.simplex.dim() == 0 {
            return Vec::new();
        }
        (0..self.simplex.len())
            .map(|i| OrientedSimplex {
                simplex: self.simplex.facet(i),
                sign: if i % 2 == 0 { self.sign } else { -self.sign },
            })
            .collect()
    }
}

/// Finite geometric simplicial complex.
pub struct GeoComplex {
    id: u64,
    ambient_dim: usize,
    vertices: Vec<Point>,
    /// All simplices, face-closed, in (dimension, tuple) order.
    simplices: BTreeSet<(usize, Simplex)>,
    top: Vec<Simplex>,
    dim: usize,
}

impl fmt::Debug for GeoComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeoComplex")
            .field("ambient_dim", &self.ambient_dim)
            .field("vertices", &self.vertices.len())
            .field("top", &self.top)
            .finish()
    }
}

impl GeoComplex {
    /// Builds and validates a complex from generating simplices; faces are completed.
    pub fn new(ambient_dim: usize, vertices: Vec<Point>, generators: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        let c = Self::build(ambient_dim, vertices, generators)?;
        c.validate()?;
        Ok(Arc::new(c))
    }

    /// Builds without the pairwise intersection test; used for complexes
    /// produced by constructions that preserve validity.
    pub(crate) fn new_trusted(ambient_dim: usize, vertices: Vec<Point>, generators: Vec<Simplex>) -> Arc<Self> {
        let gens = generators.into_iter().map(|s| s.0).collect();
        Arc::new(Self::build(ambient_dim, vertices, gens).expect("construction preserves validity"))
    }

    fn build(ambient_dim: usize, vertices: Vec<Point>, generators: Vec<Vec<usize>>) -> Result<Self> {
        for v in &vertices {
            if v.len() != ambient_dim {
                return Err(Error::InvalidComplex(format!(
                    "vertex has {} coordinates, expected {ambient_dim}",
                    v.len()
                )));
            }
        }
        let mut simplices = BTreeSet::new();
        for g in generators {
            let n = g.len();
            let s = Simplex::new(g);
            if s.len() != n || s.is_empty() {
                return Err(Error::InvalidComplex(format!("generator {s:?} repeats a vertex or is empty")));
            }
            if s.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidComplex(format!("generator {s:?} names a missing vertex")));
            }
            for f in s.faces() {
                simplices.insert((f.dim(), f));
            }
        }
        let dim = simplices.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut c = GeoComplex { id: fresh_id(), ambient_dim, vertices, simplices, top: Vec::new(), dim };
        c.top = c.compute_top();
        Ok(c)
    }

    /// Simplices that are nobody's facet.
    fn compute_top(&self) -> Vec<Simplex> {
        let facets: HashSet<Simplex> =
            self.simplices.iter().filter(|(d, _)| *d > 0).flat_map(|(_, s)| (0..s.len()).map(|i| s.facet(i))).collect();
        let mut top: Vec<Simplex> = self.simplices.iter().filter(|(_, s)| !facets.contains(s)).map(|(_, s)| s.clone()).collect();
        top.sort_by(|a, b| (b.dim(), a).cmp(&(a.dim(), b)));
        top
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if self.vertices[i] == self.vertices[j] {
                    return Err(Error::InvalidComplex(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        let frames: Vec<SimplexFrame> = self
            .top
            .iter()
            .map(|s| {
                SimplexFrame::new(&self.points(s))
                    .ok_or_else(|| Error::InvalidComplex(format!("simplex {s:?} is affinely dependent")))
            })
            .collect::<Result<_>>()?;
        // Distinct open top simplices of equal dimension sharing an affine hull must not overlap.
        for i in 0..self.top.len() {
            for j in i + 1..self.top.len() {
                let (a, b) = (&self.top[i], &self.top[j]);
                if a.dim() != b.dim() || a.dim() == 0 {
                    continue;
                }
                let pa = self.points(a);
                if !pa.iter().all(|p| frames[j].in_hull(p)) {
                    continue;
                }
                if overlap_volume(&pa, &frames[i], &frames[j]) {
                    return Err(Error::InvalidComplex(format!("simplices {a:?} and {b:?} overlap")));
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn points(&self, s: &Simplex) -> Vec<Point> {
        s.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(&(s.dim(), s.clone()))
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().map(|(_, s)| s)
    }

    pub fn simplices_of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.range((k, Simplex::default())..(k + 1, Simplex::default())).map(|(_, s)| s)
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    /// Maximal simplices, higher dimensions first.
    pub fn top_simplices(&self) -> &[Simplex] {
        &self.top
    }

    /// Simplices having `s` as a proper face.
    pub fn cofaces<'a>(&'a self, s: &'a Simplex) -> impl Iterator<Item = &'a Simplex> + 'a {
        self.simplices
            .range((s.dim() + 1, Simplex::default())..)
            .map(|(_, t)| t)
            .filter(move |t| s.is_face_of(t))
    }

    /// The closed simplex as a standalone complex with vertices in the tuple's
    /// order. Repeated calls return the same complex.
    pub fn closure(&self, s: &Simplex) -> Arc<GeoComplex> {
        type Cache = Mutex<HashMap<(u64, Simplex), Arc<GeoComplex>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (self.id, s.clone());
        if let Some(c) = cache.lock().expect("closure cache").get(&key) {
            return c.clone();
        }
        let verts = self.points(s);
        let c = GeoComplex::new_trusted(self.ambient_dim, verts, vec![Simplex((0..s.len()).collect())]);
        cache.lock().expect("closure cache").entry(key).or_insert(c).clone()
    }

    /// Subcomplex generated by `generators`, keeping this complex's vertex list.
    pub fn subcomplex(&self, generators: &[Simplex]) -> Result<Arc<GeoComplex>> {
        for g in generators {
            if !self.contains(g) {
                return Err(Error::UnknownSimplex(g.to_vec()));
            }
        }
        Ok(GeoComplex::new_trusted(self.ambient_dim, self.vertices.clone(), generators.to_vec()))
    }

    pub fn is_subcomplex_of(&self, other: &GeoComplex) -> bool {
        self.vertices.len() <= other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| a == b)
            && self.simplices().all(|s| other.contains(s))
    }

    /// Smallest simplex whose closure contains `x`.
    pub fn carrier(&self, x: &[Q]) -> Option<Simplex> {
        for s in &self.top {
            let frame = SimplexFrame::new(&self.points(s))?;
            if let Some(c) = frame.coords(x) {
                if c.iter().all(|v| v >= &Q::zero()) {
                    let support: Vec<usize> =
                        s.iter().zip(&c).filter(|(_, v)| !v.is_zero()).map(|(&i, _)| i).collect();
                    return Some(Simplex(support));
                }
            }
        }
        None
    }

    /// Barycenter of a simplex.
    pub fn barycenter(&self, s: &Simplex) -> Point {
        let n = Q::from_integer((s.len() as i64).into());
        (0..self.ambient_dim)
            .map(|k| s.iter().map(|&i| self.vertices[i][k].clone()).sum::<Q>() / &n)
            .collect()
    }

    /// Closed star of a vertex: every simplex containing it, with faces.
    pub fn closed_star(&self, v: usize) -> BTreeSet<Simplex> {
        let mut out = BTreeSet::new();
        for s in self.simplices() {
            if s.contains(&v) {
                out.extend(s.faces());
            }
        }
        out
    }
}

fn overlap_volume(pa: &[Point], fa: &SimplexFrame, fb: &SimplexFrame) -> bool {
    // Work in the barycentric parameters of `a`: reference simplex in ℝ^d.
    let d = fa.dim();
    let mut reference: Vec<Point> = vec![vec![Q::zero(); d]];
    for i in 0..d {
        let mut e = vec![Q::zero(); d];
        e[i] = Q::from_integer(1.into());
        reference.push(e);
    }
    let offset = &pa[0];
    let columns: Vec<Vec<Q>> = pa[1..]
        .iter()
        .map(|p| p.iter().zip(offset).map(|(x, y)| x - y).collect())
        .collect();
    let halfspaces: Vec<_> = fb
        .barycentric_functionals()
        .iter()
        .map(|f| f.pullback(offset, &columns))
        .collect();
    clip_all(&reference, &halfspaces)
        .iter()
        .any(|s| !signed_volume(s).is_zero())
}

/// Standard simplex `Δ^n` with vertices `0, e_1, …, e_n` in `ℝ^n`.
pub fn standard_simplex(n: usize) -> Arc<GeoComplex> {
    let mut verts = vec![vec![Q::zero(); n]];
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::from_integer(1.into());
        verts.push(e);
    }
    GeoComplex::new_trusted(n, verts, vec![Simplex((0..=n).collect())])
}

/// The interval `[a, b]` as a single edge in `ℝ^1`.
pub fn interval(a: Q, b: Q) -> Arc<GeoComplex> {
    GeoComplex::new_trusted(1, vec![vec![a], vec![b]], vec![Simplex(vec![0, 1])])
}

/// `[a, b]` cut into `n` equal edges.
pub fn subdivided_interval(a: Q, b: Q, n: usize) -> Arc<GeoComplex> {
    let nn = Q::from_integer((n as i64).into());
    let verts = (0..=n)
        .map(|i| vec![&a + (&b - &a) * Q::from_integer((i as i64).into()) / &nn])
        .collect();
    GeoComplex::new_trusted(1, verts, (0..n).map(|i| Simplex(vec![i, i + 1])).collect())
}

/// Boundary of the unit square as a PL circle with four edges.
pub fn square_boundary() -> Arc<GeoComplex> {
    let p = |x: i64, y: i64| vec![Q::from_integer(x.into()), Q::from_integer(y.into())];
    GeoComplex::new_trusted(
        2,
        vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)],
        vec![Simplex(vec![0, 1]), Simplex(vec![1, 2]), Simplex(vec![2, 3]), Simplex(vec![0, 3])],
    )
}

/// A single point.
pub fn point(coords: Point) -> Arc<GeoComplex> {
    let n = coords.len();
    GeoComplex::new_trusted(n, vec![coords], vec![Simplex(vec![0])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn boundary_faces_alternate() {
        let s = OrientedSimplex::positive(Simplex::new(vec![0, 1, 2]));
        let f = s.boundary_faces();
        assert_eq!(f[0], OrientedSimplex::new(Simplex::new(vec![1, 2]), 1));
        assert_eq!(f[1], OrientedSimplex::new(Simplex::new(vec![0, 2]), -1));
        assert_eq!(f[2], OrientedSimplex::new(Simplex::new(vec![0, 1]), 1));
        let e = OrientedSimplex::positive(Simplex::new(vec![0, 1])).boundary_faces();
        assert_eq!(e, vec![
            OrientedSimplex::new(Simplex::new(vec![1]), 1),
            OrientedSimplex::new(Simplex::new(vec![0]), -1)
        ]);
        assert!(OrientedSimplex::positive(Simplex::new(vec![0])).boundary_faces().is_empty());
    }

    #[test]
    fn faces_are_completed_on_load() {
        let c = standard_simplex(2);
        assert_eq!(c.num_simplices(), 7);
        assert_eq!(c.top_simplices(), &[Simplex::new(vec![0, 1, 2])]);
    }

    #[test]
    fn overlapping_triangles_are_rejected() {
        let p = |x: i64, y: i64| vec![q(x), q(y)];
        let verts = vec![p(0, 0), p(2, 0), p(0, 2), p(1, 1), p(2, 2)];
        let bad = GeoComplex::new(2, verts.clone(), vec![vec![0, 1, 2], vec![1, 2, 3]]);
        assert!(matches!(bad, Err(Error::InvalidComplex(_))));
        let ok = GeoComplex::new(2, verts, vec![vec![0, 1, 2], vec![1, 2, 4]]);
        assert!(ok.is_ok());
    }

    #[test]
    fn carrier_finds_smallest_simplex() {
        let c = standard_simplex(2);
        let mid = vec![crate::rational::qr(1, 2), q(0)];
        assert_eq!(c.carrier(&mid), Some(Simplex::new(vec![0, 1])));
    }
}
