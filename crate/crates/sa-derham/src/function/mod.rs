//! Continuous piecewise polynomial or rational functions and maps on complexes.
//!
//! Functions are expression trees. Leaves are constants, global polynomials in
//! the ambient coordinates, and piecewise functions with one rational piece per
//! top simplex. Composition with maps stays symbolic until a function is
//! resolved on a concrete parametrized region, where straddling images are
//! split exactly (affine charts) or by certified bisection (nonlinear charts).

mod partition;
mod resolve;
mod validate;

pub use partition::{pl_partition_of_unity, PartitionOfUnity};
pub use resolve::{Chart, MapMemo, Region, Resolver, Step, DEFAULT_DEPTH_LIMIT};
pub use validate::validate;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::complex::{fresh_id, GeoComplex, ProductComplex, Simplex};
use crate::error::{Error, Result};
use crate::geometry::SimplexFrame;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::rational::{to_f64, Q};

/// One rational piece on a top simplex, with lookup data.
#[derive(Clone, Debug)]
pub struct Piece {
    pub simplex: Simplex,
    pub value: RatFn,
    pub(crate) frame: SimplexFrame,
    pub(crate) lo: Vec<f64>,
    pub(crate) hi: Vec<f64>,
}

#[derive(Debug)]
pub(crate) enum FnNode {
    Const(Q),
    Poly(Poly),
    Piecewise(Vec<Piece>),
    Compose(SAFunction, Arc<SAMap>),
    Sum(Vec<SAFunction>),
    Product(Vec<SAFunction>),
    Scale(Q, SAFunction),
}

/// A continuous function on the polyhedron of `domain`.
#[derive(Clone)]
pub struct SAFunction {
    domain: Arc<GeoComplex>,
    node: Arc<FnNode>,
}

impl fmt::Debug for SAFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            FnNode::Const(c) => write!(f, "{c}"),
            FnNode::Poly(p) => write!(f, "{p:?}"),
            FnNode::Piecewise(p) => write!(f, "piecewise[{}]", p.len()),
            FnNode::Compose(g, m) => write!(f, "({g:?})∘map#{}", m.id),
            FnNode::Sum(v) => write!(f, "sum{v:?}"),
            FnNode::Product(v) => write!(f, "prod{v:?}"),
            FnNode::Scale(c, g) => write!(f, "{c}·({g:?})"),
        }
    }
}

impl SAFunction {
    fn from_node(domain: &Arc<GeoComplex>, node: FnNode) -> Self {
        SAFunction { domain: domain.clone(), node: Arc::new(node) }
    }

    pub fn constant(domain: &Arc<GeoComplex>, c: Q) -> Self {
        Self::from_node(domain, FnNode::Const(c))
    }

    pub fn one(domain: &Arc<GeoComplex>) -> Self {
        Self::constant(domain, Q::one())
    }

    /// Ambient coordinate `i`.
    pub fn coordinate(domain: &Arc<GeoComplex>, i: usize) -> Self {
        Self::polynomial(domain, Poly::var(domain.ambient_dim(), i))
    }

    /// A global polynomial in the ambient coordinates.
    pub fn polynomial(domain: &Arc<GeoComplex>, p: Poly) -> Self {
        assert_eq!(p.nvars(), domain.ambient_dim(), "polynomial arity must match the ambient dimension");
        match p.as_constant() {
            Some(c) => Self::constant(domain, c),
            None => Self::from_node(domain, FnNode::Poly(p)),
        }
    }

    /// Piecewise function from one piece per top simplex, validated for
    /// continuity and nonvanishing denominators.
    pub fn piecewise(domain: &Arc<GeoComplex>, pieces: Vec<(Simplex, RatFn)>) -> Result<Self> {
        let f = Self::piecewise_unchecked(domain, pieces)?;
        validate(&f)?;
        Ok(f)
    }

    pub(crate) fn piecewise_unchecked(domain: &Arc<GeoComplex>, pieces: Vec<(Simplex, RatFn)>) -> Result<Self> {
        let mut by_simplex: HashMap<Simplex, RatFn> = pieces.into_iter().collect();
        let mut out = Vec::new();
        for s in domain.top_simplices() {
            let value = by_simplex.remove(s).ok_or_else(|| Error::UnknownSimplex(s.to_vec()))?;
            if value.nvars() != domain.ambient_dim() {
                return Err(Error::DimensionMismatch(format!("piece on {s:?} has {} variables", value.nvars())));
            }
            out.push(make_piece(domain, s.clone(), value));
        }
        if let Some(extra) = by_simplex.keys().next() {
            return Err(Error::UnknownSimplex(extra.to_vec()));
        }
        Ok(Self::from_node(domain, FnNode::Piecewise(out)))
    }

    /// Piecewise-linear interpolation of vertex values.
    pub fn pl(domain: &Arc<GeoComplex>, values: &[Q]) -> Self {
        assert_eq!(values.len(), domain.num_vertices());
        if let Some(first) = values.first() {
            if values.iter().all(|v| v == first) {
                return Self::constant(domain, first.clone());
            }
        }
        let n = domain.ambient_dim();
        let pieces = domain
            .top_simplices()
            .iter()
            .map(|s| {
                let frame = SimplexFrame::new(&domain.points(s)).expect("validated complex");
                let mut p = Poly::zero(n);
                for (&v, b) in s.iter().zip(frame.barycentric_functionals()) {
                    if !values[v].is_zero() {
                        p = p.add(&Poly::affine(b.c.clone(), &b.lin).scale(&values[v]));
                    }
                }
                let value = RatFn::poly(p);
                Piece { simplex: s.clone(), value, frame, lo: Vec::new(), hi: Vec::new() }
            })
            .map(|p| with_bbox(domain, p))
            .collect();
        Self::from_node(domain, FnNode::Piecewise(pieces))
    }

    pub fn domain(&self) -> &Arc<GeoComplex> {
        &self.domain
    }

    pub(crate) fn node(&self) -> &FnNode {
        &self.node
    }

    /// Rebinds the function to another triangulation of an overlapping polyhedron.
    pub fn on(&self, domain: &Arc<GeoComplex>) -> Self {
        SAFunction { domain: domain.clone(), node: self.node.clone() }
    }

    pub fn as_constant(&self) -> Option<&Q> {
        match &*self.node {
            FnNode::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_polynomial(&self) -> Option<&Poly> {
        match &*self.node {
            FnNode::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_zero())
    }

    /// Syntactic identity: same node, or equal constants or polynomials.
    pub fn same_as(&self, other: &SAFunction) -> bool {
        if Arc::ptr_eq(&self.node, &other.node) {
            return true;
        }
        match (&*self.node, &*other.node) {
            (FnNode::Const(a), FnNode::Const(b)) => a == b,
            (FnNode::Poly(a), FnNode::Poly(b)) => a == b,
            _ => false,
        }
    }

    pub fn add(&self, other: &SAFunction) -> SAFunction {
        match (&*self.node, &*other.node) {
            (FnNode::Const(a), FnNode::Const(b)) => Self::constant(&self.domain, a + b),
            _ if self.is_zero() => other.on(&self.domain),
            _ if other.is_zero() => self.clone(),
            (FnNode::Poly(a), FnNode::Poly(b)) => Self::polynomial(&self.domain, a.add(b)),
            (FnNode::Poly(a), FnNode::Const(c)) | (FnNode::Const(c), FnNode::Poly(a)) => {
                Self::polynomial(&self.domain, a.add(&Poly::constant(a.nvars(), c.clone())))
            }
            _ => Self::from_node(&self.domain, FnNode::Sum(vec![self.clone(), other.clone()])),
        }
    }

    pub fn sub(&self, other: &SAFunction) -> SAFunction {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn mul(&self, other: &SAFunction) -> SAFunction {
        match (&*self.node, &*other.node) {
            (FnNode::Const(a), FnNode::Const(b)) => Self::constant(&self.domain, a * b),
            (FnNode::Const(c), _) => other.on(&self.domain).scale(c),
            (_, FnNode::Const(c)) => self.scale(c),
            (FnNode::Poly(a), FnNode::Poly(b)) => Self::polynomial(&self.domain, a.mul(b)),
            _ => Self::from_node(&self.domain, FnNode::Product(vec![self.clone(), other.clone()])),
        }
    }

    pub fn scale(&self, c: &Q) -> SAFunction {
        if c.is_zero() {
            return Self::constant(&self.domain, Q::zero());
        }
        if c.is_one() {
            return self.clone();
        }
        match &*self.node {
            FnNode::Const(a) => Self::constant(&self.domain, a * c),
            FnNode::Poly(p) => Self::polynomial(&self.domain, p.scale(c)),
            FnNode::Scale(a, g) => g.on(&self.domain).scale(&(a * c)),
            _ => Self::from_node(&self.domain, FnNode::Scale(c.clone(), self.clone())),
        }
    }

    /// `self ∘ map`, a function on the map's domain.
    pub fn compose(&self, map: &Arc<SAMap>) -> SAFunction {
        if map.target_dim() != self.domain.ambient_dim() {
            panic!(
                "composition target dimension {} does not match function ambient dimension {}",
                map.target_dim(),
                self.domain.ambient_dim()
            );
        }
        match &*self.node {
            FnNode::Const(c) => Self::constant(&map.domain, c.clone()),
            _ if map.identity && map.domain.id() == self.domain.id() => self.clone(),
            FnNode::Poly(p) if map.components.iter().all(|c| c.as_polynomial().is_some() || c.as_constant().is_some()) => {
                let n = map.domain.ambient_dim();
                let args: Vec<Poly> = map
                    .components
                    .iter()
                    .map(|c| match c.as_constant() {
                        Some(v) => Poly::constant(n, v.clone()),
                        None => c.as_polynomial().expect("checked").clone(),
                    })
                    .collect();
                Self::polynomial(&map.domain, p.compose(&args, n))
            }
            _ => Self::from_node(&map.domain, FnNode::Compose(self.clone(), map.clone())),
        }
    }

    /// Value at a point of the domain lying in the closed top simplex `s`.
    pub fn evaluate(&self, p: &[Q], s: &Simplex) -> Result<Q> {
        if !self.domain.contains(s) {
            return Err(Error::UnknownSimplex(s.to_vec()));
        }
        let frame = SimplexFrame::new(&self.domain.points(s)).ok_or(Error::PointOutsideSimplex)?;
        if !frame.contains(p) {
            return Err(Error::PointOutsideSimplex);
        }
        self.value_at(p)
    }

    /// Value at a point anywhere on the domain polyhedron.
    pub fn value_at(&self, p: &[Q]) -> Result<Q> {
        let chart = Chart::constant_point(p);
        let region = Region::reference(0);
        let mut r = Resolver::new(&region);
        match r.function(self, &chart)? {
            Step::Value(v) => v.eval(&[]).ok_or(Error::DenominatorVanishes(Vec::new())),
            Step::Split(_) => Err(Error::NoRefinement),
        }
    }

    /// The function restricted to a closed simplex of the domain, as a rational
    /// function of the simplex's affine parameters (vertex 0 at the origin,
    /// vertex `i` at `e_i`). Fails when the restriction is not a single piece.
    pub fn expand_on(&self, s: &Simplex) -> Result<RatFn> {
        let chart = Chart::simplex(&self.domain, s);
        let region = Region::reference(s.dim());
        let mut r = Resolver::new(&region);
        match r.function(self, &chart)? {
            Step::Value(v) => Ok(v),
            Step::Split(_) => Err(Error::NoRefinement),
        }
    }
}

fn make_piece(domain: &Arc<GeoComplex>, simplex: Simplex, value: RatFn) -> Piece {
    let frame = SimplexFrame::new(&domain.points(&simplex)).expect("validated complex");
    with_bbox(domain, Piece { simplex, value, frame, lo: Vec::new(), hi: Vec::new() })
}

fn with_bbox(domain: &GeoComplex, mut p: Piece) -> Piece {
    let n = domain.ambient_dim();
    p.lo = vec![f64::INFINITY; n];
    p.hi = vec![f64::NEG_INFINITY; n];
    for &v in p.simplex.iter() {
        for (k, c) in domain.vertex(v).iter().enumerate() {
            let x = to_f64(c);
            p.lo[k] = p.lo[k].min(x);
            p.hi[k] = p.hi[k].max(x);
        }
    }
    p
}

/// A tuple of functions on one domain, mapping into `ℝ^target_dim`.
pub struct SAMap {
    id: u64,
    domain: Arc<GeoComplex>,
    components: Vec<SAFunction>,
    identity: bool,
}

impl fmt::Debug for SAMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SAMap").field("id", &self.id).field("identity", &self.identity).field("components", &self.components).finish()
    }
}

type MapCache = Mutex<HashMap<(u8, u64, u64), Arc<SAMap>>>;

fn map_cache() -> &'static MapCache {
    static CACHE: OnceLock<MapCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached(key: (u8, u64, u64), build: impl FnOnce() -> SAMap) -> Arc<SAMap> {
    if let Some(m) = map_cache().lock().expect("map cache").get(&key) {
        return m.clone();
    }
    let m = Arc::new(build());
    map_cache().lock().expect("map cache").entry(key).or_insert(m).clone()
}

impl SAMap {
    pub fn new(domain: &Arc<GeoComplex>, components: Vec<SAFunction>) -> Arc<SAMap> {
        let components = components.into_iter().map(|c| c.on(domain)).collect();
        Arc::new(SAMap { id: fresh_id(), domain: domain.clone(), components, identity: false })
    }

    /// The identity of a complex, one shared instance per complex.
    pub fn identity(domain: &Arc<GeoComplex>) -> Arc<SAMap> {
        cached((0, domain.id(), 0), || SAMap {
            id: fresh_id(),
            domain: domain.clone(),
            components: (0..domain.ambient_dim()).map(|i| SAFunction::coordinate(domain, i)).collect(),
            identity: true,
        })
    }

    /// Piecewise-linear map given by vertex images.
    pub fn pl(domain: &Arc<GeoComplex>, images: &[Vec<Q>]) -> Arc<SAMap> {
        assert_eq!(images.len(), domain.num_vertices());
        let m = images.first().map_or(0, |p| p.len());
        let components = (0..m)
            .map(|k| {
                let vals: Vec<Q> = images.iter().map(|p| p[k].clone()).collect();
                SAFunction::pl(domain, &vals)
            })
            .collect();
        SAMap::new(domain, components)
    }

    /// Affine map `x ↦ offset + matrix · x` (matrix given row by row).
    pub fn affine(domain: &Arc<GeoComplex>, offset: &[Q], rows: &[Vec<Q>]) -> Arc<SAMap> {
        let components = offset
            .iter()
            .zip(rows)
            .map(|(c, row)| SAFunction::polynomial(domain, Poly::affine(c.clone(), row)))
            .collect();
        SAMap::new(domain, components)
    }

    /// Projections of a staircase product onto its factors.
    pub fn projections(prod: &ProductComplex) -> (Arc<SAMap>, Arc<SAMap>) {
        let p = &prod.complex;
        let nl = prod.left.ambient_dim();
        let nr = prod.right.ambient_dim();
        let left = cached((1, p.id(), 0), || SAMap {
            id: fresh_id(),
            domain: p.clone(),
            components: (0..nl).map(|i| SAFunction::coordinate(p, i)).collect(),
            identity: false,
        });
        let right = cached((2, p.id(), 0), || SAMap {
            id: fresh_id(),
            domain: p.clone(),
            components: (0..nr).map(|i| SAFunction::coordinate(p, nl + i)).collect(),
            identity: false,
        });
        (left, right)
    }

    /// `f × g` on the staircase product of the domains.
    pub fn cross(prod: &ProductComplex, f: &Arc<SAMap>, g: &Arc<SAMap>) -> Arc<SAMap> {
        let key = (3, prod.complex.id(), f.id ^ (g.id << 32) ^ (g.id >> 32));
        let build = || {
            let (p1, p2) = SAMap::projections(prod);
            let components = f
                .components
                .iter()
                .map(|c| c.compose(&p1))
                .chain(g.components.iter().map(|c| c.compose(&p2)))
                .collect();
            let identity = f.identity && g.identity;
            SAMap { id: fresh_id(), domain: prod.complex.clone(), components, identity }
        };
        let m = cached(key, build);
        debug_assert!(m.components.len() == f.target_dim() + g.target_dim());
        m
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn domain(&self) -> &Arc<GeoComplex> {
        &self.domain
    }

    pub fn components(&self) -> &[SAFunction] {
        &self.components
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `self ∘ inner`.
    pub fn after(self: &Arc<Self>, inner: &Arc<SAMap>) -> Arc<SAMap> {
        if inner.identity && inner.domain.id() == self.domain.id() {
            return self.clone();
        }
        if self.identity {
            return inner.clone();
        }
        SAMap::new(&inner.domain, self.components.iter().map(|c| c.compose(inner)).collect())
    }

    /// Image of a point.
    pub fn value_at(&self, p: &[Q]) -> Result<Vec<Q>> {
        self.components.iter().map(|c| c.value_at(p)).collect()
    }
}

/// Composition `f ∘ g` of a function with a map; the pullback of functions.
pub fn pullback_function(f: &SAFunction, g: &Arc<SAMap>) -> SAFunction {
    f.compose(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, standard_simplex, subdivided_interval};
    use crate::rational::{q, qr};

    #[test]
    fn constant_and_reciprocal_values() {
        let k = interval(q(1), q(2));
        let one = SAFunction::one(&k);
        assert_eq!(one.value_at(&[qr(3, 2)]).unwrap(), q(1));
        let inv = SAFunction::piecewise(&k, vec![(Simplex::new(vec![0, 1]), RatFn::new(Poly::one(1), Poly::var(1, 0)))])
            .unwrap();
        assert_eq!(inv.evaluate(&[q(2)], &Simplex::new(vec![0, 1])).unwrap(), qr(1, 2));
        assert_eq!(inv.evaluate(&[q(3)], &Simplex::new(vec![0, 1])), Err(Error::PointOutsideSimplex));
    }

    #[test]
    fn hat_function_peaks_at_its_vertex() {
        let k = subdivided_interval(q(0), q(2), 2);
        let hat = SAFunction::pl(&k, &[q(0), q(1), q(0)]);
        assert_eq!(hat.value_at(&[q(1)]).unwrap(), q(1));
        assert_eq!(hat.value_at(&[qr(1, 2)]).unwrap(), qr(1, 2));
        assert_eq!(hat.value_at(&[qr(3, 2)]).unwrap(), qr(1, 2));
    }

    #[test]
    fn pullback_of_square_along_reflection() {
        let k = standard_simplex(1);
        let square = SAFunction::piecewise(&k, vec![(Simplex::new(vec![0, 1]), RatFn::poly(Poly::var(1, 0).pow(2)))]).unwrap();
        let g = SAMap::pl(&k, &[vec![q(1)], vec![q(0)]]);
        let f = pullback_function(&square, &g);
        let got = f.expand_on(&Simplex::new(vec![0, 1])).unwrap();
        let want = RatFn::poly(Poly::affine(q(1), &[q(-1)]).pow(2));
        assert!(got.same_as(&want), "{got:?}");
    }

    #[test]
    fn coordinate_after_affine_map() {
        let k = standard_simplex(2);
        let g = SAMap::affine(&k, &[q(1), q(0)], &[vec![q(2), q(1)], vec![q(0), q(-1)]]);
        let x0 = SAFunction::coordinate(&k, 0);
        let f = x0.compose(&g);
        assert_eq!(f.as_polynomial().unwrap(), &Poly::affine(q(1), &[q(2), q(1)]));
    }

    #[test]
    fn composite_through_a_split_is_reported_by_expand() {
        // x ↦ 2x sends [0,1] across both edges of a subdivided [0,2].
        let dom = standard_simplex(1);
        let target = subdivided_interval(q(0), q(2), 2);
        let hat = SAFunction::pl(&target, &[q(0), q(1), q(0)]);
        let g = SAMap::affine(&dom, &[q(0)], &[vec![q(2)]]);
        let f = hat.compose(&g);
        assert_eq!(f.expand_on(&Simplex::new(vec![0, 1])), Err(Error::NoRefinement));
        assert_eq!(f.value_at(&[qr(3, 4)]).unwrap(), qr(1, 2));
    }
}
