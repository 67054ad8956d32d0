//! Resolution of lazy functions to single rational expressions on regions of a
//! parameter simplex.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{FnNode, Piece, SAFunction, SAMap};
use crate::complex::{GeoComplex, Simplex};
use crate::error::{Error, Result};
use crate::geometry::{clip_all, signed_volume, Affine, Point};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::rational::{to_f64, Q};

/// Bisection depth before a nonlinear chart is declared unresolvable.
pub const DEFAULT_DEPTH_LIMIT: u32 = 12;
const CLIP_DEPTH_LIMIT: u32 = 64;

/// Ambient coordinates expressed as rational functions of parameters `s ∈ ℝ^nvars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    nvars: usize,
    coords: Vec<RatFn>,
}

impl Chart {
    pub fn new(nvars: usize, coords: Vec<RatFn>) -> Self {
        assert!(coords.iter().all(|c| c.nvars() == nvars));
        Chart { nvars, coords }
    }

    /// Zero-parameter chart at a point.
    pub fn constant_point(p: &[Q]) -> Self {
        Chart { nvars: 0, coords: p.iter().map(|c| RatFn::constant(0, c.clone())).collect() }
    }

    /// Affine parametrization of a simplex: vertex 0 at the origin, vertex `i` at `e_i`.
    pub fn simplex(complex: &GeoComplex, s: &Simplex) -> Self {
        let pts = complex.points(s);
        let k = s.dim();
        let coords = (0..complex.ambient_dim())
            .map(|j| {
                let lin: Vec<Q> = (1..=k).map(|i| &pts[i][j] - &pts[0][j]).collect();
                RatFn::poly(Poly::affine(pts[0][j].clone(), &lin))
            })
            .collect();
        Chart { nvars: k, coords }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coords(&self) -> &[RatFn] {
        &self.coords
    }

    pub fn is_affine(&self) -> bool {
        self.coords.iter().all(|c| c.is_affine())
    }

    pub fn is_poly(&self) -> bool {
        self.coords.iter().all(|c| c.is_poly())
    }

    fn eval(&self, s: &[Q]) -> Result<Point> {
        self.coords.iter().map(|c| c.eval(s).ok_or(Error::DenominatorVanishes(Vec::new()))).collect()
    }
}

/// Full-dimensional simplex in parameter space, with its refinement depth.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub vertices: Vec<Point>,
    pub depth: u32,
}

impl Region {
    /// The standard simplex `{s ≥ 0, Σ s ≤ 1}` in `ℝ^k`.
    pub fn reference(k: usize) -> Self {
        let mut vertices = vec![vec![Q::zero(); k]];
        for i in 0..k {
            let mut e = vec![Q::zero(); k];
            e[i] = Q::one();
            vertices.push(e);
        }
        Region { vertices, depth: 0 }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn volume(&self) -> Q {
        signed_volume(&self.vertices).abs()
    }

    fn centroid(&self) -> Point {
        let n = Q::from_integer((self.vertices.len() as i64).into());
        (0..self.dim()).map(|j| self.vertices.iter().map(|v| v[j].clone()).sum::<Q>() / &n).collect()
    }

    /// Halves the region across the midpoint of its longest edge.
    pub fn bisect(&self) -> [Region; 2] {
        let mut best = (Q::zero(), 0, 1);
        for a in 0..self.vertices.len() {
            for b in a + 1..self.vertices.len() {
                let d: Q = self.vertices[a].iter().zip(&self.vertices[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                if d > best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (_, a, b) = best;
        let two = Q::from_integer(2.into());
        let mid: Point = self.vertices[a].iter().zip(&self.vertices[b]).map(|(x, y)| (x + y) / &two).collect();
        let mut left = self.vertices.clone();
        left[a] = mid.clone();
        let mut right = self.vertices.clone();
        right[b] = mid;
        [Region { vertices: left, depth: self.depth + 1 }, Region { vertices: right, depth: self.depth + 1 }]
    }

    /// Affine parametrization `u ↦ r₀ + Σ uᵢ (rᵢ − r₀)` as polynomials in `u`.
    fn parametrization(&self) -> Vec<Poly> {
        let k = self.dim();
        (0..k)
            .map(|j| {
                let lin: Vec<Q> = (1..=k).map(|i| &self.vertices[i][j] - &self.vertices[0][j]).collect();
                Poly::affine(self.vertices[0][j].clone(), &lin)
            })
            .collect()
    }
}

/// Either a resolved value or a request to restart on smaller regions.
#[derive(Clone, Debug)]
pub enum Step<T> {
    Value(T),
    Split(Vec<Region>),
}

macro_rules! value {
    ($e:expr) => {
        match $e? {
            Step::Value(v) => v,
            Step::Split(r) => return Ok(Step::Split(r)),
        }
    };
}

/// Resolves functions on one region, memoizing map resolutions.
/// Resolved map charts; entries stay valid on every subregion.
pub type MapMemo = HashMap<(u64, Chart), Chart>;

pub struct Resolver<'a> {
    region: &'a Region,
    depth_limit: u32,
    memo: MapMemo,
}

impl<'a> Resolver<'a> {
    pub fn new(region: &'a Region) -> Self {
        Self::with_memo(region, MapMemo::new())
    }

    /// Starts from map resolutions made on a region containing this one.
    pub fn with_memo(region: &'a Region, memo: MapMemo) -> Self {
        Resolver { region, depth_limit: DEFAULT_DEPTH_LIMIT, memo }
    }

    pub fn into_memo(self) -> MapMemo {
        self.memo
    }

    pub fn region(&self) -> &Region {
        self.region
    }

    pub fn map(&mut self, m: &Arc<SAMap>, chart: &Chart) -> Result<Step<Chart>> {
        if m.identity {
            return Ok(Step::Value(chart.clone()));
        }
        let key = (m.id, chart.clone());
        if let Some(c) = self.memo.get(&key) {
            return Ok(Step::Value(c.clone()));
        }
        let mut coords = Vec::with_capacity(m.components.len());
        for c in &m.components {
            coords.push(value!(self.function(c, chart)));
        }
        let out = Chart { nvars: chart.nvars, coords };
        self.memo.insert(key, out.clone());
        Ok(Step::Value(out))
    }

    pub fn function(&mut self, f: &SAFunction, chart: &Chart) -> Result<Step<RatFn>> {
        let k = chart.nvars;
        Ok(Step::Value(match f.node() {
            FnNode::Const(c) => RatFn::constant(k, c.clone()),
            FnNode::Poly(p) => compose_poly(p, chart),
            FnNode::Piecewise(pieces) => value!(self.piecewise(pieces, chart)),
            FnNode::Compose(g, m) => {
                let inner = value!(self.map(m, chart));
                value!(self.function(g, &inner))
            }
            FnNode::Sum(parts) => {
                let mut acc = RatFn::constant(k, Q::zero());
                for p in parts {
                    acc = acc.add(&value!(self.function(p, chart)));
                }
                acc
            }
            FnNode::Product(parts) => {
                let mut acc = RatFn::constant(k, Q::one());
                for p in parts {
                    acc = acc.mul(&value!(self.function(p, chart)));
                }
                acc
            }
            FnNode::Scale(c, g) => value!(self.function(g, chart)).scale(c),
        }))
    }

    fn piecewise(&mut self, pieces: &[Piece], chart: &Chart) -> Result<Step<RatFn>> {
        if chart.is_affine() {
            self.piecewise_affine(pieces, chart)
        } else {
            self.piecewise_nonlinear(pieces, chart)
        }
    }

    fn piecewise_affine(&mut self, pieces: &[Piece], chart: &Chart) -> Result<Step<RatFn>> {
        let images: Vec<Point> = self.region.vertices.iter().map(|v| chart.eval(v)).collect::<Result<_>>()?;
        let n = images[0].len();
        let approx: Vec<Vec<f64>> = images.iter().map(|p| p.iter().map(to_f64).collect()).collect();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in &approx {
            for (k, &x) in p.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let candidates: Vec<&Piece> = pieces
            .iter()
            .filter(|p| (0..n).all(|k| p.lo[k] <= hi[k] + 1e-9 && lo[k] <= p.hi[k] + 1e-9))
            .collect();
        for p in &candidates {
            if approx.iter().all(|x| p.frame.may_contain(x)) && images.iter().all(|x| p.frame.contains(x)) {
                return apply(p, chart).map(Step::Value);
            }
        }
        if self.region.dim() == 0 {
            return Err(Error::PointOutsideDomain);
        }
        if self.region.depth >= CLIP_DEPTH_LIMIT {
            return Err(Error::NoRefinement);
        }
        // Cut the region along the pulled-back facets of every simplex whose
        // affine hull contains the image, keeping the parts already assigned
        // disjoint from the rest.
        let (offset, columns) = affine_parts(chart);
        let mut remaining = vec![self.region.vertices.clone()];
        let mut assigned = Vec::new();
        for p in candidates {
            if !(approx.iter().all(|x| p.frame.may_be_in_hull(x)) && images.iter().all(|x| p.frame.in_hull(x))) {
                continue;
            }
            let bary: Vec<Affine> = p.frame.barycentric_functionals().iter().map(|b| pull(b, &offset, &columns)).collect();
            let mut next = Vec::new();
            for piece in &remaining {
                assigned.extend(clip_all(piece, &bary));
                // A functional vanishing on the whole region leaves nothing on its negative side.
                for i in (0..bary.len()).filter(|&i| !is_zero_affine(&bary[i])) {
                    let mut fs: Vec<Affine> = bary[..i].to_vec();
                    fs.push(negate(&bary[i]));
                    next.extend(clip_all(piece, &fs));
                }
            }
            remaining = next;
            if remaining.is_empty() {
                break;
            }
        }
        if !remaining.is_empty() {
            return Err(Error::PointOutsideDomain);
        }
        let depth = self.region.depth + 1;
        Ok(Step::Split(assigned.into_iter().map(|vertices| Region { vertices, depth }).collect()))
    }

    fn piecewise_nonlinear(&mut self, pieces: &[Piece], chart: &Chart) -> Result<Step<RatFn>> {
        let centre = chart.eval(&self.region.centroid())?;
        let param = self.region.parametrization();
        let local: Vec<RatFn> = chart
            .coords
            .iter()
            .map(|c| c.compose(&param.iter().cloned().map(RatFn::poly).collect::<Vec<_>>(), self.region.dim()))
            .collect();
        let mut found = false;
        for p in pieces.iter().filter(|p| p.frame.contains(&centre)) {
            found = true;
            let inside = p.frame.barycentric_functionals().iter().all(|b| certify_nonnegative(&affine_of(b, &local)));
            let on_hull = p.frame.hull_equations().iter().all(|h| affine_of(h, &local).num().is_zero());
            if inside && on_hull {
                return apply(p, chart).map(Step::Value);
            }
        }
        if !found {
            return Err(Error::PointOutsideDomain);
        }
        if self.region.depth >= self.depth_limit {
            return Err(Error::NoRefinement);
        }
        Ok(Step::Split(self.region.bisect().to_vec()))
    }
}

fn compose_poly(p: &Poly, chart: &Chart) -> RatFn {
    if chart.is_poly() {
        let args: Vec<Poly> = chart.coords.iter().map(|c| c.num().clone()).collect();
        RatFn::poly(p.compose(&args, chart.nvars))
    } else {
        RatFn::poly(p.clone()).compose(&chart.coords, chart.nvars)
    }
}

fn apply(p: &Piece, chart: &Chart) -> Result<RatFn> {
    match p.value.as_poly() {
        Some(poly) => Ok(compose_poly(poly, chart)),
        None if chart.is_poly() => Ok(p.value.compose(&chart.coords, chart.nvars)),
        None => Err(Error::CompositionDegreeOverflow),
    }
}

fn affine_parts(chart: &Chart) -> (Vec<Q>, Vec<Vec<Q>>) {
    let k = chart.nvars;
    let n = chart.coords.len();
    let mut offset = Vec::with_capacity(n);
    let mut columns = vec![Vec::with_capacity(n); k];
    for c in &chart.coords {
        let (c0, lin) = c.num().affine_parts();
        offset.push(c0);
        for (col, v) in columns.iter_mut().zip(lin) {
            col.push(v);
        }
    }
    (offset, columns)
}

fn pull(a: &Affine, offset: &[Q], columns: &[Vec<Q>]) -> Affine {
    a.pullback(offset, columns)
}

fn is_zero_affine(a: &Affine) -> bool {
    a.c.is_zero() && a.lin.iter().all(Q::is_zero)
}

fn negate(a: &Affine) -> Affine {
    Affine { c: -a.c.clone(), lin: a.lin.iter().map(|v| -v.clone()).collect() }
}

fn affine_of(a: &Affine, coords: &[RatFn]) -> RatFn {
    let m = coords.first().map_or(0, |c| c.nvars());
    let mut acc = RatFn::constant(m, a.c.clone());
    for (l, c) in a.lin.iter().zip(coords) {
        if !l.is_zero() {
            acc = acc.add(&c.scale(l));
        }
    }
    acc
}

/// Nonnegativity on the standard simplex certified by Bernstein coefficients.
fn certify_nonnegative(f: &RatFn) -> bool {
    if f.is_poly() {
        return f.num().certified_nonnegative();
    }
    match f.den().bernstein_sign() {
        Some(1) => f.num().certified_nonnegative(),
        Some(-1) => f.num().neg().certified_nonnegative(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{standard_simplex, subdivided_interval};
    use crate::rational::{q, qr};

    #[test]
    fn affine_chart_splits_exactly_at_breakpoints() {
        let target = subdivided_interval(q(0), q(2), 2);
        let hat = SAFunction::pl(&target, &[q(0), q(1), q(0)]);
        // s ↦ 2s on [0,1] crosses the breakpoint at s = 1/2.
        let chart = Chart::new(1, vec![RatFn::poly(Poly::affine(q(0), &[q(2)]))]);
        let region = Region::reference(1);
        let mut r = Resolver::new(&region);
        let Step::Split(parts) = r.function(&hat, &chart).unwrap() else { panic!("expected split") };
        assert_eq!(parts.len(), 2);
        let total: Q = parts.iter().map(|p| p.volume()).sum();
        assert_eq!(total, q(1));
        assert!(parts.iter().any(|p| p.vertices.contains(&vec![qr(1, 2)])));
    }

    #[test]
    fn degenerate_image_inside_one_simplex_resolves() {
        let k = standard_simplex(2);
        let f = SAFunction::pl(&k, &[q(0), q(1), q(2)]);
        // A constant chart into the interior.
        let chart = Chart::new(1, vec![RatFn::constant(1, qr(1, 4)), RatFn::constant(1, qr(1, 4))]);
        let region = Region::reference(1);
        let mut r = Resolver::new(&region);
        let Step::Value(v) = r.function(&f, &chart).unwrap() else { panic!() };
        assert_eq!(v.as_constant(), Some(qr(3, 4)));
    }

    #[test]
    fn image_on_a_shared_face_is_assigned_once() {
        // Two triangles meeting along the diagonal x = y; the chart runs along it.
        let k = GeoComplex::new(2, vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(1), q(1)], vec![q(0), q(1)]], vec![vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        let f = SAFunction::pl(&k, &[q(0), q(1), q(2), q(3)]);
        let s = RatFn::poly(crate::poly::Poly::var(1, 0));
        let chart = Chart::new(1, vec![s.clone(), s]);
        let region = Region::reference(1);
        let mut r = Resolver::new(&region);
        let Step::Value(v) = r.function(&f, &chart).unwrap() else { panic!("a diagonal lies in one closed piece") };
        assert_eq!(v.eval(&[qr(1, 2)]), Some(q(1)));
        // Along the bottom edge split by a vertex at its midpoint.
        let k = GeoComplex::new(2, vec![vec![q(0), q(0)], vec![q(2), q(0)], vec![q(1), q(0)], vec![q(1), q(1)]], vec![vec![0, 2, 3], vec![1, 2, 3]]).unwrap();
        let f = SAFunction::pl(&k, &[q(0), q(0), q(1), q(0)]);
        let chart = Chart::new(1, vec![RatFn::poly(crate::poly::Poly::var(1, 0).scale(&q(2))), RatFn::constant(1, q(0))]);
        let mut r = Resolver::new(&region);
        let Step::Split(parts) = r.function(&f, &chart).unwrap() else { panic!("the edge crosses two pieces") };
        let total: Q = parts.iter().map(Region::volume).sum();
        assert_eq!((parts.len(), total), (2, q(1)));
    }

    #[test]
    fn nonlinear_chart_is_certified_or_bisected() {
        let target = subdivided_interval(q(0), q(1), 2);
        let hat = SAFunction::pl(&target, &[q(0), q(1), q(0)]);
        // s ↦ s²/2 stays in [0, 1/2]: certified in one piece.
        let inside = Chart::new(1, vec![RatFn::poly(Poly::var(1, 0).pow(2).scale(&qr(1, 2)))]);
        let region = Region::reference(1);
        let mut r = Resolver::new(&region);
        assert!(matches!(r.function(&hat, &inside).unwrap(), Step::Value(_)));
        // s ↦ s² crosses 1/2 at an irrational parameter: bisection until the limit.
        let across = Chart::new(1, vec![RatFn::poly(Poly::var(1, 0).pow(2))]);
        let mut r = Resolver::new(&region);
        assert!(matches!(r.function(&hat, &across).unwrap(), Step::Split(_)));
    }

    #[test]
    fn image_leaving_the_domain_is_an_error() {
        let target = standard_simplex(1);
        let f = SAFunction::pl(&target, &[q(0), q(1)]);
        let chart = Chart::new(1, vec![RatFn::poly(Poly::affine(q(0), &[q(3)]))]);
        let region = Region::reference(1);
        let mut r = Resolver::new(&region);
        assert_eq!(r.function(&f, &chart).unwrap_err(), Error::PointOutsideDomain);
    }
}
