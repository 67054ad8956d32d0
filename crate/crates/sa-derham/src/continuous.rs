//! Strongly continuous families of chains over a complex.
//!
//! A family is either constant, `x ↦ ⟦{x} × F⟧`, or given by a stratum per top
//! simplex `σ` of the base: a fiber chain on a complex `F_σ` and a map
//! `g_σ` on the staircase product `cl σ × F_σ`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::chain::{Chain, ChainTerm};
use crate::complex::{point, staircase_product, GeoComplex, ProductComplex, Simplex};
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::geometry::{Point, SimplexFrame};
use crate::minimal::MinimalForm;
use crate::poly::Poly;
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct Stratum {
    pub simplex: Simplex,
    pub fiber: Chain,
    pub product: Arc<ProductComplex>,
    pub map: Arc<SAMap>,
}

impl Stratum {
    fn fiber_complex(&self) -> &Arc<GeoComplex> {
        &self.product.right
    }
}

#[derive(Clone, Debug)]
enum Family {
    Constant { fiber_complex: Arc<GeoComplex>, fiber: Chain },
    Stratified(Vec<Stratum>),
}

#[derive(Clone, Debug)]
pub struct ContinuousChain {
    base: Arc<GeoComplex>,
    fiber_degree: usize,
    ambient_dim: usize,
    family: Family,
}

/// Domain of a stratum map: `cl σ × F` as a staircase product.
pub fn stratum_domain(base: &GeoComplex, simplex: &Simplex, fiber: &Arc<GeoComplex>) -> Arc<ProductComplex> {
    staircase_product(&base.closure(simplex), fiber)
}

fn check_fiber_chain(fiber_complex: &Arc<GeoComplex>, fiber: &Chain) -> Result<()> {
    for t in fiber.terms() {
        if t.source.id() != fiber_complex.id() || !t.map.is_identity() {
            return Err(Error::InvalidComplex("fiber chain must consist of identity simplices of the fiber complex".into()));
        }
    }
    Ok(())
}

impl ContinuousChain {
    /// `⟨⟨F⟩⟩`: the chain `fiber` on `fiber_complex` placed over every point.
    pub fn constant(base: &Arc<GeoComplex>, fiber_complex: &Arc<GeoComplex>, fiber: Chain) -> Result<Self> {
        check_fiber_chain(fiber_complex, &fiber)?;
        Ok(ContinuousChain {
            base: base.clone(),
            fiber_degree: fiber.degree(),
            ambient_dim: base.ambient_dim() + fiber_complex.ambient_dim(),
            family: Family::Constant { fiber_complex: fiber_complex.clone(), fiber },
        })
    }

    /// `⟨⟨F⟩⟩` with `F` the fundamental chain of a complex.
    pub fn constant_fundamental(base: &Arc<GeoComplex>, fiber_complex: &Arc<GeoComplex>) -> Result<Self> {
        Self::constant(base, fiber_complex, Chain::fundamental(fiber_complex)?)
    }

    /// `⟨⟨∗⟩⟩`, the point fiber; joining with it is the identity.
    pub fn point(base: &Arc<GeoComplex>) -> Self {
        let pt = point(Vec::new());
        let fiber = Chain::fundamental(&pt).expect("a point is oriented");
        Self::constant(base, &pt, fiber).expect("identity fiber")
    }

    pub fn zero(base: &Arc<GeoComplex>, fiber_degree: usize, ambient_dim: usize) -> Self {
        ContinuousChain { base: base.clone(), fiber_degree, ambient_dim, family: Family::Stratified(Vec::new()) }
    }

    /// Family from strata covering every top simplex of the base. Each map must
    /// be defined on [`stratum_domain`] of its stratum.
    pub fn stratified(base: &Arc<GeoComplex>, fiber_degree: usize, ambient_dim: usize, strata: Vec<Stratum>) -> Result<Self> {
        for s in &strata {
            if !base.contains(&s.simplex) {
                return Err(Error::UnknownSimplex(s.simplex.to_vec()));
            }
            let expected = stratum_domain(base, &s.simplex, s.fiber_complex());
            if s.product.complex.id() != expected.complex.id() || s.map.domain().id() != expected.complex.id() {
                return Err(Error::InvalidComplex("stratum map is not defined on cl σ × F".into()));
            }
            if s.map.target_dim() != ambient_dim || (!s.fiber.is_zero() && s.fiber.degree() != fiber_degree) {
                return Err(Error::DimensionMismatch("stratum fiber degree or target dimension".into()));
            }
            check_fiber_chain(s.fiber_complex(), &s.fiber)?;
        }
        let covered = |t: &Simplex| strata.iter().any(|s| t.is_face_of(&s.simplex));
        if !strata.is_empty() && !base.top_simplices().iter().all(covered) {
            return Err(Error::NotAdapted("strata do not cover the base".into()));
        }
        Ok(ContinuousChain { base: base.clone(), fiber_degree, ambient_dim, family: Family::Stratified(strata) })
    }

    /// Convenience constructor for one stratum: `map_fn` receives `cl σ × F`.
    pub fn stratum(
        base: &GeoComplex,
        simplex: Simplex,
        fiber_complex: &Arc<GeoComplex>,
        fiber: Chain,
        map_fn: impl FnOnce(&Arc<ProductComplex>) -> Arc<SAMap>,
    ) -> Stratum {
        let product = stratum_domain(base, &simplex, fiber_complex);
        let map = map_fn(&product);
        Stratum { simplex, fiber, product, map }
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.base
    }

    pub fn fiber_degree(&self) -> usize {
        self.fiber_degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.family, Family::Constant { .. })
    }

    pub fn is_zero(&self) -> bool {
        match &self.family {
            Family::Constant { fiber, .. } => fiber.is_zero(),
            Family::Stratified(s) => s.iter().all(|s| s.fiber.is_zero()),
        }
    }

    /// Strata, with constant families expanded over the top simplices.
    pub fn strata(&self) -> Vec<Stratum> {
        match &self.family {
            Family::Stratified(s) => s.clone(),
            Family::Constant { fiber_complex, fiber } => self
                .base
                .top_simplices()
                .iter()
                .map(|t| {
                    Self::stratum(&self.base, t.clone(), fiber_complex, fiber.clone(), |p| SAMap::identity(&p.complex))
                })
                .collect(),
        }
    }

    /// A stratum whose closed simplex contains the base simplex `s`.
    pub fn stratum_for(&self, s: &Simplex) -> Option<Stratum> {
        match &self.family {
            Family::Stratified(strata) => strata.iter().find(|st| s.is_face_of(&st.simplex)).cloned(),
            Family::Constant { fiber_complex, fiber } => {
                let top = self.base.top_simplices().iter().find(|t| s.is_face_of(t))?.clone();
                Some(Self::stratum(&self.base, top, fiber_complex, fiber.clone(), |p| SAMap::identity(&p.complex)))
            }
        }
    }

    /// `Φ(x) = g_σ(x, ·)_*⟦F_σ⟧`.
    pub fn evaluate_at(&self, x: &[Q]) -> Result<Chain> {
        let carrier = self.base.carrier(x).ok_or(Error::PointOutsideDomain)?;
        match self.stratum_for(&carrier) {
            Some(st) => Ok(Self::evaluate_on(&st, x, self.ambient_dim)),
            None => Ok(Chain::zero(self.fiber_degree, self.ambient_dim)),
        }
    }

    fn evaluate_on(st: &Stratum, x: &[Q], ambient_dim: usize) -> Chain {
        let fc = st.fiber_complex();
        let (n, m) = (x.len(), fc.ambient_dim());
        let mut offset: Vec<Q> = x.to_vec();
        offset.extend(std::iter::repeat_n(Q::zero(), m));
        let rows: Vec<Vec<Q>> = (0..n + m)
            .map(|r| (0..m).map(|c| if r >= n && r - n == c { Q::from_integer(1.into()) } else { Q::zero() }).collect())
            .collect();
        let slice = SAMap::affine(fc, &offset, &rows);
        let map = st.map.after(&slice);
        let terms = st.fiber.terms().iter().map(|t| ChainTerm { map: map.clone(), ..t.clone() }).collect();
        Chain::from_terms(st.fiber.degree(), ambient_dim, terms)
    }

    /// `∂Φ`: fibers replaced by their boundaries.
    pub fn boundary(&self) -> ContinuousChain {
        let degree = self.fiber_degree.saturating_sub(1);
        if self.fiber_degree == 0 {
            return Self::zero(&self.base, 0, self.ambient_dim);
        }
        let family = match &self.family {
            Family::Constant { fiber_complex, fiber } => {
                Family::Constant { fiber_complex: fiber_complex.clone(), fiber: fiber.boundary() }
            }
            Family::Stratified(strata) => {
                Family::Stratified(strata.iter().map(|s| Stratum { fiber: s.fiber.boundary(), ..s.clone() }).collect())
            }
        };
        ContinuousChain { family, fiber_degree: degree, ..self.clone() }
    }

    pub fn scale(&self, c: i64) -> ContinuousChain {
        let family = match &self.family {
            Family::Constant { fiber_complex, fiber } => {
                Family::Constant { fiber_complex: fiber_complex.clone(), fiber: fiber.scale(c) }
            }
            Family::Stratified(strata) => {
                Family::Stratified(strata.iter().map(|s| Stratum { fiber: s.fiber.scale(c), ..s.clone() }).collect())
            }
        };
        ContinuousChain { family, ..self.clone() }
    }

    /// `γ ⋉ Φ = Σ n_σ g_σ*(⟦cl σ × F_σ⟧)`.
    pub fn join(&self, gamma: &Chain) -> Result<Chain> {
        let degree = gamma.degree() + self.fiber_degree;
        if gamma.ambient_dim() != self.base.ambient_dim() {
            return Err(Error::DimensionMismatch("chain and family live over different spaces".into()));
        }
        if let Family::Constant { fiber_complex, fiber } = &self.family {
            if fiber_complex.ambient_dim() == 0 && fiber.degree() == 0 {
                let c: i64 = fiber.terms().iter().map(|t| t.coeff).sum();
                return Ok(gamma.scale(c));
            }
            return Ok(gamma.cross(fiber));
        }
        let mut terms = Vec::new();
        let mut generic: HashMap<(u64, Simplex), (Arc<ProductComplex>, Arc<SAMap>)> = HashMap::new();
        for t in gamma.terms() {
            if !t.map.is_identity() {
                return Err(Error::NotAdapted("chain term carries a non-identity map".into()));
            }
            if t.source.id() == self.base.id() {
                let st = self
                    .stratum_for(&t.simplex)
                    .ok_or_else(|| Error::NotAdapted(format!("no stratum contains {:?}", t.simplex)))?;
                let local = Simplex::new(
                    t.simplex.iter().map(|v| st.simplex.iter().position(|w| w == v).expect("face")).collect(),
                );
                push_cells(&mut terms, t.coeff, &st.product, &local, &st.fiber, &st.map);
                continue;
            }
            // A simplex of another complex lying inside a closed stratum.
            let pts = t.source.points(&t.simplex);
            let st = self
                .strata()
                .into_iter()
                .find(|st| {
                    SimplexFrame::new(&self.base.points(&st.simplex))
                        .is_some_and(|fr| pts.iter().all(|p| fr.contains(p)))
                })
                .ok_or_else(|| Error::NotAdapted(format!("simplex {:?} lies in no closed stratum", t.simplex)))?;
            let cell = t.source.closure(&t.simplex);
            let (prod, map) = generic
                .entry((cell.id(), st.simplex.clone()))
                .or_insert_with(|| {
                    let prod = staircase_product(&cell, st.fiber_complex());
                    let n = prod.complex.ambient_dim();
                    let inclusion = SAMap::new(&prod.complex, (0..n).map(|i| SAFunction::coordinate(&prod.complex, i)).collect());
                    let map = st.map.after(&inclusion);
                    (prod, map)
                })
                .clone();
            let whole = Simplex::new((0..=t.simplex.dim()).collect());
            push_cells(&mut terms, t.coeff, &prod, &whole, &st.fiber, &map);
        }
        Ok(Chain::from_terms(degree, self.ambient_dim, terms))
    }

    /// The same constant family over another complex in the same ambient
    /// space; `None` for stratified families.
    pub fn rebase(&self, base: &Arc<GeoComplex>) -> Option<ContinuousChain> {
        match &self.family {
            Family::Constant { .. } if base.ambient_dim() == self.base.ambient_dim() => {
                Some(ContinuousChain { base: base.clone(), ..self.clone() })
            }
            _ => None,
        }
    }

    /// Fiber complex and chain of a constant family.
    pub fn constant_fiber(&self) -> Option<(&Arc<GeoComplex>, &Chain)> {
        match &self.family {
            Family::Constant { fiber_complex, fiber } => Some((fiber_complex, fiber)),
            Family::Stratified(_) => None,
        }
    }

    /// `h*Φ` along a map `h: X' → |X|` sending each closed top simplex of `X'`
    /// into a closed stratum.
    pub fn pullback(&self, h: &Arc<SAMap>) -> Result<ContinuousChain> {
        let new_base = h.domain().clone();
        if h.target_dim() != self.base.ambient_dim() {
            return Err(Error::DimensionMismatch("pullback map lands outside the base".into()));
        }
        if let Family::Constant { fiber_complex, fiber } = &self.family {
            if h.is_identity() && new_base.id() == self.base.id() {
                return Ok(self.clone());
            }
            // Fibers stay put; only the base coordinates are transported.
            let strata = new_base
                .top_simplices()
                .iter()
                .map(|top| {
                    Self::stratum(&new_base, top.clone(), fiber_complex, fiber.clone(), |prod| {
                        let (pr1, _) = SAMap::projections(prod);
                        let n1 = new_base.ambient_dim();
                        let mut comps: Vec<SAFunction> = h.components().iter().map(|c| c.compose(&pr1)).collect();
                        comps.extend((0..fiber_complex.ambient_dim()).map(|j| SAFunction::coordinate(&prod.complex, n1 + j)));
                        SAMap::new(&prod.complex, comps)
                    })
                })
                .collect();
            return Self::stratified(&new_base, self.fiber_degree, self.ambient_dim, strata);
        }
        let strata = self.strata();
        let mut out = Vec::new();
        for top in new_base.top_simplices() {
            let st = strata
                .iter()
                .find(|st| maps_into(h, top, &self.base, &st.simplex))
                .ok_or(Error::NoRefinement)?;
            let fc = st.fiber_complex().clone();
            out.push(Self::stratum(&new_base, top.clone(), &fc, st.fiber.clone(), |prod| {
                let (pr1, _) = SAMap::projections(prod);
                let n1 = new_base.ambient_dim();
                let mut comps: Vec<SAFunction> = h.components().iter().map(|c| c.compose(&pr1)).collect();
                comps.extend((0..fc.ambient_dim()).map(|j| SAFunction::coordinate(&prod.complex, n1 + j)));
                st.map.after(&SAMap::new(&prod.complex, comps))
            }));
        }
        Self::stratified(&new_base, self.fiber_degree, self.ambient_dim, out)
    }

    /// `(Φ₁ × Φ₂)(x₁, x₂) = Φ₁(x₁) × Φ₂(x₂)` over the staircase product of the bases.
    pub fn cross(&self, other: &ContinuousChain) -> Result<ContinuousChain> {
        let prod = staircase_product(&self.base, &other.base);
        let base = prod.complex.clone();
        let degree = self.fiber_degree + other.fiber_degree;
        let ambient = self.ambient_dim + other.ambient_dim;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&base, degree, ambient));
        }
        let (n1, n2) = (self.base.ambient_dim(), other.base.ambient_dim());
        let mut strata = Vec::new();
        for cell in base.top_simplices() {
            let (s1, s2) = prod.factors(cell);
            let a = self.stratum_for(&s1).ok_or_else(|| Error::NotAdapted("missing stratum".into()))?;
            let b = other.stratum_for(&s2).ok_or_else(|| Error::NotAdapted("missing stratum".into()))?;
            let fiber_prod = staircase_product(a.fiber_complex(), b.fiber_complex());
            let fiber = a.fiber.cross(&b.fiber);
            let (m1, m2) = (a.fiber_complex().ambient_dim(), b.fiber_complex().ambient_dim());
            strata.push(Self::stratum(&base, cell.clone(), &fiber_prod.complex, fiber, |dom| {
                let c = &dom.complex;
                let coord = |i: usize| SAFunction::coordinate(c, i);
                // Domain coordinates: (x₁, x₂, y₁, y₂).
                let left = SAMap::new(c, (0..n1).map(coord).chain((0..m1).map(|j| coord(n1 + n2 + j))).collect());
                let right = SAMap::new(c, (n1..n1 + n2).map(coord).chain((0..m2).map(|j| coord(n1 + n2 + m1 + j))).collect());
                let g1 = a.map.after(&left);
                let g2 = b.map.after(&right);
                SAMap::new(c, g1.components().iter().chain(g2.components()).cloned().collect())
            }));
        }
        Self::stratified(&base, degree, ambient, strata)
    }

    /// `Φ × ⟦C⟧`: every fiber `F` replaced by `F × C`, the extra coordinates
    /// appended to the target.
    pub fn extend_fiber(&self, cube: &Arc<GeoComplex>, cube_chain: &Chain) -> Result<ContinuousChain> {
        check_fiber_chain(cube, cube_chain)?;
        let r = cube.ambient_dim();
        let degree = self.fiber_degree + cube_chain.degree();
        let ambient = self.ambient_dim + r;
        if let Family::Constant { fiber_complex, fiber } = &self.family {
            let prod = staircase_product(fiber_complex, cube);
            return Self::constant(&self.base, &prod.complex, fiber.cross(cube_chain));
        }
        let n = self.base.ambient_dim();
        let strata = self
            .strata()
            .into_iter()
            .map(|st| {
                let fc = st.fiber_complex().clone();
                let m = fc.ambient_dim();
                let fiber_prod = staircase_product(&fc, cube);
                Self::stratum(&self.base, st.simplex.clone(), &fiber_prod.complex, st.fiber.cross(cube_chain), |dom| {
                    let c = &dom.complex;
                    let inner = SAMap::new(c, (0..n + m).map(|i| SAFunction::coordinate(c, i)).collect());
                    let g = st.map.after(&inner);
                    let comps = g.components().iter().cloned().chain((0..r).map(|j| SAFunction::coordinate(c, n + m + j))).collect();
                    SAMap::new(c, comps)
                })
            })
            .collect();
        Self::stratified(&self.base, degree, ambient, strata)
    }

    /// Checks that all strata meeting at each base vertex give pairing-equal
    /// fiber chains on the probe forms.
    pub fn verify_closure_compatibility(&self, probes: &[MinimalForm], tol: f64) -> Result<()> {
        let strata = self.strata();
        for v in 0..self.base.num_vertices() {
            let x = self.base.vertex(v).clone();
            let here: Vec<&Stratum> = strata.iter().filter(|s| s.simplex.contains(&v)).collect();
            let chains: Vec<Chain> = here.iter().map(|s| Self::evaluate_on(s, &x, self.ambient_dim)).collect();
            for mu in probes {
                let values = chains.iter().map(|c| mu.pair(c)).collect::<Result<Vec<f64>>>()?;
                if values.windows(2).any(|w| (w[0] - w[1]).abs() > tol) {
                    return Err(Error::IncompatibleInputs(format!("strata disagree at vertex {v}")));
                }
            }
        }
        Ok(())
    }

    /// Checks `f ∘ g_σ = pr₁` at the vertices and barycenters of each stratum domain.
    pub fn verify_projection(&self, f: &Arc<SAMap>) -> Result<()> {
        for st in self.strata() {
            let c = &st.product.complex;
            let n = self.base.ambient_dim();
            let probes = (0..c.num_vertices())
                .map(|v| c.vertex(v).clone())
                .chain(c.top_simplices().iter().map(|t| c.barycenter(t)));
            for p in probes {
                let image = f.value_at(&st.map.value_at(&p)?)?;
                if image.as_slice() != &p[..n] {
                    return Err(Error::ProjectionMismatch(format!("stratum {:?}", st.simplex)));
                }
            }
        }
        Ok(())
    }
}

fn push_cells(out: &mut Vec<ChainTerm>, coeff: i64, prod: &Arc<ProductComplex>, base_cell: &Simplex, fiber: &Chain, map: &Arc<SAMap>) {
    for f in fiber.terms() {
        for (cell, sign) in prod.cells(base_cell, &f.simplex) {
            out.push(ChainTerm { coeff: coeff * f.coeff * sign as i64, source: prod.complex.clone(), simplex: cell, map: map.clone() });
        }
    }
}

/// True when `h` sends the closed simplex `s` of its domain into the closed
/// simplex `target` of `base`, certified by Bernstein coefficients of the
/// barycentric coordinates of the image.
pub(crate) fn maps_into(h: &Arc<SAMap>, s: &Simplex, base: &GeoComplex, target: &Simplex) -> bool {
    let Some(frame) = SimplexFrame::new(&base.points(target)) else { return false };
    let comps: Option<Vec<Poly>> = h
        .components()
        .iter()
        .map(|c| c.expand_on(s).ok().and_then(|r| r.as_poly().cloned()))
        .collect();
    let Some(comps) = comps else { return false };
    let k = s.dim();
    let as_poly = |a: &crate::geometry::Affine| Poly::affine(a.c.clone(), &a.lin).compose(&comps, k);
    if k == 0 {
        let p: Point = comps.iter().map(|c| c.as_constant().unwrap_or_default()).collect();
        return frame.contains(&p);
    }
    frame.hull_equations().iter().all(|e| as_poly(e).is_zero())
        && frame.barycentric_functionals().iter().all(|b| as_poly(b).certified_nonnegative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, standard_simplex, subdivided_interval};
    use crate::rational::q;

    fn unit() -> Arc<GeoComplex> {
        interval(q(0), q(1))
    }

    fn area_form(k: &Arc<GeoComplex>) -> MinimalForm {
        MinimalForm::generator(k, vec![SAFunction::one(k), SAFunction::coordinate(k, 0), SAFunction::coordinate(k, 1)])
    }

    #[test]
    fn point_family_joins_to_identity() {
        let k = standard_simplex(2);
        let g = Chain::fundamental(&k).unwrap();
        let joined = ContinuousChain::point(&k).join(&g).unwrap();
        assert!(joined.sub(&g).is_zero());
    }

    #[test]
    fn unit_square_from_join() {
        let i = unit();
        let phi = ContinuousChain::constant_fundamental(&i, &i).unwrap();
        let sq = phi.join(&Chain::fundamental(&i).unwrap()).unwrap();
        assert_eq!(sq.terms().len(), 2);
        let prod = staircase_product(&i, &i);
        assert!((area_form(&prod.complex).pair(&sq).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stratified_join_matches_constant() {
        let base = subdivided_interval(q(0), q(1), 2);
        let i = unit();
        let constant = ContinuousChain::constant_fundamental(&base, &i).unwrap();
        let stratified =
            ContinuousChain::stratified(&base, 1, 2, constant.strata()).unwrap();
        let g = Chain::fundamental(&base).unwrap();
        let target = staircase_product(&base, &i);
        let mu = MinimalForm::generator(
            &target.complex,
            vec![SAFunction::coordinate(&target.complex, 0), SAFunction::coordinate(&target.complex, 0), SAFunction::coordinate(&target.complex, 1)],
        );
        let a = mu.pair(&constant.join(&g).unwrap()).unwrap();
        let b = mu.pair(&stratified.join(&g).unwrap()).unwrap();
        assert!((a - 0.5).abs() < 1e-14 && (a - b).abs() < 1e-14);
        let lhs = stratified.join(&g).unwrap().boundary();
        let rhs = stratified.join(&g.boundary()).unwrap().add(&stratified.boundary().join(&g).unwrap().neg());
        for f in [SAFunction::one(&target.complex), SAFunction::coordinate(&target.complex, 1)] {
            let probe = MinimalForm::generator(&target.complex, vec![f, SAFunction::coordinate(&target.complex, 0)]);
            assert!((probe.pair(&lhs).unwrap() - probe.pair(&rhs).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation_and_boundary() {
        let i = unit();
        let phi = ContinuousChain::constant_fundamental(&i, &i).unwrap();
        let at = phi.evaluate_at(&[q(1) / q(3)]).unwrap();
        let target = staircase_product(&i, &i).complex.clone();
        let dy = MinimalForm::generator(&target, vec![SAFunction::coordinate(&target, 0), SAFunction::coordinate(&target, 1)]);
        let v = dy.pair(&at).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14, "{v} {at:?}");
        assert!(phi.boundary().boundary().is_zero());
    }

    #[test]
    fn pullback_to_a_vertex_evaluates() {
        let base = subdivided_interval(q(0), q(1), 2);
        let i = unit();
        let phi = ContinuousChain::stratified(&base, 1, 2, ContinuousChain::constant_fundamental(&base, &i).unwrap().strata()).unwrap();
        let pt = point(vec![]);
        let h = SAMap::new(&pt, vec![SAFunction::constant(&pt, q(1) / q(2))]);
        let pulled = phi.pullback(&h).unwrap();
        let g = pulled.join(&Chain::fundamental(&pt).unwrap()).unwrap();
        let direct = phi.evaluate_at(&[q(1) / q(2)]).unwrap();
        let target = staircase_product(&base, &i).complex.clone();
        let probe = MinimalForm::generator(&target, vec![SAFunction::coordinate(&target, 0), SAFunction::coordinate(&target, 1)]);
        assert!((probe.pair(&g).unwrap() - probe.pair(&direct).unwrap()).abs() < 1e-14);
        assert!(phi.verify_projection(&SAMap::new(&target, vec![SAFunction::coordinate(&target, 0)])).is_ok());
    }
}
