//! Oriented SA bundles given by per-simplex trivializations, and integration
//! along the fiber.

use std::sync::Arc;

use num_traits::One;

use crate::chain::Chain;
use crate::complex::{staircase_product, GeoComplex, ProductComplex, Simplex};
use crate::continuous::{stratum_domain, ContinuousChain, Stratum};
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::rational::Q;

const ORIENTATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SABundle {
    base: Arc<GeoComplex>,
    fiber: Arc<GeoComplex>,
    /// `⟦F⟧`, or its iterated boundary for fiberwise boundary bundles.
    fiber_chain: Chain,
    phi: ContinuousChain,
}

impl SABundle {
    /// `B × F → B`.
    pub fn product(base: &Arc<GeoComplex>, fiber: &Arc<GeoComplex>) -> Result<Self> {
        let fiber_chain = fundamental_of_manifold(fiber)?;
        let phi = ContinuousChain::constant(base, fiber, fiber_chain.clone())?;
        Ok(SABundle { base: base.clone(), fiber: fiber.clone(), fiber_chain, phi })
    }

    /// Domain of the trivialization over `σ`: `cl σ × F`.
    pub fn chart_domain(base: &GeoComplex, simplex: &Simplex, fiber: &Arc<GeoComplex>) -> Arc<ProductComplex> {
        stratum_domain(base, simplex, fiber)
    }

    /// Bundle from maps `h_σ: cl σ × F → ℝ^M`, one per top simplex of the base.
    /// Fibers meeting over a shared vertex must carry the same orientation.
    pub fn new(base: &Arc<GeoComplex>, fiber: &Arc<GeoComplex>, total_dim: usize, trivialization: Vec<(Simplex, Arc<SAMap>)>) -> Result<Self> {
        let fiber_chain = fundamental_of_manifold(fiber)?;
        let strata = trivialization
            .into_iter()
            .map(|(simplex, map)| {
                let product = stratum_domain(base, &simplex, fiber);
                Stratum { simplex, fiber: fiber_chain.clone(), product, map }
            })
            .collect();
        let phi = ContinuousChain::stratified(base, fiber_chain.degree(), total_dim, strata)?;
        let bundle = SABundle { base: base.clone(), fiber: fiber.clone(), fiber_chain, phi };
        bundle.check_orientation()?;
        Ok(bundle)
    }

    fn check_orientation(&self) -> Result<()> {
        let Some(first) = self.phi.strata().into_iter().next() else { return Ok(()) };
        let probes = probe_forms(&first.product.complex, self.total_dim(), self.fiber_dim());
        self.phi.verify_closure_compatibility(&probes, ORIENTATION_TOLERANCE).map_err(|e| match e {
            Error::IncompatibleInputs(msg) => Error::OrientationIncompatible(msg),
            other => other,
        })
    }

    /// Checks `p ∘ h_σ = pr₁` at probe points.
    pub fn verify_projection(&self, p: &Arc<SAMap>) -> Result<()> {
        self.phi.verify_projection(p)
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.base
    }

    pub fn fiber(&self) -> &Arc<GeoComplex> {
        &self.fiber
    }

    pub fn fiber_chain(&self) -> &Chain {
        &self.fiber_chain
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_chain.degree()
    }

    pub fn total_dim(&self) -> usize {
        self.phi.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber_chain.is_zero()
    }

    /// `b ↦ ⟦p⁻¹(b)⟧`.
    pub fn associated_chain(&self) -> &ContinuousChain {
        &self.phi
    }

    /// `E^∂ → B`.
    pub fn fiberwise_boundary(&self) -> SABundle {
        SABundle {
            base: self.base.clone(),
            fiber: self.fiber.clone(),
            fiber_chain: if self.fiber_dim() == 0 { Chain::zero(0, self.fiber.ambient_dim()) } else { self.fiber_chain.boundary() },
            phi: self.phi.boundary(),
        }
    }

    /// `p_*(μ) = ∮_Φ μ`; a form of degree below the fiber dimension pushes to zero.
    pub fn pushforward(&self, mu: &MinimalForm) -> Result<PAForm> {
        if mu.degree() < self.fiber_dim() || self.is_empty() {
            return Ok(PAForm::zero(&self.base, mu.degree().saturating_sub(self.fiber_dim())));
        }
        PAForm::fiber_integral(self.phi.clone(), mu.clone())
    }

    /// Pushforward of a PA form on the total space. Only fiber integrals over
    /// the point family are accepted, and only behind the explicit flag.
    pub fn pushforward_pa(&self, alpha: &PAForm, allow_extended: bool) -> Result<PAForm> {
        if !allow_extended {
            return Err(Error::ExtendedPushforwardDisabled);
        }
        let mut out = PAForm::zero(&self.base, alpha.degree().saturating_sub(self.fiber_dim()));
        for t in alpha.terms() {
            if t.phi.fiber_degree() != 0 || !t.phi.is_constant() || t.phi.ambient_dim() != t.phi.base().ambient_dim() {
                return Err(Error::NotAdapted("only embedded minimal forms can be pushed forward".into()));
            }
            out = out.add(&self.pushforward(&t.mu)?)?;
        }
        Ok(out)
    }

    /// `f*E → X` for `f: X → B`.
    pub fn pullback(&self, f: &Arc<SAMap>) -> Result<SABundle> {
        Ok(SABundle {
            base: f.domain().clone(),
            fiber: self.fiber.clone(),
            fiber_chain: self.fiber_chain.clone(),
            phi: self.phi.pullback(f)?,
        })
    }

    /// `E₁ ×_B E₂ → B` with fiber `F₁ × F₂` and total space in `ℝ^{M₁+M₂}`.
    pub fn fiber_product(&self, other: &SABundle) -> Result<SABundle> {
        if self.base.id() != other.base.id() {
            return Err(Error::IncompatibleInputs("fiber product over different bases".into()));
        }
        let fiber_prod = staircase_product(&self.fiber, &other.fiber);
        let fiber_chain = self.fiber_chain.cross(&other.fiber_chain);
        let n = self.base.ambient_dim();
        let (m1, m2) = (self.fiber.ambient_dim(), other.fiber.ambient_dim());
        let mut strata = Vec::new();
        for top in self.base.top_simplices() {
            let a = self.phi.stratum_for(top).ok_or(Error::NoRefinement)?;
            let b = other.phi.stratum_for(top).ok_or(Error::NoRefinement)?;
            strata.push(ContinuousChain::stratum(&self.base, top.clone(), &fiber_prod.complex, fiber_chain.clone(), |dom| {
                let c = &dom.complex;
                let coord = |i: usize| SAFunction::coordinate(c, i);
                let left = SAMap::new(c, (0..n + m1).map(coord).collect());
                let right = SAMap::new(c, (0..n).map(coord).chain((0..m2).map(|j| coord(n + m1 + j))).collect());
                let g1 = a.map.after(&left);
                let g2 = b.map.after(&right);
                SAMap::new(c, g1.components().iter().chain(g2.components()).cloned().collect())
            }));
        }
        let phi = ContinuousChain::stratified(&self.base, fiber_chain.degree(), self.total_dim() + other.total_dim(), strata)?;
        Ok(SABundle { base: self.base.clone(), fiber: fiber_prod.complex.clone(), fiber_chain, phi })
    }

    /// `q ∘ p` for `self = q: B → X` and `inner = p: E → B`. The inner bundle
    /// must be trivialized by one global polynomial map `B × F_p → E`.
    pub fn compose(&self, inner: &SABundle) -> Result<SABundle> {
        if inner.base.ambient_dim() != self.total_dim() {
            return Err(Error::DimensionMismatch("inner base does not carry the outer total space".into()));
        }
        let global = global_polynomial_chart(inner).ok_or(Error::NoRefinement)?;
        let inner_domain = inner.phi.strata().first().ok_or(Error::NoRefinement)?.product.complex.clone();
        let fiber_prod = staircase_product(&self.fiber, &inner.fiber);
        let fiber_chain = self.fiber_chain.cross(&inner.fiber_chain);
        let n = self.base.ambient_dim();
        let (mq, mp) = (self.fiber.ambient_dim(), inner.fiber.ambient_dim());
        let strata = self
            .phi
            .strata()
            .into_iter()
            .map(|st| {
                ContinuousChain::stratum(&self.base, st.simplex.clone(), &fiber_prod.complex, fiber_chain.clone(), |dom| {
                    let c = &dom.complex;
                    let coord = |i: usize| SAFunction::coordinate(c, i);
                    let outer = st.map.after(&SAMap::new(c, (0..n + mq).map(coord).collect()));
                    let args = SAMap::new(c, outer.components().iter().cloned().chain((0..mp).map(|j| coord(n + mq + j))).collect());
                    let comps = global.iter().map(|p| SAFunction::polynomial(&inner_domain, p.clone()).compose(&args)).collect();
                    SAMap::new(c, comps)
                })
            })
            .collect();
        let phi = ContinuousChain::stratified(&self.base, fiber_chain.degree(), inner.total_dim(), strata)?;
        Ok(SABundle { base: self.base.clone(), fiber: fiber_prod.complex.clone(), fiber_chain, phi })
    }
}

/// The common polynomial components of every trivialization map, in the
/// coordinates `(b, y)` of `B × F`.
fn global_polynomial_chart(b: &SABundle) -> Option<Vec<Poly>> {
    let strata = b.phi.strata();
    let mut found: Option<Vec<Poly>> = None;
    for st in strata {
        let comps: Vec<Poly> = st.map.components().iter().map(|c| c.as_polynomial().cloned()).collect::<Option<_>>()?;
        match &found {
            None => found = Some(comps),
            Some(prev) if *prev == comps => {}
            Some(_) => return None,
        }
    }
    found
}

fn fundamental_of_manifold(fiber: &Arc<GeoComplex>) -> Result<Chain> {
    let chain = Chain::fundamental(fiber)?;
    // Codimension-one faces lie on at most two top simplices; checked by the
    // orientation pass. The boundary must be a cycle of the same complex.
    if chain.degree() > 0 && !chain.boundary().boundary().is_zero() {
        return Err(Error::FiberNotManifold("boundary is not a cycle".into()));
    }
    Ok(chain)
}

/// `λ(1; x_I)` and `λ(x_j; x_I)` for all `|I| = k`.
pub fn probe_forms(domain: &Arc<GeoComplex>, ambient: usize, k: usize) -> Vec<MinimalForm> {
    let mut out = Vec::new();
    for idx in crate::poly::subsets(ambient, k) {
        let slots: Vec<SAFunction> = idx.iter().map(|&i| SAFunction::polynomial(domain, Poly::var(ambient, i))).collect();
        let mut f0s = vec![SAFunction::polynomial(domain, Poly::one(ambient))];
        f0s.extend((0..ambient).map(|j| SAFunction::polynomial(domain, Poly::var(ambient, j).add(&Poly::constant(ambient, Q::one())))));
        for f0 in f0s {
            let mut g = vec![f0];
            g.extend(slots.iter().cloned());
            out.push(MinimalForm::generator(domain, g));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, square_boundary, GeoComplex};
    use crate::rational::q;

    fn unit() -> Arc<GeoComplex> {
        interval(q(0), q(1))
    }

    fn point_chain(base: &Arc<GeoComplex>, v: usize) -> Chain {
        Chain::combination(base, 0, vec![(Simplex::new(vec![v]), 1)])
    }

    #[test]
    fn pushforward_of_interval_bundle() {
        let b = SABundle::product(&unit(), &unit()).unwrap();
        let e = staircase_product(&unit(), &unit()).complex.clone();
        let (x, y) = (SAFunction::coordinate(&e, 0), SAFunction::coordinate(&e, 1));
        let base = unit();
        let at_one = point_chain(&base, 1);
        let v = b.pushforward(&MinimalForm::generator(&e, vec![x.clone(), y.clone()])).unwrap();
        assert!((v.pair(&at_one).unwrap() - 1.0).abs() < 1e-14);
        let ones = b.pushforward(&MinimalForm::generator(&e, vec![SAFunction::one(&e), y])).unwrap();
        assert!((ones.pair(&point_chain(&base, 0)).unwrap() - 1.0).abs() < 1e-14);
        let none = b.pushforward(&MinimalForm::generator(&e, vec![SAFunction::one(&e), x])).unwrap();
        assert!(none.pair(&at_one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fiberwise_boundaries() {
        let b = SABundle::product(&unit(), &unit()).unwrap();
        let db = b.fiberwise_boundary();
        assert_eq!(db.fiber_dim(), 0);
        assert_eq!(db.fiber_chain().terms().len(), 2);
        assert!(db.fiberwise_boundary().is_empty());
        let circle = SABundle::product(&unit(), &square_boundary()).unwrap();
        assert!(circle.fiberwise_boundary().is_empty());
    }

    #[test]
    fn twisted_interval_bundle_is_rejected() {
        let tri = GeoComplex::new(2, vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(0), q(1)]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let fiber = interval(q(-1), q(1));
        let chart = |s: Vec<usize>, flip: bool| {
            let s = Simplex::new(s);
            let dom = SABundle::chart_domain(&tri, &s, &fiber);
            let c = &dom.complex;
            let t = SAFunction::coordinate(c, 2);
            let t = if flip { t.scale(&q(-1)) } else { t };
            (s, SAMap::new(c, vec![SAFunction::coordinate(c, 0), SAFunction::coordinate(c, 1), t]))
        };
        let twisted = SABundle::new(&tri, &fiber, 3, vec![chart(vec![0, 1], false), chart(vec![1, 2], false), chart(vec![0, 2], true)]);
        assert!(matches!(twisted, Err(Error::OrientationIncompatible(_))));
        let straight = SABundle::new(&tri, &fiber, 3, vec![chart(vec![0, 1], false), chart(vec![1, 2], false), chart(vec![0, 2], false)]);
        assert!(straight.is_ok());
    }

    #[test]
    fn pa_pushforward_needs_the_flag() {
        let b = SABundle::product(&unit(), &unit()).unwrap();
        let e = staircase_product(&unit(), &unit()).complex.clone();
        let alpha = PAForm::from_minimal(&MinimalForm::generator(&e, vec![SAFunction::one(&e), SAFunction::coordinate(&e, 1)]));
        assert_eq!(b.pushforward_pa(&alpha, false).unwrap_err(), Error::ExtendedPushforwardDisabled);
        let pushed = b.pushforward_pa(&alpha, true).unwrap();
        assert!((pushed.pair(&point_chain(&unit(), 0)).unwrap() - 1.0).abs() < 1e-14);
    }
}
