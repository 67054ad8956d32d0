//! PA forms: finite sums of fiber integrals `∮_Φ μ` of minimal forms along
//! continuous chains, paired with chains through the join.

use std::sync::Arc;

use num_traits::One;

use crate::chain::Chain;
use crate::complex::{staircase_product, standard_simplex, GeoComplex};
use crate::continuous::ContinuousChain;
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::minimal::MinimalForm;
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct FiberIntegral {
    pub phi: ContinuousChain,
    pub mu: MinimalForm,
}

#[derive(Clone, Debug)]
pub struct PAForm {
    base: Arc<GeoComplex>,
    degree: usize,
    terms: Vec<FiberIntegral>,
}

impl PAForm {
    pub fn zero(base: &Arc<GeoComplex>, degree: usize) -> Self {
        PAForm { base: base.clone(), degree, terms: Vec::new() }
    }

    /// `∮_Φ μ`, of degree `deg μ − deg Φ`.
    pub fn fiber_integral(phi: ContinuousChain, mu: MinimalForm) -> Result<Self> {
        let degree = mu
            .degree()
            .checked_sub(phi.fiber_degree())
            .ok_or_else(|| Error::DegreeMismatch("form degree below fiber degree".into()))?;
        if mu.domain().ambient_dim() != phi.ambient_dim() {
            return Err(Error::DimensionMismatch("form does not live on the family's target".into()));
        }
        Ok(PAForm { base: phi.base().clone(), degree, terms: vec![FiberIntegral { phi, mu }] })
    }

    /// A minimal form as `∮_{⟨⟨∗⟩⟩} μ`.
    pub fn from_minimal(mu: &MinimalForm) -> Self {
        Self::fiber_integral(ContinuousChain::point(mu.domain()), mu.clone()).expect("point fiber")
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[FiberIntegral] {
        &self.terms
    }

    /// A form of degree above the base dimension vanishes.
    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty() || self.degree > self.base.dim()
    }

    /// `⟨∮_Φ μ, γ⟩ = ⟨μ, γ ⋉ Φ⟩`, summed over terms.
    pub fn pair(&self, gamma: &Chain) -> Result<f64> {
        if gamma.degree() != self.degree {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for t in &self.terms {
            total += t.mu.pair(&t.phi.join(gamma)?)?;
        }
        Ok(total)
    }

    fn check_compatible(&self, other: &PAForm) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!("{} vs {}", self.degree, other.degree)));
        }
        if self.base.id() != other.base.id() {
            return Err(Error::IncompatibleInputs("forms over different bases".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &PAForm) -> Result<PAForm> {
        self.check_compatible(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Ok(PAForm { terms, ..self.clone() })
    }

    pub fn scale(&self, c: &Q) -> PAForm {
        let terms = self.terms.iter().map(|t| FiberIntegral { phi: t.phi.clone(), mu: t.mu.scale(c) }).collect();
        PAForm { terms, ..self.clone() }
    }

    pub fn neg(&self) -> PAForm {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &PAForm) -> Result<PAForm> {
        self.add(&other.neg())
    }

    /// `δ∮_Φ μ = ∮_Φ δμ + (−1)^{deg μ − deg Φ} ∮_{∂Φ} μ`.
    pub fn coboundary(&self) -> PAForm {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            terms.push(FiberIntegral { phi: t.phi.clone(), mu: t.mu.coboundary() });
            if t.phi.fiber_degree() > 0 {
                let sign = if (t.mu.degree() - t.phi.fiber_degree()) % 2 == 0 { Q::one() } else { -Q::one() };
                terms.push(FiberIntegral { phi: t.phi.boundary(), mu: t.mu.scale(&sign) });
            }
        }
        terms.retain(|t| !t.mu.is_zero() && !t.phi.is_zero());
        PAForm { base: self.base.clone(), degree: self.degree + 1, terms }
    }

    /// `α₁ × α₂ = (−1)^{deg α₂ · deg Φ₁} ∮_{Φ₁×Φ₂} μ₁ × μ₂`, so that
    /// `⟨α₁ × α₂, γ₁ × γ₂⟩ = ⟨α₁, γ₁⟩⟨α₂, γ₂⟩`.
    pub fn cross(&self, other: &PAForm) -> Result<PAForm> {
        let base = staircase_product(&self.base, &other.base).complex.clone();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let phi = a.phi.cross(&b.phi)?;
                let sign = if (other.degree * a.phi.fiber_degree()).is_multiple_of(2) { Q::one() } else { -Q::one() };
                terms.push(FiberIntegral { phi, mu: a.mu.cross(&b.mu).scale(&sign) });
            }
        }
        Ok(PAForm { base, degree: self.degree + other.degree, terms })
    }

    /// `α₁ · α₂ = Δ*(α₁ × α₂)`.
    pub fn wedge(&self, other: &PAForm) -> Result<PAForm> {
        if self.base.id() != other.base.id() {
            return Err(Error::IncompatibleInputs("wedge of forms over different bases".into()));
        }
        let crossed = self.cross(other)?;
        let n = self.base.ambient_dim();
        let coords: Vec<SAFunction> = (0..n).map(|i| SAFunction::coordinate(&self.base, i)).collect();
        let diagonal = SAMap::new(&self.base, coords.iter().chain(&coords).cloned().collect());
        crossed.pullback(&diagonal)
    }

    /// `g*(∮_Φ μ) = ∮_{g*Φ} μ`; the pulled-back family keeps the target of `Φ`.
    pub fn pullback(&self, g: &Arc<SAMap>) -> Result<PAForm> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(FiberIntegral { phi: t.phi.pullback(g)?, mu: t.mu.clone() }))
            .collect::<Result<Vec<_>>>()?;
        Ok(PAForm { base: g.domain().clone(), degree: self.degree, terms })
    }

    /// `α|_A` for a complex `A` whose polyhedron lies in the base's.
    pub fn restrict_to(&self, sub: &Arc<GeoComplex>) -> Result<PAForm> {
        let terms = self
            .terms
            .iter()
            .map(|t| match t.phi.rebase(sub) {
                Some(phi) => Ok(FiberIntegral { phi, mu: t.mu.clone() }),
                None => {
                    let n = sub.ambient_dim();
                    let inclusion = SAMap::new(sub, (0..n).map(|i| SAFunction::coordinate(sub, i)).collect());
                    Ok(FiberIntegral { phi: t.phi.pullback(&inclusion)?, mu: t.mu.clone() })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PAForm { base: sub.clone(), degree: self.degree, terms })
    }

    /// `f·α` for a function `f` on a complex covering the base. Each term
    /// must have a constant family, whose fibers sit over their base point.
    pub fn multiply(&self, f: &SAFunction) -> Result<PAForm> {
        let n = self.base.ambient_dim();
        if f.domain().ambient_dim() != n {
            return Err(Error::DimensionMismatch("multiplier lives in another space".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if !t.phi.is_constant() {
                    return Err(Error::SupportUnverifiable("multiplying a stratified fiber integral".into()));
                }
                let dom = t.mu.domain();
                let base_part = SAMap::new(dom, (0..n).map(|i| SAFunction::coordinate(dom, i)).collect());
                Ok(FiberIntegral { phi: t.phi.clone(), mu: t.mu.multiply(&f.compose(&base_part)) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PAForm { terms, ..self.clone() })
    }

    /// Pads every term to the largest fiber degree with `Φ × ⟦[0,1]^r⟧` and
    /// `μ × dt₁⋯dt_r`, leaving all pairings unchanged.
    pub fn normalized(&self) -> Result<PAForm> {
        let top = self.terms.iter().map(|t| t.phi.fiber_degree()).max().unwrap_or(0);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let r = top - t.phi.fiber_degree();
                if r == 0 {
                    return Ok(t.clone());
                }
                let (cube, fundamental) = unit_cube(r)?;
                let volume = MinimalForm::generator(
                    &cube,
                    std::iter::once(SAFunction::one(&cube)).chain((0..r).map(|i| SAFunction::coordinate(&cube, i))).collect(),
                );
                Ok(FiberIntegral { phi: t.phi.extend_fiber(&cube, &fundamental)?, mu: t.mu.cross(&volume) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PAForm { terms, ..self.clone() })
    }
}

/// `[0, 1]^r` as an iterated staircase product with its fundamental chain.
pub fn unit_cube(r: usize) -> Result<(Arc<GeoComplex>, Chain)> {
    let interval = standard_simplex(1);
    let edge = Chain::fundamental(&interval)?;
    let mut cube = interval.clone();
    let mut chain = edge.clone();
    for _ in 1..r {
        let prod = staircase_product(&cube, &interval);
        chain = chain.cross(&edge);
        cube = prod.complex.clone();
    }
    Ok((cube, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, point, subdivided_interval};
    use crate::rational::q;

    fn unit() -> Arc<GeoComplex> {
        interval(q(0), q(1))
    }

    #[test]
    fn embedded_minimal_form_pairs_identically() {
        let k = unit();
        let x = SAFunction::coordinate(&k, 0);
        let mu = MinimalForm::generator(&k, vec![x.clone(), x]);
        let g = Chain::fundamental(&k).unwrap();
        let a = PAForm::from_minimal(&mu);
        assert!((a.pair(&g).unwrap() - mu.pair(&g).unwrap()).abs() < 1e-15);
        assert!(a.coboundary().pair(&Chain::zero(2, 1)).unwrap() == 0.0);
    }

    #[test]
    fn fiber_integral_of_area() {
        let k = unit();
        let phi = ContinuousChain::constant_fundamental(&k, &k).unwrap();
        let sq = staircase_product(&k, &k).complex.clone();
        let mu = MinimalForm::generator(&sq, vec![SAFunction::one(&sq), SAFunction::coordinate(&sq, 0), SAFunction::coordinate(&sq, 1)]);
        let a = PAForm::fiber_integral(phi, mu).unwrap();
        assert_eq!(a.degree(), 1);
        assert!((a.pair(&Chain::fundamental(&k).unwrap()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stokes_for_fiber_integral() {
        let base = subdivided_interval(q(0), q(1), 2);
        let i = unit();
        let phi = ContinuousChain::constant_fundamental(&base, &i).unwrap();
        let tot = staircase_product(&base, &i).complex.clone();
        let (x, y) = (SAFunction::coordinate(&tot, 0), SAFunction::coordinate(&tot, 1));
        // ∮ λ(y; x) over the fiber [0,1] is a 0-form.
        let mu = MinimalForm::generator(&tot, vec![y.mul(&x), x.clone()]);
        let a = PAForm::fiber_integral(phi, mu).unwrap();
        let gamma = Chain::fundamental(&base).unwrap();
        let lhs = a.coboundary().pair(&gamma).unwrap();
        let rhs = a.pair(&gamma.boundary()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");
        assert!(a.coboundary().coboundary().pair(&Chain::zero(2, 1)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn padding_keeps_pairings() {
        let k = unit();
        let x = SAFunction::coordinate(&k, 0);
        let a = PAForm::from_minimal(&MinimalForm::generator(&k, vec![x.clone(), x]));
        let phi = ContinuousChain::constant_fundamental(&k, &k).unwrap();
        let sq = staircase_product(&k, &k).complex.clone();
        let b = PAForm::fiber_integral(phi, MinimalForm::generator(&sq, vec![SAFunction::coordinate(&sq, 1), SAFunction::coordinate(&sq, 0), SAFunction::coordinate(&sq, 1)])).unwrap();
        let sum = a.add(&b).unwrap();
        let g = Chain::fundamental(&k).unwrap();
        let before = sum.pair(&g).unwrap();
        let after = sum.normalized().unwrap().pair(&g).unwrap();
        assert!((before - 1.0).abs() < 1e-14 && (before - after).abs() < 1e-12);
    }

    #[test]
    fn cross_is_multiplicative_and_degree_too_high_vanishes() {
        let k = unit();
        let x = SAFunction::coordinate(&k, 0);
        let a = PAForm::from_minimal(&MinimalForm::generator(&k, vec![x.clone(), x.clone()]));
        let b = PAForm::from_minimal(&MinimalForm::generator(&k, vec![SAFunction::one(&k), x]));
        let g = Chain::fundamental(&k).unwrap();
        let ab = a.cross(&b).unwrap();
        let v = ab.pair(&g.cross(&g)).unwrap();
        assert!((v - 0.5).abs() < 1e-13, "{v}");
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.degree(), 2);
        assert!(w.is_structurally_zero());
        let pt = point(vec![q(1) / q(2)]);
        let restricted = b.pullback(&SAMap::new(&pt, vec![SAFunction::constant(&pt, q(1) / q(2))])).unwrap();
        assert!(restricted.is_structurally_zero());
    }
}
