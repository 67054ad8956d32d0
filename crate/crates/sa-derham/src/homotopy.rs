//! Homotopy operators `Θ_h` and Poincaré primitives along collapse plans.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::chain::Chain;
use crate::complex::{point, staircase_product, standard_simplex, CollapseSequence, GeoComplex, ProductComplex, Simplex};
use crate::continuous::ContinuousChain;
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::geometry::Point;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::rational::Q;

/// The parameter interval `[0, 1]`, shared so that staircase products are reused.
pub fn unit_interval() -> Arc<GeoComplex> {
    static UNIT: OnceLock<Arc<GeoComplex>> = OnceLock::new();
    UNIT.get_or_init(|| standard_simplex(1)).clone()
}

fn sign(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

/// A map `h: |X| × [0, 1] → ℝ^n` on the staircase product `X × I`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    product: Arc<ProductComplex>,
    map: Arc<SAMap>,
}

impl Homotopy {
    pub fn new(base: &Arc<GeoComplex>, map: Arc<SAMap>) -> Result<Self> {
        let product = staircase_product(base, &unit_interval());
        if map.domain().id() != product.complex.id() {
            return Err(Error::InvalidComplex("homotopy must be defined on the staircase product with [0, 1]".into()));
        }
        Ok(Homotopy { product, map })
    }

    /// `h(x, t) = (1 − t)x + t·v`.
    pub fn straight_line(base: &Arc<GeoComplex>, target: &[Q]) -> Self {
        let product = staircase_product(base, &unit_interval());
        let n = base.ambient_dim();
        let t = Poly::var(n + 1, n);
        let one_minus_t = Poly::one(n + 1).sub(&t);
        let components = (0..n)
            .map(|i| {
                let p = Poly::var(n + 1, i).mul(&one_minus_t).add(&t.scale(&target[i]));
                SAFunction::polynomial(&product.complex, p)
            })
            .collect();
        let map = SAMap::new(&product.complex, components);
        Homotopy { product, map }
    }

    /// The PL homotopy interpolating linearly from the identity to a vertex map.
    pub fn pl_to(base: &Arc<GeoComplex>, images: &[Point]) -> Self {
        let product = staircase_product(base, &unit_interval());
        let mut values = vec![Vec::new(); product.complex.num_vertices()];
        for i in 0..base.num_vertices() {
            values[product.join(i, 0)] = base.vertex(i).clone();
            values[product.join(i, 1)] = images[i].clone();
        }
        let map = SAMap::pl(&product.complex, &values);
        Homotopy { product, map }
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.product.left
    }

    pub fn map(&self) -> &Arc<SAMap> {
        &self.map
    }

    /// `h(−, t)` as a map on the base.
    pub fn at(&self, t: &Q) -> Arc<SAMap> {
        let base = self.base();
        let n = base.ambient_dim();
        let section = SAMap::new(
            base,
            (0..n).map(|i| SAFunction::coordinate(base, i)).chain([SAFunction::constant(base, t.clone())]).collect(),
        );
        self.map.after(&section)
    }

    /// `Θ_h(α)` with `⟨Θ_h α, γ⟩ = ⟨α, h_*(γ × ⟦I⟧)⟩` for constant-family terms.
    /// A term `∮_{⟨⟨F⟩⟩} μ` becomes `∮_{⟨⟨I × F⟩⟩} (h × id_F)* μ`.
    pub fn theta(&self, alpha: &PAForm) -> Result<PAForm> {
        let base = self.base();
        if alpha.base().ambient_dim() != self.map.target_dim() {
            return Err(Error::DimensionMismatch("homotopy target does not match the form's base".into()));
        }
        if alpha.degree() == 0 {
            return Err(Error::DegreeMismatch("Θ lowers degree; the input has degree 0".into()));
        }
        let interval = unit_interval();
        let mut out = PAForm::zero(base, alpha.degree() - 1);
        for term in alpha.terms() {
            let (fiber_complex, fiber) = term
                .phi
                .constant_fiber()
                .ok_or_else(|| Error::SupportUnverifiable("Θ needs trivial fiber integrals along the homotopy".into()))?;
            let piece = if fiber_complex.ambient_dim() == 0 {
                let phi = ContinuousChain::constant_fundamental(base, &interval)?;
                PAForm::fiber_integral(phi, term.mu.pullback(&self.map))?
            } else {
                let fiber_product = staircase_product(&interval, fiber_complex);
                let fiber_chain = Chain::fundamental(&interval)?.cross(fiber);
                let phi = ContinuousChain::constant(base, &fiber_product.complex, fiber_chain)?;
                let total = staircase_product(base, &fiber_product.complex);
                let d = &total.complex;
                let n = base.ambient_dim();
                let inner = SAMap::new(d, (0..=n).map(|i| SAFunction::coordinate(d, i)).collect());
                let components = self
                    .map
                    .components()
                    .iter()
                    .map(|c| c.compose(&inner))
                    .chain((0..fiber_complex.ambient_dim()).map(|j| SAFunction::coordinate(d, n + 1 + j)))
                    .collect();
                PAForm::fiber_integral(phi, term.mu.pullback(&SAMap::new(d, components)))?
            };
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// Largest deviation of `h₁* − h₀* = (−1)^k (Θδ − δΘ)` over probe chains of
    /// the form's degree.
    pub fn identity_residual(&self, alpha: &PAForm, probes: &[Chain]) -> Result<f64> {
        let k = alpha.degree();
        let (h0, h1) = (self.at(&Q::zero()), self.at(&Q::one()));
        let theta_delta = self.theta(&alpha.coboundary())?;
        let theta = if k > 0 { Some(self.theta(alpha)?) } else { None };
        let s = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut worst: f64 = 0.0;
        for gamma in probes.iter().filter(|g| g.degree() == k) {
            let lhs = alpha.pair(&gamma.pushforward(&h1))? - alpha.pair(&gamma.pushforward(&h0))?;
            let mut rhs = theta_delta.pair(gamma)?;
            if let Some(theta) = &theta {
                rhs -= theta.pair(&gamma.boundary())?;
            }
            worst = worst.max((lhs - s * rhs).abs());
        }
        Ok(worst)
    }
}

/// One stage of a contraction: a homotopy on `T_p` (possibly subdivided) from
/// the identity to a retraction onto `T_{p+1}`.
#[derive(Clone, Debug)]
pub struct HomotopyStep {
    pub homotopy: Homotopy,
    pub retraction: Arc<SAMap>,
    pub remaining: Arc<GeoComplex>,
}

impl HomotopyStep {
    pub fn carrier(&self) -> &Arc<GeoComplex> {
        self.homotopy.base()
    }
}

/// `T₁ ⊃ ⋯ ⊃ T_{N+1} = {∗}` with homotopies between successive stages, and
/// the composite retractions `G_p = r_p ∘ ⋯ ∘ r₁` as maps on `T₁`.
#[derive(Clone, Debug)]
pub struct CollapseHomotopyPlan {
    complex: Arc<GeoComplex>,
    steps: Vec<HomotopyStep>,
    transports: Vec<Arc<SAMap>>,
}

impl CollapseHomotopyPlan {
    fn from_steps(complex: &Arc<GeoComplex>, steps: Vec<HomotopyStep>) -> Self {
        let mut transports = Vec::with_capacity(steps.len());
        let mut current = SAMap::identity(complex);
        for step in &steps {
            transports.push(current.clone());
            current = if current.is_identity() {
                SAMap::new(complex, step.retraction.components().to_vec())
            } else {
                step.retraction.after(&current)
            };
        }
        CollapseHomotopyPlan { complex: complex.clone(), steps, transports }
    }

    pub fn complex(&self) -> &Arc<GeoComplex> {
        &self.complex
    }

    pub fn steps(&self) -> &[HomotopyStep] {
        &self.steps
    }

    /// Checks each homotopy at the vertices of its prism: `h(−, 0) = id`,
    /// `h(−, 1)` sends every carrier simplex onto a simplex of the next stage,
    /// and vertices of the next stage stay fixed for all `t`. All homotopies
    /// are PL or the straight line to a vertex, so this decides the endpoint
    /// and support conditions.
    pub fn validate(&self) -> Result<()> {
        for (p, step) in self.steps.iter().enumerate() {
            let h = &step.homotopy;
            let carrier = h.base();
            let prod = &h.product;
            let next = &step.remaining;
            let index: HashMap<&Point, usize> = next.vertices().iter().enumerate().map(|(i, v)| (v, i)).collect();
            let fail = |msg: &str| Err(Error::InvalidCollapse(format!("step {p}: {msg}")));
            for i in (0..carrier.num_vertices()).filter(|&i| carrier.contains(&Simplex::new(vec![i]))) {
                let x = carrier.vertex(i);
                let at0 = h.map.value_at(prod.complex.vertex(prod.join(i, 0)))?;
                if &at0 != x {
                    return fail("h(−, 0) is not the identity");
                }
                if let Some(&j) = index.get(x) {
                    if next.contains(&Simplex::new(vec![j])) {
                        let at1 = h.map.value_at(prod.complex.vertex(prod.join(i, 1)))?;
                        if &at1 != x {
                            return fail("h moves a vertex of the next stage");
                        }
                    }
                }
            }
            for s in carrier.top_simplices() {
                let mut image = Vec::with_capacity(s.len());
                for &v in s.iter() {
                    let y = step.retraction.value_at(carrier.vertex(v))?;
                    match index.get(&y) {
                        Some(&j) => image.push(j),
                        None => return fail("retraction leaves the next stage"),
                    }
                }
                image.sort_unstable();
                image.dedup();
                if !next.contains(&Simplex::new(image)) {
                    return fail("retraction does not land on a simplex of the next stage");
                }
            }
        }
        Ok(())
    }
}

/// One-step plan along the straight line to `v`. Every top simplex must
/// contain `v`, which makes `|K|` a cone on `v`.
pub fn star_shaped_plan(complex: &Arc<GeoComplex>, v: usize) -> Result<CollapseHomotopyPlan> {
    if v >= complex.num_vertices() || !complex.top_simplices().iter().all(|s| s.contains(&v)) {
        return Err(Error::NotStarShaped);
    }
    let apex = complex.vertex(v).clone();
    let homotopy = Homotopy::straight_line(complex, &apex);
    let retraction = SAMap::new(complex, apex.iter().map(|c| SAFunction::constant(complex, c.clone())).collect());
    let step = HomotopyStep { homotopy, retraction, remaining: point(apex) };
    Ok(CollapseHomotopyPlan::from_steps(complex, vec![step]))
}

/// One PL step per elementary collapse. For a free face `σ` of `τ = σ ∪ {w}`
/// with `dim σ ≥ 1`, the carrier is the remaining complex with `τ` starred at
/// the barycenter `b` of `σ`, and the retraction sends `b ↦ w`; a free vertex
/// is sent straight to `w`.
pub fn collapse_plan(seq: &CollapseSequence) -> Result<CollapseHomotopyPlan> {
    seq.replay()?;
    let k = &seq.complex;
    let mut remaining: Vec<Simplex> = k.simplices().cloned().collect();
    let mut steps = Vec::with_capacity(seq.steps.len());
    for step in &seq.steps {
        let (free, coface, apex) = (&step.free, &step.coface, step.apex());
        let next: Vec<Simplex> = remaining.iter().filter(|s| *s != free && *s != coface).cloned().collect();
        let mut vertices = k.vertices().to_vec();
        let (carrier, images) = if free.dim() == 0 {
            let carrier = GeoComplex::new_trusted(k.ambient_dim(), vertices.clone(), remaining.clone());
            let mut images = vertices.clone();
            images[free[0]] = vertices[apex].clone();
            (carrier, images)
        } else {
            let b = vertices.len();
            vertices.push(k.barycenter(free));
            let mut gens = next.clone();
            gens.extend((0..free.len()).map(|i| {
                let mut v = free.facet(i).to_vec();
                v.extend([apex, b]);
                Simplex::new(v)
            }));
            let mut images = vertices.clone();
            images[b] = vertices[apex].clone();
            (GeoComplex::new_trusted(k.ambient_dim(), vertices.clone(), gens), images)
        };
        let homotopy = Homotopy::pl_to(&carrier, &images);
        let retraction = SAMap::pl(&carrier, &images);
        let remaining_complex = GeoComplex::new_trusted(k.ambient_dim(), k.vertices().to_vec(), next.clone());
        steps.push(HomotopyStep { homotopy, retraction, remaining: remaining_complex });
        remaining = next;
    }
    Ok(CollapseHomotopyPlan::from_steps(k, steps))
}

/// `β = (−1)^{k+1} Σ_p G_{p−1}* Θ_{h_p}(α|_{T_p})`, so that `δβ = −α` for a
/// closed form `α` of degree `k ≥ 1`.
pub fn poincare_primitive(alpha: &PAForm, plan: &CollapseHomotopyPlan) -> Result<PAForm> {
    let k = alpha.degree();
    if k == 0 {
        return Err(Error::DegreeMismatch("primitives exist only in positive degree".into()));
    }
    if alpha.base().id() != plan.complex.id() {
        return Err(Error::IncompatibleInputs("form and plan live on different complexes".into()));
    }
    let base = &plan.complex;
    let mut beta = PAForm::zero(base, k - 1);
    for (step, transport) in plan.steps.iter().zip(&plan.transports) {
        let local = step.homotopy.theta(&alpha.restrict_to(step.carrier())?)?;
        let moved = if transport.is_identity() { local.restrict_to(base)? } else { local.pullback(transport)? };
        beta = beta.add(&moved)?;
    }
    Ok(beta.scale(&sign(k.is_multiple_of(2))))
}

/// `⟨δβ + α, γ⟩` maximized over probes of degree `k`.
pub fn primitive_residual(alpha: &PAForm, beta: &PAForm, probes: &[Chain]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for gamma in probes.iter().filter(|g| g.degree() == alpha.degree()) {
        let value = beta.pair(&gamma.boundary())? + alpha.pair(gamma)?;
        worst = worst.max(value.abs());
    }
    Ok(worst)
}
