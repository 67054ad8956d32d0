//! Integration along the fiber: naturality, fiberwise Stokes, double
//! pushforward, fiber products, vanishing on factored forms and invariance
//! under fiber subdivision.

use std::sync::Arc;

use super::{pairing_gap, point_chain, Check};
use crate::bundle::SABundle;
use crate::chain::Chain;
use crate::complex::{
    barycentric_subdivision, interval, square_boundary, staircase_product, subdivided_interval, GeoComplex, OrientedSimplex, Simplex,
};
use crate::error::Result;
use crate::function::{SAFunction, SAMap};
use crate::minimal::MinimalForm;
use crate::poly::Poly;
use crate::rational::{q, qr, Q};

pub const BUNDLE_TOLERANCE: f64 = 1e-8;
pub const VANISHING_TOLERANCE: f64 = 1e-10;
pub const SUBDIVISION_TOLERANCE: f64 = 1e-9;

/// A bundle over the shared base with one global polynomial chart `(x, y) ↦ E`
/// and test forms on a complex covering its total space.
struct Fixture {
    name: &'static str,
    bundle: SABundle,
    fiber: Arc<GeoComplex>,
    chart: Vec<Poly>,
    forms: Vec<MinimalForm>,
}

fn lam(domain: &Arc<GeoComplex>, polys: Vec<Poly>) -> MinimalForm {
    MinimalForm::generator(domain, polys.into_iter().map(|p| SAFunction::polynomial(domain, p)).collect())
}

fn identity_chart(m: usize) -> Vec<Poly> {
    (0..m).map(|i| Poly::var(m, i)).collect()
}

fn fixtures(base: &Arc<GeoComplex>) -> Result<Vec<Fixture>> {
    let unit = interval(q(0), q(1));
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let one = Poly::one(2);
    let plane_forms = |dom: &Arc<GeoComplex>| {
        vec![
            lam(dom, vec![x.add(&y.mul(&y)), y.clone()]),
            lam(dom, vec![x.mul(&y), x.clone()]).add(&lam(dom, vec![one.clone(), y.clone()])),
            lam(dom, vec![one.add(&x.mul(&y)), x.clone(), y.clone()]),
        ]
    };

    let flat_domain = staircase_product(base, &unit).complex.clone();
    let flat = Fixture {
        name: "interval",
        bundle: SABundle::product(base, &unit)?,
        fiber: unit.clone(),
        chart: identity_chart(2),
        forms: plane_forms(&flat_domain),
    };

    let shear = vec![x.clone(), one.add(&x).mul(&y)];
    let charts = base
        .top_simplices()
        .iter()
        .map(|t| {
            let dom = SABundle::chart_domain(base, t, &unit);
            let comps = shear.iter().map(|p| SAFunction::polynomial(&dom.complex, p.clone())).collect();
            (t.clone(), SAMap::new(&dom.complex, comps))
        })
        .collect();
    let tall_domain = staircase_product(base, &interval(q(0), q(2))).complex.clone();
    let sheared = Fixture {
        name: "sheared",
        bundle: SABundle::new(base, &unit, 2, charts)?,
        fiber: unit,
        chart: shear,
        forms: plane_forms(&tall_domain),
    };

    let circle = square_boundary();
    let circle_domain = staircase_product(base, &circle).complex.clone();
    let (t, y1, y2) = (Poly::var(3, 0), Poly::var(3, 1), Poly::var(3, 2));
    let d = &circle_domain;
    let circle_fixture = Fixture {
        name: "circle",
        bundle: SABundle::product(base, &circle)?,
        fiber: circle,
        chart: identity_chart(3),
        forms: vec![
            lam(d, vec![y1.add(&t), y2.clone()]).add(&lam(d, vec![t.mul(&y2), y1.clone()])),
            lam(d, vec![y1.mul(&y1), y2.clone()]),
            lam(d, vec![y1.clone(), t.clone(), y2.clone()]).add(&lam(d, vec![Poly::one(3).add(&t), y1.clone(), t.clone()])),
        ],
    };
    Ok(vec![flat, sheared, circle_fixture])
}

/// Vertices, edges, and per edge an interior point and an inner segment, by degree.
fn probes(base: &Arc<GeoComplex>) -> [Vec<Chain>; 2] {
    let identity = |s: &Simplex| Chain::simplex(base, &OrientedSimplex::positive(s.clone()));
    let mut points: Vec<Chain> = base.simplices_of_dim(0).map(identity).collect();
    let mut segments: Vec<Chain> = base.simplices_of_dim(1).map(identity).collect();
    for edge in base.simplices_of_dim(1) {
        let (a, b) = (base.vertex(edge[0])[0].clone(), base.vertex(edge[1])[0].clone());
        let at = |t: Q| &a + (&b - &a) * t;
        points.push(point_chain(vec![at(qr(1, 3))]));
        let seg = interval(at(qr(1, 4)), at(qr(3, 4)));
        segments.push(Chain::simplex(&seg, &OrientedSimplex::positive(Simplex::new(vec![0, 1]))));
    }
    [points, segments]
}

fn probes_of(all: &[Vec<Chain>; 2], degree: usize) -> &[Chain] {
    all.get(degree).map_or(&[], Vec::as_slice)
}

fn sign(exponent: usize) -> Q {
    if exponent.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

/// `f*(π_*μ) = π̂_*(f̂*μ)` along `f(x) = x²/2` from a finer interval.
fn naturality(fx: &Fixture) -> Result<f64> {
    let source = subdivided_interval(q(0), q(1), 3);
    let f = Poly::var(1, 0).mul(&Poly::var(1, 0)).scale(&qr(1, 2));
    let f_map = SAMap::new(&source, vec![SAFunction::polynomial(&source, f.clone())]);
    let pulled = SABundle::product(&source, &fx.fiber)?;
    let total = staircase_product(&source, &fx.fiber).complex.clone();
    let m = total.ambient_dim();
    let mut args = vec![f.embed(m, &[0])];
    args.extend((1..m).map(|i| Poly::var(m, i)));
    let lift = SAMap::new(&total, fx.chart.iter().map(|p| SAFunction::polynomial(&total, p.compose(&args, m))).collect());
    let probes = probes(&source);
    let mut worst = 0.0f64;
    for mu in &fx.forms {
        let lhs = fx.bundle.pushforward(mu)?.pullback(&f_map)?;
        let rhs = pulled.pushforward(&mu.pullback(&lift))?;
        worst = worst.max(pairing_gap(&lhs, &rhs, probes_of(&probes, lhs.degree()))?);
    }
    Ok(worst)
}

/// `⟨π_*μ, ∂γ⟩ = ⟨π_*δμ, γ⟩ + (−1)^{deg μ − k} ⟨π^∂_*μ, γ⟩`.
fn fiberwise_stokes(fx: &Fixture, probes: &[Vec<Chain>; 2]) -> Result<f64> {
    let k = fx.bundle.fiber_dim();
    let boundary_bundle = fx.bundle.fiberwise_boundary();
    let mut worst = 0.0f64;
    for mu in &fx.forms {
        let pushed = fx.bundle.pushforward(mu)?;
        let rhs = fx.bundle.pushforward(&mu.coboundary())?.add(&boundary_bundle.pushforward(mu)?.scale(&sign(mu.degree() - k)))?;
        for g in probes_of(probes, pushed.degree() + 1) {
            worst = worst.max((pushed.pair(&g.boundary())? - rhs.pair(g)?).abs());
        }
    }
    Ok(worst)
}

/// `(π ∘ pr₁)_*(μ × ν) = π_*(μ)·⟨ν, ⟦N⟧⟧` with `N = [0, 1]` and `ν = λ(1 + u; u)`.
fn double_pushforward(fx: &Fixture, probes: &[Vec<Chain>; 2]) -> Result<f64> {
    let n = interval(q(0), q(1));
    let u = Poly::var(1, 0);
    let nu = lam(&n, vec![Poly::one(1).add(&u), u]);
    let total_nu = nu.pair(&Chain::fundamental(&n)?)?;
    let mut worst = 0.0f64;
    for mu in &fx.forms {
        let inner = SABundle::product(mu.domain(), &n)?;
        let composite = fx.bundle.compose(&inner)?;
        let lhs = composite.pushforward(&mu.cross(&nu))?;
        let rhs = fx.bundle.pushforward(mu)?;
        for g in probes_of(probes, lhs.degree()) {
            worst = worst.max((lhs.pair(g)? - total_nu * rhs.pair(g)?).abs());
        }
    }
    Ok(worst)
}

/// `π₁_*(μ₁)·π₂_*(μ₂) = (−1)^{k₁(deg μ₂ − k₂)} π_*(μ₁ × μ₂)` on the fiber product.
fn fiber_product(first: &Fixture, second: &Fixture, probes: &[Vec<Chain>; 2]) -> Result<f64> {
    let product = first.bundle.fiber_product(&second.bundle)?;
    let (k1, k2) = (first.bundle.fiber_dim(), second.bundle.fiber_dim());
    let mut worst = 0.0f64;
    for m1 in &first.forms {
        for m2 in &second.forms {
            let lhs = first.bundle.pushforward(m1)?.wedge(&second.bundle.pushforward(m2)?)?;
            let rhs = product.pushforward(&m1.cross(m2))?.scale(&sign(k1 * (m2.degree() - k2)));
            worst = worst.max(pairing_gap(&lhs, &rhs, probes_of(probes, lhs.degree()))?);
        }
    }
    Ok(worst)
}

/// `π_*(ρ*ν) = 0` for `ν` on the base and `ρ` forgetting the fiber coordinates.
fn vanishing(fx: &Fixture, base: &Arc<GeoComplex>, probes: &[Vec<Chain>; 2]) -> Result<f64> {
    let x = Poly::var(1, 0);
    let nu = lam(base, vec![Poly::one(1).add(&x.mul(&x)), x]);
    let dom = fx.forms[0].domain();
    let forget = SAMap::new(dom, vec![SAFunction::coordinate(dom, 0)]);
    let pushed = fx.bundle.pushforward(&nu.pullback(&forget))?;
    let mut worst = 0.0f64;
    for g in probes_of(probes, pushed.degree()) {
        worst = worst.max(pushed.pair(g)?.abs());
    }
    Ok(worst)
}

/// Orientation ratio of the subdivided fiber and the pushforward mismatch.
fn subdivision(fx: &Fixture, fine: &Arc<GeoComplex>, volume: &MinimalForm, base: &Arc<GeoComplex>, probes: &[Vec<Chain>; 2]) -> Result<(f64, f64)> {
    let refined = SABundle::product(base, fine)?;
    let epsilon = volume.pair(refined.fiber_chain())? / volume.pair(fx.bundle.fiber_chain())?;
    let eps = q(epsilon.round() as i64);
    let mut worst = 0.0f64;
    for mu in &fx.forms {
        let lhs = refined.pushforward(mu)?;
        let rhs = fx.bundle.pushforward(mu)?.scale(&eps);
        worst = worst.max(pairing_gap(&lhs, &rhs, probes_of(probes, lhs.degree()))?);
    }
    Ok((epsilon, worst))
}

/// Runs every identity on the interval, sheared and circle fixtures.
pub fn bundle_suite() -> Result<Vec<Check>> {
    let base = subdivided_interval(q(0), q(1), 2);
    let fixtures = fixtures(&base)?;
    let probes = probes(&base);
    let mut out = Vec::new();
    for fx in &fixtures {
        out.push(Check::at_most(format!("naturality/{}", fx.name), naturality(fx)?, BUNDLE_TOLERANCE));
        out.push(Check::at_most(format!("fiberwise_stokes/{}", fx.name), fiberwise_stokes(fx, &probes)?, BUNDLE_TOLERANCE));
        out.push(Check::at_most(format!("double_pushforward/{}", fx.name), double_pushforward(fx, &probes)?, BUNDLE_TOLERANCE));
        out.push(Check::at_most(format!("vanishing/{}", fx.name), vanishing(fx, &base, &probes)?, VANISHING_TOLERANCE));
    }
    let (flat, circle) = (&fixtures[0], &fixtures[2]);
    out.push(Check::at_most("fiber_product/interval_circle", fiber_product(flat, circle, &probes)?, BUNDLE_TOLERANCE));
    out.push(Check::at_most("fiber_product/circle_interval", fiber_product(circle, flat, &probes)?, BUNDLE_TOLERANCE));

    let unit = &flat.fiber;
    let length = lam(unit, vec![Poly::one(1), Poly::var(1, 0)]);
    let (eps, gap) = subdivision(flat, &subdivided_interval(q(0), q(1), 3), &length, &base, &probes)?;
    out.push(Check::equals("subdivision_orientation/interval", eps, 1.0));
    out.push(Check::at_most("subdivision_pushforward/interval", gap, SUBDIVISION_TOLERANCE));
    let (y1, y2) = (Poly::var(2, 0), Poly::var(2, 1));
    let sq = &circle.fiber;
    let loop_form = lam(sq, vec![Poly::one(2).sub(&y2.scale(&q(2))).scale(&qr(1, 4)), y1.clone()])
        .add(&lam(sq, vec![y1.scale(&q(2)).sub(&Poly::one(2)).scale(&qr(1, 4)), y2]));
    let fine_circle = barycentric_subdivision(sq).complex;
    let (eps, gap) = subdivision(circle, &fine_circle, &loop_form, &base, &probes)?;
    out.push(Check::equals("subdivision_orientation/circle", eps, 1.0));
    out.push(Check::at_most("subdivision_pushforward/circle", gap, SUBDIVISION_TOLERANCE));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundle_identity_holds() {
        let checks = bundle_suite().unwrap();
        for c in &checks {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
