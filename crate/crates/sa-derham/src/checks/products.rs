//! Cross products, the factor swap and graded commutativity of the wedge
//! product on seeded PA forms, some of them integrals along an interval fiber.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Bound, Check};
use crate::chain::Chain;
use crate::complex::{interval, staircase_product, GeoComplex};
use crate::continuous::ContinuousChain;
use crate::error::Result;
use crate::function::{SAFunction, SAMap};
use crate::pa::PAForm;
use crate::random::{random_complex, random_minimal, seeded, SeededRng};
use crate::rational::q;

pub const PRODUCT_TOLERANCE: f64 = 1e-9;

/// A minimal form, or the integral of one along the fiber of `K × [0, 1]`.
fn random_pa(rng: &mut SeededRng, k: &Arc<GeoComplex>, degree: usize) -> Result<PAForm> {
    if rng.gen_bool(0.5) {
        return Ok(PAForm::from_minimal(&random_minimal(rng, k, degree, 2, 2)));
    }
    let unit = interval(q(0), q(1));
    let total = staircase_product(k, &unit).complex.clone();
    let phi = ContinuousChain::constant_fundamental(k, &unit)?;
    PAForm::fiber_integral(phi, random_minimal(rng, &total, degree + 1, 2, 2))
}

/// Identity-mapped combination of simplices, which every family can be joined with.
fn simplex_chain(rng: &mut SeededRng, k: &Arc<GeoComplex>, degree: usize) -> Chain {
    let simplices: Vec<_> = k.simplices_of_dim(degree).cloned().collect();
    let parts = (0..3)
        .map(|_| (simplices.choose(rng).expect("simplex of the requested degree").clone(), rng.gen_range(-2..=2)))
        .collect();
    Chain::combination(k, degree, parts)
}

fn sign(exponent: usize) -> f64 {
    if exponent.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(x, y) ↦ (y, x)` on the staircase product of `left` and `right`.
fn swap(left: &Arc<GeoComplex>, right: &Arc<GeoComplex>) -> Arc<SAMap> {
    let domain = staircase_product(left, right).complex.clone();
    let (n1, n2) = (left.ambient_dim(), right.ambient_dim());
    let comps = (n1..n1 + n2).chain(0..n1).map(|i| SAFunction::coordinate(&domain, i)).collect();
    SAMap::new(&domain, comps)
}

struct Residuals {
    cross: f64,
    twist: f64,
    wedge: f64,
    cross_size: f64,
    wedge_size: f64,
}

fn product_case(rng: &mut SeededRng) -> Result<Residuals> {
    let (d1, d2) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
    let (k1, k2) = (random_complex(rng, d1), random_complex(rng, d2));
    let (p, r) = (rng.gen_range(0..=d1), rng.gen_range(0..=d2));
    let (a1, a2) = (random_pa(rng, &k1, p)?, random_pa(rng, &k2, r)?);
    let (g1, g2) = (simplex_chain(rng, &k1, p), simplex_chain(rng, &k2, r));
    let expected = a1.pair(&g1)? * a2.pair(&g2)?;
    let crossed = g1.cross(&g2);
    let cross = (a1.cross(&a2)?.pair(&crossed)? - expected).abs();
    let twisted = a2.cross(&a1)?.pullback(&swap(&k1, &k2))?;
    let twist = (twisted.pair(&crossed)? - sign(p * r) * expected).abs();

    let r1 = rng.gen_range(0..=d1 - p);
    let b1 = random_pa(rng, &k1, r1)?;
    let g = simplex_chain(rng, &k1, p + r1);
    let forward = a1.wedge(&b1)?.pair(&g)?;
    let backward = b1.wedge(&a1)?.pair(&g)?;
    Ok(Residuals {
        cross,
        twist,
        wedge: (forward - sign(p * r1) * backward).abs(),
        cross_size: expected.abs(),
        wedge_size: forward.abs(),
    })
}

/// Worst residual of each law over `count` seeded instances, plus how many
/// instances had nonzero pairings.
pub fn product_suite(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut rng = seeded(seed);
    let (mut cross, mut twist, mut wedge) = (0.0f64, 0.0f64, 0.0f64);
    let (mut cross_nonzero, mut wedge_nonzero) = (0usize, 0usize);
    for _ in 0..count {
        let r = product_case(&mut rng)?;
        cross = cross.max(r.cross);
        twist = twist.max(r.twist);
        wedge = wedge.max(r.wedge);
        cross_nonzero += usize::from(r.cross_size > 1e-6);
        wedge_nonzero += usize::from(r.wedge_size > 1e-6);
    }
    let floor = Bound::AtLeast((count / 4) as f64);
    Ok(vec![
        Check::at_most("cross_residual", cross, PRODUCT_TOLERANCE),
        Check::at_most("twist_residual", twist, PRODUCT_TOLERANCE),
        Check::at_most("wedge_commutativity_residual", wedge, PRODUCT_TOLERANCE),
        Check::new("nonzero_cross_pairings", cross_nonzero as f64, floor.clone()),
        Check::new("nonzero_wedge_pairings", wedge_nonzero as f64, floor),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_laws_hold_on_seeded_forms() {
        for c in product_suite(5, 12).unwrap() {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
