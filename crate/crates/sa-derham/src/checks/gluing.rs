//! Mayer–Vietoris on the two-arc cover of the subdivided square boundary.

use std::sync::Arc;

use super::{Bound, Check};
use crate::chain::Chain;
use crate::cohomology::{simplex_probes, GeneratedComplexSlice};
use crate::complex::{barycentric_subdivision, square_boundary, GeoComplex, OrientedSimplex, Simplex};
use crate::error::Result;
use crate::function::SAFunction;
use crate::mayer_vietoris::{mayer_vietoris, Cover};
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::rational::{q, qr, Q};

pub const DIFFERENCE_TOLERANCE: f64 = 1e-10;
pub const WITNESS_TOLERANCE: f64 = 1e-9;
pub const GLUING_TOLERANCE: f64 = 1e-8;
pub const LOOP_TOLERANCE: f64 = 1e-8;

fn lam(k: &Arc<GeoComplex>, fs: Vec<SAFunction>) -> PAForm {
    PAForm::from_minimal(&MinimalForm::generator(k, fs))
}

fn hat(k: &Arc<GeoComplex>, v: usize) -> PAForm {
    let values: Vec<Q> = (0..k.num_vertices()).map(|i| if i == v { q(1) } else { q(0) }).collect();
    lam(k, vec![SAFunction::pl(k, &values)])
}

fn vertex_at(k: &GeoComplex, p: &[Q]) -> usize {
    (0..k.num_vertices()).find(|&i| k.vertex(i).as_slice() == p).expect("vertex present")
}

fn part_without(k: &Arc<GeoComplex>, v: usize) -> Result<Arc<GeoComplex>> {
    let tops: Vec<Simplex> = k.top_simplices().iter().filter(|t| !t.contains(&v)).cloned().collect();
    k.subcomplex(&tops)
}

/// `λ(¼(1 − 2y); x) + λ(¼(2x − 1); y)`, integrating to one around the square.
pub fn loop_form(k: &Arc<GeoComplex>) -> Result<PAForm> {
    let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
    let g = Poly::one(2).sub(&y.scale(&q(2))).scale(&qr(1, 4));
    let h = x.scale(&q(2)).sub(&Poly::one(2)).scale(&qr(1, 4));
    let poly = |p: Poly| SAFunction::polynomial(k, p);
    lam(k, vec![poly(g), poly(x)]).add(&lam(k, vec![poly(h), poly(y)]))
}

/// The square boundary traversed counterclockwise.
pub fn square_loop() -> Chain {
    let k = square_boundary();
    let edge = |a: usize, b: usize| Simplex::new(vec![a, b]);
    Chain::combination(&k, 1, vec![(edge(0, 1), 1), (edge(1, 2), 1), (edge(2, 3), 1), (edge(0, 3), -1)])
}

/// Sequence residuals, slice Betti numbers, the loop pairing, and gluing of a
/// compatible pair that is not a restriction of one slice form.
pub fn square_cover_suite() -> Result<Vec<Check>> {
    let x = barycentric_subdivision(&square_boundary()).complex;
    let top_mid = vertex_at(&x, &[qr(1, 2), q(1)]);
    let bottom_mid = vertex_at(&x, &[qr(1, 2), q(0)]);
    let (a1, a2) = (part_without(&x, top_mid)?, part_without(&x, bottom_mid)?);
    let alpha = loop_form(&x)?;
    let mut gens: Vec<PAForm> = (0..x.num_vertices()).map(|v| hat(&x, v)).collect();
    gens.push(alpha.clone());
    let report = mayer_vietoris(&a1, &a2, &GeneratedComplexSlice::new(&x, &x, gens)?)?;

    let cover = Cover::new(&x, &a1, &a2)?;
    let bump = hat(&x, bottom_mid).restrict_to(&a1)?;
    let glued = cover.glue(&[bump.clone(), PAForm::zero(&a2, 0)])?;
    let mut bump_gap = 0.0f64;
    for v in a1.simplices_of_dim(0) {
        let probe = Chain::simplex(&a1, &OrientedSimplex::positive(v.clone()));
        bump_gap = bump_gap.max((glued.pair(&probe)? - bump.pair(&probe)?).abs());
    }
    let [r1, r2] = cover.restrict(&alpha)?;
    let reglued = cover.glue(&[r1, r2])?;
    let mut loop_gap = 0.0f64;
    for e in &simplex_probes(&x)[1] {
        loop_gap = loop_gap.max((reglued.pair(e)? - alpha.pair(e)?).abs());
    }

    let betti = |i: usize, d: usize| report.betti[i].get(d).copied().unwrap_or(0) as f64;
    Ok(vec![
        Check::at_most("difference_of_restrictions", report.difference_residual, DIFFERENCE_TOLERANCE),
        Check::at_most("surjectivity_witness", report.witness_residual, WITNESS_TOLERANCE),
        Check::at_most("gluing", report.gluing_residual, GLUING_TOLERANCE),
        Check::at_most("gluing_a_bump", bump_gap, GLUING_TOLERANCE),
        Check::at_most("gluing_the_loop_form", loop_gap, GLUING_TOLERANCE),
        Check::equals("restriction_injective", f64::from(u8::from(report.injective())), 1.0),
        Check::equals("euler_defect", report.euler_defect() as f64, 0.0),
        Check::equals("betti_0", betti(0, 0), 1.0),
        Check::equals("betti_1", betti(0, 1), 1.0),
        Check::equals("intersection_betti_0", betti(3, 0), 2.0),
        Check::new("loop_pairing", alpha.pair(&square_loop())?, Bound::Within { expected: 1.0, tolerance: LOOP_TOLERANCE }),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_cover_sequence_is_exact() {
        for c in square_cover_suite().unwrap() {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
