use std::collections::BTreeSet;
use std::sync::Arc;

use super::{SAFunction, SAMap};
use crate::complex::{GeoComplex, SecondDerived, Simplex};
use crate::error::{Error, Result};
use crate::rational::{one, qr, zero, Q};

/// A PL partition of unity subordinate to a two-set cover, with shrunk
/// versions and plateau functions.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    pub derived: SecondDerived,
    /// `ρ₁ + ρ₂ = 1`, `ρᵢ > 0` only on `|Aᵢ|`; vertex values in `{0, 1}`.
    pub rho: [SAFunction; 2],
    /// `φ ∘ ρᵢ`, vanishing wherever `ρᵢ ≤ 1/4`; still sums to one.
    pub shrunk: [SAFunction; 2],
    /// `ψ ∘ ρᵢ`, equal to one wherever the shrunk function is positive and
    /// vanishing wherever `ρᵢ ≤ 1/8`.
    pub plateau: [SAFunction; 2],
}

/// Builds the partition on the second subdivision of `k`.
///
/// A vertex gets `ρ₁ = 0` when it lies on a simplex outside `A1`, `ρ₁ = 1` when
/// it lies on a simplex outside `A2`, and `ρ₁ = 1` otherwise. A vertex touching
/// simplices outside both is a witness that the cover is not excisive.
pub fn pl_partition_of_unity(k: &Arc<GeoComplex>, a1: &GeoComplex, a2: &GeoComplex) -> Result<PartitionOfUnity> {
    for t in k.top_simplices() {
        if !a1.contains(t) && !a2.contains(t) {
            return Err(Error::NotACover);
        }
    }
    let outside = |a: &GeoComplex| -> BTreeSet<Simplex> {
        k.top_simplices().iter().filter(|t| !a.contains(t)).flat_map(|t| t.faces()).collect()
    };
    let (b1, b2) = (outside(a1), outside(a2));
    let derived = SecondDerived::new(k);
    let k2 = derived.complex().clone();
    let mut values = Vec::with_capacity(k2.num_vertices());
    for v in 0..k2.num_vertices() {
        let carrier = derived.base_carrier(&Simplex::new(vec![v]));
        match (b1.contains(&carrier), b2.contains(&carrier)) {
            (true, true) => {
                return Err(Error::NotExcisive(format!(
                    "base simplex {carrier:?} touches simplices outside both sets"
                )))
            }
            (true, false) => values.push(zero()),
            _ => values.push(one()),
        }
    }
    let rho1 = SAFunction::pl(&k2, &values);
    let rho2 = SAFunction::pl(&k2, &values.iter().map(|v| one() - v).collect::<Vec<_>>());
    let step = |a: Q, b: Q| ramp(a, b);
    let (phi, psi) = (step(qr(1, 4), qr(3, 4)), step(qr(1, 8), qr(1, 4)));
    let as_map = |f: &SAFunction| SAMap::new(&k2, vec![f.clone()]);
    let (m1, m2) = (as_map(&rho1), as_map(&rho2));
    Ok(PartitionOfUnity {
        shrunk: [phi.compose(&m1), phi.compose(&m2)],
        plateau: [psi.compose(&m1), psi.compose(&m2)],
        rho: [rho1, rho2],
        derived,
    })
}

/// PL function on `[0, 1]`: zero up to `a`, one from `b`, linear between.
fn ramp(a: Q, b: Q) -> SAFunction {
    let dom = GeoComplex::new_trusted(
        1,
        vec![vec![zero()], vec![a], vec![b], vec![one()]],
        vec![Simplex::new(vec![0, 1]), Simplex::new(vec![1, 2]), Simplex::new(vec![2, 3])],
    );
    SAFunction::pl(&dom, &[zero(), zero(), one(), one()])
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::subdivided_interval;
    use crate::poly::Poly;
    use crate::rational::q;
    use crate::ratfn::RatFn;

    fn interval_cover() -> (Arc<GeoComplex>, Arc<GeoComplex>, Arc<GeoComplex>) {
        let k = subdivided_interval(q(0), q(2), 4);
        let s = |a, b| Simplex::new(vec![a, b]);
        let a1 = k.subcomplex(&[s(0, 1), s(1, 2), s(2, 3)]).unwrap();
        let a2 = k.subcomplex(&[s(1, 2), s(2, 3), s(3, 4)]).unwrap();
        (k, a1, a2)
    }

    #[test]
    fn whole_cover_gives_one_and_zero() {
        let k = subdivided_interval(q(0), q(1), 2);
        let p = pl_partition_of_unity(&k, &k, &k).unwrap();
        assert_eq!(p.rho[0].as_constant(), Some(&one()));
        assert!(p.rho[1].is_zero());
    }

    #[test]
    fn sums_to_one_symbolically_and_respects_supports() {
        let (k, a1, a2) = interval_cover();
        let p = pl_partition_of_unity(&k, &a1, &a2).unwrap();
        let k2 = p.derived.complex().clone();
        for t in k2.top_simplices() {
            let sum = p.rho[0].add(&p.rho[1]).expand_on(t).unwrap();
            assert!(sum.same_as(&RatFn::poly(Poly::one(1))), "{t:?}");
        }
        // ρ₁ vanishes on (3/2, 2], ρ₂ on [0, 1/2).
        for x in [qr(7, 4), q(2), qr(8, 5)] {
            assert_eq!(p.rho[0].value_at(std::slice::from_ref(&x)).unwrap(), zero());
            assert_eq!(p.plateau[0].value_at(&[x]).unwrap(), zero());
        }
        for x in [q(0), qr(1, 4), qr(2, 5)] {
            assert_eq!(p.rho[1].value_at(&[x]).unwrap(), zero());
        }
        // Plateau is one wherever the shrunk function is positive.
        for i in 0..=40 {
            let x = [qr(i, 20)];
            for j in 0..2 {
                if p.shrunk[j].value_at(&x).unwrap() > zero() {
                    assert_eq!(p.plateau[j].value_at(&x).unwrap(), one());
                }
            }
            let s = p.shrunk[0].value_at(&x).unwrap() + p.shrunk[1].value_at(&x).unwrap();
            assert_eq!(s, one());
        }
    }

    #[test]
    fn touching_cover_is_not_excisive() {
        let k = subdivided_interval(q(0), q(2), 2);
        let a1 = k.subcomplex(&[Simplex::new(vec![0, 1])]).unwrap();
        let a2 = k.subcomplex(&[Simplex::new(vec![1, 2])]).unwrap();
        assert!(matches!(pl_partition_of_unity(&k, &a1, &a2), Err(Error::NotExcisive(_))));
        let gap = k.subcomplex(&[Simplex::new(vec![0, 1])]).unwrap();
        assert_eq!(pl_partition_of_unity(&k, &gap, &gap).unwrap_err(), Error::NotACover);
    }

    #[test]
    fn two_arc_cover_of_the_square_boundary() {
        let k = crate::complex::square_boundary();
        let sd = crate::complex::barycentric_subdivision(&k);
        let c = sd.complex.clone();
        // Arcs: everything except the top edge's two halves, and everything except the bottom's.
        let mid = |e: [usize; 2]| sd_vertex(&sd, e);
        let bottom = mid([0, 1]);
        let top = mid([2, 3]);
        let a1: Vec<Simplex> = c.top_simplices().iter().filter(|t| !t.contains(&top)).cloned().collect();
        let a2: Vec<Simplex> = c.top_simplices().iter().filter(|t| !t.contains(&bottom)).cloned().collect();
        let a1 = c.subcomplex(&a1).unwrap();
        let a2 = c.subcomplex(&a2).unwrap();
        let p = pl_partition_of_unity(&c, &a1, &a2).unwrap();
        for t in p.derived.complex().top_simplices() {
            let carrier = p.derived.base_carrier(t);
            for j in 0..2 {
                let a = if j == 0 { &a1 } else { &a2 };
                let piece = p.rho[j].expand_on(t).unwrap();
                if !a.contains(&carrier) {
                    assert!(piece.num().is_zero(), "support of ρ{} leaks onto {carrier:?}", j + 1);
                }
            }
        }
    }

    fn sd_vertex(sd: &crate::complex::Subdivision, e: [usize; 2]) -> usize {
        (0..sd.complex.num_vertices()).find(|&v| sd.origin(v) == &Simplex::new(e.to_vec())).unwrap()
    }
}
