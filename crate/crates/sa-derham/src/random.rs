//! Seeded generators for complexes, chains, polynomials and forms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::Chain;
use crate::complex::{barycentric_subdivision, staircase_product, standard_simplex, GeoComplex, OrientedSimplex, Simplex};
use crate::function::{SAFunction, SAMap};
use crate::minimal::MinimalForm;
use crate::poly::{compositions, Poly};
use crate::rational::{qr, Q};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard simplex, its barycentric subdivision, or a product of two smaller
/// standard simplices, of the given dimension.
pub fn random_complex(rng: &mut SeededRng, dim: usize) -> Arc<GeoComplex> {
    match rng.gen_range(0..3) {
        0 if dim <= 3 => barycentric_subdivision(&standard_simplex(dim)).complex,
        1 if dim >= 2 => {
            let left = rng.gen_range(1..dim);
            staircase_product(&standard_simplex(left), &standard_simplex(dim - left)).complex.clone()
        }
        _ => standard_simplex(dim),
    }
}

/// Small rational in `[−2, 2]` with denominator at most 4.
pub fn random_rational(rng: &mut SeededRng) -> Q {
    let den = rng.gen_range(1..=4);
    qr(rng.gen_range(-2 * den..=2 * den), den)
}

/// Polynomial of total degree at most `degree` with a few random terms.
pub fn random_poly(rng: &mut SeededRng, nvars: usize, degree: u32) -> Poly {
    let mut exponents: Vec<Vec<u32>> = (0..=degree).flat_map(|d| compositions(d, nvars)).collect();
    exponents.shuffle(rng);
    let count = rng.gen_range(1..=exponents.len().min(4));
    Poly::from_terms(nvars, exponents.into_iter().take(count).map(|e| (e, random_rational(rng))))
}

/// A point in the relative interior of a simplex of `k`, with rational
/// barycentric weights.
pub fn random_point(rng: &mut SeededRng, k: &GeoComplex, s: &Simplex) -> Vec<Q> {
    let weights: Vec<i64> = s.iter().map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    let mut p = vec![Q::from_integer(0.into()); k.ambient_dim()];
    for (&v, &w) in s.iter().zip(&weights) {
        for (c, x) in p.iter_mut().zip(k.vertex(v)) {
            *c += x * qr(w, total);
        }
    }
    p
}

/// A `degree`-simplex mapped affinely into a random top simplex of `k`, with
/// vertices at random interior points.
pub fn random_inner_simplex(rng: &mut SeededRng, k: &Arc<GeoComplex>, degree: usize) -> Chain {
    let tops: Vec<&Simplex> = k.top_simplices().iter().filter(|t| t.dim() >= degree).collect();
    let top = tops.choose(rng).expect("complex has a simplex of the requested dimension");
    let images: Vec<Vec<Q>> = (0..=degree).map(|_| random_point(rng, k, top)).collect();
    let source = standard_simplex(degree);
    let map = SAMap::pl(&source, &images);
    Chain::mapped(&source, &OrientedSimplex::positive(Simplex::new((0..=degree).collect())), &map)
}

/// Signed combination of `terms` simplices of `k` of the given degree, some of
/// them pushed through inner affine simplices.
pub fn random_chain(rng: &mut SeededRng, k: &Arc<GeoComplex>, degree: usize, terms: usize) -> Chain {
    let simplices: Vec<&Simplex> = k.simplices_of_dim(degree).collect();
    let mut chain = Chain::zero(degree, k.ambient_dim());
    for _ in 0..terms {
        let coeff = *[-2i64, -1, 1, 2, 3].choose(rng).expect("nonempty");
        let part = if simplices.is_empty() || rng.gen_bool(0.3) {
            random_inner_simplex(rng, k, degree)
        } else {
            let s = (*simplices.choose(rng).expect("nonempty")).clone();
            Chain::simplex(k, &OrientedSimplex::positive(s))
        };
        chain = chain.add(&part.scale(coeff));
    }
    chain
}

/// Sum of `terms` generators `λ(f₀; f₁, …, f_k)` with random polynomial
/// functions of degree at most `poly_degree`.
pub fn random_minimal(rng: &mut SeededRng, k: &Arc<GeoComplex>, degree: usize, poly_degree: u32, terms: usize) -> MinimalForm {
    let n = k.ambient_dim();
    let mut form = MinimalForm::zero(k, degree);
    for _ in 0..terms {
        let fs = (0..=degree).map(|_| SAFunction::polynomial(k, random_poly(rng, n, poly_degree))).collect();
        form = form.add(&MinimalForm::generator(k, fs));
    }
    form
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_objects() {
        let (mut a, mut b) = (seeded(7), seeded(7));
        let (ka, kb) = (random_complex(&mut a, 3), random_complex(&mut b, 3));
        assert_eq!(ka.num_simplices(), kb.num_simplices());
        assert_eq!(random_poly(&mut a, 3, 3), random_poly(&mut b, 3, 3));
    }

    #[test]
    fn inner_points_lie_in_their_simplex() {
        let mut rng = seeded(1);
        let k = standard_simplex(2);
        let top = k.top_simplices()[0].clone();
        for _ in 0..20 {
            let p = random_point(&mut rng, &k, &top);
            assert!(k.carrier(&p).is_some());
        }
    }
}
