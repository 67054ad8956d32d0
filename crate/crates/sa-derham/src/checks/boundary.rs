//! `∂∂ = 0` on seeded chains, including products and pushforwards.

use rand::Rng;

use super::{Bound, Check};
use crate::chain::Chain;
use crate::random::{random_chain, random_complex, seeded, SeededRng};

fn random_case(rng: &mut SeededRng, max_dim: usize) -> Chain {
    let dim = rng.gen_range(1..=max_dim);
    let k = random_complex(rng, dim);
    let degree = rng.gen_range(dim.min(2)..=dim);
    let chain = random_chain(rng, &k, degree, 4);
    if dim < max_dim && rng.gen_bool(0.25) {
        let other_dim = rng.gen_range(1..=max_dim - dim);
        let other = random_complex(rng, other_dim);
        let other_degree = rng.gen_range(0..=other_dim);
        return chain.cross(&random_chain(rng, &other, other_degree, 2));
    }
    chain
}

/// Terms left in `∂∂γ` summed over `count` chains of dimension at most
/// `max_dim`, and how many of the chains had degree two or more.
pub fn boundary_suite(seed: u64, count: usize, max_dim: usize) -> Vec<Check> {
    let mut rng = seeded(seed);
    let mut leftover = 0usize;
    let mut nontrivial = 0usize;
    for _ in 0..count {
        let chain = random_case(&mut rng, max_dim);
        if chain.degree() >= 2 && !chain.boundary().is_zero() {
            nontrivial += 1;
        }
        leftover += chain.boundary().boundary().terms().len();
    }
    vec![
        Check::equals("boundary_of_boundary_terms", leftover as f64, 0.0),
        Check::new("chains_with_nonzero_boundary", nontrivial as f64, Bound::AtLeast((count / 4) as f64)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_squares_to_zero() {
        for c in boundary_suite(3, 60, 4) {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
