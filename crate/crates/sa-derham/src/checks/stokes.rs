//! `⟨δμ, γ⟩ = ⟨μ, ∂γ⟩` on seeded minimal forms and chains.

use std::sync::Arc;

use rand::Rng;

use super::{Bound, Check};
use crate::complex::GeoComplex;
use crate::error::Result;
use crate::function::SAFunction;
use crate::minimal::MinimalForm;
use crate::poly::Poly;
use crate::random::{random_chain, random_complex, random_minimal, random_poly, seeded, SeededRng};
use crate::ratfn::RatFn;

pub const POLYNOMIAL_TOLERANCE: f64 = 1e-9;
pub const RATIONAL_TOLERANCE: f64 = 1e-7;

/// `p / (1 + Σ xᵢ²)` on every top simplex.
fn rational_function(rng: &mut SeededRng, k: &Arc<GeoComplex>) -> Result<SAFunction> {
    let n = k.ambient_dim();
    let den = (0..n).fold(Poly::one(n), |acc, i| acc.add(&Poly::var(n, i).mul(&Poly::var(n, i))));
    let f = RatFn::new(random_poly(rng, n, 2), den);
    SAFunction::piecewise(k, k.top_simplices().iter().map(|s| (s.clone(), f.clone())).collect())
}

/// `|⟨δμ, γ⟩ − ⟨μ, ∂γ⟩|` and `|⟨δμ, γ⟩|` for one seeded case.
fn stokes_case(rng: &mut SeededRng, rational: bool) -> Result<(f64, f64)> {
    let dim = rng.gen_range(1..=3);
    let k = random_complex(rng, dim);
    let degree = rng.gen_range(0..dim);
    let mut mu = random_minimal(rng, &k, degree, 3, 2);
    if rational {
        let mut fs: Vec<SAFunction> = (0..=degree).map(|_| SAFunction::polynomial(&k, random_poly(rng, k.ambient_dim(), 2))).collect();
        let slot = rng.gen_range(0..=degree);
        fs[slot] = rational_function(rng, &k)?;
        mu = mu.add(&MinimalForm::generator(&k, fs));
    }
    let gamma = random_chain(rng, &k, degree + 1, 3);
    let lhs = mu.coboundary().pair(&gamma)?;
    let rhs = mu.pair(&gamma.boundary())?;
    Ok(((lhs - rhs).abs(), lhs.abs()))
}

/// Worst Stokes residual over `polynomial` cases with polynomial generators
/// and `rational` cases with one rational generator.
pub fn stokes_suite(seed: u64, polynomial: usize, rational: usize) -> Result<Vec<Check>> {
    let mut rng = seeded(seed);
    let mut worst = [0.0f64; 2];
    let mut nonzero = 0usize;
    for i in 0..polynomial + rational {
        let is_rational = i >= polynomial;
        let (residual, size) = stokes_case(&mut rng, is_rational)?;
        worst[is_rational as usize] = worst[is_rational as usize].max(residual);
        if size > 1e-6 {
            nonzero += 1;
        }
    }
    Ok(vec![
        Check::at_most("polynomial_residual", worst[0], POLYNOMIAL_TOLERANCE),
        Check::at_most("rational_residual", worst[1], RATIONAL_TOLERANCE),
        Check::new("nonzero_pairings", nonzero as f64, Bound::AtLeast(((polynomial + rational) / 2) as f64)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stokes_holds_on_seeded_cases() {
        for c in stokes_suite(11, 30, 6).unwrap() {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
