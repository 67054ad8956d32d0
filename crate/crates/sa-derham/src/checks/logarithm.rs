//! The closed 1-form `dt/t` on `[1, 2]`: its integral and its class in a
//! slice of polynomial forms of degree at most six.

use std::sync::Arc;

use super::{Bound, Check};
use crate::chain::Chain;
use crate::cohomology::{cohomology_ranks, GeneratedComplexSlice};
use crate::complex::{interval, subdivided_interval, GeoComplex};
use crate::error::Result;
use crate::function::SAFunction;
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::rational::q;

pub const LOG_TOLERANCE: f64 = 1e-8;
pub const SLICE_DEGREE: u32 = 6;
pub const SLICE_EDGES: usize = 8;

/// `λ(1/t; t)` on a complex in `ℝ¹` away from the origin.
pub fn log_form(k: &Arc<GeoComplex>) -> Result<MinimalForm> {
    let t = Poly::var(1, 0);
    let reciprocal = RatFn::new(Poly::one(1), t);
    let f0 = SAFunction::piecewise(k, k.top_simplices().iter().map(|s| (s.clone(), reciprocal.clone())).collect())?;
    Ok(MinimalForm::generator(k, vec![f0, SAFunction::coordinate(k, 0)]))
}

/// `⟨λ(1/t; t), [1, 2]⟩` against `ln 2`, and the Betti numbers of the slice
/// spanned by `t⁰, …, t⁶`, their coboundaries and `dt/t` on a subdivided `[1, 2]`.
pub fn logarithm_suite() -> Result<Vec<Check>> {
    let whole = interval(q(1), q(2));
    let integral = log_form(&whole)?.pair(&Chain::fundamental(&whole)?)?;

    let base = subdivided_interval(q(1), q(2), SLICE_EDGES);
    let t = Poly::var(1, 0);
    let mut generators: Vec<PAForm> = (0..=SLICE_DEGREE)
        .map(|j| PAForm::from_minimal(&MinimalForm::generator(&base, vec![SAFunction::polynomial(&base, t.pow(j))])))
        .collect();
    generators.push(PAForm::from_minimal(&log_form(&base)?));
    let report = cohomology_ranks(&GeneratedComplexSlice::new(&base, &base, generators)?)?;
    let betti = report.betti();
    Ok(vec![
        Check::new("log_integral", integral, Bound::Within { expected: std::f64::consts::LN_2, tolerance: LOG_TOLERANCE }),
        Check::equals("betti_0", betti[0] as f64, 1.0),
        Check::equals("betti_1", betti[1] as f64, 1.0),
        Check::equals("rank_warnings", report.warnings.len() as f64, 0.0),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_form_integrates_to_ln2_and_is_not_exact() {
        for c in logarithm_suite().unwrap() {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
