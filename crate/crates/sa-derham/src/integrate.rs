//! `∫_{map_*⟦σ⟧} f₀ df₁ ∧ ⋯ ∧ df_k` for a single chain term.

use crate::chain::ChainTerm;
use crate::error::Result;
use std::sync::Arc;

use crate::function::{Chart, MapMemo, Region, Resolver, SAFunction, Step};
use crate::quadrature::{det_f64, integrate_simplex, rule, Adaptive};
use crate::ratfn::RatFn;
use crate::rational::to_f64;

/// Integral of the generator `(f₀, …, f_k)` over one term, without its coefficient.
pub fn integrate_term(term: &ChainTerm, generator: &[SAFunction], adaptive: &Adaptive) -> Result<f64> {
    let k = term.simplex.dim();
    assert_eq!(generator.len(), k + 1, "generator length must be degree + 1");
    if generator[0].is_zero() || generator[1..].iter().any(|f| f.as_constant().is_some()) {
        return Ok(0.0);
    }
    let base = Chart::simplex(&term.source, &term.simplex);
    let mut stack = vec![(Region::reference(k), Arc::new(MapMemo::new()))];
    let mut total = 0.0;
    'regions: while let Some((region, memo)) = stack.pop() {
        let mut resolver = Resolver::with_memo(&region, Arc::unwrap_or_clone(memo));
        let chart = if term.map.is_identity() {
            base.clone()
        } else {
            match resolver.map(&term.map, &base)? {
                Step::Value(c) => c,
                Step::Split(parts) => {
                    let memo = Arc::new(resolver.into_memo());
                    stack.extend(parts.into_iter().map(|r| (r, memo.clone())));
                    continue;
                }
            }
        };
        let mut values = Vec::with_capacity(k + 1);
        for f in generator {
            match resolver.function(f, &chart)? {
                Step::Value(v) => values.push(v),
                Step::Split(parts) => {
                    let memo = Arc::new(resolver.into_memo());
                    stack.extend(parts.into_iter().map(|r| (r, memo.clone())));
                    continue 'regions;
                }
            }
        }
        total += integrate_region(&region, &values, adaptive)?;
    }
    Ok(total)
}

/// `∫_region g₀ det(∂gᵢ/∂s_j) ds` for rational functions of the parameters.
pub fn integrate_region(region: &Region, values: &[RatFn], adaptive: &Adaptive) -> Result<f64> {
    let k = region.dim();
    if values[0].num().is_zero() || values[1..].iter().any(|v| v.as_constant().is_some()) {
        return Ok(0.0);
    }
    let vertices: Vec<Vec<f64>> = region.vertices.iter().map(|p| p.iter().map(to_f64).collect()).collect();
    let compiled: Vec<_> = values.iter().map(RatFn::compile).collect();
    let mut grad = vec![0.0; k];
    let integrand = |s: &[f64]| {
        let f0 = compiled[0].eval(s);
        if k == 0 {
            return f0;
        }
        let jac: Vec<Vec<f64>> = compiled[1..]
            .iter()
            .map(|c| {
                c.eval_grad(s, &mut grad);
                grad.clone()
            })
            .collect();
        f0 * det_f64(jac)
    };
    if values.iter().all(RatFn::is_poly) {
        let degree = values[0].degree() + values[1..].iter().map(|v| v.degree().saturating_sub(1)).sum::<u32>();
        Ok(integrate_simplex(&vertices, &rule(k, degree), integrand))
    } else {
        adaptive.integrate(&vertices, integrand)
    }
}
