//! Primitives of closed forms on the standard 3-simplex through a star plan
//! and a greedy collapse plan.

use std::sync::Arc;

use super::Check;
use crate::chain::Chain;
use crate::cohomology::{cohomology_ranks, simplex_probes, GeneratedComplexSlice};
use crate::complex::{find_collapse, standard_simplex, GeoComplex, Simplex, DEFAULT_COLLAPSE_BUDGET};
use crate::error::Result;
use crate::function::SAFunction;
use crate::homotopy::{collapse_plan, poincare_primitive, primitive_residual, star_shaped_plan, CollapseHomotopyPlan};
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::{compositions, Poly};
use crate::rational::Q;
use num_traits::One;

pub const PRIMITIVE_TOLERANCE: f64 = 1e-7;

fn lam(k: &Arc<GeoComplex>, polys: Vec<Poly>) -> PAForm {
    PAForm::from_minimal(&MinimalForm::generator(k, polys.into_iter().map(|p| SAFunction::polynomial(k, p)).collect()))
}

fn monomials(nvars: usize, degrees: std::ops::RangeInclusive<u32>) -> Vec<Poly> {
    degrees.flat_map(|d| compositions(d, nvars)).map(|e| Poly::from_terms(nvars, [(e, Q::one())])).collect()
}

/// `λ(1; m, x_I)` for monomials `m` of degree 1 to 3 and increasing index
/// lists `I` of length `degree − 1`.
pub fn closed_forms(k: &Arc<GeoComplex>, degree: usize) -> Vec<PAForm> {
    let n = k.ambient_dim();
    let index_sets: Vec<Vec<usize>> = Simplex::new((0..n).collect())
        .faces()
        .into_iter()
        .filter(|f| f.len() == degree - 1)
        .map(|f| f.to_vec())
        .chain((degree == 1).then(Vec::new))
        .collect();
    let mut out = Vec::new();
    for m in monomials(n, 1..=3) {
        for set in &index_sets {
            let slots = std::iter::once(m.clone()).chain(set.iter().map(|&i| Poly::var(n, i)));
            out.push(lam(k, std::iter::once(Poly::one(n)).chain(slots).collect()));
        }
    }
    out
}

fn plans(k: &Arc<GeoComplex>) -> Result<Vec<(&'static str, CollapseHomotopyPlan)>> {
    let target = k.subcomplex(&[Simplex::new(vec![0])])?;
    let greedy = collapse_plan(&find_collapse(k, &target, DEFAULT_COLLAPSE_BUDGET)?)?;
    Ok(vec![("star", star_shaped_plan(k, 0)?), ("collapse", greedy)])
}

/// Worst `|⟨δβ + α, γ⟩|` per plan and degree, the number of forms per degree,
/// and the rank of `H⁰` on a slice of polynomial 0-forms.
pub fn poincare_suite() -> Result<Vec<Check>> {
    let k = standard_simplex(3);
    let probes: Vec<Chain> = simplex_probes(&k).into_iter().flatten().collect();
    let mut checks = Vec::new();
    let forms: Vec<Vec<PAForm>> = (1..=3).map(|d| closed_forms(&k, d)).collect();
    for (d, fs) in forms.iter().enumerate() {
        checks.push(Check::equals(format!("closed_forms_degree_{}", d + 1), fs.len() as f64, [19.0, 57.0, 57.0][d]));
    }
    for (name, plan) in plans(&k)? {
        plan.validate()?;
        for (d, fs) in forms.iter().enumerate() {
            let mut worst = 0.0f64;
            for alpha in fs {
                let beta = poincare_primitive(alpha, &plan)?;
                worst = worst.max(primitive_residual(alpha, &beta, &probes)?);
            }
            checks.push(Check::at_most(format!("{name}_residual_degree_{}", d + 1), worst, PRIMITIVE_TOLERANCE));
        }
    }
    let zero_forms = monomials(3, 0..=3).into_iter().map(|m| lam(&k, vec![m])).collect();
    let report = cohomology_ranks(&GeneratedComplexSlice::new(&k, &k, zero_forms)?)?;
    checks.push(Check::equals("betti_0", report.betti()[0] as f64, 1.0));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_counts() {
        let k = standard_simplex(3);
        assert_eq!([1, 2, 3].map(|d| closed_forms(&k, d).len()), [19, 57, 57]);
    }

    #[test]
    fn primitives_on_the_triangle_slice() {
        let k = standard_simplex(2);
        let probes: Vec<Chain> = simplex_probes(&k).into_iter().flatten().collect();
        for (_, plan) in plans(&k).unwrap() {
            for alpha in closed_forms(&k, 2).iter().step_by(3) {
                let beta = poincare_primitive(alpha, &plan).unwrap();
                assert!(primitive_residual(alpha, &beta, &probes).unwrap() < PRIMITIVE_TOLERANCE);
            }
        }
    }
}
