//! Restriction identities for forms extended from the faces of a corner or
//! a simplex, in dimensions one to three.

use std::sync::Arc;

use super::Check;
use crate::cohomology::simplex_probes;
use crate::complex::{standard_simplex, GeoComplex};
use crate::error::Result;
use crate::extension::{extend_corner, extend_simplex, face, restriction_gap};
use crate::function::SAFunction;
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::rational::{q, qr};

pub const EXTENSION_TOLERANCE: f64 = 1e-9;

fn lam(k: &Arc<GeoComplex>, polys: Vec<Poly>) -> PAForm {
    PAForm::from_minimal(&MinimalForm::generator(k, polys.into_iter().map(|p| SAFunction::polynomial(k, p)).collect()))
}

/// `λ(1 + Σ xᵢxᵢ₊₁; x₀ + x₁², …)` of the given degree on `Δⁿ`.
fn global_form(k: &Arc<GeoComplex>, degree: usize) -> PAForm {
    let n = k.ambient_dim();
    let x = |i: usize| Poly::var(n, i % n);
    let f0 = (0..n).fold(Poly::one(n), |acc, i| acc.add(&x(i).mul(&x(i + 1))));
    let slots = (0..degree).map(|j| x(j).add(&x(j + 1).mul(&x(j + 1))));
    lam(k, std::iter::once(f0).chain(slots).collect())
}

/// Faces opposite `vertices`, each carrying `make(face, vertex)`.
fn on_faces(k: &Arc<GeoComplex>, vertices: impl Iterator<Item = usize>, make: impl Fn(&Arc<GeoComplex>, usize) -> Result<PAForm>) -> Result<Vec<(usize, PAForm)>> {
    vertices.map(|v| Ok((v, make(&face(k, &[v])?, v)?))).collect()
}

fn corner_and_simplex(name: &str, k: &Arc<GeoComplex>, make: impl Fn(&Arc<GeoComplex>, usize) -> Result<PAForm>) -> Result<Vec<Check>> {
    let n = k.ambient_dim();
    let corner = on_faces(k, 1..=n, &make)?;
    let simplex = on_faces(k, 0..=n, &make)?;
    let inputs = |faces: &[(usize, PAForm)]| faces.iter().map(|(_, f)| f.clone()).collect::<Vec<_>>();
    let alpha = extend_corner(&inputs(&corner))?;
    let beta = extend_simplex(&inputs(&simplex))?;
    Ok(vec![
        Check::at_most(format!("corner_{name}_n{n}"), restriction_gap(&alpha, &corner)?, EXTENSION_TOLERANCE),
        Check::at_most(format!("simplex_{name}_n{n}"), restriction_gap(&beta, &simplex)?, EXTENSION_TOLERANCE),
    ])
}

/// `E(a + 2b) − E(a) − 2E(b)` on the simplices of `Δ²` for extensions of
/// restricted global forms.
fn linearity_gap() -> Result<f64> {
    let k = standard_simplex(2);
    let (a, b) = (global_form(&k, 1), lam(&k, vec![Poly::var(2, 1).pow(2), Poly::var(2, 0)]));
    let extend = |form: &PAForm| -> Result<PAForm> {
        let faces = (0..=2).map(|p| form.restrict_to(&face(&k, &[p])?)).collect::<Result<Vec<_>>>()?;
        extend_simplex(&faces)
    };
    let combined = extend(&a.add(&b.scale(&q(2)))?)?;
    let (ea, eb) = (extend(&a)?, extend(&b)?);
    let mut worst = 0.0f64;
    for g in &simplex_probes(combined.base())[1] {
        worst = worst.max((combined.pair(g)? - ea.pair(g)? - 2.0 * eb.pair(g)?).abs());
    }
    Ok(worst)
}

/// Constant 0-forms, restrictions of global forms of every face degree, and
/// top-degree polynomial forms in barycentric coordinates, for `n = 1, 2, 3`.
pub fn extension_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 1..=3 {
        let k = standard_simplex(n);
        checks.extend(corner_and_simplex("constant", &k, |f, _| Ok(lam(f, vec![Poly::constant(n, qr(3, 2))])))?);
        for degree in 0..n {
            let global = global_form(&k, degree);
            checks.extend(corner_and_simplex(&format!("global_degree{degree}"), &k, |f, _| global.restrict_to(f))?);
        }
        if n >= 2 {
            checks.extend(corner_and_simplex("barycentric", &k, |f, v| {
                let t = |i: usize| Poly::var(n, i);
                let p = t(0).mul(&t(n - 1)).add(&Poly::constant(n, q(v as i64 + 1)));
                let mu = MinimalForm::from_apl(f, n - 1, vec![(p, (1..n).collect())])?;
                Ok(PAForm::from_minimal(&mu))
            })?);
        }
    }
    checks.push(Check::at_most("linearity", linearity_gap()?, EXTENSION_TOLERANCE));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_extension_restricts_back() {
        for c in extension_suite().unwrap() {
            assert!(c.pass(), "{} = {} ({})", c.name, c.value, c.bound);
        }
    }
}
