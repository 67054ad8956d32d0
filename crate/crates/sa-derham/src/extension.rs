//! Extending compatible forms from the faces of a corner or a simplex to the
//! whole cell.
//!
//! Both cells are realized on the standard simplex with vertices `0, e₁, …, eₙ`.
//! The corner face `i` is `{xᵢ = 0}`, opposite vertex `i`; the simplex face `p`
//! is `{t_p = 0}` for the barycentric coordinate `t_p`, again opposite vertex `p`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cohomology::simplex_probes;
use crate::complex::{standard_simplex, GeoComplex, Simplex};
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::minimal::MinimalForm;
use crate::pa::PAForm;
use crate::poly::Poly;
use crate::rational::Q;

/// Largest pairing mismatch on a shared face accepted as compatible.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// The face of the standard simplex `k` spanned by all vertices except `omit`.
pub fn face(k: &Arc<GeoComplex>, omit: &[usize]) -> Result<Arc<GeoComplex>> {
    let kept: Vec<usize> = (0..k.num_vertices()).filter(|v| !omit.contains(v)).collect();
    k.subcomplex(&[Simplex::new(kept)])
}

/// Barycentric coordinate `t_v` of the standard simplex as a polynomial in `x`.
fn barycentric(n: usize, v: usize) -> Poly {
    if v == 0 {
        Poly::affine(Q::one(), &vec![-Q::one(); n])
    } else {
        Poly::var(n, v - 1)
    }
}

fn barycentric_value(p: &[Q], v: usize) -> Q {
    if v == 0 {
        p.iter().fold(Q::one(), |acc, c| acc - c)
    } else {
        p[v - 1].clone()
    }
}

/// Checks shapes, that each form lives on its face (opposite `vertex`), and
/// that the forms agree on pairwise intersections.
fn check_faces(k: &Arc<GeoComplex>, forms: &[(usize, &PAForm)]) -> Result<usize> {
    let n = k.ambient_dim();
    let degree = forms.first().map_or(0, |(_, f)| f.degree());
    for (v, f) in forms {
        if f.degree() != degree {
            return Err(Error::DegreeMismatch("face forms of different degrees".into()));
        }
        if f.base().ambient_dim() != n {
            return Err(Error::DimensionMismatch(format!("face form lives in dimension {}", f.base().ambient_dim())));
        }
        let base = f.base();
        let mut used = base.simplices_of_dim(0).map(|s| base.vertex(s.vertices()[0]));
        if used.any(|p| !barycentric_value(p, *v).is_zero()) {
            return Err(Error::IncompatibleInputs(format!("form {v} does not live on its face")));
        }
    }
    // On a segment the faces are disjoint points.
    let pairs_meet = k.num_vertices() > 2;
    for (a, (va, fa)) in forms.iter().enumerate().filter(|_| pairs_meet) {
        for (vb, fb) in &forms[a + 1..] {
            let shared = face(k, &[*va, *vb])?;
            let probes = simplex_probes(&shared);
            let (ra, rb) = (fa.restrict_to(&shared)?, fb.restrict_to(&shared)?);
            for g in probes.get(degree).into_iter().flatten() {
                let gap = (ra.pair(g)? - rb.pair(g)?).abs();
                if gap > COMPATIBILITY_TOL {
                    return Err(Error::IncompatibleInputs(format!(
                        "faces {va} and {vb} disagree by {gap:.3e} on their intersection"
                    )));
                }
            }
        }
    }
    Ok(degree)
}

/// `Σ_{∅≠I} (−1)^{|I|−1} pr_I* αᵢ` with `i = min I` and `pr_I` zeroing the
/// coordinates in `I`. `alphas[j]` lives on the face `{x_{j+1} = 0}`.
fn corner_sum(k: &Arc<GeoComplex>, alphas: &[PAForm], degree: usize) -> Result<PAForm> {
    let n = alphas.len();
    let mut total = PAForm::zero(k, degree);
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let components = (0..n)
            .map(|j| if members.contains(&j) { SAFunction::constant(k, Q::zero()) } else { SAFunction::coordinate(k, j) })
            .collect();
        let term = alphas[members[0]].pullback(&SAMap::new(k, components))?;
        total = if members.len() % 2 == 1 { total.add(&term)? } else { total.sub(&term)? };
    }
    Ok(total)
}

/// A form on the corner `{xᵢ ≥ 0, Σxᵢ ≤ 1} ⊂ ℝⁿ` restricting to `alphas[i−1]`
/// on each face `{xᵢ = 0}`.
pub fn extend_corner(alphas: &[PAForm]) -> Result<PAForm> {
    if alphas.is_empty() {
        return Err(Error::IncompatibleInputs("a corner needs at least one face".into()));
    }
    let k = standard_simplex(alphas.len());
    let indexed: Vec<(usize, &PAForm)> = alphas.iter().enumerate().map(|(j, a)| (j + 1, a)).collect();
    let degree = check_faces(&k, &indexed)?;
    corner_sum(&k, alphas, degree)
}

/// A form on the standard simplex restricting to `betas[p]` on each face
/// `{t_p = 0}`.
///
/// Uses `Σ_p t_p · π_p*(α^p)` where `π_p` forgets `t_p`, identifying the
/// simplex with a corner whose faces are the remaining faces of the simplex,
/// and `α^p` extends the transported face forms over that corner.
pub fn extend_simplex(betas: &[PAForm]) -> Result<PAForm> {
    let n = betas.len().checked_sub(1).ok_or_else(|| Error::IncompatibleInputs("no faces given".into()))?;
    if n == 0 {
        return Err(Error::IncompatibleInputs("a point has no faces to extend from".into()));
    }
    let k = standard_simplex(n);
    let indexed: Vec<(usize, &PAForm)> = betas.iter().enumerate().collect();
    let degree = check_faces(&k, &indexed)?;
    let mut total = PAForm::zero(&k, degree);
    for p in 0..=n {
        // π_p: x ↦ (t_0, …, t̂_p, …, t_n).
        let forget = SAMap::new(
            &k,
            (0..=n).filter(|&j| j != p).map(|j| SAFunction::polynomial(&k, barycentric(n, j))).collect(),
        );
        let mut transported = Vec::with_capacity(n);
        for i in 1..=n {
            let corner_face = face(&k, &[i])?;
            let source = if i <= p { i - 1 } else { i };
            transported.push(betas[source].pullback(&restore(&corner_face, n, p))?);
        }
        let corner = corner_sum(&k, &transported, degree)?;
        let weight = PAForm::from_minimal(&MinimalForm::generator(&k, vec![SAFunction::polynomial(&k, barycentric(n, p))]));
        total = total.add(&weight.wedge(&corner.pullback(&forget)?)?)?;
    }
    Ok(total)
}

/// `π_p⁻¹` on a piece of the corner: `s ↦ x` with `t_p = 1 − Σs` reinserted.
fn restore(domain: &Arc<GeoComplex>, n: usize, p: usize) -> Arc<SAMap> {
    let s = |j: usize| Poly::var(n, j);
    let t = |j: usize| -> Poly {
        match j.cmp(&p) {
            std::cmp::Ordering::Less => s(j),
            std::cmp::Ordering::Equal => Poly::affine(Q::one(), &vec![-Q::one(); n]),
            std::cmp::Ordering::Greater => s(j - 1),
        }
    };
    SAMap::new(domain, (1..=n).map(|j| SAFunction::polynomial(domain, t(j))).collect())
}

/// Largest `|⟨form|_F, γ⟩ − ⟨target, γ⟩|` over the simplices `γ` of each face
/// `F` opposite the given vertex.
pub fn restriction_gap(form: &PAForm, faces: &[(usize, PAForm)]) -> Result<f64> {
    let k = form.base();
    let mut worst = 0.0f64;
    for (v, target) in faces {
        let f = face(k, &[*v])?;
        let restricted = form.restrict_to(&f)?;
        for g in simplex_probes(&f).get(form.degree()).map_or(&[][..], Vec::as_slice) {
            worst = worst.max((restricted.pair(g)? - target.pair(g)?).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn lam(k: &Arc<GeoComplex>, fs: Vec<Poly>) -> PAForm {
        PAForm::from_minimal(&MinimalForm::generator(k, fs.into_iter().map(|p| SAFunction::polynomial(k, p)).collect()))
    }

    fn global_one_form(n: usize, k: &Arc<GeoComplex>) -> PAForm {
        let x = |i: usize| Poly::var(n, i % n);
        lam(k, vec![x(0).add(&x(1)), x(n - 1)]).add(&lam(k, vec![Poly::one(n), x(0).mul(&x(1))])).unwrap()
    }

    #[test]
    fn zero_faces_extend_to_zero() {
        let k = standard_simplex(2);
        let faces: Vec<PAForm> = (1..=2).map(|i| PAForm::zero(&face(&k, &[i]).unwrap(), 1)).collect();
        assert!(extend_corner(&faces).unwrap().is_structurally_zero());
        let faces: Vec<PAForm> = (0..=2).map(|p| PAForm::zero(&face(&k, &[p]).unwrap(), 1)).collect();
        assert!(extend_simplex(&faces).unwrap().is_structurally_zero());
    }

    #[test]
    fn constant_faces_extend_to_the_constant() {
        let k = standard_simplex(2);
        let c = qr(3, 2);
        let constant = |v: usize| lam(&face(&k, &[v]).unwrap(), vec![Poly::constant(2, c.clone())]);
        let corner = extend_corner(&[constant(1), constant(2)]).unwrap();
        let simplex = extend_simplex(&[constant(0), constant(1), constant(2)]).unwrap();
        for form in [corner, simplex] {
            for g in &simplex_probes(form.base())[0] {
                assert!((form.pair(g).unwrap() - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_restrictions_in_the_plane() {
        let k = standard_simplex(2);
        let (x1, x2) = (Poly::var(2, 0), Poly::var(2, 1));
        let a1 = lam(&face(&k, &[1]).unwrap(), vec![Poly::one(2), x2.clone()]);
        let a2 = lam(&face(&k, &[2]).unwrap(), vec![x1.clone(), x1.mul(&x1)]);
        let alpha = extend_corner(&[a1.clone(), a2.clone()]).unwrap();
        assert!(restriction_gap(&alpha, &[(1, a1), (2, a2)]).unwrap() <= 1e-9);
    }

    #[test]
    fn corner_restrictions_in_space() {
        let k = standard_simplex(3);
        let omega = global_one_form(3, &k);
        let faces: Vec<(usize, PAForm)> =
            (1..=3).map(|i| (i, omega.restrict_to(&face(&k, &[i]).unwrap()).unwrap())).collect();
        let inputs: Vec<PAForm> = faces.iter().map(|(_, f)| f.clone()).collect();
        let alpha = extend_corner(&inputs).unwrap();
        assert!(restriction_gap(&alpha, &faces).unwrap() <= 1e-9);
    }

    #[test]
    fn incompatible_faces_are_rejected() {
        let k = standard_simplex(2);
        let a1 = lam(&face(&k, &[1]).unwrap(), vec![Poly::constant(2, q(1))]);
        let a2 = lam(&face(&k, &[2]).unwrap(), vec![Poly::constant(2, q(2))]);
        assert!(matches!(extend_corner(&[a1, a2]), Err(Error::IncompatibleInputs(_))));
    }

    #[test]
    fn form_off_its_face_is_rejected() {
        let k = standard_simplex(2);
        let a = lam(&k, vec![Poly::one(2)]);
        assert!(matches!(extend_corner(&[a.clone(), a]), Err(Error::IncompatibleInputs(_))));
    }

    #[test]
    fn simplex_restrictions_from_polynomial_forms() {
        let k = standard_simplex(2);
        let faces: Vec<(usize, PAForm)> = (0..=2)
            .map(|p| {
                let f = face(&k, &[p]).unwrap();
                let t = Poly::var(2, p % 2);
                let mu = MinimalForm::from_apl(&f, 1, vec![(t.mul(&t).add(&Poly::constant(2, q(p as i64))), vec![(p + 1) % 2])]).unwrap();
                (p, PAForm::from_minimal(&mu))
            })
            .collect();
        let inputs: Vec<PAForm> = faces.iter().map(|(_, f)| f.clone()).collect();
        let beta = extend_simplex(&inputs).unwrap();
        assert!(restriction_gap(&beta, &faces).unwrap() <= 1e-9);
    }

    #[test]
    fn simplex_restrictions_in_space() {
        let k = standard_simplex(3);
        let omega = global_one_form(3, &k);
        let faces: Vec<(usize, PAForm)> =
            (0..=3).map(|p| (p, omega.restrict_to(&face(&k, &[p]).unwrap()).unwrap())).collect();
        let inputs: Vec<PAForm> = faces.iter().map(|(_, f)| f.clone()).collect();
        let beta = extend_simplex(&inputs).unwrap();
        assert!(restriction_gap(&beta, &faces).unwrap() <= 1e-9);
    }

    #[test]
    fn extension_is_linear() {
        let k = standard_simplex(2);
        let (x1, x2) = (Poly::var(2, 0), Poly::var(2, 1));
        let first = lam(&k, vec![x1.clone(), x2.clone()]);
        let second = lam(&k, vec![x2.mul(&x2), x1.clone()]);
        let on_faces = |form: &PAForm| -> Vec<PAForm> { (0..=2).map(|p| form.restrict_to(&face(&k, &[p]).unwrap()).unwrap()).collect() };
        let combined = first.add(&second.scale(&q(2))).unwrap();
        let lhs = extend_simplex(&on_faces(&combined)).unwrap();
        let (a, b) = (extend_simplex(&on_faces(&first)).unwrap(), extend_simplex(&on_faces(&second)).unwrap());
        for g in &simplex_probes(lhs.base())[1] {
            let expected = a.pair(g).unwrap() + 2.0 * b.pair(g).unwrap();
            assert!((lhs.pair(g).unwrap() - expected).abs() <= 1e-9);
        }
    }
}
