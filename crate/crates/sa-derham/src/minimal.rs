//! Minimal forms: formal sums of generators `λ(f₀; f₁, …, f_k)` that pair with
//! chains by integration of `f₀ df₁ ∧ ⋯ ∧ df_k`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::chain::Chain;
use crate::complex::{staircase_product, GeoComplex};
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::geometry::SimplexFrame;
use crate::integrate::integrate_term;
use crate::poly::Poly;
use crate::quadrature::Adaptive;
use crate::rational::{to_f64, Q};

/// `(coefficient, [f₀, f₁, …, f_k])`.
pub type Term = (Q, Vec<SAFunction>);

#[derive(Clone, Debug)]
pub struct MinimalForm {
    domain: Arc<GeoComplex>,
    degree: usize,
    terms: Vec<Term>,
}

impl MinimalForm {
    pub fn new(domain: &Arc<GeoComplex>, degree: usize, terms: Vec<Term>) -> Self {
        assert!(terms.iter().all(|(_, g)| g.len() == degree + 1), "generator length must be degree + 1");
        MinimalForm { domain: domain.clone(), degree, terms: canonicalize(terms) }
    }

    /// Single generator `λ(f₀; f₁, …, f_k)`.
    pub fn generator(domain: &Arc<GeoComplex>, functions: Vec<SAFunction>) -> Self {
        let k = functions.len().checked_sub(1).expect("a generator needs f₀");
        Self::new(domain, k, vec![(Q::one(), functions)])
    }

    pub fn zero(domain: &Arc<GeoComplex>, degree: usize) -> Self {
        MinimalForm { domain: domain.clone(), degree, terms: Vec::new() }
    }

    /// `Σ P(t) dt_I` on a simplex, `t` the barycentric coordinates of its single top simplex.
    pub fn from_apl(simplex: &Arc<GeoComplex>, degree: usize, terms: Vec<(Poly, Vec<usize>)>) -> Result<Self> {
        let top = match simplex.top_simplices() {
            [t] => t.clone(),
            _ => return Err(Error::InvalidComplex("polynomial forms need a single simplex".into())),
        };
        let frame = SimplexFrame::new(&simplex.points(&top)).ok_or_else(|| Error::InvalidComplex("degenerate simplex".into()))?;
        let n = simplex.ambient_dim();
        let bary: Vec<Poly> = frame.barycentric_functionals().iter().map(|a| Poly::affine(a.c.clone(), &a.lin)).collect();
        let gens = terms
            .into_iter()
            .map(|(p, idx)| {
                if p.nvars() != bary.len() || idx.len() != degree || idx.iter().any(|&i| i >= bary.len()) {
                    return Err(Error::DimensionMismatch("polynomial form does not fit the simplex".into()));
                }
                let mut g = vec![SAFunction::polynomial(simplex, p.compose(&bary, n))];
                g.extend(idx.iter().map(|&i| SAFunction::polynomial(simplex, bary[i].clone())));
                Ok((Q::one(), g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(simplex, degree, gens))
    }

    pub fn domain(&self) -> &Arc<GeoComplex> {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &MinimalForm) -> MinimalForm {
        assert_eq!(self.degree, other.degree, "adding forms of different degrees");
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(&self.domain, self.degree, terms)
    }

    pub fn scale(&self, c: &Q) -> MinimalForm {
        let terms = self.terms.iter().map(|(a, g)| (a * c, g.clone())).collect();
        Self::new(&self.domain, self.degree, terms)
    }

    pub fn neg(&self) -> MinimalForm {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, other: &MinimalForm) -> MinimalForm {
        self.add(&other.neg())
    }

    /// `g·μ`: every leading function multiplied by `g`, a function on the domain.
    pub fn multiply(&self, g: &SAFunction) -> MinimalForm {
        let g = g.on(&self.domain);
        let terms = self
            .terms
            .iter()
            .map(|(a, fs)| {
                let mut fs = fs.clone();
                fs[0] = fs[0].mul(&g);
                (a.clone(), fs)
            })
            .collect();
        Self::new(&self.domain, self.degree, terms)
    }

    /// `δλ(f₀; f₁, …) = λ(1; f₀, f₁, …)`.
    pub fn coboundary(&self) -> MinimalForm {
        let terms = self
            .terms
            .iter()
            .map(|(a, g)| {
                let mut h = Vec::with_capacity(g.len() + 1);
                h.push(SAFunction::one(&self.domain));
                h.extend(g.iter().cloned());
                (a.clone(), h)
            })
            .collect();
        Self::new(&self.domain, self.degree + 1, terms)
    }

    /// `μ₁ × μ₂` on the staircase product of the domains.
    pub fn cross(&self, other: &MinimalForm) -> MinimalForm {
        let prod = staircase_product(&self.domain, &other.domain);
        let (p1, p2) = SAMap::projections(&prod);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, f) in &self.terms {
            let fl: Vec<SAFunction> = f.iter().map(|x| x.compose(&p1)).collect();
            for (b, g) in &other.terms {
                let mut h = vec![fl[0].mul(&g[0].compose(&p2))];
                h.extend(fl[1..].iter().cloned());
                h.extend(g[1..].iter().map(|x| x.compose(&p2)));
                terms.push((a * b, h));
            }
        }
        Self::new(&prod.complex, self.degree + other.degree, terms)
    }

    /// Pointwise wedge of two forms on the same domain.
    pub fn wedge(&self, other: &MinimalForm) -> Result<MinimalForm> {
        if self.domain.id() != other.domain.id() {
            return Err(Error::IncompatibleInputs("wedge of forms on different domains".into()));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                let mut h = vec![f[0].mul(&g[0])];
                h.extend(f[1..].iter().cloned());
                h.extend(g[1..].iter().cloned());
                terms.push((a * b, h));
            }
        }
        Ok(Self::new(&self.domain, self.degree + other.degree, terms))
    }

    /// `g*μ` along a map into this form's domain.
    pub fn pullback(&self, g: &Arc<SAMap>) -> MinimalForm {
        let terms = self.terms.iter().map(|(a, f)| (a.clone(), f.iter().map(|x| x.compose(g)).collect())).collect();
        Self::new(g.domain(), self.degree, terms)
    }

    /// `⟨μ, γ⟩`; zero when the degrees differ.
    pub fn pair(&self, chain: &Chain) -> Result<f64> {
        self.pair_with(chain, &Adaptive::default())
    }

    pub fn pair_with(&self, chain: &Chain, adaptive: &Adaptive) -> Result<f64> {
        if chain.degree() != self.degree || chain.is_zero() || self.is_zero() {
            return Ok(0.0);
        }
        if chain.ambient_dim() != self.domain.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "chain in ℝ^{} paired with a form on ℝ^{}",
                chain.ambient_dim(),
                self.domain.ambient_dim()
            )));
        }
        let jobs: Vec<(f64, &[SAFunction], &crate::chain::ChainTerm)> = self
            .terms
            .iter()
            .flat_map(|(a, g)| chain.terms().iter().map(move |t| (to_f64(a) * t.coeff as f64, g.as_slice(), t)))
            .collect();
        let parts: Vec<Result<f64>> = jobs.par_iter().map(|(c, g, t)| integrate_term(t, g, adaptive).map(|v| c * v)).collect();
        let mut total = 0.0;
        for p in parts {
            total += p?;
        }
        Ok(total)
    }
}

/// Drops vanishing generators, sorts polynomial slots with the permutation
/// sign, and merges syntactically equal generators.
fn canonicalize(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for (mut a, mut g) in terms {
        if a.is_zero() || g[0].is_zero() {
            continue;
        }
        let slots = &g[1..];
        if slots.iter().any(|f| f.as_constant().is_some()) {
            continue;
        }
        if (0..slots.len()).any(|i| (i + 1..slots.len()).any(|j| slots[i].same_as(&slots[j]))) {
            continue;
        }
        if slots.iter().all(|f| f.as_polynomial().is_some()) {
            let mut order: Vec<usize> = (0..slots.len()).collect();
            order.sort_by(|&i, &j| slots[i].as_polynomial().cmp(&slots[j].as_polynomial()));
            let inversions = (0..order.len()).flat_map(|i| (i + 1..order.len()).map(move |j| (i, j))).filter(|&(i, j)| order[i] > order[j]).count();
            if inversions % 2 == 1 {
                a = -a;
            }
            let sorted: Vec<SAFunction> = order.iter().map(|&i| slots[i].clone()).collect();
            g.truncate(1);
            g.extend(sorted);
        }
        match out.iter_mut().find(|(_, h)| h.len() == g.len() && h.iter().zip(&g).all(|(x, y)| x.same_as(y))) {
            Some((b, _)) => *b += a,
            None => out.push((a, g)),
        }
    }
    out.retain(|(a, _)| !a.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, standard_simplex, OrientedSimplex, Simplex};
    use crate::ratfn::RatFn;
    use crate::rational::q;

    fn unit_interval() -> (Arc<GeoComplex>, Chain) {
        let k = interval(q(0), q(1));
        let c = Chain::fundamental(&k).unwrap();
        (k, c)
    }

    #[test]
    fn length_and_first_moment() {
        let (k, c) = unit_interval();
        let x = SAFunction::coordinate(&k, 0);
        let dx = MinimalForm::generator(&k, vec![SAFunction::one(&k), x.clone()]);
        assert!((dx.pair(&c).unwrap() - 1.0).abs() < 1e-14);
        let xdx = MinimalForm::generator(&k, vec![x.clone(), x]);
        assert!((xdx.pair(&c).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn log_two_from_reciprocal() {
        let k = interval(q(1), q(2));
        let c = Chain::fundamental(&k).unwrap();
        let recip = RatFn::new(Poly::one(1), Poly::var(1, 0));
        let f0 = SAFunction::piecewise(&k, vec![(Simplex::new(vec![0, 1]), recip)]).unwrap();
        let mu = MinimalForm::generator(&k, vec![f0, SAFunction::coordinate(&k, 0)]);
        assert!((mu.pair(&c).unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn squaring_map_and_fold() {
        let (k, _) = unit_interval();
        let x = Poly::var(1, 0);
        let sq = SAMap::new(&k, vec![SAFunction::polynomial(&k, x.mul(&x))]);
        let edge = OrientedSimplex::positive(Simplex::new(vec![0, 1]));
        let pushed = Chain::mapped(&k, &edge, &sq);
        let dx = MinimalForm::generator(&k, vec![SAFunction::one(&k), SAFunction::coordinate(&k, 0)]);
        assert!((dx.pair(&pushed).unwrap() - 1.0).abs() < 1e-14);
        let target = interval(q(0), q(1));
        let fold_dom = crate::complex::subdivided_interval(q(0), q(2), 2);
        let fold = SAMap::pl(&fold_dom, &[vec![q(0)], vec![q(1)], vec![q(0)]]);
        let folded = Chain::fundamental(&fold_dom).unwrap().pushforward(&fold);
        let dt = MinimalForm::generator(&target, vec![SAFunction::one(&target), SAFunction::coordinate(&target, 0)]);
        assert!(dt.pair(&folded).unwrap().abs() < 1e-14);
    }

    #[test]
    fn coboundary_squares_to_zero_and_canonicalizes() {
        let k = standard_simplex(2);
        let x = SAFunction::coordinate(&k, 0);
        let y = SAFunction::coordinate(&k, 1);
        let mu = MinimalForm::generator(&k, vec![x.mul(&y), y.clone()]);
        let d = mu.coboundary();
        assert_eq!(d.terms().len(), 1);
        assert!(d.coboundary().is_zero());
        // λ(1; y, x) = −λ(1; x, y)
        let a = MinimalForm::generator(&k, vec![SAFunction::one(&k), y.clone(), x.clone()]);
        let b = MinimalForm::generator(&k, vec![SAFunction::one(&k), x, y]);
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn area_of_triangle_from_barycentric_form() {
        let k = standard_simplex(2);
        let mu = MinimalForm::from_apl(&k, 2, vec![(Poly::one(3), vec![1, 2])]).unwrap();
        let c = Chain::fundamental(&k).unwrap();
        assert!((mu.pair(&c).unwrap() - 0.5).abs() < 1e-14);
    }
}
