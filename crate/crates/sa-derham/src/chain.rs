//! Chains as integer combinations of simplices carrying maps into ambient space.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::complex::{staircase_product, GeoComplex, OrientedSimplex, Simplex};
use crate::error::{Error, Result};
use crate::function::{SAFunction, SAMap};
use crate::geometry::signed_volume;
use crate::minimal::MinimalForm;
use crate::poly::Poly;
use crate::rational::{sign, Q};

/// `coeff · map_*(⟦simplex⟧)`, the simplex oriented by its increasing vertex order.
#[derive(Clone, Debug)]
pub struct ChainTerm {
    pub coeff: i64,
    pub source: Arc<GeoComplex>,
    pub simplex: Simplex,
    pub map: Arc<SAMap>,
}

impl ChainTerm {
    fn key(&self) -> (u64, Simplex, u64) {
        (self.source.id(), self.simplex.clone(), self.map.id())
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    degree: usize,
    ambient_dim: usize,
    terms: Vec<ChainTerm>,
}

impl Chain {
    pub fn zero(degree: usize, ambient_dim: usize) -> Self {
        Chain { degree, ambient_dim, terms: Vec::new() }
    }

    /// Canonical form: merges terms with equal (source, simplex, map) keeping
    /// first-occurrence order, and drops zero coefficients.
    pub fn from_terms(degree: usize, ambient_dim: usize, terms: Vec<ChainTerm>) -> Self {
        let mut index: HashMap<(u64, Simplex, u64), usize> = HashMap::new();
        let mut merged: Vec<ChainTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            assert_eq!(t.simplex.dim(), degree, "term dimension must equal the chain degree");
            assert_eq!(t.map.target_dim(), ambient_dim, "term map must land in the chain's ambient space");
            match index.get(&t.key()) {
                Some(&i) => merged[i].coeff += t.coeff,
                None => {
                    index.insert(t.key(), merged.len());
                    merged.push(t);
                }
            }
        }
        merged.retain(|t| t.coeff != 0);
        Chain { degree, ambient_dim, terms: merged }
    }

    /// Identity-mapped simplex of a complex with a sign.
    pub fn simplex(complex: &Arc<GeoComplex>, s: &OrientedSimplex) -> Self {
        Self::mapped(complex, s, &SAMap::identity(complex))
    }

    /// A simplex of `complex` pushed forward along `map`.
    pub fn mapped(complex: &Arc<GeoComplex>, s: &OrientedSimplex, map: &Arc<SAMap>) -> Self {
        let term = ChainTerm { coeff: s.sign as i64, source: complex.clone(), simplex: s.simplex.clone(), map: map.clone() };
        Self::from_terms(s.simplex.dim(), map.target_dim(), vec![term])
    }

    /// Identity-mapped signed combination of simplices of one complex.
    pub fn combination(complex: &Arc<GeoComplex>, degree: usize, parts: Vec<(Simplex, i64)>) -> Self {
        let map = SAMap::identity(complex);
        let terms = parts
            .into_iter()
            .map(|(simplex, coeff)| ChainTerm { coeff, source: complex.clone(), simplex, map: map.clone() })
            .collect();
        Self::from_terms(degree, complex.ambient_dim(), terms)
    }

    /// Fundamental chain: top simplices coherently oriented. Full-dimensional
    /// complexes use the ambient orientation; others are oriented by
    /// propagation from the first top simplex.
    pub fn fundamental(complex: &Arc<GeoComplex>) -> Result<Self> {
        let signs = coherent_orientation(complex)?;
        Ok(Self::combination(complex, complex.dim(), signs))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn terms(&self) -> &[ChainTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.degree, other.degree, "adding chains of different degrees");
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Chain::from_terms(self.degree, self.ambient_dim, terms)
    }

    pub fn scale(&self, c: i64) -> Chain {
        let terms = self.terms.iter().map(|t| ChainTerm { coeff: t.coeff * c, ..t.clone() }).collect();
        Chain::from_terms(self.degree, self.ambient_dim, terms)
    }

    pub fn neg(&self) -> Chain {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.neg())
    }

    /// Signed facets carrying the same maps.
    pub fn boundary(&self) -> Chain {
        if self.degree == 0 {
            return Chain::zero(0, self.ambient_dim);
        }
        let terms = self
            .terms
            .iter()
            .flat_map(|t| {
                OrientedSimplex::positive(t.simplex.clone()).boundary_faces().into_iter().map(move |f| ChainTerm {
                    coeff: t.coeff * f.sign as i64,
                    source: t.source.clone(),
                    simplex: f.simplex,
                    map: t.map.clone(),
                })
            })
            .collect();
        Chain::from_terms(self.degree - 1, self.ambient_dim, terms)
    }

    /// `h_*(γ)`: each term's map replaced by `h ∘ map`.
    pub fn pushforward(&self, h: &Arc<SAMap>) -> Chain {
        let mut cache: HashMap<u64, Arc<SAMap>> = HashMap::new();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let map = cache.entry(t.map.id()).or_insert_with(|| h.after(&t.map)).clone();
                ChainTerm { map, ..t.clone() }
            })
            .collect();
        Chain::from_terms(self.degree, h.target_dim(), terms)
    }

    /// `γ₁ × γ₂` over the staircase products of the sources.
    pub fn cross(&self, other: &Chain) -> Chain {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let prod = staircase_product(&a.source, &b.source);
                let map = SAMap::cross(&prod, &a.map, &b.map);
                for (cell, s) in prod.cells(&a.simplex, &b.simplex) {
                    terms.push(ChainTerm { coeff: a.coeff * b.coeff * s as i64, source: prod.complex.clone(), simplex: cell, map: map.clone() });
                }
            }
        }
        Chain::from_terms(self.degree + other.degree, self.ambient_dim + other.ambient_dim, terms)
    }

    /// `⟨ω, γ⟩` for a form with function coefficients on the ambient space.
    pub fn pair_smooth(&self, omega: &AmbientForm) -> Result<f64> {
        if omega.degree != self.degree {
            return Ok(0.0);
        }
        omega.to_minimal().pair(self)
    }
}

fn coherent_orientation(complex: &Arc<GeoComplex>) -> Result<Vec<(Simplex, i64)>> {
    let tops = complex.top_simplices();
    let d = complex.dim();
    if tops.iter().any(|t| t.dim() != d) {
        return Err(Error::FiberNotManifold("top simplices of mixed dimension".into()));
    }
    if d == 0 {
        return Ok(tops.iter().map(|t| (t.clone(), 1)).collect());
    }
    if complex.ambient_dim() == d {
        return Ok(tops.iter().map(|t| (t.clone(), sign(&signed_volume(&complex.points(t))) as i64)).collect());
    }
    // facet -> [(top index, induced sign)]
    let mut facets: BTreeMap<Simplex, Vec<(usize, i32)>> = BTreeMap::new();
    for (i, t) in tops.iter().enumerate() {
        for f in OrientedSimplex::positive(t.clone()).boundary_faces() {
            facets.entry(f.simplex).or_default().push((i, f.sign));
        }
    }
    if facets.values().any(|v| v.len() > 2) {
        return Err(Error::FiberNotManifold("a facet is shared by more than two simplices".into()));
    }
    let mut orient = vec![0i32; tops.len()];
    for start in 0..tops.len() {
        if orient[start] != 0 {
            continue;
        }
        orient[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for f in OrientedSimplex::positive(tops[i].clone()).boundary_faces() {
                let users = &facets[&f.simplex];
                for &(j, sj) in users {
                    if j == i {
                        continue;
                    }
                    // Induced orientations on a shared facet must cancel.
                    let want = -orient[i] * f.sign * sj;
                    if orient[j] == 0 {
                        orient[j] = want;
                        queue.push_back(j);
                    } else if orient[j] != want {
                        return Err(Error::FiberNotManifold("complex is not orientable".into()));
                    }
                }
            }
        }
    }
    Ok(tops.iter().zip(orient).map(|(t, o)| (t.clone(), o as i64)).collect())
}

/// `Σ c_I dx_I` with function coefficients on a complex in `ℝ^n`.
#[derive(Clone, Debug)]
pub struct AmbientForm {
    pub degree: usize,
    pub domain: Arc<GeoComplex>,
    pub terms: Vec<(SAFunction, Vec<usize>)>,
}

impl AmbientForm {
    pub fn new(domain: &Arc<GeoComplex>, degree: usize, terms: Vec<(SAFunction, Vec<usize>)>) -> Self {
        assert!(terms.iter().all(|(_, idx)| idx.len() == degree));
        AmbientForm { degree, domain: domain.clone(), terms }
    }

    /// `Σ λ(c_I; x_{i₁}, …, x_{i_k})`.
    pub fn to_minimal(&self) -> MinimalForm {
        let gens = self
            .terms
            .iter()
            .map(|(c, idx)| {
                let mut g = vec![c.clone()];
                g.extend(idx.iter().map(|&i| SAFunction::coordinate(&self.domain, i)));
                (Q::one(), g)
            })
            .collect();
        MinimalForm::new(&self.domain, self.degree, gens)
    }

    /// Exterior derivative of a form with global polynomial coefficients.
    pub fn exterior_derivative(&self) -> Option<AmbientForm> {
        let n = self.domain.ambient_dim();
        let mut acc: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
        for (c, idx) in &self.terms {
            let p = match (c.as_polynomial(), c.as_constant()) {
                (Some(p), _) => p.clone(),
                (None, Some(v)) => Poly::constant(n, v.clone()),
                _ => return None,
            };
            for j in 0..n {
                let dp = p.derivative(j);
                if dp.is_zero() || idx.contains(&j) {
                    continue;
                }
                let mut full = vec![j];
                full.extend(idx);
                let (sorted, s) = Simplex::with_sign(full).expect("distinct indices");
                let e = acc.entry(sorted.to_vec()).or_insert_with(|| Poly::zero(n));
                *e = e.add(&dp.scale(&Q::from_integer((s as i64).into())));
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(idx, p)| (SAFunction::polynomial(&self.domain, p), idx))
            .collect();
        Some(AmbientForm { degree: self.degree + 1, domain: self.domain.clone(), terms })
    }
}

/// A homotopy `h` on `M × [0, 1]` and decreasing parameters.
#[derive(Clone, Debug)]
pub struct ChainSequence {
    pub base: Chain,
    pub homotopy: Arc<SAMap>,
    pub parameters: Vec<Q>,
}

impl ChainSequence {
    /// `h(−, ε)_*` applied to the base chain.
    pub fn member(&self, eps: &Q) -> Chain {
        let mut by_source: HashMap<u64, Arc<SAMap>> = HashMap::new();
        let terms: Vec<ChainTerm> = self
            .base
            .terms()
            .iter()
            .map(|t| {
                let map = by_source
                    .entry(t.map.id())
                    .or_insert_with(|| {
                        let src = t.map.domain();
                        let n = src.ambient_dim();
                        let mut comps: Vec<SAFunction> = t.map.components().to_vec();
                        comps.push(SAFunction::constant(src, eps.clone()));
                        let lifted = SAMap::new(src, comps);
                        debug_assert_eq!(lifted.target_dim(), self.homotopy.domain().ambient_dim(), "{n}");
                        self.homotopy.after(&lifted)
                    })
                    .clone();
                ChainTerm { map, ..t.clone() }
            })
            .collect();
        Chain::from_terms(self.base.degree(), self.homotopy.target_dim(), terms)
    }
}

/// Pairings along the sequence followed by the limit value at `ε = 0`.
pub fn sa_converge_probe(seq: &ChainSequence, mu: &MinimalForm) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(seq.parameters.len() + 1);
    for eps in &seq.parameters {
        out.push(mu.pair(&seq.member(eps))?);
    }
    out.push(mu.pair(&seq.member(&Q::zero()))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{square_boundary, standard_simplex};
    use crate::rational::q;

    #[test]
    fn triangle_boundary_and_its_boundary() {
        let k = standard_simplex(2);
        let g = Chain::simplex(&k, &OrientedSimplex::positive(Simplex::new(vec![0, 1, 2])));
        let b = g.boundary();
        let got: Vec<(Vec<usize>, i64)> = b.terms().iter().map(|t| (t.simplex.to_vec(), t.coeff)).collect();
        assert_eq!(got, vec![(vec![1, 2], 1), (vec![0, 2], -1), (vec![0, 1], 1)]);
        assert!(b.boundary().is_zero());
        let t = standard_simplex(3);
        assert!(Chain::fundamental(&t).unwrap().boundary().boundary().is_zero());
    }

    #[test]
    fn square_boundary_is_a_cycle() {
        let k = square_boundary();
        let f = Chain::fundamental(&k).unwrap();
        assert_eq!(f.terms().len(), 4);
        assert!(f.boundary().is_zero());
    }

    #[test]
    fn cross_of_edges_obeys_leibniz_formally() {
        let i = standard_simplex(1);
        let e = Chain::fundamental(&i).unwrap();
        let sq = e.cross(&e);
        assert_eq!(sq.terms().len(), 2);
        let lhs = sq.boundary();
        let rhs = e.boundary().cross(&e).add(&e.cross(&e.boundary()).neg());
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn exterior_derivative_of_polynomial_form() {
        let k = standard_simplex(2);
        // d(x y dx) = −x dx∧dy
        let xy = SAFunction::polynomial(&k, Poly::var(2, 0).mul(&Poly::var(2, 1)));
        let w = AmbientForm::new(&k, 1, vec![(xy, vec![0])]);
        let dw = w.exterior_derivative().unwrap();
        assert_eq!(dw.terms.len(), 1);
        assert_eq!(dw.terms[0].1, vec![0, 1]);
        assert_eq!(dw.terms[0].0.as_polynomial().unwrap(), &Poly::var(2, 0).scale(&q(-1)));
    }
}
