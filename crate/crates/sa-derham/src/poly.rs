//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::{factorial, one, to_f64, zero, Q};

pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| if p == 1 { format!("x{i}") } else { format!("x{i}^{p}") })
                    .collect();
                if mono.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, one());
        p
    }

    /// `c + Σ coeffs[i]·x_i`.
    pub fn affine(c: Q, coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::constant(n, c);
        for (i, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                p.terms.insert(e, a.clone());
            }
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal the variable count");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&p| p == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        self.degree() <= 1
    }

    /// Constant term and linear coefficients; meaningful for affine polynomials.
    pub fn affine_parts(&self) -> (Q, Vec<Q>) {
        let mut c = zero();
        let mut lin = vec![zero(); self.nvars];
        for (e, v) in &self.terms {
            match e.iter().position(|&p| p > 0) {
                None => c = v.clone(),
                Some(i) => lin[i] = v.clone(),
            }
        }
        (c, lin)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-one())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Q::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars);
        let mut s = zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &p) in x.iter().zip(e) {
                for _ in 0..p {
                    t *= xi;
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                to_f64(c) * e.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product::<f64>()
            })
            .sum()
    }

    /// Substitutes `args[i]` for variable `i`; every argument has `m` variables.
    pub fn compose(&self, args: &[Poly], m: usize) -> Poly {
        assert_eq!(args.len(), self.nvars);
        let mut powers: Vec<Vec<Poly>> = args.iter().map(|a| vec![Poly::one(a.nvars), a.clone()]).collect();
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                while powers[i].len() <= p as usize {
                    let next = powers[i].last().unwrap().mul(&args[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][p as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Reinterprets the polynomial with more variables, old variable `i` becoming `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &p) in e.iter().enumerate() {
                f[map[i]] += p;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Bernstein coefficients of degree `n ≥ deg` on the standard simplex
    /// `{s_i ≥ 0, Σ s_i ≤ 1}`, indexed by `(γ_0, γ_1, …, γ_k)` with `γ_0` the
    /// exponent of `1 − Σ s_i`.
    pub fn bernstein(&self, n: u32) -> BTreeMap<Exponent, Q> {
        let k = self.nvars;
        let nf = factorial(n as usize);
        let mut h: BTreeMap<Exponent, Q> = BTreeMap::new();
        for (a, c) in &self.terms {
            let m = n - a.iter().sum::<u32>();
            let mf = factorial(m as usize);
            for beta in compositions(m, k + 1) {
                let mut gamma = vec![beta[0]];
                gamma.extend(a.iter().zip(&beta[1..]).map(|(x, y)| x + y));
                let denom: Q = beta.iter().map(|&b| factorial(b as usize)).product();
                *h.entry(gamma).or_insert_with(zero) += c * &mf / denom;
            }
        }
        let mut out = BTreeMap::new();
        for gamma in compositions(n, k + 1) {
            let g: Q = gamma.iter().map(|&b| factorial(b as usize)).product();
            let v = h.remove(&gamma).unwrap_or_else(zero);
            out.insert(gamma, v * g / &nf);
        }
        out
    }

    /// Sign certificate on the standard simplex from Bernstein coefficients:
    /// `Some(1)` when every coefficient is ≥ 0 and the polynomial is nonzero at a
    /// vertex-free witness, `Some(-1)` symmetrically, `Some(0)` for the zero
    /// polynomial, `None` when undecided.
    pub fn bernstein_sign(&self) -> Option<i32> {
        if self.is_zero() {
            return Some(0);
        }
        let b = self.bernstein(self.degree());
        if b.values().all(|c| c > &zero()) {
            Some(1)
        } else if b.values().all(|c| c < &zero()) {
            Some(-1)
        } else {
            None
        }
    }

    /// True when `p ≥ 0` on the standard simplex is certified by Bernstein coefficients.
    pub fn certified_nonnegative(&self) -> bool {
        self.is_zero() || self.bernstein(self.degree()).values().all(|c| c >= &zero())
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), to_f64(c))).collect(),
        }
    }
}

/// All vectors of `parts` nonnegative integers summing to `total`, in lexicographic order.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// All `k`-element subsets of `0..n` as increasing vectors, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in start..n {
            prefix.push(i);
            rec(i + 1, n, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Double-precision copy of a polynomial for fast evaluation at quadrature nodes.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Exponent, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&p, &xi)| powi(xi, p)).product::<f64>())
            .sum()
    }

    /// Value and gradient in one pass.
    pub fn eval_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut val = 0.0;
        for (e, c) in &self.terms {
            let pows: Vec<f64> = e.iter().zip(x).map(|(&p, &xi)| powi(xi, p)).collect();
            val += c * pows.iter().product::<f64>();
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c * e[i] as f64 * powi(x[i], e[i] - 1);
                for (j, pj) in pows.iter().enumerate() {
                    if j != i {
                        t *= pj;
                    }
                }
                grad[i] += t;
            }
        }
        val
    }
}

fn powi(x: f64, p: u32) -> f64 {
    match p {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(p as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn x(i: usize) -> Poly {
        Poly::var(2, i)
    }

    #[test]
    fn arithmetic_and_degree() {
        let p = x(0).add(&x(1)).pow(2);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.eval(&[q(1), q(2)]), q(9));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn composition_expands_symbolically() {
        // t² composed with 1 − s gives 1 − 2s + s².
        let t2 = Poly::var(1, 0).pow(2);
        let one_minus_s = Poly::affine(q(1), &[q(-1)]);
        let got = t2.compose(&[one_minus_s], 1);
        let want = Poly::from_terms(1, [(vec![0], q(1)), (vec![1], q(-2)), (vec![2], q(1))]);
        assert_eq!(got, want);
    }

    #[test]
    fn derivative_of_monomial() {
        let p = Poly::from_terms(2, [(vec![2, 1], qr(3, 2))]);
        assert_eq!(p.derivative(0), Poly::from_terms(2, [(vec![1, 1], q(3))]));
    }

    #[test]
    fn bernstein_partition_of_unity_and_sign() {
        let b = Poly::one(2).bernstein(3);
        assert!(b.values().all(|c| c == &q(1)));
        // s0 + s1 is nonnegative on the triangle and its coefficients certify it.
        assert!(x(0).add(&x(1)).certified_nonnegative());
        assert_eq!(Poly::affine(q(2), &[q(-1), q(-1)]).bernstein_sign(), Some(1));
        assert_eq!(Poly::affine(qr(1, 2), &[q(-1), q(0)]).bernstein_sign(), None);
    }

    #[test]
    fn compiled_gradient_matches_symbolic() {
        let p = Poly::from_terms(2, [(vec![2, 1], q(3)), (vec![0, 3], q(-1)), (vec![0, 0], q(5))]);
        let c = p.compile();
        let mut g = [0.0; 2];
        let v = c.eval_grad(&[0.3, -0.7], &mut g);
        assert!((v - p.eval_f64(&[0.3, -0.7])).abs() < 1e-14);
        assert!((g[0] - p.derivative(0).eval_f64(&[0.3, -0.7])).abs() < 1e-14);
        assert!((g[1] - p.derivative(1).eval_f64(&[0.3, -0.7])).abs() < 1e-14);
    }
}
