//! Quadrature on simplices: collapsed Gauss–Legendre product rules of a
//! requested exactness degree (Grundmann–Möller rules from dimension four on),
//! and adaptive subdivision for rational integrands.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights on the standard simplex `{s ≥ 0, Σ s ≤ 1}`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: u32,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

/// Product rules grow like `(degree / 2)^dim`; above this dimension the
/// Grundmann–Möller family is far smaller.
const PRODUCT_RULE_MAX_DIM: usize = 3;

fn build(dim: usize, degree: u32) -> QuadratureRule {
    if dim == 0 {
        return QuadratureRule { dim, degree, nodes: vec![Vec::new()], weights: vec![1.0] };
    }
    if dim > PRODUCT_RULE_MAX_DIM {
        return grundmann_moller(dim, degree);
    }
    // The collapse map contributes (1 − ξ₁)^{dim−1}, raising the degree in ξ₁.
    let n = (degree as usize + dim).div_ceil(2).max(1);
    let (x, w) = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n.pow(dim as u32));
    let mut weights = Vec::with_capacity(n.pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        let mut point = vec![0.0; dim];
        let mut remaining = 1.0;
        let mut weight = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            point[j] = remaining * x[i];
            // Collapse Jacobian factor (1 − ξ₁)⋯(1 − ξ_{j−1}).
            weight *= w[i] * remaining;
            remaining *= 1.0 - x[i];
        }
        nodes.push(point);
        weights.push(weight);
        let mut j = dim;
        loop {
            if j == 0 {
                return QuadratureRule { dim, degree, nodes, weights };
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Exact to degree `2s + 1`: for `i = 0..=s` and `|β| = s − i` over `dim + 1`
/// barycentric slots, the node `(2β + 1) / (d + dim − 2i)` gets weight
/// `(−1)^i (d + dim − 2i)^d / (4^s i! (d + dim − i)!)`, `d = 2s + 1`.
fn grundmann_moller(dim: usize, degree: u32) -> QuadratureRule {
    let s = degree.saturating_sub(1).div_ceil(2) as usize;
    let d = 2 * s + 1;
    let factorial = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let scale = (d + dim - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * scale.powi(d as i32) / (4f64.powi(s as i32) * factorial(i) * factorial(d + dim - i));
        for beta in crate::poly::compositions((s - i) as u32, dim + 1) {
            nodes.push(beta[1..].iter().map(|&b| (2 * b + 1) as f64 / scale).collect());
            weights.push(weight);
        }
    }
    QuadratureRule { dim, degree: d as u32, nodes, weights }
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<QuadratureRule>>>;

/// Rule of the given dimension integrating every polynomial of degree `≤ degree` exactly.
pub fn rule(dim: usize, degree: u32) -> Arc<QuadratureRule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("rule cache").get(&(dim, degree)) {
        return r.clone();
    }
    let r = Arc::new(build(dim, degree));
    cache.lock().expect("rule cache").entry((dim, degree)).or_insert(r).clone()
}

/// `∫_{Δ^k} Π sᵢ^{aᵢ} ds = Π aᵢ! / (k + Σ aᵢ)!`.
pub fn monomial_integral(exponents: &[u32]) -> f64 {
    let k = exponents.len();
    let total: u32 = exponents.iter().sum();
    let mut v = 1.0;
    // Interleave numerator and denominator factors to stay in range.
    let mut num: Vec<f64> = exponents.iter().flat_map(|&a| (1..=a).map(|i| i as f64)).collect();
    let den: Vec<f64> = (1..=(k as u32 + total)).map(|i| i as f64).collect();
    num.resize(den.len(), 1.0);
    for (a, b) in num.iter().zip(&den) {
        v *= a / b;
    }
    v
}

/// Largest deviation of any rule against closed-form monomial integrals,
/// over dimensions `0..=max_dim` and degrees `0..=max_degree`.
pub fn selftest(max_dim: usize, max_degree: u32) -> f64 {
    (0..=max_dim).flat_map(|dim| (0..=max_degree).map(move |degree| rule_error(dim, degree))).fold(0.0, f64::max)
}

/// Largest deviation of the rule for `(dim, degree)` on monomials up to `degree`.
pub fn rule_error(dim: usize, degree: u32) -> f64 {
    let r = rule(dim, degree);
    let mut worst: f64 = 0.0;
    for total in 0..=degree {
        for exps in crate::poly::compositions(total, dim) {
            let approx: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * x.iter().zip(&exps).map(|(v, &e)| v.powi(e as i32)).product::<f64>())
                .sum();
            worst = worst.max((approx - monomial_integral(&exps)).abs());
        }
    }
    worst
}

/// Integrates over a simplex in `ℝ^k` given by `k + 1` vertices, mapping the rule affinely.
pub fn integrate_simplex(vertices: &[Vec<f64>], r: &QuadratureRule, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let k = vertices.len() - 1;
    let jac = simplex_jacobian(vertices).abs();
    let mut x = vec![0.0; k];
    let mut total = 0.0;
    for (node, w) in r.nodes.iter().zip(&r.weights) {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = vertices[0][j] + node.iter().enumerate().map(|(i, u)| u * (vertices[i + 1][j] - vertices[0][j])).sum::<f64>();
        }
        total += w * f(&x);
    }
    total * jac
}

/// Determinant of the edge matrix `[v₁ − v₀, …, v_k − v₀]`.
pub fn simplex_jacobian(vertices: &[Vec<f64>]) -> f64 {
    let k = vertices.len() - 1;
    let m: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| vertices[j + 1][i] - vertices[0][i]).collect()).collect();
    det_f64(m)
}

pub fn det_f64(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).expect("nonempty");
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for j in c..n {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    d
}

/// Adaptive control for non-polynomial integrands.
#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub tolerance: f64,
    pub budget: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive { tolerance: 1e-10, budget: 100_000 }
    }
}

impl Adaptive {
    /// Bisects until the difference between a degree-7 and a degree-11 rule
    /// is within the volume-weighted share of the tolerance on every piece.
    pub fn integrate(&self, vertices: &[Vec<f64>], mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
        let k = vertices.len() - 1;
        let (lo, hi) = (rule(k, 7), rule(k, 11));
        let total_volume = simplex_jacobian(vertices).abs();
        if k == 0 || total_volume == 0.0 {
            return Ok(integrate_simplex(vertices, &hi, f));
        }
        let mut stack = vec![vertices.to_vec()];
        let mut sum = 0.0;
        let mut err = 0.0;
        let mut splits = 0;
        while let Some(s) = stack.pop() {
            let a = integrate_simplex(&s, &lo, &mut f);
            let b = integrate_simplex(&s, &hi, &mut f);
            let share = self.tolerance * simplex_jacobian(&s).abs() / total_volume;
            let e = (b - a).abs();
            if e <= share || splits >= self.budget {
                sum += b;
                err += e;
                continue;
            }
            splits += 1;
            stack.extend(bisect_f64(&s));
        }
        if splits >= self.budget && err > self.tolerance {
            return Err(Error::AdaptiveBudgetExhausted { achieved: err });
        }
        Ok(sum)
    }
}

fn bisect_f64(s: &[Vec<f64>]) -> [Vec<Vec<f64>>; 2] {
    let mut best = (-1.0, 0, 1);
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            let d: f64 = s[a].iter().zip(&s[b]).map(|(x, y)| (x - y) * (x - y)).sum();
            if d > best.0 {
                best = (d, a, b);
            }
        }
    }
    let (_, a, b) = best;
    let mid: Vec<f64> = s[a].iter().zip(&s[b]).map(|(x, y)| 0.5 * (x + y)).collect();
    let mut l = s.to_vec();
    l[a] = mid.clone();
    let mut r = s.to_vec();
    r[b] = mid;
    [l, r]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_to_degree() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for d in 0..2 * n {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                assert!((approx - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "n={n} d={d}");
            }
            assert!(w.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn closed_form_monomials() {
        assert!((monomial_integral(&[]) - 1.0).abs() < 1e-16);
        assert!((monomial_integral(&[0, 0]) - 0.5).abs() < 1e-16);
        assert!((monomial_integral(&[1, 1]) - 1.0 / 24.0).abs() < 1e-16);
        assert!((monomial_integral(&[2, 0, 1]) - 2.0 / 720.0).abs() < 1e-16);
    }

    #[test]
    fn rules_are_exact_through_dim_three_degree_six() {
        assert!(selftest(1, 4) <= 1e-14);
        assert!(selftest(3, 6) <= 1e-12);
        assert_eq!(selftest(0, 3), 0.0);
    }

    #[test]
    fn high_dimensional_rules_are_exact() {
        for dim in 4..=6 {
            for degree in [0, 1, 4, 9, 12] {
                let e = rule_error(dim, degree);
                assert!(e < 1e-13, "dim {dim} degree {degree}: {e:e}");
            }
        }
        assert_eq!(rule(5, 9).nodes.len(), 210);
    }

    #[test]
    fn adaptive_log() {
        let v = Adaptive::default().integrate(&[vec![1.0], vec![2.0]], |x| 1.0 / x[0]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn adaptive_budget_reports_error() {
        let a = Adaptive { tolerance: 1e-14, budget: 3 };
        let r = a.integrate(&[vec![0.0], vec![1.0]], |x| (1.0 / (x[0] + 1e-3)).sin());
        assert!(matches!(r, Err(Error::AdaptiveBudgetExhausted { .. })));
    }
}
