use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{GeoComplex, Simplex};

/// Staircase triangulation of `|left| × |right|`.
///
/// Vertex `(i, j)` has index `i · n_right + j` and coordinates `(x_i, y_j)`.
/// Simplices are chains in the product order, so a simplex's increasing index
/// order is its lattice-path order.
#[derive(Debug)]
pub struct ProductComplex {
    pub left: Arc<GeoComplex>,
    pub right: Arc<GeoComplex>,
    pub complex: Arc<GeoComplex>,
}

impl ProductComplex {
    pub fn split(&self, v: usize) -> (usize, usize) {
        let n = self.right.num_vertices();
        (v / n, v % n)
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        i * self.right.num_vertices() + j
    }

    /// Projections of a product simplex onto both factors.
    pub fn factors(&self, s: &Simplex) -> (Simplex, Simplex) {
        let (a, b): (Vec<usize>, Vec<usize>) = s.iter().map(|&v| self.split(v)).unzip();
        (Simplex::new(a), Simplex::new(b))
    }

    /// Top simplices of `σ × τ` with their orientation relative to the
    /// product orientation (left coordinates first).
    pub fn cells(&self, sigma: &Simplex, tau: &Simplex) -> Vec<(Simplex, i32)> {
        shuffle_paths(sigma.dim(), tau.dim())
            .into_iter()
            .map(|(path, sign)| {
                let (mut i, mut j) = (0, 0);
                let mut verts = vec![self.join(sigma[0], tau[0])];
                for step_left in path {
                    if step_left {
                        i += 1;
                    } else {
                        j += 1;
                    }
                    verts.push(self.join(sigma[i], tau[j]));
                }
                (Simplex(verts), sign)
            })
            .collect()
    }

    /// Orientation of a top product simplex relative to the product orientation of its factors.
    pub fn shuffle_sign(&self, s: &Simplex) -> i32 {
        let mut inversions = 0usize;
        let mut right_steps = 0usize;
        for w in s.windows(2) {
            let (a, b) = (self.split(w[0]), self.split(w[1]));
            if a.0 != b.0 {
                inversions += right_steps;
            } else {
                right_steps += 1;
            }
        }
        if inversions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// All lattice paths with `p` left steps (`true`) and `q` right steps, each with
/// the sign of the shuffle that moves left steps to the front.
pub fn shuffle_paths(p: usize, q: usize) -> Vec<(Vec<bool>, i32)> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(p + q);
    fn rec(p: usize, q: usize, inv: usize, path: &mut Vec<bool>, out: &mut Vec<(Vec<bool>, i32)>) {
        if p == 0 && q == 0 {
            out.push((path.clone(), if inv.is_multiple_of(2) { 1 } else { -1 }));
            return;
        }
        let rights_so_far = path.iter().filter(|s| !**s).count();
        if p > 0 {
            path.push(true);
            rec(p - 1, q, inv + rights_so_far, path, out);
            path.pop();
        }
        if q > 0 {
            path.push(false);
            rec(p, q - 1, inv, path, out);
            path.pop();
        }
    }
    rec(p, q, 0, &mut path, &mut out);
    out
}

type ProductCache = Mutex<HashMap<(u64, u64), Arc<ProductComplex>>>;

fn cache() -> &'static ProductCache {
    static CACHE: OnceLock<ProductCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Staircase product, memoized by the factors' ids.
pub fn staircase_product(left: &Arc<GeoComplex>, right: &Arc<GeoComplex>) -> Arc<ProductComplex> {
    let key = (left.id(), right.id());
    if let Some(p) = cache().lock().expect("product cache").get(&key) {
        return p.clone();
    }
    let nr = right.num_vertices();
    let mut vertices = Vec::with_capacity(left.num_vertices() * nr);
    for x in left.vertices() {
        for y in right.vertices() {
            vertices.push(x.iter().chain(y).cloned().collect());
        }
    }
    let shell = ProductComplex {
        left: left.clone(),
        right: right.clone(),
        complex: GeoComplex::new_trusted(0, Vec::new(), Vec::new()),
    };
    let mut generators = Vec::new();
    for s in left.top_simplices() {
        for t in right.top_simplices() {
            generators.extend(shell.cells(s, t).into_iter().map(|(c, _)| c));
        }
    }
    let complex = GeoComplex::new_trusted(left.ambient_dim() + right.ambient_dim(), vertices, generators);
    let product = Arc::new(ProductComplex { complex, ..shell });
    cache().lock().expect("product cache").entry(key).or_insert(product).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard_simplex;
    use crate::complex::subdivision::relative_orientation;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn product_counts() {
        for p in 0..=3 {
            for q in 0..=3 {
                let prod = staircase_product(&standard_simplex(p), &standard_simplex(q));
                assert_eq!(prod.complex.top_simplices().len(), binomial(p + q, p), "{p}×{q}");
                assert_eq!(prod.complex.dim(), p + q);
            }
        }
    }

    #[test]
    fn shuffle_sign_matches_geometry() {
        for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let a = standard_simplex(p);
            let b = standard_simplex(q);
            let prod = staircase_product(&a, &b);
            // Reference simplex with the product orientation: left edge frame then right edge frame.
            let mut reference = vec![prod.complex.vertex(0).clone()];
            for i in 1..=p {
                reference.push(prod.complex.vertex(prod.join(i, 0)).clone());
            }
            for j in 1..=q {
                let mut v = reference[0].clone();
                for (k, c) in b.vertex(j).iter().enumerate() {
                    v[p + k] = c.clone();
                }
                reference.push(v);
            }
            for t in prod.complex.top_simplices() {
                let geo = relative_orientation(&reference, &prod.complex.points(t));
                assert_eq!(geo, prod.shuffle_sign(t), "{p}×{q} {t:?}");
            }
        }
    }

    #[test]
    fn cells_and_shuffle_sign_agree() {
        let prod = staircase_product(&standard_simplex(2), &standard_simplex(2));
        let s = Simplex::new(vec![0, 1, 2]);
        for (c, sign) in prod.cells(&s, &s) {
            assert_eq!(prod.shuffle_sign(&c), sign);
        }
    }
}
