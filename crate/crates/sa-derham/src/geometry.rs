//! Exact affine geometry: barycentric frames, affine functionals, and clipping
//! of simplices by half-spaces.

use num_traits::{Signed, Zero};

use crate::rational::{det, factorial, one, solve, to_f64, zero, Q};

pub type Point = Vec<Q>;

/// `c + lin · x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub c: Q,
    pub lin: Vec<Q>,
}

impl Affine {
    pub fn eval(&self, x: &[Q]) -> Q {
        let mut v = self.c.clone();
        for (a, b) in self.lin.iter().zip(x) {
            if !a.is_zero() {
                v += a * b;
            }
        }
        v
    }

    /// Precomposes with the affine map `s ↦ offset + matrix · s`
    /// (`matrix` given column-wise as images of unit vectors).
    pub fn pullback(&self, offset: &[Q], columns: &[Vec<Q>]) -> Affine {
        let c = self.eval(offset);
        let lin = columns
            .iter()
            .map(|col| self.lin.iter().zip(col).fold(zero(), |acc, (a, b)| acc + a * b))
            .collect();
        Affine { c, lin }
    }
}

/// Barycentric coordinate functionals and affine-hull equations of a simplex
/// embedded in an ambient space.
#[derive(Clone, Debug)]
pub struct SimplexFrame {
    dim: usize,
    /// `dim + 1` barycentric coordinate functionals.
    bary: Vec<Affine>,
    /// Functionals vanishing exactly on the affine hull.
    hull: Vec<Affine>,
    /// Floating-point copies used to reject points cheaply.
    bary_f64: Vec<(f64, Vec<f64>)>,
    hull_f64: Vec<(f64, Vec<f64>)>,
}

const REJECT_TOL: f64 = 1e-7;

fn approx(fs: &[Affine]) -> Vec<(f64, Vec<f64>)> {
    fs.iter().map(|f| (to_f64(&f.c), f.lin.iter().map(to_f64).collect())).collect()
}

fn eval_approx((c, lin): &(f64, Vec<f64>), x: &[f64]) -> f64 {
    c + lin.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
}

impl SimplexFrame {
    /// `None` when the vertices are affinely dependent.
    pub fn new(vertices: &[Point]) -> Option<Self> {
        let n = vertices.first().map(|v| v.len()).unwrap_or(0);
        let d = vertices.len().checked_sub(1)?;
        let v0 = &vertices[0];
        let edges: Vec<Point> = vertices[1..]
            .iter()
            .map(|v| v.iter().zip(v0).map(|(a, b)| a - b).collect())
            .collect();
        // Gram matrix and its inverse.
        let gram: Vec<Vec<Q>> = (0..d)
            .map(|i| (0..d).map(|j| dot(&edges[i], &edges[j])).collect())
            .collect();
        let mut ginv = vec![vec![zero(); d]; d];
        for j in 0..d {
            let mut e = vec![zero(); d];
            e[j] = one();
            let col = solve(gram.clone(), e)?;
            for i in 0..d {
                ginv[i][j] = col[i].clone();
            }
        }
        // c = G⁻¹ Eᵀ (x − v0): row i of B = Σ_j ginv[i][j] edges[j].
        let rows: Vec<Vec<Q>> = (0..d)
            .map(|i| {
                (0..n)
                    .map(|k| (0..d).fold(zero(), |acc, j| acc + &ginv[i][j] * &edges[j][k]))
                    .collect()
            })
            .collect();
        let mut bary = Vec::with_capacity(d + 1);
        let mut lam0 = Affine { c: one(), lin: vec![zero(); n] };
        for row in &rows {
            let c = -dot(row, v0);
            lam0.c -= &c;
            for k in 0..n {
                lam0.lin[k] -= &row[k];
            }
            bary.push(Affine { c, lin: row.clone() });
        }
        bary.insert(0, lam0);
        // Residual projector P = I − E G⁻¹ Eᵀ applied to (x − v0).
        let mut hull = Vec::new();
        for r in 0..n {
            let mut lin = vec![zero(); n];
            lin[r] = one();
            for (i, row) in rows.iter().enumerate() {
                let e = &edges[i][r];
                if e.is_zero() {
                    continue;
                }
                for k in 0..n {
                    lin[k] -= e * &row[k];
                }
            }
            if lin.iter().all(|v| v.is_zero()) {
                continue;
            }
            let c = -dot(&lin, v0);
            hull.push(Affine { c, lin });
        }
        let (bary_f64, hull_f64) = (approx(&bary), approx(&hull));
        Some(SimplexFrame { dim: d, bary, hull, bary_f64, hull_f64 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn barycentric_functionals(&self) -> &[Affine] {
        &self.bary
    }

    pub fn hull_equations(&self) -> &[Affine] {
        &self.hull
    }

    /// `false` only when `x` is clearly off the affine hull.
    pub fn may_be_in_hull(&self, x: &[f64]) -> bool {
        self.hull_f64.iter().all(|h| eval_approx(h, x).abs() <= REJECT_TOL)
    }

    /// `false` only when `x` is clearly outside the closed simplex.
    pub fn may_contain(&self, x: &[f64]) -> bool {
        self.may_be_in_hull(x) && self.bary_f64.iter().all(|b| eval_approx(b, x) >= -REJECT_TOL)
    }

    pub fn in_hull(&self, x: &[Q]) -> bool {
        self.hull.iter().all(|h| h.eval(x).is_zero())
    }

    /// Barycentric coordinates, or `None` if `x` is off the affine hull.
    pub fn coords(&self, x: &[Q]) -> Option<Vec<Q>> {
        self.in_hull(x).then(|| self.bary.iter().map(|b| b.eval(x)).collect())
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.coords(x)
            .map(|c| c.iter().all(|v| !v.is_negative()))
            .unwrap_or(false)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + x * y)
}

/// Signed volume of a full-dimensional simplex given by `k + 1` points in `ℝ^k`.
pub fn signed_volume(vertices: &[Point]) -> Q {
    let k = vertices.len() - 1;
    if k == 0 {
        return one();
    }
    let m: Vec<Vec<Q>> = (0..k)
        .map(|i| (0..k).map(|j| &vertices[j + 1][i] - &vertices[0][i]).collect())
        .collect();
    det(m) / factorial(k)
}

/// Triangulates `simplex ∩ {f ≥ 0}` where the simplex has full dimension in its
/// parameter space. Lower-dimensional pieces are discarded.
pub fn clip(simplex: &[Point], f: &Affine) -> Vec<Vec<Point>> {
    let vals: Vec<Q> = simplex.iter().map(|p| f.eval(p)).collect();
    let mut out = clip_with_values(simplex, &vals);
    out.retain(|s| !signed_volume(s).is_zero());
    out
}

fn clip_with_values(simplex: &[Point], vals: &[Q]) -> Vec<Vec<Point>> {
    if vals.iter().all(|v| !v.is_negative()) {
        return vec![simplex.to_vec()];
    }
    let Some(apex) = vals.iter().position(|v| v.is_positive()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let opposite: Vec<Point> = remove(simplex, apex);
    let opposite_vals: Vec<Q> = remove(vals, apex);
    if simplex.len() > 1 {
        for piece in clip_with_values(&opposite, &opposite_vals) {
            out.push(cone(&simplex[apex], piece));
        }
        for piece in section(simplex, vals) {
            out.push(cone(&simplex[apex], piece));
        }
    }
    out
}

/// Triangulation of `simplex ∩ {f = 0}` when the hyperplane separates two vertices.
fn section(simplex: &[Point], vals: &[Q]) -> Vec<Vec<Point>> {
    let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_positive()).collect();
    let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_negative()).collect();
    if pos.is_empty() || neg.is_empty() {
        return facet_of_zeros(simplex, vals);
    }
    if simplex.len() == 2 {
        return vec![vec![crossing(simplex, vals, pos[0], neg[0])]];
    }
    let mut out = Vec::new();
    if let Some(z) = vals.iter().position(|v| v.is_zero()) {
        let sub = remove(simplex, z);
        let sv = remove(vals, z);
        for piece in section(&sub, &sv) {
            out.push(cone(&simplex[z], piece));
        }
        return out;
    }
    let (p, n) = (pos[0], neg[0]);
    let c = crossing(simplex, vals, p, n);
    for drop in [p, n] {
        let sub = remove(simplex, drop);
        let sv = remove(vals, drop);
        for piece in section(&sub, &sv) {
            out.push(cone(&c, piece));
        }
    }
    out
}

/// The zero face of a facet lying inside the hyperplane, if it has full facet dimension.
fn facet_of_zeros(simplex: &[Point], vals: &[Q]) -> Vec<Vec<Point>> {
    let zeros: Vec<Point> = simplex
        .iter()
        .zip(vals)
        .filter(|(_, v)| v.is_zero())
        .map(|(p, _)| p.clone())
        .collect();
    if zeros.len() + 1 == simplex.len() {
        vec![zeros]
    } else {
        Vec::new()
    }
}

fn crossing(simplex: &[Point], vals: &[Q], p: usize, n: usize) -> Point {
    let t = &vals[p] / (&vals[p] - &vals[n]);
    simplex[p]
        .iter()
        .zip(&simplex[n])
        .map(|(a, b)| a + &t * (b - a))
        .collect()
}

fn cone(apex: &Point, mut base: Vec<Point>) -> Vec<Point> {
    base.insert(0, apex.clone());
    base
}

fn remove<T: Clone>(v: &[T], i: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, x)| x.clone())
        .collect()
}

/// Clips by several half-spaces in turn.
pub fn clip_all(simplex: &[Point], fs: &[Affine]) -> Vec<Vec<Point>> {
    let mut pieces = vec![simplex.to_vec()];
    for f in fs {
        pieces = pieces.iter().flat_map(|s| clip(s, f)).collect();
        if pieces.is_empty() {
            break;
        }
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn pt(c: &[i64]) -> Point {
        c.iter().map(|&v| q(v)).collect()
    }

    #[test]
    fn barycentric_of_embedded_edge() {
        let frame = SimplexFrame::new(&[pt(&[0, 0, 0]), pt(&[2, 0, 0])]).unwrap();
        let c = frame.coords(&pt(&[1, 0, 0])).unwrap();
        assert_eq!(c, vec![qr(1, 2), qr(1, 2)]);
        assert!(frame.coords(&pt(&[1, 1, 0])).is_none());
        assert!(!frame.contains(&pt(&[3, 0, 0])));
    }

    #[test]
    fn dependent_vertices_have_no_frame() {
        assert!(SimplexFrame::new(&[pt(&[0, 0]), pt(&[1, 1]), pt(&[2, 2])]).is_none());
    }

    #[test]
    fn clipping_preserves_area() {
        let tri = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])];
        // x − 1/3 ≥ 0 keeps area (2/3)²/2.
        let f = Affine { c: qr(-1, 3), lin: vec![q(1), q(0)] };
        let pieces = clip(&tri, &f);
        let area: Q = pieces.iter().map(|p| signed_volume(p).abs()).sum();
        assert_eq!(area, qr(2, 9));
        let g = Affine { c: qr(1, 3), lin: vec![q(-1), q(0)] };
        let rest: Q = clip(&tri, &g).iter().map(|p| signed_volume(p).abs()).sum();
        assert_eq!(area + rest, qr(1, 2));
    }

    #[test]
    fn clipping_tetrahedron_through_a_vertex() {
        let tet = vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])];
        let f = Affine { c: q(0), lin: vec![q(1), q(-1), q(0)] };
        let g = Affine { c: q(0), lin: vec![q(-1), q(1), q(0)] };
        let a: Q = clip(&tet, &f).iter().map(|p| signed_volume(p).abs()).sum();
        let b: Q = clip(&tet, &g).iter().map(|p| signed_volume(p).abs()).sum();
        assert_eq!(a, qr(1, 12));
        assert_eq!(a + b, qr(1, 6));
    }
}
