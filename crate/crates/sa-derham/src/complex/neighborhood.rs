use std::collections::BTreeSet;
use std::sync::Arc;

use super::{barycentric_subdivision, GeoComplex, Simplex, Subdivision};

/// Second barycentric subdivision with ancestry back to the base complex.
#[derive(Clone, Debug)]
pub struct SecondDerived {
    pub first: Subdivision,
    pub second: Subdivision,
}

impl SecondDerived {
    pub fn new(base: &Arc<GeoComplex>) -> Self {
        let first = barycentric_subdivision(base);
        let second = barycentric_subdivision(&first.complex);
        SecondDerived { first, second }
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.first.parent
    }

    pub fn complex(&self) -> &Arc<GeoComplex> {
        &self.second.complex
    }

    /// Smallest base simplex containing a simplex of the second subdivision.
    pub fn base_carrier(&self, s: &Simplex) -> Simplex {
        self.first.carrier(&self.second.carrier(s))
    }

    /// Union of the closed stars of all second-subdivision vertices lying in `sigma`.
    pub fn neighborhood(&self, sigma: &Simplex) -> BTreeSet<Simplex> {
        let k2 = self.complex();
        let mut out = BTreeSet::new();
        for s in k2.simplices() {
            if s.iter().any(|&v| self.base_carrier(&Simplex(vec![v])).is_face_of(sigma)) {
                out.extend(s.faces());
            }
        }
        out
    }

    /// The neighborhood as a subcomplex of the second subdivision.
    pub fn neighborhood_complex(&self, sigma: &Simplex) -> Arc<GeoComplex> {
        let simplices = self.neighborhood(sigma);
        let maximal: Vec<Simplex> = simplices
            .iter()
            .filter(|s| !simplices.iter().any(|t| t.len() > s.len() && s.is_face_of(t)))
            .cloned()
            .collect();
        GeoComplex::new_trusted(self.complex().ambient_dim(), self.complex().vertices().to_vec(), maximal)
    }
}

/// `N(σ)` inside the second subdivision of `k`.
pub fn second_derived_neighborhood(k: &Arc<GeoComplex>, sigma: &Simplex) -> (SecondDerived, Arc<GeoComplex>) {
    let sd = SecondDerived::new(k);
    let n = sd.neighborhood_complex(sigma);
    (sd, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{find_collapse, standard_simplex};
    use crate::rational::{qr, Q};

    #[test]
    fn vertex_neighborhood_on_an_edge_is_a_quarter() {
        let k = standard_simplex(1);
        let (_, n) = second_derived_neighborhood(&k, &Simplex::new(vec![0]));
        assert_eq!(n.top_simplices().len(), 1);
        let e = &n.top_simplices()[0];
        let mut xs: Vec<Q> = n.points(e).into_iter().map(|p| p[0].clone()).collect();
        xs.sort();
        assert_eq!(xs, vec![qr(0, 1), qr(1, 4)]);
    }

    #[test]
    fn neighborhoods_intersect_like_simplices() {
        let k = standard_simplex(2);
        let sd = SecondDerived::new(&k);
        let simplices: Vec<Simplex> = k.simplices().cloned().collect();
        for a in &simplices {
            for b in &simplices {
                let na = sd.neighborhood(a);
                let nb = sd.neighborhood(b);
                let both: BTreeSet<Simplex> = na.intersection(&nb).cloned().collect();
                let meet = a.intersection(b);
                let want = if meet.is_empty() { BTreeSet::new() } else { sd.neighborhood(&meet) };
                assert_eq!(both, want, "{a:?} ∩ {b:?}");
            }
        }
    }

    #[test]
    fn whole_simplex_neighborhood_is_everything() {
        let k = standard_simplex(2);
        let sd = SecondDerived::new(&k);
        let all: BTreeSet<Simplex> = sd.complex().simplices().cloned().collect();
        assert_eq!(sd.neighborhood(&Simplex::new(vec![0, 1, 2])), all);
    }

    #[test]
    fn neighborhood_collapses_onto_its_simplex() {
        let k = standard_simplex(2);
        let sd = SecondDerived::new(&k);
        let sigma = Simplex::new(vec![0, 1]);
        let n = sd.neighborhood_complex(&sigma);
        // σ inside the second subdivision: all simplices carried by faces of σ.
        let inside: Vec<Simplex> = n
            .simplices()
            .filter(|s| sd.base_carrier(s).is_face_of(&sigma))
            .cloned()
            .collect();
        let target = n.subcomplex(&inside).unwrap();
        let seq = find_collapse(&n, &target, 10_000).unwrap();
        seq.replay().unwrap();
    }
}
