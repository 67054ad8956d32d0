//! Finite slices of the PA cochain complex and their pairing-matrix ranks.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::chain::Chain;
use crate::complex::{GeoComplex, OrientedSimplex};
use crate::error::{Error, Result};
use crate::pa::PAForm;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Warn when the kept and dropped singular values are closer than this factor.
pub const GAP_WARNING: f64 = 10.0;

/// Forms on one base, grouped by degree and closed under `δ` modulo forms that
/// pair to zero with every probe.
#[derive(Clone, Debug)]
pub struct GeneratedComplexSlice {
    base: Arc<GeoComplex>,
    probe_complex: Arc<GeoComplex>,
    forms: Vec<Vec<PAForm>>,
}

/// Identity simplices of a complex, positively oriented, grouped by dimension.
pub fn simplex_probes(complex: &Arc<GeoComplex>) -> Vec<Vec<Chain>> {
    let mut out = vec![Vec::new(); complex.dim() + 1];
    for s in complex.simplices() {
        out[s.dim()].push(Chain::simplex(complex, &OrientedSimplex::positive(s.clone())));
    }
    out
}

/// `⟨form_i, probe_j⟩` assembled in parallel.
pub fn pairing_matrix(forms: &[PAForm], probes: &[Chain]) -> Result<DMatrix<f64>> {
    let entries: Vec<Result<f64>> = (0..forms.len() * probes.len())
        .into_par_iter()
        .map(|e| forms[e / probes.len()].pair(&probes[e % probes.len()]))
        .collect();
    let values = entries.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(DMatrix::from_row_slice(forms.len(), probes.len(), &values))
}

/// Numerical rank with the relative threshold, and the ratio between the
/// smallest kept and the largest dropped singular value.
pub fn numerical_rank(m: &DMatrix<f64>) -> (usize, f64) {
    if m.is_empty() {
        return (0, f64::INFINITY);
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv[0];
    if top == 0.0 {
        return (0, f64::INFINITY);
    }
    let rank = sv.iter().take_while(|&&s| s > RANK_THRESHOLD * top).count();
    let gap = match (rank.checked_sub(1).map(|i| sv[i]), sv.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    };
    (rank, gap)
}

impl GeneratedComplexSlice {
    /// Closes the generators under `δ`, probing with simplices of `probe_complex`
    /// (the base or a refinement of it). A coboundary is added only when it
    /// raises the pairing rank of its degree.
    pub fn new(base: &Arc<GeoComplex>, probe_complex: &Arc<GeoComplex>, generators: Vec<PAForm>) -> Result<Self> {
        let top = base.dim();
        let mut forms: Vec<Vec<PAForm>> = vec![Vec::new(); top + 1];
        for g in generators {
            if g.base().id() != base.id() {
                return Err(Error::IncompatibleInputs("slice generator on another base".into()));
            }
            if g.degree() <= top {
                forms[g.degree()].push(g);
            }
        }
        let probes = simplex_probes(probe_complex);
        for d in 0..top {
            let mut current = pairing_matrix(&forms[d + 1], &probes[d + 1])?;
            let mut rank = numerical_rank(&current).0;
            let candidates: Vec<PAForm> = forms[d].iter().map(PAForm::coboundary).collect();
            for c in candidates {
                let row = pairing_matrix(std::slice::from_ref(&c), &probes[d + 1])?;
                let extended = DMatrix::from_fn(current.nrows() + 1, current.ncols(), |i, j| {
                    if i < current.nrows() {
                        current[(i, j)]
                    } else {
                        row[(0, j)]
                    }
                });
                let r = numerical_rank(&extended).0;
                if r > rank {
                    rank = r;
                    current = extended;
                    forms[d + 1].push(c);
                }
            }
        }
        Ok(GeneratedComplexSlice { base: base.clone(), probe_complex: probe_complex.clone(), forms })
    }

    /// Restrictions of all forms to a subcomplex, probed by its simplices.
    pub fn restrict_to(&self, sub: &Arc<GeoComplex>) -> Result<Self> {
        let forms = self
            .forms
            .iter()
            .map(|fs| fs.iter().map(|f| f.restrict_to(sub)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratedComplexSlice { base: sub.clone(), probe_complex: sub.clone(), forms })
    }

    pub fn base(&self) -> &Arc<GeoComplex> {
        &self.base
    }

    pub fn probe_complex(&self) -> &Arc<GeoComplex> {
        &self.probe_complex
    }

    pub fn forms(&self, degree: usize) -> &[PAForm] {
        self.forms.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn top_degree(&self) -> usize {
        self.forms.len().saturating_sub(1)
    }

    pub fn probes(&self) -> Vec<Vec<Chain>> {
        simplex_probes(&self.probe_complex)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeRanks {
    pub degree: usize,
    pub forms: usize,
    /// Rank of forms × probes: the dimension the slice spans in this degree.
    pub pairing_rank: usize,
    /// Rank of `δ` out of this degree.
    pub coboundary_rank: usize,
    pub closed_rank: usize,
    pub exact_rank: usize,
    pub betti: usize,
    /// Smallest spectral gap met at the threshold among the matrices used.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyReport {
    pub degrees: Vec<DegreeRanks>,
    pub warnings: Vec<String>,
}

impl CohomologyReport {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }
}

/// `betti_d = rank P_d − rank δ_d − rank δ_{d−1}` with `P_d` the pairing matrix
/// of degree-`d` forms and `δ_d` the pairing matrix of their coboundaries.
pub fn cohomology_ranks(slice: &GeneratedComplexSlice) -> Result<CohomologyReport> {
    let probes = slice.probes();
    let top = slice.top_degree();
    let mut pairing = Vec::with_capacity(top + 1);
    let mut coboundary = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let fs = slice.forms(d);
        let empty = Vec::new();
        pairing.push(numerical_rank(&pairing_matrix(fs, probes.get(d).unwrap_or(&empty))?));
        let next = probes.get(d + 1).unwrap_or(&empty);
        let deltas: Vec<PAForm> = if next.is_empty() { Vec::new() } else { fs.iter().map(PAForm::coboundary).collect() };
        coboundary.push(numerical_rank(&pairing_matrix(&deltas, next)?));
    }
    let mut degrees = Vec::with_capacity(top + 1);
    let mut warnings = Vec::new();
    for d in 0..=top {
        let (p, gp) = pairing[d];
        let (c, gc) = coboundary[d];
        let (e, ge) = if d > 0 { coboundary[d - 1] } else { (0, f64::INFINITY) };
        let gap = gp.min(gc).min(ge);
        if gap < GAP_WARNING {
            warnings.push(format!("degree {d}: spectral gap {gap:.3e} at the rank threshold"));
        }
        let closed = p.saturating_sub(c);
        degrees.push(DegreeRanks {
            degree: d,
            forms: slice.forms(d).len(),
            pairing_rank: p,
            coboundary_rank: c,
            closed_rank: closed,
            exact_rank: e,
            betti: closed.saturating_sub(e),
            gap,
        });
    }
    Ok(CohomologyReport { degrees, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{square_boundary, standard_simplex};
    use crate::function::SAFunction;
    use crate::minimal::MinimalForm;
    use crate::poly::Poly;
    use crate::rational::{q, qr};

    fn lam(k: &Arc<GeoComplex>, fs: Vec<Poly>) -> PAForm {
        PAForm::from_minimal(&MinimalForm::generator(k, fs.into_iter().map(|p| SAFunction::polynomial(k, p)).collect()))
    }

    #[test]
    fn empty_slice_has_no_cohomology() {
        let k = standard_simplex(2);
        let slice = GeneratedComplexSlice::new(&k, &k, Vec::new()).unwrap();
        assert_eq!(cohomology_ranks(&slice).unwrap().betti(), vec![0, 0, 0]);
    }

    #[test]
    fn triangle_slice_is_acyclic() {
        let k = standard_simplex(2);
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let mut gens = vec![lam(&k, vec![Poly::one(2)]), lam(&k, vec![x.clone()]), lam(&k, vec![y.clone()])];
        gens.push(lam(&k, vec![x.mul(&y)]));
        gens.push(lam(&k, vec![Poly::one(2), x.clone(), y.clone()]));
        gens.push(lam(&k, vec![x.clone(), y.clone()]));
        let slice = GeneratedComplexSlice::new(&k, &k, gens).unwrap();
        let report = cohomology_ranks(&slice).unwrap();
        assert_eq!(report.betti(), vec![1, 0, 0]);
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }

    #[test]
    fn square_loop_form_is_a_nontrivial_class() {
        let k = square_boundary();
        let (x, y) = (Poly::var(2, 0), Poly::var(2, 1));
        let g = Poly::one(2).sub(&y.scale(&q(2))).scale(&qr(1, 4));
        let h = x.scale(&q(2)).sub(&Poly::one(2)).scale(&qr(1, 4));
        let alpha = lam(&k, vec![g, x.clone()]).add(&lam(&k, vec![h, y.clone()])).unwrap();
        let loop_chain = Chain::combination(&k, 1, vec![(crate::complex::Simplex::new(vec![0, 1]), 1), (crate::complex::Simplex::new(vec![1, 2]), 1), (crate::complex::Simplex::new(vec![2, 3]), 1), (crate::complex::Simplex::new(vec![0, 3]), -1)]);
        assert!((alpha.pair(&loop_chain).unwrap() - 1.0).abs() < 1e-12);
        let gens = vec![lam(&k, vec![Poly::one(2)]), lam(&k, vec![x.clone()]), lam(&k, vec![y.clone()]), lam(&k, vec![x.mul(&y)]), alpha];
        let report = cohomology_ranks(&GeneratedComplexSlice::new(&k, &k, gens).unwrap()).unwrap();
        assert_eq!(report.betti(), vec![1, 1]);
    }
}
