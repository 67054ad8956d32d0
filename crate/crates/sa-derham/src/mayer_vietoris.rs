//! The Mayer–Vietoris sequence `0 → Ω(X) → Ω(A₁) ⊕ Ω(A₂) → Ω(A₁ ∩ A₂) → 0`
//! checked on a finite slice of forms.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chain::Chain;
use crate::cohomology::{cohomology_ranks, numerical_rank, pairing_matrix, simplex_probes, GeneratedComplexSlice};
use crate::complex::{staircase_product, GeoComplex, Simplex};
use crate::continuous::ContinuousChain;
use crate::error::{Error, Result};
use crate::function::{pl_partition_of_unity, PartitionOfUnity, SAFunction, SAMap};
use crate::homotopy::unit_interval;
use crate::minimal::MinimalForm;
use crate::pa::PAForm;

/// Two subcomplexes covering `X`, their intersection and a PL partition of
/// unity subordinate to them.
#[derive(Clone, Debug)]
pub struct Cover {
    whole: Arc<GeoComplex>,
    parts: [Arc<GeoComplex>; 2],
    intersection: Arc<GeoComplex>,
    partition: PartitionOfUnity,
}

impl Cover {
    pub fn new(whole: &Arc<GeoComplex>, a1: &Arc<GeoComplex>, a2: &Arc<GeoComplex>) -> Result<Self> {
        for a in [a1, a2] {
            if !a.is_subcomplex_of(whole) {
                return Err(Error::IncompatibleInputs("cover member is not a subcomplex".into()));
            }
        }
        let partition = pl_partition_of_unity(whole, a1, a2)?;
        let common: Vec<Simplex> = a1.simplices().filter(|s| a2.contains(s)).cloned().collect();
        if common.is_empty() {
            return Err(Error::NotExcisive("the two sets do not meet".into()));
        }
        let intersection = whole.subcomplex(&common)?;
        Ok(Cover { whole: whole.clone(), parts: [a1.clone(), a2.clone()], intersection, partition })
    }

    pub fn whole(&self) -> &Arc<GeoComplex> {
        &self.whole
    }

    pub fn parts(&self) -> &[Arc<GeoComplex>; 2] {
        &self.parts
    }

    pub fn intersection(&self) -> &Arc<GeoComplex> {
        &self.intersection
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.partition
    }

    /// `r(α) = (α|A₁, α|A₂)`.
    pub fn restrict(&self, alpha: &PAForm) -> Result<[PAForm; 2]> {
        Ok([alpha.restrict_to(&self.parts[0])?, alpha.restrict_to(&self.parts[1])?])
    }

    /// `Δ(α₁, α₂) = α₁|A₁₂ − α₂|A₁₂`.
    pub fn difference(&self, pair: &[PAForm; 2]) -> Result<PAForm> {
        pair[0].restrict_to(&self.intersection)?.sub(&pair[1].restrict_to(&self.intersection)?)
    }

    /// `(ρ₂·α, −ρ₁·α)`, a preimage of `α|A₁₂` under `Δ`. The form `α` lives on
    /// `X`; only its values near the intersection matter.
    pub fn split(&self, alpha: &PAForm) -> Result<[PAForm; 2]> {
        let [rho1, rho2] = &self.partition.rho;
        Ok([
            alpha.multiply(rho2)?.restrict_to(&self.parts[0])?,
            alpha.multiply(rho1)?.neg().restrict_to(&self.parts[1])?,
        ])
    }

    /// A form on `X` restricting to a compatible pair.
    ///
    /// Each term `∮_{⟨⟨F⟩⟩} μ` of `αᵢ` becomes `∮_Ψ (ρᵢ∘pr)·(μ × dt)` with
    /// `Ψ(x) = F × [0, σᵢ(x)]`, where `ρᵢ` is the shrunk partition and `σᵢ`
    /// the plateau function equal to one on its support. The families must be
    /// constant and `μ` must be defined over all of `X`.
    pub fn glue(&self, pair: &[PAForm; 2]) -> Result<PAForm> {
        let degree = pair[0].degree();
        if pair[1].degree() != degree {
            return Err(Error::DegreeMismatch("glued forms have different degrees".into()));
        }
        let mut total = PAForm::zero(&self.whole, degree);
        for (i, alpha) in pair.iter().enumerate() {
            if alpha.base().id() != self.parts[i].id() {
                return Err(Error::IncompatibleInputs("glued form lives on another complex".into()));
            }
            for t in alpha.terms() {
                let piece = self.spread(&t.phi, &t.mu, &self.partition.shrunk[i], &self.partition.plateau[i])?;
                total = total.add(&piece)?;
            }
        }
        Ok(total)
    }

    fn spread(&self, phi: &ContinuousChain, mu: &MinimalForm, weight: &SAFunction, plateau: &SAFunction) -> Result<PAForm> {
        let (fiber_complex, fiber) =
            phi.constant_fiber().ok_or_else(|| Error::SupportUnverifiable("gluing a stratified family".into()))?;
        let x = &self.whole;
        let n = x.ambient_dim();
        let m = fiber_complex.ambient_dim();
        let interval = &unit_interval();
        let edge = Chain::fundamental(interval)?;
        let padded = staircase_product(fiber_complex, interval);
        let padded_fiber = fiber.cross(&edge);
        let strata = x
            .top_simplices()
            .iter()
            .map(|top| {
                ContinuousChain::stratum(x, top.clone(), &padded.complex, padded_fiber.clone(), |dom| {
                    let c = &dom.complex;
                    let coord = |i: usize| SAFunction::coordinate(c, i);
                    let base_part = SAMap::new(c, (0..n).map(coord).collect());
                    let height = plateau.compose(&base_part).mul(&coord(n + m));
                    SAMap::new(c, (0..n + m).map(coord).chain(std::iter::once(height)).collect())
                })
            })
            .collect();
        let family = ContinuousChain::stratified(x, phi.fiber_degree() + 1, n + m + 1, strata)?;
        let dt = MinimalForm::generator(interval, vec![SAFunction::one(interval), SAFunction::coordinate(interval, 0)]);
        let crossed = mu.cross(&dt);
        let dom = crossed.domain();
        let base_part = SAMap::new(dom, (0..n).map(|i| SAFunction::coordinate(dom, i)).collect());
        PAForm::fiber_integral(family, crossed.multiply(&weight.compose(&base_part)))
    }
}

/// Probe ranks of one degree: the slice on `X` against its restrictions.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionRanks {
    pub degree: usize,
    pub whole: usize,
    pub restricted: usize,
}

#[derive(Clone, Debug)]
pub struct MayerVietorisReport {
    pub ranks: Vec<RestrictionRanks>,
    /// Largest `|⟨Δ r α, γ⟩|` over slice forms and intersection probes.
    pub difference_residual: f64,
    /// Largest `|⟨Δ(split α) − α, γ⟩|` on intersection probes.
    pub witness_residual: f64,
    /// Largest `|⟨glue(r α) − α, γ⟩|` over probes of either set.
    pub gluing_residual: f64,
    /// Slice betti numbers on `X`, `A₁`, `A₂` and `A₁ ∩ A₂`.
    pub betti: [Vec<usize>; 4],
    pub warnings: Vec<String>,
}

impl MayerVietorisReport {
    pub fn injective(&self) -> bool {
        self.ranks.iter().all(|r| r.whole == r.restricted)
    }

    /// `Σ_k (−1)^k (b_k(X) − b_k(A₁) − b_k(A₂) + b_k(A₁₂))`, zero for an exact
    /// long sequence.
    pub fn euler_defect(&self) -> i64 {
        let top = self.betti.iter().map(Vec::len).max().unwrap_or(0);
        let at = |v: &Vec<usize>, k: usize| v.get(k).copied().unwrap_or(0) as i64;
        (0..top)
            .map(|k| {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let [x, a1, a2, a12] = &self.betti;
                sign * (at(x, k) - at(a1, k) - at(a2, k) + at(a12, k))
            })
            .sum()
    }
}

fn max_residual(forms: &[PAForm], targets: &[PAForm], probes: &[Chain]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (a, b) in forms.iter().zip(targets) {
        for g in probes {
            worst = worst.max((a.pair(g)? - b.pair(g)?).abs());
        }
    }
    Ok(worst)
}

/// Checks the sequence on every form of a slice over `X`.
pub fn mayer_vietoris(a1: &Arc<GeoComplex>, a2: &Arc<GeoComplex>, slice: &GeneratedComplexSlice) -> Result<MayerVietorisReport> {
    let cover = Cover::new(slice.base(), a1, a2)?;
    let probes_x = slice.probes();
    let probes = cover.parts.each_ref().map(simplex_probes);
    let probes_12 = simplex_probes(&cover.intersection);
    let mut ranks = Vec::new();
    let (mut difference_residual, mut witness_residual, mut gluing_residual) = (0.0f64, 0.0f64, 0.0f64);
    for d in 0..=slice.top_degree() {
        let forms = slice.forms(d);
        let empty = Vec::new();
        let whole = numerical_rank(&pairing_matrix(forms, probes_x.get(d).unwrap_or(&empty))?).0;
        let restricted: Vec<[PAForm; 2]> = forms.iter().map(|f| cover.restrict(f)).collect::<Result<_>>()?;
        let column = |i: usize| -> Result<DMatrix<f64>> {
            let fs: Vec<PAForm> = restricted.iter().map(|p| p[i].clone()).collect();
            pairing_matrix(&fs, probes[i].get(d).unwrap_or(&empty))
        };
        let (m1, m2) = (column(0)?, column(1)?);
        let stacked = DMatrix::from_fn(forms.len(), m1.ncols() + m2.ncols(), |r, c| {
            if c < m1.ncols() {
                m1[(r, c)]
            } else {
                m2[(r, c - m1.ncols())]
            }
        });
        ranks.push(RestrictionRanks { degree: d, whole, restricted: numerical_rank(&stacked).0 });

        let on_12 = probes_12.get(d).unwrap_or(&empty);
        let zeros = vec![PAForm::zero(&cover.intersection, d); forms.len()];
        let differences: Vec<PAForm> = restricted.iter().map(|p| cover.difference(p)).collect::<Result<_>>()?;
        difference_residual = difference_residual.max(max_residual(&differences, &zeros, on_12)?);

        let targets: Vec<PAForm> = forms.iter().map(|f| f.restrict_to(&cover.intersection)).collect::<Result<_>>()?;
        let witnesses: Vec<PAForm> =
            forms.iter().map(|f| cover.difference(&cover.split(f)?)).collect::<Result<_>>()?;
        witness_residual = witness_residual.max(max_residual(&witnesses, &targets, on_12)?);

        let glued: Vec<PAForm> = restricted.iter().map(|p| cover.glue(p)).collect::<Result<_>>()?;
        for i in 0..2 {
            let back: Vec<PAForm> = glued.iter().map(|g| g.restrict_to(&cover.parts[i])).collect::<Result<_>>()?;
            let expected: Vec<PAForm> = restricted.iter().map(|p| p[i].clone()).collect();
            gluing_residual = gluing_residual.max(max_residual(&back, &expected, probes[i].get(d).unwrap_or(&empty))?);
        }
    }
    let whole = cohomology_ranks(slice)?;
    let mut warnings = whole.warnings.clone();
    let mut betti = [whole.betti(), Vec::new(), Vec::new(), Vec::new()];
    for (slot, sub) in [&cover.parts[0], &cover.parts[1], &cover.intersection].into_iter().enumerate() {
        let report = cohomology_ranks(&slice.restrict_to(sub)?)?;
        warnings.extend(report.warnings.iter().cloned());
        betti[slot + 1] = report.betti();
    }
    Ok(MayerVietorisReport { ranks, difference_residual, witness_residual, gluing_residual, betti, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{barycentric_subdivision, square_boundary, subdivided_interval, OrientedSimplex};
    use crate::poly::Poly;
    use crate::rational::{q, qr, Q};

    fn lam(k: &Arc<GeoComplex>, fs: Vec<SAFunction>) -> PAForm {
        PAForm::from_minimal(&MinimalForm::generator(k, fs))
    }

    fn hat(k: &Arc<GeoComplex>, v: usize) -> PAForm {
        let values: Vec<Q> = (0..k.num_vertices()).map(|i| if i == v { q(1) } else { q(0) }).collect();
        lam(k, vec![SAFunction::pl(k, &values)])
    }

    fn vertex_at(k: &GeoComplex, p: &[Q]) -> usize {
        (0..k.num_vertices()).find(|&i| k.vertex(i).as_slice() == p).expect("vertex present")
    }

    fn part_without(k: &Arc<GeoComplex>, v: usize) -> Arc<GeoComplex> {
        let tops: Vec<Simplex> = k.top_simplices().iter().filter(|t| !t.vertices().contains(&v)).cloned().collect();
        k.subcomplex(&tops).unwrap()
    }

    fn assert_clean(report: &MayerVietorisReport) {
        assert!(report.injective(), "{:?}", report.ranks);
        assert!(report.difference_residual <= 1e-10, "{}", report.difference_residual);
        assert!(report.witness_residual <= 1e-9, "{}", report.witness_residual);
        assert!(report.gluing_residual <= 1e-8, "{}", report.gluing_residual);
        assert_eq!(report.euler_defect(), 0, "{:?}", report.betti);
    }

    #[test]
    fn trivial_cover_by_the_whole_complex() {
        let k = subdivided_interval(q(0), q(1), 2);
        let x = SAFunction::coordinate(&k, 0);
        let slice = GeneratedComplexSlice::new(&k, &k, vec![lam(&k, vec![SAFunction::one(&k)]), lam(&k, vec![x.clone()]), lam(&k, vec![x.mul(&x)])]).unwrap();
        let report = mayer_vietoris(&k, &k, &slice).unwrap();
        assert_clean(&report);
        assert_eq!(report.betti[0], vec![1, 0]);
    }

    #[test]
    fn interval_covered_by_two_subintervals() {
        let k = subdivided_interval(q(0), q(2), 4);
        let a1 = k.subcomplex(&[Simplex::new(vec![0, 1]), Simplex::new(vec![1, 2]), Simplex::new(vec![2, 3])]).unwrap();
        let a2 = k.subcomplex(&[Simplex::new(vec![1, 2]), Simplex::new(vec![2, 3]), Simplex::new(vec![3, 4])]).unwrap();
        let x = SAFunction::coordinate(&k, 0);
        let gens = vec![lam(&k, vec![SAFunction::one(&k)]), lam(&k, vec![SAFunction::one(&k), x.clone()]), lam(&k, vec![x.clone()])];
        let slice = GeneratedComplexSlice::new(&k, &k, gens).unwrap();
        let report = mayer_vietoris(&a1, &a2, &slice).unwrap();
        assert_clean(&report);
        assert_eq!(report.betti, [vec![1, 0], vec![1, 0], vec![1, 0], vec![1, 0]]);
    }

    #[test]
    fn square_boundary_has_one_loop() {
        let x = barycentric_subdivision(&square_boundary()).complex;
        let top_mid = vertex_at(&x, &[qr(1, 2), q(1)]);
        let bottom_mid = vertex_at(&x, &[qr(1, 2), q(0)]);
        let (a1, a2) = (part_without(&x, top_mid), part_without(&x, bottom_mid));
        let (px, py) = (Poly::var(2, 0), Poly::var(2, 1));
        let g = Poly::one(2).sub(&py.scale(&q(2))).scale(&qr(1, 4));
        let h = px.scale(&q(2)).sub(&Poly::one(2)).scale(&qr(1, 4));
        let poly = |p: Poly| SAFunction::polynomial(&x, p);
        let alpha = lam(&x, vec![poly(g), poly(px.clone())]).add(&lam(&x, vec![poly(h), poly(py.clone())])).unwrap();
        let mut gens: Vec<PAForm> = (0..x.num_vertices()).map(|v| hat(&x, v)).collect();
        gens.push(alpha.clone());
        let slice = GeneratedComplexSlice::new(&x, &x, gens).unwrap();
        let report = mayer_vietoris(&a1, &a2, &slice).unwrap();
        assert_clean(&report);
        assert_eq!(report.betti[0], vec![1, 1]);
        assert_eq!(report.betti[3], vec![2, 0]);

        // A compatible pair not coming from a single restriction.
        let cover = Cover::new(&x, &a1, &a2).unwrap();
        let [r1, r2] = cover.restrict(&alpha).unwrap();
        let bump = hat(&x, bottom_mid).restrict_to(&a1).unwrap();
        let glued = cover.glue(&[bump.clone(), PAForm::zero(&a2, 0)]).unwrap();
        for v in a1.simplices_of_dim(0) {
            let probe = Chain::simplex(&a1, &OrientedSimplex::positive(v.clone()));
            assert!((glued.pair(&probe).unwrap() - bump.pair(&probe).unwrap()).abs() < 1e-12);
        }
        let glued = cover.glue(&[r1, r2]).unwrap();
        for e in &simplex_probes(&x)[1] {
            assert!((glued.pair(e).unwrap() - alpha.pair(e).unwrap()).abs() < 1e-9);
        }
    }
}
