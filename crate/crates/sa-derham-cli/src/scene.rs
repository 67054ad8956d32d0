//! Scene registries: every object built once, cross-references resolved by id.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use sa_derham::bundle::SABundle;
use sa_derham::chain::{Chain, ChainTerm};
use sa_derham::cohomology::GeneratedComplexSlice;
use sa_derham::complex::{
    barycentric_subdivision, find_collapse, square_boundary, standard_simplex, staircase_product, subdivided_interval,
    GeoComplex, OrientedSimplex, Simplex, DEFAULT_COLLAPSE_BUDGET,
};
use sa_derham::continuous::{stratum_domain, ContinuousChain, Stratum};
use sa_derham::function::{SAFunction, SAMap};
use sa_derham::homotopy::{collapse_plan, star_shaped_plan, CollapseHomotopyPlan};
use sa_derham::minimal::MinimalForm;
use sa_derham::pa::PAForm;
use sa_derham::poly::Poly;
use sa_derham::ratfn::RatFn;
use sa_derham::rational::{from_f64, parse_q, q, Q};

use crate::error::{CliError, CliResult};
use crate::layout::*;

/// A map bound to its complex, or polynomial components placed on whatever
/// complex needs them.
#[derive(Clone, Debug)]
pub enum MapEntry {
    Bound(Arc<SAMap>),
    Polynomial(Vec<Poly>),
}

#[derive(Debug, Default)]
pub struct Scene {
    pub seed: u64,
    pub complexes: BTreeMap<String, Arc<GeoComplex>>,
    pub functions: BTreeMap<String, SAFunction>,
    pub maps: BTreeMap<String, MapEntry>,
    pub chains: BTreeMap<String, Chain>,
    pub forms: BTreeMap<String, MinimalForm>,
    pub continuous_chains: BTreeMap<String, ContinuousChain>,
    pub pa_forms: BTreeMap<String, PAForm>,
    pub bundles: BTreeMap<String, SABundle>,
    pub plans: BTreeMap<String, CollapseHomotopyPlan>,
    pub slices: BTreeMap<String, GeneratedComplexSlice>,
    pub tasks: Vec<TaskLayout>,
}

pub fn number(kind: &'static str, id: &str, n: &Number) -> CliResult<Q> {
    match n {
        Number::Int(i) => Ok(q(*i)),
        Number::Float(f) if f.is_finite() => Ok(from_f64(*f)),
        Number::Float(f) => Err(CliError::invalid(kind, id, format!("non-finite number {f}"))),
        Number::Text(s) => parse_q(s).map_err(|e| CliError::Library { kind, id: id.to_string(), source: e }),
    }
}

fn index_list(kind: &'static str, id: &str, key: &str) -> CliResult<Vec<usize>> {
    if key.trim().is_empty() {
        return Ok(Vec::new());
    }
    key.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::invalid(kind, id, format!("bad index list '{key}'"))))
        .collect()
}

pub fn polynomial(kind: &'static str, id: &str, nvars: usize, raw: &PolyLayout) -> CliResult<Poly> {
    let mut terms = Vec::with_capacity(raw.len());
    for (key, coeff) in raw {
        let exps: Vec<u32> = index_list(kind, id, key)?.into_iter().map(|e| e as u32).collect();
        if exps.len() != nvars {
            return Err(CliError::invalid(kind, id, format!("exponent '{key}' needs {nvars} entries")));
        }
        terms.push((exps, number(kind, id, coeff)?));
    }
    Ok(Poly::from_terms(nvars, terms))
}

fn lib<T>(kind: &'static str, id: &str, r: sa_derham::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Library { kind, id: id.to_string(), source })
}

fn one_of(kind: &'static str, id: &str, present: &[bool]) -> CliResult<()> {
    if present.iter().filter(|&&p| p).count() != 1 {
        return Err(CliError::invalid(kind, id, "exactly one way of defining the object must be given"));
    }
    Ok(())
}

impl Scene {
    pub fn load(path: &Path) -> CliResult<Scene> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Scene> {
        let raw: SceneLayout = serde_json::from_str(text)?;
        Self::build(raw)
    }

    pub fn build(raw: SceneLayout) -> CliResult<Scene> {
        let mut scene = Scene { seed: raw.seed, ..Default::default() };
        let mut visiting = BTreeSet::new();
        for id in raw.complexes.keys() {
            scene.complex_rec(&raw.complexes, id, &mut visiting)?;
        }
        for (id, f) in &raw.functions {
            let built = scene.build_function(id, f)?;
            scene.functions.insert(id.clone(), built);
        }
        for (id, m) in &raw.maps {
            let built = scene.build_map(id, m)?;
            scene.maps.insert(id.clone(), built);
        }
        for (id, c) in &raw.chains {
            let built = scene.build_chain(id, c)?;
            scene.chains.insert(id.clone(), built);
        }
        for (id, f) in &raw.forms {
            let built = scene.build_form(id, f)?;
            scene.forms.insert(id.clone(), built);
        }
        for (id, c) in &raw.continuous_chains {
            let built = scene.build_continuous(id, c)?;
            scene.continuous_chains.insert(id.clone(), built);
        }
        for (id, a) in &raw.pa_forms {
            let built = scene.build_pa(id, a)?;
            scene.pa_forms.insert(id.clone(), built);
        }
        for (id, b) in &raw.bundles {
            let built = scene.build_bundle(id, b)?;
            scene.bundles.insert(id.clone(), built);
        }
        for (id, p) in &raw.plans {
            let built = scene.build_plan(id, p)?;
            scene.plans.insert(id.clone(), built);
        }
        for (id, s) in &raw.slices {
            let built = scene.build_slice(id, s)?;
            scene.slices.insert(id.clone(), built);
        }
        scene.tasks = raw.tasks;
        for task in &scene.tasks {
            scene.check_references(&task.kind)?;
        }
        Ok(scene)
    }

    pub fn complex(&self, id: &str) -> CliResult<&Arc<GeoComplex>> {
        self.complexes.get(id).ok_or_else(|| CliError::Unresolved { kind: "complex", id: id.to_string() })
    }

    pub fn function(&self, id: &str) -> CliResult<&SAFunction> {
        self.functions.get(id).ok_or_else(|| CliError::Unresolved { kind: "function", id: id.to_string() })
    }

    pub fn chain(&self, id: &str) -> CliResult<&Chain> {
        self.chains.get(id).ok_or_else(|| CliError::Unresolved { kind: "chain", id: id.to_string() })
    }

    pub fn form(&self, id: &str) -> CliResult<&MinimalForm> {
        self.forms.get(id).ok_or_else(|| CliError::Unresolved { kind: "form", id: id.to_string() })
    }

    /// A PA form, or a minimal form taken as one.
    pub fn pa_form(&self, id: &str) -> CliResult<PAForm> {
        if let Some(a) = self.pa_forms.get(id) {
            return Ok(a.clone());
        }
        self.forms
            .get(id)
            .map(PAForm::from_minimal)
            .ok_or_else(|| CliError::Unresolved { kind: "PA form", id: id.to_string() })
    }

    pub fn bundle(&self, id: &str) -> CliResult<&SABundle> {
        self.bundles.get(id).ok_or_else(|| CliError::Unresolved { kind: "bundle", id: id.to_string() })
    }

    pub fn plan(&self, id: &str) -> CliResult<&CollapseHomotopyPlan> {
        self.plans.get(id).ok_or_else(|| CliError::Unresolved { kind: "plan", id: id.to_string() })
    }

    pub fn slice(&self, id: &str) -> CliResult<&GeneratedComplexSlice> {
        self.slices.get(id).ok_or_else(|| CliError::Unresolved { kind: "slice", id: id.to_string() })
    }

    /// The map `id` on `domain`: a bound map must already live there, a
    /// polynomial one is placed there.
    pub fn map_on(&self, id: &str, domain: &Arc<GeoComplex>) -> CliResult<Arc<SAMap>> {
        match self.maps.get(id) {
            None => Err(CliError::Unresolved { kind: "map", id: id.to_string() }),
            Some(MapEntry::Bound(m)) if m.domain().id() == domain.id() => Ok(m.clone()),
            Some(MapEntry::Bound(m)) => match m.components().iter().map(SAFunction::as_polynomial).collect::<Option<Vec<_>>>() {
                Some(polys) if m.domain().ambient_dim() == domain.ambient_dim() => {
                    Ok(SAMap::new(domain, polys.into_iter().map(|p| SAFunction::polynomial(domain, p.clone())).collect()))
                }
                _ => Err(CliError::invalid("map", id, "is defined on another complex and is not polynomial")),
            },
            Some(MapEntry::Polynomial(polys)) => {
                if polys.first().is_some_and(|p| p.nvars() != domain.ambient_dim()) {
                    return Err(CliError::invalid("map", id, format!("needs {} variables", domain.ambient_dim())));
                }
                Ok(SAMap::new(domain, polys.iter().map(|p| SAFunction::polynomial(domain, p.clone())).collect()))
            }
        }
    }

    fn complex_rec(&mut self, raws: &BTreeMap<String, ComplexLayout>, id: &str, visiting: &mut BTreeSet<String>) -> CliResult<Arc<GeoComplex>> {
        if let Some(c) = self.complexes.get(id) {
            return Ok(c.clone());
        }
        let raw = raws.get(id).ok_or_else(|| CliError::Unresolved { kind: "complex", id: id.to_string() })?;
        if !visiting.insert(id.to_string()) {
            return Err(CliError::invalid("complex", id, "refers to itself"));
        }
        let mut dep = |scene: &mut Scene, other: &Option<String>, field: &str| -> CliResult<Arc<GeoComplex>> {
            let other = other.as_deref().ok_or_else(|| CliError::invalid("complex", id, format!("missing '{field}'")))?;
            scene.complex_rec(raws, other, visiting)
        };
        let built = match raw.builtin.as_deref() {
            None => {
                let (Some(n), Some(vs), Some(ss)) = (raw.ambient_dim, &raw.vertices, &raw.simplices) else {
                    return Err(CliError::invalid("complex", id, "needs ambient_dim, vertices and simplices"));
                };
                let vertices = vs
                    .iter()
                    .map(|v| v.iter().map(|c| number("complex", id, c)).collect::<CliResult<Vec<Q>>>())
                    .collect::<CliResult<Vec<_>>>()?;
                lib("complex", id, GeoComplex::new(n, vertices, ss.clone()))?
            }
            Some("standard_simplex") => {
                standard_simplex(raw.n.ok_or_else(|| CliError::invalid("complex", id, "missing 'n'"))?)
            }
            Some("interval") => {
                let (Some(a), Some(b)) = (&raw.a, &raw.b) else {
                    return Err(CliError::invalid("complex", id, "needs 'a' and 'b'"));
                };
                let (a, b) = (number("complex", id, a)?, number("complex", id, b)?);
                if a >= b {
                    return Err(CliError::invalid("complex", id, "needs a < b"));
                }
                subdivided_interval(a, b, raw.pieces.unwrap_or(1).max(1))
            }
            Some("square_boundary") => square_boundary(),
            Some("subdivision") => barycentric_subdivision(&dep(self, &raw.of, "of")?).complex,
            Some("product") => {
                let left = dep(self, &raw.left, "left")?;
                let right = dep(self, &raw.right, "right")?;
                staircase_product(&left, &right).complex.clone()
            }
            Some("subcomplex") => {
                let parent = dep(self, &raw.of, "of")?;
                let gens: Vec<Simplex> = raw.simplices.iter().flatten().map(|s| Simplex::new(s.clone())).collect();
                lib("complex", id, parent.subcomplex(&gens))?
            }
            Some(other) => return Err(CliError::invalid("complex", id, format!("unknown builtin '{other}'"))),
        };
        visiting.remove(id);
        self.complexes.insert(id.to_string(), built.clone());
        Ok(built)
    }

    fn build_function(&self, id: &str, raw: &FunctionLayout) -> CliResult<SAFunction> {
        let k = self.complex(&raw.domain)?;
        let n = k.ambient_dim();
        one_of("function", id, &[raw.pieces.is_some(), raw.polynomial.is_some(), raw.pl.is_some()])?;
        if let Some(p) = &raw.polynomial {
            return Ok(SAFunction::polynomial(k, polynomial("function", id, n, p)?));
        }
        if let Some(values) = &raw.pl {
            if values.len() != k.num_vertices() {
                return Err(CliError::invalid("function", id, format!("needs {} vertex values", k.num_vertices())));
            }
            let values = values.iter().map(|v| number("function", id, v)).collect::<CliResult<Vec<_>>>()?;
            return Ok(SAFunction::pl(k, &values));
        }
        let mut pieces = Vec::new();
        for (key, r) in raw.pieces.iter().flatten() {
            let num = polynomial("function", id, n, &r.num)?;
            let den = match &r.den {
                Some(d) => polynomial("function", id, n, d)?,
                None => Poly::one(n),
            };
            pieces.push((Simplex::new(index_list("function", id, key)?), RatFn::new(num, den)));
        }
        lib("function", id, SAFunction::piecewise(k, pieces))
    }

    fn build_map(&self, id: &str, raw: &MapLayout) -> CliResult<MapEntry> {
        one_of("map", id, &[raw.components.is_some(), raw.pl.is_some(), raw.polynomials.is_some()])?;
        if let Some(polys) = &raw.polynomials {
            let n = raw.nvars.ok_or_else(|| CliError::invalid("map", id, "polynomial maps need 'nvars'"))?;
            return Ok(MapEntry::Polynomial(polys.iter().map(|p| polynomial("map", id, n, p)).collect::<CliResult<_>>()?));
        }
        let k = self.complex(raw.domain.as_deref().ok_or_else(|| CliError::invalid("map", id, "missing 'domain'"))?)?;
        if let Some(images) = &raw.pl {
            if images.len() != k.num_vertices() {
                return Err(CliError::invalid("map", id, format!("needs {} vertex images", k.num_vertices())));
            }
            let images = images
                .iter()
                .map(|p| p.iter().map(|c| number("map", id, c)).collect::<CliResult<Vec<_>>>())
                .collect::<CliResult<Vec<_>>>()?;
            return Ok(MapEntry::Bound(SAMap::pl(k, &images)));
        }
        let mut comps = Vec::new();
        for f in raw.components.iter().flatten() {
            let f = self.function(f)?;
            if f.domain().id() != k.id() {
                return Err(CliError::invalid("map", id, "components must live on the map's domain"));
            }
            comps.push(f.clone());
        }
        Ok(MapEntry::Bound(SAMap::new(k, comps)))
    }

    fn build_chain(&self, id: &str, raw: &ChainLayout) -> CliResult<Chain> {
        one_of("chain", id, &[raw.terms.is_some(), raw.fundamental.is_some()])?;
        if let Some(c) = &raw.fundamental {
            return lib("chain", id, Chain::fundamental(self.complex(c)?));
        }
        let mut terms = Vec::new();
        for t in raw.terms.iter().flatten() {
            let source = self.complex(&t.source_complex)?.clone();
            let simplex = Simplex::new(t.simplex.clone());
            if !source.contains(&simplex) || simplex.len() != t.simplex.len() {
                return Err(CliError::invalid("chain", id, format!("simplex {:?} is not in '{}'", t.simplex, t.source_complex)));
            }
            if t.sign.abs() != 1 {
                return Err(CliError::invalid("chain", id, "sign must be 1 or -1"));
            }
            let map = match &t.map {
                Some(m) => self.map_on(m, &source)?,
                None => SAMap::identity(&source),
            };
            terms.push(ChainTerm { coeff: t.coeff * t.sign as i64, source, simplex, map });
        }
        let degree = raw.degree.or_else(|| terms.first().map(|t| t.simplex.dim()));
        let ambient = raw.ambient_dim.or_else(|| terms.first().map(|t| t.map.target_dim()));
        let (Some(degree), Some(ambient)) = (degree, ambient) else {
            return Err(CliError::invalid("chain", id, "an empty chain needs degree and ambient_dim"));
        };
        if terms.iter().any(|t| t.simplex.dim() != degree || t.map.target_dim() != ambient) {
            return Err(CliError::invalid("chain", id, "terms differ in degree or target dimension"));
        }
        Ok(Chain::from_terms(degree, ambient, terms))
    }

    fn build_form(&self, id: &str, raw: &FormLayout) -> CliResult<MinimalForm> {
        let k = self.complex(&raw.domain)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in &raw.terms {
            if t.generator.len() != raw.degree + 1 {
                return Err(CliError::invalid("form", id, format!("a degree-{} generator has {} functions", raw.degree, raw.degree + 1)));
            }
            let fs = t
                .generator
                .iter()
                .map(|f| {
                    let f = self.function(f)?;
                    if f.domain().id() != k.id() {
                        return Err(CliError::invalid("form", id, "generator functions must live on the form's domain"));
                    }
                    Ok(f.clone())
                })
                .collect::<CliResult<Vec<_>>>()?;
            terms.push((number("form", id, &t.coeff)?, fs));
        }
        Ok(MinimalForm::new(k, raw.degree, terms))
    }

    fn build_continuous(&self, id: &str, raw: &ContinuousChainLayout) -> CliResult<ContinuousChain> {
        let base = self.complex(&raw.base)?;
        one_of("continuous chain", id, &[raw.strata.is_some(), raw.constant_fiber.is_some()])?;
        let phi = if let Some(f) = &raw.constant_fiber {
            lib("continuous chain", id, ContinuousChain::constant_fundamental(base, self.complex(f)?))?
        } else {
            let strata_layout = raw.strata.as_deref().unwrap_or_default();
            let mut strata = Vec::with_capacity(strata_layout.len());
            let mut target = raw.ambient_dim;
            for st in strata_layout {
                let fiber_complex = self.complex(&st.fiber)?;
                let fiber = match &st.fundamental {
                    Some(c) => self.chain(c)?.clone(),
                    None => lib("continuous chain", id, Chain::fundamental(fiber_complex))?,
                };
                let simplex = Simplex::new(st.simplex.clone());
                let domain = stratum_domain(base, &simplex, fiber_complex);
                let map = self.map_on(&st.g, &domain.complex)?;
                target.get_or_insert(map.target_dim());
                strata.push(Stratum { simplex, fiber, product: domain, map });
            }
            let degree = raw.fiber_deg.or_else(|| strata.first().map(|s| s.fiber.degree())).unwrap_or(0);
            let target = target.ok_or_else(|| CliError::invalid("continuous chain", id, "an empty family needs ambient_dim"))?;
            lib("continuous chain", id, ContinuousChain::stratified(base, degree, target, strata))?
        };
        if let Some(p) = &raw.projection {
            let carrier = standard_simplex(phi.ambient_dim());
            lib("continuous chain", id, phi.verify_projection(&self.map_on(p, &carrier)?))?;
        }
        Ok(phi)
    }

    fn build_pa(&self, id: &str, raw: &PAFormLayout) -> CliResult<PAForm> {
        let mut total: Option<PAForm> = None;
        for t in &raw.terms {
            let phi = self
                .continuous_chains
                .get(&t.phi)
                .ok_or_else(|| CliError::Unresolved { kind: "continuous chain", id: t.phi.clone() })?;
            let term = lib("PA form", id, PAForm::fiber_integral(phi.clone(), self.form(&t.mu)?.clone()))?;
            total = Some(match total {
                None => term,
                Some(acc) => lib("PA form", id, acc.add(&term))?,
            });
        }
        let total = total.ok_or_else(|| CliError::invalid("PA form", id, "needs at least one term"))?;
        if total.degree() != raw.degree {
            return Err(CliError::invalid("PA form", id, format!("terms have degree {}, not {}", total.degree(), raw.degree)));
        }
        Ok(total)
    }

    fn build_bundle(&self, id: &str, raw: &BundleLayout) -> CliResult<SABundle> {
        let base = self.complex(&raw.base)?;
        let fiber = self.complex(&raw.fiber)?;
        let bundle = match &raw.trivialization {
            None => lib("bundle", id, SABundle::product(base, fiber))?,
            Some(charts) => {
                let mut triv = Vec::with_capacity(charts.len());
                for c in charts {
                    let simplex = Simplex::new(c.simplex.clone());
                    let domain = SABundle::chart_domain(base, &simplex, fiber);
                    triv.push((simplex, self.map_on(&c.h, &domain.complex)?));
                }
                let total = triv.first().map_or(base.ambient_dim() + fiber.ambient_dim(), |(_, h)| h.target_dim());
                lib("bundle", id, SABundle::new(base, fiber, total, triv))?
            }
        };
        if let Some(p) = &raw.projection {
            let carrier = standard_simplex(bundle.total_dim());
            lib("bundle", id, bundle.verify_projection(&self.map_on(p, &carrier)?))?;
        }
        Ok(bundle)
    }

    fn build_plan(&self, id: &str, raw: &PlanLayout) -> CliResult<CollapseHomotopyPlan> {
        let k = self.complex(&raw.complex)?;
        one_of("plan", id, &[raw.star.is_some(), raw.collapse_to.is_some()])?;
        let plan = match (raw.star, &raw.collapse_to) {
            (Some(v), _) => lib("plan", id, star_shaped_plan(k, v))?,
            (None, Some(target)) => {
                let gens: Vec<Simplex> = target.iter().map(|s| Simplex::new(s.clone())).collect();
                let target = lib("plan", id, k.subcomplex(&gens))?;
                let seq = lib("plan", id, find_collapse(k, &target, raw.budget.unwrap_or(DEFAULT_COLLAPSE_BUDGET)))?;
                lib("plan", id, collapse_plan(&seq))?
            }
            (None, None) => unreachable!("one_of checked"),
        };
        Ok(plan)
    }

    fn build_slice(&self, id: &str, raw: &SliceLayout) -> CliResult<GeneratedComplexSlice> {
        let base = self.complex(&raw.base)?;
        let probe = match &raw.probe_complex {
            Some(p) => self.complex(p)?,
            None => base,
        };
        let gens = raw.generators.iter().map(|g| self.pa_form(g)).collect::<CliResult<Vec<_>>>()?;
        lib("slice", id, GeneratedComplexSlice::new(base, probe, gens))
    }

    fn check_references(&self, task: &TaskKind) -> CliResult<()> {
        match task {
            TaskKind::Validate { functions } => functions.iter().try_for_each(|f| self.function(f).map(drop)),
            TaskKind::Integrate { form, chain, .. } => {
                self.pa_form(form)?;
                self.chain(chain).map(drop)
            }
            TaskKind::StokesCheck { form, chains } => {
                self.pa_form(form)?;
                chains.iter().try_for_each(|c| self.chain(c).map(drop))
            }
            TaskKind::Cohomology { slice, pairings, .. } => {
                self.slice(slice)?;
                pairings.iter().try_for_each(|p| {
                    self.pa_form(&p.form)?;
                    self.chain(&p.chain).map(drop)
                })
            }
            TaskKind::Collapse { plan } => self.plan(plan).map(drop),
            TaskKind::MvCheck { a1, a2, slice, .. } => {
                self.complex(a1)?;
                self.complex(a2)?;
                self.slice(slice).map(drop)
            }
            TaskKind::Pushforward { bundle, form, chains, .. } => {
                self.bundle(bundle)?;
                self.form(form)?;
                chains.iter().try_for_each(|c| self.chain(c).map(drop))
            }
            TaskKind::Poincare { plan, forms } => {
                self.plan(plan)?;
                forms.iter().try_for_each(|f| self.pa_form(f).map(drop))
            }
            TaskKind::Extend { faces, .. } => faces.iter().try_for_each(|f| self.pa_form(f).map(drop)),
            _ => Ok(()),
        }
    }
}

/// Positively oriented identity simplices of a complex, all dimensions.
pub fn all_simplex_probes(k: &Arc<GeoComplex>) -> Vec<Chain> {
    k.simplices().map(|s| Chain::simplex(k, &OrientedSimplex::positive(s.clone()))).collect()
}
