//! Execution of scene tasks into named checks.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use sa_derham::checks::{self, Bound, Check};
use sa_derham::cohomology::{cohomology_ranks, simplex_probes, RANK_THRESHOLD};
use sa_derham::extension::{extend_corner, extend_simplex, restriction_gap};
use sa_derham::function::validate;
use sa_derham::homotopy::{poincare_primitive, primitive_residual};
use sa_derham::mayer_vietoris::mayer_vietoris;
use sa_derham::pa::PAForm;
use sa_derham::quadrature;
use sa_derham::rational::q;

use crate::scene::Scene;
use crate::layout::{TaskKind, TaskLayout};

/// Default for pairings compared against a stated value.
pub const PAIRING_TOLERANCE: f64 = 1e-8;
pub const STOKES_TOLERANCE: f64 = checks::stokes::POLYNOMIAL_TOLERANCE;
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct TaskReport {
    pub name: String,
    pub kind: &'static str,
    pub checks: Vec<Check>,
    /// Diagnostics for the text report only: ranks, gaps, probe families.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl TaskReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }
}

/// Tolerance overrides from the command line, keyed `task.check`,
/// `kind.check`, `task` or `kind`.
#[derive(Clone, Debug, Default)]
pub struct Overrides(pub BTreeMap<String, f64>);

impl Overrides {
    fn lookup(&self, task: &TaskLayout, name: &str, check: &str) -> Option<f64> {
        let kind = task.kind.name();
        [format!("{name}.{check}"), format!("{kind}.{check}"), name.to_string(), kind.to_string()]
            .iter()
            .find_map(|k| self.0.get(k).copied())
            .or_else(|| task.tol.get(check).or_else(|| task.tol.get("all")).copied())
    }
}

fn apply_tolerance(check: &mut Check, tol: f64) {
    match &mut check.bound {
        Bound::AtMost(t) => *t = tol,
        Bound::Within { tolerance, .. } => *tolerance = tol,
        _ => {}
    }
}

/// Runs one task; library failures become a failing `error` check.
pub fn run_task(scene: &Scene, task: &TaskLayout, index: usize, seed: u64, overrides: &Overrides) -> TaskReport {
    let name = task.name.clone().unwrap_or_else(|| format!("{}-{index}", task.kind.name()));
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut checks = match execute(scene, &task.kind, seed, &mut notes) {
        Ok(c) => c,
        Err(message) => {
            notes.push(format!("error: {message}"));
            vec![Check::equals("error", 1.0, 0.0)]
        }
    };
    for c in &mut checks {
        if let Some(t) = overrides.lookup(task, &name, &c.name) {
            apply_tolerance(c, t);
        }
    }
    TaskReport { name, kind: task.kind.name(), checks, notes, elapsed: start.elapsed() }
}

fn expect_or_record(name: String, value: f64, expected: Option<f64>, tolerance: f64) -> Check {
    match expected {
        Some(expected) => Check::new(name, value, Bound::Within { expected, tolerance }),
        None => Check::recorded(name, value),
    }
}

fn betti_checks(prefix: &str, betti: &[usize], expected: Option<&Vec<usize>>) -> Vec<Check> {
    let len = expected.map_or(betti.len(), |e| e.len().max(betti.len()));
    (0..len)
        .map(|d| {
            let value = betti.get(d).copied().unwrap_or(0) as f64;
            let name = format!("{prefix}betti_{d}");
            match expected {
                Some(e) => Check::equals(name, value, e.get(d).copied().unwrap_or(0) as f64),
                None => Check::recorded(name, value),
            }
        })
        .collect()
}

type Outcome = Result<Vec<Check>, String>;

fn execute(scene: &Scene, kind: &TaskKind, seed: u64, notes: &mut Vec<String>) -> Outcome {
    let lib = |e: sa_derham::Error| e.to_string();
    let cli = |e: crate::error::CliError| e.to_string();
    match kind {
        TaskKind::Validate { functions } => Ok(functions
            .iter()
            .map(|id| {
                let f = scene.function(id).map_err(cli)?;
                Ok(match validate(f) {
                    Ok(()) => Check::equals(format!("valid_{id}"), 1.0, 1.0),
                    Err(e) => {
                        notes.push(format!("{id}: {e}"));
                        Check::equals(format!("valid_{id}"), 0.0, 1.0)
                    }
                })
            })
            .collect::<Result<Vec<_>, String>>()?),
        TaskKind::Integrate { form, chain, expected } => {
            let value = scene.pa_form(form).map_err(cli)?.pair(scene.chain(chain).map_err(cli)?).map_err(lib)?;
            Ok(vec![expect_or_record("pairing".into(), value, *expected, PAIRING_TOLERANCE)])
        }
        TaskKind::StokesCheck { form, chains } => {
            let alpha = scene.pa_form(form).map_err(cli)?;
            let delta = alpha.coboundary();
            chains
                .iter()
                .map(|id| {
                    let gamma = scene.chain(id).map_err(cli)?;
                    if gamma.degree() != alpha.degree() + 1 {
                        return Err(format!("chain '{id}' has degree {}, expected {}", gamma.degree(), alpha.degree() + 1));
                    }
                    let lhs = delta.pair(gamma).map_err(lib)?;
                    let rhs = alpha.pair(&gamma.boundary()).map_err(lib)?;
                    Ok(Check::at_most(format!("residual_{id}"), (lhs - rhs).abs(), STOKES_TOLERANCE))
                })
                .collect()
        }
        TaskKind::Cohomology { slice, expect_betti, pairings } => {
            let slice = scene.slice(slice).map_err(cli)?;
            let report = cohomology_ranks(slice).map_err(lib)?;
            notes.push(format!("probes: identity simplices, threshold {RANK_THRESHOLD:e} relative to the largest singular value"));
            for d in &report.degrees {
                notes.push(format!(
                    "degree {}: forms {}, pairing rank {}, coboundary rank {}, closed {}, exact {}, gap {:.3e}",
                    d.degree, d.forms, d.pairing_rank, d.coboundary_rank, d.closed_rank, d.exact_rank, d.gap
                ));
            }
            notes.extend(report.warnings.iter().cloned());
            let mut out = betti_checks("", &report.betti(), expect_betti.as_ref());
            out.push(Check::recorded("rank_warnings", report.warnings.len() as f64));
            for p in pairings {
                let value = scene.pa_form(&p.form).map_err(cli)?.pair(scene.chain(&p.chain).map_err(cli)?).map_err(lib)?;
                out.push(expect_or_record(format!("pairing_{}_{}", p.form, p.chain), value, p.expected, PAIRING_TOLERANCE));
            }
            Ok(out)
        }
        TaskKind::Collapse { plan } => {
            let plan = scene.plan(plan).map_err(cli)?;
            let valid = match plan.validate() {
                Ok(()) => 1.0,
                Err(e) => {
                    notes.push(format!("invalid plan: {e}"));
                    0.0
                }
            };
            Ok(vec![Check::equals("plan_valid", valid, 1.0), Check::recorded("steps", plan.steps().len() as f64)])
        }
        TaskKind::MvCheck { a1, a2, slice, expect_betti } => {
            let a1 = scene.complex(a1).map_err(cli)?;
            let a2 = scene.complex(a2).map_err(cli)?;
            let report = mayer_vietoris(a1, a2, scene.slice(slice).map_err(cli)?).map_err(lib)?;
            notes.extend(report.warnings.iter().cloned());
            for r in &report.ranks {
                notes.push(format!("degree {}: rank {} on the whole, {} after restriction", r.degree, r.whole, r.restricted));
            }
            let mut out = vec![
                Check::at_most("difference_of_restrictions", report.difference_residual, checks::gluing::DIFFERENCE_TOLERANCE),
                Check::at_most("surjectivity_witness", report.witness_residual, checks::gluing::WITNESS_TOLERANCE),
                Check::at_most("gluing", report.gluing_residual, checks::gluing::GLUING_TOLERANCE),
                Check::equals("restriction_injective", report.injective() as u8 as f64, 1.0),
                Check::equals("euler_defect", report.euler_defect() as f64, 0.0),
            ];
            for (i, part) in ["", "a1_", "a2_", "intersection_"].iter().enumerate() {
                out.extend(betti_checks(part, &report.betti[i], expect_betti.as_ref().map(|e| &e[i])));
            }
            Ok(out)
        }
        TaskKind::Pushforward { bundle, form, chains, expected } => {
            let bundle = scene.bundle(bundle).map_err(cli)?;
            let mu = scene.form(form).map_err(cli)?;
            let pushed = bundle.pushforward(mu).map_err(lib)?;
            let boundary = bundle.fiberwise_boundary();
            let sign = if (mu.degree() + bundle.fiber_dim()) % 2 == 0 { q(1) } else { q(-1) };
            let pushed_delta = bundle.pushforward(&mu.coboundary()).map_err(lib)?;
            let rhs = pushed_delta.add(&boundary.pushforward(mu).map_err(lib)?.scale(&sign)).map_err(lib)?;
            if let Some(e) = expected {
                if e.len() != chains.len() {
                    return Err("expected values must match the chains one to one".into());
                }
            }
            let mut out = Vec::new();
            for (i, id) in chains.iter().enumerate() {
                let gamma = scene.chain(id).map_err(cli)?;
                if gamma.degree() == pushed.degree() {
                    let value = pushed.pair(gamma).map_err(lib)?;
                    out.push(expect_or_record(format!("pairing_{id}"), value, expected.as_ref().map(|e| e[i]), PAIRING_TOLERANCE));
                } else if gamma.degree() == pushed.degree() + 1 {
                    let residual = (pushed.pair(&gamma.boundary()).map_err(lib)? - rhs.pair(gamma).map_err(lib)?).abs();
                    out.push(Check::at_most(format!("fiberwise_stokes_{id}"), residual, checks::bundles::BUNDLE_TOLERANCE));
                } else {
                    return Err(format!("chain '{id}' has degree {}, pushforward has degree {}", gamma.degree(), pushed.degree()));
                }
            }
            Ok(out)
        }
        TaskKind::Poincare { plan, forms } => {
            let plan = scene.plan(plan).map_err(cli)?;
            let probes: Vec<_> = simplex_probes(plan.complex()).into_iter().flatten().collect();
            forms
                .iter()
                .map(|id| {
                    let alpha = scene.pa_form(id).map_err(cli)?;
                    let beta = poincare_primitive(&alpha, plan).map_err(lib)?;
                    let residual = primitive_residual(&alpha, &beta, &probes).map_err(lib)?;
                    Ok(Check::at_most(format!("primitive_{id}"), residual, checks::poincare::PRIMITIVE_TOLERANCE))
                })
                .collect()
        }
        TaskKind::Extend { shape, faces } => {
            let forms = faces.iter().map(|f| scene.pa_form(f).map_err(cli)).collect::<Result<Vec<PAForm>, String>>()?;
            let (extended, first) = match shape.as_str() {
                "corner" => (extend_corner(&forms).map_err(lib)?, 1),
                "simplex" => (extend_simplex(&forms).map_err(lib)?, 0),
                other => return Err(format!("unknown shape '{other}', expected corner or simplex")),
            };
            let indexed: Vec<(usize, PAForm)> = forms.into_iter().enumerate().map(|(i, f)| (i + first, f)).collect();
            let gap = restriction_gap(&extended, &indexed).map_err(lib)?;
            Ok(vec![Check::at_most("restriction_gap", gap, checks::extension::EXTENSION_TOLERANCE)])
        }
        TaskKind::Quadrature { max_dim, max_degree } => {
            let mut out: Vec<Check> = (0..=*max_dim)
                .flat_map(|dim| {
                    (0..=*max_degree).map(move |deg| {
                        Check::at_most(format!("rule_dim_{dim}_degree_{deg}"), quadrature::rule_error(dim, deg), QUADRATURE_TOLERANCE)
                    })
                })
                .collect();
            out.push(Check::at_most("selftest", quadrature::selftest(*max_dim, *max_degree), QUADRATURE_TOLERANCE));
            Ok(out)
        }
        TaskKind::BoundarySuite { count, max_dim, seed: own } => Ok(checks::boundary::boundary_suite(own.unwrap_or(seed), *count, *max_dim)),
        TaskKind::StokesSuite { polynomial, rational, seed: own } => {
            checks::stokes::stokes_suite(own.unwrap_or(seed), *polynomial, *rational).map_err(lib)
        }
        TaskKind::ProductSuite { count, seed: own } => checks::products::product_suite(own.unwrap_or(seed), *count).map_err(lib),
        TaskKind::BundleSuite => checks::bundles::bundle_suite().map_err(lib),
        TaskKind::DtOverT => checks::logarithm::logarithm_suite().map_err(lib),
        TaskKind::PoincareSuite => checks::poincare::poincare_suite().map_err(lib),
        TaskKind::MvSquare => checks::gluing::square_cover_suite().map_err(lib),
        TaskKind::ExtensionSuite => checks::extension::extension_suite().map_err(lib),
    }
}
