//! Serialized scene layout, read with serde before any object is built.

use std::collections::BTreeMap;

use serde::Deserialize;

/// Exact numbers: integers, `"p/q"` strings, or floats taken at their binary value.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

/// Sparse polynomial: comma-separated exponent lists mapped to coefficients,
/// e.g. `{"2,0": "1/2", "0,0": 1}`.
pub type PolyLayout = BTreeMap<String, Number>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexLayout {
    pub ambient_dim: Option<usize>,
    pub vertices: Option<Vec<Vec<Number>>>,
    /// Generating simplices; faces are completed on load.
    pub simplices: Option<Vec<Vec<usize>>>,
    /// `standard_simplex`, `interval`, `square_boundary`, `subdivision`,
    /// `product` or `subcomplex`.
    pub builtin: Option<String>,
    pub n: Option<usize>,
    pub a: Option<Number>,
    pub b: Option<Number>,
    pub pieces: Option<usize>,
    pub of: Option<String>,
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalLayout {
    pub num: PolyLayout,
    pub den: Option<PolyLayout>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionLayout {
    pub domain: String,
    /// One rational piece per top simplex, keyed by comma-separated vertices.
    pub pieces: Option<BTreeMap<String, RationalLayout>>,
    pub polynomial: Option<PolyLayout>,
    /// Piecewise-linear interpolation of one value per vertex.
    pub pl: Option<Vec<Number>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapLayout {
    pub domain: Option<String>,
    pub components: Option<Vec<String>>,
    /// Vertex images of a piecewise-linear map.
    pub pl: Option<Vec<Vec<Number>>>,
    /// Polynomial components in `nvars` variables, usable on any complex of
    /// that ambient dimension.
    pub polynomials: Option<Vec<PolyLayout>>,
    pub nvars: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTermLayout {
    pub coeff: i64,
    pub source_complex: String,
    pub simplex: Vec<usize>,
    #[serde(default = "positive")]
    pub sign: i32,
    pub map: Option<String>,
}

fn positive() -> i32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainLayout {
    pub ambient_dim: Option<usize>,
    pub degree: Option<usize>,
    pub terms: Option<Vec<ChainTermLayout>>,
    /// The coherently oriented top simplices of a complex.
    pub fundamental: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTermLayout {
    #[serde(default = "unit")]
    pub coeff: Number,
    pub generator: Vec<String>,
}

fn unit() -> Number {
    Number::Int(1)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormLayout {
    pub domain: String,
    pub degree: usize,
    pub terms: Vec<FormTermLayout>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumLayout {
    pub simplex: Vec<usize>,
    pub fiber: String,
    /// Chain on the fiber complex; its fundamental chain when omitted.
    pub fundamental: Option<String>,
    /// Polynomial map on `cl σ × F`.
    pub g: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousChainLayout {
    pub base: String,
    pub fiber_deg: Option<usize>,
    pub ambient_dim: Option<usize>,
    pub strata: Option<Vec<StratumLayout>>,
    /// Constant family with the fundamental chain of this complex.
    pub constant_fiber: Option<String>,
    pub projection: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PATermLayout {
    pub phi: String,
    pub mu: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PAFormLayout {
    pub degree: usize,
    pub terms: Vec<PATermLayout>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartLayout {
    pub simplex: Vec<usize>,
    pub h: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleLayout {
    pub base: String,
    pub fiber: String,
    /// Kept for layout compatibility; the fiber's own fundamental chain is used.
    pub fundamental: Option<String>,
    /// Product bundle when omitted.
    pub trivialization: Option<Vec<ChartLayout>>,
    pub projection: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanLayout {
    pub complex: String,
    /// Straight-line plan to this vertex.
    pub star: Option<usize>,
    /// Greedy collapse onto the subcomplex generated by these simplices.
    pub collapse_to: Option<Vec<Vec<usize>>>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceLayout {
    pub base: String,
    pub probe_complex: Option<String>,
    /// Ids of PA forms or minimal forms.
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingLayout {
    pub form: String,
    pub chain: String,
    pub expected: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskKind {
    Validate {
        #[serde(default)]
        functions: Vec<String>,
    },
    Integrate {
        form: String,
        chain: String,
        expected: Option<f64>,
    },
    StokesCheck {
        form: String,
        chains: Vec<String>,
    },
    Cohomology {
        slice: String,
        expect_betti: Option<Vec<usize>>,
        #[serde(default)]
        pairings: Vec<PairingLayout>,
    },
    Collapse {
        plan: String,
    },
    MvCheck {
        a1: String,
        a2: String,
        slice: String,
        /// Betti numbers of the whole complex, the parts and their intersection.
        expect_betti: Option<[Vec<usize>; 4]>,
    },
    Pushforward {
        bundle: String,
        form: String,
        chains: Vec<String>,
        expected: Option<Vec<f64>>,
    },
    Poincare {
        plan: String,
        forms: Vec<String>,
    },
    Extend {
        /// `corner` or `simplex`.
        shape: String,
        faces: Vec<String>,
    },
    Quadrature {
        #[serde(default = "three")]
        max_dim: usize,
        #[serde(default = "six")]
        max_degree: u32,
    },
    BoundarySuite {
        #[serde(default = "two_hundred")]
        count: usize,
        #[serde(default = "four")]
        max_dim: usize,
        seed: Option<u64>,
    },
    StokesSuite {
        #[serde(default = "hundred")]
        polynomial: usize,
        #[serde(default = "twenty")]
        rational: usize,
        seed: Option<u64>,
    },
    ProductSuite {
        #[serde(default = "fifty")]
        count: usize,
        seed: Option<u64>,
    },
    BundleSuite,
    DtOverT,
    PoincareSuite,
    MvSquare,
    ExtensionSuite,
}

fn three() -> usize {
    3
}
fn four() -> usize {
    4
}
fn six() -> u32 {
    6
}
fn twenty() -> usize {
    20
}
fn fifty() -> usize {
    50
}
fn hundred() -> usize {
    100
}
fn two_hundred() -> usize {
    200
}

#[derive(Clone, Debug, Deserialize)]
pub struct TaskLayout {
    pub name: Option<String>,
    /// Per-check tolerance overrides; the key `all` applies to every check.
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub kind: TaskKind,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneLayout {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexLayout>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionLayout>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapLayout>,
    #[serde(default)]
    pub chains: BTreeMap<String, ChainLayout>,
    #[serde(default)]
    pub forms: BTreeMap<String, FormLayout>,
    #[serde(default)]
    pub continuous_chains: BTreeMap<String, ContinuousChainLayout>,
    #[serde(default)]
    pub pa_forms: BTreeMap<String, PAFormLayout>,
    #[serde(default)]
    pub bundles: BTreeMap<String, BundleLayout>,
    #[serde(default)]
    pub plans: BTreeMap<String, PlanLayout>,
    #[serde(default)]
    pub slices: BTreeMap<String, SliceLayout>,
    #[serde(default)]
    pub tasks: Vec<TaskLayout>,
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::Validate { .. } => "validate",
            TaskKind::Integrate { .. } => "integrate",
            TaskKind::StokesCheck { .. } => "stokes-check",
            TaskKind::Cohomology { .. } => "cohomology",
            TaskKind::Collapse { .. } => "collapse",
            TaskKind::MvCheck { .. } => "mv-check",
            TaskKind::Pushforward { .. } => "pushforward",
            TaskKind::Poincare { .. } => "poincare",
            TaskKind::Extend { .. } => "extend",
            TaskKind::Quadrature { .. } => "quadrature",
            TaskKind::BoundarySuite { .. } => "boundary-suite",
            TaskKind::StokesSuite { .. } => "stokes-suite",
            TaskKind::ProductSuite { .. } => "product-suite",
            TaskKind::BundleSuite => "bundle-suite",
            TaskKind::DtOverT => "dt-over-t",
            TaskKind::PoincareSuite => "poincare-suite",
            TaskKind::MvSquare => "mv-square",
            TaskKind::ExtensionSuite => "extension-suite",
        }
    }
}
