//! JSON documents read and written by the command-line front end, and the
//! runners that turn an input document into a result document.
//!
//! Group words are written as whitespace-separated generator names with an
//! optional `^-1` suffix; `"1"` is the identity.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::group::{ProductRepresentation, Representation, Word};
use crate::hyperbolic::{IdealPoint, Point};
use crate::linalg::Mat;
use crate::measure::{barycenter, AtomicBoundaryMeasure, BarycenterOptions};
use crate::natural_map::{as_product, NaturalMap, NaturalMapConfig};
use crate::product::{optimal_scaling, FactorSpec, ProductPoint};
use crate::rep_volume::{
    bending_path, fixed_boundary_point_test, nondegenerate_positions, rep_volume, rep_volume_allow_degenerate, scan_volume,
    transverse_degrees, uniform_grid, BaseVertex, DeformationPath, EquivariantTriangulation, FacePairing, FaceDegree,
    FixedPointVerdict, LabelledSimplex, LabelledVertex, ScanResult,
};
use crate::simplex::{dihedral_angle, schlafli_derivative, signed_volume, simplex_volume, GeodesicSimplex, SimplexPath, Vertex};

// ---------------------------------------------------------------- entropy

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyInput {
    pub dims: Vec<usize>,
    /// Factor entropies; a real hyperbolic factor `H^n` has entropy `n - 1`,
    /// which is the default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropies: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyOutput {
    pub alphas: Vec<f64>,
    pub entropy_min: f64,
}

pub fn run_entropy(input: &EntropyInput) -> Result<EntropyOutput> {
    let entropies = match &input.entropies {
        Some(e) if e.len() != input.dims.len() => {
            return Err(Error::StructureMismatch("dims and entropies differ in length".into()));
        }
        Some(e) => e.clone(),
        None => input.dims.iter().map(|&n| n.saturating_sub(1) as f64).collect(),
    };
    let factors = input
        .dims
        .iter()
        .zip(&entropies)
        .map(|(&n, &e)| if n >= 2 && e == (n - 1) as f64 { FactorSpec::real_hyperbolic(n) } else { FactorSpec::parametric(n, e) })
        .collect::<Result<Vec<_>>>()?;
    let r = optimal_scaling(&factors)?;
    Ok(EntropyOutput { alphas: r.a, entropy_min: r.entropy_min })
}

// ------------------------------------------------------------- barycenter

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarycenterInput {
    pub measure: AtomicBoundaryMeasure<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<ProductPoint<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarycenterOutput {
    pub point: ProductPoint<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub functional_value: f64,
    pub tol: f64,
}

pub fn run_barycenter(input: &BarycenterInput, tol_override: Option<f64>) -> Result<BarycenterOutput> {
    let defaults = BarycenterOptions::default();
    let tol = tol_override.or(input.tol).unwrap_or(defaults.tol);
    let opts = BarycenterOptions { tol, max_iter: input.max_iter.unwrap_or(defaults.max_iter), initial: input.initial.clone() };
    let r = barycenter(&input.measure, &opts)?;
    Ok(BarycenterOutput { point: r.point, gradient_norm: r.gradient_norm, iterations: r.iterations, functional_value: r.functional_value, tol })
}

// ---------------------------------------------------------------- simplex

/// A simplex vertex in one of several coordinate systems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexInput {
    /// Hyperboloid coordinates.
    Finite(Point<f64>),
    /// Lightlike ray `(1, xi)`.
    Ideal(IdealPoint<f64>),
    /// Klein-model coordinates inside the unit ball.
    Klein(Vec<f64>),
    /// Unit direction on the boundary sphere.
    Direction(Vec<f64>),
}

impl VertexInput {
    pub fn to_vertex(&self) -> Result<Vertex<f64>> {
        Ok(match self {
            VertexInput::Finite(p) => Vertex::Finite(p.clone()),
            VertexInput::Ideal(t) => Vertex::Ideal(t.clone()),
            VertexInput::Klein(u) => Vertex::Finite(Point::from_klein(u)?),
            VertexInput::Direction(d) => {
                let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(norm > 0.0) {
                    return Err(Error::InvalidParameter("boundary direction must be nonzero".into()));
                }
                Vertex::Ideal(IdealPoint::from_direction(&d.iter().map(|x| x / norm).collect::<Vec<_>>()))
            }
        })
    }

    /// Position in the closed Klein ball.
    fn klein(&self) -> Result<Vec<f64>> {
        Ok(crate::simplex::klein_coords(&self.to_vertex()?))
    }

    fn is_ideal(&self) -> bool {
        matches!(self, VertexInput::Ideal(_) | VertexInput::Direction(_))
    }
}

fn build_simplex(vertices: &[VertexInput]) -> Result<GeodesicSimplex<f64>> {
    GeodesicSimplex::new(vertices.iter().map(VertexInput::to_vertex).collect::<Result<Vec<_>>>()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexInput {
    pub vertices: Vec<VertexInput>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DihedralEntry {
    /// The angle lies between the facets opposite these two vertices.
    pub facets: (usize, usize),
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexOutput {
    pub dim: usize,
    pub volume: f64,
    pub signed_volume: f64,
    pub orientation: i8,
    pub dihedral_angles: Vec<DihedralEntry>,
}

pub fn run_simplex(input: &SimplexInput) -> Result<SimplexOutput> {
    let s = build_simplex(&input.vertices)?;
    let n = s.dim();
    let mut dihedral_angles = Vec::new();
    if !s.is_degenerate() {
        for i in 0..=n {
            for j in (i + 1)..=n {
                dihedral_angles.push(DihedralEntry { facets: (i, j), angle: dihedral_angle(&s, (i, j))? });
            }
        }
    }
    Ok(SimplexOutput { dim: n, volume: simplex_volume(&s)?, signed_volume: signed_volume(&s)?, orientation: s.orientation(), dihedral_angles })
}

// --------------------------------------------------------------- schlafli

fn default_path_samples() -> usize {
    11
}

/// The simplex path whose vertices move linearly in the Klein model from
/// `start` to `end`; ideal vertices stay ideal and move along the sphere
/// by normalizing the interpolated direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchlafliInput {
    pub start: Vec<VertexInput>,
    pub end: Vec<VertexInput>,
    #[serde(default = "default_path_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchlafliSample {
    pub t: f64,
    pub schlafli: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchlafliOutput {
    pub samples: Vec<SchlafliSample>,
    pub max_relative_error: f64,
    pub finite_difference_step: f64,
}

/// Step of the central volume difference reported next to the Schläfli sum.
pub const VOLUME_FD_STEP: f64 = 1e-4;

pub fn run_schlafli(input: &SchlafliInput) -> Result<SchlafliOutput> {
    if input.start.len() != input.end.len() {
        return Err(Error::StructureMismatch("start and end have different vertex counts".into()));
    }
    if input.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut ends = Vec::with_capacity(input.start.len());
    for (a, b) in input.start.iter().zip(&input.end) {
        if a.is_ideal() != b.is_ideal() {
            return Err(Error::InvalidParameter("a vertex cannot change between finite and ideal".into()));
        }
        ends.push((a.klein()?, b.klein()?, a.is_ideal()));
    }
    let path = SimplexPath::new((0.0, 1.0), move |t: f64| {
        let vertices = ends
            .iter()
            .map(|(a, b, ideal)| {
                let u: Vec<f64> = a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect();
                if *ideal {
                    VertexInput::Direction(u).to_vertex()
                } else {
                    Ok(Vertex::Finite(Point::from_klein(&u)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GeodesicSimplex::new(vertices)
    });
    let h = VOLUME_FD_STEP;
    let mut samples = Vec::with_capacity(input.samples);
    for k in 0..input.samples {
        let t = (k as f64 + 0.5) / input.samples as f64;
        let schlafli = schlafli_derivative(&path, t)?;
        let fd = (simplex_volume(&path.at(t + h)?)? - simplex_volume(&path.at(t - h)?)?) / (2.0 * h);
        let relative_error = (schlafli - fd).abs() / fd.abs().max(1e-12);
        samples.push(SchlafliSample { t, schlafli, finite_difference: fd, relative_error });
    }
    let max_relative_error = samples.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    Ok(SchlafliOutput { samples, max_relative_error, finite_difference_step: h })
}

// ----------------------------------------------------------- triangulation

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub name: String,
    pub position: Point<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelDoc {
    pub vertex: String,
    #[serde(default = "identity_word")]
    pub word: String,
}

fn identity_word() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexDoc {
    pub vertices: Vec<LabelDoc>,
    #[serde(default = "positive")]
    pub orientation: i8,
}

fn positive() -> i8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingDoc {
    /// `(simplex, omitted vertex)` of the first facet.
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub translation: String,
    pub vertex_map: Vec<usize>,
}

/// An equivariant triangulation; pairings are derived from the
/// representation when omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationDoc {
    pub dim: usize,
    pub vertices: Vec<VertexDoc>,
    pub simplices: Vec<SimplexDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairings: Option<Vec<PairingDoc>>,
}

impl TriangulationDoc {
    pub fn build(&self, rho: &Representation) -> Result<EquivariantTriangulation> {
        let pres = rho.presentation();
        let vertices: Vec<BaseVertex> =
            self.vertices.iter().map(|v| BaseVertex { name: v.name.clone(), position: v.position.clone() }).collect();
        let index = |name: &str| {
            vertices
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::Triangulation(format!("unknown vertex `{name}`")))
        };
        let simplices = self
            .simplices
            .iter()
            .map(|s| {
                let labels = s
                    .vertices
                    .iter()
                    .map(|l| Ok(LabelledVertex::new(index(&l.vertex)?, pres.parse_word(&l.word)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LabelledSimplex { vertices: labels, orientation: s.orientation })
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.pairings {
            None => EquivariantTriangulation::with_derived_pairings(self.dim, vertices, simplices, rho),
            Some(ps) => {
                let pairings = ps
                    .iter()
                    .map(|p| {
                        Ok(FacePairing {
                            first: p.first,
                            second: p.second,
                            translation: pres.parse_word(&p.translation)?,
                            vertex_map: p.vertex_map.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let t = EquivariantTriangulation::new(self.dim, vertices, simplices, pairings)?;
                t.validate(rho)?;
                Ok(t)
            }
        }
    }

    pub fn from_triangulation(t: &EquivariantTriangulation, rho: &Representation, with_pairings: bool) -> Self {
        let pres = rho.presentation();
        let name = |i: usize| t.vertices()[i].name.clone();
        Self {
            dim: t.dim(),
            vertices: t.vertices().iter().map(|v| VertexDoc { name: v.name.clone(), position: v.position.clone() }).collect(),
            simplices: t
                .simplices()
                .iter()
                .map(|s| SimplexDoc {
                    vertices: s.vertices.iter().map(|l| LabelDoc { vertex: name(l.vertex), word: pres.format_word(&l.word) }).collect(),
                    orientation: s.orientation,
                })
                .collect(),
            pairings: with_pairings.then(|| {
                t.pairings()
                    .iter()
                    .map(|p| PairingDoc {
                        first: p.first,
                        second: p.second,
                        translation: pres.format_word(&p.translation),
                        vertex_map: p.vertex_map.clone(),
                    })
                    .collect()
            }),
        }
    }
}

// -------------------------------------------------------------- repvolume

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepVolumeInput {
    pub triangulation: TriangulationDoc,
    pub representation: Representation,
    /// Vertex positions; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Point<f64>>>,
    #[serde(default = "yes")]
    pub fixed_point_test: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepVolumeOutput {
    pub volume: f64,
    pub positions: Vec<Point<f64>>,
    pub degrees: Vec<FaceDegree>,
    /// Largest distance of a transverse degree from the nearest integer.
    pub max_degree_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointVerdict>,
    /// Every straightened simplex was flat, so the volume is zero by
    /// degeneracy rather than by cancellation.
    pub degenerate_map: bool,
}

pub fn run_repvolume(input: &RepVolumeInput, seed: u64) -> Result<RepVolumeOutput> {
    let rho = &input.representation;
    let t = input.triangulation.build(rho)?;
    let fixed_point = if input.fixed_point_test { Some(fixed_boundary_point_test(rho, None)?) } else { None };
    let drawn = match &input.positions {
        Some(p) => Ok(p.clone()),
        None => nondegenerate_positions(&t, rho, seed),
    };
    let (positions, volume, degenerate_map) = match drawn {
        Ok(p) => {
            let v = rep_volume(&t, rho, &p)?;
            (p, v, false)
        }
        Err(Error::PositionsExhausted { .. }) => {
            let p = t.base_positions();
            let v = rep_volume_allow_degenerate(&t, rho, &p)?;
            (p, v, true)
        }
        Err(e) => return Err(e),
    };
    let degrees = if degenerate_map { Vec::new() } else { transverse_degrees(&t, rho, &positions)? };
    let max_degree_defect = degrees.iter().map(|d| (d.degree - d.degree.round()).abs()).fold(0.0, f64::max);
    Ok(RepVolumeOutput { volume, positions, degrees, max_degree_defect, fixed_point, degenerate_map })
}

// ------------------------------------------------------------------- scan

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathInput {
    /// `rho_t = exp(tX) rho exp(-tX)` with `X` in `so(n,1)`.
    Conjugation { generator: Mat<f64> },
    /// Bending along the axis of `curve`, conjugating the `bent` generators.
    Bending { curve: String, bent: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInput {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanInput {
    pub triangulation: TriangulationDoc,
    pub representation: Representation,
    pub path: PathInput,
    pub grid: GridInput,
}

impl ScanInput {
    pub fn deformation(&self) -> Result<DeformationPath> {
        let rho = &self.representation;
        match &self.path {
            PathInput::Conjugation { generator } => DeformationPath::conjugation(rho.clone(), generator.clone()),
            PathInput::Bending { curve, bent } => {
                let pres = rho.presentation();
                let bent = bent.iter().map(|b| pres.generator_index(b)).collect::<Result<Vec<_>>>()?;
                bending_path(rho, &pres.parse_word(curve)?, &bent)
            }
        }
    }
}

/// Scan summary; the samples go to the CSV file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub path: &'static str,
    pub samples: usize,
    pub median: f64,
    pub max_deviation: f64,
    pub min_volume: f64,
    pub max_volume: f64,
    pub events: Vec<crate::rep_volume::ScanEvent>,
}

pub fn run_scan(input: &ScanInput, seed: u64) -> Result<(ScanResult, ScanSummary)> {
    if input.grid.samples == 0 {
        return Err(Error::InvalidParameter("scan grid needs at least one sample".into()));
    }
    let path = input.deformation()?;
    let t = input.triangulation.build(&input.representation)?;
    let grid = uniform_grid(input.grid.start, input.grid.end, input.grid.samples);
    let r = scan_volume(&t, &path, &grid, seed)?;
    let vols = r.samples.iter().map(|s| s.1);
    let summary = ScanSummary {
        path: path.kind_name(),
        samples: r.samples.len(),
        median: r.median,
        max_deviation: r.max_deviation,
        min_volume: vols.clone().fold(f64::INFINITY, f64::min),
        max_volume: vols.fold(f64::NEG_INFINITY, f64::max),
        events: r.events.clone(),
    };
    Ok((r, summary))
}

// ------------------------------------------------------------ natural map

/// A representation into one isometry group or into a product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepresentationInput {
    Single(Representation),
    Product(ProductRepresentation),
}

impl RepresentationInput {
    pub fn to_product(&self) -> ProductRepresentation {
        match self {
            RepresentationInput::Single(r) => as_product(r),
            RepresentationInput::Product(r) => r.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalMapInput {
    pub source: RepresentationInput,
    /// Defaults to the source (the identity representation).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RepresentationInput>,
    pub config: NaturalMapConfig,
    pub points: Vec<ProductPoint<f64>>,
    /// Words `gamma` for the equivariance residual `d(F(gamma y), rho(gamma) F(y))`.
    #[serde(default)]
    pub equivariance_words: Vec<String>,
    #[serde(default = "yes")]
    pub jacobian: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivarianceEntry {
    pub word: String,
    pub residual: f64,
    pub total_variation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaturalMapPoint {
    pub y: ProductPoint<f64>,
    pub image: ProductPoint<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub p_trace_h: Vec<f64>,
    pub trace_hprime: f64,
    pub block_relation_residual: f64,
    pub det_h: f64,
    pub det_h_blocks: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
    pub equivariance: Vec<EquivarianceEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaturalMapOutput {
    pub ball_size: usize,
    pub target_entropy: f64,
    pub jacobian_bound: f64,
    pub barycenter_tol: f64,
    pub points: Vec<NaturalMapPoint>,
}

pub fn run_naturalmap(input: &NaturalMapInput, seed: u64, tol_override: Option<f64>) -> Result<NaturalMapOutput> {
    let mut cfg = input.config.clone();
    cfg.seed = seed;
    if let Some(t) = tol_override {
        cfg.barycenter_tol = t;
    }
    let source = input.source.to_product();
    let target = input.target.as_ref().map(RepresentationInput::to_product).unwrap_or_else(|| source.clone());
    let f = NaturalMap::new(&source, &target, cfg)?;
    let pres = source.presentation();
    let words: Vec<(String, Word)> =
        input.equivariance_words.iter().map(|w| Ok((w.clone(), pres.parse_word(w)?))).collect::<Result<Vec<_>>>()?;
    let n: usize = f.config().base_point.dims().iter().sum();
    let mut points = Vec::with_capacity(input.points.len());
    for y in &input.points {
        let value = f.eval(y)?;
        let forms = f.spectral_forms(y)?;
        let (det_h, det_h_blocks) = forms.fischer();
        let jac = if input.jacobian { Some(f.jacobian_fd(y)?) } else { None };
        let equivariance = words
            .iter()
            .map(|(s, w)| Ok(EquivarianceEntry { word: s.clone(), residual: f.equivariance_residual(y, w)?, total_variation: f.equivariance_tv(y, w)? }))
            .collect::<Result<Vec<_>>>()?;
        points.push(NaturalMapPoint {
            y: y.clone(),
            image: value.point,
            gradient_norm: value.gradient_norm,
            iterations: value.iterations,
            p_trace_h: forms.p_trace_h(),
            trace_hprime: forms.trace_hprime(),
            block_relation_residual: forms.block_relation_residual(),
            det_h,
            det_h_blocks,
            jacobian: jac.as_ref().map(|j| j.determinant),
            within_bound: jac.as_ref().map(|j| j.within_bound),
            equivariance,
        });
    }
    Ok(NaturalMapOutput {
        ball_size: f.ball_size(),
        target_entropy: f.target_entropy(),
        jacobian_bound: f.jacobian_bound(n),
        barycenter_tol: f.config().barycenter_tol,
        points,
    })
}

// --------------------------------------------------------------- fixtures

/// A bundled input document with the command that consumes it.
#[derive(Clone, Debug, PartialEq)]
pub struct BundledInput {
    pub file: &'static str,
    pub command: &'static str,
    pub document: Value,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("documents serialize")
}

/// The input documents shipped with the repository, one per fixture.
pub fn bundled_inputs() -> Result<Vec<BundledInput>> {
    let mut out = Vec::new();
    let mut push = |file, command, document| out.push(BundledInput { file, command, document });

    push("entropy_3_4.json", "entropy", to_value(&EntropyInput { dims: vec![3, 4], entropies: None }));

    let atoms: Vec<Value> = [0.0, 2.0, 4.0]
        .iter()
        .map(|&a: &f64| json!({ "theta": [[1.0, a.cos(), a.sin()]], "w": 1.0 }))
        .collect();
    push("barycenter_h2.json", "barycenter", json!({ "measure": { "factors": [2], "atoms": atoms } }));

    let third = std::f64::consts::TAU / 3.0;
    let ideal_triangle: Vec<VertexInput> = (0..3).map(|k| VertexInput::Direction(vec![(k as f64 * third).cos(), (k as f64 * third).sin()])).collect();
    push("ideal_triangle.json", "simplex", to_value(&SimplexInput { vertices: ideal_triangle }));
    let s = 1.0 / 3f64.sqrt();
    let regular: Vec<VertexInput> =
        [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]].iter().map(|v| VertexInput::Direction(v.to_vec())).collect();
    push("regular_ideal_tetrahedron.json", "simplex", to_value(&SimplexInput { vertices: regular }));

    let start: Vec<VertexInput> = [[0.1, 0.05, 0.0], [0.6, 0.0, 0.1], [0.0, 0.55, -0.05], [0.05, 0.1, 0.6]]
        .iter()
        .map(|v| VertexInput::Klein(v.to_vec()))
        .collect();
    let end: Vec<VertexInput> = [[-0.1, 0.0, 0.05], [0.5, 0.2, 0.0], [0.1, 0.6, 0.1], [0.0, -0.1, 0.7]]
        .iter()
        .map(|v| VertexInput::Klein(v.to_vec()))
        .collect();
    push("schlafli_h3.json", "schlafli", to_value(&SchlafliInput { start, end, samples: 11 }));

    let g2 = fixtures::genus2_fuchsian();
    let g2t = fixtures::genus2_triangulation()?;
    let g2doc = TriangulationDoc::from_triangulation(&g2t, &g2, true);
    let rv = |doc: &TriangulationDoc, rho: &Representation, positions: Option<Vec<Point<f64>>>| RepVolumeInput {
        triangulation: doc.clone(),
        representation: rho.clone(),
        positions,
        fixed_point_test: true,
    };
    push("genus2_repvolume.json", "repvolume", to_value(&rv(&g2doc, &g2, None)));
    let (flip, _) = fixtures::genus2_flip()?;
    push("genus2_flip_repvolume.json", "repvolume", to_value(&rv(&g2doc, &flip, None)));
    let para = fixtures::parabolic_representation(0.0)?;
    push("parabolic_repvolume.json", "repvolume", to_value(&rv(&g2doc, &para, None)));
    let (s3, trivial) = fixtures::s3_boundary();
    let s3doc = TriangulationDoc::from_triangulation(&s3, &trivial, false);
    push("s3_repvolume.json", "repvolume", to_value(&rv(&s3doc, &trivial, Some(s3.base_positions()))));

    let pres = g2.presentation();
    let bending = ScanInput {
        triangulation: g2doc.clone(),
        representation: g2.clone(),
        path: PathInput::Bending { curve: pres.format_word(&fixtures::genus2_separating_word()), bent: vec!["a2".into(), "b2".into()] },
        grid: GridInput { start: 0.0, end: 1.0, samples: 50 },
    };
    push("genus2_bending_scan.json", "scan", to_value(&bending));
    let mut x = Mat::zeros(3, 3);
    (x[(0, 1)], x[(1, 0)], x[(1, 2)], x[(2, 1)]) = (0.7, 0.7, -0.4, 0.4);
    let conjugation = ScanInput {
        triangulation: g2doc,
        representation: g2,
        path: PathInput::Conjugation { generator: x },
        grid: GridInput { start: 0.0, end: 1.0, samples: 21 },
    };
    push("genus2_conjugation_scan.json", "scan", to_value(&conjugation));

    let rho = fixtures::triangle_group_237();
    let cfg = fixtures::natural_map_config();
    let points = vec![
        cfg.base_point.clone(),
        ProductPoint::new(vec![Point::from_klein(&[0.3, 0.05])?]),
        ProductPoint::new(vec![Point::from_klein(&[0.35, 0.12])?]),
    ];
    let nm = NaturalMapInput {
        source: RepresentationInput::Single(rho),
        target: None,
        config: cfg,
        points,
        equivariance_words: vec!["t0".into(), "t1".into()],
        jacobian: true,
    };
    push("natural_map_237.json", "naturalmap", to_value(&nm));
    Ok(out)
}
