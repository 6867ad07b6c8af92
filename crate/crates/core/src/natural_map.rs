//! The barycenter natural map `F_eps(y) = bar(mu_{y,eps})`, its spectral
//! forms and its Jacobian.
//!
//! `mu_{y,eps}` spreads a quadrature of the visual measure at `O` over the
//! orbit of a truncated word ball:
//!
//! ```text
//! mu_{y,eps} = sum_{gamma in ball} exp(-h (1 + eps) d(y, gamma O)) rho(gamma)_* mu_O
//! ```
//!
//! normalized to unit mass. The ball is enumerated for the action on the
//! source and the same words are evaluated in the target representation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::group::{enumerate_ball, entropy_estimate};
use crate::group::{DedupIndex, ProductRepresentation, Representation, Transformation, Word, DEFAULT_BALL_CAP};
use crate::hyperbolic::{
    busemann_gradient, busemann_hessian_form, exp_map, ideal_point_of, log_map, sample, IdealPoint, TangentVector,
};
use crate::linalg::Mat;
use crate::measure::{barycenter, Atom, AtomicBoundaryMeasure, BarycenterOptions};
use crate::product::{entropy_weighted, ProductIdealPoint, ProductIsometry, ProductPoint, WeightedMetric};

/// Slack on the Jacobian bound for the truncated series.
pub const DEFAULT_BOUND_SLACK: f64 = 1.05;
/// Central finite-difference step in normal coordinates.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Barycenter gradient-norm tolerance used by the natural map.
pub const DEFAULT_BARYCENTER_TOL: f64 = 1e-12;

fn default_slack() -> f64 {
    DEFAULT_BOUND_SLACK
}
fn default_step() -> f64 {
    DEFAULT_FD_STEP
}
fn default_bary_tol() -> f64 {
    DEFAULT_BARYCENTER_TOL
}
fn default_cap() -> usize {
    DEFAULT_BALL_CAP
}
fn default_m() -> usize {
    256
}
fn default_l() -> usize {
    8
}

/// Parameters of the natural map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalMapConfig {
    pub epsilon: f64,
    /// Entropy of the source, the exponent rate `h` of the Poincare series.
    pub entropy_h: f64,
    #[serde(default = "default_m")]
    pub quadrature_size: usize,
    #[serde(default = "default_l")]
    pub ball_radius: usize,
    pub base_point: ProductPoint<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Entropy `E_0` of the target; defaults to that of the unweighted product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_entropy: Option<f64>,
    #[serde(default = "default_slack")]
    pub bound_slack: f64,
    #[serde(default = "default_step")]
    pub fd_step: f64,
    #[serde(default = "default_bary_tol")]
    pub barycenter_tol: f64,
    #[serde(default = "default_cap")]
    pub ball_cap: usize,
}

impl NaturalMapConfig {
    pub fn new(epsilon: f64, entropy_h: f64, base_point: ProductPoint<f64>) -> Self {
        Self {
            epsilon,
            entropy_h,
            quadrature_size: default_m(),
            ball_radius: default_l(),
            base_point,
            seed: 0,
            target_entropy: None,
            bound_slack: DEFAULT_BOUND_SLACK,
            fd_step: DEFAULT_FD_STEP,
            barycenter_tol: DEFAULT_BARYCENTER_TOL,
            ball_cap: DEFAULT_BALL_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon must be positive for the series to converge");
        }
        if !(self.entropy_h > 0.0) || !self.entropy_h.is_finite() {
            return bad("entropy_h must be positive");
        }
        if self.quadrature_size == 0 {
            return bad("quadrature_size must be positive");
        }
        if !(self.bound_slack >= 1.0) {
            return bad("bound_slack must be at least 1");
        }
        if !(self.fd_step > 0.0) || !(self.barycenter_tol > 0.0) {
            return bad("fd_step and barycenter_tol must be positive");
        }
        if self.target_entropy.is_some_and(|e| !(e > 0.0)) {
            return bad("target_entropy must be positive");
        }
        Ok(())
    }
}

/// Unit vectors of a deterministic set of `m` directions in `R^k`. Circles
/// use equally spaced angles with a seeded phase, 2-spheres a Fibonacci
/// lattice under a seeded rotation, higher spheres seeded Gaussian samples.
fn sphere_directions(k: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match k {
        1 => (0..m).map(|j| vec![if j % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => {
            let phase = rng.gen::<f64>() * std::f64::consts::TAU / m as f64;
            (0..m)
                .map(|j| {
                    let a = phase + std::f64::consts::TAU * (j as f64 + 0.5) / m as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let rot = random_orthogonal(rng, 3);
            (0..m)
                .map(|j| {
                    let z = 1.0 - (2.0 * j as f64 + 1.0) / m as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let a = golden * j as f64;
                    let u = [r * a.cos(), r * a.sin(), z];
                    (0..3).map(|i| (0..3).map(|j| rot[(i, j)] * u[j]).sum()).collect()
                })
                .collect()
        }
        _ => (0..m).map(|_| sample::unit_vector(rng, k)).collect(),
    }
}

/// `m`-atom quadrature of the visual measure at `base`, with unit total
/// mass. Factor directions are paired across factors by seeded shuffles.
pub fn visual_quadrature(base: &ProductPoint<f64>, m: usize, seed: u64) -> Result<AtomicBoundaryMeasure<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one atom".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_factor: Vec<Vec<IdealPoint<f64>>> = Vec::new();
    for (i, o) in base.components().iter().enumerate() {
        let dirs = sphere_directions(o.dim(), m, &mut rng);
        let mut points = dirs
            .iter()
            .map(|d| ideal_point_of(&TangentVector::from_frame_coords(o.clone(), d)?))
            .collect::<Result<Vec<_>>>()?;
        if i > 0 {
            points.shuffle(&mut rng);
        }
        per_factor.push(points);
    }
    let w = 1.0 / m as f64;
    let atoms = (0..m)
        .map(|j| Atom { theta: ProductIdealPoint::new(per_factor.iter().map(|f| f[j].clone()).collect()), w })
        .collect();
    AtomicBoundaryMeasure::new(base.dims(), atoms)
}

/// Lifts a representation on `H^n` to the one-factor product.
pub fn as_product(rho: &Representation) -> ProductRepresentation {
    let images = rho.images().iter().map(|g| ProductIsometry::new(vec![g.clone()])).collect();
    Representation::new(rho.presentation().clone(), images).expect("same rank")
}

/// Diagonal action of `rho` on the `p`-fold product.
pub fn diagonal(rho: &Representation, p: usize) -> ProductRepresentation {
    let images = rho.images().iter().map(|g| ProductIsometry::new(vec![g.clone(); p])).collect();
    Representation::new(rho.presentation().clone(), images).expect("same rank")
}

/// One element of the truncated series.
#[derive(Clone, Debug)]
struct Term {
    source: ProductIsometry<f64>,
    orbit_point: ProductPoint<f64>,
    atoms: Vec<ProductIdealPoint<f64>>,
}

/// The natural map of a pair (source action, target representation).
#[derive(Clone, Debug)]
pub struct NaturalMap {
    config: NaturalMapConfig,
    source: ProductRepresentation,
    target: ProductRepresentation,
    mu_o: AtomicBoundaryMeasure<f64>,
    terms: Vec<Term>,
}

/// Barycenter of `mu_{y,eps}` with solver diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaturalMapValue {
    pub point: ProductPoint<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// The forms `H`, `K` at `F(y)` and `h'` at `y`, in orthonormal frames,
/// with per-factor blocks ordered as the factors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralForms {
    pub h: Mat<f64>,
    pub k: Mat<f64>,
    pub hprime: Mat<f64>,
    pub factor_dims: Vec<usize>,
}

fn block_offsets(dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .scan(0, |acc, &d| {
            let start = *acc;
            *acc += d;
            Some(start)
        })
        .collect()
}

impl SpectralForms {
    fn blocks(&self, m: &Mat<f64>) -> Vec<Mat<f64>> {
        block_offsets(&self.factor_dims).iter().zip(&self.factor_dims).map(|(&o, &d)| m.block(o, o, d, d)).collect()
    }

    pub fn h_blocks(&self) -> Vec<Mat<f64>> {
        self.blocks(&self.h)
    }

    pub fn k_blocks(&self) -> Vec<Mat<f64>> {
        self.blocks(&self.k)
    }

    /// `trace(p H_k)` for every factor; each equals 1 for a normalized measure.
    pub fn p_trace_h(&self) -> Vec<f64> {
        let p = self.factor_dims.len() as f64;
        self.h_blocks().iter().map(|b| p * b.trace()).collect()
    }

    pub fn trace_hprime(&self) -> f64 {
        self.hprime.trace()
    }

    /// `max_k |K_k - (1/sqrt p)(I - p H_k)|` together with the largest
    /// off-diagonal block entry of `K`.
    pub fn block_relation_residual(&self) -> f64 {
        let p = self.factor_dims.len() as f64;
        let mut r: f64 = 0.0;
        for (kb, hb) in self.k_blocks().iter().zip(self.h_blocks()) {
            let n = kb.rows();
            let rhs = Mat::identity(n).sub(&hb.scale(p)).scale(1.0 / p.sqrt());
            r = r.max(kb.max_abs_diff(&rhs));
        }
        let offsets = block_offsets(&self.factor_dims);
        let owner = |i: usize| offsets.iter().rposition(|&o| o <= i).unwrap_or(0);
        for i in 0..self.k.rows() {
            for j in 0..self.k.cols() {
                if owner(i) != owner(j) {
                    r = r.max(self.k[(i, j)].abs());
                }
            }
        }
        r
    }

    /// `(det H, prod_k det H_k)`; the first never exceeds the second.
    pub fn fischer(&self) -> (f64, f64) {
        (self.h.det(), self.h_blocks().iter().map(Mat::det).product())
    }
}

/// Finite-difference Jacobian of the natural map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    pub matrix: Mat<f64>,
    pub determinant: f64,
    /// `(1 + eps)^n (h / E_0)^n * slack`.
    pub bound: f64,
    pub within_bound: bool,
}

impl NaturalMap {
    /// Enumerates the ball for `source` and evaluates its words in `target`.
    pub fn new(source: &ProductRepresentation, target: &ProductRepresentation, config: NaturalMapConfig) -> Result<Self> {
        config.validate()?;
        if source.presentation() != target.presentation() {
            return Err(Error::StructureMismatch("source and target must share the presentation".into()));
        }
        crate::product::check_dims(&source.identity_element().dims(), &config.base_point.dims())?;
        let mu_o = visual_quadrature(&target_base(target, &config)?, config.quadrature_size, config.seed)?;
        let ball = enumerate_ball(source, config.ball_radius, config.ball_cap)?;
        if ball.is_empty() {
            return Err(Error::EmptyBall);
        }
        let mut terms = Vec::with_capacity(ball.len());
        for e in ball.elements {
            let g = target.evaluate(&e.word);
            let atoms = mu_o.atoms().iter().map(|a| g.apply_ideal(&a.theta)).collect::<Result<Vec<_>>>()?;
            let orbit_point = e.element.apply_point(&config.base_point)?;
            terms.push(Term { source: e.element, orbit_point, atoms });
        }
        Ok(Self { config, source: source.clone(), target: target.clone(), mu_o, terms })
    }

    /// The natural map of the identity representation of `rho`.
    pub fn identity(rho: &ProductRepresentation, config: NaturalMapConfig) -> Result<Self> {
        Self::new(rho, rho, config)
    }

    pub fn config(&self) -> &NaturalMapConfig {
        &self.config
    }

    pub fn ball_size(&self) -> usize {
        self.terms.len()
    }

    pub fn mu_o(&self) -> &AtomicBoundaryMeasure<f64> {
        &self.mu_o
    }

    pub fn source(&self) -> &ProductRepresentation {
        &self.source
    }

    pub fn target(&self) -> &ProductRepresentation {
        &self.target
    }

    /// Target entropy `E_0`.
    pub fn target_entropy(&self) -> f64 {
        self.config.target_entropy.unwrap_or_else(|| {
            let dims = self.target.identity_element().dims();
            entropy_weighted(&WeightedMetric::<f64>::real(&dims).expect("valid dimensions"))
        })
    }

    /// Normalized series weights of the ball elements at `y`.
    fn term_weights(&self, y: &ProductPoint<f64>) -> Result<Vec<f64>> {
        let rate = self.config.entropy_h * (1.0 + self.config.epsilon);
        let d = self.terms.iter().map(|t| ProductIsometry::space_distance(y, &t.orbit_point)).collect::<Result<Vec<_>>>()?;
        let d_min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = d.iter().map(|x| (-rate * (x - d_min)).exp()).collect();
        let total: f64 = w.iter().sum();
        Ok(w.into_iter().map(|x| x / total).collect())
    }

    /// `mu_{y,eps}`, normalized to unit mass.
    pub fn mu_y_eps(&self, y: &ProductPoint<f64>) -> Result<AtomicBoundaryMeasure<f64>> {
        let weights = self.term_weights(y)?;
        let mut atoms = Vec::with_capacity(self.terms.len() * self.mu_o.len());
        for (t, &w) in self.terms.iter().zip(&weights) {
            if w == 0.0 {
                continue;
            }
            for (theta, a) in t.atoms.iter().zip(self.mu_o.atoms()) {
                atoms.push(Atom { theta: theta.clone(), w: w * a.w });
            }
        }
        AtomicBoundaryMeasure::new(self.mu_o.factors().to_vec(), atoms)
    }

    fn solve(&self, y: &ProductPoint<f64>, initial: Option<ProductPoint<f64>>) -> Result<NaturalMapValue> {
        let mu = self.mu_y_eps(y)?;
        let opts = BarycenterOptions { tol: self.config.barycenter_tol, max_iter: 500, initial };
        let r = barycenter(&mu, &opts)?;
        Ok(NaturalMapValue { point: r.point, gradient_norm: r.gradient_norm, iterations: r.iterations })
    }

    /// `F_eps(y)`.
    pub fn eval(&self, y: &ProductPoint<f64>) -> Result<NaturalMapValue> {
        self.solve(y, None)
    }

    /// `d(F(gamma y), rho(gamma) F(y))` for the word `gamma`.
    pub fn equivariance_residual(&self, y: &ProductPoint<f64>, gamma: &Word) -> Result<f64> {
        let gy = self.source.evaluate(gamma).apply_point(y)?;
        let lhs = self.eval(&gy)?.point;
        let rhs = self.target.evaluate(gamma).apply_point(&self.eval(y)?.point)?;
        ProductIsometry::space_distance(&lhs, &rhs)
    }

    /// Total-variation distance between `mu_{gamma y}` and
    /// `rho(gamma)_* mu_y`. Both are combinations of translates of `mu_O`
    /// indexed by group elements, so the distance is computed on the
    /// element weights, matching elements through the source matrices.
    pub fn equivariance_tv(&self, y: &ProductPoint<f64>, gamma: &Word) -> Result<f64> {
        let g = self.source.evaluate(gamma);
        let gy = g.apply_point(y)?;
        let w_direct = self.term_weights(&gy)?;
        let w_pushed = self.term_weights(y)?;
        let mut index = DedupIndex::new();
        for t in &self.terms {
            index.insert(t.source.clone());
        }
        let mut used = vec![false; self.terms.len()];
        let mut tv = 0.0;
        for (t, &wp) in self.terms.iter().zip(&w_pushed) {
            match index.find(&g.compose(&t.source)?) {
                Some(k) if !used[k] => {
                    used[k] = true;
                    tv += (w_direct[k] - wp).abs();
                }
                _ => tv += wp,
            }
        }
        tv += w_direct.iter().zip(&used).filter(|(_, &u)| !u).map(|(w, _)| w).sum::<f64>();
        Ok(0.5 * tv)
    }

    /// `H`, `K` at `F(y)` and `h'` at `y`. `h'` sums over the ball elements
    /// with `gamma O != y` (the distance is not differentiable at
    /// `gamma O = y`), renormalized over them.
    pub fn spectral_forms(&self, y: &ProductPoint<f64>) -> Result<SpectralForms> {
        let x = self.eval(y)?.point;
        self.spectral_forms_at(y, &x)
    }

    fn spectral_forms_at(&self, y: &ProductPoint<f64>, x: &ProductPoint<f64>) -> Result<SpectralForms> {
        let mu = self.mu_y_eps(y)?;
        let dims = x.dims();
        let p = dims.len() as f64;
        let inv_sqrt_p = 1.0 / p.sqrt();
        let n: usize = dims.iter().sum();
        let offsets = block_offsets(&dims);
        let frames: Vec<Vec<Vec<f64>>> = x.components().iter().map(|c| c.tangent_frame()).collect();
        let mut h = Mat::zeros(n, n);
        let mut k = Mat::zeros(n, n);
        let mass = mu.mass();
        for a in mu.atoms() {
            let w = a.w / mass;
            let mut db = vec![0.0; n];
            for (i, (xi, th)) in x.components().iter().zip(a.theta.components()).enumerate() {
                let g = busemann_gradient(xi, th)?.frame_coords();
                for (r, gr) in g.iter().enumerate() {
                    db[offsets[i] + r] = inv_sqrt_p * gr;
                }
                for (r, fr) in frames[i].iter().enumerate() {
                    for (s, fs) in frames[i].iter().enumerate() {
                        k[(offsets[i] + r, offsets[i] + s)] += w * inv_sqrt_p * busemann_hessian_form(xi, th, fr, fs)?;
                    }
                }
            }
            for r in 0..n {
                for s in 0..n {
                    h[(r, s)] += w * db[r] * db[s];
                }
            }
        }
        let src_dims = y.dims();
        let m: usize = src_dims.iter().sum();
        let src_offsets = block_offsets(&src_dims);
        let weights = self.term_weights(y)?;
        let mut hp = Mat::zeros(m, m);
        let mut kept = 0.0;
        for (t, &w) in self.terms.iter().zip(&weights) {
            let d = ProductIsometry::space_distance(y, &t.orbit_point)?;
            if !(d > 1e-12) {
                continue;
            }
            let mut grad = vec![0.0; m];
            for (i, (yi, zi)) in y.components().iter().zip(t.orbit_point.components()).enumerate() {
                let v = log_map(yi, zi)?.frame_coords();
                for (r, vr) in v.iter().enumerate() {
                    grad[src_offsets[i] + r] = -vr / d;
                }
            }
            for r in 0..m {
                for s in 0..m {
                    hp[(r, s)] += w * grad[r] * grad[s];
                }
            }
            kept += w;
        }
        if kept > 0.0 {
            hp = hp.scale(1.0 / kept);
        }
        Ok(SpectralForms { h: h.symmetrized(), k: k.symmetrized(), hprime: hp.symmetrized(), factor_dims: dims })
    }

    /// Central finite-difference differential of `F` in orthonormal frames
    /// at `y` and `F(y)`, its determinant, and the bound
    /// `(1 + eps)^n (h / E_0)^n` times the configured slack.
    pub fn jacobian_fd(&self, y: &ProductPoint<f64>) -> Result<JacobianReport> {
        let fy = self.eval(y)?.point;
        let src_dims = y.dims();
        let tgt_dims = fy.dims();
        let n: usize = tgt_dims.iter().sum();
        let m: usize = src_dims.iter().sum();
        if n != m {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        let step = self.config.fd_step;
        if !(step > 1e-12) {
            return Err(Error::InvalidParameter(format!("finite-difference step {step} is degenerate")));
        }
        let mut cols = Vec::with_capacity(m);
        for (i, yi) in y.components().iter().enumerate() {
            for a in 0..yi.dim() {
                let mut e = vec![0.0; yi.dim()];
                let mut image = |sign: f64| -> Result<Vec<f64>> {
                    e[a] = sign * step;
                    let moved = exp_map(&TangentVector::from_frame_coords(yi.clone(), &e)?);
                    let mut comps = y.components().to_vec();
                    comps[i] = moved;
                    let f = self.solve(&ProductPoint::new(comps), Some(fy.clone()))?.point;
                    let mut out = Vec::with_capacity(n);
                    for (xc, fc) in fy.components().iter().zip(f.components()) {
                        out.extend(log_map(xc, fc)?.frame_coords());
                    }
                    Ok(out)
                };
                let plus = image(1.0)?;
                let minus = image(-1.0)?;
                cols.push(plus.iter().zip(&minus).map(|(p, q)| (p - q) / (2.0 * step)).collect::<Vec<_>>());
            }
        }
        let matrix = Mat::from_cols(&cols);
        let determinant = matrix.det();
        let bound = self.jacobian_bound(n);
        Ok(JacobianReport { determinant, bound, within_bound: determinant.abs() <= bound, matrix })
    }

    /// `(1 + eps)^n (h / E_0)^n * slack`.
    pub fn jacobian_bound(&self, n: usize) -> f64 {
        let c = &self.config;
        ((1.0 + c.epsilon) * c.entropy_h / self.target_entropy()).powi(n as i32) * c.bound_slack
    }
}

fn target_base(target: &ProductRepresentation, config: &NaturalMapConfig) -> Result<ProductPoint<f64>> {
    crate::product::check_dims(&target.identity_element().dims(), &config.base_point.dims())?;
    Ok(config.base_point.clone())
}

/// Both sides of the algebraic inequality
/// `sqrt(det 2H) / det(I - 2H) <= (sqrt(n) / (n - 1))^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Checks the determinant inequality for a symmetric positive definite
/// `n x n` matrix `H` with `trace(2H) = 1` and `I - 2H` positive definite.
pub fn det_inequality_check(h: &Mat<f64>, n: usize) -> Result<DetInequality> {
    if n < 2 {
        return Err(Error::InvalidParameter("the inequality needs n >= 2".into()));
    }
    if h.rows() != n || h.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.rows() });
    }
    if h.max_abs_diff(&h.transpose()) > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::InvalidParameter("H is not symmetric".into()));
    }
    let two_h = h.scale(2.0);
    if !((two_h.trace() - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidParameter(format!("trace(2H) = {} differs from 1", two_h.trace())));
    }
    let (vals, _) = two_h.symmetric_eigen();
    if !(vals[0] > 0.0) || !(vals[n - 1] < 1.0) {
        return Err(Error::InvalidParameter("H must be positive definite with I - 2H positive definite".into()));
    }
    let lhs = two_h.det().sqrt() / Mat::identity(n).sub(&two_h).det();
    let rhs = ((n as f64).sqrt() / (n - 1) as f64).powi(n as i32);
    Ok(DetInequality { lhs, rhs, ok: lhs <= rhs + 1e-12 })
}

/// Random symmetric `H` with `trace(2H) = 1`, `2H` having eigenvalues drawn
/// from a flat Dirichlet distribution and a random orthonormal eigenbasis.
pub fn random_constrained_h<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<f64> {
    let mut lambda: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= s);
    let q = random_orthogonal(rng, n);
    let d = Mat::from_fn(n, n, |i, j| if i == j { 0.5 * lambda[i] } else { 0.0 });
    q.mul(&d).mul(&q.transpose()).symmetrized()
}

fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = sample::unit_vector(rng, n);
        for c in &cols {
            let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.iter().map(|a| a / norm).collect());
        }
    }
    Mat::from_cols(&cols)
}

/// Sample point of `H^2` in the geodesic triangle with the given vertices,
/// from barycentric weights in the Klein model.
pub fn klein_triangle_point<R: Rng + ?Sized>(rng: &mut R, corners: &[crate::hyperbolic::Point<f64>; 3]) -> Result<crate::hyperbolic::Point<f64>> {
    let mut b: Vec<f64> = (0..3).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = b.iter().sum();
    b.iter_mut().for_each(|x| *x /= s);
    let k: Vec<Vec<f64>> = corners.iter().map(|c| c.klein()).collect();
    let u: Vec<f64> = (0..2).map(|r| (0..3).map(|i| b[i] * k[i][r]).sum()).collect();
    crate::hyperbolic::Point::from_klein(&u)
}
