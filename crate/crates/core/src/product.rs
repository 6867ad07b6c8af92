//! Products of real hyperbolic spaces with weighted metrics
//! `g_alpha = alpha_1^2 g_1 + ... + alpha_p^2 g_p`.
//!
//! Non-real symmetric factors only appear as `(dimension, entropy)` pairs;
//! they take part in the entropy and scaling computations but carry no
//! geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{busemann_value, distance, IdealPoint, Isometry, Point};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// What kind of rank-one symmetric space a factor is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorKind {
    RealHyperbolic,
    Parametric,
}

/// Dimension and volume entropy of one factor.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec<T> {
    dim: usize,
    entropy: T,
    kind: FactorKind,
}

impl<T: Real> FactorSpec<T> {
    /// Real hyperbolic space `H^n`, entropy `n - 1`.
    pub fn real_hyperbolic(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("factor dimension {dim} < 2")));
        }
        Ok(Self { dim, entropy: from_usize(dim - 1), kind: FactorKind::RealHyperbolic })
    }

    /// Arbitrary `(dim, entropy)` pair with no geometry attached.
    pub fn parametric(dim: usize, entropy: T) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("factor dimension {dim} < 2")));
        }
        if !(entropy > T::zero()) || !entropy.is_finite() {
            return Err(Error::InvalidParameter(format!("factor entropy {entropy} must be positive")));
        }
        Ok(Self { dim, entropy, kind: FactorKind::Parametric })
    }

    /// Complex hyperbolic space of complex dimension `m` (real dimension `2m`),
    /// curvature pinched in `[-4, -1]`: entropy `2m`.
    pub fn complex_hyperbolic(m: usize) -> Result<Self> {
        Self::parametric(2 * m, from_usize(2 * m))
    }

    /// Quaternionic hyperbolic space of quaternionic dimension `m`: entropy `4m + 2`.
    pub fn quaternionic_hyperbolic(m: usize) -> Result<Self> {
        Self::parametric(4 * m, from_usize(4 * m + 2))
    }

    /// The Cayley hyperbolic plane: real dimension 16, entropy 22.
    pub fn cayley_plane() -> Result<Self> {
        Self::parametric(16, lit(22.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entropy(&self) -> T {
        self.entropy
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn is_real_hyperbolic(&self) -> bool {
        self.kind == FactorKind::RealHyperbolic
    }
}

/// A list of factors together with their weights `alpha_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMetric<T> {
    factors: Vec<FactorSpec<T>>,
    alphas: Vec<T>,
}

impl<T: Real> WeightedMetric<T> {
    pub fn new(factors: Vec<FactorSpec<T>>, alphas: Vec<T>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("metric needs at least one factor".into()));
        }
        if factors.len() != alphas.len() {
            return Err(Error::StructureMismatch(format!(
                "{} factors but {} weights",
                factors.len(),
                alphas.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| !(**a > T::zero()) || !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight {a} must be positive")));
        }
        Ok(Self { factors, alphas })
    }

    /// Unweighted metric `alpha = (1, ..., 1)`.
    pub fn unweighted(factors: Vec<FactorSpec<T>>) -> Result<Self> {
        let alphas = vec![T::one(); factors.len()];
        Self::new(factors, alphas)
    }

    /// Product of real hyperbolic spaces of the given dimensions, unweighted.
    pub fn real(dims: &[usize]) -> Result<Self> {
        let factors = dims.iter().map(|&d| FactorSpec::real_hyperbolic(d)).collect::<Result<_>>()?;
        Self::unweighted(factors)
    }

    pub fn factors(&self) -> &[FactorSpec<T>] {
        &self.factors
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total dimension `n = sum n_i`.
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).sum()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    fn require_real(&self) -> Result<()> {
        match self.factors.iter().position(|f| !f.is_real_hyperbolic()) {
            Some(i) => Err(Error::InvalidParameter(format!("factor {i} is parametric and has no geometry"))),
            None => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MetricRepr<T> {
    dims: Vec<usize>,
    entropies: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kinds: Option<Vec<FactorKind>>,
}

impl<T: Real + Serialize> Serialize for WeightedMetric<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MetricRepr {
            dims: self.dims(),
            entropies: self.factors.iter().map(|f| f.entropy).collect(),
            alphas: Some(self.alphas.clone()),
            kinds: Some(self.factors.iter().map(|f| f.kind).collect()),
        }
        .serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for WeightedMetric<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MetricRepr::<T>::deserialize(d)?;
        if r.dims.len() != r.entropies.len() {
            return Err(D::Error::custom("dims and entropies differ in length"));
        }
        let kinds = r.kinds.unwrap_or_else(|| {
            r.dims
                .iter()
                .zip(&r.entropies)
                .map(|(&n, &e)| {
                    if n >= 1 && e == from_usize::<T>(n - 1) {
                        FactorKind::RealHyperbolic
                    } else {
                        FactorKind::Parametric
                    }
                })
                .collect()
        });
        if kinds.len() != r.dims.len() {
            return Err(D::Error::custom("kinds and dims differ in length"));
        }
        let factors = r
            .dims
            .iter()
            .zip(&r.entropies)
            .zip(&kinds)
            .map(|((&n, &e), k)| match k {
                FactorKind::RealHyperbolic => {
                    let f = FactorSpec::real_hyperbolic(n)?;
                    if f.entropy != e {
                        return Err(Error::InvalidParameter(format!(
                            "real hyperbolic factor of dimension {n} has entropy {}, not {e}",
                            n - 1
                        )));
                    }
                    Ok(f)
                }
                FactorKind::Parametric => FactorSpec::parametric(n, e),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let alphas = r.alphas.unwrap_or_else(|| vec![T::one(); factors.len()]);
        WeightedMetric::new(factors, alphas).map_err(D::Error::custom)
    }
}

/// A point of a product of real hyperbolic spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ProductPoint<T> {
    components: Vec<Point<T>>,
}

impl<T: Real> ProductPoint<T> {
    pub fn new(components: Vec<Point<T>>) -> Self {
        Self { components }
    }

    pub fn origin(dims: &[usize]) -> Self {
        Self { components: dims.iter().map(|&n| Point::origin(n)).collect() }
    }

    pub fn components(&self) -> &[Point<T>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Point<T>> {
        self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }
}

/// A point of the Furstenberg boundary, one ideal point per factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ProductIdealPoint<T> {
    components: Vec<IdealPoint<T>>,
}

impl<T: Real> ProductIdealPoint<T> {
    pub fn new(components: Vec<IdealPoint<T>>) -> Self {
        Self { components }
    }

    pub fn components(&self) -> &[IdealPoint<T>] {
        &self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }
}

/// Componentwise isometry of a product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ProductIsometry<T> {
    components: Vec<Isometry<T>>,
}

impl<T: Real> ProductIsometry<T> {
    pub fn new(components: Vec<Isometry<T>>) -> Self {
        Self { components }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { components: dims.iter().map(|&n| Isometry::identity(n)).collect() }
    }

    pub fn components(&self) -> &[Isometry<T>] {
        &self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim()).collect()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(&self.dims(), &other.dims())?;
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| a.compose(b)).collect() })
    }

    pub fn inverse(&self) -> Self {
        Self { components: self.components.iter().map(Isometry::inverse).collect() }
    }

    pub fn reorthonormalized(&self) -> Self {
        Self { components: self.components.iter().map(Isometry::reorthonormalized).collect() }
    }

    pub fn apply_point(&self, x: &ProductPoint<T>) -> Result<ProductPoint<T>> {
        check_dims(&self.dims(), &x.dims())?;
        let c = self.components.iter().zip(&x.components).map(|(g, p)| g.apply_point(p)).collect::<Result<_>>()?;
        Ok(ProductPoint::new(c))
    }

    pub fn apply_ideal(&self, theta: &ProductIdealPoint<T>) -> Result<ProductIdealPoint<T>> {
        check_dims(&self.dims(), &theta.dims())?;
        let c = self.components.iter().zip(&theta.components).map(|(g, t)| g.apply_ideal(t)).collect::<Result<_>>()?;
        Ok(ProductIdealPoint::new(c))
    }

    /// Largest `|G - G'|` entry over all factors.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.matrix().max_abs_diff(b.matrix()))
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn check_dims(expected: &[usize], found: &[usize]) -> Result<()> {
    if expected != found {
        return Err(Error::StructureMismatch(format!("factor dimensions {expected:?} vs {found:?}")));
    }
    Ok(())
}

fn check_metric<T: Real>(metric: &WeightedMetric<T>, dims: &[usize]) -> Result<()> {
    metric.require_real()?;
    check_dims(&metric.dims(), dims)
}

/// `sqrt(sum alpha_i^2 d_i(x_i, y_i)^2)`.
pub fn product_distance<T: Real>(x: &ProductPoint<T>, y: &ProductPoint<T>, metric: &WeightedMetric<T>) -> Result<T> {
    check_metric(metric, &x.dims())?;
    check_dims(&x.dims(), &y.dims())?;
    let mut acc = T::zero();
    for ((a, b), &w) in x.components.iter().zip(&y.components).zip(&metric.alphas) {
        let d = distance(a, b)? * w;
        acc = acc + d * d;
    }
    Ok(acc.sqrt())
}

/// `(1 / sqrt(sum alpha_i^2)) sum alpha_i B_i(x_i, theta_i)`.
pub fn product_busemann<T: Real>(
    x: &ProductPoint<T>,
    theta: &ProductIdealPoint<T>,
    metric: &WeightedMetric<T>,
) -> Result<T> {
    check_metric(metric, &x.dims())?;
    check_dims(&x.dims(), &theta.dims())?;
    let norm = metric.alphas.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt();
    let mut acc = T::zero();
    for ((p, t), &a) in x.components.iter().zip(&theta.components).zip(&metric.alphas) {
        acc = acc + a * busemann_value(p, t)?;
    }
    Ok(acc / norm)
}

/// Volume entropy of the weighted product, `sqrt(sum E_i^2 / alpha_i^2)`.
pub fn entropy_weighted<T: Real>(metric: &WeightedMetric<T>) -> T {
    metric
        .factors
        .iter()
        .zip(&metric.alphas)
        .fold(T::zero(), |acc, (f, &a)| {
            let r = f.entropy / a;
            acc + r * r
        })
        .sqrt()
}

/// Minimizer of the entropy over weights with unit volume scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult<T> {
    pub a: Vec<T>,
    pub entropy_min: T,
}

/// Weights minimizing [`entropy_weighted`] under `prod alpha_i^{n_i} = 1`.
pub fn optimal_scaling<T: Real>(factors: &[FactorSpec<T>]) -> Result<ScalingResult<T>> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("need at least one factor".into()));
    }
    for f in factors {
        if f.dim == 0 || !(f.entropy > T::zero()) {
            return Err(Error::InvalidParameter(format!("factor ({}, {}) must be positive", f.dim, f.entropy)));
        }
    }
    let n: usize = factors.iter().map(|f| f.dim).sum();
    let nt: T = from_usize(n);
    // work in logs so that large products stay representable
    let log_c = factors.iter().fold(T::zero(), |acc, f| {
        let ni: T = from_usize(f.dim);
        acc + (ni / nt) * (ni.sqrt() / f.entropy).ln()
    });
    let a: Vec<T> = factors
        .iter()
        .map(|f| {
            let ratio = f.entropy / from_usize::<T>(f.dim).sqrt();
            (ratio.ln() + log_c).exp()
        })
        .collect();
    let entropy_min = nt.sqrt() * (-log_c).exp();
    Ok(ScalingResult { a, entropy_min })
}

/// `prod alpha_i^{n_i}`, the ratio of volume elements of `g_alpha` and `g_0`.
pub fn volume_scale<T: Real>(metric: &WeightedMetric<T>) -> T {
    metric
        .factors
        .iter()
        .zip(&metric.alphas)
        .fold(T::zero(), |acc, (f, &a)| acc + from_usize::<T>(f.dim) * a.ln())
        .exp()
}

/// `(ent_y / ent_x)^n vol_y`.
pub fn volume_upper_bound<T: Real>(ent_y: T, vol_y: T, ent_x: T, n: usize) -> Result<T> {
    for (name, v) in [("ent_y", ent_y), ("vol_y", vol_y), ("ent_x", ent_x)] {
        if !(v > T::zero()) {
            return Err(Error::InvalidParameter(format!("{name} = {} must be positive", to_f64(v))));
        }
    }
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok((ent_y / ent_x).powi(n as i32) * vol_y)
}

/// `(ent_x / (n - 1))^n vol_rho`.
pub fn minvol_lower_bound<T: Real>(ent_x: T, n: usize, vol_rho: T) -> Result<T> {
    if n <= 1 {
        return Err(Error::InvalidParameter(format!("dimension {n} must exceed 1")));
    }
    if !(ent_x > T::zero()) || vol_rho < T::zero() {
        return Err(Error::InvalidParameter("entropy must be positive and volume nonnegative".into()));
    }
    Ok((ent_x / from_usize::<T>(n - 1)).powi(n as i32) * vol_rho)
}
