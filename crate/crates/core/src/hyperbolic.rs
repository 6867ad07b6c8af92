//! Real hyperbolic space `H^n` in the hyperboloid model.
//!
//! Points live on the upper sheet `{x : <x,x> = -1, x_0 > 0}` of Minkowski
//! space `R^{n,1}` with `<x,y> = -x_0 y_0 + x_1 y_1 + ... + x_n y_n`.
//! Ideal points are future lightlike rays normalized by `<ray, o> = -1`,
//! i.e. `ray = (1, xi)` with `|xi| = 1`, where `o = (1, 0, ..., 0)` is the
//! fixed origin. With this normalization the Busemann function is
//!
//! ```text
//! B(x, theta) = ln(-<x, theta>)
//! ```
//!
//! which vanishes at `o` and equals `-t` along the unit-speed ray from `o`
//! to `theta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::{lit, to_f64, Real};

/// Minkowski bilinear form of signature `(-, +, ..., +)`.
#[inline]
pub fn minkowski_dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = -a[0] * b[0];
    for i in 1..a.len() {
        acc = acc + a[i] * b[i];
    }
    acc
}

/// Lowers an index: `J v`.
#[inline]
pub fn lower<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out[0] = -out[0];
    out
}

/// `arcosh(-<x,y>)` for two sheet points. Near the diagonal the chord
/// length `|x - y|` is used instead, since `-<x,y>` loses all its digits
/// there; far apart the chord itself cancels, so `arcosh` is used.
#[inline]
fn sheet_distance<T: Real>(x: &[T], y: &[T]) -> T {
    let q = -minkowski_dot(x, y);
    if q > lit(1.5) {
        return q.acosh();
    }
    let diff = linalg::sub(x, y);
    let chord2 = minkowski_dot(&diff, &diff).max(T::zero());
    lit::<T>(2.0) * (chord2.sqrt() * lit(0.5)).asinh()
}

/// A point of `H^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<T>",
    into = "Vec<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Real> Point<T> {
    /// Validates sheet membership.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::UnsupportedDimension(coords.len().saturating_sub(1)));
        }
        let residual = to_f64(minkowski_dot(&coords, &coords) + T::one());
        let scale = to_f64(coords[0] * coords[0]).max(1.0);
        if !(residual.abs() <= T::INVARIANT_TOL * scale) || !(coords[0] > T::zero()) {
            return Err(Error::NotOnSheet { residual });
        }
        Ok(Self { coords })
    }

    /// Accepts any future timelike vector and rescales it onto the sheet.
    pub fn normalized(coords: Vec<T>) -> Result<Self> {
        let q = minkowski_dot(&coords, &coords);
        if !(q < T::zero()) || !(coords[0] > T::zero()) {
            return Err(Error::NotOnSheet { residual: to_f64(q + T::one()) });
        }
        let s = (-q).sqrt().recip();
        Ok(Self { coords: linalg::scaled(s, &coords) })
    }

    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self { coords }
    }

    /// The origin `o = (1, 0, ..., 0)` of `H^n`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![T::zero(); n + 1];
        coords[0] = T::one();
        Self { coords }
    }

    /// Lift of Klein-model coordinates (`|u| < 1`).
    pub fn from_klein(u: &[T]) -> Result<Self> {
        let r2 = linalg::dot(u, u);
        if !(r2 < T::one()) {
            return Err(Error::NotOnSheet { residual: to_f64(r2 - T::one()) });
        }
        let x0 = (T::one() - r2).sqrt().recip();
        let mut coords = Vec::with_capacity(u.len() + 1);
        coords.push(x0);
        coords.extend(u.iter().map(|&v| v * x0));
        Ok(Self { coords })
    }

    /// Klein-model coordinates `x_i / x_0`.
    pub fn klein(&self) -> Vec<T> {
        self.coords[1..].iter().map(|&v| v / self.coords[0]).collect()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Dimension `n` of the space (not the ambient `n + 1`).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Pulls the point back onto the sheet after accumulated rounding.
    /// Recomputes the time coordinate from the spatial ones; unlike a
    /// rescaling this stays accurate far from the origin.
    pub fn renormalized(&self) -> Self {
        let mut coords = self.coords.clone();
        coords[0] = (T::one() + linalg::dot(&coords[1..], &coords[1..])).sqrt();
        Self { coords }
    }

    /// Orthonormal frame of `T_x`: the images of `e_1, ..., e_n` under the
    /// pure boost taking `o` to `x`.
    pub fn tangent_frame(&self) -> Vec<Vec<T>> {
        let boost = boost_matrix(&self.coords);
        (1..self.coords.len()).map(|j| boost.col(j)).collect()
    }
}

impl<T: Real> From<Point<T>> for Vec<T> {
    fn from(p: Point<T>) -> Self {
        p.coords
    }
}

impl<T: Real> TryFrom<Vec<T>> for Point<T> {
    type Error = Error;
    fn try_from(coords: Vec<T>) -> Result<Self> {
        Point::new(coords)
    }
}

/// A tangent vector at a point of `H^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T> {
    base: Point<T>,
    vec: Vec<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Point<T>, vec: Vec<T>) -> Result<Self> {
        if vec.len() != base.coords.len() {
            return Err(Error::DimensionMismatch { expected: base.coords.len(), found: vec.len() });
        }
        let residual = to_f64(minkowski_dot(&base.coords, &vec));
        let scale = to_f64(base.coords[0]).max(1.0) * to_f64(linalg::norm(&vec)).max(1.0);
        if !(residual.abs() <= T::INVARIANT_TOL * scale) {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base, vec })
    }

    /// Projects an arbitrary ambient vector onto `T_x`.
    pub fn project(base: Point<T>, v: &[T]) -> Self {
        let c = minkowski_dot(&base.coords, v);
        let vec = linalg::axpy(c, &base.coords, v);
        Self { base, vec }
    }

    /// Vector `sum_i c_i f_i` in the standard orthonormal frame at `base`.
    pub fn from_frame_coords(base: Point<T>, c: &[T]) -> Result<Self> {
        if c.len() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: c.len() });
        }
        let frame = base.tangent_frame();
        let mut vec = vec![T::zero(); base.coords.len()];
        for (ci, f) in c.iter().zip(&frame) {
            vec = linalg::axpy(*ci, f, &vec);
        }
        Ok(Self { base, vec })
    }

    /// Coordinates in the standard orthonormal frame at the base point.
    pub fn frame_coords(&self) -> Vec<T> {
        self.base.tangent_frame().iter().map(|f| minkowski_dot(f, &self.vec)).collect()
    }

    pub fn base(&self) -> &Point<T> {
        &self.base
    }

    pub fn vec(&self) -> &[T] {
        &self.vec
    }

    pub fn norm(&self) -> T {
        minkowski_dot(&self.vec, &self.vec).max(T::zero()).sqrt()
    }

    pub fn inner(&self, other: &[T]) -> T {
        minkowski_dot(&self.vec, other)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { base: self.base.clone(), vec: linalg::scaled(s, &self.vec) }
    }

    pub fn unit(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) {
            return Err(Error::NotUnit { norm: to_f64(n) });
        }
        Ok(self.scaled(n.recip()))
    }

    fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if !((n - T::one()).abs() <= lit(T::INVARIANT_TOL)) {
            return Err(Error::NotUnit { norm: to_f64(n) });
        }
        Ok(())
    }
}

/// A point of the visual boundary `dH^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<T>",
    into = "Vec<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct IdealPoint<T> {
    ray: Vec<T>,
}

impl<T: Real> IdealPoint<T> {
    /// Validates a lightlike future ray already normalized by `ray_0 = 1`.
    pub fn new(ray: Vec<T>) -> Result<Self> {
        if ray.len() < 2 {
            return Err(Error::UnsupportedDimension(ray.len().saturating_sub(1)));
        }
        let q = to_f64(minkowski_dot(&ray, &ray));
        let scale = to_f64(ray[0] * ray[0]).max(1.0);
        if !(q.abs() <= T::INVARIANT_TOL * scale) || !(ray[0] > T::zero()) {
            return Err(Error::NotLightlike { residual: q });
        }
        let against_origin = to_f64(-ray[0]);
        if !((against_origin + 1.0).abs() <= T::INVARIANT_TOL) {
            return Err(Error::NotNormalized { value: against_origin });
        }
        Ok(Self { ray })
    }

    /// Rescales a future lightlike ray to the normalization `<ray, o> = -1`.
    pub fn from_ray(ray: Vec<T>) -> Result<Self> {
        if ray.len() < 2 {
            return Err(Error::UnsupportedDimension(ray.len().saturating_sub(1)));
        }
        if !(ray[0] > T::zero()) {
            return Err(Error::NotLightlike { residual: f64::NAN });
        }
        let scaled = linalg::scaled(ray[0].recip(), &ray);
        let q = to_f64(minkowski_dot(&scaled, &scaled));
        if !(q.abs() <= T::INVARIANT_TOL.sqrt()) {
            return Err(Error::NotLightlike { residual: q });
        }
        Ok(Self::from_direction(&scaled[1..]))
    }

    /// Boundary point in the direction of the (nonzero) Euclidean vector `xi`.
    pub fn from_direction(xi: &[T]) -> Self {
        let n = linalg::norm(xi);
        let mut ray = Vec::with_capacity(xi.len() + 1);
        ray.push(T::one());
        ray.extend(xi.iter().map(|&v| v / n));
        Self { ray }
    }

    /// Boundary point of `H^2` at angle `phi`.
    pub fn from_angle(phi: T) -> Self {
        Self { ray: vec![T::one(), phi.cos(), phi.sin()] }
    }

    pub fn ray(&self) -> &[T] {
        &self.ray
    }

    /// Unit direction on the sphere; equals the Klein coordinates.
    pub fn direction(&self) -> Vec<T> {
        self.ray[1..].to_vec()
    }

    pub fn dim(&self) -> usize {
        self.ray.len() - 1
    }
}

impl<T: Real> From<IdealPoint<T>> for Vec<T> {
    fn from(p: IdealPoint<T>) -> Self {
        p.ray
    }
}

impl<T: Real> TryFrom<Vec<T>> for IdealPoint<T> {
    type Error = Error;
    fn try_from(ray: Vec<T>) -> Result<Self> {
        IdealPoint::from_ray(ray)
    }
}

/// Hyperbolic distance.
pub fn distance<T: Real>(x: &Point<T>, y: &Point<T>) -> Result<T> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch { expected: x.coords.len(), found: y.coords.len() });
    }
    Ok(sheet_distance(&x.coords, &y.coords))
}

/// Point at arclength `t` along the geodesic with unit initial velocity `u`.
pub fn geodesic_point<T: Real>(u: &TangentVector<T>, t: T) -> Result<Point<T>> {
    u.check_unit()?;
    let coords = linalg::axpy(t.sinh(), &u.vec, &linalg::scaled(t.cosh(), &u.base.coords));
    Ok(Point::from_raw(coords).renormalized())
}

/// Velocity at arclength `t` of the geodesic with unit initial velocity `u`.
pub fn transport_velocity<T: Real>(u: &TangentVector<T>, t: T) -> Result<TangentVector<T>> {
    let base = geodesic_point(u, t)?;
    let vec = linalg::axpy(t.cosh(), &u.vec, &linalg::scaled(t.sinh(), &u.base.coords));
    Ok(TangentVector::project(base, &vec))
}

/// Riemannian exponential map.
pub fn exp_map<T: Real>(v: &TangentVector<T>) -> Point<T> {
    let r = v.norm();
    if r == T::zero() {
        return v.base.clone();
    }
    let coords = linalg::axpy(r.sinh() / r, &v.vec, &linalg::scaled(r.cosh(), &v.base.coords));
    Point::from_raw(coords).renormalized()
}

/// Riemannian logarithm: the tangent vector at `x` pointing to `y` with
/// length `d(x, y)`.
pub fn log_map<T: Real>(x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
    let d = distance(x, y)?;
    let proj = TangentVector::project(x.clone(), &y.coords);
    let n = proj.norm();
    if n == T::zero() {
        return Ok(proj.scaled(T::zero()));
    }
    Ok(proj.scaled(d / n))
}

/// Endpoint at `+infinity` of the geodesic ray with initial velocity `u`.
pub fn ideal_point_of<T: Real>(u: &TangentVector<T>) -> Result<IdealPoint<T>> {
    u.check_unit()?;
    IdealPoint::from_ray(linalg::add(&u.base.coords, &u.vec))
}

/// Busemann function `B(x, theta) = ln(-<x, theta>)`, normalized to vanish at the origin.
pub fn busemann_value<T: Real>(x: &Point<T>, theta: &IdealPoint<T>) -> Result<T> {
    check_pair(x, theta)?;
    Ok(busemann_raw(&x.coords, &theta.ray))
}

#[inline]
pub(crate) fn busemann_raw<T: Real>(x: &[T], theta: &[T]) -> T {
    (-minkowski_dot(x, theta)).ln()
}

/// Ambient components of the Busemann gradient `x + theta / <x, theta>`.
#[inline]
pub(crate) fn busemann_gradient_raw<T: Real>(x: &[T], theta: &[T]) -> Vec<T> {
    let a = minkowski_dot(x, theta);
    linalg::axpy(a.recip(), theta, x)
}

fn check_pair<T: Real>(x: &Point<T>, theta: &IdealPoint<T>) -> Result<()> {
    if x.coords.len() != theta.ray.len() {
        return Err(Error::DimensionMismatch { expected: x.coords.len(), found: theta.ray.len() });
    }
    let v = to_f64(theta.ray[0]);
    if !((v - 1.0).abs() <= T::INVARIANT_TOL) {
        return Err(Error::NotNormalized { value: -v });
    }
    Ok(())
}

/// Riemannian gradient of `B(., theta)` at `x`; always a unit vector.
pub fn busemann_gradient<T: Real>(x: &Point<T>, theta: &IdealPoint<T>) -> Result<TangentVector<T>> {
    check_pair(x, theta)?;
    Ok(TangentVector { base: x.clone(), vec: busemann_gradient_raw(&x.coords, &theta.ray) })
}

/// Hessian `DdB = g - dB (x) dB` as an `n x n` matrix in the standard
/// orthonormal frame at `x`.
pub fn busemann_hessian<T: Real>(x: &Point<T>, theta: &IdealPoint<T>) -> Result<Mat<T>> {
    let grad = busemann_gradient(x, theta)?;
    let g = grad.frame_coords();
    let n = g.len();
    Ok(Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() } - g[i] * g[j]))
}

/// Evaluates the Busemann Hessian on ambient tangent vectors `v, w` at `x`.
pub fn busemann_hessian_form<T: Real>(x: &Point<T>, theta: &IdealPoint<T>, v: &[T], w: &[T]) -> Result<T> {
    let grad = busemann_gradient(x, theta)?;
    Ok(minkowski_dot(v, w) - grad.inner(v) * grad.inner(w))
}

/// Pure boost taking the origin to the sheet point `x`.
fn boost_matrix<T: Real>(x: &[T]) -> Mat<T> {
    let n1 = x.len();
    let x0 = x[0];
    let denom = T::one() + x0;
    Mat::from_fn(n1, n1, |i, j| match (i, j) {
        (0, 0) => x0,
        (0, j) => x[j],
        (i, 0) => x[i],
        (i, j) => {
            let delta = if i == j { T::one() } else { T::zero() };
            delta + x[i] * x[j] / denom
        }
    })
}

/// An isometry of `H^n`: an element of `O(n,1)` preserving the upper sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry<T> {
    matrix: Mat<T>,
    orientation_sign: i8,
}

impl<T: Real> Isometry<T> {
    /// Validates `G^T J G = J` and `G_00 > 0`.
    pub fn new(matrix: Mat<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let residual = to_f64(lorentz_residual(&matrix));
        let scale = to_f64(matrix.max_abs()).max(1.0);
        if !(residual <= T::LORENTZ_TOL * scale * scale) || !(matrix[(0, 0)] > T::zero()) {
            return Err(Error::NotLorentz { residual });
        }
        Ok(Self::from_raw(matrix))
    }

    pub(crate) fn from_raw(matrix: Mat<T>) -> Self {
        let orientation_sign = if matrix.det() < T::zero() { -1 } else { 1 };
        Self { matrix, orientation_sign }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Mat::identity(n + 1), orientation_sign: 1 }
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.matrix
    }

    pub fn orientation_sign(&self) -> i8 {
        self.orientation_sign
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.mul(&other.matrix),
            orientation_sign: self.orientation_sign * other.orientation_sign,
        }
    }

    /// `G^{-1} = J G^T J`.
    pub fn inverse(&self) -> Self {
        let n1 = self.matrix.rows();
        let m = Mat::from_fn(n1, n1, |i, j| {
            let s = if (i == 0) != (j == 0) { -T::one() } else { T::one() };
            s * self.matrix[(j, i)]
        });
        Self { matrix: m, orientation_sign: self.orientation_sign }
    }

    pub fn apply_point(&self, x: &Point<T>) -> Result<Point<T>> {
        if x.coords.len() != self.matrix.cols() {
            return Err(Error::DimensionMismatch { expected: self.matrix.cols(), found: x.coords.len() });
        }
        Ok(Point::from_raw(self.matrix.mul_vec(&x.coords)).renormalized())
    }

    pub fn apply_ideal(&self, theta: &IdealPoint<T>) -> Result<IdealPoint<T>> {
        if theta.ray.len() != self.matrix.cols() {
            return Err(Error::DimensionMismatch { expected: self.matrix.cols(), found: theta.ray.len() });
        }
        let image = self.matrix.mul_vec(&theta.ray);
        if !(image[0] > T::zero()) {
            return Err(Error::NotLightlike { residual: to_f64(image[0]) });
        }
        Ok(IdealPoint::from_direction(&image[1..]))
    }

    /// Applies the matrix to a raw ambient vector.
    pub fn apply_vec(&self, v: &[T]) -> Vec<T> {
        self.matrix.mul_vec(v)
    }

    /// Residual `max |G^T J G - J|`.
    pub fn lorentz_residual(&self) -> T {
        lorentz_residual(&self.matrix)
    }

    /// Projects the matrix back onto `O(n,1)` by Lorentzian Gram-Schmidt on
    /// its columns (timelike column first).
    pub fn reorthonormalized(&self) -> Self {
        let n1 = self.matrix.rows();
        let mut cols: Vec<Vec<T>> = Vec::with_capacity(n1);
        for j in 0..n1 {
            let mut c = self.matrix.col(j);
            for (k, prev) in cols.iter().enumerate() {
                let sign = if k == 0 { -T::one() } else { T::one() };
                let proj = minkowski_dot(&c, prev) * sign;
                c = linalg::axpy(-proj, prev, &c);
            }
            let q = minkowski_dot(&c, &c).abs().sqrt();
            cols.push(linalg::scaled(q.recip(), &c));
        }
        Self { matrix: Mat::from_cols(&cols), orientation_sign: self.orientation_sign }
    }

    /// Pure translation taking the origin to `x`.
    pub fn translation_to(x: &Point<T>) -> Self {
        Self { matrix: boost_matrix(&x.coords), orientation_sign: 1 }
    }

    /// Isometry sending the origin to `x` and `e_i` to `frame[i]`, where
    /// `frame` is an orthonormal frame of `T_x`.
    pub fn from_frame(x: &Point<T>, frame: &[Vec<T>]) -> Result<Self> {
        if frame.len() != x.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), found: frame.len() });
        }
        let mut cols = vec![x.coords.clone()];
        cols.extend(frame.iter().cloned());
        Self::new(Mat::from_cols(&cols))
    }

    /// `exp(t X)` for `X` in `so(n,1)` (i.e. `X^T J + J X = 0`), by scaling
    /// and squaring of a Taylor series.
    pub fn exp_algebra(generator: &Mat<T>, t: T) -> Self {
        let a = generator.scale(t);
        let norm = a.max_abs() * from_dim::<T>(a.rows());
        let mut squarings = 0;
        let mut s = T::one();
        while norm * s > lit(0.25) {
            s = s * lit(0.5);
            squarings += 1;
        }
        let a = a.scale(s);
        let n = a.rows();
        let mut term = Mat::identity(n);
        let mut sum = Mat::identity(n);
        for k in 1..=18 {
            term = term.mul(&a).scale(from_dim::<T>(k).recip());
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        Self::from_raw(sum).reorthonormalized()
    }
}

fn from_dim<T: Real>(n: usize) -> T {
    crate::scalar::from_usize(n)
}

fn lorentz_residual<T: Real>(m: &Mat<T>) -> T {
    let n1 = m.rows();
    let j = Mat::<T>::minkowski(n1);
    m.transpose().mul(&j).mul(m).max_abs_diff(&j)
}

impl<T: Real + Serialize> Serialize for Isometry<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Isometry<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged, bound = "T: Real + Deserialize<'de>")]
        enum Repr<T> {
            Bare(Mat<T>),
            Tagged { matrix: Mat<T> },
        }
        let m = match Repr::<T>::deserialize(d)? {
            Repr::Bare(m) | Repr::Tagged { matrix: m } => m,
        };
        Isometry::new(m).map_err(serde::de::Error::custom)
    }
}

/// Reflection in the totally geodesic hyperplane `{x : <x, u> = 0}`.
pub fn reflection<T: Real>(u: &[T]) -> Result<Isometry<T>> {
    let q = minkowski_dot(u, u);
    if !((q - T::one()).abs() <= lit(T::INVARIANT_TOL)) {
        return Err(Error::NotSpacelike { value: to_f64(q) });
    }
    let n1 = u.len();
    let ul = lower(u);
    let two = lit::<T>(2.0);
    let m = Mat::from_fn(n1, n1, |i, j| {
        let delta = if i == j { T::one() } else { T::zero() };
        delta - two * u[i] * ul[j]
    });
    Ok(Isometry { matrix: m, orientation_sign: -1 })
}

/// Generator of the unit-speed translation along the geodesic from
/// `repelling` to `attracting`: `X theta_+ = theta_+`, `X theta_- = -theta_-`,
/// zero on their orthogonal complement.
pub fn axis_generator<T: Real>(attracting: &IdealPoint<T>, repelling: &IdealPoint<T>) -> Mat<T> {
    let p = &attracting.ray;
    let m = &repelling.ray;
    let pm = minkowski_dot(p, m);
    let pl = lower(p);
    let ml = lower(m);
    let n1 = p.len();
    Mat::from_fn(n1, n1, |i, j| (p[i] * ml[j] - m[i] * pl[j]) / pm)
}

/// Generator of the rotation of `H^n` by unit angle in the plane spanned
/// by two orthonormal spacelike vectors `a`, `b`.
pub fn rotation_generator<T: Real>(a: &[T], b: &[T]) -> Mat<T> {
    let al = lower(a);
    let bl = lower(b);
    let n1 = a.len();
    Mat::from_fn(n1, n1, |i, j| b[i] * al[j] - a[i] * bl[j])
}

/// Random helpers shared by tests and fixtures.
pub mod sample {
    use rand::Rng;
    use rand_distr::StandardNormal;

    use super::*;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        rng.sample(StandardNormal)
    }

    /// Uniformly distributed unit vector in `R^n`.
    pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return v.iter().map(|a| lit(a / norm)).collect();
            }
        }
    }

    /// Point at distance at most `radius` from the origin (uniform in radius).
    pub fn point<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Point<T> {
        let dir = unit_vector::<T, R>(rng, n);
        let r: f64 = rng.gen_range(0.0..radius);
        let mut coords = vec![lit::<T>(r.cosh())];
        coords.extend(dir.iter().map(|&d| d * lit(r.sinh())));
        Point::from_raw(coords).renormalized()
    }

    pub fn ideal_point<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> IdealPoint<T> {
        IdealPoint::from_direction(&unit_vector::<T, R>(rng, n))
    }

    /// Random orientation-preserving isometry moving the origin at most `radius`.
    pub fn isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Isometry<T> {
        let target = point::<T, R>(rng, n, radius);
        let mut frame: Vec<Vec<T>> = Vec::with_capacity(n);
        let base = target.tangent_frame();
        // random rotation of the standard frame by Gram-Schmidt on a Gaussian matrix
        let raw: Vec<Vec<T>> = (0..n).map(|_| (0..n).map(|_| lit(standard_normal(rng))).collect()).collect();
        let mut q: Vec<Vec<T>> = Vec::with_capacity(n);
        for r in raw {
            let mut v = r;
            for p in &q {
                let c = linalg::dot(&v, p);
                v = linalg::axpy(-c, p, &v);
            }
            let nv = linalg::norm(&v);
            q.push(linalg::scaled(nv.recip(), &v));
        }
        if Mat::from_rows(&q).det() < T::zero() {
            q[0] = linalg::scaled(-T::one(), &q[0]);
        }
        for row in &q {
            let mut v = vec![T::zero(); n + 1];
            for (c, f) in row.iter().zip(&base) {
                v = linalg::axpy(*c, f, &v);
            }
            frame.push(v);
        }
        Isometry::from_frame(&target, &frame).expect("frame is orthonormal")
    }
}
