//! Finite atomic measures on the Furstenberg boundary of a product of real
//! hyperbolic spaces, and their Busemann barycenters.
//!
//! The barycenter of `nu` is the minimizer of
//!
//! ```text
//! F(x) = sum_j w_j Bbar(x, theta_j),   Bbar = (1/sqrt p) sum_i B_i
//! ```
//!
//! computed with the unweighted product metric. `F` splits as a sum of
//! per-factor functionals, but the solver below treats the product jointly
//! so that the splitting can be checked rather than assumed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{busemann_gradient_raw, busemann_raw, exp_map, minkowski_dot, IdealPoint, Point, TangentVector};
use crate::linalg::{self, Mat};
use crate::product::{check_dims, FactorSpec, ProductIdealPoint, ProductIsometry, ProductPoint};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// A weighted boundary atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Atom<T> {
    pub theta: ProductIdealPoint<T>,
    pub w: T,
}

/// Positive combination of Dirac masses on `dH^{n_1} x ... x dH^{n_p}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct AtomicBoundaryMeasure<T> {
    factors: Vec<usize>,
    atoms: Vec<Atom<T>>,
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for AtomicBoundaryMeasure<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "T: Real + Deserialize<'de>")]
        struct Repr<T> {
            factors: Vec<usize>,
            atoms: Vec<Atom<T>>,
        }
        let r = Repr::<T>::deserialize(d)?;
        AtomicBoundaryMeasure::new(r.factors, r.atoms).map_err(serde::de::Error::custom)
    }
}

impl<T: Real> AtomicBoundaryMeasure<T> {
    pub fn new(factors: Vec<usize>, atoms: Vec<Atom<T>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("measure has no atoms".into()));
        }
        for a in &atoms {
            check_dims(&factors, &a.theta.dims())?;
            if !(a.w > T::zero()) || !a.w.is_finite() {
                return Err(Error::InvalidParameter(format!("atom weight {} must be positive", a.w)));
            }
        }
        Ok(Self { factors, atoms })
    }

    /// Single-factor measure from ideal points and weights.
    pub fn single(points: Vec<IdealPoint<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::StructureMismatch("points and weights differ in length".into()));
        }
        let dim = points.first().map(IdealPoint::dim).ok_or_else(|| Error::InvalidParameter("no atoms".into()))?;
        let atoms = points
            .into_iter()
            .zip(weights)
            .map(|(p, w)| Atom { theta: ProductIdealPoint::new(vec![p]), w })
            .collect();
        Self::new(vec![dim], atoms)
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.w)
    }

    /// Rescaled to unit mass.
    pub fn normalized(&self) -> Self {
        self.scaled(self.mass().recip())
    }

    pub fn scaled(&self, lambda: T) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { theta: a.theta.clone(), w: a.w * lambda }).collect();
        Self { factors: self.factors.clone(), atoms }
    }

    /// Fraction of the mass carried by the heaviest class of coincident
    /// atoms in each factor.
    pub fn heaviest_atom_fractions(&self) -> Vec<T> {
        let total = self.mass();
        (0..self.factors.len())
            .map(|i| {
                let tol: T = lit(1e-9);
                // sweep in order of the first spatial coordinate; only clusters whose
                // representative lies within tol in that coordinate can match
                let key = |a: &Atom<T>| a.theta.components()[i].ray()[1];
                let mut order: Vec<&Atom<T>> = self.atoms.iter().collect();
                order.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
                let mut dirs: Vec<(Vec<T>, T)> = Vec::new();
                let mut window_start = 0;
                for a in order {
                    let r = a.theta.components()[i].ray();
                    while window_start < dirs.len() && dirs[window_start].0[1] < r[1] - tol {
                        window_start += 1;
                    }
                    match dirs[window_start..].iter_mut().find(|(d, _)| linalg::norm(&linalg::sub(d, r)) <= tol) {
                        Some((_, w)) => *w = *w + a.w,
                        None => dirs.push((r.to_vec(), a.w)),
                    }
                }
                dirs.iter().fold(T::zero(), |m, (_, w)| m.max(*w)) / total
            })
            .collect()
    }

    /// Every factor marginal keeps each atom class strictly below half the mass.
    pub fn check_admissible(&self) -> Result<()> {
        for (factor, frac) in self.heaviest_atom_fractions().into_iter().enumerate() {
            if !(frac < lit(0.5)) {
                return Err(Error::Inadmissible { factor, fraction: to_f64(frac) });
            }
        }
        Ok(())
    }
}

/// Density `exp(-sum (n_i - 1) B_i(x_i, theta_i))` of the product
/// Patterson-Sullivan measure at `x` against the one at the origin.
pub fn ps_density<T: Real>(x: &ProductPoint<T>, theta: &ProductIdealPoint<T>, factors: &[FactorSpec<T>]) -> Result<T> {
    if let Some(i) = factors.iter().position(|f| !f.is_real_hyperbolic()) {
        return Err(Error::InvalidParameter(format!("factor {i} is parametric; no Patterson-Sullivan density")));
    }
    let dims: Vec<usize> = factors.iter().map(FactorSpec::dim).collect();
    check_dims(&dims, &x.dims())?;
    check_dims(&dims, &theta.dims())?;
    let mut exponent = T::zero();
    for ((p, t), f) in x.components().iter().zip(theta.components()).zip(factors) {
        exponent = exponent - f.entropy() * crate::hyperbolic::busemann_value(p, t)?;
    }
    Ok(exponent.exp())
}

/// Image measure `g_* nu`.
pub fn pushforward<T: Real>(g: &ProductIsometry<T>, nu: &AtomicBoundaryMeasure<T>) -> Result<AtomicBoundaryMeasure<T>> {
    check_dims(&g.dims(), &nu.factors)?;
    let atoms = nu
        .atoms
        .iter()
        .map(|a| Ok(Atom { theta: g.apply_ideal(&a.theta)?, w: a.w }))
        .collect::<Result<Vec<_>>>()?;
    Ok(AtomicBoundaryMeasure { factors: nu.factors.clone(), atoms })
}

/// Projection of `nu` onto factor `i`.
pub fn marginal<T: Real>(nu: &AtomicBoundaryMeasure<T>, i: usize) -> Result<AtomicBoundaryMeasure<T>> {
    if i >= nu.factors.len() {
        return Err(Error::IndexOutOfRange { index: i, len: nu.factors.len() });
    }
    let atoms = nu
        .atoms
        .iter()
        .map(|a| Atom { theta: ProductIdealPoint::new(vec![a.theta.components()[i].clone()]), w: a.w })
        .collect();
    Ok(AtomicBoundaryMeasure { factors: vec![nu.factors[i]], atoms })
}

/// Solver settings for [`barycenter`].
#[derive(Clone, Debug)]
pub struct BarycenterOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    pub initial: Option<ProductPoint<T>>,
}

impl<T: Real> Default for BarycenterOptions<T> {
    fn default() -> Self {
        Self { tol: lit(T::INVARIANT_TOL), max_iter: 500, initial: None }
    }
}

impl<T: Real> BarycenterOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Result of a barycenter solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct BarycenterReport<T> {
    pub point: ProductPoint<T>,
    pub gradient_norm: T,
    pub iterations: usize,
    pub functional_value: T,
}

/// Per-factor value, frame gradient and frame Hessian of `sum w B(x, theta)`.
struct FactorModel<T> {
    value: T,
    grad: Vec<T>,
    hess: Mat<T>,
    frame: Vec<Vec<T>>,
}

fn factor_model<T: Real>(x: &Point<T>, rays: &[&[T]], weights: &[T], with_hessian: bool) -> FactorModel<T> {
    let n = x.dim();
    let frame = x.tangent_frame();
    let mut value = T::zero();
    let mut grad = vec![T::zero(); n];
    let mut hess = Mat::zeros(n, n);
    let mut wsum = T::zero();
    for (ray, &w) in rays.iter().zip(weights) {
        value = value + w * busemann_raw(x.coords(), ray);
        let g_amb = busemann_gradient_raw(x.coords(), ray);
        let g: Vec<T> = frame.iter().map(|f| minkowski_dot(f, &g_amb)).collect();
        for k in 0..n {
            grad[k] = grad[k] + w * g[k];
        }
        if with_hessian {
            for a in 0..n {
                for b in 0..n {
                    hess[(a, b)] = hess[(a, b)] - w * g[a] * g[b];
                }
            }
        }
        wsum = wsum + w;
    }
    if with_hessian {
        for a in 0..n {
            hess[(a, a)] = hess[(a, a)] + wsum;
        }
    }
    FactorModel { value, grad, hess, frame }
}

/// Minimizer of `sum w Bbar(., theta)` over the product, found by Riemannian
/// Newton steps safeguarded by a backtracking gradient method.
pub fn barycenter<T: Real>(nu: &AtomicBoundaryMeasure<T>, opts: &BarycenterOptions<T>) -> Result<BarycenterReport<T>> {
    nu.check_admissible()?;
    let p = nu.factors.len();
    let inv_sqrt_p = from_usize::<T>(p).sqrt().recip();
    let mass = nu.mass();
    let weights: Vec<T> = nu.atoms.iter().map(|a| a.w / mass).collect();
    let rays: Vec<Vec<&[T]>> = (0..p).map(|i| nu.atoms.iter().map(|a| a.theta.components()[i].ray()).collect()).collect();

    let mut x: Vec<Point<T>> = match &opts.initial {
        Some(init) => {
            check_dims(&nu.factors, &init.dims())?;
            init.components().to_vec()
        }
        None => nu.factors.iter().map(|&n| Point::origin(n)).collect(),
    };

    let evaluate = |x: &[Point<T>], hess: bool| -> Vec<FactorModel<T>> {
        x.iter().zip(&rays).map(|(xi, r)| factor_model(xi, r, &weights, hess)).collect()
    };
    let total_value = |m: &[FactorModel<T>]| m.iter().fold(T::zero(), |acc, f| acc + f.value) * inv_sqrt_p;
    let grad_norm = |m: &[FactorModel<T>]| {
        m.iter().fold(T::zero(), |acc, f| acc + linalg::dot(&f.grad, &f.grad)).sqrt() * inv_sqrt_p
    };
    let step_to = |x: &[Point<T>], models: &[FactorModel<T>], dirs: &[Vec<T>], s: T| -> Vec<Point<T>> {
        x.iter()
            .zip(models)
            .zip(dirs)
            .map(|((xi, m), d)| {
                let mut v = vec![T::zero(); xi.coords().len()];
                for (c, f) in d.iter().zip(&m.frame) {
                    v = linalg::axpy(*c * s, f, &v);
                }
                exp_map(&TangentVector::project(xi.clone(), &v))
            })
            .collect()
    };
    // a single step never moves a factor further than this
    let max_step: T = lit(2.0);

    let mut models = evaluate(&x, true);
    let mut value = total_value(&models);
    let mut gnorm = grad_norm(&models);
    let mut iterations = 0;
    let mut polished = false;

    while iterations < opts.max_iter {
        if gnorm <= opts.tol {
            if polished {
                break;
            }
            polished = true;
        }
        iterations += 1;

        // Newton direction per factor; None if some block is not positive definite
        let newton: Option<Vec<Vec<T>>> = models
            .iter()
            .map(|m| {
                let (vals, _) = m.hess.symmetric_eigen();
                if vals[0] <= lit(1e-14) {
                    return None;
                }
                m.hess.solve(&m.grad).map(|s| linalg::scaled(-T::one(), &s))
            })
            .collect();

        let mut accepted = false;
        if let Some(dirs) = newton {
            let longest = dirs.iter().map(|d| linalg::norm(d)).fold(T::zero(), T::max);
            let mut s = if longest > max_step { max_step / longest } else { T::one() };
            let slope = -models.iter().zip(&dirs).fold(T::zero(), |acc, (m, d)| acc + linalg::dot(&m.grad, d)) * inv_sqrt_p;
            for _ in 0..40 {
                let cand = step_to(&x, &models, &dirs, s);
                let cm = evaluate(&cand, true);
                let cv = total_value(&cm);
                let cg = grad_norm(&cm);
                let armijo = cv <= value - lit::<T>(1e-4) * s * slope;
                if armijo || (s == T::one() && cg < gnorm) {
                    x = cand;
                    models = cm;
                    value = cv;
                    gnorm = cg;
                    accepted = true;
                    break;
                }
                s = s * lit(0.5);
            }
        }
        if !accepted {
            // steepest descent with backtracking
            let dirs: Vec<Vec<T>> = models.iter().map(|m| linalg::scaled(-inv_sqrt_p, &m.grad)).collect();
            let longest = dirs.iter().map(|d| linalg::norm(d)).fold(T::zero(), T::max);
            let mut s = if longest > max_step { max_step / longest } else { T::one() };
            let sq = gnorm * gnorm;
            for _ in 0..60 {
                let cand = step_to(&x, &models, &dirs, s);
                let cm = evaluate(&cand, true);
                let cv = total_value(&cm);
                if cv <= value - lit::<T>(1e-4) * s * sq {
                    x = cand;
                    models = cm;
                    value = cv;
                    gnorm = grad_norm(&models);
                    accepted = true;
                    break;
                }
                s = s * lit(0.5);
            }
        }
        if !accepted {
            // no decrease is measurable any more
            break;
        }
    }

    if !(gnorm <= opts.tol) {
        return Err(Error::NoConvergence { iterations, gradient_norm: to_f64(gnorm) });
    }
    Ok(BarycenterReport { point: ProductPoint::new(x), gradient_norm: gnorm, iterations, functional_value: value })
}

/// Norm of the gradient of the (unit-mass) barycenter functional at `x`,
/// evaluated directly from the atoms.
pub fn barycenter_gradient_norm<T: Real>(nu: &AtomicBoundaryMeasure<T>, x: &ProductPoint<T>) -> Result<T> {
    check_dims(&nu.factors, &x.dims())?;
    let p = nu.factors.len();
    let mass = nu.mass();
    let mut acc = T::zero();
    for (i, xi) in x.components().iter().enumerate() {
        let mut g = vec![T::zero(); xi.coords().len()];
        for a in &nu.atoms {
            let gi = busemann_gradient_raw(xi.coords(), a.theta.components()[i].ray());
            g = linalg::axpy(a.w / mass, &gi, &g);
        }
        acc = acc + minkowski_dot(&g, &g);
    }
    Ok((acc / from_usize::<T>(p)).max(T::zero()).sqrt())
}

/// Value of the unit-mass barycenter functional at `x`.
pub fn barycenter_functional<T: Real>(nu: &AtomicBoundaryMeasure<T>, x: &ProductPoint<T>) -> Result<T> {
    check_dims(&nu.factors, &x.dims())?;
    let p: T = from_usize(nu.factors.len());
    let mass = nu.mass();
    let mut acc = T::zero();
    for a in &nu.atoms {
        for (xi, t) in x.components().iter().zip(a.theta.components()) {
            acc = acc + a.w / mass * busemann_raw(xi.coords(), t.ray());
        }
    }
    Ok(acc / p.sqrt())
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::hyperbolic::{busemann_value, distance, sample};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_measure(r: &mut ChaCha8Rng, dims: &[usize], atoms: usize) -> AtomicBoundaryMeasure<f64> {
        let atoms = (0..atoms)
            .map(|_| Atom {
                theta: ProductIdealPoint::new(dims.iter().map(|&n| sample::ideal_point(r, n)).collect()),
                w: r.gen_range(0.2..1.0),
            })
            .collect();
        AtomicBoundaryMeasure::new(dims.to_vec(), atoms).unwrap()
    }

    fn h2(angles: &[f64]) -> AtomicBoundaryMeasure<f64> {
        AtomicBoundaryMeasure::single(
            angles.iter().map(|&a| IdealPoint::from_angle(a)).collect(),
            vec![1.0; angles.len()],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_triple_has_origin_barycenter() {
        let tau = std::f64::consts::TAU;
        let nu = h2(&[0.0, tau / 3.0, 2.0 * tau / 3.0]);
        let rep = barycenter(&nu, &BarycenterOptions::default()).unwrap();
        assert!(distance(&rep.point.components()[0], &Point::origin(2)).unwrap() < 1e-12);
    }

    #[test]
    fn stationarity_is_rechecked_independently() {
        let mut r = rng(1);
        let nu = random_measure(&mut r, &[2, 3], 9);
        let rep = barycenter(&nu, &BarycenterOptions::default()).unwrap();
        assert!(rep.gradient_norm <= 1e-10);
        assert!(barycenter_gradient_norm(&nu, &rep.point).unwrap() <= 1e-10);
        let f = barycenter_functional(&nu, &rep.point).unwrap();
        assert!((f - rep.functional_value).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_measure_is_rejected() {
        let nu = AtomicBoundaryMeasure::single(
            vec![IdealPoint::from_angle(0.0), IdealPoint::from_angle(0.0), IdealPoint::from_angle(2.0)],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        match barycenter(&nu, &BarycenterOptions::default()) {
            Err(Error::Inadmissible { factor: 0, fraction }) => assert!((fraction - 2.0 / 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let mut r = rng(2);
        let nu = random_measure(&mut r, &[3], 6);
        let init = ProductPoint::new(vec![sample::point(&mut r, 3, 6.0)]);
        let opts = BarycenterOptions { tol: 1e-10, max_iter: 1, initial: Some(init) };
        assert!(matches!(barycenter(&nu, &opts), Err(Error::NoConvergence { .. })));
    }

    /// Dense-grid minimization in polar coordinates about the origin of H^2,
    /// refined around the best cell until the cell size is below 1e-6.
    fn grid_minimizer(nu: &AtomicBoundaryMeasure<f64>) -> Point<f64> {
        let f = |u: [f64; 2]| {
            let p = Point::from_klein(&u).unwrap();
            nu.atoms().iter().map(|a| a.w * busemann_value(&p, &a.theta.components()[0]).unwrap()).sum::<f64>()
        };
        let (mut cx, mut cy, mut h) = (0.0, 0.0, 0.95 / 40.0);
        while h > 1e-7 {
            let mut best = (f64::INFINITY, cx, cy);
            for i in -40..=40 {
                for j in -40..=40 {
                    let (x, y) = (cx + i as f64 * h, cy + j as f64 * h);
                    if x * x + y * y < 0.999 {
                        let v = f([x, y]);
                        if v < best.0 {
                            best = (v, x, y);
                        }
                    }
                }
            }
            cx = best.1;
            cy = best.2;
            h /= 10.0;
        }
        Point::from_klein(&[cx, cy]).unwrap()
    }

    #[test]
    fn matches_grid_search_in_the_plane() {
        let mut r = rng(3);
        for _ in 0..5 {
            let nu = random_measure(&mut r, &[2], 5);
            if nu.check_admissible().is_err() {
                continue;
            }
            let rep = barycenter(&nu, &BarycenterOptions::default()).unwrap();
            let g = grid_minimizer(&nu);
            assert!(distance(&rep.point.components()[0], &g).unwrap() < 1e-5);
        }
    }

    #[test]
    fn weights_scale_invariance() {
        let mut r = rng(4);
        let nu = random_measure(&mut r, &[3, 2], 7);
        let a = barycenter(&nu, &BarycenterOptions::default()).unwrap();
        let b = barycenter(&nu.scaled(37.5), &BarycenterOptions::default()).unwrap();
        for (x, y) in a.point.components().iter().zip(b.point.components()) {
            assert!(distance(x, y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ps_density_cocycle() {
        let mut r = rng(5);
        let factors = vec![FactorSpec::real_hyperbolic(2).unwrap(), FactorSpec::real_hyperbolic(3).unwrap()];
        let theta = ProductIdealPoint::new(vec![sample::ideal_point(&mut r, 2), sample::ideal_point(&mut r, 3)]);
        let o = ProductPoint::origin(&[2, 3]);
        assert_eq!(ps_density(&o, &theta, &factors).unwrap(), 1.0);
        let x = ProductPoint::new(vec![sample::point(&mut r, 2, 1.0), sample::point(&mut r, 3, 1.0)]);
        let y = ProductPoint::new(vec![sample::point(&mut r, 2, 1.0), sample::point(&mut r, 3, 1.0)]);
        let b = |p: &ProductPoint<f64>| {
            busemann_value(&p.components()[0], &theta.components()[0]).unwrap()
                + 2.0 * busemann_value(&p.components()[1], &theta.components()[1]).unwrap()
        };
        let ratio = ps_density(&x, &theta, &factors).unwrap() / ps_density(&y, &theta, &factors).unwrap();
        assert!((ratio - (-(b(&x) - b(&y))).exp()).abs() < 1e-10 * ratio.max(1.0));
        let single = vec![factors[1].clone()];
        let xs = ProductPoint::new(vec![x.components()[1].clone()]);
        let ts = ProductIdealPoint::new(vec![theta.components()[1].clone()]);
        let bs = busemann_value(&xs.components()[0], &ts.components()[0]).unwrap();
        assert!((ps_density(&xs, &ts, &single).unwrap() - (-2.0 * bs).exp()).abs() < 1e-12);
    }

    #[test]
    fn ps_density_rejects_parametric() {
        let f = vec![FactorSpec::parametric(4, 4.0).unwrap()];
        let x = ProductPoint::<f64>::origin(&[4]);
        let t = ProductIdealPoint::new(vec![IdealPoint::from_direction(&[1.0, 0.0, 0.0, 0.0])]);
        assert!(ps_density(&x, &t, &f).is_err());
    }

    #[test]
    fn marginals_and_pushforward_commute() {
        let mut r = rng(6);
        let nu = random_measure(&mut r, &[2, 3], 4);
        let g = ProductIsometry::new(vec![sample::isometry(&mut r, 2, 1.0), sample::isometry(&mut r, 3, 1.0)]);
        let pushed = pushforward(&g, &nu).unwrap();
        assert_eq!(pushed.mass(), nu.mass());
        for i in 0..2 {
            let m = marginal(&nu, i).unwrap();
            assert_eq!(m.mass(), nu.mass());
            let gi = ProductIsometry::new(vec![g.components()[i].clone()]);
            assert_eq!(marginal(&pushed, i).unwrap(), pushforward(&gi, &m).unwrap());
        }
        assert!(matches!(marginal(&nu, 2), Err(Error::IndexOutOfRange { .. })));
        let id = ProductIsometry::identity(&[2, 3]);
        let same = pushforward(&id, &nu).unwrap();
        for (a, b) in same.atoms().iter().zip(nu.atoms()) {
            for (x, y) in a.theta.components().iter().zip(b.theta.components()) {
                assert!(linalg::norm(&linalg::sub(x.ray(), y.ray())) < 1e-15);
            }
        }
        let single = marginal(&marginal(&nu, 1).unwrap(), 0).unwrap();
        assert_eq!(single, marginal(&nu, 1).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let mut r = rng(7);
        let nu = random_measure(&mut r, &[2, 2], 3);
        let s = serde_json::to_string(&nu).unwrap();
        assert!(s.contains("\"factors\"") && s.contains("\"theta\""));
        let back: AtomicBoundaryMeasure<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, nu);
    }
}
