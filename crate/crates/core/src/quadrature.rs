//! One-dimensional quadrature rules.

use crate::scalar::{from_usize, lit, Real};

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad<T> {
    pub value: T,
    pub error: T,
    pub converged: bool,
}

/// Tanh-sinh (double exponential) quadrature of `f` over `[a, b]`.
///
/// The integrand receives `(x, |x - a|, |b - x|)` with both endpoint
/// distances computed without cancellation, so integrands with endpoint logarithmic
/// singularities can be evaluated in an offset form. Levels are refined by
/// halving the step until two successive estimates agree to `tol`
/// (relative), or `max_level` is reached.
pub fn tanh_sinh<T: Real, F: Fn(T, T, T) -> T>(f: F, a: T, b: T, tol: T, max_level: usize) -> Quad<T> {
    if b < a {
        let q = tanh_sinh_forward(&|x, to_b, to_a| f(x, to_a, to_b), b, a, tol, max_level);
        return Quad { value: -q.value, ..q };
    }
    tanh_sinh_forward(&f, a, b, tol, max_level)
}

fn tanh_sinh_forward<T: Real>(f: &dyn Fn(T, T, T) -> T, a: T, b: T, tol: T, max_level: usize) -> Quad<T> {
    if a == b {
        return Quad { value: T::zero(), error: T::zero(), converged: true };
    }
    let half = (b - a) * lit(0.5);
    let pi_2 = T::FRAC_PI_2();
    let t_max: T = lit(4.0);
    let tiny = T::min_positive_value();

    // contribution of the node at parameter t (both signs handled by caller)
    let node = |t: T| -> T {
        let u = pi_2 * t.sinh();
        let e = (lit::<T>(2.0) * u).exp();
        // distances to a and b scaled by the interval length
        let to_b = (b - a) / (T::one() + e);
        let to_a = (b - a) / (T::one() + e.recip());
        if !(to_a > tiny) || !(to_b > tiny) {
            return T::zero();
        }
        let c = u.cosh();
        let w = half * pi_2 * t.cosh() / (c * c);
        if !(w > T::zero()) || !w.is_finite() {
            return T::zero();
        }
        let x = if to_a < to_b { a + to_a } else { b - to_b };
        let v = f(x, to_a, to_b);
        if v.is_finite() {
            w * v
        } else {
            T::zero()
        }
    };

    let mut h = T::one();
    // level 0: nodes at integers
    let mut sum = node(T::zero());
    let mut k = 1usize;
    loop {
        let t = from_usize::<T>(k);
        if t > t_max {
            break;
        }
        sum = sum + node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = estimate.abs();
    for _level in 1..=max_level {
        h = h * lit(0.5);
        // new nodes are the odd multiples of h
        let mut j = 1usize;
        loop {
            let t = from_usize::<T>(j) * h;
            if t > t_max {
                break;
            }
            sum = sum + node(t) + node(-t);
            j += 2;
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= tol * estimate.abs().max(tiny) {
            return Quad { value: estimate, error, converged: true };
        }
    }
    Quad { value: estimate, error, converged: false }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nt: T = from_usize(n);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nt + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != T::zero() {
            dp = d;
        }
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kt: T = from_usize(k);
        let p2 = ((lit::<T>(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let nt: T = from_usize(n);
    let d = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}
