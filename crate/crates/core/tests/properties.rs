//! Property tests for geometric invariants. Geometry is drawn from a seeded
//! generator so that shrinking acts on the seed and the scalar parameters.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use repvol_core::fixtures;
use repvol_core::group::{Letter, Word};
use repvol_core::hyperbolic::{busemann_value, distance, minkowski_dot, sample, IdealPoint, Isometry, Point};
use repvol_core::measure::{barycenter, pushforward, Atom, AtomicBoundaryMeasure, BarycenterOptions};
use repvol_core::product::{
    entropy_weighted, optimal_scaling, product_busemann, FactorSpec, ProductIdealPoint, ProductIsometry, ProductPoint, WeightedMetric,
};
use repvol_core::rep_volume::{random_positions, rep_volume};
use repvol_core::simplex::{dihedral_angle, signed_volume, simplex_volume, GeodesicSimplex, Vertex};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_points(r: &mut ChaCha8Rng, n: usize, k: usize, radius: f64) -> Vec<Point<f64>> {
    (0..k).map(|_| sample::point(r, n, radius)).collect()
}

/// Hyperbolic L'Huilier: `tan^2(A/4) = tanh(s/2) tanh((s-a)/2) tanh((s-b)/2) tanh((s-c)/2)`.
fn lhuilier_area(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    let t = (0.5 * s).tanh() * (0.5 * (s - a)).tanh() * (0.5 * (s - b)).tanh() * (0.5 * (s - c)).tanh();
    4.0 * t.max(0.0).sqrt().atan()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn isometries_preserve_distance(seed in any::<u64>(), n in 2usize..=4, radius in 0.1f64..5.0) {
        let mut r = rng(seed);
        let g: Isometry<f64> = sample::isometry(&mut r, n, radius);
        let x = sample::point(&mut r, n, 3.0);
        let y = sample::point(&mut r, n, 3.0);
        let d0 = distance(&x, &y).unwrap();
        let d1 = distance(&g.apply_point(&x).unwrap(), &g.apply_point(&y).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0), "{d0} vs {d1}");
    }

    #[test]
    fn lorentz_group_is_closed(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a: Isometry<f64> = sample::isometry(&mut r, n, 2.0);
        let b: Isometry<f64> = sample::isometry(&mut r, n, 2.0);
        let ab = a.compose(&b);
        prop_assert!(ab.lorentz_residual() <= 1e-9);
        prop_assert_eq!(ab.orientation_sign(), 1);
        let e = ab.compose(&ab.inverse());
        let id = Isometry::<f64>::identity(n);
        for i in 0..=n {
            for j in 0..=n {
                prop_assert!((e.matrix()[(i, j)] - id.matrix()[(i, j)]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn busemann_differences_are_equivariant_and_lipschitz(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let g: Isometry<f64> = sample::isometry(&mut r, n, 2.0);
        let theta: IdealPoint<f64> = sample::ideal_point(&mut r, n);
        let x = sample::point(&mut r, n, 2.5);
        let y = sample::point(&mut r, n, 2.5);
        let before = busemann_value(&x, &theta).unwrap() - busemann_value(&y, &theta).unwrap();
        let gt = g.apply_ideal(&theta).unwrap();
        let after = busemann_value(&g.apply_point(&x).unwrap(), &gt).unwrap() - busemann_value(&g.apply_point(&y).unwrap(), &gt).unwrap();
        prop_assert!((before - after).abs() <= 1e-9, "{before} vs {after}");
        prop_assert!(before.abs() <= distance(&x, &y).unwrap() + 1e-12);
    }

    #[test]
    fn busemann_along_ray_decreases_at_unit_rate(seed in any::<u64>(), n in 2usize..=3, t in 0.0f64..6.0) {
        let mut r = rng(seed);
        let theta: IdealPoint<f64> = sample::ideal_point(&mut r, n);
        // point at distance t from the origin towards theta
        let mut c = vec![t.cosh()];
        c.extend(theta.direction().iter().map(|d| d * t.sinh()));
        let x = Point::new(c).unwrap();
        prop_assert!((busemann_value(&x, &theta).unwrap() + t).abs() <= 1e-10);
    }

    #[test]
    fn product_busemann_with_unit_weights(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = [2usize, 3];
        let x = ProductPoint::<f64>::new(dims.iter().map(|&n| sample::point(&mut r, n, 3.0)).collect());
        let theta = ProductIdealPoint::new(dims.iter().map(|&n| sample::ideal_point(&mut r, n)).collect());
        let metric = WeightedMetric::real(&dims).unwrap();
        let lib = product_busemann(&x, &theta, &metric).unwrap();
        let sum: f64 = x.components().iter().zip(theta.components()).map(|(p, t)| (-minkowski_dot(p.coords(), t.ray())).ln()).sum();
        prop_assert!((lib - sum / 2f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn entropy_is_euclidean_norm_of_factor_entropies(dims in proptest::collection::vec(2usize..=7, 1..=4)) {
        let metric = WeightedMetric::<f64>::real(&dims).unwrap();
        let direct = dims.iter().map(|&n| ((n - 1) as f64).powi(2)).sum::<f64>().sqrt();
        prop_assert!((entropy_weighted(&metric) - direct).abs() <= 1e-12);
    }

    #[test]
    fn optimal_scaling_has_unit_volume_and_beats_unweighted(dims in proptest::collection::vec(2usize..=7, 1..=4)) {
        let factors: Vec<FactorSpec<f64>> = dims.iter().map(|&n| FactorSpec::real_hyperbolic(n).unwrap()).collect();
        let best = optimal_scaling(&factors).unwrap();
        let log_vol: f64 = best.a.iter().zip(&dims).map(|(a, &n)| n as f64 * a.ln()).sum();
        prop_assert!(log_vol.abs() <= 1e-12);
        let unweighted = entropy_weighted(&WeightedMetric::unweighted(factors).unwrap());
        prop_assert!(best.entropy_min <= unweighted + 1e-12);
    }

    #[test]
    fn barycenter_ignores_total_mass(seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let mut r = rng(seed);
        let atoms = (0..6)
            .map(|_| Atom { theta: ProductIdealPoint::new(vec![sample::ideal_point(&mut r, 2)]), w: r.gen_range(0.1..1.0) })
            .collect();
        let nu = AtomicBoundaryMeasure::new(vec![2], atoms).unwrap();
        let opts = BarycenterOptions::with_tol(1e-10);
        let a = barycenter(&nu, &opts).unwrap().point;
        let b = barycenter(&nu.scaled(lambda), &opts).unwrap().point;
        prop_assert!(distance(&a.components()[0], &b.components()[0]).unwrap() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn barycenter_commutes_with_isometries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = [2usize, 3];
        let atoms = (0..7)
            .map(|_| Atom {
                theta: ProductIdealPoint::new(dims.iter().map(|&n| sample::ideal_point(&mut r, n)).collect()),
                w: r.gen_range(0.1..1.0),
            })
            .collect();
        let nu = AtomicBoundaryMeasure::new(dims.to_vec(), atoms).unwrap();
        let g = ProductIsometry::new(dims.iter().map(|&n| sample::isometry(&mut r, n, 2.0)).collect());
        let opts = BarycenterOptions::with_tol(1e-10);
        let moved = barycenter(&pushforward(&g, &nu).unwrap(), &opts).unwrap().point;
        let image = g.apply_point(&barycenter(&nu, &opts).unwrap().point).unwrap();
        for (a, b) in moved.components().iter().zip(image.components()) {
            prop_assert!(distance(a, b).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn simplex_volume_is_isometry_invariant(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let s = GeodesicSimplex::from_points(random_points(&mut r, n, n + 1, 2.5)).unwrap();
        let g: Isometry<f64> = sample::isometry(&mut r, n, 2.0);
        let v0 = signed_volume(&s).unwrap();
        let v1 = signed_volume(&s.apply(&g).unwrap()).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-9 * (1.0 + v0.abs()), "{v0} vs {v1}");
        prop_assert!((signed_volume(&s.swapped(0, 1)).unwrap() + v0).abs() <= 1e-12);
    }

    #[test]
    fn volumes_stay_below_ideal_maxima(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let s = GeodesicSimplex::from_points(random_points(&mut r, n, n + 1, 6.0)).unwrap();
        let cap = if n == 2 { PI } else { 1.0149416064096537 };
        prop_assert!(simplex_volume(&s).unwrap() <= cap + 1e-9);
    }

    #[test]
    fn coning_from_an_interior_point_is_additive(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let pts = random_points(&mut r, n, n + 1, 2.0);
        let whole = GeodesicSimplex::from_points(pts.clone()).unwrap();
        // interior point from positive Klein barycentric weights
        let w: Vec<f64> = (0..=n).map(|_| r.gen_range(0.2..1.0)).collect();
        let total: f64 = w.iter().sum();
        let klein: Vec<f64> = (0..n).map(|a| pts.iter().zip(&w).map(|(p, wi)| wi * p.klein()[a]).sum::<f64>() / total).collect();
        let c = Point::from_klein(&klein).unwrap();
        let parts: f64 = (0..=n)
            .map(|k| {
                let mut sub = pts.clone();
                sub[k] = c.clone();
                simplex_volume(&GeodesicSimplex::from_points(sub).unwrap()).unwrap()
            })
            .sum();
        let v = simplex_volume(&whole).unwrap();
        prop_assert!((parts - v).abs() <= 1e-7, "{parts} vs {v}");
    }

    #[test]
    fn triangle_area_matches_side_length_formula(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_points(&mut r, 2, 3, 3.0);
        let s = GeodesicSimplex::from_points(p.clone()).unwrap();
        let d = |i: usize, j: usize| distance(&p[i], &p[j]).unwrap();
        let oracle = lhuilier_area(d(0, 1), d(1, 2), d(0, 2));
        let angles: f64 = [(1, 2), (0, 2), (0, 1)].iter().map(|&f| dihedral_angle(&s, f).unwrap()).sum();
        prop_assert!((simplex_volume(&s).unwrap() - oracle).abs() <= 1e-8);
        prop_assert!((PI - angles - oracle).abs() <= 1e-8);
    }

    #[test]
    fn ideal_triangles_have_area_pi(a in 0.0f64..6.28, b in 0.05f64..3.0, c in 0.05f64..3.0) {
        prop_assume!(b + c < 6.2);
        let s = GeodesicSimplex::new(vec![
            Vertex::Ideal(IdealPoint::from_angle(a)),
            Vertex::Ideal(IdealPoint::from_angle(a + b)),
            Vertex::Ideal(IdealPoint::from_angle(a + b + c)),
        ])
        .unwrap();
        prop_assert!((simplex_volume(&s).unwrap() - PI).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn genus2_volume_ignores_positions_and_conjugation(seed in any::<u64>(), spread in 0.01f64..0.4) {
        let t = fixtures::genus2_triangulation().unwrap();
        let rho = fixtures::genus2_fuchsian();
        let g: Isometry<f64> = sample::isometry(&mut rng(seed), 2, 2.0);
        let conj = rho.conjugated(&g);
        let v = rep_volume(&t, &conj, &random_positions(&t, &conj, seed, spread).unwrap()).unwrap();
        prop_assert!((v - 4.0 * PI).abs() <= 1e-8, "{v}");
    }

    #[test]
    fn words_times_inverse_evaluate_to_identity(letters in proptest::collection::vec((0usize..4, any::<bool>()), 0..12)) {
        let rho = fixtures::genus2_fuchsian();
        let w = Word::new(letters.into_iter().map(|(generator, inverse)| Letter { generator, inverse }).collect());
        prop_assert!(w.concat(&w.inverse()).is_empty());
        // internal cancellations like a a^-1 inflate intermediate products
        let w = w.reduced();
        // inverses are J A^T J, exact only up to the generators' Lorentz residual,
        // which is amplified by the square of the largest partial product
        let mut size: f64 = 1.0;
        let mut partial = rho.identity_element();
        for &l in w.letters() {
            partial = partial.compose(&rho.letter_image(l));
            size = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| partial.matrix()[(i, j)].abs()).fold(size, f64::max);
        }
        let e = rho.evaluate(&w).compose(&rho.evaluate(&w.inverse()));
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((e.matrix()[(i, j)] - target).abs() <= 1e-11 * size * size);
            }
        }
    }
}
