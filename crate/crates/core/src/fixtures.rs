//! Bundled groups, representations and triangulations with known answers.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, PI, TAU};

use crate::error::Result;
use crate::group::{Presentation, Representation, Word};
use crate::hyperbolic::{axis_generator, IdealPoint, Isometry, Point};
use crate::linalg::Mat;
use crate::natural_map::NaturalMapConfig;
use crate::product::ProductPoint;
use crate::rep_volume::{
    axis_reflection, bending_path, flip_representation, BaseVertex, DeformationPath, EquivariantTriangulation, LabelledSimplex,
    LabelledVertex,
};

/// Rotation of `H^2` about the origin by `phi`.
pub fn rotation(phi: f64) -> Isometry<f64> {
    let (s, c) = phi.sin_cos();
    Isometry::new(Mat::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c, -s], vec![0.0, s, c]])).expect("rotation is Lorentzian")
}

/// Translation of `H^2` by `d` along the first axis.
pub fn boost_x(d: f64) -> Isometry<f64> {
    let (ch, sh) = (d.cosh(), d.sinh());
    Isometry::new(Mat::from_rows(&[vec![ch, sh, 0.0], vec![sh, ch, 0.0], vec![0.0, 0.0, 1.0]])).expect("boost is Lorentzian")
}

/// Point of `H^2` at distance `r` from the origin in direction `phi`.
pub fn polar_point(r: f64, phi: f64) -> Point<f64> {
    rotation(phi).apply_point(&boost_x(r).apply_point(&Point::origin(2)).expect("dims")).expect("dims")
}

/// Rotation by `angle` about the point `polar_point(dist, dir)`.
fn rotation_about(dir: f64, dist: f64, angle: f64) -> Isometry<f64> {
    let t = rotation(dir).compose(&boost_x(dist));
    t.compose(&rotation(angle)).compose(&t.inverse())
}

/// Inradius of the regular octagon with interior angles `pi/4`.
pub fn octagon_inradius() -> f64 {
    (1.0 + 2f64.sqrt()).acosh()
}

/// Circumradius of the same octagon.
pub fn octagon_circumradius() -> f64 {
    (3.0 + 2.0 * 2f64.sqrt()).acosh()
}

/// Vertex `k` of the octagon; side `k` (midpoint direction `k pi/4`) joins
/// vertices `k-1` and `k`.
pub fn octagon_vertex(k: usize) -> Point<f64> {
    polar_point(octagon_circumradius(), (k % 8) as f64 * FRAC_PI_4 + FRAC_PI_8)
}

/// Orientation-preserving isometry carrying side `j` onto side `k`, with the
/// octagon landing on the far side of side `k`.
fn side_pairing(j: usize, k: usize) -> Isometry<f64> {
    let (pj, pk) = (j as f64 * FRAC_PI_4, k as f64 * FRAC_PI_4);
    rotation(pk).compose(&boost_x(2.0 * octagon_inradius())).compose(&rotation(-pk)).compose(&rotation(pk + PI - pj))
}

pub fn genus2_presentation() -> Presentation {
    Presentation::parse(
        ["a1", "b1", "a2", "b2"].iter().map(|s| s.to_string()).collect(),
        &["a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1".to_string()],
    )
    .expect("valid presentation")
}

/// Holonomy of the hyperbolic genus-2 surface glued from the regular
/// octagon: `a1, b1, a2, b2` pair sides `2->0, 1->3, 6->4, 5->7`.
pub fn genus2_fuchsian() -> Representation {
    let images = vec![side_pairing(2, 0), side_pairing(1, 3), side_pairing(6, 4), side_pairing(5, 7)];
    Representation::checked(genus2_presentation(), images).expect("octagon pairings satisfy the surface relator")
}

/// Words `w_k` with `rho(w_k) V_0 = V_k`.
pub const OCTAGON_VERTEX_WORDS: [&str; 8] =
    ["1", "a1^-1", "b1 a1^-1", "b1", "a2 b2^-1 a2^-1 b1", "b2^-1 a2^-1 b1", "a2^-1 b1", "a1 b1 a1^-1"];

/// The octagon coned from its centre: triangle `k` is `(O, V_k, V_{k+1})`,
/// with base vertices `O` (index 0) and `V_0` (index 1).
pub fn genus2_triangulation() -> Result<EquivariantTriangulation> {
    let rho = genus2_fuchsian();
    let pres = rho.presentation();
    let words = OCTAGON_VERTEX_WORDS.iter().map(|w| pres.parse_word(w)).collect::<Result<Vec<_>>>()?;
    let vertices = vec![
        BaseVertex { name: "O".into(), position: Point::origin(2) },
        BaseVertex { name: "V".into(), position: octagon_vertex(0) },
    ];
    let simplices = (0..8)
        .map(|k| LabelledSimplex {
            vertices: vec![
                LabelledVertex::new(0, Word::identity()),
                LabelledVertex::new(1, words[k].clone()),
                LabelledVertex::new(1, words[(k + 1) % 8].clone()),
            ],
            orientation: 1,
        })
        .collect();
    EquivariantTriangulation::with_derived_pairings(2, vertices, simplices, &rho)
}

/// `[a1, b1]`, the curve separating the two one-holed tori.
pub fn genus2_separating_word() -> Word {
    Word::commutator(&Word::generator(0), &Word::generator(1))
}

/// Flip of the Fuchsian representation across the separating curve: `a2, b2`
/// are conjugated by the reflection in the axis of `rho([a1, b1])`.
pub fn genus2_flip() -> Result<(Representation, Isometry<f64>)> {
    let rho = genus2_fuchsian();
    let c = genus2_separating_word();
    let s = axis_reflection(&rho.evaluate(&c))?;
    Ok((flip_representation(&rho, &[2, 3], &[c], &s)?, s))
}

/// Bending of the Fuchsian representation along `[a1, b1]`, moving `a2, b2`.
pub fn genus2_bending_path() -> Result<DeformationPath> {
    bending_path(&genus2_fuchsian(), &genus2_separating_word(), &[2, 3])
}

/// The ideal point `(1, 0, 1)` fixed by [`parabolic_representation`].
pub fn parabolic_fixed_point() -> IdealPoint<f64> {
    IdealPoint::from_angle(FRAC_PI_2)
}

/// Genus-2 representation with `a1, b2 -> A` and `b1, a2 -> B`, where `A` is
/// hyperbolic and `B` parabolic, both fixing [`parabolic_fixed_point`]. The
/// surface relator holds identically; `s` moves `A` and `B`.
pub fn parabolic_representation(s: f64) -> Result<Representation> {
    let inf = parabolic_fixed_point();
    let a = Isometry::exp_algebra(&axis_generator(&inf, &IdealPoint::from_angle(-FRAC_PI_2 + 0.5 * s)), 0.8 + 0.3 * s);
    // nilpotent N v = <e1, v> inf - <inf, v> e1, so exp(uN) = I + uN + u^2 N^2 / 2
    let theta = inf.ray();
    let e1 = [0.0, 1.0, 0.0];
    let theta_low = [-theta[0], theta[1], theta[2]];
    let n = Mat::from_fn(3, 3, |i, j| theta[i] * e1[j] - e1[i] * theta_low[j]);
    let u = 0.7 + 0.4 * s;
    let b = Isometry::new(Mat::identity(3).add(&n.scale(u)).add(&n.mul(&n).scale(0.5 * u * u)))?;
    Representation::checked(genus2_presentation(), vec![a.clone(), b.clone(), b, a])
}

/// The path `s -> parabolic_representation(s)`.
pub fn parabolic_path() -> Result<DeformationPath> {
    Ok(DeformationPath::custom(parabolic_representation(0.0)?, parabolic_representation))
}

/// Angles `(P, Q, R)` of the `(2, 3, 7)` triangle.
const ANGLES_237: (f64, f64, f64) = (FRAC_PI_2, FRAC_PI_3, PI / 7.0);

fn side_lengths_237() -> (f64, f64) {
    let (p, q, r) = ANGLES_237;
    let rq = ((r.cos() * q.cos() + p.cos()) / (r.sin() * q.sin())).acosh();
    let rp = ((r.cos() * p.cos() + q.cos()) / (r.sin() * p.sin())).acosh();
    (rq, rp)
}

/// The vertex `Q` (angle `pi/3`) of the `(2, 3, 7)` triangle whose `pi/7`
/// vertex is the origin.
pub fn triangle_237_base_point() -> Point<f64> {
    polar_point(side_lengths_237().0, 0.0)
}

/// Vertices `(R, Q, P)` of the `(2, 3, 7)` triangle with angles
/// `pi/7`, `pi/3` and `pi/2`; `R` is the origin.
pub fn triangle_237_vertices() -> [Point<f64>; 3] {
    let (rq, rp) = side_lengths_237();
    [Point::origin(2), polar_point(rq, 0.0), polar_point(rp, ANGLES_237.2)]
}

/// Natural-map configuration for the identity representation of
/// [`triangle_group_237`]: `eps = 0.1`, `h = 1`, `m = 252`, `L = 8`, `O = Q`.
/// `m` is a multiple of 3 so the quadrature keeps the symmetry about `Q`.
pub fn natural_map_config() -> NaturalMapConfig {
    let mut cfg = NaturalMapConfig::new(0.1, 1.0, ProductPoint::new(vec![triangle_237_base_point()]));
    cfg.quadrature_size = 252;
    cfg.ball_radius = 8;
    cfg
}

/// The `(2, 3, 7)` triangle group generated by the three half-turns
/// `t_k = y^k x y^-k`, where `x` is the half-turn about the right-angle
/// vertex and `y` the order-3 rotation about `Q`. Conjugation by `y`
/// permutes the generators, so word balls are symmetric about `Q`.
pub fn triangle_group_237() -> Representation {
    let (rq, rp) = side_lengths_237();
    let x = rotation_about(ANGLES_237.2, rp, PI);
    let y = rotation_about(0.0, rq, TAU / 3.0);
    let yi = y.inverse();
    let t0 = x.clone();
    let t1 = y.compose(&x).compose(&yi);
    let t2 = y.compose(&t1).compose(&yi);
    let pres = Presentation::parse(
        vec!["t0".into(), "t1".into(), "t2".into()],
        &["t0 t0".into(), "t1 t1".into(), "t2 t2".into(), "t0 t1 t0 t2 t1 t0 t2 t1 t0 t1 t2 t0 t1 t2".into()],
    )
    .expect("valid presentation");
    Representation::checked(pres, vec![t0, t1, t2]).expect("half-turns satisfy the relators")
}

/// Boundary of the 4-simplex in `H^3` with the trivial group: tetrahedron
/// `i` omits vertex `i` and has orientation `(-1)^i`.
pub fn s3_boundary() -> (EquivariantTriangulation, Representation) {
    let klein = [[0.3, 0.0, 0.0], [-0.1, 0.3, 0.0], [-0.1, -0.2, 0.25], [0.0, 0.0, -0.3], [0.05, 0.07, 0.04]];
    let vertices: Vec<BaseVertex> = klein
        .iter()
        .enumerate()
        .map(|(i, u)| BaseVertex { name: format!("v{i}"), position: Point::from_klein(u).expect("inside the ball") })
        .collect();
    let simplices = (0..5)
        .map(|i| LabelledSimplex {
            vertices: (0..5).filter(|&j| j != i).map(|j| LabelledVertex::new(j, Word::identity())).collect(),
            orientation: if i % 2 == 0 { 1 } else { -1 },
        })
        .collect();
    let rho = trivial_representation(3);
    let t = EquivariantTriangulation::with_derived_pairings(3, vertices, simplices, &rho).expect("closed 3-cycle");
    (t, rho)
}

/// The trivial group `<g | g>` acting on `H^n`.
pub fn trivial_representation(n: usize) -> Representation {
    let pres = Presentation::parse(vec!["g".into()], &["g".into()]).expect("valid presentation");
    Representation::checked(pres, vec![Isometry::identity(n)]).expect("identity satisfies every relator")
}
