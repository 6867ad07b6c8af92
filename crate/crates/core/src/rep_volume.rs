//! Volumes of representations through equivariant straightened triangulations.
//!
//! A triangulation is described on a fundamental domain. Each simplex vertex
//! is a base vertex `v` together with a group word `w`, standing for the
//! vertex `w . v` of the universal cover. Positions `y_v` determine the
//! equivariant map `(v, w) -> rho(w) y_v`, and straightening replaces every
//! simplex by the geodesic simplex on its vertex images. The volume of
//! `rho` is the orientation-weighted sum of the straightened volumes.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{enumerate_ball, Representation, Transformation, Word, DEDUP_TOL, DEFAULT_BALL_CAP, RELATOR_TOL};
use crate::hyperbolic::{axis_generator, distance, exp_map, minkowski_dot, sample, IdealPoint, Isometry, Point, TangentVector};
use crate::linalg::{generalized_cross, Mat};
use crate::simplex::{dihedral_angle, signed_volume, GeodesicSimplex};

/// Minimal `|Klein determinant|` of an accepted image simplex.
pub const NONDEGENERACY_TOL: f64 = 1e-8;
/// Radius of the random perturbation applied to positions on retry.
pub const PERTURBATION_RADIUS: f64 = 0.1;
/// Number of perturbation attempts before giving up.
pub const MAX_RETRIES: usize = 100;
/// Word radius of the ball used to check orbit disjointness.
pub const ORBIT_CHECK_RADIUS: usize = 2;
/// Minimal distance between orbit points of distinct base vertices.
pub const ORBIT_SEPARATION: f64 = 1e-6;
/// Tolerance for `s c s^-1 = c` in flips.
pub const COMMUTATION_TOL: f64 = 1e-8;
/// Bound on `|volume|` accepted as vanishing.
pub const VANISHING_TOL: f64 = 1e-8;

/// A base vertex with its candidate position.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseVertex {
    pub name: String,
    pub position: Point<f64>,
}

/// Vertex `word . vertex` of the universal cover.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledVertex {
    pub vertex: usize,
    pub word: Word,
}

impl LabelledVertex {
    pub fn new(vertex: usize, word: Word) -> Self {
        Self { vertex, word }
    }
}

/// A simplex of the fundamental-domain complex with its orientation sign.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelledSimplex {
    pub vertices: Vec<LabelledVertex>,
    pub orientation: i8,
}

/// Identification of two facets: the facet `second` is the left translate
/// by `translation` of the facet `first`. Facets are named by
/// `(simplex, local index of the omitted vertex)`. `vertex_map` lists, for
/// the facet vertices of `first` in increasing local order, their local
/// indices in `second.0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FacePairing {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub translation: Word,
    pub vertex_map: Vec<usize>,
}

/// Where the walk continues after leaving a simplex through a facet.
#[derive(Clone, Debug)]
struct Link {
    simplex: usize,
    /// Local index map from this simplex to the partner; the omitted vertex
    /// goes to the partner's omitted vertex.
    map: Vec<usize>,
}

/// Closed oriented pseudo-manifold with group-word labels.
#[derive(Clone, Debug)]
pub struct EquivariantTriangulation {
    dim: usize,
    vertices: Vec<BaseVertex>,
    simplices: Vec<LabelledSimplex>,
    pairings: Vec<FacePairing>,
    links: HashMap<(usize, usize), Link>,
}

fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn parity(i: usize) -> i8 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

fn tri_err(msg: impl Into<String>) -> Error {
    Error::Triangulation(msg.into())
}

impl EquivariantTriangulation {
    /// Checks the combinatorics: vertex counts, labels, and that every facet
    /// is paired exactly once with opposite induced orientation.
    pub fn new(dim: usize, vertices: Vec<BaseVertex>, simplices: Vec<LabelledSimplex>, pairings: Vec<FacePairing>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(v) = vertices.iter().find(|v| v.position.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: v.position.dim() });
        }
        if simplices.is_empty() {
            return Err(tri_err("no simplices"));
        }
        for (k, s) in simplices.iter().enumerate() {
            if s.vertices.len() != dim + 1 {
                return Err(tri_err(format!("simplex {k} has {} vertices, expected {}", s.vertices.len(), dim + 1)));
            }
            if s.orientation != 1 && s.orientation != -1 {
                return Err(tri_err(format!("simplex {k} has orientation {}, expected +1 or -1", s.orientation)));
            }
            if let Some(v) = s.vertices.iter().find(|v| v.vertex >= vertices.len()) {
                return Err(Error::IndexOutOfRange { index: v.vertex, len: vertices.len() });
            }
        }
        let mut links = HashMap::new();
        for (k, p) in pairings.iter().enumerate() {
            let (s1, i1) = p.first;
            let (s2, i2) = p.second;
            for &(s, i) in &[p.first, p.second] {
                if s >= simplices.len() || i > dim {
                    return Err(tri_err(format!("pairing {k} names a nonexistent facet ({s}, {i})")));
                }
            }
            if p.first == p.second {
                return Err(tri_err(format!("pairing {k} identifies a facet with itself")));
            }
            let facet1: Vec<usize> = (0..=dim).filter(|&j| j != i1).collect();
            if p.vertex_map.len() != dim {
                return Err(tri_err(format!("pairing {k} has a vertex map of length {}", p.vertex_map.len())));
            }
            let image: HashSet<usize> = p.vertex_map.iter().copied().collect();
            if image.len() != dim || image.contains(&i2) || p.vertex_map.iter().any(|&j| j > dim) {
                return Err(tri_err(format!("pairing {k} has an invalid vertex map")));
            }
            for (&a, &b) in facet1.iter().zip(&p.vertex_map) {
                if simplices[s1].vertices[a].vertex != simplices[s2].vertices[b].vertex {
                    return Err(tri_err(format!("pairing {k} matches different base vertices")));
                }
            }
            let sign = simplices[s1].orientation * parity(i1) * simplices[s2].orientation * parity(i2) * permutation_sign(&p.vertex_map);
            if sign != -1 {
                return Err(tri_err(format!("pairing {k} does not reverse the induced orientation")));
            }
            let mut forward = vec![0; dim + 1];
            let mut backward = vec![0; dim + 1];
            forward[i1] = i2;
            backward[i2] = i1;
            for (&a, &b) in facet1.iter().zip(&p.vertex_map) {
                forward[a] = b;
                backward[b] = a;
            }
            for (key, link) in [(p.first, Link { simplex: s2, map: forward }), (p.second, Link { simplex: s1, map: backward })] {
                if links.insert(key, link).is_some() {
                    return Err(tri_err(format!("facet {key:?} is paired more than once")));
                }
            }
        }
        for s in 0..simplices.len() {
            for i in 0..=dim {
                if !links.contains_key(&(s, i)) {
                    return Err(tri_err(format!("facet ({s}, {i}) is unpaired")));
                }
            }
        }
        Ok(Self { dim, vertices, simplices, pairings, links })
    }

    /// Builds the face pairings by matching facets under a faithful
    /// reference representation: a facet is paired with the first other
    /// facet that is a left translate of it with opposite orientation.
    pub fn with_derived_pairings(
        dim: usize,
        vertices: Vec<BaseVertex>,
        simplices: Vec<LabelledSimplex>,
        reference: &Representation,
    ) -> Result<Self> {
        let images: Vec<Vec<Isometry<f64>>> =
            simplices.iter().map(|s| s.vertices.iter().map(|v| reference.evaluate(&v.word)).collect()).collect();
        let same = |a: &Isometry<f64>, b: &Isometry<f64>| a.deviation(b) < DEDUP_TOL * a.magnitude().max(b.magnitude()).max(1.0);
        let mut paired: HashSet<(usize, usize)> = HashSet::new();
        let mut pairings = Vec::new();
        for s1 in 0..simplices.len() {
            for i1 in 0..=dim {
                if paired.contains(&(s1, i1)) {
                    continue;
                }
                let facet1: Vec<usize> = (0..=dim).filter(|&j| j != i1).collect();
                let anchor = facet1[0];
                let lv = &simplices[s1].vertices[anchor];
                let mut found = None;
                'search: for s2 in 0..simplices.len() {
                    for i2 in 0..=dim {
                        if (s2, i2) == (s1, i1) || paired.contains(&(s2, i2)) {
                            continue;
                        }
                        let facet2: Vec<usize> = (0..=dim).filter(|&j| j != i2).collect();
                        for &b in &facet2 {
                            let target = &simplices[s2].vertices[b];
                            if target.vertex != lv.vertex {
                                continue;
                            }
                            let g_word = target.word.concat(&lv.word.inverse());
                            let g = images[s2][b].compose(&images[s1][anchor].inverse());
                            let mut map = Vec::with_capacity(dim);
                            for &a in &facet1 {
                                let want = g.compose(&images[s1][a]);
                                let hit = facet2.iter().copied().find(|&c| {
                                    !map.contains(&c)
                                        && simplices[s2].vertices[c].vertex == simplices[s1].vertices[a].vertex
                                        && same(&want, &images[s2][c])
                                });
                                match hit {
                                    Some(c) => map.push(c),
                                    None => break,
                                }
                            }
                            if map.len() != dim {
                                continue;
                            }
                            let sign = simplices[s1].orientation
                                * parity(i1)
                                * simplices[s2].orientation
                                * parity(i2)
                                * permutation_sign(&map);
                            if sign == -1 {
                                found = Some(FacePairing { first: (s1, i1), second: (s2, i2), translation: g_word, vertex_map: map });
                                break 'search;
                            }
                        }
                    }
                }
                let p = found.ok_or_else(|| tri_err(format!("facet ({s1}, {i1}) has no partner")))?;
                paired.insert(p.first);
                paired.insert(p.second);
                pairings.push(p);
            }
        }
        Self::new(dim, vertices, simplices, pairings)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[BaseVertex] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[LabelledSimplex] {
        &self.simplices
    }

    pub fn pairings(&self) -> &[FacePairing] {
        &self.pairings
    }

    pub fn base_positions(&self) -> Vec<Point<f64>> {
        self.vertices.iter().map(|v| v.position.clone()).collect()
    }

    /// Checks that every pairing is realized by `rho`: the recorded
    /// translation carries each facet vertex onto its partner.
    pub fn validate(&self, rho: &Representation) -> Result<()> {
        check_rep_dim(self, rho)?;
        for (k, p) in self.pairings.iter().enumerate() {
            let g = rho.evaluate(&p.translation);
            let facet: Vec<usize> = (0..=self.dim).filter(|&j| j != p.first.1).collect();
            for (&a, &b) in facet.iter().zip(&p.vertex_map) {
                let lhs = g.compose(&rho.evaluate(&self.simplices[p.first.0].vertices[a].word));
                let rhs = rho.evaluate(&self.simplices[p.second.0].vertices[b].word);
                let tol = DEDUP_TOL * lhs.magnitude().max(rhs.magnitude()).max(1.0);
                if !(lhs.deviation(&rhs) < tol) {
                    return Err(tri_err(format!("pairing {k} is not realized by the representation")));
                }
            }
        }
        Ok(())
    }

    /// One representative `(simplex, a, b)` for each codimension-2 face,
    /// where the face is spanned by all vertices of the simplex except the
    /// local vertices `a` and `b`.
    pub fn codim2_faces(&self) -> Vec<(usize, usize, usize)> {
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
        let mut reps = Vec::new();
        for s in 0..self.simplices.len() {
            for a in 0..=self.dim {
                for b in a + 1..=self.dim {
                    if seen.contains(&(s, a, b)) {
                        continue;
                    }
                    reps.push((s, a, b));
                    if let Ok(cycle) = self.star(s, a, b) {
                        for (t, x, y) in cycle {
                            seen.insert((t, x, y));
                            seen.insert((t, y, x));
                        }
                    }
                }
            }
        }
        reps
    }

    /// States `(simplex, a, b)` met when turning around the face `(s, a, b)`.
    fn star(&self, s: usize, a: usize, b: usize) -> Result<Vec<(usize, usize, usize)>> {
        if s >= self.simplices.len() || a > self.dim || b > self.dim || a == b {
            return Err(tri_err(format!("({s}, {a}, {b}) is not a codimension-2 face")));
        }
        let start = (s, a, b);
        let mut state = start;
        let mut cycle = Vec::new();
        let limit = self.simplices.len() * (self.dim + 1) * self.dim + 1;
        loop {
            cycle.push(state);
            let (s, a, b) = state;
            let link = self.links.get(&(s, a)).ok_or_else(|| Error::IncompleteStar(format!("facet ({s}, {a}) is unpaired")))?;
            state = (link.simplex, link.map[b], link.map[a]);
            if state == start {
                return Ok(cycle);
            }
            if cycle.len() > limit {
                return Err(Error::IncompleteStar(format!("walk around ({}, {}, {}) does not close", start.0, start.1, start.2)));
            }
        }
    }
}

fn check_rep_dim(t: &EquivariantTriangulation, rho: &Representation) -> Result<()> {
    let n = rho.identity_element().dim();
    if n != t.dim {
        return Err(Error::DimensionMismatch { expected: t.dim, found: n });
    }
    Ok(())
}

fn check_positions(t: &EquivariantTriangulation, positions: &[Point<f64>]) -> Result<()> {
    if positions.len() != t.vertices.len() {
        return Err(Error::DimensionMismatch { expected: t.vertices.len(), found: positions.len() });
    }
    if let Some(p) = positions.iter().find(|p| p.dim() != t.dim) {
        return Err(Error::DimensionMismatch { expected: t.dim, found: p.dim() });
    }
    Ok(())
}

/// Straightened image of simplex `k`: the geodesic simplex on `rho(w) y_v`.
pub fn image_simplex(
    t: &EquivariantTriangulation,
    rho: &Representation,
    positions: &[Point<f64>],
    k: usize,
) -> Result<GeodesicSimplex<f64>> {
    let s = t.simplices.get(k).ok_or(Error::IndexOutOfRange { index: k, len: t.simplices.len() })?;
    let pts = s
        .vertices
        .iter()
        .map(|v| rho.evaluate(&v.word).apply_point(&positions[v.vertex]))
        .collect::<Result<Vec<_>>>()?;
    GeodesicSimplex::from_points(pts)
}

/// Index of the first simplex whose image is degenerate, or of a simplex
/// containing a base vertex whose orbit meets another base vertex.
fn first_failure(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>], ball: &[Isometry<f64>]) -> Result<Option<usize>> {
    for k in 0..t.simplices.len() {
        if !(image_simplex(t, rho, positions, k)?.klein_determinant().abs() > NONDEGENERACY_TOL) {
            return Ok(Some(k));
        }
    }
    for i in 0..positions.len() {
        for j in 0..positions.len() {
            if i == j {
                continue;
            }
            for g in ball {
                if distance(&positions[i], &g.apply_point(&positions[j])?)? < ORBIT_SEPARATION {
                    let k = t.simplices.iter().position(|s| s.vertices.iter().any(|v| v.vertex == i)).unwrap_or(0);
                    return Ok(Some(k));
                }
            }
        }
    }
    Ok(None)
}

fn check_ball(rho: &Representation) -> Result<Vec<Isometry<f64>>> {
    Ok(enumerate_ball(rho, ORBIT_CHECK_RADIUS, DEFAULT_BALL_CAP)?.elements.into_iter().map(|e| e.element).collect())
}

/// Whether `positions` give nondegenerate image simplices and orbit-disjoint
/// base vertices.
pub fn positions_are_generic(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>]) -> Result<bool> {
    check_rep_dim(t, rho)?;
    check_positions(t, positions)?;
    Ok(first_failure(t, rho, positions, &check_ball(rho)?)?.is_none())
}

fn perturb<R: Rng>(y: &Point<f64>, rng: &mut R, radius: f64) -> Result<Point<f64>> {
    let dir: Vec<f64> = sample::unit_vector(rng, y.dim());
    let r = radius * rng.gen::<f64>();
    let c: Vec<f64> = dir.iter().map(|d| d * r).collect();
    Ok(exp_map(&TangentVector::from_frame_coords(y.clone(), &c)?))
}

/// Positions near `start` for which every image simplex is nondegenerate
/// and distinct base vertices have disjoint orbits. Returns `start` itself
/// when it already qualifies; otherwise retries perturbations of radius
/// [`PERTURBATION_RADIUS`] drawn from a ChaCha8 stream seeded by `seed`.
pub fn nondegenerate_positions_near(
    t: &EquivariantTriangulation,
    rho: &Representation,
    start: &[Point<f64>],
    seed: u64,
) -> Result<Vec<Point<f64>>> {
    check_rep_dim(t, rho)?;
    check_positions(t, start)?;
    let ball = check_ball(rho)?;
    let mut offending = match first_failure(t, rho, start, &ball)? {
        None => return Ok(start.to_vec()),
        Some(k) => k,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let candidate = start.iter().map(|y| perturb(y, &mut rng, PERTURBATION_RADIUS)).collect::<Result<Vec<_>>>()?;
        match first_failure(t, rho, &candidate, &ball)? {
            None => return Ok(candidate),
            Some(k) => offending = k,
        }
    }
    Err(Error::PositionsExhausted { retries: MAX_RETRIES, simplex: offending })
}

/// [`nondegenerate_positions_near`] starting from the triangulation's
/// candidate positions.
pub fn nondegenerate_positions(t: &EquivariantTriangulation, rho: &Representation, seed: u64) -> Result<Vec<Point<f64>>> {
    nondegenerate_positions_near(t, rho, &t.base_positions(), seed)
}

/// Independent random positions: each candidate is moved by up to `spread`,
/// then made generic. Used to test independence from the equivariant map.
pub fn random_positions(t: &EquivariantTriangulation, rho: &Representation, seed: u64, spread: f64) -> Result<Vec<Point<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = t.base_positions().iter().map(|y| perturb(y, &mut rng, spread)).collect::<Result<Vec<_>>>()?;
    nondegenerate_positions_near(t, rho, &start, rng.gen())
}

fn volume_sum(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>], strict: bool) -> Result<f64> {
    check_rep_dim(t, rho)?;
    check_positions(t, positions)?;
    let mut total = 0.0;
    for (k, s) in t.simplices.iter().enumerate() {
        let img = image_simplex(t, rho, positions, k)?;
        if strict && !(img.klein_determinant().abs() > NONDEGENERACY_TOL) {
            return Err(Error::Degenerate(format!("image of simplex {k} is degenerate")));
        }
        total += f64::from(s.orientation) * signed_volume(&img)?;
    }
    Ok(total)
}

/// `sum_s eps(s) vol(straightened image of s)`, with signed volumes carrying
/// the orientation of the image. Fails on a degenerate image simplex.
pub fn rep_volume(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>]) -> Result<f64> {
    volume_sum(t, rho, positions, true)
}

/// Like [`rep_volume`] but degenerate images contribute their limiting
/// signed volume zero instead of failing.
pub fn rep_volume_allow_degenerate(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>]) -> Result<f64> {
    volume_sum(t, rho, positions, false)
}

/// Winding number of the straightened map around the codimension-2 face
/// `(simplex, a, b)`: `(1 / 2 pi) sum eps(s') theta(F', s')` over the star,
/// where `eps` combines the simplex orientation with the orientation of its
/// image.
pub fn transverse_degree(
    t: &EquivariantTriangulation,
    rho: &Representation,
    positions: &[Point<f64>],
    face: (usize, usize, usize),
) -> Result<f64> {
    check_rep_dim(t, rho)?;
    check_positions(t, positions)?;
    let cycle = t.star(face.0, face.1, face.2)?;
    let mut acc = 0.0;
    for (s, a, b) in cycle {
        let img = image_simplex(t, rho, positions, s)?;
        let orient = img.orientation();
        if orient == 0 {
            return Err(Error::Degenerate(format!("image of simplex {s} is degenerate")));
        }
        acc += f64::from(t.simplices[s].orientation * orient) * dihedral_angle(&img, (a, b))?;
    }
    Ok(acc / std::f64::consts::TAU)
}

/// Transverse degree at one codimension-2 face.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceDegree {
    pub simplex: usize,
    pub omitted: (usize, usize),
    pub degree: f64,
}

/// Transverse degrees at a representative of every codimension-2 face.
pub fn transverse_degrees(t: &EquivariantTriangulation, rho: &Representation, positions: &[Point<f64>]) -> Result<Vec<FaceDegree>> {
    t.codim2_faces()
        .into_iter()
        .map(|(s, a, b)| Ok(FaceDegree { simplex: s, omitted: (a, b), degree: transverse_degree(t, rho, positions, (s, a, b))? }))
        .collect()
}

/// Attracting fixed point of `g` by repeated squaring, with the eigenvalue
/// `lambda` such that `g theta = lambda theta` on the ray. `None` when the
/// dominant direction is not lightlike or not fixed.
fn dominant_fixed_point(g: &Isometry<f64>) -> Option<(IdealPoint<f64>, f64)> {
    let mut m = g.matrix().clone();
    for _ in 0..64 {
        let s = m.max_abs();
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        m = m.scale(1.0 / s);
        m = m.mul(&m);
    }
    let n1 = m.rows();
    let col = (0..n1).max_by(|&a, &b| {
        let na: f64 = m.col(a).iter().map(|x| x * x).sum();
        let nb: f64 = m.col(b).iter().map(|x| x * x).sum();
        na.total_cmp(&nb)
    })?;
    let mut v = m.col(col);
    if v[0] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    if !(v[0] > 0.0) {
        return None;
    }
    let ray: Vec<f64> = v.iter().map(|x| x / v[0]).collect();
    let spatial: f64 = ray[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((spatial - 1.0).abs() < 1e-6) {
        return None;
    }
    let theta = IdealPoint::from_direction(&ray[1..]);
    let image = g.apply_vec(theta.ray());
    let lambda = image[0];
    let fixed = image.iter().zip(theta.ray()).all(|(a, b)| (a / lambda - b).abs() < 1e-7);
    fixed.then_some((theta, lambda))
}

/// Residual of `g theta ~ theta` measured on the normalized rays.
fn fixed_point_residual(g: &Isometry<f64>, theta: &IdealPoint<f64>) -> f64 {
    let image = g.apply_vec(theta.ray());
    image.iter().zip(theta.ray()).map(|(a, b)| (a / image[0] - b).abs()).fold(0.0, f64::max)
}

/// Axis data of a hyperbolic (or loxodromic) isometry.
#[derive(Clone, Debug)]
pub struct Axis {
    pub attracting: IdealPoint<f64>,
    pub repelling: IdealPoint<f64>,
    pub translation_length: f64,
}

/// Fixed points and translation length of `g`, or `NotHyperbolic`.
pub fn hyperbolic_axis(g: &Isometry<f64>) -> Result<Axis> {
    let fail = || Error::NotHyperbolic("no attracting and repelling fixed points".into());
    let (attracting, lambda) = dominant_fixed_point(g).ok_or_else(fail)?;
    let (repelling, _) = dominant_fixed_point(&g.inverse()).ok_or_else(fail)?;
    let ell = lambda.ln();
    let separation = -minkowski_dot(attracting.ray(), repelling.ray());
    if !(ell > 1e-9) || !(separation > 1e-9) {
        return Err(Error::NotHyperbolic(format!("translation length {ell:.3e}")));
    }
    Ok(Axis { attracting, repelling, translation_length: ell })
}

/// Reflection of `H^2` in the axis of the hyperbolic isometry `g`.
pub fn axis_reflection(g: &Isometry<f64>) -> Result<Isometry<f64>> {
    if g.dim() != 2 {
        return Err(Error::UnsupportedDimension(g.dim()));
    }
    let axis = hyperbolic_axis(g)?;
    // the Minkowski normal of the plane spanned by the two fixed rays
    let c = generalized_cross(&[axis.attracting.ray().to_vec(), axis.repelling.ray().to_vec()]);
    let mut u = vec![-c[0], c[1], c[2]];
    let q = minkowski_dot(&u, &u).sqrt();
    u.iter_mut().for_each(|x| *x /= q);
    crate::hyperbolic::reflection(&u)
}

/// Flip of an amalgam `A *_C B`: generators listed in `bent` (those of `B`)
/// are conjugated by `s`, the others are kept. `amalgam` lists words
/// generating `C`; `s` must commute with their images.
pub fn flip_representation(rho: &Representation, bent: &[usize], amalgam: &[Word], s: &Isometry<f64>) -> Result<Representation> {
    let si = s.inverse();
    for c in amalgam {
        let g = rho.evaluate(c);
        let residual = s.compose(&g).compose(&si).deviation(&g) / g.magnitude().max(1.0);
        if !(residual <= COMMUTATION_TOL) {
            return Err(Error::CommutationFailure { residual });
        }
    }
    let images = bent_images(rho, bent, |b| s.compose(b).compose(&si))?;
    Representation::checked(rho.presentation().clone(), images)
}

fn bent_images(rho: &Representation, bent: &[usize], f: impl Fn(&Isometry<f64>) -> Isometry<f64>) -> Result<Vec<Isometry<f64>>> {
    if let Some(&b) = bent.iter().find(|&&b| b >= rho.presentation().rank()) {
        return Err(Error::IndexOutOfRange { index: b, len: rho.presentation().rank() });
    }
    Ok(rho.images().iter().enumerate().map(|(k, g)| if bent.contains(&k) { f(g) } else { g.clone() }).collect())
}

type CustomPath = Arc<dyn Fn(f64) -> Result<Representation> + Send + Sync>;

/// How the representations along a path are produced.
#[derive(Clone)]
pub enum PathKind {
    /// `rho_t = exp(tX) rho exp(-tX)`.
    Conjugation { generator: Mat<f64> },
    /// `rho_t(b) = g_t rho(b) g_t^-1` on the bent generators, where
    /// `g_t = exp(t log_axis)` centralizes `rho(amalgam)`.
    Bending { amalgam: Word, bent: Vec<usize>, log_axis: Mat<f64> },
    Custom(CustomPath),
}

impl fmt::Debug for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathKind::Conjugation { .. } => f.write_str("Conjugation"),
            PathKind::Bending { amalgam, bent, .. } => write!(f, "Bending {{ amalgam: {amalgam:?}, bent: {bent:?} }}"),
            PathKind::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// A one-parameter family of representations `t -> rho_t`.
#[derive(Clone, Debug)]
pub struct DeformationPath {
    pub base: Representation,
    pub kind: PathKind,
}

fn is_lorentz_algebra(x: &Mat<f64>) -> bool {
    let j = Mat::minkowski(x.rows());
    x.is_square() && x.transpose().mul(&j).add(&j.mul(x)).max_abs() <= 1e-9 * x.max_abs().max(1.0)
}

impl DeformationPath {
    /// Conjugation by `exp(tX)`; `X` must lie in `so(n,1)`.
    pub fn conjugation(base: Representation, generator: Mat<f64>) -> Result<Self> {
        if generator.rows() != base.identity_element().dim() + 1 || !is_lorentz_algebra(&generator) {
            return Err(Error::InvalidParameter("conjugation generator must lie in so(n,1)".into()));
        }
        Ok(Self { base, kind: PathKind::Conjugation { generator } })
    }

    pub fn custom(base: Representation, f: impl Fn(f64) -> Result<Representation> + Send + Sync + 'static) -> Self {
        Self { base, kind: PathKind::Custom(Arc::new(f)) }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PathKind::Conjugation { .. } => "conjugation",
            PathKind::Bending { .. } => "bending",
            PathKind::Custom(_) => "custom",
        }
    }

    /// `rho_t`, failing if a relator residual exceeds the tolerance.
    pub fn at(&self, t: f64) -> Result<Representation> {
        let rho = match &self.kind {
            PathKind::Conjugation { generator } => self.base.conjugated(&Isometry::exp_algebra(generator, t)),
            PathKind::Bending { bent, log_axis, .. } => {
                let g = Isometry::exp_algebra(log_axis, t);
                let gi = g.inverse();
                self.base.with_images(bent_images(&self.base, bent, |b| g.compose(b).compose(&gi))?)?
            }
            PathKind::Custom(f) => f(t)?,
        };
        let report = rho.validate();
        if let Some((relator, residual)) = report.residuals.iter().find(|(_, r)| !(*r <= RELATOR_TOL)) {
            return Err(Error::RelatorFailure { relator: relator.clone(), residual: *residual });
        }
        Ok(rho)
    }
}

/// Bending of `rho` along the amalgamating element `c`: the bent generators
/// are conjugated by `g_t = exp(t X)`, where `X` is the unit-speed axis
/// generator of `rho(c)`, so `g_t` translates by `t` along the axis.
pub fn bending_path(rho: &Representation, c: &Word, bent: &[usize]) -> Result<DeformationPath> {
    bent_images(rho, bent, Isometry::clone)?;
    let axis = hyperbolic_axis(&rho.evaluate(c))?;
    let log_axis = axis_generator(&axis.attracting, &axis.repelling);
    Ok(DeformationPath { base: rho.clone(), kind: PathKind::Bending { amalgam: c.clone(), bent: bent.to_vec(), log_axis } })
}

/// A position redraw during a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEvent {
    pub t: f64,
    pub simplex: Option<usize>,
    pub message: String,
}

/// Volumes along a path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub samples: Vec<(f64, f64)>,
    pub median: f64,
    pub max_deviation: f64,
    pub events: Vec<ScanEvent>,
}

impl ScanResult {
    /// CSV with header `t,volume`, 17 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,volume\n");
        for (t, v) in &self.samples {
            out.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        out
    }
}

/// `k` equally spaced parameters from `a` to `b` inclusive.
pub fn uniform_grid(a: f64, b: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![a],
        _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Volume of `rho_t` on a grid. Positions are kept across samples and
/// re-drawn, with an event logged, whenever a sample makes them degenerate.
pub fn scan_volume(t: &EquivariantTriangulation, path: &DeformationPath, grid: &[f64], seed: u64) -> Result<ScanResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("scan grid is empty".into()));
    }
    let mut positions: Option<Vec<Point<f64>>> = None;
    let mut samples = Vec::with_capacity(grid.len());
    let mut events = Vec::new();
    for (k, &s) in grid.iter().enumerate() {
        let rho = path.at(s)?;
        let ball = check_ball(&rho)?;
        let current = match positions.take() {
            None => nondegenerate_positions(t, &rho, seed)?,
            Some(p) => match first_failure(t, &rho, &p, &ball)? {
                None => p,
                Some(bad) => {
                    events.push(ScanEvent { t: s, simplex: Some(bad), message: "positions degenerate; re-drawn".into() });
                    nondegenerate_positions_near(t, &rho, &p, seed.wrapping_add(k as u64 + 1))?
                }
            },
        };
        samples.push((s, rep_volume(t, &rho, &current)?));
        positions = Some(current);
    }
    let volumes: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let med = median(&volumes);
    let max_deviation = volumes.iter().map(|v| (v - med).abs()).fold(0.0, f64::max);
    Ok(ScanResult { samples, median: med, max_deviation, events })
}

/// Outcome of the common-fixed-point test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointVerdict {
    /// Every generator acts trivially, so every boundary point is fixed.
    pub trivial: bool,
    pub fixed_point: Option<IdealPoint<f64>>,
    /// Largest fixed-point residual over the generators.
    pub residual: Option<f64>,
    pub volume: Option<f64>,
    /// `|volume| <= 1e-8`, when a volume was computed.
    pub volume_vanishes: Option<bool>,
    /// The straightened map was degenerate for every position tried.
    pub degenerate_map: bool,
}

/// Searches for an ideal point fixed by every generator image. Candidates
/// are the attracting and repelling points of the generators and of their
/// pairwise products; a candidate is accepted when every generator fixes it
/// within `1e-7`. Elliptic-only groups yield no candidates. When a
/// triangulation is supplied the volume is computed as well.
pub fn fixed_boundary_point_test(rho: &Representation, triangulation: Option<(&EquivariantTriangulation, u64)>) -> Result<FixedPointVerdict> {
    let id = rho.identity_element();
    let moving: Vec<&Isometry<f64>> = rho.images().iter().filter(|g| g.deviation(&id) > 1e-12).collect();
    let trivial = moving.is_empty();
    let mut fixed_point = None;
    let mut residual = None;
    if !trivial {
        let mut pool: Vec<Isometry<f64>> = Vec::new();
        for (i, g) in moving.iter().enumerate() {
            pool.push((*g).clone());
            pool.push(g.inverse());
            for h in &moving[i + 1..] {
                pool.push(g.compose(h));
                pool.push(g.compose(&h.inverse()));
            }
        }
        let mut best: Option<(IdealPoint<f64>, f64)> = None;
        for cand in pool.iter().filter_map(|g| dominant_fixed_point(g).map(|(theta, _)| theta)) {
            let r = moving.iter().map(|g| fixed_point_residual(g, &cand)).fold(0.0, f64::max);
            if r < 1e-7 && best.as_ref().is_none_or(|(_, b)| r < *b) {
                best = Some((cand, r));
            }
        }
        if let Some((theta, r)) = best {
            fixed_point = Some(theta);
            residual = Some(r);
        }
    }
    let mut volume = None;
    let mut degenerate_map = false;
    if let Some((t, seed)) = triangulation {
        let v = match nondegenerate_positions(t, rho, seed) {
            Ok(p) => rep_volume(t, rho, &p)?,
            Err(Error::PositionsExhausted { .. }) => {
                degenerate_map = true;
                rep_volume_allow_degenerate(t, rho, &t.base_positions())?
            }
            Err(e) => return Err(e),
        };
        volume = Some(v);
    }
    Ok(FixedPointVerdict {
        trivial,
        fixed_point,
        residual,
        volume,
        volume_vanishes: volume.map(|v| v.abs() <= VANISHING_TOL),
        degenerate_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::PI;

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
    }

    #[test]
    fn s3_boundary_is_closed_and_has_zero_volume() {
        let (t, rho) = fixtures::s3_boundary();
        assert_eq!(t.pairings().len(), 10);
        let y = nondegenerate_positions(&t, &rho, 1).unwrap();
        assert!(rep_volume(&t, &rho, &y).unwrap().abs() < 1e-12);
        // 10 edges, each in a cycle of 3 tetrahedra
        let faces = t.codim2_faces();
        assert_eq!(faces.len(), 10);
        for f in faces {
            assert_eq!(t.star(f.0, f.1, f.2).unwrap().len(), 3);
        }
    }

    #[test]
    fn s3_degrees_are_integers() {
        let (t, rho) = fixtures::s3_boundary();
        for seed in 0..5 {
            let y = random_positions(&t, &rho, seed, 1.0).unwrap();
            for d in transverse_degrees(&t, &rho, &y).unwrap() {
                assert!((d.degree - d.degree.round()).abs() < 1e-10, "{d:?}");
                assert!(d.degree.round().abs() <= 1.0);
            }
        }
    }

    #[test]
    fn genus2_octagon_has_area_4pi() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        t.validate(&rho).unwrap();
        // 8 triangles: 4 outer-edge pairings, 8 radial-edge pairings
        assert_eq!(t.pairings().len(), 12);
        let y = nondegenerate_positions(&t, &rho, 0).unwrap();
        assert_eq!(y, t.base_positions());
        let v = rep_volume(&t, &rho, &y).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-10, "{v}");
    }

    #[test]
    fn genus2_degrees_are_one() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        let y = random_positions(&t, &rho, 3, 0.3).unwrap();
        let degrees = transverse_degrees(&t, &rho, &y).unwrap();
        // the centre and the single octagon vertex class
        assert_eq!(degrees.len(), 2);
        for d in degrees {
            assert!((d.degree - 1.0).abs() < 1e-10, "{d:?}");
        }
    }

    #[test]
    fn collinear_positions_are_perturbed() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        // both base vertices at the centre make every triangle degenerate
        let start = vec![Point::origin(2), Point::origin(2)];
        let y = nondegenerate_positions_near(&t, &rho, &start, 9).unwrap();
        for (a, b) in y.iter().zip(&start) {
            assert!(distance(a, b).unwrap() <= PERTURBATION_RADIUS + 1e-12);
        }
        assert!(positions_are_generic(&t, &rho, &y).unwrap());
        let again = nondegenerate_positions_near(&t, &rho, &start, 9).unwrap();
        assert_eq!(y, again);
        let v = rep_volume(&t, &rho, &y).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn degenerate_images_are_rejected() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        let start = vec![Point::origin(2), Point::origin(2)];
        assert!(matches!(rep_volume(&t, &rho, &start), Err(Error::Degenerate(_))));
    }

    #[test]
    fn unpaired_facets_are_rejected() {
        let (t, rho) = fixtures::s3_boundary();
        let simplices = t.simplices()[..4].to_vec();
        let err = EquivariantTriangulation::with_derived_pairings(3, t.vertices().to_vec(), simplices, &rho).unwrap_err();
        assert!(matches!(err, Error::Triangulation(_)));
        let mut pairings = t.pairings().to_vec();
        pairings.pop();
        assert!(EquivariantTriangulation::new(3, t.vertices().to_vec(), t.simplices().to_vec(), pairings).is_err());
    }

    #[test]
    fn same_orientation_pairing_is_rejected() {
        let (t, _) = fixtures::s3_boundary();
        let mut pairings = t.pairings().to_vec();
        pairings[0].vertex_map.swap(0, 1);
        assert!(EquivariantTriangulation::new(3, t.vertices().to_vec(), t.simplices().to_vec(), pairings).is_err());
    }

    #[test]
    fn axis_of_a_translation() {
        let g = fixtures::boost_x(1.3);
        let axis = hyperbolic_axis(&g).unwrap();
        assert!((axis.translation_length - 1.3).abs() < 1e-12);
        assert!((axis.attracting.ray()[1] - 1.0).abs() < 1e-12);
        assert!((axis.repelling.ray()[1] + 1.0).abs() < 1e-12);
        let x = axis_generator(&axis.attracting, &axis.repelling).scale(axis.translation_length);
        assert!(Isometry::exp_algebra(&x, 1.0).deviation(&g) < 1e-12);
        assert!(matches!(hyperbolic_axis(&fixtures::rotation(0.4)), Err(Error::NotHyperbolic(_))));
        let s = axis_reflection(&g).unwrap();
        assert_eq!(s.orientation_sign(), -1);
        assert!(s.compose(&g).deviation(&g.compose(&s)) < 1e-12);
    }

    #[test]
    fn flip_with_identity_is_unchanged() {
        let rho = fixtures::genus2_fuchsian();
        let c = fixtures::genus2_separating_word();
        let flipped = flip_representation(&rho, &[2, 3], &[c], &Isometry::identity(2)).unwrap();
        assert_eq!(flipped, rho);
    }

    #[test]
    fn flip_needs_commuting_reflection() {
        let rho = fixtures::genus2_fuchsian();
        let c = fixtures::genus2_separating_word();
        let s = crate::hyperbolic::reflection(&[0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(flip_representation(&rho, &[2, 3], &[c], &s), Err(Error::CommutationFailure { .. })));
    }

    #[test]
    fn genus2_flip_has_zero_volume() {
        let (rho, _) = fixtures::genus2_flip().unwrap();
        assert!(rho.validate().valid);
        let t = fixtures::genus2_triangulation().unwrap();
        let y = nondegenerate_positions(&t, &rho, 5).unwrap();
        let v = rep_volume(&t, &rho, &y).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn bending_keeps_relators_and_starts_at_rho() {
        let path = fixtures::genus2_bending_path().unwrap();
        let r0 = path.at(0.0).unwrap();
        for (a, b) in r0.images().iter().zip(path.base.images()) {
            assert!(a.deviation(b) < 1e-12);
        }
        let r = path.at(0.37).unwrap();
        assert!(r.validate().residuals.iter().all(|(_, x)| *x <= 1e-8));
        assert_eq!(path.kind_name(), "bending");
    }

    #[test]
    fn bending_path_is_c1() {
        let path = fixtures::genus2_bending_path().unwrap();
        let h = 1e-4;
        let d = |t: f64| {
            let p = path.at(t + h).unwrap();
            let m = path.at(t - h).unwrap();
            p.images()[2].matrix().sub(m.images()[2].matrix()).scale(0.5 / h)
        };
        let d1 = d(0.3);
        let d2 = d(0.3 + 1e-3);
        assert!(d1.max_abs().is_finite() && d1.max_abs() < 1e4);
        assert!(d1.max_abs_diff(&d2) < 1e-3 * d1.max_abs().max(1.0) * 10.0);
    }

    #[test]
    fn conjugation_scan_is_constant() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        let x = crate::hyperbolic::rotation_generator(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0])
            .add(&axis_generator(&IdealPoint::from_angle(0.3), &IdealPoint::from_angle(2.0)));
        let path = DeformationPath::conjugation(rho, x).unwrap();
        let scan = scan_volume(&t, &path, &uniform_grid(0.0, 1.0, 7), 2).unwrap();
        assert!(scan.max_deviation <= 1e-9, "{}", scan.max_deviation);
        assert!((scan.median - 4.0 * PI).abs() < 1e-9);
        assert!(DeformationPath::conjugation(path.base.clone(), Mat::identity(3)).is_err());
    }

    #[test]
    fn scan_csv_format() {
        let r = ScanResult { samples: vec![(0.0, 1.0), (0.5, -2.25)], median: 0.0, max_deviation: 0.0, events: vec![] };
        let csv = r.to_csv();
        assert_eq!(csv, "t,volume\n0.0000000000000000e0,1.0000000000000000e0\n5.0000000000000000e-1,-2.2500000000000000e0\n");
    }

    #[test]
    fn fuchsian_has_no_fixed_point() {
        let rho = fixtures::genus2_fuchsian();
        let v = fixed_boundary_point_test(&rho, None).unwrap();
        assert!(!v.trivial);
        assert!(v.fixed_point.is_none());
    }

    #[test]
    fn parabolic_family_fixes_a_point_and_has_zero_volume() {
        let t = fixtures::genus2_triangulation().unwrap();
        for s in [0.0, 0.4, 1.0] {
            let rho = fixtures::parabolic_representation(s).unwrap();
            let v = fixed_boundary_point_test(&rho, Some((&t, 11))).unwrap();
            let theta = v.fixed_point.clone().expect("common fixed point");
            assert!((theta.ray()[2] - 1.0).abs() < 1e-6, "{theta:?}");
            assert_eq!(v.volume_vanishes, Some(true), "{v:?}");
            assert!(!v.degenerate_map);
        }
    }

    #[test]
    fn trivial_representation_fixes_everything() {
        let t = fixtures::genus2_triangulation().unwrap();
        let rho = fixtures::genus2_fuchsian();
        let triv = rho.with_images(vec![Isometry::identity(2); 4]).unwrap();
        let v = fixed_boundary_point_test(&triv, Some((&t, 0))).unwrap();
        assert!(v.trivial);
        assert!(v.degenerate_map);
        assert_eq!(v.volume, Some(0.0));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let rho = fixtures::genus2_fuchsian();
        let t = fixtures::genus2_triangulation().unwrap();
        let path = DeformationPath::custom(rho.clone(), move |_| Ok(rho.clone()));
        assert!(scan_volume(&t, &path, &[], 0).is_err());
        assert_eq!(path.kind_name(), "custom");
    }
}
