//! Finitely presented groups acting by isometries: words, presentations,
//! representations, word balls and orbit counting.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyperbolic::{distance, Isometry, Point};
use crate::linalg::Mat;
use crate::product::{ProductIsometry, ProductPoint};

/// Tolerance on relator residuals for a valid representation.
pub const RELATOR_TOL: f64 = 1e-8;
/// Matrix distance below which two ball elements are identified.
pub const DEDUP_TOL: f64 = 1e-6;
/// Default cap on the number of enumerated elements.
pub const DEFAULT_BALL_CAP: usize = 2_000_000;

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inverted(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

/// A word in the generators, read left to right as a product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn generator(i: usize) -> Self {
        Self { letters: vec![Letter { generator: i, inverse: false }] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inverted()).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }.reduced()
    }

    pub fn push(&self, letter: Letter) -> Self {
        self.concat(&Word { letters: vec![letter] })
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverted()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }
}

/// Generators and relators.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.is_empty() || g.contains(char::is_whitespace) || g.contains('^') || g == "1" {
                return Err(Error::InvalidParameter(format!("invalid generator name `{g}`")));
            }
            if generators[..i].contains(g) {
                return Err(Error::InvalidParameter(format!("duplicate generator `{g}`")));
            }
        }
        for r in &relators {
            if let Some(l) = r.letters.iter().find(|l| l.generator >= generators.len()) {
                return Err(Error::IndexOutOfRange { index: l.generator, len: generators.len() });
            }
        }
        Ok(Self { generators, relators })
    }

    /// Parses relators given as strings.
    pub fn parse(generators: Vec<String>, relators: &[String]) -> Result<Self> {
        let bare = Self::new(generators, Vec::new())?;
        let relators = relators.iter().map(|r| bare.parse_word(r)).collect::<Result<Vec<_>>>()?;
        Self::new(bare.generators, relators)
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.generators.iter().position(|g| g == name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Parses whitespace-separated tokens `name` or `name^-1`; `""` and `"1"`
    /// denote the identity.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            letters.push(Letter { generator: self.generator_index(name)?, inverse });
        }
        Ok(Word { letters })
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.letters
            .iter()
            .map(|l| if l.inverse { format!("{}^-1", self.generators[l.generator]) } else { self.generators[l.generator].clone() })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Formatted word, for error messages and reports.
    pub fn display<'a>(&'a self, w: &'a Word) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Presentation, &'a Word);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_word(self.1))
            }
        }
        D(self, w)
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    generators: Vec<String>,
    #[serde(default)]
    relators: Vec<String>,
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationRepr {
            generators: self.generators.clone(),
            relators: self.relators.iter().map(|r| self.format_word(r)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PresentationRepr::deserialize(d)?;
        Presentation::parse(r.generators, &r.relators).map_err(D::Error::custom)
    }
}

/// Group elements realized as (products of) Lorentz matrices.
pub trait Transformation: Clone + fmt::Debug + Send + Sync {
    type Space: Clone + fmt::Debug;

    fn identity_like(&self) -> Self;
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Largest entry-wise difference of the matrices.
    fn deviation(&self, other: &Self) -> f64;
    /// Largest absolute matrix entry.
    fn magnitude(&self) -> f64;
    /// Operator 2-norm of `M - I`, maximized over factors.
    fn identity_residual(&self) -> f64;
    fn preserves_orientation(&self) -> bool;
    fn act(&self, x: &Self::Space) -> Result<Self::Space>;
    fn space_distance(a: &Self::Space, b: &Self::Space) -> Result<f64>;
    /// Scalar fingerprint used to bucket elements during deduplication.
    fn fingerprint(&self) -> f64;
}

fn operator_norm(m: &Mat<f64>) -> f64 {
    let (vals, _) = m.transpose().mul(m).symmetric_eigen();
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

fn generic_row_dot(m: &Mat<f64>) -> f64 {
    // time coordinate of the image of a fixed generic point
    const KLEIN: [f64; 8] = [0.1234, 0.0567, 0.0311, 0.0173, 0.0097, 0.0053, 0.0029, 0.0016];
    let n = m.cols() - 1;
    let u: Vec<f64> = (0..n).map(|i| KLEIN[i % KLEIN.len()]).collect();
    let s = (1.0 - u.iter().map(|a| a * a).sum::<f64>()).sqrt().recip();
    let mut acc = m[(0, 0)] * s;
    for (i, ui) in u.iter().enumerate() {
        acc += m[(0, i + 1)] * ui * s;
    }
    acc
}

impl Transformation for Isometry<f64> {
    type Space = Point<f64>;

    fn identity_like(&self) -> Self {
        Isometry::identity(self.dim())
    }
    fn compose(&self, other: &Self) -> Self {
        Isometry::compose(self, other)
    }
    fn inverse(&self) -> Self {
        Isometry::inverse(self)
    }
    fn deviation(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.matrix().max_abs_diff(other.matrix())
    }
    fn magnitude(&self) -> f64 {
        self.matrix().max_abs()
    }
    fn identity_residual(&self) -> f64 {
        operator_norm(&self.matrix().sub(&Mat::identity(self.dim() + 1)))
    }
    fn preserves_orientation(&self) -> bool {
        self.orientation_sign() > 0
    }
    fn act(&self, x: &Point<f64>) -> Result<Point<f64>> {
        self.apply_point(x)
    }
    fn space_distance(a: &Point<f64>, b: &Point<f64>) -> Result<f64> {
        distance(a, b)
    }
    fn fingerprint(&self) -> f64 {
        generic_row_dot(self.matrix())
    }
}

impl Transformation for ProductIsometry<f64> {
    type Space = ProductPoint<f64>;

    fn identity_like(&self) -> Self {
        ProductIsometry::identity(&self.dims())
    }
    fn compose(&self, other: &Self) -> Self {
        ProductIsometry::new(self.components().iter().zip(other.components()).map(|(a, b)| a.compose(b)).collect())
    }
    fn inverse(&self) -> Self {
        ProductIsometry::inverse(self)
    }
    fn deviation(&self, other: &Self) -> f64 {
        if self.dims() != other.dims() {
            return f64::INFINITY;
        }
        self.max_abs_diff(other)
    }
    fn magnitude(&self) -> f64 {
        self.components().iter().map(|g| g.matrix().max_abs()).fold(0.0, f64::max)
    }
    fn identity_residual(&self) -> f64 {
        self.components().iter().map(Transformation::identity_residual).fold(0.0, f64::max)
    }
    fn preserves_orientation(&self) -> bool {
        self.components().iter().all(|g| g.orientation_sign() > 0)
    }
    fn act(&self, x: &ProductPoint<f64>) -> Result<ProductPoint<f64>> {
        self.apply_point(x)
    }
    fn space_distance(a: &ProductPoint<f64>, b: &ProductPoint<f64>) -> Result<f64> {
        crate::product::check_dims(&a.dims(), &b.dims())?;
        let mut acc = 0.0;
        for (x, y) in a.components().iter().zip(b.components()) {
            let d = distance(x, y)?;
            acc += d * d;
        }
        Ok(acc.sqrt())
    }
    fn fingerprint(&self) -> f64 {
        self.components().iter().map(|g| generic_row_dot(g.matrix())).sum()
    }
}

/// A homomorphism from a presented group, given on generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<G = Isometry<f64>> {
    presentation: Presentation,
    images: Vec<G>,
}

/// Representation into a product of isometry groups.
pub type ProductRepresentation = Representation<ProductIsometry<f64>>;

/// Per-relator residuals of a representation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub residuals: Vec<(String, f64)>,
    pub orientation_preserving: bool,
    pub valid: bool,
}

impl<G: Transformation> Representation<G> {
    /// Assigns images to generators. Relators are not checked here; see
    /// [`Representation::validate`].
    pub fn new(presentation: Presentation, images: Vec<G>) -> Result<Self> {
        if images.len() != presentation.rank() {
            return Err(Error::DimensionMismatch { expected: presentation.rank(), found: images.len() });
        }
        if images.is_empty() {
            return Err(Error::InvalidParameter("a representation needs at least one generator".into()));
        }
        let reference = images[0].identity_like();
        if images.iter().any(|g| g.identity_like().deviation(&reference) != 0.0) {
            return Err(Error::StructureMismatch("generator images act on different spaces".into()));
        }
        Ok(Self { presentation, images })
    }

    /// Like [`Representation::new`] but fails unless every relator holds.
    pub fn checked(presentation: Presentation, images: Vec<G>) -> Result<Self> {
        let rep = Self::new(presentation, images)?;
        let report = rep.validate();
        if let Some((relator, residual)) = report.residuals.iter().find(|(_, r)| !(*r <= RELATOR_TOL)) {
            return Err(Error::RelatorFailure { relator: relator.clone(), residual: *residual });
        }
        Ok(rep)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn images(&self) -> &[G] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &G {
        &self.images[generator]
    }

    pub fn identity_element(&self) -> G {
        self.images[0].identity_like()
    }

    pub fn with_images(&self, images: Vec<G>) -> Result<Self> {
        Self::new(self.presentation.clone(), images)
    }

    pub fn letter_image(&self, l: Letter) -> G {
        if l.inverse {
            self.images[l.generator].inverse()
        } else {
            self.images[l.generator].clone()
        }
    }

    /// Image of a word. Plain products are used throughout: Lorentzian
    /// Gram-Schmidt on matrices with entries of size `M` is conditioned like
    /// `M^2` and would add more error than it removes.
    pub fn evaluate(&self, w: &Word) -> G {
        let mut g = self.identity_element();
        for &l in &w.letters {
            g = g.compose(&self.letter_image(l));
        }
        g
    }

    /// `rho(w)` for a word given as a string.
    pub fn evaluate_str(&self, w: &str) -> Result<G> {
        Ok(self.evaluate(&self.presentation.parse_word(w)?))
    }

    pub fn validate(&self) -> ValidationReport {
        let residuals: Vec<(String, f64)> = self
            .presentation
            .relators
            .iter()
            .map(|r| (self.presentation.format_word(r), self.evaluate(r).identity_residual()))
            .collect();
        let orientation_preserving = self.images.iter().all(G::preserves_orientation);
        let valid = residuals.iter().all(|(_, r)| *r <= RELATOR_TOL);
        ValidationReport { residuals, orientation_preserving, valid }
    }

    /// `g rho g^{-1}`.
    pub fn conjugated(&self, g: &G) -> Self {
        let gi = g.inverse();
        let images = self.images.iter().map(|a| g.compose(a).compose(&gi)).collect();
        Self { presentation: self.presentation.clone(), images }
    }
}

impl<G: Transformation + Serialize> Serialize for Representation<G> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Images<'a, G>(&'a Presentation, &'a [G]);
        impl<G: Serialize> Serialize for Images<'_, G> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.1.len()))?;
                for (name, g) in self.0.generators.iter().zip(self.1) {
                    m.serialize_entry(name, g)?;
                }
                m.end()
            }
        }
        #[derive(Serialize)]
        struct Repr<'a, G: Serialize> {
            generators: &'a [String],
            relators: Vec<String>,
            images: Images<'a, G>,
        }
        Repr {
            generators: &self.presentation.generators,
            relators: self.presentation.relators.iter().map(|r| self.presentation.format_word(r)).collect(),
            images: Images(&self.presentation, &self.images),
        }
        .serialize(s)
    }
}

impl<'de, G: Transformation + Deserialize<'de>> Deserialize<'de> for Representation<G> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "G: Deserialize<'de>")]
        struct Repr<G> {
            generators: Vec<String>,
            #[serde(default)]
            relators: Vec<String>,
            images: BTreeMap<String, G>,
        }
        let mut r = Repr::<G>::deserialize(d)?;
        let presentation = Presentation::parse(r.generators, &r.relators).map_err(D::Error::custom)?;
        let mut images = Vec::with_capacity(presentation.rank());
        for g in presentation.generators() {
            images.push(r.images.remove(g).ok_or_else(|| D::Error::custom(format!("no image for generator `{g}`")))?);
        }
        if let Some(extra) = r.images.keys().next() {
            return Err(D::Error::custom(Error::UnknownGenerator(extra.clone())));
        }
        Representation::new(presentation, images).map_err(D::Error::custom)
    }
}

/// One deduplicated group element with a shortest word found for it.
#[derive(Clone, Debug)]
pub struct BallElement<G> {
    pub word: Word,
    pub element: G,
}

/// Deduplicated images of all words of length at most `radius`.
#[derive(Clone, Debug)]
pub struct OrbitBall<G> {
    pub radius: usize,
    pub elements: Vec<BallElement<G>>,
}

impl<G> OrbitBall<G> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Fingerprint-bucketed set of matrices for near-duplicate detection.
pub(crate) struct DedupIndex<G> {
    buckets: BTreeMap<i64, Vec<usize>>,
    items: Vec<G>,
}

impl<G: Transformation> DedupIndex<G> {
    pub(crate) fn new() -> Self {
        Self { buckets: BTreeMap::new(), items: Vec::new() }
    }

    fn bucket(f: f64) -> i64 {
        // logarithmic buckets keep the relative width constant for large entries
        let g = if f.abs() <= 1.0 { f } else { f.signum() * (1.0 + f.abs().ln()) };
        (g / 1e-4).floor() as i64
    }

    pub(crate) fn find(&self, g: &G) -> Option<usize> {
        let f = g.fingerprint();
        let b = Self::bucket(f);
        let tol = DEDUP_TOL * g.magnitude().max(1.0);
        for key in [b - 1, b, b + 1] {
            if let Some(ids) = self.buckets.get(&key) {
                for &i in ids {
                    if self.items[i].deviation(g) < tol {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    pub(crate) fn insert(&mut self, g: G) -> usize {
        let b = Self::bucket(g.fingerprint());
        let id = self.items.len();
        self.items.push(g);
        self.buckets.entry(b).or_default().push(id);
        id
    }
}

fn letters(rank: usize) -> Vec<Letter> {
    (0..rank).flat_map(|g| [Letter { generator: g, inverse: false }, Letter { generator: g, inverse: true }]).collect()
}

/// All reduced words of length `<= radius`, deduplicated by matrix distance.
pub fn enumerate_ball<G: Transformation>(rep: &Representation<G>, radius: usize, cap: usize) -> Result<OrbitBall<G>> {
    let alphabet = letters(rep.presentation.rank());
    let letter_images: Vec<G> = alphabet.iter().map(|&l| rep.letter_image(l)).collect();
    let mut index = DedupIndex::new();
    let mut elements = vec![BallElement { word: Word::identity(), element: rep.identity_element() }];
    index.insert(rep.identity_element());
    let mut frontier: Vec<usize> = vec![0];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &id in &frontier {
            let (word, g) = (elements[id].word.clone(), elements[id].element.clone());
            for (l, img) in alphabet.iter().zip(&letter_images) {
                if word.letters.last() == Some(&l.inverted()) {
                    continue;
                }
                let h = g.compose(img);
                if index.find(&h).is_some() {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::BallCapExceeded { cap });
                }
                index.insert(h.clone());
                let mut w = word.letters.clone();
                w.push(*l);
                elements.push(BallElement { word: Word::new(w), element: h });
                next.push(elements.len() - 1);
            }
        }
        frontier = next;
    }
    Ok(OrbitBall { radius, elements })
}

/// Group element together with the displacement `d(O, gO)`.
#[derive(Clone, Debug)]
pub struct OrbitElement<G> {
    pub word: Word,
    pub element: G,
    pub distance: f64,
}

/// Elements `g` with `d(base, g base) <= radius`, found by breadth-first
/// search restricted to displacements below `radius + slack`. With `slack`
/// at least the diameter of a fundamental domain containing `base`, every
/// such element is reached. `None` uses the largest generator displacement,
/// which covers Dirichlet domains whose side pairings are the generators.
pub fn enumerate_orbit<G: Transformation>(
    rep: &Representation<G>,
    base: &G::Space,
    radius: f64,
    slack: Option<f64>,
    cap: usize,
) -> Result<Vec<OrbitElement<G>>> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("orbit radius must be nonnegative, got {radius}")));
    }
    let alphabet = letters(rep.presentation.rank());
    let letter_images: Vec<G> = alphabet.iter().map(|&l| rep.letter_image(l)).collect();
    let slack = match slack {
        Some(s) => s,
        None => {
            let mut m: f64 = 0.0;
            for g in &letter_images {
                m = m.max(G::space_distance(base, &g.act(base)?)?);
            }
            m
        }
    };
    let limit = radius + slack;
    let mut index = DedupIndex::new();
    let id = rep.identity_element();
    index.insert(id.clone());
    let mut all = vec![OrbitElement { word: Word::identity(), element: id, distance: 0.0 }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (word, g) = (all[k].word.clone(), all[k].element.clone());
        for (l, img) in alphabet.iter().zip(&letter_images) {
            if word.letters.last() == Some(&l.inverted()) {
                continue;
            }
            let h = g.compose(img);
            let d = G::space_distance(base, &h.act(base)?)?;
            if d > limit || index.find(&h).is_some() {
                continue;
            }
            if all.len() >= cap {
                return Err(Error::BallCapExceeded { cap });
            }
            index.insert(h.clone());
            let mut w = word.letters.clone();
            w.push(*l);
            all.push(OrbitElement { word: Word::new(w), element: h, distance: d });
            queue.push_back(all.len() - 1);
        }
    }
    all.retain(|e| e.distance <= radius);
    Ok(all)
}

/// Growth rate of `#{g : d(O, gO) <= R}`: the least-squares slope of
/// `log N(R)` against `R` on a uniform grid from the smallest nonzero
/// displacement up to `r_max`.
pub fn entropy_estimate<G: Transformation>(rep: &Representation<G>, base: &G::Space, r_max: f64) -> Result<f64> {
    let identity = rep.identity_element();
    if rep.images.iter().all(|g| g.deviation(&identity) < DEDUP_TOL) {
        return Ok(0.0);
    }
    let orbit = enumerate_orbit(rep, base, r_max, None, DEFAULT_BALL_CAP)?;
    let mut d: Vec<f64> = orbit.iter().map(|e| e.distance).collect();
    d.sort_by(f64::total_cmp);
    let r_lo = match d.iter().find(|&&x| x > 1e-9) {
        Some(&r) if r < r_max => r,
        _ => return Err(Error::TooFewOrbitPoints { found: d.len() }),
    };
    let samples = 64;
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for k in 0..samples {
        let r = r_lo + (r_max - r_lo) * k as f64 / (samples - 1) as f64;
        let count = d.partition_point(|&x| x <= r);
        xs.push(r);
        ys.push((count as f64).ln());
    }
    if d.len() < 3 {
        return Err(Error::TooFewOrbitPoints { found: d.len() });
    }
    let mx = xs.iter().sum::<f64>() / samples as f64;
    let my = ys.iter().sum::<f64>() / samples as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
