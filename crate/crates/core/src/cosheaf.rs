//! Copresheaves and cosheaves of finite sets over a [`FiniteSpace`].
//!
//! Component elements are opaque local indices `0..|X_V|`. Extension maps
//! `R^W_V: X_W -> X_V` are stored for every pair `W ⊆ V` as index tables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use indexmap::IndexMap;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters;
use crate::space::{FiniteSpace, OpenId, SpaceError, SpaceFile};

/// Unvalidated copresheaf data. Negative fixtures are built at this level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCopresheaf {
    pub space: FiniteSpace,
    /// `sizes[V]` is `|X_V|`.
    pub sizes: Vec<usize>,
    /// `(W, V) -> R^W_V` as an index table of length `|X_W|`.
    pub extensions: BTreeMap<(OpenId, OpenId), Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CopresheafError {
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("extension {0} -> {1} given, but {0} is not contained in {1}")]
    UnexpectedExtension(OpenId, OpenId),
    #[error("extension map {0} -> {1} is missing or malformed")]
    MissingExtension(OpenId, OpenId),
    #[error("extension map {0} -> {0} is not the identity")]
    IdentityLawViolated(OpenId),
    #[error("R({w}->{v}) . R({u}->{w}) differs from R({u}->{v}) at element {element} of X{u}")]
    CompositionLawViolated { u: OpenId, w: OpenId, v: OpenId, element: usize },
}

/// A copresheaf whose identity and composition laws have been verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Copresheaf {
    space: FiniteSpace,
    sizes: Vec<usize>,
    // dense table indexed by w * num_opens + v; Some exactly when W ⊆ V
    extensions: Vec<Option<Vec<usize>>>,
}

pub fn validate_copresheaf(raw: RawCopresheaf) -> Result<Copresheaf, CopresheafError> {
    let space = raw.space;
    let k = space.num_opens();
    if raw.sizes.len() != k {
        return Err(CopresheafError::ComponentCount { expected: k, found: raw.sizes.len() });
    }
    let mut extensions = vec![None; k * k];
    for ((w, v), table) in raw.extensions {
        if w.0 >= k || v.0 >= k {
            return Err(CopresheafError::MissingExtension(w, v));
        }
        if !space.is_sub_open(w, v) {
            return Err(CopresheafError::UnexpectedExtension(w, v));
        }
        extensions[w.0 * k + v.0] = Some(table);
    }
    for v in space.open_ids() {
        for &w in space.open_sublattice(v) {
            match &extensions[w.0 * k + v.0] {
                Some(t) if t.len() == raw.sizes[w.0] && t.iter().all(|&y| y < raw.sizes[v.0]) => {}
                _ => return Err(CopresheafError::MissingExtension(w, v)),
            }
        }
    }
    let x = Copresheaf { space, sizes: raw.sizes, extensions };
    for v in x.space.open_ids() {
        if x.extension(v, v).iter().enumerate().any(|(i, &y)| i != y) {
            return Err(CopresheafError::IdentityLawViolated(v));
        }
    }
    for v in x.space.open_ids() {
        for &w in x.space.open_sublattice(v) {
            for &u in x.space.open_sublattice(w) {
                let (uw, wv, uv) = (x.extension(u, w), x.extension(w, v), x.extension(u, v));
                if let Some(element) = (0..uw.len()).find(|&a| wv[uw[a]] != uv[a]) {
                    return Err(CopresheafError::CompositionLawViolated { u, w, v, element });
                }
            }
        }
    }
    Ok(x)
}

impl Copresheaf {
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn size(&self, v: OpenId) -> usize {
        self.sizes[v.0]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `R^W_V`. Panics unless `W ⊆ V`.
    pub fn extension(&self, w: OpenId, v: OpenId) -> &[usize] {
        self.extensions[w.0 * self.space.num_opens() + v.0]
            .as_deref()
            .unwrap_or_else(|| panic!("no extension {w} -> {v}: not a sub-open"))
    }

    /// `Im R^W_V` as a membership mask over `X_V`.
    pub fn image_mask(&self, w: OpenId, v: OpenId) -> Vec<bool> {
        let mut mask = vec![false; self.size(v)];
        for &y in self.extension(w, v) {
            mask[y] = true;
        }
        mask
    }

    pub fn in_image(&self, w: OpenId, v: OpenId, y: usize) -> bool {
        self.extension(w, v).contains(&y)
    }

    pub fn to_raw(&self) -> RawCopresheaf {
        let mut extensions = BTreeMap::new();
        for v in self.space.open_ids() {
            for &w in self.space.open_sublattice(v) {
                extensions.insert((w, v), self.extension(w, v).to_vec());
            }
        }
        RawCopresheaf { space: self.space.clone(), sizes: self.sizes.clone(), extensions }
    }

    pub fn to_file(&self) -> CosheafFile {
        self.to_raw().to_file()
    }
}

/// Witness that some `R^W_V` is not injective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FadednessWitness {
    pub w: OpenId,
    pub v: OpenId,
    pub first: usize,
    pub second: usize,
    pub image: usize,
}

impl fmt::Display for FadednessWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R({}->{}) sends elements {} and {} to {}",
            self.w, self.v, self.first, self.second, self.image
        )
    }
}

pub fn fadedness_witness(x: &Copresheaf) -> Option<FadednessWitness> {
    for v in x.space.open_ids() {
        for &w in x.space.open_sublattice(v) {
            let mut seen = vec![None; x.size(v)];
            for (a, &y) in x.extension(w, v).iter().enumerate() {
                if let Some(first) = seen[y] {
                    return Some(FadednessWitness { w, v, first, second: a, image: y });
                }
                seen[y] = Some(a);
            }
        }
    }
    None
}

pub fn is_faded(x: &Copresheaf) -> bool {
    fadedness_witness(x).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageClause {
    /// `∪ Im R^W_V` over the family versus `Im R^{∪family}_V`.
    Union { family: Vec<OpenId> },
    /// `Im R^U_V ∩ Im R^W_V` versus `Im R^{U∩W}_V`.
    Intersection { u: OpenId, w: OpenId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageViolation {
    pub v: OpenId,
    pub clause: ImageClause,
    /// Whether the joined opens cover `V` (the case that holds for every cosheaf).
    pub covering: bool,
    /// Elements of `X_V` on which the two sides disagree.
    pub elements: Vec<usize>,
}

impl fmt::Display for ImageViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = |ids: &[OpenId]| ids.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        match &self.clause {
            ImageClause::Union { family } => {
                write!(f, "union clause fails over {} for family [{}]", self.v, sp(family))?
            }
            ImageClause::Intersection { u, w } => {
                write!(f, "intersection clause fails over {} for {u} and {w}", self.v)?
            }
        }
        write!(f, "; disagreeing elements {:?}", self.elements)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImageReport {
    pub violations: Vec<ImageViolation>,
}

impl ImageReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations of the clauses restricted to families covering `V`.
    pub fn covering_violations(&self) -> impl Iterator<Item = &ImageViolation> {
        self.violations.iter().filter(|v| v.covering)
    }
}

/// Families of `O(V)` are scanned exhaustively up to this sublattice size.
pub const IMAGE_EXHAUSTIVE_LIMIT: usize = 8;

fn mask_diff(a: &[bool], b: &[bool]) -> Vec<usize> {
    a.iter().zip(b).enumerate().filter(|(_, (x, y))| x != y).map(|(i, _)| i).collect()
}

/// Checks both image identities for every open `V`.
///
/// The union identity is checked for every family of `O(V)` when
/// `|O(V)| <= IMAGE_EXHAUSTIVE_LIMIT`; above that only the empty family,
/// all pairs, and the full family are checked.
pub fn check_image_identities(x: &Copresheaf) -> ImageReport {
    let space = &x.space;
    let mut violations = Vec::new();
    for v in space.open_ids() {
        let sub = space.open_sublattice(v);
        let images: BTreeMap<OpenId, Vec<bool>> =
            sub.iter().map(|&w| (w, x.image_mask(w, v))).collect();

        let families: Vec<Vec<OpenId>> = if sub.len() <= IMAGE_EXHAUSTIVE_LIMIT {
            (0u32..1 << sub.len())
                .map(|m| sub.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &w)| w).collect())
                .collect()
        } else {
            let mut fs = vec![Vec::new(), sub.to_vec()];
            for (i, &a) in sub.iter().enumerate() {
                for &b in &sub[i + 1..] {
                    fs.push(vec![a, b]);
                }
            }
            fs
        };
        for family in families {
            let mut lhs = vec![false; x.size(v)];
            for w in &family {
                for (l, &r) in lhs.iter_mut().zip(&images[w]) {
                    *l |= r;
                }
            }
            let joined = space.join(&family);
            let elements = mask_diff(&lhs, &images[&joined]);
            if !elements.is_empty() {
                violations.push(ImageViolation {
                    v,
                    covering: joined == v,
                    clause: ImageClause::Union { family },
                    elements,
                });
            }
        }
        for (i, &u) in sub.iter().enumerate() {
            for &w in &sub[i + 1..] {
                let lhs: Vec<bool> = images[&u].iter().zip(&images[&w]).map(|(a, b)| *a && *b).collect();
                let meet = space.intersection(u, w);
                let elements = mask_diff(&lhs, &images[&meet]);
                if !elements.is_empty() {
                    violations.push(ImageViolation {
                        v,
                        covering: space.union(u, w) == v,
                        clause: ImageClause::Intersection { u, w },
                        elements,
                    });
                }
            }
        }
    }
    ImageReport { violations }
}

/// The colimit of `X` restricted to a cover, as a union-find labeling of
/// the disjoint union `⊔_{W ∈ cover} X_W`.
#[derive(Debug, Clone)]
pub struct CoverColimit {
    pub cover: Vec<OpenId>,
    /// Start of each cover member's block in the disjoint union.
    pub offsets: Vec<usize>,
    /// Class label of every slot of the disjoint union, in `0..num_classes`.
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl CoverColimit {
    pub fn class_of(&self, member: usize, element: usize) -> usize {
        self.labels[self.offsets[member] + element]
    }
}

/// Disjoint union of the cover's components modulo
/// `R^{W∩U}_W(a) ~ R^{W∩U}_U(a)` for all pairs `W, U` and all `a`.
pub fn cover_colimit(x: &Copresheaf, cover: &[OpenId]) -> CoverColimit {
    let space = &x.space;
    let mut offsets = Vec::with_capacity(cover.len());
    let mut total = 0;
    for &w in cover {
        offsets.push(total);
        total += x.size(w);
    }
    let mut uf = UnionFind::<usize>::new(total);
    for (i, &w) in cover.iter().enumerate() {
        for (j, &u) in cover.iter().enumerate().skip(i + 1) {
            let meet = space.intersection(w, u);
            let (into_w, into_u) = (x.extension(meet, w), x.extension(meet, u));
            for a in 0..x.size(meet) {
                uf.union(offsets[i] + into_w[a], offsets[j] + into_u[a]);
            }
        }
    }
    let roots = uf.into_labeling();
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    let labels = roots
        .iter()
        .map(|r| {
            let next = relabel.len();
            *relabel.entry(*r).or_insert(next)
        })
        .collect();
    CoverColimit { cover: cover.to_vec(), offsets, labels, num_classes: relabel.len() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GluingFailure {
    /// Two slots of one class reach different elements of `X_V`.
    NotWellDefined { element_a: usize, element_b: usize },
    /// An element of `X_V` not reached from any cover member.
    NotSurjective { element: usize },
    /// Two distinct classes reach the same element of `X_V`.
    NotInjective { element: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingWitness {
    pub v: OpenId,
    pub cover: Vec<OpenId>,
    pub failure: GluingFailure,
}

impl fmt::Display for GluingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cover = self.cover.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "cover [{cover}] of {}: ", self.v)?;
        match self.failure {
            GluingFailure::NotWellDefined { element_a, element_b } => {
                write!(f, "one class reaches both {element_a} and {element_b}")
            }
            GluingFailure::NotSurjective { element } => {
                write!(f, "element {element} is not glued from the cover")
            }
            GluingFailure::NotInjective { element } => {
                write!(f, "element {element} is reached from two distinct classes")
            }
        }
    }
}

/// Checks that the canonical map `colim -> X_V` is a bijection for one cover of `V`.
pub fn gluing_witness_for_cover(
    x: &Copresheaf,
    v: OpenId,
    cover: &[OpenId],
) -> Option<GluingWitness> {
    let colim = cover_colimit(x, cover);
    let witness = |failure| Some(GluingWitness { v, cover: cover.to_vec(), failure });
    let mut class_target: Vec<Option<usize>> = vec![None; colim.num_classes];
    for (i, &w) in cover.iter().enumerate() {
        for (a, &y) in x.extension(w, v).iter().enumerate() {
            let c = colim.class_of(i, a);
            match class_target[c] {
                Some(prev) if prev != y => {
                    return witness(GluingFailure::NotWellDefined { element_a: prev, element_b: y })
                }
                _ => class_target[c] = Some(y),
            }
        }
    }
    let mut hits = vec![0usize; x.size(v)];
    for y in class_target.into_iter().flatten() {
        hits[y] += 1;
    }
    if let Some(element) = hits.iter().position(|&h| h == 0) {
        return witness(GluingFailure::NotSurjective { element });
    }
    if let Some(element) = hits.iter().position(|&h| h > 1) {
        return witness(GluingFailure::NotInjective { element });
    }
    None
}

/// The only cover of `V` that needs checking: its maximal proper sub-opens,
/// provided they cover `V`. `None` when `V` has no cover avoiding `V` itself.
pub fn maximal_cover(space: &FiniteSpace, v: OpenId) -> Option<Vec<OpenId>> {
    let maximal = space.maximal_proper_sub_opens(v);
    (space.join(&maximal) == v).then_some(maximal)
}

/// Gluing check over the cover of each `V` by its maximal proper sub-opens.
///
/// A cover containing `V` always glues, and any other cover of `V` refines
/// into the maximal one, so these are the only covers that can fail
/// (`check_cosheaf_gluing_all_covers` scans every cover for comparison).
pub fn check_cosheaf_gluing(x: &Copresheaf) -> Result<(), GluingWitness> {
    for v in x.space.open_ids() {
        if let Some(cover) = maximal_cover(&x.space, v) {
            if let Some(w) = gluing_witness_for_cover(x, v, &cover) {
                return Err(w);
            }
        }
    }
    Ok(())
}

/// Every family of `O(V)` whose union is `V`, for every `V`. Exponential in
/// `|O(V)|`; meant for small spaces.
pub fn all_covers(space: &FiniteSpace, v: OpenId) -> Vec<Vec<OpenId>> {
    let sub = space.open_sublattice(v);
    (0u64..1 << sub.len())
        .map(|m| {
            sub.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &w)| w).collect::<Vec<_>>()
        })
        .filter(|family| space.join(family) == v)
        .collect()
}

pub fn check_cosheaf_gluing_all_covers(x: &Copresheaf) -> Result<(), GluingWitness> {
    for v in x.space.open_ids() {
        for cover in all_covers(&x.space, v) {
            if let Some(w) = gluing_witness_for_cover(x, v, &cover) {
                return Err(w);
            }
        }
    }
    Ok(())
}

/// The checks a candidate cosheaf goes through, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Copresheaf,
    Faded,
    Gluing,
    ImageIdentities,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Copresheaf => "copresheaf laws",
            Check::Faded => "faded",
            Check::Gluing => "gluing",
            Check::ImageIdentities => "image identities",
        })
    }
}

/// Outcome of every check on raw data. The later checks only run when the
/// copresheaf laws hold; they run independently of each other.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub copresheaf: Result<Copresheaf, CopresheafError>,
    pub faded: Option<Option<FadednessWitness>>,
    pub gluing: Option<Result<(), GluingWitness>>,
    pub images: Option<ImageReport>,
}

impl CheckReport {
    pub fn passed(&self, check: Check) -> Option<bool> {
        match check {
            Check::Copresheaf => Some(self.copresheaf.is_ok()),
            Check::Faded => self.faded.as_ref().map(|w| w.is_none()),
            Check::Gluing => self.gluing.as_ref().map(|r| r.is_ok()),
            Check::ImageIdentities => self.images.as_ref().map(|r| r.holds()),
        }
    }

    /// The first check, in pipeline order, that fails.
    pub fn first_failure(&self) -> Option<Check> {
        [Check::Copresheaf, Check::Faded, Check::Gluing, Check::ImageIdentities]
            .into_iter()
            .find(|&c| self.passed(c) == Some(false))
    }
}

pub fn run_checks(raw: RawCopresheaf) -> CheckReport {
    let copresheaf = validate_copresheaf(raw);
    let (faded, gluing, images) = match &copresheaf {
        Ok(x) => (Some(fadedness_witness(x)), Some(check_cosheaf_gluing(x)), Some(check_image_identities(x))),
        Err(_) => (None, None, None),
    };
    CheckReport { copresheaf, faded, gluing, images }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosheafError {
    #[error("not faded: {0}")]
    NotFaded(FadednessWitness),
    #[error("not a cosheaf: {0}")]
    NotCosheaf(GluingWitness),
}

impl std::error::Error for FadednessWitness {}
impl std::error::Error for GluingWitness {}

/// A copresheaf known to be faded and to satisfy gluing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FadedCosheaf(Copresheaf);

impl FadedCosheaf {
    pub fn new(x: Copresheaf) -> Result<Self, CosheafError> {
        if let Some(w) = fadedness_witness(&x) {
            return Err(CosheafError::NotFaded(w));
        }
        check_cosheaf_gluing(&x).map_err(CosheafError::NotCosheaf)?;
        Ok(FadedCosheaf(x))
    }

    pub fn into_inner(self) -> Copresheaf {
        self.0
    }
}

impl Deref for FadedCosheaf {
    type Target = Copresheaf;

    fn deref(&self) -> &Copresheaf {
        &self.0
    }
}

/// `A_V(x) = { W ∈ O(V) : x ∈ Im R^W_V }`.
pub fn support_family(x: &FadedCosheaf, v: OpenId, element: usize) -> Vec<OpenId> {
    let family: Vec<OpenId> = x
        .space()
        .open_sublattice(v)
        .iter()
        .copied()
        .filter(|&w| x.in_image(w, v, element))
        .collect();
    debug_assert!(filters::is_completely_prime(x.space(), v, &family));
    family
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SupportError {
    #[error("base space is not sober")]
    NotSober,
    #[error("support family of element {element} over {v} is not completely prime")]
    NotCompletelyPrime { v: OpenId, element: usize },
    #[error("no point of {v} has the support family of element {element}")]
    NoMatchingPoint { v: OpenId, element: usize },
    #[error("several points of {v} share the support family of element {element}")]
    AmbiguousSupport { v: OpenId, element: usize },
    #[error("supports are not natural for R({w}->{v}) at element {element}")]
    NotNatural { w: OpenId, v: OpenId, element: usize },
}

/// The unique `b ∈ V` whose neighborhood filter in `O(V)` equals `family`.
pub fn point_for_family(
    space: &FiniteSpace,
    v: OpenId,
    family: &[OpenId],
) -> Result<usize, Vec<usize>> {
    let matches: Vec<usize> = space
        .open(v)
        .iter()
        .filter(|&b| space.neighborhood_filter(b, v).map(|n| n == family).unwrap_or(false))
        .collect();
    match matches.as_slice() {
        [b] => Ok(*b),
        _ => Err(matches),
    }
}

fn support_point_unchecked(x: &FadedCosheaf, v: OpenId, element: usize) -> Result<usize, SupportError> {
    let family = support_family(x, v, element);
    if !filters::is_completely_prime(x.space(), v, &family) {
        return Err(SupportError::NotCompletelyPrime { v, element });
    }
    point_for_family(x.space(), v, &family).map_err(|m| {
        if m.is_empty() {
            SupportError::NoMatchingPoint { v, element }
        } else {
            SupportError::AmbiguousSupport { v, element }
        }
    })
}

/// `Supp(x, V)`: the point whose neighborhoods in `V` are exactly the opens
/// through whose image `x` passes.
pub fn support_point(x: &FadedCosheaf, v: OpenId, element: usize) -> Result<usize, SupportError> {
    if !filters::is_sober(x.space()).sober {
        return Err(SupportError::NotSober);
    }
    support_point_unchecked(x, v, element)
}

/// `Supp(·, V)` for every open `V`, computed once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMap {
    supports: Vec<Vec<usize>>,
}

impl SupportMap {
    pub fn compute(x: &FadedCosheaf) -> Result<Self, SupportError> {
        if !filters::is_sober(x.space()).sober {
            return Err(SupportError::NotSober);
        }
        let supports = x
            .space()
            .open_ids()
            .map(|v| (0..x.size(v)).map(|e| support_point_unchecked(x, v, e)).collect())
            .collect::<Result<_, _>>()?;
        Ok(SupportMap { supports })
    }

    pub fn get(&self, v: OpenId, element: usize) -> usize {
        self.supports[v.0][element]
    }

    pub fn component(&self, v: OpenId) -> &[usize] {
        &self.supports[v.0]
    }
}

/// `Supp(·, V) ∘ R^W_V = j^W_V ∘ Supp(·, W)` for all `W ⊆ V`.
pub fn check_support_naturality(x: &FadedCosheaf) -> Result<(), SupportError> {
    let supports = SupportMap::compute(x)?;
    for v in x.space().open_ids() {
        for &w in x.space().open_sublattice(v) {
            for (element, &y) in x.extension(w, v).iter().enumerate() {
                if supports.get(v, y) != supports.get(w, element) {
                    return Err(SupportError::NotNatural { w, v, element });
                }
            }
        }
    }
    Ok(())
}

/// Per-open functions `φ_V: X_V -> Y_V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosheafMorphism {
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("source and target live over different spaces")]
    SpaceMismatch,
    #[error("component over {0} has the wrong domain or codomain")]
    Shape(OpenId),
    #[error("naturality fails for {w} -> {v} at element {element}")]
    NotNatural { w: OpenId, v: OpenId, element: usize },
}

impl CosheafMorphism {
    pub fn identity(x: &Copresheaf) -> Self {
        CosheafMorphism { components: x.sizes().iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn component(&self, v: OpenId) -> &[usize] {
        &self.components[v.0]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CosheafMorphism) -> CosheafMorphism {
        CosheafMorphism {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(f, g)| f.iter().map(|&a| g[a]).collect())
                .collect(),
        }
    }

    /// Shape and naturality `φ_V ∘ R^W_V = T^W_V ∘ φ_W`.
    pub fn verify(&self, source: &Copresheaf, target: &Copresheaf) -> Result<(), MorphismError> {
        if source.space() != target.space() {
            return Err(MorphismError::SpaceMismatch);
        }
        let space = source.space();
        if self.components.len() != space.num_opens() {
            return Err(MorphismError::Shape(OpenId(self.components.len().min(space.num_opens()))));
        }
        for v in space.open_ids() {
            let c = self.component(v);
            if c.len() != source.size(v) || c.iter().any(|&y| y >= target.size(v)) {
                return Err(MorphismError::Shape(v));
            }
        }
        for v in space.open_ids() {
            for &w in space.open_sublattice(v) {
                let (r, t) = (source.extension(w, v), target.extension(w, v));
                let (pw, pv) = (self.component(w), self.component(v));
                if let Some(element) = (0..source.size(w)).find(|&a| pv[r[a]] != t[pw[a]]) {
                    return Err(MorphismError::NotNatural { w, v, element });
                }
            }
        }
        Ok(())
    }
}

/// On-disk form: `{"space": ..., "components": {"i": size}, "extensions": {"w,v": [..]}}`.
/// Open indices are positions in the embedded space's `opens` list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosheafFile {
    pub space: SpaceFile,
    pub components: IndexMap<String, usize>,
    pub extensions: IndexMap<String, Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum CosheafFileError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("bad open index key {0:?}")]
    BadKey(String),
    #[error(transparent)]
    Copresheaf(#[from] CopresheafError),
}

impl RawCopresheaf {
    pub fn to_file(&self) -> CosheafFile {
        CosheafFile {
            space: self.space.to_file(),
            components: self.sizes.iter().enumerate().map(|(i, &n)| (i.to_string(), n)).collect(),
            extensions: self
                .extensions
                .iter()
                .map(|((w, v), t)| (format!("{},{}", w.0, v.0), t.clone()))
                .collect(),
        }
    }
}

impl CosheafFile {
    pub fn to_raw(&self) -> Result<RawCopresheaf, CosheafFileError> {
        let space = self.space.validate()?;
        let ids = self.space.position_map(&space)?;
        let lookup = |key: &str| -> Result<OpenId, CosheafFileError> {
            key.trim()
                .parse::<usize>()
                .ok()
                .and_then(|i| ids.get(i).copied())
                .ok_or_else(|| CosheafFileError::BadKey(key.to_string()))
        };
        let mut sizes = vec![0; space.num_opens()];
        for (k, &n) in &self.components {
            sizes[lookup(k)?.0] = n;
        }
        let mut extensions = BTreeMap::new();
        for (k, table) in &self.extensions {
            let (w, v) = k.split_once(',').ok_or_else(|| CosheafFileError::BadKey(k.clone()))?;
            extensions.insert((lookup(w)?, lookup(v)?), table.clone());
        }
        Ok(RawCopresheaf { space, sizes, extensions })
    }

    pub fn to_copresheaf(&self) -> Result<Copresheaf, CosheafFileError> {
        Ok(validate_copresheaf(self.to_raw()?)?)
    }
}

/// The collapse example: over `∅, {1}, {2}, {1,2}, T` on three points,
/// `X_{1} = {x}`, `X_{2} = {y}`, `X_{1,2} = {x, y}`, `X_T = {z}`.
/// A cosheaf, but not faded.
pub fn collapse_example() -> Copresheaf {
    let space = crate::space::validate_topology(3, &[vec![], vec![1], vec![2], vec![1, 2], vec![0, 1, 2]])
        .expect("valid topology");
    let id = |s: &[usize]| space.open_id(s.iter().copied().collect()).unwrap();
    let (e, a, b, ab, t) = (id(&[]), id(&[1]), id(&[2]), id(&[1, 2]), id(&[0, 1, 2]));
    let mut sizes = vec![0; space.num_opens()];
    sizes[a.0] = 1;
    sizes[b.0] = 1;
    sizes[ab.0] = 2;
    sizes[t.0] = 1;
    let mut ext = BTreeMap::new();
    for v in [e, a, b, ab, t] {
        ext.insert((v, v), (0..sizes[v.0]).collect());
        ext.insert((e, v), vec![]);
    }
    ext.insert((a, ab), vec![0]);
    ext.insert((b, ab), vec![1]);
    ext.insert((a, t), vec![0]);
    ext.insert((b, t), vec![0]);
    ext.insert((ab, t), vec![0, 0]);
    validate_copresheaf(RawCopresheaf { space, sizes, extensions: ext }).expect("valid copresheaf")
}
