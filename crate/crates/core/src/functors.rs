//! The tube-cosheaf functor `CS`, its left inverse `L` built from supports,
//! the counit isomorphism `X ≅ CS(L(X))`, and the representability test.
//!
//! `CS(f)` stores each `X_V` as the literal ascending list `tube(f, V)`, so
//! `X_T` is the carrier itself in order. That is what makes `L(CS(f)) = f`
//! hold on the nose rather than up to relabeling.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cosheaf::{
    self, Copresheaf, CosheafError, CosheafMorphism, FadedCosheaf, MorphismError, RawCopresheaf,
    SupportError, SupportMap,
};
use crate::filters;
use crate::space::OpenId;
use crate::tubewise::{self, FiberedSet, TubeCondition, TubewiseError, TubewiseWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("base space is not sober")]
    NotSober,
    #[error("base space is not T0")]
    NotT0,
    #[error("morphism is not tubewise: {0}")]
    NotTubewise(TubewiseWitness),
    #[error(transparent)]
    Tubewise(#[from] TubewiseError),
    #[error("not a natural transformation: {0}")]
    NotNatural(#[from] MorphismError),
    #[error(transparent)]
    Support(SupportError),
    #[error(transparent)]
    Cosheaf(#[from] CosheafError),
    #[error("element {element} of X{v} extends outside the tube over {v}")]
    OutsideTube { v: OpenId, element: usize },
    #[error("component map over {0} is not a bijection onto the tube")]
    NotBijective(OpenId),
    #[error("top component of the counit is not the identity")]
    TopNotIdentity,
}

impl From<SupportError> for FunctorError {
    fn from(e: SupportError) -> Self {
        match e {
            SupportError::NotSober => FunctorError::NotSober,
            other => FunctorError::Support(other),
        }
    }
}

fn position(sorted: &[usize], x: usize) -> Option<usize> {
    sorted.binary_search(&x).ok()
}

fn tubes(f: &FiberedSet) -> Vec<Vec<usize>> {
    f.base().opens().iter().map(|&v| f.tube(v)).collect()
}

pub fn cs_raw(f: &FiberedSet) -> RawCopresheaf {
    let space = f.base().clone();
    let tubes = tubes(f);
    let mut extensions = BTreeMap::new();
    for v in space.open_ids() {
        for &w in space.open_sublattice(v) {
            let table = tubes[w.0]
                .iter()
                .map(|&x| position(&tubes[v.0], x).expect("tubes grow with the open"))
                .collect();
            extensions.insert((w, v), table);
        }
    }
    let sizes = tubes.iter().map(Vec::len).collect();
    RawCopresheaf { space, sizes, extensions }
}

/// `CS(f)`: `V ↦ tube(f, V)` with inclusions.
pub fn cs_object(f: &FiberedSet) -> Copresheaf {
    cosheaf::validate_copresheaf(cs_raw(f)).expect("inclusions of tubes compose")
}

/// `CS(φ)`: the restrictions `tube f V -> tube g V` of a tubewise `φ`.
pub fn cs_morphism(phi: &[usize], f: &FiberedSet, g: &FiberedSet) -> Result<CosheafMorphism, FunctorError> {
    if let Some(w) = tubewise::tubewise_witness(phi, f, g, TubeCondition::Image)? {
        return Err(FunctorError::NotTubewise(w));
    }
    let (tf, tg) = (tubes(f), tubes(g));
    let components = tf
        .iter()
        .zip(&tg)
        .map(|(src, dst)| {
            src.iter().map(|&x| position(dst, phi[x]).expect("tubewise maps tubes into tubes")).collect()
        })
        .collect();
    let morphism = CosheafMorphism { components };
    morphism.verify(&cs_object(f), &cs_object(g))?;
    Ok(morphism)
}

/// `L(X)`: the support map `X_T -> T`.
pub fn l_object(x: &FadedCosheaf) -> Result<FiberedSet, FunctorError> {
    let supports = SupportMap::compute(x)?;
    let t = x.space().total_open();
    Ok(FiberedSet::new(x.space().clone(), supports.component(t).to_vec())?)
}

/// `L(Φ) = φ_T`, checked to be tubewise `L(X) -> L(Y)`.
pub fn l_morphism(
    phi: &CosheafMorphism,
    x: &FadedCosheaf,
    y: &FadedCosheaf,
) -> Result<Vec<usize>, FunctorError> {
    phi.verify(x, y)?;
    let top = phi.component(x.space().total_open()).to_vec();
    let (lx, ly) = (l_object(x)?, l_object(y)?);
    if let Some(w) = tubewise::tubewise_witness(&top, &lx, &ly, TubeCondition::Image)? {
        return Err(FunctorError::NotTubewise(w));
    }
    Ok(top)
}

/// `L(CS(f)) = f` exactly, and `L(CS(id_f)) = id`.
pub fn verify_left_inverse(f: &FiberedSet) -> Result<bool, FunctorError> {
    if !filters::is_sober(f.base()).sober {
        return Err(FunctorError::NotSober);
    }
    let x = FadedCosheaf::new(cs_object(f))?;
    if l_object(&x)? != *f {
        return Ok(false);
    }
    let id = tubewise::identity(f);
    Ok(l_morphism(&cs_morphism(&id, f, f)?, &x, &x)? == id)
}

/// `L(CS(φ)) = φ` for a tubewise `φ: f -> g`.
pub fn verify_left_inverse_on_morphism(
    phi: &[usize],
    f: &FiberedSet,
    g: &FiberedSet,
) -> Result<bool, FunctorError> {
    let (x, y) = (FadedCosheaf::new(cs_object(f))?, FadedCosheaf::new(cs_object(g))?);
    Ok(l_morphism(&cs_morphism(phi, f, g)?, &x, &y)? == phi)
}

/// A natural isomorphism `X ≅ CS(f)` given by per-open bijections.
#[derive(Debug, Clone)]
pub struct CounitIso {
    pub fibered: FiberedSet,
    pub target: Copresheaf,
    pub forward: CosheafMorphism,
    pub inverse: CosheafMorphism,
}

/// `η_V(x) = R^V_T(x)`, as a position in `tube(f, V)`. Verifies every
/// component lands in the tube, is bijective, and that both directions
/// are natural with `η_T` the identity.
fn iso_onto_tubes(x: &Copresheaf, f: FiberedSet) -> Result<CounitIso, FunctorError> {
    let space = x.space();
    let t = space.total_open();
    let target = cs_object(&f);
    let tubes = tubes(&f);
    let mut forward = Vec::with_capacity(space.num_opens());
    let mut inverse = Vec::with_capacity(space.num_opens());
    for v in space.open_ids() {
        let to_top = x.extension(v, t);
        let comp: Vec<usize> = (0..x.size(v))
            .map(|element| position(&tubes[v.0], to_top[element]).ok_or(FunctorError::OutsideTube { v, element }))
            .collect::<Result<_, _>>()?;
        let mut inv = vec![usize::MAX; target.size(v)];
        for (a, &b) in comp.iter().enumerate() {
            if inv[b] != usize::MAX {
                return Err(FunctorError::NotBijective(v));
            }
            inv[b] = a;
        }
        if inv.contains(&usize::MAX) {
            return Err(FunctorError::NotBijective(v));
        }
        forward.push(comp);
        inverse.push(inv);
    }
    let forward = CosheafMorphism { components: forward };
    let inverse = CosheafMorphism { components: inverse };
    forward.verify(x, &target)?;
    inverse.verify(&target, x)?;
    if forward.component(t).iter().enumerate().any(|(i, &j)| i != j) {
        return Err(FunctorError::TopNotIdentity);
    }
    Ok(CounitIso { fibered: f, target, forward, inverse })
}

/// `X ≅ CS(L(X))` over a sober base.
pub fn build_counit_iso(x: &FadedCosheaf) -> Result<CounitIso, FunctorError> {
    let f = l_object(x)?;
    iso_onto_tubes(x, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionReason {
    /// The support family is no point's neighborhood filter.
    NotPrincipal,
    /// The support family is the neighborhood filter of several points.
    NotUnique,
}

/// An element of `X_T` with no well-defined support point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    pub element: usize,
    pub family: Vec<OpenId>,
    pub reason: ObstructionReason,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reason = match self.reason {
            ObstructionReason::NotPrincipal => "is no point's neighborhood filter",
            ObstructionReason::NotUnique => "is shared by several points",
        };
        let fam = self.family.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "element {}: support family [{fam}] {reason}", self.element)
    }
}

#[derive(Debug, Clone)]
pub enum Representation {
    Representable(CounitIso),
    Obstructed(Obstruction),
}

/// Decides whether `X ≅ CS(f)` for some `f` over a T0 base, using the
/// support criterion on `X_T`.
pub fn representability_check(x: &FadedCosheaf) -> Result<Representation, FunctorError> {
    let space = x.space();
    if !space.is_t0() {
        return Err(FunctorError::NotT0);
    }
    let t = space.total_open();
    let mut map = Vec::with_capacity(x.size(t));
    for element in 0..x.size(t) {
        let family = cosheaf::support_family(x, t, element);
        match cosheaf::point_for_family(space, t, &family) {
            Ok(b) => map.push(b),
            Err(matches) => {
                let reason = if matches.is_empty() {
                    ObstructionReason::NotPrincipal
                } else {
                    ObstructionReason::NotUnique
                };
                return Ok(Representation::Obstructed(Obstruction { element, family, reason }));
            }
        }
    }
    let f = FiberedSet::new(space.clone(), map)?;
    Ok(Representation::Representable(iso_onto_tubes(x, f)?))
}
