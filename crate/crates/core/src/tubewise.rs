//! Maps into a base space and their tubewise morphisms.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{FiniteSpace, PointSet, SpaceError};

/// A finite set `0..len` with a map into the points of `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedSet {
    base: FiniteSpace,
    map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TubewiseError {
    #[error("element {element} maps to point {point}, outside the base space")]
    PointOutOfRange { element: usize, point: usize },
    #[error("carrier map does not fit the given source and target")]
    CarrierMismatch,
    #[error("morphism is not tubewise: {0}")]
    NotTubewise(TubewiseWitness),
}

impl FiberedSet {
    pub fn new(base: FiniteSpace, map: Vec<usize>) -> Result<Self, TubewiseError> {
        if let Some((element, &point)) = map.iter().enumerate().find(|(_, &p)| p >= base.num_points()) {
            return Err(TubewiseError::PointOutOfRange { element, point });
        }
        Ok(FiberedSet { base, map })
    }

    pub fn base(&self) -> &FiniteSpace {
        &self.base
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, element: usize) -> usize {
        self.map[element]
    }

    /// `{x : f(x) ∈ S}`, ascending.
    pub fn tube(&self, s: PointSet) -> Vec<usize> {
        (0..self.map.len()).filter(|&x| s.contains(self.map[x])).collect()
    }

    pub fn to_file(&self) -> FiberedFile {
        FiberedFile { carrier: self.map.len(), map: self.map.clone() }
    }
}

/// On-disk form: `{"carrier": n, "map": [point per element]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberedFile {
    pub carrier: usize,
    pub map: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum FiberedFileError {
    #[error("carrier size {carrier} disagrees with map length {len}")]
    Length { carrier: usize, len: usize },
    #[error(transparent)]
    Map(#[from] TubewiseError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl FiberedFile {
    pub fn into_fibered(self, base: FiniteSpace) -> Result<FiberedSet, FiberedFileError> {
        if self.carrier != self.map.len() {
            return Err(FiberedFileError::Length { carrier: self.carrier, len: self.map.len() });
        }
        Ok(FiberedSet::new(base, self.map)?)
    }
}

/// The four equivalent ways of stating that `φ: f -> g` is tubewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeCondition {
    /// `φ(tube f V) ⊆ tube g V` for every open `V`.
    Image,
    /// `tube f V ⊆ tube (gφ) V` for every open `V`.
    Preimage,
    /// `tube (gφ) F ⊆ tube f F` for every closed `F`.
    Closed,
    /// `tube (gφ) cl{b} ⊆ tube f cl{b}` for every point `b`.
    PointClosure,
}

impl TubeCondition {
    pub const ALL: [TubeCondition; 4] =
        [TubeCondition::Image, TubeCondition::Preimage, TubeCondition::Closed, TubeCondition::PointClosure];
}

/// Where a tubewise condition fails: the open or closed set tested and the
/// offending element of the source carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubewiseWitness {
    pub condition: TubeCondition,
    pub set: PointSet,
    /// The point `b` whose closure is `set`, for [`TubeCondition::PointClosure`].
    pub point: Option<usize>,
    pub element: usize,
}

impl fmt::Display for TubewiseWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.condition {
            TubeCondition::Image | TubeCondition::Preimage => "open",
            TubeCondition::Closed => "closed",
            TubeCondition::PointClosure => "point closure",
        };
        write!(f, "{kind} set {} with element {}", self.set, self.element)?;
        if let Some(b) = self.point {
            write!(f, " (closure of point {b})")?;
        }
        Ok(())
    }
}

impl std::error::Error for TubewiseWitness {}

fn check_shape(phi: &[usize], f: &FiberedSet, g: &FiberedSet) -> Result<(), TubewiseError> {
    if f.base != g.base || phi.len() != f.len() || phi.iter().any(|&y| y >= g.len()) {
        return Err(TubewiseError::CarrierMismatch);
    }
    Ok(())
}

/// `None` when `φ` satisfies `condition`, else the first failing set and element.
pub fn tubewise_witness(
    phi: &[usize],
    f: &FiberedSet,
    g: &FiberedSet,
    condition: TubeCondition,
) -> Result<Option<TubewiseWitness>, TubewiseError> {
    check_shape(phi, f, g)?;
    let space = &f.base;
    let g_phi = |x: usize| g.apply(phi[x]);
    let found = |set, point, element| Some(TubewiseWitness { condition, set, point, element });
    let witness = match condition {
        TubeCondition::Image => space.opens().iter().find_map(|&v| {
            let g_tube = g.tube(v);
            f.tube(v).into_iter().find(|&x| !g_tube.contains(&phi[x])).and_then(|x| found(v, None, x))
        }),
        TubeCondition::Preimage => space.opens().iter().find_map(|&v| {
            f.tube(v).into_iter().find(|&x| !v.contains(g_phi(x))).and_then(|x| found(v, None, x))
        }),
        TubeCondition::Closed => space.closed_sets().into_iter().find_map(|c| {
            (0..f.len()).find(|&x| c.contains(g_phi(x)) && !c.contains(f.apply(x))).and_then(|x| found(c, None, x))
        }),
        TubeCondition::PointClosure => space.points().find_map(|b| {
            let c = space.point_closure(b);
            (0..f.len())
                .find(|&x| c.contains(g_phi(x)) && !c.contains(f.apply(x)))
                .and_then(|x| found(c, Some(b), x))
        }),
    };
    Ok(witness)
}

pub fn is_tubewise(
    phi: &[usize],
    f: &FiberedSet,
    g: &FiberedSet,
    condition: TubeCondition,
) -> Result<bool, TubewiseError> {
    Ok(tubewise_witness(phi, f, g, condition)?.is_none())
}

/// `f = g ∘ φ`.
pub fn is_fibrewise(phi: &[usize], f: &FiberedSet, g: &FiberedSet) -> Result<bool, TubewiseError> {
    check_shape(phi, f, g)?;
    Ok((0..f.len()).all(|x| f.apply(x) == g.apply(phi[x])))
}

pub fn identity(f: &FiberedSet) -> Vec<usize> {
    (0..f.len()).collect()
}

/// `ψ ∘ φ` for tubewise `φ: f -> g` and `ψ: g -> h`.
pub fn compose(
    phi: &[usize],
    psi: &[usize],
    f: &FiberedSet,
    g: &FiberedSet,
    h: &FiberedSet,
) -> Result<Vec<usize>, TubewiseError> {
    if let Some(w) = tubewise_witness(phi, f, g, TubeCondition::Image)? {
        return Err(TubewiseError::NotTubewise(w));
    }
    if let Some(w) = tubewise_witness(psi, g, h, TubeCondition::Image)? {
        return Err(TubewiseError::NotTubewise(w));
    }
    let composite: Vec<usize> = phi.iter().map(|&y| psi[y]).collect();
    debug_assert!(is_tubewise(&composite, f, h, TubeCondition::Image).unwrap_or(false));
    Ok(composite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski_pair() -> (FiberedSet, FiberedSet) {
        let s = FiniteSpace::sierpinski();
        (FiberedSet::new(s.clone(), vec![1]).unwrap(), FiberedSet::new(s, vec![0]).unwrap())
    }

    #[test]
    fn tubes() {
        let s = FiniteSpace::sierpinski();
        let f = FiberedSet::new(s.clone(), vec![0, 1]).unwrap();
        assert_eq!(f.tube(PointSet::singleton(1)), vec![1]);
        assert_eq!(f.tube(s.full_set()), vec![0, 1]);
        assert_eq!(f.tube(PointSet::EMPTY), Vec::<usize>::new());
    }

    #[test]
    fn tubewise_but_not_fibrewise() {
        let (f, g) = sierpinski_pair();
        let psi = [0];
        for c in TubeCondition::ALL {
            assert!(is_tubewise(&psi, &g, &f, c).unwrap(), "{c:?}");
        }
        assert!(!is_fibrewise(&psi, &g, &f).unwrap());
    }

    #[test]
    fn fibrewise_failure_has_witness() {
        let (f, g) = sierpinski_pair();
        let phi = [0];
        let w = tubewise_witness(&phi, &f, &g, TubeCondition::Image).unwrap().unwrap();
        assert_eq!(w.set, PointSet::singleton(1));
        assert_eq!(w.element, 0);
        for c in TubeCondition::ALL {
            assert!(!is_tubewise(&phi, &f, &g, c).unwrap(), "{c:?}");
        }
        let w = tubewise_witness(&phi, &f, &g, TubeCondition::PointClosure).unwrap().unwrap();
        assert_eq!((w.point, w.set), (Some(0), PointSet::singleton(0)));
    }

    #[test]
    fn identities() {
        let s = FiniteSpace::sierpinski();
        let f = FiberedSet::new(s, vec![0, 1, 1]).unwrap();
        let id = identity(&f);
        assert!(is_fibrewise(&id, &f, &f).unwrap());
        for c in TubeCondition::ALL {
            assert!(is_tubewise(&id, &f, &f, c).unwrap());
        }
        let (_, g) = sierpinski_pair();
        let psi = [1];
        assert_eq!(compose(&psi, &identity(&f), &g, &f, &f).unwrap(), psi.to_vec());
    }

    #[test]
    fn shape_errors() {
        let (f, g) = sierpinski_pair();
        assert_eq!(is_tubewise(&[1], &f, &g, TubeCondition::Image), Err(TubewiseError::CarrierMismatch));
        assert_eq!(is_fibrewise(&[], &f, &g), Err(TubewiseError::CarrierMismatch));
        let other = FiberedSet::new(FiniteSpace::discrete(2), vec![0]).unwrap();
        assert_eq!(is_fibrewise(&[0], &f, &other), Err(TubewiseError::CarrierMismatch));
        assert!(matches!(
            FiberedSet::new(FiniteSpace::sierpinski(), vec![2]),
            Err(TubewiseError::PointOutOfRange { element: 0, point: 2 })
        ));
    }

    #[test]
    fn compose_refuses_non_tubewise() {
        let (f, g) = sierpinski_pair();
        let err = compose(&[0], &[0], &f, &g, &f).unwrap_err();
        assert!(matches!(err, TubewiseError::NotTubewise(_)));
    }
}
