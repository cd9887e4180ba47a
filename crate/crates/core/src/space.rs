//! Finite topological spaces with an explicitly listed topology.
//!
//! Points are `0..n`, subsets are bitmasks, and every open gets a stable
//! [`OpenId`] given by its position in canonical order: by size, then
//! lexicographically on the sorted point list. In particular `∅` is always
//! open 0 and the whole space is always the last open.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest point count a [`PointSet`] can hold.
pub const MAX_POINTS: usize = 64;

/// A subset of the points `0..n`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        PointSet(1u64 << p)
    }

    pub fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, p: usize) -> bool {
        p < 64 && self.0 & (1u64 << p) != 0
    }

    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u64 << p;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: PointSet) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> Self {
        PointSet(self.0 & other.0)
    }

    /// Complement relative to the points `0..n`.
    pub fn complement(self, n: usize) -> Self {
        PointSet(!self.0 & PointSet::full(n).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |p| bits & (1u64 << p) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Sort key for canonical order: size first, then sorted point list.
    fn canonical_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.to_vec())
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Handle for an open set of a particular [`FiniteSpace`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenId(pub usize);

impl fmt::Display for OpenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("too many points: {0} (at most {MAX_POINTS})")]
    TooManyPoints(usize),
    #[error("point {point} is out of range for a space with {points} points")]
    PointOutOfRange { point: usize, points: usize },
    #[error("the empty set or the whole point set is missing from the topology")]
    MissingEmptyOrTotal,
    #[error("open {0} is listed twice")]
    DuplicateOpen(PointSet),
    #[error("union of opens {0} and {1} is not open")]
    NotClosedUnderUnion(PointSet, PointSet),
    #[error("intersection of opens {0} and {1} is not open")]
    NotClosedUnderIntersection(PointSet, PointSet),
    #[error("point {point} is not in open {open}")]
    PointNotInOpen { point: usize, open: PointSet },
    #[error("{0} is not an open set of this space")]
    UnknownOpen(PointSet),
}

#[derive(Debug)]
struct Inner {
    n: usize,
    opens: Vec<PointSet>,
    index: HashMap<PointSet, OpenId>,
    // sublattice[v] = ids of opens contained in open v, ascending
    sublattice: Vec<Vec<OpenId>>,
}

/// A validated finite topological space. Cheap to clone.
#[derive(Clone)]
pub struct FiniteSpace {
    inner: Arc<Inner>,
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.opens == other.inner.opens)
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSpace")
            .field("points", &self.inner.n)
            .field("opens", &self.inner.opens)
            .finish()
    }
}

/// Checks that `candidate_opens` is a topology on the points `0..points` and
/// builds the space.
pub fn validate_topology(
    points: usize,
    candidate_opens: &[Vec<usize>],
) -> Result<FiniteSpace, SpaceError> {
    if points > MAX_POINTS {
        return Err(SpaceError::TooManyPoints(points));
    }
    let mut sets = Vec::with_capacity(candidate_opens.len());
    for open in candidate_opens {
        if let Some(&point) = open.iter().find(|&&p| p >= points) {
            return Err(SpaceError::PointOutOfRange { point, points });
        }
        sets.push(open.iter().copied().collect::<PointSet>());
    }
    FiniteSpace::from_sets(points, sets)
}

impl FiniteSpace {
    /// Builds a space from bitmask opens, validating every axiom.
    pub fn from_sets(points: usize, sets: Vec<PointSet>) -> Result<FiniteSpace, SpaceError> {
        if points > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(points));
        }
        let full = PointSet::full(points);
        if let Some(bad) = sets.iter().find(|s| !s.is_subset(full)) {
            let point = bad.iter().find(|&p| p >= points).unwrap_or(points);
            return Err(SpaceError::PointOutOfRange { point, points });
        }
        let mut opens = sets;
        opens.sort_by_key(|s| s.canonical_key());
        if let Some(w) = opens.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpaceError::DuplicateOpen(w[0]));
        }
        let index: HashMap<PointSet, OpenId> =
            opens.iter().enumerate().map(|(i, &s)| (s, OpenId(i))).collect();
        if !index.contains_key(&PointSet::EMPTY) || !index.contains_key(&full) {
            return Err(SpaceError::MissingEmptyOrTotal);
        }
        for (i, &a) in opens.iter().enumerate() {
            for &b in &opens[i + 1..] {
                if !index.contains_key(&a.union(b)) {
                    return Err(SpaceError::NotClosedUnderUnion(a, b));
                }
                if !index.contains_key(&a.intersection(b)) {
                    return Err(SpaceError::NotClosedUnderIntersection(a, b));
                }
            }
        }
        let sublattice = opens
            .iter()
            .map(|&v| {
                opens
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.is_subset(v))
                    .map(|(i, _)| OpenId(i))
                    .collect()
            })
            .collect();
        Ok(FiniteSpace { inner: Arc::new(Inner { n: points, opens, index, sublattice }) })
    }

    /// The two-point space with opens `∅, {1}, {0,1}`.
    pub fn sierpinski() -> FiniteSpace {
        validate_topology(2, &[vec![], vec![1], vec![0, 1]]).expect("Sierpinski space")
    }

    pub fn discrete(n: usize) -> FiniteSpace {
        let sets = (0..1u64 << n).map(PointSet::from_bits).collect();
        FiniteSpace::from_sets(n, sets).expect("discrete topology")
    }

    pub fn indiscrete(n: usize) -> FiniteSpace {
        let mut sets = vec![PointSet::EMPTY];
        if n > 0 {
            sets.push(PointSet::full(n));
        }
        FiniteSpace::from_sets(n, sets).expect("indiscrete topology")
    }

    pub fn num_points(&self) -> usize {
        self.inner.n
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.inner.n
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.inner.n)
    }

    pub fn num_opens(&self) -> usize {
        self.inner.opens.len()
    }

    pub fn open_ids(&self) -> impl Iterator<Item = OpenId> {
        (0..self.inner.opens.len()).map(OpenId)
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.inner.opens
    }

    pub fn open(&self, id: OpenId) -> PointSet {
        self.inner.opens[id.0]
    }

    pub fn empty_open(&self) -> OpenId {
        OpenId(0)
    }

    pub fn total_open(&self) -> OpenId {
        OpenId(self.inner.opens.len() - 1)
    }

    pub fn open_id(&self, set: PointSet) -> Option<OpenId> {
        self.inner.index.get(&set).copied()
    }

    pub fn require_open(&self, set: PointSet) -> Result<OpenId, SpaceError> {
        self.open_id(set).ok_or(SpaceError::UnknownOpen(set))
    }

    pub fn is_sub_open(&self, w: OpenId, v: OpenId) -> bool {
        self.open(w).is_subset(self.open(v))
    }

    pub fn union(&self, a: OpenId, b: OpenId) -> OpenId {
        self.inner.index[&self.open(a).union(self.open(b))]
    }

    pub fn intersection(&self, a: OpenId, b: OpenId) -> OpenId {
        self.inner.index[&self.open(a).intersection(self.open(b))]
    }

    /// Union of an arbitrary family of opens.
    pub fn join(&self, family: &[OpenId]) -> OpenId {
        let set = family.iter().fold(PointSet::EMPTY, |acc, &w| acc.union(self.open(w)));
        self.inner.index[&set]
    }

    /// `O(V)`: the opens contained in `v`, ascending by id.
    pub fn open_sublattice(&self, v: OpenId) -> &[OpenId] {
        &self.inner.sublattice[v.0]
    }

    /// Maximal elements of `O(V) \ {V}`.
    pub fn maximal_proper_sub_opens(&self, v: OpenId) -> Vec<OpenId> {
        let proper: Vec<OpenId> =
            self.open_sublattice(v).iter().copied().filter(|&w| w != v).collect();
        proper
            .iter()
            .copied()
            .filter(|&w| {
                !proper.iter().any(|&u| u != w && self.open(w).is_subset(self.open(u)))
            })
            .collect()
    }

    /// `Neighb(x, V)`: the opens `W ⊆ V` with `x ∈ W`.
    pub fn neighborhood_filter(&self, x: usize, v: OpenId) -> Result<Vec<OpenId>, SpaceError> {
        let vs = self.open(v);
        if !vs.contains(x) {
            return Err(SpaceError::PointNotInOpen { point: x, open: vs });
        }
        Ok(self.open_sublattice(v).iter().copied().filter(|&w| self.open(w).contains(x)).collect())
    }

    /// Complements of the opens, in the same order as the opens.
    pub fn closed_sets(&self) -> Vec<PointSet> {
        self.inner.opens.iter().map(|o| o.complement(self.inner.n)).collect()
    }

    /// Smallest closed set containing `b`.
    pub fn point_closure(&self, b: usize) -> PointSet {
        let outside = self
            .inner
            .opens
            .iter()
            .filter(|o| !o.contains(b))
            .fold(PointSet::EMPTY, |acc, &o| acc.union(o));
        outside.complement(self.inner.n)
    }

    pub fn is_t0(&self) -> bool {
        let neighborhoods: Vec<Vec<OpenId>> = self
            .points()
            .map(|x| self.open_ids().filter(|&w| self.open(w).contains(x)).collect())
            .collect();
        neighborhoods.iter().enumerate().all(|(i, a)| neighborhoods[i + 1..].iter().all(|b| a != b))
    }

    pub fn is_t1(&self) -> bool {
        let n = self.inner.n;
        self.points().all(|b| self.open_id(PointSet::singleton(b).complement(n)).is_some())
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            points: self.inner.n,
            opens: self.inner.opens.iter().map(|o| o.to_vec()).collect(),
        }
    }
}

/// On-disk form: `{"points": n, "opens": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: usize,
    pub opens: Vec<Vec<usize>>,
}

impl SpaceFile {
    pub fn validate(&self) -> Result<FiniteSpace, SpaceError> {
        validate_topology(self.points, &self.opens)
    }

    /// Maps positions in this file's `opens` list to ids in `space`.
    pub fn position_map(&self, space: &FiniteSpace) -> Result<Vec<OpenId>, SpaceError> {
        self.opens
            .iter()
            .map(|o| space.require_open(o.iter().copied().collect()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(space: &FiniteSpace, sets: &[&[usize]]) -> Vec<OpenId> {
        sets.iter().map(|s| space.open_id(s.iter().copied().collect()).unwrap()).collect()
    }

    #[test]
    fn validates_small_examples() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.num_opens(), 3);
        assert_eq!(s.opens(), &[PointSet::EMPTY, PointSet::singleton(1), PointSet::full(2)]);

        let d = validate_topology(2, &[vec![], vec![0], vec![1], vec![0, 1]]).unwrap();
        assert_eq!(d.num_opens(), 4);
        assert_eq!(d, FiniteSpace::discrete(2));

        assert_eq!(
            validate_topology(2, &[vec![], vec![0]]).unwrap_err(),
            SpaceError::MissingEmptyOrTotal
        );
    }

    #[test]
    fn reports_closure_and_shape_errors() {
        let err = validate_topology(3, &[vec![], vec![0], vec![1], vec![0, 1, 2]]).unwrap_err();
        assert_eq!(
            err,
            SpaceError::NotClosedUnderUnion(PointSet::singleton(0), PointSet::singleton(1))
        );
        let err = validate_topology(3, &[vec![], vec![0, 1], vec![1, 2], vec![0, 1, 2]]).unwrap_err();
        assert!(matches!(err, SpaceError::NotClosedUnderIntersection(..)));
        let err = validate_topology(2, &[vec![], vec![1], vec![1], vec![0, 1]]).unwrap_err();
        assert_eq!(err, SpaceError::DuplicateOpen(PointSet::singleton(1)));
        let err = validate_topology(2, &[vec![], vec![2], vec![0, 1]]).unwrap_err();
        assert_eq!(err, SpaceError::PointOutOfRange { point: 2, points: 2 });
    }

    #[test]
    fn empty_space_is_legal() {
        let e = validate_topology(0, &[vec![]]).unwrap();
        assert_eq!(e.num_opens(), 1);
        assert_eq!(e.empty_open(), e.total_open());
        assert!(e.is_t0() && e.is_t1());
        assert_eq!(e.open_sublattice(e.total_open()), &[OpenId(0)]);
    }

    #[test]
    fn sublattices() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.open_sublattice(s.total_open()), ids(&s, &[&[], &[1], &[0, 1]]).as_slice());
        assert_eq!(s.open_sublattice(OpenId(1)), ids(&s, &[&[], &[1]]).as_slice());
        assert_eq!(s.open_sublattice(s.empty_open()), &[OpenId(0)]);
    }

    #[test]
    fn neighborhoods() {
        let s = FiniteSpace::sierpinski();
        let t = s.total_open();
        assert_eq!(s.neighborhood_filter(1, t).unwrap(), ids(&s, &[&[1], &[0, 1]]));
        assert_eq!(s.neighborhood_filter(0, t).unwrap(), ids(&s, &[&[0, 1]]));
        assert_eq!(
            s.neighborhood_filter(0, OpenId(1)).unwrap_err(),
            SpaceError::PointNotInOpen { point: 0, open: PointSet::singleton(1) }
        );
        let d = FiniteSpace::discrete(2);
        let v = d.open_id(PointSet::singleton(0)).unwrap();
        assert_eq!(d.neighborhood_filter(0, v).unwrap(), vec![v]);
    }

    #[test]
    fn closures_and_separation() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.point_closure(1), PointSet::full(2));
        assert_eq!(s.point_closure(0), PointSet::singleton(0));
        assert!(s.is_t0());
        assert!(!s.is_t1());

        let d = FiniteSpace::discrete(2);
        assert_eq!(d.point_closure(0), PointSet::singleton(0));
        assert!(d.is_t0() && d.is_t1());

        let i = FiniteSpace::indiscrete(2);
        assert!(!i.is_t0());
        assert!(!i.is_t1());
    }

    #[test]
    fn maximal_proper_sub_opens() {
        let s = validate_topology(3, &[vec![], vec![1], vec![2], vec![1, 2], vec![0, 1, 2]]).unwrap();
        let t = s.total_open();
        assert_eq!(s.maximal_proper_sub_opens(t), ids(&s, &[&[1, 2]]));
        let v = s.open_id([1, 2].into_iter().collect()).unwrap();
        assert_eq!(s.maximal_proper_sub_opens(v), ids(&s, &[&[1], &[2]]));
        assert!(s.maximal_proper_sub_opens(s.empty_open()).is_empty());
    }

    #[test]
    fn file_round_trip_is_canonical() {
        let f = SpaceFile { points: 2, opens: vec![vec![1, 0], vec![1], vec![]] };
        let s = f.validate().unwrap();
        let out = s.to_file();
        assert_eq!(out.opens, vec![vec![], vec![1], vec![0, 1]]);
        let json = serde_json::to_string(&out).unwrap();
        assert_eq!(json, r#"{"points":2,"opens":[[],[1],[0,1]]}"#);
        assert_eq!(f.position_map(&s).unwrap(), vec![OpenId(2), OpenId(1), OpenId(0)]);
    }
}
