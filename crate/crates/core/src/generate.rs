//! Test-universe construction: every labeled topology on a few points,
//! fibered sets, relabeled faded cosheaves, morphism candidates, and
//! deliberately broken copresheaves.
//!
//! All randomness is a pure function of a `u64` seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cosheaf::{self, Check, CheckReport, Copresheaf, CopresheafError, RawCopresheaf};
use crate::filters;
use crate::functors;
use crate::space::{FiniteSpace, OpenId, PointSet};
use crate::tubewise::FiberedSet;

pub const MAX_ENUMERATED_POINTS: usize = 4;
pub const MAX_ENUMERATED_CARRIER: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("{what} {size} exceeds the enumeration limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("base space is not sober")]
    NotSober,
    #[error("nothing to mutate for {0:?}")]
    NothingToMutate(MutationKind),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All labeled topologies on `n <= 4` points, ordered by the bitmask of
/// their family of opens.
pub fn enumerate_topologies(n: usize) -> Result<Vec<FiniteSpace>, GenerateError> {
    if n > MAX_ENUMERATED_POINTS {
        return Err(GenerateError::TooLarge { what: "point count", size: n, limit: MAX_ENUMERATED_POINTS });
    }
    let subsets = 1usize << n;
    let full = subsets - 1;
    // subsets other than ∅ and the full set are optional
    let optional: Vec<usize> = (1..full).collect();
    let mut out = Vec::new();
    for choice in 0u32..1 << optional.len() {
        let mut family = vec![0usize];
        if full != 0 {
            family.push(full);
        }
        family.extend(optional.iter().enumerate().filter(|(i, _)| choice >> i & 1 == 1).map(|(_, &s)| s));
        let mut member = vec![false; subsets];
        for &s in &family {
            member[s] = true;
        }
        let closed = family.iter().all(|&a| family.iter().all(|&b| member[a | b] && member[a & b]));
        if closed {
            let sets = family.iter().map(|&s| PointSet::from_bits(s as u64)).collect();
            out.push(FiniteSpace::from_sets(n, sets).expect("closed family is a topology"));
        }
    }
    Ok(out)
}

/// Every topology on at most `max_points` points.
pub fn topology_universe(max_points: usize) -> Result<Vec<FiniteSpace>, GenerateError> {
    let mut all = Vec::new();
    for n in 0..=max_points {
        all.extend(enumerate_topologies(n)?);
    }
    Ok(all)
}

pub fn random_fibered_set(space: &FiniteSpace, size: usize, seed: u64) -> FiberedSet {
    let mut rng = rng(seed);
    random_fibered_set_with(space, size, &mut rng)
}

pub fn random_fibered_set_with<R: Rng>(space: &FiniteSpace, size: usize, rng: &mut R) -> FiberedSet {
    let map = if space.num_points() == 0 {
        Vec::new()
    } else {
        (0..size).map(|_| rng.gen_range(0..space.num_points())).collect()
    };
    FiberedSet::new(space.clone(), map).expect("points drawn from the space")
}

/// Every function `0..len -> 0..codomain`, in lexicographic order.
pub fn all_functions(len: usize, codomain: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..codomain).map(move |y| {
                    let mut next = prefix.clone();
                    next.push(y);
                    next
                })
            })
            .collect();
    }
    out
}

pub fn random_function<R: Rng>(len: usize, codomain: usize, rng: &mut R) -> Vec<usize> {
    if codomain == 0 {
        return Vec::new();
    }
    (0..len).map(|_| rng.gen_range(0..codomain)).collect()
}

/// Every map from a carrier of `size <= 3` elements into the space.
pub fn all_fibered_sets(space: &FiniteSpace, size: usize) -> Result<Vec<FiberedSet>, GenerateError> {
    if size > MAX_ENUMERATED_CARRIER {
        return Err(GenerateError::TooLarge { what: "carrier size", size, limit: MAX_ENUMERATED_CARRIER });
    }
    if size > 0 && space.num_points() == 0 {
        return Ok(Vec::new());
    }
    Ok(all_functions(size, space.num_points())
        .into_iter()
        .map(|m| FiberedSet::new(space.clone(), m).expect("points drawn from the space"))
        .collect())
}

/// Applies an independent random bijection to every component.
pub fn relabel<R: Rng>(x: &Copresheaf, rng: &mut R) -> Copresheaf {
    let perms: Vec<Vec<usize>> = x
        .sizes()
        .iter()
        .map(|&n| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let space = x.space();
    let mut extensions = BTreeMap::new();
    for v in space.open_ids() {
        for &w in space.open_sublattice(v) {
            let old = x.extension(w, v);
            let mut table = vec![0; old.len()];
            for (a, &y) in old.iter().enumerate() {
                table[perms[w.0][a]] = perms[v.0][y];
            }
            extensions.insert((w, v), table);
        }
    }
    let raw = RawCopresheaf { space: space.clone(), sizes: x.sizes().to_vec(), extensions };
    cosheaf::validate_copresheaf(raw).expect("relabeling preserves the copresheaf laws")
}

/// `CS(f)` for a random `f`, with every component relabeled so the
/// extensions are no longer literal inclusions.
pub fn random_faded_cosheaf(space: &FiniteSpace, size: usize, seed: u64) -> Result<Copresheaf, GenerateError> {
    if !filters::is_sober(space).sober {
        return Err(GenerateError::NotSober);
    }
    let mut rng = rng(seed);
    let f = random_fibered_set_with(space, size, &mut rng);
    Ok(relabel(&functors::cs_object(&f), &mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    /// Merge two elements of `X_T` that come from one proper open.
    BreakInjectivity,
    /// Reroute one extension map so a composite no longer agrees.
    BreakComposition,
    /// Add an element of `X_T` that no proper open reaches. Needs `T` to be
    /// a union of proper opens.
    AddOrphan,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] =
        [MutationKind::BreakInjectivity, MutationKind::BreakComposition, MutationKind::AddOrphan];

    /// The check this mutation is built to fail.
    pub fn target(self) -> Check {
        match self {
            MutationKind::BreakInjectivity => Check::Faded,
            MutationKind::BreakComposition => Check::Copresheaf,
            MutationKind::AddOrphan => Check::Gluing,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mutant {
    pub kind: MutationKind,
    pub raw: RawCopresheaf,
}

impl Mutant {
    pub fn check(&self) -> CheckReport {
        cosheaf::run_checks(self.raw.clone())
    }
}

/// Breaks a faded cosheaf in one targeted way.
pub fn mutate(x: &Copresheaf, kind: MutationKind, seed: u64) -> Result<Mutant, GenerateError> {
    let mut rng = rng(seed);
    let space = x.space();
    let t = space.total_open();
    let mut raw = x.to_raw();
    match kind {
        MutationKind::BreakInjectivity => {
            let mut candidates = Vec::new();
            for &w in space.open_sublattice(t).iter().filter(|&&w| w != t) {
                let mut image = x.extension(w, t).to_vec();
                image.sort();
                image.dedup();
                for (i, &a) in image.iter().enumerate() {
                    for &b in &image[i + 1..] {
                        candidates.push((a, b));
                    }
                }
            }
            let &(keep, drop) = candidates.choose(&mut rng).ok_or(GenerateError::NothingToMutate(kind))?;
            let quotient = |y: usize| match y.cmp(&drop) {
                std::cmp::Ordering::Less => y,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => y - 1,
            };
            raw.sizes[t.0] -= 1;
            for (&(w, v), table) in raw.extensions.iter_mut() {
                if v != t {
                    continue;
                }
                if w == t {
                    *table = (0..raw.sizes[t.0]).collect();
                } else {
                    table.iter_mut().for_each(|y| *y = quotient(*y));
                }
            }
        }
        MutationKind::BreakComposition => {
            let mut candidates: Vec<(OpenId, OpenId, usize, usize)> = Vec::new();
            for v in space.open_ids() {
                for &w in space.open_sublattice(v).iter().filter(|&&w| w != v) {
                    for (a, &y) in x.extension(w, v).iter().enumerate() {
                        candidates.extend((0..x.size(v)).filter(|&z| z != y).map(|z| (w, v, a, z)));
                    }
                }
            }
            candidates.shuffle(&mut rng);
            let found = candidates.into_iter().find_map(|(w, v, a, z)| {
                let mut attempt = raw.clone();
                attempt.extensions.get_mut(&(w, v)).expect("table for every sub-open")[a] = z;
                matches!(
                    cosheaf::validate_copresheaf(attempt.clone()),
                    Err(CopresheafError::CompositionLawViolated { .. })
                )
                .then_some(attempt)
            });
            raw = found.ok_or(GenerateError::NothingToMutate(kind))?;
        }
        MutationKind::AddOrphan => {
            // Otherwise every cover of T contains T and the orphan is just another point's element.
            let proper = space.maximal_proper_sub_opens(t);
            if space.join(&proper) != t {
                return Err(GenerateError::NothingToMutate(kind));
            }
            raw.sizes[t.0] += 1;
            raw.extensions.insert((t, t), (0..raw.sizes[t.0]).collect());
        }
    }
    Ok(Mutant { kind, raw })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_topologies(0).unwrap().len(), 1);
        assert_eq!(enumerate_topologies(1).unwrap().len(), 1);
        assert_eq!(enumerate_topologies(2).unwrap().len(), 4);
        let three = enumerate_topologies(3).unwrap();
        assert_eq!(three.len(), 29);
        assert_eq!(three.iter().filter(|s| s.is_t0()).count(), 19);
        assert!(matches!(enumerate_topologies(5), Err(GenerateError::TooLarge { .. })));
    }

    #[test]
    fn fibered_set_enumeration() {
        let s = FiniteSpace::sierpinski();
        assert_eq!(all_fibered_sets(&s, 1).unwrap().len(), 2);
        assert_eq!(all_fibered_sets(&s, 2).unwrap().len(), 4);
        assert_eq!(all_fibered_sets(&s, 0).unwrap().len(), 1);
        assert!(all_fibered_sets(&s, 4).is_err());
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let s = FiniteSpace::discrete(3);
        assert_eq!(random_fibered_set(&s, 5, 7), random_fibered_set(&s, 5, 7));
        assert_eq!(random_faded_cosheaf(&s, 4, 11).unwrap(), random_faded_cosheaf(&s, 4, 11).unwrap());
        assert!(matches!(random_faded_cosheaf(&FiniteSpace::indiscrete(2), 2, 0), Err(GenerateError::NotSober)));
    }

    #[test]
    fn relabeled_cosheaf_stays_faded_and_glued() {
        let s = FiniteSpace::sierpinski();
        let x = random_faded_cosheaf(&s, 4, 3).unwrap();
        assert!(cosheaf::is_faded(&x));
        assert!(cosheaf::check_cosheaf_gluing(&x).is_ok());
        let empty = random_faded_cosheaf(&s, 0, 3).unwrap();
        assert!(empty.sizes().iter().all(|&n| n == 0));
    }

    #[test]
    fn mutations_hit_their_targets() {
        let chain = [vec![], vec![0], vec![0, 1], vec![0, 1, 2]];
        let s = crate::space::validate_topology(3, &chain).unwrap();
        let f = FiberedSet::new(s, vec![0, 0, 1, 2]).unwrap();
        let x = functors::cs_object(&f);
        for kind in [MutationKind::BreakInjectivity, MutationKind::BreakComposition] {
            let m = mutate(&x, kind, 5).unwrap();
            assert_eq!(m.check().first_failure(), Some(kind.target()), "{kind:?}");
        }
        let m = mutate(&x, MutationKind::AddOrphan, 5);
        assert_eq!(m.unwrap_err(), GenerateError::NothingToMutate(MutationKind::AddOrphan));
        let discrete = functors::cs_object(&FiberedSet::new(FiniteSpace::discrete(2), vec![0, 1]).unwrap());
        let orphan = mutate(&discrete, MutationKind::AddOrphan, 5).unwrap();
        assert_eq!(orphan.check().first_failure(), Some(Check::Gluing));
        // No chain of three nonempty opens, so no composite to break.
        let sierpinski = functors::cs_object(&FiberedSet::new(FiniteSpace::sierpinski(), vec![1, 1, 0]).unwrap());
        assert_eq!(
            mutate(&sierpinski, MutationKind::BreakComposition, 5).unwrap_err(),
            GenerateError::NothingToMutate(MutationKind::BreakComposition)
        );
    }

    #[test]
    fn nothing_to_mutate() {
        let s = FiniteSpace::sierpinski();
        let x = functors::cs_object(&FiberedSet::new(s, vec![0]).unwrap());
        assert_eq!(
            mutate(&x, MutationKind::BreakInjectivity, 0).unwrap_err(),
            GenerateError::NothingToMutate(MutationKind::BreakInjectivity)
        );
    }
}
