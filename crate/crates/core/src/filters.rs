//! Completely prime filters of open sublattices, sobriety, and the filter
//! cosheaf `Fil₀`.
//!
//! All lattices here are finite, so every join is a finite join. A family
//! is completely prime exactly when it is a proper prime filter: the empty
//! family excludes `∅`, and primality for pairs extends to any finite
//! family by induction. `is_completely_prime` uses that reduction.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cosheaf::{self, Copresheaf, CopresheafError, RawCopresheaf};
use crate::space::{FiniteSpace, OpenId};

/// A completely prime filter in `O(ambient)`. Members are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CpFilter {
    pub ambient: OpenId,
    pub members: Vec<OpenId>,
}

impl CpFilter {
    pub fn contains(&self, w: OpenId) -> bool {
        self.members.binary_search(&w).is_ok()
    }

    /// The smallest member; every member contains it.
    pub fn least_member(&self, space: &FiniteSpace) -> OpenId {
        let meet = self
            .members
            .iter()
            .fold(space.open(self.ambient), |acc, &w| acc.intersection(space.open(w)));
        space.open_id(meet).expect("filters are closed under meets")
    }

    pub fn display<'a>(&'a self, space: &'a FiniteSpace) -> impl fmt::Display + 'a {
        DisplayFilter { filter: self, space }
    }
}

struct DisplayFilter<'a> {
    filter: &'a CpFilter,
    space: &'a FiniteSpace,
}

impl fmt::Display for DisplayFilter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, &w) in self.filter.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.space.open(w))?;
        }
        write!(f, "}} in O({})", self.space.open(self.filter.ambient))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("{0} is not a member of the filter")]
    OpenNotInFilter(OpenId),
    #[error("{0} is not contained in {1}")]
    NotSubOpen(OpenId, OpenId),
}

pub fn is_completely_prime(space: &FiniteSpace, v: OpenId, family: &[OpenId]) -> bool {
    let sub = space.open_sublattice(v);
    let mut members = family.to_vec();
    members.sort();
    members.dedup();
    let has = |w: OpenId| members.binary_search(&w).is_ok();

    if members.is_empty() || members.iter().any(|w| !sub.contains(w)) {
        return false;
    }
    // empty join
    if has(space.empty_open()) {
        return false;
    }
    for &w in &members {
        if sub.iter().any(|&u| space.is_sub_open(w, u) && !has(u)) {
            return false;
        }
        if members.iter().any(|&u| !has(space.intersection(w, u))) {
            return false;
        }
    }
    for (i, &a) in sub.iter().enumerate() {
        for &b in &sub[i + 1..] {
            if has(space.union(a, b)) && !has(a) && !has(b) {
                return false;
            }
        }
    }
    true
}

/// Every completely prime filter in `O(V)`, sorted by member list.
///
/// A filter of a finite lattice is principal, so the candidates are the
/// up-sets of single opens.
pub fn enumerate_cp_filters(space: &FiniteSpace, v: OpenId) -> Vec<CpFilter> {
    let sub = space.open_sublattice(v);
    let mut out: Vec<CpFilter> = sub
        .iter()
        .map(|&p| CpFilter {
            ambient: v,
            members: sub.iter().copied().filter(|&u| space.is_sub_open(p, u)).collect(),
        })
        .filter(|f| is_completely_prime(space, v, &f.members))
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SobrietyWitness {
    /// A completely prime filter that is no point's neighborhood filter.
    Unmatched(CpFilter),
    /// A filter that is the neighborhood filter of several points.
    Shared { filter: CpFilter, points: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SobrietyVerdict {
    pub sober: bool,
    pub witness: Option<SobrietyWitness>,
}

/// Sober iff `b ↦ Neighb(b, T)` is a bijection onto the completely prime
/// filters of the whole topology.
pub fn is_sober(space: &FiniteSpace) -> SobrietyVerdict {
    let t = space.total_open();
    let mut by_filter: BTreeMap<Vec<OpenId>, Vec<usize>> = BTreeMap::new();
    for b in space.points() {
        let n = space.neighborhood_filter(b, t).expect("every point lies in T");
        by_filter.entry(n).or_default().push(b);
    }
    for filter in enumerate_cp_filters(space, t) {
        let witness = match by_filter.get(&filter.members).map(Vec::as_slice) {
            Some([_]) => continue,
            None | Some([]) => SobrietyWitness::Unmatched(filter),
            Some(points) => SobrietyWitness::Shared { points: points.to_vec(), filter },
        };
        return SobrietyVerdict { sober: false, witness: Some(witness) };
    }
    SobrietyVerdict { sober: true, witness: None }
}

/// `A↓W = { U ∈ A : U ⊆ W }`, a filter in `O(W)`.
pub fn restrict_filter(space: &FiniteSpace, a: &CpFilter, w: OpenId) -> Result<CpFilter, FilterError> {
    if !a.contains(w) {
        return Err(FilterError::OpenNotInFilter(w));
    }
    let members = a.members.iter().copied().filter(|&u| space.is_sub_open(u, w)).collect();
    Ok(CpFilter { ambient: w, members })
}

/// `R^W_V(A) = { U ∈ O(V) : U ∩ W ∈ A }` for a filter `A` in `O(W)`.
pub fn extend_filter(space: &FiniteSpace, a: &CpFilter, v: OpenId) -> Result<CpFilter, FilterError> {
    let w = a.ambient;
    if !space.is_sub_open(w, v) {
        return Err(FilterError::NotSubOpen(w, v));
    }
    let members = space
        .open_sublattice(v)
        .iter()
        .copied()
        .filter(|&u| a.contains(space.intersection(u, w)))
        .collect();
    Ok(CpFilter { ambient: v, members })
}

/// `Fil₀`: components are the completely prime filters of each `O(V)`,
/// element `i` of `X_V` being the `i`-th filter in canonical order.
#[derive(Debug, Clone)]
pub struct FilterCosheaf {
    pub cosheaf: Copresheaf,
    pub filters: Vec<Vec<CpFilter>>,
}

impl FilterCosheaf {
    pub fn filter(&self, v: OpenId, element: usize) -> &CpFilter {
        &self.filters[v.0][element]
    }

    pub fn index_of(&self, a: &CpFilter) -> Option<usize> {
        self.filters[a.ambient.0].binary_search(a).ok()
    }
}

/// The raw `Fil₀` data plus the filter behind every element.
pub fn fil0_raw(space: &FiniteSpace) -> (RawCopresheaf, Vec<Vec<CpFilter>>) {
    let filters: Vec<Vec<CpFilter>> =
        space.open_ids().map(|v| enumerate_cp_filters(space, v)).collect();
    let mut extensions = BTreeMap::new();
    for v in space.open_ids() {
        for &w in space.open_sublattice(v) {
            let table = filters[w.0]
                .iter()
                .map(|a| {
                    let ext = extend_filter(space, a, v).expect("W is a sub-open of V");
                    // an extension that is not a listed filter leaves the table
                    // out of range, which validation reports
                    filters[v.0].binary_search(&ext).unwrap_or(usize::MAX)
                })
                .collect();
            extensions.insert((w, v), table);
        }
    }
    let sizes = filters.iter().map(Vec::len).collect();
    (RawCopresheaf { space: space.clone(), sizes, extensions }, filters)
}

pub fn fil0_cosheaf(space: &FiniteSpace) -> Result<FilterCosheaf, CopresheafError> {
    let (raw, filters) = fil0_raw(space);
    Ok(FilterCosheaf { cosheaf: cosheaf::validate_copresheaf(raw)?, filters })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecipeFailure {
    /// The filter contains no member of the cover.
    NoCoverMember { element: usize },
    /// Restricting to two different cover members lands in different classes.
    DependsOnChoice { element: usize, first: OpenId, second: OpenId },
    /// `φ ∘ R^W_V ≠ φ_W`.
    NotASinkFactorization { w: OpenId, element: usize },
    /// The map is not inverse to the canonical map from the colimit.
    NotInverse { element: usize },
}

/// Glues over a cover of `V` by the explicit rule `φ(A) = φ_W(A↓W)` for
/// any `W` in the cover with `W ∈ A`, where `φ_W` are the colimit
/// injections. Returns `φ` as class labels per element of `X_V`, after
/// checking it is well defined, factors the sink, and inverts the
/// canonical map from the colimit.
pub fn glue_by_restriction(
    fil0: &FilterCosheaf,
    v: OpenId,
    cover: &[OpenId],
) -> Result<Vec<usize>, RecipeFailure> {
    let x = &fil0.cosheaf;
    let space = x.space();
    let colim = cosheaf::cover_colimit(x, cover);
    let mut phi = Vec::with_capacity(x.size(v));
    for element in 0..x.size(v) {
        let a = fil0.filter(v, element);
        let mut chosen: Option<(OpenId, usize)> = None;
        for (i, &w) in cover.iter().enumerate() {
            let Ok(restricted) = restrict_filter(space, a, w) else { continue };
            let Some(idx) = fil0.index_of(&restricted) else {
                return Err(RecipeFailure::NoCoverMember { element });
            };
            let class = colim.class_of(i, idx);
            match chosen {
                None => chosen = Some((w, class)),
                Some((first, c)) if c != class => {
                    return Err(RecipeFailure::DependsOnChoice { element, first, second: w })
                }
                Some(_) => {}
            }
        }
        let (_, class) = chosen.ok_or(RecipeFailure::NoCoverMember { element })?;
        phi.push(class);
    }
    for (i, &w) in cover.iter().enumerate() {
        for (a, &y) in x.extension(w, v).iter().enumerate() {
            if phi[y] != colim.class_of(i, a) {
                return Err(RecipeFailure::NotASinkFactorization { w, element: a });
            }
        }
    }
    // canonical map colim -> X_V, then back through φ
    let mut canonical = vec![None; colim.num_classes];
    for (i, &w) in cover.iter().enumerate() {
        for (a, &y) in x.extension(w, v).iter().enumerate() {
            canonical[colim.class_of(i, a)] = Some(y);
        }
    }
    for (element, &class) in phi.iter().enumerate() {
        if canonical[class] != Some(element) {
            return Err(RecipeFailure::NotInverse { element });
        }
    }
    Ok(phi)
}
