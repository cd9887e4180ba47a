//! The natural numbers with the cofinite topology, handled symbolically.
//!
//! Opens are `∅` and complements of finite sets. The space is T1 but not
//! sober: the filter of all nonempty opens is completely prime and is no
//! point's neighborhood filter. Everything infinite is replaced by scans
//! over a bounded fragment plus one stated lemma; the report says which is
//! which.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::functors::ObstructionReason;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exceptions", rename_all = "snake_case")]
pub enum CofiniteOpen {
    Empty,
    /// `ℕ` minus a finite exception set.
    Cofinite(BTreeSet<u64>),
}

impl CofiniteOpen {
    pub fn full() -> Self {
        CofiniteOpen::Cofinite(BTreeSet::new())
    }

    pub fn without<I: IntoIterator<Item = u64>>(exceptions: I) -> Self {
        CofiniteOpen::Cofinite(exceptions.into_iter().collect())
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            CofiniteOpen::Empty => false,
            CofiniteOpen::Cofinite(ex) => !ex.contains(&n),
        }
    }
}

impl fmt::Display for CofiniteOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CofiniteOpen::Empty => f.write_str("∅"),
            CofiniteOpen::Cofinite(ex) if ex.is_empty() => f.write_str("ℕ"),
            CofiniteOpen::Cofinite(ex) => {
                let ex: Vec<String> = ex.iter().map(u64::to_string).collect();
                write!(f, "ℕ∖{{{}}}", ex.join(","))
            }
        }
    }
}

pub fn cof_intersect(a: &CofiniteOpen, b: &CofiniteOpen) -> CofiniteOpen {
    match (a, b) {
        (CofiniteOpen::Cofinite(x), CofiniteOpen::Cofinite(y)) => {
            CofiniteOpen::Cofinite(x.union(y).copied().collect())
        }
        _ => CofiniteOpen::Empty,
    }
}

pub fn cof_union(a: &CofiniteOpen, b: &CofiniteOpen) -> CofiniteOpen {
    match (a, b) {
        (CofiniteOpen::Cofinite(x), CofiniteOpen::Cofinite(y)) => {
            CofiniteOpen::Cofinite(x.intersection(y).copied().collect())
        }
        (CofiniteOpen::Empty, other) | (other, CofiniteOpen::Empty) => other.clone(),
    }
}

/// The completely prime filters of the cofinite topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterClass {
    /// Neighborhood filter of `n`: the opens containing `n`.
    Point(u64),
    /// All nonempty opens.
    Generic,
}

impl fmt::Display for FilterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterClass::Point(n) => write!(f, "Neighb({n})"),
            FilterClass::Generic => f.write_str("Generic"),
        }
    }
}

pub fn filter_contains(filter: FilterClass, u: &CofiniteOpen) -> bool {
    match filter {
        FilterClass::Point(n) => u.contains(n),
        FilterClass::Generic => *u != CofiniteOpen::Empty,
    }
}

/// Opens whose exceptions lie in `0..bound`, as `None` (empty) or an
/// exception bitmask. Closed under both lattice operations.
#[derive(Debug, Clone, Copy)]
struct Fragment {
    bound: u32,
}

type FragOpen = Option<u64>;

impl Fragment {
    fn opens(self) -> impl Iterator<Item = FragOpen> {
        std::iter::once(None).chain((0..1u64 << self.bound).map(Some))
    }

    fn size(self) -> u64 {
        (1u64 << self.bound) + 1
    }

    fn meet(a: FragOpen, b: FragOpen) -> FragOpen {
        Some(a? | b?)
    }

    fn join(a: FragOpen, b: FragOpen) -> FragOpen {
        match (a, b) {
            (Some(x), Some(y)) => Some(x & y),
            (None, o) | (o, None) => o,
        }
    }

    fn leq(a: FragOpen, b: FragOpen) -> bool {
        match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => y & !x == 0,
        }
    }

    fn in_filter(filter: FilterClass, u: FragOpen) -> bool {
        match (filter, u) {
            (_, None) => false,
            (FilterClass::Generic, Some(_)) => true,
            (FilterClass::Point(n), Some(ex)) => n >= 64 || ex >> n & 1 == 0,
        }
    }

    #[cfg(test)]
    fn to_open(self, u: FragOpen) -> CofiniteOpen {
        match u {
            None => CofiniteOpen::Empty,
            Some(ex) => CofiniteOpen::without((0..self.bound as u64).filter(|&i| ex >> i & 1 == 1)),
        }
    }
}

/// Fragments up to this many opens are also scanned over all subfamilies.
const EXHAUSTIVE_FRAGMENT_LIMIT: u64 = 17;

/// What the bounded scan of `Generic` actually checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericPrimality {
    pub bound: u64,
    pub fragment_opens: u64,
    /// `∅ ∉ Generic`, i.e. primality for the empty family.
    pub empty_family: bool,
    /// Upward closure and meet closure over all pairs of the fragment.
    pub filter_axioms: bool,
    /// Primality for all two-element families of the fragment.
    pub binary_primality: bool,
    pub pairs_checked: u64,
    /// Primality for every subfamily, when the fragment is small enough.
    pub all_families: Option<bool>,
    pub holds: bool,
}

/// The argument covering what the scan cannot reach.
pub const GENERIC_LEMMA: &str = "A union of cofinite-topology opens is empty only when every member is \
empty, so any family whose union is nonempty has a nonempty member. Two nonempty opens miss only \
finitely many naturals each, so their intersection is nonempty. Hence the nonempty opens form a \
completely prime filter on all of ℕ.";

pub fn verify_generic_completely_prime(bound: u32) -> GenericPrimality {
    let frag = Fragment { bound: bound.min(20) };
    let generic = |u| Fragment::in_filter(FilterClass::Generic, u);
    let empty_family = !generic(None);
    let mut filter_axioms = true;
    let mut binary_primality = true;
    let mut pairs_checked = 0u64;
    for a in frag.opens() {
        for b in frag.opens() {
            pairs_checked += 1;
            if generic(a) && Fragment::leq(a, b) && !generic(b) {
                filter_axioms = false;
            }
            if generic(a) && generic(b) && !generic(Fragment::meet(a, b)) {
                filter_axioms = false;
            }
            if generic(Fragment::join(a, b)) && !generic(a) && !generic(b) {
                binary_primality = false;
            }
        }
    }
    let all_families = (frag.size() <= EXHAUSTIVE_FRAGMENT_LIMIT).then(|| {
        let opens: Vec<FragOpen> = frag.opens().collect();
        (0u64..1 << opens.len()).all(|m| {
            let family = opens.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &u)| u);
            let (join, any_member) =
                family.fold((None, false), |(j, any), u| (Fragment::join(j, u), any || generic(u)));
            !generic(join) || any_member
        })
    });
    let holds = empty_family && filter_axioms && binary_primality && all_families.unwrap_or(true);
    GenericPrimality {
        bound: bound as u64,
        fragment_opens: frag.size(),
        empty_family,
        filter_axioms,
        binary_primality,
        pairs_checked,
        all_families,
        holds,
    }
}

/// Each completely prime filter of the fragment lattice with exceptions in
/// `0..bound`, named by the filter class it is the trace of (`None` if it
/// matches none). Filters of a finite lattice are principal, so the
/// candidates are up-sets of single opens.
pub fn classify_fragment_filters(bound: u32) -> Vec<Option<FilterClass>> {
    let frag = Fragment { bound };
    let opens: Vec<FragOpen> = frag.opens().collect();
    let classes: Vec<FilterClass> =
        (0..bound as u64).map(FilterClass::Point).chain(std::iter::once(FilterClass::Generic)).collect();
    let mut out = Vec::new();
    for &p in &opens {
        let member = |u: FragOpen| Fragment::leq(p, u);
        let proper = !member(None);
        let prime = opens.iter().all(|&a| {
            opens.iter().all(|&b| !member(Fragment::join(a, b)) || member(a) || member(b))
        });
        if proper && prime {
            let class = classes
                .iter()
                .copied()
                .find(|&c| opens.iter().all(|&u| Fragment::in_filter(c, u) == member(u)));
            out.push(class);
        }
    }
    out
}

/// `Cofinite({n})`: in `Generic` but not in `Neighb(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctnessWitness {
    pub point: u64,
    pub open: CofiniteOpen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub bound: u64,
    /// Every checked singleton `{n}` is closed: `ℕ∖{n}` is open and separates
    /// `n` from each other checked point.
    pub t1: bool,
    pub generic: GenericPrimality,
    pub witnesses: Vec<DistinctnessWitness>,
    /// `Neighb(n) ≠ Neighb(m)` for all checked `n ≠ m`.
    pub points_distinct: bool,
    pub lemma: String,
    pub sober: bool,
    /// Whether `Fil₀` over this space is isomorphic to some `CS(f)`.
    pub fil0_representable: bool,
    pub obstruction: FilterClass,
    pub obstruction_reason: ObstructionReason,
}

impl DemoReport {
    /// All machine-checked parts passed.
    pub fn certified(&self) -> bool {
        self.t1
            && self.generic.holds
            && self.points_distinct
            && self.witnesses.len() as u64 == self.bound
            && self.witnesses.iter().all(|w| {
                filter_contains(FilterClass::Generic, &w.open)
                    && !filter_contains(FilterClass::Point(w.point), &w.open)
            })
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAILED" };
        writeln!(f, "cofinite topology on ℕ, points checked: 0..{}", self.bound)?;
        writeln!(f, "[checked] T1, every {{n}} closed: {}", mark(self.t1))?;
        let g = &self.generic;
        writeln!(
            f,
            "[checked] Generic completely prime on a fragment of {} opens: empty family {}, filter axioms {}, pairs {} ({} checked){}",
            g.fragment_opens,
            mark(g.empty_family),
            mark(g.filter_axioms),
            mark(g.binary_primality),
            g.pairs_checked,
            match g.all_families {
                Some(b) => format!(", all subfamilies {}", mark(b)),
                None => String::new(),
            }
        )?;
        writeln!(f, "[lemma]   {}", self.lemma)?;
        for w in &self.witnesses {
            writeln!(f, "[checked] Generic ≠ Neighb({}): {} ∈ Generic, ∉ Neighb({})", w.point, w.open, w.point)?;
        }
        writeln!(f, "[checked] point filters pairwise distinct: {}", mark(self.points_distinct))?;
        writeln!(f, "conclusion: not sober; Generic has no generic point")?;
        write!(
            f,
            "conclusion: Fil0 is not isomorphic to any CS(f): element {} has no support point (not principal)",
            self.obstruction
        )
    }
}

/// Certifies, up to `bound`, that the cofinite topology on `ℕ` is T1 and not sober.
pub fn demo_not_sober(bound: u32) -> DemoReport {
    let n = bound as u64;
    let t1 = (0..n).all(|p| {
        let complement = CofiniteOpen::without([p]);
        !complement.contains(p) && (0..n).filter(|&m| m != p).all(|m| complement.contains(m))
    });
    let generic = verify_generic_completely_prime(bound);
    let witnesses: Vec<DistinctnessWitness> = (0..n)
        .map(|p| DistinctnessWitness { point: p, open: CofiniteOpen::without([p]) })
        .collect();
    let points_distinct = (0..n).all(|p| {
        (0..n).filter(|&m| m != p).all(|m| {
            let sep = CofiniteOpen::without([p]);
            filter_contains(FilterClass::Point(m), &sep) && !filter_contains(FilterClass::Point(p), &sep)
        })
    });
    DemoReport {
        bound: n,
        t1,
        generic,
        witnesses,
        points_distinct,
        lemma: GENERIC_LEMMA.to_string(),
        sober: false,
        fil0_representable: false,
        obstruction: FilterClass::Generic,
        obstruction_reason: ObstructionReason::NotPrincipal,
    }
}
