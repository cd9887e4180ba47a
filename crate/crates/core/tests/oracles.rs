//! Brute-force oracles checked against the library on small spaces.

use std::collections::BTreeSet;

use faded_cosheaf::cosheaf::{self, Copresheaf, FadedCosheaf, RawCopresheaf};
use faded_cosheaf::filters;
use faded_cosheaf::functors::{self, Representation};
use faded_cosheaf::generate::{self, MutationKind};
use faded_cosheaf::space::{FiniteSpace, OpenId};
use faded_cosheaf::tubewise::FiberedSet;

fn spaces_up_to(n: usize) -> Vec<FiniteSpace> {
    generate::topology_universe(n).unwrap()
}

fn subfamilies(opens: &[OpenId]) -> impl Iterator<Item = Vec<OpenId>> + '_ {
    (0u32..1 << opens.len())
        .map(move |mask| (0..opens.len()).filter(|i| mask >> i & 1 == 1).map(|i| opens[i]).collect())
}

/// Completely prime filter, straight from the definition: every subfamily
/// whose union lies in the family has a member in the family.
fn cp_by_definition(space: &FiniteSpace, v: OpenId, family: &[OpenId]) -> bool {
    let inside: BTreeSet<OpenId> = family.iter().copied().collect();
    let lattice = space.open_sublattice(v);
    let upward = inside.iter().all(|&a| {
        lattice.iter().all(|&b| !space.is_sub_open(a, b) || inside.contains(&b))
    });
    let meets = inside.iter().all(|&a| inside.iter().all(|&b| inside.contains(&space.intersection(a, b))));
    let prime = subfamilies(lattice).all(|sub| {
        let joined = sub.iter().fold(space.empty_open(), |acc, &u| space.union(acc, u));
        !inside.contains(&joined) || sub.iter().any(|u| inside.contains(u))
    });
    !inside.is_empty() && upward && meets && prime
}

#[test]
fn completely_prime_matches_definition() {
    for space in spaces_up_to(3) {
        for v in space.open_ids() {
            let lattice = space.open_sublattice(v).to_vec();
            let mut expected = Vec::new();
            for family in subfamilies(&lattice) {
                let oracle = cp_by_definition(&space, v, &family);
                assert_eq!(filters::is_completely_prime(&space, v, &family), oracle, "{family:?} in {space:?}");
                if oracle {
                    expected.push(family);
                }
            }
            let mut found: Vec<Vec<OpenId>> =
                filters::enumerate_cp_filters(&space, v).into_iter().map(|f| f.members).collect();
            found.sort();
            expected.sort();
            assert_eq!(found, expected);
        }
    }
}

/// Every `X_V` is a copy of `k` points except `X_∅ = ∅`; maps are identities.
fn constant_off_empty(space: &FiniteSpace, k: usize) -> Copresheaf {
    let sizes: Vec<usize> = space.open_ids().map(|v| if space.open(v).is_empty() { 0 } else { k }).collect();
    let mut extensions = std::collections::BTreeMap::new();
    for v in space.open_ids() {
        for &w in space.open_sublattice(v) {
            extensions.insert((w, v), (0..sizes[w.0]).collect());
        }
    }
    cosheaf::validate_copresheaf(RawCopresheaf { space: space.clone(), sizes, extensions }).unwrap()
}

#[test]
fn maximal_cover_gluing_agrees_with_all_covers() {
    let mut disagreements = Vec::new();
    let mut failing = 0;
    for (i, space) in spaces_up_to(3).iter().enumerate() {
        let mut fixtures = vec![constant_off_empty(space, 1), constant_off_empty(space, 2)];
        if filters::is_sober(space).sober {
            fixtures.push(filters::fil0_cosheaf(space).unwrap().cosheaf);
            for size in 0..=3 {
                let x = generate::random_faded_cosheaf(space, size, i as u64).unwrap();
                for kind in [MutationKind::BreakInjectivity, MutationKind::AddOrphan] {
                    if let Ok(m) = generate::mutate(&x, kind, size as u64) {
                        fixtures.push(cosheaf::validate_copresheaf(m.raw).unwrap());
                    }
                }
                fixtures.push(x);
            }
        }
        for x in &fixtures {
            let reduced = cosheaf::check_cosheaf_gluing(x).is_ok();
            let full = cosheaf::check_cosheaf_gluing_all_covers(x).is_ok();
            if reduced != full {
                disagreements.push((space.clone(), x.sizes().to_vec()));
            }
            failing += usize::from(!full);
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
    assert!(failing > 0);
}

/// `X ≅ CS(f)` for some `f`, by trying every `f` and every bijection at `T`.
/// For faded `X` the top component decides the whole isomorphism.
fn isomorphic_to_some_tube_cosheaf(x: &Copresheaf) -> Option<Vec<usize>> {
    let space = x.space();
    let t = space.total_open();
    let n = x.size(t);
    let images: Vec<(OpenId, BTreeSet<usize>)> = space
        .open_ids()
        .map(|v| (v, x.extension(v, t).iter().copied().collect()))
        .collect();
    for f in generate::all_functions(n, space.num_points()) {
        let g = FiberedSet::new(space.clone(), f.clone()).unwrap();
        for sigma in permutations(n) {
            let ok = images.iter().all(|(v, image)| {
                let mapped: BTreeSet<usize> = image.iter().map(|&y| sigma[y]).collect();
                mapped == g.tube(space.open(*v)).into_iter().collect()
            });
            if ok {
                return Some(f);
            }
        }
    }
    None
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn representability_matches_isomorphism_search() {
    let (mut representable, mut rejected) = (0, 0);
    for (i, space) in spaces_up_to(3).iter().enumerate().filter(|(_, s)| s.is_t0()) {
        let mut fixtures = vec![filters::fil0_cosheaf(space).unwrap().cosheaf];
        for size in 0..=3 {
            let x = generate::random_faded_cosheaf(space, size, 31 * i as u64 + size as u64).unwrap();
            if let Ok(m) = generate::mutate(&x, MutationKind::AddOrphan, 0) {
                fixtures.push(cosheaf::validate_copresheaf(m.raw).unwrap());
            }
            fixtures.push(x);
        }
        for x in fixtures {
            let oracle = isomorphic_to_some_tube_cosheaf(&x);
            let Ok(faded) = FadedCosheaf::new(x.clone()) else {
                // unglued: no tube cosheaf is isomorphic to it either
                assert!(oracle.is_none(), "{:?} rejected but iso exists for f = {oracle:?}", x.sizes());
                rejected += 1;
                continue;
            };
            match functors::representability_check(&faded).unwrap() {
                Representation::Representable(iso) => {
                    assert!(oracle.is_some(), "claimed representable: {:?}", faded.sizes());
                    assert!(isomorphic_to_some_tube_cosheaf(&functors::cs_object(&iso.fibered)).is_some());
                    representable += 1;
                }
                Representation::Obstructed(o) => panic!("obstructed {o:?}; oracle found {oracle:?}"),
            }
        }
    }
    assert!(representable > 0 && rejected > 0, "representable {representable}, rejected {rejected}");
}

#[test]
fn support_families_restrict() {
    for (i, space) in spaces_up_to(4).iter().enumerate().filter(|(_, s)| s.is_t0()).step_by(3) {
        let x = FadedCosheaf::new(generate::random_faded_cosheaf(space, 3, i as u64).unwrap()).unwrap();
        for v in space.open_ids() {
            for &w in space.open_sublattice(v) {
                for (a, &y) in x.extension(w, v).iter().enumerate() {
                    let below: Vec<OpenId> = cosheaf::support_family(&x, v, y)
                        .into_iter()
                        .filter(|&u| space.is_sub_open(u, w))
                        .collect();
                    assert_eq!(cosheaf::support_family(&x, w, a), below);
                    // x lies in the image of R^W_V exactly when W supports it
                    assert!(x.in_image(w, v, y));
                }
                for y in 0..x.size(v) {
                    let supported = cosheaf::support_family(&x, v, y).contains(&w);
                    assert_eq!(supported, x.in_image(w, v, y));
                }
            }
        }
    }
}
