use std::sync::OnceLock;

use proptest::prelude::*;
use rand::Rng;

use faded_cosheaf::cosheaf::{self, CosheafFile, CosheafMorphism};
use faded_cosheaf::filters;
use faded_cosheaf::functors;
use faded_cosheaf::generate::{self, MutationKind};
use faded_cosheaf::space::{FiniteSpace, SpaceFile};
use faded_cosheaf::tubewise::{self, FiberedFile, TubeCondition};

fn sober() -> &'static [FiniteSpace] {
    static SOBER: OnceLock<Vec<FiniteSpace>> = OnceLock::new();
    SOBER.get_or_init(|| {
        generate::topology_universe(3).unwrap().into_iter().filter(|s| s.is_t0()).collect()
    })
}

fn space_index() -> impl Strategy<Value = usize> {
    0..sober().len()
}

proptest! {
    #[test]
    fn generation_is_deterministic(i in space_index(), size in 0usize..5, seed: u64) {
        let space = &sober()[i];
        let x = generate::random_faded_cosheaf(space, size, seed).unwrap();
        prop_assert_eq!(&x, &generate::random_faded_cosheaf(space, size, seed).unwrap());
        for kind in MutationKind::ALL {
            let a = generate::mutate(&x, kind, seed).map(|m| m.raw);
            let b = generate::mutate(&x, kind, seed).map(|m| m.raw);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn restricting_an_extended_filter_recovers_it(i in space_index()) {
        let space = &sober()[i];
        for v in space.open_ids() {
            for &w in space.open_sublattice(v) {
                for a in filters::enumerate_cp_filters(space, w) {
                    let up = filters::extend_filter(space, &a, v).unwrap();
                    prop_assert!(filters::is_completely_prime(space, v, &up.members));
                    prop_assert_eq!(filters::restrict_filter(space, &up, w).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn files_round_trip(i in space_index(), size in 0usize..5, seed: u64) {
        let space = &sober()[i];
        let x = generate::random_faded_cosheaf(space, size, seed).unwrap();
        let text = serde_json::to_string(&x.to_file()).unwrap();
        let back: CosheafFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_copresheaf().unwrap(), x);

        let f = generate::random_fibered_set(space, size, seed);
        let text = serde_json::to_string(&f.to_file()).unwrap();
        let back: FiberedFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.into_fibered(space.clone()).unwrap(), f);

        let text = serde_json::to_string(&space.to_file()).unwrap();
        let back: SpaceFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back.validate().unwrap(), space);
    }

    #[test]
    fn tube_functor_preserves_composites(i in space_index(), seed: u64) {
        let space = &sober()[i];
        let mut rng = generate::rng(seed);
        let sizes = [rng.gen_range(0..=3), rng.gen_range(1..=3), rng.gen_range(1..=3)];
        let f = generate::random_fibered_set_with(space, sizes[0], &mut rng);
        let g = generate::random_fibered_set_with(space, sizes[1], &mut rng);
        let h = generate::random_fibered_set_with(space, sizes[2], &mut rng);
        let phi = generate::random_function(f.len(), g.len(), &mut rng);
        let psi = generate::random_function(g.len(), h.len(), &mut rng);
        let image = TubeCondition::Image;
        if !tubewise::is_tubewise(&phi, &f, &g, image).unwrap() || !tubewise::is_tubewise(&psi, &g, &h, image).unwrap() {
            return Ok(());
        }

        let composite = tubewise::compose(&phi, &psi, &f, &g, &h).unwrap();
        let cs_phi = functors::cs_morphism(&phi, &f, &g).unwrap();
        let cs_psi = functors::cs_morphism(&psi, &g, &h).unwrap();
        prop_assert_eq!(functors::cs_morphism(&composite, &f, &h).unwrap(), cs_phi.then(&cs_psi));
        prop_assert_eq!(
            functors::cs_morphism(&tubewise::identity(&f), &f, &f).unwrap(),
            CosheafMorphism::identity(&functors::cs_object(&f))
        );
        prop_assert!(functors::verify_left_inverse_on_morphism(&composite, &f, &h).unwrap());
    }

    #[test]
    fn counit_is_identity_on_tube_cosheaves(i in space_index(), size in 0usize..4, seed: u64) {
        let space = &sober()[i];
        let f = generate::random_fibered_set(space, size, seed);
        let x = cosheaf::FadedCosheaf::new(functors::cs_object(&f)).unwrap();
        let iso = functors::build_counit_iso(&x).unwrap();
        prop_assert_eq!(&iso.fibered, &f);
        prop_assert_eq!(&iso.forward, &CosheafMorphism::identity(&x));
    }
}
