//! The exhaustive property runs behind `verify all`.
//!
//! Each criterion returns a [`CriterionResult`] instead of panicking so the
//! CLI can report every line and the test suite can assert on each one.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::cofinite_demo;
use crate::cosheaf::{self, Copresheaf, ImageClause, FadedCosheaf};
use crate::filters;
use crate::functors::{self, Representation};
use crate::generate::{self, MutationKind};
use crate::space::{FiniteSpace, PointSet};
use crate::tubewise::{self, FiberedSet, TubeCondition};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {}: {} ({:.2?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub max_points: usize,
    pub seed: u64,
    /// Random carriers of size 3 per sober space in the round-trip run.
    pub size3_samples: usize,
    pub counit_corpus: usize,
    pub tubewise_samples: usize,
    pub demo_bound: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_points: 4,
            seed: 0x5eed,
            size3_samples: 200,
            counit_corpus: 500,
            tubewise_samples: 10_000,
            demo_bound: 10,
        }
    }
}

/// Shared inputs: the topology universe and the generated cosheaf corpus.
pub struct Universe {
    pub spaces: Vec<FiniteSpace>,
    pub sober: Vec<FiniteSpace>,
    pub corpus: Vec<Copresheaf>,
}

impl Universe {
    pub fn build(cfg: &VerifyConfig) -> Universe {
        let spaces = generate::topology_universe(cfg.max_points).expect("within enumeration limit");
        let sober: Vec<FiniteSpace> =
            spaces.iter().filter(|s| filters::is_sober(s).sober).cloned().collect();
        let mut rng = generate::rng(cfg.seed);
        let corpus = (0..cfg.counit_corpus)
            .map(|i| {
                let space = &sober[i % sober.len()];
                let size = rng.gen_range(0..=4);
                generate::random_faded_cosheaf(space, size, rng.gen()).expect("sober space")
            })
            .collect();
        Universe { spaces, sober, corpus }
    }
}

fn timed(id: u8, name: &'static str, run: impl FnOnce() -> Result<String, String>) -> CriterionResult {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name, passed, detail, elapsed }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

pub fn left_inverse_round_trip(u: &Universe, cfg: &VerifyConfig) -> CriterionResult {
    timed(1, "L(CS(f)) = f over every sober space", || {
        let start = Instant::now();
        let t0 = u.spaces.iter().filter(|s| s.is_t0()).count();
        ensure!(
            u.sober.len() == t0 && u.sober.iter().all(|s| s.is_t0()),
            "sober spaces ({}) differ from T0 spaces ({t0})",
            u.sober.len()
        );
        let mut rng = generate::rng(cfg.seed ^ 1);
        let mut checked = 0usize;
        let mut morphisms = 0usize;
        for space in &u.sober {
            let mut fibered: Vec<FiberedSet> = Vec::new();
            for size in 0..=2 {
                fibered.extend(generate::all_fibered_sets(space, size).expect("small carrier"));
            }
            for _ in 0..cfg.size3_samples {
                fibered.push(generate::random_fibered_set_with(space, 3, &mut rng));
            }
            for f in &fibered {
                match functors::verify_left_inverse(f) {
                    Ok(true) => checked += 1,
                    other => return Err(format!("failed for {:?} over {:?}: {other:?}", f.map(), space)),
                }
            }
            // morphism half on a sample of tubewise candidates
            for _ in 0..20 {
                let f = generate::random_fibered_set_with(space, rng.gen_range(0..=3), &mut rng);
                let g = generate::random_fibered_set_with(space, rng.gen_range(1..=3), &mut rng);
                if space.num_points() == 0 && !f.is_empty() {
                    continue;
                }
                let phi = generate::random_function(f.len(), g.len(), &mut rng);
                if phi.len() != f.len() || !tubewise::is_tubewise(&phi, &f, &g, TubeCondition::Image).unwrap() {
                    continue;
                }
                ensure!(
                    functors::verify_left_inverse_on_morphism(&phi, &f, &g) == Ok(true),
                    "L(CS(phi)) != phi for {phi:?}"
                );
                morphisms += 1;
            }
        }
        let took = start.elapsed();
        ensure!(took < Duration::from_secs(60), "round trip took {took:?}");
        Ok(format!(
            "{} sober spaces (= T0 spaces), {checked} fibered sets, {morphisms} tubewise morphisms",
            u.sober.len()
        ))
    })
}

pub fn counit_isomorphism(u: &Universe) -> CriterionResult {
    timed(2, "counit X ≅ CS(L(X)) and support naturality", || {
        for (i, x) in u.corpus.iter().enumerate() {
            let faded = FadedCosheaf::new(x.clone()).map_err(|e| format!("corpus #{i}: {e}"))?;
            let iso = functors::build_counit_iso(&faded).map_err(|e| format!("corpus #{i}: {e}"))?;
            ensure!(iso.forward.then(&iso.inverse) == cosheaf::CosheafMorphism::identity(x), "corpus #{i}: not inverse");
            cosheaf::check_support_naturality(&faded).map_err(|e| format!("corpus #{i}: {e}"))?;
        }
        Ok(format!("{} relabeled faded cosheaves, zero failures", u.corpus.len()))
    })
}

pub fn image_identities(u: &Universe) -> CriterionResult {
    timed(3, "image identities on faded cosheaves; collapse example", || {
        for (i, x) in u.corpus.iter().enumerate() {
            let report = cosheaf::check_image_identities(x);
            ensure!(report.holds(), "corpus #{i}: {}", report.violations[0]);
        }
        let c = cosheaf::collapse_example();
        let space = c.space();
        let id = |pts: &[usize]| space.open_id(pts.iter().copied().collect::<PointSet>()).unwrap();
        let report = cosheaf::check_image_identities(&c);
        let expected = cosheaf::ImageViolation {
            v: id(&[0, 1, 2]),
            clause: ImageClause::Intersection { u: id(&[1]), w: id(&[2]) },
            covering: false,
            elements: vec![0],
        };
        ensure!(report.violations.contains(&expected), "collapse example lacks the {{1}},{{2}} witness");
        ensure!(
            report.violations.iter().all(|v| matches!(v.clause, ImageClause::Intersection { .. })),
            "collapse example violates the union clause"
        );
        ensure!(report.covering_violations().count() == 0, "collapse example violates a covering clause");
        ensure!(cosheaf::check_cosheaf_gluing(&c).is_ok(), "collapse example should be a cosheaf");
        Ok(format!(
            "{} cosheaves clean; collapse example fails only at U={{1}}, W={{2}}, element z",
            u.corpus.len()
        ))
    })
}

fn conditions_agree(phi: &[usize], f: &FiberedSet, g: &FiberedSet) -> Result<bool, String> {
    let verdicts: Vec<bool> = TubeCondition::ALL
        .iter()
        .map(|&c| tubewise::is_tubewise(phi, f, g, c).expect("shapes fit"))
        .collect();
    if verdicts.iter().any(|&v| v != verdicts[0]) {
        return Err(format!("conditions disagree {verdicts:?} for {phi:?}: {:?} -> {:?}", f.map(), g.map()));
    }
    Ok(verdicts[0])
}

fn small_fibered(space: &FiniteSpace, max: usize) -> Vec<FiberedSet> {
    (0..=max).flat_map(|n| generate::all_fibered_sets(space, n).expect("small carrier")).collect()
}

pub fn tubewise_conditions(u: &Universe, cfg: &VerifyConfig) -> CriterionResult {
    timed(4, "four tubewise conditions agree", || {
        let small: Vec<&FiniteSpace> = u.spaces.iter().filter(|s| s.num_points() <= 3).collect();
        let mut exhaustive = 0usize;
        let mut tubewise_count = 0usize;
        for space in &small {
            let fs = small_fibered(space, 2);
            for f in &fs {
                for g in &fs {
                    for phi in generate::all_functions(f.len(), g.len()) {
                        if phi.len() != f.len() {
                            continue;
                        }
                        tubewise_count += conditions_agree(&phi, f, g)? as usize;
                        exhaustive += 1;
                    }
                }
            }
        }
        let mut rng = generate::rng(cfg.seed ^ 4);
        let inhabited: Vec<&&FiniteSpace> = small.iter().filter(|s| s.num_points() > 0).collect();
        let mut sampled = 0usize;
        while sampled < cfg.tubewise_samples {
            let space = inhabited[sampled % inhabited.len()];
            let f = generate::random_fibered_set_with(space, rng.gen_range(0..=4), &mut rng);
            let g = generate::random_fibered_set_with(space, rng.gen_range(1..=4), &mut rng);
            let phi = generate::random_function(f.len(), g.len(), &mut rng);
            tubewise_count += conditions_agree(&phi, &f, &g)? as usize;
            sampled += 1;
        }
        Ok(format!(
            "{exhaustive} exhaustive (carriers <= 2) + {sampled} sampled candidates, {tubewise_count} tubewise"
        ))
    })
}

pub fn t1_collapse(u: &Universe) -> CriterionResult {
    timed(5, "tubewise = fibrewise over T1 spaces; Sierpinski witness", || {
        let mut checked = 0usize;
        let t1: Vec<&FiniteSpace> = u.spaces.iter().filter(|s| s.is_t1()).collect();
        for space in &t1 {
            ensure!(space.num_opens() == 1 << space.num_points(), "T1 space {space:?} is not discrete");
            let fs = small_fibered(space, 2);
            for f in &fs {
                for g in &fs {
                    for phi in generate::all_functions(f.len(), g.len()) {
                        if phi.len() != f.len() {
                            continue;
                        }
                        let tw = tubewise::is_tubewise(&phi, f, g, TubeCondition::Image).unwrap();
                        let fw = tubewise::is_fibrewise(&phi, f, g).unwrap();
                        ensure!(tw == fw, "tubewise {tw} but fibrewise {fw} for {phi:?}");
                        checked += 1;
                    }
                }
            }
        }
        let s = FiniteSpace::sierpinski();
        let f = FiberedSet::new(s.clone(), vec![1]).unwrap();
        let g = FiberedSet::new(s, vec![0]).unwrap();
        let psi = [0];
        ensure!(
            TubeCondition::ALL.iter().all(|&c| tubewise::is_tubewise(&psi, &g, &f, c).unwrap()),
            "Sierpinski witness is not tubewise"
        );
        ensure!(!tubewise::is_fibrewise(&psi, &g, &f).unwrap(), "Sierpinski witness is fibrewise");
        Ok(format!(
            "{} discrete spaces, {checked} candidates agree; Sierpinski y->x is tubewise, not fibrewise",
            t1.len()
        ))
    })
}

pub fn filter_cosheaf(u: &Universe) -> CriterionResult {
    timed(6, "Fil0 is a faded cosheaf, representable by an injective map", || {
        let mut covers = 0usize;
        let mut spaces = 0usize;
        for space in u.spaces.iter().filter(|s| s.is_t0()) {
            let (raw, _) = filters::fil0_raw(space);
            let report = cosheaf::run_checks(raw);
            ensure!(report.first_failure().is_none(), "Fil0 over {space:?} fails {:?}", report.first_failure());
            let fil = filters::fil0_cosheaf(space).expect("checked above");
            let faded = FadedCosheaf::new(fil.cosheaf.clone()).expect("checked above");
            match functors::representability_check(&faded).map_err(|e| e.to_string())? {
                Representation::Representable(iso) => {
                    let mut seen = iso.fibered.map().to_vec();
                    seen.sort();
                    seen.dedup();
                    ensure!(seen.len() == iso.fibered.len(), "f is not injective over {space:?}");
                }
                Representation::Obstructed(o) => return Err(format!("Fil0 over {space:?}: {o}")),
            }
            for v in space.open_ids() {
                for cover in cosheaf::all_covers(space, v) {
                    let by_union_find = cosheaf::gluing_witness_for_cover(&fil.cosheaf, v, &cover).is_none();
                    let by_restriction = filters::glue_by_restriction(&fil, v, &cover).is_ok();
                    ensure!(
                        by_union_find && by_restriction,
                        "gluing verdicts over {space:?}, {v}, cover {cover:?}: union-find {by_union_find}, restriction {by_restriction}"
                    );
                    covers += 1;
                }
            }
            spaces += 1;
        }
        Ok(format!("{spaces} T0 spaces; {covers} covers glue by both constructions"))
    })
}

pub fn sobriety(u: &Universe) -> CriterionResult {
    timed(7, "sober exactly when T0", || {
        let mut non_t0 = 0usize;
        for space in &u.spaces {
            let verdict = filters::is_sober(space);
            if space.is_t0() {
                ensure!(verdict.sober, "T0 space {space:?} reported non-sober");
            } else {
                ensure!(
                    matches!(verdict.witness, Some(filters::SobrietyWitness::Shared { .. })),
                    "non-T0 space {space:?} lacks a uniqueness witness"
                );
                non_t0 += 1;
            }
        }
        Ok(format!("{} T0 spaces sober, {non_t0} non-T0 spaces with shared-filter witnesses", u.spaces.len() - non_t0))
    })
}

pub fn cofinite(cfg: &VerifyConfig) -> CriterionResult {
    timed(8, "cofinite topology is T1 and not sober", || {
        let start = Instant::now();
        let report = cofinite_demo::demo_not_sober(cfg.demo_bound);
        let took = start.elapsed();
        ensure!(report.certified(), "demo not certified: {report:?}");
        ensure!(report.witnesses.len() == cfg.demo_bound as usize, "expected {} witnesses", cfg.demo_bound);
        ensure!(!report.fil0_representable, "Fil0 reported representable");
        ensure!(took < Duration::from_secs(1), "demo took {took:?}");
        Ok(format!("bound {}: T1, Generic prime, {} witnesses, in {took:.2?}", cfg.demo_bound, report.witnesses.len()))
    })
}

pub fn negative_fixtures(u: &Universe, cfg: &VerifyConfig) -> CriterionResult {
    timed(9, "each mutation fails exactly its target check", || {
        let mut counts = [0usize; 3];
        for (i, x) in u.corpus.iter().enumerate() {
            for (k, kind) in MutationKind::ALL.into_iter().enumerate() {
                let mutant = match generate::mutate(x, kind, cfg.seed.wrapping_add(i as u64)) {
                    Ok(m) => m,
                    Err(generate::GenerateError::NothingToMutate(_)) => continue,
                    Err(e) => return Err(e.to_string()),
                };
                let first = mutant.check().first_failure();
                ensure!(first == Some(kind.target()), "corpus #{i} {kind:?}: first failing check {first:?}");
                counts[k] += 1;
            }
        }
        ensure!(counts.iter().all(|&c| c > 0), "some mutation kind never applied: {counts:?}");
        Ok(format!(
            "break-injectivity {}, break-composition {}, add-orphan {}",
            counts[0], counts[1], counts[2]
        ))
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionResult> {
    let u = Universe::build(cfg);
    vec![
        left_inverse_round_trip(&u, cfg),
        counit_isomorphism(&u),
        image_identities(&u),
        tubewise_conditions(&u, cfg),
        t1_collapse(&u),
        filter_cosheaf(&u),
        sobriety(&u),
        cofinite(cfg),
        negative_fixtures(&u, cfg),
    ]
}
