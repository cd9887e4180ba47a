//! Acceptance run: one line per criterion, then the independent oracles those
//! criteria lean on. Exits nonzero if anything fails.

use std::collections::BTreeSet;
use std::process::{exit, Command};
use std::time::{Duration, Instant};

use faded_cosheaf::space::FiniteSpace;
use faded_cosheaf::verify::{self, CriterionResult, Universe, VerifyConfig};

/// Counts labeled topologies on `n` points the long way: a finite topology is
/// the same thing as a preorder (x ≤ y iff every open containing y contains x),
/// so enumerate reflexive transitive relations directly.
fn preorder_counts(n: usize) -> (usize, usize) {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let (mut all, mut t0) = (0, 0);
    for mask in 0u32..1 << pairs.len() {
        let mut rel = vec![vec![false; n]; n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            rel[a][b] = mask >> i & 1 == 1;
        }
        for (a, row) in rel.iter_mut().enumerate() {
            row[a] = true;
        }
        let transitive = (0..n).all(|a| {
            (0..n).all(|b| !rel[a][b] || (0..n).all(|c| !rel[b][c] || rel[a][c]))
        });
        if !transitive {
            continue;
        }
        all += 1;
        let antisymmetric = (0..n).all(|a| (0..n).all(|b| a == b || !(rel[a][b] && rel[b][a])));
        if antisymmetric {
            t0 += 1;
        }
    }
    (all, t0)
}

/// T0 by definition: any two points are told apart by some open.
fn separates_points(space: &FiniteSpace) -> bool {
    let n = space.num_points();
    (0..n).all(|a| {
        (a + 1..n).all(|b| space.opens().iter().any(|u| u.contains(a) != u.contains(b)))
    })
}

fn oracle_topology_counts(cfg: &VerifyConfig) -> Result<String, String> {
    let mut parts = Vec::new();
    for n in 0..=cfg.max_points {
        let spaces = faded_cosheaf::generate::enumerate_topologies(n).map_err(|e| e.to_string())?;
        let distinct: BTreeSet<Vec<u64>> =
            spaces.iter().map(|s| s.opens().iter().map(|u| u.bits()).collect()).collect();
        let ours = (spaces.len(), spaces.iter().filter(|s| separates_points(s)).count());
        let oracle = preorder_counts(n);
        if distinct.len() != spaces.len() || ours != oracle {
            return Err(format!("n = {n}: enumerated {ours:?}, preorders give {oracle:?}"));
        }
        parts.push(format!("{}/{}", oracle.0, oracle.1));
    }
    Ok(format!("topologies/T0 per n: {}", parts.join(", ")))
}

fn oracle_cli_demo() -> Result<String, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_faded-cosheaf"))
        .args(["demo", "cofinite", "--bound", "10"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(0) {
        return Err(format!("exit code {:?}", out.status.code()));
    }
    if !text.contains("not sober") || !text.contains("Generic") {
        return Err(format!("report lacks verdict or witness:\n{text}"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:.2?}"));
    }
    Ok(format!("`demo cofinite --bound 10` exit 0 in {elapsed:.2?}"))
}

fn oracle_line(name: &str, outcome: Result<String, String>) -> bool {
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    println!("[{}] oracle {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

fn main() {
    let cfg = VerifyConfig::default();
    let start = Instant::now();
    let universe = Universe::build(&cfg);
    println!(
        "universe: {} topologies, {} sober, {} generated cosheaves ({:.2?})",
        universe.spaces.len(),
        universe.sober.len(),
        universe.corpus.len(),
        start.elapsed()
    );

    let criteria: Vec<CriterionResult> = vec![
        verify::left_inverse_round_trip(&universe, &cfg),
        verify::counit_isomorphism(&universe),
        verify::image_identities(&universe),
        verify::tubewise_conditions(&universe, &cfg),
        verify::t1_collapse(&universe),
        verify::filter_cosheaf(&universe),
        verify::sobriety(&universe),
        verify::cofinite(&cfg),
        verify::negative_fixtures(&universe, &cfg),
    ];
    let mut ok = true;
    for r in &criteria {
        println!("{r}");
        ok &= r.passed;
    }
    ok &= oracle_line("topology enumeration", oracle_topology_counts(&cfg));
    ok &= oracle_line("cofinite demo via CLI", oracle_cli_demo());

    let passed = criteria.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed in {:.2?}", criteria.len(), start.elapsed());
    if !ok {
        exit(1);
    }
}
