//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use circuitkit::diagram::{
    binomial, contract_q_exact, cycle_genfunc_matchings, cycle_genfunc_permutations, factorial,
    rising_factorial,
};
use circuitkit::graph::parse_graph;
use circuitkit::partition::circuit_partition_polynomial;
use circuitkit::planar::{martin_check, subset_term, subset_to_partition_circuits};
use circuitkit::sampling::{estimate_q, predicted_q};
use circuitkit::verify::expected_partition_total;
use circuitkit::{
    Budget, Complex64, DirectedMultigraph, Ensemble, Error, Graph, GraphKind, GraphRef, MCEstimate,
    Rational, UndirectedMultigraph,
};
use num_bigint::BigUint;

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, Graph)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("directory entry").path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("graph" | "planar")
            )
        })
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).expect("readable corpus file");
            let graph = parse_graph(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, graph)
        })
        .collect()
}

fn load(name: &str) -> Graph {
    let text = fs::read_to_string(corpus_dir().join(name)).expect("readable corpus file");
    parse_graph(&text).expect("valid corpus file")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_circuitkit"))
        .arg("j")
        .arg(corpus_dir().join("fig1.graph"))
        .output()
        .expect("cli runs");
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    Outcome::new(
        out.status.success() && stdout.trim() == "0 1 1" && elapsed < Duration::from_secs(1),
        format!("output {:?} in {elapsed:.2?}", stdout.trim()),
    )
}

fn oracle_equality(kind: GraphKind, ensembles: [Ensemble; 2], limit: Duration) -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, graph) in corpus() {
        let g = GraphRef::from(&graph);
        if g.kind() != kind {
            continue;
        }
        for k in 1..=3u64 {
            if (k as f64).powi(g.edge_count() as i32) > 1e7 {
                continue;
            }
            for ens in ensembles {
                let exact = contract_q_exact::<Rational>(g, k, ens, &budget);
                let predicted = predicted_q::<Rational>(g, k, ens, &budget);
                let agree = match (&exact, &predicted) {
                    (Ok(a), Ok(b)) => a == b,
                    (Err(Error::NotEulerian(_)), Err(Error::NotEulerian(_))) => true,
                    _ => false,
                };
                checked += 1;
                if !agree {
                    failures.push(format!("{name} {ens} k={k}: {exact:?} vs {predicted:?}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && checked > 0 && elapsed < limit,
        format!(
            "{checked} comparisons, {} mismatches, {elapsed:.2?}{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut martin = 0;
    let mut subsets = 0u64;
    let mut failures = Vec::new();
    for (name, graph) in corpus() {
        let Graph::Planar(map) = graph else { continue };
        for z in 1..=5i64 {
            let z = Rational::from_integer(z.into());
            match martin_check(&map, &z, &budget) {
                Ok(c) if c.equal => martin += 1,
                other => failures.push(format!("{name} martin z={z}: {other:?}")),
            }
        }
        let m = map.graph().edge_count();
        if m > 12 {
            failures.push(format!(
                "{name}: {m} edges, too many for the exhaustive check"
            ));
            continue;
        }
        for mask in 0u32..(1 << m) {
            let subset: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
            let t = subset_term(map.graph(), &subset);
            match subset_to_partition_circuits(&map, &subset) {
                Ok(c) if c == t.components + t.excess => subsets += 1,
                other => failures.push(format!("{name} subset {subset:?}: {other:?}")),
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && martin > 0 && elapsed < Duration::from_secs(60),
        format!(
            "{martin} identity checks, {subsets} subsets, {} failures, {elapsed:.2?}{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn monte_carlo_runs(workers: usize) -> circuitkit::Result<(MCEstimate, MCEstimate)> {
    let budget = Budget::default().with_workers(workers);
    let fig1 = load("fig1.graph");
    let edge = load("single-edge.graph");
    let a = estimate_q::<f64>(&fig1, 2, Ensemble::ComplexSphere, 1_000_000, SEED, &budget)?;
    let b = estimate_q::<f64>(&edge, 2, Ensemble::ComplexSphere, 100_000, SEED, &budget)?;
    Ok((a, b))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (fig1, edge) = match monte_carlo_runs(0) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let fig1_ok = fig1.within(Complex64::new(0.125, 0.0), 4.0);
    let edge_ok = edge.within(Complex64::new(0.0, 0.0), 4.0);
    Outcome::new(
        fig1_ok && edge_ok && elapsed < Duration::from_secs(120),
        format!(
            "fig1 {:.6}{:+.6}i ± {:.2e} vs 1/8; single-edge {:.2e}{:+.2e}i ± {:.2e} vs 0; {elapsed:.2?}",
            fig1.mean_re, fig1.mean_im, fig1.std_error, edge.mean_re, edge.mean_im, edge.std_error
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut failures = Vec::new();
    for d in 0..=6u64 {
        for k in 1..=5u64 {
            let sum = cycle_genfunc_permutations(d as usize, k, &budget).expect("within guard");
            let closed = factorial(k + d - 1) / factorial(k - 1);
            if sum != closed || sum != rising_factorial(k, d) {
                failures.push(format!("permutations d={d} k={k}: {sum} vs {closed}"));
            }
            if &sum / factorial(d) != binomial(k + d - 1, d) || &sum % factorial(d) != BigUint::ZERO
            {
                failures.push(format!(
                    "permutations d={d} k={k}: {sum}/d! is not C(k+d-1,d)"
                ));
            }
        }
    }
    for d in 0..=5u64 {
        for k in 1..=5u64 {
            let sum = cycle_genfunc_matchings(d as usize, k, &budget).expect("within guard");
            let closed: BigUint = (0..d).map(|i| BigUint::from(k + 2 * i)).product();
            if sum != closed {
                failures.push(format!("matchings d={d} k={k}: {sum} vs {closed}"));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "{} mismatches, {elapsed:.2?}{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let mut failures = Vec::new();
    let mut graphs = 0;
    for (name, graph) in corpus() {
        let g = GraphRef::from(&graph);
        if g.require_eulerian().is_err() {
            continue;
        }
        graphs += 1;
        let total = circuit_partition_polynomial(g, &budget)
            .expect("within guard")
            .total();
        let expected = expected_partition_total(g);
        if total != expected {
            failures.push(format!("{name}: sum {total}, expected {expected}"));
        }
    }

    let directed = |n, e: &[(usize, usize)]| DirectedMultigraph::new(n, e.to_vec()).unwrap();
    let undirected = |n, e: &[(usize, usize)]| UndirectedMultigraph::new(n, e.to_vec()).unwrap();
    let mut pairs = 0;
    let mut check_pair = |label: &str, a: GraphRef, b: GraphRef, union: GraphRef| {
        let ja = circuit_partition_polynomial(a, &budget).unwrap();
        let jb = circuit_partition_polynomial(b, &budget).unwrap();
        let ju = circuit_partition_polynomial(union, &budget).unwrap();
        pairs += 1;
        if ja.product(&jb) != ju {
            failures.push(format!(
                "{label}: j(A)j(B) = {} but j(A+B) = {ju}",
                ja.product(&jb)
            ));
        }
    };
    let fig1 = match load("fig1.graph") {
        Graph::Directed(g) => g,
        _ => unreachable!(),
    };
    let triangle = directed(3, &[(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)]);
    check_pair(
        "fig1 + bidirected triangle",
        (&fig1).into(),
        (&triangle).into(),
        (&fig1.disjoint_union(&triangle)).into(),
    );
    let loops = directed(1, &[(0, 0), (0, 0)]);
    let digon = directed(2, &[(0, 1), (1, 0), (0, 1), (1, 0)]);
    check_pair(
        "two loops + double digon",
        (&loops).into(),
        (&digon).into(),
        (&loops.disjoint_union(&digon)).into(),
    );
    let eight = undirected(1, &[(0, 0), (0, 0)]);
    let bowtie = undirected(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
    check_pair(
        "figure eight + bowtie",
        (&eight).into(),
        (&bowtie).into(),
        (&eight.disjoint_union(&bowtie)).into(),
    );

    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && graphs > 0 && pairs == 3 && elapsed < Duration::from_secs(10),
        format!(
            "{graphs} Eulerian corpus graphs, {pairs} union pairs, {} failures, {elapsed:.2?}{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_8() -> Outcome {
    let json = |workers| {
        monte_carlo_runs(workers).map(|(a, b)| format!("{}\n{}", a.to_json(), b.to_json()))
    };
    match (json(1), json(4)) {
        (Ok(one), Ok(four)) => Outcome::new(
            one == four,
            format!(
                "workers=1 and workers=4 JSON {}",
                if one == four { "identical" } else { "differ" }
            ),
        ),
        (a, b) => Outcome::new(false, format!("{:?} / {:?}", a.err(), b.err())),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        (
            "1 circuit partition polynomial of fig1 via CLI",
            criterion_1,
        ),
        ("2 directed contraction equals prediction", || {
            oracle_equality(
                GraphKind::Directed,
                [Ensemble::ComplexSphere, Ensemble::ComplexGaussian],
                Duration::from_secs(120),
            )
        }),
        ("3 undirected contraction equals prediction", || {
            oracle_equality(
                GraphKind::Undirected,
                [Ensemble::RealSphere, Ensemble::RealGaussian],
                Duration::from_secs(120),
            )
        }),
        ("4 medial identity and subset bijection", criterion_4),
        ("5 Monte Carlo agreement", criterion_5),
        ("6 generating-function identities", criterion_6),
        ("7 counting invariants", criterion_7),
        ("8 worker-count determinism", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        let mark = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failed += 1;
        }
        println!("[{mark}] {name}: {}", outcome.detail);
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
