//! Invariant suite over a directory of graph files (`*.graph`, `*.planar`).

use std::path::Path;

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::budget::Budget;
use crate::diagram::{contract_q_exact, double_factorial, factorial, Ensemble};
use crate::error::{Error, Result};
use crate::graph::{parse_graph, Graph, GraphRef};
use crate::partition::{circuit_partition_polynomial, IntPolynomial};
use crate::planar::{
    faces, martin_check, medial_graph, subset_term, subset_to_partition_circuits, PlanarMap,
};
use crate::sampling::{estimate_q, predicted_q};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub file: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub budget: Budget,
    /// Monte Carlo samples per graph and ensemble; 0 skips sampling.
    pub mc_samples: u64,
    pub seed: u64,
    /// Largest edge count for the exhaustive subset bijection check.
    pub max_bijection_edges: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: Budget::default(),
            mc_samples: 100_000,
            seed: 1,
            max_bijection_edges: 12,
        }
    }
}

struct Rows<'a> {
    file: &'a str,
    rows: Vec<CheckRow>,
}

impl Rows<'_> {
    fn push(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.rows.push(CheckRow {
            file: self.file.to_string(),
            check: check.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn fail(&mut self, check: impl Into<String>, err: &Error) {
        self.push(check, false, err.to_string());
    }
}

/// `∏_v d_v!` (directed) or `∏_v (deg(v)-1)!!` (undirected), from degrees alone.
pub fn expected_partition_total(g: GraphRef<'_>) -> BigUint {
    (0..g.vertex_count())
        .map(|v| match g {
            GraphRef::Directed(d) => factorial(d.in_degree(v) as u64),
            GraphRef::Undirected(u) => match u.degree(v) {
                0 => BigUint::one(),
                deg => double_factorial(deg as u64 - 1),
            },
        })
        .product()
}

fn ensembles_for(g: GraphRef<'_>) -> [Ensemble; 2] {
    match g {
        GraphRef::Directed(_) => [Ensemble::ComplexSphere, Ensemble::ComplexGaussian],
        GraphRef::Undirected(_) => [Ensemble::RealSphere, Ensemble::RealGaussian],
    }
}

fn check_multigraph(rows: &mut Rows<'_>, g: GraphRef<'_>, opts: &VerifyOptions) {
    let budget = &opts.budget;
    let report = g.eulerian_report();
    rows.push("eulerian", true, report.to_string());
    if !report.is_eulerian {
        // Only the vanishing of the sampled mean can be checked.
        if opts.mc_samples >= 2 {
            for ens in ensembles_for(g) {
                match estimate_q::<f64>(g, 2, ens, opts.mc_samples, opts.seed, budget) {
                    Ok(est) => rows.push(
                        format!("mc-vanishes {ens} k=2"),
                        est.within(Complex::zero(), 4.0),
                        format!("mean {} ± {}", est.mean(), est.std_error),
                    ),
                    Err(e) => rows.fail(format!("mc-vanishes {ens} k=2"), &e),
                }
            }
        }
        return;
    }

    let poly = match circuit_partition_polynomial(g, budget) {
        Ok(p) => p,
        Err(e) => return rows.fail("polynomial", &e),
    };
    let expected = expected_partition_total(g);
    rows.push(
        "partition-total",
        poly.total() == expected
            && poly.evaluate(&Rational::one()) == Rational::from_integer(expected.clone().into()),
        format!("j = {poly}, sum {} vs {expected}", poly.total()),
    );
    let m = g.edge_count();
    rows.push(
        "degree-bounds",
        poly.degree().is_some_and(|d| d <= m) && (m == 0 || poly.coefficient(0).is_zero()),
        format!("degree {:?}, m = {m}", poly.degree()),
    );
    if let GraphRef::Directed(d) = g {
        match circuit_partition_polynomial(&d.reversed(), budget) {
            Ok(rev) => rows.push("reversal", rev == poly, format!("reversed j = {rev}")),
            Err(e) => rows.fail("reversal", &e),
        }
    }

    for k in 1..=3u64 {
        if BigUint::from(k).pow(m as u32) > BigUint::from(budget.contraction) {
            continue;
        }
        for ens in ensembles_for(g) {
            let name = format!("oracle {ens} k={k}");
            match (
                contract_q_exact::<Rational>(g, k, ens, budget),
                predicted_q::<Rational>(g, k, ens, budget),
            ) {
                (Ok(oracle), Ok(pred)) => rows.push(
                    name,
                    oracle == pred,
                    format!("contraction {oracle}, prediction {pred}"),
                ),
                (Err(e), _) | (_, Err(e)) => rows.fail(name, &e),
            }
        }
    }

    if opts.mc_samples >= 2 {
        for ens in ensembles_for(g) {
            let name = format!("mc {ens} k=2");
            let target = match predicted_q::<Rational>(g, 2, ens, budget) {
                Ok(q) => q.to_f64().unwrap_or(f64::NAN),
                Err(e) => {
                    rows.fail(name, &e);
                    continue;
                }
            };
            let run = |seed| estimate_q::<f64>(g, 2, ens, opts.mc_samples, seed, budget);
            // One rerun with a second seed before declaring failure.
            let outcome = run(opts.seed).and_then(|first| {
                if first.within(Complex::new(target, 0.0), 4.0) {
                    Ok(first)
                } else {
                    run(opts.seed.wrapping_add(1))
                }
            });
            match outcome {
                Ok(est) => rows.push(
                    name,
                    est.within(Complex::new(target, 0.0), 4.0),
                    format!("mean {} ± {} vs {target}", est.mean(), est.std_error),
                ),
                Err(e) => rows.fail(name, &e),
            }
        }
    }
}

fn check_planar(rows: &mut Rows<'_>, map: &PlanarMap, opts: &VerifyOptions) {
    let budget = &opts.budget;
    let g = map.graph();
    let m = g.edge_count();
    match faces(map) {
        Ok(f) => rows.push("euler", true, format!("{} faces", f.len())),
        Err(e) => return rows.fail("euler", &e),
    }
    let medial = match medial_graph(map) {
        Ok(md) => md,
        Err(e) => return rows.fail("medial", &e),
    };
    rows.push(
        "medial",
        medial.graph.eulerian_report().is_eulerian
            && medial.graph.edge_count() == 2 * m
            && (0..m).all(|v| medial.graph.in_degree(v) == 2),
        format!("{} medial edges", medial.graph.edge_count()),
    );
    for z in 1..=5i64 {
        let name = format!("martin z={z}");
        match martin_check(map, &Rational::from_integer(z.into()), budget) {
            Ok(c) => rows.push(name, c.equal, format!("lhs {}, rhs {}", c.lhs, c.rhs)),
            Err(e) => rows.fail(name, &e),
        }
    }

    if m <= opts.max_bijection_edges {
        let mut mismatches = 0usize;
        let mut by_circuits = vec![BigUint::zero(); m + g.vertex_count() + 1];
        for mask in 0u64..1 << m {
            let subset: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
            let term = subset_term(g, &subset);
            match subset_to_partition_circuits(map, &subset) {
                Ok(c) => {
                    if c != term.components + term.excess {
                        mismatches += 1;
                    }
                    by_circuits[c] += 1u32;
                }
                Err(e) => return rows.fail("bijection", &e),
            }
        }
        rows.push(
            "bijection",
            mismatches == 0,
            format!("{} subsets, {mismatches} mismatches", 1u64 << m),
        );
        let from_subsets = IntPolynomial::new(crate::graph::GraphKind::Directed, by_circuits);
        match circuit_partition_polynomial(&medial.graph, budget) {
            Ok(j) => rows.push(
                "subset-polynomial",
                j == from_subsets,
                format!("j(G_m) = {j}, subsets give {from_subsets}"),
            ),
            Err(e) => rows.fail("subset-polynomial", &e),
        }
    }

    let mirror = map.mirrored();
    match (
        medial_graph(map).and_then(|md| circuit_partition_polynomial(&md.graph, budget)),
        medial_graph(&mirror).and_then(|md| circuit_partition_polynomial(&md.graph, budget)),
    ) {
        (Ok(a), Ok(b)) => rows.push("mirror", a == b, format!("j(G_m) = {a}")),
        (Err(e), _) | (_, Err(e)) => rows.fail("mirror", &e),
    }
}

/// All checks that apply to one parsed graph.
pub fn verify_graph(file: &str, graph: &Graph, opts: &VerifyOptions) -> Vec<CheckRow> {
    let mut rows = Rows {
        file,
        rows: Vec::new(),
    };
    match graph {
        Graph::Directed(_) | Graph::Undirected(_) => {
            check_multigraph(&mut rows, graph.as_graph_ref(), opts)
        }
        Graph::Planar(map) => check_planar(&mut rows, map, opts),
    }
    rows.rows
}

/// Runs [`verify_graph`] on every `*.graph` and `*.planar` file in `dir`,
/// in file-name order. Unparsable files produce a failed `parse` row.
pub fn verify_corpus(dir: &Path, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|x| x.to_str()),
                Some("graph" | "planar")
            )
        })
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    for path in paths {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let parsed = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidArgument(e.to_string()))
            .and_then(|text| parse_graph(&text));
        match parsed {
            Ok(graph) => rows.extend(verify_graph(&name, &graph, opts)),
            Err(e) => rows.push(CheckRow {
                file: name,
                check: "parse".into(),
                passed: false,
                detail: e.to_string(),
            }),
        }
    }
    Ok(rows)
}
