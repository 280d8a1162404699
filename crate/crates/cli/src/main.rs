mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use circuitkit::diagram::{
    self, binomial, enumerate_matchings, enumerate_permutations, rising_double_factorial,
    rising_factorial, telescoping_matchings, telescoping_permutations, xd_scaling,
};
use circuitkit::graph::{component_count, parse_graph};
use circuitkit::partition::{
    circuit_count, circuit_partition_polynomial, enumerate_transition_systems,
    transition_system_count,
};
use circuitkit::planar::{
    faces, martin_check, medial_graph, subset_term, subset_to_partition_circuits,
    tutte_subset_expansion,
};
use circuitkit::sampling::{estimate_q, norm_moment, predicted_q, sample_vector, SampledVector};
use circuitkit::verify::{verify_corpus, VerifyOptions};
use circuitkit::{Budget, Ensemble, Error, Graph, GraphRef, PlanarMap, Rational, SCHEMA};
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, DimensionArgs, Family, Format};

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn new(text: impl Into<String>, mut json: Value) -> Self {
        if let Value::Object(map) = &mut json {
            map.insert("schema".into(), Value::from(SCHEMA));
        }
        Output {
            text: text.into(),
            json,
            code: 0,
        }
    }
}

enum Failure {
    Input(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => Failure::Guard(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.unwrap_or(match cli.command {
        Command::Martin { .. } => Format::Json,
        _ => Format::Text,
    });
    match run(cli.command) {
        Ok(out) => {
            match format {
                Format::Text => {
                    print!("{}", out.text);
                    if !out.text.ends_with('\n') {
                        println!();
                    }
                }
                Format::Json => println!("{}", out.json),
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(path: &Path) -> CliResult<Graph> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let graph = if text.trim_start().starts_with('{') {
        Graph::from_json(&text)
    } else {
        parse_graph(&text)
    };
    graph.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_planar(path: &Path) -> CliResult<PlanarMap> {
    match load(path)? {
        Graph::Planar(map) => Ok(map),
        other => Err(Failure::Input(format!(
            "{}: expected a planar map, found a {} graph",
            path.display(),
            other.kind_name()
        ))),
    }
}

fn parse_rational(s: &str) -> CliResult<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Failure::Input(format!("not a rational number: {s:?}")))
}

fn parse_subset(s: Option<&str>, m: usize) -> CliResult<Vec<usize>> {
    let Some(s) = s else {
        return Ok(Vec::new());
    };
    let mut subset = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e: usize = part
            .parse()
            .map_err(|_| Failure::Input(format!("not an edge index: {part:?}")))?;
        if e >= m {
            return Err(Failure::Input(format!("edge {e} out of range (m = {m})")));
        }
        subset.push(e);
    }
    subset.sort_unstable();
    subset.dedup();
    Ok(subset)
}

fn run(command: Command) -> CliResult<Output> {
    match command {
        Command::J { input, at, guard } => {
            let g = load(&input)?;
            let poly = circuit_partition_polynomial(&g, &guard.budget())?;
            let mut json = poly.to_json_value();
            let mut text = poly.to_string();
            if let Some(at) = at {
                let z = parse_rational(&at)?;
                let value = poly.evaluate(&z);
                text = format!("{text}\n{value}");
                json["z"] = Value::from(z.to_string());
                json["value"] = Value::from(value.to_string());
            }
            Ok(Output::new(text, json))
        }
        Command::Eulerian { input } => {
            let g = load(&input)?;
            let report = GraphRef::from(&g).eulerian_report();
            Ok(Output::new(
                report.to_string(),
                json!({ "kind": g.kind_name(), "report": report }),
            ))
        }
        Command::Transitions { input, list, guard } => {
            let g = load(&input)?;
            let budget = guard.budget();
            let count = transition_system_count(&g)?;
            let mut json = json!({ "count": count.to_string() });
            let text = if list {
                let systems: Vec<Vec<Vec<usize>>> = enumerate_transition_systems(&g, &budget)?
                    .map(|ts| ts.wirings)
                    .collect();
                let text = systems
                    .iter()
                    .map(|w| format!("{}\n", format_wirings(w)))
                    .collect::<String>();
                json["systems"] = json!(systems);
                text
            } else {
                count.to_string()
            };
            Ok(Output::new(text, json))
        }
        Command::Circuits {
            input,
            index,
            guard,
        } => {
            let g = load(&input)?;
            let mut systems = enumerate_transition_systems(&g, &guard.budget())?;
            let total = systems.len();
            let ts = usize::try_from(index)
                .ok()
                .and_then(|i| systems.nth(i))
                .ok_or_else(|| {
                    Failure::Input(format!("index {index} out of range ({total} systems)"))
                })?;
            let circuits = circuit_count(&g, &ts);
            Ok(Output::new(
                format!("{} {circuits}", format_wirings(&ts.wirings)),
                json!({ "index": index, "wirings": ts.wirings, "circuits": circuits }),
            ))
        }
        Command::QPredict { input, dim, guard } => {
            let g = load(&input)?;
            let q = zero_if_not_eulerian(predicted_q::<Rational>(
                &g,
                dim.k,
                dim.ensemble.into(),
                &guard.budget(),
            ))?;
            Ok(moment_output(q, &dim))
        }
        Command::QExact { input, dim, guard } => {
            let g = load(&input)?;
            let budget = Budget {
                contraction: guard.max_contraction,
                workers: guard.workers,
                ..Budget::default()
            };
            let q = zero_if_not_eulerian(diagram::contract_q_exact::<Rational>(
                &g,
                dim.k,
                dim.ensemble.into(),
                &budget,
            ))?;
            Ok(moment_output(q, &dim))
        }
        Command::QEstimate {
            input,
            dim,
            samples,
            seed,
            workers,
        } => {
            let g = load(&input)?;
            let k = usize::try_from(dim.k)
                .map_err(|_| Failure::Input(format!("k = {} is too large", dim.k)))?;
            let est = estimate_q::<f64>(
                &g,
                k,
                dim.ensemble.into(),
                samples,
                seed,
                &Budget::default().with_workers(workers),
            )?;
            let json: Value = serde_json::from_str(&est.to_json()).expect("estimate is valid JSON");
            Ok(Output::new(
                format!("{:e} {:e} {:e}", est.mean_re, est.mean_im, est.std_error),
                json,
            ))
        }
        Command::Sample { dim, seed } => {
            let k = usize::try_from(dim.k)
                .map_err(|_| Failure::Input(format!("k = {} is too large", dim.k)))?;
            let ensemble: Ensemble = dim.ensemble.into();
            let mut rng = circuitkit::sampling::chunk_rng(seed, 0);
            let (text, coords) = match sample_vector::<f64, _>(k, ensemble, &mut rng) {
                SampledVector::Complex(v) => (
                    v.iter()
                        .map(|z| format!("{:e} {:e}\n", z.re, z.im))
                        .collect::<String>(),
                    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
                ),
                SampledVector::Real(v) => (
                    v.iter().map(|x| format!("{x:e}\n")).collect::<String>(),
                    json!(v),
                ),
            };
            Ok(Output::new(
                text,
                json!({ "k": dim.k, "ensemble": ensemble, "seed": seed, "vector": coords }),
            ))
        }
        Command::NormMoment { d, dim } => {
            let m: Rational = norm_moment(d, dim.k, dim.ensemble.into());
            Ok(Output::new(
                m.to_string(),
                json!({ "d": d, "k": dim.k, "ensemble": Ensemble::from(dim.ensemble),
                        "moment": m.to_string() }),
            ))
        }
        Command::Xd { d, dim } => {
            let a: Rational = xd_scaling(d, dim.k, dim.ensemble.into());
            Ok(Output::new(
                a.to_string(),
                json!({ "d": d, "k": dim.k, "ensemble": Ensemble::from(dim.ensemble),
                        "scaling": a.to_string() }),
            ))
        }
        Command::Genfunc { family, d, k } => {
            let budget = Budget::default();
            let (sum, closed) = match family {
                Family::Permutations => (
                    diagram::cycle_genfunc_permutations(d, k, &budget)?,
                    rising_factorial(k, d as u64),
                ),
                Family::Matchings => (
                    diagram::cycle_genfunc_matchings(d, k, &budget)?,
                    rising_double_factorial(k, d as u64),
                ),
            };
            let mut json = json!({
                "family": family_name(family), "d": d, "k": k,
                "sum": sum.to_string(), "closed_form": closed.to_string(),
                "equal": sum == closed,
            });
            let mut text = format!("{sum} {closed}");
            if family == Family::Permutations {
                let ratio = Rational::new(sum.into(), diagram::factorial(d as u64).into());
                let binom = binomial(k + d as u64 - 1, d as u64);
                json["normalized"] = Value::from(ratio.to_string());
                json["binomial"] = Value::from(binom.to_string());
                text = format!("{text} {ratio} {binom}");
            }
            Ok(Output::new(text, json))
        }
        Command::Diagrams {
            family,
            d,
            telescoping,
        } => {
            let budget = Budget::default();
            let rows: Vec<(Vec<usize>, usize, Option<usize>)> = match (family, telescoping) {
                (Family::Permutations, false) => enumerate_permutations(d, &budget)?
                    .map(|p| (p.image().to_vec(), p.cycle_count(), None))
                    .collect(),
                (Family::Matchings, false) => enumerate_matchings(d, &budget)?
                    .map(|m| (m.partner().to_vec(), m.loop_count(), None))
                    .collect(),
                (Family::Permutations, true) => telescoping_permutations(d, &budget)?
                    .into_iter()
                    .map(|t| {
                        let c = t.diagram.cycle_count();
                        (t.diagram.image().to_vec(), c, Some(t.identity_factors))
                    })
                    .collect(),
                (Family::Matchings, true) => telescoping_matchings(d, &budget)?
                    .into_iter()
                    .map(|t| {
                        let c = t.diagram.loop_count();
                        (t.diagram.partner().to_vec(), c, Some(t.identity_factors))
                    })
                    .collect(),
            };
            let text = rows
                .iter()
                .map(|(map, cycles, ids)| {
                    let map = map
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" ");
                    match ids {
                        Some(i) => format!("{map} : {cycles} {i}\n"),
                        None => format!("{map} : {cycles}\n"),
                    }
                })
                .collect::<String>();
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|(map, cycles, ids)| {
                    let mut row = json!({ "map": map, "cycles": cycles });
                    if let Some(i) = ids {
                        row["identity_factors"] = Value::from(*i);
                    }
                    row
                })
                .collect();
            Ok(Output::new(
                text,
                json!({ "family": family_name(family), "d": d, "telescoping": telescoping,
                        "diagrams": json_rows }),
            ))
        }
        Command::Components { input, subset } => {
            let g = load(&input)?;
            let m = GraphRef::from(&g).edge_count();
            let subset = match subset {
                Some(s) => parse_subset(Some(&s), m)?,
                None => (0..m).collect(),
            };
            let (c, excess) = match &g {
                Graph::Directed(d) => (
                    component_count(&d.to_undirected(), subset.iter().copied()),
                    None,
                ),
                Graph::Undirected(u) => {
                    let t = subset_term(u, &subset);
                    (t.components, Some(t.excess))
                }
                Graph::Planar(p) => {
                    let t = subset_term(p.graph(), &subset);
                    (t.components, Some(t.excess))
                }
            };
            let mut json = json!({ "subset": subset, "components": c });
            let text = match excess {
                Some(l) => {
                    json["excess"] = Value::from(l);
                    format!("{c} {l}")
                }
                None => c.to_string(),
            };
            Ok(Output::new(text, json))
        }
        Command::Faces { input } => {
            let map = load_planar(&input)?;
            let orbits = faces(&map)?;
            let text = orbits
                .iter()
                .map(|f| {
                    let f = f.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                    format!("{f}\n")
                })
                .collect::<String>();
            Ok(Output::new(
                text,
                json!({ "count": orbits.len(), "faces": orbits }),
            ))
        }
        Command::Medial { input } => {
            let map = load_planar(&input)?;
            let medial = medial_graph(&map)?;
            let graph = Graph::Directed(medial.graph.clone());
            let mut doc = serde_json::to_value(graph.to_document()).expect("document serializes");
            doc["entry_dart"] = json!(medial.entry_dart);
            Ok(Output::new(graph.to_text(), doc))
        }
        Command::Tutte { input, x, y, guard } => {
            let map = load(&input)?;
            let g = match &map {
                Graph::Undirected(u) => u,
                Graph::Planar(p) => p.graph(),
                Graph::Directed(_) => {
                    return Err(Failure::Input(
                        "the Tutte polynomial needs an undirected graph".into(),
                    ))
                }
            };
            let (x, y) = (parse_rational(&x)?, parse_rational(&y)?);
            let budget = Budget {
                subset_edges: guard.max_subset_edges,
                workers: guard.workers,
                ..Budget::default()
            };
            let t = tutte_subset_expansion(g, &x, &y, &budget)?;
            Ok(Output::new(
                t.to_string(),
                json!({ "x": x.to_string(), "y": y.to_string(), "value": t.to_string() }),
            ))
        }
        Command::Martin { input, z, guard } => {
            let map = load_planar(&input)?;
            let z = parse_rational(&z)?;
            let check = martin_check(&map, &z, &guard.budget())?;
            let mut out = Output::new(
                format!("{} {} {}", check.lhs, check.rhs, check.equal),
                json!({ "z": z.to_string(), "lhs": check.lhs.to_string(),
                        "rhs": check.rhs.to_string(), "equal": check.equal }),
            );
            if !check.equal {
                out.code = 1;
            }
            Ok(out)
        }
        Command::SubsetCircuits { input, subset } => {
            let map = load_planar(&input)?;
            let subset = parse_subset(subset.as_deref(), map.graph().edge_count())?;
            let circuits = subset_to_partition_circuits(&map, &subset)?;
            let t = subset_term(map.graph(), &subset);
            let expected = t.components + t.excess;
            let mut out = Output::new(
                format!("{circuits} {expected}"),
                json!({ "subset": subset, "circuits": circuits, "components": t.components,
                        "excess": t.excess, "equal": circuits == expected }),
            );
            if circuits != expected {
                out.code = 1;
            }
            Ok(out)
        }
        Command::Convert { input } => {
            let g = load(&input)?;
            let doc = serde_json::to_value(g.to_document()).expect("document serializes");
            Ok(Output::new(g.to_text(), doc))
        }
        Command::Verify {
            dir,
            samples,
            seed,
            workers,
        } => {
            let opts = VerifyOptions {
                budget: Budget::default().with_workers(workers),
                mc_samples: samples,
                seed,
                ..VerifyOptions::default()
            };
            let rows = verify_corpus(&dir, &opts)?;
            let failed = rows.iter().filter(|r| !r.passed).count();
            let mut text = rows
                .iter()
                .map(|r| {
                    let mark = if r.passed { "ok  " } else { "FAIL" };
                    format!("{mark} {} {} {}\n", r.file, r.check, r.detail)
                })
                .collect::<String>();
            text.push_str(&format!("{} checks, {failed} failed\n", rows.len()));
            let mut out = Output::new(text, json!({ "failed": failed, "rows": rows }));
            if failed > 0 {
                out.code = 1;
            }
            Ok(out)
        }
    }
}

fn zero_if_not_eulerian(q: circuitkit::Result<Rational>) -> CliResult<Rational> {
    match q {
        Err(Error::NotEulerian(report)) => {
            eprintln!("note: graph is not Eulerian ({report}); the moment vanishes");
            Ok(Rational::from_integer(0.into()))
        }
        other => Ok(other?),
    }
}

fn moment_output(q: Rational, dim: &DimensionArgs) -> Output {
    Output::new(
        q.to_string(),
        json!({ "k": dim.k, "ensemble": Ensemble::from(dim.ensemble), "q": q.to_string() }),
    )
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::Permutations => "permutations",
        Family::Matchings => "matchings",
    }
}

fn format_wirings(wirings: &[Vec<usize>]) -> String {
    wirings
        .iter()
        .map(|w| {
            if w.is_empty() {
                "-".to_string()
            } else {
                w.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

#[cfg(test)]
mod tests {
    use super::args::{Cli, COMMAND_TABLE};
    use clap::CommandFactory;
    use std::collections::BTreeSet;

    #[test]
    fn command_table_matches_subcommands() {
        let cli = Cli::command();
        let subcommands: BTreeSet<&str> = cli.get_subcommands().map(|c| c.get_name()).collect();
        let table: BTreeSet<&str> = COMMAND_TABLE.iter().map(|(name, _)| *name).collect();
        assert_eq!(subcommands, table);
    }

    #[test]
    fn every_operation_is_reachable() {
        let reachable: BTreeSet<&str> = COMMAND_TABLE
            .iter()
            .flat_map(|(_, ops)| ops.iter().copied())
            .collect();
        let operations = [
            "parse_graph",
            "eulerian_check",
            "component_count",
            "enumerate_transition_systems",
            "circuit_count",
            "circuit_partition_polynomial",
            "evaluate",
            "enumerate_permutations",
            "enumerate_matchings",
            "cycle_genfunc_permutations",
            "cycle_genfunc_matchings",
            "xd_scaling",
            "contract_q_exact",
            "sample_vector",
            "product_of_inner_products",
            "estimate_q",
            "predicted_q",
            "norm_moment",
            "faces",
            "medial_graph",
            "tutte_subset_expansion",
            "martin_check",
            "subset_to_partition_circuits",
        ];
        for op in operations {
            assert!(
                reachable.contains(op),
                "{op} is not reachable from any command"
            );
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
