use std::path::PathBuf;

use circuitkit::{Budget, Ensemble};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "circuitkit",
    version,
    about = "Circuit partition polynomials and moments of products of inner products",
    after_help = "Rationals are written as \"p/q\" or as integers. \
                  Exit codes: 0 success, 1 verification failure, 2 input error, 3 guard exceeded."
)]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    ComplexSphere,
    RealSphere,
    ComplexGaussian,
    RealGaussian,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::ComplexSphere => Ensemble::ComplexSphere,
            EnsembleArg::RealSphere => Ensemble::RealSphere,
            EnsembleArg::ComplexGaussian => Ensemble::ComplexGaussian,
            EnsembleArg::RealGaussian => Ensemble::RealGaussian,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Permutations,
    Matchings,
}

#[derive(Debug, Args)]
pub struct EnumerationGuard {
    /// Refuse enumerations with more transition systems than this
    #[arg(long, default_value_t = 100_000_000)]
    pub max_transitions: u64,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl EnumerationGuard {
    pub fn budget(&self) -> Budget {
        Budget {
            transition_systems: self.max_transitions,
            workers: self.workers,
            ..Budget::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ContractionGuard {
    /// Refuse contractions with more than this many index assignments (k^m)
    #[arg(long, default_value_t = 10_000_000)]
    pub max_contraction: u64,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SubsetGuard {
    /// Refuse subset expansions over graphs with more edges than this
    #[arg(long, default_value_t = 24)]
    pub max_subset_edges: u32,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    /// Vector dimension k
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,

    #[arg(long, value_enum)]
    pub ensemble: EnsembleArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circuit partition polynomial j(G;z), as coefficients r_0 r_1 ... r_deg
    J {
        input: PathBuf,
        /// Also evaluate at this rational point
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        guard: EnumerationGuard,
    },
    /// Degree balance report
    Eulerian { input: PathBuf },
    /// Count or list transition systems
    Transitions {
        input: PathBuf,
        /// Print every transition system, one per line
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        guard: EnumerationGuard,
    },
    /// Circuit count of the transition system with the given lexicographic index
    Circuits {
        input: PathBuf,
        #[arg(long)]
        index: u64,
        #[command(flatten)]
        guard: EnumerationGuard,
    },
    /// Exact q(G;k) from the circuit partition polynomial
    QPredict {
        input: PathBuf,
        #[command(flatten)]
        dim: DimensionArgs,
        #[command(flatten)]
        guard: EnumerationGuard,
    },
    /// Exact q(G;k) by brute-force tensor contraction
    QExact {
        input: PathBuf,
        #[command(flatten)]
        dim: DimensionArgs,
        #[command(flatten)]
        guard: ContractionGuard,
    },
    /// Monte Carlo estimate of q(G;k)
    QEstimate {
        input: PathBuf,
        #[command(flatten)]
        dim: DimensionArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (0 = all cores); does not change the result
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Draw one random vector
    Sample {
        #[command(flatten)]
        dim: DimensionArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact E|x|^(2d)
    NormMoment {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        dim: DimensionArgs,
    },
    /// Scaling a with X_d = a * (sum of diagrams)
    Xd {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        dim: DimensionArgs,
    },
    /// Sum over diagrams of k^(cycles), by enumeration, with the closed form
    Genfunc {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// List permutation or matching diagrams
    Diagrams {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        d: usize,
        /// Expand the telescoping product instead of enumerating directly
        #[arg(long)]
        telescoping: bool,
    },
    /// Connected components of the spanning subgraph on an edge subset
    Components {
        input: PathBuf,
        /// Comma-separated edge indices; all edges when omitted
        #[arg(long)]
        subset: Option<String>,
    },
    /// Face orbits of a planar map
    Faces { input: PathBuf },
    /// Oriented medial graph of a planar map, in the directed graph format
    Medial { input: PathBuf },
    /// Tutte polynomial T(G;x,y) by subset expansion
    Tutte {
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        guard: SubsetGuard,
    },
    /// Both sides of j(G_m;z) = z^c(G) T(G;z+1,z+1)
    Martin {
        input: PathBuf,
        #[arg(long)]
        z: String,
        #[command(flatten)]
        guard: EnumerationGuard,
    },
    /// Circuits of the medial partition for an edge subset, with c(S) + l(S)
    SubsetCircuits {
        input: PathBuf,
        /// Comma-separated edge indices; empty when omitted
        #[arg(long)]
        subset: Option<String>,
    },
    /// Re-emit a graph file as text or JSON
    Convert { input: PathBuf },
    /// Run the invariant suite over a corpus directory
    Verify {
        dir: PathBuf,
        /// Monte Carlo samples per graph and ensemble (0 skips sampling)
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

/// Library operations each command reaches.
#[cfg(test)]
pub const COMMAND_TABLE: &[(&str, &[&str])] = &[
    (
        "j",
        &["parse_graph", "circuit_partition_polynomial", "evaluate"],
    ),
    ("eulerian", &["parse_graph", "eulerian_check"]),
    ("transitions", &["enumerate_transition_systems"]),
    (
        "circuits",
        &["enumerate_transition_systems", "circuit_count"],
    ),
    ("q-predict", &["predicted_q"]),
    ("q-exact", &["contract_q_exact"]),
    (
        "q-estimate",
        &["estimate_q", "product_of_inner_products", "sample_vector"],
    ),
    ("sample", &["sample_vector"]),
    ("norm-moment", &["norm_moment"]),
    ("xd", &["xd_scaling"]),
    (
        "genfunc",
        &["cycle_genfunc_permutations", "cycle_genfunc_matchings"],
    ),
    (
        "diagrams",
        &[
            "enumerate_permutations",
            "enumerate_matchings",
            "telescoping_permutations",
            "telescoping_matchings",
        ],
    ),
    ("components", &["component_count"]),
    ("faces", &["faces"]),
    ("medial", &["medial_graph"]),
    ("tutte", &["tutte_subset_expansion"]),
    ("martin", &["martin_check"]),
    ("subset-circuits", &["subset_to_partition_circuits"]),
    ("convert", &["parse_graph"]),
    ("verify", &["verify_corpus"]),
];
