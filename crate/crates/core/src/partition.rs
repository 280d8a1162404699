//! Circuit partition polynomials by exhaustive enumeration of transition
//! systems.
//!
//! A transition system picks, at every vertex, how the edges arriving there
//! continue: a bijection from incoming to outgoing edges for directed graphs,
//! a perfect matching of the incident half-edges for undirected ones.
//! Transition systems are in bijection with circuit partitions, so tallying
//! the circuit count of each one gives the coefficients `r_t` of
//! `j(G;z) = Σ r_t z^t`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::diagram::{canonical_matchings, double_factorial, factorial, lex_permutations};
use crate::error::{Error, Result};
use crate::graph::{GraphKind, GraphRef};
use crate::scalar::Scalar;

/// Polynomial with nonnegative big-integer coefficients; coefficient `t` is
/// the number of circuit partitions with `t` circuits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    kind: GraphKind,
    coefficients: Vec<BigUint>,
}

impl IntPolynomial {
    pub fn new(kind: GraphKind, mut coefficients: Vec<BigUint>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        IntPolynomial { kind, coefficients }
    }

    pub fn one(kind: GraphKind) -> Self {
        IntPolynomial::new(kind, vec![BigUint::one()])
    }

    /// Whether the coefficients count directed or undirected circuits.
    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    pub fn coefficient(&self, t: usize) -> BigUint {
        self.coefficients.get(t).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// `Σ_t r_t`, the number of circuit partitions.
    pub fn total(&self) -> BigUint {
        self.coefficients.iter().sum()
    }

    pub fn evaluate<S: Scalar>(&self, z: &S) -> S {
        evaluate(self, z)
    }

    pub fn product(&self, other: &Self) -> Self {
        if self.coefficients.is_empty() || other.coefficients.is_empty() {
            return IntPolynomial::new(self.kind, Vec::new());
        }
        let mut out = vec![BigUint::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(self.kind, out)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'a str,
            kind: GraphKind,
            coefficients: Vec<String>,
        }
        serde_json::to_value(Doc {
            schema: crate::SCHEMA,
            kind: self.kind,
            coefficients: self.coefficients.iter().map(ToString::to_string).collect(),
        })
        .expect("polynomial serializes")
    }
}

/// `r_0 r_1 ... r_deg`, space separated.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Horner evaluation of `Σ r_t z^t`.
pub fn evaluate<S: Scalar>(p: &IntPolynomial, z: &S) -> S {
    p.coefficients
        .iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * z.clone() + S::from_biguint(c))
}

/// Per-vertex wiring choice.
///
/// Directed: `wirings[v][i] = j` sends the `i`-th incoming edge at `v` on to
/// the `j`-th outgoing edge (both in edge order). Undirected: `wirings[v]` is
/// a fixed-point-free involution on the half-edge slots of `v`, slot `i`
/// being the `i`-th smallest half-edge id there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    pub kind: GraphKind,
    pub wirings: Vec<Vec<usize>>,
}

impl TransitionSystem {
    pub fn validate<'a>(&self, g: impl Into<GraphRef<'a>>) -> Result<()> {
        let g = g.into();
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.kind != g.kind() {
            return bad(format!(
                "{} transition system for a {} graph",
                self.kind,
                g.kind()
            ));
        }
        if self.wirings.len() != g.vertex_count() {
            return bad(format!(
                "{} wirings for {} vertices",
                self.wirings.len(),
                g.vertex_count()
            ));
        }
        for (v, w) in self.wirings.iter().enumerate() {
            let slots = match g {
                GraphRef::Directed(d) => {
                    if d.in_degree(v) != d.out_degree(v) {
                        return bad(format!("vertex {v} is unbalanced"));
                    }
                    d.in_degree(v)
                }
                GraphRef::Undirected(u) => u.degree(v),
            };
            if w.len() != slots {
                return bad(format!(
                    "vertex {v}: wiring has {} slots, expected {slots}",
                    w.len()
                ));
            }
            let mut seen = vec![false; slots];
            for (i, &j) in w.iter().enumerate() {
                if j >= slots || seen[j] {
                    return bad(format!("vertex {v}: wiring is not a bijection"));
                }
                seen[j] = true;
                if g.kind() == GraphKind::Undirected && (j == i || w[j] != i) {
                    return bad(format!("vertex {v}: wiring is not a perfect matching"));
                }
            }
        }
        Ok(())
    }
}

/// Number of local wirings at `v`: `d_v!` or `(deg(v) - 1)!!`.
fn local_count(g: GraphRef<'_>, v: usize) -> BigUint {
    match g {
        GraphRef::Directed(d) => factorial(d.in_degree(v) as u64),
        GraphRef::Undirected(u) => match u.degree(v) {
            0 => BigUint::one(),
            deg => double_factorial(deg as u64 - 1),
        },
    }
}

/// Total number of transition systems, without enumerating them.
pub fn transition_system_count<'a>(g: impl Into<GraphRef<'a>>) -> Result<BigUint> {
    let g = g.into();
    g.require_eulerian()?;
    Ok((0..g.vertex_count()).map(|v| local_count(g, v)).product())
}

/// Per-vertex wiring tables plus the successor bookkeeping for counting.
#[derive(Clone, Debug)]
struct Layout<'a> {
    graph: GraphRef<'a>,
    options: Vec<Vec<Vec<usize>>>,
    total: u64,
}

impl<'a> Layout<'a> {
    fn new(graph: GraphRef<'a>, budget: &Budget) -> Result<Self> {
        let total = transition_system_count(graph)?;
        if total > BigUint::from(budget.transition_systems) {
            return Err(Error::guard(
                "transition-system enumeration",
                total,
                budget.transition_systems,
            ));
        }
        let options = (0..graph.vertex_count())
            .map(|v| match graph {
                GraphRef::Directed(d) => lex_permutations(d.in_degree(v)),
                GraphRef::Undirected(u) => canonical_matchings(u.degree(v)),
            })
            .collect();
        Ok(Layout {
            graph,
            options,
            total: total.to_u64().expect("guarded count fits in u64"),
        })
    }

    /// Mixed-radix digits of `index`, vertex 0 most significant.
    fn digits(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0; self.options.len()];
        for v in (0..self.options.len()).rev() {
            let radix = self.options[v].len() as u64;
            digits[v] = (index % radix) as usize;
            index /= radix;
        }
        digits
    }

    /// Advances the odometer; returns the vertices whose digit changed.
    fn increment(&self, digits: &mut [usize], changed: &mut Vec<usize>) -> bool {
        changed.clear();
        for v in (0..digits.len()).rev() {
            changed.push(v);
            digits[v] += 1;
            if digits[v] < self.options[v].len() {
                return true;
            }
            digits[v] = 0;
        }
        false
    }

    fn system(&self, digits: &[usize]) -> TransitionSystem {
        TransitionSystem {
            kind: self.graph.kind(),
            wirings: digits
                .iter()
                .enumerate()
                .map(|(v, &i)| self.options[v][i].clone())
                .collect(),
        }
    }
}

/// Successor map over edges (directed) or half-edges (undirected) induced by
/// a transition system, with cycle counting.
struct Walker<'a> {
    graph: GraphRef<'a>,
    next: Vec<usize>,
    seen: Vec<bool>,
}

impl<'a> Walker<'a> {
    fn new(graph: GraphRef<'a>) -> Self {
        let len = match graph {
            GraphRef::Directed(d) => d.edge_count(),
            GraphRef::Undirected(u) => 2 * u.edge_count(),
        };
        Walker {
            graph,
            next: vec![0; len],
            seen: vec![false; graph.edge_count()],
        }
    }

    fn wire(&mut self, v: usize, wiring: &[usize]) {
        match self.graph {
            GraphRef::Directed(d) => {
                let (ins, outs) = (d.in_edges(v), d.out_edges(v));
                for (i, &j) in wiring.iter().enumerate() {
                    self.next[ins[i]] = outs[j];
                }
            }
            GraphRef::Undirected(u) => {
                // next[h] is the partner of h at its own vertex.
                let slots = u.half_edges_at(v);
                for (i, &j) in wiring.iter().enumerate() {
                    self.next[slots[i]] = slots[j];
                }
            }
        }
    }

    fn circuits(&mut self) -> usize {
        self.seen.iter_mut().for_each(|s| *s = false);
        let mut count = 0;
        match self.graph {
            GraphRef::Directed(_) => {
                for start in 0..self.next.len() {
                    if self.seen[start] {
                        continue;
                    }
                    count += 1;
                    let mut e = start;
                    while !self.seen[e] {
                        self.seen[e] = true;
                        e = self.next[e];
                    }
                }
            }
            GraphRef::Undirected(_) => {
                // Leave along half-edge h, arrive at h ^ 1, continue from its partner.
                for edge in 0..self.seen.len() {
                    if self.seen[edge] {
                        continue;
                    }
                    count += 1;
                    let start = 2 * edge;
                    let mut h = start;
                    loop {
                        self.seen[h / 2] = true;
                        h = self.next[h ^ 1];
                        if h == start {
                            break;
                        }
                    }
                }
            }
        }
        count
    }
}

/// Lexicographic stream of all transition systems of an Eulerian graph.
pub struct TransitionSystems<'a> {
    layout: Layout<'a>,
    digits: Vec<usize>,
    remaining: u64,
    scratch: Vec<usize>,
}

impl Iterator for TransitionSystems<'_> {
    type Item = TransitionSystem;

    fn next(&mut self) -> Option<TransitionSystem> {
        if self.remaining == 0 {
            return None;
        }
        let ts = self.layout.system(&self.digits);
        self.remaining -= 1;
        self.layout.increment(&mut self.digits, &mut self.scratch);
        Some(ts)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for TransitionSystems<'_> {}

/// Every transition system exactly once, in lexicographic order of the
/// per-vertex wiring ranks (vertex 0 most significant).
pub fn enumerate_transition_systems<'a>(
    g: impl Into<GraphRef<'a>>,
    budget: &Budget,
) -> Result<TransitionSystems<'a>> {
    let layout = Layout::new(g.into(), budget)?;
    Ok(TransitionSystems {
        digits: vec![0; layout.options.len()],
        remaining: layout.total,
        layout,
        scratch: Vec::new(),
    })
}

/// Number of circuits in the edge partition selected by `ts`.
///
/// Panics if `ts` does not fit `g`; see [`TransitionSystem::validate`].
pub fn circuit_count<'a>(g: impl Into<GraphRef<'a>>, ts: &TransitionSystem) -> usize {
    let g = g.into();
    if let Err(e) = ts.validate(g) {
        panic!("transition system does not fit the graph: {e}");
    }
    let mut walker = Walker::new(g);
    for (v, w) in ts.wirings.iter().enumerate() {
        walker.wire(v, w);
    }
    walker.circuits()
}

const CHUNK: u64 = 1 << 14;

/// `j(G;z)` for directed graphs, `j_undirected(G;z)` for undirected ones.
///
/// An edgeless graph has the single empty partition, so `j = 1`.
pub fn circuit_partition_polynomial<'a>(
    g: impl Into<GraphRef<'a>>,
    budget: &Budget,
) -> Result<IntPolynomial> {
    let g = g.into();
    let layout = Layout::new(g, budget)?;
    let m = g.edge_count();
    let chunks: Vec<(u64, u64)> = (0..layout.total.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, CHUNK.min(layout.total - c * CHUNK)))
        .collect();

    let tally_chunk = |&(start, len): &(u64, u64)| -> Vec<u64> {
        let mut tally = vec![0u64; m + 1];
        let mut walker = Walker::new(g);
        let mut digits = layout.digits(start);
        for (v, &i) in digits.iter().enumerate() {
            walker.wire(v, &layout.options[v][i]);
        }
        let mut changed = Vec::new();
        for step in 0..len {
            tally[walker.circuits()] += 1;
            if step + 1 < len {
                layout.increment(&mut digits, &mut changed);
                for &v in &changed {
                    walker.wire(v, &layout.options[v][digits[v]]);
                }
            }
        }
        tally
    };

    let tallies: Vec<Vec<u64>> = budget.install(|| chunks.par_iter().map(tally_chunk).collect());
    let mut coefficients = vec![BigUint::zero(); m + 1];
    for tally in tallies {
        for (c, n) in coefficients.iter_mut().zip(tally) {
            *c += n;
        }
    }
    Ok(IntPolynomial::new(g.kind(), coefficients))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DirectedMultigraph, UndirectedMultigraph};
    use crate::Rational;

    fn fig1() -> DirectedMultigraph {
        DirectedMultigraph::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 2)]).unwrap()
    }

    fn figure_eight() -> UndirectedMultigraph {
        UndirectedMultigraph::new(1, vec![(0, 0), (0, 0)]).unwrap()
    }

    fn poly(kind: GraphKind, coeffs: &[u32]) -> IntPolynomial {
        IntPolynomial::new(kind, coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    #[test]
    fn fig1_has_two_transition_systems() {
        let systems: Vec<_> = enumerate_transition_systems(&fig1(), &Budget::default())
            .unwrap()
            .collect();
        assert_eq!(systems.len(), 2);
        // Vertex 2 receives edges 1 and 4 and emits edges 2 and 3.
        assert_eq!(systems[0].wirings[2], vec![0, 1]);
        assert_eq!(circuit_count(&fig1(), &systems[0]), 2);
        assert_eq!(systems[1].wirings[2], vec![1, 0]);
        assert_eq!(circuit_count(&fig1(), &systems[1]), 1);
    }

    #[test]
    fn small_enumeration_counts() {
        let loop1 = DirectedMultigraph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(
            enumerate_transition_systems(&loop1, &Budget::default())
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            enumerate_transition_systems(&figure_eight(), &Budget::default())
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn figure_eight_circuits() {
        // Slots at the vertex are half-edges 0,1 (loop a) and 2,3 (loop b).
        let g = figure_eight();
        let own = TransitionSystem {
            kind: GraphKind::Undirected,
            wirings: vec![vec![1, 0, 3, 2]],
        };
        assert_eq!(circuit_count(&g, &own), 2);
        for cross in [vec![2, 3, 0, 1], vec![3, 2, 1, 0]] {
            let ts = TransitionSystem {
                kind: GraphKind::Undirected,
                wirings: vec![cross],
            };
            assert_eq!(circuit_count(&g, &ts), 1);
        }
    }

    #[test]
    fn known_polynomials() {
        let b = Budget::default();
        assert_eq!(
            circuit_partition_polynomial(&fig1(), &b).unwrap(),
            poly(GraphKind::Directed, &[0, 1, 1])
        );
        let two_loops = DirectedMultigraph::new(1, vec![(0, 0), (0, 0)]).unwrap();
        assert_eq!(
            circuit_partition_polynomial(&two_loops, &b).unwrap(),
            poly(GraphKind::Directed, &[0, 1, 1])
        );
        assert_eq!(
            circuit_partition_polynomial(&figure_eight(), &b).unwrap(),
            poly(GraphKind::Undirected, &[0, 2, 1])
        );
    }

    #[test]
    fn edgeless_graph_gives_one() {
        let g = DirectedMultigraph::new(3, vec![]).unwrap();
        let p = circuit_partition_polynomial(&g, &Budget::default()).unwrap();
        assert_eq!(p, IntPolynomial::one(GraphKind::Directed));
        let empty = UndirectedMultigraph::new(0, vec![]).unwrap();
        let p = circuit_partition_polynomial(&empty, &Budget::default()).unwrap();
        assert_eq!(p, IntPolynomial::one(GraphKind::Undirected));
    }

    #[test]
    fn evaluation() {
        let p = poly(GraphKind::Directed, &[0, 1, 1]);
        assert_eq!(p.evaluate(&Rational::from_u64(2)), Rational::from_u64(6));
        assert_eq!(p.evaluate(&Rational::from_u64(1)), Rational::from_u64(2));
        assert_eq!(p.evaluate(&2.0f64), 6.0);
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(p.evaluate(&half), Rational::new(3.into(), 4.into()));
        let one = IntPolynomial::one(GraphKind::Directed);
        assert_eq!(one.evaluate(&Rational::from_u64(17)), Rational::from_u64(1));
    }

    #[test]
    fn guard_reports_count() {
        let g = UndirectedMultigraph::new(1, vec![(0, 0); 6]).unwrap();
        let budget = Budget {
            transition_systems: 100,
            ..Budget::default()
        };
        match circuit_partition_polynomial(&g, &budget) {
            Err(Error::GuardExceeded { count, .. }) => assert_eq!(count, BigUint::from(10395u32)),
            other => panic!("expected guard error, got {other:?}"),
        }
    }

    #[test]
    fn non_eulerian_rejected() {
        let g = DirectedMultigraph::new(2, vec![(0, 1)]).unwrap();
        assert!(matches!(
            circuit_partition_polynomial(&g, &Budget::default()),
            Err(Error::NotEulerian(_))
        ));
    }

    #[test]
    fn display_lists_coefficients() {
        assert_eq!(poly(GraphKind::Directed, &[0, 1, 1]).to_string(), "0 1 1");
        assert_eq!(
            poly(GraphKind::Directed, &[0, 1, 1]).to_json_value()["coefficients"],
            serde_json::json!(["0", "1", "1"])
        );
    }

    #[test]
    fn invalid_wiring_is_reported() {
        let ts = TransitionSystem {
            kind: GraphKind::Undirected,
            wirings: vec![vec![0, 1, 2, 3]],
        };
        assert!(ts.validate(&figure_eight()).is_err());
    }
}
