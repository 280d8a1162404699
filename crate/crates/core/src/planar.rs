//! Combinatorial maps, their faces, oriented medial graphs, the subset
//! expansion of the Tutte polynomial and Martin's identity
//! `j(G_m; z) = z^{c(G)} T(G; z+1, z+1)`.
//!
//! Darts are the half-edges of the underlying graph: edge `i` owns dart `2i`
//! at its first endpoint and `2i + 1` at its second, and `twin(d) = d ^ 1`.
//! A rotation lists the darts around a vertex in counterclockwise order.
//! The face after dart `d` is entered through the rotation successor of
//! `twin(d)`.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{
    component_count, DirectedMultigraph, DisjointSets, GraphKind, UndirectedMultigraph,
};
use crate::partition::{circuit_count, circuit_partition_polynomial, TransitionSystem};
use crate::scalar::Scalar;
use crate::Rational;

/// Rotation system on an undirected multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarMap {
    graph: UndirectedMultigraph,
    rotations: Vec<Vec<usize>>,
    rotation_next: Vec<usize>,
}

impl PlanarMap {
    /// Checks that the rotations partition the darts and that every dart is
    /// listed at its own vertex. Planarity is checked by [`faces`].
    pub fn new(graph: UndirectedMultigraph, rotations: Vec<Vec<usize>>) -> Result<Self> {
        let n = graph.vertex_count();
        let darts = 2 * graph.edge_count();
        if rotations.len() != n {
            return Err(Error::InvalidMap(format!(
                "{} rotations for {n} vertices",
                rotations.len()
            )));
        }
        let mut rotation_next = vec![usize::MAX; darts];
        for (v, rotation) in rotations.iter().enumerate() {
            for (i, &d) in rotation.iter().enumerate() {
                if d >= darts {
                    return Err(Error::InvalidMap(format!("dart {d} out of range")));
                }
                if graph.half_edge_vertex(d) != v {
                    return Err(Error::InvalidMap(format!(
                        "dart {d} listed at vertex {v} but attached to vertex {}",
                        graph.half_edge_vertex(d)
                    )));
                }
                if rotation_next[d] != usize::MAX {
                    return Err(Error::InvalidMap(format!("dart {d} listed twice")));
                }
                rotation_next[d] = rotation[(i + 1) % rotation.len()];
            }
        }
        if let Some(d) = rotation_next.iter().position(|&x| x == usize::MAX) {
            return Err(Error::InvalidMap(format!(
                "dart {d} missing from the rotations"
            )));
        }
        Ok(PlanarMap {
            graph,
            rotations,
            rotation_next,
        })
    }

    pub fn graph(&self) -> &UndirectedMultigraph {
        &self.graph
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotations
    }

    pub fn dart_count(&self) -> usize {
        self.rotation_next.len()
    }

    pub fn twin(d: usize) -> usize {
        d ^ 1
    }

    /// Next dart along the face containing `d`.
    pub fn face_successor(&self, d: usize) -> usize {
        self.rotation_next[Self::twin(d)]
    }

    /// The mirror embedding: every rotation reversed.
    pub fn mirrored(&self) -> Self {
        let rotations = self
            .rotations
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        PlanarMap::new(self.graph.clone(), rotations)
            .expect("reversal keeps a valid rotation system")
    }
}

/// Face orbits, each starting at its smallest dart, ordered by that dart.
///
/// Fails unless every component has genus zero, i.e. unless
/// `n - m + f = 2 c(G) - (isolated vertices)` with `f` counted as orbits.
pub fn faces(map: &PlanarMap) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; map.dart_count()];
    let mut orbits = Vec::new();
    for start in 0..map.dart_count() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            orbit.push(d);
            d = map.face_successor(d);
        }
        orbits.push(orbit);
    }
    let g = map.graph();
    let n = g.vertex_count() as i64;
    let m = g.edge_count() as i64;
    let f = orbits.len() as i64;
    let c = component_count(g, 0..g.edge_count()) as i64;
    let isolated = (0..g.vertex_count()).filter(|&v| g.degree(v) == 0).count() as i64;
    if n - m + f != 2 * c - isolated {
        return Err(Error::InvalidMap(format!(
            "rotation system is not a plane embedding: n - m + f = {} but {} expected",
            n - m + f,
            2 * c - isolated
        )));
    }
    Ok(orbits)
}

/// Oriented medial graph: vertex `e` per edge of `G`, and medial edge `i`
/// from `edge(i)` to `edge(face_successor(i))` for every dart `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MedialGraph {
    pub graph: DirectedMultigraph,
    /// `entry_dart[i]`: the dart through which medial edge `i` arrives.
    pub entry_dart: Vec<usize>,
}

pub fn medial_graph(map: &PlanarMap) -> Result<MedialGraph> {
    faces(map)?;
    let entry_dart: Vec<usize> = (0..map.dart_count())
        .map(|d| map.face_successor(d))
        .collect();
    let edges = entry_dart
        .iter()
        .enumerate()
        .map(|(d, &next)| (d / 2, next / 2))
        .collect();
    Ok(MedialGraph {
        graph: DirectedMultigraph::new(map.graph().edge_count(), edges)?,
        entry_dart,
    })
}

/// `c(S)` and `ℓ(S) = c(S) + |S| - n` for one edge subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetExpansionTerm {
    pub subset: Vec<usize>,
    pub components: usize,
    pub excess: usize,
}

pub fn subset_term(g: &UndirectedMultigraph, subset: &[usize]) -> SubsetExpansionTerm {
    let components = component_count(g, subset.iter().copied());
    SubsetExpansionTerm {
        subset: subset.to_vec(),
        components,
        excess: components + subset.len() - g.vertex_count(),
    }
}

/// `hist[c][s]`: number of subsets with `c` components and `s` edges.
pub fn subset_histogram(g: &UndirectedMultigraph, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    let m = g.edge_count();
    let limit = budget.subset_edges.min(40) as usize;
    if m > limit {
        return Err(Error::guard(
            "subset expansion",
            BigUint::one() << m,
            1u64 << limit,
        ));
    }
    let n = g.vertex_count();
    let total: u64 = 1 << m;
    let chunk: u64 = 1 << 12;
    let ranges: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    let run = |&(lo, hi): &(u64, u64)| -> Vec<Vec<u64>> {
        let mut hist = vec![vec![0u64; m + 1]; n + 1];
        for mask in lo..hi {
            let mut sets = DisjointSets::new(n);
            let mut c = n;
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                if mask >> e & 1 == 1 && sets.union(u, v) {
                    c -= 1;
                }
            }
            hist[c][mask.count_ones() as usize] += 1;
        }
        hist
    };
    let parts: Vec<Vec<Vec<u64>>> = budget.install(|| ranges.par_iter().map(run).collect());
    let mut hist = vec![vec![0u64; m + 1]; n + 1];
    for part in parts {
        for (row, prow) in hist.iter_mut().zip(part) {
            for (a, b) in row.iter_mut().zip(prow) {
                *a += b;
            }
        }
    }
    Ok(hist)
}

/// `T(G;x,y) = Σ_{S ⊆ E} (x-1)^{c(S)-c(G)} (y-1)^{c(S)+|S|-n}`, with `0^0 = 1`.
pub fn tutte_subset_expansion<S: Scalar>(
    g: &UndirectedMultigraph,
    x: &S,
    y: &S,
    budget: &Budget,
) -> Result<S> {
    let hist = subset_histogram(g, budget)?;
    let n = g.vertex_count();
    let c_g = component_count(g, 0..g.edge_count());
    let (xm, ym) = (x.clone() - S::one(), y.clone() - S::one());
    let mut total = S::zero();
    for (c, row) in hist.iter().enumerate() {
        for (s, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            total = total + S::from_u64(count) * xm.powu(c - c_g) * ym.powu(c + s - n);
        }
    }
    Ok(total)
}

/// Both sides of Martin's identity at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MartinCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

fn reject_isolated(map: &PlanarMap) -> Result<()> {
    let g = map.graph();
    match (0..g.vertex_count()).find(|&v| g.degree(v) == 0) {
        Some(v) => Err(Error::InvalidMap(format!(
            "vertex {v} is isolated; the identity needs every vertex on an edge"
        ))),
        None => Ok(()),
    }
}

/// `lhs = j(G_m; z)`, `rhs = z^{c(G)} T(G; z+1, z+1)`.
pub fn martin_check(map: &PlanarMap, z: &Rational, budget: &Budget) -> Result<MartinCheck> {
    reject_isolated(map)?;
    let medial = medial_graph(map)?;
    let lhs = circuit_partition_polynomial(&medial.graph, budget)?.evaluate(z);
    let g = map.graph();
    let c_g = component_count(g, 0..g.edge_count());
    let w = z + Rational::one();
    let rhs = z.powu(c_g) * tutte_subset_expansion(g, &w, &w, budget)?;
    Ok(MartinCheck {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Transition system on the medial graph selected by `subset`: at the medial
/// vertex of an edge in `subset` each arriving medial edge continues along
/// the same side of the edge (the face it arrived in); at other edges it
/// crosses to the other side.
pub fn medial_transition_system(
    map: &PlanarMap,
    medial: &MedialGraph,
    subset: &[usize],
) -> Result<TransitionSystem> {
    let m = map.graph().edge_count();
    let mut in_subset = vec![false; m];
    for &e in subset {
        if e >= m {
            return Err(Error::InvalidArgument(format!("edge {e} out of range")));
        }
        in_subset[e] = true;
    }
    let wirings = (0..m)
        .map(|e| {
            // Out-edges of medial vertex e are darts 2e and 2e + 1, in that order.
            medial
                .graph
                .in_edges(e)
                .iter()
                .map(|&j| {
                    let side = medial.entry_dart[j] & 1;
                    if in_subset[e] {
                        side
                    } else {
                        1 - side
                    }
                })
                .collect()
        })
        .collect();
    Ok(TransitionSystem {
        kind: GraphKind::Directed,
        wirings,
    })
}

/// Circuits of the medial-graph partition that corresponds to `subset`.
pub fn subset_to_partition_circuits(map: &PlanarMap, subset: &[usize]) -> Result<usize> {
    let medial = medial_graph(map)?;
    let ts = medial_transition_system(map, &medial, subset)?;
    Ok(circuit_count(&medial.graph, &ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::eulerian_check;
    use crate::partition::IntPolynomial;

    fn map(n: usize, edges: Vec<(usize, usize)>, rotations: Vec<Vec<usize>>) -> PlanarMap {
        PlanarMap::new(UndirectedMultigraph::new(n, edges).unwrap(), rotations).unwrap()
    }

    fn p2() -> PlanarMap {
        map(2, vec![(0, 1)], vec![vec![0], vec![1]])
    }

    fn triangle() -> PlanarMap {
        map(
            3,
            vec![(0, 1), (1, 2), (2, 0)],
            vec![vec![0, 5], vec![2, 1], vec![4, 3]],
        )
    }

    fn figure_eight() -> PlanarMap {
        map(1, vec![(0, 0), (0, 0)], vec![vec![0, 1, 2, 3]])
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn face_counts() {
        assert_eq!(faces(&p2()).unwrap(), vec![vec![0, 1]]);
        let tri = faces(&triangle()).unwrap();
        assert_eq!(tri.len(), 2);
        assert!(tri.iter().all(|f| f.len() == 3));
        assert_eq!(faces(&figure_eight()).unwrap().len(), 3);
    }

    #[test]
    fn interlaced_loops_are_not_planar() {
        let torus = map(1, vec![(0, 0), (0, 0)], vec![vec![0, 2, 1, 3]]);
        assert!(matches!(faces(&torus), Err(Error::InvalidMap(_))));
    }

    #[test]
    fn rotation_validation() {
        let g = UndirectedMultigraph::new(2, vec![(0, 1)]).unwrap();
        assert!(PlanarMap::new(g.clone(), vec![vec![0], vec![]]).is_err());
        assert!(PlanarMap::new(g.clone(), vec![vec![1], vec![0]]).is_err());
        assert!(PlanarMap::new(g, vec![vec![0, 0], vec![1]]).is_err());
    }

    #[test]
    fn medial_shapes() {
        let m = medial_graph(&p2()).unwrap();
        assert_eq!(m.graph.vertex_count(), 1);
        assert_eq!(m.graph.edges(), &[(0, 0), (0, 0)]);

        let m = medial_graph(&triangle()).unwrap();
        assert_eq!((m.graph.vertex_count(), m.graph.edge_count()), (3, 6));
        let p = circuit_partition_polynomial(&m.graph, &Budget::default()).unwrap();
        // Two directed 3-cycles joined at every vertex.
        assert_eq!(p.total(), BigUint::from(8u32));

        let m = medial_graph(&figure_eight()).unwrap();
        assert_eq!((m.graph.vertex_count(), m.graph.edge_count()), (2, 4));
        assert!(eulerian_check(&m.graph).is_eulerian);
    }

    #[test]
    fn tutte_examples() {
        let b = Budget::default();
        let (x, y) = (r(5), r(7));
        assert_eq!(tutte_subset_expansion(p2().graph(), &x, &y, &b).unwrap(), x);
        let lp = UndirectedMultigraph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(tutte_subset_expansion(&lp, &x, &y, &b).unwrap(), y);
        assert_eq!(
            tutte_subset_expansion(triangle().graph(), &r(3), &r(3), &b).unwrap(),
            r(15)
        );
        assert_eq!(
            tutte_subset_expansion(triangle().graph(), &3.0f64, &3.0f64, &b).unwrap(),
            15.0
        );
    }

    #[test]
    fn tutte_guard() {
        let g = UndirectedMultigraph::new(2, vec![(0, 1); 5]).unwrap();
        let b = Budget {
            subset_edges: 4,
            ..Budget::default()
        };
        assert!(matches!(
            tutte_subset_expansion(&g, &r(1), &r(1), &b),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn martin_examples() {
        let b = Budget::default();
        let check = martin_check(&p2(), &r(2), &b).unwrap();
        assert_eq!((check.lhs.clone(), check.rhs.clone()), (r(6), r(6)));
        assert!(check.equal);
        assert!(martin_check(&triangle(), &r(1), &b).unwrap().equal);
        for m in [p2(), triangle(), figure_eight()] {
            let zero = martin_check(&m, &r(0), &b).unwrap();
            assert_eq!((zero.lhs, zero.rhs), (r(0), r(0)));
        }
    }

    #[test]
    fn isolated_vertices_rejected_by_martin() {
        let m = map(3, vec![(0, 1)], vec![vec![0], vec![1], vec![]]);
        assert!(faces(&m).is_ok());
        assert!(martin_check(&m, &r(2), &Budget::default()).is_err());
    }

    #[test]
    fn subset_circuits_examples() {
        assert_eq!(subset_to_partition_circuits(&triangle(), &[]).unwrap(), 3);
        assert_eq!(
            subset_to_partition_circuits(&triangle(), &[0, 1, 2]).unwrap(),
            2
        );
        assert_eq!(subset_to_partition_circuits(&p2(), &[0]).unwrap(), 1);
        assert_eq!(subset_to_partition_circuits(&p2(), &[]).unwrap(), 2);
        let term = subset_term(triangle().graph(), &[0, 1, 2]);
        assert_eq!((term.components, term.excess), (1, 1));
    }

    #[test]
    fn mirror_keeps_medial_polynomial() {
        let b = Budget::default();
        let theta = map(2, vec![(0, 1); 3], vec![vec![0, 4, 2], vec![1, 3, 5]]);
        let j = |m: &PlanarMap| -> IntPolynomial {
            circuit_partition_polynomial(&medial_graph(m).unwrap().graph, &b).unwrap()
        };
        assert_eq!(j(&theta), j(&theta.mirrored()));
    }
}
