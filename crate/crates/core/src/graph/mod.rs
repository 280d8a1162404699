//! Multigraph types, degree bookkeeping, Eulerian checks and connected
//! components.
//!
//! Vertices are `0..n`. Edge order is significant: edge `i` of an undirected
//! graph owns the half-edges `2i` (at its first endpoint) and `2i + 1` (at its
//! second endpoint), and the planar and partition modules number darts and
//! transition slots from it.

mod dsu;
mod format;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use dsu::DisjointSets;
pub use format::{parse_graph, GraphDocument};

use crate::error::{Error, Result};
use crate::planar::PlanarMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Directed,
    Undirected,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Directed => "directed",
            GraphKind::Undirected => "undirected",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_endpoints(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    for (i, &(a, b)) in edges.iter().enumerate() {
        if a >= n || b >= n {
            return Err(Error::InvalidArgument(format!(
                "edge {i} = ({a}, {b}) has an endpoint outside 0..{n}"
            )));
        }
    }
    Ok(())
}

/// Directed multigraph; self-loops and parallel edges allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedMultigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl DirectedMultigraph {
    /// Builds a graph from `(tail, head)` pairs.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_endpoints(vertex_count, &edges)?;
        let mut in_edges = vec![Vec::new(); vertex_count];
        let mut out_edges = vec![Vec::new(); vertex_count];
        for (i, &(tail, head)) in edges.iter().enumerate() {
            out_edges[tail].push(i);
            in_edges[head].push(i);
        }
        Ok(DirectedMultigraph {
            n: vertex_count,
            edges,
            in_edges,
            out_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_edges[v].len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges[v].len()
    }

    /// Edges with head `v`, in file order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Edges with tail `v`, in file order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Same graph with every edge reversed.
    pub fn reversed(&self) -> Self {
        let edges = self.edges.iter().map(|&(t, h)| (h, t)).collect();
        DirectedMultigraph::new(self.n, edges).expect("endpoints unchanged")
    }

    /// Disjoint union; `other`'s vertices are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(t, h)| (t + shift, h + shift)))
            .collect();
        DirectedMultigraph::new(self.n + other.n, edges).expect("shifted endpoints in range")
    }

    /// The underlying undirected multigraph, keeping edge order.
    pub fn to_undirected(&self) -> UndirectedMultigraph {
        UndirectedMultigraph::new(self.n, self.edges.clone()).expect("endpoints unchanged")
    }

    pub fn eulerian_report(&self) -> EulerianReport {
        let offending = (0..self.n)
            .filter(|&v| self.in_degree(v) != self.out_degree(v))
            .map(|v| DegreeDefect::Unbalanced {
                vertex: v,
                in_degree: self.in_degree(v),
                out_degree: self.out_degree(v),
            })
            .collect();
        EulerianReport::from_defects(offending)
    }
}

/// Undirected multigraph; self-loops and parallel edges allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedMultigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    half_edges: Vec<Vec<usize>>,
}

impl UndirectedMultigraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_endpoints(vertex_count, &edges)?;
        let mut half_edges = vec![Vec::new(); vertex_count];
        for (i, &(u, v)) in edges.iter().enumerate() {
            half_edges[u].push(2 * i);
            half_edges[v].push(2 * i + 1);
        }
        Ok(UndirectedMultigraph {
            n: vertex_count,
            edges,
            half_edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of half-edges at `v`; a self-loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.half_edges[v].len()
    }

    /// Half-edge ids at `v` in increasing order.
    pub fn half_edges_at(&self, v: usize) -> &[usize] {
        &self.half_edges[v]
    }

    /// Vertex that half-edge `h` is attached to.
    pub fn half_edge_vertex(&self, h: usize) -> usize {
        let (u, v) = self.edges[h / 2];
        if h % 2 == 0 {
            u
        } else {
            v
        }
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)))
            .collect();
        UndirectedMultigraph::new(self.n + other.n, edges).expect("shifted endpoints in range")
    }

    pub fn eulerian_report(&self) -> EulerianReport {
        let offending = (0..self.n)
            .filter(|&v| self.degree(v) % 2 == 1)
            .map(|v| DegreeDefect::OddDegree {
                vertex: v,
                degree: self.degree(v),
            })
            .collect();
        EulerianReport::from_defects(offending)
    }
}

/// Borrowed view of either multigraph kind.
#[derive(Clone, Copy, Debug)]
pub enum GraphRef<'a> {
    Directed(&'a DirectedMultigraph),
    Undirected(&'a UndirectedMultigraph),
}

impl<'a> From<&'a DirectedMultigraph> for GraphRef<'a> {
    fn from(g: &'a DirectedMultigraph) -> Self {
        GraphRef::Directed(g)
    }
}

impl<'a> From<&'a UndirectedMultigraph> for GraphRef<'a> {
    fn from(g: &'a UndirectedMultigraph) -> Self {
        GraphRef::Undirected(g)
    }
}

impl<'a> From<&'a PlanarMap> for GraphRef<'a> {
    fn from(map: &'a PlanarMap) -> Self {
        GraphRef::Undirected(map.graph())
    }
}

impl<'a> From<&'a Graph> for GraphRef<'a> {
    fn from(g: &'a Graph) -> Self {
        match g {
            Graph::Directed(d) => GraphRef::Directed(d),
            Graph::Undirected(u) => GraphRef::Undirected(u),
            Graph::Planar(p) => GraphRef::Undirected(p.graph()),
        }
    }
}

impl GraphRef<'_> {
    pub fn kind(&self) -> GraphKind {
        match self {
            GraphRef::Directed(_) => GraphKind::Directed,
            GraphRef::Undirected(_) => GraphKind::Undirected,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            GraphRef::Directed(g) => g.vertex_count(),
            GraphRef::Undirected(g) => g.vertex_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            GraphRef::Directed(g) => g.edge_count(),
            GraphRef::Undirected(g) => g.edge_count(),
        }
    }

    /// `d_v`: the common in/out degree for directed graphs, half the degree
    /// for undirected ones. Only meaningful on Eulerian inputs.
    pub fn half_degree(&self, v: usize) -> usize {
        match self {
            GraphRef::Directed(g) => g.in_degree(v),
            GraphRef::Undirected(g) => g.degree(v) / 2,
        }
    }

    pub fn eulerian_report(&self) -> EulerianReport {
        match self {
            GraphRef::Directed(g) => g.eulerian_report(),
            GraphRef::Undirected(g) => g.eulerian_report(),
        }
    }

    /// Fails with [`Error::NotEulerian`] unless the degree condition holds.
    pub fn require_eulerian(&self) -> Result<()> {
        let report = self.eulerian_report();
        if report.is_eulerian {
            Ok(())
        } else {
            Err(Error::NotEulerian(report))
        }
    }
}

/// Any graph the text format can describe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Graph {
    Directed(DirectedMultigraph),
    Undirected(UndirectedMultigraph),
    Planar(PlanarMap),
}

impl Graph {
    pub fn as_graph_ref(&self) -> GraphRef<'_> {
        self.into()
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Graph::Directed(_) => "directed",
            Graph::Undirected(_) => "undirected",
            Graph::Planar(_) => "planar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeDefect {
    Unbalanced {
        vertex: usize,
        in_degree: usize,
        out_degree: usize,
    },
    OddDegree {
        vertex: usize,
        degree: usize,
    },
}

/// Result of [`eulerian_check`]. Connectivity is not required.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerianReport {
    pub is_eulerian: bool,
    pub offending_vertices: Vec<DegreeDefect>,
}

impl EulerianReport {
    fn from_defects(offending_vertices: Vec<DegreeDefect>) -> Self {
        EulerianReport {
            is_eulerian: offending_vertices.is_empty(),
            offending_vertices,
        }
    }
}

impl fmt::Display for EulerianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_eulerian {
            return f.write_str("all vertices balanced");
        }
        for (i, defect) in self.offending_vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match defect {
                DegreeDefect::Unbalanced {
                    vertex,
                    in_degree,
                    out_degree,
                } => write!(f, "vertex {vertex} has in {in_degree}, out {out_degree}")?,
                DegreeDefect::OddDegree { vertex, degree } => {
                    write!(f, "vertex {vertex} has odd degree {degree}")?
                }
            }
        }
        Ok(())
    }
}

pub fn eulerian_check<'a>(g: impl Into<GraphRef<'a>>) -> EulerianReport {
    g.into().eulerian_report()
}

/// Number of connected components of the spanning subgraph `(V, S)`;
/// isolated vertices count.
///
/// Panics if a listed edge index is out of range.
pub fn component_count(
    g: &UndirectedMultigraph,
    edge_subset: impl IntoIterator<Item = usize>,
) -> usize {
    let mut sets = DisjointSets::new(g.vertex_count());
    let mut components = g.vertex_count();
    for e in edge_subset {
        let (u, v) = g.edges()[e];
        if sets.union(u, v) {
            components -= 1;
        }
    }
    components
}
