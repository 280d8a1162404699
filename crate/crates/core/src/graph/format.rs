//! Line-oriented text format and its JSON mirror.
//!
//! ```text
//! # comment lines start with '#'; blank lines are ignored
//! directed            | undirected | planar
//! <n> <m>
//! <tail> <head>       (m lines; "<u> <v>" for undirected and planar)
//! <dart> <dart> ...   (planar only: n lines, counterclockwise rotation of
//!                      each vertex; "-" for a vertex without darts)
//! ```

use serde::{Deserialize, Serialize};

use super::{DirectedMultigraph, Graph, UndirectedMultigraph};
use crate::error::{Error, Result};
use crate::planar::PlanarMap;
use crate::SCHEMA;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next meaningful line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next_content().ok_or_else(|| {
            Error::parse(
                last.max(1),
                format!("unexpected end of input, expected {what}"),
            )
        })
    }
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize> {
    token.parse().map_err(|_| {
        Error::parse(
            line,
            format!("{what} {token:?} is not a nonnegative integer"),
        )
    })
}

fn parse_pair(line: usize, text: &str, what: &str) -> Result<(usize, usize)> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(Error::parse(
            line,
            format!(
                "expected two integers for {what}, found {} tokens",
                tokens.len()
            ),
        ));
    }
    Ok((
        parse_usize(line, tokens[0], what)?,
        parse_usize(line, tokens[1], what)?,
    ))
}

/// Parses the text graph format. Edge order is preserved.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text);
    let (header_line, header) = lines.expect("a header")?;
    let kind = match header {
        "directed" | "undirected" | "planar" => header,
        other => {
            return Err(Error::parse(
                header_line,
                format!("unknown graph kind {other:?}; expected directed, undirected or planar"),
            ))
        }
    };
    let (size_line, sizes) = lines.expect("\"<n> <m>\"")?;
    let (n, m) = parse_pair(size_line, sizes, "vertex and edge counts")?;

    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let (line, text) = lines.next_content().ok_or_else(|| {
            Error::parse(
                lines.last.max(size_line),
                format!("expected {m} edges, found {i}"),
            )
        })?;
        let (a, b) = parse_pair(line, text, "an edge")?;
        if a >= n || b >= n {
            return Err(Error::parse(
                line,
                format!("edge ({a}, {b}) has an endpoint outside 0..{n}"),
            ));
        }
        edges.push((a, b));
    }

    let graph = match kind {
        "directed" => Graph::Directed(DirectedMultigraph::new(n, edges)?),
        "undirected" => Graph::Undirected(UndirectedMultigraph::new(n, edges)?),
        _ => {
            let graph = UndirectedMultigraph::new(n, edges)?;
            let mut rotations = Vec::with_capacity(n);
            for v in 0..n {
                let (line, text) = lines.next_content().ok_or_else(|| {
                    Error::parse(
                        lines.last,
                        format!("expected {n} rotation lines, found {v}"),
                    )
                })?;
                let mut rotation = Vec::new();
                if text != "-" {
                    for token in text.split_whitespace() {
                        let dart = parse_usize(line, token, "dart")?;
                        if dart >= 2 * m {
                            return Err(Error::parse(
                                line,
                                format!("dart {dart} is outside 0..{}", 2 * m),
                            ));
                        }
                        if graph.half_edge_vertex(dart) != v {
                            return Err(Error::parse(
                                line,
                                format!("dart {dart} is not attached to vertex {v}"),
                            ));
                        }
                        rotation.push(dart);
                    }
                }
                rotations.push(rotation);
            }
            let map = PlanarMap::new(graph, rotations)
                .map_err(|e| Error::parse(lines.last, e.to_string()))?;
            Graph::Planar(map)
        }
    };

    if let Some((line, text)) = lines.next_content() {
        return Err(Error::parse(
            line,
            format!("unexpected trailing content {text:?}"),
        ));
    }
    Ok(graph)
}

impl Graph {
    /// Serializes to the text format; `parse_graph(g.to_text())` returns `g`.
    pub fn to_text(&self) -> String {
        let (n, edges) = match self {
            Graph::Directed(g) => (g.vertex_count(), g.edges()),
            Graph::Undirected(g) => (g.vertex_count(), g.edges()),
            Graph::Planar(p) => (p.graph().vertex_count(), p.graph().edges()),
        };
        let mut out = format!("{}\n{} {}\n", self.kind_name(), n, edges.len());
        for (a, b) in edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        if let Graph::Planar(p) = self {
            for rotation in p.rotations() {
                if rotation.is_empty() {
                    out.push_str("-\n");
                } else {
                    let darts: Vec<String> = rotation.iter().map(|d| d.to_string()).collect();
                    out.push_str(&darts.join(" "));
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn to_document(&self) -> GraphDocument {
        let (n, edges) = match self {
            Graph::Directed(g) => (g.vertex_count(), g.edges()),
            Graph::Undirected(g) => (g.vertex_count(), g.edges()),
            Graph::Planar(p) => (p.graph().vertex_count(), p.graph().edges()),
        };
        GraphDocument {
            schema: SCHEMA.to_string(),
            kind: self.kind_name().to_string(),
            vertex_count: n,
            edges: edges.iter().map(|&(a, b)| [a, b]).collect(),
            rotations: match self {
                Graph::Planar(p) => Some(p.rotations().to_vec()),
                _ => None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        doc.into_graph()
    }
}

/// JSON mirror of the text format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub schema: String,
    pub kind: String,
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<Vec<usize>>>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<Graph> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        match (self.kind.as_str(), self.rotations) {
            ("directed", None) => Ok(Graph::Directed(DirectedMultigraph::new(
                self.vertex_count,
                edges,
            )?)),
            ("undirected", None) => Ok(Graph::Undirected(UndirectedMultigraph::new(
                self.vertex_count,
                edges,
            )?)),
            ("planar", Some(rotations)) => {
                let graph = UndirectedMultigraph::new(self.vertex_count, edges)?;
                Ok(Graph::Planar(PlanarMap::new(graph, rotations)?))
            }
            ("planar", None) => Err(Error::InvalidArgument(
                "planar graph without rotations".into(),
            )),
            (kind, _) => Err(Error::InvalidArgument(format!(
                "graph kind {kind:?} does not take rotations or is unknown"
            ))),
        }
    }
}
