//! JSON input documents and their emitters.
//!
//! ```text
//! space:      {"labels": [...], "matrix": [[...], ...]}
//! tree:       {"vertices": [...], "edges": [[u, v, len], ...]}
//! subset:     {"vertices": [...], "edge_points": [[edge, offset], ...]}
//! intervals:  {"edge_intervals": [[edge, a, b], ...], "vertices": [...]}
//! ```
//!
//! Vertices may be given by name or by index.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::intervals::IntervalUnionSubset;
use crate::metric::FiniteMetricSpace;
use crate::tree::{MetricTree, TreePoint, TreeSubsetX};

#[derive(Debug, Clone, PartialEq)]
pub enum IoError {
    Read { path: PathBuf, message: String },
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    Validation { path: PathBuf, field: String, line: Option<usize>, source: Error },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Read { path, message } => write!(f, "{}: {message}", path.display()),
            IoError::Parse { path, line, column, message } => {
                write!(f, "{}:{line}:{column}: {message}", path.display())
            }
            IoError::Validation { path, field, line, source } => match line {
                Some(l) => write!(f, "{}:{l}: field `{field}`: {source}", path.display()),
                None => write!(f, "{}: field `{field}`: {source}", path.display()),
            },
        }
    }
}

impl std::error::Error for IoError {}

impl IoError {
    pub fn kind(&self) -> &'static str {
        match self {
            IoError::Read { .. } => "ReadError",
            IoError::Parse { .. } => "ParseError",
            IoError::Validation { .. } => "ValidationError",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            IoError::Read { path, .. } => v["path"] = json!(path.display().to_string()),
            IoError::Parse { path, line, column, .. } => {
                v["path"] = json!(path.display().to_string());
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            IoError::Validation { path, field, line, .. } => {
                v["path"] = json!(path.display().to_string());
                v["field"] = json!(field);
                v["line"] = json!(line);
            }
        }
        v
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// A vertex given by name or by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<(VertexRef, VertexRef, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetDoc {
    #[serde(default)]
    pub vertices: Vec<VertexRef>,
    #[serde(default)]
    pub edge_points: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalsDoc {
    pub edge_intervals: Vec<(usize, f64, f64)>,
    #[serde(default)]
    pub vertices: Vec<VertexRef>,
}

/// A parsed input file. Subsets and interval unions still need their tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Space(FiniteMetricSpace),
    Tree(MetricTree),
    Subset(SubsetDoc),
    Intervals(IntervalsDoc),
}

struct Source {
    path: PathBuf,
    text: String,
}

impl Source {
    fn read(path: &Path) -> IoResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IoError::Read { path: path.to_path_buf(), message: e.to_string() })?;
        Ok(Source { path: path.to_path_buf(), text })
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> IoResult<T> {
        serde_json::from_str(&self.text).map_err(|e| IoError::Parse {
            path: self.path.clone(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    fn invalid(&self, field: impl Into<String>, source: Error) -> IoError {
        let field = field.into();
        let key = field.split('[').next().unwrap_or(&field);
        IoError::Validation { path: self.path.clone(), line: line_of(&self.text, key), field, source }
    }
}

/// 1-based line of the first occurrence of `"key"`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.find(&needle).map(|at| text[..at].matches('\n').count() + 1)
}

fn space_field(e: &Error) -> String {
    match e {
        Error::DuplicateLabel(_) | Error::EmptySpace => "labels".into(),
        Error::RaggedMatrix { row, .. } => format!("matrix[{row}]"),
        _ => "matrix".into(),
    }
}

fn resolve_vertex(tree: &MetricTree, v: &VertexRef) -> crate::Result<usize> {
    match v {
        VertexRef::Index(i) if *i < tree.vertex_count() => Ok(*i),
        VertexRef::Index(i) => Err(Error::IndexOutOfRange { index: *i, len: tree.vertex_count() }),
        VertexRef::Name(n) => tree.index_of(n).ok_or_else(|| Error::UnknownVertex(n.clone())),
    }
}

pub fn space_from_doc(doc: SpaceDoc, eps: f64) -> crate::Result<FiniteMetricSpace> {
    FiniteMetricSpace::new(doc.labels, doc.matrix, eps)
}

pub fn tree_from_doc(doc: &TreeDoc, eps: f64) -> crate::Result<MetricTree> {
    let find = |v: &VertexRef| match v {
        VertexRef::Index(i) => Ok(*i),
        VertexRef::Name(n) => {
            doc.vertices.iter().position(|l| l == n).ok_or_else(|| Error::UnknownVertex(n.clone()))
        }
    };
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (u, v, len) in &doc.edges {
        edges.push((find(u)?, find(v)?, *len));
    }
    MetricTree::new(doc.vertices.clone(), edges, eps)
}

pub fn subset_from_doc(tree: &MetricTree, doc: &SubsetDoc) -> crate::Result<TreeSubsetX> {
    let mut pts = Vec::new();
    for v in &doc.vertices {
        pts.push(TreePoint::Vertex(resolve_vertex(tree, v)?));
    }
    for &(e, offset) in &doc.edge_points {
        pts.push(tree.point_on_edge(e, offset)?);
    }
    TreeSubsetX::new(tree, pts)
}

pub fn intervals_from_doc(tree: &MetricTree, doc: &IntervalsDoc) -> crate::Result<IntervalUnionSubset> {
    let verts = doc.vertices.iter().map(|v| resolve_vertex(tree, v)).collect::<crate::Result<Vec<_>>>()?;
    let set = IntervalUnionSubset::from_parts(tree, doc.edge_intervals.iter().copied(), verts)?;
    if set.intervals().next().is_none() && set.isolated_vertices().is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(set)
}

/// Reads a file and classifies it by its top-level keys.
pub fn parse_inputs(path: &Path, eps: f64) -> IoResult<Document> {
    let src = Source::read(path)?;
    let value: Value = src.parse()?;
    let keys = |k: &str| value.get(k).is_some();
    if keys("matrix") || keys("labels") {
        let doc: SpaceDoc = src.parse()?;
        space_from_doc(doc, eps).map(Document::Space).map_err(|e| src.invalid(space_field(&e), e))
    } else if keys("edges") {
        let doc: TreeDoc = src.parse()?;
        tree_from_doc(&doc, eps).map(Document::Tree).map_err(|e| src.invalid("edges", e))
    } else if keys("edge_intervals") {
        src.parse().map(Document::Intervals)
    } else if keys("edge_points") || keys("vertices") {
        src.parse().map(Document::Subset)
    } else {
        Err(IoError::Parse {
            path: src.path.clone(),
            line: 1,
            column: 1,
            message: "unrecognized document: expected a space, tree, subset or interval union".into(),
        })
    }
}

pub fn load_space(path: &Path, eps: f64) -> IoResult<FiniteMetricSpace> {
    let src = Source::read(path)?;
    let doc: SpaceDoc = src.parse()?;
    space_from_doc(doc, eps).map_err(|e| src.invalid(space_field(&e), e))
}

pub fn load_tree(path: &Path, eps: f64) -> IoResult<MetricTree> {
    let src = Source::read(path)?;
    let doc: TreeDoc = src.parse()?;
    tree_from_doc(&doc, eps).map_err(|e| src.invalid("edges", e))
}

pub fn load_subset(path: &Path, tree: &MetricTree) -> IoResult<TreeSubsetX> {
    let src = Source::read(path)?;
    let doc: SubsetDoc = src.parse()?;
    subset_from_doc(tree, &doc).map_err(|e| {
        let field = match e {
            Error::UnknownVertex(_) | Error::IndexOutOfRange { .. } | Error::EmptySubset => "vertices",
            _ => "edge_points",
        };
        src.invalid(field, e)
    })
}

pub fn load_intervals(path: &Path, tree: &MetricTree) -> IoResult<IntervalUnionSubset> {
    let src = Source::read(path)?;
    let doc: IntervalsDoc = src.parse()?;
    intervals_from_doc(tree, &doc).map_err(|e| {
        let field = match e {
            Error::UnknownVertex(_) | Error::IndexOutOfRange { .. } => "vertices",
            _ => "edge_intervals",
        };
        src.invalid(field, e)
    })
}

pub fn space_to_doc(x: &FiniteMetricSpace) -> SpaceDoc {
    SpaceDoc { labels: x.labels().to_vec(), matrix: x.matrix() }
}

pub fn tree_to_doc(tree: &MetricTree) -> TreeDoc {
    TreeDoc {
        vertices: tree.labels().to_vec(),
        edges: tree
            .edges()
            .iter()
            .map(|e| (VertexRef::Name(tree.label(e.u).into()), VertexRef::Name(tree.label(e.v).into()), e.length))
            .collect(),
    }
}

pub fn subset_to_doc(tree: &MetricTree, x: &TreeSubsetX) -> SubsetDoc {
    let mut doc = SubsetDoc { vertices: Vec::new(), edge_points: Vec::new() };
    for &p in x.points() {
        match p {
            TreePoint::Vertex(v) => doc.vertices.push(VertexRef::Name(tree.label(v).into())),
            TreePoint::Edge { edge, offset } => doc.edge_points.push((edge, offset)),
        }
    }
    doc
}

pub fn intervals_to_doc(tree: &MetricTree, set: &IntervalUnionSubset) -> IntervalsDoc {
    IntervalsDoc {
        edge_intervals: set.intervals().collect(),
        vertices: set.isolated_vertices().iter().map(|&v| VertexRef::Name(tree.label(v).into())).collect(),
    }
}

pub fn to_pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}
