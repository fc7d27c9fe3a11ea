use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ontology::{self, EdgeKind, NodeKind, ONTOLOGY};
use crate::text::normalize_name;
use crate::vocab::Vocabulary;

/// Props carrying this key are keyed by it instead of by name on upsert.
pub const UID_PROP: &str = "uid";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropValue {
    Bool(bool),
    Number(f64),
    Text(String),
    List(Vec<String>),
}

impl PropValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            PropValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for PropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropValue::Bool(b) => write!(f, "{b}"),
            PropValue::Number(n) => write!(f, "{n}"),
            PropValue::Text(s) => f.write_str(s),
            PropValue::List(items) => write!(f, "[{}]", items.join(", ")),
        }
    }
}

impl From<f64> for PropValue {
    fn from(v: f64) -> Self {
        PropValue::Number(v)
    }
}

impl From<bool> for PropValue {
    fn from(v: bool) -> Self {
        PropValue::Bool(v)
    }
}

impl From<&str> for PropValue {
    fn from(v: &str) -> Self {
        PropValue::Text(v.to_string())
    }
}

impl From<String> for PropValue {
    fn from(v: String) -> Self {
        PropValue::Text(v)
    }
}

impl From<Vec<String>> for PropValue {
    fn from(v: Vec<String>) -> Self {
        PropValue::List(v)
    }
}

pub type Props = BTreeMap<String, PropValue>;

/// Build a [`Props`] map from `key => value` pairs.
#[macro_export]
macro_rules! props {
    () => { $crate::kg::Props::new() };
    ($($k:expr => $v:expr),+ $(,)?) => {{
        let mut p = $crate::kg::Props::new();
        $( p.insert(($k).to_string(), $crate::kg::PropValue::from($v)); )+
        p
    }};
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: String,
    #[serde(default)]
    pub props: Props,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub kind: EdgeKind,
    pub dst: NodeId,
    #[serde(default)]
    pub props: Props,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node name must not be empty")]
    EmptyName,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("ontology violation: {src} -{kind}-> {dst} is not allowed")]
    OntologyViolation {
        src: NodeKind,
        kind: EdgeKind,
        dst: NodeKind,
    },
    #[error("instruction {0} already belongs to a recipe")]
    InstructionAlreadyOwned(NodeId),
    #[error("{kind} is a closed category; `{name}` is not a seeded member")]
    ClosedCategory { kind: NodeKind, name: String },
    #[error("duplicate {0}")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct NodeKey {
    kind: NodeKind,
    key: String,
}

impl NodeKey {
    fn of(kind: NodeKind, name: &str, props: &Props) -> Self {
        let key = match props.get(UID_PROP) {
            Some(PropValue::Text(uid)) => format!("uid:{uid}"),
            _ => format!("name:{}", normalize_name(name)),
        };
        NodeKey { kind, key }
    }
}

/// In-memory property graph whose edges always satisfy the food ontology.
///
/// Nodes are never removed, so node ids are dense indices. Edge ids grow
/// monotonically and iteration over edges follows insertion order.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: BTreeMap<EdgeId, Edge>,
    next_edge: u64,
    keys: HashMap<NodeKey, NodeId>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    seeded: bool,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// A graph holding the 14 allergen, 9 food pyramid, 4 season and 19 diet
    /// nodes. Closed-category kinds reject new members afterwards.
    pub fn seeded(vocab: &Vocabulary) -> Self {
        let mut g = Graph::new();
        for c in &vocab.allergens {
            g.add_node(
                NodeKind::AllergenCategory,
                &c.name,
                crate::props! {"code" => c.code as f64},
            )
            .expect("seed allergen");
        }
        for c in &vocab.sfp {
            g.add_node(
                NodeKind::SwissFoodPyramidCategory,
                &c.name,
                crate::props! {"code" => c.code as f64},
            )
            .expect("seed sfp");
        }
        for s in &vocab.seasons {
            g.add_node(NodeKind::Season, s, Props::new())
                .expect("seed season");
        }
        for d in vocab.diet_labels() {
            g.add_node(NodeKind::DietRestriction, d, Props::new())
                .expect("seed diet");
        }
        g.seeded = true;
        g
    }

    pub fn is_seeded(&self) -> bool {
        self.seeded
    }

    pub(crate) fn set_seeded(&mut self, seeded: bool) {
        self.seeded = seeded;
    }

    /// Upsert a node. When `(kind, normalized name)` (or `(kind, uid)` if the
    /// props carry a `uid`) already exists the existing id is returned and
    /// only props missing on the stored node are added.
    pub fn add_node(
        &mut self,
        kind: NodeKind,
        name: &str,
        props: Props,
    ) -> Result<NodeId, GraphError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(GraphError::EmptyName);
        }
        let key = NodeKey::of(kind, name, &props);
        if let Some(&id) = self.keys.get(&key) {
            let node = &mut self.nodes[id.0 as usize];
            for (k, v) in props {
                node.props.entry(k).or_insert(v);
            }
            return Ok(id);
        }
        if self.seeded && kind.is_closed() {
            return Err(GraphError::ClosedCategory {
                kind,
                name: name.to_string(),
            });
        }
        let id = NodeId(self.nodes.len() as u64);
        self.nodes.push(Node {
            id,
            kind,
            name: name.to_string(),
            props,
        });
        self.keys.insert(key, id);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        Ok(id)
    }

    /// Restore a node with a fixed id (snapshot import). Ids must arrive dense.
    pub(crate) fn restore_node(&mut self, node: Node) -> Result<(), GraphError> {
        if node.name.trim().is_empty() {
            return Err(GraphError::EmptyName);
        }
        if node.id.0 != self.nodes.len() as u64 {
            return Err(GraphError::Duplicate(format!(
                "node id {} out of sequence (expected {})",
                node.id,
                self.nodes.len()
            )));
        }
        let key = NodeKey::of(node.kind, &node.name, &node.props);
        if self.keys.contains_key(&key) {
            return Err(GraphError::Duplicate(format!(
                "{} `{}`",
                node.kind, node.name
            )));
        }
        self.keys.insert(key, node.id);
        self.nodes.push(node);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        kind: EdgeKind,
        dst: NodeId,
        props: Props,
    ) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(Edge {
            id,
            src,
            kind,
            dst,
            props,
        })?;
        Ok(id)
    }

    pub(crate) fn insert_edge(&mut self, edge: Edge) -> Result<(), GraphError> {
        let src_kind = self.node(edge.src)?.kind;
        let dst_kind = self.node(edge.dst)?.kind;
        if !ontology::allows(src_kind, edge.kind, dst_kind) {
            return Err(GraphError::OntologyViolation {
                src: src_kind,
                kind: edge.kind,
                dst: dst_kind,
            });
        }
        if edge.kind == EdgeKind::Has
            && self.in_adj[edge.dst.0 as usize]
                .iter()
                .any(|e| self.edges[e].kind == EdgeKind::Has)
        {
            return Err(GraphError::InstructionAlreadyOwned(edge.dst));
        }
        if self.edges.contains_key(&edge.id) {
            return Err(GraphError::Duplicate(format!("edge id {}", edge.id)));
        }
        self.out_adj[edge.src.0 as usize].push(edge.id);
        self.in_adj[edge.dst.0 as usize].push(edge.id);
        self.next_edge = self.next_edge.max(edge.id.0 + 1);
        self.edges.insert(edge.id, edge);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let edge = self.edges.remove(&id).ok_or(GraphError::UnknownEdge(id))?;
        self.out_adj[edge.src.0 as usize].retain(|e| *e != id);
        self.in_adj[edge.dst.0 as usize].retain(|e| *e != id);
        Ok(edge)
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.nodes
            .get(id.0 as usize)
            .ok_or(GraphError::UnknownNode(id))
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))
    }

    pub fn set_prop(
        &mut self,
        id: NodeId,
        key: impl Into<String>,
        value: impl Into<PropValue>,
    ) -> Result<(), GraphError> {
        let node = self
            .nodes
            .get_mut(id.0 as usize)
            .ok_or(GraphError::UnknownNode(id))?;
        node.props.insert(key.into(), value.into());
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn find_node(&self, kind: NodeKind, name: &str) -> Option<NodeId> {
        self.keys
            .get(&NodeKey {
                kind,
                key: format!("name:{}", normalize_name(name)),
            })
            .copied()
    }

    pub fn find_by_uid(&self, kind: NodeKind, uid: &str) -> Option<NodeId> {
        self.keys
            .get(&NodeKey {
                kind,
                key: format!("uid:{uid}"),
            })
            .copied()
    }

    pub fn find_edge(&self, src: NodeId, kind: EdgeKind, dst: NodeId) -> Option<EdgeId> {
        self.out_adj.get(src.0 as usize)?.iter().copied().find(|e| {
            let edge = &self.edges[e];
            edge.kind == kind && edge.dst == dst
        })
    }

    /// Incident edges with their far endpoints, in edge insertion order.
    pub fn neighbors(
        &self,
        id: NodeId,
        kind_filter: Option<EdgeKind>,
        direction: Direction,
    ) -> Result<Vec<(&Edge, &Node)>, GraphError> {
        self.node(id)?;
        let idx = id.0 as usize;
        let mut ids: Vec<EdgeId> = match direction {
            Direction::Out => self.out_adj[idx].clone(),
            Direction::In => self.in_adj[idx].clone(),
            Direction::Both => {
                let mut v = self.out_adj[idx].clone();
                v.extend(&self.in_adj[idx]);
                v
            }
        };
        ids.sort_unstable();
        ids.dedup();
        Ok(ids
            .into_iter()
            .map(|e| &self.edges[&e])
            .filter(|e| kind_filter.is_none_or(|k| e.kind == k))
            .map(|e| {
                let far = if e.src == id { e.dst } else { e.src };
                (e, &self.nodes[far.0 as usize])
            })
            .collect())
    }

    pub fn stats(&self) -> GraphStats {
        let mut nodes: BTreeMap<NodeKind, usize> = NodeKind::ALL.iter().map(|k| (*k, 0)).collect();
        for n in &self.nodes {
            *nodes.entry(n.kind).or_default() += 1;
        }
        let mut edges: BTreeMap<(NodeKind, EdgeKind, NodeKind), usize> =
            ONTOLOGY.iter().map(|t| (*t, 0)).collect();
        for e in self.edges.values() {
            let key = (
                self.nodes[e.src.0 as usize].kind,
                e.kind,
                self.nodes[e.dst.0 as usize].kind,
            );
            *edges.entry(key).or_default() += 1;
        }
        GraphStats {
            total_nodes: self.nodes.len(),
            total_edges: self.edges.len(),
            nodes,
            edges: edges
                .into_iter()
                .map(|((source, kind, target), count)| EdgeTypeCount {
                    source,
                    kind,
                    target,
                    count,
                })
                .collect(),
        }
    }

    /// Check the structural invariants that individual inserts cannot.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for n in self.nodes_of_kind(NodeKind::Instruction) {
            let owners = self.in_adj[n.id.0 as usize]
                .iter()
                .filter(|e| self.edges[e].kind == EdgeKind::Has)
                .count();
            if owners != 1 {
                problems.push(format!(
                    "instruction {} `{}` has {owners} owning recipes",
                    n.id, n.name
                ));
            }
        }
        if self.seeded {
            let stats = self.stats();
            for (kind, want) in [
                (NodeKind::AllergenCategory, crate::vocab::ALLERGEN_COUNT),
                (NodeKind::SwissFoodPyramidCategory, crate::vocab::SFP_COUNT),
                (NodeKind::Season, crate::vocab::SEASON_COUNT),
                (
                    NodeKind::DietRestriction,
                    crate::vocab::RESTRICTION_COUNT + 1,
                ),
            ] {
                if stats.nodes[&kind] != want {
                    problems.push(format!(
                        "{kind}: {} nodes, expected {want}",
                        stats.nodes[&kind]
                    ));
                }
            }
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTypeCount {
    pub source: NodeKind,
    pub kind: EdgeKind,
    pub target: NodeKind,
    pub count: usize,
}

/// Node counts per kind and edge counts per `(source, kind, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub total_nodes: usize,
    pub total_edges: usize,
    pub nodes: BTreeMap<NodeKind, usize>,
    pub edges: Vec<EdgeTypeCount>,
}
