//! Typed property graph enforcing the food ontology.

mod fact;
mod graph;
mod ontology;
mod query;
mod shared;
mod snapshot;

pub use graph::{
    Direction, Edge, EdgeId, EdgeTypeCount, Graph, GraphError, GraphStats, Node, NodeId, PropValue,
    Props, UID_PROP,
};
pub use ontology::{allows, EdgeKind, NodeKind, ONTOLOGY};
pub use query::RecipeFilter;
pub use shared::SharedGraph;
pub use snapshot::{SnapshotError, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};
