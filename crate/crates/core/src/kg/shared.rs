use std::path::Path;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};

use super::graph::Graph;
use super::snapshot::SnapshotError;

/// Thread-safe graph handle.
///
/// Readers take a cheap `Arc` snapshot and never block on writers. Writers
/// are serialized; each batch runs against a private copy that replaces the
/// published graph only when the whole batch succeeds.
#[derive(Debug, Clone, Default)]
pub struct SharedGraph {
    current: Arc<RwLock<Arc<Graph>>>,
    writer: Arc<Mutex<()>>,
}

impl SharedGraph {
    pub fn new(graph: Graph) -> Self {
        SharedGraph {
            current: Arc::new(RwLock::new(Arc::new(graph))),
            writer: Arc::new(Mutex::new(())),
        }
    }

    pub fn read(&self) -> Arc<Graph> {
        self.current.read().clone()
    }

    pub fn apply<T, E>(&self, batch: impl FnOnce(&mut Graph) -> Result<T, E>) -> Result<T, E> {
        let _guard = self.writer.lock();
        let mut draft = Graph::clone(&self.read());
        let out = batch(&mut draft)?;
        *self.current.write() = Arc::new(draft);
        Ok(out)
    }

    /// Replace the graph with a snapshot; on error the current graph stays.
    pub fn reload(&self, path: &Path) -> Result<(), SnapshotError> {
        let _guard = self.writer.lock();
        let g = Graph::import_snapshot(path)?;
        *self.current.write() = Arc::new(g);
        Ok(())
    }
}
