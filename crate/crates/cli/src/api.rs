//! JSON endpoints over an immutable graph and fact index.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use foodkg_core::graphrag::{GraphRag, ScoredFact};
use foodkg_core::kg::{Direction, GraphStats, RecipeFilter};
use foodkg_core::{EdgeId, EdgeKind, Node, NodeId, NodeKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Deserialize)]
pub struct AskRequest {
    pub question: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AskResponse {
    pub answer: String,
    pub facts: Vec<ScoredFact>,
    pub zero_retrieval: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NodeSummary {
    pub id: NodeId,
    pub kind: NodeKind,
    pub name: String,
}

impl From<&Node> for NodeSummary {
    fn from(n: &Node) -> Self {
        NodeSummary {
            id: n.id,
            kind: n.kind,
            name: n.name.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    Out,
    In,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Neighbor {
    pub edge: EdgeId,
    pub relation: EdgeKind,
    pub direction: Heading,
    pub node: NodeSummary,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NodeDetail {
    #[serde(flatten)]
    pub node: Node,
    pub neighbors: Vec<Neighbor>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RecipeList {
    pub recipes: Vec<NodeSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub nodes: usize,
    pub edges: usize,
    pub facts: usize,
    pub embedding_model: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(serde_json::json!({"error": self.message})),
        )
            .into_response()
    }
}

type Shared = Arc<GraphRag>;

pub fn router(rag: Arc<GraphRag>) -> Router {
    Router::new()
        .route("/v1/ask", post(ask))
        .route("/v1/graph/stats", get(stats))
        .route("/v1/graph/node/{id}", get(node))
        .route("/v1/recipes", get(recipes))
        .route("/v1/health", get(health))
        .with_state(rag)
}

async fn ask(
    State(rag): State<Shared>,
    Json(req): Json<AskRequest>,
) -> Result<Json<AskResponse>, ApiError> {
    if req.question.trim().is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "question must not be empty",
        ));
    }
    let answer = tokio::task::spawn_blocking(move || rag.ask(&req.question))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(|e| ApiError::new(StatusCode::BAD_GATEWAY, e.to_string()))?;
    Ok(Json(AskResponse {
        answer: answer.answer,
        facts: answer.facts,
        zero_retrieval: answer.zero_retrieval,
    }))
}

async fn stats(State(rag): State<Shared>) -> Json<GraphStats> {
    Json(rag.graph().stats())
}

async fn node(
    State(rag): State<Shared>,
    Path(id): Path<u64>,
) -> Result<Json<NodeDetail>, ApiError> {
    let g = rag.graph();
    let id = NodeId(id);
    let node = g
        .node(id)
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, e.to_string()))?
        .clone();
    let mut neighbors = Vec::new();
    for (heading, direction) in [(Heading::Out, Direction::Out), (Heading::In, Direction::In)] {
        for (edge, other) in g.neighbors(id, None, direction).unwrap_or_default() {
            neighbors.push(Neighbor {
                edge: edge.id,
                relation: edge.kind,
                direction: heading,
                node: other.into(),
            });
        }
    }
    Ok(Json(NodeDetail { node, neighbors }))
}

async fn recipes(
    State(rag): State<Shared>,
    Query(filter): Query<RecipeFilter>,
) -> Json<RecipeList> {
    let g = rag.graph();
    let recipes = g
        .filter_recipes(&filter)
        .into_iter()
        .filter_map(|id| g.node(id).ok().map(NodeSummary::from))
        .collect();
    Json(RecipeList { recipes })
}

async fn health(State(rag): State<Shared>) -> Json<Health> {
    let g = rag.graph();
    Json(Health {
        status: "ok".into(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        facts: rag.index().facts.len(),
        embedding_model: rag.index().model.clone(),
    })
}
