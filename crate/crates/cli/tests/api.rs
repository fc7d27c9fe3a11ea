mod common;

use std::collections::BTreeSet;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use foodkg_cli::api::{router, AskResponse, Health, NodeDetail, RecipeList};
use foodkg_core::graphrag::FALLBACK_ANSWER;
use foodkg_core::kg::GraphStats;
use foodkg_core::{EdgeKind, Graph, NodeId, NodeKind};
use http_body_util::BodyExt;
use tower::ServiceExt;

const OFF_TOPIC: &str = "What is the airspeed velocity of an unladen swallow?";

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (
        status,
        res.into_body().collect().await.unwrap().to_bytes().to_vec(),
    )
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Vec<u8>) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn ask(app: &Router, question: &str) -> (StatusCode, Vec<u8>) {
    let body = serde_json::json!({ "question": question }).to_string();
    let req = Request::post("/v1/ask")
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    send(app, req).await
}

/// Direct scan over recipe edges, written independently of the service.
fn scan(
    g: &Graph,
    diet: Option<&str>,
    allergen: Option<u8>,
    season: Option<&str>,
    cuisine: Option<&str>,
) -> Vec<NodeId> {
    let targets = |src: NodeId, kind: EdgeKind| -> Vec<&str> {
        g.edges()
            .filter(|e| e.src == src && e.kind == kind)
            .map(|e| g.node(e.dst).unwrap().name.as_str())
            .collect()
    };
    let allergen_codes = |ingredient: NodeId| -> Vec<u8> {
        g.edges()
            .filter(|e| e.src == ingredient && e.kind == EdgeKind::AllergenOf)
            .map(|e| g.node(e.dst).unwrap().props["code"].as_f64().unwrap() as u8)
            .collect()
    };
    g.nodes()
        .filter(|n| n.kind == NodeKind::Recipe)
        .filter(|r| diet.is_none_or(|d| targets(r.id, EdgeKind::IsSuitableFor).contains(&d)))
        .filter(|r| season.is_none_or(|s| targets(r.id, EdgeKind::IsForSeason).contains(&s)))
        .filter(|r| cuisine.is_none_or(|c| targets(r.id, EdgeKind::IsPartOf).contains(&c)))
        .filter(|r| {
            allergen.is_none_or(|a| {
                !g.edges()
                    .filter(|e| e.src == r.id && e.kind == EdgeKind::Contains)
                    .any(|e| allergen_codes(e.dst).contains(&a))
            })
        })
        .map(|r| r.id)
        .collect()
}

#[tokio::test(flavor = "multi_thread")]
async fn recipe_filter_agrees_with_scan() {
    let dir = tempfile::tempdir().unwrap();
    let rag = common::built_rag(dir.path());
    let app = router(rag.clone());
    let g = rag.graph();
    let diets = [
        None,
        Some("vegan"),
        Some("vegetarian"),
        Some("gluten-free"),
        Some("halal"),
    ];
    let allergens = [None, Some(1u8), Some(3), Some(7), Some(8)];
    let seasons = [None, Some("summer"), Some("winter")];
    let cuisines = [None, Some("swiss"), Some("french")];
    let mut nonempty = 0;
    for d in diets {
        for a in allergens {
            for s in seasons {
                for c in cuisines {
                    let mut params = Vec::new();
                    if let Some(d) = d {
                        params.push(format!("diet={d}"));
                    }
                    if let Some(a) = a {
                        params.push(format!("exclude_allergen={a}"));
                    }
                    if let Some(s) = s {
                        params.push(format!("season={s}"));
                    }
                    if let Some(c) = c {
                        params.push(format!("cuisine={c}"));
                    }
                    let (status, body) =
                        get(&app, &format!("/v1/recipes?{}", params.join("&"))).await;
                    assert_eq!(status, StatusCode::OK);
                    let list: RecipeList = serde_json::from_slice(&body).unwrap();
                    let got: Vec<NodeId> = list.recipes.iter().map(|r| r.id).collect();
                    let want = scan(g, d, a, s, c);
                    assert_eq!(
                        got, want,
                        "diet={d:?} allergen={a:?} season={s:?} cuisine={c:?}"
                    );
                    nonempty += usize::from(!want.is_empty());
                }
            }
        }
    }
    assert!(nonempty > 50);

    let (status, body) = get(&app, "/v1/recipes?diet=vegan&exclude_allergen=7").await;
    assert_eq!(status, StatusCode::OK);
    let names: BTreeSet<String> = serde_json::from_slice::<RecipeList>(&body)
        .unwrap()
        .recipes
        .into_iter()
        .map(|r| r.name)
        .collect();
    assert!(names.contains("Hummus"));
    assert!(!names.contains("Cheese Fondue"));
    let (status, _) = get(&app, "/v1/recipes?exclude_allergen=abc").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test(flavor = "multi_thread")]
async fn stats_health_and_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let rag = common::built_rag(dir.path());
    let app = router(rag.clone());
    let g = rag.graph();

    let (status, body) = get(&app, "/v1/graph/stats").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        serde_json::from_slice::<GraphStats>(&body).unwrap(),
        g.stats()
    );

    let (_, body) = get(&app, "/v1/health").await;
    let health: Health = serde_json::from_slice(&body).unwrap();
    assert_eq!(health.status, "ok");
    assert_eq!(health.nodes, g.node_count());
    assert_eq!(health.facts, g.edge_count());

    let hummus = g
        .nodes_of_kind(NodeKind::Recipe)
        .find(|n| n.name == "Hummus")
        .unwrap()
        .id;
    let (status, body) = get(&app, &format!("/v1/graph/node/{}", hummus.0)).await;
    assert_eq!(status, StatusCode::OK);
    let detail: NodeDetail = serde_json::from_slice(&body).unwrap();
    assert_eq!(detail.node.name, "Hummus");
    let degree = g
        .edges()
        .filter(|e| e.src == hummus || e.dst == hummus)
        .count();
    assert_eq!(detail.neighbors.len(), degree);
    assert!(detail
        .neighbors
        .iter()
        .any(|n| n.relation == EdgeKind::IsPartOf && n.node.name == "lebanese"));

    let (status, _) = get(&app, "/v1/graph/node/999999").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread")]
async fn ask_returns_cited_facts() {
    let dir = tempfile::tempdir().unwrap();
    let rag = common::built_rag(dir.path());
    let app = router(rag.clone());

    let (status, body) = ask(&app, "Which cuisine is the recipe 'Hummus' part of?").await;
    assert_eq!(status, StatusCode::OK);
    let res: AskResponse = serde_json::from_slice(&body).unwrap();
    assert!(res.answer.contains("lebanese"));
    assert!(!res.zero_retrieval);
    assert!(!res.facts.is_empty());
    for f in &res.facts {
        assert_eq!(f.fact, rag.graph().serialize_fact(f.edge).unwrap());
    }

    let (_, body) = ask(&app, OFF_TOPIC).await;
    let res: AskResponse = serde_json::from_slice(&body).unwrap();
    assert!(res.zero_retrieval);
    assert!(res.facts.is_empty());
    assert_eq!(res.answer, FALLBACK_ANSWER);

    let (status, _) = ask(&app, "   ").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test(flavor = "multi_thread")]
async fn responses_are_stable_across_restarts_and_concurrency() {
    let dir = tempfile::tempdir().unwrap();
    let first = router(common::built_rag(dir.path()));
    let config = foodkg_core::pipeline::RunConfig::load(&dir.path().join("run.toml")).unwrap();
    let second = router(std::sync::Arc::new(
        foodkg_core::pipeline::Pipeline::new(config)
            .unwrap()
            .rag()
            .unwrap(),
    ));
    let question = "Which allergen category does salmon belong to?";
    let (_, a) = ask(&first, question).await;
    let (_, b) = ask(&second, question).await;
    assert_eq!(a, b);

    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let app = first.clone();
            tokio::spawn(async move { ask(&app, question).await.1 })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), a);
    }
    for uri in ["/v1/graph/stats", "/v1/recipes?season=winter"] {
        assert_eq!(get(&first, uri).await, get(&second, uri).await);
    }
}
