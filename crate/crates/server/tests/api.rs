use std::collections::BTreeSet;
use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use proptest::prelude::*;
use serde_json::{json, Value};
use tower::ServiceExt;

use topiclens::analytics::AnalyticsConfig;
use topiclens::corpus::Vocabulary;
use topiclens::filter::{self, FilterState};
use topiclens::lda::{train_gibbs, Hyperparams, TrainedModel};
use topiclens::synthetic::planted_topics;
use topiclens::{Analytics, DisplayMode};
use topiclens_server::{router, AppState};

fn analytics(k: usize, docs: usize) -> Analytics {
    let planted = planted_topics(3, 6, docs, 40, 0.3, 17);
    let hyper = Hyperparams { iterations: 60, burn_in: 10, seed: 4, ..Hyperparams::new(k) };
    let model = train_gibbs(&planted.corpus, &hyper).unwrap();
    let vocab = Vocabulary::from_terms(planted.corpus.vocabulary.terms().to_vec()).unwrap();
    let trained = TrainedModel::new(model, vocab, planted.corpus.titles.clone()).unwrap();
    Analytics::new(&trained, AnalyticsConfig::default()).unwrap()
}

fn app_with(analytics: Option<Analytics>) -> Router {
    router(AppState::new(analytics, Duration::from_secs(600)), None)
}

struct Reply {
    status: StatusCode,
    content_type: Option<String>,
    disposition: Option<String>,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    fn doc_ids(&self) -> Vec<usize> {
        serde_json::from_value(self.json()["doc_ids"].clone()).unwrap()
    }

    fn count(&self) -> usize {
        self.json()["count"].as_u64().unwrap() as usize
    }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Reply {
    let body = body.map_or_else(Body::empty, |b| Body::from(b.to_string()));
    let req =
        Request::builder().method(method).uri(uri).header(header::CONTENT_TYPE, "application/json").body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let get = |name| resp.headers().get(name).map(|v: &header::HeaderValue| v.to_str().unwrap().to_string());
    let content_type = get(header::CONTENT_TYPE);
    let disposition = get(header::CONTENT_DISPOSITION);
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, content_type, disposition, body }
}

async fn new_session(app: &Router) -> String {
    let reply = call(app, "POST", "/api/session", None).await;
    assert_eq!(reply.status, StatusCode::OK);
    reply.json()["session_id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn topics_endpoint() {
    let app = app_with(Some(analytics(3, 12)));
    let reply = call(&app, "GET", "/api/topics", None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let topics = reply.json()["topics"].as_array().unwrap().clone();
    assert_eq!(topics.len(), 3);
    assert_eq!(topics[0]["label"], "T1");
    assert_eq!(topics[0]["id"], 0);
    assert!(topics.iter().all(|t| t["words"].as_array().unwrap().len() <= 10));

    let single = app_with(Some(analytics(1, 5)));
    let reply = call(&single, "GET", "/api/topics", None).await;
    assert_eq!(reply.json()["topics"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn no_model_is_unavailable() {
    let app = app_with(None);
    for uri in ["/api/topics", "/api/documents", "/api/search?q=x"] {
        assert_eq!(call(&app, "GET", uri, None).await.status, StatusCode::SERVICE_UNAVAILABLE, "{uri}");
    }
    assert_eq!(call(&app, "POST", "/api/session", None).await.status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn model_can_be_installed_later() {
    let state = AppState::new(None, Duration::from_secs(60));
    let app = router(state.clone(), None);
    assert_eq!(call(&app, "GET", "/api/topics", None).await.status, StatusCode::SERVICE_UNAVAILABLE);
    state.set_model(analytics(2, 6));
    assert_eq!(call(&app, "GET", "/api/topics", None).await.status, StatusCode::OK);
}

#[tokio::test]
async fn documents_endpoint() {
    let a = analytics(4, 15);
    let app = app_with(Some(a));
    let rank = call(&app, "GET", "/api/documents?mode=rank", None).await;
    assert_eq!(rank.status, StatusCode::OK);
    let rank = rank.json();
    let docs = rank["docs"].as_array().unwrap();
    assert_eq!(docs.len(), 15);
    assert_eq!(rank["mode"], "rank");

    let prob = call(&app, "GET", "/api/documents?mode=probability", None).await.json();
    for (r, p) in docs.iter().zip(prob["docs"].as_array().unwrap()) {
        let ranks: Vec<usize> = serde_json::from_value(r["ranks"].clone()).unwrap();
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 2, 3, 4]);
        let probs: Vec<f64> = serde_json::from_value(p["probs"].clone()).unwrap();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by_key(|&t| ranks[t]);
        assert!(order.windows(2).all(|w| probs[w[0]] >= probs[w[1]]));
    }

    assert_eq!(call(&app, "GET", "/api/documents?mode=xyz", None).await.status, StatusCode::BAD_REQUEST);
    assert_eq!(call(&app, "GET", "/api/documents", None).await.status, StatusCode::OK);
}

#[tokio::test]
async fn filter_endpoint() {
    let a = analytics(3, 20);
    let expected_top: Vec<usize> = (0..20).filter(|&d| a.ranks.row(d)[1] == 1).collect();
    let app = app_with(Some(a));
    let id = new_session(&app).await;

    let all = call(&app, "POST", &format!("/api/session/{id}/filter"), Some(json!({}))).await;
    assert_eq!(all.status, StatusCode::OK);
    assert_eq!(all.count(), 20);

    let body = json!({"mode": "rank", "axis_ranges": {"1": [1, 1]}});
    let top = call(&app, "POST", &format!("/api/session/{id}/filter"), Some(body.clone())).await;
    assert_eq!(top.doc_ids(), expected_top);
    assert_eq!(top.count(), expected_top.len());
    let again = call(&app, "POST", &format!("/api/session/{id}/filter"), Some(body)).await;
    assert_eq!(again.body, top.body);

    let stored = call(&app, "GET", &format!("/api/session/{id}"), None).await.json();
    assert_eq!(stored["axis_ranges"]["1"], json!([1.0, 1.0]));

    let bad =
        call(&app, "POST", &format!("/api/session/{id}/filter"), Some(json!({"axis_ranges": {"0": [3, 1]}}))).await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);
    let bad = call(
        &app,
        "POST",
        &format!("/api/session/{id}/filter"),
        Some(json!({"mode": "probability", "axis_ranges": {"0": [0.2, 1.5]}})),
    )
    .await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);
    let bad = call(
        &app,
        "POST",
        &format!("/api/session/{id}/filter"),
        Some(json!({"axis_ranges": {"0": [1, 1]}, "hidden": [0]})),
    )
    .await;
    assert_eq!(bad.status, StatusCode::UNPROCESSABLE_ENTITY);
    let garbage = call(&app, "POST", &format!("/api/session/{id}/filter"), Some(json!({"mode": "sideways"}))).await;
    assert_eq!(garbage.status, StatusCode::BAD_REQUEST);

    let missing = call(&app, "POST", "/api/session/nope/filter", Some(json!({}))).await;
    assert_eq!(missing.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn keep_and_exclude_endpoints() {
    let app = app_with(Some(analytics(3, 20)));
    let id = new_session(&app).await;
    let url = |op: &str| format!("/api/session/{id}/{op}");

    let kept = call(&app, "POST", &url("keep"), None).await;
    assert_eq!(kept.count(), 20);
    assert_eq!(
        call(&app, "POST", &url("filter"), Some(json!({"kept": (0..20).collect::<Vec<_>>()}))).await.count(),
        20
    );

    let excluded = call(&app, "POST", &url("exclude"), Some(json!({"docs": [0]}))).await;
    assert_eq!(excluded.count(), 19);
    assert!(!excluded.doc_ids().contains(&0));
    let exported = String::from_utf8(call(&app, "GET", &url("export.csv"), None).await.body).unwrap();
    assert!(!exported.lines().any(|l| l.starts_with("0,")));

    // Exclusion also dropped doc 0 from the kept set, so lifting the
    // exclusion alone does not bring it back.
    let restored = call(&app, "POST", &url("restore"), Some(json!({"docs": [0]}))).await;
    assert_eq!(restored.count(), 19);
    call(&app, "POST", &url("filter"), Some(json!({"excluded": [4]}))).await;
    assert_eq!(call(&app, "POST", &url("restore"), Some(json!({"docs": [4]}))).await.count(), 20);

    assert_eq!(
        call(&app, "POST", &url("exclude"), Some(json!({"docs": [99]}))).await.status,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(call(&app, "POST", "/api/session/nope/keep", None).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn keep_then_exclude_drops_the_intersection() {
    let app = app_with(Some(analytics(3, 20)));
    let id = new_session(&app).await;
    let url = |op: &str| format!("/api/session/{id}/{op}");

    let brushed = call(&app, "POST", &url("filter"), Some(json!({"axis_ranges": {"0": [1, 2]}}))).await;
    let kept: BTreeSet<usize> = brushed.doc_ids().into_iter().collect();
    let after_keep = call(&app, "POST", &url("keep"), None).await;
    assert_eq!(after_keep.count(), kept.len());

    let subset: BTreeSet<usize> = [0, 1, 2, 3, 4, 5].into();
    let after = call(&app, "POST", &url("exclude"), Some(json!({"docs": subset}))).await;
    assert_eq!(after.count(), kept.len() - kept.intersection(&subset).count());

    // Keep with nothing selected warns and changes nothing.
    call(&app, "POST", &url("filter"), Some(json!({"kept": after.doc_ids(), "excluded": subset, "keyword": "zzzqx"})))
        .await;
    let empty_keep = call(&app, "POST", &url("keep"), None).await;
    assert_eq!(empty_keep.count(), 0);
    assert!(empty_keep.json()["warning"].is_string());
}

#[tokio::test]
async fn export_endpoint() {
    let a = analytics(3, 10);
    let full = filter::export_csv_bytes(&filter::Selection::all(10), &a).unwrap();
    let app = app_with(Some(a));
    let id = new_session(&app).await;

    let reply = call(&app, "GET", &format!("/api/session/{id}/export.csv"), None).await;
    assert_eq!(reply.status, StatusCode::OK);
    assert_eq!(reply.body, full);
    assert!(reply.content_type.unwrap().starts_with("text/csv"));
    assert!(reply.disposition.unwrap().starts_with("attachment"));

    call(&app, "POST", &format!("/api/session/{id}/exclude"), Some(json!({"docs": (0..10).collect::<Vec<_>>()}))).await;
    let empty = call(&app, "GET", &format!("/api/session/{id}/export.csv"), None).await;
    assert_eq!(String::from_utf8(empty.body).unwrap(), "doc_id,title,top_words,T1_rank,T2_rank,T3_rank\r\n");

    assert_eq!(call(&app, "GET", "/api/session/unknown/export.csv", None).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn search_endpoint() {
    let a = analytics(3, 12);
    let word = a.doc_words[0][0].term.clone();
    let expected = filter::search(&word, &a);
    let app = app_with(Some(a));

    assert_eq!(call(&app, "GET", "/api/search?q=", None).await.count(), 12);
    assert_eq!(call(&app, "GET", "/api/search", None).await.count(), 12);
    assert_eq!(call(&app, "GET", "/api/search?q=ZZZQX", None).await.count(), 0);
    let upper = word.to_uppercase();
    let found = call(&app, "GET", &format!("/api/search?q={upper}"), None).await;
    assert_eq!(found.doc_ids(), expected.doc_ids);
    assert!(found.doc_ids().contains(&0));
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = app_with(Some(analytics(3, 10)));
    let a = new_session(&app).await;
    let b = new_session(&app).await;
    call(&app, "POST", &format!("/api/session/{a}/exclude"), Some(json!({"docs": [1, 2, 3]}))).await;
    let other = call(&app, "POST", &format!("/api/session/{b}/filter"), Some(json!({}))).await;
    assert_eq!(other.count(), 10);
    let mine = call(&app, "GET", &format!("/api/session/{a}"), None).await.json();
    assert_eq!(mine["excluded"], json!([1, 2, 3]));
}

#[tokio::test]
async fn index_and_static_files() {
    let app = app_with(Some(analytics(2, 4)));
    let index = call(&app, "GET", "/", None).await;
    assert_eq!(index.status, StatusCode::OK);
    assert!(String::from_utf8(index.body).unwrap().contains("/api/topics"));

    let dir = std::env::temp_dir().join(format!("topiclens-static-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("index.html"), "<p>bundle</p>").unwrap();
    let app = router(AppState::new(Some(analytics(2, 4)), Duration::from_secs(60)), Some(dir.clone()));
    let page = call(&app, "GET", "/", None).await;
    assert_eq!(page.body, b"<p>bundle</p>");
    assert_eq!(call(&app, "GET", "/api/topics", None).await.status, StatusCode::OK);
    std::fs::remove_dir_all(dir).unwrap();
}

fn random_state(k: usize, d: usize) -> impl Strategy<Value = FilterState> {
    let ranges = prop::collection::btree_map(0..k, (1..=k, 1..=k), 0..3);
    let docs = prop::collection::btree_set(0..d, 0..4);
    let keyword = prop::option::of(prop::sample::select(vec!["w0000", "w0003", "w0007", "nothing"]));
    (ranges, docs.clone(), prop::option::of(docs), keyword).prop_map(move |(ranges, excluded, kept, keyword)| {
        let axis_ranges = ranges.into_iter().map(|(t, (a, b))| (t, (a.min(b) as f64, a.max(b) as f64))).collect();
        let kept = kept.map(|k| k.difference(&excluded).copied().collect());
        FilterState {
            mode: DisplayMode::Rank,
            axis_ranges,
            keyword: keyword.map(String::from),
            excluded_docs: excluded,
            kept_docs: kept,
            hidden_topics: Default::default(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn http_selection_matches_library(state in random_state(3, 16)) {
        let a = analytics(3, 16);
        let expected = filter::apply(&state, &a).unwrap();
        let rt = tokio::runtime::Runtime::new().unwrap();
        let app = app_with(Some(a));
        let ids = rt.block_on(async {
            let id = new_session(&app).await;
            call(&app, "POST", &format!("/api/session/{id}/filter"), Some(serde_json::to_value(&state).unwrap())).await.doc_ids()
        });
        prop_assert_eq!(ids, expected.doc_ids);
    }
}
