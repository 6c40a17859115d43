//! Endpoint-level tests of the HTTP/JSON surface, driven through the
//! router without sockets.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let app = mealy_service::router();
    let req = match body {
        Some(v) => Request::builder()
            .method(method)
            .uri(path)
            .header("content-type", "application/json")
            .body(Body::from(v.to_string()))
            .unwrap(),
        None => Request::builder()
            .method(method)
            .uri(path)
            .body(Body::empty())
            .unwrap(),
    };
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::Null)
    };
    (status, value)
}

async fn post(path: &str, body: Value) -> (StatusCode, Value) {
    call("POST", path, Some(body)).await
}

#[tokio::test]
async fn health_is_ok() {
    let (status, body) = call("GET", "/v1/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}

#[tokio::test]
async fn builtins_are_listed_and_fetchable() {
    let (status, body) = call("GET", "/v1/builtins", None).await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = body["builtins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"fig1"));
    assert!(names.contains(&"adding"));

    let (status, body) = call("GET", "/v1/builtins/fig1", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["mealy"].as_str().unwrap().contains("states x y z t"));

    let (status, body) = call("GET", "/v1/builtins/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown-builtin");
}

#[tokio::test]
async fn info_reports_fig1_facts() {
    let (status, body) = post("/v1/info", json!({"machine": {"builtin": "fig1"}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["machine"], "builtin:fig1");
    assert_eq!(body["states"], 4);
    assert_eq!(body["invertible"], true);
    assert_eq!(body["reversible"], true);
    assert_eq!(body["connected"], true);
    assert_eq!(body["msize"], 2);
}

#[tokio::test]
async fn inline_text_machines_are_accepted() {
    let text = "states p\nletters 0 1\np 0 -> p 1\np 1 -> p 0\n";
    let (status, body) = post("/v1/info", json!({"machine": {"text": text}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["machine"], "inline");
    assert_eq!(body["states"], 1);
}

#[tokio::test]
async fn dual_swaps_shapes() {
    let (status, body) = post("/v1/dual", json!({"machine": {"builtin": "fig1"}})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["machine"]["states"].as_array().unwrap().len(), 2);
    assert_eq!(body["machine"]["letters"].as_array().unwrap().len(), 4);
}

#[tokio::test]
async fn apply_runs_the_action() {
    let (status, body) = post(
        "/v1/apply",
        json!({"machine": {"builtin": "fig1"}, "u": "z", "s": "00"}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["output"], "11");
}

#[tokio::test]
async fn apply_rejects_bad_words() {
    let (status, body) = post(
        "/v1/apply",
        json!({"machine": {"builtin": "fig1"}, "u": "w", "s": "00"}),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "word-parse-error");
}

#[tokio::test]
async fn parse_errors_carry_positions() {
    let (status, body) = post(
        "/v1/info",
        json!({"machine": {"text": "states a\nletters 0\na 0 => a 0\n"}}),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "parse-error");
    assert!(body["error"]["message"].as_str().unwrap().contains("line 3"));
}

#[tokio::test]
async fn incomplete_machines_report_the_missing_pair() {
    let text = "states s t\nletters 0 1\ns 0 -> s 0\ns 1 -> t 1\nt 0 -> t 0\n";
    let (status, body) = post("/v1/info", json!({"machine": {"text": text}})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(
        body["error"]["message"].as_str().unwrap(),
        "incomplete: state t, letter 1"
    );
}

#[tokio::test]
async fn inverse_requires_invertibility() {
    let text = "states c\nletters 0 1\nc 0 -> c 0\nc 1 -> c 0\n";
    let (status, body) = post("/v1/inverse", json!({"machine": {"text": text}})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "not-invertible");
}

#[tokio::test]
async fn certify_pipeline_over_http() {
    let (status, body) = post(
        "/v1/certify",
        json!({"machine": {"builtin": "fig1"}, "depth": 6}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["verdict"], "EXPONENTIAL-CERTIFIED");
    assert_eq!(body["sizes"], json!([2, 4, 8, 16, 32, 64]));

    let (status, body) = post(
        "/v1/certify",
        json!({"machine": {"builtin": "adding"}, "depth": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "not-reversible");
}

#[tokio::test]
async fn power_respects_the_limit() {
    let (status, body) = post(
        "/v1/power",
        json!({"machine": {"builtin": "fig1"}, "n": 20, "limit": 1000}),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "size-limit-exceeded");
}

#[tokio::test]
async fn transitive_on_the_dual() {
    let (status, body) = post(
        "/v1/transitive",
        json!({"machine": {"builtin": "fig1"}, "depth": 6, "dual": true}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["transitive_up_to"], 6);
    assert_eq!(body["failure_level"], Value::Null);

    let (status, body) = post(
        "/v1/transitive",
        json!({"machine": {"builtin": "identity1x2"}, "depth": 2}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["failure_level"], 1);
    assert_eq!(body["witnesses"], json!(["0", "1"]));
}

#[tokio::test]
async fn lemma1_and_proposition_endpoints() {
    let (status, body) = post(
        "/v1/lemma1",
        json!({"machine": {"builtin": "fig1"}, "n": 1}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["size_n"], 2);
    assert_eq!(body["size_n1"], 4);
    assert_eq!(body["class_cardinality_ratio"], 2);

    let (status, body) = post(
        "/v1/proposition",
        json!({"machine": {"builtin": "identity2x2"}, "depth": 4}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["violated"], false);
}

#[tokio::test]
async fn freeness_relations_growth_finiteness() {
    let (status, body) = post(
        "/v1/freeness",
        json!({"machine": {"builtin": "fig1"}, "depth": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["verdict"], "NOT-FREE");
    assert_eq!(body["witness"]["u"], "x");
    assert_eq!(body["witness"]["v"], "y");

    let (status, body) = post(
        "/v1/relations",
        json!({"machine": {"builtin": "fig1"}, "max_len": 1}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["relations"].as_array().unwrap().len(), 2);

    let (status, body) = post(
        "/v1/growth",
        json!({"machine": {"builtin": "identity2x2"}, "max_len": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["gamma"], json!([1, 1, 1]));

    let (status, body) = post(
        "/v1/finiteness",
        json!({"machine": {"builtin": "identity2x2"}, "depth": 3, "bound": 16}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["verdict"], "FINITE-EVIDENCE");
}

#[tokio::test]
async fn same_action_compares_digests() {
    let (status, body) = post(
        "/v1/same-action",
        json!({
            "left": {"builtin": "fig1"}, "u": "x",
            "right": {"builtin": "fig1"}, "v": "y"
        }),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["equal"], true);
    assert_eq!(body["left_digest"], body["right_digest"]);

    let (status, body) = post(
        "/v1/same-action",
        json!({
            "left": {"builtin": "fig1"}, "u": "x",
            "right": {"builtin": "fig1"}, "v": "xx"
        }),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["equal"], false);
    assert_ne!(body["left_digest"], body["right_digest"]);
}

#[tokio::test]
async fn census_over_http() {
    let (status, body) = post(
        "/v1/census",
        json!({"states": 2, "letters": 2, "depth": 3}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["summary"]["total"], 16);
    assert_eq!(body["records"].as_array().unwrap().len(), 16);
}

#[tokio::test]
async fn dot_export_over_http() {
    let (status, body) = post("/v1/dot", json!({"machine": {"builtin": "fig1"}})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["dot"].as_str().unwrap().contains("digraph mealy"));
}

#[tokio::test]
async fn missing_source_is_a_bad_request() {
    let (status, body) = post("/v1/info", json!({"machine": {}})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "invalid-argument");
}
