//! HTTP/JSON service for the Mealy workbench.
//!
//! Every operation is a `POST /v1/<op>` taking a JSON body with a machine
//! source (`{"builtin": "fig1"}` or `{"text": "<.mealy>"}`) plus
//! parameters, and returning the operation's report. Computations run on
//! the blocking pool; the handlers themselves are pure, so any number of
//! clients can share one server.

use axum::extract::Path;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};

use mealy_core::analysis::{
    exponential_growth_certificate, find_relations, finiteness_probe, freeness_check,
    growth_function, lemma1_verify, proposition_verify, DEFAULT_SCAN_BUDGET,
};
use mealy_core::builtins;
use mealy_core::census::{classify_census, CensusFilter, CensusParams, DEFAULT_CENSUS_CAP};
use mealy_core::dot::export_dot;
use mealy_core::error::Error;
use mealy_core::minimize::{minimize, word_signature};
use mealy_core::power::{
    explicit_power, level_transitive_up_to, minimized_power_sizes, DEFAULT_ORBIT_BUDGET,
    DEFAULT_SIZE_LIMIT,
};
use mealy_core::wire::*;

/// Serves the API on an already-bound listener until the task is
/// dropped or the process exits.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}

/// All routes of the workbench API.
pub fn router() -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/builtins", get(list_builtins))
        .route("/v1/builtins/{name}", get(get_builtin))
        .route("/v1/info", post(info))
        .route("/v1/dual", post(dual))
        .route("/v1/inverse", post(inverse))
        .route("/v1/minimize", post(minimize_op))
        .route("/v1/product", post(product))
        .route("/v1/power", post(power))
        .route("/v1/apply", post(apply))
        .route("/v1/transitive", post(transitive))
        .route("/v1/msizes", post(msizes))
        .route("/v1/growth", post(growth))
        .route("/v1/certify", post(certify))
        .route("/v1/lemma1", post(lemma1))
        .route("/v1/proposition", post(proposition))
        .route("/v1/finiteness", post(finiteness))
        .route("/v1/freeness", post(freeness))
        .route("/v1/relations", post(relations))
        .route("/v1/same-action", post(same_action_op))
        .route("/v1/census", post(census))
        .route("/v1/dot", post(dot))
}

/// Errors cross the wire as `{"error": {"code", "message"}}` with a
/// status reflecting the failure class.
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn internal(message: String) -> ApiError {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                error: ErrorDetail {
                    code: "internal".into(),
                    message,
                },
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> ApiError {
        let status = match &err {
            Error::Parse(_) | Error::InvalidArgument(_) | Error::WordParse { .. } => {
                StatusCode::BAD_REQUEST
            }
            Error::UnknownBuiltin(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            body: ErrorBody {
                error: ErrorDetail {
                    code: error_code(&err).to_string(),
                    message: err.to_string(),
                },
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// Runs a pure computation on the blocking pool.
async fn run<T, F>(f: F) -> Result<Json<T>, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, Error> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(Ok(v)) => Ok(Json(v)),
        Ok(Err(e)) => Err(ApiError::from(e)),
        Err(join) => Err(ApiError::internal(join.to_string())),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

async fn list_builtins() -> Json<BuiltinList> {
    let builtins = builtins::builtin_names()
        .into_iter()
        .map(|name| BuiltinEntry {
            name: name.to_string(),
            mealy: builtins::builtin_text(name).expect("registry names resolve"),
        })
        .collect();
    Json(BuiltinList {
        builtins,
        patterns: vec!["identity<k>x<m>".to_string()],
    })
}

async fn get_builtin(Path(name): Path<String>) -> Result<Json<BuiltinEntry>, ApiError> {
    let mealy = builtins::builtin_text(&name)?;
    Ok(Json(BuiltinEntry { name, mealy }))
}

async fn info(Json(req): Json<MachineRequest>) -> Result<Json<Tagged<InfoReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        Ok(tagged(&req.machine, InfoReport::of(&m)))
    })
    .await
}

async fn dual(Json(req): Json<MachineRequest>) -> Result<Json<MachineResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        Ok(MachineResponse {
            machine: MachineDto::from(&m.dual()),
        })
    })
    .await
}

async fn inverse(Json(req): Json<MachineRequest>) -> Result<Json<MachineResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        Ok(MachineResponse {
            machine: MachineDto::from(&m.inverse()?),
        })
    })
    .await
}

async fn minimize_op(Json(req): Json<MachineRequest>) -> Result<Json<MinimizeResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let (quotient, partition) = minimize(&m);
        Ok(MinimizeResponse {
            machine: MachineDto::from(&quotient),
            partition: PartitionDto::of(&m, &partition),
        })
    })
    .await
}

async fn product(Json(req): Json<ProductRequest>) -> Result<Json<MachineResponse>, ApiError> {
    run(move || {
        let left = req.left.resolve()?;
        let right = req.right.resolve()?;
        Ok(MachineResponse {
            machine: MachineDto::from(&left.product(&right)?),
        })
    })
    .await
}

async fn power(Json(req): Json<PowerRequest>) -> Result<Json<MachineResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let p = explicit_power(&m, req.n, req.limit.unwrap_or(DEFAULT_SIZE_LIMIT))?;
        Ok(MachineResponse {
            machine: MachineDto::from(&p),
        })
    })
    .await
}

async fn apply(Json(req): Json<ApplyRequest>) -> Result<Json<ApplyResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let u = m.parse_state_word(&req.u)?;
        let s = m.parse_letter_word(&req.s)?;
        let out = m.apply(&u, &s)?;
        Ok(ApplyResponse {
            output: m.format_letter_word(&out),
        })
    })
    .await
}

async fn transitive(
    Json(req): Json<TransitiveRequest>,
) -> Result<Json<Tagged<mealy_core::power::TransitivityReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let target = if req.dual { m.dual() } else { m };
        let report =
            level_transitive_up_to(&target, req.depth, req.budget.unwrap_or(DEFAULT_ORBIT_BUDGET))?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn msizes(
    Json(req): Json<MsizesRequest>,
) -> Result<Json<Tagged<mealy_core::power::PowerSequenceReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = minimized_power_sizes(&m, req.depth, req.limit.unwrap_or(DEFAULT_SIZE_LIMIT))?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn growth(
    Json(req): Json<GrowthRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::GrowthReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = growth_function(
            &m,
            req.max_len,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.group,
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn certify(
    Json(req): Json<CertifyRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::CertificateReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = exponential_growth_certificate(
            &m,
            req.depth,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.budget.unwrap_or(DEFAULT_ORBIT_BUDGET),
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn lemma1(
    Json(req): Json<Lemma1Request>,
) -> Result<Json<Tagged<mealy_core::analysis::Lemma1Report>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = lemma1_verify(
            &m,
            req.n,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.budget.unwrap_or(DEFAULT_ORBIT_BUDGET),
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn proposition(
    Json(req): Json<PropositionRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::PropositionReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = proposition_verify(
            &m,
            req.depth,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.budget.unwrap_or(DEFAULT_ORBIT_BUDGET),
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn finiteness(
    Json(req): Json<FinitenessRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::FinitenessReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report =
            finiteness_probe(&m, req.depth, req.bound, req.limit.unwrap_or(DEFAULT_SIZE_LIMIT))?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn freeness(
    Json(req): Json<FreenessRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::FreenessReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = freeness_check(
            &m,
            req.depth,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.budget.unwrap_or(DEFAULT_SCAN_BUDGET),
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn relations(
    Json(req): Json<RelationsRequest>,
) -> Result<Json<Tagged<mealy_core::analysis::RelationsReport>>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        let report = find_relations(
            &m,
            req.max_len,
            req.limit.unwrap_or(DEFAULT_SIZE_LIMIT),
            req.budget.unwrap_or(DEFAULT_SCAN_BUDGET),
        )?;
        Ok(tagged(&req.machine, report))
    })
    .await
}

async fn same_action_op(
    Json(req): Json<SameActionRequest>,
) -> Result<Json<SameActionResponse>, ApiError> {
    run(move || {
        let left = req.left.resolve()?;
        let right = req.right.resolve()?;
        left.require_same_alphabet(&right)?;
        let u = left.parse_state_word(&req.u)?;
        let v = right.parse_state_word(&req.v)?;
        let sig_u = word_signature(&left, &u)?;
        let sig_v = word_signature(&right, &v)?;
        Ok(SameActionResponse {
            equal: sig_u == sig_v,
            left_digest: sig_u.digest(),
            right_digest: sig_v.digest(),
        })
    })
    .await
}

async fn census(
    Json(req): Json<CensusRequest>,
) -> Result<Json<mealy_core::census::CensusReport>, ApiError> {
    run(move || {
        let params = CensusParams {
            n_states: req.states,
            n_letters: req.letters,
            filter: CensusFilter {
                invertible: req.invertible,
                reversible: req.reversible,
                up_to_iso: req.up_to_iso,
            },
            depth: req.depth,
        };
        classify_census(params, req.cap.unwrap_or(DEFAULT_CENSUS_CAP))
    })
    .await
}

async fn dot(Json(req): Json<MachineRequest>) -> Result<Json<DotResponse>, ApiError> {
    run(move || {
        let m = req.machine.resolve()?;
        Ok(DotResponse { dot: export_dot(&m) })
    })
    .await
}
