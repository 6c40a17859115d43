//! Thin typed HTTP client for the workbench service.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use mealy_core::analysis::{
    CertificateReport, FinitenessReport, FreenessReport, GrowthReport, Lemma1Report,
    PropositionReport, RelationsReport,
};
use mealy_core::census::CensusReport;
use mealy_core::power::{PowerSequenceReport, TransitivityReport};
use mealy_core::wire::*;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Http(#[from] reqwest::Error),

    #[error("{code}: {message}")]
    Api {
        status: u16,
        code: String,
        message: String,
    },

    #[error("cannot decode response: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, ClientError>;

/// Client bound to one server base URL, e.g. `http://127.0.0.1:8787`.
#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base_url: &str) -> Client {
        Client {
            base: base_url.trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T> {
        let status = resp.status();
        let bytes = resp.bytes().await?;
        if status.is_success() {
            serde_json::from_slice(&bytes).map_err(|e| ClientError::Decode(e.to_string()))
        } else {
            match serde_json::from_slice::<ErrorBody>(&bytes) {
                Ok(body) => Err(ClientError::Api {
                    status: status.as_u16(),
                    code: body.error.code,
                    message: body.error.message,
                }),
                Err(_) => Err(ClientError::Api {
                    status: status.as_u16(),
                    code: "http-error".into(),
                    message: String::from_utf8_lossy(&bytes).into_owned(),
                }),
            }
        }
    }

    async fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        req: &Req,
    ) -> Result<Resp> {
        let resp = self
            .http
            .post(format!("{}{path}", self.base))
            .json(req)
            .send()
            .await?;
        Self::decode(resp).await
    }

    async fn get<Resp: DeserializeOwned>(&self, path: &str) -> Result<Resp> {
        let resp = self.http.get(format!("{}{path}", self.base)).send().await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<serde_json::Value> {
        self.get("/v1/health").await
    }

    pub async fn builtins(&self) -> Result<BuiltinList> {
        self.get("/v1/builtins").await
    }

    pub async fn builtin(&self, name: &str) -> Result<BuiltinEntry> {
        self.get(&format!("/v1/builtins/{name}")).await
    }

    pub async fn info(&self, req: &MachineRequest) -> Result<Tagged<InfoReport>> {
        self.post("/v1/info", req).await
    }

    pub async fn dual(&self, req: &MachineRequest) -> Result<MachineResponse> {
        self.post("/v1/dual", req).await
    }

    pub async fn inverse(&self, req: &MachineRequest) -> Result<MachineResponse> {
        self.post("/v1/inverse", req).await
    }

    pub async fn minimize(&self, req: &MachineRequest) -> Result<MinimizeResponse> {
        self.post("/v1/minimize", req).await
    }

    pub async fn product(&self, req: &ProductRequest) -> Result<MachineResponse> {
        self.post("/v1/product", req).await
    }

    pub async fn power(&self, req: &PowerRequest) -> Result<MachineResponse> {
        self.post("/v1/power", req).await
    }

    pub async fn apply(&self, req: &ApplyRequest) -> Result<ApplyResponse> {
        self.post("/v1/apply", req).await
    }

    pub async fn transitive(&self, req: &TransitiveRequest) -> Result<Tagged<TransitivityReport>> {
        self.post("/v1/transitive", req).await
    }

    pub async fn msizes(&self, req: &MsizesRequest) -> Result<Tagged<PowerSequenceReport>> {
        self.post("/v1/msizes", req).await
    }

    pub async fn growth(&self, req: &GrowthRequest) -> Result<Tagged<GrowthReport>> {
        self.post("/v1/growth", req).await
    }

    pub async fn certify(&self, req: &CertifyRequest) -> Result<Tagged<CertificateReport>> {
        self.post("/v1/certify", req).await
    }

    pub async fn lemma1(&self, req: &Lemma1Request) -> Result<Tagged<Lemma1Report>> {
        self.post("/v1/lemma1", req).await
    }

    pub async fn proposition(&self, req: &PropositionRequest) -> Result<Tagged<PropositionReport>> {
        self.post("/v1/proposition", req).await
    }

    pub async fn finiteness(&self, req: &FinitenessRequest) -> Result<Tagged<FinitenessReport>> {
        self.post("/v1/finiteness", req).await
    }

    pub async fn freeness(&self, req: &FreenessRequest) -> Result<Tagged<FreenessReport>> {
        self.post("/v1/freeness", req).await
    }

    pub async fn relations(&self, req: &RelationsRequest) -> Result<Tagged<RelationsReport>> {
        self.post("/v1/relations", req).await
    }

    pub async fn same_action(&self, req: &SameActionRequest) -> Result<SameActionResponse> {
        self.post("/v1/same-action", req).await
    }

    pub async fn census(&self, req: &CensusRequest) -> Result<CensusReport> {
        self.post("/v1/census", req).await
    }

    pub async fn dot(&self, req: &MachineRequest) -> Result<DotResponse> {
        self.post("/v1/dot", req).await
    }
}
