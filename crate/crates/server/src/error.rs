use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use scafnav_core::algebra::{FbddError, HitProblem};
use scafnav_core::index::IndexError;
use scafnav_core::molgraph::SmilesError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    UnknownScaffold,
    ParseError,
    BadRequest,
    /// Not an error status; results that hit a cap carry a flag instead.
    TruncatedUpstream,
    Internal,
}

impl ApiErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ApiErrorCode::UnknownScaffold => StatusCode::NOT_FOUND,
            ApiErrorCode::ParseError | ApiErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ApiErrorCode::TruncatedUpstream => StatusCode::OK,
            ApiErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl ApiError {
    pub fn new(code: ApiErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ApiErrorCode::BadRequest, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ApiErrorCode::Internal, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

impl From<SmilesError> for ApiError {
    fn from(e: SmilesError) -> Self {
        ApiError::new(ApiErrorCode::ParseError, e.to_string())
    }
}

impl From<IndexError> for ApiError {
    fn from(e: IndexError) -> Self {
        let code = match e {
            IndexError::UnknownScaffold(_) | IndexError::UnknownScaffoldId(_) => ApiErrorCode::UnknownScaffold,
            IndexError::Parse(_) => ApiErrorCode::ParseError,
            _ => ApiErrorCode::Internal,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<FbddError> for ApiError {
    fn from(e: FbddError) -> Self {
        let message = e.to_string();
        match e {
            FbddError::Hits(errors) => {
                let code = match errors[0].problem {
                    HitProblem::Parse(_) => ApiErrorCode::ParseError,
                    HitProblem::UnknownScaffold(_) => ApiErrorCode::UnknownScaffold,
                    HitProblem::Ringless => ApiErrorCode::BadRequest,
                };
                ApiError {
                    code,
                    message,
                    detail: serde_json::to_value(&errors).ok(),
                }
            }
            _ => ApiError::bad_request(message),
        }
    }
}
