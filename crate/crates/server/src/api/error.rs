use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

/// Error response: an HTTP status with `{code, message}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn unauthenticated() -> Self {
        ApiError::new(StatusCode::UNAUTHORIZED, "unauthenticated", "a valid bearer token is required")
    }
}

impl From<curio_core::Error> for ApiError {
    fn from(e: curio_core::Error) -> Self {
        use curio_core::Error::*;
        let status = match &e {
            Validation { .. } | Load(_) => StatusCode::UNPROCESSABLE_ENTITY,
            NotFound { .. } => StatusCode::NOT_FOUND,
            Conflict(_) => StatusCode::CONFLICT,
            Unauthorized(_) => StatusCode::UNAUTHORIZED,
            Usage(_) => StatusCode::BAD_REQUEST,
            Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let message = match &e {
            Io(_) => "storage failure".to_owned(),
            _ => e.to_string(),
        };
        if status.is_server_error() {
            log::error!("{e}");
        }
        ApiError::new(status, e.code(), message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
