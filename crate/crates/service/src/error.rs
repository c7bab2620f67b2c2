use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// JSON error body `{code, message, field?}` with its HTTP status.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), field: None }
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError { field: Some(field.into()), ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "schema_violation", message) }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<vip_core::Error> for ApiError {
    fn from(e: vip_core::Error) -> Self {
        use vip_core::Error as E;
        match e {
            E::UnknownDemo(id) => Self::not_found("unknown_demo", format!("unknown demo `{id}`")),
            E::Schema { ref field, .. } => Self::invalid(field.clone(), e.to_string()),
            E::InvalidParameter { name, .. } => Self::invalid(name, e.to_string()),
            E::MissingInput(_) => Self::invalid("input_id", e.to_string()),
            E::Io(_) => Self::internal(e.to_string()),
            other => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_data", other.to_string()),
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        Self::internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
