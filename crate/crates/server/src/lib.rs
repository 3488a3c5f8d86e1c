//! HTTP/JSON service and operator command line for the curio annotation
//! platform.

pub mod api;
pub mod cli;
