//! Command line front end and read-only HTTP service over a built graph.

pub mod api;
pub mod commands;
