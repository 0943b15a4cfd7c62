//! Edge-list ingestion and experiment configuration.

pub mod config;
pub mod edgelist;

pub use config::{threads_from_env, ExperimentConfig, NetworkSource, CONFIG_VERSION, THREADS_ENV};
pub use edgelist::{ingest_edge_list, parse_edge_list, write_edge_list, IngestWarnings, IngestedGraph};
