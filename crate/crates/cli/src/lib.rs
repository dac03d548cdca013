//! IO and front-end layer over `bugassign-core`: corpus file formats,
//! the tracker REST client with snapshots, versioned model files, report
//! rendering, and run configuration.

pub mod config;
pub mod corpus_io;
pub mod fetch;
pub mod model_io;
pub mod report;
