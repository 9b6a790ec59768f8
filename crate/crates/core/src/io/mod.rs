//! Configuration files, CSV tables, VTK snapshots and run manifests.

pub mod config;
pub mod manifest;
pub mod tables;
pub mod vtk;

pub use config::{parse_config, parse_config_str, serialize_config};
pub use manifest::RunManifest;
pub use tables::{
    convergence_rows, entropy_rows, read_rows, write_energy, write_rows, ConvergenceRow, EntropyRow, Row,
};
pub use vtk::write_vtk;
