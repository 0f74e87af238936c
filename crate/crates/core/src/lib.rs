pub mod cli;
pub mod fujita_driver;
pub mod multiplier_rees;
pub mod ns_lattice;
pub mod polygon;
pub mod scalar;
pub mod toric_bundle;
pub mod volume_engine;
