//! Configurable experiment drivers: JSON config in, [`ResultTable`] out.

mod config;
mod runs;
mod table;

pub use config::{
    Expectation, ExperimentConfig, GridConfig, GroupConfig, PairSpec, QuadratureSpec, SymbolSpec,
    Tolerances, VectorChoice,
};
pub use runs::{
    run, run_berezin_limit, run_commute, run_kernel_decay, run_szego, run_verify, Experiment,
    Integrator,
};
pub use table::{Assertion, Cell, Provenance, ResultTable};
