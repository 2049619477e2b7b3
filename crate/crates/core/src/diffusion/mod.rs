//! Transient 2D diffusion on a rectangular cell-centred grid: Dirichlet data
//! on the top face, zero flux on the other three sides, zero initial field.

mod evaluators;
mod grid;
pub mod io;
mod probes;
mod slab;
mod solver;

pub use evaluators::{FieldEvaluator, LinearResponseEvaluator, ProbeEvaluator};
pub use grid::{Grid, ScalarField, DOMAIN_HEIGHT, DOMAIN_WIDTH};
pub use probes::{downsample_bc, probe_sample, resample_cell_centred, ProbeSet, DEFAULT_PROBES};
pub use slab::slab_solution;
pub use solver::{field_max, solve, solve_with, DiffusionConfig, Scheme, TimeStepping};

/// Upper limit for boundary scalars.
pub const S_TOP_MAX: f64 = 30.0;
