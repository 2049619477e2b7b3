//! B-spline airfoil parametrization, coefficient bounds, Cp re-interpolation
//! and the external pressure evaluator protocol.

mod bspline;
mod evaluator;
mod geometry;
mod naca;

pub use bspline::{fit_least_squares, SplineBasis};
pub use evaluator::{
    interpolate_cp, mock_pressure, serve, AirfoilEvaluator, CpDistribution, ExternalEvaluator,
    Fidelity, FlowConditions, MockBackend, PressureBackend, Request, Response,
};
pub use geometry::{original_bounds, realize_geometry, AirfoilDesign, Geometry, COEFFS_PER_SURFACE};
pub use naca::{cosine_spacing, fit_baseline, fit_surfaces, naca4_surfaces, Baseline};

/// Width of the overlap margin added to the baseline coefficients.
pub const BOUND_MARGIN: f64 = 1e-5;
