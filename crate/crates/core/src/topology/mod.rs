//! Cubical complexes of configurations, GF(2) Betti numbers, components,
//! the Betti score and topological diagnostics.

mod complex;
mod components;
mod diagnostics;

pub use complex::{
    betti_numbers, build_complex, build_complex_capped, complex_of_points, BettiVector, Cell, CubicalComplex,
    DEFAULT_SUPPORT_CAP, MAX_COMPLEX_DIM,
};
pub use components::{betti_score, components, BettiScore, ComponentDecomposition};
pub use diagnostics::{
    betti_csv, duality_check_2d, subcriticality_probe, ConnectionRow, DualityReport, SubcriticalityReport,
};

pub(crate) use diagnostics::linear_fit;
