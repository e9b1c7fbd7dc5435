//! Numerical checks of the inverse Poletsky inequality on sampled lifted
//! families, and equicontinuity scans of the mapping families in the
//! interior (Euclidean) and up to the boundary (chordal).

mod eta;
mod poletsky;
mod scan;

pub use eta::{rhs_integral, EtaKind, EtaProfile, ADMISSIBILITY_TOL};
pub use poletsky::{verify_poletsky, PoletskyReport, PoletskySampling, RhsValue, POLETSKY_MARGIN};
pub use scan::{
    closure_scan, default_directions, default_radii, equicontinuity_scan, EquicontinuityReport, Metric,
    ScanRow, ScanVerdict, C_HAT_STABILITY, DIVERGENCE_SLOPE, FLUCTUATION_TOL,
};
