//! Numeric checks of what the constructions assert: smoothness of `f/f′`,
//! flatness, Hölder exponents, geodesic endpoints and boundary angles.
//!
//! Every report keeps the raw sequence its verdict was read from.

pub mod geodesic;
pub mod holder;
pub mod smoothness;

pub use geodesic::{
    boundary_tangency_angle, endpoints_under, transversality_check, AngleReport,
    EndpointEvidence, EndpointReport, Geodesic, TransversalityReport,
};
pub use holder::{
    ball_conjugacy, chart_conjugacy, conjugacy_exponent, holder_exponent, ActionModel,
    ConjugacyHolder, HolderFit,
};
pub use smoothness::{
    classify_smoothness, flatness_order, FlatnessReport, FlatnessVerdict, GridSpec,
    OrderEvidence, SmoothnessProbe, SmoothnessReport, SmoothnessVerdict,
};
