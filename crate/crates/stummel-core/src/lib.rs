//! Numerical analysis of Stummel moduli, Morrey norms, and Lorentz norms
//! for a catalog of radial and bump-sum model functions.
//!
//! The crate is organized around one representation: piecewise power-log
//! functions `c t^a |ln t|^b`. Scales, radial profiles, and every polar
//! reduced integrand live in that family, which is closed under products,
//! powers, and prefix integration (via incomplete gamma functions), so the
//! primary computation paths are closed form. Adaptive quadrature and a
//! seeded Monte Carlo integrator exist as cross-checking oracles, not as
//! the main route.
//!
//! Divergent integrals and infinite norms are ordinary values here
//! (`IntegralValue::Divergent`, `NormValue::Infinite`); errors are reserved
//! for malformed descriptors and genuine numerical failure.

pub mod catalog;
pub mod error;
pub mod grid;
pub mod inclusion;
mod powerlog;
pub mod quad;
pub mod scale;
pub mod spaces;
pub mod special;
pub mod stummel;

pub use catalog::{Geometry, Shape, TestFunction};
pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use inclusion::{
    check_theorem, claims_agree, fit_envelope, predict_and_check_morrey, verify_paper,
    verify_quantitative_bound, BoundReport, ClaimRow, Conclusion, EnvelopeFit,
    HypothesisChecklist, HypothesisItem, MorreyPrediction, TheoremId, TheoremParams,
};
pub use quad::{
    integrate_ball_mc, integrate_radial, integrate_radial_between, IntegralValue, McEstimate,
    RadialIntegrand, RadialTerm,
};
pub use scale::{
    check_conditions, integral_scale_over_t, integral_scale_over_t_between, product_integral,
    CheckMethod, ConditionReport, ConditionStatus, ScaleFunction,
};
pub use spaces::{
    classical_morrey_norm, classical_weak_morrey_norm, decreasing_rearrangement,
    distribution_function, lebesgue_pth_power, lorentz_norm, morrey_norm,
    rearrangement_pth_power, space_norm, weak_morrey_norm, NormReport, NormValue, NormWitness,
    RearrangementProfile, SpaceSpec,
};
pub use stummel::{
    center_integral_mc, classify, doubling_check, eta, modulus_curve, ClassificationReport,
    DoublingReport, Evidence, Membership, MembershipVerdict, ModulusCurve,
};
