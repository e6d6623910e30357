//! Smooth self-similar solutions of the spherically symmetric SO(d)
//! Yang-Mills equations in odd dimensions d = 2m+5 >= 11.
//!
//! The reduced profile equation on the interior of the past light cone,
//!
//! ```text
//! y^2 (1-y^2) u'' + ((d-3) y - 2 y^3) u' + (d-2) u (1 - u^2) = 0,
//! ```
//!
//! admits smooth solutions only when the endpoint value c = u(1) satisfies a
//! polynomial condition P_m(c^2) = 0. This crate derives P_m exactly from the
//! triangular coefficient system at y = 1, counts its roots in (0,1) with
//! Sturm sequences, splits off the quadratic factor carried by the two
//! explicit rational solutions, isolates the remaining root, and constructs
//! the corresponding solution numerically by a shooting method, together
//! with its extension past the light cone and the autonomous large-a limit.
//!
//! Layering: [`exact`] and [`poly`] are the exact substrate, [`series`] and
//! [`roots`] the exact pipeline, [`real`], [`ode`] and [`shoot`] the
//! numerical side, and [`report`] the emission layer shared with the CLI.

pub mod exact;
pub mod ode;
pub mod poly;
pub mod real;
pub mod report;
pub mod roots;
pub mod series;
pub mod shoot;

pub use exact::{BigRational, QuadExt};
pub use poly::{PolyQ, RootInterval};
pub use real::{Dd, Real};
pub use roots::{analyze_case, count_n, CaseReport, RootOrdering};
pub use series::{derive_system, extract_pm, residual_condition, zero_series};
pub use shoot::{
    autonomous_limit, c_of_a, extend_exterior, find_astar, interior_profile, verify_profile,
    ShootConfig, SolutionProfile,
};
