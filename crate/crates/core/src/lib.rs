//! Numerical theory of almost generic covers `f: X -> P2`.
//!
//! * [`profile`]: singularity classes of the branch curve and count profiles.
//! * [`invariants`]: `g(B)`, class, `R^2`, `K^2`, `e(X)`, `chi(O_X)`, Hodge bound.
//! * [`galois`]: singular points of the Galois closure and invariants of its resolution.
//! * [`feasibility`]: necessary conditions and profile enumeration.
//! * [`local_models`]: exact checks of the normal forms `f_n`.
//! * [`monodromy`]: numerical certification of local monodromy groups.

pub mod feasibility;
pub mod galois;
pub mod invariants;
pub mod json;
pub mod local_models;
pub mod monodromy;
pub mod poly;
pub mod profile;

pub use feasibility::{
    check_constraints, enumerate_brute_force, enumerate_profiles, ConstraintReport, CountCap,
    EnumerationQuery,
};
pub use galois::GaloisReport;
pub use invariants::InvariantReport;
pub use poly::BivariatePolynomial;
pub use profile::{
    aggregates, make_class, validate_profile, Aggregates, Family, SingularProfile, SingularityClass,
};
