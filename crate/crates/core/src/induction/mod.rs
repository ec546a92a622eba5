//! Covectors, the S-set construction, subordinate subalgebras and the
//! Schrodinger operator of the induced representation.

mod ansatz;
mod assumptions;
mod covector;
mod operator;
mod sset;
mod subordinate;
mod symplectic;

pub use ansatz::{reduce_ansatz, AnsatzReduction, AnsatzSpec, Phase};
pub use assumptions::{check_assumptions, AssumptionReport, PairCheck};
pub use covector::{
    default_symbol, describe as describe_covector, make_covectors, Component, Covector,
    CovectorConfig, CovectorPair, CovectorSpec,
};
pub use operator::{
    central_reduction, derive_operator, derive_operator_closed_form, derived_representation,
    has_central_v1_element, representation_oracle, CentralReduction, CentralTest, Channel,
    ChannelDocument, DerivedRepresentation, OperatorDocument, OracleReport, Route,
    SchrodingerOperator,
};
pub use sset::{compute_s, Branch, SSetResult};
pub use subordinate::{build_subordinate, SubordinateSubalgebra};
pub use symplectic::{poisson_rank_probe, ProbeOptions, SamplePoint, SymplecticReport};
