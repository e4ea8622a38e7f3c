//! Dense complex operators on labelled tensor-product spaces.

mod json;
mod layout;
mod operator;
mod random;
mod standard;

pub use json::{to_json_string, FullPrecision, OperatorJson};
pub use layout::SubsystemLayout;
pub use operator::{Operator, C64};
pub use random::{
    complex_gaussian, ginibre, haar_unitary, random_haar_unitary, random_hermitian, RandomSource,
};
pub use standard::{
    max_entangled_projector, max_entangled_projector_on, pauli, pauli_named, pauli_string, Pauli,
    LEFT_LEG, RIGHT_LEG,
};
