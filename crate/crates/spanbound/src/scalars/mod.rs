//! The ambient algebras K and their exact element arithmetic.
//!
//! Five backends cover the hypothesis combinations the checkers need:
//! finite fields GF(p^n), monic extensions k[y]/(g) (including inseparable
//! ones), rational function fields k0(t), rational quaternions, and group
//! algebras k0[G].

mod backend;
mod descriptor;
mod irreducible;
mod parse;
mod sample;

pub use backend::{Backend, Element, MAX_GROUP_ORDER};
pub use descriptor::{BackendDescriptor, BaseDescriptor, GroupDescriptor};
pub use irreducible::{check_irreducible, is_separable, MAX_MODULUS_DEGREE};
pub use sample::{sample_coeff, sample_element, sample_set, SampleBudget};

pub(crate) use backend::Kind;
