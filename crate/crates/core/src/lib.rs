//! Uniformly random pre-factored integers and ideals, norm-bounded.
//!
//! The library has three layers:
//!
//! * exact arithmetic plumbing: [`rng::RandomSource`] (deterministic, exactly
//!   uniform), primality, factored integers, polynomials over finite fields;
//! * structure of the target rings: prime splitting in number fields
//!   ([`number_field`]) and in rings F_q[t][y]/(F) ([`function_field`]),
//!   plus exact ideal counting and unranking ([`ideals`]);
//! * the samplers themselves: [`kalai`] for uniform factored integers and
//!   [`sampler`] / [`function_field`] for uniform factored ideals of bounded
//!   norm, by rejection from a product-of-geometrics candidate law.
//!
//! Every probability in the pipeline is an exact `BigRational`; every random
//! choice goes through `RandomSource`, so runs are reproducible per seed.

pub mod arith;
pub mod error;
pub mod factored;
pub mod function_field;
pub mod ideals;
pub mod kalai;
pub mod number_field;
pub mod poly;
pub mod polyfactor;
pub mod rng;
pub mod sampler;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
