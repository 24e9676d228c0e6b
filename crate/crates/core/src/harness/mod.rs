//! Instance generation, JSON schemas and the property-suite runner.

pub mod gen;
pub mod rng;
pub mod schema;
pub mod suite;

pub use gen::{
    gen_bj_pair, gen_element, gen_hermitian_operator, gen_nilpotent_operator, gen_normal_instance,
    gen_operator, gen_parallel_operators, gen_parallel_pair, gen_random_pair,
    gen_theta_positive_pair,
};
pub use rng::{derive_seed, stream_id, SplitMix64};
pub use suite::{
    registry, replay, run_suite, run_suite_with, Property, PropertyReport, SuiteConfig,
    SuiteReport, Trial, Verdict,
};
