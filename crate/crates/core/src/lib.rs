//! Second-order (and general t-th order) covering codes over `Z_q`.
//!
//! The crate computes exact t-th covering radii, searches for minimum
//! codes at small lengths, evaluates the asymptotic rate bounds and runs the
//! random-code covering model that underlies the optimal second-order rate.

pub mod bounds;
pub mod error;
pub mod pool;
pub mod probmodel;
pub mod radius;
pub mod search;
pub mod words;

pub use error::{Error, Result};
pub use radius::{
    covering_radius, deep_holes, is_covering, t_covering_radius, Coverage, RadiusReport,
    ScanOptions,
};
pub use words::{
    ball_size, hamming_distance, parse_word, radius_from_rho, t_distance, t_weight, Alphabet, Code,
    MatrixWord, Word,
};
