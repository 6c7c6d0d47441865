//! Multi-designated-detector watermarking for token streams.

pub mod algebra;
pub mod base_sigs;
pub mod cmdvs;
pub mod dvs;
pub mod games;
pub mod mdvs;
pub mod model;
pub mod oracles;
pub mod stats;
pub mod watermark;

pub use algebra::{Group, PairingGroup, Prod128};

/// Order-11 subgroup of Z_23^*, small enough to brute-force.
pub type Toy23 = algebra::Modp<23, 11, 2>;
/// Order-65521 subgroup of Z_p^* for p = 2149481927.
pub type Test16 = algebra::Modp<2149481927, 65521, 687385019>;
