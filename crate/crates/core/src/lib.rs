pub mod barnes_wall;
pub mod catalog;
pub mod design;
pub mod error;
pub mod golay;
pub mod gram;
pub mod hnf;
pub mod lattice;
pub mod linalg;
pub mod ratmat;
pub(crate) mod reduce;
pub mod rng;
pub mod shells;
pub mod special;
pub mod theta;
pub mod variation;
pub mod zeta;
