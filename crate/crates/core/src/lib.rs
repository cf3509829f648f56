pub mod cli;
pub mod continuum;
pub mod linalg;
pub mod map;
pub mod packing;
pub mod potential;
pub mod transfer;
