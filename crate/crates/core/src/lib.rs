pub mod analysis;
pub mod boundary;
pub mod calculus;
pub mod clift;
pub mod domain;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod solver;
