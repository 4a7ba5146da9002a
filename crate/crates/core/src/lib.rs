pub mod error;
pub mod grid;
pub mod qcore;
pub mod hyperg;
pub mod asc;
pub mod radial;
pub mod tridiag;
pub mod laplacian;
pub mod spectral;
pub mod cfun;
pub mod repsim;
pub mod verify;
