//! Conversions between spin tomograms and continuous-variable tomograms
//! (symplectic, photon-number, Wigner) through the Jordan-Schwinger map.

pub mod error;
pub mod hilbert;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod tomography;
pub mod transforms;
pub mod verification;

pub use error::{Error, Result};
pub use specfun::{EulerAngles, HalfInt};
