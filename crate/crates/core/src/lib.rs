pub mod algebra;
pub mod charfun;
pub mod corr;
pub mod curvature;
pub mod dual;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod mutation;
pub mod pointeval;
pub mod poisson;
pub mod report;
pub mod scenario;
pub mod suite;

pub use error::{HardyError, Result};
