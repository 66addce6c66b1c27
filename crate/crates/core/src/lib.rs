#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod localization;
pub mod lpdecomp;
pub mod measure;
pub mod optimize;
pub mod quadrature;
pub mod specfun;
pub mod spectral;
pub mod thinsets;
pub mod translation;
pub mod uncertainty;
pub mod zoo;

pub use error::{Error, Result};
pub use specfun::Alpha;
