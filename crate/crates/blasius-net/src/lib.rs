//! Command-line front end and file formats for [`blasius_net_core`].
//!
//! - [`model_file`]: plain-text model persistence, bit-exact round trip
//! - [`profile_csv`]: `eta,f,fp,fpp` profiles and comparison output
//! - [`fixtures`]: the reference tables used by `compare`
//! - [`parallel`]: multi-seed training on a thread pool
//! - [`gradcheck`]: finite-difference checks behind `check-gradients`
//! - [`cli`]: argument parsing and the subcommands

pub mod cli;
pub mod fixtures;
pub mod gradcheck;
pub mod model_file;
pub mod parallel;
pub mod profile_csv;

/// Scientific notation with 17 significant digits, independent of locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
