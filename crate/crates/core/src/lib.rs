//! Filtered knot contact homology DGAs of transverse links.
//!
//! A transverse link is given as the closure of a braid. From the braid
//! word this crate builds the filtered differential graded algebra over
//! `ℤ[λ_j^{±1}, μ_j^{±1}][U, V]`, checks its structural identities
//! exactly, produces its specializations and the infinity version, and
//! counts augmentations to finite prime fields.
//!
//! ```
//! use tdga_core::{braid::parse_braid, dga::build_filtered_dga};
//!
//! let b = parse_braid("", Some(1)).unwrap();
//! let d = build_filtered_dga(&b).unwrap();
//! assert_eq!(d.render_text().lines().next().unwrap(), "∂⁻c = U + λ + λμV + μ");
//! ```

pub mod augment;
pub mod braid;
pub mod braid_action;
pub mod coeff;
pub mod dga;
pub mod error;
mod flat;
pub mod free_algebra;
pub mod json;

pub use error::{Error, Result};
