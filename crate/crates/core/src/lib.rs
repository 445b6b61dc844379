//! The alternating Halpern–Mann iteration
//!
//! ```text
//! x_{2n+1} = (1-α_n) T(x_{2n}) ⊕ α_n u
//! x_{2n+2} = (1-β_n) U(x_{2n+1}) ⊕ β_n x_{2n+1}
//! ```
//!
//! over CAT(0) model spaces, its special cases (Halpern, Krasnoselskii–Mann,
//! Tikhonov–Mann, generalized forward-backward and Douglas–Rachford), exact
//! arbitrary-precision evaluation of the associated quantitative rates, and
//! empirical oracles that check those rates against actual trajectories.

pub mod error;
pub mod geometry;
pub mod operators;
pub mod rates;
pub mod schemes;
pub mod splitting;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{GeodesicSpace, Point, SpaceModel};
