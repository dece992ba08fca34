//! Statistics of short closed geodesics on random Weil-Petersson surfaces.
//!
//! The crate has two layers. The exact layer works in the ring Q[pi^2]:
//! Weil-Petersson volume polynomials are assembled from ingested
//! psi-class intersection data ([`volumes`]), mapping-class-group orbits of
//! multicurves are enumerated combinatorially ([`topology`]), and expected
//! counts / joint factorial moments of short simple closed geodesics are
//! integrated exactly over length boxes ([`moments`]). The asymptotic layer
//! evaluates the large-genus limit laws ([`limits`]) and samples the limiting
//! Poisson point process of the bottom length spectrum with statistical
//! verification ([`sim`]).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `wpspectrum` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod exact;
pub mod hp;
pub mod limits;
pub mod moments;
pub mod quad;
pub mod sim;
pub mod topology;
pub mod volumes;

pub use exact::{box_moment_integral, BoundaryPoly, BoxDomain, PiSquarePoly, Rat};
pub use hp::HpReal;
