//! Computational hyperbolic geometry on a closed genus-2 surface.
//!
//! The crate models the tangent space to Teichmüller space through three
//! interlocking constructions:
//!
//! * **Balanced geodesic graphs** ([`geograph`]): embedded graphs on the
//!   surface with geodesic edges and real weights satisfying the balance
//!   condition `Σ w_e v_e = 0` at every vertex (`v_e` the unit tangents into
//!   the incident edges).
//! * **Group cohomology** ([`cohomology`]): cocycles `τ : π₁(S) → so(2,1)`
//!   for the adjoint action of the holonomy, the map `Φ` from balanced graphs
//!   to cocycles, the Goldman cup-product pairing, and finite earthquake
//!   deformations.
//! * **Minkowski convex hulls** ([`mess`]): the inverse construction — from a
//!   cocycle, an equivariant convex polyhedral surface in `ℝ^{2,1}` whose
//!   Gauss map reads off a balanced graph realizing the same class.
//!
//! Two independent evaluations of the Weil–Petersson symplectic pairing are
//! provided: the angle-sum formula `ω = ½ Σ w_e w_e' cos θ` over surface
//! crossings ([`wolpert`]) and the cup product on the fundamental 2-cycle of
//! the surface-group presentation ([`cohomology::goldman_pairing`]); they
//! agree up to the classical factor 4.
//!
//! Everything is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features");

extern crate alloc;

pub mod cohomology;
pub mod config;
pub mod fuchsian;
pub mod geograph;
pub mod goldman;
pub mod hull;
pub mod linalg;
pub mod mess;
pub mod mink;
pub mod real;
pub mod wolpert;
pub mod words;

#[cfg(test)]
pub(crate) mod testutil;
