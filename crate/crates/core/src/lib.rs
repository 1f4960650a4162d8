//! Finite-precision l-adic toolkit for open-image computations on products
//! of elliptic curves.
//!
//! Everything is computed in `Z/l^N` for a prime `l` and a working precision
//! `N`, with valuations capped at `N`. The crate provides, bottom up:
//!
//! * [`padic`] — scalar arithmetic, unit inverses, square roots of `1 + t`,
//!   and Newton (Hensel) lifting of approximate polynomial roots;
//! * [`matrix`] — 2x2 / 3x3 matrices, trace-zero projections, adjoint
//!   operators on the trace-zero plane, and approximate-eigenvalue
//!   certificates;
//! * [`bounds`] — a three-tier big-number type (exact rational / log10 /
//!   log10 log10, always rounded towards an upper bound) and the explicit
//!   index-bound tower;
//! * [`group`] — finite matrix groups by closure, congruence balls, index
//!   formulas, and the fibered-product (Goursat) exponent machinery;
//! * [`lattice`] — echelon bases of lattices in products of trace-zero
//!   planes, membership certificates, conjugation-stable gain, and the
//!   basis-rescaling map;
//! * [`inner`] — approximate Lie-algebra morphisms between trace-zero
//!   planes, the intertwiner construction certifying that such a morphism
//!   is conjugation, and the scalar-matching test;
//! * [`verify`] — seeded, deterministic verification suites over the whole
//!   stack, with machine-readable reports;
//! * [`oracle`] — slow, independent reference implementations (exhaustive
//!   search, exact rational series) used to cross-check the fast paths.

pub mod bounds;
pub mod group;
pub mod inner;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod padic;
pub mod verify;
