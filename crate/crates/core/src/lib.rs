//! Exact symbolic computation in untwisted simply-laced quantum affine algebras.
//!
//! The crate realizes a quantum affine algebra of type `A`, `D`, or `E` in two
//! presentations — the Chevalley–Serre presentation on generators
//! `E_i, F_i, K_α, γ^{±1/2}, D^{±1}` and the Drinfeld (loop) presentation on
//! generators `x^±_{i,k}, h_{i,l}, K_α, γ^{±1/2}, D^{±1}` — over the exact
//! coefficient field `ℚ(q^{1/2})`, together with:
//!
//! * lattice and Weyl-group combinatorics for the affine root system,
//!   including the doubly-infinite root sequence attached to a translation
//!   word and the convex order it induces (`rootsystem`);
//! * a confluent-in-region rewriting engine over words whose letters carry a
//!   single folded Cartan atom (`algebra`);
//! * rule sets, involutions (`Φ`, `Ω`, bar), Hopf-structure checks, and
//!   Lusztig integral-form elements for both presentations (`presentations`);
//! * braid-group operators `T_i^{±1}`, diagram automorphisms, and operators
//!   `T_w` attached to reduced words of extended affine Weyl elements
//!   (`braid`);
//! * the catalog of real and imaginary root vectors, the modified root
//!   vectors, and the identities tying the braid side to the loop side
//!   (`rootvectors`);
//! * the convex-ordered PBW basis machinery with exact independence and
//!   graded-count certificates (`pbw`);
//! * quantum imaginary Verma modules with exact action, graded dimensions,
//!   and a singular-vector probe (`verma`).
//!
//! Everything is exact: coefficients are reduced rational functions in
//! `v = q^{1/2}` with canonical representatives, and every equality test is
//! syntactic equality of canonical forms. The crate is `no_std` (with `alloc`);
//! all IO lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod braid;
pub mod coeff;
pub mod pbw;
pub mod presentations;
pub mod rootsystem;
pub mod rootvectors;
pub mod verma;
