//! Verification toolkit for the combinatorics and homotopy theory of
//! relative posets: double subdivisions, horn regions and their cone posets,
//! retractions and anodyne filtrations, contractibility certificates, and
//! exact homotopy limits of chain-complex diagrams over subdivided horns.
//!
//! The `examples/` directory demonstrates each capability; the `relcat-kit`
//! binary exposes the same checks on the command line.

pub mod rational;
pub mod linalg;
pub mod relposet;
pub mod subdivision;
pub mod simplicial;
pub mod homology;
pub mod fibcat;
pub mod verifier;
