//! Numerical differential geometry of spacelike surfaces in anti-de Sitter
//! 3-space, at desk scale.
//!
//! AdS³ is modeled as PSL(2,ℝ) = {M ∈ SL(2,ℝ)}/±1 carrying the bi-invariant
//! Lorentzian metric induced by the quadratic form q(M) = −det M of signature
//! (2,2) on the matrix algebra. The crate provides
//!
//! - models of the hyperbolic plane and its isometry group ([`hyperbolic`]),
//! - the two matrix models of AdS³, its geodesics, duality and the projective
//!   affine chart ([`ads`]),
//! - finite-difference extrinsic geometry of sampled spacelike surfaces:
//!   fundamental forms, shape operator, Gauss equation K = −1 − det B,
//!   left/right projections to ℍ² and normal evolution ([`surface`]),
//! - the tensor calculus attached to area-preserving maps of ℍ² (square-root
//!   tensor, rotation calibration, Codazzi residuals, landslide
//!   classification, cross-ratio norms) ([`landslide`]),
//! - the representation formula σ_{Φ,b} reconstructing a convex surface from
//!   an area-preserving map together with its verification suite
//!   ([`representation`]),
//! - the explicit invariant landslide of a half-plane and the constant
//!   curvature surfaces it produces ([`barrier`]).
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here can be driven from any number of threads without
//! synchronization.

pub mod ads;
pub mod barrier;
pub mod grid;
pub mod hyperbolic;
pub mod landslide;
pub mod numerics;
pub mod representation;
pub mod surface;

/// Default tolerance for algebraic identities (membership of quadrics,
/// group-law checks, fixed-point extraction).
pub const TOL_ALG: f64 = 1e-10;

/// Default tolerance for constraints that must hold at construction time.
pub const TOL_CONSTRAINT: f64 = 1e-12;
