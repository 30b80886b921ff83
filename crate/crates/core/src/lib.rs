//! Exact gluing of spherical polytopes, local convexity conditions and
//! certification of convexity by developing the universal cover.

pub mod complex;
pub mod cone;
pub mod developer;
pub mod linalg;
pub mod fixtures;
pub mod io;
pub mod lp;
pub mod polytope;
pub mod scalar;
pub mod transform;

pub use complex::{FacetId, GluingSpec, RidgeId, Violation};
pub use cone::{Cone, RationalCone};
pub use developer::{develop, DevelopOptions, Developed, NeedsDeeper};
pub use linalg::Subspace;
pub use polytope::{Pavilion, Polytope, PolytopeError};
pub use scalar::{Approx, Scalar, Q};
pub use transform::Transform;
