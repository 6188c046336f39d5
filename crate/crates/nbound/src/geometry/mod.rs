//! Classic bounding baselines: axis-aligned and oriented boxes, spheres,
//! ellipsoids, k-DOPs and a BVH, fit in closed form from grid indicators and
//! answering all four query types conservatively.
//!
//! Every test here errs on the side of reporting an intersection: a primitive
//! may claim hits it does not have (false positives), but whenever a region
//! geometrically touches the primitive the test returns 1. Oriented
//! primitives answer box queries through the query box's axis-aligned hull in
//! the local frame, which over-approximates but never under-approximates.

mod bvh;
mod fit;
mod primitives;

pub use bvh::{build_bvh, Bvh};
pub use fit::{
    default_directions, fit_aabb, fit_aaelli, fit_kdop, fit_kdop_with_directions, fit_obox,
    fit_oelli, fit_sphere,
};
pub use primitives::{Aabb, Ellipsoid, KDop, Oriented, Primitive, Rotation, Sphere};

/// Oriented bounding box.
pub type Obb<R> = Oriented<R, Aabb<R>>;
/// Oriented ellipsoid.
pub type OrientedEllipsoid<R> = Oriented<R, Ellipsoid<R>>;
