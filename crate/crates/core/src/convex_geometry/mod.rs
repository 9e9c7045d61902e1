//! Convex bodies through their support functions, and the geometric
//! functionals built on them.

mod body;
mod boundary;
mod constants;
mod quadrature;
mod vector;

pub use body::{boundary_point, gauge, support_function, BodyKind, BodySpec, ConvexBody, Exponent, SupportOracle, FD_STEP};
pub use boundary::{
    mean_width, perimeter_2d, sample_boundary, BoundarySample, BoundaryTable, PerimeterReport,
    PERIMETER_TABLE_SIZE, SAMPLING_TABLE_SIZE,
};
pub use constants::{sharp_constant, unit_ball_volume};
#[allow(unused_imports)]
pub(crate) use constants::{omega, sphere_area};
pub use quadrature::{
    default_sup_resolution, gauss_legendre, maximize_on_sphere, sphere_grid, QuadratureScheme, SphereMax,
    SphereQuadrature, DEFAULT_GL_AZIMUTH, DEFAULT_GL_POLAR_PER_HEMISPHERE, DEFAULT_MC_NODES, DEFAULT_TRAPEZOID_NODES,
};
pub use vector::{apply, axpy, dot, norm, orthonormal_complement, random_rotation, Point, UnitVector};
