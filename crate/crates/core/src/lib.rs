//! Mean curvature on analytic surfaces and triangle meshes.
//!
//! [`contour`] checks that the patch integral of `N H` equals the contour
//! integral of the exterior conormal on the surfaces in [`surfaces`].
//! [`discrete`] defines the vector mean curvature of a mesh vertex from its
//! one-ring, and [`flow`] moves a closed mesh along it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod contour;
pub mod discrete;
pub mod flow;
pub mod numcore;
pub mod surfaces;
pub mod trimesh;
