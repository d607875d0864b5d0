//! Circle patterns on the sphere with prescribed obtuse overlap angles, and
//! the compact hyperbolic polyhedra they induce.

#![allow(clippy::needless_range_loop)]

pub mod angles;
pub mod catalog;
pub mod cli;
pub mod complex;
pub mod formats;
pub mod packing;
pub mod polyhedron;
pub mod solver;
pub mod sphere_geom;
pub mod verify;
