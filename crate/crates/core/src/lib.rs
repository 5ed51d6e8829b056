//! High-order hybridisable discontinuous Galerkin discretisation of the 2D
//! steady compressible Euler and Navier-Stokes equations.

pub mod ad;
pub mod cases;
pub mod mesh;
pub mod physics;
pub mod riemann;
pub mod shock;
pub mod solver;
pub mod verification;
