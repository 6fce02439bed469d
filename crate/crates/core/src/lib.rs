//! Numerical realization of actions of finite group duals on finite-dimensional factors.

pub mod group;
pub mod linalg;
pub mod rep;
pub mod action;
pub mod model;
pub mod crossed;
pub mod numerics;
pub mod cocycle;
pub mod twisted;
pub mod double;
pub mod io;
pub mod instances;
pub mod verify;
