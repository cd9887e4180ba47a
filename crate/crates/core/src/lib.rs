//! Faded cosheaves over finite topological spaces, the tube construction for
//! maps into a space, and the support map back.

pub mod cli;
pub mod cofinite_demo;
pub mod cosheaf;
pub mod filters;
pub mod functors;
pub mod generate;
pub mod space;
pub mod tubewise;
pub mod verify;
