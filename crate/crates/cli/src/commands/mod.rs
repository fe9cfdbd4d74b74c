pub mod conjecture;
pub mod curvature;
pub mod grid;
pub mod scalar;
