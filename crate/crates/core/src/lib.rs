pub mod algebra;
pub mod canonical;
pub mod canonize;
pub mod cusp;
pub mod fixtures;
pub mod geometry;
pub mod interval;
pub mod triangulation;
