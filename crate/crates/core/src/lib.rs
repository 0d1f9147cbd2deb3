pub mod alpha;
pub mod cm;
pub mod document;
pub mod exec;
pub mod finite_level;
pub mod group;
pub mod json;
pub mod linalg;
pub mod sweep;
pub mod torus;
