//! Four-colouring of planar maps and graphs: a three-step spiral heuristic
//! for cubic maps, Kempe-chain machinery on triangulations, and brute-force
//! oracles that check both.

pub mod color_steps;
pub mod corpus_io;
pub mod embedding;
pub mod kempe_vertex;
pub mod oracle;
pub mod planar_map;
pub mod spiral;
pub mod triangulation;

pub use color_steps::{four_color, FourColorOptions, MapColor, PartialMapColoring, RunReport};
pub use embedding::{Dart, EdgeId, FaceId, RotationSystem, VertexId};
pub use planar_map::{validate_normal_map, NormalMap};
pub use spiral::{spiral_order, Direction, SpiralOrder};
