//! Minimum spanning tree of segments: pick one endpoint of every segment so
//! that the Euclidean MST over the picked points is as light as possible.

pub mod error;
pub mod exact;
pub mod geometry;
pub mod graph;
pub mod instance;
pub mod reduction;
pub mod separability;
pub mod steiner_approx;

pub use error::{Error, Result};
pub use geometry::{
    euclidean_mst, point_distance, segment_distance, segments_disjoint, Point, PointTree, Segment,
};
pub use instance::{ChoiceSolution, Instance};
