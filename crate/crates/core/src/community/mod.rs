//! Hashtag co-usage graph, Louvain communities, force-directed layout and
//! per-community belief profiles.

mod graph;
mod layout;
mod louvain;
mod profile;

use thiserror::Error;

pub use graph::{build_graph, hashtag_usage, EdgeWeighting, GraphOptions, HashtagGraph};
pub use layout::{layout, layout_csv, LayoutConfig, DEFAULT_ITERATIONS};
pub use louvain::{louvain, louvain_best_of, louvain_with, modularity, Level, LouvainConfig, Partition};
pub use profile::{partition_map, profile, CommunityProfile, DEFAULT_TOP_HASHTAGS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommunityError {
    #[error("graph has no edges")]
    EmptyGraph,
}
