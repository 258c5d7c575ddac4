//! Similarity and distance measures, clustering into guide trees, and tree comparison.

mod cluster;
mod distance;
mod tree;

pub use cluster::{cluster_by_similarity, neighbor_joining, upgma};
pub use distance::{
    fractional_identity, kimura_distance, kmer_counts, kmer_similarity, similarity_to_distance, DistanceMatrix,
};
pub use tree::{compare_trees, GuideTree, Node};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeMethod {
    #[default]
    Upgma,
    Nj,
}

/// Builds a tree with the chosen method.
pub fn build_tree(d: &DistanceMatrix, method: TreeMethod) -> crate::Result<GuideTree> {
    match method {
        TreeMethod::Upgma => upgma(d),
        TreeMethod::Nj => neighbor_joining(d),
    }
}
