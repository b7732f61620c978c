//! Community search over directed graphs with a D-Forest index.
//!
//! The index stores, for every in-degree threshold `k`, a tree whose subtrees
//! are exactly the weakly connected components of the (k,l)-cores. A
//! minimum-degree community query then reduces to a map lookup, a short climb
//! and a subtree walk.

pub mod bottomup;
pub mod cuf;
pub mod decomp;
pub mod error;
pub mod format;
pub mod graph;
pub mod index;
pub mod maintenance;
pub mod scsd;
pub mod testkit;
pub mod topdown;

pub use bottomup::build_bottomup;
pub use decomp::{decompose_for_k, kl_core, max_k, online_csd, CoreLevels};
pub use error::{FormatError, GraphError, ParseError};
pub use format::{deserialize, read_index_file, serialize, write_index_file};
pub use graph::{load_edge_list, load_edge_list_path, DirectedGraph, Direction, VertexId};
pub use index::{CommunityResult, DForest, KTree, NodeId, TreeNode};
pub use maintenance::{MaintainableIndex, UpdateOp, UpdateReport};
pub use scsd::{query_scsd, scc_of};
pub use topdown::{build_topdown, BuildStats};
