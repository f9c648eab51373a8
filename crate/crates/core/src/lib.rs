//! Densest-subgraph discovery under generalized power-mean degree
//! objectives.
//!
//! For a vertex set `S` with induced degrees `d_S(v)`, the objective is the
//! power mean `M_p(S) = (Σ d_S(v)^p / |S|)^{1/p}`, which interpolates
//! between maxcore (`p → -∞`), average degree (`p = 1`) and maximum degree
//! (`p → ∞`). The crate provides peeling algorithms, iterative refinements,
//! a Frank-Wolfe convex solver, exact brute-force oracles and hardness
//! gadget constructions.

pub mod bench;
pub mod constructions;
pub mod density;
pub mod frank_wolfe;
pub mod generators;
pub mod graph;
pub mod heap;
pub mod iterative;
pub mod oracle;
pub mod par;
pub mod peeling;

pub use density::{m_p, Density, DensityError, PExponent};
pub use graph::{load_edge_list, parse_edge_list, Graph, GraphBuilder, GraphError, Vertex, VertexSet};
pub use par::Exec;
pub use peeling::{greedy_p, lazy_greedy_p, simple_greedy_p, Guarantee, PeelError, PeelResult};
