//! Cellular automata on tessellations of the hyperbolic plane.
//!
//! The crate builds finite balls of the pentagrid `{5,4}`, the ternary
//! heptagrid `{7,3}`, and other hyperbolic `{p,q}` tessellations, addresses
//! their tiles with Fibonacci-tree coordinates, and runs table-driven
//! cellular automata on them.  On top of the engine sit rotation-invariance
//! machinery, an ultrametric-style distance on configurations, commutation
//! checks against tiling automorphisms, and extraction of a local rule from
//! a black-box global map.

pub mod ca_engine;
pub mod fib_coords;
pub mod hedlund;
pub mod metric;
pub mod render;
pub mod tiling;

pub use ca_engine::{
    step, Alphabet, CaError, Configuration, DefaultPolicy, Rule, RuleTable, StateId, StepError,
};
pub use fib_coords::{ExtendedStatus, FibTree, GridKind, NodeStatus};
pub use tiling::{
    build_ball, build_ball_with_cap, Automorphism, CellAddress, Flag, TileId, TilingBall,
};
