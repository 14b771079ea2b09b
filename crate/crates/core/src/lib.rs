//! Featured graphs, exact ACR-GNNs and graded modal logic with counting.

pub mod bisim;
pub mod companion;
pub mod compiler;
pub mod error;
pub mod gadget;
pub mod gml;
pub mod gnn;
pub mod graph;
pub mod homcount;
pub mod order;
pub mod sequences;
pub mod verify;

pub use error::{Error, Result};
