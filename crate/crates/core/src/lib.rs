//! Quasi-order deciders, ultimately periodic sequences, and proper
//! 3-colorings of shift graphs over bad sequences.

pub mod audit;
pub mod colorer;
pub mod derive;
pub mod embed;
pub mod error;
pub mod qo;
pub mod shiftgraph;
pub mod upseq;

pub use error::{Error, Result};
pub use qo::{Element, FiniteOrder, QoSpec, Tree};
pub use shiftgraph::Color;
pub use upseq::UpSeq;
