//! Approximate directed sparsest cut and directed hyperedge expansion.
//!
//! The solver runs a matrix multiplicative weights loop over an SDP
//! relaxation. At every step an oracle either returns a sparse cut or a dual
//! certificate, and the certificates accumulate into a checkable lower bound.
//!
//! ```
//! use hyperspars::hypergraph::{parse_dhg, VertexSet};
//!
//! let h = parse_dhg("dhg 2 1\nv a 1\nv b 1\ne 3 T a H b\n").unwrap();
//! let s = VertexSet::from_indices(2, [0]);
//! assert_eq!(h.sparsity(&s).unwrap().to_string(), "3");
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod error;
pub mod flownet;
pub mod hypergraph;
pub mod instance;
pub mod oracle;
pub mod reference;
pub mod sdpcore;

pub use error::{FlowError, HypergraphError, OracleError, ReferenceError, SdpError};
pub use instance::{FoundCut, SolverInstance, WeightMode};
