//! LP decoding of binary LDPC codes by ADMM.
//!
//! The decoding LP minimizes `gamma . x` over the fundamental polytope, the
//! set of `x in [0,1]^N` whose restriction to every check lies in the parity
//! polytope. [`admm_decoder`] splits that LP into per-check replicas whose
//! update is a Euclidean projection onto the parity polytope, computed
//! exactly in [`parity_polytope`]. Sum-product BP ([`bp_decoder`]) and dual
//! subgradient ascent ([`dual_ascent`]) are provided as baselines, and
//! [`simulator`] runs seeded Monte-Carlo sweeps over BSC and AWGN channels.

pub mod admm_decoder;
pub mod bp_decoder;
pub mod channels;
pub mod codes;
pub mod decoder;
pub mod dual_ascent;
mod error;
pub mod format;
pub mod parity_polytope;
pub mod simulator;

pub use admm_decoder::{decode, AdmmConfig, AdmmState};
pub use bp_decoder::{decode_bp, BpConfig};
pub use channels::{llr, transmit, ChannelModel, LlrVector, Received};
pub use codes::{gen_regular_ldpc, parse_alist, read_alist, Codeword, ParityCheckMatrix};
pub use decoder::{DecodeOutput, DecodeStatus, Decoder};
pub use dual_ascent::{decode_dual_ascent, DualAscentConfig};
pub use error::{Error, Result};
pub use parity_polytope::{
    maximize_linear, membership, project_parity_polytope, Projection, ProjectionWorkspace,
};
