//! Output type and trait shared by all decoders.

use crate::channels::LlrVector;
use crate::codes::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Entries within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Converged,
    MaxIters,
}

impl DecodeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodeStatus::Converged => "converged",
            DecodeStatus::MaxIters => "max_iters",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    /// Final (possibly fractional) estimate in `[0,1]^N`.
    pub x: Vec<f64>,
    pub status: DecodeStatus,
    /// Every entry of `x` is within [`INTEGRALITY_TOL`] of 0 or 1.
    pub integral: bool,
    pub iterations: usize,
    /// `x` rounded at 0.5, ties to 0.
    pub hard_decision: Vec<u8>,
    /// Integral output that satisfies every check. For an LP decoder this
    /// certifies the maximum-likelihood codeword.
    pub ml_certificate: bool,
}

impl DecodeOutput {
    pub fn from_estimate(
        x: Vec<f64>,
        status: DecodeStatus,
        iterations: usize,
        code: &ParityCheckMatrix,
    ) -> Self {
        let integral = x
            .iter()
            .all(|&v| v.abs() <= INTEGRALITY_TOL || (v - 1.0).abs() <= INTEGRALITY_TOL);
        let hard_decision: Vec<u8> = x.iter().map(|&v| u8::from(v > 0.5)).collect();
        let ml_certificate = integral && code.is_codeword(&hard_decision).unwrap_or(false);
        Self {
            x,
            status,
            integral,
            iterations,
            hard_decision,
            ml_certificate,
        }
    }
}

/// A decoder that can be run by the simulator.
pub trait Decoder: Sync {
    /// Short identifier used in CSV output.
    fn id(&self) -> String;

    fn decode(&self, gamma: &LlrVector, code: &ParityCheckMatrix) -> Result<DecodeOutput>;
}

pub(crate) fn check_len(gamma: &LlrVector, code: &ParityCheckMatrix) -> Result<()> {
    if gamma.len() != code.n_vars() {
        return Err(Error::Dimension(format!(
            "gamma has length {} but code has n = {}",
            gamma.len(),
            code.n_vars()
        )));
    }
    Ok(())
}
