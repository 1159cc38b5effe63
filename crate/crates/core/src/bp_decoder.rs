//! Saturating sum-product belief propagation, flooding schedule.
//!
//! Messages are log-likelihood ratios `ln P(0)/P(1)` in nats, the same sign
//! convention as the LP cost vector: the channel message of bit `i` is
//! `gamma_i` and a negative belief decides 1.

use crate::channels::LlrVector;
use crate::codes::ParityCheckMatrix;
use crate::decoder::{check_len, DecodeOutput, DecodeStatus, Decoder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub t_max: usize,
    /// Saturation magnitude for every message.
    pub llr_clip: f64,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_exit: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            t_max: 1000,
            llr_clip: 30.0,
            early_exit: true,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.llr_clip.is_finite() && self.llr_clip > 0.0) {
            return Err(Error::Domain(format!(
                "llr_clip = {} must be positive",
                self.llr_clip
            )));
        }
        if self.t_max == 0 {
            return Err(Error::Domain("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Decodes and also returns the final posterior beliefs.
pub fn decode_bp_with_beliefs(
    gamma: &LlrVector,
    code: &ParityCheckMatrix,
    config: &BpConfig,
) -> Result<(DecodeOutput, Vec<f64>)> {
    check_len(gamma, code)?;
    config.validate()?;
    let clip = config.llr_clip;
    let sat = |v: f64| v.clamp(-clip, clip);

    let mut to_check = vec![0.0; code.n_edges()];
    let mut to_var = vec![0.0; code.n_edges()];
    let mut beliefs = gamma.to_vec();
    let mut hard = vec![0u8; code.n_vars()];
    let mut tanh_buf = Vec::new();
    let mut suffix = Vec::new();

    let mut status = DecodeStatus::MaxIters;
    let mut iterations = config.t_max;
    for iter in 1..=config.t_max {
        for i in 0..code.n_vars() {
            let edges = code.var_edges(i);
            let total: f64 = gamma[i] + edges.iter().map(|&e| to_var[e]).sum::<f64>();
            for &e in edges {
                to_check[e] = sat(total - to_var[e]);
            }
        }

        for j in 0..code.n_checks() {
            let r = code.edge_range(j);
            tanh_buf.clear();
            tanh_buf.extend(r.clone().map(|e| (0.5 * sat(to_check[e])).tanh()));
            // Leave-one-out products without division.
            suffix.clear();
            suffix.resize(tanh_buf.len() + 1, 1.0);
            for k in (0..tanh_buf.len()).rev() {
                suffix[k] = suffix[k + 1] * tanh_buf[k];
            }
            let mut prefix = 1.0;
            for (k, e) in r.enumerate() {
                let p = (prefix * suffix[k + 1]).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                to_var[e] = sat(2.0 * p.atanh());
                prefix *= tanh_buf[k];
            }
        }

        let mut undecided = false;
        for i in 0..code.n_vars() {
            let b = gamma[i] + code.var_edges(i).iter().map(|&e| to_var[e]).sum::<f64>();
            beliefs[i] = b;
            hard[i] = u8::from(b < 0.0);
            undecided |= b == 0.0;
        }

        if config.early_exit && !undecided && code.is_codeword(&hard)? {
            status = DecodeStatus::Converged;
            iterations = iter;
            break;
        }
    }

    let x = hard.iter().map(|&b| f64::from(b)).collect();
    Ok((DecodeOutput::from_estimate(x, status, iterations, code), beliefs))
}

pub fn decode_bp(gamma: &LlrVector, code: &ParityCheckMatrix, config: &BpConfig) -> Result<DecodeOutput> {
    decode_bp_with_beliefs(gamma, code, config).map(|(out, _)| out)
}

impl Decoder for BpConfig {
    fn id(&self) -> String {
        "bp".into()
    }

    fn decode(&self, gamma: &LlrVector, code: &ParityCheckMatrix) -> Result<DecodeOutput> {
        decode_bp(gamma, code, self)
    }
}
