//! Dual subgradient ascent on the plain Lagrangian of the decoding LP.
//!
//! Both primal blocks are linear programs with closed-form solutions: the
//! x-block is a Heaviside step on the reduced cost, and the z-block is a
//! linear maximization over each check's parity polytope. Both read only the
//! current duals, so they can run concurrently.

use crate::channels::LlrVector;
use crate::codes::ParityCheckMatrix;
use crate::decoder::{check_len, DecodeOutput, DecodeStatus, Decoder};
use crate::error::{Error, Result};
use crate::parity_polytope::maximize_linear;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualAscentConfig {
    /// Constant subgradient step size.
    pub step: f64,
    pub t_max: usize,
    pub epsilon: f64,
}

impl Default for DualAscentConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            t_max: 1000,
            epsilon: 1e-5,
        }
    }
}

impl DualAscentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Domain(format!("step = {} must be positive", self.step)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        if self.t_max == 0 {
            return Err(Error::Domain("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

fn heaviside(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn decode_dual_ascent(
    gamma: &LlrVector,
    code: &ParityCheckMatrix,
    config: &DualAscentConfig,
) -> Result<DecodeOutput> {
    check_len(gamma, code)?;
    config.validate()?;
    let mut lambda = vec![0.0; code.n_edges()];
    let mut z = vec![0.0; code.n_edges()];
    let mut x = vec![0.0; code.n_vars()];
    let threshold = config.epsilon * config.epsilon * code.n_edges() as f64;

    for iter in 1..=config.t_max {
        for (i, xi) in x.iter_mut().enumerate() {
            let reduced: f64 = gamma[i] + code.var_edges(i).iter().map(|&e| lambda[e]).sum::<f64>();
            *xi = heaviside(-reduced);
        }
        for j in 0..code.n_checks() {
            let r = code.edge_range(j);
            let vertex = maximize_linear(&lambda[r.clone()]);
            for (zk, b) in z[r].iter_mut().zip(vertex) {
                *zk = f64::from(b);
            }
        }
        let mut residual = 0.0;
        for j in 0..code.n_checks() {
            for (e, &i) in code.edge_range(j).zip(code.check(j)) {
                let diff = x[i] - z[e];
                residual += diff * diff;
                lambda[e] += config.step * diff;
            }
        }
        if residual < threshold {
            return Ok(DecodeOutput::from_estimate(x, DecodeStatus::Converged, iter, code));
        }
    }
    Ok(DecodeOutput::from_estimate(
        x,
        DecodeStatus::MaxIters,
        config.t_max,
        code,
    ))
}

impl Decoder for DualAscentConfig {
    fn id(&self) -> String {
        "dual-ascent".into()
    }

    fn decode(&self, gamma: &LlrVector, code: &ParityCheckMatrix) -> Result<DecodeOutput> {
        decode_dual_ascent(gamma, code, self)
    }
}
