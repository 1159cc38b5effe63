//! ADMM decoding of the LP relaxation.
//!
//! Each check `j` keeps a replica `z_j` of the variables it touches and a
//! dual `lambda_j`, both stored per edge. One iteration is
//!
//! 1. x-update: average the dual-adjusted replicas of each variable, step
//!    along `-gamma / mu`, and clamp to `[0, 1]`;
//! 2. z-update: form the over-relaxed mixture
//!    `w_j = rho P_j x + (1 - rho) z_j`, then project `w_j + lambda_j / mu`
//!    onto the parity polytope;
//! 3. lambda-update: `lambda_j += mu (w_j - z_j)`.
//!
//! With `rho = 1` this is plain ADMM. Read as message passing, `x_i` is the
//! variable-to-check message on every edge of `i`, and the projected replica
//! `z_j` is the check-to-variable message of check `j`.
//!
//! The x-update is independent per variable and the z/lambda updates are
//! independent per check, so each phase is data-parallel; phases alternate
//! in bulk-synchronous fashion.

use crate::channels::LlrVector;
use crate::codes::ParityCheckMatrix;
use crate::decoder::{check_len, DecodeOutput, DecodeStatus, Decoder};
use crate::error::{Error, Result};
use crate::parity_polytope::ProjectionWorkspace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    /// Penalty parameter of the augmented Lagrangian.
    pub mu: f64,
    /// Stopping tolerance on primal and replica-change residuals.
    pub epsilon: f64,
    pub t_max: usize,
    /// Over-relaxation, in `[1, 2)`.
    pub rho: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            mu: 3.0,
            epsilon: 1e-5,
            t_max: 1000,
            rho: 1.9,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Domain(format!("mu = {} must be positive", self.mu)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Domain(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        if !(1.0..2.0).contains(&self.rho) {
            return Err(Error::Domain(format!("rho = {} outside [1, 2)", self.rho)));
        }
        if self.t_max == 0 {
            return Err(Error::Domain("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Iterates of the ADMM decoder. Replica, dual and mixture vectors are flat
/// per-edge arrays laid out by [`ParityCheckMatrix::edge_range`].
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub lambda: Vec<f64>,
    pub z_prev: Vec<f64>,
    /// Over-relaxed mixture from the last z-update.
    pub w: Vec<f64>,
    pub iter: usize,
    ws: ProjectionWorkspace,
    v: Vec<f64>,
}

impl AdmmState {
    /// All-zero replicas and duals.
    pub fn new(code: &ParityCheckMatrix) -> Self {
        let e = code.n_edges();
        Self {
            x: vec![0.0; code.n_vars()],
            z: vec![0.0; e],
            lambda: vec![0.0; e],
            z_prev: vec![0.0; e],
            w: vec![0.0; e],
            iter: 0,
            ws: ProjectionWorkspace::new(),
            v: Vec::new(),
        }
    }

    pub fn x_update(&mut self, code: &ParityCheckMatrix, gamma: &[f64], config: &AdmmConfig) {
        let mu = config.mu;
        for (i, x) in self.x.iter_mut().enumerate() {
            let edges = code.var_edges(i);
            *x = if edges.is_empty() {
                // Unconstrained: minimize gamma_i x_i over [0, 1].
                if gamma[i] < 0.0 { 1.0 } else { 0.0 }
            } else {
                let sum: f64 = edges.iter().map(|&e| self.z[e] - self.lambda[e] / mu).sum();
                ((sum - gamma[i] / mu) / edges.len() as f64).clamp(0.0, 1.0)
            };
        }
    }

    pub fn z_update(&mut self, code: &ParityCheckMatrix, config: &AdmmConfig) -> Result<()> {
        let (mu, rho) = (config.mu, config.rho);
        std::mem::swap(&mut self.z_prev, &mut self.z);
        for j in 0..code.n_checks() {
            let edges = code.edge_range(j);
            self.v.clear();
            for (e, &i) in edges.clone().zip(code.check(j)) {
                let w = rho * self.x[i] + (1.0 - rho) * self.z_prev[e];
                self.w[e] = w;
                self.v.push(w + self.lambda[e] / mu);
            }
            self.ws.project_into(&self.v, &mut self.z[edges])?;
        }
        Ok(())
    }

    pub fn lambda_update(&mut self, config: &AdmmConfig) {
        let mu = config.mu;
        for ((l, w), z) in self.lambda.iter_mut().zip(&self.w).zip(&self.z) {
            *l += mu * (w - z);
        }
    }

    /// One full x/z/lambda iteration.
    pub fn step(&mut self, code: &ParityCheckMatrix, gamma: &[f64], config: &AdmmConfig) -> Result<()> {
        self.x_update(code, gamma, config);
        self.z_update(code, config)?;
        self.lambda_update(config);
        self.iter += 1;
        Ok(())
    }

    /// `(sum_j |P_j x - z_j|^2, sum_j |z_j - z_j_prev|^2)`.
    pub fn residuals(&self, code: &ParityCheckMatrix) -> (f64, f64) {
        let mut primal = 0.0;
        for j in 0..code.n_checks() {
            for (e, &i) in code.edge_range(j).zip(code.check(j)) {
                let d = self.x[i] - self.z[e];
                primal += d * d;
            }
        }
        let change = self
            .z
            .iter()
            .zip(&self.z_prev)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (primal, change)
    }
}

/// Runs ADMM from all-zero replicas and duals until both residuals drop
/// below `epsilon^2 * (number of edges)` or `t_max` iterations elapse.
pub fn decode(gamma: &LlrVector, code: &ParityCheckMatrix, config: &AdmmConfig) -> Result<DecodeOutput> {
    check_len(gamma, code)?;
    config.validate()?;
    let mut state = AdmmState::new(code);
    let threshold = config.epsilon * config.epsilon * code.n_edges() as f64;
    let mut status = DecodeStatus::MaxIters;
    while state.iter < config.t_max {
        state.step(code, gamma, config)?;
        let (primal, change) = state.residuals(code);
        if primal < threshold && change < threshold {
            status = DecodeStatus::Converged;
            break;
        }
    }
    Ok(DecodeOutput::from_estimate(state.x, status, state.iter, code))
}

impl Decoder for AdmmConfig {
    fn id(&self) -> String {
        "admm".into()
    }

    fn decode(&self, gamma: &LlrVector, code: &ParityCheckMatrix) -> Result<DecodeOutput> {
        decode(gamma, code, self)
    }
}
