//! Binary symmetric and binary-input AWGN channels.
//!
//! Costs are negative log-likelihood ratios in nats,
//! `gamma_i = ln W(y_i | 0) / W(y_i | 1)`, so a positive entry favors bit 0
//! and penalizes `x_i = 1` in the LP objective.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::codes::Codeword;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// BPSK (0 -> +1, 1 -> -1) over additive white Gaussian noise.
    Awgn { snr_db: f64, rate: f64 },
}

impl ChannelModel {
    pub fn bsc(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(Error::Domain(format!("BSC crossover {p} outside (0, 0.5]")));
        }
        Ok(ChannelModel::Bsc { p })
    }

    /// `snr_db` is Eb/N0 in dB; `rate` is the code rate used to convert it
    /// to a per-symbol noise variance.
    pub fn awgn(snr_db: f64, rate: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::Domain(format!("Eb/N0 {snr_db} dB is not finite")));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Domain(format!("code rate {rate} outside (0, 1]")));
        }
        Ok(ChannelModel::Awgn { snr_db, rate })
    }

    /// Noise variance `1 / (2 R 10^(snr/10))` of the AWGN channel.
    pub fn noise_variance(&self) -> Option<f64> {
        match *self {
            ChannelModel::Bsc { .. } => None,
            ChannelModel::Awgn { snr_db, rate } => {
                Some(1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0)))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChannelModel::Bsc { .. } => "bsc",
            ChannelModel::Awgn { .. } => "awgn",
        }
    }

    /// Crossover probability or Eb/N0 in dB.
    pub fn param(&self) -> f64 {
        match *self {
            ChannelModel::Bsc { p } => p,
            ChannelModel::Awgn { snr_db, .. } => snr_db,
        }
    }
}

/// Channel output.
#[derive(Debug, Clone, PartialEq)]
pub enum Received {
    Bits(Vec<u8>),
    Real(Vec<f64>),
}

impl Received {
    pub fn len(&self) -> usize {
        match self {
            Received::Bits(b) => b.len(),
            Received::Real(y) => y.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-symbol cost vector of the decoding LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if let Some(k) = gamma.iter().position(|g| !g.is_finite()) {
            return Err(Error::Domain(format!("gamma[{k}] = {} is not finite", gamma[k])));
        }
        Ok(Self(gamma))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `gamma^T x`.
    pub fn cost<T: Copy + Into<f64>>(&self, x: &[T]) -> f64 {
        self.0.iter().zip(x).map(|(g, &v)| g * v.into()).sum()
    }
}

impl std::ops::Deref for LlrVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Sends `x` through the channel using randomness from `rng`.
pub fn transmit<R: Rng + ?Sized>(x: &Codeword, ch: &ChannelModel, rng: &mut R) -> Received {
    match *ch {
        ChannelModel::Bsc { p } => Received::Bits(
            x.bits()
                .iter()
                .map(|&b| b ^ u8::from(rng.gen_bool(p)))
                .collect(),
        ),
        ChannelModel::Awgn { .. } => {
            let sigma = ch.noise_variance().unwrap().sqrt();
            let noise = Normal::new(0.0, sigma).expect("positive finite sigma");
            Received::Real(
                x.bits()
                    .iter()
                    .map(|&b| if b == 0 { 1.0 } else { -1.0 } + noise.sample(rng))
                    .collect(),
            )
        }
    }
}

/// Computes the cost vector for a channel observation.
pub fn llr(received: &Received, ch: &ChannelModel) -> Result<LlrVector> {
    match (received, *ch) {
        (Received::Bits(bits), ChannelModel::Bsc { p }) => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("BSC crossover {p} outside (0, 1)")));
            }
            let flip = (p / (1.0 - p)).ln();
            bits.iter()
                .map(|&b| match b {
                    0 => Ok(-flip),
                    1 => Ok(flip),
                    other => Err(Error::Domain(format!("BSC output symbol {other} not binary"))),
                })
                .collect::<Result<Vec<_>>>()
                .and_then(LlrVector::new)
        }
        (Received::Real(y), ChannelModel::Awgn { .. }) => {
            let var = ch.noise_variance().unwrap();
            LlrVector::new(y.iter().map(|&v| 2.0 * v / var).collect())
        }
        _ => Err(Error::Domain(format!(
            "received alphabet does not match {} channel",
            ch.kind()
        ))),
    }
}
