//! Seeded Monte-Carlo estimation of word and bit error rates.
//!
//! Every trial sends the all-zero codeword, which is representative for the
//! LP and BP decoders over output-symmetric channels (BSC, BPSK/AWGN). An
//! asymmetric channel would need an encoder and random codewords.
//!
//! Each trial draws its noise from an RNG seeded by `(seed, point, trial)`,
//! so statistics do not depend on how trials are spread over workers.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{llr, transmit, ChannelModel, LlrVector};
use crate::codes::{Codeword, ParityCheckMatrix};
use crate::decoder::{DecodeOutput, Decoder};
use crate::error::{Error, Result};
use crate::format::format_g;

/// Trials evaluated between checks of the error target.
const BATCH: usize = 512;

pub const CSV_HEADER: &str = "decoder,channel_kind,channel_param,rate,n,trials,word_errors,bit_errors,wer,ber,avg_iters_all,avg_iters_correct,avg_iters_err,avg_time_all_s,avg_time_correct_s,avg_time_err_s,ml_errors,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stopping {
    /// Run exactly this many trials.
    Trials(usize),
    /// Stop once `target` word errors are seen, or after `max_trials`.
    TargetErrors { target: usize, max_trials: usize },
}

/// How a word error compares with maximum-likelihood decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlOutcome {
    /// Output is a codeword no cheaper than the transmitted one.
    Success,
    /// Output is a codeword strictly cheaper than the transmitted one, so an
    /// ML decoder would have failed too.
    CertifiedError,
    /// Output is not a codeword; counted as an ML success.
    NotCodeword,
}

/// Classifies a decoding failure for the ML lower bound.
pub fn ml_account(
    output: &DecodeOutput,
    gamma: &LlrVector,
    code: &ParityCheckMatrix,
    transmitted: &Codeword,
) -> MlOutcome {
    if !code.is_codeword(&output.hard_decision).unwrap_or(false) {
        return MlOutcome::NotCodeword;
    }
    if gamma.cost(&output.hard_decision) < gamma.cost(transmitted.bits()) {
        MlOutcome::CertifiedError
    } else {
        MlOutcome::Success
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub word_error: bool,
    pub bit_errors: usize,
    pub iterations: usize,
    pub integral: bool,
    pub ml: Option<MlOutcome>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub decoder_id: String,
    pub channel: ChannelModel,
    pub n: usize,
    pub rate: f64,
    pub trials: usize,
    pub word_errors: usize,
    pub bit_errors: usize,
    pub iter_sum_correct: usize,
    pub iter_sum_erroneous: usize,
    pub time_sum_correct: Duration,
    pub time_sum_erroneous: Duration,
    pub ml_errors: usize,
    pub seed: u64,
}

impl TrialStats {
    pub fn empty(decoder_id: String, channel: ChannelModel, code: &ParityCheckMatrix, seed: u64) -> Self {
        Self {
            decoder_id,
            channel,
            n: code.n_vars(),
            rate: code.rate(),
            trials: 0,
            word_errors: 0,
            bit_errors: 0,
            iter_sum_correct: 0,
            iter_sum_erroneous: 0,
            time_sum_correct: Duration::ZERO,
            time_sum_erroneous: Duration::ZERO,
            ml_errors: 0,
            seed,
        }
    }

    pub fn record(&mut self, t: &TrialOutcome) {
        self.trials += 1;
        self.bit_errors += t.bit_errors;
        if t.word_error {
            self.word_errors += 1;
            self.iter_sum_erroneous += t.iterations;
            self.time_sum_erroneous += t.elapsed;
            if t.ml == Some(MlOutcome::CertifiedError) {
                self.ml_errors += 1;
            }
        } else {
            self.iter_sum_correct += t.iterations;
            self.time_sum_correct += t.elapsed;
        }
    }

    /// Adds the counters of `other`, which must describe the same point.
    pub fn merge(&mut self, other: &TrialStats) {
        self.trials += other.trials;
        self.word_errors += other.word_errors;
        self.bit_errors += other.bit_errors;
        self.iter_sum_correct += other.iter_sum_correct;
        self.iter_sum_erroneous += other.iter_sum_erroneous;
        self.time_sum_correct += other.time_sum_correct;
        self.time_sum_erroneous += other.time_sum_erroneous;
        self.ml_errors += other.ml_errors;
    }

    pub fn correct(&self) -> usize {
        self.trials - self.word_errors
    }

    pub fn wer(&self) -> f64 {
        ratio(self.word_errors as f64, self.trials)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors as f64, self.trials * self.n)
    }

    pub fn avg_iters_all(&self) -> f64 {
        ratio((self.iter_sum_correct + self.iter_sum_erroneous) as f64, self.trials)
    }

    pub fn avg_iters_correct(&self) -> f64 {
        ratio(self.iter_sum_correct as f64, self.correct())
    }

    pub fn avg_iters_err(&self) -> f64 {
        ratio(self.iter_sum_erroneous as f64, self.word_errors)
    }

    fn csv_row(&self, timing: bool) -> String {
        let g = |x: f64| format_g(x, 6);
        let t = |d: Duration, k: usize| {
            if timing {
                g(ratio(d.as_secs_f64(), k))
            } else {
                String::new()
            }
        };
        [
            self.decoder_id.clone(),
            self.channel.kind().to_string(),
            g(self.channel.param()),
            g(self.rate),
            self.n.to_string(),
            self.trials.to_string(),
            self.word_errors.to_string(),
            self.bit_errors.to_string(),
            g(self.wer()),
            g(self.ber()),
            g(self.avg_iters_all()),
            g(self.avg_iters_correct()),
            g(self.avg_iters_err()),
            t(self.time_sum_correct + self.time_sum_erroneous, self.trials),
            t(self.time_sum_correct, self.correct()),
            t(self.time_sum_erroneous, self.word_errors),
            self.ml_errors.to_string(),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num / den as f64
    }
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(seed: u64, point: u64, trial: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ point);
    splitmix64(h ^ trial)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Transmits the all-zero word once and decodes it.
pub fn run_trial<D: Decoder + ?Sized>(
    code: &ParityCheckMatrix,
    channel: &ChannelModel,
    decoder: &D,
    seed: u64,
) -> Result<TrialOutcome> {
    let sent = Codeword::zeros(code.n_vars());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let received = transmit(&sent, channel, &mut rng);
    let gamma = llr(&received, channel)?;
    let start = Instant::now();
    let out = decoder.decode(&gamma, code)?;
    let elapsed = start.elapsed();
    let bit_errors = out.hard_decision.iter().filter(|&&b| b != 0).count();
    let word_error = bit_errors > 0;
    let ml = word_error.then(|| ml_account(&out, &gamma, code, &sent));
    Ok(TrialOutcome {
        word_error,
        bit_errors,
        iterations: out.iterations,
        integral: out.integral,
        ml,
        elapsed,
    })
}

/// Runs trials `trials` of sweep point `point` in parallel, in order.
pub fn run_trials<D: Decoder + ?Sized>(
    code: &ParityCheckMatrix,
    channel: &ChannelModel,
    decoder: &D,
    seed: u64,
    point: u64,
    trials: std::ops::Range<usize>,
) -> Result<Vec<TrialOutcome>> {
    trials
        .into_par_iter()
        .map(|t| run_trial(code, channel, decoder, trial_seed(seed, point, t as u64)))
        .collect()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start {workers} workers: {e}")))
}

fn run_point_in_pool<D: Decoder + ?Sized>(
    code: &ParityCheckMatrix,
    channel: &ChannelModel,
    decoder: &D,
    stopping: Stopping,
    seed: u64,
    point: u64,
) -> Result<TrialStats> {
    let mut stats = TrialStats::empty(decoder.id(), *channel, code, seed);
    match stopping {
        Stopping::Trials(n) => {
            for t in run_trials(code, channel, decoder, seed, point, 0..n)? {
                stats.record(&t);
            }
        }
        Stopping::TargetErrors { target, max_trials } => {
            let mut start = 0;
            'outer: while start < max_trials && stats.word_errors < target {
                let end = (start + BATCH).min(max_trials);
                for t in run_trials(code, channel, decoder, seed, point, start..end)? {
                    stats.record(&t);
                    if stats.word_errors >= target {
                        break 'outer;
                    }
                }
                start = end;
            }
        }
    }
    Ok(stats)
}

/// Estimates error statistics at one channel point.
pub fn run_point<D: Decoder + ?Sized>(
    code: &ParityCheckMatrix,
    channel: &ChannelModel,
    decoder: &D,
    stopping: Stopping,
    seed: u64,
    workers: usize,
) -> Result<TrialStats> {
    validate_stopping(stopping)?;
    pool(workers)?.install(|| run_point_in_pool(code, channel, decoder, stopping, seed, 0))
}

/// Runs [`run_point`] at every channel point; point `k` uses stream `k`.
pub fn sweep<D: Decoder + ?Sized>(
    code: &ParityCheckMatrix,
    points: &[ChannelModel],
    decoder: &D,
    stopping: Stopping,
    seed: u64,
    workers: usize,
) -> Result<Vec<TrialStats>> {
    validate_stopping(stopping)?;
    let pool = pool(workers)?;
    pool.install(|| {
        points
            .iter()
            .enumerate()
            .map(|(k, ch)| run_point_in_pool(code, ch, decoder, stopping, seed, k as u64))
            .collect()
    })
}

fn validate_stopping(stopping: Stopping) -> Result<()> {
    match stopping {
        Stopping::Trials(0) => Err(Error::Domain("need at least one trial".into())),
        Stopping::TargetErrors { target: 0, .. } | Stopping::TargetErrors { max_trials: 0, .. } => {
            Err(Error::Domain("target errors and max trials must be positive".into()))
        }
        _ => Ok(()),
    }
}

/// Writes one CSV row per point. Timing columns are left empty unless
/// `timing` is set, which keeps the output reproducible.
pub fn write_csv<W: Write>(stats: &[TrialStats], mut out: W, timing: bool) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in stats {
        writeln!(out, "{}", s.csv_row(timing))?;
    }
    Ok(())
}

pub fn csv_string(stats: &[TrialStats], timing: bool) -> String {
    let mut buf = Vec::new();
    write_csv(stats, &mut buf, timing).expect("writing to memory");
    String::from_utf8(buf).expect("ascii csv")
}
