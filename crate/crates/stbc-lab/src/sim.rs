//! Rayleigh channel simulation, ML decoding, and BER Monte Carlo.
//!
//! Two channel models are covered: quasi-static (one N-by-M channel matrix
//! per codeword block) and rapid fading (an independent channel matrix per
//! time slot). Transmit power is normalized so the average codeword energy
//! is L, making `rho` the SNR per receive antenna with unit-variance noise.
//!
//! Decoding is either single-symbol (one argmin per complex symbol, valid
//! exactly when the design passes the matching decodability check) or joint
//! ML over all codewords (the oracle). For rapid fading the decodability
//! condition moves to extended weight matrices that spread each time slot
//! over its own column block.
//!
//! Monte Carlo runs are reproducible by construction: every frame derives
//! its randomness from (master seed, frame index) alone, so results are
//! independent of thread count and identical across runs. Frames reuse the
//! same draws across SNR points, which correlates curve points and lowers
//! comparison variance.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::constellation::SignalSet;
use crate::design::{check_sd_general, LinearDesign, PairViolation, SdCheck};
use crate::mat::{cx, CMat};
use crate::{Error, Rate, Result, DEFAULT_TOL};

/// Joint-ML and frame-batch budget: at most this many codewords enumerated
/// per decode.
const MAX_CODEWORDS: u128 = 1_000_000;

/// Frames evaluated per parallel batch between stop-condition checks.
const FRAME_BATCH: u64 = 1024;

/// Which fading process the channel follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChannelKind {
    /// One channel matrix per codeword block.
    QuasiStatic,
    /// An independent channel matrix per time slot.
    Rapid,
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quasistatic" | "quasi-static" => Ok(ChannelKind::QuasiStatic),
            "rapid" => Ok(ChannelKind::Rapid),
            other => Err(Error::BadParam(format!(
                "unknown channel kind '{other}', expected quasistatic or rapid"
            ))),
        }
    }
}

/// Channel geometry: fading kind, N transmit and M receive antennas, and
/// block length L.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    pub n: usize,
    pub m: usize,
    pub l: usize,
}

impl ChannelModel {
    pub fn quasi_static(n: usize, m: usize, l: usize) -> Self {
        ChannelModel {
            kind: ChannelKind::QuasiStatic,
            n,
            m,
            l,
        }
    }

    pub fn rapid(n: usize, m: usize, l: usize) -> Self {
        ChannelModel {
            kind: ChannelKind::Rapid,
            n,
            m,
            l,
        }
    }
}

/// One realization of the channel.
#[derive(Clone, Debug)]
pub enum ChannelDraw {
    /// N-by-M matrix held for the whole block.
    Quasi(CMat),
    /// One N-by-M matrix per time slot.
    Rapid(Vec<CMat>),
}

impl ChannelDraw {
    /// Receive antenna count.
    pub fn rx(&self) -> usize {
        match self {
            ChannelDraw::Quasi(h) => h.cols(),
            ChannelDraw::Rapid(hs) => hs[0].cols(),
        }
    }

    /// Per-slot channels stacked vertically into an NL-by-M matrix.
    pub fn stacked(&self) -> CMat {
        match self {
            ChannelDraw::Quasi(h) => h.clone(),
            ChannelDraw::Rapid(hs) => {
                let (n, m) = (hs[0].rows(), hs[0].cols());
                CMat::from_fn(n * hs.len(), m, |r, c| hs[r / n][(r % n, c)])
            }
        }
    }
}

/// One complex Gaussian entry with unit variance.
fn standard_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cx(
        re * std::f64::consts::FRAC_1_SQRT_2,
        im * std::f64::consts::FRAC_1_SQRT_2,
    )
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Draws a channel realization for the model.
pub fn draw_channel(model: &ChannelModel, rng: &mut ChaCha8Rng) -> ChannelDraw {
    match model.kind {
        ChannelKind::QuasiStatic => ChannelDraw::Quasi(gaussian_matrix(model.n, model.m, rng)),
        ChannelKind::Rapid => ChannelDraw::Rapid(
            (0..model.l)
                .map(|_| gaussian_matrix(model.n, model.m, rng))
                .collect(),
        ),
    }
}

/// Draws an L-by-M block of unit-variance complex Gaussian noise.
pub fn draw_noise(l: usize, m: usize, rng: &mut ChaCha8Rng) -> CMat {
    gaussian_matrix(l, m, rng)
}

/// Applies the channel to a codeword-shaped matrix: a plain product for the
/// quasi-static kind, a per-slot row product for the rapid kind.
fn apply_channel(mat: &CMat, draw: &ChannelDraw) -> CMat {
    match draw {
        ChannelDraw::Quasi(h) => mat.matmul(h),
        ChannelDraw::Rapid(hs) => {
            let m = hs[0].cols();
            CMat::from_fn(mat.rows(), m, |t, j| {
                (0..mat.cols()).map(|i| mat[(t, i)] * hs[t][(i, j)]).sum()
            })
        }
    }
}

fn check_draw_dims(design: &LinearDesign, draw: &ChannelDraw) -> Result<()> {
    let ok = match draw {
        ChannelDraw::Quasi(h) => h.rows() == design.n(),
        ChannelDraw::Rapid(hs) => {
            hs.len() == design.l()
                && hs
                    .iter()
                    .all(|h| h.rows() == design.n() && h.cols() == hs[0].cols())
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BadParam(format!(
            "channel draw does not match design '{}' ({}x{})",
            design.name(),
            design.l(),
            design.n()
        )))
    }
}

/// Average codeword energy `E[tr(S^H S)]` under independent uniform symbols
/// from `set` (zero-mean constellations make symbol cross terms vanish).
pub fn avg_codeword_energy(design: &LinearDesign, set: &SignalSet) -> f64 {
    (0..design.k())
        .map(|k| {
            set.points()
                .iter()
                .map(|&a| design.contribution(k, a).frobenius_sq())
                .sum::<f64>()
                / set.len() as f64
        })
        .sum()
}

/// Power normalization making the SNR per receive antenna equal `rho`:
/// codewords are multiplied by `sqrt(rho L / E[tr(S^H S)])` against
/// unit-variance noise.
pub fn power_scale(design: &LinearDesign, set: &SignalSet, rho: f64) -> f64 {
    (rho * design.l() as f64 / avg_codeword_energy(design, set)).sqrt()
}

/// Sends one codeword through the channel: returns
/// `scale * S * H + noise` (per-slot channels in the rapid case).
pub fn transmit(
    design: &LinearDesign,
    set: &SignalSet,
    symbols: &[usize],
    draw: &ChannelDraw,
    noise: &CMat,
    rho: f64,
) -> Result<CMat> {
    if symbols.len() != design.k() {
        return Err(Error::BadParam(format!(
            "expected {} symbol indices, got {}",
            design.k(),
            symbols.len()
        )));
    }
    if let Some(&bad) = symbols.iter().find(|&&s| s >= set.len()) {
        return Err(Error::BadParam(format!("symbol index {bad} out of range")));
    }
    check_draw_dims(design, draw)?;
    if noise.rows() != design.l() || noise.cols() != draw.rx() {
        return Err(Error::BadParam("noise block has wrong shape".into()));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::BadParam(format!(
            "rho must be nonnegative, got {rho}"
        )));
    }
    let points: Vec<Complex64> = symbols.iter().map(|&s| set.points()[s]).collect();
    let s = design.evaluate(&points)?;
    let scaled = s.scale(cx(power_scale(design, set, rho), 0.0));
    Ok(apply_channel(&scaled, draw).add(noise))
}

/// How received blocks are turned back into symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecoderKind {
    /// One argmin per complex symbol.
    SingleSymbol,
    /// Exhaustive argmin over all codewords.
    JointMl,
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" | "single-symbol" => Ok(DecoderKind::SingleSymbol),
            "jointml" | "joint-ml" => Ok(DecoderKind::JointMl),
            other => Err(Error::BadParam(format!(
                "unknown decoder '{other}', expected sd or jointml"
            ))),
        }
    }
}

fn metric(v: &CMat, candidate: &CMat) -> f64 {
    v.sub(candidate).frobenius_sq()
}

fn decode_single_core(
    design: &LinearDesign,
    set: &SignalSet,
    v: &CMat,
    draw: &ChannelDraw,
    scale: f64,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(design.k());
    for k in 0..design.k() {
        let mut best = (0usize, f64::INFINITY);
        for (idx, &a) in set.points().iter().enumerate() {
            let cand = apply_channel(&design.contribution(k, a).scale(cx(scale, 0.0)), draw);
            let m = metric(v, &cand);
            if m < best.1 {
                best = (idx, m);
            }
        }
        out.push(best.0);
    }
    out
}

fn decode_joint_core(
    design: &LinearDesign,
    set: &SignalSet,
    v: &CMat,
    draw: &ChannelDraw,
    scale: f64,
) -> Vec<usize> {
    let (k, m) = (design.k(), set.len());
    let mut idx = vec![0usize; k];
    let mut best = (idx.clone(), f64::INFINITY);
    'outer: loop {
        let points: Vec<Complex64> = idx.iter().map(|&s| set.points()[s]).collect();
        let s = design.evaluate(&points).expect("validated symbol count");
        let cand = apply_channel(&s.scale(cx(scale, 0.0)), draw);
        let met = metric(v, &cand);
        if met < best.1 {
            best = (idx.clone(), met);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
    best.0
}

fn require_single_symbol(design: &LinearDesign, draw_kind: ChannelKind) -> Result<()> {
    let ok = match draw_kind {
        ChannelKind::QuasiStatic => check_sd_general(design, DEFAULT_TOL).ok,
        ChannelKind::Rapid => check_rapid_sd(&extend(design), DEFAULT_TOL).ok,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotSingleSymbol(format!(
            "design '{}' is not single-symbol decodable over this channel",
            design.name()
        )))
    }
}

fn draw_kind(draw: &ChannelDraw) -> ChannelKind {
    match draw {
        ChannelDraw::Quasi(_) => ChannelKind::QuasiStatic,
        ChannelDraw::Rapid(_) => ChannelKind::Rapid,
    }
}

/// Single-symbol ML decoding: for each symbol k returns the constellation
/// index minimizing `||V - scale (A_2k s_I + A_2k+1 s_Q) H||^2`; ties go to
/// the lowest index. Refuses designs that fail the decodability condition
/// for the channel kind in use.
pub fn sd_decode(
    design: &LinearDesign,
    set: &SignalSet,
    v: &CMat,
    draw: &ChannelDraw,
    rho: f64,
) -> Result<Vec<usize>> {
    check_draw_dims(design, draw)?;
    require_single_symbol(design, draw_kind(draw))?;
    let scale = power_scale(design, set, rho);
    Ok(decode_single_core(design, set, v, draw, scale))
}

/// Exhaustive ML decoding over all `|set|^K` codewords; the oracle the
/// single-symbol decoder is tested against. Errors when the enumeration
/// would exceed 10^6 codewords.
pub fn joint_ml_decode(
    design: &LinearDesign,
    set: &SignalSet,
    v: &CMat,
    draw: &ChannelDraw,
    rho: f64,
) -> Result<Vec<usize>> {
    check_draw_dims(design, draw)?;
    let count = (set.len() as u128).checked_pow(design.k() as u32);
    if count.is_none() || count.unwrap() > MAX_CODEWORDS {
        return Err(Error::BudgetExceeded(format!(
            "joint ML over {}^{} codewords exceeds {MAX_CODEWORDS}",
            set.len(),
            design.k()
        )));
    }
    let scale = power_scale(design, set, rho);
    Ok(decode_joint_core(design, set, v, draw, scale))
}

/// Design with weight matrices spread for slotwise analysis: row t of each
/// base weight occupies column block `[tN, (t+1)N)` of an L-by-NL matrix,
/// so that codeword-times-channel products become matrix products against
/// the stacked per-slot channel.
#[derive(Clone, Debug)]
pub struct ExtendedDesign {
    base: LinearDesign,
    ext_weights: Vec<CMat>,
}

impl ExtendedDesign {
    pub fn base(&self) -> &LinearDesign {
        &self.base
    }

    pub fn ext_weights(&self) -> &[CMat] {
        &self.ext_weights
    }

    pub fn ext_weight(&self, idx: usize) -> &CMat {
        &self.ext_weights[idx]
    }

    /// Extended codeword for one symbol vector (row-embedded evaluation).
    pub fn evaluate(&self, symbols: &[Complex64]) -> Result<CMat> {
        let k = self.base.k();
        if symbols.len() != k {
            return Err(Error::BadParam(format!(
                "expected {k} symbols, got {}",
                symbols.len()
            )));
        }
        let mut s = CMat::zeros(self.base.l(), self.base.n() * self.base.l());
        for (i, x) in symbols.iter().enumerate() {
            s = s
                .add(&self.ext_weights[2 * i].scale(cx(x.re, 0.0)))
                .add(&self.ext_weights[2 * i + 1].scale(cx(x.im, 0.0)));
        }
        Ok(s)
    }
}

/// Builds the extended weight matrices for rapid-fading analysis.
pub fn extend(design: &LinearDesign) -> ExtendedDesign {
    let (l, n) = (design.l(), design.n());
    let ext_weights = design
        .weights()
        .iter()
        .map(|w| {
            CMat::from_fn(l, n * l, |r, c| {
                if c / n == r {
                    w[(r, c % n)]
                } else {
                    cx(0.0, 0.0)
                }
            })
        })
        .collect();
    ExtendedDesign {
        base: design.clone(),
        ext_weights,
    }
}

/// Single-symbol decodability over rapid fading: every pair of extended
/// weight matrices (including each symbol's own I/Q pair) must have a
/// vanishing anticommutator.
pub fn check_rapid_sd(ext: &ExtendedDesign, tol: f64) -> SdCheck {
    let mut violations = Vec::new();
    let mut ok = true;
    let w = ext.ext_weights();
    for k in 0..w.len() {
        for l in k + 1..w.len() {
            let m = w[k]
                .conj_transpose()
                .matmul(&w[l])
                .add(&w[l].conj_transpose().matmul(&w[k]));
            let residual = m.max_abs();
            if residual > tol {
                ok = false;
                if violations.len() < 32 {
                    violations.push(PairViolation { k, l, residual });
                }
            }
        }
    }
    SdCheck { ok, violations }
}

/// Full-diversity certification over rapid fading at diversity order `r`.
///
/// Necessary: each symbol's extended weight pair must touch at least `r`
/// distinct nonzero rows. Sufficient on top of that: either every extended
/// weight matrix alone has rank at least `r`, or the set's coordinate
/// product distance is nonzero and each symbol's extended Gram sum has rank
/// at least `r`.
pub fn check_rapid_full_diversity(ext: &ExtendedDesign, set: &SignalSet, r: usize) -> bool {
    let tol = DEFAULT_TOL;
    let k = ext.base().k();
    let w = ext.ext_weights();
    for i in 0..k {
        let (a, b) = (&w[2 * i], &w[2 * i + 1]);
        let nonzero_rows = (0..a.rows())
            .filter(|&t| (0..a.cols()).any(|c| a[(t, c)].norm() > tol || b[(t, c)].norm() > tol))
            .count();
        if nonzero_rows < r {
            return false;
        }
    }
    let case_rank = w.iter().all(|m| m.numeric_rank(tol) >= r);
    if case_rank {
        return true;
    }
    let cpd_nonzero = set.cpd().map(|v| v > tol).unwrap_or(false);
    if !cpd_nonzero {
        return false;
    }
    (0..k).all(|i| {
        let gram_sum = w[2 * i]
            .conj_transpose()
            .matmul(&w[2 * i])
            .add(&w[2 * i + 1].conj_transpose().matmul(&w[2 * i + 1]));
        gram_sum.numeric_rank(tol) >= r
    })
}

/// Maximum symbol rate of a full-diversity single-symbol decodable code
/// over rapid fading with block length L: `2/L`, independent of the
/// antenna count.
pub fn max_rapid_rate(l: usize) -> Result<Rate> {
    if l == 0 {
        return Err(Error::BadParam("block length must be positive".into()));
    }
    Ok(num_rational::Ratio::new(2, l as u64))
}

/// Monte Carlo controls for one BER sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub snr_grid_db: Vec<f64>,
    /// Per-point floor on simulated frames.
    pub min_frames: u64,
    /// Per-point floor on counted bit errors (at least 100 so each reported
    /// point has a usable binomial confidence interval).
    pub min_bit_errors: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
    /// Hard per-point cap so noiseless points terminate.
    pub max_frames: u64,
}

impl SimConfig {
    /// Default hard cap on frames per SNR point.
    pub const DEFAULT_MAX_FRAMES: u64 = 10_000_000;
}

/// One SNR point of a BER sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub frames: u64,
}

/// BER sweep results with the identifiers needed to reproduce them.
#[derive(Clone, Debug, Serialize)]
pub struct BerCurve {
    pub design: String,
    pub set: String,
    pub channel: ChannelKind,
    pub rx: usize,
    pub decoder: DecoderKind,
    pub seed: u64,
    pub points: Vec<BerPoint>,
}

/// Runs the BER Monte Carlo.
///
/// Each frame draws symbols, channel, and noise from a generator keyed by
/// (seed, frame index) only, so output is a pure function of the
/// arguments: identical across runs, thread counts, and schedulings. The
/// same frames are reused at every SNR point. A point finishes once both
/// `min_frames` and `min_bit_errors` are met, or at `max_frames`.
pub fn simulate_ber(
    design: &LinearDesign,
    set: &SignalSet,
    channel: &ChannelModel,
    config: &SimConfig,
) -> Result<BerCurve> {
    if channel.n != design.n() || channel.l != design.l() {
        return Err(Error::BadParam(format!(
            "channel geometry {}x{} (L={}) does not match design '{}'",
            channel.n,
            channel.m,
            channel.l,
            design.name()
        )));
    }
    if channel.m == 0 {
        return Err(Error::BadParam("need at least one receive antenna".into()));
    }
    let labels = set
        .labels()
        .ok_or_else(|| Error::BadParam("BER needs a power-of-two set with Gray labels".into()))?;
    let bits_per_symbol = set.bits_per_symbol().unwrap() as u64;
    if config.min_bit_errors < 100 {
        return Err(Error::BadParam(
            "min_bit_errors must be at least 100 for a usable confidence interval".into(),
        ));
    }
    if config.max_frames == 0 || config.snr_grid_db.is_empty() {
        return Err(Error::BadParam(
            "need a nonempty SNR grid and a positive frame cap".into(),
        ));
    }
    match config.decoder {
        DecoderKind::SingleSymbol => require_single_symbol(design, channel.kind)?,
        DecoderKind::JointMl => {
            let count = (set.len() as u128).checked_pow(design.k() as u32);
            if count.is_none() || count.unwrap() > MAX_CODEWORDS {
                return Err(Error::BudgetExceeded(format!(
                    "joint ML over {}^{} codewords exceeds {MAX_CODEWORDS}",
                    set.len(),
                    design.k()
                )));
            }
        }
    }
    let energy = avg_codeword_energy(design, set);
    let bits_per_frame = design.k() as u64 * bits_per_symbol;
    let mut points = Vec::with_capacity(config.snr_grid_db.len());
    for &snr_db in &config.snr_grid_db {
        let rho = 10f64.powf(snr_db / 10.0);
        let scale = (rho * design.l() as f64 / energy).sqrt();
        let mut frames = 0u64;
        let mut bit_errors = 0u64;
        while !(frames >= config.min_frames && bit_errors >= config.min_bit_errors)
            && frames < config.max_frames
        {
            let batch = FRAME_BATCH.min(config.max_frames - frames);
            let errs: u64 = (0..batch)
                .into_par_iter()
                .map(|offset| {
                    run_frame(design, set, labels, channel, config, frames + offset, scale)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            bit_errors += errs;
            frames += batch;
        }
        let bits = frames * bits_per_frame;
        points.push(BerPoint {
            snr_db,
            ber: bit_errors as f64 / bits as f64,
            bit_errors,
            bits,
            frames,
        });
    }
    Ok(BerCurve {
        design: design.name().to_string(),
        set: set.label().to_string(),
        channel: channel.kind,
        rx: channel.m,
        decoder: config.decoder,
        seed: config.seed,
        points,
    })
}

/// Simulates one frame and returns its bit-error count. Randomness comes
/// from (seed, frame index) alone; draw order is symbols, then channel,
/// then noise.
fn run_frame(
    design: &LinearDesign,
    set: &SignalSet,
    labels: &[u32],
    channel: &ChannelModel,
    config: &SimConfig,
    frame: u64,
    scale: f64,
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(frame);
    let tx: Vec<usize> = (0..design.k())
        .map(|_| rng.gen_range(0..set.len()))
        .collect();
    let draw = draw_channel(channel, &mut rng);
    let noise = draw_noise(design.l(), channel.m, &mut rng);
    let points: Vec<Complex64> = tx.iter().map(|&s| set.points()[s]).collect();
    let s = design.evaluate(&points).expect("validated symbol count");
    let v = apply_channel(&s.scale(cx(scale, 0.0)), &draw).add(&noise);
    let decoded = match config.decoder {
        DecoderKind::SingleSymbol => decode_single_core(design, set, &v, &draw, scale),
        DecoderKind::JointMl => decode_joint_core(design, set, &v, &draw, scale),
    };
    tx.iter()
        .zip(&decoded)
        .map(|(&a, &b)| (labels[a] ^ labels[b]).count_ones() as u64)
        .sum()
}
