//! Maximum mutual information achievable with the code structures.
//!
//! Orthogonal and interleaved block-diagonal designs turn the fading
//! channel into parallel scalar channels whose gain is gamma-distributed,
//! so their information limits reduce to a single kernel
//! `C(n, rho') = E[log2(1 + (rho'/n) X)]` with `X ~ Gamma(n, 1)`, evaluated
//! here by adaptive quadrature. The unconstrained channel benchmark is a
//! seeded Monte Carlo average of `log2 det(I + (rho/N) H^H H)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::GciodSpec;
use crate::mat::CMat;
use crate::{Error, Result};

/// Absolute error target for the quadrature kernel.
const QUAD_EPS: f64 = 1e-9;

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadParam(format!(
            "SNR must be nonnegative and finite, got {rho}"
        )))
    }
}

/// `E[log2(1 + (rho_eff / n_eff) X)]` for `X ~ Gamma(n_eff, 1)`: the
/// mutual information of a scalar channel whose power gain is a normalized
/// chi-square with `2 n_eff` degrees of freedom at SNR `rho_eff`.
pub fn capacity_siso_equiv(n_eff: usize, rho_eff: f64) -> Result<f64> {
    if n_eff == 0 {
        return Err(Error::BadParam("diversity order must be positive".into()));
    }
    check_rho(rho_eff)?;
    if rho_eff == 0.0 {
        return Ok(0.0);
    }
    let n = n_eff as f64;
    let ln_gamma: f64 = (1..n_eff).map(|k| (k as f64).ln()).sum();
    let snr_per_branch = rho_eff / n;
    let f = |lambda: f64| -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let weight = ((n - 1.0) * lambda.ln() - lambda - ln_gamma).exp();
        weight * (1.0 + snr_per_branch * lambda).log2()
    };
    // The gamma weight is negligible far beyond its mean n.
    let upper = n + 50.0 * (n + 1.0).sqrt() + 80.0;
    Ok(adaptive_simpson(&f, 0.0, upper, QUAD_EPS))
}

/// Adaptive Simpson quadrature seeded with uniform panels so that a
/// sharply localized integrand cannot hide between the initial samples.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    const PANELS: usize = 64;
    let width = (b - a) / PANELS as f64;
    let panel_eps = eps / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = lo + width;
            let m = 0.5 * (lo + hi);
            let (fa, fm, fb) = (f(lo), f(m), f(hi));
            let whole = width / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(f, lo, hi, fa, fm, fb, whole, panel_eps, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1)
    }
}

/// Maximum mutual information of a rate-K/L orthogonal design on N
/// transmit and M receive antennas: the design sees `K/L` uses of a scalar
/// channel with diversity order `MN` at effective SNR `(ML/K) rho`.
pub fn mmi_glcod(n: usize, m: usize, k: usize, l: usize, rho: f64) -> Result<f64> {
    if n == 0 || m == 0 || k == 0 || l == 0 {
        return Err(Error::BadParam(
            "antenna, symbol, and delay counts must be positive".into(),
        ));
    }
    check_rho(rho)?;
    let rate = k as f64 / l as f64;
    let rho_eff = (m * l) as f64 / k as f64 * rho;
    Ok(rate * capacity_siso_equiv(m * n, rho_eff)?)
}

/// Maximum mutual information of an interleaved block-diagonal design: the
/// two component blocks contribute scalar channels of diversity `M N1` and
/// `M N2`, each carrying half the symbol coordinates.
pub fn mmi_gciod(spec: &GciodSpec, m: usize, rho: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::BadParam("need at least one receive antenna".into()));
    }
    check_rho(rho)?;
    let k = spec.k as f64;
    let l = spec.l() as f64;
    let first = capacity_siso_equiv(m * spec.n1, 2.0 * spec.l1 as f64 * m as f64 * rho / k)?;
    let second = capacity_siso_equiv(m * spec.n2, 2.0 * spec.l2 as f64 * m as f64 * rho / k)?;
    Ok(k / (2.0 * l) * (first + second))
}

/// Ergodic capacity of the unconstrained N-by-M Rayleigh channel,
/// `E[log2 det(I_M + (rho/N) H^H H)]`, by seeded Monte Carlo. Returns the
/// sample mean and its standard error. Each sample is keyed by
/// (seed, sample index), so the estimate is reproducible and independent of
/// thread count.
pub fn capacity_mimo_mc(
    n: usize,
    m: usize,
    rho: f64,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 || m == 0 {
        return Err(Error::BadParam("antenna counts must be positive".into()));
    }
    if samples < 2 {
        return Err(Error::BadParam(
            "need at least two Monte Carlo samples".into(),
        ));
    }
    check_rho(rho)?;
    let per_tx = rho / n as f64;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx);
            let h = crate::sim::draw_channel(
                &crate::sim::ChannelModel::quasi_static(n, m, 1),
                &mut rng,
            );
            let h = match h {
                crate::sim::ChannelDraw::Quasi(h) => h,
                crate::sim::ChannelDraw::Rapid(_) => unreachable!(),
            };
            let gram = h.conj_transpose().matmul(&h);
            let arg = CMat::identity(m).add(&gram.scale(Complex64::new(per_tx, 0.0)));
            let det = arg.determinant().re;
            det.max(f64::MIN_POSITIVE).log2()
        })
        .collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (samples - 1) as f64;
    Ok((mean, (var / samples as f64).sqrt()))
}

/// One SNR point of a mutual-information sweep; `stderr` is set for Monte
/// Carlo estimates only.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MmiPoint {
    pub snr_db: f64,
    pub bits: f64,
    pub stderr: Option<f64>,
}

/// Mutual-information sweep results.
#[derive(Clone, Debug, Serialize)]
pub struct MmiCurve {
    pub scheme: String,
    pub points: Vec<MmiPoint>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}
