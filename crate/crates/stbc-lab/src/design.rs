//! Linear space-time block designs and their algebraic classification.
//!
//! A design transmits K complex symbols over L time slots and N antennas as
//! `S = sum_k x_kI A_{2k} + x_kQ A_{2k+1}`, where the 2K weight matrices
//! `A_i` are fixed L-by-N complex matrices. Everything the crate knows about
//! a code is carried by its weight matrices.
//!
//! The checks in this module decide when the ML metric of such a design
//! splits into one term per complex symbol (single-symbol decodability) and
//! whether the design can reach full transmit diversity, either with every
//! constellation (unrestricted) or only with constellations whose coordinate
//! product distance is nonzero (restricted).

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::constellation::SignalSet;
use crate::mat::{cx, CMat};
use crate::{Error, Rate, Result};

/// Cap on reported failing pairs: diagnostics, not enumeration.
const MAX_VIOLATIONS: usize = 32;

/// Linear design: 2K weight matrices of size L-by-N plus a display name.
#[derive(Clone, Debug)]
pub struct LinearDesign {
    l: usize,
    n: usize,
    k: usize,
    weights: Vec<CMat>,
    name: String,
}

impl LinearDesign {
    /// Validates shapes and wraps the weight matrices.
    ///
    /// Requires `k >= 1`, `l >= n >= 1`, and exactly 2K weight matrices of
    /// size L-by-N each.
    pub fn new(
        name: impl Into<String>,
        l: usize,
        n: usize,
        k: usize,
        weights: Vec<CMat>,
    ) -> Result<Self> {
        if k == 0 || n == 0 || l < n {
            return Err(Error::BadParam(format!(
                "design dimensions must satisfy K >= 1 and L >= N >= 1, got L={l}, N={n}, K={k}"
            )));
        }
        if weights.len() != 2 * k {
            return Err(Error::BadParam(format!(
                "expected {} weight matrices for K={k}, got {}",
                2 * k,
                weights.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if w.rows() != l || w.cols() != n {
                return Err(Error::BadParam(format!(
                    "weight matrix {i} is {}x{}, expected {l}x{n}",
                    w.rows(),
                    w.cols()
                )));
            }
        }
        Ok(Self {
            l,
            n,
            k,
            weights,
            name: name.into(),
        })
    }

    /// Number of time slots (rows of a codeword).
    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of transmit antennas (columns of a codeword).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of complex symbols per codeword.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Returns a copy with a different display name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let mut d = self.clone();
        d.name = name.into();
        d
    }

    /// Symbol rate K/L in complex symbols per channel use.
    pub fn rate(&self) -> Rate {
        Ratio::new(self.k as u64, self.l as u64)
    }

    /// All 2K weight matrices; `weights()[2k]` multiplies the in-phase part
    /// of symbol k and `weights()[2k+1]` its quadrature part.
    pub fn weights(&self) -> &[CMat] {
        &self.weights
    }

    /// Single weight matrix by flat index in `0..2K`.
    pub fn weight(&self, idx: usize) -> &CMat {
        &self.weights[idx]
    }

    /// Codeword matrix for one K-symbol vector.
    pub fn evaluate(&self, symbols: &[Complex64]) -> Result<CMat> {
        if symbols.len() != self.k {
            return Err(Error::BadParam(format!(
                "design {} takes {} symbols, got {}",
                self.name,
                self.k,
                symbols.len()
            )));
        }
        let mut s = CMat::zeros(self.l, self.n);
        for (k, x) in symbols.iter().enumerate() {
            s = s.add(&self.contribution(k, *x));
        }
        Ok(s)
    }

    /// Contribution of one symbol: `x_I A_{2k} + x_Q A_{2k+1}`.
    pub fn contribution(&self, k: usize, x: Complex64) -> CMat {
        self.weights[2 * k]
            .scale(cx(x.re, 0.0))
            .add(&self.weights[2 * k + 1].scale(cx(x.im, 0.0)))
    }

    /// Gram matrix `A_idx^H A_idx` of one weight matrix.
    pub fn weight_gram(&self, idx: usize) -> CMat {
        let w = &self.weights[idx];
        w.conj_transpose().matmul(w)
    }

    /// Per-symbol Gram sum `A_{2k}^H A_{2k} + A_{2k+1}^H A_{2k+1}`; full
    /// rank for every k is necessary for full diversity.
    pub fn symbol_gram_sum(&self, k: usize) -> CMat {
        self.weight_gram(2 * k).add(&self.weight_gram(2 * k + 1))
    }

    /// Serializes to the shared JSON design format.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&DesignJson::from(self)).expect("design serialization")
    }

    /// Parses the shared JSON design format.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: DesignJson = serde_json::from_str(text)
            .map_err(|e| Error::BadDesign(format!("invalid design JSON: {e}")))?;
        raw.try_into()
    }
}

/// Interchange JSON shape: integer dims, name, and weights as
/// `[2K][L][N]` arrays of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct DesignJson {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    name: String,
    weights: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&LinearDesign> for DesignJson {
    fn from(d: &LinearDesign) -> Self {
        DesignJson {
            l: d.l,
            n: d.n,
            k: d.k,
            name: d.name.clone(),
            weights: d
                .weights
                .iter()
                .map(|w| {
                    (0..d.l)
                        .map(|r| (0..d.n).map(|c| [w[(r, c)].re, w[(r, c)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<DesignJson> for LinearDesign {
    type Error = Error;

    fn try_from(raw: DesignJson) -> Result<Self> {
        let mut weights = Vec::with_capacity(raw.weights.len());
        for (i, w) in raw.weights.iter().enumerate() {
            if w.len() != raw.l || w.iter().any(|row| row.len() != raw.n) {
                return Err(Error::BadDesign(format!(
                    "weight matrix {i} does not match the declared L={} N={}",
                    raw.l, raw.n
                )));
            }
            if w.iter().flatten().flatten().any(|v| !v.is_finite()) {
                return Err(Error::BadDesign(format!(
                    "weight matrix {i} has a non-finite entry"
                )));
            }
            weights.push(CMat::from_fn(raw.l, raw.n, |r, c| {
                cx(w[r][c][0], w[r][c][1])
            }));
        }
        LinearDesign::new(raw.name, raw.l, raw.n, raw.k, weights)
    }
}

/// One failing weight-matrix pair: the anticommutator
/// `A_k^H A_l + A_l^H A_k` has an entry of magnitude `residual`.
#[derive(Clone, Debug, Serialize)]
pub struct PairViolation {
    pub k: usize,
    pub l: usize,
    pub residual: f64,
}

/// Outcome of a pairwise orthogonality check.
#[derive(Clone, Debug, Serialize)]
pub struct SdCheck {
    pub ok: bool,
    /// First failing pairs, at most 32.
    pub violations: Vec<PairViolation>,
}

/// Largest entry magnitude of `A_k^H A_l + A_l^H A_k`.
pub fn pair_residual(design: &LinearDesign, k: usize, l: usize) -> f64 {
    let (a, b) = (design.weight(k), design.weight(l));
    let m = a
        .conj_transpose()
        .matmul(b)
        .add(&b.conj_transpose().matmul(a));
    m.max_abs()
}

fn check_pairs(
    design: &LinearDesign,
    tol: f64,
    mut applies: impl FnMut(usize, usize) -> bool,
) -> SdCheck {
    let mut violations = Vec::new();
    let mut ok = true;
    for k in 0..2 * design.k() {
        for l in k + 1..2 * design.k() {
            if !applies(k, l) {
                continue;
            }
            let residual = pair_residual(design, k, l);
            if residual > tol {
                ok = false;
                if violations.len() < MAX_VIOLATIONS {
                    violations.push(PairViolation { k, l, residual });
                }
            }
        }
    }
    SdCheck { ok, violations }
}

/// Single-symbol decodability in its weakest form: the anticommutator must
/// vanish for every pair of weight matrices belonging to different symbols.
/// Pairs inside one symbol's I/Q pair are unconstrained here.
pub fn check_sd_general(design: &LinearDesign, tol: f64) -> SdCheck {
    check_pairs(design, tol, |k, l| k / 2 != l / 2)
}

/// In-phase/quadrature orthogonality: the anticommutator of each symbol's
/// own weight pair `(A_{2k}, A_{2k+1})` must vanish.
pub fn check_iq_orthogonality(design: &LinearDesign, tol: f64) -> SdCheck {
    check_pairs(design, tol, |k, l| k / 2 == l / 2)
}

/// Strict condition: anticommutators vanish for all pairs, the general
/// condition and I/Q orthogonality together.
pub fn check_sd_strict(design: &LinearDesign, tol: f64) -> SdCheck {
    check_pairs(design, tol, |_, _| true)
}

/// Classification flags for one design, optionally relative to a signal set.
#[derive(Clone, Debug, Serialize)]
pub struct DesignClass {
    /// Weakest single-symbol-decodability condition holds.
    pub is_sd_general: bool,
    /// Each symbol's I/Q weight pair is orthogonal.
    pub is_iq_orthogonal: bool,
    /// All weight-matrix pairs anticommute (general + I/Q).
    pub is_sd_strict: bool,
    /// Necessary full-diversity condition: every per-symbol Gram sum
    /// `A_{2k}^H A_{2k} + A_{2k+1}^H A_{2k+1}` has full rank N.
    pub diversity_necessary: bool,
    /// Full diversity with every constellation: strict SD, the necessary
    /// condition, and every single weight Gram `A_i^H A_i` full rank.
    pub ufsdd: bool,
    /// Full diversity restricted to the given signal set: strict SD, the
    /// necessary condition, at least one rank-deficient weight Gram, and the
    /// set's coordinate product distance nonzero. `None` when no set given.
    pub rfsdd_with_set: Option<bool>,
    /// Failing pairs from the strict check.
    pub details: Vec<PairViolation>,
}

impl DesignClass {
    /// Strict SD plus the necessary full-diversity condition; the superclass
    /// containing both the unrestricted and restricted full-rank families.
    pub fn fsdd(&self) -> bool {
        self.is_sd_strict && self.diversity_necessary
    }
}

/// Runs the full classification battery on one design.
pub fn classify(design: &LinearDesign, set: Option<&SignalSet>, tol: f64) -> DesignClass {
    let general = check_sd_general(design, tol);
    let iq = check_iq_orthogonality(design, tol);
    let strict = check_sd_strict(design, tol);
    let n = design.n();
    let diversity_necessary =
        (0..design.k()).all(|k| design.symbol_gram_sum(k).numeric_rank(tol) == n);
    let all_weights_full =
        (0..2 * design.k()).all(|i| design.weight_gram(i).numeric_rank(tol) == n);
    let fsdd = strict.ok && diversity_necessary;
    let ufsdd = fsdd && all_weights_full;
    let rfsdd_with_set = set.map(|s| {
        let cpd_nonzero = s.cpd().map(|v| v > tol).unwrap_or(false);
        fsdd && !all_weights_full && cpd_nonzero
    });
    DesignClass {
        is_sd_general: general.ok,
        is_iq_orthogonal: iq.ok,
        is_sd_strict: strict.ok,
        diversity_necessary,
        ufsdd,
        rfsdd_with_set,
        details: strict.violations,
    }
}

/// True when the design is a generalized linear complex orthogonal design:
/// all weight pairs anticommute, every weight Gram is diagonal with
/// nonnegative entries, each symbol's I and Q Grams are equal (so the
/// codeword Gram depends on |x_k|^2 only), and no antenna column is dead.
pub fn is_glcod(design: &LinearDesign, tol: f64) -> bool {
    if !check_sd_strict(design, tol).ok {
        return false;
    }
    let n = design.n();
    let mut column_energy = vec![0.0f64; n];
    for k in 0..design.k() {
        let gi = design.weight_gram(2 * k);
        let gq = design.weight_gram(2 * k + 1);
        if !gi.approx_eq(&gq, tol) {
            return false;
        }
        for r in 0..n {
            for c in 0..n {
                let v = gi[(r, c)];
                if r != c && v.norm() > tol {
                    return false;
                }
                if r == c {
                    if v.im.abs() > tol || v.re < -tol {
                        return false;
                    }
                    column_energy[r] += v.re;
                }
            }
        }
    }
    column_energy.iter().all(|&e| e > tol)
}

/// Closed-form maximal rates for square designs of size `N = 2^a * b` with
/// b odd: `(a+1)/N` for orthogonal designs and `2a/N` for restricted
/// full-rank single-symbol designs.
pub fn max_square_rates(n: usize) -> Result<(Rate, Rate)> {
    if n == 0 {
        return Err(Error::BadParam("antenna count must be positive".into()));
    }
    let a = (n as u64).trailing_zeros() as u64;
    Ok((Ratio::new(a + 1, n as u64), Ratio::new(2 * a, n as u64)))
}
