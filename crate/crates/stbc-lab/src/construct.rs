//! Constructors for the design families the crate works with.
//!
//! Four mechanisms cover everything: an iterative doubling recursion for
//! square orthogonal designs, vertical stacking of an orthogonal design with
//! fresh symbols, block-diagonal composition of two orthogonal designs with
//! coordinate interleaving (the GCIOD construction), and column deletion.
//! A small catalog exposes the named instances used throughout the tests
//! and CLI, with weight matrices matching their standard printed forms.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::design::{is_glcod, LinearDesign};
use crate::mat::{cx, CMat};
use crate::{Error, Rate, Result, DEFAULT_TOL};

/// How a generalized linear complex orthogonal design came to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstructionTag {
    Catalog,
    Iterative,
    Stacked,
}

/// Shape summary of one orthogonal-design component.
#[derive(Clone, Debug, Serialize)]
pub struct GlcodSpec {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub construction: ConstructionTag,
}

impl GlcodSpec {
    pub fn of(design: &LinearDesign, construction: ConstructionTag) -> Self {
        GlcodSpec {
            n: design.n(),
            l: design.l(),
            k: design.k(),
            construction,
        }
    }

    pub fn rate(&self) -> Rate {
        Ratio::new(self.k as u64, self.l as u64)
    }
}

/// Shape and interleaving data of a coordinate-interleaved composition of
/// two orthogonal sub-designs of N1 and N2 antennas.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GciodSpec {
    pub n1: usize,
    pub n2: usize,
    pub l1: usize,
    pub l2: usize,
    /// Total complex symbols; each sub-design carries k/2.
    pub k: usize,
    /// `interleave_map[i]` is the symbol whose quadrature part symbol i
    /// borrows: `(i + k/2) mod k`.
    pub interleave_map: Vec<usize>,
}

impl GciodSpec {
    pub fn new(n1: usize, n2: usize, l1: usize, l2: usize, k: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || l1 < n1 || l2 < n2 {
            return Err(Error::BadParam(format!(
                "sub-design shapes must satisfy L >= N >= 1, got ({l1}x{n1}) and ({l2}x{n2})"
            )));
        }
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::BadParam(format!(
                "total symbol count must be even and >= 2, got {k}"
            )));
        }
        Ok(GciodSpec {
            n1,
            n2,
            l1,
            l2,
            k,
            interleave_map: (0..k).map(|i| (i + k / 2) % k).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn l(&self) -> usize {
        self.l1 + self.l2
    }

    pub fn rate(&self) -> Rate {
        Ratio::new(self.k as u64, self.l() as u64)
    }

    /// Applies the coordinate interleaving: symbol i keeps its in-phase
    /// part and takes the quadrature part of symbol `interleave_map[i]`.
    pub fn interleave(&self, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
        if symbols.len() != self.k {
            return Err(Error::BadParam(format!(
                "expected {} symbols, got {}",
                self.k,
                symbols.len()
            )));
        }
        Ok((0..self.k)
            .map(|i| cx(symbols[i].re, symbols[self.interleave_map[i]].im))
            .collect())
    }
}

/// Exact harmonic mean of two rates, `2 r1 r2 / (r1 + r2)`.
pub fn harmonic_mean_rate(r1: Rate, r2: Rate) -> Rate {
    Ratio::from_integer(2u64) * r1 * r2 / (r1 + r2)
}

fn embed(w: &CMat, l: usize, n: usize, row_off: usize, col_off: usize) -> CMat {
    CMat::from_fn(l, n, |r, c| {
        if r >= row_off && r < row_off + w.rows() && c >= col_off && c < col_off + w.cols() {
            w[(r - row_off, c - col_off)]
        } else {
            cx(0.0, 0.0)
        }
    })
}

fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (rows, cols) = (a.rows() + b.rows(), a.cols() + b.cols());
    let mut m = embed(a, rows, cols, 0, 0);
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            m[(a.rows() + r, a.cols() + c)] = b[(r, c)];
        }
    }
    m
}

/// Iterative square orthogonal design of size `2^stage` carrying
/// `stage + 1` complex symbols.
///
/// Stage 0 is the single-symbol design `[x_0]`; each doubling step places
/// the previous design and its conjugate transpose on the diagonal and
/// routes a fresh symbol through the off-diagonal blocks. The symbol count
/// meets the Hurwitz bound for square orthogonal designs with equality.
pub fn square_glcod(stage: u32) -> LinearDesign {
    let mut weights = vec![
        CMat::new(1, 1, vec![cx(1.0, 0.0)]),
        CMat::new(1, 1, vec![cx(0.0, 1.0)]),
    ];
    let mut size = 1usize;
    for _ in 0..stage {
        let mut next: Vec<CMat> = weights
            .iter()
            .map(|w| block_diag(w, &w.conj_transpose()))
            .collect();
        let mut wi = CMat::zeros(2 * size, 2 * size);
        let mut wq = CMat::zeros(2 * size, 2 * size);
        for t in 0..size {
            wi[(t, size + t)] = cx(1.0, 0.0);
            wi[(size + t, t)] = cx(-1.0, 0.0);
            wq[(t, size + t)] = cx(0.0, 1.0);
            wq[(size + t, t)] = cx(0.0, 1.0);
        }
        next.push(wi);
        next.push(wq);
        weights = next;
        size *= 2;
    }
    let k = weights.len() / 2;
    LinearDesign::new(format!("glcod{size}"), size, size, k, weights)
        .expect("iterative construction")
}

/// Vertical stacking of an orthogonal design: `copies` blocks, each with
/// its own fresh symbols, one below the other. Delay and symbol count both
/// multiply by `copies`; the antenna count is unchanged.
pub fn stack_glcod(base: &LinearDesign, copies: usize) -> Result<LinearDesign> {
    if copies == 0 {
        return Err(Error::BadParam("stack needs at least one copy".into()));
    }
    if !is_glcod(base, DEFAULT_TOL) {
        return Err(Error::BadParam(format!(
            "stacking requires an orthogonal design, '{}' is not one",
            base.name()
        )));
    }
    if copies == 1 {
        return Ok(base.clone());
    }
    let (lb, n, kb) = (base.l(), base.n(), base.k());
    let l = copies * lb;
    let mut weights = Vec::with_capacity(2 * copies * kb);
    for copy in 0..copies {
        for i in 0..2 * kb {
            weights.push(embed(base.weight(i), l, n, copy * lb, 0));
        }
    }
    LinearDesign::new(
        format!("{}_x{copies}", base.name()),
        l,
        n,
        copies * kb,
        weights,
    )
}

/// Block-diagonal composition of two orthogonal designs with coordinate
/// interleaving.
///
/// The first design fills the top-left block with symbols `0..K/2`, the
/// second the bottom-right block with symbols `K/2..K`; every symbol keeps
/// its in-phase part and borrows the quadrature part of the symbol K/2
/// positions later (cyclically), which is realized here purely through the
/// weight-matrix layout. Both components must carry the same number of
/// symbols; stack them to the lcm of their symbol counts first if they do
/// not. The composite rate is the exact harmonic mean of the component
/// rates.
pub fn compose_gciod(
    theta1: &LinearDesign,
    theta2: &LinearDesign,
) -> Result<(LinearDesign, GciodSpec)> {
    for d in [theta1, theta2] {
        if !is_glcod(d, DEFAULT_TOL) {
            return Err(Error::BadParam(format!(
                "composition requires orthogonal components, '{}' is not one",
                d.name()
            )));
        }
    }
    if theta1.k() != theta2.k() {
        return Err(Error::BadParam(format!(
            "components carry {} and {} symbols; stack each with stack_glcod so both carry lcm({}, {}) symbols",
            theta1.k(),
            theta2.k(),
            theta1.k(),
            theta2.k()
        )));
    }
    let half = theta1.k();
    let k = 2 * half;
    let (l1, n1) = (theta1.l(), theta1.n());
    let (l2, n2) = (theta2.l(), theta2.n());
    let (l, n) = (l1 + l2, n1 + n2);
    let mut weights = Vec::with_capacity(2 * k);
    for i in 0..k {
        if i < half {
            weights.push(embed(theta1.weight(2 * i), l, n, 0, 0));
            weights.push(embed(theta2.weight(2 * i + 1), l, n, l1, n1));
        } else {
            let ip = i - half;
            weights.push(embed(theta2.weight(2 * ip), l, n, l1, n1));
            weights.push(embed(theta1.weight(2 * ip + 1), l, n, 0, 0));
        }
    }
    let spec = GciodSpec::new(n1, n2, l1, l2, k)?;
    let design = LinearDesign::new(
        format!("gciod({},{})", theta1.name(), theta2.name()),
        l,
        n,
        k,
        weights,
    )?;
    Ok((design, spec))
}

/// Square coordinate-interleaved design of size `N = 2^a`, built by
/// composing the size-N/2 iterative orthogonal design with itself. Rate is
/// `2a/2^a`, the square maximum for the restricted full-rank family.
pub fn square_ciod(n: usize) -> Result<LinearDesign> {
    Ok(square_ciod_with_spec(n)?.0)
}

/// Same as [`square_ciod`] but keeping the composition spec.
pub fn square_ciod_with_spec(n: usize) -> Result<(LinearDesign, GciodSpec)> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadParam(format!(
            "square interleaved construction needs a power-of-two size >= 2, got {n}"
        )));
    }
    let a = n.trailing_zeros();
    let base = square_glcod(a - 1);
    let (design, spec) = compose_gciod(&base, &base)?;
    Ok((design.renamed(format!("ciod{n}")), spec))
}

/// Removes the listed antenna columns from every weight matrix; delay and
/// symbol count are unchanged. Columns must be distinct, in range, and
/// leave at least one column standing.
pub fn delete_columns(design: &LinearDesign, cols: &[usize]) -> Result<LinearDesign> {
    if cols.is_empty() {
        return Ok(design.clone());
    }
    let n = design.n();
    let mut sorted = cols.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != cols.len() {
        return Err(Error::BadParam("duplicate column indices".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&c| c >= n) {
        return Err(Error::BadParam(format!(
            "column {bad} out of range for {n} antennas"
        )));
    }
    if sorted.len() >= n {
        return Err(Error::BadParam("at least one column must remain".into()));
    }
    let keep: Vec<usize> = (0..n).filter(|c| !sorted.contains(c)).collect();
    let weights = design
        .weights()
        .iter()
        .map(|w| CMat::from_fn(design.l(), keep.len(), |r, c| w[(r, keep[c])]))
        .collect();
    let tag: Vec<String> = sorted.iter().map(|c| c.to_string()).collect();
    LinearDesign::new(
        format!("{}_drop{}", design.name(), tag.join("_")),
        design.l(),
        keep.len(),
        design.k(),
        weights,
    )
}

/// Closed-form lower bound on the maximal rate of a coordinate-interleaved
/// design for `N = n + 2` antennas: `2(m+1)/(3m+1)` with `m = n/2` for even
/// n and `(n+1)/2` for odd n.
pub fn gciod_rate_bound(n: usize) -> Result<Rate> {
    if n < 3 {
        return Err(Error::BadParam(format!(
            "rate bound applies to 3 or more antennas, got {n}"
        )));
    }
    let nn = (n - 2) as u64;
    let m = nn.div_ceil(2);
    Ok(Ratio::new(2 * (m + 1), 3 * m + 1))
}

const CATALOG_NAMES: [&str; 8] = [
    "alamouti",
    "cod34_4",
    "ciod2",
    "ciod4",
    "gciod3",
    "ciod8",
    "rate12_cod8",
    "trivial1",
];

/// Names accepted by [`catalog`].
pub fn catalog_names() -> &'static [&'static str] {
    &CATALOG_NAMES
}

/// Two-symbol single-antenna orthogonal design `[x_0; -x_1^*]`.
fn trivial1() -> LinearDesign {
    let z = cx(0.0, 0.0);
    LinearDesign::new(
        "trivial1",
        2,
        1,
        2,
        vec![
            CMat::new(2, 1, vec![cx(1.0, 0.0), z]),
            CMat::new(2, 1, vec![cx(0.0, 1.0), z]),
            CMat::new(2, 1, vec![z, cx(-1.0, 0.0)]),
            CMat::new(2, 1, vec![z, cx(0.0, 1.0)]),
        ],
    )
    .expect("catalog construction")
}

/// Rate-1/2 complex orthogonal design with delay 8 for 4 antennas: a 4x4
/// real orthogonal design in x_0..x_3 stacked over its entrywise conjugate.
fn rate12_cod8() -> LinearDesign {
    let perm = [[0usize, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    let sign = [
        [1.0, 1.0, 1.0, 1.0],
        [-1.0, 1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0, 1.0],
    ];
    let mut weights = vec![CMat::zeros(8, 4); 8];
    for r in 0..4 {
        for c in 0..4 {
            let (i, s) = (perm[r][c], sign[r][c]);
            weights[2 * i][(r, c)] = cx(s, 0.0);
            weights[2 * i + 1][(r, c)] = cx(0.0, s);
            weights[2 * i][(r + 4, c)] = cx(s, 0.0);
            weights[2 * i + 1][(r + 4, c)] = cx(0.0, -s);
        }
    }
    LinearDesign::new("rate12_cod8", 8, 4, 4, weights).expect("catalog construction")
}

/// Catalog instances that are coordinate-interleaved compositions, returned
/// with their composition spec.
pub fn catalog_gciod(name: &str) -> Result<(LinearDesign, GciodSpec)> {
    match name {
        "ciod2" => square_ciod_with_spec(2),
        "ciod4" => square_ciod_with_spec(4),
        "ciod8" => square_ciod_with_spec(8),
        "gciod3" => {
            let alamouti = square_glcod(1);
            let (d, spec) = compose_gciod(&alamouti, &trivial1())?;
            Ok((d.renamed("gciod3"), spec))
        }
        other => Err(Error::BadParam(format!(
            "'{other}' is not an interleaved composition; use ciod2, ciod4, ciod8, or gciod3"
        ))),
    }
}

/// Named design catalog.
///
/// `alamouti` (2x2 rate 1), `cod34_4` (4x4 rate 3/4), `trivial1` (2x1 time
/// multiplex), `rate12_cod8` (8x4 rate 1/2), and the interleaved designs
/// `ciod2`, `ciod4`, `ciod8`, `gciod3` (4x3 rate 1).
pub fn catalog(name: &str) -> Result<LinearDesign> {
    match name {
        "alamouti" => Ok(square_glcod(1).renamed("alamouti")),
        "cod34_4" => Ok(square_glcod(2).renamed("cod34_4")),
        "trivial1" => Ok(trivial1()),
        "rate12_cod8" => Ok(rate12_cod8()),
        "ciod2" | "ciod4" | "ciod8" | "gciod3" => Ok(catalog_gciod(name)?.0),
        other => Err(Error::UnknownDesign {
            name: other.into(),
            valid: CATALOG_NAMES.join(", "),
        }),
    }
}

/// Builds the canonical interleaved design for sub-block antenna counts
/// `(n1, n2)` drawn from {1, 2, 4}, stacking the component designs to the
/// lcm of their symbol counts first. `(2, 4)` yields the rate-6/7 design
/// for 6 antennas; `(2, 1)` yields the rate-one design for 3 antennas.
pub fn compose_for_antennas(n1: usize, n2: usize) -> Result<(LinearDesign, GciodSpec)> {
    if (n1, n2) == (1, 1) {
        return square_ciod_with_spec(2);
    }
    let pick = |n: usize| -> Result<LinearDesign> {
        match n {
            1 => Ok(trivial1()),
            2 => Ok(square_glcod(1).renamed("alamouti")),
            4 => Ok(square_glcod(2).renamed("cod34_4")),
            other => Err(Error::BadParam(format!(
                "no cataloged orthogonal component for {other} antennas; supported sub-block sizes are 1, 2, 4"
            ))),
        }
    };
    let (t1, t2) = (pick(n1)?, pick(n2)?);
    let lcm = num_integer::lcm(t1.k(), t2.k());
    let s1 = stack_glcod(&t1, lcm / t1.k())?;
    let s2 = stack_glcod(&t2, lcm / t2.k())?;
    compose_gciod(&s1, &s2)
}

/// One row of the known rate/delay comparison for 2 to 8 antennas:
/// `(rate, delay)` for the best known orthogonal design, the rate-efficient
/// interleaved design, and the delay-efficient interleaved design.
#[derive(Clone, Debug, Serialize)]
pub struct RateTableRow {
    pub n: usize,
    pub glcod: (Rate, usize),
    pub gciod_rate_efficient: (Rate, usize),
    pub ciod_delay_efficient: (Rate, usize),
}

/// Known rates and delays for 2 to 8 transmit antennas.
///
/// The rate-efficient delays for 7 and 8 antennas come from composing
/// stacked Alamouti blocks with rate-2/3 orthogonal designs of 14 symbols
/// in 21 slots (5 antennas) and 20 symbols in 30 slots (6 antennas).
pub fn known_rate_delay_table() -> Vec<RateTableRow> {
    let r = |a: u64, b: u64| Ratio::new(a, b);
    let row = |n, g: (Rate, usize), ge: (Rate, usize), de: (Rate, usize)| RateTableRow {
        n,
        glcod: g,
        gciod_rate_efficient: ge,
        ciod_delay_efficient: de,
    };
    vec![
        row(2, (r(1, 1), 2), (r(1, 1), 2), (r(1, 1), 2)),
        row(3, (r(3, 4), 4), (r(1, 1), 4), (r(1, 1), 4)),
        row(4, (r(3, 4), 4), (r(1, 1), 4), (r(1, 1), 4)),
        row(5, (r(2, 3), 15), (r(6, 7), 14), (r(3, 4), 8)),
        row(6, (r(2, 3), 30), (r(6, 7), 14), (r(3, 4), 8)),
        row(7, (r(5, 8), 56), (r(4, 5), 35), (r(3, 4), 8)),
        row(8, (r(5, 8), 112), (r(4, 5), 50), (r(3, 4), 8)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{check_iq_orthogonality, check_sd_general, check_sd_strict};

    const TOL: f64 = 1e-12;

    fn random_symbols(k: usize, seed: u64) -> Vec<Complex64> {
        // Small deterministic pseudo-random symbols for algebraic identities.
        let mut state = seed
            .wrapping_mul(2862933555777941757)
            .wrapping_add(3037000493);
        let mut next = || {
            state = state
                .wrapping_mul(2862933555777941757)
                .wrapping_add(3037000493);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..k).map(|_| cx(next() * 4.0, next() * 4.0)).collect()
    }

    #[test]
    fn catalog_rejects_unknown_names() {
        let err = catalog("nope").unwrap_err().to_string();
        assert!(err.contains("alamouti") && err.contains("ciod8"));
    }

    #[test]
    fn alamouti_codeword_matches_closed_form() {
        let d = catalog("alamouti").unwrap();
        let s = d.evaluate(&[cx(1.0, 0.0), cx(0.0, 1.0)]).unwrap();
        let want = CMat::from_rows(&[
            vec![cx(1.0, 0.0), cx(0.0, 1.0)],
            vec![cx(0.0, 1.0), cx(1.0, 0.0)],
        ]);
        assert!(s.approx_eq(&want, TOL));
    }

    #[test]
    fn stage_zero_is_single_symbol() {
        let d = square_glcod(0);
        let s = d.evaluate(&[cx(2.0, 3.0)]).unwrap();
        assert_eq!((d.l(), d.n(), d.k()), (1, 1, 1));
        assert!((s[(0, 0)] - cx(2.0, 3.0)).norm() < TOL);
    }

    #[test]
    fn stage_two_matches_rate_three_quarters_form() {
        let d = square_glcod(2);
        let x = random_symbols(3, 7);
        let s = d.evaluate(&x).unwrap();
        let (x0, x1, x2) = (x[0], x[1], x[2]);
        let z = cx(0.0, 0.0);
        let want = CMat::from_rows(&[
            vec![x0, x1, x2, z],
            vec![-x1.conj(), x0.conj(), z, x2],
            vec![-x2.conj(), z, x0.conj(), -x1],
            vec![z, -x2.conj(), x1.conj(), x0],
        ]);
        assert!(s.approx_eq(&want, 1e-9));
    }

    #[test]
    fn iterative_designs_are_orthogonal_with_hurwitz_symbol_count() {
        for stage in 0..5u32 {
            let d = square_glcod(stage);
            assert_eq!(d.k(), stage as usize + 1);
            assert_eq!(d.l(), 1 << stage);
            assert!(is_glcod(&d, 1e-9), "stage {stage}");
            // Gram of any evaluation is (sum |x_i|^2) I.
            let x = random_symbols(d.k(), stage as u64 + 1);
            let s = d.evaluate(&x).unwrap();
            let gram = s.conj_transpose().matmul(&s);
            let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            assert!(gram.approx_eq(&CMat::identity(d.n()).scale(cx(energy, 0.0)), 1e-9));
        }
    }

    #[test]
    fn composing_alamouti_with_itself_gives_the_square_interleaved_design() {
        let alamouti = catalog("alamouti").unwrap();
        let (composed, spec) = compose_gciod(&alamouti, &alamouti).unwrap();
        let ciod4 = catalog("ciod4").unwrap();
        for (a, b) in composed.weights().iter().zip(ciod4.weights()) {
            assert!(a.approx_eq(b, TOL));
        }
        assert_eq!(
            (spec.n1, spec.n2, spec.l1, spec.l2, spec.k),
            (2, 2, 2, 2, 4)
        );
        assert_eq!(spec.interleave_map, vec![2, 3, 0, 1]);
    }

    #[test]
    fn interleaved_codeword_is_block_diagonal_in_swapped_coordinates() {
        let (ciod4, spec) = catalog_gciod("ciod4").unwrap();
        let alamouti = catalog("alamouti").unwrap();
        let x = random_symbols(4, 11);
        let tilde = spec.interleave(&x).unwrap();
        let top = alamouti.evaluate(&tilde[..2]).unwrap();
        let bottom = alamouti.evaluate(&tilde[2..]).unwrap();
        let want = block_diag(&top, &bottom);
        let got = ciod4.evaluate(&x).unwrap();
        assert!(got.approx_eq(&want, 1e-9));
    }

    #[test]
    fn three_antenna_design_is_the_column_deleted_square_design() {
        let gciod3 = catalog("gciod3").unwrap();
        let dropped = delete_columns(&catalog("ciod4").unwrap(), &[3]).unwrap();
        assert_eq!((gciod3.l(), gciod3.n(), gciod3.k()), (4, 3, 4));
        for (a, b) in gciod3.weights().iter().zip(dropped.weights()) {
            assert!(a.approx_eq(b, TOL));
        }
        assert_eq!(gciod3.rate(), Ratio::new(1, 1));
    }

    #[test]
    fn stacking_repeats_blocks_with_fresh_symbols() {
        let alamouti = catalog("alamouti").unwrap();
        let same = stack_glcod(&alamouti, 1).unwrap();
        assert_eq!(same.name(), "alamouti");
        let triple = stack_glcod(&alamouti, 3).unwrap();
        assert_eq!((triple.l(), triple.n(), triple.k()), (6, 2, 6));
        let x = random_symbols(6, 3);
        let s = triple.evaluate(&x).unwrap();
        for copy in 0..3 {
            let block = alamouti.evaluate(&x[2 * copy..2 * copy + 2]).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((s[(2 * copy + r, c)] - block[(r, c)]).norm() < TOL);
                }
            }
        }
        assert!(is_glcod(&triple, 1e-9));
    }

    #[test]
    fn six_antenna_composition_has_harmonic_mean_rate() {
        let (d, spec) = compose_for_antennas(2, 4).unwrap();
        assert_eq!((d.l(), d.n(), d.k()), (14, 6, 12));
        assert_eq!(d.rate(), Ratio::new(6, 7));
        assert_eq!(spec.rate(), Ratio::new(6, 7));
        let alamouti = catalog("alamouti").unwrap();
        let cod34 = catalog("cod34_4").unwrap();
        assert_eq!(
            harmonic_mean_rate(alamouti.rate(), cod34.rate()),
            Ratio::new(6, 7)
        );
        assert!(check_sd_general(&d, 1e-9).ok);
        assert!(check_iq_orthogonality(&d, 1e-9).ok);
    }

    #[test]
    fn composition_demands_equal_symbol_counts() {
        let alamouti = catalog("alamouti").unwrap();
        let cod34 = catalog("cod34_4").unwrap();
        let err = compose_gciod(&alamouti, &cod34).unwrap_err().to_string();
        assert!(err.contains("lcm"), "got: {err}");
    }

    #[test]
    fn column_deletion_validates_indices() {
        let ciod4 = catalog("ciod4").unwrap();
        assert!(delete_columns(&ciod4, &[0, 0]).is_err());
        assert!(delete_columns(&ciod4, &[4]).is_err());
        assert!(delete_columns(&ciod4, &[0, 1, 2, 3]).is_err());
        let same = delete_columns(&ciod4, &[]).unwrap();
        assert_eq!(same.n(), 4);
    }

    #[test]
    fn eight_antenna_design_shapes() {
        let d = catalog("ciod8").unwrap();
        assert_eq!((d.l(), d.n(), d.k()), (8, 8, 6));
        assert_eq!(d.rate(), Ratio::new(3, 4));
        assert!(check_sd_strict(&d, 1e-9).ok);
        let five = delete_columns(&d, &[5, 6, 7]).unwrap();
        assert_eq!((five.n(), five.rate()), (5, Ratio::new(3, 4)));
    }

    #[test]
    fn half_rate_design_has_scaled_identity_gram() {
        let d = catalog("rate12_cod8").unwrap();
        assert_eq!((d.l(), d.n(), d.k()), (8, 4, 4));
        assert_eq!(d.rate(), Ratio::new(1, 2));
        assert!(is_glcod(&d, 1e-9));
        let x = random_symbols(4, 5);
        let s = d.evaluate(&x).unwrap();
        let gram = s.conj_transpose().matmul(&s);
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!(gram.approx_eq(&CMat::identity(4).scale(cx(2.0 * energy, 0.0)), 1e-9));
    }

    #[test]
    fn rate_bound_closed_forms() {
        let r = |a: u64, b: u64| Ratio::new(a, b);
        assert_eq!(gciod_rate_bound(3).unwrap(), r(1, 1));
        assert_eq!(gciod_rate_bound(4).unwrap(), r(1, 1));
        assert_eq!(gciod_rate_bound(5).unwrap(), r(6, 7));
        assert_eq!(gciod_rate_bound(6).unwrap(), r(6, 7));
        assert_eq!(gciod_rate_bound(7).unwrap(), r(4, 5));
        assert_eq!(gciod_rate_bound(8).unwrap(), r(4, 5));
        assert!(gciod_rate_bound(2).is_err());
    }

    #[test]
    fn delay_table_matches_known_values() {
        let table = known_rate_delay_table();
        let ge: Vec<usize> = table.iter().map(|r| r.gciod_rate_efficient.1).collect();
        let de: Vec<usize> = table.iter().map(|r| r.ciod_delay_efficient.1).collect();
        assert_eq!(ge, vec![2, 4, 4, 14, 14, 35, 50]);
        assert_eq!(de, vec![2, 4, 4, 8, 8, 8, 8]);
        for row in &table {
            assert!(row.gciod_rate_efficient.0 >= row.ciod_delay_efficient.0);
        }
    }

    #[test]
    fn deleting_columns_never_raises_weight_rank() {
        let d = catalog("ciod8").unwrap();
        let cut = delete_columns(&d, &[1, 6]).unwrap();
        for i in 0..2 * d.k() {
            let before = d.weight(i).numeric_rank(1e-9);
            let after = cut.weight(i).numeric_rank(1e-9);
            assert!(after <= before);
        }
    }
}
