//! Signal sets, rotations, and coordinate product distances.
//!
//! Full diversity of the restricted design families in this crate hinges on
//! the coordinate product distance (CPD) of the constellation: the minimum
//! over point pairs of |delta_I|·|delta_Q|. Axis-aligned lattices have CPD
//! zero; rotating them makes every coordinate difference nonzero. This
//! module builds square QAM and PSK sets, rotates them, evaluates CPD and
//! its generalized form GCPD (unequal exponents for unequal sub-block
//! sizes), and returns the closed-form optimal rotation angles.
//!
//! Angles are degrees at every interface; radians are internal only.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;

use crate::mat::cx;
use crate::{Error, Result};

/// Constellation family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    /// Square quadrature amplitude modulation on the odd-integer lattice.
    Qam,
    /// Phase shift keying on the unit circle, first point at 1.
    Psk,
}

impl FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qam" => Ok(SetKind::Qam),
            "psk" => Ok(SetKind::Psk),
            other => Err(Error::BadParam(format!(
                "unknown constellation kind '{other}', expected qam or psk"
            ))),
        }
    }
}

/// Finite complex constellation with rotation and labeling metadata.
#[derive(Clone, Debug)]
pub struct SignalSet {
    points: Vec<Complex64>,
    label: String,
    rotation_deg: f64,
    /// Lattice half-spacing for QAM sets; `None` for non-lattice sets.
    d: Option<f64>,
    /// Gray bit labels aligned with `points`; `None` when the size is not a
    /// power of two.
    labels: Option<Vec<u32>>,
}

impl SignalSet {
    /// Wraps an explicit point list. Points must be finite and pairwise
    /// distinct (distance > 1e-12).
    pub fn new(points: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::BadParam(
                "signal set needs at least one point".into(),
            ));
        }
        if points
            .iter()
            .any(|p| !p.re.is_finite() || !p.im.is_finite())
        {
            return Err(Error::BadParam("signal points must be finite".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if (points[i] - points[j]).norm() <= 1e-12 {
                    return Err(Error::BadParam(format!(
                        "signal points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self {
            points,
            label: label.into(),
            rotation_deg: 0.0,
            d: None,
            labels: None,
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Accumulated rotation applied since construction, in degrees.
    pub fn rotation_deg(&self) -> f64 {
        self.rotation_deg
    }

    /// Lattice half-spacing, when the set came from a square QAM lattice.
    pub fn d(&self) -> Option<f64> {
        self.d
    }

    /// Gray bit labels aligned with `points()`.
    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// Bits carried per symbol; `None` unless the size is a power of two.
    pub fn bits_per_symbol(&self) -> Option<u32> {
        self.labels
            .as_ref()
            .map(|_| self.points.len().trailing_zeros())
    }

    /// Mean point energy.
    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Returns the set rotated by `theta_deg` degrees; metadata carried
    /// over, rotation accumulated.
    pub fn rotated(&self, theta_deg: f64) -> SignalSet {
        let phase = Complex64::from_polar(1.0, theta_deg.to_radians());
        SignalSet {
            points: self.points.iter().map(|p| p * phase).collect(),
            label: self.label.clone(),
            rotation_deg: self.rotation_deg + theta_deg,
            d: self.d,
            labels: self.labels.clone(),
        }
    }

    /// Coordinate product distance: minimum of |delta_I|·|delta_Q| over all
    /// distinct point pairs. Errors on singleton sets.
    pub fn cpd(&self) -> Result<f64> {
        self.gcpd(1, 1)
    }

    /// Generalized coordinate product distance with sub-block exponents
    /// 2·n1/(n1+n2) and 2·n2/(n1+n2); for each pair the smaller of the two
    /// exponent assignments counts. Reduces to `cpd` when n1 = n2.
    pub fn gcpd(&self, n1: usize, n2: usize) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::BadParam(
                "coordinate product distance needs at least two points".into(),
            ));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::BadParam("sub-block sizes must be positive".into()));
        }
        let e1 = 2.0 * n1 as f64 / (n1 + n2) as f64;
        let e2 = 2.0 * n2 as f64 / (n1 + n2) as f64;
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let delta = self.points[i] - self.points[j];
                let (a, b) = (delta.re.abs(), delta.im.abs());
                let v = pow_or_id(a, e1) * pow_or_id(b, e2);
                let w = pow_or_id(a, e2) * pow_or_id(b, e1);
                best = best.min(v.min(w));
            }
        }
        Ok(best)
    }
}

/// `x^e`, returning `x` untouched when `e == 1` so equal-exponent GCPD is
/// bit-identical to CPD.
fn pow_or_id(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else {
        x.powf(e)
    }
}

fn gray(x: u32) -> u32 {
    x ^ (x >> 1)
}

/// Builds a square M-QAM or M-PSK constellation.
///
/// QAM points live on the odd-integer lattice `(2k-1-Q)d + j(2l-1-Q)d` for
/// `k, l in 1..=Q` with `Q = sqrt(M)`; `unit_energy` picks
/// `d = sqrt(3/(2(M-1)))` so the mean energy is 1, otherwise `d = 1/2`.
/// PSK points are `exp(j·2·pi·i/M)` starting at 1 (always unit energy).
/// Gray labels are attached whenever M is a power of two.
pub fn make_signal_set(kind: SetKind, m: usize, unit_energy: bool) -> Result<SignalSet> {
    match kind {
        SetKind::Qam => {
            let q = (m as f64).sqrt().round() as usize;
            if m < 4 || q * q != m {
                return Err(Error::BadParam(format!(
                    "QAM size must be a perfect square >= 4, got {m}"
                )));
            }
            let d = if unit_energy {
                (3.0 / (2.0 * (m as f64 - 1.0))).sqrt()
            } else {
                0.5
            };
            let mut points = Vec::with_capacity(m);
            for k in 1..=q {
                for l in 1..=q {
                    points.push(cx(
                        (2.0 * k as f64 - 1.0 - q as f64) * d,
                        (2.0 * l as f64 - 1.0 - q as f64) * d,
                    ));
                }
            }
            let labels = if m.is_power_of_two() && q.is_power_of_two() {
                let half_bits = q.trailing_zeros();
                Some(
                    (0..m)
                        .map(|i| {
                            let (k, l) = (i / q, i % q);
                            (gray(k as u32) << half_bits) | gray(l as u32)
                        })
                        .collect(),
                )
            } else {
                None
            };
            Ok(SignalSet {
                points,
                label: format!("{m}-qam"),
                rotation_deg: 0.0,
                d: Some(d),
                labels,
            })
        }
        SetKind::Psk => {
            if m < 2 {
                return Err(Error::BadParam(format!("PSK size must be >= 2, got {m}")));
            }
            let points = (0..m)
                .map(|i| Complex64::from_polar(1.0, 2.0 * PI * i as f64 / m as f64))
                .collect();
            let labels = if m.is_power_of_two() {
                Some((0..m as u32).map(gray).collect())
            } else {
                None
            };
            Ok(SignalSet {
                points,
                label: format!("{m}-psk"),
                rotation_deg: 0.0,
                d: None,
                labels,
            })
        }
    }
}

/// Closed-form optimal rotation of a square QAM lattice for the plain CPD:
/// angle `arctan(2)/2` in degrees and the normalized value `CPD/(4d^2) =
/// 1/sqrt(5)`.
pub fn optimal_rotation_cpd() -> (f64, f64) {
    ((2.0f64).atan().to_degrees() / 2.0, 1.0 / 5.0f64.sqrt())
}

/// Residual of the optimality equation for the GCPD rotation:
/// `(1 - 1/x)^(2 n1) (1 + x)^(2 n2) - 1`.
pub fn gcpd_root_residual(n1: usize, n2: usize, x: f64) -> f64 {
    (1.0 - 1.0 / x).powi(2 * n1 as i32) * (1.0 + x).powi(2 * n2 as i32) - 1.0
}

/// Optimal rotation of a square 4-point lattice for the generalized CPD
/// with sub-block sizes `(n1, n2)`.
///
/// Returns `(x0, theta_deg, gcpd/(4 d^2))` where `theta = arctan(x0)`. The
/// argument order is normalized internally (the objective is symmetric);
/// equal sub-blocks fall back to the plain-CPD optimum.
pub fn optimal_rotation_gcpd_qpsk(n1: usize, n2: usize) -> Result<(f64, f64, f64)> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::BadParam("sub-block sizes must be positive".into()));
    }
    let (big, small) = if n1 >= n2 { (n1, n2) } else { (n2, n1) };
    if big == small {
        let (theta_deg, value) = optimal_rotation_cpd();
        return Ok((theta_deg.to_radians().tan(), theta_deg, value));
    }
    let f = |x: f64| gcpd_root_residual(big, small, x);
    let (mut lo, mut hi) = (0.5, 1.0 - 1e-9);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::BadParam(format!(
            "rotation root not bracketed for sub-blocks ({n1}, {n2})"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);
    let theta_deg = x0.atan().to_degrees();
    let value = x0.powf(2.0 * big as f64 / (big + small) as f64) / (1.0 + x0 * x0);
    Ok((x0, theta_deg, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn unit_energy_qam4_is_diamond_with_half_sqrt2_spacing() {
        let set = make_signal_set(SetKind::Qam, 4, true).unwrap();
        let d = set.d().unwrap();
        assert!((d - 1.0 / 2.0f64.sqrt()).abs() < TOL);
        assert!((set.mean_energy() - 1.0).abs() < TOL);
        for p in set.points() {
            assert!((p.re.abs() - d).abs() < TOL && (p.im.abs() - d).abs() < TOL);
        }
    }

    #[test]
    fn unit_energy_qam16_half_spacing() {
        let set = make_signal_set(SetKind::Qam, 16, true).unwrap();
        let d = set.d().unwrap();
        assert!((d * d - 0.1).abs() < TOL);
        assert!((set.mean_energy() - 1.0).abs() < TOL);
        assert_eq!(set.len(), 16);
    }

    #[test]
    fn psk4_is_unit_circle_quadrature() {
        let set = make_signal_set(SetKind::Psk, 4, true).unwrap();
        let want = [cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0), cx(0.0, -1.0)];
        for (p, w) in set.points().iter().zip(want) {
            assert!((p - w).norm() < TOL);
        }
    }

    #[test]
    fn invalid_sizes_rejected() {
        assert!(make_signal_set(SetKind::Qam, 8, true).is_err());
        assert!(make_signal_set(SetKind::Psk, 1, true).is_err());
    }

    #[test]
    fn rotation_accumulates_and_moves_points() {
        let set = SignalSet::new(vec![cx(1.0, 0.0), cx(-1.0, 0.0)], "pair").unwrap();
        let same = set.rotated(0.0);
        assert!((same.points()[0] - cx(1.0, 0.0)).norm() < TOL);
        let quarter = set.rotated(90.0);
        assert!((quarter.points()[0] - cx(0.0, 1.0)).norm() < TOL);
        assert!((quarter.rotated(-45.0).rotation_deg() - 45.0).abs() < TOL);
    }

    #[test]
    fn rotating_diamond_by_45_degrees_aligns_axes() {
        let set = make_signal_set(SetKind::Qam, 4, true)
            .unwrap()
            .rotated(45.0);
        for p in set.points() {
            assert!(p.re.abs() < 1e-12 || p.im.abs() < 1e-12);
        }
    }

    #[test]
    fn cpd_zero_without_rotation_and_closed_form_at_optimum() {
        let set = make_signal_set(SetKind::Qam, 4, true).unwrap();
        assert!(set.cpd().unwrap() < TOL);
        let (theta, norm) = optimal_rotation_cpd();
        let rotated = set.rotated(theta);
        let d = set.d().unwrap();
        assert!((rotated.cpd().unwrap() - 4.0 * d * d * norm).abs() < 1e-9);
        assert!((rotated.cpd().unwrap() - 2.0 / 5.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn equal_block_gcpd_is_exactly_cpd() {
        let set = make_signal_set(SetKind::Qam, 16, true)
            .unwrap()
            .rotated(17.3);
        assert_eq!(set.gcpd(3, 3).unwrap(), set.cpd().unwrap());
    }

    #[test]
    fn gcpd_is_symmetric_in_block_sizes() {
        let set = make_signal_set(SetKind::Qam, 4, true)
            .unwrap()
            .rotated(29.0);
        assert!((set.gcpd(2, 1).unwrap() - set.gcpd(1, 2).unwrap()).abs() < TOL);
    }

    #[test]
    fn cpd_errors_on_singleton() {
        let set = SignalSet::new(vec![cx(1.0, 0.0)], "one").unwrap();
        assert!(set.cpd().is_err());
    }

    #[test]
    fn rotation_optimum_closed_forms() {
        let (theta, value) = optimal_rotation_cpd();
        assert!((theta - 31.7175).abs() < 1e-3);
        assert!((value - 0.4472).abs() < 1e-4);

        let (x0, t21, v21) = optimal_rotation_gcpd_qpsk(2, 1).unwrap();
        assert!((x0 - 0.555).abs() < 1e-3);
        assert!((t21 - 29.0).abs() < 0.5);
        assert!((v21 - 0.3487).abs() < 2e-3);
        assert!(gcpd_root_residual(2, 1, x0).abs() < 1e-10);

        let (x33, t33, v33) = optimal_rotation_gcpd_qpsk(3, 3).unwrap();
        assert!((x33 - 0.618).abs() < 1e-3);
        assert!((t33 - 31.7175).abs() < 1e-3);
        assert!((v33 - 0.4472).abs() < 1e-4);

        let (a, b, c) = optimal_rotation_gcpd_qpsk(1, 2).unwrap();
        let (x, y, z) = optimal_rotation_gcpd_qpsk(2, 1).unwrap();
        assert_eq!((a, b, c), (x, y, z));
    }

    #[test]
    fn gray_labels_differ_in_one_bit_between_psk_neighbors() {
        let set = make_signal_set(SetKind::Psk, 8, true).unwrap();
        let labels = set.labels().unwrap();
        for i in 0..8 {
            let diff = labels[i] ^ labels[(i + 1) % 8];
            assert_eq!(diff.count_ones(), 1);
        }
        assert_eq!(set.bits_per_symbol(), Some(3));
    }

    #[test]
    fn qam_gray_labels_cover_all_indices() {
        let set = make_signal_set(SetKind::Qam, 16, true).unwrap();
        let mut labels: Vec<u32> = set.labels().unwrap().to_vec();
        labels.sort_unstable();
        assert_eq!(labels, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn non_power_of_two_psk_has_no_labels() {
        let set = make_signal_set(SetKind::Psk, 6, true).unwrap();
        assert!(set.labels().is_none());
        assert_eq!(set.bits_per_symbol(), None);
    }
}
