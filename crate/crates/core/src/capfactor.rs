//! Capitalization factors.
//!
//! A capitalization factor is a positive `C¹` function `f` of the time
//! displacement with `f(0) = 1` and `f(-h) = 1/f(h)`. Positivity and the
//! reciprocity law force `f = exp(g)` with `g` odd, so every built-in kind is
//! stored through its exponent `g`, which makes the first three axioms hold
//! by construction.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::central_difference;
use crate::verify::{AxiomReport, Check};

/// Largest exponent magnitude accepted before `exp` leaves the double range.
pub const MAX_EXPONENT: f64 = 700.0;

/// Displacements checked by [`validate_factor`] when no grid is given
/// (mirrored to negative values).
pub const DEFAULT_GRID: [f64; 7] = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0];

/// Default relative tolerance on `|f(h) f(-h) - 1|`.
pub const DEFAULT_TOL_RECIP: f64 = 1e-12;

pub const FACTOR_AXIOMS_LAW: &str = "D1-factor-axioms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    Analytic,
    FiniteDifference,
}

/// Anything that can act as a capitalization factor.
///
/// The algebra and evolution code is generic over this trait so that
/// candidate functions which do not satisfy the axioms can still be fed to
/// the validator and the law checks.
pub trait Capitalization {
    /// `f(h)`.
    fn factor(&self, h: f64) -> Result<f64>;

    /// `f'(h)`.
    fn derivative(&self, h: f64) -> Result<f64>;

    /// Force of interest `δ_f(h) = f'(h) / f(h)`.
    fn force_of_interest(&self, h: f64) -> Result<f64> {
        Ok(self.derivative(h)? / self.factor(h)?)
    }

    /// `Π f(up) / Π f(down)`.
    fn ratio(&self, up: &[f64], down: &[f64]) -> Result<f64> {
        let num = up
            .iter()
            .try_fold(1.0, |acc, &h| Ok::<_, Error>(acc * self.factor(h)?))?;
        let den = down
            .iter()
            .try_fold(1.0, |acc, &h| Ok::<_, Error>(acc * self.factor(h)?))?;
        Ok(num / den)
    }

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::Analytic
    }

    /// Displacements at which `f` is only one-sided differentiable.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: Capitalization + ?Sized> Capitalization for &T {
    fn factor(&self, h: f64) -> Result<f64> {
        (**self).factor(h)
    }
    fn derivative(&self, h: f64) -> Result<f64> {
        (**self).derivative(h)
    }
    fn force_of_interest(&self, h: f64) -> Result<f64> {
        (**self).force_of_interest(h)
    }
    fn ratio(&self, up: &[f64], down: &[f64]) -> Result<f64> {
        (**self).ratio(up, down)
    }
    fn derivative_mode(&self) -> DerivativeMode {
        (**self).derivative_mode()
    }
    fn kinks(&self) -> Vec<f64> {
        (**self).kinks()
    }
}

/// Exponent family of a built-in factor `f = exp(g)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    /// `g(h) = δ h`: constant force of interest `δ`.
    Exponential { delta: f64 },
    /// `g(h) = Σ a_k h^(2k+1)`.
    OddPolyExp { coeffs: Vec<f64> },
    /// `g` interpolated linearly through `(0, 0)` and the samples `(h_i, g_i)`
    /// with `0 < h_1 < h_2 < ...`, extended oddly to negative `h` and
    /// linearly past the last sample. Only piecewise `C¹`.
    TabulatedOddExp { samples: Vec<(f64, f64)> },
}

/// A validated built-in capitalization factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CapFactor {
    kind: FactorKind,
    mode: DerivativeMode,
}

/// On-disk factor specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorSpec {
    Exponential {
        delta: f64,
        #[serde(default, skip_serializing_if = "is_analytic")]
        derivative_mode: DerivativeMode,
    },
    OddPolyExp {
        coeffs: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_analytic")]
        derivative_mode: DerivativeMode,
    },
    TabulatedOddExp {
        samples: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "is_analytic")]
        derivative_mode: DerivativeMode,
    },
}

fn is_analytic(m: &DerivativeMode) -> bool {
    *m == DerivativeMode::Analytic
}

impl CapFactor {
    pub fn new(kind: FactorKind, mode: DerivativeMode) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidFactor(msg));
        match &kind {
            FactorKind::Exponential { delta } => {
                if !delta.is_finite() {
                    return invalid(format!("delta must be finite, got {delta}"));
                }
            }
            FactorKind::OddPolyExp { coeffs } => {
                if let Some(a) = coeffs.iter().find(|a| !a.is_finite()) {
                    return invalid(format!("coefficients must be finite, got {a}"));
                }
            }
            FactorKind::TabulatedOddExp { samples } => {
                if samples.is_empty() {
                    return invalid("tabulated factor needs at least one sample".into());
                }
                let mut prev = 0.0;
                for &(h, g) in samples {
                    if !h.is_finite() || !g.is_finite() {
                        return invalid(format!("sample ({h}, {g}) is not finite"));
                    }
                    if h <= prev {
                        return invalid(format!(
                            "sample displacements must be positive and strictly increasing ({h} after {prev})"
                        ));
                    }
                    prev = h;
                }
            }
        }
        Ok(CapFactor { kind, mode })
    }

    /// `f(h) = exp(δ h)` with analytic derivative.
    pub fn exponential(delta: f64) -> Result<Self> {
        Self::new(FactorKind::Exponential { delta }, DerivativeMode::Analytic)
    }

    pub fn odd_poly_exp(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        Self::new(
            FactorKind::OddPolyExp {
                coeffs: coeffs.into(),
            },
            DerivativeMode::Analytic,
        )
    }

    pub fn tabulated_odd_exp(samples: impl Into<Vec<(f64, f64)>>) -> Result<Self> {
        Self::new(
            FactorKind::TabulatedOddExp {
                samples: samples.into(),
            },
            DerivativeMode::Analytic,
        )
    }

    pub fn with_derivative_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    pub fn from_spec(spec: FactorSpec) -> Result<Self> {
        match spec {
            FactorSpec::Exponential {
                delta,
                derivative_mode,
            } => Self::new(FactorKind::Exponential { delta }, derivative_mode),
            FactorSpec::OddPolyExp {
                coeffs,
                derivative_mode,
            } => Self::new(FactorKind::OddPolyExp { coeffs }, derivative_mode),
            FactorSpec::TabulatedOddExp {
                samples,
                derivative_mode,
            } => Self::new(
                FactorKind::TabulatedOddExp {
                    samples: samples.into_iter().map(|[h, g]| (h, g)).collect(),
                },
                derivative_mode,
            ),
        }
    }

    pub fn to_spec(&self) -> FactorSpec {
        let derivative_mode = self.mode;
        match &self.kind {
            FactorKind::Exponential { delta } => FactorSpec::Exponential {
                delta: *delta,
                derivative_mode,
            },
            FactorKind::OddPolyExp { coeffs } => FactorSpec::OddPolyExp {
                coeffs: coeffs.clone(),
                derivative_mode,
            },
            FactorKind::TabulatedOddExp { samples } => FactorSpec::TabulatedOddExp {
                samples: samples.iter().map(|&(h, g)| [h, g]).collect(),
                derivative_mode,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FactorSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidFactor(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidFactor(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("factor spec serializes")
    }

    /// The exponent `g(h)`, odd by construction: it is evaluated on `|h|` and
    /// the sign reapplied, so `g(-h) == -g(h)` bitwise.
    pub fn exponent(&self, h: f64) -> Result<f64> {
        if !h.is_finite() {
            return Err(Error::Range {
                h,
                exponent: f64::NAN,
            });
        }
        let x = h.abs();
        let gx = match &self.kind {
            FactorKind::Exponential { delta } => delta * x,
            FactorKind::OddPolyExp { coeffs } => {
                let x2 = x * x;
                x * coeffs.iter().rev().fold(0.0, |acc, &a| acc * x2 + a)
            }
            FactorKind::TabulatedOddExp { samples } => {
                let (x0, g0, slope) = segment(samples, x);
                g0 + slope * (x - x0)
            }
        };
        let g = if h < 0.0 { -gx } else { gx };
        if !g.is_finite() || g.abs() > MAX_EXPONENT {
            return Err(Error::Range { h, exponent: g });
        }
        Ok(g)
    }

    /// `g'(h)`, an even function.
    pub fn exponent_slope(&self, h: f64) -> Result<f64> {
        if !h.is_finite() {
            return Err(Error::Range {
                h,
                exponent: f64::NAN,
            });
        }
        let x = h.abs();
        Ok(match &self.kind {
            FactorKind::Exponential { delta } => *delta,
            FactorKind::OddPolyExp { coeffs } => {
                let x2 = x * x;
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &a)| acc * x2 + (2 * k + 1) as f64 * a)
            }
            FactorKind::TabulatedOddExp { samples } => segment(samples, x).2,
        })
    }
}

/// Segment of the piecewise-linear exponent containing `x >= 0`, as
/// `(left knot, value at left knot, slope)`. Knots belong to the segment on
/// their right; past the last sample the last segment continues.
fn segment(samples: &[(f64, f64)], x: f64) -> (f64, f64, f64) {
    // samples[..i] have h <= x
    let i = samples.partition_point(|&(h, _)| h <= x);
    let i = i.min(samples.len() - 1);
    let (x0, g0) = if i == 0 { (0.0, 0.0) } else { samples[i - 1] };
    let (x1, g1) = samples[i];
    (x0, g0, (g1 - g0) / (x1 - x0))
}

impl Capitalization for CapFactor {
    fn factor(&self, h: f64) -> Result<f64> {
        Ok(self.exponent(h)?.exp())
    }

    fn derivative(&self, h: f64) -> Result<f64> {
        match self.mode {
            DerivativeMode::Analytic => Ok(self.exponent_slope(h)? * self.factor(h)?),
            DerivativeMode::FiniteDifference => central_difference(h, |x| self.factor(x)),
        }
    }

    fn force_of_interest(&self, h: f64) -> Result<f64> {
        match self.mode {
            DerivativeMode::Analytic => {
                self.exponent(h)?;
                self.exponent_slope(h)
            }
            DerivativeMode::FiniteDifference => Ok(self.derivative(h)? / self.factor(h)?),
        }
    }

    /// Sums the exponents and exponentiates once, so discount and
    /// capitalization steps cancel before rounding.
    fn ratio(&self, up: &[f64], down: &[f64]) -> Result<f64> {
        let up_sum = up
            .iter()
            .try_fold(0.0, |acc, &h| Ok::<_, Error>(acc + self.exponent(h)?))?;
        let down_sum = down
            .iter()
            .try_fold(0.0, |acc, &h| Ok::<_, Error>(acc + self.exponent(h)?))?;
        let g = up_sum - down_sum;
        if g.abs() > MAX_EXPONENT {
            let h = up.first().or(down.first()).copied().unwrap_or(0.0);
            return Err(Error::Range { h, exponent: g });
        }
        Ok(g.exp())
    }

    fn derivative_mode(&self) -> DerivativeMode {
        self.mode
    }

    fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            FactorKind::TabulatedOddExp { samples } => {
                // the last knot is interior to the extrapolated segment
                let inner = &samples[..samples.len() - 1];
                inner.iter().flat_map(|&(h, _)| [-h, h]).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// An arbitrary function offered as a capitalization factor, with no
/// guarantee that it satisfies the axioms. Derivatives are central
/// differences.
#[derive(Clone)]
pub struct CandidateFactor<F> {
    f: F,
}

impl<F: Fn(f64) -> f64> CandidateFactor<F> {
    pub fn new(f: F) -> Self {
        CandidateFactor { f }
    }
}

impl<F: Fn(f64) -> f64> Capitalization for CandidateFactor<F> {
    fn factor(&self, h: f64) -> Result<f64> {
        Ok((self.f)(h))
    }

    fn derivative(&self, h: f64) -> Result<f64> {
        central_difference(h, |x| self.factor(x))
    }

    fn derivative_mode(&self) -> DerivativeMode {
        DerivativeMode::FiniteDifference
    }
}

/// Simple interest `f(h) = 1 + r h`. It is not a capitalization factor for
/// `r != 0` (reciprocity fails and positivity fails for `h < -1/r`); it is
/// kept as the standard counterexample for the validator.
pub fn simple_interest(rate: f64) -> CandidateFactor<impl Fn(f64) -> f64 + Clone> {
    CandidateFactor::new(move |h| 1.0 + rate * h)
}

/// Checks the factor axioms on `grid` mirrored around zero: `f(0) = 1`,
/// positivity, `|f(h) f(-h) - 1| <= tol_recip`, and a finite derivative.
///
/// Violations, including range errors, are reported as failed checks.
pub fn validate_factor<C: Capitalization + ?Sized>(
    factor: &C,
    grid: &[f64],
    tol_recip: f64,
) -> AxiomReport {
    let mut points: Vec<f64> = grid
        .iter()
        .flat_map(|&h| [h.abs(), -h.abs()])
        .chain([0.0])
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut notes = Vec::new();
    let unit = match factor.factor(0.0) {
        Ok(v) => (v - 1.0).abs(),
        Err(e) => {
            notes.push(format!("f(0): {e}"));
            f64::INFINITY
        }
    };
    if unit.is_nan() {
        notes.push("f(0) is NaN".into());
    }

    let mut non_positive = 0usize;
    let mut recip = 0.0f64;
    let mut bad_derivative = 0usize;
    for &h in &points {
        match factor.factor(h) {
            Ok(v) if v > 0.0 && v.is_finite() => {}
            Ok(v) => {
                non_positive += 1;
                notes.push(format!("f({h}) = {v} is not positive and finite"));
            }
            Err(e) => {
                non_positive += 1;
                notes.push(format!("f({h}): {e}"));
            }
        }
        if h > 0.0 {
            let r = match (factor.factor(h), factor.factor(-h)) {
                (Ok(a), Ok(b)) => (a * b - 1.0).abs(),
                _ => f64::INFINITY,
            };
            recip = recip.max(if r.is_nan() { f64::INFINITY } else { r });
        }
        match factor.derivative(h) {
            Ok(d) if d.is_finite() => {}
            _ => bad_derivative += 1,
        }
    }

    let kinks = factor.kinks();
    if !kinks.is_empty() {
        notes.push(format!(
            "piecewise C1 only: derivative jumps at h = {:?}",
            kinks
        ));
    }

    let n = points.len();
    let checks = vec![
        Check::upper(
            "unit_at_zero",
            1,
            if unit.is_nan() { f64::INFINITY } else { unit },
            tol_recip,
        ),
        Check::upper("positivity", n, non_positive as f64, 0.0),
        Check::upper(
            "reciprocity",
            points.iter().filter(|h| **h > 0.0).count(),
            recip,
            tol_recip,
        ),
        Check::upper("derivative_finite", n, bad_derivative as f64, 0.0),
    ];
    AxiomReport::from_checks(FACTOR_AXIOMS_LAW, None, checks, notes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp05() -> CapFactor {
        CapFactor::exponential(0.05).unwrap()
    }

    fn poly() -> CapFactor {
        CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap()
    }

    fn tab() -> CapFactor {
        CapFactor::tabulated_odd_exp(vec![(1.0, 0.04), (2.0, 0.1), (5.0, 0.2)]).unwrap()
    }

    fn fd(f: &CapFactor, h: f64) -> f64 {
        central_difference(h, |x| f.factor(x)).unwrap()
    }

    #[test]
    fn eval_factor_examples() {
        assert_eq!(exp05().factor(0.0).unwrap(), 1.0);
        // e^{0.1}
        assert!((exp05().factor(2.0).unwrap() - 1.1051709180756477).abs() < 1e-15);
        // g(-2) = -0.1 - 0.008
        let v = poly().factor(-2.0).unwrap();
        assert!((v - (-0.108f64).exp()).abs() < 1e-15);
        assert!((v - 0.897627).abs() < 1e-6);
    }

    #[test]
    fn eval_derivative_examples() {
        let d0 = exp05().derivative(0.0).unwrap();
        assert_eq!(d0, 0.05);
        assert!((d0 - fd(&exp05(), 0.0)).abs() < 1e-9);

        let flat = CapFactor::exponential(0.0).unwrap();
        for h in [-3.0, 0.0, 7.5] {
            assert_eq!(flat.derivative(h).unwrap(), 0.0);
        }

        // (0.05 + 3*0.001) e^{0.051}; the central-difference oracle gives 0.0557733...
        let d1 = poly().derivative(1.0).unwrap();
        let oracle = fd(&poly(), 1.0);
        assert!((d1 - oracle).abs() < 1e-9, "{d1} vs {oracle}");
        assert!((d1 - 0.055773).abs() < 1e-6, "{d1}");
    }

    #[test]
    fn force_of_interest_examples() {
        assert_eq!(exp05().force_of_interest(7.0).unwrap(), 0.05);
        assert_eq!(
            CapFactor::exponential(0.0)
                .unwrap()
                .force_of_interest(3.0)
                .unwrap(),
            0.0
        );
        let d = poly().force_of_interest(2.0).unwrap();
        assert!((d - 0.062).abs() < 1e-15);
        let quotient = fd(&poly(), 2.0) / poly().factor(2.0).unwrap();
        assert!((d - quotient).abs() < 1e-8);
    }

    #[test]
    fn finite_difference_mode_tracks_analytic() {
        let analytic = poly();
        let numeric = poly().with_derivative_mode(DerivativeMode::FiniteDifference);
        assert_eq!(numeric.derivative_mode(), DerivativeMode::FiniteDifference);
        for h in [-4.0, -0.3, 0.0, 1.0, 6.0] {
            let (a, n) = (
                analytic.derivative(h).unwrap(),
                numeric.derivative(h).unwrap(),
            );
            assert!((a - n).abs() <= 1e-6 * a.abs().max(1.0));
        }
    }

    #[test]
    fn tabulated_interpolates_and_extends_oddly() {
        let f = tab();
        assert_eq!(f.exponent(0.0).unwrap(), 0.0);
        assert!((f.exponent(0.5).unwrap() - 0.02).abs() < 1e-15);
        assert!((f.exponent(1.5).unwrap() - 0.07).abs() < 1e-15);
        assert!((f.exponent(-1.5).unwrap() + 0.07).abs() < 1e-15);
        // past the last sample the slope (0.2 - 0.1) / 3 continues
        assert!((f.exponent(8.0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(
            f.exponent_slope(-1.5).unwrap(),
            f.exponent_slope(1.5).unwrap()
        );
        assert_eq!(f.kinks(), vec![-1.0, 1.0, -2.0, 2.0]);
    }

    #[test]
    fn ratio_cancels_in_exponent_space() {
        let f = exp05();
        assert_eq!(f.ratio(&[-2.0, -1.0, 3.0], &[]).unwrap(), 1.0);
        assert_eq!(f.ratio(&[1.7], &[1.7]).unwrap(), 1.0);
        let p = poly();
        let literal = p.factor(2.0).unwrap() * p.factor(-0.5).unwrap() / p.factor(1.0).unwrap();
        assert!((p.ratio(&[2.0, -0.5], &[1.0]).unwrap() - literal).abs() < 1e-15);
        let steep = CapFactor::exponential(1.0).unwrap();
        assert!(matches!(
            steep.ratio(&[600.0, 600.0], &[]),
            Err(Error::Range { .. })
        ));
        let simple = simple_interest(0.05);
        assert_eq!(simple.ratio(&[1.0], &[-1.0]).unwrap(), 1.05 / 0.95);
    }

    #[test]
    fn range_errors() {
        let f = CapFactor::exponential(1.0).unwrap();
        assert!(f.factor(700.0).is_ok());
        assert!(matches!(f.factor(700.5), Err(Error::Range { .. })));
        assert!(matches!(f.factor(-701.0), Err(Error::Range { .. })));
        assert!(matches!(f.factor(f64::NAN), Err(Error::Range { .. })));
        assert!(matches!(
            f.derivative(f64::INFINITY),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn spec_parsing() {
        let e = CapFactor::from_json(r#"{"kind":"exponential","delta":0.05}"#).unwrap();
        assert_eq!(e, exp05());
        let p = CapFactor::from_json(r#"{"kind":"odd_poly_exp","coeffs":[0.05,0.001]}"#).unwrap();
        assert_eq!(p, poly());
        let t = CapFactor::from_json(
            r#"{"kind":"tabulated_odd_exp","samples":[[1,0.04],[2,0.1],[5,0.2]]}"#,
        )
        .unwrap();
        assert_eq!(t, tab());
        let fdm = CapFactor::from_json(
            r#"{"kind":"exponential","delta":0.05,"derivative_mode":"finite_difference"}"#,
        )
        .unwrap();
        assert_eq!(fdm.derivative_mode(), DerivativeMode::FiniteDifference);
        for text in [t.to_json(), fdm.to_json()] {
            assert_eq!(CapFactor::from_json(&text).unwrap().to_json(), text);
        }
    }

    #[test]
    fn spec_rejections() {
        for bad in [
            r#"{"kind":"linear","delta":0.05}"#,
            r#"{"kind":"exponential","delta":0.05,"rate":1}"#,
            r#"{"kind":"exponential"}"#,
            r#"{"kind":"tabulated_odd_exp","samples":[]}"#,
            r#"{"kind":"tabulated_odd_exp","samples":[[1,0.1],[1,0.2]]}"#,
            r#"{"kind":"tabulated_odd_exp","samples":[[2,0.1],[1,0.2]]}"#,
            r#"{"kind":"tabulated_odd_exp","samples":[[0,0.0],[1,0.2]]}"#,
            r#"not json"#,
        ] {
            assert!(
                matches!(CapFactor::from_json(bad), Err(Error::InvalidFactor(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn validate_exponential_passes() {
        let report = validate_factor(&exp05(), &[0.5, 1.0, 2.0, 5.0], 1e-12);
        assert!(report.passed, "{report:?}");
        assert!(report.check("reciprocity").unwrap().max_residual <= 1e-15);
    }

    #[test]
    fn validate_rejects_simple_interest() {
        let report = validate_factor(&simple_interest(0.05), &DEFAULT_GRID, DEFAULT_TOL_RECIP);
        assert!(!report.passed);
        let f = simple_interest(0.05);
        // 1.05 * 0.95
        assert!((f.factor(1.0).unwrap() * f.factor(-1.0).unwrap() - 0.9975).abs() < 1e-15);
        assert!(report.check("reciprocity").unwrap().max_residual >= 0.0025);
        // f(-25) = -0.25
        assert!(!report.check("positivity").unwrap().passed);
    }

    #[test]
    fn validate_constant_factor_has_zero_residuals() {
        let report = validate_factor(
            &CapFactor::exponential(0.0).unwrap(),
            &DEFAULT_GRID,
            DEFAULT_TOL_RECIP,
        );
        assert!(report.passed);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn validate_flags_tabulated_kinks() {
        let report = validate_factor(&tab(), &DEFAULT_GRID, DEFAULT_TOL_RECIP);
        assert!(report.passed);
        assert!(report.notes.iter().any(|n| n.contains("piecewise")));
    }

    #[test]
    fn validate_reports_range_errors_as_failures() {
        let steep = CapFactor::exponential(100.0).unwrap();
        let report = validate_factor(&steep, &DEFAULT_GRID, DEFAULT_TOL_RECIP);
        assert!(!report.passed);
    }

    fn builtin() -> impl Strategy<Value = CapFactor> {
        prop_oneof![
            (-0.3..0.3f64).prop_map(|d| CapFactor::exponential(d).unwrap()),
            (-0.1..0.1f64, -0.002..0.002f64)
                .prop_map(|(a, b)| CapFactor::odd_poly_exp(vec![a, b]).unwrap()),
            Just(tab()),
        ]
    }

    proptest! {
        #[test]
        fn reciprocity_and_positivity(f in builtin(), h in -50.0..50.0f64) {
            let (a, b) = (f.factor(h).unwrap(), f.factor(-h).unwrap());
            prop_assert!(a > 0.0 && b > 0.0);
            prop_assert!((a * b - 1.0).abs() <= 1e-12);
            prop_assert_eq!(f.factor(0.0).unwrap(), 1.0);
        }

        #[test]
        fn force_of_interest_identity(f in builtin(), h in -50.0..50.0f64) {
            let lhs = f.force_of_interest(h).unwrap() * f.factor(h).unwrap();
            let rhs = f.derivative(h).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(f64::MIN_POSITIVE), "{} {}", lhs, rhs);
        }

        #[test]
        fn analytic_derivative_matches_central_difference(
            a in -0.1..0.1f64, b in -0.002..0.002f64, h in -50.0..50.0f64
        ) {
            let f = CapFactor::odd_poly_exp(vec![a, b]).unwrap();
            let d = f.derivative(h).unwrap();
            prop_assert!((d - fd(&f, h)).abs() <= 1e-6 * d.abs().max(1.0));
        }
    }
}
