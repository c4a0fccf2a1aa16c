//! Evolution curves and exponential maps.
//!
//! The evolution of `e0 = (t0, h0, c0)` is the curve
//! `μ(t) = (t, h0 + t - t0, c0 f(-h0) f(h0 + t - t0))`. It is a homomorphism
//! from the translated time line `(ℝ, +_t0)` into the events under the
//! product centered at `e0`, with tangent `(1, 1, c0 δ_f(h0))` at `t0`, so it
//! is the exponential map of that translated group. For `e0 = o` this is the
//! one-parameter group `t ↦ (t, t, f(t))`.

use serde::{Deserialize, Serialize};

use crate::algebra::f_product;
use crate::capfactor::{CapFactor, Capitalization, DerivativeMode};
use crate::error::{Error, Result};
use crate::events::Event;
use crate::numeric::max_scaled_error;

/// A tangent direction `(dt, dh, dc)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub dt: f64,
    pub dh: f64,
    pub dc: f64,
}

impl Direction {
    pub const fn new(dt: f64, dh: f64, dc: f64) -> Self {
        Direction { dt, dh, dc }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.dt, self.dh, self.dc]
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.dt, self.dh, self.dc)
    }
}

/// A tangent vector at an event. `source` records whether the capital slot
/// came from the analytic derivative of the factor or a central difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub at: Event,
    pub direction: Direction,
    pub source: DerivativeMode,
}

/// The real line with the translated addition `t +_t0 t' = t + t' - t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslatedTimeLine {
    pub t0: f64,
}

impl TranslatedTimeLine {
    pub fn new(t0: f64) -> Self {
        TranslatedTimeLine { t0 }
    }

    pub fn add(&self, t: f64, t2: f64) -> f64 {
        t + t2 - self.t0
    }

    /// Inverse of `t`: `2 t0 - t`.
    pub fn neg(&self, t: f64) -> f64 {
        2.0 * self.t0 - t
    }

    pub fn neutral(&self) -> f64 {
        self.t0
    }
}

/// Evolution curve of a base event under a factor.
///
/// The curve passes through `base` at parameter `anchor`, which is the base
/// event's reference time unless set otherwise; for a different anchor the
/// curve is `t ↦ μ_o(t - anchor) · base`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionCurve<F = CapFactor> {
    base: Event,
    anchor: f64,
    factor: F,
}

impl<F: Capitalization> EvolutionCurve<F> {
    pub fn new(base: Event, factor: F) -> Self {
        EvolutionCurve {
            anchor: base.t,
            base,
            factor,
        }
    }

    /// The curve of the unit event, `t ↦ (t, t, f(t))`.
    pub fn unit(factor: F) -> Self {
        Self::new(Event::UNIT, factor)
    }

    pub fn with_anchor(mut self, anchor: f64) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn base(&self) -> Event {
        self.base
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn factor(&self) -> &F {
        &self.factor
    }

    pub fn time_line(&self) -> TranslatedTimeLine {
        TranslatedTimeLine::new(self.anchor)
    }

    /// `μ(t)`. The capital is computed as `c0 f(h)/f(h0)`, which equals
    /// `c0 f(-h0) f(h)` and returns `base` bitwise at `t = anchor`.
    pub fn evolve(&self, t: f64) -> Result<Event> {
        let d = t - self.anchor;
        let h = self.base.h + d;
        let growth = self.factor.ratio(&[h], &[self.base.h])?;
        let reference = if self.anchor == self.base.t {
            t
        } else {
            self.base.t + d
        };
        Ok(Event::new(reference, h, self.base.c * growth))
    }

    /// `M(t) = c0 f(h0 + t - t0) / f(h0)`.
    pub fn capital_evolution(&self, t: f64) -> Result<f64> {
        self.evolve(t).map(|e| e.c)
    }

    /// `μ'(t) = (1, 1, c0 f'(h0 + t - t0) / f(h0))`, written as
    /// `c0 δ_f(h) f(h)/f(h0)` so that it is exactly `c0 δ_f(h0)` at the anchor.
    pub fn tangent(&self, t: f64) -> Result<TangentVector> {
        let at = self.evolve(t)?;
        let growth = self.factor.ratio(&[at.h], &[self.base.h])?;
        let dc = self.base.c * self.factor.force_of_interest(at.h)? * growth;
        Ok(TangentVector {
            at,
            direction: Direction::new(1.0, 1.0, dc),
            source: self.factor.derivative_mode(),
        })
    }
}

/// `μ_o(t - t0) · e0`: the unit evolution translated in time by `t0` and in
/// the event group by `e0`.
pub fn double_translate_unit<F: Capitalization + ?Sized>(
    f: &F,
    e0: &Event,
    t: f64,
) -> Result<Event> {
    let s = t - e0.t;
    let unit = Event::new(s, s, f.factor(s)?);
    f_product(f, &unit, e0)
}

/// The exponential map at `(t0, e0)`: the evolution curve through `e0` at
/// `t0`, paired with its tangent `(1, 1, c0 δ_f(h0))` at `e0`.
pub fn exp_map<F: Capitalization>(
    f: F,
    t0: f64,
    e0: Event,
) -> Result<(EvolutionCurve<F>, TangentVector)> {
    if !e0.is_invertible() {
        return Err(Error::NotInvertible(e0));
    }
    let curve = EvolutionCurve::new(e0, f).with_anchor(t0);
    let tangent = curve.tangent(t0)?;
    Ok((curve, tangent))
}

/// The exponential map for a prescribed tangent direction. Only the
/// direction the evolution curve realizes, `(1, 1, c0 δ_f(h0))`, is
/// supported.
pub fn exp_map_with_direction<F: Capitalization>(
    f: F,
    t0: f64,
    e0: Event,
    direction: Direction,
) -> Result<EvolutionCurve<F>> {
    let (curve, tangent) = exp_map(f, t0, e0)?;
    if max_scaled_error(direction.to_array(), tangent.direction.to_array()) > 1e-12 {
        return Err(Error::UnsupportedTangent {
            dt: direction.dt,
            dh: direction.dh,
            dc: direction.dc,
        });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::centered_product;
    use crate::numeric::{central_difference, fd_error};

    fn exp05() -> CapFactor {
        CapFactor::exponential(0.05).unwrap()
    }

    fn close(a: Event, b: Event) -> bool {
        max_scaled_error(a.to_array(), b.to_array()) <= 1e-9 + 1e-12
    }

    #[test]
    fn evolve_examples() {
        let unit = EvolutionCurve::unit(exp05());
        let p = unit.evolve(2.0).unwrap();
        assert_eq!((p.t, p.h), (2.0, 2.0));
        assert!((p.c - 1.1051709180756477).abs() < 1e-15);

        let curve = EvolutionCurve::new(Event::new(1.0, 2.0, 100.0), exp05());
        let q = curve.evolve(3.0).unwrap();
        assert!(close(q, Event::new(3.0, 4.0, 110.51709180756477)), "{q}");
        assert_eq!(curve.evolve(1.0).unwrap(), curve.base());
    }

    #[test]
    fn base_point_is_exact_for_awkward_values() {
        let f = CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap();
        for base in [Event::new(0.1, 0.7, 3.3), Event::new(-7.3, 13.1, -0.017)] {
            let curve = EvolutionCurve::new(base, &f);
            assert_eq!(curve.evolve(base.t).unwrap(), base);
        }
    }

    #[test]
    fn capital_evolution_examples() {
        let curve = EvolutionCurve::new(Event::new(1.0, 2.0, 100.0), exp05());
        assert_eq!(curve.capital_evolution(1.0).unwrap(), 100.0);
        assert!((curve.capital_evolution(3.0).unwrap() - 110.51709180756477).abs() < 1e-12);
        let debt = EvolutionCurve::new(Event::NEG_UNIT, exp05());
        assert!((debt.capital_evolution(1.0).unwrap() + 1.0512710963760241).abs() < 1e-15);
    }

    #[test]
    fn tangent_examples() {
        let curve = EvolutionCurve::new(Event::new(1.0, 2.0, 100.0), exp05());
        let v = curve.tangent(1.0).unwrap();
        assert_eq!(v.direction, Direction::new(1.0, 1.0, 5.0));
        assert_eq!(v.at, curve.base());
        let fd = central_difference(1.0, |t| curve.capital_evolution(t)).unwrap();
        assert!((fd - 5.0).abs() < 1e-6);

        let unit = EvolutionCurve::unit(exp05());
        assert_eq!(
            unit.tangent(0.0).unwrap().direction,
            Direction::new(1.0, 1.0, 0.05)
        );

        let flat = EvolutionCurve::unit(CapFactor::exponential(0.0).unwrap());
        for t in [-5.0, 0.0, 12.0] {
            assert_eq!(
                flat.tangent(t).unwrap().direction,
                Direction::new(1.0, 1.0, 0.0)
            );
        }
    }

    #[test]
    fn tangent_reports_derivative_source() {
        let f = exp05().with_derivative_mode(DerivativeMode::FiniteDifference);
        let v = EvolutionCurve::unit(f).tangent(0.0).unwrap();
        assert_eq!(v.source, DerivativeMode::FiniteDifference);
        assert!((v.direction.dc - 0.05).abs() < 1e-9);
    }

    #[test]
    fn tangent_matches_finite_differences_away_from_anchor() {
        let f = CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap();
        let curve = EvolutionCurve::new(Event::new(0.5, -1.5, 20.0), &f);
        for t in [-10.0, -1.0, 3.0, 12.0] {
            let v = curve.tangent(t).unwrap();
            let fd = central_difference(t, |s| curve.capital_evolution(s)).unwrap();
            let value = curve.capital_evolution(t).unwrap();
            assert!(fd_error(v.direction.dc, fd, value) < 1e-6);
        }
    }

    #[test]
    fn translated_line() {
        let line = TranslatedTimeLine::new(2.0);
        assert_eq!(line.add(5.0, 7.0), 10.0);
        assert_eq!(line.add(5.0, line.neutral()), 5.0);
        assert_eq!(line.neg(5.0), -1.0);
        assert_eq!(line.add(5.0, line.neg(5.0)), 2.0);
    }

    #[test]
    fn double_translation_examples() {
        let f = exp05();
        let e0 = Event::new(1.0, 2.0, 100.0);
        assert!(close(double_translate_unit(&f, &e0, 1.0).unwrap(), e0));
        let p = double_translate_unit(&f, &e0, 3.0).unwrap();
        assert!(close(p, Event::new(3.0, 4.0, 110.51709180756477)));
        let unit = EvolutionCurve::unit(&f);
        for t in [-4.0, 0.5, 9.0] {
            assert!(close(
                double_translate_unit(&f, &Event::UNIT, t).unwrap(),
                unit.evolve(t).unwrap()
            ));
        }
    }

    #[test]
    fn exp_map_examples() {
        let (curve, v) = exp_map(exp05(), 0.0, Event::UNIT).unwrap();
        assert_eq!(v.direction, Direction::new(1.0, 1.0, 0.05));
        assert_eq!(curve.base(), Event::UNIT);

        let (_, v) = exp_map(exp05(), 1.0, Event::new(1.0, 2.0, 100.0)).unwrap();
        assert_eq!(v.direction, Direction::new(1.0, 1.0, 5.0));

        assert!(matches!(
            exp_map(exp05(), 0.0, Event::new(0.0, 0.0, 0.0)),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn exp_map_rejects_other_directions() {
        let e0 = Event::new(1.0, 2.0, 100.0);
        assert!(exp_map_with_direction(exp05(), 1.0, e0, Direction::new(1.0, 1.0, 5.0)).is_ok());
        assert!(matches!(
            exp_map_with_direction(exp05(), 1.0, e0, Direction::new(2.0, 1.0, 5.0)),
            Err(Error::UnsupportedTangent { .. })
        ));
    }

    #[test]
    fn homomorphism_with_shifted_anchor() {
        let f = CapFactor::odd_poly_exp(vec![0.05, 0.001]).unwrap();
        let e0 = Event::new(1.0, 2.0, -3.0);
        let (curve, _) = exp_map(&f, 4.0, e0).unwrap();
        assert_eq!(curve.evolve(4.0).unwrap(), e0);
        let line = curve.time_line();
        for (t, t2) in [(0.0, 1.0), (-3.0, 7.5), (4.0, 4.0)] {
            let lhs = centered_product(
                &f,
                &e0,
                &curve.evolve(t).unwrap(),
                &curve.evolve(t2).unwrap(),
            )
            .unwrap();
            let rhs = curve.evolve(line.add(t, t2)).unwrap();
            assert!(close(lhs, rhs), "{lhs} vs {rhs}");
        }
    }
}
