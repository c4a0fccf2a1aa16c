//! Small numerical helpers shared by the factor, algebra and verification code.

/// Relative step used by every central difference in the crate.
pub const FD_REL_STEP: f64 = 1e-6;

/// Central-difference step at `x`: `1e-6 * max(1, |x|)`.
pub fn fd_step(x: f64) -> f64 {
    FD_REL_STEP * x.abs().max(1.0)
}

/// `(g(x + s) - g(x - s)) / 2s` with `s = fd_step(x)`.
pub fn central_difference<G, E>(x: f64, mut g: G) -> Result<f64, E>
where
    G: FnMut(f64) -> Result<f64, E>,
{
    let s = fd_step(x);
    let (xp, xm) = (x + s, x - s);
    Ok((g(xp)? - g(xm)?) / (xp - xm))
}

/// Mixed absolute/relative error: `|actual - expected| / max(1, |expected|)`.
/// NaN on either side maps to infinity so it can never pass a tolerance.
pub fn scaled_error(actual: f64, expected: f64) -> f64 {
    let d = (actual - expected).abs() / expected.abs().max(1.0);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Componentwise maximum of [`scaled_error`].
pub fn max_scaled_error<const N: usize>(actual: [f64; N], expected: [f64; N]) -> f64 {
    actual
        .iter()
        .zip(expected.iter())
        .map(|(&a, &e)| scaled_error(a, e))
        .fold(0.0, f64::max)
}

/// Error of a finite-difference estimate, measured against the larger of
/// the derivative itself, the function value it was taken from, and 1.
///
/// A central difference carries rounding noise proportional to the function
/// value divided by the step, so derivatives that vanish while the function
/// is large are compared on the function's scale.
pub fn fd_error(analytic: f64, numeric: f64, value: f64) -> f64 {
    let scale = analytic.abs().max(value.abs()).max(1.0);
    let d = (analytic - numeric).abs() / scale;
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Number of representable doubles between `a` and `b` (0 when bitwise equal
/// or both zero).
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.is_nan() || b.is_nan() {
        return u64::MAX;
    }
    // map to a monotone integer line
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_of_cubic() {
        let d = central_difference(2.0, |x| Ok::<_, ()>(x * x * x)).unwrap();
        assert!((d - 12.0).abs() < 1e-8);
    }

    #[test]
    fn scaled_error_switches_scale_at_one() {
        assert_eq!(scaled_error(0.5, 0.25), 0.25);
        assert_eq!(scaled_error(110.0, 100.0), 0.1);
        assert_eq!(scaled_error(f64::NAN, 1.0), f64::INFINITY);
    }

    #[test]
    fn ulps() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(0.0, -0.0), 0);
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 1)), 1);
        assert_eq!(
            ulp_distance(-1.0, f64::from_bits((-1.0f64).to_bits() + 2)),
            2
        );
        let tiny = f64::from_bits(1);
        assert_eq!(ulp_distance(tiny, -tiny), 2);
    }
}
