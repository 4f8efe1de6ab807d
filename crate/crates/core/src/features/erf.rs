//! Gaussian error function.

/// Error function via the five-term rational approximation of Hastings
/// (Abramowitz & Stegun 7.1.26). Absolute error is at most 1.5e-7 on the
/// whole real line. The approximation is evaluated on `|r|` and the sign
/// restored afterwards, so `erf(-r) == -erf(r)` holds bit-for-bit.
pub fn erf(r: f64) -> f64 {
    const P: f64 = 0.327_591_1;
    const A: [f64; 5] = [0.254_829_592, -0.284_496_736, 1.421_413_741, -1.453_152_027, 1.061_405_429];

    if r == 0.0 {
        return 0.0;
    }
    if r.is_nan() {
        return r;
    }
    let x = r.abs();
    let t = 1.0 / (1.0 + P * x);
    let poly = t * (A[0] + t * (A[1] + t * (A[2] + t * (A[3] + t * A[4]))));
    let y = 1.0 - poly * (-x * x).exp();
    y.copysign(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() <= 1.5e-7);
        assert_eq!(erf(-2.0), -erf(2.0));
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert_eq!(erf(f64::NEG_INFINITY), -1.0);
        assert!(erf(40.0) <= 1.0);
    }
}
