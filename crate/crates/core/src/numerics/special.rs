//! Special functions.

/// `e^z E1(z)` for `z >= 1`, by the Lentz continued fraction.
pub fn scaled_e1(z: f64) -> f64 {
    debug_assert!(z >= 1.0);
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `int_0^w exp(-1/u) du` for `w` in `(0, 1]`.
pub fn flat_integral(w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let z = 1.0 / w;
    if z > 745.0 {
        return 0.0;
    }
    (-z).exp() * (w - scaled_e1(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::{integrate, QuadOptions};

    #[test]
    fn e1_reference_values() {
        // E1(1) = 0.21938393439552027, E1(5) = 0.001148295591275326
        assert!((scaled_e1(1.0) * (-1.0f64).exp() - 0.219_383_934_395_520_27).abs() < 1e-15);
        assert!((scaled_e1(5.0) * (-5.0f64).exp() - 0.001_148_295_591_275_326).abs() < 1e-17);
    }

    #[test]
    fn flat_integral_matches_quadrature() {
        for &w in &[1.0, 0.7, 0.3, 0.1, 0.02] {
            let q = integrate(|u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 }, 0.0, w, &QuadOptions::default());
            assert!((flat_integral(w) - q).abs() < 1e-15 + 1e-12 * q, "w={w}");
        }
    }
}
