//! The bilinear symbol b(ξ, ζ) and its depth-scaled form.

use crate::spectral_ops::Depth;

/// ln(sinh x / x), finite for all x.
fn ln_sinhc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        if a == 0.0 {
            0.0
        } else {
            (a.sinh() / a).ln()
        }
    } else {
        a - std::f64::consts::LN_2 + (-(-2.0 * a).exp()).ln_1p() - a.ln()
    }
}

/// b(ξ,ζ) = ξζ (cosh 2ξ − cosh 2ζ) / (sinh 2ξ sinh 2ζ (ξ+ζ)(ξ−ζ)), written as
/// sinhc(ξ+ζ) sinhc(ξ−ζ) / (2 sinhc(2ξ) sinhc(2ζ)) with sinhc x = sinh x / x.
/// Positive, even in each variable and symmetric; b(0,0) = 1/2.
pub fn symbol_b(xi: f64, zeta: f64) -> f64 {
    let (xi, zeta) = (xi.abs().max(zeta.abs()), xi.abs().min(zeta.abs()));
    let e = ln_sinhc(xi + zeta) + ln_sinhc(xi - zeta) - ln_sinhc(2.0 * xi) - ln_sinhc(2.0 * zeta);
    0.5 * e.exp()
}

/// b^h(ξ,ζ) = b(hξ, hζ). At infinite depth only the zero pair survives.
pub fn symbol_bh(xi: f64, zeta: f64, depth: Depth) -> f64 {
    match depth {
        Depth::Finite(h) => symbol_b(h * xi, h * zeta),
        Depth::Infinite => {
            if xi == 0.0 && zeta == 0.0 {
                0.5
            } else {
                0.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn special_values() {
        assert_eq!(symbol_b(0.0, 0.0), 0.5);
        assert!((symbol_b(1.0, 1.0) - 1.0 / 2f64.sinh()).abs() < 1e-15);
        // direct quotient away from the removable set
        let (x, z) = (0.7f64, 1.9f64);
        let direct = x * z * ((2.0 * x).cosh() - (2.0 * z).cosh()) / ((2.0 * x).sinh() * (2.0 * z).sinh() * (x + z) * (x - z));
        assert!((symbol_b(x, z) - direct).abs() < 1e-14);
        assert_eq!(symbol_bh(0.0, 0.0, Depth::Infinite), 0.5);
        assert_eq!(symbol_bh(1.0, 0.0, Depth::Infinite), 0.0);
    }

    #[test]
    fn expansion_near_zero_frequency() {
        // b(ξ,ζ) = (1/|ζ|)(ξ/sinh 2ξ) + O(|ζ|^{−3})
        let xi = 0.3f64;
        for z in [10.0f64, 20.0, 40.0] {
            let lead = xi / (2.0 * xi).sinh() / z;
            let err = (symbol_b(xi, z) - lead).abs();
            assert!(err * z.powi(3) < 0.1, "ζ = {z}: {err:e}");
        }
    }

    #[test]
    fn decays_off_the_axes() {
        for &(x, z) in &[(3.0f64, 4.0f64), (5.0, 9.0), (10.0, 10.0), (0.5, 30.0)] {
            let bound = (1.0 + x + z).recip() * (-0.9 * f64::min(x, z)).exp();
            assert!(symbol_b(x, z) <= bound, "({x},{z})");
        }
    }

    proptest! {
        #[test]
        fn scaling_symmetry_and_evenness(x in -8.0f64..8.0, z in -8.0f64..8.0, h in 0.1f64..4.0) {
            let b = symbol_b(h * x, h * z);
            prop_assert!((symbol_bh(x, z, Depth::Finite(h)) - b).abs() <= 1e-12 * b.abs().max(1e-300));
            prop_assert_eq!(symbol_b(x, z), symbol_b(z, x));
            prop_assert_eq!(symbol_b(-x, z), symbol_b(x, z));
            prop_assert!(symbol_b(x, z) > 0.0);
        }
    }
}
