//! Small special functions needed by the integrands.

/// Modified Bessel function I₀(x) from its power series.
///
/// All terms are positive, so the series is free of cancellation; it is
/// used for arguments up to a few tens, which is all the angular reduction
/// `∫₀^{2π} cosh(c·sin φ) dφ = 2π·I₀(c)` ever needs.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
        k += 1.0;
    }
    sum
}

/// sin(x)/x, with the removable point handled by its Taylor series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i0_reference_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i0(5.0) / 27.239_871_823_604_442 - 1.0).abs() < 1e-14);
        assert!((bessel_i0(-2.0) - 2.279_585_302_336_067_3).abs() < 1e-14);
    }

    #[test]
    fn sinc_is_continuous_across_switch() {
        let a = sinc(0.99999e-4);
        let b = sinc(1.00001e-4);
        assert!((a - b).abs() < 1e-12);
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(std::f64::consts::PI)).abs() < 1e-16);
    }
}
