use statrs::function::{erf, gamma};

use crate::error::{domain, Result};

/// Upper tail of the chi-square distribution, `Q(df/2, x/2)`.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64> {
    if df == 0 {
        return Err(domain("chi-square needs df >= 1"));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("chi-square statistic must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma::gamma_ur(f64::from(df) / 2.0, x / 2.0).clamp(0.0, 1.0))
}

/// Upper tail of the standard normal distribution.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erf::erfc(z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_closed_forms() {
        assert_eq!(chi_square_sf(0.0, 3).unwrap(), 1.0);
        assert!((chi_square_sf(2.0, 2).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        let mut x = 0.0;
        while x <= 200.0 {
            let p = chi_square_sf(x, 2).unwrap();
            assert!((p - (-x / 2.0).exp()).abs() < 1e-10, "x={x}");
            x += 0.37;
        }
        // df = 1: Q = 2·Φ̄(√x)
        for x in [0.1, 1.0, 3.84, 10.0, 40.0] {
            let p = chi_square_sf(x, 1).unwrap();
            assert!((p - 2.0 * normal_sf(f64::sqrt(x))).abs() < 1e-10, "x={x}");
        }
        // df = 4: Q = e^{-x/2}(1 + x/2)
        for x in [0.5, 5.0, 20.0, 90.0] {
            let p = chi_square_sf(x, 4).unwrap();
            assert!((p - (-x / 2.0f64).exp() * (1.0 + x / 2.0)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn chi_square_deep_tail() {
        let p = chi_square_sf(200.0, 8).unwrap();
        assert!((0.0..1e-30).contains(&p));
    }

    #[test]
    fn chi_square_non_increasing() {
        for df in 1..=12 {
            let mut prev = 1.0;
            for i in 0..400 {
                let p = chi_square_sf(f64::from(i) * 0.5, df).unwrap();
                assert!(p <= prev + 1e-15, "df={df} i={i}");
                prev = p;
            }
        }
    }

    #[test]
    fn chi_square_domain() {
        assert!(chi_square_sf(1.0, 0).is_err());
        assert!(chi_square_sf(-1.0, 2).is_err());
        assert!(chi_square_sf(f64::NAN, 2).is_err());
    }

    #[test]
    fn normal_tail() {
        assert_eq!(normal_sf(0.0), 0.5);
        assert!((normal_sf(1.959964) - 0.025).abs() < 1e-6);
        for i in -80..=80 {
            let z = f64::from(i) * 0.1;
            assert!((normal_sf(z) + normal_sf(-z) - 1.0).abs() < 1e-15);
        }
    }
}
