use crate::domain::NoiseSource;
use crate::error::{config, Result};

/// One draw from Laplace(0, `scale`) by inverting the CDF at a uniform draw.
pub fn laplace(scale: f64, noise: &mut NoiseSource) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(config(format!("Laplace scale must be positive and finite, got {scale}")));
    }
    let u = noise.uniform() - 0.5;
    if u == 0.0 {
        return Ok(0.0);
    }
    Ok(-scale * u.signum() * (1.0 - 2.0 * u.abs()).ln())
}

/// Laplace(0, `scale`) CDF.
pub fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_draws() {
        assert_eq!(laplace(3.0, &mut NoiseSource::zero()).unwrap(), 0.0);
        assert_eq!(laplace(3.0, &mut NoiseSource::scripted([0.5])).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(laplace(0.0, &mut NoiseSource::zero()).is_err());
        assert!(laplace(-1.0, &mut NoiseSource::zero()).is_err());
    }

    #[test]
    fn inverse_cdf_round_trip() {
        for u in [0.01, 0.2, 0.5, 0.7, 0.99] {
            let x = laplace(2.0, &mut NoiseSource::scripted([u])).unwrap();
            assert!((laplace_cdf(x, 2.0) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_and_ks() {
        let b = 1.5;
        let mut noise = NoiseSource::seeded(11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| laplace(b, &mut noise).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / (2.0 * b * b) - 1.0).abs() < 0.05, "variance {var}");
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = laplace_cdf(*x, b);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS statistic {ks}");
    }
}
