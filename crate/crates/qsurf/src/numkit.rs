//! Seeded random sampling, 2x2 linear algebra and the chi-square special
//! functions used by every other module.
//!
//! The generator is a SplitMix64 counter stream: the state advances by a
//! fixed odd constant and each output is a bijective mix of the state, so
//! identical seeds replay identical streams on every platform.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

/// Deterministic seeded random number generator (SplitMix64).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rng {
    state: u64,
    /// Spare normal draw from the last Box-Muller pair.
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed,
            spare_normal: None,
        }
    }

    /// Derive an independent sub-stream from this seed and a tag.
    /// Used to give each trained model its own stream.
    pub fn derive(seed: u64, tag: &str) -> Self {
        let mut h = 0xcbf29ce484222325u64; // FNV-1a
        for b in tag.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        Rng::new(seed ^ h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in (0, 1].
    fn next_f64_open_zero(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// One draw from the standard normal distribution (Box-Muller).
pub fn sample_standard_normal(rng: &mut Rng) -> f64 {
    if let Some(z) = rng.spare_normal.take() {
        return z;
    }
    let u1 = rng.next_f64_open_zero();
    let u2 = rng.next_f64();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    rng.spare_normal = Some(r * theta.sin());
    r * theta.cos()
}

/// One draw from the exponential distribution with the given scale (mean).
pub fn sample_exponential(rng: &mut Rng, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponential scale must be positive, got {scale}"
        )));
    }
    let u = rng.next_f64();
    Ok(-scale * (1.0 - u).ln())
}

/// Chi-square CDF: regularized lower incomplete gamma P(dof/2, x/2).
pub fn chi2_cdf(x: f64, dof: u32) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("chi2_cdf needs x >= 0, got {x}")));
    }
    if dof == 0 {
        return Err(Error::InvalidParameter("dof must be positive".into()));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if dof == 2 {
        return Ok(1.0 - (-x / 2.0).exp());
    }
    Ok(gamma_lr(dof as f64 / 2.0, x / 2.0))
}

/// Chi-square inverse CDF. Closed form for dof 2, bisection otherwise.
pub fn chi2_inverse_cdf(tau: f64, dof: u32) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0,1), got {tau}"
        )));
    }
    if dof == 0 {
        return Err(Error::InvalidParameter("dof must be positive".into()));
    }
    if dof == 2 {
        return Ok(-2.0 * (1.0 - tau).ln());
    }
    let mut hi = dof as f64;
    while chi2_cdf(hi, dof)? < tau {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain("chi2_inverse_cdf failed to bracket".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, dof)? < tau {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + hi) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dense 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub m: [[f64; 2]; 2],
}

impl Matrix2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Matrix2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Matrix2::new(a, 0.0, 0.0, d)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Result<Matrix2> {
        let det = self.det();
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(Error::SingularCovariance);
        }
        Ok(Matrix2::new(
            self.m[1][1] / det,
            -self.m[0][1] / det,
            -self.m[1][0] / det,
            self.m[0][0] / det,
        ))
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Quadratic form v^T M v.
    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        let mv = self.mul_vec(v);
        v[0] * mv[0] + v[1] * mv[1]
    }
}

/// Cholesky factor L with L L^T = cov, for symmetric positive definite input.
pub fn cholesky2(cov: &Matrix2) -> Result<Matrix2> {
    let a = cov.m[0][0];
    let b = cov.m[0][1];
    let c = cov.m[1][0];
    let d = cov.m[1][1];
    if (b - c).abs() > 1e-9 * (1.0 + b.abs().max(c.abs())) {
        return Err(Error::NotPositiveDefinite);
    }
    if a <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let l11 = a.sqrt();
    let l21 = c / l11;
    let rem = d - l21 * l21;
    if rem <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(Matrix2::new(l11, 0.0, l21, rem.sqrt()))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erf;

    fn normal_cdf(x: f64) -> f64 {
        0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
    }

    #[test]
    fn normal_moments() {
        let mut rng = Rng::new(42);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_standard_normal(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn normal_determinism() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(
                sample_standard_normal(&mut a).to_bits(),
                sample_standard_normal(&mut b).to_bits()
            );
        }
    }

    #[test]
    fn exponential_mean_scale_4() {
        let mut rng = Rng::new(1);
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| sample_exponential(&mut rng, 4.0).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 4.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn exponential_nonnegative_support() {
        let mut rng = Rng::new(2);
        for _ in 0..10_000 {
            assert!(sample_exponential(&mut rng, 1.0).unwrap() >= 0.0);
        }
    }

    #[test]
    fn exponential_median() {
        let mut rng = Rng::new(3);
        let n = 1_000_000;
        let mut draws: Vec<f64> = (0..n)
            .map(|_| sample_exponential(&mut rng, 2.0).unwrap())
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = draws[n / 2];
        assert!((median - 2.0 * std::f64::consts::LN_2).abs() < 0.01, "median {median}");
    }

    #[test]
    fn exponential_rejects_nonpositive_scale() {
        let mut rng = Rng::new(4);
        assert!(sample_exponential(&mut rng, 0.0).is_err());
        assert!(sample_exponential(&mut rng, -1.0).is_err());
    }

    #[test]
    fn chi2_cdf_values() {
        assert_eq!(chi2_cdf(0.0, 2).unwrap(), 0.0);
        assert!((chi2_cdf(4.60517, 2).unwrap() - 0.9).abs() < 1e-5);
        assert!((chi2_cdf(-2.0 * 0.1f64.ln(), 2).unwrap() - 0.9).abs() < 1e-9);
        assert!(chi2_cdf(-1.0, 2).is_err());
    }

    #[test]
    fn chi2_dof1_matches_normal_identity() {
        for i in 1..50 {
            let x = i as f64 * 0.2;
            let lhs = chi2_cdf(x, 1).unwrap();
            let rhs = 2.0 * normal_cdf(x.sqrt()) - 1.0;
            assert!((lhs - rhs).abs() < 1e-9, "x={x} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn chi2_inverse_closed_forms() {
        assert!((chi2_inverse_cdf(0.9, 2).unwrap() - 4.605170185988091).abs() < 1e-8);
        assert!((chi2_inverse_cdf(0.5, 2).unwrap() - 2.0 * std::f64::consts::LN_2).abs() < 1e-8);
        assert!(chi2_inverse_cdf(0.0, 2).is_err());
        assert!(chi2_inverse_cdf(1.0, 2).is_err());
    }

    #[test]
    fn chi2_inverse_round_trip_and_monotone() {
        for dof in [1u32, 2, 3, 5] {
            let mut prev = 0.0;
            for i in 1..100 {
                let tau = i as f64 / 100.0;
                let x = chi2_inverse_cdf(tau, dof).unwrap();
                assert!(x > prev, "not strictly increasing at tau={tau} dof={dof}");
                prev = x;
                let back = chi2_cdf(x, dof).unwrap();
                assert!((back - tau).abs() < 1e-9, "round trip dof={dof} tau={tau}");
            }
        }
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let l = cholesky2(&Matrix2::identity()).unwrap();
        assert_eq!(l, Matrix2::identity());
        let l = cholesky2(&Matrix2::diag(0.5, 2.0)).unwrap();
        assert!((l.m[0][0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((l.m[1][1] - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = Rng::new(11);
        for _ in 0..100 {
            let a = rng.next_f64() * 2.0 + 0.1;
            let d = rng.next_f64() * 2.0 + 0.1;
            let rho = (rng.next_f64() - 0.5) * 1.8;
            let b = rho * (a * d).sqrt();
            let cov = Matrix2::new(a, b, b, d);
            let l = cholesky2(&cov).unwrap();
            assert_eq!(l.m[0][1], 0.0);
            assert!(l.m[0][0] > 0.0 && l.m[1][1] > 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    let rec: f64 = (0..2).map(|k| l.m[i][k] * l.m[j][k]).sum();
                    assert!((rec - cov.m[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky2(&Matrix2::new(1.0, 2.0, 2.0, 1.0)).is_err());
        assert!(cholesky2(&Matrix2::diag(-1.0, 1.0)).is_err());
    }
}
