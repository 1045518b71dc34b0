//! Probabilistic-forecast evaluation: reliability coverage, sharpness,
//! directional CRPS with quantile-based CDF reconstruction, and skill.

use crate::directional::{polygon_area, QuantileSurfaceForecast};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nominal levels paired with observed coverage frequencies (Q-Q data).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReliabilityCurve {
    /// (nominal level tau, observed frequency)
    pub points: Vec<(f64, f64)>,
}

/// Coverage probability paired with mean surface area.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpnessCurve {
    /// (coverage probability 1 - alpha, mean area)
    pub points: Vec<(f64, f64)>,
}

/// Fraction of observations whose predicted radius (in their own direction)
/// is at least their observed length. The boundary counts as covered
/// (H(0) = 1).
pub fn coverage(predicted_radii: &[f64], observed_lengths: &[f64]) -> Result<f64> {
    if observed_lengths.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if predicted_radii.len() != observed_lengths.len() {
        return Err(Error::DimensionMismatch {
            expected: observed_lengths.len(),
            got: predicted_radii.len(),
        });
    }
    let hits = predicted_radii
        .iter()
        .zip(observed_lengths)
        .filter(|(r, l)| r >= l)
        .count();
    Ok(hits as f64 / observed_lengths.len() as f64)
}

/// Coverage at every level; `radii_per_level[l][i]` is the radius predicted
/// for sample i at level l, evaluated at the sample's own direction.
pub fn reliability_curve(
    levels: &[f64],
    radii_per_level: &[Vec<f64>],
    observed_lengths: &[f64],
) -> Result<ReliabilityCurve> {
    if radii_per_level.len() != levels.len() {
        return Err(Error::DimensionMismatch {
            expected: levels.len(),
            got: radii_per_level.len(),
        });
    }
    let points = levels
        .iter()
        .zip(radii_per_level)
        .map(|(&tau, radii)| Ok((tau, coverage(radii, observed_lengths)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliabilityCurve { points })
}

/// Mean surface area per coverage probability 1 - alpha. Each alpha must
/// match a trained level exactly; no interpolation.
pub fn sharpness_curve(
    surfaces: &[QuantileSurfaceForecast],
    alphas: &[f64],
) -> Result<SharpnessCurve> {
    if surfaces.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let tau = 1.0 - alpha;
        let idx = surfaces[0].level_index(tau)?;
        let mut mean = 0.0;
        for s in surfaces {
            mean += polygon_area(s, idx)? / surfaces.len() as f64;
        }
        points.push((tau, mean));
    }
    Ok(SharpnessCurve { points })
}

/// Piecewise-linear CDF of the vector length reconstructed from L quantile
/// forecasts: anchored at (0, 0), through (q_l, tau_l), closed by a jump to
/// probability 1 at the top quantile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionalCdf {
    /// (length, probability) anchors, starting at (0, 0).
    anchors: Vec<(f64, f64)>,
}

impl DirectionalCdf {
    pub fn from_quantiles(levels: &[f64], radii: &[f64]) -> Result<DirectionalCdf> {
        if levels.is_empty() || levels.len() != radii.len() {
            return Err(Error::DimensionMismatch {
                expected: levels.len(),
                got: radii.len(),
            });
        }
        for w in levels.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter("levels must be ascending".into()));
            }
        }
        if levels[0] <= 0.0 || *levels.last().unwrap() >= 1.0 {
            return Err(Error::InvalidParameter("levels must lie in (0,1)".into()));
        }
        if radii.iter().any(|r| *r < 0.0) {
            return Err(Error::InvalidParameter("negative quantile radius".into()));
        }
        for w in radii.windows(2) {
            if w[0] > w[1] {
                return Err(Error::CrossingRadii);
            }
        }
        let mut anchors = vec![(0.0, 0.0)];
        anchors.extend(levels.iter().zip(radii).map(|(&t, &q)| (q, t)));
        Ok(DirectionalCdf { anchors })
    }

    /// Degenerate forecast: all probability mass at a single length, i.e. a
    /// unit step at q. Its CRPS reduces to the absolute error |q - o|.
    pub fn point_mass(q: f64) -> Result<DirectionalCdf> {
        if q < 0.0 {
            return Err(Error::InvalidParameter("negative quantile radius".into()));
        }
        Ok(DirectionalCdf {
            anchors: vec![(0.0, 0.0), (q, 0.0)],
        })
    }

    pub fn top_quantile(&self) -> f64 {
        self.anchors.last().unwrap().0
    }

    /// Evaluate the CDF; right-continuous at coincident anchors, 1 from the
    /// top quantile on.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= self.top_quantile() {
            return 1.0;
        }
        let mut prev = self.anchors[0];
        for &(q, t) in &self.anchors[1..] {
            if x < q {
                if q == prev.0 {
                    return prev.1;
                }
                return prev.1 + (x - prev.0) / (q - prev.0) * (t - prev.1);
            }
            prev = (q, t);
        }
        1.0
    }

    /// Directional CRPS: the exact integral of (P(y) - H(y - o))^2 over the
    /// piecewise-linear segments, with the step H closed at the observation
    /// (H(0) = 1).
    pub fn crps(&self, observed_length: f64) -> Result<f64> {
        if observed_length < 0.0 {
            return Err(Error::Domain("observed length must be nonnegative".into()));
        }
        let o = observed_length;
        // Exact integral of a linear function squared over [a, b].
        let seg = |fa: f64, fb: f64, width: f64| width / 3.0 * (fa * fa + fa * fb + fb * fb);
        let mut total = 0.0;
        for w in self.anchors.windows(2) {
            let (a, pa) = w[0];
            let (b, pb) = w[1];
            if b <= a {
                continue;
            }
            let p_at = |y: f64| pa + (y - a) / (b - a) * (pb - pa);
            if o <= a {
                total += seg(pa - 1.0, pb - 1.0, b - a);
            } else if o >= b {
                total += seg(pa, pb, b - a);
            } else {
                let po = p_at(o);
                total += seg(pa, po, o - a);
                total += seg(po - 1.0, pb - 1.0, b - o);
            }
        }
        // Beyond the top quantile, P = 1: only y in (q_L, o) contributes.
        let q_top = self.top_quantile();
        if o > q_top {
            total += o - q_top;
        }
        Ok(total)
    }
}

/// Mean per-sample directional CRPS, each CDF evaluated at its own sample's
/// observed length.
pub fn average_directional_crps(cdfs: &[DirectionalCdf], lengths: &[f64]) -> Result<f64> {
    if cdfs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cdfs.len() != lengths.len() {
        return Err(Error::DimensionMismatch {
            expected: cdfs.len(),
            got: lengths.len(),
        });
    }
    let mut sum = 0.0;
    for (cdf, &len) in cdfs.iter().zip(lengths) {
        sum += cdf.crps(len)?;
    }
    Ok(sum / cdfs.len() as f64)
}

/// Skill score 1 - eval/base; positive iff the evaluated model beats the
/// baseline.
pub fn skill(eval_score: f64, base_score: f64) -> Result<f64> {
    if base_score <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "baseline score must be positive, got {base_score}"
        )));
    }
    Ok(1.0 - eval_score / base_score)
}

/// Trapezoid quadrature of the directional CRPS integrand. Panels are split
/// at the observation (the step discontinuity) and at every CDF anchor (the
/// slope kinks), so each panel integrates a smooth quadratic. Test oracle
/// for the closed-form integration; kept here so integration tests and
/// examples can share it.
pub fn crps_quadrature(cdf: &DirectionalCdf, o: f64, points: usize) -> f64 {
    let hi = cdf.top_quantile().max(o) + 1.0;
    let mut cuts: Vec<f64> = vec![0.0, o, hi];
    cuts.extend(cdf.anchors.iter().map(|&(x, _)| x).filter(|&x| x < hi));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let total: f64 = hi;
    let integrand = |y: f64| {
        let h = if y >= o { 1.0 } else { 0.0 };
        let d = cdf.eval(y) - h;
        d * d
    };
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        let (lo, up) = (w[0], w[1]);
        let len = up - lo;
        if len <= 0.0 {
            continue;
        }
        let n = ((points as f64 * len / total) as usize).max(16);
        let h = len / n as f64;
        // evaluate strictly inside the panel at its ends so the jump at o
        // and the kinks never land on a sample point ambiguously
        let mut s = 0.5 * (integrand(lo + 1e-12 * len.max(1.0)) + integrand(up - 1e-12 * len.max(1.0)));
        for i in 1..n {
            s += integrand(lo + i as f64 * h);
        }
        sum += s * h;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directional::direction_grid;
    use crate::gaussian::{gaussian_directional_quantile, GaussianForecast};
    use crate::numkit::{chi2_inverse_cdf, sample_standard_normal, Matrix2, Rng};

    #[test]
    fn coverage_extremes() {
        let lengths = vec![1.0, 2.0, 3.0];
        assert_eq!(coverage(&[0.5, 0.5, 0.5], &lengths).unwrap(), 0.0);
        assert_eq!(coverage(&[10.0, 10.0, 10.0], &lengths).unwrap(), 1.0);
        assert_eq!(coverage(&[1.0, 2.0, 0.0], &lengths).unwrap(), 2.0 / 3.0); // H(0)=1
        assert!(coverage(&[], &[]).is_err());
    }

    #[test]
    fn coverage_of_true_gaussian_quantile() {
        let mut rng = Rng::new(40);
        let n = 100_000;
        let radius = chi2_inverse_cdf(0.9, 2).unwrap().sqrt();
        let lengths: Vec<f64> = (0..n)
            .map(|_| {
                let x = sample_standard_normal(&mut rng);
                let y = sample_standard_normal(&mut rng);
                (x * x + y * y).sqrt()
            })
            .collect();
        let radii = vec![radius; n];
        let c = coverage(&radii, &lengths).unwrap();
        assert!((c - 0.9).abs() < 0.01, "coverage {c}");
    }

    #[test]
    fn reliability_degenerate_radii() {
        let levels = [0.25, 0.75];
        let lengths = vec![1.0, 2.0, 0.5];
        let zeros = vec![vec![0.0; 3]; 2];
        let curve = reliability_curve(&levels, &zeros, &lengths).unwrap();
        assert!(curve.points.iter().all(|(_, v)| *v == 0.0));
        let inf = vec![vec![f64::INFINITY; 3]; 2];
        let curve = reliability_curve(&levels, &inf, &lengths).unwrap();
        assert!(curve.points.iter().all(|(_, v)| *v == 1.0));
    }

    fn unit_circle_surface(d: usize, levels: Vec<f64>) -> QuantileSurfaceForecast {
        let l = levels.len();
        QuantileSurfaceForecast {
            origin: vec![0.0, 0.0],
            levels,
            directions: direction_grid(d).unwrap(),
            radii: vec![vec![1.0; d]; l],
        }
    }

    #[test]
    fn sharpness_of_unit_circles() {
        let surfaces = vec![unit_circle_surface(3600, vec![0.5, 0.9]); 3];
        let curve = sharpness_curve(&surfaces, &[0.5, 0.1]).unwrap();
        for (_, area) in &curve.points {
            assert!((area - std::f64::consts::PI).abs() < 1e-5);
        }
        // missing level errors out
        assert!(matches!(
            sharpness_curve(&surfaces, &[0.3]),
            Err(Error::MissingLevel(_))
        ));
    }

    #[test]
    fn sharpness_scales_quadratically() {
        let mut big = unit_circle_surface(360, vec![0.9]);
        for r in big.radii[0].iter_mut() {
            *r = 2.0;
        }
        let a1 = sharpness_curve(&[unit_circle_surface(360, vec![0.9])], &[0.1]).unwrap();
        let a2 = sharpness_curve(&[big], &[0.1]).unwrap();
        assert!((a2.points[0].1 - 4.0 * a1.points[0].1).abs() < 1e-9);
    }

    #[test]
    fn cdf_single_level() {
        let cdf = DirectionalCdf::from_quantiles(&[0.5], &[2.0]).unwrap();
        assert_eq!(cdf.eval(0.0), 0.0);
        assert_eq!(cdf.eval(2.0), 1.0);
        assert!((cdf.eval(1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cdf_anchor_and_monotone() {
        let levels = [0.1, 0.5, 0.9];
        let radii = [0.5, 1.5, 3.0];
        let cdf = DirectionalCdf::from_quantiles(&levels, &radii).unwrap();
        assert!((cdf.eval(0.5) - 0.1).abs() < 1e-15);
        assert!((cdf.eval(1.5) - 0.5).abs() < 1e-15);
        let mut prev = -1.0;
        for i in 0..=1000 {
            let v = cdf.eval(i as f64 * 3.5 / 1000.0);
            assert!(v >= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
        assert!(matches!(
            DirectionalCdf::from_quantiles(&levels, &[1.0, 0.5, 2.0]),
            Err(Error::CrossingRadii)
        ));
    }

    #[test]
    fn crps_step_cdf_is_absolute_error() {
        let step = DirectionalCdf::point_mass(2.0).unwrap();
        // perfect forecast: observation exactly at the jump
        assert_eq!(step.crps(2.0).unwrap(), 0.0);
        for o in [0.0, 0.7, 1.5, 2.0, 3.0, 5.0] {
            assert!(
                (step.crps(o).unwrap() - (2.0 - o as f64).abs()).abs() < 1e-15,
                "o {o}"
            );
        }
        assert!(DirectionalCdf::point_mass(-1.0).is_err());
    }

    #[test]
    fn crps_closed_form_matches_quadrature_on_gaussian_cdf() {
        let g = GaussianForecast::centered(Matrix2::identity());
        let levels: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let u = [0.6, 0.8];
        let radii: Vec<f64> = levels
            .iter()
            .map(|&t| gaussian_directional_quantile(&g, &u, t).unwrap())
            .collect();
        let cdf = DirectionalCdf::from_quantiles(&levels, &radii).unwrap();
        for o in [0.0, 0.3, 1.0, 2.0, 4.5] {
            let exact = cdf.crps(o).unwrap();
            let approx = crps_quadrature(&cdf, o, 100_000);
            assert!((exact - approx).abs() < 1e-3, "o={o} exact={exact} approx={approx}");
        }
    }

    #[test]
    fn crps_vs_pinball_correspondence() {
        // For a dense level grid, average CRPS ~ (2/L) * sum of pinball
        // losses at the same levels.
        let g = GaussianForecast::centered(Matrix2::diag(1.0, 1.0));
        let levels: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        let u = [1.0, 0.0];
        let radii: Vec<f64> = levels
            .iter()
            .map(|&t| gaussian_directional_quantile(&g, &u, t).unwrap())
            .collect();
        let cdf = DirectionalCdf::from_quantiles(&levels, &radii).unwrap();
        let mut rng = Rng::new(50);
        let lengths: Vec<f64> = (0..2000)
            .map(|_| {
                let x = sample_standard_normal(&mut rng);
                let y = sample_standard_normal(&mut rng);
                (x * x + y * y).sqrt()
            })
            .collect();
        let avg_crps = lengths.iter().map(|&o| cdf.crps(o).unwrap()).sum::<f64>()
            / lengths.len() as f64;
        let avg_pinball = lengths
            .iter()
            .map(|&o| {
                levels
                    .iter()
                    .zip(&radii)
                    .map(|(&t, &q)| crate::nets::pinball_loss(o, q, t))
                    .sum::<f64>()
                    * 2.0
                    / levels.len() as f64
            })
            .sum::<f64>()
            / lengths.len() as f64;
        let rel = (avg_crps - avg_pinball).abs() / avg_pinball;
        assert!(rel < 0.05, "crps {avg_crps} pinball {avg_pinball}");
    }

    #[test]
    fn average_crps_basics() {
        let cdf = DirectionalCdf::from_quantiles(&[0.5], &[1.0]).unwrap();
        let cdfs = vec![cdf.clone(), cdf];
        let avg = average_directional_crps(&cdfs, &[0.5, 1.5]).unwrap();
        assert!(avg > 0.0);
        assert!(average_directional_crps(&[], &[]).is_err());
    }

    #[test]
    fn skill_values() {
        assert_eq!(skill(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(skill(0.0, 1.0).unwrap(), 1.0);
        let s = skill(0.046, 0.376).unwrap();
        assert!((s - 0.8777).abs() < 1e-3, "skill {s}");
        assert!(skill(1.0, 0.0).is_err());
        // invariant under common rescaling
        assert!((skill(0.2, 0.5).unwrap() - skill(2.0, 5.0).unwrap()).abs() < 1e-15);
    }
}
