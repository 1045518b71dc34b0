//! Directional representation of observations and sampled star-domain
//! geometry: forecast adjustment, direction/length decomposition, direction
//! grids, containment tests and surface-area measures.

use crate::error::{Error, Result};
use crate::numkit::{norm, Rng};
use serde::{Deserialize, Serialize};

/// An observation decomposed into a unit direction and a nonnegative length
/// relative to a point estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalObservation {
    pub direction: Vec<f64>,
    pub length: f64,
}

/// A sampled star-domain surface: point estimate, L quantile levels,
/// D directions and an L x D matrix of radial lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantileSurfaceForecast {
    pub origin: Vec<f64>,
    pub levels: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    /// radii[level_index][direction_index]
    pub radii: Vec<Vec<f64>>,
}

impl QuantileSurfaceForecast {
    pub fn validate(&self) -> Result<()> {
        let l = self.levels.len();
        let d = self.directions.len();
        if self.radii.len() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: self.radii.len(),
            });
        }
        for (i, w) in self.levels.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter(format!(
                    "levels not strictly ascending at index {i}"
                )));
            }
        }
        if let Some(&first) = self.levels.first() {
            if first <= 0.0 || *self.levels.last().unwrap() >= 1.0 {
                return Err(Error::InvalidParameter("levels must lie in (0,1)".into()));
            }
        }
        for row in &self.radii {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if row.iter().any(|r| *r < 0.0) {
                return Err(Error::InvalidParameter("negative radius".into()));
            }
        }
        for j in 0..d {
            for i in 1..l {
                if self.radii[i][j] < self.radii[i - 1][j] {
                    return Err(Error::CrossingRadii);
                }
            }
        }
        Ok(())
    }

    pub fn level_index(&self, tau: f64) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| (l - tau).abs() < 1e-9)
            .ok_or(Error::MissingLevel(tau))
    }

    /// Vertices of the sampled polygon at a level (2-D only).
    pub fn vertices(&self, level_index: usize) -> Result<Vec<[f64; 2]>> {
        if self.origin.len() != 2 {
            return Err(Error::UnsupportedDimension(self.origin.len()));
        }
        Ok(self.directions
            .iter()
            .zip(&self.radii[level_index])
            .map(|(u, r)| [self.origin[0] + r * u[0], self.origin[1] + r * u[1]])
            .collect())
    }

    /// Point-in-polygon test on the sampled polygon at a level
    /// (even-odd crossing rule).
    pub fn polygon_contains_point(&self, level_index: usize, p: [f64; 2]) -> Result<bool> {
        let verts = self.vertices(level_index)?;
        let n = verts.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = (verts[i][0], verts[i][1]);
            let (xj, yj) = (verts[j][0], verts[j][1]);
            if (yi > p[1]) != (yj > p[1])
                && p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi
            {
                inside = !inside;
            }
            j = i;
        }
        Ok(inside)
    }
}

/// Forecast-adjusted observation: o - point_estimate.
pub fn forecast_adjust(observation: &[f64], point_estimate: &[f64]) -> Result<Vec<f64>> {
    if observation.len() != point_estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: point_estimate.len(),
            got: observation.len(),
        });
    }
    Ok(observation
        .iter()
        .zip(point_estimate)
        .map(|(o, y)| o - y)
        .collect())
}

/// Split an adjusted observation into unit direction and length.
pub fn decompose(adjusted: &[f64]) -> Result<DirectionalObservation> {
    let length = norm(adjusted);
    if length == 0.0 {
        return Err(Error::DegenerateObservation);
    }
    Ok(DirectionalObservation {
        direction: adjusted.iter().map(|x| x / length).collect(),
        length,
    })
}

/// `count` unit vectors at angles 2*pi*j/count from the first axis,
/// counterclockwise.
pub fn direction_grid(count: usize) -> Result<Vec<Vec<f64>>> {
    if count < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 directions for a polygon, got {count}"
        )));
    }
    Ok((0..count)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            vec![angle.cos(), angle.sin()]
        })
        .collect())
}

/// Whether an observation lies inside the tau-QS around `origin`, with the
/// radius evaluated by `radius_at` at the observation's own direction.
/// Boundary is closed (H(0) = 1); an observation at the origin is contained
/// by convention.
pub fn contains<F>(origin: &[f64], observation: &[f64], radius_at: F) -> Result<bool>
where
    F: Fn(&[f64]) -> f64,
{
    let adjusted = forecast_adjust(observation, origin)?;
    match decompose(&adjusted) {
        Ok(dir_obs) => Ok(dir_obs.length <= radius_at(&dir_obs.direction)),
        Err(Error::DegenerateObservation) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Shoelace (surveyor's) area of the sampled polygon at a level. 2-D only.
/// Vertices are taken in grid order; the sign is discarded.
pub fn polygon_area(surface: &QuantileSurfaceForecast, level_index: usize) -> Result<f64> {
    if surface.origin.len() != 2 {
        return Err(Error::UnsupportedDimension(surface.origin.len()));
    }
    let verts = surface.vertices(level_index)?;
    if verts.len() < 3 {
        return Err(Error::InvalidParameter("polygon needs >= 3 vertices".into()));
    }
    // Neumaier summation keeps the D=3600 case accurate to ~1e-13.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let n = verts.len();
    for i in 0..n {
        let j = (i + 1) % n;
        let term = verts[i][0] * verts[j][1] - verts[j][0] * verts[i][1];
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(0.5 * (sum + comp).abs())
}

/// Monte Carlo volume of a membership predicate inside an axis-aligned box:
/// box volume times the contained fraction of uniform samples.
pub fn monte_carlo_volume<F>(
    predicate: F,
    box_lo: &[f64],
    box_hi: &[f64],
    samples: usize,
    rng: &mut Rng,
) -> Result<f64>
where
    F: Fn(&[f64]) -> bool,
{
    if box_lo.len() != box_hi.len() {
        return Err(Error::DimensionMismatch {
            expected: box_lo.len(),
            got: box_hi.len(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let mut volume = 1.0;
    for (lo, hi) in box_lo.iter().zip(box_hi) {
        if hi <= lo {
            return Err(Error::InvalidParameter("degenerate bounding box".into()));
        }
        volume *= hi - lo;
    }
    let dim = box_lo.len();
    let mut point = vec![0.0; dim];
    let mut hits = 0usize;
    for _ in 0..samples {
        for d in 0..dim {
            point[d] = box_lo[d] + rng.next_f64() * (box_hi[d] - box_lo[d]);
        }
        if predicate(&point) {
            hits += 1;
        }
    }
    Ok(volume * hits as f64 / samples as f64)
}
