//! Conditional tables from the quantum prediction for a maximally entangled
//! pair measured with analyzers at fixed angles.
//!
//! The state is assumed to be the maximally entangled singlet-type state.
//! Under the photon-polarization convention the correlation at analyzer
//! angles `θ, θ′` is `cos 2(θ − θ′)`; under the spin-½ convention it is
//! `−cos(θ − θ′)`. One-side marginals are always `1/2`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{ConditionalTable, OutcomeBlock, Setting};

/// `2√2`, the quantum maximum of the conditional CHSH combination.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Polarization-entangled photons, correlation `cos 2Δ`.
    #[default]
    Photon,
    /// Spin-½ singlet, correlation `−cos Δ`.
    Spin,
}

impl Convention {
    pub fn correlation(self, theta_a: f64, theta_b: f64) -> f64 {
        let delta = theta_a - theta_b;
        match self {
            Convention::Photon => (2.0 * delta).cos(),
            Convention::Spin => -delta.cos(),
        }
    }
}

/// Analyzer orientations in radians: `a[i]` for setting `i+1` of the A-device,
/// `b[j]` for the B-device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleSettings {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl AngleSettings {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        if a.iter().chain(&b).any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("analyzer angles must be finite".into()));
        }
        Ok(AngleSettings { a, b })
    }

    pub fn from_degrees(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        Self::new(a.map(f64::to_radians), b.map(f64::to_radians))
    }

    /// `(0°, 45°; 22.5°, −22.5°)`: the configuration reaching `2√2` under
    /// the photon convention.
    pub fn canonical_chsh() -> Self {
        let q = std::f64::consts::FRAC_PI_8;
        AngleSettings {
            a: [0.0, 2.0 * q],
            b: [q, -q],
        }
    }

    pub fn angle_a(&self, s: Setting) -> f64 {
        self.a[s.index()]
    }

    pub fn angle_b(&self, s: Setting) -> f64 {
        self.b[s.index()]
    }

    pub fn shifted(&self, offset: f64) -> Self {
        AngleSettings {
            a: self.a.map(|t| t + offset),
            b: self.b.map(|t| t + offset),
        }
    }
}

/// Block `(i, j)` has `q(ε, ε′) = (1 + εε′·E_ij) / 4` with `E_ij` the
/// convention's correlation at `(θ_i, θ′_j)`.
pub fn singlet_table(angles: &AngleSettings, convention: Convention) -> ConditionalTable {
    let mut blocks = [[OutcomeBlock::uncorrelated(); 2]; 2];
    for a in Setting::ALL {
        for b in Setting::ALL {
            let e = convention.correlation(angles.angle_a(a), angles.angle_b(b));
            let same = (1.0 + e) / 4.0;
            let diff = (1.0 - e) / 4.0;
            blocks[a.index()][b.index()] =
                OutcomeBlock::new([same, diff, diff, same]).expect("cosine law yields a normalized block");
        }
    }
    ConditionalTable::new(blocks)
}

/// `E_11 + E_12 + E_21 − E_22` straight from the cosine law.
pub fn chsh_value(angles: &AngleSettings, convention: Convention) -> f64 {
    let e = |a: Setting, b: Setting| convention.correlation(angles.angle_a(a), angles.angle_b(b));
    e(Setting::One, Setting::One) + e(Setting::One, Setting::Two) + e(Setting::Two, Setting::One)
        - e(Setting::Two, Setting::Two)
}

/// Evenly spaced angles per dial, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleGrid {
    pub start: f64,
    pub end: f64,
    pub resolution: usize,
}

impl AngleGrid {
    /// `[−90°, 90°]`, one full polarization period. With resolution 17 the
    /// step is 11.25° and the canonical configuration lies on the grid.
    pub fn half_turn(resolution: usize) -> Self {
        AngleGrid {
            start: -FRAC_PI_2,
            end: FRAC_PI_2,
            resolution,
        }
    }

    pub fn degrees(start: f64, end: f64, resolution: usize) -> Self {
        AngleGrid {
            start: start.to_radians(),
            end: end.to_radians(),
            resolution,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let steps = (self.resolution - 1) as f64;
        (0..self.resolution)
            .map(|k| self.start + (self.end - self.start) * k as f64 / steps)
            .collect()
    }

    /// Every `(θ₁, θ₂; θ′₁, θ′₂)` on the grid.
    pub fn settings(&self) -> Vec<AngleSettings> {
        let pts = self.points();
        let mut out = Vec::with_capacity(pts.len().pow(4));
        for &a1 in &pts {
            for &a2 in &pts {
                for &b1 in &pts {
                    for &b2 in &pts {
                        out.push(AngleSettings {
                            a: [a1, a2],
                            b: [b1, b2],
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TsirelsonScan {
    /// Largest `|S_cond|` found.
    pub max_abs_chsh: f64,
    pub argmax: AngleSettings,
    pub points: usize,
}

/// Maximum of `|Q₁₁ + Q₁₂ + Q₂₁ − Q₂₂|` over the angle grid.
pub fn tsirelson_scan(grid: &AngleGrid, convention: Convention) -> Result<TsirelsonScan> {
    if grid.resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {}",
            grid.resolution
        )));
    }
    if !(grid.start.is_finite() && grid.end.is_finite()) {
        return Err(Error::InvalidArgument("grid bounds must be finite".into()));
    }
    let all = grid.settings();
    let (max_abs_chsh, argmax) = all
        .par_iter()
        .map(|s| (chsh_value(s, convention).abs(), *s))
        // ties resolve to the earliest grid point so the result is order-independent
        .reduce_with(|l, r| if r.0 > l.0 { r } else { l })
        .expect("grid is nonempty");
    Ok(TsirelsonScan {
        max_abs_chsh,
        argmax,
        points: all.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Outcome;

    #[test]
    fn aligned_analyzers() {
        let angles = AngleSettings::new([0.3, 1.0], [0.3, 2.0]).unwrap();
        let t = singlet_table(&angles, Convention::Photon);
        let b = t.block(Setting::One, Setting::One);
        assert!((b.get(Outcome::Plus, Outcome::Plus) - 0.5).abs() < 1e-15);
        assert!(b.get(Outcome::Plus, Outcome::Minus).abs() < 1e-15);
        assert!((t.correlation(Setting::One, Setting::One) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn forty_five_degrees_is_uncorrelated() {
        let angles = AngleSettings::from_degrees([45.0, 0.0], [0.0, 0.0]).unwrap();
        let t = singlet_table(&angles, Convention::Photon);
        for q in t.block(Setting::One, Setting::One).entries() {
            assert!((q - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn canonical_configuration() {
        let t = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
        let h = SQRT_2 / 2.0;
        let q = t.correlations();
        assert!((q[0][0] - h).abs() < 1e-15);
        assert!((q[0][1] - h).abs() < 1e-15);
        assert!((q[1][0] - h).abs() < 1e-15);
        assert!((q[1][1] + h).abs() < 1e-15);
        let s = chsh_value(&AngleSettings::canonical_chsh(), Convention::Photon);
        assert!((s - TSIRELSON_BOUND).abs() < 1e-12);
    }

    #[test]
    fn spin_convention_correlation() {
        let angles = AngleSettings::from_degrees([0.0, 90.0], [45.0, 135.0]).unwrap();
        let t = singlet_table(&angles, Convention::Spin);
        assert!((t.correlation(Setting::One, Setting::One) + 45f64.to_radians().cos()).abs() < 1e-15);
        assert!(t.marginal_discrepancy() < 1e-15);
    }

    #[test]
    fn scan_rejects_tiny_grid() {
        assert!(tsirelson_scan(&AngleGrid::half_turn(1), Convention::Photon).is_err());
    }

    #[test]
    fn two_point_grid_by_enumeration() {
        let grid = AngleGrid::degrees(0.0, 45.0, 2);
        let scan = tsirelson_scan(&grid, Convention::Photon).unwrap();
        assert_eq!(scan.points, 16);
        // with dials in {0°, 45°} each correlation is cos 0 = 1 or cos 90° = 0
        let mut best: f64 = 0.0;
        for a1 in [0.0, 45.0] {
            for a2 in [0.0, 45.0] {
                for b1 in [0.0, 45.0] {
                    for b2 in [0.0, 45.0] {
                        let c = |x: f64, y: f64| if x == y { 1.0f64 } else { 0.0 };
                        let s = c(a1, b1) + c(a1, b2) + c(a2, b1) - c(a2, b2);
                        best = best.max(s.abs());
                    }
                }
            }
        }
        assert!((scan.max_abs_chsh - best).abs() < 1e-12);
        assert!(scan.max_abs_chsh <= TSIRELSON_BOUND);
    }
}
