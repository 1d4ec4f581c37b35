//! Absolute and conditional correlations, the CHSH combinations built from
//! them, and existence of a joint distribution for the four observables.
//!
//! The sign convention `S = X₁₁ + X₁₂ + X₂₁ − X₂₂` is used throughout; the
//! other seven sign patterns only appear inside [`fine`].

pub mod fine;

use serde::Serialize;

use crate::error::Result;
use crate::quantum::TSIRELSON_BOUND;
use crate::queries::{prob, Event};
use crate::space::{ConditionalTable, ObservableId, Outcome, SampleSpace, Setting, SettingDistribution};

pub use fine::{
    chsh_criterion, fine_feasibility, Arithmetic, ChshInequality, FineOptions, FineVerdict, JointDistribution,
};

/// Signs of `X₁₁, X₁₂, X₂₁, X₂₂` in the CHSH combination.
pub const CHSH_SIGNS: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationSet {
    /// `C_ij = E[A_i B_j]` on the full space.
    pub absolute: [[f64; 2]; 2],
    /// `Q_ij = E[A_i B_j | a=i, b=j]`; `None` when `p(a=i, b=j)` is null.
    pub conditional: [[Option<f64>; 2]; 2],
    /// `p(a=i, b=j)`.
    pub weights: [[f64; 2]; 2],
}

impl CorrelationSet {
    pub fn c(&self, a: Setting, b: Setting) -> f64 {
        self.absolute[a.index()][b.index()]
    }

    pub fn q(&self, a: Setting, b: Setting) -> Option<f64> {
        self.conditional[a.index()][b.index()]
    }

    /// All four conditional correlations, if defined.
    pub fn conditional_all(&self) -> Option<[[f64; 2]; 2]> {
        let mut out = [[0.0; 2]; 2];
        for a in Setting::ALL {
            for b in Setting::ALL {
                out[a.index()][b.index()] = self.q(a, b)?;
            }
        }
        Some(out)
    }

    pub fn s_abs(&self) -> f64 {
        combine(&self.absolute)
    }

    pub fn s_cond(&self) -> Option<f64> {
        self.conditional_all().map(|q| combine(&q))
    }
}

/// `X₁₁ + X₁₂ + X₂₁ − X₂₂`.
pub fn combine(x: &[[f64; 2]; 2]) -> f64 {
    let mut s = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            s += CHSH_SIGNS[a][b] * x[a][b];
        }
    }
    s
}

/// `C_ij = Σ εε′ p(A_i=ε, B_j=ε′)` by enumeration; `Q_ij = C_ij / p(a=i, b=j)`.
pub fn correlations(space: &SampleSpace) -> CorrelationSet {
    let weights = space.settings().weights();
    let mut absolute = [[0.0; 2]; 2];
    let mut conditional = [[None; 2]; 2];
    for a in Setting::ALL {
        for b in Setting::ALL {
            let mut c = 0.0;
            for x in Outcome::ALL {
                for y in Outcome::ALL {
                    let e = Event::outcome(ObservableId::a(a), x).meet(&Event::outcome(ObservableId::b(b), y));
                    c += f64::from(x.value() * y.value()) * prob(space, &e);
                }
            }
            absolute[a.index()][b.index()] = c;
            let w = weights[a.index()][b.index()];
            if w > space.tolerance() {
                conditional[a.index()][b.index()] = Some(c / w);
            }
        }
    }
    CorrelationSet {
        absolute,
        conditional,
        weights,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub limit: f64,
    pub holds: bool,
}

impl Bound {
    fn new(value: f64, limit: f64, tol: f64) -> Self {
        Bound {
            value,
            limit,
            holds: value.abs() <= limit + tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshReport {
    pub correlations: CorrelationSet,
    /// `C₁₁ + C₁₂ + C₂₁ − C₂₂`.
    pub s_abs: f64,
    /// `Q₁₁ + Q₁₂ + Q₂₁ − Q₂₂`, undefined if any `Q_ij` is.
    pub s_cond: Option<f64>,
    /// `|S_abs| ≤ 2`, valid for any quadruple of `[−1, 1]` variables.
    pub abs_classical: Bound,
    /// `|S_abs| ≤ 1`, specific to this construction.
    pub abs_strong: Bound,
    /// `|Σ w_ij·s_ij·Q_ij| ≤ 2`: the classical bound rewritten with
    /// conditional correlations. Numerically it is `S_abs`.
    pub weighted_classical: Option<Bound>,
    /// `|S_cond| ≤ 2`.
    pub cond_classical: Option<Bound>,
    /// `|S_cond| ≤ 2√2`.
    pub cond_tsirelson: Option<Bound>,
}

pub fn chsh_report(space: &SampleSpace) -> ChshReport {
    let tol = space.tolerance();
    let correlations = correlations(space);
    let s_abs = correlations.s_abs();
    let s_cond = correlations.s_cond();
    let weighted = correlations.conditional_all().map(|q| {
        let mut s = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                s += CHSH_SIGNS[a][b] * correlations.weights[a][b] * q[a][b];
            }
        }
        s
    });
    ChshReport {
        correlations,
        s_abs,
        s_cond,
        abs_classical: Bound::new(s_abs, 2.0, tol),
        abs_strong: Bound::new(s_abs, 1.0, tol),
        weighted_classical: weighted.map(|w| Bound::new(w, 2.0, tol)),
        cond_classical: s_cond.map(|s| Bound::new(s, 2.0, tol)),
        cond_tsirelson: s_cond.map(|s| Bound::new(s, TSIRELSON_BOUND, tol)),
    }
}

/// Bounds on `|S_cond|` implied by the absolute bounds when every setting
/// pair has weight `1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpliedBounds {
    /// From `|S_abs| ≤ 2`.
    pub from_classical: f64,
    /// From `|S_abs| ≤ 1`.
    pub from_strong: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedChshPoint {
    pub weights: [[f64; 2]; 2],
    pub s_abs: f64,
    pub s_cond: Option<f64>,
    pub implied_bounds: Option<ImpliedBounds>,
}

/// `S_abs` and `S_cond` of one table under a range of setting laws.
pub fn weighted_chsh_curve(
    table: &ConditionalTable,
    weights_grid: &[SettingDistribution],
) -> Result<Vec<WeightedChshPoint>> {
    weights_grid
        .iter()
        .map(|w| {
            let space = SampleSpace::build(*w, *table)?;
            let c = correlations(&space);
            let implied_bounds = w.is_uniform().then_some(ImpliedBounds {
                from_classical: 2.0 / 0.25,
                from_strong: 1.0 / 0.25,
            });
            Ok(WeightedChshPoint {
                weights: w.weights(),
                s_abs: c.s_abs(),
                s_cond: c.s_cond(),
                implied_bounds,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{singlet_table, AngleSettings, Convention};
    use crate::space::OutcomeBlock;
    use std::f64::consts::SQRT_2;

    #[test]
    fn perfect_correlation() {
        let space = SampleSpace::build(
            SettingDistribution::uniform(),
            ConditionalTable::uniform_blocks(OutcomeBlock::perfectly_correlated()),
        )
        .unwrap();
        let c = correlations(&space);
        for a in Setting::ALL {
            for b in Setting::ALL {
                assert_eq!(c.q(a, b), Some(1.0));
                assert_eq!(c.c(a, b), 0.25);
            }
        }
    }

    #[test]
    fn empty_setting_has_undefined_q() {
        let w = SettingDistribution::new([[0.5, 0.25], [0.25, 0.0]]).unwrap();
        let space = SampleSpace::build(
            w,
            ConditionalTable::uniform_blocks(OutcomeBlock::perfectly_correlated()),
        )
        .unwrap();
        let c = correlations(&space);
        assert_eq!(c.q(Setting::Two, Setting::Two), None);
        assert_eq!(c.c(Setting::Two, Setting::Two), 0.0);
        let r = chsh_report(&space);
        assert!(r.s_cond.is_none());
        assert!(r.cond_classical.is_none());
    }

    #[test]
    fn canonical_report() {
        let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
        let space = SampleSpace::build(SettingDistribution::uniform(), table).unwrap();
        let r = chsh_report(&space);
        let s_cond = r.s_cond.unwrap();
        assert!((s_cond - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((r.s_abs - SQRT_2 / 2.0).abs() < 1e-12);
        assert!(r.abs_strong.holds);
        assert!(!r.cond_classical.unwrap().holds);
        assert!(r.cond_tsirelson.unwrap().holds);
        assert_eq!(r.weighted_classical.unwrap().value, r.s_abs);
    }

    #[test]
    fn deterministic_local_table() {
        let space = SampleSpace::build(
            SettingDistribution::uniform(),
            ConditionalTable::uniform_blocks(OutcomeBlock::deterministic(Outcome::Plus, Outcome::Plus)),
        )
        .unwrap();
        let r = chsh_report(&space);
        assert_eq!(r.s_cond, Some(2.0));
        assert_eq!(r.s_abs, 0.5);
        assert!(r.cond_classical.unwrap().holds);
    }

    #[test]
    fn uncorrelated_blocks() {
        let space = SampleSpace::build(
            SettingDistribution::uniform(),
            ConditionalTable::uniform_blocks(OutcomeBlock::uncorrelated()),
        )
        .unwrap();
        let r = chsh_report(&space);
        assert_eq!(r.s_cond, Some(0.0));
        assert_eq!(r.s_abs, 0.0);
    }

    #[test]
    fn weighted_curve() {
        let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
        let q = table.correlations();
        let grid = [
            SettingDistribution::uniform(),
            SettingDistribution::point(Setting::One, Setting::One),
            SettingDistribution::new([[0.5, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0]]).unwrap(),
        ];
        let curve = weighted_chsh_curve(&table, &grid).unwrap();
        assert_eq!(
            curve[0].implied_bounds,
            Some(ImpliedBounds {
                from_classical: 8.0,
                from_strong: 4.0
            })
        );
        assert!((curve[1].s_abs - q[0][0]).abs() < 1e-15);
        assert!(curve[1].implied_bounds.is_none());
        assert!(curve[1].s_cond.is_none());
        let expected = q[0][0] / 2.0 + q[0][1] / 6.0 + q[1][0] / 6.0 - q[1][1] / 6.0;
        assert!((curve[2].s_abs - expected).abs() < 1e-15);
        assert!((curve[2].s_cond.unwrap() - curve[0].s_cond.unwrap()).abs() < 1e-12);
    }
}
