//! Existence of a joint distribution of `(A₁, A₂, B₁, B₂)` on `{−1,+1}⁴`
//! whose pairwise `(A_i, B_j)` marginals are the blocks of a conditional
//! table.
//!
//! Decided twice: by a phase-one LP over the 16 joint probabilities (which
//! also yields a witness), and by the eight CHSH inequalities
//! `s·Q ≤ 2` with an odd number of minus signs in `s`. For non-signaling
//! tables the two verdicts coincide.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{phase_one, Feasibility, LpScalar};
use crate::space::{ConditionalTable, Outcome, Setting, DEFAULT_TOLERANCE};

/// Coefficients of `Q₁₁, Q₁₂, Q₂₁, Q₂₂` in `s·Q ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChshInequality {
    pub signs: [i8; 4],
}

impl ChshInequality {
    /// `Q₁₁ + Q₁₂ + Q₂₁ − Q₂₂ ≤ 2`.
    pub const STANDARD: ChshInequality = ChshInequality { signs: [1, 1, 1, -1] };

    /// The eight sign patterns with an odd number of minus signs.
    pub fn all() -> Vec<ChshInequality> {
        (0u8..16)
            .filter(|m| m.count_ones() % 2 == 1)
            .map(|m| ChshInequality {
                signs: std::array::from_fn(|k| if m & (1 << k) != 0 { -1 } else { 1 }),
            })
            .collect()
    }

    pub fn evaluate(&self, q: &[[f64; 2]; 2]) -> f64 {
        f64::from(self.signs[0]) * q[0][0]
            + f64::from(self.signs[1]) * q[0][1]
            + f64::from(self.signs[2]) * q[1][0]
            + f64::from(self.signs[3]) * q[1][1]
    }
}

impl std::fmt::Display for ChshInequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = ["Q11", "Q12", "Q21", "Q22"];
        for (k, (s, n)) in self.signs.iter().zip(names).enumerate() {
            match (k, *s > 0) {
                (0, true) => write!(f, "{n}")?,
                (0, false) => write!(f, "-{n}")?,
                (_, true) => write!(f, " + {n}")?,
                (_, false) => write!(f, " - {n}")?,
            }
        }
        f.write_str(" <= 2")
    }
}

/// The CHSH criterion alone: the most violated of the eight inequalities, or
/// `None` if all hold within `tolerance`.
pub fn chsh_criterion(table: &ConditionalTable, tolerance: f64) -> Option<(ChshInequality, f64)> {
    let (ineq, value) = most_violated(&table.correlations());
    (value > 2.0 + tolerance).then_some((ineq, value))
}

fn most_violated(q: &[[f64; 2]; 2]) -> (ChshInequality, f64) {
    ChshInequality::all()
        .into_iter()
        .map(|i| (i, i.evaluate(q)))
        .fold(None, |best: Option<(ChshInequality, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("eight inequalities")
}

/// A law on `(x₁, x₂, y₁, y₂) ∈ {−1,+1}⁴` for `(A₁, A₂, B₁, B₂)`.
///
/// Index bits, high to low: `x₁, x₂, y₁, y₂`, with `+1` encoded as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    pub p: [f64; 16],
}

impl JointDistribution {
    pub fn index(x: [Outcome; 2], y: [Outcome; 2]) -> usize {
        (x[0].index() << 3) | (x[1].index() << 2) | (y[0].index() << 1) | y[1].index()
    }

    pub fn outcomes(k: usize) -> ([Outcome; 2], [Outcome; 2]) {
        let o = |bit: usize| if bit == 0 { Outcome::Plus } else { Outcome::Minus };
        ([o((k >> 3) & 1), o((k >> 2) & 1)], [o((k >> 1) & 1), o(k & 1)])
    }

    pub fn get(&self, x: [Outcome; 2], y: [Outcome; 2]) -> f64 {
        self.p[Self::index(x, y)]
    }

    /// Pairwise marginal of `(A_i, B_j)` in block order `(+,+), (+,−), (−,+), (−,−)`.
    pub fn pair_marginal(&self, a: Setting, b: Setting) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, &p) in self.p.iter().enumerate() {
            let (x, y) = Self::outcomes(k);
            out[x[a.index()].index() * 2 + y[b.index()].index()] += p;
        }
        out
    }

    /// Largest absolute difference between a pairwise marginal and the table.
    pub fn max_marginal_error(&self, table: &ConditionalTable) -> f64 {
        let mut worst: f64 = 0.0;
        for a in Setting::ALL {
            for b in Setting::ALL {
                let m = self.pair_marginal(a, b);
                for (got, want) in m.iter().zip(table.block(a, b).entries()) {
                    worst = worst.max((got - want).abs());
                }
            }
        }
        worst
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Float,
    /// Exact rational arithmetic on the table's non-signaling parameters.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FineOptions {
    /// Marginal-consistency and LP feasibility tolerance.
    pub tolerance: f64,
    pub arithmetic: Arithmetic,
}

impl Default for FineOptions {
    fn default() -> Self {
        FineOptions {
            tolerance: DEFAULT_TOLERANCE,
            arithmetic: Arithmetic::Float,
        }
    }
}

impl FineOptions {
    pub fn exact() -> Self {
        FineOptions {
            arithmetic: Arithmetic::Exact,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FineVerdict {
    Feasible {
        witness: JointDistribution,
    },
    Infeasible {
        /// The most violated CHSH inequality.
        violated: ChshInequality,
        value: f64,
        /// Optimal phase-one objective (total constraint violation).
        residual: f64,
    },
}

impl FineVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FineVerdict::Feasible { .. })
    }
}

/// Does a joint distribution of the four observables reproduce the table?
///
/// The table must be non-signaling within `options.tolerance`; the
/// equivalence with the CHSH criterion presupposes it.
pub fn fine_feasibility(table: &ConditionalTable, options: &FineOptions) -> Result<FineVerdict> {
    let deviation = table.marginal_discrepancy();
    if deviation > options.tolerance {
        return Err(Error::MarginalInconsistency {
            deviation,
            tolerance: options.tolerance,
        });
    }

    let (feasibility, witness) = match options.arithmetic {
        Arithmetic::Float => {
            let entries = table_entries(table);
            let (a, b) = marginal_system(&entries);
            match phase_one(&a, &b, &options.tolerance) {
                Feasibility::Feasible(x) => (None, Some(x)),
                Feasibility::Infeasible { residual } => (Some(residual), None),
            }
        }
        Arithmetic::Exact => {
            let entries = exact_entries(table);
            let (a, b) = marginal_system(&entries);
            match phase_one(&a, &b, &BigRational::zero()) {
                Feasibility::Feasible(x) => (None, Some(x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())),
                Feasibility::Infeasible { residual } => (Some(residual.to_f64().unwrap_or(f64::NAN)), None),
            }
        }
    };

    Ok(match (witness, feasibility) {
        (Some(x), _) => FineVerdict::Feasible {
            witness: JointDistribution {
                p: x.try_into().expect("16 variables"),
            },
        },
        (None, residual) => {
            let (violated, value) = most_violated(&table.correlations());
            FineVerdict::Infeasible {
                violated,
                value,
                residual: residual.unwrap_or(f64::NAN),
            }
        }
    })
}

fn table_entries(table: &ConditionalTable) -> [[[f64; 4]; 2]; 2] {
    let mut out = [[[0.0; 4]; 2]; 2];
    for a in Setting::ALL {
        for b in Setting::ALL {
            out[a.index()][b.index()] = table.block(a, b).entries();
        }
    }
    out
}

/// One equality per `(i, j, ε, ε′)`: the 16 joint probabilities with
/// `x_i = ε, y_j = ε′` sum to `q(ε, ε′ | i, j)`.
fn marginal_system<F: LpScalar>(entries: &[[[F; 4]; 2]; 2]) -> (Vec<Vec<F>>, Vec<F>) {
    let mut rows = Vec::with_capacity(16);
    let mut rhs = Vec::with_capacity(16);
    for a in Setting::ALL {
        for b in Setting::ALL {
            for x in Outcome::ALL {
                for y in Outcome::ALL {
                    let row = (0..16)
                        .map(|k| {
                            let (xs, ys) = JointDistribution::outcomes(k);
                            if xs[a.index()] == x && ys[b.index()] == y {
                                F::one()
                            } else {
                                F::zero()
                            }
                        })
                        .collect();
                    rows.push(row);
                    rhs.push(entries[a.index()][b.index()][x.index() * 2 + y.index()].clone());
                }
            }
        }
    }
    (rows, rhs)
}

/// Rational table rebuilt from the eight non-signaling parameters
/// `α_i = P(A_i=+)`, `β_j = P(B_j=+)`, `π_ij = q(+,+|i,j)`, each replaced by
/// the first continued-fraction convergent within `1e-12`. The result is
/// exactly normalized and exactly non-signaling.
fn exact_entries(table: &ConditionalTable) -> [[[BigRational; 4]; 2]; 2] {
    let alpha = Setting::ALL.map(|i| {
        let m = Setting::ALL
            .iter()
            .map(|&j| table.block(i, j).marginal_a(Outcome::Plus))
            .sum::<f64>()
            / 2.0;
        rationalize(m, 1e-12)
    });
    let beta = Setting::ALL.map(|j| {
        let m = Setting::ALL
            .iter()
            .map(|&i| table.block(i, j).marginal_b(Outcome::Plus))
            .sum::<f64>()
            / 2.0;
        rationalize(m, 1e-12)
    });
    let one = BigRational::from_integer(BigInt::from(1));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (si, sj) = (Setting::ALL[i], Setting::ALL[j]);
            let pp = rationalize(table.q(si, sj, Outcome::Plus, Outcome::Plus), 1e-12);
            let pm = &alpha[i] - &pp;
            let mp = &beta[j] - &pp;
            let mm = &one - &alpha[i] - &beta[j] + &pp;
            [pp, pm, mp, mm]
        })
    })
}

/// First continued-fraction convergent of `x` within `eps`.
pub fn rationalize(x: f64, eps: f64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let (mut h_prev, mut h) = (BigInt::from(1), BigInt::from(x.floor() as i64));
    let (mut k_prev, mut k) = (BigInt::from(0), BigInt::from(1));
    let mut frac = x - x.floor();
    for _ in 0..64 {
        let approx = BigRational::new(h.clone(), k.clone());
        if (approx.to_f64().unwrap_or(f64::NAN) - x).abs() <= eps || frac == 0.0 {
            return approx;
        }
        let inv = 1.0 / frac;
        let term = inv.floor();
        frac = inv - term;
        let t = BigInt::from(term as i64);
        let h_next = &t * &h + &h_prev;
        let k_next = &t * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
    BigRational::from_float(x).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{singlet_table, AngleSettings, Convention};
    use crate::space::OutcomeBlock;

    #[test]
    fn eight_inequalities_with_odd_minus_count() {
        let all = ChshInequality::all();
        assert_eq!(all.len(), 8);
        assert!(all.contains(&ChshInequality::STANDARD));
        for i in &all {
            assert_eq!(i.signs.iter().filter(|&&s| s < 0).count() % 2, 1);
        }
        assert_eq!(ChshInequality::STANDARD.to_string(), "Q11 + Q12 + Q21 - Q22 <= 2");
    }

    #[test]
    fn canonical_singlet_is_infeasible() {
        let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
        match fine_feasibility(&table, &FineOptions::default()).unwrap() {
            FineVerdict::Infeasible {
                violated,
                value,
                residual,
            } => {
                assert_eq!(violated, ChshInequality::STANDARD);
                assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
                assert!(residual > 1e-3);
            }
            v => panic!("expected infeasible, got {v:?}"),
        }
        assert!(!fine_feasibility(&table, &FineOptions::exact()).unwrap().is_feasible());
    }

    #[test]
    fn deterministic_table_point_mass() {
        let table = ConditionalTable::uniform_blocks(OutcomeBlock::deterministic(Outcome::Plus, Outcome::Plus));
        for opts in [FineOptions::default(), FineOptions::exact()] {
            match fine_feasibility(&table, &opts).unwrap() {
                FineVerdict::Feasible { witness } => {
                    assert_eq!(witness.get([Outcome::Plus; 2], [Outcome::Plus; 2]), 1.0);
                    assert_eq!(witness.max_marginal_error(&table), 0.0);
                }
                v => panic!("expected feasible, got {v:?}"),
            }
        }
    }

    #[test]
    fn signaling_table_rejected() {
        let mut entries = [[[0.25; 4]; 2]; 2];
        entries[0][0] = [1.0, 0.0, 0.0, 0.0];
        let table = ConditionalTable::from_entries(entries).unwrap();
        assert!(matches!(
            fine_feasibility(&table, &FineOptions::default()),
            Err(Error::MarginalInconsistency { .. })
        ));
    }

    #[test]
    fn pr_box_is_infeasible_exactly() {
        // perfectly correlated on three pairs, anti-correlated on (2,2): S = 4
        let c = OutcomeBlock::perfectly_correlated();
        let anti = OutcomeBlock::new([0.0, 0.5, 0.5, 0.0]).unwrap();
        let table = ConditionalTable::new([[c, c], [c, anti]]);
        match fine_feasibility(&table, &FineOptions::exact()).unwrap() {
            FineVerdict::Infeasible { value, .. } => assert_eq!(value, 4.0),
            v => panic!("expected infeasible, got {v:?}"),
        }
        assert!(chsh_criterion(&table, 1e-9).is_some());
    }

    #[test]
    fn rationalize_small_denominators() {
        assert_eq!(rationalize(0.25, 1e-12), BigRational::new(1.into(), 4.into()));
        assert_eq!(rationalize(1.0 / 3.0, 1e-12), BigRational::new(1.into(), 3.into()));
        assert_eq!(rationalize(-0.5, 1e-12), BigRational::new((-1).into(), 2.into()));
        assert_eq!(rationalize(0.0, 1e-12), BigRational::zero());
        let r = rationalize(std::f64::consts::PI, 1e-12);
        assert!((r.to_f64().unwrap() - std::f64::consts::PI).abs() <= 1e-12);
    }
}
