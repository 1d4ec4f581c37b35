//! Probabilistic locality conditions and the consequences they imply.
//!
//! Observables carry one setting index by construction, so the single-index
//! condition always holds and is not checked here. What can fail is
//! independence of the setting generators (LIG) and independence of each
//! side's observable-plus-generator from the far generator (LIOG).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::queries::{cond_prob, prob, Event, IdentityLine, LineStatus};
use crate::space::{ObservableId, Outcome, SampleSpace, Setting, Side};

/// Verdict of an independence condition with its worst deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub max_deviation: f64,
}

impl Check {
    fn from_deviation(max_deviation: f64, tol: f64) -> Self {
        Check {
            holds: max_deviation <= tol,
            max_deviation,
        }
    }
}

const VALUES: [i8; 3] = [-1, 0, 1];

/// `p(a=i, b=j) = p(a=i)·p(b=j)` for all `(i, j)`.
pub fn check_lig(space: &SampleSpace) -> Check {
    let s = space.settings();
    let mut worst: f64 = 0.0;
    for i in Setting::ALL {
        for j in Setting::ALL {
            worst = worst.max((s.weight(i, j) - s.marginal_a(i) * s.marginal_b(j)).abs());
        }
    }
    Check::from_deviation(worst, space.tolerance())
}

/// `(A_i, a)` independent of `b` and `(B_j, b)` independent of `a`, checked
/// on every value combination by enumeration.
pub fn check_liog(space: &SampleSpace) -> Check {
    let mut worst: f64 = 0.0;
    for (near, far) in [(Side::A, Side::B), (Side::B, Side::A)] {
        for i in Setting::ALL {
            let obs = ObservableId::new(near, i);
            for x in VALUES {
                for k in Setting::ALL {
                    let vector = Event::observable(obs, x).meet(&Event::generator(near, k));
                    let p_vector = prob(space, &vector);
                    for m in Setting::ALL {
                        let far_gen = Event::generator(far, m);
                        let joint = prob(space, &vector.meet(&far_gen));
                        worst = worst.max((joint - p_vector * prob(space, &far_gen)).abs());
                    }
                }
            }
        }
    }
    Check::from_deviation(worst, space.tolerance())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    pub lig: Check,
    pub liog: Check,
    /// Set when LIG or LIOG fails. The nondetection-independence lines rest on LIG,
    /// the mixed lines on LIOG, so failing lines are
    /// then expected rather than anomalous.
    pub conditional_on_locality_failure: bool,
    pub lines: Vec<IdentityLine>,
}

impl FactorizationReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.status == LineStatus::Pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.lines.iter().filter_map(|l| l.deviation).fold(0.0, f64::max)
    }

    pub fn relation_passes(&self, relation: &str) -> bool {
        self.lines
            .iter()
            .filter(|l| l.relation == relation)
            .all(|l| l.status == LineStatus::Pass)
    }
}

/// Nondetection/detection factorizations across the two devices:
///
/// * `p(A_i=0, B_j=0) = p(A_i=0)·p(B_j=0) = p(a≠i, b≠j)`
/// * `p(A_i=ε, B_j=0) = p(A_i=ε)·p(B_j=0)`
/// * `p(A_i=0, B_j=ε′) = p(A_i=0)·p(B_j=ε′)`
pub fn check_detection_factorizations(space: &SampleSpace) -> FactorizationReport {
    let tol = space.tolerance();
    let lig = check_lig(space);
    let mut lines = Vec::new();
    for i in Setting::ALL {
        for j in Setting::ALL {
            let a0 = Event::observable(ObservableId::a(i), 0);
            let b0 = Event::observable(ObservableId::b(j), 0);
            let p00 = prob(space, &a0.meet(&b0));
            let pa0 = prob(space, &a0);
            let pb0 = prob(space, &b0);
            lines.push(IdentityLine::compare(
                "nondetection-independence",
                format!("p(A{i}=0, B{j}=0) = p(A{i}=0) p(B{j}=0)"),
                p00,
                pa0 * pb0,
                tol,
            ));
            let not_cell = Event::generator_not(Side::A, i).meet(&Event::generator_not(Side::B, j));
            lines.push(IdentityLine::compare(
                "nondetection-independence",
                format!("p(A{i}=0, B{j}=0) = p(a!={i}, b!={j})"),
                p00,
                prob(space, &not_cell),
                tol,
            ));
            for x in Outcome::ALL {
                let ax = Event::outcome(ObservableId::a(i), x);
                lines.push(IdentityLine::compare(
                    "mixed-independence",
                    format!("p(A{i}={x}1, B{j}=0) = p(A{i}={x}1) p(B{j}=0)"),
                    prob(space, &ax.meet(&b0)),
                    prob(space, &ax) * pb0,
                    tol,
                ));
            }
            for y in Outcome::ALL {
                let by = Event::outcome(ObservableId::b(j), y);
                lines.push(IdentityLine::compare(
                    "mixed-independence",
                    format!("p(A{i}=0, B{j}={y}1) = p(A{i}=0) p(B{j}={y}1)"),
                    prob(space, &a0.meet(&by)),
                    pa0 * prob(space, &by),
                    tol,
                ));
            }
        }
    }
    let liog = check_liog(space);
    FactorizationReport {
        conditional_on_locality_failure: !lig.holds || !liog.holds,
        lig,
        liog,
        lines,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalConsistencyReport {
    pub liog: Check,
    /// `p(A_i=x) = Σ_y p(A_i=x, B_j=y)` and the B-side mirror; holds in any measure.
    pub absolute: Vec<IdentityLine>,
    /// `p(A_i=x | b=m) = p(A_i=x)` and `p(A_i=x | a=k, b=m) = p(A_i=x | a=k)`,
    /// with B-side mirrors; consequences of LIOG.
    pub conditional: Vec<IdentityLine>,
}

impl MarginalConsistencyReport {
    pub fn absolute_holds(&self) -> bool {
        self.absolute.iter().all(|l| l.status == LineStatus::Pass)
    }

    pub fn conditional_holds(&self) -> bool {
        self.conditional.iter().all(|l| l.status != LineStatus::Fail)
    }

    pub fn max_conditional_deviation(&self) -> f64 {
        self.conditional.iter().filter_map(|l| l.deviation).fold(0.0, f64::max)
    }
}

pub fn check_marginal_consistency(space: &SampleSpace) -> MarginalConsistencyReport {
    let tol = space.tolerance();
    let mut absolute = Vec::new();
    let mut conditional = Vec::new();
    let gen = |side: Side| if side == Side::A { "a" } else { "b" };

    for (near, far) in [(Side::A, Side::B), (Side::B, Side::A)] {
        for i in Setting::ALL {
            let obs = ObservableId::new(near, i);
            for x in VALUES {
                let e = Event::observable(obs, x);
                let single = prob(space, &e);
                for j in Setting::ALL {
                    let other = ObservableId::new(far, j);
                    let summed: f64 = VALUES
                        .iter()
                        .map(|&y| prob(space, &e.meet(&Event::observable(other, y))))
                        .sum();
                    absolute.push(IdentityLine::compare(
                        "absolute-marginal",
                        format!("p({obs}={x}) = sum_y p({obs}={x}, {other}=y)"),
                        single,
                        summed,
                        tol,
                    ));
                }
                for m in Setting::ALL {
                    let far_gen = Event::generator(far, m);
                    conditional.push(IdentityLine::compare_conditional(
                        "conditional-reduction",
                        format!("p({obs}={x} | {}={m}) = p({obs}={x})", gen(far)),
                        cond_prob(space, &e, &far_gen),
                        Ok(single),
                        tol,
                    ));
                    for k in Setting::ALL {
                        let near_gen = Event::generator(near, k);
                        conditional.push(IdentityLine::compare_conditional(
                            "conditional-reduction",
                            format!(
                                "p({obs}={x} | {}={k}, {}={m}) = p({obs}={x} | {}={k})",
                                gen(near),
                                gen(far),
                                gen(near)
                            ),
                            cond_prob(space, &e, &near_gen.meet(&far_gen)),
                            cond_prob(space, &e, &near_gen),
                            tol,
                        ));
                    }
                }
            }
        }
    }

    MarginalConsistencyReport {
        liog: check_liog(space),
        absolute,
        conditional,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalConsistencyReport {
    pub holds: bool,
    /// Worst `|p(A_i=ε | a=i) − Σ_ε′ p(A_i=ε, B_j=ε′ | a=i, b=j)|` over both sides.
    pub max_deviation: f64,
    /// Worst difference between one-side marginals of blocks sharing that
    /// side's setting. Nonzero means the conditional data signal.
    pub signaling: f64,
    pub lines: Vec<IdentityLine>,
}

/// `p(A_i=ε | a=i) = Σ_ε′ p(A_i=ε, B_j=ε′ | a=i, b=j)` for every `(i, j, ε)`,
/// and the B-side mirror. Requires every setting pair to have positive weight.
pub fn check_conditional_marginal_consistency(space: &SampleSpace) -> Result<ConditionalConsistencyReport> {
    let tol = space.tolerance();
    for a in Setting::ALL {
        for b in Setting::ALL {
            if space.settings().weight(a, b) <= tol {
                return Err(Error::NullSetting { a, b });
            }
        }
    }

    let mut lines = Vec::new();
    for i in Setting::ALL {
        for j in Setting::ALL {
            let cell = Event::settings(i, j);
            for x in Outcome::ALL {
                let e = Event::outcome(ObservableId::a(i), x);
                let lhs = cond_prob(space, &e, &Event::generator(Side::A, i))?;
                let mut rhs = 0.0;
                for y in Outcome::ALL {
                    rhs += cond_prob(space, &e.meet(&Event::outcome(ObservableId::b(j), y)), &cell)?;
                }
                lines.push(IdentityLine::compare(
                    "conditional-marginal",
                    format!("p(A{i}={x}1 | a={i}) = sum_e' p(A{i}={x}1, B{j}=e' | a={i}, b={j})"),
                    lhs,
                    rhs,
                    tol,
                ));
            }
            for y in Outcome::ALL {
                let e = Event::outcome(ObservableId::b(j), y);
                let lhs = cond_prob(space, &e, &Event::generator(Side::B, j))?;
                let mut rhs = 0.0;
                for x in Outcome::ALL {
                    rhs += cond_prob(space, &e.meet(&Event::outcome(ObservableId::a(i), x)), &cell)?;
                }
                lines.push(IdentityLine::compare(
                    "conditional-marginal",
                    format!("p(B{j}={y}1 | b={j}) = sum_e p(A{i}=e, B{j}={y}1 | a={i}, b={j})"),
                    lhs,
                    rhs,
                    tol,
                ));
            }
        }
    }
    let max_deviation = lines.iter().filter_map(|l| l.deviation).fold(0.0, f64::max);
    Ok(ConditionalConsistencyReport {
        holds: lines.iter().all(|l| l.status == LineStatus::Pass),
        max_deviation,
        signaling: space.table().marginal_discrepancy(),
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ConditionalTable, OutcomeBlock, SettingDistribution};

    fn space(weights: SettingDistribution, table: ConditionalTable) -> SampleSpace {
        SampleSpace::build(weights, table).unwrap()
    }

    fn correlated() -> SettingDistribution {
        SettingDistribution::new([[0.5, 0.0], [0.0, 0.5]]).unwrap()
    }

    fn any_table() -> ConditionalTable {
        ConditionalTable::uniform_blocks(OutcomeBlock::product(0.35, 0.6).unwrap())
    }

    #[test]
    fn lig_uniform_and_product() {
        let c = check_lig(&space(SettingDistribution::uniform(), any_table()));
        assert!(c.holds);
        assert_eq!(c.max_deviation, 0.0);
        let p = SettingDistribution::product([0.3, 0.7], [0.6, 0.4]).unwrap();
        assert!(check_lig(&space(p, any_table())).holds);
    }

    #[test]
    fn lig_fails_for_correlated_settings() {
        let c = check_lig(&space(correlated(), any_table()));
        assert!(!c.holds);
        assert_eq!(c.max_deviation, 0.25);
    }

    #[test]
    fn liog_cases() {
        let p = SettingDistribution::product([0.3, 0.7], [0.6, 0.4]).unwrap();
        assert!(check_liog(&space(p, any_table())).holds);
        assert!(!check_liog(&space(correlated(), any_table())).holds);
        let point = SettingDistribution::point(Setting::Two, Setting::One);
        assert!(check_liog(&space(point, any_table())).holds);
    }

    #[test]
    fn factorizations_for_uniform_pass() {
        let r = check_detection_factorizations(&space(SettingDistribution::uniform(), any_table()));
        assert!(r.all_pass());
        assert!(!r.conditional_on_locality_failure);
        assert_eq!(r.lines.len(), 4 * 6);
    }

    #[test]
    fn detection_factorization_needs_liog() {
        // uniform settings but B-marginal of A2 differs between b=1 and b=2
        let t = ConditionalTable::from_entries([[[0.25; 4], [0.25; 4]], [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]])
            .unwrap();
        let r = check_detection_factorizations(&space(SettingDistribution::uniform(), t));
        assert!(r.lig.holds && !r.liog.holds);
        assert!(r.conditional_on_locality_failure);
        assert!(r.relation_passes("nondetection-independence"));
        assert!(!r.relation_passes("mixed-independence"));
    }

    #[test]
    fn factorization_fails_for_correlated_settings() {
        let r = check_detection_factorizations(&space(correlated(), any_table()));
        assert!(r.conditional_on_locality_failure);
        let line = r
            .lines
            .iter()
            .find(|l| l.statement == "p(A1=0, B1=0) = p(A1=0) p(B1=0)")
            .unwrap();
        assert_eq!(line.lhs, Some(0.5));
        assert_eq!(line.rhs, Some(0.25));
        assert_eq!(line.status, LineStatus::Fail);
    }

    #[test]
    fn marginal_consistency_product_settings() {
        let p = SettingDistribution::product([0.3, 0.7], [0.6, 0.4]).unwrap();
        let r = check_marginal_consistency(&space(p, any_table()));
        assert!(r.absolute_holds());
        assert!(r.conditional_holds());
    }

    #[test]
    fn marginal_consistency_correlated_settings() {
        let mut entries = [[[0.25; 4]; 2]; 2];
        entries[0][0] = [0.7, 0.1, 0.1, 0.1];
        let table = ConditionalTable::from_entries(entries).unwrap();
        let r = check_marginal_consistency(&space(correlated(), table));
        assert!(r.absolute_holds());
        assert!(!r.conditional_holds());
        assert!(r.max_conditional_deviation() > 0.1);
    }

    #[test]
    fn signaling_table_fails_conditional_consistency() {
        let mut entries = [[[0.25; 4]; 2]; 2];
        entries[0][0] = [1.0, 0.0, 0.0, 0.0];
        entries[0][1] = [0.0, 0.0, 0.0, 1.0];
        let table = ConditionalTable::from_entries(entries).unwrap();
        let r = check_conditional_marginal_consistency(&space(SettingDistribution::uniform(), table)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.signaling, 1.0);
        // p(A1=+1 | a=1) averages the two blocks, so each block is off by 1/2
        assert_eq!(r.max_deviation, 0.5);
    }

    #[test]
    fn equal_blocks_pass_conditional_consistency() {
        let r = check_conditional_marginal_consistency(&space(SettingDistribution::uniform(), any_table())).unwrap();
        assert!(r.holds);
        assert_eq!(r.signaling, 0.0);
    }

    #[test]
    fn conditional_consistency_needs_all_settings() {
        let err = check_conditional_marginal_consistency(&space(correlated(), any_table())).unwrap_err();
        assert!(matches!(err, Error::NullSetting { .. }));
    }
}
