//! Analysis reports: everything the library can say about one sample space,
//! as stable JSON or as text.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::chsh::{
    chsh_criterion, chsh_report, fine_feasibility, ChshInequality, ChshReport, FineOptions, FineVerdict,
};
use crate::locality::{
    check_conditional_marginal_consistency, check_detection_factorizations, check_lig, check_liog,
    check_marginal_consistency, Check,
};
use crate::quantum::TsirelsonScan;
use crate::queries::{cond_prob, counterfactual_mass, nondetection_identities, prob, Event, IdentityLine, LineStatus};
use crate::space::{ConditionalTable, ObservableId, SampleSpace, Setting};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingsSummary {
    pub weights: [[f64; 2]; 2],
    pub marginal_a: [f64; 2],
    pub marginal_b: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceSummary {
    pub total_mass: f64,
    pub normalized: bool,
    /// No nonzero value on an unselected observable.
    pub no_background: bool,
    /// No nondetection on a selected observable.
    pub full_efficiency: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
    pub max_deviation: f64,
    pub failures: Vec<IdentityLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationSummary {
    pub all_pass: bool,
    pub conditional_on_locality_failure: bool,
    pub max_deviation: f64,
    pub failures: Vec<IdentityLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalSummary {
    pub absolute_holds: bool,
    pub conditional_holds: bool,
    pub max_conditional_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionalConsistencySummary {
    Checked {
        holds: bool,
        max_deviation: f64,
        signaling: f64,
    },
    NotApplicable {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalitySummary {
    pub lig: Check,
    pub liog: Check,
    pub factorizations: FactorizationSummary,
    pub marginal_consistency: MarginalSummary,
    pub conditional_marginal_consistency: ConditionalConsistencySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub violated: Option<ChshInequality>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FineSummary {
    Decided {
        verdict: FineVerdict,
        /// Largest re-marginalization error of the witness, when feasible.
        witness_error: Option<f64>,
        criterion: CriterionSummary,
        agrees_with_criterion: bool,
    },
    NotApplicable {
        reason: String,
        criterion: Option<CriterionSummary>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub source: String,
    pub tolerance: f64,
    pub settings: SettingsSummary,
    /// Conditional blocks `q(+,+), q(+,−), q(−,+), q(−,−)`, keyed `q11` .. `q22`.
    pub table: serde_json::Map<String, Value>,
    pub space: SpaceSummary,
    pub identities: IdentitySummary,
    pub counterfactual_mass: f64,
    pub locality: LocalitySummary,
    pub chsh: ChshReport,
    pub fine: FineSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsirelson: Option<TsirelsonScan>,
    pub undefined_cells: Vec<String>,
    pub structural_ok: bool,
}

/// Run every check on `space`. `fine_table` is the table handed to the
/// joint-distribution test; `None` when some block is undefined.
pub fn analyze(
    source: String,
    space: &SampleSpace,
    fine_table: Option<&ConditionalTable>,
    defined_blocks: [[bool; 2]; 2],
    undefined_cells: Vec<String>,
    fine_options: &FineOptions,
    tsirelson: Option<TsirelsonScan>,
) -> AnalysisReport {
    let tol = space.tolerance();
    let s = space.settings();
    let settings = SettingsSummary {
        weights: s.weights(),
        marginal_a: Setting::ALL.map(|i| s.marginal_a(i)),
        marginal_b: Setting::ALL.map(|j| s.marginal_b(j)),
    };

    let mut table = serde_json::Map::new();
    for a in Setting::ALL {
        for b in Setting::ALL {
            let v = if defined_blocks[a.index()][b.index()] {
                serde_json::to_value(space.table().block(a, b).entries()).expect("floats serialize")
            } else {
                Value::Null
            };
            table.insert(format!("q{a}{b}"), v);
        }
    }

    let space_summary = structural_summary(space);

    let ids = nondetection_identities(space);
    let identities = IdentitySummary {
        checked: ids.lines.len(),
        passed: ids.count(LineStatus::Pass),
        failed: ids.count(LineStatus::Fail),
        not_applicable: ids.count(LineStatus::NotApplicable),
        max_deviation: ids.max_deviation(),
        failures: ids.failures().cloned().collect(),
    };

    let fact = check_detection_factorizations(space);
    let marg = check_marginal_consistency(space);
    let locality = LocalitySummary {
        lig: check_lig(space),
        liog: check_liog(space),
        factorizations: FactorizationSummary {
            all_pass: fact.all_pass(),
            conditional_on_locality_failure: fact.conditional_on_locality_failure,
            max_deviation: fact.max_deviation(),
            failures: fact
                .lines
                .iter()
                .filter(|l| l.status == LineStatus::Fail)
                .cloned()
                .collect(),
        },
        marginal_consistency: MarginalSummary {
            absolute_holds: marg.absolute_holds(),
            conditional_holds: marg.conditional_holds(),
            max_conditional_deviation: marg.max_conditional_deviation(),
        },
        conditional_marginal_consistency: match check_conditional_marginal_consistency(space) {
            Ok(r) => ConditionalConsistencySummary::Checked {
                holds: r.holds,
                max_deviation: r.max_deviation,
                signaling: r.signaling,
            },
            Err(e) => ConditionalConsistencySummary::NotApplicable { reason: e.to_string() },
        },
    };

    let chsh = chsh_report(space);
    let fine = fine_summary(fine_table, fine_options);
    let counterfactual_mass = counterfactual_mass(space);

    let structural_ok = space_summary.normalized
        && space_summary.no_background
        && space_summary.full_efficiency
        && identities.failed == 0
        && counterfactual_mass == 0.0
        && locality.marginal_consistency.absolute_holds
        && chsh.abs_strong.holds
        && chsh.abs_classical.holds;

    AnalysisReport {
        source,
        tolerance: tol,
        settings,
        table,
        space: space_summary,
        identities,
        counterfactual_mass,
        locality,
        chsh,
        fine,
        tsirelson,
        undefined_cells,
        structural_ok,
    }
}

fn structural_summary(space: &SampleSpace) -> SpaceSummary {
    let tol = space.tolerance();
    let total_mass = space.total_mass();
    let mut no_background = true;
    let mut full_efficiency = true;
    for obs in ObservableId::ALL {
        let gen_is = Event::generator(obs.side, obs.setting);
        let gen_not = Event::generator_not(obs.side, obs.setting);
        for v in [-1, 1] {
            if prob(space, &Event::observable(obs, v).meet(&gen_not)) != 0.0 {
                no_background = false;
            }
        }
        if let Ok(p) = cond_prob(space, &Event::observable(obs, 0), &gen_is) {
            if p != 0.0 {
                full_efficiency = false;
            }
        }
    }
    SpaceSummary {
        total_mass,
        normalized: (total_mass - 1.0).abs() <= tol,
        no_background,
        full_efficiency,
    }
}

fn criterion(table: &ConditionalTable, tol: f64) -> CriterionSummary {
    match chsh_criterion(table, tol) {
        Some((i, v)) => CriterionSummary {
            violated: Some(i),
            value: Some(v),
        },
        None => CriterionSummary {
            violated: None,
            value: None,
        },
    }
}

fn fine_summary(table: Option<&ConditionalTable>, options: &FineOptions) -> FineSummary {
    let Some(table) = table else {
        return FineSummary::NotApplicable {
            reason: "some setting pair has no conditional data".into(),
            criterion: None,
        };
    };
    let crit = criterion(table, options.tolerance);
    match fine_feasibility(table, options) {
        Ok(verdict) => {
            let witness_error = match &verdict {
                FineVerdict::Feasible { witness } => Some(witness.max_marginal_error(table)),
                FineVerdict::Infeasible { .. } => None,
            };
            FineSummary::Decided {
                agrees_with_criterion: verdict.is_feasible() == crit.violated.is_none(),
                verdict,
                witness_error,
                criterion: crit,
            }
        }
        Err(e) => FineSummary::NotApplicable {
            reason: e.to_string(),
            criterion: Some(crit),
        },
    }
}

/// Round every float to 12 significant digits so reports diff cleanly.
pub fn stable_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.11e}").parse().expect("float round-trips");
            // -0.0 prints as "-0.0"; normalize
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), fmt_num)
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "source: {}", r.source);
    let _ = writeln!(o, "tolerance: {}", fmt_num(r.tolerance));
    let w = r.settings.weights;
    let _ = writeln!(
        o,
        "settings p(a,b): 11={} 12={} 21={} 22={}",
        fmt_num(w[0][0]),
        fmt_num(w[0][1]),
        fmt_num(w[1][0]),
        fmt_num(w[1][1])
    );
    for (key, v) in &r.table {
        let _ = match v {
            Value::Array(xs) => writeln!(
                o,
                "table {key}: {}",
                xs.iter()
                    .map(|x| fmt_num(x.as_f64().unwrap_or(f64::NAN)))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            _ => writeln!(o, "table {key}: undefined"),
        };
    }
    let _ = writeln!(
        o,
        "space: total mass {} ({}), no background {}, full efficiency {}",
        fmt_num(r.space.total_mass),
        verdict_word(r.space.normalized),
        verdict_word(r.space.no_background),
        verdict_word(r.space.full_efficiency)
    );
    let _ = writeln!(
        o,
        "identities: {} checked, {} pass, {} fail, {} not applicable (max deviation {})",
        r.identities.checked,
        r.identities.passed,
        r.identities.failed,
        r.identities.not_applicable,
        fmt_num(r.identities.max_deviation)
    );
    for l in &r.identities.failures {
        let _ = writeln!(o, "  FAIL {}: {}", l.relation, l.statement);
    }
    let _ = writeln!(o, "counterfactual mass: {}", fmt_num(r.counterfactual_mass));

    let loc = &r.locality;
    let _ = writeln!(
        o,
        "LIG: {} (max deviation {})",
        verdict_word(loc.lig.holds),
        fmt_num(loc.lig.max_deviation)
    );
    let _ = writeln!(
        o,
        "LIOG: {} (max deviation {})",
        verdict_word(loc.liog.holds),
        fmt_num(loc.liog.max_deviation)
    );
    let _ = writeln!(
        o,
        "detection factorizations: {} (max deviation {}){}",
        verdict_word(loc.factorizations.all_pass),
        fmt_num(loc.factorizations.max_deviation),
        if loc.factorizations.conditional_on_locality_failure {
            ", locality hypothesis fails"
        } else {
            ""
        }
    );
    let _ = writeln!(
        o,
        "marginal consistency: absolute {}, conditional reductions {} (max deviation {})",
        verdict_word(loc.marginal_consistency.absolute_holds),
        verdict_word(loc.marginal_consistency.conditional_holds),
        fmt_num(loc.marginal_consistency.max_conditional_deviation)
    );
    let _ = match &loc.conditional_marginal_consistency {
        ConditionalConsistencySummary::Checked {
            holds,
            max_deviation,
            signaling,
        } => writeln!(
            o,
            "conditional marginal consistency: {} (max deviation {}, signaling {})",
            verdict_word(*holds),
            fmt_num(*max_deviation),
            fmt_num(*signaling)
        ),
        ConditionalConsistencySummary::NotApplicable { reason } => {
            writeln!(o, "conditional marginal consistency: not applicable ({reason})")
        }
    };

    let c = &r.chsh.correlations;
    for a in Setting::ALL {
        for b in Setting::ALL {
            let _ = writeln!(
                o,
                "correlation {a}{b}: C = {}, Q = {}",
                fmt_num(c.c(a, b)),
                fmt_opt(c.q(a, b))
            );
        }
    }
    let _ = writeln!(
        o,
        "S_abs = {}  |S_abs| <= 2: {}  |S_abs| <= 1: {}",
        fmt_num(r.chsh.s_abs),
        verdict_word(r.chsh.abs_classical.holds),
        verdict_word(r.chsh.abs_strong.holds)
    );
    let _ = match (r.chsh.s_cond, r.chsh.cond_classical, r.chsh.cond_tsirelson) {
        (Some(s), Some(cl), Some(ts)) => writeln!(
            o,
            "S_cond = {}  |S_cond| <= 2: {}  |S_cond| <= 2sqrt2: {}",
            fmt_num(s),
            if cl.holds { "holds" } else { "violated" },
            if ts.holds { "holds" } else { "violated" }
        ),
        _ => writeln!(o, "S_cond = undefined"),
    };
    let _ = match &r.fine {
        FineSummary::Decided {
            verdict: FineVerdict::Feasible { .. },
            witness_error,
            agrees_with_criterion,
            ..
        } => writeln!(
            o,
            "Fine: feasible (witness error {}), CHSH criterion agrees: {}",
            fmt_opt(*witness_error),
            agrees_with_criterion
        ),
        FineSummary::Decided {
            verdict: FineVerdict::Infeasible { violated, value, .. },
            agrees_with_criterion,
            ..
        } => writeln!(
            o,
            "Fine: infeasible, violated {violated} (value {}), CHSH criterion agrees: {}",
            fmt_num(*value),
            agrees_with_criterion
        ),
        FineSummary::NotApplicable { reason, .. } => writeln!(o, "Fine: not applicable ({reason})"),
    };
    if let Some(t) = &r.tsirelson {
        let _ = writeln!(
            o,
            "Tsirelson scan: max |S_cond| = {} over {} grid points",
            fmt_num(t.max_abs_chsh),
            t.points
        );
    }
    if !r.undefined_cells.is_empty() {
        let _ = writeln!(
            o,
            "undefined cells ({}): {}",
            r.undefined_cells.len(),
            r.undefined_cells.join(" ")
        );
    }
    let _ = writeln!(o, "structural invariants: {}", verdict_word(r.structural_ok));
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(fmt_num(2.0 * std::f64::consts::SQRT_2), "2.82842712475");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-0.0), "0");
        let json = stable_json(&serde_json::json!({"x": std::f64::consts::PI, "y": [1e-20, -0.0]}));
        assert!(json.contains("3.14159265359"), "{json}");
        assert!(json.contains("1e-20"), "{json}");
    }
}
