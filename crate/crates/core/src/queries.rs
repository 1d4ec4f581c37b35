//! Exact probability queries by enumeration of the 16 atoms.
//!
//! Closed-form relations between absolute and conditional probabilities are
//! not used to answer queries; [`nondetection_identities`] instead checks them
//! against enumerated values.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{eval_generator, eval_observable, Atom, ObservableId, Outcome, SampleSpace, Setting, Side};

/// One atomic condition on an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `obs = value` with value in `{−1, 0, +1}`.
    Observable(ObservableId, i8),
    /// `generator = setting`.
    Generator(Side, Setting),
    /// `generator ≠ setting`.
    GeneratorNot(Side, Setting),
}

impl Clause {
    pub fn holds(&self, omega: &Atom) -> bool {
        match *self {
            Clause::Observable(obs, v) => eval_observable(obs, omega) == v,
            Clause::Generator(side, s) => eval_generator(side, omega) == s,
            Clause::GeneratorNot(side, s) => eval_generator(side, omega) != s,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gen = |side: Side| match side {
            Side::A => "a",
            Side::B => "b",
        };
        match self {
            Clause::Observable(obs, v) => write!(f, "{obs}={v}"),
            Clause::Generator(side, s) => write!(f, "{}={s}", gen(*side)),
            Clause::GeneratorNot(side, s) => write!(f, "{}!={s}", gen(*side)),
        }
    }
}

/// A conjunction of clauses. The empty conjunction is the whole space;
/// contradictory conjunctions denote the empty event.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Event {
    clauses: Vec<Clause>,
}

impl Event {
    pub fn all() -> Self {
        Event::default()
    }

    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        Event {
            clauses: clauses.into_iter().collect(),
        }
    }

    pub fn and(mut self, clause: Clause) -> Self {
        self.clauses.push(clause);
        self
    }

    /// Conjunction of both events.
    pub fn meet(&self, other: &Event) -> Event {
        let mut clauses = self.clauses.clone();
        clauses.extend_from_slice(&other.clauses);
        Event { clauses }
    }

    pub fn observable(obs: ObservableId, value: i8) -> Self {
        Event::all().and(Clause::Observable(obs, value))
    }

    pub fn outcome(obs: ObservableId, x: Outcome) -> Self {
        Self::observable(obs, x.value())
    }

    pub fn generator(side: Side, s: Setting) -> Self {
        Event::all().and(Clause::Generator(side, s))
    }

    pub fn generator_not(side: Side, s: Setting) -> Self {
        Event::all().and(Clause::GeneratorNot(side, s))
    }

    /// `a = i ∧ b = j`.
    pub fn settings(a: Setting, b: Setting) -> Self {
        Event::generator(Side::A, a).and(Clause::Generator(Side::B, b))
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn holds(&self, omega: &Atom) -> bool {
        self.clauses.iter().all(|c| c.holds(omega))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("Ω");
        }
        for (k, c) in self.clauses.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `Σ {p(ω) : e holds on ω}`.
pub fn prob(space: &SampleSpace, e: &Event) -> f64 {
    // fold from +0.0: an empty f64 sum is -0.0
    space
        .atoms()
        .filter(|(w, _)| e.holds(w))
        .fold(0.0, |acc, (_, p)| acc + p)
}

/// `p(e | given) = p(e ∧ given) / p(given)`.
///
/// Fails when `p(given)` is within the space's tolerance of zero.
pub fn cond_prob(space: &SampleSpace, e: &Event, given: &Event) -> Result<f64> {
    let denom = prob(space, given);
    if denom <= space.tolerance() {
        return Err(Error::ConditioningOnNull { probability: denom });
    }
    Ok(prob(space, &e.meet(given)) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One checked relation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityLine {
    /// Short name of the relation family (e.g. `"pair-table"`).
    pub relation: &'static str,
    pub statement: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub deviation: Option<f64>,
    pub status: LineStatus,
}

impl IdentityLine {
    pub(crate) fn compare(relation: &'static str, statement: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let deviation = (lhs - rhs).abs();
        IdentityLine {
            relation,
            statement,
            lhs: Some(lhs),
            rhs: Some(rhs),
            deviation: Some(deviation),
            status: if deviation <= tol {
                LineStatus::Pass
            } else {
                LineStatus::Fail
            },
        }
    }

    pub(crate) fn not_applicable(relation: &'static str, statement: String) -> Self {
        IdentityLine {
            relation,
            statement,
            lhs: None,
            rhs: None,
            deviation: None,
            status: LineStatus::NotApplicable,
        }
    }

    /// Compare when every conditional probability involved is defined.
    pub(crate) fn compare_conditional(
        relation: &'static str,
        statement: String,
        lhs: Result<f64>,
        rhs: Result<f64>,
        tol: f64,
    ) -> Self {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => Self::compare(relation, statement, l, r, tol),
            _ => Self::not_applicable(relation, statement),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lines: Vec<IdentityLine>,
}

impl IdentityReport {
    pub fn all_applicable_pass(&self) -> bool {
        self.lines.iter().all(|l| l.status != LineStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityLine> {
        self.lines.iter().filter(|l| l.status == LineStatus::Fail)
    }

    pub fn count(&self, status: LineStatus) -> usize {
        self.lines.iter().filter(|l| l.status == status).count()
    }

    pub fn max_deviation(&self) -> f64 {
        self.lines.iter().filter_map(|l| l.deviation).fold(0.0, f64::max)
    }
}

/// Checks the relations between nondetection, detection and setting
/// selection that follow from the construction:
///
/// * `p(A_i=0) = p(a≠i)` and `p(B_j=0) = p(b≠j)`
/// * `p(A_i=ε) = p(a=i)·p(A_i=ε | a=i)` and its rearrangement
/// * `p(A_i=ε, B_j=ε′ | a=i, b=j) = p(A_i=ε, B_j=ε′) / p(a=i, b=j) = q(ε,ε′|i,j)`
/// * `p(A_i=0, B_j=0) = p(A_i=0, B_j=0 | a≠i, b≠j)·p(a≠i, b≠j)`
/// * `p(a≠i, b≠j | A_i=0, B_j=0) = 1`
/// * the mixed detection/nondetection forms.
///
/// Lines whose conditioning event is null are reported as not applicable.
pub fn nondetection_identities(space: &SampleSpace) -> IdentityReport {
    let tol = space.tolerance();
    let mut lines = Vec::new();
    let a_not = |i: Setting| Event::generator_not(Side::A, i);
    let b_not = |j: Setting| Event::generator_not(Side::B, j);

    for i in Setting::ALL {
        lines.push(IdentityLine::compare(
            "a-nondetection",
            format!("p(A{i}=0) = p(a!={i})"),
            prob(space, &Event::observable(ObservableId::a(i), 0)),
            prob(space, &a_not(i)),
            tol,
        ));
        lines.push(IdentityLine::compare(
            "b-nondetection",
            format!("p(B{i}=0) = p(b!={i})"),
            prob(space, &Event::observable(ObservableId::b(i), 0)),
            prob(space, &b_not(i)),
            tol,
        ));
    }

    for i in Setting::ALL {
        let given = Event::generator(Side::A, i);
        let p_given = prob(space, &given);
        for x in Outcome::ALL {
            let e = Event::outcome(ObservableId::a(i), x);
            let absolute = prob(space, &e);
            let conditional = cond_prob(space, &e, &given);
            lines.push(IdentityLine::compare_conditional(
                "single-absolute",
                format!("p(A{i}={x}1) = p(a={i}) p(A{i}={x}1 | a={i})"),
                Ok(absolute),
                conditional.clone().map(|c| p_given * c),
                tol,
            ));
            lines.push(IdentityLine::compare_conditional(
                "single-conditional",
                format!("p(A{i}={x}1 | a={i}) = p(A{i}={x}1) / p(a={i})"),
                conditional,
                Ok(absolute / p_given),
                tol,
            ));
        }
    }

    for i in Setting::ALL {
        for j in Setting::ALL {
            let cell = Event::settings(i, j);
            let p_cell = prob(space, &cell);
            for x in Outcome::ALL {
                for y in Outcome::ALL {
                    let e = Event::outcome(ObservableId::a(i), x).meet(&Event::outcome(ObservableId::b(j), y));
                    let conditional = cond_prob(space, &e, &cell);
                    let q = space.table().q(i, j, x, y);
                    lines.push(IdentityLine::compare_conditional(
                        "pair-conditional",
                        format!("p(A{i}={x}1, B{j}={y}1 | a={i}, b={j}) = p(A{i}={x}1, B{j}={y}1) / p(a={i}, b={j})"),
                        conditional.clone(),
                        Ok(prob(space, &e) / p_cell),
                        tol,
                    ));
                    lines.push(IdentityLine::compare_conditional(
                        "pair-table",
                        format!("p(A{i}={x}1, B{j}={y}1 | a={i}, b={j}) = q({x},{y}|{i},{j})"),
                        conditional,
                        Ok(q),
                        tol,
                    ));
                }
            }
        }
    }

    for i in Setting::ALL {
        for j in Setting::ALL {
            let both_zero = Event::observable(ObservableId::a(i), 0).meet(&Event::observable(ObservableId::b(j), 0));
            let not_cell = a_not(i).meet(&b_not(j));
            let p_not_cell = prob(space, &not_cell);
            lines.push(IdentityLine::compare_conditional(
                "double-nondetection",
                format!("p(A{i}=0, B{j}=0) = p(A{i}=0, B{j}=0 | a!={i}, b!={j}) p(a!={i}, b!={j})"),
                Ok(prob(space, &both_zero)),
                cond_prob(space, &both_zero, &not_cell).map(|c| c * p_not_cell),
                tol,
            ));
            lines.push(IdentityLine::compare_conditional(
                "nondetection-unselected",
                format!("p(a!={i}, b!={j} | A{i}=0, B{j}=0) = 1"),
                cond_prob(space, &not_cell, &both_zero),
                Ok(1.0),
                tol,
            ));

            for x in Outcome::ALL {
                let e = Event::outcome(ObservableId::a(i), x).meet(&Event::observable(ObservableId::b(j), 0));
                let given = Event::generator(Side::A, i).meet(&b_not(j));
                let p_given = prob(space, &given);
                lines.push(IdentityLine::compare_conditional(
                    "detection-nondetection",
                    format!("p(A{i}={x}1, B{j}=0) = p(A{i}={x}1, B{j}=0 | a={i}, b!={j}) p(a={i}, b!={j})"),
                    Ok(prob(space, &e)),
                    cond_prob(space, &e, &given).map(|c| c * p_given),
                    tol,
                ));
            }
            for y in Outcome::ALL {
                let e = Event::observable(ObservableId::a(i), 0).meet(&Event::outcome(ObservableId::b(j), y));
                let given = a_not(i).meet(&Event::generator(Side::B, j));
                let p_given = prob(space, &given);
                lines.push(IdentityLine::compare_conditional(
                    "nondetection-detection",
                    format!("p(A{i}=0, B{j}={y}1) = p(A{i}=0, B{j}={y}1 | a!={i}, b={j}) p(a!={i}, b={j})"),
                    Ok(prob(space, &e)),
                    cond_prob(space, &e, &given).map(|c| c * p_given),
                    tol,
                ));
            }
        }
    }

    IdentityReport { lines }
}

/// Largest probability of any event assigning nonzero values to both
/// observables on the same side: pairs `(A₁, A₂)`, `(B₁, B₂)` and every
/// quadruple `(x₁, x₂, y₁, y₂)` with `x₁x₂ ≠ 0` or `y₁y₂ ≠ 0`. Always zero.
pub fn counterfactual_mass(space: &SampleSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for e1 in Outcome::ALL {
        for e2 in Outcome::ALL {
            let pa = prob(
                space,
                &Event::outcome(ObservableId::A1, e1).meet(&Event::outcome(ObservableId::A2, e2)),
            );
            let pb = prob(
                space,
                &Event::outcome(ObservableId::B1, e1).meet(&Event::outcome(ObservableId::B2, e2)),
            );
            worst = worst.max(pa).max(pb);
        }
    }
    const VALUES: [i8; 3] = [-1, 0, 1];
    for x1 in VALUES {
        for x2 in VALUES {
            for y1 in VALUES {
                for y2 in VALUES {
                    if x1 * x2 == 0 && y1 * y2 == 0 {
                        continue;
                    }
                    let e = Event::from_clauses([
                        Clause::Observable(ObservableId::A1, x1),
                        Clause::Observable(ObservableId::A2, x2),
                        Clause::Observable(ObservableId::B1, y1),
                        Clause::Observable(ObservableId::B2, y2),
                    ]);
                    worst = worst.max(prob(space, &e));
                }
            }
        }
    }
    worst
}
