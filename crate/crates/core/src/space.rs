//! The finite probability space of a two-party, two-setting experiment.
//!
//! Each trial selects a setting pair `(a, b)` with the random generators and
//! produces one `±1` outcome on each side. Observables whose setting was not
//! selected take the nondetection value `0`. Because there is no background
//! and detection is perfect, every atom with a nonzero value on an unselected
//! observable (or a zero value on a selected one) has measure zero, so the
//! space is represented by the 16 atoms `(i, j, ε, ε′)` alone and the six
//! random variables `A₁, A₂, B₁, B₂, a, b` are evaluated functionally.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for normalization and equality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A setting index, `1` or `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    One,
    Two,
}

impl Setting {
    pub const ALL: [Setting; 2] = [Setting::One, Setting::Two];

    /// Zero-based position, for array indexing.
    pub fn index(self) -> usize {
        match self {
            Setting::One => 0,
            Setting::Two => 1,
        }
    }

    /// The label used in formulas and files (`1` or `2`).
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: i64) -> Option<Self> {
        match n {
            1 => Some(Setting::One),
            2 => Some(Setting::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Setting::One => Setting::Two,
            Setting::Two => Setting::One,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A detected outcome, `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+",
            Outcome::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// One of the four observables `A₁, A₂, B₁, B₂`.
///
/// Observables carry a single setting index; there is no way to construct an
/// observable that depends on the far-side setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservableId {
    pub side: Side,
    pub setting: Setting,
}

impl ObservableId {
    pub const A1: ObservableId = ObservableId::new(Side::A, Setting::One);
    pub const A2: ObservableId = ObservableId::new(Side::A, Setting::Two);
    pub const B1: ObservableId = ObservableId::new(Side::B, Setting::One);
    pub const B2: ObservableId = ObservableId::new(Side::B, Setting::Two);
    pub const ALL: [ObservableId; 4] = [Self::A1, Self::A2, Self::B1, Self::B2];

    pub const fn new(side: Side, setting: Setting) -> Self {
        ObservableId { side, setting }
    }

    pub fn a(setting: Setting) -> Self {
        Self::new(Side::A, setting)
    }

    pub fn b(setting: Setting) -> Self {
        Self::new(Side::B, setting)
    }
}

impl fmt::Display for ObservableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side, self.setting)
    }
}

/// Joint law of the two setting generators, `p(a=i, b=j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SettingDistribution {
    weights: [[f64; 2]; 2],
}

impl SettingDistribution {
    /// `weights[i][j]` is `p(a=i+1, b=j+1)`.
    pub fn new(weights: [[f64; 2]; 2]) -> Result<Self> {
        Self::with_tolerance(weights, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(weights: [[f64; 2]; 2], tolerance: f64) -> Result<Self> {
        check_probability_vector(weights.iter().flatten().copied(), tolerance)
            .map_err(|e| Error::InvalidDistribution(format!("setting weights: {e}")))?;
        Ok(SettingDistribution { weights })
    }

    pub fn uniform() -> Self {
        SettingDistribution {
            weights: [[0.25; 2]; 2],
        }
    }

    /// Independent generators with the given single-side laws.
    pub fn product(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            check_probability_vector(v.iter().copied(), DEFAULT_TOLERANCE)
                .map_err(|e| Error::InvalidDistribution(format!("generator {name}: {e}")))?;
        }
        Self::new([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
    }

    /// All weight on a single setting pair.
    pub fn point(a: Setting, b: Setting) -> Self {
        let mut weights = [[0.0; 2]; 2];
        weights[a.index()][b.index()] = 1.0;
        SettingDistribution { weights }
    }

    pub fn weight(&self, a: Setting, b: Setting) -> f64 {
        self.weights[a.index()][b.index()]
    }

    pub fn weights(&self) -> [[f64; 2]; 2] {
        self.weights
    }

    /// `p(a=i) = Σ_j p(a=i, b=j)`.
    pub fn marginal_a(&self, a: Setting) -> f64 {
        self.weights[a.index()].iter().sum()
    }

    /// `p(b=j) = Σ_i p(a=i, b=j)`.
    pub fn marginal_b(&self, b: Setting) -> f64 {
        self.weights.iter().map(|row| row[b.index()]).sum()
    }

    pub fn marginal(&self, side: Side, setting: Setting) -> f64 {
        match side {
            Side::A => self.marginal_a(setting),
            Side::B => self.marginal_b(setting),
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().flatten().all(|&w| w == 0.25)
    }
}

/// Conditional outcome law `q(ε, ε′ | i, j)` for a single setting pair.
///
/// Entries are stored in the order `(+,+), (+,−), (−,+), (−,−)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeBlock {
    q: [f64; 4],
}

impl OutcomeBlock {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        Self::with_tolerance(q, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(q: [f64; 4], tolerance: f64) -> Result<Self> {
        check_probability_vector(q.iter().copied(), tolerance).map_err(Error::InvalidDistribution)?;
        Ok(OutcomeBlock { q })
    }

    /// Block with `q(+,+) = q(−,−) = 1/2`.
    pub fn perfectly_correlated() -> Self {
        OutcomeBlock {
            q: [0.5, 0.0, 0.0, 0.5],
        }
    }

    pub fn uncorrelated() -> Self {
        OutcomeBlock { q: [0.25; 4] }
    }

    /// Point mass on a single outcome pair.
    pub fn deterministic(x: Outcome, y: Outcome) -> Self {
        let mut q = [0.0; 4];
        q[Self::slot(x, y)] = 1.0;
        OutcomeBlock { q }
    }

    /// Independent outcomes with `P(ε=+1) = p_a` and `P(ε′=+1) = p_b`.
    pub fn product(p_a: f64, p_b: f64) -> Result<Self> {
        Self::new([
            p_a * p_b,
            p_a * (1.0 - p_b),
            (1.0 - p_a) * p_b,
            (1.0 - p_a) * (1.0 - p_b),
        ])
    }

    pub(crate) fn slot(x: Outcome, y: Outcome) -> usize {
        x.index() * 2 + y.index()
    }

    pub fn get(&self, x: Outcome, y: Outcome) -> f64 {
        self.q[Self::slot(x, y)]
    }

    pub fn entries(&self) -> [f64; 4] {
        self.q
    }

    /// `Σ_ε′ q(ε, ε′)`.
    pub fn marginal_a(&self, x: Outcome) -> f64 {
        Outcome::ALL.iter().map(|&y| self.get(x, y)).sum()
    }

    /// `Σ_ε q(ε, ε′)`.
    pub fn marginal_b(&self, y: Outcome) -> f64 {
        Outcome::ALL.iter().map(|&x| self.get(x, y)).sum()
    }

    /// `Σ εε′ q(ε, ε′)`.
    pub fn correlation(&self) -> f64 {
        let mut c = 0.0;
        for x in Outcome::ALL {
            for y in Outcome::ALL {
                c += f64::from(x.value() * y.value()) * self.get(x, y);
            }
        }
        c
    }

    /// Swap `+1` and `−1` on both sides.
    pub fn flipped(&self) -> Self {
        let [pp, pm, mp, mm] = self.q;
        OutcomeBlock { q: [mm, mp, pm, pp] }
    }
}

/// The four conditional outcome laws, one per setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalTable {
    blocks: [[OutcomeBlock; 2]; 2],
}

impl ConditionalTable {
    /// `blocks[i][j]` is the law for `(a, b) = (i+1, j+1)`.
    pub fn new(blocks: [[OutcomeBlock; 2]; 2]) -> Self {
        ConditionalTable { blocks }
    }

    /// Build from raw entries, validating every block.
    pub fn from_entries(entries: [[[f64; 4]; 2]; 2]) -> Result<Self> {
        Self::from_entries_with_tolerance(entries, DEFAULT_TOLERANCE)
    }

    pub fn from_entries_with_tolerance(entries: [[[f64; 4]; 2]; 2], tolerance: f64) -> Result<Self> {
        let mut blocks = [[OutcomeBlock::uncorrelated(); 2]; 2];
        for a in Setting::ALL {
            for b in Setting::ALL {
                blocks[a.index()][b.index()] =
                    OutcomeBlock::with_tolerance(entries[a.index()][b.index()], tolerance)
                        .map_err(|e| Error::InvalidDistribution(format!("block ({a},{b}): {e}")))?;
            }
        }
        Ok(ConditionalTable { blocks })
    }

    /// The same block for every setting pair.
    pub fn uniform_blocks(block: OutcomeBlock) -> Self {
        ConditionalTable {
            blocks: [[block; 2]; 2],
        }
    }

    pub fn block(&self, a: Setting, b: Setting) -> &OutcomeBlock {
        &self.blocks[a.index()][b.index()]
    }

    pub fn blocks(&self) -> &[[OutcomeBlock; 2]; 2] {
        &self.blocks
    }

    pub fn q(&self, a: Setting, b: Setting, x: Outcome, y: Outcome) -> f64 {
        self.block(a, b).get(x, y)
    }

    /// Conditional correlation `Σ εε′ q(ε, ε′ | i, j)`.
    pub fn correlation(&self, a: Setting, b: Setting) -> f64 {
        self.block(a, b).correlation()
    }

    pub fn correlations(&self) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for a in Setting::ALL {
            for b in Setting::ALL {
                out[a.index()][b.index()] = self.correlation(a, b);
            }
        }
        out
    }

    /// Largest difference between the one-side marginals of blocks that share
    /// a setting on that side. Zero means the table is non-signaling.
    pub fn marginal_discrepancy(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in Setting::ALL {
            for x in Outcome::ALL {
                let a = (self.block(s, Setting::One).marginal_a(x) - self.block(s, Setting::Two).marginal_a(x)).abs();
                let b = (self.block(Setting::One, s).marginal_b(x) - self.block(Setting::Two, s).marginal_b(x)).abs();
                worst = worst.max(a).max(b);
            }
        }
        worst
    }

    pub fn flipped(&self) -> Self {
        let mut blocks = self.blocks;
        for row in blocks.iter_mut() {
            for block in row.iter_mut() {
                *block = block.flipped();
            }
        }
        ConditionalTable { blocks }
    }
}

/// A point `ω = (i, j, ε, ε′)` of the sample space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub a: Setting,
    pub b: Setting,
    pub x: Outcome,
    pub y: Outcome,
}

impl Atom {
    pub const COUNT: usize = 16;

    pub fn new(a: Setting, b: Setting, x: Outcome, y: Outcome) -> Self {
        Atom { a, b, x, y }
    }

    /// All 16 atoms in lexicographic `(i, j, ε, ε′)` order with `+` before `−`.
    pub fn all() -> [Atom; 16] {
        let mut out = [Atom::new(Setting::One, Setting::One, Outcome::Plus, Outcome::Plus); 16];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = Atom::from_index(k);
        }
        out
    }

    pub fn index(&self) -> usize {
        ((self.a.index() * 2 + self.b.index()) * 2 + self.x.index()) * 2 + self.y.index()
    }

    pub fn from_index(k: usize) -> Self {
        assert!(k < Self::COUNT, "atom index {k} out of range");
        let pick_s = |bit: usize| if bit == 0 { Setting::One } else { Setting::Two };
        let pick_o = |bit: usize| if bit == 0 { Outcome::Plus } else { Outcome::Minus };
        Atom {
            a: pick_s((k >> 3) & 1),
            b: pick_s((k >> 2) & 1),
            x: pick_o((k >> 1) & 1),
            y: pick_o(k & 1),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.x, self.y)
    }
}

/// Value of an observable on an atom: the outcome if its setting was
/// selected, otherwise the nondetection value `0`.
pub fn eval_observable(obs: ObservableId, omega: &Atom) -> i8 {
    match obs.side {
        Side::A if omega.a == obs.setting => omega.x.value(),
        Side::B if omega.b == obs.setting => omega.y.value(),
        _ => 0,
    }
}

/// Value of the setting generator `a` or `b` on an atom.
pub fn eval_generator(side: Side, omega: &Atom) -> Setting {
    match side {
        Side::A => omega.a,
        Side::B => omega.b,
    }
}

/// The finite probability space `(Ω, F, p)` with `F = 2^Ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSpace {
    settings: SettingDistribution,
    table: ConditionalTable,
    probabilities: [f64; 16],
    tolerance: f64,
}

impl SampleSpace {
    /// `p(i, j, ε, ε′) = p(a=i, b=j) · q(ε, ε′ | i, j)`.
    pub fn build(settings: SettingDistribution, table: ConditionalTable) -> Result<Self> {
        Self::build_with_tolerance(settings, table, DEFAULT_TOLERANCE)
    }

    pub fn build_with_tolerance(
        settings: SettingDistribution,
        table: ConditionalTable,
        tolerance: f64,
    ) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tolerance}")));
        }
        // Inputs may have been validated under a looser tolerance.
        SettingDistribution::with_tolerance(settings.weights, tolerance)?;
        for a in Setting::ALL {
            for b in Setting::ALL {
                OutcomeBlock::with_tolerance(table.block(a, b).q, tolerance)
                    .map_err(|e| Error::InvalidDistribution(format!("block ({a},{b}): {e}")))?;
            }
        }
        let mut probabilities = [0.0; 16];
        for atom in Atom::all() {
            probabilities[atom.index()] = settings.weight(atom.a, atom.b) * table.q(atom.a, atom.b, atom.x, atom.y);
        }
        Ok(SampleSpace {
            settings,
            table,
            probabilities,
            tolerance,
        })
    }

    pub fn settings(&self) -> &SettingDistribution {
        &self.settings
    }

    pub fn table(&self) -> &ConditionalTable {
        &self.table
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn probability(&self, omega: &Atom) -> f64 {
        self.probabilities[omega.index()]
    }

    pub fn probabilities(&self) -> &[f64; 16] {
        &self.probabilities
    }

    /// Atoms paired with their measure.
    pub fn atoms(&self) -> impl Iterator<Item = (Atom, f64)> + '_ {
        Atom::all().into_iter().map(move |w| (w, self.probability(&w)))
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

fn check_probability_vector(values: impl Iterator<Item = f64>, tolerance: f64) -> std::result::Result<(), String> {
    let mut sum = 0.0;
    for (k, v) in values.enumerate() {
        if !v.is_finite() {
            return Err(format!("entry {k} is not finite ({v})"));
        }
        if v < 0.0 {
            return Err(format!("entry {k} is negative ({v})"));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > tolerance {
        return Err(format!("entries sum to {sum}, expected 1"));
    }
    Ok(())
}
