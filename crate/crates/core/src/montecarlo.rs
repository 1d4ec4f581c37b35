//! Trial-by-trial simulation of the experiment and empirical estimation.
//!
//! Trial `t` draws exactly one 64-bit word from a ChaCha20 stream keyed by
//! the seed, at word position `2t`. A trial's outcome therefore depends only
//! on `(seed, t)`, and any partition of the trial range into shards yields
//! the same records.

use std::ops::Range;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chsh::{combine, CorrelationSet};
use crate::error::{Error, Result};
use crate::queries::{prob, Clause, Event};
use crate::space::{
    eval_observable, Atom, ConditionalTable, ObservableId, OutcomeBlock, SampleSpace, Setting, SettingDistribution,
    Side,
};

/// Recorded in simulation metadata.
pub const RNG_ALGORITHM: &str = "chacha20 (rand_chacha, seed_from_u64); trial t uses the u64 at word position 2t; \
     uniform = top 53 bits * 2^-53; inverse CDF over the 16 atoms in (a,b,A,B) lexicographic order, + before -";

/// One simulated or recorded trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EventRecord {
    pub trial: u64,
    pub a: Setting,
    pub b: Setting,
    /// Values of `A₁, A₂, B₁, B₂`, each in `{−1, 0, +1}`.
    pub values: [i8; 4],
}

impl EventRecord {
    pub fn from_atom(trial: u64, omega: &Atom) -> Self {
        EventRecord {
            trial,
            a: omega.a,
            b: omega.b,
            values: ObservableId::ALL.map(|obs| eval_observable(obs, omega)),
        }
    }

    pub fn value(&self, obs: ObservableId) -> i8 {
        let k = match obs.side {
            Side::A => 0,
            Side::B => 2,
        } + obs.setting.index();
        self.values[k]
    }

    /// The atom this record realizes, or a description of how the record
    /// breaks the rule that exactly the selected observable on each side is
    /// nonzero.
    pub fn atom(&self) -> std::result::Result<Atom, String> {
        let mut outcomes = [crate::space::Outcome::Plus; 2];
        for (k, (side, selected)) in [(Side::A, self.a), (Side::B, self.b)].into_iter().enumerate() {
            for s in Setting::ALL {
                let obs = ObservableId::new(side, s);
                let v = self.value(obs);
                if s == selected {
                    match crate::space::Outcome::from_value(v.into()) {
                        Some(o) => outcomes[k] = o,
                        None => return Err(format!("{obs} is {v} but its setting was selected")),
                    }
                } else if v != 0 {
                    return Err(format!("{obs} is {v} but its setting was not selected"));
                }
            }
        }
        Ok(Atom::new(self.a, self.b, outcomes[0], outcomes[1]))
    }
}

/// Inverse-CDF sampler over the atoms of a space.
#[derive(Debug, Clone)]
pub struct TrialSampler {
    cdf: [f64; 16],
    last_positive: usize,
    seed: u64,
}

impl TrialSampler {
    pub fn new(space: &SampleSpace, seed: u64) -> Self {
        let mut cdf = [0.0; 16];
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, &p) in space.probabilities().iter().enumerate() {
            acc += p;
            cdf[k] = acc;
            if p > 0.0 {
                last_positive = k;
            }
        }
        TrialSampler {
            cdf,
            last_positive,
            seed,
        }
    }

    fn atom_for(&self, u: f64) -> Atom {
        // strict comparison never selects a zero-mass atom
        let k = self.cdf.iter().position(|&c| u < c).unwrap_or(self.last_positive);
        Atom::from_index(k.min(self.last_positive))
    }

    fn rng_at(&self, trial: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_word_pos(2 * u128::from(trial));
        rng
    }

    /// Records for a contiguous range of trial indices.
    pub fn records(&self, trials: Range<u64>) -> impl Iterator<Item = EventRecord> + '_ {
        let mut rng = self.rng_at(trials.start);
        trials.map(move |t| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            EventRecord::from_atom(t, &self.atom_for(u))
        })
    }

    pub fn record(&self, trial: u64) -> EventRecord {
        self.records(trial..trial + 1).next().expect("one trial")
    }
}

/// `n` independent trials, deterministic in `(space, n, seed)`.
pub fn sample_trials(space: &SampleSpace, n: u64, seed: u64) -> Vec<EventRecord> {
    TrialSampler::new(space, seed).records(0..n).collect()
}

/// Split `0..n` into `shards` contiguous ranges of near-equal length.
pub fn shard_ranges(n: u64, shards: usize) -> Vec<Range<u64>> {
    let shards = shards.max(1) as u64;
    let base = n / shards;
    let extra = n % shards;
    let mut start = 0;
    (0..shards)
        .map(|s| {
            let len = base + u64::from(s < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Same records as [`sample_trials`], produced by `shards` parallel workers.
pub fn sample_trials_sharded(space: &SampleSpace, n: u64, seed: u64, shards: usize) -> Vec<EventRecord> {
    let sampler = TrialSampler::new(space, seed);
    shard_ranges(n, shards)
        .into_par_iter()
        .map(|r| sampler.records(r).collect::<Vec<_>>())
        .flatten()
        .collect()
}

/// Atom counts, the sufficient statistic of a record stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub atoms: [u64; 16],
}

impl Tally {
    /// Fails on the first record that breaks the selected-observable rule.
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a EventRecord>,
    ) -> std::result::Result<Self, (u64, String)> {
        let mut t = Tally::default();
        for r in records {
            let atom = r.atom().map_err(|e| (r.trial, e))?;
            t.atoms[atom.index()] += 1;
        }
        Ok(t)
    }

    pub fn add(&mut self, omega: &Atom) {
        self.atoms[omega.index()] += 1;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.atoms.iter_mut().zip(other.atoms) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.atoms.iter().sum()
    }

    pub fn cell(&self, a: Setting, b: Setting) -> u64 {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let w = Atom::from_index(*k);
                w.a == a && w.b == b
            })
            .map(|(_, c)| c)
            .sum()
    }
}

/// Tally of `n` trials computed shard by shard without storing records.
pub fn sample_tally(space: &SampleSpace, n: u64, seed: u64, shards: usize) -> Tally {
    let sampler = TrialSampler::new(space, seed);
    shard_ranges(n, shards)
        .into_par_iter()
        .map(|r| {
            let mut t = Tally::default();
            for rec in sampler.records(r) {
                t.add(&rec.atom().expect("sampler emits valid records"));
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub value: f64,
    /// `sqrt(value·(1−value)/n)`.
    pub stderr: f64,
    pub n: u64,
}

impl FrequencyEstimate {
    pub fn from_counts(count: u64, n: u64) -> Self {
        let value = count as f64 / n as f64;
        FrequencyEstimate {
            value,
            stderr: (value * (1.0 - value) / n as f64).sqrt(),
            n,
        }
    }
}

/// Empirical counterpart of a sample space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub n: u64,
    pub tally: Tally,
    pub settings: SettingDistribution,
    /// Conditional blocks; `None` for setting pairs never selected.
    pub blocks: [[Option<OutcomeBlock>; 2]; 2],
    pub correlations: CorrelationSet,
}

impl Estimate {
    pub fn from_tally(tally: Tally) -> Result<Self> {
        let n = tally.total();
        if n == 0 {
            return Err(Error::EmptyStream);
        }
        let mut weights = [[0.0; 2]; 2];
        let mut blocks = [[None; 2]; 2];
        let mut absolute = [[0.0; 2]; 2];
        let mut conditional = [[None; 2]; 2];
        for a in Setting::ALL {
            for b in Setting::ALL {
                let cell = tally.cell(a, b);
                weights[a.index()][b.index()] = cell as f64 / n as f64;
                let counts: [u64; 4] = std::array::from_fn(|k| {
                    let (x, y) = (k >> 1, k & 1);
                    tally.atoms[((a.index() * 2 + b.index()) * 2 + x) * 2 + y]
                });
                let signed: i64 = counts[0] as i64 - counts[1] as i64 - counts[2] as i64 + counts[3] as i64;
                absolute[a.index()][b.index()] = signed as f64 / n as f64;
                if cell > 0 {
                    let q = counts.map(|c| c as f64 / cell as f64);
                    blocks[a.index()][b.index()] = Some(OutcomeBlock::new(q)?);
                    conditional[a.index()][b.index()] = Some(signed as f64 / cell as f64);
                }
            }
        }
        let settings = SettingDistribution::new(weights)?;
        Ok(Estimate {
            n,
            tally,
            settings,
            blocks,
            correlations: CorrelationSet {
                absolute,
                conditional,
                weights,
            },
        })
    }

    /// Full table when every setting pair was observed.
    pub fn table(&self) -> Option<ConditionalTable> {
        let [[b11, b12], [b21, b22]] = self.blocks;
        Some(ConditionalTable::new([[b11?, b12?], [b21?, b22?]]))
    }

    /// Empirical space. Unobserved setting pairs have zero weight, so the
    /// uniform placeholder used for their blocks carries no mass.
    pub fn space(&self, tolerance: f64) -> Result<SampleSpace> {
        let blocks = self
            .blocks
            .map(|row| row.map(|b| b.unwrap_or_else(OutcomeBlock::uncorrelated)));
        SampleSpace::build_with_tolerance(self.settings, ConditionalTable::new(blocks), tolerance)
    }

    pub fn atom_frequency(&self, omega: &Atom) -> FrequencyEstimate {
        FrequencyEstimate::from_counts(self.tally.atoms[omega.index()], self.n)
    }

    pub fn s_cond(&self) -> Option<f64> {
        self.correlations.conditional_all().map(|q| combine(&q))
    }

    pub fn undefined_cells(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in Setting::ALL {
            for b in Setting::ALL {
                if self.blocks[a.index()][b.index()].is_none() {
                    for x in crate::space::Outcome::ALL {
                        for y in crate::space::Outcome::ALL {
                            out.push(format!("q({x},{y}|{a},{b})"));
                        }
                    }
                    out.push(format!("Q{a}{b}"));
                }
            }
        }
        out
    }
}

/// Settings, conditional table and correlations from a record stream.
pub fn estimate<'a>(records: impl IntoIterator<Item = &'a EventRecord>) -> Result<Estimate> {
    let tally =
        Tally::from_records(records).map_err(|(trial, e)| Error::InvalidArgument(format!("trial {trial}: {e}")))?;
    Estimate::from_tally(tally)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub n: u64,
    /// Largest `|empirical − exact|` over the 16 atom probabilities.
    pub max_deviation: f64,
}

/// Deviation of atom frequencies from exact probabilities for each `n`,
/// always using trials `0..n` of the same stream.
pub fn convergence_report(space: &SampleSpace, n_list: &[u64], seed: u64) -> Result<Vec<ConvergencePoint>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty list of sample sizes".into()));
    }
    let exact: Vec<f64> = Atom::all()
        .iter()
        .map(|w| {
            let e = Event::from_clauses([
                Clause::Generator(Side::A, w.a),
                Clause::Generator(Side::B, w.b),
                Clause::Observable(ObservableId::a(w.a), w.x.value()),
                Clause::Observable(ObservableId::b(w.b), w.y.value()),
            ]);
            prob(space, &e)
        })
        .collect();
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("sample size must be positive".into()));
            }
            let tally = sample_tally(space, n, seed, rayon::current_num_threads());
            let max_deviation = tally
                .atoms
                .iter()
                .zip(&exact)
                .map(|(&c, p)| (c as f64 / n as f64 - p).abs())
                .fold(0.0, f64::max);
            Ok(ConvergencePoint { n, max_deviation })
        })
        .collect()
}
