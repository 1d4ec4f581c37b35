//! Deterministic generators of random spaces and tables.
#![allow(dead_code)]

use bellspace::chsh::JointDistribution;
use bellspace::space::{ConditionalTable, Outcome, OutcomeBlock, SampleSpace, Setting, SettingDistribution};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    /// Random point of the simplex; with some probability a few coordinates are zeroed.
    pub fn simplex<const N: usize>(&mut self) -> [f64; N] {
        let sparse = self.below(5) == 0;
        let mut v = [0.0; N];
        for x in v.iter_mut() {
            *x = if sparse && self.below(2) == 0 {
                0.0
            } else {
                -(1.0 - self.uniform()).ln()
            };
        }
        if v.iter().all(|x| *x == 0.0) {
            v[self.below(N as u64) as usize] = 1.0;
        }
        let s: f64 = v.iter().sum();
        v.map(|x| x / s)
    }

    pub fn weights(&mut self) -> SettingDistribution {
        let w: [f64; 4] = self.simplex();
        SettingDistribution::new([[w[0], w[1]], [w[2], w[3]]]).unwrap()
    }

    pub fn product_weights(&mut self) -> SettingDistribution {
        let a = self.uniform();
        let b = self.uniform();
        SettingDistribution::product([a, 1.0 - a], [b, 1.0 - b]).unwrap()
    }

    /// Every setting pair has weight at least `floor`.
    pub fn positive_product_weights(&mut self, floor: f64) -> SettingDistribution {
        let a = floor + (1.0 - 2.0 * floor) * self.uniform();
        let b = floor + (1.0 - 2.0 * floor) * self.uniform();
        SettingDistribution::product([a, 1.0 - a], [b, 1.0 - b]).unwrap()
    }

    pub fn block(&mut self) -> OutcomeBlock {
        OutcomeBlock::new(self.simplex()).unwrap()
    }

    /// Arbitrary table, signaling in general.
    pub fn table(&mut self) -> ConditionalTable {
        ConditionalTable::new([[self.block(), self.block()], [self.block(), self.block()]])
    }

    /// Non-signaling table: one-side marginals `α_i`, `β_j` and `p(+,+|i,j) = π_ij`
    /// anywhere in its feasible interval. Covers local and nonlocal tables.
    pub fn nonsignaling_table(&mut self) -> ConditionalTable {
        let alpha = [self.uniform(), self.uniform()];
        let beta = [self.uniform(), self.uniform()];
        let mut blocks = [[OutcomeBlock::uncorrelated(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (alpha[i], beta[j]);
                let lo = (a + b - 1.0).max(0.0);
                let hi = a.min(b);
                let pi = lo + (hi - lo) * self.uniform();
                let q = [pi, a - pi, b - pi, 1.0 - a - b + pi].map(|x| x.max(0.0));
                let s: f64 = q.iter().sum();
                blocks[i][j] = OutcomeBlock::new(q.map(|x| x / s)).unwrap();
            }
        }
        ConditionalTable::new(blocks)
    }

    /// Pairwise marginals of a random joint distribution of `(A1, A2, B1, B2)`.
    pub fn local_table(&mut self) -> ConditionalTable {
        let p: [f64; 16] = self.simplex();
        table_of_joint(&JointDistribution { p })
    }

    pub fn space(&mut self) -> SampleSpace {
        let w = self.weights();
        let t = self.table();
        SampleSpace::build(w, t).unwrap()
    }
}

pub fn table_of_joint(joint: &JointDistribution) -> ConditionalTable {
    let mut blocks = [[OutcomeBlock::uncorrelated(); 2]; 2];
    for a in Setting::ALL {
        for b in Setting::ALL {
            let q = joint.pair_marginal(a, b);
            let s: f64 = q.iter().sum();
            blocks[a.index()][b.index()] = OutcomeBlock::new(q.map(|x| x / s)).unwrap();
        }
    }
    ConditionalTable::new(blocks)
}

/// Conditional marginal-consistency deviation expected under product settings:
/// `β_{j̄}·|m_{ij}(x) − m_{ij̄}(x)|` and its mirror.
pub fn cmc_oracle(space: &SampleSpace) -> f64 {
    let s = space.settings();
    let t = space.table();
    let mut worst: f64 = 0.0;
    for i in Setting::ALL {
        for j in Setting::ALL {
            for x in Outcome::ALL {
                let da = (t.block(i, j).marginal_a(x) - t.block(i, j.other()).marginal_a(x)).abs();
                let db = (t.block(j, i).marginal_b(x) - t.block(j.other(), i).marginal_b(x)).abs();
                worst = worst
                    .max(s.marginal_b(j.other()) * da)
                    .max(s.marginal_a(j.other()) * db);
            }
        }
    }
    worst
}
