//! Random streams and fair coins, with exact enumeration of all coin
//! outcomes for small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::Scalar;

/// Largest number of coins [`expected_value_exact`] will enumerate.
pub const MAX_COIN_BUDGET: usize = 20;

/// Stream used to sample deadlines for a run seeded with `seed`.
pub fn deadline_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Stream used for an algorithm's coin flips and other choices.
pub fn coin_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Stream used when sampling an instance from a dataset or generator.
pub fn data_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    rng
}

/// `count` distinct-stream seeds for independent replications under one
/// master seed.
pub fn replicate_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(3);
    (0..count).map(|_| rng.random()).collect()
}

/// A sequence of fair coin flips.
pub trait CoinSource {
    fn flip(&mut self) -> bool;
    /// Number of flips drawn so far.
    fn used(&self) -> usize;
}

#[derive(Debug, Clone)]
pub struct SeededCoins {
    rng: ChaCha8Rng,
    used: usize,
}

impl SeededCoins {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: coin_rng(seed),
            used: 0,
        }
    }
}

impl CoinSource for SeededCoins {
    fn flip(&mut self) -> bool {
        self.used += 1;
        self.rng.random()
    }

    fn used(&self) -> usize {
        self.used
    }
}

/// Replays a fixed prefix of outcomes, then returns `fallback` forever.
#[derive(Debug, Clone)]
pub struct ScriptedCoins {
    script: Vec<bool>,
    fallback: bool,
    used: usize,
}

impl ScriptedCoins {
    pub fn new(script: Vec<bool>) -> Self {
        Self {
            script,
            fallback: false,
            used: 0,
        }
    }

    pub fn always(outcome: bool) -> Self {
        Self {
            script: Vec::new(),
            fallback: outcome,
            used: 0,
        }
    }
}

impl CoinSource for ScriptedCoins {
    fn flip(&mut self) -> bool {
        let out = self.script.get(self.used).copied().unwrap_or(self.fallback);
        self.used += 1;
        out
    }

    fn used(&self) -> usize {
        self.used
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoinError {
    #[error("a run used {used} coins, more than the budget of {budget}")]
    BudgetExceeded { budget: usize, used: usize },
    #[error("coin budget {0} is above the enumeration limit")]
    BudgetTooLarge(usize),
}

/// An expectation over equally likely coin sequences, kept as an exact
/// weighted sum: `E = weighted_total / denominator`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactExpectation<S> {
    pub weighted_total: S,
    pub denominator: u64,
    /// Distinct coin sequences that were run.
    pub outcomes: usize,
    /// Longest sequence used by any outcome.
    pub max_coins: usize,
}

impl<S: Scalar> ExactExpectation<S> {
    pub fn value(&self) -> S {
        self.weighted_total / S::from_count(self.denominator)
    }

    /// Whether `E >= (num / den) * target`, comparing without division.
    pub fn at_least(&self, target: S, num: u64, den: u64) -> bool {
        let lhs = self.weighted_total * S::from_count(den);
        let rhs = target * S::from_count(num) * S::from_count(self.denominator);
        rhs.approx_le(lhs)
    }
}

/// Runs `run` once per distinct coin sequence and returns the exact
/// expected value. Each run receives scripted coins; flips past the script
/// return `false`, and the enumeration branches on every such flip.
pub fn expected_value_exact<S, F>(budget: usize, mut run: F) -> Result<ExactExpectation<S>, CoinError>
where
    S: Scalar,
    F: FnMut(&mut ScriptedCoins) -> S,
{
    if budget > MAX_COIN_BUDGET {
        return Err(CoinError::BudgetTooLarge(budget));
    }
    let mut total = S::zero();
    let mut outcomes = 0;
    let mut max_coins = 0;
    let mut pending: Vec<Vec<bool>> = vec![Vec::new()];
    while let Some(script) = pending.pop() {
        let mut coins = ScriptedCoins::new(script.clone());
        let value = run(&mut coins);
        let used = coins.used();
        if used > budget {
            return Err(CoinError::BudgetExceeded { budget, used });
        }
        outcomes += 1;
        max_coins = max_coins.max(used);
        total = total + value * S::from_count(1u64 << (budget - used));
        // A run always replays its whole script, so `used >= script.len()`.
        let mut sequence = script;
        let scripted = sequence.len();
        sequence.resize(used, false);
        for i in scripted..used {
            let mut next = sequence[..i].to_vec();
            next.push(true);
            pending.push(next);
        }
    }
    Ok(ExactExpectation {
        weighted_total: total,
        denominator: 1u64 << budget,
        outcomes,
        max_coins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| deadline_rng(7).random()).collect();
        let b: Vec<u32> = (0..4).map(|_| deadline_rng(7).random()).collect();
        assert_eq!(a, b);
        let mut d = deadline_rng(7);
        let mut c = coin_rng(7);
        let x: Vec<u64> = (0..4).map(|_| d.random()).collect();
        let y: Vec<u64> = (0..4).map(|_| c.random()).collect();
        assert_ne!(x, y);
    }

    #[test]
    fn scripted_coins_fall_back() {
        let mut c = ScriptedCoins::new(vec![true]);
        assert!(c.flip());
        assert!(!c.flip());
        assert_eq!(c.used(), 2);
        let mut all = ScriptedCoins::always(true);
        assert!(all.flip() && all.flip());
    }

    #[test]
    fn enumerates_fixed_length_sequences() {
        // Number of heads in three flips: expectation 3/2 over 8 outcomes.
        let e = expected_value_exact::<i64, _>(3, |c| (0..3).filter(|_| c.flip()).count() as i64).unwrap();
        assert_eq!(e.outcomes, 8);
        assert_eq!(e.weighted_total, 12);
        assert_eq!(e.denominator, 8);
        assert!(e.at_least(3, 1, 2));
        assert!(!e.at_least(4, 1, 2));
    }

    #[test]
    fn enumerates_variable_length_sequences() {
        // Flip until heads, at most three flips: value is the flip count.
        let e = expected_value_exact::<f64, _>(4, |c| {
            let mut n = 0.0;
            for _ in 0..3 {
                n += 1.0;
                if c.flip() {
                    break;
                }
            }
            n
        })
        .unwrap();
        assert_eq!(e.outcomes, 4);
        assert!((e.value() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let err = expected_value_exact::<f64, _>(2, |c| {
            for _ in 0..3 {
                c.flip();
            }
            0.0
        })
        .unwrap_err();
        assert_eq!(err, CoinError::BudgetExceeded { budget: 2, used: 3 });
        assert!(expected_value_exact::<f64, _>(21, |_| 0.0).is_err());
        let e = expected_value_exact::<f64, _>(0, |_| 0.0).unwrap();
        assert_eq!(e.value(), 0.0);
    }
}
