use crate::error::{CoreError, Result};

/// Upper limit on the number of deterministic strategies.
pub const STRATEGY_GUARD: usize = 1_000_000;

/// All functions `λ: x ↦ λ(x)` from settings to outcomes, in lexicographic
/// order with setting 0 as the most significant digit. Settings may have
/// different outcome counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategySet {
    outcomes: Vec<usize>,
    strides: Vec<usize>,
    count: usize,
}

impl DeterministicStrategySet {
    pub fn mixed(outcomes: Vec<usize>) -> Result<Self> {
        if outcomes.is_empty() || outcomes.contains(&0) {
            return Err(CoreError::InvalidInput(
                "every setting needs at least one outcome".into(),
            ));
        }
        let mut count: usize = 1;
        for &q in &outcomes {
            count = count
                .checked_mul(q)
                .filter(|&n| n <= STRATEGY_GUARD)
                .ok_or_else(|| {
                    CoreError::GuardExceeded(format!(
                        "strategy count {:?} exceeds {STRATEGY_GUARD}",
                        outcomes
                    ))
                })?;
        }
        let mut strides = vec![1; outcomes.len()];
        for x in (0..outcomes.len().saturating_sub(1)).rev() {
            strides[x] = strides[x + 1] * outcomes[x + 1];
        }
        Ok(Self {
            outcomes,
            strides,
            count,
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn settings(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self, x: usize) -> usize {
        self.outcomes[x]
    }

    pub fn outcome(&self, lambda: usize, x: usize) -> usize {
        (lambda / self.strides[x]) % self.outcomes[x]
    }

    /// `D(a|x,λ) = δ_{a,λ(x)}`.
    pub fn response(&self, a: usize, x: usize, lambda: usize) -> f64 {
        if self.outcome(lambda, x) == a {
            1.0
        } else {
            0.0
        }
    }

    pub fn strategy(&self, lambda: usize) -> Vec<usize> {
        (0..self.settings()).map(|x| self.outcome(lambda, x)).collect()
    }

    /// Number of strategies with `λ(x) = a`.
    pub fn multiplicity(&self, x: usize) -> usize {
        self.count / self.outcomes[x]
    }
}

/// The `q^m` strategies for `m` settings with `q` outcomes each.
pub fn enumerate_strategies(m: usize, q: usize) -> Result<DeterministicStrategySet> {
    DeterministicStrategySet::mixed(vec![q; m])
}
