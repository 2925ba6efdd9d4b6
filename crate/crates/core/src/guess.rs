//! Sources of the solvers' random guesses.
//!
//! The solvers only ever ask three kinds of questions: a fair coin, a uniform
//! index, and a uniform subset. Routing them through [`Guesser`] lets tests
//! script a specific branch without reaching into solver internals.

use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait Guesser {
    fn coin(&mut self) -> bool;

    /// Uniform index in `0..n`; `n > 0`.
    fn below(&mut self, n: usize) -> usize;

    /// Uniform subset of `items`, preserving order.
    fn subset(&mut self, items: &[usize]) -> Vec<usize> {
        items.iter().copied().filter(|_| self.coin()).collect()
    }
}

/// Guesses drawn from a random number generator.
#[derive(Clone, Debug)]
pub struct RandomGuesser<R>(pub R);

impl<R: RngCore> Guesser for RandomGuesser<R> {
    fn coin(&mut self) -> bool {
        self.0.gen::<bool>()
    }

    fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }
}

/// The generator behind every seeded run: ChaCha8 with a 64-bit seed, one
/// stream per independent sub-run.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn seeded_guesser(seed: u64, stream: u64) -> RandomGuesser<ChaCha8Rng> {
    RandomGuesser(seeded_rng(seed, stream))
}

/// Replays a fixed script. Coins and indices come from separate queues;
/// subsets are answered by a queue of explicit subsets. Running dry panics,
/// which is what a test wants.
#[derive(Clone, Debug, Default)]
pub struct ScriptedGuesser {
    pub coins: VecDeque<bool>,
    pub indices: VecDeque<usize>,
    pub subsets: VecDeque<Vec<usize>>,
}

impl ScriptedGuesser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coins(mut self, coins: impl IntoIterator<Item = bool>) -> Self {
        self.coins.extend(coins);
        self
    }

    pub fn indices(mut self, indices: impl IntoIterator<Item = usize>) -> Self {
        self.indices.extend(indices);
        self
    }

    pub fn subsets(mut self, subsets: impl IntoIterator<Item = Vec<usize>>) -> Self {
        self.subsets.extend(subsets);
        self
    }
}

impl Guesser for ScriptedGuesser {
    fn coin(&mut self) -> bool {
        self.coins.pop_front().expect("script ran out of coins")
    }

    fn below(&mut self, n: usize) -> usize {
        let i = self.indices.pop_front().expect("script ran out of indices");
        assert!(i < n, "scripted index {i} not below {n}");
        i
    }

    fn subset(&mut self, items: &[usize]) -> Vec<usize> {
        let s = self.subsets.pop_front().expect("script ran out of subsets");
        assert!(
            s.iter().all(|x| items.contains(x)),
            "scripted subset {s:?} not within {items:?}"
        );
        s
    }
}
