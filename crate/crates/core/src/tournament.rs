//! Round-robin tournament enumeration for the Bradley–Terry carrier.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest number of players whose tournaments are enumerated exhaustively.
pub const MAX_PLAYERS: usize = 6;

/// Number of tournament outcomes producing each win vector, for fixed `n`.
#[derive(Debug)]
pub struct ScoreTable {
    n: usize,
    counts: HashMap<Vec<u8>, u64>,
}

impl ScoreTable {
    fn enumerate(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
            .collect();
        let mut counts = HashMap::new();
        let mut wins = vec![0u8; n];
        for mask in 0u64..(1u64 << pairs.len()) {
            wins.iter_mut().for_each(|w| *w = 0);
            for (bit, &(j, k)) in pairs.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    wins[j] += 1;
                } else {
                    wins[k] += 1;
                }
            }
            *counts.entry(wins.clone()).or_insert(0) += 1;
        }
        Self { n, counts }
    }

    /// Tournament count for an integer win vector; zero off support.
    pub fn count(&self, wins: &[i64]) -> u64 {
        if wins.len() != self.n || wins.iter().any(|&w| w < 0 || w >= self.n as i64) {
            return 0;
        }
        let key: Vec<u8> = wins.iter().map(|&w| w as u8).collect();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// All feasible win vectors with their counts, in a fixed order.
    pub fn entries(&self) -> Vec<(Vec<u8>, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(k, c)| (k.clone(), *c)).collect();
        v.sort();
        v
    }
}

/// Shared, lazily built table for `n` players. Callers must ensure `n <= MAX_PLAYERS`.
pub fn score_table(n: usize) -> Arc<ScoreTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ScoreTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(ScoreTable::enumerate(n)))
        .clone()
}
