//! Interval vote bookkeeping.
//!
//! Votes are tallied between successive resolve introductions. During
//! interval `I_i` (after resolve `i` is created and before resolve `i+1`)
//! there are `i` live resolves, and a vote on resolve `j <= i` is cast at
//! age `a = i - j + 1`: age 1 is the newest resolve. Creation votes are
//! excluded everywhere.

use crate::event_log::EventLog;
use crate::types::{EventKind, ResolveId, UserId};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CountsError {
    #[error("log contains no resolves")]
    NoResolves,
}

/// One nonzero cell of the interval-by-resolve vote table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    /// 1-based interval index `i`.
    pub interval: u32,
    /// 1-based resolve ordinality `j`; always `j <= i`.
    pub resolve: u32,
    /// Number of votes resolve `j` received during interval `i`.
    pub count: u32,
}

impl Cell {
    /// Age of the resolve at the time of these votes.
    pub fn age(&self) -> usize {
        (self.interval - self.resolve + 1) as usize
    }
}

/// Vote counts per interval, per resolve, per age, and the sparse
/// interval-by-resolve table. All exclude creation votes.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCounts {
    v: Vec<u64>,
    per_resolve: Vec<u64>,
    per_age: Vec<u64>,
    cells: Vec<Cell>,
    resolve_ids: Vec<ResolveId>,
    creators: Vec<UserId>,
}

impl IntervalCounts {
    /// Number of resolves `R`; intervals and ages both run `1..=R`.
    pub fn n_resolves(&self) -> usize {
        self.resolve_ids.len()
    }

    /// `v[i-1]` is the vote count of interval `I_i`. The last interval runs
    /// from the final resolve introduction to the end of the log.
    pub fn v(&self) -> &[u64] {
        &self.v
    }

    /// Votes per resolve by ordinality, excluding the creation vote.
    pub fn per_resolve(&self) -> &[u64] {
        &self.per_resolve
    }

    /// Votes per age; `per_age()[a-1]` is the count at age `a`.
    pub fn per_age(&self) -> &[u64] {
        &self.per_age
    }

    /// Nonzero cells sorted by (interval, resolve).
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Resolve ids in creation order (index 0 is ordinality 1).
    pub fn resolve_ids(&self) -> &[ResolveId] {
        &self.resolve_ids
    }

    pub fn creators(&self) -> &[UserId] {
        &self.creators
    }

    pub fn total_votes(&self) -> u64 {
        self.v.iter().sum()
    }

    /// For each resolve, the largest age at which it received a vote.
    pub fn max_vote_age_per_resolve(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n_resolves()];
        for cell in &self.cells {
            let j = (cell.resolve - 1) as usize;
            let age = cell.age();
            if out[j].map_or(true, |m| age > m) {
                out[j] = Some(age);
            }
        }
        out
    }

    /// Construct directly from raw arrays; used by tests building toy
    /// instances by hand. Marginals are recomputed from the cells except
    /// `v`, which also counts votes not attributed in `cells` (there are
    /// none for a complete table).
    pub fn from_cells(v: Vec<u64>, cells: Vec<Cell>) -> IntervalCounts {
        let r = v.len();
        let mut per_resolve = vec![0u64; r];
        let mut per_age = vec![0u64; r];
        for c in &cells {
            per_resolve[(c.resolve - 1) as usize] += c.count as u64;
            per_age[c.age() - 1] += c.count as u64;
        }
        let resolve_ids = (1..=r as u32).map(ResolveId).collect();
        let creators = vec![UserId(0); r];
        let mut cells = cells;
        cells.sort_by_key(|c| (c.interval, c.resolve));
        IntervalCounts { v, per_resolve, per_age, cells, resolve_ids, creators }
    }
}

/// Tallies interval, per-resolve, per-age and cross-table vote counts from
/// a validated log.
pub fn compute_interval_counts(log: &EventLog) -> Result<IntervalCounts, CountsError> {
    let r = log.n_resolves();
    if r == 0 {
        return Err(CountsError::NoResolves);
    }

    let mut v = vec![0u64; r];
    let mut per_resolve = vec![0u64; r];
    let mut per_age = vec![0u64; r];
    let mut cell_map: HashMap<(u32, u32), u32> = HashMap::new();
    let mut creators = vec![UserId(0); r];

    let mut current = 0u32; // resolves introduced so far
    for ev in log.events() {
        match ev.kind {
            EventKind::CreateResolve { .. } => {
                creators[current as usize] = ev.actor;
                current += 1;
            }
            EventKind::Vote { resolve } => {
                let j = log.ordinality(resolve).expect("validated log") as u32;
                let i = current;
                debug_assert!(j <= i && i >= 1);
                let age = (i - j) as usize; // age - 1
                v[(i - 1) as usize] += 1;
                per_resolve[(j - 1) as usize] += 1;
                per_age[age] += 1;
                *cell_map.entry((i, j)).or_insert(0) += 1;
            }
            EventKind::FormLink { .. } => {}
        }
    }

    let mut cells: Vec<Cell> = cell_map
        .into_iter()
        .map(|((interval, resolve), count)| Cell { interval, resolve, count })
        .collect();
    cells.sort_by_key(|c| (c.interval, c.resolve));

    Ok(IntervalCounts {
        v,
        per_resolve,
        per_age,
        cells,
        resolve_ids: log.resolve_order().to_vec(),
        creators,
    })
}
