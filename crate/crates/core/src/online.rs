//! Bounded-memory incremental estimation over an event stream.
//!
//! The state re-estimates the last `K` resolves (the window); when a
//! resolve leaves the window its interestingness is frozen at the
//! estimate of that moment and never changes again. Ages of the
//! visibility function freeze once enough votes have been observed at
//! that age; newly reached ages keep gaining estimates from the
//! fixed-point equation with the frozen interestingness values held
//! constant. Per-user streaming triples (event count, first and last vote
//! time) support activity-rate estimates without event replay.
//!
//! Memory grows with the number of resolves and tracked ages plus the
//! user table, never with the event count: the sparse interval-by-resolve
//! table is kept for the window only.

use crate::counts::Cell;
use crate::mle::FixedPointConfig;
use crate::numeric::poisson_ci_95;
use crate::types::{Event, EventKind, ResolveId, UserId};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OnlineError {
    #[error("event at t={time} precedes the stream head t={head}")]
    OutOfOrderEvent { time: f64, head: f64 },
    #[error("vote on unknown resolve {0}")]
    UnknownResolve(ResolveId),
    #[error("resolve {0} created twice")]
    DuplicateResolve(ResolveId),
    #[error("resolve ordinality {ordinality} is not in the active window {window_start}..={window_end}")]
    NotInWindow { ordinality: usize, window_start: usize, window_end: usize },
    #[error("user {user} needs at least 2 events and positive elapsed time")]
    InsufficientHistory { user: UserId },
    #[error("no resolves seen yet")]
    WindowEmpty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineConfig {
    /// Number of most recent resolves under active re-estimation.
    pub window: usize,
    /// An age freezes once this many votes have been observed at it.
    pub f_freeze_votes: u64,
    /// Re-run the windowed fixed point after every resolve introduction.
    pub reoptimize_each_resolve: bool,
    pub fixed_point: FixedPointConfig,
}

impl Default for OnlineConfig {
    fn default() -> Self {
        OnlineConfig {
            window: 500,
            f_freeze_votes: 1000,
            reoptimize_each_resolve: true,
            fixed_point: FixedPointConfig::default(),
        }
    }
}

/// Point estimate for a windowed resolve. `r` is `None` before the first
/// observed vote, in which case the interval is vacuous (0, infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolveEstimate {
    pub r: Option<f64>,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub rate: f64,
    pub ci: (f64, f64),
    pub events: u64,
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReoptimizeOutcome {
    pub iterations: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    /// Restricted log-likelihood after each sweep.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct StreamingUser {
    events: u64,
    first_vote: Option<f64>,
    last_vote: Option<f64>,
}

/// Single-writer incremental estimator state.
#[derive(Debug, Clone)]
pub struct OnlineState {
    cfg: OnlineConfig,
    head_time: f64,
    resolve_ids: Vec<ResolveId>,
    ordinals: HashMap<ResolveId, u32>,
    // estimates
    r_hat: Vec<f64>,
    frozen_resolves: usize, // ordinalities 1..=frozen_resolves are frozen
    f_hat: Vec<f64>,        // f_hat[0] = 1 is the gauge
    f_frozen: Vec<bool>,
    // counts (grow with resolves, not events)
    v: Vec<u64>,
    per_resolve: Vec<u64>,
    per_age: Vec<u64>,
    /// Closed-interval contributions to each age's denominator.
    denom_f: Vec<f64>,
    /// Sparse per-interval vote maps for the window intervals only.
    window_cells: VecDeque<HashMap<u32, u32>>,
    users: HashMap<u32, StreamingUser>,
    last_reoptimize: Option<ReoptimizeOutcome>,
}

impl OnlineState {
    pub fn new(cfg: OnlineConfig) -> OnlineState {
        OnlineState {
            cfg,
            head_time: f64::NEG_INFINITY,
            resolve_ids: Vec::new(),
            ordinals: HashMap::new(),
            r_hat: Vec::new(),
            frozen_resolves: 0,
            f_hat: Vec::new(),
            f_frozen: Vec::new(),
            v: Vec::new(),
            per_resolve: Vec::new(),
            per_age: Vec::new(),
            denom_f: Vec::new(),
            window_cells: VecDeque::new(),
            users: HashMap::new(),
            last_reoptimize: None,
        }
    }

    pub fn n_resolves(&self) -> usize {
        self.resolve_ids.len()
    }

    /// First ordinality still under re-estimation.
    pub fn window_start(&self) -> usize {
        self.frozen_resolves + 1
    }

    pub fn is_frozen(&self, ordinality: usize) -> bool {
        ordinality <= self.frozen_resolves
    }

    pub fn r_estimates(&self) -> &[f64] {
        &self.r_hat
    }

    pub fn f_estimates(&self) -> &[f64] {
        &self.f_hat
    }

    pub fn f_frozen_flags(&self) -> &[bool] {
        &self.f_frozen
    }

    pub fn v(&self) -> &[u64] {
        &self.v
    }

    pub fn per_resolve(&self) -> &[u64] {
        &self.per_resolve
    }

    pub fn per_age(&self) -> &[u64] {
        &self.per_age
    }

    pub fn resolve_ids(&self) -> &[ResolveId] {
        &self.resolve_ids
    }

    pub fn total_votes(&self) -> u64 {
        self.v.iter().sum()
    }

    pub fn last_reoptimize(&self) -> Option<&ReoptimizeOutcome> {
        self.last_reoptimize.as_ref()
    }

    /// Window cells as (interval, resolve, count) triples, sorted; covers
    /// the retained intervals only (all of them while nothing is frozen).
    pub fn window_cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (offset, map) in self.window_cells.iter().enumerate() {
            let interval = (self.frozen_resolves + 1 + offset) as u32;
            for (&resolve, &count) in map {
                out.push(Cell { interval, resolve, count });
            }
        }
        out.sort_by_key(|c| (c.interval, c.resolve));
        out
    }

    /// Consumes one event; event times must be non-decreasing.
    pub fn update(&mut self, event: &Event) -> Result<(), OnlineError> {
        if event.time < self.head_time {
            return Err(OnlineError::OutOfOrderEvent { time: event.time, head: self.head_time });
        }

        // streaming user bookkeeping happens only once validity is known
        match event.kind {
            EventKind::Vote { resolve } => {
                let Some(&ordinal) = self.ordinals.get(&resolve) else {
                    return Err(OnlineError::UnknownResolve(resolve));
                };
                self.head_time = event.time;
                self.touch_user(event.actor, event.time, true);
                self.record_vote(ordinal as usize);
            }
            EventKind::CreateResolve { resolve } => {
                if self.ordinals.contains_key(&resolve) {
                    return Err(OnlineError::DuplicateResolve(resolve));
                }
                self.head_time = event.time;
                self.touch_user(event.actor, event.time, true);
                self.add_resolve(resolve);
                if self.cfg.reoptimize_each_resolve && self.n_resolves() >= 2 && self.total_votes() > 0 {
                    let fp = self.cfg.fixed_point.clone();
                    let outcome = self.windowed_reoptimize(&fp)?;
                    self.last_reoptimize = Some(outcome);
                }
            }
            EventKind::FormLink { target, .. } => {
                self.head_time = event.time;
                self.touch_user(event.actor, event.time, false);
                self.users.entry(target.0).or_default().events += 1;
            }
        }
        Ok(())
    }

    fn touch_user(&mut self, user: UserId, time: f64, vote_like: bool) {
        let u = self.users.entry(user.0).or_default();
        u.events += 1;
        if vote_like {
            if u.first_vote.is_none() {
                u.first_vote = Some(time);
            }
            u.last_vote = Some(time);
        }
    }

    fn record_vote(&mut self, ordinal: usize) {
        let r_count = self.n_resolves();
        let age = r_count - ordinal + 1;
        self.v[r_count - 1] += 1;
        self.per_resolve[ordinal - 1] += 1;
        self.per_age[age - 1] += 1;
        *self
            .window_cells
            .back_mut()
            .expect("open interval exists")
            .entry(ordinal as u32)
            .or_insert(0) += 1;

        // passive refresh of the age estimate with frozen r held constant
        if age > 1 && !self.f_frozen[age - 1] {
            let open = self.r_hat[r_count - age] * self.v[r_count - 1] as f64;
            let denom = self.denom_f[age - 1] + open;
            if denom > 0.0 {
                self.f_hat[age - 1] = self.per_age[age - 1] as f64 / denom;
            }
        }
        if self.per_age[age - 1] >= self.cfg.f_freeze_votes {
            self.f_frozen[age - 1] = true;
        }
    }

    /// Exposure sum_i f(i - j + 1) v_i over retained intervals i >= j,
    /// including the open interval.
    fn exposure(&self, ordinal: usize) -> f64 {
        let r_count = self.n_resolves();
        let mut acc = 0.0;
        for i in ordinal..=r_count {
            acc += self.f_hat[i - ordinal] * self.v[i - 1] as f64;
        }
        acc
    }

    fn add_resolve(&mut self, id: ResolveId) {
        let r_old = self.n_resolves();
        if r_old > 0 {
            // interval I_{r_old} closes now: refresh windowed estimates,
            // then fold this interval into the per-age denominators
            for j in self.window_start()..=r_old {
                let denom = self.exposure(j);
                self.r_hat[j - 1] = if self.per_resolve[j - 1] == 0 || denom <= 0.0 {
                    0.0
                } else {
                    self.per_resolve[j - 1] as f64 / denom
                };
            }
            let closing = self.v[r_old - 1] as f64;
            if closing > 0.0 {
                for a in 1..=r_old {
                    self.denom_f[a - 1] += self.r_hat[r_old - a] * closing;
                }
            }
            if r_old + 1 - self.frozen_resolves > self.cfg.window {
                // the oldest windowed resolve leaves with its final estimate
                self.frozen_resolves += 1;
                self.window_cells.pop_front();
            }
        }

        let ordinal = r_old as u32 + 1;
        self.ordinals.insert(id, ordinal);
        self.resolve_ids.push(id);
        self.per_resolve.push(0);
        self.r_hat.push(0.0);
        self.v.push(0);
        self.window_cells.push_back(HashMap::new());
        if r_old == 0 {
            self.f_hat.push(1.0); // gauge: f(1) = 1
            self.f_frozen.push(true);
        } else {
            self.f_hat.push(0.0);
            self.f_frozen.push(false);
        }
        self.per_age.push(0);
        self.denom_f.push(0.0);
    }

    /// Current estimate for a windowed resolve from the fixed-point
    /// equation with the current visibility estimates held fixed.
    pub fn estimate_new_resolve(&self, ordinality: usize) -> Result<ResolveEstimate, OnlineError> {
        let r_count = self.n_resolves();
        if r_count == 0 {
            return Err(OnlineError::WindowEmpty);
        }
        if ordinality <= self.frozen_resolves || ordinality > r_count || ordinality == 0 {
            return Err(OnlineError::NotInWindow {
                ordinality,
                window_start: self.window_start(),
                window_end: r_count,
            });
        }
        let votes = self.per_resolve[ordinality - 1];
        if votes == 0 {
            return Ok(ResolveEstimate { r: None, ci: (0.0, f64::INFINITY) });
        }
        let denom = self.exposure(ordinality);
        if denom <= 0.0 {
            return Ok(ResolveEstimate { r: None, ci: (0.0, f64::INFINITY) });
        }
        let (lo, hi) = poisson_ci_95(votes);
        Ok(ResolveEstimate { r: Some(votes as f64 / denom), ci: (lo / denom, hi / denom) })
    }

    /// Activity-rate estimate for a user at time `at`, from the streaming
    /// triple alone: events / (at - first_vote) with a Poisson-rate 95%
    /// interval.
    pub fn streaming_user_rate(&self, user: UserId, at: f64) -> Result<RateEstimate, OnlineError> {
        let err = OnlineError::InsufficientHistory { user };
        let Some(u) = self.users.get(&user.0) else {
            return Err(err);
        };
        let Some(first) = u.first_vote else {
            return Err(err);
        };
        let elapsed = at - first;
        if u.events < 2 || elapsed <= 0.0 {
            return Err(err);
        }
        let (lo, hi) = poisson_ci_95(u.events);
        Ok(RateEstimate {
            rate: u.events as f64 / elapsed,
            ci: (lo / elapsed, hi / elapsed),
            events: u.events,
            elapsed,
        })
    }

    /// Alternating fixed point restricted to the windowed resolves and the
    /// unfrozen ages, holding frozen values constant inside denominators.
    /// The reported log-likelihood covers the retained intervals.
    pub fn windowed_reoptimize(&mut self, fp: &FixedPointConfig) -> Result<ReoptimizeOutcome, OnlineError> {
        let r_count = self.n_resolves();
        if r_count == 0 {
            return Err(OnlineError::WindowEmpty);
        }
        let window_start = self.window_start();

        let mut trace = Vec::new();
        let mut converged = false;
        let mut iterations = 0;
        while iterations < fp.max_iterations {
            iterations += 1;
            let mut delta: f64 = 0.0;

            for j in window_start..=r_count {
                let denom = self.exposure(j);
                let new = if self.per_resolve[j - 1] == 0 || denom <= 0.0 {
                    0.0
                } else {
                    self.per_resolve[j - 1] as f64 / denom
                };
                delta = delta.max((new - self.r_hat[j - 1]).abs() / (self.r_hat[j - 1] + 1e-12));
                self.r_hat[j - 1] = new;
            }
            for a in 2..=r_count {
                if self.f_frozen[a - 1] {
                    continue;
                }
                let mut denom = 0.0;
                for j in 1..=(r_count - a + 1) {
                    denom += self.r_hat[j - 1] * self.v[a + j - 2] as f64;
                }
                let new = if self.per_age[a - 1] == 0 || denom <= 0.0 {
                    0.0
                } else {
                    self.per_age[a - 1] as f64 / denom
                };
                delta = delta.max((new - self.f_hat[a - 1]).abs() / (self.f_hat[a - 1] + 1e-12));
                self.f_hat[a - 1] = new;
            }

            trace.push(self.windowed_log_likelihood());
            if delta < fp.tolerance {
                converged = true;
                break;
            }
        }

        let log_likelihood = trace.last().copied().unwrap_or(f64::NAN);
        Ok(ReoptimizeOutcome { iterations, converged, log_likelihood, trace })
    }

    /// Poisson log-likelihood over the retained window intervals.
    fn windowed_log_likelihood(&self) -> f64 {
        let r_count = self.n_resolves();
        let mut ll = 0.0;
        for (offset, map) in self.window_cells.iter().enumerate() {
            let i = self.frozen_resolves + 1 + offset;
            let vi = self.v[i - 1] as f64;
            let mut mean_i = 0.0;
            for j in 1..=i {
                mean_i += self.r_hat[j - 1] * self.f_hat[i - j];
            }
            ll -= vi * mean_i;
            for (&resolve, &count) in map {
                let j = resolve as usize;
                let rate = vi * self.r_hat[j - 1] * self.f_hat[i - j];
                ll += count as f64 * rate.max(f64::MIN_POSITIVE).ln();
            }
        }
        debug_assert_eq!(
            self.window_cells.len(),
            r_count - self.frozen_resolves,
            "window cells cover exactly the retained intervals"
        );
        ll
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::compute_interval_counts;
    use crate::event_log::EventLog;
    use crate::mle::{estimate, FixedPointConfig};
    use crate::sim::{simulate, SimConfig};
    use approx::assert_relative_eq;

    fn no_reopt(window: usize) -> OnlineConfig {
        OnlineConfig {
            window,
            f_freeze_votes: u64::MAX,
            reoptimize_each_resolve: false,
            fixed_point: FixedPointConfig::default(),
        }
    }

    fn feed(state: &mut OnlineState, log: &EventLog) {
        for ev in log.events() {
            state.update(ev).unwrap();
        }
    }

    fn small_sim() -> crate::sim::SimOutput {
        let cfg = SimConfig {
            alpha: 4.0,
            tau: 25.0,
            duration_days: 80.0,
            rho_mu: 0.6,
            rho_sigma: 0.8,
            q: 0.03,
            lambda: 0.02,
            friends_attach_prob: 0.0,
            ..SimConfig::with_defaults(80.0, 99)
        };
        simulate(&cfg).unwrap()
    }

    #[test]
    fn replay_matches_batch_counts() {
        let out = small_sim();
        let batch = compute_interval_counts(&out.log).unwrap();
        let mut state = OnlineState::new(no_reopt(10_000));
        feed(&mut state, &out.log);
        assert_eq!(state.v(), batch.v());
        assert_eq!(state.per_resolve(), batch.per_resolve());
        assert_eq!(state.per_age(), batch.per_age());
        // with the window covering everything, the sparse cells agree too
        assert_eq!(state.window_cells(), batch.cells());
    }

    #[test]
    fn out_of_order_rejected() {
        let mut state = OnlineState::new(OnlineConfig::default());
        state
            .update(&Event::create(5.0, UserId(1), ResolveId(1)))
            .unwrap();
        let err = state.update(&Event::vote(4.0, UserId(2), ResolveId(1))).unwrap_err();
        assert!(matches!(err, OnlineError::OutOfOrderEvent { .. }));
        let err = state.update(&Event::vote(6.0, UserId(2), ResolveId(9))).unwrap_err();
        assert_eq!(err, OnlineError::UnknownResolve(ResolveId(9)));
    }

    #[test]
    fn first_estimate_is_inverse_interval_count() {
        let mut state = OnlineState::new(no_reopt(100));
        state.update(&Event::create(0.0, UserId(1), ResolveId(1))).unwrap();
        state.update(&Event::create(0.5, UserId(1), ResolveId(2))).unwrap();
        // two votes land in the open interval, one on resolve 2
        state.update(&Event::vote(0.6, UserId(2), ResolveId(1))).unwrap();
        state.update(&Event::vote(0.7, UserId(3), ResolveId(2))).unwrap();
        let est = state.estimate_new_resolve(2).unwrap();
        // r = V_j / (f(1) * v_so_far) = 1 / 2
        assert_relative_eq!(est.r.unwrap(), 0.5, max_relative = 1e-12);
        // unvoted windowed resolve reports no estimate with a vacuous CI
        state.update(&Event::create(1.0, UserId(1), ResolveId(3))).unwrap();
        let est = state.estimate_new_resolve(3).unwrap();
        assert_eq!(est.r, None);
        assert_eq!(est.ci.0, 0.0);
        assert!(est.ci.1.is_infinite());
    }

    #[test]
    fn frozen_resolve_estimates_never_change() {
        let out = small_sim();
        let mut state = OnlineState::new(OnlineConfig {
            window: 5,
            f_freeze_votes: 50,
            reoptimize_each_resolve: true,
            fixed_point: FixedPointConfig { max_iterations: 50, ..Default::default() },
        });
        let mut frozen_snapshot: Vec<(usize, f64)> = Vec::new();
        for ev in out.log.events() {
            state.update(ev).unwrap();
            for &(ord, r) in &frozen_snapshot {
                assert_eq!(state.r_estimates()[ord - 1], r, "frozen r moved for ordinal {ord}");
            }
            while frozen_snapshot.len() < state.frozen_resolves {
                let ord = frozen_snapshot.len() + 1;
                frozen_snapshot.push((ord, state.r_estimates()[ord - 1]));
            }
        }
        assert!(state.frozen_resolves > 0, "window never overflowed");
    }

    #[test]
    fn votes_on_frozen_resolves_update_age_counts_only() {
        let mut state = OnlineState::new(OnlineConfig {
            window: 1,
            f_freeze_votes: u64::MAX,
            reoptimize_each_resolve: false,
            fixed_point: FixedPointConfig::default(),
        });
        state.update(&Event::create(0.0, UserId(1), ResolveId(1))).unwrap();
        state.update(&Event::vote(0.1, UserId(2), ResolveId(1))).unwrap();
        state.update(&Event::create(1.0, UserId(1), ResolveId(2))).unwrap();
        assert!(state.is_frozen(1));
        let frozen_r = state.r_estimates()[0];
        let age2_before = state.per_age()[1];
        state.update(&Event::vote(1.5, UserId(3), ResolveId(1))).unwrap();
        assert_eq!(state.r_estimates()[0], frozen_r);
        assert_eq!(state.per_age()[1], age2_before + 1);
        assert!(state.f_estimates()[1] > 0.0, "age 2 gained an estimate");
    }

    #[test]
    fn full_window_reoptimize_matches_batch() {
        let out = small_sim();
        let batch = {
            let counts = compute_interval_counts(&out.log).unwrap();
            estimate(&counts, &FixedPointConfig::default()).unwrap()
        };
        let mut state = OnlineState::new(no_reopt(1_000_000));
        feed(&mut state, &out.log);
        let outcome = state
            .windowed_reoptimize(&FixedPointConfig { tolerance: 1e-10, max_iterations: 20_000, ..Default::default() })
            .unwrap();
        assert!(outcome.converged);
        for w in outcome.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9 * w[0].abs());
        }
        for j in 0..batch.r.len() {
            assert_relative_eq!(state.r_estimates()[j], batch.r[j], max_relative = 1e-4, epsilon = 1e-12);
        }
        for a in 0..batch.f.len() {
            assert_relative_eq!(state.f_estimates()[a], batch.f[a], max_relative = 1e-4, epsilon = 1e-12);
        }
    }

    #[test]
    fn window_of_one_updates_only_newest() {
        let out = small_sim();
        let mut state = OnlineState::new(no_reopt(1));
        feed(&mut state, &out.log);
        let r_before = state.r_estimates().to_vec();
        let newest = state.n_resolves();
        state.windowed_reoptimize(&FixedPointConfig::default()).unwrap();
        for j in 1..newest {
            assert_eq!(state.r_estimates()[j - 1], r_before[j - 1]);
        }
        assert_eq!(state.window_start(), newest);
    }

    #[test]
    fn state_size_is_bounded_by_parameters_not_events() {
        let mut state = OnlineState::new(no_reopt(3));
        state.update(&Event::create(0.0, UserId(1), ResolveId(1))).unwrap();
        state.update(&Event::create(0.1, UserId(1), ResolveId(2))).unwrap();
        let mut voter = 10u32;
        let mut t = 0.2;
        let mut measure = |state: &OnlineState| {
            state.r_hat.len() + state.f_hat.len() + state.window_cells.iter().map(|m| m.len()).sum::<usize>()
        };
        for _ in 0..100 {
            t += 0.01;
            state.update(&Event::vote(t, UserId(voter), ResolveId(1))).unwrap();
            voter += 1;
        }
        let size_small = measure(&state);
        for _ in 0..1000 {
            t += 0.01;
            state.update(&Event::vote(t, UserId(voter), ResolveId(2))).unwrap();
            voter += 1;
        }
        assert_eq!(measure(&state), size_small, "10x more votes must not grow the state");
    }

    #[test]
    fn streaming_rate_from_triple() {
        // 10 events over 5 days for one user
        let mut state = OnlineState::new(no_reopt(10));
        state.update(&Event::create(0.0, UserId(7), ResolveId(1))).unwrap();
        for k in 1..10u32 {
            state
                .update(&Event::create(0.5 * k as f64, UserId(7), ResolveId(1 + k)))
                .unwrap();
        }
        let est = state.streaming_user_rate(UserId(7), 5.0).unwrap();
        assert_relative_eq!(est.rate, 2.0, max_relative = 1e-12);
        assert!(est.ci.0 < 2.0 && 2.0 < est.ci.1);
        assert!(matches!(
            state.streaming_user_rate(UserId(99), 5.0),
            Err(OnlineError::InsufficientHistory { .. })
        ));
    }

    #[test]
    fn ci_width_shrinks_with_observed_votes() {
        // all votes go to the tracked resolve in its first interval, so
        // the exposure equals the vote count and the width scales as
        // 1/sqrt(k)
        let mut state = OnlineState::new(no_reopt(10));
        state.update(&Event::create(0.0, UserId(1), ResolveId(1))).unwrap();
        let mut prev_width = f64::INFINITY;
        for k in 1..=40u32 {
            state
                .update(&Event::vote(k as f64 * 0.01, UserId(k + 1), ResolveId(1)))
                .unwrap();
            let est = state.estimate_new_resolve(1).unwrap();
            let width = est.ci.1 - est.ci.0;
            assert!(width < prev_width, "width grew at k={k}: {width} vs {prev_width}");
            prev_width = width;
        }
    }
}
