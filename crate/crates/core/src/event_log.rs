//! Validated, time-ordered event logs and their CSV interchange format.
//!
//! The CSV schema is `time,user,kind,resolve,target,network` with
//! `kind` one of `vote`, `create`, `link`; inapplicable columns are left
//! empty. This format is the contract between simulator output and
//! estimator input.

use crate::types::{Event, EventKind, NetworkKind, ResolveId, UserId};
use std::collections::{HashMap, HashSet};
use std::io;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ValidationError {
    #[error("event {index}: time {time} precedes previous event time {previous}")]
    OutOfOrder { index: usize, time: f64, previous: f64 },
    #[error("event {index}: vote on unknown resolve {resolve}")]
    UnknownResolve { index: usize, resolve: ResolveId },
    #[error("event {index}: resolve {resolve} created twice")]
    DuplicateResolve { index: usize, resolve: ResolveId },
    #[error("event {index}: user {actor} already voted on resolve {resolve}")]
    DuplicateVote { index: usize, actor: UserId, resolve: ResolveId },
    #[error("event {index}: user {user} linked to themselves")]
    SelfLink { index: usize, user: UserId },
    #[error("event {index}: pair ({a}, {b}) already linked in the {network} network")]
    DuplicateLink { index: usize, a: UserId, b: UserId, network: NetworkKind },
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A validated sequence of events together with the resolve creation order.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
    resolve_order: Vec<ResolveId>,
    ordinals: HashMap<ResolveId, u32>,
}

impl EventLog {
    /// Validates and wraps a sequence of events. Checks, in order of first
    /// violation: non-decreasing times, votes referencing created resolves,
    /// unique resolve creations, at most one vote per (actor, resolve) with
    /// creation counting as the creator's vote, no self links, and unique
    /// unordered link pairs per network.
    pub fn from_events(events: Vec<Event>) -> Result<EventLog, ValidationError> {
        let mut resolve_order = Vec::new();
        let mut ordinals: HashMap<ResolveId, u32> = HashMap::new();
        let mut voted: HashSet<(u32, u32)> = HashSet::new();
        let mut links: HashSet<(u8, u32, u32)> = HashSet::new();
        let mut prev_time = f64::NEG_INFINITY;

        for (index, ev) in events.iter().enumerate() {
            if ev.time < prev_time {
                return Err(ValidationError::OutOfOrder { index, time: ev.time, previous: prev_time });
            }
            prev_time = ev.time;
            match ev.kind {
                EventKind::Vote { resolve } => {
                    if !ordinals.contains_key(&resolve) {
                        return Err(ValidationError::UnknownResolve { index, resolve });
                    }
                    if !voted.insert((ev.actor.0, resolve.0)) {
                        return Err(ValidationError::DuplicateVote { index, actor: ev.actor, resolve });
                    }
                }
                EventKind::CreateResolve { resolve } => {
                    if ordinals.contains_key(&resolve) {
                        return Err(ValidationError::DuplicateResolve { index, resolve });
                    }
                    ordinals.insert(resolve, resolve_order.len() as u32 + 1);
                    resolve_order.push(resolve);
                    // creation carries the creator's first vote
                    voted.insert((ev.actor.0, resolve.0));
                }
                EventKind::FormLink { target, network } => {
                    if target == ev.actor {
                        return Err(ValidationError::SelfLink { index, user: ev.actor });
                    }
                    let (a, b) = if ev.actor.0 < target.0 { (ev.actor.0, target.0) } else { (target.0, ev.actor.0) };
                    if !links.insert((network.index() as u8, a, b)) {
                        return Err(ValidationError::DuplicateLink {
                            index,
                            a: UserId(a),
                            b: UserId(b),
                            network,
                        });
                    }
                }
            }
        }

        Ok(EventLog { events, resolve_order, ordinals })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Number of resolves created in this log.
    pub fn n_resolves(&self) -> usize {
        self.resolve_order.len()
    }

    /// Resolve ids in creation order; index 0 holds ordinality 1.
    pub fn resolve_order(&self) -> &[ResolveId] {
        &self.resolve_order
    }

    /// 1-based creation ordinality of a resolve.
    pub fn ordinality(&self, resolve: ResolveId) -> Option<usize> {
        self.ordinals.get(&resolve).map(|&o| o as usize)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["time", "user", "kind", "resolve", "target", "network"])?;
        for ev in &self.events {
            let time = format_time(ev.time);
            let user = ev.actor.0.to_string();
            match ev.kind {
                EventKind::Vote { resolve } => {
                    w.write_record([&time, &user, "vote", &resolve.0.to_string(), "", ""])?
                }
                EventKind::CreateResolve { resolve } => {
                    w.write_record([&time, &user, "create", &resolve.0.to_string(), "", ""])?
                }
                EventKind::FormLink { target, network } => w.write_record([
                    &time,
                    &user,
                    "link",
                    "",
                    &target.0.to_string(),
                    network.as_str(),
                ])?,
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn format_time(t: f64) -> String {
    // f64 Display is the shortest representation that round-trips
    format!("{t}")
}

/// Parses and validates an event CSV stream.
pub fn ingest_event_log<R: io::Read>(reader: R) -> Result<EventLog, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| IngestError::Parse { line: 1, reason: e.to_string() })?;
        let expected = ["time", "user", "kind", "resolve", "target", "network"];
        let got: Vec<&str> = headers.iter().map(|h| h.trim()).collect();
        if got != expected {
            return Err(IngestError::Parse {
                line: 1,
                reason: format!("expected header {:?}, got {:?}", expected.join(","), got.join(",")),
            });
        }
    }

    let mut events = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let record = record.map_err(|e| IngestError::Parse { line, reason: e.to_string() })?;
        events.push(parse_record(&record, line)?);
    }
    Ok(EventLog::from_events(events)?)
}

fn parse_record(record: &csv::StringRecord, line: usize) -> Result<Event, IngestError> {
    let err = |reason: String| IngestError::Parse { line, reason };
    let field = |idx: usize| record.get(idx).unwrap_or("").trim();

    let time: f64 = field(0)
        .parse()
        .map_err(|_| err(format!("invalid time {:?}", field(0))))?;
    if !time.is_finite() {
        return Err(err(format!("non-finite time {:?}", field(0))));
    }
    let actor = UserId(
        field(1)
            .parse()
            .map_err(|_| err(format!("invalid user id {:?}", field(1))))?,
    );

    let parse_resolve = |s: &str| -> Result<ResolveId, IngestError> {
        Ok(ResolveId(s.parse().map_err(|_| IngestError::Parse {
            line,
            reason: format!("invalid resolve id {s:?}"),
        })?))
    };

    let kind = match field(2) {
        "vote" => EventKind::Vote { resolve: parse_resolve(field(3))? },
        "create" => EventKind::CreateResolve { resolve: parse_resolve(field(3))? },
        "link" => {
            let target = UserId(
                field(4)
                    .parse()
                    .map_err(|_| err(format!("invalid target id {:?}", field(4))))?,
            );
            let network = NetworkKind::parse(field(5))
                .ok_or_else(|| err(format!("invalid network {:?}", field(5))))?;
            EventKind::FormLink { target, network }
        }
        other => return Err(err(format!("unknown kind {other:?}"))),
    };
    Ok(Event { time, actor, kind })
}
