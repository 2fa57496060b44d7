//! Shared identifiers and the event vocabulary of a community log.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a user. Simulator output numbers users densely from 1 in
/// arrival order; ingested logs may use arbitrary values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

/// Identifier of a resolve (a votable content item). Distinct from its
/// ordinality: the ordinality is the 1-based position in creation order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResolveId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ResolveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The three user networks.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Friends,
    Allies,
    Nemeses,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Friends, NetworkKind::Allies, NetworkKind::Nemeses];

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Friends => "friends",
            NetworkKind::Allies => "allies",
            NetworkKind::Nemeses => "nemeses",
        }
    }

    pub fn parse(s: &str) -> Option<NetworkKind> {
        match s {
            "friends" => Some(NetworkKind::Friends),
            "allies" => Some(NetworkKind::Allies),
            "nemeses" => Some(NetworkKind::Nemeses),
            _ => None,
        }
    }

    /// Allies and nemeses; friends is the social network.
    pub fn is_ideological(self) -> bool {
        !matches!(self, NetworkKind::Friends)
    }

    pub(crate) fn index(self) -> usize {
        match self {
            NetworkKind::Friends => 0,
            NetworkKind::Allies => 1,
            NetworkKind::Nemeses => 2,
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a user did.
///
/// A `CreateResolve` carries the creator's first vote on the new resolve
/// implicitly; no separate `Vote` event is recorded for it and creation
/// votes are excluded from all vote counts.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum EventKind {
    Vote { resolve: ResolveId },
    CreateResolve { resolve: ResolveId },
    FormLink { target: UserId, network: NetworkKind },
}

impl EventKind {
    /// Votes and resolve creations both mark voting activity for the actor.
    pub fn is_vote_like(&self) -> bool {
        matches!(self, EventKind::Vote { .. } | EventKind::CreateResolve { .. })
    }
}

/// One user action at a point in time. Time is in days since an arbitrary
/// epoch; real-valued, ties permitted (broken by log order).
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Event {
    pub time: f64,
    pub actor: UserId,
    pub kind: EventKind,
}

impl Event {
    pub fn vote(time: f64, actor: UserId, resolve: ResolveId) -> Event {
        Event { time, actor, kind: EventKind::Vote { resolve } }
    }

    pub fn create(time: f64, actor: UserId, resolve: ResolveId) -> Event {
        Event { time, actor, kind: EventKind::CreateResolve { resolve } }
    }

    pub fn link(time: f64, actor: UserId, target: UserId, network: NetworkKind) -> Event {
        Event { time, actor, kind: EventKind::FormLink { target, network } }
    }
}
