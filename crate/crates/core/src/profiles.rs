//! Per-user activity profiles derived from an event log.

use crate::event_log::EventLog;
use crate::types::{EventKind, UserId};
use std::collections::BTreeMap;

/// Observed activity of one user.
///
/// `event_count` counts votes, resolve creations, and links (links count
/// for both endpoints, since both parties act to establish one). The
/// activity span, however, runs between the user's first and last vote
/// (creations included, links not) — links contribute to `event_count`
/// but not to the span endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    pub id: UserId,
    pub first_vote_time: Option<f64>,
    pub last_vote_time: Option<f64>,
    /// e_u: votes + resolve creations + links.
    pub event_count: u64,
    /// T_u in days: last vote minus first vote. `None` without any vote.
    pub activity_time: Option<f64>,
    /// rho_u = e_u / T_u in events per day; defined only when T_u > 0.
    pub activity_rate: Option<f64>,
    /// Active means a voting span of at least one day.
    pub is_active: bool,
}

/// Builds one profile per user appearing in the log, in id order. Link
/// targets count as participants: accepting a link is an action.
pub fn compute_user_profiles(log: &EventLog) -> Vec<UserProfile> {
    #[derive(Default)]
    struct Acc {
        events: u64,
        first_vote: Option<f64>,
        last_vote: Option<f64>,
    }

    let mut acc: BTreeMap<UserId, Acc> = BTreeMap::new();
    for ev in log.events() {
        let a = acc.entry(ev.actor).or_default();
        a.events += 1;
        if ev.kind.is_vote_like() {
            if a.first_vote.is_none() {
                a.first_vote = Some(ev.time);
            }
            a.last_vote = Some(ev.time);
        }
        if let EventKind::FormLink { target, .. } = ev.kind {
            let t = acc.entry(target).or_default();
            t.events += 1;
        }
    }

    acc.into_iter()
        .map(|(id, a)| {
            let activity_time = match (a.first_vote, a.last_vote) {
                (Some(first), Some(last)) => Some(last - first),
                _ => None,
            };
            let activity_rate = match activity_time {
                Some(t) if t > 0.0 => Some(a.events as f64 / t),
                _ => None,
            };
            UserProfile {
                id,
                first_vote_time: a.first_vote,
                last_vote_time: a.last_vote,
                event_count: a.events,
                activity_time,
                activity_rate,
                is_active: activity_time.map_or(false, |t| t >= 1.0),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Event, NetworkKind, ResolveId};

    #[test]
    fn rate_is_events_over_span() {
        let events = vec![
            Event::create(0.0, UserId(1), ResolveId(1)),
            Event::vote(0.0, UserId(7), ResolveId(1)),
            Event::create(5.0, UserId(1), ResolveId(2)),
            Event::vote(10.0, UserId(7), ResolveId(2)),
        ];
        let log = EventLog::from_events(events).unwrap();
        let profiles = compute_user_profiles(&log);
        let u7 = profiles.iter().find(|p| p.id == UserId(7)).unwrap();
        assert_eq!(u7.event_count, 2);
        assert_eq!(u7.activity_time, Some(10.0));
        assert_eq!(u7.activity_rate, Some(0.2));
        assert!(u7.is_active);
    }

    #[test]
    fn single_event_user_has_no_rate() {
        let events = vec![Event::create(3.0, UserId(1), ResolveId(1))];
        let log = EventLog::from_events(events).unwrap();
        let profiles = compute_user_profiles(&log);
        assert_eq!(profiles.len(), 1);
        let p = &profiles[0];
        assert_eq!(p.activity_time, Some(0.0));
        assert_eq!(p.activity_rate, None);
        assert!(!p.is_active);
    }

    #[test]
    fn links_count_for_both_endpoints_but_not_for_the_span() {
        let events = vec![
            Event::create(0.0, UserId(1), ResolveId(1)),
            Event::vote(0.5, UserId(2), ResolveId(1)),
            Event::link(4.0, UserId(2), UserId(1), NetworkKind::Friends),
        ];
        let log = EventLog::from_events(events).unwrap();
        let profiles = compute_user_profiles(&log);
        let u2 = profiles.iter().find(|p| p.id == UserId(2)).unwrap();
        assert_eq!(u2.event_count, 2);
        assert_eq!(u2.activity_time, Some(0.0)); // span from votes only
        let u1 = profiles.iter().find(|p| p.id == UserId(1)).unwrap();
        assert_eq!(u1.event_count, 2); // creation + received link
    }
}
