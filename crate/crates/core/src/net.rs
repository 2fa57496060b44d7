//! Network observables: link sets, degree distributions, common-vote
//! statistics, link-type mixes, transitivity, and the no-links prediction.

use crate::event_log::EventLog;
use crate::fit::{fit_truncated_power_law, DistributionFit, FitError};
use crate::numeric::{normal_pdf, simpson};
use crate::types::{EventKind, NetworkKind, UserId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("user {0} cannot link to themselves")]
    SelfLink(UserId),
    #[error("the {0} network has no links")]
    EmptyNetwork(NetworkKind),
    #[error("no users with links")]
    NoLinkedUsers,
    #[error("the {0} network has no connected triples")]
    NoTriples(NetworkKind),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Undirected, per-network link sets. Pairs are stored canonically
/// (smaller id first) and iterate in deterministic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkSet {
    sets: [BTreeSet<(u32, u32)>; 3],
}

impl LinkSet {
    pub fn new() -> LinkSet {
        LinkSet::default()
    }

    /// Collects the `FormLink` events of a log.
    pub fn from_log(log: &EventLog) -> LinkSet {
        let mut links = LinkSet::new();
        for ev in log.events() {
            if let EventKind::FormLink { target, network } = ev.kind {
                links.insert(network, ev.actor, target).expect("validated log has no self links");
            }
        }
        links
    }

    /// Returns whether the pair was newly inserted.
    pub fn insert(&mut self, network: NetworkKind, a: UserId, b: UserId) -> Result<bool, NetError> {
        if a == b {
            return Err(NetError::SelfLink(a));
        }
        let key = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
        Ok(self.sets[network.index()].insert(key))
    }

    pub fn contains(&self, network: NetworkKind, a: UserId, b: UserId) -> bool {
        let key = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
        self.sets[network.index()].contains(&key)
    }

    pub fn count(&self, network: NetworkKind) -> usize {
        self.sets[network.index()].len()
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(|s| s.len()).sum()
    }

    pub fn pairs(&self, network: NetworkKind) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.sets[network.index()].iter().map(|&(a, b)| (UserId(a), UserId(b)))
    }

    /// Degree of every user with at least one link in the network.
    pub fn degrees(&self, network: NetworkKind) -> BTreeMap<UserId, u64> {
        let mut out: BTreeMap<UserId, u64> = BTreeMap::new();
        for &(a, b) in &self.sets[network.index()] {
            *out.entry(UserId(a)).or_insert(0) += 1;
            *out.entry(UserId(b)).or_insert(0) += 1;
        }
        out
    }

    /// Users appearing in at least one network.
    pub fn users_in_any(&self) -> BTreeSet<UserId> {
        let mut out = BTreeSet::new();
        for set in &self.sets {
            for &(a, b) in set {
                out.insert(UserId(a));
                out.insert(UserId(b));
            }
        }
        out
    }

    /// CSV with header `network,user_a,user_b`, sorted by network then pair.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["network", "user_a", "user_b"])?;
        for kind in NetworkKind::ALL {
            for &(a, b) in &self.sets[kind.index()] {
                w.write_record([kind.as_str(), &a.to_string(), &b.to_string()])?;
            }
        }
        w.flush()
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<LinkSet, NetError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = rdr.headers().map_err(|e| NetError::Parse { line: 1, reason: e.to_string() })?;
            let got: Vec<&str> = headers.iter().map(|h| h.trim()).collect();
            if got != ["network", "user_a", "user_b"] {
                return Err(NetError::Parse { line: 1, reason: format!("unexpected header {got:?}") });
            }
        }
        let mut links = LinkSet::new();
        for (i, record) in rdr.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| NetError::Parse { line, reason: e.to_string() })?;
            let field = |idx: usize| record.get(idx).unwrap_or("").trim();
            let network = NetworkKind::parse(field(0))
                .ok_or_else(|| NetError::Parse { line, reason: format!("invalid network {:?}", field(0)) })?;
            let a: u32 = field(1)
                .parse()
                .map_err(|_| NetError::Parse { line, reason: format!("invalid user id {:?}", field(1)) })?;
            let b: u32 = field(2)
                .parse()
                .map_err(|_| NetError::Parse { line, reason: format!("invalid user id {:?}", field(2)) })?;
            links.insert(network, UserId(a), UserId(b))?;
        }
        Ok(links)
    }
}

/// Per-user vote sets (creations count as votes on the created resolve).
#[derive(Debug, Clone)]
pub struct VoteSets {
    sets: HashMap<u32, Vec<u32>>,
}

impl VoteSets {
    pub fn from_log(log: &EventLog) -> VoteSets {
        let mut sets: HashMap<u32, Vec<u32>> = HashMap::new();
        for ev in log.events() {
            match ev.kind {
                EventKind::Vote { resolve } | EventKind::CreateResolve { resolve } => {
                    sets.entry(ev.actor.0).or_default().push(resolve.0);
                }
                EventKind::FormLink { .. } => {}
            }
        }
        for votes in sets.values_mut() {
            votes.sort_unstable();
        }
        VoteSets { sets }
    }

    pub fn count(&self, user: UserId) -> u64 {
        self.sets.get(&user.0).map_or(0, |v| v.len() as u64)
    }

    /// Number of resolves both users voted on.
    pub fn common(&self, a: UserId, b: UserId) -> u64 {
        let (Some(va), Some(vb)) = (self.sets.get(&a.0), self.sets.get(&b.0)) else {
            return 0;
        };
        let mut i = 0;
        let mut j = 0;
        let mut common = 0;
        while i < va.len() && j < vb.len() {
            match va[i].cmp(&vb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        common
    }
}

/// Relationship taxonomy of a user pair across the networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkType {
    /// Linked only in the friends network.
    OnlyFriends,
    /// Linked ideologically (allies or nemeses) but not as friends.
    NonFriends,
    /// Both a friends link and an ideological link.
    FriendsAndIdeological,
    Unlinked,
}

pub fn classify_pair(links: &LinkSet, a: UserId, b: UserId) -> LinkType {
    let friends = links.contains(NetworkKind::Friends, a, b);
    let ideological =
        links.contains(NetworkKind::Allies, a, b) || links.contains(NetworkKind::Nemeses, a, b);
    match (friends, ideological) {
        (true, false) => LinkType::OnlyFriends,
        (false, true) => LinkType::NonFriends,
        (true, true) => LinkType::FriendsAndIdeological,
        (false, false) => LinkType::Unlinked,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub pair: (UserId, UserId),
    pub common_votes: u64,
    pub link_type: LinkType,
}

pub fn pair_stats(votes: &VoteSets, links: &LinkSet, a: UserId, b: UserId) -> PairStats {
    PairStats { pair: (a, b), common_votes: votes.common(a, b), link_type: classify_pair(links, a, b) }
}

/// Degree histogram of one network with its truncated power-law fit.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    pub network: NetworkKind,
    /// (degree, number of users with that degree), ascending, degree >= 1.
    pub histogram: Vec<(u64, u64)>,
    pub fit: DistributionFit,
}

pub fn degree_distribution(links: &LinkSet, network: NetworkKind) -> Result<DegreeDistribution, NetError> {
    let degrees = links.degrees(network);
    if degrees.is_empty() {
        return Err(NetError::EmptyNetwork(network));
    }
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for &d in degrees.values() {
        *hist.entry(d).or_insert(0) += 1;
    }
    let sample: Vec<u64> = degrees.values().copied().collect();
    let fit = fit_truncated_power_law(&sample)?;
    Ok(DegreeDistribution { network, histogram: hist.into_iter().collect(), fit })
}

/// Survival curve of common votes for one pair group: `survival[c]` is the
/// fraction of pairs with more than `c` common votes.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonVotesGroup {
    pub label: String,
    pub n_pairs: usize,
    pub survival: Vec<f64>,
}

fn survival_curve(common: &[u64]) -> Vec<f64> {
    if common.is_empty() {
        return Vec::new();
    }
    let max = *common.iter().max().expect("nonempty") as usize;
    let mut counts = vec![0u64; max + 1];
    for &c in common {
        counts[c as usize] += 1;
    }
    // survival[c] = fraction strictly greater than c
    let n = common.len() as f64;
    let mut above = common.len() as u64;
    (0..=max)
        .map(|c| {
            above -= counts[c];
            above as f64 / n
        })
        .collect()
}

/// Common-vote survival curves for each network's linked pairs and a
/// seeded uniform sample of random pairs among users in any network.
pub fn common_votes_distribution(
    log: &EventLog,
    links: &LinkSet,
    n_random_pairs: usize,
    seed: u64,
) -> Result<Vec<CommonVotesGroup>, NetError> {
    let votes = VoteSets::from_log(log);
    let mut groups = Vec::new();
    for kind in NetworkKind::ALL {
        let common: Vec<u64> = links.pairs(kind).map(|(a, b)| votes.common(a, b)).collect();
        groups.push(CommonVotesGroup {
            label: kind.as_str().to_string(),
            n_pairs: common.len(),
            survival: survival_curve(&common),
        });
    }

    let pool: Vec<UserId> = links.users_in_any().into_iter().collect();
    let mut random_common = Vec::with_capacity(n_random_pairs);
    if pool.len() >= 2 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for _ in 0..n_random_pairs {
            let a = pool[rng.gen_range(0..pool.len())];
            let b = loop {
                let candidate = pool[rng.gen_range(0..pool.len())];
                if candidate != a {
                    break candidate;
                }
            };
            random_common.push(votes.common(a, b));
        }
    }
    groups.push(CommonVotesGroup {
        label: "random".to_string(),
        n_pairs: random_common.len(),
        survival: survival_curve(&random_common),
    });
    Ok(groups)
}

/// Mean link-type fractions within one vote-count quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTypeBucket {
    pub n_users: usize,
    pub mean_votes: f64,
    pub only_friends: f64,
    pub only_friends_se: f64,
    pub non_friends: f64,
    pub non_friends_se: f64,
    pub friends_and_ideological: f64,
    pub friends_and_ideological_se: f64,
}

/// Buckets linked users into vote-count quantiles (ties broken by user id)
/// and averages each user's link-type fractions per bucket, with standard
/// errors of the means.
pub fn link_type_fractions(
    log: &EventLog,
    links: &LinkSet,
    n_quantiles: usize,
) -> Result<Vec<LinkTypeBucket>, NetError> {
    let votes = VoteSets::from_log(log);
    let n_quantiles = n_quantiles.max(1);

    // per-user partner sets across networks
    let mut friends: HashMap<u32, BTreeSet<u32>> = HashMap::new();
    let mut ideological: HashMap<u32, BTreeSet<u32>> = HashMap::new();
    for kind in NetworkKind::ALL {
        for (a, b) in links.pairs(kind) {
            let map = if kind == NetworkKind::Friends { &mut friends } else { &mut ideological };
            map.entry(a.0).or_default().insert(b.0);
            map.entry(b.0).or_default().insert(a.0);
        }
    }

    let mut users: Vec<(u64, u32, [f64; 3])> = Vec::new();
    for user in links.users_in_any() {
        let empty = BTreeSet::new();
        let fr = friends.get(&user.0).unwrap_or(&empty);
        let id = ideological.get(&user.0).unwrap_or(&empty);
        let total = fr.union(id).count() as f64;
        let both = fr.intersection(id).count() as f64;
        let only_fr = fr.len() as f64 - both;
        let only_id = id.len() as f64 - both;
        users.push((votes.count(user), user.0, [only_fr / total, only_id / total, both / total]));
    }
    if users.is_empty() {
        return Err(NetError::NoLinkedUsers);
    }
    users.sort_by_key(|&(v, id, _)| (v, id));

    let n = users.len();
    let mut buckets = Vec::with_capacity(n_quantiles.min(n));
    for q in 0..n_quantiles {
        let start = q * n / n_quantiles;
        let end = ((q + 1) * n / n_quantiles).min(n);
        if start >= end {
            continue;
        }
        let chunk = &users[start..end];
        let m = chunk.len() as f64;
        let mean_votes = chunk.iter().map(|&(v, _, _)| v as f64).sum::<f64>() / m;
        let mut means = [0.0f64; 3];
        for &(_, _, fracs) in chunk {
            for k in 0..3 {
                means[k] += fracs[k];
            }
        }
        for mk in means.iter_mut() {
            *mk /= m;
        }
        let mut ses = [0.0f64; 3];
        if chunk.len() > 1 {
            for &(_, _, fracs) in chunk {
                for k in 0..3 {
                    ses[k] += (fracs[k] - means[k]).powi(2);
                }
            }
            for sk in ses.iter_mut() {
                *sk = (*sk / (m - 1.0)).sqrt() / m.sqrt();
            }
        }
        buckets.push(LinkTypeBucket {
            n_users: chunk.len(),
            mean_votes,
            only_friends: means[0],
            only_friends_se: ses[0],
            non_friends: means[1],
            non_friends_se: ses[1],
            friends_and_ideological: means[2],
            friends_and_ideological_se: ses[2],
        });
    }
    Ok(buckets)
}

/// Global clustering coefficient: 3 x triangles / connected triples.
pub fn transitivity(links: &LinkSet, network: NetworkKind) -> Result<f64, NetError> {
    let mut adjacency: HashMap<u32, Vec<u32>> = HashMap::new();
    for (a, b) in links.pairs(network) {
        adjacency.entry(a.0).or_default().push(b.0);
        adjacency.entry(b.0).or_default().push(a.0);
    }
    if adjacency.is_empty() {
        return Err(NetError::EmptyNetwork(network));
    }
    for neigh in adjacency.values_mut() {
        neigh.sort_unstable();
    }
    let triples: u64 = adjacency
        .values()
        .map(|neigh| {
            let d = neigh.len() as u64;
            d * (d - 1) / 2
        })
        .sum();
    if triples == 0 {
        return Err(NetError::NoTriples(network));
    }
    // sum over edges of |N(a) ∩ N(b)| counts each triangle three times
    let mut closed: u64 = 0;
    for (a, b) in links.pairs(network) {
        let (na, nb) = (&adjacency[&a.0], &adjacency[&b.0]);
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    closed += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    Ok(closed as f64 / triples as f64)
}

/// Population probability of ending life with no formed links,
/// E[exp(-lambda rho t)] with rho lognormal and t exponential with mean
/// tau. The inner exponential average has the closed form
/// 1 / (1 + lambda rho tau), leaving a one-dimensional lognormal integral
/// evaluated to well below 1e-4 absolute error.
pub fn no_links_probability(lambda: f64, tau: f64, rho_mu: f64, rho_sigma: f64) -> f64 {
    assert!(lambda >= 0.0 && tau > 0.0 && rho_sigma >= 0.0);
    if lambda == 0.0 {
        return 1.0;
    }
    if rho_sigma == 0.0 {
        return 1.0 / (1.0 + lambda * rho_mu.exp() * tau);
    }
    simpson(
        |z| normal_pdf(z) / (1.0 + lambda * tau * (rho_mu + rho_sigma * z).exp()),
        -12.0,
        12.0,
        4000,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Event;
    use approx::assert_relative_eq;

    fn uid(n: u32) -> UserId {
        UserId(n)
    }

    #[test]
    fn degree_bookkeeping() {
        let mut links = LinkSet::new();
        links.insert(NetworkKind::Allies, uid(1), uid(2)).unwrap();
        let degrees = links.degrees(NetworkKind::Allies);
        assert_eq!(degrees[&uid(1)], 1);
        assert_eq!(degrees[&uid(2)], 1);
        // star on 5 nodes: center degree 4, leaves degree 1
        let mut star = LinkSet::new();
        for leaf in 2..=5 {
            star.insert(NetworkKind::Friends, uid(1), uid(leaf)).unwrap();
        }
        let degrees = star.degrees(NetworkKind::Friends);
        assert_eq!(degrees[&uid(1)], 4);
        assert_eq!(degrees.values().filter(|&&d| d == 1).count(), 4);
        // degree sum = 2 x link count
        let total: u64 = degrees.values().sum();
        assert_eq!(total, 2 * star.count(NetworkKind::Friends) as u64);
    }

    #[test]
    fn self_links_rejected_and_duplicates_ignored() {
        let mut links = LinkSet::new();
        assert!(matches!(links.insert(NetworkKind::Allies, uid(1), uid(1)), Err(NetError::SelfLink(_))));
        assert!(links.insert(NetworkKind::Allies, uid(1), uid(2)).unwrap());
        assert!(!links.insert(NetworkKind::Allies, uid(2), uid(1)).unwrap());
        assert_eq!(links.count(NetworkKind::Allies), 1);
    }

    #[test]
    fn links_csv_round_trip() {
        let mut links = LinkSet::new();
        links.insert(NetworkKind::Friends, uid(3), uid(1)).unwrap();
        links.insert(NetworkKind::Nemeses, uid(2), uid(7)).unwrap();
        let mut buf = Vec::new();
        links.write_csv(&mut buf).unwrap();
        let reparsed = LinkSet::read_csv(buf.as_slice()).unwrap();
        assert_eq!(links, reparsed);
    }

    #[test]
    fn common_votes_by_intersection() {
        let mut events = vec![];
        for rid in 1..=5u32 {
            events.push(Event::create(rid as f64, uid(99), crate::types::ResolveId(rid)));
        }
        for rid in 1..=5u32 {
            events.push(Event::vote(10.0, uid(1), crate::types::ResolveId(rid)));
            events.push(Event::vote(10.0, uid(2), crate::types::ResolveId(rid)));
        }
        events.push(Event::vote(11.0, uid(3), crate::types::ResolveId(1)));
        let log = EventLog::from_events(events).unwrap();
        let votes = VoteSets::from_log(&log);
        assert_eq!(votes.common(uid(1), uid(2)), 5);
        assert_eq!(votes.common(uid(3), uid(99)), 1); // creator voted via creation
        assert_eq!(votes.common(uid(1), uid(42)), 0);
        // symmetric and bounded by the smaller vote count
        assert_eq!(votes.common(uid(2), uid(1)), votes.common(uid(1), uid(2)));
        assert!(votes.common(uid(1), uid(3)) <= votes.count(uid(3)));
    }

    #[test]
    fn transitivity_of_canonical_graphs() {
        let mut triangle = LinkSet::new();
        triangle.insert(NetworkKind::Allies, uid(1), uid(2)).unwrap();
        triangle.insert(NetworkKind::Allies, uid(2), uid(3)).unwrap();
        triangle.insert(NetworkKind::Allies, uid(3), uid(1)).unwrap();
        assert_relative_eq!(transitivity(&triangle, NetworkKind::Allies).unwrap(), 1.0);

        let mut star = LinkSet::new();
        for leaf in 2..=6 {
            star.insert(NetworkKind::Allies, uid(1), uid(leaf)).unwrap();
        }
        assert_relative_eq!(transitivity(&star, NetworkKind::Allies).unwrap(), 0.0);

        let mut edge = LinkSet::new();
        edge.insert(NetworkKind::Allies, uid(1), uid(2)).unwrap();
        assert!(matches!(transitivity(&edge, NetworkKind::Allies), Err(NetError::NoTriples(_))));
    }

    #[test]
    fn no_links_closed_forms() {
        assert_eq!(no_links_probability(0.0, 124.0, 0.03, 1.7), 1.0);
        let point_mass = no_links_probability(0.05, 100.0, 0.0, 0.0);
        assert_relative_eq!(point_mass, 1.0 / 6.0, max_relative = 1e-12);
        // monotone decreasing in lambda and tau
        let a = no_links_probability(0.02, 124.0, 0.03, 1.7);
        let b = no_links_probability(0.04, 124.0, 0.03, 1.7);
        let c = no_links_probability(0.04, 200.0, 0.03, 1.7);
        assert!(a > b && b > c);
    }

    #[test]
    fn link_type_partition_sums_to_one() {
        let mut events = vec![Event::create(0.0, uid(1), crate::types::ResolveId(1))];
        events.push(Event::vote(0.5, uid(2), crate::types::ResolveId(1)));
        events.push(Event::vote(0.6, uid(3), crate::types::ResolveId(1)));
        let log = EventLog::from_events(events).unwrap();
        let mut links = LinkSet::new();
        links.insert(NetworkKind::Friends, uid(1), uid(2)).unwrap();
        links.insert(NetworkKind::Allies, uid(2), uid(3)).unwrap();
        links.insert(NetworkKind::Friends, uid(1), uid(3)).unwrap();
        links.insert(NetworkKind::Nemeses, uid(1), uid(3)).unwrap();
        let buckets = link_type_fractions(&log, &links, 2).unwrap();
        for b in &buckets {
            assert_relative_eq!(
                b.only_friends + b.non_friends + b.friends_and_ideological,
                1.0,
                epsilon = 1e-12
            );
        }
        // a lone friends-only user sits entirely in OnlyFriends
        let mut lonely = LinkSet::new();
        lonely.insert(NetworkKind::Friends, uid(2), uid(3)).unwrap();
        let buckets = link_type_fractions(&log, &lonely, 1).unwrap();
        assert_eq!(buckets.len(), 1);
        assert_relative_eq!(buckets[0].only_friends, 1.0);
    }

    #[test]
    fn classify_pair_covers_taxonomy() {
        let mut links = LinkSet::new();
        links.insert(NetworkKind::Friends, uid(1), uid(2)).unwrap();
        links.insert(NetworkKind::Allies, uid(2), uid(3)).unwrap();
        links.insert(NetworkKind::Friends, uid(3), uid(4)).unwrap();
        links.insert(NetworkKind::Nemeses, uid(3), uid(4)).unwrap();
        assert_eq!(classify_pair(&links, uid(1), uid(2)), LinkType::OnlyFriends);
        assert_eq!(classify_pair(&links, uid(2), uid(3)), LinkType::NonFriends);
        assert_eq!(classify_pair(&links, uid(3), uid(4)), LinkType::FriendsAndIdeological);
        assert_eq!(classify_pair(&links, uid(1), uid(4)), LinkType::Unlinked);
    }
}
