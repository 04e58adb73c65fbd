//! Subsets, file fragments, cache placement and the version counters that
//! both zero-forcing delivery algorithms share.
//!
//! Users are numbered from 0 in the API. [`Subset`]'s `Display` prints the
//! conventional 1-based labels.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// A set of users kept as a strictly increasing list.
///
/// The derived `Ord` is lexicographic on that list, which is the canonical
/// processing order for groups and targets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(Vec<usize>);

impl Subset {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self(members)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, user: usize) -> bool {
        self.0.binary_search(&user).is_ok()
    }

    pub fn without(&self, user: usize) -> Self {
        Self(self.0.iter().copied().filter(|&u| u != user).collect())
    }

    pub fn with(&self, user: usize) -> Self {
        let mut members = self.0.clone();
        members.push(user);
        Self::new(members)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.0.iter().all(|&u| other.contains(u))
    }

    /// Members of `self` that are not in `other`.
    pub fn difference(&self, other: &Subset) -> Self {
        Self(self.0.iter().copied().filter(|&u| !other.contains(u)).collect())
    }

    /// All `size`-subsets of this set in lexicographic order.
    pub fn subsets(&self, size: usize) -> Vec<Subset> {
        enumerate_subsets(self.len(), size)
            .into_iter()
            .map(|positions| Subset(positions.0.iter().map(|&i| self.0[i]).collect()))
            .collect()
    }

    /// Position of `self` in the lexicographic enumeration of all `|self|`-subsets
    /// of `[0, n)`.
    pub fn rank(&self, n: usize) -> u64 {
        let k = self.len();
        let mut rank = 0;
        let mut prev = 0;
        for (i, &m) in self.0.iter().enumerate() {
            for skipped in prev..m {
                rank += binomial(n - skipped - 1, k - i - 1);
            }
            prev = m + 1;
        }
        rank
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", u + 1)?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// All `size`-subsets of `{0, .., ground - 1}` in lexicographic order.
///
/// Returns `C(ground, size)` subsets; one empty subset for `size = 0` and
/// none when `size > ground`.
pub fn enumerate_subsets(ground: usize, size: usize) -> Vec<Subset> {
    if size > ground {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(ground, size) as usize);
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(Subset(idx.clone()));
        let Some(i) = (0..size).rev().find(|&i| idx[i] < ground - size + i) else {
            break;
        };
        idx[i] += 1;
        for j in (i + 1)..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// One mini-file `W_{file, tau}^{mini}`: fragment `mini` of the subfile of
/// `file` that is cached by exactly the users in `tau`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubfileId {
    pub file: usize,
    pub tau: Subset,
    pub mini: usize,
}

impl fmt::Display for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}{}#{}", self.file + 1, self.tau, self.mini + 1)
    }
}

/// Every mini-file of one file, in storage order (lexicographic `tau`, then
/// mini index).
pub fn minifiles_of(cfg: &SystemConfig, file: usize) -> Vec<SubfileId> {
    let minis = cfg.minis_per_subfile() as usize;
    enumerate_subsets(cfg.users(), cfg.t())
        .into_iter()
        .flat_map(|tau| (0..minis).map(move |mini| SubfileId { file, tau: tau.clone(), mini }))
        .collect()
}

/// Cache contents per user: user `k` stores every mini-file whose `tau`
/// contains `k`.
pub fn placement_map(cfg: &SystemConfig) -> Vec<BTreeSet<SubfileId>> {
    let mut caches = alloc::vec![BTreeSet::new(); cfg.users()];
    for file in 0..cfg.files() {
        for id in minifiles_of(cfg, file) {
            for &k in id.tau.members() {
                caches[k].insert(id.clone());
            }
        }
    }
    caches
}

/// Version counters `N(r, tau)` for every user `r` and `t`-subset `tau` not
/// containing `r`. The counter names the mini-file of `W_{d_r, tau}` that
/// the next group serving `tau + {r}` will carry, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCounter {
    t: usize,
    group_size: usize,
    counts: BTreeMap<(usize, Subset), u64>,
}

impl IndexCounter {
    /// Every counter set to 1.
    pub fn init(cfg: &SystemConfig) -> Self {
        let mut counts = BTreeMap::new();
        for target in enumerate_subsets(cfg.users(), cfg.t() + 1) {
            for &r in target.members() {
                counts.insert((r, target.without(r)), 1);
            }
        }
        Self { t: cfg.t(), group_size: cfg.group_size(), counts }
    }

    /// Increment `N(r, T \ {r})` for every `(t+1)`-subset `T` of `group` and
    /// every `r` in `T`.
    pub fn update(&mut self, group: &Subset) -> Result<()> {
        if group.len() != self.group_size {
            return Err(Error::SubsetSize { subset: group.clone(), expected: self.group_size, got: group.len() });
        }
        for target in group.subsets(self.t + 1) {
            for &r in target.members() {
                *self.counts.get_mut(&(r, target.without(r))).expect("counter initialised for every pair") += 1;
            }
        }
        Ok(())
    }

    /// Current value of `N(user, tau)`.
    pub fn get(&self, user: usize, tau: &Subset) -> Option<u64> {
        self.counts.get(&(user, tau.clone())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Subset, u64)> {
        self.counts.iter().map(|((r, tau), &n)| (*r, tau, n))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Both sides count the mini-files of one file a user does not cache:
/// `C(K-1, t+L-1) C(t+L-1, t) = C(K-1, t) C(K-t-1, L-1)`. The left side is
/// (groups containing the user) x (mini-files decoded per group).
pub fn decode_count_identity(cfg: &SystemConfig) -> bool {
    let (k, l, t) = (cfg.users(), cfg.antennas(), cfg.t());
    binomial(k - 1, t + l - 1) * binomial(t + l - 1, t) == binomial(k - 1, t) * binomial(k - t - 1, l - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(v: &[usize]) -> Subset {
        Subset::new(v.to_vec())
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_subsets(3, 2), vec![s(&[0, 1]), s(&[0, 2]), s(&[1, 2])]);
        assert_eq!(enumerate_subsets(3, 3), vec![s(&[0, 1, 2])]);
        assert_eq!(enumerate_subsets(6, 3).len(), 20);
        assert_eq!(enumerate_subsets(4, 0), vec![Subset::empty()]);
        assert!(enumerate_subsets(2, 3).is_empty());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(alloc::format!("{}", s(&[0, 2])), "{1,3}");
        let id = SubfileId { file: 0, tau: s(&[1]), mini: 0 };
        assert_eq!(alloc::format!("{id}"), "W1{2}#1");
    }

    #[test]
    fn rank_matches_enumeration_position() {
        for (i, sub) in enumerate_subsets(7, 3).iter().enumerate() {
            assert_eq!(sub.rank(7), i as u64);
        }
    }

    #[test]
    fn example_placement() {
        let cfg = SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap();
        let caches = placement_map(&cfg);
        let user0: Vec<_> = caches[0].iter().cloned().collect();
        assert_eq!(
            user0,
            vec![
                SubfileId { file: 0, tau: s(&[0]), mini: 0 },
                SubfileId { file: 1, tau: s(&[0]), mini: 0 },
                SubfileId { file: 2, tau: s(&[0]), mini: 0 },
            ]
        );
    }

    #[test]
    fn four_user_placement() {
        let cfg = SystemConfig::with_integer_cache(4, 2, 4, 2).unwrap();
        assert_eq!(cfg.t(), 2);
        let caches = placement_map(&cfg);
        let taus: BTreeSet<Subset> = caches[0].iter().filter(|id| id.file == 0).map(|id| id.tau.clone()).collect();
        assert_eq!(taus.into_iter().collect::<Vec<_>>(), vec![s(&[0, 1]), s(&[0, 2]), s(&[0, 3])]);
        assert_eq!(minifiles_of(&cfg, 0).len(), 6);
    }

    #[test]
    fn counter_init_and_single_update() {
        let cfg = SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap();
        let mut counter = IndexCounter::init(&cfg);
        assert_eq!(counter.len(), 6);
        assert!(counter.iter().all(|(_, _, n)| n == 1));
        counter.update(&s(&[0, 1, 2])).unwrap();
        assert!(counter.iter().all(|(_, _, n)| n == 2));
        assert_eq!(
            counter.update(&s(&[0, 1])),
            Err(Error::SubsetSize { subset: s(&[0, 1]), expected: 3, got: 2 })
        );
    }

    #[test]
    fn identity_examples() {
        assert!(decode_count_identity(&SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap()));
        assert!(decode_count_identity(&SystemConfig::with_integer_cache(5, 2, 5, 1).unwrap()));
        assert!(decode_count_identity(&SystemConfig::with_integer_cache(4, 1, 4, 1).unwrap()));
        assert_eq!(binomial(4, 2) * binomial(2, 1), 12);
        assert_eq!(binomial(4, 1) * binomial(3, 1), 12);
    }
}
