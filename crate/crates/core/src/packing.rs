//! Families of K-subsets of [1..M] with pairwise intersections below a
//! threshold T, the sphere-covering (Gilbert) lower bound on their size,
//! and the exact disjoint-block family for T = 1.
//!
//! The greedy construction scans all K-subsets in a seeded-shuffled order
//! and keeps every set compatible with the sets already kept. Whatever the
//! order, each kept set rules out at most the sphere of subsets meeting it
//! in T or more elements, so the result always reaches the Gilbert bound.

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::combinatorics::{binomial_u128, HypergeomParams, LogValue};
use crate::stream::{self, domain};

/// Largest K-subset family the greedy construction will enumerate.
pub const GREEDY_ENUMERATION_GUARD: u128 = 10_000_000;
/// Largest K-subset family the exhaustive optimal search will accept.
pub const OPTIMAL_SEARCH_GUARD: u128 = 5_000;

#[derive(Debug, Error, PartialEq)]
pub enum PackingError {
    #[error("packing parameters need 1 <= T <= K <= M, got M={m}, K={k}, T={t}")]
    InvalidParams { m: u64, k: u64, t: u64 },
    #[error("message ids must be distinct integers >= 1, got {0:?}")]
    InvalidMessageSet(Vec<u64>),
    #[error("C({m},{k}) = {count} exceeds the enumeration guard {guard}")]
    EnumerationGuard { m: u64, k: u64, count: u128, guard: u128 },
}

/// A sorted set of distinct message ids drawn from [1..M].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageSet(Vec<u64>);

impl MessageSet {
    /// Sorts the ids; rejects duplicates and the id 0.
    pub fn new(mut ids: Vec<u64>) -> Result<Self, PackingError> {
        ids.sort_unstable();
        if ids.first() == Some(&0) || ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(PackingError::InvalidMessageSet(ids));
        }
        Ok(MessageSet(ids))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.0.iter()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    /// Size of the intersection with another sorted set (two-pointer scan).
    pub fn intersection_size(&self, other: &MessageSet) -> usize {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Image under a permutation given as a 1-based table (`psi[i-1]` is
    /// the image of id `i`).
    pub fn map_through(&self, psi: &[u64]) -> MessageSet {
        let mut mapped: Vec<u64> = self.0.iter().map(|&id| psi[(id - 1) as usize]).collect();
        mapped.sort_unstable();
        MessageSet(mapped)
    }

    /// Uniform random size-`size` subset of [1..m], by Floyd's algorithm:
    /// O(size) draws regardless of m.
    pub fn sample_uniform<R: rand::Rng>(m: u64, size: u64, rng: &mut R) -> MessageSet {
        debug_assert!(size <= m);
        let mut chosen = std::collections::BTreeSet::new();
        for j in m - size + 1..=m {
            let t = rng.gen_range(1..=j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        MessageSet(chosen.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a MessageSet {
    type Item = &'a u64;
    type IntoIter = std::slice::Iter<'a, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A family of K-subsets of [1..M] whose pairwise intersections all have
/// size below T.
#[derive(Clone, Debug)]
pub struct Packing {
    pub m: u64,
    pub k: u64,
    pub t: u64,
    pub sets: Vec<MessageSet>,
}

impl Packing {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// The Gilbert lower bound on the size of a maximal packing.
#[derive(Clone, Copy, Debug)]
pub struct GilbertBound {
    /// `ln [ C(M,K) / sum_{i=T}^{K} C(K,i) C(M-K,K-i) ]`.
    pub log_bound: LogValue,
    /// `ceil(exp(log_bound))`, saturating at `u64::MAX`.
    pub integer_bound: u64,
}

fn check_params(m: u64, k: u64, t: u64) -> Result<(), PackingError> {
    if t == 0 || t > k || k > m {
        return Err(PackingError::InvalidParams { m, k, t });
    }
    Ok(())
}

/// Sphere-covering bound: each K-subset rules out only the subsets meeting
/// it in at least T elements, and that sphere has size
/// `sum_{i=T}^{K} C(K,i) C(M-K,K-i)` = C(M,K) times the self-overlap tail.
pub fn gilbert_bound(m: u64, k: u64, t: u64) -> Result<GilbertBound, PackingError> {
    check_params(m, k, t)?;
    let tail = HypergeomParams::new(m, k, k)
        .expect("checked params")
        .tail_log(t);
    let log_bound = LogValue::ONE / tail;
    let raw = log_bound.linear();
    let integer_bound = if raw >= u64::MAX as f64 {
        u64::MAX
    } else {
        // Nudge below the float before taking the ceiling so exact integer
        // ratios do not round up by an ulp.
        ((raw - 1e-9 * raw.max(1.0)).ceil() as u64).max(1)
    };
    Ok(GilbertBound {
        log_bound,
        integer_bound,
    })
}

/// Colex unranking of the K-subset with the given rank, 1-based ids.
fn unrank_colex(mut rank: u128, k: u64) -> Vec<u64> {
    let mut out = vec![0u64; k as usize];
    for slot in (1..=k).rev() {
        // Largest a with C(a, slot) <= rank.
        let mut a = slot - 1;
        let mut next = binomial_u128(a + 1, slot).expect("guarded scale");
        while next <= rank {
            a += 1;
            next = binomial_u128(a + 1, slot).expect("guarded scale");
        }
        rank -= binomial_u128(a, slot).expect("guarded scale");
        out[(slot - 1) as usize] = a + 1;
    }
    out
}

/// Builds a packing greedily over all K-subsets in seeded-shuffled colex
/// order; every set whose intersection with the kept family stays below T
/// is kept. For T = 1 the exact construction of floor(M/K) disjoint blocks
/// {1..K}, {K+1..2K}, ... is used instead (no enumeration).
pub fn greedy_packing(m: u64, k: u64, t: u64, order_seed: u64) -> Result<Packing, PackingError> {
    check_params(m, k, t)?;
    if t == 1 {
        let sets = (0..m / k)
            .map(|b| MessageSet((b * k + 1..=(b + 1) * k).collect()))
            .collect();
        return Ok(Packing { m, k, t, sets });
    }

    let count = binomial_u128(m, k).filter(|&c| c <= GREEDY_ENUMERATION_GUARD).ok_or(
        PackingError::EnumerationGuard {
            m,
            k,
            count: binomial_u128(m, k).unwrap_or(u128::MAX),
            guard: GREEDY_ENUMERATION_GUARD,
        },
    )?;

    let mut order: Vec<u64> = (0..count as u64).collect();
    order.shuffle(&mut stream::substream(order_seed, domain::PACKING, 0));

    let mut sets: Vec<MessageSet> = Vec::new();
    for rank in order {
        let candidate = MessageSet(unrank_colex(rank as u128, k));
        if sets
            .iter()
            .all(|s| (s.intersection_size(&candidate) as u64) < t)
        {
            sets.push(candidate);
        }
    }
    Ok(Packing { m, k, t, sets })
}

/// `Ok(())` when all pairwise intersections are below T; otherwise the
/// first violating index pair.
pub fn verify_packing(p: &Packing) -> Result<(), (usize, usize)> {
    for i in 0..p.sets.len() {
        for j in i + 1..p.sets.len() {
            if p.sets[i].intersection_size(&p.sets[j]) as u64 >= p.t {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

/// Exact maximum packing size by branch and bound over the compatibility
/// graph. Exponential in the worst case; gated to tiny instances and meant
/// as a test oracle for the greedy construction.
pub fn optimal_packing_size(m: u64, k: u64, t: u64) -> Result<u64, PackingError> {
    check_params(m, k, t)?;
    let count = binomial_u128(m, k).filter(|&c| c <= OPTIMAL_SEARCH_GUARD).ok_or(
        PackingError::EnumerationGuard {
            m,
            k,
            count: binomial_u128(m, k).unwrap_or(u128::MAX),
            guard: OPTIMAL_SEARCH_GUARD,
        },
    )?;
    let all: Vec<MessageSet> = (0..count as u64)
        .map(|r| MessageSet(unrank_colex(r as u128, k)))
        .collect();
    let compatible = |a: usize, b: usize| (all[a].intersection_size(&all[b]) as u64) < t;

    fn extend(
        chosen: usize,
        candidates: &[usize],
        best: &mut usize,
        compatible: &dyn Fn(usize, usize) -> bool,
    ) {
        if chosen + candidates.len() <= *best {
            return;
        }
        if candidates.is_empty() {
            *best = (*best).max(chosen);
            return;
        }
        let head = candidates[0];
        let rest = &candidates[1..];
        // Branch 1: take the head.
        let surviving: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&c| compatible(head, c))
            .collect();
        extend(chosen + 1, &surviving, best, compatible);
        // Branch 2: skip it.
        extend(chosen, rest, best, compatible);
    }

    let mut best = 0usize;
    let candidates: Vec<usize> = (0..all.len()).collect();
    extend(0, &candidates, &mut best, &compatible);
    Ok(best as u64)
}
