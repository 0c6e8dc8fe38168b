//! Coalition structures (set partitions of agents `1..=n`) and the
//! counting machinery that turns "how many structures are there" into a
//! query-count floor.
//!
//! Block labels are canonical: a block's id is its smallest member, so two
//! structures are equal iff they partition the agents the same way, and the
//! text form is stable (blocks sorted by minimum, members ascending):
//!
//! ```text
//! {1,2,4}|{3,6}|{5}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::AgentId;

/// Largest `n` for which Bell numbers are computed by default. `B_300` has
/// a few thousand bits; anything past this cap is almost certainly a typo
/// in a sweep config rather than a real request.
pub const BELL_N_CAP: usize = 300;

/// A partition of agents `1..=n` into disjoint nonempty coalitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionStructure {
    /// `block_of[i - 1]` is the block id (smallest member) of agent `i`.
    block_of: Vec<AgentId>,
    /// Block id -> members, keyed by smallest member.
    blocks: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

impl CoalitionStructure {
    /// The discrete partition `{{1}, {2}, ..., {n}}`, the starting point of
    /// every learner.
    pub fn singletons(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one agent".into()));
        }
        let block_of = (1..=n).collect();
        let blocks = (1..=n).map(|i| (i, BTreeSet::from([i]))).collect();
        Ok(CoalitionStructure { block_of, blocks })
    }

    /// Builds a structure from explicit blocks, which must exactly cover
    /// `1..=n` for some `n >= 1` with no duplicates or empty blocks.
    pub fn from_blocks(blocks: impl IntoIterator<Item = BTreeSet<AgentId>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut map = BTreeMap::new();
        for block in blocks {
            let Some(&id) = block.first() else {
                return Err(Error::InvalidArgument("empty block".into()));
            };
            for &i in &block {
                if i == 0 || !seen.insert(i) {
                    return Err(Error::InvalidArgument(format!(
                        "agent {i} repeated or out of range"
                    )));
                }
            }
            map.insert(id, block);
        }
        let n = seen.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no blocks given".into()));
        }
        if *seen.last().unwrap() != n {
            return Err(Error::InvalidArgument(format!(
                "blocks must cover 1..={n} exactly"
            )));
        }
        let mut block_of = vec![0; n];
        for (&id, block) in &map {
            for &i in block {
                block_of[i - 1] = id;
            }
        }
        Ok(CoalitionStructure { block_of, blocks: map })
    }

    /// Number of agents.
    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    /// Number of coalitions.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check_agent(&self, i: AgentId) -> Result<()> {
        if i == 0 || i > self.n() {
            return Err(Error::InvalidArgument(format!(
                "agent {i} out of range 1..={}",
                self.n()
            )));
        }
        Ok(())
    }

    /// Canonical id (smallest member) of the block containing agent `i`.
    pub fn block_id(&self, i: AgentId) -> Result<AgentId> {
        self.check_agent(i)?;
        Ok(self.block_of[i - 1])
    }

    pub(crate) fn block_id_unchecked(&self, i: AgentId) -> AgentId {
        self.block_of[i - 1]
    }

    /// Members of the block containing agent `i`.
    pub fn members_of(&self, i: AgentId) -> Result<&BTreeSet<AgentId>> {
        self.check_agent(i)?;
        Ok(&self.blocks[&self.block_of[i - 1]])
    }

    /// Iterates over blocks in canonical (smallest-member) order.
    pub fn blocks(&self) -> impl Iterator<Item = &BTreeSet<AgentId>> {
        self.blocks.values()
    }

    /// Whether agents `i` and `j` currently share a coalition. Reflexive:
    /// `same_coalition(i, i)` is true.
    pub fn same_coalition(&self, i: AgentId, j: AgentId) -> Result<bool> {
        self.check_agent(i)?;
        self.check_agent(j)?;
        Ok(self.block_of[i - 1] == self.block_of[j - 1])
    }

    pub(crate) fn same_coalition_unchecked(&self, i: AgentId, j: AgentId) -> bool {
        self.block_of[i - 1] == self.block_of[j - 1]
    }

    /// Returns a new structure with the blocks of `i` and `j` merged.
    /// The two agents must currently be in different blocks.
    pub fn merge(&self, i: AgentId, j: AgentId) -> Result<Self> {
        if self.same_coalition(i, j)? {
            return Err(Error::InvalidArgument(format!(
                "agents {i} and {j} are already in the same block"
            )));
        }
        let mut out = self.clone();
        let a = out.block_of[i - 1];
        let b = out.block_of[j - 1];
        let (keep, absorb) = (a.min(b), a.max(b));
        let absorbed = out.blocks.remove(&absorb).expect("block exists");
        for &k in &absorbed {
            out.block_of[k - 1] = keep;
        }
        out.blocks.get_mut(&keep).expect("block exists").extend(absorbed);
        Ok(out)
    }

    /// True if every block of `self` is contained in a block of `other`
    /// (i.e. `self` refines `other`).
    pub fn refines(&self, other: &CoalitionStructure) -> bool {
        self.n() == other.n()
            && self.blocks().all(|block| {
                let mut it = block.iter();
                let first = *it.next().expect("blocks are nonempty");
                it.all(|&j| other.same_coalition_unchecked(first, j))
            })
    }

    /// Draws a structure with exactly `m` coalitions: agents are dealt so
    /// that every block is hit (the first `m` slots pin one agent per
    /// block, the rest land uniformly), then agent labels are uniformly
    /// permuted so no block is biased toward low ids. Deterministic in
    /// `seed`.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= m <= n, got n={n} m={m}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut slot_block: Vec<usize> = (0..m).collect();
        for _ in m..n {
            slot_block.push(rng.gen_range(0..m));
        }
        let mut labels: Vec<AgentId> = (1..=n).collect();
        labels.shuffle(&mut rng);
        let mut members = vec![BTreeSet::new(); m];
        for (slot, &b) in slot_block.iter().enumerate() {
            members[b].insert(labels[slot]);
        }
        Self::from_blocks(members)
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (bi, block) in self.blocks.values().enumerate() {
            if bi > 0 {
                write!(f, "|")?;
            }
            write!(f, "{{")?;
            for (mi, agent) in block.iter().enumerate() {
                if mi > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{agent}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Enumerates every partition of `1..=n` via restricted growth strings.
/// Intended for exhaustive small-n checks; refuses n > 12 (the count is
/// already 4.2M there).
pub fn enumerate_all(n: usize) -> Result<Vec<CoalitionStructure>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one agent".into()));
    }
    if n > 12 {
        return Err(Error::UnsupportedSize(format!(
            "refusing to enumerate all partitions of {n} agents"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let m = rgs.iter().copied().max().unwrap() + 1;
        let mut blocks = vec![BTreeSet::new(); m];
        for (pos, &b) in rgs.iter().enumerate() {
            blocks[b].insert(pos + 1);
        }
        out.push(CoalitionStructure::from_blocks(blocks)?);
        // Advance the restricted growth string: rgs[0] = 0 and
        // rgs[i] <= max(rgs[..i]) + 1.
        let mut i = n;
        loop {
            if i == 1 {
                return Ok(out);
            }
            i -= 1;
            let cap = rgs[..i].iter().copied().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                rgs[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// `B_n`, the number of partitions of an n-element set, by the Bell
/// triangle. Exact; capped so sweeps cannot accidentally request
/// astronomically large tables.
pub fn bell_number(n: usize, cap: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one agent".into()));
    }
    if n > cap {
        return Err(Error::UnsupportedSize(format!(
            "Bell number requested for n={n}, cap is {cap}"
        )));
    }
    let mut row = vec![BigUint::from(1u32)];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().unwrap().clone());
        for prev in &row {
            let last = next.last().unwrap().clone();
            next.push(last + prev);
        }
        row = next;
    }
    Ok(row.last().unwrap().clone())
}

/// Information-theoretic query floor `ceil(log2 B_n)`: any learner that
/// distinguishes all structures with one-bit answers needs at least this
/// many queries in the worst case.
pub fn bell_log2_lower_bound(n: usize) -> Result<u64> {
    bell_log2_lower_bound_capped(n, BELL_N_CAP)
}

/// Like [`bell_log2_lower_bound`] with an explicit cap on `n`.
pub fn bell_log2_lower_bound_capped(n: usize, cap: usize) -> Result<u64> {
    let b = bell_number(n, cap)?;
    let bits = b.bits();
    // ceil(log2 x) = bits - 1 for exact powers of two, bits otherwise.
    Ok(if b.count_ones() == 1 { bits - 1 } else { bits })
}
