//! Set partitions of `[k] = {1, …, k}` in canonical form, with enumerators for
//! all partitions, pair partitions and non-crossing pair partitions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAIR_PARTITION_BUDGET: usize = 12;
pub const NC2_BUDGET: usize = 16;
pub const SET_PARTITION_BUDGET: usize = 10;

/// A partition of `[k]`: sorted blocks of 1-based elements, ordered by their minima.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ground_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_blocks(ground_size: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; ground_size + 1];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid("partition blocks must be nonempty"));
            }
            for &e in block {
                if e == 0 || e > ground_size {
                    return Err(Error::invalid(format!("element {e} outside [1,{ground_size}]")));
                }
                if std::mem::replace(&mut seen[e], true) {
                    return Err(Error::invalid(format!("element {e} appears twice")));
                }
            }
        }
        if let Some(missing) = (1..=ground_size).find(|&e| !seen[e]) {
            return Err(Error::invalid(format!("element {missing} is not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { ground_size, blocks })
    }

    /// Builds the partition whose blocks are the level sets of `labels`
    /// (`labels[u]` is the label of element `u + 1`).
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Partition {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut reps: Vec<&T> = Vec::new();
        for (u, label) in labels.iter().enumerate() {
            match reps.iter().position(|r| *r == label) {
                Some(b) => blocks[b].push(u + 1),
                None => {
                    reps.push(label);
                    blocks.push(vec![u + 1]);
                }
            }
        }
        Partition { ground_size: labels.len(), blocks }
    }

    /// Relabels a partition of an arbitrary ordered ground set onto `[1,k]`.
    /// Returns the canonical partition and the label map (`map[u-1]` is the original of `u`).
    pub fn from_ground_set(blocks: &[Vec<i64>]) -> Result<(Partition, Vec<i64>)> {
        let mut ground: Vec<i64> = blocks.iter().flatten().copied().collect();
        ground.sort_unstable();
        if ground.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("ground set elements must be distinct"));
        }
        let relabeled = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| ground.binary_search(x).expect("element from ground set") + 1)
                    .collect()
            })
            .collect();
        Ok((Partition::from_blocks(ground.len(), relabeled)?, ground))
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `|π|`.
    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    /// Block index (0-based, in minima order) of every element, indexed by `element - 1`.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.ground_size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                labels[e - 1] = b;
            }
        }
        labels
    }

    pub fn is_pair(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    pub fn has_singleton(&self) -> bool {
        self.blocks.iter().any(|b| b.len() == 1)
    }

    /// True iff no `u₁ < u₂ < u₃ < u₄` alternate between two distinct blocks.
    pub fn is_noncrossing(&self) -> bool {
        let labels = self.labels();
        let k = self.ground_size;
        // for each pair of blocks, scanning left to right, crossing means the
        // subsequence restricted to the two blocks alternates a b a b
        for a in 0..self.blocks.len() {
            for b in a + 1..self.blocks.len() {
                let mut pattern = Vec::with_capacity(4);
                for &l in &labels[..k] {
                    if (l == a || l == b) && pattern.last() != Some(&l) {
                        pattern.push(l);
                        if pattern.len() == 4 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `self` refines `other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.ground_size != other.ground_size {
            return false;
        }
        let theirs = other.labels();
        self.blocks.iter().all(|b| b.iter().all(|&e| theirs[e - 1] == theirs[b[0] - 1]))
    }

    /// Removes a block and relabels the remaining elements onto `[1, k − |block|]`.
    pub fn remove_block(&self, index: usize) -> Partition {
        let removed = &self.blocks[index];
        let shift = |e: usize| e - removed.iter().filter(|&&r| r < e).count();
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != index)
            .map(|(_, block)| block.iter().map(|&e| shift(e)).collect())
            .collect();
        Partition { ground_size: self.ground_size - removed.len(), blocks }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str("/")?;
            }
            for (r, e) in block.iter().enumerate() {
                if r > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the textual form `1,4/2,3` (blocks by `/`, elements by `,`);
    /// the ground set is `[1, max element]`.
    fn from_str(s: &str) -> Result<Partition> {
        let blocks = s
            .trim()
            .split('/')
            .map(|block| {
                block
                    .split(',')
                    .map(|e| {
                        e.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::parse(format!("malformed partition {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let k = blocks.iter().flatten().copied().max().unwrap_or(0);
        Partition::from_blocks(k, blocks).map_err(|e| Error::parse(format!("partition {s:?}: {e}")))
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Partition, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementClassification {
    /// Block minima in increasing order.
    pub primaries: Vec<usize>,
    pub secondaries: Vec<usize>,
    /// `{1} ∪ {r + 1 : r primary}`. Position `k + 1` stands for the cyclic
    /// index `i_{k+1} = i_1` and is kept distinct from position 1.
    pub generating_positions: BTreeSet<usize>,
}

pub fn classify(p: &Partition) -> ElementClassification {
    let primaries: Vec<usize> = p.blocks().iter().map(|b| b[0]).collect();
    let mut secondaries: Vec<usize> = p.blocks().iter().flat_map(|b| b[1..].iter().copied()).collect();
    secondaries.sort_unstable();
    let generating_positions = std::iter::once(1).chain(primaries.iter().map(|r| r + 1)).collect();
    ElementClassification { primaries, secondaries, generating_positions }
}

/// Lazy enumeration of all pair partitions of `[k]` in lexicographic block order.
///
/// Each partition is encoded by a mixed-radix odometer: at step `t` the
/// smallest unmatched element is paired with the `choice[t]`-th remaining one.
#[derive(Debug, Clone)]
pub struct PairPartitions {
    k: usize,
    choice: Vec<usize>,
    done: bool,
}

impl PairPartitions {
    pub fn new(k: usize) -> Result<PairPartitions> {
        if k == 0 || k % 2 == 1 {
            return Err(Error::invalid(format!("pair partitions need a positive even k, got {k}")));
        }
        Ok(PairPartitions { k, choice: vec![0; k / 2], done: false })
    }

    fn decode(&self) -> Partition {
        let mut remaining: Vec<usize> = (1..=self.k).collect();
        let mut blocks = Vec::with_capacity(self.k / 2);
        for &c in &self.choice {
            let first = remaining.remove(0);
            let partner = remaining.remove(c);
            blocks.push(vec![first, partner]);
        }
        Partition { ground_size: self.k, blocks }
    }
}

impl Iterator for PairPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = self.decode();
        // increment the odometer from the last digit; digit t has k - 2t - 1 values
        let mut t = self.choice.len();
        loop {
            if t == 0 {
                self.done = true;
                break;
            }
            t -= 1;
            let radix = self.k - 2 * t - 1;
            self.choice[t] += 1;
            if self.choice[t] < radix {
                break;
            }
            self.choice[t] = 0;
        }
        Some(out)
    }
}

/// All `(k−1)!!` pair partitions of `[k]`, `k` even and at most 12.
pub fn enumerate_pair_partitions(k: usize) -> Result<Vec<Partition>> {
    if k > PAIR_PARTITION_BUDGET {
        return Err(Error::budget(format!(
            "pair partitions of [{k}] exceed the enumeration budget k <= {PAIR_PARTITION_BUDGET}; page through PairPartitions"
        )));
    }
    Ok(PairPartitions::new(k)?.collect())
}

/// All `C_{k/2}` non-crossing pair partitions of `[k]`, `k` even and at most 16.
pub fn enumerate_nc2(k: usize) -> Result<Vec<Partition>> {
    if k % 2 == 1 {
        return Err(Error::invalid(format!("non-crossing pair partitions need even k, got {k}")));
    }
    if k > NC2_BUDGET {
        return Err(Error::budget(format!("NC2 of [{k}] exceeds budget k <= {NC2_BUDGET}")));
    }
    if k == 0 {
        return Err(Error::invalid("non-crossing pair partitions need k > 0"));
    }
    let mut out: Vec<Partition> = nc2_interval(1, k)
        .into_iter()
        .map(|blocks| {
            let mut blocks = blocks;
            blocks.sort_unstable_by_key(|b| b[0]);
            Partition { ground_size: k, blocks }
        })
        .collect();
    out.sort();
    Ok(out)
}

// non-crossing pairings of the interval [lo, hi]; the first element pairs with
// an element of opposite parity and splits the rest into inside and outside
fn nc2_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut partner = lo + 1;
    while partner <= hi {
        let inside = nc2_interval(lo + 1, partner - 1);
        let outside = nc2_interval(partner + 1, hi);
        for a in &inside {
            for b in &outside {
                let mut blocks = Vec::with_capacity(1 + a.len() + b.len());
                blocks.push(vec![lo, partner]);
                blocks.extend(a.iter().cloned());
                blocks.extend(b.iter().cloned());
                out.push(blocks);
            }
        }
        partner += 2;
    }
    out
}

/// Lazy enumeration of all set partitions of `[k]` via restricted growth strings.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(k: usize) -> SetPartitions {
        SetPartitions { rgs: vec![0; k], maxes: vec![0; k], done: k == 0 }
    }
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = Partition::from_labels(&self.rgs);
        // rgs[u] ranges over 0..=max(rgs[..u]) + 1; maxes[u] = max(rgs[..=u])
        let k = self.rgs.len();
        let mut u = k;
        loop {
            if u <= 1 {
                self.done = true;
                break;
            }
            u -= 1;
            let bound = self.maxes[u - 1] + 1;
            if self.rgs[u] < bound {
                self.rgs[u] += 1;
                self.maxes[u] = self.maxes[u - 1].max(self.rgs[u]);
                for v in u + 1..k {
                    self.rgs[v] = 0;
                    self.maxes[v] = self.maxes[v - 1];
                }
                break;
            }
        }
        Some(out)
    }
}

/// All Bell(k) set partitions of `[k]`, `1 <= k <= 10`.
pub fn enumerate_set_partitions(k: usize) -> Result<Vec<Partition>> {
    if k == 0 {
        return Err(Error::invalid("set partitions need k > 0"));
    }
    if k > SET_PARTITION_BUDGET {
        return Err(Error::budget(format!("set partitions of [{k}] exceed budget k <= {SET_PARTITION_BUDGET}")));
    }
    Ok(SetPartitions::new(k).collect())
}

/// The Catalan number `C_m = binom(2m, m) / (m + 1)`, exact for `m <= 30`.
pub fn catalan(m: u32) -> u64 {
    assert!(m <= 30, "catalan({m}) is outside the supported range m <= 30");
    // C_{t+1} = C_t * 2(2t+1) / (t+2), exact at every step
    let mut c: u128 = 1;
    for t in 0..m as u128 {
        c = c * 2 * (2 * t + 1) / (t + 2);
    }
    c as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn pair_partition_counts() {
        assert_eq!(enumerate_pair_partitions(2).unwrap(), vec![p("1,2")]);
        assert_eq!(enumerate_pair_partitions(4).unwrap().len(), 3);
        assert_eq!(enumerate_pair_partitions(6).unwrap().len(), 15);
        assert!(enumerate_pair_partitions(5).is_err());
        assert!(enumerate_pair_partitions(14).is_err());
        let all = enumerate_pair_partitions(6).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
    }

    #[test]
    fn crossing_examples() {
        assert!(!p("1,3/2,4").is_noncrossing());
        assert!(p("1,2/3,4").is_noncrossing());
        assert!(p("1,4/2,3").is_noncrossing());
        let (pi0, map) = Partition::from_ground_set(&[vec![2, 9, 11], vec![4, 14], vec![5]]).unwrap();
        assert_eq!(map, vec![2, 4, 5, 9, 11, 14]);
        assert!(!pi0.is_noncrossing());
    }

    #[test]
    fn nc2_examples() {
        assert_eq!(enumerate_nc2(4).unwrap(), vec![p("1,2/3,4"), p("1,4/2,3")]);
        assert_eq!(enumerate_nc2(6).unwrap().len(), 5);
        assert_eq!(enumerate_nc2(2).unwrap().len(), 1);
        assert!(enumerate_nc2(3).is_err());
        assert!(enumerate_nc2(18).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&p("1,2/3,4"));
        assert_eq!(c.primaries, vec![1, 3]);
        assert_eq!(c.secondaries, vec![2, 4]);
        assert_eq!(c.generating_positions, BTreeSet::from([1, 2, 4]));
        let c = classify(&p("1,3/2,4"));
        assert_eq!(c.primaries, vec![1, 2]);
        assert_eq!(c.generating_positions, BTreeSet::from([1, 2, 3]));

        let (pi0, map) = Partition::from_ground_set(&[vec![2, 9, 11], vec![4, 14], vec![5]]).unwrap();
        let c = classify(&pi0);
        let primaries: Vec<i64> = c.primaries.iter().map(|&r| map[r - 1]).collect();
        assert_eq!(primaries, vec![2, 4, 5]);
    }

    #[test]
    fn generating_count_is_size_plus_one() {
        for k in 1..=6 {
            for part in enumerate_set_partitions(k).unwrap() {
                assert_eq!(classify(&part).generating_positions.len(), part.size() + 1);
            }
        }
    }

    #[test]
    fn catalan_values() {
        let expect = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (m, &c) in expect.iter().enumerate() {
            assert_eq!(catalan(m as u32), c);
        }
        assert_eq!(catalan(30), 3_814_986_502_092_304);
    }

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877];
        for (k, &b) in bell.iter().enumerate() {
            let all = enumerate_set_partitions(k + 1).unwrap();
            assert_eq!(all.len(), b);
            let distinct: BTreeSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), b);
        }
    }

    #[test]
    fn text_format() {
        let q = p("2,3/1,4");
        assert_eq!(q.to_string(), "1,4/2,3");
        for bad in ["", "1,,2", "1,2/2,3", "1,3", "a,b", "0,1"] {
            assert!(bad.parse::<Partition>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn remove_block_relabels() {
        let q = p("1,6/2,5/3,4");
        assert_eq!(q.remove_block(2), p("1,4/2,3"));
        assert!(p("1,2/3,4").refines(&p("1,2,3,4")));
        assert!(!p("1,2,3,4").refines(&p("1,2/3,4")));
    }
}
