//! Set partitions of `{1..n}`, the refinement lattice, non-crossing
//! partitions, and their Möbius functions.
//!
//! Everything lives on ground sets `{1..n}` with 1-based elements; callers
//! relabel. Partitions are kept in canonical form (blocks sorted by minimal
//! element, elements ascending) so equality and hashing are structural.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::{Error, Result};

/// Hard cap on enumeration sizes; Bell(12) ≈ 4.2M is the largest tolerable.
pub const MAX_ENUM_N: usize = 12;

/// A partition of `{1..n}` into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from blocks, validating and canonicalizing.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("ground set must be nonempty".into()));
        }
        let mut seen = vec![false; n + 1];
        let mut canon: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::Domain("empty block".into()));
            }
            b.sort_unstable();
            for &x in &b {
                if x == 0 || x > n {
                    return Err(Error::Domain(format!("element {x} outside 1..{n}")));
                }
                if seen[x] {
                    return Err(Error::Domain(format!("element {x} repeated")));
                }
                seen[x] = true;
            }
            canon.push(b);
        }
        if seen[1..=n].iter().any(|s| !s) {
            return Err(Error::Domain("blocks do not cover the ground set".into()));
        }
        canon.sort_by_key(|b| b[0]);
        Ok(Self { n, blocks: canon })
    }

    /// The discrete partition `0_n` = {{1},...,{n}}.
    pub fn zero(n: usize) -> Self {
        Self { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    /// The full partition `1_n` = {{1..n}}.
    pub fn one(n: usize) -> Self {
        Self { n, blocks: vec![(1..=n).collect()] }
    }

    /// Builds from a block-index assignment `labels[i] = block id of element i+1`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            map.entry(l).or_default().push(i + 1);
        }
        let mut blocks: Vec<Vec<usize>> = map.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index (into `blocks()`) of the block containing `x`.
    pub fn block_of(&self, x: usize) -> usize {
        self.blocks.iter().position(|b| b.binary_search(&x).is_ok()).expect("element in range")
    }

    /// Block-id labels: `labels()[i]` is the block index of element `i+1`.
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                l[x - 1] = bi;
            }
        }
        l
    }

    /// Restriction to a subset `s` (ascending), relabeled to `{1..|s|}` by rank.
    pub fn restrict_relabel(&self, s: &[usize]) -> SetPartition {
        let rank: HashMap<usize, usize> = s.iter().enumerate().map(|(i, &x)| (x, i + 1)).collect();
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let nb: Vec<usize> = b.iter().filter_map(|x| rank.get(x).copied()).collect();
            if !nb.is_empty() {
                blocks.push(nb);
            }
        }
        blocks.sort_by_key(|b| b[0]);
        SetPartition { n: s.len(), blocks }
    }
}

impl std::fmt::Display for SetPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "}}")
    }
}

fn check_enum_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::SizeLimit(format!("n = {n} outside 1..={MAX_ENUM_N}")));
    }
    Ok(())
}

/// All partitions of `{1..n}` in canonical form (restricted-growth strings).
pub fn enumerate_partitions(n: usize) -> Result<Vec<SetPartition>> {
    check_enum_size(n)?;
    let mut out = Vec::new();
    // labels[i] in 0..=max(labels[..i])+1 — restricted growth, each string is a
    // distinct partition.
    let mut labels = vec![0usize; n];
    fn rec(i: usize, maxl: usize, labels: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        let n = labels.len();
        if i == n {
            out.push(SetPartition::from_labels(labels));
            return;
        }
        for l in 0..=maxl + 1 {
            labels[i] = l;
            rec(i + 1, maxl.max(l), labels, out);
        }
    }
    labels[0] = 0;
    if n == 1 {
        out.push(SetPartition::from_labels(&labels));
    } else {
        rec(1, 0, &mut labels, &mut out);
    }
    Ok(out)
}

/// `true` iff every block of `p1` is contained in some block of `p2`.
pub fn refines(p1: &SetPartition, p2: &SetPartition) -> Result<bool> {
    if p1.n != p2.n {
        return Err(Error::Domain("mismatched ground sets".into()));
    }
    let l2 = p2.labels();
    Ok(p1.blocks.iter().all(|b| b.iter().all(|&x| l2[x - 1] == l2[b[0] - 1])))
}

/// Finest common coarsening (connected components of the union relation).
pub fn join(p1: &SetPartition, p2: &SetPartition) -> Result<SetPartition> {
    if p1.n != p2.n {
        return Err(Error::Domain("mismatched ground sets".into()));
    }
    let n = p1.n;
    // Union-find over elements, merging along blocks of both partitions.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for b in p1.blocks.iter().chain(p2.blocks.iter()) {
        for w in b.windows(2) {
            let (a, c) = (find(&mut parent, w[0] - 1), find(&mut parent, w[1] - 1));
            if a != c {
                parent[a] = c;
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(SetPartition::from_labels(&labels))
}

/// Coarsest common refinement (blockwise intersections).
pub fn meet(p1: &SetPartition, p2: &SetPartition) -> Result<SetPartition> {
    if p1.n != p2.n {
        return Err(Error::Domain("mismatched ground sets".into()));
    }
    let (l1, l2) = (p1.labels(), p2.labels());
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let labels: Vec<usize> = (0..p1.n)
        .map(|i| {
            let next = ids.len();
            *ids.entry((l1[i], l2[i])).or_insert(next)
        })
        .collect();
    Ok(SetPartition::from_labels(&labels))
}

/// `μ(0_k, 1_k) = (−1)^{k−1}(k−1)!` as a `BigInt`.
fn mu_full_interval(k: usize) -> BigInt {
    let mut f = BigInt::one();
    for i in 1..k {
        f *= BigInt::from(i);
    }
    if k % 2 == 0 {
        -f
    } else {
        f
    }
}

/// Möbius function of the full partition lattice, `μ(p1, p2)`.
///
/// Multiplicative over the blocks of `p2`: each block containing `k` blocks of
/// `p1` contributes `(−1)^{k−1}(k−1)!`.
pub fn mobius_partition_lattice(p1: &SetPartition, p2: &SetPartition) -> Result<BigInt> {
    if !refines(p1, p2)? {
        return Err(Error::Order(format!("{p1} does not refine {p2}")));
    }
    let l1 = p1.labels();
    let mut mu = BigInt::one();
    for b in &p2.blocks {
        let mut inner: Vec<usize> = b.iter().map(|&x| l1[x - 1]).collect();
        inner.sort_unstable();
        inner.dedup();
        mu *= mu_full_interval(inner.len());
    }
    Ok(mu)
}

/// Crossing test: blocks `B`, `C` cross if `i < j < k < l` with `i,k ∈ B`,
/// `j,l ∈ C`.
pub fn is_noncrossing(p: &SetPartition) -> bool {
    let labels = p.labels();
    // Scan with a stack of open blocks; a partition is non-crossing iff the
    // block intervals nest properly.
    let mut last = vec![0usize; p.num_blocks()]; // last element of each block
    for (bi, b) in p.blocks.iter().enumerate() {
        last[bi] = *b.last().unwrap();
    }
    let mut stack: Vec<usize> = Vec::new();
    for x in 1..=p.n {
        let b = labels[x - 1];
        if stack.last() == Some(&b) {
            // continuing the innermost open block
        } else if stack.contains(&b) {
            return false; // reopening a non-innermost block ⇒ crossing
        } else {
            stack.push(b);
        }
        while stack.last().is_some_and(|&t| last[t] == x) {
            stack.pop();
        }
    }
    true
}

/// All non-crossing partitions of `{1..n}` (count = Catalan(n)).
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<SetPartition>> {
    check_enum_size(n)?;
    Ok(enumerate_partitions(n)?.into_iter().filter(is_noncrossing).collect())
}

static NC_CACHE: Lazy<Mutex<HashMap<usize, Arc<Vec<SetPartition>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached list of non-crossing partitions of `{1..n}` (shared across callers;
/// the free-cumulant recursion hits this in tight loops).
pub fn noncrossing_cached(n: usize) -> Result<Arc<Vec<SetPartition>>> {
    let mut cache = NC_CACHE.lock().unwrap();
    if let Some(v) = cache.get(&n) {
        return Ok(v.clone());
    }
    let v = Arc::new(enumerate_noncrossing(n)?);
    cache.insert(n, v.clone());
    Ok(v)
}

/// The unique minimal non-crossing partition `π̂ ≥ p`, by repeatedly merging
/// crossing block pairs until none remain (order of merges is immaterial).
pub fn least_nc_majorant(p: &SetPartition) -> SetPartition {
    let mut cur = p.clone();
    loop {
        if is_noncrossing(&cur) {
            return cur;
        }
        let labels = cur.labels();
        let mut merged = false;
        'outer: for b1 in 0..cur.num_blocks() {
            for b2 in b1 + 1..cur.num_blocks() {
                if blocks_cross(&cur.blocks[b1], &cur.blocks[b2]) {
                    let new_labels: Vec<usize> =
                        labels.iter().map(|&l| if l == b2 { b1 } else { l }).collect();
                    cur = SetPartition::from_labels(&new_labels);
                    merged = true;
                    break 'outer;
                }
            }
        }
        debug_assert!(merged, "crossing partition must contain a crossing pair");
    }
}

fn blocks_cross(b: &[usize], c: &[usize]) -> bool {
    // b, c sorted; cross iff neither nests inside a gap of the other.
    let (lo_b, hi_b) = (b[0], *b.last().unwrap());
    let (lo_c, hi_c) = (c[0], *c.last().unwrap());
    if hi_b < lo_c || hi_c < lo_b {
        return false; // disjoint intervals
    }
    // Interleaved: check the four-point pattern directly.
    for &i in b {
        for &k in b {
            if i >= k {
                continue;
            }
            if c.iter().any(|&j| i < j && j < k) && c.iter().any(|&l| l < i || l > k) {
                return true;
            }
        }
    }
    false
}

/// Catalan number as `BigInt`.
pub fn catalan(n: usize) -> BigInt {
    // C_n = (2n)! / (n!(n+1)!)
    let mut num = BigInt::one();
    for i in n + 2..=2 * n {
        num *= BigInt::from(i);
    }
    let mut den = BigInt::one();
    for i in 1..=n {
        den *= BigInt::from(i);
    }
    num / den
}

static MU_NC_CACHE: Lazy<Mutex<HashMap<SetPartition, BigInt>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// `μ_NC(π, 1_m)` for a non-crossing `π` of `{1..m}` (memoized convolution).
fn mu_nc_to_top(p: &SetPartition) -> BigInt {
    if p.num_blocks() == 1 {
        return BigInt::one();
    }
    if let Some(v) = MU_NC_CACHE.lock().unwrap().get(p) {
        return v.clone();
    }
    // μ(π, 1) = −Σ_{π ≤ τ < 1, τ ∈ NC} μ(π, τ), with μ(π, τ) factoring over
    // the blocks of τ. Coarsenings τ of π correspond to partitions of π's
    // blocks whose flattening stays non-crossing.
    let k = p.num_blocks();
    let mut acc = BigInt::zero();
    for grouping in enumerate_partitions(k).expect("k within cap") {
        if grouping.num_blocks() == 1 {
            continue; // τ = 1, excluded
        }
        let tau = coarsen_by(p, &grouping);
        if !is_noncrossing(&tau) {
            continue;
        }
        let mut term = BigInt::one();
        for b in tau.blocks() {
            term *= mu_nc_to_top(&p.restrict_relabel(b));
        }
        acc += term;
    }
    let mu = -acc;
    MU_NC_CACHE.lock().unwrap().insert(p.clone(), mu.clone());
    mu
}

/// Coarsens `p` by merging its blocks according to `grouping` (a partition of
/// the block indices `{1..k}`).
fn coarsen_by(p: &SetPartition, grouping: &SetPartition) -> SetPartition {
    let glabels = grouping.labels();
    let mut labels = vec![0usize; p.n()];
    for (bi, b) in p.blocks().iter().enumerate() {
        for &x in b {
            labels[x - 1] = glabels[bi];
        }
    }
    SetPartition::from_labels(&labels)
}

/// Möbius function of the non-crossing lattice `NC(n)`, `μ_NC(p1, p2)`.
///
/// Multiplicative over blocks of `p2`; full-interval value
/// `(−1)^{n−1} Catalan(n−1)`.
pub fn mobius_nc(p1: &SetPartition, p2: &SetPartition) -> Result<BigInt> {
    if !is_noncrossing(p1) || !is_noncrossing(p2) {
        return Err(Error::Domain("inputs must be non-crossing".into()));
    }
    if !refines(p1, p2)? {
        return Err(Error::Order(format!("{p1} does not refine {p2}")));
    }
    let mut mu = BigInt::one();
    for b in p2.blocks() {
        mu *= mu_nc_to_top(&p1.restrict_relabel(b));
    }
    Ok(mu)
}
