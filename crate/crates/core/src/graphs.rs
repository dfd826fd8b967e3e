//! Simple graphs, chromatic polynomials, the connected-partition lattice,
//! tagged bipartite graphs, automorphism counting, and coverings.
//!
//! Terminology note: where "loops" are counted anywhere in this crate we mean
//! the cycle rank (first Betti number) `|E| − |V| + #components`, not
//! self-loops.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::partitions::{enumerate_partitions, meet, SetPartition};
use crate::{Error, Result};

/// Polynomial with exact integer coefficients, ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    /// The monomial `z^d`.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        Self { coeffs }
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|d| self.coeff(d) - other.coeff(d)).collect();
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|d| self.coeff(d) + other.coeff(d)).collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }
}

/// A finite simple loopless graph on vertices `1..=vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Domain("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Domain(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > vertex_count || b > vertex_count {
                return Err(Error::Domain(format!("edge ({a},{b}) out of range")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { n: vertex_count, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        Self::new(n, edges).expect("valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1usize];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == v { b } else if b == v { a } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen[1..=self.n].iter().all(|&s| s)
    }

    /// Connected components as a partition of the vertex set.
    pub fn components(&self) -> SetPartition {
        let mut labels: Vec<usize> = (0..self.n).collect();
        fn find(l: &mut Vec<usize>, x: usize) -> usize {
            if l[x] != x {
                let r = find(l, l[x]);
                l[x] = r;
            }
            l[x]
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut labels, a - 1), find(&mut labels, b - 1));
            if ra != rb {
                labels[ra] = rb;
            }
        }
        let roots: Vec<usize> = (0..self.n).map(|i| find(&mut labels, i)).collect();
        SetPartition::from_labels(&roots)
    }

    /// The quotient graph `G_π`: vertices = blocks of `p`, edge between blocks
    /// joined by at least one edge of `self`.
    pub fn quotient(&self, p: &SetPartition) -> Result<SimpleGraph> {
        if p.n() != self.n {
            return Err(Error::Domain("partition ground set mismatch".into()));
        }
        let labels = p.labels();
        let edges = self.edges.iter().filter_map(|&(a, b)| {
            let (la, lb) = (labels[a - 1] + 1, labels[b - 1] + 1);
            (la != lb).then_some((la, lb))
        });
        SimpleGraph::new(p.num_blocks(), edges)
    }

    /// Number of proper colourings with colours `1..=k` (brute-force oracle).
    pub fn count_proper_colourings(&self, k: usize) -> BigInt {
        let mut colour = vec![0usize; self.n + 1];
        fn rec(g: &SimpleGraph, v: usize, k: usize, colour: &mut Vec<usize>, acc: &mut BigInt) {
            if v > g.n {
                *acc += BigInt::one();
                return;
            }
            'c: for c in 1..=k {
                for &(a, b) in &g.edges {
                    if (a == v && b < v && colour[b] == c) || (b == v && a < v && colour[a] == c) {
                        continue 'c;
                    }
                }
                colour[v] = c;
                rec(g, v + 1, k, colour, acc);
            }
            colour[v] = 0;
        }
        let mut acc = BigInt::zero();
        rec(self, 1, k, &mut colour, &mut acc);
        acc
    }
}

const MAX_CHROMATIC_VERTICES: usize = 16;

/// Chromatic polynomial by deletion–contraction with memoization.
pub fn chromatic_polynomial(g: &SimpleGraph) -> Result<IntPolynomial> {
    if g.n > MAX_CHROMATIC_VERTICES {
        return Err(Error::SizeLimit(format!(
            "chromatic polynomial capped at {MAX_CHROMATIC_VERTICES} vertices"
        )));
    }
    let mut memo: HashMap<SimpleGraph, IntPolynomial> = HashMap::new();
    Ok(chromatic_rec(g, &mut memo))
}

fn chromatic_rec(g: &SimpleGraph, memo: &mut HashMap<SimpleGraph, IntPolynomial>) -> IntPolynomial {
    if g.edges.is_empty() {
        return IntPolynomial::monomial(g.n);
    }
    if let Some(p) = memo.get(g) {
        return p.clone();
    }
    let &(a, b) = g.edges.iter().next().expect("nonempty");
    // χ_G = χ_{G−e} − χ_{G/e}
    let mut deleted = g.clone();
    deleted.edges.remove(&(a, b));
    let contracted = contract(g, a, b);
    let p = chromatic_rec(&deleted, memo).sub(&chromatic_rec(&contracted, memo));
    memo.insert(g.clone(), p.clone());
    p
}

/// Contracts edge `(a, b)` (a < b): merges `b` into `a`, relabels `b+1.. → b..`,
/// drops parallel edges.
fn contract(g: &SimpleGraph, a: usize, b: usize) -> SimpleGraph {
    let map = |v: usize| -> usize {
        let v = if v == b { a } else { v };
        if v > b {
            v - 1
        } else {
            v
        }
    };
    let edges = g.edges.iter().filter_map(|&(x, y)| {
        let (mx, my) = (map(x), map(y));
        (mx != my).then_some((mx, my))
    });
    SimpleGraph::new(g.n - 1, edges).expect("valid contraction")
}

/// `μ(0_G, 1_G) = [z] χ_G(z)` for connected `G` (Rota).
pub fn mu_graph(g: &SimpleGraph) -> Result<BigInt> {
    if !g.is_connected() {
        return Err(Error::Connectivity("mu_graph requires a connected graph".into()));
    }
    Ok(chromatic_polynomial(g)?.coeff(1))
}

const MAX_LATTICE_VERTICES: usize = 10;

/// The lattice `𝒫_G` of partitions of the vertex set into connected blocks.
pub fn connected_partition_lattice(g: &SimpleGraph) -> Result<Vec<SetPartition>> {
    if g.n > MAX_LATTICE_VERTICES {
        return Err(Error::SizeLimit(format!(
            "connected-partition lattice capped at {MAX_LATTICE_VERTICES} vertices"
        )));
    }
    Ok(enumerate_partitions(g.n)?
        .into_iter()
        .filter(|p| partition_blocks_connected(g, p))
        .collect())
}

fn partition_blocks_connected(g: &SimpleGraph, p: &SetPartition) -> bool {
    p.blocks().iter().all(|b| induced_connected(g, b))
}

fn induced_connected(g: &SimpleGraph, block: &[usize]) -> bool {
    if block.len() == 1 {
        return true;
    }
    let in_block = |v: usize| block.binary_search(&v).is_ok();
    let mut seen: HashMap<usize, bool> = block.iter().map(|&v| (v, false)).collect();
    let mut stack = vec![block[0]];
    seen.insert(block[0], true);
    while let Some(v) = stack.pop() {
        for &(a, b) in &g.edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if in_block(w) && !seen[&w] {
                seen.insert(w, true);
                stack.push(w);
            }
        }
    }
    seen.values().all(|&s| s)
}

/// Meet in `𝒫_G`: ordinary meet, then each block split into connected
/// components of its induced subgraph (the `*` operation).
pub fn meet_g(g: &SimpleGraph, p1: &SetPartition, p2: &SetPartition) -> Result<SetPartition> {
    let m = meet(p1, p2)?;
    if m.n() != g.n {
        return Err(Error::Domain("partition ground set mismatch".into()));
    }
    // Split each block into connected components.
    let mut labels = vec![0usize; g.n];
    let mut next = 0usize;
    for b in m.blocks() {
        let mut comp: HashMap<usize, usize> = HashMap::new();
        for &v in b {
            if comp.contains_key(&v) {
                continue;
            }
            let id = next;
            next += 1;
            let mut stack = vec![v];
            comp.insert(v, id);
            while let Some(x) = stack.pop() {
                for &(a, c) in &g.edges {
                    let w = if a == x { c } else if c == x { a } else { continue };
                    if b.binary_search(&w).is_ok() && !comp.contains_key(&w) {
                        comp.insert(w, id);
                        stack.push(w);
                    }
                }
            }
        }
        for (&v, &id) in &comp {
            labels[v - 1] = id;
        }
    }
    Ok(SetPartition::from_labels(&labels))
}

/// A bipartite graph with unlabeled black vertices and white vertices tagged
/// by site indices; edges form a multiset of (black, white) pairs (1-based).
///
/// Invariants enforced at construction: every vertex has degree ≥ 1, and the
/// white neighbours of any black vertex carry pairwise distinct tags (which
/// also rules out parallel edges).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaggedBipartiteGraph {
    black_count: usize,
    white_tags: Vec<usize>,
    edges: Vec<(usize, usize)>, // sorted
}

impl TaggedBipartiteGraph {
    pub fn new(
        black_count: usize,
        white_tags: Vec<usize>,
        mut edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let w = white_tags.len();
        let mut bdeg = vec![0usize; black_count + 1];
        let mut wdeg = vec![0usize; w + 1];
        let mut tags_at_black: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); black_count + 1];
        for &(b, wh) in &edges {
            if b == 0 || b > black_count || wh == 0 || wh > w {
                return Err(Error::Domain(format!("edge ({b},{wh}) out of range")));
            }
            bdeg[b] += 1;
            wdeg[wh] += 1;
            if !tags_at_black[b].insert(white_tags[wh - 1]) {
                return Err(Error::Domain(format!(
                    "black vertex {b} sees tag {} twice",
                    white_tags[wh - 1]
                )));
            }
        }
        if bdeg[1..].iter().any(|&d| d == 0) || wdeg[1..].iter().any(|&d| d == 0) {
            return Err(Error::Domain("isolated vertex".into()));
        }
        edges.sort_unstable();
        Ok(Self { black_count, white_tags, edges })
    }

    pub fn black_count(&self) -> usize {
        self.black_count
    }

    pub fn white_count(&self) -> usize {
        self.white_tags.len()
    }

    pub fn white_tags(&self) -> &[usize] {
        &self.white_tags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `true` when all white tags are globally distinct (chromatic class).
    pub fn is_chromatic_class(&self) -> bool {
        let set: BTreeSet<usize> = self.white_tags.iter().copied().collect();
        set.len() == self.white_tags.len()
    }

    /// Tag set adjacent to black vertex `b` (its index set `I_b`).
    pub fn black_index_set(&self, b: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|&&(bb, _)| bb == b)
            .map(|&(_, w)| self.white_tags[w - 1])
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let total = self.black_count + self.white_count();
        if total == 0 {
            return true;
        }
        // vertices 0..black_count are black, black_count.. are white
        let mut seen = vec![false; total];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(b, w) in &self.edges {
                let (bv, wv) = (b - 1, self.black_count + w - 1);
                let other = if bv == v { wv } else if wv == v { bv } else { continue };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Canonical relabeling: lexicographically minimal (white_tags, edges) over
    /// all black permutations and tag-preserving white permutations.
    pub fn canonical(&self) -> Self {
        let mut best: Option<(Vec<usize>, Vec<(usize, usize)>)> = None;
        for_each_permutation(self.black_count, &mut |bp| {
            for_each_tag_preserving_permutation(&self.white_tags, &mut |wp| {
                let tags: Vec<usize> = (0..self.white_tags.len())
                    .map(|i| self.white_tags[wp.iter().position(|&x| x == i).unwrap()])
                    .collect();
                let mut edges: Vec<(usize, usize)> =
                    self.edges.iter().map(|&(b, w)| (bp[b - 1] + 1, wp[w - 1] + 1)).collect();
                edges.sort_unstable();
                let cand = (tags, edges);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            });
        });
        let (white_tags, edges) = best.expect("at least identity permutation");
        Self { black_count: self.black_count, white_tags, edges }
    }
}

/// Calls `f` with every permutation of `0..n` (as the image vector).
fn for_each_permutation(n: usize, f: &mut impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    permute_rec(&mut perm, 0, f);
}

fn permute_rec(perm: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == perm.len() {
        f(perm);
        return;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        permute_rec(perm, i + 1, f);
        perm.swap(i, j);
    }
}

/// Calls `f` with every permutation of white indices that maps each white to a
/// white with the same tag.
fn for_each_tag_preserving_permutation(tags: &[usize], f: &mut impl FnMut(&[usize])) {
    // Group indices by tag, permute within groups, compose.
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &t) in tags.iter().enumerate() {
        groups.entry(t).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut perm: Vec<usize> = (0..tags.len()).collect();
    fn rec(
        groups: &[Vec<usize>],
        gi: usize,
        perm: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if gi == groups.len() {
            f(perm);
            return;
        }
        let g = &groups[gi];
        let mut order: Vec<usize> = (0..g.len()).collect();
        permute_seq(&mut order, 0, &mut |ord| {
            for (k, &o) in ord.iter().enumerate() {
                perm[g[k]] = g[o];
            }
            rec(groups, gi + 1, perm, f);
        });
    }
    fn permute_seq(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
        if i == v.len() {
            f(v);
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            permute_seq(v, i + 1, f);
            v.swap(i, j);
        }
    }
    rec(&groups, 0, &mut perm, f);
}

/// The black graph `H•`: black vertices, edge when two blacks share a white
/// neighbour.
pub fn black_graph(h: &TaggedBipartiteGraph) -> Result<SimpleGraph> {
    if h.black_count == 0 {
        return Err(Error::Domain("no black vertices".into()));
    }
    let mut edges = BTreeSet::new();
    for w in 1..=h.white_count() {
        let nbrs: Vec<usize> = h.edges.iter().filter(|&&(_, ww)| ww == w).map(|&(b, _)| b).collect();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                if nbrs[i] != nbrs[j] {
                    edges.insert((nbrs[i].min(nbrs[j]), nbrs[i].max(nbrs[j])));
                }
            }
        }
    }
    SimpleGraph::new(h.black_count, edges)
}

const MAX_AUT_VERTICES: usize = 12;

fn check_aut_size(h: &TaggedBipartiteGraph) -> Result<()> {
    if h.black_count + h.white_count() > MAX_AUT_VERTICES {
        return Err(Error::SizeLimit(format!(
            "automorphism counting capped at {MAX_AUT_VERTICES} vertices"
        )));
    }
    Ok(())
}

/// Order of the automorphism group: black → black, white → white, white tags
/// preserved, edge multiset preserved.
///
/// For chromatic-class graphs this is the order of the group of permutations
/// of blacks with identical index sets, computed by the fast product-of-
/// factorials rule; general graphs fall back to brute force.
pub fn automorphism_count(h: &TaggedBipartiteGraph) -> Result<BigInt> {
    check_aut_size(h)?;
    if h.is_chromatic_class() {
        // Whites are fixed (distinct tags), so Aut = permutations of blacks
        // with equal index sets: ∏ multiplicity!.
        let mut mult: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        for b in 1..=h.black_count {
            *mult.entry(h.black_index_set(b)).or_insert(0) += 1;
        }
        let mut out = BigInt::one();
        for m in mult.values() {
            for i in 2..=*m {
                out *= BigInt::from(i);
            }
        }
        return Ok(out);
    }
    Ok(automorphism_count_bruteforce(h, true))
}

/// Brute-force automorphism count; `preserve_tags` selects whether white
/// permutations must fix tags.
pub fn automorphism_count_bruteforce(h: &TaggedBipartiteGraph, preserve_tags: bool) -> BigInt {
    let mut count = 0u64;
    let edge_set: Vec<(usize, usize)> = h.edges.clone();
    for_each_permutation(h.black_count, &mut |bp| {
        let mut check_white = |wp: &[usize]| {
            let mut mapped: Vec<(usize, usize)> =
                edge_set.iter().map(|&(b, w)| (bp[b - 1] + 1, wp[w - 1] + 1)).collect();
            mapped.sort_unstable();
            if mapped == edge_set {
                count += 1;
            }
        };
        if preserve_tags {
            for_each_tag_preserving_permutation(&h.white_tags, &mut check_white);
        } else {
            for_each_permutation(h.white_count(), &mut |wp| {
                // untagged: whites interchangeable regardless of tags
                check_white(wp);
            });
        }
    });
    BigInt::from(count)
}

/// Automorphism count ignoring white tags (black → black, white → white).
pub fn automorphism_count_untagged(h: &TaggedBipartiteGraph) -> Result<BigInt> {
    check_aut_size(h)?;
    Ok(automorphism_count_bruteforce(h, false))
}

/// All connected chromatic-class graphs on sites `{1..N}` with at most
/// `max_edges` edges, one per isomorphism class.
///
/// A chromatic-class graph is equivalent to a connected multiset of nonempty
/// index sets `I_a ⊆ {1..N}` (one black per index set occurrence, one white
/// per tag in the union); the canonical representative sorts the index sets.
pub fn enumerate_chromatic_graphs(n_sites: usize, max_edges: usize) -> Result<Vec<TaggedBipartiteGraph>> {
    if n_sites > 6 || max_edges > 8 {
        return Err(Error::SizeLimit("enumeration capped at N ≤ 6, max_edges ≤ 8".into()));
    }
    let subsets: Vec<Vec<usize>> = (1u32..(1 << n_sites))
        .map(|mask| (1..=n_sites).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    // Non-decreasing sequences of subset indices (multisets), total |I| ≤ cap.
    let mut current: Vec<usize> = Vec::new();
    fn rec(
        subsets: &[Vec<usize>],
        start: usize,
        budget: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<TaggedBipartiteGraph>,
    ) {
        if !current.is_empty() {
            if let Some(g) = multiset_to_graph(subsets, current) {
                if g.is_connected() {
                    out.push(g);
                }
            }
        }
        for i in start..subsets.len() {
            if subsets[i].len() > budget {
                continue;
            }
            current.push(i);
            rec(subsets, i, budget - subsets[i].len(), current, out);
            current.pop();
        }
    }
    rec(&subsets, 0, max_edges, &mut current, &mut out);
    out.sort();
    Ok(out)
}

/// Builds the chromatic-class graph from a multiset of subsets (by index into
/// `subsets`); whites are the tags present, sorted.
fn multiset_to_graph(subsets: &[Vec<usize>], chosen: &[usize]) -> Option<TaggedBipartiteGraph> {
    let mut tags: BTreeSet<usize> = BTreeSet::new();
    for &i in chosen {
        tags.extend(subsets[i].iter().copied());
    }
    let tags: Vec<usize> = tags.into_iter().collect();
    let windex: HashMap<usize, usize> = tags.iter().enumerate().map(|(i, &t)| (t, i + 1)).collect();
    let mut edges = Vec::new();
    for (b, &i) in chosen.iter().enumerate() {
        for &t in &subsets[i] {
            edges.push((b + 1, windex[&t]));
        }
    }
    TaggedBipartiteGraph::new(chosen.len(), tags, edges).ok()
}

/// Weight factor `η(G°) = ∏_whites (−1)^{k−1}(k−1)!` over white degrees `k`.
pub fn eta_white_factor(h: &TaggedBipartiteGraph) -> BigInt {
    let mut out = BigInt::one();
    for w in 1..=h.white_count() {
        let k = h.edges.iter().filter(|&&(_, ww)| ww == w).count();
        let mut f = BigInt::one();
        for i in 1..k {
            f *= BigInt::from(i);
        }
        if k % 2 == 0 {
            f = -f;
        }
        out *= f;
    }
    out
}

/// All connected coverings `G′ ⪰ g` up to isomorphism: every way of splitting
/// each white vertex's incident edges into groups (each keeping the tag), the
/// unsplit graph included. Re-identifying equal-tag whites returns `g`.
pub fn coverings(g: &TaggedBipartiteGraph) -> Result<Vec<TaggedBipartiteGraph>> {
    if !g.is_chromatic_class() {
        return Err(Error::Class("coverings are defined for chromatic-class graphs".into()));
    }
    if g.edge_count() > 8 {
        return Err(Error::SizeLimit("coverings capped at 8 edges".into()));
    }
    // Incident edge lists per white (indices into g.edges).
    let per_white: Vec<Vec<usize>> = (1..=g.white_count())
        .map(|w| (0..g.edges.len()).filter(|&e| g.edges[e].1 == w).collect())
        .collect();
    // Partitions of each white's edge set.
    let mut choices: Vec<Vec<Vec<Vec<usize>>>> = Vec::new();
    for inc in &per_white {
        let parts = enumerate_partitions(inc.len())?;
        choices.push(
            parts
                .iter()
                .map(|p| {
                    p.blocks()
                        .iter()
                        .map(|b| b.iter().map(|&pos| inc[pos - 1]).collect())
                        .collect()
                })
                .collect(),
        );
    }
    let mut seen: BTreeSet<TaggedBipartiteGraph> = BTreeSet::new();
    let mut pick = vec![0usize; per_white.len()];
    loop {
        // Assemble the split graph for the current choice vector.
        let mut tags = Vec::new();
        let mut edges = Vec::new();
        for (wi, &ci) in pick.iter().enumerate() {
            for group in &choices[wi][ci] {
                tags.push(g.white_tags[wi]);
                let new_w = tags.len();
                for &e in group {
                    edges.push((g.edges[e].0, new_w));
                }
            }
        }
        if let Ok(split) = TaggedBipartiteGraph::new(g.black_count, tags, edges) {
            if split.is_connected() {
                seen.insert(split.canonical());
            }
        }
        // Advance the mixed-radix counter.
        let mut i = 0;
        loop {
            if i == pick.len() {
                let mut out: Vec<_> = seen.into_iter().collect();
                out.sort();
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
