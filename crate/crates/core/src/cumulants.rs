//! Conversions among moments, classical cumulants, Γ-cumulants (cumulants
//! whose entries are products of variables), and free cumulants.
//!
//! Everything here is for the commutative case: moment and cumulant tables are
//! keyed by sorted index multisets. The one order-sensitive operation is
//! [`free_cumulants_multilinear`], where the argument sequence matters.
//!
//! Operations are generic over [`Scalar`], so the same code runs in `f64` and
//! in exact `BigRational` arithmetic.

use std::collections::HashMap;
use std::ops::{AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::graphs::{mu_graph, SimpleGraph};
use crate::partitions::{
    enumerate_partitions, join, noncrossing_cached, refines, SetPartition,
};
use crate::{Error, Result};

/// Arithmetic needed by the conversion formulas; implemented for `f64`
/// (numeric mode) and `BigRational` (exact mode).
pub trait Scalar:
    Clone
    + Zero
    + One
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + PartialEq
{
    fn from_bigint(b: &BigInt) -> Self;

    /// Exact division by a small positive integer.
    fn div_int(self, k: usize) -> Self;
}

impl Scalar for f64 {
    fn from_bigint(b: &BigInt) -> Self {
        b.to_f64().expect("BigInt convertible to f64")
    }

    fn div_int(self, k: usize) -> Self {
        self / k as f64
    }
}

impl Scalar for BigRational {
    fn from_bigint(b: &BigInt) -> Self {
        BigRational::from_integer(b.clone())
    }

    fn div_int(self, k: usize) -> Self {
        self / BigRational::from_integer(BigInt::from(k))
    }
}

fn canon_key(indices: &[usize]) -> Vec<usize> {
    let mut k = indices.to_vec();
    k.sort_unstable();
    k
}

/// Map from index multisets of `{1..n}` to moments `φ(a_{i₁}…a_{i_k})`.
#[derive(Debug, Clone)]
pub struct MomentTable<T> {
    n: usize,
    values: HashMap<Vec<usize>, T>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn new(n: usize) -> Self {
        Self { n, values: HashMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, indices: &[usize], value: T) {
        self.values.insert(canon_key(indices), value);
    }

    pub fn get(&self, indices: &[usize]) -> Result<T> {
        self.values
            .get(&canon_key(indices))
            .cloned()
            .ok_or_else(|| Error::IncompleteTable(format!("moment {indices:?} missing")))
    }

    /// `φ_π` = product of block moments for the index sequence `indices`.
    pub fn phi_partition(&self, indices: &[usize], p: &SetPartition) -> Result<T> {
        let mut out = T::one();
        for block in p.blocks() {
            let sub: Vec<usize> = block.iter().map(|&pos| indices[pos - 1]).collect();
            out = out * self.get(&sub)?;
        }
        Ok(out)
    }
}

/// Map from index multisets to joint cumulants `K_k(a_{i₁},…,a_{i_k})`.
#[derive(Debug, Clone)]
pub struct CumulantTable<T> {
    n: usize,
    values: HashMap<Vec<usize>, T>,
}

impl<T: Scalar> CumulantTable<T> {
    pub fn new(n: usize) -> Self {
        Self { n, values: HashMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, indices: &[usize], value: T) {
        self.values.insert(canon_key(indices), value);
    }

    pub fn get(&self, indices: &[usize]) -> Result<T> {
        self.values
            .get(&canon_key(indices))
            .cloned()
            .ok_or_else(|| Error::IncompleteTable(format!("cumulant {indices:?} missing")))
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.values.contains_key(&canon_key(indices))
    }

    /// `K_π` = product of block cumulants for the index sequence `indices`.
    pub fn k_partition(&self, indices: &[usize], p: &SetPartition) -> Result<T> {
        let mut out = T::one();
        for block in p.blocks() {
            let sub: Vec<usize> = block.iter().map(|&pos| indices[pos - 1]).collect();
            out = out * self.get(&sub)?;
        }
        Ok(out)
    }
}

const MAX_CONVERSION_N: usize = 10;

fn check_len(len: usize, cap: usize) -> Result<()> {
    if len == 0 || len > cap {
        return Err(Error::SizeLimit(format!("sequence length {len} outside 1..={cap}")));
    }
    Ok(())
}

/// `K_n(a_{i₁},…,a_{i_n}) = Σ_{π} φ_π μ(π, 1_n)` over the full lattice.
pub fn moments_to_cumulants<T: Scalar>(m: &MomentTable<T>, indices: &[usize]) -> Result<T> {
    check_len(indices.len(), MAX_CONVERSION_N)?;
    let n = indices.len();
    let one = SetPartition::one(n);
    let mut acc = T::zero();
    for p in enumerate_partitions(n)? {
        let mu = crate::partitions::mobius_partition_lattice(&p, &one)?;
        acc += T::from_bigint(&mu) * m.phi_partition(indices, &p)?;
    }
    Ok(acc)
}

/// `φ(a_{i₁}…a_{i_n}) = Σ_{π} K_π`.
pub fn cumulants_to_moments<T: Scalar>(k: &CumulantTable<T>, indices: &[usize]) -> Result<T> {
    check_len(indices.len(), MAX_CONVERSION_N)?;
    let n = indices.len();
    let mut acc = T::zero();
    for p in enumerate_partitions(n)? {
        acc += k.k_partition(indices, &p)?;
    }
    Ok(acc)
}

/// Populates a full cumulant table (all sub-multisets of `indices`) from
/// moments.
pub fn cumulant_table_from_moments<T: Scalar>(
    m: &MomentTable<T>,
    indices: &[usize],
) -> Result<CumulantTable<T>> {
    let mut table = CumulantTable::new(m.n());
    let mut distinct = indices.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    // all nonempty sub-multisets: iterate over subsets of positions
    let k = indices.len();
    for mask in 1u32..(1 << k) {
        let sub: Vec<usize> =
            (0..k).filter(|i| mask >> i & 1 == 1).map(|i| indices[i]).collect();
        if !table.contains(&sub) {
            let v = moments_to_cumulants(m, &sub)?;
            table.set(&sub, v);
        }
    }
    Ok(table)
}

const MAX_GAMMA_N: usize = 8;

/// Leonov–Shiryaev Γ-cumulant: `K^Γ_ξ = Σ_{π: π∨Γ=ξ} K_π` for `ξ ≥ Γ`.
///
/// `indices` names the variables in table `k`; positions `1..n` refer into it.
pub fn product_cumulant<T: Scalar>(
    k: &CumulantTable<T>,
    indices: &[usize],
    gamma: &SetPartition,
    xi: &SetPartition,
) -> Result<T> {
    check_len(indices.len(), MAX_GAMMA_N)?;
    if gamma.n() != indices.len() || xi.n() != indices.len() {
        return Err(Error::Domain("partition size must match sequence length".into()));
    }
    if !refines(gamma, xi)? {
        return Err(Error::Order("ξ must be coarser than Γ (use the Γ∧ξ reduction)".into()));
    }
    let mut acc = T::zero();
    for p in enumerate_partitions(indices.len())? {
        if join(&p, gamma)? == *xi {
            acc += k.k_partition(indices, &p)?;
        }
    }
    Ok(acc)
}

/// The reduction `K^Γ_ξ = K^{Γ∧ξ}_ξ` for `ξ ≱ Γ`.
pub fn product_cumulant_reduced<T: Scalar>(
    k: &CumulantTable<T>,
    indices: &[usize],
    gamma: &SetPartition,
    xi: &SetPartition,
) -> Result<T> {
    let reduced = crate::partitions::meet(gamma, xi)?;
    product_cumulant(k, indices, &reduced, xi)
}

/// The graph `G_{π,Γ}`: vertices are the parts of `π`, with an edge between
/// two parts whenever some part of `Γ` meets both.
pub fn gamma_graph(pi: &SetPartition, gamma: &SetPartition) -> SimpleGraph {
    let labels = pi.labels();
    let mut edges = Vec::new();
    for g in gamma.blocks() {
        let mut parts: Vec<usize> = g.iter().map(|&x| labels[x - 1]).collect();
        parts.sort_unstable();
        parts.dedup();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                edges.push((parts[i] + 1, parts[j] + 1));
            }
        }
    }
    SimpleGraph::new(pi.num_blocks(), edges).expect("valid graph")
}

/// Inversion of the Leonov–Shiryaev formula:
/// `K_n = Σ_{π: π∨Γ=1_n} K^Γ_π μ(G_{π,Γ})`.
///
/// `block_gamma_cumulant(block)` must return `K^{Γ|_p}_{1_p}` for a block `p`
/// of positions (ascending); `K^Γ_π` is the product over blocks of `π`.
pub fn inverse_product_cumulant<T: Scalar>(
    n: usize,
    gamma: &SetPartition,
    mut block_gamma_cumulant: impl FnMut(&[usize]) -> Result<T>,
) -> Result<T> {
    check_len(n, MAX_GAMMA_N)?;
    if gamma.n() != n {
        return Err(Error::Domain("partition size must match sequence length".into()));
    }
    let one = SetPartition::one(n);
    let mut acc = T::zero();
    for p in enumerate_partitions(n)? {
        if join(&p, gamma)? != one {
            continue;
        }
        let mu = mu_graph(&gamma_graph(&p, gamma))?;
        let mut term = T::from_bigint(&mu);
        for block in p.blocks() {
            term = term * block_gamma_cumulant(block)?;
        }
        acc += term;
    }
    Ok(acc)
}

const MAX_FREE_N: usize = 10;

/// Multilinear free cumulant `R_n(a_{i₁},…,a_{i_n})` by the non-crossing
/// subset recursion; the order of `indices` matters for `n ≥ 4`.
pub fn free_cumulants_multilinear<T: Scalar>(m: &MomentTable<T>, indices: &[usize]) -> Result<T> {
    check_len(indices.len(), MAX_FREE_N)?;
    let n = indices.len();
    // R over position-subsets S (kept in sequence order):
    //   R_S = φ(S) − Σ_{π ∈ NC(|S|), π ≠ 1} ∏_V R_{S[V]}
    let mut memo: HashMap<Vec<usize>, T> = HashMap::new();
    free_rec(m, indices, &(1..=n).collect::<Vec<_>>(), &mut memo)
}

fn free_rec<T: Scalar>(
    m: &MomentTable<T>,
    indices: &[usize],
    positions: &[usize],
    memo: &mut HashMap<Vec<usize>, T>,
) -> Result<T> {
    if let Some(v) = memo.get(positions) {
        return Ok(v.clone());
    }
    let sub: Vec<usize> = positions.iter().map(|&p| indices[p - 1]).collect();
    let mut acc = m.get(&sub)?;
    let k = positions.len();
    for p in noncrossing_cached(k)?.iter() {
        if p.num_blocks() == 1 {
            continue;
        }
        let mut term = T::one();
        for block in p.blocks() {
            let inner: Vec<usize> = block.iter().map(|&b| positions[b - 1]).collect();
            term = term * free_rec(m, indices, &inner, memo)?;
        }
        acc = acc - term;
    }
    memo.insert(positions.to_vec(), acc.clone());
    Ok(acc)
}

/// Direct Möbius-inversion route `R_n = Σ_{π∈NC} φ_π μ_NC(π, 1_n)`; slower,
/// used as an internal cross-check oracle.
pub fn free_cumulants_mobius<T: Scalar>(m: &MomentTable<T>, indices: &[usize]) -> Result<T> {
    check_len(indices.len(), MAX_FREE_N)?;
    let n = indices.len();
    let one = SetPartition::one(n);
    let mut acc = T::zero();
    for p in noncrossing_cached(n)?.iter() {
        let mu = crate::partitions::mobius_nc(p, &one)?;
        acc += T::from_bigint(&mu) * m.phi_partition(indices, p)?;
    }
    Ok(acc)
}
