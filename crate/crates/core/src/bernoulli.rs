//! Exact finite-N correlated Bernoulli models, non-coincident cumulants, and
//! the two equivalent connected-graph expansions of `log Z` (chromatic and
//! Feynman), plus the exact Taylor oracle used to cross-check both.
//!
//! All expansions are truncations; nothing here addresses convergence of the
//! untruncated series.

use std::collections::{BTreeMap, HashMap};
use std::ops::Div;

use crate::cumulants::{CumulantTable, MomentTable, Scalar};
use crate::graphs::{
    automorphism_count, automorphism_count_bruteforce, black_graph, coverings,
    enumerate_chromatic_graphs, eta_white_factor, mu_graph, TaggedBipartiteGraph,
};
use crate::partitions::SetPartition;
use crate::{Error, Result};

pub const MAX_MODEL_N: usize = 12;

/// A joint law of `N` Bernoulli variables given by the probability of each of
/// the `2^N` configurations; bit `i` of a configuration index is `b_{i+1}`.
#[derive(Debug, Clone)]
pub struct BernoulliModel {
    n: usize,
    probs: Vec<f64>,
}

impl BernoulliModel {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_MODEL_N {
            return Err(Error::SizeLimit(format!("N = {n} outside 1..={MAX_MODEL_N}")));
        }
        if probs.len() != 1 << n {
            return Err(Error::Model(format!(
                "expected {} configuration weights, got {}",
                1 << n,
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Model("negative or non-finite weight".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Model(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n, probs })
    }

    /// Independent sites with `P(b_i = 1) = g[i-1]`.
    pub fn independent(g: &[f64]) -> Result<Self> {
        let n = g.len();
        if n == 0 || n > MAX_MODEL_N {
            return Err(Error::SizeLimit(format!("N = {n} outside 1..={MAX_MODEL_N}")));
        }
        if g.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::Model("probabilities must lie in [0,1]".into()));
        }
        let probs = (0..1usize << n)
            .map(|c| {
                (0..n)
                    .map(|i| if c >> i & 1 == 1 { g[i] } else { 1.0 - g[i] })
                    .product()
            })
            .collect();
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Non-coincident moment `E[∏_{i∈sites} b_i]`; `sites` are distinct.
    pub fn subset_moment(&self, sites: &[usize]) -> f64 {
        let mask: usize = sites.iter().map(|&i| 1usize << (i - 1)).sum();
        self.probs
            .iter()
            .enumerate()
            .filter(|&(c, _)| c & mask == mask)
            .map(|(_, &p)| p)
            .sum()
    }

    /// `W[h] = log E[e^{Σ h_i b_i}]`, by exact enumeration.
    pub fn exact_log_partition(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.n {
            return Err(Error::Domain(format!("h has length {}, expected {}", h.len(), self.n)));
        }
        let mut z = 0.0;
        for (c, &p) in self.probs.iter().enumerate() {
            let s: f64 = (0..self.n).filter(|&i| c >> i & 1 == 1).map(|i| h[i]).sum();
            z += p * s.exp();
        }
        Ok(z.ln())
    }
}

/// All `2^N − 1` non-coincident cumulants `K_k(b_{i₁},…,b_{i_k})`, keyed by
/// site subset, via the subset recursion
/// `K(S) = φ(S) − Σ_{T ⊊ S, min S ∈ T} K(T) φ(S∖T)` (cost `O(3^N)`).
pub fn noncoincident_cumulants(model: &BernoulliModel) -> CumulantTable<f64> {
    let n = model.n;
    let full = 1usize << n;
    // moments for every subset mask
    let mut phi = vec![0.0f64; full];
    phi[0] = 1.0;
    for mask in 1..full {
        let sites: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        phi[mask] = model.subset_moment(&sites);
    }
    let mut kappa = vec![0.0f64; full];
    let mut table = CumulantTable::new(n);
    for mask in 1usize..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << low);
        // iterate over subsets t of rest; T = t | {low}
        let mut acc = phi[mask];
        let mut t = rest;
        loop {
            let tt = t | (1 << low);
            if tt != mask {
                acc -= kappa[tt] * phi[mask & !tt];
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        kappa[mask] = acc;
        let sites: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        table.set(&sites, acc);
    }
    table
}

/// An arbitrary (possibly coincident) cumulant `K_n(b_{i₁},…,b_{i_n})` as a
/// polynomial in the non-coincident cumulants, via the Γ-inversion formula
/// with Γ grouping equal site indices.
pub fn reconstruct_coincident_cumulant(
    table: &CumulantTable<f64>,
    indices: &[usize],
) -> Result<f64> {
    let n = indices.len();
    if indices.iter().any(|&i| i == 0 || i > table.n()) {
        return Err(Error::Domain("site index out of range".into()));
    }
    // Γ: positions with equal site index share a part.
    let mut first_pos: HashMap<usize, usize> = HashMap::new();
    let mut labels = vec![0usize; n];
    for (pos, &site) in indices.iter().enumerate() {
        let next = first_pos.len();
        let id = *first_pos.entry(site).or_insert(next);
        labels[pos] = id;
    }
    let gamma = SetPartition::from_labels(&labels);
    crate::cumulants::inverse_product_cumulant(n, &gamma, |block| {
        // K^{Γ|p}_{1_p}: products of coinciding Bernoullis collapse (b² = b),
        // so the block value is the non-coincident cumulant of its distinct
        // sites.
        let mut sites: Vec<usize> = block.iter().map(|&p| indices[p - 1]).collect();
        sites.sort_unstable();
        sites.dedup();
        table.get(&sites)
    })
}

/// A truncated series in the variables `e_i = e^{h_i} − 1`: map from exponent
/// vectors (length `N`) to coefficients, total degree ≤ `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSeries<T> {
    n: usize,
    max_degree: usize,
    terms: BTreeMap<Vec<u8>, T>,
}

impl<T: Scalar> ExpansionSeries<T> {
    pub fn new(n: usize, max_degree: usize) -> Self {
        Self { n, max_degree, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn add_term(&mut self, monomial: Vec<u8>, coeff: T) {
        debug_assert_eq!(monomial.len(), self.n);
        if monomial.iter().map(|&e| e as usize).sum::<usize>() > self.max_degree {
            return;
        }
        let entry = self.terms.entry(monomial).or_insert_with(T::zero);
        *entry += coeff;
    }

    pub fn coeff(&self, monomial: &[u8]) -> T {
        self.terms.get(monomial).cloned().unwrap_or_else(T::zero)
    }

    /// Iterates `(monomial, coefficient)` in deterministic (lexicographic)
    /// order, skipping exact zeros.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &T)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero())
    }

}

/// Largest absolute coefficient difference between two f64 series.
pub fn max_coeff_diff(a: &ExpansionSeries<f64>, b: &ExpansionSeries<f64>) -> f64 {
    let mut keys: Vec<&Vec<u8>> = a.terms.keys().chain(b.terms.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().map(|k| (a.coeff(k) - b.coeff(k)).abs()).fold(0.0, f64::max)
}

impl ExpansionSeries<f64> {
    /// Evaluates the truncated series at a point `e`.
    pub fn eval(&self, e: &[f64]) -> Result<f64> {
        if e.len() != self.n {
            return Err(Error::Domain("evaluation point has wrong length".into()));
        }
        let mut acc = 0.0;
        for (mono, &c) in &self.terms {
            let mut term = c;
            for (i, &p) in mono.iter().enumerate() {
                term *= e[i].powi(p as i32);
            }
            acc += term;
        }
        Ok(acc)
    }
}

const MAX_EXPANSION_SITES: usize = 6;
const MAX_EXPANSION_DEGREE: usize = 5;

fn check_expansion_caps(n: usize, max_degree: usize) -> Result<()> {
    if n > MAX_EXPANSION_SITES || max_degree > MAX_EXPANSION_DEGREE {
        return Err(Error::SizeLimit(format!(
            "expansion capped at N ≤ {MAX_EXPANSION_SITES}, degree ≤ {MAX_EXPANSION_DEGREE}"
        )));
    }
    Ok(())
}

fn graph_monomial(n: usize, g: &TaggedBipartiteGraph) -> Vec<u8> {
    let mut mono = vec![0u8; n];
    for &(_, w) in g.edges() {
        mono[g.white_tags()[w - 1] - 1] += 1;
    }
    mono
}

fn graph_cumulant_product<T: Scalar>(
    table: &CumulantTable<T>,
    g: &TaggedBipartiteGraph,
) -> Result<T> {
    let mut out = T::one();
    for b in 1..=g.black_count() {
        let sites: Vec<usize> = g.black_index_set(b).into_iter().collect();
        out = out * table.get(&sites)?;
    }
    Ok(out)
}

/// Chromatic graph expansion of `W = log Z` as a series in `e`:
/// `W = Σ_{G ∈ 𝒞_C} μ(G•)/|Aut G| · ∏_a K(I_a) · ∏_i e_i^{k_i}`.
pub fn graph_expansion_w<T>(
    table: &CumulantTable<T>,
    n: usize,
    max_degree: usize,
) -> Result<ExpansionSeries<T>>
where
    T: Scalar + Div<Output = T>,
{
    check_expansion_caps(n, max_degree)?;
    let mut series = ExpansionSeries::new(n, max_degree);
    for g in enumerate_chromatic_graphs(n, max_degree)? {
        let mu = mu_graph(&black_graph(&g)?)?;
        let aut = automorphism_count(&g)?;
        let weight =
            T::from_bigint(&mu) * graph_cumulant_product(table, &g)? / T::from_bigint(&aut);
        series.add_term(graph_monomial(n, &g), weight);
    }
    Ok(series)
}

/// Feynman expansion of `W` over the covering class: same contract as
/// [`graph_expansion_w`], with each chromatic graph's Möbius weight replaced
/// by `Σ_{G′ ⪰ G} η(G′°)/|Aut G′|` (the executable covering identity).
pub fn feynman_expansion_w<T>(
    table: &CumulantTable<T>,
    n: usize,
    max_degree: usize,
) -> Result<ExpansionSeries<T>>
where
    T: Scalar + Div<Output = T>,
{
    check_expansion_caps(n, max_degree)?;
    let mut series = ExpansionSeries::new(n, max_degree);
    for g in enumerate_chromatic_graphs(n, max_degree)? {
        let mut factor = T::zero();
        for cov in coverings(&g)? {
            let eta = eta_white_factor(&cov);
            let aut = automorphism_count_bruteforce(&cov, true);
            factor += T::from_bigint(&eta) / T::from_bigint(&aut);
        }
        let weight = factor * graph_cumulant_product(table, &g)?;
        series.add_term(graph_monomial(n, &g), weight);
    }
    Ok(series)
}

/// Exact Taylor oracle: expands `Z = 1 + Σ_{∅≠I} φ(b_I) e_I` (multilinear in
/// `e`) and composes with the truncated log series — an expansion route
/// independent of any graph combinatorics.
pub fn taylor_log_z_series<T: Scalar>(
    moments: &MomentTable<T>,
    n: usize,
    max_degree: usize,
) -> Result<ExpansionSeries<T>> {
    check_expansion_caps(n, max_degree)?;
    // u = Z − 1 as a series
    let mut u = ExpansionSeries::new(n, max_degree);
    for mask in 1u32..(1 << n) {
        let sites: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        if sites.len() > max_degree {
            continue;
        }
        let mut mono = vec![0u8; n];
        for &s in &sites {
            mono[s - 1] = 1;
        }
        u.add_term(mono, moments.get(&sites)?);
    }
    // log(1+u) = Σ_{k≥1} (−1)^{k−1} u^k / k; u has no constant term, so the
    // sum truncates at k = max_degree.
    let mut out = ExpansionSeries::new(n, max_degree);
    let mut power = u.clone();
    for k in 1..=max_degree {
        for (mono, c) in power.terms() {
            let mut coeff = c.clone().div_int(k);
            if k % 2 == 0 {
                coeff = -coeff;
            }
            out.add_term(mono.clone(), coeff);
        }
        if k < max_degree {
            power = mul_trunc(&power, &u);
        }
    }
    Ok(out)
}

fn mul_trunc<T: Scalar>(a: &ExpansionSeries<T>, b: &ExpansionSeries<T>) -> ExpansionSeries<T> {
    let mut out = ExpansionSeries::new(a.n, a.max_degree);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let mono: Vec<u8> = ma.iter().zip(mb).map(|(&x, &y)| x + y).collect();
            if mono.iter().map(|&e| e as usize).sum::<usize>() > a.max_degree {
                continue;
            }
            out.add_term(mono, ca.clone() * cb.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::moments_to_cumulants;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(n: usize, rng: &mut impl Rng) -> BernoulliModel {
        let mut probs: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        BernoulliModel::new(n, probs).unwrap()
    }

    fn moment_table_of(model: &BernoulliModel, max_len: usize) -> MomentTable<f64> {
        // multiset moments collapse to subset moments since b² = b
        let n = model.n();
        let mut m = MomentTable::new(n);
        fn rec(
            model: &BernoulliModel,
            m: &mut MomentTable<f64>,
            cur: &mut Vec<usize>,
            start: usize,
            left: usize,
        ) {
            if !cur.is_empty() {
                let mut distinct = cur.clone();
                distinct.dedup();
                m.set(cur, model.subset_moment(&distinct));
            }
            if left == 0 {
                return;
            }
            for i in start..=model.n() {
                cur.push(i);
                rec(model, m, cur, i, left - 1);
                cur.pop();
            }
        }
        rec(model, &mut m, &mut Vec::new(), 1, max_len);
        m
    }

    #[test]
    fn log_partition_examples() {
        let m = BernoulliModel::independent(&[0.5, 0.5]).unwrap();
        assert!(m.exact_log_partition(&[0.0, 0.0]).unwrap().abs() < 1e-15);
        let m = BernoulliModel::independent(&[0.3, 0.7]).unwrap();
        let w = m.exact_log_partition(&[1.0, 1.0]).unwrap();
        let e = std::f64::consts::E - 1.0;
        let expect = (1.0 + 0.3 * e).ln() + (1.0 + 0.7 * e).ln();
        assert!((w - expect).abs() < 1e-14);
        // perfectly correlated triple
        let p = 0.4;
        let mut probs = vec![0.0; 8];
        probs[0] = 1.0 - p;
        probs[7] = p;
        let m = BernoulliModel::new(3, probs).unwrap();
        let h = [0.3, 0.5, 0.2];
        let w = m.exact_log_partition(&h).unwrap();
        let expect = (1.0 - p + p * (h.iter().sum::<f64>()).exp()).ln();
        assert!((w - expect).abs() < 1e-14);
    }

    #[test]
    fn model_validation() {
        assert!(matches!(
            BernoulliModel::new(2, vec![0.5, 0.5, 0.5, 0.5]),
            Err(Error::Model(_))
        ));
        assert!(matches!(BernoulliModel::new(2, vec![0.5, 0.5]), Err(Error::Model(_))));
        assert!(BernoulliModel::independent(&[1.1]).is_err());
    }

    #[test]
    fn noncoincident_cumulants_independent_sites() {
        let g = [0.2, 0.5, 0.8];
        let m = BernoulliModel::independent(&g).unwrap();
        let t = noncoincident_cumulants(&m);
        for i in 1..=3usize {
            assert!((t.get(&[i]).unwrap() - g[i - 1]).abs() < 1e-14);
        }
        for sub in [[1, 2].as_slice(), [1, 3].as_slice(), [2, 3].as_slice(), [1, 2, 3].as_slice()]
        {
            assert!(t.get(sub).unwrap().abs() < 1e-14, "K({sub:?}) ≠ 0");
        }
    }

    #[test]
    fn noncoincident_cumulants_match_lattice_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let model = random_model(4, &mut rng);
        let t = noncoincident_cumulants(&model);
        let m = moment_table_of(&model, 4);
        for mask in 1u32..16 {
            let sites: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let direct = moments_to_cumulants(&m, &sites).unwrap();
            assert!((t.get(&sites).unwrap() - direct).abs() < 1e-13, "at {sites:?}");
        }
    }

    #[test]
    fn coincident_reconstruction_closed_forms() {
        let g = 0.35f64;
        let m = BernoulliModel::independent(&[g]).unwrap();
        let t = noncoincident_cumulants(&m);
        let k2 = reconstruct_coincident_cumulant(&t, &[1, 1]).unwrap();
        assert!((k2 - g * (1.0 - g)).abs() < 1e-13);
        let k3 = reconstruct_coincident_cumulant(&t, &[1, 1, 1]).unwrap();
        assert!((k3 - (g - 3.0 * g * g + 2.0 * g * g * g)).abs() < 1e-13);
        // all-distinct indices reduce to a table lookup
        let m = BernoulliModel::independent(&[0.2, 0.6]).unwrap();
        let t = noncoincident_cumulants(&m);
        let k = reconstruct_coincident_cumulant(&t, &[2, 1]).unwrap();
        assert!((k - t.get(&[1, 2]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn coincident_reconstruction_matches_exact_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let model = random_model(4, &mut rng);
        let t = noncoincident_cumulants(&model);
        let m = moment_table_of(&model, 5);
        let cases: Vec<Vec<usize>> = vec![
            vec![1, 1, 2, 3],
            vec![1, 1, 2, 2],
            vec![2, 2, 2],
            vec![1, 2, 3, 4],
            vec![4, 4, 1, 1, 3],
            vec![1, 1, 1, 2],
        ];
        for indices in cases {
            let rebuilt = reconstruct_coincident_cumulant(&t, &indices).unwrap();
            let direct = moments_to_cumulants(&m, &indices).unwrap();
            assert!(
                (rebuilt - direct).abs() < 1e-10,
                "reconstruction failed at {indices:?}: {rebuilt} vs {direct}"
            );
        }
    }

    #[test]
    fn degree_one_terms_are_first_cumulants() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let model = random_model(3, &mut rng);
        let t = noncoincident_cumulants(&model);
        let s = graph_expansion_w(&t, 3, 2).unwrap();
        for i in 0..3usize {
            let mut mono = vec![0u8; 3];
            mono[i] = 1;
            assert!((s.coeff(&mono) - t.get(&[i + 1]).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn expansions_match_taylor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let model = random_model(3, &mut rng);
            let t = noncoincident_cumulants(&model);
            let m = moment_table_of(&model, 4);
            let chromatic = graph_expansion_w(&t, 3, 4).unwrap();
            let feynman = feynman_expansion_w(&t, 3, 4).unwrap();
            let taylor = taylor_log_z_series(&m, 3, 4).unwrap();
            let d1 = max_coeff_diff(&chromatic, &taylor);
            let d2 = max_coeff_diff(&feynman, &taylor);
            let d3 = max_coeff_diff(&chromatic, &feynman);
            assert!(d1 < 1e-9, "chromatic vs taylor: {d1}");
            assert!(d2 < 1e-9, "feynman vs taylor: {d2}");
            assert!(d3 < 1e-9, "chromatic vs feynman: {d3}");
        }
    }

    #[test]
    fn expansion_matches_numeric_log_partition() {
        // summing the truncated series at small e approximates W[h]
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let model = random_model(3, &mut rng);
        let t = noncoincident_cumulants(&model);
        let s = graph_expansion_w(&t, 3, 4).unwrap();
        let h = [0.05, -0.03, 0.04];
        let e: Vec<f64> = h.iter().map(|x: &f64| x.exp() - 1.0).collect();
        let w = model.exact_log_partition(&h).unwrap();
        let approx = s.eval(&e).unwrap();
        assert!((w - approx).abs() < 1e-7, "series {approx} vs exact {w}");
    }

    #[test]
    fn series_equality_in_exact_arithmetic() {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        // random rational cumulant table, N = 2, degree ≤ 4: the two graph
        // expansions must agree exactly, coefficient by coefficient
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let mut t: CumulantTable<BigRational> = CumulantTable::new(2);
        for sub in [[1usize].as_slice(), &[2], &[1, 2]] {
            let num = rng.gen_range(-20i64..20);
            t.set(sub, BigRational::new(BigInt::from(num), BigInt::from(17)));
        }
        let a = graph_expansion_w(&t, 2, 4).unwrap();
        let b = feynman_expansion_w(&t, 2, 4).unwrap();
        let keys: Vec<Vec<u8>> = a.terms().map(|(k, _)| k.clone()).collect();
        for k in keys {
            assert_eq!(a.coeff(&k), b.coeff(&k), "monomial {k:?}");
        }
    }

    #[test]
    fn graphil_monomial_weight_is_one() {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        // the e₁³e₂³ coefficient on K₁(b₁)²K₁(b₂)²K₂(b₁,b₂): isolate it by a
        // table where only those cumulants are nonzero, in exact arithmetic
        let one = BigRational::from_integer(BigInt::from(1));
        let mut t: CumulantTable<BigRational> = CumulantTable::new(2);
        t.set(&[1], one.clone());
        t.set(&[2], one.clone());
        t.set(&[1, 2], one.clone());
        // the contributing graph: blacks {1},{1},{2},{2},{1,2}
        let g = TaggedBipartiteGraph::new(
            5,
            vec![1, 2],
            vec![(1, 1), (2, 1), (3, 2), (4, 2), (5, 1), (5, 2)],
        )
        .unwrap();
        let mu = mu_graph(&black_graph(&g).unwrap()).unwrap();
        let aut = automorphism_count(&g).unwrap();
        let weight = BigRational::from_integer(mu) / BigRational::from_integer(aut);
        assert_eq!(weight, one);
        // covering route gives the same weight
        let mut cov_sum = BigRational::from_integer(BigInt::from(0));
        for cov in coverings(&g).unwrap() {
            cov_sum += BigRational::from_integer(eta_white_factor(&cov))
                / BigRational::from_integer(automorphism_count_bruteforce(&cov, true));
        }
        assert_eq!(cov_sum, one);
        let _ = t;
    }

    #[test]
    fn tree_dominance_trend_under_scaling() {
        // With K_n ~ N^{1−n}ψ_n, the total |weight| of non-tree graphs at
        // degree ≤ 4 (evaluated at e ≡ 1) decays at least like 1/N.
        fn psi2(x: f64, y: f64) -> f64 {
            let (x, y) = if x <= y { (x, y) } else { (y, x) };
            -x * (1.0 - y)
        }
        fn psi3(mut p: [f64; 3]) -> f64 {
            p.sort_by(f64::total_cmp);
            2.0 * p[0] * (1.0 - 2.0 * p[1]) * (1.0 - p[2])
        }
        let mut ratios = Vec::new();
        for n in [4usize, 5, 6] {
            let x = |i: usize| i as f64 / (n as f64 + 1.0);
            let mut t: CumulantTable<f64> = CumulantTable::new(n);
            for mask in 1u32..(1 << n) {
                let sites: Vec<usize> =
                    (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                let scale = (n as f64).powi(1 - sites.len() as i32);
                let v = match sites.len() {
                    1 => x(sites[0]),
                    2 => psi2(x(sites[0]), x(sites[1])),
                    3 => psi3([x(sites[0]), x(sites[1]), x(sites[2])]),
                    _ => 0.0,
                };
                t.set(&sites, scale * v);
            }
            let (mut tree, mut nontree) = (0.0f64, 0.0f64);
            for g in enumerate_chromatic_graphs(n, 4).unwrap() {
                let mu = mu_graph(&black_graph(&g).unwrap()).unwrap();
                let aut = automorphism_count(&g).unwrap();
                let w = num_traits::ToPrimitive::to_f64(&mu).unwrap()
                    / num_traits::ToPrimitive::to_f64(&aut).unwrap()
                    * graph_cumulant_product(&t, &g).unwrap();
                if g.edge_count() == g.black_count() + g.white_count() - 1 {
                    tree += w.abs();
                } else {
                    nontree += w.abs();
                }
            }
            // trees total ~ N (tags sum over ~N^W sites at weight N^{1-W});
            // non-trees total ~ O(1), so the *relative* weight decays ~ 1/N
            ratios.push(nontree / tree);
        }
        assert!(
            ratios[2] < ratios[0] * (4.0 / 6.0) * 1.3,
            "relative non-tree weight not decaying like 1/N: {ratios:?}"
        );
        assert!(ratios[1] < ratios[0] && ratios[2] < ratios[1], "{ratios:?}");
    }
}
