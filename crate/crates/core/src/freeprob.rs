//! Single-variable free-cumulant machinery for bounded functions on [0,1]:
//! power moments, resolvents, and the R-transform obtained by formal series
//! inversion of the Cauchy transform.

use crate::grid::GridFunction;
use crate::{Error, Result};

pub const MAX_MOMENT_ORDER: usize = 12;

/// Power moments `m_p = ∫₀¹ b(x)^p dx`, `p = 1..=P`; `m_0 = 1` implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    moments: Vec<f64>,
}

impl MomentSequence {
    pub fn new(moments: Vec<f64>) -> Self {
        Self { moments }
    }

    pub fn order(&self) -> usize {
        self.moments.len()
    }

    /// `m_p`, with `m_0 = 1`.
    pub fn moment(&self, p: usize) -> f64 {
        if p == 0 {
            1.0
        } else {
            self.moments[p - 1]
        }
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }
}

pub fn moments_of_b(b: &GridFunction, p_max: usize) -> Result<MomentSequence> {
    if p_max > MAX_MOMENT_ORDER {
        return Err(Error::SizeLimit(format!(
            "moment order {p_max} > {MAX_MOMENT_ORDER}"
        )));
    }
    let mut moments = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        moments.push(b.integral_of(|_, v| v.powi(p as i32)));
    }
    Ok(MomentSequence::new(moments))
}

/// Free cumulants `R_1..R_{n_max}` from the moment sequence, by triangular
/// recursion on the coefficients of `1 + Σ_p R_p G(z)^p = z G(z)` where
/// `G(z) = Σ_{k≥0} m_k z^{−k−1}`.
///
/// Matching the coefficient of `z^{−n}` gives
/// `m_n = Σ_{p=1}^{n} R_p · [z^{−n}] G^p`, and `[z^{−n}] G^p` is the order
/// `n − p` coefficient of the p-fold convolution of `(m_0, m_1, …)`; the
/// `p = n` term is exactly `R_n`, so the system is triangular.
pub fn free_cumulants_from_moments(m: &MomentSequence, n_max: usize) -> Result<Vec<f64>> {
    if n_max > m.order() {
        return Err(Error::Domain(format!(
            "need {} moments, have {}",
            n_max,
            m.order()
        )));
    }
    // g_pow[s] = [z^{−p−s}] G(z)^p for the current power p.
    let base: Vec<f64> = (0..=n_max).map(|k| m.moment(k)).collect();
    let mut g_pow = base.clone();
    // conv_at[p][s], built incrementally: only the previous power is kept.
    let mut convs: Vec<Vec<f64>> = vec![base.clone()];
    for _ in 2..=n_max {
        let prev = convs.last().unwrap();
        let mut next = vec![0.0; n_max + 1];
        for s in 0..=n_max {
            let mut acc = 0.0;
            for k in 0..=s {
                acc += prev[k] * base[s - k];
            }
            next[s] = acc;
        }
        convs.push(next);
    }
    g_pow.clear();

    let mut r = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        let mut acc = m.moment(n);
        for p in 1..n {
            acc -= r[p] * convs[p - 1][n - p];
        }
        r[n] = acc; // convs[n−1][0] = m_0^n = 1
    }
    Ok(r[1..].to_vec())
}

/// `G(z) = ∫₀¹ dx / (z − b(x))` on the real branch `z > max b`.
pub fn resolvent(b: &GridFunction, z: f64) -> Result<f64> {
    let edge = b.max_value();
    if z <= edge {
        return Err(Error::Branch(format!(
            "z = {z} is not above the spectrum edge {edge}"
        )));
    }
    Ok(b.integral_of(|_, v| 1.0 / (z - v)))
}

/// Unique root `z > max b` of `resolvent(b, z) = v`, for `v > 0`.
pub fn solve_z(b: &GridFunction, v: f64) -> Result<f64> {
    if v <= 0.0 || !v.is_finite() {
        return Err(Error::Domain(format!("v must be positive, got {v}")));
    }
    let edge = b.max_value();
    // G(edge + 1/v) ≤ v, so the root lies below this.
    let mut hi = edge + 1.0 / v + b.sup_norm() + 1.0;
    // Shrink ε until G exceeds v (G diverges at the edge on the grid).
    let mut lo;
    let mut eps = 1.0 / v;
    loop {
        let cand = edge + eps;
        if resolvent(b, cand)? > v {
            lo = cand;
            break;
        }
        hi = cand;
        eps *= 0.5;
        if eps < 1e-300 || edge + eps == edge {
            return Err(Error::Edge(format!(
                "root for v = {v} is within numeric range of the edge {edge}"
            )));
        }
    }
    // Bisection: G is strictly decreasing on (edge, ∞).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if resolvent(b, mid)? > v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * (1.0 + mid.abs()) * 1e-3 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficients `(1, R_1, …, R_{n_max})` of `vz(v) = z(v)·v = 1 + Σ_p R_p v^p`.
pub fn vz_series(m: &MomentSequence, n_max: usize) -> Result<Vec<f64>> {
    let r = free_cumulants_from_moments(m, n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    out.extend(r);
    Ok(out)
}

/// Truncated R-transform evaluation `K(w) = 1/w + Σ_p R_p w^{p−1}`.
pub fn r_transform(r: &[f64], w: f64) -> f64 {
    let mut acc = 1.0 / w;
    let mut pw = 1.0;
    for &rp in r {
        acc += rp * pw;
        pw *= w;
    }
    acc
}
