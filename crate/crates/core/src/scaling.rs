//! Continuum-limit free energy: truncated F₀ series over cumulant kernels,
//! the damped fixed-point solver for the variational problem, and Legendre
//! transforms over grid profiles of h.

use crate::grid::GridFunction;
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Hard cap on tensor-quadrature work per F₀ evaluation.
const MAX_TENSOR_WORK: f64 = 5e7;

type KernelFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Family of symmetric kernels ψ_n(x₁..x_n), n = 1..=n_max.
pub struct CumulantKernelSet {
    kernels: Vec<KernelFn>,
}

impl CumulantKernelSet {
    pub fn new() -> Self {
        Self { kernels: Vec::new() }
    }

    /// Appends the kernel of the next order (orders must be pushed 1, 2, …).
    pub fn push(&mut self, kernel: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) {
        self.kernels.push(Box::new(kernel));
    }

    pub fn n_max(&self) -> usize {
        self.kernels.len()
    }

    pub fn eval(&self, n: usize, args: &[f64]) -> Result<f64> {
        let k = self
            .kernels
            .get(n - 1)
            .ok_or_else(|| Error::IncompleteTable(format!("no kernel of order {n}")))?;
        Ok(k(args))
    }
}

impl Default for CumulantKernelSet {
    fn default() -> Self {
        Self::new()
    }
}

fn check_tensor_budget(q: &GridFunction, n_max: usize) -> Result<()> {
    if n_max > 6 {
        return Err(Error::SizeLimit(format!(
            "tensor quadrature limited to n_max ≤ 6, got {n_max}"
        )));
    }
    let work = ((q.m() + 1) as f64).powi(n_max as i32);
    if work > MAX_TENSOR_WORK {
        return Err(Error::SizeLimit(format!(
            "tensor quadrature work {work:.1e} exceeds budget"
        )));
    }
    Ok(())
}

// Sums w(j₁)q(j₁)…w(j_k)q(j_k)·f(x_{j₁}..x_{j_k}) over all index tuples.
fn tensor_sum(q: &GridFunction, k: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    fn rec(
        q: &GridFunction,
        depth: usize,
        args: &mut Vec<f64>,
        weight: f64,
        f: &dyn Fn(&[f64]) -> f64,
    ) -> f64 {
        if depth == 0 {
            return weight * f(args);
        }
        let mut acc = 0.0;
        for j in 0..=q.m() {
            let wq = q.weight(j) * q.values()[j];
            if wq == 0.0 {
                continue;
            }
            args.push(q.x(j));
            acc += rec(q, depth - 1, args, weight * wq, f);
            args.pop();
        }
        acc
    }
    rec(q, k, &mut Vec::with_capacity(k), 1.0, f)
}

/// Truncated series `F₀(q) = Σ_{n≤n_max} (1/n!) ∫ q(s₁)…q(s_n) ψ_n ds₁…ds_n`
/// by direct symmetric tensor quadrature.
#[allow(non_snake_case)]
pub fn F0_eval(kernels: &CumulantKernelSet, q: &GridFunction, n_max: usize) -> Result<f64> {
    if n_max > kernels.n_max() {
        return Err(Error::IncompleteTable(format!(
            "need kernels through order {n_max}, have {}",
            kernels.n_max()
        )));
    }
    check_tensor_budget(q, n_max)?;
    let mut total = 0.0;
    let mut fact = 1.0;
    for n in 1..=n_max {
        fact *= n as f64;
        let k = &kernels.kernels[n - 1];
        total += tensor_sum(q, n, k) / fact;
    }
    Ok(total)
}

/// Functional derivative `δF₀/δq` of the truncated series, term by term:
/// `g(s) = Σ_n (1/(n−1)!) ∫ ψ_n(s, s₂..s_n) q(s₂)…q(s_n) ds₂…ds_n`.
#[allow(non_snake_case)]
pub fn F0_gradient(
    kernels: &CumulantKernelSet,
    q: &GridFunction,
    n_max: usize,
) -> Result<GridFunction> {
    if n_max > kernels.n_max() {
        return Err(Error::IncompleteTable(format!(
            "need kernels through order {n_max}, have {}",
            kernels.n_max()
        )));
    }
    check_tensor_budget(q, n_max)?;
    let m = q.m();
    let mut grad = vec![0.0; m + 1];
    let mut fact = 1.0;
    for n in 1..=n_max {
        if n > 1 {
            fact *= (n - 1) as f64;
        }
        let k = &kernels.kernels[n - 1];
        for (j, g) in grad.iter_mut().enumerate() {
            let x = q.x(j);
            let pinned = |rest: &[f64]| {
                let mut args = Vec::with_capacity(n);
                args.push(x);
                args.extend_from_slice(rest);
                k(&args)
            };
            *g += tensor_sum(q, n - 1, &pinned) / fact;
        }
    }
    GridFunction::new(grad)
}

/// An F₀ functional given by an evaluation and its functional gradient —
/// either the truncated kernel series or a closed form (the SSEP integral
/// representation lives in module `ssep`).
pub trait Functional {
    fn eval(&self, q: &GridFunction) -> Result<f64>;
    fn gradient(&self, q: &GridFunction) -> Result<GridFunction>;
}

/// Truncated-series functional built from a kernel set.
pub struct SeriesFunctional<'a> {
    pub kernels: &'a CumulantKernelSet,
    pub n_max: usize,
}

impl Functional for SeriesFunctional<'_> {
    fn eval(&self, q: &GridFunction) -> Result<f64> {
        F0_eval(self.kernels, q, self.n_max)
    }

    fn gradient(&self, q: &GridFunction) -> Result<GridFunction> {
        F0_gradient(self.kernels, q, self.n_max)
    }
}

#[derive(Debug, Clone)]
pub struct VariationalSolution {
    pub g: GridFunction,
    pub q: GridFunction,
    pub f_value: f64,
    pub iterations: usize,
    pub residual: f64,
}

pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const MAX_FIXED_POINT_ITERS: usize = 10_000;

/// Solves the variational problem `max_{g,q} [∫(log(1+eg) − qg) ds + F₀(q)]`
/// by damped alternation of the stationarity relations
/// `q = e/(1+eg)`, `g = δF₀/δq`.
pub fn solve_variational(e: &GridFunction, f0: &dyn Functional) -> Result<VariationalSolution> {
    let m = e.m();
    let mut q = GridFunction::constant(m, 0.0)?;
    let mut g = f0.gradient(&q)?;
    if g.m() != m {
        return Err(Error::Domain("gradient grid size mismatch".into()));
    }
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=MAX_FIXED_POINT_ITERS {
        iterations = it;
        // q update (denominator clipped away from 0 mid-iteration; the final
        // residual is measured against the unclipped relation)
        let q_target = e.zip_with(&g, |ev, gv| ev / (1.0 + ev * gv).max(0.05))?;
        q = q.zip_with(&q_target, |old, new| old + 0.5 * (new - old))?;
        let g_target = f0.gradient(&q)?;
        g = g.zip_with(&g_target, |old, new| old + 0.5 * (new - old))?;

        let mut r1 = 0.0f64;
        for j in 0..=m {
            let denom = 1.0 + e.values()[j] * g.values()[j];
            if denom <= 0.0 {
                return Err(Error::Domain(format!(
                    "1 + e·g = {denom} ≤ 0 at node {j}"
                )));
            }
            r1 = r1.max((q.values()[j] - e.values()[j] / denom).abs());
        }
        let r2 = g.sup_diff(&g_target);
        residual = r1.max(r2);
        if residual < FIXED_POINT_TOL {
            let f_value = e.zip_with(&g, |ev, gv| (1.0 + ev * gv).ln())?.integral()
                - q.zip_with(&g, |qv, gv| qv * gv)?.integral()
                + f0.eval(&q)?;
            return Ok(VariationalSolution { g, q, f_value, iterations, residual });
        }
    }
    Err(Error::NoConvergence { iterations, residual })
}

#[derive(Debug, Clone)]
pub struct LegendreResult {
    pub value: f64,
    pub h: GridFunction,
    pub converged: bool,
}

/// `sup_h [∫ h n dx − F[h]]` by gradient ascent over grid profiles of h,
/// with multi-start. `solve` maps h to the variational solution of F[h];
/// by the envelope theorem the ascent direction is
/// `n(x) − g e^h/(1+ge)` pointwise.
pub fn legendre_transform(
    solve: &dyn Fn(&GridFunction) -> Result<VariationalSolution>,
    n: &GridFunction,
    starts: usize,
    seed: u64,
) -> Result<LegendreResult> {
    let m = n.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LegendreResult> = None;

    let objective = |h: &GridFunction| -> Result<(f64, VariationalSolution)> {
        let sol = solve(h)?;
        let val = h.zip_with(n, |hv, nv| hv * nv)?.integral() - sol.f_value;
        Ok((val, sol))
    };

    for start in 0..starts.max(1) {
        let mut h = if start == 0 {
            GridFunction::constant(m, 0.0)?
        } else {
            let a = rng.gen_range(-1.0..1.0);
            let b = rng.gen_range(-1.0..1.0);
            let c = rng.gen_range(-1.0..1.0);
            GridFunction::from_fn(m, |x| {
                a + b * x + c * (std::f64::consts::PI * x).sin()
            })?
        };
        let (mut val, mut sol) = match objective(&h) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let mut step = 1.0;
        let mut converged = false;
        for _ in 0..500 {
            // envelope gradient of ∫hn − F[h]
            let mut grad = vec![0.0; m + 1];
            let mut sup = 0.0f64;
            for j in 0..=m {
                let eh = h.values()[j].exp();
                let gv = sol.g.values()[j];
                let d = n.values()[j] - gv * eh / (1.0 + gv * (eh - 1.0));
                grad[j] = d;
                sup = sup.max(d.abs());
            }
            if sup < 1e-8 {
                converged = true;
                break;
            }
            // backtracking line search on the ascent direction
            let mut advanced = false;
            while step > 1e-12 {
                let trial =
                    GridFunction::new((0..=m).map(|j| h.values()[j] + step * grad[j]).collect())?;
                match objective(&trial) {
                    Ok((tv, ts)) if tv > val => {
                        h = trial;
                        val = tv;
                        sol = ts;
                        step = (step * 2.0).min(4.0);
                        advanced = true;
                        break;
                    }
                    _ => step *= 0.5,
                }
            }
            if !advanced {
                converged = sup < 1e-5;
                break;
            }
        }
        let candidate = LegendreResult { value: val, h, converged };
        match &best {
            Some(b) if b.value >= candidate.value => {}
            _ => best = Some(candidate),
        }
    }
    best.ok_or_else(|| Error::Solver("no Legendre start converged".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ssep_kernels(n_max: usize) -> CumulantKernelSet {
        let mut k = CumulantKernelSet::new();
        k.push(|a: &[f64]| a[0]);
        if n_max >= 2 {
            k.push(|a: &[f64]| {
                let (x, y) = (a[0].min(a[1]), a[0].max(a[1]));
                -x * (1.0 - y)
            });
        }
        k
    }

    #[test]
    fn f0_eval_closed_forms() {
        let k = ssep_kernels(2);
        let q0 = GridFunction::constant(64, 0.0).unwrap();
        assert_eq!(F0_eval(&k, &q0, 2).unwrap(), 0.0);
        let a = 0.8;
        let qa = GridFunction::constant(64, a).unwrap();
        assert!((F0_eval(&k, &qa, 1).unwrap() - a / 2.0).abs() < 1e-12);
        let expect = a / 2.0 - a * a / 24.0;
        assert!((F0_eval(&k, &qa, 2).unwrap() - expect).abs() < 1e-4);
        assert!(F0_eval(&k, &qa, 3).is_err());
        assert!(F0_eval(&k, &qa, 7).is_err());
    }

    #[test]
    fn f0_gradient_at_zero_is_psi1_and_matches_fd() {
        let k = ssep_kernels(2);
        let q0 = GridFunction::constant(32, 0.0).unwrap();
        let g = F0_gradient(&k, &q0, 2).unwrap();
        for j in 0..=32 {
            assert!((g.values()[j] - g.x(j)).abs() < 1e-13);
        }
        // central finite differences on a random smooth q
        let q = GridFunction::from_fn(32, |x| 0.3 + 0.4 * (2.0 * x - 1.0).powi(2)).unwrap();
        let g = F0_gradient(&k, &q, 2).unwrap();
        let eps = 1e-5;
        for j in [0, 7, 16, 25, 32] {
            let mut qp = q.clone();
            qp.values_mut()[j] += eps;
            let mut qm = q.clone();
            qm.values_mut()[j] -= eps;
            let fd = (F0_eval(&k, &qp, 2).unwrap() - F0_eval(&k, &qm, 2).unwrap())
                / (2.0 * eps * q.weight(j));
            assert!(
                (fd - g.values()[j]).abs() < 1e-6 * (1.0 + fd.abs()),
                "node {j}: fd {fd} vs {}",
                g.values()[j]
            );
        }
    }

    #[test]
    fn gradient_is_additive_in_kernels() {
        let q = GridFunction::from_fn(24, |x| 0.2 + 0.1 * x).unwrap();
        let g2 = F0_gradient(&ssep_kernels(2), &q, 2).unwrap();
        let g1 = F0_gradient(&ssep_kernels(1), &q, 1).unwrap();
        let mut only2 = CumulantKernelSet::new();
        only2.push(|_: &[f64]| 0.0);
        only2.push(|a: &[f64]| {
            let (x, y) = (a[0].min(a[1]), a[0].max(a[1]));
            -x * (1.0 - y)
        });
        let gtail = F0_gradient(&only2, &q, 2).unwrap();
        for j in 0..=24 {
            assert!(
                (g2.values()[j] - g1.values()[j] - gtail.values()[j]).abs() < 1e-13
            );
        }
    }

    #[test]
    fn solve_variational_trivial_and_independent() {
        let k = ssep_kernels(2);
        let f0 = SeriesFunctional { kernels: &k, n_max: 2 };
        let e0 = GridFunction::constant(32, 0.0).unwrap();
        let sol = solve_variational(&e0, &f0).unwrap();
        assert!(sol.f_value.abs() < 1e-12);
        assert!(sol.q.sup_norm() < 1e-10);
        for j in 0..=32 {
            assert!((sol.g.values()[j] - sol.g.x(j)).abs() < 1e-9);
        }

        // independent case: ψ1 = g0 constant, no higher kernels → F = ∫ log(1+g0·e)
        let g0 = 0.35;
        let mut ki = CumulantKernelSet::new();
        ki.push(move |_: &[f64]| g0);
        let fi = SeriesFunctional { kernels: &ki, n_max: 1 };
        let h = GridFunction::from_fn(48, |x| 0.4 * (1.0 + x)).unwrap();
        let e = h.map(|v| v.exp() - 1.0);
        let sol = solve_variational(&e, &fi).unwrap();
        let expect = e.map(|ev| (1.0 + g0 * ev).ln()).integral();
        assert!((sol.f_value - expect).abs() < 1e-9, "{} vs {expect}", sol.f_value);
        assert!(sol.residual < FIXED_POINT_TOL);
    }

    #[test]
    fn fixed_point_satisfies_both_relations_and_stationarity() {
        let k = ssep_kernels(2);
        let f0 = SeriesFunctional { kernels: &k, n_max: 2 };
        let h = GridFunction::constant(24, 0.5).unwrap();
        let e = h.map(|v| v.exp() - 1.0);
        let sol = solve_variational(&e, &f0).unwrap();
        let qfix = e.zip_with(&sol.g, |ev, gv| ev / (1.0 + ev * gv)).unwrap();
        assert!(sol.q.sup_diff(&qfix) < 1e-9);
        assert!(sol.g.sup_diff(&F0_gradient(&k, &sol.q, 2).unwrap()) < 1e-9);

        // FD directional derivatives of the objective vanish at the solution
        let objective = |g: &GridFunction, q: &GridFunction| -> f64 {
            e.zip_with(g, |ev, gv| (1.0 + ev * gv).ln()).unwrap().integral()
                - q.zip_with(g, |qv, gv| qv * gv).unwrap().integral()
                + F0_eval(&k, q, 2).unwrap()
        };
        let eps = 1e-5;
        for dir in 0..3 {
            let d = GridFunction::from_fn(24, |x| match dir {
                0 => 1.0,
                1 => x,
                _ => (std::f64::consts::PI * x).cos(),
            })
            .unwrap();
            let gp = sol.g.zip_with(&d, |a, b| a + eps * b).unwrap();
            let gm = sol.g.zip_with(&d, |a, b| a - eps * b).unwrap();
            let dg = (objective(&gp, &sol.q) - objective(&gm, &sol.q)) / (2.0 * eps);
            let qp = sol.q.zip_with(&d, |a, b| a + eps * b).unwrap();
            let qm = sol.q.zip_with(&d, |a, b| a - eps * b).unwrap();
            let dq = (objective(&sol.g, &qp) - objective(&sol.g, &qm)) / (2.0 * eps);
            assert!(dg.abs() < 1e-6, "g-direction {dir}: {dg}");
            assert!(dq.abs() < 1e-6, "q-direction {dir}: {dq}");
        }
    }

    #[test]
    fn e_derivative_identity() {
        // perturbing e → (1+ε)e at one node changes F by ε·g·q·w + O(ε²)
        let k = ssep_kernels(2);
        let f0 = SeriesFunctional { kernels: &k, n_max: 2 };
        let h = GridFunction::from_fn(24, |x| 0.3 + 0.2 * x).unwrap();
        let e = h.map(|v| v.exp() - 1.0);
        let sol = solve_variational(&e, &f0).unwrap();
        let eps = 1e-4;
        for j in [6, 12, 20] {
            let mut ep = e.clone();
            ep.values_mut()[j] *= 1.0 + eps;
            let mut em = e.clone();
            em.values_mut()[j] *= 1.0 - eps;
            let fd = (solve_variational(&ep, &f0).unwrap().f_value
                - solve_variational(&em, &f0).unwrap().f_value)
                / (2.0 * eps);
            // e ∂F/∂e = gq per node (weighted)
            let expect = sol.g.values()[j] * sol.q.values()[j] * e.weight(j);
            assert!(
                (fd - expect).abs() < 1e-6 * (1.0 + expect.abs()),
                "node {j}: {fd} vs {expect}"
            );
        }
    }

    #[test]
    fn legendre_independent_closed_form() {
        let g0 = 0.3;
        let mut ki = CumulantKernelSet::new();
        ki.push(move |_: &[f64]| g0);
        let solve = |h: &GridFunction| {
            let e = h.map(|v| v.exp() - 1.0);
            solve_variational(&e, &SeriesFunctional { kernels: &ki, n_max: 1 })
        };
        let n = GridFunction::constant(24, 0.5).unwrap();
        let res = legendre_transform(&solve, &n, 3, 42).unwrap();
        let expect = 0.5 * (0.5f64 / 0.3).ln() + 0.5 * (0.5f64 / 0.7).ln();
        assert!((res.value - expect).abs() < 1e-6, "{} vs {expect}", res.value);

        // zero rate at the mean
        let mut kh = CumulantKernelSet::new();
        kh.push(|_: &[f64]| 0.5);
        let solve_h = |h: &GridFunction| {
            let e = h.map(|v| v.exp() - 1.0);
            solve_variational(&e, &SeriesFunctional { kernels: &kh, n_max: 1 })
        };
        let res = legendre_transform(&solve_h, &n, 3, 7).unwrap();
        assert!(res.value.abs() < 1e-8, "{}", res.value);
    }
}
