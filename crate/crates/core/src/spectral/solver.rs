//! Multi-start projected gradient ascent.
//!
//! `p = 1`: Euclidean projection onto the simplex after a gradient step on
//! `P_H`, Armijo backtracking. `p > 1`: ascent on the scale-invariant ratio
//! `P_H(x) / ||x||_p^r`, clipped at zero and renormalized, again with Armijo
//! backtracking. The step length doubles after every accepted step. Each run
//! ends with a Newton-type polish of the eigen-equation on the support.

use std::cmp::Ordering;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{p_norm, pow_pm1, support_residual, Form, SpectralSolution, WeightVector};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Entries above this count as supported when certifying.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

const STAGNATION_RUN: usize = 20;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 80;
const MAX_STEP: f64 = 1e12;
/// Restarts whose values agree to this relative precision count as tied.
const TIE_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Default exponent for front ends; [`solve_rho`] takes `p` explicitly.
    pub p: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Relative objective change counted as stagnation.
    pub tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 1.0,
            restarts: 32,
            seed: 0,
            max_iters: 100_000,
            tol: 1e-12,
            residual_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<SolverConfig>(text)?.validated()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str::<SolverConfig>(text)?.validated()
    }

    /// JSON if the text opens with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_toml(text)
        }
    }

    pub fn validated(self) -> Result<Self> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::InvalidArgument(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.tol > 0.0) || !(self.residual_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(self)
    }
}

struct Run {
    x: Vec<f64>,
    rho: f64,
    kkt: f64,
    iterations: usize,
}

/// `rho_p(H)` with a certified Perron vector.
///
/// The answer is the best of `cfg.restarts` independent ascents. Among runs
/// tied on `rho` up to rounding, certified runs win, then the larger `rho`,
/// then the lexicographically smaller vector, so the result does not depend
/// on thread scheduling. `converged` is set only when the KKT defect
/// (support equation plus off-support sign condition) is within
/// `cfg.residual_tol`; otherwise the best iterate is still returned.
pub fn solve_rho(h: &Hypergraph, p: f64, cfg: &SolverConfig) -> Result<SpectralSolution> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    let cfg = cfg.clone().validated()?;
    let n = h.n();
    if h.m() == 0 {
        let mut entries = vec![0.0; n];
        if n > 0 {
            entries[0] = 1.0;
        }
        return Ok(SpectralSolution {
            rho: 0.0,
            vector: WeightVector { entries, p },
            residual: 0.0,
            support: if n > 0 { vec![1] } else { Vec::new() },
            restarts_used: 0,
            iterations: 0,
            total_iterations: 0,
            converged: true,
        });
    }

    let form = Form::new(h);
    let starts = starting_points(&form, p, &cfg);
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|x0| ascend(&form, x0, p, &cfg))
        .collect();
    let total_iterations = runs.iter().map(|r| r.iterations).sum();
    let restarts_used = runs.len();
    // runs within rounding of the best value compete on certification first
    let top = runs.iter().map(|r| r.rho).fold(f64::NEG_INFINITY, f64::max);
    let best = runs
        .into_iter()
        .filter(|r| r.rho >= top - TIE_RTOL * top.abs())
        .reduce(|a, b| if better(&b, &a, cfg.residual_tol) { b } else { a })
        .unwrap();

    let rho = form.value(&best.x);
    let mut link = vec![0.0; n];
    form.link_sums(&best.x, &mut link);
    let residual = support_residual(&best.x, &link, rho, p, SUPPORT_THRESHOLD);
    let kkt = kkt_defect(&best.x, &link, rho, p);
    let support = best
        .x
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > SUPPORT_THRESHOLD)
        .map(|(i, _)| i as u32 + 1)
        .collect();
    Ok(SpectralSolution {
        rho,
        vector: WeightVector { entries: best.x, p },
        residual,
        support,
        restarts_used,
        iterations: best.iterations,
        total_iterations,
        converged: kkt <= cfg.residual_tol,
    })
}

fn better(a: &Run, b: &Run, residual_tol: f64) -> bool {
    let (ca, cb) = (a.kkt <= residual_tol, b.kkt <= residual_tol);
    if ca != cb {
        return ca;
    }
    match a.rho.partial_cmp(&b.rho) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => a.x.partial_cmp(&b.x) == Some(Ordering::Less),
    }
}

/// Support defect plus off-support violation `max(0, link_i - rho x_i^{p-1})`.
fn kkt_defect(x: &[f64], link: &[f64], rho: f64, p: f64) -> f64 {
    x.iter().zip(link).fold(0.0, |acc: f64, (&xi, &li)| {
        let d = li - rho * pow_pm1(xi, p);
        acc.max(if xi > SUPPORT_THRESHOLD { d.abs() } else { d.max(0.0) })
    })
}

fn starting_points(form: &Form, p: f64, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let n = form.n;
    let deg = form.degrees();
    let active: Vec<usize> = (0..n).filter(|&i| deg[i] > 0).collect();
    let mut starts = Vec::with_capacity(cfg.restarts);

    let mut uniform = vec![0.0; n];
    active.iter().for_each(|&i| uniform[i] = 1.0);
    starts.push(uniform);

    starts.push(deg.iter().map(|&d| d as f64).collect());

    let m = form.m();
    let n_edge = (cfg.restarts / 4).min(m);
    for j in 0..n_edge {
        let e = j * m / n_edge;
        let mut x = vec![0.0; n];
        form.idx[e * form.r..(e + 1) * form.r]
            .iter()
            .for_each(|&i| x[i] = 1.0);
        starts.push(x);
    }

    let mut k = 0u64;
    while starts.len() < cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (k + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut x = vec![0.0; n];
        for &i in &active {
            // exponential draws give a uniform point of the simplex
            let u: f64 = rng.gen();
            x[i] = -(1.0 - u).ln() + 1e-3;
        }
        starts.push(x);
        k += 1;
    }
    starts.truncate(cfg.restarts);

    for x in &mut starts {
        let norm = p_norm(x, p);
        x.iter_mut().for_each(|v| *v /= norm);
    }
    starts
}

fn ascend(form: &Form, mut x: Vec<f64>, p: f64, cfg: &SolverConfig) -> Run {
    let n = form.n;
    let r = form.r as f64;
    let mut link = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut val = form.value(&x);
    let mut alpha = 1.0;
    let mut flat = 0usize;
    let mut iterations = 0usize;

    while iterations < cfg.max_iters {
        form.link_sums(&x, &mut link);
        let kkt = kkt_defect(&x, &link, val, p);
        if kkt <= 0.01 * cfg.residual_tol {
            break;
        }
        if p == 1.0 {
            g.iter_mut().zip(&link).for_each(|(gi, li)| *gi = r * li);
        } else {
            for i in 0..n {
                g[i] = r * (link[i] - val * pow_pm1(x[i], p));
            }
        }

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            for i in 0..n {
                y[i] = x[i] + alpha * g[i];
            }
            if p == 1.0 {
                project_simplex(&mut y);
            } else {
                y.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            let decrease: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
            if decrease <= 0.0 {
                // the projected step is null: stationary to machine precision
                break;
            }
            if p != 1.0 {
                let norm = p_norm(&y, p);
                if norm == 0.0 {
                    alpha *= 0.5;
                    continue;
                }
                y.iter_mut().for_each(|v| *v /= norm);
            }
            let new_val = form.value(&y);
            if new_val >= val + ARMIJO * decrease {
                accepted = Some(new_val);
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        let Some(new_val) = accepted else {
            break;
        };
        std::mem::swap(&mut x, &mut y);
        let change = (new_val - val).abs() / val.abs().max(f64::MIN_POSITIVE);
        val = new_val;
        alpha = (alpha * 2.0).min(MAX_STEP);
        if change < cfg.tol {
            flat += 1;
            if flat >= STAGNATION_RUN {
                break;
            }
        } else {
            flat = 0;
        }
    }
    form.link_sums(&x, &mut link);
    if kkt_defect(&x, &link, val, p) > 0.01 * cfg.residual_tol {
        polish(form, &mut x, p, cfg.residual_tol);
    }
    let rho = form.value(&x);
    form.link_sums(&x, &mut link);
    Run {
        kkt: kkt_defect(&x, &link, rho, p),
        rho,
        x,
        iterations,
    }
}

/// Levenberg-Marquardt on the eigen-equation restricted to the support.
///
/// Near a maximizer the objective is flat to second order, so ascent alone
/// stalls once the defect is around the square root of machine precision.
/// Solving `link_i(x) = rho x_i^{p-1}`, `||x||_p = 1` directly takes the
/// defect the rest of the way. A step is kept only if it lowers the KKT
/// defect without lowering `P_H`; otherwise `x` is left as it was.
fn polish(form: &Form, x: &mut Vec<f64>, p: f64, residual_tol: f64) {
    let n = form.n;
    let mut link = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    form.link_sums(x, &mut link);
    let mut val = form.value(x);
    let mut kkt = kkt_defect(x, &link, val, p);
    let floor = val;
    let mut lambda = 1e-12;

    for _ in 0..60 {
        if kkt <= 1e-3 * residual_tol {
            break;
        }
        let support: Vec<usize> = (0..n).filter(|&i| x[i] > SUPPORT_THRESHOLD).collect();
        let k = support.len();
        form.link_jacobian(x, &mut hess);
        // residuals and Jacobian in (x_S, rho)
        let dim = k + 1;
        let mut f = vec![0.0; dim];
        let mut jac = vec![0.0; dim * dim];
        for (a, &i) in support.iter().enumerate() {
            f[a] = link[i] - val * pow_pm1(x[i], p);
            for (b, &j) in support.iter().enumerate() {
                jac[a * dim + b] = hess[i * n + j];
            }
            if p != 1.0 {
                jac[a * dim + a] -= val * (p - 1.0) * x[i].powf(p - 2.0);
            }
            jac[a * dim + k] = -pow_pm1(x[i], p);
        }
        f[k] = support.iter().map(|&i| x[i].powf(p)).sum::<f64>() - 1.0;
        for (b, &j) in support.iter().enumerate() {
            jac[k * dim + b] = p * pow_pm1(x[j], p);
        }

        let mut jtj = vec![0.0; dim * dim];
        let mut jtf = vec![0.0; dim];
        for a in 0..dim {
            for b in 0..dim {
                jtj[a * dim + b] = (0..dim).map(|c| jac[c * dim + a] * jac[c * dim + b]).sum();
            }
            jtf[a] = -(0..dim).map(|c| jac[c * dim + a] * f[c]).sum::<f64>();
        }

        let mut improved = false;
        while lambda < 1e8 {
            let mut sys = jtj.clone();
            for a in 0..dim {
                sys[a * dim + a] += lambda * (1.0 + jtj[a * dim + a]);
            }
            let Some(delta) = solve_dense(sys, jtf.clone(), dim) else {
                lambda *= 10.0;
                continue;
            };
            let mut y = x.clone();
            for (a, &i) in support.iter().enumerate() {
                y[i] = (x[i] + delta[a]).max(0.0);
            }
            let norm = p_norm(&y, p);
            if norm > 0.0 {
                y.iter_mut().for_each(|v| *v /= norm);
                let y_val = form.value(&y);
                let mut y_link = vec![0.0; n];
                form.link_sums(&y, &mut y_link);
                let y_kkt = kkt_defect(&y, &y_link, y_val, p);
                if y_kkt < kkt && y_val >= floor - 1e-12 * floor.abs() {
                    *x = y;
                    link = y_link;
                    val = y_val;
                    kkt = y_kkt;
                    lambda = (lambda * 0.1).max(1e-15);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            if factor != 0.0 {
                for c in col..n {
                    a[row * n + c] -= factor * a[col * n + c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row * n + c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Euclidean projection onto `{ z >= 0, Σ z = 1 }`.
fn project_simplex(y: &mut [f64]) {
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    y.iter_mut().for_each(|v| *v = (*v - tau).max(0.0));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eigen_residual, poly_form, poly_gradient};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hg(n: usize, r: usize, edges: &[&[u32]]) -> Hypergraph {
        Hypergraph::new(n, r, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    fn petersen() -> Hypergraph {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push(vec![i + 1, (i + 1) % 5 + 1]);
            edges.push(vec![i + 1, i + 6]);
            edges.push(vec![i + 6, (i + 2) % 5 + 6]);
        }
        Hypergraph::new(10, 2, edges).unwrap()
    }

    #[test]
    fn simplex_projection() {
        let mut y = vec![0.5, 0.5, 0.5];
        project_simplex(&mut y);
        for v in &y {
            assert_relative_eq!(*v, 1.0 / 3.0, max_relative = 1e-15);
        }
        let mut y = vec![2.0, 0.0, -1.0];
        project_simplex(&mut y);
        assert_eq!(y, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn spec_examples() {
        let cfg = SolverConfig::default();
        let k3 = Hypergraph::complete(3, 2).unwrap();
        let s = solve_rho(&k3, 2.0, &cfg).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.rho, 2.0, max_relative = 1e-12);
        assert!(s.residual <= 1e-8);

        let k4 = Hypergraph::complete(4, 2).unwrap();
        let s = solve_rho(&k4, 1.0, &cfg).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.rho, 0.75, max_relative = 1e-12);

        let t = hg(3, 3, &[&[1, 2, 3]]);
        let s = solve_rho(&t, 1.0, &cfg).unwrap();
        assert_relative_eq!(s.rho, 1.0 / 9.0, max_relative = 1e-12);
    }

    #[test]
    fn path_p2_is_golden_ratio() {
        let p4 = hg(4, 2, &[&[1, 2], &[2, 3], &[3, 4]]);
        let s = solve_rho(&p4, 2.0, &SolverConfig::default()).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.rho, (1.0 + 5f64.sqrt()) / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn petersen_motzkin_straus() {
        let s = solve_rho(&petersen(), 1.0, &SolverConfig::default()).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.rho, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn disjoint_edges_concentrate() {
        let h = hg(4, 2, &[&[1, 2], &[3, 4]]);
        let s = solve_rho(&h, 1.0, &SolverConfig::default()).unwrap();
        assert_relative_eq!(s.rho, 0.5, max_relative = 1e-12);
        // p > r forces a unique positive Perron vector spread over both edges
        let s = solve_rho(&h, 3.0, &SolverConfig::default()).unwrap();
        assert!(s.converged);
        assert_relative_eq!(s.rho, 2.0 * 2f64.powf(-1.0 / 3.0), max_relative = 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let h = hg(6, 3, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5], &[2, 5, 6]]);
        let cfg = SolverConfig {
            seed: 7,
            ..SolverConfig::default()
        };
        let a = solve_rho(&h, 1.5, &cfg).unwrap();
        let b = solve_rho(&h, 1.5, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isolated_vertices_are_neutral() {
        let cfg = SolverConfig::default();
        let h = hg(5, 3, &[&[1, 2, 3], &[1, 2, 4], &[2, 4, 5]]);
        for p in [1.0, 2.0, 3.0] {
            let a = solve_rho(&h, p, &cfg).unwrap();
            let b = solve_rho(&h.with_isolated(3), p, &cfg).unwrap();
            assert_relative_eq!(a.rho, b.rho, max_relative = 1e-9);
            assert!(b.vector.entries[5..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn empty_hypergraph() {
        let s = solve_rho(&Hypergraph::empty(3, 2).unwrap(), 2.0, &SolverConfig::default()).unwrap();
        assert_eq!(s.rho, 0.0);
        assert!(s.converged);
    }

    #[test]
    fn rejects_bad_p_and_config() {
        let k3 = Hypergraph::complete(3, 2).unwrap();
        assert!(solve_rho(&k3, 0.5, &SolverConfig::default()).is_err());
        let cfg = SolverConfig {
            restarts: 0,
            ..SolverConfig::default()
        };
        assert!(solve_rho(&k3, 1.0, &cfg).is_err());
    }

    #[test]
    fn config_from_json_and_toml() {
        let a = SolverConfig::parse(r#"{"restarts": 8, "seed": 3}"#).unwrap();
        let b = SolverConfig::parse("restarts = 8\nseed = 3\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.residual_tol, 1e-8);
        assert!(SolverConfig::parse("restart = 8").is_err());
    }

    #[test]
    fn solution_is_internally_consistent() {
        let h = hg(6, 3, &[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6]]);
        let s = solve_rho(&h, 2.0, &SolverConfig::default()).unwrap();
        assert_eq!(s.rho, poly_form(&h, &s.vector).unwrap());
        let res = eigen_residual(&h, &s.vector, s.rho, SUPPORT_THRESHOLD).unwrap();
        assert_eq!(res, s.residual);
        assert_relative_eq!(s.vector.p_norm(), 1.0, max_relative = 1e-12);
    }

    fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
        (2usize..=3, 4usize..=6).prop_flat_map(|(r, n)| {
            let all: Vec<Vec<u32>> = Hypergraph::complete(n, r)
                .unwrap()
                .edges()
                .iter()
                .map(|e| e.vertices().to_vec())
                .collect();
            let len = all.len();
            proptest::sample::subsequence(all, 1..=len.min(8))
                .prop_map(move |edges| Hypergraph::new(n, r, edges).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn euler_identity(h in arb_hypergraph(), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<f64> = (0..h.n()).map(|_| rng.gen::<f64>() + 0.01).collect();
            let x = WeightVector::normalized(entries, 1.0).unwrap();
            let g = poly_gradient(&h, &x).unwrap();
            let lhs: f64 = g.iter().zip(&x.entries).map(|(a, b)| a * b).sum();
            let rhs = h.r() as f64 * poly_form(&h, &x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
        }

        #[test]
        fn certified_and_normalized(h in arb_hypergraph(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
            let cfg = SolverConfig { restarts: 8, ..SolverConfig::default() };
            let s = solve_rho(&h, p, &cfg).unwrap();
            prop_assert!(s.converged);
            prop_assert!(s.residual <= cfg.residual_tol);
            prop_assert!((s.vector.p_norm() - 1.0).abs() <= 1e-12);
            prop_assert!(s.vector.entries.iter().all(|v| *v >= 0.0));
        }
    }
}
