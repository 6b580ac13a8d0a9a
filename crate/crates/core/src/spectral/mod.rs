//! `rho_p(H) = max { P_H(x) : x >= 0, ||x||_p = 1 }` with
//! `P_H(x) = r · Σ_{e ∈ E} Π_{i ∈ e} x_i`.
//!
//! A maximizer satisfies `Σ_{f ∈ H_i} Π_{j ∈ f} x_j = rho · x_i^{p-1}` at
//! every vertex with `x_i > 0`; the largest defect of that equation over
//! the support is reported as the solution's residual.

mod brute;
mod clique;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

pub use brute::{rho_brute, BruteBound, BruteConfig};
pub use clique::clique_number;
pub use solver::{solve_rho, SolverConfig, SUPPORT_THRESHOLD};

/// Nonnegative vertex weights together with the norm exponent they live under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub entries: Vec<f64>,
    pub p: f64,
}

impl WeightVector {
    pub fn new(entries: Vec<f64>, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
        }
        if let Some(bad) = entries.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("weights must be finite and >= 0, got {bad}")));
        }
        Ok(WeightVector { entries, p })
    }

    /// Scales `entries` onto the unit p-sphere. All-zero input is rejected.
    pub fn normalized(entries: Vec<f64>, p: f64) -> Result<Self> {
        let mut w = WeightVector::new(entries, p)?;
        let norm = w.p_norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        w.entries.iter_mut().for_each(|v| *v /= norm);
        Ok(w)
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        WeightVector::normalized(vec![1.0; n], p)
    }

    pub fn p_norm(&self) -> f64 {
        p_norm(&self.entries, self.p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub(crate) fn p_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Flat 0-based edge list used on hot paths.
#[derive(Clone, Debug)]
pub(crate) struct Form {
    pub n: usize,
    pub r: usize,
    pub idx: Vec<usize>,
}

impl Form {
    pub fn new(h: &Hypergraph) -> Self {
        Form {
            n: h.n(),
            r: h.r(),
            idx: h
                .edges()
                .iter()
                .flat_map(|e| e.vertices().iter().map(|&v| v as usize - 1))
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.idx.len().checked_div(self.r).unwrap_or(0)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let sum: f64 = self
            .idx
            .chunks_exact(self.r)
            .map(|e| e.iter().map(|&i| x[i]).product::<f64>())
            .sum();
        self.r as f64 * sum
    }

    /// `out[i] = Σ_{e ∋ i} Π_{j ∈ e, j ≠ i} x_j`.
    pub fn link_sums(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in self.idx.chunks_exact(self.r) {
            for (a, &i) in e.iter().enumerate() {
                let mut prod = 1.0;
                for (b, &j) in e.iter().enumerate() {
                    if a != b {
                        prod *= x[j];
                    }
                }
                out[i] += prod;
            }
        }
    }

    /// `out[i * n + j] = Σ_{e ∋ i, j} Π_{k ∈ e - {i, j}} x_k` for `i != j`, zero diagonal.
    pub fn link_jacobian(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in self.idx.chunks_exact(self.r) {
            for (a, &i) in e.iter().enumerate() {
                for (b, &j) in e.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let mut prod = 1.0;
                    for (c, &k) in e.iter().enumerate() {
                        if c != a && c != b {
                            prod *= x[k];
                        }
                    }
                    out[i * n + j] += prod;
                }
            }
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &i in &self.idx {
            d[i] += 1;
        }
        d
    }
}

fn check_len(h: &Hypergraph, x: &WeightVector) -> Result<()> {
    if x.len() != h.n() {
        return Err(Error::InvalidArgument(format!(
            "weight vector has {} entries for {} vertices",
            x.len(),
            h.n()
        )));
    }
    Ok(())
}

/// `P_H(x) = r · Σ_e Π_{i ∈ e} x_i`.
pub fn poly_form(h: &Hypergraph, x: &WeightVector) -> Result<f64> {
    check_len(h, x)?;
    Ok(Form::new(h).value(&x.entries))
}

/// `∇P_H(x)`, component `i` being `r` times the link sum at `i`.
pub fn poly_gradient(h: &Hypergraph, x: &WeightVector) -> Result<Vec<f64>> {
    check_len(h, x)?;
    let form = Form::new(h);
    let mut g = vec![0.0; h.n()];
    form.link_sums(&x.entries, &mut g);
    let r = h.r() as f64;
    g.iter_mut().for_each(|v| *v *= r);
    Ok(g)
}

/// Largest `|link_i(x) - rho · x_i^{p-1}|` over `x_i > threshold`.
pub fn eigen_residual(h: &Hypergraph, x: &WeightVector, rho: f64, threshold: f64) -> Result<f64> {
    check_len(h, x)?;
    let form = Form::new(h);
    let mut link = vec![0.0; h.n()];
    form.link_sums(&x.entries, &mut link);
    Ok(support_residual(&x.entries, &link, rho, x.p, threshold))
}

pub(crate) fn support_residual(x: &[f64], link: &[f64], rho: f64, p: f64, threshold: f64) -> f64 {
    x.iter()
        .zip(link)
        .filter(|(xi, _)| **xi > threshold)
        .map(|(&xi, &li)| (li - rho * pow_pm1(xi, p)).abs())
        .fold(0.0, f64::max)
}

#[inline]
pub(crate) fn pow_pm1(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        1.0
    } else if p == 2.0 {
        x
    } else {
        x.powf(p - 1.0)
    }
}

/// A maximizer of `P_H` on the nonnegative unit p-sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    /// `P_H(vector)` as evaluated.
    pub rho: f64,
    pub vector: WeightVector,
    /// Eigen-equation defect over the support.
    pub residual: f64,
    /// 1-based vertices carrying weight above [`SUPPORT_THRESHOLD`].
    pub support: Vec<u32>,
    pub restarts_used: usize,
    /// Iterations of the restart that produced the answer.
    pub iterations: usize,
    pub total_iterations: usize,
    pub converged: bool,
}

/// `mu(H) = rho_1(H) / r`.
pub fn lagrangian(h: &Hypergraph, cfg: &SolverConfig) -> Result<f64> {
    if h.m() == 0 {
        return Ok(0.0);
    }
    Ok(solve_rho(h, 1.0, cfg)?.rho / h.r() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMeanPoint {
    pub p: f64,
    pub rho: f64,
    /// `(rho_p / (r m))^p`, non-increasing in `p`.
    pub transformed: f64,
    pub converged: bool,
}

/// `rho_p` for each requested `p` together with `(rho_p / (rm))^p`.
pub fn power_mean_curve(h: &Hypergraph, ps: &[f64], cfg: &SolverConfig) -> Result<Vec<PowerMeanPoint>> {
    let rm = (h.r() * h.m()) as f64;
    ps.iter()
        .map(|&p| {
            if !(p >= 1.0) {
                return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
            }
            if h.m() == 0 {
                return Ok(PowerMeanPoint {
                    p,
                    rho: 0.0,
                    transformed: 0.0,
                    converged: true,
                });
            }
            let sol = solve_rho(h, p, cfg)?;
            Ok(PowerMeanPoint {
                p,
                rho: sol.rho,
                transformed: (sol.rho / rm).powf(p),
                converged: sol.converged,
            })
        })
        .collect()
}
