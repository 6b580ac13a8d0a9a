//! Exhaustive verification over enumerated hypergraphs.
//!
//! Each check walks every isomorphism class in a desk-scale corpus,
//! evaluates the claimed inequality and collects a [`VerificationReport`].
//! Instances are verified in parallel and merged in enumeration order, so
//! reports are reproducible byte for byte.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomials::{bound_for, p_r, p_r_inverse, BoundContext};
use crate::error::{Error, Result};
use crate::hypergraph::{enumerate_up_to, Hypergraph, ShiftOutcome, DEFAULT_BUDGET};
use crate::spectral::{rho_brute, solve_rho, BruteConfig, SolverConfig, SpectralSolution};

/// Called with `(done, total)` as instances finish.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Slack for the integer-versus-real shadow comparison.
pub const SHADOW_TOL: f64 = 1e-9;
/// Slack for the frozen-vector objective along a shift chain.
pub const CHAIN_TOL: f64 = 1e-12;
/// Entries this close to the maximum count as tied when picking the top vertex.
pub const TOP_VERTEX_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleCheck {
    /// Only hypergraphs with at most this many non-isolated vertices are checked.
    pub max_n: usize,
    pub brute: BruteConfig,
    /// Allowed `|rho - rho_brute|`.
    pub tolerance: f64,
}

impl Default for OracleCheck {
    fn default() -> Self {
        OracleCheck {
            max_n: 6,
            brute: BruteConfig::default(),
            tolerance: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub solver: SolverConfig,
    /// Allowed excess of a computed value over its bound.
    pub tol_outer: f64,
    /// Distance to the bound counted as equality.
    pub tol_eq: f64,
    /// Enumeration budget in labeled candidates.
    pub budget: u64,
    pub oracle: Option<OracleCheck>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            solver: SolverConfig::default(),
            tol_outer: 1e-7,
            tol_eq: 1e-5,
            budget: DEFAULT_BUDGET,
            oracle: Some(OracleCheck::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    RhoBound,
    Degree,
    Shadow,
    Stanley,
    FranklFuredi,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::RhoBound => "theorem2",
            Claim::Degree => "degree",
            Claim::Shadow => "shadow",
            Claim::Stanley => "stanley",
            Claim::FranklFuredi => "ff",
        }
    }

    pub fn parse(s: &str) -> Option<Claim> {
        Some(match s {
            "theorem2" | "theorem1" => Claim::RhoBound,
            "degree" => Claim::Degree,
            "shadow" => Claim::Shadow,
            "stanley" => Claim::Stanley,
            "ff" | "frankl-furedi" => Claim::FranklFuredi,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Computed value exceeds the bound.
    BoundViolated,
    /// Value within `tol_eq` of the bound on a non-complete hypergraph.
    SpuriousEquality,
    /// A complete hypergraph that misses the bound by more than `tol_eq`.
    MissingEquality,
    NonConverged,
    /// Solver and grid oracle disagree.
    OracleMismatch,
    /// The shift loop did not reach a fixpoint within `m` shifts.
    ShiftNonTermination,
    /// The frozen-vector objective dropped across a shift.
    ChainDecrease,
    /// Terminal `shadow(H - v)` not contained in the link of `v`.
    ShadowContainment,
    /// Terminal degree of `v` below `d0`.
    DegreeBelowBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub hypergraph: Hypergraph,
    pub value: f64,
    pub bound: f64,
    /// `bound - value` for upper bounds, `value - bound` for lower bounds.
    pub margin: f64,
    pub detail: String,
}

/// One table line per instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub m: usize,
    /// Non-isolated vertices.
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub equality: bool,
    pub converged: bool,
    pub residual: f64,
    pub edges: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub solves: usize,
    pub nonconverged: usize,
    pub max_residual: f64,
    pub oracle_checked: usize,
    /// Largest `|rho - rho_brute|` over oracle-checked instances.
    pub oracle_max_diff: f64,
}

impl SolverStats {
    fn absorb(&mut self, other: &SolverStats) {
        self.solves += other.solves;
        self.nonconverged += other.nonconverged;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.oracle_checked += other.oracle_checked;
        self.oracle_max_diff = self.oracle_max_diff.max(other.oracle_max_diff);
    }

    fn record(&mut self, sol: &SpectralSolution) {
        self.solves += 1;
        if sol.converged {
            self.max_residual = self.max_residual.max(sol.residual);
        } else {
            self.nonconverged += 1;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub r: usize,
    pub p: Option<f64>,
    pub m_max: Option<usize>,
    pub n_max: Option<usize>,
    pub s_max: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: ReportParams,
    pub instances: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub equality_cases: Vec<Hypergraph>,
    pub solver: SolverStats,
    pub rows: Vec<ReportRow>,
    /// Not serialized, so identical runs give identical JSON.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,value,bound,margin,equality,converged,residual,edges\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},\"{}\"\n",
                r.m, r.n, r.value, r.bound, r.margin, r.equality, r.converged, r.residual, r.edges
            ));
        }
        out
    }
}

/// Per-instance outcome before merging.
struct Outcome {
    row: ReportRow,
    failure: Option<Failure>,
    equality: bool,
    stats: SolverStats,
}

fn edge_string(h: &Hypergraph) -> String {
    h.edges()
        .iter()
        .map(|e| {
            e.vertices()
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn row(h: &Hypergraph, value: f64, bound: f64, margin: f64) -> ReportRow {
    ReportRow {
        m: h.m(),
        n: h.non_isolated().len(),
        value,
        bound,
        margin,
        equality: false,
        converged: true,
        residual: 0.0,
        edges: edge_string(h),
    }
}

fn failure(kind: FailureKind, h: &Hypergraph, value: f64, bound: f64, margin: f64, detail: String) -> Failure {
    Failure {
        kind,
        hypergraph: h.clone(),
        value,
        bound,
        margin,
        detail,
    }
}

fn run_instances(
    claim: Claim,
    params: ReportParams,
    corpus: &[Hypergraph],
    progress: Option<Progress<'_>>,
    check: impl Fn(&Hypergraph) -> Result<Outcome> + Sync,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let done = AtomicUsize::new(0);
    let total = corpus.len();
    let outcomes: Vec<Result<Outcome>> = corpus
        .par_iter()
        .map(|h| {
            let out = check(h);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                cb(k, total);
            }
            out
        })
        .collect();

    let mut report = VerificationReport {
        claim: claim.name().to_string(),
        params,
        instances: 0,
        passes: 0,
        failures: Vec::new(),
        equality_cases: Vec::new(),
        solver: SolverStats::default(),
        rows: Vec::with_capacity(total),
        wall_time_secs: 0.0,
    };
    for (h, out) in corpus.iter().zip(outcomes) {
        let out = out?;
        report.instances += 1;
        match out.failure {
            Some(f) => report.failures.push(f),
            None => report.passes += 1,
        }
        if out.equality {
            report.equality_cases.push(h.clone());
        }
        report.solver.absorb(&out.stats);
        report.rows.push(out.row);
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn oracle_failure(
    h: &Hypergraph,
    p: f64,
    sol: &SpectralSolution,
    cfg: &VerifyConfig,
    stats: &mut SolverStats,
) -> Result<Option<Failure>> {
    let Some(oracle) = &cfg.oracle else {
        return Ok(None);
    };
    if h.non_isolated().len() > oracle.max_n {
        return Ok(None);
    }
    let brute = rho_brute(&h.strip_isolated(), p, &oracle.brute)?;
    let diff = (sol.rho - brute.value).abs();
    stats.oracle_checked += 1;
    stats.oracle_max_diff = stats.oracle_max_diff.max(diff);
    Ok((diff > oracle.tolerance).then(|| {
        failure(
            FailureKind::OracleMismatch,
            h,
            sol.rho,
            brute.value,
            oracle.tolerance - diff,
            format!("solver {} vs grid oracle {}", sol.rho, brute.value),
        )
    }))
}

/// `rho_p(H) <= rm / s^{r/p}` over every class with `1..=m_max` edges on at
/// most `n_max` vertices; equality exactly at complete hypergraphs.
pub fn verify_bound(r: usize, p: f64, m_max: usize, n_max: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    verify_bound_with_progress(r, p, m_max, n_max, cfg, None)
}

pub fn verify_bound_with_progress(
    r: usize,
    p: f64,
    m_max: usize,
    n_max: usize,
    cfg: &VerifyConfig,
    progress: Option<Progress<'_>>,
) -> Result<VerificationReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    let corpus = enumerate_up_to(r, m_max, n_max, cfg.budget)?;
    let params = ReportParams {
        r,
        p: Some(p),
        m_max: Some(m_max),
        n_max: Some(n_max),
        s_max: None,
        seed: cfg.solver.seed,
    };
    run_instances(Claim::RhoBound, params, &corpus, progress, |h| bound_instance(h, p, cfg))
}

fn bound_instance(h: &Hypergraph, p: f64, cfg: &VerifyConfig) -> Result<Outcome> {
    let bound = bound_for(h.r(), h.m() as f64, p)?;
    let sol = solve_rho(h, p, &cfg.solver)?;
    let mut stats = SolverStats::default();
    stats.record(&sol);
    let margin = bound - sol.rho;
    let complete = h.is_complete_up_to_isolated();
    let equality = margin.abs() <= cfg.tol_eq;

    let mut fail = None;
    if margin < -cfg.tol_outer {
        fail = Some(failure(
            FailureKind::BoundViolated,
            h,
            sol.rho,
            bound,
            margin,
            format!("rho_{p} exceeds bound by {}", -margin),
        ));
    } else if equality && !complete {
        fail = Some(failure(
            FailureKind::SpuriousEquality,
            h,
            sol.rho,
            bound,
            margin,
            "attains the bound but is not complete".into(),
        ));
    } else if complete && !equality {
        fail = Some(failure(
            FailureKind::MissingEquality,
            h,
            sol.rho,
            bound,
            margin,
            "complete hypergraph misses the bound".into(),
        ));
    }
    if !sol.converged {
        fail.get_or_insert_with(|| {
            failure(
                FailureKind::NonConverged,
                h,
                sol.rho,
                bound,
                margin,
                format!("eigen-equation residual {}", sol.residual),
            )
        });
    }
    let oracle = oracle_failure(h, p, &sol, cfg, &mut stats)?;
    if fail.is_none() {
        fail = oracle;
    }

    let mut row = row(h, sol.rho, bound, margin);
    row.equality = equality;
    row.converged = sol.converged;
    row.residual = sol.residual;
    Ok(Outcome {
        row,
        failure: fail,
        equality: equality && complete,
        stats,
    })
}

/// Vertex of largest weight, least index among entries within
/// [`TOP_VERTEX_TOL`] of the maximum. 1-based.
pub fn top_vertex(x: &[f64]) -> u32 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    x.iter().position(|&v| v >= max - TOP_VERTEX_TOL).unwrap_or(0) as u32 + 1
}

/// Shift loop of the degree argument: solve at `p = 1`, take the top vertex
/// `v`, shift edges towards `v` until `shadow(H - v)` lies in the link of
/// `v`. Checks termination, the frozen-vector objective chain, terminal
/// containment and `d_v >= d0`.
pub fn verify_degree_lemma(r: usize, m_max: usize, n_max: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    verify_degree_lemma_with_progress(r, m_max, n_max, cfg, None)
}

pub fn verify_degree_lemma_with_progress(
    r: usize,
    m_max: usize,
    n_max: usize,
    cfg: &VerifyConfig,
    progress: Option<Progress<'_>>,
) -> Result<VerificationReport> {
    let corpus = enumerate_up_to(r, m_max, n_max, cfg.budget)?;
    let params = ReportParams {
        r,
        p: Some(1.0),
        m_max: Some(m_max),
        n_max: Some(n_max),
        s_max: None,
        seed: cfg.solver.seed,
    };
    run_instances(Claim::Degree, params, &corpus, progress, |h| degree_instance(h, cfg))
}

/// Outcome of [`shift_chain`] for one hypergraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftTrace {
    pub vertex: u32,
    pub terminal: Hypergraph,
    pub shifts: usize,
    pub terminated: bool,
    /// `P_{H^k}(x)` along the chain, starting at `H^0 = H`.
    pub chain: Vec<f64>,
}

/// Shifts towards `v` at most `m` times, evaluating the frozen vector `x`
/// on every intermediate hypergraph.
pub fn shift_chain(h: &Hypergraph, v: u32, x: &[f64]) -> Result<ShiftTrace> {
    let form = |g: &Hypergraph| -> f64 {
        let sum: f64 = g
            .edges()
            .iter()
            .map(|e| e.vertices().iter().map(|&i| x[i as usize - 1]).product::<f64>())
            .sum();
        g.r() as f64 * sum
    };
    let mut current = h.clone();
    let mut chain = vec![form(&current)];
    let mut shifts = 0;
    // each shift raises d_v by one, so m shifts always suffice
    while shifts <= h.m() {
        match current.shift_edge(v)? {
            ShiftOutcome::Unchanged => {
                return Ok(ShiftTrace {
                    vertex: v,
                    terminal: current,
                    shifts,
                    terminated: true,
                    chain,
                })
            }
            ShiftOutcome::Shifted { hypergraph, .. } => {
                current = hypergraph;
                chain.push(form(&current));
                shifts += 1;
            }
        }
    }
    Ok(ShiftTrace {
        vertex: v,
        terminal: current,
        shifts,
        terminated: false,
        chain,
    })
}

fn degree_instance(h: &Hypergraph, cfg: &VerifyConfig) -> Result<Outcome> {
    let r = h.r();
    let m = h.m() as f64;
    let ctx = BoundContext::new(r, m, 1.0)?;
    let sol = solve_rho(h, 1.0, &cfg.solver)?;
    let mut stats = SolverStats::default();
    stats.record(&sol);
    let v = top_vertex(&sol.vector.entries);
    let trace = shift_chain(h, v, &sol.vector.entries)?;
    let degree = trace.terminal.degree(v)? as f64;
    let margin = degree - ctx.d0;

    let fail = if !trace.terminated {
        Some(failure(
            FailureKind::ShiftNonTermination,
            h,
            degree,
            ctx.d0,
            margin,
            format!("no fixpoint after {} shifts at vertex {v}", trace.shifts),
        ))
    } else if let Some(k) = trace.chain.windows(2).position(|w| w[1] < w[0] - CHAIN_TOL) {
        Some(failure(
            FailureKind::ChainDecrease,
            h,
            trace.chain[k + 1],
            trace.chain[k],
            trace.chain[k + 1] - trace.chain[k],
            format!("objective dropped at shift {} towards vertex {v}", k + 1),
        ))
    } else if !trace
        .terminal
        .avoiding_family(v)?
        .shadow()
        .is_subset_of(&trace.terminal.link_family(v)?)
    {
        Some(failure(
            FailureKind::ShadowContainment,
            h,
            degree,
            ctx.d0,
            margin,
            format!("terminal shadow not inside the link of vertex {v}"),
        ))
    } else if margin < -cfg.tol_outer {
        Some(failure(
            FailureKind::DegreeBelowBound,
            h,
            degree,
            ctx.d0,
            margin,
            format!("terminal degree of vertex {v} below d0"),
        ))
    } else if !sol.converged {
        Some(failure(
            FailureKind::NonConverged,
            h,
            sol.rho,
            f64::NAN,
            f64::NAN,
            format!("eigen-equation residual {}", sol.residual),
        ))
    } else {
        None
    };

    let mut row = row(h, degree, ctx.d0, margin);
    row.equality = margin.abs() <= cfg.tol_eq;
    row.converged = sol.converged;
    row.residual = sol.residual;
    Ok(Outcome {
        row,
        failure: fail,
        equality: false,
        stats,
    })
}

/// `|shadow(F)| >= p_{r-1}(p_r^{-1}(m))` for every family of `1..=m_max`
/// r-sets on at most `n_max` points, tight exactly at complete families.
pub fn verify_shadow_bound(r: usize, m_max: usize, n_max: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    verify_shadow_bound_with_progress(r, m_max, n_max, cfg, None)
}

pub fn verify_shadow_bound_with_progress(
    r: usize,
    m_max: usize,
    n_max: usize,
    cfg: &VerifyConfig,
    progress: Option<Progress<'_>>,
) -> Result<VerificationReport> {
    if r < 2 {
        return Err(Error::InvalidArgument("shadow bound needs r >= 2".into()));
    }
    let corpus = enumerate_up_to(r, m_max, n_max, cfg.budget)?;
    let params = ReportParams {
        r,
        p: None,
        m_max: Some(m_max),
        n_max: Some(n_max),
        s_max: None,
        seed: cfg.solver.seed,
    };
    run_instances(Claim::Shadow, params, &corpus, progress, |h| {
        let x = p_r_inverse(h.m() as f64, r)?;
        let bound = p_r(x, r - 1);
        let value = h.edge_family().shadow().len() as f64;
        let margin = value - bound;
        let tight = margin.abs() <= SHADOW_TOL * bound.max(1.0);
        let complete = h.is_complete_up_to_isolated();
        let fail = if margin < -SHADOW_TOL * bound.max(1.0) {
            Some(failure(
                FailureKind::BoundViolated,
                h,
                value,
                bound,
                margin,
                "shadow smaller than bound".into(),
            ))
        } else if tight != complete {
            Some(failure(
                if tight {
                    FailureKind::SpuriousEquality
                } else {
                    FailureKind::MissingEquality
                },
                h,
                value,
                bound,
                margin,
                "tightness does not match completeness".into(),
            ))
        } else {
            None
        };
        let mut row = row(h, value, bound, margin);
        row.equality = tight;
        Ok(Outcome {
            row,
            failure: fail,
            equality: tight && complete,
            stats: SolverStats::default(),
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfRow {
    pub m: usize,
    pub s: f64,
    /// Lagrangian of the first `m` r-sets in colex order.
    pub mu: f64,
    /// `m / s^r`.
    pub bound: f64,
    pub margin: f64,
    pub principal: bool,
    pub equality: bool,
    pub converged: bool,
    pub residual: f64,
}

/// Lagrangian of each colex prefix `m = 1..=m_max` against `m / s^r`.
pub fn frankl_furedi_compare(r: usize, m_max: usize, cfg: &VerifyConfig) -> Result<Vec<FfRow>> {
    if r < 2 {
        return Err(Error::InvalidArgument("r must be >= 2".into()));
    }
    (1..=m_max)
        .into_par_iter()
        .map(|m| {
            let h = Hypergraph::colex_prefix(m, r)?;
            let ctx = BoundContext::new(r, m as f64, 1.0)?;
            let sol = solve_rho(&h, 1.0, &cfg.solver)?;
            let mu = sol.rho / r as f64;
            let bound = m as f64 / ctx.s.powi(r as i32);
            let margin = bound - mu;
            Ok(FfRow {
                m,
                s: ctx.s,
                mu,
                bound,
                margin,
                principal: ctx.s.fract() == 0.0,
                equality: margin.abs() <= cfg.tol_eq / r as f64,
                converged: sol.converged,
                residual: sol.residual,
            })
        })
        .collect()
}

/// [`frankl_furedi_compare`] as a report: `mu <= bound`, with equality
/// exactly at principal `m = C(s, r)`.
pub fn frankl_furedi_report(r: usize, m_max: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let table = frankl_furedi_compare(r, m_max, cfg)?;
    let mut report = VerificationReport {
        claim: Claim::FranklFuredi.name().into(),
        params: ReportParams {
            r,
            p: Some(1.0),
            m_max: Some(m_max),
            n_max: None,
            s_max: None,
            seed: cfg.solver.seed,
        },
        instances: 0,
        passes: 0,
        failures: Vec::new(),
        equality_cases: Vec::new(),
        solver: SolverStats::default(),
        rows: Vec::new(),
        wall_time_secs: 0.0,
    };
    for t in table {
        let h = Hypergraph::colex_prefix(t.m, r)?;
        report.instances += 1;
        report.solver.solves += 1;
        if t.converged {
            report.solver.max_residual = report.solver.max_residual.max(t.residual);
        } else {
            report.solver.nonconverged += 1;
        }
        let fail = if t.margin < -cfg.tol_outer {
            Some((FailureKind::BoundViolated, "colex Lagrangian exceeds m/s^r"))
        } else if t.equality && !t.principal {
            Some((FailureKind::SpuriousEquality, "equality at non-principal m"))
        } else if t.principal && !t.equality {
            Some((FailureKind::MissingEquality, "principal m misses equality"))
        } else if !t.converged {
            Some((FailureKind::NonConverged, "solver did not converge"))
        } else {
            None
        };
        match fail {
            Some((kind, msg)) => report
                .failures
                .push(failure(kind, &h, t.mu, t.bound, t.margin, msg.into())),
            None => report.passes += 1,
        }
        if t.equality && t.principal {
            report.equality_cases.push(h.clone());
        }
        let mut row = row(&h, t.mu, t.bound, t.margin);
        row.equality = t.equality;
        row.converged = t.converged;
        row.residual = t.residual;
        report.rows.push(row);
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Exact part of the Stanley check: `sqrt(1 + 8 C(s,2)) = 2s - 1` in integers.
pub fn stanley_exact(s: u64) -> bool {
    let m = s * (s - 1) / 2;
    let disc = 1 + 8 * m;
    let root = disc.isqrt();
    root * root == disc && (root - 1) / 2 == s - 1 && (root - 1).is_multiple_of(2)
}

/// `rho_2(K_s + 2 isolated vertices) = (sqrt(1 + 8m) - 1) / 2 = s - 1` for
/// `s = 2..=s_max`.
pub fn stanley_check(s_max: usize, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if s_max < 2 {
        return Err(Error::InvalidArgument("s_max must be >= 2".into()));
    }
    let corpus = (2..=s_max)
        .map(|s| Ok(Hypergraph::complete(s, 2)?.with_isolated(2)))
        .collect::<Result<Vec<_>>>()?;
    let params = ReportParams {
        r: 2,
        p: Some(2.0),
        m_max: None,
        n_max: None,
        s_max: Some(s_max),
        seed: cfg.solver.seed,
    };
    const STANLEY_TOL: f64 = 1e-8;
    run_instances(Claim::Stanley, params, &corpus, None, |h| {
        let s = h.non_isolated().len();
        let m = h.m() as f64;
        let bound = ((1.0 + 8.0 * m).sqrt() - 1.0) / 2.0;
        let sol = solve_rho(h, 2.0, &cfg.solver)?;
        let mut stats = SolverStats::default();
        stats.record(&sol);
        let margin = bound - sol.rho;
        let fail = if margin.abs() > STANLEY_TOL || (sol.rho - (s - 1) as f64).abs() > STANLEY_TOL {
            Some(failure(
                FailureKind::MissingEquality,
                h,
                sol.rho,
                bound,
                margin,
                format!("rho_2(K_{s}) should equal {}", s - 1),
            ))
        } else if !stanley_exact(s as u64) {
            Some(failure(
                FailureKind::MissingEquality,
                h,
                sol.rho,
                bound,
                margin,
                "integer identity failed".into(),
            ))
        } else if !sol.converged {
            Some(failure(
                FailureKind::NonConverged,
                h,
                sol.rho,
                bound,
                margin,
                format!("eigen-equation residual {}", sol.residual),
            ))
        } else {
            None
        };
        let mut row = row(h, sol.rho, bound, margin);
        row.equality = fail.is_none();
        row.converged = sol.converged;
        row.residual = sol.residual;
        Ok(Outcome {
            equality: fail.is_none(),
            row,
            failure: fail,
            stats,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            solver: SolverConfig {
                restarts: 12,
                ..SolverConfig::default()
            },
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn graph_bound_examples() {
        let rep = verify_bound(2, 1.0, 3, 6, &quick()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.instances, rep.passes);
        // single edge (m = 1 = C(2,2)) and triangle (m = 3 = C(3,2))
        assert_eq!(rep.equality_cases.len(), 2);
        assert!(rep.equality_cases.contains(&Hypergraph::complete(3, 2).unwrap()));

        let rep = verify_bound(2, 2.0, 3, 6, &quick()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let p4 = rep.rows.iter().find(|r| r.edges == "1 2;1 3;2 4" || r.edges == "1 2;2 3;3 4");
        if let Some(row) = p4 {
            assert_relative_eq!(row.value, (1.0 + 5f64.sqrt()) / 2.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn k4_3_is_the_equality_case_at_four_edges() {
        let rep = verify_bound(3, 1.0, 4, 6, &quick()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let at4: Vec<_> = rep.equality_cases.iter().filter(|h| h.m() == 4).collect();
        assert_eq!(at4.len(), 1);
        assert!(at4[0].is_isomorphic(&Hypergraph::complete(4, 3).unwrap()).unwrap());
        let row = rep.rows.iter().find(|r| r.equality && r.m == 4).unwrap();
        assert_relative_eq!(row.bound, 0.1875, max_relative = 1e-12);
    }

    #[test]
    fn degree_lemma_examples() {
        let cfg = quick();
        let h = Hypergraph::new(4, 2, vec![vec![1, 2], vec![3, 4]]).unwrap();
        let out = degree_instance(&h, &cfg).unwrap();
        assert!(out.failure.is_none());
        let sol = solve_rho(&h, 1.0, &cfg.solver).unwrap();
        let trace = shift_chain(&h, top_vertex(&sol.vector.entries), &sol.vector.entries).unwrap();
        assert!(trace.terminated);
        assert_eq!(trace.shifts, 1);

        for (s, r, d) in [(4, 2, 3.0), (4, 3, 3.0)] {
            let k = Hypergraph::complete(s, r).unwrap();
            let out = degree_instance(&k, &cfg).unwrap();
            assert!(out.failure.is_none());
            assert_relative_eq!(out.row.value, d);
            assert_relative_eq!(out.row.bound, d, max_relative = 1e-12);
        }
        let rep = verify_degree_lemma(3, 4, 6, &cfg).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn top_vertex_ties_go_to_least_index() {
        assert_eq!(top_vertex(&[0.2, 0.4, 0.4 + 1e-12]), 2);
        assert_eq!(top_vertex(&[0.5, 0.1]), 1);
    }

    #[test]
    fn shadow_examples() {
        let rep = verify_shadow_bound(3, 4, 6, &quick()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let k43 = rep.rows.iter().find(|r| r.equality && r.m == 4).unwrap();
        assert_eq!(k43.value, 6.0);
        let single = rep.rows.iter().find(|r| r.m == 1).unwrap();
        assert_eq!((single.value, single.bound), (3.0, 3.0));
        let disjoint = rep.rows.iter().find(|r| r.m == 2 && r.n == 6).unwrap();
        assert_eq!(disjoint.value, 6.0);
        assert_relative_eq!(disjoint.bound, 4.181646928298625, max_relative = 1e-12);
    }

    #[test]
    fn frankl_furedi_examples() {
        let cfg = quick();
        let t = frankl_furedi_compare(3, 10, &cfg).unwrap();
        assert_relative_eq!(t[9].mu, 0.08, max_relative = 1e-9);
        assert!(t[9].principal && t[9].equality);
        assert_relative_eq!(t[0].mu, 1.0 / 27.0, max_relative = 1e-9);
        assert_relative_eq!(t[0].bound, 1.0 / 27.0, max_relative = 1e-12);

        let t = frankl_furedi_compare(2, 4, &cfg).unwrap();
        assert_relative_eq!(t[3].mu, 1.0 / 3.0, max_relative = 1e-9);
        let s = (1.0 + 33f64.sqrt()) / 2.0;
        assert_relative_eq!(t[3].bound, 4.0 / (s * s), max_relative = 1e-12);
        assert!(!t[3].equality);

        assert!(frankl_furedi_report(3, 10, &cfg).unwrap().passed());
    }

    #[test]
    fn stanley_examples() {
        let rep = stanley_check(8, &quick()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.instances, 7);
        assert_relative_eq!(rep.rows[2].bound, 3.0);
        assert_relative_eq!(rep.rows[6].bound, 7.0);
        assert!((2..=1000).all(stanley_exact));
    }

    #[test]
    fn report_serialization_is_stable() {
        let a = verify_bound(2, 1.0, 2, 4, &quick()).unwrap();
        let b = verify_bound(2, 1.0, 2, 4, &quick()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(!a.to_json().contains("wall_time"));
        let csv = a.to_csv();
        assert_eq!(csv.lines().count(), a.instances + 1);
    }

    #[test]
    fn claim_names_round_trip() {
        for c in [Claim::RhoBound, Claim::Degree, Claim::Shadow, Claim::Stanley, Claim::FranklFuredi] {
            assert_eq!(Claim::parse(c.name()), Some(c));
        }
        assert_eq!(Claim::parse("nope"), None);
    }
}
