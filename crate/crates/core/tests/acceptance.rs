//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use hyperlag::binomials::{check_lemma, LemmaGrid, LemmaId};
use hyperlag::extremal::{
    stanley_check, stanley_exact, verify_bound, verify_degree_lemma, verify_shadow_bound, SolverStats,
    VerificationReport, VerifyConfig,
};
use hyperlag::hypergraph::{enumerate_up_to, DEFAULT_BUDGET};
use hyperlag::spectral::{clique_number, power_mean_curve, rho_brute, solve_rho, BruteConfig};
use hyperlag::Hypergraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_OUTER: f64 = 1e-7;
const TOL_EQ: f64 = 1e-5;
const MS_TOL: f64 = 1e-6;
const STANLEY_TOL: f64 = 1e-8;
const DERIV_RTOL: f64 = 1e-5;
const H_RTOL: f64 = 1e-10;
const MONOTONE_SLACK: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
const ORACLE_TOL: f64 = 1e-3;

struct Ledger {
    failed: Vec<usize>,
    stats: SolverStats,
}

impl Ledger {
    fn report(&mut self, id: usize, ok: bool, detail: String) {
        println!("criterion {id:>2}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id);
        }
    }

    fn absorb(&mut self, rep: &VerificationReport) {
        self.stats.solves += rep.solver.solves;
        self.stats.nonconverged += rep.solver.nonconverged;
        self.stats.max_residual = self.stats.max_residual.max(rep.solver.max_residual);
        self.stats.oracle_checked += rep.solver.oracle_checked;
        self.stats.oracle_max_diff = self.stats.oracle_max_diff.max(rep.solver.oracle_max_diff);
    }
}

fn summary(rep: &VerificationReport) -> String {
    format!(
        "{} instances, {} failures, {} equality cases, {:.1}s",
        rep.instances,
        rep.failures.len(),
        rep.equality_cases.len(),
        rep.wall_time_secs
    )
}

fn canonical_set(hs: &[Hypergraph]) -> BTreeSet<String> {
    hs.iter().map(|h| h.canonical().unwrap().to_json()).collect()
}

fn main() {
    let cfg = VerifyConfig::default();
    assert_eq!((cfg.tol_outer, cfg.tol_eq), (TOL_OUTER, TOL_EQ));
    let mut ledger = Ledger {
        failed: Vec::new(),
        stats: SolverStats::default(),
    };

    // 1: p = 1, r = 3, m <= 6, n <= 7
    let t = Instant::now();
    let rep = verify_bound(3, 1.0, 6, 7, &cfg).expect("theorem 1 run");
    ledger.absorb(&rep);
    let expected = canonical_set(&[Hypergraph::complete(3, 3).unwrap(), Hypergraph::complete(4, 3).unwrap()]);
    let got = canonical_set(&rep.equality_cases);
    let ok = rep.passed() && got == expected && t.elapsed().as_secs() < 600;
    ledger.report(
        1,
        ok,
        format!("{}; equality cases are K_3^3 and K_4^3: {}", summary(&rep), got == expected),
    );

    // 2: p in {1, 1.5, 2, 3}
    let mut ok = rep.passed();
    let mut parts = vec![format!("p=1: {} failures", rep.failures.len())];
    for p in [1.5, 2.0, 3.0] {
        let rep = verify_bound(3, p, 6, 7, &cfg).expect("theorem 2 run");
        ledger.absorb(&rep);
        ok &= rep.passed();
        parts.push(format!("p={p}: {} failures", rep.failures.len()));
    }
    ledger.report(2, ok, parts.join(", "));

    // 3: Motzkin-Straus over all graphs on <= 7 vertices
    let t = Instant::now();
    let graphs = enumerate_up_to(2, 21, 7, DEFAULT_BUDGET).expect("graph corpus");
    let brute = BruteConfig::default();
    let mut worst = 0.0f64;
    let mut bad = 0;
    for g in &graphs {
        let sol = solve_rho(g, 1.0, &cfg.solver).unwrap();
        let omega = clique_number(g).unwrap() as f64;
        let err = (sol.rho - (1.0 - 1.0 / omega)).abs();
        worst = worst.max(err);
        if err > MS_TOL {
            bad += 1;
        }
        track(&mut ledger.stats, g, 1.0, &sol, &brute);
    }
    let secs = t.elapsed().as_secs_f64();
    ledger.report(
        3,
        bad == 0 && secs < 300.0,
        format!("{} graphs, {bad} failures, max |rho_1 - (1 - 1/w)| = {worst:.2e}, {secs:.1}s", graphs.len()),
    );

    // 4: Stanley
    let rep = stanley_check(8, &cfg).expect("stanley run");
    ledger.absorb(&rep);
    let worst = rep.rows.iter().map(|r| r.margin.abs()).fold(0.0, f64::max);
    let exact = (2..=8).all(stanley_exact);
    ledger.report(
        4,
        rep.passed() && exact && worst <= STANLEY_TOL,
        format!("s = 2..8, max |rho_2 - bound| = {worst:.2e}, integer identity holds: {exact}"),
    );

    // 5: F < 0 on the default grid
    let grid = LemmaGrid::default();
    let t = Instant::now();
    let rep = check_lemma(&grid, LemmaId::Four).unwrap();
    let secs = t.elapsed().as_secs_f64();
    ledger.report(
        5,
        rep.passed() && rep.worst_margin > 0.0 && secs < 60.0,
        format!(
            "{} points, {} failures, worst margin {:.3e}, {secs:.1}s",
            rep.points_checked, rep.failures, rep.worst_margin
        ),
    );

    // 6: derivative identities and the one-sided second-derivative bound
    let one = check_lemma(&grid, LemmaId::One).unwrap();
    let der = check_lemma(&grid, LemmaId::Derivatives).unwrap();
    assert_eq!(hyperlag::binomials::DERIVATIVE_RTOL, DERIV_RTOL);
    ledger.report(
        6,
        one.passed() && der.passed(),
        format!(
            "g'/g'': {} checks, {} failures; A'/B': {} checks, {} failures",
            one.checks_evaluated, one.failures, der.checks_evaluated, der.failures
        ),
    );

    // 7: h(d0) identity and monotonicity
    let rep = check_lemma(&grid, LemmaId::H).unwrap();
    assert_eq!(hyperlag::binomials::H_IDENTITY_RTOL, H_RTOL);
    ledger.report(
        7,
        rep.passed(),
        format!("{} checks, {} failures, worst margin {:.3e}", rep.checks_evaluated, rep.failures, rep.worst_margin),
    );

    // 8: power-mean monotonicity and the rho_1 interpolation bound
    let ps: Vec<f64> = (0..13).map(|k| 1.0 + 0.25 * k as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut bad = 0;
    for _ in 0..50 {
        let h = random_hypergraph(&mut rng);
        let curve = power_mean_curve(&h, &ps, &cfg.solver).unwrap();
        let monotone = curve
            .windows(2)
            .all(|w| w[1].transformed <= w[0].transformed + MONOTONE_SLACK);
        let rm = (h.r() * h.m()) as f64;
        let rho1 = curve[0].rho;
        let interp = curve
            .iter()
            .all(|c| c.rho <= rho1.powf(1.0 / c.p) * rm.powf(1.0 - 1.0 / c.p) + MONOTONE_SLACK);
        if !monotone || !interp {
            bad += 1;
        }
        for &p in &ps {
            let sol = solve_rho(&h, p, &cfg.solver).unwrap();
            track(&mut ledger.stats, &h, p, &sol, &brute);
        }
    }
    ledger.report(8, bad == 0, format!("50 random hypergraphs x 13 exponents, {bad} failures"));

    // 9: shadow bound
    let rep = verify_shadow_bound(3, 6, 7, &cfg).expect("shadow run");
    ledger.report(9, rep.passed(), summary(&rep));

    // 10: degree lemma
    let rep = verify_degree_lemma(3, 6, 7, &cfg).expect("degree run");
    ledger.absorb(&rep);
    ledger.report(10, rep.passed(), summary(&rep));

    // 11: certification across every solve above
    let s = &ledger.stats;
    ledger.report(
        11,
        s.nonconverged == 0 && s.max_residual <= RESIDUAL_TOL && s.oracle_max_diff <= ORACLE_TOL,
        format!(
            "{} solves, {} nonconverged, max residual {:.2e}; {} oracle checks, max |rho - rho_brute| {:.2e}",
            s.solves, s.nonconverged, s.max_residual, s.oracle_checked, s.oracle_max_diff
        ),
    );

    if ledger.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {:?}", ledger.failed);
        std::process::exit(1);
    }
}

fn track(stats: &mut SolverStats, h: &Hypergraph, p: f64, sol: &hyperlag::SpectralSolution, brute: &BruteConfig) {
    stats.solves += 1;
    if sol.converged {
        stats.max_residual = stats.max_residual.max(sol.residual);
    } else {
        stats.nonconverged += 1;
    }
    if h.non_isolated().len() <= 6 {
        let b = rho_brute(&h.strip_isolated(), p, brute).unwrap();
        stats.oracle_checked += 1;
        stats.oracle_max_diff = stats.oracle_max_diff.max((sol.rho - b.value).abs());
    }
}

fn random_hypergraph(rng: &mut ChaCha8Rng) -> Hypergraph {
    let r = rng.gen_range(2..=3);
    let n = rng.gen_range(r + 1..=7);
    let all: Vec<Vec<u32>> = Hypergraph::complete(n, r)
        .unwrap()
        .edges()
        .iter()
        .map(|e| e.vertices().to_vec())
        .collect();
    let m = rng.gen_range(1..=8.min(all.len()));
    let edges: Vec<Vec<u32>> = all.choose_multiple(rng, m).cloned().collect();
    Hypergraph::new(n, r, edges).unwrap()
}
