//! Grid checkers for the inequalities and derivative identities satisfied by
//! `g_k`, `A`, `B`, `F` and `h`.
//!
//! Every check is reduced to a signed margin that is positive when the
//! claim holds: relative gaps for inequalities, `tol - relative error` for
//! finite-difference identities. A report carries the smallest margin seen
//! and where it occurred.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{eval_AB, g_prime, g_second_bound, g_value, harmonic_sums, p_r, BoundContext};
use crate::error::{Error, Result};
use crate::hypergraph::binomial;

/// Relative tolerance for first-derivative identities against central differences.
pub const DERIVATIVE_RTOL: f64 = 1e-5;
/// Relative tolerance for the `h(d0) = rm/s^r` identity.
pub const H_IDENTITY_RTOL: f64 = 1e-10;
/// Relative slack for checks that are exact identities in real arithmetic.
pub const ROUNDING: f64 = 1e-12;
/// The bound `A >= ru/(u-r+1) B` is skipped when `u` is this close to `r-1`.
pub const U_EXCLUSION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaGrid {
    pub r_min: usize,
    pub r_max: usize,
    /// Integer `s` runs over `r..=s_max` for each `r`.
    pub s_max: usize,
    /// Sample points per `(r, s)` interval.
    pub points: usize,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        LemmaGrid {
            r_min: 2,
            r_max: 8,
            s_max: 30,
            points: 257,
        }
    }
}

impl LemmaGrid {
    fn rows(&self) -> Vec<(usize, usize)> {
        (self.r_min..=self.r_max)
            .flat_map(|r| (r..=self.s_max).map(move |s| (r, s)))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.r_min < 2 || self.r_max < self.r_min || self.s_max < self.r_min || self.points < 2 {
            return Err(Error::InvalidArgument(format!("empty lemma grid: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `g_k'` closed form, the concavity bound on `g_k''`, and the Chebyshev step.
    One,
    /// `t >= s-1 >= u`, `A - rB >= A(r-1)/u`, `A >= ru/(u-r+1) B`.
    Two,
    /// The two strict inequalities comparing the `t`- and `u`-sides.
    Three,
    /// `F < 0` and `F' < 0` on `[d0, m)`.
    Four,
    /// `A'`, `B'` closed forms and the bounds on `A''`, `B''`.
    Derivatives,
    /// `h(d0) = rm/s^r` and `h` strictly decreasing.
    H,
}

impl LemmaId {
    pub fn name(self) -> &'static str {
        match self {
            LemmaId::One => "lemma1",
            LemmaId::Two => "lemma2",
            LemmaId::Three => "lemma3",
            LemmaId::Four => "lemma4",
            LemmaId::Derivatives => "derivatives",
            LemmaId::H => "h",
        }
    }

    pub fn parse(s: &str) -> Option<LemmaId> {
        Some(match s {
            "1" | "lemma1" => LemmaId::One,
            "2" | "lemma2" => LemmaId::Two,
            "3" | "lemma3" => LemmaId::Three,
            "4" | "lemma4" => LemmaId::Four,
            "derivatives" | "d" => LemmaId::Derivatives,
            "h" => LemmaId::H,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLocation {
    pub r: usize,
    pub s: usize,
    pub x: f64,
    pub check: String,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub grid: LemmaGrid,
    pub points_checked: usize,
    pub checks_evaluated: usize,
    pub failures: usize,
    pub worst_margin: f64,
    pub worst_location: Option<GridLocation>,
    /// Points skipped because a check is undefined there.
    pub excluded: usize,
    /// First few failing locations.
    pub failure_samples: Vec<GridLocation>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.points_checked > 0
    }
}

#[derive(Default)]
struct Tally {
    points: usize,
    checks: usize,
    failures: usize,
    excluded: usize,
    worst: Option<GridLocation>,
    samples: Vec<GridLocation>,
}

const MAX_SAMPLES: usize = 20;

impl Tally {
    fn record(&mut self, r: usize, s: usize, x: f64, check: &str, margin: f64, strict: bool) {
        self.checks += 1;
        let ok = if strict { margin > 0.0 } else { margin >= 0.0 };
        let loc = || GridLocation {
            r,
            s,
            x,
            check: check.to_string(),
            margin,
        };
        if !ok || margin.is_nan() {
            self.failures += 1;
            if self.samples.len() < MAX_SAMPLES {
                self.samples.push(loc());
            }
        }
        let worse = match &self.worst {
            None => true,
            Some(w) => margin < w.margin || margin.is_nan(),
        };
        if worse {
            self.worst = Some(loc());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.points += other.points;
        self.checks += other.checks;
        self.failures += other.failures;
        self.excluded += other.excluded;
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|cur| w.margin < cur.margin) {
                self.worst = Some(w);
            }
        }
        for s in other.samples {
            if self.samples.len() < MAX_SAMPLES {
                self.samples.push(s);
            }
        }
        self
    }
}

fn rel_gap(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs) / scale
    }
}

fn identity_margin(analytic: f64, numeric: f64, floor: f64) -> f64 {
    let err = (analytic - numeric).abs() / analytic.abs().max(floor);
    DERIVATIVE_RTOL - err
}

fn central(f: impl Fn(f64) -> f64, y: f64, h: f64) -> f64 {
    (f(y + h) - f(y - h)) / (2.0 * h)
}

fn second_central(f: impl Fn(f64) -> f64, y: f64, h: f64) -> f64 {
    (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h) - f(y - 2.0 * h))
        / (12.0 * h * h)
}

fn x_samples(ctx: &BoundContext, points: usize) -> Vec<f64> {
    let hi = ctx.m - ctx.endpoint_delta();
    (0..points)
        .map(|k| ctx.d0 + (hi - ctx.d0) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Evaluates one lemma over the grid.
pub fn check_lemma(grid: &LemmaGrid, which: LemmaId) -> Result<LemmaReport> {
    grid.validate()?;
    let rows = grid.rows();
    let tallies: Vec<Result<Tally>> = rows
        .par_iter()
        .map(|&(r, s)| check_row(r, s, grid.points, which))
        .collect();
    let mut total = Tally::default();
    for t in tallies {
        total = total.merge(t?);
    }
    Ok(LemmaReport {
        lemma: which.name().to_string(),
        grid: *grid,
        points_checked: total.points,
        checks_evaluated: total.checks,
        failures: total.failures,
        worst_margin: total.worst.as_ref().map_or(f64::NAN, |w| w.margin),
        worst_location: total.worst,
        excluded: total.excluded,
        failure_samples: total.samples,
    })
}

fn check_row(r: usize, s: usize, points: usize, which: LemmaId) -> Result<Tally> {
    let m = binomial(s as u64, r as u64).expect("grid binomial fits") as f64;
    let ctx = BoundContext::new(r, m, 1.0)?;
    let mut tally = Tally::default();
    // s = r gives m = d0 = 1, so [d0, m) is empty
    if which != LemmaId::One && ctx.m - ctx.endpoint_delta() <= ctx.d0 {
        tally.excluded += points;
        return Ok(tally);
    }
    match which {
        LemmaId::One => lemma_one(r, s, points, &mut tally)?,
        LemmaId::Two => lemma_two(&ctx, s, points, &mut tally)?,
        LemmaId::Three => lemma_three(&ctx, s, points, &mut tally)?,
        LemmaId::Four => lemma_four(&ctx, s, points, &mut tally)?,
        LemmaId::Derivatives => derivatives(&ctx, s, points, &mut tally)?,
        LemmaId::H => h_function(&ctx, s, points, &mut tally)?,
    }
    Ok(tally)
}

/// Samples `u` uniformly in `(r-1, s]` and checks `g_r` at `y = p_r(u)`.
fn lemma_one(r: usize, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let lo = (r - 1) as f64;
    let span = s as f64 - lo;
    for k in 1..=points {
        let u = lo + span * k as f64 / points as f64;
        let y = p_r(u, r);
        tally.points += 1;
        let g = |z: f64| g_value(z, r).unwrap();

        let analytic = g_prime(y, r)?;
        let fd = central(g, y, 1e-6 * y);
        tally.record(r, s, y, "g' closed form", identity_margin(analytic, fd, 1e-300), false);

        let fd2 = second_central(g, y, 1e-3 * y);
        let bound = g_second_bound(y, r)?;
        tally.record(r, s, y, "g'' concavity bound", rel_gap(bound, fd2), false);

        let (inv, weighted) = harmonic_sums(u, r);
        let sq: f64 = (0..r).map(|j| j as f64 / (u - j as f64).powi(2)).sum();
        tally.record(r, s, y, "chebyshev", rel_gap(r as f64 * sq, inv * weighted), false);
    }
    Ok(())
}

fn lemma_two(ctx: &BoundContext, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let r = ctx.r;
    let rf = r as f64;
    let s1 = s as f64 - 1.0;
    for (k, &x) in x_samples(ctx, points).iter().enumerate() {
        let pt = eval_AB(ctx, x)?;
        tally.points += 1;
        if k == 0 {
            // equality at x = d0
            let eq = 1e-9 - ((pt.t - s1).abs().max((pt.u - s1).abs()) / s1);
            tally.record(r, s, x, "t = s-1 = u at d0", eq, false);
            let gap = (pt.a - rf * pt.b) - pt.a * (rf - 1.0) / pt.u;
            tally.record(r, s, x, "A-rB = A(r-1)/u at d0", 1e-10 - (gap / pt.a).abs(), false);
            continue;
        }
        tally.record(r, s, x, "t > s-1", rel_gap(pt.t, s1), true);
        tally.record(r, s, x, "s-1 > u", rel_gap(s1, pt.u), true);
        // both inequalities collapse to identities when r = 2
        let identity = r == 2;
        let ab_check = |lhs: f64, rhs: f64| {
            let gap = rel_gap(lhs, rhs);
            if identity {
                ROUNDING - gap.abs()
            } else {
                gap
            }
        };
        tally.record(
            r,
            s,
            x,
            "A-rB >= A(r-1)/u",
            ab_check(pt.a - rf * pt.b, pt.a * (rf - 1.0) / pt.u),
            !identity,
        );
        if pt.u >= rf - 1.0 + U_EXCLUSION {
            tally.record(
                r,
                s,
                x,
                "A >= ru/(u-r+1) B",
                ab_check(pt.a, rf * pt.u / (pt.u - rf + 1.0) * pt.b),
                !identity,
            );
        } else {
            tally.excluded += 1;
        }
    }
    Ok(())
}

fn lemma_three(ctx: &BoundContext, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let r = ctx.r;
    let rf = r as f64;
    for &x in &x_samples(ctx, points) {
        let pt = eval_AB(ctx, x)?;
        tally.points += 1;
        let (inv_u, _) = harmonic_sums(pt.u, r);
        let (inv_t, _) = harmonic_sums(pt.t, r - 1);
        tally.record(
            r,
            s,
            x,
            "u-side mean > t-side mean",
            rel_gap(pt.u * inv_u / rf, pt.t * inv_t / (rf - 1.0)),
            true,
        );
        tally.record(
            r,
            s,
            x,
            "-u^r B' > t^(r-1) A'",
            rel_gap(-pt.u.powi(r as i32) * pt.b1, pt.t.powi(r as i32 - 1) * pt.a1),
            true,
        );
    }
    Ok(())
}

fn lemma_four(ctx: &BoundContext, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let r = ctx.r;
    let rf = r as f64;
    let hi = ctx.m - ctx.endpoint_delta();
    let f_at = |x: f64| eval_AB(ctx, x).map(|p| p.f);
    for &x in &x_samples(ctx, points) {
        let pt = eval_AB(ctx, x)?;
        tally.points += 1;
        let scale = ((pt.a - rf * pt.b) * pt.a1).abs() + ((rf - 1.0) * pt.a * pt.b1).abs();
        tally.record(r, s, x, "F < 0", -pt.f / scale, true);

        // F' by finite differences, one-sided at the ends of the interval
        let step = 1e-4 * (hi - ctx.d0);
        let deriv = if x - step < ctx.d0 {
            (f_at(x + step)? - pt.f) / step
        } else if x + step > hi {
            (pt.f - f_at(x - step)?) / step
        } else {
            (f_at(x + step)? - f_at(x - step)?) / (2.0 * step)
        };
        let noise = 1e-12 * scale / step;
        tally.record(r, s, x, "F' < 0", -deriv / (deriv.abs() + noise), true);
    }
    Ok(())
}

fn derivatives(ctx: &BoundContext, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let r = ctx.r;
    let rf = r as f64;
    let a_of = |x: f64| g_value(x, r - 1).unwrap();
    // B(x) = g_r(m - x): differentiate in y = m - x so the step is relative to y
    let g_r = |y: f64| g_value(y, r).unwrap();
    for &x in &x_samples(ctx, points) {
        let pt = eval_AB(ctx, x)?;
        tally.points += 1;
        let y = ctx.m - x;

        let fd_a = central(a_of, x, 1e-6 * x);
        let floor = 1e-12 * pt.a / x;
        tally.record(r, s, x, "A' closed form", identity_margin(pt.a1, fd_a, floor), false);

        let fd_b = -central(g_r, y, 1e-6 * y);
        tally.record(r, s, x, "B' closed form", identity_margin(pt.b1, fd_b, 1e-300), false);

        let a2 = second_central(a_of, x, 1e-3 * x);
        let (inv_t, _) = harmonic_sums(pt.t, r - 1);
        let a2_bound = -rf / (pt.t * x * inv_t) * pt.a1.abs();
        // A is constant when r = 2, so only the non-strict form can hold there
        tally.record(r, s, x, "A'' bound", rel_gap(a2_bound, a2), r > 2);

        let b2 = second_central(g_r, y, 1e-3 * y);
        let (inv_u, _) = harmonic_sums(pt.u, r);
        let b2_bound = -(rf + 1.0) / (pt.u * y * inv_u) * pt.b1.abs();
        tally.record(r, s, x, "B'' bound", rel_gap(b2_bound, b2), true);
    }
    Ok(())
}

fn h_function(ctx: &BoundContext, s: usize, points: usize, tally: &mut Tally) -> Result<()> {
    let r = ctx.r;
    let target = r as f64 * ctx.m / (s as f64).powi(r as i32);
    let xs = x_samples(ctx, points);
    let hs: Vec<f64> = xs
        .iter()
        .map(|&x| super::eval_h(ctx, x))
        .collect::<Result<_>>()?;
    tally.points += xs.len();
    let err = (hs[0] - target).abs() / target;
    tally.record(r, s, xs[0], "h(d0) = rm/s^r", H_IDENTITY_RTOL - err, false);
    for k in 1..hs.len() {
        tally.record(r, s, xs[k], "h decreasing", rel_gap(hs[k - 1], hs[k]), true);
    }
    Ok(())
}
