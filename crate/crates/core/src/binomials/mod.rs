//! The generalized binomial `p_r(x) = x(x-1)…(x-r+1)/r!`, its inverse on
//! `[r-1, ∞)`, the `rm / s^{r/p}` bound, and the auxiliary functions
//!
//! * `A(x) = x / t^{r-1}` with `x = p_{r-1}(t)`,
//! * `B(x) = (m - x) / u^r` with `m - x = p_r(u)`,
//! * `F(x) = (A - rB) A' + (r - 1) A B'`,
//! * `h(x) = (r-1)^{r-1} A^r / (r^{r-1} (A - B)^{r-1})`,
//!
//! defined on `[d0, m]` for `m = p_r(s)` and `d0 = p_{r-1}(s - 1) = rm/s`.

mod lemmas;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lemmas::{
    check_lemma, GridLocation, LemmaGrid, LemmaId, LemmaReport, DERIVATIVE_RTOL, H_IDENTITY_RTOL,
};

fn factorial(r: usize) -> f64 {
    (1..=r).map(|i| i as f64).product()
}

/// `x(x-1)…(x-r+1) / r!`.
pub fn p_r(x: f64, r: usize) -> f64 {
    (0..r).map(|i| x - i as f64).product::<f64>() / factorial(r)
}

/// Derivative of [`p_r`] in `x`.
pub fn p_r_derivative(x: f64, r: usize) -> f64 {
    let mut total = 0.0;
    for skip in 0..r {
        total += (0..r)
            .filter(|&i| i != skip)
            .map(|i| x - i as f64)
            .product::<f64>();
    }
    total / factorial(r)
}

/// The unique `s >= r - 1` with `p_r(s) = m`.
///
/// Newton's method from `r m^{1/r}` (clamped into the domain). `p_r` is
/// increasing and convex on `[r-1, ∞)` with `p_r'(r-1) = 1/r`, so after at
/// most one overshoot the iterates decrease monotonically to the root.
/// Bisection takes over if Newton fails to reach the residual target.
pub fn p_r_inverse(m: f64, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be >= 1".into()));
    }
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("p_r_inverse needs m >= 0, got {m}")));
    }
    let floor = (r - 1) as f64;
    if m == 0.0 {
        return Ok(floor);
    }
    if r == 1 {
        return Ok(m);
    }
    let target = 1e-12 * m.max(1.0);

    let mut s = (r as f64 * m.powf(1.0 / r as f64)).max(floor + 1e-9);
    for _ in 0..200 {
        let step = (p_r(s, r) - m) / p_r_derivative(s, r);
        let next = (s - step).max(floor);
        if (next - s).abs() <= 1e-15 * s {
            s = next;
            break;
        }
        s = next;
    }
    if (p_r(s, r) - m).abs() > target {
        s = bisect(m, r, floor, r as f64 * (1.0 + m));
    }

    let k = s.round();
    if k >= floor && p_r(k, r) == m {
        return Ok(k);
    }
    Ok(s)
}

fn bisect(m: f64, r: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p_r(mid, r) < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (p_r(lo, r) - m).abs() < (p_r(hi, r) - m).abs() {
        lo
    } else {
        hi
    }
}

/// `(r, m, s, d0, p)` with `m = p_r(s)` and `d0 = rm/s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundContext {
    pub r: usize,
    pub m: f64,
    pub s: f64,
    pub d0: f64,
    pub p: f64,
}

impl BoundContext {
    pub fn new(r: usize, m: f64, p: f64) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidArgument(format!("r must be >= 2, got {r}")));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
        }
        let s = p_r_inverse(m, r)?;
        let d0 = if m > 0.0 { r as f64 * m / s } else { 0.0 };
        Ok(BoundContext { r, m, s, d0, p })
    }

    /// Offset below `m` beyond which `B'` is not evaluated.
    pub fn endpoint_delta(&self) -> f64 {
        1e-9 * self.m.max(1.0)
    }

    fn check_domain(&self, x: f64, closed: bool) -> Result<f64> {
        if self.m <= 0.0 {
            return Err(Error::InvalidArgument("A/B functions need m > 0".into()));
        }
        let slack = 1e-12 * self.m.max(1.0);
        let hi = if closed { self.m } else { self.m - self.endpoint_delta() };
        if !(x >= self.d0 - slack && x <= hi + slack) || (!closed && x >= self.m) {
            return Err(Error::Domain {
                value: x,
                lo: self.d0,
                hi: self.m,
            });
        }
        Ok(x.clamp(self.d0.min(self.m), self.m))
    }
}

/// `r m / s^{r/p}`; zero when `m = 0`.
pub fn nikiforov_bound(ctx: &BoundContext) -> f64 {
    if ctx.m == 0.0 {
        return 0.0;
    }
    ctx.r as f64 * ctx.m / ctx.s.powf(ctx.r as f64 / ctx.p)
}

/// Shorthand for building a context and evaluating [`nikiforov_bound`].
pub fn bound_for(r: usize, m: f64, p: f64) -> Result<f64> {
    Ok(nikiforov_bound(&BoundContext::new(r, m, p)?))
}

/// `Σ_{i<k} 1/(y-i)` and `Σ_{i<k} i/(y-i)`.
pub(crate) fn harmonic_sums(y: f64, k: usize) -> (f64, f64) {
    (0..k).fold((0.0, 0.0), |(a, b), i| {
        let d = y - i as f64;
        (a + 1.0 / d, b + i as f64 / d)
    })
}

/// `g_k(y) = y / (p_k^{-1}(y))^k`.
pub fn g_value(y: f64, k: usize) -> Result<f64> {
    let u = p_r_inverse(y, k)?;
    Ok(y / u.powi(k as i32))
}

/// `g_k'(y)` in closed form, written without cancellation:
/// `Σ i/(u-i) / (u^{k+1} Σ 1/(u-i))`. At `y = 0` (so `u = k-1`) this is the
/// one-sided limit `(k-1)^{-k}`.
pub fn g_prime(y: f64, k: usize) -> Result<f64> {
    let u = p_r_inverse(y, k)?;
    Ok(g_prime_at(u, k))
}

fn g_prime_at(u: f64, k: usize) -> f64 {
    if k == 1 {
        return 0.0;
    }
    if u - (k - 1) as f64 <= 0.0 {
        return u.powi(-(k as i32));
    }
    let (inv, weighted) = harmonic_sums(u, k);
    weighted / (u.powi(k as i32 + 1) * inv)
}

/// The right-hand side of the concavity bound
/// `g_k''(y) <= -(k+1) / (u y Σ 1/(u-j)) · |g_k'(y)|`.
pub fn g_second_bound(y: f64, k: usize) -> Result<f64> {
    let u = p_r_inverse(y, k)?;
    let (inv, _) = harmonic_sums(u, k);
    Ok(-(k as f64 + 1.0) / (u * y * inv) * g_prime_at(u, k).abs())
}

/// Exact `g_k''(y)` by the chain rule, before any inequality is applied.
pub fn g_second_exact(y: f64, k: usize) -> Result<f64> {
    let u = p_r_inverse(y, k)?;
    let kf = k as f64;
    let (inv, _) = harmonic_sums(u, k);
    let sq: f64 = (0..k).map(|j| j as f64 / (u - j as f64).powi(2)).sum();
    let lead = -kf / (u.powi(k as i32 + 1) * y * inv);
    Ok(lead * (1.0 - kf / (u * inv) + sq / (u * inv * inv)))
}

/// Everything known about the A/B pair at one point `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ABPoint {
    pub x: f64,
    /// `p_{r-1}^{-1}(x)`
    pub t: f64,
    /// `p_r^{-1}(m - x)`
    pub u: f64,
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub b1: f64,
    pub f: f64,
    pub h: f64,
    /// Where `A(1-y)^{r-1}` meets `rB(1-y)^r/(1-ry)` as functions of `y`.
    pub crossing: f64,
}

/// Evaluates `A, B, A', B', F, h` at `x ∈ [d0, m]`.
///
/// For `r = 2` the A-side degenerates: `t = x`, `A = 1`, `A' = 0`. At
/// `x = m`, `u = r - 1` and `B = 0`; `B'` takes its one-sided limit
/// `-(r-1)^{-r}`.
#[allow(non_snake_case)]
pub fn eval_AB(ctx: &BoundContext, x: f64) -> Result<ABPoint> {
    let x = ctx.check_domain(x, true)?;
    let r = ctx.r;
    let rf = r as f64;
    let t = p_r_inverse(x, r - 1)?;
    let rest = (ctx.m - x).max(0.0);
    let u = p_r_inverse(rest, r)?;
    let a = x / t.powi(r as i32 - 1);
    let b = rest / u.powi(r as i32);
    let a1 = g_prime_at(t, r - 1);
    let b1 = -g_prime_at(u, r);
    let f = (a - rf * b) * a1 + (rf - 1.0) * a * b1;
    let h = h_from(a, b, r);
    let crossing = (a - rf * b) / (rf * a - rf * b);
    Ok(ABPoint {
        x,
        t,
        u,
        a,
        b,
        a1,
        b1,
        f,
        h,
        crossing,
    })
}

fn h_from(a: f64, b: f64, r: usize) -> f64 {
    let rf = r as f64;
    let k = r as i32 - 1;
    (rf - 1.0).powi(k) * a.powi(r as i32) / (rf.powi(k) * (a - b).powi(k))
}

/// `F(x)` on `[d0, m)`.
#[allow(non_snake_case)]
pub fn eval_F(ctx: &BoundContext, x: f64) -> Result<f64> {
    ctx.check_domain(x, false)?;
    Ok(eval_AB(ctx, x)?.f)
}

/// `h(x)` on `[d0, m]`.
pub fn eval_h(ctx: &BoundContext, x: f64) -> Result<f64> {
    let pt = eval_AB(ctx, x)?;
    if !(pt.a > pt.b) {
        return Err(Error::Numerical(format!(
            "A ({}) <= B ({}) at x = {x}",
            pt.a, pt.b
        )));
    }
    Ok(pt.h)
}

/// The crossing point `(A - rB) / (rA - rB)` at `x`.
pub fn crossing_point(ctx: &BoundContext, x: f64) -> Result<f64> {
    Ok(eval_AB(ctx, x)?.crossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn p_r_examples() {
        assert_eq!(p_r(4.0, 2), 6.0);
        assert_eq!(p_r(4.0, 3), 4.0);
        assert_relative_eq!(p_r(3.5, 3), 2.1875, max_relative = 1e-15);
        for n in 0..12u64 {
            for r in 1..6usize {
                let exact = crate::hypergraph::binomial(n, r as u64).unwrap() as f64;
                assert_eq!(p_r(n as f64, r), exact);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p_r_inverse(6.0, 2).unwrap(), 4.0);
        assert_eq!(p_r_inverse(0.0, 3).unwrap(), 2.0);
        assert_relative_eq!(p_r_inverse(2.1875, 3).unwrap(), 3.5, max_relative = 1e-13);
        assert_eq!(p_r_inverse(10.0, 3).unwrap(), 5.0);
        assert!(p_r_inverse(-1.0, 3).is_err());
        assert!(p_r_inverse(f64::NAN, 3).is_err());
        // mpmath bisection oracle, 40 digits
        assert_relative_eq!(
            p_r_inverse(2.0, 3).unwrap(),
            3.434841368216901,
            max_relative = 1e-14
        );
    }

    #[test]
    fn bound_examples() {
        let b = |r, m, p| bound_for(r, m, p).unwrap();
        assert_relative_eq!(b(2, 3.0, 2.0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(b(2, 6.0, 1.0), 0.75, max_relative = 1e-15);
        assert_relative_eq!(b(3, 4.0, 1.0), 0.1875, max_relative = 1e-15);
        assert_eq!(b(3, 0.0, 1.0), 0.0);
        // r = p = 2 reduces to (sqrt(8m+1) - 1)/2
        for m in [1.0, 2.0, 5.0, 17.0, 100.0] {
            assert_relative_eq!(b(2, m, 2.0), ((8.0 * m + 1.0f64).sqrt() - 1.0) / 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn context_identities() {
        let ctx = BoundContext::new(3, 10.0, 1.0).unwrap();
        assert_eq!(ctx.s, 5.0);
        assert_eq!(ctx.d0, 6.0);
        let z = BoundContext::new(4, 0.0, 1.0).unwrap();
        assert_eq!((z.s, z.d0), (3.0, 0.0));
        assert!(BoundContext::new(1, 3.0, 1.0).is_err());
        assert!(BoundContext::new(3, 3.0, 0.5).is_err());
    }

    #[test]
    fn ab_at_d0_closed_forms() {
        let ctx = BoundContext::new(3, 10.0, 1.0).unwrap();
        let pt = eval_AB(&ctx, 6.0).unwrap();
        assert_relative_eq!(pt.t, 4.0, max_relative = 1e-14);
        assert_relative_eq!(pt.u, 4.0, max_relative = 1e-14);
        assert_relative_eq!(pt.a, 0.375, max_relative = 1e-14);
        assert_relative_eq!(pt.b, 0.0625, max_relative = 1e-14);
        // mpmath numerical differentiation of A and B
        assert_relative_eq!(pt.a1, 0.008928571428571428, max_relative = 1e-12);
        assert_relative_eq!(pt.b1, -0.004807692307692308, max_relative = 1e-12);
        assert_relative_eq!(pt.f, -0.001931662087912088, max_relative = 1e-12);
        assert_relative_eq!(pt.h, 0.24, max_relative = 1e-13);
        assert_relative_eq!(pt.crossing, 0.2, max_relative = 1e-13);
    }

    #[test]
    fn ab_interior_point() {
        let ctx = BoundContext::new(3, 10.0, 1.0).unwrap();
        let pt = eval_AB(&ctx, 7.0).unwrap();
        assert_relative_eq!(pt.t, (1.0 + 57f64.sqrt()) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(pt.u, 3.747836837169624, max_relative = 1e-13);
        assert_relative_eq!(pt.a, 0.3830386707987366, max_relative = 1e-13);
        assert_relative_eq!(pt.b, 0.05698745052020035, max_relative = 1e-13);
        assert_relative_eq!(pt.a1, 0.007247815906858742, max_relative = 1e-11);
        assert_relative_eq!(pt.b1, -0.006354957097922418, max_relative = 1e-11);
        assert_relative_eq!(pt.f, -0.003331298519500188, max_relative = 1e-11);
        assert_relative_eq!(pt.h, 0.2349490465811659, max_relative = 1e-12);
        assert!(eval_h(&ctx, 7.0).unwrap() < eval_h(&ctx, 6.0).unwrap());
        // -u^3 B' vs t^2 A', both sides from the mpmath oracle
        let lhs = -pt.u.powi(3) * pt.b1;
        let rhs = pt.t.powi(2) * pt.a1;
        assert_relative_eq!(lhs, 0.3345450817633845, max_relative = 1e-11);
        assert_relative_eq!(rhs, 0.1324532357065044, max_relative = 1e-11);
    }

    #[test]
    fn ab_endpoint_and_r2() {
        let ctx = BoundContext::new(2, 3.0, 1.0).unwrap();
        let end = eval_AB(&ctx, 3.0).unwrap();
        assert_eq!(end.b, 0.0);
        assert_eq!(end.u, 1.0);
        let pt = eval_AB(&ctx, ctx.d0).unwrap();
        assert_eq!(pt.a, 1.0);
        assert_eq!(pt.a1, 0.0);
        assert_relative_eq!(pt.b, 0.25, max_relative = 1e-14);
        assert_relative_eq!(pt.b1, -1.0 / 12.0, max_relative = 1e-13);
        assert_relative_eq!(eval_F(&ctx, ctx.d0).unwrap(), -1.0 / 12.0, max_relative = 1e-13);
        assert!(eval_F(&ctx, 3.0).is_err());
        assert!(eval_AB(&ctx, 1.0).is_err());
        assert!(eval_AB(&ctx, 3.5).is_err());
    }

    #[test]
    fn h_at_d0_matches_bound() {
        for r in 2..=8 {
            for s in r..=20 {
                let m = crate::hypergraph::binomial(s as u64, r as u64).unwrap() as f64;
                let ctx = BoundContext::new(r, m, 1.0).unwrap();
                let h = eval_h(&ctx, ctx.d0).unwrap();
                let target = r as f64 * m / (s as f64).powi(r as i32);
                assert_relative_eq!(h, target, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn exact_second_derivative_matches_finite_difference() {
        for k in 2..=6 {
            for y in [0.3, 2.0, 17.0, 400.0] {
                let h = 1e-3 * y;
                let g = |z: f64| g_value(z, k).unwrap();
                let fd = (-g(y + 2.0 * h) + 16.0 * g(y + h) - 30.0 * g(y) + 16.0 * g(y - h)
                    - g(y - 2.0 * h))
                    / (12.0 * h * h);
                let exact = g_second_exact(y, k).unwrap();
                assert_relative_eq!(fd, exact, max_relative = 1e-5);
                assert!(exact <= g_second_bound(y, k).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_round_trip(m in 0.0f64..1e9, r in 2usize..=10) {
            let s = p_r_inverse(m, r).unwrap();
            prop_assert!(s >= (r - 1) as f64);
            prop_assert!((p_r(s, r) - m).abs() <= 1e-12 * m.max(1.0));
        }

        #[test]
        fn inverse_monotone(a in 0.0f64..1e6, d in 1e-6f64..1e3, r in 2usize..=10) {
            prop_assert!(p_r_inverse(a + d, r).unwrap() > p_r_inverse(a, r).unwrap());
        }
    }
}
