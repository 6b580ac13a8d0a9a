//! Grid oracle for small hypergraphs.
//!
//! Substituting `z = x^p` turns the feasible set into the simplex over the
//! non-isolated vertices. Every point `z = c / N` with integer `c >= 0`,
//! `Σ c = N` is evaluated; the grid's local maxima are then improved by
//! pattern search on successively finer lattices. The value returned is `P_H` at an actual
//! feasible point, hence a lower bound on `rho_p`.

use serde::{Deserialize, Serialize};

use super::Form;
use crate::error::{Error, Result};
use crate::hypergraph::{binomial, Hypergraph};

const MAX_MOVES: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BruteConfig {
    /// Grid denominator `N`.
    pub resolution: usize,
    /// Refinement rounds; each divides the lattice spacing by 4.
    pub rounds: usize,
    /// Most grid local maxima, by value, used as pattern-search seeds.
    pub keep: usize,
    /// Offsets per coordinate in a pattern-search move, `-window..=window`.
    pub window: i64,
    pub max_points: u64,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig {
            resolution: 12,
            rounds: 5,
            keep: 8,
            window: 1,
            max_points: 5_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteBound {
    /// `P_H(point)`; a lower bound on `rho_p`.
    pub value: f64,
    pub point: Vec<f64>,
    /// Improvement gained in the last refinement round.
    pub gap_estimate: f64,
    pub grid_points: u64,
}

pub fn rho_brute(h: &Hypergraph, p: f64, cfg: &BruteConfig) -> Result<BruteBound> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    if cfg.resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be >= 1".into()));
    }
    let n = h.n();
    if h.m() == 0 {
        return Ok(BruteBound {
            value: 0.0,
            point: vec![0.0; n],
            gap_estimate: 0.0,
            grid_points: 0,
        });
    }
    let form = Form::new(h);
    let deg = form.degrees();
    let active: Vec<usize> = (0..n).filter(|&i| deg[i] > 0).collect();
    let k = active.len();
    let points = binomial((cfg.resolution + k - 1) as u64, (k - 1) as u64).unwrap_or(u64::MAX);
    if points > cfg.max_points {
        return Err(Error::InvalidArgument(format!(
            "grid of {points} points exceeds max_points {}",
            cfg.max_points
        )));
    }

    let eval = Evaluator {
        form: &form,
        active: &active,
        inv_p: 1.0 / p,
        x: std::cell::RefCell::new(vec![0.0; n]),
    };

    let big_n = cfg.resolution as f64;
    let keep = cfg.keep.max(1);
    // seeds are the grid's discrete local maxima under single-unit transfers,
    // so every basin the lattice resolves gets refined
    let mut seeds: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut c = vec![0usize; k];
    let mut z = vec![0.0; k];
    let mut nb = vec![0usize; k];
    compositions(&mut c, 0, cfg.resolution, &mut |c| {
        let at = |c: &[usize], z: &mut Vec<f64>| {
            z.iter_mut().zip(c).for_each(|(zi, &ci)| *zi = ci as f64 / big_n);
            eval.value(z)
        };
        let v = at(c, &mut z);
        if seeds.len() == keep && v <= seeds.last().unwrap().0 {
            return;
        }
        for i in 0..k {
            if c[i] == 0 {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                nb.copy_from_slice(c);
                nb[i] -= 1;
                nb[j] += 1;
                if at(&nb, &mut z) > v {
                    return;
                }
            }
        }
        let pos = seeds.partition_point(|(b, _)| *b >= v);
        seeds.insert(pos, (v, c.to_vec()));
        seeds.truncate(keep);
    });
    let best = seeds
        .into_iter()
        .map(|(v, c)| (v, c.iter().map(|&ci| ci as f64 / big_n).collect::<Vec<f64>>()));

    let mut top = (f64::NEG_INFINITY, Vec::new(), 0.0);
    for (v0, z0) in best {
        let mut z = z0;
        let mut v = v0;
        let mut step = 1.0 / big_n;
        let mut last_gain = 0.0;
        for _ in 0..cfg.rounds {
            step /= 4.0;
            let before = v;
            pattern_search(&eval, &mut z, &mut v, step, cfg.window);
            last_gain = v - before;
        }
        if v > top.0 {
            top = (v, z, last_gain);
        }
    }

    let mut point = vec![0.0; n];
    for (&i, &zi) in active.iter().zip(&top.1) {
        point[i] = zi.powf(1.0 / p);
    }
    Ok(BruteBound {
        value: form.value(&point),
        point,
        gap_estimate: top.2,
        grid_points: points,
    })
}

struct Evaluator<'a> {
    form: &'a Form,
    active: &'a [usize],
    inv_p: f64,
    x: std::cell::RefCell<Vec<f64>>,
}

impl Evaluator<'_> {
    fn value(&self, z: &[f64]) -> f64 {
        let mut x = self.x.borrow_mut();
        for (&i, &zi) in self.active.iter().zip(z) {
            x[i] = if self.inv_p == 1.0 { zi } else { zi.max(0.0).powf(self.inv_p) };
        }
        self.form.value(&x)
    }
}

fn compositions(c: &mut [usize], i: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if i + 1 == c.len() {
        c[i] = left;
        f(c);
        return;
    }
    for v in 0..=left {
        c[i] = v;
        compositions(c, i + 1, left - v, f);
    }
}

/// Moves by `step * offset` with offsets in `{-w..w}^{k-1}` and the last
/// coordinate compensating, re-centering while the value improves.
fn pattern_search(eval: &Evaluator<'_>, z: &mut Vec<f64>, v: &mut f64, step: f64, w: i64) {
    let k = z.len();
    if k < 2 {
        return;
    }
    let mut off = vec![0i64; k - 1];
    let mut trial = vec![0.0; k];
    for _ in 0..MAX_MOVES {
        let mut best: Option<(f64, Vec<f64>)> = None;
        off.iter_mut().for_each(|o| *o = -w);
        'outer: loop {
            let sum: i64 = off.iter().sum();
            if off.iter().any(|&o| o != 0) || sum != 0 {
                let mut ok = true;
                for j in 0..k - 1 {
                    trial[j] = z[j] + step * off[j] as f64;
                    ok &= trial[j] >= -1e-15;
                }
                trial[k - 1] = z[k - 1] - step * sum as f64;
                ok &= trial[k - 1] >= -1e-15;
                if ok {
                    trial.iter_mut().for_each(|t| *t = t.max(0.0));
                    let tv = eval.value(&trial);
                    if tv > best.as_ref().map_or(*v, |b| b.0) {
                        best = Some((tv, trial.clone()));
                    }
                }
            }
            for o in off.iter_mut() {
                *o += 1;
                if *o <= w {
                    continue 'outer;
                }
                *o = -w;
            }
            break;
        }
        match best {
            Some((tv, tz)) => {
                *v = tv;
                *z = tz;
            }
            None => break,
        }
    }
}
