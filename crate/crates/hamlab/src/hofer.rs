//! Hofer norms and their positive and negative parts.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::field::Hamiltonian;
use crate::space::{sphere_radius, Factor, PhaseSpace};
use crate::HamError;

/// How `min H_t` and `max H_t` are located: a dense grid over a parameter
/// chart of the space, then pattern search from the best grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    /// Sampling box for every euclidean coordinate. Required when the space
    /// has a euclidean factor.
    pub bounds: Option<(f64, f64)>,
    /// Approximate number of spatial grid points.
    pub points: usize,
    /// Number of Simpson intervals in time; rounded up to an even number.
    pub time_intervals: usize,
    /// Candidates refined per extremum; 0 disables refinement.
    pub refine: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { bounds: None, points: 20_000, time_intervals: 32, refine: 3 }
    }
}

impl Sampler {
    pub fn with_box(lo: f64, hi: f64) -> Self {
        Sampler { bounds: Some((lo, hi)), ..Sampler::default() }
    }

    pub fn points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn time_intervals(mut self, n: usize) -> Self {
        self.time_intervals = n;
        self
    }

    pub fn refine(mut self, candidates: usize) -> Self {
        self.refine = candidates;
        self
    }

    /// Simpson nodes and weights on `[0, 1]`; symmetric under `t ↦ 1 − t`.
    pub fn time_nodes(&self) -> Vec<(f64, f64)> {
        simpson(self.time_intervals)
    }
}

/// Composite Simpson rule on `[0, 1]` with `n` (even) intervals.
pub fn simpson(n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2).div_ceil(2) * 2;
    let h = 1.0 / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (i as f64 / n as f64, w * h / 3.0)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    lo: f64,
    hi: f64,
    periodic: bool,
}

/// Parameterization of the sampled region by a box.
struct Chart {
    space: PhaseSpace,
    axes: Vec<Axis>,
}

impl Chart {
    fn new(space: &PhaseSpace, bounds: Option<(f64, f64)>) -> Result<Chart, HamError> {
        let mut axes = Vec::new();
        for f in space.factors() {
            match f {
                Factor::Euclidean { n } => {
                    let (lo, hi) = bounds.ok_or(HamError::UnboundedDomain)?;
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(HamError::Invalid(format!("sampling box [{lo}, {hi}] is empty or unbounded")));
                    }
                    axes.extend(std::iter::repeat_n(Axis { lo, hi, periodic: false }, 2 * n));
                }
                Factor::Sphere { area } => {
                    let r = sphere_radius(*area);
                    axes.push(Axis { lo: -r, hi: r, periodic: false });
                    axes.push(Axis { lo: 0.0, hi: 2.0 * PI, periodic: true });
                }
            }
        }
        Ok(Chart { space: space.clone(), axes })
    }

    fn point(&self, p: &[f64], out: &mut [f64]) {
        let mut a = 0;
        for (k, f) in self.space.factors().iter().enumerate() {
            let o = self.space.offset(k);
            match f {
                Factor::Euclidean { n } => {
                    out[o..o + 2 * n].copy_from_slice(&p[a..a + 2 * n]);
                    a += 2 * n;
                }
                Factor::Sphere { area } => {
                    let r = sphere_radius(*area);
                    let z = p[a].clamp(-r, r);
                    let rho = (r * r - z * z).max(0.0).sqrt();
                    out[o] = rho * p[a + 1].cos();
                    out[o + 1] = rho * p[a + 1].sin();
                    out[o + 2] = z;
                    a += 2;
                }
            }
        }
    }

    fn grid(&self, budget: usize) -> Vec<Vec<f64>> {
        let d = self.axes.len();
        let per_axis = ((budget.max(1) as f64).powf(1.0 / d as f64).floor() as usize).max(3);
        let ticks: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|ax| {
                if ax.periodic {
                    (0..per_axis).map(|i| ax.lo + (ax.hi - ax.lo) * i as f64 / per_axis as f64).collect()
                } else {
                    (0..per_axis).map(|i| ax.lo + (ax.hi - ax.lo) * i as f64 / (per_axis - 1) as f64).collect()
                }
            })
            .collect();
        let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(d)];
        for tick in &ticks {
            out = out
                .into_iter()
                .flat_map(|base| {
                    tick.iter().map(move |v| {
                        let mut p = base.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn cell(&self, budget: usize) -> Vec<f64> {
        let d = self.axes.len();
        let per_axis = ((budget.max(1) as f64).powf(1.0 / d as f64).floor() as usize).max(3);
        self.axes.iter().map(|ax| (ax.hi - ax.lo) / (per_axis - 1) as f64).collect()
    }

    fn clamp(&self, p: &mut [f64]) {
        for (v, ax) in p.iter_mut().zip(&self.axes) {
            if ax.periodic {
                *v = ax.lo + (*v - ax.lo).rem_euclid(ax.hi - ax.lo);
            } else {
                *v = v.clamp(ax.lo, ax.hi);
            }
        }
    }
}

/// `min H_t` and `max H_t` over the sampled region.
pub fn extrema(h: &dyn Hamiltonian, t: f64, sampler: &Sampler) -> Result<(f64, f64), HamError> {
    let chart = Chart::new(h.space(), sampler.bounds)?;
    extrema_in(h, t, sampler, &chart)
}

fn extrema_in(h: &dyn Hamiltonian, t: f64, sampler: &Sampler, chart: &Chart) -> Result<(f64, f64), HamError> {
    let mut x = vec![0.0; h.space().dim()];
    let mut eval = |p: &[f64]| -> Result<f64, HamError> {
        chart.point(p, &mut x);
        let v = h.try_value(t, &x)?;
        if v.is_nan() {
            return Err(HamError::Invalid(format!("H is undefined at {x:?}")));
        }
        Ok(v)
    };
    let grid = chart.grid(sampler.points);
    let mut values = Vec::with_capacity(grid.len());
    for p in &grid {
        values.push(eval(p)?);
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut min = values[order[0]];
    let mut max = values[order[order.len() - 1]];
    let k = sampler.refine.min(order.len());
    if k > 0 {
        let cell = chart.cell(sampler.points);
        for &i in &order[..k] {
            min = min.min(pattern_search(&mut eval, chart, &grid[i], &cell, 1.0)?);
        }
        for &i in order.iter().rev().take(k) {
            max = max.max(pattern_search(&mut eval, chart, &grid[i], &cell, -1.0)?);
        }
    }
    Ok((min, max))
}

/// Compass search minimizing `sign · f`; returns the best value found.
fn pattern_search(
    f: &mut impl FnMut(&[f64]) -> Result<f64, HamError>,
    chart: &Chart,
    start: &[f64],
    cell: &[f64],
    sign: f64,
) -> Result<f64, HamError> {
    let mut p = start.to_vec();
    let mut best = sign * f(&p)?;
    let mut step: Vec<f64> = cell.iter().map(|c| c / 2.0).collect();
    let floor: Vec<f64> = cell.iter().map(|c| c * 1e-9).collect();
    for _ in 0..4000 {
        let mut improved = false;
        for i in 0..p.len() {
            for dir in [1.0, -1.0] {
                let mut q = p.clone();
                q[i] += dir * step[i];
                chart.clamp(&mut q);
                let v = sign * f(&q)?;
                if v < best {
                    best = v;
                    p = q;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s /= 2.0;
            }
            if step.iter().zip(&floor).all(|(s, fl)| s < fl) {
                break;
            }
        }
    }
    Ok(sign * best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoferNorms {
    /// `E⁻(H) = ∫₀¹ −min H_t dt`.
    pub e_minus: f64,
    /// `E⁺(H) = ∫₀¹ max H_t dt`.
    pub e_plus: f64,
    /// `‖H‖ = E⁻ + E⁺`.
    pub norm: f64,
}

/// Per-time extrema at the sampler's Simpson nodes.
pub fn extrema_profile(h: &dyn Hamiltonian, sampler: &Sampler) -> Result<Vec<(f64, f64, f64)>, HamError> {
    let chart = Chart::new(h.space(), sampler.bounds)?;
    let nodes = sampler.time_nodes();
    if h.autonomous() {
        let (lo, hi) = extrema_in(h, 0.0, sampler, &chart)?;
        return Ok(nodes.iter().map(|(t, _)| (*t, lo, hi)).collect());
    }
    nodes
        .par_iter()
        .map(|(t, _)| extrema_in(h, *t, sampler, &chart).map(|(lo, hi)| (*t, lo, hi)))
        .collect()
}

pub fn hofer_norms(h: &dyn Hamiltonian, sampler: &Sampler) -> Result<HoferNorms, HamError> {
    let profile = extrema_profile(h, sampler)?;
    let weights = sampler.time_nodes();
    let mut e_minus = 0.0;
    let mut e_plus = 0.0;
    for ((_, lo, hi), (_, w)) in profile.iter().zip(&weights) {
        e_minus -= w * lo;
        e_plus += w * hi;
    }
    Ok(HoferNorms { e_minus, e_plus, norm: e_minus + e_plus })
}
