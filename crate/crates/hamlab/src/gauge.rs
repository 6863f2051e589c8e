//! Gauge transformations between path spaces.
//!
//! The first transformation sends `ℓ′(t)` to `φ_H^t (φ_H^1)⁻¹ ℓ′(t)`, the
//! second to `φ_H^{1−t} (φ_H^1)⁻¹ ℓ′(t)`. Both are applied pointwise to
//! strips, one path `t ↦ w′(s, t)` at a time.

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::field::Hamiltonian;
use crate::flow::flow;
use crate::strip::GridStrip;
use crate::HamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    First,
    Second,
}

impl FromStr for Which {
    type Err = HamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" | "0" => Ok(Which::First),
            "second" | "1" => Ok(Which::Second),
            _ => Err(HamError::Parse { input: s.into(), message: "expected first or second".into() }),
        }
    }
}

impl Which {
    fn time(self, t: f64) -> f64 {
        match self {
            Which::First => t,
            Which::Second => 1.0 - t,
        }
    }
}

/// `𝔤⁺` at one point of the path, `x = ℓ′(t)`.
pub fn gauge_plus_point(h: &dyn Hamiltonian, which: Which, t: f64, x: &[f64], max_step: f64) -> Result<Vec<f64>, HamError> {
    flow(h, 1.0, which.time(t), x, max_step)
}

/// `𝔤⁻`, the inverse of [`gauge_plus_point`].
pub fn gauge_minus_point(h: &dyn Hamiltonian, which: Which, t: f64, x: &[f64], max_step: f64) -> Result<Vec<f64>, HamError> {
    flow(h, which.time(t), 1.0, x, max_step)
}

pub fn gauge_plus_path(h: &dyn Hamiltonian, which: Which, t_nodes: &[f64], path: &[Vec<f64>], max_step: f64) -> Result<Vec<Vec<f64>>, HamError> {
    t_nodes.par_iter().zip(path).map(|(t, x)| gauge_plus_point(h, which, *t, x, max_step)).collect()
}

pub fn gauge_minus_path(h: &dyn Hamiltonian, which: Which, t_nodes: &[f64], path: &[Vec<f64>], max_step: f64) -> Result<Vec<Vec<f64>>, HamError> {
    t_nodes.par_iter().zip(path).map(|(t, x)| gauge_minus_point(h, which, *t, x, max_step)).collect()
}

fn transform(w: &GridStrip, map: impl Fn(f64, &[f64]) -> Result<Vec<f64>, HamError> + Sync) -> Result<GridStrip, HamError> {
    let (ns, nt) = (w.s_nodes().len(), w.t_nodes().len());
    let cells: Vec<(usize, usize)> = (0..ns).flat_map(|i| (0..nt).map(move |j| (i, j))).collect();
    let points = cells
        .par_iter()
        .map(|&(i, j)| map(w.t_nodes()[j], w.get(i, j)))
        .collect::<Result<Vec<_>, _>>()?;
    GridStrip::new(w.space(), w.s_nodes().to_vec(), w.t_nodes().to_vec(), points.concat())
}

/// `(ℓ, w) = 𝔤⁺(ℓ′, w′)` applied to every path of the strip.
pub fn gauge_plus(h: &dyn Hamiltonian, which: Which, w: &GridStrip, max_step: f64) -> Result<GridStrip, HamError> {
    transform(w, |t, x| gauge_plus_point(h, which, t, x, max_step))
}

pub fn gauge_minus(h: &dyn Hamiltonian, which: Which, w: &GridStrip, max_step: f64) -> Result<GridStrip, HamError> {
    transform(w, |t, x| gauge_minus_point(h, which, t, x, max_step))
}
