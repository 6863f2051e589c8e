//! Strips `u(s, t)` in euclidean phase spaces, their symplectic area and
//! actions.

use crate::expr::{Expr, ExprBundle};
use crate::field::Hamiltonian;
use crate::space::PhaseSpace;
use crate::HamError;

fn require_euclidean(space: &PhaseSpace) -> Result<(), HamError> {
    if space.is_euclidean() {
        Ok(())
    } else {
        Err(HamError::SpaceMismatch(format!("strips live in euclidean spaces, not {space}")))
    }
}

/// A strip given by one expression per coordinate in the variables `s`
/// (alias `tau`) and `t`.
#[derive(Debug, Clone)]
pub struct AnalyticStrip {
    space: PhaseSpace,
    coords: Vec<Expr>,
    ds: Vec<Expr>,
    dt: Vec<Expr>,
    bundle: ExprBundle,
}

impl AnalyticStrip {
    pub fn parse(space: &PhaseSpace, sources: &[&str]) -> Result<Self, HamError> {
        require_euclidean(space)?;
        if sources.len() != space.dim() {
            return Err(HamError::Invalid(format!("{} coordinate expressions for a {}-dimensional space", sources.len(), space.dim())));
        }
        let coords = sources
            .iter()
            .map(|src| Expr::parse_with_aliases(src, &["s", "t"], &[("tau", 0)]))
            .collect::<Result<Vec<_>, _>>()?;
        let ds: Vec<Expr> = coords.iter().map(|c| c.derivative(0)).collect();
        let dt: Vec<Expr> = coords.iter().map(|c| c.derivative(1)).collect();
        let all: Vec<&Expr> = coords.iter().chain(&ds).chain(&dt).collect();
        let bundle = ExprBundle::new(&all);
        Ok(AnalyticStrip { space: space.clone(), coords, ds, dt, bundle })
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn sources(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.source().to_string()).collect()
    }

    pub fn point(&self, s: f64, t: f64, out: &mut [f64]) {
        let v = [s, t];
        for (o, c) in out.iter_mut().zip(&self.coords) {
            *o = c.eval(&v);
        }
    }

    pub fn partials(&self, s: f64, t: f64, ds: &mut [f64], dt: &mut [f64]) {
        let v = [s, t];
        for (o, c) in ds.iter_mut().zip(&self.ds) {
            *o = c.eval(&v);
        }
        for (o, c) in dt.iter_mut().zip(&self.dt) {
            *o = c.eval(&v);
        }
    }

    /// Point and both partials at once, sharing common subexpressions.
    /// `out` holds `u`, `∂ₛu`, `∂ₜu` in consecutive blocks.
    pub fn jet(&self, s: f64, t: f64, scratch: &mut Vec<f64>, out: &mut [f64]) {
        self.bundle.eval(&[s, t], scratch, out)
    }

    pub fn sample(&self, s_nodes: &[f64], t_nodes: &[f64]) -> GridStrip {
        let dim = self.space.dim();
        let mut data = vec![0.0; s_nodes.len() * t_nodes.len() * dim];
        for (i, s) in s_nodes.iter().enumerate() {
            for (j, t) in t_nodes.iter().enumerate() {
                let at = (i * t_nodes.len() + j) * dim;
                self.point(*s, *t, &mut data[at..at + dim]);
            }
        }
        GridStrip { space: self.space.clone(), s: s_nodes.to_vec(), t: t_nodes.to_vec(), data }
    }
}

/// `n + 1` equally spaced nodes on `[a, b]`.
pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Trapezoid rule for samples `f` at `nodes`.
pub fn trapezoid(nodes: &[f64], f: &[f64]) -> f64 {
    nodes.windows(2).zip(f.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// A strip sampled on a tensor grid of `(s, t)` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridStrip {
    space: PhaseSpace,
    s: Vec<f64>,
    t: Vec<f64>,
    data: Vec<f64>,
}

impl GridStrip {
    pub fn new(space: &PhaseSpace, s: Vec<f64>, t: Vec<f64>, data: Vec<f64>) -> Result<Self, HamError> {
        require_euclidean(space)?;
        if data.len() != s.len() * t.len() * space.dim() || s.len() < 2 || t.len() < 2 {
            return Err(HamError::Invalid("grid data does not match its node counts".into()));
        }
        Ok(GridStrip { space: space.clone(), s, t, data })
    }

    /// The constant strip at `x`.
    pub fn constant(space: &PhaseSpace, x: &[f64], s: Vec<f64>, t: Vec<f64>) -> Result<Self, HamError> {
        let data = std::iter::repeat_n(x, s.len() * t.len()).flatten().copied().collect();
        GridStrip::new(space, s, t, data)
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let d = self.space.dim();
        let at = (i * self.t.len() + j) * d;
        &self.data[at..at + d]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let d = self.space.dim();
        let at = (i * self.t.len() + j) * d;
        &mut self.data[at..at + d]
    }

    /// The path `t ↦ w(s_i, t)`.
    pub fn column(&self, i: usize) -> Vec<Vec<f64>> {
        (0..self.t.len()).map(|j| self.get(i, j).to_vec()).collect()
    }

    pub fn first_path(&self) -> Vec<Vec<f64>> {
        self.column(0)
    }

    pub fn last_path(&self) -> Vec<Vec<f64>> {
        self.column(self.s.len() - 1)
    }

    /// `w # u`: follows `self`, then `other`. The last path of `self` must
    /// agree with the first path of `other` to within `tol`.
    pub fn concat(&self, other: &GridStrip, tol: f64) -> Result<GridStrip, HamError> {
        if self.space != other.space || self.t.len() != other.t.len() {
            return Err(HamError::SpaceMismatch("strips are sampled differently".into()));
        }
        let gap = self
            .last_path()
            .iter()
            .zip(other.first_path())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        if gap > tol {
            return Err(HamError::Invalid(format!("strips do not meet: gap {gap}")));
        }
        let shift = self.s[self.s.len() - 1] - other.s[0];
        let mut s = self.s.clone();
        s.extend(other.s.iter().skip(1).map(|v| v + shift));
        let d = self.space.dim();
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data[self.t.len() * d..]);
        GridStrip::new(&self.space, s, self.t.clone(), data)
    }
}

/// `∫ w*ω`, summing `½ ω(d₁, d₂)` over the grid cells with the diagonals
/// `d₁ = w₁₁ − w₀₀` and `d₂ = w₀₁ − w₁₀`. Exact for bilinear cells.
pub fn pullback_area(w: &GridStrip) -> f64 {
    let (ns, nt) = (w.s.len(), w.t.len());
    let d = w.space.dim();
    let mut d1 = vec![0.0; d];
    let mut d2 = vec![0.0; d];
    let mut total = 0.0;
    for i in 0..ns - 1 {
        for j in 0..nt - 1 {
            let (p00, p10, p01, p11) = (w.get(i, j), w.get(i + 1, j), w.get(i, j + 1), w.get(i + 1, j + 1));
            for k in 0..d {
                d1[k] = p11[k] - p00[k];
                d2[k] = p01[k] - p10[k];
            }
            total += 0.5 * w.space.omega(p00, &d1, &d2);
        }
    }
    total
}

/// `∫₀¹ H(t, ℓ(t)) dt` by the trapezoid rule.
pub fn path_integral(h: &dyn Hamiltonian, t_nodes: &[f64], path: &[Vec<f64>]) -> Result<f64, HamError> {
    let values = t_nodes.iter().zip(path).map(|(t, x)| h.try_value(*t, x)).collect::<Result<Vec<_>, _>>()?;
    Ok(trapezoid(t_nodes, &values))
}

/// `∫ w*ω`, plus `∫₀¹ H(t, w(s_end, t)) dt` when `h` is given.
pub fn action(w: &GridStrip, h: Option<&dyn Hamiltonian>) -> Result<f64, HamError> {
    let area = pullback_area(w);
    match h {
        None => Ok(area),
        Some(h) => Ok(area + path_integral(h, &w.t, &w.last_path())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExprHamiltonian;

    fn r2() -> PhaseSpace {
        PhaseSpace::euclidean(1).unwrap()
    }

    #[test]
    fn planar_rectangle() {
        let w = AnalyticStrip::parse(&r2(), &["3*s", "-2*t"]).unwrap();
        let g = w.sample(&uniform_nodes(0.0, 1.0, 7), &uniform_nodes(0.0, 1.0, 5));
        assert!((pullback_area(&g) + 6.0).abs() < 1e-14);
        let g = AnalyticStrip::parse(&r2(), &["s*1.5", "t*2"]).unwrap().sample(&uniform_nodes(0.0, 1.0, 3), &uniform_nodes(0.0, 1.0, 3));
        assert!((pullback_area(&g) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn constant_map_and_constant_hamiltonian() {
        let s = uniform_nodes(0.0, 1.0, 4);
        let t = uniform_nodes(0.0, 1.0, 4);
        let g = GridStrip::constant(&r2(), &[0.3, 0.1], s, t).unwrap();
        assert_eq!(action(&g, None).unwrap(), 0.0);
        let c = ExprHamiltonian::parse(&r2(), "2.5").unwrap();
        assert!((action(&g, Some(&c)).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn curved_strip_converges_quadratically() {
        // sector of radius 1 and angle 1
        let w = AnalyticStrip::parse(&r2(), &["s*cos(t)", "s*sin(t)"]).unwrap();
        let err = |n| (pullback_area(&w.sample(&uniform_nodes(0.0, 1.0, n), &uniform_nodes(0.0, 1.0, n))) - 0.5).abs();
        let (e1, e2) = (err(16), err(32));
        assert!(e1 < 1e-3 && (e1 / e2 - 4.0).abs() < 0.2, "{e1} {e2}");
    }

    #[test]
    fn concatenation_adds_areas() {
        let a = AnalyticStrip::parse(&r2(), &["s", "t"]).unwrap();
        let b = AnalyticStrip::parse(&r2(), &["1 + s^2", "t*(1 + s)"]).unwrap();
        let nodes = uniform_nodes(0.0, 1.0, 8);
        let (ga, gb) = (a.sample(&nodes, &nodes), b.sample(&nodes, &nodes));
        let joined = ga.concat(&gb, 1e-12).unwrap();
        assert_eq!(joined.s_nodes().len(), 17);
        assert!((pullback_area(&joined) - pullback_area(&ga) - pullback_area(&gb)).abs() < 1e-14);
        assert!(gb.concat(&ga, 1e-12).is_err());
    }

    #[test]
    fn spheres_are_rejected() {
        let s = PhaseSpace::sphere(1.0).unwrap();
        assert!(AnalyticStrip::parse(&s, &["s", "t", "0"]).is_err());
    }
}
