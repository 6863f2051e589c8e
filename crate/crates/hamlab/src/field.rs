//! Time-dependent Hamiltonians.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::expr::Expr;
use crate::flow::flow;
use crate::space::{sphere_radius, Factor, PhaseSpace};
use crate::HamError;

/// A function `H(t, x)` on a phase space.
pub trait Hamiltonian: Send + Sync {
    fn space(&self) -> &PhaseSpace;

    fn value(&self, t: f64, x: &[f64]) -> f64;

    /// Like [`Hamiltonian::value`], reporting flow failures of composite
    /// Hamiltonians instead of returning NaN.
    fn try_value(&self, t: f64, x: &[f64]) -> Result<f64, HamError> {
        Ok(self.value(t, x))
    }

    /// Ambient gradient; central differences unless overridden.
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let h = 1e-6;
        let mut p = x.to_vec();
        for i in 0..x.len() {
            p[i] = x[i] + h;
            let hi = self.value(t, &p);
            p[i] = x[i] - h;
            let lo = self.value(t, &p);
            p[i] = x[i];
            out[i] = (hi - lo) / (2.0 * h);
        }
    }

    /// `true` when `H` does not depend on `t`.
    fn autonomous(&self) -> bool {
        false
    }

    fn describe(&self) -> String;

    /// `X_{H_t}(x)`.
    fn field(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let mut grad = vec![0.0; x.len()];
        self.gradient(t, x, &mut grad);
        self.space().vector_field(&grad, x, out);
    }
}

const INLINE: usize = 16;

/// `H` given by an expression in `t` and the coordinate names.
#[derive(Debug, Clone)]
pub struct ExprHamiltonian {
    space: PhaseSpace,
    expr: Expr,
    grad: Vec<Expr>,
}

impl ExprHamiltonian {
    pub fn parse(space: &PhaseSpace, source: &str) -> Result<Self, HamError> {
        let names = space.coordinate_names();
        let mut vars: Vec<&str> = vec!["t"];
        vars.extend(names.iter().map(String::as_str));
        let aliases = space.coordinate_aliases();
        let aliases: Vec<(&str, usize)> = aliases.iter().map(|(n, i)| (n.as_str(), i + 1)).collect();
        let expr = Expr::parse_with_aliases(source, &vars, &aliases)?;
        let grad = (1..=space.dim()).map(|i| expr.derivative(i)).collect();
        Ok(ExprHamiltonian { space: space.clone(), expr, grad })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    #[inline]
    fn with_vars<R>(&self, t: f64, x: &[f64], f: impl FnOnce(&[f64]) -> R) -> R {
        let n = x.len() + 1;
        if n <= INLINE {
            let mut buf = [0.0; INLINE];
            buf[0] = t;
            buf[1..n].copy_from_slice(x);
            f(&buf[..n])
        } else {
            let mut buf = Vec::with_capacity(n);
            buf.push(t);
            buf.extend_from_slice(x);
            f(&buf)
        }
    }
}

impl Hamiltonian for ExprHamiltonian {
    fn space(&self) -> &PhaseSpace {
        &self.space
    }

    #[inline]
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.with_vars(t, x, |v| self.expr.eval(v))
    }

    #[inline]
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.with_vars(t, x, |v| {
            for (o, g) in out.iter_mut().zip(&self.grad) {
                *o = g.eval(v);
            }
        })
    }

    fn field(&self, t: f64, x: &[f64], out: &mut [f64]) {
        if x.len() <= INLINE {
            let mut grad = [0.0; INLINE];
            self.gradient(t, x, &mut grad[..x.len()]);
            self.space.vector_field(&grad[..x.len()], x, out);
        } else {
            let mut grad = vec![0.0; x.len()];
            self.gradient(t, x, &mut grad);
            self.space.vector_field(&grad, x, out);
        }
    }

    fn autonomous(&self) -> bool {
        self.expr.independent_of(0)
    }

    fn describe(&self) -> String {
        self.expr.source().to_string()
    }
}

/// `H̃(t, x) = −H(1−t, x)`, generating `t ↦ φ_H^{1−t} (φ_H^1)^{-1}`.
#[derive(Clone)]
pub struct Reversed(pub Arc<dyn Hamiltonian>);

impl Hamiltonian for Reversed {
    fn space(&self) -> &PhaseSpace {
        self.0.space()
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        -self.0.value(1.0 - t, x)
    }

    fn try_value(&self, t: f64, x: &[f64]) -> Result<f64, HamError> {
        Ok(-self.0.try_value(1.0 - t, x)?)
    }

    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.0.gradient(1.0 - t, x, out);
        for g in out.iter_mut() {
            *g = -*g;
        }
    }

    fn autonomous(&self) -> bool {
        self.0.autonomous()
    }

    fn describe(&self) -> String {
        format!("-({})|t->1-t", self.0.describe())
    }
}

/// Mean-zero normalization `H_t − ⨍ H_t ω^n` on a compact space.
///
/// Each sphere is sampled on a midpoint grid in height and longitude, which
/// is area-uniform by Archimedes' theorem.
pub struct Normalized {
    inner: Arc<dyn Hamiltonian>,
    nodes: Vec<Vec<f64>>,
    cache: Mutex<HashMap<u64, f64>>,
}

impl Normalized {
    pub fn new(inner: Arc<dyn Hamiltonian>) -> Result<Self, HamError> {
        let space = inner.space().clone();
        if !space.is_compact() {
            return Err(HamError::NonCompact);
        }
        let spheres = space.factors().len();
        let per_axis = match spheres {
            1 => 96,
            2 => 24,
            _ => 8,
        };
        let mut nodes: Vec<Vec<f64>> = vec![vec![0.0; space.dim()]];
        for (k, f) in space.factors().iter().enumerate() {
            let Factor::Sphere { area } = f else { unreachable!("compact spaces are products of spheres") };
            let r = sphere_radius(*area);
            let o = space.offset(k);
            let mut next = Vec::with_capacity(nodes.len() * per_axis * per_axis);
            for base in &nodes {
                for i in 0..per_axis {
                    let z = -r + 2.0 * r * (i as f64 + 0.5) / per_axis as f64;
                    let rho = (r * r - z * z).sqrt();
                    for j in 0..per_axis {
                        let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / per_axis as f64;
                        let mut p = base.clone();
                        p[o] = rho * phi.cos();
                        p[o + 1] = rho * phi.sin();
                        p[o + 2] = z;
                        next.push(p);
                    }
                }
            }
            nodes = next;
        }
        Ok(Normalized { inner, nodes, cache: Mutex::new(HashMap::new()) })
    }

    /// Spatial mean of `H_t`.
    pub fn mean(&self, t: f64) -> f64 {
        let key = t.to_bits();
        if let Some(m) = self.cache.lock().expect("cache lock").get(&key) {
            return *m;
        }
        let sum: f64 = self.nodes.iter().map(|p| self.inner.value(t, p)).sum();
        let mean = sum / self.nodes.len() as f64;
        self.cache.lock().expect("cache lock").insert(key, mean);
        mean
    }
}

impl Hamiltonian for Normalized {
    fn space(&self) -> &PhaseSpace {
        self.inner.space()
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.inner.value(t, x) - self.mean(t)
    }

    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(t, x, out)
    }

    fn autonomous(&self) -> bool {
        self.inner.autonomous()
    }

    fn describe(&self) -> String {
        format!("normalized({})", self.inner.describe())
    }
}

pub fn normalize(h: Arc<dyn Hamiltonian>) -> Result<Normalized, HamError> {
    Normalized::new(h)
}

/// `Ĥ(t, x) = −H⁽¹⁾(1−t, x) + H⁽⁰⁾(t, φ¹_{H⁽¹⁾} (φ^{1−t}_{H⁽¹⁾})⁻¹ x)`.
///
/// The transport integrates the flow of `H⁽¹⁾` from time `1−t` to `1`.
pub struct HatHamiltonian {
    h0: Arc<dyn Hamiltonian>,
    h1: Arc<dyn Hamiltonian>,
    max_step: f64,
}

impl HatHamiltonian {
    pub fn new(h0: Arc<dyn Hamiltonian>, h1: Arc<dyn Hamiltonian>, max_step: f64) -> Result<Self, HamError> {
        if h0.space() != h1.space() {
            return Err(HamError::SpaceMismatch(format!("{} vs {}", h0.space(), h1.space())));
        }
        Ok(HatHamiltonian { h0, h1, max_step })
    }
}

impl Hamiltonian for HatHamiltonian {
    fn space(&self) -> &PhaseSpace {
        self.h0.space()
    }

    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.try_value(t, x).unwrap_or(f64::NAN)
    }

    fn try_value(&self, t: f64, x: &[f64]) -> Result<f64, HamError> {
        let moved = flow(self.h1.as_ref(), 1.0 - t, 1.0, x, self.max_step)?;
        Ok(-self.h1.try_value(1.0 - t, x)? + self.h0.try_value(t, &moved)?)
    }

    fn describe(&self) -> String {
        format!("hat({}, {})", self.h0.describe(), self.h1.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2(src: &str) -> Arc<dyn Hamiltonian> {
        Arc::new(ExprHamiltonian::parse(&PhaseSpace::euclidean(1).unwrap(), src).unwrap())
    }

    #[test]
    fn expression_hamiltonians() {
        let h = ExprHamiltonian::parse(&PhaseSpace::euclidean(1).unwrap(), "t*x^2 + y1").unwrap();
        assert_eq!(h.value(2.0, &[3.0, 1.0]), 19.0);
        let mut g = [0.0; 2];
        h.gradient(2.0, &[3.0, 1.0], &mut g);
        assert_eq!(g, [12.0, 1.0]);
        assert!(!h.autonomous());
        assert!(ExprHamiltonian::parse(&PhaseSpace::euclidean(1).unwrap(), "z").is_err());
    }

    #[test]
    fn reversal() {
        let h = r2("t*x");
        let rev = Reversed(h.clone());
        assert_eq!(rev.value(0.25, &[2.0, 0.0]), -1.5);
        let mut g = [0.0; 2];
        rev.gradient(0.25, &[2.0, 0.0], &mut g);
        assert_eq!(g, [-0.75, 0.0]);
    }

    #[test]
    fn normalization() {
        let s = PhaseSpace::sphere(1.0).unwrap();
        let height: Arc<dyn Hamiltonian> = Arc::new(ExprHamiltonian::parse(&s, "z").unwrap());
        let n = normalize(height).unwrap();
        assert!(n.mean(0.3).abs() < 1e-14);
        let constant: Arc<dyn Hamiltonian> = Arc::new(ExprHamiltonian::parse(&s, "5 + t").unwrap());
        let n = normalize(constant).unwrap();
        assert!(n.value(0.5, &[0.0, 0.0, sphere_radius(1.0)]).abs() < 1e-12);
        // z^2 has mean r^2/3
        let r = sphere_radius(1.0);
        let sq: Arc<dyn Hamiltonian> = Arc::new(ExprHamiltonian::parse(&s, "z^2").unwrap());
        let n = normalize(sq).unwrap();
        assert!((n.mean(0.0) - r * r / 3.0).abs() < 1e-4 * r * r);
        assert!(matches!(normalize(r2("x")), Err(HamError::NonCompact)));
    }

    #[test]
    fn hat_special_cases() {
        let h0 = r2("sin(x) + t*cos(y)");
        let zero = r2("0");
        let hat = HatHamiltonian::new(h0.clone(), zero.clone(), 1e-2).unwrap();
        for (t, x) in [(0.2, [0.4, -1.0]), (0.9, [2.0, 0.5])] {
            assert!((hat.value(t, &x) - h0.value(t, &x)).abs() < 1e-15);
        }
        let h1 = r2("x*y + t");
        let hat = HatHamiltonian::new(zero, h1.clone(), 1e-2).unwrap();
        assert!((hat.value(0.3, &[1.0, 2.0]) + h1.value(0.7, &[1.0, 2.0])).abs() < 1e-15);
    }
}
