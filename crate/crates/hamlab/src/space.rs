//! Phase spaces: products of `ℝ²ⁿ` and round spheres.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::HamError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Factor {
    /// `ℝ²ⁿ` with coordinates `(x₁, y₁, …, xₙ, yₙ)`.
    Euclidean { n: usize },
    /// Sphere of total area `area`, embedded in `ℝ³` with its induced area form.
    Sphere { area: f64 },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Euclidean { n } => 2 * n,
            Factor::Sphere { .. } => 3,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Factor::Sphere { .. })
    }
}

/// Radius of the round sphere with total area `area`.
pub fn sphere_radius(area: f64) -> f64 {
    (area / (4.0 * PI)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpace {
    factors: Vec<Factor>,
    #[serde(skip)]
    offsets: Vec<usize>,
}

impl PhaseSpace {
    pub fn euclidean(n: usize) -> Result<Self, HamError> {
        if n == 0 {
            return Err(HamError::Invalid("euclidean dimension must be positive".into()));
        }
        Ok(PhaseSpace::from_factors(vec![Factor::Euclidean { n }]))
    }

    pub fn sphere(area: f64) -> Result<Self, HamError> {
        if !(area.is_finite() && area > 0.0) {
            return Err(HamError::Invalid(format!("sphere area {area} must be positive")));
        }
        Ok(PhaseSpace::from_factors(vec![Factor::Sphere { area }]))
    }

    pub fn product(parts: &[PhaseSpace]) -> Result<Self, HamError> {
        if parts.is_empty() {
            return Err(HamError::Invalid("empty product".into()));
        }
        Ok(PhaseSpace::from_factors(parts.iter().flat_map(|p| p.factors.iter().copied()).collect()))
    }

    fn from_factors(factors: Vec<Factor>) -> Self {
        let mut offsets = Vec::with_capacity(factors.len());
        let mut at = 0;
        for f in &factors {
            offsets.push(at);
            at += f.dim();
        }
        PhaseSpace { factors, offsets }
    }

    /// Parses `R2`, `R4`, `S2(3/2)`, `sphere:1`, or products joined by `x`/`*`.
    pub fn parse(s: &str) -> Result<Self, HamError> {
        let err = || HamError::Parse { input: s.to_string(), message: "expected R2n, S2(a) or a product".into() };
        let parts = s
            .split(['*', 'x'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                if let Some(dim) = p.strip_prefix('R') {
                    let d: usize = dim.parse().map_err(|_| err())?;
                    if d == 0 || !d.is_multiple_of(2) {
                        return Err(err());
                    }
                    PhaseSpace::euclidean(d / 2)
                } else {
                    let area = p
                        .strip_prefix("S2(")
                        .and_then(|r| r.strip_suffix(')'))
                        .or_else(|| p.strip_prefix("sphere:"))
                        .ok_or_else(err)?;
                    PhaseSpace::sphere(parse_number(area).ok_or_else(err)?)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        PhaseSpace::product(&parts)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn offset(&self, factor: usize) -> usize {
        self.offsets[factor]
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).sum()
    }

    pub fn is_compact(&self) -> bool {
        self.factors.iter().all(Factor::is_compact)
    }

    pub fn is_euclidean(&self) -> bool {
        self.factors.iter().all(|f| matches!(f, Factor::Euclidean { .. }))
    }

    /// Names of the state coordinates, in state order.
    pub fn coordinate_names(&self) -> Vec<String> {
        let suffix = |k: usize| if self.factors.len() > 1 { format!("_{}", k + 1) } else { String::new() };
        let mut out = Vec::with_capacity(self.dim());
        for (k, f) in self.factors.iter().enumerate() {
            match f {
                Factor::Euclidean { n: 1 } => {
                    out.push(format!("x{}", suffix(k)));
                    out.push(format!("y{}", suffix(k)));
                }
                Factor::Euclidean { n } => {
                    for i in 1..=*n {
                        out.push(format!("x{i}{}", suffix(k)));
                        out.push(format!("y{i}{}", suffix(k)));
                    }
                }
                Factor::Sphere { .. } => {
                    for c in ["x", "y", "z"] {
                        out.push(format!("{c}{}", suffix(k)));
                    }
                }
            }
        }
        out
    }

    /// Alternative names: `x1`, `y1` for a single `ℝ²` factor.
    pub fn coordinate_aliases(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            if let Factor::Euclidean { n: 1 } = f {
                let suffix = if self.factors.len() > 1 { format!("_{}", k + 1) } else { String::new() };
                out.push((format!("x1{suffix}"), self.offsets[k]));
                out.push((format!("y1{suffix}"), self.offsets[k] + 1));
            }
        }
        out
    }

    /// Index pairs `(xᵢ, yᵢ)` of the euclidean factors.
    pub fn symplectic_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            if let Factor::Euclidean { n } = f {
                for i in 0..*n {
                    let at = self.offsets[k] + 2 * i;
                    out.push((at, at + 1));
                }
            }
        }
        out
    }

    /// `X_H` from the ambient gradient of `H` at `x`.
    pub fn vector_field(&self, grad: &[f64], x: &[f64], out: &mut [f64]) {
        for (k, f) in self.factors.iter().enumerate() {
            let o = self.offsets[k];
            match f {
                Factor::Euclidean { n } => {
                    for i in 0..*n {
                        let (ix, iy) = (o + 2 * i, o + 2 * i + 1);
                        out[ix] = grad[iy];
                        out[iy] = -grad[ix];
                    }
                }
                Factor::Sphere { .. } => {
                    let n = unit(&x[o..o + 3]);
                    let g = &grad[o..o + 3];
                    // X = ∇H × n
                    out[o] = g[1] * n[2] - g[2] * n[1];
                    out[o + 1] = g[2] * n[0] - g[0] * n[2];
                    out[o + 2] = g[0] * n[1] - g[1] * n[0];
                }
            }
        }
    }

    /// `ω_x(u, v)`.
    pub fn omega(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let mut total = 0.0;
        for (k, f) in self.factors.iter().enumerate() {
            let o = self.offsets[k];
            match f {
                Factor::Euclidean { n } => {
                    for i in 0..*n {
                        let (ix, iy) = (o + 2 * i, o + 2 * i + 1);
                        total += u[ix] * v[iy] - u[iy] * v[ix];
                    }
                }
                Factor::Sphere { .. } => {
                    let n = unit(&x[o..o + 3]);
                    let (a, b) = (&u[o..o + 3], &v[o..o + 3]);
                    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                    total += n[0] * cross[0] + n[1] * cross[1] + n[2] * cross[2];
                }
            }
        }
        total
    }

    /// Moves sphere components back onto their spheres.
    pub fn project(&self, x: &mut [f64]) {
        for (k, f) in self.factors.iter().enumerate() {
            if let Factor::Sphere { area } = f {
                let o = self.offsets[k];
                let r = sphere_radius(*area);
                let norm = (x[o] * x[o] + x[o + 1] * x[o + 1] + x[o + 2] * x[o + 2]).sqrt();
                if norm > 0.0 {
                    for c in &mut x[o..o + 3] {
                        *c *= r / norm;
                    }
                }
            }
        }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), HamError> {
        if x.len() != self.dim() {
            return Err(HamError::Invalid(format!("point has {} coordinates, space needs {}", x.len(), self.dim())));
        }
        Ok(())
    }
}

impl fmt::Display for PhaseSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|factor| match factor {
                Factor::Euclidean { n } => format!("R{}", 2 * n),
                Factor::Sphere { area } => format!("S2({area})"),
            })
            .collect();
        f.write_str(&parts.join(" x "))
    }
}

fn unit(v: &[f64]) -> [f64; 3] {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / norm, v[1] / norm, v[2] / norm]
}

/// Parses `p/q` or a decimal.
pub fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_layout() {
        let r2 = PhaseSpace::euclidean(1).unwrap();
        assert_eq!(r2.coordinate_names(), ["x", "y"]);
        assert_eq!(r2.coordinate_aliases(), [("x1".to_string(), 0), ("y1".to_string(), 1)]);
        let r4 = PhaseSpace::euclidean(2).unwrap();
        assert_eq!(r4.coordinate_names(), ["x1", "y1", "x2", "y2"]);
        assert_eq!(r4.symplectic_pairs(), [(0, 1), (2, 3)]);
        let prod = PhaseSpace::parse("R2 x S2(1)").unwrap();
        assert_eq!(prod.coordinate_names(), ["x_1", "y_1", "x_2", "y_2", "z_2"]);
        assert_eq!(prod.dim(), 5);
        assert!(!prod.is_compact());
        assert!(PhaseSpace::parse("S2(3/2)").unwrap().is_compact());
        assert!(PhaseSpace::parse("R3").is_err());
        assert!(PhaseSpace::sphere(-1.0).is_err());
    }

    #[test]
    fn euclidean_field_follows_dh_equals_omega_x_h() {
        let r2 = PhaseSpace::euclidean(1).unwrap();
        // H = x: dH = dx, X_H = (0, -1), and ω(X_H, v) = 0*v_y - (-1)*v_x = v_x
        let mut out = [0.0; 2];
        r2.vector_field(&[1.0, 0.0], &[0.3, 0.4], &mut out);
        assert_eq!(out, [0.0, -1.0]);
        assert_eq!(r2.omega(&[0.0, 0.0], &out, &[1.0, 0.0]), 1.0);
        assert_eq!(r2.omega(&[0.0, 0.0], &out, &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn sphere_field_is_tangent_and_consistent_with_omega() {
        let s = PhaseSpace::sphere(2.0).unwrap();
        let r = sphere_radius(2.0);
        let x = [r * 0.6, 0.0, r * 0.8];
        let grad = [0.2, -0.5, 1.0];
        let mut field = [0.0; 3];
        s.vector_field(&grad, &x, &mut field);
        let dot: f64 = field.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-14);
        // dH(v) = ω(X_H, v) for tangent v
        for v in [[0.0, 1.0, 0.0], [0.8, 0.0, -0.6]] {
            let dh: f64 = grad.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((s.omega(&x, &field, &v) - dh).abs() < 1e-14);
        }
    }
}
