//! Toric fibers, their Maslov-2 disks and the Koszul model of `𝔪₁`.
//!
//! A [`MomentModel`] is a list of facets `⟨n_j, u⟩ ≥ c_j`. For an interior
//! fiber `L(u)` every facet carries exactly one Maslov-2 disk class with
//! boundary `n_j` and area `ℓ_j(u) = ⟨n_j, u⟩ − c_j`. With the bounding
//! cochain fixed to zero, the Floer differential is modelled as contraction
//! of `Λ*(ℤⁿ) ⊗ Λ_{0,nov}` by the covector `w = Σ_j T^{ℓ_j(u)} n_j`, every
//! disk entering with coefficient `+1`. Opposite hemispheres of a sphere
//! factor have opposite boundaries, so their contributions cancel when the
//! areas agree.
//!
//! Non-compact factors (`ℂ`) carry a single facet of kind
//! [`FacetKind::Open`] and bound a single disk class.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::novikov::NovikovElement;
use crate::rational::{fmt_q, gcd_slice, parse_q, serde_q, Extended, ParseRationalError, Q};
use crate::valmat::{self, ChainComplex, ModuleDecomposition, NovikovMatrix, ValmatError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("fiber lies on or outside facet {facet} (affine distance {distance})")]
    FiberOnBoundary { facet: usize, distance: String },
    #[error("fiber has {got} coordinates, model dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("search region has no interior grid point")]
    EmptyInterior,
    #[error("coordinate {0} is unbounded; supply a search box")]
    UnboundedRegion(usize),
    #[error(transparent)]
    Valmat(#[from] ValmatError),
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacetKind {
    Closed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    #[serde(with = "serde_q")]
    pub offset: Q,
    pub kind: FacetKind,
}

impl Facet {
    /// Affine distance `⟨normal, u⟩ − offset`.
    pub fn distance(&self, u: &[Q]) -> Q {
        let pairing: Q = self
            .normal
            .iter()
            .zip(u)
            .filter(|(n, _)| **n != 0)
            .map(|(n, x)| x * Q::from_integer((*n).into()))
            .fold(Q::zero(), |acc, v| acc + v);
        pairing - &self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Sphere {
        #[serde(with = "serde_q")]
        area: Q,
    },
    ProjectiveSpace {
        k: usize,
        #[serde(with = "serde_q")]
        lambda: Q,
    },
    Plane,
    Polytope,
}

/// Bookkeeping for one factor of a product model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub coords: Range<usize>,
    pub facets: Range<usize>,
}

/// A moment polytope (possibly unbounded), kept as a product of factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentModel {
    dim: usize,
    facets: Vec<Facet>,
    factors: Vec<Factor>,
}

impl MomentModel {
    /// A general polytope `{u : ⟨n_j, u⟩ ≥ c_j}` with primitive normals.
    pub fn polytope(dim: usize, facets: Vec<Facet>) -> Result<Self, ToricError> {
        if dim == 0 {
            return Err(ToricError::InvalidModel("dimension must be positive".into()));
        }
        if facets.is_empty() {
            return Err(ToricError::InvalidModel("a model needs at least one facet".into()));
        }
        for (j, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(ToricError::InvalidModel(format!(
                    "facet {j} normal has length {}, expected {dim}",
                    f.normal.len()
                )));
            }
            if gcd_slice(&f.normal).abs() != 1 {
                return Err(ToricError::InvalidModel(format!("facet {j} normal {:?} is not primitive", f.normal)));
            }
        }
        let n = facets.len();
        Ok(MomentModel {
            dim,
            facets,
            factors: vec![Factor { kind: FactorKind::Polytope, coords: 0..dim, facets: 0..n }],
        })
    }

    /// `S²(a)`: the interval `[0, a]`.
    pub fn sphere(area: Q) -> Result<Self, ToricError> {
        if !area.is_positive() {
            return Err(ToricError::InvalidModel(format!("sphere area {} must be positive", fmt_q(&area))));
        }
        let facets = vec![
            Facet { normal: vec![1], offset: Q::zero(), kind: FacetKind::Closed },
            Facet { normal: vec![-1], offset: -area.clone(), kind: FacetKind::Closed },
        ];
        Ok(MomentModel {
            dim: 1,
            facets,
            factors: vec![Factor { kind: FactorKind::Sphere { area }, coords: 0..1, facets: 0..2 }],
        })
    }

    /// `ℂP^k(λ)`: the simplex `{uᵢ ≥ 0, Σ uᵢ ≤ λ}`.
    pub fn projective_space(k: usize, lambda: Q) -> Result<Self, ToricError> {
        if k == 0 {
            return Err(ToricError::InvalidModel("CP^k needs k >= 1".into()));
        }
        if !lambda.is_positive() {
            return Err(ToricError::InvalidModel(format!("CP^k area {} must be positive", fmt_q(&lambda))));
        }
        let mut facets: Vec<Facet> = (0..k)
            .map(|i| {
                let mut normal = vec![0; k];
                normal[i] = 1;
                Facet { normal, offset: Q::zero(), kind: FacetKind::Closed }
            })
            .collect();
        facets.push(Facet { normal: vec![-1; k], offset: -lambda.clone(), kind: FacetKind::Closed });
        Ok(MomentModel {
            dim: k,
            facets,
            factors: vec![Factor {
                kind: FactorKind::ProjectiveSpace { k, lambda },
                coords: 0..k,
                facets: 0..k + 1,
            }],
        })
    }

    /// `ℂ`: the half-line `u ≥ 0`, one open facet.
    pub fn plane() -> Self {
        MomentModel {
            dim: 1,
            facets: vec![Facet { normal: vec![1], offset: Q::zero(), kind: FacetKind::Open }],
            factors: vec![Factor { kind: FactorKind::Plane, coords: 0..1, facets: 0..1 }],
        }
    }

    /// Cartesian product; facets and coordinates are concatenated in order.
    pub fn product(parts: &[MomentModel]) -> Result<Self, ToricError> {
        if parts.is_empty() {
            return Err(ToricError::InvalidModel("empty product".into()));
        }
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let mut facets = Vec::new();
        let mut factors = Vec::new();
        let mut coord_base = 0;
        for part in parts {
            let facet_base = facets.len();
            for f in &part.facets {
                let mut normal = vec![0; dim];
                normal[coord_base..coord_base + part.dim].copy_from_slice(&f.normal);
                facets.push(Facet { normal, offset: f.offset.clone(), kind: f.kind });
            }
            for factor in &part.factors {
                factors.push(Factor {
                    kind: factor.kind.clone(),
                    coords: factor.coords.start + coord_base..factor.coords.end + coord_base,
                    facets: factor.facets.start + facet_base..factor.facets.end + facet_base,
                });
            }
            coord_base += part.dim;
        }
        Ok(MomentModel { dim, facets, factors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Largest facet area at `u`, used for the default truncation budget.
    fn max_area(&self, u: &FiberPoint) -> Result<Q, ToricError> {
        Ok(facet_areas(self, u)?.into_iter().max().unwrap_or_else(Q::one))
    }

    pub fn is_interior(&self, u: &[Q]) -> bool {
        u.len() == self.dim && self.facets.iter().all(|f| f.distance(u).is_positive())
    }

    /// Translates the polytope by `shift`, adjusting offsets so that the
    /// translated fiber `u + shift` has the same facet areas.
    pub fn translated(&self, shift: &[Q]) -> Self {
        let mut out = self.clone();
        for f in &mut out.facets {
            let delta = Facet { normal: f.normal.clone(), offset: Q::zero(), kind: f.kind }.distance(shift);
            f.offset = &f.offset + delta;
        }
        out
    }

    /// Coordinate bounds implied by the facets (`None` where unbounded).
    ///
    /// Lower bounds come from facets `uᵢ ≥ c`; upper bounds from facets whose
    /// normal is negative in coordinate `i` and nonpositive elsewhere,
    /// combined with the lower bounds of the other coordinates.
    pub fn coordinate_bounds(&self) -> Vec<(Option<Q>, Option<Q>)> {
        let mut lower: Vec<Option<Q>> = vec![None; self.dim];
        for f in &self.facets {
            let support: Vec<usize> = (0..self.dim).filter(|&i| f.normal[i] != 0).collect();
            if support.len() == 1 && f.normal[support[0]] > 0 {
                let i = support[0];
                let bound = &f.offset / Q::from_integer(f.normal[i].into());
                lower[i] = Some(match lower[i].take() {
                    Some(b) if b > bound => b,
                    _ => bound,
                });
            }
        }
        let mut upper: Vec<Option<Q>> = vec![None; self.dim];
        for f in &self.facets {
            for i in 0..self.dim {
                if f.normal[i] >= 0 {
                    continue;
                }
                let others_ok = (0..self.dim).all(|j| j == i || f.normal[j] <= 0 && (f.normal[j] == 0 || lower[j].is_some()));
                if !others_ok {
                    continue;
                }
                // n_i u_i ≥ c − Σ_{j≠i} n_j u_j ≥ c − Σ_{j≠i} n_j L_j
                let mut rhs = f.offset.clone();
                for j in 0..self.dim {
                    if j != i && f.normal[j] != 0 {
                        rhs -= Q::from_integer(f.normal[j].into()) * lower[j].clone().unwrap();
                    }
                }
                let bound = rhs / Q::from_integer(f.normal[i].into());
                upper[i] = Some(match upper[i].take() {
                    Some(b) if b < bound => b,
                    _ => bound,
                });
            }
        }
        lower.into_iter().zip(upper).collect()
    }
}

/// Moment-map coordinates of a torus fiber.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiberPoint(pub Vec<Q>);

impl FiberPoint {
    pub fn new(coords: Vec<Q>) -> Self {
        FiberPoint(coords)
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn render(&self) -> Vec<String> {
        self.0.iter().map(fmt_q).collect()
    }
}

impl FromStr for FiberPoint {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::rational::parse_q_list(s).map(FiberPoint)
    }
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.render().join(", "))
    }
}

/// A Maslov-2 disk class: boundary `∂β ∈ ℤⁿ` and symplectic area.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiskClass {
    pub boundary: Vec<i64>,
    #[serde(with = "serde_q")]
    pub area: Q,
}

/// Affine distances `ℓ_j(u)`, one per facet.
pub fn facet_areas(m: &MomentModel, u: &FiberPoint) -> Result<Vec<Q>, ToricError> {
    if u.0.len() != m.dim {
        return Err(ToricError::DimensionMismatch { expected: m.dim, got: u.0.len() });
    }
    m.facets
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let d = f.distance(&u.0);
            if d.is_positive() {
                Ok(d)
            } else {
                Err(ToricError::FiberOnBoundary { facet: j, distance: fmt_q(&d) })
            }
        })
        .collect()
}

pub fn enumerate_disks(m: &MomentModel, u: &FiberPoint) -> Result<Vec<DiskClass>, ToricError> {
    let areas = facet_areas(m, u)?;
    Ok(m.facets
        .iter()
        .zip(areas)
        .map(|(f, area)| DiskClass { boundary: f.normal.clone(), area })
        .collect())
}

/// Area-weighted disk count `Σ_j T^{ℓ_j(u)}`.
pub fn potential(m: &MomentModel, u: &FiberPoint) -> Result<NovikovElement, ToricError> {
    let areas = facet_areas(m, u)?;
    Ok(areas
        .into_iter()
        .fold(NovikovElement::zero(), |acc, a| &acc + &NovikovElement::t_power(a)))
}

/// Graded potential `Σ_j T^{ℓ_j(u)} e`, recording Maslov index 2 as `e¹`.
pub fn potential_graded(m: &MomentModel, u: &FiberPoint) -> Result<NovikovElement, ToricError> {
    let areas = facet_areas(m, u)?;
    Ok(areas.into_iter().fold(NovikovElement::zero(), |acc, a| {
        &acc + &NovikovElement::monomial(Q::one(), a, 1)
    }))
}

/// Covector `w` and its Koszul contraction complex.
#[derive(Debug, Clone)]
pub struct FloerModel {
    pub w: Vec<NovikovElement>,
    pub complex: ChainComplex,
}

impl FloerModel {
    pub fn w_is_zero(&self) -> bool {
        self.w.iter().all(NovikovElement::is_zero)
    }
}

/// `w_i = Σ_j T^{ℓ_j(u)} (n_j)_i`, computed exactly.
pub fn covector(m: &MomentModel, u: &FiberPoint) -> Result<Vec<NovikovElement>, ToricError> {
    let areas = facet_areas(m, u)?;
    let mut w = vec![NovikovElement::zero(); m.dim];
    for (f, area) in m.facets.iter().zip(&areas) {
        for (i, &n) in f.normal.iter().enumerate() {
            if n != 0 {
                let term = NovikovElement::monomial(Q::from_integer(n.into()), area.clone(), 0);
                w[i] = &w[i] + &term;
            }
        }
    }
    Ok(w)
}

/// Subsets of `{0..n}` of size `p` as sorted index lists, lexicographic.
fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Koszul contraction complex of `w` on `Λ*(ℤⁿ) ⊗ Λ_{0,nov}`.
///
/// Degree `q` is `Λ^{n−q}`, so the differential
/// `ι_w(e_{i₀}∧…∧e_{i_{p−1}}) = Σ_k (−1)^k w_{i_k} e_{i₀}∧…ê_{i_k}…` raises `q`.
pub fn koszul_complex(w: &[NovikovElement], trunc: Extended) -> Result<ChainComplex, ValmatError> {
    let n = w.len();
    let bases: Vec<Vec<Vec<usize>>> = (0..=n).map(|q| subsets(n, n - q)).collect();
    let ranks: Vec<usize> = bases.iter().map(Vec::len).collect();
    let mut differentials = Vec::with_capacity(n);
    for q in 0..n {
        let source = &bases[q];
        let target = &bases[q + 1];
        let mut d = NovikovMatrix::zeros(target.len(), source.len(), trunc.clone());
        for (col, set) in source.iter().enumerate() {
            for (k, &i) in set.iter().enumerate() {
                if w[i].is_zero() {
                    continue;
                }
                let mut face = set.clone();
                face.remove(k);
                let row = target.binary_search(&face).expect("face is a basis element");
                let entry = if k % 2 == 0 { w[i].clone() } else { -&w[i] };
                d.set(row, col, entry);
            }
        }
        differentials.push(d);
    }
    ChainComplex::new(ranks, differentials)
}

/// Default truncation budget: four times the largest facet area.
pub fn default_trunc(m: &MomentModel, u: &FiberPoint) -> Result<Extended, ToricError> {
    Ok(Extended::Finite(m.max_area(u)? * Q::from_integer(4.into())))
}

pub fn floer_model(m: &MomentModel, u: &FiberPoint) -> Result<FloerModel, ToricError> {
    let trunc = default_trunc(m, u)?;
    floer_model_with_trunc(m, u, trunc)
}

pub fn floer_model_with_trunc(m: &MomentModel, u: &FiberPoint, trunc: Extended) -> Result<FloerModel, ToricError> {
    let w = covector(m, u)?;
    let complex = koszul_complex(&w, trunc)?;
    Ok(FloerModel { w, complex })
}

/// Floer cohomology at `b = 0`, aggregated over all degrees.
pub fn floer_cohomology(m: &MomentModel, u: &FiberPoint) -> Result<ModuleDecomposition, ToricError> {
    let model = floer_model(m, u)?;
    Ok(valmat::decompose_total(&model.complex)?)
}

pub fn floer_cohomology_with_trunc(
    m: &MomentModel,
    u: &FiberPoint,
    trunc: Extended,
) -> Result<ModuleDecomposition, ToricError> {
    let model = floer_model_with_trunc(m, u, trunc)?;
    Ok(valmat::decompose_total(&model.complex)?)
}

pub fn torsion_threshold_at(m: &MomentModel, u: &FiberPoint) -> Result<Extended, ToricError> {
    Ok(valmat::torsion_threshold(&floer_cohomology(m, u)?))
}

/// Certified lower bound for the displacement energy of `L(u)`; `+∞`
/// means the fiber is non-displaceable.
pub fn displacement_bound(m: &MomentModel, u: &FiberPoint) -> Result<Extended, ToricError> {
    torsion_threshold_at(m, u)
}

/// Result of [`optimize_threshold`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub point: FiberPoint,
    pub threshold: Extended,
}

const REFINE_LEVELS: u32 = 6;

/// Maximizes the torsion threshold over fibers.
///
/// Candidates are the points `lo + (hi − lo)·j/(2r)` of the search box
/// (`r` = `resolution`) lying strictly inside the polytope; the best one is
/// then refined coordinate-wise with halving steps. For even `r` the result
/// at `r/2` also competes, so the value never decreases under doubling.
/// Ties go to the lexicographically smallest point. `search_box` overrides
/// the facet-derived bounds and is required for unbounded coordinates.
pub fn optimize_threshold(
    m: &MomentModel,
    resolution: usize,
    search_box: Option<&[(Q, Q)]>,
) -> Result<Optimum, ToricError> {
    if resolution == 0 {
        return Err(ToricError::InvalidModel("grid resolution must be positive".into()));
    }
    let bounds: Vec<(Q, Q)> = match search_box {
        Some(b) => {
            if b.len() != m.dim {
                return Err(ToricError::DimensionMismatch { expected: m.dim, got: b.len() });
            }
            b.to_vec()
        }
        None => m
            .coordinate_bounds()
            .into_iter()
            .enumerate()
            .map(|(i, (lo, hi))| match (lo, hi) {
                (Some(lo), Some(hi)) => Ok((lo, hi)),
                _ => Err(ToricError::UnboundedRegion(i)),
            })
            .collect::<Result<_, _>>()?,
    };
    optimize_in_box(m, resolution, &bounds)
}

fn better(a: &Optimum, b: &Optimum) -> bool {
    a.threshold > b.threshold || a.threshold == b.threshold && a.point < b.point
}

fn optimize_in_box(m: &MomentModel, resolution: usize, bounds: &[(Q, Q)]) -> Result<Optimum, ToricError> {
    let steps = 2 * resolution;
    let axes: Vec<Vec<Q>> = bounds
        .iter()
        .map(|(lo, hi)| {
            (0..=steps)
                .map(|j| lo + (hi - lo) * Q::new(j.into(), steps.into()))
                .collect()
        })
        .collect();
    let mut points: Vec<Vec<Q>> = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(x.clone());
                    q
                })
            })
            .collect();
    }
    let in_box = |u: &[Q]| u.iter().zip(bounds).all(|(x, (lo, hi))| x >= lo && x <= hi);
    let candidates: Vec<Optimum> = points
        .into_par_iter()
        .filter(|u| m.is_interior(u))
        .map(|u| {
            let point = FiberPoint(u);
            torsion_threshold_at(m, &point).map(|threshold| Optimum { point, threshold })
        })
        .collect::<Result<_, _>>()?;
    let mut best = candidates
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .ok_or(ToricError::EmptyInterior)?;

    if !best.threshold.is_infinite() {
        let spans: Vec<Q> = bounds.iter().map(|(lo, hi)| (hi - lo) / Q::from_integer(steps.into())).collect();
        'levels: for level in 1..=REFINE_LEVELS {
            let scale = Q::new(1.into(), (1u64 << level).into());
            for (i, span) in spans.iter().enumerate() {
                let step = span * &scale;
                for sign in [-1i64, 1] {
                    let mut u = best.point.0.clone();
                    u[i] += &step * Q::from_integer(sign.into());
                    if !in_box(&u) || !m.is_interior(&u) {
                        continue;
                    }
                    let point = FiberPoint(u);
                    let threshold = torsion_threshold_at(m, &point)?;
                    let cand = Optimum { point, threshold };
                    if cand.threshold > best.threshold {
                        best = cand;
                        if best.threshold.is_infinite() {
                            break 'levels;
                        }
                    }
                }
            }
        }
    }
    if resolution.is_multiple_of(2) && !best.threshold.is_infinite() {
        match optimize_in_box(m, resolution / 2, bounds) {
            Ok(coarse) if better(&coarse, &best) => best = coarse,
            Ok(_) | Err(ToricError::EmptyInterior) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Model specifications (JSON and shorthand)
// ---------------------------------------------------------------------------

/// JSON forms: `{dim, facets}` or `{product: [{sphere}, {cp}, {cylinder}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Product { product: Vec<FactorSpec> },
    Polytope { dim: usize, facets: Vec<Facet> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorSpec {
    Sphere(#[serde(with = "serde_q")] Q),
    Cp(CpSpec),
    Cylinder(bool),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpSpec {
    pub k: usize,
    #[serde(with = "serde_q")]
    pub lambda: Q,
}

impl ModelSpec {
    pub fn build(&self) -> Result<MomentModel, ToricError> {
        match self {
            ModelSpec::Polytope { dim, facets } => MomentModel::polytope(*dim, facets.clone()),
            ModelSpec::Product { product } => {
                let parts = product
                    .iter()
                    .map(|f| match f {
                        FactorSpec::Sphere(a) => MomentModel::sphere(a.clone()),
                        FactorSpec::Cp(cp) => MomentModel::projective_space(cp.k, cp.lambda.clone()),
                        FactorSpec::Cylinder(true) => Ok(MomentModel::plane()),
                        FactorSpec::Cylinder(false) => {
                            Err(ToricError::InvalidModel("`cylinder: false` is not a factor".into()))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                MomentModel::product(&parts)
            }
        }
    }
}

impl MomentModel {
    /// Parses the shorthand `sphere:3/2*sphere:5*cp:2:10*cylinder`.
    pub fn from_shorthand(s: &str) -> Result<Self, ToricError> {
        let parts = s
            .split(['*', 'x'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                let fields: Vec<&str> = p.split(':').collect();
                match fields.as_slice() {
                    ["sphere", a] => MomentModel::sphere(parse_q(a)?),
                    ["cp", k, lambda] => {
                        let k: usize = k
                            .parse()
                            .map_err(|_| ToricError::InvalidModel(format!("bad CP dimension `{k}`")))?;
                        MomentModel::projective_space(k, parse_q(lambda)?)
                    }
                    ["cylinder"] | ["plane"] | ["C"] => Ok(MomentModel::plane()),
                    _ => Err(ToricError::InvalidModel(format!("unknown factor `{p}`"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        MomentModel::product(&parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn fiber(coords: &[Q]) -> FiberPoint {
        FiberPoint(coords.to_vec())
    }

    fn n(s: &str) -> NovikovElement {
        s.parse().unwrap()
    }

    fn spheres(areas: &[Q]) -> MomentModel {
        let parts: Vec<_> = areas.iter().map(|a| MomentModel::sphere(a.clone()).unwrap()).collect();
        MomentModel::product(&parts).unwrap()
    }

    #[test]
    fn sphere_areas() {
        let s1 = MomentModel::sphere(qi(1)).unwrap();
        assert_eq!(facet_areas(&s1, &fiber(&[q(1, 2)])).unwrap(), vec![q(1, 2), q(1, 2)]);
        let s5 = MomentModel::sphere(qi(5)).unwrap();
        assert_eq!(facet_areas(&s5, &fiber(&[qi(2)])).unwrap(), vec![qi(2), qi(3)]);
    }

    #[test]
    fn projective_space_areas() {
        let cp = MomentModel::projective_space(2, qi(10)).unwrap();
        assert_eq!(facet_areas(&cp, &fiber(&[qi(2), qi(2)])).unwrap(), vec![qi(2), qi(2), qi(6)]);
        let cp3 = MomentModel::projective_space(3, qi(9)).unwrap();
        assert_eq!(
            facet_areas(&cp3, &fiber(&[qi(2), qi(2), qi(2)])).unwrap(),
            vec![qi(2), qi(2), qi(2), qi(3)]
        );
    }

    #[test]
    fn boundary_and_dimension_errors() {
        let s1 = MomentModel::sphere(qi(1)).unwrap();
        assert!(matches!(
            facet_areas(&s1, &fiber(&[qi(1)])),
            Err(ToricError::FiberOnBoundary { facet: 1, .. })
        ));
        assert!(matches!(
            facet_areas(&s1, &fiber(&[q(1, 2), q(1, 2)])),
            Err(ToricError::DimensionMismatch { .. })
        ));
        assert!(MomentModel::polytope(1, vec![Facet { normal: vec![2], offset: qi(0), kind: FacetKind::Closed }]).is_err());
    }

    #[test]
    fn disk_classes() {
        let c = MomentModel::plane();
        let disks = enumerate_disks(&c, &fiber(&[q(3, 4)])).unwrap();
        assert_eq!(disks, vec![DiskClass { boundary: vec![1], area: q(3, 4) }]);

        let s = MomentModel::sphere(q(3, 2)).unwrap();
        let disks = enumerate_disks(&s, &fiber(&[q(3, 4)])).unwrap();
        assert_eq!(disks.len(), 2);
        assert_eq!(disks[0].boundary, vec![1]);
        assert_eq!(disks[1].boundary, vec![-1]);
        assert_eq!(disks[0].area, disks[1].area);

        let prod = MomentModel::product(&[c.clone(), s.clone()]).unwrap();
        let disks = enumerate_disks(&prod, &fiber(&[q(3, 4), q(3, 4)])).unwrap();
        assert_eq!(disks.len(), 3);
        assert_eq!(disks[0].boundary, vec![1, 0]);
        assert_eq!(disks[2].boundary, vec![0, -1]);
    }

    #[test]
    fn potentials() {
        let s1 = MomentModel::sphere(qi(1)).unwrap();
        assert_eq!(potential(&s1, &fiber(&[q(1, 2)])).unwrap(), n("2*T(1/2)"));
        let s5 = MomentModel::sphere(qi(5)).unwrap();
        assert_eq!(potential(&s5, &fiber(&[qi(2)])).unwrap(), n("T(2) + T(3)"));
        assert_eq!(potential(&MomentModel::plane(), &fiber(&[q(3, 4)])).unwrap(), n("T(3/4)"));
        assert_eq!(potential_graded(&s5, &fiber(&[qi(2)])).unwrap(), n("T(2)*e(1) + T(3)*e(1)"));
        assert!(potential(&s5, &fiber(&[qi(2)])).unwrap().in_lambda_plus());
    }

    #[test]
    fn covectors() {
        let s1 = MomentModel::sphere(qi(1)).unwrap();
        assert!(covector(&s1, &fiber(&[q(1, 2)])).unwrap()[0].is_zero());

        let m = spheres(&[q(3, 2), qi(5), qi(5)]);
        let w = covector(&m, &fiber(&[q(3, 4), qi(2), qi(2)])).unwrap();
        assert!(w[0].is_zero());
        assert_eq!(w[1], n("T(2) - T(3)"));
        assert_eq!(w[2], n("T(2) - T(3)"));

        let m = MomentModel::product(&[MomentModel::plane(), s1]).unwrap();
        let w = covector(&m, &fiber(&[q(3, 4), q(1, 2)])).unwrap();
        assert_eq!(w[0], n("T(3/4)"));
        assert!(w[1].is_zero());
    }

    #[test]
    fn koszul_differential_squares_to_zero() {
        let w = vec![n("T(1)"), n("T(1/2) - T(2)"), n("3*T(2)"), n("0")];
        let c = koszul_complex(&w, Extended::Finite(qi(10))).unwrap();
        assert_eq!(c.ranks(), &[1, 4, 6, 4, 1]);
    }

    #[test]
    fn floer_cohomology_examples() {
        let m = spheres(&[qi(1), qi(1)]);
        let dec = floer_cohomology(&m, &fiber(&[q(1, 2), q(1, 2)])).unwrap();
        assert_eq!(dec, ModuleDecomposition::free(4));

        let m = spheres(&[q(3, 2), qi(5), qi(5)]);
        let dec = floer_cohomology(&m, &fiber(&[q(3, 4), qi(2), qi(2)])).unwrap();
        assert_eq!(dec.betti, 0);
        assert_eq!(valmat::torsion_threshold(&dec), Extended::Finite(qi(2)));

        let m = MomentModel::product(&[MomentModel::plane(), MomentModel::sphere(qi(1)).unwrap()]).unwrap();
        let dec = floer_cohomology(&m, &fiber(&[q(3, 4), q(1, 2)])).unwrap();
        assert_eq!(dec, ModuleDecomposition::new(0, vec![q(3, 4), q(3, 4)]).unwrap());
        assert_eq!(displacement_bound(&m, &fiber(&[q(3, 4), q(1, 2)])).unwrap(), Extended::Finite(q(3, 4)));
    }

    #[test]
    fn equal_unit_components_give_min_valuation() {
        // w = (T^{3/2}, T^{3/2}) from two spheres S^2(2) at 3/2... off-equator
        let m = spheres(&[qi(2), qi(3)]);
        let u = fiber(&[q(1, 2), q(1, 2)]);
        let w = covector(&m, &u).unwrap();
        assert_eq!(w[0], n("T(1/2) - T(3/2)"));
        assert_eq!(w[1], n("T(1/2) - T(5/2)"));
        assert_eq!(torsion_threshold_at(&m, &u).unwrap(), Extended::Finite(q(1, 2)));
    }

    #[test]
    fn single_sphere_threshold_is_distance_to_nearer_pole() {
        let a = qi(3);
        let s = MomentModel::sphere(a.clone()).unwrap();
        for k in 1..12 {
            let pos = Q::new(k.into(), 4.into());
            let th = torsion_threshold_at(&s, &fiber(std::slice::from_ref(&pos))).unwrap();
            if pos == &a / qi(2) {
                assert_eq!(th, Extended::Infinity);
            } else {
                let expected = if pos < &a - &pos { pos.clone() } else { &a - &pos };
                assert_eq!(th, Extended::Finite(expected));
            }
        }
    }

    #[test]
    fn translation_and_permutation_invariance() {
        let m = spheres(&[q(3, 2), qi(5), qi(5)]);
        let u = fiber(&[q(3, 4), qi(2), q(5, 2)]);
        let base = torsion_threshold_at(&m, &u).unwrap();
        let shift = vec![q(1, 3), qi(-2), q(7, 5)];
        let moved = m.translated(&shift);
        let u2 = fiber(&u.0.iter().zip(&shift).map(|(a, b)| a + b).collect::<Vec<_>>());
        assert_eq!(torsion_threshold_at(&moved, &u2).unwrap(), base);

        let perm = spheres(&[qi(5), q(3, 2), qi(5)]);
        let up = fiber(&[qi(2), q(3, 4), q(5, 2)]);
        assert_eq!(torsion_threshold_at(&perm, &up).unwrap(), base);
    }

    #[test]
    fn bounds_of_products() {
        let m = MomentModel::product(&[
            MomentModel::sphere(q(3, 2)).unwrap(),
            MomentModel::projective_space(2, qi(10)).unwrap(),
            MomentModel::plane(),
        ])
        .unwrap();
        let b = m.coordinate_bounds();
        assert_eq!(b[0], (Some(qi(0)), Some(q(3, 2))));
        assert_eq!(b[1], (Some(qi(0)), Some(qi(10))));
        assert_eq!(b[3], (Some(qi(0)), None));
    }

    #[test]
    fn optimizer_examples() {
        let s1 = MomentModel::sphere(qi(1)).unwrap();
        let opt = optimize_threshold(&s1, 3, None).unwrap();
        assert_eq!(opt.point, fiber(&[q(1, 2)]));
        assert_eq!(opt.threshold, Extended::Infinity);

        let m = spheres(&[qi(1), qi(1)]);
        let opt = optimize_threshold(&m, 2, None).unwrap();
        assert_eq!(opt.point, fiber(&[q(1, 2), q(1, 2)]));
        assert_eq!(opt.threshold, Extended::Infinity);

        let c = MomentModel::plane();
        assert!(matches!(optimize_threshold(&c, 4, None), Err(ToricError::UnboundedRegion(0))));
        let capped = [(q(1, 10), qi(2))];
        let opt = optimize_threshold(&c, 4, Some(&capped)).unwrap();
        assert_eq!(opt.point, fiber(&[qi(2)]));
        assert_eq!(opt.threshold, Extended::Finite(qi(2)));
    }

    #[test]
    fn optimizer_reports_empty_interior() {
        let c = MomentModel::plane();
        let outside = [(qi(-2), qi(0))];
        assert!(matches!(optimize_threshold(&c, 2, Some(&outside)), Err(ToricError::EmptyInterior)));
    }

    #[test]
    fn model_specs() {
        let json = r#"{"product":[{"sphere":"3/2"},{"sphere":"5"},{"cp":{"k":2,"lambda":"10"}},{"cylinder":true}]}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.dim(), 5);
        assert_eq!(m.facets().len(), 2 + 2 + 3 + 1);
        assert_eq!(m.facets()[7].kind, FacetKind::Open);

        let json = r#"{"dim":1,"facets":[{"normal":[1],"offset":"0","kind":"closed"},{"normal":[-1],"offset":"-2","kind":"closed"}]}"#;
        let spec: ModelSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.build().unwrap().facets().len(), 2);

        let short = MomentModel::from_shorthand("sphere:3/2*sphere:5*cp:2:10*cylinder").unwrap();
        assert_eq!(short, m);
        assert!(MomentModel::from_shorthand("torus:1").is_err());
    }
}
