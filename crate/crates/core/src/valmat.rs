//! Linear algebra over the valuation ring `Λ_{0,nov}`.
//!
//! `Λ_{0,nov}` is not Noetherian, but every finitely generated ideal is
//! principal: a finite set of elements is generated by any one of minimum
//! valuation, since every other element is an exact multiple of it. The
//! Smith form below pivots on a minimum-valuation entry of the remaining
//! block and clears its row and column with [`NovikovElement::divide_exact`];
//! the quotients always lie in `Λ_{0,nov}`.
//!
//! Matrices share one truncation level `τ` and represent classes modulo
//! `T^τ`. Because the pivot has minimum valuation, every elimination step is
//! exact modulo `T^τ`, so `U·M·V = D` holds entrywise up to `τ`.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::novikov::{NovikovElement, NovikovError};
use crate::rational::{fmt_q, serde_q_vec, Extended, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValmatError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("entry ({row}, {col}) = {value} is not in Λ_0,nov")]
    NotIntegral { row: usize, col: usize, value: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a complex: the composite of d at degree {degree} and the next differential has an entry of valuation {valuation} below the truncation level")]
    NotAComplex { degree: usize, valuation: String },
    #[error("degree {0} is outside the complex")]
    DegreeOutOfRange(usize),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
}

fn lift(err: NovikovError) -> ValmatError {
    match err {
        NovikovError::PrecisionExhausted => ValmatError::PrecisionExhausted(
            "a pivot is not a monomial and the matrix has no finite truncation level".into(),
        ),
        other => ValmatError::Novikov(other),
    }
}

/// Dense matrix of Novikov elements sharing one truncation level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovMatrix {
    rows: usize,
    cols: usize,
    trunc: Extended,
    entries: Vec<NovikovElement>,
}

impl NovikovMatrix {
    /// Builds a matrix from row-major entries. The shared level is the
    /// minimum of `trunc` and the entries' own levels.
    pub fn new(
        rows: usize,
        cols: usize,
        entries: Vec<NovikovElement>,
        trunc: Extended,
    ) -> Result<Self, ValmatError> {
        if entries.len() != rows * cols {
            return Err(ValmatError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let level = entries.iter().fold(trunc, |acc, e| acc.min(e.trunc().clone()));
        let entries = entries.iter().map(|e| e.truncated(&level)).collect();
        Ok(NovikovMatrix { rows, cols, trunc: level, entries })
    }

    pub fn from_rows(rows: Vec<Vec<NovikovElement>>, trunc: Extended) -> Result<Self, ValmatError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ValmatError::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect(), trunc)
    }

    pub fn zeros(rows: usize, cols: usize, trunc: Extended) -> Self {
        let entries = vec![NovikovElement::zero().truncated(&trunc); rows * cols];
        NovikovMatrix { rows, cols, trunc, entries }
    }

    pub fn identity(n: usize, trunc: Extended) -> Self {
        let mut m = Self::zeros(n, n, trunc);
        for i in 0..n {
            m.set(i, i, NovikovElement::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn trunc(&self) -> &Extended {
        &self.trunc
    }

    pub fn get(&self, r: usize, c: usize) -> &NovikovElement {
        &self.entries[r * self.cols + c]
    }

    /// Stores `value` reduced modulo the matrix level.
    pub fn set(&mut self, r: usize, c: usize, value: NovikovElement) {
        let value = value.into_exact().truncated(&self.trunc);
        self.entries[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[NovikovElement] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[NovikovElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.trunc.clone());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Matrix product; the level is the minimum of the two levels.
    pub fn mul(&self, other: &Self) -> Result<Self, ValmatError> {
        if self.cols != other.rows {
            return Err(ValmatError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let level = self.trunc.clone().min(other.trunc.clone());
        let mut out = Self::zeros(self.rows, other.cols, level);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = NovikovElement::zero();
                for k in 0..self.cols {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(&a.clone().into_exact() * &b.clone().into_exact());
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// True when every entry vanishes modulo the matrix level.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(NovikovElement::is_zero)
    }

    /// Smallest valuation among the entries.
    pub fn min_valuation(&self) -> Extended {
        self.entries
            .iter()
            .map(NovikovElement::valuation)
            .min()
            .unwrap_or(Extended::Infinity)
    }

    pub fn check_integral(&self) -> Result<(), ValmatError> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                if !e.in_lambda0() {
                    return Err(ValmatError::NotIntegral { row: r, col: c, value: e.to_text() });
                }
            }
        }
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[target] -= factor * row[source]`.
    fn row_axpy(&mut self, target: usize, source: usize, factor: &NovikovElement) {
        self.row_axpy_from(target, source, factor, 0)
    }

    /// `row_axpy` restricted to columns `first..`.
    fn row_axpy_from(&mut self, target: usize, source: usize, factor: &NovikovElement, first: usize) {
        for c in first..self.cols {
            let s = self.get(source, c);
            if s.is_zero() {
                continue;
            }
            let updated = self.get(target, c) - &(factor * s);
            self.set(target, c, updated);
        }
    }

    /// `col[target] -= factor * col[source]`.
    fn col_axpy(&mut self, target: usize, source: usize, factor: &NovikovElement) {
        for r in 0..self.rows {
            let s = self.get(r, source);
            if s.is_zero() {
                continue;
            }
            let updated = self.get(r, target) - &(factor * s);
            self.set(r, target, updated);
        }
    }

    pub fn scale_row(&mut self, r: usize, factor: &NovikovElement) {
        for c in 0..self.cols {
            let updated = factor * &self.get(r, c).clone().into_exact();
            self.set(r, c, updated);
        }
    }

    /// Adds `factor * row[source]` to `row[target]` (public elementary operation).
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &NovikovElement) {
        self.row_axpy(target, source, &-factor);
    }

    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &NovikovElement) {
        self.col_axpy(target, source, &-factor);
    }

    pub fn scale_col(&mut self, c: usize, factor: &NovikovElement) {
        for r in 0..self.rows {
            let updated = factor * &self.get(r, c).clone().into_exact();
            self.set(r, c, updated);
        }
    }
}

impl fmt::Display for NovikovMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_text()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// JSON shape `{rows, cols, entries: [[text, ...], ...], trunc?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<Extended>,
}

impl NovikovMatrix {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|r| self.row(r).iter().map(|e| e.clone().into_exact().to_text()).collect())
                .collect(),
            trunc: Some(self.trunc.clone()),
        }
    }

    /// Parses the JSON form; `default_trunc` applies when the file omits `trunc`.
    pub fn from_json(json: &MatrixJson, default_trunc: Extended) -> Result<Self, ValmatError> {
        if json.entries.len() != json.rows {
            return Err(ValmatError::Shape(format!(
                "declared {} rows, found {}",
                json.rows,
                json.entries.len()
            )));
        }
        let mut entries = Vec::with_capacity(json.rows * json.cols);
        for row in &json.entries {
            if row.len() != json.cols {
                return Err(ValmatError::Shape(format!(
                    "declared {} columns, found a row of length {}",
                    json.cols,
                    row.len()
                )));
            }
            for text in row {
                entries.push(text.parse::<NovikovElement>()?);
            }
        }
        let trunc = json.trunc.clone().unwrap_or(default_trunc);
        Self::new(json.rows, json.cols, entries, trunc)
    }
}

/// `U · M · V = D` with `U`, `V` invertible over `Λ_{0,nov}` and `D`
/// diagonal with monomial pivots `T^{v₁}, T^{v₂}, …`, `v₁ ≤ v₂ ≤ …`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: NovikovMatrix,
    pub d: NovikovMatrix,
    pub v: NovikovMatrix,
    /// Valuations of the nonzero diagonal entries, in order.
    pub pivots: Vec<Q>,
}

impl SmithForm {
    /// Rank over the field `Λ_nov` (number of pivots nonzero modulo `T^τ`).
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Smith normal form over `Λ_{0,nov}`.
///
/// Pivot: an entry of minimum valuation in the remaining block, ties broken by
/// the lowest `(row, col)`. Its row and column are cleared by exact division,
/// then the pivot is normalized to `T^v` by a unit row scaling.
pub fn smith_normal_form(m: &NovikovMatrix) -> Result<SmithForm, ValmatError> {
    let (d, transforms, pivots) = reduce(m, true)?;
    let (u, v) = transforms.expect("transforms are tracked");
    Ok(SmithForm { u, d, v, pivots })
}

/// Pivot valuations only, skipping the transformation matrices.
pub fn smith_pivots(m: &NovikovMatrix) -> Result<Vec<Q>, ValmatError> {
    Ok(reduce(m, false)?.2)
}

type Transforms = (NovikovMatrix, NovikovMatrix);

fn reduce(m: &NovikovMatrix, track: bool) -> Result<(NovikovMatrix, Option<Transforms>, Vec<Q>), ValmatError> {
    m.check_integral()?;
    let level = m.trunc.clone();
    let mut d = m.clone();
    let mut uv = track.then(|| (NovikovMatrix::identity(m.rows, level.clone()), NovikovMatrix::identity(m.cols, level.clone())));
    let mut pivots = Vec::new();
    for k in 0..m.rows.min(m.cols) {
        let mut best: Option<(Q, usize, usize)> = None;
        for r in k..d.rows {
            for c in k..d.cols {
                if let Extended::Finite(val) = d.get(r, c).valuation() {
                    if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
                        best = Some((val, r, c));
                    }
                }
            }
        }
        let Some((val, pr, pc)) = best else { break };
        d.swap_rows(k, pr);
        d.swap_cols(k, pc);
        if let Some((u, v)) = uv.as_mut() {
            u.swap_rows(k, pr);
            v.swap_cols(k, pc);
        }

        let pivot = d.get(k, k).clone();
        for r in k + 1..d.rows {
            if d.get(r, k).is_zero() {
                continue;
            }
            let factor = d.get(r, k).divide_exact(&pivot).map_err(lift)?.into_exact();
            d.row_axpy_from(r, k, &factor, k);
            if let Some((u, _)) = uv.as_mut() {
                u.row_axpy(r, k, &factor);
            }
        }
        pivots.push(val.clone());
        // once column k is cleared, row k no longer affects the remaining block
        let Some((u, v)) = uv.as_mut() else { continue };
        for c in k + 1..d.cols {
            if d.get(k, c).is_zero() {
                continue;
            }
            let factor = d.get(k, c).divide_exact(&pivot).map_err(lift)?.into_exact();
            d.col_axpy(c, k, &factor);
            v.col_axpy(c, k, &factor);
        }
        let monomial = NovikovElement::t_power(val.clone());
        if !pivot.clone().into_exact().eq_up_to_trunc(&monomial) {
            let unit_inv = monomial.divide_exact(&pivot).map_err(lift)?.into_exact();
            d.scale_row(k, &unit_inv);
            u.scale_row(k, &unit_inv);
        }
    }
    Ok((d, uv, pivots))
}

/// Finite cochain complex `C⁰ → C¹ → … → Cⁿ` over `Λ_{0,nov}`.
///
/// `differentials[k]` is the matrix of `d_k : C^k → C^{k+1}` acting on
/// column vectors, so it has shape `ranks[k+1] × ranks[k]`.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    differentials: Vec<NovikovMatrix>,
}

impl ChainComplex {
    /// Validates shapes, integrality and `d ∘ d = 0` modulo truncation.
    pub fn new(ranks: Vec<usize>, differentials: Vec<NovikovMatrix>) -> Result<Self, ValmatError> {
        if ranks.is_empty() {
            return Err(ValmatError::Shape("a complex needs at least one degree".into()));
        }
        if differentials.len() + 1 != ranks.len() {
            return Err(ValmatError::Shape(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.rows != ranks[k + 1] || d.cols != ranks[k] {
                return Err(ValmatError::Shape(format!(
                    "d_{k} is {}x{}, expected {}x{}",
                    d.rows,
                    d.cols,
                    ranks[k + 1],
                    ranks[k]
                )));
            }
            d.check_integral()?;
        }
        for k in 0..differentials.len().saturating_sub(1) {
            let composite = differentials[k + 1].mul(&differentials[k])?;
            if !composite.is_zero() {
                return Err(ValmatError::NotAComplex {
                    degree: k,
                    valuation: composite.min_valuation().render(),
                });
            }
        }
        Ok(ChainComplex { ranks, differentials })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn differentials(&self) -> &[NovikovMatrix] {
        &self.differentials
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }
}

/// `Λ_{0,nov}^{⊕a} ⊕ ⊕ᵢ Λ_{0,nov}/T^{λᵢ}Λ_{0,nov}` with `λ₁ ≥ λ₂ ≥ … > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDecomposition {
    pub betti: usize,
    #[serde(with = "serde_q_vec")]
    torsion: Vec<Q>,
}

impl ModuleDecomposition {
    /// Sorts the exponents descending; rejects nonpositive exponents.
    pub fn new(betti: usize, mut torsion: Vec<Q>) -> Result<Self, ValmatError> {
        if let Some(bad) = torsion.iter().find(|t| !t.is_positive()) {
            return Err(ValmatError::InvalidDecomposition(format!(
                "torsion exponent {} is not positive",
                fmt_q(bad)
            )));
        }
        torsion.sort_by(|a, b| b.cmp(a));
        Ok(ModuleDecomposition { betti, torsion })
    }

    pub fn free(betti: usize) -> Self {
        ModuleDecomposition { betti, torsion: Vec::new() }
    }

    /// Torsion exponents in descending order.
    pub fn torsion(&self) -> &[Q] {
        &self.torsion
    }

    /// Direct sum of two decompositions.
    pub fn sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        torsion.sort_by(|a, b| b.cmp(a));
        ModuleDecomposition { betti: self.betti + other.betti, torsion }
    }
}

impl fmt::Display for ModuleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let torsion: Vec<String> = self.torsion.iter().map(fmt_q).collect();
        write!(f, "betti {} torsion {{{}}}", self.betti, torsion.join(", "))
    }
}

/// Decomposition of `H^k = ker d_k / im d_{k-1}`.
///
/// Over a valuation ring `ker d_k` is a direct summand of `C^k`, so the
/// torsion of `H^k` is the torsion of `C^k / im d_{k-1}`: one summand per
/// pivot of `d_{k-1}` with positive valuation. The free rank is
/// `r_k − rank d_k − rank d_{k-1}` with ranks over `Λ_nov`.
pub fn decompose(c: &ChainComplex, degree: usize) -> Result<ModuleDecomposition, ValmatError> {
    if degree > c.top_degree() {
        return Err(ValmatError::DegreeOutOfRange(degree));
    }
    let outgoing = match c.differentials.get(degree) {
        Some(d) => smith_pivots(d)?.len(),
        None => 0,
    };
    let (incoming, torsion) = if degree > 0 {
        let pivots = smith_pivots(&c.differentials[degree - 1])?;
        let torsion: Vec<Q> = pivots.iter().filter(|v| v.is_positive()).cloned().collect();
        (pivots.len(), torsion)
    } else {
        (0, Vec::new())
    };
    let rank = c.ranks[degree];
    if outgoing + incoming > rank {
        return Err(ValmatError::PrecisionExhausted(format!(
            "ranks of the differentials at degree {degree} exceed the module rank"
        )));
    }
    ModuleDecomposition::new(rank - outgoing - incoming, torsion)
}

/// Per-degree decompositions, degree 0 first.
pub fn decompose_all(c: &ChainComplex) -> Result<Vec<ModuleDecomposition>, ValmatError> {
    let snfs: Vec<Vec<Q>> = c.differentials.iter().map(smith_pivots).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(c.ranks.len());
    for (k, &rank) in c.ranks.iter().enumerate() {
        let outgoing = snfs.get(k).map_or(0, Vec::len);
        let (incoming, torsion) = if k > 0 {
            let pivots = &snfs[k - 1];
            (pivots.len(), pivots.iter().filter(|v| v.is_positive()).cloned().collect())
        } else {
            (0, Vec::new())
        };
        if outgoing + incoming > rank {
            return Err(ValmatError::PrecisionExhausted(format!(
                "ranks of the differentials at degree {k} exceed the module rank"
            )));
        }
        out.push(ModuleDecomposition::new(rank - outgoing - incoming, torsion)?);
    }
    Ok(out)
}

/// Aggregate over all degrees.
pub fn decompose_total(c: &ChainComplex) -> Result<ModuleDecomposition, ValmatError> {
    Ok(decompose_all(c)?
        .iter()
        .fold(ModuleDecomposition::free(0), |acc, d| acc.sum(d)))
}

/// Number of torsion exponents `≥ lam`.
pub fn b_count(dec: &ModuleDecomposition, lam: &Q) -> usize {
    dec.torsion.iter().filter(|t| *t >= lam).count()
}

/// Lower bound `a + 2·b(‖ψ‖)` on the number of intersection points.
pub fn theorem_j_bound(dec: &ModuleDecomposition, hofer: &Q) -> usize {
    dec.betti + 2 * b_count(dec, hofer)
}

/// Largest torsion exponent when the free part vanishes, `+∞` otherwise,
/// and 0 for the zero module.
pub fn torsion_threshold(dec: &ModuleDecomposition) -> Extended {
    if dec.betti > 0 {
        return Extended::Infinity;
    }
    Extended::Finite(dec.torsion.first().cloned().unwrap_or_else(|| Q::from_integer(0.into())))
}

/// Outcome of one index in [`lipschitz_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzEntry {
    /// 1-based position in the descending order.
    pub index: usize,
    pub lambda: String,
    pub lambda_prime: Option<String>,
    /// `i ≤ b'` holds.
    pub count_ok: bool,
    /// `Some(|λ_i − λ'_i| ≤ ν₀)` when both exponents exceed `ν₀`.
    pub distance_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzReport {
    pub nu0: String,
    pub entries: Vec<LipschitzEntry>,
    pub pass: bool,
}

/// Checks the stability statement for two sorted torsion sequences.
///
/// For every `i` with `λ_i > ν₀`: the second sequence has at least `i`
/// exponents, and if also `λ'_i > ν₀` then `|λ_i − λ'_i| ≤ ν₀`. Exponents at
/// or below `ν₀` carry no constraint. This only reports; it never asserts.
pub fn lipschitz_check(dec: &ModuleDecomposition, other: &ModuleDecomposition, nu0: &Q) -> LipschitzReport {
    let b_prime = other.torsion.len();
    let mut entries = Vec::new();
    for (i, lambda) in dec.torsion.iter().enumerate() {
        if lambda <= nu0 {
            continue;
        }
        let index = i + 1;
        let lambda_prime = other.torsion.get(i);
        let distance_ok = lambda_prime
            .filter(|lp| *lp > nu0)
            .map(|lp| (lambda - lp).abs() <= *nu0);
        entries.push(LipschitzEntry {
            index,
            lambda: fmt_q(lambda),
            lambda_prime: lambda_prime.map(fmt_q),
            count_ok: index <= b_prime,
            distance_ok,
        });
    }
    let pass = entries.iter().all(|e| e.count_ok && e.distance_ok.unwrap_or(true));
    LipschitzReport { nu0: fmt_q(nu0), entries, pass }
}
