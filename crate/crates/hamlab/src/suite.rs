//! Seeded random verification suites.
//!
//! Case `i` of a suite draws its data from a ChaCha8 stream seeded with
//! `(seed, i)`, so cases are independent and reports are reproducible.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::{ExprHamiltonian, Hamiltonian};
use crate::flow::DEFAULT_MAX_STEP;
use crate::gauge::{gauge_minus, gauge_plus, Which};
use crate::hofer::{hofer_norms, Sampler};
use crate::profile::Profile;
use crate::space::PhaseSpace;
use crate::strip::{uniform_nodes, AnalyticStrip};
use crate::verify::{convergence_order, verify_action_telescoping, verify_actiondiff, verify_energy_identity, verify_hat};
use crate::HamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    ActionDiff,
    Energy,
    Hofer,
    Hat,
    Gauge,
    Telescoping,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::ActionDiff, Suite::Energy, Suite::Hofer, Suite::Hat, Suite::Gauge, Suite::Telescoping];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ActionDiff => "actiondiff",
            Suite::Energy => "energy",
            Suite::Hofer => "hofer",
            Suite::Hat => "hat",
            Suite::Gauge => "gauge",
            Suite::Telescoping => "telescoping",
        }
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::ActionDiff => 20,
            Suite::Energy => 50,
            Suite::Hofer => 20,
            Suite::Hat => 50,
            Suite::Gauge => 20,
            Suite::Telescoping => 10,
        }
    }

    pub fn default_resolution(self) -> f64 {
        match self {
            Suite::ActionDiff | Suite::Energy | Suite::Telescoping => 1.0 / 256.0,
            Suite::Hofer | Suite::Hat | Suite::Gauge => 1.0 / 16.0,
        }
    }
}

impl FromStr for Suite {
    type Err = HamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| HamError::Parse { input: s.into(), message: "expected actiondiff, energy, hofer, hat, gauge or telescoping".into() })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Grid spacing `h` for the quadrature suites.
    pub resolution: f64,
    pub tol: f64,
    /// Number of random instances; for `actiondiff` each instance is one
    /// strip paired with a linear and a quadratic Hamiltonian.
    pub cases: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite, seed: u64) -> Self {
        SuiteConfig { suite, seed, resolution: suite.default_resolution(), tol: 1e-6, cases: suite.default_cases() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub index: usize,
    pub description: String,
    pub discrepancy: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub resolution: f64,
    pub tol: f64,
    pub cases: usize,
    pub max_discrepancy: f64,
    /// Slope of `log max_discrepancy` against `log h` over `h`, `2h`, `4h`,
    /// for the suites with a grid.
    pub convergence_order: Option<f64>,
    pub results: Vec<CaseResult>,
    pub pass: bool,
}

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Coefficient rounded to six decimals, so expressions print exactly.
fn coef(rng: &mut ChaCha8Rng, amp: f64) -> f64 {
    (rng.gen_range(-amp..amp) * 1e6).round() / 1e6
}

fn r2() -> PhaseSpace {
    PhaseSpace::euclidean(1).expect("R2")
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> String {
    let c: Vec<f64> = (0..7).map(|_| coef(rng, 0.5)).collect();
    format!(
        "({})*x^2 + ({})*x*y + ({})*y^2 + ({})*x + ({})*y + ({})*t*x*y + ({})",
        c[0], c[1], c[2], c[3], c[4], c[5], c[6]
    )
}

fn random_linear(rng: &mut ChaCha8Rng) -> String {
    let c: Vec<f64> = (0..4).map(|_| coef(rng, 1.0)).collect();
    format!("({})*x + ({})*y + ({})*t*x + ({})", c[0], c[1], c[2], c[3])
}

fn random_trig(rng: &mut ChaCha8Rng) -> String {
    let c: Vec<f64> = (0..5).map(|_| coef(rng, 1.0)).collect();
    format!(
        "({})*sin(x) + ({})*cos(y) + ({})*sin(x + y)*t + ({})*cos(x - 2*y) + ({})*t",
        c[0], c[1], c[2], c[3], c[4]
    )
}

/// Strip `A(t)(1 − σ(τ)) + B(t)σ(τ) + e^{−τ²}C(t)` with `σ = (1 + tanh τ)/2`.
fn random_decaying_strip(rng: &mut ChaCha8Rng) -> [String; 2] {
    let mut coord = || {
        let a: Vec<f64> = (0..3).map(|_| coef(rng, 0.15)).collect();
        let b: Vec<f64> = (0..3).map(|_| coef(rng, 0.15)).collect();
        let c: Vec<f64> = (0..2).map(|_| coef(rng, 0.1)).collect();
        format!(
            "(({}) + ({})*t + ({})*sin(pi*t))*(1 - tanh(tau))/2 + (({}) + ({})*t + ({})*sin(pi*t))*(1 + tanh(tau))/2 + exp(-tau^2)*(({})*sin(pi*t) + ({})*cos(pi*t))",
            a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1]
        )
    };
    [coord(), coord()]
}

fn random_square_strip(rng: &mut ChaCha8Rng) -> [String; 2] {
    let c: Vec<f64> = (0..6).map(|_| coef(rng, 0.5)).collect();
    [
        format!("({}) + s + ({})*sin(pi*t) + ({})*s*t", c[0], c[1], c[2]),
        format!("({}) + t + ({})*s*s + ({})*cos(pi*s*t)", c[3], c[4], c[5]),
    ]
}

fn strip(src: &[String; 2]) -> Result<AnalyticStrip, HamError> {
    AnalyticStrip::parse(&r2(), &[src[0].as_str(), src[1].as_str()])
}

fn ham(src: &str) -> Result<Arc<dyn Hamiltonian>, HamError> {
    Ok(Arc::new(ExprHamiltonian::parse(&r2(), src)?))
}

/// Per-case discrepancies, one per resolution in `[4h, 2h, h]` order when
/// the suite has a grid, otherwise a single entry.
type CaseOutput = (String, Vec<f64>);

fn grid_levels(h: f64) -> Result<[usize; 3], HamError> {
    let n = (1.0 / h).round() as usize;
    if !(h > 0.0) || n < 16 || !n.is_multiple_of(16) {
        return Err(HamError::Invalid(format!("resolution {h} must be 1/n with n a multiple of 16")));
    }
    Ok([n / 4, n / 2, n])
}

fn run_case(config: &SuiteConfig, index: usize) -> Result<Vec<CaseOutput>, HamError> {
    let mut rng = rng_for(config.seed, index);
    let pi = PI;
    match config.suite {
        Suite::Energy => {
            let src = random_decaying_strip(&mut rng);
            let h = random_quadratic(&mut rng);
            let rho = if index.is_multiple_of(2) { Profile::RhoPlus } else { Profile::RhoK(2.0) };
            let u = strip(&src)?;
            let hh = ham(&h)?;
            let errs = grid_levels(config.resolution)?
                .iter()
                .map(|n| verify_energy_identity(&u, hh.as_ref(), rho, 3.0, *n, config.tol).map(|r| r.discrepancy))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(vec![(format!("rho={rho}; H={h}"), errs)])
        }
        Suite::ActionDiff => {
            let src = random_square_strip(&mut rng);
            let w = strip(&src)?;
            let levels = grid_levels(config.resolution)?;
            [random_linear(&mut rng), random_quadratic(&mut rng)]
                .into_iter()
                .map(|h| {
                    let hh = ham(&h)?;
                    let mut errs = Vec::new();
                    for n in &levels[..2] {
                        errs.push(verify_actiondiff(hh.as_ref(), &w, *n, DEFAULT_MAX_STEP, config.tol)?.raw_discrepancy);
                    }
                    let fine = verify_actiondiff(hh.as_ref(), &w, levels[2], DEFAULT_MAX_STEP, config.tol)?;
                    errs.push(fine.raw_discrepancy);
                    errs.push(fine.discrepancy);
                    Ok((format!("H={h}; w=({}, {})", src[0], src[1]), errs))
                })
                .collect()
        }
        Suite::Hofer => {
            let a = coef(&mut rng, 2.0);
            let b = coef(&mut rng, 2.0);
            let c = coef(&mut rng, 2.0);
            let e = coef(&mut rng, 1.0);
            let src = format!("(1 + ({e})*t)*(({a})*sin(x - 1) + ({b})*cos(y + 2)) + ({c})");
            let hh = ham(&src)?;
            let norms = hofer_norms(hh.as_ref(), &Sampler::with_box(-pi, pi).points(4000).time_intervals(8))?;
            let scale = 1.0 + e / 2.0;
            let oracle_minus = (a.abs() + b.abs()) * scale - c;
            let oracle_plus = (a.abs() + b.abs()) * scale + c;
            let identity = (norms.e_minus + norms.e_plus - norms.norm).abs();
            let err = (norms.e_minus - oracle_minus).abs().max((norms.e_plus - oracle_plus).abs()).max(identity);
            Ok(vec![(format!("H={src}"), vec![err])])
        }
        Suite::Hat => {
            let h0 = random_trig(&mut rng);
            let h1 = random_trig(&mut rng);
            let sampler = Sampler::with_box(-pi, pi).points(2000).time_intervals(8);
            let points = ((1.0 / config.resolution).round() as usize + 1).pow(2);
            let r = verify_hat(ham(&h0)?, ham(&h1)?, &sampler, points, 1e-2, 0.0)?;
            let violation = (-r.slack_minus).max(-r.slack_plus).max(0.0);
            Ok(vec![(format!("H0={h0}; H1={h1}"), vec![violation])])
        }
        Suite::Gauge => {
            let src = random_square_strip(&mut rng);
            let h = random_quadratic(&mut rng);
            let hh = ham(&h)?;
            let n = (1.0 / config.resolution).round() as usize;
            let w = strip(&src)?.sample(&uniform_nodes(0.0, 1.0, n), &uniform_nodes(0.0, 1.0, n));
            let mut worst: f64 = 0.0;
            for which in [Which::First, Which::Second] {
                let back = gauge_minus(hh.as_ref(), which, &gauge_plus(hh.as_ref(), which, &w, DEFAULT_MAX_STEP)?, DEFAULT_MAX_STEP)?;
                for i in 0..=n {
                    for j in 0..=n {
                        for (p, q) in back.get(i, j).iter().zip(w.get(i, j)) {
                            worst = worst.max((p - q).abs());
                        }
                    }
                }
            }
            Ok(vec![(format!("H={h}"), vec![worst])])
        }
        Suite::Telescoping => {
            let src = random_decaying_strip(&mut rng);
            let h = random_quadratic(&mut rng);
            let rho = if index.is_multiple_of(2) { Profile::RhoPlus } else { Profile::RhoK(2.0) };
            let n = (1.0 / config.resolution).round() as usize;
            let r = verify_action_telescoping(&strip(&src)?, &["0", "t"], ham(&h)?.as_ref(), rho, 3.0, n, config.tol)?;
            let err = if r.checks.iter().all(|c| c.holds || c.requires_solution) { r.discrepancy } else { f64::INFINITY };
            Ok(vec![(format!("rho={rho}; H={h}"), vec![err])])
        }
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, HamError> {
    if !(config.tol > 0.0) {
        return Err(HamError::Invalid(format!("tolerance {} must be positive", config.tol)));
    }
    let outputs = (0..config.cases).into_par_iter().map(|i| run_case(config, i)).collect::<Result<Vec<_>, _>>()?;
    let tol = match config.suite {
        Suite::Hat | Suite::Gauge => config.tol.min(1e-8),
        _ => config.tol,
    };
    let mut results = Vec::new();
    let mut levels: Vec<f64> = Vec::new();
    for (index, case) in outputs.into_iter().enumerate() {
        for (description, errs) in case {
            let headline = *errs.last().expect("nonempty");
            if errs.len() > 1 {
                if levels.is_empty() {
                    levels = vec![0.0; 3];
                }
                for (l, e) in levels.iter_mut().zip(&errs) {
                    *l = l.max(*e);
                }
            }
            results.push(CaseResult { index, description, discrepancy: headline, pass: headline <= tol });
        }
    }
    let max_discrepancy = results.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    let convergence_order = if levels.is_empty() {
        None
    } else {
        let h = config.resolution;
        Some(convergence_order(&[(4.0 * h, levels[0]), (2.0 * h, levels[1]), (h, levels[2])]))
    };
    let order_ok = convergence_order.is_none_or(|p| (p - 2.0).abs() <= 0.3);
    let pass = !results.is_empty() && results.iter().all(|r| r.pass) && order_ok;
    Ok(SuiteReport {
        suite: config.suite,
        seed: config.seed,
        resolution: config.resolution,
        tol,
        cases: results.len(),
        max_discrepancy,
        convergence_order,
        results,
        pass,
    })
}
