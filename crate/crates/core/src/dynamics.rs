//! The fixed-point iteration `φ_{n+1} = P(|φ_n|^{p−2}φ_n) / ‖P(|φ_n|^{p−2}φ_n)‖₂`
//! on the unit sphere of 1-homogeneous polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polyalg::CoefVec;
use crate::projection::normalized_op;
use crate::quadrature::QuadratureSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingRule {
    pub max_iters: usize,
    /// Convergence threshold on the `H²` distance of successive iterates.
    pub fixed_point_tol: f64,
    /// Give up when the smallest residual has not improved for this many
    /// steps and the iterates are only jittering in place.
    pub stall_window: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule { max_iters: 500, fixed_point_tol: 1e-10, stall_window: 25 }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.fixed_point_tol > 0.0) {
            return Err(Error::invalid("fixed_point_tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    EqualModulusLimit,
    SingleCoordinateLimit,
    FixedFromStart,
    Unresolved,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::EqualModulusLimit => "equal-modulus-limit",
            Classification::SingleCoordinateLimit => "single-coordinate-limit",
            Classification::FixedFromStart => "fixed-from-start",
            Classification::Unresolved => "unresolved",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A recorded run of the iteration. `iterates[0]` is the (normalized) start.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub p: f64,
    pub start: CoefVec,
    pub iterates: Vec<CoefVec>,
    /// `residuals[n] = ‖iterates[n+1] − iterates[n]‖₂`.
    pub residuals: Vec<f64>,
    pub classification: Classification,
    pub converged: bool,
    /// Set when the run stopped early because of a numerical failure.
    pub note: Option<String>,
    tol: f64,
}

impl IterationTrace {
    pub fn last(&self) -> &CoefVec {
        self.iterates.last().expect("a trace always holds its start")
    }

    /// Moduli of every iterate, row by row.
    pub fn moduli(&self) -> Vec<Vec<f64>> {
        self.iterates.iter().map(CoefVec::moduli).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let iterates: Vec<Vec<[f64; 2]>> =
            self.iterates.iter().map(|c| c.to_c64().iter().map(|z| [z.re, z.im]).collect()).collect();
        serde_json::json!({
            "p": self.p,
            "iterates": iterates,
            "residuals": self.residuals,
            "classification": self.classification,
            "converged": self.converged,
            "note": self.note,
        })
    }
}

/// Runs the iteration from `c0` (normalized first if needed).
///
/// The quadrature tolerance is tightened to a hundredth of the fixed-point
/// tolerance so that integration noise cannot masquerade as motion. A
/// numerical failure mid-run ends the trace with an `unresolved` verdict and
/// the error in `note`.
pub fn iterate(c0: &CoefVec, p: f64, rule: &StoppingRule, spec: &QuadratureSpec) -> Result<IterationTrace> {
    rule.validate()?;
    spec.validate()?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    if c0.is_trivial() {
        return Err(Error::invalid("the start vector is zero"));
    }
    let start = if (c0.h2_norm() - 1.0).abs() <= 1e-12 { c0.clone() } else { c0.normalized()? };
    let inner = spec.with_tol(spec.target_tol.min(rule.fixed_point_tol * 1e-2));
    let mut iterates = vec![start.clone()];
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut note = None;
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    for n in 0..rule.max_iters {
        let cur = iterates.last().unwrap();
        let next = match normalized_op(cur, p, &inner) {
            Ok(v) => v,
            Err(e) => {
                note = Some(format!("stopped at step {n}: {e}"));
                break;
            }
        };
        let r = next.distance(cur);
        residuals.push(r);
        iterates.push(next);
        if r < rule.fixed_point_tol {
            converged = true;
            break;
        }
        if r < best {
            best = r;
            best_at = n;
        } else if rule.stall_window > 0 && n - best_at >= rule.stall_window && jittering(&iterates, &residuals, rule.stall_window) {
            note = Some(format!("residual stalled at {best:.3e}"));
            break;
        }
    }
    let mut trace = IterationTrace {
        p,
        start,
        iterates,
        residuals,
        classification: Classification::Unresolved,
        converged,
        note,
        tol: rule.fixed_point_tol,
    };
    trace.classification = classify_limit(&trace);
    Ok(trace)
}

/// Over the last `window` steps the iterates went nowhere: the net
/// displacement is under half the distance travelled. A slow escape from a
/// saddle moves coherently and is not caught by this.
fn jittering(iterates: &[CoefVec], residuals: &[f64], window: usize) -> bool {
    let n = iterates.len() - 1;
    if n < window {
        return false;
    }
    let travelled: f64 = residuals[residuals.len() - window..].iter().sum();
    iterates[n].distance(&iterates[n - window]) < 0.5 * travelled
}

/// Labels the end state of a trace.
///
/// Checked in order: no motion at the first step, all nonzero moduli equal
/// to `10·tol`, exactly one modulus above `1 − 10·tol`; otherwise unresolved.
pub fn classify_limit(trace: &IterationTrace) -> Classification {
    let tol = trace.tol;
    if trace.residuals.first().is_some_and(|&r| r < tol) {
        return Classification::FixedFromStart;
    }
    if !trace.converged {
        return Classification::Unresolved;
    }
    let m: Vec<f64> = trace.last().moduli().into_iter().filter(|&x| x > 0.0).collect();
    let hi = m.iter().copied().fold(0.0, f64::max);
    let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo <= 10.0 * tol {
        return Classification::EqualModulusLimit;
    }
    if m.iter().filter(|&&x| x > 1.0 - 10.0 * tol).count() == 1 {
        return Classification::SingleCoordinateLimit;
    }
    Classification::Unresolved
}

/// A uniformly distributed point of the positive orthant of the unit sphere
/// in `ℝ^d`, optionally with independent uniform phases.
pub fn random_start(d: usize, rng: &mut impl Rng, phases: bool) -> CoefVec {
    loop {
        let m: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
        let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let z: Vec<Complex64> = m
            .iter()
            .map(|&x| {
                let arg = if phases { rng.random_range(0.0..std::f64::consts::TAU) } else { 0.0 };
                Complex64::from_polar(x / norm, arg)
            })
            .collect();
        return CoefVec::from_c64(&z).expect("d ≥ 1");
    }
}

/// Seeded batch of iterations from random starts with a strict largest
/// coefficient, tallying how often the limit is the largest coordinate.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub d: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub random_phases: bool,
    pub rule: StoppingRule,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub d: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Trials whose limit is the coordinate that was largest at the start.
    pub largest_coordinate_limits: usize,
    pub fraction_largest: f64,
    pub classifications: BTreeMap<String, usize>,
    /// Trials in which the largest modulus decreased at some step.
    pub monotonicity_violations: usize,
    pub failures: Vec<String>,
}

impl Experiment {
    pub fn run(&self, spec: &QuadratureSpec) -> Result<ExperimentReport> {
        if self.d < 2 {
            return Err(Error::invalid("experiments need d ≥ 2"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut starts = Vec::with_capacity(self.trials);
        while starts.len() < self.trials {
            let c = random_start(self.d, &mut rng, self.random_phases);
            if strict_argmax(&c.moduli()).is_some() {
                starts.push(c);
            }
        }
        let traces: Vec<Result<IterationTrace>> =
            starts.par_iter().map(|c| iterate(c, self.p, &self.rule, spec)).collect();

        let mut report = ExperimentReport {
            d: self.d,
            p: self.p,
            trials: self.trials,
            seed: self.seed,
            largest_coordinate_limits: 0,
            fraction_largest: 0.0,
            classifications: BTreeMap::new(),
            monotonicity_violations: 0,
            failures: Vec::new(),
        };
        for (c, t) in starts.iter().zip(traces) {
            let t = match t {
                Ok(t) => t,
                Err(e) => {
                    report.failures.push(e.to_string());
                    continue;
                }
            };
            *report.classifications.entry(t.classification.to_string()).or_default() += 1;
            let jmax = strict_argmax(&c.moduli()).unwrap();
            if t.classification == Classification::SingleCoordinateLimit
                && strict_argmax(&t.last().moduli()) == Some(jmax)
            {
                report.largest_coordinate_limits += 1;
            }
            let tops: Vec<f64> = t.moduli().iter().map(|m| m.iter().copied().fold(0.0, f64::max)).collect();
            if tops.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                report.monotonicity_violations += 1;
            }
        }
        if self.trials > 0 {
            report.fraction_largest = report.largest_coordinate_limits as f64 / self.trials as f64;
        }
        Ok(report)
    }
}

fn strict_argmax(m: &[f64]) -> Option<usize> {
    let (j, &top) = m.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    (m.iter().filter(|&&x| x == top).count() == 1).then_some(j)
}
