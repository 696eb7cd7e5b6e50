use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{update_classical, update_modified, ShiftGuard, TorusState};
use crate::fourier::{DiophantineData, FourierModel, StripSchedule};
use crate::geometry::HamiltonianSystem;
use crate::linalg::condition;
use crate::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateRule {
    #[default]
    Modified,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub max_iter: usize,
    pub tol: f64,
    #[serde(default)]
    pub update: UpdateRule,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self { max_iter: 10, tol: 1e-11, update: UpdateRule::Modified }
    }
}

/// One line of the iteration log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub weighted_error: f64,
    pub eta_l: f64,
    pub eta_n: f64,
    pub avg_eta_n: f64,
    pub invariance_error: f64,
    pub rho: f64,
    pub delta: f64,
    pub spectral_tail: f64,
    pub torsion_condition: f64,
    pub omega_l: f64,
    pub e_sym: f64,
}

impl IterationRecord {
    fn of(iteration: usize, s: &TorusState) -> Result<Self> {
        let b = &s.bundle;
        Ok(Self {
            iteration,
            weighted_error: s.weighted_error.value,
            eta_l: s.weighted_error.tangent,
            eta_n: s.weighted_error.normal,
            avg_eta_n: s.projections.avg_eta_n().amax(),
            invariance_error: s.e.strip_norm(0.0)?,
            rho: s.weighted_error.rho,
            delta: s.weighted_error.delta,
            spectral_tail: s.k.spectral_tail(),
            torsion_condition: condition(&b.torsion.average()),
            omega_l: b.omega_l.strip_norm(0.0)?,
            e_sym: b.e_sym.strip_norm(0.0)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Converged { iterations: usize },
    MaxIterations,
    /// `best` indexes the state with the smallest weighted error.
    Diverged { reason: String, best: usize },
}

impl Verdict {
    pub fn converged(&self) -> bool {
        matches!(self, Verdict::Converged { .. })
    }
}

#[derive(Clone, Debug)]
pub struct NewtonRun {
    pub states: Vec<TorusState>,
    pub records: Vec<IterationRecord>,
    pub verdict: Verdict,
    pub fitted_order: Option<f64>,
}

impl NewtonRun {
    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.weighted_error).collect()
    }

    pub fn last(&self) -> Option<&TorusState> {
        self.states.last()
    }

    /// Writes the log, one JSON object per line.
    pub fn write_log(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Least-squares slope of `log e_{j+1}` against `log e_j` over consecutive decreasing pairs.
pub fn fit_order(errors: &[f64]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = errors
        .windows(2)
        .filter(|w| w[1] < w[0] && w[1] > 0.0 && w[0] < 1.0)
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let m = pairs.len() as f64;
    let (sx, sy) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    (sxx > 0.0).then(|| sxy / sxx)
}

fn diverged(reason: String, states: Vec<TorusState>, records: Vec<IterationRecord>) -> NewtonRun {
    let best = records
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.weighted_error.total_cmp(&b.1.weighted_error))
        .map_or(0, |(i, _)| i);
    NewtonRun { states, records, verdict: Verdict::Diverged { reason, best }, fitted_order: None }
}

/// Runs the quasi-Newton loop. State `j` is measured on the strip `rho_j` with bite `delta_j`.
/// Failures inside the loop, including two consecutive increases of the weighted
/// error, end the run with a divergence verdict.
pub fn iterate(k0: FourierModel, sys: &dyn HamiltonianSystem, dio: &DiophantineData, schedule: &StripSchedule, config: &NewtonConfig) -> NewtonRun {
    let mut states: Vec<TorusState> = Vec::new();
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut k = k0;
    let mut increases = 0;
    for j in 0..=config.max_iter {
        let (rho, delta) = (schedule.strip(j), schedule.bite(j));
        let state = match TorusState::assess(k, sys, dio, rho, delta).and_then(|s| Ok((IterationRecord::of(j, &s)?, s))) {
            Ok((r, s)) => {
                records.push(r);
                s
            }
            Err(e) => return diverged(format!("iteration {j}: {e}"), states, records),
        };
        let eps = state.weighted_error.value;
        if !eps.is_finite() {
            states.push(state);
            return diverged(format!("iteration {j}: non-finite weighted error"), states, records);
        }
        if j > 0 {
            let prev = records[j - 1].weighted_error;
            increases = if eps > prev { increases + 1 } else { 0 };
        }
        if eps <= config.tol {
            states.push(state);
            let fitted_order = fit_order(&records.iter().map(|r| r.weighted_error).collect::<Vec<_>>());
            return NewtonRun { states, records, verdict: Verdict::Converged { iterations: j }, fitted_order };
        }
        if increases >= 2 {
            states.push(state);
            return diverged(format!("weighted error increased twice in a row at iteration {j}"), states, records);
        }
        if j == config.max_iter {
            states.push(state);
            break;
        }
        let next = state.corrections(dio).and_then(|c| match config.update {
            UpdateRule::Classical => update_classical(&state.k, &state.bundle, &c),
            UpdateRule::Modified => update_modified(&state.k, &state.bundle, &c, sys, ShiftGuard { rho: rho - 2.0 * delta, budget: delta }),
        });
        states.push(state);
        match next {
            Ok(kn) => k = kn,
            Err(e) => return diverged(format!("update after iteration {j}: {e}"), states, records),
        }
    }
    let fitted_order = fit_order(&records.iter().map(|r| r.weighted_error).collect::<Vec<_>>());
    NewtonRun { states, records, verdict: Verdict::MaxIterations, fitted_order }
}
