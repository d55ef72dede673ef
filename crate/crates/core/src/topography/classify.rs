//! Heuristic end classification for a single point, combining certificates
//! with truncated traces and probes.

use num_rational::BigRational;
use serde::Serialize;

use super::{back_orbit_mass, forward_trace, odometer_extremes, probe_backward, rn_core_truncated, CoreStatus, Selector, Step};
use crate::symbolic::{Certificate, GeneratorSystem, LevelProfile, Sequence, SystemError, TreeSystem};
use crate::weight::{ratio_int, ratio_pow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardStatus {
    Nonvanishing,
    Vanishing,
    Oscillating,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackStatus {
    /// The back orbit has finite ρ-mass.
    Finite,
    /// Level weights are exactly geometric with ratio below 1.
    Vanishing,
    /// Level weights are bounded by a geometric rate below 1.
    Decay,
    Oscillating,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreSummary {
    Full,
    Empty,
    Partial,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub system: String,
    pub point: String,
    pub forward: ForwardStatus,
    pub back: BackStatus,
    pub core: CoreSummary,
    pub core_vertices: usize,
    pub core_in: usize,
    pub core_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct ClassifyParams {
    pub depth: usize,
    pub core_radius: usize,
    pub threshold: BigRational,
    pub probe_depth: usize,
    pub odometer_horizon: u128,
    pub budget: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            depth: 24,
            core_radius: 3,
            threshold: ratio_int(1 << 10),
            probe_depth: 16,
            odometer_horizon: 1 << 100,
            budget: super::DEFAULT_BUDGET,
        }
    }
}

fn high() -> BigRational {
    ratio_int(32)
}

fn low() -> BigRational {
    ratio_int(32).recip()
}

fn odometer_oscillates<P: Sequence>(system: &GeneratorSystem, x: &P, horizon: u128, step: Step) -> Result<bool, SystemError> {
    let lambda = system.lambda().expect("binary system");
    let e = odometer_extremes(system, x, horizon, step)?;
    let a = ratio_pow(&lambda, e.min_exponent);
    let b = ratio_pow(&lambda, e.max_exponent);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    Ok(hi > high() && lo < low())
}

fn forward_status<P: Sequence>(system: &GeneratorSystem, x: &P, params: &ClassifyParams) -> Result<ForwardStatus, SystemError> {
    if matches!(system, GeneratorSystem::Odometer { .. }) && odometer_oscillates(system, x, params.odometer_horizon, Step::Forward)? {
        return Ok(ForwardStatus::Oscillating);
    }
    let n = params.depth.max(2);
    let trace = forward_trace(system, x, n)?;
    if trace.running_max[n] > high() && trace.running_min[n] < low() {
        return Ok(ForwardStatus::Oscillating);
    }
    let floor = ratio_int(8).recip();
    if trace.rho[n / 2..].iter().all(|r| r >= &floor) {
        return Ok(ForwardStatus::Nonvanishing);
    }
    // the ray itself decays: look for weight hanging off it
    let mut prev = x.clone();
    let mut z = system.forward(x)?;
    let mut last = None;
    let mut all_large = true;
    for j in 1..=n {
        let probe = probe_backward(system, &z, Some(&prev), 4 * n + 64, &Selector::GreatestWeight)?;
        let s = &trace.rho[j] * probe.running_max.last().unwrap();
        all_large &= s >= floor;
        last = Some(s);
        prev = z;
        z = system.forward(&prev)?;
    }
    let last = last.unwrap();
    Ok(if all_large {
        ForwardStatus::Nonvanishing
    } else if last <= ratio_pow(&ratio_int(2), -8) {
        ForwardStatus::Vanishing
    } else {
        ForwardStatus::Undetermined
    })
}

fn back_status<P: Sequence>(system: &GeneratorSystem, x: &P, params: &ClassifyParams) -> Result<BackStatus, SystemError> {
    match system.back_orbit_certificate(x) {
        Some(Certificate::Total { .. }) => return Ok(BackStatus::Finite),
        Some(Certificate::Infinite { .. }) => {}
        None => {
            if back_orbit_mass(system, x, params.depth, params.budget)?.exhausted {
                return Ok(BackStatus::Finite);
            }
        }
    }
    if matches!(system, GeneratorSystem::Odometer { .. }) && odometer_oscillates(system, x, params.odometer_horizon, Step::Backward)? {
        return Ok(BackStatus::Oscillating);
    }
    let one = ratio_int(1);
    Ok(match TreeSystem::<P>::back_level_profile(system, x) {
        Some(LevelProfile::Uniform { ratio }) if ratio < one => BackStatus::Vanishing,
        Some(LevelProfile::RateBound { rate }) if rate < one => BackStatus::Decay,
        _ => BackStatus::Undetermined,
    })
}

/// Forward-end, back-end and core status of `x`.
pub fn classify<P: Sequence>(system: &GeneratorSystem, x: &P, params: &ClassifyParams) -> Result<Classification, SystemError> {
    TreeSystem::<P>::validate(system, x)?;
    let forward = forward_status(system, x, params)?;
    let back = back_status(system, x, params)?;
    let report = rn_core_truncated(system, x, params.core_radius, &params.threshold, params.probe_depth, params.budget)?;
    let excluded = report.excluded();
    let core = if excluded == report.entries.len() {
        CoreSummary::Empty
    } else if report.all_certified_in_core() {
        CoreSummary::Full
    } else if excluded > 0 && report.entries.iter().all(|e| !matches!(e.status, CoreStatus::BelowThreshold { .. })) {
        CoreSummary::Partial
    } else {
        CoreSummary::Undetermined
    };
    Ok(Classification {
        system: system.label(),
        point: format!("{x:?}"),
        forward,
        back,
        core,
        core_vertices: report.entries.len(),
        core_in: report.in_core(),
        core_excluded: excluded,
    })
}
