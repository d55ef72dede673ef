//! Monte Carlo checks of the mass-transport principle
//! `E[Σ_y h(x,y)] = E[Σ_y h(y,x) ρ^x(y)]` on sampled points.
//!
//! Sample `i` is drawn from ChaCha8 stream `i` of the master seed, so every
//! estimate depends only on `(seed, samples, chunk_size)`. Chunks are reduced
//! in index order whatever the number of worker threads.

mod stats;

pub use stats::{Accumulator, SideEstimate};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symbolic::{preimage_mass, Certificate, LazyPoint, LocalPoint, MeasureSpec, SystemError, TreeSystem};
use crate::topography::{back_orbit_mass, explore_layers, Arrival};
use crate::weight::serde_ratio_vec;

/// Built-in kernels. All are supported on forward pairs `(y, f^n(y))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelKind {
    Zero,
    /// `h(x, y) = 1` iff `y = f(x)`.
    ForwardIndicator,
    /// `h(x, f^n(x)) = 1 / P(f^n(x))` for `n ≤ horizon`, where `P` is the
    /// back-orbit mass; zero when `P` is certified infinite.
    InverseMass { horizon: usize },
    /// `h(x, f^n(x)) = weights[n-1]` for `1 ≤ n ≤ weights.len()`.
    ForwardBand {
        #[serde(with = "serde_ratio_vec")]
        weights: Vec<BigRational>,
    },
}

/// Which way mass is weighted. `Opposite` replaces `h(x,y)` by
/// `g(x,y) = h(x,y) ρ^x(y)`, which satisfies the same principle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Standard,
    Opposite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportKernel {
    #[serde(flatten)]
    pub kind: KernelKind,
    pub convention: Convention,
}

impl TransportKernel {
    pub fn new(kind: KernelKind) -> Self {
        TransportKernel {
            kind,
            convention: Convention::Standard,
        }
    }

    pub fn opposite(mut self) -> Self {
        self.convention = Convention::Opposite;
        self
    }

    /// Tree distance beyond which the kernel vanishes.
    pub fn horizon(&self) -> usize {
        match &self.kind {
            KernelKind::Zero => 0,
            KernelKind::ForwardIndicator => 1,
            KernelKind::InverseMass { horizon } => *horizon,
            KernelKind::ForwardBand { weights } => weights.len(),
        }
    }

    pub fn label(&self) -> String {
        let base = match &self.kind {
            KernelKind::Zero => "zero".to_string(),
            KernelKind::ForwardIndicator => "forward-indicator".to_string(),
            KernelKind::InverseMass { horizon } => format!("inverse-mass(R={horizon})"),
            KernelKind::ForwardBand { weights } => format!("forward-band(R={})", weights.len()),
        };
        match self.convention {
            Convention::Standard => base,
            Convention::Opposite => format!("{base}, opposite"),
        }
    }

    /// `h(y, target)` for any `y` with `f^n(y) = target`, or `None` when it
    /// cannot be certified.
    fn weight<P, S>(&self, system: &S, target: &P, n: usize, budget: usize) -> Result<Option<BigRational>, SystemError>
    where
        P: Clone + Eq,
        S: TreeSystem<P> + ?Sized,
    {
        Ok(Some(match &self.kind {
            KernelKind::Zero => BigRational::zero(),
            KernelKind::ForwardIndicator => {
                if n == 1 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            KernelKind::InverseMass { horizon } => {
                if n > *horizon {
                    BigRational::zero()
                } else {
                    match inverse_mass(system, target, *horizon, budget)? {
                        Some(w) => w,
                        None => return Ok(None),
                    }
                }
            }
            KernelKind::ForwardBand { weights } => match n {
                0 => BigRational::zero(),
                n => weights.get(n - 1).cloned().unwrap_or_else(BigRational::zero),
            },
        }))
    }
}

/// `1/P(x)` from a certificate or an exhausted enumeration.
fn inverse_mass<P, S>(system: &S, x: &P, depth: usize, budget: usize) -> Result<Option<BigRational>, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    match system.back_orbit_certificate(x) {
        Some(Certificate::Infinite { .. }) => Ok(Some(BigRational::zero())),
        Some(Certificate::Total { value, .. }) => Ok(Some(value.recip())),
        None => {
            let r = back_orbit_mass(system, x, depth, budget)?;
            Ok(r.exhausted.then(|| r.last().recip()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub chunk_size: usize,
    /// Vertex budget for each per-sample exploration.
    pub budget: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            chunk_size: 1024,
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MtpEstimate {
    pub system: String,
    pub kernel: String,
    pub samples: u64,
    /// Samples whose kernel values could not be certified; not in the means.
    pub excluded: u64,
    pub seed: u64,
    pub horizon: usize,
    pub chunk_size: usize,
    pub sent: SideEstimate,
    pub received: SideEstimate,
}

impl MtpEstimate {
    /// `|sent − received|` in units of the combined standard error.
    pub fn balance_z(&self) -> f64 {
        let d = (self.sent.mean - self.received.mean).abs();
        if d == 0.0 {
            return 0.0;
        }
        d / self.sent.standard_error.hypot(self.received.standard_error)
    }
}

/// The `i`-th sample of `measure` for master seed `seed`.
pub fn sample(measure: &MeasureSpec, seed: u64, i: u64) -> Result<LocalPoint, SystemError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    Ok(LazyPoint::new(measure, rng, seed)?.into_local())
}

/// Runs `eval` on every sample, chunk by chunk in parallel, and merges the
/// chunk results in order.
fn reduce<T, F>(samples: u64, chunk_size: usize, eval: F) -> Result<Vec<T>, SystemError>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T, SystemError> + Sync,
{
    let chunk = chunk_size.max(1) as u64;
    let chunks = samples.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| eval(c * chunk, ((c + 1) * chunk).min(samples)))
        .collect()
}

#[derive(Default)]
struct PairAcc {
    sent: Accumulator,
    received: Accumulator,
    excluded: u64,
}

fn evaluate<S>(
    system: &S,
    kernel: &TransportKernel,
    x: &LocalPoint,
    budget: usize,
) -> Result<Option<(BigRational, BigRational)>, SystemError>
where
    S: TreeSystem<LocalPoint> + ?Sized,
{
    let r = kernel.horizon();
    let opposite = kernel.convention == Convention::Opposite;
    // sent: along the forward ray
    let mut sent = BigRational::zero();
    let mut z = x.clone();
    let mut rho = BigRational::one();
    for n in 0..=r {
        let Some(w) = kernel.weight(system, &z, n, budget)? else { return Ok(None) };
        if !w.is_zero() {
            sent += if opposite { w * &rho } else { w };
        }
        if n < r {
            if opposite {
                rho *= system.step_cocycle(&z)?;
            }
            z = system.forward(&z)?;
        }
    }
    // received: over the back levels of x
    let mut weights = Vec::with_capacity(r + 1);
    if let KernelKind::InverseMass { .. } = kernel.kind {
        // the same value on every level
        let Some(w) = kernel.weight(system, x, 0, budget)? else { return Ok(None) };
        weights.resize(r + 1, w);
    } else {
        for n in 0..=r {
            let Some(w) = kernel.weight(system, x, n, budget)? else { return Ok(None) };
            weights.push(w);
        }
    }
    let mut received = BigRational::zero();
    if let Some(top) = weights.iter().rposition(|w| !w.is_zero()) {
        let stats = explore_layers(system, x, Arrival::ViaBackward, top, budget)?;
        for (n, w) in weights.iter().enumerate().take(top + 1) {
            if w.is_zero() || stats.counts[n] == 0 {
                continue;
            }
            if opposite {
                received += w * BigRational::from_integer(stats.counts[n].into());
            } else {
                received += w * &stats.sums[n];
            }
        }
    }
    Ok(Some((sent, received)))
}

/// Both sides of the mass-transport principle for `kernel`, estimated by
/// evaluating them exactly at each sampled point.
pub fn estimate_mtp<S>(
    system: &S,
    measure: &MeasureSpec,
    kernel: &TransportKernel,
    samples: u64,
    seed: u64,
    options: &EstimateOptions,
) -> Result<MtpEstimate, SystemError>
where
    S: TreeSystem<LocalPoint> + ?Sized,
{
    measure.validate()?;
    let parts = reduce(samples, options.chunk_size, |lo, hi| {
        let mut acc = PairAcc::default();
        for i in lo..hi {
            let x = sample(measure, seed, i)?;
            match evaluate(system, kernel, &x, options.budget)? {
                Some((s, r)) => {
                    acc.sent.push(&s);
                    acc.received.push(&r);
                }
                None => acc.excluded += 1,
            }
        }
        Ok(acc)
    })?;
    let mut total = PairAcc::default();
    for p in &parts {
        total.sent.merge(&p.sent);
        total.received.merge(&p.received);
        total.excluded += p.excluded;
    }
    Ok(MtpEstimate {
        system: system.name(),
        kernel: kernel.label(),
        samples,
        excluded: total.excluded,
        seed,
        horizon: kernel.horizon(),
        chunk_size: options.chunk_size,
        sent: total.sent.summary(),
        received: total.received.summary(),
    })
}

/// `∫ ρ^x(f^{-1}(x)) dμ(x)`: the received side of the forward indicator.
pub fn verify_preimage_unit<S>(
    system: &S,
    measure: &MeasureSpec,
    samples: u64,
    seed: u64,
    options: &EstimateOptions,
) -> Result<MtpEstimate, SystemError>
where
    S: TreeSystem<LocalPoint> + ?Sized,
{
    estimate_mtp(system, measure, &TransportKernel::new(KernelKind::ForwardIndicator), samples, seed, options)
}

/// `E[Σ_{n ≤ horizon} 1/P(f^n(x))]`: the sent side of the inverse-mass kernel.
pub fn verify_inverse_mass_sum<S>(
    system: &S,
    measure: &MeasureSpec,
    samples: u64,
    horizon: usize,
    seed: u64,
    options: &EstimateOptions,
) -> Result<MtpEstimate, SystemError>
where
    S: TreeSystem<LocalPoint> + ?Sized,
{
    estimate_mtp(system, measure, &TransportKernel::new(KernelKind::InverseMass { horizon }), samples, seed, options)
}

/// Distribution of `ρ^x(f^{-1}(x))` relative to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceSummary {
    pub system: String,
    pub samples: u64,
    pub seed: u64,
    pub value: SideEstimate,
    pub fraction_above: f64,
    pub fraction_equal: f64,
    pub fraction_below: f64,
}

pub fn backward_balance_check<S>(
    system: &S,
    measure: &MeasureSpec,
    samples: u64,
    seed: u64,
    options: &EstimateOptions,
) -> Result<BalanceSummary, SystemError>
where
    S: TreeSystem<LocalPoint> + ?Sized,
{
    measure.validate()?;
    let one = BigRational::one();
    let parts = reduce(samples, options.chunk_size, |lo, hi| {
        let mut acc = Accumulator::default();
        let mut counts = [0u64; 3];
        for i in lo..hi {
            let v = preimage_mass(system, &sample(measure, seed, i)?)?;
            match v.cmp(&one) {
                std::cmp::Ordering::Greater => counts[0] += 1,
                std::cmp::Ordering::Equal => counts[1] += 1,
                std::cmp::Ordering::Less => counts[2] += 1,
            }
            acc.push(&v);
        }
        Ok((acc, counts))
    })?;
    let mut acc = Accumulator::default();
    let mut counts = [0u64; 3];
    for (a, c) in &parts {
        acc.merge(a);
        (0..3).for_each(|k| counts[k] += c[k]);
    }
    let n = samples.max(1) as f64;
    Ok(BalanceSummary {
        system: system.name(),
        samples,
        seed,
        value: acc.summary(),
        fraction_above: counts[0] as f64 / n,
        fraction_equal: counts[1] as f64 / n,
        fraction_below: counts[2] as f64 / n,
    })
}
