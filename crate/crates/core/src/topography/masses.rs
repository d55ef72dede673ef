use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{explore_layers, Arrival};
use crate::symbolic::{Certificate, CertificateSource, LevelProfile, SystemError, TreeSystem};
use crate::weight::{ratio_pow, serde_ratio_vec, Weight};

/// Depth-indexed lower bounds on a ρ-mass plus an optional certificate for
/// the full (untruncated) value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassReport {
    #[serde(with = "serde_ratio_vec")]
    pub lower_bounds: Vec<BigRational>,
    pub certificate: Option<Certificate>,
    /// The explored set had no vertices beyond the final depth.
    pub exhausted: bool,
}

impl MassReport {
    fn from_bounds(
        lower_bounds: Vec<BigRational>,
        exhausted: bool,
        certificate: Option<Certificate>,
    ) -> Self {
        let certificate = certificate.or_else(|| {
            exhausted.then(|| Certificate::Total {
                value: lower_bounds.last().unwrap().clone(),
                source: CertificateSource::Exhaustive,
            })
        });
        MassReport {
            lower_bounds,
            certificate,
            exhausted,
        }
    }

    pub fn last(&self) -> &BigRational {
        self.lower_bounds.last().expect("reports cover depth 0")
    }

    /// The certified value, if any.
    pub fn certified(&self) -> Option<Weight> {
        match self.certificate.as_ref()? {
            Certificate::Infinite { .. } => Some(Weight::Infinite),
            Certificate::Total { value, .. } => Some(Weight::Finite(value.clone())),
        }
    }
}

fn cumulative(v: &[BigRational]) -> Vec<BigRational> {
    v.iter()
        .scan(BigRational::zero(), |acc, x| {
            *acc += x;
            Some(acc.clone())
        })
        .collect()
}

/// `ρ^x(f^{-n}(x))`.
pub fn back_sphere_mass<P, S>(system: &S, x: &P, n: usize, budget: usize) -> Result<BigRational, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(x)?;
    let stats = explore_layers(system, x, Arrival::ViaBackward, n, budget)?;
    Ok(stats.sums[n].clone())
}

/// Partial sums of `P(x) = ρ^x(f^{-ℕ}(x))` through each depth.
pub fn back_orbit_mass<P, S>(system: &S, x: &P, depth: usize, budget: usize) -> Result<MassReport, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(x)?;
    let stats = explore_layers(system, x, Arrival::ViaBackward, depth, budget)?;
    Ok(MassReport::from_bounds(
        cumulative(&stats.sums),
        !stats.continues,
        system.back_orbit_certificate(x),
    ))
}

/// Running maximum of the path masses `ρ^x([x, v])` over back-orbit vertices
/// `v` within each depth: lower bounds on `Σ_f(x)`.
pub fn sigma_backward<P, S>(system: &S, x: &P, depth: usize, budget: usize) -> Result<MassReport, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(x)?;
    let stats = explore_layers(system, x, Arrival::ViaBackward, depth, budget)?;
    let mut best = BigRational::one();
    let bounds = stats
        .path_maxima
        .iter()
        .map(|m| {
            if let Some(m) = m {
                best = best.clone().max(m.clone());
            }
            best.clone()
        })
        .collect();
    Ok(MassReport::from_bounds(bounds, !stats.continues, system.sigma_certificate(x)))
}

/// Truncated `sup{ρ^x(y) : y ∈ f^{-[n,∞)}(x)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailSup {
    /// No back-orbit vertex at level `n` or beyond.
    Empty,
    Value {
        /// Exact maximum over levels `n..=depth`, a lower bound for the sup.
        #[serde(with = "crate::weight::serde_ratio")]
        value: BigRational,
        /// `value` is the sup over all levels `≥ n`.
        exact: bool,
        /// Certified upper bound for the sup, when the system has one.
        #[serde(skip_serializing_if = "Option::is_none", with = "crate::weight::serde_opt_ratio")]
        upper_bound: Option<BigRational>,
    },
}

pub fn back_tail_sup<P, S>(system: &S, x: &P, n: usize, depth: usize, budget: usize) -> Result<TailSup, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    assert!(depth >= n, "back_tail_sup needs depth >= n");
    system.validate(x)?;
    let stats = explore_layers(system, x, Arrival::ViaBackward, depth, budget)?;
    let Some(value) = stats.maxima[n..].iter().flatten().max().cloned() else {
        return Ok(TailSup::Empty);
    };
    let (exact, upper_bound) = match system.back_level_profile(x) {
        Some(LevelProfile::Uniform { ratio }) => (true, Some(ratio_pow(&ratio, n as i64))),
        Some(LevelProfile::RateBound { rate }) => (!stats.continues, Some(ratio_pow(&rate, n as i64))),
        None => (!stats.continues, None),
    };
    Ok(TailSup::Value {
        value,
        exact,
        upper_bound,
    })
}

/// Lower bounds on `ρ^o(V^o(e))` for the lifted edge `e = (o → t)`, by
/// distance from `o`. If `t = f(o)` the half-space is the back orbit of `o`;
/// otherwise `t` must be a preimage of `o` and the half-space is everything
/// on the forward side.
pub fn half_space_mass<P, S>(
    system: &S,
    origin: &P,
    terminus: &P,
    depth: usize,
    budget: usize,
) -> Result<MassReport, SystemError>
where
    P: Clone + Eq + std::fmt::Debug,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(origin)?;
    let forward = match system.forward(origin) {
        Ok(w) => Some(w),
        Err(SystemError::Truncated { .. }) => None,
        Err(e) => return Err(e),
    };
    if forward.as_ref() == Some(terminus) {
        return back_orbit_mass(system, origin, depth, budget);
    }
    if !system.preimages(origin)?.contains(terminus) {
        return Err(SystemError::NotAdjacent {
            origin: format!("{origin:?}"),
            terminus: format!("{terminus:?}"),
        });
    }
    let stats = explore_layers(system, origin, Arrival::ViaForward(terminus.clone()), depth, budget)?;
    Ok(MassReport::from_bounds(
        cumulative(&stats.sums),
        !stats.continues,
        system.forward_side_certificate(origin),
    ))
}
