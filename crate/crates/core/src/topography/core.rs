use std::fmt::Debug;

use num_rational::BigRational;
use serde::Serialize;

use super::{explore_ball, half_space_mass, Step};
use crate::symbolic::{Certificate, CertificateSource, SystemError, TreeSystem};
use crate::weight::serde_ratio;

/// A ρ-finite half-space containing a vertex: the origin side of the lifted
/// edge `origin → terminus`, with its exact total normalized at `origin`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "P: Debug"))]
pub struct ExclusionCertificate<P> {
    #[serde(serialize_with = "super::as_debug")]
    pub origin: P,
    #[serde(serialize_with = "super::as_debug")]
    pub terminus: P,
    /// Direction of the edge from `origin`.
    pub step: Step,
    #[serde(with = "serde_ratio")]
    pub total: BigRational,
    pub source: CertificateSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound(serialize = "P: Debug"))]
pub enum CoreStatus<P> {
    /// No ρ-finite half-space was found around the vertex. When
    /// `threshold_relative` is set, some half-space is only known to have
    /// mass at least the threshold.
    InCore { depth: usize, threshold_relative: bool },
    Excluded { certificate: ExclusionCertificate<P> },
    /// Some half-space has an explored mass below the threshold but no
    /// certificate either way.
    BelowThreshold {
        #[serde(with = "serde_ratio")]
        lower_bound: BigRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "P: Debug"))]
pub struct CoreEntry<P> {
    #[serde(serialize_with = "super::as_debug")]
    pub point: P,
    pub distance: usize,
    pub status: CoreStatus<P>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "P: Debug"))]
pub struct CoreReport<P> {
    pub radius: usize,
    #[serde(with = "serde_ratio")]
    pub threshold: BigRational,
    pub probe_depth: usize,
    pub entries: Vec<CoreEntry<P>>,
}

impl<P> CoreReport<P> {
    pub fn in_core(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.status, CoreStatus::InCore { .. })).count()
    }

    pub fn excluded(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.status, CoreStatus::Excluded { .. })).count()
    }

    /// Every vertex is in the core without appeal to the threshold.
    pub fn all_certified_in_core(&self) -> bool {
        self.entries.iter().all(|e| {
            matches!(
                e.status,
                CoreStatus::InCore {
                    threshold_relative: false,
                    ..
                }
            )
        })
    }
}

/// Core status of every vertex of the radius-`radius` ball around `x`.
///
/// Each lifted edge at a vertex bounds a half-space containing it. A finite
/// certificate on any of them excludes the vertex; uncertified half-spaces
/// are explored to `probe_depth` and compared with `threshold`.
pub fn rn_core_truncated<P, S>(
    system: &S,
    x: &P,
    radius: usize,
    threshold: &BigRational,
    probe_depth: usize,
    budget: usize,
) -> Result<CoreReport<P>, SystemError>
where
    P: Clone + Eq + Debug,
    S: TreeSystem<P> + ?Sized,
{
    let ball = explore_ball(system, x, radius, budget)?;
    let mut entries = Vec::with_capacity(ball.len());
    for v in &ball.vertices {
        let status = vertex_status(system, &v.point, radius, threshold, probe_depth, budget)?;
        entries.push(CoreEntry {
            point: v.point.clone(),
            distance: v.depth,
            status,
        });
    }
    Ok(CoreReport {
        radius,
        threshold: threshold.clone(),
        probe_depth,
        entries,
    })
}

fn vertex_status<P, S>(
    system: &S,
    v: &P,
    radius: usize,
    threshold: &BigRational,
    probe_depth: usize,
    budget: usize,
) -> Result<CoreStatus<P>, SystemError>
where
    P: Clone + Eq + Debug,
    S: TreeSystem<P> + ?Sized,
{
    let mut edges = Vec::new();
    match system.forward(v) {
        Ok(w) => edges.push((Step::Forward, w, system.back_orbit_certificate(v))),
        Err(SystemError::Truncated { .. }) => {}
        Err(e) => return Err(e),
    }
    for y in system.preimages(v)? {
        edges.push((Step::Backward, y, system.forward_side_certificate(v)));
    }
    let mut uncertified = Vec::new();
    for (step, w, cert) in edges {
        match cert {
            Some(Certificate::Total { value, source }) => {
                return Ok(CoreStatus::Excluded {
                    certificate: ExclusionCertificate {
                        origin: v.clone(),
                        terminus: w,
                        step,
                        total: value,
                        source,
                    },
                })
            }
            Some(Certificate::Infinite { .. }) => {}
            None => uncertified.push((step, w)),
        }
    }
    let mut threshold_relative = false;
    let mut below: Option<BigRational> = None;
    for (step, w) in uncertified {
        let report = half_space_mass(system, v, &w, probe_depth, budget)?;
        if let Some(Certificate::Total { value, source }) = report.certificate {
            return Ok(CoreStatus::Excluded {
                certificate: ExclusionCertificate {
                    origin: v.clone(),
                    terminus: w,
                    step,
                    total: value,
                    source,
                },
            });
        }
        let bound = report.last().clone();
        if &bound >= threshold {
            threshold_relative = true;
        } else if below.as_ref().is_none_or(|b| &bound < b) {
            below = Some(bound);
        }
    }
    Ok(match below {
        Some(lower_bound) => CoreStatus::BelowThreshold { lower_bound },
        None => CoreStatus::InCore {
            depth: radius,
            threshold_relative,
        },
    })
}

/// Re-derives a certificate's total by exhaustive enumeration of its
/// half-space, deepening until nothing is left or `max_depth` is reached.
/// `Ok(true)` iff the enumeration finished and the totals agree.
pub fn verify_exclusion<P, S>(
    system: &S,
    certificate: &ExclusionCertificate<P>,
    max_depth: usize,
    budget: usize,
) -> Result<bool, SystemError>
where
    P: Clone + Eq + Debug,
    S: TreeSystem<P> + ?Sized,
{
    let mut depth = 1;
    loop {
        let r = half_space_mass(system, &certificate.origin, &certificate.terminus, depth, budget)?;
        if r.exhausted {
            return Ok(r.last() == &certificate.total);
        }
        if depth >= max_depth {
            return Ok(false);
        }
        depth = (2 * depth).min(max_depth);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{Alphabet, GeneratorSystem, SymbolicPoint};
    use crate::weight::{ratio, ratio_int};

    fn bin(prefix: &str, period: &str) -> SymbolicPoint {
        SymbolicPoint::parse(Alphabet::binary(), prefix, period).unwrap()
    }

    #[test]
    fn shift_core_is_full() {
        let s2 = GeneratorSystem::shift(2).unwrap();
        for w in [ratio_int(1), ratio_int(1000)] {
            let r = rn_core_truncated(&s2, &bin("", "10"), 4, &w, 4, 100_000).unwrap();
            assert_eq!(r.entries.len(), 1 + 3 + 6 + 12 + 24);
            assert!(r.all_certified_in_core());
        }
    }

    #[test]
    fn least_deletion_core_is_empty() {
        let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
        let r = rn_core_truncated(&ld, &bin("0010", "011"), 4, &ratio_int(10), 4, 100_000).unwrap();
        assert_eq!(r.excluded(), r.entries.len());
        for e in &r.entries {
            let CoreStatus::Excluded { certificate } = &e.status else { unreachable!() };
            assert_eq!(certificate.step, Step::Forward);
            assert!(verify_exclusion(&ld, certificate, 64, 100_000).unwrap());
        }
    }

    #[test]
    fn wrong_total_fails_verification() {
        let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
        let x = bin("01", "10");
        let mut c = ExclusionCertificate {
            origin: x.clone(),
            terminus: ld.forward(&x).unwrap(),
            step: Step::Forward,
            total: ratio_int(3),
            source: CertificateSource::ClosedForm,
        };
        assert!(verify_exclusion(&ld, &c, 8, 1000).unwrap());
        c.total = ratio_int(4);
        assert!(!verify_exclusion(&ld, &c, 8, 1000).unwrap());
    }

    #[test]
    fn odometer_core_depends_on_threshold() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        let x = bin("0110", "01");
        let mut prev = usize::MAX;
        for w in [1, 2, 4, 8, 16, 64, 1 << 20] {
            let r = rn_core_truncated(&odo, &x, 3, &ratio_int(w), 16, 10_000).unwrap();
            assert_eq!(r.excluded(), 0);
            assert!(r.in_core() <= prev);
            prev = r.in_core();
        }
        assert_eq!(prev, 0);
    }
}
