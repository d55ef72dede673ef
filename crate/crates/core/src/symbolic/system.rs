//! The four example systems: forward maps, preimages, cocycles and the
//! analytic certificates attached to them.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::measure::{check_probability, check_step_weights, MeasureSpec};
use super::point::{find_index, Alphabet, Sequence, SymbolicPoint};
use super::SystemError;
use crate::weight::{ratio_int, ratio_pow, ratio_string};

/// Where a certified total came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    ClosedForm,
    Exhaustive,
}

/// An analytic statement about the total ρ-mass of a vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Infinite {
        reason: String,
    },
    Total {
        #[serde(with = "crate::weight::serde_ratio")]
        value: BigRational,
        source: CertificateSource,
    },
}

impl Certificate {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Certificate::Infinite { .. })
    }

    pub fn total(&self) -> Option<&BigRational> {
        match self {
            Certificate::Total { value, .. } => Some(value),
            Certificate::Infinite { .. } => None,
        }
    }
}

/// Level-wise description of the weights `ρ^x(v)` for `v ∈ f^{-j}(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelProfile {
    /// Every vertex on back level `j` has weight exactly `ratio^j`.
    Uniform {
        #[serde(with = "crate::weight::serde_ratio")]
        ratio: BigRational,
    },
    /// Every vertex on back level `j` has weight at most `rate^j`.
    RateBound {
        #[serde(with = "crate::weight::serde_ratio")]
        rate: BigRational,
    },
}

/// A countable-to-one map whose graph is a treeing, with its Radon–Nikodym
/// cocycle. `P` is the vertex type.
pub trait TreeSystem<P>: Sync {
    fn name(&self) -> String;
    fn validate(&self, x: &P) -> Result<(), SystemError>;
    fn forward(&self, x: &P) -> Result<P, SystemError>;
    /// All `y` with `forward(y) = x`, sorted and pairwise distinct.
    fn preimages(&self, x: &P) -> Result<Vec<P>, SystemError>;
    /// `ρ^x(f(x))`.
    fn step_cocycle(&self, x: &P) -> Result<BigRational, SystemError>;
    /// `ρ^x(y)` for related points.
    fn cocycle(&self, x: &P, y: &P) -> Result<BigRational, SystemError>;

    /// Total of `ρ^x` over the back orbit `f^{-ℕ}(x)`.
    fn back_orbit_certificate(&self, _x: &P) -> Option<Certificate> {
        None
    }
    /// Total of `ρ^x` over any half-space `V^o(x → y)` with `y ∈ f^{-1}(x)`.
    fn forward_side_certificate(&self, _x: &P) -> Option<Certificate> {
        None
    }
    /// Backward geodesic weight `Σ_f(x)`.
    fn sigma_certificate(&self, _x: &P) -> Option<Certificate> {
        None
    }
    fn back_level_profile(&self, _x: &P) -> Option<LevelProfile> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSystem {
    /// One-sided shift on `k` symbols with the uniform product measure.
    Shift { k: u8 },
    /// Flip the first 1 to 0, Bernoulli(`p`) measure.
    LeastDeletion { p: BigRational },
    /// Binary adding machine `1^n 0 x ↦ 0^n 1 x`, Bernoulli(`p`) measure.
    Odometer { p: BigRational },
    /// Shift on reduced infinite words in `F_d` with the hitting measure of
    /// the `m`-random walk (weights indexed by symbol).
    FreeBoundary { d: u8, m: Vec<BigRational> },
}

fn domain(system: &GeneratorSystem, reason: impl Into<String>) -> SystemError {
    SystemError::Domain {
        system: system.label(),
        reason: reason.into(),
    }
}

impl GeneratorSystem {
    pub fn shift(k: u8) -> Result<Self, SystemError> {
        let s = GeneratorSystem::Shift { k };
        s.check_parameters()?;
        Ok(s)
    }

    pub fn least_deletion(p: BigRational) -> Result<Self, SystemError> {
        let s = GeneratorSystem::LeastDeletion { p };
        s.check_parameters()?;
        Ok(s)
    }

    pub fn odometer(p: BigRational) -> Result<Self, SystemError> {
        let s = GeneratorSystem::Odometer { p };
        s.check_parameters()?;
        Ok(s)
    }

    pub fn free_boundary(d: u8, m: Vec<BigRational>) -> Result<Self, SystemError> {
        let s = GeneratorSystem::FreeBoundary { d, m };
        s.check_parameters()?;
        Ok(s)
    }

    /// Free boundary with `m` uniform on the `2d` generators and inverses.
    pub fn free_boundary_uniform(d: u8) -> Result<Self, SystemError> {
        let w = BigRational::new(BigInt::one(), BigInt::from(2 * d as u32));
        Self::free_boundary(d, vec![w; 2 * d as usize])
    }

    pub fn check_parameters(&self) -> Result<(), SystemError> {
        match self {
            GeneratorSystem::Shift { k } if (2..=36).contains(k) => Ok(()),
            GeneratorSystem::Shift { k } => Err(SystemError::Parameter(format!("shift needs 2 <= k <= 36, got {k}"))),
            GeneratorSystem::LeastDeletion { p } | GeneratorSystem::Odometer { p } => {
                check_probability(p).map_err(SystemError::from)
            }
            GeneratorSystem::FreeBoundary { d, m } => {
                if *d > 26 {
                    return Err(SystemError::Parameter(format!("d = {d} exceeds 26 generators")));
                }
                check_step_weights(*d, m).map_err(SystemError::from)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            GeneratorSystem::Shift { k } => format!("shift(k={k})"),
            GeneratorSystem::LeastDeletion { p } => format!("least_deletion(p={})", ratio_string(p)),
            GeneratorSystem::Odometer { p } => format!("odometer(p={})", ratio_string(p)),
            GeneratorSystem::FreeBoundary { d, .. } => format!("free_boundary(d={d})"),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            GeneratorSystem::Shift { k } => Alphabet::Digits(*k),
            GeneratorSystem::LeastDeletion { .. } | GeneratorSystem::Odometer { .. } => Alphabet::binary(),
            GeneratorSystem::FreeBoundary { d, .. } => Alphabet::FreeGroup(*d),
        }
    }

    /// The invariant-class measure the cocycle refers to.
    pub fn measure(&self) -> MeasureSpec {
        match self {
            GeneratorSystem::Shift { k } => MeasureSpec::Uniform { k: *k },
            GeneratorSystem::LeastDeletion { p } | GeneratorSystem::Odometer { p } => {
                MeasureSpec::Bernoulli { p: p.clone() }
            }
            GeneratorSystem::FreeBoundary { d, m } => MeasureSpec::Hitting { d: *d, m: m.clone() },
        }
    }

    /// `λ = p / (1 − p)` for the binary systems.
    pub fn lambda(&self) -> Option<BigRational> {
        match self {
            GeneratorSystem::LeastDeletion { p } | GeneratorSystem::Odometer { p } => {
                // gcd(a, b − a) = gcd(a, b) = 1
                Some(BigRational::new_raw(p.numer().clone(), p.denom() - p.numer()))
            }
            _ => None,
        }
    }

    fn is_binary(&self) -> bool {
        matches!(self, GeneratorSystem::LeastDeletion { .. } | GeneratorSystem::Odometer { .. })
    }

    /// `ρ^y(h(y))` for the shift-type systems, as a function of `y_0`.
    fn shift_step(&self, a: u8) -> BigRational {
        match self {
            GeneratorSystem::Shift { k } => ratio_int(*k as i64),
            GeneratorSystem::FreeBoundary { m, .. } => {
                (BigRational::one() - &m[(a ^ 1) as usize]) / &m[a as usize]
            }
            _ => unreachable!("not a shift-type system"),
        }
    }

    /// `α = max_a m(a) / m(S^± ∖ {a^-1})`, the per-level decay rate of back weights.
    pub fn free_boundary_rate(&self) -> Option<BigRational> {
        match self {
            GeneratorSystem::FreeBoundary { m, .. } => (0..m.len())
                .map(|a| &m[a] / (BigRational::one() - &m[a ^ 1]))
                .max(),
            _ => None,
        }
    }

    /// Domain check on an exact point.
    pub fn validate_point(&self, x: &SymbolicPoint) -> Result<(), SystemError> {
        if x.alphabet() != self.alphabet() {
            return Err(SystemError::AlphabetMismatch {
                expected: self.alphabet(),
                found: x.alphabet(),
            });
        }
        match self {
            GeneratorSystem::LeastDeletion { .. } | GeneratorSystem::Odometer { .. } => {
                if !x.tail_contains(0) {
                    return Err(domain(self, "tail has no 0 (period must contain both symbols)"));
                }
                if !x.tail_contains(1) {
                    return Err(domain(self, "tail has no 1 (period must contain both symbols)"));
                }
                Ok(())
            }
            GeneratorSystem::Shift { .. } => {
                if x.period().len() == 1 {
                    return Err(domain(self, "constant tail: the point is eventually a fixed point"));
                }
                Ok(())
            }
            GeneratorSystem::FreeBoundary { .. } => {
                let mut w = x.prefix().to_vec();
                w.extend_from_slice(x.period());
                w.extend_from_slice(x.period());
                if !x.alphabet().is_reduced(&w) {
                    return Err(domain(self, "word is not reduced"));
                }
                Ok(())
            }
        }
    }

    fn first<P: Sequence>(&self, x: &P, s: u8) -> Result<usize, SystemError> {
        find_index(x, |c| c == s).ok_or_else(|| domain(self, format!("no symbol {s} found")))
    }

    /// Position of the first 1, which is also the number of preimages for least deletion.
    pub fn first_one<P: Sequence>(&self, x: &P) -> Result<usize, SystemError> {
        self.first(x, 1)
    }

    /// Back-orbit enumeration size bound for least deletion: `2^m`.
    fn ld_back_orbit_total<P: Sequence>(&self, x: &P) -> Option<BigRational> {
        let lambda = self.lambda()?;
        let m = self.first_one(x).ok()?;
        Some(ratio_pow(&(BigRational::one() + lambda), m as i64))
    }
}

impl<P: Sequence> TreeSystem<P> for GeneratorSystem {
    fn name(&self) -> String {
        self.label()
    }

    fn validate(&self, x: &P) -> Result<(), SystemError> {
        if x.alphabet() != self.alphabet() {
            return Err(SystemError::AlphabetMismatch {
                expected: self.alphabet(),
                found: x.alphabet(),
            });
        }
        match x.exact() {
            Some(e) => self.validate_point(e),
            None => Ok(()),
        }
    }

    fn forward(&self, x: &P) -> Result<P, SystemError> {
        match self {
            GeneratorSystem::LeastDeletion { .. } => {
                let m = self.first(x, 1)?;
                Ok(x.splice(m + 1, &vec![0; m + 1]))
            }
            GeneratorSystem::Odometer { .. } => {
                let n = self.first(x, 0)?;
                let mut w = vec![0; n + 1];
                w[n] = 1;
                Ok(x.splice(n + 1, &w))
            }
            GeneratorSystem::Shift { .. } | GeneratorSystem::FreeBoundary { .. } => Ok(x.splice(1, &[])),
        }
    }

    fn preimages(&self, x: &P) -> Result<Vec<P>, SystemError> {
        let mut out = match self {
            GeneratorSystem::LeastDeletion { .. } => {
                let m = self.first(x, 1)?;
                (0..m)
                    .map(|j| {
                        let mut w = vec![0; m];
                        w[j] = 1;
                        x.splice(m, &w)
                    })
                    .collect()
            }
            GeneratorSystem::Odometer { .. } => {
                let k = self.first(x, 1)?;
                let mut w = vec![1; k + 1];
                w[k] = 0;
                vec![x.splice(k + 1, &w)]
            }
            GeneratorSystem::Shift { k } => (0..*k).map(|a| x.splice(0, &[a])).collect(),
            GeneratorSystem::FreeBoundary { d, .. } => {
                let bar = x.alphabet().inverse(x.coord(0));
                (0..2 * d).filter(|&a| a != bar).map(|a| x.splice(0, &[a])).collect()
            }
        };
        out.sort();
        Ok(out)
    }

    fn step_cocycle(&self, x: &P) -> Result<BigRational, SystemError> {
        match self {
            GeneratorSystem::LeastDeletion { .. } => {
                self.first(x, 1)?;
                Ok(self.lambda().unwrap().recip())
            }
            GeneratorSystem::Odometer { .. } => {
                let n = self.first(x, 0)?;
                Ok(ratio_pow(&self.lambda().unwrap(), 1 - n as i64))
            }
            GeneratorSystem::Shift { .. } | GeneratorSystem::FreeBoundary { .. } => Ok(self.shift_step(x.coord(0))),
        }
    }

    fn cocycle(&self, x: &P, y: &P) -> Result<BigRational, SystemError> {
        if self.is_binary() {
            // ρ^x(y) = λ^{#1(y) − #1(x)} over the region where they differ
            let m = x.eventual_agreement(y).ok_or(SystemError::NotRelated)?;
            let ones = |z: &P| (0..m).filter(|&i| z.coord(i) == 1).count() as i64;
            Ok(ratio_pow(&self.lambda().unwrap(), ones(y) - ones(x)))
        } else {
            // potential Φ_i(z) = ∏_{t<i} ρ(h^t z, h^{t+1} z) to the common anchor
            let (i, j) = x.tail_anchor(y).ok_or(SystemError::NotRelated)?;
            let phi = |z: &P, n: usize| -> BigRational {
                (0..n).map(|t| self.shift_step(z.coord(t))).product()
            };
            Ok(phi(x, i) / phi(y, j))
        }
    }

    fn back_orbit_certificate(&self, x: &P) -> Option<Certificate> {
        match self {
            GeneratorSystem::LeastDeletion { .. } => Some(Certificate::Total {
                value: self.ld_back_orbit_total(x)?,
                source: CertificateSource::ClosedForm,
            }),
            GeneratorSystem::Shift { .. } => Some(Certificate::Infinite {
                reason: "every back level carries mass exactly 1".into(),
            }),
            GeneratorSystem::FreeBoundary { m, .. } => {
                let c: Vec<BigRational> = m.iter().map(|w| BigRational::one() - w).collect();
                let lo = c.iter().min().unwrap();
                let hi = c.iter().max().unwrap();
                Some(Certificate::Infinite {
                    reason: format!(
                        "a ↦ 1 − m(a) is a positive fixed vector of the level transfer operator, so every back level carries mass at least {}",
                        ratio_string(&(lo / hi))
                    ),
                })
            }
            GeneratorSystem::Odometer { .. } => None,
        }
    }

    fn forward_side_certificate(&self, _x: &P) -> Option<Certificate> {
        let reason = match self {
            GeneratorSystem::LeastDeletion { .. } => {
                "the back orbit of f^n(x) has mass at least ((1+λ)/λ)^n relative to x"
            }
            GeneratorSystem::Shift { .. } => "contains the forward ray, with ρ^x(h^n(x)) = k^n",
            GeneratorSystem::FreeBoundary { .. } => {
                "contains the back orbit of another preimage of x, which has infinite mass"
            }
            GeneratorSystem::Odometer { .. } => return None,
        };
        Some(Certificate::Infinite { reason: reason.into() })
    }

    fn sigma_certificate(&self, _x: &P) -> Option<Certificate> {
        match self {
            GeneratorSystem::Shift { k } => Some(Certificate::Total {
                value: BigRational::new(BigInt::from(*k), BigInt::from(*k - 1)),
                source: CertificateSource::ClosedForm,
            }),
            _ => None,
        }
    }

    fn back_level_profile(&self, _x: &P) -> Option<LevelProfile> {
        match self {
            GeneratorSystem::Shift { k } => Some(LevelProfile::Uniform {
                ratio: BigRational::new(BigInt::one(), BigInt::from(*k)),
            }),
            GeneratorSystem::FreeBoundary { .. } => Some(LevelProfile::RateBound {
                rate: self.free_boundary_rate().unwrap(),
            }),
            _ => None,
        }
    }
}

/// Exact pairwise cocycle on canonical points, with domain checks.
pub fn cocycle(system: &GeneratorSystem, x: &SymbolicPoint, y: &SymbolicPoint) -> Result<BigRational, SystemError> {
    system.validate_point(x)?;
    system.validate_point(y)?;
    if x == y {
        return Ok(BigRational::one());
    }
    TreeSystem::cocycle(system, x, y)
}

/// Independent check value: `ρ^x(f^{-1}(x)) = Σ_{y ∈ f^{-1}(x)} 1 / ρ^y(x)`.
pub fn preimage_mass<P, S: TreeSystem<P> + ?Sized>(system: &S, x: &P) -> Result<BigRational, SystemError> {
    let mut total = BigRational::zero();
    for y in system.preimages(x)? {
        total += system.step_cocycle(&y)?.recip();
    }
    Ok(total)
}
