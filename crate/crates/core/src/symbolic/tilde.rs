//! Tilde expansion: a tower over a binary base system that inserts a chain
//! of tagged copies `(x, N), (x, N−1), ..., (x, 0)` before each step `x ↦ g(x)`.
//!
//! `X_n` is the set of points beginning with `n` copies of the run symbol (1
//! for the odometer, 0 for least deletion) and `F_n` is agreement from
//! coordinate `n` on. The copy `(x, n)` carries the density
//! `D_n(x) = 2^{-n} · min_{y ∈ [x]_{F_n}} ρ^x(y)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::point::{find_index, Sequence};
use super::retract::{next_return, CoordinatePredicate, ReturnMode};
use super::system::{GeneratorSystem, TreeSystem};
use super::SystemError;
use crate::weight::ratio_pow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TildeBase {
    Odometer,
    LeastDeletion,
}

/// A vertex of the expanded system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TildePoint<P> {
    Base(P),
    Tagged(P, usize),
    /// The copy `(x, n)` with `n > n_max`; it has no forward image.
    Truncated(P, usize),
}

impl<P> TildePoint<P> {
    pub fn point(&self) -> &P {
        match self {
            TildePoint::Base(x) | TildePoint::Tagged(x, _) | TildePoint::Truncated(x, _) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeSystem {
    base: GeneratorSystem,
    n_max: usize,
}

impl TildeSystem {
    pub fn new(base: GeneratorSystem, n_max: usize) -> Result<Self, SystemError> {
        if !matches!(base, GeneratorSystem::Odometer { .. } | GeneratorSystem::LeastDeletion { .. }) {
            return Err(SystemError::Parameter(format!(
                "tilde expansion needs an odometer or least-deletion base, got {}",
                base.label()
            )));
        }
        if n_max < 1 {
            return Err(SystemError::Parameter("n_max must be at least 1".into()));
        }
        Ok(TildeSystem { base, n_max })
    }

    pub fn base(&self) -> &GeneratorSystem {
        &self.base
    }

    pub fn base_kind(&self) -> TildeBase {
        match self.base {
            GeneratorSystem::Odometer { .. } => TildeBase::Odometer,
            _ => TildeBase::LeastDeletion,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn run_symbol(&self) -> u8 {
        match self.base_kind() {
            TildeBase::Odometer => 1,
            TildeBase::LeastDeletion => 0,
        }
    }

    /// The `N` with `x ∈ X_N ∖ X_{N+1}`.
    pub fn level<P: Sequence>(&self, x: &P) -> Result<usize, SystemError> {
        let r = self.run_symbol();
        find_index(x, |s| s != r).ok_or_else(|| SystemError::Domain {
            system: self.label(),
            reason: "constant tail".into(),
        })
    }

    /// `D_n(x) = 2^{-n} · min(λ^{n−c}, λ^{−c})` where `c` counts ones among the
    /// first `n` coordinates: the extreme prefix variants are all ones or all zeros.
    pub fn density<P: Sequence>(&self, x: &P, n: usize) -> BigRational {
        let lambda = self.base.lambda().unwrap();
        let c = (0..n).filter(|&i| x.coord(i) == 1).count() as i64;
        let a = ratio_pow(&lambda, n as i64 - c);
        let b = ratio_pow(&lambda, -c);
        let two_n = BigRational::from_integer(num_traits::pow(BigInt::from(2), n));
        a.min(b) / two_n
    }

    pub fn point_density<P: Sequence>(&self, v: &TildePoint<P>) -> BigRational {
        match v {
            TildePoint::Base(_) => BigRational::one(),
            TildePoint::Tagged(x, n) | TildePoint::Truncated(x, n) => self.density(x, *n),
        }
    }

    /// `μ_n(X_n)`, the mass added by the level-`n` copies.
    pub fn added_measure(&self, n: usize) -> BigRational {
        let lambda = self.base.lambda().unwrap();
        let (p, q) = match &self.base {
            GeneratorSystem::Odometer { p } | GeneratorSystem::LeastDeletion { p } => (p.clone(), BigRational::one() - p),
            _ => unreachable!(),
        };
        let two_n = BigRational::from_integer(num_traits::pow(BigInt::from(2), n));
        let one = BigRational::one();
        match self.base_kind() {
            // X_n = [1^n]: D_n = 2^{-n} min(1, λ^{-n})
            TildeBase::Odometer => num_traits::pow(p, n) * one.min(ratio_pow(&lambda, -(n as i64))) / two_n,
            // X_n = [0^n]: D_n = 2^{-n} min(λ^n, 1)
            TildeBase::LeastDeletion => num_traits::pow(q, n) * one.min(ratio_pow(&lambda, n as i64)) / two_n,
        }
    }

    /// `ρ^x(f(r_{g,X_n}(x)))` for a base point `x`: the weight of the first
    /// tagged copy reached after retracting `x` onto `X_n` under the base map.
    pub fn retraction_weight<P: Sequence>(&self, x: &P, n: usize, budget: usize) -> Result<BigRational, SystemError> {
        let run = CoordinatePredicate::cylinder(vec![self.run_symbol(); n]);
        let (z, _) = next_return(&self.base, &run, x, ReturnMode::Retraction, budget)?;
        let v = self.forward(&TildePoint::Base(z))?;
        self.cocycle(&TildePoint::Base(x.clone()), &v)
    }

    fn label(&self) -> String {
        format!("tilde({}, n_max={})", self.base.label(), self.n_max)
    }

    fn truncated(&self, level: usize) -> SystemError {
        SystemError::Truncated {
            level,
            n_max: self.n_max,
        }
    }
}

impl<P: Sequence> TreeSystem<TildePoint<P>> for TildeSystem {
    fn name(&self) -> String {
        self.label()
    }

    fn validate(&self, v: &TildePoint<P>) -> Result<(), SystemError> {
        self.base.validate(v.point())?;
        match v {
            TildePoint::Base(_) => Ok(()),
            TildePoint::Tagged(x, n) | TildePoint::Truncated(x, n) => {
                let level = self.level(x)?;
                if *n > level {
                    return Err(SystemError::Domain {
                        system: self.label(),
                        reason: format!("tag {n} exceeds the leading run length {level}"),
                    });
                }
                let tagged = matches!(v, TildePoint::Tagged(..));
                if tagged && *n > self.n_max {
                    return Err(self.truncated(*n));
                }
                if !tagged && *n != level {
                    return Err(SystemError::Domain {
                        system: self.label(),
                        reason: "a truncated copy sits at the full run length".into(),
                    });
                }
                Ok(())
            }
        }
    }

    fn forward(&self, v: &TildePoint<P>) -> Result<TildePoint<P>, SystemError> {
        Ok(match v {
            TildePoint::Base(x) => {
                let level = self.level(x)?;
                if level > self.n_max {
                    TildePoint::Truncated(x.clone(), level)
                } else {
                    TildePoint::Tagged(x.clone(), level)
                }
            }
            TildePoint::Tagged(x, 0) => TildePoint::Base(self.base.forward(x)?),
            TildePoint::Tagged(x, n) => TildePoint::Tagged(x.clone(), n - 1),
            TildePoint::Truncated(_, n) => return Err(self.truncated(*n)),
        })
    }

    fn preimages(&self, v: &TildePoint<P>) -> Result<Vec<TildePoint<P>>, SystemError> {
        Ok(match v {
            TildePoint::Base(y) => {
                let mut out = Vec::new();
                for x in self.base.preimages(y)? {
                    if self.level(&x)? <= self.n_max {
                        out.push(TildePoint::Tagged(x, 0));
                    }
                }
                out
            }
            TildePoint::Tagged(x, n) => {
                if *n == self.level(x)? {
                    vec![TildePoint::Base(x.clone())]
                } else {
                    vec![TildePoint::Tagged(x.clone(), n + 1)]
                }
            }
            TildePoint::Truncated(x, _) => vec![TildePoint::Base(x.clone())],
        })
    }

    fn step_cocycle(&self, v: &TildePoint<P>) -> Result<BigRational, SystemError> {
        Ok(match v {
            TildePoint::Base(x) => {
                let level = self.level(x)?;
                self.density(x, level)
            }
            TildePoint::Tagged(x, 0) => self.base.step_cocycle(x)?,
            TildePoint::Tagged(x, n) => self.density(x, n - 1) / self.density(x, *n),
            TildePoint::Truncated(_, n) => return Err(self.truncated(*n)),
        })
    }

    fn cocycle(&self, a: &TildePoint<P>, b: &TildePoint<P>) -> Result<BigRational, SystemError> {
        let base = if a.point() == b.point() {
            BigRational::one()
        } else {
            self.base.cocycle(a.point(), b.point())?
        };
        Ok(base * self.point_density(b) / self.point_density(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{Alphabet, MeasureSpec, SymbolicPoint};
    use crate::weight::ratio;

    fn bin(prefix: &str, period: &str) -> SymbolicPoint {
        SymbolicPoint::parse(Alphabet::binary(), prefix, period).unwrap()
    }

    fn odo_tilde(n_max: usize) -> TildeSystem {
        TildeSystem::new(GeneratorSystem::odometer(ratio(1, 3)).unwrap(), n_max).unwrap()
    }

    #[test]
    fn rejects_other_bases() {
        assert!(TildeSystem::new(GeneratorSystem::shift(2).unwrap(), 3).is_err());
        assert!(TildeSystem::new(GeneratorSystem::odometer(ratio(1, 3)).unwrap(), 0).is_err());
    }

    #[test]
    fn trace_returns_to_g() {
        for base in [
            GeneratorSystem::odometer(ratio(1, 3)).unwrap(),
            GeneratorSystem::least_deletion(ratio(2, 3)).unwrap(),
        ] {
            let t = TildeSystem::new(base.clone(), 8).unwrap();
            for x in [bin("1101", "01"), bin("0001", "10"), bin("111", "0"), bin("", "01")] {
                if base.validate_point(&x).is_err() {
                    continue;
                }
                let n = t.level(&x).unwrap();
                let mut v = TildePoint::Base(x.clone());
                for _ in 0..n + 2 {
                    let w = t.forward(&v).unwrap();
                    assert!(t.preimages(&w).unwrap().contains(&v));
                    assert_eq!(t.cocycle(&v, &w).unwrap(), t.step_cocycle(&v).unwrap());
                    v = w;
                }
                assert_eq!(v, TildePoint::Base(base.forward(&x).unwrap()));
            }
        }
    }

    /// Oracle: minimum of ρ^x over all `2^n` prefix variants, by enumeration.
    fn brute_density(lambda: &BigRational, w: &[u8]) -> BigRational {
        let n = w.len();
        let c = w.iter().filter(|&&s| s == 1).count() as i64;
        let min = (0..1u32 << n)
            .map(|mask| ratio_pow(lambda, mask.count_ones() as i64 - c))
            .min()
            .unwrap();
        min / BigRational::from_integer(num_traits::pow(BigInt::from(2), n))
    }

    #[test]
    fn density_and_added_measure_match_enumeration() {
        for base in [
            GeneratorSystem::odometer(ratio(1, 3)).unwrap(),
            GeneratorSystem::least_deletion(ratio(2, 3)).unwrap(),
        ] {
            let t = TildeSystem::new(base.clone(), 10).unwrap();
            let lambda = base.lambda().unwrap();
            let mu = MeasureSpec::Bernoulli {
                p: match &base {
                    GeneratorSystem::Odometer { p } | GeneratorSystem::LeastDeletion { p } => p.clone(),
                    _ => unreachable!(),
                },
            };
            let mut total = BigRational::from_integer(0.into());
            for n in 0..=8usize {
                let mut added = BigRational::from_integer(0.into());
                for word in 0..1u32 << n {
                    let w: Vec<u8> = (0..n).map(|i| (word >> i & 1) as u8).collect();
                    let x = SymbolicPoint::new(Alphabet::binary(), &w, &[0, 1]).unwrap();
                    assert_eq!(t.density(&x, n), brute_density(&lambda, &w));
                    if w.iter().all(|&s| s == t.run_symbol()) {
                        added += mu.cylinder_mass(&w).unwrap() * brute_density(&lambda, &w);
                    }
                }
                assert_eq!(t.added_measure(n), added);
                assert!(added <= ratio_pow(&ratio(1, 2), n as i64));
                total += added;
            }
            assert!(total <= ratio(2, 1));
        }
    }

    #[test]
    fn truncation_marker() {
        let t = odo_tilde(2);
        let x = bin("1110", "01");
        let v = t.forward(&TildePoint::Base(x.clone())).unwrap();
        assert_eq!(v, TildePoint::Truncated(x.clone(), 3));
        assert_eq!(t.forward(&v), Err(SystemError::Truncated { level: 3, n_max: 2 }));
        // the g-preimage of g(x) is x itself, whose tower is cut
        let gx = t.base().forward(&x).unwrap();
        assert!(t.preimages(&TildePoint::Base(gx)).unwrap().is_empty());
    }

    #[test]
    fn retraction_weight_bound() {
        let t = odo_tilde(64);
        let odo = t.base().clone();
        for seed in 0..30 {
            let x = crate::symbolic::sample_point(&odo.measure(), seed).unwrap().into_local();
            for n in 0..=10 {
                let w = t.retraction_weight(&x, n, 1 << 12).unwrap();
                assert!(w <= ratio_pow(&ratio(1, 2), n as i64), "seed {seed}, n {n}: {w}");
            }
        }
    }
}
