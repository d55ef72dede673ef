//! Product and hitting measures: exact cylinder masses and exact-ratio samplers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use thiserror::Error;

use super::point::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("probability {0} must lie strictly between 0 and 1")]
    BadProbability(String),
    #[error("generator weights must be positive, symmetric and sum to 1: {0}")]
    BadWeights(String),
    #[error("word is not reduced")]
    Unreduced,
    #[error("symbol {0} outside the alphabet")]
    BadSymbol(u8),
    #[error("denominators too large for exact sampling")]
    SamplingPrecision,
}

/// A probability measure on one-sided sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureSpec {
    /// i.i.d. coin flips with `P(x_i = 1) = p`.
    Bernoulli { p: BigRational },
    /// i.i.d. uniform symbols from `0..k`.
    Uniform { k: u8 },
    /// Exit distribution on the boundary of `F_d` of the random walk with step
    /// law `m` (indexed by symbol; see [`Alphabet::FreeGroup`]).
    Hitting { d: u8, m: Vec<BigRational> },
}

pub(crate) fn check_probability(p: &BigRational) -> Result<(), MeasureError> {
    if p.is_positive() && p < &BigRational::one() {
        Ok(())
    } else {
        Err(MeasureError::BadProbability(crate::weight::ratio_string(p)))
    }
}

pub(crate) fn check_step_weights(d: u8, m: &[BigRational]) -> Result<(), MeasureError> {
    let bad = |msg: &str| MeasureError::BadWeights(msg.to_string());
    if d < 2 {
        return Err(bad("need at least two generators"));
    }
    if m.len() != 2 * d as usize {
        return Err(bad("one weight per generator and inverse"));
    }
    if m.iter().any(|w| !w.is_positive()) {
        return Err(bad("weights must be positive"));
    }
    if (0..d as usize).any(|i| m[2 * i] != m[2 * i + 1]) {
        return Err(bad("weights must be symmetric"));
    }
    if m.iter().sum::<BigRational>() != BigRational::one() {
        return Err(bad("weights must sum to 1"));
    }
    Ok(())
}

impl MeasureSpec {
    pub fn alphabet(&self) -> Alphabet {
        match self {
            MeasureSpec::Bernoulli { .. } => Alphabet::binary(),
            MeasureSpec::Uniform { k } => Alphabet::Digits(*k),
            MeasureSpec::Hitting { d, .. } => Alphabet::FreeGroup(*d),
        }
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        match self {
            MeasureSpec::Bernoulli { p } => check_probability(p),
            MeasureSpec::Uniform { k } if *k >= 1 => Ok(()),
            MeasureSpec::Uniform { .. } => Err(MeasureError::BadWeights("k must be positive".into())),
            MeasureSpec::Hitting { d, m } => check_step_weights(*d, m),
        }
    }

    /// `P(a, b) = m(b) / m(S^± \ {a^-1})` for `b ≠ a^-1`, else 0.
    pub fn transition(&self, a: u8, b: u8) -> BigRational {
        match self {
            MeasureSpec::Hitting { m, .. } => {
                let inv = a ^ 1;
                if b == inv {
                    BigRational::zero()
                } else {
                    &m[b as usize] / (BigRational::one() - &m[inv as usize])
                }
            }
            _ => panic!("transition law only exists for hitting measures"),
        }
    }

    /// Exact mass of the cylinder of sequences starting with `word`.
    pub fn cylinder_mass(&self, word: &[u8]) -> Result<BigRational, MeasureError> {
        let size = self.alphabet().size();
        if let Some(&s) = word.iter().find(|&&s| s as usize >= size) {
            return Err(MeasureError::BadSymbol(s));
        }
        match self {
            MeasureSpec::Bernoulli { p } => {
                let q = BigRational::one() - p;
                Ok(word
                    .iter()
                    .map(|&s| if s == 1 { p.clone() } else { q.clone() })
                    .product())
            }
            MeasureSpec::Uniform { k } => Ok(BigRational::new(
                BigInt::one(),
                num_traits::pow(BigInt::from(*k), word.len()),
            )),
            MeasureSpec::Hitting { m, .. } => {
                if !self.alphabet().is_reduced(word) {
                    return Err(MeasureError::Unreduced);
                }
                let Some(&first) = word.first() else {
                    return Ok(BigRational::one());
                };
                let mut mass = m[first as usize].clone();
                for w in word.windows(2) {
                    mass *= self.transition(w[0], w[1]);
                }
                Ok(mass)
            }
        }
    }

    pub(crate) fn sampler(&self) -> Result<CoordinateSampler, MeasureError> {
        self.validate()?;
        Ok(match self {
            MeasureSpec::Bernoulli { p } => {
                let num = p.numer().to_u32().ok_or(MeasureError::SamplingPrecision)?;
                let den = p.denom().to_u32().ok_or(MeasureError::SamplingPrecision)?;
                CoordinateSampler::Bernoulli { num, den }
            }
            MeasureSpec::Uniform { k } => CoordinateSampler::Uniform { k: *k },
            MeasureSpec::Hitting { m, .. } => {
                let ints = integer_weights(m)?;
                let first = WeightedIndex::new(&ints).map_err(|_| MeasureError::SamplingPrecision)?;
                let after = (0..ints.len())
                    .map(|a| {
                        let mut w = ints.clone();
                        w[a ^ 1] = 0;
                        WeightedIndex::new(w).map_err(|_| MeasureError::SamplingPrecision)
                    })
                    .collect::<Result<_, _>>()?;
                CoordinateSampler::Markov { first, after }
            }
        })
    }
}

/// The weights scaled by the lcm of their denominators.
pub(crate) fn integer_weights(m: &[BigRational]) -> Result<Vec<u64>, MeasureError> {
    let lcm = m.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    m.iter()
        .map(|w| (w * BigRational::from_integer(lcm.clone())).to_integer().to_u64())
        .collect::<Option<_>>()
        .ok_or(MeasureError::SamplingPrecision)
}

/// Exact-ratio coordinate sampler: integer weights only, no floating point.
#[derive(Debug, Clone)]
pub(crate) enum CoordinateSampler {
    Bernoulli { num: u32, den: u32 },
    Uniform { k: u8 },
    Markov {
        first: WeightedIndex<u64>,
        after: Vec<WeightedIndex<u64>>,
    },
}

impl CoordinateSampler {
    pub(crate) fn next<R: Rng>(&self, prev: Option<u8>, rng: &mut R) -> u8 {
        match self {
            CoordinateSampler::Bernoulli { num, den } => rng.random_ratio(*num, *den) as u8,
            CoordinateSampler::Uniform { k } => rng.random_range(0..*k),
            CoordinateSampler::Markov { first, after } => match prev {
                None => first.sample(rng) as u8,
                Some(a) => after[a as usize].sample(rng) as u8,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::ratio;

    fn uniform_hitting(d: u8) -> MeasureSpec {
        MeasureSpec::Hitting {
            d,
            m: vec![ratio(1, 2 * d as i64); 2 * d as usize],
        }
    }

    #[test]
    fn cylinder_examples() {
        let b = MeasureSpec::Bernoulli { p: ratio(2, 3) };
        assert_eq!(b.cylinder_mass(&[1, 0]).unwrap(), ratio(2, 9));
        let h = uniform_hitting(2);
        assert_eq!(h.cylinder_mass(&[0]).unwrap(), ratio(1, 4));
        assert_eq!(h.cylinder_mass(&[0, 2]).unwrap(), ratio(1, 12));
        assert_eq!(h.cylinder_mass(&[0, 1]), Err(MeasureError::Unreduced));
        assert_eq!(MeasureSpec::Uniform { k: 3 }.cylinder_mass(&[2, 2]).unwrap(), ratio(1, 9));
    }

    fn reduced_words(d: u8, len: usize) -> Vec<Vec<u8>> {
        let a = Alphabet::FreeGroup(d);
        let mut words = vec![vec![]];
        for _ in 0..len {
            words = words
                .into_iter()
                .flat_map(|w| (0..2 * d).map(move |s| [w.clone(), vec![s]].concat()))
                .filter(|w| a.is_reduced(w))
                .collect();
        }
        words
    }

    #[test]
    fn hitting_cylinders_are_consistent() {
        let h = MeasureSpec::Hitting {
            d: 2,
            m: vec![ratio(1, 3), ratio(1, 3), ratio(1, 6), ratio(1, 6)],
        };
        h.validate().unwrap();
        let total: BigRational = reduced_words(2, 1).iter().map(|w| h.cylinder_mass(w).unwrap()).sum();
        assert_eq!(total, BigRational::one());
        for w in reduced_words(2, 3) {
            let ext: BigRational = (0..4)
                .map(|b| [w.clone(), vec![b]].concat())
                .filter(|v| Alphabet::FreeGroup(2).is_reduced(v))
                .map(|v| h.cylinder_mass(&v).unwrap())
                .sum();
            assert_eq!(ext, h.cylinder_mass(&w).unwrap());
        }
    }

    #[test]
    fn weight_validation() {
        assert!(MeasureSpec::Bernoulli { p: ratio(1, 1) }.validate().is_err());
        let asym = MeasureSpec::Hitting {
            d: 2,
            m: vec![ratio(1, 2), ratio(1, 6), ratio(1, 6), ratio(1, 6)],
        };
        assert!(asym.validate().is_err());
        assert!(uniform_hitting(3).validate().is_ok());
    }
}
