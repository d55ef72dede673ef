//! JSON descriptors for systems, points and measures.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::symbolic::{Alphabet, GeneratorSystem, MeasureSpec, SymbolicPoint, SystemError, TildePoint, TildeSystem};
use crate::weight::{parse_ratio, serde_ratio};

/// `{"type": "least_deletion", "p": "2/3"}` and friends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemDescriptor {
    Shift {
        k: u8,
    },
    LeastDeletion {
        #[serde(with = "serde_ratio")]
        p: BigRational,
    },
    Odometer {
        #[serde(with = "serde_ratio")]
        p: BigRational,
    },
    FreeBoundary {
        d: u8,
        /// Step law by letter (`"a"`, `"A"`, ...); uniform when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<BTreeMap<String, String>>,
    },
    TildeExpansion {
        base: Box<SystemDescriptor>,
        n_max: usize,
    },
}

#[derive(Debug, Clone)]
pub enum BuiltSystem {
    Generator(GeneratorSystem),
    Tilde(TildeSystem),
}

impl BuiltSystem {
    pub fn generator(&self) -> Option<&GeneratorSystem> {
        match self {
            BuiltSystem::Generator(g) => Some(g),
            BuiltSystem::Tilde(_) => None,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            BuiltSystem::Generator(g) => g.alphabet(),
            BuiltSystem::Tilde(t) => t.base().alphabet(),
        }
    }
}

/// Parses a free-group step law given by letter.
pub fn parse_step_law(d: u8, m: &BTreeMap<String, String>) -> Result<Vec<BigRational>, SystemError> {
    let alphabet = Alphabet::FreeGroup(d);
    alphabet.check()?;
    let mut out = vec![None; alphabet.size()];
    for (letter, value) in m {
        let mut chars = letter.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(SystemError::Parameter(format!("step law key {letter:?} is not a single letter")));
        };
        let s = alphabet.parse_symbol(c)?;
        let r = parse_ratio(value).map_err(|e| SystemError::Parameter(format!("step law {letter}: {e}")))?;
        out[s as usize] = Some(r);
    }
    out.into_iter()
        .enumerate()
        .map(|(s, r)| {
            r.ok_or_else(|| SystemError::Parameter(format!("step law is missing {}", alphabet.symbol_char(s as u8))))
        })
        .collect()
}

impl SystemDescriptor {
    pub fn build(&self) -> Result<BuiltSystem, SystemError> {
        Ok(match self {
            SystemDescriptor::Shift { k } => BuiltSystem::Generator(GeneratorSystem::shift(*k)?),
            SystemDescriptor::LeastDeletion { p } => BuiltSystem::Generator(GeneratorSystem::least_deletion(p.clone())?),
            SystemDescriptor::Odometer { p } => BuiltSystem::Generator(GeneratorSystem::odometer(p.clone())?),
            SystemDescriptor::FreeBoundary { d, m: None } => {
                BuiltSystem::Generator(GeneratorSystem::free_boundary_uniform(*d)?)
            }
            SystemDescriptor::FreeBoundary { d, m: Some(m) } => {
                BuiltSystem::Generator(GeneratorSystem::free_boundary(*d, parse_step_law(*d, m)?)?)
            }
            SystemDescriptor::TildeExpansion { base, n_max } => match base.build()? {
                BuiltSystem::Generator(g) => BuiltSystem::Tilde(TildeSystem::new(g, *n_max)?),
                BuiltSystem::Tilde(_) => {
                    return Err(SystemError::Parameter("tilde expansions do not nest".into()))
                }
            },
        })
    }
}

/// An eventually periodic point `prefix · period^∞`, optionally a tagged
/// copy in a tilde expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDescriptor {
    #[serde(default)]
    pub prefix: String,
    pub period: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<usize>,
}

impl PointDescriptor {
    pub fn new(prefix: &str, period: &str) -> Self {
        PointDescriptor {
            prefix: prefix.into(),
            period: period.into(),
            tag: None,
        }
    }

    pub fn symbolic(&self, alphabet: Alphabet) -> Result<SymbolicPoint, SystemError> {
        Ok(SymbolicPoint::parse(alphabet, &self.prefix, &self.period)?)
    }

    pub fn tilde(&self, alphabet: Alphabet) -> Result<TildePoint<SymbolicPoint>, SystemError> {
        let x = self.symbolic(alphabet)?;
        Ok(match self.tag {
            None => TildePoint::Base(x),
            Some(n) => TildePoint::Tagged(x, n),
        })
    }
}

/// A sampling measure; defaults to the system's own measure when omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureDescriptor {
    Bernoulli {
        #[serde(with = "serde_ratio")]
        p: BigRational,
    },
    Uniform {
        k: u8,
    },
    Hitting {
        d: u8,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<BTreeMap<String, String>>,
    },
}

impl MeasureDescriptor {
    pub fn build(&self) -> Result<MeasureSpec, SystemError> {
        let spec = match self {
            MeasureDescriptor::Bernoulli { p } => MeasureSpec::Bernoulli { p: p.clone() },
            MeasureDescriptor::Uniform { k } => MeasureSpec::Uniform { k: *k },
            MeasureDescriptor::Hitting { d, m } => MeasureSpec::Hitting {
                d: *d,
                m: match m {
                    Some(m) => parse_step_law(*d, m)?,
                    None => vec![BigRational::new(1.into(), (2 * *d as i64).into()); 2 * *d as usize],
                },
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}
