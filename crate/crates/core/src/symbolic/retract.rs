//! Next-return maps and retractions onto coordinate-defined sets.

use std::fmt;
use std::sync::Arc;

use super::point::Sequence;
use super::system::TreeSystem;
use super::SystemError;

type Test = Arc<dyn Fn(&[u8]) -> bool + Send + Sync>;

/// Membership test for a set determined by the first `len` coordinates.
#[derive(Clone)]
pub struct CoordinatePredicate {
    name: String,
    len: usize,
    test: Test,
}

impl CoordinatePredicate {
    pub fn new(name: impl Into<String>, len: usize, test: impl Fn(&[u8]) -> bool + Send + Sync + 'static) -> Self {
        CoordinatePredicate {
            name: name.into(),
            len,
            test: Arc::new(test),
        }
    }

    /// The whole space.
    pub fn everything() -> Self {
        Self::new("everything", 0, |_| true)
    }

    /// Sequences beginning with `word`.
    pub fn cylinder(word: Vec<u8>) -> Self {
        let name = format!("cylinder {word:?}");
        let len = word.len();
        Self::new(name, len, move |w| w == &word[..])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains<P: Sequence>(&self, x: &P) -> bool {
        (self.test)(&x.materialize(self.len))
    }
}

impl fmt::Debug for CoordinatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordinatePredicate({}, len {})", self.name, self.len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnMode {
    /// `r_{Y,f}(x) = f^n(x)` with `n ≥ 0` least.
    Retraction,
    /// `f_Y(x) = f^n(x)` with `n ≥ 1` least.
    NextReturn,
}

/// First forward iterate of `x` in `Y`, with the number of steps taken.
pub fn next_return<P, S: TreeSystem<P>>(
    system: &S,
    y: &CoordinatePredicate,
    x: &P,
    mode: ReturnMode,
    budget: usize,
) -> Result<(P, usize), SystemError>
where
    P: Sequence,
{
    system.validate(x)?;
    let mut z = x.clone();
    let mut n = 0;
    if mode == ReturnMode::NextReturn {
        z = system.forward(&z)?;
        n = 1;
    }
    while !y.contains(&z) {
        if n >= budget {
            return Err(SystemError::RecurrenceBudget { examined: n });
        }
        z = system.forward(&z)?;
        n += 1;
    }
    Ok((z, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{Alphabet, GeneratorSystem, SymbolicPoint};
    use crate::weight::ratio;

    fn bin(prefix: &str, period: &str) -> SymbolicPoint {
        SymbolicPoint::parse(Alphabet::binary(), prefix, period).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let s = GeneratorSystem::shift(2).unwrap();
        let x = bin("1", "10");
        let all = CoordinatePredicate::everything();
        assert_eq!(next_return(&s, &all, &x, ReturnMode::NextReturn, 10).unwrap().0, s.forward(&x).unwrap());
        let y = CoordinatePredicate::cylinder(vec![1]);
        assert_eq!(next_return(&s, &y, &x, ReturnMode::Retraction, 10).unwrap(), (x, 0));
    }

    #[test]
    fn odometer_first_leading_one() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        let y = CoordinatePredicate::cylinder(vec![1]);
        for (u, q) in [("0", "01"), ("010", "0011"), ("00", "1"), ("1100", "10")] {
            let Ok(x) = SymbolicPoint::parse(Alphabet::binary(), u, q) else { continue };
            if odo.validate_point(&x).is_err() {
                continue;
            }
            let (z, n) = next_return(&odo, &y, &x, ReturnMode::NextReturn, 100).unwrap();
            // oracle: iterate directly and stop at the first leading 1
            let mut w = odo.forward(&x).unwrap();
            let mut k = 1;
            while w.coord(0) != 1 {
                w = odo.forward(&w).unwrap();
                k += 1;
            }
            assert_eq!((z, n), (w, k));
        }
    }

    #[test]
    fn budget_error() {
        let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
        let y = CoordinatePredicate::cylinder(vec![1]);
        let x = bin("0", "01");
        // least deletion never creates a leading 1
        assert_eq!(
            next_return(&ld, &y, &x, ReturnMode::NextReturn, 20),
            Err(SystemError::RecurrenceBudget { examined: 20 })
        );
    }
}
