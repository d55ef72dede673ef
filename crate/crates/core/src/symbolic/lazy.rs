//! Seeded, memoized random sequences and finite edits of them.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::measure::{CoordinateSampler, MeasureError, MeasureSpec};
use super::point::{Alphabet, Sequence, SAMPLED_SEARCH_CAP};

/// A random sequence drawn coordinate by coordinate on demand. Coordinate
/// `i`, once drawn, never changes; the stream depends only on the seed.
#[derive(Debug, Clone)]
pub struct LazyPoint {
    alphabet: Alphabet,
    seed: u64,
    rng: ChaCha8Rng,
    sampler: CoordinateSampler,
    coords: Vec<u8>,
}

/// A fresh lazy sample of `measure` with the given seed.
pub fn sample_point(measure: &MeasureSpec, seed: u64) -> Result<LazyPoint, MeasureError> {
    LazyPoint::new(measure, ChaCha8Rng::seed_from_u64(seed), seed)
}

impl LazyPoint {
    /// Samples from an existing generator; `seed` is recorded for reporting only.
    pub fn new(measure: &MeasureSpec, rng: ChaCha8Rng, seed: u64) -> Result<Self, MeasureError> {
        Ok(LazyPoint {
            alphabet: measure.alphabet(),
            seed,
            rng,
            sampler: measure.sampler()?,
            coords: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn materialized(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&mut self, i: usize) -> u8 {
        while self.coords.len() <= i {
            let prev = self.coords.last().copied();
            let s = self.sampler.next(prev, &mut self.rng);
            self.coords.push(s);
        }
        self.coords[i]
    }

    pub fn prefix(&mut self, n: usize) -> Vec<u8> {
        if n > 0 {
            self.coord(n - 1);
        }
        self.coords[..n].to_vec()
    }

    /// Shares the stream as the sequence `x_0 x_1 ...` itself.
    pub fn into_local(self) -> LocalPoint {
        LocalPoint {
            alphabet: self.alphabet,
            head: Vec::new(),
            stream: Rc::new(RefCell::new(self)),
            offset: 0,
        }
    }
}

/// `head · s_offset s_{offset+1} ...` for a shared lazy stream `s`: the
/// points reachable from a sample by finitely many edits. Normalized so the
/// head never ends with the symbol the stream would supply there.
#[derive(Clone)]
pub struct LocalPoint {
    alphabet: Alphabet,
    head: Vec<u8>,
    stream: Rc<RefCell<LazyPoint>>,
    offset: usize,
}

impl LocalPoint {
    fn stream_coord(&self, i: usize) -> u8 {
        self.stream.borrow_mut().coord(i)
    }

    fn normalize(mut self) -> Self {
        while let Some(&last) = self.head.last() {
            if self.offset == 0 || self.stream_coord(self.offset - 1) != last {
                break;
            }
            self.head.pop();
            self.offset -= 1;
        }
        self
    }

    pub fn head(&self) -> &[u8] {
        &self.head
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn seed(&self) -> u64 {
        self.stream.borrow().seed()
    }

    fn same_stream(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.stream, &other.stream)
    }
}

impl Sequence for LocalPoint {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn coord(&self, i: usize) -> u8 {
        if i < self.head.len() {
            self.head[i]
        } else {
            self.stream_coord(self.offset + i - self.head.len())
        }
    }

    fn splice(&self, drop: usize, prepend: &[u8]) -> Self {
        let (mut head, offset) = if drop <= self.head.len() {
            (self.head[drop..].to_vec(), self.offset)
        } else {
            (Vec::new(), self.offset + drop - self.head.len())
        };
        head.splice(0..0, prepend.iter().copied());
        LocalPoint {
            alphabet: self.alphabet,
            head,
            stream: Rc::clone(&self.stream),
            offset,
        }
        .normalize()
    }

    fn search_limit(&self) -> Option<usize> {
        None
    }

    fn eventual_agreement(&self, other: &Self) -> Option<usize> {
        let aligned = self.offset as isize - self.head.len() as isize == other.offset as isize - other.head.len() as isize;
        (self.same_stream(other) && aligned).then(|| self.head.len().max(other.head.len()))
    }

    fn tail_anchor(&self, other: &Self) -> Option<(usize, usize)> {
        if !self.same_stream(other) {
            return None;
        }
        let a = self.offset.max(other.offset);
        Some((self.head.len() + a - self.offset, other.head.len() + a - other.offset))
    }
}

impl PartialEq for LocalPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_stream(other) && self.offset == other.offset && self.head == other.head
    }
}

impl Eq for LocalPoint {}

/// Lexicographic on coordinates; sequences that agree on the first
/// [`SAMPLED_SEARCH_CAP`] symbols fall back to the representation.
impl Ord for LocalPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (0..SAMPLED_SEARCH_CAP)
            .map(|i| self.coord(i).cmp(&other.coord(i)))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| (self.offset, &self.head).cmp(&(other.offset, &other.head)))
    }
}

impl PartialOrd for LocalPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LocalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}·s[{}..] (seed {})",
            self.alphabet.render(&self.head),
            self.offset,
            self.seed()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::ratio;

    fn bern() -> MeasureSpec {
        MeasureSpec::Bernoulli { p: ratio(2, 3) }
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = sample_point(&bern(), 42).unwrap();
        let mut b = sample_point(&bern(), 42).unwrap();
        assert_eq!(a.prefix(200), b.prefix(200));
        assert_eq!(a.seed(), 42);
    }

    #[test]
    fn memoization() {
        let mut a = sample_point(&bern(), 7).unwrap();
        let late = a.coord(100);
        let early = a.coord(5);
        let mut b = sample_point(&bern(), 7).unwrap();
        let p = b.prefix(101);
        assert_eq!(p[5], early);
        assert_eq!(p[100], late);
    }

    #[test]
    fn bernoulli_frequency() {
        let n = 100_000u32;
        let hits = (0..n)
            .filter(|&s| sample_point(&bern(), s as u64).unwrap().coord(0) == 1)
            .count() as f64;
        let p = 2.0 / 3.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits / n as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn hitting_samples_are_reduced() {
        let h = MeasureSpec::Hitting {
            d: 2,
            m: vec![ratio(1, 4); 4],
        };
        for s in 0..50 {
            let w = sample_point(&h, s).unwrap().prefix(60);
            assert!(Alphabet::FreeGroup(2).is_reduced(&w));
        }
    }

    #[test]
    fn local_edits_normalize() {
        let x = sample_point(&bern(), 3).unwrap().into_local();
        let s: Vec<u8> = x.materialize(20);
        let y = x.splice(4, &s[..4]);
        assert_eq!(y, x);
        let z = x.splice(2, &[1 - s[0], 1 - s[1]]);
        assert_ne!(z, x);
        assert_eq!(z.head().len(), 2);
        assert_eq!(x.eventual_agreement(&z), Some(2));
        let w = x.splice(3, &[]);
        assert_eq!(w.materialize(5), s[3..8].to_vec());
        assert_eq!(x.tail_anchor(&w), Some((3, 0)));
        assert_eq!(x.eventual_agreement(&w), None);
        assert_eq!(z.cmp(&x), (1 - s[0]).cmp(&s[0]).then((1 - s[1]).cmp(&s[1])));
    }
}
