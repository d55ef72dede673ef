use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

/// A finite totally ordered alphabet.
///
/// `Digits(k)` uses the symbols `0..k`, rendered `0-9a-z`. `FreeGroup(d)`
/// uses `2d` symbols: generator `i` is `2i` (rendered `a`, `b`, ...) and its
/// inverse is `2i + 1` (rendered `A`, `B`, ...), so the order is `a < A < b < B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Alphabet {
    Digits(u8),
    FreeGroup(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("symbol {symbol:?} is not in alphabet {alphabet:?}")]
    InvalidSymbol { symbol: String, alphabet: Alphabet },
    #[error("unsupported alphabet {0:?}")]
    UnsupportedAlphabet(Alphabet),
}

impl Alphabet {
    pub fn binary() -> Self {
        Alphabet::Digits(2)
    }

    pub fn size(self) -> usize {
        match self {
            Alphabet::Digits(k) => k as usize,
            Alphabet::FreeGroup(d) => 2 * d as usize,
        }
    }

    pub fn check(self) -> Result<(), PointError> {
        match self {
            Alphabet::Digits(k) if (1..=36).contains(&k) => Ok(()),
            Alphabet::FreeGroup(d) if (1..=26).contains(&d) => Ok(()),
            a => Err(PointError::UnsupportedAlphabet(a)),
        }
    }

    /// Free-group inverse of a symbol (identity for digit alphabets).
    pub fn inverse(self, s: u8) -> u8 {
        match self {
            Alphabet::Digits(_) => s,
            Alphabet::FreeGroup(_) => s ^ 1,
        }
    }

    pub fn symbol_char(self, s: u8) -> char {
        match self {
            Alphabet::Digits(_) => char::from_digit(s as u32, 36).unwrap_or('?'),
            Alphabet::FreeGroup(_) => {
                let base = if s.is_multiple_of(2) { b'a' } else { b'A' };
                (base + s / 2) as char
            }
        }
    }

    pub fn parse_symbol(self, c: char) -> Result<u8, PointError> {
        let bad = || PointError::InvalidSymbol {
            symbol: c.to_string(),
            alphabet: self,
        };
        let s = match self {
            Alphabet::Digits(_) => c.to_digit(36).ok_or_else(bad)? as u8,
            Alphabet::FreeGroup(_) => match c {
                'a'..='z' => 2 * (c as u8 - b'a'),
                'A'..='Z' => 2 * (c as u8 - b'A') + 1,
                _ => return Err(bad()),
            },
        };
        if (s as usize) < self.size() {
            Ok(s)
        } else {
            Err(bad())
        }
    }

    pub fn parse_word(self, w: &str) -> Result<Vec<u8>, PointError> {
        w.chars().filter(|c| !c.is_whitespace()).map(|c| self.parse_symbol(c)).collect()
    }

    pub fn render(self, w: &[u8]) -> String {
        w.iter().map(|&s| self.symbol_char(s)).collect()
    }

    /// No symbol is followed by its inverse (always true for digit alphabets).
    pub fn is_reduced(self, w: &[u8]) -> bool {
        match self {
            Alphabet::Digits(_) => true,
            Alphabet::FreeGroup(_) => w.windows(2).all(|p| p[1] != self.inverse(p[0])),
        }
    }
}

/// Read access to an infinite symbol sequence plus the one structural edit all
/// the example maps are built from: drop a finite prefix, prepend a word.
pub trait Sequence: Clone + Eq + Ord + fmt::Debug {
    fn alphabet(&self) -> Alphabet;
    fn coord(&self, i: usize) -> u8;
    /// The sequence with its first `drop` symbols removed and `prepend` put in front.
    fn splice(&self, drop: usize, prepend: &[u8]) -> Self;
    /// Index bound for symbol searches: a symbol occurring infinitely often
    /// occurs before this index. `None` for sampled sequences.
    fn search_limit(&self) -> Option<usize>;
    /// The exact representation, when there is one.
    fn exact(&self) -> Option<&SymbolicPoint> {
        None
    }
    /// Index-aligned tail equality: some `M` with `x_i = y_i` for all `i ≥ M`.
    fn eventual_agreement(&self, other: &Self) -> Option<usize>;
    /// Shifted tail equality: `(i, j)` with `x_{i+t} = y_{j+t}` for all `t ≥ 0`.
    /// For periodic tails the anchor is the canonical cut of the cycle.
    fn tail_anchor(&self, other: &Self) -> Option<(usize, usize)>;

    fn materialize(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.coord(i)).collect()
    }
}

/// Search cap for sampled sequences; a Bernoulli tail avoiding a symbol for
/// this long has probability below `2^-10^5` for every parameter used here.
pub const SAMPLED_SEARCH_CAP: usize = 1 << 22;

/// First index `i` with `pred(x_i)`.
pub fn find_index<P: Sequence>(x: &P, pred: impl Fn(u8) -> bool) -> Option<usize> {
    let limit = x.search_limit().unwrap_or(SAMPLED_SEARCH_CAP);
    (0..limit).find(|&i| pred(x.coord(i)))
}

/// An eventually periodic sequence `prefix · period^∞` in canonical form:
/// the period is primitive and the prefix is as short as possible.
/// Structural equality coincides with equality of the infinite sequences.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    alphabet: Alphabet,
    prefix: Vec<u8>,
    period: Vec<u8>,
}

fn primitive_root(q: &[u8]) -> &[u8] {
    let n = q.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| q.chunks(d).all(|c| c == &q[..d]))
        .map(|d| &q[..d])
        .unwrap_or(q)
}

impl SymbolicPoint {
    /// Builds the canonical representative of `prefix · period^∞`.
    pub fn new(alphabet: Alphabet, prefix: &[u8], period: &[u8]) -> Result<Self, PointError> {
        alphabet.check()?;
        if period.is_empty() {
            return Err(PointError::EmptyPeriod);
        }
        if let Some(&s) = prefix.iter().chain(period).find(|&&s| s as usize >= alphabet.size()) {
            return Err(PointError::InvalidSymbol {
                symbol: s.to_string(),
                alphabet,
            });
        }
        Ok(Self::canonical(alphabet, prefix.to_vec(), period))
    }

    /// Parses symbol strings such as `("110", "01")` or `("aB", "ab")`.
    pub fn parse(alphabet: Alphabet, prefix: &str, period: &str) -> Result<Self, PointError> {
        Self::new(alphabet, &alphabet.parse_word(prefix)?, &alphabet.parse_word(period)?)
    }

    fn canonical(alphabet: Alphabet, mut prefix: Vec<u8>, period: &[u8]) -> Self {
        let mut period = primitive_root(period).to_vec();
        while let (Some(&a), Some(&b)) = (prefix.last(), period.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        SymbolicPoint {
            alphabet,
            prefix,
            period,
        }
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Combined representation length `|prefix| + |period|`.
    pub fn repr_len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// The period read from coordinate `prefix.len() + shift` on.
    fn rotated_period(&self, shift: usize) -> Vec<u8> {
        let mut q = self.period.clone();
        let n = q.len();
        q.rotate_left(shift % n);
        q
    }

    /// Symbols occurring in the periodic tail.
    pub fn tail_contains(&self, s: u8) -> bool {
        self.period.contains(&s)
    }

    /// Tail-equivalence with index alignment: `x_i = y_i` for all large `i`.
    /// Returns the index from which the sequences agree.
    pub fn eventually_equal(&self, other: &SymbolicPoint) -> Option<usize> {
        if self.alphabet != other.alphabet || self.period.len() != other.period.len() {
            return None;
        }
        let m = self.prefix.len().max(other.prefix.len());
        let p = self.period.len();
        (m..m + p)
            .all(|i| self.coord(i) == other.coord(i))
            .then_some(m)
    }

    /// Least rotation of the period (the representative at which the
    /// periodic cycle of the shift is cut) and the number of shifts needed to
    /// reach it.
    pub fn least_rotation_height(&self) -> (Vec<u8>, usize) {
        let p = self.period.len();
        let (s, rot) = (0..p)
            .map(|s| (s, self.rotated_period(s)))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty period");
        (rot, self.prefix.len() + s)
    }
}

impl Sequence for SymbolicPoint {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn coord(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    fn splice(&self, drop: usize, prepend: &[u8]) -> Self {
        let (mut prefix, period) = if drop <= self.prefix.len() {
            (self.prefix[drop..].to_vec(), self.period.clone())
        } else {
            (Vec::new(), self.rotated_period(drop - self.prefix.len()))
        };
        prefix.splice(0..0, prepend.iter().copied());
        Self::canonical(self.alphabet, prefix, &period)
    }

    fn search_limit(&self) -> Option<usize> {
        Some(self.repr_len())
    }

    fn exact(&self) -> Option<&SymbolicPoint> {
        Some(self)
    }

    fn eventual_agreement(&self, other: &Self) -> Option<usize> {
        self.eventually_equal(other)
    }

    fn tail_anchor(&self, other: &Self) -> Option<(usize, usize)> {
        if self.alphabet != other.alphabet {
            return None;
        }
        let (lx, hx) = self.least_rotation_height();
        let (ly, hy) = other.least_rotation_height();
        (lx == ly).then_some((hx, hy))
    }
}

/// Lexicographic order of the infinite sequences. Two distinct eventually
/// periodic sequences differ before `max(|u|,|u'|) + lcm(|q|,|q'|)`.
impl Ord for SymbolicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let bound = self.prefix.len().max(other.prefix.len()) + self.period.len().lcm(&other.period.len());
        (0..bound)
            .map(|i| self.coord(i).cmp(&other.coord(i)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.alphabet.cmp(&other.alphabet))
    }
}

impl PartialOrd for SymbolicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({})^∞",
            self.alphabet.render(&self.prefix),
            self.alphabet.render(&self.period)
        )
    }
}

impl fmt::Debug for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
