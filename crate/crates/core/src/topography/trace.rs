use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::Step;
use crate::symbolic::{GeneratorSystem, Sequence, SystemError, TreeSystem};
use crate::weight::serde_ratio_vec;

/// Exact weights `ρ^x(v_j)` along a probe `x = v_0, v_1, ...`, with partial
/// sums and running extremes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    #[serde(with = "serde_ratio_vec")]
    pub rho: Vec<BigRational>,
    #[serde(with = "serde_ratio_vec")]
    pub partial_sums: Vec<BigRational>,
    #[serde(with = "serde_ratio_vec")]
    pub running_min: Vec<BigRational>,
    #[serde(with = "serde_ratio_vec")]
    pub running_max: Vec<BigRational>,
}

impl Trace {
    pub fn from_values(rho: Vec<BigRational>) -> Self {
        let mut partial_sums = Vec::with_capacity(rho.len());
        let mut running_min: Vec<BigRational> = Vec::with_capacity(rho.len());
        let mut running_max: Vec<BigRational> = Vec::with_capacity(rho.len());
        for r in &rho {
            match partial_sums.last() {
                None => {
                    partial_sums.push(r.clone());
                    running_min.push(r.clone());
                    running_max.push(r.clone());
                }
                Some(s) => {
                    partial_sums.push(s + r);
                    running_min.push(running_min.last().unwrap().clone().min(r.clone()));
                    running_max.push(running_max.last().unwrap().clone().max(r.clone()));
                }
            }
        }
        Trace {
            rho,
            partial_sums,
            running_min,
            running_max,
        }
    }

    /// Number of steps taken (one less than the number of vertices).
    pub fn len(&self) -> usize {
        self.rho.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `ρ^x(f^j(x))` for `j ≤ n`, multiplied out along the forward ray. Stops
/// early where the forward map is truncated.
pub fn forward_trace<P, S>(system: &S, x: &P, n: usize) -> Result<Trace, SystemError>
where
    P: Clone,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(x)?;
    let mut values = vec![BigRational::one()];
    let mut z = x.clone();
    let mut w = BigRational::one();
    for _ in 0..n {
        let next = match system.forward(&z) {
            Ok(next) => next,
            Err(SystemError::Truncated { .. }) => break,
            Err(e) => return Err(e),
        };
        w *= system.step_cocycle(&z)?;
        values.push(w.clone());
        z = next;
    }
    Ok(Trace::from_values(values))
}

/// Rule for choosing one preimage per backward step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "indices", rename_all = "snake_case")]
pub enum Selector {
    /// Least preimage in the point order.
    LeastPoint,
    /// Largest `ρ^v(y)`, ties to the least point.
    #[default]
    GreatestWeight,
    /// Position `indices[j]` in the sorted preimage list at step `j`.
    Indices(Vec<usize>),
}

/// Backward probe of up to `depth` steps from `start`, never stepping to
/// `exclude` on the first step. Stops early at a vertex with no admissible
/// preimage.
pub fn probe_backward<P, S>(
    system: &S,
    start: &P,
    exclude: Option<&P>,
    depth: usize,
    selector: &Selector,
) -> Result<Trace, SystemError>
where
    P: Eq,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(start)?;
    let mut values = vec![BigRational::one()];
    let mut w = BigRational::one();
    let mut v_owned: Option<P> = None;
    for j in 0..depth {
        let v = v_owned.as_ref().unwrap_or(start);
        let mut pre = system.preimages(v)?;
        if j == 0 {
            if let Some(e) = exclude {
                pre.retain(|y| y != e);
            }
        }
        if pre.is_empty() {
            break;
        }
        let (y, rho) = match selector {
            Selector::LeastPoint => {
                let y = pre.swap_remove(0);
                let rho = system.step_cocycle(&y)?.recip();
                (y, rho)
            }
            Selector::GreatestWeight => {
                let mut best: Option<(P, BigRational)> = None;
                for y in pre {
                    let r = system.step_cocycle(&y)?.recip();
                    if best.as_ref().is_none_or(|(_, b)| r > *b) {
                        best = Some((y, r));
                    }
                }
                best.unwrap()
            }
            Selector::Indices(idx) => {
                let i = *idx.get(j).ok_or_else(|| SystemError::Parameter(format!("selector has no index for step {j}")))?;
                if i >= pre.len() {
                    return Err(SystemError::Parameter(format!(
                        "selector index {i} at step {j}, but only {} preimages",
                        pre.len()
                    )));
                }
                let y = pre.swap_remove(i);
                let rho = system.step_cocycle(&y)?.recip();
                (y, rho)
            }
        };
        w *= rho;
        values.push(w.clone());
        v_owned = Some(y);
    }
    Ok(Trace::from_values(values))
}

/// `ρ^x` along a backward probe from `x`.
pub fn back_trace<P, S>(system: &S, x: &P, n: usize, selector: &Selector) -> Result<Trace, SystemError>
where
    P: Eq,
    S: TreeSystem<P> + ?Sized,
{
    probe_backward(system, x, None, n, selector)
}

/// Extremes of the exponent `D_j` in `ρ^x(f^{±j}(x)) = λ^{D_j}` over `0 ≤ j ≤ horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceExtremes {
    pub direction: Step,
    pub horizon: u128,
    pub min_exponent: i64,
    pub argmin: u128,
    pub max_exponent: i64,
    pub argmax: u128,
}

const WINDOW: usize = 127;
const TAIL_CAP: usize = 1 << 20;

fn bit<P: Sequence>(x: &P, i: usize, flip: bool) -> u8 {
    x.coord(i) ^ flip as u8
}

fn max_pop(lo: u128, hi: u128) -> (u32, u128) {
    let mut best = (hi.count_ones(), hi);
    for b in 0..128 {
        if hi >> b & 1 == 1 {
            let v = (hi >> b >> 1 << 1 << b) | ((1u128 << b) - 1);
            if v >= lo && (v.count_ones(), std::cmp::Reverse(v)) > (best.0, std::cmp::Reverse(best.1)) {
                best = (v.count_ones(), v);
            }
        }
    }
    best
}

fn min_pop(lo: u128, hi: u128) -> (u32, u128) {
    let mut best = (lo.count_ones(), lo);
    for b in 1..128 {
        let step = 1u128 << b;
        let Some(v) = lo.div_ceil(step).checked_mul(step) else { break };
        if v <= hi && (v.count_ones(), v) < best {
            best = (v.count_ones(), v);
        }
    }
    best
}

/// Exact forward or backward trace extremes for the odometer over a horizon
/// far beyond direct iteration, using `f^j(x) = x + j` in the 2-adic integers.
/// The horizon must be below `2^127`.
pub fn odometer_extremes<P: Sequence>(
    system: &GeneratorSystem,
    x: &P,
    horizon: u128,
    direction: Step,
) -> Result<TraceExtremes, SystemError> {
    if !matches!(system, GeneratorSystem::Odometer { .. }) {
        return Err(SystemError::Parameter(format!("{} is not an odometer", system.label())));
    }
    TreeSystem::<P>::validate(system, x)?;
    if horizon >> WINDOW != 0 {
        return Err(SystemError::Parameter(format!("odometer horizon must be below 2^{WINDOW}")));
    }
    // f^{-j}(x) is the complement of f^j applied to the complement of x
    let flip = direction == Step::Backward;
    let t: u128 = (0..WINDOW).map(|i| (bit(x, i, flip) as u128) << i).sum();
    let modulus = 1u128 << WINDOW;
    let pt = t.count_ones() as i64;
    let h = horizon;
    let mut lo_ext = (0i64, 0u128);
    let mut hi_ext = (0i64, 0u128);
    let mut consider = |delta: i64, j: u128| {
        if delta < lo_ext.0 || (delta == lo_ext.0 && j < lo_ext.1) {
            lo_ext = (delta, j);
        }
        if delta > hi_ext.0 || (delta == hi_ext.0 && j < hi_ext.1) {
            hi_ext = (delta, j);
        }
    };
    // no carry out of the window
    let last = (modulus - 1 - t).min(h);
    let (p, v) = max_pop(t, t + last);
    consider(p as i64 - pt, v - t);
    let (p, v) = min_pop(t, t + last);
    consider(p as i64 - pt, v - t);
    if h >= modulus - t {
        let mut u = 0;
        while bit(x, WINDOW + u, flip) == 1 {
            u += 1;
            if u > TAIL_CAP {
                return Err(SystemError::Parameter("odometer tail search cap exceeded".into()));
            }
        }
        let carry = 1 - u as i64;
        let hi = t + h - modulus;
        let (p, v) = max_pop(0, hi);
        consider(p as i64 - pt + carry, v + modulus - t);
        let (p, v) = min_pop(0, hi);
        consider(p as i64 - pt + carry, v + modulus - t);
    }
    let sign = if flip { -1 } else { 1 };
    let (mut min_e, mut max_e) = (lo_ext, hi_ext);
    if flip {
        std::mem::swap(&mut min_e, &mut max_e);
    }
    Ok(TraceExtremes {
        direction,
        horizon,
        min_exponent: sign * min_e.0,
        argmin: min_e.1,
        max_exponent: sign * max_e.0,
        argmax: max_e.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{sample_point, Alphabet, SymbolicPoint};
    use crate::weight::{ratio, ratio_int, ratio_pow};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn bin(prefix: &str, period: &str) -> SymbolicPoint {
        SymbolicPoint::parse(Alphabet::binary(), prefix, period).unwrap()
    }

    #[test]
    fn least_deletion_forward() {
        let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
        let t = forward_trace(&ld, &bin("", "1"), 40);
        assert!(t.is_err(), "constant tail is outside the domain");
        let t = forward_trace(&ld, &bin("", "110"), 40).unwrap();
        for n in 0..=40 {
            assert_eq!(t.rho[n], ratio_pow(&ratio(1, 2), n as i64));
            assert_eq!(t.partial_sums[n], ratio_int(2) - ratio_pow(&ratio(1, 2), n as i64));
            assert!(t.partial_sums[n] < ratio_int(2));
        }
    }

    #[test]
    fn shift_forward() {
        let s3 = GeneratorSystem::shift(3).unwrap();
        let t = forward_trace(&s3, &SymbolicPoint::parse(Alphabet::Digits(3), "", "120").unwrap(), 10).unwrap();
        for (j, r) in t.rho.iter().enumerate() {
            assert_eq!(r, &ratio_pow(&ratio_int(3), j as i64));
            assert_eq!(t.running_min[j], ratio_int(1));
        }
    }

    /// Oracle: compare coordinates of `x` and `f^j(x)` directly and count flips.
    #[test]
    fn odometer_forward_flip_count() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        let lambda = ratio(1, 2);
        let x = bin("1101", "011");
        let t = forward_trace(&odo, &x, 200).unwrap();
        let mut z = x.clone();
        for j in 0..=200 {
            let a = x.materialize(64);
            let b = z.materialize(64);
            let d: i64 = a.iter().zip(&b).map(|(&p, &q)| q as i64 - p as i64).sum();
            assert_eq!(t.rho[j], ratio_pow(&lambda, d));
            z = odo.forward(&z).unwrap();
        }
    }

    #[test]
    fn backward_probes() {
        let s2 = GeneratorSystem::shift(2).unwrap();
        let x = bin("", "10");
        let t = back_trace(&s2, &x, 6, &Selector::default()).unwrap();
        assert_eq!(t.rho[6], ratio_pow(&ratio(1, 2), 6));
        let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
        let y = bin("0001", "10");
        let t = back_trace(&ld, &y, 10, &Selector::GreatestWeight).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.rho[3], ratio_int(8));
        let fy = ld.forward(&y).unwrap();
        let t = probe_backward(&ld, &fy, Some(&y), 10, &Selector::LeastPoint).unwrap();
        assert!(t.rho.iter().all(|r| !r.is_zero()));
        assert!(back_trace(&s2, &x, 2, &Selector::Indices(vec![0])).is_err());
        let t = back_trace(&s2, &x, 2, &Selector::Indices(vec![1, 0])).unwrap();
        assert_eq!(t.len(), 2);
    }

    fn brute_extremes(odo: &GeneratorSystem, x: &SymbolicPoint, h: usize, direction: Step) -> (BigRational, BigRational) {
        let t = match direction {
            Step::Forward => forward_trace(odo, x, h).unwrap(),
            Step::Backward => {
                let mut vals = vec![BigRational::one()];
                let mut z = x.clone();
                for _ in 0..h {
                    z = odo.preimages(&z).unwrap().pop().unwrap();
                    vals.push(odo.cocycle(x, &z).unwrap());
                }
                Trace::from_values(vals)
            }
        };
        (t.running_min[h].clone(), t.running_max[h].clone())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn fast_extremes_match_iteration(prefix in proptest::collection::vec(0u8..2, 0..140), period in proptest::collection::vec(0u8..2, 2..6), h in 0usize..600) {
            let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
            let lambda = ratio(1, 2);
            prop_assume!(period.contains(&0) && period.contains(&1));
            let x = SymbolicPoint::new(Alphabet::binary(), &prefix, &period).unwrap();
            for dir in [Step::Forward, Step::Backward] {
                let e = odometer_extremes(&odo, &x, h as u128, dir).unwrap();
                let (lo, hi) = brute_extremes(&odo, &x, h, dir);
                // λ < 1: the largest exponent gives the smallest weight
                prop_assert_eq!(ratio_pow(&lambda, e.max_exponent), lo);
                prop_assert_eq!(ratio_pow(&lambda, e.min_exponent), hi);
            }
        }
    }

    #[test]
    fn extremes_across_the_window_carry() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        let lambda = ratio(1, 2);
        // window value 2^127 - 32, then 1101 repeating: the carry leaves the window at j = 32
        let prefix: Vec<u8> = std::iter::repeat_n(0, 5).chain(std::iter::repeat_n(1, 122)).collect();
        let x = SymbolicPoint::new(Alphabet::binary(), &prefix, &[1, 1, 0, 1]).unwrap();
        for h in [31, 32, 300] {
            let e = odometer_extremes(&odo, &x, h, Step::Forward).unwrap();
            let (lo, hi) = brute_extremes(&odo, &x, h as usize, Step::Forward);
            assert_eq!(ratio_pow(&lambda, e.max_exponent), lo);
            assert_eq!(ratio_pow(&lambda, e.min_exponent), hi);
        }
        let e = odometer_extremes(&odo, &x, 300, Step::Forward).unwrap();
        assert_eq!((e.min_exponent, e.argmin), (-123, 32));
    }

    #[test]
    fn sampled_points_oscillate() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        for seed in 0..20 {
            let x = sample_point(&odo.measure(), seed).unwrap().into_local();
            let e = odometer_extremes(&odo, &x, 1 << 100, Step::Forward).unwrap();
            assert!(e.max_exponent > 5 && e.min_exponent < -5, "{e:?}");
        }
    }

    #[test]
    fn large_horizons() {
        let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();
        let x = sample_point(&odo.measure(), 7).unwrap().into_local();
        assert!(odometer_extremes(&odo, &x, 1 << 127, Step::Forward).is_err());
        let mut prev = (0, 0);
        for h in (0..127).step_by(6) {
            let e = odometer_extremes(&odo, &x, 1 << h, Step::Backward).unwrap();
            assert!(e.min_exponent <= prev.0 && e.max_exponent >= prev.1, "h = {h}");
            assert!(e.argmin <= 1 << h && e.argmax <= 1 << h);
            prev = (e.min_exponent, e.max_exponent);
        }
    }
}
