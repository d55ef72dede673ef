//! Forward traces of the odometer swing between 0 and ∞. This example
//! calibrates how far one has to look: for each pilot point it finds the
//! least `h` such that `ρ^x(f^j(x))` exceeds `2^5` and drops below `2^-5`
//! for some `j ≤ 2^h`, then reports the quantiles. The tail of that
//! distribution is close to geometric, so the horizon for a per-point miss
//! rate of `1e-8` is extrapolated from the 90th and 99th percentiles and
//! rounded up to a multiple of 4.
//!
//! ```text
//! cargo run --release --example odometer_pilot -- [points] [first-seed]
//! ```

use rn_topo::symbolic::{sample_point, GeneratorSystem};
use rn_topo::topography::{odometer_extremes, Step};
use rn_topo::weight::ratio;

const TARGET: i64 = 5;

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let points = args.next().unwrap_or(500);
    let first = args.next().unwrap_or(1 << 32);
    let odo = GeneratorSystem::odometer(ratio(1, 3)).unwrap();

    let mut needed = Vec::new();
    for seed in first..first + points {
        let x = sample_point(&odo.measure(), seed).unwrap().into_local();
        let h = (1..=126).find(|&h| {
            // λ = 1/2, so ρ = 2^{-D}
            let e = odometer_extremes(&odo, &x, 1u128 << h, Step::Forward).unwrap();
            e.max_exponent > TARGET && e.min_exponent < -TARGET
        });
        needed.push(h.unwrap_or(u32::MAX));
    }
    needed.sort_unstable();
    let q = |f: f64| needed[((needed.len() - 1) as f64 * f) as usize];
    println!("pilot over {points} points from seed {first}");
    println!("log2 horizon needed: median {} p90 {} p99 {} max {}", q(0.5), q(0.9), q(0.99), q(1.0));
    let per_decade = q(0.99) - q(0.9);
    let h = (q(0.99) + 6 * per_decade).div_ceil(4) * 4;
    println!("tail: {per_decade} bits per decade");
    println!("calibrated horizon: 2^{}", h.min(126));
}
