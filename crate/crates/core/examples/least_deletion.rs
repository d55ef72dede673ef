//! The least deletion map on binary sequences. Forward weights are exactly
//! `λ^-n`; back orbits are finite and their mass `(1+λ)^m` matches a direct
//! enumeration.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rn_topo::symbolic::{Alphabet, GeneratorSystem, SymbolicPoint, TreeSystem};
use rn_topo::topography::{back_orbit_mass, forward_trace};
use rn_topo::weight::{ratio, ratio_string, ratio_to_f64};

fn main() {
    let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
    let x = SymbolicPoint::parse(Alphabet::binary(), "0010", "011").unwrap();
    let t = forward_trace(&ld, &x, 12).unwrap();
    println!("{} at {x}", ld.label());
    for n in [0, 1, 2, 6, 12] {
        println!("  n = {n:>2}: ρ = {:<8} partial sum {}", ratio_string(&t.rho[n]), ratio_string(&t.partial_sums[n]));
    }

    let r = back_orbit_mass(&ld, &x, 4, 1 << 20).unwrap();
    println!("  back orbit: lower bounds {:?}", r.lower_bounds.iter().map(ratio_string).collect::<Vec<_>>());
    println!("  certified total {:?}, exhausted {}", r.certified(), r.exhausted);

    // every point of the back orbit, by brute force
    let mut total = BigRational::zero();
    let mut frontier = vec![(x.clone(), BigRational::one())];
    while let Some((v, w)) = frontier.pop() {
        total += &w;
        for y in ld.preimages(&v).unwrap() {
            let step = ld.step_cocycle(&y).unwrap();
            frontier.push((y, &w / step));
        }
    }
    println!("  enumerated total {}", ratio_string(&total));

    let slow = GeneratorSystem::least_deletion(ratio(1, 3)).unwrap();
    let t = forward_trace(&slow, &x, 8).unwrap();
    let n = t.partial_sums.iter().position(|s| ratio_to_f64(s) > 100.0).unwrap();
    println!("{}: partial sums pass 100 at n = {n}", slow.label());
}
