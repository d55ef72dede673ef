//! The one-sided shift on k symbols: every back level of a point carries
//! mass exactly 1, back weights decay like `k^-n`, and the forward ray grows
//! like `k^n`.

use rn_topo::symbolic::{GeneratorSystem, SymbolicPoint};
use rn_topo::topography::{back_orbit_mass, back_sphere_mass, back_tail_sup, explore_ball, forward_trace, sigma_backward};
use rn_topo::weight::ratio_string;

fn main() {
    let budget = 2_000_000;
    for (k, period) in [(2u8, "10"), (3, "120")] {
        let shift = GeneratorSystem::shift(k).unwrap();
        let x = SymbolicPoint::parse(shift.alphabet(), "", period).unwrap();
        println!("{} at {x}", shift.label());

        let ball = explore_ball(&shift, &x, 4, budget).unwrap();
        println!("  ball of radius 4: {} vertices, spheres {:?}", ball.len(), ball.sphere_sizes());

        for n in [0, 1, 5, 10] {
            let m = back_sphere_mass(&shift, &x, n, budget).unwrap();
            let t = back_tail_sup(&shift, &x, n, 10, budget).unwrap();
            println!("  n = {n:>2}: back sphere mass {}, tail sup {t:?}", ratio_string(&m));
        }
        let orbit = back_orbit_mass(&shift, &x, 8, budget).unwrap();
        println!("  back orbit to depth 8: {} ({:?})", ratio_string(orbit.last()), orbit.certified());
        let sigma = sigma_backward(&shift, &x, 8, budget).unwrap();
        println!("  sigma: {} ({:?})", ratio_string(sigma.last()), sigma.certified());
        let fwd = forward_trace(&shift, &x, 6).unwrap();
        println!("  forward: {:?}", fwd.rho.iter().map(ratio_string).collect::<Vec<_>>());
    }
}
