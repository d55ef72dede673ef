//! The tilde expansion of the odometer: retraction weights stay below
//! `2^-n` and the added measure of level n is at most `2^-n`.

use rn_topo::symbolic::{GeneratorSystem, TildeSystem};
use rn_topo::transport::sample;
use rn_topo::weight::{ratio, ratio_string, ratio_to_f64};

fn main() {
    let t = TildeSystem::new(GeneratorSystem::odometer(ratio(1, 3)).unwrap(), 64).unwrap();
    let measure = t.base().measure();
    let points: Vec<_> = (0..20).map(|i| sample(&measure, 11, i).unwrap()).collect();
    for n in 0..=10 {
        let worst = points
            .iter()
            .map(|x| t.retraction_weight(x, n, 1 << 20).unwrap())
            .max()
            .unwrap();
        println!(
            "n = {n:>2}: max weight {:<10} ({:.2e})  added measure {}",
            ratio_string(&worst),
            ratio_to_f64(&worst),
            ratio_string(&t.added_measure(n))
        );
    }
}
