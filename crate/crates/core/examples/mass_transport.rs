//! Both sides of the mass-transport principle, estimated by exact
//! evaluation at sampled points.

use rn_topo::symbolic::GeneratorSystem;
use rn_topo::transport::{
    backward_balance_check, estimate_mtp, verify_inverse_mass_sum, verify_preimage_unit, EstimateOptions, KernelKind,
    TransportKernel,
};
use rn_topo::weight::ratio;

fn main() {
    let options = EstimateOptions::default();
    let samples = 20_000;
    let systems = [
        GeneratorSystem::shift(2).unwrap(),
        GeneratorSystem::least_deletion(ratio(2, 3)).unwrap(),
        GeneratorSystem::odometer(ratio(1, 3)).unwrap(),
    ];
    for g in &systems {
        let mu = g.measure();
        let e = verify_preimage_unit(g, &mu, samples, 1, &options).unwrap();
        println!("{:<24} ∫ρ^x(f^-1 x): {:.4} ± {:.4}", g.label(), e.received.mean, e.received.standard_error);
        let b = backward_balance_check(g, &mu, samples, 1, &options).unwrap();
        println!("{:<24} above/equal/below 1: {:.3} {:.3} {:.3}", "", b.fraction_above, b.fraction_equal, b.fraction_below);
    }

    let ld = &systems[1];
    for horizon in [8, 32] {
        let e = verify_inverse_mass_sum(ld, &ld.measure(), samples, horizon, 2, &options).unwrap();
        println!("inverse mass, horizon {horizon}: sent {:.4} ± {:.4}, received {:.4}", e.sent.mean, e.sent.standard_error, e.received.mean);
    }

    let band = KernelKind::ForwardBand { weights: vec![ratio(1, 2), ratio(1, 4), ratio(1, 8)] };
    for kernel in [TransportKernel::new(band.clone()), TransportKernel::new(band).opposite()] {
        let e = estimate_mtp(ld, &ld.measure(), &kernel, samples, 3, &options).unwrap();
        println!(
            "{:<32} sent {:.4} ± {:.4}  received {:.4} ± {:.4}  z = {:.2}",
            e.kernel,
            e.sent.mean,
            e.sent.standard_error,
            e.received.mean,
            e.received.standard_error,
            e.balance_z()
        );
    }
}
