//! Boundary points of the simple random walk on the free group F_2, and a
//! pilot calibration of the stability window K: the first-letter law must
//! not move when K grows.

use rn_topo::plan::parse_step_law;
use rn_topo::symbolic::{random_walk_boundary_sample, Alphabet, GeneratorSystem, SymbolicPoint, TreeSystem};
use rn_topo::weight::ratio_string;

fn frequencies(m: &[num_rational::BigRational], window: u64, samples: u64) -> (Vec<f64>, f64) {
    let mut counts = [0u64; 4];
    let mut steps = 0u64;
    for seed in 0..samples {
        let w = random_walk_boundary_sample(2, m, seed, window, 2, 1 << 22).unwrap();
        counts[w.prefix[0] as usize] += 1;
        steps += w.steps;
    }
    let f = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    (f, steps as f64 / samples as f64)
}

fn main() {
    let uniform = GeneratorSystem::free_boundary_uniform(2).unwrap();
    let GeneratorSystem::FreeBoundary { m, .. } = &uniform else { unreachable!() };
    println!("pilot, 2000 walks per window");
    for window in [4, 16, 64, 256] {
        let (f, steps) = frequencies(m, window, 2000);
        println!("  K = {window:>3}: first letters {f:.3?}, mean steps {steps:.1}");
    }

    let alphabet = Alphabet::FreeGroup(2);
    let x = SymbolicPoint::parse(alphabet, "a", "bA").unwrap();
    let step = uniform.step_cocycle(&x).unwrap();
    println!("step cocycle of the uniform walk at {x}: {}", ratio_string(&step));

    let skewed: std::collections::BTreeMap<String, String> =
        [("a", "1/3"), ("A", "1/3"), ("b", "1/6"), ("B", "1/6")].map(|(k, v)| (k.to_string(), v.to_string())).into();
    let m = parse_step_law(2, &skewed).unwrap();
    let (f, _) = frequencies(&m, 64, 2000);
    println!("skewed law, K = 64: first letters {f:.3?}");
}
