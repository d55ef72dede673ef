//! The truncated Radon–Nikodym core: everything survives for the shift,
//! nothing for least deletion, and every exclusion comes with a certificate
//! that can be checked again independently.

use rn_topo::symbolic::{GeneratorSystem, SymbolicPoint};
use rn_topo::topography::{rn_core_truncated, verify_exclusion, CoreStatus};
use rn_topo::weight::{ratio, ratio_int, ratio_string};

fn main() {
    let w = ratio_int(1024);
    let shift = GeneratorSystem::shift(2).unwrap();
    let x = SymbolicPoint::parse(shift.alphabet(), "", "10").unwrap();
    let r = rn_core_truncated(&shift, &x, 4, &w, 8, 1 << 20).unwrap();
    println!("{}: {} of {} vertices in the core", shift.label(), r.in_core(), r.entries.len());

    let ld = GeneratorSystem::least_deletion(ratio(2, 3)).unwrap();
    let x = SymbolicPoint::parse(ld.alphabet(), "0010", "011").unwrap();
    let r = rn_core_truncated(&ld, &x, 3, &w, 8, 1 << 20).unwrap();
    println!("{}: {} of {} vertices excluded", ld.label(), r.excluded(), r.entries.len());
    for e in r.entries.iter().take(6) {
        if let CoreStatus::Excluded { certificate } = &e.status {
            let ok = verify_exclusion(&ld, certificate, 64, 1 << 20).unwrap();
            println!("  {} via {:?} -> {:?}: total {} ({})", e.point, certificate.origin, certificate.terminus, ratio_string(&certificate.total), if ok { "verified" } else { "FAILED" });
        }
    }
}
