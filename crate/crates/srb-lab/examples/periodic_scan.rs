//! Sweep a seed grid for low-period orbits and classify each one by the
//! eigenvalue moduli of its return differential. The scan feeds the
//! exponent functional: a candidate limit measure is disqualified if it
//! charges a neighborhood of a repelling orbit.

use srb_lab::dynamics::SurfaceMap;
use srb_lab::measure::periodic::periodic_orbit_scan;

fn main() {
    for map in [
        SurfaceMap::cat(),
        SurfaceMap::standard(1.2).unwrap(),
        SurfaceMap::morse_smale(0.1).unwrap(),
    ] {
        let scan = periodic_orbit_scan(&map, 2, 48);
        println!("{}: {} orbits up to period {}", map.name(), scan.orbits.len(), scan.max_period);
        for orbit in &scan.orbits {
            let p = orbit.points[0];
            println!(
                "  period {} at ({:.4}, {:.4})  moduli [{:.4}, {:.4}]  {:?}",
                orbit.period, p.u, p.v, orbit.multipliers[0], orbit.multipliers[1], orbit.kind
            );
        }
    }
}
