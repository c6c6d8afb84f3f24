//! Expansion checkpoints and neutral segments along one kicked-twist
//! orbit. Checkpoints are times from which every backward window grew at
//! least at the floor rate; neutral segments are windows where the sums
//! stay under a small linear slope. The two carve an orbit into the parts
//! that drive growth and the parts that merely wait.

use srb_lab::dynamics::{ProjectivePoint, SurfaceMap};
use srb_lab::orbit::{long_neutral_segments, neutral_mass, pliss_times, PhiSequence};

fn main() {
    let map = SurfaceMap::standard(1.2).unwrap();
    let xi = ProjectivePoint::new(0.123, 0.456, 0.3);
    let n = 200;
    let seq = PhiSequence::along_orbit(&map, xi, n);
    println!("orbit of {n} steps, phi average {:.4}", seq.average());

    for rate in [0.0, 0.05, 0.1] {
        let times = pliss_times(&seq.sums, rate);
        println!(
            "rate {rate:<4} -> {:3} checkpoints, density {:.3}",
            times.len(),
            times.len() as f64 / (n + 1) as f64
        );
    }

    println!("\nneutral mass by slope and window floor:");
    for alpha in [0.02, 0.05, 0.1] {
        for min_len in [4, 8, 16] {
            let segments = long_neutral_segments(&seq.sums, alpha, min_len);
            let mass = neutral_mass(&seq.sums, alpha, min_len);
            println!("  alpha {alpha:<5} L {min_len:<3} -> {:2} segments, mass {mass:.3}", segments.len());
        }
    }
}
