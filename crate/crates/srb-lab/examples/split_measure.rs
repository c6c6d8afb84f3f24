//! Split an orbit's empirical measure into its neutral and expanding
//! conditionals, then probe both: the neutral part's observable integral
//! must sit in a thin two-sided window, and orbits drawn from the
//! expanding part should keep growing when run further.

use srb_lab::dynamics::{ProjectivePoint, SurfaceMap};
use srb_lab::measure::decompose::{check_item_c, check_item_d, decompose};

fn main() {
    let map = SurfaceMap::standard(1.2).unwrap();
    let xi = ProjectivePoint::new(0.123, 0.456, 0.3);
    let dec = decompose(&map, xi, 128, &[0.05, 0.1, 0.2], &[2, 4, 8], 0.5).unwrap();

    println!("expanding fraction beta = {:.4}", dec.beta);
    println!("neutral segments:");
    for seg in &dec.segments {
        println!("  [{:3}, {:3})  len {}", seg.start, seg.end, seg.len());
    }
    println!("stabilization drift {:.4}", dec.stabilization_drift);

    let item_c = check_item_c(&dec, map.phi_sup_estimate((12, 12, 12)));
    println!(
        "neutral integral {:.4} in [{:.4}, {:.4}] -> {}",
        item_c.integral, item_c.lower_bound, item_c.upper_bound, item_c.passed
    );

    if let Some(mu1) = &dec.mu1_hat {
        let item_d = check_item_d(&map, mu1, 32, 16, 7);
        println!(
            "expanding conditional: {:.2} of sampled starts still grow (min average {:+.4})",
            item_d.fraction_positive, item_d.min_average
        );
    }
}
