//! Grow an admissible reparametrization family on the linear model and
//! compare its cardinality against both counting bounds. Pieces bisect
//! until every checkpoint certifies small smooth size, so the count grows
//! like the stretch factor and the per-step rate drifts down toward the
//! expansion exponent as the horizon grows.

use srb_lab::curve::subdivide::{admissible_family, lower_bound_check};
use srb_lab::curve::classify::upper_bound_check;
use srb_lab::curve::RegularCurve;
use srb_lab::dynamics::{cat_expansion_rate, SurfacePoint, SurfaceMap};
use srb_lab::orbit::ParameterSet;

fn main() {
    let map = SurfaceMap::cat();
    // Straight segment along the expanding direction.
    let angle = ((5.0f64.sqrt() - 1.0) / 2.0).atan();
    let curve = RegularCurve::straight(SurfacePoint::new(0.013, 0.017), angle, 0.999).unwrap();
    let everything = ParameterSet::from_members(
        (0..512).map(|i| (i as f64 + 0.5) / 512.0).collect(),
        1.0 / 512.0,
    );
    let h = cat_expansion_rate();
    let lambda_hat = map.asymptotic_dilation(2, (12, 12, 12));

    for n in [4, 6, 8, 10] {
        let family = admissible_family(&map, &curve, n, 4, 8, 0.081, 0.9, false).unwrap();
        let rate = family.ln_cardinality() / n as f64;
        let lower = lower_bound_check(std::slice::from_ref(&family), &curve, &everything, 0.9, 0.9);
        let upper =
            upper_bound_check(std::slice::from_ref(&family), n, 1.0, h, lambda_hat, 8, 0.2, 0.01)
                .unwrap();
        println!(
            "n = {n:2}: {:7} pieces, rate {rate:.5}, floor margin {:+.3}, cap margin {:+.3}",
            family.len(),
            lower.margin,
            upper.margin
        );
    }
    println!("expansion exponent {h:.5}");
}
