//! Exponent estimates on the linear model, two ways: the renormalized
//! cocycle product, and the observable averaged along a bundle orbit that
//! starts in a deliberately wrong direction. Both settle on the log of the
//! top eigenvalue because the projective dynamics attracts every line that
//! is not exactly the contracting one.

use srb_lab::dynamics::{cat_expansion_rate, ProjectivePoint, SurfacePoint, SurfaceMap};
use srb_lab::orbit::PhiSequence;

fn main() {
    let map = SurfaceMap::cat();
    let oracle = cat_expansion_rate();
    println!("eigenvalue oracle      {oracle:.12}");

    let x = SurfacePoint::new(0.2371, 0.9043);
    for n in [10, 100, 1000] {
        let est = map.upper_lyapunov(x, n);
        println!("cocycle product n={n:<5} {est:.12}  gap {:+.3e}", est - oracle);
    }

    // Start the line far from the expanding direction; the average is
    // polluted only by the first few steps.
    let xi = ProjectivePoint::new(0.2371, 0.9043, 2.0);
    for n in [100, 1000, 10000] {
        let avg = PhiSequence::along_orbit(&map, xi, n).average();
        println!("orbit average   n={n:<5} {avg:.12}  gap {:+.3e}", avg - oracle);
    }
}
