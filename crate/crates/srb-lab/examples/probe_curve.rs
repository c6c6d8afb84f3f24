//! Pick the straight probe whose tangent field sees the most forward
//! expansion, then certify its smoothness data: the size pair bounds the
//! curve's higher derivatives and the derivatives of its tangent-angle
//! lift, which is what the subdivision engine controls at every mark.

use srb_lab::curve::{cr_size, lift, select_transverse_curve};
use srb_lab::dynamics::SurfaceMap;

fn main() {
    for map in [SurfaceMap::cat(), SurfaceMap::standard(1.2).unwrap(), SurfaceMap::identity()] {
        let (curve, best, all) = select_transverse_curve(&map, 64, 12).unwrap();
        println!(
            "{}: best angle {:.4} offset ({:.3}, {:.3}) fraction {:.3}",
            map.name(),
            best.angle,
            best.offset.0,
            best.offset.1,
            best.expanding_fraction
        );
        let seen: Vec<f64> = all.iter().map(|r| r.expanding_fraction).collect();
        let spread = seen.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        println!("  {} candidates, weakest fraction {spread:.3}", all.len());

        let size = cr_size(&curve, 8, 256).unwrap();
        let lifted = lift(&curve, 256).unwrap();
        println!(
            "  size ({:.4}, {:.4}), lift spans [{:.4}, {:.4}]",
            size.eps,
            size.eps_hat,
            lifted.theta_branch.first().unwrap(),
            lifted.theta_branch.last().unwrap()
        );
    }
}
