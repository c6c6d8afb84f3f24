//! Periodic-orbit census by Newton iteration from a seed grid.
//!
//! For each period p up to the cap, every grid seed is driven toward a
//! solution of f^p(x) = x (residuals taken in the nearest integer
//! representative, so orbits near the chart seam behave). Converged points
//! are recorded at their minimal period, deduplicated, and classified by
//! the eigenvalue moduli of the return differential. The identity-like
//! degeneracy (every point periodic, singular Newton matrix everywhere) is
//! detected and flagged instead of being enumerated.

use crate::dynamics::{nearest_rep, torus_dist, SurfaceMap, SurfacePoint};
use crate::linalg::Mat2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeriodicKind {
    /// Both multipliers outside the unit circle.
    Repelling,
    /// Both inside.
    Attracting,
    /// One in, one out.
    Saddle,
    /// At least one multiplier on the unit circle (within tolerance).
    Neutral,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Orbit points in dynamical order, rotated so the lexicographically
    /// smallest point comes first.
    pub points: Vec<SurfacePoint>,
    /// Minimal period.
    pub period: usize,
    /// Sorted eigenvalue moduli of the period-return differential.
    pub multipliers: [f64; 2],
    pub kind: PeriodicKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicScan {
    pub max_period: usize,
    pub grid: usize,
    pub orbits: Vec<PeriodicOrbit>,
    /// Set when the period-1 pass finds the Newton system singular with a
    /// vanishing residual at nearly every seed: the model fixes (almost)
    /// everything and enumeration is meaningless.
    pub degenerate_all_periodic: bool,
}

const RESIDUAL_TOL: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-8;
const MULTIPLIER_TOL: f64 = 1e-6;
const MAX_ORBITS: usize = 4096;

/// Return-map residual f^p(x) - x (nearest representative) and its
/// derivative D(f^p) - I.
fn return_residual(map: &SurfaceMap, x: SurfacePoint, p: usize) -> ([f64; 2], Mat2) {
    let mut point = x;
    let mut d = Mat2::IDENTITY;
    for _ in 0..p {
        d = map.differential(point).mul(&d);
        point = map.apply(point);
    }
    let r = [nearest_rep(point.u - x.u), nearest_rep(point.v - x.v)];
    (r, Mat2::new(d.m[0][0] - 1.0, d.m[0][1], d.m[1][0], d.m[1][1] - 1.0))
}

fn return_differential(map: &SurfaceMap, x: SurfacePoint, p: usize) -> Mat2 {
    let mut point = x;
    let mut d = Mat2::IDENTITY;
    for _ in 0..p {
        d = map.differential(point).mul(&d);
        point = map.apply(point);
    }
    d
}

fn classify(multipliers: [f64; 2]) -> PeriodicKind {
    let [lo, hi] = multipliers;
    if (lo - 1.0).abs() <= MULTIPLIER_TOL || (hi - 1.0).abs() <= MULTIPLIER_TOL {
        PeriodicKind::Neutral
    } else if lo > 1.0 {
        PeriodicKind::Repelling
    } else if hi < 1.0 {
        PeriodicKind::Attracting
    } else {
        PeriodicKind::Saddle
    }
}

/// Scan for periodic orbits of minimal period 1..=max_period from a
/// grid x grid seed lattice.
pub fn periodic_orbit_scan(map: &SurfaceMap, max_period: usize, grid: usize) -> PeriodicScan {
    assert!(max_period >= 1 && grid >= 1);
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    let mut degenerate = false;

    'periods: for p in 1..=max_period {
        if p == 1 {
            // Degeneracy probe: residual already zero with singular Newton
            // matrix at nearly every seed means the map fixes everything.
            let mut trivially_fixed = 0usize;
            for i in 0..grid {
                for j in 0..grid {
                    let x = SurfacePoint::new(
                        (i as f64 + 0.5) / grid as f64,
                        (j as f64 + 0.5) / grid as f64,
                    );
                    let (r, jac) = return_residual(map, x, 1);
                    if r[0].hypot(r[1]) < RESIDUAL_TOL && jac.det().abs() < 1e-10 {
                        trivially_fixed += 1;
                    }
                }
            }
            if trivially_fixed * 10 >= grid * grid * 9 {
                degenerate = true;
                break 'periods;
            }
        }

        for i in 0..grid {
            for j in 0..grid {
                let mut x = SurfacePoint::new(
                    (i as f64 + 0.5) / grid as f64,
                    (j as f64 + 0.5) / grid as f64,
                );
                let mut converged = false;
                for _ in 0..40 {
                    let (r, jac) = return_residual(map, x, p);
                    if r[0].hypot(r[1]) < RESIDUAL_TOL {
                        converged = true;
                        break;
                    }
                    let Some(inv) = jac.inverse() else {
                        break; // singular away from a root: seed lost
                    };
                    let step = inv.mul_vec(r);
                    x = SurfacePoint::new(x.u - step[0], x.v - step[1]);
                }
                if !converged {
                    continue;
                }
                // Record only at the minimal period.
                if (1..p).any(|q| {
                    p % q == 0 && torus_dist(map.orbit(x, q + 1)[q], x) < 1e-9
                }) {
                    continue;
                }
                let points = canonical_rotation(map.orbit(x, p));
                if orbits.iter().any(|o| {
                    o.period == p && torus_dist(o.points[0], points[0]) < DEDUP_TOL
                }) {
                    continue;
                }
                let multipliers = return_differential(map, points[0], p).eigen_moduli();
                orbits.push(PeriodicOrbit {
                    points,
                    period: p,
                    multipliers,
                    kind: classify(multipliers),
                });
                if orbits.len() >= MAX_ORBITS {
                    break 'periods;
                }
            }
        }
    }

    orbits.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.points[0].u.total_cmp(&b.points[0].u))
            .then(a.points[0].v.total_cmp(&b.points[0].v))
    });
    PeriodicScan { max_period, grid, orbits, degenerate_all_periodic: degenerate }
}

/// Rotate the orbit so its lexicographically smallest point leads; keeps
/// representatives unique for deduplication.
fn canonical_rotation(points: Vec<SurfacePoint>) -> Vec<SurfacePoint> {
    let lead = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out = Vec::with_capacity(points.len());
    out.extend_from_slice(&points[lead..]);
    out.extend_from_slice(&points[..lead]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::cat_expansion_rate;

    #[test]
    fn identity_is_flagged_degenerate() {
        let scan = periodic_orbit_scan(&SurfaceMap::identity(), 3, 8);
        assert!(scan.degenerate_all_periodic);
        assert!(scan.orbits.is_empty());
    }

    #[test]
    fn linear_model_census_up_to_period_two() {
        let scan = periodic_orbit_scan(&SurfaceMap::cat(), 2, 16);
        assert!(!scan.degenerate_all_periodic);
        let fixed: Vec<_> = scan.orbits.iter().filter(|o| o.period == 1).collect();
        assert_eq!(fixed.len(), 1, "one fixed point at the origin");
        assert!(torus_dist(fixed[0].points[0], SurfacePoint::new(0.0, 0.0)) < 1e-9);
        assert_eq!(fixed[0].kind, PeriodicKind::Saddle);
        let rate = cat_expansion_rate();
        assert!((fixed[0].multipliers[1].ln() - rate).abs() < 1e-9);
        // f^2 fixes 5 points: the origin plus two period-2 orbits.
        let twos: Vec<_> = scan.orbits.iter().filter(|o| o.period == 2).collect();
        assert_eq!(twos.len(), 2);
        for o in twos {
            assert_eq!(o.kind, PeriodicKind::Saddle);
            assert!((o.multipliers[1].ln() - 2.0 * rate).abs() < 1e-8);
            assert_eq!(o.points.len(), 2);
            // The two points map to each other.
            let img = SurfaceMap::cat().apply(o.points[0]);
            assert!(torus_dist(img, o.points[1]) < 1e-9);
        }
    }

    #[test]
    fn gradient_like_model_has_all_four_fixed_types() {
        let map = SurfaceMap::morse_smale(0.12).unwrap();
        let scan = periodic_orbit_scan(&map, 1, 12);
        assert!(!scan.degenerate_all_periodic);
        assert_eq!(scan.orbits.len(), 4);
        let kinds: Vec<PeriodicKind> = scan.orbits.iter().map(|o| o.kind).collect();
        let count = |k: PeriodicKind| kinds.iter().filter(|&&x| x == k).count();
        assert_eq!(count(PeriodicKind::Repelling), 1);
        assert_eq!(count(PeriodicKind::Attracting), 1);
        assert_eq!(count(PeriodicKind::Saddle), 2);
        let rep = scan.orbits.iter().find(|o| o.kind == PeriodicKind::Repelling).unwrap();
        assert!(torus_dist(rep.points[0], SurfacePoint::new(0.0, 0.0)) < 1e-9);
    }

    #[test]
    fn perturbed_model_keeps_a_saddle_fixed_point() {
        let map = SurfaceMap::perturbed_cat(0.03).unwrap();
        let scan = periodic_orbit_scan(&map, 1, 12);
        let saddles = scan.orbits.iter().filter(|o| o.kind == PeriodicKind::Saddle).count();
        assert!(saddles >= 1);
        assert!(scan.orbits.iter().all(|o| o.kind != PeriodicKind::Repelling));
    }

    #[test]
    fn scan_is_deterministic() {
        let map = SurfaceMap::standard(1.3).unwrap();
        let a = periodic_orbit_scan(&map, 3, 10);
        let b = periodic_orbit_scan(&map, 3, 10);
        assert_eq!(a.orbits.len(), b.orbits.len());
        for (x, y) in a.orbits.iter().zip(b.orbits.iter()) {
            assert_eq!(x.period, y.period);
            assert_eq!(x.points[0], y.points[0]);
            assert_eq!(x.multipliers, y.multipliers);
        }
    }
}
