//! Parametrized curves in the chart and their smooth-size bookkeeping.
//!
//! A curve is polynomial in its parameter s in [0, 1], evaluated on the
//! torus. Smooth size at order r is measured on the unit-domain scale: for
//! a piece [a, b] the reparametrized germ is s(tau) = a + (b - a) tau, so
//! coordinate derivatives pick up (b - a)^k and halving a piece at least
//! halves every order. The pair (eps, eps_hat) splits the bound between
//! coordinate derivatives (orders 1..=r) and tangent-direction derivatives
//! (orders 1..r): a piece is admissible when both sampled sups fit.

pub mod classify;
pub mod subdivide;

use crate::dynamics::series::{CurveJet, Series};
use crate::dynamics::{
    normalize_angle, torus_dist, ProjectivePoint, SurfaceMap, SurfacePoint, MAX_JET_ORDER,
};
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

/// Speed floor below which a curve counts as degenerate at unit scale.
pub const SPEED_FLOOR: f64 = 1e-12;

/// Polynomial curve s -> (u(s), v(s)) on the torus, s in [0, 1].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularCurve {
    /// Coefficients of u(s), ascending degree.
    pub u_coeffs: Vec<f64>,
    /// Coefficients of v(s), ascending degree.
    pub v_coeffs: Vec<f64>,
}

impl RegularCurve {
    /// Validated constructor: checks speed along a 1024-point grid and
    /// rejects curves that revisit a chart point at distant parameters.
    pub fn new(u_coeffs: Vec<f64>, v_coeffs: Vec<f64>) -> Result<Self> {
        let curve = RegularCurve { u_coeffs, v_coeffs };
        curve.validate(1024)?;
        Ok(curve)
    }

    /// Straight segment from `start` at chart angle `angle`, given arc length.
    pub fn straight(start: SurfacePoint, angle: f64, length: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        RegularCurve::new(
            vec![start.u, length * c],
            vec![start.v, length * s],
        )
    }

    fn validate(&self, grid: usize) -> Result<()> {
        if self.u_coeffs.is_empty() || self.v_coeffs.is_empty() {
            return Err(LabError::Config("curve needs coefficients".into()));
        }
        let mut points = Vec::with_capacity(grid + 1);
        let mut min_speed = f64::INFINITY;
        for i in 0..=grid {
            let s = i as f64 / grid as f64;
            min_speed = min_speed.min(self.speed(s));
            points.push(self.point(s));
        }
        if min_speed < SPEED_FLOOR {
            return Err(LabError::RegularityViolation { min_speed });
        }
        // Distant parameters landing on (nearly) the same chart point.
        let sep = 16; // ignore neighbors closer than sep / grid in parameter
        for i in 0..=grid {
            for j in (i + sep)..=grid {
                if torus_dist(points[i], points[j]) < 1e-7 {
                    return Err(LabError::SelfIntersection {
                        s1: i as f64 / grid as f64,
                        s2: j as f64 / grid as f64,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.u_coeffs.len().max(self.v_coeffs.len()) - 1
    }

    fn eval_poly(coeffs: &[f64], s: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    /// Chart point at parameter s (reduced to the torus).
    pub fn point(&self, s: f64) -> SurfacePoint {
        SurfacePoint::new(
            Self::eval_poly(&self.u_coeffs, s),
            Self::eval_poly(&self.v_coeffs, s),
        )
    }

    /// Velocity vector at s (chart coordinates, not reduced).
    pub fn velocity(&self, s: f64) -> [f64; 2] {
        let d = |coeffs: &[f64]| {
            coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc: f64, (k, c)| acc * s + c * k as f64)
        };
        [d(&self.u_coeffs), d(&self.v_coeffs)]
    }

    pub fn speed(&self, s: f64) -> f64 {
        let w = self.velocity(s);
        w[0].hypot(w[1])
    }

    /// Tangent direction at s, in [0, pi).
    pub fn direction(&self, s: f64) -> f64 {
        let w = self.velocity(s);
        normalize_angle(w[1].atan2(w[0]))
    }

    /// Bundle point (sigma(s), [sigma'(s)]).
    pub fn bundle_point(&self, s: f64) -> ProjectivePoint {
        let p = self.point(s);
        ProjectivePoint::new(p.u, p.v, self.direction(s))
    }

    /// Arc length by grid quadrature.
    pub fn length(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|i| {
                let s = (i as f64 + 0.5) / grid as f64;
                self.speed(s) / grid as f64
            })
            .sum()
    }

    /// Taylor shift: coefficients of the polynomial in h around s, via
    /// binomial expansion of each ck (s + h)^k. Degrees stay tiny.
    fn recentered(coeffs: &[f64], s: f64, order: usize) -> Series {
        let mut out = Series::zeros(order);
        for (k, &ck) in coeffs.iter().enumerate() {
            // ck (s + h)^k contributes ck C(k, j) s^{k-j} to the h^j term.
            let mut binom = 1.0;
            for j in 0..=k.min(order) {
                let spow = if k == j { 1.0 } else { s.powi((k - j) as i32) };
                out.c[j] += ck * binom * spow;
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        out
    }

    /// Germ of the reparametrized curve tau -> sigma(s + scale * tau) at
    /// tau = 0, truncated at `order`.
    pub fn scaled_jet(&self, s: f64, scale: f64, order: usize) -> CurveJet {
        let mut u = Self::recentered(&self.u_coeffs, s, order);
        let mut v = Self::recentered(&self.v_coeffs, s, order);
        let mut pw = 1.0;
        for j in 0..=order {
            u.c[j] *= pw;
            v.c[j] *= pw;
            pw *= scale;
        }
        CurveJet { u, v }
    }
}

/// Smooth-size certificate: coordinate-derivative and direction-derivative
/// sups of a (reparametrized) curve piece.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrSize {
    /// Max over orders 1..=r of the coordinate derivative norms.
    pub eps: f64,
    /// Max over orders 1..r of the tangent-direction derivatives.
    pub eps_hat: f64,
}

impl CrSize {
    pub fn within(&self, eps: f64, eps_hat: f64) -> bool {
        self.eps <= eps && self.eps_hat <= eps_hat
    }

    pub fn scaled_half(&self) -> CrSize {
        // Contracting the domain by 1/2 scales order k by 2^-k <= 1/2.
        CrSize { eps: self.eps / 2.0, eps_hat: self.eps_hat / 2.0 }
    }
}

/// Smooth size of a whole curve at order r, sampled on a grid over the
/// unit-scale parametrization.
pub fn cr_size(curve: &RegularCurve, r: usize, grid: usize) -> Result<CrSize> {
    if r < 2 || r > MAX_JET_ORDER {
        return Err(LabError::OrderUnavailable { requested: r, available: MAX_JET_ORDER });
    }
    let mut eps = 0.0f64;
    let mut eps_hat = 0.0f64;
    for i in 0..=grid {
        let s = i as f64 / grid as f64;
        let jet = curve.scaled_jet(s, 1.0, r);
        if jet.derivative_norm(1) < SPEED_FLOOR {
            return Err(LabError::DegenerateCurve { s, speed: jet.derivative_norm(1) });
        }
        for k in 1..=r {
            eps = eps.max(jet.derivative_norm(k));
        }
        for (k, d) in jet.direction_derivatives(r - 1).iter().enumerate() {
            let _ = k;
            eps_hat = eps_hat.max(d.abs());
        }
    }
    Ok(CrSize { eps, eps_hat })
}

/// Curve lifted to the projective bundle, with a continuous real-valued
/// branch of the tangent angle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftedCurve {
    /// Sample parameters i / grid.
    pub grid: usize,
    pub points: Vec<ProjectivePoint>,
    /// Continuous angle branch: theta_branch[i] projects to points[i].dir.
    pub theta_branch: Vec<f64>,
}

/// Lift a curve through its tangent directions, unwrapping the angle into
/// a continuous branch.
pub fn lift(curve: &RegularCurve, grid: usize) -> Result<LiftedCurve> {
    assert!(grid >= 1);
    let pi = std::f64::consts::PI;
    let mut points = Vec::with_capacity(grid + 1);
    let mut branch = Vec::with_capacity(grid + 1);
    for i in 0..=grid {
        let s = i as f64 / grid as f64;
        if curve.speed(s) < SPEED_FLOOR {
            return Err(LabError::DegenerateCurve { s, speed: curve.speed(s) });
        }
        let xi = curve.bundle_point(s);
        points.push(xi);
        let theta = xi.dir.theta;
        let prev: f64 = *branch.last().unwrap_or(&theta);
        // Choose the representative theta + k pi nearest the running branch.
        let k = ((prev - theta) / pi).round();
        branch.push(theta + k * pi);
    }
    Ok(LiftedCurve { grid, points, theta_branch: branch })
}

/// Candidate transverse curve quality: fraction of sampled parameters
/// whose tangent direction expands over the probe horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransverseReport {
    pub angle: f64,
    pub offset: (f64, f64),
    pub expanding_fraction: f64,
}

/// Pick a straight probe curve whose tangent field sees the most
/// finite-horizon expansion: 8 directions times 8 offsets, sampled at
/// `samples` parameters over `horizon` steps. Returns the winning curve,
/// its report, and the full candidate table (deterministic order).
pub fn select_transverse_curve(
    map: &SurfaceMap,
    samples: usize,
    horizon: usize,
) -> Result<(RegularCurve, TransverseReport, Vec<TransverseReport>)> {
    assert!(samples > 0 && horizon > 0);
    let mut reports = Vec::with_capacity(64);
    let mut best: Option<(RegularCurve, TransverseReport)> = None;
    for dir_idx in 0..8usize {
        let angle = dir_idx as f64 * std::f64::consts::PI / 8.0;
        for off_idx in 0..8usize {
            let offset = (
                (off_idx % 4) as f64 * 0.25 + 0.013,
                (off_idx / 4) as f64 * 0.5 + 0.017,
            );
            let curve =
                RegularCurve::straight(SurfacePoint::new(offset.0, offset.1), angle, 0.999)?;
            let mut expanding = 0usize;
            for i in 0..samples {
                let s = (i as f64 + 0.5) / samples as f64;
                let xi = curve.bundle_point(s);
                let growth: f64 = crate::orbit::PhiSequence::along_orbit(map, xi, horizon)
                    .average();
                if growth > 0.0 {
                    expanding += 1;
                }
            }
            let report = TransverseReport {
                angle,
                offset,
                expanding_fraction: expanding as f64 / samples as f64,
            };
            reports.push(report.clone());
            let better = match &best {
                None => true,
                Some((_, b)) => report.expanding_fraction > b.expanding_fraction,
            };
            if better {
                best = Some((curve, report));
            }
        }
    }
    let (curve, report) = best.unwrap();
    Ok((curve, report, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::cat_expansion_rate;

    #[test]
    fn straight_curve_basics() {
        let c = RegularCurve::straight(SurfacePoint::new(0.1, 0.2), 0.0, 0.999).unwrap();
        assert!((c.point(0.0).u - 0.1).abs() < 1e-15);
        assert!((c.point(1.0).u - (0.1_f64 + 0.999).rem_euclid(1.0)).abs() < 1e-12);
        assert!((c.speed(0.37) - 0.999).abs() < 1e-12);
        assert!((c.length(256) - 0.999).abs() < 1e-9);
        assert_eq!(c.direction(0.5), 0.0);
    }

    #[test]
    fn degenerate_and_self_crossing_curves_are_rejected() {
        // Zero velocity at s = 0.5: u(s) = (s - 1/2)^2.
        let r = RegularCurve::new(vec![0.25, -1.0, 1.0], vec![0.0, 0.0, 0.0]);
        assert!(matches!(r, Err(LabError::RegularityViolation { .. })));
        // Full-period horizontal line closes up on the torus.
        let r = RegularCurve::new(vec![0.0, 2.0], vec![0.5]);
        // Constant v polynomial gives zero v-velocity but speed 2 is fine;
        // the closure point u(0) = u(1/2) mod 1 must be flagged.
        assert!(matches!(r, Err(LabError::SelfIntersection { .. })));
    }

    #[test]
    fn scaled_jets_recentre_polynomials_exactly() {
        // u(s) = 1 + 2s + 3s^2, recentered at s = 0.4, scale 0.1.
        let c = RegularCurve {
            u_coeffs: vec![1.0, 2.0, 3.0],
            v_coeffs: vec![0.0, 1.0, 0.0, 0.5],
        };
        let jet = c.scaled_jet(0.4, 0.1, 4);
        // u(0.4 + 0.1 h) = (1 + 0.8 + 0.48) + (2 + 2.4) 0.1 h + 3 (0.1 h)^2.
        assert!((jet.u.c[0] - 2.28).abs() < 1e-14);
        assert!((jet.u.c[1] - 0.44).abs() < 1e-14);
        assert!((jet.u.c[2] - 0.03).abs() < 1e-14);
        assert!(jet.u.c[3].abs() < 1e-15);
        // v(s) = s + 0.5 s^3 at 0.4: v = 0.432, v' = 1 + 1.5 * 0.16 = 1.24.
        assert!((jet.v.c[0] - 0.432).abs() < 1e-14);
        assert!((jet.v.c[1] - 0.124).abs() < 1e-14);
        assert!((jet.v.c[2] - 0.5 * 3.0 * 0.4 * 0.01).abs() < 1e-14);
        assert!((jet.v.c[3] - 0.5 * 0.001).abs() < 1e-14);
    }

    #[test]
    fn cr_size_of_straight_and_bent_curves() {
        let line = RegularCurve::straight(SurfacePoint::new(0.2, 0.3), 0.7, 0.9).unwrap();
        let size = cr_size(&line, 6, 64).unwrap();
        assert!((size.eps - 0.9).abs() < 1e-12, "only order 1 contributes");
        assert!(size.eps_hat.abs() < 1e-12, "straight line has flat direction");
        // Gentle parabola: direction varies.
        let bent = RegularCurve::new(vec![0.1, 0.8], vec![0.3, 0.0, 0.2]).unwrap();
        let size = cr_size(&bent, 4, 128).unwrap();
        assert!(size.eps_hat > 0.1);
        assert!(cr_size(&bent, 1, 16).is_err(), "order below 2 unavailable");
        assert!(cr_size(&bent, 99, 16).is_err());
    }

    #[test]
    fn lift_produces_a_continuous_branch() {
        // Quarter-turn arc approximated by a cubic; direction moves.
        let c = RegularCurve::new(vec![0.2, 0.5, -0.25], vec![0.3, 0.1, 0.25]).unwrap();
        let lifted = lift(&c, 256).unwrap();
        assert_eq!(lifted.points.len(), 257);
        for w in lifted.theta_branch.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.1, "branch jumps: {} -> {}", w[0], w[1]);
        }
        // Each branch value projects back to the stored direction.
        for (b, xi) in lifted.theta_branch.iter().zip(&lifted.points) {
            assert!(
                (crate::dynamics::normalize_angle(*b) - xi.dir.theta).abs() < 1e-12
            );
        }
    }

    #[test]
    fn transverse_selection_prefers_expanding_directions() {
        let map = SurfaceMap::cat();
        let (curve, report, table) = select_transverse_curve(&map, 16, 12).unwrap();
        assert_eq!(table.len(), 64);
        // The linear model expands every direction off the stable line;
        // the winner must see expansion at every sample.
        assert!((report.expanding_fraction - 1.0).abs() < 1e-15);
        // Winner's tangent exponent over a horizon approaches the rate.
        let xi = curve.bundle_point(0.5);
        let avg = crate::orbit::PhiSequence::along_orbit(&map, xi, 40).average();
        assert!(avg > 0.5 * cat_expansion_rate());
    }

    #[test]
    fn identity_sees_no_expansion_anywhere() {
        let map = SurfaceMap::identity();
        let (_, report, _) = select_transverse_curve(&map, 8, 6).unwrap();
        assert_eq!(report.expanding_fraction, 0.0);
    }
}
