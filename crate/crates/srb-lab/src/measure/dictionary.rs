//! Fixed dictionary of test functions metrizing weak-star convergence on
//! the bundle chart.
//!
//! Base factors are the torus Fourier modes cos/sin(2 pi (a u + b v)) with
//! |a|, |b| <= 3 over a canonical half-lattice (plus the constant); fiber
//! factors are 1, cos/sin of 2 theta and 4 theta, which are well defined on
//! directions because theta and theta + pi agree. 49 x 5 = 245 products,
//! ordered by total frequency and weighted 2^-j, so distances are dominated
//! by low-frequency agreement exactly as a weak-star metric should be.

use crate::dynamics::ProjectivePoint;
use crate::error::{LabError, Result};
use crate::measure::EmpiricalMeasure;
use serde::{Deserialize, Serialize};

const MAX_BASE_FREQ: i32 = 3;
const VERSION: &str = "trig/A=3,C=2/v1";
const TAU: f64 = std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BaseKind {
    Const,
    Cos,
    Sin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FiberKind {
    Const,
    Cos2,
    Sin2,
    Cos4,
    Sin4,
}

impl FiberKind {
    fn order(self) -> i32 {
        match self {
            FiberKind::Const => 0,
            FiberKind::Cos2 | FiberKind::Sin2 => 1,
            FiberKind::Cos4 | FiberKind::Sin4 => 2,
        }
    }

    fn rank(self) -> i32 {
        match self {
            FiberKind::Const => 0,
            FiberKind::Cos2 => 1,
            FiberKind::Sin2 => 2,
            FiberKind::Cos4 => 3,
            FiberKind::Sin4 => 4,
        }
    }

    fn eval(self, theta: f64) -> f64 {
        match self {
            FiberKind::Const => 1.0,
            FiberKind::Cos2 => (2.0 * theta).cos(),
            FiberKind::Sin2 => (2.0 * theta).sin(),
            FiberKind::Cos4 => (4.0 * theta).cos(),
            FiberKind::Sin4 => (4.0 * theta).sin(),
        }
    }
}

/// One product test function base(u, v) * fiber(theta).
#[derive(Clone, Copy, Debug)]
pub struct TestFunction {
    base: BaseKind,
    a: i32,
    b: i32,
    fiber: FiberKind,
}

impl TestFunction {
    pub fn eval(&self, xi: ProjectivePoint) -> f64 {
        let base = match self.base {
            BaseKind::Const => 1.0,
            BaseKind::Cos => {
                (TAU * (self.a as f64 * xi.point.u + self.b as f64 * xi.point.v)).cos()
            }
            BaseKind::Sin => {
                (TAU * (self.a as f64 * xi.point.u + self.b as f64 * xi.point.v)).sin()
            }
        };
        base * self.fiber.eval(xi.dir.theta)
    }

    /// Lipschitz constant bound in the product chart metric.
    pub fn lipschitz_bound(&self) -> f64 {
        let grad_base = match self.base {
            BaseKind::Const => 0.0,
            _ => TAU * (self.a as f64).hypot(self.b as f64),
        };
        grad_base + 2.0 * self.fiber.order() as f64
    }

    fn sort_key(&self) -> (i32, i32, i32, i32, i32, i32, i32) {
        let fb = self.a.abs() + self.b.abs();
        let c = self.fiber.order();
        let base_rank = match self.base {
            BaseKind::Const => 0,
            BaseKind::Cos => 1,
            BaseKind::Sin => 2,
        };
        (fb + c, fb, c, self.a, self.b, base_rank, self.fiber.rank())
    }
}

/// The full ordered dictionary with its geometric weights.
#[derive(Clone, Debug)]
pub struct TestDictionary {
    pub functions: Vec<TestFunction>,
    pub weights: Vec<f64>,
}

impl Default for TestDictionary {
    fn default() -> Self {
        TestDictionary::new()
    }
}

impl TestDictionary {
    pub fn new() -> Self {
        let mut functions = vec![TestFunction {
            base: BaseKind::Const,
            a: 0,
            b: 0,
            fiber: FiberKind::Const,
        }];
        // Canonical half-lattice: one representative per +-(a, b) pair.
        let mut pairs = Vec::new();
        for a in -MAX_BASE_FREQ..=MAX_BASE_FREQ {
            for b in -MAX_BASE_FREQ..=MAX_BASE_FREQ {
                if a > 0 || (a == 0 && b > 0) {
                    pairs.push((a, b));
                }
            }
        }
        for &(a, b) in &pairs {
            for base in [BaseKind::Cos, BaseKind::Sin] {
                functions.push(TestFunction { base, a, b, fiber: FiberKind::Const });
            }
        }
        // Fiber-dependent products, constant base included.
        let mut with_fiber = Vec::new();
        for f in [FiberKind::Cos2, FiberKind::Sin2, FiberKind::Cos4, FiberKind::Sin4] {
            with_fiber.push(TestFunction { base: BaseKind::Const, a: 0, b: 0, fiber: f });
            for &(a, b) in &pairs {
                for base in [BaseKind::Cos, BaseKind::Sin] {
                    with_fiber.push(TestFunction { base, a, b, fiber: f });
                }
            }
        }
        functions.extend(with_fiber);
        functions.sort_by_key(TestFunction::sort_key);
        let weights = (0..functions.len()).map(|j| 0.5_f64.powi(j as i32)).collect();
        TestDictionary { functions, weights }
    }

    /// Stable identifier of the function list; coordinates from different
    /// versions never compare.
    pub fn version(&self) -> &'static str {
        VERSION
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Integrals of every test function against the measure.
    pub fn coordinates(&self, mu: &EmpiricalMeasure) -> DictionaryCoordinates {
        let values = self
            .functions
            .iter()
            .map(|f| mu.integrate(|xi| f.eval(xi)))
            .collect();
        DictionaryCoordinates { version: VERSION.to_string(), values }
    }

    /// Weighted l1 distance between coordinate vectors: the weak-star
    /// metric induced by the dictionary.
    pub fn distance(
        &self,
        a: &DictionaryCoordinates,
        b: &DictionaryCoordinates,
    ) -> Result<f64> {
        for c in [a, b] {
            if c.version != VERSION {
                return Err(LabError::DictionaryMismatch {
                    expected: VERSION.to_string(),
                    found: c.version.clone(),
                });
            }
            if c.values.len() != self.functions.len() {
                return Err(LabError::DictionaryMismatch {
                    expected: format!("{} coordinates", self.functions.len()),
                    found: format!("{} coordinates", c.values.len()),
                });
            }
        }
        Ok(self
            .weights
            .iter()
            .zip(a.values.iter().zip(&b.values))
            .map(|(w, (x, y))| w * (x - y).abs())
            .sum())
    }

    /// Distance computed directly from two measures.
    pub fn weak_star_distance(
        &self,
        mu: &EmpiricalMeasure,
        nu: &EmpiricalMeasure,
    ) -> f64 {
        self.distance(&self.coordinates(mu), &self.coordinates(nu))
            .expect("own coordinates always match the dictionary version")
    }
}

/// Coordinate vector of a measure against a tagged dictionary version.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DictionaryCoordinates {
    pub version: String,
    pub values: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn point_mass(u: f64, v: f64, theta: f64) -> EmpiricalMeasure {
        EmpiricalMeasure {
            atoms: vec![Atom { xi: ProjectivePoint::new(u, v, theta), weight: 1.0 }],
        }
    }

    #[test]
    fn dictionary_has_245_functions_and_leads_with_mass() {
        let dict = TestDictionary::new();
        assert_eq!(dict.len(), 245);
        // First function is the constant: its coordinate is the mass.
        let mu = point_mass(0.3, 0.8, 1.1).scaled(0.7);
        let coords = dict.coordinates(&mu);
        assert!((coords.values[0] - 0.7).abs() < 1e-15);
        assert_eq!(coords.values.len(), 245);
        assert_eq!(coords.version, dict.version());
        // Geometric weights, total below 2.
        assert_eq!(dict.weights[0], 1.0);
        assert_eq!(dict.weights[1], 0.5);
        // Geometric tail sums to 2 exactly at f64 resolution.
        let total: f64 = dict.weights.iter().sum();
        assert!(total <= 2.0 && total > 2.0 - 1e-12);
    }

    #[test]
    fn coordinates_of_a_point_mass_are_function_values() {
        let dict = TestDictionary::new();
        let xi = ProjectivePoint::new(0.27, 0.61, 0.9);
        let coords = dict.coordinates(&point_mass(0.27, 0.61, 0.9));
        for (f, c) in dict.functions.iter().zip(&coords.values) {
            assert!((f.eval(xi) - c).abs() < 1e-15);
        }
    }

    #[test]
    fn fiber_factors_are_projectively_well_defined() {
        let dict = TestDictionary::new();
        let a = ProjectivePoint::new(0.4, 0.5, 0.3);
        let b = ProjectivePoint::new(0.4, 0.5, 0.3 + std::f64::consts::PI);
        for f in &dict.functions {
            assert!((f.eval(a) - f.eval(b)).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_is_a_metric_on_samples() {
        let dict = TestDictionary::new();
        let mu = point_mass(0.1, 0.2, 0.3);
        let nu = point_mass(0.8, 0.9, 1.5);
        let rho = point_mass(0.4, 0.6, 2.2);
        let d_mn = dict.weak_star_distance(&mu, &nu);
        let d_nm = dict.weak_star_distance(&nu, &mu);
        assert!((d_mn - d_nm).abs() < 1e-15);
        assert!(d_mn > 0.0);
        assert_eq!(dict.weak_star_distance(&mu, &mu), 0.0);
        let d_mr = dict.weak_star_distance(&mu, &rho);
        let d_rn = dict.weak_star_distance(&rho, &nu);
        assert!(d_mn <= d_mr + d_rn + 1e-15);
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let dict = TestDictionary::new();
        let good = dict.coordinates(&point_mass(0.1, 0.1, 0.1));
        let stale = DictionaryCoordinates {
            version: "trig/A=2,C=1/v0".into(),
            values: good.values.clone(),
        };
        match dict.distance(&good, &stale) {
            Err(crate::error::LabError::DictionaryMismatch { expected, found }) => {
                assert_eq!(expected, dict.version());
                assert_eq!(found, "trig/A=2,C=1/v0");
            }
            other => panic!("expected mismatch error, got {other:?}"),
        }
        let truncated = DictionaryCoordinates {
            version: dict.version().to_string(),
            values: good.values[..10].to_vec(),
        };
        assert!(dict.distance(&good, &truncated).is_err());
    }

    #[test]
    fn lipschitz_bounds_dominate_sampled_increments() {
        let dict = TestDictionary::new();
        let xi = ProjectivePoint::new(0.21, 0.43, 0.7);
        let eta = ProjectivePoint::new(0.22, 0.44, 0.72);
        let d = crate::dynamics::bundle_dist(xi, eta);
        for f in &dict.functions {
            let inc = (f.eval(xi) - f.eval(eta)).abs();
            assert!(inc <= f.lipschitz_bound() * d * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn nearby_orbit_measures_are_close_in_weak_star_distance() {
        let map = crate::dynamics::SurfaceMap::standard(0.7).unwrap();
        let dict = TestDictionary::new();
        let p = EmpiricalMeasure::from_orbit(&map, ProjectivePoint::new(0.3, 0.4, 1.0), 32);
        let q = EmpiricalMeasure::from_orbit(
            &map,
            ProjectivePoint::new(0.3 + 1e-12, 0.4, 1.0),
            32,
        );
        assert!(dict.weak_star_distance(&p, &q) < 1e-6);
    }
}
