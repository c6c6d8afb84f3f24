//! Empirical measures on the projective bundle and the checks that turn
//! orbit statistics into measure statements.
//!
//! Everything is atomic: a measure is a finite list of weighted bundle
//! points. Orbit averages become measures via `EmpiricalMeasure::from_orbit`,
//! splitting an orbit along neutral segments becomes a measure decomposition
//! (`decompose`), and weak-star geometry is delegated to a fixed test
//! dictionary (`dictionary`).

pub mod cluster;
pub mod decompose;
pub mod dictionary;
pub mod periodic;

use crate::dynamics::{
    cat_expansion_rate, torus_dist, ProjectivePoint, SurfaceMap, SurfacePoint,
};
use crate::error::{LabError, Result};
use periodic::{PeriodicKind, PeriodicScan};
use serde::{Deserialize, Serialize};

/// Weighted atom on the projective bundle.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Atom {
    pub xi: ProjectivePoint,
    pub weight: f64,
}

/// Finite atomic measure on the bundle. Mass is the weight sum; nothing
/// here assumes probability normalization.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Atom>,
}

impl EmpiricalMeasure {
    pub fn empty() -> Self {
        EmpiricalMeasure { atoms: Vec::new() }
    }

    /// Orbit average (1/n) sum of point masses along the bundle orbit.
    pub fn from_orbit(map: &SurfaceMap, xi0: ProjectivePoint, n: usize) -> Self {
        assert!(n > 0);
        let w = 1.0 / n as f64;
        let atoms = map
            .projective_orbit(xi0, n)
            .into_iter()
            .map(|xi| Atom { xi, weight: w })
            .collect();
        EmpiricalMeasure { atoms }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn integrate(&self, f: impl Fn(ProjectivePoint) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(a.xi)).sum()
    }

    /// Integral of the expansion observable.
    pub fn phi_integral(&self, map: &SurfaceMap) -> f64 {
        self.integrate(|xi| map.phi(xi))
    }

    /// Rescale to unit mass. Errors on (numerically) zero mass.
    pub fn normalized(&self) -> Result<EmpiricalMeasure> {
        let m = self.mass();
        if m <= 1e-300 {
            return Err(LabError::HypothesisViolation(
                "cannot normalize a measure with zero mass".into(),
            ));
        }
        Ok(self.scaled(1.0 / m))
    }

    pub fn scaled(&self, k: f64) -> EmpiricalMeasure {
        EmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { xi: a.xi, weight: a.weight * k })
                .collect(),
        }
    }

    /// Image measure under the bundle map (weights carried along).
    pub fn pushforward(&self, map: &SurfaceMap) -> EmpiricalMeasure {
        EmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { xi: map.projective_apply(a.xi), weight: a.weight })
                .collect(),
        }
    }

    /// Forget the fiber: the base marginal.
    pub fn base_marginal(&self) -> BaseEmpiricalMeasure {
        BaseEmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| BaseAtom { x: a.xi.point, weight: a.weight })
                .collect(),
        }
    }
}

/// Weighted atom on the surface.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BaseAtom {
    pub x: SurfacePoint,
    pub weight: f64,
}

/// Finite atomic measure on the surface.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BaseEmpiricalMeasure {
    pub atoms: Vec<BaseAtom>,
}

impl BaseEmpiricalMeasure {
    pub fn from_orbit(map: &SurfaceMap, x0: SurfacePoint, n: usize) -> Self {
        assert!(n > 0);
        let w = 1.0 / n as f64;
        let atoms = map
            .orbit(x0, n)
            .into_iter()
            .map(|x| BaseAtom { x, weight: w })
            .collect();
        BaseEmpiricalMeasure { atoms }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn integrate(&self, f: impl Fn(SurfacePoint) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(a.x)).sum()
    }

    pub fn pushforward(&self, map: &SurfaceMap) -> BaseEmpiricalMeasure {
        BaseEmpiricalMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| BaseAtom { x: map.apply(a.x), weight: a.weight })
                .collect(),
        }
    }
}

/// Exponent functional of a candidate limit measure: the phi integral,
/// guarded against the two degeneracies that invalidate it as a growth
/// rate. Errors if the integral is nonpositive, or if the measure charges
/// a neighborhood of a repelling periodic point (where tangent growth does
/// not reflect attractor statistics).
pub fn lyapunov_of_measure(
    map: &SurfaceMap,
    mu_hat: &EmpiricalMeasure,
    scan: &PeriodicScan,
) -> Result<f64> {
    let integral = mu_hat.phi_integral(map);
    if integral <= 0.0 {
        return Err(LabError::HypothesisViolation(format!(
            "phi integral {integral} is nonpositive; no expansion to certify"
        )));
    }
    let radius = 1e-3;
    for orbit in &scan.orbits {
        if orbit.kind != PeriodicKind::Repelling {
            continue;
        }
        for p in &orbit.points {
            let charged: f64 = mu_hat
                .atoms
                .iter()
                .filter(|a| torus_dist(a.xi.point, *p) < radius)
                .map(|a| a.weight)
                .sum();
            if charged > 0.0 {
                return Err(LabError::HypothesisViolation(format!(
                    "measure charges mass {charged:.3e} within {radius} of a \
                     repelling periodic point ({:.4}, {:.4}) of period {}",
                    p.u, p.v, orbit.period
                )));
            }
        }
    }
    Ok(integral)
}

/// Known metric entropies of the built-in models, where a closed form
/// exists. `None` means the lab must fall back to counting-based proxies.
pub fn entropy_reference(map: &SurfaceMap) -> Option<f64> {
    match map {
        SurfaceMap::Identity => Some(0.0),
        SurfaceMap::Cat => Some(cat_expansion_rate()),
        _ => None,
    }
}
