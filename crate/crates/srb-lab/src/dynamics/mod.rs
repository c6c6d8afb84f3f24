//! Surface dynamics on the flat torus T^2 = (R/Z)^2 and its projective
//! tangent bundle.
//!
//! Points carry chart coordinates (u, v) in [0,1); tangent lines carry an
//! angle theta in [0, pi). The bundle map sends (x, E) to (f(x), Df_x E) and
//! the expansion observable is phi(x, E) = log |Df_x restricted to E|.
//! Every built-in model has closed-form derivatives to all orders, so jets
//! are exact up to rounding.

pub mod series;

use crate::error::{LabError, Result};
use crate::linalg::{mat3_frobenius, mat3_mul, norm3, Mat2};
use serde::{Deserialize, Serialize};
use series::{CurveJet, TAU};

/// Highest jet order the lab hands out. Far above any sensible smoothness
/// parameter; keeps factorial scaling inside f64.
pub const MAX_JET_ORDER: usize = 16;

/// Point on the flat torus, coordinates reduced to [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub u: f64,
    pub v: f64,
}

impl SurfacePoint {
    pub fn new(u: f64, v: f64) -> Self {
        SurfacePoint { u: u.rem_euclid(1.0), v: v.rem_euclid(1.0) }
    }
}

/// Tangent line through the origin of a tangent plane: angle in [0, pi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentDirection {
    pub theta: f64,
}

impl TangentDirection {
    pub fn new(theta: f64) -> Self {
        TangentDirection { theta: normalize_angle(theta) }
    }

    /// Unit vector spanning the line.
    pub fn unit(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [c, s]
    }

    pub fn from_vector(w: [f64; 2]) -> Self {
        TangentDirection::new(w[1].atan2(w[0]))
    }
}

/// Point of the projective tangent bundle in the product chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub point: SurfacePoint,
    pub dir: TangentDirection,
}

impl ProjectivePoint {
    pub fn new(u: f64, v: f64, theta: f64) -> Self {
        ProjectivePoint { point: SurfacePoint::new(u, v), dir: TangentDirection::new(theta) }
    }
}

/// Reduce an angle to the projective fundamental domain [0, pi).
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::PI);
    // rem_euclid can return the modulus itself when the input sits on it.
    if t >= std::f64::consts::PI {
        0.0
    } else {
        t
    }
}

/// Distance between circle coordinates (period 1).
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Flat distance on the torus.
pub fn torus_dist(p: SurfacePoint, q: SurfacePoint) -> f64 {
    circle_dist(p.u, q.u).hypot(circle_dist(p.v, q.v))
}

/// Distance between projective directions (period pi).
pub fn direction_dist(a: TangentDirection, b: TangentDirection) -> f64 {
    let d = (a.theta - b.theta).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Product metric on the bundle chart.
pub fn bundle_dist(a: ProjectivePoint, b: ProjectivePoint) -> f64 {
    torus_dist(a.point, b.point).hypot(direction_dist(a.dir, b.dir))
}

/// log of the cat-map expansion factor (3 + sqrt 5)/2, the golden ratio
/// squared. Doubles as the metric entropy of that model.
pub fn cat_expansion_rate() -> f64 {
    ((3.0 + 5.0_f64.sqrt()) / 2.0).ln()
}

/// Largest perturbation of the linear toral map that keeps the perturbed
/// model injective: 1 / (|A^-1| * Lip of the sine term).
pub fn perturbed_cat_injectivity_threshold() -> f64 {
    (3.0 - 5.0_f64.sqrt()) / 2.0
}

const PERTURBED_CAT_DELTA_CAP: f64 = 0.05;
const MORSE_SMALE_AMP_CAP: f64 = 0.15;

/// Built-in torus diffeomorphisms. All derivative data is closed form; the
/// `jet`/`push_curve_jet` oracles are exact to rounding at every order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceMap {
    /// Every point fixed. The degenerate control model.
    Identity,
    /// Linear hyperbolic automorphism with matrix [[2,1],[1,1]].
    Cat,
    /// Cat map plus delta * (sin 2pi v, sin 2pi u) / 2pi, delta < 0.05.
    PerturbedCat { delta: f64 },
    /// Chirikov twist: (u, v) -> (u + v + K sin(2pi u)/2pi, v + K sin(2pi u)/2pi).
    Standard { kick: f64 },
    /// Gradient-like product of circle maps u -> u + a sin(2pi u); has a
    /// source at (0,0) and a sink at (1/2,1/2). Zero-entropy test model.
    MorseSmale { amp: f64 },
}

impl SurfaceMap {
    pub fn identity() -> Self {
        SurfaceMap::Identity
    }

    pub fn cat() -> Self {
        SurfaceMap::Cat
    }

    pub fn perturbed_cat(delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 || delta >= PERTURBED_CAT_DELTA_CAP {
            return Err(LabError::ModelMisconfigured(format!(
                "perturbation delta = {delta} outside [0, {PERTURBED_CAT_DELTA_CAP}); \
                 analytic injectivity threshold is {:.4}",
                perturbed_cat_injectivity_threshold()
            )));
        }
        Ok(SurfaceMap::PerturbedCat { delta })
    }

    pub fn standard(kick: f64) -> Result<Self> {
        if !kick.is_finite() || kick.abs() > 64.0 {
            return Err(LabError::ModelMisconfigured(format!(
                "kick strength K = {kick} not finite or absurdly large"
            )));
        }
        Ok(SurfaceMap::Standard { kick })
    }

    pub fn morse_smale(amp: f64) -> Result<Self> {
        if !amp.is_finite() || amp < 0.0 || amp > MORSE_SMALE_AMP_CAP {
            return Err(LabError::ModelMisconfigured(format!(
                "amplitude a = {amp} outside [0, {MORSE_SMALE_AMP_CAP}]; \
                 circle factors need 2 pi a < 1"
            )));
        }
        Ok(SurfaceMap::MorseSmale { amp })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceMap::Identity => "identity",
            SurfaceMap::Cat => "cat",
            SurfaceMap::PerturbedCat { .. } => "perturbed_cat",
            SurfaceMap::Standard { .. } => "standard",
            SurfaceMap::MorseSmale { .. } => "morse_smale",
        }
    }

    /// Highest derivative order served by the oracles.
    pub fn max_order(&self) -> usize {
        MAX_JET_ORDER
    }

    pub fn apply(&self, x: SurfacePoint) -> SurfacePoint {
        let (u, v) = (x.u, x.v);
        match *self {
            SurfaceMap::Identity => x,
            SurfaceMap::Cat => SurfacePoint::new(2.0 * u + v, u + v),
            SurfaceMap::PerturbedCat { delta } => SurfacePoint::new(
                2.0 * u + v + delta * (TAU * v).sin() / TAU,
                u + v + delta * (TAU * u).sin() / TAU,
            ),
            SurfaceMap::Standard { kick } => {
                let vp = v + kick * (TAU * u).sin() / TAU;
                SurfacePoint::new(u + vp, vp)
            }
            SurfaceMap::MorseSmale { amp } => {
                SurfacePoint::new(u + amp * (TAU * u).sin(), v + amp * (TAU * v).sin())
            }
        }
    }

    /// Inverse map. Closed form where one exists; the perturbed model and
    /// the circle factors invert by Newton from the linear-part guess, well
    /// inside their contraction regimes at the validated parameter caps.
    pub fn inverse_apply(&self, x: SurfacePoint) -> SurfacePoint {
        match *self {
            SurfaceMap::Identity => x,
            SurfaceMap::Cat => SurfacePoint::new(x.u - x.v, -x.u + 2.0 * x.v),
            SurfaceMap::PerturbedCat { .. } => {
                // Solve f(y) = x with torus-nearest residuals.
                let mut y = SurfacePoint::new(x.u - x.v, -x.u + 2.0 * x.v);
                for _ in 0..50 {
                    let fy = self.apply(y);
                    let r = [nearest_rep(fy.u - x.u), nearest_rep(fy.v - x.v)];
                    if r[0].hypot(r[1]) < 1e-14 {
                        break;
                    }
                    let step = self
                        .differential(y)
                        .inverse()
                        .expect("validated model has invertible differential")
                        .mul_vec(r);
                    y = SurfacePoint::new(y.u - step[0], y.v - step[1]);
                }
                y
            }
            SurfaceMap::Standard { kick } => {
                let u = x.u - x.v;
                SurfacePoint::new(u, x.v - kick * (TAU * u).sin() / TAU)
            }
            SurfaceMap::MorseSmale { amp } => {
                SurfacePoint::new(invert_circle_factor(amp, x.u), invert_circle_factor(amp, x.v))
            }
        }
    }

    /// Jacobian in the flat chart. Total on validated models: determinants
    /// are bounded away from zero by the parameter caps.
    pub fn differential(&self, x: SurfacePoint) -> Mat2 {
        match *self {
            SurfaceMap::Identity => Mat2::IDENTITY,
            SurfaceMap::Cat => Mat2::new(2.0, 1.0, 1.0, 1.0),
            SurfaceMap::PerturbedCat { delta } => Mat2::new(
                2.0,
                1.0 + delta * (TAU * x.v).cos(),
                1.0 + delta * (TAU * x.u).cos(),
                1.0,
            ),
            SurfaceMap::Standard { kick } => {
                let kc = kick * (TAU * x.u).cos();
                Mat2::new(1.0 + kc, 1.0, kc, 1.0)
            }
            SurfaceMap::MorseSmale { amp } => Mat2::new(
                1.0 + amp * TAU * (TAU * x.u).cos(),
                0.0,
                0.0,
                1.0 + amp * TAU * (TAU * x.v).cos(),
            ),
        }
    }

    /// Partial-derivative tensors of orders 1..=order at x.
    /// `Jet::tensor(k)[i][j]` holds d^k f_i / du^{k-j} dv^j.
    pub fn jet(&self, x: SurfacePoint, order: usize) -> Jet {
        let mut tensors = Vec::with_capacity(order);
        for k in 1..=order {
            let mut t = [vec![0.0; k + 1], vec![0.0; k + 1]];
            match *self {
                SurfaceMap::Identity => {
                    if k == 1 {
                        t[0][0] = 1.0; // du/du
                        t[1][1] = 1.0; // dv/dv
                    }
                }
                SurfaceMap::Cat => {
                    if k == 1 {
                        t[0][0] = 2.0;
                        t[0][1] = 1.0;
                        t[1][0] = 1.0;
                        t[1][1] = 1.0;
                    }
                }
                SurfaceMap::PerturbedCat { delta } => {
                    if k == 1 {
                        t[0][0] = 2.0;
                        t[0][1] = 1.0 + delta * (TAU * x.v).cos();
                        t[1][0] = 1.0 + delta * (TAU * x.u).cos();
                        t[1][1] = 1.0;
                    } else {
                        // Pure-v derivative of f1, pure-u derivative of f2.
                        t[0][k] = delta * sin_deriv(TAU * x.v, k) / TAU;
                        t[1][0] = delta * sin_deriv(TAU * x.u, k) / TAU;
                    }
                }
                SurfaceMap::Standard { kick } => {
                    if k == 1 {
                        let kc = kick * (TAU * x.u).cos();
                        t[0][0] = 1.0 + kc;
                        t[0][1] = 1.0;
                        t[1][0] = kc;
                        t[1][1] = 1.0;
                    } else {
                        let d = kick * sin_deriv(TAU * x.u, k) / TAU;
                        t[0][0] = d;
                        t[1][0] = d;
                    }
                }
                SurfaceMap::MorseSmale { amp } => {
                    if k == 1 {
                        t[0][0] = 1.0 + amp * TAU * (TAU * x.u).cos();
                        t[1][1] = 1.0 + amp * TAU * (TAU * x.v).cos();
                    } else {
                        t[0][0] = amp * sin_deriv(TAU * x.u, k);
                        t[1][k] = amp * sin_deriv(TAU * x.v, k);
                    }
                }
            }
            tensors.push(t);
        }
        Jet { point: x, tensors }
    }

    /// Push a curve germ through the map: exact composition of the model's
    /// Taylor expansion with the germ, truncated at the germ's order. The
    /// output base point is reduced mod 1.
    pub fn push_curve_jet(&self, jet: &CurveJet) -> CurveJet {
        let out = match *self {
            SurfaceMap::Identity => jet.clone(),
            SurfaceMap::Cat => CurveJet {
                u: jet.u.scale(2.0).add(&jet.v),
                v: jet.u.add(&jet.v),
            },
            SurfaceMap::PerturbedCat { delta } => {
                let (su, _) = jet.u.scale(TAU).sin_cos();
                let (sv, _) = jet.v.scale(TAU).sin_cos();
                CurveJet {
                    u: jet.u.scale(2.0).add(&jet.v).add(&sv.scale(delta / TAU)),
                    v: jet.u.add(&jet.v).add(&su.scale(delta / TAU)),
                }
            }
            SurfaceMap::Standard { kick } => {
                let (su, _) = jet.u.scale(TAU).sin_cos();
                let vp = jet.v.add(&su.scale(kick / TAU));
                CurveJet { u: jet.u.add(&vp), v: vp }
            }
            SurfaceMap::MorseSmale { amp } => {
                let (su, _) = jet.u.scale(TAU).sin_cos();
                let (sv, _) = jet.v.scale(TAU).sin_cos();
                CurveJet {
                    u: jet.u.add(&su.scale(amp)),
                    v: jet.v.add(&sv.scale(amp)),
                }
            }
        };
        let mut out = out;
        out.reduce_base();
        out
    }

    /// Induced map on the projective bundle.
    pub fn projective_apply(&self, xi: ProjectivePoint) -> ProjectivePoint {
        let w = self.differential(xi.point).mul_vec(xi.dir.unit());
        ProjectivePoint {
            point: self.apply(xi.point),
            dir: TangentDirection::from_vector(w),
        }
    }

    /// Expansion observable phi(x, E) = log |Df_x e_E|.
    pub fn phi(&self, xi: ProjectivePoint) -> f64 {
        let w = self.differential(xi.point).mul_vec(xi.dir.unit());
        w[0].hypot(w[1]).ln()
    }

    /// (1/n) log |Df^n(x)| via scalar-renormalized cocycle products: every
    /// 16 steps the running matrix is divided by its Frobenius norm and the
    /// log factor banked, which keeps the product inside f64 at any n.
    pub fn upper_lyapunov(&self, x: SurfacePoint, n: usize) -> f64 {
        assert!(n > 0, "needs at least one step");
        let mut point = x;
        let mut prod = Mat2::IDENTITY;
        let mut banked = 0.0;
        for step in 0..n {
            prod = self.differential(point).mul(&prod);
            point = self.apply(point);
            if step % 16 == 15 {
                let f = prod.frobenius();
                banked += f.ln();
                prod = prod.scale(1.0 / f);
            }
        }
        (banked + prod.op_norm().ln()) / n as f64
    }

    /// Differential of the bundle map in chart coordinates (u, v, theta).
    /// The fiber row is d theta' = [det(w, H_u e)/|w|^2, det(w, H_v e)/|w|^2,
    /// det Df/|w|^2] with w = Df e and H_q the partial of Df along q.
    pub fn projective_differential(&self, xi: ProjectivePoint) -> [[f64; 3]; 3] {
        let jet = self.jet(xi.point, 2);
        let df = self.differential(xi.point);
        let e = xi.dir.unit();
        let w = df.mul_vec(e);
        let w2 = w[0] * w[0] + w[1] * w[1];
        let t2 = jet.tensor(2);
        // Partial of Df along u applied to e: rows [f1_uu, f1_uv; f2_uu, f2_uv].
        let hu = [
            t2[0][0] * e[0] + t2[0][1] * e[1],
            t2[1][0] * e[0] + t2[1][1] * e[1],
        ];
        // Partial along v: rows [f1_uv, f1_vv; f2_uv, f2_vv].
        let hv = [
            t2[0][1] * e[0] + t2[0][2] * e[1],
            t2[1][1] * e[0] + t2[1][2] * e[1],
        ];
        [
            [df.m[0][0], df.m[0][1], 0.0],
            [df.m[1][0], df.m[1][1], 0.0],
            [
                (w[0] * hu[1] - w[1] * hu[0]) / w2,
                (w[0] * hv[1] - w[1] * hv[0]) / w2,
                df.det() / w2,
            ],
        ]
    }

    /// Finite-n upper estimate of the asymptotic dilation of the bundle map:
    /// max over a chart grid of (1/n) log |D(f-hat)^n|, products renormalized
    /// every 16 steps. Grid axes are (u, v, theta) counts.
    pub fn asymptotic_dilation(&self, n: usize, grid: (usize, usize, usize)) -> f64 {
        assert!(n > 0 && grid.0 > 0 && grid.1 > 0 && grid.2 > 0);
        use rayon::prelude::*;
        let (gu, gv, gt) = grid;
        let logs: Vec<f64> = (0..gu * gv * gt)
            .into_par_iter()
            .map(|idx| {
                let i = idx / (gv * gt);
                let j = (idx / gt) % gv;
                let k = idx % gt;
                let mut xi = ProjectivePoint::new(
                    (i as f64 + 0.5) / gu as f64,
                    (j as f64 + 0.5) / gv as f64,
                    (k as f64 + 0.5) * std::f64::consts::PI / gt as f64,
                );
                let mut prod = [[0.0; 3]; 3];
                for (r, row) in prod.iter_mut().enumerate() {
                    row[r] = 1.0;
                }
                let mut banked = 0.0;
                for step in 0..n {
                    prod = mat3_mul(&self.projective_differential(xi), &prod);
                    xi = self.projective_apply(xi);
                    if step % 16 == 15 {
                        let f = mat3_frobenius(&prod);
                        banked += f.ln();
                        for row in prod.iter_mut() {
                            for x in row.iter_mut() {
                                *x /= f;
                            }
                        }
                    }
                }
                (banked + norm3(&prod).ln()) / n as f64
            })
            .collect();
        logs.into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid estimate of sup |phi| over the bundle.
    pub fn phi_sup_estimate(&self, grid: (usize, usize, usize)) -> f64 {
        use rayon::prelude::*;
        let (gu, gv, gt) = grid;
        let vals: Vec<f64> = (0..gu * gv * gt)
            .into_par_iter()
            .map(|idx| {
                let i = idx / (gv * gt);
                let j = (idx / gt) % gv;
                let k = idx % gt;
                self.phi(ProjectivePoint::new(
                    (i as f64 + 0.5) / gu as f64,
                    (j as f64 + 0.5) / gv as f64,
                    (k as f64 + 0.5) * std::f64::consts::PI / gt as f64,
                ))
                .abs()
            })
            .collect();
        vals.into_iter().fold(0.0, f64::max)
    }

    /// Base orbit x, f(x), ..., f^{n-1}(x).
    pub fn orbit(&self, x: SurfacePoint, n: usize) -> Vec<SurfacePoint> {
        let mut out = Vec::with_capacity(n);
        let mut p = x;
        for _ in 0..n {
            out.push(p);
            p = self.apply(p);
        }
        out
    }

    /// Bundle orbit xi, f-hat(xi), ..., f-hat^{n-1}(xi).
    pub fn projective_orbit(&self, xi: ProjectivePoint, n: usize) -> Vec<ProjectivePoint> {
        let mut out = Vec::with_capacity(n);
        let mut p = xi;
        for _ in 0..n {
            out.push(p);
            p = self.projective_apply(p);
        }
        out
    }
}

/// Residual mapped to the nearest integer representative, in [-1/2, 1/2).
pub fn nearest_rep(d: f64) -> f64 {
    let r = d.rem_euclid(1.0);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

fn invert_circle_factor(amp: f64, target: f64) -> f64 {
    // g(t) = t + amp sin(2 pi t) is a circle diffeo for 2 pi amp < 1.
    let mut t = target;
    for _ in 0..60 {
        let r = nearest_rep(t + amp * (TAU * t).sin() - target);
        if r.abs() < 1e-15 {
            break;
        }
        t -= r / (1.0 + amp * TAU * (TAU * t).cos());
    }
    t.rem_euclid(1.0)
}

/// d^k/dx^k sin(TAU x) given y = TAU x: each derivative scales by TAU and
/// shifts the phase a quarter turn.
fn sin_deriv(y: f64, k: usize) -> f64 {
    TAU.powi(k as i32) * (y + k as f64 * std::f64::consts::FRAC_PI_2).sin()
}

/// Order-k partial tensors of a model at a point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub point: SurfacePoint,
    tensors: Vec<[Vec<f64>; 2]>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.tensors.len()
    }

    /// Tensor of order k (1-based): [coordinate][number of v-derivatives].
    pub fn tensor(&self, k: usize) -> &[Vec<f64>; 2] {
        &self.tensors[k - 1]
    }
}

#[cfg(test)]
mod tests;
