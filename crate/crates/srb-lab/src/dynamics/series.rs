//! Truncated Taylor (jet) arithmetic in one curve parameter.
//!
//! A curve germ at a parameter point is stored as coefficient vectors of
//! h^0..h^r. Pushing a germ through a model composes the model's Taylor
//! expansion at the base point with the germ; for the built-in models every
//! nonlinearity is a sine of a single coordinate, so composition reduces to
//! the classical sin/cos power-series recurrences and stays O(r^2).

pub const TAU: f64 = std::f64::consts::TAU;

/// Coefficients c[j] of h^j, truncated at a fixed order (c.len() - 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub c: Vec<f64>,
}

impl Series {
    pub fn zeros(order: usize) -> Self {
        Series { c: vec![0.0; order + 1] }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Series::zeros(order);
        s.c[0] = value;
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn add(&self, rhs: &Series) -> Series {
        debug_assert_eq!(self.c.len(), rhs.c.len());
        Series { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        debug_assert_eq!(self.c.len(), rhs.c.len());
        Series { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: f64) -> Series {
        Series { c: self.c.iter().map(|a| a * k).collect() }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, rhs: &Series) -> Series {
        let n = self.c.len();
        debug_assert_eq!(n, rhs.c.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                out[i + j] += a * rhs.c[j];
            }
        }
        Series { c: out }
    }

    /// Power-series division; requires a nonzero constant term in `den`.
    pub fn div(&self, den: &Series) -> Series {
        let n = self.c.len();
        debug_assert_eq!(n, den.c.len());
        debug_assert!(den.c[0] != 0.0);
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= den.c[j] * q[k - j];
            }
            q[k] = acc / den.c[0];
        }
        Series { c: q }
    }

    /// d/dh, keeping the truncation order (top coefficient becomes stale
    /// zero; callers only read orders that remain exact).
    pub fn differentiate(&self) -> Series {
        let n = self.c.len();
        let mut out = vec![0.0; n];
        for j in 1..n {
            out[j - 1] = self.c[j] * j as f64;
        }
        Series { c: out }
    }

    /// k-th derivative value at h = 0, i.e. k! * c[k].
    pub fn derivative_value(&self, k: usize) -> f64 {
        debug_assert!(k < self.c.len());
        self.c[k] * factorial(k)
    }

    /// sin and cos of the full series (constant term included), via the
    /// angle-addition split and the S' = A'C / C' = -A'S recurrences on the
    /// zero-constant part.
    pub fn sin_cos(&self) -> (Series, Series) {
        let n = self.c.len();
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = 0.0;
        c[0] = 1.0;
        // a[j] = coefficients of the zero-constant part; a[0] unused.
        for k in 0..n - 1 {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 0..=k {
                let ap = (j + 1) as f64 * self.c[j + 1];
                ds += ap * c[k - j];
                dc += ap * s[k - j];
            }
            s[k + 1] = ds / (k + 1) as f64;
            c[k + 1] = -dc / (k + 1) as f64;
        }
        let sin_t = Series { c: s };
        let cos_t = Series { c: c };
        (
            cos_t.scale(s0).add(&sin_t.scale(c0)),
            cos_t.scale(c0).sub(&sin_t.scale(s0)),
        )
    }
}

pub fn factorial(k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 2..=k {
        acc *= i as f64;
    }
    acc
}

/// Germ of a parametrized curve in the flat chart: two coordinate series in
/// the curve parameter. Constant terms are the base point.
#[derive(Clone, Debug)]
pub struct CurveJet {
    pub u: Series,
    pub v: Series,
}

impl CurveJet {
    pub fn order(&self) -> usize {
        self.u.order()
    }

    /// Reduce the base point mod 1. Integer shifts do not touch derivatives
    /// and keep sine arguments well-conditioned along long orbits.
    pub fn reduce_base(&mut self) {
        self.u.c[0] = self.u.c[0].rem_euclid(1.0);
        self.v.c[0] = self.v.c[0].rem_euclid(1.0);
    }

    /// Norm of the k-th derivative vector of the base curve.
    pub fn derivative_norm(&self, k: usize) -> f64 {
        let du = self.u.derivative_value(k);
        let dv = self.v.derivative_value(k);
        du.hypot(dv)
    }

    /// Tangent angle at the germ point, in [0, pi).
    pub fn tangent_angle(&self) -> f64 {
        let du = self.u.c.get(1).copied().unwrap_or(0.0);
        let dv = self.v.c.get(1).copied().unwrap_or(0.0);
        crate::dynamics::normalize_angle(dv.atan2(du))
    }

    /// Derivatives of the tangent-direction function theta(s) at the germ
    /// point, orders 1..=max_order. theta' = det(w, w') / |w|^2 with
    /// w = (u', v'); higher orders come from the series of that quotient.
    /// Requires a regular germ (|w(0)| > 0).
    pub fn direction_derivatives(&self, max_order: usize) -> Vec<f64> {
        let w1 = self.u.differentiate();
        let w2 = self.v.differentiate();
        let num = w1.mul(&w2.differentiate()).sub(&w2.mul(&w1.differentiate()));
        let den = w1.mul(&w1).add(&w2.mul(&w2));
        let theta_prime = num.div(&den);
        (1..=max_order)
            .map(|k| theta_prime.derivative_value(k - 1))
            .collect()
    }
}
