//! Tiny dense kernels: 2x2 matrices with closed-form singular values and the
//! largest eigenvalue of a symmetric 3x3. Enough for tangent cocycles; no
//! general-purpose linear algebra is needed anywhere else.

/// Row-major 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn mul_vec(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * x[0] + self.m[0][1] * x[1],
            self.m[1][0] * x[0] + self.m[1][1] * x[1],
        ]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    pub fn frobenius(&self) -> f64 {
        let a = &self.m;
        (a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]).sqrt()
    }

    /// Largest singular value. Exact formula: with T = sum of squared
    /// entries and D = det, s_max^2 = (T + sqrt(T^2 - 4 D^2)) / 2.
    pub fn op_norm(&self) -> f64 {
        let a = &self.m;
        let t = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
        let d = self.det();
        let disc = (t * t - 4.0 * d * d).max(0.0);
        (0.5 * (t + disc.sqrt())).sqrt()
    }

    /// Smallest singular value: s_min = |det| / s_max when s_max > 0.
    pub fn min_singular(&self) -> f64 {
        let smax = self.op_norm();
        if smax == 0.0 {
            0.0
        } else {
            self.det().abs() / smax
        }
    }

    /// Moduli of the (possibly complex) eigenvalues, ascending.
    pub fn eigen_moduli(&self) -> [f64; 2] {
        let tr = self.m[0][0] + self.m[1][1];
        let det = self.det();
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let a = ((tr + sq) / 2.0).abs();
            let b = ((tr - sq) / 2.0).abs();
            [a.min(b), a.max(b)]
        } else {
            // Complex pair: both moduli equal sqrt(det); det > 0 here.
            let r = det.sqrt();
            [r, r]
        }
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }
}

/// Largest eigenvalue of a symmetric 3x3 via the trigonometric closed form.
/// Deterministic and branch-stable; inputs are Gram matrices, so symmetric
/// positive semidefinite up to rounding.
pub fn sym3_eig_max(s: [[f64; 3]; 3]) -> f64 {
    let p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
    if p1 == 0.0 {
        return s[0][0].max(s[1][1]).max(s[2][2]);
    }
    let q = (s[0][0] + s[1][1] + s[2][2]) / 3.0;
    let p2 = (s[0][0] - q).powi(2) + (s[1][1] - q).powi(2) + (s[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let inv_p = 1.0 / p;
    let b = [
        [(s[0][0] - q) * inv_p, s[0][1] * inv_p, s[0][2] * inv_p],
        [s[0][1] * inv_p, (s[1][1] - q) * inv_p, s[1][2] * inv_p],
        [s[0][2] * inv_p, s[1][2] * inv_p, (s[2][2] - q) * inv_p],
    ];
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[1][2])
        - b[0][1] * (b[0][1] * b[2][2] - b[1][2] * b[0][2])
        + b[0][2] * (b[0][1] * b[1][2] - b[1][1] * b[0][2]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

/// Operator (spectral) norm of a general 3x3.
pub fn norm3(m: &[[f64; 3]; 3]) -> f64 {
    // Gram matrix M^T M.
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += m[k][i] * m[k][j];
            }
            g[i][j] = acc;
            g[j][i] = acc;
        }
    }
    sym3_eig_max(g).max(0.0).sqrt()
}

pub fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_frobenius(m: &[[f64; 3]; 3]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_matches_symmetric_eigenvalue() {
        // [[2,1],[1,1]] is symmetric: largest singular value = largest eigenvalue.
        let a = Mat2::new(2.0, 1.0, 1.0, 1.0);
        let golden = (3.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((a.op_norm() - golden).abs() < 1e-14);
        assert!((a.min_singular() - 1.0 / golden).abs() < 1e-14);
    }

    #[test]
    fn op_norm_of_rotation_is_one() {
        let (s, c) = 0.7_f64.sin_cos();
        let r = Mat2::new(c, -s, s, c);
        assert!((r.op_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn norm3_agrees_with_power_iteration() {
        let m: [[f64; 3]; 3] = [[0.3, -1.2, 0.5], [2.0, 0.1, -0.4], [0.0, 0.9, 1.5]];
        let mut x = [1.0_f64, 0.7, -0.3];
        let mut lam = 0.0;
        for _ in 0..500 {
            // x <- M^T M x, normalized
            let y = [
                m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
                m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
                m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
            ];
            let z = [
                m[0][0] * y[0] + m[1][0] * y[1] + m[2][0] * y[2],
                m[0][1] * y[0] + m[1][1] * y[1] + m[2][1] * y[2],
                m[0][2] * y[0] + m[1][2] * y[1] + m[2][2] * y[2],
            ];
            lam = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt().sqrt();
            let n = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
            x = [z[0] / n, z[1] / n, z[2] / n];
        }
        assert!((norm3(&m) - lam).abs() < 1e-9);
    }

    #[test]
    fn eigen_moduli_complex_pair() {
        // Rotation scaled by 2: eigenvalues 2 e^{+-i t}.
        let (s, c) = 1.1_f64.sin_cos();
        let r = Mat2::new(c, -s, s, c).scale(2.0);
        let m = r.eigen_moduli();
        assert!((m[0] - 2.0).abs() < 1e-12 && (m[1] - 2.0).abs() < 1e-12);
    }
}
