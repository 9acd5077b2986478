//! C¹ piecewise-cubic interpolation on a strictly increasing grid.
//!
//! One representation (cubic Hermite: node values plus node slopes) backs
//! both construction paths: `natural` solves the classical tridiagonal
//! system and stores the resulting node derivatives, `from_hermite` accepts
//! exact slopes when the caller knows them (antiderivative grids store the
//! integrand as the slope, making the spline the exact integral of the
//! interpolant). Evaluation outside the grid extrapolates linearly from the
//! end slope; callers that must not extrapolate check `domain()` first.

use crate::error::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Arc<[f64]>,
    y: Arc<[f64]>,
    m: Arc<[f64]>,
}

impl CubicSpline {
    /// Hermite construction from values and exact slopes.
    pub fn from_hermite(x: Vec<f64>, y: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != y.len() || x.len() != m.len() {
            return Err(Error::InvalidParameter {
                what: "spline nodes",
                msg: format!("need >= 2 nodes with matching lengths, got {}/{}/{}", x.len(), y.len(), m.len()),
            });
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter {
                    what: "spline nodes",
                    msg: format!("grid not strictly increasing near x = {}", w[0]),
                });
            }
        }
        if x.iter().chain(y.iter()).chain(m.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                what: "spline nodes",
                msg: "non-finite node data".into(),
            });
        }
        Ok(CubicSpline {
            x: x.into(),
            y: y.into(),
            m: m.into(),
        })
    }

    /// Natural cubic spline (zero second derivative at both ends).
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidParameter {
                what: "spline nodes",
                msg: format!("need >= 2 nodes with matching lengths, got {}/{}", n, y.len()),
            });
        }
        if n == 2 {
            let s = (y[1] - y[0]) / (x[1] - x[0]);
            return Self::from_hermite(x, y, vec![s, s]);
        }
        // Solve for second derivatives M with natural boundary conditions.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        // Thomas algorithm.
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut mm = vec![0.0; n];
        mm[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            mm[i] = (rhs[i] - sup[i] * mm[i + 1]) / diag[i];
        }
        // Convert second derivatives to node slopes.
        let mut slopes = vec![0.0; n];
        for i in 0..n - 1 {
            let h = x[i + 1] - x[i];
            slopes[i] = (y[i + 1] - y[i]) / h - h * (2.0 * mm[i] + mm[i + 1]) / 6.0;
        }
        let h = x[n - 1] - x[n - 2];
        slopes[n - 1] = (y[n - 1] - y[n - 2]) / h + h * (2.0 * mm[n - 1] + mm[n - 2]) / 6.0;
        Self::from_hermite(x, y, slopes)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0;
        }
        if t >= self.x[n - 1] {
            return n - 2;
        }
        // partition_point returns the first index with x[i] > t.
        let i = self.x.partition_point(|&v| v <= t);
        (i - 1).min(n - 2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if t < lo {
            return self.y[0] + self.m[0] * (t - lo);
        }
        if t > hi {
            let n = self.x.len();
            return self.y[n - 1] + self.m[n - 1] * (t - hi);
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i] * h, self.m[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if t < lo {
            return self.m[0];
        }
        if t > hi {
            return self.m[self.x.len() - 1];
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i] * h, self.m[i + 1] * h);
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h
    }

    pub fn second_deriv(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if t < lo || t > hi {
            return 0.0;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i] * h, self.m[i + 1] * h);
        ((12.0 * s - 6.0) * y0
            + (6.0 * s - 4.0) * m0
            + (-12.0 * s + 6.0) * y1
            + (6.0 * s - 2.0) * m1)
            / (h * h)
    }

    /// Exact integrals of the interpolant from the first node to every node.
    pub fn prefix_integral(&self) -> Vec<f64> {
        let n = self.x.len();
        let mut out = Vec::with_capacity(n);
        out.push(0.0);
        let mut acc = 0.0;
        for i in 0..n - 1 {
            let h = self.x[i + 1] - self.x[i];
            acc += 0.5 * h * (self.y[i] + self.y[i + 1])
                + h * h * (self.m[i] - self.m[i + 1]) / 12.0;
            out.push(acc);
        }
        out
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }
}
