//! Natural cubic spline interpolation on strictly increasing knots.

/// Natural cubic spline: second derivative zero at both end knots.
/// Two knots degrade to linear interpolation.
pub(crate) struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Fit through `(x, y)` pairs. `x` must be strictly increasing, `len >= 2`.
    pub fn fit(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert_eq!(n, y.len(), "knot arrays must match");
        assert!(n >= 2, "spline needs at least 2 knots");
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]), "knots must increase");

        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior tridiagonal system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            // Forward sweep: lower diagonal entry i equals upper[i - 1].
            for i in 1..k {
                let w = upper[i - 1] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (1..k).rev() {
                m[i] = (rhs[i - 1] - upper[i - 1] * m[i]) / diag[i - 1];
            }
        }
        Self { x, y, m }
    }

    /// Evaluate at `t`; clamps to the end segments outside the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let seg = self.segment(t);
        self.eval_on_segment(seg, t)
    }

    /// Evaluate at a non-decreasing sequence of points in one sweep.
    pub fn eval_sorted(&self, ts: impl Iterator<Item = f64>) -> Vec<f64> {
        let mut seg = 0;
        let last = self.x.len() - 2;
        ts.map(|t| {
            // Same convention as `segment`: knot t belongs to the segment it starts.
            while seg < last && t >= self.x[seg + 1] {
                seg += 1;
            }
            self.eval_on_segment(seg, t)
        })
        .collect()
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0;
        }
        if t >= self.x[n - 1] {
            return n - 2;
        }
        // partition_point: first knot strictly greater than t.
        let hi = self.x.partition_point(|&k| k <= t);
        hi.clamp(1, n - 1) - 1
    }

    fn eval_on_segment(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = self.x[i + 1] - t;
        let b = t - self.x[i];
        (self.m[i] * a * a * a + self.m[i + 1] * b * b * b) / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }
}
