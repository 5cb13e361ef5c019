//! Natural cubic spline interpolation (second derivative zero at both ends).

/// Interpolating natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalSpline {
    /// Fits the spline. Requires at least two knots with strictly increasing `xs`;
    /// two knots degenerate to a straight line.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len(), "knot coordinate lengths differ");
        assert!(xs.len() >= 2, "a spline needs at least two knots");
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]), "knots must increase");

        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for r in 0..k {
                let i = r + 1;
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[r] = 2.0 * (h0 + h1);
                upper[r] = h1;
                rhs[r] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            for r in 1..k {
                let lower = xs[r + 1] - xs[r];
                let w = lower / diag[r - 1];
                diag[r] -= w * upper[r - 1];
                rhs[r] -= w * rhs[r - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for r in (0..k - 1).rev() {
                m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
            }
        }
        Self { xs, ys, m }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    fn eval_in(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let b = (x - x0) / h;
        let a = 1.0 - b;
        // Written as y0 + b*(y1 - y0) so equal neighbours reproduce exactly.
        self.ys[i]
            + b * (self.ys[i + 1] - self.ys[i])
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_in(self.segment(x), x)
    }

    /// Evaluates at `0, 1, .., n-1`.
    pub fn eval_grid(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        let last = self.xs.len() - 2;
        for t in 0..n {
            let x = t as f64;
            while seg < last && x > self.xs[seg + 1] {
                seg += 1;
            }
            out.push(self.eval_in(seg, x));
        }
        out
    }
}
