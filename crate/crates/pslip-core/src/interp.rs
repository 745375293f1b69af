//! Monotone cubic interpolation (Fritsch-Carlson PCHIP) over a sorted grid.

/// Monotonicity-preserving piecewise cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Build from strictly increasing abscissas. Panics on unsorted input;
    /// callers construct the grids and own their ordering.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2);
        assert!(x.windows(2).all(|w| w[0] < w[1]), "abscissas must increase");
        let n = x.len();
        let mut h = vec![0.0; n - 1];
        let mut slope = vec![0.0; n - 1];
        for i in 0..n - 1 {
            h[i] = x[i + 1] - x[i];
            slope[i] = (y[i + 1] - y[i]) / h[i];
        }
        let mut d = vec![0.0; n];
        d[0] = end_derivative(h[0], h.get(1).copied().unwrap_or(h[0]), slope[0], slope.get(1).copied().unwrap_or(slope[0]));
        d[n - 1] = end_derivative(
            h[n - 2],
            if n >= 3 { h[n - 3] } else { h[n - 2] },
            slope[n - 2],
            if n >= 3 { slope[n - 3] } else { slope[n - 2] },
        );
        for i in 1..n - 1 {
            if slope[i - 1] * slope[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
            }
        }
        Pchip { x, y, d }
    }

    pub fn min_x(&self) -> f64 {
        self.x[0]
    }

    pub fn max_x(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Evaluate at `x`, clamping to the grid range.
    pub fn eval(&self, x: f64) -> f64 {
        let xq = x.clamp(self.x[0], *self.x.last().unwrap());
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// One-sided three-point derivative estimate with the shape-preserving limiter.
fn end_derivative(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}
