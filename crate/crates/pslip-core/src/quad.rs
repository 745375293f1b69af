//! Quadrature building blocks: periodic trapezoid with node doubling,
//! fixed-order Gauss-Legendre panels, adaptive Simpson, and tanh-sinh for
//! integrable endpoint singularities.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Trapezoid rule over one period [0, period) with node doubling until the
/// value stabilizes. Spectrally accurate for analytic periodic integrands.
pub fn trapezoid_periodic<F>(mut f: F, period: f64, tol: f64, max_nodes: usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut n = 64usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += f(period * k as f64 / n as f64)?;
    }
    let mut value = sum * (period / n as f64);
    loop {
        // refine by inserting midpoints
        let mut extra = Complex64::new(0.0, 0.0);
        for k in 0..n {
            extra += f(period * (k as f64 + 0.5) / n as f64)?;
        }
        sum += extra;
        n *= 2;
        let next = sum * (period / n as f64);
        let err = (next - value).norm();
        value = next;
        if err <= tol * value.norm().max(1.0) * 0.5 + f64::EPSILON {
            return Ok(value);
        }
        if n >= max_nodes {
            return Err(Error::NoConvergence("trapezoid_periodic"));
        }
    }
}

/// 16-point Gauss-Legendre nodes/weights on (-1, 1).
const GL16_X: [f64; 8] = [
    0.09501250983763744,
    0.28160355077925891,
    0.45801677765722739,
    0.61787624440264375,
    0.75540440835500303,
    0.86563120238783174,
    0.94457502307323258,
    0.98940093499164993,
];
const GL16_W: [f64; 8] = [
    0.18945061045506850,
    0.18260341504492359,
    0.16915651939500254,
    0.14959598881657673,
    0.12462897125553387,
    0.09515851168249278,
    0.06225352393864789,
    0.02715245941175409,
];

/// Fixed 16-point Gauss-Legendre rule on [a, b].
pub fn gauss16<F>(mut f: F, a: f64, b: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL16_W[i] * (f(c + h * GL16_X[i]) + f(c - h * GL16_X[i]));
    }
    acc * h
}

/// Adaptive composite Gauss: bisect panels until the 16-point value on a
/// panel matches the sum over its halves.
pub fn adaptive_gauss<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = gauss16(f, a, m);
        let right = gauss16(f, m, b);
        let err = (left + right - whole).abs();
        // once the requested tolerance dips under round-off of the panel
        // values, further bisection cannot help
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if err <= tol.max(floor) || depth >= 40 {
            if depth >= 40 && err > 1e3 * tol.max(floor) {
                return Err(Error::NoConvergence("adaptive_gauss"));
            }
            return Ok(left + right);
        }
        Ok(recurse(f, a, m, left, 0.5 * tol, depth + 1)?
            + recurse(f, m, b, right, 0.5 * tol, depth + 1)?)
    }
    let whole = gauss16(f, a, b);
    recurse(f, a, b, whole, tol, 0)
}

/// Tanh-sinh (double exponential) quadrature on (a, b). Handles integrable
/// endpoint singularities such as log(x - a).
pub fn tanh_sinh<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let c = 0.5 * (a + b);
    let h0 = 0.5 * (b - a);
    let mut h: f64 = 1.0;
    let mut prev = f64::NAN;
    for level in 0..12 {
        let mut acc = 0.0;
        // t_max chosen so the weights underflow well below tol
        let t_max = 4.0;
        let n = (t_max / h).ceil() as i64;
        let start = if level == 0 { 0 } else { 1 };
        let step = if level == 0 { 1 } else { 2 };
        let mut k = start;
        while k <= n {
            let t = h * k as f64;
            let (xp, w) = de_node(t);
            // node pair +-t
            if k == 0 {
                acc += w * f(c);
            } else {
                let xr = c + h0 * xp;
                let xl = c - h0 * xp;
                if xr < b {
                    acc += w * f(xr);
                }
                if xl > a {
                    acc += w * f(xl);
                }
            }
            k += step;
        }
        let value = if level == 0 {
            acc * h * h0
        } else {
            0.5 * prev + acc * h * h0
        };
        if level > 2 && (value - prev).abs() <= tol * value.abs().max(1.0) {
            return Ok(value);
        }
        prev = value;
        h *= 0.5;
    }
    Ok(prev)
}

/// Abscissa (mapped to (-1,1)) and weight of the tanh-sinh rule at parameter t.
fn de_node(t: f64) -> (f64, f64) {
    let u = std::f64::consts::FRAC_PI_2 * t.sinh();
    let x = u.tanh();
    let w = std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_periodic_exact_for_fourier_mode() {
        let f = |t: f64| Ok(Complex64::new((3.0 * t).cos() * (3.0 * t).cos(), 0.0));
        let v = trapezoid_periodic(f, 2.0 * std::f64::consts::PI, 1e-13, 1 << 16).unwrap();
        assert!((v.re - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn adaptive_gauss_polynomial() {
        let v = adaptive_gauss(&|x: f64| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_log_endpoint() {
        // int_0^1 ln(x) dx = -1
        let v = tanh_sinh(&|x: f64| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn tanh_sinh_smooth() {
        let v = tanh_sinh(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
