//! Scalar root finding: bisection on a bracket with a secant polish.

use crate::error::{Error, Result};

/// Find a root of `f` in [lo, hi]. The endpoints must bracket a sign change.
/// Bisection narrows the bracket, then secant steps polish to `tol` in x.
pub fn bisect_secant<F>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    // bisection down to a narrow interval
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol.max(4.0 * f64::EPSILON * m.abs()) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 || !fm.is_finite() {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // secant polish within the bracket
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (fa, fb);
    for _ in 0..12 {
        if (f1 - f0).abs() < f64::MIN_POSITIVE {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2 < lo || x2 > hi {
            break;
        }
        let f2 = f(x2);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (x1 - x0).abs() <= tol.max(f64::EPSILON * x1.abs()) {
            break;
        }
    }
    Ok(x1)
}

/// Scan [lo, hi] with `n` panels and return the first sub-bracket where `f`
/// changes sign, or None if it keeps one sign over the whole range.
pub fn scan_bracket<F>(f: &F, lo: f64, hi: f64, n: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=n {
        let x1 = lo + (hi - lo) * k as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            return Some((x0, x0));
        }
        if f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() {
            return Some((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| x * x * x - 2.0;
        let r = bisect_secant(&f, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(bisect_secant(&f, -1.0, 1.0, 1e-12), Err(Error::Bracket { .. })));
    }

    #[test]
    fn scan_finds_bracket() {
        let f = |x: f64| (x - 0.737).tanh();
        let (a, b) = scan_bracket(&f, 0.0, 1.0, 50).unwrap();
        assert!(a < 0.737 && 0.737 < b);
    }
}
