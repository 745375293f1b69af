//! Complex-modulus elliptic integrals and Jacobi elliptic functions.
//!
//! K(m) is computed by the arithmetic-geometric mean with the "right choice"
//! of square-root sign at every step, which yields the principal branch,
//! analytic off the cut [1, inf). Values on the cut are resolved by the sign
//! of the imaginary part of `m`: an IEEE negative zero selects the -i0 side.
//!
//! sn, cn, dn are evaluated by descending Landen transformations in complex
//! arithmetic, with reciprocal-modulus and complementary-parameter
//! transformations routing |m| > 1 and m near 1 into the contractive region.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative distance at which two complex numbers are considered converged.
const AGM_TOL: f64 = 4.0 * f64::EPSILON;

/// Arithmetic-geometric mean with the branch selection that keeps the
/// iteration on the principal sheet: pick the sign of sqrt(a b) so that
/// |a1 - b1| <= |a1 + b1|, breaking ties toward Im(b1/a1) > 0.
fn agm(a0: Complex64, b0: Complex64) -> Complex64 {
    let (mut a, mut b) = (a0, b0);
    for _ in 0..64 {
        let a1 = 0.5 * (a + b);
        let mut b1 = (a * b).sqrt();
        let d_minus = (a1 - b1).norm();
        let d_plus = (a1 + b1).norm();
        if d_minus > d_plus || (d_minus == d_plus && (b1 / a1).im < 0.0) {
            b1 = -b1;
        }
        a = a1;
        b = b1;
        if (a - b).norm() <= AGM_TOL * a.norm() {
            break;
        }
    }
    a
}

/// Complete elliptic integral of the first kind K(m), parameter convention
/// (m = k^2). Principal branch; the cut [1, inf) is approached from the side
/// given by the sign (including signed zero) of Im(m).
pub fn ellip_k(m: Complex64) -> Result<Complex64> {
    if !m.re.is_finite() || !m.im.is_finite() {
        return Err(Error::domain("ellip_k: m must be finite"));
    }
    if m.re >= 1.0 && m.im == 0.0 && !m.im.is_sign_negative() {
        if m.re == 1.0 {
            return Err(Error::Divergence("K(m) diverges at m = 1".into()));
        }
        return Err(Error::BranchCut { re: m.re });
    }
    if m.re == 1.0 && m.im == 0.0 {
        return Err(Error::Divergence("K(m) diverges at m = 1".into()));
    }
    Ok(Complex64::new(std::f64::consts::FRAC_PI_2, 0.0) / agm(ONE, (ONE - m).sqrt()))
}

/// Carlson symmetric integral R_F(x, y, z) by the duplication theorem,
/// for complex arguments off the negative real axis.
pub fn carlson_rf(x0: Complex64, y0: Complex64, z0: Complex64) -> Result<Complex64> {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let a0 = (x + y + z) / 3.0;
    let mut a = a0;
    let q = (3.0 * f64::EPSILON).powf(-1.0 / 6.0)
        * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut scale = 1.0;
    for _ in 0..64 {
        if q * scale < a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        scale *= 0.25;
    }
    let xr = (a0 - x0) * scale / a;
    let yr = (a0 - y0) * scale / a;
    let zr = -xr - yr;
    let e2 = xr * yr - zr * zr;
    let e3 = xr * yr * zr;
    // Carlson 1995, fifth-order expansion
    let series = ONE - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 / 44.0 * e2 * e3;
    Ok(series / a.sqrt())
}

/// Incomplete elliptic integral of the first kind F(phi | m) on the principal
/// branch, for Re(phi) in [-pi/2, pi/2]; arguments with Re(phi) in (pi/2, pi]
/// are reduced through F(phi) = 2 K(m) - F(pi - phi).
pub fn ellip_f(phi: Complex64, m: Complex64) -> Result<Complex64> {
    if phi.re > std::f64::consts::FRAC_PI_2 {
        let reduced = ellip_f(Complex64::new(std::f64::consts::PI, 0.0) - phi, m)?;
        return Ok(2.0 * ellip_k(m)? - reduced);
    }
    if phi.re < -std::f64::consts::FRAC_PI_2 {
        return Ok(-ellip_f(-phi, m)?);
    }
    let s = phi.sin();
    let c = phi.cos();
    Ok(s * carlson_rf(c * c, ONE - m * s * s, ONE)?)
}

/// Principal inverse of cn: a value u with cn(u | m) = w.
/// The representative is F(acos(w) | m); callers select the lattice
/// translate that satisfies their constraints.
pub fn arccn(w: Complex64, m: Complex64) -> Result<Complex64> {
    ellip_f(w.acos(), m)
}

/// A consistent triple of Jacobi elliptic function values.
#[derive(Debug, Clone, Copy)]
pub struct Jacobi {
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

/// Magnitude beyond which an evaluation is treated as having hit a pole.
const POLE_LIMIT: f64 = 1e12;

/// Jacobi sn, cn, dn at complex argument `u` and complex parameter `m`.
pub fn jacobi_pq(u: Complex64, m: Complex64) -> Result<Jacobi> {
    if !(u.re.is_finite() && u.im.is_finite() && m.re.is_finite() && m.im.is_finite()) {
        return Err(Error::domain("jacobi_pq: arguments must be finite"));
    }
    let j = jacobi_recurse(u, m, 0)?;
    if !j.sn.is_finite() || !j.cn.is_finite() || !j.dn.is_finite()
        || j.sn.norm() > POLE_LIMIT || j.cn.norm() > POLE_LIMIT || j.dn.norm() > POLE_LIMIT
    {
        return Err(Error::PoleProximity { location: u });
    }
    Ok(j)
}

fn jacobi_recurse(u: Complex64, m: Complex64, depth: usize) -> Result<Jacobi> {
    if depth > 48 {
        return Err(Error::NoConvergence("jacobi_pq"));
    }
    if m.norm() < 1e-14 {
        // A&S 16.13 first-order-in-m expansions around circular functions
        let (su, cu) = (u.sin(), u.cos());
        let t = u - su * cu;
        return Ok(Jacobi {
            sn: su - 0.25 * m * t * cu,
            cn: cu + 0.25 * m * t * su,
            dn: ONE - 0.5 * m * su * su,
        });
    }
    if m.norm() > 1.0 {
        // reciprocal-modulus transformation (A&S 16.11)
        let sm = m.sqrt();
        let j = jacobi_recurse(u * sm, ONE / m, depth + 1)?;
        return Ok(Jacobi { sn: j.sn / sm, cn: j.dn, dn: j.cn });
    }
    if (ONE - m).norm() < 0.25 {
        // rotate to the complementary parameter (A&S 16.20)
        let j = jacobi_recurse(-Complex64::i() * u, ONE - m, depth + 1)?;
        if j.cn.norm() < 1e-300 {
            return Err(Error::PoleProximity { location: u });
        }
        return Ok(Jacobi {
            sn: Complex64::i() * j.sn / j.cn,
            cn: ONE / j.cn,
            dn: j.dn / j.cn,
        });
    }
    // descending Landen step; k1 = m / (1 + k')^2 avoids the cancellation
    // in (1 - k')/(1 + k')
    let kp = (ONE - m).sqrt();
    let k1 = m / ((ONE + kp) * (ONE + kp));
    let j = jacobi_recurse(u / (ONE + k1), k1 * k1, depth + 1)?;
    let s2 = j.sn * j.sn;
    let den = ONE + k1 * s2;
    if den.norm() < 1e-300 {
        return Err(Error::PoleProximity { location: u });
    }
    Ok(Jacobi {
        sn: (ONE + k1) * j.sn / den,
        cn: j.cn * j.dn / den,
        dn: (ONE - k1 * s2) / den,
    })
}
