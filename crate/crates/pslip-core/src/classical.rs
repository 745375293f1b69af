//! Closed-form classical intrawell trajectories of the rotating-wave
//! Hamiltonian and their characteristic complex times.
//!
//! Within one well the solution is elliptic in complex time with a real
//! period t1 and a second period t2 with positive imaginary part. The pole
//! time t_P, the symmetric-well shift t_S = (t1 + t2)/2 and the purely
//! imaginary quasi-period t_Q = t1 + i Im(t2)/2 - 2 t_P control the Fourier
//! coefficients and the zero-temperature instanton.

use num_complex::Complex64;

use crate::elliptic::{ellip_f, ellip_k, jacobi_pq};
use crate::error::{Error, Result};
use crate::params::OscParams;

/// Characteristic complex times of the trajectory at one quasi-energy.
#[derive(Debug, Clone, Copy)]
pub struct CharTimes {
    /// Real period of the intrawell rotation.
    pub t1: f64,
    /// Second period; Re(t2) = t1 except for Delta < 0 below E_D where Re(t2) = 0.
    pub t2: Complex64,
    /// Shift mapping the trajectory to the symmetric well, (t1 + t2)/2.
    pub t_s: Complex64,
    /// Pole location, Re(t_P) = t1/2, 0 < Im(t_P) < Im(t2)/4.
    pub t_p: Complex64,
    /// Quasi-period, purely imaginary with 0 <= |t_Q| < Im(t2)/2.
    pub t_q: Complex64,
}

impl CharTimes {
    /// Intrawell rotation frequency 2 pi / t1.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.t1
    }
}

/// Relative distance (in units of t1) below which evaluation near a lattice
/// pole is refused.
pub const POLE_THRESHOLD: f64 = 1e-6;

fn check_energy(e: f64, p: &OscParams) -> Result<()> {
    let e_min = p.special_energies().e_min;
    if !(e >= e_min && e < 0.0) {
        return Err(Error::domain(format!(
            "quasi-energy {e} outside the well range [{e_min}, 0)"
        )));
    }
    Ok(())
}

/// s = sqrt(g |E|), the natural well-depth coordinate.
fn depth(e: f64, p: &OscParams) -> f64 {
    (p.g * e.abs()).sqrt()
}

/// Elliptic parameter m(E); real over the whole well, carrying the -i0+
/// branch prescription as a negative-zero imaginary part.
pub fn modulus(e: f64, p: &OscParams) -> Complex64 {
    let s = depth(e, p);
    let m = -(2.0 * p.lam - p.delta - s) * (2.0 * p.lam + p.delta - s) / (8.0 * p.lam * s);
    Complex64::new(m, -0.0)
}

fn k_plus_minus(e: f64, p: &OscParams) -> (f64, f64) {
    let s = depth(e, p);
    ((2.0 * p.lam - p.delta + s).sqrt(), (2.0 * p.lam - p.delta - s).sqrt())
}

/// Scale between physical time and the Jacobi argument, u = scale * t.
fn u_scale(e: f64, p: &OscParams) -> f64 {
    (8.0 * p.lam).sqrt() * (p.g * e.abs()).powf(0.25)
}

/// The intrawell solution underline-phi(t; E) at complex time, via sn/cn/dn.
pub fn classical_solution(t: Complex64, e: f64, p: &OscParams) -> Result<Complex64> {
    check_energy(e, p)?;
    if e == p.special_energies().e_min {
        // the orbit degenerates to the fixed point phi_0
        return Ok(Complex64::new(0.0, (2.0 * (2.0 * p.lam - p.delta) / p.g).sqrt()));
    }
    let ct = char_times_unchecked(e, p)?;
    if pole_distance(t, &ct) < POLE_THRESHOLD * ct.t1 {
        return Err(Error::PoleProximity { location: nearest_pole(t, &ct) });
    }
    let m = modulus(e, p);
    let (kp, km) = k_plus_minus(e, p);
    let j = jacobi_pq(u_scale(e, p) * t, m)?;
    let quart = (p.g * e.abs()).powf(0.25);
    let pref = (e.abs() / p.g).powf(0.25) / (kp + km * j.cn);
    Ok(pref * (Complex64::new(0.0, 2.0 * quart) * j.dn - kp * km / (2.0 * p.lam).sqrt() * j.sn))
}

/// Analytic continuation of the conjugate trajectory,
/// underline-phibar(t) = conj(underline-phi(conj(t))).
pub fn classical_solution_bar(t: Complex64, e: f64, p: &OscParams) -> Result<Complex64> {
    Ok(classical_solution(t.conj(), e, p)?.conj())
}

/// Rotating-wave Hamiltonian H0(phibar, phi).
pub fn h0(phibar: Complex64, phi: Complex64, p: &OscParams) -> Complex64 {
    let n = phibar * phi;
    p.delta * n + p.lam * (phi * phi + phibar * phibar) + 0.25 * p.g * n * n
}

/// d phi / dt along the flow, from i d_t phi = d H0 / d phibar.
pub fn classical_velocity(phibar: Complex64, phi: Complex64, p: &OscParams) -> Complex64 {
    let rhs = p.delta * phi + 2.0 * p.lam * phibar + 0.5 * p.g * (phibar * phi) * phi;
    -Complex64::i() * rhs
}

/// Characteristic times at quasi-energy E in (E_min, 0).
pub fn char_times(e: f64, p: &OscParams) -> Result<CharTimes> {
    check_energy(e, p)?;
    let se = p.special_energies();
    if e == se.e_min {
        return Err(Error::domain("characteristic times are undefined at E = E_min exactly"));
    }
    if p.delta < 0.0 && e == se.e_d {
        return Err(Error::Divergence("|t2| diverges at E = E_D".into()));
    }
    char_times_unchecked(e, p)
}

fn char_times_unchecked(e: f64, p: &OscParams) -> Result<CharTimes> {
    let m = modulus(e, p);
    let s = depth(e, p);
    let c = (2.0 / (p.lam * s)).sqrt();
    let k_m = ellip_k(m)?;
    // K at the complementary parameter; 1 - m > 1 when m < 0, and the
    // representative with Re(t2) = t1 (or 0) and Im(t2) > 0 corresponds to
    // the lower side of that cut.
    let k_c = ellip_k(Complex64::new(1.0 - m.re, -0.0))?;
    let t1 = c * k_m.re;
    let mut t2 = Complex64::i() * c * k_c;
    // lattice-normalize: Re(t2) is t1 when 1 - m sits on the cut, 0 otherwise
    if t2.re < -0.25 * t1 {
        t2 += t1;
    }
    let t_s = 0.5 * (t1 + t2);

    // pole time: invert cn = -k+/k- on the principal branch, then take the
    // representative with Re = t1/2, Im in (0, Im(t2)/4)
    let (kp, km) = k_plus_minus(e, p);
    let w = Complex64::new(-kp / km, 0.0);
    let u_p = ellip_f(w.acos(), m)?;
    let scale = u_scale(e, p);
    let t_p = Complex64::new(u_p.re / scale, (u_p.im / scale).abs());

    let t_q = Complex64::new(t1, 0.5 * t2.im) - 2.0 * t_p;

    Ok(CharTimes { t1, t2, t_s, t_p, t_q })
}

/// Minimum distance from t to the pole lattice {+-t_P + j t1 + l t2}.
pub fn pole_distance(t: Complex64, ct: &CharTimes) -> f64 {
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let base = sign * ct.t_p;
        let d = t - base;
        // fractional lattice coordinates in the (t1, t2) basis
        let l = (d.im / ct.t2.im).round();
        let j = ((d.re - l * ct.t2.re) / ct.t1).round();
        for dl in -1..=1 {
            for dj in -1..=1 {
                let cand = base
                    + (l + dl as f64) * ct.t2
                    + Complex64::new((j + dj as f64) * ct.t1, 0.0);
                best = best.min((t - cand).norm());
            }
        }
    }
    best
}

fn nearest_pole(t: Complex64, ct: &CharTimes) -> Complex64 {
    let mut best = ct.t_p;
    let mut best_d = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let base = sign * ct.t_p;
        let d = t - base;
        let l = (d.im / ct.t2.im).round();
        let j = ((d.re - l * ct.t2.re) / ct.t1).round();
        let cand = base + l * ct.t2 + Complex64::new(j * ct.t1, 0.0);
        if (t - cand).norm() < best_d {
            best_d = (t - cand).norm();
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Occupation;

    fn params(delta: f64) -> OscParams {
        OscParams::new(delta, 0.5, 1.0, 0.01, 1.0, Occupation::Bose(0.0)).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_point_at_well_bottom() {
        // E -> E_min gives phi_0 = i sqrt(2 (2 lambda - Delta)/g)
        let p = params(0.3);
        let se = p.special_energies();
        let phi0 = c(0.0, (2.0 * (2.0 * p.lam - p.delta) / p.g).sqrt());
        let near = classical_solution(c(0.37, 0.0), se.e_min * (1.0 - 1e-12), &p).unwrap();
        assert!((near - phi0).norm() < 1e-5, "{near} vs {phi0}");
        let exact = classical_solution(c(5.0, 0.0), se.e_min, &p).unwrap();
        assert!((exact - phi0).norm() < 1e-14);
    }

    #[test]
    fn energy_conserved_along_real_time() {
        // |H0(conj phi, phi) - E| / |E_min| < 1e-9 for 100 random real t
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let p = params(0.3);
        let se = p.special_energies();
        let e = se.e_min / 2.0;
        for _ in 0..100 {
            let t = c(rng.gen_range(-20.0..20.0), 0.0);
            let phi = classical_solution(t, e, &p).unwrap();
            let h = h0(phi.conj(), phi, &p);
            assert!(
                (h - e).norm() / se.e_min.abs() < 1e-9,
                "t {t}: H0 = {h}, E = {e}"
            );
        }
    }

    #[test]
    fn periodicity_on_both_lattice_vectors() {
        let p = params(0.3);
        let e = p.special_energies().e_min / 2.0;
        let ct = char_times(e, &p).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 20 {
            let t = c(rng.gen_range(0.0..ct.t1), rng.gen_range(-0.4..0.4));
            if pole_distance(t, &ct) < 0.05 * ct.t1
                || pole_distance(t + ct.t2, &ct) < 0.05 * ct.t1
            {
                continue;
            }
            let v0 = classical_solution(t, e, &p).unwrap();
            let v1 = classical_solution(t + ct.t1, e, &p).unwrap();
            let v2 = classical_solution(t + ct.t2, e, &p).unwrap();
            assert!((v1 - v0).norm() < 1e-9, "t1-periodicity at {t}: {}", (v1 - v0).norm());
            assert!((v2 - v0).norm() < 1e-9, "t2-periodicity at {t}: {}", (v2 - v0).norm());
            done += 1;
        }
    }

    #[test]
    fn char_times_structure_positive_detuning() {
        let p = params(0.3);
        let e = p.special_energies().e_min / 2.0;
        let ct = char_times(e, &p).unwrap();
        assert!(ct.t1 > 0.0);
        assert!(ct.t2.im > 0.0);
        assert!((ct.t2.re - ct.t1).abs() < 1e-10 * ct.t1, "Re(t2) = {} vs t1 = {}", ct.t2.re, ct.t1);
        assert!((ct.t_p.re - 0.5 * ct.t1).abs() < 1e-10 * ct.t1);
        assert!(ct.t_p.im > 0.0 && ct.t_p.im < 0.25 * ct.t2.im);
        assert!(ct.t_q.re.abs() < 1e-10 * ct.t1);
        assert!(ct.t_q.im >= 0.0 && ct.t_q.im < 0.5 * ct.t2.im);
    }

    #[test]
    fn char_times_structure_negative_detuning() {
        let p = params(-0.3);
        let se = p.special_energies();
        // below E_D: Re(t2) = 0
        let e_deep = se.e_min * 0.5; // E_min/2 = -0.845 < E_D = -0.49
        let ct = char_times(e_deep, &p).unwrap();
        assert!(ct.t2.re.abs() < 1e-10 * ct.t1, "Re(t2) = {}", ct.t2.re);
        // above E_D: Re(t2) = t1
        let e_shallow = se.e_min * 0.05;
        let ct2 = char_times(e_shallow, &p).unwrap();
        assert!((ct2.t2.re - ct2.t1).abs() < 1e-10 * ct2.t1);
    }

    #[test]
    fn period_approaches_harmonic_limit() {
        // t1(E -> E_min) -> 2 pi / omega_min, with omega_min = 2 sqrt(2 lambda (2 lambda - Delta))
        let p = params(0.3);
        let se = p.special_energies();
        let ct = char_times(se.e_min * (1.0 - 1e-10), &p).unwrap();
        let expect = 2.0 * std::f64::consts::PI / se.omega_min; // = 3.754921... for these params
        assert!((ct.t1 - expect).abs() < 1e-8, "{} vs {expect}", ct.t1);
        assert!((expect - 3.7549214184452757).abs() < 1e-12);
    }

    #[test]
    fn quasi_periodicity_both_regimes() {
        // Delta >= 0 (or E > E_D): phi(t - t_Q) = -phibar(t)
        // Delta < 0, E < E_D:      phi(t - t_Q) = -phibar(t - t1/2)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (delta, frac, shifted) in [(0.3, 0.5, false), (-0.3, 0.05, false), (-0.3, 0.5, true), (-0.6, 0.6, true)] {
            let p = params(delta);
            let se = p.special_energies();
            let e = se.e_min * frac;
            let ct = char_times(e, &p).unwrap();
            for _ in 0..20 {
                let t = c(rng.gen_range(0.0..ct.t1), 0.0);
                let lhs = classical_solution(t - ct.t_q, e, &p).unwrap();
                let t_ref = if shifted { t - 0.5 * ct.t1 } else { t };
                let rhs = -classical_solution_bar(t_ref, e, &p).unwrap();
                assert!(
                    (lhs - rhs).norm() < 1e-9,
                    "delta {delta} frac {frac}: residual {}",
                    (lhs - rhs).norm()
                );
            }
        }
    }

    #[test]
    fn pole_rejection_near_t_p() {
        let p = params(0.3);
        let e = p.special_energies().e_min / 2.0;
        let ct = char_times(e, &p).unwrap();
        let err = classical_solution(ct.t_p + c(1e-9, 0.0), e, &p);
        assert!(matches!(err, Err(Error::PoleProximity { .. })));
        // and the solution really blows up just outside the guard
        let v = classical_solution(ct.t_p + c(2e-5, 0.0), e, &p).unwrap();
        assert!(v.norm() > 1e3);
    }

    #[test]
    fn divergence_at_e_d() {
        let p = params(-0.3);
        let se = p.special_energies();
        assert!(matches!(char_times(se.e_d, &p), Err(Error::Divergence(_))));
        // |t2| grows without bound approaching E_D from either side
        let mut prev_below = 0.0;
        let mut prev_above = 0.0;
        for k in 1..=4 {
            let eps = 10f64.powi(-k);
            let below = char_times(se.e_d * (1.0 + eps), &p).unwrap().t2.norm();
            let above = char_times(se.e_d * (1.0 - eps), &p).unwrap().t2.norm();
            assert!(below > prev_below && above > prev_above);
            prev_below = below;
            prev_above = above;
        }
        assert!(prev_below > 10.0 && prev_above > 10.0);
    }

    #[test]
    fn domain_errors() {
        let p = params(0.3);
        assert!(classical_solution(c(0.0, 0.0), 0.1, &p).is_err());
        assert!(char_times(-10.0, &p).is_err());
    }
}
