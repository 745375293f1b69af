//! Effective (Keldysh) Hamiltonians over action space.
//!
//! The unperturbed part K0 drives relaxation and activation of the action
//! variable. In classical mode it is the Langevin form
//! K0 = -2 kappa p I + (2 kappa T / omega_p) Gamma(I) p^2; in quantum mode it
//! is the reaction-kinetics form K0 = sum_n W_n(I)(e^{-n p} - 1) with
//! bath-induced step rates W_n = gamma_l |c_n|^2 + gamma_g |c_{-n}|^2.
//! The drive part K1 keeps every Fourier mode.

use num_complex::Complex64;

use crate::action_angle::{FourierPoint, WellGeometry};
use crate::error::{Error, Result};
use crate::params::DriveParams;
use crate::quad::trapezoid_periodic;

/// Cached per-action series data for repeated K0 evaluation at one action.
#[derive(Debug, Clone)]
pub struct SeriesPoint {
    pub i: f64,
    ln_plus: Vec<f64>,
    ln_minus: Vec<f64>,
    pub p_less: f64,
    pub p_greater: f64,
}

/// Which effective theory backs the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Classical,
    Quantum,
}

/// Evaluator of K0 and K1 over an immutable well geometry.
pub struct EffectiveHamiltonian<'a> {
    geo: &'a WellGeometry,
    mode: Mode,
    /// loss and gain jump rates, gamma_l = 2 (n_B + 1) kappa, gamma_g = 2 n_B kappa
    gamma_l: f64,
    gamma_g: f64,
    /// classical noise strength 2 kappa T / omega_p
    noise: f64,
    /// stay this fraction inside the convergence strip
    strip_margin: f64,
}

impl<'a> EffectiveHamiltonian<'a> {
    /// Classical stochastic theory at temperature T.
    pub fn classical(geo: &'a WellGeometry, temperature: f64) -> Result<Self> {
        let p = geo.params();
        if !(p.kappa > 0.0) {
            return Err(Error::validation("kappa", "instanton dynamics requires kappa > 0"));
        }
        if !(temperature > 0.0) {
            return Err(Error::validation("temperature", "classical mode requires T > 0"));
        }
        Ok(EffectiveHamiltonian {
            geo,
            mode: Mode::Classical,
            gamma_l: 2.0 * p.kappa,
            gamma_g: 0.0,
            noise: 2.0 * p.kappa * temperature / p.omega_p,
            strip_margin: 1e-3,
        })
    }

    /// Quantum theory at bath occupation n_B >= 0.
    pub fn quantum(geo: &'a WellGeometry, n_bose: f64) -> Result<Self> {
        let p = geo.params();
        if !(p.kappa > 0.0) {
            return Err(Error::validation("kappa", "instanton dynamics requires kappa > 0"));
        }
        if !(n_bose >= 0.0) {
            return Err(Error::validation("n_bose", "occupation must be >= 0"));
        }
        Ok(EffectiveHamiltonian {
            geo,
            mode: Mode::Quantum,
            gamma_l: 2.0 * (n_bose + 1.0) * p.kappa,
            gamma_g: 2.0 * n_bose * p.kappa,
            noise: 2.0 * p.kappa * n_bose, // matches 2 kappa T/omega_p at high T
            strip_margin: 1e-3,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn geometry(&self) -> &WellGeometry {
        self.geo
    }

    pub fn jump_rates(&self) -> (f64, f64) {
        (self.gamma_l, self.gamma_g)
    }

    /// Bath-induced step rate W_n(I) = gamma_l |c_n|^2 + gamma_g |c_{-n}|^2.
    pub fn rate_wn(&self, i: f64, n: i32) -> Result<f64> {
        Ok(self.rate_wn_at(&self.geo.fourier_point(i)?, n))
    }

    fn rate_wn_at(&self, fp: &FourierPoint, n: i32) -> f64 {
        self.gamma_l * fp.coeff_norm_sqr(n) + self.gamma_g * fp.coeff_norm_sqr(-n)
    }

    /// Precompute per-action series data: log-magnitudes of c_{+-n} up to
    /// the kept order plus the convergence radii.
    pub fn series_point(&self, i: f64) -> Result<SeriesPoint> {
        let fp = self.geo.fourier_point(i)?;
        let n_keep = self.geo.n_max();
        let mut ln_plus = Vec::with_capacity(n_keep);
        let mut ln_minus = Vec::with_capacity(n_keep);
        for n in 1..=n_keep as i32 {
            ln_plus.push(fp.ln_coeff_norm(n));
            ln_minus.push(fp.ln_coeff_norm(-n));
        }
        Ok(SeriesPoint { i, ln_plus, ln_minus, p_less: fp.p_less, p_greater: fp.p_greater })
    }

    /// Summation of the six exponential families making up the quantum
    /// series. For n beyond the kept order the coefficient decay is
    /// geometric to high accuracy, so the truncated remainders are added in
    /// closed form; this keeps evaluation exact arbitrarily close to the
    /// convergence-strip edge. `moment` = 0 sums K0, 1 sums dK0/dp.
    /// Returns (value, term-magnitude scale).
    fn series_families(&self, sp: &SeriesPoint, p: f64, moment: u32) -> (f64, f64) {
        let n_keep = sp.ln_plus.len();
        let ln_gl = self.gamma_l.ln();
        let ln_gg = if self.gamma_g > 0.0 { self.gamma_g.ln() } else { f64::NEG_INFINITY };
        let ln_gsum = (self.gamma_l + self.gamma_g).ln();
        let (p_lt, p_gt) = (sp.p_less, sp.p_greater);
        // (gamma weight, coefficient side, p coefficient, overall sign, decay)
        // K0 = sum_n [ W_n e^{-np} + W_{-n} e^{np} - W_n - W_{-n} ]
        let fams: [(f64, i32, f64, f64, f64); 6] = [
            (ln_gl, 1, -1.0, 1.0, p_lt + p),  // gamma_l |c_n|^2 e^{-np}
            (ln_gg, -1, -1.0, 1.0, p_gt + p), // gamma_g |c_{-n}|^2 e^{-np}
            (ln_gl, -1, 1.0, 1.0, p_gt - p),  // gamma_l |c_{-n}|^2 e^{np}
            (ln_gg, 1, 1.0, 1.0, p_lt - p),   // gamma_g |c_n|^2 e^{np}
            (ln_gsum, 1, 0.0, -1.0, p_lt),    // -(gamma_l+gamma_g)|c_n|^2
            (ln_gsum, -1, 0.0, -1.0, p_gt),   // -(gamma_l+gamma_g)|c_{-n}|^2
        ];
        let mut value = 0.0;
        let mut scale = 0.0f64;
        for &(ln_g, side, c_p, sign, decay) in &fams {
            if ln_g == f64::NEG_INFINITY {
                continue;
            }
            if moment > 0 && c_p == 0.0 {
                continue; // constant families drop out of the derivative
            }
            let lns = if side > 0 { &sp.ln_plus } else { &sp.ln_minus };
            let mut last = 0.0;
            for (k, &ln_c) in lns.iter().enumerate() {
                let nf = (k + 1) as f64;
                let t = (ln_g + 2.0 * ln_c + nf * c_p * p).exp();
                let weighted = if moment == 0 { t } else { c_p * nf * t };
                value += sign * weighted;
                scale = scale.max(weighted.abs());
                last = t;
            }
            // geometric remainder with ratio e^{-decay}
            let rho = (-decay).exp();
            if rho < 1.0 && last > 0.0 {
                let geo_sum = rho / (1.0 - rho);
                let tail = match moment {
                    0 => last * geo_sum,
                    _ => c_p * last * (n_keep as f64 * geo_sum + rho / ((1.0 - rho) * (1.0 - rho))),
                };
                value += sign * tail;
                scale = scale.max(tail.abs());
            }
        }
        (value, scale)
    }

    /// K0 at a precomputed series point (strip membership checked).
    pub fn k0_at(&self, sp: &SeriesPoint, p: f64) -> Result<f64> {
        self.check_strip_at(sp, p)?;
        Ok(self.series_families(sp, p, 0).0)
    }

    /// dK0/dp at a precomputed series point.
    pub fn dk0_dp_at(&self, sp: &SeriesPoint, p: f64) -> Result<f64> {
        self.check_strip_at(sp, p)?;
        Ok(self.series_families(sp, p, 1).0)
    }

    fn check_strip_at(&self, sp: &SeriesPoint, p: f64) -> Result<()> {
        let (lo, hi) = if self.gamma_g > 0.0 {
            let half = sp.p_less.min(sp.p_greater);
            (-half, half)
        } else {
            (-sp.p_less, sp.p_greater)
        };
        let margin = 1.0 - self.strip_margin;
        if p < lo * margin {
            return Err(Error::StripViolation { p, bound: lo, side: "lower" });
        }
        if p > hi * margin {
            return Err(Error::StripViolation { p, bound: hi, side: "upper" });
        }
        Ok(())
    }

    /// Convergence strip for the series at this occupation: symmetric
    /// min(p_<, p_>) for gamma_g > 0, asymmetric (-p_<, p_>) at strict T = 0.
    pub fn strip(&self, i: f64) -> Result<(f64, f64)> {
        let (p_lt, p_gt) = self.geo.convergence_radii(i)?;
        if self.gamma_g > 0.0 {
            let half = p_lt.min(p_gt);
            Ok((-half, half))
        } else {
            Ok((-p_lt, p_gt))
        }
    }

    fn check_strip(&self, i: f64, p: f64) -> Result<()> {
        if self.mode == Mode::Classical {
            return Ok(());
        }
        let (lo, hi) = self.strip(i)?;
        let margin = 1.0 - self.strip_margin;
        if p < lo * margin {
            return Err(Error::StripViolation { p, bound: lo, side: "lower" });
        }
        if p > hi * margin {
            return Err(Error::StripViolation { p, bound: hi, side: "upper" });
        }
        Ok(())
    }

    /// K0(I, p) in the active mode.
    pub fn k0(&self, i: f64, p: f64) -> Result<f64> {
        Ok(self.k0_scaled(i, p)?.0)
    }

    /// K0 together with the magnitude scale of the series (the sum of
    /// absolute values of its terms), which normalizes zero-residual checks.
    pub fn k0_scaled(&self, i: f64, p: f64) -> Result<(f64, f64)> {
        match self.mode {
            Mode::Classical => {
                let gamma = self.geo.noise_kernel(i)?;
                let kappa = self.geo.params().kappa;
                let drift = -2.0 * kappa * p * i;
                let diff = self.noise * gamma * p * p;
                Ok((drift + diff, drift.abs() + diff.abs()))
            }
            Mode::Quantum => {
                self.check_strip(i, p)?;
                if i == 0.0 {
                    return Ok((0.0, 0.0));
                }
                let sp = self.series_point(i)?;
                let sums = self.series_families(&sp, p, 0);
                Ok((sums.0, sums.1))
            }
        }
    }

    /// dK0/dp, the Hamilton flow of the action: d_t I = dK0/dp, which at
    /// p = 0 recovers the relaxation law d_t I = -2 kappa I.
    pub fn dk0_dp(&self, i: f64, p: f64) -> Result<f64> {
        match self.mode {
            Mode::Classical => {
                let gamma = self.geo.noise_kernel(i)?;
                let kappa = self.geo.params().kappa;
                Ok(-2.0 * kappa * i + 2.0 * self.noise * gamma * p)
            }
            Mode::Quantum => {
                self.check_strip(i, p)?;
                if i == 0.0 {
                    return Ok(0.0);
                }
                let sp = self.series_point(i)?;
                Ok(self.series_families(&sp, p, 1).0)
            }
        }
    }

    /// Integral representation of the loss/gain kernels,
    /// K_{l,g}(I, p) = int dtheta/2pi [phibar(theta +- i p/2) phi(theta -+ i p/2)
    ///                                - phibar(theta) phi(theta)],
    /// resummed from the Fourier series. Returns (K_l, K_g);
    /// K0 = gamma_l K_l + gamma_g K_g.
    pub fn k0_integral_rep(&self, i: f64, p: f64) -> Result<(f64, f64)> {
        let geo = self.geo;
        let two_pi = 2.0 * std::f64::consts::PI;
        let eval = |shift_sign: f64| -> Result<f64> {
            let f = |theta: f64| -> Result<Complex64> {
                let th_shift = Complex64::new(theta, -shift_sign * 0.5 * p);
                let shifted = geo.trajectory_at_angle(i, th_shift)?;
                let on_axis = geo.trajectory_at_angle(i, Complex64::new(theta, 0.0))?;
                Ok(Complex64::new(shifted.norm_sqr() - on_axis.norm_sqr(), 0.0))
            };
            Ok(trapezoid_periodic(f, two_pi, 1e-11, 1 << 15)?.re / two_pi)
        };
        Ok((eval(1.0)?, eval(-1.0)?))
    }

    /// Drive term K1(I, p; t). Classical: alpha p sum_n n c_n e^{-i(n theta - nu t - phi_d)} + c.c.
    /// Quantum: 2 alpha sum_n sinh(n p / 2) c_n e^{-i(n theta - nu t - phi_d)} + c.c.
    /// The angle is taken on the unperturbed flow, theta = omega(I) t.
    pub fn k1(&self, i: f64, p: f64, t: f64, drive: &DriveParams) -> Result<f64> {
        drive.validate()?;
        if drive.alpha == 0.0 {
            return Ok(0.0);
        }
        if self.mode == Mode::Quantum {
            self.check_strip(i, p)?;
        }
        let fp = self.geo.fourier_point(i)?;
        let omega = fp.omega;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=self.geo.n_max() as i32 {
            for sn in [n, -n] {
                let nf = sn as f64;
                let c_n = fp.coeff(sn);
                let phase = (-Complex64::i() * (nf * omega * t - drive.nu * t - drive.phi_d)).exp();
                match self.mode {
                    Mode::Classical => acc += drive.alpha * p * nf * c_n * phase,
                    Mode::Quantum => {
                        // sinh(n p / 2) c_n with the growing exponential
                        // absorbed into ln|c_n|
                        let ln_c = fp.ln_coeff_norm(sn);
                        let unit = c_n / c_n.norm().max(f64::MIN_POSITIVE);
                        let mag = ((0.5 * nf * p + ln_c).exp() - (-0.5 * nf * p + ln_c).exp()) / 2.0;
                        acc += 2.0 * drive.alpha * mag * unit * phase;
                    }
                }
            }
        }
        Ok(2.0 * acc.re)
    }

    /// Relative deviation of the quantum K0 from the classical K0 evaluated
    /// at the matching temperature T = omega_p n_B.
    pub fn classical_limit_residual(&self, i: f64, p: f64) -> Result<f64> {
        if self.mode != Mode::Quantum {
            return Err(Error::domain("classical_limit_residual requires quantum mode"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let n_b = self.gamma_g / (2.0 * self.geo.params().kappa);
        let t_match = self.geo.params().omega_p * n_b;
        let classical = EffectiveHamiltonian::classical(self.geo, t_match)?;
        let kq = self.k0(i, p)?;
        let kc = classical.k0(i, p)?;
        Ok((kq - kc).abs() / kc.abs().max(f64::MIN_POSITIVE))
    }
}
