//! Canonical (I, theta) geometry of one quasi-energy well: the action map
//! I(E) and its inverse, the rotation frequency omega(I), Fourier
//! coefficients c_n(I) of the trajectory, the noise kernel Gamma(I), and the
//! convergence radii of the Fourier series.
//!
//! Tables are built once in the internal dimensionless units (energy in
//! 2 lambda^2/g, action in lambda/g, time in 1/(2 lambda)); the public
//! interface accepts and returns quantities in the caller's units.

use num_complex::Complex64;

use crate::classical::{self, CharTimes};
use crate::elliptic::ellip_k;
use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::params::{OscParams, Scales, SpecialEnergies};
use crate::quad::gauss16;

/// Tuning knobs for the geometry build.
#[derive(Debug, Clone, Copy)]
pub struct GeometryOptions {
    /// Initial Fourier truncation order; doubled until the sum rules close.
    pub n_max: usize,
    /// Chebyshev points on the main panel of the energy grid.
    pub main_points: usize,
    /// Geometric points refining the separatrix end of the grid.
    pub tail_points: usize,
    /// The grid stops at |E| = eps_sep |E_min|; the remaining sliver of
    /// action is handled by the logarithmic end form.
    pub eps_sep: f64,
    /// Sum-rule residual target for the adaptive truncation.
    pub sum_rule_tol: f64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            n_max: 64,
            main_points: 160,
            tail_points: 48,
            eps_sep: 1e-8,
            sum_rule_tol: 1e-6,
        }
    }
}

/// A slice of the Fourier table at one action: coefficients c_n for |n| <= n_max.
#[derive(Debug, Clone)]
pub struct FourierTable {
    pub n_max: usize,
    /// c[k] holds c_n with n = k - n_max.
    pub c: Vec<Complex64>,
}

/// Cached per-action data for repeated Fourier-coefficient evaluation: the
/// characteristic-time phases are computed once, after which each c_n costs
/// two complex exponentials.
#[derive(Debug, Clone, Copy)]
pub struct FourierPoint {
    /// i omega t_P and i omega t_S (reduced units)
    x_p: Complex64,
    x_s: Complex64,
    /// i omega / sqrt(lambda g) in caller units
    pref: Complex64,
    /// convergence radii (p_<, p_>)
    pub p_less: f64,
    pub p_greater: f64,
    /// rotation frequency, caller units
    pub omega: f64,
}

impl FourierPoint {
    pub fn coeff(&self, n: i32) -> Complex64 {
        let nf = n as f64;
        if n >= 0 {
            (nf * self.x_p).exp() * self.pref / (1.0 + (nf * self.x_s).exp())
        } else {
            (nf * (self.x_p - self.x_s)).exp() * self.pref / ((-nf * self.x_s).exp() + 1.0)
        }
    }

    pub fn coeff_norm_sqr(&self, n: i32) -> f64 {
        self.coeff(n).norm_sqr()
    }

    /// ln |c_n|, exact in exponent space; |c_n| itself may underflow for
    /// large |n| while terms like |c_n|^2 e^{n p} stay finite.
    pub fn ln_coeff_norm(&self, n: i32) -> f64 {
        let nf = n as f64;
        if n >= 0 {
            self.pref.norm().ln() + nf * self.x_p.re
                - (1.0 + (nf * self.x_s).exp()).norm().ln()
        } else {
            self.pref.norm().ln() + nf * (self.x_p.re - self.x_s.re)
                - ((-nf * self.x_s).exp() + 1.0).norm().ln()
        }
    }
}

impl FourierTable {
    pub fn coeff(&self, n: i32) -> Complex64 {
        let k = n + self.n_max as i32;
        if k < 0 || k as usize >= self.c.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[k as usize]
        }
    }
}

/// Immutable well geometry; all queries are read-only and thread-safe.
#[derive(Debug, Clone)]
pub struct WellGeometry {
    user: OscParams,
    red: OscParams,
    scales: Scales,
    se_red: SpecialEnergies,
    /// ascending reduced quasi-energy grid, E in (E_min, e_cut]
    grid_e: Vec<f64>,
    /// cumulative reduced action at the grid energies
    grid_i: Vec<f64>,
    seed_e_of_i: Pchip,
    /// closed-form separatrix action (reduced)
    i_top: f64,
    /// action at E_D (reduced); present only for Delta < 0
    i_d: Option<f64>,
    /// log-law coefficients near the separatrix: omega ~ a / ln(b/|E|)
    tail_a: f64,
    tail_b: f64,
    e_cut: f64,
    n_max: usize,
    sum_rule_tol: f64,
}

/// omega(E) in reduced units from the real period, 2 pi / t1(E).
fn omega_of_e_red(e: f64, red: &OscParams) -> Result<f64> {
    let m = classical::modulus(e, red);
    let s = (red.g * e.abs()).sqrt();
    let c = (2.0 / (red.lam * s)).sqrt();
    Ok(2.0 * std::f64::consts::PI / (c * ellip_k(m)?.re))
}

impl WellGeometry {
    pub fn build(params: &OscParams) -> Result<Self> {
        Self::build_with(params, GeometryOptions::default())
    }

    pub fn build_with(params: &OscParams, opts: GeometryOptions) -> Result<Self> {
        params.validate()?;
        if opts.n_max < 8 {
            return Err(Error::validation("n_max", "must be >= 8"));
        }
        let (red, scales) = params.reduced();
        let se_red = red.special_energies();
        let s0 = 2.0 * red.lam - red.delta; // depth coordinate at the bottom

        // s-grid: Chebyshev extrema on [0.1 s0, s0], geometric tail down to
        // sqrt(eps_sep) s0 (so |E| reaches eps_sep |E_min|)
        let mut svals: Vec<f64> = Vec::new();
        let n1 = opts.main_points;
        for k in 0..=n1 {
            let x = (std::f64::consts::PI * k as f64 / n1 as f64).cos(); // 1 -> -1
            svals.push(0.1 * s0 + 0.45 * s0 * (x + 1.0));
        }
        let s_end = opts.eps_sep.sqrt() * s0;
        let n2 = opts.tail_points;
        for k in 1..=n2 {
            let f = (s_end / (0.1 * s0)).ln() * k as f64 / n2 as f64;
            svals.push(0.1 * s0 * f.exp());
        }
        svals.sort_by(|a, b| b.partial_cmp(a).unwrap()); // descending s = ascending E
        svals.dedup();

        // E_D must be a grid point when Delta < 0 so that I_D is exact
        if red.delta < 0.0 {
            let s_d = 2.0 * red.lam + red.delta;
            if s_d > s_end && s_d < s0 && !svals.contains(&s_d) {
                let pos = svals.iter().position(|&s| s < s_d).unwrap_or(svals.len());
                svals.insert(pos, s_d);
            }
        }

        let mut grid_e = Vec::with_capacity(svals.len());
        let mut grid_i = Vec::with_capacity(svals.len());
        let mut grid_w = Vec::with_capacity(svals.len());
        let g = red.g;
        let mut acc = 0.0;
        let mut prev_s = s0;
        for &s in &svals {
            if s >= s0 {
                continue;
            }
            // dI = (2 s'/g) / omega ds' between consecutive nodes
            let seg = gauss16(
                |sp| {
                    let e = -sp * sp / g;
                    (2.0 * sp / g) / omega_of_e_red(e, &red).unwrap_or(f64::NAN)
                },
                s,
                prev_s,
            );
            if !seg.is_finite() {
                return Err(Error::NoConvergence("geometry action integration"));
            }
            acc += seg;
            let e = -s * s / g;
            grid_e.push(e);
            grid_i.push(acc);
            grid_w.push(omega_of_e_red(e, &red)?);
            prev_s = s;
        }

        // closed-form separatrix action: the H0 = 0 lobe encloses area
        // pi I_top, with I_top = (2/(pi g))(2 lam sqrt(1-d^2) - Delta acos d)
        let d = red.delta / (2.0 * red.lam);
        let i_top = 2.0 / (std::f64::consts::PI * g)
            * (2.0 * red.lam * (1.0 - d * d).sqrt() - red.delta * d.acos());

        // logarithmic end form omega ~ a / ln(b/|E|): fit on the last two nodes
        let (wn, wm) = (grid_w[grid_w.len() - 1], grid_w[grid_w.len() - 2]);
        let (en, em) = (grid_e[grid_e.len() - 1], grid_e[grid_e.len() - 2]);
        let a = (em.abs() / en.abs()).ln() / (1.0 / wn - 1.0 / wm);
        let b = en.abs() * (a / wn).exp();
        let e_cut = *grid_e.last().unwrap();

        // consistency: table + analytic tail must land on the closed form
        let tail = en.abs() / a * ((b / en.abs()).ln() + 1.0);
        let i_top_numeric = *grid_i.last().unwrap() + tail;
        if ((i_top_numeric - i_top) / i_top).abs() > 1e-5 {
            return Err(Error::NoConvergence("geometry separatrix closure"));
        }

        let i_d = if red.delta < 0.0 {
            let target = se_red.e_d;
            grid_e
                .iter()
                .position(|&e| (e - target).abs() < 1e-13 * target.abs())
                .map(|i| grid_i[i])
        } else {
            None
        };

        let seed_e_of_i = Pchip::new(grid_i.clone(), grid_e.clone());

        let mut geo = WellGeometry {
            user: *params,
            red,
            scales,
            se_red,
            grid_e,
            grid_i,
            seed_e_of_i,
            i_top,
            i_d,
            tail_a: a,
            tail_b: b,
            e_cut,
            n_max: opts.n_max,
            sum_rule_tol: opts.sum_rule_tol,
        };

        // adaptive truncation: double n_max until the sum rules close at the
        // worst probed actions
        let probes = [0.5 * geo.i_top, 0.9 * geo.i_top];
        loop {
            let mut worst = 0.0f64;
            for &i in &probes {
                let (r_i, r_g) = geo.sum_rule_residuals_red(i, geo.n_max)?;
                worst = worst.max(r_i).max(r_g);
            }
            if worst < opts.sum_rule_tol || geo.n_max >= 4096 {
                break;
            }
            geo.n_max *= 2;
        }
        Ok(geo)
    }

    pub fn params(&self) -> &OscParams {
        &self.user
    }

    pub fn scales(&self) -> &Scales {
        &self.scales
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Separatrix action in caller units.
    pub fn i_top(&self) -> f64 {
        self.i_top * self.scales.action
    }

    /// Action at the complex-period divergence (Delta < 0 only).
    pub fn i_d(&self) -> Option<f64> {
        self.i_d.map(|i| i * self.scales.action)
    }

    pub fn e_min(&self) -> f64 {
        self.se_red.e_min * self.scales.energy
    }

    pub fn omega_min(&self) -> f64 {
        self.se_red.omega_min * self.scales.frequency
    }

    // ----- reduced-unit internals -----

    fn i_of_e_red(&self, e: f64) -> Result<f64> {
        let e_min = self.se_red.e_min;
        if !(e >= e_min && e < 0.0) {
            return Err(Error::domain(format!("quasi-energy {e} outside [{e_min}, 0)")));
        }
        if e == e_min {
            return Ok(0.0);
        }
        if e > self.e_cut {
            // logarithmic tail: I_top - I(E) = |E|/a (ln(b/|E|) + 1)
            return Ok(self.i_top - e.abs() / self.tail_a * ((self.tail_b / e.abs()).ln() + 1.0));
        }
        let g = self.red.g;
        let s_e = (g * e.abs()).sqrt();
        let red = self.red;
        let f = |sp: f64| {
            let ee = -sp * sp / g;
            (2.0 * sp / g) / omega_of_e_red(ee, &red).unwrap_or(f64::NAN)
        };
        let idx = match self.grid_e.binary_search_by(|v| v.partial_cmp(&e).unwrap()) {
            Ok(i) => return Ok(self.grid_i[i]),
            Err(i) => i,
        };
        if idx == 0 {
            // between the bottom and the first node: integrate up from s0
            let s0 = 2.0 * red.lam - red.delta;
            return Ok(gauss16(f, s_e, s0));
        }
        let s_node = (g * self.grid_e[idx - 1].abs()).sqrt();
        Ok(self.grid_i[idx - 1] + gauss16(f, s_e, s_node))
    }

    fn e_of_i_red(&self, i: f64) -> Result<f64> {
        if !(i >= 0.0 && i < self.i_top) {
            return Err(Error::domain(format!(
                "action {i} outside [0, I_top = {})",
                self.i_top
            )));
        }
        if i == 0.0 {
            return Ok(self.se_red.e_min);
        }
        let i_cut = *self.grid_i.last().unwrap();
        if i > i_cut {
            // invert the logarithmic tail by Newton in x = |E|
            let mut x = self.e_cut.abs() * (self.i_top - i).max(1e-300) / (self.i_top - i_cut);
            for _ in 0..80 {
                let fx = self.i_top - x / self.tail_a * ((self.tail_b / x).ln() + 1.0) - i;
                let dfdx = -((self.tail_b / x).ln()) / self.tail_a;
                let step = fx / dfdx;
                x = (x - step).clamp(1e-300, self.e_cut.abs());
                if step.abs() < 1e-15 * x {
                    break;
                }
            }
            return Ok(-x);
        }
        let mut e = self
            .seed_e_of_i
            .eval(i)
            .clamp(self.se_red.e_min, self.e_cut);
        // Newton with the exact derivative dI/dE = 1/omega
        for _ in 0..40 {
            let fi = self.i_of_e_red(e)? - i;
            let w = omega_of_e_red(e, &self.red)?;
            let step = fi * w;
            e = (e - step).clamp(self.se_red.e_min, self.e_cut);
            if step.abs() < 1e-14 * self.i_top.max(e.abs()) {
                break;
            }
        }
        Ok(e)
    }

    fn char_times_red(&self, i: f64) -> Result<CharTimes> {
        if i > 0.0 && i < 1e-10 * self.i_top {
            return Ok(self.char_times_harmonic(i));
        }
        let mut e = self.e_of_i_red(i)?;
        if e <= self.se_red.e_min && i > 0.0 {
            // Newton clamped onto the bottom; the harmonic map is exact to
            // O(I^2) down here
            e = self.se_red.e_min + self.se_red.omega_min * i;
        }
        classical::char_times(e, &self.red)
    }

    /// Harmonic-limit characteristic times: t1 finite, t2 and t_P
    /// logarithmically divergent with the 1/4 prefactor ratio that leaves
    /// t_Q finite.
    fn char_times_harmonic(&self, i: f64) -> CharTimes {
        let se = &self.se_red;
        let w = se.omega_min;
        let (lam, g) = (self.red.lam, self.red.g);
        let ab = (se.sinh_beta.abs() * se.cosh_beta).max(f64::MIN_POSITIVE);
        let i_bar = w * w / (lam * g * ab);
        let i_pole = w * w / (lam * g * se.sinh_beta * se.sinh_beta).max(f64::MIN_POSITIVE);
        let t1 = 2.0 * std::f64::consts::PI / w;
        let im_t2 = 2.0 / w * (i_bar / i).ln();
        let im_tp = 0.5 / w * (i_pole / i).ln();
        let re_t2 = if self.red.delta >= 0.0 { t1 } else { 0.0 };
        let t2 = Complex64::new(re_t2, im_t2);
        let t_s = Complex64::new(0.5 * (t1 + re_t2), 0.5 * im_t2);
        let t_p = Complex64::new(0.5 * t1, im_tp);
        let t_q = Complex64::new(0.0, 0.5 * im_t2 - 2.0 * im_tp);
        CharTimes { t1, t2, t_s, t_p, t_q }
    }

    fn fourier_coeff_red(&self, ct: &CharTimes, n: i32) -> Complex64 {
        let w = ct.omega();
        let pref = Complex64::i() * w / (self.red.lam * self.red.g).sqrt();
        let nf = n as f64;
        let i = Complex64::i();
        if n >= 0 {
            // |exp(i n w t_S)| = exp(-n w Im t_S) <= 1: direct form is stable
            let num = (i * nf * w * ct.t_p).exp();
            pref * num / (1.0 + (i * nf * w * ct.t_s).exp())
        } else {
            // divide through by exp(i n w t_S) to keep exponents negative
            let num = (i * nf * w * (ct.t_p - ct.t_s)).exp();
            pref * num / ((-i * nf * w * ct.t_s).exp() + 1.0)
        }
    }

    fn sum_rule_residuals_red(&self, i: f64, n_max: usize) -> Result<(f64, f64)> {
        let ct = self.char_times_red(i)?;
        let mut sum_i = 0.0;
        let mut sum_g = 0.0;
        for n in 1..=n_max as i32 {
            let cp = self.fourier_coeff_red(&ct, n).norm_sqr();
            let cm = self.fourier_coeff_red(&ct, -n).norm_sqr();
            let nf = n as f64;
            sum_i += nf * (cp - cm);
            sum_g += nf * nf * (cp + cm);
        }
        let gamma_quad = self.gamma_quadrature_red(i)?;
        Ok(((sum_i - i).abs(), (sum_g - gamma_quad).abs()))
    }

    /// Independent route to Gamma: quadrature of |d_theta phi|^2 over a period.
    pub(crate) fn gamma_quadrature_red(&self, i: f64) -> Result<f64> {
        let e = self.e_of_i_red(i)?;
        let red = self.red;
        let ct = classical::char_times(e, &red)?;
        let w = ct.omega();
        let n = 512;
        let mut acc = 0.0;
        for k in 0..n {
            let t = Complex64::new(ct.t1 * k as f64 / n as f64, 0.0);
            let phi = classical::classical_solution(t, e, &red)?;
            let v = classical::classical_velocity(phi.conj(), phi, &red);
            acc += v.norm_sqr();
        }
        // d_theta phi = (1/omega) d_t phi
        Ok(acc / n as f64 / (w * w))
    }

    // ----- public, caller units -----

    /// I(E), the action enclosed at quasi-energy E.
    pub fn action_of_energy(&self, e: f64) -> Result<f64> {
        Ok(self.i_of_e_red(e / self.scales.energy)? * self.scales.action)
    }

    /// E(I), inverse of the action map.
    pub fn energy_of_action(&self, i: f64) -> Result<f64> {
        Ok(self.e_of_i_red(i / self.scales.action)? * self.scales.energy)
    }

    /// omega(I) = dE/dI, strictly decreasing from omega_min to 0.
    pub fn omega_of_action(&self, i: f64) -> Result<f64> {
        let e = self.e_of_i_red(i / self.scales.action)?;
        Ok(omega_of_e_red(e, &self.red)? * self.scales.frequency)
    }

    /// d omega / d I, finite at the bottom, divergent toward the separatrix.
    pub fn domega_di(&self, i: f64) -> Result<f64> {
        let i_red = i / self.scales.action;
        let scale = self.scales.frequency / self.scales.action;
        if i_red < 1e-9 * self.i_top {
            let (lam, delta, g) = (self.red.lam, self.red.delta, self.red.g);
            return Ok(-g * (8.0 * lam - delta) / (4.0 * (2.0 * lam - delta)) * scale);
        }
        let e = self.e_of_i_red(i_red)?;
        let w = omega_of_e_red(e, &self.red)?;
        // Richardson-extrapolated central difference in E; dI = dE/omega
        let room = (e - self.se_red.e_min).min(e.abs()).abs();
        let h = (1e-6 * self.se_red.e_min.abs()).min(0.25 * room).max(1e-13);
        let diff = |h: f64| -> Result<f64> {
            let wp = omega_of_e_red(e + h, &self.red)?;
            let wm = omega_of_e_red(e - h, &self.red)?;
            Ok((wp - wm) / (2.0 * h))
        };
        let d1 = diff(h)?;
        let d2 = diff(0.5 * h)?;
        let dwde = (4.0 * d2 - d1) / 3.0;
        Ok(dwde * w * scale)
    }

    /// Characteristic times at action I, in caller units.
    pub fn char_times_of_action(&self, i: f64) -> Result<CharTimes> {
        let ct = self.char_times_red(i / self.scales.action)?;
        let s = self.scales.time;
        Ok(CharTimes {
            t1: ct.t1 * s,
            t2: ct.t2 * s,
            t_s: ct.t_s * s,
            t_p: ct.t_p * s,
            t_q: ct.t_q * s,
        })
    }

    /// Fourier coefficient c_n(I) of the trajectory.
    pub fn fourier_coeff(&self, i: f64, n: i32) -> Result<Complex64> {
        let ct = self.char_times_red(i / self.scales.action)?;
        Ok(self.fourier_coeff_red(&ct, n) * self.scales.field)
    }

    /// Precompute the characteristic-time phases at one action so that
    /// repeated c_n evaluations cost two exponentials each.
    pub fn fourier_point(&self, i: f64) -> Result<FourierPoint> {
        let ct = self.char_times_red(i / self.scales.action)?;
        let w = ct.omega();
        Ok(FourierPoint {
            x_p: Complex64::i() * w * ct.t_p,
            x_s: Complex64::i() * w * ct.t_s,
            pref: Complex64::i() * w / (self.red.lam * self.red.g).sqrt() * self.scales.field,
            p_less: 2.0 * w * ct.t_p.im,
            p_greater: 2.0 * w * (ct.t_s.im - ct.t_p.im),
            omega: w * self.scales.frequency,
        })
    }

    /// Fourier coefficients for |n| <= n_max, with the sum rules enforced.
    pub fn fourier_coeffs(&self, i: f64, n_max: usize) -> Result<FourierTable> {
        if n_max < 8 {
            return Err(Error::validation("n_max", "must be >= 8"));
        }
        let i_red = i / self.scales.action;
        if !(i_red > 0.0 && i_red < self.i_top) {
            return Err(Error::domain(format!("action {i} outside (0, I_top)")));
        }
        let (r_i, r_g) = self.sum_rule_residuals_red(i_red, n_max)?;
        if r_i > self.sum_rule_tol || r_g > self.sum_rule_tol {
            return Err(Error::Truncation { residual: r_i.max(r_g), n_max });
        }
        let ct = self.char_times_red(i_red)?;
        let c = (-(n_max as i32)..=n_max as i32)
            .map(|n| self.fourier_coeff_red(&ct, n) * self.scales.field)
            .collect();
        Ok(FourierTable { n_max, c })
    }

    /// Noise kernel Gamma(I) = sum_n n^2 |c_n|^2.
    pub fn noise_kernel(&self, i: f64) -> Result<f64> {
        let i_red = i / self.scales.action;
        if i_red == 0.0 {
            return Ok(0.0);
        }
        let ct = self.char_times_red(i_red)?;
        let mut acc = 0.0;
        let mut n: i32 = 1;
        loop {
            let nf = n as f64;
            let term = nf * nf
                * (self.fourier_coeff_red(&ct, n).norm_sqr()
                    + self.fourier_coeff_red(&ct, -n).norm_sqr());
            acc += term;
            if n as usize >= self.n_max && term < 1e-16 * acc.max(1e-300) {
                break;
            }
            if n >= 8192 {
                return Err(Error::Truncation { residual: term, n_max: 8192 });
            }
            n += 1;
        }
        Ok(acc * self.scales.action)
    }

    /// Sum-rule residuals (|sum n |c_n|^2 - I|, |sum n^2 |c_n|^2 - Gamma_quad|)
    /// in reduced units, at the geometry's adaptive truncation order.
    pub fn sum_rule_residuals(&self, i: f64) -> Result<(f64, f64)> {
        self.sum_rule_residuals_red(i / self.scales.action, self.n_max)
    }

    /// Convergence radii (p_<, p_>) = 2 omega (Im t_P, Im(t_S - t_P)) of the
    /// Fourier series in the auxiliary momentum; dimensionless.
    pub fn convergence_radii(&self, i: f64) -> Result<(f64, f64)> {
        let ct = self.char_times_red(i / self.scales.action)?;
        let w = ct.omega();
        Ok((2.0 * w * ct.t_p.im, 2.0 * w * (ct.t_s.im - ct.t_p.im)))
    }

    /// The zero-temperature instanton value p = -2 i omega t_Q (real, >= 0).
    pub fn p_zero_temperature(&self, i: f64) -> Result<f64> {
        let ct = self.char_times_red(i / self.scales.action)?;
        Ok(2.0 * ct.omega() * ct.t_q.im)
    }

    /// The coherent-tunneling line p = omega Im(t2); reported as a
    /// diagnostic, never used for rates.
    pub fn p_tunneling(&self, i: f64) -> Result<f64> {
        let ct = self.char_times_red(i / self.scales.action)?;
        Ok(ct.omega() * ct.t2.im)
    }

    /// The intrawell trajectory evaluated at (complex) angle theta, caller units.
    pub fn trajectory_at_angle(&self, i: f64, theta: Complex64) -> Result<Complex64> {
        let i_red = i / self.scales.action;
        let e = self.e_of_i_red(i_red)?;
        let ct = classical::char_times(e, &self.red)?;
        let t = theta / ct.omega();
        Ok(classical::classical_solution(t, e, &self.red)? * self.scales.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Occupation;

    fn geometry(delta: f64) -> WellGeometry {
        let p = OscParams::new(delta, 0.5, 1.0, 0.01, 1.0, Occupation::Bose(0.0)).unwrap();
        WellGeometry::build(&p).unwrap()
    }

    #[test]
    fn action_vanishes_at_bottom() {
        let geo = geometry(0.3);
        let e_min = geo.e_min();
        assert_eq!(geo.action_of_energy(e_min).unwrap(), 0.0);
        // near the bottom, I ~ (E - E_min)/omega_min
        let de = 1e-6;
        let i = geo.action_of_energy(e_min + de).unwrap();
        assert!((i - de / geo.omega_min()).abs() < 1e-9, "{i}");
    }

    #[test]
    fn action_dual_quadrature_oracle() {
        // dE/omega route (implementation) vs the loop-integral route
        // I = int_0^{t1} dt/(2 pi) phibar i d_t phi (independent oracle)
        let geo = geometry(0.3);
        let p = *geo.params();
        let e = geo.e_min() / 2.0;
        let i_impl = geo.action_of_energy(e).unwrap();

        let ct = classical::char_times(e, &p).unwrap();
        let n = 4096;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let t = Complex64::new(ct.t1 * k as f64 / n as f64, 0.0);
            let phi = classical::classical_solution(t, e, &p).unwrap();
            let v = classical::classical_velocity(phi.conj(), phi, &p);
            acc += phi.conj() * Complex64::i() * v;
        }
        let i_loop = (acc * ct.t1 / n as f64 / (2.0 * std::f64::consts::PI)).re;
        assert!(
            (i_impl - i_loop).abs() < 1e-8,
            "dE/omega {i_impl} vs loop {i_loop}"
        );
    }

    #[test]
    fn energy_action_round_trip() {
        let geo = geometry(0.3);
        for f in [1e-6, 1e-3, 0.1, 0.5, 0.9, 0.99, 0.99999] {
            let i = f * geo.i_top();
            let e = geo.energy_of_action(i).unwrap();
            let i2 = geo.action_of_energy(e).unwrap();
            assert!(
                (i - i2).abs() < 1e-11 * geo.i_top(),
                "f = {f}: {i} -> {e} -> {i2}"
            );
        }
    }

    #[test]
    fn monotonicity_of_maps() {
        for delta in [0.3, -0.4] {
            let geo = geometry(delta);
            let mut prev_e = geo.e_min();
            let mut prev_w = f64::INFINITY;
            for k in 1..200 {
                let i = geo.i_top() * k as f64 / 200.0;
                let e = geo.energy_of_action(i).unwrap();
                let w = geo.omega_of_action(i).unwrap();
                assert!(e > prev_e, "E(I) must increase");
                assert!(w < prev_w, "omega(I) must decrease");
                prev_e = e;
                prev_w = w;
            }
        }
    }

    #[test]
    fn omega_limits() {
        let geo = geometry(0.3);
        // omega(0) = omega_min = 1.67332...
        let w0 = geo.omega_of_action(0.0).unwrap();
        assert!((w0 - geo.omega_min()).abs() < 1e-10);
        assert!((w0 - 1.6733200530681511).abs() < 1e-12);
        // omega(I) equals 2 pi / t1(E(I)) at 50 grid points (definition)
        for k in 1..=50 {
            let i = geo.i_top() * k as f64 / 51.0;
            let w = geo.omega_of_action(i).unwrap();
            let ct = geo.char_times_of_action(i).unwrap();
            assert!(
                (w - 2.0 * std::f64::consts::PI / ct.t1).abs() < 1e-9 * w,
                "k {k}"
            );
        }
        // omega -> 0 at the top
        let w_top = geo.omega_of_action(0.999999 * geo.i_top()).unwrap();
        assert!(w_top < 0.3 * geo.omega_min());
    }

    #[test]
    fn domega_di_at_zero_matches_finite_difference() {
        let geo = geometry(0.3);
        // closed form -g (8 lam - Delta) / (4 (2 lam - Delta)) = -1.3214285...
        let d0 = geo.domega_di(0.0).unwrap();
        assert!((d0 + 1.3214285714285714).abs() < 1e-12, "{d0}");
        // finite-difference oracle on omega(I)
        let h = 1e-5 * geo.i_top();
        let fd = (geo.omega_of_action(2.0 * h).unwrap() - geo.omega_of_action(h).unwrap()) / h;
        assert!((d0 - fd).abs() < 2e-3, "{d0} vs {fd}");
        // interior point: Richardson value vs plain central difference
        let i = 0.4 * geo.i_top();
        let di = geo.domega_di(i).unwrap();
        let fd2 = (geo.omega_of_action(i + h).unwrap() - geo.omega_of_action(i - h).unwrap())
            / (2.0 * h);
        assert!((di - fd2).abs() < 1e-5 * di.abs(), "{di} vs {fd2}");
    }

    #[test]
    fn fourier_coeffs_match_quadrature_oracle() {
        // c_n from the closed form vs direct theta-quadrature of
        // e^{i n theta} phi(theta; I) at I = 0.1, lambda=0.5, Delta=0.3, g=1
        let geo = geometry(0.3);
        let i = 0.1;
        let nq = 2048;
        for n in [-4i32, -1, 0, 1, 2, 5] {
            let closed = geo.fourier_coeff(i, n).unwrap();
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..nq {
                let th = 2.0 * std::f64::consts::PI * k as f64 / nq as f64;
                let phi = geo.trajectory_at_angle(i, Complex64::new(th, 0.0)).unwrap();
                acc += (Complex64::i() * n as f64 * th).exp() * phi;
            }
            let quad = acc / nq as f64;
            assert!(
                (closed - quad).norm() < 1e-8,
                "n = {n}: closed {closed} vs quad {quad}"
            );
        }
    }

    #[test]
    fn fourier_small_action_limits() {
        // c_1 -> cosh(beta) sqrt(I), c_{-1} -> sinh(beta) sqrt(I)
        let geo = geometry(0.3);
        let se = geo.params().special_energies();
        let i = 1e-7;
        let c1 = geo.fourier_coeff(i, 1).unwrap().norm();
        let cm1 = geo.fourier_coeff(i, -1).unwrap().norm();
        assert!((c1 / i.sqrt() - se.cosh_beta).abs() < 1e-3, "{}", c1 / i.sqrt());
        assert!((cm1 / i.sqrt() - se.sinh_beta).abs() < 1e-3, "{}", cm1 / i.sqrt());
    }

    #[test]
    fn sum_rules_close_at_default_truncation() {
        for delta in [-0.6, -0.4, 0.3, 0.6] {
            let geo = geometry(delta);
            for f in [0.1, 0.5, 0.9] {
                let (r_i, r_g) = geo.sum_rule_residuals(f * geo.i_top()).unwrap();
                assert!(
                    r_i < 1e-6 && r_g < 1e-6,
                    "delta {delta}, f {f}: residuals {r_i} {r_g}"
                );
            }
        }
    }

    #[test]
    fn truncation_error_reported_for_tiny_n_max() {
        let geo = geometry(0.3);
        match geo.fourier_coeffs(0.9 * geo.i_top(), 8) {
            Err(Error::Truncation { n_max: 8, .. }) => {}
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn noise_kernel_limits() {
        let geo = geometry(0.3);
        assert_eq!(geo.noise_kernel(0.0).unwrap(), 0.0);
        // slope at zero: omega_bar / omega_min = 1.01594...
        let i = 1e-6;
        let slope = geo.noise_kernel(i).unwrap() / i;
        let se = geo.params().special_energies();
        let expect = se.omega_bar / se.omega_min;
        assert!((slope - expect).abs() < 1e-4, "{slope} vs {expect}");
        assert!((expect - 1.0159443179342345).abs() < 1e-12);
        // quadrature oracle agreement at finite I
        let i = 0.4 * geo.i_top();
        let series = geo.noise_kernel(i).unwrap();
        let quad = geo.gamma_quadrature_red(i / geo.scales.action).unwrap() * geo.scales.action;
        assert!((series - quad).abs() < 1e-8, "{series} vs {quad}");
    }

    #[test]
    fn convergence_radii_match_coefficient_decay() {
        // fitted decay exponent of |c_n| over n in [16, 48] equals p/2 per
        // unit n, for both signs of n (log-linear fit oracle)
        let geo = geometry(0.3);
        let i = 0.5 * geo.i_top();
        let (p_lt, p_gt) = geo.convergence_radii(i).unwrap();
        let fit = |sign: i32| -> f64 {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for n in 16..=48 {
                let c = geo.fourier_coeff(i, sign * n).unwrap().norm();
                xs.push(n as f64);
                ys.push(c.ln());
            }
            let n = xs.len() as f64;
            let sx: f64 = xs.iter().sum();
            let sy: f64 = ys.iter().sum();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
            -(n * sxy - sx * sy) / (n * sxx - sx * sx)
        };
        let decay_pos = fit(1);
        let decay_neg = fit(-1);
        assert!(
            (decay_pos - 0.5 * p_lt).abs() < 0.02 * 0.5 * p_lt,
            "{decay_pos} vs {}",
            0.5 * p_lt
        );
        assert!(
            (decay_neg - 0.5 * p_gt).abs() < 0.02 * 0.5 * p_gt,
            "{decay_neg} vs {}",
            0.5 * p_gt
        );
        assert!(p_lt < p_gt, "p_< is the smaller radius");
    }

    #[test]
    fn radii_smooth_for_positive_detuning() {
        let geo = geometry(0.3);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..200 {
            let i = geo.i_top() * k as f64 / 200.0;
            let (a, b) = geo.convergence_radii(i).unwrap();
            assert!(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0);
            if let Some((pa, pb)) = prev {
                // p_< grows logarithmically toward I = 0; demand continuity
                // relative to the local magnitude
                assert!(
                    (a - pa).abs() < 0.25 * pa.max(0.3) && (b - pb).abs() < 0.25 * pb.max(0.3),
                    "jump at k {k}: ({pa},{pb}) -> ({a},{b})"
                );
            }
            prev = Some((a, b));
        }
    }

    #[test]
    fn negative_harmonics_vanish_at_i_d() {
        // Delta < 0: c_n(I_D) = 0 for n < 0 (within grid tolerance)
        let geo = geometry(-0.4);
        let i_d = geo.i_d().expect("I_D exists for Delta < 0");
        assert!(i_d > 0.0 && i_d < geo.i_top());
        let eps = 1e-3 * geo.i_top();
        let at = |i: f64| geo.fourier_coeff(i, -1).unwrap().norm();
        let below = at(i_d - eps);
        let above = at(i_d + eps);
        let near = at(i_d - 1e-7 * geo.i_top());
        assert!(
            near < 0.05 * below.max(above),
            "near {near}, below {below}, above {above}"
        );
    }

    #[test]
    fn scaling_covariance_reduced_well() {
        // two parameter sets with equal Delta/2 lambda give identical reduced
        // I(E); public values scale by lambda/g
        let p1 = OscParams::new(0.3, 0.5, 1.0, 0.01, 1.0, Occupation::Bose(0.0)).unwrap();
        let p2 = OscParams::new(1.8, 3.0, 2.0, 0.06, 1.0, Occupation::Bose(0.0)).unwrap();
        let g1 = WellGeometry::build(&p1).unwrap();
        let g2 = WellGeometry::build(&p2).unwrap();
        let r1 = g1.i_top() / (p1.lam / p1.g);
        let r2 = g2.i_top() / (p2.lam / p2.g);
        assert!((r1 - r2).abs() < 1e-12);
        for f in [0.2, 0.7] {
            let e1 = g1.energy_of_action(f * g1.i_top()).unwrap() / (2.0 * p1.lam * p1.lam / p1.g);
            let e2 = g2.energy_of_action(f * g2.i_top()).unwrap() / (2.0 * p2.lam * p2.lam / p2.g);
            assert!((e1 - e2).abs() < 1e-9, "f {f}: {e1} vs {e2}");
        }
    }
}
