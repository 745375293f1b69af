//! Model parameters of the rotating-frame oscillator and the weak
//! spectroscopic drive, with validation and the internal rescaling to
//! dimensionless form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bath occupation, given either as a temperature (k_B = 1) or directly as
/// the Bose number n_B = 1/(exp(omega_p/T) - 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Occupation {
    Temperature(f64),
    Bose(f64),
}

/// Rotating-frame model: detuning, scaled parametric amplitude, anharmonicity,
/// decay rate, half modulation frequency, and bath occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    /// Detuning Delta (rad/time). Bistability requires |Delta| < 2 lambda.
    pub delta: f64,
    /// Scaled parametric drive amplitude lambda (rad/time), > 0.
    pub lam: f64,
    /// Scaled anharmonicity g (rad/time per action^2), > 0.
    pub g: f64,
    /// Decay rate kappa (rad/time), >= 0.
    pub kappa: f64,
    /// Half the modulation frequency, omega_p (rad/time), > 0.
    pub omega_p: f64,
    /// Bath occupation.
    pub occupation: Occupation,
}

/// Weak spectroscopic drive: amplitude, reduced frequency nu = omega_d -
/// omega_p, and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub alpha: f64,
    pub nu: f64,
    pub phi_d: f64,
}

impl DriveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::validation("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if !self.nu.is_finite() || !self.phi_d.is_finite() {
            return Err(Error::validation("nu", "nu and phi_d must be finite"));
        }
        Ok(())
    }
}

/// Derived frequency/energy scales of one well.
#[derive(Debug, Clone, Copy)]
pub struct SpecialEnergies {
    /// Bottom of the well, E_min = -(2 lambda - Delta)^2 / g.
    pub e_min: f64,
    /// Energy at which the complex period diverges, E_D = -(2 lambda + Delta)^2 / g.
    /// Inside the well (> E_min) only for Delta < 0.
    pub e_d: f64,
    /// Intrawell frequency at the bottom, omega_min = 2 sqrt(2 lambda (2 lambda - Delta)).
    pub omega_min: f64,
    /// omega_bar = 4 lambda - Delta.
    pub omega_bar: f64,
    /// Bogoliubov rotation angle beta = arctanh(Delta/omega_bar)/2.
    pub beta: f64,
    pub cosh_beta: f64,
    pub sinh_beta: f64,
}

impl OscParams {
    pub fn new(
        delta: f64,
        lam: f64,
        g: f64,
        kappa: f64,
        omega_p: f64,
        occupation: Occupation,
    ) -> Result<Self> {
        let p = OscParams { delta, lam, g, kappa, omega_p, occupation };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lam > 0.0) {
            return Err(Error::validation("lam", format!("must be > 0, got {}", self.lam)));
        }
        if !(self.g > 0.0) {
            return Err(Error::validation("g", format!("must be > 0, got {}", self.g)));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::validation("kappa", format!("must be >= 0, got {}", self.kappa)));
        }
        if !(self.omega_p > 0.0) {
            return Err(Error::validation("omega_p", format!("must be > 0, got {}", self.omega_p)));
        }
        if !(self.delta.abs() < 2.0 * self.lam) {
            return Err(Error::validation(
                "delta",
                format!("bistable regime requires |delta| < 2 lambda, got delta = {}, lambda = {}", self.delta, self.lam),
            ));
        }
        let nb = self.n_bose();
        if !(nb >= 0.0) || !nb.is_finite() {
            return Err(Error::validation("occupation", format!("n_B must be finite and >= 0, got {nb}")));
        }
        Ok(())
    }

    /// Bose occupation number of the bath at omega_p.
    pub fn n_bose(&self) -> f64 {
        match self.occupation {
            Occupation::Bose(n) => n,
            Occupation::Temperature(t) => {
                if t <= 0.0 {
                    0.0
                } else {
                    1.0 / ((self.omega_p / t).exp_m1())
                }
            }
        }
    }

    /// Temperature corresponding to the occupation (returns 0 for n_B = 0).
    pub fn temperature(&self) -> f64 {
        match self.occupation {
            Occupation::Temperature(t) => t.max(0.0),
            Occupation::Bose(n) => {
                if n <= 0.0 {
                    0.0
                } else {
                    self.omega_p / (1.0 + 1.0 / n).ln()
                }
            }
        }
    }

    /// Jump rates (gamma_loss, gamma_gain) = (2 (n_B + 1) kappa, 2 n_B kappa).
    pub fn jump_rates(&self) -> (f64, f64) {
        let nb = self.n_bose();
        (2.0 * (nb + 1.0) * self.kappa, 2.0 * nb * self.kappa)
    }

    /// Detuning in units of 2 lambda, the single shape parameter of the well.
    pub fn reduced_detuning(&self) -> f64 {
        self.delta / (2.0 * self.lam)
    }

    pub fn special_energies(&self) -> SpecialEnergies {
        let (delta, lam, g) = (self.delta, self.lam, self.g);
        let omega_bar = 4.0 * lam - delta;
        let omega_min = 2.0 * (2.0 * lam * (2.0 * lam - delta)).sqrt();
        let beta = 0.5 * (delta / omega_bar).atanh();
        // closed forms equivalent to cosh/sinh of beta via
        // omega_bar^2 - delta^2 = omega_min^2
        let cosh_beta = ((omega_bar + omega_min) / (2.0 * omega_min)).sqrt();
        let sinh_beta = delta / ((2.0 * omega_min).sqrt() * (omega_bar + omega_min).sqrt());
        SpecialEnergies {
            e_min: -(2.0 * lam - delta).powi(2) / g,
            e_d: -(2.0 * lam + delta).powi(2) / g,
            omega_min,
            omega_bar,
            beta,
            cosh_beta,
            sinh_beta,
        }
    }

    /// Rescale to the internal dimensionless model: energies in 2 lambda^2/g,
    /// time in 1/(2 lambda), action in lambda/g. The reduced system has
    /// lambda = g = 1/2 and depends on the well shape only through
    /// delta/(2 lambda).
    pub fn reduced(&self) -> (OscParams, Scales) {
        let scales = Scales::from(self);
        let reduced = OscParams {
            delta: self.reduced_detuning(),
            lam: 0.5,
            g: 0.5,
            kappa: self.kappa / (2.0 * self.lam),
            omega_p: self.omega_p,
            occupation: self.occupation,
        };
        (reduced, scales)
    }
}

/// Conversion factors between the internal dimensionless model and the
/// caller's units. `X_dim = X_reduced * scale`.
#[derive(Debug, Clone, Copy)]
pub struct Scales {
    pub energy: f64,
    pub action: f64,
    pub time: f64,
    pub frequency: f64,
    /// Field amplitude (and Fourier coefficient) scale, sqrt(lambda/g).
    pub field: f64,
    /// Logarithmic-susceptibility scale, 1/(2 sqrt(lambda g)).
    pub chi: f64,
    /// Rate-exponent scale lambda/g (the inverse effective Planck constant).
    pub exponent: f64,
}

impl Scales {
    fn from(p: &OscParams) -> Self {
        let (lam, g) = (p.lam, p.g);
        Scales {
            energy: 2.0 * lam * lam / g,
            action: lam / g,
            time: 1.0 / (2.0 * lam),
            frequency: 2.0 * lam,
            field: (lam / g).sqrt(),
            chi: 1.0 / (2.0 * (lam * g).sqrt()),
            exponent: lam / g,
        }
    }

    /// Drive amplitude in reduced units. alpha carries units of
    /// energy/sqrt(action), so alpha_reduced = alpha sqrt(g) / (2 lambda^{3/2}).
    pub fn alpha_in(&self, alpha: f64) -> f64 {
        alpha * self.field / self.energy
    }
}
