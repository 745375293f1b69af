//! Activation (instanton) paths p_inst(I) on the K0 = 0 level set and the
//! phase-slip rate exponents they accumulate, for the classical, strict
//! zero-temperature, T -> 0, and finite-temperature quantum regimes.
//!
//! Every path starts at the fixed point (I = 0, p = p_*), follows the
//! nontrivial K0 = 0 line, and terminates at the saddle (I_top, 0). The rate
//! exponent is iS = -int p dI < 0.

use crate::action_angle::WellGeometry;
use crate::error::{Error, Result};
use crate::keldysh::EffectiveHamiltonian;
use crate::quad::tanh_sinh;
use crate::roots::{bisect_secant, scan_bracket};

/// Which activation mechanism generated a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Classical { temperature: f64 },
    QuantumT0,
    QuantumTto0,
    QuantumFiniteT { n_bose: f64 },
}

/// One sampled point of an instanton path.
#[derive(Debug, Clone, Copy)]
pub struct PathSample {
    pub i: f64,
    pub p: f64,
    /// |K0(I, p)| normalized by the magnitude of the series terms; NaN where
    /// the sample is tagged singular.
    pub k0_residual: f64,
}

/// A computed activation path with its accumulated rate exponent.
#[derive(Debug, Clone)]
pub struct InstantonPath {
    pub regime: Regime,
    /// ordered samples from I = 0 to I = I_top (cosine-clustered grid)
    pub samples: Vec<PathSample>,
    /// fragility action I_F (T -> 0 regime); equals I_top when the
    /// zero-temperature path never leaves the convergence strip
    pub i_fragile: Option<f64>,
    /// action at which the strict T = 0 path diverges (Delta < 0 only)
    pub i_divergent: Option<f64>,
    /// fixed-point momentum at I = 0
    pub p_star: f64,
    /// rate exponent iS_inst = -int p dI (negative)
    pub action: f64,
}

impl InstantonPath {
    /// True if the T -> 0 construction actually switched to the strip edge.
    pub fn is_fragile(&self) -> bool {
        matches!(self.regime, Regime::QuantumTto0)
            && self.i_fragile.is_some_and(|f| f < 0.999_999 * self.samples.last().map_or(f, |s| s.i))
    }
}

/// Number of intervals of the cosine-clustered sampling grid.
const PATH_GRID: usize = 400;

fn cosine_grid(i_top: f64) -> Vec<f64> {
    (0..=PATH_GRID)
        .map(|k| i_top * 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / PATH_GRID as f64).cos()))
        .collect()
}

/// Fixed-point momentum p_* at the well bottom for jump rates (gamma_l, gamma_g):
/// log of the up/down rate ratio at I -> 0.
pub fn p_star_quantum(geo: &WellGeometry, gamma_l: f64, gamma_g: f64) -> f64 {
    let se = geo.params().special_energies();
    let (wb, wm) = (se.omega_bar, se.omega_min);
    let num = wb * (gamma_l + gamma_g) + wm * (gamma_l - gamma_g);
    let den = wb * (gamma_l + gamma_g) - wm * (gamma_l - gamma_g);
    (num / den).ln()
}

/// Classical fixed point p_* = (omega_p / T)(omega_min / omega_bar).
pub fn p_star_classical(geo: &WellGeometry, temperature: f64) -> f64 {
    let se = geo.params().special_energies();
    geo.params().omega_p / temperature * se.omega_min / se.omega_bar
}

fn sample_path<F>(geo: &WellGeometry, p_of_i: F, p_star: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    let i_top = geo.i_top();
    let mut out = Vec::with_capacity(PATH_GRID + 1);
    for (k, i) in cosine_grid(i_top).into_iter().enumerate() {
        let p = if k == 0 {
            p_star
        } else if k == PATH_GRID {
            0.0 // the saddle terminates every activation path
        } else {
            p_of_i(i)?
        };
        out.push((i, p));
    }
    Ok(out)
}

fn residuals(
    eh: &EffectiveHamiltonian<'_>,
    pts: &[(f64, f64)],
) -> Vec<PathSample> {
    pts.iter()
        .map(|&(i, p)| {
            let k0_residual = if i == 0.0 || p == 0.0 {
                0.0
            } else {
                match eh.k0_scaled(i, p) {
                    Ok((v, scale)) => v.abs() / scale.max(f64::MIN_POSITIVE),
                    Err(_) => f64::NAN,
                }
            };
            PathSample { i, p, k0_residual }
        })
        .collect()
}

/// Classical activation path, defined implicitly by
/// p_inst(I) = (omega_p / T) I / Gamma(I).
pub fn classical_instanton(geo: &WellGeometry, temperature: f64) -> Result<InstantonPath> {
    let eh = EffectiveHamiltonian::classical(geo, temperature)?;
    let p_star = p_star_classical(geo, temperature);
    let ratio = geo.params().omega_p / temperature;
    let se = geo.params().special_energies();
    let tiny = 1e-10 * geo.i_top();
    let p_of_i = |i: f64| -> Result<f64> {
        if i < tiny {
            return Ok(ratio * se.omega_min / se.omega_bar);
        }
        Ok(ratio * i / geo.noise_kernel(i)?)
    };
    let pts = sample_path(geo, p_of_i, p_star)?;
    // tanh-sinh copes with the logarithmically slow flattening of p(I)
    // toward the separatrix
    let action = -tanh_sinh(&|i: f64| p_of_i(i).unwrap_or(f64::NAN), 0.0, geo.i_top(), 1e-11)?;
    Ok(InstantonPath {
        regime: Regime::Classical { temperature },
        samples: residuals(&eh, &pts),
        i_fragile: None,
        i_divergent: None,
        p_star,
        action,
    })
}

/// Strict zero-temperature quantum path, p = -2 i omega(I) t_Q(I).
/// For Delta < 0 the path diverges logarithmically at I_D; the divergence is
/// integrable and the accumulated action stays finite.
pub fn quantum_t0_instanton(geo: &WellGeometry) -> Result<InstantonPath> {
    let eh = EffectiveHamiltonian::quantum(geo, 0.0)?;
    let (gl, gg) = eh.jump_rates();
    let p_star = p_star_quantum(geo, gl, gg);
    let i_top = geo.i_top();
    let i_d = geo.i_d();
    let singular_window = i_d.map(|id| (id - 2e-3 * i_top, id + 2e-3 * i_top));

    let p_of_i = |i: f64| geo.p_zero_temperature(i);
    let mut pts = sample_path(geo, p_of_i, p_star)?;
    // tag samples inside the divergence window; they are excluded from the
    // quadrature (the integral is split around I_D instead)
    if let Some((lo, hi)) = singular_window {
        for (i, p) in pts.iter_mut() {
            if *i > lo && *i < hi {
                *p = f64::NAN;
            }
        }
    }

    let action = match i_d {
        None => {
            let f = |i: f64| p_of_i(i).unwrap_or(f64::NAN);
            -tanh_sinh(&f, 0.0, i_top, 1e-11)?
        }
        Some(id) => {
            // integrable log singularity at I_D: tanh-sinh on both sides;
            // inside a hair-width band around I_D the elliptic parameter
            // rounds onto the divergence and the (negligible-weight) nodes
            // are dropped
            let f = |i: f64| {
                if (i - id).abs() < 1e-13 * i_top {
                    return 0.0;
                }
                p_of_i(i).unwrap_or(f64::NAN)
            };
            let left = tanh_sinh(&f, 0.0, id, 1e-10)?;
            let right = tanh_sinh(&f, id, i_top, 1e-10)?;
            -(left + right)
        }
    };

    let samples: Vec<PathSample> = pts
        .iter()
        .map(|&(i, p)| {
            if p.is_nan() {
                return PathSample { i, p: f64::NAN, k0_residual: f64::NAN };
            }
            let k0_residual = if i == 0.0 || p == 0.0 {
                0.0
            } else {
                match eh.k0_scaled(i, p) {
                    Ok((v, scale)) => v.abs() / scale.max(f64::MIN_POSITIVE),
                    Err(_) => f64::NAN, // outside the strip in the fragile range
                }
            };
            PathSample { i, p, k0_residual }
        })
        .collect();

    Ok(InstantonPath {
        regime: Regime::QuantumT0,
        samples,
        i_fragile: None,
        i_divergent: i_d,
        p_star,
        action,
    })
}

/// Fragility threshold: the root of p_<(I) - p^{T=0}(I), scanned through the
/// equivalent well-conditioned form 3 Im t_P - Im t_2 / 2.
pub fn fragility_action(geo: &WellGeometry) -> Result<Option<f64>> {
    let i_top = geo.i_top();
    let h = |i: f64| -> f64 {
        match geo.char_times_of_action(i) {
            Ok(ct) => 3.0 * ct.t_p.im - 0.5 * ct.t2.im,
            Err(_) => f64::NAN,
        }
    };
    let (lo, hi) = (1e-5 * i_top, (1.0 - 1e-6) * i_top);
    match scan_bracket(&h, lo, hi, 240) {
        None => Ok(None),
        Some((a, b)) => Ok(Some(bisect_secant(&h, a, b, 1e-12 * i_top)?)),
    }
}

/// T -> 0 limit of the quantum path: the strict T = 0 path until it exits the
/// reduced convergence strip at I_F, the strip edge p_<(I) beyond.
pub fn quantum_tto0_instanton(geo: &WellGeometry) -> Result<InstantonPath> {
    let eh = EffectiveHamiltonian::quantum(geo, 0.0)?;
    let (gl, gg) = eh.jump_rates();
    let p_star = p_star_quantum(geo, gl, gg);
    let i_top = geo.i_top();
    let i_f = fragility_action(geo)?;
    let split = i_f.unwrap_or(i_top);

    let p_of_i = |i: f64| -> Result<f64> {
        if i < split {
            geo.p_zero_temperature(i)
        } else {
            Ok(geo.convergence_radii(i)?.0)
        }
    };
    let pts = sample_path(geo, p_of_i, p_star)?;
    let f = |i: f64| p_of_i(i).unwrap_or(f64::NAN);
    let action = if split < i_top {
        -(tanh_sinh(&f, 0.0, split, 1e-11)? + tanh_sinh(&f, split, i_top, 1e-11)?)
    } else {
        -tanh_sinh(&f, 0.0, i_top, 1e-11)?
    };

    Ok(InstantonPath {
        regime: Regime::QuantumTto0,
        samples: residuals(&eh, &pts),
        i_fragile: Some(split),
        i_divergent: geo.i_d(),
        p_star,
        action,
    })
}

/// Finite-temperature quantum path: at each action the unique positive root
/// of K0(I, p) = 0 inside the symmetric convergence strip.
pub fn quantum_finite_t_instanton(geo: &WellGeometry, n_bose: f64) -> Result<InstantonPath> {
    if !(n_bose > 0.0) {
        return Err(Error::validation("n_bose", "finite-temperature path requires n_B > 0"));
    }
    let eh = EffectiveHamiltonian::quantum(geo, n_bose)?;
    let (gl, gg) = eh.jump_rates();
    let p_star = p_star_quantum(geo, gl, gg);
    let i_top = geo.i_top();

    let p_of_i = |i: f64| -> Result<f64> { finite_t_root(&eh, i) };
    let pts = sample_path(geo, p_of_i, p_star)?;

    // composite Simpson on the cosine grid: I = I_top (1 - cos psi)/2,
    // int p dI = (I_top/2) int_0^pi p(psi) sin(psi) dpsi
    let h = std::f64::consts::PI / PATH_GRID as f64;
    let mut acc = 0.0;
    for (k, &(_, p)) in pts.iter().enumerate() {
        let psi = h * k as f64;
        let w = if k == 0 || k == PATH_GRID {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * p * psi.sin();
    }
    let action = -(i_top / 2.0) * acc * h / 3.0;

    Ok(InstantonPath {
        regime: Regime::QuantumFiniteT { n_bose },
        samples: residuals(&eh, &pts),
        i_fragile: None,
        i_divergent: None,
        p_star,
        action,
    })
}

/// The positive root of K0(I, .) between 0 and the strip edge; brackets with
/// the sign change between p -> 0+ (negative, relaxation-dominated) and the
/// strip edge (positive, gain-dominated).
fn finite_t_root(eh: &EffectiveHamiltonian<'_>, i: f64) -> Result<f64> {
    let sp = eh.series_point(i)?;
    let hi = sp.p_less.min(sp.p_greater);
    let lo = 1e-10;
    let hi_b = hi * (1.0 - 2e-3);
    if hi_b <= lo {
        return Err(Error::Bracket { lo, hi: hi_b });
    }
    let f = |p: f64| eh.k0_at(&sp, p).unwrap_or(f64::NAN);
    let f_lo = f(lo);
    let f_hi = f(hi_b);
    if !(f_lo < 0.0) || !(f_hi > 0.0) {
        return Err(Error::Bracket { lo, hi: hi_b });
    }
    bisect_secant(&f, lo, hi_b, 1e-13 * hi.max(1.0))
}

/// Rate exponent from an already-sampled path: trapezoid over the sample
/// grid, skipping singular-tagged points. For paths built by this module the
/// `action` field carries the higher-order quadrature value instead.
pub fn action_integral(samples: &[PathSample]) -> f64 {
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in samples {
        if s.p.is_nan() {
            continue;
        }
        if let Some((i0, p0)) = prev {
            acc += 0.5 * (p0 + s.p) * (s.i - i0);
        }
        prev = Some((s.i, s.p));
    }
    -acc
}

/// A rectangular K0 portrait plus the invariant lines and fixed points.
#[derive(Debug, Clone)]
pub struct PhasePortrait {
    pub i_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// row-major K0(i, p), NaN outside the convergence strip
    pub k0: Vec<f64>,
    pub instanton: Vec<PathSample>,
    /// strip edge p_<(I) (quantum only)
    pub p_less: Vec<(f64, f64)>,
    /// strict T = 0 path (quantum only)
    pub t0_line: Vec<(f64, f64)>,
    /// coherent-tunneling diagnostic line p = omega Im t2 (quantum only)
    pub tunneling: Vec<(f64, f64)>,
    /// (0, 0), (0, p_*), (I_top, 0)
    pub fixed_points: [(f64, f64); 3],
}

/// Evaluate K0 over a grid together with the invariant lines of the phase
/// portrait. `resolution` is the number of points per axis (>= 64).
pub fn phase_portrait(
    geo: &WellGeometry,
    regime: Regime,
    resolution: usize,
) -> Result<PhasePortrait> {
    if resolution < 64 {
        return Err(Error::validation("resolution", "portrait grid must be >= 64 per axis"));
    }
    let (eh, path) = match regime {
        Regime::Classical { temperature } => (
            EffectiveHamiltonian::classical(geo, temperature)?,
            classical_instanton(geo, temperature)?,
        ),
        Regime::QuantumT0 => (EffectiveHamiltonian::quantum(geo, 0.0)?, quantum_t0_instanton(geo)?),
        Regime::QuantumTto0 => {
            (EffectiveHamiltonian::quantum(geo, 0.0)?, quantum_tto0_instanton(geo)?)
        }
        Regime::QuantumFiniteT { n_bose } => (
            EffectiveHamiltonian::quantum(geo, n_bose)?,
            quantum_finite_t_instanton(geo, n_bose)?,
        ),
    };
    let i_top = geo.i_top();
    let p_max = 1.4
        * path
            .samples
            .iter()
            .filter(|s| !s.p.is_nan())
            .fold(path.p_star, |m, s| m.max(s.p));
    let i_grid: Vec<f64> = (0..resolution)
        .map(|k| i_top * (k as f64 + 0.5) / resolution as f64)
        .collect();
    let p_grid: Vec<f64> = (0..resolution)
        .map(|k| p_max * (k as f64 + 0.5) / resolution as f64)
        .collect();
    let quantum = !matches!(regime, Regime::Classical { .. });
    let mut k0 = Vec::with_capacity(resolution * resolution);
    for &i in &i_grid {
        for &p in &p_grid {
            let v = match eh.k0(i, p) {
                Ok(v) => v,
                Err(Error::StripViolation { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            k0.push(v);
        }
    }
    let mut p_less = Vec::new();
    let mut t0_line = Vec::new();
    let mut tunneling = Vec::new();
    if quantum {
        for &i in &i_grid {
            if let Ok((lt, _)) = geo.convergence_radii(i) {
                p_less.push((i, lt));
            }
            if let Ok(p0) = geo.p_zero_temperature(i) {
                t0_line.push((i, p0));
            }
            if let Ok(pt) = geo.p_tunneling(i) {
                tunneling.push((i, pt));
            }
        }
    }
    Ok(PhasePortrait {
        i_grid,
        p_grid,
        k0,
        instanton: path.samples.clone(),
        p_less,
        t0_line,
        tunneling,
        fixed_points: [(0.0, 0.0), (0.0, path.p_star), (i_top, 0.0)],
    })
}

/// The fragility boundary E_F as a function of Delta / 2 lambda, in the
/// scale-invariant energy unit 2 lambda^2 / g (zero where no fragility
/// occurs). Monotone increasing: deeper fragility at stronger negative
/// detuning, none at all for Delta > lambda.
pub fn fragility_boundary(detunings: &[f64]) -> Result<Vec<(f64, f64)>> {
    use crate::params::{Occupation, OscParams};
    let mut out = Vec::with_capacity(detunings.len());
    for &d in detunings {
        let p = OscParams::new(d, 0.5, 1.0, 0.01, 1.0, Occupation::Bose(0.0))?;
        let geo = WellGeometry::build(&p)?;
        let unit = 2.0 * p.lam * p.lam / p.g;
        let e_red = match fragility_action(&geo)? {
            None => 0.0,
            Some(i_f) => geo.energy_of_action(i_f)? / unit,
        };
        out.push((d, e_red));
    }
    Ok(out)
}
