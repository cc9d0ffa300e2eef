//! Analytic densities of Z: joint characteristic function, joint density of
//! (Re Z, Im Z) and its polar form, amplitude density, and three evaluators
//! of the phase density.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::jets::{jet_sqrt_inv_arccos, jet_var, TaylorJet};
use crate::params::{ComplexValue, ModelParams};
use crate::quad::{integrate_semi_infinite, QuadSpec};
use crate::specfun::{gamma_int, ln_bessel_i0, ln_bessel_kn, ln_factorial, LambdaCoeffs};

const LN_PI: f64 = 1.144_729_885_849_400_2;

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain(format!("radius must be finite and non-negative, got {r}")));
    }
    Ok(())
}

/// Joint characteristic function E[exp(j(ω₁ Re Z + ω₂ Im Z))].
pub fn joint_cf(params: &ModelParams, w1: f64, w2: f64) -> ComplexValue {
    let s = params.sigma_prod() * params.one_minus_mu2();
    let shift = 2.0 * params.mu_abs / s;
    let a = ComplexValue::new(w1, -shift * params.epsilon.cos());
    let b = ComplexValue::new(w2, -shift * params.epsilon.sin());
    let numerator = 4.0 / (params.sigma_prod().powi(2) * params.one_minus_mu2());
    let ratio = numerator / (a * a + b * b + 4.0 / (s * s));
    ratio.powi(params.big_l as i32)
}

/// ln of 2 / (π Γ(L) (σ_Xσ_Y)^{L+1} (1−|μ|²)), the joint-density prefactor.
fn ln_joint_prefactor(params: &ModelParams) -> f64 {
    let l = params.big_l as f64;
    LN_2 - LN_PI - ln_factorial(params.big_l - 1) - (l + 1.0) * params.sigma_prod().ln() - params.one_minus_mu2().ln()
}

/// Joint density of (Re Z, Im Z).
///
/// At the origin the density is finite for L ≥ 2 and is returned as its
/// limit; for L = 1 it diverges logarithmically and a domain error is
/// returned.
pub fn joint_pdf(params: &ModelParams, z_r: f64, z_i: f64) -> Result<f64> {
    if !(z_r.is_finite() && z_i.is_finite()) {
        return Err(Error::domain(format!("non-finite point ({z_r}, {z_i})")));
    }
    let l = params.big_l;
    let rate = params.radial_rate();
    let rho = z_r.hypot(z_i);
    if rho == 0.0 {
        if l == 1 {
            return Err(Error::domain("joint density diverges at the origin for L = 1"));
        }
        // ρ^{n}K_n(Bρ) → Γ(n)·2^{n−1}/B^{n} with n = L − 1.
        let n = l - 1;
        let ln_limit = ln_factorial(n - 1) + (n as f64 - 1.0) * LN_2 - n as f64 * rate.ln();
        return Ok((ln_joint_prefactor(params) + ln_limit).exp());
    }
    let drift = rate * params.mu_abs * (z_r * params.epsilon.cos() + z_i * params.epsilon.sin());
    let ln_f = ln_joint_prefactor(params)
        + (l as f64 - 1.0) * rho.ln()
        + drift
        + ln_bessel_kn(l - 1, rate * rho)?;
    Ok(ln_f.exp())
}

/// Joint density of amplitude and phase, r·f_Z(r cos θ, r sin θ).
pub fn joint_pdf_polar(params: &ModelParams, r: f64, theta: f64) -> Result<f64> {
    check_radius(r)?;
    let l = params.big_l;
    if r == 0.0 {
        if l == 1 {
            return Err(Error::domain("polar joint density at r = 0 is excluded for L = 1"));
        }
        return Ok(0.0);
    }
    let rate = params.radial_rate();
    let ln_f = ln_joint_prefactor(params)
        + l as f64 * r.ln()
        + rate * params.mu_abs * r * (theta - params.epsilon).cos()
        + ln_bessel_kn(l - 1, rate * r)?;
    Ok(ln_f.exp())
}

/// Density of the amplitude |Z|.
pub fn amplitude_pdf(params: &ModelParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let l = params.big_l;
    let rate = params.radial_rate();
    let ln_f = 2.0 * LN_2 + l as f64 * r.ln()
        - ln_factorial(l - 1)
        - (l as f64 + 1.0) * params.sigma_prod().ln()
        - params.one_minus_mu2().ln()
        + ln_bessel_i0(rate * params.mu_abs * r)
        + ln_bessel_kn(l - 1, rate * r)?;
    Ok(ln_f.exp())
}

/// The uncorrected amplitude density, which does not depend on σ_X, σ_Y.
/// Kept for comparison; it is not a valid density for general parameters.
pub fn amplitude_pdf_legacy(params: &ModelParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let l = params.big_l;
    let lf = l as f64;
    let ln_f = lf * params.one_minus_mu2().ln() + lf * r.ln()
        - (lf - 1.0) * LN_2
        - ln_factorial(l - 1)
        + ln_bessel_i0(params.mu_abs * r)
        + ln_bessel_kn(l - 1, r)?;
    Ok(ln_f.exp())
}

/// The uncorrected joint density of (Re Z, Im Z), written so that its
/// angular marginal is [`amplitude_pdf_legacy`].
pub fn joint_pdf_legacy(params: &ModelParams, z_r: f64, z_i: f64) -> Result<f64> {
    let rho = z_r.hypot(z_i);
    if !rho.is_finite() {
        return Err(Error::domain(format!("non-finite point ({z_r}, {z_i})")));
    }
    let l = params.big_l;
    let lf = l as f64;
    let ln_pre = lf * params.one_minus_mu2().ln() - lf * LN_2 - LN_PI - ln_factorial(l - 1);
    let drift = params.mu_abs * (z_r * params.epsilon.cos() + z_i * params.epsilon.sin());
    if rho == 0.0 {
        if l == 1 {
            return Err(Error::domain("legacy joint density diverges at the origin for L = 1"));
        }
        let n = l - 1;
        return Ok((ln_pre + ln_factorial(n - 1) + (n as f64 - 1.0) * LN_2).exp());
    }
    Ok((ln_pre + (lf - 1.0) * rho.ln() + drift + ln_bessel_kn(l - 1, rho)?).exp())
}

/// r·[`joint_pdf_legacy`] at (r cos θ, r sin θ).
pub fn joint_pdf_polar_legacy(params: &ModelParams, r: f64, theta: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(r * joint_pdf_legacy(params, r * theta.cos(), r * theta.sin())?)
}

/// Jet at c = 1 of h(c) = 1/(c − D²) + D (c − D²)^{−3/2} arccos(−D/√c).
fn h_jet(d: f64, order: usize) -> Result<TaylorJet> {
    let base = jet_var(order) + (-d * d);
    let inv = base.powf(-1.0)?;
    let weight = base.powf(-1.5)?.scale(d);
    let angle = jet_sqrt_inv_arccos(d, order)?;
    inv.try_add(&weight.try_mul(&angle)?)
}

/// Phase density, evaluated exactly through the (L−1)-th derivative of h(c)
/// at c = 1 using Taylor jets.
pub fn phase_pdf_exact(params: &ModelParams, theta: f64) -> Result<f64> {
    let k = (params.big_l - 1) as usize;
    let d = params.d_of_theta(theta);
    // (−1)^{L−1}/Γ(L) · h^{(L−1)}(1) = (−1)^{L−1} a_{L−1}
    let a_k = h_jet(d, k)?.coeffs()[k];
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let v = params.one_minus_mu2().powi(params.big_l as i32) * sign * a_k / (2.0 * PI);
    Ok(v.max(0.0))
}

/// Quadrature settings used by [`phase_pdf_quadrature`].
pub fn default_phase_quad() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-11).with_abs_tol(1e-14)
}

/// Phase density from its radial integral, evaluated by quadrature.
pub fn phase_pdf_quadrature(params: &ModelParams, theta: f64) -> Result<f64> {
    phase_pdf_quadrature_with(params, theta, &default_phase_quad())
}

pub fn phase_pdf_quadrature_with(params: &ModelParams, theta: f64, spec: &QuadSpec) -> Result<f64> {
    let l = params.big_l;
    let d = params.d_of_theta(theta);
    let decay = 1.0 - d;
    let lf = l as f64;
    // t^L e^{Dt} K_{L−1}(t) = exp(L ln t − (1 − D) t)·[e^t K_{L−1}(t)]
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        match ln_bessel_kn(l - 1, t) {
            Ok(ln_k) => (lf * t.ln() + d * t + ln_k).exp(),
            Err(_) => f64::NAN,
        }
    };
    let integral = integrate_semi_infinite(integrand, 0.0, 1.0 / decay, spec)?;
    let ln_pre = lf * params.one_minus_mu2().ln() - LN_PI - lf * LN_2 - ln_factorial(l - 1);
    Ok(ln_pre.exp() * integral.value)
}

/// Elementary-function approximation of the phase density with `t_terms`
/// expansion terms. Requires L ≥ 2. Truncation can make the value slightly
/// negative; it is returned unclamped.
pub fn phase_pdf_approx(params: &ModelParams, theta: f64, t_terms: u32) -> Result<f64> {
    if params.big_l < 2 {
        return Err(Error::domain("series phase approximation requires L ≥ 2"));
    }
    let coeffs = LambdaCoeffs::new(params.big_l - 1, t_terms)?;
    Ok(phase_approx_with(params, &coeffs, theta))
}

fn phase_approx_with(params: &ModelParams, coeffs: &LambdaCoeffs, theta: f64) -> f64 {
    let l = params.big_l;
    let one_minus_d = 1.0 - params.d_of_theta(theta);
    let sum: f64 = coeffs
        .column_sums()
        .iter()
        .enumerate()
        .map(|(q, s)| s * gamma_int(q as u32 + 2).unwrap_or(f64::INFINITY) / one_minus_d.powi(q as i32 + 2))
        .sum();
    let lf = l as f64;
    let ln_pre = lf * params.one_minus_mu2().ln() - LN_PI - lf * LN_2 - ln_factorial(l - 1);
    ln_pre.exp() * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    ExactJet,
    SeriesApprox,
    Quadrature,
}

/// A phase-density evaluator with its method-specific state precomputed.
#[derive(Debug, Clone)]
pub struct PhaseEngine {
    params: ModelParams,
    method: PhaseMethod,
    t_terms: u32,
    coeffs: Option<LambdaCoeffs>,
}

impl PhaseEngine {
    /// `t_terms` defaults to L and is only used by the series method.
    pub fn new(params: ModelParams, method: PhaseMethod, t_terms: Option<u32>) -> Result<Self> {
        let t_terms = t_terms.unwrap_or(params.big_l);
        let coeffs = match method {
            PhaseMethod::SeriesApprox => {
                if params.big_l < 2 {
                    return Err(Error::domain("series phase approximation requires L ≥ 2"));
                }
                Some(LambdaCoeffs::new(params.big_l - 1, t_terms)?)
            }
            _ => None,
        };
        Ok(PhaseEngine {
            params,
            method,
            t_terms,
            coeffs,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn method(&self) -> PhaseMethod {
        self.method
    }

    pub fn t_terms(&self) -> u32 {
        self.t_terms
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        match (self.method, &self.coeffs) {
            (PhaseMethod::ExactJet, _) => phase_pdf_exact(&self.params, theta),
            (PhaseMethod::Quadrature, _) => phase_pdf_quadrature(&self.params, theta),
            (PhaseMethod::SeriesApprox, Some(c)) => Ok(phase_approx_with(&self.params, c, theta)),
            (PhaseMethod::SeriesApprox, None) => unreachable!("series engine is built with coefficients"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfKind {
    Amplitude,
    Phase,
    JointSlice,
}

/// Which density a curve is evaluated from.
#[derive(Debug, Clone)]
pub enum Density {
    Amplitude(ModelParams),
    AmplitudeLegacy(ModelParams),
    Phase(PhaseEngine),
    /// Joint density along the line Im Z = `z_i`, as a function of Re Z.
    JointSlice { params: ModelParams, z_i: f64 },
}

impl Density {
    pub fn kind(&self) -> PdfKind {
        match self {
            Density::Amplitude(_) | Density::AmplitudeLegacy(_) => PdfKind::Amplitude,
            Density::Phase(_) => PdfKind::Phase,
            Density::JointSlice { .. } => PdfKind::JointSlice,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Density::Amplitude(p) => amplitude_pdf(p, x),
            Density::AmplitudeLegacy(p) => amplitude_pdf_legacy(p, x),
            Density::Phase(engine) => engine.eval(x),
            Density::JointSlice { params, z_i } => joint_pdf(params, x, *z_i),
        }
    }
}

/// A density tabulated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: PdfKind,
}

impl PdfCurve {
    /// Trapezoid-rule mass of the tabulated values.
    pub fn trapezoid_mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// Evaluates `density` on `grid`. Negative values (possible only from the
/// truncated series) are clamped to zero.
pub fn make_curve(density: &Density, grid: &[f64]) -> Result<PdfCurve> {
    if grid.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("grid must be strictly increasing"));
    }
    let values = grid
        .iter()
        .map(|&x| density.eval(x).map(|v| v.max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PdfCurve {
        grid: grid.to_vec(),
        values,
        kind: density.kind(),
    })
}

/// `n` equally spaced phases on the half-open interval (−π, π].
pub fn phase_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect()
}

/// `n` equally spaced amplitudes ending at `r_max`; starts at 0 for L ≥ 2 and
/// at `r_max / n` for L = 1.
pub fn amplitude_grid(params: &ModelParams, r_max: f64, n: usize) -> Vec<f64> {
    if params.big_l == 1 {
        (1..=n).map(|i| r_max * i as f64 / n as f64).collect()
    } else {
        (0..n).map(|i| r_max * i as f64 / (n - 1).max(1) as f64).collect()
    }
}

/// Exponential decay rate of the amplitude density, B(1 − |μ|).
pub fn amplitude_decay_rate(params: &ModelParams) -> f64 {
    params.radial_rate() * (1.0 - params.mu_abs)
}

/// Smallest radius (on a step grid of 1/(4·decay)) beyond which at most
/// `tail` of the amplitude mass remains.
pub fn amplitude_tail_radius(params: &ModelParams, tail: f64) -> Result<f64> {
    let step = 0.25 / amplitude_decay_rate(params);
    let spec = QuadSpec::default();
    let mut mass = 0.0;
    let mut r = 0.0;
    for _ in 0..100_000 {
        let next = r + step;
        mass += crate::quad::integrate_finite(|x| amplitude_pdf(params, x).unwrap_or(f64::NAN), r, next, &spec)?.value;
        r = next;
        if 1.0 - mass <= tail {
            return Ok(r);
        }
    }
    Err(Error::Convergence {
        what: "amplitude tail radius".into(),
        estimate: 1.0 - mass,
    })
}
