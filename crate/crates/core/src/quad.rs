//! Adaptive Gauss–Kronrod integration on finite and semi-infinite ranges.

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadSpec { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        QuadSpec { abs_tol, ..self }
    }

    fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::domain(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule; abscissae in
// descending order, the last being the centre.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Convergence {
            what: format!("non-finite integrand on [{a}, {b}]"),
            estimate: f64::INFINITY,
        });
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * abs_sum;
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(round_off);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection.
pub fn integrate_finite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult> {
    spec.check()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate_finite(f, b, a, spec)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }

    let mut panels = vec![gk15(&mut f, a, b)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.target(value) {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        // Refine the panel with the largest error that can still be split.
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.b - p.a > 8.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(1e-300))
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Err(Error::Convergence {
                what: format!("interval [{a}, {b}] cannot be subdivided further"),
                estimate: error,
            });
        };
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                what: format!("subdivision limit {} reached on [{a}, {b}]", spec.max_subdivisions),
                estimate: error,
            });
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk15(&mut f, p.a, mid)?);
        panels.push(gk15(&mut f, mid, p.b)?);
        evaluations += 30;
    }
}

/// Upper bound on the number of panels [`integrate_semi_infinite`] will visit.
const MAX_PANELS: usize = 4096;

/// Integrates `f` over `[a, ∞)` for integrands that eventually decay at
/// least like `exp(-(t - a) / decay_scale)` up to polynomial factors.
///
/// The range is walked in panels of width `decay_scale`. Walking stops once
/// the panel contributions shrink geometrically and the bounded geometric
/// tail falls below the tolerance; that tail bound is folded into the
/// reported error.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    decay_scale: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    spec.check()?;
    if !(decay_scale.is_finite() && decay_scale > 0.0) {
        return Err(Error::domain(format!("decay scale must be positive, got {decay_scale}")));
    }
    if !a.is_finite() {
        return Err(Error::domain(format!("finite lower limit required, got {a}")));
    }
    let mut total: f64 = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut prev: Option<f64> = None;
    let mut small_in_a_row = 0;
    for k in 0..MAX_PANELS {
        let lo = a + k as f64 * decay_scale;
        let hi = lo + decay_scale;
        // Per-panel absolute tolerance is relative to what we already have.
        let panel_spec = QuadSpec {
            abs_tol: (spec.abs_tol * 0.1).max(spec.rel_tol * 0.1 * total.abs()),
            ..*spec
        };
        let r = integrate_finite(&mut f, lo, hi, &panel_spec)?;
        total += r.value;
        error += r.error;
        evaluations += r.evaluations;

        let mag = r.value.abs();
        let ratio = prev.map(|p| if p > 0.0 { mag / p } else { 0.0 });
        prev = Some(mag);
        if let Some(ratio) = ratio {
            if ratio < 0.9 {
                let tail = mag * ratio / (1.0 - ratio);
                if tail <= 0.1 * spec.target(total) {
                    small_in_a_row += 1;
                    if small_in_a_row >= 2 {
                        return Ok(QuadResult {
                            value: total,
                            error: error + tail,
                            evaluations,
                        });
                    }
                    continue;
                }
            }
        }
        small_in_a_row = 0;
    }
    Err(Error::Convergence {
        what: format!(
            "semi-infinite integral from {a} did not decay within {MAX_PANELS} panels of width {decay_scale}"
        ),
        estimate: prev.unwrap_or(f64::INFINITY),
    })
}
