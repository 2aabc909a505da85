//! The spectral cut-off estimator
//!
//! ```text
//! θ̂_k = (1/2π) ∫_{-k}^{k} Ψ(-t) M̂_c(t) / M_c[g](t) dt,   M̂_c(t) = n⁻¹ Σ Y_j^{c-1+it}
//! ```
//!
//! together with the variance proxy `Δ_{Ψ,g}(k)` and the two risk bounds.

use crate::error::{Error, Result};
use crate::functionals::{regime_classify, FunctionalSpec, PsiDecay, Regime};
use crate::mellin::{decay_class_g, DecayShape, ErrorModel};
use crate::quadrature::{integrate_line, integrate_real, pairwise_sum, Tolerance};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

/// Observations with `|ln Y|` beyond this are rejected.
pub const MAX_ABS_LOG: f64 = 700.0;

/// An i.i.d. sample `Y_1, …, Y_n`, stored in ascending order so that every
/// statistic computed from it is exactly permutation invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("sample is empty"));
        }
        for (i, &y) in values.iter().enumerate() {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::input(format!("observation {} is not a positive finite number: {y}", i + 1)));
            }
            if y.ln().abs() > MAX_ABS_LOG {
                return Err(Error::input(format!("observation {} = {y} is outside the representable scale", i + 1)));
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_log(&self) -> f64 {
        self.values.iter().map(|y| y.ln().abs()).fold(0.0, f64::max)
    }

    /// `n⁻¹ Σ Y_j^r`.
    pub fn moment(&self, r: f64) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|y| y.powf(r)).collect();
        pairwise_sum(&terms) / self.n() as f64
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.values
    }
}

/// `M̂_c(t) = n⁻¹ Σ Y_j^{c-1} (cos(t ln Y_j) + i sin(t ln Y_j))`.
pub fn empirical_mellin(sample: &Sample, c: f64, t: f64) -> Complex64 {
    let (re, im): (Vec<f64>, Vec<f64>) = sample
        .values
        .iter()
        .map(|&y| {
            let w = y.powf(c - 1.0);
            let (s, co) = (t * y.ln()).sin_cos();
            (w * co, w * s)
        })
        .unzip();
    let n = sample.n() as f64;
    Complex64::new(pairwise_sum(&re) / n, pairwise_sum(&im) / n)
}

/// Upper bound on the `t`-grid step for a given sample.
pub fn grid_step_bound(sample: &Sample) -> f64 {
    let l = sample.max_abs_log();
    if l > 0.0 {
        (PI / (8.0 * l)).min(0.05)
    } else {
        0.05
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest `t`-step used.
    pub grid_step: f64,
    pub grid_points: usize,
    /// Richardson estimate of the Simpson error, scaled like `θ̂`.
    pub quadrature_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub theta_hat: f64,
    pub k: f64,
    pub delta_k: f64,
    pub regime: Regime,
    pub n: usize,
    pub diagnostics: Diagnostics,
}

/// `θ̂_k` at several nested cut-offs from one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffPath {
    pub ks: Vec<f64>,
    pub theta: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// The cut-off estimator for a fixed functional, error model and `c`.
#[derive(Debug, Clone)]
pub struct CutoffEstimator {
    spec: FunctionalSpec,
    model: ErrorModel,
    c: f64,
}

const REANCHOR: usize = 32;

impl CutoffEstimator {
    pub fn new(spec: FunctionalSpec, model: ErrorModel, c: f64) -> Result<Self> {
        model.validate()?;
        spec.check_c(c)?;
        model.check_c(c)?;
        Ok(Self { spec, model, c })
    }

    pub fn spec(&self) -> &FunctionalSpec {
        &self.spec
    }

    pub fn model(&self) -> &ErrorModel {
        &self.model
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `Ψ(-t) / M_c[g](t)`.
    fn weight(&self, t: f64) -> Complex64 {
        (self.spec.ln_psi_unchecked(self.c, -t) - self.model.ln_mellin_unchecked(self.c, t)).exp()
    }

    pub fn estimate(&self, sample: &Sample, k: f64) -> Result<f64> {
        Ok(self.path(sample, &[k])?.theta[0])
    }

    /// `θ̂_k` for every `k` in the nondecreasing list `ks`.
    ///
    /// `θ̂_k = π⁻¹ ∫_0^k Re(Ψ(-t) M̂_c(t)/M_c[g](t)) dt` by composite
    /// Simpson on a uniform grid per segment `[k_{i-1}, k_i]`.
    pub fn path(&self, sample: &Sample, ks: &[f64]) -> Result<CutoffPath> {
        check_cutoffs(ks)?;
        let hmax = grid_step_bound(sample);

        // segments: (start, step, intervals)
        let mut segments = Vec::with_capacity(ks.len());
        let mut prev = 0.0;
        let mut total = 0usize;
        let mut step = 0.0f64;
        for &k in ks {
            let len = k - prev;
            if len > 0.0 {
                let m = ((len / hmax).ceil() as usize).div_ceil(4).max(1) * 4;
                let h = len / m as f64;
                step = step.max(h);
                segments.push((prev, h, m));
                total += m + 1;
            } else {
                segments.push((prev, 0.0, 0));
            }
            prev = k;
        }

        let mut acc = vec![Complex64::new(0.0, 0.0); total];
        for &y in &sample.values {
            let w = y.powf(self.c - 1.0);
            let l = y.ln();
            let mut offset = 0;
            for &(t0, h, m) in &segments {
                if m == 0 {
                    continue;
                }
                let rot = Complex64::cis(h * l);
                let mut z = Complex64::cis(t0 * l);
                for (q, slot) in acc[offset..=offset + m].iter_mut().enumerate() {
                    if q > 0 && q % REANCHOR == 0 {
                        z = Complex64::cis((t0 + q as f64 * h) * l);
                    }
                    *slot += w * z;
                    z *= rot;
                }
                offset += m + 1;
            }
        }

        let n = sample.n() as f64;
        let mut theta = Vec::with_capacity(ks.len());
        let mut cumulative = 0.0;
        let mut err = 0.0;
        let mut offset = 0;
        for &(t0, h, m) in &segments {
            if m > 0 {
                let f: Vec<f64> = (0..=m)
                    .map(|q| (self.weight(t0 + q as f64 * h) * acc[offset + q]).re / n)
                    .collect();
                let (fine, coarse) = simpson_pair(&f, h);
                cumulative += fine;
                err += (fine - coarse).abs() / 15.0;
                offset += m + 1;
            }
            theta.push(cumulative / PI);
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature {
                estimate: cumulative / PI,
                error_bound: f64::INFINITY,
            });
        }
        Ok(CutoffPath {
            ks: ks.to_vec(),
            theta,
            diagnostics: Diagnostics {
                grid_step: step,
                grid_points: total,
                quadrature_error: err / PI,
                elapsed_seconds: None,
            },
        })
    }

    pub fn regime(&self) -> Result<Regime> {
        regime_of(&self.spec, &self.model, self.c)
    }
}

fn check_cutoffs(ks: &[f64]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::input("no cut-off given"));
    }
    let mut prev = 0.0;
    for &k in ks {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::input(format!("cut-off k must be positive and finite, got {k}")));
        }
        if k < prev {
            return Err(Error::input("cut-offs must be nondecreasing"));
        }
        prev = k;
    }
    Ok(())
}

/// Simpson sums with step `h` and `2h`; `f.len() - 1` must be a multiple of 4.
fn simpson_pair(f: &[f64], h: f64) -> (f64, f64) {
    let m = f.len() - 1;
    let mut fine = f[0] + f[m];
    for (q, v) in f.iter().enumerate().take(m).skip(1) {
        fine += if q % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut coarse = f[0] + f[m];
    for q in (2..m).step_by(2) {
        coarse += if (q / 2) % 2 == 1 { 4.0 * f[q] } else { 2.0 * f[q] };
    }
    (fine * h / 3.0, coarse * 2.0 * h / 3.0)
}

pub fn regime_of(spec: &FunctionalSpec, model: &ErrorModel, c: f64) -> Result<Regime> {
    let g = decay_class_g(model, c)?;
    Ok(regime_classify(&spec.decay(c), &g.shape))
}

/// `θ̂_k` with `Δ(k)`, regime and timing.
pub fn theta_hat(sample: &Sample, spec: &FunctionalSpec, model: &ErrorModel, c: f64, k: f64) -> Result<EstimateReport> {
    let start = Instant::now();
    let est = CutoffEstimator::new(spec.clone(), *model, c)?;
    let path = est.path(sample, &[k])?;
    let delta_k = delta_psi_g(spec, model, c, k)?;
    let mut diagnostics = path.diagnostics;
    diagnostics.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    Ok(EstimateReport {
        theta_hat: path.theta[0],
        k,
        delta_k,
        regime: est.regime()?,
        n: sample.n(),
        diagnostics,
    })
}

fn check_pair(spec: &FunctionalSpec, model: &ErrorModel, c: f64) -> Result<()> {
    model.validate()?;
    spec.check_c(c)?;
    model.check_c(c)
}

/// `Δ_{Ψ,g}(k) = (1/2π) ∫_{-k}^{k} |Ψ(t)/M_c[g](t)|² dt`.
pub fn delta_psi_g(spec: &FunctionalSpec, model: &ErrorModel, c: f64, k: f64) -> Result<f64> {
    if k == 0.0 {
        check_pair(spec, model, c)?;
        return Ok(0.0);
    }
    Ok(delta_psi_g_many(spec, model, c, &[k])?[0])
}

/// `Δ` at each of the nondecreasing cut-offs `ks`, accumulated over unit
/// pieces so the values are monotone.
pub fn delta_psi_g_many(spec: &FunctionalSpec, model: &ErrorModel, c: f64, ks: &[f64]) -> Result<Vec<f64>> {
    check_pair(spec, model, c)?;
    let mut prev = 0.0;
    for &k in ks {
        if !(k >= 0.0 && k.is_finite()) || k < prev {
            return Err(Error::input(format!("cut-offs must be finite, nonnegative and nondecreasing, got {k}")));
        }
        prev = k;
    }
    let f = |t: f64| (2.0 * (spec.ln_psi_unchecked(c, t) - model.ln_mellin_unchecked(c, t)).re).exp() / PI;
    let tol = Tolerance::new(1e-300, 1e-12);
    let mut out = Vec::with_capacity(ks.len());
    let mut at = 0.0f64;
    let mut acc = 0.0;
    for &k in ks {
        while at.floor() + 1.0 <= k {
            let next = at.floor() + 1.0;
            acc += integrate_real(f, at, next, tol)?.0;
            at = next;
        }
        let partial = if k > at { integrate_real(f, at, k, tol)?.0 } else { 0.0 };
        out.push(acc + partial);
    }
    Ok(out)
}

/// `Δ(1), Δ(2), …` up to `kmax`, stopping before the first value above
/// `limit`. Bitwise equal to [`delta_psi_g`] at the same integers.
pub(crate) fn delta_unit_steps(
    spec: &FunctionalSpec,
    model: &ErrorModel,
    c: f64,
    kmax: u32,
    limit: f64,
) -> Result<Vec<f64>> {
    check_pair(spec, model, c)?;
    let f = |t: f64| (2.0 * (spec.ln_psi_unchecked(c, t) - model.ln_mellin_unchecked(c, t)).re).exp() / PI;
    let tol = Tolerance::new(1e-300, 1e-12);
    let mut out = Vec::new();
    let mut acc = 0.0;
    for k in 1..=kmax {
        acc += integrate_real(f, (k - 1) as f64, k as f64, tol)?.0;
        // `acc + 0.0` mirrors the partial piece added in `delta_psi_g_many`
        let v = acc + 0.0;
        if v > limit {
            break;
        }
        out.push(v);
    }
    Ok(out)
}

/// `(1/2π) ∫_{-k}^{k} |Ψ(t)/M_c[g](t)| dt`.
pub fn weight_l1(spec: &FunctionalSpec, model: &ErrorModel, c: f64, k: f64) -> Result<f64> {
    check_pair(spec, model, c)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| (spec.ln_psi_unchecked(c, t) - model.ln_mellin_unchecked(c, t)).re.exp() / PI;
    Ok(integrate_real(f, 0.0, k, Tolerance::new(1e-300, 1e-12).with_max_panel(1.0))?.0)
}

/// `(1/2π) ∫_{|t|≥k} |Ψ(-t) M_c[f](t)| dt` for a catalog target; infinite
/// when the integrand is not integrable.
pub fn bias_l1_tail(spec: &FunctionalSpec, target: &ErrorModel, c: f64, k: f64) -> Result<f64> {
    check_pair(spec, target, c)?;
    if !(k >= 0.0) {
        return Err(Error::input(format!("cut-off must be nonnegative, got {k}")));
    }
    let shape = decay_class_g(target, c)?.shape;
    let exponential = matches!(spec.decay(c), PsiDecay::Psi2 { .. }) || matches!(shape, DecayShape::SuperSmooth { .. });
    if !exponential && spec.decay(c).p() + shape.gamma() <= 1.0 {
        return Ok(f64::INFINITY);
    }
    let f = |t: f64| (spec.ln_psi_unchecked(c, -t) + target.ln_mellin_unchecked(c, t)).re.exp() / PI;
    let mut total = 0.0;
    let start = k.max(1.0);
    if k < 1.0 {
        total += integrate_real(f, k, 1.0, Tolerance::new(1e-300, 1e-12))?.0;
    }
    // t = start·e^v turns polynomial decay into exponential decay in v
    let tail = integrate_line(
        |v| {
            let t = start * v.exp();
            Complex64::new(f(t) * t, 0.0)
        },
        0.0,
        f64::INFINITY,
        0.0,
        1.0,
        Tolerance::new(1e-300, 1e-11),
        1e-16,
    )?;
    Ok(total + tail.value.re)
}

/// First risk bound:
/// `tail² + (E Y^{2(c-1)}/n)·((1/2π)∫_{-k}^{k}|Ψ/M_c[g]|)²`.
#[allow(clippy::too_many_arguments)]
pub fn risk_bound_b1(
    sample_moment: f64,
    spec: &FunctionalSpec,
    model: &ErrorModel,
    c: f64,
    k: f64,
    n: usize,
    bias_l1_tail: f64,
) -> Result<f64> {
    let l1 = weight_l1(spec, model, c, k)?;
    Ok(bias_l1_tail * bias_l1_tail + sample_moment / n as f64 * l1 * l1)
}

/// Second risk bound: `tail² + ‖g‖_{∞,x^{2c-1}}·σ·Δ(k)/n`.
pub fn risk_bound_b2(g_sup: f64, sigma: f64, n: usize, delta_k: f64, bias_l1_tail: f64) -> f64 {
    bias_l1_tail * bias_l1_tail + g_sup * sigma * delta_k / n as f64
}
