//! Numerical Mellin machinery: forward transform, multiplicative
//! convolution, truncated inversion and weighted L² norms.
//!
//! Forward integrals are computed in `u = ln x`, where `x^{c-1+it} h(x) dx`
//! becomes `e^{cu} h(e^u) e^{itu} du` and the oscillation is a pure
//! frequency `t`.

use super::catalog::ErrorModel;
use super::decay::{DecayClass, DecayShape};
use super::density::DensityFn;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_line, Tolerance};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Closed-form `M_c[g](t)` for a catalog density.
pub fn analytic_mellin(model: &ErrorModel, c: f64, t: f64) -> Result<Complex64> {
    model.mellin(c, t)
}

#[derive(Debug, Clone, Copy)]
pub struct MellinEstimate {
    pub value: Complex64,
    /// Quadrature error on the retained range.
    pub error: f64,
    /// Estimated contribution of the discarded tails.
    pub truncation: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MellinOptions {
    pub abs: f64,
    pub rel: f64,
    /// Tail blocks contributing less than this are discarded.
    pub tail: f64,
}

impl Default for MellinOptions {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-11,
            tail: 1e-14,
        }
    }
}

/// Quadrature approximation of `∫_0^∞ x^{c-1+it} h(x) dx`.
pub fn numeric_mellin(h: &DensityFn, c: f64, t: f64) -> Result<MellinEstimate> {
    numeric_mellin_with(h, c, t, MellinOptions::default())
}

pub fn numeric_mellin_with(h: &DensityFn, c: f64, t: f64, opts: MellinOptions) -> Result<MellinEstimate> {
    if !c.is_finite() || !t.is_finite() {
        return Err(Error::domain(format!("c and t must be finite, got c={c}, t={t}")));
    }
    let (ulo, uhi) = h.log_support();
    let tol = Tolerance::new(opts.abs, opts.rel).resolving_frequency(t);
    let est = integrate_line(
        |u| {
            let x = u.exp();
            let w = (c * u).exp() * h.eval(x);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(w, t * u)
            }
        },
        ulo,
        uhi,
        h.log_anchor(),
        1.0,
        tol,
        opts.tail,
    )?;
    Ok(MellinEstimate {
        value: est.value,
        error: est.error,
        truncation: est.truncation,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConvolutionOptions {
    pub abs: f64,
    pub rel: f64,
    pub tail: f64,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-12,
            tail: 1e-16,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConvolutionValue {
    pub value: f64,
    pub error: f64,
}

/// `(h1*h2)(y) = ∫_0^∞ h1(y/x) h2(x) x^{-1} dx`, the density of `X1·X2` at `y`.
pub fn mult_convolution(h1: &DensityFn, h2: &DensityFn, y: f64, opts: ConvolutionOptions) -> Result<ConvolutionValue> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("convolution point must be positive, got {y}")));
    }
    // In u = ln x: ∫ h1(y e^{-u}) h2(e^u) du over the overlap of both supports.
    let (a2, b2) = h2.log_support();
    let (a1, b1) = h1.log_support();
    let ly = y.ln();
    let lo = a2.max(ly - b1);
    let hi = b2.min(ly - a1);
    if !(lo < hi) {
        return Ok(ConvolutionValue { value: 0.0, error: 0.0 });
    }
    let anchor = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    };
    let est = integrate_line(
        |u| Complex64::new(h1.eval((ly - u).exp()) * h2.eval(u.exp()), 0.0),
        lo,
        hi,
        anchor,
        1.0,
        Tolerance::new(opts.abs, opts.rel),
        opts.tail,
    )?;
    Ok(ConvolutionValue {
        value: est.value.re.max(0.0),
        error: est.error + est.truncation,
    })
}

/// Hermitian symmetry `H(-t) = conj(H(t))` checked on a sample of points.
pub fn check_hermitian<H: Fn(f64) -> Complex64>(h: &H, span: f64, tol: f64) -> Result<()> {
    let span = if span.is_finite() && span > 0.0 { span } else { 1.0 };
    for j in 1..=16 {
        let t = span * j as f64 / 16.0;
        let (p, m) = (h(t), h(-t));
        let gap = (m - p.conj()).norm();
        if !(gap <= tol * p.norm().max(1.0)) {
            return Err(Error::Contract(format!(
                "function is not Hermitian: H(-t) differs from conj(H(t)) by {gap:e} at t={t}"
            )));
        }
    }
    Ok(())
}

/// Truncated inverse transform `(1/2π) ∫_{-k}^{k} x^{-c-it} H(t) dt`.
///
/// `H` must satisfy `H(-t) = conj(H(t))`; the integral is then twice the
/// real part of the half-range integral.
pub fn inverse_mellin<H: Fn(f64) -> Complex64>(h: H, c: f64, x: f64, k: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("inverse Mellin point must be positive, got {x}")));
    }
    if !(k >= 0.0) {
        return Err(Error::domain(format!("cut-off must be nonnegative, got {k}")));
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    check_hermitian(&h, k.min(1e3), 1e-10)?;
    let lx = x.ln();
    let scale = (-c * lx).exp();
    let tol = Tolerance::new(1e-12, 1e-12).resolving_frequency(lx).with_max_panel(1.0);
    let est = integrate(|t| Complex64::from_polar(scale, -t * lx) * h(t), 0.0, k, tol)?;
    Ok(est.value.re / PI)
}

/// `∫_{-∞}^{∞} (1+t²)^s |H(t)|² dt` for Hermitian `H` whose modulus obeys
/// `decay`. Returns `f64::INFINITY` when the envelope makes the integral
/// diverge. The retained range is extended until the certified tail bound
/// from `decay.c_up` falls below `rel_tail` times the running value.
pub fn sobolev_integral<H: Fn(f64) -> Complex64>(h: H, decay: &DecayClass, s: f64, rel_tail: f64) -> Result<f64> {
    let shape = decay.shape;
    if let DecayShape::Smooth { gamma } = shape {
        if 2.0 * (s - gamma) >= -1.0 {
            return Ok(f64::INFINITY);
        }
    }
    let weight = |t: f64| ((t * t).ln_1p() * s).exp();
    let tol = Tolerance::new(1e-14, 1e-12);
    // [0, 1] directly, then t = e^v on blocks of unit width in v.
    let head = integrate(|t| Complex64::new(weight(t) * h(t).norm_sqr(), 0.0), 0.0, 1.0, tol)?;
    let mut total = head.value.re;
    let mut v = 0.0;
    loop {
        let block = integrate(
            |v| {
                let t = v.exp();
                Complex64::new(weight(t) * h(t).norm_sqr() * t, 0.0)
            },
            v,
            v + 0.5,
            tol,
        )?;
        total += block.value.re;
        v += 0.5;
        let tail = tail_bound(decay, s, v.exp())?;
        if tail <= rel_tail * total {
            return Ok(2.0 * total);
        }
        if v > 700.0 {
            return Err(Error::Quadrature {
                estimate: 2.0 * total,
                error_bound: 2.0 * tail,
            });
        }
    }
}

/// Upper bound on `∫_T^∞ (1+t²)^s c_up² env(t)² dt`.
fn tail_bound(decay: &DecayClass, s: f64, t0: f64) -> Result<f64> {
    let c2 = decay.c_up * decay.c_up;
    match decay.shape {
        DecayShape::Smooth { gamma } => {
            // (1+t²)^q ≤ t^{2q} for q < 0, t ≥ 1
            let q = s - gamma;
            let p = 2.0 * q + 1.0;
            Ok(c2 * t0.powf(p) / -p)
        }
        shape @ DecayShape::SuperSmooth { .. } => {
            let f = |v: f64| {
                let t = v.exp();
                Complex64::new((2.0 * shape.ln_envelope(t) + s * (t * t).ln_1p()).exp() * t, 0.0)
            };
            let est = integrate_line(f, t0.ln(), f64::INFINITY, t0.ln(), 0.5, Tolerance::new(1e-300, 1e-6), 1e-300)?;
            Ok(c2 * (est.value.re + est.truncation))
        }
    }
}
