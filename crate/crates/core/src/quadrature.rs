//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus a
//! block-marching integrator for (semi-)infinite ranges and deterministic
//! pairwise summation.

use crate::error::{Error, Result};
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Error-control settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Upper bound on the width of the initial panels. Oscillatory integrands
    /// pass a fraction of their period here.
    pub max_panel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-11,
            rel: 1e-11,
            max_panel: f64::INFINITY,
            max_panels: 50_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_max_panel(mut self, width: f64) -> Self {
        self.max_panel = width;
        self
    }

    /// Panel width that puts at least eight nodes of the initial grid on
    /// every period of `exp(i·freq·u)`.
    pub fn resolving_frequency(self, freq: f64) -> Self {
        if freq.abs() > 0.0 {
            let w = std::f64::consts::PI / (4.0 * freq.abs());
            self.with_max_panel(self.max_panel.min(w * 8.0))
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Panel { a, b, value, error }
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Adaptive G7/K15 quadrature of a complex integrand over a finite interval.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("integration bounds must be finite, got [{a}, {b}]")));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let n0 = if tol.max_panel.is_finite() && tol.max_panel > 0.0 {
        ((hi - lo) / tol.max_panel).ceil().max(1.0) as usize
    } else {
        1
    };
    if n0 > tol.max_panels {
        return Err(Error::domain(format!(
            "interval [{lo}, {hi}] needs {n0} initial panels, limit is {}",
            tol.max_panels
        )));
    }
    let width = (hi - lo) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let pa = lo + width * i as f64;
            let pb = if i + 1 == n0 { hi } else { lo + width * (i + 1) as f64 };
            kronrod(&f, pa, pb)
        })
        .collect();

    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !is_finite(value) || !error.is_finite() {
            return Err(Error::Quadrature {
                estimate: value.re,
                error_bound: error,
            });
        }
        if error <= tol.abs.max(tol.rel * value.norm()) {
            return Ok(Estimate {
                value: value * sign,
                error,
            });
        }
        // Bisect the worst panel.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty panel list");
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= tol.max_panels || !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature {
                estimate: value.re,
                error_bound: error,
            });
        }
        panels[worst] = kronrod(&f, p.a, mid);
        panels.push(kronrod(&f, mid, p.b));
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let est = integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((est.value.re, est.error))
}

/// Result of integrating over a possibly unbounded range.
#[derive(Debug, Clone, Copy)]
pub struct LineEstimate {
    pub value: Complex64,
    /// Quadrature error on the retained range.
    pub error: f64,
    /// Estimated magnitude of the discarded tails.
    pub truncation: f64,
}

/// Integrates over `[lo, hi]` (either end may be infinite) by marching
/// outward from `anchor` in blocks of width `block`, stopping in each
/// direction once three consecutive blocks contribute less than
/// `tail_tol` in absolute value.
pub fn integrate_line<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    anchor: f64,
    block: f64,
    tol: Tolerance,
    tail_tol: f64,
) -> Result<LineEstimate> {
    let anchor = anchor.clamp(lo, hi);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut truncation = 0.0;
    for direction in [1.0, -1.0] {
        let end = if direction > 0.0 { hi } else { lo };
        let mut pos = anchor;
        let mut quiet = 0;
        let mut blocks = 0usize;
        loop {
            if pos == end {
                break;
            }
            let mut next = pos + direction * block;
            if (direction > 0.0 && next >= end) || (direction < 0.0 && next <= end) {
                next = end;
            }
            let est = integrate(&f, pos.min(next), pos.max(next), tol)?;
            value += est.value;
            error += est.error;
            let peak = block_peak(&f, pos, next) * (next - pos).abs();
            if est.value.norm().max(peak) < tail_tol {
                quiet += 1;
            } else {
                quiet = 0;
            }
            pos = next;
            blocks += 1;
            if quiet >= 3 && pos != end {
                truncation += peak;
                break;
            }
            if blocks > 20_000 {
                return Err(Error::Quadrature {
                    estimate: value.re,
                    error_bound: f64::INFINITY,
                });
            }
        }
    }
    Ok(LineEstimate {
        value,
        error,
        truncation,
    })
}

fn block_peak<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> f64 {
    (0..=16)
        .map(|i| f(a + (b - a) * i as f64 / 16.0).norm())
        .fold(0.0, f64::max)
}

/// Pairwise (cascade) summation with a fixed split order, so the result does
/// not depend on how the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
