//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod 15-point abscissae on [-1, 1] (nonnegative half), weights, and the
// embedded 7-point Gauss weights at the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
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

/// Default cap on the number of panels held by the adaptive driver.
pub const MAX_SUBDIVISIONS: usize = 20_000;

/// Integral value with its error estimate and bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let diff = ((kronrod - gauss) * half).norm();
    // QUADPACK-style error scaling: (200 |K - G|)^{3/2}, capped by |K - G|.
    let error = if !diff.is_finite() || !value.re.is_finite() || !value.im.is_finite() {
        f64::INFINITY
    } else if diff > 0.0 {
        let scaled = (200.0 * diff).powf(1.5);
        scaled.min(diff).max(50.0 * f64::EPSILON * value.norm())
    } else {
        0.0
    };
    Panel { a, b, value, error }
}

/// Adaptive integration of `f` over `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Quadrature> {
    adaptive_integrate_panels(f, a, b, tol, 1)
}

/// Like [`adaptive_integrate`] but starts from `initial_panels` equal panels.
///
/// Oscillatory integrands `g(k) e^{ikx}` should start with a panel count
/// proportional to `|x| (b - a)` so that each panel spans a bounded number
/// of periods; see [`oscillatory_panels`].
pub fn adaptive_integrate_panels<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
) -> Result<Quadrature> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 { b } else { lo + width };
            gauss_kronrod(&f, lo, hi)
        })
        .collect();
    let mut evaluations = 15 * n0;

    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        if error <= tol {
            return Ok(Quadrature {
                value,
                error,
                evaluations,
                panels: panels.len(),
            });
        }
        if panels.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature {
                value,
                estimate: error,
                tol,
                subdivisions: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if !(mid > panel.a && mid < panel.b) {
            // Panel collapsed to floating-point resolution; nothing left to refine.
            return Err(Error::Quadrature {
                value,
                estimate: error,
                tol,
                subdivisions: panels.len() + 1,
            });
        }
        panels.push(gauss_kronrod(&f, panel.a, mid));
        panels.push(gauss_kronrod(&f, mid, panel.b));
        evaluations += 30;
    }
}

/// Initial panel count giving about one oscillation period per panel for a
/// factor `e^{ikx}` over an interval of the given width.
pub fn oscillatory_panels(width: f64, frequency: f64) -> usize {
    let periods = width * frequency.abs() / (2.0 * std::f64::consts::PI);
    (periods.ceil() as usize).max(1)
}

/// Result of a truncated semi-infinite cosine transform.
#[derive(Debug, Clone, Copy)]
pub struct CosineTransform {
    pub value: f64,
    /// Quadrature estimate on `[0, cutoff]`.
    pub error: f64,
    /// Contribution of `[cutoff, ∞)`, summed over half periods with Wynn
    /// epsilon acceleration.
    pub tail: f64,
    /// Magnitude of the last accelerated tail correction, used as a bound.
    pub tail_bound: f64,
}

/// `∫₀^∞ g(k) cos(kx) dk` for slowly decaying smooth `g`.
///
/// `[0, cutoff]` is integrated adaptively; the tail is summed half-period
/// by half-period and accelerated.
pub fn cosine_transform<G: Fn(f64) -> f64>(
    g: G,
    x: f64,
    cutoff: f64,
    tol: f64,
) -> Result<CosineTransform> {
    if !(x > 0.0) || !(cutoff > 0.0) {
        return Err(Error::InvalidInput(format!(
            "cosine transform needs x > 0 and cutoff > 0, got x={x}, cutoff={cutoff}"
        )));
    }
    let body = adaptive_integrate_panels(
        |k| Complex64::from(g(k) * (k * x).cos()),
        0.0,
        cutoff,
        tol,
        oscillatory_panels(cutoff, x),
    )?;

    // Tail: align to the zeros of cos(kx) past the cutoff.
    let half_period = std::f64::consts::PI / x;
    let first_zero = ((cutoff * x / std::f64::consts::PI - 0.5).ceil() + 0.5) * half_period;
    let integrand = |k: f64| Complex64::from(g(k) * (k * x).cos());
    let mut running = if first_zero > cutoff {
        adaptive_integrate(integrand, cutoff, first_zero, tol * 1e-2)?.value.re
    } else {
        0.0
    };
    let mut partial = Vec::new();
    for j in 0..40 {
        let lo = first_zero + half_period * j as f64;
        let hi = lo + half_period;
        let piece = adaptive_integrate(integrand, lo, hi, tol * 1e-2)?;
        running += piece.value.re;
        partial.push(running);
    }
    let (tail, tail_bound) = wynn_epsilon(&partial);
    Ok(CosineTransform {
        value: body.value.re + tail,
        error: body.error,
        tail,
        tail_bound,
    })
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
///
/// Returns the extrapolated limit and the size of the last change between
/// successive even columns as an error indicator.
pub fn wynn_epsilon(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    if n < 3 {
        let last = partial[n - 1];
        let change = if n == 2 { (partial[1] - partial[0]).abs() } else { last.abs() };
        return (last, change);
    }
    // e[k] holds column k of the epsilon table for the current tail of the sequence.
    let mut prev2: Vec<f64> = vec![0.0; n + 1];
    let mut prev1: Vec<f64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut best_change = (partial[n - 1] - partial[n - 2]).abs();
    let mut column = 1;
    while prev1.len() > 1 {
        let mut next = Vec::with_capacity(prev1.len() - 1);
        for i in 0..prev1.len() - 1 {
            let diff = prev1[i + 1] - prev1[i];
            let base = prev2[i + 1];
            let val = if diff == 0.0 { f64::INFINITY } else { base + 1.0 / diff };
            next.push(val);
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        if column % 2 == 0 {
            let len = next.len();
            let estimate = next[len - 1];
            let change = if len >= 2 { (next[len - 1] - next[len - 2]).abs() } else { best_change };
            if change <= best_change {
                best = estimate;
                best_change = change;
            }
        }
        prev2 = prev1;
        prev1 = next;
        column += 1;
    }
    (best, best_change)
}
