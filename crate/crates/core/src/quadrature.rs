//! Adaptive Gauss–Kronrod quadrature in one and two dimensions.
//!
//! Used as an independent numerical check on the closed-form outage terms.

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
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        abs_error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `tol` or the interval budget runs out.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            abs_error: 0.0,
        };
    }
    let mut parts = vec![(a, b, kronrod15(&mut f, a, b))];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.2.abs_error).sum();
        if total_err <= tol || parts.len() >= MAX_INTERVALS {
            break;
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.abs_error.total_cmp(&y.1 .2.abs_error))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        parts.push((lo, mid, kronrod15(&mut f, lo, mid)));
        parts.push((mid, hi, kronrod15(&mut f, mid, hi)));
    }
    let mut value = 0.0;
    let mut abs_error = 0.0;
    for p in &parts {
        value += p.2.value;
        abs_error += p.2.abs_error;
    }
    Estimate { value, abs_error }
}

/// Integrates `f` over `[a, ∞)` via `x = a + scale·t/(1−t)`.
///
/// `scale` should be comparable to the width of the integrand's bulk.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    tol: f64,
) -> Estimate {
    integrate(
        |t| {
            let s = 1.0 - t;
            let x = a + scale * t / s;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (s * s)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Upper limit of an inner integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    At(f64),
    /// `+∞`, with a length scale for the variable change.
    Infinity { scale: f64 },
}

/// Iterated integral `∫_{y0}^{y1} ∫_{lo(y)}^{hi(y)} f(x, y) dx dy`.
///
/// The inner tolerance is tightened so that its accumulated error stays well
/// inside `tol`.
pub fn integrate_2d<F, L>(f: F, y0: f64, y1: f64, inner: L, tol: f64) -> Estimate
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> (f64, Upper),
{
    let width = (y1 - y0).abs().max(f64::MIN_POSITIVE);
    let inner_tol = 0.1 * tol / width;
    let mut inner_err: f64 = 0.0;
    let mut outer = integrate(
        |y| {
            let (lo, hi) = inner(y);
            let est = match hi {
                Upper::At(hi) if hi <= lo => Estimate {
                    value: 0.0,
                    abs_error: 0.0,
                },
                Upper::At(hi) => integrate(|x| f(x, y), lo, hi, inner_tol),
                Upper::Infinity { scale } => integrate_to_infinity(|x| f(x, y), lo, scale, inner_tol),
            };
            inner_err = inner_err.max(est.abs_error);
            est.value
        },
        y0,
        y1,
        0.9 * tol,
    );
    outer.abs_error += inner_err * width;
    outer
}
