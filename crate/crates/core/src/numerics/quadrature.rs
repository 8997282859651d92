use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{NumericsError, Result, C64};

// 15-point Kronrod extension of the 7-point Gauss rule, abscissae on [0, 1)
// (symmetric about the centre).
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

const MAX_SEGMENTS: usize = 50_000;

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).norm();
    // Roundoff floor: a segment cannot be resolved below a few ulps of its
    // absolute integral.
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    if error < floor {
        error = floor;
    }
    Segment { a, b, value, error }
}

/// Adaptive Gauss-Kronrod integration of a complex-valued integrand over
/// `[a, b]`, refining the worst panel until the summed error estimate is
/// at most `tol`.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> Result<C64> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// As [`integrate`] for a real integrand.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate(|x| C64::new(f(x), 0.0), a, b, tol).map(|z| z.re)
}

/// Adaptive integration over `[breaks[0], breaks[last]]` with the initial
/// partition given by `breaks`. Interior breakpoints let callers place
/// panel edges at narrow features the initial rule would otherwise miss.
pub fn integrate_with_breaks<F: Fn(f64) -> C64>(f: F, breaks: &[f64], tol: f64) -> Result<C64> {
    if breaks.len() < 2 {
        return Err(NumericsError::InvalidArgument("need at least two breakpoints".into()));
    }
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::InvalidArgument("breakpoints must be finite and strictly increasing".into()));
    }

    let mut heap: BinaryHeap<Segment> = breaks.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let (total, err) = heap.iter().fold((C64::new(0.0, 0.0), 0.0), |(s, e), seg| (s + seg.value, e + seg.error));
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(NumericsError::NonConvergence { tol, estimate: f64::INFINITY });
        }
        if err <= tol {
            return Ok(total);
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(NumericsError::NonConvergence { tol, estimate: err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(NumericsError::NonConvergence { tol, estimate: err });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// Cauchy principal value of `∫ f(x) / (x - x0) dx` over `[a, b]`.
///
/// A symmetric neighbourhood `[x0 - δ, x0 + δ]` is excised and folded into
/// the smooth integrand `(f(x0 + u) - f(x0 - u)) / u` on `[0, δ]`; the
/// remaining one-sided piece is regular.
pub fn principal_value<F: Fn(f64) -> f64>(f: F, x0: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a < x0 && x0 < b) {
        return Err(NumericsError::SingularityOutsideRange { x0, a, b });
    }
    let delta = (x0 - a).min(b - x0);
    let folded = integrate_real(|u| (f(x0 + u) - f(x0 - u)) / u, 0.0, delta, 0.5 * tol)?;
    let left = x0 - delta;
    let right = x0 + delta;
    let rest = if left > a {
        integrate_real(|x| f(x) / (x - x0), a, left, 0.5 * tol)?
    } else if right < b {
        integrate_real(|x| f(x) / (x - x0), right, b, 0.5 * tol)?
    } else {
        0.0
    };
    Ok(folded + rest)
}
