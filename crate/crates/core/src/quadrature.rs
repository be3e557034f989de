//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The panel with the largest error estimate is bisected until the summed
//! error estimate falls below `max(abs_tol, rel_tol * |I|)` or the panel
//! budget runs out. Error estimates follow the QUADPACK `qk15` heuristic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panels: 2000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrates over `[a, b]`, never failing; `converged` reports whether
    /// the tolerance was met within the panel budget.
    pub fn estimate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Estimate {
        self.estimate_with_breaks(f, &[a, b])
    }

    /// As [`Quadrature::estimate`], with the initial panels split at the
    /// given ascending break points (first and last are the interval ends).
    pub fn estimate_with_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> Estimate {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut evaluations = 0;
        for w in breaks.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            let (value, error) = kronrod15(&mut f, w[0], w[1]);
            evaluations += 15;
            total += value;
            total_err += error;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }

        let target = |total: f64| self.abs_tol.max(self.rel_tol * total.abs());
        while total_err > target(total) && heap.len() < self.max_panels {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted at machine resolution
                heap.push(worst);
                break;
            }
            let (v1, e1) = kronrod15(&mut f, worst.a, mid);
            let (v2, e2) = kronrod15(&mut f, mid, worst.b);
            evaluations += 30;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Panel {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Panel {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });
        }
        // resum to shed accumulated cancellation in the running totals
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        Estimate {
            value,
            error,
            evaluations,
            converged: error <= target(value),
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        checked(self.estimate(f, a, b))
    }

    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<Estimate> {
        checked(self.estimate_with_breaks(f, breaks))
    }
}

/// `(level, outer values) -> (lower, upper)` for [`integrate_nested`].
pub type Limits<'a> = dyn Fn(usize, &[f64]) -> (f64, f64) + 'a;

/// Iterated integral over `dims` variables. `limits(level, prefix)` gives
/// the integration range of variable `level` given the values already fixed
/// for the outer variables; `levels[l]` is the rule used at depth `l`.
///
/// The returned error is the outermost estimate; `converged` is false if any
/// inner integral missed its tolerance.
pub fn integrate_nested(
    levels: &[Quadrature],
    limits: &Limits<'_>,
    f: &dyn Fn(&[f64]) -> f64,
) -> Estimate {
    let all_converged = std::cell::Cell::new(true);
    let evaluations = std::cell::Cell::new(0usize);
    let mut point = Vec::with_capacity(levels.len());
    let mut outer = nested_level(levels, 0, &mut point, limits, f, &all_converged, &evaluations);
    outer.converged &= all_converged.get();
    outer.evaluations = evaluations.get();
    outer
}

fn nested_level(
    levels: &[Quadrature],
    level: usize,
    point: &mut Vec<f64>,
    limits: &Limits<'_>,
    f: &dyn Fn(&[f64]) -> f64,
    all_converged: &std::cell::Cell<bool>,
    evaluations: &std::cell::Cell<usize>,
) -> Estimate {
    let (a, b) = limits(level, point);
    if !(b > a) {
        return Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let last = level + 1 == levels.len();
    
    levels[level].estimate(
        |x| {
            point.push(x);
            let v = if last {
                evaluations.set(evaluations.get() + 1);
                f(point)
            } else {
                let inner = nested_level(levels, level + 1, point, limits, f, all_converged, evaluations);
                if !inner.converged {
                    all_converged.set(false);
                }
                inner.value
            };
            point.pop();
            v
        },
        a,
        b,
    )
}

/// Integral of `f` over the ordered wedge `lo <= x_1 <= ... <= x_d <= hi`.
pub fn integrate_ordered_box(q: Quadrature, dims: usize, lo: f64, hi: f64, f: &dyn Fn(&[f64]) -> f64) -> Estimate {
    let levels = vec![q; dims];
    integrate_nested(
        &levels,
        &|level, prefix| if level == 0 { (lo, hi) } else { (prefix[level - 1], hi) },
        f,
    )
}

fn checked(e: Estimate) -> Result<Estimate> {
    if e.converged {
        Ok(e)
    } else {
        Err(Error::AccuracyNotMet {
            estimate: e.value,
            error: e.error,
        })
    }
}
