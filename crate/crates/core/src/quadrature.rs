//! Globally adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Regions are kept in a max-heap keyed on their error estimate; the worst
//! region is bisected until the summed error meets `max(abs, rel * |I|)`.
//! Two-dimensional regions use the tensor-product 15-point Kronrod rule with
//! the embedded 7-point Gauss rule as error reference, and are bisected along
//! the axis that contributes more of that error.

#![allow(clippy::excessive_precision)]

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

// Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15 abscissae on [-1, 1] with Kronrod and (zero-padded) Gauss weights.
struct Rule {
    nodes: [f64; 15],
    kronrod: [f64; 15],
    gauss: [f64; 15],
}

fn rule() -> Rule {
    let mut nodes = [0.0; 15];
    let mut kronrod = [0.0; 15];
    let mut gauss = [0.0; 15];
    for i in 0..7 {
        nodes[i] = -XGK[i];
        nodes[14 - i] = XGK[i];
        kronrod[i] = WGK[i];
        kronrod[14 - i] = WGK[i];
        if i % 2 == 1 {
            gauss[i] = WG[i / 2];
            gauss[14 - i] = WG[i / 2];
        }
    }
    kronrod[7] = WGK[7];
    gauss[7] = WG[3];
    Rule {
        nodes,
        kronrod,
        gauss,
    }
}

/// Convergence targets. The run stops once the total error estimate is
/// below `max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-8,
            abs: 1e-12,
            max_subdivisions: 20_000,
        }
    }
}

impl Tolerance {
    pub fn with_rel(self, rel: f64) -> Self {
        Self { rel, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Region<B> {
    bounds: B,
    value: f64,
    error: f64,
    split_x: bool,
}

impl<B> PartialEq for Region<B> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<B> Eq for Region<B> {}
impl<B> PartialOrd for Region<B> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<B> Ord for Region<B> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn check_breaks(breaks: &[f64]) -> Result<()> {
    let ok = breaks.len() >= 2
        && breaks.iter().all(|b| b.is_finite())
        && breaks.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "breakpoints",
            reason: format!("need >= 2 finite strictly increasing values, got {breaks:?}"),
        })
    }
}

fn drive<B: Copy>(
    initial: Vec<Region<B>>,
    tol: Tolerance,
    per_region_evals: usize,
    mut split: impl FnMut(&Region<B>) -> [Region<B>; 2],
) -> Result<Estimate> {
    let mut evaluations = initial.len() * per_region_evals;
    let mut value: f64 = initial.iter().map(|r| r.value).sum();
    let mut error: f64 = initial.iter().map(|r| r.error).sum();
    let mut heap: BinaryHeap<Region<B>> = initial.into_iter().collect();
    let mut subdivisions = 0;

    while error > tol.abs.max(tol.rel * value.abs()) {
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let children = split(&worst);
        evaluations += 2 * per_region_evals;
        subdivisions += 1;
        value += children[0].value + children[1].value - worst.value;
        error += children[0].error + children[1].error - worst.error;
        heap.extend(children);
        // Running sums drift; refresh them periodically.
        if subdivisions % 256 == 0 {
            value = heap.iter().map(|r| r.value).sum();
            error = heap.iter().map(|r| r.error).sum();
        }
    }

    let regions = heap.into_vec();
    Ok(Estimate {
        value: regions.iter().map(|r| r.value).sum(),
        error: regions.iter().map(|r| r.error).sum(),
        evaluations,
    })
}

fn gk_1d<F: Fn(f64) -> f64>(f: &F, rule: &Rule, a: f64, b: f64) -> Region<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (mut k, mut g) = (0.0, 0.0);
    for i in 0..15 {
        let v = f(c + h * rule.nodes[i]);
        k += rule.kronrod[i] * v;
        g += rule.gauss[i] * v;
    }
    Region {
        bounds: (a, b),
        value: k * h,
        error: ((k - g) * h).abs(),
        split_x: true,
    }
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, starting from one region
/// per break interval (put kinks and discontinuities on breakpoints).
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate> {
    check_breaks(breaks)?;
    let rule = rule();
    let initial = breaks
        .windows(2)
        .map(|w| gk_1d(&f, &rule, w[0], w[1]))
        .collect();
    drive(initial, tol, 15, |r| {
        let (a, b) = r.bounds;
        let m = 0.5 * (a + b);
        [gk_1d(&f, &rule, a, m), gk_1d(&f, &rule, m, b)]
    })
}

type Rect = (f64, f64, f64, f64);

fn gk_2d<F: Fn(f64, f64) -> f64>(f: &F, rule: &Rule, rect: Rect) -> Region<Rect> {
    let (x0, x1, y0, y1) = rect;
    let (cx, hx) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
    let (cy, hy) = (0.5 * (y0 + y1), 0.5 * (y1 - y0));
    let (mut kk, mut gk, mut kg, mut gg) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..15 {
        let x = cx + hx * rule.nodes[i];
        let (mut row_k, mut row_g) = (0.0, 0.0);
        for j in 0..15 {
            let v = f(x, cy + hy * rule.nodes[j]);
            row_k += rule.kronrod[j] * v;
            row_g += rule.gauss[j] * v;
        }
        kk += rule.kronrod[i] * row_k;
        kg += rule.kronrod[i] * row_g;
        gk += rule.gauss[i] * row_k;
        gg += rule.gauss[i] * row_g;
    }
    let jac = hx * hy;
    let err_x = ((kk - gk) * jac).abs();
    let err_y = ((kk - kg) * jac).abs();
    let err = ((kk - gg) * jac).abs().max(err_x).max(err_y);
    Region {
        bounds: rect,
        value: kk * jac,
        error: err,
        split_x: err_x >= err_y,
    }
}

/// Integrate `f(x, y)` over the rectangle spanned by the outer breakpoints,
/// starting from the tensor grid of break intervals.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_breaks: &[f64],
    y_breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    check_breaks(x_breaks)?;
    check_breaks(y_breaks)?;
    let rule = rule();
    let mut initial = Vec::new();
    for xw in x_breaks.windows(2) {
        for yw in y_breaks.windows(2) {
            initial.push(gk_2d(&f, &rule, (xw[0], xw[1], yw[0], yw[1])));
        }
    }
    drive(initial, tol, 225, |r| {
        let (x0, x1, y0, y1) = r.bounds;
        if r.split_x {
            let m = 0.5 * (x0 + x1);
            [
                gk_2d(&f, &rule, (x0, m, y0, y1)),
                gk_2d(&f, &rule, (m, x1, y0, y1)),
            ]
        } else {
            let m = 0.5 * (y0 + y1);
            [
                gk_2d(&f, &rule, (x0, x1, y0, m)),
                gk_2d(&f, &rule, (x0, x1, m, y1)),
            ]
        }
    })
}
